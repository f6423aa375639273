//! Doubly exponential counters: reversible reaction fragments whose endpoint
//! species certify that exactly 2^(2^k) copies of a counting species were
//! produced (or consumed).
//!
//! A layer-k fragment behaves like the boxed rule `S ⇌ H + 2^(2^k) X` (or
//! its consumption mirror `2^(2^k) X + S ⇌ H`) but is built from third-order
//! reactions: nine reversible templates chain four layer-(k-1) boxes into a
//! nested loop that must convert the inner counting species exactly
//! quadratically many times before the endpoint species can appear. Boxes
//! referenced by several expansions are emitted once and shared by name.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::crn::{Crn, CrnError, SpeciesId};

#[derive(Debug, Error)]
pub enum DexpError {
    #[error("meta-reaction index must be 1..=4, got {0}")]
    BadIndex(u8),
    #[error("direction {0:?} is inconsistent with index {1} (1,2 produce; 3,4 consume)")]
    DirectionMismatch(Direction, u8),
    #[error("layer-{0} expansion needs layer >= 1; use the base fragments")]
    LayerTooSmall(u32),
    #[error(transparent)]
    Crn(#[from] CrnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Produce,
    Consume,
}

pub fn direction_of(index: u8) -> Direction {
    if index <= 2 {
        Direction::Produce
    } else {
        Direction::Consume
    }
}

/// A boxed meta-reaction to expand: layer, index, and an optional external
/// species the counting species is aliased to.
#[derive(Debug, Clone)]
pub struct MetaReactionSpec {
    pub layer: u32,
    pub index: u8,
    pub direction: Direction,
    pub target: Option<String>,
}

impl MetaReactionSpec {
    pub fn new(layer: u32, index: u8, target: Option<String>) -> Result<Self, DexpError> {
        if !(1..=4).contains(&index) {
            return Err(DexpError::BadIndex(index));
        }
        Ok(MetaReactionSpec {
            layer,
            index,
            direction: direction_of(index),
            target,
        })
    }
}

/// An expanded fragment with its endpoint species and leader bookkeeping.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub crn: Crn,
    /// Start species: present exactly in the fragment's rest configuration.
    pub s_species: String,
    /// End species: present exactly when the full count has been delivered.
    pub h_species: String,
    /// The counting species (the aliased target, when one was given).
    pub x_species: String,
    /// Names of the species that carry control (exactly one is ever present).
    pub leader_names: Vec<String>,
    pub layer: u32,
    pub index: u8,
    pub direction: Direction,
    /// 2^(2^layer)
    pub expected_count: BigUint,
    /// Reaction indices of the top-layer conversion step (forward, reverse):
    /// the net number of forward firings in a completed run equals
    /// `expected_count`.
    pub conversion: (usize, usize),
}

impl Fragment {
    pub fn leader_ids(&self) -> HashSet<SpeciesId> {
        self.leader_names
            .iter()
            .filter_map(|n| self.crn.species_id(n))
            .collect()
    }

    pub fn s_id(&self) -> SpeciesId {
        self.crn.species_id(&self.s_species).unwrap()
    }

    pub fn h_id(&self) -> SpeciesId {
        self.crn.species_id(&self.h_species).unwrap()
    }

    pub fn x_id(&self) -> SpeciesId {
        self.crn.species_id(&self.x_species).unwrap()
    }
}

pub fn expected_count(layer: u32) -> BigUint {
    BigUint::one() << (1usize << layer)
}

fn species_name(family: &str, index: u8, layer: u32) -> String {
    format!("{family}_{index}^{layer}")
}

/// Emit the box for (layer, index) with canonical species names, recursing
/// into the four referenced sub-boxes. Shared boxes are emitted once; repeat
/// references return placeholder indices, which only ever happens below the
/// top level.
fn emit_box(crn: &mut Crn, layer: u32, index: u8, leaders: &mut Vec<String>, memo: &mut HashSet<(u32, u8)>) -> Result<(usize, usize), CrnError> {
    if !memo.insert((layer, index)) {
        return Ok((usize::MAX, usize::MAX));
    }
    let s = species_name("S", index, layer);
    let h = species_name("H", index, layer);
    let x = species_name("X", index, layer);
    leaders.push(s.clone());
    leaders.push(h.clone());
    if layer == 0 {
        let before = crn.size();
        match direction_of(index) {
            Direction::Produce => crn.add_reversible_by_name(&[(&s, 1)], &[(&h, 1), (&x, 2)])?,
            Direction::Consume => crn.add_reversible_by_name(&[(&x, 2), (&s, 1)], &[(&h, 1)])?,
        }
        // for the base box the conversion step is the box reaction itself
        return Ok((before, before + 1));
    }

    let k = layer;
    let p = k - 1;
    let t1 = species_name("T1", index, k);
    let t2 = species_name("T2", index, k);
    let c1 = species_name("C1", index, k);
    let c2 = species_name("C2", index, k);
    let c3 = species_name("C3", index, k);
    let c4 = species_name("C4", index, k);
    let s1p = species_name("S", 1, p);
    let h1p = species_name("H", 1, p);
    let x1p = species_name("X", 1, p);
    let s2p = species_name("S", 2, p);
    let h2p = species_name("H", 2, p);
    let x2p = species_name("X", 2, p);
    let s3p = species_name("S", 3, p);
    let h3p = species_name("H", 3, p);
    let x3p = species_name("X", 3, p);
    let s4p = species_name("S", 4, p);
    let h4p = species_name("H", 4, p);
    let x4p = species_name("X", 4, p);

    leaders.push(t1.clone());
    leaders.push(t2.clone());

    crn.add_reversible_by_name(&[(&s, 1)], &[(&c1, 1), (&s1p, 1)])?;
    crn.add_reversible_by_name(&[(&c1, 1), (&h1p, 1)], &[(&t1, 1)])?;
    crn.add_reversible_by_name(&[(&t1, 1), (&x1p, 1)], &[(&c2, 1), (&x4p, 1), (&s2p, 1)])?;
    crn.add_reversible_by_name(&[(&c2, 1), (&h2p, 1)], &[(&t2, 1)])?;
    let conv_fwd = crn.size();
    match direction_of(index) {
        Direction::Produce => {
            crn.add_reversible_by_name(&[(&t2, 1), (&x2p, 1)], &[(&t2, 1), (&x3p, 1), (&x, 1)])?
        }
        Direction::Consume => {
            crn.add_reversible_by_name(&[(&x, 1), (&t2, 1), (&x2p, 1)], &[(&t2, 1), (&x3p, 1)])?
        }
    }
    let conversion = (conv_fwd, conv_fwd + 1);
    crn.add_reversible_by_name(&[(&t2, 1)], &[(&c3, 1), (&s3p, 1)])?;
    crn.add_reversible_by_name(&[(&c3, 1), (&h3p, 1)], &[(&t1, 1)])?;
    crn.add_reversible_by_name(&[(&c3, 1), (&h3p, 1)], &[(&c4, 1), (&s4p, 1)])?;
    crn.add_reversible_by_name(&[(&c4, 1), (&h4p, 1)], &[(&h, 1)])?;

    for sub in 1..=4 {
        emit_box(crn, p, sub, leaders, memo)?;
    }
    Ok(conversion)
}

/// Expand a meta-reaction into its fragment, optionally prefixing the
/// top-layer species with a namespace (sub-boxes keep their shared names).
pub fn expand_namespaced(spec: &MetaReactionSpec, ns: Option<&str>) -> Result<Fragment, DexpError> {
    if !(1..=4).contains(&spec.index) {
        return Err(DexpError::BadIndex(spec.index));
    }
    if spec.direction != direction_of(spec.index) {
        return Err(DexpError::DirectionMismatch(spec.direction, spec.index));
    }
    let mut crn = Crn::new();
    let mut leaders = Vec::new();
    let mut memo = HashSet::new();
    let conversion = emit_box(&mut crn, spec.layer, spec.index, &mut leaders, &mut memo)?;

    let mut s = species_name("S", spec.index, spec.layer);
    let mut h = species_name("H", spec.index, spec.layer);
    let mut x = species_name("X", spec.index, spec.layer);
    if let Some(ns) = ns {
        let top: Vec<String> = if spec.layer == 0 {
            vec![s.clone(), h.clone(), x.clone()]
        } else {
            ["S", "H", "X", "T1", "T2", "C1", "C2", "C3", "C4"]
                .iter()
                .map(|f| species_name(f, spec.index, spec.layer))
                .collect()
        };
        for name in &top {
            let new = format!("{ns}.{name}");
            crn.rename_species(name, &new)?;
            for l in leaders.iter_mut() {
                if l == name {
                    *l = new.clone();
                }
            }
        }
        s = format!("{ns}.{s}");
        h = format!("{ns}.{h}");
        x = format!("{ns}.{x}");
    }
    if let Some(target) = &spec.target {
        crn.rename_species(&x, target)?;
        x = target.clone();
    }

    Ok(Fragment {
        crn,
        s_species: s,
        h_species: h,
        x_species: x,
        leader_names: leaders,
        layer: spec.layer,
        index: spec.index,
        direction: spec.direction,
        expected_count: expected_count(spec.layer),
        conversion,
    })
}

pub fn expand(spec: &MetaReactionSpec) -> Result<Fragment, DexpError> {
    expand_namespaced(spec, None)
}

/// The four layer-0 fragments, in index order.
pub fn base_layer() -> [Fragment; 4] {
    [1u8, 2, 3, 4].map(|i| {
        expand(&MetaReactionSpec::new(0, i, None).unwrap()).expect("base fragments are well-formed")
    })
}

/// Fragment delivering `2^(2^layer)` copies of `target` (index 1).
pub fn production_fragment(layer: u32, target: &str) -> Fragment {
    let spec = MetaReactionSpec::new(layer, 1, Some(target.to_owned())).unwrap();
    expand(&spec).expect("production fragment is well-formed")
}

/// Fragment absorbing `2^(2^layer)` copies of `target` (index 3).
pub fn consumption_fragment(layer: u32, target: &str) -> Fragment {
    let spec = MetaReactionSpec::new(layer, 3, Some(target.to_owned())).unwrap();
    expand(&spec).expect("consumption fragment is well-formed")
}

/// Namespaced variants for embedding several fragments in one network.
pub fn production_fragment_ns(layer: u32, target: &str, ns: &str) -> Fragment {
    let spec = MetaReactionSpec::new(layer, 1, Some(target.to_owned())).unwrap();
    expand_namespaced(&spec, Some(ns)).expect("production fragment is well-formed")
}

pub fn consumption_fragment_ns(layer: u32, target: &str, ns: &str) -> Fragment {
    let spec = MetaReactionSpec::new(layer, 3, Some(target.to_owned())).unwrap();
    expand_namespaced(&spec, Some(ns)).expect("consumption fragment is well-formed")
}
