//! Compiles a bounded register machine into a chemical reaction network.
//!
//! Each register r is represented by an active/inactive species pair `r.A`,
//! `r.I` whose counts always sum to the register's declared bound b: an
//! increment moves a token from inactive to active, a decrement the reverse.
//! The zero test of a dec instruction fires exactly when the inactive count
//! reaches b, certified either by a reversible halving ladder ending in an
//! indicator species, or by a commit gadget built from the doubly
//! exponential counter fragments. A seeded cascade produces the initial b
//! inactive tokens per register before the program's first state activates.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crn::{Crn, CrnError, SpeciesId};
use crate::dexp;
use crate::machines::{Instruction, MachineError, RegId, RmProgram};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("register `{0}` has no declared bound")]
    UnboundedRegister(String),
    #[error("bound {bound} for register `{reg}` is below the certified maximum {needed}")]
    BoundTooSmall {
        reg: String,
        bound: BigUint,
        needed: BigUint,
    },
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Dexp(#[from] dexp::DexpError),
}

/// How a register's bound is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// b = 2^rungs, zero-tested through a reversible halving ladder.
    Ladder { rungs: u32 },
    /// b = 2^(2^layer), zero-tested through counter fragments.
    Dexp { layer: u32 },
}

impl BoundMode {
    pub fn bound(&self) -> BigUint {
        match *self {
            BoundMode::Ladder { rungs } => BigUint::one() << rungs,
            BoundMode::Dexp { layer } => dexp::expected_count(layer),
        }
    }
}

/// Smallest ladder covering values up to `max`.
pub fn ladder_for(max: &BigUint) -> BoundMode {
    let mut rungs = 1;
    while (BoundMode::Ladder { rungs }).bound() < *max {
        rungs += 1;
    }
    BoundMode::Ladder { rungs }
}

/// Smallest counter layer covering values up to `max`.
pub fn dexp_for(max: &BigUint) -> BoundMode {
    let mut layer = 0;
    while (BoundMode::Dexp { layer }).bound() < *max {
        layer += 1;
    }
    BoundMode::Dexp { layer }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterEntry {
    pub active: String,
    pub inactive: String,
    pub mode: BoundMode,
    /// Declared bound, as a decimal string (bounds reach 2^(2^k)).
    pub bound: String,
    /// Species of this register's ladder, top rung first (empty in dexp mode).
    pub ladder: Vec<String>,
}

/// Everything downstream tooling needs to address the compiled network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileManifest {
    pub registers: BTreeMap<String, RegisterEntry>,
    /// instruction index -> state species
    pub states: BTreeMap<usize, String>,
    pub leader: String,
    pub output: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub halt: Option<String>,
    pub leader_set: Vec<String>,
    /// true when the network certifies completion through a halt species
    pub halting: bool,
    /// named stage boundaries (state species), for staged pipelines
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub stages: BTreeMap<String, String>,
    /// register names in seeding order
    pub fill_order: Vec<String>,
    /// leader-chain species in order (leader, then one seed per register),
    /// populated only when every register uses a ladder bound
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fill_chain: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl CompileManifest {
    pub fn leader_ids(&self, crn: &Crn) -> HashSet<SpeciesId> {
        self.leader_set
            .iter()
            .filter_map(|n| crn.species_id(n))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CompiledCrn {
    pub crn: Crn,
    pub manifest: CompileManifest,
}

/// Compilation knobs beyond the per-register bounds.
#[derive(Debug, Clone, Default)]
pub struct RmCompileOptions {
    /// Prefix applied to every emitted species name, for composing several
    /// compiled programs in one network.
    pub prefix: String,
    /// Registers whose active tokens arrive from an upstream stage: the
    /// initializer delivers only `bound - prefill` inactive tokens so the
    /// active/inactive sum still equals the bound.
    pub prefill: BTreeMap<String, u64>,
}

impl RmCompileOptions {
    pub fn prefixed(prefix: &str) -> Self {
        RmCompileOptions {
            prefix: prefix.to_owned(),
            ..Default::default()
        }
    }
}

/// Rewrite every `copy` into an inc/dec subroutine using one fresh auxiliary
/// register per copy site, leaving a program of inc/dec/halt only.
pub fn lower_copies(prog: &RmProgram) -> Result<RmProgram, MachineError> {
    Ok(lower_copies_with_map(prog)?.0)
}

/// As [`lower_copies`], also returning old-index -> new-index for every
/// instruction, so stage markers survive the renumbering.
pub fn lower_copies_with_map(prog: &RmProgram) -> Result<(RmProgram, Vec<usize>), MachineError> {
    if !prog.has_copies() {
        return Ok((prog.clone(), (0..prog.instructions().len()).collect()));
    }
    for (i, instr) in prog.instructions().iter().enumerate() {
        if matches!(instr, Instruction::Copy { .. }) && prog.register_id(&format!("aux{i}")).is_some() {
            return Err(MachineError::UnknownRegister(format!(
                "aux{i} collides with a generated auxiliary register"
            )));
        }
    }
    // instruction i maps to block starting at new_index[i]
    let mut new_index = Vec::with_capacity(prog.instructions().len());
    let mut counted = 0usize;
    for instr in prog.instructions() {
        new_index.push(counted);
        counted += match instr {
            Instruction::Copy { .. } => 5,
            _ => 1,
        };
    }
    let mut registers: Vec<String> = prog.registers().to_vec();
    let mut instructions = Vec::with_capacity(counted);
    for (i, instr) in prog.instructions().iter().enumerate() {
        match *instr {
            Instruction::Halt => instructions.push(Instruction::Halt),
            Instruction::Inc { reg, next } => instructions.push(Instruction::Inc {
                reg,
                next: new_index[next],
            }),
            Instruction::Dec {
                reg,
                next_nonzero,
                next_zero,
            } => instructions.push(Instruction::Dec {
                reg,
                next_nonzero: new_index[next_nonzero],
                next_zero: new_index[next_zero],
            }),
            Instruction::Copy { src, dst, next } => {
                let aux = RegId(registers.len());
                registers.push(format!("aux{i}"));
                let base = new_index[i];
                // move src into (dst, aux), then move aux back into src
                instructions.push(Instruction::Dec {
                    reg: src,
                    next_nonzero: base + 1,
                    next_zero: base + 3,
                });
                instructions.push(Instruction::Inc {
                    reg: dst,
                    next: base + 2,
                });
                instructions.push(Instruction::Inc {
                    reg: aux,
                    next: base,
                });
                instructions.push(Instruction::Dec {
                    reg: aux,
                    next_nonzero: base + 4,
                    next_zero: new_index[next],
                });
                instructions.push(Instruction::Inc {
                    reg: src,
                    next: base + 3,
                });
            }
        }
    }
    let lowered = RmProgram::new(
        registers,
        instructions,
        new_index[prog.initial_state()],
        prog.output(),
    )?;
    Ok((lowered, new_index))
}

fn state_species(prog: &RmProgram, index: usize) -> String {
    match prog.instructions()[index] {
        Instruction::Halt => "H".to_owned(),
        _ => format!("S{index}"),
    }
}

/// Compile `prog` (after copy lowering) into a network. `bounds` must cover
/// every register of the original program; auxiliary registers introduced by
/// copy lowering inherit the bound of their copy's source register, and the
/// reserved always-zero register `nil` gets the smallest ladder.
///
/// The optional `prefix` namespaces every emitted species, so several
/// compiled programs can be composed in one network.
pub fn compile_rm(
    prog: &RmProgram,
    bounds: &BTreeMap<String, BoundMode>,
    options: &RmCompileOptions,
) -> Result<CompiledCrn, CompileError> {
    let prefix = options.prefix.as_str();
    for reg in prog.registers() {
        if reg != "nil" && !reg.starts_with("aux") && !bounds.contains_key(reg) {
            return Err(CompileError::UnboundedRegister(reg.clone()));
        }
    }
    // aux bounds: the aux of copy site i holds at most the value of the
    // copy's source register
    let mut full_bounds: BTreeMap<String, BoundMode> = bounds.clone();
    for (i, instr) in prog.instructions().iter().enumerate() {
        if let Instruction::Copy { src, .. } = instr {
            let src_mode = *bounds
                .get(prog.register_name(*src))
                .ok_or_else(|| CompileError::UnboundedRegister(prog.register_name(*src).into()))?;
            full_bounds.insert(format!("aux{i}"), src_mode);
        }
    }
    let lowered = lower_copies(prog)?;
    full_bounds
        .entry("nil".to_owned())
        .or_insert(BoundMode::Ladder { rungs: 1 });

    let p = |name: &str| {
        if prefix.is_empty() {
            name.to_owned()
        } else {
            format!("{prefix}{name}")
        }
    };

    let mut crn = Crn::new();
    let mut manifest = CompileManifest {
        registers: BTreeMap::new(),
        states: BTreeMap::new(),
        leader: p("L"),
        output: p(&format!("{}.A", lowered.register_name(lowered.output()))),
        halt: None,
        leader_set: vec![p("L")],
        halting: false,
        stages: BTreeMap::new(),
        fill_order: lowered.registers().to_vec(),
        fill_chain: vec![p("L")],
        notes: Vec::new(),
    };
    let all_ladder = lowered
        .registers()
        .iter()
        .all(|r| matches!(full_bounds.get(r), Some(BoundMode::Ladder { .. })));

    // which registers carry a zero-test site
    let mut tested: HashSet<usize> = HashSet::new();
    for instr in lowered.instructions() {
        if let Instruction::Dec { reg, .. } = instr {
            tested.insert(reg.0);
        }
    }

    // ---- initializer: leader chain seeding every register's fill ----
    let mut current = p("L");
    for (idx, reg) in lowered.registers().iter().enumerate() {
        let mode = *full_bounds
            .get(reg)
            .ok_or_else(|| CompileError::UnboundedRegister(reg.clone()))?;
        let inactive = p(&format!("{reg}.I"));
        let prefill = options.prefill.get(reg).copied().unwrap_or(0);
        match mode {
            BoundMode::Ladder { rungs } => {
                let next = p(&format!("Init{idx}"));
                if prefill == 0 {
                    // doubling chain delivering the full bound
                    let g1 = p(&format!("{reg}.G1"));
                    crn.add_by_name(&[(&current, 1)], &[(&g1, 1), (&next, 1)])?;
                    for j in 1..rungs {
                        let a = p(&format!("{reg}.G{j}"));
                        let b = p(&format!("{reg}.G{}", j + 1));
                        crn.add_by_name(&[(&a, 1)], &[(&b, 2)])?;
                    }
                    let last = p(&format!("{reg}.G{rungs}"));
                    crn.add_by_name(&[(&last, 1)], &[(&inactive, 2)])?;
                } else {
                    // bit cascade delivering bound - prefill tokens: level j
                    // holds 2^(rungs-j) tokens, each emitting one bit's worth
                    let bound: u64 = u64::try_from(&mode.bound()).map_err(|_| {
                        CompileError::BoundTooSmall {
                            reg: reg.clone(),
                            bound: mode.bound(),
                            needed: BigUint::from(prefill),
                        }
                    })?;
                    if prefill > bound {
                        return Err(CompileError::BoundTooSmall {
                            reg: reg.clone(),
                            bound: mode.bound(),
                            needed: BigUint::from(prefill),
                        });
                    }
                    let deliver = bound - prefill;
                    let w = |j: u32| p(&format!("{reg}.W{j}"));
                    if deliver == 0 {
                        crn.add_by_name(&[(&current, 1)], &[(&next, 1)])?;
                    } else {
                        crn.add_by_name(&[(&current, 1)], &[(&w(rungs), 1), (&next, 1)])?;
                        for j in (1..=rungs).rev() {
                            let bit = (deliver >> (rungs - j)) & 1 == 1;
                            let lower = w(j.saturating_sub(1));
                            let mut products: Vec<(&str, u32)> = Vec::new();
                            if j > 1 {
                                products.push((lower.as_str(), 2));
                            }
                            if bit {
                                products.push((inactive.as_str(), 1));
                            }
                            let top = w(j);
                            crn.add_by_name(&[(top.as_str(), 1)], &products)?;
                        }
                    }
                }
                manifest.leader_set.push(next.clone());
                manifest.fill_chain.push(next.clone());
                current = next;
            }
            BoundMode::Dexp { layer } => {
                if prefill > 0 {
                    return Err(CompileError::BoundTooSmall {
                        reg: reg.clone(),
                        bound: mode.bound(),
                        needed: BigUint::from(prefill),
                    });
                }
                let frag = dexp::production_fragment_ns(layer, &inactive, &p(&format!("{reg}.init")));
                crn.add_by_name(&[(&current, 1)], &[(&frag.s_species, 1)])?;
                crn.absorb(&frag.crn);
                manifest.leader_set.extend(frag.leader_names.iter().cloned());
                current = frag.h_species.clone();
            }
        }
        manifest.registers.insert(
            reg.clone(),
            RegisterEntry {
                active: p(&format!("{reg}.A")),
                inactive,
                mode,
                bound: mode.bound().to_string(),
                ladder: Vec::new(),
            },
        );
    }
    let s_init = p(&state_species(&lowered, lowered.initial_state()));
    crn.add_by_name(&[(&current, 1)], &[(&s_init, 1)])?;
    if !all_ladder {
        manifest.fill_chain.clear();
    }

    // ---- program reactions ----
    for (i, instr) in lowered.instructions().iter().enumerate() {
        let si = p(&state_species(&lowered, i));
        manifest.states.insert(i, si.clone());
        if !matches!(instr, Instruction::Halt) && !manifest.leader_set.contains(&si) {
            manifest.leader_set.push(si.clone());
        }
        match *instr {
            Instruction::Halt => {
                manifest.halt = Some(si.clone());
                manifest.halting = true;
                if !manifest.leader_set.contains(&si) {
                    manifest.leader_set.push(si.clone());
                }
            }
            Instruction::Inc { reg, next } => {
                let r = lowered.register_name(reg);
                let sj = p(&state_species(&lowered, next));
                crn.add_by_name(
                    &[(&si, 1), (&p(&format!("{r}.I")), 1)],
                    &[(&p(&format!("{r}.A")), 1), (&sj, 1)],
                )?;
            }
            Instruction::Dec {
                reg,
                next_nonzero,
                next_zero,
            } => {
                let r = lowered.register_name(reg);
                let snz = p(&state_species(&lowered, next_nonzero));
                let sz = p(&state_species(&lowered, next_zero));
                crn.add_by_name(
                    &[(&si, 1), (&p(&format!("{r}.A")), 1)],
                    &[(&p(&format!("{r}.I")), 1), (&snz, 1)],
                )?;
                match full_bounds[r] {
                    BoundMode::Ladder { .. } => {
                        let c1 = p(&format!("{r}.C1"));
                        crn.add_by_name(&[(&si, 1), (&c1, 1)], &[(&sz, 1), (&c1, 1)])?;
                    }
                    BoundMode::Dexp { .. } => {
                        let parked = p(&format!("P{i}"));
                        let committed = p(&format!("Q{i}"));
                        let take_s = p(&format!("{r}.take.S"));
                        let take_h = p(&format!("{r}.take.H"));
                        let put_s = p(&format!("{r}.put.S"));
                        let put_h = p(&format!("{r}.put.H"));
                        crn.add_reversible_by_name(&[(&si, 1)], &[(&parked, 1), (&take_s, 1)])?;
                        crn.add_by_name(
                            &[(&parked, 1), (&take_h, 1)],
                            &[(&committed, 1), (&put_s, 1)],
                        )?;
                        crn.add_by_name(&[(&committed, 1), (&put_h, 1)], &[(&sz, 1)])?;
                    }
                }
            }
            Instruction::Copy { .. } => unreachable!("copies were lowered"),
        }
    }

    // ---- zero-check infrastructure, once per tested register ----
    for (idx, reg) in lowered.registers().iter().enumerate() {
        if !tested.contains(&idx) {
            continue;
        }
        let inactive = p(&format!("{reg}.I"));
        match full_bounds[reg.as_str()] {
            BoundMode::Ladder { rungs } => {
                let rung = |m: u32| p(&format!("{reg}.C{m}"));
                crn.add_reversible_by_name(&[(&inactive, 2)], &[(&rung(rungs), 1)])?;
                for m in (2..=rungs).rev() {
                    crn.add_reversible_by_name(&[(&rung(m), 2)], &[(&rung(m - 1), 1)])?;
                }
                let entry = manifest.registers.get_mut(reg).unwrap();
                entry.ladder = (1..=rungs).rev().map(rung).collect();
            }
            BoundMode::Dexp { layer } => {
                // shared per-register fragment pair: drain the inactive pool
                // to certify emptiness, then refill it
                let take = dexp::consumption_fragment_ns(layer, &inactive, &p(&format!("{reg}.take")));
                let put = dexp::production_fragment_ns(layer, &inactive, &p(&format!("{reg}.put")));
                // alias the fragment endpoints to the names the sites used
                let mut take_crn = take.crn.clone();
                take_crn.rename_species(&take.s_species, &p(&format!("{reg}.take.S")))?;
                take_crn.rename_species(&take.h_species, &p(&format!("{reg}.take.H")))?;
                let mut put_crn = put.crn.clone();
                put_crn.rename_species(&put.s_species, &p(&format!("{reg}.put.S")))?;
                put_crn.rename_species(&put.h_species, &p(&format!("{reg}.put.H")))?;
                crn.absorb(&take_crn);
                crn.absorb(&put_crn);
                for frag in [&take, &put] {
                    for name in &frag.leader_names {
                        let mapped = if name == &frag.s_species {
                            p(&format!("{reg}.{}.S", if frag.index == 3 { "take" } else { "put" }))
                        } else if name == &frag.h_species {
                            p(&format!("{reg}.{}.H", if frag.index == 3 { "take" } else { "put" }))
                        } else {
                            name.clone()
                        };
                        if !manifest.leader_set.contains(&mapped) {
                            manifest.leader_set.push(mapped);
                        }
                    }
                }
            }
        }
    }

    manifest.leader_set.sort();
    manifest.leader_set.dedup();
    Ok(CompiledCrn { crn, manifest })
}

/// Per-register linear conservation weights for a ladder-only compile:
/// active and inactive tokens count 1, ladder rung m counts 2^(rungs-m+1),
/// fill-cascade stage j counts 2^(rungs-j+1), and every leader-chain species
/// that fires before this register's cascade is seeded carries the full
/// bound. Under these weights every reaction has zero net effect, so the
/// weighted sum equals the bound along every path from {1 leader}.
pub fn conservation_weights(
    compiled: &CompiledCrn,
    register: &str,
) -> Option<Vec<(SpeciesId, BigUint)>> {
    let entry = compiled.manifest.registers.get(register)?;
    let BoundMode::Ladder { rungs } = entry.mode else {
        return None; // counter-fragment pools are not linearly weighted
    };
    if compiled.manifest.fill_chain.is_empty() {
        return None;
    }
    let crn = &compiled.crn;
    let bound = entry.mode.bound();
    let base = entry.inactive.strip_suffix(".I")?.to_owned();
    let mut weights: Vec<(SpeciesId, BigUint)> = Vec::new();
    let add = |name: &str, w: BigUint, weights: &mut Vec<(SpeciesId, BigUint)>| {
        if let Some(id) = crn.species_id(name) {
            weights.push((id, w));
        }
    };
    add(&entry.active, BigUint::one(), &mut weights);
    add(&entry.inactive, BigUint::one(), &mut weights);
    for m in 1..=rungs {
        add(&format!("{base}.C{m}"), BigUint::one() << (rungs - m + 1), &mut weights);
    }
    for j in 1..=rungs {
        add(&format!("{base}.G{j}"), BigUint::one() << (rungs - j + 1), &mut weights);
    }
    // chain[i] seeds register i; chain[0..=i] still hold register i's mass
    let position = compiled
        .manifest
        .fill_order
        .iter()
        .position(|r| r == register)?;
    for name in compiled.manifest.fill_chain.iter().take(position + 1) {
        add(name, bound.clone(), &mut weights);
    }
    Some(weights)
}
