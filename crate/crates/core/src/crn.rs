//! Discrete chemical reaction network model: species, reactions,
//! configurations, reaction semantics, and text/structured serialization.
//!
//! Counts are arbitrary-precision nonnegative integers. The counter
//! constructions in this crate deliberately reach counts like 2^(2^k), so
//! fixed-width counts in the public model would silently overflow. The
//! search/simulation engine keeps its own bounded fast path and reports an
//! explicit error if a count leaves the machine-word range.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

/// Maximum total molecules on either side of a reaction.
pub const MAX_ARITY: u32 = 3;

#[derive(Debug, Error)]
pub enum CrnError {
    #[error("reaction needs 1..={MAX_ARITY} reactant molecules, got {0}")]
    ReactantArity(u32),
    #[error("reaction allows at most {MAX_ARITY} product molecules, got {0}")]
    ProductArity(u32),
    #[error("null reaction: reactants equal products")]
    NullReaction,
    #[error("reverse direction is not a valid reaction: {0}")]
    InvalidReverse(Box<CrnError>),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("invalid species name `{0}`: {1}")]
    BadSpeciesName(String, &'static str),
    #[error("species id {0} out of range")]
    BadSpeciesId(u32),
    #[error("reaction not applicable in this configuration")]
    NotApplicable,
    #[error("cannot rename to `{0}`: name already in use")]
    RenameCollision(String),
    #[error("zero stoichiometric coefficient for `{0}`")]
    ZeroCoefficient(String),
}

#[derive(Debug, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

/// Index of a species inside one [`Crn`]'s species table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesId(pub u32);

impl SpeciesId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One side of a reaction: species with multiplicities, sorted by id,
/// coalesced, zero-free.
pub type Side = SmallVec<[(SpeciesId, u32); 3]>;

fn normalize_side(side: &[(SpeciesId, u32)]) -> Side {
    let mut map: BTreeMap<SpeciesId, u32> = BTreeMap::new();
    for &(id, coef) in side {
        *map.entry(id).or_insert(0) += coef;
    }
    map.into_iter().filter(|&(_, c)| c > 0).collect()
}

fn side_total(side: &Side) -> u32 {
    side.iter().map(|&(_, c)| c).sum()
}

/// A reaction with at most three reactant and three product molecules.
/// Reactants are never empty and the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reaction {
    reactants: Side,
    products: Side,
}

impl Reaction {
    pub fn new(reactants: &[(SpeciesId, u32)], products: &[(SpeciesId, u32)]) -> Result<Self, CrnError> {
        let reactants = normalize_side(reactants);
        let products = normalize_side(products);
        let rt = side_total(&reactants);
        let pt = side_total(&products);
        if rt == 0 || rt > MAX_ARITY {
            return Err(CrnError::ReactantArity(rt));
        }
        if pt > MAX_ARITY {
            return Err(CrnError::ProductArity(pt));
        }
        if reactants == products {
            return Err(CrnError::NullReaction);
        }
        Ok(Reaction { reactants, products })
    }

    /// The reverse direction, if it is itself a valid reaction.
    pub fn reversed(&self) -> Result<Self, CrnError> {
        Reaction::new(&self.products, &self.reactants)
            .map_err(|e| CrnError::InvalidReverse(Box::new(e)))
    }

    pub fn reactants(&self) -> &[(SpeciesId, u32)] {
        &self.reactants
    }

    pub fn products(&self) -> &[(SpeciesId, u32)] {
        &self.products
    }

    /// Net count change per species, sorted by id; zero entries removed.
    pub fn delta(&self) -> SmallVec<[(SpeciesId, i64); 6]> {
        let mut map: BTreeMap<SpeciesId, i64> = BTreeMap::new();
        for &(id, c) in self.reactants.iter() {
            *map.entry(id).or_insert(0) -= c as i64;
        }
        for &(id, c) in self.products.iter() {
            *map.entry(id).or_insert(0) += c as i64;
        }
        map.into_iter().filter(|&(_, d)| d != 0).collect()
    }

    pub fn reactant_total(&self) -> u32 {
        side_total(&self.reactants)
    }

    pub fn product_total(&self) -> u32 {
        side_total(&self.products)
    }

    /// Multiplicity of `id` among the reactants.
    pub fn reactant_coef(&self, id: SpeciesId) -> u32 {
        self.reactants.iter().find(|&&(i, _)| i == id).map_or(0, |&(_, c)| c)
    }

    pub fn product_coef(&self, id: SpeciesId) -> u32 {
        self.products.iter().find(|&&(i, _)| i == id).map_or(0, |&(_, c)| c)
    }
}

fn validate_name(name: &str) -> Result<(), CrnError> {
    if name.is_empty() {
        return Err(CrnError::BadSpeciesName(name.into(), "empty"));
    }
    if name == "0" {
        return Err(CrnError::BadSpeciesName(name.into(), "`0` denotes an empty product side"));
    }
    let ok = name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '^' | '\'' | '[' | ']' | '{' | '}' | '-'));
    if !ok || name.chars().next().map_or(true, |c| !c.is_ascii_alphanumeric()) {
        return Err(CrnError::BadSpeciesName(
            name.into(),
            "names start alphanumeric and use only [A-Za-z0-9_.^'[]{}-]",
        ));
    }
    Ok(())
}

/// A chemical reaction network: an interned species table and a duplicate-free
/// reaction list. `size()` is the number of reactions.
#[derive(Debug, Clone, Default)]
pub struct Crn {
    names: Vec<String>,
    by_name: HashMap<String, SpeciesId>,
    reactions: Vec<Reaction>,
    seen: HashSet<Reaction>,
}

impl Crn {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern `name`, returning its id (existing or fresh).
    pub fn species(&mut self, name: &str) -> Result<SpeciesId, CrnError> {
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        validate_name(name)?;
        let id = SpeciesId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.by_name.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn species_id(&self, name: &str) -> Option<SpeciesId> {
        self.by_name.get(name).copied()
    }

    pub fn species_name(&self, id: SpeciesId) -> &str {
        &self.names[id.index()]
    }

    pub fn species_names(&self) -> &[String] {
        &self.names
    }

    pub fn species_len(&self) -> usize {
        self.names.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Number of reactions; the size measure for all reports.
    pub fn size(&self) -> usize {
        self.reactions.len()
    }

    /// Add a reaction; duplicates are dropped. Returns whether it was new.
    pub fn add(&mut self, reactants: &[(SpeciesId, u32)], products: &[(SpeciesId, u32)]) -> Result<bool, CrnError> {
        let max = self.names.len() as u32;
        for &(id, _) in reactants.iter().chain(products) {
            if id.0 >= max {
                return Err(CrnError::BadSpeciesId(id.0));
            }
        }
        let rxn = Reaction::new(reactants, products)?;
        Ok(self.push_reaction(rxn))
    }

    fn push_reaction(&mut self, rxn: Reaction) -> bool {
        if self.seen.contains(&rxn) {
            return false;
        }
        self.seen.insert(rxn.clone());
        self.reactions.push(rxn);
        true
    }

    /// Add a reaction given species names (interning as needed).
    pub fn add_by_name(&mut self, reactants: &[(&str, u32)], products: &[(&str, u32)]) -> Result<bool, CrnError> {
        let r: Vec<(SpeciesId, u32)> = reactants
            .iter()
            .map(|&(n, c)| Ok((self.species(n)?, c)))
            .collect::<Result<_, CrnError>>()?;
        let p: Vec<(SpeciesId, u32)> = products
            .iter()
            .map(|&(n, c)| Ok((self.species(n)?, c)))
            .collect::<Result<_, CrnError>>()?;
        self.add(&r, &p)
    }

    /// Add both directions of a reversible reaction.
    pub fn add_reversible(&mut self, reactants: &[(SpeciesId, u32)], products: &[(SpeciesId, u32)]) -> Result<(), CrnError> {
        let fwd = Reaction::new(reactants, products)?;
        let rev = fwd.reversed()?;
        self.push_reaction(fwd);
        self.push_reaction(rev);
        Ok(())
    }

    pub fn add_reversible_by_name(&mut self, reactants: &[(&str, u32)], products: &[(&str, u32)]) -> Result<(), CrnError> {
        let r: Vec<(SpeciesId, u32)> = reactants
            .iter()
            .map(|&(n, c)| Ok((self.species(n)?, c)))
            .collect::<Result<_, CrnError>>()?;
        let p: Vec<(SpeciesId, u32)> = products
            .iter()
            .map(|&(n, c)| Ok((self.species(n)?, c)))
            .collect::<Result<_, CrnError>>()?;
        self.add_reversible(&r, &p)
    }

    /// Union of species (identified by name) and reactions, duplicates kept once.
    pub fn merge(&self, other: &Crn) -> Crn {
        let mut out = self.clone();
        out.absorb(other);
        out
    }

    /// In-place merge.
    pub fn absorb(&mut self, other: &Crn) {
        let map: Vec<SpeciesId> = other
            .names
            .iter()
            .map(|n| self.species(n).expect("merged names were already validated"))
            .collect();
        for rxn in &other.reactions {
            let r: Vec<(SpeciesId, u32)> = rxn.reactants.iter().map(|&(id, c)| (map[id.index()], c)).collect();
            let p: Vec<(SpeciesId, u32)> = rxn.products.iter().map(|&(id, c)| (map[id.index()], c)).collect();
            let rxn = Reaction::new(&r, &p).expect("merged reactions were already validated");
            self.push_reaction(rxn);
        }
    }

    /// Rename one species. The new name must be unused.
    pub fn rename_species(&mut self, old: &str, new: &str) -> Result<(), CrnError> {
        if old == new {
            return Ok(());
        }
        let id = self
            .species_id(old)
            .ok_or_else(|| CrnError::UnknownSpecies(old.to_owned()))?;
        if self.by_name.contains_key(new) {
            return Err(CrnError::RenameCollision(new.to_owned()));
        }
        validate_name(new)?;
        self.by_name.remove(old);
        self.by_name.insert(new.to_owned(), id);
        self.names[id.index()] = new.to_owned();
        Ok(())
    }

    /// Build a configuration from `(name, count)` pairs.
    pub fn config(&self, pairs: &[(&str, u64)]) -> Result<Configuration, CrnError> {
        let mut cfg = Configuration::empty();
        for &(name, count) in pairs {
            let id = self
                .species_id(name)
                .ok_or_else(|| CrnError::UnknownSpecies(name.to_owned()))?;
            cfg.add(id, &BigUint::from(count));
        }
        Ok(cfg)
    }

    /// Reaction-set equality, ignoring declaration order and id assignment.
    pub fn same_reactions(&self, other: &Crn) -> bool {
        let key = |crn: &Crn| {
            let mut v: Vec<(Vec<(String, u32)>, Vec<(String, u32)>)> = crn
                .reactions
                .iter()
                .map(|r| {
                    let mut rs: Vec<(String, u32)> =
                        r.reactants.iter().map(|&(id, c)| (crn.species_name(id).to_owned(), c)).collect();
                    let mut ps: Vec<(String, u32)> =
                        r.products.iter().map(|&(id, c)| (crn.species_name(id).to_owned(), c)).collect();
                    rs.sort();
                    ps.sort();
                    (rs, ps)
                })
                .collect();
            v.sort();
            v
        };
        key(self) == key(other)
    }

    fn format_side(&self, side: &Side) -> String {
        if side.is_empty() {
            return "0".to_owned();
        }
        side.iter()
            .map(|&(id, c)| {
                if c == 1 {
                    self.species_name(id).to_owned()
                } else {
                    format!("{} {}", c, self.species_name(id))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn format_reaction(&self, rxn: &Reaction) -> String {
        format!("{} -> {}", self.format_side(&rxn.reactants), self.format_side(&rxn.products))
    }

    pub fn format_configuration(&self, cfg: &Configuration) -> String {
        if cfg.is_empty() {
            return "0".to_owned();
        }
        cfg.iter()
            .map(|(id, n)| format!("{} {}", n, self.species_name(id)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Parse a configuration like `"3 R1, 1 S0"`. Unknown species are errors.
    pub fn parse_configuration(&self, text: &str) -> Result<Configuration, ParseError> {
        let mut cfg = Configuration::empty();
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "0" {
            return Ok(cfg);
        }
        for part in trimmed.split(',') {
            let fields: Vec<&str> = part.split_whitespace().collect();
            let (count, name) = match fields.as_slice() {
                [name] => (BigUint::from(1u32), *name),
                [count, name] => {
                    let c = count.parse::<BigUint>().map_err(|_| ParseError {
                        line: 1,
                        reason: format!("bad count `{count}` in configuration"),
                    })?;
                    (c, *name)
                }
                _ => {
                    return Err(ParseError {
                        line: 1,
                        reason: format!("bad configuration entry `{}`", part.trim()),
                    })
                }
            };
            let id = self.species_id(name).ok_or_else(|| ParseError {
                line: 1,
                reason: format!("unknown species `{name}` in configuration"),
            })?;
            cfg.add(id, &count);
        }
        Ok(cfg)
    }
}

/// Sparse species counts. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    counts: BTreeMap<SpeciesId, BigUint>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, id: SpeciesId) -> BigUint {
        self.counts.get(&id).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn get_u64(&self, id: SpeciesId) -> Option<u64> {
        match self.counts.get(&id) {
            None => Some(0),
            Some(n) => u64::try_from(n).ok(),
        }
    }

    pub fn set(&mut self, id: SpeciesId, count: BigUint) {
        if count.is_zero() {
            self.counts.remove(&id);
        } else {
            self.counts.insert(id, count);
        }
    }

    pub fn add(&mut self, id: SpeciesId, count: &BigUint) {
        if count.is_zero() {
            return;
        }
        let entry = self.counts.entry(id).or_insert_with(BigUint::zero);
        *entry += count;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total molecule count over all species.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpeciesId, &BigUint)> {
        self.counts.iter().map(|(&id, n)| (id, n))
    }

    /// Componentwise `self >= other`.
    pub fn covers(&self, other: &Configuration) -> bool {
        other.iter().all(|(id, n)| &self.get(id) >= n)
    }
}

/// True iff the reactant multiset of `r` is covered by `c`.
pub fn applicable(c: &Configuration, r: &Reaction) -> bool {
    r.reactants().iter().all(|&(id, coef)| c.get(id) >= BigUint::from(coef))
}

/// Apply `r` to `c`, returning the successor configuration.
pub fn apply(c: &Configuration, r: &Reaction) -> Result<Configuration, CrnError> {
    if !applicable(c, r) {
        return Err(CrnError::NotApplicable);
    }
    let mut out = c.clone();
    for &(id, coef) in r.reactants() {
        let n = out.get(id) - BigUint::from(coef);
        out.set(id, n);
    }
    for &(id, coef) in r.products() {
        out.add(id, &BigUint::from(coef));
    }
    Ok(out)
}

/// All reactions of `crn` applicable in `c`, in declaration order.
pub fn enabled<'a>(crn: &'a Crn, c: &Configuration) -> Vec<&'a Reaction> {
    crn.reactions().iter().filter(|r| applicable(c, r)).collect()
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Serialize reactions one per line: `[coef ]NAME( + [coef ]NAME)* -> products|0`.
pub fn serialize_text(crn: &Crn) -> String {
    let mut out = String::new();
    for rxn in crn.reactions() {
        out.push_str(&crn.format_reaction(rxn));
        out.push('\n');
    }
    out
}

fn parse_side(crn: &mut Crn, text: &str, line: usize, allow_empty: bool) -> Result<Vec<(SpeciesId, u32)>, ParseError> {
    let text = text.trim();
    if text == "0" {
        if allow_empty {
            return Ok(Vec::new());
        }
        return Err(ParseError {
            line,
            reason: "empty reactant side is not allowed".into(),
        });
    }
    if text.is_empty() {
        return Err(ParseError {
            line,
            reason: "missing species list".into(),
        });
    }
    let mut side = Vec::new();
    for term in text.split('+') {
        let fields: Vec<&str> = term.split_whitespace().collect();
        let (coef, name) = match fields.as_slice() {
            [name] => (1u32, *name),
            [coef, name] => {
                let c: u32 = coef.parse().map_err(|_| ParseError {
                    line,
                    reason: format!("bad coefficient `{coef}`"),
                })?;
                (c, *name)
            }
            _ => {
                return Err(ParseError {
                    line,
                    reason: format!("bad term `{}`", term.trim()),
                })
            }
        };
        if coef == 0 {
            return Err(ParseError {
                line,
                reason: format!("zero coefficient for `{name}`"),
            });
        }
        let id = crn.species(name).map_err(|e| ParseError {
            line,
            reason: e.to_string(),
        })?;
        side.push((id, coef));
    }
    Ok(side)
}

/// Parse the one-reaction-per-line text format. `#` starts a comment; blank
/// lines are ignored; `<->` adds both directions.
pub fn parse_text(text: &str) -> Result<Crn, ParseError> {
    let mut crn = Crn::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs, reversible) = if let Some(pos) = line.find("<->") {
            (&line[..pos], &line[pos + 3..], true)
        } else if let Some(pos) = line.find("->") {
            (&line[..pos], &line[pos + 2..], false)
        } else {
            return Err(ParseError {
                line: line_no,
                reason: "missing `->`".into(),
            });
        };
        let reactants = parse_side(&mut crn, lhs, line_no, false)?;
        let products = parse_side(&mut crn, rhs, line_no, true)?;
        let res = if reversible {
            crn.add_reversible(&reactants, &products).map(|_| true)
        } else {
            crn.add(&reactants, &products)
        };
        res.map_err(|e| ParseError {
            line: line_no,
            reason: e.to_string(),
        })?;
    }
    Ok(crn)
}

// ---------------------------------------------------------------------------
// Structured format
// ---------------------------------------------------------------------------

/// Designated species roles carried alongside a serialized network.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Designated {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halt: Option<String>,
}

impl Designated {
    pub fn is_empty(&self) -> bool {
        self.leader.is_none() && self.output.is_none() && self.halt.is_none()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReactionDoc {
    pub reactants: BTreeMap<String, u32>,
    pub products: BTreeMap<String, u32>,
}

/// Structured single-document form of a network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrnDocument {
    pub species: Vec<String>,
    pub reactions: Vec<ReactionDoc>,
    #[serde(default, skip_serializing_if = "Designated::is_empty")]
    pub designated: Designated,
}

impl CrnDocument {
    pub fn from_crn(crn: &Crn, designated: Designated) -> Self {
        let reactions = crn
            .reactions()
            .iter()
            .map(|r| ReactionDoc {
                reactants: r
                    .reactants()
                    .iter()
                    .map(|&(id, c)| (crn.species_name(id).to_owned(), c))
                    .collect(),
                products: r
                    .products()
                    .iter()
                    .map(|&(id, c)| (crn.species_name(id).to_owned(), c))
                    .collect(),
            })
            .collect();
        CrnDocument {
            species: crn.species_names().to_vec(),
            reactions,
            designated,
        }
    }

    pub fn into_crn(&self) -> Result<(Crn, Designated), CrnError> {
        let mut crn = Crn::new();
        for name in &self.species {
            crn.species(name)?;
        }
        for rxn in &self.reactions {
            let r: Vec<(SpeciesId, u32)> = rxn
                .reactants
                .iter()
                .map(|(n, &c)| {
                    crn.species_id(n)
                        .map(|id| (id, c))
                        .ok_or_else(|| CrnError::UnknownSpecies(n.clone()))
                })
                .collect::<Result<_, _>>()?;
            let p: Vec<(SpeciesId, u32)> = rxn
                .products
                .iter()
                .map(|(n, &c)| {
                    crn.species_id(n)
                        .map(|id| (id, c))
                        .ok_or_else(|| CrnError::UnknownSpecies(n.clone()))
                })
                .collect::<Result<_, _>>()?;
            crn.add(&r, &p)?;
        }
        Ok((crn, self.designated.clone()))
    }
}

impl fmt::Display for Crn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serialize_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_a_to_bc() -> (Crn, Reaction) {
        let mut crn = Crn::new();
        crn.add_by_name(&[("A", 2)], &[("B", 1), ("C", 1)]).unwrap();
        let rxn = crn.reactions()[0].clone();
        (crn, rxn)
    }

    #[test]
    fn applicable_needs_full_reactant_multiset() {
        let (crn, rxn) = two_a_to_bc();
        let c2 = crn.config(&[("A", 2)]).unwrap();
        let c1 = crn.config(&[("A", 1)]).unwrap();
        assert!(applicable(&c2, &rxn));
        assert!(!applicable(&c1, &rxn));
    }

    #[test]
    fn null_reaction_rejected_at_construction() {
        let mut crn = Crn::new();
        let err = crn.add_by_name(&[("A", 1), ("B", 1)], &[("A", 1), ("B", 1)]);
        assert!(matches!(err, Err(CrnError::NullReaction)));
    }

    #[test]
    fn apply_is_multiset_arithmetic() {
        let (crn, rxn) = two_a_to_bc();
        let c = crn.config(&[("A", 2)]).unwrap();
        let out = apply(&c, &rxn).unwrap();
        assert_eq!(out, crn.config(&[("B", 1), ("C", 1)]).unwrap());
        // input untouched
        assert_eq!(c, crn.config(&[("A", 2)]).unwrap());

        let mut crn = Crn::new();
        crn.add_by_name(&[("L", 1)], &[("Y", 2)]).unwrap();
        let c = crn.config(&[("L", 1)]).unwrap();
        let out = apply(&c, &crn.reactions()[0]).unwrap();
        assert_eq!(out, crn.config(&[("Y", 2)]).unwrap());

        // hand-checked: {3X,1S} with X+S->S gives {2X,1S}
        let mut crn = Crn::new();
        crn.add_by_name(&[("X", 1), ("S", 1)], &[("S", 1)]).unwrap();
        let c = crn.config(&[("X", 3), ("S", 1)]).unwrap();
        let out = apply(&c, &crn.reactions()[0]).unwrap();
        assert_eq!(out, crn.config(&[("X", 2), ("S", 1)]).unwrap());
    }

    #[test]
    fn apply_rejects_inapplicable() {
        let (crn, rxn) = two_a_to_bc();
        let c = crn.config(&[("A", 1)]).unwrap();
        assert!(matches!(apply(&c, &rxn), Err(CrnError::NotApplicable)));
    }

    #[test]
    fn enabled_in_declaration_order() {
        let mut crn = Crn::new();
        crn.add_by_name(&[("A", 1)], &[("B", 1)]).unwrap();
        crn.add_by_name(&[("A", 1)], &[("C", 1)]).unwrap();
        let c = crn.config(&[("A", 1)]).unwrap();
        let en = enabled(&crn, &c);
        assert_eq!(en.len(), 2);
        assert_eq!(crn.format_reaction(en[0]), "A -> B");
        assert_eq!(crn.format_reaction(en[1]), "A -> C");

        let y = crn.config(&[("B", 1)]).unwrap();
        assert!(enabled(&crn, &y).is_empty());
    }

    #[test]
    fn reversible_adds_both_directions_once() {
        let mut crn = Crn::new();
        crn.add_reversible_by_name(&[("A", 1)], &[("B", 2)]).unwrap();
        crn.add_reversible_by_name(&[("A", 1)], &[("B", 2)]).unwrap();
        assert_eq!(crn.size(), 2);
        assert_eq!(crn.format_reaction(&crn.reactions()[0]), "A -> 2 B");
        assert_eq!(crn.format_reaction(&crn.reactions()[1]), "2 B -> A");

        let mut crn = Crn::new();
        crn.add_reversible_by_name(&[("X", 2), ("S", 1)], &[("H", 1)]).unwrap();
        assert_eq!(crn.size(), 2);
    }

    #[test]
    fn reverse_of_emptying_reaction_is_invalid() {
        let mut crn = Crn::new();
        let err = crn.add_reversible_by_name(&[("A", 1), ("Y", 1)], &[]);
        assert!(matches!(err, Err(CrnError::InvalidReverse(_))));
    }

    #[test]
    fn merge_identity_idempotence_shared_dedupe() {
        let mut a = Crn::new();
        a.add_by_name(&[("S", 1)], &[("H", 1), ("X", 2)]).unwrap();
        let empty = Crn::new();
        assert!(a.merge(&empty).same_reactions(&a));
        assert!(a.merge(&a).same_reactions(&a));

        let mut b = Crn::new();
        b.add_by_name(&[("S", 1)], &[("H", 1), ("X", 2)]).unwrap();
        b.add_by_name(&[("H", 1)], &[("Q", 1)]).unwrap();
        let m = a.merge(&b);
        assert_eq!(m.size(), 2);
    }

    #[test]
    fn molecule_count_changes_by_side_difference() {
        let (crn, rxn) = two_a_to_bc();
        let c = crn.config(&[("A", 3)]).unwrap();
        let out = apply(&c, &rxn).unwrap();
        let before = c.total();
        let after = out.total();
        let gain = rxn.product_total() as i64 - rxn.reactant_total() as i64;
        assert_eq!(BigUint::from(3u32) + after.clone(), before + BigUint::from((3 + gain) as u32));
    }

    #[test]
    fn text_roundtrip() {
        let text = "A + B -> C\n2 X3 + S3 <-> H3\nL -> 0\n# comment\n\n";
        let crn = parse_text(text).unwrap();
        assert_eq!(crn.size(), 4); // <-> expands to two
        let ser = serialize_text(&crn);
        let crn2 = parse_text(&ser).unwrap();
        assert!(crn.same_reactions(&crn2));
        assert_eq!(crn.species_names(), crn2.species_names());
        assert_eq!(ser, serialize_text(&crn2));
    }

    #[test]
    fn parse_rejects_arity_violation_with_line() {
        let err = parse_text("A -> B\n4 A -> B\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_text("0 -> B\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn structured_roundtrip() {
        let crn = parse_text("A + B -> C\nC -> 2 A\n").unwrap();
        let doc = CrnDocument::from_crn(
            &crn,
            Designated {
                leader: Some("A".into()),
                output: Some("C".into()),
                halt: None,
            },
        );
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let doc2: CrnDocument = serde_json::from_str(&json).unwrap();
        let (crn2, des) = doc2.into_crn().unwrap();
        assert!(crn.same_reactions(&crn2));
        assert_eq!(des.leader.as_deref(), Some("A"));
        assert_eq!(crn.species_names(), crn2.species_names());
    }

    #[test]
    fn configuration_parse_and_format() {
        let crn = parse_text("R1 + S0 -> S0\n").unwrap();
        let cfg = crn.parse_configuration("3 R1, 1 S0").unwrap();
        assert_eq!(crn.format_configuration(&cfg), "3 R1, 1 S0");
        assert!(crn.parse_configuration("3 NOPE").is_err());
        assert!(crn.parse_configuration("0").unwrap().is_empty());
    }

    #[test]
    fn configuration_normalizes_zeros() {
        let mut crn = Crn::new();
        let a = crn.species("A").unwrap();
        let mut cfg = Configuration::empty();
        cfg.set(a, BigUint::from(2u32));
        cfg.set(a, BigUint::zero());
        assert!(cfg.is_empty());
    }
}
