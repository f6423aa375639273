//! The headline compilers: a binary cascade producing a count with one
//! reaction per bit, a permutation pipeline packing roughly log k bits into
//! each reaction, and whole-program compilation by concatenating a
//! permutation stage with a machine-simulation stage.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{size_report, SizeReport};
use crate::crn::{Crn, CrnError};
use crate::machines::decoder::{build_rank_decoder, decoder_maxima};
use crate::machines::lehmer::{encode_counts_to_m, factorial, lehmer_unrank, min_k_for, LehmerError};
use crate::machines::tm::{run_tm, tm_to_rm, TmError, TuringMachine};
use crate::machines::{concat_programs, run_rm, MachineError, RmBuilder, RmProgram};
use crate::rm_compiler::{
    compile_rm, dexp_for, ladder_for, lower_copies_with_map, BoundMode, CompileError, CompiledCrn,
    RmCompileOptions,
};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("the binary cascade needs x >= 1")]
    BinaryZero,
    #[error("k = {k} is too small for x = {x}: needs k! > x")]
    KTooSmall { k: u32, x: u128 },
    #[error("oracle run disagrees with the requested value (got {got}, want {want})")]
    OracleMismatch { got: u64, want: u64 },
    #[error("machine did not halt within the certification caps")]
    OracleDidNotHalt,
    #[error(transparent)]
    Lehmer(#[from] LehmerError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Tm(#[from] TmError),
}

/// Which bound realization the pipeline registers use. The parameter is a
/// floor; every register still gets at least what its certified maximum
/// needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterMode {
    Ladder { min_rungs: u32 },
    Dexp { min_layer: u32 },
}

impl CounterMode {
    fn mode_for(&self, max: &BigUint) -> BoundMode {
        match *self {
            CounterMode::Ladder { min_rungs } => match ladder_for(max) {
                BoundMode::Ladder { rungs } => BoundMode::Ladder {
                    rungs: rungs.max(min_rungs.max(1)),
                },
                other => other,
            },
            CounterMode::Dexp { min_layer } => match dexp_for(max) {
                BoundMode::Dexp { layer } => BoundMode::Dexp {
                    layer: layer.max(min_layer),
                },
                other => other,
            },
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CounterMode::Ladder { .. } => "ladder",
            CounterMode::Dexp { .. } => "dexp",
        }
    }
}

/// Back end for the rank-decoding stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step3Backend {
    #[default]
    DirectDecoder,
    TmPipeline,
}

#[derive(Debug, Clone, Copy)]
pub struct EncodeOptions {
    pub k_override: Option<u32>,
    pub counter_mode: CounterMode,
    pub step3: Step3Backend,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            k_override: None,
            counter_mode: CounterMode::Ladder { min_rungs: 1 },
            step3: Step3Backend::DirectDecoder,
        }
    }
}

/// One reaction per bit: X_i -> 2 X_{i+1} (+ Y when bit i is set) and a
/// final X_{n-1} -> Y carrying the leading bit. Stable but not halting, and
/// the manifest says so.
pub fn compile_binary(x: u64) -> Result<CompiledCrn, EncodeError> {
    if x == 0 {
        return Err(EncodeError::BinaryZero);
    }
    let n = 64 - x.leading_zeros();
    let mut crn = Crn::new();
    for i in 0..n - 1 {
        let cur = format!("X{i}");
        let next = format!("X{}", i + 1);
        if (x >> i) & 1 == 1 {
            crn.add_by_name(&[(&cur, 1)], &[(&next, 2), ("Y", 1)])?;
        } else {
            crn.add_by_name(&[(&cur, 1)], &[(&next, 2)])?;
        }
    }
    crn.add_by_name(&[(&format!("X{}", n - 1), 1)], &[("Y", 1)])?;
    let manifest = crate::rm_compiler::CompileManifest {
        registers: BTreeMap::new(),
        states: BTreeMap::new(),
        leader: "X0".to_owned(),
        output: "Y".to_owned(),
        halt: None,
        leader_set: Vec::new(),
        halting: false,
        stages: BTreeMap::new(),
        fill_order: Vec::new(),
        fill_chain: Vec::new(),
        notes: vec!["stable-only construction: no halting species".to_owned()],
    };
    Ok(CompiledCrn { crn, manifest })
}

/// Everything the permutation pipeline produced, including the staged
/// register program it was compiled from.
#[derive(Debug)]
pub struct PermutationArtifacts {
    pub compiled: CompiledCrn,
    pub k: u32,
    pub perm: Vec<u32>,
    /// Count-encoding of the permutation: the value the encode stage leaves
    /// in register I.
    pub m: BigUint,
    /// The staged program (copies already lowered).
    pub program: RmProgram,
}

fn emit_double(b: &mut RmBuilder, value: crate::machines::RegId, temp: crate::machines::RegId) {
    b.copy_fall(value, temp);
    b.drain(temp, &[value]);
}

/// Build the staged program: set the permutation counts, drain them into the
/// numeral register, and decode the numeral to the rank.
fn permutation_program(k: u32, perm: &[u32]) -> Result<(RmProgram, usize), EncodeError> {
    let mut b = RmBuilder::new();
    let regs: Vec<_> = (1..=k).map(|i| b.reg(&format!("r{i}"))).collect();
    let numeral = b.reg("I");
    let temp = b.reg("T");

    // counts: the register holding k doubles as the ascending counter
    let counter = regs[perm.iter().position(|&v| v == k).unwrap()];
    for v in 1..=k {
        b.inc_fall(counter);
        if v < k {
            let target = regs[perm.iter().position(|&vv| vv == v).unwrap()];
            b.copy_fall(counter, target);
        }
    }

    // count encoding: drain each register most-significant first; every
    // decrement doubles the numeral and adds one, every register boundary
    // doubles it once more
    let encode_start = b.instruction_count();
    for (i, &reg) in regs.iter().enumerate() {
        let top = b.here();
        let body = b.label();
        let boundary = b.label();
        b.dec(reg, body, boundary);
        b.bind(body);
        emit_double(&mut b, numeral, temp);
        b.inc(numeral, top);
        b.bind(boundary);
        if i + 1 < regs.len() {
            emit_double(&mut b, numeral, temp);
        }
    }
    b.halt();
    let step12 = b.build(numeral)?;
    Ok((step12, encode_start))
}

/// Compile the three-stage pipeline that haltingly computes `x` from
/// {1 leader}: generate the permutation of rank x, pack it into the numeral
/// register, and decode the numeral back to the rank, which lands in the
/// output species.
pub fn compile_permutation(x: u128, opts: &EncodeOptions) -> Result<PermutationArtifacts, EncodeError> {
    let k = opts.k_override.unwrap_or_else(|| min_k_for(x));
    if factorial(k)? <= x {
        return Err(EncodeError::KTooSmall { k, x });
    }
    let perm = lehmer_unrank(x, k)?;
    let counts: Vec<u64> = perm.iter().map(|&v| v as u64).collect();
    let m = encode_counts_to_m(&counts)?;

    let (step12, encode_start) = permutation_program(k, &perm)?;
    let stage3_start = step12.instructions().len();
    let full = match opts.step3 {
        Step3Backend::DirectDecoder => {
            let decoder = build_rank_decoder(k);
            concat_programs(&step12, &decoder.prog)?
        }
        Step3Backend::TmPipeline => {
            let stage = crate::encoders::tm_stage3(k)?;
            concat_programs(&step12, &stage)?
        }
    };
    let (lowered, index_map) = lower_copies_with_map(&full)?;

    // per-register maxima, by analysis of the stages
    let kk = BigUint::from(k);
    let mut maxima: BTreeMap<String, BigUint> = BTreeMap::new();
    for i in 1..=k {
        maxima.insert(format!("r{i}"), kk.clone());
    }
    maxima.insert("I".to_owned(), m.clone());
    maxima.insert("T".to_owned(), m.clone() >> 1);
    match opts.step3 {
        Step3Backend::DirectDecoder => {
            for (name, max) in decoder_maxima(k, &m) {
                let entry = maxima.entry(name).or_default();
                if *entry < max {
                    *entry = max;
                }
            }
        }
        Step3Backend::TmPipeline => {
            for (name, max) in tm_stage3_maxima(k, &m) {
                let entry = maxima.entry(name).or_default();
                if *entry < max {
                    *entry = max;
                }
            }
        }
    }
    maxima.insert("nil".to_owned(), BigUint::ZERO);

    // certification: for desk-scale numerals, co-run the reference
    // interpreter and check the output and the claimed maxima
    if m.bits() <= 20 && matches!(opts.step3, Step3Backend::DirectDecoder) {
        let m64 = m.to_u64().unwrap();
        let cap = 200 * m64.max(1) + 1_000_000;
        let run = run_rm(&lowered, &vec![0; lowered.registers().len()], None, cap)
            .map_err(|_| EncodeError::OracleDidNotHalt)?;
        let got = run.output_value(&lowered);
        let want = x as u64;
        if got != want {
            return Err(EncodeError::OracleMismatch { got, want });
        }
        for (i, reg) in lowered.registers().iter().enumerate() {
            if let Some(claim) = maxima.get(reg) {
                if BigUint::from(run.max_seen[i]) > *claim {
                    return Err(EncodeError::OracleMismatch {
                        got: run.max_seen[i],
                        want: claim.to_u64().unwrap_or(u64::MAX),
                    });
                }
            }
        }
    }

    let bounds: BTreeMap<String, BoundMode> = maxima
        .iter()
        .map(|(name, max)| (name.clone(), opts.counter_mode.mode_for(max)))
        .collect();

    let mut compiled = compile_rm(&lowered, &bounds, &RmCompileOptions::default())?;
    let rename_from = compiled.manifest.output.clone();
    compiled.crn.rename_species(&rename_from, "Y")?;
    compiled.manifest.output = "Y".to_owned();
    if let Some(entry) = compiled
        .manifest
        .registers
        .values_mut()
        .find(|e| e.active == rename_from)
    {
        entry.active = "Y".to_owned();
    }
    let state_name = |idx: usize| compiled.manifest.states[&idx].clone();
    compiled
        .manifest
        .stages
        .insert("encode".to_owned(), state_name(index_map[encode_start]));
    compiled
        .manifest
        .stages
        .insert("decode".to_owned(), state_name(index_map[stage3_start]));
    compiled.manifest.notes.push(format!(
        "k = {k}, numeral bits = {}, counter mode = {}",
        m.bits(),
        opts.counter_mode.name()
    ));

    Ok(PermutationArtifacts {
        compiled,
        k,
        perm,
        m,
        program: lowered,
    })
}

// ---------------------------------------------------------------------------
// Whole-program compilation
// ---------------------------------------------------------------------------

/// What the machine stage simulates.
pub enum MachineSource {
    /// A register program and the name of its input register.
    Register { prog: RmProgram, input: String },
    /// A Turing machine taking the input as a binary numeral on its tape.
    Turing(TuringMachine),
}

#[derive(Debug)]
pub struct ProgramArtifacts {
    pub compiled: CompiledCrn,
    /// Output value certified by the reference interpreter.
    pub expected: u64,
    /// The generator stage's artifacts.
    pub generator: PermutationArtifacts,
}

/// Compile `source` applied to the fixed input `p`: a permutation stage
/// produces p transfer tokens, which a transfer loop feeds into the machine
/// stage as its input before the simulated program runs.
pub fn compile_program(
    source: &MachineSource,
    p: u64,
    opts: &EncodeOptions,
) -> Result<ProgramArtifacts, EncodeError> {
    // ---- machine stage as one register program ----
    let (stage2, oracle_expected) = match source {
        MachineSource::Register { prog, input } => {
            let input_id = prog
                .register_id(input)
                .ok_or_else(|| MachineError::UnknownRegister(input.clone()))?;
            let mut init = vec![0u64; prog.registers().len()];
            init[input_id.0] = p;
            let oracle = run_rm(prog, &init, None, 50_000_000).map_err(|_| EncodeError::OracleDidNotHalt)?;

            let mut b = RmBuilder::new();
            let transfer = b.reg("P");
            let into = b.reg(input);
            let top = b.here();
            let next = b.label();
            let done = b.label();
            b.dec(transfer, next, done);
            b.bind(next);
            b.inc(into, top);
            b.bind(done);
            b.halt();
            let loader = b.build(transfer)?;
            (concat_programs(&loader, prog)?, oracle.output_value(prog))
        }
        MachineSource::Turing(tm) => {
            let word = if p == 0 {
                String::new()
            } else {
                format!("{p:b}")
            };
            let oracle = run_tm(tm, &word, 10_000, 50_000_000)?;
            let tr = tm_to_rm(tm);
            let gamma = tr.gamma as u32;
            let alphabet_pos = |c: char| {
                tm.to_document()
                    .alphabet
                    .iter()
                    .position(|&a| a == c)
                    .map(|s| tr.dig[s] as u32)
            };
            let sym0 = alphabet_pos('0').unwrap_or(0);
            let sym1 = alphabet_pos('1').unwrap_or(0);

            // convert the transfer count into the packed tape numeral:
            // peel bits least significant first; each pushes one digit
            // deeper into the at-head register
            let mut b = RmBuilder::new();
            let transfer = b.reg("P");
            let half = b.reg("cvh");
            let scratch = b.reg("cvt");
            let right = b.reg("right");
            let probe_top = b.here();
            let probe_hit = b.label();
            let done = b.label();
            b.dec(transfer, probe_hit, done);
            b.bind(probe_hit);
            b.inc_fall(transfer); // undo the probe
            // extract parity of the transfer register
            let even = b.label();
            let odd = b.label();
            let second = b.label();
            let cont = b.label();
            let ptop = b.here();
            b.dec(transfer, second, even);
            b.bind(second);
            b.dec(transfer, cont, odd);
            b.bind(cont);
            b.inc(half, ptop);
            let push = |b: &mut RmBuilder, digit: u32| {
                // right := right * gamma + digit
                b.drain(right, &[scratch]);
                b.drain(scratch, &vec![right; gamma as usize]);
                for _ in 0..digit {
                    b.inc_fall(right);
                }
            };
            let after_push = b.label();
            b.bind(even);
            push(&mut b, sym0);
            b.jump(after_push);
            b.bind(odd);
            push(&mut b, sym1);
            b.bind(after_push);
            b.drain(half, &[transfer]);
            b.jump(probe_top);
            b.bind(done);
            b.halt();
            let loader = b.build(transfer)?;
            (concat_programs(&loader, &tr.prog)?, oracle.output)
        }
    };
    let (stage2, _) = lower_copies_with_map(&stage2)?;

    // certify stage-2 register maxima with the transfer register loaded
    let transfer_id = stage2.register_id("P").expect("transfer register exists");
    let mut init = vec![0u64; stage2.registers().len()];
    init[transfer_id.0] = p;
    let run = run_rm(&stage2, &init, None, 200_000_000).map_err(|_| EncodeError::OracleDidNotHalt)?;
    if run.output_value(&stage2) != oracle_expected {
        return Err(EncodeError::OracleMismatch {
            got: run.output_value(&stage2),
            want: oracle_expected,
        });
    }
    let mut bounds2: BTreeMap<String, BoundMode> = BTreeMap::new();
    for (i, reg) in stage2.registers().iter().enumerate() {
        if reg.starts_with("aux") || reg == "nil" {
            continue;
        }
        let max = BigUint::from(run.max_seen[i].max(1));
        bounds2.insert(reg.clone(), opts.counter_mode.mode_for(&max));
    }
    let mut options2 = RmCompileOptions::prefixed("m.");
    options2.prefill.insert("P".to_owned(), p);
    let mut stage2_compiled = compile_rm(&stage2, &bounds2, &options2)?;

    // ---- generator stage delivering p transfer tokens ----
    let mut generator = compile_permutation(p as u128, opts)?;
    generator.compiled.crn.rename_species("Y", "m.P.A")?;
    let halt = generator
        .compiled
        .manifest
        .halt
        .clone()
        .expect("the permutation pipeline halts");
    generator.compiled.crn.rename_species(&halt, "m.L")?;

    // ---- compose ----
    let mut crn = generator.compiled.crn.clone();
    crn.absorb(&stage2_compiled.crn);
    let out_name = stage2_compiled.manifest.output.clone();
    crn.rename_species(&out_name, "Y")?;
    stage2_compiled.manifest.output = "Y".to_owned();

    let mut manifest = stage2_compiled.manifest.clone();
    manifest.leader = generator.compiled.manifest.leader.clone();
    let mut registers = BTreeMap::new();
    for (name, entry) in &generator.compiled.manifest.registers {
        registers.insert(format!("g:{name}"), entry.clone());
    }
    for (name, entry) in &manifest.registers {
        registers.insert(format!("m:{name}"), entry.clone());
    }
    manifest.registers = registers;
    let mut leaders = generator.compiled.manifest.leader_set.clone();
    leaders.retain(|n| n != &halt);
    leaders.extend(manifest.leader_set.iter().cloned());
    leaders.sort();
    leaders.dedup();
    manifest.leader_set = leaders;
    manifest.states.clear();
    manifest.fill_chain.clear();
    manifest.fill_order.clear();
    manifest
        .stages
        .insert("machine".to_owned(), "m.L".to_owned());
    manifest.notes.push(format!("composed pipeline: input {p}"));

    Ok(ProgramArtifacts {
        compiled: CompiledCrn { crn, manifest },
        expected: oracle_expected,
        generator,
    })
}

// ---------------------------------------------------------------------------
// Size reporting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMethod {
    Binary,
    Permutation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KsReport {
    pub x: String,
    /// These are constructive upper bounds on the minimal reaction count for
    /// haltingly computing x, not descriptional-complexity values.
    pub caveat: String,
    pub rows: Vec<SizeReport>,
}

impl KsReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("x = {}\n{}\n", self.x, self.caveat));
        out.push_str(&format!(
            "{:<14} {:>10} {:>10} {:>9} {:>8}\n",
            "method", "reactions", "species", "max-arity", "ratio"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<14} {:>10} {:>10} {:>9} {:>8}\n",
                r.method,
                r.reactions,
                r.species,
                r.max_arity,
                r.ratio.map_or("-".to_owned(), |v| format!("{v:.2}")),
            ));
        }
        out
    }
}

/// Table of (method, reaction count, species count) upper bounds for each
/// requested compile method on `x`.
pub fn ks_upper_bound(x: u128, methods: &[ReportMethod], opts: &EncodeOptions) -> Result<KsReport, EncodeError> {
    let n_bits = (128 - x.leading_zeros()).max(1);
    let mut rows = Vec::new();
    for method in methods {
        match method {
            ReportMethod::Binary => {
                if let Ok(x64) = u64::try_from(x) {
                    if x64 >= 1 {
                        let compiled = compile_binary(x64)?;
                        rows.push(size_report(&compiled.crn, "binary", Some(n_bits), None));
                    }
                }
            }
            ReportMethod::Permutation => {
                let artifacts = compile_permutation(x, opts)?;
                rows.push(size_report(
                    &artifacts.compiled.crn,
                    "permutation",
                    Some(n_bits),
                    Some(opts.counter_mode.name().to_owned()),
                ));
            }
        }
    }
    Ok(KsReport {
        x: x.to_string(),
        caveat: "upper bounds on the minimal reaction count; smaller networks may exist".to_owned(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Turing-machine back end for the decode stage
// ---------------------------------------------------------------------------

/// Decode stage realized through a generated Turing machine plus the
/// machine-to-register translation. See `tm_stage3` in `decoder_tm`.
pub use crate::machines::decoder_tm::{tm_stage3, tm_stage3_maxima};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{
        haltingly_computes, simulate, stably_computes, ExploreCaps, StopReason, StopWhen,
        VerdictStatus,
    };
    use num_traits::One;

    fn caps() -> ExploreCaps {
        ExploreCaps::desk()
    }

    #[test]
    fn binary_five_has_three_reactions_and_stably_computes_five() {
        let compiled = compile_binary(5).unwrap();
        let crn = &compiled.crn;
        assert_eq!(crn.size(), 3);
        let texts: Vec<String> = crn.reactions().iter().map(|r| crn.format_reaction(r)).collect();
        assert_eq!(
            texts,
            vec!["X0 -> 2 X1 + Y", "X1 -> 2 X2", "X2 -> Y"],
        );
        let init = crn.config(&[("X0", 1)]).unwrap();
        let y = crn.species_id("Y").unwrap();
        assert!(stably_computes(crn, &init, y, 5, &caps()).unwrap().is_holds());
        let v = stably_computes(crn, &init, y, 4, &caps()).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);
        assert!(!compiled.manifest.halting);
    }

    #[test]
    fn binary_one_is_a_single_reaction() {
        let compiled = compile_binary(1).unwrap();
        assert_eq!(compiled.crn.size(), 1);
        assert!(compile_binary(0).is_err());
    }

    #[test]
    fn binary_counts_are_exact_up_to_64() {
        for x in 1..=64u64 {
            let compiled = compile_binary(x).unwrap();
            let n = 64 - x.leading_zeros();
            assert_eq!(compiled.crn.size() as u32, n, "x={x}");
            let crn = &compiled.crn;
            let init = crn.config(&[("X0", 1)]).unwrap();
            let y = crn.species_id("Y").unwrap();
            assert!(
                stably_computes(crn, &init, y, x, &caps()).unwrap().is_holds(),
                "x={x}"
            );
        }
    }

    #[test]
    fn permutation_pipeline_small_values_verify_exhaustively() {
        // x = 0 and 1 have tiny numerals, so the whole network fits a closure
        for x in [0u128, 1] {
            let artifacts = compile_permutation(x, &EncodeOptions::default()).unwrap();
            let crn = &artifacts.compiled.crn;
            let init = crn.config(&[("L", 1)]).unwrap();
            let y = crn.species_id("Y").unwrap();
            let h = crn
                .species_id(artifacts.compiled.manifest.halt.as_deref().unwrap())
                .unwrap();
            let caps = ExploreCaps::desk().with_configs(2_000_000);
            let v = haltingly_computes(crn, &init, y, h, x as u64, &caps).unwrap();
            assert_eq!(v.status, VerdictStatus::Holds, "x={x}");
        }
    }

    #[test]
    fn permutation_stage_one_sets_the_expected_counts() {
        // x = 11 unranks to (2,4,3,1) for k = 4
        let artifacts = compile_permutation(11, &EncodeOptions::default()).unwrap();
        assert_eq!(artifacts.perm, vec![2, 4, 3, 1]);
        // the staged program reproduces the counts at the encode boundary:
        // run the unlowered logic via the interpreter up to the halt and
        // compare the numeral instead (the counts have been consumed by then)
        let expected_m = encode_counts_to_m(&[2, 4, 3, 1]).unwrap();
        assert_eq!(artifacts.m, expected_m);
        let run = run_rm(
            &artifacts.program,
            &vec![0; artifacts.program.registers().len()],
            None,
            10_000_000,
        )
        .unwrap();
        assert_eq!(run.output_value(&artifacts.program), 11);
    }

    #[test]
    fn permutation_program_certifies_against_interpreter() {
        for x in [0u128, 1, 4, 5, 23, 24, 40] {
            let artifacts = compile_permutation(x, &EncodeOptions::default()).unwrap();
            let run = run_rm(
                &artifacts.program,
                &vec![0; artifacts.program.registers().len()],
                None,
                1_000_000_000,
            )
            .unwrap();
            assert_eq!(run.output_value(&artifacts.program), x as u64, "x={x}");
        }
    }

    #[test]
    fn paper_worked_value_appears_at_the_stage_boundary() {
        // x = 4 unranks to (3,1,2) whose numeral is 11101011
        let artifacts = compile_permutation(4, &EncodeOptions::default()).unwrap();
        assert_eq!(artifacts.perm, vec![3, 1, 2]);
        assert_eq!(artifacts.m, BigUint::from(235u32));
        let decode_state = artifacts.compiled.manifest.stages["decode"].clone();
        let crn = &artifacts.compiled.crn;
        let init = crn.config(&[("L", 1)]).unwrap();
        let marker = crn.species_id(&decode_state).unwrap();
        let numeral_active = crn.species_id("I.A").unwrap();
        let out = simulate(crn, &init, 424242, 4_000_000_000, StopWhen::SpeciesAtLeast(marker, 1)).unwrap();
        assert_eq!(out.reason, StopReason::Stop);
        assert_eq!(out.final_config.get(numeral_active), BigUint::from(235u32));
    }

    #[test]
    fn oversized_k_is_accepted_and_too_small_k_rejected() {
        let opts = EncodeOptions {
            k_override: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            compile_permutation(5, &opts),
            Err(EncodeError::KTooSmall { .. })
        ));
        let opts = EncodeOptions {
            k_override: Some(4),
            ..Default::default()
        };
        let artifacts = compile_permutation(5, &opts).unwrap();
        assert_eq!(artifacts.k, 4);
    }

    #[test]
    fn dexp_mode_compiles_with_counter_fragments() {
        let opts = EncodeOptions {
            counter_mode: CounterMode::Dexp { min_layer: 0 },
            ..Default::default()
        };
        let artifacts = compile_permutation(4, &opts).unwrap();
        // the numeral register needs 2^(2^3) = 256 >= 235
        let entry = &artifacts.compiled.manifest.registers["I"];
        assert_eq!(entry.mode, BoundMode::Dexp { layer: 3 });
        // shared sub-boxes: the layer-0 base species appear once
        assert!(artifacts.compiled.crn.species_id("S_1^0").is_some());
    }

    #[test]
    fn program_compilation_doubling_rm() {
        let corpus = crate::samples::rm_corpus();
        let doubling = corpus.iter().find(|c| c.name == "double").unwrap();
        let source = MachineSource::Register {
            prog: doubling.program(),
            input: "rin".to_owned(),
        };
        let artifacts = compile_program(&source, 3, &EncodeOptions::default()).unwrap();
        assert_eq!(artifacts.expected, 6);
        let crn = &artifacts.compiled.crn;
        assert!(crn.species_id("Y").is_some());
        assert!(crn.species_id("m.P.A").is_some());
        assert_eq!(artifacts.compiled.manifest.halt.as_deref(), Some("m.H"));
    }

    #[test]
    fn program_compilation_identity_exhaustive_for_zero() {
        let identity = crate::samples::rm_corpus()
            .into_iter()
            .find(|c| c.name == "identity")
            .unwrap();
        let source = MachineSource::Register {
            prog: identity.program(),
            input: "rin".to_owned(),
        };
        let artifacts = compile_program(&source, 0, &EncodeOptions::default()).unwrap();
        assert_eq!(artifacts.expected, 0);
        let crn = &artifacts.compiled.crn;
        let init = crn.config(&[("L", 1)]).unwrap();
        let y = crn.species_id("Y").unwrap();
        let h = crn.species_id("m.H").unwrap();
        let caps = ExploreCaps::desk().with_configs(2_000_000);
        let v = haltingly_computes(crn, &init, y, h, 0, &caps).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
    }

    #[test]
    fn report_rows() {
        let report = ks_upper_bound(
            5,
            &[ReportMethod::Binary, ReportMethod::Permutation],
            &EncodeOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].reactions, 3);
        let text = report.render();
        assert!(text.contains("binary"));
        assert!(text.contains("permutation"));

        // x = 0: the binary row is inapplicable
        let report = ks_upper_bound(0, &[ReportMethod::Binary, ReportMethod::Permutation], &EncodeOptions::default());
        assert!(matches!(report, Err(EncodeError::BinaryZero)) || report.unwrap().rows.len() == 1);
    }

    #[test]
    fn one_is_one() {
        assert_eq!(BigUint::one(), BigUint::from(1u32));
    }
}
