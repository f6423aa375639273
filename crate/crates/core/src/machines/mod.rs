//! Register-machine and Turing-machine models with reference interpreters.
//! These interpreters are the ground-truth oracles the compilers are checked
//! against.

pub mod decoder;
pub mod lehmer;
pub mod tm;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("register `{0}` does not exist")]
    UnknownRegister(String),
    #[error("state {0} out of range (program has {1} instructions)")]
    BadState(usize, usize),
    #[error("copy instruction with identical source and destination `{0}`")]
    CopySelf(String),
    #[error("register {reg} exceeded bound {bound} at step {step}")]
    BoundExceeded { reg: String, bound: u64, step: u64 },
    #[error("step cap {0} reached before halt")]
    StepCap(u64),
    #[error("register value overflowed the interpreter's word size")]
    ValueOverflow,
    #[error("program has no instructions")]
    EmptyProgram,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unbound label in generated program")]
    UnboundLabel,
}

/// Index into a program's register table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegId(pub usize);

/// Instruction index (state) of a register machine.
pub type State = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Inc { reg: RegId, next: State },
    Dec { reg: RegId, next_nonzero: State, next_zero: State },
    Copy { src: RegId, dst: RegId, next: State },
    Halt,
}

/// A register machine program: numbered instructions over named registers,
/// with a designated output register.
#[derive(Debug, Clone)]
pub struct RmProgram {
    registers: Vec<String>,
    instructions: Vec<Instruction>,
    initial_state: State,
    output: RegId,
}

impl RmProgram {
    pub fn new(
        registers: Vec<String>,
        instructions: Vec<Instruction>,
        initial_state: State,
        output: RegId,
    ) -> Result<Self, MachineError> {
        let prog = RmProgram {
            registers,
            instructions,
            initial_state,
            output,
        };
        prog.validate()?;
        Ok(prog)
    }

    fn validate(&self) -> Result<(), MachineError> {
        let n = self.instructions.len();
        if n == 0 {
            return Err(MachineError::EmptyProgram);
        }
        let check_state = |s: State| {
            if s >= n {
                Err(MachineError::BadState(s, n))
            } else {
                Ok(())
            }
        };
        let check_reg = |r: RegId| {
            if r.0 >= self.registers.len() {
                Err(MachineError::UnknownRegister(format!("#{}", r.0)))
            } else {
                Ok(())
            }
        };
        check_state(self.initial_state)?;
        check_reg(self.output)?;
        for instr in &self.instructions {
            match *instr {
                Instruction::Inc { reg, next } => {
                    check_reg(reg)?;
                    check_state(next)?;
                }
                Instruction::Dec { reg, next_nonzero, next_zero } => {
                    check_reg(reg)?;
                    check_state(next_nonzero)?;
                    check_state(next_zero)?;
                }
                Instruction::Copy { src, dst, next } => {
                    check_reg(src)?;
                    check_reg(dst)?;
                    check_state(next)?;
                    if src == dst {
                        return Err(MachineError::CopySelf(self.registers[src.0].clone()));
                    }
                }
                Instruction::Halt => {}
            }
        }
        Ok(())
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn register_id(&self, name: &str) -> Option<RegId> {
        self.registers.iter().position(|r| r == name).map(RegId)
    }

    pub fn register_name(&self, id: RegId) -> &str {
        &self.registers[id.0]
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn initial_state(&self) -> State {
        self.initial_state
    }

    pub fn output(&self) -> RegId {
        self.output
    }

    /// True if the program contains any `Copy` instruction.
    pub fn has_copies(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::Copy { .. }))
    }
}

/// Result of an interpreter run.
#[derive(Debug, Clone)]
pub struct RmRun {
    /// Final register values, indexed like the program's register table.
    pub regs: Vec<u64>,
    /// Index of the `Halt` instruction the machine stopped at.
    pub state: State,
    pub steps: u64,
    /// Per-register maximum value observed anywhere in the run.
    pub max_seen: Vec<u64>,
}

impl RmRun {
    pub fn output_value(&self, prog: &RmProgram) -> u64 {
        self.regs[prog.output().0]
    }
}

/// Faithful small-step interpretation. `bounds`, when given, must have one
/// entry per register; a register about to pass its bound aborts the run,
/// which signals that a network compiled at that bound would be
/// under-provisioned.
pub fn run_rm(
    prog: &RmProgram,
    init_regs: &[u64],
    bounds: Option<&[u64]>,
    max_steps: u64,
) -> Result<RmRun, MachineError> {
    assert_eq!(init_regs.len(), prog.registers.len(), "one initial value per register");
    if let Some(b) = bounds {
        assert_eq!(b.len(), prog.registers.len(), "one bound per register");
        for (i, (&v, &bound)) in init_regs.iter().zip(b).enumerate() {
            if v > bound {
                return Err(MachineError::BoundExceeded {
                    reg: prog.registers[i].clone(),
                    bound,
                    step: 0,
                });
            }
        }
    }
    let mut regs = init_regs.to_vec();
    let mut max_seen = regs.clone();
    let mut state = prog.initial_state;
    let mut steps: u64 = 0;
    loop {
        match prog.instructions[state] {
            Instruction::Halt => {
                return Ok(RmRun {
                    regs,
                    state,
                    steps,
                    max_seen,
                })
            }
            Instruction::Inc { reg, next } => {
                let v = regs[reg.0].checked_add(1).ok_or(MachineError::ValueOverflow)?;
                if let Some(b) = bounds {
                    if v > b[reg.0] {
                        return Err(MachineError::BoundExceeded {
                            reg: prog.registers[reg.0].clone(),
                            bound: b[reg.0],
                            step: steps,
                        });
                    }
                }
                regs[reg.0] = v;
                max_seen[reg.0] = max_seen[reg.0].max(v);
                state = next;
            }
            Instruction::Dec { reg, next_nonzero, next_zero } => {
                if regs[reg.0] > 0 {
                    regs[reg.0] -= 1;
                    state = next_nonzero;
                } else {
                    state = next_zero;
                }
            }
            Instruction::Copy { src, dst, next } => {
                let v = regs[dst.0]
                    .checked_add(regs[src.0])
                    .ok_or(MachineError::ValueOverflow)?;
                if let Some(b) = bounds {
                    if v > b[dst.0] {
                        return Err(MachineError::BoundExceeded {
                            reg: prog.registers[dst.0].clone(),
                            bound: b[dst.0],
                            step: steps,
                        });
                    }
                }
                regs[dst.0] = v;
                max_seen[dst.0] = max_seen[dst.0].max(v);
                state = next;
            }
        }
        steps += 1;
        if steps >= max_steps {
            return Err(MachineError::StepCap(max_steps));
        }
    }
}

// ---------------------------------------------------------------------------
// Text format: numbered instruction lines
// ---------------------------------------------------------------------------

impl fmt::Display for RmProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "output: {}", self.registers[self.output.0])?;
        if self.initial_state != 0 {
            writeln!(f, "start: {}", self.initial_state)?;
        }
        for (i, instr) in self.instructions.iter().enumerate() {
            match *instr {
                Instruction::Inc { reg, next } => {
                    writeln!(f, "{}: inc {} -> {}", i, self.registers[reg.0], next)?
                }
                Instruction::Dec { reg, next_nonzero, next_zero } => writeln!(
                    f,
                    "{}: dec {} -> {} / {}",
                    i, self.registers[reg.0], next_nonzero, next_zero
                )?,
                Instruction::Copy { src, dst, next } => writeln!(
                    f,
                    "{}: copy {} {} -> {}",
                    i, self.registers[src.0], self.registers[dst.0], next
                )?,
                Instruction::Halt => writeln!(f, "{}: halt", i)?,
            }
        }
        Ok(())
    }
}

/// Parse the numbered-instruction text format produced by `Display`.
/// Directives `output: NAME` and `start: N` may appear before instructions.
pub fn parse_rm(text: &str) -> Result<RmProgram, MachineError> {
    let mut entries: Vec<(usize, usize, String)> = Vec::new(); // (index, line, body)
    let mut output_name: Option<String> = None;
    let mut initial_state: State = 0;
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
        if let Some(rest) = line.strip_prefix("output:") {
            output_name = Some(rest.trim().to_owned());
            continue;
        }
        if let Some(rest) = line.strip_prefix("start:") {
            initial_state = rest.trim().parse().map_err(|_| MachineError::Parse {
                line: line_no,
                reason: format!("bad start state `{}`", rest.trim()),
            })?;
            continue;
        }
        let (num, body) = line.split_once(':').ok_or_else(|| MachineError::Parse {
            line: line_no,
            reason: "expected `INDEX: instruction`".into(),
        })?;
        let num: usize = num.trim().parse().map_err(|_| MachineError::Parse {
            line: line_no,
            reason: format!("bad instruction index `{}`", num.trim()),
        })?;
        entries.push((num, line_no, body.trim().to_owned()));
    }
    entries.sort_by_key(|&(num, _, _)| num);
    for (pos, &(num, line, _)) in entries.iter().enumerate() {
        if num != pos {
            return Err(MachineError::Parse {
                line,
                reason: format!("instruction indices must be contiguous from 0; expected {pos}, got {num}"),
            });
        }
    }

    let mut registers: Vec<String> = Vec::new();
    let mut reg_ids: HashMap<String, RegId> = HashMap::new();
    let intern = |name: &str, registers: &mut Vec<String>, reg_ids: &mut HashMap<String, RegId>| -> RegId {
        if let Some(&id) = reg_ids.get(name) {
            return id;
        }
        let id = RegId(registers.len());
        registers.push(name.to_owned());
        reg_ids.insert(name.to_owned(), id);
        id
    };

    let mut instructions = Vec::new();
    for (_, line_no, body) in &entries {
        let fields: Vec<&str> = body.split_whitespace().collect();
        let bad = |reason: String| MachineError::Parse {
            line: *line_no,
            reason,
        };
        let instr = match fields.as_slice() {
            ["halt"] => Instruction::Halt,
            ["inc", reg, "->", next] => Instruction::Inc {
                reg: intern(reg, &mut registers, &mut reg_ids),
                next: next.parse().map_err(|_| bad(format!("bad state `{next}`")))?,
            },
            ["dec", reg, "->", nz, "/", z] => Instruction::Dec {
                reg: intern(reg, &mut registers, &mut reg_ids),
                next_nonzero: nz.parse().map_err(|_| bad(format!("bad state `{nz}`")))?,
                next_zero: z.parse().map_err(|_| bad(format!("bad state `{z}`")))?,
            },
            ["copy", src, dst, "->", next] => Instruction::Copy {
                src: intern(src, &mut registers, &mut reg_ids),
                dst: intern(dst, &mut registers, &mut reg_ids),
                next: next.parse().map_err(|_| bad(format!("bad state `{next}`")))?,
            },
            _ => return Err(bad(format!("unrecognized instruction `{body}`"))),
        };
        instructions.push(instr);
    }

    let output = match output_name {
        Some(name) => intern(&name, &mut registers, &mut reg_ids),
        None => {
            if registers.is_empty() {
                registers.push("r0".to_owned());
            }
            RegId(0)
        }
    };
    RmProgram::new(registers, instructions, initial_state, output)
}

/// Concatenate two programs: registers are merged by name, `a`'s halt
/// instructions become jumps into `b`'s initial state (via a dec on the
/// reserved always-zero register `nil`), and the output register is `b`'s.
pub fn concat_programs(a: &RmProgram, b: &RmProgram) -> Result<RmProgram, MachineError> {
    let mut registers: Vec<String> = a.registers().to_vec();
    let mut reg_ids: HashMap<String, RegId> = registers
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), RegId(i)))
        .collect();
    let mut map_b = Vec::with_capacity(b.registers().len());
    for name in b.registers() {
        let id = *reg_ids.entry(name.clone()).or_insert_with(|| {
            registers.push(name.clone());
            RegId(registers.len() - 1)
        });
        map_b.push(id);
    }
    let nil = *reg_ids.entry("nil".to_owned()).or_insert_with(|| {
        registers.push("nil".to_owned());
        RegId(registers.len() - 1)
    });

    let shift = a.instructions().len();
    let b_start = shift + b.initial_state();
    let mut instructions: Vec<Instruction> = a
        .instructions()
        .iter()
        .map(|instr| match instr {
            Instruction::Halt => Instruction::Dec {
                reg: nil,
                next_nonzero: b_start,
                next_zero: b_start,
            },
            other => other.clone(),
        })
        .collect();
    for instr in b.instructions() {
        instructions.push(match *instr {
            Instruction::Halt => Instruction::Halt,
            Instruction::Inc { reg, next } => Instruction::Inc {
                reg: map_b[reg.0],
                next: next + shift,
            },
            Instruction::Dec { reg, next_nonzero, next_zero } => Instruction::Dec {
                reg: map_b[reg.0],
                next_nonzero: next_nonzero + shift,
                next_zero: next_zero + shift,
            },
            Instruction::Copy { src, dst, next } => Instruction::Copy {
                src: map_b[src.0],
                dst: map_b[dst.0],
                next: next + shift,
            },
        });
    }
    RmProgram::new(
        registers,
        instructions,
        a.initial_state(),
        map_b[b.output().0],
    )
}

/// Prefix `prog` with increment chains loading the given register values, so
/// the result computes from all-zero registers what `prog` computes from
/// `values`.
pub fn with_input_prefix(prog: &RmProgram, values: &[(&str, u64)]) -> Result<RmProgram, MachineError> {
    let total: u64 = values.iter().map(|&(_, v)| v).sum();
    let shift = total as usize;
    let mut instructions: Vec<Instruction> = Vec::with_capacity(shift + prog.instructions().len());
    let mut at = 0usize;
    for &(name, v) in values {
        let reg = prog
            .register_id(name)
            .ok_or_else(|| MachineError::UnknownRegister(name.to_owned()))?;
        for _ in 0..v {
            at += 1;
            instructions.push(Instruction::Inc { reg, next: at });
        }
    }
    let fix = |s: State| s + shift;
    for instr in prog.instructions() {
        instructions.push(match *instr {
            Instruction::Halt => Instruction::Halt,
            Instruction::Inc { reg, next } => Instruction::Inc { reg, next: fix(next) },
            Instruction::Dec { reg, next_nonzero, next_zero } => Instruction::Dec {
                reg,
                next_nonzero: fix(next_nonzero),
                next_zero: fix(next_zero),
            },
            Instruction::Copy { src, dst, next } => Instruction::Copy { src, dst, next: fix(next) },
        });
    }
    // the prefix flows into the shifted initial state
    let initial = if shift == 0 { fix(prog.initial_state()) } else { 0 };
    if shift > 0 {
        // the last prefix inc must continue at the original initial state
        if let Some(Instruction::Inc { next, .. }) = instructions.get_mut(shift - 1) {
            *next = fix(prog.initial_state());
        }
    }
    RmProgram::new(prog.registers().to_vec(), instructions, initial, prog.output())
}

// ---------------------------------------------------------------------------
// Builder with labels, for generated programs
// ---------------------------------------------------------------------------

/// Forward-referencing jump target used while assembling a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label(usize);

#[derive(Debug, Clone, Copy)]
enum PendingInstr {
    Inc(RegId, Label),
    Dec(RegId, Label, Label),
    Copy(RegId, RegId, Label),
    Halt,
}

/// Assembles [`RmProgram`]s from labeled instructions.
#[derive(Debug, Default)]
pub struct RmBuilder {
    registers: Vec<String>,
    reg_ids: HashMap<String, RegId>,
    instrs: Vec<PendingInstr>,
    labels: Vec<Option<usize>>,
}

impl RmBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reg(&mut self, name: &str) -> RegId {
        if let Some(&id) = self.reg_ids.get(name) {
            return id;
        }
        let id = RegId(self.registers.len());
        self.registers.push(name.to_owned());
        self.reg_ids.insert(name.to_owned(), id);
        id
    }

    pub fn label(&mut self) -> Label {
        self.labels.push(None);
        Label(self.labels.len() - 1)
    }

    /// Bind `label` to the next emitted instruction.
    pub fn bind(&mut self, label: Label) {
        assert!(self.labels[label.0].is_none(), "label bound twice");
        self.labels[label.0] = Some(self.instrs.len());
    }

    /// A label already bound to the next instruction.
    pub fn here(&mut self) -> Label {
        let l = self.label();
        self.bind(l);
        l
    }

    pub fn inc(&mut self, reg: RegId, next: Label) {
        self.instrs.push(PendingInstr::Inc(reg, next));
    }

    /// Increment and fall through to the following instruction.
    pub fn inc_fall(&mut self, reg: RegId) {
        let next = self.label();
        self.instrs.push(PendingInstr::Inc(reg, next));
        self.bind(next);
    }

    pub fn dec(&mut self, reg: RegId, nonzero: Label, zero: Label) {
        self.instrs.push(PendingInstr::Dec(reg, nonzero, zero));
    }

    pub fn copy(&mut self, src: RegId, dst: RegId, next: Label) {
        self.instrs.push(PendingInstr::Copy(src, dst, next));
    }

    pub fn copy_fall(&mut self, src: RegId, dst: RegId) {
        let next = self.label();
        self.instrs.push(PendingInstr::Copy(src, dst, next));
        self.bind(next);
    }

    pub fn halt(&mut self) {
        self.instrs.push(PendingInstr::Halt);
    }

    /// Unconditional jump: a dec on the reserved always-zero register `nil`
    /// with both branches pointing at `target`. `nil` is never incremented,
    /// so the transition is a pure state change.
    pub fn jump(&mut self, target: Label) {
        let nil = self.reg("nil");
        self.instrs.push(PendingInstr::Dec(nil, target, target));
    }

    /// Position a bound label resolved to, if bound.
    pub fn resolved(&self, label: Label) -> Option<usize> {
        self.labels[label.0]
    }

    /// Emit `while src > 0 { src -= 1; for dst in dsts { dst += 1 } }`,
    /// falling through when `src` reaches zero.
    pub fn drain(&mut self, src: RegId, dsts: &[RegId]) {
        let top = self.here();
        let done = self.label();
        if dsts.is_empty() {
            self.dec(src, top, done);
        } else {
            let mut next = self.label();
            self.dec(src, next, done);
            for (i, &dst) in dsts.iter().enumerate() {
                self.bind(next);
                let after = if i + 1 == dsts.len() { top } else { self.label() };
                self.inc(dst, after);
                next = after;
            }
        }
        self.bind(done);
    }

    pub fn build(self, output: RegId) -> Result<RmProgram, MachineError> {
        self.build_with_start(output, 0)
    }

    pub fn build_with_start(self, output: RegId, initial_state: State) -> Result<RmProgram, MachineError> {
        let resolve = |l: Label| self.labels[l.0].ok_or(MachineError::UnboundLabel);
        let mut instructions = Vec::with_capacity(self.instrs.len());
        for pi in &self.instrs {
            let instr = match *pi {
                PendingInstr::Inc(reg, next) => Instruction::Inc {
                    reg,
                    next: resolve(next)?,
                },
                PendingInstr::Dec(reg, nz, z) => Instruction::Dec {
                    reg,
                    next_nonzero: resolve(nz)?,
                    next_zero: resolve(z)?,
                },
                PendingInstr::Copy(src, dst, next) => Instruction::Copy {
                    src,
                    dst,
                    next: resolve(next)?,
                },
                PendingInstr::Halt => Instruction::Halt,
            };
            instructions.push(instr);
        }
        RmProgram::new(self.registers, instructions, initial_state, output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::samples::permutation_2431_program;

    #[test]
    fn seven_instruction_program_sets_2431() {
        let prog = permutation_2431_program();
        let init = vec![0u64; prog.registers().len()];
        let run = run_rm(&prog, &init, None, 1_000).unwrap();
        let value = |name: &str| run.regs[prog.register_id(name).unwrap().0];
        assert_eq!(
            [value("r1"), value("r2"), value("r3"), value("r4")],
            [2, 4, 3, 1]
        );
    }

    #[test]
    fn dec_on_zero_takes_zero_branch() {
        let text = "0: dec r1 -> 1 / 2\n1: halt\n2: inc r2 -> 3\n3: halt\noutput: r2\n";
        let prog = parse_rm(text).unwrap();
        let run = run_rm(&prog, &[0, 0], None, 100).unwrap();
        assert_eq!(run.regs, vec![0, 1]);
        assert_eq!(run.state, 3);
        let run = run_rm(&prog, &[2, 0], None, 100).unwrap();
        assert_eq!(run.regs, vec![1, 0]);
        assert_eq!(run.state, 1);
    }

    #[test]
    fn copy_preserves_source() {
        let text = "0: copy r1 r2 -> 1\n1: halt\noutput: r2\n";
        let prog = parse_rm(text).unwrap();
        let run = run_rm(&prog, &[3, 1], None, 100).unwrap();
        assert_eq!(run.regs, vec![3, 4]);
    }

    #[test]
    fn bound_exceeded_is_reported() {
        let text = "0: inc r1 -> 1\n1: inc r1 -> 2\n2: halt\noutput: r1\n";
        let prog = parse_rm(text).unwrap();
        let err = run_rm(&prog, &[1], Some(&[2]), 100).unwrap_err();
        assert!(matches!(err, MachineError::BoundExceeded { bound: 2, .. }));
        assert!(run_rm(&prog, &[0], Some(&[2]), 100).is_ok());
    }

    #[test]
    fn step_cap_is_reported() {
        let text = "0: inc r1 -> 1\n1: dec r1 -> 0 / 0\noutput: r1\n";
        let prog = parse_rm(text).unwrap();
        assert!(matches!(
            run_rm(&prog, &[0], None, 50),
            Err(MachineError::StepCap(50))
        ));
    }

    #[test]
    fn rm_text_roundtrip() {
        let prog = permutation_2431_program();
        let text = prog.to_string();
        let prog2 = parse_rm(&text).unwrap();
        assert_eq!(prog.instructions(), prog2.instructions());
        assert_eq!(prog.registers(), prog2.registers());
        assert_eq!(text, prog2.to_string());
    }

    #[test]
    fn validation_rejects_dangling_state_and_self_copy() {
        assert!(matches!(
            parse_rm("0: inc r1 -> 5\noutput: r1\n"),
            Err(MachineError::BadState(5, 1))
        ));
        assert!(matches!(
            parse_rm("0: copy r1 r1 -> 0\noutput: r1\n"),
            Err(MachineError::CopySelf(_))
        ));
    }

    #[test]
    fn builder_drain_moves_and_doubles() {
        let mut b = RmBuilder::new();
        let src = b.reg("src");
        let dst = b.reg("dst");
        b.drain(src, &[dst, dst]);
        b.halt();
        let prog = b.build(dst).unwrap();
        let run = run_rm(&prog, &[5, 1], None, 1000).unwrap();
        assert_eq!(run.regs, vec![0, 11]);
    }

    #[test]
    fn max_seen_tracks_peaks() {
        let text = "0: inc r1 -> 1\n1: inc r1 -> 2\n2: dec r1 -> 3 / 4\n3: halt\n4: halt\noutput: r1\n";
        let prog = parse_rm(text).unwrap();
        let run = run_rm(&prog, &[0], None, 100).unwrap();
        assert_eq!(run.regs[0], 1);
        assert_eq!(run.max_seen[0], 2);
    }
}
