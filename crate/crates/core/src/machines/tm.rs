//! Single-tape Turing machines with measured space usage, and their
//! translation to register machines via base-|Γ| tape arithmetization.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RegId, RmBuilder, RmProgram};

#[derive(Debug, Error)]
pub enum TmError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(char),
    #[error("state `{0}` is missing a transition on symbol `{1}`")]
    MissingTransition(String, char),
    #[error("blank symbol must be part of the tape alphabet")]
    BlankNotInAlphabet,
    #[error("input contains symbol `{0}` outside the tape alphabet")]
    BadInput(char),
    #[error("space cap {0} exceeded")]
    SpaceCap(usize),
    #[error("step cap {0} reached before halt")]
    StepCap(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

/// Dense transition: `(state, symbol) -> (state, symbol, move)`, total on
/// non-halt states.
#[derive(Debug, Clone)]
pub struct TuringMachine {
    states: Vec<String>,
    alphabet: Vec<char>,
    blank: usize,
    start: usize,
    halt: usize,
    /// `delta[state][symbol]`; `None` only allowed for the halt state.
    delta: Vec<Vec<Option<(usize, usize, Move)>>>,
}

/// Serialized transition-table form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TmDocument {
    pub states: Vec<String>,
    pub alphabet: Vec<char>,
    pub blank: char,
    pub start: String,
    pub halt: String,
    pub transitions: Vec<TmTransitionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TmTransitionDoc {
    pub state: String,
    pub read: char,
    pub next: String,
    pub write: char,
    #[serde(rename = "move")]
    pub direction: Move,
}

impl TuringMachine {
    pub fn from_document(doc: &TmDocument) -> Result<Self, TmError> {
        let state_id = |name: &str| {
            doc.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| TmError::UnknownState(name.to_owned()))
        };
        let sym_id = |c: char| {
            doc.alphabet
                .iter()
                .position(|&s| s == c)
                .ok_or(TmError::UnknownSymbol(c))
        };
        let blank = sym_id(doc.blank).map_err(|_| TmError::BlankNotInAlphabet)?;
        let start = state_id(&doc.start)?;
        let halt = state_id(&doc.halt)?;
        let mut delta = vec![vec![None; doc.alphabet.len()]; doc.states.len()];
        for t in &doc.transitions {
            let q = state_id(&t.state)?;
            let s = sym_id(t.read)?;
            delta[q][s] = Some((state_id(&t.next)?, sym_id(t.write)?, t.direction));
        }
        let tm = TuringMachine {
            states: doc.states.clone(),
            alphabet: doc.alphabet.clone(),
            blank,
            start,
            halt,
            delta,
        };
        tm.validate()?;
        Ok(tm)
    }

    fn validate(&self) -> Result<(), TmError> {
        for (q, row) in self.delta.iter().enumerate() {
            if q == self.halt {
                continue;
            }
            for (s, entry) in row.iter().enumerate() {
                if entry.is_none() {
                    return Err(TmError::MissingTransition(
                        self.states[q].clone(),
                        self.alphabet[s],
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_document(&self) -> TmDocument {
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (s, entry) in row.iter().enumerate() {
                if let Some((next, write, direction)) = entry {
                    transitions.push(TmTransitionDoc {
                        state: self.states[q].clone(),
                        read: self.alphabet[s],
                        next: self.states[*next].clone(),
                        write: self.alphabet[*write],
                        direction: *direction,
                    });
                }
            }
        }
        TmDocument {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            blank: self.alphabet[self.blank],
            start: self.states[self.start].clone(),
            halt: self.states[self.halt].clone(),
            transitions,
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Count bound sufficient for the tape registers of the translated
    /// register machine when the run stays within `space` cells: |Γ|^space.
    pub fn bound_for(&self, space: usize) -> BigUint {
        BigUint::from(self.alphabet.len()).pow(space as u32)
    }
}

#[derive(Debug, Clone)]
pub struct TmRun {
    /// Value of the binary numeral ending (least significant bit) under the
    /// head at halt.
    pub output: u64,
    /// Number of distinct cells the head visited.
    pub space_used: usize,
    pub steps: u64,
}

/// Run `tm` on `input` (written left-to-right from cell 0, head starting at
/// cell 0). Output convention: at halt the head sits on the least significant
/// bit of a binary numeral that extends to the left.
pub fn run_tm(tm: &TuringMachine, input: &str, space_cap: usize, step_cap: u64) -> Result<TmRun, TmError> {
    let mut tape: HashMap<i64, usize> = HashMap::new();
    for (i, c) in input.chars().enumerate() {
        let s = tm
            .alphabet
            .iter()
            .position(|&a| a == c)
            .ok_or(TmError::BadInput(c))?;
        tape.insert(i as i64, s);
    }
    let mut head: i64 = 0;
    let mut state = tm.start;
    let mut visited: HashSet<i64> = HashSet::new();
    visited.insert(0);
    // input cells count as used space even if never revisited
    for i in 0..input.chars().count() {
        visited.insert(i as i64);
    }
    if visited.len() > space_cap {
        return Err(TmError::SpaceCap(space_cap));
    }
    let mut steps: u64 = 0;
    while state != tm.halt {
        if steps >= step_cap {
            return Err(TmError::StepCap(step_cap));
        }
        let sym = tape.get(&head).copied().unwrap_or(tm.blank);
        let (next, write, dir) = tm.delta[state][sym].expect("delta is total on non-halt states");
        if write == tm.blank {
            tape.remove(&head);
        } else {
            tape.insert(head, write);
        }
        head += match dir {
            Move::L => -1,
            Move::R => 1,
        };
        visited.insert(head);
        if visited.len() > space_cap {
            return Err(TmError::SpaceCap(space_cap));
        }
        state = next;
        steps += 1;
    }
    // read the numeral: head holds the least significant bit, significance
    // grows leftward, stop at the first non-bit symbol
    let zero = tm.alphabet.iter().position(|&c| c == '0');
    let one = tm.alphabet.iter().position(|&c| c == '1');
    let mut output: u64 = 0;
    let mut weight: u64 = 1;
    let mut pos = head;
    loop {
        let sym = tape.get(&pos).copied().unwrap_or(tm.blank);
        if Some(sym) == one {
            output += weight;
        } else if Some(sym) != zero {
            break;
        }
        weight = weight.saturating_mul(2);
        pos -= 1;
    }
    Ok(TmRun {
        output,
        space_used: visited.len(),
        steps,
    })
}

/// Translation of a Turing machine into a register machine.
///
/// The tape is held in two registers as base-|Γ| numerals: `left` holds the
/// cells strictly left of the head (least significant digit nearest the
/// head) and `right` holds the cell under the head and everything rightward
/// (digit at the head least significant). Blank is digit 0, so the infinite
/// blank fringes vanish.
#[derive(Debug)]
pub struct TmTranslation {
    pub prog: RmProgram,
    pub left: RegId,
    pub right: RegId,
    pub out: RegId,
    pub gamma: usize,
    /// Symbol index -> numeral digit. Blank maps to digit 0 so the infinite
    /// blank fringes contribute nothing to the tape registers.
    pub dig: Vec<usize>,
}

impl TmTranslation {
    /// Initial register values for `input` written from the head rightward.
    pub fn encode_input(&self, tm: &TuringMachine, input: &str) -> Result<Vec<u64>, TmError> {
        let mut right: u64 = 0;
        for c in input.chars().rev() {
            let s = tm
                .alphabet
                .iter()
                .position(|&a| a == c)
                .ok_or(TmError::BadInput(c))?;
            right = right * self.gamma as u64 + self.dig[s] as u64;
        }
        let mut regs = vec![0u64; self.prog.registers().len()];
        regs[self.right.0] = right;
        Ok(regs)
    }
}

/// Compile `tm` to an equivalent register machine. Head moves become
/// multiply/divide-by-|Γ| loops built from inc/dec with auxiliary registers.
pub fn tm_to_rm(tm: &TuringMachine) -> TmTranslation {
    let gamma = tm.alphabet.len();
    // digit assignment: swap blank with symbol 0 so blank is digit 0
    let mut dig: Vec<usize> = (0..gamma).collect();
    dig.swap(0, tm.blank);
    let inv = dig.clone(); // the swap is an involution
    let mut b = RmBuilder::new();
    let left = b.reg("left");
    let right = b.reg("right");
    let quot = b.reg("quot");
    let tmp = b.reg("tmp");
    let out = b.reg("out");
    let pow = b.reg("pow");

    // One dispatch label per TM state; halt state gets the output extraction.
    let state_labels: Vec<_> = tm.states.iter().map(|_| b.label()).collect();

    // multiply `reg` by gamma in place: drain into tmp, then tmp back gamma-fold
    let mul_gamma = |b: &mut RmBuilder, reg: RegId, tmp: RegId| {
        b.drain(reg, &[tmp]);
        b.drain(tmp, &vec![reg; gamma]);
    };

    for (q, row) in tm.delta.iter().enumerate() {
        b.bind(state_labels[q]);
        if q == tm.halt {
            // Output extraction: read bits from the head leftward while the
            // digit is 0/1, accumulating sum(bit * 2^j) into `out`. The first
            // digit comes from `right`, later digits from `left`.
            let zero_digit = tm.alphabet.iter().position(|&c| c == '0').map(|s| dig[s]);
            let one_digit = tm.alphabet.iter().position(|&c| c == '1').map(|s| dig[s]);
            b.inc_fall(pow); // pow = 1
            let mut source = right;
            loop {
                // divmod source by gamma; remainder selects a branch
                let digit_labels: Vec<_> = (0..gamma).map(|_| b.label()).collect();
                let loop_top = b.here();
                for d in 0..gamma {
                    let next = b.label();
                    b.dec(source, next, digit_labels[d]);
                    b.bind(next);
                }
                b.inc(quot, loop_top);
                let done = b.label();
                for d in 0..gamma {
                    b.bind(digit_labels[d]);
                    // restore: source := quot (the rest of the numeral)
                    b.drain(quot, &[source]);
                    if Some(d) == one_digit {
                        // out += pow, preserving pow, then pow *= 2
                        b.drain(pow, &[out, tmp]);
                        b.drain(tmp, &[pow]);
                        b.drain(pow, &[tmp, tmp]);
                        b.drain(tmp, &[pow]);
                        b.jump(done);
                    } else if Some(d) == zero_digit {
                        b.drain(pow, &[tmp, tmp]);
                        b.drain(tmp, &[pow]);
                        b.jump(done);
                    } else {
                        // non-bit symbol: numeral ended
                        b.halt();
                    }
                }
                b.bind(done);
                if source == right {
                    source = left;
                } else {
                    b.jump(loop_top);
                    break;
                }
            }
            continue;
        }

        // divmod right by gamma: quot = right / gamma, remainder picked by
        // which dec in the block fails
        let digit_labels: Vec<_> = (0..gamma).map(|_| b.label()).collect();
        let loop_top = b.here();
        for d in 0..gamma {
            let next = b.label();
            b.dec(right, next, digit_labels[d]);
            b.bind(next);
        }
        b.inc(quot, loop_top);

        for d in 0..gamma {
            b.bind(digit_labels[d]);
            let (next_state, write, dir) = row[inv[d]].expect("delta total");
            let write = dig[write];
            match dir {
                Move::R => {
                    // right := quot; left := left*gamma + write
                    b.drain(quot, &[right]);
                    mul_gamma(&mut b, left, tmp);
                    for _ in 0..write {
                        b.inc_fall(left);
                    }
                    b.jump(state_labels[next_state]);
                }
                Move::L => {
                    // right := (quot*gamma + write)*gamma + (left mod gamma);
                    // left := left / gamma
                    mul_gamma(&mut b, quot, tmp);
                    for _ in 0..write {
                        b.inc_fall(quot);
                    }
                    mul_gamma(&mut b, quot, tmp);
                    // divmod left by gamma, quotient accumulating in tmp
                    let ldigits: Vec<_> = (0..gamma).map(|_| b.label()).collect();
                    let ltop = b.here();
                    for ld in 0..gamma {
                        let next = b.label();
                        b.dec(left, next, ldigits[ld]);
                        b.bind(next);
                    }
                    b.inc(tmp, ltop);
                    let merge = b.label();
                    for ld in 0..gamma {
                        b.bind(ldigits[ld]);
                        for _ in 0..ld {
                            b.inc_fall(quot);
                        }
                        b.drain(tmp, &[left]);
                        b.jump(merge);
                    }
                    b.bind(merge);
                    b.drain(quot, &[right]);
                    b.jump(state_labels[next_state]);
                }
            }
        }
    }

    let start = b.resolved(state_labels[tm.start]).expect("dispatch emitted for every state");
    let prog = b.build_with_start(out, start).expect("all labels bound");

    TmTranslation {
        prog,
        left,
        right,
        out,
        gamma,
        dig,
    }
}
