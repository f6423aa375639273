//! Reference machines and programs used by the test suites and the CLI
//! demos: a small register-machine corpus with inputs and bounds, plus the
//! Turing machines the translation layer is exercised against.

use crate::machines::tm::{Move, TmDocument, TmTransitionDoc, TuringMachine};
use crate::machines::{parse_rm, RmProgram};
use crate::rm_compiler::BoundMode;

/// One corpus entry: a program in the numbered text format, its input
/// loading, per-register ladder bounds, and whether its compiled state space
/// is small enough for exhaustive checking.
pub struct CorpusProgram {
    pub name: &'static str,
    pub text: &'static str,
    pub inputs: &'static [(&'static str, u64)],
    pub bounds: &'static [(&'static str, u32)],
    pub exhaustive: bool,
}

impl CorpusProgram {
    pub fn program(&self) -> RmProgram {
        parse_rm(self.text).expect("corpus programs parse")
    }

    pub fn bound_modes(&self) -> std::collections::BTreeMap<String, BoundMode> {
        self.bounds
            .iter()
            .map(|&(r, rungs)| (r.to_owned(), BoundMode::Ladder { rungs }))
            .collect()
    }
}

/// Ten register-machine programs: arithmetic loops, copies, nested
/// decrements, and one register at the largest ladder bound. The first four
/// are small enough for exhaustive verification.
pub fn rm_corpus() -> Vec<CorpusProgram> {
    vec![
        CorpusProgram {
            name: "inc_one",
            text: "0: inc r1 -> 1\n1: halt\noutput: r1\n",
            inputs: &[],
            bounds: &[("r1", 2)],
            exhaustive: true,
        },
        CorpusProgram {
            name: "identity",
            text: "0: dec rin -> 1 / 2\n1: inc out -> 0\n2: halt\noutput: out\n",
            inputs: &[("rin", 3)],
            bounds: &[("rin", 2), ("out", 2)],
            exhaustive: true,
        },
        CorpusProgram {
            name: "parity",
            text: "0: dec rin -> 1 / 4\n1: dec rin -> 0 / 2\n2: inc out -> 3\n3: halt\n4: halt\noutput: out\n",
            inputs: &[("rin", 5)],
            bounds: &[("rin", 3), ("out", 1)],
            exhaustive: true,
        },
        CorpusProgram {
            name: "max_diff",
            text: "0: dec b -> 1 / 2\n1: dec a -> 0 / 0\n2: dec a -> 3 / 4\n3: inc out -> 2\n4: halt\noutput: out\n",
            inputs: &[("a", 3), ("b", 1)],
            bounds: &[("a", 2), ("b", 1), ("out", 2)],
            exhaustive: true,
        },
        CorpusProgram {
            name: "double",
            text: "0: dec rin -> 1 / 3\n1: inc out -> 2\n2: inc out -> 0\n3: halt\noutput: out\n",
            inputs: &[("rin", 3)],
            bounds: &[("rin", 2), ("out", 3)],
            exhaustive: false,
        },
        CorpusProgram {
            name: "copy_add",
            text: "0: copy r1 r2 -> 1\n1: halt\noutput: r2\n",
            inputs: &[("r1", 3), ("r2", 1)],
            bounds: &[("r1", 2), ("r2", 3)],
            exhaustive: false,
        },
        CorpusProgram {
            name: "nested_product",
            text: "0: dec a -> 1 / 2\n1: copy b out -> 0\n2: halt\noutput: out\n",
            inputs: &[("a", 2), ("b", 3)],
            bounds: &[("a", 2), ("b", 2), ("out", 3)],
            exhaustive: false,
        },
        CorpusProgram {
            name: "sum3",
            text: "0: dec a -> 1 / 2\n1: inc out -> 0\n2: dec b -> 3 / 4\n3: inc out -> 2\n4: dec c -> 5 / 6\n5: inc out -> 4\n6: halt\noutput: out\n",
            inputs: &[("a", 1), ("b", 2), ("c", 3)],
            bounds: &[("a", 1), ("b", 2), ("c", 2), ("out", 3)],
            exhaustive: false,
        },
        CorpusProgram {
            name: "triangle",
            text: "0: copy a out -> 1\n1: dec a -> 0 / 2\n2: halt\noutput: out\n",
            inputs: &[("a", 3)],
            bounds: &[("a", 2), ("out", 3)],
            exhaustive: false,
        },
        CorpusProgram {
            name: "countdown_wide",
            text: "0: dec rin -> 1 / 2\n1: inc out -> 0\n2: halt\noutput: out\n",
            inputs: &[("rin", 200)],
            bounds: &[("rin", 8), ("out", 8)],
            exhaustive: false,
        },
    ]
}

/// Straight-line program leaving `(r1..r4) = (2,4,3,1)`: r2 both counts up
/// and keeps its final value, the other registers are copied from it.
pub fn permutation_2431_program() -> RmProgram {
    parse_rm(
        "\
output: r2
0: inc r2 -> 1
1: copy r2 r4 -> 2
2: inc r2 -> 3
3: copy r2 r1 -> 4
4: inc r2 -> 5
5: copy r2 r3 -> 6
6: inc r2 -> 7
7: halt
",
    )
    .unwrap()
}

fn t(state: &str, read: char, next: &str, write: char, direction: Move) -> TmTransitionDoc {
    TmTransitionDoc {
        state: state.into(),
        read,
        next: next.into(),
        write,
        direction,
    }
}

/// Binary successor machine: scan right to the end of the numeral, carry
/// leftward, then return and halt with the head on the least significant
/// bit.
pub fn successor_tm() -> TuringMachine {
    let doc = TmDocument {
        states: vec!["s".into(), "c".into(), "r".into(), "h".into()],
        alphabet: vec!['_', '0', '1'],
        blank: '_',
        start: "s".into(),
        halt: "h".into(),
        transitions: vec![
            t("s", '0', "s", '0', Move::R),
            t("s", '1', "s", '1', Move::R),
            t("s", '_', "c", '_', Move::L),
            t("c", '1', "c", '0', Move::L),
            t("c", '0', "r", '1', Move::R),
            t("c", '_', "r", '1', Move::R),
            t("r", '0', "r", '0', Move::R),
            t("r", '1', "r", '1', Move::R),
            t("r", '_', "h", '_', Move::L),
        ],
    };
    TuringMachine::from_document(&doc).expect("successor machine is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{run_rm, with_input_prefix};

    #[test]
    fn corpus_oracle_outputs() {
        let expect: &[(&str, u64)] = &[
            ("inc_one", 1),
            ("identity", 3),
            ("parity", 1),
            ("max_diff", 2),
            ("double", 6),
            ("copy_add", 4),
            ("nested_product", 6),
            ("sum3", 6),
            ("triangle", 6),
            ("countdown_wide", 200),
        ];
        let corpus = rm_corpus();
        assert_eq!(corpus.len(), 10);
        for entry in &corpus {
            let prog = entry.program();
            let mut regs = vec![0u64; prog.registers().len()];
            for &(name, v) in entry.inputs {
                regs[prog.register_id(name).unwrap().0] = v;
            }
            let run = run_rm(&prog, &regs, None, 1_000_000).unwrap();
            let want = expect.iter().find(|&&(n, _)| n == entry.name).unwrap().1;
            assert_eq!(run.output_value(&prog), want, "{}", entry.name);

            // the loaded variant computes the same value from zeros
            let loaded = with_input_prefix(&prog, entry.inputs).unwrap();
            let run = run_rm(&loaded, &vec![0; loaded.registers().len()], None, 1_000_000).unwrap();
            assert_eq!(run.output_value(&loaded), want, "{} loaded", entry.name);

            // declared bounds cover the observed maxima
            let modes = entry.bound_modes();
            for (i, reg) in loaded.registers().iter().enumerate() {
                if reg == "nil" || reg.starts_with("aux") {
                    continue;
                }
                let bound = modes
                    .get(reg)
                    .unwrap_or_else(|| panic!("{}: no bound for {reg}", entry.name))
                    .bound();
                assert!(
                    num_bigint::BigUint::from(run.max_seen[i]) <= bound,
                    "{}: register {reg} peaked at {}",
                    entry.name,
                    run.max_seen[i]
                );
            }
        }
    }
}
