//! Generated register-machine decoder: given a register holding the
//! unary-runs numeral of a permutation's counts, reconstruct the counts and
//! leave the permutation's lexicographic rank in the output register.

use num_bigint::BigUint;

use super::lehmer::factorial;
use super::{RegId, RmBuilder, RmProgram};

/// Registers of a generated decoder that callers need to address.
#[derive(Debug)]
pub struct RankDecoder {
    pub prog: RmProgram,
    /// Input register holding the encoded numeral.
    pub input: RegId,
    /// Output register receiving the rank.
    pub rank: RegId,
}

/// Build a decoder for permutations of `{1..k}`.
///
/// The input numeral reads, most significant bit first, as the count of
/// register 1 in unary, a 0 separator, the count of register 2, and so on
/// with no trailing separator. The decoder peels bits least significant
/// first (pair off the input to halve it; the failing dec picks the parity
/// branch), so runs arrive in reverse register order. Separators and
/// end-of-numeral both surface as an even-parity exit: while filling
/// register i >= 2 that is a separator, while filling register 1 it means
/// the numeral is exhausted.
pub fn build_rank_decoder(k: u32) -> RankDecoder {
    assert!(k >= 1);
    let k = k as usize;
    let mut b = RmBuilder::new();
    let input = b.reg("I");
    let half = b.reg("half");
    let counts: Vec<RegId> = (1..=k).map(|i| b.reg(&format!("c{i}"))).collect();
    let pairs = b.reg("t");
    let hits = b.reg("li");
    let acc = b.reg("rank");
    let scratch = b.reg("tm");

    // Phase A: reconstruct counts from the numeral.
    let phase_b = b.label();
    for i in (0..k).rev() {
        let fill = b.here();
        let even_exit = b.label();
        let odd_exit = b.label();
        let second = b.label();
        let cont = b.label();
        b.dec(input, second, even_exit);
        b.bind(second);
        b.dec(input, cont, odd_exit);
        b.bind(cont);
        b.inc(half, fill);
        // odd: one more 1 in the current run
        b.bind(odd_exit);
        b.inc_fall(counts[i]);
        b.drain(half, &[input]);
        b.jump(fill);
        // even: separator (i >= 1) or exhausted numeral (i == 0)
        b.bind(even_exit);
        b.drain(half, &[input]);
        if i == 0 {
            b.jump(phase_b);
        }
        // falls through to the next register's fill loop
    }

    // Phase B+C: rank = sum of hits(i) * (k-i)! via factorial-base Horner:
    // acc := acc*(k-i+1) + hits(i) for i = 1..k.
    b.bind(phase_b);
    for i in 0..k {
        // hits(i) = #{j > i : c_j < c_i}
        for j in i + 1..k {
            let ci_le = b.label();
            let cj_lt = b.label();
            let next_pair = b.label();
            let step2 = b.label();
            let step3 = b.label();
            let top = b.here();
            b.dec(counts[i], step2, ci_le);
            b.bind(step2);
            b.dec(counts[j], step3, cj_lt);
            b.bind(step3);
            b.inc(pairs, top);
            b.bind(cj_lt);
            b.inc_fall(hits);
            b.inc_fall(counts[i]); // undo the unpaired dec of c_i
            b.jump(next_pair);
            b.bind(ci_le);
            // fall through
            b.bind(next_pair);
            b.drain(pairs, &[counts[i], counts[j]]);
        }
        // acc := acc * (k - i) + hits   (weight of position i is (k-1-i)!)
        let factor = k - i;
        if factor > 1 {
            b.drain(acc, &[scratch]);
            b.drain(scratch, &vec![acc; factor]);
        }
        b.drain(hits, &[acc]);
    }
    b.halt();

    let prog = b.build(acc).expect("all labels bound");
    RankDecoder {
        prog,
        input,
        rank: acc,
    }
}

/// Analytic per-register maxima for a decoder run on numeral value `m`,
/// sufficient for sizing compiled bounds without executing the decoder.
pub fn decoder_maxima(k: u32, m: &BigUint) -> Vec<(String, BigUint)> {
    let kk = BigUint::from(k);
    let rank_max = BigUint::from(factorial(k).expect("k small") - 1);
    let mut out = vec![
        ("I".to_owned(), m.clone()),
        ("half".to_owned(), m >> 1),
        ("t".to_owned(), kk.clone()),
        ("li".to_owned(), kk.clone()),
        ("rank".to_owned(), rank_max.clone()),
        ("tm".to_owned(), rank_max),
        ("nil".to_owned(), BigUint::ZERO),
    ];
    for i in 1..=k {
        out.push((format!("c{i}"), kk.clone()));
    }
    out
}
