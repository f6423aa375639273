//! Lehmer code / factorial number system: a bijection between permutations of
//! `{1..k}` and integers in `[0, k!)`, plus the unary-runs count encoding used
//! by the permutation pipeline.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LehmerError {
    #[error("sequence is not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("rank {rank} out of range for k={k} (must be < k!)")]
    RankOutOfRange { rank: u128, k: u32 },
    #[error("factorial of {0} exceeds the supported range")]
    FactorialOverflow(u32),
    #[error("counts must all be >= 1")]
    ZeroCount,
}

/// `k!` as a `u128`; defined for `k <= 33`.
pub fn factorial(k: u32) -> Result<u128, LehmerError> {
    let mut acc: u128 = 1;
    for i in 2..=k as u128 {
        acc = acc.checked_mul(i).ok_or(LehmerError::FactorialOverflow(k))?;
    }
    Ok(acc)
}

fn check_permutation(perm: &[u32]) -> Result<(), LehmerError> {
    let k = perm.len();
    let mut seen = vec![false; k];
    for &v in perm {
        if v == 0 || v as usize > k || seen[v as usize - 1] {
            return Err(LehmerError::NotAPermutation(k));
        }
        seen[v as usize - 1] = true;
    }
    Ok(())
}

/// Lexicographic rank of a permutation of `{1..k}`, in `[0, k!)`.
pub fn lehmer_rank(perm: &[u32]) -> Result<u128, LehmerError> {
    check_permutation(perm)?;
    let k = perm.len() as u32;
    let mut rank: u128 = 0;
    for (i, &v) in perm.iter().enumerate() {
        let smaller_later = perm[i + 1..].iter().filter(|&&w| w < v).count() as u128;
        rank += smaller_later * factorial(k - 1 - i as u32)?;
    }
    Ok(rank)
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(rank: u128, k: u32) -> Result<Vec<u32>, LehmerError> {
    if rank >= factorial(k)? {
        return Err(LehmerError::RankOutOfRange { rank, k });
    }
    let mut available: Vec<u32> = (1..=k).collect();
    let mut rest = rank;
    let mut perm = Vec::with_capacity(k as usize);
    for i in 0..k {
        let f = factorial(k - 1 - i)?;
        let digit = (rest / f) as usize;
        rest %= f;
        perm.push(available.remove(digit));
    }
    Ok(perm)
}

/// Smallest `k` with `k! > x`, so every rank in `0..=x` is representable.
pub fn min_k_for(x: u128) -> u32 {
    let mut k = 1u32;
    loop {
        match factorial(k) {
            Ok(f) if f > x => return k,
            Ok(_) => k += 1,
            Err(_) => unreachable!("x < 2^128 < 34!"),
        }
    }
}

/// Binary numeral formed by each count in unary 1s, separated by single 0s,
/// most significant run first, no trailing separator. The pure oracle for the
/// count-encoding stage of the permutation pipeline.
pub fn encode_counts_to_m(counts: &[u64]) -> Result<BigUint, LehmerError> {
    let mut m = BigUint::zero();
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(LehmerError::ZeroCount);
        }
        if i > 0 {
            m <<= 1;
        }
        for _ in 0..c {
            m <<= 1;
            m += 1u32;
        }
    }
    Ok(m)
}

/// Number of bits of [`encode_counts_to_m`] for positive `counts`.
pub fn encoded_bits(counts: &[u64]) -> u64 {
    counts.iter().sum::<u64>() + counts.len() as u64 - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: all permutations of `{1..k}` in lexicographic
    /// order, built by direct recursive enumeration.
    fn enumerate_lex(k: u32) -> Vec<Vec<u32>> {
        fn rec(prefix: &mut Vec<u32>, remaining: &[u32], out: &mut Vec<Vec<u32>>) {
            if remaining.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for (i, &v) in remaining.iter().enumerate() {
                prefix.push(v);
                let rest: Vec<u32> = remaining
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &w)| w)
                    .collect();
                rec(prefix, &rest, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &(1..=k).collect::<Vec<_>>(), &mut out);
        out
    }

    #[test]
    fn identity_has_rank_zero() {
        assert_eq!(lehmer_rank(&[1, 2, 3]).unwrap(), 0);
        assert_eq!(lehmer_unrank(0, 3).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn frozen_ranks_match_enumeration_oracle() {
        // values frozen from the enumeration below
        assert_eq!(lehmer_rank(&[2, 4, 3, 1]).unwrap(), 11);
        assert_eq!(lehmer_rank(&[3, 2, 1]).unwrap(), 5);
        assert_eq!(lehmer_rank(&[3, 1, 2]).unwrap(), 4);
        assert_eq!(lehmer_unrank(11, 4).unwrap(), vec![2, 4, 3, 1]);

        let perms4 = enumerate_lex(4);
        assert_eq!(perms4.iter().position(|p| p == &[2, 4, 3, 1]), Some(11));
        let perms3 = enumerate_lex(3);
        assert_eq!(perms3.iter().position(|p| p == &[3, 2, 1]), Some(5));
        assert_eq!(perms3.iter().position(|p| p == &[3, 1, 2]), Some(4));
    }

    #[test]
    fn rank_and_unrank_are_inverse_bijections_up_to_k7() {
        for k in 1..=7u32 {
            let perms = enumerate_lex(k);
            assert_eq!(perms.len() as u128, factorial(k).unwrap());
            for (rank, perm) in perms.iter().enumerate() {
                assert_eq!(lehmer_rank(perm).unwrap(), rank as u128, "k={k} perm={perm:?}");
                assert_eq!(&lehmer_unrank(rank as u128, k).unwrap(), perm);
            }
        }
    }

    #[test]
    fn non_permutations_and_bad_ranks_are_rejected() {
        assert_eq!(lehmer_rank(&[1, 1]), Err(LehmerError::NotAPermutation(2)));
        assert_eq!(lehmer_rank(&[0, 1]), Err(LehmerError::NotAPermutation(2)));
        assert_eq!(lehmer_rank(&[2, 3]), Err(LehmerError::NotAPermutation(2)));
        assert!(matches!(
            lehmer_unrank(6, 3),
            Err(LehmerError::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn min_k_boundaries() {
        assert_eq!(min_k_for(0), 1);
        assert_eq!(min_k_for(1), 2);
        assert_eq!(min_k_for(5), 3);
        assert_eq!(min_k_for(23), 4);
        assert_eq!(min_k_for(24), 5);
        assert_eq!(min_k_for(u64::MAX as u128), 21);
    }

    #[test]
    fn count_encoding_matches_worked_values() {
        // 111 0 1 0 11 read as binary
        assert_eq!(encode_counts_to_m(&[3, 1, 2]).unwrap(), BigUint::from(0b11101011u32));
        assert_eq!(encode_counts_to_m(&[1]).unwrap(), BigUint::from(1u32));
        // 11 0 1: two 1s, separator, one 1
        assert_eq!(encode_counts_to_m(&[2, 1]).unwrap(), BigUint::from(0b1101u32));
        assert_eq!(encode_counts_to_m(&[1, 2]).unwrap(), BigUint::from(0b1011u32));
        assert_eq!(encode_counts_to_m(&[2, 0]), Err(LehmerError::ZeroCount));
        assert_eq!(encoded_bits(&[3, 1, 2]), 8);
    }

    #[test]
    fn count_encoding_injective_on_fixed_length() {
        use std::collections::HashSet;
        for k in 1..=5usize {
            let mut seen: HashSet<BigUint> = HashSet::new();
            let mut counts = vec![1u64; k];
            loop {
                let m = encode_counts_to_m(&counts).unwrap();
                assert!(seen.insert(m), "collision at {counts:?}");
                // odometer over counts in 1..=5
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    counts[pos] += 1;
                    if counts[pos] <= 5 {
                        break;
                    }
                    counts[pos] = 1;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
    }
}
