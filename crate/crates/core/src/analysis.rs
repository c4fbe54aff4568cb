//! Exact analytics for the claim-processing coin experiment.
//!
//! Claim processing flips three independent coin sets: two accept sets of
//! `4lj + l` and `4lk + l` coins and a control set of `2l(j + k)` coins.
//! The claim resolves to Accept when either accept set is all zeros, to a
//! Test when both accept sets have a one and the control set is all zeros,
//! and otherwise continues. Everything here is exact rational arithmetic;
//! the closed forms and the streaming oracle are computed by different
//! routes and must agree exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact outcome distribution of one claim processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimDistribution {
    pub l: u32,
    pub j: u32,
    pub k: u32,
    pub pr_accept: BigRational,
    pub pr_test: BigRational,
    pub pr_continue: BigRational,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("parameters out of the guaranteed exact range (l <= 4, j,k <= 16)")]
    OutOfRange,
    #[error("misaligned bound requires j != k")]
    AlignedParameters,
    #[error("n must be positive")]
    ZeroLength,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// `2^-e` as an exact rational.
fn pow2_neg(e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

/// Closed form for the probability that a claim resolves by accept coins:
/// `2^(-4lj-l) + (1 - 2^(-4lj-l)) * 2^(-4lk-l)`.
pub fn pr_accept_closed(l: u32, j: u32, k: u32) -> BigRational {
    let a1 = pow2_neg(4 * l as u64 * j as u64 + l as u64);
    let a2 = pow2_neg(4 * l as u64 * k as u64 + l as u64);
    &a1 + (BigRational::one() - &a1) * a2
}

/// Closed form for the probability that the stored triples get tested:
/// `(1 - Pr[Accept]) * 2^(-2l(j+k))`.
pub fn pr_test_closed(l: u32, j: u32, k: u32) -> BigRational {
    (BigRational::one() - pr_accept_closed(l, j, k))
        * pow2_neg(2 * l as u64 * (j as u64 + k as u64))
}

/// Streaming oracle: steps the joint distribution of the three has-a-one
/// flags through the coin groups in emission order, without using the
/// closed forms. Two different interleavings of the control coins are
/// computed and compared, since independence makes the order irrelevant.
pub fn claim_distribution_exact(l: u32, j: u32, k: u32) -> Result<ClaimDistribution, AnalysisError> {
    if l == 0 || j == 0 || k == 0 || l > 4 || j > 16 || k > 16 {
        return Err(AnalysisError::OutOfRange);
    }
    let per_symbol = claim_flags_distribution(l, j, k, true);
    let bulk = claim_flags_distribution(l, j, k, false);
    debug_assert_eq!(per_symbol, bulk, "interleaving must not change the distribution");

    // Flags: (a1 has a one, a2 has a one, ctrl has a one).
    let mut pr_accept = BigRational::zero();
    let mut pr_test = BigRational::zero();
    let mut pr_continue = BigRational::zero();
    for (state, p) in per_symbol.iter().enumerate() {
        let a1 = state & 1 != 0;
        let a2 = state & 2 != 0;
        let ctrl = state & 4 != 0;
        if !a1 || !a2 {
            pr_accept += p;
        } else if !ctrl {
            pr_test += p;
        } else {
            pr_continue += p;
        }
    }
    Ok(ClaimDistribution { l, j, k, pr_accept, pr_test, pr_continue })
}

/// Distribution over the 8 flag states after all coins. `interleaved`
/// flips the control coins cell by cell alongside the accept coins;
/// otherwise they are flipped in one bulk batch at the end.
fn claim_flags_distribution(l: u32, j: u32, k: u32, interleaved: bool) -> Vec<BigRational> {
    let mut dist = vec![BigRational::zero(); 8];
    dist[0] = BigRational::one();

    // Streams the first j symbols of the first configuration (4l coins
    // each, l extra on the j-th), then the first k of the second.
    for (set_bit, cells) in [(0usize, j), (1usize, k)] {
        for cell in 1..=cells {
            let coins = if cell == cells { 4 * l + l } else { 4 * l };
            flip_group(&mut dist, set_bit, coins);
            if interleaved {
                flip_group(&mut dist, 2, 2 * l);
            }
        }
    }
    if !interleaved {
        flip_group(&mut dist, 2, 2 * l * (j + k));
    }
    dist
}

/// Flips `coins` coins into the flag at `bit`: the flag turns on unless all
/// of them come up zero.
fn flip_group(dist: &mut [BigRational], bit: usize, coins: u32) {
    if coins == 0 {
        return;
    }
    let all_zero = pow2_neg(coins as u64);
    let some_one = BigRational::one() - &all_zero;
    let mut next = vec![BigRational::zero(); 8];
    for (state, p) in dist.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        if state & (1 << bit) != 0 {
            next[state] += p;
        } else {
            next[state] += p * &all_zero;
            next[state | (1 << bit)] += p * &some_one;
        }
    }
    dist.clone_from_slice(&next);
}

/// Whether an off-by-`j!=k` claim favors acceptance by the paper's margin:
/// `Pr[Accept] > 2^(l-1) * Pr[Test]`.
pub fn check_misaligned_bound(l: u32, j: u32, k: u32) -> Result<bool, AnalysisError> {
    if j == k {
        return Err(AnalysisError::AlignedParameters);
    }
    let d = claim_distribution_exact(l, j, k)?;
    let factor = BigRational::from_integer(BigInt::one() << (l as u64 - 1));
    Ok(d.pr_accept > factor * d.pr_test)
}

/// Whether an aligned claim favors the test by the paper's margin:
/// `Pr[Test] > 2^(l-2) * Pr[Accept]` at `j == k`.
pub fn check_aligned_bound(l: u32, j: u32) -> Result<bool, AnalysisError> {
    let d = claim_distribution_exact(l, j, j)?;
    // 2^(l-2) as a rational, valid for l = 1 as well.
    let factor = if l >= 2 {
        BigRational::from_integer(BigInt::one() << (l as u64 - 2))
    } else {
        half()
    };
    Ok(d.pr_test > factor * d.pr_accept)
}

/// The superlinear infinity check's false-reject analysis: returns the
/// paper's bound `s(n) * 2^(-rn)` and the exact geometric sum
/// `sum_{i=1}^{floor(s/n)} (1 - 2^(-rn))^(i-1) * 2^(-rn)`, asserting that
/// the sum stays under the bound.
pub fn infinity_false_reject_bound(
    s_of_n: u64,
    r: u32,
    n: u32,
) -> Result<(BigRational, BigRational), AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::ZeroLength);
    }
    let q = pow2_neg(r as u64 * n as u64);
    let iterations = s_of_n / n as u64;
    // Exact sum of the geometric series = 1 - (1-q)^iterations.
    let stay = BigRational::one() - &q;
    let mut stay_pow = BigRational::one();
    for _ in 0..iterations {
        stay_pow *= &stay;
    }
    let exact = BigRational::one() - stay_pow;
    let bound = BigRational::from_integer(BigInt::from(s_of_n)) * &q;
    assert!(exact < bound, "geometric sum must stay under the closed bound");
    Ok((bound, exact))
}

/// Ceiling on the wrong-decision probability among claim-resolved outcomes
/// implied by the ratio bounds: `1/(2^(l-1)+1)` on the completeness side,
/// `1/(2^(l-2)+1)` on the soundness side.
pub fn wrong_side_ceiling(l: u32, soundness: bool) -> BigRational {
    let pow = if soundness {
        if l >= 2 {
            BigRational::from_integer(BigInt::one() << (l as u64 - 2))
        } else {
            half()
        }
    } else {
        BigRational::from_integer(BigInt::one() << (l as u64 - 1))
    };
    (pow + BigRational::one()).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn closed_forms_match_hand_arithmetic() {
        assert_eq!(pr_accept_closed(1, 1, 1), rat(63, 1024));
        assert_eq!(pr_test_closed(1, 1, 1), rat(961, 16384));
        assert_eq!(pr_accept_closed(1, 1, 2), rat(543, 16384));
        assert_eq!(pr_test_closed(1, 1, 2), rat(15841, 1048576));
        assert_eq!(pr_accept_closed(2, 1, 1), rat(2047, 1048576));
        assert_eq!(pr_test_closed(2, 1, 1), rat(1046529, 268435456));
    }

    #[test]
    fn oracle_matches_closed_forms_and_sums_to_one() {
        let d = claim_distribution_exact(1, 1, 1).unwrap();
        assert_eq!(d.pr_accept, rat(63, 1024));
        assert_eq!(d.pr_test, rat(961, 16384));
        assert_eq!(d.pr_continue, rat(14415, 16384));
        let total = &d.pr_accept + &d.pr_test + &d.pr_continue;
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn oracle_ratio_at_misaligned_parameters() {
        let d = claim_distribution_exact(1, 1, 2).unwrap();
        assert_eq!(&d.pr_accept / &d.pr_test, rat(34752, 15841));
    }

    #[test]
    fn bounds_hold_at_spot_checked_parameters() {
        assert!(check_misaligned_bound(1, 1, 2).unwrap());
        assert!(check_misaligned_bound(3, 2, 5).unwrap());
        assert_eq!(
            check_misaligned_bound(2, 1, 1).unwrap_err(),
            AnalysisError::AlignedParameters
        );
        assert!(check_aligned_bound(1, 1).unwrap());
        assert!(check_aligned_bound(2, 1).unwrap());
        assert!(check_aligned_bound(4, 3).unwrap());
    }

    #[test]
    fn infinity_bound_example() {
        // s(n) = n^2, r = 2, n = 8: bound is 64 * 2^-16 = 2^-10.
        let (bound, exact) = infinity_false_reject_bound(64, 2, 8).unwrap();
        assert_eq!(bound, rat(1, 1024));
        assert!(exact < bound);
        // Single-iteration case: the exact sum is exactly 2^-rn.
        let (bound, exact) = infinity_false_reject_bound(6, 1, 4).unwrap();
        assert_eq!(exact, rat(1, 16));
        assert!(exact < bound);
    }

    #[test]
    fn wrong_side_ceilings() {
        assert_eq!(wrong_side_ceiling(4, true), rat(1, 5));
        assert_eq!(wrong_side_ceiling(1, false), rat(1, 2));
        // Strictly decreasing in l.
        for side in [true, false] {
            for l in 1..4 {
                assert!(wrong_side_ceiling(l + 1, side) < wrong_side_ceiling(l, side));
            }
        }
    }
}
