//! Permutation signatures, descent-set counting, and the bijection between
//! complement-tandem histories and permutations.
//!
//! A permutation's signature marks ascents with 1 and descents with 0.
//! Counting permutations with a prescribed signature drives both the exact
//! word probabilities of the complement-tandem model and the ladder of
//! capacity upper bounds from signature block entropies.

use std::collections::HashMap;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{CapacityKind, CapacityValue};
use crate::models::{History, ModelSpec, Rule, StepRecord};
use crate::oracle::factorial;
use crate::word::Word;

/// Largest signature block length accepted by the block-entropy sweep;
/// the sweep enumerates all 2^m signatures of each length m.
pub const MAX_SIGNATURE_BLOCK: usize = 22;

/// A permutation of [n] in one-line notation (1-based values).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `values` is a bijection on [n].
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::Domain {
                    argument: "permutation",
                    value: v as f64,
                    domain: "a bijection on [n]",
                });
            }
            seen[v - 1] = true;
        }
        Ok(Permutation(values))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

/// Ascent/descent word of a permutation: bit i is 1 iff pi_i < pi_{i+1}.
/// A permutation of length m yields a signature of length m-1.
pub fn signature(pi: &Permutation) -> Word {
    Word::from_bits(pi.0.windows(2).map(|w| w[0] < w[1]))
}

/// Positions where a permutation's maximum (first set) or minimum (second
/// set) element may be placed when building a permutation with signature
/// `v` recursively. Returned sorted ascending, as 1-based positions in
/// [|v| + 1].
pub fn transition_sets(v: &Word) -> (Vec<usize>, Vec<usize>) {
    let n = v.len();
    let mut t = Vec::new();
    let mut u = Vec::new();
    for i in 1..=n + 1 {
        let before = (i >= 2).then(|| v.get(i - 2));
        let after = (i <= n).then(|| v.get(i - 1));
        // max placement: descent (or boundary) on the right, ascent on the left
        if before.unwrap_or(true) && !after.unwrap_or(false) {
            t.push(i);
        }
        // min placement: mirror condition
        if !before.unwrap_or(false) && after.unwrap_or(true) {
            u.push(i);
        }
    }
    (t, u)
}

/// Number of permutations of [|u|+1] whose signature is `u`, by the
/// O(m^2) prefix-rank dynamic program.
pub fn count_signature_dp(u: &Word) -> BigUint {
    let m = u.len() + 1;
    let mut ranks = vec![BigUint::one()];
    for i in 2..=m {
        let ascent = u.get(i - 2);
        let mut prefix = Vec::with_capacity(ranks.len() + 1);
        prefix.push(BigUint::zero());
        for value in &ranks {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + value);
        }
        let total = prefix.last().unwrap().clone();
        ranks = (1..=i)
            .map(|j| {
                if ascent {
                    prefix[j - 1].clone()
                } else {
                    &total - &prefix[j - 1]
                }
            })
            .collect();
    }
    ranks.iter().sum()
}

/// Which extreme element the recursive count places first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Place the maximum; positions range over the first transition set.
    Max,
    /// Place the minimum; positions range over the second transition set.
    Min,
}

/// Number of permutations with signature `u`, by the place-the-extreme
/// recursion over transition sets, memoized on signature subwords.
/// Agrees with [`count_signature_dp`] and exists as an independent route.
pub fn count_signature_recursion(u: &Word, placement: Placement) -> BigUint {
    fn recurse(u: &Word, placement: Placement, memo: &mut HashMap<Word, BigUint>) -> BigUint {
        if u.is_empty() {
            return BigUint::one();
        }
        if let Some(hit) = memo.get(u) {
            return hit.clone();
        }
        let n = u.len();
        let (t_set, u_set) = transition_sets(u);
        let positions = match placement {
            Placement::Max => t_set,
            Placement::Min => u_set,
        };
        let mut total = BigUint::zero();
        for i in positions {
            let left = Word::from_bits((0..i.saturating_sub(2)).map(|k| u.get(k)));
            let right = Word::from_bits((i..n).map(|k| u.get(k)));
            let ways = num::integer::binomial(BigUint::from(n), BigUint::from(i - 1));
            total += ways * recurse(&left, placement, memo) * recurse(&right, placement, memo);
        }
        memo.insert(u.clone(), total.clone());
        total
    }
    recurse(u, placement, &mut HashMap::new())
}

/// Exact probability that complement tandem duplication from seed 0
/// produces 01u after |u|+1 steps: |signature class of u| / (|u|+1)!.
pub fn prob_tandem_complement(u: &Word) -> BigRational {
    let n = u.len() as u64 + 1;
    BigRational::new(
        BigInt::from(count_signature_dp(u)),
        BigInt::from(factorial(n)),
    )
}

fn require_complement_tandem_seed0(spec: &ModelSpec) -> Result<()> {
    let seed_is_zero = spec.seed.len() == 1 && !spec.seed.get(0);
    if spec.rule != Rule::Tandem
        || spec.noise.delta0 != 1.0
        || spec.noise.delta1 != 1.0
        || !seed_is_zero
    {
        return Err(Error::UnsupportedSpec(
            "history permutations require tandem duplication with noise (1, 1) and seed 0".into(),
        ));
    }
    Ok(())
}

/// Encodes a complement-tandem history (seed 0) as the permutation that
/// records, in final string order, the turn at which each symbol was
/// created. The seed symbol is dropped.
pub fn history_permutation(spec: &ModelSpec, history: &History) -> Result<Permutation> {
    require_complement_tandem_seed0(spec)?;
    // replay validates positions and bit consistency
    crate::models::replay(&spec.seed, spec.rule, history)?;
    let mut labels = vec![0usize];
    for (turn, record) in history.steps.iter().enumerate() {
        labels.insert(record.insert_position - 1, turn + 1);
    }
    Permutation::new(labels[1..].to_vec())
}

/// Inverse of [`history_permutation`]: rebuilds the unique history whose
/// permutation is `pi`.
pub fn history_from_permutation(pi: &Permutation) -> Result<History> {
    let n = pi.len();
    // final_position[label] = index of that label in the final string
    let mut final_position = vec![0usize; n + 1];
    for (idx, &label) in pi.values().iter().enumerate() {
        final_position[label] = idx + 1;
    }
    let mut word: Word = "0".parse().expect("literal");
    let mut present = vec![0usize]; // final positions of labels placed so far
    let mut steps = Vec::with_capacity(n);
    for turn in 1..=n {
        let pos = final_position[turn];
        let rank = present.partition_point(|&p| p < pos);
        debug_assert!(rank >= 1, "seed label precedes every insertion");
        present.insert(rank, pos);
        let source_bit = word.get(rank - 1);
        let record = StepRecord {
            source_position: rank,
            source_bit,
            output_bit: !source_bit,
            insert_position: rank + 1,
        };
        word.insert(rank, !source_bit);
        steps.push(record);
    }
    Ok(History { steps })
}

/// Exact block entropy (bits) of the length-m signature of a uniform
/// permutation, plus the conditional increment over the previous block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntropy {
    pub block_len: usize,
    pub entropy_bits: f64,
    /// entropy_bits minus the previous block's entropy; an upper bound on
    /// the complement-tandem capacity, nonincreasing in block_len.
    pub conditional_bits: f64,
}

/// Signature counts by the same dynamic program as [`count_signature_dp`],
/// on machine words: valid while (len+1)! fits in u128 (len <= 32).
fn signature_count_u128(bits: u64, len: usize) -> u128 {
    debug_assert!(len <= 32);
    let m = len + 1;
    let mut ranks = [0u128; 33];
    let mut prefix = [0u128; 34];
    ranks[0] = 1;
    let mut width = 1;
    for i in 2..=m {
        let ascent = bits >> (i - 2) & 1 == 1;
        prefix[0] = 0;
        for k in 0..width {
            prefix[k + 1] = prefix[k] + ranks[k];
        }
        let total = prefix[width];
        for j in 1..=i {
            ranks[j - 1] = if ascent {
                prefix[j - 1]
            } else {
                total - prefix[j - 1]
            };
        }
        width = i;
    }
    ranks[..width].iter().sum()
}

/// Sum of c * log2(c) over all signatures of length `m`, where c is the
/// signature count; chunked so the reduction order is fixed regardless of
/// thread count.
fn sum_count_log(m: usize) -> f64 {
    let total = 1u64 << m;
    let chunk = 1u64 << 12;
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let partial = |start: u64| -> f64 {
        let mut acc = 0.0;
        for bits in start..total.min(start + chunk) {
            let c = signature_count_u128(bits, m) as f64;
            acc += c * c.log2();
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = {
        use rayon::prelude::*;
        starts.par_iter().map(|&s| partial(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = starts.iter().map(|&s| partial(s)).collect();
    partials.iter().sum()
}

fn block_entropy_bits(m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    // H = log2((m+1)!) - sum(c log2 c) / (m+1)!
    let log_fact: f64 = (1..=m as u64 + 1).map(|i| (i as f64).log2()).sum();
    let fact = factorial(m as u64 + 1).to_f64().expect("fits in f64 range");
    log_fact - sum_count_log(m) / fact
}

/// Exact signature block entropies for block lengths 1..=m_max, with the
/// conditional increments that upper-bound the complement-tandem capacity.
pub fn signature_block_entropies(m_max: usize) -> Result<Vec<BlockEntropy>> {
    if m_max < 1 || m_max > MAX_SIGNATURE_BLOCK {
        return Err(Error::BudgetExceeded {
            projected: 1u128 << m_max.min(127),
            budget: 1u128 << MAX_SIGNATURE_BLOCK,
        });
    }
    let mut rows = Vec::with_capacity(m_max);
    let mut previous = 0.0;
    for m in 1..=m_max {
        let entropy = block_entropy_bits(m);
        rows.push(BlockEntropy {
            block_len: m,
            entropy_bits: entropy,
            conditional_bits: entropy - previous,
        });
        previous = entropy;
    }
    Ok(rows)
}

/// Upper bound on the complement-tandem capacity from the order-k
/// conditional entropy of the stationary signature process:
/// H(block k+1) - H(block k).
pub fn markov_upper_bound(k: usize) -> Result<CapacityValue> {
    if k < 1 || k + 1 > MAX_SIGNATURE_BLOCK {
        return Err(Error::BudgetExceeded {
            projected: 1u128 << (k + 1).min(127),
            budget: 1u128 << MAX_SIGNATURE_BLOCK,
        });
    }
    let value = block_entropy_bits(k + 1) - block_entropy_bits(k);
    Ok(CapacityValue {
        value,
        kind: CapacityKind::UpperBound,
        source: format!("order-{k} signature conditional entropy"),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NoiseParams, RngStream};
    use itertools::Itertools;
    use std::collections::{BTreeMap, HashSet};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn perm(values: &[usize]) -> Permutation {
        Permutation::new(values.to_vec()).unwrap()
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![3, 1, 2]).is_ok());
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![]).is_ok());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&perm(&[3, 1, 2])), w("01"));
        assert_eq!(signature(&Permutation::identity(5)), w("1111"));
        assert_eq!(signature(&perm(&[4, 3, 2, 1])), w("000"));
        assert_eq!(signature(&perm(&[1])), Word::empty());
    }

    #[test]
    fn transition_set_examples() {
        let (t, u) = transition_sets(&w("0011010"));
        assert_eq!(t, vec![1, 5, 7]);
        assert_eq!(u, vec![3, 6, 8]);
        let (t, u) = transition_sets(&Word::empty());
        assert_eq!(t, vec![1]);
        assert_eq!(u, vec![1]);
        let (t, u) = transition_sets(&w("0"));
        assert_eq!(t, vec![1]);
        assert_eq!(u, vec![2]);
    }

    #[test]
    fn signature_count_small_cases() {
        assert_eq!(count_signature_dp(&Word::empty()), BigUint::one());
        let expect = [("00", 1u32), ("01", 2), ("10", 2), ("11", 1)];
        for (u, count) in expect {
            assert_eq!(count_signature_dp(&w(u)), count.into());
        }
    }

    fn brute_force_counts(m: usize) -> BTreeMap<Word, u64> {
        let mut counts = BTreeMap::new();
        for values in (1..=m).permutations(m) {
            let sig = signature(&Permutation::new(values).unwrap());
            *counts.entry(sig).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn counting_routes_agree_with_brute_force() {
        for m in 1..=8 {
            let brute = brute_force_counts(m);
            for (sig, count) in brute {
                let expect = BigUint::from(count);
                assert_eq!(count_signature_dp(&sig), expect, "dp at {sig}");
                assert_eq!(
                    count_signature_recursion(&sig, Placement::Max),
                    expect,
                    "max recursion at {sig}"
                );
                assert_eq!(
                    count_signature_recursion(&sig, Placement::Min),
                    expect,
                    "min recursion at {sig}"
                );
            }
        }
    }

    #[test]
    fn counts_sum_to_factorial() {
        for m in 1usize..=12 {
            let mut total = BigUint::zero();
            for bits in 0u64..(1 << (m - 1)) {
                let sig = Word::from_bits((0..m - 1).map(|i| bits >> i & 1 == 1));
                total += count_signature_dp(&sig);
            }
            assert_eq!(total, factorial(m as u64), "sum over signatures of S_{m}");
        }
    }

    #[test]
    fn u128_fast_path_matches_dp() {
        for len in 0usize..=10 {
            for bits in 0u64..(1u64 << len) {
                let sig = Word::from_bits((0..len).map(|i| bits >> i & 1 == 1));
                assert_eq!(
                    BigUint::from(signature_count_u128(bits, len)),
                    count_signature_dp(&sig)
                );
            }
        }
    }

    #[test]
    fn tandem_complement_word_probability() {
        assert_eq!(prob_tandem_complement(&Word::empty()), BigRational::one());
        assert_eq!(
            prob_tandem_complement(&w("01")),
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
        for n in 1..=10usize {
            let mut total = BigRational::zero();
            for bits in 0u64..(1 << (n - 1)) {
                let sig = Word::from_bits((0..n - 1).map(|i| bits >> i & 1 == 1));
                total += prob_tandem_complement(&sig);
            }
            assert_eq!(total, BigRational::one());
        }
    }

    fn complement_tandem_spec() -> ModelSpec {
        ModelSpec::new(
            Rule::Tandem,
            NoiseParams::new(1.0, 1.0).unwrap(),
            w("0"),
        )
        .unwrap()
    }

    #[test]
    fn paper_history_maps_to_312() {
        let history = History {
            steps: vec![
                StepRecord {
                    source_position: 1,
                    source_bit: false,
                    output_bit: true,
                    insert_position: 2,
                },
                StepRecord {
                    source_position: 2,
                    source_bit: true,
                    output_bit: false,
                    insert_position: 3,
                },
                StepRecord {
                    source_position: 1,
                    source_bit: false,
                    output_bit: true,
                    insert_position: 2,
                },
            ],
        };
        let pi = history_permutation(&complement_tandem_spec(), &history).unwrap();
        assert_eq!(pi, perm(&[3, 1, 2]));
        let back = history_from_permutation(&pi).unwrap();
        assert_eq!(back, history);
    }

    #[test]
    fn single_step_history_is_identity() {
        let spec = complement_tandem_spec();
        let mut rng = RngStream::new(1, 0);
        let (_, history) = crate::models::run(&spec, 1, &mut rng).unwrap();
        let pi = history_permutation(&spec, &history).unwrap();
        assert_eq!(pi, perm(&[1]));
    }

    #[test]
    fn bijection_round_trip_over_all_permutations() {
        let spec = complement_tandem_spec();
        for n in 0..=7usize {
            let mut seen = HashSet::new();
            for values in (1..=n).permutations(n) {
                let pi = Permutation::new(values).unwrap();
                let history = history_from_permutation(&pi).unwrap();
                // round trip is the identity
                assert_eq!(history_permutation(&spec, &history).unwrap(), pi);
                // distinct permutations yield distinct histories
                assert!(seen.insert(history.steps.clone()));
                // the reconstructed history replays to the word 01-something
                let word = crate::models::replay(&spec.seed, Rule::Tandem, &history).unwrap();
                assert_eq!(word.len(), n + 1);
                if n >= 1 {
                    assert!(word.starts_with(&w("01")));
                }
            }
        }
    }

    #[test]
    fn history_permutation_rejects_other_specs() {
        let spec = ModelSpec::new(
            Rule::End,
            NoiseParams::new(1.0, 1.0).unwrap(),
            w("0"),
        )
        .unwrap();
        let history = History::default();
        assert!(matches!(
            history_permutation(&spec, &history),
            Err(Error::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn seed_complement_symmetry_of_counts() {
        // histories from seed 1 producing 10u mirror those from seed 0
        // producing 01(complement of u); both match the signature count
        let spec = complement_tandem_spec();
        for n in 1..=8usize {
            let mut by_word: BTreeMap<Word, u64> = BTreeMap::new();
            for values in (1..=n).permutations(n) {
                let history = history_from_permutation(&Permutation::new(values).unwrap()).unwrap();
                let word = crate::models::replay(&spec.seed, Rule::Tandem, &history).unwrap();
                *by_word.entry(word).or_insert(0) += 1;
            }
            for (word, count) in by_word {
                let u = word.suffix(2);
                let complement = Word::from_bits(u.iter().map(|b| !b));
                assert_eq!(BigUint::from(count), count_signature_dp(&u));
                assert_eq!(count_signature_dp(&u), count_signature_dp(&complement));
            }
        }
    }

    #[test]
    fn block_entropy_known_values() {
        let rows = signature_block_entropies(3).unwrap();
        assert!((rows[0].entropy_bits - 1.0).abs() < 1e-12);
        assert!((rows[0].conditional_bits - 1.0).abs() < 1e-12);
        // order-1 conditional entropy is H2(1/3)
        let h13 = crate::info::binary_entropy(1.0 / 3.0).unwrap();
        assert!((rows[1].conditional_bits - h13).abs() < 1e-12);
        // block-3 law is (1,3,5,3,3,5,3,1)/24
        let expect: Vec<u32> = vec![1, 3, 5, 3, 3, 5, 3, 1];
        for (bits, count) in expect.iter().enumerate() {
            let sig = Word::from_bits((0..3).map(|i| bits >> (2 - i) & 1 == 1));
            assert_eq!(count_signature_dp(&sig), (*count).into());
        }
    }

    #[test]
    fn markov_bound_reproduces_closed_forms() {
        let h13 = crate::info::binary_entropy(1.0 / 3.0).unwrap();
        assert!((markov_upper_bound(1).unwrap().value - h13).abs() < 1e-12);
        let refined = crate::info::binary_entropy(0.25).unwrap() / 3.0
            + 2.0 * crate::info::binary_entropy(0.375).unwrap() / 3.0;
        assert!((markov_upper_bound(2).unwrap().value - refined).abs() < 1e-12);
        assert!(markov_upper_bound(0).is_err());
        assert!(markov_upper_bound(MAX_SIGNATURE_BLOCK).is_err());
    }
}
