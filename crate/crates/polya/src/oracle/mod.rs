//! Exact small-instance ground truth.
//!
//! Everything here is computed in exact rational arithmetic over
//! arbitrary-precision integers: full history enumeration, the closed-form
//! probability identities, and the permutation/signature combinatorics in
//! [`permutation`]. Noise parameters enter as exact rationals, never floats.

mod permutation;

pub use permutation::{
    count_signature_dp, count_signature_recursion, history_from_permutation, history_permutation,
    markov_upper_bound, prob_tandem_complement, signature, signature_block_entropies,
    transition_sets, BlockEntropy, Permutation, Placement, MAX_SIGNATURE_BLOCK,
};

use std::collections::BTreeMap;
use std::io::{self, Write};

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::models::{ModelSpec, NoiseParams, Rule};
use crate::word::Word;

/// Default cap on the projected number of histories an enumeration may
/// expand. Deeper horizons need an explicit budget.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

/// Exact-rational channel noise for enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactNoise {
    delta0: BigRational,
    delta1: BigRational,
}

impl ExactNoise {
    pub fn new(delta0: BigRational, delta1: BigRational) -> Result<Self> {
        for (name, v) in [("delta0", &delta0), ("delta1", &delta1)] {
            if v.is_negative() || *v > BigRational::one() {
                return Err(Error::Domain {
                    argument: name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                    domain: "[0, 1]",
                });
            }
        }
        Ok(ExactNoise { delta0, delta1 })
    }

    /// Convenience constructor from (numerator, denominator) pairs.
    pub fn from_ratios(d0: (u64, u64), d1: (u64, u64)) -> Result<Self> {
        let ratio = |(n, d): (u64, u64)| BigRational::new(BigInt::from(n), BigInt::from(d));
        ExactNoise::new(ratio(d0), ratio(d1))
    }

    /// Both parameters zero: the noiseless channel.
    pub fn noiseless() -> Self {
        ExactNoise {
            delta0: BigRational::zero(),
            delta1: BigRational::zero(),
        }
    }

    /// Both parameters one: the complementing channel.
    pub fn complementing() -> Self {
        ExactNoise {
            delta0: BigRational::one(),
            delta1: BigRational::one(),
        }
    }

    pub fn delta0(&self) -> &BigRational {
        &self.delta0
    }

    pub fn delta1(&self) -> &BigRational {
        &self.delta1
    }

    fn flip_prob(&self, a: bool) -> &BigRational {
        if a {
            &self.delta1
        } else {
            &self.delta0
        }
    }

    /// Floating-point view, for handing to the simulation modules.
    pub fn to_float(&self) -> NoiseParams {
        NoiseParams::new(
            self.delta0.to_f64().unwrap(),
            self.delta1.to_f64().unwrap(),
        )
        .expect("rational noise is in [0, 1]")
    }
}

/// A model whose noise is exact, suitable for enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpec {
    pub rule: Rule,
    pub noise: ExactNoise,
    pub seed: Word,
}

impl ExactSpec {
    pub fn new(rule: Rule, noise: ExactNoise, seed: Word) -> Result<Self> {
        if seed.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(ExactSpec { rule, noise, seed })
    }

    pub fn to_model_spec(&self) -> ModelSpec {
        ModelSpec {
            rule: self.rule,
            noise: self.noise.to_float(),
            seed: self.seed.clone(),
        }
    }
}

/// Exact distribution of the word after a fixed number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDist {
    spec: ExactSpec,
    horizon: usize,
    probs: BTreeMap<Word, BigRational>,
}

impl ExactDist {
    pub fn spec(&self) -> &ExactSpec {
        &self.spec
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn probs(&self) -> &BTreeMap<Word, BigRational> {
        &self.probs
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Probability of `word`; zero if outside the support.
    pub fn prob_of(&self, word: &Word) -> BigRational {
        self.probs.get(word).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Exact sum of all probabilities (equals one for a valid distribution).
    pub fn total_mass(&self) -> BigRational {
        self.probs.values().sum()
    }

    /// Entropy in bits, evaluated in floating point from the exact
    /// probabilities.
    pub fn entropy_bits(&self) -> f64 {
        self.probs
            .values()
            .map(|p| {
                let pf = p.to_f64().expect("probability fits in f64");
                if pf > 0.0 {
                    -pf * pf.log2()
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Exact distribution of the total zero count of the word.
    pub fn marginal_zero_counts(&self) -> BTreeMap<u64, BigRational> {
        let mut marginal: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (word, p) in &self.probs {
            *marginal
                .entry(word.count(false) as u64)
                .or_insert_with(BigRational::zero) += p;
        }
        marginal
    }

    /// Canonical text form: one `<word> <numerator>/<denominator>` line per
    /// word, sorted lexicographically.
    pub fn write_canonical<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (word, p) in &self.probs {
            writeln!(out, "{} {}/{}", word, p.numer(), p.denom())?;
        }
        Ok(())
    }

    pub fn to_canonical_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_canonical(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("canonical form is ASCII")
    }
}

/// Projected number of histories for a run of `n` steps, the quantity the
/// enumeration budget limits: each step branches |w|*2 ways (times |w|+1
/// for interspersed insertion).
pub fn projected_history_count(spec: &ExactSpec, n: usize) -> u128 {
    let mut projected: u128 = 1;
    for k in 0..n {
        let len = (spec.seed.len() + k) as u128;
        let branch = match spec.rule {
            Rule::End | Rule::Tandem => len.saturating_mul(2),
            Rule::Interspersed => len.saturating_mul(2).saturating_mul(len + 1),
        };
        projected = projected.saturating_mul(branch);
    }
    projected
}

/// Exact distribution after `n` steps, under the default budget.
pub fn enumerate_distribution(spec: &ExactSpec, n: usize) -> Result<ExactDist> {
    enumerate_distribution_with_budget(spec, n, DEFAULT_ENUMERATION_BUDGET)
}

/// Exact distribution after `n` steps.
///
/// Identical words are merged at every level, so memory tracks the number
/// of distinct words rather than histories; the budget still guards the
/// worst case via [`projected_history_count`].
pub fn enumerate_distribution_with_budget(
    spec: &ExactSpec,
    n: usize,
    budget: u128,
) -> Result<ExactDist> {
    let projected = projected_history_count(spec, n);
    if projected > budget {
        return Err(Error::BudgetExceeded { projected, budget });
    }

    let mut level: BTreeMap<Word, BigRational> = BTreeMap::new();
    level.insert(spec.seed.clone(), BigRational::one());

    for _ in 0..n {
        let mut next: BTreeMap<Word, BigRational> = BTreeMap::new();
        let mut add = |word: Word, p: BigRational| {
            *next.entry(word).or_insert_with(BigRational::zero) += p;
        };
        for (word, p) in &level {
            let len = word.len();
            let per_position = p / BigInt::from(len);
            for pos in 1..=len {
                let a = word.get(pos - 1);
                let flip = spec.noise.flip_prob(a);
                let branches = [
                    (a, BigRational::one() - flip),
                    (!a, flip.clone()),
                ];
                for (b, weight) in branches {
                    if weight.is_zero() {
                        continue;
                    }
                    let p_branch = &per_position * weight;
                    match spec.rule {
                        Rule::End => {
                            let mut w = word.clone();
                            w.push(b);
                            add(w, p_branch);
                        }
                        Rule::Tandem => {
                            let mut w = word.clone();
                            w.insert(pos, b);
                            add(w, p_branch);
                        }
                        Rule::Interspersed => {
                            let per_insert = &p_branch / BigInt::from(len + 1);
                            for insert in 0..=len {
                                let mut w = word.clone();
                                w.insert(insert, b);
                                add(w, per_insert.clone());
                            }
                        }
                    }
                }
            }
        }
        level = next;
    }

    Ok(ExactDist {
        spec: spec.clone(),
        horizon: n,
        probs: level,
    })
}

/// n! as an arbitrary-precision integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Exact probability that noiseless end duplication from a seed with
/// counts (t0, t1) produces a fixed suffix containing k0 zeros and k1
/// ones: the probability depends on the suffix only through its counts.
pub fn prob_end_noiseless(t0: u64, t1: u64, k0: u64, k1: u64) -> Result<BigRational> {
    if t0 < 1 || t1 < 1 {
        return Err(Error::Domain {
            argument: "t0, t1",
            value: t0.min(t1) as f64,
            domain: "integers >= 1",
        });
    }
    let numer = factorial(t0 + t1 - 1) * factorial(t0 + k0 - 1) * factorial(t1 + k1 - 1);
    let denom = factorial(t0 - 1) * factorial(t1 - 1) * factorial(t0 + t1 + k0 + k1 - 1);
    Ok(BigRational::new(numer.into(), denom.into()))
}

/// Exact probability that exactly `k0` of the `n` mutation-generated bits
/// are zeros, under noiseless end duplication: C(n, k0) f(t0, t1, k0, n-k0).
pub fn prob_class_ak0(n: u64, k0: u64, t0: u64, t1: u64) -> Result<BigRational> {
    if k0 > n {
        return Err(Error::Domain {
            argument: "k0",
            value: k0 as f64,
            domain: "[0, n]",
        });
    }
    let choose = num::integer::binomial(BigUint::from(n), BigUint::from(k0));
    Ok(BigRational::from(BigInt::from(choose)) * prob_end_noiseless(t0, t1, k0, n - k0)?)
}

/// Number of seed-order-preserving generation-order permutations after `n`
/// interspersed steps: (n + seed_len)! / seed_len!.
pub fn interspersed_perm_count(n: u64, seed_len: u64) -> BigUint {
    factorial(n + seed_len) / factorial(seed_len)
}

/// Probability of each generation-order permutation after `n` interspersed
/// steps: seed_len! / (n + seed_len)!.
pub fn interspersed_perm_prob(n: u64, seed_len: u64) -> BigRational {
    BigRational::new(
        BigInt::from(factorial(seed_len)),
        BigInt::from(factorial(n + seed_len)),
    )
}

/// Bounds on the number of generation-order permutations mapped to one
/// word by interspersed duplication: k0! k1! <= |class| <= (t0+k0)!(t1+k1)!.
pub fn equivalence_class_bounds(t0: u64, t1: u64, k0: u64, k1: u64) -> (BigUint, BigUint) {
    (
        factorial(k0) * factorial(k1),
        factorial(t0 + k0) * factorial(t1 + k1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::SymbolCounts;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn spec(rule: Rule, noise: ExactNoise, seed: &str) -> ExactSpec {
        ExactSpec::new(rule, noise, w(seed)).unwrap()
    }

    #[test]
    fn zero_steps_is_point_mass() {
        let dist =
            enumerate_distribution(&spec(Rule::End, ExactNoise::noiseless(), "0011"), 0).unwrap();
        assert_eq!(dist.support_size(), 1);
        assert_eq!(dist.prob_of(&w("0011")), BigRational::one());
        assert_eq!(dist.entropy_bits(), 0.0);
    }

    #[test]
    fn end_complement_seed01_probabilities() {
        let dist =
            enumerate_distribution(&spec(Rule::End, ExactNoise::complementing(), "01"), 3).unwrap();
        assert_eq!(dist.prob_of(&w("01110")), rational(1, 8));
        assert_eq!(dist.prob_of(&w("01011")), rational(1, 6));
        assert_eq!(dist.total_mass(), BigRational::one());
    }

    #[test]
    fn tandem_complement_tree_levels() {
        let model = spec(Rule::Tandem, ExactNoise::complementing(), "0");
        let level2 = enumerate_distribution(&model, 2).unwrap();
        assert_eq!(level2.prob_of(&w("010")), rational(1, 2));
        assert_eq!(level2.prob_of(&w("011")), rational(1, 2));
        assert!((level2.entropy_bits() - 1.0).abs() < 1e-12);

        let level3 = enumerate_distribution(&model, 3).unwrap();
        assert_eq!(
            level3.prob_of(&w("0101")),
            rational(2, 1) * level3.prob_of(&w("0100"))
        );
    }

    #[test]
    fn interspersed_two_symbol_exact_law() {
        let dist =
            enumerate_distribution(&spec(Rule::Interspersed, ExactNoise::noiseless(), "01"), 1)
                .unwrap();
        assert_eq!(dist.prob_of(&w("001")), rational(1, 3));
        assert_eq!(dist.prob_of(&w("011")), rational(1, 3));
        assert_eq!(dist.prob_of(&w("010")), rational(1, 6));
        assert_eq!(dist.prob_of(&w("101")), rational(1, 6));
    }

    #[test]
    fn budget_guard_rejects_deep_runs() {
        let model = spec(Rule::Interspersed, ExactNoise::noiseless(), "01");
        assert!(matches!(
            enumerate_distribution(&model, 6),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(enumerate_distribution_with_budget(&model, 6, 1 << 40).is_ok());
    }

    #[test]
    fn canonical_serialization_golden() {
        let dist =
            enumerate_distribution(&spec(Rule::Tandem, ExactNoise::complementing(), "0"), 3)
                .unwrap();
        let expect = "0100 1/6\n0101 1/3\n0110 1/3\n0111 1/6\n";
        assert_eq!(dist.to_canonical_string(), expect);
    }

    #[test]
    fn end_noiseless_probability_formula() {
        assert_eq!(prob_end_noiseless(1, 1, 0, 0).unwrap(), BigRational::one());
        assert_eq!(prob_end_noiseless(1, 1, 1, 0).unwrap(), rational(1, 2));
        assert_eq!(prob_end_noiseless(1, 1, 2, 1).unwrap(), rational(1, 12));
        assert!(prob_end_noiseless(0, 1, 1, 1).is_err());
    }

    #[test]
    fn class_probabilities_uniform_for_single_pair_seed() {
        for n in 0..=6u64 {
            for k0 in 0..=n {
                assert_eq!(
                    prob_class_ak0(n, k0, 1, 1).unwrap(),
                    rational(1, n as i64 + 1)
                );
            }
        }
        assert!(prob_class_ak0(3, 4, 1, 1).is_err());
    }

    #[test]
    fn class_probabilities_match_enumeration() {
        let seed = "011";
        let counts = SymbolCounts::of(&w(seed));
        let n = 4;
        let dist =
            enumerate_distribution(&spec(Rule::End, ExactNoise::noiseless(), seed), n).unwrap();
        let marginal = dist.marginal_zero_counts();
        for k0 in 0..=n as u64 {
            let mass = marginal
                .get(&(counts.zeros + k0))
                .cloned()
                .unwrap_or_else(BigRational::zero);
            assert_eq!(mass, prob_class_ak0(n as u64, k0, counts.zeros, counts.ones).unwrap());
        }
    }

    #[test]
    fn interspersed_permutation_counts() {
        assert_eq!(interspersed_perm_prob(0, 3), BigRational::one());
        assert_eq!(interspersed_perm_prob(2, 4), rational(1, 30));
        let total = BigRational::from(BigInt::from(interspersed_perm_count(5, 2)))
            * interspersed_perm_prob(5, 2);
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn equivalence_bounds_examples() {
        assert_eq!(
            equivalence_class_bounds(2, 3, 0, 0),
            (BigUint::one(), BigUint::from(12u32))
        );
        assert_eq!(
            equivalence_class_bounds(1, 1, 1, 1),
            (BigUint::one(), BigUint::from(4u32))
        );
    }

    #[test]
    fn noise_validation() {
        assert!(ExactNoise::from_ratios((3, 10), (1, 10)).is_ok());
        assert!(ExactNoise::from_ratios((11, 10), (0, 1)).is_err());
        let noise = ExactNoise::from_ratios((3, 10), (1, 10)).unwrap();
        let float = noise.to_float();
        assert_eq!(float.delta0, 0.3);
        assert_eq!(float.delta1, 0.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn enumerated_mass_is_exactly_one(
            rule_idx in 0usize..3,
            n in 0usize..4,
            d0_num in 0u64..=4,
            d1_num in 0u64..=4,
        ) {
            let rule = [Rule::End, Rule::Tandem, Rule::Interspersed][rule_idx];
            let noise = ExactNoise::from_ratios((d0_num, 4), (d1_num, 4)).unwrap();
            let dist = enumerate_distribution(&spec(rule, noise, "01"), n).unwrap();
            prop_assert_eq!(dist.total_mass(), BigRational::one());
            for word in dist.probs().keys() {
                prop_assert_eq!(word.len(), 2 + n);
            }
        }
    }
}
