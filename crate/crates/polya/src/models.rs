//! The three stochastic duplication rules and trajectory runners.
//!
//! A step picks a uniformly random source position, feeds the symbol there
//! through an asymmetric binary channel, and inserts the (possibly flipped)
//! duplicate at the end of the word, right after the source, or at an
//! independent uniform position. Positions throughout are 1-based, and the
//! draw order within a step is fixed: source position, then channel
//! outcome, then (interspersed only) insert position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::word::{pair_index, PairCounts, SymbolCounts, Word};

/// Where the duplicate symbol is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Appended at the end of the word.
    End,
    /// Inserted immediately after the source symbol.
    Tandem,
    /// Inserted at an independent uniform position.
    Interspersed,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::End => "end",
            Rule::Tandem => "tandem",
            Rule::Interspersed => "int",
        }
    }
}

/// Per-symbol complement probabilities of the duplication channel:
/// a duplicated 0 flips with probability `delta0`, a 1 with `delta1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub delta0: f64,
    pub delta1: f64,
}

impl NoiseParams {
    pub fn new(delta0: f64, delta1: f64) -> Result<Self> {
        for (name, v) in [("delta0", delta0), ("delta1", delta1)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::Domain {
                    argument: name,
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        Ok(NoiseParams { delta0, delta1 })
    }

    /// Flip probability for source bit `a`.
    pub fn flip_prob(&self, a: bool) -> f64 {
        if a {
            self.delta1
        } else {
            self.delta0
        }
    }

    /// True when both parameters are zero (no noisy-channel equilibrium).
    pub fn is_degenerate(&self) -> bool {
        self.delta0 == 0.0 && self.delta1 == 0.0
    }
}

/// A fully specified string model: rule, channel noise, and seed string.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub rule: Rule,
    pub noise: NoiseParams,
    pub seed: Word,
}

impl ModelSpec {
    /// Seed must be nonempty.
    pub fn new(rule: Rule, noise: NoiseParams, seed: Word) -> Result<Self> {
        if seed.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(ModelSpec { rule, noise, seed })
    }
}

/// The random choices of one mutation step.
///
/// `source_position` is the 1-based position of the duplicated symbol in
/// the pre-step word; `insert_position` is the 1-based position the new
/// symbol occupies in the post-step word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub source_position: usize,
    pub source_bit: bool,
    pub output_bit: bool,
    pub insert_position: usize,
}

/// Ordered log of step records; replaying it reproduces the trajectory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct History {
    pub steps: Vec<StepRecord>,
}

impl History {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Deterministic pseudo-random stream keyed by (master seed, trial index).
///
/// Streams with distinct trial indices are independent, so trials can run
/// on any number of threads and still draw identical sequences.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial_index);
        RngStream { rng }
    }

    /// Uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }

    /// Uniform 1-based position in [1, n]. Panics if n = 0.
    pub fn position(&mut self, n: usize) -> usize {
        self.rng.gen_range(1..=n)
    }
}

/// Passes bit `a` through the duplication channel: complemented with
/// probability `noise.flip_prob(a)`, unchanged otherwise.
pub fn duplicate_channel(a: bool, noise: &NoiseParams, rng: &mut RngStream) -> bool {
    if rng.uniform() < noise.flip_prob(a) {
        !a
    } else {
        a
    }
}

/// One end-duplication step: duplicate a random symbol to the end.
pub fn step_end(mut w: Word, noise: &NoiseParams, rng: &mut RngStream) -> Result<(Word, StepRecord)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let pos = rng.position(w.len());
    let a = w.get(pos - 1);
    let b = duplicate_channel(a, noise, rng);
    w.push(b);
    let record = StepRecord {
        source_position: pos,
        source_bit: a,
        output_bit: b,
        insert_position: w.len(),
    };
    Ok((w, record))
}

/// One tandem-duplication step: duplicate a random symbol right after it.
pub fn step_tandem(
    mut w: Word,
    noise: &NoiseParams,
    rng: &mut RngStream,
) -> Result<(Word, StepRecord)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let pos = rng.position(w.len());
    let a = w.get(pos - 1);
    let b = duplicate_channel(a, noise, rng);
    w.insert(pos, b);
    let record = StepRecord {
        source_position: pos,
        source_bit: a,
        output_bit: b,
        insert_position: pos + 1,
    };
    Ok((w, record))
}

/// One interspersed-duplication step: duplicate a random symbol to an
/// independently chosen uniform position.
pub fn step_interspersed(
    mut w: Word,
    noise: &NoiseParams,
    rng: &mut RngStream,
) -> Result<(Word, StepRecord)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let pos = rng.position(w.len());
    let a = w.get(pos - 1);
    let b = duplicate_channel(a, noise, rng);
    let insert = rng.position(w.len() + 1);
    w.insert(insert - 1, b);
    let record = StepRecord {
        source_position: pos,
        source_bit: a,
        output_bit: b,
        insert_position: insert,
    };
    Ok((w, record))
}

fn step(rule: Rule, w: Word, noise: &NoiseParams, rng: &mut RngStream) -> Result<(Word, StepRecord)> {
    match rule {
        Rule::End => step_end(w, noise, rng),
        Rule::Tandem => step_tandem(w, noise, rng),
        Rule::Interspersed => step_interspersed(w, noise, rng),
    }
}

/// Runs `n` steps from the seed, logging every choice.
pub fn run(spec: &ModelSpec, n: usize, rng: &mut RngStream) -> Result<(Word, History)> {
    let mut w = spec.seed.clone();
    let mut history = History {
        steps: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let (next, record) = step(spec.rule, w, &spec.noise, rng)?;
        w = next;
        history.steps.push(record);
    }
    Ok((w, history))
}

/// Runs `n` steps without logging, for long trajectories where only the
/// final word matters.
pub fn run_word(spec: &ModelSpec, n: usize, rng: &mut RngStream) -> Result<Word> {
    let mut w = spec.seed.clone();
    for _ in 0..n {
        let (next, _) = step(spec.rule, w, &spec.noise, rng)?;
        w = next;
    }
    Ok(w)
}

/// Re-applies a logged history deterministically.
///
/// Errors if any record's positions fall outside the growing word, if the
/// recorded source bit disagrees with the word, or if the insert position
/// contradicts the rule.
pub fn replay(seed: &Word, rule: Rule, history: &History) -> Result<Word> {
    let mut w = seed.clone();
    for (step_no, rec) in history.steps.iter().enumerate() {
        let fail = |what: &str| {
            Err(Error::InvalidHistory(format!(
                "step {}: {} (word length {})",
                step_no + 1,
                what,
                w.len()
            )))
        };
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        if rec.source_position < 1 || rec.source_position > w.len() {
            return fail("source position out of range");
        }
        if w.get(rec.source_position - 1) != rec.source_bit {
            return fail("recorded source bit disagrees with the word");
        }
        let expected_insert = match rule {
            Rule::End => Some(w.len() + 1),
            Rule::Tandem => Some(rec.source_position + 1),
            Rule::Interspersed => None,
        };
        if let Some(expected) = expected_insert {
            if rec.insert_position != expected {
                return fail("insert position inconsistent with rule");
            }
        } else if rec.insert_position < 1 || rec.insert_position > w.len() + 1 {
            return fail("insert position out of range");
        }
        w.insert(rec.insert_position - 1, rec.output_bit);
    }
    Ok(w)
}

/// Runs `n` steps tracking only symbol counts (the urn fast path).
///
/// Valid for every rule: the law of the symbol counts depends only on the
/// counts themselves, not on the arrangement. `observe` is called with
/// (step index, counts) after every step, step 0 being the seed.
pub fn run_symbol_counts_observed(
    spec: &ModelSpec,
    n: usize,
    rng: &mut RngStream,
    mut observe: impl FnMut(usize, SymbolCounts),
) -> SymbolCounts {
    let mut counts = SymbolCounts::of(&spec.seed);
    observe(0, counts);
    for k in 1..=n {
        let len = counts.total() as usize;
        let pos = rng.position(len);
        let a = pos as u64 > counts.zeros;
        let b = duplicate_channel(a, &spec.noise, rng);
        if spec.rule == Rule::Interspersed {
            // consume the insert draw so the stream stays aligned with the
            // word-mode trajectory layout
            let _ = rng.position(len + 1);
        }
        if b {
            counts.ones += 1;
        } else {
            counts.zeros += 1;
        }
        observe(k, counts);
    }
    counts
}

/// Symbol counts after `n` steps, without per-step observation.
pub fn run_symbol_counts(spec: &ModelSpec, n: usize, rng: &mut RngStream) -> SymbolCounts {
    run_symbol_counts_observed(spec, n, rng, |_, _| {})
}

/// Runs `n` tandem steps tracking only cyclic pair counts.
///
/// A tandem step destroys one cyclic pair and creates two, and which pair
/// is hit depends only on the pair counts, so the counts form a Markov
/// chain of their own. Errors for the other rules, whose insertions break
/// pairs that the counts cannot identify.
pub fn run_pair_counts(spec: &ModelSpec, n: usize, rng: &mut RngStream) -> Result<PairCounts> {
    if spec.rule != Rule::Tandem {
        return Err(Error::RuleMismatch {
            expected: Rule::Tandem,
            got: spec.rule,
        });
    }
    let mut pairs = PairCounts::of(&spec.seed)?;
    for _ in 0..n {
        let len = pairs.total() as usize;
        let mut slot = rng.position(len) as u64;
        let mut chosen = 3;
        for (idx, &count) in pairs.counts.iter().enumerate() {
            if slot <= count {
                chosen = idx;
                break;
            }
            slot -= count;
        }
        let a = chosen & 0b10 != 0;
        let c = chosen & 0b01 != 0;
        let b = duplicate_channel(a, &spec.noise, rng);
        pairs.counts[chosen] -= 1;
        pairs.counts[pair_index(a, b)] += 1;
        pairs.counts[pair_index(b, c)] += 1;
    }
    Ok(pairs)
}
