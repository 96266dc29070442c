//! Closed-form capacities, bounds, and almost-sure limit values.
//!
//! Every value is wrapped in a [`CapacityValue`] carrying its epistemic
//! kind, so callers can never mistake a bound for an exact capacity.

use crate::error::{Error, Result};
use crate::info::{binary_entropy, harmonic, LOG2_E};
use crate::models::{NoiseParams, Rule};
use crate::word::{SymbolCounts, Word};

/// Epistemic status of a reported capacity number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityKind {
    Exact,
    UpperBound,
    LowerBound,
    Estimate,
}

impl CapacityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CapacityKind::Exact => "exact",
            CapacityKind::UpperBound => "upper-bound",
            CapacityKind::LowerBound => "lower-bound",
            CapacityKind::Estimate => "estimate",
        }
    }
}

/// A capacity (or bound) in bits per symbol, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityValue {
    pub value: f64,
    pub kind: CapacityKind,
    /// Human-readable description of the formula behind the number.
    pub source: String,
    /// Set when the inputs make the process trivial (single-symbol seed
    /// under a noiseless rule), so reports can call that out.
    pub degenerate: bool,
}

impl CapacityValue {
    fn new(value: f64, kind: CapacityKind, source: impl Into<String>) -> Self {
        debug_assert!((0.0..=1.0 + 1e-12).contains(&value));
        CapacityValue {
            value,
            kind,
            source: source.into(),
            degenerate: false,
        }
    }
}

impl std::fmt::Display for CapacityValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6} ({}; {})", self.value, self.kind.as_str(), self.source)
    }
}

/// Capacity of noiseless end duplication from a seed with `t0` zeros and
/// `t1` ones: (log2 e)/(t0+t1) ((t0+t1) H_{t0+t1} - t0 H_{t0} - t1 H_{t1}).
///
/// A seed of repeated symbols (t0 = 0 or t1 = 0) yields only repeated
/// symbols, hence exact capacity 0, flagged degenerate.
pub fn cap_end_noiseless(t0: u64, t1: u64) -> CapacityValue {
    if t0 == 0 || t1 == 0 {
        let mut v = CapacityValue::new(
            0.0,
            CapacityKind::Exact,
            "single-symbol seed reaches only repeated symbols",
        );
        v.degenerate = true;
        return v;
    }
    let total = t0 + t1;
    let value = LOG2_E / total as f64
        * (total as f64 * harmonic(total) - t0 as f64 * harmonic(t0) - t1 as f64 * harmonic(t1));
    CapacityValue::new(
        value,
        CapacityKind::Exact,
        format!("harmonic-number form of the Beta({t0},{t1})-weighted entropy integral"),
    )
}

/// Capacity of noisy end duplication: H2(delta1/(delta0+delta1)).
///
/// Errors on (0, 0), which has no noise equilibrium; use the seed-dependent
/// noiseless form there.
pub fn cap_end_noisy(noise: &NoiseParams) -> Result<CapacityValue> {
    let alpha = limiting_freq_end(noise)?;
    Ok(CapacityValue::new(
        binary_entropy(alpha)?,
        CapacityKind::Exact,
        "entropy of the limiting symbol frequency d1/(d0+d1)",
    ))
}

/// Capacity of interspersed duplication, which coincides with end
/// duplication for every noise setting.
pub fn cap_interspersed(noise: &NoiseParams, seed: &Word) -> Result<CapacityValue> {
    if seed.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut cap = if noise.is_degenerate() {
        let counts = SymbolCounts::of(seed);
        cap_end_noiseless(counts.zeros, counts.ones)
    } else {
        cap_end_noisy(noise)?
    };
    cap.source = format!("interspersed = end duplication capacity; {}", cap.source);
    Ok(cap)
}

/// Capacity of noiseless tandem duplication: exactly 0 (duplication never
/// creates runs, so only polynomially many strings are reachable).
pub fn cap_tandem_noiseless() -> CapacityValue {
    CapacityValue::new(
        0.0,
        CapacityKind::Exact,
        "run count is invariant, so reachable strings grow polynomially",
    )
}

/// Number of strings reachable by noiseless tandem duplication after `n`
/// steps from a seed with `r` runs: C(n+r-1, r-1) (n balls into r bins).
pub fn tandem_noiseless_support_size(runs: u64, n: u64) -> num::BigUint {
    num::integer::binomial(
        num::BigUint::from(n + runs - 1),
        num::BigUint::from(runs - 1),
    )
}

/// The three closed-form bounds for complement tandem duplication
/// (both noise parameters 1): lower, upper, and the refined upper bound.
pub fn cap_tandem_complement_bounds() -> (CapacityValue, CapacityValue, CapacityValue) {
    let lower = CapacityValue::new(
        (5.0 * LOG2_E - 2.0) / 6.0,
        CapacityKind::LowerBound,
        "two-sided conditioning integral (5 log2 e - 2)/6",
    );
    let upper = CapacityValue::new(
        binary_entropy(1.0 / 3.0).unwrap(),
        CapacityKind::UpperBound,
        "order-1 signature conditional entropy H2(1/3)",
    );
    let refined = CapacityValue::new(
        binary_entropy(0.25).unwrap() / 3.0 + 2.0 * binary_entropy(0.375).unwrap() / 3.0,
        CapacityKind::UpperBound,
        "order-2 signature conditional entropy (1/3)H2(1/4) + (2/3)H2(3/8)",
    );
    (lower, upper, refined)
}

/// Upper bound on noisy tandem-duplication capacity from the limiting
/// cyclic pair frequencies. Errors on noise (0, 0).
pub fn cap_tandem_noisy_upper(noise: &NoiseParams) -> Result<CapacityValue> {
    let z = limiting_pair_freqs_tandem(noise)?;
    Ok(CapacityValue::new(
        pair_freq_entropy_bound(&z),
        CapacityKind::UpperBound,
        "entropy bound from limiting cyclic pair frequencies",
    ))
}

/// Upper bound for the comparison system where tandem duplications and
/// substitutions occur independently: H2(2 delta / (1 + 3 delta)).
pub fn cap_tsb_upper(delta: f64) -> Result<CapacityValue> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain {
            argument: "delta",
            value: delta,
            domain: "(0, 1]",
        });
    }
    Ok(CapacityValue::new(
        binary_entropy(2.0 * delta / (1.0 + 3.0 * delta))?,
        CapacityKind::UpperBound,
        "duplication-substitution comparison bound H2(2d/(1+3d))",
    ))
}

/// Almost-sure limit of the zero frequency under noisy end duplication:
/// delta1/(delta0+delta1). Errors on noise (0, 0).
pub fn limiting_freq_end(noise: &NoiseParams) -> Result<f64> {
    if noise.is_degenerate() {
        return Err(Error::DegenerateNoise);
    }
    Ok(noise.delta1 / (noise.delta0 + noise.delta1))
}

/// Closed-form solution of the mean-drift equation for the zero frequency
/// under noisy end duplication, started from the seed's frequency:
/// z(t) = alpha + (z(0) - alpha) exp(-t (delta0+delta1)).
pub fn ode_solution_end(t: f64, noise: &NoiseParams, seed: &Word) -> Result<f64> {
    if seed.is_empty() {
        return Err(Error::EmptyWord);
    }
    if t < 0.0 {
        return Err(Error::Domain {
            argument: "t",
            value: t,
            domain: "[0, inf)",
        });
    }
    let alpha = limiting_freq_end(noise)?;
    let z0 = seed.freq(false)?;
    Ok(alpha + (z0 - alpha) * (-t * (noise.delta0 + noise.delta1)).exp())
}

/// Limiting cyclic pair frequencies, ordered (00, 01, 10, 11).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFreqVector {
    pub z00: f64,
    pub z01: f64,
    pub z10: f64,
    pub z11: f64,
}

impl PairFreqVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.z00, self.z01, self.z10, self.z11]
    }

    pub fn sum(&self) -> f64 {
        self.z00 + self.z01 + self.z10 + self.z11
    }
}

/// Drift matrix of the expected one-step change in cyclic pair counts
/// under noisy tandem duplication, rows and columns ordered
/// (00, 01, 10, 11). Every column sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix(pub [[f64; 4]; 4]);

impl PairMatrix {
    pub fn apply(&self, z: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn column_sums(&self) -> [f64; 4] {
        let mut sums = [0.0; 4];
        for row in &self.0 {
            for (j, v) in row.iter().enumerate() {
                sums[j] += v;
            }
        }
        sums
    }
}

/// The pair-count drift matrix A for noisy tandem duplication.
pub fn pair_matrix(noise: &NoiseParams) -> PairMatrix {
    let (d0, d1) = (noise.delta0, noise.delta1);
    PairMatrix([
        [-2.0 * d0, 1.0 - d0, d1, 0.0],
        [d0, -1.0, 0.0, d1],
        [d0, 0.0, -1.0, d1],
        [0.0, d0, 1.0 - d1, -2.0 * d1],
    ])
}

/// Almost-sure limit of the cyclic pair frequencies under noisy tandem
/// duplication. The closed form is checked against the null space of the
/// drift matrix at construction (residual <= 1e-12). Errors on (0, 0).
pub fn limiting_pair_freqs_tandem(noise: &NoiseParams) -> Result<PairFreqVector> {
    if noise.is_degenerate() {
        return Err(Error::DegenerateNoise);
    }
    let (d0, d1) = (noise.delta0, noise.delta1);
    let denom = (1.0 + d0 + d1) * (d0 + d1);
    let z = PairFreqVector {
        z00: (1.0 - d0 + d1) * d1 / denom,
        z01: 2.0 * d0 * d1 / denom,
        z10: 2.0 * d0 * d1 / denom,
        z11: (1.0 - d1 + d0) * d0 / denom,
    };
    let residual = pair_matrix(noise).apply(&z.as_array());
    let max_residual = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    debug_assert!(
        max_residual <= 1e-12,
        "closed-form pair limit leaves drift residual {max_residual}"
    );
    Ok(z)
}

/// Entropy upper bound for a process with limiting cyclic pair
/// frequencies `z`: -sum_u z_u log2(z_u / (z_u + z_(u with last bit
/// flipped))). Zero-frequency pairs contribute zero.
pub fn pair_freq_entropy_bound(z: &PairFreqVector) -> f64 {
    let [z00, z01, z10, z11] = z.as_array();
    let term = |zu: f64, zu_flip: f64| {
        if zu == 0.0 {
            0.0
        } else {
            -zu * (zu / (zu + zu_flip)).log2()
        }
    };
    term(z00, z01) + term(z01, z00) + term(z10, z11) + term(z11, z10)
}

/// One cell of a capacity grid over the noise square.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub delta0: f64,
    pub delta1: f64,
    pub capacity: CapacityValue,
}

/// Evaluates the relevant closed form (end/interspersed: exact capacity;
/// tandem: upper bound) on a uniform grid over the noise square,
/// skipping the degenerate origin. `resolution` is the number of points
/// per axis, at least 2.
pub fn capacity_grid(rule: Rule, resolution: usize) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(Error::Domain {
            argument: "resolution",
            value: resolution as f64,
            domain: "integers >= 2",
        });
    }
    let mut points = Vec::with_capacity(resolution * resolution - 1);
    for i in 0..resolution {
        for j in 0..resolution {
            let delta0 = i as f64 / (resolution - 1) as f64;
            let delta1 = j as f64 / (resolution - 1) as f64;
            if delta0 == 0.0 && delta1 == 0.0 {
                continue;
            }
            let noise = NoiseParams::new(delta0, delta1)?;
            let capacity = match rule {
                Rule::End | Rule::Interspersed => cap_end_noisy(&noise)?,
                Rule::Tandem => cap_tandem_noisy_upper(&noise)?,
            };
            points.push(GridPoint {
                delta0,
                delta1,
                capacity,
            });
        }
    }
    Ok(points)
}
