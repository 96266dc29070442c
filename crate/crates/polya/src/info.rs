//! Entropy and Beta-distribution primitives.
//!
//! All entropies are in bits (base-2 logs). Natural-log constants that show
//! up in closed forms are converted once, here, via [`LOG2_E`].

use crate::error::{Error, Result};

/// log2(e), the conversion factor between nats and bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Binary entropy H2(x) in bits, with the 0·log(0) = 0 endpoint convention.
///
/// Errors outside [0, 1].
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            argument: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(binary_entropy_unchecked(x))
}

/// H2 without the domain check, for integrands that guarantee x in [0, 1].
pub(crate) fn binary_entropy_unchecked(x: f64) -> f64 {
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// m-th harmonic number, with harmonic(0) = 0 (empty sum).
///
/// Summed from the smallest term up to keep low-order bits stable.
pub fn harmonic(m: u64) -> f64 {
    (1..=m).rev().map(|i| 1.0 / i as f64).sum()
}

/// Density of the Beta(t0, t1) distribution with positive integer shape
/// parameters: (t0+t1-1)!/((t0-1)!(t1-1)!) p^(t0-1) (1-p)^(t1-1).
pub fn beta_pdf(p: f64, t0: u64, t1: u64) -> Result<f64> {
    if t0 < 1 {
        return Err(Error::Domain {
            argument: "t0",
            value: t0 as f64,
            domain: "integers >= 1",
        });
    }
    if t1 < 1 {
        return Err(Error::Domain {
            argument: "t1",
            value: t1 as f64,
            domain: "integers >= 1",
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            argument: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok(beta_norm(t0, t1) * p.powi(t0 as i32 - 1) * (1.0 - p).powi(t1 as i32 - 1))
}

/// (t0+t1-1)! / ((t0-1)!(t1-1)!), as a product of ratios to avoid overflow.
fn beta_norm(t0: u64, t1: u64) -> f64 {
    let mut norm = t0 as f64;
    for i in 1..=(t1 - 1) {
        norm *= (t0 + i) as f64 / i as f64;
    }
    norm
}

/// Beta-weighted binary entropy: the integral over [0, 1] of
/// beta_pdf(p; t0, t1) * H2(p), to absolute error <= 1e-10.
pub fn integrate_beta_entropy(t0: u64, t1: u64) -> Result<f64> {
    // validate parameters once; the integrand then skips per-call checks
    beta_pdf(0.5, t0, t1)?;
    let norm = beta_norm(t0, t1);
    let f = move |p: f64| {
        norm * p.powi(t0 as i32 - 1) * (1.0 - p).powi(t1 as i32 - 1) * binary_entropy_unchecked(p)
    };
    // Split at 1/2: the entropy factor has unbounded derivative at both
    // endpoints and the split keeps the adaptive recursion shallow.
    let left = adaptive_simpson(&f, 0.0, 0.5, 5e-11);
    let right = adaptive_simpson(&f, 0.5, 1.0, 5e-11);
    Ok(left + right)
}

/// Adaptive Simpson quadrature with interval bisection to absolute
/// tolerance `eps`. Assumes `f` is bounded on [a, b].
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            // Richardson extrapolation of the two half-interval estimates
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }

    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, eps, 60)
}
