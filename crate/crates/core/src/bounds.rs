//! Accuracy bounds for the sketch and data-agnostic size estimators.
//!
//! All functions are generic over the float type. Probability bounds are
//! clamped to at most 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated tests also reject NaN

use num_traits::Float;

use crate::error::{Error, Result};

/// Step of the α grid searched before golden-section refinement.
pub const ALPHA_GRID_STEP: f64 = 1e-3;

/// Absolute tolerance of the ε bisection.
pub const EPSILON_TOLERANCE: f64 = 1e-6;

#[inline]
fn c<F: Float>(x: f64) -> F {
    F::from(x).expect("constant representable in float type")
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

fn clamp_prob<F: Float>(x: F) -> F {
    x.min(F::one())
}

/// (p·C / (e^{2/3}·T²))^{p/2}: bound on P(|X − E X| ≥ T) for a sum X of
/// p-wise independent indicators with C = max(p, Var X).
pub fn tail_bound<F: Float>(p: u32, c_bound: F, t: F) -> Result<F> {
    if p < 2 {
        return Err(domain(format!("independence degree p = {p} must be at least 2")));
    }
    if !(t > F::zero()) {
        return Err(domain("threshold T must be positive".into()));
    }
    let pf = c::<F>(p as f64);
    if !(c_bound >= pf) {
        return Err(domain("C must be at least p".into()));
    }
    let base = pf * c_bound / (c::<F>(2.0 / 3.0).exp() * t * t);
    Ok(clamp_prob(base.powf(pf / c(2.0))))
}

fn check_pm(p: u32, m: u64) -> Result<()> {
    if p < 2 {
        return Err(domain(format!("independence degree p = {p} must be at least 2")));
    }
    if m == 0 {
        return Err(domain("buffer size M must be positive".into()));
    }
    Ok(())
}

fn check_eps<F: Float>(eps: F) -> Result<()> {
    if !(eps > F::zero() && eps < F::one()) {
        return Err(domain("ε must lie in (0, 1)".into()));
    }
    Ok(())
}

/// (p/M)^{p/2} / e^{p/3}, written to avoid overflow of M^{p/2}.
fn prefactor<F: Float>(p: u32, m: u64) -> F {
    let pf = c::<F>(p as f64);
    let half = pf / c(2.0);
    (pf / c::<F>(m as f64)).powf(half) / (pf / c(3.0)).exp()
}

fn delta_raw<F: Float>(p: u32, m: u64, eps: F, alpha: F) -> F {
    let pf = c::<F>(p as f64);
    let half = pf / c(2.0);
    let two_half = c::<F>(2.0).powf(half);
    let first = alpha.powf(half) / (F::one() - alpha).powf(pf);
    let second = c::<F>(4.0).powf(half) / (alpha.powf(half) * eps.powf(pf) * (two_half - F::one()));
    prefactor::<F>(p, m) * (first + second)
}

/// Smallest admissible α, 4p/M.
pub fn alpha_min<F: Float>(p: u32, m: u64) -> F {
    c::<F>(4.0 * p as f64) / c::<F>(m as f64)
}

/// Failure probability bound for relative error ε with buffer M and
/// p-wise independent hashing, at split parameter α ∈ [4p/M, 1).
pub fn delta_given_alpha<F: Float>(p: u32, m: u64, eps: F, alpha: F) -> Result<F> {
    check_pm(p, m)?;
    check_eps(eps)?;
    if !(alpha >= alpha_min::<F>(p, m) && alpha < F::one()) {
        return Err(domain(format!(
            "α must lie in [4p/M, 1) = [{}, 1)",
            4.0 * p as f64 / m as f64
        )));
    }
    Ok(clamp_prob(delta_raw(p, m, eps, alpha)))
}

/// The α = 1/2 form, valid for M ≥ 8p:
/// (p/M)^{p/2} e^{−p/3} (2^{p/2} + 8^{p/2} / (ε^p (2^{p/2} − 1))).
pub fn delta_simplified<F: Float>(p: u32, m: u64, eps: F) -> Result<F> {
    check_pm(p, m)?;
    check_eps(eps)?;
    if m < 8 * p as u64 {
        return Err(domain(format!("simplified bound needs M ≥ 8p (M = {m}, p = {p})")));
    }
    let pf = c::<F>(p as f64);
    let half = pf / c(2.0);
    let two_half = c::<F>(2.0).powf(half);
    let bracket = two_half + c::<F>(8.0).powf(half) / (eps.powf(pf) * (two_half - F::one()));
    Ok(clamp_prob(prefactor::<F>(p, m) * bracket))
}

/// Minimizes the bound over α by a grid search followed by golden-section
/// refinement. Returns (δ, α*).
pub fn optimal_delta<F: Float>(p: u32, m: u64, eps: F) -> Result<(F, F)> {
    check_pm(p, m)?;
    check_eps(eps)?;
    let lo: F = alpha_min(p, m);
    if !(lo < F::one()) {
        return Err(domain(format!("no admissible α: 4p/M ≥ 1 (M = {m}, p = {p})")));
    }
    let f = |a: F| delta_raw(p, m, eps, a);
    let step = c::<F>(ALPHA_GRID_STEP);
    let (mut best_a, mut best) = (lo, f(lo));
    let mut a = lo + step;
    while a < F::one() {
        let v = f(a);
        if v < best {
            best = v;
            best_a = a;
        }
        a = a + step;
    }
    // refine inside the neighbouring grid cells
    let mut x0 = (best_a - step).max(lo);
    let mut x1 = (best_a + step).min(F::one() - c(1e-12));
    let g = c::<F>((5f64.sqrt() - 1.0) / 2.0);
    let mut y0 = x1 - g * (x1 - x0);
    let mut y1 = x0 + g * (x1 - x0);
    let (mut f0, mut f1) = (f(y0), f(y1));
    for _ in 0..60 {
        if f0 < f1 {
            x1 = y1;
            y1 = y0;
            f1 = f0;
            y0 = x1 - g * (x1 - x0);
            f0 = f(y0);
        } else {
            x0 = y0;
            y0 = y1;
            f0 = f1;
            y1 = x0 + g * (x1 - x0);
            f1 = f(y1);
        }
    }
    for (a, v) in [(y0, f0), (y1, f1)] {
        if v < best {
            best = v;
            best_a = a;
        }
    }
    Ok((clamp_prob(best), best_a))
}

/// Smallest ε whose α-optimized bound is at most δ, or `None` when no ε < 1
/// qualifies. The returned ε is the upper end of the final bisection
/// bracket, so its bound never exceeds δ.
pub fn epsilon_for<F: Float>(p: u32, m: u64, delta: F) -> Result<Option<F>> {
    check_pm(p, m)?;
    if m < 8 * p as u64 {
        return Err(domain(format!("ε inversion needs M ≥ 8p (M = {m}, p = {p})")));
    }
    if !(delta > F::zero() && delta < F::one()) {
        return Err(domain("δ must lie in (0, 1)".into()));
    }
    let bound = |eps: F| optimal_delta(p, m, eps).map(|(d, _)| d);
    let tol = c::<F>(EPSILON_TOLERANCE).max(F::epsilon() * c(16.0));
    let mut hi = F::one() - tol;
    if bound(hi)? > delta {
        return Ok(None);
    }
    let mut lo = F::zero();
    while hi - lo > tol {
        let mid = (lo + hi) / c(2.0);
        if bound(mid)? <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Failure bound at M = 576/ε², p = 2, α = 1 − ε:
/// (2 / (e^{2/3}·576)) · ((1 − ε) + 4/(1 − ε)).
pub fn corollary_reliability<F: Float>(eps: F) -> Result<F> {
    check_eps(eps)?;
    let one = F::one();
    let scale = c::<F>(2.0) / (c::<F>(2.0 / 3.0).exp() * c(576.0));
    Ok(scale * ((one - eps) + c::<F>(4.0) / (one - eps)))
}

/// Limit of [`corollary_reliability`] as ε → 0, 10/(e^{2/3}·576).
pub fn corollary_limit<F: Float>() -> F {
    c::<F>(10.0) / (c::<F>(2.0 / 3.0).exp() * c(576.0))
}

/// Buffer size ⌈20m/(ε²r)⌉ for iceberg estimates of r qualifying items out
/// of m distinct ones.
pub fn iceberg_memory<F: Float>(m: u64, r: u64, eps: F) -> Result<u64> {
    if r == 0 {
        return Err(domain("iceberg count r must be positive".into()));
    }
    if !(eps > F::zero()) {
        return Err(domain("ε must be positive".into()));
    }
    let v = c::<F>(20.0) * c::<F>(m as f64) / (eps * eps * c::<F>(r as f64));
    v.ceil()
        .to_u64()
        .ok_or_else(|| domain("memory requirement does not fit in 64 bits".into()))
}

/// Two readings of η items thrown uniformly into V cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgnosticEstimates<F> {
    /// η(1 − 1/V)^η, the expression as usually quoted for unoccupied cells.
    pub unoccupied_literal: F,
    /// V(1 − (1 − 1/V)^η), the expected number of occupied cells.
    pub expected_distinct: F,
}

pub fn agnostic_estimates<F: Float>(v: F, eta: F) -> Result<AgnosticEstimates<F>> {
    if !(v >= F::one()) {
        return Err(domain("V must be at least 1".into()));
    }
    if !(eta >= F::zero()) {
        return Err(domain("η must be nonnegative".into()));
    }
    if eta == F::zero() {
        return Ok(AgnosticEstimates {
            unoccupied_literal: F::zero(),
            expected_distinct: F::zero(),
        });
    }
    // ln(1 − 1/V), −∞ when V = 1
    let log_keep = (-v.recip()).ln_1p();
    let keep = (eta * log_keep).exp();
    Ok(AgnosticEstimates {
        unoccupied_literal: eta * keep,
        expected_distinct: -v * (eta * log_keep).exp_m1(),
    })
}

/// m(1 − (m/V)^σ): estimated number of distinct (n−1)-grams given m distinct
/// n-grams out of V possible, over an alphabet of σ symbols.
pub fn agnostic_lower_gram<F: Float>(m: F, v: F, sigma: F) -> F {
    m * (F::one() - (m / v).powf(sigma))
}

/// Parameter bundle for the bounds above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery<F> {
    pub p: u32,
    pub m: u64,
    pub eps: F,
    pub delta: F,
    pub alpha: F,
}

impl<F: Float> BoundQuery<F> {
    /// Whether 4p/M ≤ α < 1.
    pub fn general_form_valid(&self) -> bool {
        self.alpha >= alpha_min::<F>(self.p, self.m) && self.alpha < F::one()
    }

    /// Whether M ≥ 8p.
    pub fn simplified_form_valid(&self) -> bool {
        self.m >= 8 * self.p as u64
    }

    pub fn delta_bound(&self) -> Result<F> {
        delta_given_alpha(self.p, self.m, self.eps, self.alpha)
    }

    /// Whether the bound at (ε, α) guarantees failure probability at most δ.
    pub fn satisfied(&self) -> Result<bool> {
        Ok(self.delta_bound()? <= self.delta)
    }
}
