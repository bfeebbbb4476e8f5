//! Working-regime optimization: finding the power setting that minimizes
//! modeled machining time over an admissible power range.
//!
//! Four strategies are provided. `minimize_analytic` is exact for degrees
//! up to 3 (endpoints plus derivative roots). `minimize_grid` scans a
//! uniform grid. `minimize_pure_random` samples the range uniformly.
//! `minimize_controlled_random` repeatedly samples a window that recenters
//! on the best point seen and shrinks geometrically, which concentrates
//! evaluations near a minimum while a pinned seed keeps runs reproducible.
//!
//! All random draws come from a ChaCha8 stream seeded explicitly, so every
//! result is a pure function of (model, range, parameters).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polyfit::PolynomialModel;

/// Highest degree `minimize_analytic` can handle exactly.
pub const MAX_ANALYTIC_DEGREE: usize = 3;

/// Number of scan intervals [`inverse_solve`] uses to bracket roots; scan
/// points are `lo + width * i / N` for `i` in `0..N` plus `hi` itself.
pub const INVERSE_SCAN_INTERVALS: usize = 8192;

/// Admissible power range for the debiting installation, in watts.
pub const DEFAULT_RANGE: Range = Range {
    lo: 350.0,
    hi: 7000.0,
};

/// Closed interval of power values. Construction enforces finite `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Range { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.lo && p <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Grid,
    PureRandom,
    ControlledRandom,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Grid => "grid",
            Method::PureRandom => "pure-random",
            Method::ControlledRandom => "controlled-random",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub method: Method,
    /// Power setting attaining the reported minimum, in watts.
    pub argmin_p: f64,
    /// Model value at `argmin_p`, in seconds.
    pub min_value: f64,
    /// Number of model evaluations performed; at least 1.
    pub evaluations: u64,
    /// True when the method ran to its natural end (always for the
    /// deterministic methods; for controlled random search, when the window
    /// shrank below the width tolerance before the iteration cap).
    pub converged: bool,
    /// False exactly when the reported minimum is non-positive, which a
    /// machining time cannot be; the model is then extrapolating nonsense
    /// and the result must not drive a real regime choice.
    pub physically_valid: bool,
}

/// Parameters of [`minimize_controlled_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSearchParams {
    /// Samples drawn per iteration; at least 2.
    pub samples_per_iteration: usize,
    /// Window width multiplier per iteration, strictly between 0 and 1.
    pub shrink_factor: f64,
    /// Window width, in watts, below which the search stops as converged.
    pub width_tolerance: f64,
    /// Iteration cap; reaching it stops the search unconverged.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RandomSearchParams {
    fn default() -> Self {
        RandomSearchParams {
            samples_per_iteration: 16,
            shrink_factor: 0.5,
            width_tolerance: 0.1,
            max_iterations: 64,
            seed: 0,
        }
    }
}

impl RandomSearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_iteration < 2 {
            return Err(Error::InvalidParameter {
                parameter: "samples_per_iteration",
                requirement: "at least 2",
                value: self.samples_per_iteration as f64,
            });
        }
        if !(self.shrink_factor.is_finite()
            && self.shrink_factor > 0.0
            && self.shrink_factor < 1.0)
        {
            return Err(Error::InvalidParameter {
                parameter: "shrink_factor",
                requirement: "strictly between 0 and 1",
                value: self.shrink_factor,
            });
        }
        if !(self.width_tolerance.is_finite() && self.width_tolerance > 0.0) {
            return Err(Error::InvalidParameter {
                parameter: "width_tolerance",
                requirement: "positive",
                value: self.width_tolerance,
            });
        }
        Ok(())
    }
}

fn result(method: Method, argmin_p: f64, min_value: f64, evaluations: u64, converged: bool) -> OptimizationResult {
    OptimizationResult {
        method,
        argmin_p,
        min_value,
        evaluations,
        converged,
        physically_valid: min_value > 0.0,
    }
}

/// Drops trailing zero coefficients so the true algebraic degree drives the
/// root formulas; a lone constant is never trimmed away.
fn effective_coeffs(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 1 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Real roots of `a x^2 + b x + c` with `a != 0`, computed with the
/// cancellation-free quadratic formula.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * sq);
    let mut roots = vec![q / a, c / q];
    roots.retain(|r| r.is_finite());
    roots
}

/// Stationary points of the model: real roots of its derivative. Only
/// meaningful for effective derivative degree <= 2, which covers every model
/// `minimize_analytic` accepts. An identically zero derivative yields no
/// isolated roots.
fn stationary_points(model: &PolynomialModel) -> Vec<f64> {
    let derivative = model.derivative();
    let c = effective_coeffs(derivative.coefficients());
    match c.len() {
        1 => Vec::new(),
        2 => {
            let root = -c[0] / c[1];
            if root.is_finite() {
                vec![root]
            } else {
                Vec::new()
            }
        }
        _ => quadratic_roots(c[2], c[1], c[0]),
    }
}

/// Exact minimization for degree <= 3: the minimum over a closed interval is
/// attained at an endpoint or at an interior stationary point, so all of
/// them are evaluated and the smallest wins. Ties go to the smallest power.
pub fn minimize_analytic(model: &PolynomialModel, range: &Range) -> Result<OptimizationResult> {
    if model.degree() > MAX_ANALYTIC_DEGREE {
        return Err(Error::AnalyticUnsupported {
            degree: model.degree(),
        });
    }
    let mut candidates = vec![range.lo, range.hi];
    candidates.extend(
        stationary_points(model)
            .into_iter()
            .filter(|p| range.contains(*p)),
    );
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best_p = candidates[0];
    let mut best_v = model.evaluate(best_p);
    for &p in &candidates[1..] {
        let v = model.evaluate(p);
        if v < best_v {
            best_v = v;
            best_p = p;
        }
    }
    Ok(result(
        Method::Analytic,
        best_p,
        best_v,
        candidates.len() as u64,
        true,
    ))
}

/// Evaluates the model on `n >= 2` uniformly spaced points including both
/// endpoints and returns the best. Ties go to the smallest power.
pub fn minimize_grid(model: &PolynomialModel, range: &Range, n: usize) -> Result<OptimizationResult> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            parameter: "grid points",
            requirement: "at least 2",
            value: n as f64,
        });
    }
    let step = range.width() / (n - 1) as f64;
    let mut best_p = f64::NAN;
    let mut best_v = f64::INFINITY;
    for i in 0..n {
        let p = if i == n - 1 {
            range.hi
        } else {
            range.lo + step * i as f64
        };
        let v = model.evaluate(p);
        if v < best_v {
            best_v = v;
            best_p = p;
        }
    }
    Ok(result(Method::Grid, best_p, best_v, n as u64, true))
}

/// Evaluates the model at `n >= 1` points drawn uniformly from the range
/// and returns the best. Same seed, same answer.
pub fn minimize_pure_random(
    model: &PolynomialModel,
    range: &Range,
    n: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            parameter: "samples",
            requirement: "at least 1",
            value: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_p = f64::NAN;
    let mut best_v = f64::INFINITY;
    for _ in 0..n {
        let p = range.lo + range.width() * rng.random::<f64>();
        let v = model.evaluate(p);
        if v < best_v {
            best_v = v;
            best_p = p;
        }
    }
    Ok(result(Method::PureRandom, best_p, best_v, n as u64, true))
}

/// Controlled random search: draw `k` uniform samples from the current
/// window, recenter the window on the best point seen so far, shrink its
/// width by the shrink factor, and repeat. A window that would stick out of
/// the original range is shifted back inside rather than truncated, so after
/// `i` iterations its width is exactly `w0 * rho^i`. The search converges
/// when the window width drops below the tolerance; hitting the iteration
/// cap first reports `converged: false`.
///
/// Exactly `k` model evaluations happen per completed iteration. If the
/// search performs no iterations at all, the window midpoint is evaluated so
/// a result can still be reported.
pub fn minimize_controlled_random(
    model: &PolynomialModel,
    range: &Range,
    params: &RandomSearchParams,
) -> Result<OptimizationResult> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (mut lo, mut hi) = (range.lo, range.hi);
    let mut best_p = f64::NAN;
    let mut best_v = f64::INFINITY;
    let mut evaluations = 0u64;
    let mut iterations = 0usize;

    let converged = loop {
        let width = hi - lo;
        if width < params.width_tolerance {
            break true;
        }
        if iterations == params.max_iterations {
            break false;
        }
        for _ in 0..params.samples_per_iteration {
            let p = lo + (hi - lo) * rng.random::<f64>();
            let v = model.evaluate(p);
            evaluations += 1;
            if v < best_v {
                best_v = v;
                best_p = p;
            }
        }
        iterations += 1;

        let new_width = (hi - lo) * params.shrink_factor;
        let mut new_lo = best_p - new_width / 2.0;
        let mut new_hi = best_p + new_width / 2.0;
        if new_lo < range.lo {
            new_hi += range.lo - new_lo;
            new_lo = range.lo;
        } else if new_hi > range.hi {
            new_lo -= new_hi - range.hi;
            new_hi = range.hi;
        }
        lo = new_lo;
        hi = new_hi;
    };

    if evaluations == 0 {
        best_p = (range.lo + range.hi) / 2.0;
        best_v = model.evaluate(best_p);
        evaluations = 1;
    }
    Ok(result(
        Method::ControlledRandom,
        best_p,
        best_v,
        evaluations,
        converged,
    ))
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_negative = g_lo < 0.0;
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All power values in the range at which the model attains `target`, in
/// ascending order. Solutions satisfy `|f(P) - target| <= 1e-6 * (1 + |target|)`.
///
/// Roots are located by scanning [`INVERSE_SCAN_INTERVALS`] uniform cells
/// for sign changes and refining each by bisection; exact hits on scan
/// points are kept directly. Consequences of the scan resolution: distinct
/// roots closer together than one cell merge into one representative (a
/// constant model sitting exactly on the target reports a single solution),
/// and an even number of crossings inside one cell can be missed. An empty
/// result means no solution was found in the range.
pub fn inverse_solve(model: &PolynomialModel, target: f64, range: &Range) -> Vec<f64> {
    if !target.is_finite() {
        return Vec::new();
    }
    let tol = 1e-6 * (1.0 + target.abs());
    let n = INVERSE_SCAN_INTERVALS;
    let g = |p: f64| model.evaluate(p) - target;
    let x_at = |i: usize| {
        if i == n {
            range.hi
        } else {
            range.lo + range.width() * (i as f64) / (n as f64)
        }
    };

    let mut hits: Vec<f64> = Vec::new();
    let mut prev_x = x_at(0);
    let mut prev_g = g(prev_x);
    if prev_g == 0.0 {
        hits.push(prev_x);
    }
    for i in 1..=n {
        let x = x_at(i);
        let gx = g(x);
        if gx == 0.0 {
            hits.push(x);
        } else if prev_g != 0.0 && (prev_g < 0.0) != (gx < 0.0) {
            hits.push(bisect(&g, prev_x, x, prev_g));
        }
        prev_x = x;
        prev_g = gx;
    }

    hits.sort_by(f64::total_cmp);
    let merge_tol = range.width() / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let mut j = i + 1;
        while j < hits.len() && hits[j] - hits[j - 1] <= merge_tol {
            j += 1;
        }
        let representative = hits[i..j]
            .iter()
            .copied()
            .min_by(|a, b| g(*a).abs().total_cmp(&g(*b).abs()))
            .expect("non-empty cluster");
        roots.push(representative);
        i = j;
    }
    roots.retain(|&r| g(r).abs() <= tol);
    roots
}
