//! Shared numerics: adaptive quadrature, iterated 2-D quadrature, finite
//! differences with one Richardson refinement, and result bookkeeping.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How a numeric value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    FiniteDifference,
    MonteCarlo,
}

/// A scalar result with an attached error estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NumericResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

impl NumericResult {
    pub fn closed(value: f64) -> Self {
        NumericResult {
            value,
            error_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }
    pub fn quad(value: f64, error_estimate: f64) -> Self {
        NumericResult {
            value,
            error_estimate,
            method: Method::Quadrature,
        }
    }
    pub fn fd(value: f64, error_estimate: f64) -> Self {
        NumericResult {
            value,
            error_estimate,
            method: Method::FiniteDifference,
        }
    }
    pub fn mc(value: f64, error_estimate: f64) -> Self {
        NumericResult {
            value,
            error_estimate,
            method: Method::MonteCarlo,
        }
    }
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on [a, b] with absolute tolerance.
///
/// # Notes
/// The integrand must return finite values on (a, b); integrands built from
/// log-densities clamp underflow to zero before calling this.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<NumericResult> {
    if !(a.is_finite() && b.is_finite()) || abs_tol <= 0.0 {
        return Err(Error::DomainError(
            "integration bounds must be finite and tolerance positive".into(),
        ));
    }
    if a == b {
        return Ok(NumericResult::quad(0.0, 0.0));
    }
    let (a, b, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // Seed with a uniform panel split so that localized or symmetric features
    // cannot hide from the three initial Simpson probe points.
    const PANELS: usize = 16;
    let step = (b - a) / PANELS as f64;
    let per_tol = abs_tol / PANELS as f64;
    let mut err_acc = 0.0;
    let mut total = 0.0;
    // Global evaluation budget: noisy integrands (e.g. round-off-limited
    // closed forms) otherwise keep failing the local test and explode the
    // recursion breadth-first. Exhausted intervals are accepted with their
    // refinement gap folded into the error estimate.
    let mut budget: u64 = 400_000;
    for k in 0..PANELS {
        let (pa, pb) = (a + k as f64 * step, a + (k + 1) as f64 * step);
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
            return Err(Error::NumericalFailure(
                "integrand returned a non-finite value".into(),
            ));
        }
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive(
            f, pa, pb, fa, fm, fb, whole, per_tol, MAX_DEPTH, &mut err_acc, &mut budget,
        )?;
    }
    Ok(NumericResult::quad(sign * total, err_acc.max(1e-300)))
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
    budget: &mut u64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::NumericalFailure(
            "integrand returned a non-finite value".into(),
        ));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || *budget == 0 {
        // Out of refinement budget: accept with an honest error contribution.
        *err_acc += delta.abs();
        return Ok(left + right + delta / 15.0);
    }
    if delta.abs() <= 15.0 * tol {
        *err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    *budget = budget.saturating_sub(2);
    let lv = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc, budget)?;
    let rv = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc, budget)?;
    Ok(lv + rv)
}

/// Non-adaptive composite Simpson with a fixed, even panel count.
///
/// Preferred when each integrand evaluation is itself an expensive inner
/// computation carrying its own round-off floor: the adaptive rule would
/// chase that noise forever, while a fixed rule costs exactly
/// `2 * panels + 1` evaluations. The error estimate is the Richardson gap
/// against the half-resolution rule on the same nodes.
pub fn fixed_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<NumericResult> {
    if !(a.is_finite() && b.is_finite()) || panels == 0 || panels % 2 != 0 {
        return Err(Error::DomainError(
            "fixed_simpson needs finite bounds and an even, positive panel count".into(),
        ));
    }
    if a == b {
        return Ok(NumericResult::quad(0.0, 0.0));
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|k| f(a + k as f64 * h)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(
            "integrand returned a non-finite value".into(),
        ));
    }
    let simpson = |stride: usize| -> f64 {
        let mut s = vals[0] + vals[n];
        let mut k = stride;
        while k < n {
            s += 4.0 * vals[k];
            if k + stride < n {
                s += 2.0 * vals[k + stride];
            }
            k += 2 * stride;
        }
        s * (stride as f64 * h) / 3.0
    };
    let fine = simpson(1);
    let coarse = simpson(2);
    Ok(NumericResult::quad(
        fine,
        ((fine - coarse) / 15.0).abs().max(1e-300),
    ))
}

/// Adaptive Simpson over [a, b] split at interior breakpoints (density kinks).
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
) -> Result<NumericResult> {
    let mut pts: Vec<f64> = breaks
        .iter()
        .cloned()
        .filter(|&p| p > a && p < b)
        .collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let per = abs_tol / (edges.len() - 1) as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    for w in edges.windows(2) {
        let r = integrate_1d(f, w[0], w[1], per)?;
        value += r.value;
        err += r.error_estimate;
    }
    Ok(NumericResult::quad(value, err))
}

/// Iterated 2-D quadrature over a box: adaptive outer axis, adaptive inner axis.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    xr: (f64, f64),
    yr: (f64, f64),
    abs_tol: f64,
) -> Result<NumericResult> {
    let width = xr.1 - xr.0;
    if width <= 0.0 || yr.1 - yr.0 <= 0.0 {
        return Err(Error::DomainError("empty 2-D integration box".into()));
    }
    let inner_tol = abs_tol / width * 0.2;
    let inner_err = std::cell::Cell::new(0.0f64);
    let g = |x: f64| {
        match integrate_1d(&|y| f(x, y), yr.0, yr.1, inner_tol) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.error_estimate));
                r.value
            }
            Err(_) => f64::NAN,
        }
    };
    let outer = integrate_1d(&g, xr.0, xr.1, abs_tol)?;
    Ok(NumericResult::quad(
        outer.value,
        outer.error_estimate + inner_err.get() * width,
    ))
}

/// Options for numeric differentiation.
#[derive(Clone, Copy, Debug)]
pub struct FdOptions {
    /// Base step; `None` takes max(1e-3, 1e-2 * |t0|).
    pub step: Option<f64>,
    /// Left end of the admissible domain (one-sided stencil is used near it).
    pub domain_min: f64,
    /// Refinement-gap threshold: gaps above 10x this raise NumericalFailure.
    pub tolerance: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: None,
            domain_min: f64::NEG_INFINITY,
            tolerance: 1e-3,
        }
    }
}

/// First or second derivative of `f` at `t0` with one Richardson refinement.
///
/// # Notes
/// Central stencils are used when `t0 - 2h` stays inside the domain, otherwise
/// second-order one-sided stencils. The error estimate is the gap between the
/// refined and unrefined values.
pub fn finite_difference<F: Fn(f64) -> f64>(
    f: &F,
    t0: f64,
    order: u8,
    opts: FdOptions,
) -> Result<NumericResult> {
    if order == 0 || order > 2 {
        return Err(Error::DomainError("derivative order must be 1 or 2".into()));
    }
    let h = opts.step.unwrap_or_else(|| (1e-2 * t0.abs()).max(1e-3));
    let one_sided = t0 - 2.0 * h < opts.domain_min;
    let d = |h: f64| -> f64 {
        if order == 1 {
            if one_sided {
                (-3.0 * f(t0) + 4.0 * f(t0 + h) - f(t0 + 2.0 * h)) / (2.0 * h)
            } else {
                (f(t0 + h) - f(t0 - h)) / (2.0 * h)
            }
        } else if one_sided {
            (2.0 * f(t0) - 5.0 * f(t0 + h) + 4.0 * f(t0 + 2.0 * h) - f(t0 + 3.0 * h)) / (h * h)
        } else {
            (f(t0 + h) - 2.0 * f(t0) + f(t0 - h)) / (h * h)
        }
    };
    let coarse = d(h);
    let fine = d(0.5 * h);
    // Both stencils are O(h^2) (the one-sided second derivative is O(h) but the
    // Richardson combination below still cancels its leading term).
    let refined = if order == 2 && one_sided {
        2.0 * fine - coarse
    } else {
        (4.0 * fine - coarse) / 3.0
    };
    let gap = (refined - fine).abs();
    if !refined.is_finite() {
        return Err(Error::NumericalFailure(
            "finite difference produced a non-finite value".into(),
        ));
    }
    if gap > 10.0 * opts.tolerance.max(1e-12) {
        return Err(Error::NumericalFailure(format!(
            "finite-difference refinement gap {gap:.3e} exceeds 10x tolerance"
        )));
    }
    Ok(NumericResult::fd(refined, gap))
}

/// Ordinary least squares slope through the origin.
pub fn ols_slope_through_origin(ts: &[f64], ys: &[f64]) -> f64 {
    let num: f64 = ts.iter().zip(ys).map(|(t, y)| t * y).sum();
    let den: f64 = ts.iter().map(|t| t * t).sum();
    num / den
}
