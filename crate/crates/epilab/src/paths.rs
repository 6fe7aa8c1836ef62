//! Gaussian-perturbation paths: the entropy-derivative identity, its matrix
//! form, four integral representations of differential entropy, and the
//! small-SNR slope of input-output mutual information.

use serde::{Deserialize, Serialize};

use crate::channel::{mmse_tol, ChannelSpec, Orientation};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::functionals::{entropy_tol, fisher_info_tol, LN_2PI_E};
use crate::linalg;
use crate::numerics::{
    finite_difference, fixed_simpson, ols_slope_through_origin, FdOptions, Method, NumericResult,
};
use crate::sumdist::SumDensity;

/// The four equivalent integral representations of entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    /// h from J(X + sqrt(t) Z), t over (0, inf).
    #[serde(rename = "i1-fisher-noise")]
    FisherNoise,
    /// h from J(sqrt(t) X + sqrt(1-t) Z), t over (0, 1).
    #[serde(rename = "i2-fisher-interp")]
    FisherInterp,
    /// h from Var(X | sqrt(t) X + Z), t over (0, inf).
    #[serde(rename = "i3-mmse-signal")]
    MmseSignal,
    /// h from Var(X | sqrt(1-t) X + sqrt(t) Z), t over (0, 1).
    #[serde(rename = "i4-mmse-interp")]
    MmseInterp,
}

/// Entropy recovered by integrating a Fisher/MMSE kernel along a path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathEstimate {
    pub entropy_nats: f64,
    pub representation: PathKind,
    pub t_grid: Vec<f64>,
    pub truncation_t: f64,
    pub error_estimate: f64,
}

/// One sampled point of a path kernel, for figure-style data files.
#[derive(Clone, Debug, Serialize)]
pub struct PathRecord {
    pub t: f64,
    pub kernel: f64,
    pub integrand: f64,
}

/// d/dt h(X + sqrt(t) Z) at t0 minus (1/2) tr(J(X + sqrt(t0) Z) Cov(Z)).
///
/// At t0 = 0 the noise may be any finite-covariance law; at t0 > 0 the
/// identity requires Gaussian noise.
pub fn debruijn_residual(x: &Dist, z: &Dist, t0: f64) -> Result<NumericResult> {
    if t0 < 0.0 {
        return Err(Error::DomainError("perturbation time must be >= 0".into()));
    }
    let (zm, zc) = z.moments()?;
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: z.dim(),
        });
    }
    let gaussian_z = z.gaussian_form().is_some();
    if t0 > 0.0 && !gaussian_z {
        return Err(Error::NonGaussianPositiveT);
    }
    if zm.iter().any(|m| m.abs() > 1e-12) {
        return Err(Error::InvalidSpec("perturbation must be zero-mean".into()));
    }
    // Entropy along the path. A kinked base density gives h(X + sqrt(t) Z)
    // a t^{3/2} term at t = 0, so the step there must be small and one-sided.
    let mut failure: Option<Error> = None;
    let h_of_t = |t: f64| -> f64 {
        let res = if t <= 0.0 {
            entropy_tol(x, 1e-12)
        } else if gaussian_z {
            x.convolve_gaussian(t, &zc)
                .and_then(|d| entropy_tol(&d, 1e-12))
        } else {
            z.scale1(t.sqrt())
                .and_then(|zs| SumDensity::of_family(&[x.clone(), zs], &[1.0, 1.0]))
                .and_then(|s| s.entropy(1e-12))
        };
        match res {
            Ok(h) => h.nats,
            Err(_) => f64::NAN,
        }
    };
    let opts = if t0 == 0.0 {
        FdOptions {
            step: Some(2e-6),
            domain_min: 0.0,
            tolerance: 1e-3,
        }
    } else {
        FdOptions {
            step: None,
            domain_min: 0.0,
            tolerance: 1e-4,
        }
    };
    let lhs = finite_difference(&h_of_t, t0, 1, opts)?;
    if lhs.value.is_nan() {
        failure = Some(Error::NumericalFailure(
            "entropy evaluation failed along the path".into(),
        ));
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let smoothed = if t0 == 0.0 {
        x.clone()
    } else {
        x.convolve_gaussian(t0, &zc)?
    };
    let j = fisher_info_tol(&smoothed, 1e-10)?;
    let rhs = 0.5 * linalg::trace(&linalg::mat_mul(&j.matrix, &zc));
    Ok(NumericResult {
        value: lhs.value - rhs,
        error_estimate: lhs.error_estimate + 0.5 * j.error_estimate * linalg::trace(&zc),
        method: Method::FiniteDifference,
    })
}

/// First-order matrix expansion check: for K = c K0 the ratio
/// |h(X + N(0, K)) - h(X) - (1/2) tr(J(X) K)| / ||K|| must shrink with c.
pub fn debruijn_matrix_ratios(x: &Dist, k0: &[Vec<f64>], cs: &[f64]) -> Result<Vec<f64>> {
    let norm = linalg::frobenius(k0);
    if norm == 0.0 {
        return Ok(cs.iter().map(|_| 0.0).collect());
    }
    linalg::validate_cov(k0, x.dim())?;
    let h0 = entropy_tol(x, 1e-12)?;
    let j = fisher_info_tol(x, 1e-10)?;
    let slope = 0.5 * linalg::trace(&linalg::mat_mul(&j.matrix, k0));
    cs.iter()
        .map(|&c| {
            if c <= 0.0 {
                return Err(Error::DomainError("matrix scale must be positive".into()));
            }
            let h = entropy_tol(&x.convolve_gaussian(c, k0)?, 1e-12)?;
            Ok((h.nats - h0.nats - c * slope).abs() / (c * norm))
        })
        .collect()
}

/// Ratio at the smallest scale, plus a decrease check along the sequence.
pub fn debruijn_matrix_residual(x: &Dist, k0: &[Vec<f64>], cs: &[f64]) -> Result<NumericResult> {
    let ratios = debruijn_matrix_ratios(x, k0, cs)?;
    let decreasing = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    if !decreasing {
        return Err(Error::NumericalFailure(format!(
            "expansion ratios {ratios:?} do not decrease along the scale sequence"
        )));
    }
    Ok(NumericResult {
        value: *ratios.last().unwrap_or(&0.0),
        error_estimate: 0.0,
        method: Method::FiniteDifference,
    })
}

/// The path kernel at one grid point: scalar Fisher information or MMSE.
pub fn path_kernel(x: &Dist, kind: PathKind, t: f64) -> Result<f64> {
    if x.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            "path representations are implemented for scalar laws".into(),
        ));
    }
    let eye = vec![vec![1.0]];
    match kind {
        PathKind::FisherNoise => Ok(fisher_info_tol(&x.convolve_gaussian(t, &eye)?, 1e-9)?.scalar),
        PathKind::FisherInterp => {
            if !(0.0 < t && t < 1.0) {
                return Err(Error::DomainError("interpolation time must be in (0,1)".into()));
            }
            let d = x.scale1(t.sqrt())?.convolve_gaussian(1.0 - t, &eye)?;
            Ok(fisher_info_tol(&d, 1e-9)?.scalar)
        }
        PathKind::MmseSignal => {
            let ch = ChannelSpec::white1(x.clone(), 1.0, Orientation::SignalScaled, t)?;
            // The integrand subtracts two O(1/t) terms, so the kernel error
            // is magnified by (1 + t)^2 before it reaches the integral.
            let tol = (1e-5 / ((1.0 + t) * (1.0 + t))).max(1e-12);
            Ok(mmse_tol(&ch, tol)?.value)
        }
        PathKind::MmseInterp => {
            if !(0.0 < t && t <= 1.0) {
                return Err(Error::DomainError("interpolation time must be in (0,1]".into()));
            }
            let ch = ChannelSpec::new(
                x.clone(),
                vec![vec![t]],
                Orientation::SignalScaled,
                1.0 - t,
            )?;
            // Here the integrand is (1 - kernel/t)/t: kernel errors are
            // amplified by 1/t^2, so the tolerance must shrink with t.
            let tol = (1e-5 * t * t).clamp(1e-13, 1e-9);
            Ok(mmse_tol(&ch, tol)?.value)
        }
    }
}

/// The integrand of each representation in its native t variable.
fn path_integrand(x: &Dist, kind: PathKind, t: f64, kernel: f64) -> f64 {
    let _ = x;
    match kind {
        PathKind::FisherNoise => kernel - 1.0 / (1.0 + t),
        PathKind::FisherInterp => (kernel - 1.0) / t,
        PathKind::MmseSignal => 1.0 / (1.0 + t) - kernel,
        PathKind::MmseInterp => (1.0 - kernel / t) / t,
    }
}

/// Sample (t, kernel, integrand) records along a grid, for data files.
pub fn path_records(x: &Dist, kind: PathKind, t_grid: &[f64]) -> Result<Vec<PathRecord>> {
    t_grid
        .iter()
        .map(|&t| {
            let kernel = path_kernel(x, kind, t)?;
            Ok(PathRecord {
                t,
                kernel,
                integrand: path_integrand(x, kind, t, kernel),
            })
        })
        .collect()
}

/// Recover h(X) by integrating the chosen kernel along its perturbation path.
///
/// Infinite t-ranges are mapped to (0, 1) by u = t/(1+t); the truncated tail
/// beyond the last point is bounded by its Gaussian-case analytic form and
/// folded into the error estimate.
pub fn entropy_via_path(x: &Dist, kind: PathKind) -> Result<PathEstimate> {
    if x.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            "path representations are implemented for scalar laws".into(),
        ));
    }
    let (_, cov) = x.moments()?;
    let var = cov[0][0];
    // Fixed-node Simpson: every node is an expensive Fisher/MMSE solve with
    // its own tolerance floor, so adaptive refinement would only chase noise.
    // MMSE kernels cost ~100x a Fisher kernel per node, hence fewer panels.
    let panels = match kind {
        PathKind::FisherNoise | PathKind::FisherInterp => 192,
        PathKind::MmseSignal | PathKind::MmseInterp => 24,
    };
    let mut failure = std::cell::RefCell::new(None::<Error>);
    let eval = |t: f64| -> f64 {
        match path_kernel(x, kind, t) {
            Ok(k) => path_integrand(x, kind, t, k),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let (integral, err, truncation_t, grid) = match kind {
        PathKind::FisherNoise | PathKind::MmseSignal => {
            // u = t/(1+t); g(u) = f(t(u)) / (1-u)^2 stays bounded as u -> 1.
            // Stop well before u = 1: the (1-u)^-2 factor amplifies the
            // kernel's tolerance floor past the integrand's own size, while
            // the Gaussian-analog tail is already accurate to O(1/T^2). The
            // MMSE kernel pays for its accuracy with nested quadrature, so
            // its path stops earlier and carries a larger tail error term.
            let (eps, delta) = match kind {
                PathKind::FisherNoise => (1e-6, 5e-3),
                _ => (1e-6, 2.5e-2),
            };
            let g = |u: f64| {
                let t = u / (1.0 - u);
                eval(t) / ((1.0 - u) * (1.0 - u))
            };
            let r = fixed_simpson(&g, eps, 1.0 - delta, panels)?;
            let t_max = (1.0 - delta) / delta;
            // Analytic corrections for the clipped ends. The Fisher kernel
            // matches its Gaussian analog to O(1/t^3), so the analog tail is
            // O(1/T^2) accurate. The MMSE kernel only matches to O(1/t^2);
            // fitting its own 1/t^2 coefficient at t_max restores an
            // O(1/T^2) tail: Var ~ 1/t - c/t^2 integrates against 1/(1+t).
            let head = g(eps) * eps;
            let (tail, tail_err) = match kind {
                PathKind::FisherNoise => (
                    ((1.0 + t_max) / (var + t_max)).ln(),
                    10.0 / (t_max * t_max),
                ),
                _ => {
                    let k = path_kernel(x, kind, t_max)?;
                    let c = (1.0 / t_max - k) * t_max * t_max;
                    (
                        c / t_max - (1.0 + 1.0 / t_max).ln(),
                        5.0 / (t_max * t_max),
                    )
                }
            };
            let grid = (0..=16)
                .map(|k| {
                    let u = eps + (1.0 - delta - eps) * k as f64 / 16.0;
                    u / (1.0 - u)
                })
                .collect();
            (
                r.value + head + tail,
                r.error_estimate + head.abs() + tail_err,
                t_max,
                grid,
            )
        }
        PathKind::FisherInterp | PathKind::MmseInterp => {
            // The MMSE kernel cannot reach t ~ 1e-4 at useful accuracy (the
            // 1/t^2 amplification would demand ~1e-13 absolute MMSE), so its
            // clipped head is wider and handled by a midpoint rule, which
            // also integrates the sqrt(t) kink term to O(eps^{3/2}).
            let eps = match kind {
                PathKind::FisherInterp => 1e-4,
                _ => 1e-2,
            };
            let r = fixed_simpson(&eval, eps, 1.0 - eps, panels)?;
            let head = eval(0.5 * eps) * eps;
            let tail = eval(1.0 - 0.5 * eps) * eps;
            let grid = (0..=16)
                .map(|k| eps + (1.0 - 2.0 * eps) * k as f64 / 16.0)
                .collect();
            (
                r.value + head + tail,
                r.error_estimate + 0.2 * (head.abs() + tail.abs()),
                1.0 - eps,
                grid,
            )
        }
    };
    if let Some(e) = failure.get_mut().take() {
        return Err(e);
    }
    if !integral.is_finite() {
        return Err(Error::NumericalFailure(
            "path integral did not evaluate to a finite value".into(),
        ));
    }
    Ok(PathEstimate {
        entropy_nats: 0.5 * LN_2PI_E - 0.5 * integral,
        representation: kind,
        t_grid: grid,
        truncation_t,
        error_estimate: 0.5 * err + 1e-4,
    })
}

/// Fitted slope of I(X; sqrt(t) X + Z) against t near t = 0.
///
/// The default grid sits at t ~ a few 1e-4: kinked noise densities give
/// I(t) = c1 t + c_{3/2} t^{3/2} + ..., so larger grids bias the fit.
pub fn small_snr_slope(z: &Dist, x: &Dist, t_grid: Option<&[f64]>) -> Result<NumericResult> {
    let default = [2e-4, 4e-4, 6e-4];
    let grid = t_grid.unwrap_or(&default);
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
        return Err(Error::InvalidSpec(
            "slope grid must be strictly increasing and positive".into(),
        ));
    }
    if x.dim() != 1 || z.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            "small-SNR slope is a scalar-channel quantity".into(),
        ));
    }
    let hz = entropy_tol(z, 1e-12)?;
    let mut is = Vec::with_capacity(grid.len());
    for &t in grid {
        let sum = SumDensity::of_family(&[x.clone(), z.clone()], &[t.sqrt(), 1.0])?;
        let hy = sum.entropy(1e-12)?;
        is.push(hy.nats - hz.nats);
    }
    let slope = ols_slope_through_origin(grid, &is);
    // Residual scatter around the fit as the honesty term.
    let resid = grid
        .iter()
        .zip(&is)
        .map(|(t, i)| (i - slope * t).abs() / t)
        .fold(0.0f64, f64::max);
    Ok(NumericResult {
        value: slope,
        error_estimate: resid,
        method: Method::Quadrature,
    })
}
