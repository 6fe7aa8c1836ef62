//! Additive Gaussian noise channels: conditional means, MMSE, mutual
//! information under both perturbation conventions, and the complementary
//! relation between Fisher information and MMSE.

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::functionals::{entropy_tol, fisher_info_tol, LN_2PI_E};
use crate::linalg;
use crate::numerics::{fixed_simpson, integrate_2d, integrate_split, NumericResult};
use crate::special::ln_normal_pdf;
use crate::sumdist::SumDensity;

/// Which side of the sum carries the perturbation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Y = X + sqrt(t) Z
    NoiseScaled,
    /// Y = sqrt(t) X + Z
    SignalScaled,
}

/// An additive-noise observation of a signal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub signal: Dist,
    /// Zero-mean Gaussian noise covariance (positive definite).
    pub noise_cov: Vec<Vec<f64>>,
    pub orientation: Orientation,
    pub t: f64,
}

impl ChannelSpec {
    pub fn new(
        signal: Dist,
        noise_cov: Vec<Vec<f64>>,
        orientation: Orientation,
        t: f64,
    ) -> Result<ChannelSpec> {
        let spec = ChannelSpec {
            signal,
            noise_cov,
            orientation,
            t,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 1-D channel with white noise of the given variance.
    pub fn white1(signal: Dist, noise_var: f64, orientation: Orientation, t: f64) -> Result<Self> {
        ChannelSpec::new(signal, vec![vec![noise_var]], orientation, t)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        linalg::validate_cov(&self.noise_cov, self.noise_cov.len())?;
        if self.noise_cov.len() != self.signal.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.signal.dim(),
                got: self.noise_cov.len(),
            });
        }
        if !(self.t >= 0.0) {
            return Err(Error::InvalidSpec("channel time must be >= 0".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.signal.dim()
    }

    /// Signal gain `a` and effective noise covariance so that Y = a X + W.
    fn effective(&self) -> (f64, Vec<Vec<f64>>) {
        match self.orientation {
            Orientation::NoiseScaled => (1.0, linalg::mat_scale(&self.noise_cov, self.t)),
            Orientation::SignalScaled => (self.t.sqrt(), self.noise_cov.clone()),
        }
    }

    /// Law of the output Y.
    pub fn output(&self) -> Result<SumDensity> {
        let (a, w) = self.effective();
        if linalg::trace(&w) == 0.0 {
            return match self.signal.dim() {
                1 => Ok(SumDensity::Spec(self.signal.scale1(a)?)),
                _ if (a - 1.0).abs() < 1e-15 => Ok(SumDensity::Spec(self.signal.clone())),
                _ => Err(Error::UnsupportedDimension(
                    "noiseless vector output with nonunit gain".into(),
                )),
            };
        }
        let noise = Dist::Gaussian {
            mean: vec![0.0; self.dim()],
            cov: w,
        };
        SumDensity::of_family(&[self.signal.clone(), noise], &[a, 1.0])
    }
}

/// Posterior quantities for a single Gaussian component observed in Gaussian
/// noise: output log-density, posterior mean, posterior covariance.
struct ComponentPosterior {
    out_log_pdf: f64,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

fn gaussian_posterior(
    mu: &[f64],
    sigma: &[Vec<f64>],
    a: f64,
    w: &[Vec<f64>],
    y: &[f64],
) -> Result<ComponentPosterior> {
    let n = mu.len();
    // Output component: N(a mu, a^2 Sigma + W).
    let out_cov = linalg::mat_add(&linalg::mat_scale(sigma, a * a), w);
    let out_inv = linalg::inverse(&out_cov)?;
    let resid: Vec<f64> = (0..n).map(|i| y[i] - a * mu[i]).collect();
    let quad = linalg::quad_form(&out_inv, &resid);
    let out_log_pdf =
        -0.5 * (n as f64 * crate::special::LN_2PI + linalg::det(&out_cov).ln() + quad);
    // Posterior: mu + a Sigma out_inv resid, Sigma - a^2 Sigma out_inv Sigma.
    let gain = linalg::mat_scale(&linalg::mat_mul(sigma, &out_inv), a);
    let shift = linalg::mat_vec(&gain, &resid);
    let mean: Vec<f64> = (0..n).map(|i| mu[i] + shift[i]).collect();
    let cov = linalg::mat_add(
        sigma,
        &linalg::mat_scale(&linalg::mat_mul(&gain, &linalg::mat_scale(sigma, a)), -1.0),
    );
    Ok(ComponentPosterior {
        out_log_pdf,
        mean,
        cov,
    })
}

/// Flatten a distribution into Gaussian mixture components, if possible.
fn gaussian_components(d: &Dist) -> Option<Vec<(f64, Vec<f64>, Vec<Vec<f64>>)>> {
    if let Some((m, c)) = d.gaussian_form() {
        return Some(vec![(1.0, m, c)]);
    }
    if let Dist::Mixture {
        weights,
        components,
    } = d
    {
        let mut out = Vec::new();
        for (w, comp) in weights.iter().zip(components) {
            for (cw, m, c) in gaussian_components(comp)? {
                out.push((w * cw, m, c));
            }
        }
        return Some(out);
    }
    None
}

/// Posterior mean and covariance at one output point for a Gaussian-mixture
/// signal: responsibilities weight the component posteriors.
fn mixture_posterior(
    comps: &[(f64, Vec<f64>, Vec<Vec<f64>>)],
    a: f64,
    w: &[Vec<f64>],
    y: &[f64],
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let n = y.len();
    let posts: Vec<(f64, ComponentPosterior)> = comps
        .iter()
        .map(|(wk, m, c)| Ok((*wk, gaussian_posterior(m, c, a, w, y)?)))
        .collect::<Result<_>>()?;
    let max_lp = posts
        .iter()
        .map(|(wk, p)| wk.ln() + p.out_log_pdf)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_lp == f64::NEG_INFINITY {
        return Err(Error::NumericalFailure(
            "output density underflow in posterior".into(),
        ));
    }
    let resp: Vec<f64> = posts
        .iter()
        .map(|(wk, p)| (wk.ln() + p.out_log_pdf - max_lp).exp())
        .collect();
    let norm: f64 = resp.iter().sum();
    let out_pdf_ln = max_lp + norm.ln();
    let mut mean = vec![0.0; n];
    let mut second = linalg::scaled_identity(n, 0.0);
    for ((_, p), r) in posts.iter().zip(&resp) {
        let r = r / norm;
        for i in 0..n {
            mean[i] += r * p.mean[i];
            for j in 0..n {
                second[i][j] += r * (p.cov[i][j] + p.mean[i] * p.mean[j]);
            }
        }
    }
    let mut cov = second;
    for i in 0..n {
        for j in 0..n {
            cov[i][j] -= mean[i] * mean[j];
        }
    }
    Ok((out_pdf_ln, mean, cov))
}

/// E(X | Y = y).
pub fn conditional_mean(spec: &ChannelSpec, y: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    if y.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: y.len(),
        });
    }
    let (a, w) = spec.effective();
    if linalg::trace(&w) == 0.0 {
        // Noiseless observation: X is determined by Y.
        if a == 0.0 {
            let (m, _) = spec.signal.moments()?;
            return Ok(m);
        }
        return Ok(y.iter().map(|v| v / a).collect());
    }
    if a == 0.0 {
        let (m, _) = spec.signal.moments()?;
        return Ok(m);
    }
    if let Some(comps) = gaussian_components(&spec.signal) {
        let (_, mean, _) = mixture_posterior(&comps, a, &w, y)?;
        return Ok(mean);
    }
    match spec.dim() {
        1 => {
            let (num, den) = bayes_moments_1d(&spec.signal, a, w[0][0], y[0], 1e-11)?;
            if den < 1e-280 {
                return Err(Error::NumericalFailure(
                    "posterior normalizer underflow (observation outside support)".into(),
                ));
            }
            Ok(vec![num / den])
        }
        _ => separable(spec)?
            .iter()
            .zip(y)
            .map(|(ch, yi)| conditional_mean(ch, &[*yi]).map(|v| v[0]))
            .collect(),
    }
}

/// Bayes-rule numerator/denominator for 1-D channels:
/// (int x p(x) phi_w(y - a x) dx, int p(x) phi_w(y - a x) dx).
fn bayes_moments_1d(signal: &Dist, a: f64, w: f64, y: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let (m, c) = signal.moments()?;
    let (mu, sig) = (m[0], c[0][0].sqrt());
    let sw = w.sqrt();
    // Restrict to the overlap of the prior's bulk and the likelihood window.
    // The bulk radius covers exponential (not just Gaussian) prior tails.
    let lo = (mu - 22.0 * sig).max((y - 13.0 * sw) / a);
    let hi = (mu + 22.0 * sig).min((y + 13.0 * sw) / a);
    if lo >= hi {
        return Ok((0.0, 0.0));
    }
    let kinks = signal.kinks();
    let weight = |x: f64| {
        let lp = signal.log_pdf(&[x]).unwrap_or(f64::NEG_INFINITY) + ln_normal_pdf(y - a * x, 0.0, w);
        if lp < -700.0 {
            0.0
        } else {
            lp.exp()
        }
    };
    // Cheap fixed-rule probe for the normalizer's scale, then one adaptive
    // pass per moment at a tolerance relative to that scale.
    let scale = fixed_simpson(&weight, lo, hi, 32)?.value.abs();
    if scale <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let tol = (scale * rel_tol).max(1e-17);
    let den = integrate_split(&weight, lo, hi, &kinks, tol)?.value;
    if den <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let num = integrate_split(&|x: f64| x * weight(x), lo, hi, &kinks, tol)?.value;
    Ok((num, den))
}

/// Split a product-signal channel with diagonal noise into per-axis channels.
fn separable(spec: &ChannelSpec) -> Result<Vec<ChannelSpec>> {
    let diag = (0..spec.dim()).all(|i| {
        (0..spec.dim()).all(|j| i == j || spec.noise_cov[i][j] == 0.0)
    });
    if let (Dist::Product { marginals }, true) = (&spec.signal, diag) {
        return marginals
            .iter()
            .enumerate()
            .map(|(i, m)| {
                ChannelSpec::white1(
                    m.clone(),
                    spec.noise_cov[i][i],
                    spec.orientation,
                    spec.t,
                )
            })
            .collect();
    }
    Err(Error::UnsupportedDimension(
        "vector channel needs Gaussian-mixture signal or product signal with diagonal noise".into(),
    ))
}

/// Var(X | Y) = E ||X - E(X|Y)||^2 (scalar trace form).
pub fn mmse(spec: &ChannelSpec) -> Result<NumericResult> {
    let m = mmse_matrix(spec)?;
    Ok(NumericResult {
        value: linalg::trace(&m.0),
        error_estimate: m.1,
        method: m.2,
    })
}

/// Var(X | Y) to a caller-chosen absolute tolerance. Representations that
/// amplify MMSE errors (for instance by 1/t^2 near t = 0) need far tighter
/// kernels than the default.
pub fn mmse_tol(spec: &ChannelSpec, abs_tol: f64) -> Result<NumericResult> {
    let m = mmse_matrix_tol(spec, abs_tol)?;
    Ok(NumericResult {
        value: linalg::trace(&m.0),
        error_estimate: m.1,
        method: m.2,
    })
}

/// E[Cov(X | Y)] with an error estimate.
pub fn mmse_matrix(spec: &ChannelSpec) -> Result<(Vec<Vec<f64>>, f64, crate::numerics::Method)> {
    mmse_matrix_tol(spec, 1e-9)
}

/// E[Cov(X | Y)] with a caller-chosen absolute tolerance for the quadrature
/// branches (closed-form branches are exact regardless).
pub fn mmse_matrix_tol(
    spec: &ChannelSpec,
    abs_tol: f64,
) -> Result<(Vec<Vec<f64>>, f64, crate::numerics::Method)> {
    use crate::numerics::Method;
    spec.validate()?;
    let n = spec.dim();
    let (a, w) = spec.effective();
    if linalg::trace(&w) == 0.0 || a == f64::INFINITY {
        return Ok((linalg::scaled_identity(n, 0.0), 0.0, Method::ClosedForm));
    }
    if a == 0.0 {
        let (_, c) = spec.signal.moments()?;
        return Ok((c, 0.0, Method::ClosedForm));
    }
    // Single Gaussian: fully closed.
    if let Some((_, sigma)) = spec.signal.gaussian_form() {
        let out_cov = linalg::mat_add(&linalg::mat_scale(&sigma, a * a), &w);
        let out_inv = linalg::inverse(&out_cov)?;
        let gain = linalg::mat_scale(&linalg::mat_mul(&sigma, &out_inv), a);
        let cov = linalg::mat_add(
            &sigma,
            &linalg::mat_scale(&linalg::mat_mul(&gain, &linalg::mat_scale(&sigma, a)), -1.0),
        );
        return Ok((cov, 1e-14, Method::ClosedForm));
    }
    // Gaussian mixture: closed posterior per output point, quadrature over y.
    if let Some(comps) = gaussian_components(&spec.signal) {
        let (_, sx) = spec.signal.moments()?;
        let out_cov = linalg::mat_add(&linalg::mat_scale(&sx, a * a), &w);
        let (my, _) = spec.signal.moments()?;
        let mean_y: Vec<f64> = my.iter().map(|m| a * m).collect();
        let entry = |i: usize, j: usize| -> Result<NumericResult> {
            let f1 = |y: &[f64]| -> f64 {
                match mixture_posterior(&comps, a, &w, y) {
                    Ok((lp, _, cov)) => {
                        if lp < -700.0 {
                            0.0
                        } else {
                            lp.exp() * cov[i][j]
                        }
                    }
                    Err(_) => 0.0,
                }
            };
            match n {
                1 => {
                    let s = out_cov[0][0].sqrt();
                    integrate_split(
                        &|y: f64| f1(&[y]),
                        mean_y[0] - 13.0 * s,
                        mean_y[0] + 13.0 * s,
                        &[],
                        (abs_tol * 0.1).min(1e-11),
                    )
                }
                2 => {
                    let s0 = out_cov[0][0].sqrt();
                    let s1 = out_cov[1][1].sqrt();
                    integrate_2d(
                        &|y0: f64, y1: f64| f1(&[y0, y1]),
                        (mean_y[0] - 12.0 * s0, mean_y[0] + 12.0 * s0),
                        (mean_y[1] - 12.0 * s1, mean_y[1] + 12.0 * s1),
                        1e-8,
                    )
                }
                _ => Err(Error::UnsupportedDimension(
                    "mixture MMSE matrix implemented for n <= 2".into(),
                )),
            }
        };
        let mut out = linalg::scaled_identity(n, 0.0);
        let mut err = 0.0;
        for i in 0..n {
            for j in i..n {
                let r = entry(i, j)?;
                out[i][j] = r.value;
                out[j][i] = r.value;
                err += r.error_estimate;
            }
        }
        return Ok((out, err, Method::Quadrature));
    }
    // Product signal with diagonal noise: independent scalar channels.
    if n > 1 {
        if let Ok(parts) = separable(spec) {
            let mut out = linalg::scaled_identity(n, 0.0);
            let mut err = 0.0;
            for (i, ch) in parts.iter().enumerate() {
                let (m, e, _) = mmse_matrix_tol(ch, abs_tol / parts.len() as f64)?;
                out[i][i] = m[0][0];
                err += e;
            }
            return Ok((out, err, Method::Quadrature));
        }
        return Err(Error::UnsupportedDimension(
            "vector MMSE needs Gaussian-mixture or product structure".into(),
        ));
    }
    // Generic 1-D: Var(X|Y) = E X^2 - E[m(Y)^2].
    let (mx, cx) = spec.signal.moments()?;
    let ex2 = cx[0][0] + mx[0] * mx[0];
    let var_y = a * a * cx[0][0] + w[0][0];
    let (my, sy) = (a * mx[0], var_y.sqrt());
    // Inner Bayes moments must resolve m(y) relatively finer than the outer
    // absolute target, and the outer window must reach far enough that
    // exponential output tails (weighted by m(y)^2 growth) fall below it.
    // The y-integrand's pointwise relative error integrates to a comparable
    // absolute error in E[m(Y)^2], so a fraction of abs_tol suffices.
    let rel_tol = (abs_tol * 0.1).clamp(1e-14, 1e-7);
    let f = |y: f64| -> f64 {
        match bayes_moments_1d(&spec.signal, a, w[0][0], y, rel_tol) {
            Ok((num, den)) if den > 1e-290 => num * num / den,
            _ => 0.0,
        }
    };
    let r = integrate_split(&f, my - 25.0 * sy, my + 25.0 * sy, &[], abs_tol * 0.5)?;
    let v = (ex2 - r.value).max(0.0);
    Ok((vec![vec![v]], r.error_estimate + abs_tol, Method::Quadrature))
}

/// I(X + sqrt(t) Z; Z) = h(X + sqrt(t) Z) - h(X); zero at t = 0.
pub fn mutual_info_noise(spec: &ChannelSpec) -> Result<NumericResult> {
    if spec.orientation != Orientation::NoiseScaled {
        return Err(Error::InvalidSpec(
            "mutual_info_noise requires noise-scaled orientation".into(),
        ));
    }
    spec.validate()?;
    if spec.t == 0.0 {
        return Ok(NumericResult::closed(0.0));
    }
    let hx = entropy_tol(&spec.signal, 1e-10)?;
    let hy = spec.output()?.entropy(1e-10)?;
    Ok(NumericResult::quad(
        (hy.nats - hx.nats).max(0.0),
        hy.error_estimate + hx.error_estimate,
    ))
}

/// I(X; sqrt(t) X + Z) = h(sqrt(t) X + Z) - h(Z); zero at t = 0 by convention.
pub fn mutual_info_signal(spec: &ChannelSpec) -> Result<NumericResult> {
    if spec.orientation != Orientation::SignalScaled {
        return Err(Error::InvalidSpec(
            "mutual_info_signal requires signal-scaled orientation".into(),
        ));
    }
    spec.validate()?;
    if spec.t == 0.0 {
        return Ok(NumericResult::closed(0.0));
    }
    let n = spec.dim() as f64;
    let hz = 0.5 * (n * LN_2PI_E + linalg::det(&spec.noise_cov).ln());
    let hy = spec.output()?.entropy(1e-10)?;
    Ok(NumericResult::quad(
        (hy.nats - hz).max(0.0),
        hy.error_estimate,
    ))
}

/// Residual of sigma^2 J(X+Z) + sigma^{-2} Var(X|X+Z) - n for white N(0, sigma^2) noise.
pub fn complementary_residual(x: &Dist, noise_var: f64) -> Result<NumericResult> {
    if noise_var <= 0.0 {
        return Err(Error::DomainError("noise variance must be positive".into()));
    }
    let n = x.dim();
    let eye = linalg::scaled_identity(n, 1.0);
    let smoothed = x.convolve_gaussian(noise_var, &eye)?;
    let j = fisher_info_tol(&smoothed, 1e-10)?;
    let ch = ChannelSpec::new(
        x.clone(),
        linalg::scaled_identity(n, noise_var),
        Orientation::NoiseScaled,
        1.0,
    )?;
    let mm = mmse(&ch)?;
    Ok(NumericResult::quad(
        noise_var * j.scalar + mm.value / noise_var - n as f64,
        noise_var * j.error_estimate + mm.error_estimate / noise_var,
    ))
}

/// Matrix residual of J(X+Z) Cov(Z) + Cov(Z)^{-1} Cov(X|X+Z) - I (Frobenius norm).
pub fn complementary_residual_matrix(x: &Dist, noise_cov: &[Vec<f64>]) -> Result<NumericResult> {
    linalg::validate_cov(noise_cov, x.dim())?;
    let n = x.dim();
    let smoothed = x.convolve_gaussian(1.0, noise_cov)?;
    let j = fisher_info_tol(&smoothed, 1e-9)?;
    let ch = ChannelSpec::new(x.clone(), noise_cov.to_vec(), Orientation::NoiseScaled, 1.0)?;
    let (mm, mm_err, _) = mmse_matrix(&ch)?;
    let inv = linalg::inverse(noise_cov)?;
    let lhs = linalg::mat_add(
        &linalg::mat_mul(&j.matrix, noise_cov),
        &linalg::mat_mul(&inv, &mm),
    );
    let resid = linalg::mat_add(&lhs, &linalg::scaled_identity(n, -1.0));
    Ok(NumericResult::quad(
        linalg::frobenius(&resid),
        j.error_estimate + mm_err,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mixture_signal() -> Dist {
        Dist::mixture(
            vec![0.3, 0.7],
            vec![Dist::gaussian1(-2.0, 1.0), Dist::gaussian1(2.0, 4.0)],
        )
    }

    #[test]
    fn gaussian_conditional_mean_is_linear() {
        let ch = ChannelSpec::white1(
            Dist::gaussian1(0.0, 1.0),
            1.0,
            Orientation::NoiseScaled,
            1.0,
        )
        .unwrap();
        let m = conditional_mean(&ch, &[1.0]).unwrap();
        assert_relative_eq!(m[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_signal_conditional_mean_vanishes_at_origin() {
        let sym = Dist::mixture(
            vec![0.5, 0.5],
            vec![Dist::gaussian1(-2.0, 1.0), Dist::gaussian1(2.0, 1.0)],
        );
        let ch = ChannelSpec::white1(sym, 1.0, Orientation::NoiseScaled, 1.0).unwrap();
        let m = conditional_mean(&ch, &[0.0]).unwrap();
        assert_relative_eq!(m[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_signal_conditional_mean_by_symmetry() {
        let ch = ChannelSpec::white1(
            Dist::uniform(0.0, 1.0),
            1.0,
            Orientation::NoiseScaled,
            1.0,
        )
        .unwrap();
        let m = conditional_mean(&ch, &[0.5]).unwrap();
        assert_relative_eq!(m[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_mmse_closed_form() {
        let ch = ChannelSpec::white1(
            Dist::gaussian1(0.0, 1.0),
            1.0,
            Orientation::NoiseScaled,
            1.0,
        )
        .unwrap();
        assert_relative_eq!(mmse(&ch).unwrap().value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_channel_has_zero_mmse() {
        let ch = ChannelSpec::white1(mixture_signal(), 1.0, Orientation::NoiseScaled, 0.0)
            .unwrap();
        assert_eq!(mmse(&ch).unwrap().value, 0.0);
    }

    /// Frozen before the build: nested quadrature of E[Var(X|Y)] for the
    /// symmetric mixture (N(-2,1) + N(2,1))/2 observed in unit Gaussian noise.
    const MIXTURE_MMSE: f64 = 0.7310182217450114;

    fn symmetric_mixture() -> Dist {
        Dist::mixture(
            vec![0.5, 0.5],
            vec![Dist::gaussian1(-2.0, 1.0), Dist::gaussian1(2.0, 1.0)],
        )
    }

    #[test]
    fn mixture_mmse_matches_golden_value() {
        let ch = ChannelSpec::white1(symmetric_mixture(), 1.0, Orientation::NoiseScaled, 1.0)
            .unwrap();
        let v = mmse(&ch).unwrap();
        assert_relative_eq!(v.value, MIXTURE_MMSE, epsilon = 1e-7);
    }

    #[test]
    fn generic_quadrature_agrees_with_mixture_closed_path() {
        // Evaluate the mixture channel through the generic Bayes-quadrature
        // path by disguising the signal as a smoothed distribution.
        let disguised = Dist::GaussianSmoothed {
            base: Box::new(Dist::mixture(
                vec![0.5, 0.5],
                vec![Dist::gaussian1(-2.0, 0.5), Dist::gaussian1(2.0, 0.5)],
            )),
            t: 0.5,
            noise_cov: vec![vec![1.0]],
        };
        let ch = ChannelSpec::white1(disguised, 1.0, Orientation::NoiseScaled, 1.0).unwrap();
        let v = mmse(&ch).unwrap();
        assert_relative_eq!(v.value, MIXTURE_MMSE, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_mutual_info_noise_closed() {
        for &t in &[0.25, 1.0, 4.0] {
            let ch = ChannelSpec::white1(
                Dist::gaussian1(0.0, 2.0),
                1.5,
                Orientation::NoiseScaled,
                t,
            )
            .unwrap();
            let i = mutual_info_noise(&ch).unwrap();
            assert_relative_eq!(i.value, 0.5 * (1.0 + t * 1.5 / 2.0).ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn mutual_info_noise_small_t_matches_fisher_slope() {
        // First-order expansion: I ~ t J(X) sigma_Z^2 / 2 with J(Laplace)=2.
        let ch = ChannelSpec::white1(
            Dist::laplace(0.0, 1.0 / std::f64::consts::SQRT_2),
            1.0,
            Orientation::NoiseScaled,
            0.01,
        )
        .unwrap();
        let i = mutual_info_noise(&ch).unwrap();
        assert!(
            (i.value - 0.01).abs() < 0.002,
            "I = {} should be within 20% of 0.01",
            i.value
        );
    }

    #[test]
    fn gaussian_mutual_info_signal_closed() {
        let ch = ChannelSpec::white1(
            Dist::gaussian1(0.0, 1.0),
            1.0,
            Orientation::SignalScaled,
            1.0,
        )
        .unwrap();
        let i = mutual_info_signal(&ch).unwrap();
        assert_relative_eq!(i.value, 0.5 * 2f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn orientation_duality_between_conventions() {
        // I(X; sqrt(t) X + Z) equals I(X; X + Z / sqrt(t)).
        let x = mixture_signal();
        for &t in &[0.25, 1.0, 4.0] {
            let sig = ChannelSpec::white1(x.clone(), 1.0, Orientation::SignalScaled, t).unwrap();
            let lhs = mutual_info_signal(&sig).unwrap();
            // Right side directly: h(X + Z/sqrt(t)) - h(Z/sqrt(t)).
            let v = 1.0 / t;
            let hy = entropy_tol(
                &x.convolve_gaussian(v, &[vec![1.0]]).unwrap(),
                1e-10,
            )
            .unwrap();
            let hz = 0.5 * (LN_2PI_E + v.ln());
            assert_relative_eq!(lhs.value, hy.nats - hz, epsilon = 1e-7);
        }
    }

    #[test]
    fn mutual_info_noise_is_nondecreasing() {
        let x = mixture_signal();
        let mut last = -1.0;
        for &t in &[0.0, 0.2, 0.5, 1.0, 2.0, 4.0] {
            let ch = ChannelSpec::white1(x.clone(), 1.0, Orientation::NoiseScaled, t).unwrap();
            let i = mutual_info_noise(&ch).unwrap().value;
            assert!(i + 1e-9 >= last, "I({t}) = {i} < previous {last}");
            last = i;
        }
    }

    #[test]
    fn mmse_data_processing_nondecreasing_in_noise() {
        let x = mixture_signal();
        let mut last = -1.0;
        for &v in &[0.2, 0.5, 1.0, 2.0, 4.0] {
            let ch = ChannelSpec::white1(x.clone(), v, Orientation::NoiseScaled, 1.0).unwrap();
            let m = mmse(&ch).unwrap().value;
            assert!(m + 1e-8 >= last, "mmse({v}) = {m} < previous {last}");
            last = m;
        }
    }

    #[test]
    fn total_covariance_identity_by_monte_carlo() {
        // Cov(X) = E Var(X|Y) + Var(E(X|Y)) for the Gaussian pair.
        let ch = ChannelSpec::white1(
            Dist::gaussian1(0.0, 1.0),
            1.0,
            Orientation::NoiseScaled,
            1.0,
        )
        .unwrap();
        let samples = Dist::gaussian1(0.0, 2.0).sample(20_000, 7).unwrap();
        let mm = mmse(&ch).unwrap().value;
        let mut var_cm = 0.0;
        for s in &samples {
            let m = conditional_mean(&ch, &[s[0]]).unwrap()[0];
            var_cm += m * m;
        }
        var_cm /= samples.len() as f64;
        // Standard error of the MC estimate of Var(E(X|Y)) ~ sqrt(2/N)*0.5.
        let se = (2.0 / samples.len() as f64).sqrt() * 0.5;
        assert!(
            (mm + var_cm - 1.0).abs() < 3.0 * se,
            "total covariance residual {} exceeds 3 standard errors",
            mm + var_cm - 1.0
        );
    }

    #[test]
    fn complementary_relation_gaussian_exact() {
        let r = complementary_residual(&Dist::gaussian1(0.0, 1.0), 1.0).unwrap();
        assert!(r.value.abs() < 1e-10, "residual {}", r.value);
    }

    #[test]
    fn complementary_relation_laplace_and_mixture() {
        let lap = Dist::laplace(0.0, 1.0 / std::f64::consts::SQRT_2);
        let r = complementary_residual(&lap, 1.0).unwrap();
        assert!(r.value.abs() < 1e-3, "Laplace residual {}", r.value);
        for &v in &[0.5, 1.0, 2.0] {
            let r = complementary_residual(&mixture_signal(), v).unwrap();
            assert!(r.value.abs() < 1e-3, "mixture residual {} at {v}", r.value);
        }
    }

    #[test]
    fn complementary_matrix_residual_gaussian_2d() {
        let x = Dist::Gaussian {
            mean: vec![0.0, 0.0],
            cov: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
        };
        let z = vec![vec![1.0, 0.2], vec![0.2, 0.8]];
        let r = complementary_residual_matrix(&x, &z).unwrap();
        assert!(r.value < 1e-9, "matrix residual {}", r.value);
    }
}
