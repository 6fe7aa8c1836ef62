//! Distribution specifications with exact densities.
//!
//! A [`Dist`] is a closed, serializable description of a probability law on
//! R^n: analytic families, finite mixtures, products of marginals, linear
//! images, and Gaussian-smoothed composites. Densities are evaluated in log
//! space; smoothing against Gaussian noise is pushed into closed forms
//! wherever the structure allows and falls back to 1-D convolution quadrature
//! otherwise.

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{integrate_split, Method, NumericResult};
use crate::special::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Deterministic sampling seed.
pub type RngSeed = u64;

/// Closed description of a probability law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Dist {
    /// N(mean, cov) on R^n, cov symmetric positive definite.
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Laplace(location, scale) on R, density e^{-|x-m|/b}/(2b).
    Laplace { location: f64, scale: f64 },
    /// Uniform(lower, upper) on R.
    Uniform { lower: f64, upper: f64 },
    /// Cauchy(location, scale) on R; no finite moments.
    Cauchy { location: f64, scale: f64 },
    /// Finite convex combination of same-dimension components.
    Mixture {
        weights: Vec<f64>,
        components: Vec<Dist>,
    },
    /// Independent marginals stacked into a vector.
    Product { marginals: Vec<Dist> },
    /// Image of `base` under the linear map `matrix` (r x m, full row rank).
    LinearImage {
        matrix: Vec<Vec<f64>>,
        base: Box<Dist>,
    },
    /// base + sqrt(t) * N(0, noise_cov), independent noise.
    GaussianSmoothed {
        base: Box<Dist>,
        t: f64,
        noise_cov: Vec<Vec<f64>>,
    },
}

impl Dist {
    // ----- constructors ---------------------------------------------------

    pub fn gaussian1(mean: f64, var: f64) -> Dist {
        Dist::Gaussian {
            mean: vec![mean],
            cov: vec![vec![var]],
        }
    }

    pub fn standard_gaussian(n: usize) -> Dist {
        Dist::Gaussian {
            mean: vec![0.0; n],
            cov: linalg::identity(n),
        }
    }

    pub fn laplace(location: f64, scale: f64) -> Dist {
        Dist::Laplace { location, scale }
    }

    /// Unit-variance Laplace: scale 1/sqrt 2.
    pub fn unit_laplace() -> Dist {
        Dist::laplace(0.0, 1.0 / SQRT_2)
    }

    pub fn uniform(lower: f64, upper: f64) -> Dist {
        Dist::Uniform { lower, upper }
    }

    pub fn cauchy(location: f64, scale: f64) -> Dist {
        Dist::Cauchy { location, scale }
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<Dist>) -> Dist {
        Dist::Mixture {
            weights,
            components,
        }
    }

    /// The symmetric two-Gaussian test mixture (1/2)N(-2,1) + (1/2)N(2,1).
    pub fn two_gaussian_mixture() -> Dist {
        Dist::mixture(
            vec![0.5, 0.5],
            vec![Dist::gaussian1(-2.0, 1.0), Dist::gaussian1(2.0, 1.0)],
        )
    }

    pub fn smoothed(base: Dist, t: f64, noise_cov: Vec<Vec<f64>>) -> Dist {
        Dist::GaussianSmoothed {
            base: Box::new(base),
            t,
            noise_cov,
        }
    }

    // ----- structural queries ----------------------------------------------

    pub fn dim(&self) -> usize {
        match self {
            Dist::Gaussian { mean, .. } => mean.len(),
            Dist::Laplace { .. } | Dist::Uniform { .. } | Dist::Cauchy { .. } => 1,
            Dist::Mixture { components, .. } => {
                components.first().map(|c| c.dim()).unwrap_or(0)
            }
            Dist::Product { marginals } => marginals.iter().map(|m| m.dim()).sum(),
            Dist::LinearImage { matrix, .. } => matrix.len(),
            Dist::GaussianSmoothed { base, .. } => base.dim(),
        }
    }

    /// Validate the specification invariants recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            Dist::Gaussian { mean, cov } => linalg::validate_cov(cov, mean.len()),
            Dist::Laplace { scale, .. } | Dist::Cauchy { scale, .. } => {
                if *scale > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec("scale must be positive".into()))
                }
            }
            Dist::Uniform { lower, upper } => {
                if lower < upper {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec("uniform needs lower < upper".into()))
                }
            }
            Dist::Mixture {
                weights,
                components,
            } => {
                if components.is_empty() || weights.len() != components.len() {
                    return Err(Error::InvalidSpec(
                        "mixture needs matching non-empty weights/components".into(),
                    ));
                }
                if weights.iter().any(|w| *w <= 0.0) {
                    return Err(Error::InvalidSpec("mixture weights must be positive".into()));
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidSpec("mixture weights must sum to 1".into()));
                }
                let d = components[0].dim();
                for c in components {
                    if c.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: c.dim(),
                        });
                    }
                    c.validate()?;
                }
                Ok(())
            }
            Dist::Product { marginals } => {
                if marginals.is_empty() {
                    return Err(Error::InvalidSpec("product needs marginals".into()));
                }
                marginals.iter().try_for_each(|m| m.validate())
            }
            Dist::LinearImage { matrix, base } => {
                base.validate()?;
                let m = base.dim();
                if matrix.is_empty() || matrix.iter().any(|r| r.len() != m) {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: matrix.first().map(|r| r.len()).unwrap_or(0),
                    });
                }
                let r = matrix.len();
                if r > m {
                    return Err(Error::RankDeficient(
                        "linear image must have full row rank (r <= m)".into(),
                    ));
                }
                // Full row rank check through the Gram determinant.
                let gram = linalg::mat_mul(matrix, &linalg::transpose(matrix));
                if linalg::det(&gram).abs() < 1e-12 {
                    return Err(Error::RankDeficient("linear image rows are dependent".into()));
                }
                Ok(())
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                base.validate()?;
                if *t < 0.0 {
                    return Err(Error::InvalidSpec("smoothing time must be >= 0".into()));
                }
                linalg::validate_cov(noise_cov, base.dim())
            }
        }
    }

    /// Kink locations of a 1-D density (used as quadrature split points).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Dist::Laplace { location, .. } => vec![*location],
            Dist::Uniform { lower, upper } => vec![*lower, *upper],
            Dist::Mixture { components, .. } => {
                let mut k: Vec<f64> = components.iter().flat_map(|c| c.kinks()).collect();
                k.sort_by(|a, b| a.partial_cmp(b).unwrap());
                k.dedup();
                k
            }
            Dist::GaussianSmoothed { base, t, .. } => {
                if *t == 0.0 {
                    base.kinks()
                } else {
                    vec![]
                }
            }
            Dist::LinearImage { matrix, base } => {
                if self.dim() == 1 && base.dim() == 1 {
                    base.kinks().iter().map(|k| k * matrix[0][0]).collect()
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    /// Structural Gaussian detection: Some((mean, cov)) when the law is
    /// exactly Gaussian by construction.
    pub fn gaussian_form(&self) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        match self {
            Dist::Gaussian { mean, cov } => Some((mean.clone(), cov.clone())),
            Dist::Mixture {
                components,
                weights,
            } => {
                let forms: Option<Vec<_>> =
                    components.iter().map(|c| c.gaussian_form()).collect();
                let forms = forms?;
                let (m0, c0) = &forms[0];
                let same = forms.iter().all(|(m, c)| {
                    m.iter().zip(m0).all(|(a, b)| (a - b).abs() < 1e-12)
                        && c.iter().zip(c0).all(|(ra, rb)| {
                            ra.iter().zip(rb).all(|(a, b)| (a - b).abs() < 1e-12)
                        })
                });
                let _ = weights;
                if same {
                    Some((m0.clone(), c0.clone()))
                } else {
                    None
                }
            }
            Dist::Product { marginals } => {
                let forms: Option<Vec<_>> = marginals.iter().map(|m| m.gaussian_form()).collect();
                let forms = forms?;
                let n: usize = forms.iter().map(|(m, _)| m.len()).sum();
                let mut mean = Vec::with_capacity(n);
                let mut cov = linalg::scaled_identity(n, 0.0);
                let mut off = 0;
                for (m, c) in &forms {
                    for (i, row) in c.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            cov[off + i][off + j] = *v;
                        }
                    }
                    mean.extend_from_slice(m);
                    off += m.len();
                }
                Some((mean, cov))
            }
            Dist::LinearImage { matrix, base } => {
                let (m, c) = base.gaussian_form()?;
                let mean = linalg::mat_vec(matrix, &m);
                let cov = linalg::mat_mul(&linalg::mat_mul(matrix, &c), &linalg::transpose(matrix));
                Some((mean, cov))
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                let (m, c) = base.gaussian_form()?;
                Some((m, linalg::mat_add(&c, &linalg::mat_scale(noise_cov, *t))))
            }
            _ => None,
        }
    }

    // ----- moments ---------------------------------------------------------

    /// Exact mean vector and covariance matrix.
    pub fn moments(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        match self {
            Dist::Gaussian { mean, cov } => Ok((mean.clone(), cov.clone())),
            Dist::Laplace { location, scale } => {
                Ok((vec![*location], vec![vec![2.0 * scale * scale]]))
            }
            Dist::Uniform { lower, upper } => {
                let w = upper - lower;
                Ok((vec![0.5 * (lower + upper)], vec![vec![w * w / 12.0]]))
            }
            Dist::Cauchy { .. } => Err(Error::HeavyTail(
                "Cauchy has no mean or covariance".into(),
            )),
            Dist::Mixture {
                weights,
                components,
            } => {
                let n = self.dim();
                let mut mean = vec![0.0; n];
                let mut second = linalg::scaled_identity(n, 0.0);
                for (w, c) in weights.iter().zip(components) {
                    let (m, cv) = c.moments()?;
                    for i in 0..n {
                        mean[i] += w * m[i];
                        for j in 0..n {
                            second[i][j] += w * (cv[i][j] + m[i] * m[j]);
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        second[i][j] -= mean[i] * mean[j];
                    }
                }
                Ok((mean, second))
            }
            Dist::Product { marginals } => {
                let n = self.dim();
                let mut mean = Vec::with_capacity(n);
                let mut cov = linalg::scaled_identity(n, 0.0);
                let mut off = 0;
                for m in marginals {
                    let (mm, mc) = m.moments()?;
                    for (i, row) in mc.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            cov[off + i][off + j] = *v;
                        }
                    }
                    off += mm.len();
                    mean.extend(mm);
                }
                Ok((mean, cov))
            }
            Dist::LinearImage { matrix, base } => {
                let (m, c) = base.moments()?;
                Ok((
                    linalg::mat_vec(matrix, &m),
                    linalg::mat_mul(&linalg::mat_mul(matrix, &c), &linalg::transpose(matrix)),
                ))
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                let (m, c) = base.moments()?;
                Ok((m, linalg::mat_add(&c, &linalg::mat_scale(noise_cov, *t))))
            }
        }
    }

    // ----- density ---------------------------------------------------------

    /// Log density at `x`; `-inf` outside the support.
    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_pdf_ext(x)?.0)
    }

    /// Density at `x` with an error estimate and method tag.
    pub fn pdf_at(&self, x: &[f64]) -> Result<NumericResult> {
        let (lp, rel_err, method) = self.log_pdf_ext(x)?;
        let p = if lp == f64::NEG_INFINITY { 0.0 } else { lp.exp() };
        Ok(NumericResult {
            value: p,
            error_estimate: p * rel_err,
            method,
        })
    }

    /// (log pdf, relative error of the pdf, method).
    fn log_pdf_ext(&self, x: &[f64]) -> Result<(f64, f64, Method)> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        match self {
            Dist::Gaussian { mean, cov } => {
                let d: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
                let inv = linalg::inverse(cov)?;
                let det = linalg::det(cov);
                if det <= 0.0 {
                    return Err(Error::RankDeficient("Gaussian covariance".into()));
                }
                let q = linalg::quad_form(&inv, &d);
                Ok((
                    -0.5 * (n as f64 * LN_2PI + det.ln() + q),
                    0.0,
                    Method::ClosedForm,
                ))
            }
            Dist::Laplace { location, scale } => Ok((
                -(2.0 * scale).ln() - (x[0] - location).abs() / scale,
                0.0,
                Method::ClosedForm,
            )),
            Dist::Uniform { lower, upper } => {
                let v = if x[0] >= *lower && x[0] <= *upper {
                    -(upper - lower).ln()
                } else {
                    f64::NEG_INFINITY
                };
                Ok((v, 0.0, Method::ClosedForm))
            }
            Dist::Cauchy { location, scale } => {
                let z = x[0] - location;
                Ok((
                    (scale / std::f64::consts::PI).ln() - (scale * scale + z * z).ln(),
                    0.0,
                    Method::ClosedForm,
                ))
            }
            Dist::Mixture {
                weights,
                components,
            } => {
                let mut terms = Vec::with_capacity(components.len());
                let mut rel = 0.0f64;
                let mut method = Method::ClosedForm;
                for (w, c) in weights.iter().zip(components) {
                    let (lp, r, m) = c.log_pdf_ext(x)?;
                    terms.push(w.ln() + lp);
                    rel = rel.max(r);
                    if m == Method::Quadrature {
                        method = Method::Quadrature;
                    }
                }
                Ok((log_sum_exp(&terms), rel, method))
            }
            Dist::Product { marginals } => {
                let mut off = 0;
                let mut acc = 0.0;
                let mut rel = 0.0f64;
                let mut method = Method::ClosedForm;
                for m in marginals {
                    let d = m.dim();
                    let (lp, r, me) = m.log_pdf_ext(&x[off..off + d])?;
                    acc += lp;
                    rel += r;
                    if me == Method::Quadrature {
                        method = Method::Quadrature;
                    }
                    off += d;
                }
                Ok((acc, rel, method))
            }
            Dist::LinearImage { matrix, base } => {
                if matrix.len() != base.dim() {
                    return Err(Error::UnsupportedDimension(
                        "density of a non-square linear image needs the transform module".into(),
                    ));
                }
                let inv = linalg::inverse(matrix)?;
                let u = linalg::mat_vec(&inv, x);
                let (lp, r, m) = base.log_pdf_ext(&u)?;
                Ok((lp - linalg::det(matrix).abs().ln(), r, m))
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                smoothed_log_pdf(base, *t, noise_cov, x)
            }
        }
    }

    /// Score (gradient of the log density) at `x`.
    ///
    /// # Notes
    /// Closed forms are used for Gaussians, Laplace (almost everywhere),
    /// Cauchy, smooth mixtures and invertible linear images; smoothed
    /// composites differentiate their closed-form log density numerically.
    pub fn score_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        match self {
            Dist::Gaussian { mean, cov } => {
                let d: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
                let inv = linalg::inverse(cov)?;
                Ok(linalg::mat_vec(&inv, &d).iter().map(|v| -v).collect())
            }
            Dist::Laplace { location, scale } => {
                let z = x[0] - location;
                Ok(vec![-z.signum() / scale])
            }
            Dist::Uniform { .. } => Err(Error::NonSmoothDensity(
                "uniform density is not differentiable; smooth it first".into(),
            )),
            Dist::Cauchy { location, scale } => {
                let z = x[0] - location;
                Ok(vec![-2.0 * z / (scale * scale + z * z)])
            }
            Dist::Mixture {
                weights,
                components,
            } => {
                // Responsibility-weighted component scores.
                let mut lws = Vec::with_capacity(components.len());
                let mut scs = Vec::with_capacity(components.len());
                for (w, c) in weights.iter().zip(components) {
                    lws.push(w.ln() + c.log_pdf(x)?);
                    scs.push(c.score_at(x)?);
                }
                let lse = log_sum_exp(&lws);
                if lse == f64::NEG_INFINITY {
                    return Err(Error::DomainError("zero density point".into()));
                }
                let mut out = vec![0.0; n];
                for (lw, s) in lws.iter().zip(&scs) {
                    let r = (lw - lse).exp();
                    for i in 0..n {
                        out[i] += r * s[i];
                    }
                }
                Ok(out)
            }
            Dist::Product { marginals } => {
                let mut out = Vec::with_capacity(n);
                let mut off = 0;
                for m in marginals {
                    let d = m.dim();
                    out.extend(m.score_at(&x[off..off + d])?);
                    off += d;
                }
                Ok(out)
            }
            Dist::LinearImage { matrix, base } => {
                if matrix.len() != base.dim() {
                    return Err(Error::UnsupportedDimension(
                        "score of a non-square linear image".into(),
                    ));
                }
                let inv = linalg::inverse(matrix)?;
                let s = base.score_at(&linalg::mat_vec(&inv, x))?;
                Ok(linalg::mat_vec(&linalg::transpose(&inv), &s))
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                if *t == 0.0 {
                    return base.score_at(x);
                }
                if let Some((mean, cov)) = self.gaussian_form() {
                    let g = Dist::Gaussian { mean, cov };
                    return g.score_at(x);
                }
                // Central differences of the (accurate) smoothed log density.
                let _ = (base, noise_cov);
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let h = 1e-5 * (1.0 + x[i].abs());
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += h;
                    xm[i] -= h;
                    out.push((self.log_pdf(&xp)? - self.log_pdf(&xm)?) / (2.0 * h));
                }
                Ok(out)
            }
        }
    }

    /// Whether a closed-form score is available (vs. numeric differentiation).
    pub fn has_closed_score(&self) -> bool {
        match self {
            Dist::Gaussian { .. } | Dist::Laplace { .. } | Dist::Cauchy { .. } => true,
            Dist::Uniform { .. } => false,
            Dist::Mixture { components, .. } => components.iter().all(|c| c.has_closed_score()),
            Dist::Product { marginals } => marginals.iter().all(|m| m.has_closed_score()),
            Dist::LinearImage { matrix, base } => {
                matrix.len() == base.dim() && base.has_closed_score()
            }
            Dist::GaussianSmoothed { t, .. } => {
                *t == 0.0 || self.gaussian_form().is_some()
            }
        }
    }

    // ----- sampling ----------------------------------------------------------

    /// Draw `count` samples deterministically from `seed`.
    pub fn sample(&self, count: usize, seed: RngSeed) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng)).collect()
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match self {
            Dist::Gaussian { mean, cov } => {
                let l = linalg::cholesky(cov)?;
                let z: Vec<f64> = (0..mean.len()).map(|_| std_normal_draw(rng)).collect();
                let lz = linalg::mat_vec(&l, &z);
                Ok(mean.iter().zip(lz).map(|(m, v)| m + v).collect())
            }
            Dist::Laplace { location, scale } => {
                let u: f64 = rng.gen_range(-0.5..0.5);
                Ok(vec![
                    location - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln(),
                ])
            }
            Dist::Uniform { lower, upper } => Ok(vec![rng.gen_range(*lower..*upper)]),
            Dist::Cauchy { location, scale } => {
                let u: f64 = rng.gen_range(-0.5..0.5);
                Ok(vec![location + scale * (std::f64::consts::PI * u).tan()])
            }
            Dist::Mixture {
                weights,
                components,
            } => {
                let u: f64 = rng.gen_range(0.0..1.0);
                let mut acc = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    acc += w;
                    if u <= acc {
                        return c.sample_one(rng);
                    }
                }
                components.last().unwrap().sample_one(rng)
            }
            Dist::Product { marginals } => {
                let mut out = Vec::with_capacity(self.dim());
                for m in marginals {
                    out.extend(m.sample_one(rng)?);
                }
                Ok(out)
            }
            Dist::LinearImage { matrix, base } => {
                let u = base.sample_one(rng)?;
                Ok(linalg::mat_vec(matrix, &u))
            }
            Dist::GaussianSmoothed { base, t, noise_cov } => {
                let mut x = base.sample_one(rng)?;
                if *t > 0.0 {
                    let l = linalg::cholesky(noise_cov)?;
                    let z: Vec<f64> = (0..x.len()).map(|_| std_normal_draw(rng)).collect();
                    let lz = linalg::mat_vec(&l, &z);
                    for (xi, n) in x.iter_mut().zip(lz) {
                        *xi += t.sqrt() * n;
                    }
                }
                Ok(x)
            }
        }
    }

    // ----- structure algebra --------------------------------------------------

    /// The law of X + sqrt(t) N(0, noise_cov), simplified structurally where
    /// possible (Gaussians absorb, mixtures/products distribute, repeated
    /// smoothing with the same noise shape merges).
    pub fn convolve_gaussian(&self, t: f64, noise_cov: &[Vec<f64>]) -> Result<Dist> {
        if t < 0.0 {
            return Err(Error::DomainError("smoothing time must be >= 0".into()));
        }
        linalg::validate_cov(noise_cov, self.dim())?;
        if t == 0.0 {
            return Ok(self.clone());
        }
        Ok(match self {
            Dist::Gaussian { mean, cov } => Dist::Gaussian {
                mean: mean.clone(),
                cov: linalg::mat_add(cov, &linalg::mat_scale(noise_cov, t)),
            },
            Dist::Mixture {
                weights,
                components,
            } => Dist::Mixture {
                weights: weights.clone(),
                components: components
                    .iter()
                    .map(|c| c.convolve_gaussian(t, noise_cov))
                    .collect::<Result<_>>()?,
            },
            Dist::Product { marginals } if is_diagonal(noise_cov) => {
                let mut out = Vec::with_capacity(marginals.len());
                let mut off = 0;
                for m in marginals {
                    let d = m.dim();
                    let block: Vec<Vec<f64>> = (0..d)
                        .map(|i| (0..d).map(|j| noise_cov[off + i][off + j]).collect())
                        .collect();
                    out.push(m.convolve_gaussian(t, &block)?);
                    off += d;
                }
                Dist::Product { marginals: out }
            }
            Dist::GaussianSmoothed {
                base,
                t: t0,
                noise_cov: k0,
            } if same_matrix(k0, noise_cov) => Dist::GaussianSmoothed {
                base: base.clone(),
                t: t0 + t,
                noise_cov: k0.clone(),
            },
            _ => Dist::smoothed(self.clone(), t, noise_cov.to_vec()),
        })
    }

    /// The law of a*X for 1-D X (a != 0), simplified per family.
    pub fn scale1(&self, a: f64) -> Result<Dist> {
        if self.dim() != 1 {
            return Err(Error::UnsupportedDimension(
                "scalar scaling needs a 1-D law".into(),
            ));
        }
        if a == 0.0 {
            return Err(Error::DomainError("scaling by zero".into()));
        }
        Ok(match self {
            Dist::Gaussian { mean, cov } => Dist::gaussian1(a * mean[0], a * a * cov[0][0]),
            Dist::Laplace { location, scale } => Dist::laplace(a * location, a.abs() * scale),
            Dist::Uniform { lower, upper } => {
                let (l, u) = (a * lower, a * upper);
                Dist::uniform(l.min(u), l.max(u))
            }
            Dist::Cauchy { location, scale } => Dist::cauchy(a * location, a.abs() * scale),
            Dist::Mixture {
                weights,
                components,
            } => Dist::Mixture {
                weights: weights.clone(),
                components: components
                    .iter()
                    .map(|c| c.scale1(a))
                    .collect::<Result<_>>()?,
            },
            Dist::GaussianSmoothed { base, t, noise_cov } => Dist::GaussianSmoothed {
                base: Box::new(base.scale1(a)?),
                t: *t,
                noise_cov: linalg::mat_scale(noise_cov, a * a),
            },
            Dist::LinearImage { matrix, base } if base.dim() == 1 => {
                base.scale1(a * matrix[0][0])?
            }
            Dist::Product { marginals } if marginals.len() == 1 => marginals[0].scale1(a)?,
            _ => {
                return Err(Error::UnsupportedDimension(
                    "cannot scale this 1-D structure".into(),
                ))
            }
        })
    }

    /// The law of X + delta for 1-D X.
    pub fn shift1(&self, delta: f64) -> Result<Dist> {
        if self.dim() != 1 {
            return Err(Error::UnsupportedDimension(
                "scalar shift needs a 1-D law".into(),
            ));
        }
        Ok(match self {
            Dist::Gaussian { mean, cov } => Dist::gaussian1(mean[0] + delta, cov[0][0]),
            Dist::Laplace { location, scale } => Dist::laplace(location + delta, *scale),
            Dist::Uniform { lower, upper } => Dist::uniform(lower + delta, upper + delta),
            Dist::Cauchy { location, scale } => Dist::cauchy(location + delta, *scale),
            Dist::Mixture {
                weights,
                components,
            } => Dist::Mixture {
                weights: weights.clone(),
                components: components
                    .iter()
                    .map(|c| c.shift1(delta))
                    .collect::<Result<_>>()?,
            },
            Dist::GaussianSmoothed { base, t, noise_cov } => Dist::GaussianSmoothed {
                base: Box::new(base.shift1(delta)?),
                t: *t,
                noise_cov: noise_cov.clone(),
            },
            Dist::Product { marginals } if marginals.len() == 1 => marginals[0].shift1(delta)?,
            _ => {
                return Err(Error::UnsupportedDimension(
                    "cannot shift this 1-D structure".into(),
                ))
            }
        })
    }
}

fn std_normal_draw<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller keeps us independent of distribution-crate API churn.
    loop {
        let u1: f64 = rng.gen_range(1e-300..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let v = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        if v.is_finite() {
            return v;
        }
    }
}

fn is_diagonal(m: &[Vec<f64>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, v)| i == j || v.abs() < 1e-14))
}

fn same_matrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x - y).abs() < 1e-12))
}

/// Log density of base + sqrt(t) N(0, K) at x.
fn smoothed_log_pdf(
    base: &Dist,
    t: f64,
    noise_cov: &[Vec<f64>],
    x: &[f64],
) -> Result<(f64, f64, Method)> {
    if t == 0.0 {
        return base.log_pdf_ext(x);
    }
    match base {
        Dist::Gaussian { mean, cov } => {
            let g = Dist::Gaussian {
                mean: mean.clone(),
                cov: linalg::mat_add(cov, &linalg::mat_scale(noise_cov, t)),
            };
            g.log_pdf_ext(x)
        }
        Dist::Laplace { location, scale } => {
            let v = t * noise_cov[0][0];
            Ok((
                smoothed_laplace_log_pdf(x[0], *location, *scale, v),
                1e-14,
                Method::ClosedForm,
            ))
        }
        Dist::Uniform { lower, upper } => {
            let s = (t * noise_cov[0][0]).sqrt();
            let la = ln_std_normal_cdf((x[0] - lower) / s);
            let lb = ln_std_normal_cdf((x[0] - upper) / s);
            Ok((
                log_diff_exp(la, lb) - (upper - lower).ln(),
                1e-14,
                Method::ClosedForm,
            ))
        }
        Dist::Mixture {
            weights,
            components,
        } => {
            let mut terms = Vec::with_capacity(components.len());
            let mut rel = 0.0f64;
            let mut method = Method::ClosedForm;
            for (w, c) in weights.iter().zip(components) {
                let (lp, r, m) = smoothed_log_pdf(c, t, noise_cov, x)?;
                terms.push(w.ln() + lp);
                rel = rel.max(r);
                if m == Method::Quadrature {
                    method = Method::Quadrature;
                }
            }
            Ok((log_sum_exp(&terms), rel, method))
        }
        Dist::Product { marginals } if is_diagonal(noise_cov) => {
            let mut acc = 0.0;
            let mut rel = 0.0;
            let mut method = Method::ClosedForm;
            let mut off = 0;
            for m in marginals {
                let d = m.dim();
                let block: Vec<Vec<f64>> = (0..d)
                    .map(|i| (0..d).map(|j| noise_cov[off + i][off + j]).collect())
                    .collect();
                let (lp, r, me) = smoothed_log_pdf(m, t, &block, &x[off..off + d])?;
                acc += lp;
                rel += r;
                if me == Method::Quadrature {
                    method = Method::Quadrature;
                }
                off += d;
            }
            Ok((acc, rel, method))
        }
        Dist::GaussianSmoothed {
            base: inner,
            t: t0,
            noise_cov: k0,
        } => {
            // Merge the two independent Gaussian layers into one.
            let total = linalg::mat_add(
                &linalg::mat_scale(k0, *t0),
                &linalg::mat_scale(noise_cov, t),
            );
            smoothed_log_pdf(inner, 1.0, &total, x)
        }
        Dist::LinearImage { matrix, base: b2 } if matrix.len() == b2.dim() => {
            // A X + Z = A (X + A^{-1} Z): pull the noise through the map.
            let inv = linalg::inverse(matrix)?;
            let k2 = linalg::mat_mul(
                &linalg::mat_mul(&inv, &linalg::mat_scale(noise_cov, t)),
                &linalg::transpose(&inv),
            );
            let u = linalg::mat_vec(&inv, x);
            let (lp, r, m) = smoothed_log_pdf(b2, 1.0, &k2, &u)?;
            Ok((lp - linalg::det(matrix).abs().ln(), r, m))
        }
        _ => {
            if base.dim() != 1 {
                return Err(Error::UnsupportedConvolution(
                    "no closed or 1-D numeric form for this smoothed density".into(),
                ));
            }
            // Numeric convolution: integrate p_base(x - z) phi_v(z) dz.
            let v = t * noise_cov[0][0];
            let s = v.sqrt();
            let integrand = |z: f64| {
                let lp = base.log_pdf(&[x[0] - z]).unwrap_or(f64::NEG_INFINITY);
                let l = lp + ln_normal_pdf(z, 0.0, v);
                if l < -700.0 {
                    0.0
                } else {
                    l.exp()
                }
            };
            let breaks: Vec<f64> = base.kinks().iter().map(|k| x[0] - k).collect();
            let r1 = integrate_split(&integrand, -12.0 * s, 12.0 * s, &breaks, 1e-13)?;
            let r = if r1.value > 0.0 && r1.value < 1e-3 {
                integrate_split(
                    &integrand,
                    -12.0 * s,
                    12.0 * s,
                    &breaks,
                    (r1.value * 1e-11).max(1e-18),
                )?
            } else {
                r1
            };
            if r.value <= 0.0 {
                return Ok((f64::NEG_INFINITY, 0.0, Method::Quadrature));
            }
            Ok((
                r.value.ln(),
                r.error_estimate / r.value,
                Method::Quadrature,
            ))
        }
    }
}

/// Closed-form log density of Laplace(location, b) + N(0, v).
fn smoothed_laplace_log_pdf(x: f64, location: f64, b: f64, v: f64) -> f64 {
    // Each branch is (1/2) erfcx(w_i) e^{-z^2/2v}: the e^{v/2b^2 +- z/b}
    // prefactor cancels analytically against the Gaussian-tail exponent,
    // which keeps precision when v dominates b^2.
    let z = x - location;
    let s = (2.0 * v).sqrt();
    let w1 = (v / b - z) / s;
    let w2 = (v / b + z) / s;
    let tail = -z * z / (2.0 * v) - std::f64::consts::LN_2;
    -(2.0 * b).ln() + tail + log_sum_exp2(ln_erfcx(w1), ln_erfcx(w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_split;
    use approx::assert_relative_eq;

    fn mix() -> Dist {
        Dist::two_gaussian_mixture()
    }

    #[test]
    fn mixture_pdf_at_zero() {
        // Both components contribute phi(2)/2 at the origin.
        let p = mix().pdf_at(&[0.0]).unwrap().value;
        assert_relative_eq!(p, 0.05399096651318806, max_relative = 1e-12);
    }

    #[test]
    fn mixture_score_vanishes_at_symmetry_point() {
        let s = mix().score_at(&[0.0]).unwrap();
        assert!(s[0].abs() < 1e-12);
    }

    #[test]
    fn mixture_moments() {
        let (m, c) = mix().moments().unwrap();
        assert_relative_eq!(m[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(c[0][0], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn smoothed_uniform_closed_form() {
        // P(U + Z in dx) at 0.5 equals Phi(0.5) - Phi(-0.5) for U ~ U(0,1), Z std.
        let d = Dist::smoothed(Dist::uniform(0.0, 1.0), 1.0, vec![vec![1.0]]);
        let p = d.pdf_at(&[0.5]).unwrap().value;
        assert_relative_eq!(p, 0.38292492254802624, max_relative = 1e-12);
    }

    #[test]
    fn smoothed_laplace_matches_direct_convolution() {
        let b = 1.0 / SQRT_2;
        for &v in &[0.25, 1.0, 3.0] {
            for &x in &[-6.0, -1.0, 0.0, 0.3, 2.5, 8.0] {
                let closed = smoothed_laplace_log_pdf(x, 0.1, b, v).exp();
                let integrand = |z: f64| {
                    ((-(x - z - 0.1).abs() / b).exp() / (2.0 * b))
                        * (-0.5 * z * z / v).exp()
                        / (2.0 * std::f64::consts::PI * v).sqrt()
                };
                let direct = integrate_split(
                    &integrand,
                    -12.0 * v.sqrt().max(1.0) - 8.0,
                    12.0 * v.sqrt().max(1.0) + 8.0,
                    &[x - 0.1],
                    1e-14,
                )
                .unwrap()
                .value;
                assert_relative_eq!(closed, direct, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn smoothed_pdf_normalizes() {
        let d = Dist::smoothed(Dist::unit_laplace(), 0.7, vec![vec![1.0]]);
        let r = integrate_split(
            &|x: f64| d.pdf_at(&[x]).unwrap().value,
            -25.0,
            25.0,
            &[],
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn convolve_gaussian_merges_structure() {
        let g = Dist::gaussian1(0.0, 2.0).convolve_gaussian(0.5, &[vec![4.0]]).unwrap();
        assert_eq!(g, Dist::gaussian1(0.0, 4.0));

        let sm = Dist::unit_laplace().convolve_gaussian(0.5, &[vec![1.0]]).unwrap();
        let sm2 = sm.convolve_gaussian(0.25, &[vec![1.0]]).unwrap();
        match &sm2 {
            Dist::GaussianSmoothed { t, .. } => assert_relative_eq!(*t, 0.75),
            _ => panic!("expected merged smoothing"),
        }

        // t = 0 is the identity.
        let same = mix().convolve_gaussian(0.0, &[vec![1.0]]).unwrap();
        assert_eq!(same, mix());
    }

    #[test]
    fn convolution_consistency_closed_vs_spec() {
        // pdf of convolve_gaussian output agrees with direct numeric smoothing.
        let base = mix();
        let conv = base.convolve_gaussian(0.8, &[vec![1.0]]).unwrap();
        for &x in &[-3.0, 0.0, 1.7] {
            let direct = integrate_split(
                &|z: f64| {
                    base.pdf_at(&[x - z]).unwrap().value
                        * (-0.5 * z * z / 0.8).exp()
                        / (2.0 * std::f64::consts::PI * 0.8).sqrt()
                },
                -12.0,
                12.0,
                &[],
                1e-13,
            )
            .unwrap()
            .value;
            assert_relative_eq!(conv.pdf_at(&[x]).unwrap().value, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn sampling_is_seeded_and_calibrated() {
        let d = mix();
        let a = d.sample(100_000, 7).unwrap();
        let b = d.sample(100_000, 7).unwrap();
        assert_eq!(a, b);
        let mean: f64 = a.iter().map(|x| x[0]).sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 0.02, "empirical mean {mean} too far from 0");
        let var: f64 = a.iter().map(|x| x[0] * x[0]).sum::<f64>() / a.len() as f64;
        assert!((var - 5.0).abs() < 0.1, "empirical variance {var} too far from 5");
    }

    #[test]
    fn gaussian_nd_sampling_covariance() {
        let d = Dist::Gaussian {
            mean: vec![1.0, -1.0],
            cov: vec![vec![2.0, 0.6], vec![0.6, 1.0]],
        };
        let s = d.sample(200_000, 3).unwrap();
        let n = s.len() as f64;
        let mx: f64 = s.iter().map(|x| x[0]).sum::<f64>() / n;
        let my: f64 = s.iter().map(|x| x[1]).sum::<f64>() / n;
        let cxy: f64 = s.iter().map(|x| (x[0] - mx) * (x[1] - my)).sum::<f64>() / n;
        assert!((mx - 1.0).abs() < 0.02 && (my + 1.0).abs() < 0.02);
        assert!((cxy - 0.6).abs() < 0.03);
    }

    #[test]
    fn uniform_score_rejected() {
        assert!(matches!(
            Dist::uniform(0.0, 1.0).score_at(&[0.5]),
            Err(Error::NonSmoothDensity(_))
        ));
    }

    #[test]
    fn cauchy_moments_rejected() {
        assert!(matches!(
            Dist::cauchy(0.0, 1.0).moments(),
            Err(Error::HeavyTail(_))
        ));
    }

    #[test]
    fn linear_image_density_change_of_variables() {
        let base = Dist::unit_laplace();
        let img = Dist::LinearImage {
            matrix: vec![vec![2.0]],
            base: Box::new(base.clone()),
        };
        let p = img.pdf_at(&[1.0]).unwrap().value;
        assert_relative_eq!(p, base.pdf_at(&[0.5]).unwrap().value / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn scale_simplifications_match_density() {
        let d = mix();
        let scaled = d.scale1(0.7).unwrap();
        // p_{aX}(x) = p_X(x/a)/|a|
        for &x in &[-1.0, 0.4, 2.0] {
            assert_relative_eq!(
                scaled.pdf_at(&[x]).unwrap().value,
                d.pdf_at(&[x / 0.7]).unwrap().value / 0.7,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn serde_round_trip() {
        let d = Dist::smoothed(mix(), 0.5, vec![vec![1.0]]);
        let s = serde_json::to_string(&d).unwrap();
        let back: Dist = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn validation_catches_bad_specs() {
        assert!(Dist::uniform(1.0, 0.0).validate().is_err());
        assert!(Dist::mixture(vec![0.5, 0.4], vec![mix(), mix()]).validate().is_err());
        assert!(Dist::Gaussian {
            mean: vec![0.0],
            cov: vec![vec![-1.0]]
        }
        .validate()
        .is_err());
    }
}
