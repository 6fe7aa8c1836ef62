//! Generalized entropy-power inequalities: linear transforms with
//! orthonormal-row matrices, dependent pairs, covariance-constrained
//! optimization, concavity of entropy power in the noise level, balanced
//! subset sums and probabilistic ("gas") mixtures.
//!
//! Every check follows the slack conventions of [`crate::report`]. Joint
//! quadrature is limited to two output dimensions; the one non-reducible
//! case (a 2x3 transform with non-Gaussian marginals) builds the image
//! density by integrating the product density along the null direction.

use crate::channel::{mmse, ChannelSpec, Orientation};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::functionals::{entropy_tol, fisher_info_tol, LN_2PI_E};
use crate::ineq::info_with_noise;
use crate::linalg;
use crate::numerics::fixed_simpson;
use crate::report::{tolerance_for, InequalityReport};
use crate::sumdist::SumDensity;
use serde::{Deserialize, Serialize};

/// Default quadrature tolerance, matching the core suite.
const EXT_TOL: f64 = 1e-8;

/// Error floor for the 2-D pushforward entropy (fixed-grid tensor rule
/// over an inner 1-D quadrature).
const PUSHFORWARD_TOL: f64 = 1e-4;

// ======================================================================
// Linear transforms with orthonormal rows
// ======================================================================

/// An r x m full-row-rank matrix applied to a vector of independent 1-D
/// marginals. The constrained forms (concavity, Fisher, mutual information)
/// additionally require orthonormal rows, A A^T = I.
#[derive(Clone, Debug, Serialize)]
pub struct LinearMixSpec {
    pub matrix: Vec<Vec<f64>>,
    pub marginals: Vec<Dist>,
}

/// The three entropy-power forms for the linear-transform inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZfForm {
    /// N(AX) >= |A diag(N(X_j)) A^T|^{1/r}.
    Power,
    /// h(AX) >= h(A X~), X~_j Gaussian with h(X~_j) = h(X_j).
    GaussianComparison,
    /// h(AX) >= sum_{ij} a_ij^2 h(X_j), rows orthonormal.
    Concavity,
}

impl LinearMixSpec {
    pub fn new(matrix: Vec<Vec<f64>>, marginals: Vec<Dist>) -> Result<LinearMixSpec> {
        let r = matrix.len();
        let m = marginals.len();
        if r == 0 || m == 0 || r > m {
            return Err(Error::InvalidSpec(
                "transform needs 1 <= rows <= columns".into(),
            ));
        }
        if matrix.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: matrix.iter().map(|r| r.len()).find(|&l| l != m).unwrap(),
            });
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("matrix entries must be finite".into()));
        }
        if marginals.iter().any(|d| d.dim() != 1) {
            return Err(Error::UnsupportedDimension(
                "marginals must be one-dimensional".into(),
            ));
        }
        let gram = linalg::mat_mul(&matrix, &linalg::transpose(&matrix));
        if linalg::min_eigenvalue(&gram) <= 1e-12 {
            return Err(Error::RankDeficient("transform rows are dependent".into()));
        }
        Ok(LinearMixSpec { matrix, marginals })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.marginals.len()
    }

    /// Whether A A^T = I within 1e-10, entrywise.
    pub fn is_orthonormal(&self) -> bool {
        let gram = linalg::mat_mul(&self.matrix, &linalg::transpose(&self.matrix));
        gram.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-10)
        })
    }

    fn require_orthonormal(&self, what: &str) -> Result<()> {
        if self.is_orthonormal() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "{what} requires orthonormal rows (A A^T = I)"
            )))
        }
    }

    /// A diag(d) A^T for a per-marginal diagonal d.
    fn diag_gram(&self, d: &[f64]) -> Vec<Vec<f64>> {
        let r = self.rows();
        let mut out = linalg::scaled_identity(r, 0.0);
        for (i, row_i) in self.matrix.iter().enumerate() {
            for (k, row_k) in self.matrix.iter().enumerate() {
                out[i][k] = row_i
                    .iter()
                    .zip(row_k)
                    .zip(d)
                    .map(|((a, b), v)| a * b * v)
                    .sum();
            }
        }
        let _ = r;
        out
    }

    fn member_entropies(&self) -> Result<(Vec<f64>, f64)> {
        let mut hs = Vec::with_capacity(self.cols());
        let mut err = 0.0;
        for d in &self.marginals {
            let h = entropy_tol(d, EXT_TOL)?;
            hs.push(h.nats);
            err += h.error_estimate;
        }
        Ok((hs, err))
    }
}

/// Entropy of the image h(AX), reduced structurally where possible:
/// a single row is a weighted sum, a square transform is a volume-preserving
/// change of variables, and the 2x3 case integrates the product density
/// along the null direction of A.
fn image_entropy(spec: &LinearMixSpec) -> Result<(f64, f64)> {
    let (r, m) = (spec.rows(), spec.cols());
    if r == 1 {
        let s = SumDensity::of_family(&spec.marginals, &spec.matrix[0])?;
        let h = s.entropy(EXT_TOL)?;
        return Ok((h.nats, h.error_estimate));
    }
    if r == m {
        // h(AX) = sum_j h(X_j) + ln|det A| for any invertible square A.
        let (hs, err) = spec.member_entropies()?;
        let ld = linalg::det(&spec.matrix).abs().ln();
        return Ok((hs.iter().sum::<f64>() + ld, err));
    }
    if r == 2 && m == 3 {
        return pushforward_entropy_2x3(spec);
    }
    Err(Error::UnsupportedDimension(format!(
        "image entropy implemented for single-row, square and 2x3 transforms, got {r}x{m}"
    )))
}

/// Log density of AX for a 2x3 transform with orthonormal-complement
/// parametrization: completing the rows of A with the unit null vector n
/// gives p_AX(y) = integral over s of prod_j p_j((A^T y + s n)_j) ds.
fn pushforward_log_pdf(
    spec: &LinearMixSpec,
) -> Result<Box<dyn Fn(&[f64]) -> f64 + Sync + '_>> {
    spec.require_orthonormal("the 2x3 pushforward")?;
    let a = &spec.matrix;
    // Null direction: cross product of the two rows, unit for orthonormal A.
    let n = [
        a[0][1] * a[1][2] - a[0][2] * a[1][1],
        a[0][2] * a[1][0] - a[0][0] * a[1][2],
        a[0][0] * a[1][1] - a[0][1] * a[1][0],
    ];
    let mut stats = Vec::with_capacity(3);
    for d in &spec.marginals {
        let (mm, cc) = d.moments()?;
        stats.push((mm[0], cc[0][0].sqrt(), d.kinks()));
    }
    let at = linalg::transpose(a);
    let marginals = spec.marginals.clone();
    Ok(Box::new(move |y: &[f64]| -> f64 {
        let b = linalg::mat_vec(&at, y);
        // Bound s so that every marginal argument stays within 13 sigma.
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (j, (mu, sd, _)) in stats.iter().enumerate() {
            if n[j].abs() > 1e-12 {
                let c = (mu - b[j]) / n[j];
                let w = 13.0 * sd / n[j].abs();
                lo = lo.max(c - w);
                hi = hi.min(c + w);
            } else if (b[j] - mu).abs() > 13.0 * sd {
                return f64::NEG_INFINITY;
            }
        }
        if !(lo < hi) {
            return f64::NEG_INFINITY;
        }
        let f = |s: f64| -> f64 {
            let mut lp = 0.0;
            for (j, d) in marginals.iter().enumerate() {
                lp += d.log_pdf(&[b[j] + s * n[j]]).unwrap_or(f64::NEG_INFINITY);
            }
            if lp < -700.0 {
                0.0
            } else {
                lp.exp()
            }
        };
        // Marginal kinks (support edges, Laplace corners) map to interior
        // split points; integrating each smooth piece separately keeps the
        // fixed rule accurate.
        let mut cuts = vec![lo];
        for (j, (_, _, kinks)) in stats.iter().enumerate() {
            if n[j].abs() > 1e-12 {
                for kappa in kinks {
                    let s = (kappa - b[j]) / n[j];
                    if s > lo && s < hi {
                        cuts.push(s);
                    }
                }
            }
        }
        cuts.push(hi);
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let mut p = 0.0;
        for w in cuts.windows(2) {
            if w[1] - w[0] > 1e-300 {
                // Nudge endpoints inward so nodes take one-sided interior
                // values: a support edge shared by two segments would
                // otherwise contribute its nonzero limit on the zero side.
                let eps = (w[1] - w[0]) * 1e-9;
                match fixed_simpson(&f, w[0] + eps, w[1] - eps, 16) {
                    Ok(seg) => p += seg.value,
                    Err(_) => return f64::NEG_INFINITY,
                }
            }
        }
        if p > 0.0 {
            p.ln()
        } else {
            f64::NEG_INFINITY
        }
    }))
}

/// h(AX) for a 2x3 transform, by a fixed tensor Simpson rule over the
/// pushforward density.
fn pushforward_entropy_2x3(spec: &LinearMixSpec) -> Result<(f64, f64)> {
    let log_pdf = pushforward_log_pdf(spec)?;
    let a = &spec.matrix;
    let mut mu = Vec::with_capacity(3);
    let mut var = Vec::with_capacity(3);
    for d in &spec.marginals {
        let (mm, cc) = d.moments()?;
        mu.push(mm[0]);
        var.push(cc[0][0]);
    }
    let mean = linalg::mat_vec(a, &mu);
    let cov = spec.diag_gram(&var);
    // Fixed tensor Simpson grid: each node is an expensive inner quadrature,
    // and the density has kink lines that would keep an adaptive rule
    // refining forever. N is divisible by four so that the half-resolution
    // rule reuses the same nodes for a Richardson error estimate.
    const N: usize = 96;
    let (x0, x1) = (mean[0] - 9.0 * cov[0][0].sqrt(), mean[0] + 9.0 * cov[0][0].sqrt());
    let (y0, y1) = (mean[1] - 9.0 * cov[1][1].sqrt(), mean[1] + 9.0 * cov[1][1].sqrt());
    let hx = (x1 - x0) / N as f64;
    let hy = (y1 - y0) / N as f64;
    let w1 = |k: usize| -> f64 {
        if k == 0 || k == N {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let w2 = |k: usize| -> f64 {
        if k == 0 || k == N {
            1.0
        } else if (k / 2) % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut fine = 0.0;
    let mut coarse = 0.0;
    for i in 0..=N {
        let x = x0 + i as f64 * hx;
        for j in 0..=N {
            let y = y0 + j as f64 * hy;
            let lp = log_pdf(&[x, y]);
            let v = if lp < -690.0 { 0.0 } else { -lp.exp() * lp };
            fine += w1(i) * w1(j) * v;
            if i % 2 == 0 && j % 2 == 0 {
                coarse += w2(i) * w2(j) * v;
            }
        }
    }
    fine *= hx * hy / 9.0;
    coarse *= 4.0 * hx * hy / 9.0;
    let err = ((fine - coarse) / 15.0).abs().max(PUSHFORWARD_TOL);
    Ok((fine, err))
}

/// Entropy-power inequality for a linear transform of independent marginals,
/// in one of its three forms.
pub fn check_zf_epi(spec: &LinearMixSpec, form: ZfForm) -> Result<InequalityReport> {
    let r = spec.rows() as f64;
    let (h_ax, e_ax) = image_entropy(spec)?;
    let (hs, e_mem) = spec.member_entropies()?;
    let powers: Vec<f64> = hs.iter().map(|h| (2.0 * h - LN_2PI_E).exp()).collect();
    let inputs = (spec, format!("{form:?}"));
    let report = match form {
        ZfForm::Power => {
            let lhs = (2.0 * h_ax / r - LN_2PI_E).exp();
            let rhs = linalg::det(&spec.diag_gram(&powers)).powf(1.0 / r);
            let err = (2.0 / r) * (lhs * e_ax + rhs * e_mem);
            InequalityReport::new(
                "zf-epi-power",
                "N(AX) >= |A diag(N(X_j)) A^T|^{1/r}, A full row rank",
                lhs,
                rhs,
                lhs - rhs,
                err,
                &inputs,
            )
        }
        ZfForm::GaussianComparison => {
            // Entropy-matched Gaussian marginals have variance N(X_j), so
            // A X~ is Gaussian with covariance A diag(N_j) A^T.
            let rhs = 0.5 * (r * LN_2PI_E + linalg::det(&spec.diag_gram(&powers)).ln());
            InequalityReport::new(
                "zf-epi-gaussian",
                "h(AX) >= h(A X~), X~_j Gaussian with h(X~_j) = h(X_j)",
                h_ax,
                rhs,
                h_ax - rhs,
                e_ax + 2.0 * e_mem,
                &inputs,
            )
        }
        ZfForm::Concavity => {
            spec.require_orthonormal("the concavity form")?;
            let rhs: f64 = spec
                .matrix
                .iter()
                .map(|row| row.iter().zip(&hs).map(|(a, h)| a * a * h).sum::<f64>())
                .sum();
            InequalityReport::new(
                "zf-epi-concavity",
                "h(AX) >= sum_{ij} a_ij^2 h(X_j), A A^T = I",
                h_ax,
                rhs,
                h_ax - rhs,
                e_ax + e_mem,
                &inputs,
            )
        }
    };
    Ok(report)
}

/// Fisher-information inequality for an orthonormal-row transform:
/// J(AX) <= sum_{ij} a_ij^2 J(X_j). The image information is computed
/// directly (weighted-sum quadrature for one row, 2-D quadrature of the
/// rotated product for square transforms); 2x3 transforms are out of scope.
pub fn check_zf_fii(spec: &LinearMixSpec) -> Result<InequalityReport> {
    spec.require_orthonormal("the Fisher-information form")?;
    let mut js = Vec::with_capacity(spec.cols());
    let mut e_mem = 0.0;
    for d in &spec.marginals {
        let j = fisher_info_tol(d, EXT_TOL)?;
        js.push(j.scalar);
        e_mem += j.error_estimate;
    }
    let rhs: f64 = spec
        .matrix
        .iter()
        .map(|row| row.iter().zip(&js).map(|(a, j)| a * a * j).sum::<f64>())
        .sum();
    let (lhs, e_lhs) = match (spec.rows(), spec.cols()) {
        (1, _) => {
            let j = SumDensity::of_family(&spec.marginals, &spec.matrix[0])?
                .fisher(EXT_TOL)?;
            (j.value, j.error_estimate)
        }
        (r, m) if r == m => {
            let image = Dist::LinearImage {
                matrix: spec.matrix.clone(),
                base: Box::new(Dist::Product {
                    marginals: spec.marginals.clone(),
                }),
            };
            let j = fisher_info_tol(&image, 1e-6)?;
            (j.scalar, j.error_estimate)
        }
        (r, m) => {
            return Err(Error::UnsupportedDimension(format!(
                "image Fisher information implemented for single-row and square transforms, got {r}x{m}"
            )))
        }
    };
    let inputs = spec;
    Ok(InequalityReport::new(
        "zf-fii",
        "J(AX) <= sum_{ij} a_ij^2 J(X_j), A A^T = I",
        lhs,
        rhs,
        rhs - lhs,
        e_lhs + e_mem,
        &inputs,
    ))
}

/// Mutual-information inequality for an orthonormal-row transform against a
/// white Gaussian perturbation: I(AX + Z; Z) <= sum_{ij} a_ij^2 I(X_j + Z; Z).
/// A square orthonormal transform is lossless (rotating the white noise back
/// identifies both sides member by member); 2x3 transforms are out of scope.
pub fn check_zf_mii(spec: &LinearMixSpec, var_z: f64) -> Result<InequalityReport> {
    spec.require_orthonormal("the mutual-information form")?;
    if !(var_z > 0.0 && var_z.is_finite()) {
        return Err(Error::InvalidSpec("noise variance must be positive".into()));
    }
    let mut infos = Vec::with_capacity(spec.cols());
    let mut e_mem = 0.0;
    for d in &spec.marginals {
        let (i, e) = info_with_noise(d, var_z)?;
        infos.push(i);
        e_mem += e;
    }
    let rhs: f64 = spec
        .matrix
        .iter()
        .map(|row| row.iter().zip(&infos).map(|(a, i)| a * a * i).sum::<f64>())
        .sum();
    let (lhs, e_lhs) = match (spec.rows(), spec.cols()) {
        (1, _) => {
            let s = SumDensity::of_family(&spec.marginals, &spec.matrix[0])?;
            let hx = s.entropy(EXT_TOL)?;
            let hy = s.convolve_gaussian(var_z)?.entropy(EXT_TOL)?;
            (hy.nats - hx.nats, hx.error_estimate + hy.error_estimate)
        }
        (r, m) if r == m => {
            // A^T Z is again white Gaussian, so I(AX + Z; Z) equals
            // I(X + A^T Z; A^T Z) = sum_j I(X_j + Z_j; Z_j).
            (infos.iter().sum(), e_mem)
        }
        (r, m) => {
            return Err(Error::UnsupportedDimension(format!(
                "image mutual information implemented for single-row and square transforms, got {r}x{m}"
            )))
        }
    };
    let inputs = (spec, var_z);
    Ok(InequalityReport::new(
        "zf-mii",
        "I(AX + Z; Z) <= sum_{ij} a_ij^2 I(X_j + Z; Z), A A^T = I, Z white Gaussian",
        lhs,
        rhs,
        rhs - lhs,
        e_lhs + e_mem,
        &inputs,
    ))
}

// ======================================================================
// Dependent pairs
// ======================================================================

/// A dependent scalar pair given by a bivariate joint law (Gaussian or a
/// finite mixture of bivariate Gaussians), a perturbation level t > 0 for
/// X_{i,t} = X_i + sqrt(t) Z_i, and the coefficients of the linear
/// combination under test.
#[derive(Clone, Debug, Serialize)]
pub struct DependentPairSpec {
    pub joint: Dist,
    pub t: f64,
    pub coeffs: [f64; 2],
}

/// Outcome of the dependence condition: the matrix gap
/// diag(J(X_{i,t})) - J(X_t), its positive-semidefiniteness verdict, and the
/// two weaker classical conditions derived from it.
#[derive(Clone, Debug, Serialize)]
pub struct DependentCondition {
    pub matrix_gap: Vec<Vec<f64>>,
    pub holds: bool,
    pub takano_holds: bool,
    pub johnson_holds: bool,
    pub tolerance: f64,
}

impl DependentPairSpec {
    pub fn new(joint: Dist, t: f64, coeffs: [f64; 2]) -> Result<DependentPairSpec> {
        if joint.dim() != 2 {
            return Err(Error::UnsupportedDimension(
                "the dependent pair needs a bivariate joint law".into(),
            ));
        }
        if !is_gaussian_mixture(&joint) {
            return Err(Error::InvalidSpec(
                "the joint law must be Gaussian or a mixture of Gaussians".into(),
            ));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DomainError("perturbation level must be > 0".into()));
        }
        if coeffs.iter().all(|a| *a == 0.0) {
            return Err(Error::InvalidSpec("coefficients are both zero".into()));
        }
        joint.validate()?;
        Ok(DependentPairSpec { joint, t, coeffs })
    }

    /// The 1-D marginal law of one component of the joint.
    pub fn marginal(&self, axis: usize) -> Result<Dist> {
        marginal_1d(&self.joint, axis)
    }

    /// The 1-D law of c0 X_1 + c1 X_2 under the (dependent) joint; closed
    /// for Gaussian-mixture joints.
    pub fn linear_image(&self, c: [f64; 2]) -> Result<Dist> {
        linear_image_1d(&self.joint, c)
    }
}

fn is_gaussian_mixture(d: &Dist) -> bool {
    match d {
        Dist::Gaussian { .. } => true,
        Dist::Mixture { components, .. } => components.iter().all(is_gaussian_mixture),
        _ => false,
    }
}

fn marginal_1d(joint: &Dist, axis: usize) -> Result<Dist> {
    match joint {
        Dist::Gaussian { mean, cov } => Ok(Dist::gaussian1(mean[axis], cov[axis][axis])),
        Dist::Mixture {
            weights,
            components,
        } => Ok(Dist::Mixture {
            weights: weights.clone(),
            components: components
                .iter()
                .map(|c| marginal_1d(c, axis))
                .collect::<Result<_>>()?,
        }),
        _ => Err(Error::InvalidSpec(
            "marginals are only available for Gaussian-mixture joints".into(),
        )),
    }
}

fn linear_image_1d(joint: &Dist, c: [f64; 2]) -> Result<Dist> {
    match joint {
        Dist::Gaussian { mean, cov } => {
            let mu = c[0] * mean[0] + c[1] * mean[1];
            let var = c[0] * c[0] * cov[0][0]
                + 2.0 * c[0] * c[1] * cov[0][1]
                + c[1] * c[1] * cov[1][1];
            Ok(Dist::gaussian1(mu, var))
        }
        Dist::Mixture {
            weights,
            components,
        } => Ok(Dist::Mixture {
            weights: weights.clone(),
            components: components
                .iter()
                .map(|k| linear_image_1d(k, c))
                .collect::<Result<_>>()?,
        }),
        _ => Err(Error::InvalidSpec(
            "linear images are only available for Gaussian-mixture joints".into(),
        )),
    }
}

/// Evaluate the dependence condition diag(J(X_{i,t})) >= J(X_t) at the
/// spec's perturbation level, together with the two classical scalar
/// conditions it implies.
pub fn dependent_condition(spec: &DependentPairSpec) -> Result<DependentCondition> {
    let eye = linalg::identity(2);
    let xt = spec.joint.convolve_gaussian(spec.t, &eye)?;
    let (jm, e_jm) = if let Some((mean, cov)) = xt.gaussian_form() {
        let _ = mean;
        (linalg::inverse(&cov)?, 0.0)
    } else {
        let f = fisher_info_tol(&xt, 1e-7)?;
        (f.matrix, f.error_estimate)
    };
    let mut jd = [0.0; 2];
    let mut e_d = 0.0;
    for axis in 0..2 {
        let mt = marginal_1d(&spec.joint, axis)?.convolve_gaussian(spec.t, &linalg::identity(1))?;
        let f = fisher_info_tol(&mt, EXT_TOL)?;
        jd[axis] = f.scalar;
        e_d += f.error_estimate;
    }
    let gap = vec![
        vec![jd[0] - jm[0][0], -jm[0][1]],
        vec![-jm[0][1], jd[1] - jm[1][1]],
    ];
    let tol = tolerance_for(e_jm + e_d);
    let holds = linalg::min_eigenvalue(&gap) >= -tol;
    // Restriction of the matrix condition to the simplex direction that
    // minimizes the diagonal form:
    //   1/J_1 + 1/J_2 >= J_11/J_1^2 + J_22/J_2^2 + 2 J_12/(J_1 J_2).
    let takano_lhs = 1.0 / jd[0] + 1.0 / jd[1];
    let takano_rhs = jm[0][0] / (jd[0] * jd[0])
        + jm[1][1] / (jd[1] * jd[1])
        + 2.0 * jm[0][1] / (jd[0] * jd[1]);
    // Comparison of the two simplex minima:
    //   (1/J_1 + 1/J_2)^{-1} >= (J_11 J_22 - J_12^2)/(J_11 + J_22 - 2 J_12).
    let johnson_lhs = 1.0 / takano_lhs;
    let johnson_rhs = (jm[0][0] * jm[1][1] - jm[0][1] * jm[0][1])
        / (jm[0][0] + jm[1][1] - 2.0 * jm[0][1]);
    Ok(DependentCondition {
        matrix_gap: gap,
        holds,
        takano_holds: takano_lhs - takano_rhs >= -tol,
        johnson_holds: johnson_lhs - johnson_rhs >= -tol,
        tolerance: tol,
    })
}

/// Entropy-power inequality h(a_1 X_1 + a_2 X_2) >= a_1^2 h(X_1) + a_2^2 h(X_2)
/// for the (dependent) pair. The linear image of a Gaussian-mixture joint is
/// a closed 1-D Gaussian mixture, so no joint quadrature is needed. When the
/// dependence condition holds across the t-grid the slack must be
/// nonnegative; a failed condition makes no claim.
pub fn check_dependent_epi(spec: &DependentPairSpec) -> Result<InequalityReport> {
    let norm = spec.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
    let a = [spec.coeffs[0] / norm, spec.coeffs[1] / norm];
    let image = spec.linear_image(a)?;
    let h = entropy_tol(&image, EXT_TOL)?;
    let mut rhs = 0.0;
    let mut err = h.error_estimate;
    for axis in 0..2 {
        let hm = entropy_tol(&spec.marginal(axis)?, EXT_TOL)?;
        rhs += a[axis] * a[axis] * hm.nats;
        err += hm.error_estimate;
    }
    Ok(InequalityReport::new(
        "dependent-epi",
        "h(a_1 X_1 + a_2 X_2) >= a_1^2 h(X_1) + a_2^2 h(X_2), dependent pair",
        h.nats,
        rhs,
        h.nats - rhs,
        err,
        spec,
    ))
}

// ======================================================================
// Covariance-constrained optimization
// ======================================================================

/// max_V 0.5 ln|V| - (mu/2) ln|V + covZ| over 0 < V <= cap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LVProblemSpec {
    pub cap: Vec<Vec<f64>>,
    pub cov_z: Vec<Vec<f64>>,
    pub mu: f64,
}

/// Stationary point of the capped problem with its optimality certificates.
#[derive(Clone, Debug, Serialize)]
pub struct LVSolution {
    pub cov_x: Vec<Vec<f64>>,
    /// Lagrange multiplier of the cap, (1/2)V^{-1} - (mu/2)(V+Z)^{-1}, PSD.
    pub multiplier: Vec<Vec<f64>>,
    /// Frobenius norm of the negative part of the stationarity gradient.
    pub kkt_residual: f64,
    /// tr(M (cap - V)), zero at complementary slackness.
    pub comp_slackness: f64,
    pub iterations: usize,
    pub objective: f64,
    /// Residual after each iteration (for verbose traces).
    pub trace: Vec<f64>,
}

/// The objective 0.5 ln|V| - (mu/2) ln|V + covZ|.
pub fn lv_objective(v: &[Vec<f64>], cov_z: &[Vec<f64>], mu: f64) -> f64 {
    0.5 * linalg::det(v).ln() - 0.5 * mu * linalg::det(&linalg::mat_add(v, cov_z)).ln()
}

/// Clamp the eigenvalues of a symmetric matrix from below.
fn sym_clip_min_eig(m: &[Vec<f64>], floor: f64) -> Vec<Vec<f64>> {
    let sym = linalg::symmetrize(&linalg::to_na(m));
    let eig = sym.symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < floor {
            *v = floor;
        }
    }
    let rebuilt = &eig.eigenvectors
        * nalgebra::DMatrix::from_diagonal(&vals)
        * eig.eigenvectors.transpose();
    linalg::from_na(&rebuilt)
}

/// Frobenius projection onto {V <= cap}: cap minus the positive part of
/// (V - cap).
fn project_under_cap(v: &[Vec<f64>], cap: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let excess = linalg::to_na(&linalg::mat_add(v, &linalg::mat_scale(cap, -1.0)));
    let pos = linalg::from_na(&linalg::psd_part(&linalg::symmetrize(&excess)));
    linalg::mat_add(v, &linalg::mat_scale(&pos, -1.0))
}

fn lv_gradient(v: &[Vec<f64>], cov_z: &[Vec<f64>], mu: f64) -> Result<Vec<Vec<f64>>> {
    let g = linalg::mat_add(
        &linalg::mat_scale(&linalg::inverse(v)?, 0.5),
        &linalg::mat_scale(&linalg::inverse(&linalg::mat_add(v, cov_z))?, -0.5 * mu),
    );
    Ok(linalg::from_na(&linalg::symmetrize(&linalg::to_na(&g))))
}

fn lv_certificates(
    v: &[Vec<f64>],
    spec: &LVProblemSpec,
) -> Result<(Vec<Vec<f64>>, f64, f64)> {
    let g = lv_gradient(v, &spec.cov_z, spec.mu)?;
    let m = linalg::from_na(&linalg::psd_part(&linalg::to_na(&g)));
    let defect = linalg::mat_add(&g, &linalg::mat_scale(&m, -1.0));
    let slack = linalg::mat_add(&spec.cap, &linalg::mat_scale(v, -1.0));
    let comp = linalg::trace(&linalg::mat_mul(&m, &slack)).abs();
    Ok((m, linalg::frobenius(&defect), comp))
}

/// Solve the capped covariance problem by damped projected gradient ascent.
/// A fixed point of the projected step is exactly a Karush-Kuhn-Tucker point
/// of the cap constraint, because the positive and negative parts of the
/// projection residual share an eigenbasis and are mutually orthogonal.
pub fn lv_solve(spec: &LVProblemSpec) -> Result<LVSolution> {
    let n = spec.cap.len();
    if spec.cov_z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: spec.cov_z.len(),
        });
    }
    linalg::validate_cov(&spec.cap, n)?;
    linalg::validate_cov(&spec.cov_z, n)?;
    for m in [&spec.cap, &spec.cov_z] {
        if linalg::min_eigenvalue(m) <= 0.0 {
            return Err(Error::RankDeficient(
                "cap and noise covariance must be positive definite".into(),
            ));
        }
    }
    if !(spec.mu > 1.0) {
        return Err(Error::DomainError(
            "the exponent mu must exceed 1 (mu = 1 has no bounded maximizer)".into(),
        ));
    }
    // Unconstrained stationary point V* = covZ/(mu - 1); exact if feasible.
    let v_star = linalg::mat_scale(&spec.cov_z, 1.0 / (spec.mu - 1.0));
    let slack = linalg::mat_add(&spec.cap, &linalg::mat_scale(&v_star, -1.0));
    if linalg::min_eigenvalue(&slack) >= -1e-12 {
        let (m, kkt, comp) = lv_certificates(&v_star, spec)?;
        return Ok(LVSolution {
            objective: lv_objective(&v_star, &spec.cov_z, spec.mu),
            cov_x: v_star,
            multiplier: m,
            kkt_residual: kkt,
            comp_slackness: comp,
            iterations: 0,
            trace: Vec::new(),
        });
    }
    let floor = 1e-12 * linalg::trace(&spec.cap) / n as f64;
    let mut v = sym_clip_min_eig(&project_under_cap(&v_star, &spec.cap), floor);
    let mut eta = {
        let lmin = linalg::sym_eigenvalues(&v)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            .max(floor);
        0.5 * lmin * lmin
    };
    let mut obj = lv_objective(&v, &spec.cov_z, spec.mu);
    let mut trace = Vec::new();
    const MAX_ITERS: usize = 10_000;
    for it in 0..MAX_ITERS {
        let (m, kkt, comp) = lv_certificates(&v, spec)?;
        trace.push(kkt + comp);
        if kkt + comp <= 1e-10 {
            return Ok(LVSolution {
                objective: obj,
                cov_x: v,
                multiplier: m,
                kkt_residual: kkt,
                comp_slackness: comp,
                iterations: it,
                trace,
            });
        }
        let g = lv_gradient(&v, &spec.cov_z, spec.mu)?;
        let step = linalg::mat_add(&v, &linalg::mat_scale(&g, eta));
        let cand = sym_clip_min_eig(&project_under_cap(&step, &spec.cap), floor);
        // Damped half-step towards the projected candidate.
        let next: Vec<Vec<f64>> = v
            .iter()
            .zip(&cand)
            .map(|(rv, rc)| rv.iter().zip(rc).map(|(a, b)| 0.5 * (a + b)).collect())
            .collect();
        let next_obj = lv_objective(&next, &spec.cov_z, spec.mu);
        if next_obj.is_finite() && next_obj >= obj - 1e-14 {
            v = next;
            obj = next_obj;
            eta *= 1.2;
        } else {
            eta *= 0.5;
            if eta < 1e-18 {
                break;
            }
        }
    }
    Err(Error::NumericalFailure(
        "the capped covariance solver did not reach the residual target".into(),
    ))
}

/// Covariance-constrained entropy-power inequality for a pair (X_1, X_2)
/// with Cov(X_1) <= Cov(X_2) and X_2 Gaussian:
/// h(a_1 X_1 + a_2 X_2) >= a_1^2 h(X_1) + a_2^2 h(X_2) + Delta, where
/// Delta = h(Z) - a_1^2 h(Z_1) - a_2^2 h(Z_2) >= 0 for Gaussian Z_i with
/// covariances proportional to those of the X_i (Delta is independent of the
/// proportionality constant alpha).
pub fn check_lv_epi(
    x1: &Dist,
    x2: &Dist,
    a: (f64, f64),
    alpha: f64,
) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::DomainError(
            "the noise proportionality factor must be positive".into(),
        ));
    }
    if x2.gaussian_form().is_none() {
        return Err(Error::InvalidSpec(
            "the dominating variable X_2 must be Gaussian".into(),
        ));
    }
    let (_, c1) = x1.moments()?;
    let (_, c2) = x2.moments()?;
    let slack_cov = linalg::mat_add(&c2, &linalg::mat_scale(&c1, -1.0));
    if linalg::min_eigenvalue(&slack_cov) < -1e-10 {
        return Err(Error::DomainError(
            "the covariance constraint Cov(X_1) <= Cov(X_2) is violated".into(),
        ));
    }
    let norm = (a.0 * a.0 + a.1 * a.1).sqrt();
    let a = (a.0 / norm, a.1 / norm);
    let mix_cov = linalg::mat_add(
        &linalg::mat_scale(&c1, a.0 * a.0),
        &linalg::mat_scale(&c2, a.1 * a.1),
    );
    let delta = 0.5 * linalg::det(&mix_cov).ln()
        - 0.5 * a.0 * a.0 * linalg::det(&c1).ln()
        - 0.5 * a.1 * a.1 * linalg::det(&c2).ln();
    let h1 = entropy_tol(x1, EXT_TOL)?;
    let h2 = entropy_tol(x2, EXT_TOL)?;
    let (lhs, e_lhs) = if x1.gaussian_form().is_some() {
        (
            0.5 * (c1.len() as f64 * LN_2PI_E + linalg::det(&mix_cov).ln()),
            0.0,
        )
    } else if x1.dim() == 1 {
        let s = SumDensity::of_family(&[x1.clone(), x2.clone()], &[a.0, a.1])?;
        let h = s.entropy(EXT_TOL)?;
        (h.nats, h.error_estimate)
    } else {
        return Err(Error::UnsupportedDimension(
            "non-Gaussian X_1 is supported in one dimension only".into(),
        ));
    };
    let rhs = a.0 * a.0 * h1.nats + a.1 * a.1 * h2.nats + delta;
    let inputs = (x1, x2, a, alpha);
    Ok(InequalityReport::new(
        "lv-epi",
        "h(a_1 X_1 + a_2 X_2) >= a_1^2 h(X_1) + a_2^2 h(X_2) + Delta, Cov(X_1) <= Cov(X_2), X_2 Gaussian",
        lhs,
        rhs,
        lhs - rhs,
        e_lhs + h1.error_estimate + h2.error_estimate,
        &inputs,
    ))
}

/// The closed nonnegative offset Delta for a covariance-constrained pair.
pub fn lv_delta(cov1: &[Vec<f64>], cov2: &[Vec<f64>], a: (f64, f64)) -> f64 {
    let norm = (a.0 * a.0 + a.1 * a.1).sqrt();
    let a = (a.0 / norm, a.1 / norm);
    let mix = linalg::mat_add(
        &linalg::mat_scale(cov1, a.0 * a.0),
        &linalg::mat_scale(cov2, a.1 * a.1),
    );
    0.5 * linalg::det(&mix).ln()
        - 0.5 * a.0 * a.0 * linalg::det(cov1).ln()
        - 0.5 * a.1 * a.1 * linalg::det(cov2).ln()
}

// ======================================================================
// Concavity of entropy power in the noise level
// ======================================================================

/// Entropy powers along X + sqrt(t) Z with their concavity diagnostics.
#[derive(Clone, Debug)]
pub struct CostaScan {
    pub t_grid: Vec<f64>,
    pub n_values: Vec<f64>,
    /// Second divided differences (times two) at interior grid points;
    /// concavity requires them to be <= 0.
    pub second_differences: Vec<f64>,
    /// The chord slopes (N(X + sqrt(t) Z) - N(X)) / t, nonincreasing in t.
    pub slopes: Vec<f64>,
    pub report: InequalityReport,
    pub slope_report: InequalityReport,
}

/// Default noise-level grid spanning the curvature regimes of the test laws.
pub const COSTA_DEFAULT_GRID: [f64; 7] = [0.1, 0.25, 0.5, 1.0, 2.0, 3.5, 5.0];

/// Check that the entropy power N(X + sqrt(t) Z) is concave in t for white
/// Gaussian Z: every interior second difference must be nonpositive, and the
/// chord slope from t = 0 must be nonincreasing.
pub fn costa_concavity(
    x: &Dist,
    var_z: f64,
    t_grid: Option<&[f64]>,
) -> Result<CostaScan> {
    if !(var_z > 0.0 && var_z.is_finite()) {
        return Err(Error::InvalidSpec("noise variance must be positive".into()));
    }
    let grid: Vec<f64> = match t_grid {
        Some(g) => g.to_vec(),
        None => COSTA_DEFAULT_GRID.to_vec(),
    };
    if grid.len() < 7 {
        return Err(Error::InvalidSpec(
            "the concavity scan needs at least seven noise levels".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] <= 0.0 {
        return Err(Error::InvalidSpec(
            "noise levels must be positive and strictly increasing".into(),
        ));
    }
    let n = x.dim() as f64;
    let noise = linalg::scaled_identity(x.dim(), var_z);
    let entropy_power_at = |t: f64| -> Result<(f64, f64)> {
        let d = if t == 0.0 {
            x.clone()
        } else {
            x.convolve_gaussian(t, &noise)?
        };
        let h = entropy_tol(&d, EXT_TOL)?;
        let value = (2.0 * h.nats / n - LN_2PI_E).exp();
        Ok((value, value * (2.0 / n) * h.error_estimate))
    };
    let (n0, e0) = entropy_power_at(0.0)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    for &t in &grid {
        let (v, e) = entropy_power_at(t)?;
        values.push(v);
        errs.push(e);
    }
    let mut d2 = Vec::with_capacity(grid.len().saturating_sub(2));
    let mut d2_err: f64 = 0.0;
    for i in 1..grid.len() - 1 {
        let hl = grid[i] - grid[i - 1];
        let hr = grid[i + 1] - grid[i];
        let left = (values[i] - values[i - 1]) / hl;
        let right = (values[i + 1] - values[i]) / hr;
        d2.push(2.0 * (right - left) / (hl + hr));
        let amp = 2.0 / (hl.min(hr) * (hl + hr));
        d2_err = d2_err.max(amp * (errs[i - 1] + 2.0 * errs[i] + errs[i + 1]));
    }
    let worst_d2 = d2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inputs = (x, var_z, &grid);
    let report = InequalityReport::new(
        "costa-concavity",
        "second differences of t -> N(X + sqrt(t) Z) are <= 0",
        worst_d2,
        0.0,
        -worst_d2,
        d2_err,
        &inputs,
    );
    let slopes: Vec<f64> = grid
        .iter()
        .zip(&values)
        .map(|(t, v)| (v - n0) / t)
        .collect();
    let mut slope_slack = f64::INFINITY;
    let mut slope_err: f64 = 0.0;
    for i in 0..slopes.len() - 1 {
        slope_slack = slope_slack.min(slopes[i] - slopes[i + 1]);
        slope_err = slope_err.max((errs[i] + e0) / grid[i] + (errs[i + 1] + e0) / grid[i + 1]);
    }
    let slope_report = InequalityReport::new(
        "costa-slope",
        "the chord slope (N(X + sqrt(t) Z) - N(X)) / t is nonincreasing",
        -slope_slack,
        0.0,
        slope_slack,
        slope_err,
        &inputs,
    );
    Ok(CostaScan {
        t_grid: grid,
        n_values: values,
        second_differences: d2,
        slopes,
        report,
        slope_report,
    })
}

// ======================================================================
// Balanced subset sums
// ======================================================================

/// Which subset-sum inequality to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetForm {
    /// h(sum a_i X_i) >= sum_S a_S^2 h(X_S) with normalized coefficients.
    Entropy,
    /// The classical power form N(sum X_i) >= (1/k) sum_S N(sum_{i in S} X_i)
    /// with unit coefficients.
    Power,
}

/// Balance a collection of index subsets by appending singletons in index
/// order until every index appears the same number of times. Returns the
/// augmented collection and the common multiplicity k.
pub fn balance_subsets(len: usize, subsets: &[Vec<usize>]) -> (Vec<Vec<usize>>, usize) {
    let mut counts = vec![0usize; len];
    for s in subsets {
        for &i in s {
            counts[i] += 1;
        }
    }
    let k = counts.iter().cloned().max().unwrap_or(0).max(1);
    let mut out: Vec<Vec<usize>> = subsets.to_vec();
    for (i, c) in counts.iter().enumerate() {
        for _ in *c..k {
            out.push(vec![i]);
        }
    }
    (out, k)
}

/// Subset-sum entropy-power inequality over a balanced collection of index
/// subsets: the collection is auto-balanced with singletons first, then each
/// normalized sub-sum X_S = sum_{i in S} a_i X_i / sqrt(sum_{i in S} a_i^2)
/// contributes with weight a_S^2 = (1/k) sum_{i in S} a_i^2.
pub fn check_subset_epi(
    dists: &[Dist],
    coeffs: &[f64],
    subsets: &[Vec<usize>],
    form: SubsetForm,
) -> Result<InequalityReport> {
    if dists.is_empty() || dists.len() != coeffs.len() {
        return Err(Error::InvalidSpec(
            "need one coefficient per distribution".into(),
        ));
    }
    if coeffs.iter().any(|a| *a == 0.0 || !a.is_finite()) {
        return Err(Error::InvalidSpec(
            "subset coefficients must be finite and nonzero".into(),
        ));
    }
    if subsets.is_empty() {
        return Err(Error::InvalidSpec("the subset collection is empty".into()));
    }
    for s in subsets {
        if s.is_empty() {
            return Err(Error::InvalidSpec("subsets must be nonempty".into()));
        }
        if s.iter().any(|&i| i >= dists.len()) {
            return Err(Error::InvalidSpec("subset index out of range".into()));
        }
        let mut seen = s.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != s.len() {
            return Err(Error::InvalidSpec("subsets must not repeat indexes".into()));
        }
    }
    let (balanced, k) = balance_subsets(dists.len(), subsets);
    let kf = k as f64;
    let inputs = (dists, coeffs, subsets, format!("{form:?}"));
    match form {
        SubsetForm::Entropy => {
            let norm = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
            let a: Vec<f64> = coeffs.iter().map(|c| c / norm).collect();
            let total = SumDensity::of_family(dists, &a)?.entropy(EXT_TOL)?;
            let mut rhs = 0.0;
            let mut err = total.error_estimate;
            for s in &balanced {
                let w: f64 = s.iter().map(|&i| a[i] * a[i]).sum();
                let sub_dists: Vec<Dist> = s.iter().map(|&i| dists[i].clone()).collect();
                let sub_coeffs: Vec<f64> = s.iter().map(|&i| a[i] / w.sqrt()).collect();
                let h_s = SumDensity::of_family(&sub_dists, &sub_coeffs)?.entropy(EXT_TOL)?;
                rhs += w / kf * h_s.nats;
                err += w / kf * h_s.error_estimate;
            }
            Ok(InequalityReport::new(
                "subset-epi",
                "h(sum a_i X_i) >= sum_S a_S^2 h(X_S), balanced subsets",
                total.nats,
                rhs,
                total.nats - rhs,
                err,
                &inputs,
            ))
        }
        SubsetForm::Power => {
            let n = dists[0].dim() as f64;
            let ones = vec![1.0; dists.len()];
            let h_total = SumDensity::of_family(dists, &ones)?.entropy(EXT_TOL)?;
            let lhs = (2.0 * h_total.nats / n - LN_2PI_E).exp();
            let mut rhs = 0.0;
            let mut err = lhs * (2.0 / n) * h_total.error_estimate;
            for s in &balanced {
                let sub_dists: Vec<Dist> = s.iter().map(|&i| dists[i].clone()).collect();
                let sub_ones = vec![1.0; s.len()];
                let h_s = SumDensity::of_family(&sub_dists, &sub_ones)?.entropy(EXT_TOL)?;
                let p = (2.0 * h_s.nats / n - LN_2PI_E).exp();
                rhs += p / kf;
                err += p / kf * (2.0 / n) * h_s.error_estimate;
            }
            Ok(InequalityReport::new(
                "subset-epi-power",
                "N(sum X_i) >= (1/k) sum_S N(sum_{i in S} X_i), balanced subsets",
                lhs,
                rhs,
                lhs - rhs,
                err,
                &inputs,
            ))
        }
    }
}

// ======================================================================
// Probabilistic mixtures
// ======================================================================

/// The four functional inequalities comparing a probabilistic mixture
/// X_I ~ sum_i p_i X_i (p_i = a_i^2) with the p-weighted average of its
/// components, against white Gaussian noise Z:
///   J(X_I) <= sum p_i J(X_i),
///   Var(X_I | X_I + Z) >= sum p_i Var(X_i | X_i + Z),
///   h(X_I) >= sum p_i h(X_i),
///   I(X_I + Z; Z) <= sum p_i I(X_i + Z; Z).
pub fn check_gas_mixture(
    weights: &[f64],
    dists: &[Dist],
    var_z: f64,
) -> Result<Vec<InequalityReport>> {
    if weights.len() != dists.len() || dists.is_empty() {
        return Err(Error::InvalidSpec(
            "need one weight per mixture component".into(),
        ));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidSpec("mixture weights must be positive".into()));
    }
    if dists.iter().any(|d| d.dim() != 1) {
        return Err(Error::UnsupportedDimension(
            "the mixture comparisons are implemented for scalar components".into(),
        ));
    }
    if !(var_z > 0.0 && var_z.is_finite()) {
        return Err(Error::InvalidSpec("noise variance must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mix = Dist::mixture(p.clone(), dists.to_vec());
    let inputs = (weights, dists, var_z);
    let mut reports = Vec::with_capacity(4);

    // Fisher information is convex in the density.
    let j_mix = fisher_info_tol(&mix, EXT_TOL)?;
    let mut j_avg = 0.0;
    let mut j_err = j_mix.error_estimate;
    for (pi, d) in p.iter().zip(dists) {
        let j = fisher_info_tol(d, EXT_TOL)?;
        j_avg += pi * j.scalar;
        j_err += pi * j.error_estimate;
    }
    reports.push(InequalityReport::new(
        "gas-fisher",
        "J(X_I) <= sum_i p_i J(X_i), X_I the p-mixture",
        j_mix.scalar,
        j_avg,
        j_avg - j_mix.scalar,
        j_err,
        &inputs,
    ));

    // Estimating the mixture is at least as hard as the average case.
    let mmse_of = |d: &Dist| -> Result<(f64, f64)> {
        let ch = ChannelSpec::white1(d.clone(), var_z, Orientation::NoiseScaled, 1.0)?;
        let v = mmse(&ch)?;
        Ok((v.value, v.error_estimate))
    };
    let (v_mix, mut v_err) = mmse_of(&mix)?;
    let mut v_avg = 0.0;
    for (pi, d) in p.iter().zip(dists) {
        let (v, e) = mmse_of(d)?;
        v_avg += pi * v;
        v_err += pi * e;
    }
    reports.push(InequalityReport::new(
        "gas-mmse",
        "Var(X_I | X_I + Z) >= sum_i p_i Var(X_i | X_i + Z)",
        v_mix,
        v_avg,
        v_mix - v_avg,
        v_err,
        &inputs,
    ));

    // Entropy is concave in the density.
    let h_mix = entropy_tol(&mix, EXT_TOL)?;
    let mut h_avg = 0.0;
    let mut h_err = h_mix.error_estimate;
    for (pi, d) in p.iter().zip(dists) {
        let h = entropy_tol(d, EXT_TOL)?;
        h_avg += pi * h.nats;
        h_err += pi * h.error_estimate;
    }
    reports.push(InequalityReport::new(
        "gas-entropy",
        "h(X_I) >= sum_i p_i h(X_i)",
        h_mix.nats,
        h_avg,
        h_mix.nats - h_avg,
        h_err,
        &inputs,
    ));

    // Mutual information against a shared white Gaussian perturbation.
    let (i_mix, mut i_err) = info_with_noise(&mix, var_z)?;
    let mut i_avg = 0.0;
    for (pi, d) in p.iter().zip(dists) {
        let (i, e) = info_with_noise(d, var_z)?;
        i_avg += pi * i;
        i_err += pi * e;
    }
    reports.push(InequalityReport::new(
        "gas-info",
        "I(X_I + Z; Z) <= sum_i p_i I(X_i + Z; Z)",
        i_mix,
        i_avg,
        i_avg - i_mix,
        i_err,
        &inputs,
    ));
    Ok(reports)
}
