//! The core inequality suite: entropy-power, Fisher-information and mutual-
//! information inequalities for weighted sums of independent variables, plus
//! Sato's bound, estimation-theoretic data processing, the Gaussian saddle
//! point, the negentropy contrast property and the Cramér-Rao bound.
//!
//! Every check returns an [`InequalityReport`] whose slack is oriented so
//! that nonnegative means "holds"; verdicts follow the slack/tolerance bands
//! of [`crate::report`].

use crate::channel::{mmse, ChannelSpec, Orientation};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::functionals::{entropy_tol, fisher_info_tol, LN_2PI_E};
use crate::linalg;
use crate::numerics::{fixed_simpson, integrate_2d, NumericResult};
use crate::report::InequalityReport;
use crate::sumdist::SumDensity;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Default quadrature tolerance for suite entropies/Fisher informations:
/// loose enough to keep randomized sweeps fast, tight against the 1e-5
/// equality band.
const SUITE_TOL: f64 = 1e-8;

/// Independent variables with coefficients normalized to sum of squares one.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedFamily {
    pub dists: Vec<Dist>,
    pub coeffs: Vec<f64>,
}

impl WeightedFamily {
    /// Build a family, dropping zero-coefficient members and scaling the
    /// remaining coefficients so that sum a_i^2 = 1.
    pub fn new(dists: Vec<Dist>, coeffs: Vec<f64>) -> Result<WeightedFamily> {
        if dists.len() != coeffs.len() || dists.is_empty() {
            return Err(Error::InvalidSpec(
                "family needs one coefficient per distribution".into(),
            ));
        }
        let dim = dists[0].dim();
        if dists.iter().any(|d| d.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: dists.iter().map(|d| d.dim()).find(|&n| n != dim).unwrap(),
            });
        }
        let (dists, coeffs): (Vec<Dist>, Vec<f64>) = dists
            .into_iter()
            .zip(coeffs)
            .filter(|(_, a)| *a != 0.0)
            .unzip();
        let norm = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidSpec(
                "coefficients must contain a nonzero finite entry".into(),
            ));
        }
        Ok(WeightedFamily {
            dists,
            coeffs: coeffs.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dists[0].dim()
    }

    /// The distribution of sum_i a_i X_i.
    pub fn sum(&self) -> Result<SumDensity> {
        SumDensity::of_family(&self.dists, &self.coeffs)
    }
}

/// The three equivalent entropy-power inequality forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpiForm {
    /// N(sum a_i X_i) >= sum a_i^2 N(X_i).
    Power,
    /// h(sum a_i X_i) >= h(sum a_i G_i), G_i white Gaussian with h(G_i) = h(X_i).
    GaussianComparison,
    /// h(sum a_i X_i) >= sum a_i^2 h(X_i).
    Concavity,
}

/// The three equivalent Fisher-information inequality forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiiForm {
    /// 1/J(sum a_i X_i) >= sum a_i^2 / J(X_i).
    Reciprocal,
    /// J(sum a_i X_i) <= J(sum a_i G_i), G_i white Gaussian with J(G_i) = J(X_i).
    GaussianComparison,
    /// J(sum a_i X_i) <= sum a_i^2 J(X_i).
    Convexity,
}

fn entropy_of_sum(fam: &WeightedFamily) -> Result<(f64, f64)> {
    let h = fam.sum()?.entropy(SUITE_TOL)?;
    Ok((h.nats, h.error_estimate))
}

fn member_entropies(fam: &WeightedFamily) -> Result<(Vec<f64>, f64)> {
    let mut hs = Vec::with_capacity(fam.dists.len());
    let mut err = 0.0;
    for d in &fam.dists {
        let h = entropy_tol(d, SUITE_TOL)?;
        hs.push(h.nats);
        err += h.error_estimate;
    }
    Ok((hs, err))
}

/// Check one form of the entropy-power inequality for the family.
pub fn check_epi(fam: &WeightedFamily, form: EpiForm) -> Result<InequalityReport> {
    let n = fam.dim() as f64;
    let (h_sum, e_sum) = entropy_of_sum(fam)?;
    let (hs, e_mem) = member_entropies(fam)?;
    let powers: Vec<f64> = hs.iter().map(|h| (2.0 * h / n - LN_2PI_E).exp()).collect();
    let inputs = (fam, format!("{form:?}"));
    let report = match form {
        EpiForm::Power => {
            let lhs = (2.0 * h_sum / n - LN_2PI_E).exp();
            let rhs: f64 = fam
                .coeffs
                .iter()
                .zip(&powers)
                .map(|(a, p)| a * a * p)
                .sum();
            // dN = (2N/n) dh for both sides.
            let err = (2.0 / n) * (lhs * e_sum + rhs * e_mem);
            InequalityReport::new(
                "epi-power",
                "N(sum a_i X_i) >= sum a_i^2 N(X_i)",
                lhs,
                rhs,
                lhs - rhs,
                err,
                &inputs,
            )
        }
        EpiForm::GaussianComparison => {
            // White Gaussians matched in entropy have variance N(X_i) per
            // axis; their weighted sum is Gaussian with variance sum a^2 N_i.
            let gv: f64 = fam
                .coeffs
                .iter()
                .zip(&powers)
                .map(|(a, p)| a * a * p)
                .sum();
            let rhs = 0.5 * n * (LN_2PI_E + gv.ln());
            InequalityReport::new(
                "epi-gaussian",
                "h(sum a_i X_i) >= h(sum a_i G_i), h(G_i) = h(X_i)",
                h_sum,
                rhs,
                h_sum - rhs,
                e_sum + e_mem,
                &inputs,
            )
        }
        EpiForm::Concavity => {
            let rhs: f64 = fam.coeffs.iter().zip(&hs).map(|(a, h)| a * a * h).sum();
            InequalityReport::new(
                "epi-concavity",
                "h(sum a_i X_i) >= sum a_i^2 h(X_i)",
                h_sum,
                rhs,
                h_sum - rhs,
                e_sum + e_mem,
                &inputs,
            )
        }
    };
    Ok(report)
}

/// Check one form of the Fisher-information inequality for the family.
pub fn check_fii(fam: &WeightedFamily, form: FiiForm) -> Result<InequalityReport> {
    let j_sum = fam.sum()?.fisher(SUITE_TOL)?;
    let mut js = Vec::with_capacity(fam.dists.len());
    let mut e_mem = 0.0;
    for d in &fam.dists {
        let j = fisher_info_tol(d, SUITE_TOL)?;
        js.push(j.scalar);
        e_mem += j.error_estimate;
    }
    let inputs = (fam, format!("{form:?}"));
    let report = match form {
        FiiForm::Reciprocal => {
            let lhs = 1.0 / j_sum.value;
            let rhs: f64 = fam
                .coeffs
                .iter()
                .zip(&js)
                .map(|(a, j)| a * a / j)
                .sum();
            let err = j_sum.error_estimate / (j_sum.value * j_sum.value)
                + e_mem / js.iter().fold(f64::INFINITY, |m, j| m.min(j * j));
            InequalityReport::new(
                "fii-reciprocal",
                "1/J(sum a_i X_i) >= sum a_i^2 / J(X_i)",
                lhs,
                rhs,
                lhs - rhs,
                err,
                &inputs,
            )
        }
        FiiForm::GaussianComparison => {
            // White Gaussians matched in Fisher information have variance
            // 1/J(X_i) per axis, so J(sum a_i G_i) = 1/(sum a_i^2 / J_i).
            let rhs = 1.0
                / fam
                    .coeffs
                    .iter()
                    .zip(&js)
                    .map(|(a, j)| a * a / j)
                    .sum::<f64>();
            InequalityReport::new(
                "fii-gaussian",
                "J(sum a_i X_i) <= J(sum a_i G_i), J(G_i) = J(X_i)",
                j_sum.value,
                rhs,
                rhs - j_sum.value,
                j_sum.error_estimate + e_mem,
                &inputs,
            )
        }
        FiiForm::Convexity => {
            let rhs: f64 = fam.coeffs.iter().zip(&js).map(|(a, j)| a * a * j).sum();
            InequalityReport::new(
                "fii-convexity",
                "J(sum a_i X_i) <= sum a_i^2 J(X_i)",
                j_sum.value,
                rhs,
                rhs - j_sum.value,
                j_sum.error_estimate + e_mem,
                &inputs,
            )
        }
    };
    Ok(report)
}

/// I(X + Z; Z) = h(X + Z) - h(X) for white Gaussian Z of variance var_z.
pub(crate) fn info_with_noise(d: &Dist, var_z: f64) -> Result<(f64, f64)> {
    let eye = linalg::identity(d.dim());
    let smoothed = d.convolve_gaussian(var_z, &eye)?;
    let hy = entropy_tol(&smoothed, SUITE_TOL)?;
    let hx = entropy_tol(d, SUITE_TOL)?;
    Ok((hy.nats - hx.nats, hy.error_estimate + hx.error_estimate))
}

fn sum_info_with_noise(fam: &WeightedFamily, var_z: f64) -> Result<(f64, f64)> {
    let s = fam.sum()?;
    let hx = s.entropy(SUITE_TOL)?;
    let hy = s.convolve_gaussian(var_z)?.entropy(SUITE_TOL)?;
    Ok((hy.nats - hx.nats, hy.error_estimate + hx.error_estimate))
}

/// The mutual-information-inequality gap
/// f(t) = I(sum a_i X_i + sqrt(t) Z; Z) - sum a_i^2 I(X_i + sqrt(t) Z; Z),
/// which is zero at t = 0 and nonincreasing in t.
pub fn mii_gap(fam: &WeightedFamily, var_z: f64, t: f64) -> Result<NumericResult> {
    if t < 0.0 || var_z <= 0.0 {
        return Err(Error::DomainError(
            "perturbation level must be nonnegative and noise variance positive".into(),
        ));
    }
    if t == 0.0 {
        return Ok(NumericResult::closed(0.0));
    }
    let (lhs, e_lhs) = sum_info_with_noise(fam, t * var_z)?;
    let mut rhs = 0.0;
    let mut e_rhs = 0.0;
    for (a, d) in fam.coeffs.iter().zip(&fam.dists) {
        let (i, e) = info_with_noise(d, t * var_z)?;
        rhs += a * a * i;
        e_rhs += e;
    }
    Ok(NumericResult::quad(lhs - rhs, e_lhs + e_rhs))
}

/// Mutual information inequality:
/// I(sum a_i X_i + Z; Z) <= sum a_i^2 I(X_i + Z; Z) for Gaussian Z.
pub fn check_mii(fam: &WeightedFamily, var_z: f64) -> Result<InequalityReport> {
    let gap = mii_gap(fam, var_z, 1.0)?;
    let lhs_rhs = gap.value; // lhs - rhs; slack is the negation
    let inputs = (fam, var_z);
    Ok(InequalityReport::new(
        "mii",
        "I(sum a_i X_i + Z; Z) <= sum a_i^2 I(X_i + Z; Z), Gaussian Z",
        lhs_rhs,
        0.0,
        -lhs_rhs,
        gap.error_estimate,
        &inputs,
    ))
}

/// The rewritten mutual-information inequality compares entropy-power gaps
/// before and after adding independent per-member noises Z_i:
///   [h(sum a_i G_i) - sum a_i^2 h(G_i)]
///     - [h(sum a_i X'_i) - sum a_i^2 h(X'_i)],  X'_i = G_i + Z_i,
/// here with Gaussian signals G_i of the given variances. For Gaussian Z_i
/// the difference is nonnegative; for non-Gaussian Z_i (and identical
/// signal variances) it turns strictly negative: the inequality reverses.
pub fn mii_exchanged_gap(
    gaussian_vars: &[f64],
    noises: &[Dist],
    coeffs: &[f64],
) -> Result<NumericResult> {
    if gaussian_vars.len() != noises.len() || noises.len() != coeffs.len() {
        return Err(Error::InvalidSpec(
            "need one variance, one noise and one coefficient per member".into(),
        ));
    }
    if noises.iter().any(|z| z.dim() != 1) {
        return Err(Error::UnsupportedDimension(
            "exchanged-role gap is implemented for scalar members".into(),
        ));
    }
    let norm = coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
    let coeffs: Vec<f64> = coeffs.iter().map(|a| a / norm).collect();
    // Unprimed side: all Gaussian, closed form.
    let gv: f64 = coeffs
        .iter()
        .zip(gaussian_vars)
        .map(|(a, v)| a * a * v)
        .sum();
    let unprimed = 0.5 * gv.ln()
        - coeffs
            .iter()
            .zip(gaussian_vars)
            .map(|(a, v)| 0.5 * a * a * v.ln())
            .sum::<f64>();
    // Primed side: sum a_i (G_i + Z_i) = (sum a_i Z_i) + N(0, sum a_i^2 v_i).
    let zsum = SumDensity::of_family(noises, &coeffs)?.convolve_gaussian(gv)?;
    let h_sum = zsum.entropy(SUITE_TOL)?;
    let mut primed = h_sum.nats;
    let mut err = h_sum.error_estimate;
    for ((a, v), z) in coeffs.iter().zip(gaussian_vars).zip(noises) {
        let member = z.convolve_gaussian(*v, &linalg::identity(1))?;
        let h = entropy_tol(&member, SUITE_TOL)?;
        primed -= a * a * h.nats;
        err += h.error_estimate;
    }
    Ok(NumericResult::quad(unprimed - primed, err))
}

/// Sato's inequality: I((X_i + Z)_i; Z) <= sum_i I(X_i + Z; Z) for a shared
/// perturbation Z independent of the independent (X_i)_i. Two summands use
/// joint 2-D quadrature; three use Monte Carlo with a widened tolerance.
pub fn check_sato(dists: &[Dist], z: &Dist) -> Result<InequalityReport> {
    if dists.iter().chain(std::iter::once(z)).any(|d| d.dim() != 1) {
        return Err(Error::UnsupportedDimension(
            "Sato's bound is implemented for scalar variables".into(),
        ));
    }
    let (lhs, e_lhs) = match dists.len() {
        2 => sato_lhs_quadrature(dists, z)?,
        3 => sato_lhs_monte_carlo(dists, z)?,
        _ => {
            return Err(Error::UnsupportedDimension(
                "Sato's bound needs two or three summands".into(),
            ))
        }
    };
    let mut rhs = 0.0;
    let mut e_rhs = 0.0;
    for d in dists {
        // I(X + Z; Z) = h(X + Z) - h(X) holds for any independent Z.
        let s = SumDensity::of_family(&[d.clone(), z.clone()], &[1.0, 1.0])?;
        let hy = s.entropy(SUITE_TOL)?;
        let hx = entropy_tol(d, SUITE_TOL)?;
        rhs += hy.nats - hx.nats;
        e_rhs += hy.error_estimate + hx.error_estimate;
    }
    let inputs = (dists, z);
    Ok(InequalityReport::new(
        "sato",
        "I((X_i + Z)_i; Z) <= sum_i I(X_i + Z; Z)",
        lhs,
        rhs,
        rhs - lhs,
        e_lhs + e_rhs,
        &inputs,
    ))
}

/// Log of the joint density of (X_1 + Z, X_2 + Z, ...) at y, by quadrature
/// over the shared perturbation.
fn sato_joint_log_pdf(dists: &[Dist], z: &Dist, y: &[f64]) -> Result<f64> {
    let (mz, cz) = z.moments()?;
    let sz = cz[0][0].sqrt();
    let mut lo = mz[0] - 15.0 * sz;
    let mut hi = mz[0] + 15.0 * sz;
    for (d, yi) in dists.iter().zip(y) {
        let (m, c) = d.moments()?;
        lo = lo.max(yi - m[0] - 15.0 * c[0][0].sqrt());
        hi = hi.min(yi - m[0] + 15.0 * c[0][0].sqrt());
    }
    if lo >= hi {
        return Ok(f64::NEG_INFINITY);
    }
    let f = |zv: f64| -> f64 {
        let mut lp = z.log_pdf(&[zv]).unwrap_or(f64::NEG_INFINITY);
        for (d, yi) in dists.iter().zip(y) {
            lp += d.log_pdf(&[yi - zv]).unwrap_or(f64::NEG_INFINITY);
        }
        if lp < -700.0 {
            0.0
        } else {
            lp.exp()
        }
    };
    let p = fixed_simpson(&f, lo, hi, 96)?.value;
    Ok(if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
}

fn sato_lhs_quadrature(dists: &[Dist], z: &Dist) -> Result<(f64, f64)> {
    // I(Y; Z) = h(Y) - h(Y | Z) = h(Y) - sum h(X_i).
    let mut ranges = Vec::new();
    let (mz, cz) = z.moments()?;
    for d in dists {
        let (m, c) = d.moments()?;
        let s = (c[0][0] + cz[0][0]).sqrt();
        let mid = m[0] + mz[0];
        ranges.push((mid - 10.0 * s, mid + 10.0 * s));
    }
    let f = |y0: f64, y1: f64| -> f64 {
        match sato_joint_log_pdf(dists, z, &[y0, y1]) {
            Ok(lp) if lp > -700.0 => -lp.exp() * lp,
            _ => 0.0,
        }
    };
    let h_joint = integrate_2d(&f, ranges[0], ranges[1], 1e-5)?;
    let mut h_cond = 0.0;
    let mut err = h_joint.error_estimate + 1e-5;
    for d in dists {
        let h = entropy_tol(d, SUITE_TOL)?;
        h_cond += h.nats;
        err += h.error_estimate;
    }
    Ok((h_joint.value - h_cond, err))
}

fn sato_lhs_monte_carlo(dists: &[Dist], z: &Dist) -> Result<(f64, f64)> {
    use rand::Rng;
    const SAMPLES: usize = 200_000;
    let mut rng = ChaCha12Rng::seed_from_u64(0x5a70);
    let mut seed = || rng.gen::<u64>();
    let zs = z.sample(SAMPLES, seed())?;
    let mut xs = Vec::new();
    for d in dists {
        xs.push(d.sample(SAMPLES, seed())?);
    }
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    let mut used = 0usize;
    for k in 0..SAMPLES {
        let y: Vec<f64> = xs.iter().map(|x| x[k][0] + zs[k][0]).collect();
        let lp = sato_joint_log_pdf(dists, z, &y)?;
        if lp.is_finite() {
            acc += lp;
            acc2 += lp * lp;
            used += 1;
        }
    }
    if used < SAMPLES / 2 {
        return Err(Error::NumericalFailure(
            "joint density vanished on most Monte Carlo samples".into(),
        ));
    }
    let mean = acc / used as f64;
    let var = (acc2 / used as f64 - mean * mean).max(0.0);
    let h_joint = -mean;
    let mc_err = (var / used as f64).sqrt();
    let mut h_cond = 0.0;
    let mut err = 10.0 * mc_err; // widened tolerance for the sampled branch
    for d in dists {
        let h = entropy_tol(d, SUITE_TOL)?;
        h_cond += h.nats;
        err += h.error_estimate;
    }
    Ok((h_joint - h_cond, err))
}

/// A two-stage Gaussian estimation chain theta -> X -> Y with
/// X = theta + N(0, noise1_var) and Y = a X + N(0, noise2_var).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DpiChain {
    pub prior: Dist,
    pub noise1_var: f64,
    pub a: f64,
    pub noise2_var: f64,
}

/// Estimation-theoretic data processing: the second stage can only hurt,
/// both in MMSE (Var(theta|Y) >= Var(theta|X)) and, for the translation
/// families p(x|theta), in parametric Fisher information (J_Y <= J_X).
pub fn check_dpi(chain: &DpiChain) -> Result<(InequalityReport, InequalityReport)> {
    if chain.prior.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            "the estimation chain is implemented for scalar parameters".into(),
        ));
    }
    if !(chain.noise1_var > 0.0 && chain.noise2_var > 0.0 && chain.a != 0.0) {
        return Err(Error::InvalidSpec(
            "both noise variances must be positive and the gain nonzero".into(),
        ));
    }
    // X = theta + N1: identity channel with noise variance noise1_var.
    let ch_x = ChannelSpec::white1(
        chain.prior.clone(),
        chain.noise1_var,
        Orientation::NoiseScaled,
        1.0,
    )?;
    let var_x = mmse(&ch_x)?;
    // Y = a theta + (a N1 + N2): gain a, noise variance a^2 v1 + v2. The
    // channel scales the signal by sqrt(t), so t = a^2.
    let v_tot = chain.a * chain.a * chain.noise1_var + chain.noise2_var;
    let ch_y = ChannelSpec::white1(
        chain.prior.clone(),
        v_tot,
        Orientation::SignalScaled,
        chain.a * chain.a,
    )?;
    let var_y = mmse(&ch_y)?;
    let mmse_report = InequalityReport::new(
        "dpi-mmse",
        "Var(theta | Y) >= Var(theta | X) along theta -> X -> Y",
        var_y.value,
        var_x.value,
        var_y.value - var_x.value,
        var_y.error_estimate + var_x.error_estimate,
        chain,
    );
    // Translation families: J_theta(X) = 1/v1, J_theta(Y) = a^2/(a^2 v1+v2).
    let j_x = 1.0 / chain.noise1_var;
    let j_y = chain.a * chain.a / v_tot;
    let fi_report = InequalityReport::new(
        "dpi-fisher",
        "J_theta(Y) <= J_theta(X) along theta -> X -> Y",
        j_y,
        j_x,
        j_x - j_y,
        1e-14,
        chain,
    );
    Ok((mmse_report, fi_report))
}

/// Gaussian saddle point: among signals of fixed second moments, the
/// Gaussian minimizes the information delivered through an additive Gaussian
/// noise channel: I(X + Z; Z) >= I(X* + Z; Z).
pub fn check_saddlepoint(x: &Dist, var_z: f64) -> Result<InequalityReport> {
    if x.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            "saddle-point check is implemented for scalar signals".into(),
        ));
    }
    if var_z <= 0.0 {
        return Err(Error::InvalidSpec("noise variance must be positive".into()));
    }
    let (lhs, e_lhs) = info_with_noise(x, var_z)?;
    let (_, c) = x.moments()?;
    let rhs = 0.5 * ((c[0][0] + var_z) / c[0][0]).ln();
    let inputs = (x, var_z);
    Ok(InequalityReport::new(
        "saddlepoint",
        "I(X + Z; Z) >= I(X* + Z; Z), X* Gaussian with matched moments",
        lhs,
        rhs,
        lhs - rhs,
        e_lhs,
        &inputs,
    ))
}

/// Negentropy is a contrast function: -h(sum a_i X_i) <= max_i -h(X_i),
/// i.e. the weighted sum is at least as entropic as the least entropic
/// member.
pub fn check_contrast(fam: &WeightedFamily) -> Result<InequalityReport> {
    let (h_sum, e_sum) = entropy_of_sum(fam)?;
    let (hs, e_mem) = member_entropies(fam)?;
    let h_min = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(InequalityReport::new(
        "contrast",
        "-h(sum a_i X_i) <= max_i -h(X_i)",
        -h_sum,
        -h_min,
        h_sum - h_min,
        e_sum + e_mem,
        fam,
    ))
}

/// Cramér-Rao bound: J(X) >= tr(Cov(X)^{-1}), equality iff Gaussian.
pub fn check_cramer_rao(x: &Dist) -> Result<InequalityReport> {
    let j = fisher_info_tol(x, SUITE_TOL)?;
    let (_, c) = x.moments()?;
    let rhs = linalg::trace(&linalg::inverse(&c)?);
    Ok(InequalityReport::new(
        "cramer-rao",
        "J(X) >= tr(Cov(X)^{-1})",
        j.scalar,
        rhs,
        j.scalar - rhs,
        j.error_estimate,
        x,
    ))
}
