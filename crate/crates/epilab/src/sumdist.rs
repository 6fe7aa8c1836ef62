//! Densities of weighted sums of independent variables.
//!
//! Sums are materialized structurally where possible (Gaussians absorb into
//! closed smoothed forms); otherwise a 1-D numeric convolution is evaluated
//! on demand (two non-Gaussian parts) or folded onto a cached grid (three or
//! more parts).

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::functionals::{entropy_view, fisher_view, DensityView, EntropyValue};
use crate::linalg;
use crate::numerics::{integrate_split, NumericResult};
use crate::special::ln_normal_pdf;

/// On-demand convolution of two 1-D laws with evaluable densities.
#[derive(Clone, Debug)]
pub struct ConvPair {
    pub a: Dist,
    pub b: Dist,
    mean: f64,
    var: f64,
}

impl ConvPair {
    pub fn new(a: Dist, b: Dist) -> Result<ConvPair> {
        let (ma, ca) = a.moments()?;
        let (mb, cb) = b.moments()?;
        Ok(ConvPair {
            a,
            b,
            mean: ma[0] + mb[0],
            var: ca[0][0] + cb[0][0],
        })
    }

    /// Density of A + B at y: integrate over the narrower factor.
    pub fn pdf(&self, y: f64) -> f64 {
        let (ma, ca) = self.a.moments().unwrap();
        let (mb, cb) = self.b.moments().unwrap();
        // Integrate over the variable of the *narrower* part so the adaptive
        // panels always see the localized factor.
        let (narrow, wide, mn, sn) = if ca[0][0] <= cb[0][0] {
            (&self.a, &self.b, ma[0], ca[0][0].sqrt())
        } else {
            (&self.b, &self.a, mb[0], cb[0][0].sqrt())
        };
        let integrand = |u: f64| {
            let lp = narrow.log_pdf(&[u]).unwrap_or(f64::NEG_INFINITY)
                + wide.log_pdf(&[y - u]).unwrap_or(f64::NEG_INFINITY);
            if lp < -700.0 {
                0.0
            } else {
                lp.exp()
            }
        };
        let mut breaks = narrow.kinks();
        breaks.extend(wide.kinks().iter().map(|k| y - k));
        let (lo, hi) = (mn - 13.0 * sn, mn + 13.0 * sn);
        let first = integrate_split(&integrand, lo, hi, &breaks, 1e-13)
            .map(|r| r.value)
            .unwrap_or(0.0);
        if first > 0.0 && first < 1e-3 {
            integrate_split(&integrand, lo, hi, &breaks, (first * 1e-11).max(1e-18))
                .map(|r| r.value)
                .unwrap_or(first)
        } else {
            first
        }
    }

    fn kink_sums(&self) -> Vec<f64> {
        // Convolution is one degree smoother, but the images of kink pairs
        // are still useful split hints for outer quadratures.
        let ka = self.a.kinks();
        let kb = self.b.kinks();
        let mut out = Vec::new();
        for x in &ka {
            for y in &kb {
                out.push(x + y);
            }
        }
        if kb.is_empty() {
            out.extend(ka.iter());
        }
        if ka.is_empty() {
            out.extend(kb.iter());
        }
        out
    }
}

/// Tabulated 1-D density with cubic interpolation.
#[derive(Clone, Debug)]
pub struct GridDensity {
    pub lo: f64,
    pub step: f64,
    pub vals: Vec<f64>,
    pub mean: f64,
    pub var: f64,
}

impl GridDensity {
    pub fn hi(&self) -> f64 {
        self.lo + self.step * (self.vals.len() - 1) as f64
    }

    /// Catmull-Rom interpolation of the tabulated pdf, clamped at zero.
    pub fn pdf(&self, x: f64) -> f64 {
        let n = self.vals.len();
        let u = (x - self.lo) / self.step;
        if u < 0.0 || u > (n - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(n - 2);
        let f = u - i as f64;
        let v = |k: isize| {
            let idx = i as isize + k;
            if idx < 0 || idx >= n as isize {
                0.0
            } else {
                self.vals[idx as usize]
            }
        };
        let (p0, p1, p2, p3) = (v(-1), v(0), v(1), v(2));
        let val = p1
            + 0.5
                * f
                * (p2 - p0
                    + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3
                        + f * (3.0 * (p1 - p2) + p3 - p0)));
        val.max(0.0)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let p = self.pdf(x);
        if p <= 0.0 {
            f64::NEG_INFINITY
        } else {
            p.ln()
        }
    }

    /// Tabulate `pdf_fn` over [lo, hi] with the given node count.
    pub fn tabulate<F: Fn(f64) -> f64>(
        pdf_fn: F,
        lo: f64,
        hi: f64,
        nodes: usize,
        mean: f64,
        var: f64,
    ) -> GridDensity {
        let step = (hi - lo) / (nodes - 1) as f64;
        let vals = (0..nodes)
            .map(|i| pdf_fn(lo + i as f64 * step).max(0.0))
            .collect();
        GridDensity {
            lo,
            step,
            vals,
            mean,
            var,
        }
    }
}

/// Density of a weighted sum of independent variables.
pub enum SumDensity {
    /// Structurally simplified to a distribution specification.
    Spec(Dist),
    /// Exactly two non-Gaussian parts, convolved on demand.
    Pair(ConvPair),
    /// Three or more parts folded onto a grid.
    Grid(GridDensity),
}

impl SumDensity {
    /// Law of sum_i coeffs[i] * dists[i] for independent dists.
    ///
    /// # Notes
    /// Zero coefficients are dropped. Vector-valued sums are supported when at
    /// most one summand is non-Gaussian (and Gaussian means vanish otherwise).
    pub fn of_family(dists: &[Dist], coeffs: &[f64]) -> Result<SumDensity> {
        if dists.is_empty() || dists.len() != coeffs.len() {
            return Err(Error::InvalidSpec(
                "family needs matching non-empty dists/coeffs".into(),
            ));
        }
        let n = dists[0].dim();
        if dists.iter().any(|d| d.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: dists.iter().map(|d| d.dim()).find(|&d| d != n).unwrap(),
            });
        }
        if n > 1 {
            return Self::of_family_nd(dists, coeffs);
        }
        // Split into the merged Gaussian part and scaled non-Gaussian parts.
        let mut g_mean = 0.0;
        let mut g_var = 0.0;
        let mut has_gauss = false;
        let mut parts: Vec<Dist> = Vec::new();
        for (d, &a) in dists.iter().zip(coeffs) {
            if a == 0.0 {
                continue;
            }
            if let Some((m, c)) = d.gaussian_form() {
                g_mean += a * m[0];
                g_var += a * a * c[0][0];
                has_gauss = true;
            } else {
                parts.push(d.scale1(a)?);
            }
        }
        match parts.len() {
            0 => {
                if !has_gauss {
                    return Err(Error::InvalidSpec("all coefficients are zero".into()));
                }
                Ok(SumDensity::Spec(Dist::gaussian1(g_mean, g_var)))
            }
            1 => {
                let mut d = parts.pop().unwrap();
                if has_gauss {
                    if g_mean != 0.0 {
                        d = d.shift1(g_mean)?;
                    }
                    if g_var > 0.0 {
                        d = d.convolve_gaussian(g_var, &[vec![1.0]])?;
                    }
                }
                Ok(SumDensity::Spec(d))
            }
            2 => {
                let mut a = parts.remove(0);
                if has_gauss {
                    if g_mean != 0.0 {
                        a = a.shift1(g_mean)?;
                    }
                    if g_var > 0.0 {
                        a = a.convolve_gaussian(g_var, &[vec![1.0]])?;
                    }
                }
                Ok(SumDensity::Pair(ConvPair::new(a, parts.remove(0))?))
            }
            _ => {
                let mut a = parts.remove(0);
                if has_gauss {
                    if g_mean != 0.0 {
                        a = a.shift1(g_mean)?;
                    }
                    if g_var > 0.0 {
                        a = a.convolve_gaussian(g_var, &[vec![1.0]])?;
                    }
                }
                let mut grid = fold_to_grid(&a, &parts)?;
                // Folding can leave slight normalization drift; rescale.
                renormalize(&mut grid)?;
                Ok(SumDensity::Grid(grid))
            }
        }
    }

    fn of_family_nd(dists: &[Dist], coeffs: &[f64]) -> Result<SumDensity> {
        let n = dists[0].dim();
        let mut g_mean = vec![0.0; n];
        let mut g_cov = linalg::scaled_identity(n, 0.0);
        let mut has_gauss = false;
        let mut non: Vec<Dist> = Vec::new();
        for (d, &a) in dists.iter().zip(coeffs) {
            if a == 0.0 {
                continue;
            }
            if let Some((m, c)) = d.gaussian_form() {
                for i in 0..n {
                    g_mean[i] += a * m[i];
                }
                g_cov = linalg::mat_add(&g_cov, &linalg::mat_scale(&c, a * a));
                has_gauss = true;
            } else {
                non.push(if (a - 1.0).abs() < 1e-15 {
                    d.clone()
                } else {
                    Dist::LinearImage {
                        matrix: linalg::scaled_identity(n, a),
                        base: Box::new(d.clone()),
                    }
                });
            }
        }
        match non.len() {
            0 => {
                if !has_gauss {
                    return Err(Error::InvalidSpec("all coefficients are zero".into()));
                }
                Ok(SumDensity::Spec(Dist::Gaussian {
                    mean: g_mean,
                    cov: g_cov,
                }))
            }
            1 => {
                if has_gauss && g_mean.iter().any(|m| m.abs() > 1e-12) {
                    return Err(Error::UnsupportedConvolution(
                        "vector sums require zero-mean Gaussian summands".into(),
                    ));
                }
                let d = non.pop().unwrap();
                if has_gauss {
                    Ok(SumDensity::Spec(d.convolve_gaussian(1.0, &g_cov)?))
                } else {
                    Ok(SumDensity::Spec(d))
                }
            }
            _ => Err(Error::UnsupportedConvolution(
                "vector sums support at most one non-Gaussian summand".into(),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SumDensity::Spec(d) => d.dim(),
            _ => 1,
        }
    }

    /// 1-D mean and variance (exact, from the summands).
    pub fn moments1(&self) -> Result<(f64, f64)> {
        match self {
            SumDensity::Spec(d) => {
                let (m, c) = d.moments()?;
                Ok((m[0], c[0][0]))
            }
            SumDensity::Pair(p) => Ok((p.mean, p.var)),
            SumDensity::Grid(g) => Ok((g.mean, g.var)),
        }
    }

    /// Numeric density view.
    pub fn view(&self) -> Result<DensityView<'_>> {
        match self {
            SumDensity::Spec(d) => d.view(),
            SumDensity::Pair(p) => Ok(DensityView {
                dim: 1,
                log_pdf: Box::new(move |x: &[f64]| {
                    let v = p.pdf(x[0]);
                    if v <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        v.ln()
                    }
                }),
                kinks: p.kink_sums(),
                mean: vec![p.mean],
                cov: vec![vec![p.var]],
            }),
            SumDensity::Grid(g) => Ok(DensityView {
                dim: 1,
                log_pdf: Box::new(move |x: &[f64]| g.log_pdf(x[0])),
                kinks: vec![],
                mean: vec![g.mean],
                cov: vec![vec![g.var]],
            }),
        }
    }

    /// Differential entropy of the sum.
    pub fn entropy(&self, tol: f64) -> Result<EntropyValue> {
        match self {
            SumDensity::Spec(d) => crate::functionals::entropy_tol(d, tol),
            _ => entropy_view(&self.view()?, tol),
        }
    }

    /// Scalar Fisher information of the sum (1-D).
    pub fn fisher(&self, tol: f64) -> Result<NumericResult> {
        match self {
            SumDensity::Spec(d) => {
                let f = crate::functionals::fisher_info_tol(d, tol)?;
                Ok(NumericResult {
                    value: f.scalar,
                    error_estimate: f.error_estimate,
                    method: f.method,
                })
            }
            _ => {
                let view = self.view()?;
                let (m, err) = fisher_view(&view, None, tol)?;
                Ok(NumericResult::quad(m[0][0], err))
            }
        }
    }

    /// The sum smoothed by independent N(0, var) noise (1-D), or N(0, var*I).
    pub fn convolve_gaussian(&self, var: f64) -> Result<SumDensity> {
        if var == 0.0 {
            return match self {
                SumDensity::Spec(d) => Ok(SumDensity::Spec(d.clone())),
                SumDensity::Pair(p) => Ok(SumDensity::Pair(p.clone())),
                SumDensity::Grid(g) => Ok(SumDensity::Grid(g.clone())),
            };
        }
        match self {
            SumDensity::Spec(d) => {
                let k = linalg::scaled_identity(d.dim(), 1.0);
                Ok(SumDensity::Spec(d.convolve_gaussian(var, &k)?))
            }
            // Absorb the Gaussian into one factor: (A + B) + Z = (A + Z) + B.
            SumDensity::Pair(p) => Ok(SumDensity::Pair(ConvPair::new(
                p.a.convolve_gaussian(var, &[vec![1.0]])?,
                p.b.clone(),
            )?)),
            SumDensity::Grid(g) => {
                let s = var.sqrt();
                let lo = g.lo - 12.0 * s;
                let hi = g.hi() + 12.0 * s;
                let nodes = ((hi - lo) / g.step).ceil() as usize + 1;
                let pdf_fn = |y: f64| {
                    integrate_split(
                        &|z: f64| {
                            let p = g.pdf(y - z);
                            if p <= 0.0 {
                                0.0
                            } else {
                                p * ln_normal_pdf(z, 0.0, var).exp()
                            }
                        },
                        -12.0 * s,
                        12.0 * s,
                        &[],
                        1e-13,
                    )
                    .map(|r| r.value)
                    .unwrap_or(0.0)
                };
                let mut out =
                    GridDensity::tabulate(pdf_fn, lo, hi, nodes, g.mean, g.var + var);
                renormalize(&mut out)?;
                Ok(SumDensity::Grid(out))
            }
        }
    }
}

/// Fold `first` with the remaining parts onto a grid.
fn fold_to_grid(first: &Dist, rest: &[Dist]) -> Result<GridDensity> {
    let mut sigmas = Vec::new();
    let mut mean = 0.0;
    for d in std::iter::once(first).chain(rest.iter()) {
        let (m, c) = d.moments()?;
        mean += m[0];
        sigmas.push(c[0][0].sqrt());
    }
    let spread: f64 = sigmas.iter().sum();
    let sigma_min = sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    let radius = 12.0 * spread;
    let step = (sigma_min / 40.0).min(2.0 * radius / 4000.0);
    let nodes = ((2.0 * radius / step).ceil() as usize + 1).min(30_001);

    // First fold: ConvPair of the first two parts evaluated at nodes.
    let pair = ConvPair::new(first.clone(), rest[0].clone())?;
    let (m0, v0) = (pair.mean, pair.var);
    let mut grid = GridDensity::tabulate(
        |y| pair.pdf(y),
        mean - radius,
        mean + radius,
        nodes,
        m0,
        v0,
    );
    // Remaining folds: grid (x) closed part.
    for part in &rest[1..] {
        let (pm, pc) = part.moments()?;
        let (pmu, psig) = (pm[0], pc[0][0].sqrt());
        let breaks = part.kinks();
        let old = grid.clone();
        let pdf_fn = |y: f64| {
            let shifted: Vec<f64> = breaks.iter().map(|k| y - k).collect();
            integrate_split(
                &|u: f64| {
                    let p = old.pdf(u);
                    if p <= 0.0 {
                        return 0.0;
                    }
                    let lp = part.log_pdf(&[y - u]).unwrap_or(f64::NEG_INFINITY);
                    if lp < -700.0 {
                        0.0
                    } else {
                        p * lp.exp()
                    }
                },
                (y - pmu) - 13.0 * psig.max(old.var.sqrt()) - old.var.sqrt() * 13.0,
                (y - pmu) + 13.0 * psig.max(old.var.sqrt()) + old.var.sqrt() * 13.0,
                &shifted,
                1e-13,
            )
            .map(|r| r.value)
            .unwrap_or(0.0)
        };
        grid = GridDensity::tabulate(
            pdf_fn,
            mean - radius,
            mean + radius,
            nodes,
            old.mean + pmu,
            old.var + pc[0][0],
        );
    }
    Ok(grid)
}

/// Rescale a grid so that its Simpson mass is exactly one.
fn renormalize(g: &mut GridDensity) -> Result<()> {
    let mass = integrate_split(&|x: f64| g.pdf(x), g.lo, g.hi(), &[], 1e-12)?.value;
    if !(0.5..2.0).contains(&mass) {
        return Err(Error::NumericalFailure(format!(
            "grid density mass {mass} is far from one"
        )));
    }
    for v in &mut g.vals {
        *v /= mass;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{entropy, LN_2PI_E};
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_sum_is_closed() {
        let s = SumDensity::of_family(
            &[Dist::gaussian1(1.0, 2.0), Dist::gaussian1(-1.0, 3.0)],
            &[0.6, 0.8],
        )
        .unwrap();
        match s {
            SumDensity::Spec(Dist::Gaussian { mean, cov }) => {
                assert_relative_eq!(mean[0], 0.6 - 0.8, epsilon = 1e-15);
                assert_relative_eq!(cov[0][0], 0.36 * 2.0 + 0.64 * 3.0, epsilon = 1e-14);
            }
            _ => panic!("expected closed Gaussian"),
        }
    }

    #[test]
    fn laplace_plus_gaussian_absorbs() {
        let s = SumDensity::of_family(
            &[Dist::unit_laplace(), Dist::gaussian1(0.0, 1.0)],
            &[0.6, 0.8],
        )
        .unwrap();
        match &s {
            SumDensity::Spec(Dist::GaussianSmoothed { .. }) => {}
            _ => panic!("expected smoothed closed form"),
        }
        let (m, v) = s.moments1().unwrap();
        assert_relative_eq!(m, 0.0, epsilon = 1e-14);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pair_convolution_entropy_matches_gaussian_oracle() {
        let a = Dist::unit_laplace();
        let b = Dist::unit_laplace();
        let s = SumDensity::of_family(&[a, b], &[1.0 / SQRT2, 1.0 / SQRT2]).unwrap();
        assert!(matches!(s, SumDensity::Pair(_)));
        let h = s.entropy(1e-9).unwrap();
        // Oracle: normalized sum of two unit Laplace variables has density
        // closer to Gaussian; entropy must lie strictly between h(Laplace)
        // and h(N(0,1)) (monotone approach to Gaussianity).
        let h_lap = entropy(&Dist::unit_laplace()).unwrap().nats;
        let h_gauss = 0.5 * LN_2PI_E;
        assert!(
            h.nats > h_lap + 1e-3 && h.nats < h_gauss,
            "h(sum) = {} not in ({h_lap}, {h_gauss})",
            h.nats
        );
        let (m, v) = s.moments1().unwrap();
        assert_relative_eq!(m, 0.0, epsilon = 1e-14);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn pair_pdf_matches_independent_oracle() {
        // Laplace(0,1) + Laplace(0,1) has the closed density
        // p(y) = e^{-|y|} (1 + |y|) / 4.
        let s = SumDensity::of_family(
            &[Dist::laplace(0.0, 1.0), Dist::laplace(0.0, 1.0)],
            &[1.0, 1.0],
        )
        .unwrap();
        let v = s.view().unwrap();
        for &y in &[-3.0f64, -0.5, 0.0, 1.0, 4.0] {
            let expect = (-y.abs()).exp() * (1.0 + y.abs()) / 4.0;
            assert_relative_eq!((v.log_pdf)(&[y]).exp(), expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn grid_fold_three_laplace_normalizes_and_matches_moments() {
        let parts = vec![
            Dist::unit_laplace(),
            Dist::unit_laplace(),
            Dist::unit_laplace(),
        ];
        let c = 1.0 / 3f64.sqrt();
        let s = SumDensity::of_family(&parts, &[c, c, c]).unwrap();
        assert!(matches!(s, SumDensity::Grid(_)));
        let v = s.view().unwrap();
        let mass = integrate_split(
            &|x: f64| (v.log_pdf)(&[x]).exp(),
            v.mean[0] - 12.0,
            v.mean[0] + 12.0,
            &[],
            1e-10,
        )
        .unwrap()
        .value;
        assert_relative_eq!(mass, 1.0, epsilon = 1e-7);
        let ex2 = integrate_split(
            &|x: f64| x * x * (v.log_pdf)(&[x]).exp(),
            -14.0,
            14.0,
            &[],
            1e-10,
        )
        .unwrap()
        .value;
        assert_relative_eq!(ex2, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn smoothing_a_pair_matches_structure() {
        let s = SumDensity::of_family(
            &[Dist::unit_laplace(), Dist::uniform(-1.0, 1.0)],
            &[0.8, 0.6],
        )
        .unwrap();
        let sm = s.convolve_gaussian(0.5).unwrap();
        let (m0, v0) = s.moments1().unwrap();
        let (m1, v1) = sm.moments1().unwrap();
        assert_relative_eq!(m1, m0, epsilon = 1e-13);
        assert_relative_eq!(v1, v0 + 0.5, epsilon = 1e-12);
        // Density at a point agrees with direct smoothing quadrature.
        let vw = s.view().unwrap();
        let direct = integrate_split(
            &|z: f64| {
                let lp = (vw.log_pdf)(&[0.3 - z]);
                if lp < -700.0 {
                    0.0
                } else {
                    lp.exp() * ln_normal_pdf(z, 0.0, 0.5).exp()
                }
            },
            -9.0,
            9.0,
            &[],
            1e-11,
        )
        .unwrap()
        .value;
        let smv = sm.view().unwrap();
        assert_relative_eq!((smv.log_pdf)(&[0.3]).exp(), direct, max_relative = 1e-7);
    }

    #[test]
    fn vector_sum_single_non_gaussian() {
        let prod = Dist::Product {
            marginals: vec![Dist::unit_laplace(), Dist::unit_laplace()],
        };
        let g = Dist::standard_gaussian(2);
        let s = SumDensity::of_family(&[prod, g], &[0.6, 0.8]).unwrap();
        match s {
            SumDensity::Spec(d) => {
                let (_, c) = d.moments().unwrap();
                assert_relative_eq!(c[0][0], 1.0, epsilon = 1e-12);
                assert_relative_eq!(c[1][1], 1.0, epsilon = 1e-12);
            }
            _ => panic!("expected structural vector sum"),
        }
    }
}
