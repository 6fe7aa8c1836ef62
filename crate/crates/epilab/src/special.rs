//! Scalar special functions used by the closed-form densities.



pub const LN_2PI: f64 = 1.837_877_066_409_345_5;
pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal pdf.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Log pdf of N(mean, var).
pub fn ln_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    -0.5 * (LN_2PI + var.ln() + z * z / var)
}

/// Standard normal cdf.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// log Phi(x), stable far into the left tail.
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    if x > -8.0 {
        (0.5 * libm::erfc(-x / SQRT_2)).ln()
    } else {
        // Asymptotic expansion Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6)
        let x2 = x * x;
        let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
        -0.5 * x2 - 0.5 * LN_2PI - (-x).ln() + series.ln()
    }
}

/// log of the scaled complementary error function, erfcx(w) = e^{w^2} erfc(w).
///
/// Keeps full precision for large positive w, where e^{w^2} and erfc(w)
/// individually overflow/underflow and their direct combination cancels.
pub fn ln_erfcx(w: f64) -> f64 {
    if w >= 25.0 {
        // erfcx(w) ~ 1/(w sqrt(pi)) (1 - 1/(2w^2) + 3/(4w^4) - ...)
        let w2 = w * w;
        let series = 1.0 - 0.5 / w2 + 0.75 / (w2 * w2) - 1.875 / (w2 * w2 * w2);
        -w.ln() - 0.5 * std::f64::consts::PI.ln() + series.ln()
    } else if w > -25.0 {
        w * w + libm::erfc(w).ln()
    } else {
        // erfc(w) -> 2; the e^{-w^2} correction term is below double precision.
        w * w + std::f64::consts::LN_2
    }
}

/// log(exp(a) + exp(b)) without overflow.
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// log(sum exp(v_i)) without overflow.
pub fn log_sum_exp(vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// log(exp(a) - exp(b)) for a > b, stable when both are tiny.
pub fn log_diff_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b);
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}
