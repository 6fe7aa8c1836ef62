//! Slack-oriented inequality reports.
//!
//! Every check in this crate reduces to "lhs vs rhs with an oriented slack":
//! slack >= 0 means the inequality holds, slack within tolerance of zero is
//! an equality case, and slack below -tolerance is a violation. Reports carry
//! a digest of their inputs so that runs are attributable and reproducible.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Outcome of a single inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Equality,
}

/// One checked inequality with its numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityReport {
    /// Short machine-friendly check name, e.g. "epi-power".
    pub name: String,
    /// Human-readable statement of the inequality being checked.
    pub reference: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Oriented so that slack >= 0 means the inequality holds.
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// First 16 hex digits of the SHA-256 of the serialized inputs.
    pub inputs_digest: String,
    pub error_estimate: f64,
    /// Filled by the experiment runner; zero for direct library calls.
    pub seed: u64,
    /// Filled by the experiment runner; zero for direct library calls.
    pub wall_time_ms: u64,
}

/// Multiplier applied to every tolerance, from EPILAB_TOL_SCALE (default 1).
pub fn tol_scale() -> f64 {
    std::env::var("EPILAB_TOL_SCALE")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(1.0)
}

/// Classify a slack against a tolerance: equality wins inside the band,
/// violation below it, holds above it.
pub fn classify(slack: f64, tolerance: f64) -> Verdict {
    if slack.abs() <= tolerance {
        Verdict::Equality
    } else if slack < -tolerance {
        Verdict::Violated
    } else {
        Verdict::Holds
    }
}

/// Equality claims are only meaningful relative to numerical noise: the band
/// is ten combined error estimates, floored at 1e-5, times the global scale.
pub fn tolerance_for(error_estimate: f64) -> f64 {
    (10.0 * error_estimate).max(1e-5) * tol_scale()
}

/// Hex digest (first 16 chars of SHA-256) of any serializable input bundle.
pub fn digest_of<T: Serialize>(inputs: &T) -> String {
    let bytes = serde_json::to_vec(inputs).unwrap_or_default();
    let hash = Sha256::digest(&bytes);
    hash.iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect::<String>()
}

impl InequalityReport {
    /// Build a report from the two sides and an oriented slack.
    pub fn new<T: Serialize>(
        name: &str,
        reference: &str,
        lhs: f64,
        rhs: f64,
        slack: f64,
        error_estimate: f64,
        inputs: &T,
    ) -> InequalityReport {
        let tolerance = tolerance_for(error_estimate);
        InequalityReport {
            name: name.to_string(),
            reference: reference.to_string(),
            lhs,
            rhs,
            slack,
            tolerance,
            verdict: classify(slack, tolerance),
            inputs_digest: digest_of(inputs),
            error_estimate,
            seed: 0,
            wall_time_ms: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bands() {
        assert_eq!(classify(1.0, 1e-5), Verdict::Holds);
        assert_eq!(classify(-1.0, 1e-5), Verdict::Violated);
        assert_eq!(classify(5e-6, 1e-5), Verdict::Equality);
        assert_eq!(classify(-5e-6, 1e-5), Verdict::Equality);
        assert_eq!(classify(-1.0000001e-5, 1e-5), Verdict::Violated);
    }

    #[test]
    fn tolerance_floor_and_error_scaling() {
        assert_eq!(tolerance_for(0.0), 1e-5);
        assert_eq!(tolerance_for(1e-3), 1e-2);
    }

    #[test]
    fn digest_is_stable_and_short() {
        let a = digest_of(&("epi", 1.0, vec![2.0, 3.0]));
        let b = digest_of(&("epi", 1.0, vec![2.0, 3.0]));
        let c = digest_of(&("epi", 1.0, vec![2.0, 3.1]));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
        assert!(a.chars().all(|ch| ch.is_ascii_hexdigit()));
    }

    #[test]
    fn report_constructor_fills_verdict() {
        let r = InequalityReport::new("t", "a >= b", 2.0, 1.0, 1.0, 1e-6, &"x");
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.tolerance, 1e-5);
        assert_eq!(r.seed, 0);
    }
}
