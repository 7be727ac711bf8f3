use serde::{Deserialize, Serialize};

/// Numerical slack used when deciding equality, interval membership and sharpness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative Frobenius tolerance for matrix equality.
    pub eq_tol: f64,
    /// Eigenvalues within this distance outside `[0, 1]` are clamped back in.
    pub clip_tol: f64,
    /// Eigenvalues closer than this are treated as one degenerate cluster.
    pub cluster_tol: f64,
    /// Idempotence slack for sharp effects.
    pub sharp_tol: f64,
}

impl ToleranceConfig {
    pub const DEFAULT: ToleranceConfig = ToleranceConfig {
        eq_tol: 1e-9,
        clip_tol: 1e-10,
        cluster_tol: 1e-8,
        sharp_tol: 1e-8,
    };

    pub fn is_valid(&self) -> bool {
        let all_positive = [self.eq_tol, self.clip_tol, self.cluster_tol, self.sharp_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        all_positive && self.clip_tol <= self.cluster_tol
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const EQ_TOL: f64 = ToleranceConfig::DEFAULT.eq_tol;
pub const CLIP_TOL: f64 = ToleranceConfig::DEFAULT.clip_tol;
pub const CLUSTER_TOL: f64 = ToleranceConfig::DEFAULT.cluster_tol;
pub const SHARP_TOL: f64 = ToleranceConfig::DEFAULT.sharp_tol;

/// Smallest probability accepted as a conditioning denominator.
pub const PROB_FLOOR: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(ToleranceConfig::default().is_valid());
    }

    #[test]
    fn clip_above_cluster_is_rejected() {
        let t = ToleranceConfig {
            clip_tol: 1e-6,
            cluster_tol: 1e-8,
            ..ToleranceConfig::DEFAULT
        };
        assert!(!t.is_valid());
        let t = ToleranceConfig {
            eq_tol: 0.0,
            ..ToleranceConfig::DEFAULT
        };
        assert!(!t.is_valid());
    }
}
