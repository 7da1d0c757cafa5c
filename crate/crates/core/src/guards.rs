//! Resource guards for the exponential computations, overridable through
//! environment variables.

use std::time::Duration;

use thiserror::Error;

pub const ENV_GROEBNER_MAX_VARS: &str = "GRAPHCSM_GROEBNER_MAX_VARS";
pub const ENV_GROEBNER_MAX_DEGREE: &str = "GRAPHCSM_GROEBNER_MAX_DEGREE";
pub const ENV_GROEBNER_MAX_BASIS: &str = "GRAPHCSM_GROEBNER_MAX_BASIS";
pub const ENV_GROEBNER_TIMEOUT_MS: &str = "GRAPHCSM_GROEBNER_TIMEOUT_MS";
pub const ENV_COUNT_MAX_POINTS: &str = "GRAPHCSM_COUNT_MAX_POINTS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("environment variable {var}={value:?} is not a non-negative integer")]
pub struct GuardParseError {
    pub var: &'static str,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Distinct variables occurring in an ideal's generators.
    pub groebner_max_vars: usize,
    /// Total degree of any generator.
    pub groebner_max_degree: usize,
    /// Basis size at which Buchberger's algorithm gives up.
    pub groebner_max_basis: usize,
    pub groebner_timeout: Duration,
    /// Upper bound on the assignments enumerated by one point count.
    pub count_max_points: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            groebner_max_vars: 8,
            groebner_max_degree: 5,
            groebner_max_basis: 1000,
            groebner_timeout: Duration::from_secs(60),
            count_max_points: 1_000_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with any of the `GRAPHCSM_*` variables applied on top.
    pub fn from_env() -> Result<Self, GuardParseError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, GuardParseError> {
        let read = |var: &'static str| -> Result<Option<u64>, GuardParseError> {
            match get(var) {
                None => Ok(None),
                Some(value) => value
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| GuardParseError { var, value }),
            }
        };
        let mut l = Limits::default();
        if let Some(v) = read(ENV_GROEBNER_MAX_VARS)? {
            l.groebner_max_vars = v as usize;
        }
        if let Some(v) = read(ENV_GROEBNER_MAX_DEGREE)? {
            l.groebner_max_degree = v as usize;
        }
        if let Some(v) = read(ENV_GROEBNER_MAX_BASIS)? {
            l.groebner_max_basis = v as usize;
        }
        if let Some(v) = read(ENV_GROEBNER_TIMEOUT_MS)? {
            l.groebner_timeout = Duration::from_millis(v);
        }
        if let Some(v) = read(ENV_COUNT_MAX_POINTS)? {
            l.count_max_points = v;
        }
        Ok(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let l = Limits::from_lookup(|k| (k == ENV_GROEBNER_MAX_VARS).then(|| "10".to_string())).unwrap();
        assert_eq!(l.groebner_max_vars, 10);
        assert_eq!(l.groebner_max_degree, 5);
        let bad = Limits::from_lookup(|k| (k == ENV_COUNT_MAX_POINTS).then(|| "lots".to_string()));
        assert_eq!(bad.unwrap_err().var, ENV_COUNT_MAX_POINTS);
    }
}
