//! Least squares with the usual diagnostic block, and the distribution
//! functions its p-values need.

mod ols;
pub mod special;

use thiserror::Error;

pub use ols::{ols_fit, ols_multi, Coefficient, RegressionReport};
pub use special::{beta_reg, f_sf, ln_gamma, t_cdf, t_quantile, t_two_sided_p};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("regressor is constant")]
    ConstantRegressor,
    #[error("need at least {needed} observations, found {n}")]
    TooFewObservations { n: usize, needed: usize },
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("inputs contain non-finite values")]
    NonFinite,
    #[error("design matrix is singular")]
    Singular,
    #[error("all residuals are zero")]
    AllZeroResiduals,
}

/// Durbin-Watson statistic: sum of squared successive residual differences
/// over the residual sum of squares.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64, StatsError> {
    if residuals.len() < 2 {
        return Err(StatsError::TooFewObservations { n: residuals.len(), needed: 2 });
    }
    let ss: f64 = residuals.iter().map(|e| e * e).sum();
    if ss == 0.0 {
        return Err(StatsError::AllZeroResiduals);
    }
    let diff: f64 = residuals.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Ok(diff / ss)
}

/// Serde adapter writing non-finite floats as the strings `inf`, `-inf`
/// and `nan`, since JSON has no literal for them.
pub(crate) mod sentinel {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else {
            serializer.serialize_str(label(*value))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("unexpected float sentinel `{other}`"))),
            },
        }
    }

    fn label(v: f64) -> &'static str {
        if v.is_nan() {
            "nan"
        } else if v > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    pub fn format_fixed(v: f64, precision: usize) -> String {
        if v.is_finite() {
            format!("{v:.precision$}")
        } else {
            label(v).to_string()
        }
    }

    pub fn format_sci(v: f64, precision: usize) -> String {
        if v.is_finite() {
            format!("{v:.precision$e}")
        } else {
            label(v).to_string()
        }
    }
}
