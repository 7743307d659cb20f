use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::special::{f_sf, t_quantile, t_two_sided_p};
use super::{durbin_watson, sentinel, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    #[serde(with = "sentinel")]
    pub t_value: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub dependent: String,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    #[serde(with = "sentinel")]
    pub f_statistic: f64,
    pub f_p_value: f64,
    #[serde(with = "sentinel")]
    pub log_likelihood: f64,
    #[serde(with = "sentinel")]
    pub aic: f64,
    #[serde(with = "sentinel")]
    pub bic: f64,
    /// `None` when every residual is zero.
    pub durbin_watson: Option<f64>,
    pub n_obs: usize,
    pub df_model: usize,
    pub df_resid: usize,
    /// Residual sum of squares is zero: t and F are infinite.
    pub exact_fit: bool,
}

impl RegressionReport {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn with_names(mut self, dependent: &str, regressors: &[&str]) -> Self {
        self.dependent = dependent.to_string();
        for (c, name) in self.coefficients.iter_mut().skip(1).zip(regressors) {
            c.name = name.to_string();
        }
        self
    }

    /// Plain-text table: one row per coefficient with estimate, standard
    /// error, t, p and the 95% interval, followed by the model summary.
    pub fn render_text(&self) -> String {
        let num = |v: f64, prec: usize| sentinel::format_fixed(v, prec);
        let mut out = String::new();
        let rule = "=".repeat(92);
        let thin = "-".repeat(92);
        let _ = writeln!(out, "OLS Regression Results");
        let _ = writeln!(out, "Dep. Variable: {}", self.dependent);
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(
            out,
            "{:<20}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}",
            "Variable", "Coefficient", "Std. Error", "t-Value", "P>|t|", "[0.025", "0.975]"
        );
        let _ = writeln!(out, "{thin}");
        for c in &self.coefficients {
            let _ = writeln!(
                out,
                "{:<20}{:>12}{:>12}{:>12}{:>12}{:>12}{:>12}",
                c.name,
                num(c.estimate, 4),
                num(c.std_error, 3),
                num(c.t_value, 3),
                num(c.p_value, 3),
                num(c.ci_low, 3),
                num(c.ci_high, 3)
            );
        }
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(
            out,
            "Note: R-squared = {}, Adjusted R-squared = {}, F-statistic = {}, Prob (F-statistic) = {}, AIC = {}, BIC = {}",
            num(self.r_squared, 3),
            num(self.adj_r_squared, 3),
            num(self.f_statistic, 1),
            sentinel::format_sci(self.f_p_value, 2),
            num(self.aic, 1),
            num(self.bic, 1)
        );
        let dw = self.durbin_watson.map_or_else(|| "undefined".to_string(), |d| num(d, 3));
        let _ = writeln!(
            out,
            "Durbin-Watson = {dw}, No. Observations = {}, Df Residuals = {}{}",
            self.n_obs,
            self.df_resid,
            if self.exact_fit { ", exact fit (zero residuals)" } else { "" }
        );
        out
    }
}

fn check_inputs(columns: &[&[f64]], y: &[f64]) -> Result<(), StatsError> {
    for c in columns {
        if c.len() != y.len() {
            return Err(StatsError::LengthMismatch { x: c.len(), y: y.len() });
        }
    }
    if columns.iter().copied().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

struct Fit {
    estimates: Vec<f64>,
    /// Diagonal of (X'X)^-1.
    inv_diag: Vec<f64>,
    residuals: Vec<f64>,
}

/// Builds every report field from a fitted coefficient vector.
fn assemble(names: Vec<String>, fit: Fit, y: &[f64]) -> RegressionReport {
    let n = y.len();
    let k = fit.estimates.len();
    let df_resid = n - k;
    let df_model = k - 1;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
    let exact_fit = ssr <= f64::EPSILON * f64::EPSILON * sst;
    let ssr = if exact_fit { 0.0 } else { ssr };

    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_resid as f64;
    let sigma2 = ssr / df_resid as f64;
    let t_crit = t_quantile(0.975, df_resid as f64);

    let coefficients = names
        .into_iter()
        .zip(fit.estimates.iter().zip(&fit.inv_diag))
        .map(|(name, (&estimate, &inv))| {
            let std_error = (sigma2 * inv).max(0.0).sqrt();
            let t_value = if std_error > 0.0 {
                estimate / std_error
            } else if estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(estimate)
            };
            let p_value = t_two_sided_p(t_value, df_resid as f64);
            let half = t_crit * std_error;
            Coefficient { name, estimate, std_error, t_value, p_value, ci_low: estimate - half, ci_high: estimate + half }
        })
        .collect();

    let ess = (sst - ssr).max(0.0);
    let f_statistic = if df_model == 0 {
        f64::NAN
    } else if ssr > 0.0 {
        (ess / df_model as f64) / sigma2
    } else if ess > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let f_p_value = if df_model == 0 { f64::NAN } else { f_sf(f_statistic, df_model as f64, df_resid as f64) };

    let nf = n as f64;
    let log_likelihood =
        if ssr > 0.0 { -0.5 * nf * ((2.0 * PI).ln() + (ssr / nf).ln() + 1.0) } else { f64::INFINITY };
    let kf = k as f64;
    let aic = -2.0 * log_likelihood + 2.0 * kf;
    let bic = -2.0 * log_likelihood + kf * nf.ln();
    let durbin_watson = if exact_fit { None } else { durbin_watson(&fit.residuals).ok() };

    RegressionReport {
        dependent: "y".into(),
        coefficients,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_p_value,
        log_likelihood,
        aic,
        bic,
        durbin_watson,
        n_obs: n,
        df_model,
        df_resid,
        exact_fit,
    }
}

/// Simple linear regression of `y` on `x` with an intercept.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionReport, StatsError> {
    check_inputs(&[x], y)?;
    let n = y.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { n, needed: 3 });
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mean_x) * (v - mean_x)).sum();
    if sxx == 0.0 || x.iter().all(|&v| v == x[0]) {
        return Err(StatsError::ConstantRegressor);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let fit = Fit {
        estimates: vec![intercept, slope],
        inv_diag: vec![1.0 / nf + mean_x * mean_x / sxx, 1.0 / sxx],
        residuals,
    };
    Ok(assemble(vec!["Constant".into(), "x".into()], fit, y))
}

/// Solves `a * out = b` in place by Gaussian elimination with partial
/// pivoting. Returns `None` for a numerically singular system.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            for c in 0..b[row].len() {
                b[row][c] -= factor * b[col][c];
            }
        }
    }
    for col in (0..k).rev() {
        for c in 0..b[col].len() {
            let mut acc = b[col][c];
            for j in col + 1..k {
                acc -= a[col][j] * b[j][c];
            }
            b[col][c] = acc / a[col][col];
        }
    }
    Some(b)
}

/// Multiple regression with an intercept via the normal equations.
/// `regressors` holds one column per explanatory variable.
pub fn ols_multi(regressors: &[Vec<f64>], y: &[f64], names: &[&str]) -> Result<RegressionReport, StatsError> {
    let cols: Vec<&[f64]> = regressors.iter().map(Vec::as_slice).collect();
    check_inputs(&cols, y)?;
    let n = y.len();
    let k = regressors.len() + 1;
    if n < k + 1 {
        return Err(StatsError::TooFewObservations { n, needed: k + 1 });
    }
    let design: Vec<Vec<f64>> =
        (0..n).map(|i| std::iter::once(1.0).chain(regressors.iter().map(|c| c[i])).collect()).collect();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![vec![0.0]; k];
    for (row, &yi) in design.iter().zip(y) {
        for a in 0..k {
            xty[a][0] += row[a] * yi;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let identity: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let beta = solve(xtx.clone(), xty).ok_or(StatsError::Singular)?;
    let inverse = solve(xtx, identity).ok_or(StatsError::Singular)?;
    let estimates: Vec<f64> = beta.iter().map(|r| r[0]).collect();
    let residuals = design
        .iter()
        .zip(y)
        .map(|(row, yi)| yi - row.iter().zip(&estimates).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let mut all_names = vec!["Constant".to_string()];
    all_names.extend((0..regressors.len()).map(|i| names.get(i).map_or_else(|| format!("x{}", i + 1), |s| s.to_string())));
    let fit = Fit { estimates, inv_diag: (0..k).map(|i| inverse[i][i]).collect(), residuals };
    Ok(assemble(all_names, fit, y))
}
