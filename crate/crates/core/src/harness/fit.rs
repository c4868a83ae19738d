//! Least-squares fits of mean round counts to `a * f(n) + b`.

use serde::{Deserialize, Serialize};

use super::{HarnessError, RunRow};

/// The regressor `f(n)`; logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FitModel {
    LogN,
    /// `log n * log(n + W)`.
    LogNLogNW {
        w: u64,
    },
    KappaPlusLogN {
        kappa: u32,
    },
    KappaLogN {
        kappa: u32,
    },
}

impl FitModel {
    pub fn regressor(self, n: f64) -> f64 {
        let log = n.log2();
        match self {
            FitModel::LogN => log,
            FitModel::LogNLogNW { w } => log * (n + w as f64).log2(),
            FitModel::KappaPlusLogN { kappa } => kappa as f64 + log,
            FitModel::KappaLogN { kappa } => kappa as f64 * log,
        }
    }

    pub fn parse(name: &str, w: u64, kappa: u32) -> Option<Self> {
        Some(match name {
            "log" | "log-n" => FitModel::LogN,
            "loglog" | "log-n-log-nw" => FitModel::LogNLogNW { w },
            "kappa-plus-log" => FitModel::KappaPlusLogN { kappa },
            "kappa-log" => FitModel::KappaLogN { kappa },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: FitModel,
    pub a: f64,
    pub b: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
    /// `residual` over the mean of the fitted values.
    pub relative_residual: f64,
    /// `(n, mean rounds)` per distinct `n`.
    pub points: Vec<(usize, f64)>,
}

/// Fits `y = a * f(n) + b` through the given `(n, y)` points.
pub fn fit_points(points: &[(usize, f64)], model: FitModel) -> Result<Fit, HarnessError> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(HarnessError::FitDomain(ns.len()));
    }
    let xs: Vec<f64> = points
        .iter()
        .map(|&(n, _)| model.regressor(n as f64))
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let sq: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - a * x - b).powi(2))
        .sum();
    let residual = (sq / len).sqrt();
    Ok(Fit {
        model,
        a,
        b,
        residual,
        relative_residual: if my.abs() > 0.0 {
            residual / my.abs()
        } else {
            residual
        },
        points: points.to_vec(),
    })
}

/// Mean rounds per distinct `n` over completed rows.
pub fn mean_rounds(rows: &[RunRow]) -> Vec<(usize, f64)> {
    let mut acc: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in rows.iter().filter(|r| r.status == "completed") {
        let e = acc.entry(r.n).or_default();
        e.0 += r.rounds as f64;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(n, (s, c))| (n, s / c as f64))
        .collect()
}

/// Fits the mean round counts of `rows`, one point per distinct `n`.
pub fn fit_rounds(rows: &[RunRow], model: FitModel) -> Result<Fit, HarnessError> {
    fit_points(&mean_rounds(rows), model)
}
