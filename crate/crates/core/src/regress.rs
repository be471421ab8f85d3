//! Ordinary least squares: simple regression with inference, multiple
//! regression via Householder QR, and backward stepwise elimination.
//!
//! The QR path is the production solver; tests check it against a brute-force
//! normal-equations oracle. t- and F-distribution tail probabilities come from
//! `statrs`, which evaluates them through the regularized incomplete beta
//! function; reference values are pinned to 1e-10 in the test suite.

use crate::features::{FeatureColumn, FeatureSet, FeatureTable, TableError};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("insufficient data: {got} usable rows, need at least {need}")]
    InsufficientData { got: usize, need: usize },
    #[error("degenerate input: predictor `{0}` has zero variance")]
    DegenerateInput(String),
    #[error("design matrix is rank deficient at column `{0}` (collinear predictors)")]
    RankDeficient(String),
    #[error("column lengths differ: `{0}` has {1} rows, expected {2}")]
    LengthMismatch(String, usize, usize),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Simple linear fit `y = alpha + beta * x` with inference on the slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    /// Two-sided t-test on the slope, df = n - 2.
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub value: f64,
    pub std_err: f64,
    pub t_value: f64,
    pub p_value: f64,
}

/// Multiple linear fit with the four evaluation statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiFit {
    pub intercept: Coefficient,
    pub terms: Vec<Coefficient>,
    pub multiple_r_squared: f64,
    pub adjusted_r_squared: f64,
    /// Residual standard error, df = n - p - 1.
    pub rse: f64,
    /// Absent for the intercept-only model.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EliminationStep {
    pub name: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepwiseFit {
    pub fit: MultiFit,
    pub eliminated: Vec<EliminationStep>,
}

fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.cdf(-t.abs())).min(1.0)
}

fn f_upper_tail(f: f64, df1: f64, df2: f64) -> f64 {
    if f.is_infinite() {
        return 0.0;
    }
    let dist = FisherSnedecor::new(df1, df2).expect("valid dof");
    dist.sf(f).clamp(0.0, 1.0)
}

/// Drops pairs where either side is missing.
pub fn complete_pairs(x: &[Option<f64>], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip()
}

/// Closed-form simple least squares with a two-sided slope test.
pub fn simple_ols(x: &[f64], y: &[f64]) -> Result<SimpleFit, RegressError> {
    let n = x.len();
    if y.len() != n {
        return Err(RegressError::LengthMismatch("y".into(), y.len(), n));
    }
    if n < 3 {
        return Err(RegressError::InsufficientData { got: n, need: 3 });
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        let dy = yi - y_mean;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(RegressError::DegenerateInput("x".into()));
    }
    let beta = sxy / sxx;
    let alpha = y_mean - beta * x_mean;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 0.0 };
    let df = nf - 2.0;
    let sse = (syy - beta * sxy).max(0.0);
    let se = (sse / df / sxx).sqrt();
    let p_value = if se == 0.0 {
        if beta == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        t_two_sided(beta / se, df)
    };
    Ok(SimpleFit { alpha, beta, r_squared, p_value, n })
}

/// Householder QR factorization state for least squares.
struct QrFit {
    beta: Vec<f64>,
    ssr: f64,
    /// Diagonal of (XᵀX)⁻¹, for coefficient standard errors.
    xtx_inv_diag: Vec<f64>,
}

/// Solves min ‖A·beta − y‖ for a column-major `n × k` design, in place.
fn qr_least_squares(
    a: &mut [f64],
    n: usize,
    k: usize,
    y: &mut [f64],
    column_name: impl Fn(usize) -> String,
) -> Result<QrFit, RegressError> {
    debug_assert_eq!(a.len(), n * k);
    let col = |j: usize| j * n;
    let original_norms: Vec<f64> = (0..k)
        .map(|j| (0..n).map(|i| a[col(j) + i].powi(2)).sum::<f64>().sqrt())
        .collect();
    let mut rdiag = vec![0.0f64; k];

    for j in 0..k {
        let cj = col(j);
        let mut norm2 = 0.0;
        for i in j..n {
            norm2 += a[cj + i] * a[cj + i];
        }
        let norm = norm2.sqrt();
        if norm <= original_norms[j] * 1e-10 || norm == 0.0 {
            return Err(RegressError::RankDeficient(column_name(j)));
        }
        let alpha = if a[cj + j] >= 0.0 { -norm } else { norm };
        a[cj + j] -= alpha;
        rdiag[j] = alpha;
        let vtv: f64 = (j..n).map(|i| a[cj + i] * a[cj + i]).sum();
        if vtv > 0.0 {
            for l in j + 1..k {
                let cl = col(l);
                let dot: f64 = (j..n).map(|i| a[cj + i] * a[cl + i]).sum();
                let scale = 2.0 * dot / vtv;
                for i in j..n {
                    a[cl + i] -= scale * a[cj + i];
                }
            }
            let dot: f64 = (j..n).map(|i| a[cj + i] * y[i]).sum();
            let scale = 2.0 * dot / vtv;
            for i in j..n {
                y[i] -= scale * a[cj + i];
            }
        }
    }

    // R sits in the strict upper triangle of `a` plus `rdiag`; back-substitute.
    let r = |row: usize, c: usize| -> f64 {
        if row == c {
            rdiag[row]
        } else {
            a[col(c) + row]
        }
    };
    let mut beta = vec![0.0f64; k];
    for j in (0..k).rev() {
        let mut acc = y[j];
        for l in j + 1..k {
            acc -= r(j, l) * beta[l];
        }
        beta[j] = acc / rdiag[j];
    }
    let ssr: f64 = y[k..n].iter().map(|v| v * v).sum();

    // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ; diagonal entries are squared row norms of R⁻¹.
    let mut rinv = vec![0.0f64; k * k]; // column-major k×k upper triangular
    for m in 0..k {
        rinv[m * k + m] = 1.0 / rdiag[m];
        for j in (0..m).rev() {
            let mut acc = 0.0;
            for l in j + 1..=m {
                acc += r(j, l) * rinv[m * k + l];
            }
            rinv[m * k + j] = -acc / rdiag[j];
        }
    }
    let xtx_inv_diag = (0..k)
        .map(|i| (i..k).map(|m| rinv[m * k + i].powi(2)).sum())
        .collect();

    Ok(QrFit { beta, ssr, xtx_inv_diag })
}

/// Multiple least squares of `y` on the named predictor columns (an intercept
/// is added internally). Requires complete-case input and a full-rank design.
pub fn multiple_ols(
    names: &[String],
    columns: &[Vec<f64>],
    y: &[f64],
) -> Result<MultiFit, RegressError> {
    let p = columns.len();
    assert_eq!(names.len(), p, "one name per predictor column");
    let n = y.len();
    for (name, c) in names.iter().zip(columns) {
        if c.len() != n {
            return Err(RegressError::LengthMismatch(name.clone(), c.len(), n));
        }
    }
    if n < p + 2 {
        return Err(RegressError::InsufficientData { got: n, need: p + 2 });
    }
    let k = p + 1;
    let mut a = vec![0.0f64; n * k];
    a[..n].fill(1.0);
    for (j, c) in columns.iter().enumerate() {
        a[(j + 1) * n..(j + 2) * n].copy_from_slice(c);
    }
    let mut yy = y.to_vec();
    let name_of = |j: usize| {
        if j == 0 {
            "(intercept)".to_string()
        } else {
            names[j - 1].clone()
        }
    };
    let qr = qr_least_squares(&mut a, n, k, &mut yy, name_of)?;

    let nf = n as f64;
    let df = nf - k as f64;
    let y_mean = y.iter().sum::<f64>() / nf;
    let sst: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let ssr = qr.ssr;
    let multiple_r_squared = if sst > 0.0 { (1.0 - ssr / sst).max(0.0) } else { 0.0 };
    let adjusted_r_squared = 1.0 - (1.0 - multiple_r_squared) * (nf - 1.0) / df;
    let rse = (ssr / df).sqrt();

    let coef = |j: usize| -> Coefficient {
        let value = qr.beta[j];
        let std_err = rse * qr.xtx_inv_diag[j].sqrt();
        let t_value = if std_err == 0.0 {
            if value == 0.0 {
                f64::NAN
            } else {
                f64::INFINITY * value.signum()
            }
        } else {
            value / std_err
        };
        Coefficient { name: name_of(j), value, std_err, t_value, p_value: t_two_sided(t_value, df) }
    };
    let intercept = coef(0);
    let terms: Vec<Coefficient> = (1..k).map(coef).collect();

    let (f_statistic, f_p_value) = if p > 0 && sst > 0.0 {
        let f = if multiple_r_squared >= 1.0 {
            f64::INFINITY
        } else {
            (multiple_r_squared / p as f64) / ((1.0 - multiple_r_squared) / df)
        };
        (Some(f), Some(f_upper_tail(f, p as f64, df)))
    } else {
        (None, None)
    };

    Ok(MultiFit {
        intercept,
        terms,
        multiple_r_squared,
        adjusted_r_squared,
        rse,
        f_statistic,
        f_p_value,
        n,
    })
}

/// Backward stepwise elimination: refit, drop the predictor with the largest
/// coefficient p-value while it exceeds `alpha_out` (ties break toward the
/// earliest column), and return the final fit with the elimination trace.
pub fn backward_stepwise(
    names: &[String],
    columns: &[Vec<f64>],
    y: &[f64],
    alpha_out: f64,
) -> Result<StepwiseFit, RegressError> {
    let mut active: Vec<usize> = (0..columns.len()).collect();
    let mut eliminated = Vec::new();
    loop {
        let cur_names: Vec<String> = active.iter().map(|&i| names[i].clone()).collect();
        let cur_cols: Vec<Vec<f64>> = active.iter().map(|&i| columns[i].clone()).collect();
        let fit = multiple_ols(&cur_names, &cur_cols, y)?;
        if fit.terms.is_empty() {
            return Ok(StepwiseFit { fit, eliminated });
        }
        let mut worst: usize = 0;
        for (i, term) in fit.terms.iter().enumerate() {
            if term.p_value > fit.terms[worst].p_value {
                worst = i;
            }
        }
        let worst_p = fit.terms[worst].p_value;
        if worst_p.is_nan() || worst_p <= alpha_out {
            return Ok(StepwiseFit { fit, eliminated });
        }
        eliminated.push(EliminationStep { name: fit.terms[worst].name.clone(), p_value: worst_p });
        active.remove(worst);
    }
}

// ---------------------------------------------------------------------------
// Feature-table wiring
// ---------------------------------------------------------------------------

/// Regresses age of death on one feature, dropping rows where either value is
/// missing.
pub fn simple_feature_regression(
    table: &FeatureTable,
    x: FeatureColumn,
) -> Result<SimpleFit, RegressError> {
    let xs = table.numeric_column(x)?;
    let ys = table.numeric_column(FeatureColumn::AgeOfDeath)?;
    let (xv, yv) = complete_pairs(&xs, &ys);
    simple_ols(&xv, &yv)
}

/// Numeric predictor columns of a set, excluding the response.
pub fn predictor_columns(set: FeatureSet) -> Vec<FeatureColumn> {
    set.columns()
        .iter()
        .copied()
        .filter(|c| c.is_numeric() && *c != FeatureColumn::AgeOfDeath && *c != FeatureColumn::DeathYear)
        .collect()
}

/// Builds a complete-case design (predictor names, columns, response) from a
/// table; rows missing the response or any predictor are dropped.
pub fn feature_design(
    table: &FeatureTable,
    predictors: &[FeatureColumn],
) -> Result<(Vec<String>, Vec<Vec<f64>>, Vec<f64>), RegressError> {
    let y_all = table.numeric_column(FeatureColumn::AgeOfDeath)?;
    let cols_all: Vec<Vec<Option<f64>>> = predictors
        .iter()
        .map(|c| table.numeric_column(*c))
        .collect::<Result<_, _>>()?;
    let keep: Vec<usize> = (0..y_all.len())
        .filter(|&i| y_all[i].is_some() && cols_all.iter().all(|c| c[i].is_some()))
        .collect();
    let y = keep.iter().map(|&i| y_all[i].unwrap()).collect();
    let columns = cols_all
        .iter()
        .map(|c| keep.iter().map(|&i| c[i].unwrap()).collect())
        .collect();
    let names = predictors.iter().map(|c| c.name().to_string()).collect();
    Ok((names, columns, y))
}

/// Backward stepwise regression of age of death on a feature set's predictors.
pub fn stepwise_feature_regression(
    table: &FeatureTable,
    set: FeatureSet,
    alpha_out: f64,
) -> Result<StepwiseFit, RegressError> {
    let projected = table.project(set)?;
    let (names, columns, y) = feature_design(&projected, &predictor_columns(set))?;
    backward_stepwise(&names, &columns, &y, alpha_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_line() {
        let fit = simple_ols(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((fit.beta - 2.0).abs() < 1e-12);
        assert!(fit.alpha.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.p_value < 1e-9);
    }

    #[test]
    fn zero_covariance_gives_zero_slope_and_r2() {
        let fit = simple_ols(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(fit.beta, 0.0);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn simple_fit_matches_reference_solver() {
        // Frozen from an independent statistics package.
        let x = [1.0, 2.0, 4.0, 5.5, 7.0, 8.0];
        let y = [2.1, 2.9, 6.2, 7.4, 10.1, 10.9];
        let fit = simple_ols(&x, &y).unwrap();
        assert!((fit.beta - 1.3033805888767722).abs() < 1e-12);
        assert!((fit.alpha - 0.6261723009814615).abs() < 1e-12);
        assert!((fit.r_squared - 0.9912699041854498).abs() < 1e-12);
        assert!((fit.p_value - 2.8664045728488052e-5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_short_inputs_error() {
        assert!(matches!(
            simple_ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(RegressError::DegenerateInput(_))
        ));
        assert!(matches!(
            simple_ols(&[1.0, 2.0], &[1.0, 2.0]),
            Err(RegressError::InsufficientData { .. })
        ));
    }

    #[test]
    fn exact_multiple_fit() {
        let x1 = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x1.iter().map(|v| 3.0 + 2.0 * v).collect();
        let fit = multiple_ols(&names(&["x1"]), &[x1], &y).unwrap();
        assert!((fit.intercept.value - 3.0).abs() < 1e-10);
        assert!((fit.terms[0].value - 2.0).abs() < 1e-10);
        assert!((fit.multiple_r_squared - 1.0).abs() < 1e-12);
        assert!(fit.rse < 1e-10);
    }

    #[test]
    fn multiple_fit_matches_reference_solver() {
        // Frozen from an independent statistics package.
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x2 = vec![2.0, 1.0, 4.0, 3.0, 7.0];
        let y = vec![3.1, 4.2, 8.9, 10.1, 16.0];
        let fit = multiple_ols(&names(&["x1", "x2"]), &[x1, x2], &y).unwrap();
        assert!((fit.intercept.value - -0.8605882352941174).abs() < 1e-9);
        assert!((fit.terms[0].value - 2.0335294117646994).abs() < 1e-9);
        assert!((fit.terms[1].value - 0.9470588235294182).abs() < 1e-9);
        assert!((fit.intercept.std_err - 0.11505677852146227).abs() < 1e-9);
        assert!((fit.terms[0].std_err - 0.0610901540382337).abs() < 1e-9);
        assert!((fit.terms[1].std_err - 0.04195689005202044).abs() < 1e-9);
        assert!((fit.intercept.p_value - 0.01740908646239692).abs() < 1e-9);
        assert!((fit.terms[0].p_value - 0.0009012682904362).abs() < 1e-9);
        assert!((fit.terms[1].p_value - 0.00195693492376784).abs() < 1e-9);
        assert!((fit.multiple_r_squared - 0.9997754363817338).abs() < 1e-12);
        assert!((fit.adjusted_r_squared - 0.9995508727634677).abs() < 1e-12);
        assert!((fit.f_p_value.unwrap() - 0.0002245636182661224).abs() < 1e-12);
        assert!((fit.rse - 0.10941018341678219).abs() < 1e-12);
    }

    #[test]
    fn adjusted_r_squared_formula() {
        // R²=0.5, n=100, p=4 -> adjusted = 1 - 0.5*99/95.
        let r2: f64 = 0.5;
        let adj = 1.0 - (1.0 - r2) * 99.0 / 95.0;
        assert!((adj - 0.47894736842105257).abs() < 1e-12);
        // The solver reproduces the same relation on real data.
        let n = 100;
        let mut rng_state = 42u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| next()).collect()).collect();
        let y: Vec<f64> = (0..n).map(|i| cols[0][i] + 0.5 * next()).collect();
        let fit = multiple_ols(&names(&["a", "b", "c", "d"]), &cols, &y).unwrap();
        let expect = 1.0 - (1.0 - fit.multiple_r_squared) * (n as f64 - 1.0) / (n as f64 - 5.0);
        assert!((fit.adjusted_r_squared - expect).abs() < 1e-12);
        assert!(fit.adjusted_r_squared <= fit.multiple_r_squared);
    }

    #[test]
    fn collinear_columns_are_named() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y = vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        match multiple_ols(&names(&["a", "b"]), &[x1, x2], &y) {
            Err(RegressError::RankDeficient(col)) => assert_eq!(col, "b"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn stepwise_keeps_significant_predictors() {
        let n = 200;
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let x1: Vec<f64> = (0..n).map(|_| next()).collect();
        let x2: Vec<f64> = (0..n).map(|_| next()).collect();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 3.0 * x1[i] - 2.0 * x2[i] + 0.01 * next()).collect();
        let out = backward_stepwise(&names(&["x1", "x2"]), &[x1, x2], &y, 0.05).unwrap();
        assert!(out.eliminated.is_empty());
        assert_eq!(out.fit.terms.len(), 2);
        // Every retained predictor clears the threshold.
        assert!(out.fit.terms.iter().all(|t| t.p_value <= 0.05));
    }

    #[test]
    fn vacuous_threshold_removes_nothing() {
        let x1 = vec![0.1, 0.9, 0.4, 0.6, 0.3, 0.8, 0.2];
        let x2 = vec![0.5, 0.1, 0.9, 0.2, 0.8, 0.4, 0.7];
        let y = vec![1.0, 2.0, 1.5, 1.7, 1.2, 1.9, 1.1];
        let out = backward_stepwise(&names(&["x1", "x2"]), &[x1, x2], &y, 1.0).unwrap();
        assert!(out.eliminated.is_empty());
        assert_eq!(out.fit.terms.len(), 2);
    }

    #[test]
    fn distribution_tails_match_reference_values() {
        // Frozen from an independent statistics package, 1e-10 target.
        let t_cases = [
            (1.0, 0.5, 0.6475836176504333),
            (2.0, -1.0, 0.21132486540518713),
            (5.0, 2.0, 0.9490302605850709),
            (10.0, -2.5, 0.015723422118304388),
            (58.0, 1.3, 0.9006281636515238),
            (158.0, -0.0791, 0.4685265880340611),
            (998.0, 3.2, 0.9992911871098951),
            (3.0, 0.0, 0.5),
        ];
        for (df, x, expect) in t_cases {
            let got = StudentsT::new(0.0, 1.0, df).unwrap().cdf(x);
            assert!((got - expect).abs() < 1e-10, "t cdf df={df} x={x}: {got} vs {expect}");
        }
        let f_cases = [
            (1.0, 1.0, 1.0, 0.5000000000000001),
            (3.0, 10.0, 2.5, 0.8809604373417218),
            (2.0, 5.0, 0.1, 0.09339804392481496),
            (4.0, 95.0, 1.0, 0.5884125195979508),
        ];
        for (d1, d2, x, expect) in f_cases {
            let got = FisherSnedecor::new(d1, d2).unwrap().cdf(x);
            assert!((got - expect).abs() < 1e-10, "f cdf {d1},{d2} x={x}: {got} vs {expect}");
        }
    }
}
