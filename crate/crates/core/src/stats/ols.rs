use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use super::StatsError;

/// LMG enumerates all 2^k predictor subsets; above this it is skipped.
pub const LMG_MAX_PREDICTORS: usize = 15;

#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
    /// LMG share of R² (absolute, not percent). `None` for the intercept or
    /// when the model is too large to decompose.
    pub relative_importance: Option<f64>,
}

impl Coefficient {
    /// Relative importance as a percentage of the model R².
    pub fn importance_percent(&self, r_squared: f64) -> Option<f64> {
        self.relative_importance
            .filter(|_| r_squared > 0.0)
            .map(|share| 100.0 * share / r_squared)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionSummary {
    pub intercept: Coefficient,
    pub predictors: Vec<Coefficient>,
    pub n: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Residual standard error.
    pub rse: f64,
    /// `None` for the intercept-only model.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub df_model: usize,
    pub df_resid: usize,
    pub residuals: Vec<f64>,
}

fn two_sided_p(t: f64, df: usize) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Ordinary least squares with an intercept.
///
/// `x` holds one column per predictor (no intercept column). Relative
/// importance is the LMG decomposition of R² when `x` has at most
/// [`LMG_MAX_PREDICTORS`] columns.
pub fn ols_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
) -> Result<RegressionSummary, StatsError> {
    let n = x.nrows();
    let k = x.ncols();
    assert_eq!(names.len(), k, "one name per predictor column");
    if y.len() != n {
        return Err(StatsError::LengthMismatch(n, y.len()));
    }
    if n <= k + 1 {
        return Err(StatsError::TooFewObservations {
            have: n,
            need: k + 2,
        });
    }
    super::ensure_varies(y.as_slice())?;

    let design = DMatrix::from_fn(n, k + 1, |r, c| if c == 0 { 1.0 } else { x[(r, c - 1)] });
    let col_norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();

    let qr = design.clone().qr();
    let r = qr.r();
    for j in 0..=k {
        if r[(j, j)].abs() <= 1e-10 * col_norms[j].max(f64::MIN_POSITIVE) {
            let name = if j == 0 { "(Intercept)" } else { &names[j - 1] };
            return Err(StatsError::RankDeficient(name.to_owned()));
        }
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::RankDeficient("design".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k + 1, k + 1))
        .ok_or_else(|| StatsError::RankDeficient("design".into()))?;
    // (X'X)^-1 = R^-1 R^-T
    let xtx_inv = &r_inv * r_inv.transpose();

    let fitted = &design * &beta;
    let residuals: DVector<f64> = y - fitted;
    let rss = residuals.norm_squared();
    let mean_y = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();

    let df_resid = n - k - 1;
    let sigma2 = rss / df_resid as f64;
    let r_squared = 1.0 - rss / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_resid as f64;

    let (f_statistic, f_p_value) = if k > 0 {
        let f = ((tss - rss) / k as f64) / sigma2;
        let p = FisherSnedecor::new(k as f64, df_resid as f64)
            .map(|d| if f.is_finite() { d.sf(f) } else { 0.0 })
            .unwrap_or(f64::NAN);
        (Some(f), Some(p))
    } else {
        (None, None)
    };

    let shares = if (1..=LMG_MAX_PREDICTORS).contains(&k) {
        Some(lmg(x, y)?)
    } else {
        None
    };

    let coef = |j: usize, name: &str| {
        let se = (sigma2 * xtx_inv[(j, j)]).sqrt();
        let t = beta[j] / se;
        Coefficient {
            name: name.to_owned(),
            estimate: beta[j],
            std_error: se,
            t_value: t,
            p_value: two_sided_p(t, df_resid),
            relative_importance: match (&shares, j) {
                (Some(s), j) if j > 0 => Some(s[j - 1]),
                _ => None,
            },
        }
    };

    Ok(RegressionSummary {
        intercept: coef(0, "(Intercept)"),
        predictors: names
            .iter()
            .enumerate()
            .map(|(i, name)| coef(i + 1, name))
            .collect(),
        n,
        r_squared,
        adj_r_squared,
        rse: sigma2.sqrt(),
        f_statistic,
        f_p_value,
        df_model: k,
        df_resid,
        residuals: residuals.iter().copied().collect(),
    })
}

/// Centered cross-product matrix of `[x | y]`.
pub(crate) fn centered_gram(x: &DMatrix<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let k = x.ncols();
    let mut z = DMatrix::zeros(n, k + 1);
    for c in 0..k {
        let col = x.column(c);
        let m = col.mean();
        for r in 0..n {
            z[(r, c)] = col[r] - m;
        }
    }
    let my = y.mean();
    for r in 0..n {
        z[(r, k)] = y[r] - my;
    }
    z.transpose() * z
}

/// R² of the submodel using the predictors in `mask`, from the centered
/// cross-product matrix.
fn subset_r_squared(gram: &DMatrix<f64>, mask: usize) -> f64 {
    let k = gram.nrows() - 1;
    let idx: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 1).collect();
    let tss = gram[(k, k)];
    if idx.is_empty() {
        return 0.0;
    }
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| gram[(idx[r], idx[c])]);
    let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&j| gram[(j, k)]));
    let explained = match sub.clone().cholesky() {
        Some(ch) => rhs.dot(&ch.solve(&rhs)),
        None => {
            let coef = sub
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .expect("SVD with both factors");
            rhs.dot(&coef)
        }
    };
    explained / tss
}

/// LMG relative importance: each predictor's R² increment averaged over all
/// orderings in which predictors can enter the model. The shares sum to the
/// full-model R².
pub fn lmg(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Vec<f64>, StatsError> {
    let k = x.ncols();
    if k > LMG_MAX_PREDICTORS {
        return Err(StatsError::InvalidMatrix(format!(
            "LMG limited to {LMG_MAX_PREDICTORS} predictors, got {k}"
        )));
    }
    super::ensure_varies(y.as_slice())?;
    let gram = centered_gram(x, y);
    let r2: Vec<f64> = (0..1usize << k)
        .map(|m| subset_r_squared(&gram, m))
        .collect();

    // weight for a subset of size s not containing j: s! (k-s-1)! / k!
    let fact: Vec<f64> = (0..=k)
        .scan(1.0, |acc, i| {
            if i > 0 {
                *acc *= i as f64;
            }
            Some(*acc)
        })
        .collect();
    let weight: Vec<f64> = (0..k)
        .map(|s| fact[s] * fact[k - s - 1] / fact[k])
        .collect();

    let shares = (0..k)
        .map(|j| {
            let bit = 1usize << j;
            (0..1usize << k)
                .filter(|m| m & bit == 0)
                .map(|m| weight[m.count_ones() as usize] * (r2[m | bit] - r2[m]))
                .sum()
        })
        .collect();
    Ok(shares)
}
