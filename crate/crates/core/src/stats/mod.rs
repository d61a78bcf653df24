//! Relating per-text indices to proficiency scores.
//!
//! The pipeline runs in four steps, each usable on its own:
//!
//! 1. [`bivariate_filter`]: keep features with `|r| >= threshold` against
//!    the score, then keep only the strongest member of each association
//!    family (the four `ascAv*` means form one family, each construction's
//!    four `TAG_Av*` means form another);
//! 2. [`vif_prune`]: drop the most collinear feature until every variance
//!    inflation factor is below the limit;
//! 3. [`aic_select`]: best-subset search by AIC, returning every model
//!    within ΔAIC of the minimum;
//! 4. [`ols_fit`]: least-squares fit of the best model with LMG relative
//!    importance.

mod ols;
mod pipeline;
mod selection;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::tagger::AscType;

pub use ols::{lmg, ols_fit, Coefficient, RegressionSummary, LMG_MAX_PREDICTORS};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineReport};
pub use selection::{
    aic, aic_select, vif, vif_prune, AicSelection, ModelCandidate, SelectionMethod, VifPruning,
    EXHAUSTIVE_LIMIT,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("constant vector: correlation is undefined")]
    ConstantVector,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("too few observations: {have} (need at least {need})")]
    TooFewObservations { have: usize, need: usize },

    #[error("rank-deficient design: {0} is collinear with earlier columns")]
    RankDeficient(String),

    #[error("invalid feature matrix: {0}")]
    InvalidMatrix(String),
}

/// Per-text feature values (possibly missing) plus the score to predict.
#[derive(Clone, Debug)]
pub struct FeatureMatrix {
    names: Vec<String>,
    ids: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
    target: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(
        names: Vec<String>,
        ids: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
        target: Vec<f64>,
    ) -> Result<Self, StatsError> {
        if rows.len() != target.len() || ids.len() != rows.len() {
            return Err(StatsError::InvalidMatrix(format!(
                "{} ids, {} rows, {} targets",
                ids.len(),
                rows.len(),
                target.len()
            )));
        }
        if let Some((i, r)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != names.len())
        {
            return Err(StatsError::InvalidMatrix(format!(
                "row {i} has {} values for {} columns",
                r.len(),
                names.len()
            )));
        }
        if target.iter().any(|y| !y.is_finite()) {
            return Err(StatsError::InvalidMatrix("non-finite target value".into()));
        }
        Ok(FeatureMatrix {
            names,
            ids,
            rows,
            target,
        })
    }

    /// Builds a matrix with no missing values from columns.
    pub fn from_columns(
        columns: Vec<(String, Vec<f64>)>,
        target: Vec<f64>,
    ) -> Result<Self, StatsError> {
        let n = target.len();
        let names = columns.iter().map(|(n, _)| n.clone()).collect();
        let mut rows = vec![Vec::with_capacity(columns.len()); n];
        for (name, col) in &columns {
            if col.len() != n {
                return Err(StatsError::InvalidMatrix(format!(
                    "column {name} has wrong length"
                )));
            }
            for (row, v) in rows.iter_mut().zip(col) {
                row.push(Some(*v));
            }
        }
        let ids = (0..n).map(|i| i.to_string()).collect();
        FeatureMatrix::new(names, ids, rows, target)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Pairs of (feature, target) over rows where the feature is present.
    pub fn pairwise(&self, col: usize) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .zip(&self.target)
            .filter_map(|(r, &y)| r[col].filter(|v| v.is_finite()).map(|v| (v, y)))
            .unzip()
    }

    /// Design matrix over `cols` using only rows where all of them are
    /// present. Returns the matrix, the matching targets and the number of
    /// dropped rows.
    pub fn complete_cases(&self, cols: &[usize]) -> (DMatrix<f64>, DVector<f64>, usize) {
        let keep: Vec<usize> = (0..self.rows.len())
            .filter(|&i| {
                cols.iter()
                    .all(|&c| self.rows[i][c].is_some_and(f64::is_finite))
            })
            .collect();
        let x = DMatrix::from_fn(keep.len(), cols.len(), |r, c| {
            self.rows[keep[r]][cols[c]].expect("complete row")
        });
        let y = DVector::from_iterator(keep.len(), keep.iter().map(|&i| self.target[i]));
        (x, y, self.rows.len() - keep.len())
    }
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { have: n, need: 3 });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Fails with [`StatsError::ConstantVector`] if every value is equal.
pub fn ensure_varies(v: &[f64]) -> Result<(), StatsError> {
    match v.first() {
        Some(first) if v.iter().any(|x| x != first) => Ok(()),
        _ => Err(StatsError::ConstantVector),
    }
}

const SOA_FAMILY_SUFFIXES: [&str; 4] = ["AvMI", "AvT", "AvDeltaPLemma", "AvDeltaPStructure"];

/// Association family of an index name: `"asc"` for the aggregate means,
/// the construction tag for per-type means, `None` for everything else.
pub fn soa_family(name: &str) -> Option<&str> {
    let prefix = SOA_FAMILY_SUFFIXES
        .iter()
        .find_map(|s| name.strip_suffix(s))?;
    if prefix == "asc" {
        return Some("asc");
    }
    let tag = prefix.strip_suffix('_')?;
    tag.parse::<AscType>().ok().map(|_| tag)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterStatus {
    Retained,
    BelowThreshold,
    /// Weaker than another member of its association family.
    Pruned {
        by: String,
    },
    /// Fewer than three observations or a constant column.
    Undefined,
    /// Present in too small a share of the rows.
    Sparse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    pub name: String,
    pub r: Option<f64>,
    pub n: usize,
    pub status: FilterStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BivariateResult {
    pub correlations: Vec<Correlation>,
}

impl BivariateResult {
    pub fn selected(&self) -> Vec<&str> {
        self.correlations
            .iter()
            .filter(|c| c.status == FilterStatus::Retained)
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Correlates every feature with the target (pairwise-complete rows), keeps
/// those with `|r| >= threshold` that are present in at least
/// `min_coverage` of the rows, then prunes each association family down to
/// its strongest member. Ties keep the earlier column.
pub fn bivariate_filter(
    features: &FeatureMatrix,
    threshold: f64,
    min_coverage: f64,
) -> BivariateResult {
    let rows = features.n_rows().max(1) as f64;
    let mut correlations: Vec<Correlation> = (0..features.names.len())
        .map(|col| {
            let (x, y) = features.pairwise(col);
            let r = pearson(&x, &y).ok();
            let status = match r {
                None => FilterStatus::Undefined,
                Some(_) if (x.len() as f64) < min_coverage * rows => FilterStatus::Sparse,
                Some(r) if r.abs() >= threshold => FilterStatus::Retained,
                Some(_) => FilterStatus::BelowThreshold,
            };
            Correlation {
                name: features.names[col].clone(),
                r,
                n: x.len(),
                status,
            }
        })
        .collect();

    let mut best: std::collections::BTreeMap<&str, (usize, f64)> = Default::default();
    for (i, c) in correlations.iter().enumerate() {
        if c.status != FilterStatus::Retained {
            continue;
        }
        if let Some(fam) = soa_family(&c.name) {
            let strength = c.r.unwrap().abs();
            let entry = best.entry(fam).or_insert((i, strength));
            if strength > entry.1 {
                *entry = (i, strength);
            }
        }
    }
    let winners: Vec<(usize, String)> = correlations
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let fam = soa_family(&c.name)?;
            let (w, _) = best.get(fam)?;
            (c.status == FilterStatus::Retained && *w != i)
                .then(|| (i, correlations[*w].name.clone()))
        })
        .collect();
    for (i, by) in winners {
        correlations[i].status = FilterStatus::Pruned { by };
    }

    BivariateResult { correlations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Raw-sum formula, independent of the centered two-pass route.
    fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn perfect_correlations() {
        let x = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_raw_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.random::<f64>()).collect();
        let got = pearson(&x, &y).unwrap();
        assert!((got - pearson_oracle(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn constant_vector_errors() {
        assert_eq!(
            pearson(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]),
            Err(StatsError::ConstantVector)
        );
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(ensure_varies(&[2.0, 2.0]).is_err());
        assert!(ensure_varies(&[2.0, 3.0]).is_ok());
    }

    #[test]
    fn families() {
        assert_eq!(soa_family("ascAvMI"), Some("asc"));
        assert_eq!(soa_family("TRAN_S_AvDeltaPStructure"), Some("TRAN_S"));
        assert_eq!(soa_family("INTRAN_RES_AvT"), Some("INTRAN_RES"));
        assert_eq!(soa_family("ascAvFreq"), None);
        assert_eq!(soa_family("TRAN_S_Prop"), None);
        assert_eq!(soa_family("FOO_AvMI"), None);
    }

    /// Feature column with a prescribed correlation against `y`.
    fn with_r(y: &[f64], noise: &[f64], r: f64) -> Vec<f64> {
        // orthogonalize noise against y, then mix
        let n = y.len() as f64;
        let my = y.iter().sum::<f64>() / n;
        let yc: Vec<f64> = y.iter().map(|v| v - my).collect();
        let mn = noise.iter().sum::<f64>() / n;
        let nc: Vec<f64> = noise.iter().map(|v| v - mn).collect();
        let proj = nc.iter().zip(&yc).map(|(a, b)| a * b).sum::<f64>()
            / yc.iter().map(|b| b * b).sum::<f64>();
        let e: Vec<f64> = nc.iter().zip(&yc).map(|(a, b)| a - proj * b).collect();
        let sy = yc.iter().map(|b| b * b).sum::<f64>().sqrt();
        let se = e.iter().map(|b| b * b).sum::<f64>().sqrt();
        yc.iter()
            .zip(&e)
            .map(|(a, b)| r * a / sy + (1.0 - r * r).sqrt() * b / se)
            .collect()
    }

    #[test]
    fn threshold_and_family_pruning() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let y: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let mut col = |r: f64| {
            let noise: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            with_r(&y, &noise, r)
        };
        let columns = vec![
            ("ascMATTR".to_owned(), col(0.26)),
            ("CAUS_MOT_Prop".to_owned(), col(0.06)),
            ("TRAN_S_AvMI".to_owned(), col(0.05)),
            ("TRAN_S_AvT".to_owned(), col(0.08)),
            ("TRAN_S_AvDeltaPStructure".to_owned(), col(-0.14)),
            ("TRAN_S_AvDeltaPLemma".to_owned(), col(0.03)),
            ("ascAvMI".to_owned(), col(0.12)),
            ("ascAvT".to_owned(), col(0.11)),
        ];
        let fm = FeatureMatrix::from_columns(columns, y).unwrap();
        let res = bivariate_filter(&fm, 0.10, 0.9);
        let r0 = res.correlations[0].r.unwrap();
        assert!((r0 - 0.26).abs() < 1e-12);
        assert_eq!(
            res.selected(),
            vec!["ascMATTR", "TRAN_S_AvDeltaPStructure", "ascAvMI"]
        );
        assert_eq!(res.correlations[1].status, FilterStatus::BelowThreshold);
        assert_eq!(
            res.correlations[7].status,
            FilterStatus::Pruned {
                by: "ascAvMI".into()
            }
        );
    }

    #[test]
    fn missing_values_use_pairwise_rows() {
        let fm = FeatureMatrix::new(
            vec!["a".into()],
            (0..5).map(|i| i.to_string()).collect(),
            vec![
                vec![Some(1.0)],
                vec![None],
                vec![Some(2.0)],
                vec![Some(3.0)],
                vec![None],
            ],
            vec![1.0, 9.0, 2.0, 3.0, 9.0],
        )
        .unwrap();
        let res = bivariate_filter(&fm, 0.1, 0.0);
        assert_eq!(res.correlations[0].n, 3);
        assert!((res.correlations[0].r.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(res.correlations[0].status, FilterStatus::Retained);
        // present in 3 of 5 rows
        let res = bivariate_filter(&fm, 0.1, 0.61);
        assert_eq!(res.correlations[0].status, FilterStatus::Sparse);
        let (x, _, dropped) = fm.complete_cases(&[0]);
        assert_eq!((x.nrows(), dropped), (3, 2));
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
            scale in 0.1f64..10.0,
            shift in -50.0f64..50.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            if let Ok(r) = pearson(&x, &y) {
                prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
                let xs: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
                prop_assert!((r - pearson(&xs, &y).unwrap()).abs() < 1e-9);
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
