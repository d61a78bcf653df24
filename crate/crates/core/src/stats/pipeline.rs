use std::fmt::Write as _;

use super::{
    aic_select, bivariate_filter, ensure_varies, ols_fit, vif_prune, AicSelection, BivariateResult,
    FeatureMatrix, FilterStatus, RegressionSummary, SelectionMethod, StatsError,
};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Minimum `|r|` in the bivariate filter.
    pub threshold: f64,
    /// Minimum share of rows in which a feature must be present. Per-type
    /// means are missing for texts without that construction, and rows are
    /// dropped listwise before model selection.
    pub min_coverage: f64,
    pub vif_limit: f64,
    /// Models with AIC less than this above the minimum are reported.
    pub delta_aic: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            threshold: 0.10,
            min_coverage: 0.9,
            vif_limit: 5.0,
            delta_aic: 4.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub bivariate: BivariateResult,
    pub rows_used: usize,
    pub rows_dropped: usize,
    /// Names dropped for collinearity, with their VIF at removal.
    pub vif_dropped: Vec<(String, f64)>,
    /// Names entering subset selection.
    pub candidates: Vec<String>,
    pub selection: AicSelection,
    pub model: RegressionSummary,
}

impl PipelineReport {
    pub fn best_predictors(&self) -> Vec<&str> {
        self.model
            .predictors
            .iter()
            .map(|c| c.name.as_str())
            .collect()
    }
}

/// Bivariate filter, collinearity pruning, AIC subset selection, then an
/// OLS fit of the best model.
pub fn run_pipeline(
    features: &FeatureMatrix,
    cfg: &PipelineConfig,
) -> Result<PipelineReport, StatsError> {
    ensure_varies(features.target())?;

    let bivariate = bivariate_filter(features, cfg.threshold, cfg.min_coverage);
    let selected: Vec<usize> = bivariate
        .selected()
        .iter()
        .map(|n| features.column_index(n).expect("selected from matrix"))
        .collect();

    let (x, y, rows_dropped) = features.complete_cases(&selected);
    if y.len() < selected.len() + 3 {
        return Err(StatsError::TooFewObservations {
            have: y.len(),
            need: selected.len() + 3,
        });
    }
    ensure_varies(y.as_slice())?;

    let pruning = vif_prune(&x, cfg.vif_limit);
    let name_of = |local: usize| features.names()[selected[local]].clone();
    let vif_dropped = pruning
        .dropped
        .iter()
        .map(|&(c, v)| (name_of(c), v))
        .collect();
    let candidates: Vec<String> = pruning.kept.iter().map(|&c| name_of(c)).collect();
    let x = x.select_columns(&pruning.kept);

    let selection = aic_select(&x, &y, cfg.delta_aic)?;
    let best = &selection.best().predictors;
    let best_names: Vec<String> = best.iter().map(|&j| candidates[j].clone()).collect();
    let model = ols_fit(&x.select_columns(best), &y, &best_names)?;

    Ok(PipelineReport {
        bivariate,
        rows_used: y.len(),
        rows_dropped,
        vif_dropped,
        candidates,
        selection,
        model,
    })
}

fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "<.001".into()
    } else {
        format!("{p:.3}")
    }
}

impl PipelineReport {
    /// Plain-text report: correlation table, selection trace, and the
    /// regression table of the best model.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = self
            .bivariate
            .correlations
            .iter()
            .map(|c| c.name.len())
            .chain([11])
            .max()
            .unwrap_or(11);

        writeln!(out, "== Bivariate correlations with score ==").unwrap();
        writeln!(out, "{:<w$}  {:>8}  {:>6}  status", "index", "r", "n").unwrap();
        for c in &self.bivariate.correlations {
            let r = c.r.map_or("NA".to_owned(), |r| format!("{r:.3}"));
            let status = match &c.status {
                FilterStatus::Retained => "retained".to_owned(),
                FilterStatus::BelowThreshold => "below threshold".to_owned(),
                FilterStatus::Pruned { by } => format!("pruned (family kept {by})"),
                FilterStatus::Undefined => "undefined".to_owned(),
                FilterStatus::Sparse => "too sparse".to_owned(),
            };
            writeln!(out, "{:<w$}  {:>8}  {:>6}  {status}", c.name, r, c.n).unwrap();
        }
        writeln!(out).unwrap();

        writeln!(out, "== Model selection ==").unwrap();
        writeln!(
            out,
            "rows used: {} ({} dropped for missing values)",
            self.rows_used, self.rows_dropped
        )
        .unwrap();
        for (name, v) in &self.vif_dropped {
            writeln!(out, "collinearity: dropped {name} (VIF {v:.2})").unwrap();
        }
        let method = match self.selection.method {
            SelectionMethod::Exhaustive => "exhaustive",
            SelectionMethod::Stepwise => "stepwise",
        };
        writeln!(
            out,
            "candidates: {} ({method} search); {} model(s) within the AIC cutoff",
            self.candidates.len(),
            self.selection.candidates.len()
        )
        .unwrap();
        writeln!(out, "{:>12}  {:>8}  {:>3}  predictors", "AIC", "dAIC", "k").unwrap();
        for m in self.selection.candidates.iter().take(20) {
            let names: Vec<&str> = m
                .predictors
                .iter()
                .map(|&j| self.candidates[j].as_str())
                .collect();
            let names = if names.is_empty() {
                "(intercept only)".to_owned()
            } else {
                names.join(", ")
            };
            writeln!(
                out,
                "{:>12.3}  {:>8.3}  {:>3}  {names}",
                m.aic,
                m.delta_aic,
                m.predictors.len()
            )
            .unwrap();
        }
        if self.selection.candidates.len() > 20 {
            writeln!(out, "... {} more", self.selection.candidates.len() - 20).unwrap();
        }
        writeln!(out).unwrap();

        let m = &self.model;
        writeln!(out, "== Regression summary ==").unwrap();
        writeln!(
            out,
            "{:<w$}  {:>9}  {:>8}  {:>8}  {:>6}  {:>13}",
            "Predictor", "Estimate", "SE", "t", "p", "Rel. Imp. (%)"
        )
        .unwrap();
        for c in std::iter::once(&m.intercept).chain(&m.predictors) {
            let imp = c
                .importance_percent(m.r_squared)
                .map_or("--".to_owned(), |v| format!("{v:.1}"));
            writeln!(
                out,
                "{:<w$}  {:>9.3}  {:>8.3}  {:>8.2}  {:>6}  {:>13}",
                c.name,
                c.estimate,
                c.std_error,
                c.t_value,
                fmt_p(c.p_value),
                imp
            )
            .unwrap();
        }
        write!(
            out,
            "R^2 = {:.3} (adj. {:.3}); RSE = {:.3}",
            m.r_squared, m.adj_r_squared, m.rse
        )
        .unwrap();
        if let (Some(f), Some(p)) = (m.f_statistic, m.f_p_value) {
            write!(
                out,
                "; F({}, {}) = {:.1}, p {}",
                m.df_model,
                m.df_resid,
                f,
                {
                    let s = fmt_p(p);
                    if s.starts_with('<') {
                        s
                    } else {
                        format!("= {s}")
                    }
                }
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "r = {:.3}", m.r_squared.max(0.0).sqrt()).unwrap();
        out
    }
}
