use nalgebra::{DMatrix, DVector};

use super::ols::centered_gram;
use super::StatsError;

/// Largest candidate count searched exhaustively by [`aic_select`].
pub const EXHAUSTIVE_LIMIT: usize = 25;

/// Relative pivot size below which a swept column counts as collinear.
const PIVOT_TOL: f64 = 1e-10;

/// Residual sums of squares are floored at this fraction of the total sum
/// of squares, so exact fits get a finite AIC.
const RSS_FLOOR: f64 = 1e-12;

/// Variance inflation factor of every column: `1 / (1 - R²_j)` where `R²_j`
/// comes from regressing column `j` on the others plus an intercept.
/// Columns explained exactly (or constant) get `f64::INFINITY`.
pub fn vif(x: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows();
    let k = x.ncols();
    if k < 2 {
        return vec![1.0; k];
    }
    (0..k)
        .map(|j| {
            let target = x.column(j).clone_owned();
            let mean = target.mean();
            let tss: f64 = target.iter().map(|v| (v - mean).powi(2)).sum();
            if tss <= 0.0 {
                return f64::INFINITY;
            }
            let others = DMatrix::from_fn(n, k, |r, c| match c {
                0 => 1.0,
                c if c <= j => x[(r, c - 1)],
                c => x[(r, c)],
            });
            let coef = others
                .clone()
                .svd(true, true)
                .solve(&target, 1e-12)
                .expect("SVD with both factors");
            let rss = (target - others * coef).norm_squared();
            let r2 = 1.0 - rss / tss;
            if r2 >= 1.0 - 1e-12 {
                f64::INFINITY
            } else {
                (1.0 / (1.0 - r2)).max(1.0)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VifPruning {
    /// Surviving column indices, in original order.
    pub kept: Vec<usize>,
    /// Dropped columns with the VIF they had when dropped, in drop order.
    pub dropped: Vec<(usize, f64)>,
}

/// Repeatedly drops the column with the largest VIF until every VIF is
/// below `limit`. Ties drop the later column.
pub fn vif_prune(x: &DMatrix<f64>, limit: f64) -> VifPruning {
    let mut kept: Vec<usize> = (0..x.ncols()).collect();
    let mut dropped = Vec::new();
    while kept.len() >= 2 {
        let sub = x.select_columns(&kept);
        let vifs = vif(&sub);
        let (pos, worst) =
            vifs.iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                    if v >= best.1 {
                        (i, v)
                    } else {
                        best
                    }
                });
        if worst < limit {
            break;
        }
        dropped.push((kept.remove(pos), worst));
    }
    VifPruning { kept, dropped }
}

/// Gaussian AIC with intercept and error variance counted as parameters:
/// `n ln(RSS/n) + 2(k + 2)`.
pub fn aic(n: usize, rss: f64, k: usize) -> f64 {
    n as f64 * (rss / n as f64).ln() + 2.0 * (k as f64 + 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelCandidate {
    /// Column indices of the predictors, ascending.
    pub predictors: Vec<usize>,
    pub rss: f64,
    pub aic: f64,
    pub delta_aic: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMethod {
    /// Every subset was fitted.
    Exhaustive,
    /// Too many candidates: union of forward selection and backward
    /// elimination paths.
    Stepwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AicSelection {
    /// Models with ΔAIC below the cutoff, best first. Never empty.
    pub candidates: Vec<ModelCandidate>,
    pub method: SelectionMethod,
}

impl AicSelection {
    pub fn best(&self) -> &ModelCandidate {
        &self.candidates[0]
    }
}

/// Sweeps pivot `j` of the symmetric matrix `src` (row-major, size `m`)
/// into `dst`. Returns false if the pivot is numerically zero.
fn sweep(src: &[f64], dst: &mut [f64], m: usize, j: usize, scale: f64) -> bool {
    let pivot = src[j * m + j];
    if pivot <= PIVOT_TOL * scale {
        return false;
    }
    let inv = 1.0 / pivot;
    for r in 0..m {
        for c in 0..m {
            dst[r * m + c] = if r == j && c == j {
                -inv
            } else if r == j || c == j {
                src[r * m + c] * inv
            } else {
                src[r * m + c] - src[r * m + j] * src[j * m + c] * inv
            };
        }
    }
    true
}

/// Keeps every model within `delta` of the best AIC seen so far.
#[derive(Default)]
struct Collector {
    best: f64,
    models: Vec<(u64, f64, f64)>,
}

impl Collector {
    fn new() -> Self {
        Collector {
            best: f64::INFINITY,
            models: Vec::new(),
        }
    }

    fn push(&mut self, mask: u64, rss: f64, aic: f64, delta: f64) {
        if aic - self.best >= delta {
            return;
        }
        if aic < self.best {
            self.best = aic;
        }
        self.models.push((mask, rss, aic));
        if self.models.len() > 1024 {
            self.prune(delta);
        }
    }

    fn prune(&mut self, delta: f64) {
        let best = self.best;
        self.models.retain(|m| m.2 - best < delta);
    }

    fn merge(mut self, other: Collector, delta: f64) -> Collector {
        self.best = self.best.min(other.best);
        self.models.extend(other.models);
        self.prune(delta);
        self
    }
}

struct Search<'a> {
    m: usize,
    p: usize,
    n: usize,
    tss: f64,
    scale: &'a [f64],
    delta: f64,
}

impl Search<'_> {
    fn record(&self, cur: &[f64], mask: u64, out: &mut Collector) {
        let rss = cur[self.p * self.m + self.p].max(self.tss * RSS_FLOOR);
        let k = mask.count_ones() as usize;
        out.push(mask, rss, aic(self.n, rss, k), self.delta);
    }

    /// Include/exclude decision for column `i`; `scratch[i]` holds the
    /// matrix after sweeping `i`.
    fn visit(
        &self,
        i: usize,
        cur: &[f64],
        mask: u64,
        scratch: &mut [Vec<f64>],
        out: &mut Collector,
    ) {
        if i == self.p {
            self.record(cur, mask, out);
            return;
        }
        let (mine, rest) = scratch.split_first_mut().expect("scratch per column");
        self.visit(i + 1, cur, mask, rest, out);
        if sweep(cur, mine, self.m, i, self.scale[i]) {
            self.visit(i + 1, mine, mask | 1 << i, rest, out);
        }
    }

    /// Same as [`Search::visit`] but forks the first `depth` levels.
    fn visit_par(&self, i: usize, cur: &[f64], mask: u64, depth: usize) -> Collector {
        if depth == 0 || i == self.p {
            let mut scratch = vec![vec![0.0; self.m * self.m]; self.p - i];
            let mut out = Collector::new();
            self.visit(i, cur, mask, &mut scratch, &mut out);
            return out;
        }
        let mut swept = vec![0.0; self.m * self.m];
        let ok = sweep(cur, &mut swept, self.m, i, self.scale[i]);
        let (without, with) = rayon::join(
            || self.visit_par(i + 1, cur, mask, depth - 1),
            || ok.then(|| self.visit_par(i + 1, &swept, mask | 1 << i, depth - 1)),
        );
        match with {
            Some(w) => without.merge(w, self.delta),
            None => without,
        }
    }
}

fn subset_rss(gram: &DMatrix<f64>, cols: &[usize]) -> Option<f64> {
    let p = gram.nrows() - 1;
    let tss = gram[(p, p)];
    if cols.is_empty() {
        return Some(tss);
    }
    let sub = DMatrix::from_fn(cols.len(), cols.len(), |r, c| gram[(cols[r], cols[c])]);
    let rhs = DVector::from_iterator(cols.len(), cols.iter().map(|&j| gram[(j, p)]));
    let ch = sub.cholesky()?;
    let diag_ok =
        (0..cols.len()).all(|i| ch.l()[(i, i)].powi(2) > PIVOT_TOL * gram[(cols[i], cols[i])]);
    diag_ok.then(|| tss - rhs.dot(&ch.solve(&rhs)))
}

fn stepwise(gram: &DMatrix<f64>, n: usize, delta: f64) -> Collector {
    let p = gram.nrows() - 1;
    let tss = gram[(p, p)];
    let mut out = Collector::new();
    let eval = |mask: u64, out: &mut Collector| -> Option<f64> {
        let cols: Vec<usize> = (0..p).filter(|j| mask >> j & 1 == 1).collect();
        let rss = subset_rss(gram, &cols)?.max(tss * RSS_FLOOR);
        let a = aic(n, rss, cols.len());
        out.push(mask, rss, a, delta);
        Some(a)
    };

    // forward from the empty model
    let mut mask = 0u64;
    let mut current = eval(mask, &mut out).expect("intercept-only model");
    loop {
        let step = (0..p)
            .filter(|j| mask >> j & 1 == 0)
            .filter_map(|j| eval(mask | 1 << j, &mut out).map(|a| (j, a)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match step {
            Some((j, a)) if a < current => {
                mask |= 1 << j;
                current = a;
            }
            _ => break,
        }
    }

    // backward from the full model (or the largest fittable prefix)
    let mut mask: u64 = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
    let mut current = loop {
        if let Some(a) = eval(mask, &mut out) {
            break a;
        }
        mask &= !(1u64 << (63 - mask.leading_zeros()));
    };
    loop {
        let step = (0..p)
            .filter(|j| mask >> j & 1 == 1)
            .filter_map(|j| eval(mask & !(1 << j), &mut out).map(|a| (j, a)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match step {
            Some((j, a)) if a < current => {
                mask &= !(1 << j);
                current = a;
            }
            _ => break,
        }
    }
    out
}

/// Best-subset selection by AIC.
///
/// Every subset of the columns of `x` is fitted (with an intercept) when
/// there are at most [`EXHAUSTIVE_LIMIT`] columns, using a depth-first
/// sweep over the centered cross-product matrix. Subsets containing an
/// exactly collinear column are skipped. Returns all models whose AIC is
/// less than `delta` above the minimum; the best model comes first, with
/// ties (within 1e-9) going to the model with fewer predictors.
pub fn aic_select(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    delta: f64,
) -> Result<AicSelection, StatsError> {
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(StatsError::LengthMismatch(n, y.len()));
    }
    if n < p + 3 {
        return Err(StatsError::TooFewObservations {
            have: n,
            need: p + 3,
        });
    }
    if p > 64 {
        return Err(StatsError::InvalidMatrix(format!(
            "{p} candidates exceed 64"
        )));
    }
    super::ensure_varies(y.as_slice())?;

    let gram = centered_gram(x, y);
    let m = p + 1;
    let tss = gram[(p, p)];

    let (collector, method) = if p <= EXHAUSTIVE_LIMIT {
        let flat: Vec<f64> = (0..m * m).map(|i| gram[(i / m, i % m)]).collect();
        let scale: Vec<f64> = (0..p).map(|j| gram[(j, j)]).collect();
        let search = Search {
            m,
            p,
            n,
            tss,
            scale: &scale,
            delta,
        };
        (
            search.visit_par(0, &flat, 0, p.min(6)),
            SelectionMethod::Exhaustive,
        )
    } else {
        (stepwise(&gram, n, delta), SelectionMethod::Stepwise)
    };

    let mut models = collector.models;
    models.sort_by_key(|m| m.0);
    models.dedup_by_key(|m| m.0);
    let min = models.iter().map(|m| m.2).fold(f64::INFINITY, f64::min);

    let mut candidates: Vec<ModelCandidate> = models
        .into_iter()
        .filter(|m| m.2 - min < delta)
        .map(|(mask, rss, a)| ModelCandidate {
            predictors: (0..p).filter(|j| mask >> j & 1 == 1).collect(),
            rss,
            aic: a,
            delta_aic: a - min,
        })
        .collect();

    let tied = |c: &ModelCandidate| c.delta_aic <= 1e-9 * min.abs().max(1.0);
    candidates.sort_by(|a, b| {
        tied(b)
            .cmp(&tied(a))
            .then_with(|| {
                if tied(a) && tied(b) {
                    std::cmp::Ordering::Equal
                } else {
                    a.aic.total_cmp(&b.aic)
                }
            })
            .then_with(|| a.predictors.len().cmp(&b.predictors.len()))
            .then_with(|| a.aic.total_cmp(&b.aic))
            .then_with(|| a.predictors.cmp(&b.predictors))
    });

    Ok(AicSelection { candidates, method })
}
