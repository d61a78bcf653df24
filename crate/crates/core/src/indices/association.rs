//! Pointwise association between a construction and a verb lemma.

use crate::norms::{ContingencyCells, NormTable};
use crate::tagger::{AscToken, AscType};

/// `E = (a + b)(a + c) / N`.
pub fn expected(cells: &ContingencyCells) -> f64 {
    let row = (cells.a + cells.b) as u128;
    let col = (cells.a + cells.c_cell) as u128;
    (row * col) as f64 / cells.total() as f64
}

/// `log2(a / E)`; `None` when `a = 0`.
pub fn mi(cells: &ContingencyCells) -> Option<f64> {
    if cells.a == 0 {
        return None;
    }
    Some((cells.a as f64 / expected(cells)).log2())
}

/// `(a - E) / sqrt(a)`; `None` when `a = 0`.
pub fn t_score(cells: &ContingencyCells) -> Option<f64> {
    if cells.a == 0 {
        return None;
    }
    let a = cells.a as f64;
    Some((a - expected(cells)) / a.sqrt())
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `a/(a+b) - c/(c+d)`: how much the lemma predicts the construction.
pub fn dp_lemma(cells: &ContingencyCells) -> f64 {
    ratio(cells.a, cells.a + cells.b) - ratio(cells.c_cell, cells.c_cell + cells.d)
}

/// `a/(a+c) - b/(b+d)`: how much the construction predicts the lemma.
pub fn dp_structure(cells: &ContingencyCells) -> f64 {
    ratio(cells.a, cells.a + cells.c_cell) - ratio(cells.b, cells.b + cells.d)
}

/// The four association scores of one pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Association {
    pub mi: Option<f64>,
    pub t: Option<f64>,
    pub dp_lemma: f64,
    pub dp_structure: f64,
}

impl Association {
    pub fn from_cells(cells: &ContingencyCells) -> Self {
        Association {
            mi: mi(cells),
            t: t_score(cells),
            dp_lemma: dp_lemma(cells),
            dp_structure: dp_structure(cells),
        }
    }

    fn values(&self) -> [Option<f64>; 4] {
        [
            self.mi,
            self.t,
            Some(self.dp_lemma),
            Some(self.dp_structure),
        ]
    }
}

/// Running token-level mean that ignores undefined values.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    pub(crate) fn push(&mut self, v: Option<f64>) {
        if let Some(v) = v {
            self.sum += v;
            self.n += 1;
        }
    }

    pub(crate) fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Mean MI, T, ΔP-lemma and ΔP-structure: first across all tokens, then per
/// construction type in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct SoaIndices {
    pub overall: [Option<f64>; 4],
    pub per_type: [[Option<f64>; 4]; 9],
}

pub fn soa_indices(ascs: &[AscToken], norm: &NormTable) -> SoaIndices {
    let mut overall = [Mean::default(); 4];
    let mut per_type = [[Mean::default(); 4]; 9];

    for tok in ascs {
        let scores = Association::from_cells(&norm.contingency(tok.asc_type, &tok.verb_lemma));
        for (m, v) in scores.values().into_iter().enumerate() {
            overall[m].push(v);
            per_type[tok.asc_type.index()][m].push(v);
        }
    }

    SoaIndices {
        overall: overall.map(|m| m.get()),
        per_type: per_type.map(|row| row.map(|m| m.get())),
    }
}

impl SoaIndices {
    pub fn for_type(&self, c: AscType) -> [Option<f64>; 4] {
        self.per_type[c.index()]
    }
}
