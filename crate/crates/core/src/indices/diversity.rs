use std::collections::HashMap;
use std::hash::Hash;

use crate::tagger::{AscToken, AscType};

/// Moving-average type-token ratio over windows of width `window`.
///
/// Defined only when the sequence has at least `window + 1` items; shorter
/// sequences give `None`. The window ratios are accumulated left to right
/// and the sum divided by the number of windows.
///
/// ```
/// use asc_core::indices::mattr;
///
/// let ratio = mattr(&["A", "B", "A", "C"], 3).unwrap();
/// assert!((ratio - 5.0 / 6.0).abs() < 1e-15);
/// assert_eq!(mattr(&["A"; 11], 11), None);
/// ```
pub fn mattr<T: Eq + Hash>(seq: &[T], window: usize) -> Option<f64> {
    assert!(window >= 2, "MATTR window must be at least 2");
    let n = seq.len();
    if n < window + 1 {
        return None;
    }

    let mut counts: HashMap<&T, usize> = HashMap::new();
    for item in &seq[..window] {
        *counts.entry(item).or_default() += 1;
    }

    let w = window as f64;
    let mut sum = counts.len() as f64 / w;
    for i in window..n {
        let leaving = &seq[i - window];
        let slot = counts
            .get_mut(leaving)
            .expect("leaving item is in the window");
        *slot -= 1;
        if *slot == 0 {
            counts.remove(leaving);
        }
        *counts.entry(&seq[i]).or_default() += 1;
        sum += counts.len() as f64 / w;
    }

    Some(sum / (n - window + 1) as f64)
}

/// `(ascMATTR, ascLemmaMATTR, ascLemmaMATTRNoBe)`.
pub fn diversity_indices(
    ascs: &[AscToken],
    window: usize,
    is_be: impl Fn(&str) -> bool,
) -> [Option<f64>; 3] {
    let types: Vec<AscType> = ascs.iter().map(|t| t.asc_type).collect();
    let pairs: Vec<(AscType, &str)> = ascs
        .iter()
        .map(|t| (t.asc_type, t.verb_lemma.as_str()))
        .collect();
    let no_be: Vec<(AscType, &str)> = pairs.iter().copied().filter(|(_, v)| !is_be(v)).collect();

    [
        mattr(&types, window),
        mattr(&pairs, window),
        mattr(&no_be, window),
    ]
}
