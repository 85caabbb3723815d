//! Deterministic pairwise summation.

const LEAF: usize = 16;

/// Cascade sum with a fixed split order; the result depends only on the slice.
pub(crate) fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise(&values[..mid]) + pairwise(&values[mid..])
}
