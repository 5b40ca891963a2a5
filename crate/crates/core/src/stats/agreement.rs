use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Raters by items, with missing cells as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRatingMatrix {
    raters: Vec<String>,
    items: Vec<String>,
    /// Row per rater, column per item.
    cells: Vec<Vec<Option<u8>>>,
    scale: (u8, u8),
}

impl SparseRatingMatrix {
    pub fn new(
        raters: Vec<String>,
        items: Vec<String>,
        cells: Vec<Vec<Option<u8>>>,
        scale: (u8, u8),
    ) -> Result<Self> {
        if scale.0 > scale.1 {
            return Err(Error::Parameter(format!("empty ordinal scale {scale:?}")));
        }
        if cells.len() != raters.len() || cells.iter().any(|row| row.len() != items.len()) {
            return Err(Error::Parameter("cell grid does not match raters x items".into()));
        }
        if let Some(v) = cells
            .iter()
            .flatten()
            .flatten()
            .find(|v| !(scale.0..=scale.1).contains(*v))
        {
            return Err(Error::Parameter(format!(
                "rating {v} outside scale {}..={}",
                scale.0, scale.1
            )));
        }
        Ok(Self {
            raters,
            items,
            cells,
            scale,
        })
    }

    /// Builds a matrix on the 1-5 star scale from `(rater, item, value)` triples.
    /// Later triples overwrite earlier ones for the same cell.
    pub fn from_triples<'a>(triples: impl IntoIterator<Item = (&'a str, &'a str, u8)>) -> Result<Self> {
        let triples: Vec<_> = triples.into_iter().collect();
        let mut raters: Vec<String> = triples.iter().map(|t| t.0.to_string()).collect();
        let mut items: Vec<String> = triples.iter().map(|t| t.1.to_string()).collect();
        raters.sort();
        raters.dedup();
        items.sort();
        items.dedup();
        let mut cells = vec![vec![None; items.len()]; raters.len()];
        for (r, i, v) in triples {
            let ri = raters.binary_search_by(|x| x.as_str().cmp(r)).expect("collected");
            let ii = items.binary_search_by(|x| x.as_str().cmp(i)).expect("collected");
            cells[ri][ii] = Some(v);
        }
        Self::new(raters, items, cells, (1, 5))
    }

    pub fn raters(&self) -> &[String] {
        &self.raters
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn scale(&self) -> (u8, u8) {
        self.scale
    }

    pub fn get(&self, rater: usize, item: usize) -> Option<u8> {
        self.cells[rater][item]
    }

    /// Values given to one item, in rater order.
    pub fn unit(&self, item: usize) -> Vec<u8> {
        self.cells.iter().filter_map(|row| row[item]).collect()
    }
}

/// Krippendorff's alpha with the ordinal difference function.
///
/// Built from the coincidence matrix of pairable values: units with fewer
/// than two values contribute nothing.
pub fn krippendorff_alpha_ordinal(matrix: &SparseRatingMatrix) -> Result<f64> {
    let (lo, hi) = matrix.scale();
    let k = (hi - lo) as usize + 1;
    let mut coincidence = vec![vec![0.0f64; k]; k];
    for item in 0..matrix.items().len() {
        let values = matrix.unit(item);
        let m = values.len();
        if m < 2 {
            continue;
        }
        let mut counts = vec![0usize; k];
        for v in &values {
            counts[(v - lo) as usize] += 1;
        }
        let w = 1.0 / (m as f64 - 1.0);
        for c in 0..k {
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * counts[c].saturating_sub(1)
                } else {
                    counts[c] * counts[d]
                };
                coincidence[c][d] += pairs as f64 * w;
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    if n == 0.0 {
        return Err(Error::UndefinedStatistic(
            "Krippendorff's alpha needs at least one item rated twice".into(),
        ));
    }

    let delta = ordinal_delta(&marginals);
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            observed += coincidence[c][d] * delta[c][d];
            expected += marginals[c] * marginals[d] * delta[c][d];
        }
    }
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * observed / expected)
}

/// Squared ordinal distances between scale points given value frequencies.
fn ordinal_delta(marginals: &[f64]) -> Vec<Vec<f64>> {
    let k = marginals.len();
    let mut prefix = vec![0.0; k + 1];
    for g in 0..k {
        prefix[g + 1] = prefix[g] + marginals[g];
    }
    let mut delta = vec![vec![0.0; k]; k];
    for c in 0..k {
        for d in c + 1..k {
            let span = prefix[d + 1] - prefix[c] - (marginals[c] + marginals[d]) / 2.0;
            delta[c][d] = span * span;
            delta[d][c] = delta[c][d];
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement_is_one() {
        let m = SparseRatingMatrix::from_triples([
            ("a", "x", 3),
            ("b", "x", 3),
            ("a", "y", 4),
            ("b", "y", 4),
        ])
        .unwrap();
        assert_eq!(krippendorff_alpha_ordinal(&m).unwrap(), 1.0);
    }

    #[test]
    fn single_value_everywhere_is_one() {
        let m = SparseRatingMatrix::from_triples([("a", "x", 2), ("b", "x", 2)]).unwrap();
        assert_eq!(krippendorff_alpha_ordinal(&m).unwrap(), 1.0);
    }

    #[test]
    fn opposite_extremes_are_negative() {
        // Two raters, (1,5) and (5,1). n = 4, n_1 = n_5 = 2.
        // delta(1,5) = (n_1 + ... + n_5 - (n_1 + n_5) / 2)^2 = 4, o_15 = o_51 = 2.
        // D_o sum = 2*2*4 = 16, D_e sum = 2*2*4*2 = 32, alpha = 1 - 3*16/32.
        let m = SparseRatingMatrix::from_triples([
            ("a", "x", 1),
            ("b", "x", 5),
            ("a", "y", 5),
            ("b", "y", 1),
        ])
        .unwrap();
        let alpha = krippendorff_alpha_ordinal(&m).unwrap();
        assert!((alpha - (-0.5)).abs() < 1e-15, "{alpha}");
    }

    #[test]
    fn no_pairable_values_is_undefined() {
        let m = SparseRatingMatrix::from_triples([("a", "x", 1), ("b", "y", 5)]).unwrap();
        assert!(matches!(
            krippendorff_alpha_ordinal(&m),
            Err(Error::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn out_of_scale_rejected() {
        assert!(SparseRatingMatrix::from_triples([("a", "x", 6)]).is_err());
        assert!(SparseRatingMatrix::from_triples([("a", "x", 0)]).is_err());
    }
}
