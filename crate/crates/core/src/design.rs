//! Sensor designs, greedy selection and small-instance exhaustive search.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::rng::SampleRng;

/// Ordered selection of `indices.len()` sensors out of `d` candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Design {
    pub d: usize,
    pub indices: Vec<usize>,
}

/// Checks that `indices` are distinct and below `d`.
pub fn check_indices(d: usize, indices: &[usize]) -> Result<()> {
    let mut seen = vec![false; d];
    for &i in indices {
        if i >= d {
            return Err(Error::InvalidArgument(format!(
                "sensor index {i} out of range for d = {d}"
            )));
        }
        if seen[i] {
            return Err(Error::InvalidArgument(format!("duplicate sensor index {i}")));
        }
        seen[i] = true;
    }
    Ok(())
}

impl Design {
    pub fn new(d: usize, indices: Vec<usize>) -> Result<Self> {
        check_indices(d, &indices)?;
        Ok(Self { d, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `W` with `W[i, indices[i]] = 1`.
    pub fn design_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.indices.len(), self.d);
        for (row, &col) in self.indices.iter().enumerate() {
            w[(row, col)] = 1.0;
        }
        w
    }

    /// Same sensor set in increasing index order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut s = self.indices.clone();
        s.sort_unstable();
        s
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| full[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub design: Design,
    /// Objective of the selected set after each step.
    pub per_step_eig: Vec<f64>,
}

/// Greedy forward selection: at each step adds the remaining candidate that
/// maximizes `eval` on the augmented set. Ties go to the smallest index.
pub fn greedy_select<F>(eval: F, d: usize, r: usize) -> Result<GreedyResult>
where
    F: Fn(&[usize]) -> Result<f64> + Sync + Send,
{
    if r == 0 || r > d {
        return Err(Error::InvalidArgument(format!(
            "greedy needs 1 <= r <= d, got r = {r}, d = {d}"
        )));
    }
    let mut selected: Vec<usize> = Vec::with_capacity(r);
    let mut trace = Vec::with_capacity(r);
    for step in 0..r {
        let remaining: Vec<usize> = (0..d).filter(|c| !selected.contains(c)).collect();
        let values = map_indexed(remaining.len(), |i| {
            let mut trial = selected.clone();
            trial.push(remaining[i]);
            eval(&trial)
        });
        let mut best: Option<(usize, f64)> = None;
        for (&cand, value) in remaining.iter().zip(values) {
            let value = value.map_err(|e| e.context(format!("greedy step {step}, candidate {cand}")))?;
            if value.is_nan() {
                return Err(Error::NonFinite(format!("objective at step {step}, candidate {cand}")));
            }
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((cand, value));
            }
        }
        let (cand, value) = best.expect("at least one remaining candidate");
        selected.push(cand);
        trace.push(value);
    }
    Ok(GreedyResult {
        design: Design { d, indices: selected },
        per_step_eig: trace,
    })
}

/// Number of `r`-subsets of `d` items, saturating.
pub fn binomial(d: usize, r: usize) -> u128 {
    if r > d {
        return 0;
    }
    let r = r.min(d - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((d - i) as u128) / (i as u128 + 1);
    }
    acc
}

pub const EXHAUSTIVE_BUDGET: u128 = 100_000;

/// Maximizer of `eval` over all `r`-subsets, enumerated in lexicographic order
/// so ties resolve to the lexicographically smallest set.
pub fn exhaustive_select<F>(eval: F, d: usize, r: usize) -> Result<(Design, f64)>
where
    F: Fn(&[usize]) -> Result<f64> + Sync + Send,
{
    if r == 0 || r > d {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search needs 1 <= r <= d, got r = {r}, d = {d}"
        )));
    }
    let count = binomial(d, r);
    if count > EXHAUSTIVE_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "C({d}, {r}) = {count} subsets exceeds the budget of {EXHAUSTIVE_BUDGET}"
        )));
    }
    let subsets = combinations(d, r);
    let values = map_indexed(subsets.len(), |i| eval(&subsets[i]));
    let mut best: Option<(usize, f64)> = None;
    for (i, value) in values.into_iter().enumerate() {
        let value = value?;
        if value.is_nan() {
            return Err(Error::NonFinite(format!("objective on subset {:?}", subsets[i])));
        }
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((i, value));
        }
    }
    let (i, value) = best.expect("nonempty enumeration");
    Ok((
        Design {
            d,
            indices: subsets[i].clone(),
        },
        value,
    ))
}

/// All `r`-subsets of `0..d` in lexicographic order.
pub fn combinations(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > d {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + d - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Uniformly random `r` distinct candidates, in draw order.
pub fn random_design(rng: &mut SampleRng, d: usize, r: usize) -> Result<Design> {
    if r > d {
        return Err(Error::InvalidArgument(format!("cannot pick {r} of {d} candidates")));
    }
    let indices = rand::seq::index::sample(rng, d, r).into_vec();
    Ok(Design { d, indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn design_matrix_examples() {
        let w = Design::new(3, vec![2, 0]).unwrap().design_matrix();
        assert_eq!(w, DMatrix::from_row_slice(2, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0]));
        assert!(Design::new(3, vec![1, 1])
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(Design::new(3, vec![5])
            .unwrap_err()
            .to_string()
            .contains("out of range"));
    }

    #[test]
    fn design_matrix_rows_and_columns() {
        let w = Design::new(6, vec![4, 1, 3]).unwrap().design_matrix();
        for row in w.row_iter() {
            assert_eq!(row.sum(), 1.0);
        }
        for col in w.column_iter() {
            assert!(col.sum() <= 1.0);
        }
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c = combinations(4, 2);
        assert_eq!(
            c,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
        for (d, r) in [(8, 3), (7, 4), (6, 6)] {
            assert_eq!(combinations(d, r).len() as u128, binomial(d, r));
        }
    }

    #[test]
    fn greedy_single_candidate() {
        let g = greedy_select(|_| Ok(1.0), 1, 1).unwrap();
        assert_eq!(g.design.indices, vec![0]);
    }

    #[test]
    fn greedy_ties_pick_smallest_index() {
        let g = greedy_select(|s| Ok(s.len() as f64), 5, 3).unwrap();
        assert_eq!(g.design.indices, vec![0, 1, 2]);
        assert_eq!(g.per_step_eig, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn greedy_reports_failing_candidate() {
        let err = greedy_select(
            |s| {
                if s.contains(&2) {
                    Err(Error::Solver("boom".into()))
                } else {
                    Ok(0.0)
                }
            },
            4,
            2,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("step 0") && msg.contains("candidate 2"), "{msg}");
        assert!(greedy_select(|_| Ok(0.0), 3, 4).is_err());
    }

    #[test]
    fn exhaustive_examples() {
        let (d, _) = exhaustive_select(|s| Ok(s[0] as f64), 3, 3).unwrap();
        assert_eq!(d.indices, vec![0, 1, 2]);
        let (d, v) = exhaustive_select(|_| Ok(7.0), 5, 2).unwrap();
        assert_eq!(d.indices, vec![0, 1]);
        assert_eq!(v, 7.0);
        let (d, _) = exhaustive_select(|s| Ok(-(s[0] as f64 - 2.0).abs()), 5, 1).unwrap();
        assert_eq!(d.indices, vec![2]);
        assert!(exhaustive_select(|_| Ok(0.0), 40, 10)
            .unwrap_err()
            .to_string()
            .contains("budget"));
    }

    #[test]
    fn random_design_examples() {
        let a = random_design(&mut stream_rng(3, Stream::Designs, 0), 6, 6).unwrap();
        let mut s = a.indices.clone();
        s.sort_unstable();
        assert_eq!(s, (0..6).collect::<Vec<_>>());
        let b = random_design(&mut stream_rng(3, Stream::Designs, 0), 6, 6).unwrap();
        assert_eq!(a, b);
        assert!(random_design(&mut stream_rng(3, Stream::Designs, 0), 2, 3).is_err());
    }

    #[test]
    fn random_design_pair_frequencies_are_uniform() {
        let mut counts = std::collections::BTreeMap::new();
        let draws = 10_000;
        for i in 0..draws {
            let d = random_design(&mut stream_rng(11, Stream::Designs, i), 5, 2).unwrap();
            *counts.entry(d.sorted()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        let expected = draws as f64 / 10.0;
        for (pair, c) in counts {
            let rel = (c as f64 - expected).abs() / expected;
            assert!(rel < 0.05, "pair {pair:?}: {c} draws");
        }
    }
}
