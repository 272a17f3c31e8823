//! Integral reduced homology of a simplicial complex from the Smith normal
//! forms of its boundary maps.
//!
//! Boundary matrices are first eliminated sparsely on ±1 pivots; whatever is
//! left goes through a dense Smith normal form.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{IdealError, SimplicialComplex};

pub const MAX_HOMOLOGY_SIMPLICES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homology {
    /// Reduced Betti numbers b̃₀, b̃₁, ..
    pub reduced_betti: Vec<usize>,
    /// Non-unit invariant factors of H̃_d, keyed by d.
    pub torsion: BTreeMap<usize, Vec<u64>>,
    /// All reduced groups vanish.
    pub trivial: bool,
}

pub fn reduced_homology(c: &SimplicialComplex) -> Result<Homology, IdealError> {
    reduced_homology_capped(c, MAX_HOMOLOGY_SIMPLICES)
}

pub fn reduced_homology_capped(c: &SimplicialComplex, cap: usize) -> Result<Homology, IdealError> {
    if c.simplex_count() > cap {
        return Err(IdealError::TooManySimplices(cap));
    }
    let top = c.simplices.len();
    if top == 0 {
        // H̃₋₁ of the empty complex is Z
        return Ok(Homology {
            reduced_betti: Vec::new(),
            torsion: BTreeMap::new(),
            trivial: false,
        });
    }
    // ranks[d] and factors[d] describe ∂_d : C_d → C_{d−1}; ∂₀ is augmentation
    let mut ranks = vec![1usize];
    let mut factors: Vec<Vec<u64>> = vec![Vec::new()];
    for d in 1..top {
        let index: HashMap<&[u32], usize> = c.simplices[d - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let mut columns = Vec::with_capacity(c.simplices[d].len());
        for s in &c.simplices[d] {
            let mut col = Vec::with_capacity(s.len());
            for skip in 0..s.len() {
                let face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                col.push((index[face.as_slice()], sign));
            }
            columns.push(col);
        }
        let (rank, nonunit) = smith(c.simplices[d - 1].len(), &columns);
        ranks.push(rank);
        factors.push(nonunit);
    }
    ranks.push(0);
    factors.push(Vec::new());
    let mut betti = Vec::with_capacity(top);
    let mut torsion = BTreeMap::new();
    for d in 0..top {
        betti.push(c.simplices[d].len() - ranks[d] - ranks[d + 1]);
        if !factors[d + 1].is_empty() {
            torsion.insert(d, factors[d + 1].clone());
        }
    }
    let trivial = betti.iter().all(|&b| b == 0) && torsion.is_empty();
    Ok(Homology {
        reduced_betti: betti,
        torsion,
        trivial,
    })
}

/// Rank and non-unit invariant factors of an integer matrix given by sparse
/// columns of (row, value).
pub fn smith(rows: usize, columns: &[Vec<(usize, i64)>]) -> (usize, Vec<u64>) {
    let mut row_entries: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); rows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); columns.len()];
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            if v != 0 {
                *row_entries[i].entry(j).or_insert(0) += v;
                col_rows[j].insert(i);
            }
        }
    }
    let mut rank = 0;
    loop {
        let mut progress = false;
        for j in 0..columns.len() {
            let pivot = col_rows[j]
                .iter()
                .copied()
                .filter(|&i| row_entries[i][&j].abs() == 1)
                .min_by_key(|&i| row_entries[i].len());
            let Some(p) = pivot else { continue };
            let prow = std::mem::take(&mut row_entries[p]);
            let pval = prow[&j];
            for &k in prow.keys() {
                col_rows[k].remove(&p);
            }
            let others: Vec<usize> = col_rows[j].iter().copied().collect();
            for i in others {
                let factor = row_entries[i][&j] * pval;
                for (&k, &v) in &prow {
                    let e = row_entries[i].entry(k).or_insert(0);
                    *e -= factor * v;
                    if *e == 0 {
                        row_entries[i].remove(&k);
                        col_rows[k].remove(&i);
                    } else {
                        col_rows[k].insert(i);
                    }
                }
            }
            debug_assert!(col_rows[j].is_empty());
            rank += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    // dense remainder
    let live_rows: Vec<usize> = (0..rows).filter(|&i| !row_entries[i].is_empty()).collect();
    if live_rows.is_empty() {
        return (rank, Vec::new());
    }
    let live_cols: Vec<usize> = (0..columns.len()).filter(|&j| !col_rows[j].is_empty()).collect();
    let col_pos: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let mut dense = vec![vec![0i128; live_cols.len()]; live_rows.len()];
    for (r, &i) in live_rows.iter().enumerate() {
        for (&j, &v) in &row_entries[i] {
            dense[r][col_pos[&j]] = v as i128;
        }
    }
    let diag = dense_smith(dense);
    let mut out = Vec::new();
    for d in diag {
        rank += 1;
        if d != 1 {
            out.push(d as u64);
        }
    }
    out.sort_unstable();
    (rank, out)
}

/// Invariant factors (positive, each dividing the next) of a dense matrix.
fn dense_smith(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                dirty |= m[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for i in t..rows {
                        m[i][j] -= q * m[i][t];
                    }
                }
                dirty |= m[t][j] != 0;
            }
            if !dirty {
                break;
            }
            // move a smaller remainder into the pivot position
            let (i, j) = (t..rows)
                .map(|i| (i, t))
                .chain((t..cols).map(|j| (t, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs())
                .unwrap();
            m.swap(t, i);
            for row in m.iter_mut() {
                row.swap(t, j);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    // normalise to a divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = gcd(diag[i], diag[j]);
            let l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{build_complex, HalfEdgeSet};

    fn dense_cols(m: &[&[i64]]) -> (usize, Vec<Vec<(usize, i64)>>) {
        let rows = m.len();
        let cols = m[0].len();
        let columns = (0..cols)
            .map(|j| (0..rows).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect())
            .collect();
        (rows, columns)
    }

    #[test]
    fn smith_examples() {
        let (r, c) = dense_cols(&[&[2, 0], &[0, 3]]);
        assert_eq!(smith(r, &c), (2, vec![6]));
        let (r, c) = dense_cols(&[&[2, 4], &[4, 8]]);
        assert_eq!(smith(r, &c), (1, vec![2]));
        let (r, c) = dense_cols(&[&[1, 1], &[1, -1]]);
        assert_eq!(smith(r, &c), (2, vec![2]));
        let (r, c) = dense_cols(&[&[0, 0], &[0, 0]]);
        assert_eq!(smith(r, &c), (0, vec![]));
    }

    #[test]
    fn homology_of_small_complexes() {
        let b4 = build_complex(&HalfEdgeSet::new(0, 4).unwrap(), false).unwrap();
        let hom = reduced_homology(&b4).unwrap();
        assert_eq!(hom.reduced_betti, [2]);
        assert!(!hom.trivial);

        let point = build_complex(&HalfEdgeSet::new(2, 0).unwrap(), true).unwrap();
        assert!(reduced_homology(&point).unwrap().trivial);

        // B(v) for five half-edges is the Petersen graph: b̃₁ = 15 − 10 + 1
        let b5 = build_complex(&HalfEdgeSet::new(0, 5).unwrap(), false).unwrap();
        assert_eq!(reduced_homology(&b5).unwrap().reduced_betti, [0, 6]);
    }

    #[test]
    fn cap_is_enforced() {
        let b6 = build_complex(&HalfEdgeSet::new(0, 6).unwrap(), false).unwrap();
        assert!(reduced_homology_capped(&b6, 10).is_err());
    }
}
