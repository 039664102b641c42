use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric sparse weight matrix in compressed-row form.
///
/// Rows are sorted by column, there are no self-loops and every stored value
/// is strictly positive. `(i, j)` is stored iff `(j, i)` is, with the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeights<T> {
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseWeights<T> {
    /// Matrix with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        SparseWeights { row_start: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    /// Assembles from per-row entry lists. Rows are sorted here; symmetry,
    /// positivity and the absence of duplicates and self-loops are checked.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let n = rows.len();
        if n > u32::MAX as usize {
            return Err(Error::param("too many vertices for 32-bit column indices"));
        }
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_start.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|e| e.0);
            for (k, &(j, w)) in row.iter().enumerate() {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, len: n });
                }
                if j == i {
                    return Err(Error::param(format!("self-loop at vertex {i}")));
                }
                if k > 0 && row[k - 1].0 == j {
                    return Err(Error::param(format!("duplicate edge ({i}, {j})")));
                }
                if !(w > T::zero()) || !w.is_finite() {
                    return Err(Error::param(format!(
                        "weight of edge ({i}, {j}) must be positive and finite, got {w}"
                    )));
                }
                cols.push(j as u32);
                vals.push(w);
            }
            row_start.push(cols.len());
        }
        let m = SparseWeights { row_start, cols, vals };
        if let Some((i, j)) = m.first_asymmetry() {
            return Err(Error::param(format!("weights are not symmetric at ({i}, {j})")));
        }
        Ok(m)
    }

    /// Builds a symmetric matrix from undirected edges, each listed once.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize, T)>>(n: usize, edges: I) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), len: n });
            }
            rows[i].push((j, w));
            if i != j {
                rows[j].push((i, w));
            }
        }
        Self::from_rows(rows)
    }

    /// Assembles from rows already known to be sorted, symmetric and positive.
    pub(crate) fn from_sorted_rows_unchecked(rows: Vec<Vec<(u32, T)>>) -> Self {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_start.push(0);
        for row in rows {
            for (j, w) in row {
                cols.push(j);
                vals.push(w);
            }
            row_start.push(cols.len());
        }
        debug_assert!(row_start.windows(2).all(|w| w[0] <= w[1]));
        SparseWeights { row_start, cols, vals }
    }

    pub fn n_vertices(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Number of stored directed entries (twice the edge count).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn n_edges(&self) -> usize {
        self.cols.len() / 2
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let r = self.row_start[i]..self.row_start[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn degree_count(&self, i: usize) -> usize {
        self.row_start[i + 1] - self.row_start[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (c, v) = self.row(i);
        c.iter().zip(v).map(|(&j, &w)| (j as usize, w))
    }

    /// Stored weight of `(i, j)`, `None` when absent.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        if i >= self.n_vertices() {
            return None;
        }
        let (c, v) = self.row(i);
        let j = u32::try_from(j).ok()?;
        c.binary_search(&j).ok().map(|k| v[k])
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_vertices())
            .flat_map(move |i| self.neighbors(i).filter(move |&(j, _)| j > i).map(move |(j, w)| (i, j, w)))
    }

    pub fn values(&self) -> &[T] {
        &self.vals
    }

    /// Largest stored weight, zero when there are no edges.
    pub fn max_value(&self) -> T {
        self.vals.iter().copied().fold(T::zero(), T::max)
    }

    /// Same sparsity pattern with values replaced by `f(i, j, w)`.
    ///
    /// `f` must be symmetric in `(i, j)` and return positive values.
    pub(crate) fn map_values<F: Fn(usize, usize, T) -> T>(&self, f: F) -> Self {
        let mut vals = Vec::with_capacity(self.vals.len());
        for i in 0..self.n_vertices() {
            for (j, w) in self.neighbors(i) {
                vals.push(f(i, j, w));
            }
        }
        SparseWeights { row_start: self.row_start.clone(), cols: self.cols.clone(), vals }
    }

    /// Every stored value multiplied by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::param(format!("scale factor must be positive, got {c}")));
        }
        Ok(self.map_values(|_, _, w| w * c))
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n_vertices() {
            for (j, w) in self.neighbors(i) {
                if self.get(j, i) != Some(w) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact symmetry check of stored pattern and values.
    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_round_trip() {
        let m = SparseWeights::from_edges(4, vec![(0, 1, 1.0f64), (2, 1, 2.0), (3, 0, 0.5)]).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_edges(), 3);
        assert_eq!(m.get(1, 2), Some(2.0));
        assert_eq!(m.get(2, 1), Some(2.0));
        assert_eq!(m.get(2, 3), None);
        assert_eq!(m.max_value(), 2.0);
        let e: Vec<_> = m.edges().collect();
        assert_eq!(e, vec![(0, 1, 1.0), (0, 3, 0.5), (1, 2, 2.0)]);
        assert!(m.is_symmetric());
        let (c, _) = m.row(0);
        assert_eq!(c, &[1, 3]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(SparseWeights::from_edges(2, vec![(0, 0, 1.0f64)]).is_err());
        assert!(SparseWeights::from_edges(2, vec![(0, 1, 0.0f64)]).is_err());
        assert!(SparseWeights::from_edges(2, vec![(0, 1, -1.0f64)]).is_err());
        assert!(SparseWeights::from_edges(2, vec![(0, 1, 1.0f64), (1, 0, 1.0)]).is_err());
        assert!(SparseWeights::from_edges(2, vec![(0, 2, 1.0f64)]).is_err());
        assert!(SparseWeights::from_rows(vec![vec![(1, 1.0f64)], vec![(0, 2.0)]]).is_err());
        assert!(SparseWeights::from_rows(vec![vec![(1, 1.0f64)], vec![]]).is_err());
    }

    #[test]
    fn scaling() {
        let m = SparseWeights::from_edges(3, vec![(0, 1, 4.0f64), (1, 2, 4.0)]).unwrap();
        let s = m.scaled(0.25).unwrap();
        assert!(s.values().iter().all(|&w| w == 1.0));
        assert!(m.scaled(0.0).is_err());
    }
}
