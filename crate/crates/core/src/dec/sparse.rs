//! Compressed sparse row storage with the handful of products the operators need.

/// Real sparse matrix in CSR form. Column indices within a row are sorted and unique.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicate entries are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; rows + 1];
        for &(r, c, _) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of bounds {rows}x{cols}");
            counts[r + 1] += 1;
        }
        for i in 0..rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols_tmp = vec![0usize; triplets.len()];
        let mut vals_tmp = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let slot = next[r];
            cols_tmp[slot] = c;
            vals_tmp[slot] = v;
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for r in 0..rows {
            order.clear();
            order.extend(counts[r]..counts[r + 1]);
            order.sort_by_key(|&k| cols_tmp[k]);
            let mut last: Option<usize> = None;
            for &k in &order {
                if last == Some(cols_tmp[k]) {
                    *values.last_mut().unwrap() += vals_tmp[k];
                } else {
                    col_idx.push(cols_tmp[k]);
                    values.push(vals_tmp[k]);
                    last = Some(cols_tmp[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { rows, cols, row_ptr, col_idx, values }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over `(col, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.rows {
            out.extend(self.row(r).map(|(c, v)| (r, c, v)));
        }
        out
    }

    /// `y = A x`. Each row is reduced in a fixed order, so results are bitwise reproducible.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        assert_eq!(y.len(), self.rows, "mul_vec: output dimension mismatch");
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// `y = Aᵀ x`.
    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "transpose_mul_vec: dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[k]] += self.values[k] * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.cols {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                col_idx[next[c]] = r;
                values[next[c]] = self.values[k];
                next[c] += 1;
            }
        }
        Self { rows: self.cols, cols: self.rows, row_ptr: counts, col_idx, values }
    }

    /// Sparse product `A B`.
    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut accum = vec![0.0; other.cols];
        let mut marker = vec![usize::MAX; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.rows {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if marker[c] != r {
                        marker[c] = r;
                        accum[c] = 0.0;
                        touched.push(c);
                    }
                    accum[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_idx.push(c);
                values.push(accum[c]);
            }
            row_ptr.push(col_idx.len());
        }
        Self { rows: self.rows, cols: other.cols, row_ptr, col_idx, values }
    }

    /// `diag(left) · A · diag(right)`.
    pub fn scale(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            let lr = left.map_or(1.0, |l| l[r]);
            for k in out.row_ptr[r]..out.row_ptr[r + 1] {
                let rc = right.map_or(1.0, |rt| rt[out.col_idx[k]]);
                out.values[k] *= lr * rc;
            }
        }
        out
    }

    /// `alpha·A + beta·B`.
    pub fn add_scaled(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + other.nnz());
        trip.extend(self.triplets().into_iter().map(|(r, c, v)| (r, c, alpha * v)));
        trip.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, beta * v)));
        Self::from_triplets(self.rows, self.cols, &trip)
    }

    /// Keeps only the listed columns, renumbered in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.cols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut trip = Vec::new();
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                if map[c] != usize::MAX {
                    trip.push((r, map[c], v));
                }
            }
        }
        Self::from_triplets(self.rows, keep.len(), &trip)
    }

    /// Places `blocks` side by side: `[B₀ | B₁ | …]`.
    pub fn hstack(blocks: &[&SparseMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut trip = Vec::new();
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack: row counts differ");
            trip.extend(b.triplets().into_iter().map(|(r, c, v)| (r, c + offset, v)));
            offset += b.cols;
        }
        Self::from_triplets(rows, offset, &trip)
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|A_ij − A_ji|` relative to the largest `|A_ij|`.
    pub fn asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let t = self.transpose();
        let diff = self.add_scaled(1.0, &t, -1.0);
        diff.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_triplets_are_summed() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn product_and_transpose_agree_with_dense() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        let b = SparseMatrix::from_triplets(3, 2, &[(0, 1, 4.0), (1, 0, 5.0), (2, 0, 6.0)]);
        let c = a.matmul(&b);
        assert_eq!(c.to_dense(), vec![vec![12.0, 4.0], vec![15.0, 0.0]]);
        assert_eq!(a.transpose().to_dense(), vec![vec![1.0, 0.0], vec![0.0, 3.0], vec![2.0, 0.0]]);
        let x = [1.0, -1.0];
        assert_eq!(a.transpose().mul_vec(&x), a.transpose_mul_vec(&x));
    }

    #[test]
    fn column_selection_and_stacking() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        let s = a.select_columns(&[2, 0]);
        assert_eq!(s.to_dense(), vec![vec![2.0, 1.0], vec![0.0, 0.0]]);
        let h = SparseMatrix::hstack(&[&s, &SparseMatrix::identity(2)]);
        assert_eq!(h.cols(), 4);
        assert_eq!(h.get(1, 3), 1.0);
    }
}
