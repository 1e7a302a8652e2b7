//! Compressed sparse row matrices over complex numbers.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<usize, C64>>,
}

impl TripletBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows],
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.rows && col < self.cols);
        *self.entries[row].entry(col).or_insert(C64::new(0.0, 0.0)) += value;
    }

    pub fn build(self) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in self.entries {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut b = TripletBuilder::new(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            b.add(i, i, *d);
        }
        b.build()
    }

    pub fn from_dense(m: &DMatrix<C64>, drop_below: f64) -> Self {
        let mut b = TripletBuilder::new(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.norm() > drop_below {
                    b.add(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries `(col, value)` of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i)
            .find(|(c, _)| *c == j)
            .map(|(_, v)| v)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            let mut acc = C64::new(0.0, 0.0);
            for (c, v) in self.row(i) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.apply(x, &mut y);
        y
    }

    /// `y += A x`.
    pub fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            for (c, v) in self.row(i) {
                *yi += v * x[c];
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut b = TripletBuilder::new(self.cols, self.rows);
        for i in 0..self.rows {
            for (c, v) in self.row(i) {
                b.add(c, i, v.conj());
            }
        }
        b.build()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut b = TripletBuilder::new(self.rows, self.cols);
        for m in [self, other] {
            for i in 0..m.rows {
                for (c, v) in m.row(i) {
                    b.add(i, c, v);
                }
            }
        }
        b.build()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut b = TripletBuilder::new(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, v) in self.row(i) {
                for (j, w) in other.row(k) {
                    b.add(i, j, v * w);
                }
            }
        }
        b.build()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.rows, self.cols, C64::new(0.0, 0.0));
        for i in 0..self.rows {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for (c, v) in self.row(i) {
                worst = worst.max((v - self.get(c, i).conj()).norm());
            }
        }
        worst
    }
}
