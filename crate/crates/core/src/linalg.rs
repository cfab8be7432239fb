//! Minimal dense kernels for the recurrent baseline and preprocessing.
//!
//! Row-major `f64` matrices and a few hot routines written with four-way
//! accumulators so the compiler can vectorize the reductions.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Borrow a contiguous block of rows `[r0, r1)`.
    pub fn row_range(&self, r0: usize, r1: usize) -> MatView<'_> {
        assert!(r0 <= r1 && r1 <= self.rows);
        MatView {
            rows: r1 - r0,
            cols: self.cols,
            data: &self.data[r0 * self.cols..r1 * self.cols],
        }
    }

    pub fn view(&self) -> MatView<'_> {
        self.row_range(0, self.rows)
    }
}

/// Borrowed block of matrix rows.
#[derive(Debug, Clone, Copy)]
pub struct MatView<'a> {
    rows: usize,
    cols: usize,
    data: &'a [f64],
}

impl<'a> MatView<'a> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Dot product with four independent accumulators.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = k * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out = M x` (rows of `m` dotted with `x`).
pub fn matvec(m: &Mat, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(m.cols, x.len());
    debug_assert_eq!(m.rows, out.len());
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(m.row(i), x);
    }
}

/// `out = v^T M` without materializing a transpose.
pub fn vec_mat(v: &[f64], m: &Mat, out: &mut [f64]) {
    debug_assert_eq!(m.rows, v.len());
    debug_assert_eq!(m.cols, out.len());
    out.fill(0.0);
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            axpy(vi, m.row(i), out);
        }
    }
}
