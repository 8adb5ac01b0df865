//! Dense matrices, cut rectangles and the exhaustive cut norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::Tournament;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// `A(i, j) = W(v_i, v_j) - W(v_j, v_i)` over the listed vertices.
    pub fn signed_comparison(t: &Tournament, vertices: &[usize]) -> Self {
        let n = vertices.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else if t.beats(vertices[i], vertices[j]) {
                1.0
            } else {
                -1.0
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `W(S, T)`.
    pub fn block_sum(&self, rows: &[usize], cols: &[usize]) -> f64 {
        rows.iter().map(|&i| cols.iter().map(|&j| self.get(i, j)).sum::<f64>()).sum()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub(crate) fn subtract_cut(&mut self, r: &CutRectangle) {
        for &i in &r.rows {
            for &j in &r.cols {
                self.data[i * self.cols + j] -= r.density;
            }
        }
    }
}

/// `Cut(S, T, d)`: value `d` on `S × T`, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutRectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub density: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CutDecomposition {
    pub rows: usize,
    pub cols: usize,
    pub rectangles: Vec<CutRectangle>,
}

impl CutDecomposition {
    pub fn new(rows: usize, cols: usize) -> Self {
        CutDecomposition { rows, cols, rectangles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    /// `D(1) + … + D(t)` as a dense matrix.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for r in &self.rectangles {
            for &i in &r.rows {
                for &j in &r.cols {
                    m.data[i * self.cols + j] += r.density;
                }
            }
        }
        m
    }

    pub fn residual(&self, a: &Matrix) -> Matrix {
        a.sub(&self.to_matrix())
    }

    /// Debug dump: a JSON list of `{rows, cols, density}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rectangles).expect("rectangles serialize")
    }
}

pub const CUT_NORM_CAP: usize = 14;

/// `max_{S,T} |B(S, T)|` by enumerating row subsets; for a fixed `S` the best
/// `T` takes every column of one sign.
pub fn cut_norm_exhaustive(b: &Matrix) -> Result<f64> {
    let (m, n) = (b.rows(), b.cols());
    for (what, got) in [("cut norm rows", m), ("cut norm cols", n)] {
        if got > CUT_NORM_CAP {
            return Err(Error::TooLarge { what, cap: CUT_NORM_CAP, got });
        }
    }
    let mut best = 0.0f64;
    let mut colsum = vec![0.0; n];
    // Gray-code walk over row subsets
    for k in 1u32..(1u32 << m) {
        let i = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let sign = if gray >> i & 1 == 1 { 1.0 } else { -1.0 };
        for (c, x) in colsum.iter_mut().zip(b.row(i)) {
            *c += sign * x;
        }
        let (pos, neg) = colsum.iter().fold((0.0, 0.0), |(p, q), &c| {
            if c > 0.0 {
                (p + c, q)
            } else {
                (p, q - c)
            }
        });
        best = best.max(pos).max(neg);
    }
    Ok(best)
}
