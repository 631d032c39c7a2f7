use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Dense integer matrix stored row-major.
///
/// All arithmetic is overflow-checked: products and sums that leave the `i64`
/// range surface as [`Error::Overflow`] instead of wrapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::DimensionMismatch {
                what: "matrix entries",
                expected: rows.saturating_mul(cols),
                found: data.len(),
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from equally long rows. An empty slice gives a `0 x 0` matrix.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        IntMatrix::new(rows.len(), cols, data)
    }

    /// Builds a `rows x columns.len()` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        let mut m = IntMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    what: "matrix column",
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// Returns the matrix with rows reordered so that row `k` of the result is row `order[k]`.
    pub fn select_rows(&self, order: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(order.len() * self.cols);
        for &i in order {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix {
            rows: order.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a
                        .checked_mul(other.get(k, j))
                        .ok_or(Error::Overflow("matrix product"))?;
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = slot
                        .checked_add(prod)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&a, &x)| {
                    a.checked_mul(x)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow("matrix-vector product"))
                })
            })
            .collect()
    }

    /// `true` when `A v = 0`.
    pub fn annihilates(&self, v: &[i64]) -> Result<bool> {
        Ok(self.mul_vec(v)?.iter().all(|&x| x == 0))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::invalid("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| self.row(i).iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            return Ok(BigInt::one());
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// `true` when the matrix is square with determinant `+1` or `-1`.
    pub fn is_unimodular(&self) -> Result<bool> {
        Ok(self.rows == self.cols && self.determinant()?.abs().is_one())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
