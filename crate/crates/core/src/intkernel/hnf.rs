use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use super::IntMatrix;
use crate::{Error, Result};

/// Column-style Hermite normal form `M U = H`.
///
/// `H` is in column echelon form: its first `rank` columns are nonzero, the
/// pivot of column `k` sits at row `pivots[k]`, every pivot is positive, each
/// column is zero above its pivot, and the entries to the left of a pivot are
/// reduced into `[0, pivot)`. The remaining columns of `H` are zero, so the
/// matching columns of the unimodular `U` form a basis of the integer kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot row of each nonzero column of `h`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Scalars the reduction can run over: checked `i64` first, `BigInt` on overflow.
pub(crate) trait ExactInt:
    Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + FromPrimitive + ToPrimitive
{
    fn checked_magnitude(&self) -> Option<Self>;
}

impl ExactInt for i64 {
    fn checked_magnitude(&self) -> Option<Self> {
        self.checked_abs()
    }
}

impl ExactInt for BigInt {
    fn checked_magnitude(&self) -> Option<Self> {
        Some(self.abs())
    }
}

/// `dst -= q * src`, `None` on overflow.
fn sub_multiple<T: ExactInt>(dst: &mut [T], src: &[T], q: &T) -> Option<()> {
    for (d, s) in dst.iter_mut().zip(src) {
        if s.is_zero() {
            continue;
        }
        let prod = s.checked_mul(q)?;
        *d = d.checked_sub(&prod)?;
    }
    Some(())
}

fn negate<T: ExactInt>(col: &mut [T]) -> Option<()> {
    for v in col.iter_mut() {
        *v = T::zero().checked_sub(v)?;
    }
    Some(())
}

struct Columns<T> {
    h: Vec<Vec<T>>,
    u: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: ExactInt> Columns<T> {
    /// `col[k] -= q * col[c]` in both H and U.
    fn eliminate(&mut self, k: usize, c: usize, q: &T) -> Option<()> {
        let hc = self.h[c].clone();
        sub_multiple(&mut self.h[k], &hc, q)?;
        let uc = self.u[c].clone();
        sub_multiple(&mut self.u[k], &uc, q)
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.h.swap(a, b);
        self.u.swap(a, b);
    }
}

fn reduce<T: ExactInt>(m: &IntMatrix) -> Option<Columns<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    let h: Vec<Vec<T>> = (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| T::from_i64(m.get(i, j)).expect("i64 fits"))
                .collect()
        })
        .collect();
    let u: Vec<Vec<T>> = (0..cols)
        .map(|j| {
            (0..cols)
                .map(|i| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let mut st = Columns {
        h,
        u,
        pivots: Vec::new(),
    };

    let mut c = 0;
    for i in 0..rows {
        if c == cols {
            break;
        }
        // Euclid across columns: keep the smallest entry of row i in column c
        // and reduce the others modulo it until only column c is nonzero.
        loop {
            let mut best: Option<(usize, T)> = None;
            for k in c..cols {
                if st.h[k][i].is_zero() {
                    continue;
                }
                let mag = st.h[k][i].checked_magnitude()?;
                if best.as_ref().is_none_or(|(_, b)| mag < *b) {
                    best = Some((k, mag));
                }
            }
            let Some((best, _)) = best else { break };
            st.swap(c, best);
            let mut done = true;
            for k in c + 1..cols {
                if st.h[k][i].is_zero() {
                    continue;
                }
                let q = st.h[k][i].div_floor(&st.h[c][i]);
                st.eliminate(k, c, &q)?;
                if !st.h[k][i].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if st.h.get(c).is_none_or(|col| col[i].is_zero()) {
            continue;
        }
        if st.h[c][i].is_negative() {
            negate(&mut st.h[c])?;
            negate(&mut st.u[c])?;
        }
        for j in 0..c {
            let q = st.h[j][i].div_floor(&st.h[c][i]);
            if !q.is_zero() {
                st.eliminate(j, c, &q)?;
            }
        }
        st.pivots.push(i);
        c += 1;
    }
    Some(st)
}

fn to_matrix<T: ExactInt>(rows: usize, columns: &[Vec<T>]) -> Result<IntMatrix> {
    let cols: Option<Vec<Vec<i64>>> = columns
        .iter()
        .map(|col| col.iter().map(ToPrimitive::to_i64).collect())
        .collect();
    let cols = cols.ok_or(Error::Overflow("Hermite normal form"))?;
    IntMatrix::from_columns(rows, &cols)
}

/// Computes the column Hermite normal form of `m`.
///
/// The reduction runs in checked `i64` and is redone in arbitrary precision
/// if an intermediate value overflows; only a result that does not fit back
/// into `i64` is reported as [`Error::Overflow`].
pub fn hermite_normal_form(m: &IntMatrix) -> Result<HermiteForm> {
    if let Some(st) = reduce::<i64>(m) {
        return Ok(HermiteForm {
            h: to_matrix(m.rows(), &st.h)?,
            u: to_matrix(m.cols(), &st.u)?,
            pivots: st.pivots,
        });
    }
    let st = reduce::<BigInt>(m).expect("arbitrary precision never overflows");
    Ok(HermiteForm {
        h: to_matrix(m.rows(), &st.h)?,
        u: to_matrix(m.cols(), &st.u)?,
        pivots: st.pivots,
    })
}

/// Rank over the rationals, read off the pivot count of the Hermite form.
pub fn rank(m: &IntMatrix) -> Result<usize> {
    Ok(hermite_normal_form(m)?.rank())
}
