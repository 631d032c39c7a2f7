use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{hermite_normal_form, HermiteForm, IntMatrix};
use crate::{Error, Result};

/// An integer vector over the cells of a configuration, usually an element of `ker_Z A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move(Vec<i64>);

impl Move {
    pub fn new(entries: Vec<i64>) -> Self {
        Move(entries)
    }

    pub fn zero(cells: usize) -> Self {
        Move(vec![0; cells])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `z+`, with `z+(i) = max(z(i), 0)`.
    pub fn positive_part(&self) -> Vec<i64> {
        self.0.iter().map(|&v| v.max(0)).collect()
    }

    /// `z-`, with `z-(i) = max(-z(i), 0)`.
    pub fn negative_part(&self) -> Vec<i64> {
        self.0.iter().map(|&v| (-v).max(0)).collect()
    }

    /// `max(sum z+, sum z-)`; both sums agree for homogeneous configurations.
    pub fn degree(&self) -> i64 {
        let pos: i64 = self.0.iter().filter(|&&v| v > 0).sum();
        let neg: i64 = self.0.iter().filter(|&&v| v < 0).map(|&v| -v).sum();
        pos.max(neg)
    }

    /// Nonzero entries as `(cell, value)` pairs.
    pub fn support(&self) -> Vec<(usize, i64)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i, v))
            .collect()
    }

    pub fn negated(&self) -> Move {
        Move(self.0.iter().map(|&v| -v).collect())
    }

    /// Flips the sign so that the first nonzero entry is positive.
    pub fn normalized(self) -> Move {
        match self.0.iter().find(|&&v| v != 0) {
            Some(&v) if v < 0 => self.negated(),
            _ => self,
        }
    }
}

impl From<Vec<i64>> for Move {
    fn from(v: Vec<i64>) -> Self {
        Move(v)
    }
}

/// A finite generating set of `ker_Z A`; redundant elements are allowed.
///
/// The sparse view of every move is cached at construction, so composing
/// integer combinations costs time proportional to the moves' supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    cells: usize,
    moves: Vec<Move>,
    sparse: Vec<Vec<(usize, i64)>>,
}

impl LatticeBasis {
    pub fn new(cells: usize, moves: Vec<Move>) -> Result<Self> {
        for m in &moves {
            if m.len() != cells {
                return Err(Error::DimensionMismatch {
                    what: "lattice basis move",
                    expected: cells,
                    found: m.len(),
                });
            }
        }
        let sparse = moves.iter().map(Move::support).collect();
        Ok(LatticeBasis {
            cells,
            moves,
            sparse,
        })
    }

    pub fn empty(cells: usize) -> Self {
        LatticeBasis {
            cells,
            moves: Vec::new(),
            sparse: Vec::new(),
        }
    }

    /// Number of cells every move is defined over.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn sparse(&self, k: usize) -> &[(usize, i64)] {
        &self.sparse[k]
    }

    /// The `cells x len()` matrix with the moves as columns.
    pub fn to_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<i64>> = self.moves.iter().map(|m| m.as_slice().to_vec()).collect();
        IntMatrix::from_columns(self.cells, &cols).expect("moves share the cell dimension")
    }

    /// Dimension of the real span of the moves; equals `dim ker A` when the set spans `ker_Z A`.
    pub fn rank(&self) -> Result<usize> {
        if self.moves.is_empty() {
            return Ok(0);
        }
        super::rank(&self.to_matrix())
    }

    /// Fails with [`Error::NotInKernel`] on the first move with `A z != 0`.
    pub fn check_kernel(&self, a: &IntMatrix) -> Result<()> {
        if a.cols() != self.cells {
            return Err(Error::DimensionMismatch {
                what: "configuration columns",
                expected: self.cells,
                found: a.cols(),
            });
        }
        for (index, m) in self.moves.iter().enumerate() {
            if !a.annihilates(m.as_slice())? {
                return Err(Error::NotInKernel { index });
            }
        }
        Ok(())
    }

    /// Builds a reusable solver for integer-combination queries against this set.
    pub fn solver(&self) -> Result<CombinationSolver> {
        CombinationSolver::new(self)
    }
}

/// Integer kernel basis read off the Hermite normal form of `a`.
///
/// Returns exactly `cols - rank` moves; every integer kernel vector is a
/// unique integer combination of them. Each move is normalized so that its
/// first nonzero entry is positive, and moves keep the column order of `U`.
pub fn kernel_lattice_basis(a: &IntMatrix) -> Result<LatticeBasis> {
    let hf = hermite_normal_form(a)?;
    let moves = (hf.rank()..a.cols())
        .map(|j| Move::new(hf.u.column(j)).normalized())
        .collect();
    LatticeBasis::new(a.cols(), moves)
}

/// Solves `sum_k alpha_k z_k = z` over the integers for a fixed generating set.
#[derive(Clone, Debug)]
pub struct CombinationSolver {
    cells: usize,
    moves: usize,
    hf: HermiteForm,
}

impl CombinationSolver {
    pub fn new(basis: &LatticeBasis) -> Result<Self> {
        let hf = if basis.is_empty() {
            HermiteForm {
                h: IntMatrix::zeros(basis.cells(), 0),
                u: IntMatrix::zeros(0, 0),
                pivots: Vec::new(),
            }
        } else {
            hermite_normal_form(&basis.to_matrix())?
        };
        Ok(CombinationSolver {
            cells: basis.cells(),
            moves: basis.len(),
            hf,
        })
    }

    /// Integer coefficients reproducing `z`, or `None` when `z` is outside the lattice.
    ///
    /// For a redundant set the coefficients along the set's own relations are
    /// chosen as zero; for a non-redundant set the answer is unique.
    pub fn solve(&self, z: &[i64]) -> Result<Option<Vec<i64>>> {
        if z.len() != self.cells {
            return Err(Error::DimensionMismatch {
                what: "integer combination target",
                expected: self.cells,
                found: z.len(),
            });
        }
        let h = &self.hf.h;
        let rank = self.hf.rank();
        let mut y: Vec<BigInt> = Vec::with_capacity(rank);
        for (k, &p) in self.hf.pivots.iter().enumerate() {
            let mut rest = BigInt::from(z[p]);
            for (j, yj) in y.iter().enumerate() {
                rest -= yj * h.get(p, j);
            }
            let (q, r) = rest.div_rem(&BigInt::from(h.get(p, k)));
            if !r.is_zero() {
                return Ok(None);
            }
            y.push(q);
        }
        for (i, &zi) in z.iter().enumerate() {
            let mut acc = BigInt::zero();
            for (j, yj) in y.iter().enumerate() {
                acc += yj * h.get(i, j);
            }
            if acc != BigInt::from(zi) {
                return Ok(None);
            }
        }
        (0..self.moves)
            .map(|k| {
                let mut acc = BigInt::zero();
                for (j, yj) in y.iter().enumerate() {
                    acc += yj * self.hf.u.get(k, j);
                }
                acc.to_i64().ok_or(Error::Overflow("integer combination"))
            })
            .collect::<Result<Vec<i64>>>()
            .map(Some)
    }
}

/// One-shot form of [`CombinationSolver::solve`].
pub fn is_integer_combination(z: &Move, basis: &LatticeBasis) -> Result<Option<Vec<i64>>> {
    basis.solver()?.solve(z.as_slice())
}
