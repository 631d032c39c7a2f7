//! Configuration matrices of the supported models and their lattice bases.
//!
//! Cells are labelled with 1-based level tuples. Lawrence-type
//! configurations use slice-major cell order: the slice index is outermost and
//! the base configuration's cell order is kept inside each slice.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::intkernel::{rank, IntMatrix, LatticeBasis, Move};
use crate::{Error, Result};

/// A configuration matrix `A` together with labels for its columns (cells).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub matrix: IntMatrix,
    pub cells: Vec<Vec<usize>>,
    pub description: String,
}

impl Configuration {
    pub fn new(matrix: IntMatrix, cells: Vec<Vec<usize>>, description: impl Into<String>) -> Result<Self> {
        if matrix.cols() != cells.len() {
            return Err(Error::DimensionMismatch {
                what: "cell labels",
                expected: matrix.cols(),
                found: cells.len(),
            });
        }
        let mut seen = HashSet::with_capacity(cells.len());
        for c in &cells {
            if !seen.insert(c) {
                return Err(Error::invalid(format!("duplicate cell label {c:?}")));
            }
        }
        Ok(Configuration {
            matrix,
            cells,
            description: description.into(),
        })
    }

    /// Wraps a bare matrix, labelling cells `1..=cols`.
    pub fn from_matrix(matrix: IntMatrix, description: impl Into<String>) -> Self {
        let cells = (1..=matrix.cols()).map(|j| vec![j]).collect();
        Configuration {
            matrix,
            cells,
            description: description.into(),
        }
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn rank(&self) -> Result<usize> {
        rank(&self.matrix)
    }

    /// `dim ker A = cells - rank A`.
    pub fn kernel_dim(&self) -> Result<usize> {
        Ok(self.num_cells() - self.rank()?)
    }

    /// Sufficient statistic `t = A x`.
    pub fn statistic(&self, counts: &[i64]) -> Result<Vec<i64>> {
        self.matrix.mul_vec(counts)
    }
}

/// How a base lattice basis is lifted to the r-th Lawrence configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LiftStyle {
    /// `B` in slice `j`, `-B` in the last slice, for `j = 1..r-1`.
    #[default]
    LastSlicePivot,
    /// `B` in slice `j`, `-B` in slice `k`, for every pair `j < k`.
    PairwiseSymmetric,
}

impl FromStr for LiftStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "last-slice" | "last-slice-pivot" | "pivot" => Ok(LiftStyle::LastSlicePivot),
            "pairwise" | "pairwise-symmetric" | "symmetric" => Ok(LiftStyle::PairwiseSymmetric),
            other => Err(Error::invalid(format!("unknown lift style {other:?}"))),
        }
    }
}

impl fmt::Display for LiftStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftStyle::LastSlicePivot => "last-slice",
            LiftStyle::PairwiseSymmetric => "pairwise",
        })
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}

/// Two-way complete independence model on an `i1 x i2` table.
///
/// Cells `(a, b)` are row-major; rows are the `i1` row-margin indicators
/// followed by the `i2` column-margin indicators.
pub fn independence_config(i1: usize, i2: usize) -> Result<Configuration> {
    require(i1 >= 2 && i2 >= 2, || format!("independence model needs sizes >= 2, got {i1}x{i2}"))?;
    let n = i1 * i2;
    let mut m = IntMatrix::zeros(i1 + i2, n);
    let mut cells = Vec::with_capacity(n);
    for a in 0..i1 {
        for b in 0..i2 {
            let j = a * i2 + b;
            m.set(a, j, 1);
            m.set(i1 + b, j, 1);
            cells.push(vec![a + 1, b + 1]);
        }
    }
    Configuration::new(m, cells, format!("two-way independence {i1}x{i2}"))
}

/// The adjacent 2x2 basic moves of the independence model.
pub fn two_way_basic_moves(i1: usize, i2: usize) -> Result<LatticeBasis> {
    require(i1 >= 2 && i2 >= 2, || format!("basic moves need sizes >= 2, got {i1}x{i2}"))?;
    let n = i1 * i2;
    let mut moves = Vec::with_capacity((i1 - 1) * (i2 - 1));
    for a in 0..i1 - 1 {
        for b in 0..i2 - 1 {
            let mut z = vec![0; n];
            z[a * i2 + b] = 1;
            z[(a + 1) * i2 + b + 1] = 1;
            z[a * i2 + b + 1] = -1;
            z[(a + 1) * i2 + b] = -1;
            moves.push(Move::new(z));
        }
    }
    LatticeBasis::new(n, moves)
}

/// Lawrence lifting `(A 0; I I)`.
pub fn lawrence(a: &Configuration) -> Result<Configuration> {
    lawrence_r(a, 2)
}

/// The r-th Lawrence configuration: `r - 1` diagonal copies of `A` over a
/// zero final block, with a band of `r` identity blocks underneath.
///
/// Cell labels are the base labels with the 1-based slice index appended.
pub fn lawrence_r(a: &Configuration, r: usize) -> Result<Configuration> {
    require(r >= 2, || format!("Lawrence lifting needs r >= 2, got {r}"))?;
    let (m, n) = (a.matrix.rows(), a.matrix.cols());
    let mut lifted = IntMatrix::zeros((r - 1) * m + n, r * n);
    for s in 0..r - 1 {
        for i in 0..m {
            for j in 0..n {
                lifted.set(s * m + i, s * n + j, a.matrix.get(i, j));
            }
        }
    }
    for s in 0..r {
        for j in 0..n {
            lifted.set((r - 1) * m + j, s * n + j, 1);
        }
    }
    let cells = (1..=r)
        .flat_map(|s| {
            a.cells.iter().map(move |c| {
                let mut label = c.clone();
                label.push(s);
                label
            })
        })
        .collect();
    Configuration::new(lifted, cells, format!("{}-th Lawrence lifting of {}", r, a.description))
}

/// Lifts a lattice basis of `A` to one of `lawrence_r(A, r)`.
///
/// [`LiftStyle::LastSlicePivot`] yields `(r - 1) |B|` moves,
/// [`LiftStyle::PairwiseSymmetric`] yields `|B| r (r - 1) / 2` moves. Fails
/// with [`Error::NotInKernel`] when `basis` is not inside `ker A`.
pub fn lift_lattice_basis(
    base: &Configuration,
    basis: &LatticeBasis,
    r: usize,
    style: LiftStyle,
) -> Result<LatticeBasis> {
    require(r >= 2, || format!("lifting needs r >= 2, got {r}"))?;
    basis.check_kernel(&base.matrix)?;
    let n = basis.cells();
    let place = |z: &Move, plus: usize, minus: usize| {
        let mut v = vec![0; r * n];
        for (i, &x) in z.as_slice().iter().enumerate() {
            v[plus * n + i] = x;
            v[minus * n + i] = -x;
        }
        Move::new(v)
    };
    let pairs: Vec<(usize, usize)> = match style {
        LiftStyle::LastSlicePivot => (0..r - 1).map(|j| (j, r - 1)).collect(),
        LiftStyle::PairwiseSymmetric => (0..r)
            .flat_map(|j| (j + 1..r).map(move |k| (j, k)))
            .collect(),
    };
    let moves = pairs
        .iter()
        .flat_map(|&(j, k)| basis.moves().iter().map(move |z| place(z, j, k)))
        .collect();
    LatticeBasis::new(r * n, moves)
}

/// No-three-factor interaction model on an `i1 x i2 x i3` table, as the
/// `i3`-th Lawrence lifting of the `i1 x i2` independence model. Cells are
/// labelled `(i1, i2, i3)` with `i3` outermost in the column order.
pub fn no_three_factor_config(i1: usize, i2: usize, i3: usize) -> Result<Configuration> {
    require(i1 >= 2 && i2 >= 2 && i3 >= 2, || {
        format!("no-three-factor model needs sizes >= 2, got {i1}x{i2}x{i3}")
    })?;
    let mut c = lawrence_r(&independence_config(i1, i2)?, i3)?;
    c.description = format!("no-three-factor interaction {i1}x{i2}x{i3}");
    Ok(c)
}

/// Degree-four lattice basis of the no-three-factor model, lifted from the
/// two-way basic moves.
pub fn no_three_factor_lattice_basis(
    i1: usize,
    i2: usize,
    i3: usize,
    style: LiftStyle,
) -> Result<LatticeBasis> {
    let base = independence_config(i1, i2)?;
    lift_lattice_basis(&base, &two_way_basic_moves(i1, i2)?, i3, style)
}

/// Which parity class of `(i2 + i3)` carries support in a checkered design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

/// Covariate design: distinct points, each coordinate a level in `1..=levels[axis]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    points: Vec<Vec<usize>>,
    levels: Vec<usize>,
}

impl Design {
    pub fn new(points: Vec<Vec<usize>>, levels: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.len() != levels.len() {
                return Err(Error::DimensionMismatch {
                    what: "design point arity",
                    expected: levels.len(),
                    found: p.len(),
                });
            }
            if p.iter().zip(&levels).any(|(&v, &l)| v == 0 || v > l) {
                return Err(Error::invalid(format!("design point {p:?} outside levels {levels:?}")));
            }
            if !seen.insert(p) {
                return Err(Error::invalid(format!("duplicate design point {p:?}")));
            }
        }
        Ok(Design { points, levels })
    }

    /// Builds a design whose axis ranges are the per-axis maxima of the points.
    pub fn from_points(points: Vec<Vec<usize>>) -> Result<Self> {
        let arity = points.first().map_or(0, Vec::len);
        let levels = (0..arity)
            .map(|a| points.iter().filter_map(|p| p.get(a)).copied().max().unwrap_or(0))
            .collect();
        Design::new(points, levels)
    }

    /// Full factorial design over the given axis sizes, lexicographic order.
    pub fn full(levels: &[usize]) -> Result<Self> {
        let mut points = vec![Vec::new()];
        for &l in levels {
            points = points
                .into_iter()
                .flat_map(|p| {
                    (1..=l).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        Design::new(points, levels.to_vec())
    }

    pub fn points(&self) -> &[Vec<usize>] {
        &self.points
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn axes(&self) -> usize {
        self.levels.len()
    }
}

/// Checkered `i2 x i3` design keeping the points with `(i2 + i3)` even,
/// optionally crossed with an extra covariate axis of `extra_levels` levels.
pub fn checkered_design(i2: usize, i3: usize, extra_levels: Option<usize>) -> Result<Design> {
    checkered_design_with_parity(i2, i3, extra_levels, Parity::Even)
}

pub fn checkered_design_with_parity(
    i2: usize,
    i3: usize,
    extra_levels: Option<usize>,
    parity: Parity,
) -> Result<Design> {
    require(i2 >= 2 && i3 >= 2, || format!("checkered design needs sizes >= 2, got {i2}x{i3}"))?;
    let want = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let extra: Vec<Option<usize>> = match extra_levels {
        Some(l) => {
            require(l >= 1, || "extra axis needs at least one level".into())?;
            (1..=l).map(Some).collect()
        }
        None => vec![None],
    };
    let mut points = Vec::new();
    for a in 1..=i2 {
        for b in 1..=i3 {
            if (a + b) % 2 != want {
                continue;
            }
            for e in &extra {
                let mut p = vec![a, b];
                p.extend(e);
                points.push(p);
            }
        }
    }
    let mut levels = vec![i2, i3];
    levels.extend(extra_levels);
    Design::new(points, levels)
}

/// Poisson regression with an intercept and a linear term for each listed
/// covariate axis; columns follow the design's point order and levels are
/// coded by their value `1..=I`.
pub fn poisson_regression_config(design: &Design, covariates: &[usize]) -> Result<Configuration> {
    require(!design.is_empty(), || "design has no points".into())?;
    for &c in covariates {
        require(c < design.axes(), || format!("covariate axis {c} out of range"))?;
    }
    let n = design.len();
    let mut m = IntMatrix::zeros(1 + covariates.len(), n);
    for (j, p) in design.points().iter().enumerate() {
        m.set(0, j, 1);
        for (r, &c) in covariates.iter().enumerate() {
            m.set(1 + r, j, p[c] as i64);
        }
    }
    Configuration::new(
        m,
        design.points().to_vec(),
        format!("Poisson regression on covariates {covariates:?}"),
    )
}

/// Logistic regression with `responses` outcome levels: the r-th Lawrence
/// lifting of the Poisson regression configuration. Cells are labelled
/// `(response, point...)`, response outermost.
pub fn logistic_config(design: &Design, covariates: &[usize], responses: usize) -> Result<Configuration> {
    let base = poisson_regression_config(design, covariates)?;
    let mut c = lawrence_r(&base, responses)?;
    c.cells = c
        .cells
        .into_iter()
        .map(|mut label| {
            let slice = label.pop().expect("slice index");
            let mut out = vec![slice];
            out.extend(label);
            out
        })
        .collect();
    c.description = format!("logistic regression, {responses} responses, covariates {covariates:?}");
    Ok(c)
}

/// Lattice basis for [`logistic_config`]: the kernel basis of the Poisson
/// regression configuration, lifted.
pub fn logistic_lattice_basis(
    design: &Design,
    covariates: &[usize],
    responses: usize,
    style: LiftStyle,
) -> Result<LatticeBasis> {
    let base = poisson_regression_config(design, covariates)?;
    let b = crate::intkernel::kernel_lattice_basis(&base.matrix)?;
    lift_lattice_basis(&base, &b, responses, style)
}
