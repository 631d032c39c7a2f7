//! Maximum likelihood fitting of toric (log-linear) models.
//!
//! The Poisson log-likelihood `t·θ - Σ exp(a_i·θ)` is maximized by damped
//! Newton steps. `θ` lives on a maximal independent subset of the rows of
//! `A`, which spans the row space, so the Hessian `A diag(m) Aᵀ` restricted
//! to those rows is positive definite.

use nalgebra::{DMatrix, DVector};

use crate::configurations::Configuration;
use crate::intkernel::IntMatrix;
use crate::sampler::SufficientStatistic;
use crate::{Error, Result};

/// Options for [`ToricModel::fit`].
#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Bound on `‖A m - t‖∞ / max(1, ‖t‖∞)`.
    pub tolerance: f64,
    /// Fit on the cells left after removing those forced to zero by a
    /// nonnegative row with zero total, instead of failing with
    /// [`Error::Boundary`].
    pub allow_structural_zeros: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            tolerance: 1e-8,
            allow_structural_zeros: false,
        }
    }
}

/// Fitted means of a toric model for one sufficient statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    pub fitted_means: Vec<f64>,
    /// Natural parameters, one per row of `A`; rows outside the chosen
    /// independent subset carry zero.
    pub theta: Vec<f64>,
    pub iterations: usize,
    /// Final `‖A m - t‖∞ / max(1, ‖t‖∞)`.
    pub residual: f64,
    /// Cells fixed at zero by the statistic (empty unless allowed).
    pub structural_zeros: Vec<usize>,
    /// Rank of `A` restricted to the cells outside `structural_zeros`.
    pub rank: usize,
}

impl FittedModel {
    /// Dimension of the fiber's lattice, `cells - rank` on the fitted support.
    pub fn kernel_dim(&self) -> usize {
        self.fitted_means.len() - self.structural_zeros.len() - self.rank
    }
}

/// Reusable fitting problem for one configuration.
#[derive(Clone, Debug)]
pub struct ToricModel {
    matrix: IntMatrix,
    basis_rows: Vec<usize>,
}

const MERSENNE_61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MERSENNE_61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

/// Greedy maximal set of rows of `a` (restricted to `cells`) that are
/// linearly independent modulo `2^61 - 1`.
///
/// Independence modulo a prime implies independence over the rationals, so
/// the selected rows are always a valid parameterization; a selection that
/// misses part of the row space shows up as a residual that will not vanish.
fn independent_rows(a: &IntMatrix, cells: &[usize]) -> Vec<usize> {
    let reduce = |v: i64| v.rem_euclid(MERSENNE_61 as i64) as u64;
    // echelon rows with their pivot column (pivot normalized to 1)
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..a.rows() {
        let mut v: Vec<u64> = cells.iter().map(|&j| reduce(a.get(i, j))).collect();
        for (p, row) in &echelon {
            let f = v[*p];
            if f == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = (*x + MERSENNE_61 - mulmod(f, y)) % MERSENNE_61;
                }
            }
        }
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[p], MERSENNE_61 - 2);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv);
            }
            echelon.push((p, v));
            chosen.push(i);
        }
    }
    chosen
}

/// Rows whose entries are all nonnegative and not all zero.
fn nonnegative_rows(a: &IntMatrix) -> Vec<usize> {
    (0..a.rows())
        .filter(|&i| a.row(i).iter().all(|&v| v >= 0) && a.row(i).iter().any(|&v| v > 0))
        .collect()
}

impl ToricModel {
    pub fn new(config: &Configuration) -> Self {
        ToricModel::from_matrix(config.matrix.clone())
    }

    pub fn from_matrix(matrix: IntMatrix) -> Self {
        let all: Vec<usize> = (0..matrix.cols()).collect();
        let basis_rows = independent_rows(&matrix, &all);
        ToricModel { matrix, basis_rows }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Number of free natural parameters, i.e. `rank A`.
    pub fn dimension(&self) -> usize {
        self.basis_rows.len()
    }

    /// Fits the model to `t`, optionally starting from a previous `theta`.
    pub fn fit(&self, t: &[i64], warm_start: Option<&[f64]>, opts: &FitOptions) -> Result<FittedModel> {
        let a = &self.matrix;
        if t.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                what: "sufficient statistic",
                expected: a.rows(),
                found: t.len(),
            });
        }
        let mut boundary_rows = Vec::new();
        let mut zero_cells = vec![false; a.cols()];
        for i in nonnegative_rows(a) {
            if t[i] < 0 {
                return Err(Error::invalid(format!("negative total {} on nonnegative row {i}", t[i])));
            }
            if t[i] == 0 {
                boundary_rows.push(i);
                for (j, &v) in a.row(i).iter().enumerate() {
                    if v > 0 {
                        zero_cells[j] = true;
                    }
                }
            }
        }
        if !boundary_rows.is_empty() && !opts.allow_structural_zeros {
            return Err(Error::Boundary { rows: boundary_rows });
        }
        let cells: Vec<usize> = (0..a.cols()).filter(|&j| !zero_cells[j]).collect();
        if cells.is_empty() {
            return Err(Error::Boundary { rows: boundary_rows });
        }
        let rows = if boundary_rows.is_empty() {
            self.basis_rows.clone()
        } else {
            independent_rows(a, &cells)
        };
        let structural_zeros: Vec<usize> = (0..a.cols()).filter(|&j| zero_cells[j]).collect();

        // sparse columns over the reduced rows
        let columns: Vec<Vec<(usize, f64)>> = cells
            .iter()
            .map(|&j| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, &i)| a.get(i, j) != 0)
                    .map(|(k, &i)| (k, a.get(i, j) as f64))
                    .collect()
            })
            .collect();
        let target: Vec<f64> = rows.iter().map(|&i| t[i] as f64).collect();
        let scale = t.iter().map(|v| v.abs()).max().unwrap_or(0).max(1) as f64;

        let p = rows.len();
        let mut theta = DVector::<f64>::zeros(p);
        if let Some(w) = warm_start {
            if w.len() == a.rows() {
                for (k, &i) in rows.iter().enumerate() {
                    theta[k] = w[i];
                }
            }
        }

        let eta = |theta: &DVector<f64>| -> Vec<f64> {
            columns
                .iter()
                .map(|col| col.iter().map(|&(k, v)| v * theta[k]).sum())
                .collect()
        };
        let objective = |theta: &DVector<f64>, eta: &[f64]| -> f64 {
            let mass: f64 = eta.iter().map(|e| e.exp()).sum();
            mass - target.iter().zip(theta.iter()).map(|(t, th)| t * th).sum::<f64>()
        };
        let full_residual = |means: &[f64]| -> f64 {
            let mut worst: f64 = 0.0;
            for i in 0..a.rows() {
                let fitted: f64 = cells.iter().zip(means).map(|(&j, m)| a.get(i, j) as f64 * m).sum();
                worst = worst.max((fitted - t[i] as f64).abs());
            }
            worst / scale
        };

        let mut cur_eta = eta(&theta);
        let mut cur_obj = objective(&theta, &cur_eta);
        let mut iterations = 0;
        // once within tolerance, a few extra Newton steps tighten the means
        // themselves, which converge no faster than the residual
        let mut polish = 0;
        let mut previous = f64::INFINITY;
        loop {
            let means: Vec<f64> = cur_eta.iter().map(|e| e.exp()).collect();
            let residual = full_residual(&means);
            if residual.is_finite() && residual <= opts.tolerance {
                let stalled = residual > 0.5 * previous;
                if polish == 3 || stalled || residual <= opts.tolerance * 1e-6 {
                    return Ok(self.finish(&rows, &cells, &means, &theta, iterations, residual, structural_zeros));
                }
                polish += 1;
            }
            previous = residual;
            if iterations >= opts.max_iterations {
                return Err(Error::NonConvergence { iterations, residual });
            }
            iterations += 1;

            let mut grad = DVector::<f64>::zeros(p);
            let mut hess = DMatrix::<f64>::zeros(p, p);
            for (col, &m) in columns.iter().zip(&means) {
                for &(k, v) in col {
                    grad[k] += v * m;
                    for &(l, w) in col {
                        hess[(k, l)] += v * w * m;
                    }
                }
            }
            for k in 0..p {
                grad[k] = target[k] - grad[k];
            }
            let step = solve_spd(hess, &grad).ok_or(Error::NonConvergence { iterations, residual })?;
            let slope = grad.dot(&step);

            let mut s = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = &theta + &step * s;
                let trial_eta = eta(&trial);
                let trial_obj = objective(&trial, &trial_eta);
                if trial_obj.is_finite() && trial_obj <= cur_obj - 1e-4 * s * slope {
                    theta = trial;
                    cur_eta = trial_eta;
                    cur_obj = trial_obj;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if !accepted {
                // no further decrease is representable; accept only if already converged
                let means: Vec<f64> = cur_eta.iter().map(|e| e.exp()).collect();
                let residual = full_residual(&means);
                if residual <= opts.tolerance {
                    return Ok(self.finish(&rows, &cells, &means, &theta, iterations, residual, structural_zeros));
                }
                return Err(Error::NonConvergence { iterations, residual });
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        rows: &[usize],
        cells: &[usize],
        means: &[f64],
        theta: &DVector<f64>,
        iterations: usize,
        residual: f64,
        structural_zeros: Vec<usize>,
    ) -> FittedModel {
        let mut fitted_means = vec![0.0; self.matrix.cols()];
        for (&j, &m) in cells.iter().zip(means) {
            fitted_means[j] = m;
        }
        let mut full_theta = vec![0.0; self.matrix.rows()];
        for (k, &i) in rows.iter().enumerate() {
            full_theta[i] = theta[k];
        }
        FittedModel {
            fitted_means,
            theta: full_theta,
            iterations,
            residual,
            structural_zeros,
            rank: rows.len(),
        }
    }
}

/// Solves `H x = g` for symmetric positive (semi)definite `H`, adding a
/// small ridge if the plain Cholesky factorization breaks down.
fn solve_spd(hess: DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = hess.clone().cholesky() {
        return Some(ch.solve(grad));
    }
    let scale = hess.diagonal().amax().max(1e-300);
    let mut ridge = 1e-12 * scale;
    for _ in 0..8 {
        let mut h = hess.clone();
        for k in 0..h.nrows() {
            h[(k, k)] += ridge;
        }
        if let Some(ch) = h.cholesky() {
            return Some(ch.solve(grad));
        }
        ridge *= 100.0;
    }
    None
}

/// Maximum likelihood fit of the toric model of `config` to `t`.
///
/// A statistic on the boundary (a nonnegative row with zero total) is
/// reported as [`Error::Boundary`].
pub fn fit_toric_mle(config: &Configuration, t: &SufficientStatistic) -> Result<FittedModel> {
    ToricModel::new(config).fit(t.as_slice(), None, &FitOptions::default())
}
