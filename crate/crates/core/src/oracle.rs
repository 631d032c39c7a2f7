//! Brute-force ground truth for small fibers: enumeration, the exact
//! hypergeometric law, one-step connectivity and distance checks.

use std::collections::{BTreeMap, HashMap};

use crate::configurations::Configuration;
use crate::inference::ln_gamma;
use crate::intkernel::{CombinationSolver, LatticeBasis};
use crate::sampler::Table;
use crate::{Error, Result};

/// Default bound on the number of enumerated elements.
pub const DEFAULT_CAP: usize = 1_000_000;

/// All tables with a given sufficient statistic, with their exact
/// hypergeometric probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub elements: Vec<Table>,
    pub probabilities: Vec<f64>,
}

impl Fiber {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, x: &Table) -> Option<usize> {
        self.elements.iter().position(|e| e == x)
    }
}

struct Search<'a> {
    config: &'a Configuration,
    /// Nonzero entries `(row, a)` of each column.
    columns: Vec<Vec<(usize, i64)>>,
    nonnegative: Vec<bool>,
    /// Rows whose last nonzero entry is in this column.
    closing: Vec<Vec<usize>>,
    residual: Vec<i64>,
    current: Vec<i64>,
    found: Vec<Table>,
    cap: usize,
}

impl Search<'_> {
    fn upper_bound(&self, j: usize) -> Option<i64> {
        self.columns[j]
            .iter()
            .filter(|&&(i, a)| self.nonnegative[i] && a > 0)
            .map(|&(i, a)| self.residual[i] / a)
            .min()
    }

    fn apply(&mut self, j: usize, v: i64) {
        for &(i, a) in &self.columns[j] {
            self.residual[i] -= a * v;
        }
        self.current[j] = v;
    }

    fn dfs(&mut self, j: usize) -> Result<()> {
        let n = self.config.num_cells();
        if j == n {
            if self.residual.iter().all(|&r| r == 0) {
                if self.found.len() == self.cap {
                    return Err(Error::CapExceeded { cap: self.cap });
                }
                self.found.push(Table::new(self.current.clone())?);
            }
            return Ok(());
        }
        let Some(hi) = self.upper_bound(j) else {
            return Err(Error::invalid(format!(
                "cell {j} is not bounded by any nonnegative row; the fiber may be infinite"
            )));
        };
        // A row that ends at this cell forces its value.
        let forced = self.closing[j].first().map(|&i| {
            let a = self.config.matrix.get(i, j);
            let r = self.residual[i];
            (r % a == 0).then_some(r / a)
        });
        let (lo, hi) = match forced {
            Some(None) => return Ok(()),
            Some(Some(v)) if v < 0 || v > hi => return Ok(()),
            Some(Some(v)) => (v, v),
            None => (0, hi),
        };
        for v in (lo..=hi).rev() {
            self.apply(j, v);
            let closed = self.closing[j].iter().all(|&i| self.residual[i] == 0);
            if closed {
                self.dfs(j + 1)?;
            }
            self.apply(j, -v);
        }
        self.current[j] = 0;
        Ok(())
    }
}

/// Every nonnegative integer `x` with `A x = t`, in decreasing
/// lexicographic order of the cell vector.
///
/// Each cell is bounded through the rows of `A` whose entries are all
/// nonnegative; a cell with no such row is rejected. An infeasible `t`
/// gives an empty fiber. More than `cap` elements is [`Error::CapExceeded`].
pub fn enumerate_fiber(config: &Configuration, t: &[i64], cap: usize) -> Result<Fiber> {
    let a = &config.matrix;
    if t.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            what: "sufficient statistic",
            expected: a.rows(),
            found: t.len(),
        });
    }
    let nonnegative: Vec<bool> = (0..a.rows()).map(|i| a.row(i).iter().all(|&v| v >= 0)).collect();
    let columns: Vec<Vec<(usize, i64)>> = (0..a.cols())
        .map(|j| {
            (0..a.rows())
                .filter(|&i| a.get(i, j) != 0)
                .map(|i| (i, a.get(i, j)))
                .collect()
        })
        .collect();
    let mut closing = vec![Vec::new(); a.cols()];
    for i in 0..a.rows() {
        if let Some(last) = a.row(i).iter().rposition(|&v| v != 0) {
            closing[last].push(i);
        } else if t[i] != 0 {
            return Ok(Fiber {
                elements: Vec::new(),
                probabilities: Vec::new(),
            });
        }
    }
    if (0..a.rows()).any(|i| nonnegative[i] && t[i] < 0) {
        return Ok(Fiber {
            elements: Vec::new(),
            probabilities: Vec::new(),
        });
    }
    let mut search = Search {
        config,
        columns,
        nonnegative,
        closing,
        residual: t.to_vec(),
        current: vec![0; a.cols()],
        found: Vec::new(),
        cap,
    };
    search.dfs(0)?;
    let elements = search.found;
    let probabilities = if elements.is_empty() {
        Vec::new()
    } else {
        exact_hypergeometric(&elements)?
    };
    Ok(Fiber {
        elements,
        probabilities,
    })
}

/// Normalized masses proportional to `1 / prod_i x(i)!`.
pub fn exact_hypergeometric(elements: &[Table]) -> Result<Vec<f64>> {
    if elements.is_empty() {
        return Err(Error::invalid("hypergeometric law of an empty fiber"));
    }
    let logs: Vec<f64> = elements
        .iter()
        .map(|x| -x.counts().iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let masses: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = masses.iter().sum();
    Ok(masses.into_iter().map(|m| m / total).collect())
}

/// Outcome of [`verify_one_step_connectivity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    /// Fiber indices grouped by coset of the basis lattice; a single class
    /// means every difference `y - x` is an integer combination.
    pub classes: Vec<Vec<usize>>,
    /// One failing ordered pair per pair of distinct classes.
    pub failing_pairs: Vec<(usize, usize)>,
}

impl ConnectivityReport {
    pub fn is_connected(&self) -> bool {
        self.failing_pairs.is_empty()
    }
}

/// Checks that every difference of two fiber elements lies in the integer
/// span of `basis`.
///
/// Membership of `y - x` is an equivalence relation (the span is a group),
/// so each element is only compared against one representative per class.
pub fn verify_one_step_connectivity(fiber: &Fiber, basis: &LatticeBasis) -> Result<ConnectivityReport> {
    let solver = CombinationSolver::new(basis)?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut diff = vec![0i64; basis.cells()];
    for (k, x) in fiber.elements.iter().enumerate() {
        if x.len() != basis.cells() {
            return Err(Error::DimensionMismatch {
                what: "fiber element",
                expected: basis.cells(),
                found: x.len(),
            });
        }
        let mut home = None;
        for (c, class) in classes.iter().enumerate() {
            let rep = fiber.elements[class[0]].counts();
            for ((d, &a), &b) in diff.iter_mut().zip(x.counts()).zip(rep) {
                *d = a - b;
            }
            if solver.solve(&diff)?.is_some() {
                home = Some(c);
                break;
            }
        }
        match home {
            Some(c) => classes[c].push(k),
            None => classes.push(vec![k]),
        }
    }
    let mut failing_pairs = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            failing_pairs.push((classes[a][0], classes[b][0]));
        }
    }
    Ok(ConnectivityReport {
        classes,
        failing_pairs,
    })
}

/// Total-variation distance between chain visit frequencies and the exact
/// law; a visited table outside the fiber is [`Error::FiberBreach`].
pub fn empirical_vs_exact(visits: &BTreeMap<Table, u64>, fiber: &Fiber) -> Result<f64> {
    let index: HashMap<&Table, usize> = fiber.elements.iter().enumerate().map(|(k, x)| (x, k)).collect();
    let total: u64 = visits.values().sum();
    if total == 0 {
        return Err(Error::invalid("no recorded visits"));
    }
    let mut empirical = vec![0.0; fiber.len()];
    for (x, &n) in visits {
        let k = index
            .get(x)
            .ok_or_else(|| Error::FiberBreach(format!("visited table {:?} is not in the fiber", x.counts())))?;
        empirical[*k] = n as f64 / total as f64;
    }
    Ok(0.5
        * empirical
            .iter()
            .zip(&fiber.probabilities)
            .map(|(e, p)| (e - p).abs())
            .sum::<f64>())
}
