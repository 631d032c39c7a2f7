//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use lattice_mcmc::configurations::{
    checkered_design, independence_config, lawrence_r, logistic_config, logistic_lattice_basis,
    no_three_factor_config, no_three_factor_lattice_basis, poisson_regression_config, Configuration, Design,
    LiftStyle,
};
use lattice_mcmc::intkernel::{kernel_lattice_basis, IntMatrix, LatticeBasis, Move};
use lattice_mcmc::movegen::RandomSource;
use lattice_mcmc::sampler::Table;

pub fn matrix(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn table(counts: &[i64]) -> Table {
    Table::new(counts.to_vec()).unwrap()
}

/// Random integer matrix with entries in `[-bound, bound]`.
pub fn random_matrix(rows: usize, cols: usize, bound: i64, rng: &mut RandomSource) -> IntMatrix {
    let width = (2 * bound + 1) as usize;
    let data = (0..rows * cols).map(|_| rng.below(width) as i64 - bound).collect();
    IntMatrix::new(rows, cols, data).unwrap()
}

/// Random integer combination of `basis` with coefficients in `[-bound, bound]`.
pub fn random_combination(basis: &LatticeBasis, bound: i64, rng: &mut RandomSource) -> (Vec<i64>, Move) {
    let width = (2 * bound + 1) as usize;
    let alpha: Vec<i64> = (0..basis.len()).map(|_| rng.below(width) as i64 - bound).collect();
    let mut z = vec![0i64; basis.cells()];
    for (a, m) in alpha.iter().zip(basis.moves()) {
        for (zi, &mi) in z.iter_mut().zip(m.as_slice()) {
            *zi += a * mi;
        }
    }
    (alpha, Move::new(z))
}

/// Uniform multinomial table of size `n` over `cells` cells.
pub fn random_table(cells: usize, n: usize, rng: &mut RandomSource) -> Table {
    let mut counts = vec![0i64; cells];
    for _ in 0..n {
        counts[rng.below(cells)] += 1;
    }
    Table::new(counts).unwrap()
}

/// A small model with a lattice basis for each lift style (or the plain
/// kernel basis twice when the model is not a lifting).
pub struct Case {
    pub name: String,
    pub config: Configuration,
    pub bases: Vec<(String, LatticeBasis)>,
}

fn both_styles(f: impl Fn(LiftStyle) -> LatticeBasis) -> Vec<(String, LatticeBasis)> {
    [LiftStyle::LastSlicePivot, LiftStyle::PairwiseSymmetric]
        .into_iter()
        .map(|s| (s.to_string(), f(s)))
        .collect()
}

fn small_design() -> Design {
    Design::full(&[3]).unwrap()
}

/// Models used by the fiber-level checks; each is small enough for
/// brute-force enumeration at modest sample sizes.
pub fn suite() -> Vec<Case> {
    let two_cell = Configuration::from_matrix(matrix(&[&[1, 1]]), "A = [1 1]");
    let two_cell_basis = kernel_lattice_basis(&two_cell.matrix).unwrap();
    let indep = independence_config(2, 2).unwrap();
    let indep_basis = kernel_lattice_basis(&indep.matrix).unwrap();
    let indep23 = independence_config(2, 3).unwrap();
    let indep23_basis = kernel_lattice_basis(&indep23.matrix).unwrap();
    let lifted_two_cell = lawrence_r(&two_cell, 3).unwrap();
    let pr = poisson_regression_config(&small_design(), &[0]).unwrap();
    let pr_basis = kernel_lattice_basis(&pr.matrix).unwrap();
    let checkered = checkered_design(3, 3, None).unwrap();
    vec![
        Case {
            name: two_cell.description.clone(),
            bases: vec![("kernel".into(), two_cell_basis)],
            config: two_cell.clone(),
        },
        Case {
            name: "independence 2x2".into(),
            bases: vec![("kernel".into(), indep_basis)],
            config: indep,
        },
        Case {
            name: "independence 2x3".into(),
            bases: vec![("kernel".into(), indep23_basis)],
            config: indep23,
        },
        Case {
            name: "Lawrence r=3 of [1 1]".into(),
            bases: both_styles(|s| {
                lattice_mcmc::configurations::lift_lattice_basis(
                    &two_cell,
                    &kernel_lattice_basis(&two_cell.matrix).unwrap(),
                    3,
                    s,
                )
                .unwrap()
            }),
            config: lifted_two_cell,
        },
        Case {
            name: "no-three-factor 2x2x2".into(),
            bases: both_styles(|s| no_three_factor_lattice_basis(2, 2, 2, s).unwrap()),
            config: no_three_factor_config(2, 2, 2).unwrap(),
        },
        Case {
            name: "no-three-factor 2x2x3".into(),
            bases: both_styles(|s| no_three_factor_lattice_basis(2, 2, 3, s).unwrap()),
            config: no_three_factor_config(2, 2, 3).unwrap(),
        },
        Case {
            name: "no-three-factor 3x3x3".into(),
            bases: both_styles(|s| no_three_factor_lattice_basis(3, 3, 3, s).unwrap()),
            config: no_three_factor_config(3, 3, 3).unwrap(),
        },
        Case {
            name: "Poisson regression, 3 levels".into(),
            bases: vec![("kernel".into(), pr_basis)],
            config: pr,
        },
        Case {
            name: "binomial logistic, 3 levels".into(),
            bases: both_styles(|s| logistic_lattice_basis(&small_design(), &[0], 2, s).unwrap()),
            config: logistic_config(&small_design(), &[0], 2).unwrap(),
        },
        Case {
            name: "trinomial logistic, checkered 3x3".into(),
            bases: both_styles(|s| logistic_lattice_basis(&checkered, &[0, 1], 3, s).unwrap()),
            config: logistic_config(&checkered, &[0, 1], 3).unwrap(),
        },
    ]
}
