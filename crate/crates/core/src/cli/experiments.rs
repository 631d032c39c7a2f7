//! Settings of the reproduced experiments.

use crate::movegen::CoefficientDistribution;

use super::model::{ConfigSpec, DesignSource};

/// One named experiment: a model, a simulated sample size, run lengths and
/// the proposal laws compared on the same observed table.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub id: &'static str,
    pub spec: ConfigSpec,
    pub sample_size: u64,
    pub burn_in: usize,
    pub iterations: usize,
    pub variants: Vec<CoefficientDistribution>,
    /// Reference chi-square degrees of freedom, for the overlay.
    pub df: usize,
    pub note: &'static str,
}

pub const EXPERIMENT_IDS: [&str; 7] = [
    "no3f-3",
    "no3f-5",
    "no3f-10",
    "logit-bin-4x4",
    "logit-tri-4x4",
    "logit-bin-10x10",
    "logit-tri-10x10",
];

fn poisson(lambdas: &[f64]) -> Vec<CoefficientDistribution> {
    lambdas.iter().map(|&l| CoefficientDistribution::Poisson(l)).collect()
}

fn geometric(ps: &[f64]) -> Vec<CoefficientDistribution> {
    ps.iter().map(|&p| CoefficientDistribution::Geometric(p)).collect()
}

fn no3f(id: &'static str, i: usize, burn_in: usize, iterations: usize, variants: Vec<CoefficientDistribution>) -> Experiment {
    Experiment {
        id,
        spec: ConfigSpec::NoThreeFactor([i, i, i]),
        sample_size: 5 * (i as u64).pow(3),
        burn_in,
        iterations,
        variants,
        df: (i - 1).pow(3),
        note: "",
    }
}

fn logit(id: &'static str, responses: usize, side: usize, n: u64, variants: Vec<CoefficientDistribution>) -> Experiment {
    Experiment {
        id,
        spec: ConfigSpec::Logistic {
            responses,
            design: DesignSource::Checkered {
                i2: side,
                i3: side,
                extra: Some(5),
            },
            covariates: 2,
        },
        sample_size: n,
        burn_in: 1000,
        iterations: 10_000,
        variants,
        df: responses - 1,
        note: "",
    }
}

/// Looks up an experiment by id.
pub fn experiment(id: &str) -> Option<Experiment> {
    let e = match id {
        "no3f-3" => no3f("no3f-3", 3, 1000, 10_000, poisson(&[1.0, 10.0, 50.0])),
        "no3f-5" => no3f("no3f-5", 5, 10_000, 100_000, geometric(&[0.1, 0.5])),
        "no3f-10" => Experiment {
            note: "no numeric acceptance bound; completion without a fiber breach is the check",
            ..no3f("no3f-10", 10, 10_000, 100_000, poisson(&[10.0, 50.0]))
        },
        "logit-bin-4x4" => logit("logit-bin-4x4", 2, 4, 200, poisson(&[1.0, 10.0, 50.0])),
        "logit-tri-4x4" => logit("logit-tri-4x4", 3, 4, 200, poisson(&[1.0, 10.0, 50.0])),
        "logit-bin-10x10" => logit("logit-bin-10x10", 2, 10, 625, geometric(&[0.1, 0.5])),
        "logit-tri-10x10" => Experiment {
            note: "both p = 0.1 and p = 0.5 are run; one published panel label repeats p = 0.1",
            ..logit("logit-tri-10x10", 3, 10, 625, geometric(&[0.1, 0.5]))
        },
        _ => return None,
    };
    Some(e)
}
