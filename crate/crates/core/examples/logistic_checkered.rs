//! Goodness-of-fit test of a logistic regression model with two covariates
//! against one with a third, on a checkered 4x4 design crossed with five
//! levels of the third covariate.
//!
//! Run with `cargo run --release --example logistic_checkered -- [responses] [lambda] [seed]`.

use lattice_mcmc::configurations::{checkered_design, logistic_config, logistic_lattice_basis, LiftStyle};
use lattice_mcmc::inference::{exact_pvalue, generate_null_table, FitOptions, LikelihoodRatio};
use lattice_mcmc::movegen::{CoefficientDistribution, RandomSource};
use lattice_mcmc::sampler::{run_chain, ChainConfig};

fn main() -> lattice_mcmc::Result<()> {
    let mut args = std::env::args().skip(1);
    let responses: usize = args.next().map_or(2, |s| s.parse().expect("responses"));
    let lambda: f64 = args.next().map_or(1.0, |s| s.parse().expect("lambda"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let design = checkered_design(4, 4, Some(5))?;
    let null = logistic_config(&design, &[0, 1], responses)?;
    let alternative = logistic_config(&design, &[0, 1, 2], responses)?;
    let basis = logistic_lattice_basis(&design, &[0, 1], responses, LiftStyle::LastSlicePivot)?;
    println!("{} cells, {} basis moves", null.num_cells(), basis.len());

    let observed = generate_null_table(&null, 200, &mut RandomSource::new(seed))?;
    let opts = FitOptions {
        allow_structural_zeros: true,
        ..FitOptions::default()
    };
    let lr = LikelihoodRatio::nested(&null, &alternative, &observed, opts)?;
    let g_obs = lr.statistic(&observed)?;
    let zeros = lr.null_fit().structural_zeros.len();

    let cfg = ChainConfig::new(1000, 10_000, seed.wrapping_add(1), CoefficientDistribution::poisson(lambda)?);
    let run = run_chain(&observed, &null, &basis, &cfg, |x| lr.statistic(x))?;

    let n = run.series.len() as f64;
    let mean = run.series.iter().sum::<f64>() / n;
    let var = run.series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let p = exact_pvalue(&run.series, g_obs)?;
    println!("df = {}, structural zeros = {zeros}", lr.df());
    println!("observed LR = {g_obs:.4}");
    println!("chain mean = {mean:.3}, variance = {var:.3}");
    println!("acceptance rate = {:.4}", run.acceptance_rate());
    println!("p-value = {:.4} +- {:.4}", p.p, p.std_error);
    Ok(())
}
