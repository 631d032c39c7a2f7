//! Exact test of no-three-factor interaction on a simulated 3x3x3 table.
//!
//! Run with `cargo run --release --example no_three_factor_test -- [lambda] [seed]`.

use lattice_mcmc::configurations::{no_three_factor_config, no_three_factor_lattice_basis, LiftStyle};
use lattice_mcmc::inference::{exact_pvalue, generate_null_table, FitOptions, LikelihoodRatio};
use lattice_mcmc::movegen::{CoefficientDistribution, RandomSource};
use lattice_mcmc::sampler::{run_chain, ChainConfig};

fn main() -> lattice_mcmc::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().map_or(1.0, |s| s.parse().expect("lambda"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let config = no_three_factor_config(3, 3, 3)?;
    let basis = no_three_factor_lattice_basis(3, 3, 3, LiftStyle::LastSlicePivot)?;
    let observed = generate_null_table(&config, 135, &mut RandomSource::new(seed))?;
    let lr = LikelihoodRatio::saturated(&config, &observed, FitOptions::default())?;
    let g_obs = lr.statistic(&observed)?;

    let cfg = ChainConfig::new(1000, 10_000, seed.wrapping_add(1), CoefficientDistribution::poisson(lambda)?);
    let run = run_chain(&observed, &config, &basis, &cfg, |x| lr.statistic(x))?;

    let n = run.series.len() as f64;
    let mean = run.series.iter().sum::<f64>() / n;
    let var = run.series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let p = exact_pvalue(&run.series, g_obs)?;
    println!("df = {}", lr.df());
    println!("observed LR = {g_obs:.4}");
    println!("chain mean = {mean:.3}, variance = {var:.3} (chi-square: {}, {})", lr.df(), 2 * lr.df());
    println!("acceptance rate = {:.4}", run.acceptance_rate());
    println!("p-value = {:.4} +- {:.4}", p.p, p.std_error);
    Ok(())
}
