//! Chain on a fiber small enough to enumerate, compared with the exact
//! hypergeometric law.
//!
//! Run with `cargo run --release --example small_fiber_chain -- [steps] [seed]`.

use lattice_mcmc::configurations::independence_config;
use lattice_mcmc::intkernel::kernel_lattice_basis;
use lattice_mcmc::movegen::CoefficientDistribution;
use lattice_mcmc::oracle::{empirical_vs_exact, enumerate_fiber, verify_one_step_connectivity, DEFAULT_CAP};
use lattice_mcmc::sampler::{run_chain, ChainConfig, Table};

fn main() -> lattice_mcmc::Result<()> {
    let mut args = std::env::args().skip(1);
    let steps: usize = args.next().map_or(200_000, |s| s.parse().expect("steps"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let config = independence_config(2, 3)?;
    let basis = kernel_lattice_basis(&config.matrix)?;
    let start = Table::new(vec![2, 1, 0, 0, 1, 2])?;
    let t = config.statistic(start.counts())?;
    let fiber = enumerate_fiber(&config, &t, DEFAULT_CAP)?;
    let report = verify_one_step_connectivity(&fiber, &basis)?;
    println!("fiber of {:?}: {} tables, connected: {}", t, fiber.len(), report.is_connected());

    let mut cfg = ChainConfig::new(1000, steps, seed, CoefficientDistribution::poisson(1.0)?);
    cfg.record_states = true;
    let run = run_chain(&start, &config, &basis, &cfg, |_| Ok(0.0))?;
    let visits = run.visits.as_ref().expect("states recorded");
    println!("{:>24} {:>9} {:>9}", "table", "exact", "chain");
    for (x, p) in fiber.elements.iter().zip(&fiber.probabilities) {
        let freq = visits.get(x).copied().unwrap_or(0) as f64 / steps as f64;
        println!("{:>24} {p:9.5} {freq:9.5}", format!("{:?}", x.counts()));
    }
    println!("total variation = {:.5}", empirical_vs_exact(visits, &fiber)?);
    println!("acceptance rate = {:.4}", run.acceptance_rate());
    Ok(())
}
