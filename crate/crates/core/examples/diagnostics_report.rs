//! Histogram, path and correlogram of a likelihood-ratio chain, written as
//! CSV and SVG files.
//!
//! Run with `cargo run --release --example diagnostics_report -- [out_dir]`.

use std::fs::{self, File};
use std::path::PathBuf;

use lattice_mcmc::configurations::{no_three_factor_config, no_three_factor_lattice_basis, LiftStyle};
use lattice_mcmc::inference::diagnostics::{
    correlogram_svg, histogram_svg, path_svg, write_correlogram_csv, write_histogram_csv, write_path_csv,
};
use lattice_mcmc::inference::{generate_null_table, Diagnostics, FitOptions, LikelihoodRatio};
use lattice_mcmc::movegen::{CoefficientDistribution, RandomSource};
use lattice_mcmc::sampler::{run_chain, ChainConfig};

fn main() -> lattice_mcmc::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("diagnostics-out"), PathBuf::from);
    fs::create_dir_all(&dir)?;

    let config = no_three_factor_config(3, 3, 3)?;
    let basis = no_three_factor_lattice_basis(3, 3, 3, LiftStyle::PairwiseSymmetric)?;
    let observed = generate_null_table(&config, 135, &mut RandomSource::new(4))?;
    let lr = LikelihoodRatio::saturated(&config, &observed, FitOptions::default())?;
    let cfg = ChainConfig::new(1000, 20_000, 5, CoefficientDistribution::poisson(1.0)?);
    let run = run_chain(&observed, &config, &basis, &cfg, |x| lr.statistic(x))?;

    let diag = Diagnostics::compute(&run.series, None, 40, 1000)?;
    write_histogram_csv(&diag.histogram, &mut File::create(dir.join("histogram.csv"))?)?;
    write_path_csv(&diag.path, &mut File::create(dir.join("path.csv"))?)?;
    fs::write(dir.join("histogram.svg"), histogram_svg(&diag.histogram, Some(lr.df()), "LR histogram"))?;
    fs::write(dir.join("path.svg"), path_svg(&diag.path, "LR path"))?;
    println!("{} bins over {} samples", diag.histogram.bins.len(), diag.histogram.total());
    if let Some(rho) = &diag.autocorrelation {
        write_correlogram_csv(rho, &mut File::create(dir.join("correlogram.csv"))?)?;
        fs::write(dir.join("correlogram.svg"), correlogram_svg(rho, "LR correlogram"))?;
        let first_small = rho.iter().position(|r| r.abs() < 0.1);
        println!("lag-1 autocorrelation {:.3}, first lag below 0.1: {first_small:?}", rho[1]);
    }
    println!("files written to {}", dir.display());
    Ok(())
}
