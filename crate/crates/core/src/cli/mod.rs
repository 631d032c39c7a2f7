//! Command-line front end: `kernel`, `lift`, `test` and `reproduce`.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure (overflow,
//! boundary statistic, non-convergence), 4 fiber consistency breach.

pub mod experiments;
pub mod model;
pub mod run;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Args, Parser, Subcommand};

use crate::configurations::{lawrence_r, lift_lattice_basis, Configuration, LiftStyle};
use crate::inference::{generate_null_table, FitOptions};
use crate::intkernel::kernel_lattice_basis;
use crate::movegen::{CoefficientDistribution, RandomSource};
use crate::sampler::ChainConfig;
use crate::{textfmt, Error, Result};

use experiments::{experiment, Experiment, EXPERIMENT_IDS};
use model::ConfigSpec;
use run::{derive_seed, run_test, write_diagnostics, OutputSettings, RunReport};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "LATTICE_MCMC_OUT";

#[derive(Debug, Parser)]
#[command(name = "lattice-mcmc", version, about = "Exact conditional tests with lattice-basis Markov chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = OUT_ENV, default_value = "lattice-mcmc-out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an integer kernel lattice basis of a configuration matrix.
    Kernel {
        matrix: PathBuf,
        /// Basis file to write (default: <out>/<matrix stem>.moves).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Build the r-th Lawrence lifting of a configuration and its lifted basis.
    Lift {
        matrix: PathBuf,
        #[arg(long, short)]
        r: usize,
        #[arg(long, default_value_t = LiftStyle::LastSlicePivot)]
        style: LiftStyle,
        /// Basis of the base configuration (default: its kernel lattice basis).
        #[arg(long)]
        moves: Option<PathBuf>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Run an exact likelihood-ratio test on an observed or simulated table.
    Test(TestArgs),
    /// Rerun one of the published experiment settings.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXPERIMENT_IDS))]
        id: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = LiftStyle::LastSlicePivot)]
        style: LiftStyle,
        #[command(flatten)]
        out: OutDir,
    },
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// `no3f:I1,I2,I3`, `logistic:binomial|trinomial,DESIGN,Q` or a matrix file.
    pub config: String,
    /// Observed table file.
    #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
    pub table: Option<PathBuf>,
    /// Simulate the observed table as a uniform multinomial of this size.
    #[arg(long)]
    pub simulate: Option<u64>,
    /// Coefficient law, `poisson:LAMBDA` or `geometric:P`.
    #[arg(long, default_value = "poisson:1")]
    pub dist: CoefficientDistribution,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Moves file to use instead of the built-in lattice basis.
    #[arg(long)]
    pub moves: Option<PathBuf>,
    #[arg(long, default_value_t = LiftStyle::LastSlicePivot)]
    pub style: LiftStyle,
    /// Histogram bin count (default: Freedman–Diaconis).
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub max_lag: usize,
    /// Fit on the support left after dropping cells forced to zero, instead
    /// of failing on a boundary statistic.
    #[arg(long)]
    pub allow_structural_zeros: bool,
    #[command(flatten)]
    pub out: OutDir,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "matrix".into(), |s| s.to_string_lossy().into_owned())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn cmd_kernel(matrix: &Path, output: Option<PathBuf>, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let m = textfmt::parse_matrix(&read(matrix)?)?;
    let basis = kernel_lattice_basis(&m)?;
    let target = match output {
        Some(p) => p,
        None => {
            fs::create_dir_all(out)?;
            out.join(format!("{}.moves", stem(matrix)))
        }
    };
    fs::write(&target, textfmt::write_moves(&basis))?;
    writeln!(stdout, "d = {}", basis.len())?;
    writeln!(stdout, "basis = {}", target.display())?;
    Ok(())
}

fn cmd_lift(matrix: &Path, r: usize, style: LiftStyle, moves: Option<PathBuf>, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let m = textfmt::parse_matrix(&read(matrix)?)?;
    let base = Configuration::from_matrix(m, stem(matrix));
    let basis = match moves {
        Some(p) => textfmt::parse_moves(&read(&p)?, Some(base.num_cells()))?,
        None => kernel_lattice_basis(&base.matrix)?,
    };
    let lifted = lawrence_r(&base, r)?;
    let lifted_basis = lift_lattice_basis(&base, &basis, r, style)?;
    // self-check: the lifted moves must lie in the kernel of the lifting
    lifted_basis.check_kernel(&lifted.matrix)?;

    fs::create_dir_all(out)?;
    let name = format!("{}.lawrence{r}", stem(matrix));
    let mat_path = out.join(format!("{name}.mat"));
    let moves_path = out.join(format!("{name}.moves"));
    fs::write(&mat_path, textfmt::write_matrix(&lifted.matrix))?;
    fs::write(&moves_path, textfmt::write_moves(&lifted_basis))?;
    writeln!(stdout, "lifted = {} x {}", lifted.matrix.rows(), lifted.matrix.cols())?;
    writeln!(stdout, "style = {style}")?;
    writeln!(stdout, "moves = {}", lifted_basis.len())?;
    writeln!(stdout, "config = {}", mat_path.display())?;
    writeln!(stdout, "basis = {}", moves_path.display())?;
    Ok(())
}

fn fit_options(allow_structural_zeros: bool) -> FitOptions {
    FitOptions {
        allow_structural_zeros,
        ..FitOptions::default()
    }
}

fn cmd_test(args: TestArgs, stdout: &mut dyn Write) -> Result<()> {
    let spec: ConfigSpec = args.config.parse()?;
    let mut model = spec.build(args.style)?;
    if let Some(p) = &args.moves {
        model.basis = textfmt::parse_moves(&read(p)?, Some(model.null.num_cells()))?;
    }
    let (observed, source) = match (&args.table, args.simulate) {
        (Some(p), _) => {
            let x = textfmt::parse_table(&read(p)?)?;
            if x.len() != model.null.num_cells() {
                return Err(Error::DimensionMismatch {
                    what: "table cells",
                    expected: model.null.num_cells(),
                    found: x.len(),
                });
            }
            (x, format!("file {}", p.display()))
        }
        (None, Some(n)) => {
            let mut rng = RandomSource::new(derive_seed(args.seed, 0));
            (generate_null_table(&model.null, n, &mut rng)?, format!("simulated uniform multinomial, n = {n}"))
        }
        (None, None) => return Err(Error::invalid("either --table or --simulate is required")),
    };
    let mut chain = ChainConfig::new(args.burn_in, args.iterations, derive_seed(args.seed, 1), args.dist);
    chain.thin = args.thin;
    let outcome = run_test(&model, &observed, &chain, fit_options(args.allow_structural_zeros))?;

    let settings = OutputSettings {
        bins: args.bins,
        max_lag: args.max_lag,
        ..OutputSettings::default()
    };
    let dir = args.out.out;
    let files = write_diagnostics(&outcome, &dir, &spec.to_string(), &settings)?;
    fs::write(dir.join("observed.table"), textfmt::write_table(&observed))?;

    let mut report = RunReport::new();
    report.push("command", "test");
    report.push("configuration", &spec);
    report.push("cells", model.null.num_cells());
    report.push("basis_moves", model.basis.len());
    report.push("style", args.style);
    report.push("table", source);
    report.push("sample_size", observed.total());
    report.push("seed", args.seed);
    report.push_outcome(&chain, &outcome);
    let mut listed = vec!["observed.table".to_string()];
    listed.extend(files);
    listed.push("report.txt".into());
    report.push("files", listed.join(" "));
    fs::write(dir.join("report.txt"), report.to_string())?;
    write!(stdout, "{report}")?;
    writeln!(
        stdout,
        "LR = {:.6}, p = {:.4} +- {:.4}",
        outcome.observed_lr, outcome.pvalue.p, outcome.pvalue.std_error
    )?;
    Ok(())
}

fn variant_dir(dist: &CoefficientDistribution) -> String {
    dist.to_string().replace(':', "-")
}

/// Runs every proposal variant of `exp` on one simulated table, in
/// parallel, and writes one report directory per variant plus a summary.
pub fn reproduce(exp: &Experiment, seed: u64, style: LiftStyle, out: &Path) -> Result<RunReport> {
    let model = exp.spec.build(style)?;
    let mut rng = RandomSource::new(derive_seed(seed, 0));
    let observed = generate_null_table(&model.null, exp.sample_size, &mut rng)?;
    let dir = out.join(exp.id);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("observed.table"), textfmt::write_table(&observed))?;

    let chains: Vec<ChainConfig> = exp
        .variants
        .iter()
        .enumerate()
        .map(|(k, &d)| ChainConfig::new(exp.burn_in, exp.iterations, derive_seed(seed, 1 + k as u64), d))
        .collect();
    let results: Vec<Result<RunReport>> = thread::scope(|s| {
        let handles: Vec<_> = chains
            .iter()
            .map(|chain| {
                let (model, observed, dir) = (&model, &observed, &dir);
                s.spawn(move || -> Result<RunReport> {
                    let outcome = run_test(model, observed, chain, fit_options(true))?;
                    let vdir = dir.join(variant_dir(&chain.dist));
                    let title = format!("{} {}", exp.id, chain.dist);
                    let files = write_diagnostics(&outcome, &vdir, &title, &OutputSettings::default())?;
                    let mut report = RunReport::new();
                    report.push("experiment", exp.id);
                    report.push("configuration", &exp.spec);
                    report.push("sample_size", exp.sample_size);
                    report.push("seed", seed);
                    report.push_outcome(chain, &outcome);
                    let mut listed = files;
                    listed.push("report.txt".into());
                    report.push("files", listed.join(" "));
                    fs::write(vdir.join("report.txt"), report.to_string())?;
                    Ok(report)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::invalid("variant thread panicked"))))
            .collect()
    });

    let mut summary = RunReport::new();
    summary.push("experiment", exp.id);
    summary.push("configuration", &exp.spec);
    summary.push("cells", model.null.num_cells());
    summary.push("basis_moves", model.basis.len());
    summary.push("style", style);
    summary.push("sample_size", exp.sample_size);
    summary.push("burn_in", exp.burn_in);
    summary.push("iterations", exp.iterations);
    summary.push("seed", seed);
    if !exp.note.is_empty() {
        summary.push("note", exp.note);
    }
    for (chain, result) in chains.iter().zip(results) {
        let r = result?;
        let name = variant_dir(&chain.dist);
        for key in ["df", "structural_zeros", "observed_lr", "p_value", "p_value_std_error", "acceptance_rate", "series_mean"] {
            summary.push(&format!("{name}.{key}"), r.get(key).unwrap_or(""));
        }
        summary.push(&format!("{name}.dir"), format!("{}/{name}", exp.id));
    }
    fs::write(dir.join("summary.txt"), summary.to_string())?;
    Ok(summary)
}

/// Executes a parsed command, writing human-readable output to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Kernel { matrix, output, out } => cmd_kernel(&matrix, output, &out.out, stdout),
        Command::Lift {
            matrix,
            r,
            style,
            moves,
            out,
        } => cmd_lift(&matrix, r, style, moves, &out.out, stdout),
        Command::Test(args) => cmd_test(args, stdout),
        Command::Reproduce { id, seed, style, out } => {
            let exp = experiment(&id).ok_or_else(|| Error::invalid(format!("unknown experiment `{id}`")))?;
            let summary = reproduce(&exp, seed, style, &out.out)?;
            write!(stdout, "{summary}")?;
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn variant_directory_names() {
        assert_eq!(variant_dir(&CoefficientDistribution::Poisson(10.0)), "poisson-10");
        assert_eq!(variant_dir(&CoefficientDistribution::Geometric(0.1)), "geometric-0.1");
    }
}
