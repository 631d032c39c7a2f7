//! The exact-test pipeline shared by `test` and `reproduce`: fit, run the
//! chain, summarize, write the report files.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::inference::diagnostics::{
    correlogram_svg, histogram_svg, path_svg, write_correlogram_csv, write_histogram_csv, write_path_csv,
};
use crate::inference::{exact_pvalue, Diagnostics, FitOptions, LikelihoodRatio, PValue};
use crate::sampler::{run_chain, ChainConfig, ChainRun, Table};
use crate::Result;

use super::model::Model;

/// Knobs for the diagnostics output.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSettings {
    pub bins: Option<usize>,
    pub max_lag: usize,
    pub path_points: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            bins: None,
            max_lag: 50,
            path_points: 2000,
        }
    }
}

/// Everything one exact test produced.
#[derive(Clone, Debug)]
pub struct TestOutcome {
    pub observed_lr: f64,
    pub df: usize,
    pub nested: bool,
    pub structural_zeros: usize,
    pub run: ChainRun,
    pub pvalue: PValue,
}

/// Fits the null model at `observed`, runs the chain from it and computes
/// the Monte Carlo p-value of the observed likelihood ratio.
pub fn run_test(model: &Model, observed: &Table, chain: &ChainConfig, fit: FitOptions) -> Result<TestOutcome> {
    let lr = match &model.alternative {
        Some(alt) => LikelihoodRatio::nested(&model.null, alt, observed, fit)?,
        None => LikelihoodRatio::saturated(&model.null, observed, fit)?,
    };
    let observed_lr = lr.statistic(observed)?;
    let run = run_chain(observed, &model.null, &model.basis, chain, |x| lr.statistic(x))?;
    let pvalue = exact_pvalue(&run.series, observed_lr)?;
    Ok(TestOutcome {
        observed_lr,
        df: lr.df(),
        nested: lr.is_nested(),
        structural_zeros: lr.null_fit().structural_zeros.len(),
        run,
        pvalue,
    })
}

/// Writes series, histogram, path and correlogram files into `dir` and
/// returns their names in a fixed order.
pub fn write_diagnostics(outcome: &TestOutcome, dir: &Path, title: &str, settings: &OutputSettings) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let series = &outcome.run.series;
    let diag = Diagnostics::compute(series, settings.bins, settings.max_lag, settings.path_points)?;
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        fs::write(dir.join(name), bytes)?;
        files.push(name.to_string());
        Ok(())
    };

    let mut buf = Vec::new();
    write_path_csv(
        &series.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect::<Vec<_>>(),
        &mut buf,
    )?;
    put("series.csv", buf)?;

    let mut buf = Vec::new();
    write_histogram_csv(&diag.histogram, &mut buf)?;
    put("histogram.csv", buf)?;
    put(
        "histogram.svg",
        histogram_svg(&diag.histogram, (outcome.df > 0).then_some(outcome.df), &format!("{title}: LR histogram, chi-square df {}", outcome.df)).into_bytes(),
    )?;

    let mut buf = Vec::new();
    write_path_csv(&diag.path, &mut buf)?;
    put("path.csv", buf)?;
    put("path.svg", path_svg(&diag.path, &format!("{title}: LR path")).into_bytes())?;

    // a constant series has no correlogram; the files are then omitted
    if let Some(rho) = &diag.autocorrelation {
        let mut buf = Vec::new();
        write_correlogram_csv(rho, &mut buf)?;
        put("correlogram.csv", buf)?;
        put("correlogram.svg", correlogram_svg(rho, &format!("{title}: LR correlogram")).into_bytes())?;
    }
    Ok(files)
}

/// Ordered `key = value` lines describing one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    entries: Vec<(String, String)>,
}

impl RunReport {
    pub fn new() -> Self {
        RunReport::default()
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Chain settings and results of `outcome`.
    pub fn push_outcome(&mut self, chain: &ChainConfig, outcome: &TestOutcome) {
        self.push("distribution", chain.dist);
        self.push("burn_in", chain.burn_in);
        self.push("iterations", chain.iterations);
        self.push("thin", chain.thin);
        self.push("chain_seed", chain.seed);
        self.push("reference", if outcome.nested { "nested alternative" } else { "saturated" });
        self.push("df", outcome.df);
        self.push("structural_zeros", outcome.structural_zeros);
        self.push("observed_lr", outcome.observed_lr);
        self.push("p_value", outcome.pvalue.p);
        self.push("p_value_std_error", outcome.pvalue.std_error);
        self.push("samples", outcome.pvalue.n);
        let c = outcome.run.counts;
        self.push("proposals", c.proposals);
        self.push("accepted", c.accepted);
        self.push("acceptance_rate", outcome.run.acceptance_rate());
        self.push("negative_rejections", c.negative_rejections);
        self.push("zero_moves", c.zero_moves);
        let n = outcome.run.series.len() as f64;
        let mean = outcome.run.series.iter().sum::<f64>() / n;
        self.push("series_mean", mean);
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Parses the `key = value` layout written by [`RunReport`]'s `Display`.
impl std::str::FromStr for RunReport {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut r = RunReport::new();
        for (i, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once(" = ").ok_or_else(|| crate::Error::Parse {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            r.push(k, v);
        }
        Ok(r)
    }
}

/// Mixes a base seed with a stream index (SplitMix64 finalizer), giving
/// independent-looking seeds for the table and for each chain.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
