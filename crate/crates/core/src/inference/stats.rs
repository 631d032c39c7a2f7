use crate::configurations::Configuration;
use crate::movegen::RandomSource;
use crate::sampler::Table;
use crate::{Error, Result};

use super::mle::{FitOptions, FittedModel, ToricModel};

/// Likelihood-ratio (deviance) statistic `2 Σ x log(x / m̂)` of `x` against
/// a fitted model. Cells with `x = 0` contribute nothing; a positive count
/// on a cell with `m̂ = 0` gives `f64::INFINITY`.
pub fn lr_statistic(x: &Table, fitted: &FittedModel) -> f64 {
    let mut g2 = 0.0;
    for (&c, &m) in x.counts().iter().zip(&fitted.fitted_means) {
        if c == 0 {
            continue;
        }
        if m <= 0.0 {
            return f64::INFINITY;
        }
        let c = c as f64;
        g2 += c * (c / m).ln();
    }
    2.0 * g2
}

#[derive(Clone, Debug)]
struct Alternative {
    config: Configuration,
    model: ToricModel,
    /// Fit at the observed table, used as the warm start for every sample.
    observed: FittedModel,
}

/// Likelihood-ratio test of a toric null model, either against the
/// saturated model or against a larger toric model on the same cells.
///
/// The null fit depends only on `t`, so it is computed once and shared by
/// the whole fiber. A nested alternative has its own sufficient statistic,
/// which varies along the fiber, and is refitted per table.
#[derive(Clone, Debug)]
pub struct LikelihoodRatio {
    null: FittedModel,
    alternative: Option<Alternative>,
    options: FitOptions,
    df: usize,
}

impl LikelihoodRatio {
    /// Goodness of fit against the saturated model; `df = cells - rank A`.
    pub fn saturated(null: &Configuration, observed: &Table, options: FitOptions) -> Result<Self> {
        let t = null.statistic(observed.counts())?;
        let fit = ToricModel::new(null).fit(&t, None, &options)?;
        let df = fit.kernel_dim();
        Ok(LikelihoodRatio {
            null: fit,
            alternative: None,
            options,
            df,
        })
    }

    /// Null against a nested alternative: `G²(null) - G²(alt)`, with
    /// `df = rank(alt) - rank(null)`. The row space of the null matrix must
    /// lie inside that of the alternative.
    pub fn nested(
        null: &Configuration,
        alternative: &Configuration,
        observed: &Table,
        options: FitOptions,
    ) -> Result<Self> {
        if null.num_cells() != alternative.num_cells() {
            return Err(Error::DimensionMismatch {
                what: "alternative model cells",
                expected: null.num_cells(),
                found: alternative.num_cells(),
            });
        }
        let t = null.statistic(observed.counts())?;
        let null_fit = ToricModel::new(null).fit(&t, None, &options)?;
        let model = ToricModel::new(alternative);
        let t_alt = alternative.statistic(observed.counts())?;
        let alt_fit = model.fit(&t_alt, None, &options)?;
        if alt_fit.rank < null_fit.rank {
            return Err(Error::invalid("alternative model is smaller than the null model"));
        }
        let df = alt_fit.rank - null_fit.rank;
        Ok(LikelihoodRatio {
            null: null_fit,
            alternative: Some(Alternative {
                config: alternative.clone(),
                model,
                observed: alt_fit,
            }),
            options,
            df,
        })
    }

    pub fn null_fit(&self) -> &FittedModel {
        &self.null
    }

    pub fn df(&self) -> usize {
        self.df
    }

    pub fn is_nested(&self) -> bool {
        self.alternative.is_some()
    }

    /// Statistic of a table on the null fiber.
    pub fn statistic(&self, x: &Table) -> Result<f64> {
        let g_null = lr_statistic(x, &self.null);
        let Some(alt) = &self.alternative else {
            return Ok(g_null);
        };
        let t = alt.config.statistic(x.counts())?;
        let fit = alt.model.fit(&t, Some(&alt.observed.theta), &self.options)?;
        let lr = g_null - lr_statistic(x, &fit);
        // the difference of two deviances can dip below zero by rounding
        Ok(if lr < 0.0 && lr > -1e-9 { 0.0 } else { lr })
    }
}

/// Monte Carlo p-value with its standard error `sqrt(p (1 - p) / n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PValue {
    pub p: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Fraction of `series` at or above `observed`.
///
/// Values within a relative `1e-9` of `observed` count as ties, so a table
/// whose statistic equals the observed one up to rounding is counted.
pub fn exact_pvalue(series: &[f64], observed: f64) -> Result<PValue> {
    if series.is_empty() {
        return Err(Error::invalid("p-value of an empty series"));
    }
    let threshold = observed - 1e-9 * observed.abs().max(1.0);
    let hits = series.iter().filter(|&&v| v >= threshold).count();
    let n = series.len();
    let p = hits as f64 / n as f64;
    Ok(PValue {
        p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    })
}

/// Multinomial sample of size `n` with equal probability on every cell.
pub fn generate_null_table(config: &Configuration, n: u64, rng: &mut RandomSource) -> Result<Table> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let k = config.num_cells();
    if k == 0 {
        return Err(Error::invalid("configuration has no cells"));
    }
    let mut counts = vec![0i64; k];
    for _ in 0..n {
        counts[rng.below(k)] += 1;
    }
    Table::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configurations::independence_config;

    #[test]
    fn lr_of_diagonal_table() {
        let c = independence_config(2, 2).unwrap();
        let x = Table::new(vec![2, 0, 0, 2]).unwrap();
        let lr = LikelihoodRatio::saturated(&c, &x, FitOptions::default()).unwrap();
        let v = lr.statistic(&x).unwrap();
        assert!((v - 8.0 * 2f64.ln()).abs() < 1e-9, "{v}");
        assert_eq!(lr.df(), 1);
    }

    #[test]
    fn lr_zero_at_fit() {
        let c = independence_config(2, 2).unwrap();
        let x = Table::new(vec![1, 1, 1, 1]).unwrap();
        let lr = LikelihoodRatio::saturated(&c, &x, FitOptions::default()).unwrap();
        assert!(lr.statistic(&x).unwrap().abs() < 1e-9);
    }

    #[test]
    fn infinite_outside_support() {
        let fit = FittedModel {
            fitted_means: vec![1.0, 0.0],
            theta: vec![],
            iterations: 0,
            residual: 0.0,
            structural_zeros: vec![1],
            rank: 1,
        };
        assert_eq!(lr_statistic(&Table::new(vec![1, 1]).unwrap(), &fit), f64::INFINITY);
        assert_eq!(lr_statistic(&Table::new(vec![1, 0]).unwrap(), &fit), 0.0);
    }

    #[test]
    fn pvalue_examples() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(exact_pvalue(&s, 0.5).unwrap().p, 1.0);
        assert_eq!(exact_pvalue(&s, 4.5).unwrap().p, 0.0);
        let p = exact_pvalue(&s, 2.5).unwrap();
        assert_eq!(p.p, 0.5);
        assert!((p.std_error - 0.25).abs() < 1e-15);
        assert_eq!(exact_pvalue(&s, 2.0).unwrap().p, 0.75);
        assert!(exact_pvalue(&[], 1.0).is_err());
    }

    #[test]
    fn null_tables() {
        let c = independence_config(3, 4).unwrap();
        let mut a = RandomSource::new(5);
        let mut b = RandomSource::new(5);
        let x = generate_null_table(&c, 60, &mut a).unwrap();
        assert_eq!(x.total(), 60);
        assert_eq!(x, generate_null_table(&c, 60, &mut b).unwrap());
    }
}
