//! Random proposal moves built from a lattice basis.
//!
//! Two coefficient laws are supported. [`CoefficientDistribution::Poisson`]
//! draws each `|alpha_k|` i.i.d. Poisson and rejects the all-zero vector.
//! [`CoefficientDistribution::Geometric`] draws the total magnitude
//! `sum |alpha_k|` from a geometric law on `{1, 2, ...}` and splits it
//! multinomially with equal cell probabilities. Both attach an independent
//! fair sign to each coefficient, so the coefficient law is invariant under
//! `alpha -> -alpha` and every nonzero integer vector has positive mass.
//!
//! Randomness comes from [`RandomSource`], a ChaCha8 stream: the same seed and
//! stream index give the same draws on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric, Poisson};

use crate::intkernel::{LatticeBasis, Move};
use crate::{Error, Result};

/// Deterministic random stream owned by a single chain.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An independent stream with the same seed; distinct `stream` values
    /// never overlap.
    pub fn split(&self, stream: u64) -> RandomSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream.wrapping_add(1));
        RandomSource { seed: self.seed, rng }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Law of the coefficient magnitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoefficientDistribution {
    /// i.i.d. Poisson magnitudes with mean `lambda`.
    Poisson(f64),
    /// Geometric total magnitude with success probability `p`.
    Geometric(f64),
}

impl CoefficientDistribution {
    pub fn poisson(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(CoefficientDistribution::Poisson(lambda))
        } else {
            Err(Error::invalid(format!("Poisson mean must be positive, got {lambda}")))
        }
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(CoefficientDistribution::Geometric(p))
        } else {
            Err(Error::invalid(format!("geometric parameter must lie in (0, 1), got {p}")))
        }
    }

    pub fn draw(&self, k: usize, rng: &mut RandomSource) -> Vec<i64> {
        match *self {
            CoefficientDistribution::Poisson(lambda) => draw_coefficients_poisson(k, lambda, rng),
            CoefficientDistribution::Geometric(p) => draw_coefficients_geometric(k, p, rng),
        }
    }
}

impl FromStr for CoefficientDistribution {
    type Err = Error;

    /// Parses `poisson:<lambda>` or `geometric:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("expected poisson:<lambda> or geometric:<p>, got {s:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad distribution parameter in {s:?}")))?;
        match kind.trim() {
            "poisson" | "po" => CoefficientDistribution::poisson(value),
            "geometric" | "geom" => CoefficientDistribution::geometric(value),
            other => Err(Error::invalid(format!("unknown distribution {other:?}"))),
        }
    }
}

impl fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientDistribution::Poisson(l) => write!(f, "poisson:{l}"),
            CoefficientDistribution::Geometric(p) => write!(f, "geometric:{p}"),
        }
    }
}

/// Means up to this value are sampled by sequential inversion.
const INVERSION_LIMIT: f64 = 30.0;

fn poisson_magnitude(lambda: f64, rng: &mut RandomSource) -> i64 {
    if lambda <= INVERSION_LIMIT {
        let u = rng.uniform();
        let mut k = 0i64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= lambda / k as f64;
            if p == 0.0 {
                break;
            }
            cdf += p;
        }
        k
    } else {
        // Transformed rejection with squeeze: exact, unlike a normal approximation.
        Poisson::new(lambda).expect("positive mean").sample(rng) as i64
    }
}

fn apply_signs(alpha: &mut [i64], rng: &mut RandomSource) {
    for a in alpha.iter_mut() {
        if *a != 0 && rng.coin() {
            *a = -*a;
        }
    }
}

/// Coefficients with i.i.d. Poisson magnitudes, the all-zero draw rejected,
/// and independent fair signs.
pub fn draw_coefficients_poisson(k: usize, lambda: f64, rng: &mut RandomSource) -> Vec<i64> {
    assert!(k >= 1, "need at least one coefficient");
    let mut alpha = vec![0i64; k];
    loop {
        for a in alpha.iter_mut() {
            *a = poisson_magnitude(lambda, rng);
        }
        if alpha.iter().any(|&a| a != 0) {
            break;
        }
    }
    apply_signs(&mut alpha, rng);
    alpha
}

/// Coefficients whose total magnitude is geometric on `{1, 2, ...}` with
/// `P(m) = p (1 - p)^(m - 1)`, split multinomially over the `k` slots with
/// equal probabilities, with independent fair signs.
pub fn draw_coefficients_geometric(k: usize, p: f64, rng: &mut RandomSource) -> Vec<i64> {
    assert!(k >= 1, "need at least one coefficient");
    let total = 1 + Geometric::new(p).expect("0 < p < 1").sample(rng);
    let mut alpha = vec![0i64; k];
    let mut left = total;
    for (slot, a) in alpha.iter_mut().enumerate() {
        let remaining_slots = (k - slot) as f64;
        let take = if slot + 1 == k {
            left
        } else if left == 0 {
            0
        } else {
            Binomial::new(left, 1.0 / remaining_slots)
                .expect("valid binomial")
                .sample(rng)
        };
        *a = take as i64;
        left -= take;
    }
    apply_signs(&mut alpha, rng);
    alpha
}

/// `sum_k alpha_k z_k`; can be the zero move when a redundant basis cancels.
pub fn compose_move(basis: &LatticeBasis, alpha: &[i64]) -> Result<Move> {
    if alpha.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            what: "coefficient vector",
            expected: basis.len(),
            found: alpha.len(),
        });
    }
    let mut z = vec![0i64; basis.cells()];
    for (k, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for &(i, v) in basis.sparse(k) {
            let term = v.checked_mul(a).ok_or(Error::Overflow("move composition"))?;
            z[i] = z[i].checked_add(term).ok_or(Error::Overflow("move composition"))?;
        }
    }
    Ok(Move::new(z))
}

/// Draws coefficients from `dist` and composes them into a move.
pub fn draw_move(basis: &LatticeBasis, dist: &CoefficientDistribution, rng: &mut RandomSource) -> Result<Move> {
    if basis.is_empty() {
        return Err(Error::invalid("cannot draw a move from an empty basis"));
    }
    let alpha = dist.draw(basis.len(), rng);
    compose_move(basis, &alpha)
}

/// Reusable proposal generator with scratch space, producing sparse moves
/// without per-step allocation.
#[derive(Clone, Debug)]
pub struct Proposer<'a> {
    basis: &'a LatticeBasis,
    dist: CoefficientDistribution,
    dense: Vec<i64>,
    touched: Vec<usize>,
    delta: Vec<(usize, i64)>,
}

impl<'a> Proposer<'a> {
    pub fn new(basis: &'a LatticeBasis, dist: CoefficientDistribution) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::invalid("cannot propose moves from an empty basis"));
        }
        Ok(Proposer {
            basis,
            dist,
            dense: vec![0; basis.cells()],
            touched: Vec::new(),
            delta: Vec::new(),
        })
    }

    pub fn distribution(&self) -> CoefficientDistribution {
        self.dist
    }

    /// Draws a move and returns its nonzero entries as `(cell, value)`, in
    /// order of first touch. An empty slice is the zero move.
    pub fn propose(&mut self, rng: &mut RandomSource) -> Result<&[(usize, i64)]> {
        let alpha = self.dist.draw(self.basis.len(), rng);
        self.touched.clear();
        self.delta.clear();
        let mut overflow = false;
        for (k, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(i, v) in self.basis.sparse(k) {
                let slot = &mut self.dense[i];
                if *slot == 0 {
                    self.touched.push(i);
                }
                match v.checked_mul(a).and_then(|t| slot.checked_add(t)) {
                    Some(s) => *slot = s,
                    None => overflow = true,
                }
            }
        }
        for &i in &self.touched {
            let v = std::mem::take(&mut self.dense[i]);
            // repeated touches read back zero after the first take
            if v != 0 {
                self.delta.push((i, v));
            }
        }
        if overflow {
            return Err(Error::Overflow("move composition"));
        }
        Ok(&self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_distribution_specs() {
        assert_eq!(
            "poisson:1.5".parse::<CoefficientDistribution>().unwrap(),
            CoefficientDistribution::Poisson(1.5)
        );
        assert_eq!(
            "geometric:0.1".parse::<CoefficientDistribution>().unwrap(),
            CoefficientDistribution::Geometric(0.1)
        );
        assert!("geometric:1.0".parse::<CoefficientDistribution>().is_err());
        assert!("poisson:0".parse::<CoefficientDistribution>().is_err());
        assert!("uniform:3".parse::<CoefficientDistribution>().is_err());
    }

    #[test]
    fn single_poisson_coefficient_is_never_zero() {
        let mut rng = RandomSource::new(7);
        for _ in 0..10_000 {
            assert_ne!(draw_coefficients_poisson(1, 0.05, &mut rng)[0], 0);
        }
    }

    #[test]
    fn geometric_total_is_conserved() {
        let mut rng = RandomSource::new(3);
        for _ in 0..2_000 {
            let a = draw_coefficients_geometric(5, 0.3, &mut rng);
            assert!(a.iter().map(|v| v.abs()).sum::<i64>() >= 1);
        }
    }

    #[test]
    fn poisson_tail_method_above_inversion_limit() {
        let mut rng = RandomSource::new(11);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| poisson_magnitude(50.0, &mut rng) as f64).sum::<f64>() / n as f64;
        // sd of the mean is sqrt(50 / 20000) = 0.05
        assert!((mean - 50.0).abs() < 0.25, "mean {mean}");
    }

    #[test]
    fn compose_examples() {
        let z = Move::new(vec![1, -1, -1, 1]);
        let b = LatticeBasis::new(4, vec![z.clone(), Move::new(vec![0, 1, 0, -1])]).unwrap();
        assert_eq!(compose_move(&b, &[1, 0]).unwrap(), z);
        let r = LatticeBasis::new(4, vec![z.clone(), z.negated()]).unwrap();
        assert!(compose_move(&r, &[1, 1]).unwrap().is_zero());
        assert!(compose_move(&b, &[1]).is_err());
        let big = LatticeBasis::new(1, vec![Move::new(vec![i64::MAX])]).unwrap();
        assert!(matches!(compose_move(&big, &[2]), Err(Error::Overflow(_))));
    }

    #[test]
    fn proposer_matches_compose() {
        let b = LatticeBasis::new(
            4,
            vec![Move::new(vec![1, -1, -1, 1]), Move::new(vec![1, -1, -1, 1]).negated()],
        )
        .unwrap();
        let dist = CoefficientDistribution::Poisson(1.0);
        let mut p = Proposer::new(&b, dist).unwrap();
        let mut r1 = RandomSource::new(5);
        let mut r2 = RandomSource::new(5);
        for _ in 0..500 {
            let sparse = p.propose(&mut r1).unwrap().to_vec();
            let dense = draw_move(&b, &dist, &mut r2).unwrap();
            let mut rebuilt = vec![0; 4];
            for (i, v) in sparse {
                rebuilt[i] = v;
            }
            assert_eq!(rebuilt, dense.into_inner());
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let b = LatticeBasis::new(2, vec![Move::new(vec![1, -1])]).unwrap();
        let dist = CoefficientDistribution::Geometric(0.4);
        let draw = |seed| {
            let mut rng = RandomSource::new(seed);
            (0..50).map(|_| draw_move(&b, &dist, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
        let s = RandomSource::new(1);
        let (mut a, mut c) = (s.split(0), s.split(1));
        assert_ne!(a.next_u64(), c.next_u64());
    }
}
