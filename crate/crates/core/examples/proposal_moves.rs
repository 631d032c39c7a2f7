//! Random moves drawn from a lattice basis under both coefficient laws.
//!
//! Run with `cargo run --example proposal_moves -- [draws] [seed]`.

use lattice_mcmc::configurations::{no_three_factor_lattice_basis, LiftStyle};
use lattice_mcmc::movegen::{draw_move, CoefficientDistribution, RandomSource};

fn main() -> lattice_mcmc::Result<()> {
    let mut args = std::env::args().skip(1);
    let draws: usize = args.next().map_or(10_000, |s| s.parse().expect("draws"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let basis = no_three_factor_lattice_basis(3, 3, 3, LiftStyle::LastSlicePivot)?;

    for dist in [
        CoefficientDistribution::poisson(1.0)?,
        CoefficientDistribution::poisson(10.0)?,
        CoefficientDistribution::geometric(0.5)?,
        CoefficientDistribution::geometric(0.1)?,
    ] {
        let mut rng = RandomSource::new(seed);
        let (mut zero, mut degree, mut support) = (0usize, 0i64, 0usize);
        for _ in 0..draws {
            let z = draw_move(&basis, &dist, &mut rng)?;
            zero += z.is_zero() as usize;
            degree += z.degree();
            support += z.support().len();
        }
        let n = draws as f64;
        println!(
            "{dist:>16}: mean degree {:7.2}, mean support {:5.2} of {} cells, zero moves {zero}",
            degree as f64 / n,
            support as f64 / n,
            basis.cells()
        );
    }
    let mut rng = RandomSource::new(seed);
    let z = draw_move(&basis, &CoefficientDistribution::poisson(1.0)?, &mut rng)?;
    println!("one Poisson(1) move: {:?}", z.as_slice());
    Ok(())
}
