//! Integer kernel lattice basis of a configuration matrix via the Hermite
//! normal form, with a membership check.
//!
//! Run with `cargo run --example kernel_basis`.

use lattice_mcmc::configurations::{checkered_design, poisson_regression_config};
use lattice_mcmc::intkernel::{hermite_normal_form, is_integer_combination, kernel_lattice_basis, IntMatrix, Move};

fn main() -> lattice_mcmc::Result<()> {
    let a = IntMatrix::from_rows(&[vec![1, 1, 1, 1], vec![1, 2, 3, 4]])?;
    let hf = hermite_normal_form(&a)?;
    println!("A =\n{a}");
    println!("H =\n{}", hf.h);
    println!("U =\n{}", hf.u);

    let basis = kernel_lattice_basis(&a)?;
    println!("kernel dimension {}", basis.len());
    for m in basis.moves() {
        println!("  {:?} (degree {})", m.as_slice(), m.degree());
    }

    let z = Move::new(vec![1, -1, -1, 1]);
    match is_integer_combination(&z, &basis)? {
        Some(alpha) => println!("{:?} = combination with coefficients {alpha:?}", z.as_slice()),
        None => println!("{:?} is not in the lattice", z.as_slice()),
    }

    // Poisson regression on the checkered 4x4 design crossed with 5 levels
    let design = checkered_design(4, 4, Some(5))?;
    let pr = poisson_regression_config(&design, &[0, 1])?;
    let basis = kernel_lattice_basis(&pr.matrix)?;
    let degrees: Vec<i64> = basis.moves().iter().map(Move::degree).collect();
    println!("checkered Poisson regression: {} moves, degrees {degrees:?}", basis.len());
    Ok(())
}
