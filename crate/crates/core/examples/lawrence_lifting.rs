//! Lawrence lifting of a small configuration in both basis styles.
//!
//! Run with `cargo run --example lawrence_lifting -- [r]`.

use lattice_mcmc::configurations::{lawrence_r, lift_lattice_basis, Configuration, LiftStyle};
use lattice_mcmc::intkernel::{is_integer_combination, kernel_lattice_basis, IntMatrix};

fn main() -> lattice_mcmc::Result<()> {
    let r: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("r"));
    let base = Configuration::from_matrix(IntMatrix::from_rows(&[vec![1, 1, 1], vec![0, 1, 2]])?, "A");
    let basis = kernel_lattice_basis(&base.matrix)?;
    let lifted = lawrence_r(&base, r)?;
    println!("A is {} x {}, kernel rank {}", base.matrix.rows(), base.num_cells(), basis.len());
    println!("Lawrence lifting r = {r}: {} x {}, kernel rank {}", lifted.matrix.rows(), lifted.num_cells(), lifted.kernel_dim()?);

    let reference = kernel_lattice_basis(&lifted.matrix)?;
    for style in [LiftStyle::LastSlicePivot, LiftStyle::PairwiseSymmetric] {
        let lb = lift_lattice_basis(&base, &basis, r, style)?;
        lb.check_kernel(&lifted.matrix)?;
        let spans = reference
            .moves()
            .iter()
            .all(|z| matches!(is_integer_combination(z, &lb), Ok(Some(_))));
        println!("{style}: {} moves, spans the kernel lattice: {spans}", lb.len());
        for m in lb.moves().iter().take(3) {
            println!("  {:?}", m.as_slice());
        }
    }
    Ok(())
}
