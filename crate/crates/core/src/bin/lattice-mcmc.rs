fn main() {
    std::process::exit(lattice_mcmc::cli::main_with_args(std::env::args_os()));
}
