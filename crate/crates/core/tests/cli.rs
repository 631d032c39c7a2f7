mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lattice_mcmc::configurations::{lawrence_r, Configuration};
use lattice_mcmc::textfmt;

use common::matrix;

const TWISTED_CUBIC: &str = "# moment curve\n2 4\n1 1 1 1\n1 2 3 4\n";
const INDEPENDENCE_2X2: &str = "4 4\n1 1 0 0\n0 0 1 1\n1 0 1 0\n0 1 0 1\n";

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-mcmc"))
        .args(args)
        .env("LATTICE_MCMC_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn kernel_writes_a_basis_of_the_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "cubic.mat", TWISTED_CUBIC);
    let o = run(&["kernel", &m], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("d = 2\n"));
    let basis = textfmt::parse_moves(&fs::read_to_string(dir.path().join("cubic.moves")).unwrap(), Some(4)).unwrap();
    let a = matrix(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]);
    assert_eq!(basis.len(), 2);
    basis.check_kernel(&a).unwrap();
}

#[test]
fn kernel_of_a_full_rank_matrix_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id.mat", "2 2\n1 0\n0 1\n");
    let target = dir.path().join("custom.moves");
    let o = run(&["kernel", &m, "-o", target.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("d = 0\n"));
    let basis = textfmt::parse_moves(&fs::read_to_string(target).unwrap(), Some(2)).unwrap();
    assert!(basis.is_empty());
}

#[test]
fn malformed_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.mat", "2 2\n1 x\n0 1\n");
    let o = run(&["kernel", &m], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let missing = dir.path().join("absent.mat");
    assert_eq!(run(&["kernel", missing.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "no-such-experiment"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["lift", &m], dir.path()).status.code(), Some(2));
}

#[test]
fn lift_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "cubic.mat", TWISTED_CUBIC);
    let base = Configuration::from_matrix(matrix(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]), "cubic");
    let expected = lawrence_r(&base, 3).unwrap();
    for (style, count) in [("last-slice", 4), ("pairwise", 6)] {
        let out = dir.path().join(style);
        let o = run(&["lift", &m, "-r", "3", "--style", style, "--out", out.to_str().unwrap()], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let lifted = textfmt::parse_matrix(&fs::read_to_string(out.join("cubic.lawrence3.mat")).unwrap()).unwrap();
        assert_eq!(lifted, expected.matrix);
        let moves =
            textfmt::parse_moves(&fs::read_to_string(out.join("cubic.lawrence3.moves")).unwrap(), Some(12)).unwrap();
        assert_eq!(moves.len(), count);
        moves.check_kernel(&lifted).unwrap();
    }
}

#[test]
fn lift_rejects_moves_outside_the_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "cubic.mat", TWISTED_CUBIC);
    let moves = write(dir.path(), "wrong.moves", "1 -1 0 0\n");
    let o = run(&["lift", &m, "-r", "2", "--moves", &moves], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

const QUICK: [&str; 4] = ["--burn-in", "100", "--iterations", "500"];

#[test]
fn test_command_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["test", "no3f:3,3,3", "--simulate", "135", "--seed", "3"];
    args.extend(QUICK);
    let o = run(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: lattice_mcmc::cli::run::RunReport = fs::read_to_string(dir.path().join("report.txt")).unwrap().parse().unwrap();
    assert_eq!(report.get("df"), Some("8"));
    assert_eq!(report.get("sample_size"), Some("135"));
    assert_eq!(report.get("samples"), Some("500"));
    for file in report.get("files").unwrap().split(' ') {
        assert!(dir.path().join(file).is_file(), "missing {file}");
    }
    let p: f64 = report.get("p_value").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert!(stdout(&o).contains("LR = "));
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["test", "no3f:3,3,3", "--simulate", "135", "--seed", "11"];
    args.extend(QUICK);
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    assert_eq!(run(&args, b.path()).status.code(), Some(0));
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn simulated_three_way_tables_avoid_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 1..=20 {
        let seed = seed.to_string();
        let args = [
            "test", "no3f:3,3,3", "--simulate", "135", "--seed", &seed, "--burn-in", "0", "--iterations", "50",
        ];
        let o = run(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "seed {seed}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn boundary_table_needs_the_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "indep.mat", INDEPENDENCE_2X2);
    let table = write(dir.path(), "x.table", "2 2\n0 0\n2 3\n");
    let o = run(&["test", &config, "--table", &table], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let mut args = vec!["test", &config, "--table", &table, "--allow-structural-zeros"];
    args.extend(QUICK);
    let o = run(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("structural_zeros = 2"));
}

#[test]
fn table_size_must_match_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(dir.path(), "x.table", "1 3\n1 2 3\n");
    let o = run(&["test", "no3f:2,2,2", "--table", &table], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
