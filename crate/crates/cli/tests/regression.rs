//! Frozen outputs from the first verified run. Numeric fields are compared
//! to 1e-9 relative so that platform `libm` differences do not matter.

fn compare(args: &[&str], baseline: &str) {
    let mut out = Vec::new();
    let argv = std::iter::once("ssdd").chain(args.iter().copied());
    assert_eq!(ssdd_cli::run(argv, &mut out, &mut std::io::sink()), 0);
    let path = format!("{}/tests/baselines/{baseline}", env!("CARGO_MANIFEST_DIR"));
    let frozen = std::fs::read_to_string(path).unwrap();
    let got = String::from_utf8(out).unwrap();
    let (got_lines, frozen_lines): (Vec<_>, Vec<_>) =
        (got.lines().collect(), frozen.lines().collect());
    assert_eq!(got_lines.len(), frozen_lines.len());
    assert_eq!(got_lines[0], frozen_lines[0]);
    for (g, f) in got_lines.iter().zip(&frozen_lines).skip(1) {
        for (a, b) in g.split(',').zip(f.split(',')) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!(
                    (x - y).abs() <= 1e-9 * y.abs().max(1e-300),
                    "{a} vs {b} in row {g}"
                ),
                _ => assert_eq!(a, b),
            }
        }
    }
}

#[test]
fn fig1_seed_42() {
    compare(
        &["fig1", "--seed", "42", "--trials", "10000"],
        "fig1_seed42_trials1e4.csv",
    );
}

#[test]
fn fig2_seed_42() {
    compare(
        &["fig2", "--seed", "42", "--trials", "10000"],
        "fig2_seed42_trials1e4.csv",
    );
}

#[test]
fn fig2_two_antennas_30_db_with_1e6_trials() {
    compare(
        &[
            "fig2",
            "--antennas",
            "2",
            "--snr-db",
            "30",
            "--trials",
            "1e6",
        ],
        "fig2_m2_30db_trials1e6.csv",
    );
}
