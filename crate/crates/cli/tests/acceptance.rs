//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure or overrun of a criterion's time budget.

use std::process::Command;
use std::time::{Duration, Instant};

use ssdd_cli::experiment::{cmd_fig1, cmd_fig2, ExperimentConfig};
use ssdd_cli::table::{cmd_table1, cod_parameters};
use ssdd_core::builtin;
use ssdd_core::infotheory::{
    capacity_relation_check, clpod_mmi_exact, mimo_capacity, ssdd_mmi_estimate, ssdd_upper_bound,
};
use ssdd_core::verify::{gram_moments, gram_offdiagonal_ratio, lemma_residuals};
use ssdd_core::{ClpodMethod, DispersionSet64, Normalization, RateParameters, RngSpec, SnrSpec64};

const TOL: f64 = 1e-9;
const K: f64 = 3.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn snr(rho: f64) -> SnrSpec64 {
    SnrSpec64::new(rho).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn table1() -> Outcome {
    let mut out = Vec::new();
    let code = ssdd_cli::run(["ssdd", "table1"], &mut out, &mut std::io::sink());
    check(code == 0, || format!("exit code {code}"))?;
    let expected = "M,ssdd_rate,cod_Q,cod_T,cod_rate\n\
                    2,1,2,2,1\n\
                    3,3/4,3,4,3/4\n\
                    4,3/4,3,4,3/4\n\
                    5,2/3,10,15,2/3\n\
                    6,2/3,20,30,2/3\n";
    let got = String::from_utf8(out).unwrap();
    check(got == expected, || format!("unexpected table:\n{got}"))?;
    for row in cmd_table1() {
        check(
            row.cod_rate == num_rational::Ratio::new(row.cod_q, row.cod_t),
            || format!("M={} rate is not Q/T", row.m),
        )?;
    }
    for set in builtin::all::<f64>() {
        let row = cod_parameters(set.num_tx()).unwrap();
        check(
            (row.cod_q as usize, row.cod_t as usize) == (set.num_symbols(), set.block_length()),
            || format!("{} does not match its table row", set.name()),
        )?;
    }
    Ok("5 rows exact; rate = Q/T; built-in codes match rows M=2,3,4".into())
}

fn mutations(set: &DispersionSet64) -> Vec<DispersionSet64> {
    let mut out = Vec::new();
    for (q, a) in set.matrices().iter().enumerate() {
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                let z = a[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    out.push(set.with_entry(q, r, c, -z).unwrap());
                }
            }
        }
    }
    out
}

fn code_classes() -> Outcome {
    let mut total = 0;
    for set in builtin::all::<f64>() {
        let rep = set.classify(TOL);
        check(rep.is_ssdd && rep.is_clpod && rep.is_cod, || {
            format!("{}: {rep:?}", set.name())
        })?;
        for (i, m) in mutations(&set).iter().enumerate() {
            let rep = m.classify(TOL);
            check(!(rep.is_ssdd && rep.is_clpod && rep.is_cod), || {
                format!("{} mutation {i} still passes every predicate", set.name())
            })?;
            total += 1;
        }
    }
    Ok(format!(
        "3 codes pass all predicates; {total}/{total} single-sign mutations detected"
    ))
}

fn lemma() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, set) in builtin::all::<f64>().iter().enumerate() {
        let r = lemma_residuals(set, 100, &mut RngSpec::new(0x1E, i as u64).stream());
        worst = worst.max(r.max_quadratic).max(r.max_bilinear);
        check(r.max_quadratic <= TOL && r.max_bilinear <= TOL, || {
            format!("{}: {r:?}", set.name())
        })?;
    }
    Ok(format!("100 pairs per code, max residual {worst:e}"))
}

fn gram_diagonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, set) in builtin::all::<f64>().iter().enumerate() {
        for n in [1, 2] {
            let ratio = ok(gram_offdiagonal_ratio(set, n, 1000, 0x15 + i as u64))?;
            worst = worst.max(ratio);
            check(ratio < TOL, || {
                format!("{} N={n}: ratio {ratio:e}", set.name())
            })?;
        }
    }
    Ok(format!(
        "1000 channels per code and N in {{1,2}}, max off/diag {worst:e}"
    ))
}

fn gram_expectation() -> Outcome {
    let mut worst_z: f64 = 0.0;
    for (i, set) in builtin::all::<f64>().iter().enumerate() {
        let m = ok(gram_moments(set, 1, 100_000, 0x16 + i as u64))?;
        let target = set.power_diagonal().to_matrix();
        check(m.within(&target, K, 1e-12), || {
            format!("{}: excess {:e}", set.name(), m.max_excess(&target, K))
        })?;
        for q in 0..target.nrows() {
            worst_z = worst_z.max((m.mean[(q, q)] - target[(q, q)]).abs() / m.std_error[(q, q)]);
        }
    }
    Ok(format!(
        "10^5 draws per code, largest diagonal |z| = {worst_z:.3}"
    ))
}

fn alamouti_capacity() -> Outcome {
    let q = ok(clpod_mmi_exact(
        snr(10.0),
        2,
        1,
        RateParameters::new(2, 2).unwrap(),
        Normalization::Paper,
        ClpodMethod::default(),
    ))?;
    let c = ok(mimo_capacity(snr(10.0), 2, 1, 1_000_000, 0x06))?;
    let rel = (q.value - c.value).abs() / c.value;
    check(q.agrees_with(&c, K), || {
        format!(
            "clpod {} vs capacity {} ± {}",
            q.value, c.value, c.std_error
        )
    })?;
    Ok(format!(
        "clpod {:.6}, capacity {:.6} ± {:.6}, relative difference {:.2e}",
        q.value, c.value, c.std_error, rel
    ))
}

fn capacity_identity_grid() -> Outcome {
    let mut worst_z: f64 = 0.0;
    let mut worst_paired: f64 = 0.0;
    let mut count = 0;
    for m in [1, 2, 4] {
        for n in [1, 2, 4] {
            for (q, t) in [(1, 1), (2, 2), (3, 4)] {
                for rho in [10.0, 100.0, 1000.0] {
                    let rate = RateParameters::new(q, t).unwrap();
                    let seed = ssdd_core::channel::derive_seed(0x07, count);
                    let (a, b) = ok(capacity_relation_check(
                        snr(rho),
                        m,
                        n,
                        rate,
                        ClpodMethod::default(),
                        100_000,
                        seed,
                    ))?;
                    worst_z = worst_z.max((a.value - b.value).abs() / a.combined_std_error(&b));
                    check(a.agrees_with(&b, K), || {
                        format!(
                            "M={m} N={n} Q/T={q}/{t} rho={rho}: {} vs {} ± {}",
                            a.value, b.value, b.std_error
                        )
                    })?;
                    // Same draws on both sides: the identity then holds per sample.
                    let (pa, pb) = ok(capacity_relation_check(
                        snr(rho),
                        m,
                        n,
                        rate,
                        ClpodMethod::MonteCarlo {
                            trials: 1_000,
                            seed,
                        },
                        1_000,
                        seed,
                    ))?;
                    let rel = (pa.value - pb.value).abs() / pb.value;
                    worst_paired = worst_paired.max(rel);
                    check(rel < TOL, || {
                        format!("M={m} N={n} Q/T={q}/{t} rho={rho}: paired rel {rel:e}")
                    })?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!(
        "{count} configurations, largest |z| = {worst_z:.3}; paired-sample relative difference ≤ {worst_paired:.1e}"
    ))
}

fn jensen_sandwich() -> Outcome {
    let mut min_margin = f64::INFINITY;
    let mut count = 0u64;
    for set in builtin::all::<f64>() {
        for rho in [10.0, 100.0, 1000.0] {
            for n in [1, 2, 4] {
                let e = ok(ssdd_mmi_estimate(&set, snr(rho), n, 100_000, 0x08 + count))?;
                let b = ssdd_upper_bound(snr(rho), n, RateParameters::of_code(&set));
                min_margin = min_margin.min(b.value - e.value);
                check(e.at_most(&b, K), || {
                    format!(
                        "{} rho={rho} N={n}: {} ± {} > {}",
                        set.name(),
                        e.value,
                        e.std_error,
                        b.value
                    )
                })?;
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} cases, smallest bound - estimate = {min_margin:.4}"
    ))
}

fn quadrature_vs_mc() -> Outcome {
    let mut details = Vec::new();
    for m in [2, 4, 8] {
        let rate = cod_parameters(m).unwrap().rate_parameters();
        let q = |nodes| {
            clpod_mmi_exact(
                snr(1000.0),
                m,
                m,
                rate,
                Normalization::Paper,
                ClpodMethod::Quadrature { nodes },
            )
        };
        let (q128, q256) = (ok(q(128))?, ok(q(256))?);
        let mc = ok(clpod_mmi_exact(
            snr(1000.0),
            m,
            m,
            rate,
            Normalization::Paper,
            ClpodMethod::MonteCarlo {
                trials: 1_000_000,
                seed: 0x09 + m as u64,
            },
        ))?;
        let z = (mc.value - q128.value).abs() / mc.std_error;
        let drift = (q256.value - q128.value).abs();
        check(z <= K, || {
            format!(
                "M=N={m}: quadrature {} vs MC {} ± {}",
                q128.value, mc.value, mc.std_error
            )
        })?;
        check(drift < TOL, || {
            format!("M=N={m}: node doubling moved {drift:e}")
        })?;
        details.push(format!("M={m}: |z|={z:.2}, drift={drift:.1e}"));
    }
    Ok(details.join("; "))
}

fn fig1_properties() -> Outcome {
    let rows = ok(cmd_fig1(&ExperimentConfig::fig1_default()))?;
    check(rows.len() == 5, || format!("{} rows", rows.len()))?;
    for r in &rows {
        let sigma = K * r.cod_mmi.std_error;
        check(r.bound + sigma >= r.cod_mmi.value, || {
            format!("M={}: bound below COD MMI", r.m)
        })?;
        check(r.cod_mmi.value + sigma >= 0.0, || {
            format!("M={}: negative COD MMI", r.m)
        })?;
        check(r.cod_mmi.at_most(&r.capacity, K), || {
            format!("M={}: COD MMI above capacity", r.m)
        })?;
    }
    let gap = |r: &ssdd_cli::experiment::Fig1Row| (r.bound - r.cod_mmi.value) / r.bound;
    let (g2, g6) = (gap(&rows[0]), gap(&rows[4]));
    check(rows[0].m == 2 && rows[4].m == 6 && g2 < g6, || {
        format!("gap M=2 {g2} not below M=6 {g6}")
    })?;
    Ok(format!(
        "relative gaps: {}",
        rows.iter()
            .map(|r| format!("M={} {:.4}", r.m, gap(r)))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn fig2_properties() -> Outcome {
    let rows = ok(cmd_fig2(&ExperimentConfig::fig2_default()))?;
    check(rows.len() == 21, || format!("{} rows", rows.len()))?;
    let mut summary = Vec::new();
    for db in [10.0, 20.0, 30.0] {
        let rates: Vec<f64> = rows
            .iter()
            .filter(|r| r.snr_db == db)
            .map(|r| r.necessary_rate)
            .collect();
        check(rates.iter().all(|&q| q > 0.75), || {
            format!("{db} dB: rate at or below 3/4: {rates:?}")
        })?;
        check(rates.windows(2).all(|w| w[1] > w[0]), || {
            format!("{db} dB: not increasing: {rates:?}")
        })?;
        let steps: Vec<f64> = rates.windows(2).map(|w| w[1] - w[0]).collect();
        let (lo, hi) = steps
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
        summary.push(format!(
            "{db} dB: {:.3}..{:.3}, step {lo:.3}..{hi:.3}",
            rates[0], rates[6]
        ));
    }
    Ok(summary.join("; "))
}

fn determinism() -> Outcome {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ssdd"))
            .args(["fig1", "--seed", "42", "--trials", "10000"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        check(out.status.success(), || format!("exit {:?}", out.status))?;
        Ok::<_, String>(out.stdout)
    };
    let (a, b) = (run("1")?, run("4")?);
    check(!a.is_empty() && a == b, || {
        "outputs differ between 1 and 4 threads".into()
    })?;
    Ok(format!("{} identical bytes with 1 and 4 threads", a.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("parameter table reproduction", 1, table1),
        ("code-class verification and mutations", 1, code_classes),
        ("lemma identities", 1, lemma),
        ("per-realization Gram diagonality", 5, gram_diagonality),
        ("Gram expectation identity", 10, gram_expectation),
        ("Alamouti capacity optimality", 30, alamouti_capacity),
        ("CLPOD capacity identity grid", 120, capacity_identity_grid),
        ("Jensen sandwich", 120, jensen_sandwich),
        ("quadrature vs Monte Carlo", 60, quadrature_vs_mc),
        ("bound vs COD MMI figure properties", 60, fig1_properties),
        ("necessary-rate figure properties", 180, fig2_properties),
        ("thread-count determinism", 30, determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status} {name} ({:.2} s of {budget} s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
