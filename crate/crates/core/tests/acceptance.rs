//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use twoproj::halmos::DEFAULT_CLASS_TOL;
use twoproj::harness::{TrialKind, TrialRecord};
use twoproj::linalg::operator_norm;
use twoproj::random::GaussianSource;
use twoproj::spectral::{oracle_pqp_spectrum, SPECTRUM_MAX, SPECTRUM_MIN};
use twoproj::synth::{build_pair, grid_realization, SynthesisSpec};
use twoproj::{
    decompose, hausdorff_distance, oracle_anticommutator_spectrum, run_campaign,
    schur_factorization_residual, CampaignConfig, HalmosDims, Matrix, PointSet, ProjectionPair,
    VerificationReport,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn worked_pair() -> Outcome {
    let t0 = Instant::now();
    let (c, s) = ((PI / 3.0).cos(), (PI / 3.0).sin());
    let q = Matrix::from_rows(&[[c * c, c * s], [c * s, s * s]]).map_err(|e| e.to_string())?;
    let pair = ProjectionPair::new(Matrix::from_diag(&[1.0, 0.0]), q).map_err(|e| e.to_string())?;
    let pqp = oracle_pqp_spectrum(&pair).map_err(|e| e.to_string())?;
    let anti = oracle_anticommutator_spectrum(&pair).map_err(|e| e.to_string())?;
    let pq_norm = operator_norm(&pair.pq()).map_err(|e| e.to_string())?;
    let anti_norm = operator_norm(&pair.anticommutator()).map_err(|e| e.to_string())?;
    let form = decompose(&pair, DEFAULT_CLASS_TOL).map_err(|e| e.to_string())?;
    let tol = 1e-10;
    let ok = pqp.len() == 2
        && close(pqp.values()[0], 0.0, tol)
        && close(pqp.values()[1], 0.25, tol)
        && anti.len() == 2
        && close(anti.values()[0], -0.25, tol)
        && close(anti.values()[1], 0.75, tol)
        && close(pq_norm, 0.5, tol)
        && close(anti_norm, 0.75, tol)
        && form.dims() == HalmosDims::new(0, 0, 1, 1, 0, 0)
        && close(form.q0_eigs()[0], 0.25, tol);
    ensure(
        ok,
        format!(
            "σ(PQP) {:?}, σ(PQ+QP) {:?}, ‖PQ‖ {pq_norm}, ‖PQ+QP‖ {anti_norm}, dims {:?}, Q0 {:?} ({:.2?})",
            pqp.values(),
            anti.values(),
            form.dims().0,
            form.q0_eigs(),
            t0.elapsed()
        ),
    )
}

fn random_records(report: &VerificationReport) -> impl Iterator<Item = &TrialRecord> {
    report
        .records
        .iter()
        .filter(|r| r.kind == TrialKind::Random)
}

fn spectral_law(report: &VerificationReport, secs: f64) -> Outcome {
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    let mut worst_pqp: f64 = 0.0;
    let mut bad = 0;
    let mut count = 0;
    for r in random_records(report) {
        count += 1;
        match (r.spectral_deviation, r.pqp_deviation) {
            (Some(a), Some(b)) if a <= tol && b <= tol => {
                worst = worst.max(a);
                worst_pqp = worst_pqp.max(b);
            }
            _ => bad += 1,
        }
    }
    ensure(
        bad == 0 && count == 1000 && secs < 60.0,
        format!(
            "{} / {count} random pairs match; max deviation {worst:e} (PQ+QP), {worst_pqp:e} (PQP); campaign {secs:.1} s",
            count - bad
        ),
    )
}

fn inclusions(report: &VerificationReport) -> Outcome {
    let bad = random_records(report)
        .filter(|r| !(r.lower_ok && r.upper_ok))
        .count();
    let worst = random_records(report)
        .filter_map(|r| r.inclusion_distance)
        .fold(0.0, f64::max);
    ensure(
        bad == 0,
        format!("{bad} trials violate an inclusion; max witness distance {worst:e}"),
    )
}

fn norm_identity(report: &VerificationReport) -> Outcome {
    let tol = 1e-9;
    let bad = report
        .records
        .iter()
        .filter(|r| r.norm_deviation.is_none_or(|d| d > tol))
        .count();
    let worst = report
        .records
        .iter()
        .filter_map(|r| r.norm_deviation)
        .fold(0.0, f64::max);
    let attaining = report
        .records
        .iter()
        .filter(|r| r.kind == TrialKind::Synthesized)
        .filter(|r| r.dims.is_some_and(|d| d.h1() > 0))
        .filter(|r| r.norm_lhs.is_some_and(|v| close(v, 2.0, tol)))
        .count();
    ensure(
        bad == 0 && attaining >= 50,
        format!(
            "{bad} of {} trials off; max deviation {worst:e}; {attaining} synthesized h1 > 0 pairs with norm 2",
            report.records.len()
        ),
    )
}

fn bound(report: &VerificationReport) -> Outcome {
    let tol = 1e-9;
    let bad = report.records.iter().filter(|r| !r.bound_ok).count();
    let pair = grid_realization(64).map_err(|e| e.to_string())?;
    let s = oracle_anticommutator_spectrum(&pair).map_err(|e| e.to_string())?;
    let (lo, hi) = (s.min().unwrap_or(f64::NAN), s.max().unwrap_or(f64::NAN));
    ensure(
        bad == 0 && close(lo, SPECTRUM_MIN, tol) && close(hi, SPECTRUM_MAX, tol),
        format!("{bad} spectra outside the bound; grid pair attains [{lo}, {hi}]"),
    )
}

/// `k` points in `[sep, 1 − sep]` pairwise at least `sep` apart.
fn separated_points(rng: &mut GaussianSource, k: usize, sep: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.uniform(sep, 1.0 - sep)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= sep) {
            return v;
        }
    }
}

fn round_trip(report: &VerificationReport) -> Outcome {
    let bad = report
        .records
        .iter()
        .filter(|r| {
            let recon = r
                .reconstruction_residuals
                .is_some_and(|(rp, rq)| rp.max(rq) <= 1e-8 * r.n as f64);
            let unit = r.d_unitarity_residual.is_some_and(|u| u <= 1e-8);
            !(recon && unit)
        })
        .count();
    let worst = report
        .records
        .iter()
        .filter_map(|r| {
            r.reconstruction_residuals
                .map(|(rp, rq)| rp.max(rq) / r.n as f64)
        })
        .fold(0.0, f64::max);

    let mut rng = GaussianSource::new(0x5eed_0006);
    let mut recovered = 0;
    let mut worst_q0: f64 = 0.0;
    let specs = 100;
    for i in 0..specs {
        let k = rng.uniform_int(0, 16);
        let [h1, h2, h5, h6] = [(); 4].map(|_| rng.uniform_int(0, 2));
        if 2 * k + h1 + h2 + h5 + h6 == 0 {
            continue;
        }
        let q0 = separated_points(&mut rng, k, 1e-4);
        let spec = SynthesisSpec::from_q0(q0.clone())
            .with_dims(h1, h2, h5, h6)
            .with_conjugation(i);
        assert!(spec.dim() <= 40);
        let form = build_pair(&spec)
            .and_then(|pair| decompose(&pair, DEFAULT_CLASS_TOL))
            .map_err(|e| format!("spec {i}: {e}"))?;
        let dev = q0
            .iter()
            .zip(form.q0_eigs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if form.dims() == HalmosDims::new(h1, h2, k, k, h5, h6) && dev <= 1e-9 {
            recovered += 1;
            worst_q0 = worst_q0.max(dev);
        }
    }
    ensure(
        bad == 0 && recovered == specs,
        format!(
            "{bad} trials over the residual limits (max residual/n {worst:e}); {recovered} / {specs} specs recovered, max q0 error {worst_q0:e}"
        ),
    )
}

fn grid() -> Outcome {
    let mut distances = Vec::new();
    let mut ok = true;
    let mut last_secs = 0.0;
    for m in [4usize, 8, 16, 32, 64] {
        let t0 = Instant::now();
        let pair = grid_realization(m).map_err(|e| e.to_string())?;
        let s = oracle_anticommutator_spectrum(&pair).map_err(|e| e.to_string())?;
        let h = hausdorff_distance(s.values(), PointSet::Interval(SPECTRUM_MIN, SPECTRUM_MAX))
            .map_err(|e| e.to_string())?;
        last_secs = t0.elapsed().as_secs_f64();
        ok &= h <= 3.0 / m as f64;
        distances.push(h);
    }
    ok &= distances.windows(2).all(|w| w[1] <= w[0]);
    ok &= last_secs < 5.0;
    ensure(
        ok,
        format!("Hausdorff distances {distances:?}; m = 64 took {last_secs:.2} s"),
    )
}

fn schur() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let lambda = -2.0 + 5.0 * (i as f64 + 0.5) / 100.0;
        for j in 0..100 {
            let l0 = (j as f64 + 0.5) / 100.0;
            let r = schur_factorization_residual(lambda, &[l0]).map_err(|e| e.to_string())?;
            worst = worst.max(r);
        }
    }
    ensure(
        worst <= 1e-13,
        format!("max residual {worst:e} over 10000 points"),
    )
}

/// Full report JSON, and the JSON of its records and aggregate alone (the
/// config echoes the `parallel` flag).
fn fuzz_json(parallel: bool) -> Result<(String, String), String> {
    let cfg = CampaignConfig {
        trials: 200,
        dim_max: 24,
        seed: 99,
        include_synthesized: true,
        parallel,
        ..Default::default()
    };
    let mut report = run_campaign(&cfg).map_err(|e| e.to_string())?;
    report.strip_timing();
    let full = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    let results =
        serde_json::to_string(&(&report.records, &report.aggregate)).map_err(|e| e.to_string())?;
    Ok((full, results))
}

fn determinism() -> Outcome {
    let serial = (fuzz_json(false)?, fuzz_json(false)?);
    let parallel = (fuzz_json(true)?, fuzz_json(true)?);
    ensure(
        serial.0 == serial.1 && parallel.0 == parallel.1 && serial.0 .1 == parallel.0 .1,
        format!(
            "serial runs identical: {}, parallel runs identical: {}, serial and parallel trial results identical: {}",
            serial.0 == serial.1,
            parallel.0 == parallel.1,
            serial.0 .1 == parallel.0 .1
        ),
    )
}

fn main() -> ExitCode {
    let cfg = CampaignConfig {
        trials: 1000,
        dim_min: 1,
        dim_max: 32,
        seed: 20240601,
        include_synthesized: true,
        parallel: true,
        ..Default::default()
    };
    let t0 = Instant::now();
    let report = run_campaign(&cfg).expect("campaign config is valid");
    let secs = t0.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("worked pair", worked_pair()),
        ("exact spectral law", spectral_law(&report, secs)),
        ("inclusions", inclusions(&report)),
        ("norm identity", norm_identity(&report)),
        ("spectral bound", bound(&report)),
        ("canonical round trip", round_trip(&report)),
        ("grid realization", grid()),
        ("Schur complement", schur()),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
