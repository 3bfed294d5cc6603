use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use twoproj::harness::{hausdorff_distance, multiset_match, PointSet};
use twoproj::io::{parse_dims, parse_real_list, PairFile};
use twoproj::projection::{ProjectionPair, DEFAULT_VALIDATION_TOL};
use twoproj::spectral::{
    check_bound, check_norm_formula, check_theorem_inclusions, oracle_anticommutator_spectrum,
    oracle_pqp_spectrum, predicted_anticommutator_spectrum, predicted_pqp_spectrum, SPECTRUM_MAX,
    SPECTRUM_MIN,
};
use twoproj::synth::{build_pair, grid_spec, spec_for_targets, PreimagePolicy, SynthesisSpec};
use twoproj::{
    decompose as halmos_decompose, reconstruction_residual, CampaignConfig, Error, ErrorKind,
};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(Error),
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parse => 1,
                ErrorKind::Validation => 2,
                ErrorKind::Numerical => 3,
            },
            CliError::ChecksFailed(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(msg) | CliError::ChecksFailed(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult = Result<(), CliError>;

fn load_pair(path: &Path) -> Result<ProjectionPair, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(PairFile::parse(&bytes)?.to_pair(DEFAULT_VALIDATION_TOL)?)
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn decompose(input: &Path, tol: f64) -> CliResult {
    let pair = load_pair(input)?;
    let form = halmos_decompose(&pair, tol)?;
    let (rp, rq) = reconstruction_residual(&form, &pair)?;
    print_json(&json!({
        "n": form.n(),
        "dims": form.dims(),
        "q0_eigs": form.q0_eigs(),
        "d_unitarity_residual": form.d_unitarity_residual(),
        "reconstruction_residuals": [rp, rq],
    }));
    Ok(())
}

pub fn predict(input: &Path, tol: f64, norm_tol: f64) -> CliResult {
    let pair = load_pair(input)?;
    let form = halmos_decompose(&pair, tol)?;
    let predicted = predicted_anticommutator_spectrum(&form);
    let oracle = oracle_anticommutator_spectrum(&pair)?;
    let (multiset_ok, deviation) = multiset_match(&predicted, &oracle, tol);
    let (pqp_ok, pqp_deviation) = multiset_match(
        &predicted_pqp_spectrum(&form),
        &oracle_pqp_spectrum(&pair)?,
        tol,
    );
    let norm = check_norm_formula(&pair, norm_tol)?;
    let bound_ok = check_bound(&oracle, 1e-9);
    let inclusion = check_theorem_inclusions(&pair, &form, tol)?;
    let hausdorff = hausdorff_distance(
        oracle.values(),
        PointSet::Interval(SPECTRUM_MIN, SPECTRUM_MAX),
    )?;

    let all_ok =
        multiset_ok && pqp_ok && norm.ok && bound_ok && inclusion.lower_ok && inclusion.upper_ok;
    print_json(&json!({
        "n": form.n(),
        "dims": form.dims(),
        "predicted": predicted.values(),
        "oracle": oracle.values(),
        "multiset_ok": multiset_ok,
        "multiset_deviation": deviation.is_finite().then_some(deviation),
        "pqp_ok": pqp_ok,
        "pqp_deviation": pqp_deviation.is_finite().then_some(pqp_deviation),
        "norm_lhs": norm.lhs,
        "norm_rhs": norm.rhs,
        "norm_ok": norm.ok,
        "bound_ok": bound_ok,
        "inclusion": {
            "lower_ok": inclusion.lower_ok,
            "upper_ok": inclusion.upper_ok,
            "max_unmatched_distance": inclusion.max_unmatched_distance,
            "lower_witnesses": inclusion.lower_witnesses,
            "upper_witnesses": inclusion.upper_witnesses,
        },
        "hausdorff_to_bound_interval": hausdorff,
        "all_ok": all_ok,
    }));
    if all_ok {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(
            "one or more spectral checks failed".into(),
        ))
    }
}

pub enum Source {
    Q0(String),
    Targets(String),
    Grid(usize),
}

pub fn synthesize(
    source: Source,
    dims: Option<&str>,
    conjugate_seed: Option<u64>,
    policy: PreimagePolicy,
    output: Option<&Path>,
) -> CliResult {
    let mut spec = match source {
        Source::Q0(list) => SynthesisSpec::from_q0(parse_real_list(&list)?),
        Source::Targets(list) => spec_for_targets(&parse_real_list(&list)?, policy)?,
        Source::Grid(m) => grid_spec(m)?,
    };
    if let Some(d) = dims {
        let [h1, h2, h5, h6] = parse_dims(d)?;
        spec = spec.with_dims(h1, h2, h5, h6);
    }
    if let Some(seed) = conjugate_seed {
        spec = spec.with_conjugation(seed);
    }
    let pair = build_pair(&spec)?;
    let spectrum = oracle_anticommutator_spectrum(&pair)?;
    let hausdorff = hausdorff_distance(
        spectrum.values(),
        PointSet::Interval(SPECTRUM_MIN, SPECTRUM_MAX),
    )?;
    if let Some(path) = output {
        write_file(path, &PairFile::from_pair(&pair).to_json())?;
    }
    let mut q0 = spec.q0_targets.clone();
    q0.sort_by(f64::total_cmp);
    let k = q0.len();
    print_json(&json!({
        "n": pair.dim(),
        "dims": [spec.h1, spec.h2, k, k, spec.h5, spec.h6],
        "q0_eigs": q0,
        "spectrum": spectrum.values(),
        "hausdorff_to_bound_interval": hausdorff,
    }));
    Ok(())
}

pub fn fuzz(config: &CampaignConfig, omit_timing: bool, json_path: Option<&Path>) -> CliResult {
    let mut report = twoproj::run_campaign(config)?;
    if omit_timing {
        report.strip_timing();
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match json_path {
        Some(path) => write_file(path, &text)?,
        None => println!("{text}"),
    }
    let agg = &report.aggregate;
    eprintln!(
        "{} / {} trials passed (max spectral deviation {:e}, max norm deviation {:e})",
        agg.pass_count, agg.records, agg.max_spectral_deviation, agg.max_norm_deviation
    );
    for r in report.failures() {
        eprintln!(
            "  failed: kind {:?} index {} seed {} n {} ranks ({}, {}){}",
            r.kind,
            r.index,
            r.seed,
            r.n,
            r.rank_p,
            r.rank_q,
            r.error
                .as_deref()
                .map(|e| format!(": {e}"))
                .unwrap_or_default()
        );
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!(
            "{} trials failed",
            agg.fail_count
        )))
    }
}
