//! Randomized verification campaigns.
//!
//! Each trial draws a dimension and two ranks, builds a random pair, and
//! runs every check of the toolkit on it. Trial `i` uses the seed
//! `derive_seed(config.seed, i)`; synthesized trial `i` uses
//! `derive_seed(!config.seed, i)`. A failing record carries its seed, so it
//! can be replayed with [`run_random_trial`] or [`run_synthesized_trial`].

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halmos::{decompose, reconstruction_residual, HalmosDims, HalmosForm, UNITARITY_TOL};
use crate::projection::{random_projection_pair, ProjectionPair};
use crate::random::{derive_seed, GaussianSource};
use crate::spectral::{
    check_bound, check_norm_formula, check_theorem_inclusions, oracle_anticommutator_spectrum,
    oracle_pqp_spectrum, predicted_anticommutator_spectrum, predicted_pqp_spectrum,
    SpectrumMultiset,
};
use crate::synth::{build_pair, SynthesisSpec};

pub const DEFAULT_NORM_TOL: f64 = 1e-9;
pub const DEFAULT_BOUND_TOL: f64 = 1e-9;
pub const DEFAULT_CAMPAIGN_CLASS_TOL: f64 = 1e-11;

/// `(ok, max positional deviation)`; the deviation is infinite when the
/// cardinalities differ.
pub fn multiset_match(a: &SpectrumMultiset, b: &SpectrumMultiset, tol: f64) -> (bool, f64) {
    if a.len() != b.len() {
        return (false, f64::INFINITY);
    }
    let dev = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    (dev <= tol, dev)
}

/// Second argument of [`hausdorff_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointSet<'a> {
    Finite(&'a [f64]),
    /// The closed interval `[lo, hi]`.
    Interval(f64, f64),
}

fn sorted_copy(a: &[f64]) -> Vec<f64> {
    let mut v = a.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn dist_to_sorted(x: f64, sorted: &[f64]) -> f64 {
    let i = sorted.partition_point(|&v| v < x);
    let right = sorted.get(i).map_or(f64::INFINITY, |&v| v - x);
    let left = if i > 0 {
        x - sorted[i - 1]
    } else {
        f64::INFINITY
    };
    left.min(right)
}

/// Symmetric Hausdorff distance between a finite set and a finite set or a
/// closed interval.
///
/// For an interval the sup over its points of the distance to `a` is
/// attained at an endpoint or at the midpoint of two consecutive points of
/// `a`, so it is computed exactly from those candidates.
pub fn hausdorff_distance(a: &[f64], b: PointSet<'_>) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Domain("Hausdorff distance of an empty set".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "Hausdorff distance of non-finite points".into(),
        ));
    }
    let sa = sorted_copy(a);
    match b {
        PointSet::Finite(b) => {
            if b.is_empty() {
                return Err(Error::Domain("Hausdorff distance of an empty set".into()));
            }
            let sb = sorted_copy(b);
            let ab = sa
                .iter()
                .map(|&x| dist_to_sorted(x, &sb))
                .fold(0.0, f64::max);
            let ba = sb
                .iter()
                .map(|&x| dist_to_sorted(x, &sa))
                .fold(0.0, f64::max);
            Ok(ab.max(ba))
        }
        PointSet::Interval(lo, hi) => {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
            }
            let to_interval = sa
                .iter()
                .map(|&x| (lo - x).max(x - hi).max(0.0))
                .fold(0.0, f64::max);
            let mut cover = dist_to_sorted(lo, &sa).max(dist_to_sorted(hi, &sa));
            for w in sa.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                if (lo..=hi).contains(&mid) {
                    cover = cover.max(dist_to_sorted(mid, &sa));
                }
            }
            Ok(to_interval.max(cover))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub trials: usize,
    pub dim_min: usize,
    pub dim_max: usize,
    pub seed: u64,
    /// Spectrum matching and inclusion tolerance.
    pub tol: f64,
    /// Window around 0 and 1 used by [`decompose`]. Random pairs carry only
    /// rounding error, so this is much tighter than `tol`.
    pub class_tol: f64,
    pub norm_tol: f64,
    pub bound_tol: f64,
    /// Adds `trials` synthesized pairs with `h₁ ≥ 1` and random orthogonal
    /// conjugation.
    pub include_synthesized: bool,
    pub parallel: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            trials: 100,
            dim_min: 1,
            dim_max: 16,
            seed: 0,
            tol: 1e-8,
            class_tol: DEFAULT_CAMPAIGN_CLASS_TOL,
            norm_tol: DEFAULT_NORM_TOL,
            bound_tol: DEFAULT_BOUND_TOL,
            include_synthesized: false,
            parallel: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim_min < 1 || self.dim_min > self.dim_max {
            return Err(Error::Validation(format!(
                "need 1 ≤ dim_min ≤ dim_max, got {} and {}",
                self.dim_min, self.dim_max
            )));
        }
        for (name, t) in [
            ("tol", self.tol),
            ("class_tol", self.class_tol),
            ("norm_tol", self.norm_tol),
            ("bound_tol", self.bound_tol),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {t}"
                )));
            }
        }
        if self.class_tol >= 0.5 {
            return Err(Error::Validation(format!(
                "class_tol {} must be below 1/2",
                self.class_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    Random,
    Synthesized,
}

/// Outcome of one trial. Deviation fields are `None` when the trial failed
/// before they could be computed, or when a cardinality mismatch made the
/// deviation infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub kind: TrialKind,
    pub seed: u64,
    pub n: usize,
    pub rank_p: usize,
    pub rank_q: usize,
    pub dims: Option<HalmosDims>,
    pub spectral_deviation: Option<f64>,
    pub pqp_deviation: Option<f64>,
    pub norm_lhs: Option<f64>,
    pub norm_rhs: Option<f64>,
    pub norm_deviation: Option<f64>,
    pub bound_ok: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub inclusion_distance: Option<f64>,
    pub reconstruction_residuals: Option<(f64, f64)>,
    pub d_unitarity_residual: Option<f64>,
    /// Synthesized trials only: whether decomposition recovered the spec.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec_recovered: Option<bool>,
    pub passed: bool,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub records: usize,
    pub pass_count: usize,
    pub fail_count: usize,
    pub max_spectral_deviation: f64,
    pub max_pqp_deviation: f64,
    pub max_norm_deviation: f64,
    pub max_inclusion_distance: f64,
    pub max_reconstruction_residual: f64,
    pub max_d_unitarity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: CampaignConfig,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.aggregate.fail_count == 0
    }

    /// Drops every wall-clock field, leaving only deterministic content.
    pub fn strip_timing(&mut self) {
        for r in &mut self.records {
            r.wall_time_ms = None;
        }
        self.aggregate.total_time_ms = None;
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

fn blank_record(index: usize, kind: TrialKind, seed: u64) -> TrialRecord {
    TrialRecord {
        index,
        kind,
        seed,
        n: 0,
        rank_p: 0,
        rank_q: 0,
        dims: None,
        spectral_deviation: None,
        pqp_deviation: None,
        norm_lhs: None,
        norm_rhs: None,
        norm_deviation: None,
        bound_ok: false,
        lower_ok: false,
        upper_ok: false,
        inclusion_distance: None,
        reconstruction_residuals: None,
        d_unitarity_residual: None,
        spec_recovered: None,
        passed: false,
        error: None,
        wall_time_ms: None,
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Runs every check on `pair`, filling `rec`. Returns the form for callers
/// that need further checks.
fn check_pair(
    pair: &ProjectionPair,
    cfg: &CampaignConfig,
    rec: &mut TrialRecord,
) -> Result<HalmosForm> {
    rec.n = pair.dim();
    rec.rank_p = pair.rank_p();
    rec.rank_q = pair.rank_q();

    let form = decompose(pair, cfg.class_tol)?;
    rec.dims = Some(form.dims());
    let n = pair.dim() as f64;

    let oracle = oracle_anticommutator_spectrum(pair)?;
    let (spec_ok, spec_dev) =
        multiset_match(&predicted_anticommutator_spectrum(&form), &oracle, cfg.tol);
    rec.spectral_deviation = finite(spec_dev);

    let (pqp_ok, pqp_dev) = multiset_match(
        &predicted_pqp_spectrum(&form),
        &oracle_pqp_spectrum(pair)?,
        cfg.tol,
    );
    rec.pqp_deviation = finite(pqp_dev);

    let inc = check_theorem_inclusions(pair, &form, cfg.tol)?;
    rec.lower_ok = inc.lower_ok;
    rec.upper_ok = inc.upper_ok;
    rec.inclusion_distance = Some(inc.max_unmatched_distance);

    let norm = check_norm_formula(pair, cfg.norm_tol)?;
    rec.norm_lhs = Some(norm.lhs);
    rec.norm_rhs = Some(norm.rhs);
    rec.norm_deviation = Some(norm.deviation());

    rec.bound_ok = check_bound(&oracle, cfg.bound_tol);

    let (rp, rq) = reconstruction_residual(&form, pair)?;
    rec.reconstruction_residuals = Some((rp, rq));
    let du = form.d_unitarity_residual();
    rec.d_unitarity_residual = Some(du);

    rec.passed = spec_ok
        && pqp_ok
        && inc.lower_ok
        && inc.upper_ok
        && norm.ok
        && rec.bound_ok
        && rp.max(rq) <= 1e-8 * n
        && du <= UNITARITY_TOL;
    Ok(form)
}

/// Random trial `index` of a campaign with seed `trial_seed`.
pub fn run_random_trial(index: usize, trial_seed: u64, cfg: &CampaignConfig) -> TrialRecord {
    let start = Instant::now();
    let mut rec = blank_record(index, TrialKind::Random, trial_seed);
    let mut src = GaussianSource::new(trial_seed);
    let n = src.uniform_int(cfg.dim_min, cfg.dim_max);
    let rank_p = src.uniform_int(0, n);
    let rank_q = src.uniform_int(0, n);
    let pair_seed = src.next_u64();
    rec.n = n;
    rec.rank_p = rank_p;
    rec.rank_q = rank_q;

    let outcome = random_projection_pair(n, rank_p, rank_q, pair_seed)
        .and_then(|pair| check_pair(&pair, cfg, &mut rec));
    if let Err(e) = outcome {
        rec.passed = false;
        rec.error = Some(e.to_string());
    }
    rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    rec
}

/// Draws the synthesis data of a synthesized trial: `h₁ ∈ 1..=3`,
/// `h₂, h₅, h₆ ∈ 0..=2`, `Q₀` eigenvalues uniform in `[0.01, 0.99]`, and as
/// many of them as fit below `dim_max` (at most 8).
pub fn synthesized_spec(trial_seed: u64, cfg: &CampaignConfig) -> SynthesisSpec {
    let mut src = GaussianSource::new(trial_seed);
    let h1 = src.uniform_int(1, 3);
    let h2 = src.uniform_int(0, 2);
    let h5 = src.uniform_int(0, 2);
    let h6 = src.uniform_int(0, 2);
    let used = h1 + h2 + h5 + h6;
    let room = cfg.dim_max.saturating_sub(used) / 2;
    let k = src.uniform_int(0, room.min(8));
    let q0 = (0..k).map(|_| src.uniform(0.01, 0.99)).collect();
    SynthesisSpec::from_q0(q0)
        .with_dims(h1, h2, h5, h6)
        .with_conjugation(src.next_u64())
}

pub fn run_synthesized_trial(index: usize, trial_seed: u64, cfg: &CampaignConfig) -> TrialRecord {
    let start = Instant::now();
    let mut rec = blank_record(index, TrialKind::Synthesized, trial_seed);
    let spec = synthesized_spec(trial_seed, cfg);
    rec.n = spec.dim();

    let outcome = build_pair(&spec).and_then(|pair| check_pair(&pair, cfg, &mut rec));
    match outcome {
        Ok(form) => {
            let mut want = spec.q0_targets.clone();
            want.sort_by(f64::total_cmp);
            let k = want.len();
            let dims_ok = form.dims() == HalmosDims::new(spec.h1, spec.h2, k, k, spec.h5, spec.h6);
            let q0_ok = form.q0_eigs().len() == k
                && form
                    .q0_eigs()
                    .iter()
                    .zip(&want)
                    .all(|(a, b)| (a - b).abs() <= 1e-9);
            rec.spec_recovered = Some(dims_ok && q0_ok);
            rec.passed &= dims_ok && q0_ok;
        }
        Err(e) => {
            rec.passed = false;
            rec.error = Some(e.to_string());
        }
    }
    rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    rec
}

fn aggregate(records: &[TrialRecord], total_time_ms: f64) -> Aggregate {
    let max_of =
        |f: &dyn Fn(&TrialRecord) -> Option<f64>| records.iter().filter_map(f).fold(0.0, f64::max);
    let pass_count = records.iter().filter(|r| r.passed).count();
    Aggregate {
        records: records.len(),
        pass_count,
        fail_count: records.len() - pass_count,
        max_spectral_deviation: max_of(&|r| r.spectral_deviation),
        max_pqp_deviation: max_of(&|r| r.pqp_deviation),
        max_norm_deviation: max_of(&|r| r.norm_deviation),
        max_inclusion_distance: max_of(&|r| r.inclusion_distance),
        max_reconstruction_residual: max_of(&|r| r.reconstruction_residuals.map(|(a, b)| a.max(b))),
        max_d_unitarity_residual: max_of(&|r| r.d_unitarity_residual),
        total_time_ms: Some(total_time_ms),
    }
}

pub fn run_campaign(config: &CampaignConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let synth_seed = !config.seed;

    let random_job = |i: usize| run_random_trial(i, derive_seed(config.seed, i as u64), config);
    let synth_job = |i: usize| run_synthesized_trial(i, derive_seed(synth_seed, i as u64), config);
    let n_synth = if config.include_synthesized {
        config.trials
    } else {
        0
    };

    let mut records: Vec<TrialRecord> = if config.parallel {
        (0..config.trials).into_par_iter().map(random_job).collect()
    } else {
        (0..config.trials).map(random_job).collect()
    };
    let synth: Vec<TrialRecord> = if config.parallel {
        (0..n_synth).into_par_iter().map(synth_job).collect()
    } else {
        (0..n_synth).map(synth_job).collect()
    };
    records.extend(synth);

    let total = start.elapsed().as_secs_f64() * 1e3;
    Ok(VerificationReport {
        config: config.clone(),
        aggregate: aggregate(&records, total),
        records,
    })
}
