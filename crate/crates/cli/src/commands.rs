use std::path::{Path, PathBuf};

use serde::Serialize;
use trifringe_core::fit::FitOptions;
use trifringe_core::metrology::{hl_limit, sql_limit, DETECTED_PHOTONS};
use trifringe_core::mzi::{CandidateScore, SignCalibration};
use trifringe_core::validation::{EquivalenceGrid, LedgerEntry};
use trifringe_core::{
    analytic_coefficients, fit_fringe_with, ratio_sweep, synthetic_scan, three_photon_rate_analytic, validate,
    Expansion, FringeScan, ModelForm, MziSettings, OracleFringe, RateModel, ScanKind, SourceParams, CALIBRATED,
};

use crate::config::{ExpansionArg, FormArg, ModelArg, RunConfig};
use crate::csvio::{emit, num, read_scan, scan_csv};
use crate::error::{CliError, CliResult};

const SIMULATE_SQUEEZE: f64 = 0.06;
const SWEEP_SQUEEZE: f64 = 0.1;

fn source(cfg: &RunConfig, default_squeeze: f64) -> CliResult<SourceParams> {
    let squeeze = cfg.squeeze_or(default_squeeze)?;
    let alpha_sq = cfg.alpha_sq_or_ratio(squeeze, 1.0)?;
    let theta = cfg.finite_or(cfg.theta, 0.0, "theta")?;
    let psi = cfg.finite_or(cfg.squeeze_phase, 0.0, "squeeze_phase")?;
    let expansion: Expansion = cfg.expansion.unwrap_or(ExpansionArg::LowOrder).into();
    let src = SourceParams::new(
        alpha_sq.sqrt(),
        CALIBRATED.alpha_phase + theta,
        squeeze,
        CALIBRATED.squeeze_phase + psi,
        expansion,
    )?;
    for w in src.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(src)
}

/// Fringe over one period: model rates, or Poisson counts when an exposure is given.
pub fn simulate(cfg: &RunConfig) -> CliResult<()> {
    let src = source(cfg, SIMULATE_SQUEEZE)?;
    let n = cfg.points_or(trifringe_core::DEFAULT_GRID, 3)?;
    let form: ModelForm = cfg.form.unwrap_or(FormArg::Corrected).into();
    let settings = MziSettings::default();
    let scan = match (cfg.exposure, cfg.peak_counts) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either exposure or peak_counts, not both".into())),
        (None, None) => match cfg.model.unwrap_or(ModelArg::Oracle) {
            ModelArg::Oracle => OracleFringe::new(&src, &settings)?.scan(n)?,
            ModelArg::Analytic => {
                let coeffs = analytic_coefficients(&src, form);
                FringeScan::sample(n, ScanKind::ModelRate, |p| three_photon_rate_analytic(&coeffs, p))?
            }
        },
        (exposure, peak) => {
            if cfg.model == Some(ModelArg::Analytic) {
                return Err(CliError::Config("counts are drawn from the oracle model only".into()));
            }
            let phases = trifringe_core::phase_grid(n);
            let exposure = match (exposure, peak) {
                (Some(e), _) => e,
                (None, Some(peak)) => {
                    let max = OracleFringe::new(&src, &settings)?.scan(trifringe_core::DEFAULT_GRID)?.max_value();
                    if max > 0.0 {
                        peak / max
                    } else {
                        0.0
                    }
                }
                (None, None) => unreachable!(),
            };
            if !(exposure.is_finite() && exposure >= 0.0) {
                return Err(CliError::Config(format!("exposure must be finite and >= 0, got {exposure}")));
            }
            synthetic_scan(&src, &settings, &phases, exposure, cfg.seed.unwrap_or(0))?
        }
    };
    emit(cfg.out.as_deref(), &scan_csv(&scan))
}

fn summary_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.summary_out.clone().or_else(|| {
        let out = cfg.out.as_ref()?;
        let stem = out.file_stem()?.to_string_lossy();
        Some(out.with_file_name(format!("{stem}_summary.csv")))
    })
}

/// Normalized fringes over a log-spaced ratio range, plus a per-ratio summary.
pub fn sweep(cfg: &RunConfig) -> CliResult<()> {
    let s = cfg.squeeze_or(SWEEP_SQUEEZE)?;
    let ratios = cfg.ratios_or(0.01, 100.0, 41)?;
    let n = cfg.points_or(72, 16)?;
    let model: RateModel = cfg.model.unwrap_or(ModelArg::Oracle).into();
    let rows = ratio_sweep(s, &ratios, n, model)?;

    let mut matrix = String::from("ratio,phase_rad,prob_normalized\n");
    let mut summary =
        String::from("ratio,c0,abs_c1,abs_c2,abs_c3,dominant_harmonic,visibility,min_delta_phi,min_phase_rad\n");
    for row in &rows {
        for (p, v) in row.fringe.phases().iter().zip(row.fringe.values()) {
            matrix.push_str(&format!("{},{},{}\n", num(row.ratio), num(*p), num(*v)));
        }
        let [m1, m2, m3] = row.components.magnitudes();
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            num(row.ratio),
            num(row.components.c0),
            num(m1),
            num(m2),
            num(m3),
            row.components.dominant_harmonic(),
            num(row.visibility),
            num(row.min_delta_phi),
            num(row.min_phase)
        ));
    }
    emit(cfg.out.as_deref(), &matrix)?;
    if let Some(path) = summary_path(cfg) {
        emit(Some(&path), &summary)?;
    }
    Ok(())
}

/// Minimum phase uncertainty per ratio, with the three-photon reference limits.
pub fn sensitivity(cfg: &RunConfig) -> CliResult<()> {
    let s = cfg.squeeze_or(SWEEP_SQUEEZE)?;
    let ratios = cfg.ratios_or(0.1, 10.0, 21)?;
    let n = cfg.points_or(trifringe_core::DEFAULT_GRID, 64)?;
    let model: RateModel = cfg.model.unwrap_or(ModelArg::Analytic).into();
    let rows = ratio_sweep(s, &ratios, n, model)?;
    let sql = sql_limit(DETECTED_PHOTONS)?;
    let hl = hl_limit(DETECTED_PHOTONS)?;
    let mut out = String::from("ratio,min_delta_phi,min_phase_rad,sql_3,hl_3\n");
    for row in &rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            num(row.ratio),
            num(row.min_delta_phi),
            num(row.min_phase),
            num(sql),
            num(hl)
        ));
    }
    emit(cfg.out.as_deref(), &out)
}

#[derive(Serialize)]
struct ParamsOut {
    scale: f64,
    offset: f64,
    y: f64,
    phi1: f64,
    vis: f64,
}

#[derive(Serialize)]
struct ErrorsOut {
    scale: f64,
    offset: Option<f64>,
    y: f64,
    phi1: f64,
    vis: Option<f64>,
}

#[derive(Serialize)]
struct FitReport {
    form: &'static str,
    data_kind: &'static str,
    float_visibility: bool,
    converged: bool,
    n_iter: usize,
    n_points: usize,
    params: ParamsOut,
    std_errors: ErrorsOut,
    residual_rms: f64,
    objective: f64,
    gradient_norm: f64,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Fits a scan file; the report is written even when the fit does not converge.
pub fn fit(cfg: &RunConfig) -> CliResult<()> {
    let input: &Path = cfg
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("fit needs an input scan (--input)".into()))?;
    let rows = read_scan(input)?;
    let kind = cfg.data_kind.map_or_else(|| rows.inferred_kind(), Into::into);
    let scan = rows.into_scan(kind)?;
    let opts = FitOptions {
        float_visibility: cfg.float_visibility.unwrap_or(false),
        max_iter: cfg.max_iter.unwrap_or(trifringe_core::fit::MAX_ITER),
        ..FitOptions::new(cfg.form.unwrap_or(FormArg::Corrected).into())
    };
    let result = fit_fringe_with(&scan, &opts, None)?;
    let p = result.params;
    let e = result.std_errors;
    let report = FitReport {
        form: result.form.name(),
        data_kind: match kind {
            ScanKind::Counts => "counts",
            ScanKind::ModelRate => "rate",
        },
        float_visibility: result.float_visibility,
        converged: result.converged,
        n_iter: result.n_iter,
        n_points: scan.len(),
        params: ParamsOut {
            scale: p.scale,
            offset: p.offset,
            y: p.y,
            phi1: p.phi1,
            vis: p.vis,
        },
        std_errors: ErrorsOut {
            scale: e.scale,
            offset: e.offset,
            y: e.y,
            phi1: e.phi1,
            vis: e.vis,
        },
        residual_rms: result.residual_rms,
        objective: result.objective,
        gradient_norm: result.gradient_norm,
    };
    emit(cfg.out.as_deref(), &json(&report))?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(result.n_iter))
    }
}

#[derive(Serialize)]
struct ConventionOut {
    convention: &'static str,
    port: &'static str,
    phase_origin: f64,
    alpha_phase: f64,
    squeeze_phase: f64,
    squeeze_sign: f64,
    scale: f64,
}

impl From<&SignCalibration> for ConventionOut {
    fn from(c: &SignCalibration) -> Self {
        Self {
            convention: c.convention.name(),
            port: c.port.name(),
            phase_origin: c.offset,
            alpha_phase: c.alpha_phase,
            squeeze_phase: c.squeeze_phase,
            squeeze_sign: c.squeeze_sign,
            scale: c.scale,
        }
    }
}

#[derive(Serialize)]
struct CalibrationOut {
    selected: ConventionOut,
    matches_builtin: bool,
    candidates: usize,
    exact_candidates: usize,
    alternatives: Vec<ConventionOut>,
}

#[derive(Serialize)]
struct EquivalenceOut {
    alpha_sq_min: f64,
    alpha_sq_max: f64,
    alpha_sq_points: usize,
    squeeze_min: f64,
    squeeze_max: f64,
    squeeze_points: usize,
    phases: usize,
    max_rel_error: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct LedgerOut {
    topic: &'static str,
    verbatim: &'static str,
    corrected: &'static str,
}

impl From<&LedgerEntry> for LedgerOut {
    fn from(e: &LedgerEntry) -> Self {
        Self {
            topic: e.topic,
            verbatim: e.verbatim,
            corrected: e.corrected,
        }
    }
}

#[derive(Serialize)]
struct ValidationOut {
    passed: bool,
    calibration: CalibrationOut,
    equivalence: EquivalenceOut,
    ledger: Vec<LedgerOut>,
}

/// Re-derives the sign conventions, checks the closed form against the
/// simulation on the validation grid and lists the verbatim/corrected differences.
pub fn validate_cmd(cfg: &RunConfig) -> CliResult<()> {
    let mut grid = EquivalenceGrid::default();
    grid.phases = cfg.points_or(grid.phases, 8)?;
    let report = validate(&grid)?;
    let bounds = |v: &[f64]| (v[0], v[v.len() - 1]);
    let (a_lo, a_hi) = bounds(&grid.alpha_sq);
    let (s_lo, s_hi) = bounds(&grid.squeeze);
    let out = ValidationOut {
        passed: report.passed(),
        calibration: CalibrationOut {
            selected: (&report.calibration.selected).into(),
            matches_builtin: report.calibration_matches,
            candidates: report.calibration.candidates.len(),
            exact_candidates: report.calibration.candidates.iter().filter(|c| c.exact()).count(),
            alternatives: report
                .calibration
                .alternatives
                .iter()
                .map(|c: &CandidateScore| (&c.calibration).into())
                .collect(),
        },
        equivalence: EquivalenceOut {
            alpha_sq_min: a_lo,
            alpha_sq_max: a_hi,
            alpha_sq_points: grid.alpha_sq.len(),
            squeeze_min: s_lo,
            squeeze_max: s_hi,
            squeeze_points: grid.squeeze.len(),
            phases: grid.phases,
            max_rel_error: report.equivalence.max_rel_error,
            tolerance: report.equivalence.tolerance,
            passed: report.equivalence.passed(),
        },
        ledger: report.ledger.iter().map(Into::into).collect(),
    };
    emit(cfg.out.as_deref(), &json(&out))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "max relative error {:e}, calibration matches built-in: {}",
            report.equivalence.max_rel_error, report.calibration_matches
        )))
    }
}
