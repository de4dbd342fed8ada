//! Fringe analysis: harmonic content, visibility, error-propagation phase
//! sensitivity, and the amplitude-ratio sweep.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mzi::{analytic_coefficients, three_photon_rate_analytic, ModelForm, MziSettings, OracleFringe};
use crate::scan::{normalize_fringe, phase_grid, FringeScan, ScanKind};
use crate::source::{Expansion, SourceParams};

/// Central-difference step for `dR/dφ`.
pub const FD_STEP: f64 = 1e-5;
/// Points with `|dR/dφ|` below this fraction of the fringe maximum are excluded.
pub const SLOPE_FLOOR_REL: f64 = 1e-9;
/// Detected photon number used for the reference limits.
pub const DETECTED_PHOTONS: f64 = 3.0;

/// `c0 = ⟨R⟩`, `c_k = (1/π)∫R(φ)e^{−ikφ}dφ` for `k = 1, 2, 3`.
///
/// For `R = A + Σ_k a_k cos kφ + b_k sin kφ`, `c_k = a_k − i b_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierComponents {
    pub c0: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
}

impl FourierComponents {
    pub fn harmonic(&self, k: usize) -> Complex64 {
        match k {
            1 => self.c1,
            2 => self.c2,
            3 => self.c3,
            _ => panic!("harmonic index {k} outside 1..=3"),
        }
    }

    pub fn magnitudes(&self) -> [f64; 3] {
        [self.c1.norm(), self.c2.norm(), self.c3.norm()]
    }

    /// Index (1, 2 or 3) of the largest harmonic; ties go to the lower index.
    pub fn dominant_harmonic(&self) -> usize {
        let m = self.magnitudes();
        let mut best = 0;
        for k in 1..3 {
            if m[k] > m[best] {
                best = k;
            }
        }
        best + 1
    }
}

pub fn fourier_components(scan: &FringeScan) -> Result<FourierComponents> {
    if scan.len() < 16 {
        return Err(Error::InvalidScan(format!(
            "harmonic analysis needs at least 16 points, got {}",
            scan.len()
        )));
    }
    project_harmonics(scan)
}

/// Discrete harmonic projections without the minimum-length check; exact for
/// trigonometric polynomials of degree ≤ 3 on 8 or more samples per period.
pub(crate) fn project_harmonics(scan: &FringeScan) -> Result<FourierComponents> {
    let (phases, values, _) = scan.periodic_samples()?;
    let n = phases.len() as f64;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for (&p, &v) in phases.iter().zip(values) {
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot += v * Complex64::from_polar(1.0, -(k as f64) * p);
        }
    }
    Ok(FourierComponents {
        c0: acc[0].re / n,
        c1: acc[1] * (2.0 / n),
        c2: acc[2] * (2.0 / n),
        c3: acc[3] * (2.0 / n),
    })
}

/// `(max − min)/(max + min)`; 0 for a constant scan.
pub fn visibility(scan: &FringeScan) -> Result<f64> {
    if scan.is_empty() {
        return Err(Error::InvalidScan("empty scan".into()));
    }
    let max = scan.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = scan.values().iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        return Err(Error::DegenerateScan("all values are zero".into()));
    }
    Ok((max - min) / (max + min))
}

/// `Δφ = √R / |dR/dφ|`, or `None` where the slope is below `slope_floor`.
pub fn phase_sensitivity(rate: impl Fn(f64) -> f64, phase: f64, slope_floor: f64) -> Option<f64> {
    let slope = (rate(phase + FD_STEP) - rate(phase - FD_STEP)) / (2.0 * FD_STEP);
    if !(slope.abs() >= slope_floor) || slope == 0.0 {
        return None;
    }
    Some(rate(phase).max(0.0).sqrt() / slope.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub phases: Vec<f64>,
    /// `None` marks excluded points
    pub delta_phi: Vec<Option<f64>>,
    pub min_value: f64,
    pub min_phase: f64,
}

/// Applies [`phase_sensitivity`] over `phases` with the slope floor set from the
/// largest rate on the grid.
pub fn sensitivity_curve(rate: impl Fn(f64) -> f64, phases: &[f64]) -> Result<SensitivityCurve> {
    let peak = phases.iter().map(|&p| rate(p)).fold(0.0, f64::max);
    let floor = SLOPE_FLOOR_REL * peak;
    let delta_phi: Vec<Option<f64>> = phases
        .iter()
        .map(|&p| if peak > 0.0 { phase_sensitivity(&rate, p, floor) } else { None })
        .collect();
    let (min_phase, min_value) = phases
        .iter()
        .zip(&delta_phi)
        .filter_map(|(&p, d)| d.map(|d| (p, d)))
        .fold(None, |best: Option<(f64, f64)>, (p, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((p, d)),
        })
        .ok_or(Error::AllPointsExcluded)?;
    Ok(SensitivityCurve {
        phases: phases.to_vec(),
        delta_phi,
        min_value,
        min_phase,
    })
}

/// Sensitivity of a fringe rescaled to unit peak, i.e. per detected event at the
/// bright fringe, on a `grid`-point phase grid.
pub fn unit_peak_sensitivity(rate: impl Fn(f64) -> f64, grid: usize) -> Result<SensitivityCurve> {
    if grid < 64 {
        return Err(Error::InvalidParameter(format!(
            "sensitivity grid needs at least 64 points, got {grid}"
        )));
    }
    let phases = phase_grid(grid);
    let peak = phases.iter().map(|&p| rate(p)).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::AllPointsExcluded);
    }
    sensitivity_curve(|p| rate(p) / peak, &phases)
}

/// Unit-peak sensitivity curve of the corrected analytic fringe for `src`.
pub fn min_sensitivity(src: &SourceParams, grid: usize) -> Result<SensitivityCurve> {
    let coeffs = analytic_coefficients(src, ModelForm::Corrected);
    unit_peak_sensitivity(|p| three_photon_rate_analytic(&coeffs, p), grid)
}

fn check_photons(n: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "photon number must be positive, got {n}"
        )));
    }
    Ok(())
}

/// Standard quantum limit `1/√N`.
pub fn sql_limit(n: f64) -> Result<f64> {
    check_photons(n)?;
    Ok(1.0 / n.sqrt())
}

/// Heisenberg limit `1/N`.
pub fn hl_limit(n: f64) -> Result<f64> {
    check_photons(n)?;
    Ok(1.0 / n)
}

/// How fringe values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateModel {
    /// exact Fock-space propagation
    Oracle,
    /// corrected closed-form coefficients
    Analytic,
}

impl RateModel {
    pub fn rate_fn(self, src: &SourceParams) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        Ok(match self {
            RateModel::Oracle => {
                let fringe = OracleFringe::new(src, &MziSettings::default())?;
                Box::new(move |p| fringe.rate(p))
            }
            RateModel::Analytic => {
                let coeffs = analytic_coefficients(src, ModelForm::Corrected);
                Box::new(move |p| three_photon_rate_analytic(&coeffs, p))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ratio: f64,
    /// fringe normalized to unit integral over the period
    pub fringe: FringeScan,
    pub components: FourierComponents,
    pub visibility: f64,
    pub min_delta_phi: f64,
    pub min_phase: f64,
}

/// One row per amplitude ratio `|α|²/s` at squeezing `s` (low-order sources,
/// calibrated phases). Rows are computed in parallel and returned in input order.
pub fn ratio_sweep(s: f64, ratios: &[f64], grid: usize, model: RateModel) -> Result<Vec<SweepRow>> {
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("ratios must be positive, got {r}")));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("squeeze must be positive, got {s}")));
    }
    ratios
        .par_iter()
        .map(|&ratio| {
            let src = SourceParams::from_ratio(ratio, s, Expansion::LowOrder)?;
            let rate = model.rate_fn(&src)?;
            let raw = FringeScan::sample(grid, ScanKind::ModelRate, &rate)?;
            let fringe = normalize_fringe(&raw)?;
            let components = fourier_components(&fringe)?;
            let vis = visibility(&fringe)?;
            let curve = unit_peak_sensitivity(&rate, grid.max(64))?;
            Ok(SweepRow {
                ratio,
                fringe,
                components,
                visibility: vis,
                min_delta_phi: curve.min_value,
                min_phase: curve.min_phase,
            })
        })
        .collect()
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}
