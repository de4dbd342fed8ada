//! Sampled fringes: a phase grid with one non-negative value per phase.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Default number of phase samples per period.
pub const DEFAULT_GRID: usize = 720;

/// Relative tolerance on grid spacing. Loose enough for phases read back from
/// 12-significant-digit text.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanKind {
    ModelRate,
    Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    phases: Vec<f64>,
    values: Vec<f64>,
    kind: ScanKind,
}

impl FringeScan {
    pub fn new(phases: Vec<f64>, values: Vec<f64>, kind: ScanKind) -> Result<Self> {
        if phases.len() != values.len() {
            return Err(Error::InvalidScan(format!(
                "{} phases but {} values",
                phases.len(),
                values.len()
            )));
        }
        if let Some(i) = phases.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidScan(format!(
                "phases not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = phases.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidScan(format!("non-finite phase at index {i}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidScan(format!(
                "value at index {i} is negative or non-finite: {}",
                values[i]
            )));
        }
        Ok(Self { phases, values, kind })
    }

    /// Samples `rate` on the default open grid over `[−π, π)`.
    pub fn sample(n: usize, kind: ScanKind, rate: impl Fn(f64) -> f64) -> Result<Self> {
        let phases = phase_grid(n);
        let values = phases.iter().map(|&p| rate(p)).collect();
        Self::new(phases, values, kind)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ScanKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.phases.clone(),
            self.values.iter().map(|v| v * factor).collect(),
            self.kind,
        )
    }

    /// Classifies the grid as one full period, with or without the closing endpoint.
    pub fn period_layout(&self) -> Result<PeriodLayout> {
        let n = self.phases.len();
        if n < 3 {
            return Err(Error::InvalidScan(format!("{n} points cannot span a period")));
        }
        let h = (self.phases[n - 1] - self.phases[0]) / (n - 1) as f64;
        let uniform = self
            .phases
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= GRID_TOL * TAU);
        if !uniform {
            return Err(Error::InvalidScan("phase grid is not uniform".into()));
        }
        if (n as f64 * h - TAU).abs() <= GRID_TOL * TAU * n as f64 {
            Ok(PeriodLayout::Open { step: h })
        } else if ((n - 1) as f64 * h - TAU).abs() <= GRID_TOL * TAU * n as f64 {
            Ok(PeriodLayout::Closed { step: h })
        } else {
            Err(Error::InvalidScan(format!(
                "grid spans {:.6} rad, not one 2π period",
                n as f64 * h
            )))
        }
    }

    /// One sample per distinct phase of the period (drops a closing endpoint).
    pub fn periodic_samples(&self) -> Result<(&[f64], &[f64], f64)> {
        match self.period_layout()? {
            PeriodLayout::Open { step } => Ok((&self.phases, &self.values, step)),
            PeriodLayout::Closed { step } => {
                let n = self.phases.len() - 1;
                Ok((&self.phases[..n], &self.values[..n], step))
            }
        }
    }

    /// Trapezoid-rule integral over the period.
    pub fn integral(&self) -> Result<f64> {
        Ok(match self.period_layout()? {
            // periodic trapezoid rule
            PeriodLayout::Open { step } => step * self.values.iter().sum::<f64>(),
            PeriodLayout::Closed { step } => {
                let n = self.values.len();
                step * (self.values.iter().sum::<f64>() - 0.5 * (self.values[0] + self.values[n - 1]))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodLayout {
    /// `n` samples at spacing `2π/n`; the endpoint is implied by periodicity.
    Open { step: f64 },
    /// `n` samples at spacing `2π/(n−1)`, first and last sample the same phase mod 2π.
    Closed { step: f64 },
}

/// `φ_k = −π + 2πk/n`, `k = 0..n`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| -PI + TAU * k as f64 / n as f64).collect()
}

/// Rescales a fringe so its integral over one period is 1.
pub fn normalize_fringe(scan: &FringeScan) -> Result<FringeScan> {
    let integral = scan.integral()?;
    if !(integral > 0.0) {
        return Err(Error::ZeroIntegral);
    }
    FringeScan::new(
        scan.phases.clone(),
        scan.values.iter().map(|v| v / integral).collect(),
        ScanKind::ModelRate,
    )
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut out = phi.rem_euclid(TAU);
    if out > PI {
        out -= TAU;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(FringeScan::new(vec![0.0, 1.0], vec![1.0], ScanKind::Counts).is_err());
        assert!(FringeScan::new(vec![0.0, 0.0], vec![1.0, 1.0], ScanKind::Counts).is_err());
        assert!(FringeScan::new(vec![0.0, 1.0], vec![1.0, -1.0], ScanKind::Counts).is_err());
    }

    #[test]
    fn normalize_constant() {
        let scan = FringeScan::sample(90, ScanKind::ModelRate, |_| 3.7).unwrap();
        let norm = normalize_fringe(&scan).unwrap();
        for v in norm.values() {
            assert!((v - 1.0 / TAU).abs() < 1e-12);
        }
        assert!((norm.integral().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_noon_fringe() {
        let scan = FringeScan::sample(72, ScanKind::ModelRate, |p| 1.0 + (3.0 * p).cos()).unwrap();
        let norm = normalize_fringe(&scan).unwrap();
        for (a, b) in norm.values().iter().zip(scan.values()) {
            assert!((a - b / TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let scan = FringeScan::sample(100, ScanKind::ModelRate, |p| (1.0 - p.cos()).powi(3)).unwrap();
        let once = normalize_fringe(&scan).unwrap();
        let twice = normalize_fringe(&once).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_grid_matches_open_grid() {
        let n = 64;
        let phases: Vec<f64> = (0..=n).map(|k| -PI + TAU * k as f64 / n as f64).collect();
        let values: Vec<f64> = phases.iter().map(|p| 2.0 + p.cos() + (2.0 * p).sin()).collect();
        let closed = FringeScan::new(phases, values, ScanKind::ModelRate).unwrap();
        assert!(matches!(closed.period_layout().unwrap(), PeriodLayout::Closed { .. }));
        assert!((closed.integral().unwrap() - 2.0 * TAU).abs() < 1e-12);
        assert_eq!(closed.periodic_samples().unwrap().0.len(), n);
    }

    #[test]
    fn rejects_partial_period_and_zero_integral() {
        let phases: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let scan = FringeScan::new(phases, vec![1.0; 10], ScanKind::Counts).unwrap();
        assert!(scan.integral().is_err());
        let zero = FringeScan::sample(16, ScanKind::Counts, |_| 0.0).unwrap();
        assert_eq!(normalize_fringe(&zero), Err(Error::ZeroIntegral));
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.5) - 0.5).abs() < 1e-15);
        assert!((wrap_phase(-0.5 - TAU) + 0.5).abs() < 1e-12);
    }
}
