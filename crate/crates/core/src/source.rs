//! Input light: a weak coherent state in the first port and a squeezed vacuum in the
//! second, each available as the low-order number-state expansion or as the full
//! normalized expansion.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::TwoModeState;
use crate::mzi::CALIBRATED;

/// Which number-state expansion of the sources to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Expansion {
    /// Unnormalized low-order series: `|0⟩ + α|1⟩ + α²/√2|2⟩ + α³/√6|3⟩` for the
    /// coherent beam and `|0⟩ − (s/√2)|2⟩` for the squeezed vacuum.
    LowOrder,
    /// Normalized expansion to the truncation; `squeeze` is read as `r`.
    Exact,
}

/// Above this, the low-order squeezed-vacuum series is no longer a fair approximation.
pub const LOW_ORDER_SQUEEZE_WARN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    /// `|α|`
    pub alpha_mag: f64,
    /// `θ` in `α = |α|e^{iθ}`
    pub alpha_phase: f64,
    /// `s` (low order) or `r` (exact)
    pub squeeze: f64,
    pub squeeze_phase: f64,
    pub expansion: Expansion,
}

impl SourceParams {
    pub fn new(
        alpha_mag: f64,
        alpha_phase: f64,
        squeeze: f64,
        squeeze_phase: f64,
        expansion: Expansion,
    ) -> Result<Self> {
        for (name, v) in [("alpha magnitude", alpha_mag), ("squeeze", squeeze)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, v) in [("alpha phase", alpha_phase), ("squeeze phase", squeeze_phase)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            alpha_mag,
            alpha_phase,
            squeeze,
            squeeze_phase,
            expansion,
        })
    }

    /// Real coherent amplitude with `|α|² = alpha_sq` and the calibrated phases.
    pub fn calibrated(alpha_sq: f64, squeeze: f64, expansion: Expansion) -> Result<Self> {
        if !alpha_sq.is_finite() || alpha_sq < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "|alpha|^2 must be finite and non-negative, got {alpha_sq}"
            )));
        }
        Self::new(
            alpha_sq.sqrt(),
            CALIBRATED.alpha_phase,
            squeeze,
            CALIBRATED.squeeze_phase,
            expansion,
        )
    }

    /// Calibrated source at amplitude ratio `|α|²/s`.
    pub fn from_ratio(ratio: f64, squeeze: f64, expansion: Expansion) -> Result<Self> {
        Self::calibrated(ratio * squeeze, squeeze, expansion)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha_mag, self.alpha_phase)
    }

    pub fn alpha_sq_mag(&self) -> f64 {
        self.alpha_mag * self.alpha_mag
    }

    /// `|α|²/s`, or infinity without squeezing.
    pub fn ratio(&self) -> f64 {
        self.alpha_sq_mag() / self.squeeze
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.expansion == Expansion::LowOrder && self.squeeze > LOW_ORDER_SQUEEZE_WARN {
            out.push(format!(
                "squeeze {} exceeds {LOW_ORDER_SQUEEZE_WARN}; the low-order expansion is inaccurate",
                self.squeeze
            ));
        }
        out
    }

    pub fn input_state(&self, n_max: usize) -> Result<TwoModeState> {
        let coh = coherent_amplitudes(self.alpha(), n_max, self.expansion)?;
        let sq = squeezed_vacuum_amplitudes(self.squeeze, self.squeeze_phase, n_max, self.expansion)?;
        product_input(&coh, &sq, n_max)
    }
}

fn sqrt_factorials(n_max: usize) -> Vec<f64> {
    let mut out = vec![1.0; n_max + 1];
    for n in 1..=n_max {
        out[n] = out[n - 1] * (n as f64).sqrt();
    }
    out
}

/// Single-mode coherent-state amplitudes for `n = 0..=n_max`.
pub fn coherent_amplitudes(alpha: Complex64, n_max: usize, expansion: Expansion) -> Result<Vec<Complex64>> {
    let sqrt_fact = sqrt_factorials(n_max);
    let (top, norm) = match expansion {
        Expansion::LowOrder => {
            if n_max < 3 {
                return Err(Error::InvalidParameter(format!(
                    "low-order coherent expansion needs n_max >= 3, got {n_max}"
                )));
            }
            (3, 1.0)
        }
        Expansion::Exact => (n_max, (-alpha.norm_sqr() / 2.0).exp()),
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut power = Complex64::new(1.0, 0.0);
    for (n, slot) in out.iter_mut().enumerate().take(top + 1) {
        *slot = power * (norm / sqrt_fact[n]);
        power *= alpha;
    }
    Ok(out)
}

/// Single-mode squeezed-vacuum amplitudes for `n = 0..=n_max`.
///
/// Both expansions put `−e^{iψ}·(s or tanh r)/√2` on `|2⟩` relative to `|0⟩`, with
/// `ψ = squeeze_phase`; odd occupations are always empty.
pub fn squeezed_vacuum_amplitudes(
    squeeze: f64,
    squeeze_phase: f64,
    n_max: usize,
    expansion: Expansion,
) -> Result<Vec<Complex64>> {
    if !squeeze.is_finite() || squeeze < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "squeeze must be finite and non-negative, got {squeeze}"
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    out[0] = Complex64::new(1.0, 0.0);
    let phase = Complex64::from_polar(1.0, squeeze_phase);
    match expansion {
        Expansion::LowOrder => {
            if n_max < 2 {
                return Err(Error::InvalidParameter(format!(
                    "low-order squeezed expansion needs n_max >= 2, got {n_max}"
                )));
            }
            out[2] = -phase * (squeeze / std::f64::consts::SQRT_2);
        }
        Expansion::Exact => {
            let norm = 1.0 / squeeze.cosh().sqrt();
            let step = -phase * squeeze.tanh();
            // c_m = step^m √((2m)!) / (2^m m!), built up by its ratio c_m / c_{m-1}.
            let mut coeff = Complex64::new(norm, 0.0);
            out[0] = coeff;
            let mut m = 1;
            while 2 * m <= n_max {
                let ratio = ((2 * m) as f64 * (2 * m - 1) as f64).sqrt() / (2 * m) as f64;
                coeff *= step * ratio;
                out[2 * m] = coeff;
                m += 1;
            }
        }
    }
    Ok(out)
}

/// Tensor product `amps(n_a, n_b) = coh(n_a)·sq(n_b)`.
pub fn product_input(coherent: &[Complex64], squeezed: &[Complex64], n_max: usize) -> Result<TwoModeState> {
    for list in [coherent, squeezed] {
        if list.len() > n_max + 1 {
            return Err(Error::TruncationOverflow {
                len: list.len(),
                n_max,
            });
        }
    }
    Ok(TwoModeState::from_product(n_max, coherent, squeezed))
}

/// `Σ (n_a + n_b)|amp|² / Σ|amp|²`.
pub fn mean_photon_number(state: &TwoModeState) -> Result<f64> {
    let norm = state.norm_sq();
    if norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let weighted: f64 = state
        .iter()
        .map(|((a, b), amp)| (a + b) as f64 * amp.norm_sqr())
        .sum();
    Ok(weighted / norm)
}

/// Squeezing inferred from parametric amplification and de-amplification gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSqueezing {
    /// `ln(g_max)/2`
    pub r: f64,
    /// `−ln(g_min)/2`
    pub r_from_deamplification: f64,
    /// `|r − r'|`
    pub mismatch: f64,
}

pub fn squeezing_from_gain(g_min: f64, g_max: f64) -> Result<GainSqueezing> {
    if !(g_min > 0.0 && g_min <= 1.0 && g_max >= 1.0 && g_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gains must satisfy 0 < g_min <= 1 <= g_max, got g_min = {g_min}, g_max = {g_max}"
        )));
    }
    let r = g_max.ln() / 2.0;
    let r_from_deamplification = -g_min.ln() / 2.0;
    Ok(GainSqueezing {
        r,
        r_from_deamplification,
        mismatch: (r - r_from_deamplification).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn coherent_examples() {
        let vac = coherent_amplitudes(Complex64::new(0.0, 0.0), 4, Expansion::LowOrder).unwrap();
        assert_eq!(vac[0], Complex64::new(1.0, 0.0));
        assert!(vac[1..].iter().all(|a| a.norm() == 0.0));

        let low = coherent_amplitudes(Complex64::new(0.2, 0.0), 6, Expansion::LowOrder).unwrap();
        assert!((low[3].re - 0.2f64.powi(3) / 6f64.sqrt()).abs() < 1e-16);
        assert!(low[4..].iter().all(|a| a.norm() == 0.0));

        let exact = coherent_amplitudes(Complex64::new(0.2, 0.0), 6, Expansion::Exact).unwrap();
        assert!(((exact[1] / exact[0]).re - 0.2).abs() < 1e-15);
        assert!(coherent_amplitudes(Complex64::new(0.2, 0.0), 2, Expansion::LowOrder).is_err());
    }

    #[test]
    fn exact_coherent_norm_matches_poisson_tail() {
        let alpha = 0.3f64;
        let x = alpha * alpha;
        // Poisson tail Σ_{n>3} e^{-x} x^n / n!, summed from the top independently.
        let mut term = (-x).exp();
        let mut tail = 0.0;
        for n in 1..60 {
            term *= x / n as f64;
            if n > 3 {
                tail += term;
            }
        }
        let coh = coherent_amplitudes(Complex64::new(alpha, 0.0), 3, Expansion::Exact).unwrap();
        let vac = [Complex64::new(1.0, 0.0)];
        let state = product_input(&coh, &vac, 3).unwrap();
        assert!((state.norm_sq() - (1.0 - tail)).abs() < 1e-15);
    }

    #[test]
    fn squeezed_examples() {
        let vac = squeezed_vacuum_amplitudes(0.0, 0.0, 4, Expansion::LowOrder).unwrap();
        assert!(vac[1..].iter().all(|a| a.norm() == 0.0));

        let low = squeezed_vacuum_amplitudes(0.06, 0.0, 4, Expansion::LowOrder).unwrap();
        assert!((low[2].norm() - 0.06 / SQRT_2).abs() < 1e-16);
        assert!(low[2].re < 0.0);

        let exact = squeezed_vacuum_amplitudes(0.06, 0.0, 8, Expansion::Exact).unwrap();
        let ratio = (exact[2] / exact[0]).norm();
        assert!((ratio - 0.06f64.tanh() * SQRT_2 / 2.0).abs() < 1e-15);
        // tanh r = r - r³/3 + ...: the two expansions differ at third order.
        assert!((ratio - low[2].norm()).abs() < 0.06f64.powi(3));
        assert!((ratio - low[2].norm()).abs() > 0.06f64.powi(3) / 10.0);
    }

    #[test]
    fn exact_squeezed_vacuum_is_normalized() {
        let amps = squeezed_vacuum_amplitudes(0.4, 0.7, 80, Expansion::Exact).unwrap();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(amps.iter().skip(1).step_by(2).all(|a| a.norm() == 0.0));
        // mean photon number sinh² r
        let mean: f64 = amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
        assert!((mean - 0.4f64.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn product_examples() {
        let one = [Complex64::new(1.0, 0.0)];
        let vac = product_input(&one, &one, 3).unwrap();
        assert_eq!(vac, TwoModeState::vacuum(3));

        let (alpha, s) = (0.25, 0.06);
        let src = SourceParams::new(alpha, 0.0, s, 0.0, Expansion::LowOrder).unwrap();
        let state = src.input_state(6).unwrap();
        let expect = alpha * (-s / SQRT_2);
        assert!((state.amplitude(1, 2).unwrap().re - expect).abs() < 1e-16);

        let too_long = vec![Complex64::new(0.1, 0.0); 5];
        assert!(matches!(
            product_input(&too_long, &one, 3),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn mean_photon_examples() {
        assert_eq!(mean_photon_number(&TwoModeState::vacuum(3)).unwrap(), 0.0);
        let three = crate::fock::make_state(3, &[((3, 0), Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(mean_photon_number(&three).unwrap(), 3.0);
        assert!(matches!(mean_photon_number(&TwoModeState::zero(3)), Err(Error::ZeroNorm)));

        // Poisson mean 0.25; the n > 12 tail is below 0.25^13/13! ≈ 2e-18.
        let coh = coherent_amplitudes(Complex64::new(0.5, 0.0), 12, Expansion::Exact).unwrap();
        let state = product_input(&coh, &[Complex64::new(1.0, 0.0)], 12).unwrap();
        assert!((mean_photon_number(&state).unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn gain_examples() {
        let g = squeezing_from_gain(0.89, 1.13).unwrap();
        assert!((g.r - 0.0611).abs() < 1e-4);
        assert!((g.r_from_deamplification - 0.0583).abs() < 1e-4);
        assert!((g.r - 0.06).abs() < 0.002 && (g.r_from_deamplification - 0.06).abs() < 0.002);

        let g = squeezing_from_gain(1.0, 1.0).unwrap();
        assert_eq!(g.r, 0.0);

        let e2 = 2f64.exp();
        let g = squeezing_from_gain(1.0 / e2, e2).unwrap();
        assert!((g.r - 1.0).abs() < 1e-15 && (g.r_from_deamplification - 1.0).abs() < 1e-15);
        assert!(g.mismatch < 1e-15);

        assert!(squeezing_from_gain(0.0, 1.1).is_err());
        assert!(squeezing_from_gain(0.9, 0.95).is_err());
        assert!(squeezing_from_gain(1.1, 1.2).is_err());
    }

    #[test]
    fn warns_on_large_low_order_squeeze() {
        let src = SourceParams::new(0.1, 0.0, 0.5, 0.0, Expansion::LowOrder).unwrap();
        assert_eq!(src.warnings().len(), 1);
        let src = SourceParams::new(0.1, 0.0, 0.5, 0.0, Expansion::Exact).unwrap();
        assert!(src.warnings().is_empty());
        assert!(SourceParams::new(-0.1, 0.0, 0.1, 0.0, Expansion::Exact).is_err());
        assert!(SourceParams::new(0.1, f64::NAN, 0.1, 0.0, Expansion::Exact).is_err());
    }
}
