//! Truncated two-mode photon-number states and the linear-optical maps that act on them.
//!
//! A [`TwoModeState`] stores one complex amplitude per ket `|n_a, n_b⟩` with both
//! occupations bounded by `n_max`. Beam splitters are applied by expanding the
//! creation-operator substitution with exact binomial coefficients, so every
//! total-photon sector that fits inside the truncation is mapped unitarily. Kets
//! whose image would need more than `n_max` photons in one mode are dropped; this
//! can only happen for inputs carrying more than `n_max` photons in total.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation used throughout the crate unless a caller asks for something else.
pub const DEFAULT_N_MAX: usize = 6;

const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    n_max: usize,
    amps: Vec<Complex64>,
}

impl TwoModeState {
    pub fn zero(n_max: usize) -> Self {
        let dim = n_max + 1;
        Self {
            n_max,
            amps: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut state = Self::zero(n_max);
        state.amps[0] = Complex64::new(1.0, 0.0);
        state
    }

    /// Builds a state from explicit `((n_a, n_b), amplitude)` entries.
    ///
    /// Rejects out-of-range or repeated indices and any entry set whose squared
    /// norm exceeds one.
    pub fn from_entries(n_max: usize, entries: &[((usize, usize), Complex64)]) -> Result<Self> {
        let mut state = Self::zero(n_max);
        let mut seen = vec![false; state.amps.len()];
        for &((n_a, n_b), amp) in entries {
            if n_a > n_max || n_b > n_max {
                return Err(Error::IndexOutOfRange { n_a, n_b, n_max });
            }
            let idx = state.index(n_a, n_b);
            if seen[idx] {
                return Err(Error::DuplicateIndex { n_a, n_b });
            }
            seen[idx] = true;
            state.amps[idx] = amp;
        }
        let norm = state.norm_sq();
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::NormExceeded { norm });
        }
        Ok(state)
    }

    /// Tensor product of two single-mode amplitude lists, without a norm check.
    ///
    /// Used for the unnormalized low-order source expansions, whose coefficient
    /// vectors may have norm above one.
    pub(crate) fn from_product(n_max: usize, first: &[Complex64], second: &[Complex64]) -> Self {
        let mut state = Self::zero(n_max);
        for (n_a, &ca) in first.iter().enumerate() {
            for (n_b, &cb) in second.iter().enumerate() {
                let idx = state.index(n_a, n_b);
                state.amps[idx] = ca * cb;
            }
        }
        state
    }

    #[inline]
    fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.n_max + 1) + n_b
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Option<Complex64> {
        (n_a <= self.n_max && n_b <= self.n_max).then(|| self.amps[self.index(n_a, n_b)])
    }

    /// Iterates over `((n_a, n_b), amplitude)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        let dim = self.n_max + 1;
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, &amp)| ((i / dim, i % dim), amp))
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Squared norm restricted to kets with `n_a + n_b == total`.
    pub fn sector_norm_sq(&self, total: usize) -> f64 {
        self.iter()
            .filter(|((a, b), _)| a + b == total)
            .map(|(_, amp)| amp.norm_sqr())
            .sum()
    }

    /// Largest total photon number carrying a nonzero amplitude.
    pub fn max_total_photons(&self) -> Option<usize> {
        self.iter()
            .filter(|(_, amp)| *amp != Complex64::new(0.0, 0.0))
            .map(|((a, b), _)| a + b)
            .max()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n_max: self.n_max,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }
}

pub fn make_state(n_max: usize, entries: &[((usize, usize), Complex64)]) -> Result<TwoModeState> {
    TwoModeState::from_entries(n_max, entries)
}

pub fn norm_sq(state: &TwoModeState) -> f64 {
    state.norm_sq()
}

/// Reflection-phase convention of a beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitterConvention {
    /// `a† → √T c† + i√R d†`, `b† → i√R c† + √T d†`.
    SymmetricPhase,
    /// `a† → √T c† + √R d†`, `b† → √R c† − √T d†`.
    RealAsymmetric,
}

impl SplitterConvention {
    pub const ALL: [SplitterConvention; 2] = [Self::SymmetricPhase, Self::RealAsymmetric];

    pub fn name(self) -> &'static str {
        match self {
            Self::SymmetricPhase => "symmetric-phase",
            Self::RealAsymmetric => "real-asymmetric",
        }
    }
}

/// Single-photon transfer matrix of a two-mode linear-optical element.
///
/// `m[out][in]`: the input creation operator of mode `in` maps to
/// `Σ_out m[out][in] · (output creation operator of mode out)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix(pub [[Complex64; 2]; 2]);

impl ModeMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Matrix product `self · rhs`, i.e. `rhs` acts first.
    pub fn then_after(&self, rhs: &ModeMatrix) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    transmissivity: f64,
    pub convention: SplitterConvention,
}

impl BeamSplitterSpec {
    pub fn new(transmissivity: f64, convention: SplitterConvention) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(Error::InvalidParameter(format!(
                "beam-splitter transmissivity {transmissivity} outside [0, 1]"
            )));
        }
        Ok(Self {
            transmissivity,
            convention,
        })
    }

    pub fn balanced(convention: SplitterConvention) -> Self {
        Self {
            transmissivity: 0.5,
            convention,
        }
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn matrix(&self) -> ModeMatrix {
        let (t, r) = if self.transmissivity == 0.5 {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        } else {
            (self.transmissivity.sqrt(), (1.0 - self.transmissivity).sqrt())
        };
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |x: f64| Complex64::new(0.0, x);
        match self.convention {
            SplitterConvention::SymmetricPhase => ModeMatrix([[re(t), im(r)], [im(r), re(t)]]),
            SplitterConvention::RealAsymmetric => ModeMatrix([[re(t), re(r)], [re(r), re(-t)]]),
        }
    }
}

pub fn apply_beam_splitter(state: &TwoModeState, spec: &BeamSplitterSpec) -> TwoModeState {
    apply_mode_transform(state, &spec.matrix())
}

/// Applies an arbitrary two-mode linear transform by creation-operator expansion.
pub fn apply_mode_transform(state: &TwoModeState, u: &ModeMatrix) -> TwoModeState {
    let n_max = state.n_max;
    let tables = ExpansionTables::new(n_max);
    let pow = |z: Complex64| -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n_max + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=n_max {
            out.push(acc);
            acc *= z;
        }
        out
    };
    let m = &u.0;
    let (a_to_c, a_to_d) = (pow(m[0][0]), pow(m[1][0]));
    let (b_to_c, b_to_d) = (pow(m[0][1]), pow(m[1][1]));

    let mut out = TwoModeState::zero(n_max);
    let zero = Complex64::new(0.0, 0.0);
    for ((na, nb), amp) in state.iter() {
        if amp == zero {
            continue;
        }
        let pre = amp / (tables.fact[na] * tables.fact[nb]).sqrt();
        let total = na + nb;
        for j in 0..=na {
            let wa = a_to_c[j] * a_to_d[na - j] * tables.binom(na, j);
            for k in 0..=nb {
                let p = j + k;
                let q = total - p;
                if p > n_max || q > n_max {
                    continue;
                }
                let wb = b_to_c[k] * b_to_d[nb - k] * tables.binom(nb, k);
                let idx = out.index(p, q);
                out.amps[idx] += pre * wa * wb * (tables.fact[p] * tables.fact[q]).sqrt();
            }
        }
    }
    out
}

struct ExpansionTables {
    fact: Vec<f64>,
}

impl ExpansionTables {
    fn new(n_max: usize) -> Self {
        let mut fact = vec![1.0; n_max + 1];
        for n in 1..=n_max {
            fact[n] = fact[n - 1] * n as f64;
        }
        Self { fact }
    }

    #[inline]
    fn binom(&self, n: usize, k: usize) -> f64 {
        self.fact[n] / (self.fact[k] * self.fact[n - k])
    }
}

/// Interferometer arm that carries a phase shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    First,
    Second,
}

/// Multiplies the amplitude at `(n_a, n_b)` by `exp(i·n·φ)`, with `n` the
/// occupation of `arm`.
pub fn apply_phase(state: &TwoModeState, phi: f64, arm: Arm) -> TwoModeState {
    let n_max = state.n_max;
    let phases: Vec<Complex64> = (0..=n_max)
        .map(|n| Complex64::from_polar(1.0, n as f64 * phi))
        .collect();
    let amps = state
        .iter()
        .map(|((na, nb), amp)| {
            let n = match arm {
                Arm::First => na,
                Arm::Second => nb,
            };
            amp * phases[n]
        })
        .collect();
    TwoModeState { n_max, amps }
}

/// Probability `|⟨n_f, n_g|ψ⟩|²` of detecting exactly `n_f` and `n_g` photons.
pub fn project_photon_numbers(state: &TwoModeState, n_f: usize, n_g: usize) -> Result<f64> {
    state
        .amplitude(n_f, n_g)
        .map(|a| a.norm_sqr())
        .ok_or(Error::IndexOutOfRange {
            n_a: n_f,
            n_b: n_g,
            n_max: state.n_max,
        })
}
