//! Least-squares fits of measured fringes to the three-harmonic model
//!
//! ```text
//! R(φ) = scale · (offset + vis · Σ_k w_k(y) cos k(φ − φ1)),   k = 1, 2, 3
//! ```
//!
//! where `y` is the (scaled) amplitude ratio `|α|²/s` and the weights `w_k(y)`
//! come either from the verbatim fitting formula or from the calibrated
//! closed-form coefficients. Also generates seeded Poisson count scans from the
//! exact simulation.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::metrology::project_harmonics;
use crate::mzi::{analytic_coefficients, ModelForm, MziSettings, OracleFringe, CALIBRATED};
use crate::scan::{wrap_phase, FringeScan, ScanKind};
use crate::source::{Expansion, SourceParams};

pub const MAX_ITER: usize = 500;
/// relative objective decrease below which an iteration counts as stalled
pub const OBJECTIVE_TOL: f64 = 1e-10;
/// largest allowed `|J_jᵀ r| / (‖J_j‖ ‖d‖)` for any Jacobian column `j`
pub const GRADIENT_TOL: f64 = 1e-8;
pub const MIN_POINTS: usize = 8;
/// A fit is exact when the weighted residual norm is this fraction of the
/// weighted data norm (ten significant digits). Below that the residuals are
/// rounding noise and further steps cannot lower the objective.
pub const EXACT_FIT_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitModelParams {
    pub scale: f64,
    /// DC level in units of `scale`
    pub offset: f64,
    /// `a·|α|²/s`
    pub y: f64,
    pub phi1: f64,
    pub vis: f64,
}

impl FitModelParams {
    pub fn new(scale: f64, offset: f64, y: f64, phi1: f64, vis: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("y must be positive, got {y}")));
        }
        if !(0.0..=1.0).contains(&vis) {
            return Err(Error::InvalidParameter(format!("vis must lie in [0, 1], got {vis}")));
        }
        if !offset.is_finite() || !phi1.is_finite() {
            return Err(Error::InvalidParameter("offset and phi1 must be finite".into()));
        }
        Ok(Self {
            scale,
            offset,
            y,
            phi1,
            vis,
        })
    }

    /// Parameters whose model coincides with the ideal fringe: the DC term is
    /// the form's own `dc(y)` and `vis = 1`.
    pub fn ideal(scale: f64, y: f64, phi1: f64, form: ModelForm) -> Result<Self> {
        Self::new(scale, form_weights(y, form)[0], y, phi1, 1.0)
    }
}

/// `[dc, w1, w2, w3]` for amplitude ratio `y`.
///
/// Verbatim: `w3 = −(y−3)²`, `w2 = 12(y−3)(y+1)`, `w1 = −6y(y+1)(5y−3)`, and
/// `dc = (y−3)² + 9(y+1)²`. Corrected: the calibrated closed-form coefficients
/// at `|α|² = y`, `s = 1`, divided by `y` and the probability scale, with the
/// phase origin folded into the signs.
pub fn form_weights(y: f64, form: ModelForm) -> [f64; 4] {
    match form {
        ModelForm::Verbatim => {
            let m = y - 3.0;
            let p = y + 1.0;
            [m * m + 9.0 * p * p, -6.0 * y * p * (5.0 * y - 3.0), 12.0 * m * p, -m * m]
        }
        ModelForm::Corrected => {
            let src = SourceParams {
                alpha_mag: y.sqrt(),
                alpha_phase: CALIBRATED.alpha_phase,
                squeeze: 1.0,
                squeeze_phase: CALIBRATED.squeeze_phase,
                expansion: Expansion::LowOrder,
            };
            let h = analytic_coefficients(&src, ModelForm::Corrected).signed_harmonics();
            let unit = CALIBRATED.scale * y;
            [h[0] / unit, h[1] / unit, h[2] / unit, h[3] / unit]
        }
    }
}

pub fn fit_model_eval(p: &FitModelParams, phase: f64, form: ModelForm) -> f64 {
    eval_with_weights(p, &form_weights(p.y, form), phase)
}

fn eval_with_weights(p: &FitModelParams, w: &[f64; 4], phase: f64) -> f64 {
    let x = phase - p.phi1;
    let osc = w[1] * x.cos() + w[2] * (2.0 * x).cos() + w[3] * (3.0 * x).cos();
    p.scale * (p.offset + p.vis * osc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub form: ModelForm,
    /// Float `vis` instead of `offset`; the DC term is then tied to `dc(y)`.
    pub float_visibility: bool,
    pub max_iter: usize,
}

impl FitOptions {
    pub fn new(form: ModelForm) -> Self {
        Self {
            form,
            float_visibility: false,
            max_iter: MAX_ITER,
        }
    }
}

/// One-sigma errors; `None` for a parameter that was held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardErrors {
    pub scale: f64,
    pub offset: Option<f64>,
    pub y: f64,
    pub phi1: f64,
    pub vis: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: FitModelParams,
    pub std_errors: StandardErrors,
    /// unweighted root-mean-square of `data − model`
    pub residual_rms: f64,
    /// weighted sum of squared residuals at the optimum
    pub objective: f64,
    pub gradient_norm: f64,
    pub n_iter: usize,
    pub converged: bool,
    pub form: ModelForm,
    pub float_visibility: bool,
    /// objective after every accepted step, starting with the initial value
    pub objective_trace: Vec<f64>,
}

/// Starting point from the scan's harmonic content.
///
/// Scans `y` over a log grid; for each `y` the phase `φ1` comes from the phase
/// of the scan's dominant harmonic (one candidate per symmetry copy), and the
/// candidate whose model harmonics best match the measured ones wins.
pub fn fit_initialize(scan: &FringeScan, form: ModelForm) -> Result<FitModelParams> {
    if scan.len() < MIN_POINTS {
        return Err(Error::InvalidScan(format!(
            "fitting needs at least {MIN_POINTS} points, got {}",
            scan.len()
        )));
    }
    let fc = project_harmonics(scan)?;
    let c = [fc.c1, fc.c2, fc.c3];
    let mags = fc.magnitudes();
    let top = mags.iter().copied().fold(0.0, f64::max);
    if !(top > 1e-12 * fc.c0.abs()) {
        return Err(Error::DegenerateScan("no oscillating component".into()));
    }
    let k_dom = fc.dominant_harmonic();

    let mut best: Option<(f64, f64, f64, f64)> = None; // (mismatch, y, phi1, amp)
    for step in -600..=600 {
        let y = 10f64.powf(step as f64 / 200.0);
        let w = form_weights(y, form);
        let wk = w[k_dom];
        if wk.abs() < 1e-300 {
            continue;
        }
        let amp = c[k_dom - 1].norm() / wk.abs();
        let wk_arg = if wk < 0.0 { PI } else { 0.0 };
        let base = -(c[k_dom - 1].arg() - wk_arg) / k_dom as f64;
        for m in 0..k_dom {
            let phi1 = base + TAU * m as f64 / k_dom as f64;
            let mismatch: f64 = (1..=3)
                .map(|k| {
                    let model = Complex64::from_polar(amp * w[k], -(k as f64) * phi1);
                    (c[k - 1] - model).norm_sqr()
                })
                .sum();
            if best.is_none_or(|b| mismatch < b.0) {
                best = Some((mismatch, y, phi1, amp));
            }
        }
    }
    let (_, y, phi1, amp) = best.ok_or_else(|| Error::DegenerateScan("no admissible y".into()))?;
    FitModelParams::new(amp, fc.c0 / amp, y, wrap_phase(phi1), 1.0)
}

/// Internal coordinates: `[ln scale, ln y, φ1, offset or vis]`.
#[derive(Clone, Copy)]
struct Layout {
    form: ModelForm,
    float_visibility: bool,
}

impl Layout {
    fn encode(&self, p: &FitModelParams) -> Vector4<f64> {
        let last = if self.float_visibility { p.vis } else { p.offset };
        Vector4::new(p.scale.ln(), p.y.ln(), p.phi1, last)
    }

    fn decode(&self, t: &Vector4<f64>) -> (FitModelParams, [f64; 4]) {
        let y = t[1].exp();
        let w = form_weights(y, self.form);
        let (offset, vis) = if self.float_visibility {
            (w[0], t[3].clamp(0.0, 1.0))
        } else {
            (t[3], 1.0)
        };
        let p = FitModelParams {
            scale: t[0].exp(),
            offset,
            y,
            phi1: t[2],
            vis,
        };
        (p, w)
    }
}

struct Problem<'a> {
    phases: &'a [f64],
    values: &'a [f64],
    sqrt_w: Vec<f64>,
    layout: Layout,
}

impl Problem<'_> {
    fn residuals(&self, t: &Vector4<f64>, out: &mut [f64]) {
        let (p, w) = self.layout.decode(t);
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.sqrt_w[i] * (eval_with_weights(&p, &w, self.phases[i]) - self.values[i]);
        }
    }

    fn objective(&self, t: &Vector4<f64>, buf: &mut [f64]) -> f64 {
        self.residuals(t, buf);
        buf.iter().map(|r| r * r).sum()
    }

    /// Central-difference Jacobian, row-major `n × 4`.
    fn jacobian(&self, t: &Vector4<f64>, jac: &mut [[f64; 4]], plus: &mut [f64], minus: &mut [f64]) {
        for j in 0..4 {
            let h = 1e-6 * t[j].abs().max(1.0);
            let mut tp = *t;
            let mut tm = *t;
            tp[j] += h;
            tm[j] -= h;
            self.residuals(&tp, plus);
            self.residuals(&tm, minus);
            for (i, row) in jac.iter_mut().enumerate() {
                row[j] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
    }
}

fn normal_equations(jac: &[[f64; 4]], r: &[f64]) -> (Matrix4<f64>, Vector4<f64>) {
    let mut h = Matrix4::zeros();
    let mut g = Vector4::zeros();
    for (row, &ri) in jac.iter().zip(r) {
        for a in 0..4 {
            g[a] += row[a] * ri;
            for b in a..4 {
                h[(a, b)] += row[a] * row[b];
            }
        }
    }
    for a in 0..4 {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    (h, g)
}

/// `max_j |J_jᵀ r| / (‖J_j‖ ‖d‖)` with `d` the weighted data: scale-free, zero
/// at a stationary point, and never larger than the residual-to-data ratio, so
/// an exact fit passes it.
fn relative_gradient(jac: &[[f64; 4]], g: &Vector4<f64>, data_norm: f64) -> f64 {
    (0..4)
        .map(|j| {
            let col = jac.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt();
            if col == 0.0 {
                0.0
            } else {
                g[j].abs() / (col * data_norm)
            }
        })
        .fold(0.0, f64::max)
}

fn solve(m: Matrix4<f64>, rhs: &Vector4<f64>) -> Option<Vector4<f64>> {
    match m.cholesky() {
        Some(ch) => Some(ch.solve(rhs)),
        None => m.lu().solve(rhs),
    }
}

pub fn fit_fringe(scan: &FringeScan, form: ModelForm, init: Option<FitModelParams>) -> Result<FitResult> {
    fit_fringe_with(scan, &FitOptions::new(form), init)
}

/// Weighted least squares by Levenberg–Marquardt with a numeric Jacobian.
///
/// Count scans are weighted by `1/max(count, 1)`, model-rate scans uniformly.
/// Converged when two successive accepted steps each lower the objective by a
/// relative amount below [`OBJECTIVE_TOL`] with the relative gradient below
/// [`GRADIENT_TOL`], when the data are fitted exactly (see [`EXACT_FIT_REL`]), or when no step can lower
/// the objective and the gradient test holds. Otherwise the best point found
/// is returned with `converged = false`.
pub fn fit_fringe_with(scan: &FringeScan, opts: &FitOptions, init: Option<FitModelParams>) -> Result<FitResult> {
    if scan.len() < MIN_POINTS {
        return Err(Error::InvalidScan(format!(
            "fitting needs at least {MIN_POINTS} points, got {}",
            scan.len()
        )));
    }
    let span = scan.phases()[scan.len() - 1] - scan.phases()[0];
    if span < TAU * (1.0 - 1.0 / scan.len() as f64) * (1.0 - 1e-9) {
        return Err(Error::InvalidScan(format!("scan spans {span:.6} rad, less than one period")));
    }
    let max = scan.max_value();
    let min = scan.values().iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || max - min <= 1e-12 * max {
        return Err(Error::DegenerateScan("constant values".into()));
    }

    let init = match init {
        Some(p) => p,
        None => fit_initialize(scan, opts.form)?,
    };
    let layout = Layout {
        form: opts.form,
        float_visibility: opts.float_visibility,
    };
    let init = if opts.float_visibility {
        // move the DC level from `offset` into the tied dc(y), keeping the
        // oscillation amplitude `scale·vis`
        let w = form_weights(init.y, opts.form);
        let dc = init.scale * init.offset;
        let scale = if w[0] > 0.0 && dc > 0.0 { dc / w[0] } else { init.scale };
        let vis = (init.scale * init.vis / scale).clamp(0.0, 1.0);
        FitModelParams { scale, vis, ..init }
    } else {
        init
    };

    let sqrt_w: Vec<f64> = match scan.kind() {
        ScanKind::Counts => scan.values().iter().map(|v| 1.0 / v.max(1.0).sqrt()).collect(),
        ScanKind::ModelRate => vec![1.0; scan.len()],
    };
    let problem = Problem {
        phases: scan.phases(),
        values: scan.values(),
        sqrt_w,
        layout,
    };
    let n = scan.len();
    let data_norm: f64 = problem
        .values
        .iter()
        .zip(&problem.sqrt_w)
        .map(|(v, w)| (v * w).powi(2))
        .sum();

    let mut theta = layout.encode(&init);
    let mut r = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let (mut plus, mut minus) = (vec![0.0; n], vec![0.0; n]);
    let mut jac = vec![[0.0; 4]; n];
    let mut chi2 = problem.objective(&theta, &mut r);
    let mut trace = vec![chi2];
    let mut lambda = 1e-3;
    let mut stalled = 0;
    let mut converged = false;
    let mut gnorm: f64;
    let mut n_iter = 0;

    while n_iter < opts.max_iter {
        n_iter += 1;
        problem.residuals(&theta, &mut r);
        problem.jacobian(&theta, &mut jac, &mut plus, &mut minus);
        let (h, g) = normal_equations(&jac, &r);
        gnorm = relative_gradient(&jac, &g, data_norm.sqrt());
        if chi2 <= EXACT_FIT_REL * EXACT_FIT_REL * data_norm {
            converged = true;
            break;
        }

        let mut accepted = None;
        while lambda <= 1e16 {
            let mut damped = h;
            for j in 0..4 {
                damped[(j, j)] += lambda * h[(j, j)].max(1e-300);
            }
            if let Some(step) = solve(damped, &(-g)) {
                let cand = theta + step;
                let c2 = problem.objective(&cand, &mut trial);
                if c2.is_finite() && c2 < chi2 {
                    accepted = Some((cand, c2));
                    lambda = (lambda / 10.0).max(1e-12);
                    break;
                }
            }
            lambda *= 10.0;
        }
        match accepted {
            Some((cand, c2)) => {
                let rel = (chi2 - c2) / chi2;
                theta = cand;
                chi2 = c2;
                trace.push(chi2);
                if rel < OBJECTIVE_TOL && gnorm < GRADIENT_TOL {
                    stalled += 1;
                    if stalled >= 2 {
                        converged = true;
                        break;
                    }
                } else {
                    stalled = 0;
                }
            }
            None => {
                converged = gnorm < GRADIENT_TOL;
                break;
            }
        }
    }

    // covariance of the internal coordinates
    problem.residuals(&theta, &mut r);
    problem.jacobian(&theta, &mut jac, &mut plus, &mut minus);
    let (h, g) = normal_equations(&jac, &r);
    gnorm = relative_gradient(&jac, &g, data_norm.sqrt());
    converged &= gnorm < GRADIENT_TOL;
    let dof = n.saturating_sub(4).max(1) as f64;
    let var_scale = match scan.kind() {
        ScanKind::Counts => 1.0,
        ScanKind::ModelRate => chi2 / dof,
    };
    let cov = h.try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN)) * var_scale;
    let se = |j: usize| cov[(j, j)].max(0.0).sqrt();

    let (mut params, w) = layout.decode(&theta);
    params.phi1 = representative_phase(params.phi1, init.phi1, &w);
    let std_errors = StandardErrors {
        scale: params.scale * se(0),
        offset: (!opts.float_visibility).then(|| se(3)),
        y: params.y * se(1),
        phi1: se(2),
        vis: opts.float_visibility.then(|| se(3)),
    };
    let residual_rms = (scan
        .phases()
        .iter()
        .zip(scan.values())
        .map(|(&ph, &v)| (eval_with_weights(&params, &w, ph) - v).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();

    Ok(FitResult {
        params,
        std_errors,
        residual_rms,
        objective: chi2,
        gradient_norm: gnorm,
        n_iter,
        converged,
        form: opts.form,
        float_visibility: opts.float_visibility,
        objective_trace: trace,
    })
}

/// Picks the copy of `phi1` (modulo the model's own period) nearest `reference`,
/// wrapped into `(−π, π]`.
fn representative_phase(phi1: f64, reference: f64, w: &[f64; 4]) -> f64 {
    let big = w[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let present: Vec<usize> = (1..=3).filter(|&k| w[k].abs() > 1e-9 * big).collect();
    let period_div = present.iter().fold(0, |g, &k| gcd(g, k)).max(1);
    let period = TAU / period_div as f64;
    let shift = ((reference - phi1) / period).round();
    wrap_phase(phi1 + shift * period)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Poisson counts with mean `exposure × oracle rate` at each phase.
///
/// The generator is seeded from `seed` alone, so equal inputs give equal scans.
pub fn synthetic_scan(
    src: &SourceParams,
    settings: &MziSettings,
    phases: &[f64],
    exposure: f64,
    seed: u64,
) -> Result<FringeScan> {
    if !(exposure >= 0.0 && exposure.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "exposure must be finite and non-negative, got {exposure}"
        )));
    }
    let fringe = OracleFringe::new(src, settings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(phases.len());
    for &p in phases {
        let mean = exposure * fringe.rate(p);
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter(format!("Poisson mean {mean}: {e}")))?
                .sample(&mut rng)
        } else {
            0.0
        };
        values.push(count);
    }
    FringeScan::new(phases.to_vec(), values, ScanKind::Counts)
}
