//! Run configuration: an optional flat JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use trifringe_core::{Expansion, ModelForm, RateModel, ScanKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    Verbatim,
    Corrected,
}

impl From<FormArg> for ModelForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Verbatim => ModelForm::Verbatim,
            FormArg::Corrected => ModelForm::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Oracle,
    Analytic,
}

impl From<ModelArg> for RateModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Oracle => RateModel::Oracle,
            ModelArg::Analytic => RateModel::Analytic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionArg {
    LowOrder,
    Exact,
}

impl From<ExpansionArg> for Expansion {
    fn from(e: ExpansionArg) -> Self {
        match e {
            ExpansionArg::LowOrder => Expansion::LowOrder,
            ExpansionArg::Exact => Expansion::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKindArg {
    Counts,
    Rate,
}

impl From<DataKindArg> for ScanKind {
    fn from(k: DataKindArg) -> Self {
        match k {
            DataKindArg::Counts => ScanKind::Counts,
            DataKindArg::Rate => ScanKind::ModelRate,
        }
    }
}

/// Every setting, each optional. Field names double as config-file keys.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Flat JSON file with default values for any of these options
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Squeezing parameter s (r for the exact expansion)
    #[arg(long, global = true)]
    pub squeeze: Option<f64>,
    /// Mean coherent photon number |α|²
    #[arg(long, global = true)]
    pub alpha_sq: Option<f64>,
    /// Amplitude ratio |α|²/s (alternative to --alpha-sq)
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    /// Coherent-state phase relative to the calibrated one, radians
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Squeezed-vacuum phase relative to the calibrated one, radians
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub squeeze_phase: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub expansion: Option<ExpansionArg>,
    /// Phase samples per period
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub form: Option<FormArg>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Expected counts per unit detection probability; makes `simulate` emit Poisson counts
    #[arg(long, global = true)]
    pub exposure: Option<f64>,
    /// Expected counts at the fringe peak; alternative to --exposure
    #[arg(long, global = true)]
    pub peak_counts: Option<f64>,
    #[arg(long, global = true)]
    pub ratio_min: Option<f64>,
    #[arg(long, global = true)]
    pub ratio_max: Option<f64>,
    /// Number of log-spaced ratios
    #[arg(long, global = true)]
    pub ratio_count: Option<usize>,
    /// Input scan for `fit`
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Iteration limit for `fit`
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// How `fit` weights the input; inferred from the values when absent
    #[arg(long, global = true, value_enum)]
    pub data_kind: Option<DataKindArg>,
    /// Fit a contrast factor on the oscillating terms instead of a free offset
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub float_visibility: Option<bool>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Summary table for `sweep`; defaults to `<out stem>_summary.csv`
    #[arg(long, global = true)]
    pub summary_out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    /// Loads the config file named by `--config` (if any) and applies the
    /// command-line values over it.
    pub fn resolve(flags: &RunConfig) -> CliResult<RunConfig> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_file(path)?,
            None => RunConfig::default(),
        };
        // a source given on the command line replaces the file's, whichever form it took
        if flags.alpha_sq.is_some() || flags.ratio.is_some() {
            cfg.alpha_sq = None;
            cfg.ratio = None;
        }
        if flags.exposure.is_some() || flags.peak_counts.is_some() {
            cfg.exposure = None;
            cfg.peak_counts = None;
        }
        overlay!(cfg, flags; squeeze, alpha_sq, ratio, theta, squeeze_phase, expansion, points, seed, form,
            model, exposure, peak_counts, ratio_min, ratio_max, ratio_count, input, max_iter, data_kind,
            float_visibility, out, summary_out);
        cfg.config = flags.config.clone();
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn squeeze_or(&self, default: f64) -> CliResult<f64> {
        let s = self.squeeze.unwrap_or(default);
        check(s.is_finite() && s >= 0.0, || format!("squeeze must be finite and >= 0, got {s}"))?;
        Ok(s)
    }

    /// `|α|²` from `--alpha-sq` or `--ratio × s`; both at once is an error.
    pub fn alpha_sq_or_ratio(&self, squeeze: f64, default_ratio: f64) -> CliResult<f64> {
        let alpha_sq = match (self.alpha_sq, self.ratio) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either alpha_sq or ratio, not both".into())),
            (Some(a), None) => a,
            (None, r) => r.unwrap_or(default_ratio) * squeeze,
        };
        check(alpha_sq.is_finite() && alpha_sq >= 0.0, || {
            format!("alpha_sq must be finite and >= 0, got {alpha_sq}")
        })?;
        Ok(alpha_sq)
    }

    pub fn points_or(&self, default: usize, min: usize) -> CliResult<usize> {
        let n = self.points.unwrap_or(default);
        check(n >= min, || format!("points must be at least {min}, got {n}"))?;
        Ok(n)
    }

    /// Log-spaced ratios from the range options.
    pub fn ratios_or(&self, lo: f64, hi: f64, count: usize) -> CliResult<Vec<f64>> {
        let lo = self.ratio_min.unwrap_or(lo);
        let hi = self.ratio_max.unwrap_or(hi);
        let n = self.ratio_count.unwrap_or(count);
        check(lo > 0.0 && lo.is_finite() && hi.is_finite(), || {
            format!("ratio range must be positive and finite, got [{lo}, {hi}]")
        })?;
        check(hi >= lo, || format!("ratio_max {hi} is below ratio_min {lo}"))?;
        check(n >= 1, || "ratio_count must be at least 1".into())?;
        check(n >= 2 || hi == lo, || "a ratio range needs ratio_count >= 2".into())?;
        Ok(trifringe_core::log_space(lo, hi, n))
    }

    pub fn finite_or(&self, value: Option<f64>, default: f64, name: &str) -> CliResult<f64> {
        let v = value.unwrap_or(default);
        check(v.is_finite(), || format!("{name} must be finite, got {v}"))?;
        Ok(v)
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}
