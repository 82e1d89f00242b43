//! JSON run configuration: problem, continuation and output blocks.
//!
//! Field names are part of the interface and unknown fields are rejected so
//! that a typo fails loudly instead of silently falling back to a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use perioscope_core::continuation::{ContinuationConfig, InitMode};
use perioscope_core::expr::Expression;
use perioscope_core::models::{Family, FourierTerm, PeriodicSignal, ProblemDef};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemBlock,
    pub continuation: ContinuationBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub family: FamilySpec,
    /// Damping coefficient.
    pub c: f64,
    /// Period.
    #[serde(rename = "T")]
    pub period: f64,
    /// Zero-average forcing.
    pub e: SignalSpec,
}

/// Families keyed by snake_case name, parameters inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    LazerSolimini { p: f64 },
    Mems { b: f64, p: f64, a: SignalSpec },
    CondensedMatter { a: f64 },
}

/// A periodic signal, either as expression text in `t` or as a list of
/// Fourier terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalSpec {
    Text(String),
    Terms(Vec<TermSpec>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub harmonic: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationBlock {
    pub xi_start: f64,
    pub xi_end: f64,
    /// Anchor for the initial correction; clamped into [xi_start, xi_end].
    #[serde(default)]
    pub xi_init: Option<f64>,
    #[serde(default = "defaults::delta_xi")]
    pub delta_xi: f64,
    #[serde(default = "defaults::newton_iters")]
    pub newton_iters: usize,
    #[serde(default = "defaults::newton_tol")]
    pub newton_tol: f64,
    #[serde(rename = "grid_N", default = "defaults::grid_n")]
    pub grid_n: usize,
    #[serde(default = "defaults::positivity_floor")]
    pub positivity_floor: f64,
    #[serde(default = "defaults::init_mode")]
    pub init_mode: InitMode,
    #[serde(default = "defaults::mu_cap")]
    pub mu_cap: f64,
}

mod defaults {
    use perioscope_core::continuation::InitMode;

    pub fn delta_xi() -> f64 {
        0.1
    }
    pub fn newton_iters() -> usize {
        2
    }
    pub fn newton_tol() -> f64 {
        1e-9
    }
    pub fn grid_n() -> usize {
        2048
    }
    pub fn positivity_floor() -> f64 {
        1e-4
    }
    pub fn init_mode() -> InitMode {
        InitMode::Cold
    }
    pub fn mu_cap() -> f64 {
        1e4
    }
    pub fn verbosity() -> u32 {
        1
    }
    pub fn csv() -> String {
        "curve.csv".into()
    }
    pub fn svg() -> String {
        "curve.svg".into()
    }
    pub fn report() -> String {
        "report.json".into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Curve CSV path, relative to the output directory.
    #[serde(default = "defaults::csv")]
    pub csv: String,
    #[serde(default = "defaults::svg")]
    pub svg: String,
    #[serde(default = "defaults::report")]
    pub report: String,
    /// 0 = quiet, 1 = summaries, 2 = per-point progress.
    #[serde(default = "defaults::verbosity")]
    pub verbosity: u32,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            csv: defaults::csv(),
            svg: defaults::svg(),
            report: defaults::report(),
            verbosity: defaults::verbosity(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|err| {
            CliError::Config(format!("cannot read {}: {err}", path.display()))
        })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|err| {
            CliError::Config(format!("{}: {err}", path.display()))
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Structural checks beyond what serde enforces; expression fields are
    /// parsed here so a bad one fails with its byte offset before any
    /// numerics run.
    pub fn validate(&self) -> Result<(), CliError> {
        signal(&self.problem.e, "problem.e")?;
        if let FamilySpec::Mems { a, .. } = &self.problem.family {
            signal(a, "problem.family.mems.a")?;
        }
        let cont = &self.continuation;
        for (name, value) in [
            ("continuation.xi_start", cont.xi_start),
            ("continuation.xi_end", cont.xi_end),
            ("continuation.delta_xi", cont.delta_xi),
            ("continuation.newton_tol", cont.newton_tol),
            ("continuation.positivity_floor", cont.positivity_floor),
            ("continuation.mu_cap", cont.mu_cap),
            ("problem.c", self.problem.c),
            ("problem.T", self.problem.period),
        ] {
            if !value.is_finite() {
                return Err(CliError::Config(format!("{name} must be finite, got {value}")));
            }
        }
        if cont.xi_start > cont.xi_end {
            return Err(CliError::Config(format!(
                "continuation.xi_start = {} exceeds xi_end = {}",
                cont.xi_start, cont.xi_end
            )));
        }
        if cont.delta_xi <= 0.0 {
            return Err(CliError::Config(format!(
                "continuation.delta_xi must be positive, got {}",
                cont.delta_xi
            )));
        }
        if cont.grid_n < 4 {
            return Err(CliError::Config(format!(
                "continuation.grid_N must be at least 4, got {}",
                cont.grid_n
            )));
        }
        Ok(())
    }

    /// Builds the validated core problem; model-level rejections (negative
    /// exponent, non-zero-average forcing, ...) surface as config errors.
    pub fn problem(&self) -> Result<ProblemDef, CliError> {
        let family = match &self.problem.family {
            FamilySpec::LazerSolimini { p } => Family::LazerSolimini { p: *p },
            FamilySpec::Mems { b, p, a } => Family::Mems {
                b: *b,
                p: *p,
                a: signal(a, "problem.family.mems.a")?,
            },
            FamilySpec::CondensedMatter { a } => Family::CondensedMatter { a: *a },
        };
        let forcing = signal(&self.problem.e, "problem.e")?;
        ProblemDef::new(family, self.problem.c, self.problem.period, forcing)
            .map_err(|err| CliError::Config(err.to_string()))
    }

    pub fn continuation(&self) -> ContinuationConfig {
        let cont = &self.continuation;
        ContinuationConfig {
            delta_xi: cont.delta_xi,
            newton_iters: cont.newton_iters,
            newton_tol: cont.newton_tol,
            grid_steps: cont.grid_n,
            positivity_floor: cont.positivity_floor,
            init_mode: cont.init_mode,
            mu_cap: cont.mu_cap,
            max_step_halvings: ContinuationConfig::default().max_step_halvings,
        }
    }

    /// Anchor for the initial correction (default 8, clamped into range).
    pub fn anchor(&self) -> f64 {
        let cont = &self.continuation;
        cont.xi_init.unwrap_or(8.0).clamp(cont.xi_start, cont.xi_end)
    }

    pub fn csv_path(&self, out_dir: &Path) -> PathBuf {
        out_dir.join(&self.output.csv)
    }

    pub fn svg_path(&self, out_dir: &Path) -> PathBuf {
        out_dir.join(&self.output.svg)
    }

    pub fn report_path(&self, out_dir: &Path) -> PathBuf {
        out_dir.join(&self.output.report)
    }
}

fn signal(spec: &SignalSpec, context: &str) -> Result<PeriodicSignal, CliError> {
    match spec {
        SignalSpec::Text(text) => {
            let expr = Expression::parse(text)
                .map_err(|err| CliError::Config(format!("{context}: {err}")))?;
            Ok(PeriodicSignal::Expression(expr))
        }
        SignalSpec::Terms(terms) => Ok(PeriodicSignal::Fourier(
            terms
                .iter()
                .map(|t| FourierTerm {
                    harmonic: t.harmonic,
                    cos_coeff: t.cos,
                    sin_coeff: t.sin,
                })
                .collect(),
        )),
    }
}

/// The built-in configurations behind `reproduce fig1|fig2|fig3`.
pub fn builtin(figure: &str) -> Option<RunConfig> {
    let (family, c, period, e, xi_start, xi_end, xi_init) = match figure {
        "fig1" => (
            FamilySpec::LazerSolimini { p: 0.5 },
            0.5,
            1.2,
            "6*sin(2*pi*t/1.2)",
            0.4,
            12.0,
            8.0,
        ),
        "fig2" => (
            FamilySpec::Mems {
                b: 2.0,
                p: 3.0,
                a: SignalSpec::Text("2+cos(2*pi*t/0.8)^3".into()),
            },
            0.5,
            0.8,
            "5*sin(2*pi*t/0.8)",
            0.4,
            8.0,
            3.0,
        ),
        "fig3" => (
            FamilySpec::CondensedMatter { a: 3.0 },
            0.3,
            1.0,
            "8*cos(2*pi*t)",
            0.6,
            6.0,
            4.0,
        ),
        _ => return None,
    };
    Some(RunConfig {
        problem: ProblemBlock {
            family,
            c,
            period,
            e: SignalSpec::Text(e.into()),
        },
        continuation: ContinuationBlock {
            xi_start,
            xi_end,
            xi_init: Some(xi_init),
            delta_xi: defaults::delta_xi(),
            newton_iters: defaults::newton_iters(),
            newton_tol: defaults::newton_tol(),
            grid_n: defaults::grid_n(),
            positivity_floor: defaults::positivity_floor(),
            init_mode: defaults::init_mode(),
            mu_cap: defaults::mu_cap(),
        },
        output: OutputBlock {
            csv: format!("{figure}.csv"),
            svg: format!("{figure}.svg"),
            report: format!("{figure}-report.json"),
            verbosity: defaults::verbosity(),
        },
    })
}
