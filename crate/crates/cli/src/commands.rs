//! One function per subcommand. Each returns the report plus plot tables.

use delay_margin::stability::{
    certify, hinf_boundary_norm, neutral_demo, operator_margin, unbounded_a_demo,
};
use delay_margin::zen::{
    adjoint_samples, verify_isometry, verify_multiplier, weight_from_measure, QuadConfig,
};
use delay_margin::{Error, GridConfig, HinfCertificate, MarginConfig, Status};
use serde::Serialize;
use serde_json::{json, Value};

use crate::problem::{error_code, Diagnostic, Kind, ProblemFile, SystemSpec, ZenSpec};
use crate::report::{Report, Tables};

pub const DEFAULT_NEUTRAL_SAMPLES: usize = 20;
pub const DEFAULT_TRUNCATIONS: usize = 8;
/// Slack in `‖GF‖/‖F‖ ≤ sup|G|` before a symbol is flagged.
pub const CONTRACTIVE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
pub struct Flags {
    pub tol: Option<f64>,
    pub h_max: Option<f64>,
    pub seed: Option<u64>,
}

pub struct Outcome {
    pub report: Report,
    pub tables: Tables,
    pub degenerate: bool,
}

fn failed(path: &str, e: &Error) -> Vec<Diagnostic> {
    vec![Diagnostic::from_error(path, e)]
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize to JSON")
}

fn system(p: &ProblemFile) -> &SystemSpec {
    p.system.as_ref().expect("checked by preflight")
}

pub fn run(kind: Kind, problem: &ProblemFile, flags: Flags) -> Result<Outcome, Vec<Diagnostic>> {
    match kind {
        Kind::Margin => margin(problem, flags),
        Kind::Hinf => hinf(problem, flags),
        Kind::ZenVerify => zen_verify(problem, flags),
        Kind::NeutralDemo => {
            let n = problem.n_max.unwrap_or(DEFAULT_NEUTRAL_SAMPLES);
            let samples = neutral_demo(n).map_err(|e| failed("n_max", &e))?;
            Ok(plain(kind, problem, json!({ "n_max": n }), value(&samples)))
        }
        Kind::UnboundedDemo => {
            let n = problem.n_max.unwrap_or(DEFAULT_TRUNCATIONS);
            let samples = unbounded_a_demo(n).map_err(|e| failed("n_max", &e))?;
            Ok(plain(kind, problem, json!({ "n_max": n }), value(&samples)))
        }
    }
}

fn plain(kind: Kind, problem: &ProblemFile, config: Value, result: Value) -> Outcome {
    Outcome {
        report: Report::new(kind.name(), value(problem), config, result, Vec::new()),
        tables: Tables::default(),
        degenerate: false,
    }
}

fn margin(problem: &ProblemFile, flags: Flags) -> Result<Outcome, Vec<Diagnostic>> {
    let spec = system(problem);
    let sys = spec.build();
    let mut warnings = Vec::new();
    let h_max = flags.h_max.or(spec.h_max).ok_or_else(|| {
        vec![Diagnostic {
            path: "system.h_max".into(),
            code: "schema".into(),
            message: "required for kind `margin` (or pass --h-max)".into(),
        }]
    })?;
    if !(h_max.is_finite() && h_max >= 0.0) {
        return Err(failed(
            "system.h_max",
            &Error::InvalidInput("must be a finite nonnegative number".into()),
        ));
    }
    let cfg = MarginConfig {
        tol: flags.tol.unwrap_or(problem.margin.tol),
        ..problem.margin
    };
    let mut report = operator_margin(&sys, h_max, &cfg).map_err(|e| failed("system", &e))?;
    if let Some(h) = spec.h {
        match certify(&sys, &mut report, h, &problem.grid) {
            Ok(()) => {}
            Err(Error::SingularOnGrid { omega }) => warnings.push(format!(
                "certificate at h = {h}: operator singular on the axis at omega = {omega}"
            )),
            Err(e) => return Err(failed("system.h", &e)),
        }
    }
    warnings.extend(report.notes.iter().cloned());
    if report.windows_per_sample_only && report.aggregate_windows.len() > 1 {
        warnings.push(
            "windows after the first are intersections over the sampled spectral values only"
                .into(),
        );
    }
    for r in &report.per_lambda {
        if r.status == Status::Degenerate {
            for n in &r.notes {
                warnings.push(format!("lambda = [{}, {}]: {n}", r.lambda.re, r.lambda.im));
            }
        }
        for e in r.events.iter().filter(|e| e.degenerate) {
            warnings.push(format!(
                "degenerate crossing at lambda = [{}, {}], omega = {}, h = {}",
                e.lambda.re, e.lambda.im, e.omega, e.h
            ));
        }
    }
    let tables = Tables {
        events: Some(
            report
                .per_lambda
                .iter()
                .flat_map(|r| r.events.iter().copied())
                .collect(),
        ),
        norm_grid: report.certificate.as_ref().map(|c| c.grid.clone()),
    };
    let config = json!({ "margin": cfg, "grid": problem.grid, "h_max": h_max });
    Ok(Outcome {
        degenerate: report.status == Status::Degenerate,
        report: Report::new("margin", value(problem), config, value(&report), warnings),
        tables,
    })
}

#[derive(Serialize)]
struct HinfOutcome {
    /// `stable`, `unstable`, or `unverified` when zeros cannot be counted.
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    singular_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<HinfCertificate>,
}

fn hinf(problem: &ProblemFile, flags: Flags) -> Result<Outcome, Vec<Diagnostic>> {
    let spec = system(problem);
    let h = spec.h.expect("checked by preflight");
    let grid = GridConfig {
        tol: flags.tol.unwrap_or(problem.grid.tol),
        ..problem.grid
    };
    let mut warnings = Vec::new();
    let outcome = match hinf_boundary_norm(&spec.build(), h, &grid) {
        Ok(c) => {
            if !c.refined {
                warnings.push(format!(
                    "sup estimate not converged after {} grid levels",
                    c.levels
                ));
            }
            let verdict = match c.is_stable() {
                Some(true) => "stable",
                Some(false) => "unstable",
                None => {
                    warnings.push(
                        "right-half-plane zeros are not counted for continuum spectra".into(),
                    );
                    "unverified"
                }
            };
            HinfOutcome {
                verdict,
                singular_omega: None,
                certificate: Some(c),
            }
        }
        Err(Error::SingularOnGrid { omega }) => {
            warnings.push(format!(
                "operator singular on the imaginary axis at omega = {omega}"
            ));
            HinfOutcome {
                verdict: "unstable",
                singular_omega: Some(omega),
                certificate: None,
            }
        }
        Err(e) => return Err(failed("system", &e)),
    };
    let tables = Tables {
        events: None,
        norm_grid: outcome.certificate.as_ref().map(|c| c.grid.clone()),
    };
    let config = json!({ "grid": grid, "h": h });
    Ok(Outcome {
        report: Report::new("hinf", value(problem), config, value(&outcome), warnings),
        tables,
        degenerate: false,
    })
}

#[derive(Serialize)]
struct Failure {
    code: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: error_code(&e),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct IsometryEntry {
    signal: usize,
    #[serde(flatten)]
    outcome: Entry<delay_margin::zen::IsometryCheck>,
}

#[derive(Serialize)]
struct MultiplierEntry {
    symbol: usize,
    signal: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    contractive: Option<bool>,
    #[serde(flatten)]
    outcome: Entry<delay_margin::zen::MultiplierCheck>,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Entry<T> {
    Check(T),
    Error(Failure),
}

fn zen_verify(problem: &ProblemFile, flags: Flags) -> Result<Outcome, Vec<Diagnostic>> {
    let z: &ZenSpec = problem.zen.as_ref().expect("checked by preflight");
    let cfg = QuadConfig {
        tol: flags.tol.unwrap_or(z.quad.tol),
        ..z.quad
    };
    let seed = flags.seed.unwrap_or(0);
    let weight = weight_from_measure(&z.measure).map_err(|e| failed("zen.measure", &e))?;
    let mut warnings = Vec::new();

    let isometry: Vec<IsometryEntry> = z
        .signals
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let outcome = match verify_isometry(f, &z.measure, &cfg) {
                Ok(c) => Entry::Check(c),
                Err(e) => {
                    warnings.push(format!("signal {i}: {e}"));
                    Entry::Error(e.into())
                }
            };
            IsometryEntry { signal: i, outcome }
        })
        .collect();

    let mut multiplier = Vec::new();
    for (k, spec) in z.symbols.iter().enumerate() {
        let g = spec.build();
        let samples = adjoint_samples(
            &z.measure,
            g.n,
            z.adjoint_samples,
            seed.wrapping_add(k as u64),
        );
        for (i, f) in z.signals.iter().enumerate().filter(|(_, f)| f.dim == g.n) {
            let (contractive, outcome) =
                match verify_multiplier(&g, &f.laplace(), &z.measure, &samples, &cfg) {
                    Ok(c) => {
                        let ok = c.ratio <= c.sup_g * (1.0 + CONTRACTIVE_SLACK);
                        if !ok {
                            warnings.push(format!(
                                "symbol {k}, signal {i}: ratio {} exceeds sup {}",
                                c.ratio, c.sup_g
                            ));
                        }
                        (Some(ok), Entry::Check(c))
                    }
                    Err(e) => {
                        warnings.push(format!("symbol {k}, signal {i}: {e}"));
                        (None, Entry::Error(e.into()))
                    }
                };
            multiplier.push(MultiplierEntry {
                symbol: k,
                signal: i,
                contractive,
                outcome,
            });
        }
    }

    let result = json!({
        "weight_kind": weight.kind(),
        "isometry": value(&isometry),
        "multiplier": value(&multiplier),
    });
    let config = json!({ "quad": cfg, "seed": seed, "adjoint_samples": z.adjoint_samples });
    Ok(Outcome {
        report: Report::new("zen-verify", value(problem), config, result, warnings),
        tables: Tables::default(),
        degenerate: false,
    })
}
