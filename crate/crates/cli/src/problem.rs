//! Problem files: parsing with field paths, and pre-flight checks.

use delay_margin::walton_marshall::check_retarded;
use delay_margin::zen::{
    MeasureDescriptor, QuadConfig, RationalFunction, RationalMatrix, TestSignal,
};
use delay_margin::{
    Complex64, DelaySystem, Error, GridConfig, MarginConfig, Polynomial, SpectrumDescriptor,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Margin,
    Hinf,
    ZenVerify,
    NeutralDemo,
    UnboundedDemo,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Margin => "margin",
            Kind::Hinf => "hinf",
            Kind::ZenVerify => "zen-verify",
            Kind::NeutralDemo => "neutral-demo",
            Kind::UnboundedDemo => "unbounded-demo",
        }
    }
}

/// A coefficient: a bare number is real, a pair is `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Coeff {
    fn value(self) -> Complex64 {
        match self {
            Coeff::Real(x) => Complex64::new(x, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub fn polynomial(c: &[Coeff]) -> Polynomial {
    Polynomial::new(c.iter().map(|x| x.value()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub p: Vec<Coeff>,
    pub q: Vec<Coeff>,
    pub spectrum: SpectrumDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_a: Option<f64>,
    #[serde(default)]
    pub subnormal: bool,
    /// Delay for `hinf`, or the certificate delay for `margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
}

impl SystemSpec {
    pub fn build(&self) -> DelaySystem {
        DelaySystem {
            p: polynomial(&self.p),
            q: polynomial(&self.q),
            spectrum: self.spectrum.clone(),
            norm_a: self.norm_a,
            subnormal: self.subnormal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalSpec {
    pub num: Vec<Coeff>,
    pub den: Vec<Coeff>,
}

/// Square matrix symbol, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    #[serde(default = "one")]
    pub n: usize,
    pub entries: Vec<RationalSpec>,
}

fn one() -> usize {
    1
}

impl SymbolSpec {
    pub fn build(&self) -> RationalMatrix {
        RationalMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|e| RationalFunction::new(polynomial(&e.num), polynomial(&e.den)))
                .collect(),
        }
    }
}

fn default_adjoint_samples() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenSpec {
    pub measure: MeasureDescriptor,
    #[serde(default)]
    pub signals: Vec<TestSignal>,
    #[serde(default)]
    pub symbols: Vec<SymbolSpec>,
    #[serde(default = "default_adjoint_samples")]
    pub adjoint_samples: usize,
    #[serde(default)]
    pub quad: QuadConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub margin: MarginConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zen: Option<ZenSpec>,
    /// Sample count for the demos.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: String,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    fn new(path: &str, code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            path: path.into(),
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn from_error(path: &str, e: &Error) -> Self {
        Diagnostic::new(path, error_code(e), e.to_string())
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let path = if self.path.is_empty() {
            "."
        } else {
            &self.path
        };
        write!(f, "{path}: {} ({})", self.message, self.code)
    }
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::ZeroPolynomial => "zero_polynomial",
        Error::NonConvergence { .. } => "non_convergence",
        Error::NotReal => "not_real",
        Error::RetardedAssumptionViolated { .. } => "retarded_assumption_violated",
        Error::IdenticallyZero => "identically_zero",
        Error::DegenerateCrossing(_) => "degenerate_crossing",
        Error::InvalidMatrix(_) => "invalid_matrix",
        Error::InvalidDescriptor(_) => "invalid_descriptor",
        Error::UnsupportedDescriptor(_) => "unsupported_descriptor",
        Error::SingularOnGrid { .. } => "singular_on_grid",
        Error::NotDoubling { .. } => "not_doubling",
        Error::DivergentWeight => "divergent_weight",
        Error::Divergent(_) => "divergent",
        Error::KernelNotInSpace => "kernel_not_in_space",
        Error::UnboundedSymbol(_) => "unbounded_symbol",
        Error::Quadrature { .. } => "quadrature",
        Error::InvalidInput(_) => "invalid_input",
    }
}

/// Parses a problem file, reporting the field path and position of the first
/// schema violation.
pub fn parse(text: &str) -> Result<ProblemFile, Diagnostic> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let parsed: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        Diagnostic::new(&path, "schema", e.inner().to_string())
    })?;
    // trailing garbage after the top-level object
    serde_json::from_str::<serde_json::Value>(text)
        .map_err(|e| Diagnostic::new("", "schema", e.to_string()))?;
    Ok(parsed)
}

/// Checks that need no computation beyond the descriptor and degree tests.
pub fn preflight(p: &ProblemFile) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !positive(p.margin.tol) {
        out.push(Diagnostic::new(
            "margin.tol",
            "invalid_input",
            "must be a positive number",
        ));
    }
    if !positive(p.grid.tol) || p.grid.points < 3 {
        out.push(Diagnostic::new(
            "grid",
            "invalid_input",
            "tol must be positive and points >= 3",
        ));
    }
    match (&p.system, p.kind) {
        (None, Kind::Margin | Kind::Hinf) => {
            out.push(Diagnostic::new(
                "system",
                "schema",
                format!("required for kind `{}`", p.kind.name()),
            ));
        }
        (Some(s), kind) => {
            out.extend(check_system(s));
            if kind == Kind::Hinf && s.h.is_none() {
                out.push(Diagnostic::new(
                    "system.h",
                    "schema",
                    "required for kind `hinf`",
                ));
            }
        }
        _ => {}
    }
    match (&p.zen, p.kind) {
        (None, Kind::ZenVerify) => out.push(Diagnostic::new(
            "zen",
            "schema",
            "required for kind `zen-verify`",
        )),
        (Some(z), _) => out.extend(check_zen(z, p.kind == Kind::ZenVerify)),
        _ => {}
    }
    if p.n_max == Some(0) {
        out.push(Diagnostic::new("n_max", "invalid_input", "must be >= 1"));
    }
    out
}

fn check_system(s: &SystemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (name, c) in [("system.p", &s.p), ("system.q", &s.q)] {
        if c.is_empty() {
            out.push(Diagnostic::new(
                name,
                "schema",
                "coefficient array is empty",
            ));
        } else if c.iter().any(|x| !x.value().is_finite()) {
            out.push(Diagnostic::new(
                name,
                "invalid_input",
                "coefficients must be finite",
            ));
        }
    }
    if !out.is_empty() {
        return out;
    }
    let sys = s.build();
    if let Err(e) = check_retarded(&sys.p, &sys.q) {
        out.push(Diagnostic::from_error("system", &e));
    }
    if let Err(e) = sys.spectrum.validate() {
        out.push(Diagnostic::from_error("system.spectrum", &e));
    } else if let Some(n) = s.norm_a {
        // norm against spectral radius, once the descriptor is known to be sound
        let probe = DelaySystem {
            norm_a: Some(n),
            ..sys
        };
        if let Err(e) = probe.validate() {
            out.push(Diagnostic::from_error("system.norm_a", &e));
        }
    }
    for (name, v) in [("system.h", s.h), ("system.h_max", s.h_max)] {
        if let Some(x) = v {
            if !(x.is_finite() && x >= 0.0) {
                out.push(Diagnostic::new(
                    name,
                    "invalid_input",
                    "must be a finite nonnegative number",
                ));
            }
        }
    }
    out
}

fn check_zen(z: &ZenSpec, required: bool) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Err(e) = z.measure.validate() {
        out.push(Diagnostic::from_error("zen.measure", &e));
    }
    if required && z.signals.is_empty() {
        out.push(Diagnostic::new(
            "zen.signals",
            "schema",
            "at least one test signal is required",
        ));
    }
    for (i, f) in z.signals.iter().enumerate() {
        if let Err(e) = f.validate() {
            out.push(Diagnostic::from_error(&format!("zen.signals[{i}]"), &e));
        }
    }
    for (i, g) in z.symbols.iter().enumerate() {
        let path = format!("zen.symbols[{i}]");
        if g.n == 0 || g.entries.len() != g.n * g.n {
            out.push(Diagnostic::new(
                &path,
                "schema",
                format!("expected {} entries for n = {}", g.n * g.n, g.n),
            ));
            continue;
        }
        if g.entries
            .iter()
            .any(|e| e.den.is_empty() || e.num.is_empty())
        {
            out.push(Diagnostic::new(
                &path,
                "schema",
                "num and den must be nonempty",
            ));
            continue;
        }
        if let Err(e) = g.build().validate(1e-9) {
            out.push(Diagnostic::from_error(&path, &e));
        }
        if !z.signals.iter().any(|f| f.dim == g.n) {
            out.push(Diagnostic::new(
                &path,
                "invalid_input",
                "no test signal has a matching dimension",
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGULAR: &str = r#"{
        "kind": "margin",
        "system": {
            "p": [0, 1], "q": [1],
            "spectrum": {"type": "matrix", "matrix": [[[1,0],[1,0]],[[0,0],[2,0]]]}
        }
    }"#;

    #[test]
    fn defaults_fill_configs() {
        let p = parse(TRIANGULAR).unwrap();
        assert_eq!(p.margin, MarginConfig::default());
        assert_eq!(p.grid, GridConfig::default());
        assert!(preflight(&p).is_empty());
    }

    #[test]
    fn mixed_coefficients() {
        let c: Vec<Coeff> = serde_json::from_str("[1.5, [0, 2]]").unwrap();
        let p = polynomial(&c);
        assert_eq!(p.coeffs()[1], Complex64::new(0.0, 2.0));
    }

    #[test]
    fn schema_error_has_path() {
        let bad = TRIANGULAR.replace("\"matrix\",", "\"disk\",");
        let d = parse(&bad).unwrap_err();
        assert_eq!(d.path, "system.spectrum");
        let d = parse(r#"{"kind": "margin", "margin": {"tol": "x"}}"#).unwrap_err();
        assert_eq!(d.path, "margin.tol");
    }

    #[test]
    fn retarded_preflight() {
        let p = parse(&TRIANGULAR.replace("\"q\": [1]", "\"q\": [1, 1]")).unwrap();
        let d = preflight(&p);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "retarded_assumption_violated");
    }
}
