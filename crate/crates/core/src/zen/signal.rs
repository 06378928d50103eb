//! Test signals, their Laplace transforms and rational symbols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::poly::Polynomial;

/// `coeff · t^power · e^{-rate·t}` in coordinate `component`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalTerm {
    pub coeff: Complex64,
    pub power: u32,
    pub rate: Complex64,
    #[serde(default)]
    pub component: usize,
}

/// Finite sum of exponential-polynomial terms with values in `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSignal {
    pub dim: usize,
    pub terms: Vec<SignalTerm>,
}

impl TestSignal {
    /// `t^power e^{-rate·t}` in a scalar signal.
    pub fn scalar(power: u32, rate: f64) -> Self {
        TestSignal {
            dim: 1,
            terms: vec![SignalTerm {
                coeff: Complex64::new(1.0, 0.0),
                power,
                rate: Complex64::new(rate, 0.0),
                component: 0,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.terms.is_empty() {
            return Err(Error::InvalidInput(
                "signal needs dim >= 1 and at least one term".into(),
            ));
        }
        for t in &self.terms {
            if t.component >= self.dim {
                return Err(Error::InvalidInput(format!(
                    "component {} >= dim",
                    t.component
                )));
            }
            if !(t.rate.re > 0.0) {
                return Err(Error::InvalidInput("every rate needs Re a > 0".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for term in &self.terms {
            out[term.component] += term.coeff * t.powi(term.power as i32) * (-term.rate * t).exp();
        }
        out
    }

    /// Slowest decay rate, `min Re a`.
    pub fn min_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Single component as a scalar signal.
    pub fn component(&self, j: usize) -> Option<TestSignal> {
        let terms: Vec<SignalTerm> = self
            .terms
            .iter()
            .filter(|t| t.component == j)
            .map(|t| SignalTerm { component: 0, ..*t })
            .collect();
        (!terms.is_empty()).then_some(TestSignal { dim: 1, terms })
    }

    pub fn laplace(&self) -> SignalTransform {
        SignalTransform {
            signal: self.clone(),
        }
    }
}

/// Vector-valued function on the right half-plane given in closed form.
pub trait Transform: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, s: Complex64) -> Vec<Complex64>;
    /// Poles, used as quadrature breakpoints.
    fn poles(&self) -> Vec<Complex64>;
    /// `lim_{s→∞} s F(s)`.
    fn decay(&self) -> Vec<Complex64>;

    fn norm_sq_at(&self, s: Complex64) -> f64 {
        self.eval(s).iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `L{t^m e^{-at}}(s) = m!/(s+a)^{m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTransform {
    signal: TestSignal,
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

impl Transform for SignalTransform {
    fn dim(&self) -> usize {
        self.signal.dim
    }
    fn eval(&self, s: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.signal.dim];
        for t in &self.signal.terms {
            out[t.component] += t.coeff * factorial(t.power) / (s + t.rate).powu(t.power + 1);
        }
        out
    }
    fn poles(&self) -> Vec<Complex64> {
        self.signal.terms.iter().map(|t| -t.rate).collect()
    }
    fn decay(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.signal.dim];
        for t in self.signal.terms.iter().filter(|t| t.power == 0) {
            out[t.component] += t.coeff;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        RationalFunction { num, den }
    }

    pub fn constant(c: Complex64) -> Self {
        RationalFunction {
            num: Polynomial::constant(c),
            den: Polynomial::constant(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn at_infinity(&self) -> Complex64 {
        if self.num.is_zero() || self.num.degree() < self.den.degree() {
            Complex64::new(0.0, 0.0)
        } else {
            self.num.leading() / self.den.leading()
        }
    }
}

/// Square matrix of rational functions, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMatrix {
    pub n: usize,
    pub entries: Vec<RationalFunction>,
}

impl RationalMatrix {
    pub fn scalar(f: RationalFunction) -> Self {
        RationalMatrix {
            n: 1,
            entries: vec![f],
        }
    }

    pub fn diagonal(d: Vec<RationalFunction>) -> Self {
        let n = d.len();
        let zero = RationalFunction::constant(Complex64::new(0.0, 0.0));
        let mut entries = vec![zero; n * n];
        for (k, f) in d.into_iter().enumerate() {
            entries[k * n + k] = f;
        }
        RationalMatrix { n, entries }
    }

    /// Checks shape, properness and that every pole lies in the open left
    /// half-plane.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.n == 0 || self.entries.len() != self.n * self.n {
            return Err(Error::InvalidInput(
                "symbol must be a nonempty square matrix".into(),
            ));
        }
        for f in &self.entries {
            if f.den.is_zero() {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            if f.num.is_zero() {
                continue;
            }
            if f.num.degree() > f.den.degree() {
                return Err(Error::UnboundedSymbol("improper entry".into()));
            }
            if f.den.degree() > 0 {
                for (r, _) in f.den.roots(tol)?.roots {
                    if r.re >= -tol * (1.0 + r.norm()) {
                        return Err(Error::UnboundedSymbol(format!(
                            "pole at {r} in the closed right half-plane"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: Complex64) -> ComplexMatrix {
        let data = self.entries.iter().map(|f| f.eval(s)).collect();
        ComplexMatrix::new(self.n, data).expect("validated shape")
    }

    pub fn at_infinity(&self) -> ComplexMatrix {
        let data = self.entries.iter().map(|f| f.at_infinity()).collect();
        ComplexMatrix::new(self.n, data).expect("validated shape")
    }

    pub fn poles(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for f in &self.entries {
            if f.den.degree() > 0 {
                if let Ok(rs) = f.den.roots(1e-12) {
                    out.extend(rs.roots.into_iter().map(|(r, _)| r));
                }
            }
        }
        out
    }
}

pub(crate) fn mat_vec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.dim())
        .map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `G(s)F(s)`.
pub struct Product<'a> {
    g: &'a RationalMatrix,
    f: &'a dyn Transform,
    poles: Vec<Complex64>,
}

impl<'a> Product<'a> {
    pub fn new(g: &'a RationalMatrix, f: &'a dyn Transform) -> Result<Self> {
        if g.n != f.dim() {
            return Err(Error::InvalidInput(format!(
                "symbol is {0}x{0} but the transform has dimension {1}",
                g.n,
                f.dim()
            )));
        }
        let mut poles = g.poles();
        poles.extend(f.poles());
        Ok(Product { g, f, poles })
    }
}

impl Transform for Product<'_> {
    fn dim(&self) -> usize {
        self.g.n
    }
    fn eval(&self, s: Complex64) -> Vec<Complex64> {
        mat_vec(&self.g.eval(s), &self.f.eval(s))
    }
    fn poles(&self) -> Vec<Complex64> {
        self.poles.clone()
    }
    fn decay(&self) -> Vec<Complex64> {
        mat_vec(&self.g.at_infinity(), &self.f.decay())
    }
}
