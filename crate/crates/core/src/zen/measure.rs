//! Measures on `[0, ∞)` and the weights they induce on the time axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial density on `[start, end]`, written in the local variable
/// `u = r - start` (ascending coefficients).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.start || r > self.end {
            return 0.0;
        }
        let u = r - self.start;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// Mass of `[start, min(t, end))`.
    fn mass_below(&self, t: f64) -> f64 {
        let l = (t.min(self.end) - self.start).max(0.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * l.powi(k as i32 + 1) / (k + 1) as f64)
            .sum()
    }
}

/// Constant density `c` on `[start, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LebesgueTail {
    pub start: f64,
    pub c: f64,
}

/// `ν = Σ m_k δ_{r_k} + density + tail`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureDescriptor {
    /// `(location, mass)` pairs.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub density: Vec<DensityPiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<LebesgueTail>,
}

impl MeasureDescriptor {
    pub fn dirac(r: f64) -> Self {
        MeasureDescriptor {
            atoms: vec![(r, 1.0)],
            ..Default::default()
        }
    }

    pub fn lebesgue() -> Self {
        MeasureDescriptor {
            tail: Some(LebesgueTail { start: 0.0, c: 1.0 }),
            ..Default::default()
        }
    }

    /// Lebesgue measure restricted to `[a, b]`.
    pub fn lebesgue_on(a: f64, b: f64) -> Self {
        MeasureDescriptor {
            density: vec![DensityPiece {
                start: a,
                end: b,
                coeffs: vec![1.0],
            }],
            ..Default::default()
        }
    }

    pub fn plus(mut self, other: MeasureDescriptor) -> Self {
        self.atoms.extend(other.atoms);
        self.density.extend(other.density);
        self.tail = match (self.tail, other.tail) {
            (None, t) | (t, None) => t,
            (Some(a), Some(b)) if a.start == b.start => Some(LebesgueTail {
                start: a.start,
                c: a.c + b.c,
            }),
            (Some(a), Some(b)) => {
                // Split the later tail's overlap into a density piece.
                let (lo, hi) = if a.start < b.start { (a, b) } else { (b, a) };
                self.density.push(DensityPiece {
                    start: lo.start,
                    end: hi.start,
                    coeffs: vec![lo.c],
                });
                Some(LebesgueTail {
                    start: hi.start,
                    c: lo.c + hi.c,
                })
            }
        };
        self.normalized()
    }

    fn normalized(mut self) -> Self {
        self.atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        self
    }

    pub fn validate(&self) -> Result<()> {
        for &(r, m) in &self.atoms {
            if !(r >= 0.0 && r.is_finite() && m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "atom ({r}, {m}) must have r >= 0, mass > 0"
                )));
            }
        }
        if self.atoms.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(Error::InvalidInput(
                "atoms must be sorted by location".into(),
            ));
        }
        for p in &self.density {
            if !(p.start >= 0.0 && p.end > p.start && p.end.is_finite()) || p.coeffs.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "density piece [{}, {}] is malformed",
                    p.start, p.end
                )));
            }
            let negative = (0..=64).any(|k| {
                let r = p.start + (p.end - p.start) * k as f64 / 64.0;
                p.eval(r) < 0.0
            });
            if negative {
                return Err(Error::InvalidInput("density must be nonnegative".into()));
            }
        }
        if let Some(t) = self.tail {
            if !(t.start >= 0.0 && t.start.is_finite() && t.c > 0.0) {
                return Err(Error::InvalidInput(
                    "tail needs start >= 0 and c > 0".into(),
                ));
            }
            if !t.c.is_finite() {
                return Err(Error::DivergentWeight);
            }
        }
        if self.atoms.is_empty() && self.density.is_empty() && self.tail.is_none() {
            return Err(Error::InvalidInput("measure is zero".into()));
        }
        Ok(())
    }

    /// `ν[0, t)`.
    pub fn mass_below(&self, t: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.0 < t).map(|a| a.1).sum();
        let dens: f64 = self.density.iter().map(|p| p.mass_below(t)).sum();
        let tail = self.tail.map_or(0.0, |tl| tl.c * (t - tl.start).max(0.0));
        atoms + dens + tail
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }
}

/// Logarithmic grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

pub const DOUBLING_CAP: f64 = 1e6;

/// `max ν[0,2t)/ν[0,t)` over the grid, skipping `t` with `ν[0,t) = 0`.
/// A diagnostic only.
pub fn doubling_constant(nu: &MeasureDescriptor, t_grid: &[f64], cap: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for &t in t_grid {
        let m = nu.mass_below(t);
        if m <= 0.0 {
            continue;
        }
        best = best.max(nu.mass_below(2.0 * t) / m);
    }
    if best > cap {
        return Err(Error::NotDoubling { ratio: best });
    }
    Ok(best)
}

/// Shape of the induced weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `ν = mδ₀`: constant weight, the Hardy space.
    Hardy,
    /// `ν = c·Lebesgue`: `w = πc/t`, the Bergman space.
    Bergman,
    /// Finite sum of exponentials.
    Exponential,
    General,
}

/// `w(t) = 2π ∫ e^{-2rt} dν(r)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    measure: MeasureDescriptor,
}

impl Weight {
    pub fn measure(&self) -> &MeasureDescriptor {
        &self.measure
    }

    pub fn kind(&self) -> WeightKind {
        let m = &self.measure;
        match (m.atoms.as_slice(), m.density.is_empty(), m.tail) {
            ([(r, _)], true, None) if *r == 0.0 => WeightKind::Hardy,
            ([], true, Some(t)) if t.start == 0.0 => WeightKind::Bergman,
            (_, true, None) => WeightKind::Exponential,
            _ => WeightKind::General,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = &self.measure;
        let beta = 2.0 * t;
        let atoms: f64 = m.atoms.iter().map(|&(r, c)| c * (-beta * r).exp()).sum();
        let dens: f64 = m.density.iter().map(|p| piece_laplace(p, beta)).sum();
        let tail = m
            .tail
            .map_or(0.0, |tl| tl.c * (-beta * tl.start).exp() / beta);
        2.0 * PI * (atoms + dens + tail)
    }

    /// `w(t) ~ πc/t` near zero.
    pub(crate) fn singular_at_zero(&self) -> bool {
        self.measure.has_tail()
    }
}

pub fn weight_from_measure(nu: &MeasureDescriptor) -> Result<Weight> {
    nu.validate()?;
    Ok(Weight {
        measure: nu.clone().normalized(),
    })
}

/// `∫_piece density(r) e^{-βr} dr`.
fn piece_laplace(p: &DensityPiece, beta: f64) -> f64 {
    let l = p.end - p.start;
    let x = beta * l;
    let sum: f64 = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * monomial_integral(j, l, beta, x))
        .sum();
    (-beta * p.start).exp() * sum
}

/// `∫_0^L u^j e^{-βu} du` with `x = βL`.
fn monomial_integral(j: usize, l: f64, beta: f64, x: f64) -> f64 {
    if x > 50.0 + j as f64 {
        // j!/β^{j+1} (1 - e^{-x} Σ_{m≤j} x^m/m!)
        let mut term = 1.0;
        let mut partial = 1.0;
        for m in 1..=j {
            term *= x / m as f64;
            partial += term;
        }
        let mut fact_over = 1.0 / beta;
        for m in 1..=j {
            fact_over *= m as f64 / beta;
        }
        return fact_over * (1.0 - (-x).exp() * partial);
    }
    // e^{-x} L^{j+1} Σ_m x^m j!/(m+j+1)!, all terms positive
    let mut term = 1.0 / (j + 1) as f64;
    let mut sum = term;
    let mut m = 0;
    while term > 1e-17 * sum {
        m += 1;
        term *= x / (m + j + 1) as f64;
        sum += term;
    }
    (-x).exp() * l.powi(j as i32 + 1) * sum
}
