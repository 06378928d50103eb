//! Boundary H∞-norm certificate.
//!
//! On the closed right half-plane outside `|s| = R` the resolvent has norm at
//! most one, so the supremum over `C̄₊` is `max(1, sup_{|ω| ≤ R} ‖G(iω)‖)` when
//! `G` is analytic inside. Analyticity is checked separately by counting the
//! zeros of `P + λQe^{-sh}` enclosed by the imaginary axis and the half circle.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DelaySystem;
use crate::error::{Error, Result};
use crate::par;
use crate::poly::Polynomial;
use crate::spectrum::SpectrumDescriptor;
use crate::walton_marshall::crossing_frequencies;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Samples on `[-R, R]` at the coarsest level.
    pub points: usize,
    /// Relative change of the sup estimate accepted as converged.
    pub tol: f64,
    /// Maximum number of grid doublings.
    pub max_levels: usize,
    /// `σ_min ≤ singular_tol · scale` is treated as a singular point.
    pub singular_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points: 2001,
            tol: 1e-8,
            max_levels: 4,
            singular_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// `1/σ_min` of the full matrix.
    SigmaMin,
    /// Distance to the spectrum, exact for normal `A`.
    NormalSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HinfCertificate {
    pub h: f64,
    /// `(ω, ‖G(iω)‖)` on the final grid.
    pub grid: Vec<(f64, f64)>,
    pub tail_radius: f64,
    /// `max(1, sup)` over the grid and refined peaks.
    pub sup_estimate: f64,
    pub argmax_omega: f64,
    /// The estimate converged under grid doubling.
    pub refined: bool,
    pub levels: usize,
    /// Estimate after each level, nondecreasing.
    pub history: Vec<f64>,
    pub method: NormMethod,
    /// Zeros of `det(P I + Q e^{-sh} A)` in the open right half-plane,
    /// counted by winding number (finite spectra only). A positive count
    /// means `G` is not in H∞ regardless of the boundary sup.
    pub rhp_zero_count: Option<usize>,
}

impl HinfCertificate {
    /// Stable verdict: no enclosed zeros (when counted).
    pub fn is_stable(&self) -> Option<bool> {
        self.rhp_zero_count.map(|c| c == 0)
    }
}

/// Radius beyond which `|P(s)| > |Q(s)|‖A‖ + 1` on the closed right half-plane.
pub fn tail_radius(sys: &DelaySystem, _h: f64) -> Result<f64> {
    let norm_a = sys.norm_a()?;
    Ok(tail_radius_for(&sys.p, &sys.q, norm_a))
}

pub(crate) fn tail_radius_for(p: &Polynomial, q: &Polynomial, norm_a: f64) -> f64 {
    let pc: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
    let qc: Vec<f64> = q.coeffs().iter().map(|c| c.norm()).collect();
    let n = p.degree();
    // Lower bound of |P| minus upper bound of |Q|‖A‖ + 1; g(R)/R^n is increasing.
    let g = |r: f64| {
        let lead = pc[n] * r.powi(n as i32);
        let rest: f64 = pc[..n]
            .iter()
            .enumerate()
            .map(|(k, c)| c * r.powi(k as i32))
            .sum();
        let qs: f64 = qc
            .iter()
            .enumerate()
            .map(|(k, c)| c * r.powi(k as i32))
            .sum();
        lead - rest - norm_a * qs - 1.0
    };
    if g(1.0) > 0.0 {
        return 1.0;
    }
    let mut hi = 2.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

struct Evaluator<'a> {
    p: &'a Polynomial,
    q: &'a Polynomial,
    h: f64,
    matrix: Option<&'a crate::linalg::ComplexMatrix>,
    spectrum: &'a SpectrumDescriptor,
    norm_a: f64,
}

impl Evaluator<'_> {
    /// `(σ_min, scale)` of `P(iω)I + Q(iω)e^{-iωh}A`.
    fn sigma_min(&self, omega: f64) -> Result<(f64, f64)> {
        let s = Complex64::new(0.0, omega);
        let pv = self.p.eval(s);
        let qv = self.q.eval(s);
        let scale = pv.norm() + qv.norm() * self.norm_a;
        let e = Complex64::from_polar(1.0, -omega * self.h);
        if let Some(m) = self.matrix {
            let sv = m.shifted(pv, qv * e).singular_values();
            return Ok((*sv.last().unwrap(), scale));
        }
        if qv.norm() == 0.0 {
            return Ok((pv.norm(), scale));
        }
        let target = -pv / (qv * e);
        Ok((qv.norm() * self.spectrum.distance(target)?, scale))
    }

    fn norm(&self, omega: f64, singular_tol: f64) -> Result<f64> {
        let (smin, scale) = self.sigma_min(omega)?;
        if smin <= singular_tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularOnGrid { omega });
        }
        Ok(1.0 / smin)
    }
}

/// Samples `‖G(iω)‖` on `[-R, R]` with peak refinement and grid doubling.
pub fn hinf_boundary_norm(sys: &DelaySystem, h: f64, cfg: &GridConfig) -> Result<HinfCertificate> {
    sys.validate()?;
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput("h must be finite and >= 0".into()));
    }
    if cfg.points < 3 {
        return Err(Error::InvalidInput("grid needs at least 3 points".into()));
    }
    let norm_a = sys.norm_a()?;
    let r = tail_radius_for(&sys.p, &sys.q, norm_a);
    let (matrix, method) = match &sys.spectrum {
        SpectrumDescriptor::Matrix { matrix } => (Some(matrix), NormMethod::SigmaMin),
        _ => (None, NormMethod::NormalSpectrum),
    };
    let ev = Evaluator {
        p: &sys.p,
        q: &sys.q,
        h,
        matrix,
        spectrum: &sys.spectrum,
        norm_a,
    };

    // Singularities on the axis can only sit at crossing frequencies.
    let lambdas = if sys.spectrum.is_finite_set() {
        Some(sys.spectrum.isolated_points()?)
    } else {
        None
    };
    let mut seeds = Vec::new();
    if let Some(ls) = &lambdas {
        for l in ls {
            for f in crossing_frequencies(&sys.p, &sys.q, l.norm(), 1e-9).unwrap_or_default() {
                if f.omega.abs() <= r {
                    seeds.push(f.omega);
                }
            }
        }
    }
    for &w in &seeds {
        ev.norm(w, cfg.singular_tol)?;
    }

    let mut best = (0.0f64, 0.0f64);
    let mut history = Vec::new();
    let mut grid = Vec::new();
    let mut refined = false;
    let mut n = cfg.points;
    let mut levels = 0;
    for level in 0..=cfg.max_levels {
        levels = level + 1;
        let omegas: Vec<f64> = (0..n)
            .map(|k| -r + 2.0 * r * k as f64 / (n - 1) as f64)
            .collect();
        let norms = par::map(&omegas, |&w| ev.norm(w, cfg.singular_tol));
        let norms: Vec<f64> = norms.into_iter().collect::<Result<_>>()?;
        grid = omegas.iter().copied().zip(norms.iter().copied()).collect();

        let mut peaks: Vec<(f64, usize)> = (0..n)
            .filter(|&k| {
                (k == 0 || norms[k] >= norms[k - 1]) && (k + 1 == n || norms[k] >= norms[k + 1])
            })
            .map(|k| (norms[k], k))
            .collect();
        peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
        peaks.truncate(8);
        let step = 2.0 * r / (n - 1) as f64;
        let mut starts: Vec<(f64, f64)> = peaks
            .iter()
            .map(|&(_, k)| (omegas[k] - step, omegas[k] + step))
            .collect();
        starts.extend(seeds.iter().map(|&w| (w - step, w + step)));
        let refined_peaks = par::map(&starts, |&(a, b)| {
            refine_peak(&ev, a.max(-r), b.min(r), cfg.singular_tol)
        });
        for rp in refined_peaks {
            let (w, v) = rp?;
            if v > best.1 {
                best = (w, v);
            }
        }
        for (k, &v) in norms.iter().enumerate() {
            if v > best.1 {
                best = (omegas[k], v);
            }
        }
        let est = best.1.max(1.0);
        let prev = history.last().copied();
        history.push(est);
        if let Some(prev) = prev {
            if (est - prev).abs() <= cfg.tol * est {
                refined = true;
                break;
            }
        }
        n = 2 * n - 1;
    }

    let rhp_zero_count = match &lambdas {
        Some(ls) => {
            let counts = par::map(ls, |&l| rhp_zero_count(&sys.p, &sys.q, l, h, r));
            Some(counts.iter().sum())
        }
        None => None,
    };

    Ok(HinfCertificate {
        h,
        grid,
        tail_radius: r,
        sup_estimate: best.1.max(1.0),
        argmax_omega: best.0,
        refined,
        levels,
        history,
        method,
        rhp_zero_count,
    })
}

/// Golden-section minimization of `σ_min` on `[a, b]`, returning the argmax
/// of the norm and its value.
fn refine_peak(ev: &Evaluator, mut a: f64, mut b: f64, singular_tol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |w: f64| ev.sigma_min(w).map(|(s, _)| s);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    let w = if f1 <= f2 { x1 } else { x2 };
    Ok((w, ev.norm(w, singular_tol)?))
}

/// Zeros of `P(s) + λQ(s)e^{-sh}` inside the contour made of the imaginary
/// axis from `iR` to `-iR` and the right half circle `|s| = R`.
pub(crate) fn rhp_zero_count(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    h: f64,
    r: f64,
) -> usize {
    let f = |s: Complex64| p.eval(s) + lambda * q.eval(s) * (-s * h).exp();
    let axis = |t: f64| Complex64::new(0.0, r * (1.0 - 2.0 * t));
    let arc = |t: f64| Complex64::from_polar(r, -FRAC_PI_2 + std::f64::consts::PI * t);
    let pieces = 64 + (8.0 * r * (h + 1.0)) as usize + 16 * p.degree();
    let total = winding(&f, &axis, pieces) + winding(&f, &arc, pieces);
    let turns = total / std::f64::consts::TAU;
    turns.round().max(0.0) as usize
}

/// Accumulated argument of `f(path(t))` over `t ∈ [0, 1]`, subdividing until
/// every step turns by less than π/4.
fn winding<F, C>(f: &F, path: &C, pieces: usize) -> f64
where
    F: Fn(Complex64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    let mut total = 0.0;
    let mut t0 = 0.0;
    let mut v0 = f(path(0.0));
    for k in 1..=pieces {
        let t1 = k as f64 / pieces as f64;
        let v1 = f(path(t1));
        total += segment(f, path, t0, t1, v0, v1, 0);
        t0 = t1;
        v0 = v1;
    }
    total
}

fn segment<F, C>(f: &F, path: &C, t0: f64, t1: f64, v0: Complex64, v1: Complex64, depth: u32) -> f64
where
    F: Fn(Complex64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    let d = (v1 / v0).arg();
    if d.abs() < std::f64::consts::FRAC_PI_4 || depth >= 40 {
        return d;
    }
    let tm = 0.5 * (t0 + t1);
    let vm = f(path(tm));
    segment(f, path, t0, tm, v0, vm, depth + 1) + segment(f, path, tm, t1, vm, v1, depth + 1)
}
