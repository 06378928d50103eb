//! Adaptive Gauss–Kronrod (7/15) quadrature with maps for infinite ranges.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Absolute error target.
    pub tol: f64,
    /// Relative error target; the looser of the two is used.
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-10,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    /// Tighter settings for integrals nested inside another quadrature.
    pub(crate) fn inner(&self) -> QuadConfig {
        QuadConfig {
            tol: self.tol * 1e-2,
            rel_tol: self.rel_tol * 1e-1,
            max_intervals: self.max_intervals,
        }
    }
}

/// Values that can be integrated.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let err = (kron + gauss * -1.0).magnitude();
    (kron, err)
}

/// `∫_a^b f` split first at the given interior breakpoints.
pub fn integrate<T: Integrand, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<T> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(b);
    let mut parts: Vec<(f64, f64, T, f64)> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total = parts.iter().fold(T::zero(), |acc, p| acc + p.2);
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= cfg.tol.max(cfg.rel_tol * total.magnitude()) {
            return Ok(total);
        }
        if parts.len() >= cfg.max_intervals {
            return Err(Error::Quadrature {
                estimate: total.magnitude(),
                error: err,
            });
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Interval exhausted at machine precision.
            return Err(Error::Quadrature {
                estimate: total.magnitude(),
                error: err,
            });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `∫_a^∞ f` through `x = a + scale·u/(1-u)`.
pub fn integrate_to_infinity<T: Integrand, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<T> {
    let g = |u: f64| {
        let v = 1.0 - u;
        f(a + scale * u / v) * (scale / (v * v))
    };
    integrate(g, 0.0, 1.0, &[], cfg)
}

/// `∫_ℝ f`, splitting at the breakpoints and mapping both tails.
pub fn integrate_real_line<T: Integrand, F: Fn(f64) -> T>(
    f: F,
    breakpoints: &[f64],
    scale: f64,
    cfg: &QuadConfig,
) -> Result<T> {
    let mut bp: Vec<f64> = breakpoints.to_vec();
    if bp.is_empty() {
        bp.push(0.0);
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    let lo = bp[0];
    let hi = bp[bp.len() - 1];
    let left = integrate_to_infinity(|x| f(2.0 * lo - x), lo, scale, cfg)?;
    let right = integrate_to_infinity(&f, hi, scale, cfg)?;
    let mid = if hi > lo {
        integrate(&f, lo, hi, &bp, cfg)?
    } else {
        T::zero()
    };
    Ok(left + mid + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finite_interval() {
        let v: f64 = integrate(|x: f64| x.sin(), 0.0, PI, &[], &QuadConfig::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_on_real_line() {
        let cfg = QuadConfig::default();
        let v: f64 = integrate_real_line(|y| 1.0 / (1.0 + y * y), &[0.0], 1.0, &cfg).unwrap();
        assert!((v - PI).abs() < 1e-10);
        // narrow peak far from the origin
        let v: f64 =
            integrate_real_line(|y| 1e-3 / (1e-6 + (y - 100.0).powi(2)), &[100.0], 1.0, &cfg)
                .unwrap();
        assert!((v - PI).abs() < 1e-9);
    }

    #[test]
    fn complex_values() {
        let v: Complex64 = integrate_to_infinity(
            |t| (Complex64::new(-1.0, 2.0) * t).exp(),
            0.0,
            1.0,
            &QuadConfig::default(),
        )
        .unwrap();
        let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -2.0);
        assert!((v - exact).norm() < 1e-10);
    }
}
