//! Complex polynomials in ascending coefficient order and a root finder.
//!
//! `coeffs[k]` multiplies `s^k`. Roots are computed with the Aberth–Ehrlich
//! simultaneous iteration followed by Newton polishing; every returned root
//! set carries its backward-error bound.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Default cap on Aberth iterations.
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for Polynomial {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial(")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)s^{}", c.re, c.im, k)?;
        }
        write!(f, ")")
    }
}

impl Polynomial {
    /// Builds a polynomial, stripping trailing (exactly) zero coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monic polynomial with the given roots (repeated per multiplicity).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Polynomial::constant(ONE), |acc, &r| {
            &acc * &Polynomial::new(vec![-r, ONE])
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient; `0` for constants and for the
    /// zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * s + c)
    }

    /// `Σ |c_k| |s|^k`, the natural scale of `p(s)` for backward-error tests.
    pub fn eval_scale(&self, s: Complex64) -> f64 {
        let r = s.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Value and first derivative at `s` in one Horner pass.
    pub fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// The polynomial `ω ↦ p(iω)`.
    pub fn on_imaginary_axis(&self) -> Polynomial {
        let mut ik = ONE;
        let i = Complex64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * ik);
            ik *= i;
        }
        Polynomial::new(out)
    }

    /// All complex roots with multiplicities.
    pub fn roots(&self, tol: f64) -> Result<RootSet> {
        self.roots_with_cap(tol, DEFAULT_MAX_ITER)
    }

    pub fn roots_with_cap(&self, tol: f64, max_iter: usize) -> Result<RootSet> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Err(Error::InvalidInput("root finding needs degree >= 1".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        let raw = aberth(self, max_iter)?;
        let residual_bound = raw
            .iter()
            .map(|&r| backward_error(self, r))
            .fold(0.0, f64::max);
        if residual_bound > tol {
            return Err(Error::NonConvergence {
                iterations: max_iter,
                residual: residual_bound,
            });
        }
        Ok(RootSet {
            roots: cluster(&raw, 1e3 * tol),
            residual_bound,
        })
    }

    /// Real roots of a real polynomial, ascending, with multiplicities.
    ///
    /// A root counts as real when `|Im r| <= tol * (1 + |r|)`.
    pub fn real_roots_of_real_poly(&self, tol: f64) -> Result<Vec<(f64, usize)>> {
        if !self.is_real(tol) {
            return Err(Error::NotReal);
        }
        let set = self.roots(tol)?;
        let real = Polynomial::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
        );
        let mut out: Vec<(f64, usize)> = set
            .roots
            .iter()
            .filter(|(r, _)| r.im.abs() <= tol * (1.0 + r.norm()))
            .map(|&(r, m)| {
                let x = if m == 1 {
                    polish_real(&real, r.re)
                } else {
                    r.re
                };
                (x, m)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(ZERO)
                        + rhs.coeffs.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// Roots of a polynomial as clusters `(centroid, multiplicity)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<(Complex64, usize)>,
    /// Largest normwise backward error `|p(r)| / Σ|c_k||r|^k` over the raw roots.
    pub residual_bound: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// Every root repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat(r).take(m))
            .collect()
    }
}

fn backward_error(p: &Polynomial, r: Complex64) -> f64 {
    let scale = p.eval_scale(r);
    if scale == 0.0 {
        0.0
    } else {
        p.eval(r).norm() / scale
    }
}

/// Raw roots (with repetition). Exact zero roots are deflated first.
fn aberth(p: &Polynomial, max_iter: usize) -> Result<Vec<Complex64>> {
    let zeros = p.coeffs.iter().take_while(|&&c| c == ZERO).count();
    let q = Polynomial::new(p.coeffs[zeros..].to_vec());
    let mut roots = vec![ZERO; zeros];
    let n = q.degree();
    if n == 0 {
        return Ok(roots);
    }
    let lead = q.leading();
    if n == 1 {
        roots.push(-q.coeffs[0] / lead);
        return Ok(roots);
    }

    // Initial guesses on a circle whose radius is the geometric mean of the
    // root moduli, rotated off the real axis.
    let radius = (q.coeffs[0] / lead)
        .norm()
        .powf(1.0 / n as f64)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    let eps = 4.0 * (n as f64 + 1.0) * f64::EPSILON;

    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[i]);
            if v.norm() <= eps * q.eval_scale(z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                if step.norm() <= f64::EPSILON * z[i].norm() {
                    done[i] = true;
                }
            } else {
                // Derivative vanished; nudge off the critical point.
                z[i] += Complex64::new(radius * 1e-3, radius * 1e-3);
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    for zi in z.iter_mut() {
        *zi = newton_polish(&q, *zi);
    }
    roots.extend(z);
    Ok(roots)
}

fn newton_polish(p: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut best = backward_error(p, z);
    for _ in 0..3 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv == ZERO {
            break;
        }
        let cand = z - v / dv;
        let err = backward_error(p, cand);
        if err < best {
            best = err;
            z = cand;
        } else {
            break;
        }
    }
    z
}

fn polish_real(p: &Polynomial, mut x: f64) -> f64 {
    let mut best = backward_error(p, Complex64::new(x, 0.0));
    for _ in 0..3 {
        let (v, dv) = p.eval_with_derivative(Complex64::new(x, 0.0));
        if dv.re == 0.0 {
            break;
        }
        let cand = x - v.re / dv.re;
        let err = backward_error(p, Complex64::new(cand, 0.0));
        if err < best {
            best = err;
            x = cand;
        } else {
            break;
        }
    }
    x
}

/// Greedy clustering at absolute radius `radius`; clusters report centroids.
fn cluster(raw: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &r in raw {
        match clusters.iter_mut().find(|(c, _)| (*c - r).norm() <= radius) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let s = Polynomial::from_real(&[0.0, 1.0]);
        assert_eq!(s.eval(c(0.0, 2.0)), c(0.0, 2.0));
        let p = Polynomial::from_real(&[1.0, 1.0]);
        let v = p.eval(c(0.0, 3f64.sqrt()));
        assert!((v - c(1.0, 3f64.sqrt())).norm() < 1e-15);
        let p = Polynomial::from_real(&[1.0, -2.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(1.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            Polynomial::from_real(&[0.0, 1.0]).derivative(),
            Polynomial::from_real(&[1.0])
        );
        assert_eq!(
            Polynomial::from_real(&[1.0, 1.0]).derivative(),
            Polynomial::from_real(&[1.0])
        );
        assert_eq!(
            Polynomial::from_real(&[0.0, 2.0, 3.0]).derivative(),
            Polynomial::from_real(&[2.0, 6.0])
        );
        assert!(Polynomial::from_real(&[5.0]).derivative().is_zero());
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::from_real(&[0.0, 0.0]).is_zero());
        assert!(Polynomial::new(vec![]).is_zero());
    }

    #[test]
    fn roots_of_s2_plus_4() {
        let set = Polynomial::from_real(&[4.0, 0.0, 1.0]).roots(1e-9).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!((set.roots[0].0 - c(0.0, -2.0)).norm() < 1e-12);
        assert!((set.roots[1].0 - c(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn root_of_linear_complex() {
        let p = Polynomial::new(vec![c(1.0, 1.0), c(1.0, 0.0)]);
        let set = p.roots(1e-9).unwrap();
        assert_eq!(set.roots, vec![(c(-1.0, -1.0), 1)]);
    }

    #[test]
    fn double_root_is_clustered() {
        // (s-1)^2 (s+3) = s^3 + s^2 - 5s + 3
        let p = Polynomial::from_real(&[3.0, -5.0, 1.0, 1.0]);
        let set = p.roots(1e-9).unwrap();
        assert_eq!(set.total_multiplicity(), 3);
        assert_eq!(set.roots.len(), 2);
        assert!((set.roots[0].0 - c(-3.0, 0.0)).norm() < 1e-12);
        assert_eq!(set.roots[0].1, 1);
        assert!((set.roots[1].0 - c(1.0, 0.0)).norm() < 1e-7);
        assert_eq!(set.roots[1].1, 2);
        assert!(set.residual_bound <= 1e-9);
        for r in set.expanded() {
            assert!(p.eval(r).norm() <= 1e-9 * p.eval_scale(r));
        }
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(Polynomial::zero().roots(1e-9), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn roots_at_origin_are_exact() {
        let p = Polynomial::from_real(&[0.0, 0.0, 1.0, 1.0]);
        let set = p.roots(1e-9).unwrap();
        assert!(set.roots.contains(&(c(0.0, 0.0), 2)));
    }

    #[test]
    fn real_roots_examples() {
        let r = Polynomial::from_real(&[-4.0, 0.0, 1.0])
            .real_roots_of_real_poly(1e-9)
            .unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0 + 2.0).abs() < 1e-14 && (r[1].0 - 2.0).abs() < 1e-14);
        assert!(Polynomial::from_real(&[1.0, 0.0, 1.0])
            .real_roots_of_real_poly(1e-9)
            .unwrap()
            .is_empty());
        let r = Polynomial::from_real(&[-2.0, 0.0, 1.0])
            .real_roots_of_real_poly(1e-9)
            .unwrap();
        let s2 = 2f64.sqrt();
        assert!((r[0].0 + s2).abs() < 1e-15 && (r[1].0 - s2).abs() < 1e-15);
        assert_eq!((r[0].1, r[1].1), (1, 1));
    }

    #[test]
    fn complex_coefficients_rejected_for_real_roots() {
        let p = Polynomial::new(vec![c(1.0, 1.0), c(1.0, 0.0)]);
        assert_eq!(p.real_roots_of_real_poly(1e-9), Err(Error::NotReal));
    }

    #[test]
    fn on_imaginary_axis_matches_eval() {
        let p = Polynomial::from_real(&[2.0, -1.0, 3.0, 0.5]);
        let pw = p.on_imaginary_axis();
        for w in [-2.0, 0.3, 1.7] {
            assert!((pw.eval(c(w, 0.0)) - p.eval(c(0.0, w))).norm() < 1e-12);
        }
    }
}
