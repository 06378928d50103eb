//! Multiplication by a bounded rational symbol on `A²_ν(C^n)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::MeasureDescriptor;
use super::norms::{frequency_norm, inner_product, KernelTransform};
use super::quad::QuadConfig;
use super::signal::{mat_vec, Product, RationalMatrix, Transform};
use crate::error::{Error, Result};
use crate::par;

/// `sup_ω ‖G(iω)‖`, sampled on `ω = tan θ` so that `ω = ±∞` is included.
pub fn sup_norm(g: &RationalMatrix) -> Result<f64> {
    g.validate(1e-9)?;
    let at = |theta: f64| -> f64 {
        if theta.abs() >= FRAC_PI_2 {
            g.at_infinity().norm2()
        } else {
            g.eval(Complex64::new(0.0, theta.tan())).norm2()
        }
    };
    let n = 4001;
    let thetas: Vec<f64> = (0..n)
        .map(|k| -FRAC_PI_2 + std::f64::consts::PI * k as f64 / (n - 1) as f64)
        .collect();
    let vals = par::map(&thetas, |&t| at(t));
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    let step = thetas[1] - thetas[0];
    let mut peaks: Vec<usize> = (1..n - 1)
        .filter(|&k| vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1])
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(8);
    for k in peaks {
        let (mut a, mut b) = (thetas[k] - step, thetas[k] + step);
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - gr * (b - a);
        let mut x2 = a + gr * (b - a);
        let (mut f1, mut f2) = (at(x1), at(x2));
        while b - a > 1e-12 {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = at(x2);
            }
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCheck {
    /// `‖GF‖/‖F‖`.
    pub ratio: f64,
    pub sup_g: f64,
    /// Largest scaled `|⟨GF, K_z x⟩ - ⟨F(z), G(z)^* x⟩|` over the samples.
    pub adjoint_residual: f64,
    pub samples: usize,
}

/// Kernel sample points `(z, x)` with `x` a unit vector and `z` to the right
/// of the measure's leftmost support point.
pub fn adjoint_samples(
    nu: &MeasureDescriptor,
    dim: usize,
    count: usize,
    seed: u64,
) -> Vec<(Complex64, Vec<Complex64>)> {
    let edge = nu
        .atoms
        .iter()
        .map(|a| a.0)
        .chain(nu.tail.map(|t| t.start))
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = Complex64::new(edge + rng.gen_range(0.2..3.0), rng.gen_range(-5.0..5.0));
            let mut x: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= n);
            (z, x)
        })
        .collect()
}

/// Contractivity ratio, boundary sup of `G` and the reproducing-kernel adjoint
/// residual at the given samples.
pub fn verify_multiplier(
    g: &RationalMatrix,
    f: &dyn Transform,
    nu: &MeasureDescriptor,
    samples: &[(Complex64, Vec<Complex64>)],
    cfg: &QuadConfig,
) -> Result<MultiplierCheck> {
    let sup_g = sup_norm(g)?;
    let gf = Product::new(g, f)?;
    let nf = frequency_norm(f, nu, cfg)?;
    let ngf = frequency_norm(&gf, nu, cfg)?;
    if nf == 0.0 {
        return Err(Error::InvalidInput("F has zero norm".into()));
    }
    let ratio = (ngf / nf).sqrt();
    let residuals = par::map(samples, |(z, x)| -> Result<f64> {
        if x.len() != g.n {
            return Err(Error::InvalidInput(
                "sample vector has the wrong dimension".into(),
            ));
        }
        let k = KernelTransform::new(*z, x.clone(), nu)?;
        let lhs = inner_product(&gf, &k, nu, cfg)?;
        // ⟨F(z), G(z)^* x⟩ = ⟨G(z)F(z), x⟩
        let rhs: Complex64 = mat_vec(&g.eval(*z), &f.eval(*z))
            .iter()
            .zip(x)
            .map(|(a, b)| a * b.conj())
            .sum();
        let xn = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let scale = ngf.sqrt() * k.kernel_norm_sq().sqrt() * xn;
        Ok(if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).norm() / scale
        })
    });
    let mut adjoint_residual = 0.0f64;
    for r in residuals {
        adjoint_residual = adjoint_residual.max(r?);
    }
    Ok(MultiplierCheck {
        ratio,
        sup_g,
        adjoint_residual,
        samples: samples.len(),
    })
}

/// `‖K_z ⊗ G(z)^* x‖ / ‖K_z ⊗ x‖` next to `‖G(z)^* x‖/‖x‖`.
pub fn norm_attainment(
    g: &RationalMatrix,
    z: Complex64,
    x: &[Complex64],
    nu: &MeasureDescriptor,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    g.validate(1e-9)?;
    let gz = g.eval(z).conj_transpose();
    let v = mat_vec(&gz, x);
    let kx = KernelTransform::new(z, x.to_vec(), nu)?;
    let kv = KernelTransform::new(z, v.clone(), nu)?;
    let ratio = (frequency_norm(&kv, nu, cfg)? / frequency_norm(&kx, nu, cfg)?).sqrt();
    let norm = |u: &[Complex64]| u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok((ratio, norm(&v) / norm(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::zen::signal::{RationalFunction, TestSignal};

    fn blaschke() -> RationalFunction {
        RationalFunction::new(
            Polynomial::from_real(&[-1.0, 1.0]),
            Polynomial::from_real(&[1.0, 1.0]),
        )
    }

    #[test]
    fn blaschke_is_contractive() {
        let g = RationalMatrix::scalar(blaschke());
        let nu = MeasureDescriptor::dirac(0.0);
        let f = TestSignal::scalar(0, 1.0).laplace();
        let samples = adjoint_samples(&nu, 1, 5, 7);
        let c = verify_multiplier(&g, &f, &nu, &samples, &QuadConfig::default()).unwrap();
        assert!((c.sup_g - 1.0).abs() < 1e-12);
        assert!(c.ratio <= 1.0 + 1e-6);
        assert!(c.adjoint_residual < 1e-6);
    }

    #[test]
    fn constant_symbol_scales() {
        let g = RationalMatrix::scalar(RationalFunction::constant(Complex64::new(0.0, 3.0)));
        let nu = MeasureDescriptor::lebesgue();
        let f = TestSignal::scalar(1, 1.0).laplace();
        let c = verify_multiplier(&g, &f, &nu, &[], &QuadConfig::default()).unwrap();
        assert!((c.ratio - 3.0).abs() < 1e-8);
        assert!((c.sup_g - 3.0).abs() < 1e-12);
    }

    #[test]
    fn attainment_direction() {
        let g = RationalMatrix::diagonal(vec![
            blaschke(),
            RationalFunction::new(
                Polynomial::from_real(&[1.0]),
                Polynomial::from_real(&[1.0, 1.0]),
            ),
        ]);
        let x = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let z = Complex64::new(0.7, 1.3);
        let (ratio, expected) = norm_attainment(
            &g,
            z,
            &x,
            &MeasureDescriptor::dirac(0.0),
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((ratio - expected).abs() < 1e-6);
    }
}
