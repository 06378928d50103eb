//! Two systems that show what goes wrong outside the retarded, bounded-`A`
//! setting.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hinf::{hinf_boundary_norm, GridConfig};
use super::DelaySystem;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::spectrum::SpectrumDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeutralSample {
    pub n: usize,
    pub s: Complex64,
    pub abs_g: f64,
}

/// `|G(s_n)|` for `G(s) = 1/(s + 1 + s e^{-s})` at
/// `s_n = i((2n+1)π + 1/((2n+1)π))`, `n = 1..=n_max`.
///
/// `G` has no poles in the closed right half-plane but grows without bound
/// along the imaginary axis.
pub fn neutral_demo(n_max: usize) -> Result<Vec<NeutralSample>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    Ok((1..=n_max)
        .map(|n| {
            let a = (2 * n + 1) as f64 * PI;
            let s = Complex64::new(0.0, a + 1.0 / a);
            let den = s + 1.0 + s * (-s).exp();
            NeutralSample {
                n,
                s,
                abs_g: 1.0 / den.norm(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSample {
    pub n: usize,
    /// `sup_ω ‖(iωI + A_n)^{-1}‖`.
    pub sup: f64,
    pub argmax_omega: f64,
}

/// Boundary sup of `(sI + A_n)^{-1}` for `A_n = diag(λ_1, …, λ_n)`,
/// `λ_k = ki + 1/k`. Every truncation is stable but the sup equals `n`.
pub fn unbounded_a_demo(n_trunc: usize) -> Result<Vec<TruncationSample>> {
    if n_trunc == 0 {
        return Err(Error::InvalidInput("n_trunc must be >= 1".into()));
    }
    let cfg = GridConfig::default();
    (1..=n_trunc)
        .map(|n| {
            let points = (1..=n)
                .map(|k| Complex64::new(1.0 / k as f64, k as f64))
                .collect();
            let sys = DelaySystem::new(
                Polynomial::from_real(&[0.0, 1.0]),
                Polynomial::from_real(&[1.0]),
                SpectrumDescriptor::points(points),
            )?;
            let c = hinf_boundary_norm(&sys, 0.0, &cfg)?;
            Ok(TruncationSample {
                n,
                sup: c.sup_estimate,
                argmax_omega: c.argmax_omega,
            })
        })
        .collect()
}
