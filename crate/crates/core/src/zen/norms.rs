//! Time- and frequency-side norms, the Laplace isometry and reproducing
//! kernels.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::measure::{MeasureDescriptor, Weight};
use super::quad::{integrate, integrate_real_line, integrate_to_infinity, Integrand, QuadConfig};
use super::signal::{TestSignal, Transform};
use crate::error::{Error, Result};

/// `‖f‖² = ∫_0^∞ ‖f(t)‖² w(t) dt`.
pub fn time_norm(f: &TestSignal, w: &Weight, cfg: &QuadConfig) -> Result<f64> {
    f.validate()?;
    if w.singular_at_zero() {
        let f0: f64 = f.eval(0.0).iter().map(|v| v.norm()).sum();
        let size: f64 = f.terms.iter().map(|t| t.coeff.norm()).sum();
        if f0 > 1e-14 * size {
            return Err(Error::Divergent(
                "weight ~ 1/t at 0 against f(0) != 0".into(),
            ));
        }
    }
    let scale = 1.0 / (2.0 * f.min_rate());
    let g = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let v: f64 = f.eval(t).iter().map(|c| c.norm_sqr()).sum();
        if v == 0.0 {
            0.0
        } else {
            v * w.eval(t)
        }
    };
    integrate_to_infinity(g, 0.0, scale, cfg)
}

/// `∫∫ h(x + iy) dν(x) dy` for a function decaying along vertical lines.
fn measure_integral<T, H>(
    h: &H,
    poles: &[Complex64],
    nu: &MeasureDescriptor,
    cfg: &QuadConfig,
) -> Result<T>
where
    T: Integrand,
    H: Fn(Complex64) -> T,
{
    let breakpoints: Vec<f64> = poles.iter().map(|p| p.im).collect();
    let rightmost = poles.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let line = |x: f64, cfg: &QuadConfig| -> Result<T> {
        let width = if rightmost.is_finite() {
            x - rightmost
        } else {
            1.0
        };
        if !(width > 0.0) {
            return Err(Error::Divergent(format!("pole on or right of Re s = {x}")));
        }
        integrate_real_line(|y| h(Complex64::new(x, y)), &breakpoints, width, cfg)
    };
    let mut total = T::zero();
    for &(r, m) in &nu.atoms {
        total = total + line(r, cfg)? * m;
    }
    let inner = cfg.inner();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let guarded = |x: f64, weight: f64| -> T {
        if weight == 0.0 {
            return T::zero();
        }
        match line(x, &inner) {
            Ok(v) => v * weight,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            }
        }
    };
    for p in &nu.density {
        let v = integrate(|x| guarded(x, p.eval(x)), p.start, p.end, &[], cfg)?;
        total = total + v;
    }
    if let Some(tail) = nu.tail {
        let scale = 1.0 + (tail.start - rightmost).max(0.0);
        let v = integrate_to_infinity(|x| guarded(x, tail.c), tail.start, scale, cfg)?;
        total = total + v;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(total)
}

fn check_tail_decay(decay: &[Complex64], nu: &MeasureDescriptor) -> Result<()> {
    if nu.has_tail() && decay.iter().any(|d| d.norm() > 0.0) {
        return Err(Error::Divergent(
            "s F(s) does not vanish at infinity under a Lebesgue tail".into(),
        ));
    }
    Ok(())
}

/// `‖F‖² = ∫∫ ‖F(x + iy)‖² dν(x) dy` (the ε → 0 limit, which is attained for
/// functions continuous up to the boundary).
pub fn frequency_norm(f: &dyn Transform, nu: &MeasureDescriptor, cfg: &QuadConfig) -> Result<f64> {
    nu.validate()?;
    check_tail_decay(&f.decay(), nu)?;
    measure_integral(&|s| f.norm_sq_at(s), &f.poles(), nu, cfg)
}

/// `⟨F, G⟩ = ∫∫ Σ_j F_j conj(G_j) dν dy`.
pub fn inner_product(
    f: &dyn Transform,
    g: &dyn Transform,
    nu: &MeasureDescriptor,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    nu.validate()?;
    if f.dim() != g.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    check_tail_decay(&f.decay(), nu)?;
    check_tail_decay(&g.decay(), nu)?;
    let mut poles = f.poles();
    poles.extend(g.poles());
    let h = |s: Complex64| -> Complex64 {
        f.eval(s)
            .iter()
            .zip(g.eval(s))
            .map(|(a, b)| a * b.conj())
            .sum()
    };
    measure_integral(&h, &poles, nu, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    /// Squared time-side norm.
    pub lhs: f64,
    /// Squared frequency-side norm.
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn verify_isometry(
    f: &TestSignal,
    nu: &MeasureDescriptor,
    cfg: &QuadConfig,
) -> Result<IsometryCheck> {
    let w = super::measure::weight_from_measure(nu)?;
    let lhs = time_norm(f, &w, cfg)?;
    let rhs = frequency_norm(&f.laplace(), nu, cfg)?;
    let rel_err = if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.max(rhs)
    };
    Ok(IsometryCheck { lhs, rhs, rel_err })
}

/// `k_z(t) = e^{-z̄t}/w(t)`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub z: Complex64,
    weight: Weight,
    /// Upper bound on `‖k_z‖²` from `w(t) ≥ 2π ν[0,ε) e^{-2εt}`, if some
    /// `0 < ε < Re z` has `ν[0,ε) > 0`.
    pub norm_bound: Option<f64>,
}

impl Kernel {
    pub fn eval(&self, t: f64) -> Complex64 {
        (-self.z.conj() * t).exp() / self.weight.eval(t)
    }

    /// Errors when the sufficient bound does not apply.
    pub fn require_in_space(&self) -> Result<f64> {
        self.norm_bound.ok_or(Error::KernelNotInSpace)
    }
}

pub fn kernel(z: Complex64, w: &Weight) -> Result<Kernel> {
    if !(z.re > 0.0) {
        return Err(Error::InvalidInput("kernel needs Re z > 0".into()));
    }
    let nu = w.measure();
    let mut eps: Vec<f64> = (1..64).map(|k| z.re * k as f64 / 64.0).collect();
    for &(r, _) in &nu.atoms {
        if r < z.re {
            eps.push(r + (z.re - r) * 1e-9);
            eps.push(r + (z.re - r) / 64.0);
            eps.push(0.5 * (r + z.re));
        }
    }
    let norm_bound = eps
        .into_iter()
        .filter_map(|e| {
            let m = nu.mass_below(e);
            (m > 0.0).then(|| 1.0 / (4.0 * PI * m * (z.re - e)))
        })
        .reduce(f64::min);
    Ok(Kernel {
        z,
        weight: w.clone(),
        norm_bound,
    })
}

/// `⟨f_j, k_z⟩_{L²(w)}` for each component: the reproducing pairing.
pub fn kernel_pairing(f: &TestSignal, k: &Kernel, cfg: &QuadConfig) -> Result<Vec<Complex64>> {
    f.validate()?;
    let scale = 1.0 / (f.min_rate() + k.z.re);
    (0..f.dim)
        .map(|j| {
            let g = |t: f64| -> Complex64 {
                if t == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                f.eval(t)[j] * k.eval(t).conj() * k.weight.eval(t)
            };
            integrate_to_infinity(g, 0.0, scale, cfg)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum KernelForm {
    Atom { r: f64, m: f64 },
    Tail { r0: f64, c: f64 },
}

/// Closed-form `K_z(s) x`, the transform of `k_z ⊗ x`, for single-atom and
/// pure-tail measures.
#[derive(Debug, Clone)]
pub struct KernelTransform {
    pub z: Complex64,
    pub x: Vec<Complex64>,
    form: KernelForm,
}

impl KernelTransform {
    pub fn new(z: Complex64, x: Vec<Complex64>, nu: &MeasureDescriptor) -> Result<Self> {
        nu.validate()?;
        let form = match (nu.atoms.as_slice(), nu.density.is_empty(), nu.tail) {
            ([(r, m)], true, None) => KernelForm::Atom { r: *r, m: *m },
            ([], true, Some(t)) => KernelForm::Tail {
                r0: t.start,
                c: t.c,
            },
            _ => {
                return Err(Error::InvalidInput(
                    "closed-form kernels need a single atom or a pure Lebesgue tail".into(),
                ))
            }
        };
        let edge = match form {
            KernelForm::Atom { r, .. } => r,
            KernelForm::Tail { r0, .. } => r0,
        };
        if !(z.re > edge) {
            return Err(Error::KernelNotInSpace);
        }
        Ok(KernelTransform { z, x, form })
    }

    fn scalar(&self, s: Complex64) -> Complex64 {
        match self.form {
            KernelForm::Atom { r, m } => 1.0 / (2.0 * PI * m * (s + self.z.conj() - 2.0 * r)),
            KernelForm::Tail { r0, c } => 1.0 / (PI * c * (s + self.z.conj() - 2.0 * r0).powu(2)),
        }
    }

    /// `‖K_z‖² = K_z(z)`.
    pub fn kernel_norm_sq(&self) -> f64 {
        self.scalar(self.z).re
    }
}

impl Transform for KernelTransform {
    fn dim(&self) -> usize {
        self.x.len()
    }
    fn eval(&self, s: Complex64) -> Vec<Complex64> {
        let k = self.scalar(s);
        self.x.iter().map(|v| k * v).collect()
    }
    fn poles(&self) -> Vec<Complex64> {
        let shift = match self.form {
            KernelForm::Atom { r, .. } => 2.0 * r,
            KernelForm::Tail { r0, .. } => 2.0 * r0,
        };
        vec![Complex64::new(shift, 0.0) - self.z.conj()]
    }
    fn decay(&self) -> Vec<Complex64> {
        match self.form {
            KernelForm::Atom { m, .. } => self.x.iter().map(|v| v / (2.0 * PI * m)).collect(),
            KernelForm::Tail { .. } => vec![Complex64::new(0.0, 0.0); self.x.len()],
        }
    }
}
