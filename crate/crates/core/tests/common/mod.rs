//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use delay_margin::{Complex64, ComplexMatrix, Polynomial};
use rand::Rng;

/// Closed right-half-plane zeros of `P(s) + λQ(s)e^{-sh}` by the argument
/// principle on the rectangle `[0, R] × [-R, R]`, with `R` from a Cauchy-type
/// bound outside of which `|P| > |λQ|` on the right half-plane.
pub fn rectangle_count(p: &[f64], q: &[f64], lambda: Complex64, h: f64) -> i64 {
    let n = p.len() - 1;
    let lower: f64 = p[..n].iter().map(|c| c.abs()).sum::<f64>()
        + lambda.norm() * q.iter().map(|c| c.abs()).sum::<f64>();
    let r = 1.5 * (1.0f64).max(lower / p[n].abs()) + 1.0;
    let horner = |c: &[f64], s: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * s + k)
    };
    let f = |s: Complex64| horner(p, s) + lambda * horner(q, s) * (-s * h).exp();
    // counterclockwise corners
    let corners = [
        Complex64::new(0.0, -r),
        Complex64::new(r, -r),
        Complex64::new(r, r),
        Complex64::new(0.0, r),
        Complex64::new(0.0, -r),
    ];
    let mut total = 0.0;
    for w in corners.windows(2) {
        let (a, b) = (w[0], w[1]);
        let steps = 400 + (60.0 * r * (1.0 + h)) as usize;
        let mut stack: Vec<(f64, f64)> = (0..steps)
            .rev()
            .map(|k| (k as f64 / steps as f64, (k + 1) as f64 / steps as f64))
            .collect();
        while let Some((t0, t1)) = stack.pop() {
            let v0 = f(a + (b - a) * t0);
            let v1 = f(a + (b - a) * t1);
            let d = (v1 / v0).arg();
            if d.abs() > 0.5 && t1 - t0 > 1e-12 {
                let tm = 0.5 * (t0 + t1);
                stack.push((tm, t1));
                stack.push((t0, tm));
            } else {
                total += d;
            }
        }
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Random unitary matrix as a product of Householder reflectors.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(n);
    for _ in 0..n {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                data.push(Complex64::new(delta, 0.0) - v[i] * v[j].conj() * (2.0 / nv));
            }
        }
        u = u.matmul(&ComplexMatrix::new(n, data).unwrap());
    }
    u
}

/// Polynomial with the given real coefficients and random roots in `Re s < -0.1`.
pub fn random_hurwitz<R: Rng>(deg: usize, rng: &mut R) -> Vec<f64> {
    let mut c = vec![1.0];
    let mut k = 0;
    while k < deg {
        if deg - k >= 2 && rng.gen_bool(0.5) {
            let a = rng.gen_range(0.1..2.0);
            let b = rng.gen_range(0.0..3.0);
            // s² + 2as + a² + b²
            c = mul(&c, &[a * a + b * b, 2.0 * a, 1.0]);
            k += 2;
        } else {
            c = mul(&c, &[rng.gen_range(0.1..2.0), 1.0]);
            k += 1;
        }
    }
    c
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly(c: &[f64]) -> Polynomial {
    Polynomial::from_real(c)
}

/// Brute-force margin of `s + 1 + λe^{-sh}` over the disk `|λ - 1| ≤ 1`:
/// polar grid over the disk, then a fine scan of the boundary circle.
pub fn disk_margin_oracle() -> (f64, Complex64) {
    let first = |lambda: Complex64| -> f64 {
        let m2 = lambda.norm_sqr();
        if m2 <= 1.0 {
            return f64::INFINITY;
        }
        let w = (m2 - 1.0).sqrt();
        [w, -w]
            .iter()
            .map(|&om| {
                // e^{-iωh} = -(1 + iω)/λ
                let z = -Complex64::new(1.0, om) / lambda;
                let phase = -z.arg();
                let t = if om > 0.0 { phase } else { -phase };
                t.rem_euclid(std::f64::consts::TAU) / om.abs()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for i in 1..=200 {
        for j in 0..720 {
            let rad = i as f64 / 200.0;
            let lam = Complex64::new(1.0, 0.0)
                + Complex64::from_polar(rad, std::f64::consts::TAU * j as f64 / 720.0);
            let h = first(lam);
            if h < best.0 {
                best = (h, lam);
            }
        }
    }
    let psi0 = (best.1 - 1.0).arg();
    for k in -200_000..=200_000 {
        let psi = psi0 + 1e-7 * k as f64;
        let lam = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, psi);
        let h = first(lam);
        if h < best.0 {
            best = (h, lam);
        }
    }
    best
}
