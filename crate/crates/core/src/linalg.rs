//! Dense complex matrices: eigenvalues by unitary Hessenberg reduction and
//! shifted QR, singular values, determinants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl TryFrom<Vec<Vec<Complex64>>> for ComplexMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        ComplexMatrix::from_rows(&rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<Complex64>> {
    fn from(m: ComplexMatrix) -> Self {
        (0..m.n).map(|i| m.row(i).to_vec()).collect()
    }
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix must be square".into()));
        }
        ComplexMatrix::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![ONE; n])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut data = vec![ZERO; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        ComplexMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let n = self.n;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        ComplexMatrix { n, data }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { n, data }
    }

    /// `alpha * I + beta * self`.
    pub fn shifted(&self, alpha: Complex64, beta: Complex64) -> ComplexMatrix {
        let n = self.n;
        let mut data: Vec<Complex64> = self.data.iter().map(|&z| z * beta).collect();
        for i in 0..n {
            data[i * n + i] += alpha;
        }
        ComplexMatrix { n, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == ZERO))
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Spectral norm `σ_max`.
    pub fn norm2(&self) -> f64 {
        self.singular_values()[0]
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap();
            if a[p * n + k] == ZERO {
                return ZERO;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// All eigenvalues (with multiplicity).
    pub fn eigenvalues(&self, max_iter: usize) -> Result<Vec<Complex64>> {
        let mut h = self.data.clone();
        hessenberg(&mut h, self.n);
        hessenberg_qr(&mut h, self.n, max_iter)
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Complex64], n: usize) {
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n)
            .map(|i| a[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        // v = x + phase * |x| e1
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2vv*/v*v) A
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * a[(k + 1 + r) * n + j])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r) * n + j] -= vr * f;
            }
        }
        // A <- A (I - 2vv*/v*v)
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| a[i * n + k + 1 + r] * vr)
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                a[i * n + k + 1 + r] -= f * vr.conj();
            }
        }
        for i in k + 2..n {
            a[i * n + k] = ZERO;
        }
    }
}

/// Givens rotation `(c, s)` with `[c s; -conj(s) c] [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let nx = x.norm();
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, ZERO);
    }
    if nx == 0.0 {
        return (0.0, y.conj() / ny);
    }
    let r = nx.hypot(ny);
    let c = nx / r;
    let s = (x / nx) * y.conj() / r;
    (c, s)
}

/// Shifted single-step QR on an upper Hessenberg matrix (eigenvalues only).
fn hessenberg_qr(h: &mut [Complex64], n: usize, max_iter: usize) -> Result<Vec<Complex64>> {
    let at = |h: &[Complex64], i: usize, j: usize| h[i * n + j];
    let mut eig = vec![ZERO; n];
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    while hi >= 0 {
        let hiu = hi as usize;
        // Find the start of the active unreduced block.
        let mut lo = hiu;
        while lo > 0 {
            let sub = at(h, lo, lo - 1).norm();
            let diag = at(h, lo, lo).norm() + at(h, lo - 1, lo - 1).norm();
            let scale = if diag == 0.0 { 1.0 } else { diag };
            if sub <= f64::EPSILON * scale {
                h[lo * n + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hiu {
            eig[hiu] = at(h, hiu, hiu);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if since_deflation > max_iter {
            let residual = at(h, hiu, hiu - 1).norm();
            return Err(Error::NonConvergence {
                iterations: iter,
                residual,
            });
        }

        // Wilkinson shift from the trailing 2x2 block, exceptional shift now and then.
        let a = at(h, hiu - 1, hiu - 1);
        let b = at(h, hiu - 1, hiu);
        let c = at(h, hiu, hiu - 1);
        let d = at(h, hiu, hiu);
        let mu = if since_deflation % 11 == 10 {
            d + Complex64::new(0.75 * c.norm(), 0.25 * c.norm())
        } else {
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr * 0.25 - det).sqrt();
            let l1 = tr * 0.5 + disc;
            let l2 = tr * 0.5 - disc;
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // Explicit shifted QR on the active block [lo, hi].
        for i in lo..=hiu {
            h[i * n + i] -= mu;
        }
        let mut rots = Vec::with_capacity(hiu - lo);
        for k in lo..hiu {
            let (cs, sn) = givens(at(h, k, k), at(h, k + 1, k));
            rots.push((cs, sn));
            for j in k..=hiu {
                let x = at(h, k, j);
                let y = at(h, k + 1, j);
                h[k * n + j] = x * cs + sn * y;
                h[(k + 1) * n + j] = -sn.conj() * x + y * cs;
            }
        }
        for (idx, &(cs, sn)) in rots.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hiu) {
                let x = at(h, i, k);
                let y = at(h, i, k + 1);
                h[i * n + k] = x * cs + y * sn.conj();
                h[i * n + k + 1] = -x * sn + y * cs;
            }
        }
        for i in lo..=hiu {
            h[i * n + i] += mu;
        }
    }
    Ok(eig)
}
