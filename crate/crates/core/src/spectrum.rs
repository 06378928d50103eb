//! Computable descriptions of the spectrum of the delay operator `A`.
//!
//! An operator is never handled directly: it enters either as a matrix (whose
//! eigenvalues are computed) or as a descriptor of its spectrum. The crossing
//! analysis only ever needs the intersection of the spectrum with circles
//! `|z| = ρ`, which every variant here supports in closed form.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::poly::DEFAULT_MAX_ITER;

/// Default number of samples on a full circle of candidate `λ` values.
pub const DEFAULT_ARC_SAMPLES: usize = 720;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectrumDescriptor {
    Points {
        points: Vec<Complex64>,
    },
    Matrix {
        matrix: ComplexMatrix,
    },
    Disk {
        center: Complex64,
        radius: f64,
    },
    Circle {
        center: Complex64,
        radius: f64,
    },
    Annulus {
        center: Complex64,
        r_inner: f64,
        r_outer: f64,
    },
    Union {
        members: Vec<SpectrumDescriptor>,
    },
}

/// `[min |z|, max |z|]` over a descriptor plus the disjoint intervals making
/// up the exact modulus set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusRange {
    pub min_mod: f64,
    pub max_mod: f64,
    pub intervals: Vec<(f64, f64)>,
}

impl ModulusRange {
    fn single(lo: f64, hi: f64) -> Self {
        ModulusRange {
            min_mod: lo,
            max_mod: hi,
            intervals: vec![(lo, hi)],
        }
    }

    pub fn contains(&self, rho: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| rho >= a - tol && rho <= b + tol)
    }
}

/// A connected piece of `{λ in d : |λ| = ρ}`: an arc `ρ e^{iθ}`,
/// `θ ∈ [start, end]` (`end - start ≤ 2π`), or an isolated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arc {
    Point(Complex64),
    Arc { radius: f64, start: f64, end: f64 },
}

impl Arc {
    /// Evenly spaced samples including both endpoints.
    pub fn sample(&self, samples_per_turn: usize) -> Vec<Complex64> {
        match *self {
            Arc::Point(z) => vec![z],
            Arc::Arc { radius, start, end } => {
                let span = end - start;
                let full = span >= TAU - 1e-15;
                let k = ((samples_per_turn as f64) * span / TAU).ceil().max(1.0) as usize;
                let count = if full { k } else { k + 1 };
                (0..count)
                    .map(|j| Complex64::from_polar(radius, start + span * j as f64 / k as f64))
                    .collect()
            }
        }
    }
}

/// A boundary curve `ψ ↦ center + radius e^{iψ}` of a continuum piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCircle {
    pub center: Complex64,
    pub radius: f64,
}

impl BoundaryCircle {
    pub fn at(&self, psi: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, psi)
    }
}

impl SpectrumDescriptor {
    pub fn points(points: Vec<Complex64>) -> Self {
        SpectrumDescriptor::Points { points }
    }

    pub fn disk(center: Complex64, radius: f64) -> Self {
        SpectrumDescriptor::Disk { center, radius }
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        SpectrumDescriptor::Circle { center, radius }
    }

    pub fn validate(&self) -> Result<()> {
        use SpectrumDescriptor::*;
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            Points { points } => {
                if !points.iter().all(finite) {
                    return Err(Error::InvalidDescriptor("points must be finite".into()));
                }
            }
            Matrix { .. } => {}
            Disk { center, radius } | Circle { center, radius } => {
                if !finite(center) || !(*radius >= 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidDescriptor(
                        "radius must be finite and >= 0".into(),
                    ));
                }
            }
            Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                if !finite(center)
                    || !(*r_inner >= 0.0)
                    || !(r_inner <= r_outer)
                    || !r_outer.is_finite()
                {
                    return Err(Error::InvalidDescriptor(
                        "annulus needs 0 <= r_inner <= r_outer < inf".into(),
                    ));
                }
            }
            Union { members } => {
                if members.is_empty() {
                    return Err(Error::InvalidDescriptor("union must be nonempty".into()));
                }
                for m in members {
                    m.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Replaces matrices by their eigenvalues.
    pub fn resolve(&self) -> Result<SpectrumDescriptor> {
        Ok(match self {
            SpectrumDescriptor::Matrix { matrix } => SpectrumDescriptor::Points {
                points: matrix.eigenvalues(DEFAULT_MAX_ITER)?,
            },
            SpectrumDescriptor::Union { members } => SpectrumDescriptor::Union {
                members: members.iter().map(|m| m.resolve()).collect::<Result<_>>()?,
            },
            other => other.clone(),
        })
    }

    /// True when the set is finite (points or matrix eigenvalues).
    pub fn is_finite_set(&self) -> bool {
        match self {
            SpectrumDescriptor::Points { .. } | SpectrumDescriptor::Matrix { .. } => true,
            SpectrumDescriptor::Union { members } => members.iter().all(|m| m.is_finite_set()),
            _ => false,
        }
    }

    /// All isolated points of the (resolved) descriptor.
    pub fn isolated_points(&self) -> Result<Vec<Complex64>> {
        Ok(match self.resolve()? {
            SpectrumDescriptor::Points { points } => points,
            SpectrumDescriptor::Union { members } => {
                let mut out = Vec::new();
                for m in &members {
                    out.extend(m.isolated_points()?);
                }
                out
            }
            _ => Vec::new(),
        })
    }

    /// Boundary circles of the continuum members.
    pub fn boundary_circles(&self) -> Vec<BoundaryCircle> {
        use SpectrumDescriptor::*;
        match self {
            Disk { center, radius } | Circle { center, radius } => vec![BoundaryCircle {
                center: *center,
                radius: *radius,
            }],
            Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let mut v = vec![BoundaryCircle {
                    center: *center,
                    radius: *r_outer,
                }];
                if *r_inner > 0.0 {
                    v.push(BoundaryCircle {
                        center: *center,
                        radius: *r_inner,
                    });
                }
                v
            }
            Union { members } => members.iter().flat_map(|m| m.boundary_circles()).collect(),
            Points { .. } | Matrix { .. } => Vec::new(),
        }
    }

    /// Euclidean distance from `z` to the set.
    pub fn distance(&self, z: Complex64) -> Result<f64> {
        use SpectrumDescriptor::*;
        Ok(match self {
            Points { points } => points
                .iter()
                .map(|p| (p - z).norm())
                .fold(f64::INFINITY, f64::min),
            Matrix { .. } => self.resolve()?.distance(z)?,
            Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            Circle { center, radius } => ((z - center).norm() - radius).abs(),
            Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let d = (z - center).norm();
                if d < *r_inner {
                    r_inner - d
                } else if d > *r_outer {
                    d - r_outer
                } else {
                    0.0
                }
            }
            Union { members } => {
                let mut best = f64::INFINITY;
                for m in members {
                    best = best.min(m.distance(z)?);
                }
                best
            }
        })
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z).map(|d| d <= tol).unwrap_or(false)
    }

    /// Exact modulus range of the set.
    pub fn modulus_range(&self) -> Result<ModulusRange> {
        use SpectrumDescriptor::*;
        Ok(match self {
            Points { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidDescriptor("empty point set".into()));
                }
                let mut mods: Vec<f64> = points.iter().map(|p| p.norm()).collect();
                mods.sort_by(f64::total_cmp);
                mods.dedup();
                ModulusRange {
                    min_mod: mods[0],
                    max_mod: mods[mods.len() - 1],
                    intervals: mods.iter().map(|&m| (m, m)).collect(),
                }
            }
            Matrix { .. } => self.resolve()?.modulus_range()?,
            Disk { center, radius } => {
                let c = center.norm();
                ModulusRange::single((c - radius).max(0.0), c + radius)
            }
            Circle { center, radius } => {
                let c = center.norm();
                ModulusRange::single((c - radius).abs(), c + radius)
            }
            Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let c = center.norm();
                let lo = if c <= *r_inner {
                    r_inner - c
                } else if c <= *r_outer {
                    0.0
                } else {
                    c - r_outer
                };
                ModulusRange::single(lo, c + r_outer)
            }
            Union { members } => {
                let mut iv: Vec<(f64, f64)> = Vec::new();
                for m in members {
                    iv.extend(m.modulus_range()?.intervals);
                }
                iv.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut merged: Vec<(f64, f64)> = Vec::new();
                for (a, b) in iv {
                    match merged.last_mut() {
                        Some(last) if a <= last.1 => last.1 = last.1.max(b),
                        _ => merged.push((a, b)),
                    }
                }
                ModulusRange {
                    min_mod: merged[0].0,
                    max_mod: merged.iter().map(|x| x.1).fold(0.0, f64::max),
                    intervals: merged,
                }
            }
        })
    }

    /// Connected pieces of `{λ in d : |λ| = ρ}`.
    pub fn arcs_at_modulus(&self, rho: f64, tol: f64) -> Result<Vec<Arc>> {
        use SpectrumDescriptor::*;
        let near = |m: f64| (m - rho).abs() <= tol * (1.0 + rho);
        Ok(match self {
            Points { points } => points
                .iter()
                .filter(|p| near(p.norm()))
                .map(|&p| Arc::Point(p))
                .collect(),
            Matrix { .. } => self.resolve()?.arcs_at_modulus(rho, tol)?,
            // |ρe^{iθ} - c| ≤ r  ⇔  cos(θ - φ) ≥ κ(r)
            Disk { center, radius } => band_arcs(*center, None, *radius, rho, tol),
            Annulus {
                center,
                r_inner,
                r_outer,
            } => band_arcs(*center, Some(*r_inner), *r_outer, rho, tol),
            Circle { center, radius } => circle_hits(*center, *radius, rho, tol),
            Union { members } => {
                let mut out = Vec::new();
                for m in members {
                    out.extend(m.arcs_at_modulus(rho, tol)?);
                }
                out
            }
        })
    }

    /// A finite sample of `{λ in d : |λ| = ρ}`.
    pub fn candidates_for_modulus(&self, rho: f64, tol: f64) -> Result<Vec<Complex64>> {
        self.candidates_for_modulus_with(rho, tol, DEFAULT_ARC_SAMPLES)
    }

    pub fn candidates_for_modulus_with(
        &self,
        rho: f64,
        tol: f64,
        samples_per_turn: usize,
    ) -> Result<Vec<Complex64>> {
        let mut out: Vec<Complex64> = Vec::new();
        for arc in self.arcs_at_modulus(rho, tol)? {
            for z in arc.sample(samples_per_turn) {
                if !out.iter().any(|w| (w - z).norm() <= tol * (1.0 + rho)) {
                    out.push(z);
                }
            }
        }
        Ok(out)
    }

    /// Sandwich `(σ(N), σ(N) ∪ holes)` for a subnormal operator whose minimal
    /// normal extension has spectrum `self`.
    pub fn subnormal_bounds(&self) -> Result<(SpectrumDescriptor, SpectrumDescriptor)> {
        Ok((self.clone(), self.fill_holes()?))
    }

    fn fill_holes(&self) -> Result<SpectrumDescriptor> {
        use SpectrumDescriptor::*;
        Ok(match self {
            Points { .. } | Matrix { .. } | Disk { .. } => self.clone(),
            Circle { center, radius } => Disk {
                center: *center,
                radius: *radius,
            },
            Annulus {
                center, r_outer, ..
            } => Disk {
                center: *center,
                radius: *r_outer,
            },
            Union { members } => {
                let filled: Vec<SpectrumDescriptor> = members
                    .iter()
                    .map(|m| m.fill_holes())
                    .collect::<Result<_>>()?;
                merge_filled(filled)?
            }
        })
    }
}

/// Arcs of `|z| = ρ` inside `{r_in ≤ |z - c| ≤ r_out}` (`r_in = None` for a disk).
fn band_arcs(c: Complex64, r_in: Option<f64>, r_out: f64, rho: f64, tol: f64) -> Vec<Arc> {
    let cn = c.norm();
    let slack = tol * (1.0 + rho + cn + r_out);
    if rho <= slack {
        let d = cn;
        let inside = d <= r_out + slack && r_in.map_or(true, |ri| d >= ri - slack);
        return if inside {
            vec![Arc::Point(Complex64::new(0.0, 0.0))]
        } else {
            Vec::new()
        };
    }
    if cn <= slack {
        let inside = rho <= r_out + slack && r_in.map_or(true, |ri| rho >= ri - slack);
        return if inside {
            vec![Arc::Arc {
                radius: rho,
                start: -PI,
                end: PI,
            }]
        } else {
            Vec::new()
        };
    }
    let phi = c.arg();
    // cos(θ-φ) ≥ kappa(r) ⇔ |ρe^{iθ} - c| ≤ r
    let kappa = |r: f64| (rho * rho + cn * cn - r * r) / (2.0 * rho * cn);
    let k_out = kappa(r_out);
    if k_out > 1.0 + tol {
        return Vec::new();
    }
    if k_out >= 1.0 - 1e-15 {
        return vec![Arc::Point(Complex64::from_polar(rho, phi))];
    }
    // half-angle of the allowed cone |θ - φ| ≤ a_out
    let a_out = if k_out <= -1.0 { PI } else { k_out.acos() };
    match r_in {
        None => vec![cone(rho, phi, a_out)],
        Some(ri) => {
            // need |ρe^{iθ} - c| ≥ ri ⇔ cos(θ-φ) ≤ kappa(ri) ⇔ |θ-φ| ≥ a_in
            let k_in = kappa(ri);
            let a_in = if k_in >= 1.0 {
                0.0
            } else if k_in <= -1.0 {
                return Vec::new();
            } else {
                k_in.acos()
            };
            if a_in > a_out {
                Vec::new()
            } else if a_in == 0.0 {
                vec![cone(rho, phi, a_out)]
            } else {
                vec![
                    Arc::Arc {
                        radius: rho,
                        start: phi + a_in,
                        end: phi + a_out,
                    },
                    Arc::Arc {
                        radius: rho,
                        start: phi - a_out,
                        end: phi - a_in,
                    },
                ]
            }
        }
    }
}

fn cone(rho: f64, phi: f64, a_out: f64) -> Arc {
    if a_out >= PI {
        Arc::Arc {
            radius: rho,
            start: phi - PI,
            end: phi + PI,
        }
    } else {
        Arc::Arc {
            radius: rho,
            start: phi - a_out,
            end: phi + a_out,
        }
    }
}

fn circle_hits(c: Complex64, r: f64, rho: f64, tol: f64) -> Vec<Arc> {
    let cn = c.norm();
    let slack = tol * (1.0 + rho + cn + r);
    if cn <= slack {
        return if (rho - r).abs() <= slack {
            vec![Arc::Arc {
                radius: rho,
                start: -PI,
                end: PI,
            }]
        } else {
            Vec::new()
        };
    }
    if rho <= slack {
        return if (cn - r).abs() <= slack {
            vec![Arc::Point(Complex64::new(0.0, 0.0))]
        } else {
            Vec::new()
        };
    }
    let kappa = (rho * rho + cn * cn - r * r) / (2.0 * rho * cn);
    let phi = c.arg();
    if kappa.abs() > 1.0 + tol {
        Vec::new()
    } else if kappa >= 1.0 - 1e-15 {
        vec![Arc::Point(Complex64::from_polar(rho, phi))]
    } else if kappa <= -1.0 + 1e-15 {
        vec![Arc::Point(Complex64::from_polar(rho, phi + PI))]
    } else {
        let a = kappa.acos();
        vec![
            Arc::Point(Complex64::from_polar(rho, phi + a)),
            Arc::Point(Complex64::from_polar(rho, phi - a)),
        ]
    }
}

/// Unions of filled members: drop members contained in others and refuse
/// configurations whose overlaps could enclose a new hole.
fn merge_filled(filled: Vec<SpectrumDescriptor>) -> Result<SpectrumDescriptor> {
    let disks: Vec<(usize, Complex64, f64)> = filled
        .iter()
        .enumerate()
        .filter_map(|(i, m)| match m {
            SpectrumDescriptor::Disk { center, radius } => Some((i, *center, *radius)),
            _ => None,
        })
        .collect();
    let contains =
        |a: &(usize, Complex64, f64), b: &(usize, Complex64, f64)| (a.1 - b.1).norm() + b.2 <= a.2;
    let mut dropped = vec![false; filled.len()];
    for a in &disks {
        for b in &disks {
            if a.0 != b.0 && !dropped[a.0] && contains(a, b) {
                dropped[b.0] = true;
            }
        }
    }
    let kept: Vec<&(usize, Complex64, f64)> = disks.iter().filter(|d| !dropped[d.0]).collect();
    // A cycle in the proper-overlap graph may enclose a bounded complement
    // component; union-find detects it.
    let mut parent: Vec<usize> = (0..kept.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            let d = (kept[i].1 - kept[j].1).norm();
            if d <= kept[i].2 + kept[j].2 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a == b {
                    return Err(Error::UnsupportedDescriptor(
                        "overlapping members form a ring that may enclose a hole".into(),
                    ));
                }
                parent[a] = b;
            }
        }
    }
    let members: Vec<SpectrumDescriptor> = filled
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !dropped[*i])
        .map(|(_, m)| m)
        .collect();
    Ok(if members.len() == 1 {
        members.into_iter().next().unwrap()
    } else {
        SpectrumDescriptor::Union { members }
    })
}

/// Eigenvalues of a matrix (with multiplicity).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.eigenvalues(DEFAULT_MAX_ITER)
}
