//! Operator-level delay margins.
//!
//! `(P(s)I + Q(s)e^{-sh}A)^{-1}` is H∞-stable exactly when `P(s) + λQ(s)e^{-sh}`
//! has no closed right-half-plane zero for any `λ` in the spectrum of `A`
//! (retarded case). The margin is therefore the infimum of the per-`λ` margins.
//! Finite spectra are handled eigenvalue by eigenvalue; continuum spectra
//! (disks, circles, annuli) by sampling crossing moduli and refining along the
//! boundary of the set.

mod demos;
mod hinf;

pub use demos::{neutral_demo, unbounded_a_demo, NeutralSample};
pub use hinf::{hinf_boundary_norm, tail_radius, GridConfig, HinfCertificate, NormMethod};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::poly::Polynomial;
use crate::serde_util::inf_as_null;
use crate::spectrum::{BoundaryCircle, SpectrumDescriptor, DEFAULT_ARC_SAMPLES};
use crate::walton_marshall::{
    self, analyze_lambda, check_retarded, crossing_polynomial, first_crossing, h0_rhp_count,
    LambdaStabilityResult, Status, Window,
};

/// `G(s) = (P(s)I + Q(s)e^{-sh}A)^{-1}` with `A` given through its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySystem {
    pub p: Polynomial,
    pub q: Polynomial,
    pub spectrum: SpectrumDescriptor,
    /// Operator norm bound `‖A‖`. Defaults to `σ_max` for matrices and to the
    /// largest spectral modulus (exact for normal `A`) otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_a: Option<f64>,
    /// The spectrum is that of the minimal normal extension of a subnormal `A`.
    #[serde(default)]
    pub subnormal: bool,
}

impl DelaySystem {
    pub fn new(p: Polynomial, q: Polynomial, spectrum: SpectrumDescriptor) -> Result<Self> {
        let sys = DelaySystem {
            p,
            q,
            spectrum,
            norm_a: None,
            subnormal: false,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_norm(mut self, norm_a: f64) -> Result<Self> {
        self.norm_a = Some(norm_a);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_retarded(&self.p, &self.q)?;
        self.spectrum.validate()?;
        if let Some(n) = self.norm_a {
            let max_mod = self.spectrum.modulus_range()?.max_mod;
            if !(n.is_finite() && n >= max_mod * (1.0 - 1e-12)) {
                return Err(Error::InvalidInput(format!(
                    "norm_a = {n} is below the spectral radius {max_mod}"
                )));
            }
        }
        Ok(())
    }

    pub fn norm_a(&self) -> Result<f64> {
        if let Some(n) = self.norm_a {
            return Ok(n);
        }
        match &self.spectrum {
            SpectrumDescriptor::Matrix { matrix } => Ok(matrix.norm2()),
            other => Ok(other.modulus_range()?.max_mod),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarginConfig {
    pub tol: f64,
    /// Samples per full turn when discretizing candidate arcs `|λ| = ρ`.
    pub arc_samples: usize,
    /// Frequencies in the crossing-modulus grid for continuum spectra.
    pub omega_grid: usize,
    /// Samples per boundary circle before golden-section refinement.
    pub boundary_samples: usize,
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            tol: crate::DEFAULT_TOL,
            arc_samples: DEFAULT_ARC_SAMPLES,
            omega_grid: 241,
            boundary_samples: DEFAULT_ARC_SAMPLES,
        }
    }
}

/// Worst spectral value found for a continuum spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumMinimizer {
    pub lambda: Complex64,
    pub omega: f64,
    pub h: f64,
    /// Best delay seen on the crossing-frequency grid (before refinement).
    #[serde(with = "inf_as_null")]
    pub grid_h: f64,
    /// Best delay seen on the boundary sample (before refinement).
    #[serde(with = "inf_as_null")]
    pub boundary_scan_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginBounds {
    /// Margin over `σ(N) ∪ holes`: stability is guaranteed below it.
    #[serde(with = "inf_as_null")]
    pub margin_lower: f64,
    /// Margin over `σ(N)`: instability is guaranteed above it.
    #[serde(with = "inf_as_null")]
    pub margin_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub per_lambda: Vec<LambdaStabilityResult>,
    pub aggregate_windows: Vec<Window>,
    /// For continuum spectra only the first aggregate window is exhaustive;
    /// later ones are intersections over the analysed samples.
    pub windows_per_sample_only: bool,
    #[serde(with = "inf_as_null")]
    pub margin: f64,
    pub certified_all_h: bool,
    pub status: Status,
    pub minimizer: Option<ContinuumMinimizer>,
    pub bounds: Option<MarginBounds>,
    pub certificate: Option<HinfCertificate>,
    pub notes: Vec<String>,
}

/// Delay margin and stability windows of the operator system.
pub fn operator_margin(
    sys: &DelaySystem,
    h_max: f64,
    cfg: &MarginConfig,
) -> Result<StabilityReport> {
    sys.validate()?;
    if sys.subnormal {
        let (lower, upper) = sys.spectrum.subnormal_bounds()?;
        let sufficient = margin_over(&sys.p, &sys.q, &upper, h_max, cfg)?;
        let necessary = margin_over(&sys.p, &sys.q, &lower, h_max, cfg)?;
        let mut report = sufficient;
        report.bounds = Some(MarginBounds {
            margin_lower: report.margin,
            margin_upper: necessary.margin,
        });
        report.notes.push(
            "subnormal operator: margin reported over sigma(N) with holes filled; the true margin lies within bounds"
                .into(),
        );
        return Ok(report);
    }
    margin_over(&sys.p, &sys.q, &sys.spectrum, h_max, cfg)
}

fn margin_over(
    p: &Polynomial,
    q: &Polynomial,
    spectrum: &SpectrumDescriptor,
    h_max: f64,
    cfg: &MarginConfig,
) -> Result<StabilityReport> {
    let tol = cfg.tol;
    let mut points = spectrum.isolated_points()?;
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    points.dedup_by(|a, b| (*a - *b).norm() <= 1e-14 * (1.0 + b.norm()));

    let results = par::map(&points, |&lambda| analyze_lambda(p, q, lambda, h_max, tol));
    let mut per_lambda: Vec<LambdaStabilityResult> = results.into_iter().collect::<Result<_>>()?;
    let mut notes = Vec::new();

    let mut minimizer = None;
    let continuum = spectrum.boundary_circles();
    let mut continuum_certified = true;
    if !continuum.is_empty() {
        let cont = continuum_part(spectrum);
        match continuum_margin(p, q, &cont, &continuum, cfg)? {
            ContinuumOutcome::UnstableAtZero(lambda) => {
                notes.push(format!(
                    "continuum spectrum contains lambda = {lambda} that is unstable (or marginal) at h = 0"
                ));
                let mut r = analyze_lambda(p, q, lambda, h_max, tol)?;
                r.margin = 0.0;
                r.windows.retain(|w| w.start > 0.0);
                per_lambda.push(r);
                continuum_certified = false;
            }
            ContinuumOutcome::NoCrossing => {
                notes.push("no crossing frequency for any lambda in the continuum spectrum".into());
            }
            ContinuumOutcome::Crossing(m) => {
                per_lambda.push(analyze_lambda(p, q, m.lambda, h_max, tol)?);
                minimizer = Some(m);
                continuum_certified = false;
            }
        }
    }

    let mut margin = per_lambda
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    if let Some(m) = &minimizer {
        margin = margin.min(m.h);
    }
    let mut aggregate = vec![Window {
        start: 0.0,
        end: h_max,
    }];
    for r in &per_lambda {
        aggregate = intersect(&aggregate, &r.windows);
    }
    if let Some(m) = &minimizer {
        // The first window is exhaustive over the continuum.
        if let Some(first) = aggregate.first_mut() {
            if first.start == 0.0 && first.end > m.h {
                first.end = m.h;
            }
        }
    }
    let status = if per_lambda.iter().any(|r| r.status == Status::Degenerate) {
        Status::Degenerate
    } else {
        Status::Exact
    };
    let certified_all_h = continuum_certified && per_lambda.iter().all(|r| r.certified_all_h);
    Ok(StabilityReport {
        per_lambda,
        aggregate_windows: aggregate,
        windows_per_sample_only: !continuum.is_empty(),
        margin,
        certified_all_h,
        status,
        minimizer,
        bounds: None,
        certificate: None,
        notes,
    })
}

/// Intersection of two sorted lists of disjoint half-open windows.
pub fn intersect(a: &[Window], b: &[Window]) -> Vec<Window> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let start = a[i].start.max(b[j].start);
        let end = a[i].end.min(b[j].end);
        if start < end
            || (start == end && start == 0.0 && a[i].start == a[i].end && b[j].start == b[j].end)
        {
            out.push(Window { start, end });
        }
        if a[i].end < b[j].end {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn continuum_part(spectrum: &SpectrumDescriptor) -> SpectrumDescriptor {
    match spectrum {
        SpectrumDescriptor::Union { members } => {
            let members: Vec<SpectrumDescriptor> = members
                .iter()
                .filter(|m| !m.is_finite_set())
                .map(continuum_part)
                .collect();
            if members.len() == 1 {
                members.into_iter().next().unwrap()
            } else {
                SpectrumDescriptor::Union { members }
            }
        }
        other => other.clone(),
    }
}

enum ContinuumOutcome {
    UnstableAtZero(Complex64),
    NoCrossing,
    Crossing(ContinuumMinimizer),
}

/// First crossing delay of `λ`, `+∞` when it never crosses.
fn first_delay(p: &Polynomial, q: &Polynomial, lambda: Complex64, tol: f64) -> (f64, f64) {
    match first_crossing(p, q, lambda, tol) {
        Ok(Some((h, w))) => (h, w),
        Ok(None) => (f64::INFINITY, 0.0),
        Err(_) => (0.0, 0.0),
    }
}

fn continuum_margin(
    p: &Polynomial,
    q: &Polynomial,
    cont: &SpectrumDescriptor,
    circles: &[BoundaryCircle],
    cfg: &MarginConfig,
) -> Result<ContinuumOutcome> {
    let tol = cfg.tol;
    let range = cont.modulus_range()?;

    // h = 0: n0 is constant on each component of C minus the curve
    // λ(ω) = -P(iω)/Q(iω); sample the boundary and that curve.
    let samples: Vec<Complex64> = circles
        .iter()
        .flat_map(|c| {
            (0..cfg.boundary_samples)
                .map(move |k| c.at(TAU * k as f64 / cfg.boundary_samples as f64))
        })
        .collect();
    for &lambda in &samples {
        let c = h0_rhp_count(p, q, lambda, tol)?;
        if c.count > 0 || c.boundary {
            return Ok(ContinuumOutcome::UnstableAtZero(lambda));
        }
    }

    // Frequencies with |P(iω)|/|Q(iω)| ≤ max |λ| lie in [-W, W].
    let f_max = crossing_polynomial(p, q, range.max_mod);
    let reach = if f_max.degree() == 0 {
        0.0
    } else {
        f_max
            .real_roots_of_real_poly(tol)?
            .iter()
            .map(|(w, _)| w.abs())
            .fold(0.0, f64::max)
    };
    if reach == 0.0 {
        return Ok(ContinuumOutcome::NoCrossing);
    }

    for k in 0..=4 * cfg.omega_grid {
        let w = -reach + 2.0 * reach * k as f64 / (4 * cfg.omega_grid) as f64;
        let s = Complex64::new(0.0, w);
        let qv = q.eval(s);
        if qv.norm() == 0.0 {
            continue;
        }
        let lambda = -p.eval(s) / qv;
        if cont.contains(lambda, tol * (1.0 + lambda.norm())) {
            return Ok(ContinuumOutcome::UnstableAtZero(lambda));
        }
    }

    // Stage 1: crossing-frequency grid, full candidate arcs.
    let mut grid_best = (f64::INFINITY, Complex64::new(0.0, 0.0), 0.0);
    let n = cfg.omega_grid.max(2);
    for k in 0..n {
        let w = -reach + 2.0 * reach * k as f64 / (n - 1) as f64;
        if w == 0.0 {
            continue;
        }
        let s = Complex64::new(0.0, w);
        let (pv, qv) = (p.eval(s), q.eval(s));
        if qv.norm() == 0.0 {
            continue;
        }
        let rho = pv.norm() / qv.norm();
        if !range.contains(rho, tol * (1.0 + rho)) {
            continue;
        }
        for lambda in cont.candidates_for_modulus_with(rho, tol, cfg.arc_samples)? {
            if lambda.norm() == 0.0 {
                continue;
            }
            let z = -pv / (lambda * qv);
            let h = walton_marshall::principal_delay(z / z.norm(), w);
            if h < grid_best.0 {
                grid_best = (h, lambda, w);
            }
        }
    }

    // Stage 2: per-λ first crossing along every boundary circle.
    let mut scan: Vec<(f64, usize, f64)> = Vec::new(); // (h, circle, ψ)
    for (ci, circle) in circles.iter().enumerate() {
        let m = cfg.boundary_samples;
        let psis: Vec<f64> = (0..m).map(|k| TAU * k as f64 / m as f64).collect();
        let vals = par::map(&psis, |&psi| first_delay(p, q, circle.at(psi), tol).0);
        for k in 0..m {
            let prev = vals[(k + m - 1) % m];
            let next = vals[(k + 1) % m];
            if vals[k] <= prev && vals[k] <= next && vals[k].is_finite() {
                scan.push((vals[k], ci, psis[k]));
            }
        }
    }
    scan.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scan_best = scan.first().map_or(f64::INFINITY, |s| s.0);

    if grid_best.0.is_infinite() && scan_best.is_infinite() {
        return Ok(ContinuumOutcome::NoCrossing);
    }

    // Stage 3: golden-section refinement in the boundary parameter.
    let mut seeds: Vec<(usize, f64)> = scan.iter().take(8).map(|s| (s.1, s.2)).collect();
    if grid_best.0.is_finite() {
        for (ci, c) in circles.iter().enumerate() {
            let d = grid_best.1 - c.center;
            if (d.norm() - c.radius).abs() <= 1e-6 * (1.0 + c.radius) {
                seeds.push((ci, d.arg()));
            }
        }
    }
    let step = TAU / cfg.boundary_samples.max(1) as f64;
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0), 0.0);
    for (ci, psi0) in seeds {
        let circle = circles[ci];
        let f = |psi: f64| first_delay(p, q, circle.at(psi), tol).0;
        let psi = golden_min(f, psi0 - 1.5 * step, psi0 + 1.5 * step, tol);
        let lambda = circle.at(psi);
        let (h, w) = first_delay(p, q, lambda, tol);
        if h < best.0 {
            best = (h, lambda, w);
        }
    }
    if grid_best.0 < best.0 {
        best = grid_best;
    }
    Ok(ContinuumOutcome::Crossing(ContinuumMinimizer {
        lambda: best.1,
        omega: best.2,
        h: best.0,
        grid_h: grid_best.0,
        boundary_scan_h: scan_best,
    }))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if (f1 - f2).abs() <= tol * 1e-3 * (1.0 + f1.abs()) && (b - a) < 1e-9 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Attaches a boundary-norm certificate at delay `h` to a report.
pub fn certify(
    sys: &DelaySystem,
    report: &mut StabilityReport,
    h: f64,
    grid: &GridConfig,
) -> Result<()> {
    report.certificate = Some(hinf_boundary_norm(sys, h, grid)?);
    Ok(())
}
