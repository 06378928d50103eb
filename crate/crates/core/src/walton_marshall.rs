//! Walton–Marshall sweep of `P(s) + λ Q(s) e^{-sh}` in the delay `h` for a
//! single complex `λ`.
//!
//! Roots can only reach the imaginary axis at frequencies solving
//! `|P(iω)|² = |λ|² |Q(iω)|²`, which does not involve `h`. At each such `ω` the
//! delays form an arithmetic progression, and the sign of
//! `Re (1/s)[Q'/Q - P'/P]` at `s = iω` tells which way the root moves. Starting
//! from the right-half-plane root count at `h = 0`, the count is updated at every
//! crossing to obtain the stability windows.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::serde_util::inf_as_null;

/// Real crossing frequency together with its degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingFrequency {
    pub omega: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Count {
    /// Roots of `P + λQ` with `Re s ≥ -tol`, with multiplicity.
    pub count: usize,
    /// Some root lies within the tolerance band around the imaginary axis.
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    pub lambda: Complex64,
    pub omega: f64,
    pub h: f64,
    /// Sign of `Re ds/dh`; `0` for a tangential (degenerate) crossing.
    pub direction: i8,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    Degenerate,
}

/// Half-open delay interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    #[serde(with = "inf_as_null")]
    pub end: f64,
}

impl Window {
    pub fn contains(&self, h: f64) -> bool {
        h >= self.start && h < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaStabilityResult {
    pub lambda: Complex64,
    /// Closed right-half-plane root count at `h = 0`.
    pub n0: usize,
    /// Crossings in `[0, h_max]`, sorted by `h`.
    pub events: Vec<CrossingEvent>,
    /// Delay intervals in `[0, h_max]` with no closed right-half-plane root.
    pub windows: Vec<Window>,
    /// Supremum of the stability interval starting at `h = 0`; `+∞` (JSON
    /// `null`) when no crossing frequency exists.
    #[serde(with = "inf_as_null")]
    pub margin: f64,
    /// Stability for every `h ≥ 0` is certified (no crossing frequencies and
    /// `n0 = 0`).
    pub certified_all_h: bool,
    pub h_max: f64,
    pub status: Status,
    pub notes: Vec<String>,
}

impl LambdaStabilityResult {
    /// Right-half-plane root count just after delay `h`, reconstructed from
    /// `n0` and the events. `None` past a degenerate event or outside
    /// `[0, h_max]`.
    pub fn rhp_count_at(&self, h: f64) -> Option<i64> {
        if !(0.0..=self.h_max).contains(&h) {
            return None;
        }
        let mut c = self.n0 as i64;
        for e in self.events.iter().take_while(|e| e.h <= h) {
            if e.degenerate {
                return None;
            }
            c += e.direction as i64;
        }
        Some(c)
    }

    pub fn is_stable_at(&self, h: f64) -> bool {
        self.windows.iter().any(|w| w.contains(h))
    }
}

/// Errors unless `deg P > deg Q` (a zero `Q` counts as degree −∞).
pub fn check_retarded(p: &Polynomial, q: &Polynomial) -> Result<()> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !q.is_zero() && p.degree() <= q.degree() {
        return Err(Error::RetardedAssumptionViolated {
            deg_p: p.degree(),
            deg_q: q.degree(),
        });
    }
    Ok(())
}

fn count_rhp(poly: &Polynomial, tol: f64) -> Result<H0Count> {
    if poly.degree() == 0 {
        return Ok(H0Count {
            count: 0,
            boundary: false,
        });
    }
    let set = poly.roots(tol)?;
    let mut count = 0;
    let mut boundary = false;
    for &(r, m) in &set.roots {
        let band = tol * (1.0 + r.norm());
        if r.re >= -band {
            count += m;
        }
        if r.re.abs() <= band {
            boundary = true;
        }
    }
    Ok(H0Count { count, boundary })
}

/// Closed right-half-plane roots of `P(s) + λQ(s)` (the system at `h = 0`).
pub fn h0_rhp_count(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    tol: f64,
) -> Result<H0Count> {
    check_retarded(p, q)?;
    count_rhp(&(p + &q.scale(lambda)), tol)
}

/// `F(ω) = |P(iω)|² − ρ² |Q(iω)|²` as a real polynomial in `ω`.
pub fn crossing_polynomial(p: &Polynomial, q: &Polynomial, mod_lambda: f64) -> Polynomial {
    let pw = p.on_imaginary_axis();
    let qw = q.on_imaginary_axis();
    let f = &(&pw * &pw.conj())
        - &(&qw * &qw.conj()).scale(Complex64::new(mod_lambda * mod_lambda, 0.0));
    Polynomial::new(
        f.coeffs()
            .iter()
            .map(|c| Complex64::new(c.re, 0.0))
            .collect(),
    )
}

/// All real `ω` at which `P(s) + λQ(s)e^{-sh}` can have a root `s = iω` for
/// some `h`, given only `|λ|`.
pub fn crossing_frequencies(
    p: &Polynomial,
    q: &Polynomial,
    mod_lambda: f64,
    tol: f64,
) -> Result<Vec<CrossingFrequency>> {
    let f = crossing_polynomial(p, q, mod_lambda);
    let scale = p.norm().powi(2) + (mod_lambda * q.norm()).powi(2);
    if f.coeffs().iter().all(|c| c.norm() <= tol * scale) {
        return Err(Error::IdenticallyZero);
    }
    if f.degree() == 0 {
        return Ok(Vec::new());
    }
    let roots = f.real_roots_of_real_poly(tol)?;
    Ok(roots
        .into_iter()
        .map(|(omega, mult)| {
            let s = Complex64::new(0.0, omega);
            let vanishes = |poly: &Polynomial| {
                poly.eval(s).norm() <= tol * poly.eval_scale(s).max(f64::MIN_POSITIVE)
            };
            CrossingFrequency {
                omega,
                degenerate: mult > 1 || vanishes(p) || (!q.is_zero() && vanishes(q)),
            }
        })
        .collect())
}

/// Smallest `h ≥ 0` with `e^{-iωh} = z` for unit `z`.
pub(crate) fn principal_delay(z: Complex64, omega: f64) -> f64 {
    // ωh ≡ -arg z (mod 2π)
    let phase = -z.arg();
    let t = if omega > 0.0 { phase } else { -phase };
    let h = t.rem_euclid(TAU) / omega.abs();
    // rem_euclid can return exactly 2π for tiny negative inputs
    if h * omega.abs() >= TAU {
        0.0
    } else {
        h
    }
}

fn unit_target(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    omega: f64,
    tol: f64,
) -> Result<Complex64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateCrossing("lambda = 0".into()));
    }
    if omega == 0.0 {
        return Err(Error::DegenerateCrossing("omega = 0".into()));
    }
    let s = Complex64::new(0.0, omega);
    let pv = p.eval(s);
    let qv = q.eval(s);
    if qv.norm() <= tol * q.eval_scale(s) || pv.norm() <= tol * p.eval_scale(s) {
        return Err(Error::DegenerateCrossing(format!(
            "P or Q vanishes at i*{omega}"
        )));
    }
    let z = -pv / (lambda * qv);
    if (z.norm() - 1.0).abs() > 1e3 * tol.max(f64::EPSILON) {
        return Err(Error::DegenerateCrossing(format!(
            "|P(iw)| != |lambda||Q(iw)| at w = {omega} (ratio {})",
            z.norm()
        )));
    }
    Ok(z / z.norm())
}

/// All `h ∈ [0, h_max]` with `P(iω) + λQ(iω)e^{-iωh} = 0`, ascending.
pub fn crossing_delays(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    omega: f64,
    h_max: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let z = unit_target(p, q, lambda, omega, tol)?;
    let h0 = principal_delay(z, omega);
    let period = TAU / omega.abs();
    Ok((0..)
        .map(|k| h0 + period * k as f64)
        .take_while(|&h| h <= h_max)
        .collect())
}

/// Sign of `Re ds/dh` at a crossing through `s = iω`. Independent of `λ` and
/// of which delay in the progression is considered.
pub fn crossing_direction(p: &Polynomial, q: &Polynomial, omega: f64, tol: f64) -> Result<i8> {
    if omega == 0.0 {
        return Err(Error::DegenerateCrossing("omega = 0".into()));
    }
    let s = Complex64::new(0.0, omega);
    let (pv, dp) = p.eval_with_derivative(s);
    let (qv, dq) = q.eval_with_derivative(s);
    if pv.norm() <= tol * p.eval_scale(s) || qv.norm() <= tol * q.eval_scale(s) {
        return Err(Error::DegenerateCrossing(format!(
            "P or Q vanishes at i*{omega}"
        )));
    }
    let a = dq / qv;
    let b = dp / pv;
    let value = (a - b) / s;
    let magnitude = (a.norm() + b.norm()) / omega.abs();
    Ok(if value.re.abs() <= tol * magnitude {
        0
    } else if value.re > 0.0 {
        1
    } else {
        -1
    })
}

/// Smallest crossing delay of `λ` over all nonzero crossing frequencies, as
/// `(h, ω)`. A permanent root on the imaginary axis reports `h = 0`; `None`
/// means no crossing frequency exists.
pub fn first_crossing(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let mut best: Option<(f64, f64)> = None;
    for f in crossing_frequencies(p, q, lambda.norm(), tol)? {
        if f.omega.abs() <= tol {
            let at0 = p.coeffs()[0] + lambda * q.coeffs()[0];
            let scale = p.coeffs()[0].norm() + lambda.norm() * q.coeffs()[0].norm();
            if at0.norm() <= tol * scale.max(f64::MIN_POSITIVE) {
                return Ok(Some((0.0, 0.0)));
            }
            continue;
        }
        let h = match unit_target(p, q, lambda, f.omega, tol) {
            Ok(z) => principal_delay(z, f.omega),
            Err(_) => 0.0,
        };
        if best.map_or(true, |(bh, _)| h < bh) {
            best = Some((h, f.omega));
        }
    }
    Ok(best)
}

/// Full sweep for one `λ` over `h ∈ [0, h_max]`.
pub fn analyze_lambda(
    p: &Polynomial,
    q: &Polynomial,
    lambda: Complex64,
    h_max: f64,
    tol: f64,
) -> Result<LambdaStabilityResult> {
    check_retarded(p, q)?;
    if !(h_max >= 0.0) || !h_max.is_finite() {
        return Err(Error::InvalidInput("h_max must be finite and >= 0".into()));
    }
    let mut notes = Vec::new();
    let mut out = LambdaStabilityResult {
        lambda,
        n0: 0,
        events: Vec::new(),
        windows: Vec::new(),
        margin: 0.0,
        certified_all_h: false,
        h_max,
        status: Status::Exact,
        notes: Vec::new(),
    };

    if lambda == Complex64::new(0.0, 0.0) || q.is_zero() {
        // No delay term: pure polynomial stability.
        let c = count_rhp(p, tol)?;
        out.n0 = c.count;
        if c.boundary {
            out.status = Status::Degenerate;
            notes.push("root of P on the imaginary axis".into());
        }
        if c.count == 0 {
            out.windows.push(Window {
                start: 0.0,
                end: h_max,
            });
            out.margin = f64::INFINITY;
            out.certified_all_h = true;
        }
        out.notes = notes;
        return Ok(out);
    }

    let c0 = h0_rhp_count(p, q, lambda, tol)?;
    out.n0 = c0.count;
    if c0.boundary {
        out.status = Status::Degenerate;
        notes.push("root of P + lambda Q within tolerance of the imaginary axis at h = 0".into());
    }

    let freqs = crossing_frequencies(p, q, lambda.norm(), tol)?;
    let mut events = Vec::new();
    let mut first_event = f64::INFINITY;
    for f in &freqs {
        if f.omega.abs() <= tol {
            let s0 = p.eval(Complex64::new(0.0, 0.0)) + lambda * q.eval(Complex64::new(0.0, 0.0));
            let scale = p.coeffs()[0].norm() + lambda.norm() * q.coeffs()[0].norm();
            if s0.norm() <= tol * scale.max(f64::MIN_POSITIVE) {
                out.status = Status::Degenerate;
                out.n0 = out.n0.max(1);
                notes.push("root at s = 0 for every h".into());
                out.events.clear();
                out.margin = 0.0;
                out.notes = notes;
                return Ok(out);
            }
            continue;
        }
        let z = match unit_target(p, q, lambda, f.omega, tol) {
            Ok(z) => z,
            Err(e) => {
                out.status = Status::Degenerate;
                notes.push(format!("{e}; permanent root on the imaginary axis"));
                out.margin = 0.0;
                out.notes = notes;
                return Ok(out);
            }
        };
        let h0 = principal_delay(z, f.omega);
        first_event = first_event.min(h0);
        let (direction, dir_degenerate) = match crossing_direction(p, q, f.omega, tol) {
            Ok(0) => (0, true),
            Ok(d) => (d, false),
            Err(_) => (0, true),
        };
        let period = TAU / f.omega.abs();
        let mut h = h0;
        while h <= h_max {
            events.push(CrossingEvent {
                lambda,
                omega: f.omega,
                h,
                direction,
                degenerate: f.degenerate || dir_degenerate,
            });
            h += period;
        }
    }
    events.sort_by(|a, b| a.h.total_cmp(&b.h).then(a.omega.total_cmp(&b.omega)));

    // Sweep the root count through the events.
    let mut count = out.n0 as i64;
    let mut open: Option<f64> = if count == 0 && c0.boundary == false {
        Some(0.0)
    } else {
        None
    };
    let mut i = 0;
    let mut truncated = false;
    while i < events.len() {
        let h = events[i].h;
        let mut j = i;
        let mut delta = 0i64;
        let mut degenerate = false;
        while j < events.len() && events[j].h - h <= tol * (1.0 + h) {
            delta += events[j].direction as i64;
            degenerate |= events[j].degenerate;
            j += 1;
        }
        if degenerate {
            out.status = Status::Degenerate;
            notes.push(format!("degenerate crossing at h = {h}; windows truncated"));
            if let Some(start) = open.take() {
                out.windows.push(Window { start, end: h });
            }
            truncated = true;
            break;
        }
        count += delta;
        if count < 0 {
            out.status = Status::Degenerate;
            notes.push(format!(
                "root count became negative at h = {h}; windows truncated"
            ));
            if let Some(start) = open.take() {
                out.windows.push(Window { start, end: h });
            }
            truncated = true;
            break;
        }
        match (open, count == 0) {
            (Some(start), false) => {
                if h > start {
                    out.windows.push(Window { start, end: h });
                }
                open = None;
            }
            (None, true) => open = Some(h),
            _ => {}
        }
        i = j;
    }
    if !truncated {
        if let Some(start) = open {
            if start < h_max || (start == 0.0 && h_max == 0.0) {
                out.windows.push(Window { start, end: h_max });
            }
        }
    }

    out.margin = if out.n0 > 0 || c0.boundary {
        0.0
    } else {
        first_event
    };
    out.certified_all_h = out.n0 == 0 && !c0.boundary && first_event.is_infinite();
    if out.certified_all_h {
        notes.push("no crossing frequencies: stable for every h >= 0".into());
    }
    out.events = events;
    out.notes = notes;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }
    fn s() -> Polynomial {
        Polynomial::from_real(&[0.0, 1.0])
    }
    fn s_plus_1() -> Polynomial {
        Polynomial::from_real(&[1.0, 1.0])
    }
    fn one() -> Polynomial {
        Polynomial::from_real(&[1.0])
    }
    const TOL: f64 = 1e-9;

    #[test]
    fn h0_counts() {
        assert_eq!(
            h0_rhp_count(&s(), &one(), c(2.0, 0.0), TOL).unwrap().count,
            0
        );
        assert_eq!(
            h0_rhp_count(&s(), &one(), c(-1.0, 0.0), TOL).unwrap().count,
            1
        );
        assert_eq!(
            h0_rhp_count(&s_plus_1(), &one(), c(2.0, 0.0), TOL)
                .unwrap()
                .count,
            0
        );
        assert!(matches!(
            h0_rhp_count(&one(), &s(), c(1.0, 0.0), TOL),
            Err(Error::RetardedAssumptionViolated { .. })
        ));
        assert!(
            h0_rhp_count(&s(), &one(), c(0.0, 0.0), TOL)
                .unwrap()
                .boundary
        );
    }

    #[test]
    fn frequency_examples() {
        let f = crossing_frequencies(&s(), &one(), 2.0, TOL).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[0].omega + 2.0).abs() < 1e-14 && (f[1].omega - 2.0).abs() < 1e-14);
        let f = crossing_frequencies(&s(), &one(), 1.0, TOL).unwrap();
        assert!((f[0].omega + 1.0).abs() < 1e-14 && (f[1].omega - 1.0).abs() < 1e-14);
        let f = crossing_frequencies(&s_plus_1(), &one(), 2.0, TOL).unwrap();
        let r3 = 3f64.sqrt();
        assert!((f[0].omega + r3).abs() < 1e-14 && (f[1].omega - r3).abs() < 1e-14);
        assert!(f.iter().all(|x| !x.degenerate));
    }

    #[test]
    fn frequency_tangency_is_degenerate() {
        // |iw + 1|^2 = 1 + w^2 = |λ|^2 with |λ| = 1 → double root at ω = 0
        let f = crossing_frequencies(&s_plus_1(), &one(), 1.0, TOL).unwrap();
        assert_eq!(f.len(), 1);
        assert!(f[0].degenerate);
    }

    #[test]
    fn delay_examples() {
        let h = crossing_delays(&s(), &one(), c(2.0, 0.0), 2.0, 1.0, TOL).unwrap();
        assert_eq!(h.len(), 1);
        assert!((h[0] - PI / 4.0).abs() < 1e-15);
        let r2 = 2f64.sqrt();
        let h = crossing_delays(&s(), &one(), c(1.0, 1.0), r2, 2.0, TOL).unwrap();
        assert_eq!(h.len(), 1);
        assert!((h[0] - 3.0 * PI / (4.0 * r2)).abs() < 1e-14);
        let h = crossing_delays(&s(), &one(), c(1.0, 1.0), -r2, 2.0, TOL).unwrap();
        assert!((h[0] - PI / (4.0 * r2)).abs() < 1e-14);
    }

    #[test]
    fn delays_form_progression() {
        let h = crossing_delays(&s(), &one(), c(2.0, 0.0), 2.0, 10.0, TOL).unwrap();
        assert_eq!(h.len(), 3);
        for w in h.windows(2) {
            assert!((w[1] - w[0] - PI).abs() < 1e-13);
        }
    }

    #[test]
    fn delay_preconditions() {
        assert!(crossing_delays(&s(), &one(), c(2.0, 0.0), 1.0, 1.0, TOL).is_err());
        assert!(crossing_delays(&s(), &one(), c(0.0, 0.0), 2.0, 1.0, TOL).is_err());
        assert!(crossing_delays(&s(), &one(), c(2.0, 0.0), 0.0, 1.0, TOL).is_err());
    }

    #[test]
    fn direction_examples() {
        assert_eq!(crossing_direction(&s(), &one(), 2.0, TOL).unwrap(), 1);
        assert_eq!(crossing_direction(&s(), &one(), -1.0, TOL).unwrap(), 1);
        assert_eq!(
            crossing_direction(&s_plus_1(), &one(), 3f64.sqrt(), TOL).unwrap(),
            1
        );
        assert!(crossing_direction(&s(), &one(), 0.0, TOL).is_err());
    }

    #[test]
    fn analyze_examples() {
        let r = analyze_lambda(&s(), &one(), c(2.0, 0.0), 2.0, TOL).unwrap();
        assert!((r.margin - PI / 4.0).abs() < 1e-14);
        assert_eq!(r.windows.len(), 1);
        assert!((r.windows[0].end - PI / 4.0).abs() < 1e-14);
        assert_eq!(r.status, Status::Exact);

        let r = analyze_lambda(&s(), &one(), c(1.0, -1.0), 2.0, TOL).unwrap();
        assert!((r.margin - PI / (4.0 * 2f64.sqrt())).abs() < 1e-14);

        let hurwitz = Polynomial::from_real(&[2.0, 2.0, 1.0]);
        let r = analyze_lambda(&hurwitz, &Polynomial::zero(), c(3.0, 0.0), 5.0, TOL).unwrap();
        assert!(r.margin.is_infinite() && r.certified_all_h && r.n0 == 0);
        assert!(r.events.is_empty());
    }

    #[test]
    fn no_crossing_certifies_all_delays() {
        // |iω + 2|^2 = 4 + ω^2 > 1 = |λ|^2 for all ω
        let p = Polynomial::from_real(&[2.0, 1.0]);
        let r = analyze_lambda(&p, &one(), c(0.0, 1.0), 3.0, TOL).unwrap();
        assert!(r.certified_all_h);
        assert_eq!(
            r.windows,
            vec![Window {
                start: 0.0,
                end: 3.0
            }]
        );
    }

    #[test]
    fn unstable_at_zero_has_no_window_at_zero() {
        let r = analyze_lambda(&s(), &one(), c(-1.0, 0.0), 5.0, TOL).unwrap();
        assert_eq!(r.n0, 1);
        assert_eq!(r.margin, 0.0);
        assert!(r.windows.iter().all(|w| !w.contains(0.0)));
    }

    #[test]
    fn real_lambda_events_pair_up() {
        let r = analyze_lambda(&s_plus_1(), &one(), c(2.0, 0.0), 10.0, TOL).unwrap();
        assert_eq!(r.events.len() % 2, 0);
        for pair in r.events.chunks(2) {
            assert!((pair[0].h - pair[1].h).abs() < 1e-12);
            assert!((pair[0].omega + pair[1].omega).abs() < 1e-12);
            assert_eq!(pair[0].direction, pair[1].direction);
        }
        assert_eq!(r.rhp_count_at(r.margin + 1e-6), Some(2));
    }

    #[test]
    fn neutral_is_rejected() {
        assert!(matches!(
            analyze_lambda(&s(), &s_plus_1(), c(1.0, 0.0), 1.0, TOL),
            Err(Error::RetardedAssumptionViolated { .. })
        ));
    }

    #[test]
    fn permanent_root_at_origin() {
        // s + 1 + λ with λ = -1 vanishes at s = 0 for every h
        let r = analyze_lambda(&s_plus_1(), &one(), c(-1.0, 0.0), 1.0, TOL).unwrap();
        assert_eq!(r.status, Status::Degenerate);
        assert!(r.windows.is_empty());
    }
}
