//! Acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that the lines appear in order. The
//! process fails only when a criterion's outcome differs from the expectation
//! recorded in `EXPECTED_FAIL`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use delay_margin::stability::{
    hinf_boundary_norm, neutral_demo, operator_margin, tail_radius, unbounded_a_demo, GridConfig,
    MarginConfig,
};
use delay_margin::walton_marshall::{analyze_lambda, crossing_delays};
use delay_margin::zen::{
    adjoint_samples, verify_isometry, verify_multiplier, MeasureDescriptor, QuadConfig,
    RationalFunction, RationalMatrix, SignalTerm, TestSignal, Transform,
};
use delay_margin::{Complex64, ComplexMatrix, DelaySystem, Polynomial, SpectrumDescriptor, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{poly, random_hurwitz, random_unitary, rectangle_count};

/// The disk target 2π/(3√3) assumes the worst spectral value is
/// λ = 2. Points of the boundary circle away from the real axis cross
/// earlier: λ ≈ 1.81375 − 0.58121i gives h ≈ 1.1187552 at ω ≈ 1.62098, and
/// the brute-force oracle in `common` agrees. The criterion is checked as
/// stated and is expected to fail; `disk-oracle` checks the true infimum.
const EXPECTED_FAIL: &[&str] = &["disk-spectrum"];

const MARGIN_TOL: f64 = 1e-9;
const CONTINUUM_TOL: f64 = 1e-6;
const MINIMIZER_TOL: f64 = 1e-4;
const NEAR_SINGULAR: f64 = 1e3;
const UNBOUNDED_TOL: f64 = 1e-6;
const ISOMETRY_TOL: f64 = 1e-6;
const CONTRACTIVE_TOL: f64 = 1e-6;
const ADJOINT_TOL: f64 = 1e-6;
const ATTAINMENT_TOL: f64 = 1e-3;
const RECONSTRUCT_TOL: f64 = 1e-6;
const SCHUR_TOL: f64 = 1e-8;
const DISK_ORACLE_MARGIN: f64 = 1.118_755_156_7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn timed<F: FnOnce() -> Outcome>(limit: Duration, f: F) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if el > limit {
        o.pass = false;
    }
    o.detail = format!(
        "{} [{:.3}s, limit {}s]",
        o.detail,
        el.as_secs_f64(),
        limit.as_secs_f64()
    );
    o
}

fn triangular() -> DelaySystem {
    let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]])
        .unwrap();
    DelaySystem::new(
        poly(&[0.0, 1.0]),
        poly(&[1.0]),
        SpectrumDescriptor::Matrix { matrix: m },
    )
    .unwrap()
}

fn triangular_matrix() -> Outcome {
    timed(Duration::from_secs(1), || {
        let r = operator_margin(&triangular(), 2.0, &MarginConfig::default()).unwrap();
        let margin_of = |l: f64| {
            r.per_lambda
                .iter()
                .find(|x| (x.lambda - c(l, 0.0)).norm() < 1e-9)
                .map(|x| x.margin)
                .unwrap_or(f64::NAN)
        };
        let (m1, m2) = (margin_of(1.0), margin_of(2.0));
        let dirs = r
            .per_lambda
            .iter()
            .flat_map(|x| &x.events)
            .all(|e| e.direction == 1);
        let pass = (r.margin - PI / 4.0).abs() <= MARGIN_TOL
            && (m1 - PI / 2.0).abs() <= MARGIN_TOL
            && (m2 - PI / 4.0).abs() <= MARGIN_TOL
            && dirs;
        check(
            pass,
            format!(
                "margin {:.12} (pi/4), lambda=1 {:.12}, lambda=2 {:.12}, directions +1: {dirs}",
                r.margin, m1, m2
            ),
        )
    })
}

fn normal_matrix() -> Outcome {
    timed(Duration::from_secs(1), || {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[1.0, 1.0]]).unwrap();
        let sys = DelaySystem::new(
            poly(&[0.0, 1.0]),
            poly(&[1.0]),
            SpectrumDescriptor::Matrix { matrix: m },
        )
        .unwrap();
        let r = operator_margin(&sys, 2.0, &MarginConfig::default()).unwrap();
        let r2 = 2f64.sqrt();
        let (lo, hi) = (PI / (4.0 * r2), 3.0 * PI / (4.0 * r2));
        let table = [
            (c(1.0, 1.0), r2, hi),
            (c(1.0, 1.0), -r2, lo),
            (c(1.0, -1.0), r2, lo),
            (c(1.0, -1.0), -r2, hi),
        ];
        let mut ok = true;
        let mut got = Vec::new();
        for (l, w, h) in table {
            let d = crossing_delays(&poly(&[0.0, 1.0]), &poly(&[1.0]), l, w, 2.0, 1e-9).unwrap();
            let in_report = r
                .per_lambda
                .iter()
                .filter(|x| (x.lambda - l).norm() < 1e-9)
                .flat_map(|x| &x.events)
                .any(|e| (e.omega - w).abs() < 1e-9 && (e.h - h).abs() <= MARGIN_TOL);
            ok &= d.first().map_or(false, |d0| (d0 - h).abs() <= MARGIN_TOL) && in_report;
            got.push(format!("{:.6}", d.first().copied().unwrap_or(f64::NAN)));
        }
        let pass = (r.margin - lo).abs() <= MARGIN_TOL && ok;
        check(
            pass,
            format!(
                "margin {:.12} (pi/(4 sqrt 2)), delays [{}]",
                r.margin,
                got.join(", ")
            ),
        )
    })
}

fn disk_system() -> DelaySystem {
    DelaySystem::new(
        poly(&[1.0, 1.0]),
        poly(&[1.0]),
        SpectrumDescriptor::disk(c(1.0, 0.0), 1.0),
    )
    .unwrap()
    .with_norm(2.0)
    .unwrap()
}

fn disk_spectrum() -> Outcome {
    timed(Duration::from_secs(10), || {
        let r = operator_margin(&disk_system(), 2.0, &MarginConfig::default()).unwrap();
        let target = 2.0 * PI / (3.0 * 3f64.sqrt());
        let m = r.minimizer.unwrap();
        let on_circle = ((m.lambda - 1.0).norm() - 1.0).abs() <= MINIMIZER_TOL;
        let pass = (r.margin - target).abs() <= CONTINUUM_TOL
            && (m.lambda - 2.0).norm() <= MINIMIZER_TOL
            && on_circle;
        check(
            pass,
            format!(
                "margin {:.10} vs target {:.10}; minimizer {:.6}{:+.6}i (|lambda-2| = {:.3e}), on circle: {on_circle}",
                r.margin,
                target,
                m.lambda.re,
                m.lambda.im,
                (m.lambda - 2.0).norm()
            ),
        )
    })
}

fn disk_oracle() -> Outcome {
    timed(Duration::from_secs(10), || {
        let r = operator_margin(&disk_system(), 2.0, &MarginConfig::default()).unwrap();
        let (oracle, lam) = common::disk_margin_oracle();
        let m = r.minimizer.unwrap();
        let on_circle = ((m.lambda - 1.0).norm() - 1.0).abs() <= MINIMIZER_TOL;
        // conjugate minimizers are equivalent
        let near = (m.lambda - lam).norm().min((m.lambda - lam.conj()).norm());
        let pass = (r.margin - oracle).abs() <= CONTINUUM_TOL
            && (oracle - DISK_ORACLE_MARGIN).abs() <= CONTINUUM_TOL
            && near <= 1e-3
            && on_circle;
        check(
            pass,
            format!("margin {:.10} vs brute force {:.10}; minimizer distance {:.2e}, on circle: {on_circle}", r.margin, oracle, near),
        )
    })
}

fn hinf_cross_validation() -> Outcome {
    timed(Duration::from_secs(5), || {
        let sys = triangular();
        let cfg = GridConfig::default();
        let below = hinf_boundary_norm(&sys, PI / 8.0, &cfg).unwrap();
        let r = tail_radius(&sys, PI / 8.0).unwrap();
        // tail validity: ‖G(s)‖ ≤ 1 on |s| = R, Re s ≥ 0
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m =
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]])
                .unwrap();
        let tail_ok = (0..1000).all(|_| {
            let s = Complex64::from_polar(r, rng.gen_range(-PI / 2.0..=PI / 2.0));
            let e = (-s * (PI / 8.0)).exp();
            let smin = *m.shifted(s, e).singular_values().last().unwrap();
            1.0 / smin <= 1.0 + 1e-12
        });
        let finite = below.sup_estimate.is_finite() && below.rhp_zero_count == Some(0);
        let past = hinf_boundary_norm(&sys, PI / 4.0 + 1e-3, &cfg);
        let (past_ok, past_detail) = match &past {
            Ok(p) => (
                p.sup_estimate > NEAR_SINGULAR && (p.argmax_omega.abs() - 2.0).abs() < 0.05,
                format!(
                    "sup {:.3e} at omega {:.4}, rhp zeros {:?}",
                    p.sup_estimate, p.argmax_omega, p.rhp_zero_count
                ),
            ),
            Err(e) => (
                matches!(e, delay_margin::Error::SingularOnGrid { .. }),
                format!("{e}"),
            ),
        };
        check(
            finite && tail_ok && past_ok,
            format!(
                "h=pi/8: sup {:.6} (R = {:.4}, tail valid: {tail_ok}); h=pi/4+1e-3: {past_detail}",
                below.sup_estimate, r
            ),
        )
    })
}

fn neutral() -> Outcome {
    let v = neutral_demo(20).unwrap();
    let increasing = v.windows(2).all(|w| w[1].abs_g > w[0].abs_g);
    let last = v[19].abs_g;
    check(
        increasing && last > 1e2,
        format!("strictly increasing: {increasing}, |G(s_20)| = {last:.3}"),
    )
}

fn unbounded() -> Outcome {
    let v = unbounded_a_demo(10).unwrap();
    let worst = v
        .iter()
        .map(|t| (t.sup - t.n as f64).abs())
        .fold(0.0, f64::max);
    check(
        worst <= UNBOUNDED_TOL,
        format!("max |sup_n - n| over n <= 10: {worst:.2e}"),
    )
}

fn term(coeff: f64, power: u32, rate: Complex64, component: usize) -> SignalTerm {
    SignalTerm {
        coeff: c(coeff, 0.0),
        power,
        rate,
        component,
    }
}

fn isometry_suite() -> Outcome {
    timed(Duration::from_secs(10), || {
        let cfg = QuadConfig::default();
        let measures = [
            ("delta0", MeasureDescriptor::dirac(0.0)),
            ("delta1", MeasureDescriptor::dirac(1.0)),
            ("leb[0,1]", MeasureDescriptor::lebesgue_on(0.0, 1.0)),
            (
                "delta0+leb",
                MeasureDescriptor::dirac(0.0).plus(MeasureDescriptor::lebesgue()),
            ),
            ("leb", MeasureDescriptor::lebesgue()),
        ];
        let signals = vec![
            TestSignal::scalar(0, 1.0),
            TestSignal::scalar(1, 1.0),
            TestSignal::scalar(2, 0.5),
            TestSignal {
                dim: 1,
                terms: vec![term(1.0, 1, c(1.0, 3.0), 0), term(-0.5, 2, c(2.0, -1.0), 0)],
            },
            TestSignal {
                dim: 2,
                terms: vec![term(1.0, 0, c(1.0, 0.0), 0), term(1.0, 1, c(2.0, 0.0), 1)],
            },
            TestSignal {
                dim: 2,
                terms: vec![term(2.0, 1, c(0.7, 2.0), 0), term(1.0, 3, c(1.5, 0.0), 1)],
            },
        ];
        let mut n = 0;
        let mut worst: f64 = 0.0;
        let mut failures = Vec::new();
        for (name, nu) in &measures {
            for (k, f) in signals.iter().enumerate() {
                match verify_isometry(f, nu, &cfg) {
                    Ok(r) => {
                        n += 1;
                        worst = worst.max(r.rel_err);
                    }
                    Err(delay_margin::Error::Divergent(_)) => {}
                    Err(e) => failures.push(format!("{name}/{k}: {e}")),
                }
            }
        }
        let a = verify_isometry(
            &TestSignal::scalar(0, 1.0),
            &MeasureDescriptor::dirac(0.0),
            &cfg,
        )
        .unwrap();
        let b = verify_isometry(
            &TestSignal::scalar(1, 1.0),
            &MeasureDescriptor::lebesgue(),
            &cfg,
        )
        .unwrap();
        let anchors = (a.lhs - PI).abs() <= ISOMETRY_TOL * PI
            && (a.rhs - PI).abs() <= ISOMETRY_TOL * PI
            && (b.lhs - PI / 4.0).abs() <= ISOMETRY_TOL * PI
            && (b.rhs - PI / 4.0).abs() <= ISOMETRY_TOL * PI;
        check(
            n >= 20 && worst <= ISOMETRY_TOL && anchors && failures.is_empty(),
            format!(
                "{n} finite pairs, worst rel_err {worst:.2e}, anchors ({:.10}, {:.10}) ({:.10}, {:.10}){}",
                a.lhs,
                a.rhs,
                b.lhs,
                b.rhs,
                if failures.is_empty() { String::new() } else { format!(", errors: {failures:?}") }
            ),
        )
    })
}

fn rf(num: &[f64], den: &[f64]) -> RationalFunction {
    RationalFunction::new(poly(num), poly(den))
}

fn multiplier_suite() -> Outcome {
    let cfg = QuadConfig::default();
    let blaschke = rf(&[-1.0, 1.0], &[1.0, 1.0]);
    let symbols: Vec<RationalMatrix> = vec![
        RationalMatrix::scalar(blaschke.clone()),
        RationalMatrix::scalar(RationalFunction::constant(c(0.5, -1.5))),
        RationalMatrix::scalar(rf(&[1.0], &[1.0, 1.0])),
        RationalMatrix::scalar(rf(&[2.0, 1.0], &[3.0, 1.0])),
        RationalMatrix::scalar(rf(&[1.0], &[1.0, 0.2, 1.0])),
        RationalMatrix::scalar(rf(&[4.0, -1.0], &[2.0, 3.0, 1.0])),
        RationalMatrix::scalar(rf(&[1.0, -2.0, 1.0], &[1.0, 2.0, 1.0])),
        RationalMatrix::diagonal(vec![blaschke.clone(), rf(&[1.0], &[1.0, 1.0])]),
        RationalMatrix::diagonal(vec![
            rf(&[0.0, 1.0], &[1.0, 1.0]),
            RationalFunction::constant(c(0.0, 0.8)),
        ]),
        RationalMatrix {
            n: 2,
            entries: vec![
                rf(&[1.0], &[1.0, 1.0]),
                rf(&[0.5], &[2.0, 1.0]),
                RationalFunction::constant(c(0.0, 0.0)),
                rf(&[-1.0, 1.0], &[1.0, 1.0]),
            ],
        },
    ];
    let measures = [
        MeasureDescriptor::dirac(0.0),
        MeasureDescriptor::dirac(0.5),
        MeasureDescriptor::lebesgue(),
    ];
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_residual: f64 = 0.0;
    let mut samples_used = 0;
    let mut errors = Vec::new();
    for (k, g) in symbols.iter().enumerate() {
        let f = TestSignal {
            dim: g.n,
            terms: (0..g.n)
                .map(|j| term(1.0 + j as f64, 1, c(1.0 + 0.5 * j as f64, 0.3), j))
                .collect(),
        }
        .laplace();
        for (mi, nu) in measures.iter().enumerate() {
            // kernels under the tail measure need a double quadrature; fewer samples there
            let count = if nu.has_tail() { 1 } else { 2 };
            let samples = adjoint_samples(nu, g.n, count, (k * 10 + mi) as u64);
            match verify_multiplier(g, &f, nu, &samples, &cfg) {
                Ok(r) => {
                    worst_excess = worst_excess.max(r.ratio - r.sup_g);
                    worst_residual = worst_residual.max(r.adjoint_residual);
                    samples_used += r.samples;
                }
                Err(e) => errors.push(format!("symbol {k}, measure {mi}: {e}")),
            }
        }
    }
    // near-optimal F for the Blaschke factor: mass concentrated near i·100
    let g = RationalMatrix::scalar(blaschke);
    let f = TestSignal {
        dim: 1,
        terms: vec![term(1.0, 1, c(1.0, -100.0), 0)],
    };
    let lt = f.laplace();
    debug_assert_eq!(lt.dim(), 1);
    let attain = verify_multiplier(&g, &lt, &MeasureDescriptor::lebesgue(), &[], &cfg).unwrap();
    let pass = worst_excess <= CONTRACTIVE_TOL
        && worst_residual <= ADJOINT_TOL
        && samples_used >= 50
        && symbols.len() >= 10
        && attain.ratio >= 1.0 - ATTAINMENT_TOL
        && errors.is_empty();
    check(
        pass,
        format!(
            "{} symbols, max(ratio - sup_G) {worst_excess:.2e}, adjoint residual {worst_residual:.2e} over {samples_used} samples, Blaschke ratio {:.6}{}",
            symbols.len(),
            attain.ratio,
            if errors.is_empty() { String::new() } else { format!(", errors: {errors:?}") }
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // root reconstruction
    let mut worst_rec: f64 = 0.0;
    for _ in 0..100 {
        let deg = rng.gen_range(1..=12);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p = Polynomial::from_real(&coeffs);
        if p.degree() == 0 {
            continue;
        }
        let roots = p.roots(1e-12).unwrap().expanded();
        let rebuilt = Polynomial::from_roots(&roots).scale(p.leading());
        let num: f64 = p
            .coeffs()
            .iter()
            .zip(rebuilt.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_rec = worst_rec.max(num / p.norm());
    }

    // Schur invariance
    let mut worst_schur: f64 = 0.0;
    for _ in 0..10 {
        let n = rng.gen_range(2..=4);
        let data: Vec<Complex64> = (0..n * n)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let m = ComplexMatrix::new(n, data).unwrap();
        let u = random_unitary(n, &mut rng);
        let conj = u.conj_transpose().matmul(&m).matmul(&u);
        let p = poly(&[3.0, 1.0]);
        let q = poly(&[1.0]);
        let a = operator_margin(
            &DelaySystem::new(
                p.clone(),
                q.clone(),
                SpectrumDescriptor::Matrix { matrix: m },
            )
            .unwrap(),
            5.0,
            &MarginConfig::default(),
        )
        .unwrap();
        let b = operator_margin(
            &DelaySystem::new(p, q, SpectrumDescriptor::Matrix { matrix: conj }).unwrap(),
            5.0,
            &MarginConfig::default(),
        )
        .unwrap();
        let d = if a.margin.is_infinite() && b.margin.is_infinite() {
            0.0
        } else {
            (a.margin - b.margin).abs()
        };
        worst_schur = worst_schur.max(d);
    }

    // conjugation symmetry
    let mut symmetric = true;
    for _ in 0..20 {
        let p = poly(&random_hurwitz(rng.gen_range(1..=4), &mut rng));
        let q = poly(&[rng.gen_range(-2.0..2.0)]);
        let lr = rng.gen_range(0.5..4.0);
        let real = analyze_lambda(&p, &q, c(lr, 0.0), 6.0, 1e-9).unwrap();
        for e in &real.events {
            symmetric &= real.events.iter().any(|o| {
                (o.omega + e.omega).abs() < 1e-9
                    && (o.h - e.h).abs() < 1e-9
                    && o.direction == e.direction
            });
        }
        let l = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a = analyze_lambda(&p, &q, l, 6.0, 1e-9).unwrap();
        let b = analyze_lambda(&p, &q, l.conj(), 6.0, 1e-9).unwrap();
        symmetric &= a.windows.len() == b.windows.len()
            && a.windows
                .iter()
                .zip(&b.windows)
                .all(|(x, y)| (x.start - y.start).abs() < 1e-9 && (x.end - y.end).abs() < 1e-9);
        symmetric &= a.events.len() == b.events.len()
            && a.events.iter().all(|e| {
                b.events
                    .iter()
                    .any(|o| (o.omega + e.omega).abs() < 1e-9 && (o.h - e.h).abs() < 1e-9)
            });
    }

    // exhaustiveness against the argument principle
    let mut systems = 0;
    let mut mismatches = 0;
    let mut checks = 0;
    while systems < 25 {
        let deg = rng.gen_range(1..=4);
        let p = random_hurwitz(deg, &mut rng);
        let dq = rng.gen_range(0..deg);
        let q: Vec<f64> = (0..=dq).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let l = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let r = analyze_lambda(&poly(&p), &poly(&q), l, 4.0, 1e-9).unwrap();
        if r.status == Status::Degenerate {
            continue;
        }
        systems += 1;
        for k in 0..=40 {
            let h = 4.0 * k as f64 / 40.0 + 1e-4;
            if r.events.iter().any(|e| (e.h - h).abs() < 2e-3) || h > 4.0 {
                continue;
            }
            checks += 1;
            if r.rhp_count_at(h) != Some(rectangle_count(&p, &q, l, h)) {
                mismatches += 1;
            }
        }
    }

    let pass =
        worst_rec <= RECONSTRUCT_TOL && worst_schur <= SCHUR_TOL && symmetric && mismatches == 0;
    check(
        pass,
        format!(
            "reconstruction {worst_rec:.2e}, Schur {worst_schur:.2e}, conjugation symmetric: {symmetric}, exhaustiveness {mismatches} mismatches in {checks} delays over {systems} systems"
        ),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("triangular-matrix", triangular_matrix),
        ("normal-matrix", normal_matrix),
        ("disk-spectrum", disk_spectrum),
        ("disk-oracle", disk_oracle),
        ("hinf-cross-validation", hinf_cross_validation),
        ("neutral-demo", neutral),
        ("unbounded-a-demo", unbounded),
        ("zen-isometry", isometry_suite),
        ("multiplier", multiplier_suite),
        ("property-suites", property_suites),
    ];
    let mut unexpected = 0;
    for (name, f) in criteria {
        let o = f();
        let expected_fail = EXPECTED_FAIL.contains(&name);
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if o.pass == expected_fail {
            unexpected += 1;
            println!("  unexpected outcome for {name}");
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
