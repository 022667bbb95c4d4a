//! Acceptance gate. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catint::algebra::LambdaAction;
use catint::engine::{random_step, theta, LimitOptions};
use catint::measure::{BoxMeasure, Distribution, DistributionMeasure, SplitScheme};
use catint::scalar::{Rational, Scalar};
use catint::stepfn::{Convention, StepFunction};
use catint::targets::{
    antiderive, fourier_coefficient, fourier_coefficient_at, integrate, sampling_error_l1, weak_derivative, Integrand,
    IntegrationTarget,
};
use catint::verify::{target_registry, InequalitySuite, Suite};

type RationalFn = fn(&Rational) -> Rational;
type RealFn = fn(f64) -> f64;
type Criterion = fn() -> Outcome;

const SEED: u64 = 20_240_607;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn squared<S: Scalar>() -> DistributionMeasure<S> {
    DistributionMeasure::new(
        Distribution::Polynomial { coeffs: vec![S::zero(), S::zero(), S::one()] },
        SplitScheme::unit_interval(),
    )
    .unwrap()
}

fn target(bm: BoxMeasure<Rational>) -> IntegrationTarget<Rational> {
    IntegrationTarget::new(LambdaAction::ground(), bm).unwrap()
}

/// `Σ k_cell Π_d (F(x_{i_d+1}) − F(x_{i_d}))` on `[0,1]^n` split at midpoints,
/// with `x_i = i/2^u`.
fn hand_sum(f: &StepFunction<Rational>, dist: fn(&Rational) -> Rational) -> Rational {
    let side = 1i64 << f.level();
    let masses: Vec<Rational> = (0..side).map(|i| dist(&q(i + 1, side)) - dist(&q(i, side))).collect();
    let n = f.dim();
    let mut total = q(0, 1);
    for (flat, k) in f.coeffs().iter().enumerate() {
        let mut mass = q(1, 1);
        for d in 0..n {
            let i = (flat >> (f.level() as usize * (n - 1 - d))) & (side as usize - 1);
            mass *= masses[i].clone();
        }
        total += k.clone() * mass;
    }
    total
}

fn exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let configs: Vec<(usize, &str, RationalFn)> = vec![
        (1, "lebesgue", |x| x.clone()),
        (1, "x^2", |x| x.clone() * x.clone()),
        (2, "lebesgue", |x| x.clone()),
        (2, "x^2", |x| x.clone() * x.clone()),
    ];
    let targets: Vec<_> = configs
        .iter()
        .map(|&(n, name, _)| {
            if name == "x^2" {
                target(BoxMeasure::uniform(n, squared()).unwrap())
            } else {
                target(BoxMeasure::lebesgue_unit(n))
            }
        })
        .collect();
    let mut engine_time = Duration::ZERO;
    let mut mismatches = 0;
    let cases = 1000;
    for case in 0..cases {
        let which = case % configs.len();
        let (n, _, dist) = configs[which];
        let level = rng.gen_range(0..=6);
        let f = random_step(&mut rng, n, level);
        let start = Instant::now();
        let value = theta(&f, &targets[which]).unwrap();
        engine_time += start.elapsed();
        if value != hand_sum(&f, dist) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && engine_time < Duration::from_secs(10),
        format!("{mismatches} mismatches in {cases} cases, engine time {engine_time:.2?}"),
    )
}

fn unit_integral() -> Outcome {
    let cubic = DistributionMeasure::new(
        Distribution::Polynomial { coeffs: vec![q(0, 1), q(1, 1), q(0, 1), q(1, 1)] },
        SplitScheme::new(q(-1, 1), q(2, 1), q(0, 1)).unwrap(),
    )
    .unwrap();
    let third =
        DistributionMeasure::new(Distribution::Lebesgue, SplitScheme::new(q(0, 1), q(1, 1), q(1, 3)).unwrap()).unwrap();
    let power = DistributionMeasure::new(Distribution::Power { q: 3.0 }, SplitScheme::unit_interval()).unwrap();
    // (measure, μ(I_Λ) by hand)
    let cases: Vec<(BoxMeasure<Rational>, Rational)> = vec![
        (BoxMeasure::lebesgue_unit(1), q(1, 1)),
        (BoxMeasure::lebesgue_unit(2), q(1, 1)),
        (BoxMeasure::lebesgue_unit(3), q(1, 1)),
        (BoxMeasure::uniform(1, squared()).unwrap(), q(1, 1)),
        (BoxMeasure::uniform(2, squared()).unwrap(), q(1, 1)),
        (BoxMeasure::new(vec![cubic.clone()]).unwrap(), q(12, 1)),
        (BoxMeasure::new(vec![third.clone(), cubic.clone()]).unwrap(), q(12, 1)),
        (BoxMeasure::new(vec![power, cubic, third]).unwrap(), q(12, 1)),
    ];
    let opts = LimitOptions::for_backend::<Rational>(4);
    let mut bad = vec![];
    for (i, (bm, expected)) in cases.into_iter().enumerate() {
        let n = bm.dim();
        let t = target(bm);
        for level in 0..=2 {
            let one = StepFunction::constant(n, level, q(1, 1)).unwrap();
            let (value, _) = integrate(Integrand::Step(&one), &t, &opts).unwrap();
            if value != expected {
                bad.push(format!("measure {i} level {level}: {value} ≠ {expected}"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "8 measures, levels 0..2".to_string() } else { bad.join("; ") })
}

fn convergence_rate() -> Outcome {
    let t = IntegrationTarget::<Rational>::lebesgue(1);
    let id = |x: &[Rational]| Ok(x[0].clone());
    let half = q(1, 2);
    let at = |u: u32, convention| {
        let opts = LimitOptions { tol: 0.0, u_min: u, u_max: u, convention };
        integrate(Integrand::Sampler(&id), &t, &opts).unwrap().0
    };
    let mut bad = vec![];
    for u in 4..=16 {
        let err = (at(u, Convention::Left) - half.clone()).norm();
        if err > q(1, 1 << u) {
            bad.push(format!("left u={u}: error {err}"));
        }
    }
    for u in 1..=16 {
        if at(u, Convention::Midpoint) != half {
            bad.push(format!("midpoint u={u} not exact"));
        }
    }
    let start = Instant::now();
    at(16, Convention::Left);
    let left_time = start.elapsed();
    let start = Instant::now();
    at(16, Convention::Midpoint);
    let mid_time = start.elapsed();
    let slow = left_time.max(mid_time);
    outcome(bad.is_empty() && slow < Duration::from_secs(1), format!("{} violations, u=16 in {slow:.2?}", bad.len()))
}

fn nonuniform_measure() -> Outcome {
    let t = IntegrationTarget::new(LambdaAction::ground(), BoxMeasure::uniform(1, squared::<f64>()).unwrap()).unwrap();
    let id = |x: &[f64]| Ok(x[0]);
    let opts = LimitOptions { tol: 0.0, u_min: 14, u_max: 14, convention: Convention::Midpoint };
    let (value, _) = integrate(Integrand::Sampler(&id), &t, &opts).unwrap();
    let err = (value - 2.0 / 3.0).abs();
    outcome(err <= 1e-4, format!("value {value:.10} at u=14, error {err:.2e}"))
}

fn morphism_squares() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut lines = vec![];
    let mut failed = 0;
    for t in target_registry().into_iter().filter(|t| !t.is_zero()) {
        let bad = (0..500).filter(|_| !t.square_case(&mut rng, 6).unwrap_or(false)).count();
        failed += bad;
        lines.push(format!("{} {bad}/500", t.name()));
    }
    outcome(failed == 0, format!("failures: {}", lines.join(", ")))
}

fn uniqueness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut lines = vec![];
    let mut failed = 0;
    for t in target_registry() {
        let bad = (0..500)
            .filter(|_| {
                let unique = t.uniqueness_case(&mut rng, 6).unwrap_or(false);
                let zero = !t.is_zero() || t.zero_case(&mut rng, 6).unwrap_or(false);
                !(unique && zero)
            })
            .count();
        failed += bad;
        lines.push(format!("{} {bad}/500", t.name()));
    }
    outcome(failed == 0, format!("failures: {}", lines.join(", ")))
}

fn calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let t = IntegrationTarget::<Rational>::lebesgue(1);
    let mut bad = 0;
    for _ in 0..500 {
        let level = rng.gen_range(1..=10);
        let f: StepFunction<Rational> = random_step(&mut rng, 1, level);
        let big_f = antiderive(&f, level).unwrap();
        // running sums by hand
        let width = q(1, 1 << level);
        let mut running = q(0, 1);
        let mut sums = vec![running.clone()];
        for k in f.coeffs() {
            running += k.clone() * width.clone();
            sums.push(running.clone());
        }
        let ok =
            weak_derivative(&big_f) == f && big_f.values() == sums.as_slice() && big_f.end() == &theta(&f, &t).unwrap();
        if !ok {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} failures in 500 cases"))
}

fn inequalities() -> Outcome {
    let report = InequalitySuite.run(1000, &mut ChaCha8Rng::seed_from_u64(SEED + 8));
    outcome(
        report.ok() && report.cases == 4000,
        format!("{} violations in {} checks (4 inequalities × 1000)", report.failed, report.cases),
    )
}

fn fourier() -> Outcome {
    let start = Instant::now();
    let one = StepFunction::<f64>::one(1);
    let opts = LimitOptions { tol: 1e-12, u_min: 1, u_max: 12, convention: Convention::Midpoint };
    let c0 = fourier_coefficient(Integrand::Step(&one), 0, &opts).unwrap().value;
    let square = StepFunction::new(1, 1, vec![1.0, -1.0]).unwrap();
    let c1 = fourier_coefficient_at(Integrand::Step(&square), 1, 12, Convention::Midpoint).unwrap();
    let elapsed = start.elapsed();
    let e0 = (c0 - Complex64::new(1.0, 0.0)).norm();
    let e1 = (c1 - Complex64::new(0.0, -2.0 / PI)).norm();
    outcome(
        e0 <= 4.0 * f64::EPSILON && e1 <= 1e-3 && elapsed < Duration::from_secs(1),
        format!("|c0 − 1| = {e0:.1e}, |c1 + 2i/π| = {e1:.1e}, {elapsed:.2?}"),
    )
}

fn density() -> Outcome {
    let t = IntegrationTarget::<f64>::lebesgue(1);
    let polys: [(&str, RealFn); 3] = [("x", |x| x), ("x^2", |x| x * x), ("2x-1", |x| 2.0 * x - 1.0)];
    let mut lines = vec![];
    let mut ok = true;
    for (name, p) in polys {
        let g = move |x: &[f64]| Ok(p(x[0]));
        let errors: Vec<f64> =
            (1..=14).map(|u| sampling_error_l1(&g, &t, u, Convention::Midpoint, 4).unwrap()).collect();
        let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
        let last = *errors.last().unwrap();
        ok &= monotone && last < 1e-3;
        lines.push(format!("{name}: monotone {monotone}, u=14 error {last:.1e}"));
    }
    outcome(ok, lines.join("; "))
}

fn gamma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 11);
    let third =
        DistributionMeasure::new(Distribution::Lebesgue, SplitScheme::new(q(0, 1), q(1, 1), q(1, 3)).unwrap()).unwrap();
    let measures = [
        ("n=1 xi=1/2", BoxMeasure::lebesgue_unit(1)),
        ("n=1 xi=1/3", BoxMeasure::uniform(1, third.clone()).unwrap()),
        ("n=2 xi=1/2", BoxMeasure::lebesgue_unit(2)),
        ("n=2 xi=1/3", BoxMeasure::uniform(2, third).unwrap()),
    ];
    let mut bad = vec![];
    for (name, bm) in &measures {
        let n = bm.dim();
        for level in 1..=8u32 {
            let f: StepFunction<Rational> = random_step(&mut rng, n, level);
            let parts = f.split().unwrap();
            if StepFunction::juxtapose(&parts).unwrap() != f {
                bad.push(format!("{name} level {level}: juxtapose ∘ split"));
            }
            let parts: Vec<StepFunction<Rational>> = (0..1 << n).map(|_| random_step(&mut rng, n, level - 1)).collect();
            let whole = StepFunction::juxtapose(&parts).unwrap();
            if whole.split().unwrap() != parts {
                bad.push(format!("{name} level {level}: split ∘ juxtapose"));
            }
            // part j, read at x, is the whole read at the corner image of x
            for _ in 0..4 {
                let j = rng.gen_range(0..parts.len());
                let x: Vec<Rational> = (0..n).map(|_| q(rng.gen_range(0..1000), 1000)).collect();
                let image: Vec<Rational> = (0..n)
                    .map(|d| {
                        let scheme = &bm.axis(d).scheme;
                        if (j >> (n - 1 - d)) & 1 == 1 {
                            scheme.kappa_b(&x[d])
                        } else {
                            scheme.kappa_a(&x[d])
                        }
                    })
                    .collect();
                if parts[j].eval_at(bm, &x).unwrap() != whole.eval_at(bm, &image).unwrap() {
                    bad.push(format!("{name} level {level}: corner {j} misplaced"));
                }
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "4 configurations, levels 1..8".into() } else { bad.join("; ") })
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("exactness on step functions", exactness),
        ("unit integral", unit_integral),
        ("convergence rate", convergence_rate),
        ("nonuniform measure", nonuniform_measure),
        ("morphism squares", morphism_squares),
        ("uniqueness", uniqueness),
        ("calculus round trip", calculus),
        ("inequality suite", inequalities),
        ("fourier coefficients", fourier),
        ("density check", density),
        ("juxtaposition isomorphism", gamma),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name}: {} [{:.2?}]", i + 1, o.detail, start.elapsed());
        if !o.pass {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
