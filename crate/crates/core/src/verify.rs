//! Named invariant suites and the registry of shipped targets they exercise.
//!
//! Every suite draws its cases from a seeded ChaCha8 stream, so a suite name,
//! case count and seed determine the report byte for byte.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{lower_triangular, AlgebraElement, LambdaAction, TauMap};
use crate::engine::{
    random_scalar, random_step, theta, validate_target, verify_morphism_square, verify_uniqueness, TargetObject,
};
use crate::error::Result;
use crate::measure::{BoxMeasure, Distribution, DistributionMeasure, SplitScheme};
use crate::scalar::{Rational, Scalar};
use crate::stepfn::{Convention, StepFunction};
use crate::targets::{
    antiderive, sampling_error_l1, weak_derivative, AntiderivativeTarget, IntegrationTarget, PiecewiseLinear,
};

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failed: usize,
    /// The first few failures, for display.
    pub failures: Vec<String>,
}

const SHOWN_FAILURES: usize = 5;

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), cases: 0, failed: 0, failures: vec![] }
    }

    pub fn passed(&self) -> usize {
        self.cases - self.failed
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Records one case; `Ok(true)` passes, anything else fails.
    pub fn record(&mut self, what: impl FnOnce() -> String, outcome: Result<bool>) {
        self.cases += 1;
        let msg = match outcome {
            Ok(true) => return,
            Ok(false) => what(),
            Err(e) => format!("{}: {e}", what()),
        };
        self.failed += 1;
        if self.failures.len() < SHOWN_FAILURES {
            self.failures.push(msg);
        }
    }

    fn merge(&mut self, other: SuiteReport) {
        self.cases += other.cases;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < SHOWN_FAILURES {
                self.failures.push(format!("{}: {f}", other.suite));
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} passed, {} failed of {}", self.suite, self.passed(), self.failed, self.cases)?;
        for msg in &self.failures {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// `F(x) = x²` on `[0,1]` split at `½`.
pub fn squared_axis<S: Scalar>() -> DistributionMeasure<S> {
    DistributionMeasure::new(
        Distribution::Polynomial { coeffs: vec![S::zero(), S::zero(), S::one()] },
        SplitScheme::unit_interval(),
    )
    .expect("x² is a distribution function")
}

/// Lebesgue on `[0,1]` split at `⅓`.
pub fn third_axis<S: Scalar>() -> DistributionMeasure<S> {
    DistributionMeasure::new(
        Distribution::Lebesgue,
        SplitScheme::new(S::zero(), S::one(), S::from_ratio(1, 3)).expect("0 < 1/3 < 1"),
    )
    .expect("Lebesgue is a distribution function")
}

/// The measures the suites integrate against, by name.
pub fn sample_measures<S: Scalar>(dim: usize) -> Vec<(&'static str, BoxMeasure<S>)> {
    vec![
        ("lebesgue", BoxMeasure::lebesgue_unit(dim)),
        ("x^2", BoxMeasure::uniform(dim, squared_axis()).expect("positive mass")),
        ("lebesgue xi=1/3", BoxMeasure::uniform(dim, third_axis()).expect("positive mass")),
    ]
}

/// A shipped target with its element type erased.
pub trait TargetHarness: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Morphism square on random parts of level at most `max_level`.
    fn square_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool>;

    /// `verify_uniqueness` on a random step function of level at most
    /// `max_level`.
    fn uniqueness_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool>;

    /// `θ(refine f) = θ(f)`.
    fn stability_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool>;

    fn validate(&self, trials: usize, seed: u64) -> Vec<String>;

    /// Whether `θ` must vanish identically.
    fn is_zero(&self) -> bool {
        false
    }

    /// `θ(f) = 0` on a random `f`; only meaningful when [`Self::is_zero`].
    fn zero_case(&self, _rng: &mut ChaCha8Rng, _max_level: u32) -> Result<bool> {
        Ok(true)
    }
}

/// Wraps any rational target as a [`TargetHarness`].
pub struct Harness<T> {
    name: String,
    target: T,
    zero: bool,
}

impl<T> Harness<T> {
    pub fn new(name: impl Into<String>, target: T) -> Self {
        Self { name: name.into(), target, zero: false }
    }

    pub fn zero(mut self) -> Self {
        self.zero = true;
        self
    }
}

impl<T: TargetObject<Rational>> TargetHarness for Harness<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.target.dim()
    }

    fn square_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool> {
        let level = rng.gen_range(0..=max_level);
        let n = self.target.dim();
        let parts: Vec<_> = (0..1usize << n).map(|_| random_step(rng, n, level)).collect();
        verify_morphism_square(&self.target, &parts)
    }

    fn uniqueness_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool> {
        let level = rng.gen_range(0..=max_level);
        verify_uniqueness(&random_step(rng, self.target.dim(), level), &self.target)
    }

    fn stability_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool> {
        let level = rng.gen_range(0..=max_level);
        let f: StepFunction<Rational> = random_step(rng, self.target.dim(), level);
        Ok(self.target.equal(&theta(&f, &self.target)?, &theta(&f.refine()?, &self.target)?))
    }

    fn validate(&self, trials: usize, seed: u64) -> Vec<String> {
        validate_target(&self.target, trials, seed).violations
    }

    fn is_zero(&self) -> bool {
        self.zero
    }

    fn zero_case(&self, rng: &mut ChaCha8Rng, max_level: u32) -> Result<bool> {
        let level = rng.gen_range(0..=max_level);
        let f = random_step(rng, self.target.dim(), level);
        Ok(self.target.norm(&theta(&f, &self.target)?) == 0.0)
    }
}

/// Every shipped target, over rationals, in a fixed order.
pub fn target_registry() -> Vec<Box<dyn TargetHarness>> {
    let mut out: Vec<Box<dyn TargetHarness>> = vec![];
    for dim in 1..=2 {
        for (label, bm) in sample_measures::<Rational>(dim) {
            let t = IntegrationTarget::new(LambdaAction::ground(), bm).expect("positive mass");
            out.push(Box::new(Harness::new(format!("integration {label} n={dim}"), t)));
        }
    }
    out.push(Box::new(Harness::new("antiderivative", AntiderivativeTarget::<Rational>::new())));
    let zero =
        IntegrationTarget::zero_unit(LambdaAction::ground(), BoxMeasure::lebesgue_unit(1)).expect("positive mass");
    out.push(Box::new(Harness::new("zero n=1", zero).zero()));
    out
}

/// A named invariant check over random cases.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport;
}

/// Suites by name, in a fixed order.
pub struct SuiteRegistry {
    suites: Vec<Box<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self { suites: vec![] }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ExactnessSuite));
        r.register(Box::new(UnitSuite));
        r.register(Box::new(SquareSuite));
        r.register(Box::new(UniquenessSuite));
        r.register(Box::new(StabilitySuite));
        r.register(Box::new(LinearitySuite));
        r.register(Box::new(CalculusSuite));
        r.register(Box::new(InequalitySuite));
        r.register(Box::new(GammaSuite));
        r.register(Box::new(TargetAxiomSuite));
        r.register(Box::new(DensitySuite));
        r
    }

    /// Adds a suite, replacing any suite of the same name.
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.retain(|s| s.name() != suite.name());
        self.suites.push(suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Suite> {
        self.suites.iter().map(|s| s.as_ref())
    }

    /// Runs `name` (or every suite for `"all"`), seeding suite `i` of the
    /// registry with `seed + i`.
    pub fn run(&self, name: &str, cases: usize, seed: u64) -> Option<Vec<SuiteReport>> {
        let selected: Vec<(usize, &dyn Suite)> = self
            .suites
            .iter()
            .enumerate()
            .filter(|(_, s)| name == "all" || s.name() == name)
            .map(|(i, s)| (i, s.as_ref()))
            .collect();
        if selected.is_empty() {
            return None;
        }
        Some(
            selected
                .into_iter()
                .map(|(i, s)| s.run(cases, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64))))
                .collect(),
        )
    }
}

fn step_upto(rng: &mut ChaCha8Rng, dim: usize, max_level: u32) -> StepFunction<Rational> {
    let level = rng.gen_range(0..=max_level);
    random_step(rng, dim, level)
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// Cells of `f` against `Σ k_cell μ(cell)`, with `μ(cell)` taken straight
/// from the distribution functions.
pub struct ExactnessSuite;

impl Suite for ExactnessSuite {
    fn name(&self) -> &'static str {
        "exactness"
    }

    fn description(&self) -> &'static str {
        "θ under integration equals the weighted cell sum"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let targets: Vec<_> = (1..=2)
            .flat_map(sample_measures::<Rational>)
            .map(|(label, bm)| (label, IntegrationTarget::new(LambdaAction::ground(), bm).expect("positive mass")))
            .collect();
        for case in 0..cases {
            let (label, t) = pick(rng, &targets);
            let level = rng.gen_range(0..=6);
            let f = random_step(rng, t.dim(), level);
            let outcome = (|| Ok(theta(&f, t)? == direct_sum(&f, t.measure())?))();
            report.record(|| format!("case {case}: {label} n={} level {level}", t.dim()), outcome);
        }
        report
    }
}

/// `Σ k_cell Π_d (F_d(b_d) − F_d(a_d))` with the breakpoints generated by
/// the split maps and `F_d` evaluated directly.
pub fn direct_sum<S: Scalar>(f: &StepFunction<S>, bm: &BoxMeasure<S>) -> Result<S> {
    let n = f.dim();
    let side = 1usize << f.level();
    let masses = (0..n)
        .map(|d| {
            let axis = bm.axis(d);
            let values =
                axis.scheme.breakpoints(f.level()).iter().map(|x| axis.dist.eval(x)).collect::<Result<Vec<S>>>()?;
            Ok(values.windows(2).map(|w| w[1].clone() - w[0].clone()).collect::<Vec<S>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = S::zero();
    for (flat, k) in f.coeffs().iter().enumerate() {
        let mass = (0..n).fold(S::one(), |m, d| {
            let i = (flat >> (f.level() as usize * (n - 1 - d))) & (side - 1);
            m * masses[d][i].clone()
        });
        total = total + k.clone() * mass;
    }
    Ok(total)
}

/// `θ(1) = μ(I_Λ)` for a range of measures.
pub struct UnitSuite;

impl UnitSuite {
    fn measures() -> Vec<(&'static str, BoxMeasure<Rational>)> {
        let cubic = DistributionMeasure::new(
            Distribution::Polynomial { coeffs: vec![q(0, 1), q(1, 1), q(0, 1), q(1, 1)] },
            SplitScheme::new(q(-1, 1), q(2, 1), q(0, 1)).expect("a < ξ < b"),
        )
        .expect("x + x³ is increasing");
        let power = DistributionMeasure::new(Distribution::Power { q: 3.0 }, SplitScheme::unit_interval()).expect("x³");
        let mut out = sample_measures(1);
        out.extend(sample_measures(2));
        out.push(("x+x^3 on [-1,2]", BoxMeasure::new(vec![cubic.clone()]).expect("positive mass")));
        out.push((
            "x^3 x lebesgue",
            BoxMeasure::new(vec![power, DistributionMeasure::lebesgue_unit()]).expect("positive mass"),
        ));
        out.push(("mixed 3d", BoxMeasure::new(vec![cubic, squared_axis(), third_axis()]).expect("positive mass")));
        out
    }
}

impl Suite for UnitSuite {
    fn name(&self) -> &'static str {
        "unit"
    }

    fn description(&self) -> &'static str {
        "θ(1) is the total measure"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let measures = Self::measures();
        for case in 0..cases.max(measures.len()) {
            let (label, bm) = if case < measures.len() { &measures[case] } else { pick(rng, &measures) };
            let t = IntegrationTarget::new(LambdaAction::ground(), bm.clone()).expect("positive mass");
            let level = rng.gen_range(0..=crate::stepfn::max_level(bm.dim()).min(4));
            let one = StepFunction::constant(bm.dim(), level, q(1, 1)).expect("level in range");
            let outcome = theta(&one, &t).map(|v| &v == bm.total());
            report.record(|| format!("case {case}: {label} level {level}"), outcome);
        }
        report
    }
}

/// Morphism squares for every shipped target on parts of level 0..6.
pub struct SquareSuite;

impl Suite for SquareSuite {
    fn name(&self) -> &'static str {
        "squares"
    }

    fn description(&self) -> &'static str {
        "θ ∘ γ = δ ∘ θ^{2^n} for every shipped target"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        per_target(self.name(), cases, rng, |t, rng| t.square_case(rng, 6))
    }
}

/// Literal recursion, refined recursion and closed forms agree.
pub struct UniquenessSuite;

impl Suite for UniquenessSuite {
    fn name(&self) -> &'static str {
        "uniqueness"
    }

    fn description(&self) -> &'static str {
        "independent evaluations of θ agree; the zero target gives 0"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        per_target(self.name(), cases, rng, |t, rng| {
            if t.is_zero() && !t.zero_case(rng, 6)? {
                return Ok(false);
            }
            t.uniqueness_case(rng, 6)
        })
    }
}

/// `θ(refine f) = θ(f)`.
pub struct StabilitySuite;

impl Suite for StabilitySuite {
    fn name(&self) -> &'static str {
        "stability"
    }

    fn description(&self) -> &'static str {
        "θ is unchanged by refinement"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        per_target(self.name(), cases, rng, |t, rng| t.stability_case(rng, 6))
    }
}

fn per_target(
    name: &str,
    cases: usize,
    rng: &mut ChaCha8Rng,
    mut case: impl FnMut(&dyn TargetHarness, &mut ChaCha8Rng) -> Result<bool>,
) -> SuiteReport {
    let mut report = SuiteReport::new(name);
    for t in target_registry() {
        let mut sub = SuiteReport::new(t.name());
        for i in 0..cases {
            let outcome = case(t.as_ref(), rng);
            sub.record(|| format!("case {i}"), outcome);
        }
        report.merge(sub);
    }
    report
}

/// `θ(a·f + b·g) = τ(a)θ(f) + τ(b)θ(g)` over the lower triangular algebra
/// with `τ` reading off the `E11` coefficient.
pub struct LinearitySuite;

impl Suite for LinearitySuite {
    fn name(&self) -> &'static str {
        "linearity"
    }

    fn description(&self) -> &'static str {
        "θ is Λ-linear"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let algebra = lower_triangular::<Rational>();
        let tau = TauMap::new(&algebra, vec![q(1, 1), q(0, 1), q(0, 1)]).expect("E11 projection is multiplicative");
        let action = LambdaAction::new(algebra, tau).expect("valid action");
        let targets: Vec<_> = (1..=2)
            .flat_map(sample_measures::<Rational>)
            .map(|(label, bm)| (label, IntegrationTarget::new(action.clone(), bm).expect("positive mass")))
            .collect();
        let random_element = |rng: &mut ChaCha8Rng| AlgebraElement::new((0..3).map(|_| random_scalar(rng)).collect());
        for case in 0..cases {
            let (label, t) = pick(rng, &targets);
            let level = rng.gen_range(0..=5);
            let f = random_step(rng, t.dim(), level);
            let g = step_upto(rng, t.dim(), 5);
            let (a, b) = (random_element(rng), random_element(rng));
            let outcome = (|| {
                let combo = f.act(&action, &a)?.add(&g.act(&action, &b)?)?;
                let lhs = theta(&combo, t)?;
                let rhs = action.tau(&a)? * theta(&f, t)? + action.tau(&b)? * theta(&g, t)?;
                Ok(lhs == rhs)
            })();
            report.record(|| format!("case {case}: {label} n={}", t.dim()), outcome);
        }
        report
    }
}

/// Antiderivative and weak derivative undo each other and agree with
/// integration.
pub struct CalculusSuite;

impl Suite for CalculusSuite {
    fn name(&self) -> &'static str {
        "calculus"
    }

    fn description(&self) -> &'static str {
        "D(∫f) = f, ∫f = F(1), and D(κ(F1, F2)) = γ(DF1, DF2)"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let t = IntegrationTarget::<Rational>::lebesgue(1);
        for case in 0..cases {
            let level = rng.gen_range(1..=10);
            let f: StepFunction<Rational> = random_step(rng, 1, level);
            let g: StepFunction<Rational> = step_upto(rng, 1, 6);
            let outcome = (|| {
                let big_f = antiderive(&f, level)?;
                if weak_derivative(&big_f) != f || big_f.end() != &theta(&f, &t)? {
                    return Ok(false);
                }
                let (f1, f2) = (antiderive(&g, 0)?, antiderive(&random_step(rng, 1, g.level()), 0)?);
                let lhs = weak_derivative(&PiecewiseLinear::kappa(&f1, &f2)?);
                let rhs = StepFunction::juxtapose(&[weak_derivative(&f1), weak_derivative(&f2)])?;
                Ok(lhs == rhs)
            })();
            report.record(|| format!("case {case}: level {level}"), outcome);
        }
        report
    }
}

/// Triangle, positivity and Cauchy–Schwarz for the integral, and the
/// triangle inequality for step-function norms.
pub struct InequalitySuite;

impl Suite for InequalitySuite {
    fn name(&self) -> &'static str {
        "inequalities"
    }

    fn description(&self) -> &'static str {
        "|∫f| ≤ ∫|f|, f ≥ 0 ⇒ ∫f ≥ 0, Cauchy–Schwarz, ‖f+g‖ ≤ ‖f‖+‖g‖"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let targets: Vec<_> = (1..=2)
            .flat_map(sample_measures::<Rational>)
            .map(|(label, bm)| (label, IntegrationTarget::new(LambdaAction::ground(), bm).expect("positive mass")))
            .collect();
        for case in 0..cases {
            let (label, t) = pick(rng, &targets);
            let n = t.dim();
            let f: StepFunction<Rational> = step_upto(rng, n, 5);
            let g: StepFunction<Rational> = step_upto(rng, n, 5);
            let p = *pick(rng, &[1.0, 1.5, 2.0, 3.0]);
            let checks: [(&str, Result<bool>); 4] = [
                ("triangle", (|| Ok(theta(&f, t)?.norm() <= theta(&f.abs()?, t)?))()),
                ("positivity", (|| Ok(theta(&f.abs()?, t)? >= q(0, 1)))()),
                (
                    "cauchy-schwarz",
                    (|| {
                        let fg = theta(&f.multiply(&g)?, t)?;
                        Ok(fg.clone() * fg <= theta(&f.multiply(&f)?, t)? * theta(&g.multiply(&g)?, t)?)
                    })(),
                ),
                (
                    "norm triangle",
                    (|| {
                        let bm = t.measure();
                        let sum = f.add(&g)?;
                        if p == 1.0 {
                            return Ok(sum.norm_1(bm)? <= f.norm_1(bm)? + g.norm_1(bm)?);
                        }
                        let (lhs, rhs) = (sum.norm_p(bm, p)?, f.norm_p(bm, p)? + g.norm_p(bm, p)?);
                        Ok(lhs <= rhs * (1.0 + 1e-12))
                    })(),
                ),
            ];
            for (name, outcome) in checks {
                report.record(|| format!("case {case}: {name} under {label} n={n} p={p}"), outcome);
            }
        }
        report
    }
}

/// `split ∘ juxtapose` and `juxtapose ∘ split` are identities.
pub struct GammaSuite;

impl Suite for GammaSuite {
    fn name(&self) -> &'static str {
        "gamma"
    }

    fn description(&self) -> &'static str {
        "juxtapose and split are inverse"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        for case in 0..cases {
            let n = rng.gen_range(1..=2);
            let level = rng.gen_range(1..=if n == 1 { 8 } else { 6 });
            let f: StepFunction<Rational> = random_step(rng, n, level);
            let outcome = (|| {
                let parts = f.split()?;
                let back = StepFunction::juxtapose(&parts)?;
                let again = StepFunction::juxtapose(&back.split()?)?;
                Ok(back == f && again == f && parts.iter().all(|p| p.level() == level - 1))
            })();
            report.record(|| format!("case {case}: n={n} level {level}"), outcome);
        }
        report
    }
}

/// `validate_target` on every shipped target.
pub struct TargetAxiomSuite;

impl Suite for TargetAxiomSuite {
    fn name(&self) -> &'static str {
        "targets"
    }

    fn description(&self) -> &'static str {
        "shipped targets satisfy the object axioms"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        for t in target_registry() {
            let violations = t.validate(cases.max(1), rng.gen());
            report.record(|| format!("{}: {}", t.name(), violations.join("; ")), Ok(violations.is_empty()));
        }
        report
    }
}

/// `‖sample(P, u) − P‖₁` is nonincreasing in `u` for a few polynomials.
pub struct DensitySuite;

impl Suite for DensitySuite {
    fn name(&self) -> &'static str {
        "density"
    }

    fn description(&self) -> &'static str {
        "sampling error of polynomials shrinks with the level"
    }

    fn run(&self, cases: usize, rng: &mut ChaCha8Rng) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        let t = IntegrationTarget::<f64>::lebesgue(1);
        for case in 0..cases.min(32) {
            let coeffs: Vec<f64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let p = |x: &[f64]| Ok(coeffs.iter().rev().fold(0.0, |acc, c| acc * x[0] + c));
            let outcome = (|| {
                let errors = (1..=10)
                    .map(|u| sampling_error_l1(&p, &t, u, Convention::Midpoint, 4))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15))
            })();
            report.record(|| format!("case {case}: coefficients {coeffs:?}"), outcome);
        }
        report
    }
}

/// Total cases and total failures across `reports`.
pub fn summarize(reports: &[SuiteReport]) -> (usize, usize) {
    (reports.iter().map(|r| r.cases).sum(), reports.iter().map(|r| r.failed).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        let r = SuiteRegistry::standard();
        assert_eq!(
            r.names(),
            [
                "exactness",
                "unit",
                "squares",
                "uniqueness",
                "stability",
                "linearity",
                "calculus",
                "inequalities",
                "gamma",
                "targets",
                "density"
            ]
        );
        assert!(r.get("squares").is_some());
        assert!(r.run("nope", 1, 0).is_none());
    }

    #[test]
    fn all_suites_pass_briefly() {
        let r = SuiteRegistry::standard();
        for report in r.run("all", 10, 42).unwrap() {
            assert!(report.ok(), "{report}");
            assert!(report.cases > 0);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let r = SuiteRegistry::standard();
        assert_eq!(r.run("exactness", 20, 9), r.run("exactness", 20, 9));
    }

    #[test]
    fn direct_sum_matches_weighted_sum() {
        let bm = BoxMeasure::uniform(2, squared_axis::<Rational>()).unwrap();
        let f = StepFunction::new(2, 1, vec![q(1, 1), q(2, 1), q(3, 1), q(4, 1)]).unwrap();
        // masses ¼·¼, ¼·¾, ¾·¼, ¾·¾
        let expected = q(1, 16) + q(2 * 3, 16) + q(3 * 3, 16) + q(4 * 9, 16);
        assert_eq!(direct_sum(&f, &bm).unwrap(), expected);
        assert_eq!(f.weighted_sum(&bm).unwrap(), expected);
    }
}
