//! Shipped target objects and the analysis built on them.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::algebra::LambdaAction;
use crate::engine::{chase_limit, theta, theta_limit, Cell, ConvergenceReport, LimitOptions, TargetObject};
use crate::error::{Error, Result};
use crate::measure::{horner, BoxMeasure, Distribution, DistributionMeasure, SplitScheme};
use crate::scalar::{RealScalar, Scalar};
use crate::stepfn::{max_level, sample, Convention, Sampler, StepFunction};

/// Either a step function, integrated exactly, or a function that is
/// sampled on increasing levels.
#[derive(Clone, Copy)]
pub enum Integrand<'a, S> {
    Step(&'a StepFunction<S>),
    Sampler(&'a dyn Sampler<S>),
}

impl<S> fmt::Debug for Integrand<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Step(_) => f.write_str("Integrand::Step"),
            Integrand::Sampler(_) => f.write_str("Integrand::Sampler"),
        }
    }
}

fn to_f64<S: Scalar>(x: &S) -> f64 {
    x.norm().to_f64()
}

fn is_affine<S: Scalar>(m: &DistributionMeasure<S>) -> bool {
    match &m.dist {
        Distribution::Lebesgue => true,
        Distribution::Power { q } => *q == 1.0,
        Distribution::Polynomial { coeffs } => coeffs.iter().skip(2).all(|c| c.is_zero()),
    }
}

type AxisWeights<S> = Arc<Vec<(S, S)>>;

/// Integration against a box measure: carrier `k`, `v = μ(I_Λ)`, and `δ`
/// the measure-weighted average of the corner values.
///
/// Inside a cell `C` the corner weights are `μ(C_j)/μ(C)`; when every axis
/// measure is affine these weights do not depend on `C`.
pub struct IntegrationTarget<S: Scalar> {
    name: String,
    action: LambdaAction<S>,
    bm: BoxMeasure<S>,
    unit: S,
    located: bool,
    root_weights: Vec<S>,
    weights: RwLock<HashMap<(usize, u32), AxisWeights<S>>>,
}

impl<S: Scalar> Clone for IntegrationTarget<S> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            action: self.action.clone(),
            bm: self.bm.clone(),
            unit: self.unit.clone(),
            located: self.located,
            root_weights: self.root_weights.clone(),
            weights: RwLock::new(self.weights.read().expect("weight cache poisoned").clone()),
        }
    }
}

impl<S: Scalar> fmt::Debug for IntegrationTarget<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegrationTarget")
            .field("name", &self.name)
            .field("dim", &self.bm.dim())
            .field("unit", &self.unit)
            .field("located", &self.located)
            .finish()
    }
}

impl<S: Scalar> IntegrationTarget<S> {
    pub fn new(action: LambdaAction<S>, bm: BoxMeasure<S>) -> Result<Self> {
        if bm.total().is_zero() {
            return Err(Error::ZeroTotalMeasure);
        }
        let unit = bm.total().clone();
        Self::build("integration", action, bm, unit)
    }

    /// The same `δ` with `v = 0`; every morphism into it is zero.
    pub fn zero_unit(action: LambdaAction<S>, bm: BoxMeasure<S>) -> Result<Self> {
        if bm.total().is_zero() {
            return Err(Error::ZeroTotalMeasure);
        }
        Self::build("zero", action, bm, S::zero())
    }

    /// Lebesgue measure on `[0,1]^n` over the ground field.
    pub fn lebesgue(dim: usize) -> Self {
        Self::new(LambdaAction::ground(), BoxMeasure::lebesgue_unit(dim)).expect("unit box has mass 1")
    }

    fn build(name: &str, action: LambdaAction<S>, bm: BoxMeasure<S>, unit: S) -> Result<Self> {
        let located = !bm.axes().iter().all(is_affine);
        let mut t = Self {
            name: name.to_string(),
            action,
            bm,
            unit,
            located,
            root_weights: vec![],
            weights: RwLock::new(HashMap::new()),
        };
        t.root_weights = t.corner_weights(&Cell::root(t.bm.dim()))?;
        Ok(t)
    }

    pub fn measure(&self) -> &BoxMeasure<S> {
        &self.bm
    }

    /// `(μ(lower child)/μ(cell), μ(upper child)/μ(cell))` for every cell of
    /// axis `d` at `level`.
    fn axis_weights(&self, d: usize, level: u32) -> Result<AxisWeights<S>> {
        let key = (d, if self.located { level } else { 0 });
        if let Some(w) = self.weights.read().expect("weight cache poisoned").get(&key) {
            return Ok(w.clone());
        }
        let children = self.bm.axis_cell_measures(d, key.1 + 1)?;
        let half = S::from_ratio(1, 2);
        let table: Vec<(S, S)> = children
            .chunks(2)
            .map(|pair| {
                let whole = pair[0].clone() + pair[1].clone();
                if whole.is_zero() {
                    Ok((half.clone(), half.clone()))
                } else {
                    Ok((pair[0].checked_div(&whole)?, pair[1].checked_div(&whole)?))
                }
            })
            .collect::<Result<_>>()?;
        let table = Arc::new(table);
        self.weights.write().expect("weight cache poisoned").insert(key, table.clone());
        Ok(table)
    }

    /// Corner weights of `δ` inside `cell`, corner order as in `juxtapose`.
    pub fn corner_weights(&self, cell: &Cell) -> Result<Vec<S>> {
        let n = self.bm.dim();
        let axes = (0..n)
            .map(|d| {
                let table = self.axis_weights(d, cell.level)?;
                let i = if self.located { cell.index[d] } else { 0 };
                Ok(table[i].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..1usize << n)
            .map(|j| {
                axes.iter().enumerate().fold(S::one(), |w, (d, (lo, hi))| {
                    if (j >> (n - 1 - d)) & 1 == 1 {
                        w * hi.clone()
                    } else {
                        w * lo.clone()
                    }
                })
            })
            .collect())
    }
}

impl<S: Scalar> TargetObject<S> for IntegrationTarget<S> {
    type Elem = S;

    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.bm.dim()
    }

    fn action(&self) -> &LambdaAction<S> {
        &self.action
    }

    fn mass(&self) -> f64 {
        to_f64(self.bm.total())
    }

    fn zero(&self) -> S {
        S::zero()
    }

    fn add(&self, a: &S, b: &S) -> Result<S> {
        Ok(a.clone() + b.clone())
    }

    fn scale(&self, k: &S, a: &S) -> S {
        if a.is_one() {
            k.clone()
        } else {
            k.clone() * a.clone()
        }
    }

    fn norm(&self, a: &S) -> f64 {
        to_f64(a)
    }

    fn equal(&self, a: &S, b: &S) -> bool {
        a.approx_eq(b)
    }

    fn unit(&self) -> S {
        self.unit.clone()
    }

    fn delta(&self, parts: &[S]) -> Result<S> {
        self.delta_at(&Cell::root(self.dim()), parts)
    }

    fn delta_at(&self, cell: &Cell, parts: &[S]) -> Result<S> {
        let fan = 1usize << self.dim();
        if parts.len() != fan {
            return Err(Error::WrongPartCount { expected: fan, found: parts.len() });
        }
        let combine =
            |weights: &[S]| weights.iter().zip(parts).fold(S::zero(), |acc, (w, k)| acc + w.clone() * k.clone());
        if self.located && cell.level > 0 {
            Ok(combine(&self.corner_weights(cell)?))
        } else {
            Ok(combine(&self.root_weights))
        }
    }

    fn is_located(&self) -> bool {
        self.located
    }

    fn closed_form(&self, f: &StepFunction<S>) -> Option<Result<S>> {
        Some(f.weighted_sum(&self.bm).map(|s| if self.unit.is_zero() { S::zero() } else { s }))
    }
}

/// `∫ f dμ`: exact for step functions, a reported limit for samplers.
pub fn integrate<S: Scalar>(
    f: Integrand<'_, S>,
    t: &IntegrationTarget<S>,
    opts: &LimitOptions,
) -> Result<(S, ConvergenceReport)> {
    match f {
        Integrand::Step(f) => Ok((theta(f, t)?, ConvergenceReport::exact(f.level()))),
        Integrand::Sampler(g) => theta_limit(g, &t.bm, t, opts),
    }
}

/// `∫ f dμ` of a step function by the engine.
pub fn integrate_step<S: Scalar>(f: &StepFunction<S>, t: &IntegrationTarget<S>) -> Result<S> {
    theta(f, t)
}

/// A continuous function on `[0,1]` with `F(0) = 0`, linear between the
/// `2^u + 1` dyadic breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<S> {
    level: u32,
    values: Vec<S>,
}

impl<S: Scalar> PiecewiseLinear<S> {
    pub fn new(level: u32, values: Vec<S>) -> Result<Self> {
        if level > max_level(1) {
            return Err(Error::LevelOverflow { level, max: max_level(1), dim: 1 });
        }
        let expected = (1usize << level) + 1;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        if !values[0].is_zero() {
            return Err(Error::TargetInvalid(format!("F(0) = {} is not zero", values[0])));
        }
        Ok(Self { level, values })
    }

    /// `x ↦ x` at `level`.
    pub fn identity(level: u32) -> Self {
        let den = 1i64 << level;
        Self { level, values: (0..=den).map(|j| S::from_ratio(j, den)).collect() }
    }

    pub fn zero(level: u32) -> Self {
        Self { level, values: vec![S::zero(); (1usize << level) + 1] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `F(1)`.
    pub fn end(&self) -> &S {
        self.values.last().expect("at least two breakpoints")
    }

    /// The same function listed on the next level's breakpoints.
    pub fn refine(&self) -> Result<Self> {
        if self.level >= max_level(1) {
            return Err(Error::LevelOverflow { level: self.level + 1, max: max_level(1), dim: 1 });
        }
        let half = S::from_ratio(1, 2);
        let mut values = Vec::with_capacity(2 * self.values.len() - 1);
        for w in self.values.windows(2) {
            values.push(w[0].clone());
            values.push(half.clone() * (w[0].clone() + w[1].clone()));
        }
        values.push(self.end().clone());
        Ok(Self { level: self.level + 1, values })
    }

    pub fn refine_to(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::MixedLevels);
        }
        let mut out = self.clone();
        while out.level < level {
            out = out.refine()?;
        }
        Ok(out)
    }

    fn common(&self, other: &Self) -> Result<(Self, Self)> {
        let level = self.level.max(other.level);
        Ok((self.refine_to(level)?, other.refine_to(level)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        Ok(Self { level: a.level, values: a.values.into_iter().zip(b.values).map(|(x, y)| x + y).collect() })
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { level: self.level, values: self.values.iter().map(|x| k.clone() * x.clone()).collect() }
    }

    /// Sup norm, attained at a breakpoint.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(to_f64).fold(0.0, f64::max)
    }

    /// Equality as functions, comparing on a common level.
    pub fn equivalent(&self, other: &Self) -> bool {
        match self.common(other) {
            Ok((a, b)) => a.values.iter().zip(&b.values).all(|(x, y)| x.approx_eq(y)),
            Err(_) => false,
        }
    }

    /// `κ(F_1, F_2)`: `½F_1(2x)` on `[0,½]` and `½(F_1(1) + F_2(2x−1))` on
    /// `[½,1]`.
    pub fn kappa(f1: &Self, f2: &Self) -> Result<Self> {
        let (a, b) = f1.common(f2)?;
        if a.level >= max_level(1) {
            return Err(Error::LevelOverflow { level: a.level + 1, max: max_level(1), dim: 1 });
        }
        let half = S::from_ratio(1, 2);
        let shift = a.end().clone();
        let mut values: Vec<S> = a.values.iter().map(|x| half.clone() * x.clone()).collect();
        values.extend(b.values[1..].iter().map(|y| half.clone() * (shift.clone() + y.clone())));
        Ok(Self { level: a.level + 1, values })
    }
}

/// Continuous functions vanishing at 0 with the sup norm: `v = id`,
/// `δ = κ`. Defined for `n = 1`, the ground field, and Lebesgue measure on
/// `[0,1]` split at `½`.
#[derive(Debug, Clone)]
pub struct AntiderivativeTarget<S: Scalar> {
    action: LambdaAction<S>,
}

impl<S: Scalar> Default for AntiderivativeTarget<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> AntiderivativeTarget<S> {
    pub fn new() -> Self {
        Self { action: LambdaAction::ground() }
    }

    /// Accepts only the configuration on which `κ` is defined.
    pub fn for_config(action: &LambdaAction<S>, bm: &BoxMeasure<S>) -> Result<Self> {
        check_calculus_config(action, bm)?;
        Ok(Self::new())
    }
}

/// Fails unless `n = 1`, `Λ = k` with `τ = id`, and `bm` is Lebesgue on
/// `[0,1]` split at `½`.
pub fn check_calculus_config<S: Scalar>(action: &LambdaAction<S>, bm: &BoxMeasure<S>) -> Result<()> {
    if bm.dim() != 1 {
        return Err(Error::UnsupportedConfiguration(format!("antiderivatives need one variable, got {}", bm.dim())));
    }
    if !action.is_ground() {
        return Err(Error::UnsupportedConfiguration("antiderivatives need the ground field with τ = id".into()));
    }
    let axis = bm.axis(0);
    if !matches!(axis.dist, Distribution::Lebesgue) || axis.scheme != SplitScheme::unit_interval() {
        return Err(Error::UnsupportedConfiguration(
            "antiderivatives need Lebesgue measure on [0,1] split at 1/2".into(),
        ));
    }
    Ok(())
}

impl<S: Scalar> TargetObject<S> for AntiderivativeTarget<S> {
    type Elem = PiecewiseLinear<S>;

    fn name(&self) -> &str {
        "antiderivative"
    }

    fn dim(&self) -> usize {
        1
    }

    fn action(&self) -> &LambdaAction<S> {
        &self.action
    }

    fn mass(&self) -> f64 {
        1.0
    }

    fn zero(&self) -> PiecewiseLinear<S> {
        PiecewiseLinear::zero(0)
    }

    fn add(&self, a: &PiecewiseLinear<S>, b: &PiecewiseLinear<S>) -> Result<PiecewiseLinear<S>> {
        a.add(b)
    }

    fn scale(&self, k: &S, a: &PiecewiseLinear<S>) -> PiecewiseLinear<S> {
        a.scale(k)
    }

    fn norm(&self, a: &PiecewiseLinear<S>) -> f64 {
        a.sup_norm()
    }

    fn equal(&self, a: &PiecewiseLinear<S>, b: &PiecewiseLinear<S>) -> bool {
        a.equivalent(b)
    }

    fn unit(&self) -> PiecewiseLinear<S> {
        PiecewiseLinear::identity(0)
    }

    fn delta(&self, parts: &[PiecewiseLinear<S>]) -> Result<PiecewiseLinear<S>> {
        match parts {
            [f1, f2] => PiecewiseLinear::kappa(f1, f2),
            _ => Err(Error::WrongPartCount { expected: 2, found: parts.len() }),
        }
    }
}

/// `x ↦ ∫_0^x f`, listed at level `max(u_out, level of f)`.
pub fn antiderive<S: Scalar>(f: &StepFunction<S>, u_out: u32) -> Result<PiecewiseLinear<S>> {
    if f.dim() != 1 {
        return Err(Error::UnsupportedConfiguration(format!("antiderivatives need one variable, got {}", f.dim())));
    }
    theta(f, &AntiderivativeTarget::new())?.refine_to(u_out.max(f.level()))
}

/// The step function of slopes of `F`.
pub fn weak_derivative<S: Scalar>(f: &PiecewiseLinear<S>) -> StepFunction<S> {
    let scale = S::from_i64(1i64 << f.level);
    let coeffs = f.values.windows(2).map(|w| (w[1].clone() - w[0].clone()) * scale.clone()).collect();
    StepFunction::new(1, f.level, coeffs).expect("breakpoints match cells")
}

/// A Fourier coefficient together with the convergence of its two real
/// integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierResult {
    pub value: Complex64,
    pub k: i64,
    pub report: ConvergenceReport,
}

/// `f·cos(2πkx)` and `−f·sin(2πkx)` on the level-`u` cells, with `f` itself
/// refined or sampled to level `u`.
fn fourier_at(
    f: Integrand<'_, f64>,
    k: i64,
    u: u32,
    convention: Convention,
    t: &IntegrationTarget<f64>,
) -> Result<Complex64> {
    let bm = t.measure();
    let base = match f {
        Integrand::Step(s) => s.refine_to(u)?,
        Integrand::Sampler(g) => sample(g, bm, u, convention)?,
    };
    let freq = TAU * k as f64;
    let cos = sample(&|x: &[f64]| Ok((freq * x[0]).cos()), bm, u, convention)?;
    let sin = sample(&|x: &[f64]| Ok(-(freq * x[0]).sin()), bm, u, convention)?;
    let re = theta(&base.multiply(&cos)?, t)?;
    let im = theta(&base.multiply(&sin)?, t)?;
    Ok(Complex64::new(re, im))
}

fn fourier_target(f: Integrand<'_, f64>) -> Result<IntegrationTarget<f64>> {
    let dim = match f {
        Integrand::Step(s) => s.dim(),
        Integrand::Sampler(_) => 1,
    };
    if dim != 1 {
        return Err(Error::UnsupportedConfiguration(format!("Fourier coefficients need one variable, got {dim}")));
    }
    Ok(IntegrationTarget::lebesgue(1))
}

/// `c_k = ∫_0^1 f(x) e^{−2πikx} dx` evaluated at the single level `u`.
pub fn fourier_coefficient_at(f: Integrand<'_, f64>, k: i64, u: u32, convention: Convention) -> Result<Complex64> {
    let t = fourier_target(f)?;
    let u = match f {
        Integrand::Step(s) => u.max(s.level()),
        Integrand::Sampler(_) => u,
    };
    fourier_at(f, k, u, convention, &t)
}

/// `c_k = ∫_0^1 f(x) e^{−2πikx} dx`, chased across levels until successive
/// values differ by at most `opts.tol` in modulus.
pub fn fourier_coefficient(f: Integrand<'_, f64>, k: i64, opts: &LimitOptions) -> Result<FourierResult> {
    let t = fourier_target(f)?;
    let mut opts = opts.clone();
    if let Integrand::Step(s) = f {
        opts.u_min = opts.u_min.max(s.level());
        opts.u_max = opts.u_max.max(opts.u_min);
    }
    let (value, report) = chase_limit(&opts, |u| fourier_at(f, k, u, opts.convention, &t), |a, b| Ok((a - b).norm()))?;
    Ok(FourierResult { value, k, report })
}

/// `(∫ |P|^p dμ)^{1/p}` for a polynomial `P` with ascending coefficients.
pub fn poly_norm<S: Scalar>(
    coeffs: &[S],
    p: f64,
    t: &IntegrationTarget<S>,
    opts: &LimitOptions,
) -> Result<(f64, ConvergenceReport)> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidP(p));
    }
    if t.dim() != 1 {
        return Err(Error::UnsupportedConfiguration(format!("polynomial norms need one variable, got {}", t.dim())));
    }
    let power = move |x: &[S]| -> Result<S> {
        let y = horner(coeffs, &x[0]).ordered_abs()?;
        if p.fract() == 0.0 && p <= i32::MAX as f64 {
            y.powi(p as i32)
        } else {
            y.powf(p)
        }
    };
    let (value, report) = theta_limit(&power, t.measure(), t, opts)?;
    Ok((to_f64(&value).powf(1.0 / p), report))
}

/// `‖g − sample(g, u)‖_1`, integrating `|g − sample(g, u)|` on level
/// `u + extra` with midpoint samples.
pub fn sampling_error_l1<S: Scalar>(
    g: &dyn Sampler<S>,
    t: &IntegrationTarget<S>,
    u: u32,
    convention: Convention,
    extra: u32,
) -> Result<f64> {
    let bm = t.measure();
    let coarse = sample(g, bm, u, convention)?.refine_to(u + extra)?;
    let fine = sample(g, bm, u + extra, Convention::Midpoint)?;
    let diff = fine.sub(&coarse)?.abs()?;
    Ok(to_f64(&theta(&diff, t)?))
}
