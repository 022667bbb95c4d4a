//! The universal morphism out of the step-function tower.
//!
//! A [`TargetObject`] supplies a module `V`, a distinguished element `v` and
//! a `2^n`-ary map `δ` with `δ(v, …, v) = v`. The unique structure-preserving
//! map `θ` from step functions is forced by two rules:
//!
//! * `θ(c·1) = c·v` on level 0, and
//! * `θ(f) = δ(θ(f_1), …, θ(f_{2^n}))` where `(f_j) = split(f)`.
//!
//! Some targets depend on where a sub-box sits inside the whole box, for
//! example integration against a measure that is not self-similar under the
//! split maps. Those report [`TargetObject::is_located`] and receive the
//! [`Cell`] at which `δ` is applied; the root instance of `δ` is the map seen
//! from outside. Position-free targets ignore the cell.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, LambdaAction, ValidationReport};
use crate::error::{Error, Result};
use crate::measure::BoxMeasure;
use crate::scalar::Scalar;
use crate::stepfn::{sample, Convention, Sampler, StepFunction};

/// A cell of the tower, addressed from the whole box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub level: u32,
    pub index: Vec<usize>,
}

impl Cell {
    pub fn root(dim: usize) -> Self {
        Self { level: 0, index: vec![0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// The child on corner block `corner` (axis 0 most significant).
    pub fn child(&self, corner: usize) -> Self {
        let n = self.dim();
        Self {
            level: self.level + 1,
            index: self.index.iter().enumerate().map(|(d, &i)| (i << 1) | ((corner >> (n - 1 - d)) & 1)).collect(),
        }
    }

    /// A cell `rel` of the sub-tower rooted at `self`.
    pub fn descendant(&self, rel_level: u32, rel_index: &[usize]) -> Self {
        Self {
            level: self.level + rel_level,
            index: self.index.iter().zip(rel_index).map(|(&i, &r)| (i << rel_level) | r).collect(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} cell {:?}", self.level, self.index)
    }
}

/// An object `(V, v, δ)` receiving the universal morphism.
///
/// Implementations must be stateless from the caller's point of view: the
/// engine may call any method from several threads at once. The continuity
/// of `δ` under limits is a promise the engine cannot check; only linearity,
/// equivariance and the fixed-point law are tested by [`validate_target`].
pub trait TargetObject<S: Scalar>: Send + Sync {
    type Elem: Clone + fmt::Debug + Send + Sync;

    fn name(&self) -> &str;

    /// Number of variables `n`; `δ` takes `2^n` arguments.
    fn dim(&self) -> usize;

    fn action(&self) -> &LambdaAction<S>;

    /// `μ(I_Λ)`, the bound on `‖v‖`.
    fn mass(&self) -> f64;

    fn zero(&self) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    fn scale(&self, k: &S, a: &Self::Elem) -> Self::Elem;

    fn norm(&self, a: &Self::Elem) -> f64;

    /// Exact equality for rational carriers, tolerance-based otherwise.
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// The distinguished element `v`.
    fn unit(&self) -> Self::Elem;

    /// `δ` as seen on the whole box.
    fn delta(&self, parts: &[Self::Elem]) -> Result<Self::Elem>;

    /// `δ` applied inside `cell`.
    fn delta_at(&self, _cell: &Cell, parts: &[Self::Elem]) -> Result<Self::Elem> {
        self.delta(parts)
    }

    fn is_located(&self) -> bool {
        false
    }

    /// `a·x = τ(a) x`.
    fn act(&self, a: &AlgebraElement<S>, x: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.scale(&self.action().tau(a)?, x))
    }

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<f64> {
        Ok(self.norm(&self.add(a, &self.scale(&-S::one(), b))?))
    }

    /// An independent closed form of `θ(f)`, where the target has one.
    fn closed_form(&self, _f: &StepFunction<S>) -> Option<Result<Self::Elem>> {
        None
    }
}

fn check_dims<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T) -> Result<()> {
    if f.dim() == t.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: t.dim(), found: f.dim() })
    }
}

/// Flat indices of a level-`u` tensor listed in sibling-contiguous order:
/// position bits are grouped `n` at a time, coarsest group first, axis 0
/// most significant inside a group.
pub(crate) fn sibling_order(dim: usize, level: u32) -> Vec<usize> {
    let total = 1usize << (dim * level as usize);
    let group = (1usize << dim) - 1;
    (0..total)
        .map(|m| {
            let mut flat = 0usize;
            for d in 0..dim {
                let mut i = 0usize;
                for s in 0..level as usize {
                    let bits = (m >> (dim * (level as usize - 1 - s))) & group;
                    i = (i << 1) | ((bits >> (dim - 1 - d)) & 1);
                }
                flat |= i << (level as usize * (dim - 1 - d));
            }
            flat
        })
        .collect()
}

/// Per-axis indices of position `m` in sibling order at `level`.
fn sibling_index(dim: usize, level: u32, m: usize) -> Vec<usize> {
    let group = (1usize << dim) - 1;
    let mut idx = vec![0usize; dim];
    for s in 0..level as usize {
        let bits = (m >> (dim * (level as usize - 1 - s))) & group;
        for (d, slot) in idx.iter_mut().enumerate() {
            *slot = (*slot << 1) | ((bits >> (dim - 1 - d)) & 1);
        }
    }
    idx
}

/// `θ(f)` with `f` placed on the whole box.
pub fn theta<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T) -> Result<T::Elem> {
    theta_in(f, t, &Cell::root(f.dim()))
}

/// `θ(f)` with `f` placed on `base`, evaluated bottom-up in one pass per
/// level.
pub fn theta_in<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T, base: &Cell) -> Result<T::Elem> {
    check_dims(f, t)?;
    let n = f.dim();
    let v = t.unit();
    let mut values: Vec<T::Elem> =
        sibling_order(n, f.level()).into_iter().map(|i| t.scale(&f.coeffs()[i], &v)).collect();
    let fan = 1usize << n;
    let located = t.is_located();
    for level in (0..f.level()).rev() {
        values = values
            .chunks(fan)
            .enumerate()
            .map(|(m, parts)| {
                if located {
                    let cell = base.descendant(level, &sibling_index(n, level, m));
                    t.delta_at(&cell, parts)
                } else {
                    t.delta(parts)
                }
            })
            .collect::<Result<_>>()?;
    }
    Ok(values.pop().expect("one root value"))
}

/// `θ(f)` by the literal top-down recursion through [`StepFunction::split`].
pub fn theta_recursive<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T) -> Result<T::Elem> {
    check_dims(f, t)?;
    recurse(f, t, &Cell::root(f.dim()))
}

fn recurse<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T, cell: &Cell) -> Result<T::Elem> {
    if f.level() == 0 {
        return Ok(t.scale(&f.coeffs()[0], &t.unit()));
    }
    let parts =
        f.split()?.iter().enumerate().map(|(j, p)| recurse(p, t, &cell.child(j))).collect::<Result<Vec<_>>>()?;
    t.delta_at(cell, &parts)
}

/// Stopping rule and level range for [`theta_limit`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitOptions {
    pub tol: f64,
    pub u_min: u32,
    pub u_max: u32,
    pub convention: Convention,
}

impl LimitOptions {
    /// `u_min = 4`, and `tol = 0` for rationals or `1e-6` otherwise.
    pub fn for_backend<S: Scalar>(u_max: u32) -> Self {
        let tol = if S::BACKEND == crate::scalar::Backend::Rational { 0.0 } else { 1e-6 };
        Self { tol, u_min: 4.min(u_max), u_max, convention: Convention::Midpoint }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::UnsupportedConfiguration(format!("tolerance {} is negative", self.tol)));
        }
        if self.u_min > self.u_max {
            return Err(Error::UnsupportedConfiguration(format!("level range {}:{} is empty", self.u_min, self.u_max)));
        }
        Ok(())
    }
}

/// What happened while chasing a limit across levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<u32>,
    /// `distances[i]` is the target-norm distance between the iterates at
    /// `levels[i]` and `levels[i + 1]`.
    pub distances: Vec<f64>,
    pub converged: bool,
    /// Distance between the last two iterates; infinite if only one level
    /// was evaluated.
    pub residual: f64,
    pub level_reached: u32,
}

impl ConvergenceReport {
    /// Report for a value that needs no limit, such as `θ` of a step function.
    pub fn exact(level: u32) -> Self {
        Self { levels: vec![level], distances: vec![], converged: true, residual: 0.0, level_reached: level }
    }
}

/// Evaluates `θ(sample(g, u))` for each level in `levels`.
pub fn theta_levels<S: Scalar, T: TargetObject<S> + ?Sized>(
    g: &dyn Sampler<S>,
    bm: &BoxMeasure<S>,
    t: &T,
    levels: impl IntoIterator<Item = u32>,
    convention: Convention,
) -> Result<Vec<(u32, T::Elem)>> {
    levels.into_iter().map(|u| Ok((u, theta(&sample(g, bm, u, convention)?, t)?))).collect()
}

/// Approximates `θ(g)` for a function `g` by evaluating `θ` on its samples
/// at increasing levels until successive values are within `tol`.
///
/// Non-convergence is reported, not raised.
pub fn theta_limit<S: Scalar, T: TargetObject<S> + ?Sized>(
    g: &dyn Sampler<S>,
    bm: &BoxMeasure<S>,
    t: &T,
    opts: &LimitOptions,
) -> Result<(T::Elem, ConvergenceReport)> {
    chase_limit(opts, |u| theta(&sample(g, bm, u, opts.convention)?, t), |a, b| t.distance(a, b))
}

/// Evaluates `eval(u)` for `u = opts.u_min..=opts.u_max`, stopping once
/// two successive values are within `opts.tol` under `distance`.
pub fn chase_limit<E>(
    opts: &LimitOptions,
    mut eval: impl FnMut(u32) -> Result<E>,
    distance: impl Fn(&E, &E) -> Result<f64>,
) -> Result<(E, ConvergenceReport)> {
    opts.validate()?;
    let mut report = ConvergenceReport {
        levels: vec![],
        distances: vec![],
        converged: false,
        residual: f64::INFINITY,
        level_reached: opts.u_min,
    };
    let mut last: Option<E> = None;
    for u in opts.u_min..=opts.u_max {
        let value = eval(u)?;
        report.levels.push(u);
        report.level_reached = u;
        if let Some(prev) = &last {
            let d = distance(&value, prev)?;
            report.distances.push(d);
            report.residual = d;
            if d <= opts.tol {
                report.converged = true;
                return Ok((value, report));
            }
        }
        last = Some(value);
    }
    Ok((last.expect("nonempty level range"), report))
}

/// Checks `θ(γ(p_1, …, p_{2^n})) = δ(θ(p_1), …, θ(p_{2^n}))`, with each
/// `θ(p_j)` taken on corner block `j`.
pub fn verify_morphism_square<S: Scalar, T: TargetObject<S> + ?Sized>(
    t: &T,
    parts: &[StepFunction<S>],
) -> Result<bool> {
    let root = Cell::root(t.dim());
    let lhs = theta(&StepFunction::juxtapose(parts)?, t)?;
    let images = parts.iter().enumerate().map(|(j, p)| theta_in(p, t, &root.child(j))).collect::<Result<Vec<_>>>()?;
    let rhs = t.delta_at(&root, &images)?;
    Ok(t.equal(&lhs, &rhs))
}

/// Evaluates `θ(f)` by the literal recursion and by the bottom-up pass on
/// `refine(f)`, and checks they agree with each other and with the target's
/// closed form when it has one.
pub fn verify_uniqueness<S: Scalar, T: TargetObject<S> + ?Sized>(f: &StepFunction<S>, t: &T) -> Result<bool> {
    let direct = theta_recursive(f, t)?;
    let refined = theta(&f.refine()?, t)?;
    if !t.equal(&direct, &refined) {
        return Ok(false);
    }
    match t.closed_form(f) {
        Some(closed) => Ok(t.equal(&direct, &closed?)),
        None => Ok(true),
    }
}

/// A random step function with small rational-valued coefficients.
pub fn random_step<S: Scalar, R: Rng>(rng: &mut R, dim: usize, level: u32) -> StepFunction<S> {
    StepFunction::from_fn(dim, level, |_| random_scalar(rng)).expect("level within limits")
}

/// A random scalar `p/q` with `|p| ≤ 20`, `1 ≤ q ≤ 12`.
pub fn random_scalar<S: Scalar, R: Rng>(rng: &mut R) -> S {
    S::from_ratio(rng.gen_range(-20..=20), rng.gen_range(1..=12))
}

/// Checks the object axioms of `t`: `δ(v, …, v) = v`, `‖v‖ ≤ μ(I_Λ)`, and
/// additivity, homogeneity and `Λ`-equivariance of `δ` on `trials` random
/// argument tuples.
pub fn validate_target<S: Scalar, T: TargetObject<S> + ?Sized>(t: &T, trials: usize, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.dim();
    let fan = 1usize << n;
    let v = t.unit();
    let root = Cell::root(n);

    let mut cells = vec![root.clone()];
    if t.is_located() {
        for _ in 0..trials.min(16) {
            let level = rng.gen_range(1..=4);
            let index = (0..n).map(|_| rng.gen_range(0..1usize << level)).collect();
            cells.push(Cell { level, index });
        }
    }
    for cell in &cells {
        match t.delta_at(cell, &vec![v.clone(); fan]) {
            Ok(fixed) if t.equal(&fixed, &v) => {}
            Ok(fixed) => report.push(format!("δ(v, …, v) = {fixed:?} ≠ v = {v:?} at {cell}")),
            Err(e) => report.push(format!("δ(v, …, v) failed at {cell}: {e}")),
        }
    }
    let bound = t.mass();
    if t.norm(&v) > bound * (1.0 + 1e-12) {
        report.push(format!("‖v‖ = {} exceeds μ(I_Λ) = {bound}", t.norm(&v)));
    }

    let algebra = t.action().algebra.clone();
    let random_tuple = |rng: &mut ChaCha8Rng| -> Result<Vec<T::Elem>> {
        (0..fan)
            .map(|_| {
                let level = rng.gen_range(0..=3);
                theta(&random_step::<S, _>(rng, n, level), t)
            })
            .collect()
    };
    for trial in 0..trials {
        let cell = &cells[trial % cells.len()];
        let outcome = (|| -> Result<Option<String>> {
            let x = random_tuple(&mut rng)?;
            let y = random_tuple(&mut rng)?;
            let k: S = random_scalar(&mut rng);
            let a = algebra.basis_element(rng.gen_range(0..algebra.dim()));

            let sum: Vec<_> = x.iter().zip(&y).map(|(p, q)| t.add(p, q)).collect::<Result<_>>()?;
            let lhs = t.delta_at(cell, &sum)?;
            let rhs = t.add(&t.delta_at(cell, &x)?, &t.delta_at(cell, &y)?)?;
            if !t.equal(&lhs, &rhs) {
                return Ok(Some(format!("δ is not additive at {cell}")));
            }
            let scaled: Vec<_> = x.iter().map(|p| t.scale(&k, p)).collect();
            if !t.equal(&t.delta_at(cell, &scaled)?, &t.scale(&k, &t.delta_at(cell, &x)?)) {
                return Ok(Some(format!("δ is not homogeneous at {cell}")));
            }
            let acted: Vec<_> = x.iter().map(|p| t.act(&a, p)).collect::<Result<_>>()?;
            if !t.equal(&t.delta_at(cell, &acted)?, &t.act(&a, &t.delta_at(cell, &x)?)?) {
                return Ok(Some(format!("δ is not Λ-equivariant at {cell}")));
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => {}
            Ok(Some(msg)) => report.push(format!("trial {trial}: {msg}")),
            Err(e) => report.push(format!("trial {trial}: evaluation failed: {e}")),
        }
    }
    report
}
