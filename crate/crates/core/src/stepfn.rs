//! Step functions on the dyadic tower `E_0 ⊆ E_1 ⊆ …`.
//!
//! A level-`u` step function in `n` variables stores one coefficient per
//! cell, `2^{un}` in total. Along each axis the cell index `i_d ∈ [0, 2^u)`
//! spells the left/right choices of the split scheme, coarsest choice in the
//! most significant bit. The flat index is `Σ_d i_d · 2^{u(n−1−d)}`, axis 0
//! most significant. This layout is part of the step-function literal
//! format and must not change.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::algebra::{check_p, p_sum, AlgebraElement, LambdaAction};
use crate::error::{Error, Result};
use crate::measure::BoxMeasure;
use crate::scalar::{RealScalar, Scalar};

/// Default maximum level for `n` variables: 24 total index bits.
pub fn max_level(dim: usize) -> u32 {
    (24 / dim.max(1)) as u32
}

/// Where a cell is evaluated when sampling a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Midpoint,
    Left,
    Right,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" | "mid" => Ok(Convention::Midpoint),
            "left" => Ok(Convention::Left),
            "right" => Ok(Convention::Right),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown sampling convention `{other}`") }),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Midpoint => "midpoint",
            Convention::Left => "left",
            Convention::Right => "right",
        })
    }
}

/// A function `I_Λ → k` that can be sampled on the tower.
pub trait Sampler<S>: Send + Sync {
    fn eval(&self, x: &[S]) -> Result<S>;
}

impl<S, F> Sampler<S> for F
where
    F: Fn(&[S]) -> Result<S> + Send + Sync,
{
    fn eval(&self, x: &[S]) -> Result<S> {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<S> {
    dim: usize,
    level: u32,
    coeffs: Vec<S>,
}

/// Number of cells at `level` in `dim` variables, if within limits.
fn cell_count(dim: usize, level: u32) -> Result<usize> {
    let max = max_level(dim);
    if dim == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if level > max {
        return Err(Error::LevelOverflow { level, max, dim });
    }
    Ok(1usize << (level as usize * dim))
}

/// Visits every multi-index at `level` in flat order.
fn for_each_index(dim: usize, level: u32, mut f: impl FnMut(usize, &[usize])) {
    let side = 1usize << level;
    let total = side.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    for flat in 0..total {
        f(flat, &idx);
        for d in (0..dim).rev() {
            idx[d] += 1;
            if idx[d] < side {
                break;
            }
            idx[d] = 0;
        }
    }
}

impl<S: Scalar> StepFunction<S> {
    pub fn new(dim: usize, level: u32, coeffs: Vec<S>) -> Result<Self> {
        let expected = cell_count(dim, level)?;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(Self { dim, level, coeffs })
    }

    pub fn constant(dim: usize, level: u32, c: S) -> Result<Self> {
        Ok(Self { dim, level, coeffs: vec![c; cell_count(dim, level)?] })
    }

    /// The indicator `1` of the whole box at level 0.
    pub fn one(dim: usize) -> Self {
        Self::constant(dim, 0, S::one()).expect("level 0 always fits")
    }

    pub fn zero(dim: usize, level: u32) -> Result<Self> {
        Self::constant(dim, level, S::zero())
    }

    /// Builds a step function from a closure over per-axis cell indices.
    pub fn from_fn(dim: usize, level: u32, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(cell_count(dim, level)?);
        for_each_index(dim, level, |_, idx| coeffs.push(f(idx)));
        Ok(Self { dim, level, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        flat_index(self.level, index)
    }

    pub fn coeff(&self, index: &[usize]) -> &S {
        &self.coeffs[self.flat_index(index)]
    }

    /// The same function on the next level: each coefficient copied into its
    /// `2^n` children.
    pub fn refine(&self) -> Result<Self> {
        let level = self.level + 1;
        cell_count(self.dim, level)?;
        let parent_level = self.level;
        let mut parent = vec![0usize; self.dim];
        Self::from_fn(self.dim, level, |idx| {
            for (p, i) in parent.iter_mut().zip(idx) {
                *p = i >> 1;
            }
            self.coeffs[flat_index(parent_level, &parent)].clone()
        })
    }

    /// Refines up to `level`; a no-op when already there.
    pub fn refine_to(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::MixedLevels);
        }
        cell_count(self.dim, level)?;
        let shift = level - self.level;
        if shift == 0 {
            return Ok(self.clone());
        }
        let mut parent = vec![0usize; self.dim];
        let parent_level = self.level;
        Self::from_fn(self.dim, level, |idx| {
            for (p, i) in parent.iter_mut().zip(idx) {
                *p = i >> shift;
            }
            self.coeffs[flat_index(parent_level, &parent)].clone()
        })
    }

    /// Places part `j` on corner block `j` of the box. Corner `j` has bit
    /// `δ_d = (j >> (n−1−d)) & 1` on axis `d` (0 for the `a` side, 1 for `b`).
    pub fn juxtapose(parts: &[StepFunction<S>]) -> Result<Self> {
        let first = parts.first().ok_or(Error::WrongPartCount { expected: 2, found: 0 })?;
        let (dim, level) = (first.dim, first.level);
        let expected = 1usize << dim;
        if parts.len() != expected {
            return Err(Error::WrongPartCount { expected, found: parts.len() });
        }
        if parts.iter().any(|p| p.dim != dim || p.level != level) {
            return Err(Error::MixedLevels);
        }
        cell_count(dim, level + 1)?;
        let mask = (1usize << level) - 1;
        let mut inner = vec![0usize; dim];
        Self::from_fn(dim, level + 1, |idx| {
            let mut corner = 0;
            for (d, (slot, i)) in inner.iter_mut().zip(idx).enumerate() {
                corner |= (i >> level) << (dim - 1 - d);
                *slot = i & mask;
            }
            parts[corner].coeffs[flat_index(level, &inner)].clone()
        })
    }

    /// Inverse of [`StepFunction::juxtapose`].
    pub fn split(&self) -> Result<Vec<Self>> {
        if self.level == 0 {
            return Err(Error::LevelZero);
        }
        let level = self.level - 1;
        let n = self.dim;
        let mut outer = vec![0usize; n];
        (0..1usize << n)
            .map(|corner| {
                Self::from_fn(n, level, |idx| {
                    for (d, (slot, i)) in outer.iter_mut().zip(idx).enumerate() {
                        let bit = (corner >> (n - 1 - d)) & 1;
                        *slot = (bit << level) | i;
                    }
                    self.coeffs[flat_index(self.level, &outer)].clone()
                })
            })
            .collect()
    }

    pub fn map(&self, mut f: impl FnMut(&S) -> S) -> Self {
        Self { dim: self.dim, level: self.level, coeffs: self.coeffs.iter().map(&mut f).collect() }
    }

    pub fn try_map(&self, f: impl FnMut(&S) -> Result<S>) -> Result<Self> {
        Ok(Self { dim: self.dim, level: self.level, coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    /// Refines both operands to the finer level and combines cellwise.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(&S, &S) -> S) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let level = self.level.max(other.level);
        let (a, b) = (self.refine_to(level)?, other.refine_to(level)?);
        Ok(Self { dim: self.dim, level, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, k: &S, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + k.clone() * b.clone())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| k.clone() * c.clone())
    }

    /// `|f|`; requires an ordered backend.
    pub fn abs(&self) -> Result<Self> {
        self.try_map(|c| c.ordered_abs())
    }

    /// `a·f = τ(a) f`.
    pub fn act(&self, action: &LambdaAction<S>, a: &AlgebraElement<S>) -> Result<Self> {
        Ok(self.scale(&action.tau(a)?))
    }

    /// Equality of a.e.-classes: coefficients agree after refining both to
    /// the finer level.
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let level = self.level.max(other.level);
        match (self.refine_to(level), other.refine_to(level)) {
            (Ok(a), Ok(b)) => a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| x.approx_eq(y)),
            _ => false,
        }
    }

    /// `Σ_cells |k_cell| μ(cell)`, exact in the backend's real type.
    pub fn norm_1(&self, bm: &BoxMeasure<S>) -> Result<S::Real> {
        let mut total = S::Real::zero();
        for (k, m) in self.coeffs.iter().zip(cell_measures(bm, self.dim, self.level)?) {
            total = total + k.norm() * m.norm();
        }
        Ok(total)
    }

    /// `(Σ_cells (|k_cell| μ(cell))^p)^{1/p}` on the stored level.
    ///
    /// For `p > 1` the value changes under refinement, so it is a property of
    /// the representation rather than of the a.e.-class.
    pub fn norm_p(&self, bm: &BoxMeasure<S>, p: f64) -> Result<f64> {
        check_p(p)?;
        if p == 1.0 {
            return Ok(self.norm_1(bm)?.to_f64());
        }
        let measures = cell_measures(bm, self.dim, self.level)?;
        Ok(p_sum(self.coeffs.iter().zip(measures).map(|(k, m)| (k.norm() * m.norm()).to_f64()), p))
    }

    /// `Σ k_cell μ(cell)`.
    pub fn weighted_sum(&self, bm: &BoxMeasure<S>) -> Result<S> {
        Ok(self
            .coeffs
            .iter()
            .zip(cell_measures(bm, self.dim, self.level)?)
            .fold(S::zero(), |acc, (k, m)| acc + k.clone() * m))
    }

    /// Value at a point of the box. Points on an interior split hyperplane
    /// are assigned to the cell on their right.
    pub fn eval_at(&self, bm: &BoxMeasure<S>, x: &[S]) -> Result<S> {
        check_measure_dim(bm, self.dim)?;
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut idx = vec![0usize; self.dim];
        for (d, (slot, xd)) in idx.iter_mut().zip(x).enumerate() {
            let bp = bm.breakpoints(d, self.level);
            if xd.try_cmp(&bp[0])?.is_lt() || xd.try_cmp(&bp[bp.len() - 1])?.is_gt() {
                return Err(Error::OutOfDomain(xd.to_string()));
            }
            // number of interior breakpoints ≤ x
            let mut lo = 0usize;
            let mut hi = bp.len() - 1;
            while lo + 1 < hi {
                let mid = (lo + hi) / 2;
                if bp[mid].try_cmp(xd)?.is_le() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            *slot = lo;
        }
        Ok(self.coeff(&idx).clone())
    }
}

fn check_measure_dim<S: Scalar>(bm: &BoxMeasure<S>, dim: usize) -> Result<()> {
    if bm.dim() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, found: bm.dim() })
    }
}

pub(crate) fn flat_index(level: u32, index: &[usize]) -> usize {
    index.iter().fold(0usize, |acc, &i| (acc << level) | i)
}

/// Cell measures at `level` in flat order.
pub fn cell_measures<S: Scalar>(bm: &BoxMeasure<S>, dim: usize, level: u32) -> Result<Vec<S>> {
    check_measure_dim(bm, dim)?;
    let tables = (0..dim).map(|d| bm.axis_cell_measures(d, level)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(cell_count(dim, level)?);
    for_each_index(dim, level, |_, idx| {
        out.push(idx.iter().zip(&tables).fold(S::one(), |acc, (&i, t)| acc * t[i].clone()))
    });
    Ok(out)
}

/// Per-axis representative points of the level-`u` cells.
fn representatives<S: Scalar>(bm: &BoxMeasure<S>, d: usize, level: u32, convention: Convention) -> Result<Vec<S>> {
    let bp = bm.breakpoints(d, level);
    let two = S::from_i64(2);
    bp.windows(2)
        .map(|w| match convention {
            Convention::Left => Ok(w[0].clone()),
            Convention::Right => Ok(w[1].clone()),
            Convention::Midpoint => (w[0].clone() + w[1].clone()).checked_div(&two),
        })
        .collect()
}

/// Evaluates `g` at one representative point per level-`u` cell.
pub fn sample<S: Scalar>(
    g: &dyn Sampler<S>,
    bm: &BoxMeasure<S>,
    level: u32,
    convention: Convention,
) -> Result<StepFunction<S>> {
    let dim = bm.dim();
    let count = cell_count(dim, level)?;
    let reps = (0..dim).map(|d| representatives(bm, d, level, convention)).collect::<Result<Vec<_>>>()?;
    let mut coeffs = Vec::with_capacity(count);
    let mut point = vec![S::zero(); dim];
    let mut failure = None;
    for_each_index(dim, level, |_, idx| {
        if failure.is_some() {
            return;
        }
        for (d, (slot, &i)) in point.iter_mut().zip(idx).enumerate() {
            *slot = reps[d][i].clone();
        }
        match g.eval(&point) {
            Ok(v) => coeffs.push(v),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(match e {
            Error::EvaluationFailure(_) => e,
            other => Error::EvaluationFailure(other.to_string()),
        });
    }
    StepFunction::new(dim, level, coeffs)
}

/// Weight applied to the `⊕_p` norm of a `2^n`-fold direct sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectSumWeight {
    /// `(μ(I)/μ(I_Λ))^n`, with `μ(I)` the mass of the first axis.
    #[default]
    Printed,
    /// `2^{−n}`, the averaging convention.
    Leinster,
}

impl FromStr for DirectSumWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" | "paper" => Ok(DirectSumWeight::Printed),
            "leinster" | "average" => Ok(DirectSumWeight::Leinster),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown direct-sum weight `{other}`") }),
        }
    }
}

impl DirectSumWeight {
    pub fn value<S: Scalar>(self, bm: &BoxMeasure<S>) -> Result<f64> {
        let n = bm.dim() as i32;
        match self {
            DirectSumWeight::Leinster => Ok(0.5f64.powi(n)),
            DirectSumWeight::Printed => {
                let axis = bm.axis(0).total()?.norm().to_f64();
                let total = bm.total().norm().to_f64();
                Ok((axis / total).powi(n))
            }
        }
    }
}

/// `(w · Σ_i ‖x_i‖^p)^{1/p}`.
pub fn direct_sum_norm(norms: &[f64], p: f64, weight: f64) -> Result<f64> {
    check_p(p)?;
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::InvalidWeight(weight));
    }
    if let Some(bad) = norms.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::EvaluationFailure(format!("{bad} is not a norm value")));
    }
    Ok(weight.powf(1.0 / p) * p_sum(norms.iter().copied(), p))
}

/// Cellwise operations for [`pointwise`].
#[derive(Debug, Clone, PartialEq)]
pub enum PointwiseOp<S> {
    /// `f + k·g`
    Add(S),
    Scale(S),
    Multiply,
    Abs,
}

/// Applies a cellwise operation; binary operations align levels first.
pub fn pointwise<S: Scalar>(op: &PointwiseOp<S>, args: &[&StepFunction<S>]) -> Result<StepFunction<S>> {
    let arity = match op {
        PointwiseOp::Add(_) | PointwiseOp::Multiply => 2,
        PointwiseOp::Scale(_) | PointwiseOp::Abs => 1,
    };
    if args.len() != arity {
        return Err(Error::WrongPartCount { expected: arity, found: args.len() });
    }
    match op {
        PointwiseOp::Add(k) => args[0].add_scaled(k, args[1]),
        PointwiseOp::Multiply => args[0].multiply(args[1]),
        PointwiseOp::Scale(k) => Ok(args[0].scale(k)),
        PointwiseOp::Abs => args[0].abs(),
    }
}

/// `a·f` for the `τ`-twisted module structure.
pub fn module_action<S: Scalar>(
    action: &LambdaAction<S>,
    a: &AlgebraElement<S>,
    f: &StepFunction<S>,
) -> Result<StepFunction<S>> {
    f.act(action, a)
}
