//! Atomless product measures on boxes, driven by per-dimension distribution
//! functions, with exact cell measures on the dyadic tower.
//!
//! Each dimension carries a [`SplitScheme`]: an interval `[a, b]` and a split
//! point `ξ`. Level-`u` breakpoints are produced by composing the affine maps
//! `κ_a: [a,b] → [a,ξ]` and `κ_b: [a,b] → [ξ,b]`, so for `ξ` away from the
//! midpoint the cells have unequal widths.

use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Level used to scan a distribution function for monotonicity at
/// construction time.
const MONOTONICITY_SCAN_LEVEL: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitScheme<S> {
    a: S,
    b: S,
    xi: S,
}

impl<S: Scalar> SplitScheme<S> {
    pub fn new(a: S, b: S, xi: S) -> Result<Self> {
        if a.try_cmp(&xi)?.is_ge() || xi.try_cmp(&b)?.is_ge() {
            return Err(Error::InvalidMeasure(format!("split point {xi} must lie strictly inside [{a}, {b}]")));
        }
        Ok(Self { a, b, xi })
    }

    /// `[a, b]` split at its midpoint.
    pub fn midpoint(a: S, b: S) -> Result<Self> {
        let xi = (a.clone() + b.clone()).checked_div(&S::from_i64(2))?;
        Self::new(a, b, xi)
    }

    pub fn unit_interval() -> Self {
        Self::midpoint(S::zero(), S::one()).expect("0 < 1/2 < 1")
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    pub fn xi(&self) -> &S {
        &self.xi
    }

    pub fn is_midpoint(&self) -> bool {
        self.xi.clone() + self.xi.clone() == self.a.clone() + self.b.clone()
    }

    fn width(&self) -> S {
        self.b.clone() - self.a.clone()
    }

    /// `κ_a(x) = a + (x − a)(ξ − a)/(b − a)`.
    pub fn kappa_a(&self, x: &S) -> S {
        let ratio = (self.xi.clone() - self.a.clone()).checked_div(&self.width()).expect("a < b");
        self.a.clone() + (x.clone() - self.a.clone()) * ratio
    }

    /// `κ_b(x) = ξ + (x − a)(b − ξ)/(b − a)`.
    pub fn kappa_b(&self, x: &S) -> S {
        let ratio = (self.b.clone() - self.xi.clone()).checked_div(&self.width()).expect("a < b");
        self.xi.clone() + (x.clone() - self.a.clone()) * ratio
    }

    /// The `2^u + 1` level-`u` breakpoints `ξ_{u,0} = a < … < ξ_{u,2^u} = b`.
    pub fn breakpoints(&self, level: u32) -> Vec<S> {
        let mut points = vec![self.a.clone(), self.b.clone()];
        for _ in 0..level {
            let mut next = Vec::with_capacity(2 * points.len() - 1);
            next.extend(points.iter().map(|x| self.kappa_a(x)));
            next.extend(points.iter().skip(1).map(|x| self.kappa_b(x)));
            points = next;
        }
        points
    }

    /// Endpoints of cell `index` at `level`, from the binary digits of the
    /// index read coarsest first.
    pub fn cell_bounds(&self, level: u32, index: usize) -> Result<(S, S)> {
        if level as usize >= usize::BITS as usize || index >> level != 0 {
            return Err(Error::IndexOutOfRange { index, level });
        }
        let (mut lo, mut hi) = (self.a.clone(), self.b.clone());
        // Apply the finest map first: the coarsest digit is the outermost κ.
        for bit in 0..level {
            let right = (index >> bit) & 1 == 1;
            if right {
                lo = self.kappa_b(&lo);
                hi = self.kappa_b(&hi);
            } else {
                lo = self.kappa_a(&lo);
                hi = self.kappa_a(&hi);
            }
        }
        Ok((lo, hi))
    }

    pub fn contains(&self, x: &S) -> Result<bool> {
        Ok(self.a.try_cmp(x)?.is_le() && x.try_cmp(&self.b)?.is_le())
    }
}

/// A nondecreasing distribution function `F`, with `μ([x, y]) = F(y) − F(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution<S> {
    /// `F(x) = x`.
    Lebesgue,
    /// `F(x) = x^q`. Non-integer `q` requires a float backend.
    Power { q: f64 },
    /// `F(x) = Σ c_i x^i`, ascending degree.
    Polynomial { coeffs: Vec<S> },
}

impl<S: Scalar> Distribution<S> {
    pub fn eval(&self, x: &S) -> Result<S> {
        match self {
            Distribution::Lebesgue => Ok(x.clone()),
            Distribution::Power { q } => x.powf(*q),
            Distribution::Polynomial { coeffs } => Ok(horner(coeffs, x)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Distribution::Lebesgue => "lebesgue".into(),
            Distribution::Power { q } => format!("power(q={q})"),
            Distribution::Polynomial { coeffs } => format!("poly({} coeffs)", coeffs.len()),
        }
    }
}

pub(crate) fn horner<S: Scalar>(coeffs: &[S], x: &S) -> S {
    coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// A distribution on one axis together with that axis' split scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMeasure<S> {
    pub dist: Distribution<S>,
    pub scheme: SplitScheme<S>,
}

impl<S: Scalar> DistributionMeasure<S> {
    /// Checks that `F` is defined and nondecreasing on a fine grid of the
    /// domain and that the total mass is positive.
    pub fn new(dist: Distribution<S>, scheme: SplitScheme<S>) -> Result<Self> {
        let m = Self { dist, scheme };
        let fa = m.dist.eval(m.scheme.a())?;
        let fb = m.dist.eval(m.scheme.b())?;
        if fb.try_cmp(&fa)?.is_le() {
            return Err(if fb == fa {
                Error::ZeroTotalMeasure
            } else {
                Error::InvalidMeasure(format!("{} is decreasing on the domain", m.dist.name()))
            });
        }
        m.cell_masses(&m.scheme.breakpoints(MONOTONICITY_SCAN_LEVEL))?;
        Ok(m)
    }

    pub fn lebesgue_unit() -> Self {
        Self::new(Distribution::Lebesgue, SplitScheme::unit_interval()).expect("valid")
    }

    pub fn total(&self) -> Result<S> {
        self.interval(self.scheme.a(), self.scheme.b())
    }

    fn interval(&self, x: &S, y: &S) -> Result<S> {
        Ok(self.dist.eval(y)? - self.dist.eval(x)?)
    }

    /// `F(y) − F(x)` for `a ≤ x ≤ y ≤ b`.
    pub fn interval_measure(&self, x: &S, y: &S) -> Result<S> {
        if !self.scheme.contains(x)? || !self.scheme.contains(y)? || x.try_cmp(y)?.is_gt() {
            return Err(Error::OutOfDomain(format!("[{x}, {y}]")));
        }
        let m = self.interval(x, y)?;
        if m.try_cmp(&S::zero())?.is_lt() {
            return Err(Error::InvalidMeasure(format!("{} decreases on [{x}, {y}]", self.dist.name())));
        }
        Ok(m)
    }

    fn cell_masses(&self, points: &[S]) -> Result<Vec<S>> {
        let values = points.iter().map(|x| self.dist.eval(x)).collect::<Result<Vec<_>>>()?;
        values
            .windows(2)
            .zip(points.windows(2))
            .map(|(f, x)| {
                let m = f[1].clone() - f[0].clone();
                if m.try_cmp(&S::zero())?.is_lt() {
                    Err(Error::InvalidMeasure(format!("{} decreases on [{}, {}]", self.dist.name(), x[0], x[1])))
                } else {
                    Ok(m)
                }
            })
            .collect()
    }
}

/// `F(y) − F(x)`.
pub fn interval_measure<S: Scalar>(m: &DistributionMeasure<S>, x: &S, y: &S) -> Result<S> {
    m.interval_measure(x, y)
}

#[derive(Debug)]
struct AxisCache<S> {
    breakpoints: Vec<Arc<Vec<S>>>,
    masses: Vec<Arc<Vec<S>>>,
}

impl<S> Default for AxisCache<S> {
    fn default() -> Self {
        Self { breakpoints: Vec::new(), masses: Vec::new() }
    }
}

/// Product of per-dimension distribution measures on a box.
#[derive(Debug, Clone)]
pub struct BoxMeasure<S> {
    axes: Vec<DistributionMeasure<S>>,
    total: S,
    // Pure memo tables; contents depend only on (axis, level).
    cache: Arc<Vec<RwLock<AxisCache<S>>>>,
}

impl<S: Scalar> PartialEq for BoxMeasure<S> {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes
    }
}

impl<S: Scalar> BoxMeasure<S> {
    pub fn new(axes: Vec<DistributionMeasure<S>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidMeasure("a box needs at least one axis".into()));
        }
        let mut total = S::one();
        for axis in &axes {
            total = total * axis.total()?;
        }
        if total.is_zero() {
            return Err(Error::ZeroTotalMeasure);
        }
        let cache = (0..axes.len()).map(|_| RwLock::new(AxisCache::default())).collect();
        Ok(Self { axes, total, cache: Arc::new(cache) })
    }

    /// Lebesgue measure on `[0, 1]^n` split at `1/2`.
    pub fn lebesgue_unit(n: usize) -> Self {
        Self::uniform(n, DistributionMeasure::lebesgue_unit()).expect("valid")
    }

    /// The same axis measure in every dimension.
    pub fn uniform(n: usize, axis: DistributionMeasure<S>) -> Result<Self> {
        Self::new(vec![axis; n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[DistributionMeasure<S>] {
        &self.axes
    }

    pub fn axis(&self, d: usize) -> &DistributionMeasure<S> {
        &self.axes[d]
    }

    /// `μ(I_Λ)`.
    pub fn total(&self) -> &S {
        &self.total
    }

    /// Level-`u` breakpoints of axis `d`, memoized.
    pub fn breakpoints(&self, d: usize, level: u32) -> Arc<Vec<S>> {
        let level = level as usize;
        if let Some(bp) = self.cache[d].read().expect("poisoned").breakpoints.get(level) {
            return bp.clone();
        }
        let mut cache = self.cache[d].write().expect("poisoned");
        let scheme = &self.axes[d].scheme;
        if cache.breakpoints.is_empty() {
            cache.breakpoints.push(Arc::new(vec![scheme.a().clone(), scheme.b().clone()]));
        }
        while cache.breakpoints.len() <= level {
            let prev = cache.breakpoints.last().expect("nonempty").clone();
            let mut next = Vec::with_capacity(2 * prev.len() - 1);
            next.extend(prev.iter().map(|x| scheme.kappa_a(x)));
            next.extend(prev.iter().skip(1).map(|x| scheme.kappa_b(x)));
            cache.breakpoints.push(Arc::new(next));
        }
        cache.breakpoints[level].clone()
    }

    /// Measures of the `2^u` level-`u` cells of axis `d`, memoized.
    pub fn axis_cell_measures(&self, d: usize, level: u32) -> Result<Arc<Vec<S>>> {
        let idx = level as usize;
        if let Some(m) = self.cache[d].read().expect("poisoned").masses.get(idx) {
            return Ok(m.clone());
        }
        let mut needed = Vec::new();
        {
            let have = self.cache[d].read().expect("poisoned").masses.len();
            for l in have..=idx {
                needed.push(Arc::new(self.axes[d].cell_masses(&self.breakpoints(d, l as u32))?));
            }
        }
        let mut cache = self.cache[d].write().expect("poisoned");
        for m in needed {
            if cache.masses.len() <= idx {
                cache.masses.push(m);
            }
        }
        Ok(cache.masses[idx].clone())
    }

    /// `Π_d μ_d(J_d)` for the level-`u` cell with per-axis indices `index`.
    pub fn cell_measure(&self, level: u32, index: &[usize]) -> Result<S> {
        if index.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: index.len() });
        }
        let mut m = S::one();
        for (d, &i) in index.iter().enumerate() {
            if level as usize >= usize::BITS as usize || i >> level != 0 {
                return Err(Error::IndexOutOfRange { index: i, level });
            }
            m = m * self.axis_cell_measures(d, level)?[i].clone();
        }
        Ok(m)
    }

    /// Measure of corner block `j` (corner bits with axis 1 most significant).
    pub fn corner_block_measure(&self, corner: usize) -> Result<S> {
        let n = self.dim();
        let index: Vec<usize> = (0..n).map(|d| (corner >> (n - 1 - d)) & 1).collect();
        self.cell_measure(1, &index)
    }

    /// Endpoints of a level-`u` cell along axis `d`.
    pub fn axis_cell_bounds(&self, d: usize, level: u32, index: usize) -> Result<(S, S)> {
        let bp = self.breakpoints(d, level);
        if index + 1 >= bp.len() {
            return Err(Error::IndexOutOfRange { index, level });
        }
        Ok((bp[index].clone(), bp[index + 1].clone()))
    }
}

/// Free-function form of [`BoxMeasure::cell_measure`].
pub fn cell_measure<S: Scalar>(bm: &BoxMeasure<S>, level: u32, index: &[usize]) -> Result<S> {
    bm.cell_measure(level, index)
}
