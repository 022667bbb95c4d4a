//! Finite-dimensional algebras `Λ` given by structure constants, the
//! weighted `p`-norm on coordinates, algebra homomorphisms `τ: Λ → k`, and
//! path algebras of quivers with monomial relations.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// A list of human-readable violations. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

/// Coordinates relative to the basis of some [`Algebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.coords.iter().map(|c| k.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect()))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A finite-dimensional associative unital `k`-algebra.
///
/// Multiplication is `b_i · b_j = Σ_k c[i][j][k] b_k`. The basis norm `ν`
/// weights each coordinate in [`Algebra::norm_p`].
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra<S: Scalar> {
    basis: Vec<String>,
    // c[(i * n + j) * n + k]
    structure: Vec<S>,
    unit: Vec<S>,
    nu: Vec<S::Real>,
}

impl<S: Scalar> Algebra<S> {
    /// Builds an algebra from nested structure constants `structure[i][j][k]`.
    ///
    /// Shapes and positivity of `ν` are checked here; associativity and the
    /// unit law are left to [`Algebra::validate`].
    pub fn new(
        basis: Vec<String>,
        structure: Vec<Vec<Vec<S>>>,
        unit: Vec<S>,
        nu: Option<Vec<S::Real>>,
    ) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::MalformedAlgebra("empty basis".into()));
        }
        check_dim(n, structure.len())?;
        check_dim(n, unit.len())?;
        let mut flat = Vec::with_capacity(n * n * n);
        for row in structure {
            check_dim(n, row.len())?;
            for entry in row {
                check_dim(n, entry.len())?;
                flat.extend(entry);
            }
        }
        let nu = nu.unwrap_or_else(|| vec![S::Real::one(); n]);
        check_dim(n, nu.len())?;
        if let Some(i) = nu.iter().position(|w| *w <= S::Real::zero()) {
            return Err(Error::MalformedAlgebra(format!("basis norm of `{}` must be positive", basis[i])));
        }
        Ok(Self { basis, structure: flat, unit, nu })
    }

    /// `k` itself: one basis element with `1 · 1 = 1`.
    pub fn ground_field() -> Self {
        Self::new(vec!["1".into()], vec![vec![vec![S::one()]]], vec![S::one()], None)
            .expect("ground field is well formed")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn nu(&self) -> &[S::Real] {
        &self.nu
    }

    pub fn with_nu(mut self, nu: Vec<S::Real>) -> Result<Self> {
        check_dim(self.dim(), nu.len())?;
        if nu.iter().any(|w| *w <= S::Real::zero()) {
            return Err(Error::MalformedAlgebra("basis norms must be positive".into()));
        }
        self.nu = nu;
        Ok(self)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &S {
        let n = self.dim();
        &self.structure[(i * n + j) * n + k]
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement<S> {
        let mut coords = vec![S::zero(); self.dim()];
        coords[i] = S::one();
        AlgebraElement::new(coords)
    }

    pub fn one(&self) -> AlgebraElement<S> {
        AlgebraElement::new(self.unit.clone())
    }

    pub fn zero(&self) -> AlgebraElement<S> {
        AlgebraElement::new(vec![S::zero(); self.dim()])
    }

    pub fn element(&self, coords: Vec<S>) -> Result<AlgebraElement<S>> {
        check_dim(self.dim(), coords.len())?;
        Ok(AlgebraElement::new(coords))
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        let n = self.dim();
        check_dim(n, a.dim())?;
        check_dim(n, b.dim())?;
        let mut out = vec![S::zero(); n];
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let coeff = ai.clone() * bj.clone();
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        *slot = slot.clone() + coeff.clone() * c.clone();
                    }
                }
            }
        }
        Ok(AlgebraElement::new(out))
    }

    /// Checks associativity on every basis triple and the two-sided unit law.
    #[allow(clippy::needless_range_loop)]
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut report = ValidationReport::default();
        let basis: Vec<_> = (0..n).map(|i| self.basis_element(i)).collect();
        let products: Vec<Vec<_>> =
            (0..n).map(|i| (0..n).map(|j| self.multiply(&basis[i], &basis[j]).expect("sized")).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let left = self.multiply(&products[i][j], &basis[l]).expect("sized");
                    let right = self.multiply(&basis[i], &products[j][l]).expect("sized");
                    if !elements_eq(&left, &right) {
                        report.push(format!(
                            "associativity fails on ({}, {}, {})",
                            self.basis[i], self.basis[j], self.basis[l]
                        ));
                    }
                }
            }
        }
        let one = self.one();
        for (i, b) in basis.iter().enumerate() {
            let left = self.multiply(&one, b).expect("sized");
            let right = self.multiply(b, &one).expect("sized");
            if !elements_eq(&left, b) || !elements_eq(&right, b) {
                report.push(format!("unit law fails on {}", self.basis[i]));
            }
        }
        report
    }

    /// `(Σ (|k_i| ν(b_i))^p)^{1/p}`, evaluated in floating point.
    pub fn norm_p(&self, a: &AlgebraElement<S>, p: f64) -> Result<f64> {
        check_p(p)?;
        check_dim(self.dim(), a.dim())?;
        let terms = a.coords.iter().zip(&self.nu).map(|(k, w)| (k.norm() * w.clone()).to_f64());
        Ok(p_sum(terms, p))
    }

    /// The `p = 1` norm, exact in the backend's real type.
    pub fn norm_1(&self, a: &AlgebraElement<S>) -> Result<S::Real> {
        check_dim(self.dim(), a.dim())?;
        Ok(a.coords.iter().zip(&self.nu).fold(S::Real::zero(), |acc, (k, w)| acc + k.norm() * w.clone()))
    }
}

fn elements_eq<S: Scalar>(a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> bool {
    a.coords.len() == b.coords.len() && a.coords.iter().zip(&b.coords).all(|(x, y)| x.approx_eq(y))
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidP(p))
    }
}

/// `(Σ t_i^p)^{1/p}` over nonnegative terms, scaled by the largest term to
/// avoid overflow.
pub(crate) fn p_sum(terms: impl Iterator<Item = f64>, p: f64) -> f64 {
    let terms: Vec<f64> = terms.collect();
    if p == 1.0 {
        return terms.iter().sum();
    }
    let max = terms.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = terms.iter().map(|t| (t / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Validates an algebra. Alias for [`Algebra::validate`].
pub fn validate_algebra<S: Scalar>(algebra: &Algebra<S>) -> ValidationReport {
    algebra.validate()
}

/// An algebra homomorphism `τ: Λ → k`, stored by its values on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMap<S> {
    images: Vec<S>,
}

impl<S: Scalar> TauMap<S> {
    /// Wraps basis images without checking the homomorphism laws.
    pub fn unchecked(images: Vec<S>) -> Self {
        Self { images }
    }

    /// Wraps basis images and rejects anything that is not a unital
    /// multiplicative map on `algebra`.
    pub fn new(algebra: &Algebra<S>, images: Vec<S>) -> Result<Self> {
        let tau = Self::unchecked(images);
        let report = validate_tau(algebra, &tau);
        if report.is_valid() {
            Ok(tau)
        } else {
            Err(Error::MalformedAlgebra(format!("τ is not a homomorphism: {report}")))
        }
    }

    pub fn identity() -> Self {
        Self::unchecked(vec![S::one()])
    }

    pub fn images(&self) -> &[S] {
        &self.images
    }

    pub fn apply(&self, a: &AlgebraElement<S>) -> Result<S> {
        check_dim(self.images.len(), a.dim())?;
        Ok(a.coords.iter().zip(&self.images).fold(S::zero(), |acc, (k, t)| acc + k.clone() * t.clone()))
    }
}

/// Checks `τ(1) = 1` and `τ(b_i b_j) = τ(b_i) τ(b_j)` on all basis pairs.
pub fn validate_tau<S: Scalar>(algebra: &Algebra<S>, tau: &TauMap<S>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = algebra.dim();
    if tau.images.len() != n {
        report.push(format!("τ has {} images but the algebra has dimension {n}", tau.images.len()));
        return report;
    }
    let one = tau.apply(&algebra.one()).expect("sized");
    if !one.approx_eq(&S::one()) {
        report.push(format!("τ(1) = {one}, expected 1"));
    }
    for i in 0..n {
        for j in 0..n {
            let prod = algebra.multiply(&algebra.basis_element(i), &algebra.basis_element(j)).expect("sized");
            let lhs = tau.apply(&prod).expect("sized");
            let rhs = tau.images[i].clone() * tau.images[j].clone();
            if !lhs.approx_eq(&rhs) {
                report.push(format!(
                    "τ({}·{}) = {lhs} but τ({})τ({}) = {rhs}",
                    algebra.basis[i], algebra.basis[j], algebra.basis[i], algebra.basis[j]
                ));
            }
        }
    }
    report
}

/// An algebra together with a homomorphism to `k`; this is the data that
/// turns a `k`-vector space into a `τ`-normed `Λ`-module.
#[derive(Debug, Clone)]
pub struct LambdaAction<S: Scalar> {
    pub algebra: Arc<Algebra<S>>,
    pub tau: TauMap<S>,
}

impl<S: Scalar> LambdaAction<S> {
    pub fn new(algebra: Algebra<S>, tau: TauMap<S>) -> Result<Self> {
        let report = algebra.validate();
        if !report.is_valid() {
            return Err(Error::MalformedAlgebra(report.to_string()));
        }
        let tau = TauMap::new(&algebra, tau.images)?;
        Ok(Self { algebra: Arc::new(algebra), tau })
    }

    /// `Λ = k`, `τ = id`.
    pub fn ground() -> Self {
        Self { algebra: Arc::new(Algebra::ground_field()), tau: TauMap::identity() }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn tau(&self, a: &AlgebraElement<S>) -> Result<S> {
        self.tau.apply(a)
    }

    pub fn is_ground(&self) -> bool {
        self.algebra.dim() == 1 && self.tau.images[0] == S::one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// A finite quiver with monomial relations.
///
/// Relations are written in composition order: `["beta", "alpha"]` is the
/// path that runs `alpha` first and then `beta`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Vec<String>>,
}

/// A basis path: either the trivial path at a vertex or a nonempty sequence
/// of arrows in traversal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Path {
    Trivial(usize),
    Arrows(Vec<usize>),
}

/// Default cap on the number of basis paths.
pub const DEFAULT_PATH_BOUND: usize = 4096;

/// A path algebra `kQ/I` together with the paths that index its basis.
#[derive(Debug, Clone)]
pub struct PathAlgebra<S: Scalar> {
    pub algebra: Algebra<S>,
    pub paths: Vec<Path>,
    vertex_count: usize,
}

impl<S: Scalar> PathAlgebra<S> {
    /// `τ(e_v) = 1` and every other basis path to 0.
    pub fn tau_at_vertex(&self, vertex: usize) -> Result<TauMap<S>> {
        if vertex >= self.vertex_count {
            return Err(Error::MalformedQuiver(format!("no vertex with index {vertex}")));
        }
        let images = self
            .paths
            .iter()
            .map(|p| match p {
                Path::Trivial(v) if *v == vertex => S::one(),
                _ => S::zero(),
            })
            .collect();
        TauMap::new(&self.algebra, images)
    }
}

impl Quiver {
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    fn endpoints(&self) -> Result<Vec<(usize, usize)>> {
        self.arrows
            .iter()
            .map(|a| {
                let s = self.vertex_index(&a.from).ok_or_else(|| {
                    Error::MalformedQuiver(format!("arrow `{}` starts at unknown vertex `{}`", a.name, a.from))
                })?;
                let t = self.vertex_index(&a.to).ok_or_else(|| {
                    Error::MalformedQuiver(format!("arrow `{}` ends at unknown vertex `{}`", a.name, a.to))
                })?;
                Ok((s, t))
            })
            .collect()
    }

    /// Relations converted to traversal order, checked for composability.
    fn relation_paths(&self, ends: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
        self.relations
            .iter()
            .map(|rel| {
                if rel.len() < 2 {
                    return Err(Error::MalformedRelation(format!("relation {rel:?} has length below 2")));
                }
                let mut trav = rel
                    .iter()
                    .map(|n| {
                        self.arrow_index(n).ok_or_else(|| Error::MalformedRelation(format!("unknown arrow `{n}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                trav.reverse();
                for w in trav.windows(2) {
                    if ends[w[0]].1 != ends[w[1]].0 {
                        return Err(Error::MalformedRelation(format!("relation {rel:?} is not a composable path")));
                    }
                }
                Ok(trav)
            })
            .collect()
    }

    /// Builds `kQ/I` for the monomial ideal generated by the relations.
    ///
    /// Fails with [`Error::InfiniteDimensional`] once more than `bound`
    /// surviving paths are found.
    pub fn path_algebra<S: Scalar>(&self, bound: usize) -> Result<PathAlgebra<S>> {
        let ends = self.endpoints()?;
        let relations = self.relation_paths(&ends)?;
        let contains_relation =
            |trav: &[usize]| relations.iter().any(|r| trav.windows(r.len()).any(|w| w == r.as_slice()));

        let mut paths: Vec<Path> = (0..self.vertices.len()).map(Path::Trivial).collect();
        let mut queue: VecDeque<Vec<usize>> = (0..self.arrows.len()).map(|a| vec![a]).collect();
        while let Some(trav) = queue.pop_front() {
            if paths.len() >= bound {
                return Err(Error::InfiniteDimensional { bound });
            }
            let end = ends[*trav.last().expect("nonempty")].1;
            paths.push(Path::Arrows(trav.clone()));
            for (a, &(s, _)) in ends.iter().enumerate() {
                if s != end {
                    continue;
                }
                let mut next = trav.clone();
                next.push(a);
                // Only suffixes can newly contain a relation.
                if !relations.iter().any(|r| next.ends_with(r)) {
                    queue.push_back(next);
                }
            }
        }
        debug_assert!(paths.iter().all(|p| match p {
            Path::Arrows(t) => !contains_relation(t),
            Path::Trivial(_) => true,
        }));

        let index: HashMap<Path, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let source = |p: &Path| match p {
            Path::Trivial(v) => *v,
            Path::Arrows(t) => ends[t[0]].0,
        };
        let target = |p: &Path| match p {
            Path::Trivial(v) => *v,
            Path::Arrows(t) => ends[*t.last().expect("nonempty")].1,
        };

        let n = paths.len();
        let mut structure = vec![vec![vec![S::zero(); n]; n]; n];
        for (i, p) in paths.iter().enumerate() {
            for (j, q) in paths.iter().enumerate() {
                // p · q runs q first.
                if source(p) != target(q) {
                    continue;
                }
                let product = match (p, q) {
                    (Path::Trivial(_), _) => Some(q.clone()),
                    (_, Path::Trivial(_)) => Some(p.clone()),
                    (Path::Arrows(a), Path::Arrows(b)) => {
                        let mut trav = b.clone();
                        trav.extend(a);
                        (!contains_relation(&trav)).then_some(Path::Arrows(trav))
                    }
                };
                if let Some(k) = product.and_then(|r| index.get(&r).copied()) {
                    structure[i][j][k] = S::one();
                }
            }
        }
        let unit = paths
            .iter()
            .map(|p| match p {
                Path::Trivial(_) => S::one(),
                Path::Arrows(_) => S::zero(),
            })
            .collect();
        let names = paths.iter().map(|p| self.path_name(p)).collect();
        Ok(PathAlgebra {
            algebra: Algebra::new(names, structure, unit, None)?,
            paths,
            vertex_count: self.vertices.len(),
        })
    }

    fn path_name(&self, p: &Path) -> String {
        match p {
            Path::Trivial(v) => format!("e{}", self.vertices[*v]),
            Path::Arrows(t) => {
                let names: Vec<&str> = t.iter().rev().map(|&a| self.arrows[a].name.as_str()).collect();
                if names.iter().all(|n| n.chars().count() == 1) {
                    names.concat()
                } else {
                    names.join("·")
                }
            }
        }
    }
}

/// Builds the path algebra of `q` with the default path bound.
pub fn path_algebra_from_quiver<S: Scalar>(q: &Quiver) -> Result<PathAlgebra<S>> {
    q.path_algebra(DEFAULT_PATH_BOUND)
}

/// The algebra of lower-triangular 2×2 matrices on basis `E11, E21, E22`.
pub fn lower_triangular<S: Scalar>() -> Algebra<S> {
    // E_ij E_kl = δ_jk E_il
    let names = ["E11", "E21", "E22"];
    let idx = |i: usize, j: usize| match (i, j) {
        (1, 1) => Some(0),
        (2, 1) => Some(1),
        (2, 2) => Some(2),
        _ => None,
    };
    let pairs = [(1, 1), (2, 1), (2, 2)];
    let mut structure = vec![vec![vec![S::zero(); 3]; 3]; 3];
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate() {
            if j == k {
                if let Some(c) = idx(i, l) {
                    structure[a][b][c] = S::one();
                }
            }
        }
    }
    Algebra::new(names.iter().map(|s| s.to_string()).collect(), structure, vec![S::one(), S::zero(), S::one()], None)
        .expect("triangular algebra is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn arrow(name: &str, from: &str, to: &str) -> Arrow {
        Arrow { name: name.into(), from: from.into(), to: to.into() }
    }

    #[test]
    fn ground_field_is_valid() {
        assert!(Algebra::<Rational>::ground_field().validate().is_valid());
    }

    #[test]
    fn triangular_is_valid_and_orthogonal() {
        let a = lower_triangular::<Rational>();
        assert!(a.validate().is_valid());
        let e11 = a.basis_element(0);
        let e22 = a.basis_element(2);
        assert_eq!(a.multiply(&e11, &e22).unwrap(), a.zero());
        assert_eq!(a.multiply(&e22, &e11).unwrap(), a.zero());
        let x = a.element(vec![q(2, 3), q(-1, 1), q(5, 1)]).unwrap();
        assert_eq!(a.multiply(&a.one(), &x).unwrap(), x);
    }

    #[test]
    fn corrupted_triangular_reports_associativity() {
        let a = lower_triangular::<Rational>();
        let n = 3;
        let mut structure = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (i, row) in structure.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                for (k, c) in entry.iter_mut().enumerate() {
                    *c = a.structure_constant(i, j, k).clone();
                }
            }
        }
        // E21 · E11 = E22 instead of E21
        structure[1][0] = vec![Rational::zero(), Rational::zero(), Rational::one()];
        let bad = Algebra::new(a.basis().to_vec(), structure, a.one().coords, None).unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("associativity fails on (E21, E11, E11)")));
    }

    #[test]
    fn norm_examples() {
        let k = Algebra::<Rational>::ground_field();
        assert_eq!(k.norm_p(&k.zero(), 1.0).unwrap(), 0.0);
        assert_eq!(k.norm_1(&k.element(vec![q(-3, 1)]).unwrap()).unwrap(), q(3, 1));
        let t = lower_triangular::<Rational>();
        let a = t.element(vec![q(1, 1), q(2, 1), q(2, 1)]).unwrap();
        assert_eq!(t.norm_p(&a, 2.0).unwrap(), 3.0);
        assert_eq!(t.norm_p(&a, 0.5), Err(Error::InvalidP(0.5)));
    }

    #[test]
    fn tau_examples() {
        let k = Algebra::<Rational>::ground_field();
        assert!(validate_tau(&k, &TauMap::identity()).is_valid());
        let t = lower_triangular::<Rational>();
        let good = TauMap::unchecked(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert!(validate_tau(&t, &good).is_valid());
        let bad = TauMap::unchecked(vec![q(1, 1), q(0, 1), q(1, 1)]);
        let report = validate_tau(&t, &bad);
        assert!(report.violations.iter().any(|v| v.contains("τ(E11·E22) = 0")));
        assert!(TauMap::new(&t, bad.images().to_vec()).is_err());
    }

    #[test]
    fn quiver_a2() {
        let quiver =
            Quiver { vertices: vec!["1".into(), "2".into()], arrows: vec![arrow("α", "1", "2")], relations: vec![] };
        let pa = path_algebra_from_quiver::<Rational>(&quiver).unwrap();
        assert_eq!(pa.algebra.basis(), &["e1", "e2", "α"]);
        assert!(pa.algebra.validate().is_valid());
        let alpha = pa.algebra.basis_element(2);
        let e1 = pa.algebra.basis_element(0);
        let e2 = pa.algebra.basis_element(1);
        assert_eq!(pa.algebra.multiply(&alpha, &e1).unwrap(), alpha);
        assert_eq!(pa.algebra.multiply(&e2, &alpha).unwrap(), alpha);
        assert_eq!(pa.algebra.multiply(&e1, &alpha).unwrap(), pa.algebra.zero());
        assert!(pa.tau_at_vertex(0).is_ok());
        assert!(pa.tau_at_vertex(1).is_ok());
    }

    #[test]
    fn single_vertex_is_ground_field() {
        let quiver = Quiver { vertices: vec!["v".into()], ..Default::default() };
        let pa = path_algebra_from_quiver::<Rational>(&quiver).unwrap();
        assert_eq!(pa.algebra.dim(), 1);
        assert_eq!(pa.algebra.structure_constant(0, 0, 0), &Rational::one());
        assert_eq!(pa.algebra.one().coords, vec![Rational::one()]);
    }

    #[test]
    fn a3_with_relation() {
        let quiver = Quiver {
            vertices: vec!["1".into(), "2".into(), "3".into()],
            arrows: vec![arrow("α", "1", "2"), arrow("β", "2", "3")],
            relations: vec![vec!["β".into(), "α".into()]],
        };
        let pa = path_algebra_from_quiver::<Rational>(&quiver).unwrap();
        assert_eq!(pa.algebra.basis(), &["e1", "e2", "e3", "α", "β"]);
        assert!(pa.algebra.validate().is_valid());
        let (alpha, beta) = (pa.algebra.basis_element(3), pa.algebra.basis_element(4));
        assert_eq!(pa.algebra.multiply(&beta, &alpha).unwrap(), pa.algebra.zero());

        let free = Quiver { relations: vec![], ..quiver.clone() };
        assert_eq!(path_algebra_from_quiver::<Rational>(&free).unwrap().algebra.dim(), 6);
    }

    #[test]
    fn quiver_errors() {
        let loop_quiver = Quiver { vertices: vec!["1".into()], arrows: vec![arrow("x", "1", "1")], relations: vec![] };
        assert_eq!(loop_quiver.path_algebra::<Rational>(50).unwrap_err(), Error::InfiniteDimensional { bound: 50 });
        let nilpotent = Quiver { relations: vec![vec!["x".into(), "x".into()]], ..loop_quiver.clone() };
        assert_eq!(nilpotent.path_algebra::<Rational>(50).unwrap().algebra.dim(), 2);

        let uncomposable = Quiver {
            vertices: vec!["1".into(), "2".into(), "3".into()],
            arrows: vec![arrow("α", "1", "2"), arrow("β", "2", "3")],
            relations: vec![vec!["α".into(), "β".into()]],
        };
        assert!(matches!(uncomposable.path_algebra::<Rational>(50), Err(Error::MalformedRelation(_))));
        let short = Quiver { relations: vec![vec!["α".into()]], ..uncomposable.clone() };
        assert!(matches!(short.path_algebra::<Rational>(50), Err(Error::MalformedRelation(_))));
    }
}
