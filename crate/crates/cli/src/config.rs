//! Run configuration: a JSON file merged under command-line flags.

use std::path::Path;

use serde::Deserialize;

use catint::algebra::{Algebra, Arrow, LambdaAction, Quiver, TauMap, DEFAULT_PATH_BOUND};
use catint::engine::LimitOptions;
use catint::measure::{BoxMeasure, Distribution, DistributionMeasure, SplitScheme};
use catint::scalar::{Backend, Scalar};
use catint::stepfn::{max_level, Convention, DirectSumWeight};
use catint::{Error, Result};

use crate::expr::FunctionSpec;

/// A number written either as a JSON number or as a string such as `"1/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Text(String),
    Number(serde_json::Number),
}

impl Literal {
    pub fn text(&self) -> String {
        match self {
            Literal::Text(s) => s.clone(),
            Literal::Number(n) => n.to_string(),
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        S::parse_literal(&self.text())
    }
}

fn scalars<S: Scalar>(items: &[Literal]) -> Result<Vec<S>> {
    items.iter().map(Literal::to_scalar).collect()
}

/// One axis of the box measure.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    /// `lebesgue`, `power` or `polynomial`.
    pub kind: String,
    pub q: Option<f64>,
    pub coeffs: Option<Vec<Literal>>,
    pub interval: Option<[Literal; 2]>,
    pub xi: Option<Literal>,
}

impl MeasureSpec {
    pub fn build<S: Scalar>(&self) -> Result<DistributionMeasure<S>> {
        let dist = match self.kind.as_str() {
            "lebesgue" => Distribution::Lebesgue,
            "power" => Distribution::Power {
                q: self.q.ok_or_else(|| Error::InvalidMeasure("power measure needs `q`".into()))?,
            },
            "polynomial" | "poly" => Distribution::Polynomial {
                coeffs: scalars(
                    self.coeffs
                        .as_deref()
                        .ok_or_else(|| Error::InvalidMeasure("polynomial measure needs `coeffs`".into()))?,
                )?,
            },
            other => return Err(Error::InvalidMeasure(format!("unknown measure kind `{other}`"))),
        };
        let (a, b) = match &self.interval {
            Some([a, b]) => (a.to_scalar::<S>()?, b.to_scalar::<S>()?),
            None => (S::zero(), S::one()),
        };
        let scheme = match &self.xi {
            Some(xi) => SplitScheme::new(a, b, xi.to_scalar()?)?,
            None => SplitScheme::midpoint(a, b)?,
        };
        DistributionMeasure::new(dist, scheme)
    }
}

/// A single measure for every axis, or one per axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MeasureField {
    Uniform(MeasureSpec),
    PerAxis(Vec<MeasureSpec>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub basis: Vec<String>,
    /// `structure[i][j][k]`: coefficient of `e_k` in `e_i e_j`.
    pub structure: Vec<Vec<Vec<Literal>>>,
    pub unit: Vec<Literal>,
    /// Images of the basis under `τ`.
    pub tau: Vec<Literal>,
    pub nu: Option<Vec<Literal>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    /// Zero relations, each a path written in composition order.
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
    /// `τ` projects onto the trivial path at this vertex (default: first).
    pub vertex: Option<String>,
    pub bound: Option<usize>,
}

/// The JSON file accepted by `--config`.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub function: Option<String>,
    pub dim: Option<usize>,
    pub measure: Option<MeasureField>,
    pub backend: Option<String>,
    pub levels: Option<String>,
    pub tol: Option<f64>,
    pub convention: Option<String>,
    pub weight: Option<String>,
    pub k: Option<i64>,
    pub p: Option<f64>,
    pub suite: Option<String>,
    pub cases: Option<usize>,
    pub seed: Option<u64>,
    pub algebra: Option<AlgebraSpec>,
    pub quiver: Option<QuiverSpec>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::UnsupportedConfiguration(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse { pos: e.column(), msg: format!("{}: line {}: {e}", path.display(), e.line()) })
    }
}

/// Measure settings given as flags; they replace the file's measure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureFlags {
    pub kind: Option<String>,
    pub q: Option<f64>,
    pub coeffs: Option<String>,
    pub interval: Option<String>,
    pub xi: Option<String>,
}

fn comma_literals(s: &str) -> Vec<Literal> {
    s.split(',').map(|p| Literal::Text(p.trim().to_string())).collect()
}

impl MeasureFlags {
    fn any(&self) -> bool {
        self.kind.is_some() || self.q.is_some() || self.coeffs.is_some() || self.interval.is_some() || self.xi.is_some()
    }

    fn merge_into(&self, base: Option<MeasureSpec>) -> Result<MeasureSpec> {
        let mut spec = base.unwrap_or_else(|| MeasureSpec { kind: "lebesgue".into(), ..Default::default() });
        if let Some(kind) = &self.kind {
            spec.kind = match kind.as_str() {
                "x^2" | "squared" => {
                    spec.coeffs = Some(comma_literals("0,0,1"));
                    "polynomial".into()
                }
                other => other.to_string(),
            };
        }
        if self.q.is_some() {
            spec.q = self.q;
        }
        if let Some(c) = &self.coeffs {
            spec.coeffs = Some(comma_literals(c));
        }
        if let Some(i) = &self.interval {
            let parts = comma_literals(i);
            let [a, b]: [Literal; 2] =
                parts.try_into().map_err(|_| Error::InvalidMeasure(format!("interval `{i}` must be `a,b`")))?;
            spec.interval = Some([a, b]);
        }
        if let Some(xi) = &self.xi {
            spec.xi = Some(Literal::Text(xi.clone()));
        }
        Ok(spec)
    }
}

/// Values given on the command line; each overrides the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub function: Option<String>,
    pub dim: Option<usize>,
    pub measure: MeasureFlags,
    pub backend: Option<String>,
    pub levels: Option<String>,
    pub tol: Option<f64>,
    pub convention: Option<String>,
    pub weight: Option<String>,
    pub k: Option<i64>,
    pub p: Option<f64>,
    pub suite: Option<String>,
    pub cases: Option<usize>,
    pub seed: Option<u64>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub function: Option<FunctionSpec>,
    pub dim: usize,
    pub measures: Vec<MeasureSpec>,
    pub backend: Option<Backend>,
    pub u_min: u32,
    pub u_max: u32,
    pub tol: Option<f64>,
    pub convention: Convention,
    pub weight: DirectSumWeight,
    pub k: i64,
    pub p: Option<f64>,
    pub suite: String,
    pub cases: usize,
    pub seed: u64,
    pub algebra: Option<AlgebraSpec>,
    pub quiver: Option<QuiverSpec>,
}

/// Parses `a:b` into a level range.
pub fn parse_levels(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Parse { pos: 0, msg: format!("levels `{s}` must look like `4:16`") };
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Error::UnsupportedConfiguration(format!("level range {a}:{b} is empty")));
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn merge(file: FileConfig, flags: Overrides) -> Result<Self> {
        let dim = flags.dim.or(file.dim).unwrap_or(1);
        if dim == 0 {
            return Err(Error::UnsupportedConfiguration("dimension must be at least 1".into()));
        }
        let cap = max_level(dim);
        let measures = match (flags.measure.any(), file.measure) {
            (true, Some(MeasureField::Uniform(m))) => vec![flags.measure.merge_into(Some(m))?; dim],
            (true, _) => vec![flags.measure.merge_into(None)?; dim],
            (false, Some(MeasureField::Uniform(m))) => vec![m; dim],
            (false, Some(MeasureField::PerAxis(ms))) => {
                if ms.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: ms.len() });
                }
                ms
            }
            (false, None) => vec![flags.measure.merge_into(None)?; dim],
        };
        let (u_min, u_max) = match flags.levels.or(file.levels) {
            Some(s) => parse_levels(&s)?,
            None => (4.min(cap), 16.min(cap)),
        };
        if u_max > cap {
            return Err(Error::LevelOverflow { level: u_max, max: cap, dim });
        }
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if t.is_nan() || t < 0.0 {
                return Err(Error::UnsupportedConfiguration(format!("tolerance {t} is negative")));
            }
        }
        let p = flags.p.or(file.p);
        if let Some(p) = p {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidP(p));
            }
        }
        if file.algebra.is_some() && file.quiver.is_some() {
            return Err(Error::UnsupportedConfiguration("give either `algebra` or `quiver`, not both".into()));
        }
        let function = flags.function.or(file.function).map(|f| FunctionSpec::parse(&f, dim)).transpose()?;
        Ok(Self {
            function,
            dim,
            measures,
            backend: flags.backend.or(file.backend).map(|b| b.parse()).transpose()?,
            u_min,
            u_max,
            tol,
            convention: flags.convention.or(file.convention).map(|c| c.parse()).transpose()?.unwrap_or_default(),
            weight: flags.weight.or(file.weight).map(|w| w.parse()).transpose()?.unwrap_or_default(),
            k: flags.k.or(file.k).unwrap_or(1),
            p,
            suite: flags.suite.or(file.suite).unwrap_or_else(|| "all".into()),
            cases: flags.cases.or(file.cases).unwrap_or(100),
            seed: flags.seed.or(file.seed).unwrap_or(42),
            algebra: file.algebra,
            quiver: file.quiver,
        })
    }

    pub fn function(&self) -> Result<&FunctionSpec> {
        self.function
            .as_ref()
            .ok_or_else(|| Error::UnsupportedConfiguration("no function given; pass --function".into()))
    }

    pub fn box_measure<S: Scalar>(&self) -> Result<BoxMeasure<S>> {
        BoxMeasure::new(self.measures.iter().map(MeasureSpec::build).collect::<Result<_>>()?)
    }

    /// `tol` as configured, or the backend default.
    pub fn limit_options<S: Scalar>(&self) -> LimitOptions {
        let defaults = LimitOptions::for_backend::<S>(self.u_max);
        LimitOptions {
            tol: self.tol.unwrap_or(defaults.tol),
            u_min: self.u_min,
            u_max: self.u_max,
            convention: self.convention,
        }
    }

    /// The algebra and `τ`, validated; the ground field when neither is given.
    pub fn action<S: Scalar>(&self) -> Result<LambdaAction<S>> {
        if let Some(spec) = &self.algebra {
            let structure = spec
                .structure
                .iter()
                .map(|row| row.iter().map(|e| scalars(e)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let nu = spec
                .nu
                .as_ref()
                .map(|nu| nu.iter().map(|l| S::parse_literal(&l.text()).map(|s| s.norm())).collect::<Result<Vec<_>>>())
                .transpose()?;
            let algebra = Algebra::new(spec.basis.clone(), structure, scalars(&spec.unit)?, nu)?;
            let tau = TauMap::new(&algebra, scalars(&spec.tau)?)?;
            return LambdaAction::new(algebra, tau);
        }
        if let Some(spec) = &self.quiver {
            let quiver = Quiver {
                vertices: spec.vertices.clone(),
                arrows: spec
                    .arrows
                    .iter()
                    .map(|a| Arrow { name: a.name.clone(), from: a.from.clone(), to: a.to.clone() })
                    .collect(),
                relations: spec.relations.clone(),
            };
            let pa = quiver.path_algebra::<S>(spec.bound.unwrap_or(DEFAULT_PATH_BOUND))?;
            let vertex = match &spec.vertex {
                Some(v) => {
                    quiver.vertex_index(v).ok_or_else(|| Error::MalformedQuiver(format!("unknown vertex `{v}`")))?
                }
                None => 0,
            };
            let tau = pa.tau_at_vertex(vertex)?;
            return LambdaAction::new(pa.algebra, tau);
        }
        Ok(LambdaAction::ground())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use catint::scalar::Rational;

    fn file(json: &str) -> FileConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let f = file(r#"{"function": "x1", "levels": "2:6", "tol": 0.5, "measure": {"kind": "power", "q": 2}}"#);
        let o = Overrides {
            levels: Some("3:5".into()),
            measure: MeasureFlags { q: Some(3.0), ..Default::default() },
            ..Default::default()
        };
        let c = RunConfig::merge(f, o).unwrap();
        assert_eq!((c.u_min, c.u_max, c.tol), (3, 5, Some(0.5)));
        assert_eq!(c.measures[0].kind, "power");
        assert_eq!(c.measures[0].q, Some(3.0));
    }

    #[test]
    fn per_axis_measures() {
        let f = file(
            r#"{"dim": 2, "measure": [{"kind": "lebesgue", "interval": ["-1", 1], "xi": "1/3"},
                                      {"kind": "polynomial", "coeffs": [0, 0, 1]}]}"#,
        );
        let c = RunConfig::merge(f, Overrides::default()).unwrap();
        let bm = c.box_measure::<Rational>().unwrap();
        assert_eq!(bm.total(), &Rational::from_ratio(2, 1));
        assert_eq!(c.u_max, 12);
        let bad = file(r#"{"dim": 3, "measure": [{"kind": "lebesgue"}]}"#);
        assert!(RunConfig::merge(bad, Overrides::default()).is_err());
    }

    #[test]
    fn algebra_and_quiver() {
        let f = file(r#"{"algebra": {"basis": ["1"], "structure": [[["1"]]], "unit": [1], "tau": [1]}}"#);
        let c = RunConfig::merge(f, Overrides::default()).unwrap();
        assert!(c.action::<Rational>().unwrap().is_ground());
        let q = file(
            r#"{"quiver": {"vertices": ["1", "2"], "arrows": [{"name": "a", "from": "1", "to": "2"}], "vertex": "2"}}"#,
        );
        let c = RunConfig::merge(q, Overrides::default()).unwrap();
        assert_eq!(c.action::<Rational>().unwrap().dim(), 3);
        let broken = file(r#"{"algebra": {"basis": ["1"], "structure": [[["2"]]], "unit": [1], "tau": [1]}}"#);
        assert!(RunConfig::merge(broken, Overrides::default()).unwrap().action::<Rational>().is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let merge = |o: Overrides| RunConfig::merge(FileConfig::default(), o);
        assert!(merge(Overrides { levels: Some("9".into()), ..Default::default() }).is_err());
        assert!(merge(Overrides { levels: Some("5:4".into()), ..Default::default() }).is_err());
        assert!(merge(Overrides { levels: Some("1:30".into()), ..Default::default() }).is_err());
        assert!(merge(Overrides { convention: Some("sideways".into()), ..Default::default() }).is_err());
        assert!(merge(Overrides { p: Some(0.5), ..Default::default() }).is_err());
        assert!(merge(Overrides { function: Some("x2".into()), ..Default::default() }).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"funtion": "x1"}"#).is_err());
    }
}
