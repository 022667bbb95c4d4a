//! Subcommand bodies, generic over the scalar backend.

use serde::Serialize;

use catint::engine::{chase_limit, theta, theta_limit, ConvergenceReport, TargetObject};
use catint::scalar::{Backend, Rational, RealScalar, Scalar, ScalarValue};
use catint::stepfn::{direct_sum_norm, sample, Sampler, StepFunction};
use catint::targets::{
    antiderive, check_calculus_config, fourier_coefficient, integrate, poly_norm, weak_derivative,
    AntiderivativeTarget, Integrand, IntegrationTarget, PiecewiseLinear,
};
use catint::verify::{summarize, SuiteRegistry};
use catint::{Error, Result};

use crate::config::RunConfig;
use crate::expr::FunctionSpec;

/// What a command prints, and whether its limit converged.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub converged: bool,
    pub verified: bool,
}

impl Output {
    fn json(value: &impl Serialize, converged: bool) -> Self {
        Self { text: serde_json::to_string(value).expect("serializable output"), converged, verified: true }
    }
}

#[derive(Serialize)]
struct Report<V: Serialize> {
    value: V,
    level_reached: u32,
    converged: bool,
    residual: Option<f64>,
}

impl<V: Serialize> Report<V> {
    fn new(value: V, r: &ConvergenceReport) -> Self {
        Self {
            value,
            level_reached: r.level_reached,
            converged: r.converged,
            residual: r.residual.is_finite().then_some(r.residual),
        }
    }
}

fn values<S: Scalar>(xs: &[S]) -> Vec<ScalarValue> {
    xs.iter().map(Scalar::to_value).collect()
}

/// Runs `f` in the configured backend; `fallback` applies when none is set.
fn with_backend(
    cfg: &RunConfig,
    fallback: Backend,
    rational: impl FnOnce() -> Result<Output>,
    float: impl FnOnce() -> Result<Output>,
) -> Result<Output> {
    match cfg.backend.unwrap_or(fallback) {
        Backend::Rational => rational(),
        Backend::Float => float(),
        Backend::Complex => Err(Error::UnsupportedConfiguration(
            "the complex backend has no order, so it cannot carry a measure; use it with `fourier` only".into(),
        )),
    }
}

fn integration_target<S: Scalar>(cfg: &RunConfig) -> Result<IntegrationTarget<S>> {
    IntegrationTarget::new(cfg.action()?, cfg.box_measure()?)
}

pub fn integrate_cmd(cfg: &RunConfig) -> Result<Output> {
    with_backend(cfg, Backend::Rational, || integrate_in::<Rational>(cfg), || integrate_in::<f64>(cfg))
}

fn integrate_in<S: Scalar>(cfg: &RunConfig) -> Result<Output> {
    let t = integration_target::<S>(cfg)?;
    let spec = cfg.function()?;
    let opts = cfg.limit_options::<S>();
    if let Some(p) = cfg.p {
        return lp_norm(cfg, spec, &t, p);
    }
    if let Some(f) = spec.step::<S>(cfg.dim)? {
        let (value, report) = integrate(Integrand::Step(&f), &t, &opts)?;
        return Ok(Output::json(&Report::new(value.to_value(), &report), true));
    }
    let g = spec.sampler::<S>(cfg.dim)?;
    let (value, report) = integrate(Integrand::Sampler(g.as_ref()), &t, &opts)?;
    Ok(Output::json(&Report::new(value.to_value(), &report), report.converged))
}

/// `(∫ |f|^p dμ)^{1/p}`.
fn lp_norm<S: Scalar>(cfg: &RunConfig, spec: &FunctionSpec, t: &IntegrationTarget<S>, p: f64) -> Result<Output> {
    let opts = cfg.limit_options::<f64>();
    if let Some(f) = spec.step::<S>(cfg.dim)? {
        return step_norms(cfg, &f, t, p);
    }
    if let Some(coeffs) = spec.poly_coeffs::<S>()? {
        let (value, report) = poly_norm(&coeffs, p, t, &opts)?;
        return Ok(Output::json(&Report::new(value, &report), report.converged));
    }
    let g = spec.sampler::<S>(cfg.dim)?;
    let power = |x: &[S]| -> Result<S> {
        let y = g.eval(x)?.ordered_abs()?;
        if p.fract() == 0.0 {
            y.powi(p as i32)
        } else {
            y.powf(p)
        }
    };
    let (value, report) = theta_limit(&power, t.measure(), t, &opts)?;
    let norm = value.norm().to_f64().powf(1.0 / p);
    Ok(Output::json(&Report::new(norm, &report), report.converged))
}

#[derive(Serialize)]
struct StepNormReport {
    value: f64,
    step_norm: f64,
    split_norm: Option<f64>,
    level_reached: u32,
    converged: bool,
    residual: Option<f64>,
}

/// L^p norm of a step literal, its step norm, and the `⊕_p` norm of its split.
fn step_norms<S: Scalar>(cfg: &RunConfig, f: &StepFunction<S>, t: &IntegrationTarget<S>, p: f64) -> Result<Output> {
    let bm = t.measure();
    let powered = f
        .coeffs()
        .iter()
        .map(|k| {
            let a = k.ordered_abs()?;
            if p.fract() == 0.0 {
                a.powi(p as i32)
            } else {
                a.powf(p)
            }
        })
        .collect::<Result<Vec<S>>>()?;
    let integral = StepFunction::new(f.dim(), f.level(), powered)?.weighted_sum(bm)?;
    let split_norm = if f.level() == 0 {
        None
    } else {
        let norms = f.split()?.iter().map(|part| part.norm_p(bm, p)).collect::<Result<Vec<f64>>>()?;
        Some(direct_sum_norm(&norms, p, cfg.weight.value(bm)?)?)
    };
    let report = StepNormReport {
        value: integral.norm().to_f64().powf(1.0 / p),
        step_norm: f.norm_p(bm, p)?,
        split_norm,
        level_reached: f.level(),
        converged: true,
        residual: Some(0.0),
    };
    Ok(Output::json(&report, true))
}

pub fn antiderive_cmd(cfg: &RunConfig) -> Result<Output> {
    with_backend(cfg, Backend::Rational, || antiderive_in::<Rational>(cfg), || antiderive_in::<f64>(cfg))
}

fn antiderive_in<S: Scalar>(cfg: &RunConfig) -> Result<Output> {
    let bm = cfg.box_measure::<S>()?;
    let t = AntiderivativeTarget::for_config(&cfg.action()?, &bm)?;
    let spec = cfg.function()?;
    if let Some(f) = spec.step::<S>(cfg.dim)? {
        let big_f = antiderive(&f, f.level())?;
        return Ok(Output::json(&Report::new(values(big_f.values()), &ConvergenceReport::exact(f.level())), true));
    }
    let g = spec.sampler::<S>(cfg.dim)?;
    let (big_f, report) = theta_limit(g.as_ref(), &bm, &t, &cfg.limit_options::<S>())?;
    Ok(Output::json(&Report::new(values(big_f.values()), &report), report.converged))
}

pub fn differentiate_cmd(cfg: &RunConfig) -> Result<Output> {
    with_backend(cfg, Backend::Rational, || differentiate_in::<Rational>(cfg), || differentiate_in::<f64>(cfg))
}

/// Breakpoint values `G(x_j) − G(0)` of `G` at `level`.
fn breakpoints_of<S: Scalar>(g: &dyn Sampler<S>, level: u32) -> Result<PiecewiseLinear<S>> {
    let den = 1i64 << level;
    let origin = g.eval(&[S::zero()])?;
    let vals = (0..=den).map(|j| Ok(g.eval(&[S::from_ratio(j, den)])? - origin.clone())).collect::<Result<Vec<S>>>()?;
    PiecewiseLinear::new(level, vals)
}

fn differentiate_in<S: Scalar>(cfg: &RunConfig) -> Result<Output> {
    let bm = cfg.box_measure::<S>()?;
    check_calculus_config(&cfg.action()?, &bm)?;
    let spec = cfg.function()?;
    if let Some(big_f) = spec.breakpoints::<S>()? {
        let d = weak_derivative(&big_f);
        return Ok(Output::json(&Report::new(values(d.coeffs()), &ConvergenceReport::exact(d.level())), true));
    }
    if spec.step::<S>(cfg.dim)?.is_some() {
        return Err(Error::UnsupportedConfiguration(
            "differentiate takes breakpoints (`pl:`), a polynomial or an expression".into(),
        ));
    }
    let g = spec.sampler::<S>(cfg.dim)?;
    let opts = cfg.limit_options::<S>();
    let (d, report) = chase_limit(
        &opts,
        |u| Ok(weak_derivative(&breakpoints_of(g.as_ref(), u)?)),
        |a: &StepFunction<S>, b: &StepFunction<S>| Ok(a.sub(b)?.norm_1(&bm)?.to_f64()),
    )?;
    Ok(Output::json(&Report::new(values(d.coeffs()), &report), report.converged))
}

#[derive(Serialize)]
struct FourierReport {
    re: f64,
    im: f64,
    k: i64,
    level_reached: u32,
    converged: bool,
    residual: Option<f64>,
}

pub fn fourier_cmd(cfg: &RunConfig) -> Result<Output> {
    if cfg.backend == Some(Backend::Rational) {
        return Err(Error::UnsupportedConfiguration("Fourier coefficients need the float or complex backend".into()));
    }
    if cfg.dim != 1 {
        return Err(Error::UnsupportedConfiguration(format!(
            "Fourier coefficients need one variable, got {}",
            cfg.dim
        )));
    }
    let m = &cfg.measures[0];
    if m.kind != "lebesgue" || m.interval.is_some() || m.xi.is_some() {
        return Err(Error::UnsupportedConfiguration(
            "Fourier coefficients are taken on [0,1] with Lebesgue measure".into(),
        ));
    }
    let spec = cfg.function()?;
    let opts = cfg.limit_options::<f64>();
    let result = match spec.step::<f64>(1)? {
        Some(f) => fourier_coefficient(Integrand::Step(&f), cfg.k, &opts)?,
        None => {
            let g = spec.sampler::<f64>(1)?;
            fourier_coefficient(Integrand::Sampler(g.as_ref()), cfg.k, &opts)?
        }
    };
    let r = &result.report;
    Ok(Output::json(
        &FourierReport {
            re: result.value.re,
            im: result.value.im,
            k: result.k,
            level_reached: r.level_reached,
            converged: r.converged,
            residual: r.residual.is_finite().then_some(r.residual),
        },
        r.converged,
    ))
}

pub fn table_cmd(cfg: &RunConfig) -> Result<Output> {
    with_backend(cfg, Backend::Rational, || table_in::<Rational>(cfg), || table_in::<f64>(cfg))
}

/// CSV `level,value,residual`; the first row has an empty residual.
fn table_in<S: Scalar>(cfg: &RunConfig) -> Result<Output> {
    let t = integration_target::<S>(cfg)?;
    let spec = cfg.function()?;
    let step = spec.step::<S>(cfg.dim)?;
    let sampler = match step {
        Some(_) => None,
        None => Some(spec.sampler::<S>(cfg.dim)?),
    };
    let lo = step.as_ref().map_or(cfg.u_min, |f| cfg.u_min.max(f.level()));
    let mut text = String::from("level,value,residual\n");
    let mut prev: Option<S> = None;
    for u in lo..=cfg.u_max.max(lo) {
        let f = match (&step, &sampler) {
            (Some(f), _) => f.refine_to(u)?,
            (None, Some(g)) => sample(g.as_ref(), t.measure(), u, cfg.convention)?,
            (None, None) => unreachable!("one of step or sampler is set"),
        };
        let value = theta(&f, &t)?;
        let residual = match &prev {
            Some(p) => t.distance(&value, p)?.to_string(),
            None => String::new(),
        };
        text.push_str(&format!("{u},{},{residual}\n", value.to_value()));
        prev = Some(value);
    }
    text.pop();
    Ok(Output { text, converged: true, verified: true })
}

pub fn verify_cmd(cfg: &RunConfig) -> Result<Output> {
    let registry = SuiteRegistry::standard();
    let reports = registry.run(&cfg.suite, cfg.cases, cfg.seed).ok_or_else(|| {
        Error::UnsupportedConfiguration(format!(
            "unknown suite `{}`; choose one of all, {}",
            cfg.suite,
            registry.names().join(", ")
        ))
    })?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!("{r}\n"));
    }
    let (cases, failed) = summarize(&reports);
    text.push_str(&format!("total: {} passed, {failed} failed of {cases}", cases - failed));
    Ok(Output { text, converged: true, verified: failed == 0 })
}
