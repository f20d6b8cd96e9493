//! Execution of one experiment and assembly of its report.

use std::f64::consts::PI;

use multipolar_hardy::comparison::{cosine_chain_suite, laplace_comparison_check, toponogov_suite, BoundSide};
use multipolar_hardy::geometry::{AxiGrid, EquatorCap, GeodesicBump, GridResolution, Region, ScalarField, TestField, ZeroField};
use multipolar_hardy::hardy::{
    verify_hemisphere, verify_remark_c, verify_theorem1, verify_theorem2, weight_euclidean_cz, weight_pairwise_gradient, HardyReport,
};
use multipolar_hardy::sharpness::{assess_sweep, rayleigh_probe, sharpness_sweep, PowerCutoffFamily, SweepRecord};
use multipolar_hardy::variational::{
    mu0_estimate, pm_diagnostics, pm_grid, solve_hemisphere, solve_pm, hemisphere_grid, BumpFamily, Classification,
    FvGrid, HemisphereConfig, PmConfig, SolveResult,
};
use multipolar_hardy::{Curvature, ModelSpace, PoleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::{Command, ExperimentSpec, FieldSpec};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl Assertion {
    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            passed: value >= bound,
            value,
            bound,
        }
    }

    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
        }
    }
}

/// Everything one run produces.
pub struct Outcome {
    pub result: Value,
    pub assertions: Vec<Assertion>,
    /// `(file name, contents)` of CSV outputs.
    pub csv: Vec<(String, String)>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn space(spec: &ExperimentSpec) -> Result<ModelSpace, CliError> {
    let s = spec.space.as_ref().ok_or_else(|| CliError::Spec("missing [space]".into()))?;
    let m = ModelSpace::new(s.n, Curvature::new(s.c)?)?;
    Ok(if s.hemisphere { m.restricted_to_hemisphere()? } else { m })
}

fn poles(spec: &ExperimentSpec, space: ModelSpace) -> Result<PoleSet, CliError> {
    match (&spec.poles.axis, spec.poles.hemisphere_b) {
        (Some(axis), None) => Ok(PoleSet::on_axis(space, axis)?),
        (None, Some(b)) => Ok(PoleSet::symmetric_hemisphere_pair(space, b)?),
        (Some(_), Some(_)) => Err(CliError::Spec("give either poles.axis or poles.hemisphere_b, not both".into())),
        (None, None) => Err(CliError::Spec("missing poles".into())),
    }
}

/// The test field and the radius about the base point containing its support.
fn field(spec: &ExperimentSpec, space: &ModelSpace, poles: &PoleSet) -> Result<(Box<dyn TestField>, f64), CliError> {
    match spec.field.clone().unwrap_or(FieldSpec::Zero) {
        FieldSpec::Zero => Ok((Box::new(ZeroField), poles.max_distance_from_base()? + 1.0)),
        FieldSpec::Bump { center, radius, amplitude } => {
            let c = space.axis_point(center)?;
            Ok((Box::new(GeodesicBump::new(c, radius, amplitude)), center.abs() + radius))
        }
        FieldSpec::EquatorCap { power, tilt } => {
            if !space.is_hemisphere() {
                return Err(CliError::Spec("equator-cap fields live on the hemisphere".into()));
            }
            Ok((Box::new(EquatorCap { power, tilt }), 0.5 * PI / space.curvature().value().sqrt()))
        }
    }
}

fn axi_grid(spec: &ExperimentSpec, space: ModelSpace, poles: &PoleSet, support: f64) -> Result<AxiGrid, CliError> {
    let g = &spec.grid;
    let d = GridResolution::default();
    let resolution = GridResolution {
        n_r: g.n_r.unwrap_or(d.n_r),
        n_theta: g.n_theta.unwrap_or(d.n_theta),
    };
    let outer = g.radius.unwrap_or(if space.is_hemisphere() { support } else { 1.05 * support });
    let region = match g.inner {
        Some(inner) => Region::Annulus { inner, outer },
        None => Region::Ball { radius: outer },
    };
    Ok(AxiGrid::build(space, poles, region, resolution, g.delta)?)
}

fn field_csv(grid: &AxiGrid, field: &dyn TestField) -> Result<String, CliError> {
    let sampled = ScalarField::sample(grid, field)?;
    let mut buf = Vec::new();
    sampled.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn fv_csv(grid: &FvGrid, values: &[f64]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    grid.write_csv(values, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn inequality_assertions(spec: &ExperimentSpec, name: &str, r: &HardyReport, out: &mut Vec<Assertion>) {
    out.push(Assertion::at_least(&format!("{name}: residual >= -tol"), r.residual, -r.tol));
    if let Some(m) = spec.assertions.min_relative_margin {
        out.push(Assertion::at_least(&format!("{name}: relative margin"), r.relative_margin, m));
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    spec.validate()?;
    match spec.command {
        Command::VerifyThm1 | Command::VerifyThm2 | Command::VerifyHemisphere => verify(spec),
        Command::VerifyRemark => remark(spec),
        Command::SweepSharpness => sweep(spec),
        Command::CheckComparison => comparison(spec),
        Command::CheckIdentity => identity(spec),
        Command::SolvePm => pm(spec),
        Command::SolveHemisphere => hemisphere(spec),
        Command::EstimateMu0 => mu0(spec),
        Command::RayleighProbe => probe(spec),
    }
}

fn verify(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let s = space(spec)?;
    let p = poles(spec, s)?;
    let (f, support) = field(spec, &s, &p)?;
    let grid = axi_grid(spec, s, &p, support)?;
    let report = match spec.command {
        Command::VerifyThm1 => verify_theorem1(&p, f.as_ref(), &grid)?,
        Command::VerifyThm2 => {
            let k0 = Curvature::new(spec.k0.expect("validated"))?;
            verify_theorem2(&p, f.as_ref(), &grid, k0)?
        }
        _ => verify_hemisphere(&p, f.as_ref(), &grid)?,
    };
    let mut assertions = Vec::new();
    inequality_assertions(spec, "inequality", &report, &mut assertions);
    Ok(Outcome {
        result: to_value(&report),
        assertions,
        csv: vec![("field.csv".into(), field_csv(&grid, f.as_ref())?)],
    })
}

fn remark(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let s = space(spec)?;
    let p = poles(spec, s)?;
    let (f, support) = field(spec, &s, &p)?;
    let grid = axi_grid(spec, s, &p, support)?;
    let report = verify_remark_c(&p, f.as_ref(), &grid)?;
    let mut assertions = Vec::new();
    inequality_assertions(spec, "exact correction", &report.exact, &mut assertions);
    inequality_assertions(spec, "bounded correction", &report.bound, &mut assertions);
    assertions.push(Assertion::at_least(
        "exact correction dominates its bound",
        report.exact.rhs_correction - report.bound.rhs_correction,
        -(report.exact.tol + report.bound.tol),
    ));
    Ok(Outcome {
        result: to_value(&report),
        assertions,
        csv: vec![("field.csv".into(), field_csv(&grid, f.as_ref())?)],
    })
}

fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(SweepRecord::CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

fn sweep(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let s = space(spec)?;
    let p = poles(spec, s)?;
    let sw = spec.sweep.as_ref().expect("validated");
    let records = sharpness_sweep(&p, &sw.epsilons, sw.resolution())?;
    let assessment = assess_sweep(&records);
    let mut assertions = Vec::new();
    if let Some(bound) = spec.assertions.max_relative_error {
        assertions.push(Assertion::at_most("final relative error", assessment.final_relative_error, bound));
    }
    if spec.assertions.decreasing == Some(true) {
        assertions.push(Assertion {
            name: "ratios decrease strictly".into(),
            passed: assessment.strictly_decreasing,
            value: f64::from(u8::from(assessment.strictly_decreasing)),
            bound: 1.0,
        });
    }
    Ok(Outcome {
        result: json!({ "records": records, "assessment": assessment }),
        assertions,
        csv: vec![("sweep.csv".into(), sweep_csv(&records))],
    })
}

fn comparison(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let s = space(spec)?;
    let c = s.curvature();
    let k0 = Curvature::new(spec.k0.expect("validated"))?;
    let seed = spec.seed.expect("validated");
    let samples = spec.comparison.samples;
    let topo = toponogov_suite(&s, k0, samples, seed)?;
    let chain = cosine_chain_suite(&s, k0, samples, seed)?;
    let limit = c.conjugate_radius().min(5.0);
    let points = spec.comparison.laplace_points;
    let r_grid: Vec<f64> = (1..=points).map(|k| limit * k as f64 / (points + 1) as f64).collect();
    let laplace = laplace_comparison_check(s.dim(), c, k0, BoundSide::Lower, &r_grid)?;
    let mut assertions = Vec::new();
    for suite in [&topo, &chain] {
        assertions.push(Assertion::at_most(&format!("{}: failures", suite.name), suite.failed as f64, 0.0));
    }
    assertions.push(Assertion::at_least("laplace comparison: worst margin", laplace.worst_margin, -1e-12));
    Ok(Outcome {
        result: json!({ "toponogov": topo, "cosine_chain": chain, "laplace": laplace }),
        assertions,
        csv: Vec::new(),
    })
}

fn identity(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let n = spec.space.as_ref().map_or(3, |s| s.n);
    let e = ModelSpace::euclidean(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.expect("validated"));
    let samples = spec.comparison.samples;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut p = || e.point((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let (x, a, b) = (p()?, p()?, p()?);
        let wg = weight_pairwise_gradient(&e, &x, &a, &b)?;
        let wc = weight_euclidean_cz(&e, &x, &a, &b)?;
        worst = worst.max((wg - wc).abs() / wc.abs().max(f64::MIN_POSITIVE));
    }
    Ok(Outcome {
        result: json!({ "samples": samples, "worst_relative_deviation": worst }),
        assertions: vec![Assertion::at_most("weights coincide", worst, 1e-12)],
        csv: Vec::new(),
    })
}

fn pm_config(spec: &ExperimentSpec) -> PmConfig {
    let mut cfg = spec.pm.clone().unwrap_or_default();
    if let Some(seed) = spec.seed {
        cfg.seed = seed;
    }
    cfg
}

fn solver_assertions(spec: &ExperimentSpec, results: &[SolveResult], out: &mut Vec<Assertion>) {
    let worst = results.iter().map(|r| r.residual_norm).fold(0.0, f64::max);
    let converged = results.iter().filter(|r| r.converged).count();
    out.push(Assertion::at_least("converged solutions", converged as f64, results.len() as f64));
    if let Some(bound) = spec.assertions.max_residual {
        out.push(Assertion::at_most("worst residual norm", worst, bound));
    }
    let count = |pred: fn(&Classification) -> bool| results.iter().filter(|r| pred(&r.classification)).count();
    if let Some(k) = spec.assertions.min_nontrivial {
        let found = count(|c| *c != Classification::Zero);
        out.push(Assertion::at_least("nontrivial solutions", found as f64, k as f64));
    }
    if let Some(k) = spec.assertions.min_zero {
        let found = count(|c| *c == Classification::Zero);
        out.push(Assertion::at_least("zero solutions", found as f64, k as f64));
    }
}

fn pm(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let cfg = pm_config(spec);
    let results = solve_pm(&cfg)?;
    let grid = pm_grid(&cfg)?;
    let mut assertions = Vec::new();
    solver_assertions(spec, &results, &mut assertions);
    let csv = results
        .iter()
        .enumerate()
        .map(|(k, r)| Ok((format!("solution_{k:02}.csv"), fv_csv(&grid, &r.field)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Outcome {
        result: json!({ "config": cfg, "solutions": results }),
        assertions,
        csv,
    })
}

fn hemisphere(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let cfg: HemisphereConfig = spec.hemisphere_solve.clone().unwrap_or_default();
    let result = solve_hemisphere(&cfg)?;
    let grid = hemisphere_grid(&cfg)?;
    let mut assertions = Vec::new();
    solver_assertions(spec, std::slice::from_ref(&result), &mut assertions);
    Ok(Outcome {
        csv: vec![("solution.csv".into(), fv_csv(&grid, &result.field)?)],
        result: json!({ "config": cfg, "solution": result }),
        assertions,
    })
}

fn mu0(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let cfg = pm_config(spec);
    let family: BumpFamily = spec.mu0.clone().unwrap_or_default();
    let estimate = mu0_estimate(&cfg, &family)?;
    let diagnostics = pm_diagnostics(&cfg)?;
    let mut assertions = Vec::new();
    assertions.push(Assertion::at_least(
        "estimate above the explicit threshold",
        estimate,
        diagnostics.explicit_threshold,
    ));
    Ok(Outcome {
        result: json!({ "config": cfg, "family": family, "mu0_estimate": estimate, "diagnostics": diagnostics }),
        assertions,
        csv: Vec::new(),
    })
}

fn probe(spec: &ExperimentSpec) -> Result<Outcome, CliError> {
    let s = space(spec)?;
    let p = poles(spec, s)?;
    let family = PowerCutoffFamily {
        poles: p.clone(),
        cutoff: spec.probe.cutoff,
    };
    let d = GridResolution::default();
    let resolution = GridResolution {
        n_r: spec.grid.n_r.unwrap_or(d.n_r),
        n_theta: spec.grid.n_theta.unwrap_or(d.n_theta),
    };
    let result = rayleigh_probe(&p, &family, spec.probe.budget, resolution)?;
    let mut assertions = Vec::new();
    if let Some(q) = spec.assertions.min_quotient {
        assertions.push(Assertion::at_least("best quotient", result.best_quotient, q));
    }
    Ok(Outcome {
        result: to_value(&result),
        assertions,
        csv: Vec::new(),
    })
}
