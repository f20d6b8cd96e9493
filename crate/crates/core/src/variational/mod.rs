//! Bipolar Schrödinger-type problems on a hyperbolic model and on the open
//! upper hemisphere, discretized on axisymmetric finite-volume grids.
//!
//! On the hyperbolic side the energy is
//!
//! ```text
//!   E_μ(u) = ½∫(|∇u|² + V u²) - (λ/2)∫ w u² - μ∫ W F(u),
//!   w = s²(d₁₂/2) / (d₁ d₂ s(d₁) s(d₂)),
//! ```
//!
//! and on the hemisphere
//!
//! ```text
//!   E(u) = ½(∫|∇u|² + C(n,β)∫u²) - (λ/2)∫|∇d₁/d₁ - ∇d₂/d₂|² u² - (1/p)∫|u|^p.
//! ```

mod grid;
pub mod linalg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{hemisphere_constant, Curvature};
use crate::error::{Error, Result};
use crate::geometry::{ModelPoint, ModelSpace, PoleSet};
use crate::hardy::weight_pairwise_gradient;

pub use grid::{FvGrid, GridMeta};
use linalg::{dot, gmres, smallest_generalized_eigenvalue, BandCholesky, BandMatrix};

/// Confining potential `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `V = v0 + d(x₀, x)²`.
    Quadratic { v0: f64 },
}

impl Potential {
    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            Potential::Quadratic { v0 } => v0 + d * d,
        }
    }
}

/// Weight `W` multiplying the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weight {
    /// `W = exp(-rate · d(x₀, x))`.
    Exponential { rate: f64 },
}

impl Weight {
    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            Weight::Exponential { rate } => (-rate * d).exp(),
        }
    }
}

/// Nonlinearity `f`, extended by zero to `s ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `f(s) = s²/(1+s³)`.
    Rational,
}

impl Nonlinearity {
    pub fn f(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Nonlinearity::Rational => s * s / (1.0 + s * s * s),
        }
    }

    pub fn df(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Nonlinearity::Rational => {
                let q = 1.0 + s * s * s;
                (2.0 * s - s.powi(4)) / (q * q)
            }
        }
    }

    /// `F(s) = ∫₀ˢ f`.
    pub fn primitive(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Nonlinearity::Rational => (s * s * s).ln_1p() / 3.0,
        }
    }

    /// `c_f = max f(s)/s` by golden-section search on `log s`.
    pub fn c_f(&self) -> f64 {
        let g = |t: f64| {
            let s = t.exp();
            -self.f(s) / s
        };
        let best = (-400..=400)
            .map(|k| k as f64 * 0.05)
            .min_by(|a, b| g(*a).total_cmp(&g(*b)))
            .expect("nonempty scan");
        -g(golden_section(g, best - 0.05, best + 0.05, 1e-12))
    }

    /// Checks `f(s)/s → 0` at both ends and `F(s₀) > 0` for some `s₀`.
    fn check_hypotheses(&self) -> Result<()> {
        let small = self.f(1e-8) / 1e-8;
        let large = self.f(1e8) / 1e8;
        if !(small < 1e-6 && large < 1e-6) {
            return Err(Error::HypothesisViolated {
                what: "f(s)/s does not vanish at 0 and ∞".into(),
                hypothesis: "f(s) = o(s) as s → 0⁺ and s → ∞",
            });
        }
        if !(self.primitive(1.0) > 0.0) {
            return Err(Error::HypothesisViolated {
                what: "F(1) ≤ 0".into(),
                hypothesis: "F(s₀) > 0 for some s₀ > 0",
            });
        }
        Ok(())
    }
}

/// Minimizer of a unimodal `f` on `[a, b]`.
fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol * (1.0 + a.abs() + b.abs()) {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Iteration budget and stopping rule of the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Target for `sqrt(gᵀ K⁻¹ g)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fields with `‖u‖_V` below this are the zero solution.
    pub zero_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-9,
            max_iterations: 2000,
            zero_threshold: 1e-10,
        }
    }
}

/// The hyperbolic problem with parameters `(λ, μ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PmConfig {
    pub n: usize,
    pub curvature: f64,
    /// Signed axis positions of the two poles.
    pub poles: [f64; 2],
    pub lambda: f64,
    pub mu: f64,
    /// Truncation radius about the base point.
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub potential: Potential,
    pub weight: Weight,
    pub nonlinearity: Nonlinearity,
    pub starts: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for PmConfig {
    fn default() -> Self {
        PmConfig {
            n: 3,
            curvature: -1.0,
            poles: [-1.0, 1.0],
            lambda: 0.5,
            mu: 1.0,
            radius: 8.0,
            n_r: 200,
            n_theta: 100,
            potential: Potential::Quadratic { v0: 1.0 },
            weight: Weight::Exponential { rate: 1.0 },
            nonlinearity: Nonlinearity::Rational,
            starts: 10,
            seed: 7,
            solver: SolverOptions::default(),
        }
    }
}

impl PmConfig {
    /// The default instance with `λ = ½(n-2)²`.
    pub fn default_instance(mu: f64) -> Self {
        PmConfig { mu, ..Default::default() }
    }
}

/// The hemisphere problem for the symmetric pair `(±a, 0, …, 0, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HemisphereConfig {
    pub n: usize,
    pub b: f64,
    pub lambda: f64,
    pub p: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub solver: SolverOptions,
}

impl Default for HemisphereConfig {
    fn default() -> Self {
        HemisphereConfig {
            n: 3,
            b: 0.8,
            lambda: 0.125,
            p: 3.0,
            n_r: 120,
            n_theta: 120,
            solver: SolverOptions {
                tolerance: 1e-9,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Zero,
    GlobalMin,
    MountainPass,
    Nehari,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub c_f: f64,
    pub v0: f64,
    pub w_inf: f64,
    /// `V₀ ‖W‖∞⁻¹ c_f⁻¹`.
    pub explicit_threshold: f64,
    pub mu0_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Cell values followed by the Dirichlet ring.
    #[serde(skip)]
    pub field: Vec<f64>,
    pub energy: f64,
    pub residual_norm: f64,
    pub classification: Classification,
    pub iterations: usize,
    pub converged: bool,
    /// `‖u‖_V` (hyperbolic) or `‖u‖_{C(n,β)}` (hemisphere).
    pub norm: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub start: Option<usize>,
    pub diagnostics: Option<Diagnostics>,
    pub grid: GridMeta,
}

/// A discretized problem `E(u) = ½uᵀKu - Σ m_k G_k(u_k)`.
struct Discrete {
    grid: FvGrid,
    /// Quadratic part of the energy.
    k: BandMatrix,
    chol: BandCholesky,
    /// The norm defining `‖·‖`.
    norm_matrix: BandMatrix,
    /// `m_k W_k` (hyperbolic) or `m_k` (hemisphere).
    coef: Vec<f64>,
    kind: Nonlinear,
}

#[derive(Debug, Clone, Copy)]
enum Nonlinear {
    Sublinear { mu: f64, f: Nonlinearity },
    Power { p: f64 },
}

impl Nonlinear {
    fn g(&self, s: f64) -> f64 {
        match *self {
            Nonlinear::Sublinear { mu, f } => mu * f.primitive(s),
            Nonlinear::Power { p } => s.abs().powf(p) / p,
        }
    }

    fn dg(&self, s: f64) -> f64 {
        match *self {
            Nonlinear::Sublinear { mu, f } => mu * f.f(s),
            Nonlinear::Power { p } => s.abs().powf(p - 1.0) * s.signum(),
        }
    }

    fn d2g(&self, s: f64) -> f64 {
        match *self {
            Nonlinear::Sublinear { mu, f } => mu * f.df(s),
            Nonlinear::Power { p } => (p - 1.0) * s.abs().powf(p - 2.0),
        }
    }
}

impl Discrete {
    fn energy(&self, u: &[f64]) -> f64 {
        let nl: f64 = u.iter().zip(&self.coef).map(|(s, c)| c * self.kind.g(*s)).sum();
        0.5 * self.k.quadratic_form(u) - nl
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = self.k.mul_vec(u);
        g.iter_mut()
            .zip(u.iter().zip(&self.coef))
            .for_each(|(gi, (s, c))| *gi -= c * self.kind.dg(*s));
        g
    }

    fn norm(&self, u: &[f64]) -> f64 {
        self.norm_matrix.quadratic_form(u).max(0.0).sqrt()
    }

    /// `K⁻¹ g` and `sqrt(gᵀ K⁻¹ g)`.
    fn precondition(&self, g: &[f64]) -> (Vec<f64>, f64) {
        let z = self.chol.solve(g);
        let r = dot(g, &z).max(0.0).sqrt();
        (z, r)
    }

    fn result(&self, u: Vec<f64>, class: Classification, iterations: usize, converged: bool, start: Option<usize>) -> SolveResult {
        let (_, residual) = self.precondition(&self.gradient(&u));
        let energy = self.energy(&u);
        let norm = self.norm(&u);
        let min_value = u.iter().copied().fold(f64::INFINITY, f64::min);
        let max_value = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        SolveResult {
            field: self.grid.with_boundary(&u),
            energy,
            residual_norm: residual,
            classification: class,
            iterations,
            converged,
            norm,
            min_value,
            max_value,
            start,
            diagnostics: None,
            grid: self.grid.meta(),
        }
    }

    /// Preconditioned descent with Armijo backtracking, then Newton polish.
    fn descend(&self, mut u: Vec<f64>, opts: &SolverOptions) -> (Vec<f64>, usize, bool) {
        let mut e = self.energy(&u);
        for it in 0..opts.max_iterations {
            let g = self.gradient(&u);
            let (z, res) = self.precondition(&g);
            if res < opts.tolerance || self.norm(&u) < opts.zero_threshold {
                return (u, it, true);
            }
            if res < 1e-4 * self.norm(&u) {
                let (v, extra, ok) = self.newton(u.clone(), opts);
                if ok {
                    return (v, it + extra, true);
                }
            }
            let slope = dot(&g, &z);
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&z).map(|(a, b)| a - t * b).collect();
                let et = self.energy(&trial);
                if et <= e - 1e-4 * t * slope || t < 1e-12 {
                    u = trial;
                    e = et;
                    break;
                }
                t *= 0.5;
            }
        }
        let (_, res) = self.precondition(&self.gradient(&u));
        (u, opts.max_iterations, res < opts.tolerance)
    }

    /// Damped Newton on `∇E = 0`, Hessian systems by GMRES preconditioned
    /// with `K⁻¹`. Converges to the nearby critical point of any index.
    fn newton(&self, mut u: Vec<f64>, opts: &SolverOptions) -> (Vec<f64>, usize, bool) {
        let (mut z, mut res) = self.precondition(&self.gradient(&u));
        for it in 0..60 {
            if res < opts.tolerance {
                return (u, it, true);
            }
            let d: Vec<f64> = u.iter().zip(&self.coef).map(|(s, c)| c * self.kind.d2g(*s)).collect();
            let op = |v: &[f64]| -> Vec<f64> {
                let dv: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a * b).collect();
                let w = self.chol.solve(&dv);
                v.iter().zip(&w).map(|(a, b)| a - b).collect()
            };
            let rhs: Vec<f64> = z.iter().map(|x| -x).collect();
            let (delta, _) = gmres(op, &rhs, 1e-12, 60, 600);
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-6 {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
                let (zt, rt) = self.precondition(&self.gradient(&trial));
                if rt < res * (1.0 - 1e-4 * t) {
                    u = trial;
                    z = zt;
                    res = rt;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return (u, it, res < opts.tolerance);
            }
        }
        (u, 60, res < opts.tolerance)
    }

    fn weighted_primitive(&self, u: &[f64], f: Nonlinearity) -> f64 {
        u.iter().zip(&self.coef).map(|(s, c)| c * f.primitive(*s)).sum()
    }
}

fn pm_space(config: &PmConfig) -> Result<ModelSpace> {
    let c = Curvature::new(config.curvature)?;
    if c.is_spherical() {
        return Err(Error::HypothesisViolated {
            what: format!("curvature {} > 0", config.curvature),
            hypothesis: "Cartan-Hadamard manifold, K ≥ k₀ with k₀ ≤ 0",
        });
    }
    ModelSpace::new(config.n, c)
}

fn validate_pm(config: &PmConfig) -> Result<()> {
    let n = config.n as f64;
    let crit = (n - 2.0) * (n - 2.0);
    if !(config.lambda >= 0.0 && config.lambda < crit) {
        return Err(Error::HypothesisViolated {
            what: format!("λ = {}", config.lambda),
            hypothesis: "λ ∈ [0, (n-2)²)",
        });
    }
    if !(config.mu >= 0.0) {
        return Err(Error::InvalidConfig(format!("μ = {} < 0", config.mu)));
    }
    if config.starts == 0 {
        return Err(Error::InvalidConfig("at least one descent start required".into()));
    }
    config.nonlinearity.check_hypotheses()?;
    match config.potential {
        Potential::Quadratic { v0 } if v0 > 0.0 => {}
        _ => {
            return Err(Error::HypothesisViolated {
                what: "inf V ≤ 0".into(),
                hypothesis: "V₀ = inf V > 0",
            })
        }
    }
    match config.weight {
        Weight::Exponential { rate } if rate > 0.0 => Ok(()),
        _ => Err(Error::HypothesisViolated {
            what: "W not integrable".into(),
            hypothesis: "W ∈ L¹ ∩ L^∞ positive",
        }),
    }
}

struct PmProblem {
    disc: Discrete,
    diagnostics: Diagnostics,
    f: Nonlinearity,
}

fn bipolar_weight(c: Curvature, d1: f64, d2: f64, d12: f64) -> f64 {
    let h = c.sn(0.5 * d12);
    h * h / (d1 * d2 * c.sn(d1) * c.sn(d2))
}

fn build_pm(config: &PmConfig, mu: f64) -> Result<PmProblem> {
    validate_pm(config)?;
    let space = pm_space(config)?;
    let poles = PoleSet::on_axis(space, &config.poles)?;
    let grid = FvGrid::new(space, config.radius, config.n_r, config.n_theta)?;
    let base = space.base_point();
    let c = space.curvature();
    let d12 = poles.distance(0, 1);
    let info = grid
        .points()
        .par_iter()
        .map(|x| -> Result<(f64, f64, f64)> {
            let d0 = space.distance(&base, x)?;
            let d1 = space.distance(x, poles.get(0))?;
            let d2 = space.distance(x, poles.get(1))?;
            Ok((config.potential.eval(d0), config.weight.eval(d0), bipolar_weight(c, d1, d2, d12)))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = grid.volumes();
    let mut norm_matrix = grid.stiffness().clone();
    norm_matrix.add_diagonal(&info.iter().zip(m).map(|((v, _, _), mk)| v * mk).collect::<Vec<_>>());
    let mut k = norm_matrix.clone();
    k.add_diagonal(&info.iter().zip(m).map(|((_, _, w), mk)| -config.lambda * w * mk).collect::<Vec<_>>());
    let chol = k.cholesky().map_err(|e| Error::HypothesisViolated {
        what: format!("discrete quadratic form not coercive: {e}"),
        hypothesis: "λ ∈ [0, (n-2)²)",
    })?;
    let coef: Vec<f64> = info.iter().zip(m).map(|((_, w, _), mk)| w * mk).collect();
    let v0 = info.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let w_inf = info.iter().map(|t| t.1).fold(0.0, f64::max);
    let outer = config.potential.eval(config.radius);
    if !(outer > 8.0 * v0) {
        return Err(Error::HypothesisViolated {
            what: format!("V(R) = {outer} does not dominate V₀ = {v0}"),
            hypothesis: "V(x) → ∞ as d(x₀, x) → ∞",
        });
    }
    let c_f = config.nonlinearity.c_f();
    Ok(PmProblem {
        disc: Discrete {
            grid,
            k,
            chol,
            norm_matrix,
            coef,
            kind: Nonlinear::Sublinear {
                mu,
                f: config.nonlinearity,
            },
        },
        diagnostics: Diagnostics {
            c_f,
            v0,
            w_inf,
            explicit_threshold: v0 / (w_inf * c_f),
            mu0_estimate: None,
        },
        f: config.nonlinearity,
    })
}

/// Discrete `E_μ(u)` of cell values `u` on the grid of `config`.
pub fn energy_pm(config: &PmConfig, u: &[f64]) -> Result<f64> {
    let p = build_pm(config, config.mu)?;
    check_len(&p.disc, u)?;
    Ok(p.disc.energy(u))
}

/// Discrete gradient `∂E_μ/∂u_k` (not divided by cell volumes).
pub fn gradient_pm(config: &PmConfig, u: &[f64]) -> Result<Vec<f64>> {
    let p = build_pm(config, config.mu)?;
    check_len(&p.disc, u)?;
    Ok(p.disc.gradient(u))
}

fn check_len(d: &Discrete, u: &[f64]) -> Result<()> {
    if u.len() != d.grid.len() {
        return Err(Error::ShapeMismatch {
            expected: d.grid.len(),
            got: u.len(),
        });
    }
    Ok(())
}

/// The grid on which `config` is discretized.
pub fn pm_grid(config: &PmConfig) -> Result<FvGrid> {
    FvGrid::new(pm_space(config)?, config.radius, config.n_r, config.n_theta)
}

/// Threshold diagnostics `c_f`, `V₀`, `‖W‖∞` of the instance.
pub fn pm_diagnostics(config: &PmConfig) -> Result<Diagnostics> {
    Ok(build_pm(config, config.mu)?.diagnostics)
}

/// Smallest eigenvalue of the quadratic part of `E_μ` relative to the
/// lumped mass matrix.
pub fn pm_quadratic_min_eigenvalue(config: &PmConfig) -> Result<f64> {
    let p = build_pm(config, 0.0)?;
    let d = &p.disc;
    Ok(smallest_generalized_eigenvalue(&d.k, &d.chol, d.grid.volumes(), 1e-10, 5000))
}

/// Trial fields `t · bump` for the `μ₀` infimum; the bump is
/// `exp(1 - 1/(1-(d/ρ)²))` about an axis point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BumpFamily {
    pub radii: Vec<f64>,
    /// Signed axis positions of the bump centres.
    pub centres: Vec<f64>,
}

impl Default for BumpFamily {
    fn default() -> Self {
        BumpFamily {
            radii: vec![1.0, 2.0, 3.0],
            centres: vec![0.0],
        }
    }
}

fn bump_values(grid: &FvGrid, centre: &ModelPoint, radius: f64) -> Result<Vec<f64>> {
    let space = *grid.space();
    grid.points()
        .iter()
        .map(|x| {
            let t = space.distance(centre, x)? / radius;
            Ok(if t < 1.0 { (1.0 - 1.0 / (1.0 - t * t)).exp() } else { 0.0 })
        })
        .collect()
}

/// `½ min_t ‖t b‖²_V / ∫ W F(t b)` for one profile `b`, and the minimizing `t`.
fn mu0_profile(p: &PmProblem, b: &[f64]) -> Option<(f64, f64)> {
    let nb = p.disc.norm_matrix.quadratic_form(b);
    let q = |lt: f64| {
        let t = 10f64.powf(lt);
        let tb: Vec<f64> = b.iter().map(|x| t * x).collect();
        let den = p.disc.weighted_primitive(&tb, p.f);
        if den > 0.0 {
            0.5 * t * t * nb / den
        } else {
            f64::INFINITY
        }
    };
    let best = (-60..=80).map(|k| k as f64 * 0.05).min_by(|a, b| q(*a).total_cmp(&q(*b)))?;
    if !q(best).is_finite() {
        return None;
    }
    let lt = golden_section(q, best - 0.05, best + 0.05, 1e-10);
    Some((q(lt), 10f64.powf(lt)))
}

/// Upper bound for `μ₀ = ½ inf ‖u‖²_V / ∫ W F(u)` over the trial family.
pub fn mu0_estimate(config: &PmConfig, family: &BumpFamily) -> Result<f64> {
    let p = build_pm(config, config.mu)?;
    mu0_with_trial(&p, family).map(|(m, _)| m)
}

fn mu0_with_trial(p: &PmProblem, family: &BumpFamily) -> Result<(f64, Vec<f64>)> {
    let space = *p.disc.grid.space();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &c in &family.centres {
        let centre = space.axis_point(c)?;
        for &r in &family.radii {
            if !(r > 0.0) {
                return Err(Error::InvalidConfig(format!("bump radius {r}")));
            }
            let b = bump_values(&p.disc.grid, &centre, r)?;
            if let Some((q, t)) = mu0_profile(p, &b) {
                if best.as_ref().is_none_or(|(bq, _)| q < *bq) {
                    best = Some((q, b.iter().map(|x| t * x).collect()));
                }
            }
        }
    }
    best.ok_or_else(|| Error::FieldNotAdmissible(
        "no trial field with ∫ W F(u) > 0; a positive truncation of the level s₀ with F(s₀) > 0 is needed".into(),
    ))
}

fn random_start(grid: &FvGrid, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let space = *grid.space();
    let r = rng.gen_range(0.0..2.0);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let centre = space.polar_point(r, theta)?;
    let radius = rng.gen_range(1.0..3.0);
    let amp = 10f64.powf(rng.gen_range(-1.0..2.0));
    Ok(bump_values(grid, &centre, radius)?.into_iter().map(|v| amp * v).collect())
}

/// Multi-start descent and, when a negative-energy minimizer is found, a
/// mountain-pass candidate between it and zero.
///
/// Descent results come first, in start order; a trial start from the
/// `μ₀` construction is appended when `μ` exceeds the estimate.
pub fn solve_pm(config: &PmConfig) -> Result<Vec<SolveResult>> {
    let p = build_pm(config, config.mu)?;
    let (mu0, trial) = mu0_with_trial(&p, &BumpFamily::default())?;
    let diagnostics = Diagnostics {
        mu0_estimate: Some(mu0),
        ..p.diagnostics
    };
    let opts = config.solver;
    let mut starts: Vec<Vec<f64>> = (0..config.starts)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64 + 1);
            random_start(&p.disc.grid, &mut rng)
        })
        .collect::<Result<_>>()?;
    if config.mu > mu0 {
        starts.push(trial);
    }
    let mut results: Vec<SolveResult> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, u0)| {
            let (u, it, ok) = p.disc.descend(u0, &opts);
            let class = if p.disc.norm(&u) < opts.zero_threshold {
                Classification::Zero
            } else {
                Classification::GlobalMin
            };
            p.disc.result(u, class, it, ok, Some(i))
        })
        .collect();
    let best = results
        .iter()
        .filter(|r| r.classification == Classification::GlobalMin && r.converged)
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .cloned();
    if let Some(best) = best.filter(|b| b.energy < 0.0) {
        let n = p.disc.grid.len();
        results.push(mountain_pass(&p.disc, &best.field[..n], &opts));
    }
    for r in &mut results {
        r.diagnostics = Some(diagnostics);
    }
    Ok(results)
}

/// Climbing-image string method between `0` and `end`, followed by Newton
/// polish of the climbing image.
fn mountain_pass(d: &Discrete, end: &[f64], opts: &SolverOptions) -> SolveResult {
    const IMAGES: usize = 24;
    const STEP: f64 = 0.4;
    let mut path: Vec<Vec<f64>> = (0..=IMAGES)
        .map(|k| end.iter().map(|x| x * k as f64 / IMAGES as f64).collect())
        .collect();
    let scale = d.norm(end);
    let mut iterations = 0;
    let mut best: Option<(Vec<f64>, usize, bool)> = None;
    while iterations < opts.max_iterations {
        iterations += 1;
        let energies: Vec<f64> = path.iter().map(|u| d.energy(u)).collect();
        let top = (1..IMAGES).max_by(|&a, &b| energies[a].total_cmp(&energies[b])).expect("interior images");
        let tangent = {
            let mut t: Vec<f64> = path[top + 1].iter().zip(&path[top - 1]).map(|(a, b)| a - b).collect();
            let len = d.k.quadratic_form(&t).max(0.0).sqrt();
            t.iter_mut().for_each(|x| *x /= len);
            t
        };
        path.par_iter_mut().enumerate().filter(|(k, _)| *k > 0 && *k < IMAGES).for_each(|(k, u)| {
            let g = d.gradient(u);
            let (mut z, _) = d.precondition(&g);
            if k == top {
                let along = dot(&g, &tangent);
                z.iter_mut().zip(&tangent).for_each(|(zi, ti)| *zi -= 2.0 * along * ti);
            }
            u.iter_mut().zip(&z).for_each(|(a, b)| *a -= STEP * b);
        });
        let (_, climbing_residual) = d.precondition(&d.gradient(&path[top]));
        reparametrize(d, &mut path[..=top]);
        reparametrize(d, &mut path[top..]);
        if climbing_residual < 1e-3 * scale && iterations % 10 == 0 {
            let (u, extra, ok) = d.newton(path[top].clone(), opts);
            let diff: Vec<f64> = u.iter().zip(end).map(|(a, b)| a - b).collect();
            let distinct = d.norm(&u) > 1e-3 * scale && d.norm(&diff) > 1e-3 * scale;
            if ok && distinct && d.energy(&u) > 0.0 {
                best = Some((u, extra, true));
                break;
            }
            if climbing_residual < opts.tolerance {
                best = Some((u, extra, false));
                break;
            }
        }
    }
    let (u, extra, ok) = best.unwrap_or_else(|| {
        let energies: Vec<f64> = path.iter().map(|u| d.energy(u)).collect();
        let top = (1..IMAGES).max_by(|&a, &b| energies[a].total_cmp(&energies[b])).expect("interior images");
        (path[top].clone(), 0, false)
    });
    d.result(u, Classification::MountainPass, iterations + extra, ok, None)
}

/// Equal arc length in the energy norm along `path`, endpoints fixed, by
/// piecewise-linear interpolation.
fn reparametrize(d: &Discrete, path: &mut [Vec<f64>]) {
    let m = path.len() - 1;
    if m < 2 {
        return;
    }
    let mut cum = vec![0.0; m + 1];
    for k in 1..=m {
        let diff: Vec<f64> = path[k].iter().zip(&path[k - 1]).map(|(a, b)| a - b).collect();
        cum[k] = cum[k - 1] + d.k.quadratic_form(&diff).max(0.0).sqrt();
    }
    let total = cum[m];
    if !(total > 0.0) {
        return;
    }
    let old = path.to_vec();
    let mut seg = 0;
    for k in 1..m {
        let s = total * k as f64 / m as f64;
        while seg + 1 < m && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let w = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
        path[k] = old[seg].iter().zip(&old[seg + 1]).map(|(a, b)| a + w * (b - a)).collect();
    }
}

/// Global-minimum energy at the configured radius and at a larger one with
/// the same radial step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationReport {
    pub radius: f64,
    pub energy: f64,
    pub extended_radius: f64,
    pub extended_energy: f64,
    pub relative_change: f64,
}

pub fn truncation_sensitivity(config: &PmConfig, extended_radius: f64) -> Result<TruncationReport> {
    if !(extended_radius > config.radius) {
        return Err(Error::InvalidConfig("extended radius must exceed the truncation radius".into()));
    }
    let minimum = |cfg: &PmConfig| -> Result<f64> {
        let p = build_pm(cfg, cfg.mu)?;
        let (_, trial) = mu0_with_trial(&p, &BumpFamily::default())?;
        let (u, _, _) = p.disc.descend(trial, &cfg.solver);
        Ok(p.disc.energy(&u))
    };
    let energy = minimum(config)?;
    let n_r = (config.n_r as f64 * extended_radius / config.radius).round() as usize;
    let extended_energy = minimum(&PmConfig {
        radius: extended_radius,
        n_r,
        ..config.clone()
    })?;
    Ok(TruncationReport {
        radius: config.radius,
        energy,
        extended_radius,
        extended_energy,
        relative_change: (extended_energy - energy).abs() / energy.abs().max(f64::MIN_POSITIVE),
    })
}

struct HemisphereProblem {
    disc: Discrete,
    p: f64,
}

fn build_hemisphere(config: &HemisphereConfig) -> Result<HemisphereProblem> {
    let n = config.n as f64;
    let space = ModelSpace::hemisphere(config.n)?;
    let crit = (n - 2.0) * (n - 2.0) / 4.0;
    if !(config.lambda >= 0.0 && config.lambda < crit) {
        return Err(Error::HypothesisViolated {
            what: format!("λ = {}", config.lambda),
            hypothesis: "λ ∈ [0, (n-2)²/4)",
        });
    }
    let critical = 2.0 * n / (n - 2.0);
    if !(config.p > 2.0 && config.p < critical) {
        return Err(Error::HypothesisViolated {
            what: format!("p = {}", config.p),
            hypothesis: "2 < p < 2* = 2n/(n-2)",
        });
    }
    let poles = PoleSet::symmetric_hemisphere_pair(space, config.b)?;
    let beta = config.b.acos();
    let cst = hemisphere_constant(config.n, beta)?;
    let grid = FvGrid::new(space, std::f64::consts::FRAC_PI_2, config.n_r, config.n_theta)?;
    let w = grid
        .points()
        .par_iter()
        .map(|x| weight_pairwise_gradient(&space, x, poles.get(0), poles.get(1)))
        .collect::<Result<Vec<_>>>()?;
    let m = grid.volumes();
    let mut norm_matrix = grid.stiffness().clone();
    norm_matrix.add_diagonal(&m.iter().map(|mk| cst * mk).collect::<Vec<_>>());
    let mut k = norm_matrix.clone();
    k.add_diagonal(&w.iter().zip(m).map(|(wk, mk)| -config.lambda * wk * mk).collect::<Vec<_>>());
    let chol = k.cholesky().map_err(|e| Error::HypothesisViolated {
        what: format!("discrete quadratic form not coercive: {e}"),
        hypothesis: "λ ∈ [0, (n-2)²/4)",
    })?;
    Ok(HemisphereProblem {
        disc: Discrete {
            coef: m.to_vec(),
            grid,
            k,
            chol,
            norm_matrix,
            kind: Nonlinear::Power { p: config.p },
        },
        p: config.p,
    })
}

/// The hemisphere grid of `config`.
pub fn hemisphere_grid(config: &HemisphereConfig) -> Result<FvGrid> {
    FvGrid::new(ModelSpace::hemisphere(config.n)?, std::f64::consts::FRAC_PI_2, config.n_r, config.n_theta)
}

pub fn energy_hemisphere(config: &HemisphereConfig, u: &[f64]) -> Result<f64> {
    let h = build_hemisphere(config)?;
    check_len(&h.disc, u)?;
    Ok(h.disc.energy(u))
}

pub fn gradient_hemisphere(config: &HemisphereConfig, u: &[f64]) -> Result<Vec<f64>> {
    let h = build_hemisphere(config)?;
    check_len(&h.disc, u)?;
    Ok(h.disc.gradient(u))
}

/// The scaling `t(u)` with `d/dt E(t u) = 0`, i.e.
/// `t^{p-2} = uᵀKu / Σ m|u|^p`.
pub fn nehari_scaling(config: &HemisphereConfig, u: &[f64]) -> Result<f64> {
    let h = build_hemisphere(config)?;
    check_len(&h.disc, u)?;
    nehari_t(&h, u)
}

fn nehari_t(h: &HemisphereProblem, u: &[f64]) -> Result<f64> {
    let a = h.disc.k.quadratic_form(u);
    let s: f64 = u.iter().zip(&h.disc.coef).map(|(x, m)| m * x.abs().powf(h.p)).sum();
    if !(a > 0.0 && s > 0.0) {
        return Err(Error::FieldNotAdmissible("zero field has no Nehari projection".into()));
    }
    Ok((a / s).powf(1.0 / (h.p - 2.0)))
}

/// Positive ground state on the Nehari manifold.
pub fn solve_hemisphere(config: &HemisphereConfig) -> Result<SolveResult> {
    let h = build_hemisphere(config)?;
    let d = &h.disc;
    let opts = config.solver;
    let space = *d.grid.space();
    let north = space.base_point();
    let mut u = bump_values(&d.grid, &north, std::f64::consts::FRAC_PI_2)?;
    let project = |v: Vec<f64>| -> Result<Vec<f64>> {
        let t = nehari_t(&h, &v)?;
        Ok(v.into_iter().map(|x| t * x).collect())
    };
    u = project(u)?;
    let mut e = d.energy(&u);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let g = d.gradient(&u);
        let (z, res) = d.precondition(&g);
        if res < opts.tolerance {
            converged = true;
            break;
        }
        if res < 1e-4 * d.norm(&u) {
            let (v, extra, ok) = d.newton(u.clone(), &opts);
            if ok {
                u = v;
                iterations += extra;
                converged = true;
                break;
            }
        }
        iterations += 1;
        let mut t = 1.0;
        loop {
            let trial = project(u.iter().zip(&z).map(|(a, b)| a - t * b).collect())?;
            let et = d.energy(&trial);
            if et <= e - 1e-4 * t * dot(&g, &z) || t < 1e-10 {
                u = trial;
                e = et;
                break;
            }
            t *= 0.5;
        }
    }
    Ok(d.result(u, Classification::Nehari, iterations, converged, None))
}

/// Rotation of the ambient coordinates `(y₂, y₃)` by `angle`: an element
/// of `id × O(n-1) × id` fixing both poles of the symmetric pair.
pub fn g0_rotate(x: &ModelPoint, angle: f64) -> Result<ModelPoint> {
    let space = *x.space();
    if space.dim() < 3 {
        return Err(Error::InvalidConfig("rotation needs n ≥ 3".into()));
    }
    let mut y = x.coords().to_vec();
    let (c, s) = (angle.cos(), angle.sin());
    let (a, b) = (y[1], y[2]);
    y[1] = c * a - s * b;
    y[2] = s * a + c * b;
    space.point(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_pm(mu: f64) -> PmConfig {
        PmConfig {
            mu,
            radius: 5.0,
            n_r: 40,
            n_theta: 20,
            ..PmConfig::default()
        }
    }

    fn small_hemisphere() -> HemisphereConfig {
        HemisphereConfig {
            n_r: 24,
            n_theta: 24,
            ..HemisphereConfig::default()
        }
    }

    fn smooth_random(grid: &FvGrid, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = *grid.space();
        let mut u = vec![0.0; grid.len()];
        for _ in 0..3 {
            let centre = space.polar_point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..3.0)).unwrap();
            let amp = rng.gen_range(0.2..2.0);
            for (ui, b) in u.iter_mut().zip(bump_values(grid, &centre, 1.4).unwrap()) {
                *ui += amp * b;
            }
        }
        u
    }

    #[test]
    fn c_f_of_rational_nonlinearity() {
        let expected = 2f64.powf(-1.0 / 3.0) / 1.5;
        assert!((Nonlinearity::Rational.c_f() - expected).abs() < 1e-12);
    }

    #[test]
    fn nonlinearity_derivatives() {
        let f = Nonlinearity::Rational;
        for &s in &[0.1, 0.7, 1.3, 4.0] {
            let h = 1e-6;
            assert!(((f.primitive(s + h) - f.primitive(s - h)) / (2.0 * h) - f.f(s)).abs() < 1e-9);
            assert!(((f.f(s + h) - f.f(s - h)) / (2.0 * h) - f.df(s)).abs() < 1e-8);
        }
        assert_eq!(f.f(-1.0), 0.0);
        assert_eq!(f.primitive(-1.0), 0.0);
    }

    #[test]
    fn zero_field_energy_and_gradient() {
        let c = small_pm(3.0);
        let z = vec![0.0; c.n_r * c.n_theta];
        assert_eq!(energy_pm(&c, &z).unwrap(), 0.0);
        assert!(gradient_pm(&c, &z).unwrap().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn quadratic_energy_without_source() {
        let c = PmConfig { lambda: 0.0, ..small_pm(0.0) };
        let grid = pm_grid(&c).unwrap();
        let u = smooth_random(&grid, 3);
        let e = energy_pm(&c, &u).unwrap();
        assert!(e > 0.0);
        let g = gradient_pm(&c, &u).unwrap();
        // the gradient at μ = λ = 0 is linear in u
        let g2 = gradient_pm(&c, &u.iter().map(|x| 2.0 * x).collect::<Vec<_>>()).unwrap();
        for (a, b) in g.iter().zip(&g2) {
            assert!((2.0 * a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
        assert!((dot(&g, &u) - 2.0 * e).abs() < 1e-10 * e);
    }

    #[test]
    fn energy_lower_bound_below_critical_lambda() {
        let c = small_pm(0.0);
        let grid = pm_grid(&c).unwrap();
        let u = smooth_random(&grid, 11);
        let e = energy_pm(&c, &u).unwrap();
        let grad2 = grid.stiffness().quadratic_form(&u);
        let l2: f64 = u.iter().zip(grid.volumes()).map(|(x, m)| x * x * m).sum();
        let bound = 0.5 * (1.0 - c.lambda) * grad2 + 0.5 * l2;
        assert!(e >= 0.99 * bound, "{e} vs {bound}");
    }

    #[test]
    fn gradient_matches_central_difference() {
        let c = small_pm(6.0);
        let grid = pm_grid(&c).unwrap();
        let p = build_pm(&c, c.mu).unwrap();
        for seed in 0..5 {
            let u = smooth_random(&grid, seed);
            let h = smooth_random(&grid, seed + 100);
            let tau = 1e-5;
            let up: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a + tau * b).collect();
            let um: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a - tau * b).collect();
            let fd = (p.disc.energy(&up) - p.disc.energy(&um)) / (2.0 * tau);
            let an = dot(&p.disc.gradient(&u), &h);
            assert!((fd - an).abs() < 1e-6 * an.abs(), "{fd} vs {an}");
        }
    }

    #[test]
    fn quadratic_part_is_coercive() {
        let s = pm_quadratic_min_eigenvalue(&small_pm(0.0)).unwrap();
        assert!(s > 0.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(energy_pm(&PmConfig { lambda: 1.0, ..small_pm(0.0) }, &[]).is_err());
        assert!(energy_pm(&PmConfig { curvature: 1.0, ..small_pm(0.0) }, &[]).is_err());
        assert!(energy_pm(&PmConfig { radius: 1.0, ..small_pm(0.0) }, &[]).is_err());
        assert!(matches!(energy_pm(&small_pm(0.0), &[1.0]), Err(Error::ShapeMismatch { .. })));
        let h = small_hemisphere();
        assert!(solve_hemisphere(&HemisphereConfig { p: 6.0, ..h.clone() }).is_err());
        assert!(solve_hemisphere(&HemisphereConfig { lambda: 0.25, ..h }).is_err());
    }

    #[test]
    fn mu0_estimate_is_monotone() {
        let c = small_pm(1.0);
        let one = mu0_estimate(&c, &BumpFamily { radii: vec![2.0], centres: vec![0.0] }).unwrap();
        let more = mu0_estimate(&c, &BumpFamily { radii: vec![1.0, 2.0, 3.0], centres: vec![0.0, 0.5] }).unwrap();
        assert!(one > 0.0 && one.is_finite());
        assert!(more <= one);
        let none = mu0_estimate(&c, &BumpFamily { radii: vec![1e-3], centres: vec![0.0] });
        assert!(matches!(none, Err(Error::FieldNotAdmissible(_))));
    }

    #[test]
    fn small_mu_gives_zero_only() {
        let c = small_pm(0.0);
        let th = pm_diagnostics(&c).unwrap().explicit_threshold;
        let res = solve_pm(&PmConfig { mu: 0.5 * th, starts: 4, ..c }).unwrap();
        assert_eq!(res.len(), 4);
        assert!(res.iter().all(|r| r.classification == Classification::Zero && r.norm < 1e-8));
    }

    #[test]
    fn large_mu_gives_two_solutions() {
        let c = small_pm(1.0);
        let mu0 = mu0_estimate(&c, &BumpFamily::default()).unwrap();
        let res = solve_pm(&PmConfig { mu: 4.0 * mu0, starts: 4, ..c }).unwrap();
        let min = res.iter().filter(|r| r.classification == Classification::GlobalMin).min_by(|a, b| a.energy.total_cmp(&b.energy)).unwrap();
        assert!(min.energy < -1e-6 && min.converged);
        let mp = res.iter().find(|r| r.classification == Classification::MountainPass).unwrap();
        assert!(mp.converged && mp.energy > 0.0 && mp.residual_norm < 1e-5, "{mp:?}");
        assert!(res.iter().all(|r| r.min_value >= -1e-10));
    }

    #[test]
    fn truncation_is_insensitive() {
        let c = small_pm(1.0);
        let mu0 = mu0_estimate(&c, &BumpFamily::default()).unwrap();
        let t = truncation_sensitivity(&PmConfig { mu: 4.0 * mu0, ..c }, 7.0).unwrap();
        assert!(t.energy < 0.0 && t.relative_change < 1e-3, "{t:?}");
    }

    #[test]
    fn hemisphere_ground_state() {
        let c = small_hemisphere();
        let r = solve_hemisphere(&c).unwrap();
        assert!(r.converged && r.residual_norm < 1e-6);
        assert!(r.energy > 0.0);
        let n = r.field.len() - c.n_theta;
        assert!(r.field[..n].iter().all(|&v| v > 0.0));
        assert!(r.field[n..].iter().all(|&v| v == 0.0));
        let t = nehari_scaling(&c, &r.field[..n]).unwrap();
        assert!((t - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nehari_scaling_is_stationary() {
        let c = small_hemisphere();
        let grid = hemisphere_grid(&c).unwrap();
        let u = smooth_random(&grid, 5);
        let t = nehari_scaling(&c, &u).unwrap();
        let e = |s: f64| energy_hemisphere(&c, &u.iter().map(|x| s * x).collect::<Vec<_>>()).unwrap();
        let h = 1e-5 * t;
        let de = (e(t + h) - e(t - h)) / (2.0 * h);
        assert!(de.abs() < 1e-6 * e(t).abs().max(1.0));
    }

    #[test]
    fn hemisphere_gradient_matches_central_difference() {
        let c = small_hemisphere();
        let grid = hemisphere_grid(&c).unwrap();
        let h = build_hemisphere(&c).unwrap();
        for seed in 0..5 {
            let u = smooth_random(&grid, seed);
            let dir = smooth_random(&grid, seed + 50);
            let tau = 1e-5;
            let up: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + tau * b).collect();
            let um: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a - tau * b).collect();
            let fd = (h.disc.energy(&up) - h.disc.energy(&um)) / (2.0 * tau);
            let an = dot(&h.disc.gradient(&u), &dir);
            assert!((fd - an).abs() < 1e-6 * an.abs());
        }
    }

    #[test]
    fn g0_rotation_preserves_weight_and_energy() {
        let c = small_hemisphere();
        let space = ModelSpace::hemisphere(3).unwrap();
        let poles = PoleSet::symmetric_hemisphere_pair(space, c.b).unwrap();
        let grid = hemisphere_grid(&c).unwrap();
        // a G₀-invariant profile sampled at rotated cell centres
        let profile = |x: &ModelPoint| {
            let y = x.coords();
            (1.0 + y[0]) * y[3] * (1.0 + (y[1] * y[1] + y[2] * y[2]))
        };
        let u: Vec<f64> = grid.points().iter().map(profile).collect();
        let ur: Vec<f64> = grid.points().iter().map(|x| profile(&g0_rotate(x, -0.7).unwrap())).collect();
        let e = energy_hemisphere(&c, &u).unwrap();
        let er = energy_hemisphere(&c, &ur).unwrap();
        assert!((e - er).abs() <= 1e-12 * e.abs());
        for x in grid.points().iter().step_by(37) {
            let w = weight_pairwise_gradient(&space, x, poles.get(0), poles.get(1)).unwrap();
            let xr = g0_rotate(x, 1.1).unwrap();
            let wr = weight_pairwise_gradient(&space, &xr, poles.get(0), poles.get(1)).unwrap();
            assert!((w - wr).abs() <= 1e-10 * w);
        }
    }
}
