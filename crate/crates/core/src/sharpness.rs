//! Optimality machinery for the bipolar constant `(n-2)²/4`.
//!
//! The test functions are
//!
//! ```text
//!   u_ε = Σ_i φ(d_i),   φ(d) = log(d/ε²)/log(1/ε) · d^{(2-n)/2}     on [ε², ε]
//!                            = 2 log(√ε/d)/log(1/ε) · d^{(2-n)/2}   on [ε, √ε]
//! ```
//!
//! and zero elsewhere. With
//! `I = ∫|∇u_ε|²`, `J = ∫(1/d_1² + 1/d_2²)u_ε²`, `K = Σ∫(d_iΔd_i-(n-1))/d_i² u_ε²`
//! and `L = ∫⟨∇d_1,∇d_2⟩/(d_1 d_2) u_ε²`, the quotient
//! `(I - (n-2)/2 K)/(J - 2L)` bounds the best constant from above.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::unit_sphere_area;
use crate::error::{Error, Result};
use crate::geometry::quadrature::PanelRule;
use crate::geometry::{AxiGrid, GeodesicBump, GridResolution, ModelPoint, ModelSpace, PoleSet, Region, TestField};
use crate::hardy::verify_theorem1;

/// Smallest supported `ε`: `d^{(2-n)/2}` at `d = ε²` must stay representable.
pub const EPSILON_FLOOR: f64 = 1e-5;

/// Minimum number of radial panels per decade of `[ε², √ε]`.
pub const MIN_PANELS_PER_DECADE: usize = 40;

/// The two-pole test function family `u_ε`.
#[derive(Debug, Clone)]
pub struct EpsilonFamily {
    space: ModelSpace,
    poles: PoleSet,
    epsilon: f64,
    log_inv: f64,
    exponent: f64,
}

impl EpsilonFamily {
    pub fn new(poles: &PoleSet, epsilon: f64) -> Result<Self> {
        if poles.len() != 2 {
            return Err(Error::InvalidPoleSet(format!("{} poles given, the ε-family needs 2", poles.len())));
        }
        if !(EPSILON_FLOOR..1.0).contains(&epsilon) {
            return Err(Error::InvalidConfig(format!(
                "ε = {epsilon} outside [{EPSILON_FLOOR:e}, 1)"
            )));
        }
        let space = *poles.space();
        let outer = epsilon.sqrt();
        if 4.0 * outer >= poles.distance(0, 1) {
            return Err(Error::InvalidConfig(format!(
                "balls of radius 2√ε = {} around the poles overlap",
                2.0 * outer
            )));
        }
        if 2.0 * outer >= 0.5 * space.curvature().conjugate_radius() {
            return Err(Error::InvalidConfig("√ε exceeds the injectivity scale".into()));
        }
        Ok(EpsilonFamily {
            space,
            poles: poles.clone(),
            epsilon,
            log_inv: -epsilon.ln(),
            exponent: (2.0 - space.dim() as f64) / 2.0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    /// `c > 0` runs are outside the setting of the optimality argument.
    pub fn exploratory(&self) -> bool {
        self.space.curvature().is_spherical()
    }

    /// Radial profile `φ(d)` and its derivative.
    pub fn profile(&self, d: f64) -> (f64, f64) {
        let e = self.epsilon;
        let (l, a) = (self.log_inv, self.exponent);
        if d < e * e || d > e.sqrt() {
            return (0.0, 0.0);
        }
        let p = d.powf(a);
        if d <= e {
            let t = (d / (e * e)).ln();
            (t / l * p, p / d / l * (1.0 + a * t))
        } else {
            let t = (e.sqrt() / d).ln();
            (2.0 * t / l * p, 2.0 * p / d / l * (a * t - 1.0))
        }
    }

    pub fn eval(&self, x: &ModelPoint) -> f64 {
        self.poles
            .poles()
            .iter()
            .map(|p| self.profile(self.space.distance(x, p).unwrap_or(f64::INFINITY)).0)
            .sum()
    }
}

impl TestField for EpsilonFamily {
    fn value(&self, x: &ModelPoint) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let mut g = vec![0.0; x.coords().len()];
        for p in self.poles.poles() {
            if let Ok((d, gd)) = self.space.distance_and_gradient(x, p) {
                let dphi = self.profile(d).1;
                g.iter_mut().zip(gd).for_each(|(a, b)| *a += dphi * b);
            }
        }
        g
    }
}

/// Quadrature parameters of the functional evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SharpnessResolution {
    pub panels_per_decade: usize,
    pub order: usize,
    pub n_theta: usize,
}

impl Default for SharpnessResolution {
    fn default() -> Self {
        SharpnessResolution {
            panels_per_decade: MIN_PANELS_PER_DECADE,
            order: 6,
            n_theta: 48,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub i_eps: f64,
    pub j_eps: f64,
    pub k_eps: f64,
    pub l_eps: f64,
    pub ratio: f64,
    pub target: f64,
    /// Estimated quadrature error of `ratio`.
    pub tol: f64,
    pub exploratory: bool,
}

impl SweepRecord {
    pub const CSV_HEADER: &'static str = "epsilon,I,J,K,L,ratio,target,tol";

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
            self.epsilon, self.i_eps, self.j_eps, self.k_eps, self.l_eps, self.ratio, self.target, self.tol
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Functionals {
    i: f64,
    j: f64,
    k: f64,
    l: f64,
}

fn evaluate_functionals(fam: &EpsilonFamily, res: SharpnessResolution) -> Result<Functionals> {
    let space = fam.space;
    let n = space.dim();
    let c = space.curvature();
    let e = fam.epsilon;
    let (lo, hi) = (e * e, e.sqrt());
    let rule = PanelRule::log_graded(lo, hi, &[e], res.panels_per_decade, res.order);
    let area = unit_sphere_area(n - 1);
    let nf = n as f64;

    // pole-radial parts, identical for both poles
    let radial = |f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        rule.integrate(|d| {
            let (phi, dphi) = fam.profile(d);
            area * c.sn(d).powi(n as i32 - 1) * f(d, phi, dphi)
        })
    };
    let i_own = radial(&|_, _, dphi| dphi * dphi);
    let j_own = radial(&|d, phi, _| phi * phi / (d * d));
    let k_own = radial(&|d, phi, _| (nf - 1.0) * c.d_fn(d) * phi * phi / (d * d));

    let mut j_cross = 0.0;
    let mut k_cross = 0.0;
    let mut l = 0.0;
    for (i, j) in [(0usize, 1usize), (1, 0)] {
        let grid = pole_centred_grid(fam, i, j, &rule, res)?;
        let pole_j = fam.poles.get(j);
        let pole_i = fam.poles.get(i);
        let sums = grid
            .points()
            .par_iter()
            .map(|p| -> Result<[f64; 3]> {
                let phi = fam.profile(p.r).0;
                let u2 = phi * phi;
                let (dj, gj) = space.distance_and_gradient(&p.point, pole_j)?;
                let (_, gi) = space.distance_and_gradient(&p.point, pole_i)?;
                let cos = space.inner(&gi, &gj);
                Ok([
                    p.weight * u2 / (dj * dj),
                    p.weight * (nf - 1.0) * c.d_fn(dj) * u2 / (dj * dj),
                    p.weight * cos * u2 / (p.r * dj),
                ])
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold([0.0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        j_cross += sums[0];
        k_cross += sums[1];
        l += sums[2];
    }
    Ok(Functionals {
        i: 2.0 * i_own,
        j: 2.0 * j_own + j_cross,
        k: 2.0 * k_own + k_cross,
        l,
    })
}

/// Annulus `[ε², √ε]` about pole `i` with its axis toward pole `j`.
fn pole_centred_grid(fam: &EpsilonFamily, i: usize, j: usize, rule: &PanelRule, res: SharpnessResolution) -> Result<AxiGrid> {
    let space = fam.space;
    let base = fam.poles.get(i).clone();
    let mut e0 = space.log_map(&base, fam.poles.get(j))?;
    let len = space.norm(&e0);
    e0.iter_mut().for_each(|v| *v /= len);
    let e1 = orthonormal_tangent(&space, &base, &e0);
    let theta = PanelRule::graded(0.0, std::f64::consts::PI, &[], &[], res.n_theta, 8, 0.0);
    AxiGrid::with_frame(space, base, e0, e1, rule.clone(), theta, Vec::new())
}

/// A unit tangent vector at `x` orthogonal to `e0`.
fn orthonormal_tangent(space: &ModelSpace, x: &ModelPoint, e0: &[f64]) -> Vec<f64> {
    (0..space.dim())
        .map(|k| {
            let mut v = space.tangent_projection(x, &space.base_direction(k));
            let a = space.inner(&v, e0);
            v.iter_mut().zip(e0).for_each(|(vi, ei)| *vi -= a * ei);
            v
        })
        .max_by(|a, b| space.norm(a).total_cmp(&space.norm(b)))
        .map(|v| {
            let len = space.norm(&v);
            v.into_iter().map(|x| x / len).collect()
        })
        .expect("dimension >= 3")
}

/// `I_ε, J_ε, K_ε, L_ε` and the quotient, with an error estimate from a
/// half-resolution rerun.
pub fn functionals(fam: &EpsilonFamily, res: SharpnessResolution) -> Result<SweepRecord> {
    if res.panels_per_decade < MIN_PANELS_PER_DECADE {
        return Err(Error::GridTooCoarse(format!(
            "{} radial panels per decade, at least {MIN_PANELS_PER_DECADE} required",
            res.panels_per_decade
        )));
    }
    let n = fam.space.dim() as f64;
    let quotient = |f: &Functionals| (f.i - (n - 2.0) / 2.0 * f.k) / (f.j - 2.0 * f.l);
    let fine = evaluate_functionals(fam, res)?;
    let coarse = evaluate_functionals(
        fam,
        SharpnessResolution {
            panels_per_decade: res.panels_per_decade / 2,
            order: res.order,
            n_theta: res.n_theta / 2,
        },
    )?;
    let ratio = quotient(&fine);
    if !(fine.j > 0.0) || !ratio.is_finite() {
        return Err(Error::GridTooCoarse("degenerate functionals".into()));
    }
    Ok(SweepRecord {
        epsilon: fam.epsilon,
        i_eps: fine.i,
        j_eps: fine.j,
        k_eps: fine.k,
        l_eps: fine.l,
        ratio,
        target: (n - 2.0).powi(2) / 4.0,
        tol: (ratio - quotient(&coarse)).abs(),
        exploratory: fam.exploratory(),
    })
}

/// Records for a decreasing list of `ε`.
pub fn sharpness_sweep(poles: &PoleSet, eps_list: &[f64], res: SharpnessResolution) -> Result<Vec<SweepRecord>> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig("ε list must be strictly decreasing".into()));
    }
    eps_list
        .par_iter()
        .map(|&e| functionals(&EpsilonFamily::new(poles, e)?, res))
        .collect()
}

/// Convergence diagnostics of a sweep toward the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAssessment {
    /// `|ratio - target|/target` of the last record.
    pub final_relative_error: f64,
    pub strictly_decreasing: bool,
    /// `J(ε_{k+1})/J(ε_k)`.
    pub j_growth: Vec<f64>,
}

pub fn assess_sweep(records: &[SweepRecord]) -> SweepAssessment {
    let dist: Vec<f64> = records.iter().map(|r| (r.ratio - r.target).abs()).collect();
    SweepAssessment {
        final_relative_error: records.last().map(|r| (r.ratio - r.target).abs() / r.target).unwrap_or(f64::NAN),
        strictly_decreasing: dist.windows(2).all(|w| w[1] < w[0]),
        j_growth: records.windows(2).map(|w| w[1].j_eps / w[0].j_eps).collect(),
    }
}

/// A parametrized set of admissible trial fields.
pub trait TrialFamily: Sync {
    fn dim(&self) -> usize;
    fn initial(&self) -> Vec<f64>;
    /// Box constraints `(lo, hi)` per parameter.
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn build(&self, params: &[f64]) -> Box<dyn TestField>;
    /// Radius of a ball about the base point containing every support.
    fn support_radius(&self) -> f64;
}

/// `Σ_i (d_i² + s²)^{-α/2} χ(d_i/R)` with the smooth cutoff
/// `χ(t) = exp(1 - 1/(1-t²))`; parameters `(α, log₁₀ s)`.
pub struct PowerCutoffFamily {
    pub poles: PoleSet,
    pub cutoff: f64,
}

struct PowerCutoff {
    poles: PoleSet,
    alpha: f64,
    s2: f64,
    bumps: Vec<GeodesicBump>,
}

impl TestField for PowerCutoff {
    fn value(&self, x: &ModelPoint) -> f64 {
        let space = self.poles.space();
        self.poles
            .poles()
            .iter()
            .zip(&self.bumps)
            .map(|(p, b)| {
                let d = space.distance(x, p).unwrap_or(0.0);
                (d * d + self.s2).powf(-0.5 * self.alpha) * b.value(x)
            })
            .sum()
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let space = self.poles.space();
        let mut g = vec![0.0; x.coords().len()];
        for (p, b) in self.poles.poles().iter().zip(&self.bumps) {
            let Ok((d, gd)) = space.distance_and_gradient(x, p) else { continue };
            let q = d * d + self.s2;
            let power = q.powf(-0.5 * self.alpha);
            let dpower = -self.alpha * d * power / q;
            let bv = b.value(x);
            let bg = b.gradient(x);
            for k in 0..g.len() {
                g[k] += dpower * bv * gd[k] + power * bg[k];
            }
        }
        g
    }
}

impl TrialFamily for PowerCutoffFamily {
    fn dim(&self) -> usize {
        2
    }

    fn initial(&self) -> Vec<f64> {
        vec![0.2, -1.0]
    }

    /// The core scale stays ten exclusion radii above the poles so the
    /// grid resolves it.
    fn bounds(&self) -> Vec<(f64, f64)> {
        let n = self.poles.space().dim() as f64;
        vec![(0.0, n - 2.0), ((1e-2 * self.poles.min_distance()).log10(), 0.0)]
    }

    fn build(&self, params: &[f64]) -> Box<dyn TestField> {
        let bumps = self
            .poles
            .poles()
            .iter()
            .map(|p| GeodesicBump::new(p.clone(), self.cutoff, 1.0))
            .collect();
        Box::new(PowerCutoff {
            poles: self.poles.clone(),
            alpha: params[0],
            s2: 10f64.powf(2.0 * params[1]),
            bumps,
        })
    }

    fn support_radius(&self) -> f64 {
        self.poles.max_distance_from_base().unwrap_or(0.0) + self.cutoff
    }
}

/// A family with a single member.
pub struct FixedField<F> {
    pub field: F,
    pub support: f64,
}

impl<F: TestField + Clone + 'static> TrialFamily for FixedField<F> {
    fn dim(&self) -> usize {
        0
    }

    fn initial(&self) -> Vec<f64> {
        Vec::new()
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }

    fn build(&self, _: &[f64]) -> Box<dyn TestField> {
        Box::new(self.field.clone())
    }

    fn support_radius(&self) -> f64 {
        self.support
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub best_quotient: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
    /// The quotient is an upper bound found by search, never a certified optimum.
    pub empirical: bool,
    /// `(n-2)²/m²`, the constant of the first multipolar inequality.
    pub reference_constant: f64,
}

/// `∫|∇u|² / Σ_{i<j} ∫ w_ij u²` on a grid. Fields the grid resolves
/// worse than 1% are rejected.
pub fn rayleigh_quotient<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid) -> Result<f64> {
    let report = verify_theorem1(poles, field, grid)?;
    if report.tol > 1e-2 * report.lhs {
        return Err(Error::GridTooCoarse(format!(
            "quadrature tolerance {:.2e} against gradient energy {:.2e}",
            report.tol, report.lhs
        )));
    }
    let n = poles.space().dim() as f64;
    let m = poles.len() as f64;
    let pairs = report.rhs_pairwise * m * m / ((n - 2.0) * (n - 2.0));
    if !(pairs > 0.0) {
        return Err(Error::FieldNotAdmissible("zero denominator in the Rayleigh quotient".into()));
    }
    Ok(report.lhs / pairs)
}

/// Coordinate search over the trial family with at most `budget`
/// quotient evaluations.
pub fn rayleigh_probe<T: TrialFamily + ?Sized>(
    poles: &PoleSet,
    family: &T,
    budget: usize,
    resolution: GridResolution,
) -> Result<ProbeResult> {
    let space = *poles.space();
    let radius = family.support_radius() * 1.05;
    let grid = AxiGrid::build(space, poles, Region::Ball { radius }, resolution, None)?;
    let eval = |p: &[f64]| rayleigh_quotient(poles, family.build(p).as_ref(), &grid);
    let bounds = family.bounds();
    let mut x = family.initial();
    let mut best = eval(&x)?;
    let mut evaluations = 1;
    let mut step: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.25 * (hi - lo)).collect();
    'search: while evaluations < budget && step.iter().any(|&s| s > 1e-4) {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= budget {
                    break 'search;
                }
                let mut y = x.clone();
                y[k] = (y[k] + dir * step[k]).clamp(bounds[k].0, bounds[k].1);
                if y[k] == x[k] {
                    continue;
                }
                evaluations += 1;
                if let Ok(q) = eval(&y) {
                    if q < best {
                        best = q;
                        x = y;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    let n = space.dim() as f64;
    let m = poles.len() as f64;
    Ok(ProbeResult {
        best_quotient: best,
        params: x,
        evaluations,
        empirical: true,
        reference_constant: (n - 2.0).powi(2) / (m * m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Curvature;

    fn family(n: usize, c: f64, eps: f64) -> EpsilonFamily {
        let s = ModelSpace::new(n, Curvature::new(c).unwrap()).unwrap();
        let poles = PoleSet::on_axis(s, &[-0.5, 0.5]).unwrap();
        EpsilonFamily::new(&poles, eps).unwrap()
    }

    #[test]
    fn profile_breakpoints() {
        for &n in &[3usize, 4, 5] {
            let f = family(n, 0.0, 1e-2);
            let e: f64 = 1e-2;
            let a = (2.0 - n as f64) / 2.0;
            assert_eq!(f.profile(e * e).0, 0.0);
            assert!(f.profile(e.sqrt()).0.abs() < 1e-12 * e.powf(a));
            assert!((f.profile(e).0 - e.powf(a)).abs() < 1e-12 * e.powf(a));
            let inner = f.profile(e.powf(1.5)).0;
            assert!((inner - 0.5 * e.powf(1.5 * a)).abs() < 1e-12 * inner);
            assert_eq!(f.profile(0.5 * e * e), (0.0, 0.0));
            assert_eq!(f.profile(0.2), (0.0, 0.0));
        }
    }

    #[test]
    fn profile_derivative_matches_difference() {
        let f = family(3, 0.0, 1e-3);
        for &d in &[2e-6, 5e-4, 3e-3, 2e-2] {
            let h = 1e-7 * d;
            let fd = (f.profile(d + h).0 - f.profile(d - h).0) / (2.0 * h);
            let an = f.profile(d).1;
            assert!((fd - an).abs() < 1e-6 * an.abs(), "{d}: {fd} vs {an}");
        }
    }

    #[test]
    fn rejects_invalid_epsilon() {
        let s = ModelSpace::euclidean(3).unwrap();
        let poles = PoleSet::on_axis(s, &[-0.5, 0.5]).unwrap();
        assert!(EpsilonFamily::new(&poles, 1e-6).is_err());
        assert!(EpsilonFamily::new(&poles, 0.1).is_err());
        assert!(EpsilonFamily::new(&poles, 1e-2).is_ok());
    }

    #[test]
    fn flat_functionals() {
        let f = family(3, 0.0, 1e-2);
        let r = functionals(&f, SharpnessResolution::default()).unwrap();
        assert_eq!(r.k_eps, 0.0);
        // own-pole terms in closed form: I - J/4 = 3|S²|/L per pole and J_own = |S²| L/2 per pole
        let l = (1e2f64).ln();
        let area = 4.0 * std::f64::consts::PI;
        let i_exact = 2.0 * area * (3.0 / l + l / 8.0);
        assert!((r.i_eps - i_exact).abs() < 1e-8 * i_exact);
        assert!(r.j_eps > 2.0 * area * l / 2.0);
        assert!(r.tol < 1e-6);
    }

    #[test]
    fn i_minus_mu_j_stays_bounded() {
        let mut gaps = Vec::new();
        let mut js = Vec::new();
        let mut ls = Vec::new();
        for &e in &[1e-2, 1e-3, 1e-4] {
            let r = functionals(&family(3, 0.0, e), SharpnessResolution::default()).unwrap();
            gaps.push((r.i_eps - r.target * r.j_eps).abs());
            js.push(r.j_eps);
            ls.push(r.l_eps.abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
        assert!(js.windows(2).all(|w| w[1] > w[0]));
        assert!(ls.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn curved_k_is_small() {
        let f = family(3, -1.0, 1e-3);
        let r = functionals(&f, SharpnessResolution::default()).unwrap();
        assert!(r.k_eps > 0.0 && r.k_eps < 0.1);
    }

    #[test]
    fn support_disjointness() {
        let f = family(3, 0.0, 1e-2);
        let s = f.space;
        assert_eq!(f.value(&s.base_point()), 0.0);
        assert_eq!(f.value(&s.axis_point(0.5 + 0.2).unwrap()), 0.0);
        assert!(f.value(&s.axis_point(0.5 + 0.05).unwrap()) > 0.0);
    }

    #[test]
    fn fixed_family_matches_report() {
        let s = ModelSpace::euclidean(3).unwrap();
        let poles = PoleSet::on_axis(s, &[-0.5, 0.5]).unwrap();
        let bump = GeodesicBump::new(s.base_point(), 1.5, 1.0);
        let fam = FixedField { field: bump.clone(), support: 1.5 };
        let res = GridResolution { n_r: 96, n_theta: 48 };
        let probe = rayleigh_probe(&poles, &fam, 10, res).unwrap();
        let grid = AxiGrid::build(s, &poles, Region::Ball { radius: 1.5 * 1.05 }, res, None).unwrap();
        let r = verify_theorem1(&poles, &bump, &grid).unwrap();
        assert!((probe.best_quotient - r.lhs / (4.0 * r.rhs_pairwise)).abs() < 1e-12 * probe.best_quotient);
        assert!(probe.empirical && probe.evaluations == 1);
    }

    #[test]
    fn power_probe_respects_the_constant() {
        let s = ModelSpace::euclidean(3).unwrap();
        let poles = PoleSet::on_axis(s, &[-0.5, 0.5]).unwrap();
        let fam = PowerCutoffFamily { poles: poles.clone(), cutoff: 1.0 };
        let probe = rayleigh_probe(&poles, &fam, 40, GridResolution { n_r: 96, n_theta: 48 }).unwrap();
        assert!(probe.best_quotient >= probe.reference_constant, "{probe:?}");
        assert!(probe.evaluations <= 40);
    }
}
