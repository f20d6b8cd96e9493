//! Multipolar Hardy weights and inequality verifiers.
//!
//! For poles `x_1, …, x_m` and `d_i = d(·, x_i)` the verifiers compare
//!
//! ```text
//!   ∫|∇u|²  ≥  (n-2)²/m² Σ_{i<j} ∫ w_ij u²  +  (n-2)/m Σ_i ∫ (d_i Δd_i - (n-1))/d_i² u²
//! ```
//!
//! where `w_ij = |∇d_i/d_i - ∇d_j/d_j|²` (first inequality) or its curved
//! lower bound built from a comparison curvature `k₀` (second inequality).
//! On a space form `d Δd - (n-1) = (n-1) D_c(d)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{d_c_lower_bound, hemisphere_constant, r_ij_correction, unit_sphere_area, Curvature};
use crate::error::{Error, Result};
use crate::geometry::{AxiGrid, GridPoint, GridResolution, ModelPoint, ModelSpace, PoleSet, ScalarField, TestField};

/// `|∇d_i/d_i - ∇d_j/d_j|²` at `x`.
pub fn weight_pairwise_gradient(space: &ModelSpace, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint) -> Result<f64> {
    let (di, gi) = space.distance_and_gradient(x, pole_i)?;
    let (dj, gj) = space.distance_and_gradient(x, pole_j)?;
    Ok(pairwise_from_gradients(space, di, &gi, dj, &gj))
}

fn pairwise_from_gradients(space: &ModelSpace, di: f64, gi: &[f64], dj: f64, gj: &[f64]) -> f64 {
    let v: Vec<f64> = gi.iter().zip(gj).map(|(a, b)| a / di - b / dj).collect();
    space.inner(&v, &v).max(0.0)
}

/// The same weight expanded as `1/d_i² + 1/d_j² - 2 cos γ/(d_i d_j)`.
pub fn weight_pairwise_expanded(space: &ModelSpace, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint) -> Result<f64> {
    let di = space.distance(x, pole_i)?;
    let dj = space.distance(x, pole_j)?;
    let cos = space.angle_cosine(x, pole_i, pole_j)?;
    Ok(1.0 / (di * di) + 1.0 / (dj * dj) - 2.0 * cos / (di * dj))
}

/// Euclidean weight `|x_i - x_j|² / (|x - x_i|² |x - x_j|²)`.
pub fn weight_euclidean_cz(space: &ModelSpace, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint) -> Result<f64> {
    if !space.curvature().is_flat() {
        return Err(Error::domain("weight_euclidean_cz", "defined on flat space only"));
    }
    let dij = space.distance(pole_i, pole_j)?;
    let di = space.distance(x, pole_i)?;
    let dj = space.distance(x, pole_j)?;
    if di == 0.0 || dj == 0.0 {
        return Err(Error::CoincidentPoints("weight_euclidean_cz"));
    }
    Ok(dij * dij / (di * di * dj * dj))
}

/// Curved bipolar weight `4 s²(d_ij/2) / (d_i d_j s(d_i) s(d_j)) + R_ij(k₀)`
/// with `s = s_{k₀}`, from the distances alone.
pub fn bipolar_curved_from_distances(k0: Curvature, di: f64, dj: f64, dij: f64) -> Result<f64> {
    let r = r_ij_correction(k0, di, dj)?;
    let h = k0.sn(0.5 * dij);
    Ok(4.0 * h * h / (di * dj * k0.sn(di) * k0.sn(dj)) + r)
}

/// Curved bipolar weight at `x`.
pub fn weight_bipolar_curved(space: &ModelSpace, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint, k0: Curvature) -> Result<f64> {
    let di = space.distance(x, pole_i)?;
    let dj = space.distance(x, pole_j)?;
    let dij = space.distance(pole_i, pole_j)?;
    if di == 0.0 || dj == 0.0 {
        return Err(Error::CoincidentPoints("weight_bipolar_curved"));
    }
    bipolar_curved_from_distances(k0, di, dj, dij)
}

/// Which pair weight enters the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
enum PairWeight {
    Gradient,
    Curved(Curvature),
}

/// Which statement a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    MultipolarI,
    MultipolarII,
    Hemisphere,
    CurvatureImprovement,
    CurvatureImprovementBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub theorem: Theorem,
    pub n: usize,
    pub c: f64,
    pub m: usize,
    pub k0: Option<f64>,
    pub beta: Option<f64>,
    pub resolution: Option<GridResolution>,
    pub nodes: usize,
}

/// Both sides of a Hardy-type inequality evaluated by quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    /// `∫|∇u|²`, plus `C(n,β)∫u²` for the hemisphere inequality.
    pub lhs: f64,
    pub rhs_pairwise: f64,
    pub rhs_correction: f64,
    /// `lhs - rhs_pairwise - rhs_correction`.
    pub residual: f64,
    pub relative_margin: f64,
    /// Declared quadrature error bound for `residual`.
    pub tol: f64,
    pub config: ReportConfig,
}

impl HardyReport {
    pub fn rhs_total(&self) -> f64 {
        self.rhs_pairwise + self.rhs_correction
    }

    pub fn passed(&self) -> bool {
        self.residual >= -self.tol
    }
}

/// Raw integrals of one evaluation.
#[derive(Debug, Clone, Copy, Default)]
struct Integrals {
    grad: f64,
    mass: f64,
    pairs: f64,
    correction: f64,
    bound_correction: f64,
    /// Analytic estimate of the pair terms inside the exclusion balls.
    completion: f64,
}

fn check_grid(grid: &AxiGrid, poles: &PoleSet) -> Result<()> {
    if grid.space() != poles.space() {
        return Err(Error::MismatchedSpaces);
    }
    let balls = grid.exclusion_balls();
    let matches = balls.len() == poles.len()
        && balls
            .iter()
            .zip(poles.poles())
            .all(|((p, _), q)| grid.space().distance(p, q).map(|d| d < 1e-12).unwrap_or(false));
    if !matches {
        return Err(Error::InvalidConfig("grid was built for a different pole set".into()));
    }
    if grid.volume_rel_error() > crate::geometry::VOLUME_TOLERANCE {
        return Err(Error::GridTooCoarse(format!(
            "volume self-test relative error {:.3e}",
            grid.volume_rel_error()
        )));
    }
    Ok(())
}

fn evaluate<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid, weight: PairWeight) -> Result<Integrals> {
    let space = *grid.space();
    let n = space.dim();
    let c = space.curvature();
    let m = poles.len();
    let pairs: Vec<(usize, usize)> = poles.pairs().collect();
    let per_point = |p: &GridPoint| -> Result<[f64; 5]> {
        let u = field.value(&p.point);
        let grad = field.gradient_norm_sq(&p.point);
        if u == 0.0 {
            return Ok([grad, 0.0, 0.0, 0.0, 0.0]);
        }
        let mut d = Vec::with_capacity(m);
        let mut g = Vec::with_capacity(m);
        for pole in poles.poles() {
            let (di, gi) = space.distance_and_gradient(&p.point, pole)?;
            d.push(di);
            g.push(gi);
        }
        let mut wsum = 0.0;
        for &(i, j) in &pairs {
            wsum += match weight {
                PairWeight::Gradient => pairwise_from_gradients(&space, d[i], &g[i], d[j], &g[j]),
                PairWeight::Curved(k0) => bipolar_curved_from_distances(k0, d[i], d[j], poles.distance(i, j))?,
            };
        }
        let mut corr = 0.0;
        let mut bound = 0.0;
        for &di in &d {
            corr += (n as f64 - 1.0) * c.d_fn(di) / (di * di);
            bound += (n as f64 - 1.0) * d_c_lower_bound(c, di) / (di * di);
        }
        let u2 = u * u;
        Ok([grad, u2, wsum * u2, corr * u2, bound * u2])
    };
    let sums = grid
        .points()
        .par_iter()
        .filter(|p| p.active)
        .map(|p| per_point(p).map(|v| v.map(|x| x * p.weight)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold([0.0; 5], |a, b| std::array::from_fn(|k| a[k] + b[k]));

    let mut completion = 0.0;
    let area = unit_sphere_area(n - 1);
    for (i, (pole, delta)) in grid.exclusion_balls().iter().enumerate() {
        let u = field.value(pole);
        let pair_count = pairs.iter().filter(|&&(a, b)| a == i || b == i).count() as f64;
        completion += pair_count * u * u * area * delta.powi(n as i32 - 2) / (n as f64 - 2.0);
    }
    Ok(Integrals {
        grad: sums[0],
        mass: sums[1],
        pairs: sums[2] + completion,
        correction: sums[3],
        bound_correction: sums[4],
        completion,
    })
}

fn check_compact_support<F: TestField + ?Sized>(field: &F, grid: &AxiGrid) -> Result<()> {
    let sampled = ScalarField::sample(grid, field)?;
    if !sampled.vanishes_on_outer_rings(2) {
        return Err(Error::FieldNotAdmissible(
            "field must vanish on the outermost two radial rings (compact support)".into(),
        ));
    }
    Ok(())
}

struct Assembly {
    theorem: Theorem,
    k0: Option<f64>,
    beta: Option<f64>,
}

fn assemble(
    poles: &PoleSet,
    grid: &AxiGrid,
    ints: &Integrals,
    coarse: Option<&Integrals>,
    mass_constant: f64,
    correction_factor: f64,
    use_bound: bool,
    meta: Assembly,
) -> HardyReport {
    let space = grid.space();
    let n = space.dim() as f64;
    let m = poles.len() as f64;
    let sides = |it: &Integrals| {
        let lhs = it.grad + mass_constant * it.mass;
        let corr = if use_bound { it.bound_correction } else { it.correction };
        let rhs_pairwise = (n - 2.0).powi(2) / (m * m) * it.pairs;
        (lhs, rhs_pairwise, correction_factor * corr)
    };
    let (lhs, rhs_pairwise, rhs_correction) = sides(ints);
    let residual = lhs - rhs_pairwise - rhs_correction;
    let scale = lhs.abs().max((rhs_pairwise + rhs_correction).abs());
    let mut tol = 10.0 * grid.volume_rel_error() * scale;
    if let Some(ci) = coarse {
        let (l, p, k) = sides(ci);
        tol = tol.max((l - p - k - residual).abs());
    }
    tol = tol.max((n - 2.0).powi(2) / (m * m) * ints.completion);
    HardyReport {
        lhs,
        rhs_pairwise,
        rhs_correction,
        residual,
        relative_margin: if lhs != 0.0 { residual / lhs } else { 0.0 },
        tol,
        config: ReportConfig {
            theorem: meta.theorem,
            n: space.dim(),
            c: space.curvature().value(),
            m: poles.len(),
            k0: meta.k0,
            beta: meta.beta,
            resolution: grid.resolution(),
            nodes: grid.len(),
        },
    }
}

/// Integrals on the grid and, when available, on its coarsened twin.
fn evaluate_with_coarse<F: TestField + ?Sized>(
    poles: &PoleSet,
    field: &F,
    grid: &AxiGrid,
    weight: PairWeight,
) -> Result<(Integrals, Option<Integrals>)> {
    let fine = evaluate(poles, field, grid, weight)?;
    let coarse = match grid.coarsened() {
        Some(Ok(g)) => Some(evaluate(poles, field, &g, weight)?),
        _ => None,
    };
    Ok((fine, coarse))
}

/// `Σ_i ∫ (n-1) D_c(d_i)/d_i² u²`, the curvature correction before the
/// factor `(n-2)/m`.
pub fn correction_term<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid) -> Result<f64> {
    check_grid(grid, poles)?;
    Ok(evaluate(poles, field, grid, PairWeight::Gradient)?.correction)
}

/// First multipolar inequality with the pairwise gradient weight and the
/// curvature correction.
pub fn verify_theorem1<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid) -> Result<HardyReport> {
    check_grid(grid, poles)?;
    check_compact_support(field, grid)?;
    let n = grid.space().dim() as f64;
    let (fine, coarse) = evaluate_with_coarse(poles, field, grid, PairWeight::Gradient)?;
    Ok(assemble(
        poles,
        grid,
        &fine,
        coarse.as_ref(),
        0.0,
        (n - 2.0) / poles.len() as f64,
        false,
        Assembly {
            theorem: Theorem::MultipolarI,
            k0: None,
            beta: None,
        },
    ))
}

/// Second multipolar inequality: the pair weight is replaced by its curved
/// lower bound for a comparison curvature `k₀ <= c`.
pub fn verify_theorem2<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid, k0: Curvature) -> Result<HardyReport> {
    let c = grid.space().curvature();
    if k0 > c {
        return Err(Error::hypothesis(
            format!("comparison hypothesis violated: k0 = {} > c = {}", k0.value(), c.value()),
            "sectional curvature bounded below by k0",
        ));
    }
    check_grid(grid, poles)?;
    check_compact_support(field, grid)?;
    let n = grid.space().dim() as f64;
    let (fine, coarse) = evaluate_with_coarse(poles, field, grid, PairWeight::Curved(k0))?;
    Ok(assemble(
        poles,
        grid,
        &fine,
        coarse.as_ref(),
        0.0,
        (n - 2.0) / poles.len() as f64,
        false,
        Assembly {
            theorem: Theorem::MultipolarII,
            k0: Some(k0.value()),
            beta: None,
        },
    ))
}

/// Hemisphere inequality `∫|∇u|² + C(n,β)∫u² ≥ (n-2)²/m² Σ ∫ w_ij u²` with
/// `β` the largest distance from the north pole to a pole.
pub fn verify_hemisphere<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid) -> Result<HardyReport> {
    let space = grid.space();
    if !space.is_hemisphere() {
        return Err(Error::InvalidConfig("hemisphere inequality needs a hemisphere space".into()));
    }
    check_grid(grid, poles)?;
    let beta = poles.max_distance_from_base()?;
    let constant = hemisphere_constant(space.dim(), beta).map_err(|_| {
        Error::hypothesis(format!("β = {beta} ≥ π/2"), "poles strictly inside the open upper hemisphere")
    })?;
    // u must vanish on the equator
    let n = space.dim();
    for k in 0..=64 {
        let theta = std::f64::consts::PI * k as f64 / 64.0;
        let mut v = vec![0.0; space.ambient_dim()];
        v[0] = theta.cos();
        v[1] = theta.sin();
        let mut coords = v;
        coords[n] = 0.0;
        let eq = space.closure_point(coords);
        let value = field.value(&eq);
        if value.abs() > 1e-12 {
            return Err(Error::FieldNotAdmissible(format!(
                "field does not vanish on the equator (u = {value:.3e})"
            )));
        }
    }
    let (fine, coarse) = evaluate_with_coarse(poles, field, grid, PairWeight::Gradient)?;
    Ok(assemble(
        poles,
        grid,
        &fine,
        coarse.as_ref(),
        constant,
        0.0,
        false,
        Assembly {
            theorem: Theorem::Hemisphere,
            k0: None,
            beta: Some(beta),
        },
    ))
}

/// The curvature improvement on negatively curved space forms, with the
/// exact `D_c` and with its lower bound `3|c|r²/(π²+|c|r²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub exact: HardyReport,
    pub bound: HardyReport,
}

pub fn verify_remark_c<F: TestField + ?Sized>(poles: &PoleSet, field: &F, grid: &AxiGrid) -> Result<RemarkReport> {
    if !grid.space().curvature().is_hyperbolic() {
        return Err(Error::hypothesis(
            format!("curvature {} is not negative", grid.space().curvature().value()),
            "Cartan–Hadamard manifold with curvature bounded above by c < 0",
        ));
    }
    check_grid(grid, poles)?;
    check_compact_support(field, grid)?;
    let n = grid.space().dim() as f64;
    let (fine, coarse) = evaluate_with_coarse(poles, field, grid, PairWeight::Gradient)?;
    let factor = (n - 2.0) / poles.len() as f64;
    let build = |use_bound, theorem| {
        assemble(
            poles,
            grid,
            &fine,
            coarse.as_ref(),
            0.0,
            factor,
            use_bound,
            Assembly {
                theorem,
                k0: None,
                beta: None,
            },
        )
    };
    Ok(RemarkReport {
        exact: build(false, Theorem::CurvatureImprovement),
        bound: build(true, Theorem::CurvatureImprovementBound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeodesicBump, Region, ZeroField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize, c: f64) -> ModelSpace {
        ModelSpace::new(n, Curvature::new(c).unwrap()).unwrap()
    }

    fn grid(space: ModelSpace, poles: &PoleSet, radius: f64) -> AxiGrid {
        AxiGrid::build(space, poles, Region::Ball { radius }, GridResolution::default(), None).unwrap()
    }

    #[test]
    fn euclidean_weight_examples() {
        let e = space(3, 0.0);
        let pi = e.axis_point(-1.0).unwrap();
        let pj = e.axis_point(1.0).unwrap();
        let origin = e.base_point();
        assert!((weight_euclidean_cz(&e, &origin, &pi, &pj).unwrap() - 4.0).abs() < 1e-15);
        assert!((weight_pairwise_gradient(&e, &origin, &pi, &pj).unwrap() - 4.0).abs() < 1e-14);
        let far = e.point(vec![0.0, 1e3, 0.0]).unwrap();
        let w = weight_euclidean_cz(&e, &far, &pi, &pj).unwrap();
        assert!(w * 1e12 < 4.1 && w * 1e12 > 3.9);
        assert!(weight_euclidean_cz(&space(3, -1.0), &space(3, -1.0).base_point(), &pi, &pj).is_err());
    }

    #[test]
    fn bisector_expansion() {
        let e = space(3, 0.0);
        let pi = e.axis_point(-1.0).unwrap();
        let pj = e.axis_point(1.0).unwrap();
        let x = e.point(vec![0.0, 2.0, 0.0]).unwrap();
        let d2 = 5.0;
        let cos = (4.0 - 1.0) / 5.0; // cos γ with legs (±1, 2)
        let w = weight_pairwise_gradient(&e, &x, &pi, &pj).unwrap();
        assert!((w - 2.0 / d2 * (1.0 - cos)).abs() < 1e-14);
        let expanded = weight_pairwise_expanded(&e, &x, &pi, &pj).unwrap();
        assert!((w - expanded).abs() < 1e-14);
    }

    #[test]
    fn curved_weight_examples() {
        assert!((bipolar_curved_from_distances(Curvature::FLAT, 1.0, 2.0, 1.5).unwrap() - 2.25 / 4.0).abs() < 1e-15);
        let v = bipolar_curved_from_distances(Curvature::new(-1.0).unwrap(), 1.0, 1.0, 1.0).unwrap();
        // 4 sinh²(1/2)/sinh²(1) with R(-1, 1, 1) = 0
        assert!((v - 0.7864477329659274).abs() < 1e-14);
    }

    #[test]
    fn domination_on_hyperbolic_samples() {
        let h = space(3, -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = h.base_point();
        for _ in 0..2000 {
            let x = h.random_point(&mut rng, &base, 3.0);
            let a = h.random_point(&mut rng, &base, 3.0);
            let b = h.random_point(&mut rng, &base, 3.0);
            let wp = weight_pairwise_gradient(&h, &x, &a, &b).unwrap();
            for &k0 in &[-1.0, -4.0] {
                let wc = weight_bipolar_curved(&h, &x, &a, &b, Curvature::new(k0).unwrap()).unwrap();
                assert!(wp >= wc - 1e-10 * (1.0 + wp), "{wp} < {wc}");
            }
        }
    }

    #[test]
    fn zero_field_gives_zero_report() {
        let e = space(3, 0.0);
        let poles = PoleSet::on_axis(e, &[-0.5, 0.5]).unwrap();
        let g = grid(e, &poles, 2.0);
        let r = verify_theorem1(&poles, &ZeroField, &g).unwrap();
        assert_eq!((r.lhs, r.rhs_pairwise, r.rhs_correction, r.residual), (0.0, 0.0, 0.0, 0.0));
        assert!(r.passed());
    }

    #[test]
    fn theorem1_flat_bump() {
        let e = space(3, 0.0);
        let poles = PoleSet::on_axis(e, &[-0.5, 0.5]).unwrap();
        let g = grid(e, &poles, 2.0);
        let bump = GeodesicBump::new(e.base_point(), 1.5, 1.0);
        let r = verify_theorem1(&poles, &bump, &g).unwrap();
        assert!(r.residual > 0.0 && r.passed(), "{r:?}");
        assert!(r.rhs_correction.abs() < 1e-12);
        assert!(r.tol < 0.1 * r.residual);
        let r2 = verify_theorem2(&poles, &bump, &g, Curvature::FLAT).unwrap();
        assert!((r2.residual - r.residual).abs() < 1e-9 * r.lhs);
    }

    #[test]
    fn theorem1_requires_compact_support() {
        let e = space(3, 0.0);
        let poles = PoleSet::on_axis(e, &[-0.5, 0.5]).unwrap();
        let g = grid(e, &poles, 1.0);
        let bump = GeodesicBump::new(e.base_point(), 1.5, 1.0);
        assert!(matches!(verify_theorem1(&poles, &bump, &g), Err(Error::FieldNotAdmissible(_))));
    }

    #[test]
    fn theorem2_rejects_larger_k0() {
        let h = space(3, -1.0);
        let poles = PoleSet::on_axis(h, &[-0.5, 0.5]).unwrap();
        let g = grid(h, &poles, 2.0);
        let bump = GeodesicBump::new(h.base_point(), 1.5, 1.0);
        let err = verify_theorem2(&poles, &bump, &g, Curvature::FLAT).unwrap_err();
        assert!(err.to_string().contains("comparison hypothesis violated"));
    }

    #[test]
    fn hyperbolic_reports() {
        let h = space(3, -1.0);
        let poles = PoleSet::on_axis(h, &[-0.6, 0.4]).unwrap();
        let g = grid(h, &poles, 2.0);
        let bump = GeodesicBump::new(h.axis_point(0.1).unwrap(), 1.6, 1.0);
        let r = verify_theorem1(&poles, &bump, &g).unwrap();
        assert!(r.passed() && r.rhs_correction > 0.0);
        assert!(r.lhs >= r.rhs_pairwise);
        for &k0 in &[-1.0, -4.0] {
            let r = verify_theorem2(&poles, &bump, &g, Curvature::new(k0).unwrap()).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let rc = verify_remark_c(&poles, &bump, &g).unwrap();
        assert!(rc.exact.passed() && rc.bound.passed());
        assert!(rc.bound.rhs_correction <= rc.exact.rhs_correction);
    }

    #[test]
    fn correction_signs() {
        for &(c, sign) in &[(-1.0, 1.0), (0.0, 0.0), (1.0, -1.0)] {
            let s = space(3, c);
            let poles = PoleSet::on_axis(s, &[-0.4, 0.4]).unwrap();
            let g = grid(s, &poles, 1.2);
            let bump = GeodesicBump::new(s.base_point(), 1.0, 1.0);
            let k = correction_term(&poles, &bump, &g).unwrap();
            if sign == 0.0 {
                assert!(k.abs() < 1e-12);
            } else {
                assert!(k * sign > 0.0, "c={c} k={k}");
            }
        }
    }

    #[test]
    fn hemisphere_report() {
        use crate::geometry::EquatorCap;
        let hs = ModelSpace::hemisphere(3).unwrap();
        let poles = PoleSet::symmetric_hemisphere_pair(hs, 0.9).unwrap();
        let g = grid(hs, &poles, std::f64::consts::FRAC_PI_2);
        let cap = EquatorCap { power: 1.0, tilt: 0.2 };
        let r = verify_hemisphere(&poles, &cap, &g).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.config.beta.unwrap() - 0.9f64.acos()).abs() < 1e-12);
        let z = verify_hemisphere(&poles, &ZeroField, &g).unwrap();
        assert_eq!(z.lhs, 0.0);
        let bump = GeodesicBump::new(hs.base_point(), 1.8, 1.0);
        assert!(verify_hemisphere(&poles, &bump, &g).is_err());
    }
}
