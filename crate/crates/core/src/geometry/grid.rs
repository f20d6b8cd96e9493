use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{geodesic_annulus_volume, unit_sphere_area};
use crate::error::{Error, Result};

use super::field::TestField;
use super::poles::PoleSet;
use super::quadrature::PanelRule;
use super::space::{ModelPoint, ModelSpace};

/// Gauss–Legendre order used on every panel of the standard grids.
pub const PANEL_ORDER: usize = 8;

/// Relative volume error above which a grid is rejected.
pub const VOLUME_TOLERANCE: f64 = 1e-3;

/// Geodesic ball or annulus about the grid base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl Region {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Region::Ball { radius } => (0.0, radius),
            Region::Annulus { inner, outer } => (inner, outer),
        }
    }
}

/// Node counts of the ungraded radial and angular rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridResolution {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GridResolution {
    fn default() -> Self {
        GridResolution {
            n_r: 160,
            n_theta: 80,
        }
    }
}

impl GridResolution {
    pub fn halved(self) -> Self {
        GridResolution {
            n_r: (self.n_r / 2).max(PANEL_ORDER),
            n_theta: (self.n_theta / 2).max(PANEL_ORDER),
        }
    }
}

/// One tensor-product sample point.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub r: f64,
    pub theta: f64,
    /// Quadrature weight including the volume density; `0` when excluded.
    pub weight: f64,
    /// False for points inside an exclusion ball.
    pub active: bool,
    pub point: ModelPoint,
}

#[derive(Debug, Clone)]
struct Recipe {
    region: Region,
    resolution: GridResolution,
    delta: f64,
    poles: PoleSet,
}

/// Axisymmetric quadrature grid in geodesic polar coordinates `(r, θ)`.
///
/// Points are `exp_base(r (cos θ e_0 + sin θ e_1))`; with `(e_0, e_1)` fixed
/// the grid covers one meridian half-plane and the rotation about the axis
/// `e_0` is integrated analytically, which is exact for integrands that are
/// invariant under rotations fixing the axis. Weights are
/// `|S^{n-2}| s_c(r)^{n-1} sin^{n-2}θ w_r w_θ`.
#[derive(Debug, Clone)]
pub struct AxiGrid {
    space: ModelSpace,
    base: ModelPoint,
    axis: Vec<f64>,
    r_rule: PanelRule,
    theta_rule: PanelRule,
    points: Vec<GridPoint>,
    exclusion: Vec<(ModelPoint, f64)>,
    r_bounds: (f64, f64),
    volume_rel_error: f64,
    recipe: Option<Recipe>,
}

impl AxiGrid {
    /// Standard grid about the base point of `space`, with the pole axis as
    /// `θ = 0`. Radial panels break at every pole radius and both rules are
    /// geometrically graded toward the poles. `delta` defaults to
    /// `1e-3 · min d_ij`.
    pub fn build(
        space: ModelSpace,
        poles: &PoleSet,
        region: Region,
        resolution: GridResolution,
        delta: Option<f64>,
    ) -> Result<Self> {
        if *poles.space() != space {
            return Err(Error::MismatchedSpaces);
        }
        let delta = delta.unwrap_or(1e-3 * poles.min_distance());
        if !(delta > 0.0) {
            return Err(Error::InvalidConfig(format!("exclusion radius {delta} must be positive")));
        }
        let (r0, r1) = region.bounds();
        check_region(&space, r0, r1)?;
        let base = space.base_point();
        let e0 = space.base_direction(0);
        let e1 = space.base_direction(1);

        let mut r_sing = Vec::new();
        let mut t_sing = Vec::new();
        let mut t_floor = f64::INFINITY;
        for p in poles.poles() {
            let (r, th) = polar_of(&space, &base, &e0, p)?;
            r_sing.push(r);
            if r > 0.0 {
                t_sing.push(th);
                t_floor = t_floor.min(delta / (4.0 * r));
            }
        }
        let r_rule = PanelRule::graded(r0, r1, &[], &r_sing, resolution.n_r, PANEL_ORDER, delta / 4.0);
        let theta_rule = PanelRule::graded(
            0.0,
            PI,
            &[],
            &t_sing,
            resolution.n_theta,
            PANEL_ORDER,
            t_floor.min(0.25),
        );
        let exclusion = poles.poles().iter().map(|p| (p.clone(), delta)).collect();
        let mut grid = Self::with_frame(space, base, e0, e1, r_rule, theta_rule, exclusion)?;
        grid.recipe = Some(Recipe {
            region,
            resolution,
            delta,
            poles: poles.clone(),
        });
        grid.check_volume()?;
        Ok(grid)
    }

    /// Grid in an arbitrary frame `(base, e_0, e_1)` with caller supplied
    /// rules. `exclusion` lists balls whose points get zero weight.
    pub fn with_frame(
        space: ModelSpace,
        base: ModelPoint,
        e0: Vec<f64>,
        e1: Vec<f64>,
        r_rule: PanelRule,
        theta_rule: PanelRule,
        exclusion: Vec<(ModelPoint, f64)>,
    ) -> Result<Self> {
        let r_bounds = (r_rule.edges[0], *r_rule.edges.last().expect("non-empty rule"));
        check_region(&space, r_bounds.0, r_bounds.1)?;
        let n = space.dim();
        let c = space.curvature();
        let area = unit_sphere_area(n - 2);
        let sin_pow: Vec<f64> = theta_rule
            .nodes
            .iter()
            .zip(&theta_rule.weights)
            .map(|(&t, &w)| w * t.sin().powi(n as i32 - 2))
            .collect();
        let points: Vec<GridPoint> = (0..r_rule.len())
            .into_par_iter()
            .flat_map_iter(|ir| {
                let r = r_rule.nodes[ir];
                let wr = area * r_rule.weights[ir] * c.sn(r).powi(n as i32 - 1);
                let (space, base, e0, e1, exclusion) = (&space, &base, &e0, &e1, &exclusion);
                let theta_rule = &theta_rule;
                let sin_pow = &sin_pow;
                (0..theta_rule.len()).map(move |it| {
                    let th = theta_rule.nodes[it];
                    let (ct, st) = (th.cos(), th.sin());
                    let v: Vec<f64> = e0.iter().zip(e1).map(|(a, b)| r * (ct * a + st * b)).collect();
                    let point = space.exp(base, &v).expect("frame vectors are tangent");
                    let active = exclusion
                        .iter()
                        .all(|(p, d)| space.distance(&point, p).map(|dist| dist >= *d).unwrap_or(false));
                    GridPoint {
                        r,
                        theta: th,
                        weight: if active { wr * sin_pow[it] } else { 0.0 },
                        active,
                        point,
                    }
                })
            })
            .collect();
        let mut grid = AxiGrid {
            space,
            base,
            axis: e0,
            r_rule,
            theta_rule,
            points,
            exclusion,
            r_bounds,
            volume_rel_error: 0.0,
            recipe: None,
        };
        grid.volume_rel_error = grid.measure_volume_error();
        Ok(grid)
    }

    fn measure_volume_error(&self) -> f64 {
        let n = self.space.dim();
        let c = self.space.curvature();
        let area = unit_sphere_area(n - 2);
        let mut total = 0.0;
        for (ir, (&r, &wr)) in self.r_rule.nodes.iter().zip(&self.r_rule.weights).enumerate() {
            let _ = ir;
            let radial = wr * c.sn(r).powi(n as i32 - 1);
            let angular: f64 = self
                .theta_rule
                .nodes
                .iter()
                .zip(&self.theta_rule.weights)
                .map(|(&t, &w)| w * t.sin().powi(n as i32 - 2))
                .sum();
            total += area * radial * angular;
        }
        let exact = geodesic_annulus_volume(n, c, self.r_bounds.0, self.r_bounds.1);
        ((total - exact) / exact).abs()
    }

    fn check_volume(&self) -> Result<()> {
        if self.volume_rel_error > VOLUME_TOLERANCE {
            Err(Error::GridTooCoarse(format!(
                "volume self-test relative error {:.3e} exceeds {:.0e}",
                self.volume_rel_error, VOLUME_TOLERANCE
            )))
        } else {
            Ok(())
        }
    }

    /// The same grid at half the resolution (standard grids only).
    pub fn coarsened(&self) -> Option<Result<AxiGrid>> {
        let rec = self.recipe.as_ref()?;
        if rec.resolution.halved() == rec.resolution {
            return None;
        }
        Some(AxiGrid::build(
            self.space,
            &rec.poles,
            rec.region,
            rec.resolution.halved(),
            Some(rec.delta),
        ))
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn base(&self) -> &ModelPoint {
        &self.base
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radial_rule(&self) -> &PanelRule {
        &self.r_rule
    }

    pub fn angular_rule(&self) -> &PanelRule {
        &self.theta_rule
    }

    pub fn radial_bounds(&self) -> (f64, f64) {
        self.r_bounds
    }

    pub fn exclusion_balls(&self) -> &[(ModelPoint, f64)] {
        &self.exclusion
    }

    /// Relative error of the weight sum against the exact region volume.
    pub fn volume_rel_error(&self) -> f64 {
        self.volume_rel_error
    }

    pub fn resolution(&self) -> Option<GridResolution> {
        self.recipe.as_ref().map(|r| r.resolution)
    }

    /// Sum of active weights.
    pub fn volume(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// `Σ w f(point)` over active points, evaluated in parallel.
    pub fn integrate_with<F>(&self, f: F) -> f64
    where
        F: Fn(&GridPoint) -> f64 + Sync,
    {
        self.points
            .par_iter()
            .filter(|p| p.active)
            .map(|p| p.weight * f(p))
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    }

    /// Flat index of the tensor point `(ir, it)`.
    #[inline]
    pub fn index(&self, ir: usize, it: usize) -> usize {
        ir * self.theta_rule.len() + it
    }
}

fn check_region(space: &ModelSpace, r0: f64, r1: f64) -> Result<()> {
    if !(r0 >= 0.0 && r1 > r0 && r1.is_finite()) {
        return Err(Error::InvalidConfig(format!("radial range [{r0}, {r1}] is invalid")));
    }
    let limit = if space.is_hemisphere() {
        0.5 * space.curvature().conjugate_radius()
    } else {
        space.curvature().conjugate_radius()
    };
    if r1 > limit * (1.0 + 1e-12) || (!space.is_hemisphere() && r1 >= limit) {
        return Err(Error::InvalidConfig(format!(
            "region radius {r1} leaves the model domain (limit {limit})"
        )));
    }
    Ok(())
}

/// Polar coordinates of `p` in the frame; errors when `p` is off the axis.
fn polar_of(space: &ModelSpace, base: &ModelPoint, e0: &[f64], p: &ModelPoint) -> Result<(f64, f64)> {
    let r = space.distance(base, p)?;
    if r < 1e-14 {
        return Ok((0.0, 0.0));
    }
    let v = space.log_map(base, p)?;
    let along = space.inner(&v, e0);
    let off: Vec<f64> = v.iter().zip(e0).map(|(a, b)| a - along * b).collect();
    if space.norm(&off) > 1e-9 * r {
        return Err(Error::InvalidPoleSet(
            "poles must lie on a common axis through the grid origin".into(),
        ));
    }
    Ok((r, if along > 0.0 { 0.0 } else { PI }))
}

/// Samples of a scalar function at every tensor point of a grid.
#[derive(Debug, Clone)]
pub struct ScalarField<'g> {
    grid: &'g AxiGrid,
    values: Vec<f64>,
}

/// Polar derivatives of a sampled field and `|∇u|²` from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSample {
    pub du_dr: f64,
    pub du_dtheta: f64,
    pub norm_sq: f64,
}

impl<'g> ScalarField<'g> {
    pub fn from_values(grid: &'g AxiGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::FieldNotAdmissible(format!("non-finite sample {v}")));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn sample<F: TestField + ?Sized>(grid: &'g AxiGrid, field: &F) -> Result<Self> {
        let values = grid.points.par_iter().map(|p| field.value(&p.point)).collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: &'g AxiGrid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &'g AxiGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ u dv` over the active points.
    pub fn integrate(&self) -> f64 {
        self.grid
            .points
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p.weight * v)
            .sum()
    }

    /// True when the field vanishes on the outermost `rings` radial rings.
    pub fn vanishes_on_outer_rings(&self, rings: usize) -> bool {
        let nt = self.grid.theta_rule.len();
        let nr = self.grid.r_rule.len();
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
        (nr.saturating_sub(rings)..nr).all(|ir| (0..nt).all(|it| self.values[ir * nt + it].abs() <= tol))
    }

    /// Polar derivatives by differentiating the per-panel interpolants.
    pub fn gradient_field(&self) -> Vec<GradientSample> {
        let g = self.grid;
        let nr = g.r_rule.len();
        let nt = g.theta_rule.len();
        let mut du_dr = vec![0.0; self.values.len()];
        let mut du_dt = vec![0.0; self.values.len()];
        let mut column = vec![0.0; nr];
        for it in 0..nt {
            for ir in 0..nr {
                column[ir] = self.values[ir * nt + it];
            }
            for (ir, d) in g.r_rule.differentiate(&column).into_iter().enumerate() {
                du_dr[ir * nt + it] = d;
            }
        }
        for ir in 0..nr {
            let row = &self.values[ir * nt..(ir + 1) * nt];
            du_dt[ir * nt..(ir + 1) * nt].copy_from_slice(&g.theta_rule.differentiate(row));
        }
        let c = g.space.curvature();
        (0..self.values.len())
            .map(|k| {
                let s = c.sn(g.points[k].r);
                let a = du_dt[k] / s;
                GradientSample {
                    du_dr: du_dr[k],
                    du_dtheta: du_dt[k],
                    norm_sq: du_dr[k] * du_dr[k] + a * a,
                }
            })
            .collect()
    }

    /// CSV snapshot with header `r,theta,weight,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,theta,weight,value")?;
        for (p, v) in self.grid.points.iter().zip(&self.values) {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", p.r, p.theta, p.weight, v)?;
        }
        Ok(())
    }
}
