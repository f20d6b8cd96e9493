//! Triangle and Laplacian comparison checks on the model spaces.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::Curvature;
use crate::error::{Error, Result};
use crate::geometry::{cosine_law_vertex_angle, ModelPoint, ModelSpace};
use crate::hardy::{bipolar_curved_from_distances, weight_pairwise_gradient};

/// Absolute tolerance of angle comparisons.
pub const ANGLE_TOL: f64 = 1e-9;

/// A geodesic triangle. `sides[k]` is opposite vertex `k` and `angles[k]`
/// is the interior angle at vertex `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTriangle {
    pub curvature: Curvature,
    pub vertices: Option<[ModelPoint; 3]>,
    pub sides: [f64; 3],
    pub angles: [f64; 3],
}

impl GeodesicTriangle {
    /// Triangle realized by three points; angles come from the distance
    /// gradients at each vertex.
    pub fn from_points(space: &ModelSpace, vertices: [ModelPoint; 3]) -> Result<Self> {
        let [a, b, c] = &vertices;
        let sides = [space.distance(b, c)?, space.distance(a, c)?, space.distance(a, b)?];
        check_sides(space.curvature(), &sides)?;
        let angles = [
            space.vertex_angle(a, b, c)?,
            space.vertex_angle(b, a, c)?,
            space.vertex_angle(c, a, b)?,
        ];
        Ok(GeodesicTriangle {
            curvature: space.curvature(),
            vertices: Some(vertices),
            sides,
            angles,
        })
    }

    /// Abstract triangle with the given side lengths in the model of
    /// curvature `c`; angles from the cosine law.
    pub fn from_sides(c: Curvature, sides: [f64; 3]) -> Result<Self> {
        check_sides(c, &sides)?;
        Ok(GeodesicTriangle {
            curvature: c,
            vertices: None,
            sides,
            angles: law_angles(c, &sides)?,
        })
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }
}

fn check_sides(c: Curvature, s: &[f64; 3]) -> Result<()> {
    if c.is_spherical() && s.iter().sum::<f64>() >= 2.0 * c.conjugate_radius() {
        return Err(Error::hypothesis(
            format!("perimeter {} >= 2π/√c", s.iter().sum::<f64>()),
            "geodesic triangles in a strictly convex set have perimeter < 2π/√k₀",
        ));
    }
    Ok(())
}

fn law_angles(c: Curvature, s: &[f64; 3]) -> Result<[f64; 3]> {
    Ok([
        cosine_law_vertex_angle(c, s[1], s[2], s[0])?,
        cosine_law_vertex_angle(c, s[0], s[2], s[1])?,
        cosine_law_vertex_angle(c, s[0], s[1], s[2])?,
    ])
}

/// The triangle with the same side lengths in the model of curvature
/// `c_target`, realized with vertex 0 at the base point of an `n`-dimensional
/// model and vertex 1 on the axis.
pub fn comparison_triangle(c_target: Curvature, triangle: &GeodesicTriangle, n: usize) -> Result<GeodesicTriangle> {
    check_sides(c_target, &triangle.sides)?;
    let angles = law_angles(c_target, &triangle.sides)?;
    let space = ModelSpace::new(n, c_target)?;
    let v0 = space.base_point();
    let v1 = space.polar_point(triangle.sides[2], 0.0)?;
    let v2 = space.polar_point(triangle.sides[1], angles[0])?;
    Ok(GeodesicTriangle {
        curvature: c_target,
        vertices: Some([v0, v1, v2]),
        sides: triangle.sides,
        angles,
    })
}

/// Outcome of one angle comparison at vertex 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToponogovOutcome {
    pub gamma_m: f64,
    pub gamma_m0: f64,
    /// All three comparison angles are at most the actual ones (up to tolerance).
    pub pass: bool,
    /// Smallest `γ_M - γ_M₀` over the three vertices.
    pub margin: f64,
}

/// Angles of the comparison triangle in curvature `k₀ <= c` never exceed
/// the actual angles.
pub fn toponogov_check(space: &ModelSpace, triangle: &GeodesicTriangle, k0: Curvature) -> Result<ToponogovOutcome> {
    if k0 > space.curvature() {
        return Err(Error::hypothesis(
            format!("comparison hypothesis violated: k0 = {} > c = {}", k0.value(), space.curvature().value()),
            "sectional curvature bounded below by k0",
        ));
    }
    let model = comparison_triangle(k0, triangle, space.dim())?;
    let margin = (0..3)
        .map(|k| triangle.angles[k] - model.angles[k])
        .fold(f64::INFINITY, f64::min);
    Ok(ToponogovOutcome {
        gamma_m: triangle.angles[0],
        gamma_m0: model.angles[0],
        pass: margin >= -ANGLE_TOL,
        margin,
    })
}

/// Which Laplace comparison is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    /// Curvature bounded above by `c_bound`: `Δd >= (n-1) ct_{c_bound}(d)`.
    Upper,
    /// Curvature bounded below by `c_bound`: `Δd <= (n-1) ct_{c_bound}(d)`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub pass: bool,
    pub points: usize,
    pub worst_margin: f64,
}

/// Assert the Laplace comparison between the model of curvature `c_space`
/// and the bound `c_bound` on the radii of `r_grid` inside both domains.
pub fn laplace_comparison_check(n: usize, c_space: Curvature, c_bound: Curvature, side: BoundSide, r_grid: &[f64]) -> Result<LaplaceCheck> {
    let hypothesis_ok = match side {
        BoundSide::Upper => c_space <= c_bound,
        BoundSide::Lower => c_space >= c_bound,
    };
    if !hypothesis_ok {
        return Err(Error::hypothesis(
            format!("curvature {} violates the {:?} bound {}", c_space.value(), side, c_bound.value()),
            "Laplace comparison requires the curvature bound on the manifold",
        ));
    }
    let space = ModelSpace::new(n, c_space)?;
    let limit = c_space.conjugate_radius().min(c_bound.conjugate_radius());
    let mut worst = f64::INFINITY;
    let mut points = 0;
    for &r in r_grid.iter().filter(|&&r| r > 0.0 && r < limit) {
        let actual = space.laplacian_distance(r)?;
        let bound = (n as f64 - 1.0) * c_bound.ct(r);
        let margin = match side {
            BoundSide::Upper => actual - bound,
            BoundSide::Lower => bound - actual,
        };
        let scale = 1.0 + actual.abs();
        worst = worst.min(margin / scale);
        points += 1;
    }
    Ok(LaplaceCheck {
        pass: worst >= -1e-12,
        points,
        worst_margin: worst,
    })
}

/// Summary of a randomized check suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub name: String,
    pub c: f64,
    pub k0: f64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: f64,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Radius of the sampling ball: `min(1, 0.4π/√c)`.
pub fn sampling_radius(space: &ModelSpace) -> f64 {
    let c = space.curvature().value();
    if c > 0.0 {
        (0.4 * PI / c.sqrt()).min(1.0)
    } else {
        1.0
    }
}

/// Independent per-sample generator derived from the master seed.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Random triangles in the sampling ball, compared against curvature `k₀`.
/// Near-degenerate triangles (smallest angle below `1e-4`) are resampled.
pub fn toponogov_suite(space: &ModelSpace, k0: Curvature, samples: usize, seed: u64) -> Result<SuiteSummary> {
    if k0 > space.curvature() {
        return Err(Error::hypothesis(
            format!("comparison hypothesis violated: k0 = {} > c = {}", k0.value(), space.curvature().value()),
            "sectional curvature bounded below by k0",
        ));
    }
    let radius = sampling_radius(space);
    let centre = space.base_point();
    let margins: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            loop {
                let v = [
                    space.random_point(&mut rng, &centre, radius),
                    space.random_point(&mut rng, &centre, radius),
                    space.random_point(&mut rng, &centre, radius),
                ];
                let Ok(tri) = GeodesicTriangle::from_points(space, v) else { continue };
                if tri.angles.iter().any(|&a| a < 1e-4) {
                    continue;
                }
                if let Ok(out) = toponogov_check(space, &tri, k0) {
                    return out.margin;
                }
            }
        })
        .collect();
    Ok(summarize("toponogov", space, k0, &margins, -ANGLE_TOL))
}

/// Pointwise `|∇d_i/d_i - ∇d_j/d_j|² >= curved bipolar weight(k₀)` at one
/// sample; returns the margin `pairwise - curved`.
pub fn cosine_chain_margin(space: &ModelSpace, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint, k0: Curvature) -> Result<f64> {
    let wp = weight_pairwise_gradient(space, x, pole_i, pole_j)?;
    let di = space.distance(x, pole_i)?;
    let dj = space.distance(x, pole_j)?;
    let dij = space.distance(pole_i, pole_j)?;
    let wc = bipolar_curved_from_distances(k0, di, dj, dij)?;
    Ok(wp - wc)
}

/// Cosine chain at the given samples for one pole pair.
pub fn cosine_chain_check(
    space: &ModelSpace,
    pole_i: &ModelPoint,
    pole_j: &ModelPoint,
    samples: &[ModelPoint],
    k0: Curvature,
) -> Result<SuiteSummary> {
    if k0 > space.curvature() {
        return Err(Error::hypothesis(
            format!("comparison hypothesis violated: k0 = {} > c = {}", k0.value(), space.curvature().value()),
            "sectional curvature bounded below by k0",
        ));
    }
    let margins = samples
        .par_iter()
        .map(|x| cosine_chain_margin(space, x, pole_i, pole_j, k0))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("cosine-chain", space, k0, &margins, -1e-10))
}

/// Cosine chain with random poles and points in the sampling ball.
pub fn cosine_chain_suite(space: &ModelSpace, k0: Curvature, samples: usize, seed: u64) -> Result<SuiteSummary> {
    if k0 > space.curvature() {
        return Err(Error::hypothesis(
            format!("comparison hypothesis violated: k0 = {} > c = {}", k0.value(), space.curvature().value()),
            "sectional curvature bounded below by k0",
        ));
    }
    let radius = sampling_radius(space);
    let centre = space.base_point();
    let margins: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            loop {
                let a = space.random_point(&mut rng, &centre, radius);
                let b = space.random_point(&mut rng, &centre, radius);
                let x = space.random_point(&mut rng, &centre, radius);
                if let Ok(m) = cosine_chain_margin(space, &x, &a, &b, k0) {
                    return m;
                }
            }
        })
        .collect();
    Ok(summarize("cosine-chain", space, k0, &margins, -1e-10))
}

fn summarize(name: &str, space: &ModelSpace, k0: Curvature, margins: &[f64], threshold: f64) -> SuiteSummary {
    let failed = margins.iter().filter(|&&m| m < threshold).count();
    SuiteSummary {
        name: name.into(),
        c: space.curvature().value(),
        k0: k0.value(),
        samples: margins.len(),
        passed: margins.len() - failed,
        failed,
        worst_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
    }
}
