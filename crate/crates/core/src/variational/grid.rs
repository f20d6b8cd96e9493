//! Axisymmetric finite-volume discretization in geodesic polar coordinates.

use std::io::Write;

use serde::Serialize;

use crate::curvature::{radial_moment, unit_sphere_area, Curvature};
use crate::error::{Error, Result};
use crate::geometry::{ModelPoint, ModelSpace};

use super::linalg::BandMatrix;

/// Cell-centred grid on `[0, R] × [0, π]` with a zero Dirichlet ring at
/// `r = R`. Unknown `(i, j)` lives at `((i+½)h_r, (j+½)h_θ)` and has index
/// `i * n_theta + j`.
#[derive(Debug, Clone)]
pub struct FvGrid {
    space: ModelSpace,
    radius: f64,
    n_r: usize,
    n_theta: usize,
    r: Vec<f64>,
    theta: Vec<f64>,
    volume: Vec<f64>,
    points: Vec<ModelPoint>,
    stiffness: BandMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub n_r: usize,
    pub n_theta: usize,
    pub radius: f64,
}

impl FvGrid {
    pub fn new(space: ModelSpace, radius: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 || n_theta < 4 {
            return Err(Error::GridTooCoarse(format!("{n_r}×{n_theta} cells")));
        }
        let c = space.curvature();
        if !(radius > 0.0) || (c.is_spherical() && radius > 0.5 * c.conjugate_radius() * (1.0 + 1e-12)) {
            return Err(Error::InvalidConfig(format!("truncation radius {radius} out of range")));
        }
        let n = space.dim();
        let hr = radius / n_r as f64;
        let ht = std::f64::consts::PI / n_theta as f64;
        let r: Vec<f64> = (0..n_r).map(|i| (i as f64 + 0.5) * hr).collect();
        let theta: Vec<f64> = (0..n_theta).map(|j| (j as f64 + 0.5) * ht).collect();
        let sphere = unit_sphere_area(n - 2);
        let sine = Curvature::new(1.0)?;
        let ang: Vec<f64> = (0..n_theta)
            .map(|j| radial_moment(sine, n - 2, j as f64 * ht, (j + 1) as f64 * ht))
            .collect();
        let rad: Vec<f64> = (0..n_r)
            .map(|i| radial_moment(c, n - 1, i as f64 * hr, (i + 1) as f64 * hr))
            .collect();
        let rad_low: Vec<f64> = (0..n_r)
            .map(|i| radial_moment(c, n - 3, i as f64 * hr, (i + 1) as f64 * hr))
            .collect();

        let nt = n_theta;
        let len = n_r * nt;
        let mut volume = vec![0.0; len];
        let mut a = BandMatrix::zeros(len, nt);
        for i in 0..n_r {
            for j in 0..nt {
                let k = i * nt + j;
                volume[k] = sphere * rad[i] * ang[j];
                let rf = (i + 1) as f64 * hr;
                let face = sphere * c.sn(rf).powi(n as i32 - 1) * ang[j];
                if i + 1 < n_r {
                    let w = face / hr;
                    a.add(k, k, w);
                    a.add(k + nt, k + nt, w);
                    a.add(k + nt, k, -w);
                } else {
                    a.add(k, k, face / (0.5 * hr));
                }
                if j + 1 < nt {
                    let tf = (j + 1) as f64 * ht;
                    let w = sphere * tf.sin().powi(n as i32 - 2) * rad_low[i] / ht;
                    a.add(k, k, w);
                    a.add(k + 1, k + 1, w);
                    a.add(k + 1, k, -w);
                }
            }
        }
        let points = r
            .iter()
            .flat_map(|&ri| theta.iter().map(move |&tj| (ri, tj)))
            .map(|(ri, tj)| space.polar_point(ri, tj))
            .collect::<Result<Vec<_>>>()?;
        Ok(FvGrid {
            space,
            radius,
            n_r,
            n_theta,
            r,
            theta,
            volume,
            points,
            stiffness: a,
        })
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            n_r: self.n_r,
            n_theta: self.n_theta,
            radius: self.radius,
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// `(r, θ)` of unknown `k`.
    pub fn coordinates(&self, k: usize) -> (f64, f64) {
        (self.r[k / self.n_theta], self.theta[k % self.n_theta])
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }

    pub fn points(&self) -> &[ModelPoint] {
        &self.points
    }

    /// Discrete Dirichlet form: `uᵀ A u ≈ ∫|∇u|²`.
    pub fn stiffness(&self) -> &BandMatrix {
        &self.stiffness
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.volume).map(|(v, m)| v * m).sum()
    }

    pub fn sample<F: Fn(&ModelPoint) -> f64 + Sync + Send>(&self, f: F) -> Vec<f64> {
        use rayon::prelude::*;
        self.points.par_iter().map(f).collect()
    }

    /// Cell values followed by the Dirichlet ring, which is zero.
    pub fn with_boundary(&self, values: &[f64]) -> Vec<f64> {
        let mut out = values.to_vec();
        out.extend(std::iter::repeat_n(0.0, self.n_theta));
        out
    }

    /// Number of nodes on the Dirichlet ring.
    pub fn boundary_len(&self) -> usize {
        self.n_theta
    }

    /// CSV dump `r,theta,weight,value` of cells and the Dirichlet ring
    /// (weight 0).
    pub fn write_csv<W: Write>(&self, values: &[f64], mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,theta,weight,value")?;
        for k in 0..self.len() {
            let (r, t) = self.coordinates(k);
            writeln!(out, "{r:.12e},{t:.12e},{:.12e},{:.12e}", self.volume[k], values[k])?;
        }
        for (j, t) in self.theta.iter().enumerate() {
            let v = values.get(self.len() + j).copied().unwrap_or(0.0);
            writeln!(out, "{:.12e},{t:.12e},0,{v:.12e}", self.radius)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::geodesic_annulus_volume;

    #[test]
    fn cell_volumes_are_exact() {
        for &c in &[-1.0, 0.0, 1.0] {
            let cv = Curvature::new(c).unwrap();
            let s = ModelSpace::new(3, cv).unwrap();
            let g = FvGrid::new(s, 1.2, 24, 12).unwrap();
            let total: f64 = g.volumes().iter().sum();
            let exact = geodesic_annulus_volume(3, cv, 0.0, 1.2);
            assert!((total - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn stiffness_energy_of_smooth_field() {
        // u = cos(π r / 2R) has ∫|∇u|² = (π/2R)² ∫ sin²(π r/2R) dV in R³
        let s = ModelSpace::euclidean(3).unwrap();
        let big_r = 2.0;
        let k = std::f64::consts::PI / (2.0 * big_r);
        let exact = {
            let rule = crate::geometry::quadrature::PanelRule::graded(0.0, big_r, &[], &[], 400, 8, 0.0);
            4.0 * std::f64::consts::PI * rule.integrate(|r| k * k * (k * r).sin().powi(2) * r * r)
        };
        let mut errs = Vec::new();
        for &nr in &[20usize, 40, 80] {
            let g = FvGrid::new(s, big_r, nr, 8).unwrap();
            let u: Vec<f64> = (0..g.len()).map(|i| (k * g.coordinates(i).0).cos()).collect();
            errs.push((g.stiffness().quadratic_form(&u) - exact).abs());
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn stiffness_annihilates_nothing() {
        let s = ModelSpace::new(3, Curvature::new(-1.0).unwrap()).unwrap();
        let g = FvGrid::new(s, 3.0, 12, 6).unwrap();
        assert!(g.stiffness().cholesky().is_ok());
        let ones = vec![1.0; g.len()];
        assert!(g.stiffness().quadratic_form(&ones) > 0.0);
    }

    #[test]
    fn csv_layout() {
        let s = ModelSpace::euclidean(3).unwrap();
        let g = FvGrid::new(s, 1.0, 4, 4).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&g.with_boundary(&vec![1.0; g.len()]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 16 + 4);
        assert!(text.lines().last().unwrap().ends_with(",0,0.000000000000e0"));
    }
}
