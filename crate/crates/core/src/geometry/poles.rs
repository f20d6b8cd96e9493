use crate::error::{Error, Result};

use super::space::{ModelPoint, ModelSpace};

/// An ordered set of `m >= 2` distinct poles with cached pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    space: ModelSpace,
    poles: Vec<ModelPoint>,
    distances: Vec<f64>,
}

impl PoleSet {
    pub fn new(space: ModelSpace, poles: Vec<ModelPoint>) -> Result<Self> {
        if poles.len() < 2 {
            return Err(Error::InvalidPoleSet(format!(
                "{} pole(s) given, at least 2 required",
                poles.len()
            )));
        }
        for p in &poles {
            if *p.space() != space {
                return Err(Error::MismatchedSpaces);
            }
            space
                .check_domain(p)
                .map_err(|_| Error::InvalidPoleSet("pole outside the open hemisphere".into()))?;
        }
        let m = poles.len();
        let mut distances = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                let d = space.distance(&poles[i], &poles[j])?;
                if d <= 0.0 {
                    return Err(Error::InvalidPoleSet(format!("poles {i} and {j} coincide")));
                }
                distances[i * m + j] = d;
                distances[j * m + i] = d;
            }
        }
        let set = PoleSet {
            space,
            poles,
            distances,
        };
        if space.curvature().is_spherical() {
            set.check_convex()?;
        }
        Ok(set)
    }

    /// Poles placed on the axis through the base point at the given signed
    /// geodesic positions.
    pub fn on_axis(space: ModelSpace, positions: &[f64]) -> Result<Self> {
        let poles = positions
            .iter()
            .map(|&t| space.axis_point(t))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidPoleSet(e.to_string()))?;
        Self::new(space, poles)
    }

    /// The symmetric hemisphere pair `(±a, 0, …, 0, b)`, `a = √(1-b²)`,
    /// i.e. poles at angle `arccos b` from the north pole on either side.
    pub fn symmetric_hemisphere_pair(space: ModelSpace, b: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidPoleSet(format!("b = {b} not in (0, 1)")));
        }
        let beta = b.acos() / space.curvature().value().sqrt();
        Self::on_axis(space, &[beta, -beta])
    }

    /// For `c > 0` the poles must lie in a strictly convex set; a geodesic
    /// ball of radius below `π/(2√c)` around the normalized centroid is used
    /// as the witness.
    fn check_convex(&self) -> Result<()> {
        let dim = self.space.ambient_dim();
        let mut centroid = vec![0.0; dim];
        for p in &self.poles {
            centroid.iter_mut().zip(p.coords()).for_each(|(a, b)| *a += b);
        }
        let norm: f64 = centroid.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidPoleSet(
                "poles are not contained in a strictly convex set".into(),
            ));
        }
        let r = self.space.model_radius();
        let sphere = self.space.without_hemisphere();
        let centre = sphere.point(centroid.iter().map(|x| x * r / norm).collect())?;
        let limit = 0.5 * self.space.curvature().conjugate_radius();
        for p in &self.poles {
            let plain = sphere.point(p.coords().to_vec())?;
            if sphere.distance(&centre, &plain)? >= limit {
                return Err(Error::InvalidPoleSet(
                    "poles are not contained in a strictly convex set".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn poles(&self) -> &[ModelPoint] {
        &self.poles
    }

    pub fn get(&self, i: usize) -> &ModelPoint {
        &self.poles[i]
    }

    /// Cached `d_ij`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.poles.len() + j]
    }

    pub fn min_distance(&self) -> f64 {
        let m = self.len();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| self.distance(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    /// Unordered pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.len();
        (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
    }

    /// Largest distance from the base point to a pole.
    pub fn max_distance_from_base(&self) -> Result<f64> {
        let base = self.space.base_point();
        self.poles
            .iter()
            .map(|p| self.space.distance(&base, p))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    }
}

impl ModelSpace {
    pub(crate) fn without_hemisphere(&self) -> ModelSpace {
        ModelSpace::new(self.dim(), self.curvature()).expect("validated dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Curvature;

    #[test]
    fn cached_distances() {
        let e = ModelSpace::euclidean(3).unwrap();
        let p = PoleSet::on_axis(e, &[-1.0, 0.5, 2.0]).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p.distance(0, 1) - 1.5).abs() < 1e-15);
        assert!((p.distance(2, 0) - 3.0).abs() < 1e-15);
        assert!((p.min_distance() - 1.5).abs() < 1e-15);
        assert_eq!(p.pairs().count(), 3);
    }

    #[test]
    fn rejects_invalid_sets() {
        let e = ModelSpace::euclidean(3).unwrap();
        assert!(PoleSet::on_axis(e, &[1.0]).is_err());
        assert!(PoleSet::on_axis(e, &[1.0, 1.0]).is_err());
        let s = ModelSpace::new(3, Curvature::new(1.0).unwrap()).unwrap();
        assert!(PoleSet::on_axis(s, &[0.0, 2.1, -2.1]).is_err());
        assert!(PoleSet::on_axis(s, &[0.5, -0.5]).is_ok());
        let hs = ModelSpace::hemisphere(3).unwrap();
        assert!(PoleSet::on_axis(hs, &[1.7, 0.0]).is_err());
    }

    #[test]
    fn hemisphere_pair_geometry() {
        let hs = ModelSpace::hemisphere(3).unwrap();
        let p = PoleSet::symmetric_hemisphere_pair(hs, 0.8).unwrap();
        let c = p.get(0).coords();
        assert!((c[0] - 0.6).abs() < 1e-12 && (c[3] - 0.8).abs() < 1e-12);
        let c = p.get(1).coords();
        assert!((c[0] + 0.6).abs() < 1e-12);
        assert!((p.max_distance_from_base().unwrap() - 0.8f64.acos()).abs() < 1e-12);
        assert!((p.distance(0, 1) - 2.0 * 0.8f64.acos()).abs() < 1e-12);
    }
}
