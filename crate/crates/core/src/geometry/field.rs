use super::space::{ModelPoint, ModelSpace};

/// A test function given in closed form together with its Riemannian
/// gradient (an embedded tangent vector at the evaluation point).
pub trait TestField: Send + Sync {
    fn value(&self, x: &ModelPoint) -> f64;

    fn gradient(&self, x: &ModelPoint) -> Vec<f64>;

    /// `|∇u|²` in the model metric.
    fn gradient_norm_sq(&self, x: &ModelPoint) -> f64 {
        let g = self.gradient(x);
        x.space().inner(&g, &g).max(0.0)
    }
}

impl<T: TestField + ?Sized> TestField for Box<T> {
    fn value(&self, x: &ModelPoint) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        (**self).gradient(x)
    }
}

impl<T: TestField + ?Sized> TestField for &T {
    fn value(&self, x: &ModelPoint) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        (**self).gradient(x)
    }
}

/// `u ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl TestField for ZeroField {
    fn value(&self, _: &ModelPoint) -> f64 {
        0.0
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        vec![0.0; x.coords().len()]
    }
}

/// Smooth bump `A exp(1 - 1/(1 - (d/ρ)²))` of geodesic radius `ρ`.
#[derive(Debug, Clone)]
pub struct GeodesicBump {
    pub center: ModelPoint,
    pub radius: f64,
    pub amplitude: f64,
}

impl GeodesicBump {
    pub fn new(center: ModelPoint, radius: f64, amplitude: f64) -> Self {
        GeodesicBump {
            center,
            radius,
            amplitude,
        }
    }

    fn profile(&self, d: f64) -> (f64, f64) {
        let t = d / self.radius;
        if t >= 1.0 {
            return (0.0, 0.0);
        }
        let one = 1.0 - t * t;
        let v = self.amplitude * (1.0 - 1.0 / one).exp();
        (v, -v * 2.0 * t / (one * one) / self.radius)
    }
}

impl TestField for GeodesicBump {
    fn value(&self, x: &ModelPoint) -> f64 {
        let d = x.space().distance(x, &self.center).unwrap_or(f64::INFINITY);
        self.profile(d).0
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let space: &ModelSpace = x.space();
        match space.distance_and_gradient(x, &self.center) {
            Ok((d, g)) => {
                let dv = self.profile(d).1;
                g.into_iter().map(|gi| dv * gi).collect()
            }
            Err(_) => vec![0.0; x.coords().len()],
        }
    }
}

/// `(√c y_{n+1})^q (1 + τ √c y_1)` on a hemisphere: positive inside and
/// vanishing to order `q` on the equator.
#[derive(Debug, Clone, Copy)]
pub struct EquatorCap {
    pub power: f64,
    pub tilt: f64,
}

impl TestField for EquatorCap {
    fn value(&self, x: &ModelPoint) -> f64 {
        let (h, y1) = self.heights(x);
        h.max(0.0).powf(self.power) * (1.0 + self.tilt * y1)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let space = x.space();
        let k = space.curvature().value().sqrt();
        let (h, y1) = self.heights(x);
        let h = h.max(0.0);
        let n = space.dim();
        let mut partials = vec![0.0; x.coords().len()];
        partials[n] = k * self.power * h.powf(self.power - 1.0) * (1.0 + self.tilt * y1);
        partials[0] = k * self.tilt * h.powf(self.power);
        space.ambient_gradient(x, &partials)
    }
}

impl EquatorCap {
    fn heights(&self, x: &ModelPoint) -> (f64, f64) {
        let k = x.space().curvature().value().sqrt();
        let n = x.space().dim();
        (k * x.coords()[n], k * x.coords()[0])
    }
}

/// `s · u`.
#[derive(Debug, Clone)]
pub struct ScaledField<F> {
    pub scale: f64,
    pub field: F,
}

impl<F: TestField> TestField for ScaledField<F> {
    fn value(&self, x: &ModelPoint) -> f64 {
        self.scale * self.field.value(x)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        self.field.gradient(x).into_iter().map(|g| self.scale * g).collect()
    }
}

/// Pointwise product `u · v`.
impl<A: TestField, B: TestField> TestField for (A, B) {
    fn value(&self, x: &ModelPoint) -> f64 {
        self.0.value(x) * self.1.value(x)
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let (a, b) = (self.0.value(x), self.1.value(x));
        let ga = self.0.gradient(x);
        let gb = self.1.gradient(x);
        ga.iter().zip(&gb).map(|(p, q)| b * p + a * q).collect()
    }
}

/// Sum of several fields.
pub struct FieldSum(pub Vec<Box<dyn TestField>>);

impl TestField for FieldSum {
    fn value(&self, x: &ModelPoint) -> f64 {
        self.0.iter().map(|f| f.value(x)).sum()
    }

    fn gradient(&self, x: &ModelPoint) -> Vec<f64> {
        let mut g = vec![0.0; x.coords().len()];
        for f in &self.0 {
            g.iter_mut().zip(f.gradient(x)).for_each(|(a, b)| *a += b);
        }
        g
    }
}
