//! Experiment spec files: one experiment per TOML document.

use std::path::{Path, PathBuf};

use multipolar_hardy::sharpness::SharpnessResolution;
use multipolar_hardy::variational::{BumpFamily, HemisphereConfig, PmConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyThm1,
    VerifyThm2,
    VerifyHemisphere,
    VerifyRemark,
    SweepSharpness,
    CheckComparison,
    CheckIdentity,
    SolvePm,
    SolveHemisphere,
    EstimateMu0,
    RayleighProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyThm1 => "verify-thm1",
            Command::VerifyThm2 => "verify-thm2",
            Command::VerifyHemisphere => "verify-hemisphere",
            Command::VerifyRemark => "verify-remark",
            Command::SweepSharpness => "sweep-sharpness",
            Command::CheckComparison => "check-comparison",
            Command::CheckIdentity => "check-identity",
            Command::SolvePm => "solve-pm",
            Command::SolveHemisphere => "solve-hemisphere",
            Command::EstimateMu0 => "estimate-mu0",
            Command::RayleighProbe => "rayleigh-probe",
        }
    }

    fn randomized(self) -> bool {
        matches!(self, Command::CheckComparison | Command::CheckIdentity | Command::SolvePm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub n: usize,
    pub c: f64,
    #[serde(default)]
    pub hemisphere: bool,
}

/// Either signed axis positions or the symmetric hemisphere pair
/// `(±√(1-b²), 0, …, 0, b)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSpec {
    pub axis: Option<Vec<f64>>,
    pub hemisphere_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    /// Smooth bump about an axis point.
    Bump {
        #[serde(default)]
        center: f64,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `h^power (1 + tilt·y₁)` on the hemisphere, `h` the height.
    EquatorCap {
        power: f64,
        #[serde(default)]
        tilt: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    /// Outer radius about the base point; defaults to the field support.
    pub radius: Option<f64>,
    /// Inner radius for an annulus.
    pub inner: Option<f64>,
    /// Pole exclusion radius.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub panels_per_decade: Option<usize>,
    pub order: Option<usize>,
    pub n_theta: Option<usize>,
}

impl SweepSpec {
    pub fn resolution(&self) -> SharpnessResolution {
        let d = SharpnessResolution::default();
        SharpnessResolution {
            panels_per_decade: self.panels_per_decade.unwrap_or(d.panels_per_decade),
            order: self.order.unwrap_or(d.order),
            n_theta: self.n_theta.unwrap_or(d.n_theta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    pub budget: usize,
    pub cutoff: f64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { budget: 60, cutoff: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComparisonSpec {
    pub samples: usize,
    /// Radial nodes of the Laplacian comparison grid.
    pub laplace_points: usize,
}

impl Default for ComparisonSpec {
    fn default() -> Self {
        ComparisonSpec {
            samples: 10_000,
            laplace_points: 200,
        }
    }
}

/// Assertions beyond the default one of each command.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertSpec {
    /// Lower bound on `relative_margin` of inequality reports.
    pub min_relative_margin: Option<f64>,
    /// Bound on `|ratio - target| / target` at the smallest `ε`.
    pub max_relative_error: Option<f64>,
    /// Require the sweep ratios to decrease strictly.
    pub decreasing: Option<bool>,
    /// Bound on solver residual norms.
    pub max_residual: Option<f64>,
    /// Required number of nontrivial solutions.
    pub min_nontrivial: Option<usize>,
    /// Required number of zero solutions.
    pub min_zero: Option<usize>,
    /// Lower bound on the Rayleigh probe quotient.
    pub min_quotient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: Command,
    pub seed: Option<u64>,
    /// Report directory, relative to the spec file.
    pub output: Option<PathBuf>,
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub poles: PoleSpec,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Comparison curvature of the second inequality and the comparison suites.
    pub k0: Option<f64>,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub probe: ProbeSpec,
    #[serde(default)]
    pub comparison: ComparisonSpec,
    pub pm: Option<PmConfig>,
    pub mu0: Option<BumpFamily>,
    pub hemisphere_solve: Option<HemisphereConfig>,
    #[serde(default, rename = "assert")]
    pub assertions: AssertSpec,
}

/// Command-line values that replace spec fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub k0: Option<f64>,
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Spec(format!("spec parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read spec {}: {e}", path.display())))?;
        let mut spec = Self::parse(&text)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        spec.output = Some(dir.join(spec.output.clone().unwrap_or_else(|| PathBuf::from("."))));
        Ok(spec)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if let Some(v) = o.n_r {
            self.grid.n_r = Some(v);
            if let Some(pm) = &mut self.pm {
                pm.n_r = v;
            }
            if let Some(h) = &mut self.hemisphere_solve {
                h.n_r = v;
            }
        }
        if let Some(v) = o.n_theta {
            self.grid.n_theta = Some(v);
            if let Some(pm) = &mut self.pm {
                pm.n_theta = v;
            }
            if let Some(h) = &mut self.hemisphere_solve {
                h.n_theta = v;
            }
        }
        if let Some(eps) = &o.epsilons {
            match &mut self.sweep {
                Some(s) => s.epsilons = eps.clone(),
                None => {
                    self.sweep = Some(SweepSpec {
                        epsilons: eps.clone(),
                        panels_per_decade: None,
                        order: None,
                        n_theta: None,
                    })
                }
            }
        }
        if let Some(mu) = o.mu {
            self.pm.get_or_insert_with(PmConfig::default).mu = mu;
        }
        if let Some(lambda) = o.lambda {
            match self.command {
                Command::SolveHemisphere => self.hemisphere_solve.get_or_insert_with(HemisphereConfig::default).lambda = lambda,
                _ => self.pm.get_or_insert_with(PmConfig::default).lambda = lambda,
            }
        }
        if o.k0.is_some() {
            self.k0 = o.k0;
        }
    }

    /// Consistency checks that do not need the numerical modules.
    pub fn validate(&self) -> Result<(), CliError> {
        let needs = |what: &str| CliError::Spec(format!("{} needs `{what}`", self.command.name()));
        if self.command.randomized() && self.seed.is_none() {
            return Err(CliError::Spec(format!(
                "{} is randomized: `seed` is mandatory",
                self.command.name()
            )));
        }
        let geometric = !matches!(
            self.command,
            Command::SolvePm | Command::SolveHemisphere | Command::EstimateMu0 | Command::CheckIdentity
        );
        if geometric {
            let space = self.space.as_ref().ok_or_else(|| needs("[space]"))?;
            if space.n < 3 {
                return Err(CliError::Spec(format!(
                    "dimension n = {} (hypothesis: n ≥ 3)",
                    space.n
                )));
            }
            if space.hemisphere && space.c <= 0.0 {
                return Err(CliError::Spec(format!(
                    "hemisphere needs c > 0, got c = {} (hypothesis: positively curved space form)",
                    space.c
                )));
            }
        }
        match self.command {
            Command::VerifyThm1 | Command::VerifyThm2 | Command::VerifyRemark | Command::RayleighProbe => {
                if self.poles.axis.is_none() {
                    return Err(needs("poles.axis"));
                }
            }
            Command::VerifyHemisphere => {
                let hemisphere = self.space.as_ref().is_some_and(|s| s.hemisphere);
                if !hemisphere {
                    return Err(CliError::Spec(
                        "verify-hemisphere needs space.hemisphere = true (hypothesis: open upper hemisphere)".into(),
                    ));
                }
                if self.poles.axis.is_none() && self.poles.hemisphere_b.is_none() {
                    return Err(needs("poles.axis or poles.hemisphere_b"));
                }
            }
            Command::SweepSharpness => {
                let sweep = self.sweep.as_ref().ok_or_else(|| needs("[sweep]"))?;
                if sweep.epsilons.is_empty() {
                    return Err(needs("a nonempty sweep.epsilons"));
                }
                if !sweep.epsilons.windows(2).all(|w| w[0] > w[1]) {
                    return Err(CliError::Spec("sweep.epsilons must decrease strictly".into()));
                }
                if self.poles.axis.as_ref().map(Vec::len) != Some(2) {
                    return Err(CliError::Spec(
                        "sweep-sharpness needs exactly two poles in poles.axis (hypothesis: bipolar family)".into(),
                    ));
                }
            }
            Command::CheckComparison if self.k0.is_none() => return Err(needs("k0")),
            _ => {}
        }
        if matches!(self.command, Command::VerifyThm1 | Command::VerifyThm2 | Command::VerifyHemisphere | Command::VerifyRemark)
            && self.field.is_none()
        {
            return Err(needs("[field]"));
        }
        if let (Command::VerifyThm2 | Command::CheckComparison, Some(k0), Some(space)) = (self.command, self.k0, &self.space) {
            if k0 > space.c {
                return Err(CliError::Spec(format!(
                    "comparison hypothesis violated: k0 = {k0} > c = {} (hypothesis: sectional curvature bounded below by k0)",
                    space.c
                )));
            }
        }
        if self.command == Command::VerifyThm2 && self.k0.is_none() {
            return Err(needs("k0"));
        }
        if self.command == Command::VerifyRemark && self.space.as_ref().is_some_and(|s| s.c >= 0.0) {
            return Err(CliError::Spec(
                "verify-remark needs c < 0 (hypothesis: Cartan–Hadamard manifold with curvature bounded above by c < 0)".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_parses() {
        let s = ExperimentSpec::parse(
            r#"
            command = "verify-thm1"
            space = { n = 3, c = 0.0 }
            poles = { axis = [-0.5, 0.5] }
            field = { kind = "bump", radius = 1.5 }
            "#,
        )
        .unwrap();
        assert_eq!(s.command, Command::VerifyThm1);
        assert_eq!(s.field, Some(FieldSpec::Bump { center: 0.0, radius: 1.5, amplitude: 1.0 }));
        s.validate().unwrap();
    }

    #[test]
    fn parse_error_reports_line() {
        let err = ExperimentSpec::parse("command = \"verify-thm1\"\nseed = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentSpec::parse("command = \"verify-thm1\"\nsede = 3\n").is_err());
    }

    #[test]
    fn randomized_suites_need_seed() {
        let s = ExperimentSpec::parse("command = \"check-identity\"\n").unwrap();
        assert!(s.validate().unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn overrides_replace_fields() {
        let mut s = ExperimentSpec::parse(
            "command = \"solve-pm\"\nseed = 1\n[pm]\nmu = 2.0\nn_r = 40\n",
        )
        .unwrap();
        s.apply(&Overrides {
            mu: Some(5.0),
            n_r: Some(30),
            seed: Some(9),
            ..Default::default()
        });
        let pm = s.pm.unwrap();
        assert_eq!((pm.mu, pm.n_r, pm.n_theta, s.seed), (5.0, 30, 100, Some(9)));
    }
}
