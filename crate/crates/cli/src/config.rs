//! Experiment configuration files.
//!
//! A config is a TOML document with a top-level `kind`, an optional `seed`,
//! optional tolerance overrides and exactly one table named after the kind:
//!
//! ```toml
//! kind = "crossing"
//! seed = 7
//!
//! [crossing]
//! gamma = 1.0
//! alphas = [1.9, 1.8, 1.7, 1.9]
//! z = [0.4, 0.0]
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::fmt;
use std::path::Path;

use lcft_core::bootstrap::{Channel, Frame, MetricFactor, SpectralQuadrature};
use lcft_core::correlators::InsertionKernel;
use lcft_core::gmc::{CircleFieldSpec, FieldSpec, Geometry, SphereFieldSpec};
use lcft_core::SpherePoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    DozzTable,
    GmcMoments,
    Correlator,
    Block,
    Bootstrap4pt,
    Crossing,
    McVsDozz,
    McVsBootstrap,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::DozzTable => "dozz-table",
            Kind::GmcMoments => "gmc-moments",
            Kind::Correlator => "correlator",
            Kind::Block => "block",
            Kind::Bootstrap4pt => "bootstrap4pt",
            Kind::Crossing => "crossing",
            Kind::McVsDozz => "mc-vs-dozz",
            Kind::McVsBootstrap => "mc-vs-bootstrap",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dozz_table: Option<DozzTableConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gmc_moments: Option<GmcMomentsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlator: Option<CorrelatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap4pt: Option<BootstrapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing: Option<CrossingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_vs_dozz: Option<McVsDozzConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_vs_bootstrap: Option<McVsBootstrapConfig>,
}

/// Overrides of the per-kind default tolerances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Tolerances {
    /// Allowed `|estimate - reference|` in standard errors.
    pub sigmas: Option<f64>,
    /// Allowed relative difference.
    pub relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DozzTableConfig {
    #[serde(default = "one")]
    pub mu: f64,
    /// `[gamma, alpha1, alpha2, alpha3]` per output row.
    pub rows: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmcMomentsConfig {
    pub gamma: f64,
    pub moments: Vec<f64>,
    pub samples: usize,
    pub geometry: Geometry,
    /// Fourier modes on the circle, maximal degree on the sphere.
    pub cutoff: usize,
}

impl GmcMomentsConfig {
    pub fn field_spec(&self, seed: u64) -> FieldSpec {
        match self.geometry {
            Geometry::Circle => FieldSpec::Circle(CircleFieldSpec::new(self.cutoff, seed)),
            Geometry::Sphere => FieldSpec::Sphere(SphereFieldSpec::new(self.cutoff, seed)),
        }
    }
}

/// A point of the Riemann sphere: `[re, im]` or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Finite([f64; 2]),
    Named(NamedPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedPoint {
    Inf,
}

impl PointSpec {
    pub fn to_point(self) -> SpherePoint {
        match self {
            PointSpec::Finite([re, im]) => SpherePoint::finite(re, im),
            PointSpec::Named(NamedPoint::Inf) => SpherePoint::Infinity,
        }
    }
}

pub fn complex(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorConfig {
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    pub points: Vec<PointSpec>,
    pub weights: Vec<f64>,
    pub lmax: usize,
    pub samples: usize,
    #[serde(default)]
    pub kernel: InsertionKernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    pub gamma: f64,
    /// Internal momentum; the exchanged weight is `Q^2/4 + p^2/4`.
    pub p: f64,
    /// External conformal weights `[D1, D2, D3, D4]`.
    pub deltas: [f64; 4],
    pub z: [f64; 2],
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    pub alphas: [f64; 4],
    pub z: [f64; 2],
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub metric: MetricFactor,
    /// Directory of cached block coefficients.
    #[serde(default)]
    pub cache_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_p_max")]
    pub p_max: f64,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_nodes")]
    pub nodes_per_panel: usize,
    #[serde(default = "default_level")]
    pub level: usize,
    #[serde(default = "default_tail")]
    pub tail_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            p_max: default_p_max(),
            panels: default_panels(),
            nodes_per_panel: default_nodes(),
            level: default_level(),
            tail_tolerance: default_tail(),
        }
    }
}

impl QuadratureConfig {
    pub fn build(&self) -> lcft_core::Result<SpectralQuadrature> {
        let mut q = SpectralQuadrature::new(self.p_max, self.panels, self.nodes_per_panel, self.level)?;
        q.tail_tolerance = self.tail_tolerance;
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingConfig {
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    pub alphas: [f64; 4],
    pub z: [f64; 2],
    #[serde(default = "default_channel")]
    pub channel: Channel,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McVsDozzConfig {
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    /// Three finite points.
    pub points: [[f64; 2]; 3],
    pub weights_a: [f64; 3],
    pub weights_b: [f64; 3],
    pub lmax: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McVsBootstrapConfig {
    pub gamma: f64,
    #[serde(default = "one")]
    pub mu: f64,
    /// Weights at `(0, z, 1, infinity)`.
    pub alphas: [f64; 4],
    pub z: [f64; 2],
    pub z_prime: [f64; 2],
    pub lmax: usize,
    pub samples: usize,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

fn one() -> f64 {
    1.0
}
fn default_p_max() -> f64 {
    12.0
}
fn default_panels() -> usize {
    12
}
fn default_nodes() -> usize {
    16
}
fn default_level() -> usize {
    10
}
fn default_tail() -> f64 {
    1e-8
}
fn default_channel() -> Channel {
    Channel::T
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        cfg.check_sections()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
    }

    fn sections(&self) -> [(Kind, bool); 8] {
        [
            (Kind::DozzTable, self.dozz_table.is_some()),
            (Kind::GmcMoments, self.gmc_moments.is_some()),
            (Kind::Correlator, self.correlator.is_some()),
            (Kind::Block, self.block.is_some()),
            (Kind::Bootstrap4pt, self.bootstrap4pt.is_some()),
            (Kind::Crossing, self.crossing.is_some()),
            (Kind::McVsDozz, self.mc_vs_dozz.is_some()),
            (Kind::McVsBootstrap, self.mc_vs_bootstrap.is_some()),
        ]
    }

    fn check_sections(&self) -> Result<(), CliError> {
        for (kind, present) in self.sections() {
            if kind == self.kind && !present {
                return Err(CliError::Usage(format!("config of kind {kind} needs a [{kind}] table")));
            }
            if kind != self.kind && present {
                return Err(CliError::Usage(format!(
                    "config of kind {} must not contain a [{kind}] table",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    /// Canonical JSON of the parsed config; formatting, comments and key
    /// order of the source file do not affect it.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CROSSING: &str = r#"
kind = "crossing"
seed = 3
[crossing]
gamma = 1.0
alphas = [1.9, 1.8, 1.7, 1.9]
z = [0.4, 0.0]
"#;

    #[test]
    fn shipped_configs_load() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut n = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
                n += 1;
            }
        }
        assert!(n >= 8);
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::parse(CROSSING).unwrap();
        let back = ExperimentConfig::parse(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.crossing.as_ref().unwrap().channel, Channel::T);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ExperimentConfig::parse(CROSSING).unwrap();
        let reordered = r#"
# same experiment
seed = 3
kind = "crossing"

[crossing]
z = [0.4, 0.0]
alphas = [1.9, 1.8, 1.7, 1.9]
gamma = 1.0   # coupling
"#;
        let b = ExperimentConfig::parse(reordered).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = Some(4);
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = CROSSING.replace("gamma = 1.0", "gamma = 1.0\ngama = 2.0");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert!(e.to_string().contains("gama"), "{e}");
        let bad = format!("extra = 1\n{CROSSING}");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn section_must_match_kind() {
        let bad = CROSSING.replace("[crossing]", "[bootstrap4pt]");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn points_parse() {
        let text = r#"
kind = "correlator"
[correlator]
gamma = 1.0
points = [[0.0, 0.0], [1.0, 0.0], "inf"]
weights = [1.9, 1.9, 1.9]
lmax = 8
samples = 4
"#;
        let c = ExperimentConfig::parse(text).unwrap();
        let pts: Vec<SpherePoint> = c.correlator.unwrap().points.iter().map(|p| p.to_point()).collect();
        assert_eq!(pts[2], SpherePoint::Infinity);
    }
}
