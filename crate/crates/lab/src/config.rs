//! Run configuration: a JSON document validated on load.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hjlab_core::solver::SolveSettings;
use hjlab_core::spectral::GridSpec;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::LabError;

/// `"auto"` or an explicit `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DeltaPolicy {
    #[default]
    Auto,
    Fixed(f64),
}

impl DeltaPolicy {
    pub fn explicit(self) -> Option<f64> {
        match self {
            Self::Auto => None,
            Self::Fixed(d) => Some(d),
        }
    }
}

impl Serialize for DeltaPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for DeltaPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PolicyVisitor;
        impl Visitor<'_> for PolicyVisitor {
            type Value = DeltaPolicy;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"auto\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<DeltaPolicy, E> {
                if v == "auto" {
                    Ok(DeltaPolicy::Auto)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<DeltaPolicy, E> {
                Ok(DeltaPolicy::Fixed(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<DeltaPolicy, E> {
                Ok(DeltaPolicy::Fixed(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<DeltaPolicy, E> {
                Ok(DeltaPolicy::Fixed(v as f64))
            }
        }
        d.deserialize_any(PolicyVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGridSpec {
    pub k_min: f64,
    pub k_max_factor: f64,
    pub count: usize,
}

impl Default for KGridSpec {
    fn default() -> Self {
        Self {
            k_min: 1.0,
            k_max_factor: 1.05,
            count: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub grid_n: usize,
    pub gamma: f64,
    pub q: f64,
    #[serde(default)]
    pub delta: DeltaPolicy,
    #[serde(rename = "M_target")]
    pub m_target: f64,
    #[serde(default = "one_run")]
    pub ensemble_size: usize,
    pub seed: u64,
    pub band_limit: usize,
    #[serde(default)]
    pub solver: SolveSettings,
    #[serde(default)]
    pub k_grid: KGridSpec,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Draw `u*` from the seed and set `f` to its discrete residual instead.
    #[serde(default)]
    pub manufactured: bool,
    #[serde(default = "unit")]
    pub c1: f64,
    /// Adds `a·cos(|p|²)` to the Hamiltonian.
    #[serde(default)]
    pub perturbation_amplitude: Option<f64>,
}

fn one_run() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

fn default_output() -> PathBuf {
    PathBuf::from("hjlab-out")
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path)
            .map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<GridSpec, LabError> {
        GridSpec::new(self.dimension, self.grid_n).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: String| Err(LabError::Config(msg));
        self.grid()?;
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad(format!("gamma = {} must exceed 1", self.gamma));
        }
        if !(self.q >= 1.0) || !self.q.is_finite() {
            return bad(format!("q = {} must be at least 1", self.q));
        }
        if !(self.m_target >= 0.0) || !self.m_target.is_finite() {
            return bad(format!("M_target = {} must be finite and ≥ 0", self.m_target));
        }
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be at least 1".into());
        }
        if self.band_limit == 0 || 4 * self.band_limit >= self.grid_n {
            return bad(format!(
                "band_limit = {} must satisfy 1 ≤ band_limit < grid_n/4 = {}",
                self.band_limit,
                self.grid_n as f64 / 4.0
            ));
        }
        if let DeltaPolicy::Fixed(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("delta = {d} must lie in (0, 1) or be \"auto\""));
            }
        }
        let k = &self.k_grid;
        if !(k.k_min >= 1.0) || !(k.k_max_factor > 1.0) || k.count < 2 {
            return bad("k_grid needs k_min ≥ 1, k_max_factor > 1 and count ≥ 2".into());
        }
        if !(self.c1 > 0.0) || !self.c1.is_finite() {
            return bad(format!("c1 = {} must be positive", self.c1));
        }
        if let Some(a) = self.perturbation_amplitude {
            if !(a >= 0.0) || !a.is_finite() {
                return bad(format!("perturbation_amplitude = {a} must be ≥ 0"));
            }
        }
        self.solver
            .validate()
            .map_err(|e| LabError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
