//! Pipeline configuration.
//!
//! A TOML file with every key optional:
//!
//! ```toml
//! prng = "chacha8"        # generator family; the only supported value
//! seed = 42
//! workers = 0             # 0 = one per core
//!
//! [screening]
//! semi_fraction = 0.25
//! attached_noise_fraction = 0.05
//! removed_fraction = 0.30
//!
//! [trimap]
//! band = 10               # omit to derive from image size
//!
//! [composite]
//! per_sample = 5
//!
//! [chroma]
//! key = "0,255,0"
//! tolerance = 64
//!
//! [prompts]
//! template = "{A} {age} {gender} with {hair_color} {hair_length} hair, wearing {clothing}, {action}."
//! limit = 100
//!
//! [prompts.attributes]
//! gender = ["man", "woman"]
//! ```
//!
//! A snapshot of the effective configuration is stored in the manifest.

use std::collections::BTreeMap;
use std::path::Path;

use mattekit_core::connectivity::ScreeningThresholds;
use mattekit_core::matte::DEFAULT_KEY_TOLERANCE;
use mattekit_core::KeyColor;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::prompts::PromptSpec;

pub const PRNG_FAMILY: &str = "chacha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub prng: String,
    pub seed: u64,
    pub workers: usize,
    pub screening: ScreeningThresholds,
    pub trimap: TrimapConfig,
    pub composite: CompositeConfig,
    pub chroma: ChromaConfig,
    pub prompts: PromptConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            prng: PRNG_FAMILY.to_string(),
            seed: 0,
            workers: 0,
            screening: ScreeningThresholds::default(),
            trimap: TrimapConfig::default(),
            composite: CompositeConfig::default(),
            chroma: ChromaConfig::default(),
            prompts: PromptConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrimapConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeConfig {
    pub per_sample: usize,
}

impl Default for CompositeConfig {
    fn default() -> Self {
        Self { per_sample: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChromaConfig {
    #[serde(with = "key_string")]
    pub key: KeyColor,
    pub tolerance: u8,
}

impl Default for ChromaConfig {
    fn default() -> Self {
        Self {
            key: KeyColor::GREEN,
            tolerance: DEFAULT_KEY_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptConfig {
    pub template: String,
    pub limit: usize,
    pub attributes: BTreeMap<String, Vec<String>>,
}

impl Default for PromptConfig {
    fn default() -> Self {
        let spec = PromptSpec::default();
        Self {
            template: spec.template,
            limit: 100,
            attributes: spec.attributes,
        }
    }
}

impl PromptConfig {
    pub fn spec(&self) -> PromptSpec {
        PromptSpec {
            template: self.template.clone(),
            attributes: self.attributes.clone(),
        }
    }
}

mod key_string {
    use mattekit_core::KeyColor;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(key: &KeyColor, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(key)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<KeyColor, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prng != PRNG_FAMILY {
            return Err(PipelineError::Config(format!(
                "unsupported prng {:?}, expected {PRNG_FAMILY:?}",
                self.prng
            )));
        }
        if self.chroma.tolerance == 0 {
            return Err(PipelineError::Config("chroma tolerance must be positive".into()));
        }
        self.prompts.spec().validate()
    }
}
