//! Model checkpointing.
//!
//! One self-describing JSON file holds the condition tag, the
//! architecture, a stable hash of the token vocabulary, and every
//! parameter tensor. JSON floats round-trip f64 exactly, so a
//! load-after-save reproduces the parameters bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Condition;
use crate::error::Result;
use crate::nn::config::ModelConfig;
use crate::nn::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub condition: Condition,
    pub config: ModelConfig,
    pub vocab_hash: u64,
    pub params: ModelParams,
}

impl Checkpoint {
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_json_bytes()?)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
