use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Architecture hyperparameters.
///
/// Dropout sites, in `dropout_rates` order: after each of the four
/// conv+pool stages, then after MLP layers 1 and 2. L2 kernel
/// regularization applies to the first two convolutional layers only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Token sequence length fed to the text branch.
    pub note_length: usize,
    /// Embedding dimension.
    pub embed_dim: usize,
    pub conv_channels: [usize; 4],
    pub conv_kernel: [usize; 4],
    pub pool_width: [usize; 4],
    pub l2_lambda: f64,
    pub dropout_rates: [f64; 6],
    pub mlp_widths: [usize; 3],
    pub head_width: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            note_length: 48,
            embed_dim: 16,
            conv_channels: [16, 16, 32, 32],
            conv_kernel: [3, 3, 3, 3],
            pool_width: [2, 2, 2, 2],
            l2_lambda: 1e-4,
            dropout_rates: [0.3; 6],
            mlp_widths: [64, 32, 16],
            head_width: 32,
        }
    }
}

impl ModelConfig {
    /// Sequence length after each stage as (post-conv, post-pool) pairs.
    /// Errors if any stage would collapse below length 1.
    pub fn stage_lengths(&self) -> Result<[(usize, usize); 4]> {
        let mut out = [(0usize, 0usize); 4];
        let mut t = self.note_length;
        for stage in 0..4 {
            let w = self.conv_kernel[stage];
            let p = self.pool_width[stage];
            if w == 0 || p == 0 {
                return Err(Error::BadConfig(format!(
                    "conv kernel and pool width must be >= 1 at stage {stage}"
                )));
            }
            if t < w {
                return Err(Error::Shape(format!(
                    "stage {stage}: input length {t} shorter than kernel width {w}"
                )));
            }
            let conv_len = t - w + 1;
            let pool_len = conv_len / p;
            if pool_len == 0 {
                return Err(Error::Shape(format!(
                    "stage {stage}: pooling width {p} collapses length {conv_len} to 0"
                )));
            }
            out[stage] = (conv_len, pool_len);
            t = pool_len;
        }
        Ok(out)
    }

    /// Width of the flattened text-branch output.
    pub fn text_flat_width(&self) -> Result<usize> {
        let lengths = self.stage_lengths()?;
        Ok(self.conv_channels[3] * lengths[3].1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.note_length == 0 || self.embed_dim == 0 || self.head_width == 0 {
            return Err(Error::BadConfig(
                "note_length, embed_dim and head_width must all be >= 1".to_string(),
            ));
        }
        if self.conv_channels.iter().any(|&c| c == 0)
            || self.mlp_widths.iter().any(|&w| w == 0)
        {
            return Err(Error::BadConfig("all layer widths must be >= 1".to_string()));
        }
        if !self.l2_lambda.is_finite() || self.l2_lambda < 0.0 {
            return Err(Error::BadConfig(format!(
                "l2_lambda must be finite and >= 0, got {}",
                self.l2_lambda
            )));
        }
        for (i, &r) in self.dropout_rates.iter().enumerate() {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::BadConfig(format!(
                    "dropout rate {i} must be in [0, 1), got {r}"
                )));
            }
        }
        self.stage_lengths()?;
        Ok(())
    }
}
