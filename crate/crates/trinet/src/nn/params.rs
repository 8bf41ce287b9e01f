use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::config::ModelConfig;
use crate::nn::tensor::Matrix;
use crate::rng::seeded;
use crate::text::EmbeddingTable;

/// Convolution kernel, indexed (out channel, in channel, offset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvKernel {
    pub c_out: usize,
    pub c_in: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl ConvKernel {
    pub fn zeros(c_out: usize, c_in: usize, width: usize) -> Self {
        ConvKernel {
            c_out,
            c_in,
            width,
            data: vec![0.0; c_out * c_in * width],
        }
    }

    #[inline]
    pub fn at(&self, o: usize, c: usize, w: usize) -> f64 {
        self.data[(o * self.c_in + c) * self.width + w]
    }

    #[inline]
    pub fn at_mut(&mut self, o: usize, c: usize, w: usize) -> &mut f64 {
        &mut self.data[(o * self.c_in + c) * self.width + w]
    }

    /// The (in channel, offset) plane for one output channel.
    #[inline]
    pub fn plane(&self, o: usize) -> &[f64] {
        let span = self.c_in * self.width;
        &self.data[o * span..(o + 1) * span]
    }

    #[inline]
    pub fn plane_mut(&mut self, o: usize) -> &mut [f64] {
        let span = self.c_in * self.width;
        &mut self.data[o * span..(o + 1) * span]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvLayer {
    pub kernel: ConvKernel,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// out x in.
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    fn zeros(out: usize, input: usize) -> Self {
        DenseLayer {
            weight: Matrix::zeros(out, input),
            bias: vec![0.0; out],
        }
    }
}

/// Every trainable tensor of the network.
///
/// Embedding row 0 is the UNK/padding vector; it is held at zero and never
/// receives gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub embedding: Matrix,
    pub conv: Vec<ConvLayer>,
    pub mlp: Vec<DenseLayer>,
    pub head: DenseLayer,
    pub output: DenseLayer,
}

/// Gradients are shape-congruent with the parameters they differentiate.
pub type Gradients = ModelParams;

impl ModelParams {
    /// Initialize a network. Embedding rows come from `table` where the
    /// token is present and are otherwise synthesized deterministically
    /// from the token text and `seed`; the rest uses seeded
    /// Xavier-uniform weights with zero biases.
    pub fn init(
        config: &ModelConfig,
        vocab: &[String],
        numeric_width: usize,
        table: &EmbeddingTable,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        if numeric_width == 0 {
            return Err(Error::BadConfig("numeric width must be >= 1".to_string()));
        }
        if table.len() > 1 && table.dim() != config.embed_dim {
            return Err(Error::Shape(format!(
                "embedding table dimension {} does not match configured embed_dim {}",
                table.dim(),
                config.embed_dim
            )));
        }

        let d = config.embed_dim;
        let mut embedding = Matrix::zeros(vocab.len(), d);
        for (i, token) in vocab.iter().enumerate().skip(1) {
            let row = match table.get(token) {
                Some(v) => v.to_vec(),
                None => EmbeddingTable::synth_vector(token, d, seed),
            };
            embedding.row_mut(i).copy_from_slice(&row);
        }

        let mut rng = seeded(seed, 0x1417);
        // He-uniform for the ReLU stacks, Xavier for the linear output.
        let mut he = |fan_in: usize, data: &mut [f64]| {
            let limit = (6.0 / fan_in as f64).sqrt();
            for x in data.iter_mut() {
                *x = rng.random_range(-limit..limit);
            }
        };

        let mut conv = Vec::with_capacity(4);
        let mut c_in = d;
        for stage in 0..4 {
            let c_out = config.conv_channels[stage];
            let w = config.conv_kernel[stage];
            let mut kernel = ConvKernel::zeros(c_out, c_in, w);
            he(c_in * w, &mut kernel.data);
            conv.push(ConvLayer {
                kernel,
                bias: vec![0.0; c_out],
            });
            c_in = c_out;
        }

        let mut mlp = Vec::with_capacity(3);
        let mut input = numeric_width;
        for &width in &config.mlp_widths {
            let mut layer = DenseLayer::zeros(width, input);
            he(input, &mut layer.weight.data);
            mlp.push(layer);
            input = width;
        }

        let concat_width = config.text_flat_width()? + config.mlp_widths[2];
        let mut head = DenseLayer::zeros(config.head_width, concat_width);
        he(concat_width, &mut head.weight.data);

        let mut output = DenseLayer::zeros(1, config.head_width);
        let limit = (6.0 / (config.head_width + 1) as f64).sqrt();
        for x in output.weight.data.iter_mut() {
            *x = rng.random_range(-limit..limit);
        }

        Ok(ModelParams {
            embedding,
            conv,
            mlp,
            head,
            output,
        })
    }

    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        for tensor in out.tensors_mut() {
            tensor.fill(0.0);
        }
        out
    }

    /// All tensors in a fixed order: embedding, conv kernels and biases,
    /// MLP weights and biases, head, output.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.embedding.data];
        for layer in &self.conv {
            out.push(&layer.kernel.data);
            out.push(&layer.bias);
        }
        for layer in &self.mlp {
            out.push(&layer.weight.data);
            out.push(&layer.bias);
        }
        out.push(&self.head.weight.data);
        out.push(&self.head.bias);
        out.push(&self.output.weight.data);
        out.push(&self.output.bias);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = vec![&mut self.embedding.data];
        for layer in &mut self.conv {
            out.push(&mut layer.kernel.data);
            out.push(&mut layer.bias);
        }
        for layer in &mut self.mlp {
            out.push(&mut layer.weight.data);
            out.push(&mut layer.bias);
        }
        out.push(&mut self.head.weight.data);
        out.push(&mut self.head.bias);
        out.push(&mut self.output.weight.data);
        out.push(&mut self.output.bias);
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// Sum gradient-style accumulation: `self += other`.
    pub fn add_assign(&mut self, other: &Self) {
        for (mine, theirs) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for tensor in self.tensors_mut() {
            for x in tensor.iter_mut() {
                *x *= factor;
            }
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows
    }

    pub fn numeric_width(&self) -> usize {
        self.mlp[0].weight.cols
    }
}
