//! Standalone 1D layer primitives.

use crate::error::{Error, Result};
use crate::nn::params::ConvKernel;
use crate::nn::tensor::Matrix;

/// Valid (no padding) cross-correlation plus bias.
/// Input is C_in x T; output is C_out x (T - W + 1).
pub fn conv1d(input: &Matrix, kernel: &ConvKernel, bias: &[f64]) -> Result<Matrix> {
    if input.rows != kernel.c_in {
        return Err(Error::Shape(format!(
            "conv1d: input has {} channels, kernel expects {}",
            input.rows, kernel.c_in
        )));
    }
    if bias.len() != kernel.c_out {
        return Err(Error::Shape(format!(
            "conv1d: bias length {} != output channels {}",
            bias.len(),
            kernel.c_out
        )));
    }
    let t = input.cols;
    let w = kernel.width;
    if t < w {
        return Err(Error::Shape(format!(
            "conv1d: input length {t} shorter than kernel width {w}"
        )));
    }
    let t_out = t - w + 1;
    let mut out = Matrix::zeros(kernel.c_out, t_out);
    for o in 0..kernel.c_out {
        let out_row = out.row_mut(o);
        out_row.fill(bias[o]);
        for c in 0..kernel.c_in {
            let in_row = input.row(c);
            for dw in 0..w {
                let k = kernel.at(o, c, dw);
                if k == 0.0 {
                    continue;
                }
                let window = &in_row[dw..dw + t_out];
                for (out_val, &x) in out_row.iter_mut().zip(window) {
                    *out_val += k * x;
                }
            }
        }
    }
    Ok(out)
}

/// Non-overlapping max pooling with stride equal to the window width.
/// Any trailing remainder shorter than the window is dropped. Returns the
/// pooled map plus the flat argmax positions (ties take the lowest index),
/// which the backward pass routes gradients through.
pub fn maxpool1d(input: &Matrix, width: usize) -> Result<(Matrix, Vec<usize>)> {
    if width == 0 {
        return Err(Error::Shape("maxpool1d: width must be >= 1".to_string()));
    }
    if input.cols < width {
        return Err(Error::Shape(format!(
            "maxpool1d: input length {} shorter than window {width}",
            input.cols
        )));
    }
    let t_out = input.cols / width;
    let mut out = Matrix::zeros(input.rows, t_out);
    let mut argmax = vec![0usize; input.rows * t_out];
    for c in 0..input.rows {
        let row = input.row(c);
        for j in 0..t_out {
            let start = j * width;
            let mut best = start;
            for k in start + 1..start + width {
                if row[k] > row[best] {
                    best = k;
                }
            }
            *out.at_mut(c, j) = row[best];
            argmax[c * t_out + j] = best;
        }
    }
    Ok((out, argmax))
}
