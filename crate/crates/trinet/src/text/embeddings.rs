//! Word-vector tables.
//!
//! Tables are either loaded from the plain text word-vector format
//! (header `V d`, then one `token v1 .. vd` line per token) or synthesized
//! deterministically when no pretrained vectors are available. Row 0 is
//! always the all-zero UNK/padding vector.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;


use crate::data::UNK_TOKEN;
use crate::error::{Error, Result};
use crate::rng::{fnv1a, mix_seed, seeded, std_normal};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    vocab: Vec<String>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
    index: BTreeMap<String, usize>,
}

impl EmbeddingTable {
    fn from_rows(vocab: Vec<String>, vectors: Vec<Vec<f64>>, dim: usize) -> Self {
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        EmbeddingTable {
            vocab,
            vectors,
            dim,
            index,
        }
    }

    /// A table containing only the UNK row. Useful as the "no pretrained
    /// vectors" input to training, where every row is then synthesized.
    pub fn empty(dim: usize) -> Self {
        Self::from_rows(
            vec![UNK_TOKEN.to_string()],
            vec![vec![0.0; dim]],
            dim,
        )
    }

    /// Parse the word-vector text format. The UNK row is prepended.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: "missing header line".to_string(),
            })??;
        let mut parts = header.split_whitespace();
        let count: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("header must be `<count> <dim>`, got {header:?}"),
            })?;
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("header must be `<count> <dim>`, got {header:?}"),
            })?;
        if dim == 0 {
            return Err(Error::Parse {
                line: 1,
                reason: "embedding dimension must be >= 1".to_string(),
            });
        }

        let mut vocab = vec![UNK_TOKEN.to_string()];
        let mut vectors = vec![vec![0.0; dim]];
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut line_no = 1usize;
        for line in lines {
            let line = line?;
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields
                .next()
                .expect("non-empty line has a first field")
                .to_string();
            let values: Vec<&str> = fields.collect();
            if values.len() != dim {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!(
                        "token {token:?} has {} values, expected {dim}",
                        values.len()
                    ),
                });
            }
            let mut row = Vec::with_capacity(dim);
            for v in values {
                let parsed: f64 = v.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("not a number: {v:?}"),
                })?;
                if !parsed.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("non-finite value: {v:?}"),
                    });
                }
                row.push(parsed);
            }
            if seen.insert(token.clone(), line_no).is_some() || token == UNK_TOKEN {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("duplicate token: {token:?}"),
                });
            }
            vocab.push(token);
            vectors.push(row);
        }
        if vocab.len() - 1 != count {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("header declared {count} tokens, found {}", vocab.len() - 1),
            });
        }
        Ok(Self::from_rows(vocab, vectors, dim))
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(file)
    }

    /// Deterministic unit-norm vector for a token. The generator is keyed
    /// by the token text and the seed, so the same pair always yields the
    /// same vector regardless of vocabulary order.
    pub fn synth_vector(token: &str, dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded(mix_seed(fnv1a(token.as_bytes()), 0x7ab1e), seed);
        let mut v: Vec<f64> = (0..dim).map(|_| std_normal(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            v[0] = 1.0;
        } else {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }

    /// Synthesize a full table for `tokens` (UNK prepended).
    pub fn synthesize(tokens: &[String], dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadConfig("embedding dimension must be >= 1".to_string()));
        }
        let mut vocab = vec![UNK_TOKEN.to_string()];
        let mut vectors = vec![vec![0.0; dim]];
        for t in tokens {
            if t == UNK_TOKEN {
                continue;
            }
            vocab.push(t.clone());
            vectors.push(Self::synth_vector(t, dim, seed));
        }
        Ok(Self::from_rows(vocab, vectors, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vectors[i].as_slice())
    }
}
