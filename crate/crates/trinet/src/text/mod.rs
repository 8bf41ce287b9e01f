//! Text handling: tokenization, word-vector tables, token-frequency
//! analysis and PCA projection of embedding matrices.

mod embeddings;
mod frequency;
mod pca;
mod tokenize;

pub use embeddings::EmbeddingTable;
pub use frequency::{token_frequency_report, TokenFrequencyRow};
pub use pca::{pca_project, PcaProjection};
pub use tokenize::{record_tokens, tokenize};
