pub mod eval;
pub mod features;
pub mod generate;
pub mod pca;
pub mod predict;
pub mod simulate;
pub mod tokens;
pub mod train;
