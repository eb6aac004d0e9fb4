pub mod eval;
pub mod sweep;
pub mod train;
