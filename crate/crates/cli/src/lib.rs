//! Monte-Carlo harness, statistical diagnostics, fast statistic kernels
//! and JSON wire formats on top of `ewens-core`.

pub mod fastpat;
pub mod mc;
pub mod wire;
