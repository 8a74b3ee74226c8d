//! File formats, the command line and the parallel Monte-Carlo driver on
//! top of [`bhp_core`].

pub use bhp_core;

pub mod bench;
pub mod cache;
pub mod check;
pub mod draw;
pub mod error;
pub mod panel_io;
pub mod svg;

/// Version of every emitted file layout.
pub const SCHEMA_VERSION: u32 = 1;
