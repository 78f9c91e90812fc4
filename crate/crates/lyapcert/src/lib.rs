//! File formats and command drivers behind the `lyapcert` binary.

pub mod certfile;
pub mod commands;
pub mod spec;
