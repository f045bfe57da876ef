//! Support library for the `odot` binary: the series file schema with its
//! validation, run reports, and output formatting.

pub mod fmt;
pub mod io;
