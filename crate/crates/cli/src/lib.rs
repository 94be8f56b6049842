//! Library side of the `sntrup` command: benchmarks and key files.

pub mod bench;
pub mod keyfiles;

use sntrup_core::{paramset, ParamSet};

/// Parses `653`, `761` or `857` (optionally prefixed with `sntrup`).
pub fn parse_param(s: &str) -> Result<ParamSet, String> {
    let digits = s.trim().trim_start_matches("sntrup");
    let id: u32 = digits
        .parse()
        .map_err(|_| format!("expected 653, 761 or 857, got {s:?}"))?;
    paramset(id).map_err(|e| e.to_string())
}

/// Parses a comma-separated list of parameter sets.
pub fn parse_param_list(s: &str) -> Result<Vec<ParamSet>, String> {
    s.split(',').map(parse_param).collect()
}
