//! Shared inputs for the benchmarks.

use gridaudit_core::testing::{random_program, random_spec, seeded, GenConfig};
use gridaudit_core::{IntervalSpec, SpreadsheetProgram};

/// A reproducible program of roughly `cells` cells with an input spec.
pub fn workload(seed: u64, cells: usize) -> (SpreadsheetProgram, IntervalSpec) {
    let config = GenConfig {
        max_cells: cells,
        ..GenConfig::default()
    };
    let mut rng = seeded(seed);
    let p = random_program(&mut rng, &config);
    let spec = random_spec(&mut rng, &p);
    (p, spec)
}
