//! Fixtures shared by the benchmarks under `benches/`.

use dynrefl::consistency::SamplePoint;
use dynrefl::scenarios::builtin;
use dynrefl::{Instance, Result};

/// A built-in scenario at rank `rank` with `count` sample points for `sites` sites.
pub fn fixture(
    name: &str,
    rank: usize,
    sites: usize,
    count: usize,
) -> Result<(Instance, Vec<SamplePoint>)> {
    let inst = builtin(name, rank)?.assemble()?;
    let pts = inst.sample(sites, Some(count), Some(17))?;
    Ok((inst, pts))
}
