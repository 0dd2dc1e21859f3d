//! Grid runs: generate, verify every element, trace the strict instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::nt;
use crate::characters::{equivariant_report, Verdict};
use crate::complexes::integral_cohomology;
use crate::error::{Error, Result};
use crate::prooftrace::{split_top_and_recurse, TraceConfig};

use super::generator::{generate_instance, GeneratorParams, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Default,
    Full,
}

const GRID_PRIMES: [u64; 4] = [2, 3, 5, 7];
const GRID_ORDERS: [u64; 7] = [1, 2, 3, 4, 6, 8, 12];

/// Twenty (p, n) pairs with p ∤ n: all orders for p ≥ 5, n ≤ 8 for p = 3, n ≤ 3 for p = 2.
pub fn grid_pairs() -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in GRID_PRIMES {
        for n in GRID_ORDERS {
            if n % p != 0 && (p > 3 || n <= 8) && (p != 2 || n <= 3) {
                out.push((p, n));
            }
        }
    }
    out
}

/// Seeds 1..=seeds per pair; the first half strict, the second general.
pub fn grid_params(grid: Grid) -> Vec<GeneratorParams> {
    let seeds = match grid {
        Grid::Default => 10,
        Grid::Full => 40,
    };
    let mut out = Vec::new();
    for (p, n) in grid_pairs() {
        for seed in 1..=seeds {
            let mode = if seed <= seeds / 2 { Mode::Strict } else { Mode::General };
            out.push(GeneratorParams::new(seed, p, n, mode));
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestConfig {
    pub max_level: u64,
    pub extension_degree_bound: usize,
    /// Trace only the generator (false) or every element (true) of strict instances.
    pub trace_all_elements: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { max_level: 240, extension_degree_bound: 2, trace_all_elements: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub p: u64,
    pub n: u64,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceOutcome {
    pub seed: u64,
    pub p: u64,
    pub n: u64,
    pub mode: Mode,
    pub ranks: Vec<usize>,
    pub torsion: bool,
    pub equal: usize,
    pub traces: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestSummary {
    pub instances: usize,
    pub strict_instances: usize,
    pub torsion_instances: usize,
    pub torsion_fraction: f64,
    pub equal_verdicts: usize,
    pub traces_completed: usize,
    pub failures: Vec<Failure>,
    pub outcomes: Vec<InstanceOutcome>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn run_one(params: &GeneratorParams, config: &SelftestConfig) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        seed: params.seed,
        p: params.p,
        n: params.n,
        mode: params.mode,
        ranks: Vec::new(),
        torsion: false,
        equal: 0,
        traces: 0,
        failures: Vec::new(),
    };
    let fail = |element: Option<usize>, reason: String| Failure {
        seed: params.seed,
        p: params.p,
        n: params.n,
        mode: params.mode,
        element,
        reason,
    };
    let doc = match generate_instance(params) {
        Ok(doc) => doc,
        Err(e) => {
            out.failures.push(fail(None, format!("generation failed: {e}")));
            return out;
        }
    };
    let act = &doc.action;
    out.ranks = act.complex.ranks().to_vec();
    out.torsion = integral_cohomology(&act.complex).has_torsion();
    match equivariant_report(act, config.max_level) {
        Ok(report) => {
            for r in report.reports.iter().filter(|r| r.p_regular) {
                if r.verdict == Verdict::Equal {
                    out.equal += 1;
                } else {
                    let why = r.reason.clone().unwrap_or_else(|| format!("verdict {:?}", r.verdict));
                    out.failures.push(fail(r.g, why));
                }
            }
        }
        Err(e) => out.failures.push(fail(None, format!("character computation failed: {e}"))),
    }
    if params.mode == Mode::Strict {
        let elements: Vec<usize> = if config.trace_all_elements {
            (0..act.group.order()).collect()
        } else {
            vec![1 % act.group.order()]
        };
        for g in elements {
            let trace_config = TraceConfig {
                max_level: config.max_level,
                extension_degree_bound: config.extension_degree_bound,
                strict_order: Some(act.group.element_order(g)),
            };
            match split_top_and_recurse(&act.complex, &act.maps[g], trace_config) {
                Ok(t) if t.completed() && t.verdict == Some(Verdict::Equal) && t.bookkeeping_holds() => out.traces += 1,
                Ok(t) => {
                    let why = match &t.abort {
                        Some(a) => format!("trace aborted at {:?}: {}", a.stage, a.reason),
                        None if !t.bookkeeping_holds() => "trace bookkeeping failed".into(),
                        None => format!("trace verdict {:?}", t.verdict),
                    };
                    out.failures.push(fail(Some(g), why));
                }
                Err(e) => out.failures.push(fail(Some(g), format!("trace failed: {e}"))),
            }
        }
    }
    out
}

/// Rejects the whole grid if any entry has invalid parameters, then runs
/// every instance in parallel and aggregates in grid order.
pub fn run_selftest(grid: &[GeneratorParams], config: &SelftestConfig) -> Result<SelftestSummary> {
    for params in grid {
        if params.n % params.p == 0 && nt::is_prime(params.p) {
            return Err(Error::InvalidParams(format!("p = {} divides the group order {}", params.p, params.n)));
        }
        params.validate()?;
    }
    let outcomes: Vec<InstanceOutcome> = grid.par_iter().map(|params| run_one(params, config)).collect();
    let instances = outcomes.len();
    let torsion_instances = outcomes.iter().filter(|o| o.torsion).count();
    Ok(SelftestSummary {
        instances,
        strict_instances: outcomes.iter().filter(|o| o.mode == Mode::Strict).count(),
        torsion_instances,
        torsion_fraction: if instances == 0 { 0.0 } else { torsion_instances as f64 / instances as f64 },
        equal_verdicts: outcomes.iter().map(|o| o.equal).sum(),
        traces_completed: outcomes.iter().map(|o| o.traces).sum(),
        failures: outcomes.iter().flat_map(|o| o.failures.iter().cloned()).collect(),
        outcomes,
    })
}
