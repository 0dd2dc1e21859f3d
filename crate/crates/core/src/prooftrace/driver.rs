//! The recursive driver and its transcript.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{nt, CyclotomicField, CyclotomicNumber, Field, ScalarContext};
use crate::characters::{brauer_virtual_character, ordinary_virtual_trace, prime_to_p_on_cohomology, Verdict};
use crate::complexes::{residue_cohomology, ChainMap, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::{characteristic_polynomial, unity_level, Dvr, Matrix};

use super::correction::{homotopy_correction, is_teichmuller_triangular};
use super::extring::CyclotomicLocal;
use super::filtration::{build_stable_filtration, ExtensionRequest, FiltrationOutcome};
use super::strip::{check_transport, strip_top_acyclic, transport_along_strip, StripMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Strip,
    Transport,
    Extend,
    Filter,
    Correct,
    Split,
    Recurse,
    BaseCase,
    Verdict,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub op: Stage,
    pub depth: usize,
    pub window: [i64; 2],
    pub ranks: Vec<usize>,
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "Br")]
    pub br: Option<CyclotomicNumber>,
    #[serde(rename = "Tr")]
    pub tr: Option<CyclotomicNumber>,
    /// The bookkeeping identity this stage is responsible for holds.
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceAbort {
    pub stage: Stage,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionRequest>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceTranscript {
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// (Br, Tr) assembled from the base cases.
    #[serde(rename = "Br", skip_serializing_if = "Option::is_none")]
    pub br: Option<CyclotomicNumber>,
    #[serde(rename = "Tr", skip_serializing_if = "Option::is_none")]
    pub tr: Option<CyclotomicNumber>,
    /// (Br, Tr) of the input computed directly from cohomology.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct: Option<(CyclotomicNumber, CyclotomicNumber)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abort: Option<TraceAbort>,
}

impl TraceTranscript {
    pub fn completed(&self) -> bool {
        self.abort.is_none() && self.verdict.is_some()
    }

    /// Every stage's bookkeeping identity held.
    pub fn bookkeeping_holds(&self) -> bool {
        self.stages.iter().all(|s| s.consistent)
    }

    pub fn needs_extension(&self) -> Option<&ExtensionRequest> {
        self.abort.as_ref().and_then(|a| a.extension.as_ref())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceConfig {
    pub max_level: u64,
    /// Largest factor degree the driver adjoins by moving up the cyclotomic tower.
    pub extension_degree_bound: usize,
    /// Order n with γ^n = id as a chain map (p ∤ n), enabling γ-stable stripping.
    pub strict_order: Option<u64>,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { max_level: 240, extension_degree_bound: 2, strict_order: None }
    }
}

type Node = (Arc<PerfectComplex<CyclotomicLocal>>, ChainMap<CyclotomicLocal>);

struct Abort(TraceAbort);

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        Abort(TraceAbort { stage: Stage::Abort, reason: e.to_string(), extension: None })
    }
}

fn common_add(a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
    let level = nt::lcm(a.level(), b.level());
    let k = CyclotomicField::new(level);
    k.add(&a.embed(level).unwrap(), &b.embed(level).unwrap())
}

fn same_value(a: &CyclotomicNumber, b: &CyclotomicNumber) -> bool {
    let level = nt::lcm(a.level(), b.level());
    a.embed(level).unwrap() == b.embed(level).unwrap()
}

fn convert_complex<D: Dvr>(l: &PerfectComplex<D>, ring: &CyclotomicLocal) -> Arc<PerfectComplex<CyclotomicLocal>> {
    let src = l.ring();
    let conv = |m: &Matrix<D::Elem>| m.map(|x| ring.embed(&src.to_cyclotomic(x)));
    let diffs = (l.lo() + 1..=l.hi()).map(|i| conv(&l.diff(i))).collect();
    Arc::new(PerfectComplex::new_unchecked(ring.clone(), l.lo(), l.ranks().to_vec(), diffs).expect("same shapes"))
}

fn convert_map<D: Dvr>(g: &ChainMap<D>, target: &Arc<PerfectComplex<CyclotomicLocal>>) -> ChainMap<CyclotomicLocal> {
    let ring = target.ring().clone();
    let src = g.ring().clone();
    ChainMap::from_fn(target.clone(), target.clone(), |i| g.component(i).map(|x| ring.embed(&src.to_cyclotomic(x)))).expect("same shapes")
}

fn trimmed(node: &Node) -> Node {
    let l = Arc::new(node.0.trimmed());
    let g = node.1.retarget(l.clone(), l.clone()).expect("trimming keeps shapes");
    (l, g)
}

struct Driver {
    config: TraceConfig,
    ring: CyclotomicLocal,
    stages: Vec<StageRecord>,
}

impl Driver {
    fn values(&self, node: &Node) -> std::result::Result<(CyclotomicNumber, CyclotomicNumber), Abort> {
        let br = brauer_virtual_character(&node.0, &node.1, node.0.ring().dictionary())?;
        Ok((br.value, ordinary_virtual_trace(&node.0, &node.1)))
    }

    fn record(&mut self, op: Stage, depth: usize, node: &Node, values: Option<&(CyclotomicNumber, CyclotomicNumber)>, consistent: bool, note: Option<String>) {
        let l = &node.0;
        self.stages.push(StageRecord {
            op,
            depth,
            window: [l.lo(), l.hi()],
            ranks: l.ranks().to_vec(),
            level: self.ring.level(),
            br: values.map(|v| v.0.clone()),
            tr: values.map(|v| v.1.clone()),
            consistent,
            note,
            verdict: None,
        });
    }

    fn to_current_ring(&self, node: Node) -> Node {
        if node.0.ring() == &self.ring {
            return node;
        }
        let l = convert_complex(&node.0, &self.ring);
        let g = convert_map(&node.1, &l);
        (l, g)
    }

    fn run(&mut self, node: Node, depth: usize) -> std::result::Result<(CyclotomicNumber, CyclotomicNumber), Abort> {
        let mut node = trimmed(&self.to_current_ring(node));
        let mut before = self.values(&node)?;
        loop {
            let (l, g) = node.clone();
            if l.lo() == l.hi() {
                let ok = same_value(&before.0, &before.1);
                self.record(Stage::BaseCase, depth, &node, Some(&before), ok, None);
                return Ok(before);
            }
            let mode = match self.config.strict_order {
                Some(order) => StripMode::Strict { order },
                None => StripMode::General,
            };
            let s = strip_top_acyclic(&l, Some(&g), mode).map_err(|e| self.abort(Stage::Strip, e.to_string(), None))?;
            let moved = transport_along_strip(&s, &g);
            let next: Node = (s.complex.clone(), moved.gamma.clone());
            let after = self.values(&next)?;
            let invariant = same_value(&after.0, &before.0) && same_value(&after.1, &before.1);
            self.record(Stage::Strip, depth, &next, Some(&after), invariant, Some(format!("removed rank {}", s.removed)));
            let witness = check_transport(&s.projection, &g, &moved);
            self.record(Stage::Transport, depth, &next, Some(&after), witness && invariant, None);
            node = trimmed(&next);
            before = after;
            if node.0.hi() < l.hi() || node.0.lo() == node.0.hi() {
                continue;
            }
            break;
        }

        let filt = loop {
            let top = node.1.component(node.0.hi());
            match build_stable_filtration(&self.ring, &top).map_err(|e| self.abort(Stage::Filter, e.to_string(), None))? {
                FiltrationOutcome::Ready(f) => break f,
                FiltrationOutcome::NeedsExtension(req) => {
                    let target = match req.level {
                        Some(level) if req.degree <= self.config.extension_degree_bound && level <= self.config.max_level => level,
                        _ => {
                            let reason = format!("characteristic polynomial has a factor of degree {} outside the cyclotomic tower", req.degree);
                            return Err(self.abort(Stage::Extend, reason, Some(req)));
                        }
                    };
                    self.ring = self.ring.refine(nt::lcm(target, self.ring.level()))?;
                    node = self.to_current_ring(node);
                    let after = self.values(&node)?;
                    let ok = same_value(&after.0, &before.0) && same_value(&after.1, &before.1);
                    self.record(Stage::Extend, depth, &node, Some(&after), ok, Some(format!("factor of degree {}", req.degree)));
                }
            }
        };
        let top = node.1.component(node.0.hi());
        let stable = filt.check(&self.ring, &top);
        self.record(Stage::Filter, depth, &node, Some(&before), stable, Some(format!("ξ = ζ^{:?}", filt.exponents)));

        let corr = homotopy_correction(&node.0, &node.1, &filt).map_err(|e| self.abort(Stage::Correct, e.to_string(), None))?;
        let corrected: Node = (node.0.clone(), corr.gamma.clone());
        let after = self.values(&corrected)?;
        let ok = same_value(&after.0, &before.0)
            && same_value(&after.1, &before.1)
            && is_teichmuller_triangular(&self.ring, &corr.gamma.component(node.0.hi()), &filt)
            && corr.gamma.sub(&node.1) == corr.homotopy.boundary();
        self.record(Stage::Correct, depth, &corrected, Some(&after), ok, None);

        let (l, g) = corrected;
        let m = l.hi();
        let l1 = Arc::new(PerfectComplex::concentrated(self.ring.clone(), m, l.rank(m)));
        let g1 = ChainMap::from_fn(l1.clone(), l1.clone(), |_| g.component(m)).map_err(Abort::from)?;
        let lq = Arc::new(
            PerfectComplex::new_unchecked(self.ring.clone(), l.lo(), l.ranks()[..l.ranks().len() - 1].to_vec(), l.differentials()[..l.differentials().len() - 1].to_vec())
                .map_err(Abort::from)?,
        );
        let gq = ChainMap::from_fn(lq.clone(), lq.clone(), |i| g.component(i)).map_err(Abort::from)?;
        let whole = (l.clone(), g.clone());
        let parts = (self.values(&(l1.clone(), g1.clone()))?, self.values(&(lq.clone(), gq.clone()))?);
        let additive = same_value(&common_add(&parts.0 .0, &parts.1 .0), &after.0) && same_value(&common_add(&parts.0 .1, &parts.1 .1), &after.1);
        self.record(Stage::Split, depth, &whole, Some(&after), additive && gq.check().is_ok(), None);

        let first = self.run((l1, g1), depth + 1)?;
        let qnode = (lq, gq);
        self.record(Stage::Recurse, depth, &qnode, Some(&parts.1), true, None);
        let second = self.run(qnode, depth + 1)?;
        Ok((common_add(&first.0, &second.0), common_add(&first.1, &second.1)))
    }

    fn abort(&mut self, stage: Stage, reason: String, extension: Option<ExtensionRequest>) -> Abort {
        Abort(TraceAbort { stage, reason, extension })
    }
}

/// Least level holding the residue eigenvalues on cohomology and the strict order.
pub fn initial_level(l: &PerfectComplex<ScalarContext>, gamma: &ChainMap<ScalarContext>, strict_order: Option<u64>, max: u64) -> Result<u64> {
    let mut level = strict_order.unwrap_or(1);
    let (k, coh) = residue_cohomology(l, Some(gamma));
    for h in coh.iter().filter(|h| h.dim > 0) {
        let cp = characteristic_polynomial(&k, h.induced.as_ref().unwrap());
        let n = unity_level(&k, &cp, max).ok_or(Error::DictionaryTooSmall { needed: max + 1, max })?;
        level = nt::lcm(level, n);
    }
    if level > max {
        return Err(Error::DictionaryTooSmall { needed: level, max });
    }
    Ok(level)
}

/// Replay the inductive argument on (L, γ) and assemble (Br, Tr) from base cases.
pub fn split_top_and_recurse(l: &Arc<PerfectComplex<ScalarContext>>, gamma: &ChainMap<ScalarContext>, config: TraceConfig) -> Result<TraceTranscript> {
    gamma.check()?;
    let ctx = l.ring();
    let mut config = config;
    if let Some(n) = config.strict_order {
        let id = ChainMap::identity(l);
        let power = (0..n).fold(id.clone(), |acc, _| acc.compose(gamma));
        if n % ctx.p() == 0 || power != id {
            config.strict_order = None;
        }
    }
    let mut transcript = TraceTranscript { stages: Vec::new(), verdict: None, br: None, tr: None, direct: None, abort: None };
    match prime_to_p_on_cohomology(l, gamma) {
        Ok(true) => {}
        Ok(false) => {
            transcript.abort = Some(TraceAbort { stage: Stage::Abort, reason: "γ is not certified prime to p on cohomology".into(), extension: None });
            return Ok(transcript);
        }
        Err(e) => {
            transcript.abort = Some(TraceAbort { stage: Stage::Abort, reason: e.to_string(), extension: None });
            return Ok(transcript);
        }
    }
    let level = initial_level(l, gamma, config.strict_order, config.max_level)?;
    let ring = CyclotomicLocal::new(ctx, level)?;
    let lc = convert_complex(l, &ring);
    let gc = convert_map(gamma, &lc);
    let mut driver = Driver { config, ring, stages: Vec::new() };
    let result = driver.run((lc.clone(), gc.clone()), 0);
    let final_ring = driver.ring.clone();
    transcript.stages = driver.stages;
    match result {
        Ok((br, tr)) => {
            let lf = convert_complex(l, &final_ring);
            let gf = convert_map(gamma, &lf);
            let direct_br = brauer_virtual_character(&lf, &gf, final_ring.dictionary())?.value;
            let direct_tr = ordinary_virtual_trace(&lf, &gf);
            let verdict = if same_value(&br, &tr) { Verdict::Equal } else { Verdict::Unequal };
            let agrees = same_value(&br, &direct_br) && same_value(&tr, &direct_tr);
            transcript.stages.push(StageRecord {
                op: Stage::Verdict,
                depth: 0,
                window: [l.lo(), l.hi()],
                ranks: l.ranks().to_vec(),
                level: final_ring.level(),
                br: Some(br.clone()),
                tr: Some(tr.clone()),
                consistent: agrees,
                note: None,
                verdict: Some(verdict),
            });
            transcript.verdict = Some(verdict);
            transcript.br = Some(br);
            transcript.tr = Some(tr);
            transcript.direct = Some((direct_br, direct_tr));
        }
        Err(Abort(a)) => transcript.abort = Some(a),
    }
    Ok(transcript)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(p: u64) -> Arc<PerfectComplex<ScalarContext>> {
        let c = ScalarContext::new(p).unwrap();
        let d = Matrix::from_rows(vec![vec![c.from_int(p as i64)]], 1).unwrap();
        Arc::new(PerfectComplex::new(c, 0, vec![1, 1], vec![d]).unwrap())
    }

    #[test]
    fn e1_identity() {
        let l = e1(5);
        let g = ChainMap::identity(&l);
        let t = split_top_and_recurse(&l, &g, TraceConfig::default()).unwrap();
        assert!(t.completed(), "{:?}", t.abort);
        assert!(t.bookkeeping_holds());
        assert_eq!(t.verdict, Some(Verdict::Equal));
        let zero = CyclotomicField::new(1).zero();
        assert_eq!(t.br.as_ref().unwrap(), &zero);
        let ops: Vec<Stage> = t.stages.iter().map(|s| s.op).collect();
        assert_eq!(
            ops,
            vec![Stage::Strip, Stage::Transport, Stage::Filter, Stage::Correct, Stage::Split, Stage::BaseCase, Stage::Recurse, Stage::BaseCase, Stage::Verdict]
        );
    }

    #[test]
    fn degree_zero_is_a_single_base_case() {
        let c = ScalarContext::new(5).unwrap();
        let l = Arc::new(PerfectComplex::concentrated(c.clone(), 0, 2));
        let g = ChainMap::from_fn(l.clone(), l.clone(), |_| {
            Matrix::from_rows(vec![vec![c.from_int(0), c.from_int(-1)], vec![c.from_int(1), c.from_int(-1)]], 2).unwrap()
        })
        .unwrap();
        let t = split_top_and_recurse(&l, &g, TraceConfig { strict_order: Some(3), ..TraceConfig::default() }).unwrap();
        assert!(t.completed());
        assert_eq!(t.stages.iter().filter(|s| s.op == Stage::BaseCase).count(), 1);
    }
}
