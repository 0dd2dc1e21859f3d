//! Seeded generation of equivariant complexes.
//!
//! Every instance is a direct sum of one-degree blocks and two-term pieces
//! P → Q over integral representations of Z/n built from companion matrices
//! of Φ_d (d | n). Piece differentials are Reynolds sums Σ_k ρ_Q^{−k} M ρ_P^k,
//! optionally scaled by p^e to create torsion. General mode then conjugates
//! by random unimodular matrices and perturbs every ρ(g) by a homotopy,
//! recording the coherence witnesses.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{cyclotomic_polynomial, nt, Field, Poly, RationalField, ScalarContext};
use crate::characters::{prime_to_p_on_cohomology, ActionAssignment, GroupTable};
use crate::complexes::{ChainMap, Homotopy, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::gauss::inverse;
use crate::linalg::{companion, Matrix};

use super::format::InstanceDocument;

pub const MAX_WINDOW: usize = 5;
pub const MAX_RANK_CAP: usize = 8;

const STREAM_STRUCTURE: u64 = 1;
const STREAM_TORSION: u64 = 2;
const STREAM_PERTURBATION: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub seed: u64,
    pub p: u64,
    /// Order of the cyclic group (1 for the trivial group).
    pub n: u64,
    /// Number of degrees, starting at 0.
    pub window: usize,
    pub rank_cap: usize,
    /// Chance (per mille) that a two-term piece carries p-power torsion.
    pub torsion_per_mille: u32,
    /// Elementary conjugations per degree and nonzero homotopy entries per element (general mode).
    pub perturbation_budget: u32,
    pub mode: Mode,
}

impl GeneratorParams {
    /// Window length 1 + (seed mod 4), rank cap 6, budget 3 in general mode.
    pub fn new(seed: u64, p: u64, n: u64, mode: Mode) -> Self {
        GeneratorParams {
            seed,
            p,
            n,
            window: 1 + (seed % 4) as usize,
            rank_cap: 6,
            torsion_per_mille: 600,
            perturbation_budget: if mode == Mode::General { 3 } else { 0 },
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !nt::is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.n == 0 || self.n % self.p == 0 {
            return Err(Error::InvalidParams(format!("group order {} must be positive and prime to p = {}", self.n, self.p)));
        }
        if self.window == 0 || self.window > MAX_WINDOW {
            return Err(Error::InvalidParams(format!("window length must lie in 1..={MAX_WINDOW}")));
        }
        if self.rank_cap == 0 || self.rank_cap > MAX_RANK_CAP {
            return Err(Error::InvalidParams(format!("rank cap must lie in 1..={MAX_RANK_CAP}")));
        }
        if self.torsion_per_mille > 1000 {
            return Err(Error::InvalidParams("torsion richness is a per-mille value".into()));
        }
        Ok(())
    }
}

type Q = BigRational;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Companion matrix of Φ_d: an integral representation of Z/d of rank φ(d).
fn block(d: u64) -> Matrix<Q> {
    let q = RationalField;
    let phi = cyclotomic_polynomial(d);
    let poly = Poly::new(&q, phi.iter().map(|c| BigRational::from_integer(c.clone())).collect());
    companion(&q, &poly)
}

fn block_diag_all(blocks: &[u64]) -> Matrix<Q> {
    let q = RationalField;
    blocks.iter().fold(Matrix::zeros(&q, 0, 0), |acc, &d| Matrix::block_diag(&q, &acc, &block(d)))
}

fn rank_of(blocks: &[u64]) -> usize {
    blocks.iter().map(|&d| nt::euler_phi(d) as usize).sum()
}

/// Σ_k ρ_t^{−k} M ρ_s^k over the cyclic group of order n.
fn reynolds(m: &Matrix<Q>, rho_s: &Matrix<Q>, rho_t: &Matrix<Q>, n: u64) -> Matrix<Q> {
    let q = RationalField;
    let rho_t_inv = rho_t.pow(&q, n - 1);
    let mut acc = Matrix::zeros(&q, m.rows(), m.cols());
    let mut left = Matrix::identity(&q, m.rows());
    let mut right = Matrix::identity(&q, m.cols());
    for _ in 0..n {
        acc = acc.add(&q, &left.mul(&q, m).mul(&q, &right));
        left = left.mul(&q, &rho_t_inv);
        right = right.mul(&q, rho_s);
    }
    acc
}

fn small_int(r: &mut ChaCha8Rng) -> Q {
    BigRational::from_integer(r.gen_range(-2i64..=2).into())
}

struct Piece {
    /// degree of the source; the target sits one degree higher
    degree: usize,
    source: Vec<u64>,
    target: Vec<u64>,
    map: Matrix<Q>,
}

struct Layout {
    blocks: Vec<Vec<u64>>,
    pieces: Vec<Piece>,
}

fn pick_type(r: &mut ChaCha8Rng, divisors: &[u64], room: usize) -> Option<u64> {
    let fits: Vec<u64> = divisors.iter().copied().filter(|&d| nt::euler_phi(d) as usize <= room).collect();
    if fits.is_empty() {
        None
    } else {
        Some(fits[r.gen_range(0..fits.len())])
    }
}

fn layout(params: &GeneratorParams) -> Layout {
    let mut rs = rng(params.seed, STREAM_STRUCTURE);
    let mut rt = rng(params.seed, STREAM_TORSION);
    let q = RationalField;
    let w = params.window;
    let divisors = nt::divisors(params.n);
    let mut used = vec![0usize; w];
    let mut pieces = Vec::new();
    for deg in 0..w.saturating_sub(1) {
        let count = rs.gen_range(1..=2);
        for _ in 0..count {
            let room = (params.rank_cap - used[deg]).min(params.rank_cap - used[deg + 1]);
            let Some(d) = pick_type(&mut rs, &divisors, room) else { break };
            let phi = nt::euler_phi(d) as usize;
            let a = if 2 * phi <= params.rank_cap - used[deg] && rs.gen_bool(0.3) { 2 } else { 1 };
            let b = if 2 * phi <= params.rank_cap - used[deg + 1] && rs.gen_bool(0.3) { 2 } else { 1 };
            let source = vec![d; a];
            let target = vec![d; b];
            let (rho_s, rho_t) = (block_diag_all(&source), block_diag_all(&target));
            let mut map = Matrix::zeros(&q, rank_of(&target), rank_of(&source));
            for _ in 0..5 {
                let m = Matrix::from_fn(map.rows(), map.cols(), |_, _| small_int(&mut rs));
                map = reynolds(&m, &rho_s, &rho_t, params.n);
                if !map.is_zero(&q) {
                    break;
                }
            }
            if rt.gen_range(0..1000) < params.torsion_per_mille {
                let e = rt.gen_range(1..=2u32);
                let pe = BigRational::from_integer(num_bigint::BigInt::from(params.p).pow(e));
                map = map.scale(&q, &pe);
            }
            used[deg] += rank_of(&source);
            used[deg + 1] += rank_of(&target);
            pieces.push(Piece { degree: deg, source, target, map });
        }
    }
    let mut singles = Vec::new();
    for (deg, u) in used.iter_mut().enumerate() {
        let count = rs.gen_range(0..=1);
        for _ in 0..count {
            if let Some(d) = pick_type(&mut rs, &divisors, params.rank_cap - *u) {
                *u += nt::euler_phi(d) as usize;
                singles.push((deg, vec![d]));
            }
        }
    }
    if used.iter().all(|&u| u == 0) {
        singles.push((0, vec![1]));
    }
    let mut blocks = vec![Vec::new(); w];
    for piece in &pieces {
        blocks[piece.degree].extend(&piece.source);
        blocks[piece.degree + 1].extend(&piece.target);
    }
    for (deg, b) in &singles {
        blocks[*deg].extend(b);
    }
    Layout { blocks, pieces }
}

/// The strict action: complex, generator matrices per degree.
fn strict_data(params: &GeneratorParams) -> (Vec<usize>, Vec<Matrix<Q>>, Vec<Matrix<Q>>) {
    let q = RationalField;
    let lay = layout(params);
    let w = params.window;
    let ranks: Vec<usize> = lay.blocks.iter().map(|b| rank_of(b)).collect();
    let rho: Vec<Matrix<Q>> = lay.blocks.iter().map(|b| block_diag_all(b)).collect();
    let mut diffs: Vec<Matrix<Q>> = (1..w).map(|i| Matrix::zeros(&q, ranks[i], ranks[i - 1])).collect();
    // same order in which layout() appended the blocks
    let mut fill = vec![0usize; w];
    for piece in &lay.pieces {
        let i = piece.degree;
        let (so, to) = (fill[i], fill[i + 1]);
        for a in 0..piece.map.rows() {
            for b in 0..piece.map.cols() {
                diffs[i].set(to + a, so + b, piece.map.get(a, b).clone());
            }
        }
        fill[i] += piece.map.cols();
        fill[i + 1] += piece.map.rows();
    }
    (ranks, diffs, rho)
}

fn elementary_unimodular(r: &mut ChaCha8Rng, n: usize, steps: u32) -> Matrix<Q> {
    let q = RationalField;
    let mut u = Matrix::identity(&q, n);
    if n < 2 {
        return u;
    }
    for _ in 0..steps {
        let a = r.gen_range(0..n);
        let mut b = r.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let c = BigRational::from_integer(r.gen_range(-2i64..=2).into());
        u.add_row_multiple(&q, a, b, &c);
    }
    u
}

/// The instance document for `params`, echoing them.
pub fn generate_instance(params: &GeneratorParams) -> Result<InstanceDocument> {
    Ok(InstanceDocument { params: Some(params.clone()), action: generate_action(params)?, expected: None })
}

/// A complex with a Z/n action satisfying the prime-to-p hypothesis.
pub fn generate_action(params: &GeneratorParams) -> Result<ActionAssignment<ScalarContext>> {
    params.validate()?;
    let ctx = ScalarContext::new(params.p)?;
    let q = RationalField;
    let (ranks, mut diffs, mut rho) = strict_data(params);
    let w = params.window;
    let mut rp = rng(params.seed, STREAM_PERTURBATION);
    if params.mode == Mode::General {
        let us: Vec<Matrix<Q>> = ranks.iter().map(|&r| elementary_unimodular(&mut rp, r, params.perturbation_budget)).collect();
        let inv: Vec<Matrix<Q>> = us.iter().map(|u| inverse(&q, u).expect("unimodular")).collect();
        for i in 1..w {
            diffs[i - 1] = us[i].mul(&q, &diffs[i - 1]).mul(&q, &inv[i - 1]);
        }
        for i in 0..w {
            rho[i] = us[i].mul(&q, &rho[i]).mul(&q, &inv[i]);
        }
    }
    let complex = Arc::new(PerfectComplex::new(ctx.clone(), 0, ranks.clone(), diffs)?);
    let group = GroupTable::cyclic(params.n as usize);
    let strict: Vec<ChainMap<ScalarContext>> = (0..params.n)
        .map(|k| ChainMap::from_fn(complex.clone(), complex.clone(), |i| rho[i as usize].pow(&q, k)))
        .collect::<Result<_>>()?;
    if params.mode == Mode::Strict {
        return Ok(ActionAssignment::strict(group, complex, strict));
    }
    let budget = params.perturbation_budget;
    let t: Vec<Homotopy<ScalarContext>> = (0..params.n)
        .map(|_| {
            let mut comps: BTreeMap<i64, Matrix<Q>> = BTreeMap::new();
            for i in 1..w as i64 {
                comps.insert(i, Matrix::zeros(&q, ranks[i as usize - 1], ranks[i as usize]));
            }
            let degrees: Vec<i64> = comps.iter().filter(|(_, m)| m.rows() * m.cols() > 0).map(|(&i, _)| i).collect();
            if !degrees.is_empty() {
                for _ in 0..budget {
                    let i = degrees[rp.gen_range(0..degrees.len())];
                    let m = comps.get_mut(&i).unwrap();
                    let (a, b) = (rp.gen_range(0..m.rows()), rp.gen_range(0..m.cols()));
                    m.set(a, b, small_int(&mut rp));
                }
            }
            Homotopy::from_fn(complex.clone(), complex.clone(), |i| {
                comps.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(&q, complex.rank(i - 1), complex.rank(i)))
            })
        })
        .collect::<Result<_>>()?;
    let bounds: Vec<ChainMap<ScalarContext>> = t.iter().map(|h| h.boundary()).collect();
    let maps: Vec<ChainMap<ScalarContext>> = strict.iter().zip(&bounds).map(|(r, b)| r.add(b)).collect();
    let mut coherence = BTreeMap::new();
    let n = params.n as usize;
    for g in 0..n {
        for h in 0..n {
            let gh = group.mul(g, h);
            // ρ(g)t_h + t_g ρ(h) + t_g H_h − t_{gh}
            let w = t[h]
                .post_compose(&strict[g])
                .add(&t[g].pre_compose(&strict[h]))
                .add(&t[g].pre_compose(&bounds[h]))
                .add(&t[gh].scale(&ctx.from_int(-1)));
            coherence.insert((g, h), w);
        }
    }
    let act = ActionAssignment {
        group,
        complex: complex.clone(),
        maps,
        coherence,
        identity_homotopy: Some(t[0].clone()),
    };
    for m in &act.maps {
        if !prime_to_p_on_cohomology(&complex, m)? {
            return Err(Error::InternalInconsistency("generated action is not prime to p on cohomology".into()));
        }
    }
    Ok(act)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::check_action_coherence;
    use crate::harness::format::{decode, encode};

    #[test]
    fn deterministic_and_coherent() {
        for mode in [Mode::Strict, Mode::General] {
            for seed in 1..6 {
                let params = GeneratorParams::new(seed, 5, 6, mode);
                let a = generate_instance(&params).unwrap();
                let b = generate_instance(&params).unwrap();
                assert_eq!(encode(&a), encode(&b));
                assert_eq!(decode(&encode(&a)).unwrap(), a);
                a.complex().validate().unwrap();
                check_action_coherence(&a.action).unwrap();
                assert!(a.complex().ranks().iter().all(|&r| r <= params.rank_cap));
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(generate_instance(&GeneratorParams::new(1, 6, 1, Mode::Strict)).unwrap_err(), Error::NotPrime(6));
        assert!(generate_instance(&GeneratorParams::new(1, 3, 6, Mode::Strict)).is_err());
    }
}
