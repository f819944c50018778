//! The weakly constrained codebook: admissible typical prefixes from a root
//! vertex, closed back to the root by the lexicographically first Eulerian
//! path of the residual multigraph.
//!
//! The weak constraint here is zero-tolerance: every codeword's edge counts
//! equal the n-integral chain's counts exactly. Typicality of the prefix is
//! judged against the parent chain's exact rational probabilities, so band
//! membership is an integer comparison, never a float one.

use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::graph::{lex_first_eulerian_path, GraphError, LabeledGraph, Multigraph};
use crate::markov::IntegralChain;
use crate::{rational_to_f64, Rational};

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("invalid pool spec: {0}")]
    InvalidSpec(String),
    #[error("walk must start at the root vertex")]
    WrongStart,
    #[error("walk has length {got}, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("edge {edge} does not continue the walk")]
    BrokenWalk { edge: usize },
    #[error("enumeration limit {limit} exceeded ({found} codewords found so far)")]
    LimitExceeded { limit: usize, found: usize },
    #[error("sampling budget of {budget} attempts exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("prefix is not admissible")]
    NotAdmissible,
    #[error("internal consistency failure: {0}")]
    Internal(#[from] GraphError),
}

/// Construction parameters for one pool.
#[derive(Debug, Clone)]
pub struct PoolSpec {
    ichain: IntegralChain,
    alpha: Rational,
    zeta: Rational,
    v_root: usize,
    n_prime: usize,
}

impl PoolSpec {
    /// Validate `0 < α < 1`, `0 < ζ < ((1-α)/α) P_min`, and positive root
    /// mass.
    pub fn new(
        ichain: IntegralChain,
        alpha: Rational,
        zeta: Rational,
        v_root: usize,
    ) -> Result<Self, PoolError> {
        if !alpha.is_positive() || alpha >= Rational::one() {
            return Err(PoolError::InvalidSpec(format!(
                "alpha = {alpha} must lie in (0, 1)"
            )));
        }
        let p_min = ichain.parent().p_min();
        if !p_min.is_positive() {
            return Err(PoolError::InvalidSpec("chain must have full support".into()));
        }
        let cap = (Rational::one() - &alpha) / &alpha * &p_min;
        if !zeta.is_positive() || zeta >= cap {
            return Err(PoolError::InvalidSpec(format!(
                "zeta = {zeta} must lie in (0, {cap})"
            )));
        }
        if v_root >= ichain.parent().graph().vertex_count()
            || !ichain.parent().stationary_distribution()[v_root].is_positive()
        {
            return Err(PoolError::InvalidSpec(
                "root vertex must carry positive stationary mass".into(),
            ));
        }
        let n = Rational::new((ichain.n() as i64).into(), 1.into());
        let n_prime = num_traits::ToPrimitive::to_usize(&(&alpha * n).floor().to_integer())
            .ok_or_else(|| PoolError::InvalidSpec("n' overflow".into()))?;
        if n_prime == 0 {
            return Err(PoolError::InvalidSpec("alpha * n rounds to zero".into()));
        }
        Ok(PoolSpec {
            ichain,
            alpha,
            zeta,
            v_root,
            n_prime,
        })
    }

    pub fn graph(&self) -> &LabeledGraph {
        self.ichain.parent().graph()
    }

    pub fn chain(&self) -> &crate::markov::MarkovChain {
        self.ichain.parent()
    }

    pub fn ichain(&self) -> &IntegralChain {
        &self.ichain
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn zeta(&self) -> &Rational {
        &self.zeta
    }

    pub fn v_root(&self) -> usize {
        self.v_root
    }

    pub fn n(&self) -> u64 {
        self.ichain.n()
    }

    /// Prefix length `n' = ⌊αn⌋`.
    pub fn n_prime(&self) -> usize {
        self.n_prime
    }
}

/// A walk in the base graph: a start vertex and a chained edge sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    start: usize,
    edge_ids: Vec<usize>,
    counts: Vec<u64>,
    end: usize,
}

impl Walk {
    pub fn new(graph: &LabeledGraph, start: usize, edge_ids: Vec<usize>) -> Result<Self, PoolError> {
        let mut current = start;
        let mut counts = vec![0u64; graph.edge_count()];
        for &id in &edge_ids {
            let e = graph
                .edges()
                .get(id)
                .ok_or(PoolError::BrokenWalk { edge: id })?;
            if e.src != current {
                return Err(PoolError::BrokenWalk { edge: id });
            }
            counts[id] += 1;
            current = e.dst;
        }
        Ok(Walk {
            start,
            edge_ids,
            counts,
            end: current,
        })
    }

    /// Parse a walk from its label sequence; determinism makes the edge path
    /// unique given the start vertex.
    pub fn from_labels(
        graph: &LabeledGraph,
        start: usize,
        labels: &[usize],
    ) -> Result<Self, PoolError> {
        let mut edge_ids = Vec::with_capacity(labels.len());
        let mut current = start;
        for (pos, &label) in labels.iter().enumerate() {
            let id = graph
                .out_edges(current)
                .find(|&id| graph.edges()[id].label == label)
                .ok_or(PoolError::BrokenWalk { edge: pos })?;
            edge_ids.push(id);
            current = graph.edges()[id].dst;
        }
        Walk::new(graph, start, edge_ids)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    /// Per-edge traversal counts `S(e)`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn labels(&self, graph: &LabeledGraph) -> Vec<usize> {
        self.edge_ids
            .iter()
            .map(|&id| graph.edges()[id].label)
            .collect()
    }

    /// Exact generation probability under the chain's random-walk measure
    /// (product of conditional edge probabilities).
    pub fn probability(&self, chain: &crate::markov::MarkovChain) -> Rational {
        self.edge_ids
            .iter()
            .map(|&id| chain.edge_cond_prob(id))
            .product()
    }
}

/// One codebook entry: the full length-n label sequence, its edge path, and
/// where the prefix ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    labels: Vec<usize>,
    path: Vec<usize>,
    prefix_len: usize,
    root: usize,
}

impl Codeword {
    /// Reassemble a codeword from its label sequence (e.g. parsed back from
    /// a codebook file); determinism recovers the unique edge path.
    pub fn from_labels(
        graph: &LabeledGraph,
        root: usize,
        labels: &[usize],
        prefix_len: usize,
    ) -> Result<Self, PoolError> {
        let walk = Walk::from_labels(graph, root, labels)?;
        if walk.end() != root || prefix_len > labels.len() {
            return Err(PoolError::BrokenWalk { edge: labels.len() });
        }
        Ok(Codeword {
            labels: labels.to_vec(),
            path: walk.edge_ids().to_vec(),
            prefix_len,
            root,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn prefix_labels(&self) -> &[usize] {
        &self.labels[..self.prefix_len]
    }

    pub fn prefix_path(&self) -> &[usize] {
        &self.path[..self.prefix_len]
    }
}

/// Admissibility verdict with diagnostics.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    /// Edges whose empirical frequency leaves the ζ band.
    pub violations: Vec<usize>,
    /// Residual multiplicities `R(e) = m(e) - S(e)`.
    pub residual: Vec<i64>,
}

/// Whether `w` is a ζ-typical prefix: `|S(e)/n' - P(e)| < ζ` for every edge,
/// strict, with `P` taken from the parent rational chain.
pub fn is_admissible_prefix(w: &Walk, spec: &PoolSpec) -> Result<Admissibility, PoolError> {
    if w.start() != spec.v_root() {
        return Err(PoolError::WrongStart);
    }
    if w.len() != spec.n_prime() {
        return Err(PoolError::WrongLength {
            got: w.len(),
            want: spec.n_prime(),
        });
    }
    let n_prime = Rational::new((spec.n_prime() as i64).into(), 1.into());
    let mut violations = Vec::new();
    for (id, p) in spec.chain().edge_probs().iter().enumerate() {
        let freq = Rational::new((w.counts()[id] as i64).into(), 1.into()) / &n_prime;
        if (freq - p).abs() >= *spec.zeta() {
            violations.push(id);
        }
    }
    let residual: Vec<i64> = spec
        .ichain()
        .counts()
        .iter()
        .zip(w.counts())
        .map(|(&m, &s)| m as i64 - s as i64)
        .collect();
    Ok(Admissibility {
        admissible: violations.is_empty(),
        violations,
        residual,
    })
}

/// Deterministic completion Φ: close an admissible prefix into a codeword by
/// the lexicographically first Eulerian path of the residual multigraph from
/// the prefix end back to the root.
pub fn complete_prefix(w: &Walk, spec: &PoolSpec) -> Result<Codeword, PoolError> {
    let adm = is_admissible_prefix(w, spec)?;
    if !adm.admissible {
        return Err(PoolError::NotAdmissible);
    }
    let g = spec.graph();
    let residual: Vec<u64> = adm
        .residual
        .iter()
        .map(|&r| {
            debug_assert!(r > 0, "feasibility condition guarantees R(e) > 0");
            r as u64
        })
        .collect();
    let m = Multigraph::new(g.clone(), residual);
    let completion = lex_first_eulerian_path(&m, w.end(), spec.v_root())?;
    let mut path = w.edge_ids().to_vec();
    path.extend_from_slice(&completion);
    let labels = path.iter().map(|&id| g.edges()[id].label).collect();
    Ok(Codeword {
        labels,
        path,
        prefix_len: spec.n_prime(),
        root: spec.v_root(),
    })
}

/// Zero-tolerance membership test: edge counts equal `m(e)` exactly and the
/// path is a closed root cycle.
pub fn verify_weak_constraint(c: &Codeword, ichain: &IntegralChain) -> bool {
    let g = ichain.parent().graph();
    if c.path.len() as u64 != ichain.n() {
        return false;
    }
    let mut current = c.root;
    let mut counts = vec![0u64; g.edge_count()];
    for &id in &c.path {
        let Some(e) = g.edges().get(id) else {
            return false;
        };
        if e.src != current {
            return false;
        }
        counts[id] += 1;
        current = e.dst;
    }
    current == c.root && counts == ichain.counts()
}

/// Enumerate the whole pool in prefix-label lexicographic order.
///
/// Depth-first over length-n' walks from the root in edge order, pruning
/// branches whose counts already exceed the upper typicality band or can no
/// longer reach the lower one.
pub fn enumerate_pool(spec: &PoolSpec, limit: usize) -> Result<Vec<Codeword>, PoolError> {
    let g = spec.graph();
    let n_prime = spec.n_prime();
    let np = Rational::new((n_prime as i64).into(), 1.into());

    // per-edge integral count bands implied by the strict ζ band:
    // lower < S(e) < upper  with  lower = n'(P(e) - ζ), upper = n'(P(e) + ζ)
    let mut min_count = vec![0u64; g.edge_count()];
    let mut max_count = vec![0u64; g.edge_count()];
    for (id, p) in spec.chain().edge_probs().iter().enumerate() {
        let lower = &np * &(p - spec.zeta());
        let upper = &np * &(p + spec.zeta());
        min_count[id] = strict_floor_plus_one(&lower);
        max_count[id] = strict_ceil_minus_one(&upper);
        if min_count[id] > max_count[id] {
            return Ok(Vec::new()); // infeasible band
        }
    }

    let mut out = Vec::new();
    let mut walk: Vec<usize> = Vec::with_capacity(n_prime);
    let mut counts = vec![0u64; g.edge_count()];
    let deficit: u64 = min_count.iter().sum();
    dfs_enumerate(
        spec,
        g,
        spec.v_root(),
        n_prime,
        &min_count,
        &max_count,
        deficit,
        &mut walk,
        &mut counts,
        &mut out,
        limit,
    )?;
    out.sort_by(|a, b| a.prefix_labels().cmp(b.prefix_labels()));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_enumerate(
    spec: &PoolSpec,
    g: &LabeledGraph,
    current: usize,
    remaining: usize,
    min_count: &[u64],
    max_count: &[u64],
    deficit: u64,
    walk: &mut Vec<usize>,
    counts: &mut Vec<u64>,
    out: &mut Vec<Codeword>,
    limit: usize,
) -> Result<(), PoolError> {
    if deficit > remaining as u64 {
        return Ok(()); // cannot reach the lower band anymore
    }
    if remaining == 0 {
        let w = Walk::new(g, spec.v_root(), walk.clone())?;
        let adm = is_admissible_prefix(&w, spec)?;
        if adm.admissible {
            if out.len() >= limit {
                return Err(PoolError::LimitExceeded {
                    limit,
                    found: out.len(),
                });
            }
            out.push(complete_prefix(&w, spec)?);
        }
        return Ok(());
    }
    let mut candidates: Vec<usize> = g.out_edges(current).collect();
    candidates.sort_by_key(|&id| g.edge_order_key(id));
    for id in candidates {
        if counts[id] + 1 > max_count[id] {
            continue;
        }
        let fills_deficit = counts[id] < min_count[id];
        counts[id] += 1;
        walk.push(id);
        dfs_enumerate(
            spec,
            g,
            g.edges()[id].dst,
            remaining - 1,
            min_count,
            max_count,
            deficit - if fills_deficit { 1 } else { 0 },
            walk,
            counts,
            out,
            limit,
        )?;
        walk.pop();
        counts[id] -= 1;
    }
    Ok(())
}

/// Smallest integer strictly greater than `x`, clamped at 0.
fn strict_floor_plus_one(x: &Rational) -> u64 {
    use num_traits::ToPrimitive;
    let f = x.floor();
    let candidate: crate::Int = if &f == x {
        x.to_integer() + 1
    } else {
        f.to_integer() + 1
    };
    candidate.max(0.into()).to_u64().unwrap_or(0)
}

/// Largest integer strictly smaller than `x`, clamped at 0.
fn strict_ceil_minus_one(x: &Rational) -> u64 {
    use num_traits::ToPrimitive;
    let c = x.ceil();
    let candidate: crate::Int = if &c == x {
        x.to_integer() - 1
    } else {
        c.to_integer() - 1
    };
    candidate.max(0.into()).to_u64().unwrap_or(0)
}

/// Default rejection-sampling attempt budget.
pub const SAMPLE_BUDGET: u64 = 1_000_000;

/// Draw one codeword by seeded rejection sampling of the prefix random walk.
/// Identical seed, identical codeword. The attempts counter is an empirical
/// proxy for `1 - P(C_pool)`.
pub fn sample_codeword(spec: &PoolSpec, seed: u64) -> Result<(Codeword, u64), PoolError> {
    sample_codeword_budget(spec, seed, SAMPLE_BUDGET)
}

pub fn sample_codeword_budget(
    spec: &PoolSpec,
    seed: u64,
    budget: u64,
) -> Result<(Codeword, u64), PoolError> {
    let g = spec.graph();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for attempt in 1..=budget {
        let w = random_prefix(spec, g, &mut rng);
        let adm = is_admissible_prefix(&w, spec)?;
        if adm.admissible {
            let c = complete_prefix(&w, spec)?;
            return Ok((c, attempt - 1));
        }
    }
    Err(PoolError::BudgetExhausted { budget })
}

/// One length-n' random walk from the root under `p(·|·)`.
pub(crate) fn random_prefix(spec: &PoolSpec, g: &LabeledGraph, rng: &mut impl Rng) -> Walk {
    let chain = spec.chain();
    let mut current = spec.v_root();
    let mut edge_ids = Vec::with_capacity(spec.n_prime());
    for _ in 0..spec.n_prime() {
        let mut candidates: Vec<usize> = g.out_edges(current).collect();
        candidates.sort_unstable();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = *candidates.last().expect("full support implies out-edges");
        for &id in &candidates {
            acc += rational_to_f64(&chain.edge_cond_prob(id));
            if u < acc {
                chosen = id;
                break;
            }
        }
        edge_ids.push(chosen);
        current = g.edges()[chosen].dst;
    }
    Walk::new(g, spec.v_root(), edge_ids).expect("walk built edge by edge")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::markov::{maxentropic_chain, quantize_n_integral, MarkovChain};

    const FB: &str = "alphabet 0 1\nvertex v\nedge v v 0\nedge v v 1\n";
    const GM: &str = "alphabet 0 1\nvertex a\nvertex b\nedge a a 0\nedge a b 1\nedge b a 0\n";
    const DB2: &str = "alphabet 0 1\nvertex 0\nvertex 1\n\
        edge 0 0 0\nedge 0 1 1\nedge 1 0 0\nedge 1 1 1\n";

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    pub(crate) fn db2_n8_spec() -> PoolSpec {
        let chain = MarkovChain::uniform(parse_graph(DB2).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 8).unwrap();
        PoolSpec::new(ic, r(1, 2), r(1, 5), 0).unwrap()
    }

    fn fb_n4_spec() -> PoolSpec {
        let chain = MarkovChain::uniform(parse_graph(FB).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 4).unwrap();
        PoolSpec::new(ic, r(1, 2), r(1, 4), 0).unwrap()
    }

    #[test]
    fn spec_rejects_zeta_out_of_range() {
        let chain = MarkovChain::uniform(parse_graph(DB2).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 8).unwrap();
        // cap is ((1-1/2)/(1/2)) * 1/4 = 1/4
        assert!(PoolSpec::new(ic.clone(), r(1, 2), r(1, 4), 0).is_err());
        assert!(PoolSpec::new(ic, r(1, 2), r(1, 5), 0).is_ok());
    }

    #[test]
    fn admissible_prefix_db2() {
        let spec = db2_n8_spec();
        let g = spec.graph().clone();
        // each edge once: 0 ->0 ->1 ->1 ->0 via labels 0,1,1,0
        let w = Walk::from_labels(&g, 0, &[0, 1, 1, 0]).unwrap();
        let adm = is_admissible_prefix(&w, &spec).unwrap();
        assert!(adm.admissible);
        assert_eq!(adm.residual, vec![1, 1, 1, 1]);
    }

    #[test]
    fn maximal_violation_rejected() {
        let spec = db2_n8_spec();
        let g = spec.graph().clone();
        let w = Walk::from_labels(&g, 0, &[0, 0, 0, 0]).unwrap();
        let adm = is_admissible_prefix(&w, &spec).unwrap();
        assert!(!adm.admissible);
        assert!(adm.violations.contains(&0));
    }

    #[test]
    fn completion_db2() {
        let spec = db2_n8_spec();
        let g = spec.graph().clone();
        let w = Walk::from_labels(&g, 0, &[0, 1, 1, 0]).unwrap();
        let c = complete_prefix(&w, &spec).unwrap();
        assert_eq!(c.labels(), &[0, 1, 1, 0, 0, 1, 1, 0]);
        let w2 = Walk::from_labels(&g, 0, &[1, 1, 0, 0]).unwrap();
        let c2 = complete_prefix(&w2, &spec).unwrap();
        assert_eq!(c2.labels(), &[1, 1, 0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn completion_single_loop() {
        let text = "alphabet 0\nvertex v\nedge v v 0\n";
        let chain = MarkovChain::uniform(parse_graph(text).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 5).unwrap();
        let spec = PoolSpec::new(ic, r(2, 5), r(1, 2), 0).unwrap();
        let g = spec.graph().clone();
        let w = Walk::from_labels(&g, 0, &[0, 0]).unwrap();
        let c = complete_prefix(&w, &spec).unwrap();
        assert_eq!(c.labels(), &[0; 5]);
    }

    #[test]
    fn pool_census_db2() {
        let spec = db2_n8_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        assert_eq!(pool.len(), 2);
        assert_eq!(pool[0].labels(), &[0, 1, 1, 0, 0, 1, 1, 0]);
        assert_eq!(pool[1].labels(), &[1, 1, 0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn pool_census_matches_brute_force_db2() {
        let spec = db2_n8_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        let brute = brute_force_pool(&spec);
        assert_eq!(
            pool.iter().map(|c| c.labels().to_vec()).collect::<Vec<_>>(),
            brute
        );
    }

    #[test]
    fn pool_census_fb() {
        let spec = fb_n4_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        assert_eq!(pool.len(), 2);
        let labels: Vec<Vec<usize>> = pool.iter().map(|c| c.labels().to_vec()).collect();
        assert_eq!(labels[0][..2], [0, 1]);
        assert_eq!(labels[1][..2], [1, 0]);
        assert_eq!(brute_force_pool(&spec), labels);
    }

    /// Brute force over all length-n' walks; the independent census oracle.
    pub(crate) fn brute_force_pool(spec: &PoolSpec) -> Vec<Vec<usize>> {
        let g = spec.graph();
        let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..spec.n_prime() {
            let mut next = Vec::new();
            for p in &prefixes {
                let end = p.iter().fold(spec.v_root(), |v, &id| {
                    let _ = v;
                    g.edges()[id].dst
                });
                let end = if p.is_empty() { spec.v_root() } else { end };
                for id in g.out_edges(end) {
                    let mut q = p.clone();
                    q.push(id);
                    next.push(q);
                }
            }
            prefixes = next;
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for p in prefixes {
            let w = Walk::new(g, spec.v_root(), p).unwrap();
            let adm = is_admissible_prefix(&w, spec).unwrap();
            if adm.admissible {
                let c = complete_prefix(&w, spec).unwrap();
                out.push(c.labels().to_vec());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn empty_pool_when_band_infeasible() {
        // GM maxentropic, tiny zeta at small n': no integer vector inside
        let g = parse_graph(GM).unwrap();
        let (chain, _) = maxentropic_chain(&g).unwrap();
        let ic = quantize_n_integral(&chain, 10).unwrap();
        let spec = PoolSpec::new(ic, r(1, 2), r(1, 100), 0).unwrap();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        assert!(pool.is_empty());
    }

    #[test]
    fn every_codeword_satisfies_weak_constraint() {
        for spec in [db2_n8_spec(), fb_n4_spec()] {
            for c in enumerate_pool(&spec, 1000).unwrap() {
                assert!(verify_weak_constraint(&c, spec.ichain()));
            }
        }
    }

    #[test]
    fn tampered_codeword_fails_verification() {
        let spec = db2_n8_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        let mut c = pool[0].clone();
        // swap two path positions with different edges
        let i = (0..c.path.len())
            .find(|&i| c.path[i] != c.path[(i + 1) % c.path.len()])
            .unwrap();
        c.path.swap(i, i + 1);
        assert!(!verify_weak_constraint(&c, spec.ichain()));
    }

    #[test]
    fn injectivity_on_fixtures() {
        for spec in [db2_n8_spec(), fb_n4_spec()] {
            let pool = enumerate_pool(&spec, 1000).unwrap();
            for i in 0..pool.len() {
                for j in (i + 1)..pool.len() {
                    assert_ne!(pool[i].labels(), pool[j].labels());
                    assert_ne!(pool[i].prefix_labels(), pool[j].prefix_labels());
                }
            }
        }
    }

    #[test]
    fn prefix_dominance_on_fixtures() {
        for spec in [db2_n8_spec(), fb_n4_spec()] {
            let pool = enumerate_pool(&spec, 1000).unwrap();
            for i in 0..pool.len() {
                for j in (i + 1)..pool.len() {
                    let d_full = hamming(pool[i].labels(), pool[j].labels());
                    let d_pref = hamming(pool[i].prefix_labels(), pool[j].prefix_labels());
                    assert!(d_full >= d_pref);
                }
            }
        }
    }

    fn hamming(a: &[usize], b: &[usize]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let spec = db2_n8_spec();
        let (c1, _) = sample_codeword(&spec, 42).unwrap();
        let (c2, _) = sample_codeword(&spec, 42).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn samples_land_in_enumerated_pool() {
        let spec = db2_n8_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        for seed in 0..50 {
            let (c, _) = sample_codeword(&spec, seed).unwrap();
            assert!(pool.iter().any(|p| p == &c));
        }
    }

    #[test]
    fn deterministic_chain_sampling_never_rejects() {
        let text = "alphabet 0\nvertex v\nedge v v 0\n";
        let chain = MarkovChain::uniform(parse_graph(text).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 5).unwrap();
        let spec = PoolSpec::new(ic, r(2, 5), r(1, 2), 0).unwrap();
        let (c, rejects) = sample_codeword(&spec, 7).unwrap();
        assert_eq!(rejects, 0);
        assert_eq!(c.labels(), &[0; 5]);
    }

    #[test]
    fn empty_pool_exhausts_budget() {
        let g = parse_graph(GM).unwrap();
        let (chain, _) = maxentropic_chain(&g).unwrap();
        let ic = quantize_n_integral(&chain, 10).unwrap();
        let spec = PoolSpec::new(ic, r(1, 2), r(1, 100), 0).unwrap();
        assert!(matches!(
            sample_codeword_budget(&spec, 0, 500),
            Err(PoolError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn sampling_frequencies_match_conditional_measure() {
        // 10^4 seeded samples on DB2 n=8: empirical codeword frequencies
        // within 3 standard errors of P(w)/P(W)
        let spec = db2_n8_spec();
        let pool = enumerate_pool(&spec, 1000).unwrap();
        let chain = spec.chain();
        let g = spec.graph();
        let probs: Vec<f64> = pool
            .iter()
            .map(|c| {
                let w = Walk::new(g, 0, c.prefix_path().to_vec()).unwrap();
                rational_to_f64(&w.probability(chain))
            })
            .collect();
        let total: f64 = probs.iter().sum();
        let trials = 10_000u64;
        let mut counts = vec![0u64; pool.len()];
        for seed in 0..trials {
            let (c, _) = sample_codeword(&spec, seed).unwrap();
            let idx = pool.iter().position(|p| p == &c).unwrap();
            counts[idx] += 1;
        }
        for (i, &cnt) in counts.iter().enumerate() {
            let p = probs[i] / total;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            let emp = cnt as f64 / trials as f64;
            assert!(
                (emp - p).abs() <= 3.0 * se + 1e-12,
                "codeword {i}: emp {emp} vs p {p}"
            );
        }
    }

    #[test]
    fn residual_positive_for_admissible_prefixes() {
        for spec in [db2_n8_spec(), fb_n4_spec()] {
            let pool = enumerate_pool(&spec, 1000).unwrap();
            let g = spec.graph();
            for c in pool {
                let w = Walk::new(g, spec.v_root(), c.prefix_path().to_vec()).unwrap();
                let adm = is_admissible_prefix(&w, &spec).unwrap();
                assert!(adm.residual.iter().all(|&x| x >= 1));
            }
        }
    }
}
