//! Expurgation: pull a minimum-distance subcode out of an enumerated pool.
//!
//! Bad pairs are codeword pairs whose prefixes sit closer than the target
//! relative distance δ' = 1−S−ε; distances and the threshold comparison are
//! exact rationals so the strict inequality at the boundary never depends on
//! floating point.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::bounds::collision_and_distance;
use crate::pool::{Codeword, PoolSpec, Walk};
use crate::{rational_to_f64, Rational};

#[derive(Debug, Error)]
pub enum ExpurgateError {
    #[error("eps = {0} must lie strictly inside (0, 1 - S)")]
    EpsOutOfRange(String),
    #[error("codeword {index} does not match the pool spec")]
    MismatchedCodeword { index: usize },
}

/// The graph `G_pool = (C_pool, E_bad)` of prefix pairs below the distance
/// target, with generation-probability weights.
#[derive(Debug, Clone)]
pub struct BadPairGraph {
    weights: Vec<Rational>,
    edges: Vec<(usize, usize)>,
    p_e_bad: Rational,
    threshold: Rational,
}

impl BadPairGraph {
    /// Assemble from raw parts (weights and undirected index pairs); used for
    /// synthetic fixtures and by the builder below.
    pub fn from_parts(
        weights: Vec<Rational>,
        mut edges: Vec<(usize, usize)>,
        threshold: Rational,
    ) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.retain(|&(a, b)| a != b);
        let p_e_bad = edges
            .iter()
            .map(|&(a, b)| &weights[a] * &weights[b])
            .sum();
        BadPairGraph {
            weights,
            edges,
            p_e_bad,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `P(E_bad) = Σ_{(c,c') ∈ E_bad} P(c) P(c')`, exact.
    pub fn p_e_bad(&self) -> &Rational {
        &self.p_e_bad
    }

    /// The prefix relative-distance target `δ' = 1 − S − ε`.
    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }
}

fn hamming(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn check_pool(spec: &PoolSpec, pool: &[Codeword]) -> Result<(), ExpurgateError> {
    for (index, c) in pool.iter().enumerate() {
        if c.labels().len() as u64 != spec.n()
            || c.prefix_len() != spec.n_prime()
            || c.root() != spec.v_root()
        {
            return Err(ExpurgateError::MismatchedCodeword { index });
        }
    }
    Ok(())
}

/// All-pairs prefix distances against the strict threshold `δ' = 1 − S − ε`.
pub fn build_bad_pair_graph(
    spec: &PoolSpec,
    pool: &[Codeword],
    eps: &Rational,
) -> Result<BadPairGraph, ExpurgateError> {
    check_pool(spec, pool)?;
    let (_, dist) = collision_and_distance(spec.chain());
    if !(eps > &Rational::zero() && eps < &dist) {
        return Err(ExpurgateError::EpsOutOfRange(eps.to_string()));
    }
    let threshold = &dist - eps;
    let n_prime = Rational::new((spec.n_prime() as i64).into(), 1.into());
    let g = spec.graph();
    let weights: Vec<Rational> = pool
        .iter()
        .map(|c| {
            Walk::new(g, spec.v_root(), c.prefix_path().to_vec())
                .expect("pool codewords carry valid prefixes")
                .probability(spec.chain())
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..pool.len() {
        for j in (i + 1)..pool.len() {
            let d = hamming(pool[i].prefix_labels(), pool[j].prefix_labels());
            let rel = Rational::new((d as i64).into(), 1.into()) / &n_prime;
            if rel < threshold {
                edges.push((i, j));
            }
        }
    }
    Ok(BadPairGraph::from_parts(weights, edges, threshold))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpurgationMode {
    Randomized { seed: u64, z: f64 },
    Greedy,
}

/// The extracted subcode: an independent set of the bad-pair graph.
#[derive(Debug, Clone)]
pub struct ExpurgatedCode {
    kept: Vec<usize>,
    codewords: Vec<Codeword>,
    target: Rational,
    mode: ExpurgationMode,
    /// Vertices whose keep probability had to be clamped at 1.
    pub clamped: usize,
}

impl ExpurgatedCode {
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn target(&self) -> &Rational {
        &self.target
    }

    pub fn mode(&self) -> &ExpurgationMode {
        &self.mode
    }
}

/// Vertex deletion + bad-pair removal with seeded coins. Keep probability is
/// `z |C_pool| P(v)` with `z = P(C_pool) / (2 P'_fail |C_pool|)`; values above
/// 1 clamp (counted). For each surviving bad edge the smaller-weight endpoint
/// leaves, larger index on ties.
pub fn expurgate_randomized(
    g: &BadPairGraph,
    pool: &[Codeword],
    pool_mass: f64,
    p_fail_eff: f64,
    seed: u64,
) -> ExpurgatedCode {
    let z = pool_mass / (2.0 * p_fail_eff * g.len() as f64);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut alive = vec![false; g.len()];
    let mut clamped = 0usize;
    for (v, w) in g.weights().iter().enumerate() {
        let mut keep = z * g.len() as f64 * rational_to_f64(w);
        if keep > 1.0 {
            keep = 1.0;
            clamped += 1;
        }
        alive[v] = rng.gen::<f64>() < keep;
    }
    remove_bad_pairs(g, &mut alive);
    let kept: Vec<usize> = (0..g.len()).filter(|&v| alive[v]).collect();
    ExpurgatedCode {
        codewords: kept.iter().filter_map(|&v| pool.get(v).cloned()).collect(),
        kept,
        target: g.threshold().clone(),
        mode: ExpurgationMode::Randomized { seed, z },
        clamped,
    }
}

fn remove_bad_pairs(g: &BadPairGraph, alive: &mut [bool]) {
    for &(a, b) in g.edges() {
        if alive[a] && alive[b] {
            let drop = match g.weights()[a].cmp(&g.weights()[b]) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => a.max(b),
            };
            alive[drop] = false;
        }
    }
}

/// Deterministic fallback: repeatedly keep the highest-weight candidate
/// (smaller index on ties) and delete its bad neighbors.
pub fn expurgate_greedy(g: &BadPairGraph, pool: &[Codeword]) -> ExpurgatedCode {
    let kept = greedy_select(g);
    ExpurgatedCode {
        codewords: kept.iter().filter_map(|&v| pool.get(v).cloned()).collect(),
        kept,
        target: g.threshold().clone(),
        mode: ExpurgationMode::Greedy,
        clamped: 0,
    }
}

fn greedy_select(g: &BadPairGraph) -> Vec<usize> {
    let mut neighbors = vec![Vec::new(); g.len()];
    for &(a, b) in g.edges() {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Candidate,
        Kept,
        Deleted,
    }
    let mut state = vec![State::Candidate; g.len()];
    loop {
        let mut best: Option<usize> = None;
        for v in 0..g.len() {
            if state[v] != State::Candidate {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) if g.weights()[v] > g.weights()[b] => Some(v),
                keep => keep,
            };
        }
        let Some(v) = best else { break };
        state[v] = State::Kept;
        for &u in &neighbors[v] {
            if state[u] == State::Candidate {
                state[u] = State::Deleted;
            }
        }
    }
    (0..g.len()).filter(|&v| state[v] == State::Kept).collect()
}

/// Exact all-pairs minima of the code's prefix and full-length relative
/// distances; `None` means ∞ (fewer than two codewords). Asserts the
/// Theorem-2 distance guarantees.
pub fn verify_min_distance(
    code: &ExpurgatedCode,
    spec: &PoolSpec,
) -> (Option<Rational>, Option<Rational>) {
    if code.codewords().len() < 2 {
        return (None, None);
    }
    let n_prime = Rational::new((spec.n_prime() as i64).into(), 1.into());
    let n = Rational::new((spec.n() as i64).into(), 1.into());
    let mut min_prefix: Option<Rational> = None;
    let mut min_full: Option<Rational> = None;
    let cs = code.codewords();
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            let dp = hamming(cs[i].prefix_labels(), cs[j].prefix_labels());
            let df = hamming(cs[i].labels(), cs[j].labels());
            let rp = Rational::new((dp as i64).into(), 1.into()) / &n_prime;
            let rf = Rational::new((df as i64).into(), 1.into()) / &n;
            if min_prefix.as_ref().is_none_or(|m| &rp < m) {
                min_prefix = Some(rp);
            }
            if min_full.as_ref().is_none_or(|m| &rf < m) {
                min_full = Some(rf);
            }
        }
    }
    let prefix = min_prefix.unwrap();
    let full = min_full.unwrap();
    assert!(
        prefix >= *code.target(),
        "prefix distance below the expurgation target"
    );
    let full_target = &n_prime * code.target() / &n;
    assert!(full >= full_target, "full distance below the scaled target");
    (Some(prefix), Some(full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::markov::{quantize_n_integral, MarkovChain};
    use crate::pool::enumerate_pool;

    const DB2: &str = "alphabet 0 1\nvertex 0\nvertex 1\n\
        edge 0 0 0\nedge 0 1 1\nedge 1 0 0\nedge 1 1 1\n";
    const FB: &str = "alphabet 0 1\nvertex v\nedge v v 0\nedge v v 1\n";

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn db2_fixture() -> (PoolSpec, Vec<Codeword>) {
        let chain = MarkovChain::uniform(parse_graph(DB2).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 8).unwrap();
        let spec = PoolSpec::new(ic, r(1, 2), r(1, 5), 0).unwrap();
        let pool = enumerate_pool(&spec, 100).unwrap();
        (spec, pool)
    }

    fn fb_fixture() -> (PoolSpec, Vec<Codeword>) {
        let chain = MarkovChain::uniform(parse_graph(FB).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, 4).unwrap();
        let spec = PoolSpec::new(ic, r(1, 2), r(1, 4), 0).unwrap();
        let pool = enumerate_pool(&spec, 100).unwrap();
        (spec, pool)
    }

    #[test]
    fn db2_has_no_bad_pairs() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.edges().is_empty());
        assert!(g.p_e_bad().is_zero());
        assert_eq!(*g.threshold(), r(2, 5));
        // weights: each prefix has probability (1/2)^4
        assert_eq!(g.weights(), &[r(1, 16), r(1, 16)]);
    }

    #[test]
    fn strict_inequality_at_the_boundary() {
        // prefix distance is exactly 1/2; threshold 1/2 - tiny eps keeps it
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 1_000_000)).unwrap();
        assert!(g.edges().is_empty());
    }

    #[test]
    fn eps_domain_enforced() {
        let (spec, pool) = db2_fixture();
        assert!(build_bad_pair_graph(&spec, &pool, &r(0, 1)).is_err());
        assert!(build_bad_pair_graph(&spec, &pool, &r(1, 2)).is_err());
    }

    #[test]
    fn mismatched_codeword_detected() {
        let (spec, pool) = db2_fixture();
        let (_, other) = fb_fixture();
        let mut mixed = pool.clone();
        mixed.push(other[0].clone());
        assert!(matches!(
            build_bad_pair_graph(&spec, &mixed, &r(1, 10)),
            Err(ExpurgateError::MismatchedCodeword { index: 2 })
        ));
    }

    #[test]
    fn randomized_keeps_both_when_no_bad_edges() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        // keep probability 1 for both: mass and fail chosen so z|C|P(v) >= 1
        let code = expurgate_randomized(&g, &pool, 1.0 / 8.0, 1.0 / 512.0, 7);
        assert_eq!(code.kept(), &[0, 1]);
        assert_eq!(code.clamped, 2);
        verify_min_distance(&code, &spec);
    }

    #[test]
    fn randomized_is_deterministic_per_seed() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        let _ = &spec;
        let a = expurgate_randomized(&g, &pool, 0.125, 0.01, 42);
        let b = expurgate_randomized(&g, &pool, 0.125, 0.01, 42);
        assert_eq!(a.kept(), b.kept());
        assert_eq!(a.mode(), b.mode());
    }

    #[test]
    fn complete_triangle_keeps_one() {
        let g = BadPairGraph::from_parts(
            vec![r(1, 3), r(1, 3), r(1, 3)],
            vec![(0, 1), (0, 2), (1, 2)],
            r(1, 2),
        );
        let code = expurgate_randomized(&g, &[], 1.0, 0.1, 1);
        assert!(code.len() <= 1);
        // with keep probability 1 the tie-break picks index 0
        let sure = expurgate_randomized(&g, &[], 1.0, 1e-9, 1);
        assert_eq!(sure.kept(), &[0]);
    }

    #[test]
    fn greedy_path_trace() {
        let g = BadPairGraph::from_parts(
            vec![r(1, 1), r(3, 1), r(1, 1)],
            vec![(0, 1), (1, 2)],
            r(1, 2),
        );
        let code = expurgate_greedy(&g, &[]);
        assert_eq!(code.kept(), &[1]);
    }

    #[test]
    fn greedy_edgeless_keeps_all() {
        let g = BadPairGraph::from_parts(vec![r(1, 2), r(1, 3), r(1, 6)], vec![], r(1, 2));
        assert_eq!(expurgate_greedy(&g, &[]).kept(), &[0, 1, 2]);
    }

    #[test]
    fn greedy_star_both_orientations() {
        // center index 0, leaves 1..=4
        let star = vec![(0, 1), (0, 2), (0, 3), (0, 4)];
        let high_center = BadPairGraph::from_parts(
            vec![r(9, 10), r(1, 10), r(1, 10), r(1, 10), r(1, 10)],
            star.clone(),
            r(1, 2),
        );
        assert_eq!(expurgate_greedy(&high_center, &[]).kept(), &[0]);
        let low_center = BadPairGraph::from_parts(
            vec![r(1, 100), r(1, 10), r(1, 10), r(1, 10), r(1, 10)],
            star,
            r(1, 2),
        );
        assert_eq!(expurgate_greedy(&low_center, &[]).kept(), &[1, 2, 3, 4]);
    }

    #[test]
    fn outputs_are_independent_sets() {
        let g = BadPairGraph::from_parts(
            vec![r(5, 10), r(2, 10), r(2, 10), r(1, 10)],
            vec![(0, 1), (1, 2), (2, 3), (0, 3)],
            r(1, 2),
        );
        for seed in 0..50 {
            let code = expurgate_randomized(&g, &[], 1.0, 1e-6, seed);
            for &(a, b) in g.edges() {
                assert!(!(code.kept().contains(&a) && code.kept().contains(&b)));
            }
        }
        let greedy = expurgate_greedy(&g, &[]);
        for &(a, b) in g.edges() {
            assert!(!(greedy.kept().contains(&a) && greedy.kept().contains(&b)));
        }
    }

    #[test]
    fn mean_size_meets_expectation_bound() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        let mass: f64 = g.weights().iter().map(rational_to_f64).sum();
        // P'_fail satisfying the validity condition P(v) <= 2 p_fail / mass
        let p_fail = 1.0 / 128.0;
        let bound = mass * mass / (4.0 * p_fail); // = 0.5
        assert!(bound <= g.len() as f64);
        let seeds = 200u64;
        let mut total = 0usize;
        for seed in 0..seeds {
            total += expurgate_randomized(&g, &pool, mass, p_fail, seed).len();
        }
        let mean = total as f64 / seeds as f64;
        // keep prob is 1/2 per vertex here; sigma of the mean ~ sqrt(2*1/4/200)
        let sigma = (0.5 / seeds as f64).sqrt();
        assert!(mean >= bound - 3.0 * sigma, "mean {mean} bound {bound}");
        let greedy = expurgate_greedy(&g, &pool).len() as f64;
        if greedy < mean {
            eprintln!("warning: greedy size {greedy} below randomized mean {mean}");
        }
    }

    #[test]
    fn verify_distances_db2() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        let code = expurgate_greedy(&g, &pool);
        assert_eq!(code.len(), 2);
        let (prefix, full) = verify_min_distance(&code, &spec);
        assert_eq!(prefix, Some(r(1, 2)));
        assert_eq!(full, Some(r(1, 4)));
    }

    #[test]
    fn singleton_reports_infinite_distance() {
        let (spec, pool) = db2_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        let mut code = expurgate_greedy(&g, &pool);
        code.kept.truncate(1);
        code.codewords.truncate(1);
        assert_eq!(verify_min_distance(&code, &spec), (None, None));
    }

    #[test]
    fn edgeless_pool_keeps_pool_minima() {
        let (spec, pool) = fb_fixture();
        let g = build_bad_pair_graph(&spec, &pool, &r(1, 10)).unwrap();
        assert!(g.edges().is_empty());
        let code = expurgate_greedy(&g, &pool);
        assert_eq!(code.len(), pool.len());
        let (prefix, _) = verify_min_distance(&code, &spec);
        assert_eq!(prefix, Some(r(1, 1))); // prefixes 01 vs 10
    }
}
