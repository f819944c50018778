//! Exact combinatorics: Whittle's formula for counting walks with a
//! prescribed transition profile, and the Stirling-corrected pool-size and
//! pool-rate lower bounds.
//!
//! The exact counts are computed with arbitrary-precision integers and exact
//! rational determinants; floating point enters only in the bound, which is a
//! sum of real-valued correction terms.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::LabeledGraph;
use crate::markov::maxentropic_chain;
use crate::pool::PoolSpec;
use crate::{rational_to_f64, Int, Rational};

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("counts vector has length {got}, expected one entry per edge ({want})")]
    BadCountVector { got: usize, want: usize },
    #[error("flow condition violated at vertex {vertex} for endpoints ({u}, {v})")]
    FlowViolated { vertex: usize, u: usize, v: usize },
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("chain assigns zero probability to edge {0}")]
    ZeroProbability(usize),
    #[error("capacity computation failed: {0}")]
    Chain(#[from] crate::markov::ChainError),
}

/// A per-edge transition-count profile over a labeled graph, with the derived
/// per-vertex exit and entry totals.
#[derive(Debug, Clone)]
pub struct TransitionCounts {
    graph: LabeledGraph,
    per_edge: Vec<u64>,
    out_total: Vec<u64>,
    in_total: Vec<u64>,
}

impl TransitionCounts {
    pub fn new(graph: LabeledGraph, per_edge: Vec<u64>) -> Result<Self, CountingError> {
        if per_edge.len() != graph.edge_count() {
            return Err(CountingError::BadCountVector {
                got: per_edge.len(),
                want: graph.edge_count(),
            });
        }
        let mut out_total = vec![0u64; graph.vertex_count()];
        let mut in_total = vec![0u64; graph.vertex_count()];
        for (id, &c) in per_edge.iter().enumerate() {
            let e = &graph.edges()[id];
            out_total[e.src] += c;
            in_total[e.dst] += c;
        }
        Ok(TransitionCounts {
            graph,
            per_edge,
            out_total,
            in_total,
        })
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn per_edge(&self) -> &[u64] {
        &self.per_edge
    }

    pub fn total(&self) -> u64 {
        self.per_edge.iter().sum()
    }

    /// Exit total `f_i·`.
    pub fn out_total(&self, i: usize) -> u64 {
        self.out_total[i]
    }

    /// Entry total `f_·i`.
    pub fn in_total(&self, i: usize) -> u64 {
        self.in_total[i]
    }

    /// Vertex-level count `f_ij` (sum over parallel edges i → j).
    pub fn vertex_count(&self, i: usize, j: usize) -> u64 {
        self.graph
            .out_edges(i)
            .filter(|&id| self.graph.edges()[id].dst == j)
            .map(|id| self.per_edge[id])
            .sum()
    }

    /// The walk-endpoint flow condition: `f_i· − f_·i = δ_iu − δ_iv`.
    pub fn flow_condition(&self, u: usize, v: usize) -> Result<(), CountingError> {
        let nv = self.graph.vertex_count();
        if u >= nv {
            return Err(CountingError::BadVertex(u));
        }
        if v >= nv {
            return Err(CountingError::BadVertex(v));
        }
        for i in 0..nv {
            let lhs = self.out_total[i] as i64 - self.in_total[i] as i64;
            let rhs = i64::from(i == u) - i64::from(i == v);
            if lhs != rhs {
                return Err(CountingError::FlowViolated { vertex: i, u, v });
            }
        }
        Ok(())
    }
}

fn factorial(n: u64) -> Int {
    let mut acc = Int::one();
    for k in 2..=n {
        acc *= Int::from(k);
    }
    acc
}

/// Exact rational determinant by Gaussian elimination with pivoting.
fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for row in (col + 1)..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &p;
            for k in col..n {
                let sub = &factor * &m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// `(v, u)`-th cofactor of a square rational matrix: signed minor with row v
/// and column u deleted.
fn cofactor(m: &[Vec<Rational>], v: usize, u: usize) -> Rational {
    let n = m.len();
    let minor: Vec<Vec<Rational>> = (0..n)
        .filter(|&r| r != v)
        .map(|r| {
            (0..n)
                .filter(|&c| c != u)
                .map(|c| m[r][c].clone())
                .collect()
        })
        .collect();
    let sign = if (v + u) % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    sign * rational_det(minor)
}

/// Build `F*` at vertex level from the counts: `f*_ij = δ_ij − f_ij/f_i·`
/// when `f_i· > 0`, `δ_ij` otherwise.
fn fstar_from_counts(tc: &TransitionCounts) -> Vec<Vec<Rational>> {
    let nv = tc.graph.vertex_count();
    (0..nv)
        .map(|i| {
            (0..nv)
                .map(|j| {
                    let diag = if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    if tc.out_total[i] == 0 {
                        diag
                    } else {
                        diag - Rational::new(
                            (tc.vertex_count(i, j) as i64).into(),
                            (tc.out_total[i] as i64).into(),
                        )
                    }
                })
                .collect()
        })
        .collect()
}

/// Multinomial prefactor `(Π_i f_i·!) / (Π_e per_edge(e)!)`, an exact
/// integer because each vertex's exit edges partition its exit total.
fn multinomial(tc: &TransitionCounts) -> Int {
    let mut num = Int::one();
    for i in 0..tc.graph.vertex_count() {
        num *= factorial(tc.out_total[i]);
    }
    let mut den = Int::one();
    for &c in &tc.per_edge {
        den *= factorial(c);
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Whittle's formula: the exact number of walks from `u` to `v` whose
/// per-edge traversal counts equal the profile.
pub fn whittle_count(tc: &TransitionCounts, u: usize, v: usize) -> Result<Int, CountingError> {
    tc.flow_condition(u, v)?;
    let value = whittle_formal(tc, u, v);
    assert!(
        value.denom().is_one(),
        "Whittle product must be integral, got {value}"
    );
    assert!(
        !value.is_negative(),
        "Whittle count must be nonnegative, got {value}"
    );
    Ok(value.to_integer())
}

/// The raw multinomial-times-cofactor value, with no flow check. Only
/// meaningful as a count when the flow condition holds; the pool-size bound
/// sums it formally over all terminals.
pub fn whittle_formal(tc: &TransitionCounts, u: usize, v: usize) -> Rational {
    let fstar = fstar_from_counts(tc);
    let cof = cofactor(&fstar, v, u);
    Rational::from(multinomial(tc)) * cof
}

/// Formal terminal sum `Σ_v multinomial · F*_{vu}` used as the exact side of
/// the pool-size bound comparison.
pub fn whittle_terminal_sum(tc: &TransitionCounts, u: usize) -> Rational {
    let fstar = fstar_from_counts(tc);
    let mult = Rational::from(multinomial(tc));
    (0..tc.graph.vertex_count())
        .map(|v| &mult * cofactor(&fstar, v, u))
        .sum()
}

/// Independent oracle: count the walks by memoized depth-first search over
/// (current vertex, remaining counts).
pub fn brute_force_count(tc: &TransitionCounts, u: usize, v: usize) -> Int {
    fn go(
        tc: &TransitionCounts,
        current: usize,
        remaining: &mut Vec<u64>,
        target: usize,
        memo: &mut HashMap<(usize, Vec<u64>), Int>,
    ) -> Int {
        if remaining.iter().all(|&c| c == 0) {
            return if current == target {
                Int::one()
            } else {
                Int::zero()
            };
        }
        let key = (current, remaining.clone());
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        let mut acc = Int::zero();
        let candidates: Vec<usize> = tc.graph.out_edges(current).collect();
        for id in candidates {
            if remaining[id] == 0 {
                continue;
            }
            remaining[id] -= 1;
            acc += go(tc, tc.graph.edges()[id].dst, remaining, target, memo);
            remaining[id] += 1;
        }
        memo.insert(key, acc.clone());
        acc
    }
    let mut remaining = tc.per_edge.clone();
    go(tc, u, &mut remaining, v, &mut HashMap::new())
}

/// Stirling-corrected lower bound on `log2 |C_pool|`, reported term by term.
#[derive(Debug, Clone)]
pub struct PoolSizeBound {
    /// `n' H(P)`.
    pub term_entropy: f64,
    /// `((|V| − |E|)/2) log2(2πn')`.
    pub term_stirling: f64,
    /// `Δ(n')`, the second-order Stirling slack.
    pub term_delta: f64,
    /// `log2 Σ_v 2^{C_v}` over vertices with positive cofactor.
    pub term_terminal: f64,
    /// Per-vertex `C_v`; `None` where the cofactor is non-positive and the
    /// vertex is dropped from the terminal sum.
    pub c_v: Vec<Option<f64>>,
    /// Sum of the four terms.
    pub log2_lower: f64,
}

/// Evaluate the pool-size lower bound at real arguments `n'P(e)`, `n'π(i)`.
pub fn pool_size_bound(spec: &PoolSpec) -> Result<PoolSizeBound, CountingError> {
    let chain = spec.chain();
    let g = spec.graph();
    let n_prime = spec.n_prime() as f64;
    for (id, p) in chain.edge_probs().iter().enumerate() {
        if !p.is_positive() {
            return Err(CountingError::ZeroProbability(id));
        }
    }

    let term_entropy = n_prime * chain.entropy_rate();
    let term_stirling = (g.vertex_count() as f64 - g.edge_count() as f64) / 2.0
        * (2.0 * std::f64::consts::PI * n_prime).log2();

    let pi: Vec<f64> = chain
        .stationary_distribution()
        .iter()
        .map(rational_to_f64)
        .collect();
    let pe: Vec<f64> = chain.edge_probs().iter().map(rational_to_f64).collect();
    let term_delta = std::f64::consts::LOG2_E
        * (pi
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| 1.0 / (12.0 * n_prime * x + 1.0))
            .sum::<f64>()
            - pe.iter().map(|&x| 1.0 / (12.0 * n_prime * x)).sum::<f64>());

    // shared part of C_v
    let shared = 0.5
        * (pi.iter().filter(|&&x| x > 0.0).map(|&x| x.log2()).sum::<f64>()
            - pe.iter().map(|&x| x.log2()).sum::<f64>());

    // F* from the chain itself: f*_ij = δ_ij − p(j|i)
    let nv = g.vertex_count();
    let fstar: Vec<Vec<Rational>> = (0..nv)
        .map(|i| {
            (0..nv)
                .map(|j| {
                    let diag = if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    diag - chain.trans_prob(i, j)
                })
                .collect()
        })
        .collect();

    let mut c_v = Vec::with_capacity(nv);
    let mut terminal_sum = 0.0f64;
    for v in 0..nv {
        let cof = cofactor(&fstar, v, spec.v_root());
        if cof.is_positive() {
            let cv = shared + rational_to_f64(&cof).log2();
            terminal_sum += cv.exp2();
            c_v.push(Some(cv));
        } else {
            c_v.push(None);
        }
    }
    let term_terminal = terminal_sum.log2();

    let log2_lower = term_entropy + term_stirling + term_delta + term_terminal;
    Ok(PoolSizeBound {
        term_entropy,
        term_stirling,
        term_delta,
        term_terminal,
        c_v,
        log2_lower,
    })
}

/// The rate bound and its asymptotic landmarks.
#[derive(Debug, Clone)]
pub struct PoolRate {
    /// `R_pool ≥ log2_lower / n`.
    pub r_pool_lower: f64,
    /// The `n → ∞` limit `α H(P)`.
    pub alpha_entropy: f64,
    /// `H(P)` of the spec's chain, in bits.
    pub entropy: f64,
    /// `cap(S(G)) = log2 λ`, the `α → 1` limit under the maxentropic chain.
    pub capacity: f64,
}

pub fn pool_rate(spec: &PoolSpec) -> Result<PoolRate, CountingError> {
    let bound = pool_size_bound(spec)?;
    let entropy = spec.chain().entropy_rate();
    let alpha = rational_to_f64(spec.alpha());
    let (_, capacity) = maxentropic_chain(spec.graph())?;
    Ok(PoolRate {
        r_pool_lower: bound.log2_lower / spec.n() as f64,
        alpha_entropy: alpha * entropy,
        entropy,
        capacity,
    })
}
