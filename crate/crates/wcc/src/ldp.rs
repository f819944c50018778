//! Product-chain machinery and asymptotic rates: the large-deviation rate
//! function I(Q) for the pair empirical measure, the constrained entropy
//! maximization over the valid-bad set, and the asymptotic achievable rates
//! R1, R2, R_ec.
//!
//! The optimizer maximizes the (concave) Markov entropy rate over a polytope:
//! simplex, shift-invariance, marginal bands, and the distance cap. It runs
//! away-step Frank-Wolfe with a small dense simplex LP as the linear oracle;
//! feasibility is pre-decided in exact rational arithmetic so that a boundary
//! case (ζ = 0, δ = 0) is never misjudged by floating point.

use num_traits::{FromPrimitive, One, Zero};
use thiserror::Error;

use crate::bounds::{claim1_exponent, collision_and_distance};
use crate::graph::LabeledGraph;
use crate::markov::{spectral_gaps, GapReport, MarkovChain};
use crate::pool::PoolSpec;
use crate::{rational_to_f64, Rational};

#[derive(Debug, Error)]
pub enum LdpError {
    #[error("constraint set is empty (delta = {delta}, zeta = {zeta})")]
    Infeasible { delta: f64, zeta: f64 },
    #[error("optimizer did not reach tolerance within {0} iterations")]
    NoConvergence(usize),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Chain(#[from] crate::markov::ChainError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// The pair chain `P' = P × P` over `G × G`, with the mismatch indicator
/// `f(e, e') = [L(e) ≠ L(e')]` attached to every product edge.
#[derive(Debug, Clone)]
pub struct ProductChain {
    chain: MarkovChain,
    base_pairs: Vec<(usize, usize)>,
    mismatch: Vec<bool>,
    base_vertices: usize,
}

/// `P'((u',v')|(u,v)) = p(u'|u) p(v'|v)`; product edge `(e, e')` gets index
/// `e·|E| + e'` and product vertex `(u, v)` gets `u·|V| + v`.
pub fn build_product_chain(base: &MarkovChain) -> ProductChain {
    let g = base.graph();
    let nv = g.vertex_count();
    let na = g.alphabet().len();
    let alphabet: Vec<String> = (0..na)
        .flat_map(|a| (0..na).map(move |b| (a, b)))
        .map(|(a, b)| format!("{}|{}", g.alphabet()[a], g.alphabet()[b]))
        .collect();
    let vertices: Vec<String> = (0..nv)
        .flat_map(|u| (0..nv).map(move |v| (u, v)))
        .map(|(u, v)| format!("{}|{}", g.vertices()[u], g.vertices()[v]))
        .collect();
    let mut edges = Vec::with_capacity(g.edge_count() * g.edge_count());
    let mut base_pairs = Vec::with_capacity(edges.capacity());
    let mut mismatch = Vec::with_capacity(edges.capacity());
    let mut probs = Vec::with_capacity(edges.capacity());
    for (i, e) in g.edges().iter().enumerate() {
        for (j, e2) in g.edges().iter().enumerate() {
            edges.push((
                e.src * nv + e2.src,
                e.dst * nv + e2.dst,
                e.label * na + e2.label,
            ));
            base_pairs.push((i, j));
            mismatch.push(e.label != e2.label);
            probs.push(base.edge_prob(i) * base.edge_prob(j));
        }
    }
    let graph = LabeledGraph::new(alphabet, vertices, edges)
        .expect("determinism of the base graph lifts to the product");
    let chain = MarkovChain::new(graph, probs)
        .expect("stationarity of the base chain lifts to the product");
    ProductChain {
        chain,
        base_pairs,
        mismatch,
        base_vertices: nv,
    }
}

impl ProductChain {
    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    /// Product edge index → (base edge, base edge).
    pub fn base_pairs(&self) -> &[(usize, usize)] {
        &self.base_pairs
    }

    pub fn mismatch(&self) -> &[bool] {
        &self.mismatch
    }

    pub fn edge_count(&self) -> usize {
        self.base_pairs.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.chain.graph().vertex_count()
    }

    /// `E_{P'}[f] = 1 - S`, exact.
    pub fn expected_mismatch(&self) -> Rational {
        self.mismatch
            .iter()
            .zip(self.chain.edge_probs())
            .filter(|(m, _)| **m)
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Gap report of the product transition matrix.
    pub fn gaps(&self, k_max: usize) -> GapReport {
        spectral_gaps(&self.chain, k_max)
    }

    /// Stationary mass `π'((v, v)) = π(v)²` of the diagonal start used by
    /// Lemma 2's point-mass initialization.
    pub fn root_mass(&self, v: usize) -> Rational {
        self.chain.stationary_distribution()[v * self.base_vertices + v].clone()
    }
}

/// A joint (pair) measure on the product edges.
#[derive(Debug, Clone)]
pub struct JointMeasure {
    q: Vec<f64>,
}

impl JointMeasure {
    pub fn new(q: Vec<f64>) -> Self {
        JointMeasure { q }
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    /// Mass exiting each product vertex.
    pub fn vertex_marginals(&self, pc: &ProductChain) -> Vec<f64> {
        let mut m = vec![0.0; pc.vertex_count()];
        for (i, &qi) in self.q.iter().enumerate() {
            m[pc.chain.graph().edges()[i].src] += qi;
        }
        m
    }

    /// Per-base-edge walk marginals `Q_w(e) = Σ_{e'} q(e,e')` and
    /// `Q_w'(e') = Σ_e q(e,e')`.
    pub fn walk_marginals(&self, pc: &ProductChain) -> (Vec<f64>, Vec<f64>) {
        let ne = pc.base_pairs.iter().map(|&(e, _)| e).max().unwrap_or(0) + 1;
        let mut first = vec![0.0; ne];
        let mut second = vec![0.0; ne];
        for (i, &qi) in self.q.iter().enumerate() {
            let (e, e2) = pc.base_pairs[i];
            first[e] += qi;
            second[e2] += qi;
        }
        (first, second)
    }

    pub fn expected_mismatch(&self, pc: &ProductChain) -> f64 {
        self.q
            .iter()
            .zip(&pc.mismatch)
            .filter(|(_, m)| **m)
            .map(|(q, _)| q)
            .sum()
    }

    /// Entropy rate `H(Q) = -Σ q(e,e') log2(q(e,e')/Q_vertex(σ))` in bits.
    pub fn entropy_bits(&self, pc: &ProductChain) -> f64 {
        entropy_nats(pc, &self.q) / std::f64::consts::LN_2
    }

    /// Largest constraint violation against the `A_{ζ,δ}` polytope; used by
    /// the optimizer soundness checks.
    pub fn max_violation(&self, pc: &ProductChain, delta: f64, zeta: f64) -> f64 {
        let mut worst = (self.q.iter().sum::<f64>() - 1.0).abs();
        for &qi in &self.q {
            worst = worst.max(-qi);
        }
        let mut inflow = vec![0.0; pc.vertex_count()];
        let outflow = self.vertex_marginals(pc);
        for (i, &qi) in self.q.iter().enumerate() {
            inflow[pc.chain.graph().edges()[i].dst] += qi;
        }
        for (fin, fout) in inflow.iter().zip(&outflow) {
            worst = worst.max((fin - fout).abs());
        }
        let p: Vec<f64> = pc
            .base_pairs
            .iter()
            .map(|&(e, _)| e)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|_| 0.0)
            .collect();
        let _ = p;
        let (first, second) = self.walk_marginals(pc);
        for (e, (m1, m2)) in first.iter().zip(&second).enumerate() {
            let pe = base_edge_prob(pc, e);
            worst = worst.max((m1 - pe).abs() - zeta);
            worst = worst.max((m2 - pe).abs() - zeta);
        }
        worst = worst.max(self.expected_mismatch(pc) - delta);
        worst
    }
}

fn base_edge_prob(pc: &ProductChain, e: usize) -> f64 {
    // P(e) = Σ_{e'} P'(e,e') over the first coordinate
    pc.base_pairs
        .iter()
        .zip(pc.chain.edge_probs())
        .filter(|(&(a, _), _)| a == e)
        .map(|(_, p)| rational_to_f64(p))
        .sum()
}

/// LDP rate function `I(Q) = Σ Q(u,v) log(Q(v|u)/p'(v|u))` in nats,
/// instantiated on the product graph. Mass on a zero-probability transition
/// yields `+∞`.
pub fn ldp_rate_function(qm: &JointMeasure, pc: &ProductChain) -> f64 {
    let masses = qm.vertex_marginals(pc);
    let mut sum = 0.0;
    for (i, &qi) in qm.q.iter().enumerate() {
        if qi <= 0.0 {
            continue;
        }
        let pcond = rational_to_f64(&pc.chain.edge_cond_prob(i));
        if pcond <= 0.0 {
            return f64::INFINITY;
        }
        let qcond = qi / masses[pc.chain.graph().edges()[i].src];
        sum += qi * (qcond / pcond).ln();
    }
    sum
}

// ---------------------------------------------------------------------------
// dense two-phase simplex, generic so the feasibility pre-solve runs exact

trait LpScalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn tol() -> Self;
}

impl LpScalar for f64 {
    fn tol() -> f64 {
        1e-10
    }
}

impl LpScalar for Rational {
    fn tol() -> Rational {
        Rational::zero()
    }
}

/// `a·x = b` rows and `a·x ≤ b` rows over `x ≥ 0`.
struct LinearSystem<T> {
    n: usize,
    eqs: Vec<(Vec<T>, T)>,
    ineqs: Vec<(Vec<T>, T)>,
}

/// Maximize `obj·x` by the two-phase tableau simplex with Bland's rule.
/// Returns `None` when infeasible (unboundedness cannot occur here: the
/// polytope lives inside the simplex).
fn lp_solve<T: LpScalar>(sys: &LinearSystem<T>, obj: &[T]) -> Option<Vec<T>> {
    let n = sys.n;
    let slacks = sys.ineqs.len();
    let rows_n = sys.eqs.len() + sys.ineqs.len();
    let structural = n + slacks;
    let ncols = structural + rows_n; // + artificials
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(rows_n);
    let mut rhs: Vec<T> = Vec::with_capacity(rows_n);
    for (ri, (a, b)) in sys
        .eqs
        .iter()
        .map(|(a, b)| (a, b))
        .chain(sys.ineqs.iter().map(|(a, b)| (a, b)))
        .enumerate()
    {
        let mut row = vec![T::zero(); ncols];
        row[..n].clone_from_slice(a);
        if ri >= sys.eqs.len() {
            row[n + (ri - sys.eqs.len())] = T::one();
        }
        let mut b = b.clone();
        if b < T::zero() {
            for c in row.iter_mut() {
                *c = -c.clone();
            }
            b = -b;
        }
        row[structural + ri] = T::one();
        rows.push(row);
        rhs.push(b);
    }
    let mut basis: Vec<usize> = (0..rows_n).map(|i| structural + i).collect();

    // phase 1: maximize -Σ artificials
    let mut cost1 = vec![T::zero(); ncols];
    for c in cost1.iter_mut().skip(structural) {
        *c = -T::one();
    }
    let value = run_simplex(&mut rows, &mut rhs, &mut basis, &cost1, ncols);
    if value < -T::tol() {
        return None;
    }
    // ban artificials from re-entering; pivot basic artificials out if possible
    for i in 0..rows_n {
        if basis[i] >= structural {
            if let Some(j) = (0..structural).find(|&j| {
                let v = rows[i][j].clone();
                v.clone() > T::tol() || v < -T::tol()
            }) {
                pivot(&mut rows, &mut rhs, &mut basis, i, j);
            }
        }
    }

    // phase 2
    let mut cost2 = vec![T::zero(); ncols];
    cost2[..n].clone_from_slice(obj);
    run_simplex(&mut rows, &mut rhs, &mut basis, &cost2, structural);

    let mut x = vec![T::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = rhs[i].clone();
        }
    }
    Some(x)
}

/// Iterate pivots until no reduced cost is improving; columns `>= limit` are
/// barred from entering. Returns the objective value.
fn run_simplex<T: LpScalar>(
    rows: &mut [Vec<T>],
    rhs: &mut [T],
    basis: &mut [usize],
    cost: &[T],
    limit: usize,
) -> T {
    loop {
        // reduced cost: cost_j - Σ_i cost[basis_i] * rows[i][j]; Bland picks
        // the smallest improving column
        let mut entering = None;
        for j in 0..limit {
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j].clone();
            for (i, &b) in basis.iter().enumerate() {
                if cost[b] != T::zero() {
                    red = red - cost[b].clone() * rows[i][j].clone();
                }
            }
            if red > T::tol() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            let mut value = T::zero();
            for (i, &b) in basis.iter().enumerate() {
                if cost[b] != T::zero() {
                    value = value + cost[b].clone() * rhs[i].clone();
                }
            }
            return value;
        };
        // ratio test, smallest basis index on ties (Bland)
        let mut leave: Option<(usize, T)> = None;
        for i in 0..rows.len() {
            if rows[i][j] > T::tol() {
                let ratio = rhs[i].clone() / rows[i][j].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr.clone() || (ratio == lr.clone() && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            // unbounded; cannot happen on a subset of the probability simplex
            return T::zero();
        };
        pivot(rows, rhs, basis, i, j);
    }
}

fn pivot<T: LpScalar>(rows: &mut [Vec<T>], rhs: &mut [T], basis: &mut [usize], i: usize, j: usize) {
    let p = rows[i][j].clone();
    for c in rows[i].iter_mut() {
        *c = c.clone() / p.clone();
    }
    rhs[i] = rhs[i].clone() / p;
    for r in 0..rows.len() {
        if r == i {
            continue;
        }
        let f = rows[r][j].clone();
        if f == T::zero() {
            continue;
        }
        for c in 0..rows[r].len() {
            let d = f.clone() * rows[i][c].clone();
            rows[r][c] = rows[r][c].clone() - d;
        }
        rhs[r] = rhs[r].clone() - f * rhs[i].clone();
    }
    basis[i] = j;
}

// ---------------------------------------------------------------------------
// the A_{ζ,δ} polytope

fn constraints_rational(
    pc: &ProductChain,
    delta: &Rational,
    zeta: &Rational,
) -> LinearSystem<Rational> {
    let m = pc.edge_count();
    let g = pc.chain.graph();
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();

    eqs.push((vec![Rational::one(); m], Rational::one()));

    // shift-invariance: outflow = inflow at every product vertex (one row is
    // redundant given the simplex row)
    for w in 0..pc.vertex_count().saturating_sub(1) {
        let mut row = vec![Rational::zero(); m];
        let mut nontrivial = false;
        for (i, e) in g.edges().iter().enumerate() {
            if e.src == w {
                row[i] += Rational::one();
            }
            if e.dst == w {
                row[i] -= Rational::one();
            }
            if !row[i].is_zero() {
                nontrivial = true;
            }
        }
        if nontrivial {
            eqs.push((row, Rational::zero()));
        }
    }

    // marginal bands, both walk coordinates
    let ne = pc.base_pairs.iter().map(|&(e, _)| e).max().unwrap_or(0) + 1;
    for coord in 0..2 {
        for e in 0..ne {
            let mut row = vec![Rational::zero(); m];
            for (i, &(a, b)) in pc.base_pairs.iter().enumerate() {
                if (coord == 0 && a == e) || (coord == 1 && b == e) {
                    row[i] = Rational::one();
                }
            }
            let p: Rational = pc
                .base_pairs
                .iter()
                .zip(pc.chain.edge_probs())
                .filter(|(&(a, _), _)| a == e)
                .map(|(_, pr)| pr.clone())
                .sum();
            if zeta.is_zero() {
                eqs.push((row, p));
            } else {
                ineqs.push((row.clone(), &p + zeta));
                let neg: Vec<Rational> = row.iter().map(|x| -x.clone()).collect();
                ineqs.push((neg, -(&p - zeta)));
            }
        }
    }

    // distance cap
    let f_row: Vec<Rational> = pc
        .mismatch
        .iter()
        .map(|&f| if f { Rational::one() } else { Rational::zero() })
        .collect();
    ineqs.push((f_row, delta.clone()));

    LinearSystem { n: m, eqs, ineqs }
}

fn to_f64_system(sys: &LinearSystem<Rational>) -> LinearSystem<f64> {
    LinearSystem {
        n: sys.n,
        eqs: sys
            .eqs
            .iter()
            .map(|(a, b)| (a.iter().map(rational_to_f64).collect(), rational_to_f64(b)))
            .collect(),
        ineqs: sys
            .ineqs
            .iter()
            .map(|(a, b)| (a.iter().map(rational_to_f64).collect(), rational_to_f64(b)))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// entropy objective

const Q_FLOOR: f64 = 1e-18;

fn vertex_masses(pc: &ProductChain, q: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; pc.vertex_count()];
    for (i, &qi) in q.iter().enumerate() {
        m[pc.chain.graph().edges()[i].src] += qi;
    }
    m
}

fn entropy_nats(pc: &ProductChain, q: &[f64]) -> f64 {
    let masses = vertex_masses(pc, q);
    let mut h = 0.0;
    for (i, &qi) in q.iter().enumerate() {
        if qi > 0.0 {
            h -= qi * (qi / masses[pc.chain.graph().edges()[i].src]).ln();
        }
    }
    h
}

/// `∂H/∂q_i = ln(m_{σ(i)}) − ln(q_i)`, floored to stay finite at the
/// boundary.
fn entropy_gradient(pc: &ProductChain, q: &[f64], out: &mut Vec<f64>) {
    let masses = vertex_masses(pc, q);
    out.clear();
    for (i, &qi) in q.iter().enumerate() {
        let m = masses[pc.chain.graph().edges()[i].src].max(Q_FLOOR);
        out.push(m.ln() - qi.max(Q_FLOOR).ln());
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact line search for the concave entropy along `q + γ d`, `γ ∈ [0, hi]`,
/// by bisection on the (monotone) directional derivative.
fn line_search(pc: &ProductChain, q: &[f64], d: &[f64], hi: f64) -> f64 {
    let phi_prime = |gamma: f64, grad: &mut Vec<f64>, point: &mut Vec<f64>| {
        point.clear();
        point.extend(q.iter().zip(d).map(|(x, y)| (x + gamma * y).max(0.0)));
        entropy_gradient(pc, point, grad);
        dot(grad, d)
    };
    let mut grad = Vec::new();
    let mut point = Vec::new();
    if phi_prime(hi, &mut grad, &mut point) >= 0.0 {
        return hi;
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi_prime(mid, &mut grad, &mut point) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const FW_BUDGET: usize = 100_000;

/// Maximize `H(Q)` over `A_{ζ,δ}` (closed bands). Returns the supremum in
/// bits and the maximizer.
pub fn max_entropy_over_bad_set(
    pc: &ProductChain,
    delta: f64,
    zeta: f64,
    tol: f64,
) -> Result<(f64, JointMeasure), LdpError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(LdpError::Domain(format!("delta = {delta} outside [0, 1]")));
    }
    if zeta < 0.0 {
        return Err(LdpError::Domain(format!("zeta = {zeta} negative")));
    }
    let delta_r = Rational::from_f64(delta).unwrap();
    let zeta_r = Rational::from_f64(zeta).unwrap();
    let exact = constraints_rational(pc, &delta_r, &zeta_r);
    let zero_obj = vec![Rational::zero(); exact.n];
    let Some(start) = lp_solve(&exact, &zero_obj) else {
        return Err(LdpError::Infeasible { delta, zeta });
    };
    let sys = to_f64_system(&exact);
    let x0: Vec<f64> = start.iter().map(rational_to_f64).collect();

    // away-step Frank-Wolfe over the atom decomposition
    let tol_nats = tol * std::f64::consts::LN_2;
    let mut atoms: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), 1.0)];
    let mut q = x0;
    let mut grad = Vec::new();
    let mut converged = false;
    for _ in 0..FW_BUDGET {
        entropy_gradient(pc, &q, &mut grad);
        let s = lp_solve(&sys, &grad).ok_or(LdpError::Infeasible { delta, zeta })?;
        let gap_fw = dot(&grad, &s) - dot(&grad, &q);
        if gap_fw < tol_nats {
            converged = true;
            break;
        }
        let (ai, _) = atoms
            .iter()
            .enumerate()
            .min_by(|(_, (v, _)), (_, (w, _))| dot(&grad, v).total_cmp(&dot(&grad, w)))
            .map(|(i, (v, _))| (i, dot(&grad, v)))
            .unwrap();
        let gap_aw = dot(&grad, &q) - dot(&grad, &atoms[ai].0);
        let away_possible = atoms[ai].1 < 1.0 - 1e-12;
        if gap_fw >= gap_aw || !away_possible {
            // FW step toward the new vertex
            let d: Vec<f64> = s.iter().zip(&q).map(|(a, b)| a - b).collect();
            let gamma = line_search(pc, &q, &d, 1.0);
            for (_, w) in atoms.iter_mut() {
                *w *= 1.0 - gamma;
            }
            match atoms
                .iter_mut()
                .find(|(v, _)| v.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-12))
            {
                Some((_, w)) => *w += gamma,
                None => atoms.push((s, gamma)),
            }
        } else {
            // away step from the worst active atom
            let w = atoms[ai].1;
            let hi = w / (1.0 - w);
            let d: Vec<f64> = q.iter().zip(&atoms[ai].0).map(|(a, b)| a - b).collect();
            let gamma = line_search(pc, &q, &d, hi);
            for (_, wt) in atoms.iter_mut() {
                *wt *= 1.0 + gamma;
            }
            atoms[ai].1 -= gamma;
        }
        atoms.retain(|(_, w)| *w > 1e-15);
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        for (_, w) in atoms.iter_mut() {
            *w /= total;
        }
        q = vec![0.0; sys.n];
        for (v, w) in &atoms {
            for (qi, vi) in q.iter_mut().zip(v) {
                *qi += w * vi;
            }
        }
    }
    if !converged {
        return Err(LdpError::NoConvergence(FW_BUDGET));
    }
    let h_bits = entropy_nats(pc, &q) / std::f64::consts::LN_2;
    Ok((h_bits, JointMeasure::new(q)))
}

/// Theorem-2 asymptotic rates at a design `(α, ζ)` and distance slack `ε`.
#[derive(Debug, Clone)]
pub struct AsymptoticRates {
    /// `α(2H(P) − sup H(Q) − 2ζc)`, clamped at 0.
    pub r1: f64,
    /// `α(H(P) − 2ζc)`, clamped at 0.
    pub r2: f64,
    /// `min(R1, R2)`.
    pub r_ec: f64,
    /// Codeword-level relative distance `δ = α(1−S) − ε`.
    pub delta: f64,
    /// Prefix-level target `δ' = 1−S−ε` handed to the optimizer.
    pub delta_prime: f64,
    /// `sup_{Q ∈ A_{ζ,δ'}} H(Q)` in bits.
    pub sup_h: f64,
    /// The proof-derived `O(ζ)` constant `c = −Σ_e log2 p(τ(e)|σ(e))`.
    pub zeta_constant: f64,
    pub maximizer: JointMeasure,
}

pub fn asymptotic_rates(spec: &PoolSpec, eps: f64, zeta: f64) -> Result<AsymptoticRates, LdpError> {
    let chain = spec.chain();
    let (_, dist) = collision_and_distance(chain);
    let dist = rational_to_f64(&dist);
    if eps <= 0.0 || eps >= dist {
        return Err(LdpError::Domain(format!(
            "eps = {eps} outside (0, {dist})"
        )));
    }
    let pc = build_product_chain(chain);
    let delta_prime = dist - eps;
    let (sup_h, maximizer) = max_entropy_over_bad_set(&pc, delta_prime, zeta, 1e-8)?;
    let h = chain.entropy_rate();
    let c = -claim1_exponent(chain);
    let alpha = rational_to_f64(spec.alpha());
    let r1 = (alpha * (2.0 * h - sup_h - 2.0 * zeta * c)).max(0.0);
    let r2 = (alpha * (h - 2.0 * zeta * c)).max(0.0);
    Ok(AsymptoticRates {
        r1,
        r2,
        r_ec: r1.min(r2),
        delta: alpha * dist - eps,
        delta_prime,
        sup_h,
        zeta_constant: c,
        maximizer,
    })
}
