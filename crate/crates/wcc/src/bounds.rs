//! Finite-blocklength probability bounds: the three Bernstein tail forms,
//! the pool reliability exponent, the label collision probability and
//! expected distance, the pairwise distance-failure bound, and the
//! expurgated-code size bound.
//!
//! Everything here is plug-in formula evaluation in double precision with
//! exponents carried in nats; clamping to [0, 1] is explicit and flagged.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::markov::{GapReport, MarkovChain};
use crate::pool::PoolSpec;
use crate::{rational_to_f64, Rational};

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("eps = {eps} must lie in (0, 1 - S) = (0, {limit})")]
    EpsOutOfRange { eps: f64, limit: f64 },
}

/// A probability upper bound together with whether the raw formula value had
/// to be clamped into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbBound {
    pub value: f64,
    pub clamped: bool,
}

impl ProbBound {
    fn clamp_upper(raw: f64) -> ProbBound {
        if raw > 1.0 {
            ProbBound {
                value: 1.0,
                clamped: true,
            }
        } else {
            ProbBound {
                value: raw.max(0.0),
                clamped: false,
            }
        }
    }

    fn clamp_lower(raw: f64) -> ProbBound {
        if raw < 0.0 {
            ProbBound {
                value: 0.0,
                clamped: true,
            }
        } else {
            ProbBound {
                value: raw.min(1.0),
                clamped: false,
            }
        }
    }
}

/// Initial distribution of the chain in a Bernstein bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinInit {
    Stationary,
    /// Arbitrary (e.g. point-mass) start with non-stationarity constant
    /// `N_q = Σ q(x)²/π(x)`.
    Arbitrary { n_q: f64 },
}

/// Inputs to a Bernstein tail: deviation `t` for the sum `D = Σ f(X_i)` of a
/// centered function with sup-norm `C` and stationary variance `V_f`.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinParams {
    pub n: u64,
    pub t: f64,
    pub c: f64,
    pub v_f: f64,
    /// `γ` for reversible chains, `γ_ps` otherwise.
    pub gap: f64,
    pub reversible: bool,
    pub init: BernsteinInit,
}

/// Tail probability upper bound `P(|D| ≥ t)`.
///
/// Reversible stationary: `2 exp(-t²γ / (4nV_f + 10tC))`.
/// Non-reversible stationary: `2 exp(-t²γ_ps / (8(n + 1/γ_ps)V_f + 20tC))`.
/// An arbitrary start composes with the stationary bound as
/// `√N_q · (stationary bound)^{1/2}`.
pub fn bernstein_tail(p: &BernsteinParams) -> ProbBound {
    let n = p.n as f64;
    let exponent = if p.reversible {
        -(p.t * p.t) * p.gap / (4.0 * n * p.v_f + 10.0 * p.t * p.c)
    } else {
        -(p.t * p.t) * p.gap / (8.0 * (n + 1.0 / p.gap) * p.v_f + 20.0 * p.t * p.c)
    };
    let stationary = 2.0 * exponent.exp();
    let raw = match p.init {
        BernsteinInit::Stationary => stationary,
        BernsteinInit::Arbitrary { n_q } => n_q.sqrt() * stationary.sqrt(),
    };
    ProbBound::clamp_upper(if raw.is_nan() { 1.0 } else { raw })
}

/// Label collision probability `S = Σ_a (Σ_{L(e)=a} P(e))²` and the expected
/// relative distance `1 - S` of two independent stationary walks, both exact.
pub fn collision_and_distance(chain: &MarkovChain) -> (Rational, Rational) {
    let g = chain.graph();
    let mut mass_per_label = vec![Rational::zero(); g.alphabet().len()];
    for (id, e) in g.edges().iter().enumerate() {
        mass_per_label[e.label] += chain.edge_prob(id);
    }
    let s: Rational = mass_per_label.iter().map(|m| m * m).sum();
    let dist = Rational::one() - &s;
    (s, dist)
}

/// Theorem-1 reliability of the pool: the exponent `η_typ` and the lower
/// bound on the pool's probability mass, evaluated at the spec's root and at
/// the optimal (maximal-mass) root.
#[derive(Debug, Clone)]
pub struct Reliability {
    pub eta_typ: f64,
    /// `1 - |E|√(2/π(v_root)) exp(-n η_typ)` at the spec's root.
    pub mass_lower: ProbBound,
    /// Same bound with `π_max` in place of `π(v_root)`.
    pub mass_lower_opt: ProbBound,
    pub pi_root: f64,
    pub pi_max: f64,
    pub reversible: bool,
}

pub fn reliability_exponent(spec: &PoolSpec, gaps: &GapReport) -> Reliability {
    let chain = spec.chain();
    let alpha = rational_to_f64(spec.alpha());
    let zeta = rational_to_f64(spec.zeta());
    let p_min = rational_to_f64(&chain.p_min());
    let v_f = p_min * (1.0 - p_min);
    let gap = gaps.bernstein_gap();
    let eta_typ = if gaps.reversible {
        alpha * zeta * zeta * gap / (8.0 * v_f + 20.0 * zeta)
    } else {
        alpha * zeta * zeta * gap / (16.0 * v_f * (1.0 + 1.0 / gap) + 40.0 * zeta)
    };
    let pi: Vec<f64> = chain
        .stationary_distribution()
        .iter()
        .map(rational_to_f64)
        .collect();
    let pi_root = pi[spec.v_root()];
    let pi_max = pi.iter().cloned().fold(0.0, f64::max);
    let edges = chain.graph().edge_count() as f64;
    let n = spec.n() as f64;
    let mass_at = |mass: f64| {
        ProbBound::clamp_lower(1.0 - edges * (2.0 / mass).sqrt() * (-n * eta_typ).exp())
    };
    Reliability {
        eta_typ,
        mass_lower: mass_at(pi_root),
        mass_lower_opt: mass_at(pi_max),
        pi_root,
        pi_max,
        reversible: gaps.reversible,
    }
}

/// Lemma-2 distance-failure bound for a pair of independent prefixes, with
/// the product chain started at the point mass `(v_root, v_root)`.
///
/// `pi_prod_root` is the product chain's stationary mass at that vertex pair,
/// so `N_q = 1/pi_prod_root`.
pub fn p_fail_bound(
    spec: &PoolSpec,
    eps: f64,
    product_gaps: &GapReport,
    pi_prod_root: f64,
) -> Result<ProbBound, BoundsError> {
    let (s, dist) = collision_and_distance(spec.chain());
    let s = rational_to_f64(&s);
    let limit = rational_to_f64(&dist);
    if eps <= 0.0 || eps >= limit {
        return Err(BoundsError::EpsOutOfRange { eps, limit });
    }
    let n_prime = spec.n_prime() as f64;
    let gap = product_gaps.bernstein_gap();
    let n_q = 1.0 / pi_prod_root;
    let exponent = if product_gaps.reversible {
        -n_prime * eps * eps * gap / (8.0 * s * (1.0 - s) + 20.0 * eps * s)
    } else {
        -n_prime * eps * eps * gap / (16.0 * s * (1.0 - s) * (1.0 + 1.0 / gap) + 40.0 * eps * s)
    };
    Ok(ProbBound::clamp_upper((2.0 * n_q).sqrt() * exponent.exp()))
}

/// Claim-1 exponent constant `Σ_e log2 p(τ(e)|σ(e))` (negative for any chain
/// with a non-deterministic vertex).
pub fn claim1_exponent(chain: &MarkovChain) -> f64 {
    (0..chain.graph().edge_count())
        .map(|id| rational_to_f64(&chain.edge_cond_prob(id)).log2())
        .sum()
}

/// Which branch of `max(P_fail, P̄_max P(C_pool)/2)` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PFailBranch {
    DistanceFailure,
    GenerationSkew,
}

/// Theorem-2 finite-length size bound for the expurgated code.
#[derive(Debug, Clone)]
pub struct EcSizeBound {
    /// Upper bound on `log2 P̄_max` from Claims 1-2.
    pub p_max_log2: f64,
    pub p_max: ProbBound,
    /// Effective failure probability `P'_fail`.
    pub p_fail_eff: f64,
    pub p_fail_eff_log2: f64,
    pub branch: PFailBranch,
    /// Lower bound on `E[|C_ec|]`, `P(C_pool)²/(4 P'_fail)`.
    pub size_lower: f64,
}

/// Assemble the Theorem-2 size bound from the Lemma-2 failure bound, the
/// Theorem-1 mass bound, and a (lower bound on) `log2 |C_pool|`.
pub fn ec_size_bound(
    spec: &PoolSpec,
    pool_log2_size: f64,
    p_fail: f64,
    pool_mass: f64,
) -> EcSizeBound {
    let alpha = rational_to_f64(spec.alpha());
    let zeta = rational_to_f64(spec.zeta());
    let n = spec.n() as f64;
    // log2 P̄_max ≤ -2αnζ Σ_e log2 p(τ|σ) - log2 |C_pool|
    let p_max_log2 = -2.0 * alpha * n * zeta * claim1_exponent(spec.chain()) - pool_log2_size;
    let p_max = ProbBound::clamp_upper(p_max_log2.exp2());
    let skew_log2 = p_max_log2 + (pool_mass / 2.0).log2();
    let fail_log2 = p_fail.log2();
    let (p_fail_eff_log2, branch) = if fail_log2 >= skew_log2 {
        (fail_log2, PFailBranch::DistanceFailure)
    } else {
        (skew_log2, PFailBranch::GenerationSkew)
    };
    let size_log2 = 2.0 * pool_mass.log2() - 2.0 - p_fail_eff_log2;
    EcSizeBound {
        p_max_log2,
        p_max,
        p_fail_eff: p_fail_eff_log2.exp2().min(1.0),
        p_fail_eff_log2,
        branch,
        size_lower: size_log2.exp2().max(0.0),
    }
}

/// Everything the `bounds finite` report carries, with the parameters echoed.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub s: f64,
    pub expected_rel_distance: f64,
    pub eta_typ: f64,
    pub pool_mass_lower: ProbBound,
    pub p_fail: ProbBound,
    pub p_max_upper: ProbBound,
    pub p_fail_eff: f64,
    pub ec_size_lower: f64,
    pub n: u64,
    pub alpha: f64,
    pub zeta: f64,
    pub eps: f64,
}

/// Glue the three bound layers into one report. The caller supplies the gap
/// reports (base and product chain) and a `log2 |C_pool|` lower bound.
pub fn bounds_report(
    spec: &PoolSpec,
    eps: f64,
    gaps: &GapReport,
    product_gaps: &GapReport,
    pi_prod_root: f64,
    pool_log2_size: f64,
) -> Result<BoundsReport, BoundsError> {
    let (s, dist) = collision_and_distance(spec.chain());
    let rel = reliability_exponent(spec, gaps);
    let p_fail = p_fail_bound(spec, eps, product_gaps, pi_prod_root)?;
    let ec = ec_size_bound(spec, pool_log2_size, p_fail.value, rel.mass_lower.value);
    Ok(BoundsReport {
        s: rational_to_f64(&s),
        expected_rel_distance: rational_to_f64(&dist),
        eta_typ: rel.eta_typ,
        pool_mass_lower: rel.mass_lower,
        p_fail,
        p_max_upper: ec.p_max,
        p_fail_eff: ec.p_fail_eff,
        ec_size_lower: ec.size_lower,
        n: spec.n(),
        alpha: rational_to_f64(spec.alpha()),
        zeta: rational_to_f64(spec.zeta()),
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::markov::{maxentropic_chain, quantize_n_integral, spectral_gaps};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const FB: &str = "alphabet 0 1\nvertex v\nedge v v 0\nedge v v 1\n";
    const GM: &str = "alphabet 0 1\nvertex a\nvertex b\nedge a a 0\nedge a b 1\nedge b a 0\n";
    const DB2: &str = "alphabet 0 1\nvertex 0\nvertex 1\n\
        edge 0 0 0\nedge 0 1 1\nedge 1 0 0\nedge 1 1 1\n";

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn spec(text: &str, n: u64, alpha: Rational, zeta: Rational) -> PoolSpec {
        let chain = MarkovChain::uniform(parse_graph(text).unwrap()).unwrap();
        let ic = quantize_n_integral(&chain, n).unwrap();
        PoolSpec::new(ic, alpha, zeta, 0).unwrap()
    }

    /// Single-vertex chain over symbol pairs: the FB product chain.
    fn fb_product_chain() -> MarkovChain {
        let text = "alphabet 00 01 10 11\nvertex v\n\
            edge v v 00\nedge v v 01\nedge v v 10\nedge v v 11\n";
        MarkovChain::uniform(parse_graph(text).unwrap()).unwrap()
    }

    #[test]
    fn bernstein_zero_deviation_clamps_to_one() {
        let p = BernsteinParams {
            n: 100,
            t: 0.0,
            c: 1.0,
            v_f: 0.25,
            gap: 1.0,
            reversible: true,
            init: BernsteinInit::Stationary,
        };
        let b = bernstein_tail(&p);
        assert_eq!(b.value, 1.0);
        assert!(b.clamped);
    }

    #[test]
    fn bernstein_decreases_in_n_at_linear_deviation() {
        // t scales with n so the exponent grows
        let at = |n: u64| {
            bernstein_tail(&BernsteinParams {
                n,
                t: 0.1 * n as f64,
                c: 1.0,
                v_f: 0.25,
                gap: 1.0,
                reversible: true,
                init: BernsteinInit::Stationary,
            })
            .value
        };
        assert!(at(800) < at(400));
        assert!(at(400) < 1.0);
    }

    #[test]
    fn bernstein_matches_direct_formula() {
        let p = BernsteinParams {
            n: 400,
            t: 40.0,
            c: 1.0,
            v_f: 0.25,
            gap: 1.0,
            reversible: true,
            init: BernsteinInit::Stationary,
        };
        let direct = 2.0 * (-(40.0f64 * 40.0) * 1.0 / (4.0 * 400.0 * 0.25 + 10.0 * 40.0 * 1.0)).exp();
        assert!((bernstein_tail(&p).value - direct).abs() < 1e-12);
        assert!((direct - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bernstein_nonreversible_and_arbitrary_init() {
        let base = BernsteinParams {
            n: 400,
            t: 120.0,
            c: 1.0,
            v_f: 0.25,
            gap: 0.5,
            reversible: false,
            init: BernsteinInit::Stationary,
        };
        let direct =
            2.0 * (-(120.0f64 * 120.0) * 0.5 / (8.0 * (400.0 + 2.0) * 0.25 + 20.0 * 120.0)).exp();
        assert!((bernstein_tail(&base).value - direct).abs() < 1e-12);
        let arb = BernsteinParams {
            init: BernsteinInit::Arbitrary { n_q: 4.0 },
            ..base
        };
        assert!((bernstein_tail(&arb).value - 2.0 * direct.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collision_balanced_labels() {
        for text in [FB, DB2] {
            let chain = MarkovChain::uniform(parse_graph(text).unwrap()).unwrap();
            let (s, d) = collision_and_distance(&chain);
            assert_eq!(s, r(1, 2));
            assert_eq!(d, r(1, 2));
        }
    }

    #[test]
    fn collision_gm_maxentropic() {
        let g = parse_graph(GM).unwrap();
        let (chain, _) = maxentropic_chain(&g).unwrap();
        let (s, _) = collision_and_distance(&chain);
        // direct summation over the chain's own edge probabilities
        let p0 = rational_to_f64(&(chain.edge_prob(0) + chain.edge_prob(2)));
        let p1 = rational_to_f64(chain.edge_prob(1));
        let direct = p0 * p0 + p1 * p1;
        let s = rational_to_f64(&s);
        assert!((s - direct).abs() < 1e-12);
        assert!((s - 0.6).abs() < 1e-4);
    }

    #[test]
    fn collision_single_label_is_one() {
        let text = "alphabet 0\nvertex a\nvertex b\nedge a b 0\nedge b a 0\n";
        let chain = MarkovChain::uniform(parse_graph(text).unwrap()).unwrap();
        let (s, d) = collision_and_distance(&chain);
        assert!(s.is_one());
        assert!(d.is_zero());
    }

    #[test]
    fn reliability_db2_plugin_value() {
        let sp = spec(DB2, 8, r(1, 2), r(1, 5));
        let gaps = spectral_gaps(sp.chain(), 32);
        assert!(gaps.reversible);
        let rel = reliability_exponent(&sp, &gaps);
        // (0.5 * 0.04 * 1) / (8 * 3/16 + 20 * 0.2) = 0.02 / 5.5
        assert!((rel.eta_typ - 0.02 / 5.5).abs() < 1e-9);
        assert_eq!(rel.pi_root, 0.5);
        assert_eq!(rel.pi_max, 0.5);
    }

    #[test]
    fn reliability_mass_tends_to_one() {
        let gaps = spectral_gaps(spec(DB2, 8, r(1, 2), r(1, 5)).chain(), 32);
        let small = reliability_exponent(&spec(DB2, 8, r(1, 2), r(1, 5)), &gaps);
        assert_eq!(small.mass_lower.value, 0.0); // vacuous at n = 8
        assert!(small.mass_lower.clamped);
        let big = reliability_exponent(&spec(DB2, 1_000_000, r(1, 2), r(1, 5)), &gaps);
        assert!(big.mass_lower.value > 0.999999);
    }

    #[test]
    fn reliability_vanishes_with_zeta() {
        let gaps = spectral_gaps(spec(DB2, 10_000, r(1, 2), r(1, 5)).chain(), 32);
        let wide = reliability_exponent(&spec(DB2, 10_000, r(1, 2), r(1, 5)), &gaps);
        let narrow = reliability_exponent(&spec(DB2, 10_000, r(1, 2), r(1, 1000)), &gaps);
        assert!(narrow.eta_typ < wide.eta_typ / 100.0);
        assert_eq!(narrow.mass_lower.value, 0.0);
    }

    #[test]
    fn p_fail_fb_plugin_value() {
        let sp = spec(FB, 400, r(1, 2), r(1, 10));
        let prod = fb_product_chain();
        let gaps = spectral_gaps(&prod, 32);
        assert!(gaps.reversible);
        let b = p_fail_bound(&sp, 0.1, &gaps, 1.0).unwrap();
        let expected = 2.0f64.sqrt() * (-2.0f64 / 3.0).exp();
        assert!((b.value - expected).abs() < 1e-9);
        assert!((expected - 0.72609).abs() < 1e-4);
    }

    #[test]
    fn p_fail_monotone_in_eps() {
        let sp = spec(FB, 400, r(1, 2), r(1, 10));
        let gaps = spectral_gaps(&fb_product_chain(), 32);
        let at = |eps: f64| p_fail_bound(&sp, eps, &gaps, 1.0).unwrap().value;
        assert!(at(0.2) < at(0.1));
        assert!(at(0.4) < at(0.2));
    }

    #[test]
    fn p_fail_rejects_bad_eps() {
        let sp = spec(FB, 400, r(1, 2), r(1, 10));
        let gaps = spectral_gaps(&fb_product_chain(), 32);
        assert!(p_fail_bound(&sp, 0.0, &gaps, 1.0).is_err());
        assert!(p_fail_bound(&sp, 0.5, &gaps, 1.0).is_err());
    }

    #[test]
    fn ec_size_bound_sanity() {
        let sp = spec(DB2, 8, r(1, 2), r(1, 5));
        let pool_log2 = 1.0; // |C_pool| = 2 exactly for this fixture
        let ec = ec_size_bound(&sp, pool_log2, 0.7, 0.9);
        assert!(ec.p_max_log2 >= -pool_log2); // skew exponent is nonnegative
        assert!(ec.size_lower <= pool_log2.exp2() + 1e-9 || ec.size_lower < 1.0);
        assert!(ec.p_fail_eff >= 0.7 - 1e-12);
    }

    #[test]
    fn ec_size_bound_zeta_zero_limit() {
        // with ζ -> 0 the skew exponent vanishes and P̄_max -> 1/|C_pool|
        let sp = spec(DB2, 8, r(1, 2), r(1, 1_000_000_000));
        let ec = ec_size_bound(&sp, 3.0, 1e-3, 1.0);
        assert!((ec.p_max_log2 - (-3.0)).abs() < 1e-4);
    }

    #[test]
    fn claim1_ratio_holds_on_fixture_pools() {
        use crate::pool::{enumerate_pool, Walk};
        for (text, n, alpha, zeta) in [(DB2, 8, r(1, 2), r(1, 5)), (FB, 4, r(1, 2), r(1, 4))] {
            let sp = spec(text, n, alpha, zeta);
            let pool = enumerate_pool(&sp, 1000).unwrap();
            let chain = sp.chain();
            let g = sp.graph();
            let cap = -2.0
                * rational_to_f64(sp.alpha())
                * sp.n() as f64
                * rational_to_f64(sp.zeta())
                * claim1_exponent(chain);
            for a in &pool {
                for b in &pool {
                    let pa = Walk::new(g, 0, a.prefix_path().to_vec())
                        .unwrap()
                        .probability(chain);
                    let pb = Walk::new(g, 0, b.prefix_path().to_vec())
                        .unwrap()
                        .probability(chain);
                    let ratio = rational_to_f64(&(pa / pb)).log2();
                    assert!(ratio <= cap + 1e-9, "ratio {ratio} cap {cap}");
                }
            }
        }
    }

    /// Per-vertex cumulative transition table for fast walk sampling.
    struct Sampler {
        pi_cum: Vec<f64>,
        // per vertex: (cumulative prob, label, dst)
        steps: Vec<Vec<(f64, usize, usize)>>,
    }

    impl Sampler {
        fn new(chain: &MarkovChain) -> Sampler {
            let g = chain.graph();
            let mut acc = 0.0;
            let pi_cum = chain
                .stationary_distribution()
                .iter()
                .map(|p| {
                    acc += rational_to_f64(p);
                    acc
                })
                .collect();
            let steps = (0..g.vertex_count())
                .map(|v| {
                    let mut acc = 0.0;
                    g.out_edges(v)
                        .map(|id| {
                            acc += rational_to_f64(&chain.edge_cond_prob(id));
                            (acc, g.edges()[id].label, g.edges()[id].dst)
                        })
                        .collect()
                })
                .collect();
            Sampler { pi_cum, steps }
        }

        /// One stationary-start random walk, returning its labels.
        fn walk(&self, len: usize, rng: &mut impl Rng, out: &mut Vec<usize>) {
            out.clear();
            let u: f64 = rng.gen();
            let mut current = self.pi_cum.iter().position(|&c| u < c).unwrap_or(0);
            for _ in 0..len {
                let u: f64 = rng.gen();
                let row = &self.steps[current];
                let &(_, label, dst) = row
                    .iter()
                    .find(|&&(c, _, _)| u < c)
                    .unwrap_or(row.last().unwrap());
                out.push(label);
                current = dst;
            }
        }
    }

    #[test]
    fn lemma1_mean_distance_monte_carlo() {
        let g = parse_graph(GM).unwrap();
        let (chain, _) = maxentropic_chain(&g).unwrap();
        let (s, _) = collision_and_distance(&chain);
        let target = 1.0 - rational_to_f64(&s);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let sampler = Sampler::new(&chain);
        let (len, pairs) = (64usize, 10_000usize);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut sum = 0.0;
        for _ in 0..pairs {
            sampler.walk(len, &mut rng, &mut a);
            sampler.walk(len, &mut rng, &mut b);
            let d = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            sum += d as f64 / len as f64;
        }
        let mean = sum / pairs as f64;
        // per-position variance ≤ 1/4; crude SE bound for correlated positions
        let se = 0.5 / (pairs as f64).sqrt() * 3.0;
        assert!((mean - target).abs() < 3.0 * se + 0.01, "mean {mean} target {target}");
    }

    #[test]
    fn lemma2_monte_carlo_domination_fb() {
        let sp = spec(FB, 400, r(1, 2), r(1, 10));
        let gaps = spectral_gaps(&fb_product_chain(), 32);
        let bound = p_fail_bound(&sp, 0.1, &gaps, 1.0).unwrap().value;
        let chain = sp.chain();
        let n_prime = sp.n_prime();
        let (s, _) = collision_and_distance(chain);
        let threshold = 1.0 - rational_to_f64(&s) - 0.1; // 0.4
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let sampler = Sampler::new(chain);
        let pairs = 100_000usize;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut bad = 0usize;
        for _ in 0..pairs {
            sampler.walk(n_prime, &mut rng, &mut a);
            sampler.walk(n_prime, &mut rng, &mut b);
            let d = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            if (d as f64 / n_prime as f64) < threshold {
                bad += 1;
            }
        }
        let emp = bad as f64 / pairs as f64;
        let sigma = (bound * (1.0 - bound) / pairs as f64).sqrt();
        assert!(emp <= bound + 3.0 * sigma, "empirical {emp} bound {bound}");
    }

    #[test]
    fn theorem1_monte_carlo_domination_fb() {
        let sp = spec(FB, 2000, r(1, 2), r(1, 5));
        let gaps = spectral_gaps(sp.chain(), 32);
        let rel = reliability_exponent(&sp, &gaps);
        assert!(rel.mass_lower.value > 0.9);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let sampler = Sampler::new(sp.chain());
        let trials = 100_000usize;
        let n_prime = sp.n_prime();
        let zeta = rational_to_f64(sp.zeta());
        let mut labels = Vec::new();
        let mut typical = 0usize;
        for _ in 0..trials {
            sampler.walk(n_prime, &mut rng, &mut labels);
            let ones = labels.iter().filter(|&&l| l == 1).count() as f64;
            let f1 = ones / n_prime as f64;
            if (f1 - 0.5).abs() < zeta && (1.0 - f1 - 0.5).abs() < zeta {
                typical += 1;
            }
        }
        let emp = typical as f64 / trials as f64;
        let sigma = (emp * (1.0 - emp) / trials as f64).sqrt();
        assert!(
            emp + 3.0 * sigma >= rel.mass_lower.value,
            "empirical {emp} bound {}",
            rel.mass_lower.value
        );
    }

    #[test]
    fn report_assembles_consistently() {
        let sp = spec(FB, 400, r(1, 2), r(1, 10));
        let gaps = spectral_gaps(sp.chain(), 32);
        let pgaps = spectral_gaps(&fb_product_chain(), 32);
        let rep = bounds_report(&sp, 0.1, &gaps, &pgaps, 1.0, 10.0).unwrap();
        assert_eq!(rep.s, 0.5);
        assert_eq!(rep.expected_rel_distance, 0.5);
        assert!(rep.p_fail.value <= 1.0 && rep.p_fail.value > 0.0);
        assert!(rep.p_fail_eff >= rep.p_fail.value - 1e-12);
        assert_eq!(rep.n, 400);
        assert_eq!(rep.eps, 0.1);
    }
}
