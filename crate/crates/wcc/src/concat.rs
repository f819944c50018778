//! The concatenated codec: a Reed-Solomon outer code over a prime field laid
//! on top of an inner table of weakly constrained codewords.
//!
//! Field size is the largest prime not exceeding the inner table size
//! (Bertrand keeps the loss under one bit per symbol); evaluation points are
//! the powers of the smallest primitive element so codewords are bit-exact
//! across runs. Decoding is errors-only bounded-distance: syndromes,
//! Berlekamp-Massey, Chien search, Forney.

use rand::Rng;
use thiserror::Error;

use crate::markov::{quantize_n_integral, IntegralChain, MarkovChain};
use crate::pool::{Codeword, Walk};
use crate::Rational;

#[derive(Debug, Error)]
pub enum ConcatError {
    #[error("inner code must hold at least 3 codewords, got {0}")]
    FieldTooSmall(usize),
    #[error("symbol {0} is outside the field")]
    BadSymbol(u64),
    #[error("expected {want} symbols, got {got}")]
    BadLength { want: usize, got: usize },
    #[error("outer dimension K = {0} must lie in 1..=q-1")]
    BadK(usize),
    #[error("uncorrectable word")]
    DecodeFailure,
    #[error("inner codewords must share one blocklength")]
    RaggedInnerTable,
    #[error("no n-integral blocklength near {0} (searched ±|E|)")]
    NoFeasibleN(u64),
    #[error(transparent)]
    Chain(#[from] crate::markov::ChainError),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest prime `q ≤ ec_size`; Bertrand guarantees `q > ec_size/2`.
pub fn select_field(ec_size: usize) -> Result<u64, ConcatError> {
    if ec_size < 3 {
        return Err(ConcatError::FieldTooSmall(ec_size));
    }
    let q = (2..=ec_size as u64).rev().find(|&n| is_prime(n)).unwrap();
    assert!(q > ec_size as u64 / 2);
    Ok(q)
}

/// Arithmetic mod a prime.
#[derive(Debug, Clone, Copy)]
struct Gf {
    p: u64,
}

impl Gf {
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

/// Smallest primitive element of `GF(q)*`.
pub fn smallest_primitive_element(q: u64) -> u64 {
    let gf = Gf { p: q };
    let order = q - 1;
    let mut factors = Vec::new();
    let mut rem = order;
    let mut d = 2;
    while d * d <= rem {
        if rem % d == 0 {
            factors.push(d);
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        factors.push(rem);
    }
    (2..q)
        .find(|&g| factors.iter().all(|&f| gf.pow(g, order / f) != 1))
        .expect("every prime field has a primitive element")
}

/// Parameters of one concatenated code: the prime field, the outer RS
/// dimension, and the inner lookup table (first q codewords in file order).
#[derive(Debug, Clone)]
pub struct ConcatParams {
    q: u64,
    k: usize,
    g: u64,
    c0: f64,
    inner: Vec<Vec<usize>>,
    n_inner: usize,
    d_in: usize,
    ec_size: usize,
}

impl ConcatParams {
    /// Build from a raw inner table of label sequences.
    pub fn from_table(table: Vec<Vec<usize>>, k: usize, c0: f64) -> Result<Self, ConcatError> {
        let ec_size = table.len();
        let q = select_field(ec_size)?;
        if k == 0 || k as u64 > q - 1 {
            return Err(ConcatError::BadK(k));
        }
        let inner: Vec<Vec<usize>> = table.into_iter().take(q as usize).collect();
        let n_inner = inner[0].len();
        if inner.iter().any(|c| c.len() != n_inner) {
            return Err(ConcatError::RaggedInnerTable);
        }
        let mut d_in = n_inner;
        for i in 0..inner.len() {
            for j in (i + 1)..inner.len() {
                let d = inner[i]
                    .iter()
                    .zip(&inner[j])
                    .filter(|(a, b)| a != b)
                    .count();
                d_in = d_in.min(d);
            }
        }
        Ok(ConcatParams {
            q,
            k,
            g: smallest_primitive_element(q),
            c0,
            inner,
            n_inner,
            d_in,
            ec_size,
        })
    }

    /// Build from enumerated/expurgated codewords (codebook-file order).
    pub fn from_inner(codewords: &[Codeword], k: usize, c0: f64) -> Result<Self, ConcatError> {
        Self::from_table(
            codewords.iter().map(|c| c.labels().to_vec()).collect(),
            k,
            c0,
        )
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn primitive_element(&self) -> u64 {
        self.g
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn inner_table(&self) -> &[Vec<usize>] {
        &self.inner
    }

    pub fn n_inner(&self) -> usize {
        self.n_inner
    }

    /// Achieved minimum full-length distance of the inner table.
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn n_out(&self) -> usize {
        self.q as usize - 1
    }

    pub fn d_out(&self) -> usize {
        self.n_out() - self.k + 1
    }

    pub fn n_con(&self) -> usize {
        self.n_inner * self.n_out()
    }

    /// `D_con = d_in · D_out`.
    pub fn d_con(&self) -> usize {
        self.d_in * self.d_out()
    }

    /// `R_in = log2 |C_ec| / n`.
    pub fn r_in(&self) -> f64 {
        (self.ec_size as f64).log2() / self.n_inner as f64
    }

    /// `R'_in = log2 q / n`; always exceeds `R_in − 1/n` by Bertrand.
    pub fn r_in_prime(&self) -> f64 {
        (self.q as f64).log2() / self.n_inner as f64
    }

    /// `R_out = K/(q−1)`, exact.
    pub fn r_out(&self) -> Rational {
        Rational::new((self.k as i64).into(), (self.q as i64 - 1).into())
    }

    /// `R_con = R'_in · R_out`.
    pub fn r_con(&self) -> f64 {
        self.r_in_prime() * self.k as f64 / (self.q - 1) as f64
    }

    fn gf(&self) -> Gf {
        Gf { p: self.q }
    }
}

/// Evaluate the message polynomial `m(x) = Σ msg_i x^i` at `g^0 .. g^{q-2}`.
pub fn rs_encode(msg: &[u64], params: &ConcatParams) -> Result<Vec<u64>, ConcatError> {
    if msg.len() != params.k {
        return Err(ConcatError::BadLength {
            want: params.k,
            got: msg.len(),
        });
    }
    let gf = params.gf();
    if let Some(&s) = msg.iter().find(|&&s| s >= params.q) {
        return Err(ConcatError::BadSymbol(s));
    }
    let mut out = Vec::with_capacity(params.n_out());
    let mut point = 1u64;
    for _ in 0..params.n_out() {
        // Horner
        let mut acc = 0u64;
        for &c in msg.iter().rev() {
            acc = gf.add(gf.mul(acc, point), c);
        }
        out.push(acc);
        point = gf.mul(point, params.g);
    }
    Ok(out)
}

/// Berlekamp-Massey over GF(p): minimal LFSR (error locator, `Λ(0) = 1`).
fn berlekamp_massey(synd: &[u64], gf: Gf) -> Vec<u64> {
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bb = 1u64;
    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=l.min(c.len() - 1) {
            d = gf.add(d, gf.mul(c[i], synd[n - i]));
        }
        if d == 0 {
            m += 1;
        } else if 2 * l <= n {
            let t = c.clone();
            let coef = gf.mul(d, gf.inv(bb));
            if c.len() < b.len() + m {
                c.resize(b.len() + m, 0);
            }
            for (i, &bi) in b.iter().enumerate() {
                c[i + m] = gf.sub(c[i + m], gf.mul(coef, bi));
            }
            l = n + 1 - l;
            b = t;
            bb = d;
            m = 1;
        } else {
            let coef = gf.mul(d, gf.inv(bb));
            if c.len() < b.len() + m {
                c.resize(b.len() + m, 0);
            }
            for (i, &bi) in b.iter().enumerate() {
                c[i + m] = gf.sub(c[i + m], gf.mul(coef, bi));
            }
            m += 1;
        }
    }
    c.truncate(l + 1);
    c
}

fn poly_eval(poly: &[u64], x: u64, gf: Gf) -> u64 {
    let mut acc = 0u64;
    for &c in poly.iter().rev() {
        acc = gf.add(gf.mul(acc, x), c);
    }
    acc
}

/// Bounded-distance RS decode: corrects up to `⌊(D_out−1)/2⌋` symbol errors,
/// fails beyond the radius.
pub fn rs_decode(word: &[u64], params: &ConcatParams) -> Result<Vec<u64>, ConcatError> {
    if word.len() != params.n_out() {
        return Err(ConcatError::BadLength {
            want: params.n_out(),
            got: word.len(),
        });
    }
    let gf = params.gf();
    if let Some(&s) = word.iter().find(|&&s| s >= params.q) {
        return Err(ConcatError::BadSymbol(s));
    }
    let two_t = params.n_out() - params.k;
    let mut corrected = word.to_vec();

    if two_t > 0 {
        // S_j = Σ_i r_i g^{ij}, j = 1..2t
        let synd: Vec<u64> = (1..=two_t as u64)
            .map(|j| {
                let mut s = 0u64;
                for (i, &r) in word.iter().enumerate() {
                    s = gf.add(s, gf.mul(r, gf.pow(params.g, i as u64 * j)));
                }
                s
            })
            .collect();
        if synd.iter().any(|&s| s != 0) {
            let lambda = berlekamp_massey(&synd, gf);
            let l = lambda.len() - 1;
            if l > two_t / 2 {
                return Err(ConcatError::DecodeFailure);
            }
            // Ω(x) = S(x)Λ(x) mod x^{2t}
            let mut omega = vec![0u64; two_t];
            for (i, &si) in synd.iter().enumerate() {
                for (j, &lj) in lambda.iter().enumerate() {
                    if i + j < two_t {
                        omega[i + j] = gf.add(omega[i + j], gf.mul(si, lj));
                    }
                }
            }
            // Λ'(x)
            let lambda_prime: Vec<u64> = lambda
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| gf.mul(i as u64 % params.q, c))
                .collect();
            // Chien search over positions
            let mut found = 0usize;
            for i in 0..params.n_out() {
                let x_inv = gf.inv(gf.pow(params.g, i as u64));
                if poly_eval(&lambda, x_inv, gf) == 0 {
                    found += 1;
                    let num = poly_eval(&omega, x_inv, gf);
                    let den = poly_eval(&lambda_prime, x_inv, gf);
                    if den == 0 {
                        return Err(ConcatError::DecodeFailure);
                    }
                    // e = -Ω(X⁻¹)/Λ'(X⁻¹)
                    let e = gf.sub(0, gf.mul(num, gf.inv(den)));
                    corrected[i] = gf.sub(corrected[i], e);
                }
            }
            if found != l {
                return Err(ConcatError::DecodeFailure);
            }
            // re-verify
            for j in 1..=two_t as u64 {
                let mut s = 0u64;
                for (i, &r) in corrected.iter().enumerate() {
                    s = gf.add(s, gf.mul(r, gf.pow(params.g, i as u64 * j)));
                }
                if s != 0 {
                    return Err(ConcatError::DecodeFailure);
                }
            }
        }
    }

    // inverse DFT: m_k = (1/N) Σ_i c_i g^{-ik}; N = q-1 ≡ -1, so 1/N = -1
    let mut msg = Vec::with_capacity(params.k);
    for k in 0..params.n_out() as u64 {
        let mut s = 0u64;
        for (i, &c) in corrected.iter().enumerate() {
            s = gf.add(s, gf.mul(c, gf.inv(gf.pow(params.g, i as u64 * k))));
        }
        let coeff = gf.sub(0, s);
        if k < params.k as u64 {
            msg.push(coeff);
        } else if coeff != 0 {
            return Err(ConcatError::DecodeFailure);
        }
    }
    Ok(msg)
}

/// Outer-encode then concatenate inner table entries.
pub fn concat_encode(msg: &[u64], params: &ConcatParams) -> Result<Vec<usize>, ConcatError> {
    let outer = rs_encode(msg, params)?;
    let mut labels = Vec::with_capacity(params.n_con());
    for &s in &outer {
        labels.extend_from_slice(&params.inner[s as usize]);
    }
    Ok(labels)
}

/// Nearest inner codeword by full-length Hamming distance, smallest index on
/// ties.
pub fn inner_decode(block: &[usize], params: &ConcatParams) -> u64 {
    let mut best = 0usize;
    let mut best_d = usize::MAX;
    for (idx, c) in params.inner.iter().enumerate() {
        let d = c.iter().zip(block).filter(|(a, b)| a != b).count();
        if d < best_d {
            best_d = d;
            best = idx;
        }
    }
    best as u64
}

/// Blockwise inner MD decoding followed by the outer RS decoder.
pub fn concat_decode(word: &[usize], params: &ConcatParams) -> Result<Vec<u64>, ConcatError> {
    if word.len() != params.n_con() {
        return Err(ConcatError::BadLength {
            want: params.n_con(),
            got: word.len(),
        });
    }
    let symbols: Vec<u64> = word
        .chunks(params.n_inner)
        .map(|b| inner_decode(b, params))
        .collect();
    rs_decode(&symbols, params)
}

/// Check a concatenated codeword is still weakly constrained: a closed root
/// cycle whose edge counts are `N_out · m(e)`.
pub fn verify_concatenated(
    labels: &[usize],
    ichain: &IntegralChain,
    n_out: u64,
    root: usize,
) -> bool {
    let g = ichain.parent().graph();
    let Ok(w) = Walk::from_labels(g, root, labels) else {
        return false;
    };
    let scaled = ichain.scaled(n_out);
    w.end() == root && w.counts() == scaled.counts()
}

/// Memoryless substitution channel: each symbol flips with probability `p`
/// to a uniformly random different symbol.
pub fn substitution_channel(
    labels: &mut [usize],
    p: f64,
    alphabet: usize,
    rng: &mut impl Rng,
) -> usize {
    let mut flips = 0;
    for l in labels.iter_mut() {
        if rng.gen::<f64>() < p {
            let offset = rng.gen_range(1..alphabet);
            *l = (*l + offset) % alphabet;
            flips += 1;
        }
    }
    flips
}

/// Blocklength plan for a target concatenated length under `n ≈ c0 log2 N`.
#[derive(Debug, Clone)]
pub struct ScalePlan {
    pub n: u64,
    pub n_out: u64,
    /// `q ≤ 2^{n R_in}`, the polynomial-size claim instantiated.
    pub q_bound_log2: f64,
    pub target: u64,
    pub c0: f64,
}

/// Pick `n = round(c0 log2 target)`, adjusted to the nearest n-integral
/// feasible blocklength (upward first).
pub fn scale_plan(
    target_n_con: u64,
    c0: f64,
    chain: &MarkovChain,
    r_in: f64,
) -> Result<ScalePlan, ConcatError> {
    if c0 <= 0.0 || target_n_con < 2 {
        return Err(ConcatError::NoFeasibleN(target_n_con));
    }
    let n0 = (c0 * (target_n_con as f64).log2()).round() as i64;
    let e = chain.graph().edge_count() as i64;
    let mut candidates: Vec<i64> = (n0..=n0 + e).collect();
    candidates.extend((n0 - e..n0).rev());
    for n in candidates {
        if n < e || n <= 0 {
            continue;
        }
        if quantize_n_integral(chain, n as u64).is_ok() {
            let n = n as u64;
            return Ok(ScalePlan {
                n,
                n_out: target_n_con / n,
                q_bound_log2: n as f64 * r_in,
                target: target_n_con,
                c0,
            });
        }
    }
    Err(ConcatError::NoFeasibleN(target_n_con))
}
