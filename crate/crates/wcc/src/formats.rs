//! Line-oriented file formats: chain files, pool codebooks, expurgated
//! codebooks, and concatenated-code manifests.
//!
//! Every artifact embeds the content hash of the canonical graph file it was
//! built from; readers verify the hash against the graph they are handed, so
//! mixed-up artifacts fail loudly instead of silently decoding garbage.
//! Writers are deterministic: the same inputs always produce the same bytes.

use num_traits::Signed;
use thiserror::Error;

use crate::expurgate::{ExpurgatedCode, ExpurgationMode};
use crate::graph::LabeledGraph;
use crate::markov::MarkovChain;
use crate::pool::{Codeword, PoolSpec};
use crate::Rational;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("graph hash mismatch: artifact built from {artifact}, given graph {given}")]
    HashMismatch { artifact: String, given: String },
    #[error(transparent)]
    Chain(#[from] crate::markov::ChainError),
    #[error(transparent)]
    Pool(#[from] crate::pool::PoolError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parse an exact rational: `num/den` or a bare integer. Decimal notation is
/// rejected so precision is never lost silently.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    if s.contains('.') {
        return Err(format!("decimal notation rejected, use num/den: {s}"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: crate::Int = num.parse().map_err(|_| format!("bad numerator: {s}"))?;
    let den: crate::Int = den.parse().map_err(|_| format!("bad denominator: {s}"))?;
    if den == 0.into() {
        return Err(format!("zero denominator: {s}"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `num/den` rendering (always includes the denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

// ------------------------------------------------------------------ chains

/// Render a chain as `prob <src> <dst> <label> <num>/<den>` lines in edge-id
/// order.
pub fn write_chain_file(chain: &MarkovChain) -> String {
    let g = chain.graph();
    let mut out = String::new();
    for (id, e) in g.edges().iter().enumerate() {
        out.push_str(&format!(
            "prob {} {} {} {}\n",
            g.vertices()[e.src],
            g.vertices()[e.dst],
            g.alphabet()[e.label],
            format_rational(chain.edge_prob(id)),
        ));
    }
    out
}

/// Parse a chain file against a graph; every edge must be listed exactly
/// once.
pub fn parse_chain_file(text: &str, graph: &LabeledGraph) -> Result<MarkovChain, FormatError> {
    let mut probs: Vec<Option<Rational>> = vec![None; graph.edge_count()];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 5 || tok[0] != "prob" {
            return Err(syntax(line_no, "expected `prob <src> <dst> <label> <num>/<den>`"));
        }
        let src = graph
            .vertex_index(tok[1])
            .ok_or_else(|| syntax(line_no, format!("unknown vertex {}", tok[1])))?;
        let dst = graph
            .vertex_index(tok[2])
            .ok_or_else(|| syntax(line_no, format!("unknown vertex {}", tok[2])))?;
        let label = graph
            .symbol_index(tok[3])
            .ok_or_else(|| syntax(line_no, format!("unknown symbol {}", tok[3])))?;
        let p = parse_rational(tok[4]).map_err(|m| syntax(line_no, m))?;
        if p.is_negative() {
            return Err(syntax(line_no, "negative probability"));
        }
        let id = graph
            .edges()
            .iter()
            .position(|e| e.src == src && e.dst == dst && e.label == label)
            .ok_or_else(|| syntax(line_no, "no such edge in the graph"))?;
        if probs[id].replace(p).is_some() {
            return Err(syntax(line_no, "duplicate edge line"));
        }
    }
    let edge_prob: Vec<Rational> = probs
        .into_iter()
        .enumerate()
        .map(|(id, p)| p.ok_or_else(|| syntax(0, format!("edge {id} has no prob line"))))
        .collect::<Result<_, _>>()?;
    Ok(MarkovChain::new(graph.clone(), edge_prob)?)
}

// --------------------------------------------------------------- codebooks

/// Header fields shared by `wccpool` and `wccec` files.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookHeader {
    pub n: u64,
    pub alpha: Rational,
    pub zeta: Rational,
    pub root: String,
    pub graphhash: String,
}

impl CodebookHeader {
    pub fn from_spec(spec: &PoolSpec) -> Self {
        CodebookHeader {
            n: spec.n(),
            alpha: spec.alpha().clone(),
            zeta: spec.zeta().clone(),
            root: spec.graph().vertices()[spec.v_root()].clone(),
            graphhash: spec.graph().content_hash(),
        }
    }

    fn render(&self, out: &mut String) {
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("alpha {}\n", format_rational(&self.alpha)));
        out.push_str(&format!("zeta {}\n", format_rational(&self.zeta)));
        out.push_str(&format!("root {}\n", self.root));
        out.push_str(&format!("graphhash {}\n", self.graphhash));
    }
}

fn render_codeword(labels: &[usize], g: &LabeledGraph) -> String {
    labels
        .iter()
        .map(|&l| g.alphabet()[l].as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serialize a pool codebook (`wccpool v1`).
pub fn write_codebook(spec: &PoolSpec, pool: &[Codeword]) -> String {
    let mut out = String::from("wccpool v1\n");
    CodebookHeader::from_spec(spec).render(&mut out);
    for c in pool {
        out.push_str(&render_codeword(c.labels(), spec.graph()));
        out.push('\n');
    }
    out
}

struct HeaderParser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> HeaderParser<'a> {
    fn new(text: &'a str, magic: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate().peekable();
        match lines.next() {
            Some((_, l)) if l.trim() == magic => {}
            _ => return Err(syntax(1, format!("expected header `{magic}`"))),
        }
        Ok(HeaderParser { lines })
    }

    /// Consume one `key value...` line, returning the value tokens.
    fn field(&mut self, key: &str) -> Result<Vec<String>, FormatError> {
        let (idx, line) = self
            .lines
            .next()
            .ok_or_else(|| syntax(0, format!("missing field {key}")))?;
        let mut tok = line.split_whitespace();
        if tok.next() != Some(key) {
            return Err(syntax(idx + 1, format!("expected field {key}")));
        }
        let vals: Vec<String> = tok.map(str::to_string).collect();
        if vals.is_empty() {
            return Err(syntax(idx + 1, format!("field {key} has no value")));
        }
        Ok(vals)
    }

    fn rational_field(&mut self, key: &str) -> Result<Rational, FormatError> {
        let vals = self.field(key)?;
        parse_rational(&vals[0]).map_err(|m| syntax(0, m))
    }

    fn common_header(&mut self) -> Result<CodebookHeader, FormatError> {
        let n = self.field("n")?[0]
            .parse()
            .map_err(|_| syntax(0, "bad n"))?;
        let alpha = self.rational_field("alpha")?;
        let zeta = self.rational_field("zeta")?;
        let root = self.field("root")?[0].clone();
        let graphhash = self.field("graphhash")?[0].clone();
        Ok(CodebookHeader {
            n,
            alpha,
            zeta,
            root,
            graphhash,
        })
    }

    fn codewords(
        self,
        header: &CodebookHeader,
        graph: &LabeledGraph,
    ) -> Result<Vec<Codeword>, FormatError> {
        let root = graph
            .vertex_index(&header.root)
            .ok_or_else(|| syntax(0, format!("unknown root vertex {}", header.root)))?;
        let alpha_n = &header.alpha * Rational::from_integer(header.n.into());
        let prefix_len = (alpha_n.floor().numer())
            .try_into()
            .map_err(|_| syntax(0, "bad alpha"))?;
        let mut out = Vec::new();
        for (idx, raw) in self.lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let labels: Vec<usize> = line
                .split_whitespace()
                .map(|s| {
                    graph
                        .symbol_index(s)
                        .ok_or_else(|| syntax(idx + 1, format!("unknown symbol {s}")))
                })
                .collect::<Result<_, _>>()?;
            if labels.len() != header.n as usize {
                return Err(syntax(idx + 1, "codeword length differs from n"));
            }
            out.push(Codeword::from_labels(graph, root, &labels, prefix_len)?);
        }
        Ok(out)
    }
}

fn check_hash(header: &CodebookHeader, graph: &LabeledGraph) -> Result<(), FormatError> {
    let given = graph.content_hash();
    if header.graphhash != given {
        return Err(FormatError::HashMismatch {
            artifact: header.graphhash.clone(),
            given,
        });
    }
    Ok(())
}

/// Parse a `wccpool v1` codebook, verifying the graph hash.
pub fn read_codebook(
    text: &str,
    graph: &LabeledGraph,
) -> Result<(CodebookHeader, Vec<Codeword>), FormatError> {
    let mut p = HeaderParser::new(text, "wccpool v1")?;
    let header = p.common_header()?;
    check_hash(&header, graph)?;
    let codewords = p.codewords(&header, graph)?;
    Ok((header, codewords))
}

// --------------------------------------------------- expurgated codebooks

/// Serialize an expurgated codebook (`wccec v1`): the pool format plus the
/// distance target `eps` and the expurgation mode.
pub fn write_ec_codebook(spec: &PoolSpec, code: &ExpurgatedCode, eps: &Rational) -> String {
    let mut out = String::from("wccec v1\n");
    CodebookHeader::from_spec(spec).render(&mut out);
    out.push_str(&format!("eps {}\n", format_rational(eps)));
    match code.mode() {
        ExpurgationMode::Randomized { seed, z } => {
            out.push_str(&format!("mode randomized {seed} {z}\n"));
        }
        ExpurgationMode::Greedy => out.push_str("mode greedy\n"),
    }
    for c in code.codewords() {
        out.push_str(&render_codeword(c.labels(), spec.graph()));
        out.push('\n');
    }
    out
}

/// Parse a `wccec v1` codebook, verifying the graph hash.
pub fn read_ec_codebook(
    text: &str,
    graph: &LabeledGraph,
) -> Result<(CodebookHeader, Rational, ExpurgationMode, Vec<Codeword>), FormatError> {
    let mut p = HeaderParser::new(text, "wccec v1")?;
    let header = p.common_header()?;
    check_hash(&header, graph)?;
    let eps = p.rational_field("eps")?;
    let mode_tok = p.field("mode")?;
    let mode = match mode_tok[0].as_str() {
        "greedy" => ExpurgationMode::Greedy,
        "randomized" if mode_tok.len() == 3 => ExpurgationMode::Randomized {
            seed: mode_tok[1].parse().map_err(|_| syntax(0, "bad seed"))?,
            z: mode_tok[2].parse().map_err(|_| syntax(0, "bad z"))?,
        },
        _ => return Err(syntax(0, "bad mode line")),
    };
    let codewords = p.codewords(&header, graph)?;
    Ok((header, eps, mode, codewords))
}

// ------------------------------------------------------------- manifests

/// The concatenated-code manifest (`wcccat v1`).
#[derive(Debug, Clone, PartialEq)]
pub struct CatManifest {
    pub q: u64,
    pub k: usize,
    pub c0: f64,
    /// Path to the inner `wccec` codebook.
    pub inner: String,
    /// Primitive element generating the evaluation points.
    pub g: u64,
    pub graphhash: String,
}

pub fn write_manifest(m: &CatManifest) -> String {
    format!(
        "wcccat v1\nq {}  K {}  c0 {}\ninner {}\ng {}\ngraphhash {}\n",
        m.q, m.k, m.c0, m.inner, m.g, m.graphhash
    )
}

pub fn parse_manifest(text: &str) -> Result<CatManifest, FormatError> {
    let mut p = HeaderParser::new(text, "wcccat v1")?;
    let (idx, line) = p
        .lines
        .next()
        .ok_or_else(|| syntax(0, "missing q/K/c0 line"))?;
    let tok: Vec<&str> = line.split_whitespace().collect();
    if tok.len() != 6 || tok[0] != "q" || tok[2] != "K" || tok[4] != "c0" {
        return Err(syntax(idx + 1, "expected `q <q>  K <K>  c0 <real>`"));
    }
    let q = tok[1].parse().map_err(|_| syntax(idx + 1, "bad q"))?;
    let k = tok[3].parse().map_err(|_| syntax(idx + 1, "bad K"))?;
    let c0 = tok[5].parse().map_err(|_| syntax(idx + 1, "bad c0"))?;
    let inner = p.field("inner")?.join(" ");
    let g = p.field("g")?[0].parse().map_err(|_| syntax(0, "bad g"))?;
    let graphhash = p.field("graphhash")?[0].clone();
    Ok(CatManifest {
        q,
        k,
        c0,
        inner,
        g,
        graphhash,
    })
}

/// Symbol-stream rendering of an encoded payload (one walk per line).
pub fn render_payload(labels: &[usize], graph: &LabeledGraph) -> String {
    render_codeword(labels, graph)
}

/// Parse a symbol stream back to label ids.
pub fn parse_payload(line: &str, graph: &LabeledGraph) -> Result<Vec<usize>, FormatError> {
    line.split_whitespace()
        .map(|s| {
            graph
                .symbol_index(s)
                .ok_or_else(|| syntax(1, format!("unknown symbol {s}")))
        })
        .collect()
}
