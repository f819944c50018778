//! Labeled directed multigraphs and Eulerian completions.
//!
//! A [`LabeledGraph`] is the presentation of a constrained system: a finite
//! directed graph whose edges carry symbols from a declared alphabet. The
//! declaration order of the alphabet, vertices, and edges is load-bearing: it
//! fixes the edge order behind "lexicographically first" and makes codebooks
//! reproducible across runs from the same graph file.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Errors raised while parsing or validating graph files.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undeclared vertex `{name}`")]
    UndeclaredVertex { line: usize, name: String },
    #[error("line {line}: undeclared symbol `{name}`")]
    UndeclaredSymbol { line: usize, name: String },
    #[error("line {line}: vertex `{vertex}` already has an out-edge labeled `{label}`")]
    NondeterministicEdge {
        line: usize,
        vertex: String,
        label: String,
    },
    #[error("no Eulerian path exists: {0}")]
    NoEulerianPath(String),
}

/// A directed edge; all fields are dense indices into the owning graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// A deterministic labeled directed graph `G = (V, E, L)` over a declared
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Vec<String>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    /// Build a graph from parts, enforcing determinism and index validity.
    pub fn new(
        alphabet: Vec<String>,
        vertices: Vec<String>,
        edges: Vec<(usize, usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = LabeledGraph {
            alphabet,
            vertices,
            edges: Vec::new(),
        };
        for (i, (src, dst, label)) in edges.into_iter().enumerate() {
            if src >= g.vertices.len() || dst >= g.vertices.len() {
                return Err(GraphError::UndeclaredVertex {
                    line: i,
                    name: format!("#{}", src.max(dst)),
                });
            }
            if label >= g.alphabet.len() {
                return Err(GraphError::UndeclaredSymbol {
                    line: i,
                    name: format!("#{label}"),
                });
            }
            if g.edges.iter().any(|e| e.src == src && e.label == label) {
                return Err(GraphError::NondeterministicEdge {
                    line: i,
                    vertex: g.vertices[src].clone(),
                    label: g.alphabet[label].clone(),
                });
            }
            g.edges.push(Edge { src, dst, label });
        }
        Ok(g)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    /// Out-edges of `v`, as edge ids.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.src == v)
            .map(|(i, _)| i)
    }

    /// In-edges of `v`, as edge ids.
    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.dst == v)
            .map(|(i, _)| i)
    }

    /// Sort key behind "lexicographically first": alphabet position of the
    /// label, then destination vertex index, then edge id.
    pub fn edge_order_key(&self, edge_id: usize) -> (usize, usize, usize) {
        let e = &self.edges[edge_id];
        (e.label, e.dst, edge_id)
    }

    /// Canonical graph-file serialization; its bytes are what artifact files
    /// hash to detect mismatched inputs.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("alphabet");
        for s in &self.alphabet {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
        for v in &self.vertices {
            out.push_str("vertex ");
            out.push_str(v);
            out.push('\n');
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {}\n",
                self.vertices[e.src], self.vertices[e.dst], self.alphabet[e.label]
            ));
        }
        out
    }

    /// Hex SHA-256 of [`Self::canonical_text`].
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.canonical_text().as_bytes());
        let d = h.finalize();
        d.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse the line-oriented graph file format.
///
/// ```text
/// alphabet <sym> [<sym> ...]
/// vertex <name>
/// edge <src> <dst> <label>
/// ```
///
/// `#` starts a comment; blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut alphabet: Vec<String> = Vec::new();
    let mut vertices: Vec<String> = Vec::new();
    let mut vindex: HashMap<String, usize> = HashMap::new();
    let mut sindex: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen_out: HashMap<(usize, usize), ()> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap();
        match keyword {
            "alphabet" => {
                for sym in toks {
                    if sindex.contains_key(sym) {
                        return Err(GraphError::Syntax {
                            line,
                            msg: format!("duplicate symbol `{sym}`"),
                        });
                    }
                    sindex.insert(sym.to_string(), alphabet.len());
                    alphabet.push(sym.to_string());
                }
            }
            "vertex" => {
                let name = toks.next().ok_or(GraphError::Syntax {
                    line,
                    msg: "vertex needs a name".into(),
                })?;
                if toks.next().is_some() {
                    return Err(GraphError::Syntax {
                        line,
                        msg: "vertex takes exactly one name".into(),
                    });
                }
                if vindex.contains_key(name) {
                    return Err(GraphError::Syntax {
                        line,
                        msg: format!("duplicate vertex `{name}`"),
                    });
                }
                vindex.insert(name.to_string(), vertices.len());
                vertices.push(name.to_string());
            }
            "edge" => {
                let (src, dst, label) = match (toks.next(), toks.next(), toks.next(), toks.next())
                {
                    (Some(s), Some(d), Some(l), None) => (s, d, l),
                    _ => {
                        return Err(GraphError::Syntax {
                            line,
                            msg: "edge takes <src> <dst> <label>".into(),
                        })
                    }
                };
                let s = *vindex.get(src).ok_or_else(|| GraphError::UndeclaredVertex {
                    line,
                    name: src.to_string(),
                })?;
                let d = *vindex.get(dst).ok_or_else(|| GraphError::UndeclaredVertex {
                    line,
                    name: dst.to_string(),
                })?;
                let l = *sindex
                    .get(label)
                    .ok_or_else(|| GraphError::UndeclaredSymbol {
                        line,
                        name: label.to_string(),
                    })?;
                if seen_out.insert((s, l), ()).is_some() {
                    return Err(GraphError::NondeterministicEdge {
                        line,
                        vertex: src.to_string(),
                        label: label.to_string(),
                    });
                }
                edges.push(Edge {
                    src: s,
                    dst: d,
                    label: l,
                });
            }
            other => {
                return Err(GraphError::Syntax {
                    line,
                    msg: format!("unknown keyword `{other}`"),
                })
            }
        }
    }

    if vertices.is_empty() {
        return Err(GraphError::Syntax {
            line: text.lines().count(),
            msg: "no vertices declared".into(),
        });
    }
    Ok(LabeledGraph {
        alphabet,
        vertices,
        edges,
    })
}

/// Structural findings about a graph; a report, never an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub deterministic: bool,
    pub irreducible: bool,
    pub aperiodic: bool,
    pub primitive: bool,
    /// Smallest exponent with all-pairs paths of that exact length, when
    /// found within the `|V|^2` search cap.
    pub primitivity_witness: Option<usize>,
    pub balanced: bool,
    pub eulerian_cycle_exists: bool,
    /// `(u, v)` when the graph is semi-balanced with out-surplus at `u` and
    /// in-surplus at `v`.
    pub semi_balanced_endpoints: Option<(usize, usize)>,
}

/// Compute the structural flags: irreducibility by reachability, aperiodicity
/// by cycle-length gcd, primitivity by capped matrix powers, balance on unit
/// multiplicities.
pub fn validate_graph(g: &LabeledGraph) -> ValidationReport {
    let n = g.vertex_count();
    let reach = reachability(g);
    let irreducible = (0..n).all(|u| (0..n).all(|v| reach[u][v]));

    let aperiodic = cycle_gcd(g).map(|p| p == 1).unwrap_or(false);

    let (primitive, witness) = primitivity_witness(g);

    let mut out_deg = vec![0usize; n];
    let mut in_deg = vec![0usize; n];
    for e in g.edges() {
        out_deg[e.src] += 1;
        in_deg[e.dst] += 1;
    }
    let balanced = (0..n).all(|v| out_deg[v] == in_deg[v]);
    let semi = semi_balanced(&out_deg, &in_deg);

    ValidationReport {
        deterministic: true, // construction enforces it
        irreducible,
        aperiodic,
        primitive,
        primitivity_witness: witness,
        balanced,
        eulerian_cycle_exists: irreducible && balanced,
        semi_balanced_endpoints: semi,
    }
}

fn semi_balanced(out_deg: &[usize], in_deg: &[usize]) -> Option<(usize, usize)> {
    let mut start = None;
    let mut end = None;
    for v in 0..out_deg.len() {
        match out_deg[v] as i64 - in_deg[v] as i64 {
            0 => {}
            1 if start.is_none() => start = Some(v),
            -1 if end.is_none() => end = Some(v),
            _ => return None,
        }
    }
    match (start, end) {
        (Some(u), Some(v)) => Some((u, v)),
        _ => None,
    }
}

fn reachability(g: &LabeledGraph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack = vec![s];
        reach[s][s] = true;
        while let Some(u) = stack.pop() {
            for e in g.edges().iter().filter(|e| e.src == u) {
                if !reach[s][e.dst] {
                    reach[s][e.dst] = true;
                    stack.push(e.dst);
                }
            }
        }
    }
    reach
}

/// Gcd of the lengths of all cycles, or `None` if the graph has no cycle.
/// Computed per strongly reachable region via BFS level differences.
fn cycle_gcd(g: &LabeledGraph) -> Option<usize> {
    let n = g.vertex_count();
    let mut overall: Option<usize> = None;
    // For each vertex, gcd of (d[u] + 1 - d[v]) over edges u->v inside the
    // region reachable from it and reaching back to it.
    let reach = reachability(g);
    for root in 0..n {
        // vertices on some cycle through root's strongly connected component
        let scc: Vec<usize> = (0..n)
            .filter(|&v| reach[root][v] && reach[v][root])
            .collect();
        if scc.len() == 1 {
            // self-loop?
            let v = scc[0];
            if !g.edges().iter().any(|e| e.src == v && e.dst == v) && v == root {
                continue;
            }
        }
        let mut level = vec![None; n];
        level[root] = Some(0i64);
        let mut queue = std::collections::VecDeque::from([root]);
        let mut gcd_acc: i64 = 0;
        while let Some(u) = queue.pop_front() {
            for e in g.edges().iter().filter(|e| e.src == u) {
                if !scc.contains(&e.dst) || !scc.contains(&u) {
                    continue;
                }
                match level[e.dst] {
                    None => {
                        level[e.dst] = Some(level[u].unwrap() + 1);
                        queue.push_back(e.dst);
                    }
                    Some(lv) => {
                        let diff = level[u].unwrap() + 1 - lv;
                        gcd_acc = gcd(gcd_acc.unsigned_abs() as usize, diff.unsigned_abs() as usize)
                            as i64;
                    }
                }
            }
        }
        if gcd_acc != 0 {
            let p = gcd_acc as usize;
            overall = Some(match overall {
                None => p,
                Some(q) => gcd(p, q),
            });
        }
    }
    overall
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `N <= |V|^2` with all-pairs paths of exact length `N`
/// (Wielandt bound caps the search).
fn primitivity_witness(g: &LabeledGraph) -> (bool, Option<usize>) {
    let n = g.vertex_count();
    if n == 0 {
        return (false, None);
    }
    let cap = n * n;
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        adj[e.src][e.dst] = true;
    }
    let mut power = adj.clone();
    for k in 1..=cap {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return (true, Some(k));
        }
        if k < cap {
            power = bool_mat_mul(&power, &adj);
        }
    }
    (false, None)
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        c[i][j] = true;
                    }
                }
            }
        }
    }
    c
}

/// A base graph with a non-negative multiplicity per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    base: LabeledGraph,
    multiplicity: Vec<u64>,
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "multigraph with {} edges", self.total_edges())
    }
}

impl Multigraph {
    pub fn new(base: LabeledGraph, multiplicity: Vec<u64>) -> Self {
        assert_eq!(base.edge_count(), multiplicity.len());
        Multigraph { base, multiplicity }
    }

    pub fn base(&self) -> &LabeledGraph {
        &self.base
    }

    pub fn multiplicity(&self) -> &[u64] {
        &self.multiplicity
    }

    pub fn total_edges(&self) -> u64 {
        self.multiplicity.iter().sum()
    }

    pub fn is_balanced(&self) -> bool {
        let n = self.base.vertex_count();
        let mut net = vec![0i64; n];
        for (id, e) in self.base.edges().iter().enumerate() {
            net[e.src] += self.multiplicity[id] as i64;
            net[e.dst] -= self.multiplicity[id] as i64;
        }
        net.iter().all(|&x| x == 0)
    }
}

/// The lexicographically first Eulerian path of `m` from `start` to `end`,
/// as a sequence of edge ids.
///
/// Greedy selection under the edge order of
/// [`LabeledGraph::edge_order_key`], taking an edge only if the remaining
/// multigraph still admits an Eulerian path from the edge's head to `end`.
pub fn lex_first_eulerian_path(
    m: &Multigraph,
    start: usize,
    end: usize,
) -> Result<Vec<usize>, GraphError> {
    let g = m.base();
    let mut mult = m.multiplicity().to_vec();
    let total: u64 = mult.iter().sum();
    let mut path = Vec::with_capacity(total as usize);
    let mut current = start;

    if !eulerian_feasible(g, &mult, current, end) {
        return Err(GraphError::NoEulerianPath(
            "degree or connectivity violation".into(),
        ));
    }

    for _ in 0..total {
        let mut candidates: Vec<usize> = g
            .out_edges(current)
            .filter(|&id| mult[id] > 0)
            .collect();
        candidates.sort_by_key(|&id| g.edge_order_key(id));
        let mut taken = None;
        for id in candidates {
            mult[id] -= 1;
            if eulerian_feasible(g, &mult, g.edges()[id].dst, end) {
                taken = Some(id);
                break;
            }
            mult[id] += 1;
        }
        match taken {
            Some(id) => {
                path.push(id);
                current = g.edges()[id].dst;
            }
            None => {
                return Err(GraphError::NoEulerianPath(format!(
                    "stuck at vertex {} with {} edges left",
                    g.vertices()[current],
                    mult.iter().sum::<u64>()
                )))
            }
        }
    }
    if current != end {
        return Err(GraphError::NoEulerianPath("path does not reach end".into()));
    }
    Ok(path)
}

/// Whether the residual multigraph admits an Eulerian path `from -> end`:
/// degree conditions plus reachability of every remaining edge from `from`.
fn eulerian_feasible(g: &LabeledGraph, mult: &[u64], from: usize, end: usize) -> bool {
    let n = g.vertex_count();
    if mult.iter().all(|&m| m == 0) {
        return from == end;
    }
    let mut net = vec![0i64; n];
    for (id, e) in g.edges().iter().enumerate() {
        net[e.src] += mult[id] as i64;
        net[e.dst] -= mult[id] as i64;
    }
    if from == end {
        if net.iter().any(|&x| x != 0) {
            return false;
        }
    } else {
        for v in 0..n {
            let want = if v == from {
                1
            } else if v == end {
                -1
            } else {
                0
            };
            if net[v] != want {
                return false;
            }
        }
    }
    // every remaining edge reachable from `from` in the residual support
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for (id, e) in g.edges().iter().enumerate() {
            if mult[id] > 0 && e.src == u && !seen[e.dst] {
                seen[e.dst] = true;
                stack.push(e.dst);
            }
        }
    }
    g.edges()
        .iter()
        .enumerate()
        .all(|(id, e)| mult[id] == 0 || seen[e.src])
}

/// Exhaustive enumeration of every Eulerian path; test oracle for the greedy
/// construction, exported for the acceptance suite.
pub fn enumerate_eulerian_paths(m: &Multigraph, start: usize, end: usize) -> Vec<Vec<usize>> {
    let g = m.base();
    let mut mult = m.multiplicity().to_vec();
    let total: u64 = mult.iter().sum();
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn rec(
        g: &LabeledGraph,
        mult: &mut [u64],
        current: usize,
        end: usize,
        remaining: u64,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            if current == end {
                out.push(path.clone());
            }
            return;
        }
        for id in 0..g.edge_count() {
            if mult[id] > 0 && g.edges()[id].src == current {
                mult[id] -= 1;
                path.push(id);
                rec(g, mult, g.edges()[id].dst, end, remaining - 1, path, out);
                path.pop();
                mult[id] += 1;
            }
        }
    }
    rec(g, &mut mult, start, end, total, &mut path, &mut out);
    out
}
