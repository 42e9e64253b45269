//! Vertex-weighted undirected graphs: construction, parsing, generation.
//!
//! Vertices are `0..n` internally; the text formats use 1-based ids. Weights
//! are positive 64-bit integers so that all weight arithmetic in the solver
//! stays exact.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

/// Immutable vertex-weighted undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    weights: Vec<u64>,
    num_edges: usize,
    max_weight: u64,
}

impl Graph {
    /// Builds a graph from explicit weights and an edge list.
    ///
    /// Panics on self-loops, duplicate edges, out-of-range endpoints, or a
    /// non-positive weight; callers parsing untrusted text must validate
    /// first (see [`parse_instance`]).
    pub fn from_edges(weights: Vec<u64>, edges: &[(usize, usize)]) -> Self {
        let n = weights.len();
        assert!(
            weights.iter().all(|&w| w >= 1),
            "vertex weights must be positive"
        );
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            assert_ne!(u, v, "self-loop at vertex {u}");
            let key = (u.min(v), u.max(v));
            assert!(seen.insert(key), "duplicate edge ({u}, {v})");
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let max_weight = weights.iter().copied().max().unwrap_or(0);
        Graph {
            adjacency,
            weights,
            num_edges: edges.len(),
            max_weight,
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.num_edges
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    /// Largest vertex weight in the graph (0 for the empty graph).
    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Neighbors of `v` in ascending order (excluding `v` itself).
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    /// The closed neighborhood N[v] = {v} ∪ adj(v); `v` is yielded first.
    pub fn closed_neighborhood(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(v).chain(self.adjacency[v].iter().map(|&u| u as usize))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    /// True if `u` is in the closed neighborhood of `v`.
    pub fn dominates(&self, v: usize, u: usize) -> bool {
        u == v || self.has_edge(u, v)
    }
}

/// How the vertex weights of an instance were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Weights read verbatim from the instance file.
    Explicit,
    /// Integer weights drawn uniformly from [20, 70].
    T1,
    /// Integer weights drawn uniformly from [1, max(1, degree²)].
    T2,
    /// Synthesized as (id mod 200) + 1 on the 1-based vertex id.
    Mod200,
}

/// A named problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub name: String,
    pub weight_kind: WeightKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed or missing problem header")]
    MalformedHeader { line: usize },
    #[error("line {line}: vertex id {id} out of range [1, {n}]")]
    VertexOutOfRange { line: usize, id: i64, n: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at vertex {id}")]
    SelfLoop { line: usize, id: usize },
    #[error("line {line}: missing weight line for vertex {id}")]
    MissingWeight { line: usize, id: usize },
    #[error("line {line}: duplicate weight line for vertex {id}")]
    DuplicateWeight { line: usize, id: usize },
    #[error("line {line}: weight must be a positive integer")]
    BadWeight { line: usize },
    #[error("line {line}: unrecognized or malformed line")]
    MalformedLine { line: usize },
    #[error("header declares {declared} edges but the file lists {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
}

struct EdgeAccumulator {
    n: usize,
    seen: HashSet<(u32, u32)>,
    edges: Vec<(usize, usize)>,
}

impl EdgeAccumulator {
    fn new(n: usize, m_hint: usize) -> Self {
        EdgeAccumulator {
            n,
            seen: HashSet::with_capacity(m_hint),
            edges: Vec::with_capacity(m_hint),
        }
    }

    /// Validates and records one `e u v` line (1-based endpoints).
    fn push(&mut self, line: usize, tokens: &[&str]) -> Result<(), ParseError> {
        if tokens.len() != 3 {
            return Err(ParseError::MalformedLine { line });
        }
        let u = parse_vertex_id(tokens[1], line, self.n)?;
        let v = parse_vertex_id(tokens[2], line, self.n)?;
        if u == v {
            return Err(ParseError::SelfLoop { line, id: u + 1 });
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        if !self.seen.insert(key) {
            return Err(ParseError::DuplicateEdge {
                line,
                u: u + 1,
                v: v + 1,
            });
        }
        self.edges.push((u, v));
        Ok(())
    }
}

/// Parses a 1-based vertex id token, returning the 0-based id.
fn parse_vertex_id(token: &str, line: usize, n: usize) -> Result<usize, ParseError> {
    let id: i64 = token
        .parse()
        .map_err(|_| ParseError::MalformedLine { line })?;
    if id < 1 || id as usize > n {
        return Err(ParseError::VertexOutOfRange { line, id, n });
    }
    Ok(id as usize - 1)
}

fn parse_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    format_tag: &str,
) -> Result<(usize, usize), ParseError> {
    for (line, raw) in lines {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() == 4 && tokens[0] == "p" && tokens[1] == format_tag {
            if let (Ok(n), Ok(m)) = (tokens[2].parse::<usize>(), tokens[3].parse::<usize>()) {
                return Ok((n, m));
            }
        }
        return Err(ParseError::MalformedHeader { line });
    }
    Err(ParseError::MalformedHeader { line: 1 })
}

/// Parses the native instance format:
///
/// ```text
/// c optional comments
/// p mwds <n> <m>
/// v <id> <weight>     (n lines, 1-based ids)
/// e <u> <v>           (m lines)
/// ```
///
/// Weight lines must precede edge lines. The parsed instance is named
/// `"unnamed"`; callers typically overwrite the name with the file stem.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (n, m) = parse_header(&mut lines, "mwds")?;

    let mut weights: Vec<Option<u64>> = vec![None; n];
    let mut weights_seen = 0usize;
    let mut acc = EdgeAccumulator::new(n, m);
    let mut last_line = 1;

    for (line, raw) in lines {
        last_line = line;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens[0] {
            "v" => {
                if tokens.len() != 3 {
                    return Err(ParseError::MalformedLine { line });
                }
                if !acc.edges.is_empty() {
                    // Weight lines may not trail the edge section.
                    return Err(ParseError::MalformedLine { line });
                }
                let id = parse_vertex_id(tokens[1], line, n)?;
                let w: u64 = tokens[2]
                    .parse()
                    .ok()
                    .filter(|&w| w >= 1)
                    .ok_or(ParseError::BadWeight { line })?;
                if weights[id].replace(w).is_some() {
                    return Err(ParseError::DuplicateWeight { line, id: id + 1 });
                }
                weights_seen += 1;
            }
            "e" => {
                if weights_seen < n {
                    let id = first_missing(&weights);
                    return Err(ParseError::MissingWeight { line, id });
                }
                acc.push(line, &tokens)?;
            }
            _ => return Err(ParseError::MalformedLine { line }),
        }
    }

    if weights_seen < n {
        let id = first_missing(&weights);
        return Err(ParseError::MissingWeight {
            line: last_line + 1,
            id,
        });
    }
    if acc.edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            declared: m,
            found: acc.edges.len(),
        });
    }
    let weights: Vec<u64> = weights.into_iter().map(Option::unwrap).collect();
    Ok(Instance {
        graph: Graph::from_edges(weights, &acc.edges),
        name: "unnamed".to_string(),
        weight_kind: WeightKind::Explicit,
    })
}

fn first_missing(weights: &[Option<u64>]) -> usize {
    weights.iter().position(Option::is_none).unwrap_or(0) + 1
}

/// Parses an unweighted DIMACS graph (`p edge <n> <m>` header) and
/// synthesizes vertex weights as `(id mod 200) + 1` on the 1-based id.
pub fn parse_dimacs(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (n, m) = parse_header(&mut lines, "edge")?;

    let mut acc = EdgeAccumulator::new(n, m);
    for (line, raw) in lines {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens[0] {
            "e" => acc.push(line, &tokens)?,
            _ => return Err(ParseError::MalformedLine { line }),
        }
    }
    if acc.edges.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            declared: m,
            found: acc.edges.len(),
        });
    }
    let weights: Vec<u64> = (1..=n as u64).map(|id| (id % 200) + 1).collect();
    Ok(Instance {
        graph: Graph::from_edges(weights, &acc.edges),
        name: "unnamed".to_string(),
        weight_kind: WeightKind::Mod200,
    })
}

/// Dispatches on the problem line: `p mwds` → native, `p edge` → DIMACS.
pub fn parse_auto(text: &str) -> Result<Instance, ParseError> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if tokens.next() == Some("p") {
            return match tokens.next() {
                Some("mwds") => parse_instance(text),
                Some("edge") => parse_dimacs(text),
                _ => Err(ParseError::MalformedHeader { line: i + 1 }),
            };
        }
        return Err(ParseError::MalformedHeader { line: i + 1 });
    }
    Err(ParseError::MalformedHeader { line: 1 })
}

/// Renders an instance in the native format; `parse_instance` inverts this.
pub fn to_native(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    let _ = writeln!(out, "p mwds {} {}", g.n(), g.m());
    for v in 0..g.n() {
        let _ = writeln!(out, "v {} {}", v + 1, g.weight(v));
    }
    for u in 0..g.n() {
        for &v in g.neighbors(u) {
            if (v as usize) > u {
                let _ = writeln!(out, "e {} {}", u + 1, v + 1);
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("cannot place {m} edges on {n} vertices (maximum {max})")]
    TooManyEdges { n: usize, m: usize, max: u64 },
    #[error("generated instances require T1 or T2 weights")]
    UnsupportedWeightKind,
}

/// Number of pairs (u, v) with u < first coordinate, for triangular decoding.
fn pair_offset(u: u64, n: u64) -> u64 {
    u * (n - 1) - (u * u - u) / 2
}

/// Maps a rank in [0, n(n-1)/2) to the unordered pair it encodes.
fn decode_pair(k: u64, n: u64) -> (usize, usize) {
    let (mut lo, mut hi) = (0u64, n - 1);
    // Largest u with pair_offset(u) <= k.
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if pair_offset(mid, n) <= k {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let u = lo;
    let v = u + 1 + (k - pair_offset(u, n));
    (u as usize, v as usize)
}

/// Generates a random instance: exactly `m` distinct edges drawn uniformly
/// without replacement from all unordered pairs, then seeded integer weights
/// (`T1`: uniform on [20, 70]; `T2`: uniform on [1, max(1, degree²)] using
/// the realized degrees). Identical arguments yield identical instances.
pub fn generate_instance(
    n: usize,
    m: usize,
    kind: WeightKind,
    seed: u64,
) -> Result<Instance, GenerateError> {
    if !matches!(kind, WeightKind::T1 | WeightKind::T2) {
        return Err(GenerateError::UnsupportedWeightKind);
    }
    let total = n as u64 * (n.saturating_sub(1)) as u64 / 2;
    if m as u64 > total {
        return Err(GenerateError::TooManyEdges { n, m, max: total });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Floyd's sampling: m distinct ranks uniform over [0, total).
    let mut chosen: HashSet<u64> = HashSet::with_capacity(m);
    for j in (total - m as u64)..total {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut ranks: Vec<u64> = chosen.into_iter().collect();
    ranks.sort_unstable();
    let edges: Vec<(usize, usize)> = ranks.iter().map(|&k| decode_pair(k, n as u64)).collect();

    let mut degree = vec![0u64; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let weights: Vec<u64> = (0..n)
        .map(|v| match kind {
            WeightKind::T1 => rng.random_range(20..=70),
            WeightKind::T2 => rng.random_range(1..=(degree[v] * degree[v]).max(1)),
            _ => unreachable!(),
        })
        .collect();

    let tag = match kind {
        WeightKind::T1 => "t1",
        WeightKind::T2 => "t2",
        _ => unreachable!(),
    };
    Ok(Instance {
        graph: Graph::from_edges(weights, &edges),
        name: format!("{tag}-n{n}-m{m}-s{seed}"),
        weight_kind: kind,
    })
}
