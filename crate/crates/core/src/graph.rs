//! Simple undirected graphs with an indexed table of directed edges.
//!
//! Undirected edge `k = {u, v}` with `u < v` yields the directed edges
//! `2k = (u, v)` and `2k + 1 = (v, u)`, so the reversal involution is
//! `e ^ 1`. Every module indexes edge functions by this numbering.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph satisfying the standing assumptions: simple, and every
    /// vertex of degree at least 2.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_edges(vertex_count, edges)?;
        if let Some((vertex, &degree)) = g.degrees.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::DegreeTooSmall { vertex, degree });
        }
        Ok(g)
    }

    /// Builds a simple graph without the degree lower bound. Trees (finite
    /// pieces of universal covers) come through here: their leaves have
    /// degree 1.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for (line, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop {
                    line: line + 1,
                    vertex: u as u64,
                });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::MultiEdge {
                    line: line + 1,
                    u: key.0 as u64,
                    v: key.1 as u64,
                });
            }
            canonical.push(key);
        }

        let mut degrees = vec![0; vertex_count];
        let mut out_edges = vec![Vec::new(); vertex_count];
        let mut in_edges = vec![Vec::new(); vertex_count];
        for (k, &(u, v)) in canonical.iter().enumerate() {
            degrees[u] += 1;
            degrees[v] += 1;
            out_edges[u].push(2 * k);
            in_edges[v].push(2 * k);
            out_edges[v].push(2 * k + 1);
            in_edges[u].push(2 * k + 1);
        }
        Ok(Self {
            vertex_count,
            edges: canonical,
            degrees,
            out_edges,
            in_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// |B| = 2|E|.
    pub fn directed_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// Undirected edges as `(min, max)` pairs, in index order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn origin(&self, e: usize) -> usize {
        let (u, v) = self.edges[e / 2];
        if e % 2 == 0 {
            u
        } else {
            v
        }
    }

    pub fn terminus(&self, e: usize) -> usize {
        self.origin(e ^ 1)
    }

    pub fn directed(&self, e: usize) -> (usize, usize) {
        (self.origin(e), self.terminus(e))
    }

    /// Edge reversal ι.
    #[inline]
    pub fn reversal(&self, e: usize) -> usize {
        e ^ 1
    }

    pub fn degree(&self, x: usize) -> usize {
        self.degrees[x]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Q(x) = D(x) - 1. Zero on leaves.
    pub fn q(&self, x: usize) -> usize {
        self.degrees[x].saturating_sub(1)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Rank of the fundamental group, |E| - |V| + 1 (per component count of one).
    pub fn rank(&self) -> i64 {
        self.edges.len() as i64 - self.vertex_count as i64 + 1
    }

    /// Directed edges leaving `x`.
    pub fn out_edges(&self, x: usize) -> &[usize] {
        &self.out_edges[x]
    }

    /// Directed edges entering `x`.
    pub fn in_edges(&self, x: usize) -> &[usize] {
        &self.in_edges[x]
    }

    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[x].iter().map(move |&e| self.terminus(e))
    }

    /// Index of the directed edge `(u, v)`, if `u ~ v`.
    pub fn directed_index(&self, u: usize, v: usize) -> Option<usize> {
        self.out_edges
            .get(u)?
            .iter()
            .copied()
            .find(|&e| self.terminus(e) == v)
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = *self.degrees.first()?;
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }

    /// Directed edges `e'` with `e' ~> e`: `t(e') = o(e)` and `e' != ι(e)`.
    pub fn predecessors(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let back = self.reversal(e);
        self.in_edges[self.origin(e)]
            .iter()
            .copied()
            .filter(move |&p| p != back)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.vertex_count
    }

    /// Two-colouring by breadth-first search over every component.
    pub fn is_bipartite(&self) -> bool {
        let mut colour: Vec<Option<bool>> = vec![None; self.vertex_count];
        for start in 0..self.vertex_count {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let cx = colour[x].unwrap();
                for y in self.neighbors(x) {
                    match colour[y] {
                        None => {
                            colour[y] = Some(!cx);
                            queue.push_back(y);
                        }
                        Some(cy) if cy == cx => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edges.len() + 1 == self.vertex_count && self.is_connected()
    }
}

/// Edge weights `p` (one value per undirected edge, in edge index order) and
/// a real vertex potential `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    p: Vec<f64>,
    w: Vec<f64>,
}

impl Weights {
    pub fn new(g: &Graph, p: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if p.len() != g.edge_count() {
            return Err(Error::WeightMismatch(format!(
                "{} edge weights for {} edges",
                p.len(),
                g.edge_count()
            )));
        }
        if w.len() != g.vertex_count() {
            return Err(Error::WeightMismatch(format!(
                "{} potential values for {} vertices",
                w.len(),
                g.vertex_count()
            )));
        }
        if let Some(k) = p.iter().position(|&x| x == 0.0 || !x.is_finite()) {
            let (u, v) = g.edges()[k];
            return Err(Error::WeightMismatch(format!(
                "p({u}, {v}) must be finite and nonzero"
            )));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::WeightMismatch("potential must be finite".into()));
        }
        Ok(Self { p, w })
    }

    /// p ≡ 1, W ≡ 0.
    pub fn unit(g: &Graph) -> Self {
        Self {
            p: vec![1.0; g.edge_count()],
            w: vec![0.0; g.vertex_count()],
        }
    }

    /// p(x, y) = (D(x) D(y))^{-1/2}, W ≡ 0: the weighting under which `A_p`
    /// is conjugate to the simple random walk operator.
    pub fn random_walk(g: &Graph) -> Self {
        let p = g
            .edges()
            .iter()
            .map(|&(u, v)| 1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt())
            .collect();
        Self {
            p,
            w: vec![0.0; g.vertex_count()],
        }
    }

    /// Weight of the undirected edge underlying directed edge `e`.
    #[inline]
    pub fn edge(&self, e: usize) -> f64 {
        self.p[e / 2]
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn potential(&self) -> &[f64] {
        &self.w
    }

    /// Parses the weights document `{"p": [[u, v, value], ...], "W": [...]}`.
    /// Each undirected edge must be covered; listing both orientations is
    /// allowed when the values agree.
    pub fn from_json(g: &Graph, text: &str) -> Result<Self> {
        let doc: WeightsDocument =
            serde_json::from_str(text).map_err(|e| Error::WeightsFormat(e.to_string()))?;
        let mut p: Vec<Option<f64>> = vec![None; g.edge_count()];
        for &(u, v, value) in &doc.p {
            let e = g.directed_index(u, v).ok_or_else(|| {
                Error::WeightMismatch(format!("p lists ({u}, {v}), which is not an edge"))
            })?;
            match p[e / 2] {
                Some(old) if (old - value).abs() > 1e-12 * old.abs().max(1.0) => {
                    return Err(Error::WeightMismatch(format!(
                        "p({u}, {v}) = {value} but p({v}, {u}) = {old}"
                    )))
                }
                _ => p[e / 2] = Some(value),
            }
        }
        let p = p
            .into_iter()
            .enumerate()
            .map(|(k, x)| {
                x.ok_or_else(|| {
                    let (u, v) = g.edges()[k];
                    Error::WeightMismatch(format!("no weight for edge ({u}, {v})"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, p, doc.w)
    }

    pub fn to_json(&self, g: &Graph) -> String {
        let doc = WeightsDocument {
            p: g.edges()
                .iter()
                .zip(&self.p)
                .map(|(&(u, v), &x)| (u, v, x))
                .collect(),
            w: self.w.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("weights serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct WeightsDocument {
    p: Vec<(usize, usize, f64)>,
    #[serde(rename = "W")]
    w: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_simple: bool,
    pub is_connected: bool,
    pub is_bipartite: bool,
    pub min_degree: usize,
    pub meets_gap_hypotheses: bool,
}

pub fn validate(g: &Graph) -> ValidationReport {
    let is_connected = g.is_connected();
    let is_bipartite = g.is_bipartite();
    let min_degree = g.min_degree();
    ValidationReport {
        // Guaranteed by construction.
        is_simple: true,
        is_connected,
        is_bipartite,
        min_degree,
        meets_gap_hypotheses: is_connected && !is_bipartite && min_degree >= 3,
    }
}

/// Parses a `u v` per line edge list. Blank lines and lines starting with
/// `#` are skipped; vertex ids are compacted to `0..|V|` in order of first
/// appearance.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut pairs: HashMap<(u64, u64), usize> = HashMap::new();
    let mut edges = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = || Error::Malformed {
            line,
            content: trimmed.to_string(),
        };
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(malformed());
        };
        let u: u64 = a.parse().map_err(|_| malformed())?;
        let v: u64 = b.parse().map_err(|_| malformed())?;
        if u == v {
            return Err(Error::SelfLoop { line, vertex: u });
        }
        if pairs.insert((u.min(v), u.max(v)), line).is_some() {
            return Err(Error::MultiEdge { line, u, v });
        }
        let next = ids.len();
        let cu = *ids.entry(u).or_insert(next);
        let next = ids.len();
        let cv = *ids.entry(v).or_insert(next);
        edges.push((cu, cv));
    }
    if edges.is_empty() {
        return Err(Error::Empty);
    }
    Graph::new(ids.len(), &edges)
}

/// Inverse of [`parse_edge_list`] for graphs already in canonical form.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("# |V| = {}, |E| = {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
