//! Green functions of the universal-cover tree, computed on the base graph.
//!
//! For a directed edge `e = (w, v)`, `ζ(e) = -G^{(v|w)}(v, v; z)` is minus the
//! diagonal Green function at `v` of the cover with the branch through `w`
//! removed. These satisfy the edge recursion
//!
//! ```text
//! 1/ζ(w, v) = z - W(v) - Σ_{u ~ v, u != w} p(v, u)² ζ(v, u)
//! ```
//!
//! which [`solve_zeta`] iterates to its fixed point. With `p ≡ 1`, `W ≡ 0`
//! this is the unweighted system. Vertex quantities follow from
//! `2m(v) = z - W(v) - Σ_{u~v} p(v,u)² ζ(v,u)` and `G(v, v) = -1/(2m(v))`.
//!
//! The oracles at the bottom compute the same objects on explicit finite
//! trees, by dense inversion or by leaf-to-root elimination, without going
//! through the recursion on the base graph.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Weights};
use crate::linalg::{self, C64};
use crate::operators::nb_b;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Largest tolerated disagreement between the two directed evaluations of
/// an edge Green function.
pub const EDGE_GREEN_TOL: f64 = 1e-8;

/// Solution of the edge recursion at a fixed spectral parameter.
#[derive(Debug, Clone, Serialize)]
pub struct ZetaField {
    pub z: C64,
    /// ζ(o(e), t(e)) per directed edge.
    pub zeta: Vec<C64>,
    /// m(v) per vertex.
    pub m: Vec<C64>,
    /// G(ṽ, ṽ; z) per vertex.
    pub gv: Vec<C64>,
    /// G(ũ, ṽ; z) per undirected edge `{u, v}`.
    pub ge: Vec<C64>,
    #[serde(skip)]
    pub weights: Option<Weights>,
    pub iterations: usize,
    pub final_update_norm: f64,
    /// Largest residual over the vertex, edge and reversal identities.
    pub residual: f64,
}

impl ZetaField {
    fn p(&self, e: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w.edge(e))
    }

    fn potential(&self, v: usize) -> f64 {
        self.weights.as_ref().map_or(0.0, |w| w.potential()[v])
    }

    /// `Im G(v,v) > 0` and `Im ζ(e) < 0` everywhere.
    pub fn herglotz_ok(&self) -> bool {
        self.gv.iter().all(|g| g.im > 0.0) && self.zeta.iter().all(|z| z.im < 0.0)
    }

    /// `G(v_0, v_k)` along a non-backtracking path, by the two product
    /// formulas: `-Π ζ(v_{j+1}, v_j) / 2m(v_k)` and
    /// `-Π ζ(v_j, v_{j+1}) / 2m(v_0)` (each ζ carrying its edge weight).
    pub fn path_green(&self, g: &Graph, path: &[usize]) -> (C64, C64) {
        assert!(!path.is_empty());
        let mut backward = C64::new(1.0, 0.0);
        let mut forward = C64::new(1.0, 0.0);
        for pair in path.windows(2) {
            let e = g
                .directed_index(pair[0], pair[1])
                .expect("path follows edges");
            forward *= self.zeta[e] * self.p(e);
            backward *= self.zeta[g.reversal(e)] * self.p(e);
        }
        let first = path[0];
        let last = *path.last().unwrap();
        (
            -backward / (2.0 * self.m[last]),
            -forward / (2.0 * self.m[first]),
        )
    }
}

pub fn check_upper_half_plane(z: C64) -> Result<()> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::SpectralParameterNotInUpperHalfPlane { re: z.re, im: z.im })
    }
}

/// Synchronous fixed-point iteration from `ζ ≡ 1/z`, stopped when the
/// sup-norm update drops below `tol`.
pub fn solve_zeta(
    g: &Graph,
    weights: Option<&Weights>,
    z: C64,
    tol: f64,
    max_iter: usize,
) -> Result<ZetaField> {
    check_upper_half_plane(z)?;
    assert!(tol > 0.0, "tolerance must be positive");
    if let Some(w) = weights {
        if w.p().len() != g.edge_count() || w.potential().len() != g.vertex_count() {
            return Err(Error::WeightMismatch(
                "weights sized for another graph".into(),
            ));
        }
    }
    let nb = g.directed_count();
    let p2 = |e: usize| weights.map_or(1.0, |w| w.edge(e).powi(2));
    let pot = |v: usize| weights.map_or(0.0, |w| w.potential()[v]);

    // Children of e = (w, v): edges leaving v other than (v, w).
    let children: Vec<Vec<(usize, f64)>> = (0..nb)
        .map(|e| {
            let v = g.terminus(e);
            let back = g.reversal(e);
            g.out_edges(v)
                .iter()
                .filter(|&&c| c != back)
                .map(|&c| (c, p2(c)))
                .collect()
        })
        .collect();
    let shift: Vec<C64> = (0..nb).map(|e| z - pot(g.terminus(e))).collect();

    let mut zeta = vec![C64::new(1.0, 0.0) / z; nb];
    let mut next = zeta.clone();
    let mut update = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        update = 0.0;
        for e in 0..nb {
            let s: C64 = children[e].iter().map(|&(c, w)| zeta[c] * w).sum();
            next[e] = (shift[e] - s).inv();
            update = update.max((next[e] - zeta[e]).norm());
        }
        std::mem::swap(&mut zeta, &mut next);
        if !update.is_finite() {
            break;
        }
        if update < tol {
            break;
        }
    }
    if update.is_nan() || update >= tol {
        return Err(Error::NonConvergence {
            iterations,
            update_norm: update,
        });
    }

    let m: Vec<C64> = (0..g.vertex_count())
        .map(|v| {
            let s: C64 = g.out_edges(v).iter().map(|&c| zeta[c] * p2(c)).sum();
            (z - pot(v) - s) / 2.0
        })
        .collect();
    let gv: Vec<C64> = m.iter().map(|&mv| -(2.0 * mv).inv()).collect();
    let p = |e: usize| weights.map_or(1.0, |w| w.edge(e));
    let mut ge = Vec::with_capacity(g.edge_count());
    for k in 0..g.edge_count() {
        let e = 2 * k;
        let (u, v) = g.directed(e);
        let forward = p(e) * zeta[e] * gv[u];
        let backward = p(e) * zeta[e + 1] * gv[v];
        let gap = (forward - backward).norm();
        if gap > EDGE_GREEN_TOL * forward.norm().max(1.0) {
            return Err(Error::InconsistentEdgeGreen { u, v, gap });
        }
        ge.push(forward);
    }

    let mut field = ZetaField {
        z,
        zeta,
        m,
        gv,
        ge,
        weights: weights.cloned(),
        iterations,
        final_update_norm: update,
        residual: 0.0,
    };
    field.residual = lemma_residuals(&field, g);
    Ok(field)
}

/// Largest absolute residual of
/// * `z - W(v) = Σ_{u~v} p² ζ(v,u) + 2m(v)` at every vertex,
/// * `z - W(v) = Σ_{u~v, u≠w} p² ζ(v,u) + 1/ζ(w,v)` at every directed edge,
/// * `ζ(w,v) = (m(w)/m(v)) ζ(v,w)` and
/// * `1/ζ(w,v) - p² ζ(v,w) = 2m(v)` at every directed edge.
pub fn lemma_residuals(zf: &ZetaField, g: &Graph) -> f64 {
    let p2 = |e: usize| zf.p(e).powi(2);
    let mut worst: f64 = 0.0;
    for v in 0..g.vertex_count() {
        let s: C64 = g.out_edges(v).iter().map(|&c| zf.zeta[c] * p2(c)).sum();
        let shift = zf.z - zf.potential(v);
        worst = worst.max((shift - s - 2.0 * zf.m[v]).norm());
        for &into in g.in_edges(v) {
            let back = g.reversal(into);
            let others = s - zf.zeta[back] * p2(back);
            worst = worst.max((shift - others - zf.zeta[into].inv()).norm());
            let w = g.origin(into);
            worst = worst.max((zf.zeta[into] - zf.m[w] / zf.m[v] * zf.zeta[back]).norm());
            worst =
                worst.max((zf.zeta[into].inv() - p2(back) * zf.zeta[back] - 2.0 * zf.m[v]).norm());
        }
    }
    worst
}

/// The ball of radius `depth` in the universal cover, as an explicit tree.
#[derive(Debug, Clone)]
pub struct CoverTree {
    pub tree: Graph,
    /// Base vertex under each cover vertex. Cover vertex 0 is the root.
    pub projection: Vec<usize>,
    /// Base directed edge traversed from the parent, `None` at the root.
    pub parent_edge: Vec<Option<usize>>,
    pub parent: Vec<Option<usize>>,
    /// Vertices at the truncation depth.
    pub leaf: Vec<bool>,
}

impl CoverTree {
    /// Pulls weights on the base graph back to the cover.
    pub fn lift_weights(&self, w: &Weights) -> Weights {
        let p = self
            .tree
            .edges()
            .iter()
            .map(|&(a, b)| {
                let child = if self.parent[b] == Some(a) { b } else { a };
                w.edge(self.parent_edge[child].expect("non-root"))
            })
            .collect();
        let pot = self.projection.iter().map(|&x| w.potential()[x]).collect();
        Weights::new(&self.tree, p, pot).expect("lifted weights match the cover")
    }
}

/// Non-backtracking paths of length at most `depth` from `root`, as a tree.
pub fn truncated_cover(g: &Graph, root: usize, depth: usize) -> CoverTree {
    assert!(depth >= 1, "depth must be at least 1");
    assert!(root < g.vertex_count());
    let mut projection = vec![root];
    let mut parent_edge = vec![None];
    let mut parent = vec![None];
    let mut level = vec![0usize];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        if level[node] == depth {
            continue;
        }
        let x = projection[node];
        let back = parent_edge[node].map(|e: usize| g.reversal(e));
        for &e in g.out_edges(x) {
            if Some(e) == back {
                continue;
            }
            let child = projection.len();
            projection.push(g.terminus(e));
            parent_edge.push(Some(e));
            parent.push(Some(node));
            level.push(level[node] + 1);
            edges.push((node, child));
            queue.push_back(child);
        }
    }
    let leaf = level.iter().map(|&l| l == depth).collect();
    let tree = Graph::from_edges(projection.len(), &edges).expect("cover is a simple tree");
    CoverTree {
        tree,
        projection,
        parent_edge,
        parent,
        leaf,
    }
}

/// ζ on every base directed edge incident to the root, computed on the
/// truncated cover by exact leaf-to-root elimination. Returns
/// `(base edge, ζ)` pairs for both orientations of each root edge.
pub fn cover_root_zeta(
    cover: &CoverTree,
    weights: Option<&Weights>,
    z: C64,
) -> Result<Vec<(usize, C64)>> {
    check_upper_half_plane(z)?;
    let tw = weights.map(|w| cover.lift_weights(w));
    let sub = subtree_greens(&cover.tree, tw.as_ref(), z, 0);
    let t = &cover.tree;
    let p = |e: usize| tw.as_ref().map_or(1.0, |w| w.edge(e));
    let root_shift = z - tw.as_ref().map_or(0.0, |w| w.potential()[0]);
    let total: C64 = t
        .out_edges(0)
        .iter()
        .map(|&e| p(e).powi(2) * sub[t.terminus(e)])
        .sum();
    let mut out = Vec::new();
    for &e in t.out_edges(0) {
        let c = t.terminus(e);
        let base = cover.parent_edge[c].expect("child of root");
        // (root, c): the branch at c away from the root.
        out.push((base, -sub[c]));
        // (c, root): the root with the branch through c removed.
        let rest = total - p(e).powi(2) * sub[c];
        out.push((base ^ 1, (root_shift + rest).inv()));
    }
    Ok(out)
}

/// For a tree rooted at `root`, the Green function at each vertex `v` of the
/// subtree hanging below `v`: `1 / (W(v) - z - Σ_children p² sub(child))`.
fn subtree_greens(t: &Graph, w: Option<&Weights>, z: C64, root: usize) -> Vec<C64> {
    let n = t.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(x) = stack.pop() {
        order.push(x);
        for y in t.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let pot = |v: usize| w.map_or(0.0, |w| w.potential()[v]);
    let mut sub = vec![C64::new(0.0, 0.0); n];
    for &x in order.iter().rev() {
        let mut acc = C64::new(pot(x), 0.0) - z;
        for &e in t.out_edges(x) {
            let y = t.terminus(e);
            // parent[root] == root, so this only picks children.
            if parent[y] == x {
                let px = w.map_or(1.0, |w| w.edge(e));
                acc -= px * px * sub[y];
            }
        }
        sub[x] = acc.inv();
    }
    sub
}

/// Green functions of a finite tree by dense inversion.
#[derive(Debug, Clone)]
pub struct TreeGreen {
    /// `(H - z)^{-1}` with `H = A_p + W`.
    pub green: DMatrix<C64>,
    /// ζ per directed edge, from the branch-deleted subtree.
    pub zeta: Vec<C64>,
    pub m: Vec<C64>,
}

fn dense_hamiltonian(t: &Graph, w: Option<&Weights>, vertices: &[usize]) -> DMatrix<f64> {
    let mut index = vec![usize::MAX; t.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        index[v] = i;
    }
    let k = vertices.len();
    let mut h = DMatrix::zeros(k, k);
    for (i, &v) in vertices.iter().enumerate() {
        h[(i, i)] = w.map_or(0.0, |w| w.potential()[v]);
        for &e in t.out_edges(v) {
            let j = index[t.terminus(e)];
            if j != usize::MAX {
                h[(i, j)] = w.map_or(1.0, |w| w.edge(e));
            }
        }
    }
    h
}

fn resolvent(h: &DMatrix<f64>, z: C64) -> Result<DMatrix<C64>> {
    let mut m = linalg::to_complex(h);
    for i in 0..m.nrows() {
        m[(i, i)] -= z;
    }
    linalg::invert(m)
}

pub fn tree_green_oracle(t: &Graph, w: Option<&Weights>, z: C64) -> Result<TreeGreen> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    check_upper_half_plane(z)?;
    let all: Vec<usize> = (0..t.vertex_count()).collect();
    let green = resolvent(&dense_hamiltonian(t, w, &all), z)?;
    let m = (0..t.vertex_count())
        .map(|v| -(2.0 * green[(v, v)]).inv())
        .collect();
    let mut zeta = Vec::with_capacity(t.directed_count());
    for e in 0..t.directed_count() {
        let (from, v) = t.directed(e);
        let branch = component_avoiding(t, v, from);
        let sub = resolvent(&dense_hamiltonian(t, w, &branch), z)?;
        // branch[0] == v
        zeta.push(-sub[(0, 0)]);
    }
    Ok(TreeGreen { green, zeta, m })
}

/// Vertices reachable from `start` without stepping onto `blocked`;
/// `start` comes first.
fn component_avoiding(t: &Graph, start: usize, blocked: usize) -> Vec<usize> {
    let mut seen = vec![false; t.vertex_count()];
    seen[start] = true;
    seen[blocked] = true;
    let mut out = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in t.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    out
}

/// Directed edges along the tree geodesic from `x` to `y`.
pub fn tree_geodesic(t: &Graph, x: usize, y: usize) -> Vec<usize> {
    let mut via = vec![usize::MAX; t.vertex_count()];
    let mut queue = VecDeque::from([x]);
    let mut seen = vec![false; t.vertex_count()];
    seen[x] = true;
    while let Some(a) = queue.pop_front() {
        for &e in t.out_edges(a) {
            let b = t.terminus(e);
            if !seen[b] {
                seen[b] = true;
                via[b] = e;
                queue.push_back(b);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = y;
    while cur != x {
        let e = via[cur];
        assert!(e != usize::MAX, "tree is connected");
        path.push(e);
        cur = t.origin(e);
    }
    path.reverse();
    path
}

/// Whether `(e, prior)` is a pair for which the series identity applies:
/// either `o(prior) = t(e)`, or the geodesic from `o(prior)` to `t(e)` starts
/// with `prior` and ends with `e`.
pub fn is_admissible_pair(t: &Graph, e: usize, prior: usize) -> bool {
    let x = t.origin(prior);
    let y = t.terminus(e);
    if x == y {
        return true;
    }
    let path = tree_geodesic(t, x, y);
    path.first() == Some(&prior) && path.last() == Some(&e)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub rel_error: f64,
}

/// On a tree, compares `δ_{x=y} + ((ζ⁻¹ I - B)⁻¹)(e, e')` with
/// `-2m(x) (A - z)⁻¹(x, y)` where `x = o(e')`, `y = t(e)`. Only pairs with
/// `e'` and `e` at the two ends of the geodesic from `x` to `y` (or with
/// `x = y`) satisfy the identity; other pairs are rejected.
pub fn resolvent_series_check(t: &Graph, z: C64, e: usize, prior: usize) -> Result<SeriesCheck> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    check_upper_half_plane(z)?;
    if !is_admissible_pair(t, e, prior) {
        return Err(Error::InadmissibleEdgePair { edge: e, prior });
    }
    let zf = solve_zeta(t, None, z, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let mut m = -nb_b(t).to_complex();
    for (i, zeta) in zf.zeta.iter().enumerate() {
        m[(i, i)] += zeta.inv();
    }
    let series = linalg::invert(m)?;
    let all: Vec<usize> = (0..t.vertex_count()).collect();
    let green = resolvent(&dense_hamiltonian(t, None, &all), z)?;
    let x = t.origin(prior);
    let y = t.terminus(e);
    let delta = if x == y { 1.0 } else { 0.0 };
    let lhs = series[(e, prior)] + delta;
    let rhs = -2.0 * zf.m[x] * green[(x, y)];
    Ok(SeriesCheck {
        lhs,
        rhs,
        rel_error: linalg::rel_error(lhs, rhs),
    })
}
