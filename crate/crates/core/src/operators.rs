//! Vertex and edge operators: `A`, `P`, `S`, `B`, their weighted variants,
//! the lifts `O`/`T`, the origin-averaging projector and edge reversal.
//! Also the oblique decomposition of mean-zero edge functions into
//! origin-lifted, terminus-lifted and doubly-balanced parts.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Weights};
use crate::linalg::{self, C64};

/// Largest dimension that is materialized densely.
pub const DENSE_LIMIT: usize = 4000;

/// Tolerance for `|<f, 1>_U| <= tol * ||f||_U`.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    A,
    P,
    S,
    B,
    SchrodingerA,
    WeightedB,
    O,
    T,
    OriginAverage,
    Reversal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Space {
    /// ℓ²(V, π) with π(x) = D(x).
    Vertices,
    /// ℓ²(B, U) with the uniform measure.
    DirectedEdges,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(DMatrix<f64>),
    /// Compressed sparse rows.
    Sparse {
        row_start: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
}

/// A real operator between vertex and edge function spaces.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub role: Role,
    pub domain: Space,
    pub codomain: Space,
    nrows: usize,
    ncols: usize,
    storage: Storage,
}

impl OperatorMatrix {
    fn from_triplets(
        role: Role,
        domain: Space,
        codomain: Space,
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        let storage = if nrows.max(ncols) <= DENSE_LIMIT {
            let mut m = DMatrix::zeros(nrows, ncols);
            for (i, j, v) in triplets {
                m[(i, j)] += v;
            }
            Storage::Dense(m)
        } else {
            triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
            let mut row_start = vec![0; nrows + 1];
            for &(i, _, _) in &triplets {
                row_start[i + 1] += 1;
            }
            for i in 0..nrows {
                row_start[i + 1] += row_start[i];
            }
            Storage::Sparse {
                row_start,
                cols: triplets.iter().map(|t| t.1).collect(),
                vals: triplets.iter().map(|t| t.2).collect(),
            }
        };
        Self {
            role,
            domain,
            codomain,
            nrows,
            ncols,
            storage,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse {
                row_start,
                cols,
                vals,
            } => (row_start[i]..row_start[i + 1])
                .find(|&k| cols[k] == j)
                .map_or(0.0, |k| vals[k]),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse {
                row_start,
                cols,
                vals,
            } => {
                let mut m = DMatrix::zeros(self.nrows, self.ncols);
                for i in 0..self.nrows {
                    for k in row_start[i]..row_start[i + 1] {
                        m[(i, cols[k])] = vals[k];
                    }
                }
                m
            }
        }
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        linalg::to_complex(&self.to_dense())
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        match &self.storage {
            Storage::Dense(m) => (0..self.nrows)
                .map(|i| (0..self.ncols).map(|j| x[j] * m[(i, j)]).sum())
                .collect(),
            Storage::Sparse {
                row_start,
                cols,
                vals,
            } => (0..self.nrows)
                .map(|i| {
                    (row_start[i]..row_start[i + 1])
                        .map(|k| x[cols[k]] * vals[k])
                        .sum()
                })
                .collect(),
        }
    }

    /// Rows as CSV, for debugging dumps.
    pub fn to_csv(&self) -> String {
        let m = self.to_dense();
        let mut out = String::new();
        for i in 0..m.nrows() {
            let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A function on vertices; inner product weighted by π(x) = D(x).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(pub Vec<C64>);

impl VertexFunction {
    pub fn inner(&self, other: &Self, g: &Graph) -> C64 {
        self.0
            .iter()
            .zip(&other.0)
            .zip(g.degrees())
            .map(|((a, b), &d)| a.conj() * b * d as f64)
            .sum()
    }

    pub fn norm_sq(&self, g: &Graph) -> f64 {
        self.inner(self, g).re
    }
}

/// A function on directed edges; uniform inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction(pub Vec<C64>);

impl EdgeFunction {
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn sum(&self) -> C64 {
        self.0.iter().sum()
    }
}

pub fn adjacency(g: &Graph) -> OperatorMatrix {
    let n = g.vertex_count();
    let triplets = (0..g.directed_count())
        .map(|e| (g.origin(e), g.terminus(e), 1.0))
        .collect();
    OperatorMatrix::from_triplets(Role::A, Space::Vertices, Space::Vertices, n, n, triplets)
}

/// Simple random walk `Pf(x) = (1/D(x)) Σ_{y~x} f(y)`.
pub fn laplacian_p(g: &Graph) -> OperatorMatrix {
    let n = g.vertex_count();
    let triplets = (0..g.directed_count())
        .map(|e| {
            let x = g.origin(e);
            (x, g.terminus(e), 1.0 / g.degree(x) as f64)
        })
        .collect();
    OperatorMatrix::from_triplets(Role::P, Space::Vertices, Space::Vertices, n, n, triplets)
}

/// Non-backtracking matrix, `B(e, e') = 1` iff `e' ~> e`.
pub fn nb_b(g: &Graph) -> OperatorMatrix {
    weighted_nb(g, Role::B, |_| 1.0)
}

/// Transfer operator `S = diag(1/Q(o(e))) B`. Rows of edges leaving a leaf
/// are empty and stay zero.
pub fn nb_s(g: &Graph) -> OperatorMatrix {
    let nb = g.directed_count();
    let mut triplets = Vec::new();
    for e in 0..nb {
        let q = g.q(g.origin(e));
        for p in g.predecessors(e) {
            triplets.push((e, p, 1.0 / q as f64));
        }
    }
    OperatorMatrix::from_triplets(
        Role::S,
        Space::DirectedEdges,
        Space::DirectedEdges,
        nb,
        nb,
        triplets,
    )
}

fn weighted_nb(g: &Graph, role: Role, weight: impl Fn(usize) -> f64) -> OperatorMatrix {
    let nb = g.directed_count();
    let mut triplets = Vec::new();
    for e in 0..nb {
        for p in g.predecessors(e) {
            triplets.push((e, p, weight(p)));
        }
    }
    OperatorMatrix::from_triplets(
        role,
        Space::DirectedEdges,
        Space::DirectedEdges,
        nb,
        nb,
        triplets,
    )
}

fn check_weights(g: &Graph, w: &Weights) -> Result<()> {
    if w.p().len() != g.edge_count() || w.potential().len() != g.vertex_count() {
        return Err(Error::WeightMismatch(format!(
            "weights sized for |E| = {}, |V| = {}; graph has |E| = {}, |V| = {}",
            w.p().len(),
            w.potential().len(),
            g.edge_count(),
            g.vertex_count()
        )));
    }
    Ok(())
}

/// `(A_p + W, B_p)` with `(A_p + W) f(x) = Σ p(x,y) f(y) + W(x) f(x)` and
/// `B_p f(e) = Σ_{e' ~> e} p(e') f(e')`.
pub fn schrodinger(g: &Graph, w: &Weights) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check_weights(g, w)?;
    let n = g.vertex_count();
    let mut triplets: Vec<_> = (0..g.directed_count())
        .map(|e| (g.origin(e), g.terminus(e), w.edge(e)))
        .collect();
    triplets.extend(w.potential().iter().enumerate().map(|(x, &v)| (x, x, v)));
    let a = OperatorMatrix::from_triplets(
        Role::SchrodingerA,
        Space::Vertices,
        Space::Vertices,
        n,
        n,
        triplets,
    );
    let b = weighted_nb(g, Role::WeightedB, |e| w.edge(e));
    Ok((a, b))
}

/// Edge reversal ι as a permutation matrix.
pub fn reversal(g: &Graph) -> OperatorMatrix {
    let nb = g.directed_count();
    let triplets = (0..nb).map(|e| (e, g.reversal(e), 1.0)).collect();
    OperatorMatrix::from_triplets(
        Role::Reversal,
        Space::DirectedEdges,
        Space::DirectedEdges,
        nb,
        nb,
        triplets,
    )
}

#[derive(Debug, Clone)]
pub struct Lifts {
    /// `Of(e) = f(o(e))`, |B| x |V|.
    pub o: OperatorMatrix,
    /// `Tf(e) = f(t(e))`, |B| x |V|.
    pub t: OperatorMatrix,
    /// Origin average `f ↦ (1/D(x)) Σ_{o(e)=x} f(e)`, |V| x |B|.
    pub origin_average: OperatorMatrix,
}

pub fn lifts_and_projector(g: &Graph) -> Lifts {
    let n = g.vertex_count();
    let nb = g.directed_count();
    let o = (0..nb).map(|e| (e, g.origin(e), 1.0)).collect();
    let t = (0..nb).map(|e| (e, g.terminus(e), 1.0)).collect();
    let avg = (0..nb)
        .map(|e| {
            let x = g.origin(e);
            (x, e, 1.0 / g.degree(x) as f64)
        })
        .collect();
    Lifts {
        o: OperatorMatrix::from_triplets(Role::O, Space::Vertices, Space::DirectedEdges, nb, n, o),
        t: OperatorMatrix::from_triplets(Role::T, Space::Vertices, Space::DirectedEdges, nb, n, t),
        origin_average: OperatorMatrix::from_triplets(
            Role::OriginAverage,
            Space::DirectedEdges,
            Space::Vertices,
            n,
            nb,
            avg,
        ),
    }
}

/// Columns spanning the π-mean-zero vertex functions:
/// `δ_k - (D(k)/D(last)) δ_last` for `k < last`.
fn mean_zero_vertex_basis(g: &Graph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let last = n - 1;
    let mut m = DMatrix::zeros(n, last);
    for k in 0..last {
        m[(k, k)] = 1.0;
        m[(last, k)] = -(g.degree(k) as f64) / g.degree(last) as f64;
    }
    m
}

/// `f = F + G + H` with `F = O(·)`, `G = T(·)` lifted from mean-zero vertex
/// functions and `H` summing to zero over the edges leaving and entering
/// every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub origin_part: EdgeFunction,
    pub terminus_part: EdgeFunction,
    pub balanced_part: EdgeFunction,
}

pub fn decompose(g: &Graph, f: &EdgeFunction) -> Result<Decomposition> {
    assert_eq!(f.0.len(), g.directed_count());
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.is_bipartite() {
        return Err(Error::BipartiteInput);
    }
    let inner = f.sum().norm();
    let tol = MEAN_ZERO_TOL * f.norm();
    if inner > tol {
        return Err(Error::NotMeanZero { inner, tol });
    }

    let lifts = lifts_and_projector(g);
    let basis = mean_zero_vertex_basis(g);
    let om = lifts.o.to_dense() * &basis;
    let tm = lifts.t.to_dense() * &basis;
    let k = basis.ncols();
    let mut x = DMatrix::zeros(g.directed_count(), 2 * k);
    x.columns_mut(0, k).copy_from(&om);
    x.columns_mut(k, k).copy_from(&tm);

    // Normal equations on the oblique span of the two images.
    let gram = x.transpose() * &x;
    let chol = gram.cholesky().ok_or(Error::SingularMatrix)?;
    let re = DVector::from_iterator(f.0.len(), f.0.iter().map(|z| z.re));
    let im = DVector::from_iterator(f.0.len(), f.0.iter().map(|z| z.im));
    let c_re = chol.solve(&(x.transpose() * re));
    let c_im = chol.solve(&(x.transpose() * im));

    let part = |m: &DMatrix<f64>, range: std::ops::Range<usize>| -> EdgeFunction {
        let a = m * c_re.rows(range.start, range.len());
        let b = m * c_im.rows(range.start, range.len());
        EdgeFunction(
            a.iter()
                .zip(b.iter())
                .map(|(&r, &i)| C64::new(r, i))
                .collect(),
        )
    };
    let origin_part = part(&om, 0..k);
    let terminus_part = part(&tm, k..2 * k);
    let balanced_part = EdgeFunction(
        f.0.iter()
            .zip(&origin_part.0)
            .zip(&terminus_part.0)
            .map(|((a, b), c)| a - b - c)
            .collect(),
    );
    Ok(Decomposition {
        origin_part,
        terminus_part,
        balanced_part,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub dim_o: usize,
    pub dim_t: usize,
    pub dim_h: usize,
    /// Rank of the sum of the two lifted images; equals `dim_o + dim_t`
    /// exactly when the sum is direct.
    pub dim_o_plus_t: usize,
    /// `r - 1`, reported alongside `dim_h` for comparison.
    pub rank_minus_one: i64,
    /// Largest `|<h, u>|` between the unit basis of the balanced space and
    /// unit vectors of the two lifted images.
    pub max_orthogonality_residual: f64,
}

const RANK_TOL: f64 = 1e-9;

pub fn decomposition_report(g: &Graph) -> DecompositionReport {
    let n = g.vertex_count();
    let nb = g.directed_count();
    let lifts = lifts_and_projector(g);
    let basis = mean_zero_vertex_basis(g);
    let om = lifts.o.to_dense() * &basis;
    let tm = lifts.t.to_dense() * &basis;
    let dim_o = linalg::numerical_rank(om.clone(), RANK_TOL);
    let dim_t = linalg::numerical_rank(tm.clone(), RANK_TOL);
    let mut both = DMatrix::zeros(nb, om.ncols() + tm.ncols());
    both.columns_mut(0, om.ncols()).copy_from(&om);
    both.columns_mut(om.ncols(), tm.ncols()).copy_from(&tm);
    let dim_o_plus_t = linalg::numerical_rank(both.clone(), RANK_TOL);

    // Constraint rows: Σ_{o(e)=x} f(e) and Σ_{t(e)=x} f(e) for every x.
    let mut constraints = DMatrix::zeros(2 * n, nb);
    for e in 0..nb {
        constraints[(g.origin(e), e)] = 1.0;
        constraints[(n + g.terminus(e), e)] = 1.0;
    }
    let h_basis = linalg::null_space(&constraints, 1e-12);
    let dim_h = h_basis.ncols();

    let mut residual: f64 = 0.0;
    if dim_h > 0 {
        for col in both.column_iter() {
            let norm = col.norm();
            if norm > 0.0 {
                let proj = h_basis.transpose() * col;
                residual = residual.max(proj.amax() / norm);
            }
        }
    }
    DecompositionReport {
        dim_o,
        dim_t,
        dim_h,
        dim_o_plus_t,
        rank_minus_one: g.rank() - 1,
        max_orthogonality_residual: residual,
    }
}

/// Both sides of
/// `½ Σ_x (1/D(x)) Σ_{y,y'~x} |f(y) - f(y')|² = <f, (I - P²) f>_π`.
pub fn dirichlet_checks(g: &Graph, f: &VertexFunction) -> (f64, f64) {
    let n = g.vertex_count();
    assert_eq!(f.0.len(), n);
    let mut lhs = 0.0;
    for x in 0..n {
        let mut sx = 0.0;
        for y in g.neighbors(x) {
            for y2 in g.neighbors(x) {
                sx += (f.0[y] - f.0[y2]).norm_sqr();
            }
        }
        lhs += 0.5 * sx / g.degree(x) as f64;
    }
    let pf = VertexFunction(laplacian_p(g).apply(&f.0));
    let rhs = f.norm_sq(g) - pf.norm_sq(g);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::graph::parse_edge_list;

    fn triangle() -> Graph {
        generate(Family::Cycle(3), 0).unwrap()
    }

    fn k4() -> Graph {
        generate(Family::Complete(4), 0).unwrap()
    }

    fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn adjacency_spectra() {
        let a = adjacency(&triangle()).to_dense();
        assert_eq!(
            a,
            DMatrix::from_element(3, 3, 1.0) - DMatrix::identity(3, 3)
        );
        assert!(close(&sorted_eigs(a), &[-1.0, -1.0, 2.0], 1e-12));
        let a4 = adjacency(&k4()).to_dense();
        assert!(close(&sorted_eigs(a4), &[-1.0, -1.0, -1.0, 3.0], 1e-12));
    }

    #[test]
    fn laplacian_examples() {
        let g = triangle();
        let p = laplacian_p(&g).to_dense();
        assert_eq!(p, adjacency(&g).to_dense() / 2.0);
        assert!(close(&sorted_eigs(p), &[-0.5, -0.5, 1.0], 1e-12));
        let k = k4();
        assert_eq!(laplacian_p(&k).to_dense(), adjacency(&k).to_dense() / 3.0);

        let g = parse_edge_list("0 1\n1 2\n2 0\n0 3\n3 4\n4 0").unwrap();
        let p = laplacian_p(&g).to_dense();
        for row in p.row_iter() {
            assert!((row.sum() - 1.0).abs() < 1e-15);
        }
        let d: Vec<f64> = g.degrees().iter().map(|&x| x as f64).collect();
        let sym = DMatrix::from_fn(5, 5, |i, j| d[i].sqrt() * p[(i, j)] / d[j].sqrt());
        assert!((&sym - sym.transpose()).amax() < 1e-12);
    }

    #[test]
    fn transfer_operator_structure() {
        let g = triangle();
        let b = nb_b(&g).to_dense();
        // Permutation: every row and column holds a single one.
        for i in 0..6 {
            assert_eq!(b.row(i).sum(), 1.0);
            assert_eq!(b.column(i).sum(), 1.0);
        }
        // Two 3-cycles: B³ = I.
        assert_eq!(&b * &b * &b, DMatrix::identity(6, 6));
        assert_ne!(&b * &b, DMatrix::identity(6, 6));

        let s = nb_s(&k4()).to_dense();
        for row in s.row_iter() {
            let halves = row.iter().filter(|&&x| x == 0.5).count();
            let zeros = row.iter().filter(|&&x| x == 0.0).count();
            assert_eq!((halves, zeros), (2, 10));
        }
    }

    #[test]
    fn s_is_doubly_stochastic_and_intertwines_lifts() {
        let g = parse_edge_list("0 1\n1 2\n2 0\n0 3\n3 1\n3 2\n2 4\n4 0").unwrap();
        let s = nb_s(&g).to_dense();
        let b = nb_b(&g).to_dense();
        let nbc = g.directed_count();
        for e in 0..nbc {
            assert!((s.row(e).sum() - 1.0).abs() < 1e-14);
            assert!((s.column(e).sum() - 1.0).abs() < 1e-14);
            let q = g.q(g.origin(e)) as f64;
            for e2 in 0..nbc {
                assert_eq!(s[(e, e2)], b[(e, e2)] / q);
            }
        }
        let lifts = lifts_and_projector(&g);
        let st = &s * lifts.t.to_dense();
        assert!((st - lifts.o.to_dense()).amax() < 1e-14);

        let avg = lifts.origin_average.to_dense();
        let proj = lifts.o.to_dense() * &avg;
        assert!((&proj * &proj - &proj).amax() < 1e-14);
    }

    #[test]
    fn lifts_are_isometries() {
        let g = parse_edge_list("0 1\n1 2\n2 0\n0 3\n3 1\n3 2\n2 4\n4 0").unwrap();
        let lifts = lifts_and_projector(&g);
        let f = VertexFunction(
            (0..5)
                .map(|i| C64::new(i as f64 - 1.5, (i * i) as f64 * 0.1))
                .collect(),
        );
        let of = EdgeFunction(lifts.o.apply(&f.0));
        let tf = EdgeFunction(lifts.t.apply(&f.0));
        assert!((of.norm().powi(2) - f.norm_sq(&g)).abs() < 1e-12);
        assert!((tf.norm().powi(2) - f.norm_sq(&g)).abs() < 1e-12);
        let avg = lifts_and_projector(&triangle()).origin_average.to_dense();
        for x in 0..3 {
            assert_eq!(avg.row(x).iter().filter(|&&v| v == 0.5).count(), 2);
        }
    }

    #[test]
    fn schrodinger_reductions() {
        let g = triangle();
        let (a, b) = schrodinger(&g, &Weights::unit(&g)).unwrap();
        assert_eq!(a.to_dense(), adjacency(&g).to_dense());
        assert_eq!(b.to_dense(), nb_b(&g).to_dense());

        let shifted = Weights::new(&g, vec![1.0; 3], vec![5.0; 3]).unwrap();
        let (a, _) = schrodinger(&g, &shifted).unwrap();
        assert!(close(&sorted_eigs(a.to_dense()), &[4.0, 4.0, 7.0], 1e-12));

        let g = parse_edge_list("0 1\n1 2\n2 0\n0 3\n3 1\n3 2\n2 4\n4 0").unwrap();
        let (ap, _) = schrodinger(&g, &Weights::random_walk(&g)).unwrap();
        let p = laplacian_p(&g).to_dense();
        let mut pe: Vec<f64> = p.complex_eigenvalues().iter().map(|z| z.re).collect();
        pe.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close(&sorted_eigs(ap.to_dense()), &pe, 1e-10));

        let other = Weights::unit(&k4());
        assert!(matches!(
            schrodinger(&g, &other),
            Err(Error::WeightMismatch(_))
        ));
    }

    #[test]
    fn weighted_b_uses_predecessor_weight() {
        let g = parse_edge_list("0 1\n1 2\n2 0\n0 3\n3 1\n3 2").unwrap();
        let w = Weights::new(&g, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], vec![0.0; 4]).unwrap();
        let (_, bp) = schrodinger(&g, &w).unwrap();
        let b = nb_b(&g);
        for e in 0..g.directed_count() {
            for e2 in 0..g.directed_count() {
                assert_eq!(bp.get(e, e2), b.get(e, e2) * w.edge(e2));
            }
        }
    }

    #[test]
    fn sparse_storage_matches_dense() {
        let g = generate(Family::RandomRegular { n: 1400, d: 3 }, 3).unwrap();
        let b = nb_b(&g);
        assert!(!b.is_dense());
        let x: Vec<C64> = (0..g.directed_count())
            .map(|i| C64::new(i as f64, 1.0))
            .collect();
        let y = b.apply(&x);
        for e in [0, 17, 4199] {
            let expect: C64 = g.predecessors(e).map(|p| x[p]).sum();
            assert_eq!(y[e], expect);
            for p in g.predecessors(e) {
                assert_eq!(b.get(e, p), 1.0);
            }
        }
        let s = nb_s(&g);
        let ones = vec![C64::new(1.0, 0.0); g.directed_count()];
        assert!(s.apply(&ones).iter().all(|z| (z.re - 1.0).abs() < 1e-14));
    }

    #[test]
    fn decomposition_dimensions() {
        let r = decomposition_report(&k4());
        assert_eq!((r.dim_o, r.dim_t, r.dim_h), (3, 3, 5));
        assert_eq!(r.dim_o_plus_t, 6);
        assert_eq!(r.rank_minus_one, 2);
        assert!(r.max_orthogonality_residual < 1e-10);

        let r = decomposition_report(&triangle());
        assert_eq!((r.dim_o, r.dim_t, r.dim_h), (2, 2, 1));
        assert_eq!(r.dim_o_plus_t, 4);

        // Bipartite: images intersect, the sum is not direct.
        let c4 = generate(Family::Cycle(4), 0).unwrap();
        let r = decomposition_report(&c4);
        assert!(r.dim_o_plus_t < r.dim_o + r.dim_t);
    }

    #[test]
    fn decompose_origin_lift_is_fixed() {
        let g = k4();
        let lifts = lifts_and_projector(&g);
        let v = VertexFunction(vec![
            C64::new(1.0, 1.0),
            C64::new(-2.0, 0.0),
            C64::new(0.5, -1.0),
            C64::new(0.5, 0.0),
        ]);
        let f = EdgeFunction(lifts.o.apply(&v.0));
        let d = decompose(&g, &f).unwrap();
        for (a, b) in d.origin_part.0.iter().zip(&f.0) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(d.terminus_part.norm() < 1e-12);
        assert!(d.balanced_part.norm() < 1e-12);
    }

    #[test]
    fn decompose_refuses_bad_input() {
        let c4 = generate(Family::Cycle(4), 0).unwrap();
        let f = EdgeFunction(vec![C64::new(0.0, 0.0); 8]);
        assert!(matches!(decompose(&c4, &f), Err(Error::BipartiteInput)));
        let g = k4();
        let f = EdgeFunction(vec![C64::new(1.0, 0.0); 12]);
        assert!(matches!(decompose(&g, &f), Err(Error::NotMeanZero { .. })));
    }

    #[test]
    fn dirichlet_constant_is_zero() {
        let g = k4();
        let f = VertexFunction(vec![C64::new(2.0, -1.0); 4]);
        let (lhs, rhs) = dirichlet_checks(&g, &f);
        assert!(lhs.abs() < 1e-14 && rhs.abs() < 1e-12);
    }

    #[test]
    fn dense_csv_dump() {
        let csv = adjacency(&triangle()).to_csv();
        assert_eq!(csv, "0,1,1\n1,0,1\n1,1,0\n");
    }
}
