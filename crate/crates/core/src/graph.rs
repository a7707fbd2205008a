//! Cell graphs, edge graphs, triangle refinement, Laplacians, the sum operators
//! `S1`/`S2` and the dense eigensolver oracle.

use std::collections::{HashMap, VecDeque};
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DENSE_CAP: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Gamma,
    Gamma0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    K4,
    TreeBall { radius: usize },
    LadderSegment { n: usize },
    CircularLadder { n: usize },
    HoneycombPatch { radius: usize },
    HexTorus { m: usize, n: usize },
    TriangularPatch { radius: usize },
    TriTorus { m: usize, n: usize },
    SingleTriangle,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::K4 => "k4",
            Family::TreeBall { .. } => "tree_ball",
            Family::LadderSegment { .. } => "ladder_segment",
            Family::CircularLadder { .. } => "circular_ladder",
            Family::HoneycombPatch { .. } => "honeycomb_patch",
            Family::HexTorus { .. } => "hex_torus",
            Family::TriangularPatch { .. } => "triangular_patch",
            Family::TriTorus { .. } => "tri_torus",
            Family::SingleTriangle => "single_triangle",
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match *self {
            Family::K4 | Family::SingleTriangle => vec![],
            Family::TreeBall { radius } | Family::HoneycombPatch { radius } | Family::TriangularPatch { radius } => {
                vec![radius]
            }
            Family::LadderSegment { n } | Family::CircularLadder { n } => vec![n],
            Family::HexTorus { m, n } | Family::TriTorus { m, n } => vec![m, n],
        }
    }
}

/// A finite graph with optional triangle cells and a truncation boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGraph {
    pub family: String,
    pub params: Vec<usize>,
    pub role: Role,
    adj: Vec<Vec<usize>>,
    pub cells: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Family coordinates per vertex (tree depth, lattice position and sublattice, ...).
    pub labels: Vec<[i64; 3]>,
    /// For edge graphs: the endpoints in the parent graph of each vertex.
    pub edge_pairs: Option<Vec<(usize, usize)>>,
}

fn sorted_adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

impl CellGraph {
    pub fn from_parts(
        family: impl Into<String>,
        params: Vec<usize>,
        role: Role,
        n: usize,
        edges: &[(usize, usize)],
        cells: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Self> {
        if boundary.len() != n {
            return Err(Error::InvalidArgument("boundary mask length differs from vertex count".into()));
        }
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::InvalidArgument(format!("bad edge ({a}, {b})")));
        }
        let adj = sorted_adjacency(n, edges);
        let g = Self { family: family.into(), params, role, adj, cells, boundary, labels: vec![[0; 3]; n], edge_pairs: None };
        for (i, c) in g.cells.iter().enumerate() {
            let ok = c.iter().all(|&v| v < n) && g.has_edge(c[0], c[1]) && g.has_edge(c[1], c[2]) && g.has_edge(c[0], c[2]);
            if !ok {
                return Err(Error::InvalidArgument(format!("cell {i} is not a triangle of the graph")));
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Each undirected edge once as `(a, b)` with `a < b`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            for &b in l {
                if a < b {
                    e.push((a, b));
                }
            }
        }
        e
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices whose whole neighborhood is present.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Vertices that are interior and whose neighbors are all interior.
    pub fn deep_interior(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| !self.boundary[v] && self.adj[v].iter().all(|&w| !self.boundary[w]))
            .collect()
    }

    pub fn find_label(&self, label: [i64; 3]) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn label_index(&self) -> HashMap<[i64; 3], usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    pub fn cells_of(&self, v: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| self.cells[c].contains(&v)).collect()
    }

    /// Checks the structural invariants of the role on interior vertices.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match self.role {
            Role::Gamma => {
                for v in self.interior() {
                    if self.degree(v) != 3 {
                        return bad(format!("interior vertex {v} has degree {}", self.degree(v)));
                    }
                }
            }
            Role::Gamma0 => {
                let mut count = vec![0usize; self.len()];
                let mut covered = HashMap::new();
                for (i, c) in self.cells.iter().enumerate() {
                    for &v in c {
                        count[v] += 1;
                    }
                    for (a, b) in [(c[0], c[1]), (c[1], c[2]), (c[0], c[2])] {
                        if let Some(j) = covered.insert((a.min(b), a.max(b)), i) {
                            return bad(format!("cells {j} and {i} share an edge"));
                        }
                    }
                }
                for v in self.interior() {
                    if self.degree(v) != 2 * count[v] || count[v] < 2 {
                        return bad(format!("interior vertex {v}: degree {} in {} cells", self.degree(v), count[v]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        let mut q = VecDeque::from([src]);
        d[src] = 0;
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    }
}

pub fn build_graph(family: Family) -> Result<CellGraph> {
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::InvalidArgument(format!("invalid size: {what}"))) };
    let mut g = match family {
        Family::K4 => {
            let e: Vec<_> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
            CellGraph::from_parts("k4", vec![], Role::Gamma, 4, &e, vec![], vec![false; 4])?
        }
        Family::TreeBall { radius } => {
            need(radius >= 1, "radius >= 1")?;
            tree_ball(radius)?
        }
        Family::LadderSegment { n } => {
            need(n >= 2, "n >= 2")?;
            ladder(n, false)?
        }
        Family::CircularLadder { n } => {
            need(n >= 3, "n >= 3")?;
            ladder(n, true)?
        }
        Family::HoneycombPatch { radius } => {
            need(radius >= 1, "radius >= 1")?;
            honeycomb(radius as i64, None)?
        }
        Family::HexTorus { m, n } => {
            need(m >= 2 && n >= 2, "m, n >= 2")?;
            honeycomb(0, Some((m as i64, n as i64)))?
        }
        Family::TriangularPatch { radius } => {
            need(radius >= 1, "radius >= 1")?;
            triangular(radius as i64, None)?
        }
        Family::TriTorus { m, n } => {
            need(m >= 3 && n >= 3, "m, n >= 3")?;
            triangular(0, Some((m as i64, n as i64)))?
        }
        Family::SingleTriangle => {
            CellGraph::from_parts("single_triangle", vec![], Role::Gamma0, 3, &[(0, 1), (1, 2), (0, 2)], vec![[0, 1, 2]], vec![true; 3])?
        }
    };
    g.family = family.name().to_string();
    g.params = family.params();
    g.check_invariants()?;
    Ok(g)
}

fn tree_ball(radius: usize) -> Result<CellGraph> {
    let mut edges = Vec::new();
    let mut depth = vec![0usize];
    let mut frontier = vec![0usize];
    for d in 1..=radius {
        let mut next = Vec::new();
        for &p in &frontier {
            let children = if d == 1 { 3 } else { 2 };
            for _ in 0..children {
                let c = depth.len();
                depth.push(d);
                edges.push((p, c));
                next.push(c);
            }
        }
        frontier = next;
    }
    let n = depth.len();
    let boundary = depth.iter().map(|&d| d == radius).collect();
    let mut g = CellGraph::from_parts("tree_ball", vec![radius], Role::Gamma, n, &edges, vec![], boundary)?;
    g.labels = depth.iter().map(|&d| [d as i64, 0, 0]).collect();
    Ok(g)
}

fn ladder(n: usize, closed: bool) -> Result<CellGraph> {
    let mut edges = Vec::new();
    for k in 0..n {
        edges.push((k, n + k));
        if k + 1 < n || closed {
            let k1 = (k + 1) % n;
            edges.push((k, k1));
            edges.push((n + k, n + k1));
        }
    }
    let boundary = (0..2 * n).map(|v| !closed && (v % n == 0 || v % n == n - 1)).collect();
    let name = if closed { "circular_ladder" } else { "ladder_segment" };
    let mut g = CellGraph::from_parts(name, vec![n], Role::Gamma, 2 * n, &edges, vec![], boundary)?;
    g.labels = (0..2 * n).map(|v| [(v % n) as i64, (v / n) as i64, 0]).collect();
    Ok(g)
}

/// Honeycomb with `a(j,k)` adjacent to `b(j,k)`, `b(j-1,k)`, `b(j,k-1)`.
fn honeycomb(radius: i64, torus: Option<(i64, i64)>) -> Result<CellGraph> {
    let cells: Vec<(i64, i64)> = match torus {
        Some((m, n)) => (0..m).flat_map(|j| (0..n).map(move |k| (j, k))).collect(),
        None => (-radius..=radius).flat_map(|j| (-radius..=radius).map(move |k| (j, k))).collect(),
    };
    let wrap = |j: i64, k: i64| match torus {
        Some((m, n)) => (j.rem_euclid(m), k.rem_euclid(n)),
        None => (j, k),
    };
    let mut labels = Vec::new();
    for &(j, k) in &cells {
        labels.push([j, k, 0]);
        labels.push([j, k, 1]);
    }
    let index: HashMap<[i64; 3], usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut edges = Vec::new();
    for &(j, k) in &cells {
        let a = index[&[j, k, 0]];
        for (bj, bk) in [(j, k), (j - 1, k), (j, k - 1)] {
            let (bj, bk) = wrap(bj, bk);
            if let Some(&b) = index.get(&[bj, bk, 1]) {
                edges.push((a, b));
            }
        }
    }
    let n = labels.len();
    let mut g = CellGraph::from_parts("honeycomb", vec![], Role::Gamma, n, &edges, vec![], vec![false; n])?;
    g.boundary = (0..n).map(|v| g.degree(v) < 3).collect();
    g.labels = labels;
    Ok(g)
}

/// Triangular lattice with up-triangles `{(i,j), (i+1,j), (i,j+1)}` as cells.
fn triangular(radius: i64, torus: Option<(i64, i64)>) -> Result<CellGraph> {
    let pts: Vec<(i64, i64)> = match torus {
        Some((m, n)) => (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        None => (-radius..=radius).flat_map(|i| (-radius..=radius).map(move |j| (i, j))).collect(),
    };
    let wrap = |i: i64, j: i64| match torus {
        Some((m, n)) => (i.rem_euclid(m), j.rem_euclid(n)),
        None => (i, j),
    };
    let labels: Vec<[i64; 3]> = pts.iter().map(|&(i, j)| [i, j, 0]).collect();
    let index: HashMap<[i64; 3], usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let at = |i: i64, j: i64| {
        let (i, j) = wrap(i, j);
        index.get(&[i, j, 0]).copied()
    };
    let mut edges = Vec::new();
    let mut cells = Vec::new();
    for &(i, j) in &pts {
        let v = at(i, j).expect("own point");
        let right = at(i + 1, j);
        let up = at(i, j + 1);
        for w in [right, up, at(i + 1, j - 1)].into_iter().flatten() {
            edges.push((v, w));
        }
        if let (Some(r), Some(u)) = (right, up) {
            cells.push([v, r, u]);
        }
    }
    let n = labels.len();
    let mut g = CellGraph::from_parts("triangular", vec![], Role::Gamma0, n, &edges, cells, vec![false; n])?;
    g.boundary = (0..n).map(|v| g.degree(v) < 6).collect();
    g.labels = labels;
    Ok(g)
}

/// Line graph of a cell graph; one cell per interior vertex of degree 3.
pub fn edge_graph(g: &CellGraph) -> Result<CellGraph> {
    let pairs = g.edges();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let key = |a: usize, b: usize| index[&(a.min(b), a.max(b))];
    let mut edges = Vec::new();
    let mut cells = Vec::new();
    for v in 0..g.len() {
        let inc: Vec<usize> = g.neighbors(v).iter().map(|&w| key(v, w)).collect();
        for i in 0..inc.len() {
            for j in i + 1..inc.len() {
                edges.push((inc[i], inc[j]));
            }
        }
        if inc.len() == 3 && !g.boundary[v] {
            let mut c = [inc[0], inc[1], inc[2]];
            c.sort_unstable();
            cells.push(c);
        }
    }
    let boundary = pairs.iter().map(|&(a, b)| g.boundary[a] || g.boundary[b]).collect();
    let mut out = CellGraph::from_parts(format!("edge_graph({})", g.family), g.params.clone(), Role::Gamma0, pairs.len(), &edges, cells, boundary)?;
    out.labels = pairs.iter().map(|&(a, b)| [a as i64, b as i64, 0]).collect();
    out.edge_pairs = Some(pairs);
    Ok(out)
}

/// Replaces every cell by the three-triangle figure; old vertices keep their indices.
pub fn refine(g: &CellGraph) -> Result<CellGraph> {
    if g.cells.is_empty() {
        return Err(Error::InvalidArgument("refine needs cells".into()));
    }
    let mut cell_edges = std::collections::HashSet::new();
    for c in &g.cells {
        for (a, b) in [(c[0], c[1]), (c[1], c[2]), (c[0], c[2])] {
            cell_edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|e| !cell_edges.contains(e)).collect();
    let mut n = g.len();
    let mut cells = Vec::with_capacity(3 * g.cells.len());
    for &[a, b, c] in &g.cells {
        let (ab, bc, ca) = (n, n + 1, n + 2);
        n += 3;
        let new = [[a, ab, ca], [ab, b, bc], [ca, bc, c]];
        for t in new {
            edges.extend([(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]);
        }
        cells.extend(new);
    }
    let mut boundary = g.boundary.clone();
    boundary.resize(n, false);
    let mut out = CellGraph::from_parts(format!("refine({})", g.family), g.params.clone(), g.role, n, &edges, cells, boundary)?;
    out.labels[..g.len()].copy_from_slice(&g.labels);
    Ok(out)
}

/// Minimal arithmetic needed by operator application.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default + Send + Sync {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LaplacianKind {
    #[default]
    Graph,
    Probabilistic,
}

/// `deg(x) f(x) - sum_{y~x} f(y)`, divided by `deg(x)` for the probabilistic kind.
pub fn neg_laplacian_apply<T: Scalar>(g: &CellGraph, kind: LaplacianKind, f: &[T]) -> Vec<T> {
    assert_eq!(f.len(), g.len(), "function length differs from vertex count");
    (0..g.len())
        .map(|x| {
            let nb = g.neighbors(x);
            let s = nb.iter().fold(T::default(), |acc, &y| acc + f[y]);
            let v = f[x] * nb.len() as f64 - s;
            match kind {
                LaplacianKind::Graph => v,
                LaplacianKind::Probabilistic if nb.is_empty() => v,
                LaplacianKind::Probabilistic => v * (1.0 / nb.len() as f64),
            }
        })
        .collect()
}

/// Maximum over `rows` of `|(-Lap f)(x) - lambda f(x)|`.
pub fn eigen_residual<T: Scalar>(g: &CellGraph, f: &[T], lambda: f64, rows: &[usize], norm: impl Fn(T) -> f64) -> f64 {
    let lf = neg_laplacian_apply(g, LaplacianKind::Graph, f);
    rows.iter().map(|&x| norm(lf[x] - f[x] * lambda)).fold(0.0, f64::max)
}

pub fn adjacency_matrix(g: &CellGraph) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(g.len(), g.len());
    for (x, y) in g.edges() {
        a[(x, y)] = 1.0;
        a[(y, x)] = 1.0;
    }
    a
}

pub fn dense_laplacian(g: &CellGraph) -> DMatrix<f64> {
    let mut l = -adjacency_matrix(g);
    for x in 0..g.len() {
        l[(x, x)] = g.degree(x) as f64;
    }
    l
}

/// Laplacian with a fixed diagonal, i.e. zero values outside the truncation.
pub fn dense_laplacian_with_degree(g: &CellGraph, degree: f64) -> DMatrix<f64> {
    let mut l = -adjacency_matrix(g);
    for x in 0..g.len() {
        l[(x, x)] = degree;
    }
    l
}

pub fn principal_submatrix(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors of the symmetric form, one per column.
    pub vectors: DMatrix<f64>,
}

/// Dense symmetric eigendecomposition with ascending ordering.
pub fn symmetric_spectrum(m: DMatrix<f64>) -> Result<Spectrum> {
    if m.nrows() > DENSE_CAP {
        return Err(Error::SizeCap { size: m.nrows(), cap: DENSE_CAP });
    }
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum { values, vectors })
}

/// Spectrum of `-Lap`; the probabilistic kind uses `D^{-1/2} L D^{-1/2}`.
pub fn brute_spectrum(g: &CellGraph, kind: LaplacianKind) -> Result<Spectrum> {
    if g.len() > DENSE_CAP {
        return Err(Error::SizeCap { size: g.len(), cap: DENSE_CAP });
    }
    let mut l = dense_laplacian(g);
    if kind == LaplacianKind::Probabilistic {
        let s: Vec<f64> = (0..g.len()).map(|x| 1.0 / (g.degree(x).max(1) as f64).sqrt()).collect();
        for i in 0..g.len() {
            for j in 0..g.len() {
                l[(i, j)] *= s[i] * s[j];
            }
        }
    }
    symmetric_spectrum(l)
}

fn pairs_for<'a>(gamma: &CellGraph, gamma0: &'a CellGraph) -> Result<&'a [(usize, usize)]> {
    let pairs = gamma0.edge_pairs.as_deref().ok_or(Error::MismatchedPair)?;
    if pairs.len() != gamma.edge_count() || pairs.iter().any(|&(a, b)| a >= gamma.len() || b >= gamma.len() || !gamma.has_edge(a, b)) {
        return Err(Error::MismatchedPair);
    }
    Ok(pairs)
}

/// `(S1 f)(x) = f(a) + f(b)` for the edge `x = {a, b}`.
pub fn s1_apply<T: Scalar>(gamma: &CellGraph, gamma0: &CellGraph, f: &[T]) -> Result<Vec<T>> {
    let pairs = pairs_for(gamma, gamma0)?;
    Ok(pairs.iter().map(|&(a, b)| f[a] + f[b]).collect())
}

/// `(S2 F)(v) = sum of F over the edges at v`.
pub fn s2_apply<T: Scalar>(gamma: &CellGraph, gamma0: &CellGraph, f: &[T]) -> Result<Vec<T>> {
    let pairs = pairs_for(gamma, gamma0)?;
    let mut out = vec![T::default(); gamma.len()];
    for (x, &(a, b)) in pairs.iter().enumerate() {
        out[a] = out[a] + f[x];
        out[b] = out[b] + f[x];
    }
    Ok(out)
}

/// Integer matrix of `S1`, rows indexed by `Gamma0`.
pub fn s1_matrix(gamma: &CellGraph, gamma0: &CellGraph) -> Result<DMatrix<i64>> {
    let pairs = pairs_for(gamma, gamma0)?;
    let mut m = DMatrix::zeros(pairs.len(), gamma.len());
    for (x, &(a, b)) in pairs.iter().enumerate() {
        m[(x, a)] = 1;
        m[(x, b)] = 1;
    }
    Ok(m)
}

pub fn s2_matrix(gamma: &CellGraph, gamma0: &CellGraph) -> Result<DMatrix<i64>> {
    Ok(s1_matrix(gamma, gamma0)?.transpose())
}

pub fn integer_laplacian(g: &CellGraph) -> DMatrix<i64> {
    let mut l = DMatrix::zeros(g.len(), g.len());
    for x in 0..g.len() {
        l[(x, x)] = g.degree(x) as i64;
        for &y in g.neighbors(x) {
            l[(x, y)] = -1;
        }
    }
    l
}

/// Interchange format for graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub family: String,
    pub params: Vec<usize>,
    pub vertices: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
    pub cells: Vec<[usize; 3]>,
    pub boundary: Vec<usize>,
}

impl From<&CellGraph> for GraphJson {
    fn from(g: &CellGraph) -> Self {
        Self {
            family: g.family.clone(),
            params: g.params.clone(),
            vertices: (0..g.len()).collect(),
            edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            cells: g.cells.clone(),
            boundary: (0..g.len()).filter(|&v| g.boundary[v]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for CellGraph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        let n = j.vertices.len();
        if j.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidArgument("vertices must be 0..n in order".into()));
        }
        let mut boundary = vec![false; n];
        for &b in &j.boundary {
            *boundary.get_mut(b).ok_or_else(|| Error::InvalidArgument(format!("boundary vertex {b} out of range")))? = true;
        }
        let role = if j.cells.is_empty() { Role::Gamma } else { Role::Gamma0 };
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        CellGraph::from_parts(j.family, j.params, role, n, &edges, j.cells, boundary)
    }
}

/// Solves `A x = b` densely; used as an oracle.
pub fn dense_solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.lu().solve(&rhs).map(|x| x.as_slice().to_vec()).ok_or(Error::InvalidArgument("singular system".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_shape() {
        let g = build_graph(Family::K4).unwrap();
        assert_eq!(g.len(), 4);
        assert!((0..4).all(|v| g.degree(v) == 3));
        assert!(g.boundary.iter().all(|&b| !b));
    }

    #[test]
    fn tree_ball_counts() {
        let g = build_graph(Family::TreeBall { radius: 2 }).unwrap();
        assert_eq!(g.len(), 10);
        let d = g.distances_from(0);
        assert_eq!(d.iter().filter(|&&x| x == 2).count(), 6);
    }

    #[test]
    fn refine_counts() {
        let t = build_graph(Family::SingleTriangle).unwrap();
        let r = refine(&t).unwrap();
        assert_eq!((r.len(), r.cells.len()), (6, 3));
        assert_eq!(refine(&r).unwrap().len(), 15);
    }

    #[test]
    fn invalid_sizes() {
        assert!(build_graph(Family::TreeBall { radius: 0 }).is_err());
        assert!(build_graph(Family::CircularLadder { n: 2 }).is_err());
        assert!(build_graph(Family::TriTorus { m: 2, n: 5 }).is_err());
    }

    #[test]
    fn delta_at_tree_center() {
        let g = build_graph(Family::TreeBall { radius: 3 }).unwrap();
        let mut f = vec![0.0; g.len()];
        f[0] = 1.0;
        let l = neg_laplacian_apply(&g, LaplacianKind::Graph, &f);
        assert_eq!(l[0], 3.0);
        for &y in g.neighbors(0) {
            assert_eq!(l[y], -1.0);
        }
    }
}
