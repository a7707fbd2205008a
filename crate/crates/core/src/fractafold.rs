//! Refinement meshes over a triangle-cell base graph, eigenfunction extension,
//! the localized functions `psi_v`, the extension operator and its adjoint,
//! the assembled kernel, spectrum descriptions and the brute-force decimation check.
//!
//! The mesh operator is `4 D^{-1} L`. On a 4-regular base it is the graph
//! Laplacian; on bases with degree-2 corners it keeps the decimation relation
//! `lambda_m = R(lambda_{m+1})` valid at the corners.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::{
    enumerate_series, julia_backward_orbit, m_factor, preimage_band, preimage_point, Band, Cutoff, DecimationPolynomial,
    EigenvalueAddress, SeriesKind,
};
use crate::error::{Error, Result};
use crate::graph::{brute_spectrum, CellGraph, LaplacianKind, Spectrum};

const R: DecimationPolynomial = DecimationPolynomial::GASKET;

/// Values at which extension through one level is undetermined.
pub const FORBIDDEN: [f64; 3] = [2.0, 5.0, 6.0];
const FORBIDDEN_TOL: f64 = 1e-12;

pub fn is_forbidden(lambda: f64) -> bool {
    FORBIDDEN.iter().any(|&f| (lambda - f).abs() <= FORBIDDEN_TOL * f)
}

/// Levels `0..=n` of repeated refinement with the self-similar vertex measure.
#[derive(Debug, Clone)]
pub struct FractafoldMesh {
    graphs: Vec<CellGraph>,
    weights: Vec<f64>,
}

/// Each cell of level `level` carries mass `3^-level`, split equally among its corners.
pub fn vertex_weights(g: &CellGraph, level: usize) -> Vec<f64> {
    let share = 3f64.powi(-(level as i32)) / 3.0;
    let mut w = vec![0.0; g.len()];
    for c in &g.cells {
        for &v in c {
            w[v] += share;
        }
    }
    w
}

impl FractafoldMesh {
    pub fn new(base: CellGraph, level: usize) -> Result<Self> {
        let mut in_cells = vec![0usize; base.len()];
        for c in &base.cells {
            for &v in c {
                in_cells[v] += 1;
            }
        }
        if let Some(v) = in_cells.iter().position(|&k| k == 0 || k > 2) {
            return Err(Error::InvalidArgument(format!("vertex {v} lies in {} cells; need 1 or 2", in_cells[v])));
        }
        let covered: usize = base.cells.len() * 3;
        if covered != base.edge_count() {
            return Err(Error::InvalidArgument("every base edge must belong to exactly one cell".into()));
        }
        let mut graphs = vec![base];
        for _ in 0..level {
            let next = crate::graph::refine(graphs.last().unwrap())?;
            graphs.push(next);
        }
        let weights = vertex_weights(graphs.last().unwrap(), level);
        Ok(Self { graphs, weights })
    }

    pub fn level(&self) -> usize {
        self.graphs.len() - 1
    }

    pub fn base(&self) -> &CellGraph {
        &self.graphs[0]
    }

    pub fn graph(&self, m: usize) -> &CellGraph {
        &self.graphs[m]
    }

    pub fn finest(&self) -> &CellGraph {
        self.graphs.last().unwrap()
    }

    /// Measure weights on the finest level.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Level-0 cell containing cell `cell` of level `level`.
    pub fn ancestor(&self, level: usize, cell: usize) -> usize {
        cell / 3usize.pow(level as u32)
    }

    /// Level-0 cells containing vertex `x` of the finest level.
    pub fn base_cells_of(&self, x: usize) -> Vec<usize> {
        let n = self.level();
        let mut out: Vec<usize> = self
            .finest()
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&x))
            .map(|(i, _)| self.ancestor(n, i))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `(-Lap f)(x) = (4 / deg x) (deg(x) f(x) - sum_{y~x} f(y))`.
pub fn mesh_laplacian_apply(g: &CellGraph, f: &[f64]) -> Vec<f64> {
    (0..g.len())
        .map(|x| {
            let nb = g.neighbors(x);
            let s: f64 = nb.iter().map(|&y| f[y]).sum();
            4.0 * (nb.len() as f64 * f[x] - s) / nb.len() as f64
        })
        .collect()
}

pub fn mesh_residual(g: &CellGraph, f: &[f64], lambda: f64, rows: &[usize]) -> f64 {
    let l = mesh_laplacian_apply(g, f);
    rows.iter().map(|&x| (l[x] - lambda * f[x]).abs()).fold(0.0, f64::max)
}

/// Spectrum of the mesh operator; vectors are for the symmetrized form `D^{1/2} f`.
pub fn mesh_spectrum(g: &CellGraph) -> Result<Spectrum> {
    let mut s = brute_spectrum(g, LaplacianKind::Probabilistic)?;
    for v in &mut s.values {
        *v *= 4.0;
    }
    Ok(s)
}

/// The eigen-equation at the three midpoints of one cell, given its corners.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSystem {
    pub lambda: f64,
    pub matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl ExtensionSystem {
    /// Rows are the midpoints `ab, bc, ca`; each has the two corners and the other two midpoints as neighbors.
    pub fn matrix_at(lambda: f64) -> Matrix3<f64> {
        let d = 4.0 - lambda;
        Matrix3::new(d, -1.0, -1.0, -1.0, d, -1.0, -1.0, -1.0, d)
    }

    pub fn determinant(lambda: f64) -> f64 {
        Self::matrix_at(lambda).determinant()
    }

    /// Factor multiplying the old-vertex relation; it vanishes at 6.
    pub fn transfer_factor(lambda: f64) -> f64 {
        6.0 - lambda
    }

    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || is_forbidden(lambda) {
            return Err(Error::Forbidden(lambda));
        }
        let matrix = Self::matrix_at(lambda);
        let inverse = matrix.try_inverse().ok_or(Error::Forbidden(lambda))?;
        Ok(Self { lambda, matrix, inverse })
    }

    /// Midpoint values `(ab, bc, ca)` from corner values.
    pub fn solve(&self, a: f64, b: f64, c: f64) -> [f64; 3] {
        let w = self.inverse * Vector3::new(a + b, b + c, c + a);
        [w[0], w[1], w[2]]
    }

    /// Linear map from corner values to midpoint values, column `j` for corner `j`.
    pub fn coefficients(&self) -> Matrix3<f64> {
        let rhs = Matrix3::new(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0);
        self.inverse * rhs
    }
}

/// Extends `u` on level `m` to level `m + 1` by solving the midpoint system at `lambda_next` on every cell.
pub fn extend_eigenfunction(mesh: &FractafoldMesh, m: usize, u: &[f64], lambda_next: f64) -> Result<Vec<f64>> {
    if m >= mesh.level() {
        return Err(Error::InvalidArgument(format!("level {m} has no refinement in a mesh of level {}", mesh.level())));
    }
    let coarse = mesh.graph(m);
    if u.len() != coarse.len() {
        return Err(Error::InvalidArgument("function length differs from level size".into()));
    }
    let sys = ExtensionSystem::new(lambda_next)?;
    Ok(extend_with(coarse, &sys, u))
}

fn extend_with(coarse: &CellGraph, sys: &ExtensionSystem, u: &[f64]) -> Vec<f64> {
    let n = coarse.len();
    let mut w = vec![0.0; n + 3 * coarse.cells.len()];
    w[..n].copy_from_slice(u);
    w[n..].par_chunks_mut(3).zip(coarse.cells.par_iter()).for_each(|(out, &[a, b, c])| {
        out.copy_from_slice(&sys.solve(u[a], u[b], u[c]));
    });
    w
}

/// Transpose of `extend_with`.
fn extend_transpose(coarse: &CellGraph, sys: &ExtensionSystem, h: &[f64]) -> Vec<f64> {
    let n = coarse.len();
    let k = sys.coefficients();
    let mut out = h[..n].to_vec();
    for (i, c) in coarse.cells.iter().enumerate() {
        for (j, &corner) in c.iter().enumerate() {
            out[corner] += (0..3).map(|r| k[(r, j)] * h[n + 3 * i + r]).sum::<f64>();
        }
    }
    out
}

/// `lambda_0, ..., lambda_n` along an address, rejecting forbidden values at levels `1..=n`.
pub fn admissible_levels(addr: &EigenvalueAddress, n: usize) -> Result<Vec<f64>> {
    let levels = (0..=n).map(|l| addr.level_value(&R, l)).collect::<Result<Vec<f64>>>()?;
    if let Some(&bad) = levels[1..].iter().find(|&&x| is_forbidden(x)) {
        return Err(Error::Forbidden(bad));
    }
    Ok(levels)
}

fn systems(mesh: &FractafoldMesh, addr: &EigenvalueAddress) -> Result<Vec<ExtensionSystem>> {
    admissible_levels(addr, mesh.level())?[1..].iter().map(|&l| ExtensionSystem::new(l)).collect()
}

/// Partial product of the `M` factors over levels `1..=n`.
pub fn m_partial(addr: &EigenvalueAddress, n: usize) -> Result<f64> {
    admissible_levels(addr, n)?[1..].iter().try_fold(1.0, |p, &l| Ok(p * m_factor(l)?))
}

/// `Psi_lambda f0` on the finest level.
pub fn psi_apply(mesh: &FractafoldMesh, f0: &[f64], addr: &EigenvalueAddress) -> Result<Vec<f64>> {
    if f0.len() != mesh.base().len() {
        return Err(Error::InvalidArgument("base function length differs from base size".into()));
    }
    let sys = systems(mesh, addr)?;
    Ok(sys.iter().enumerate().fold(f0.to_vec(), |u, (m, s)| extend_with(mesh.graph(m), s, &u)))
}

/// `psi_v^lambda` on the finest level.
pub fn psi_v_lambda(mesh: &FractafoldMesh, v: usize, addr: &EigenvalueAddress) -> Result<Vec<f64>> {
    if v >= mesh.base().len() {
        return Err(Error::InvalidArgument(format!("vertex {v} is not a base vertex")));
    }
    let mut delta = vec![0.0; mesh.base().len()];
    delta[v] = 1.0;
    psi_apply(mesh, &delta, addr)
}

fn psi_transpose(mesh: &FractafoldMesh, h: Vec<f64>, addr: &EigenvalueAddress) -> Result<Vec<f64>> {
    if h.len() != mesh.finest().len() {
        return Err(Error::InvalidArgument("function length differs from mesh size".into()));
    }
    let sys = systems(mesh, addr)?;
    Ok(sys.iter().enumerate().rev().fold(h, |acc, (m, s)| extend_transpose(mesh.graph(m), s, &acc)))
}

/// `(Psi* g)(v) = sum_x mu(x) g(x) psi_v(x)`.
pub fn psi_adjoint(mesh: &FractafoldMesh, g: &[f64], addr: &EigenvalueAddress) -> Result<Vec<f64>> {
    let h = g.iter().zip(mesh.weights()).map(|(a, w)| a * w).collect();
    psi_transpose(mesh, h, addr)
}

/// `psi_v(y)` for every base vertex `v`.
pub fn psi_values_at(mesh: &FractafoldMesh, y: usize, addr: &EigenvalueAddress) -> Result<Vec<f64>> {
    let mut h = vec![0.0; mesh.finest().len()];
    *h.get_mut(y).ok_or(Error::InvalidArgument(format!("vertex {y} outside the mesh")))? = 1.0;
    psi_transpose(mesh, h, addr)
}

/// `x -> P(lambda, x, y)` with the level-`n` partial `M` product; `p0` is the base kernel at `lambda_0`
/// relative to the base vertex measure.
pub fn fractafold_kernel_column(mesh: &FractafoldMesh, addr: &EigenvalueAddress, p0: &DMatrix<f64>, y: usize) -> Result<Vec<f64>> {
    let nb = mesh.base().len();
    if p0.nrows() != nb || p0.ncols() != nb {
        return Err(Error::InvalidArgument(format!("base kernel must be {nb}x{nb}")));
    }
    let c = psi_values_at(mesh, y, addr)?;
    let coeff = p0 * nalgebra::DVector::from_vec(c);
    let m = m_partial(addr, mesh.level())?;
    Ok(psi_apply(mesh, coeff.as_slice(), addr)?.into_iter().map(|v| m * v).collect())
}

pub fn fractafold_kernel(mesh: &FractafoldMesh, addr: &EigenvalueAddress, p0: &DMatrix<f64>, x: usize, y: usize) -> Result<f64> {
    let col = fractafold_kernel_column(mesh, addr, p0, y)?;
    col.get(x).copied().ok_or(Error::InvalidArgument(format!("vertex {x} outside the mesh")))
}

/// Closed interval variant: `V_m = {k / 2^m}`, `R(z) = z(4 - z)`, forbidden value 2.
pub mod interval {
    use crate::error::{Error, Result};

    pub fn extend(u: &[f64], lambda_next: f64) -> Result<Vec<f64>> {
        if u.len() < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        if (lambda_next - 2.0).abs() < 1e-12 {
            return Err(Error::Forbidden(lambda_next));
        }
        let mut w = Vec::with_capacity(2 * u.len() - 1);
        for p in u.windows(2) {
            w.push(p[0]);
            w.push((p[0] + p[1]) / (2.0 - lambda_next));
        }
        w.push(u[u.len() - 1]);
        Ok(w)
    }

    /// Trapezoid weights on `2^level + 1` points.
    pub fn weights(level: usize) -> Vec<f64> {
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        (0..=n).map(|i| if i == 0 || i == n { h / 2.0 } else { h }).collect()
    }

    pub fn norm_sq(u: &[f64], level: usize) -> f64 {
        u.iter().zip(weights(level)).map(|(a, w)| a * a * w).sum()
    }

    /// Ratios of weighted squared norms across `levels` extensions of `sin(k pi x)` from level `start`.
    pub fn sine_norm_ratios(k: usize, start: usize, levels: usize) -> Result<Vec<f64>> {
        let n = 1usize << start;
        let pi = std::f64::consts::PI;
        let mut u: Vec<f64> = (0..=n).map(|i| (k as f64 * pi * i as f64 / n as f64).sin()).collect();
        let mut out = Vec::with_capacity(levels);
        for m in start..start + levels {
            let theta = k as f64 * pi / (1usize << (m + 1)) as f64;
            let w = extend(&u, 2.0 - 2.0 * theta.cos())?;
            out.push(norm_sq(&w, m + 1) / norm_sq(&u, m));
            u = w;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma0 {
    pub bands: Vec<[f64; 2]>,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub value: f64,
    pub series: String,
    pub m0: u32,
    /// Member of the lower set of the sandwich.
    pub lower: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub bands: Vec<Band>,
    pub points: Vec<SpectrumPoint>,
    pub cutoff: Cutoff,
}

impl SpectrumReport {
    fn in_bands(&self, x: f64, tol: f64) -> bool {
        self.bands.iter().any(|b| x >= b.lo - tol && x <= b.hi + tol)
    }

    fn in_points(&self, x: f64, tol: f64, lower_only: bool) -> bool {
        self.points.iter().any(|p| (!lower_only || p.lower) && (p.value - x).abs() <= tol * x.abs().max(1.0))
    }

    pub fn lower_contains(&self, x: f64, tol: f64) -> bool {
        self.in_bands(x, tol) || self.in_points(x, tol, true)
    }

    pub fn upper_contains(&self, x: f64, tol: f64) -> bool {
        self.in_bands(x, tol) || self.in_points(x, tol, false)
    }
}

fn push_points(out: &mut Vec<SpectrumPoint>, values: impl IntoIterator<Item = (f64, u32)>, series: &str, lower: bool) {
    out.extend(values.into_iter().map(|(value, m0)| SpectrumPoint { value, series: series.into(), m0, lower }));
}

/// Preimage bands and points of `sigma0`, the lower-set series and the upper-set series, to the cutoff.
pub fn fractafold_spectrum(sigma0: &Sigma0, cutoff: Cutoff, tol: f64) -> Result<SpectrumReport> {
    let mut bands = Vec::new();
    for &[a, b] in &sigma0.bands {
        bands.extend(preimage_band(&R, a, b, cutoff.max_word_len, tol)?);
    }
    bands.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let mut points = Vec::new();
    for &w in &sigma0.points {
        let pre = preimage_point(&R, w, cutoff.max_word_len, tol)?;
        push_points(&mut points, pre.into_iter().map(|v| (v, 0)), "preimage", true);
    }
    let prime = enumerate_series(&R, SeriesKind::SigmaInfPrime, cutoff, tol)?;
    push_points(&mut points, prime.members.iter().map(|a| (a.approx, a.m0)), SeriesKind::SigmaInfPrime.name(), true);
    let full = enumerate_series(&R, SeriesKind::SigmaInf, cutoff, tol)?;
    let extra: Vec<(f64, u32)> = full.members.iter().filter(|a| !prime.contains(a.approx, 1e-9)).map(|a| (a.approx, a.m0)).collect();
    push_points(&mut points, extra, SeriesKind::SigmaInf.name(), false);
    points.sort_by(|p, q| p.value.total_cmp(&q.value).then(q.lower.cmp(&p.lower)));
    points.dedup_by(|b, a| {
        let same = (a.value - b.value).abs() <= 1e-9 * a.value.abs().max(1.0);
        if same && b.lower && !a.lower {
            std::mem::swap(a, b);
        }
        same
    });
    Ok(SpectrumReport { bands, points, cutoff })
}

/// Preimages of the backward orbit of the repelling fixed point.
pub fn barlow_perkins_points(depth: usize, max_word_len: usize, tol: f64) -> Result<Vec<SpectrumPoint>> {
    let mut out = Vec::new();
    for w in julia_backward_orbit(&R, depth)? {
        let pre = preimage_point(&R, w, max_word_len, tol)?;
        push_points(&mut out, pre.into_iter().map(|v| (v, 0)), "singular_continuous_multiplicity_1", true);
    }
    out.sort_by(|p, q| p.value.total_cmp(&q.value));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClusterClass {
    Decimated { parent: f64, parent_multiplicity: usize },
    Exceptional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    pub class: ClusterClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub dimension: usize,
    pub clusters: Vec<Cluster>,
    pub decimated: usize,
    pub exceptional: usize,
    /// Exceptional eigenvalues at which the extension system is regular.
    pub unexplained: usize,
    pub exceptional_values: Vec<f64>,
    /// Decimated multiplicities equal their parents and every admissible preimage occurs.
    pub balanced: bool,
    pub classified_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationReport {
    pub base: String,
    pub levels: Vec<LevelCheck>,
}

impl DecimationReport {
    pub fn counts(&self) -> BTreeMap<usize, (usize, usize)> {
        self.levels.iter().map(|l| (l.level, (l.decimated, l.exceptional))).collect()
    }
}

/// Groups ascending values whose gaps are below `tol`.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((_, k, last)) if v - *last <= tol * v.abs().max(1.0) => {
                *k += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(first, k, last)| ((first + last) / 2.0, k)).collect()
}

const CLUSTER_TOL: f64 = 1e-7;

/// Classifies every eigenvalue of each refinement level against the level below.
pub fn decimation_spectrum_check(base: &CellGraph, levels: usize, tol: f64) -> Result<DecimationReport> {
    let mesh = FractafoldMesh::new(base.clone(), levels)?;
    let spectra = (0..=levels)
        .map(|m| Ok(cluster_values(&mesh_spectrum(mesh.graph(m))?.values, CLUSTER_TOL)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(levels);
    for m in 0..levels {
        let (parents, fine) = (&spectra[m], &spectra[m + 1]);
        let dimension = mesh.graph(m + 1).len();
        let mut clusters = Vec::with_capacity(fine.len());
        let mut balanced = true;
        for &(value, multiplicity) in fine {
            let image = R.apply(value);
            let parent = parents.iter().find(|p| (p.0 - image).abs() <= tol * image.abs().max(1.0));
            let class = match parent {
                Some(&(p, k)) if ExtensionSystem::new(value).is_ok() => {
                    balanced &= k == multiplicity;
                    ClusterClass::Decimated { parent: p, parent_multiplicity: k }
                }
                _ => ClusterClass::Exceptional,
            };
            clusters.push(Cluster { value, multiplicity, class });
        }
        for &(p, _) in parents {
            if let Ok((lo, hi)) = R.inverse_branches(p) {
                for child in [lo, hi] {
                    let present = clusters.iter().any(|c| (c.value - child).abs() <= tol * child.abs().max(1.0));
                    balanced &= is_forbidden(child) || ExtensionSystem::new(child).is_err() || present;
                }
            }
        }
        let sum = |exc: bool| clusters.iter().filter(|c| matches!(c.class, ClusterClass::Exceptional) == exc).map(|c| c.multiplicity).sum::<usize>();
        let (decimated, exceptional) = (sum(false), sum(true));
        let exceptional_values: Vec<f64> = clusters.iter().filter(|c| c.class == ClusterClass::Exceptional).map(|c| c.value).collect();
        let unexplained = clusters
            .iter()
            .filter(|c| c.class == ClusterClass::Exceptional && ExtensionSystem::new(c.value).is_ok())
            .map(|c| c.multiplicity)
            .sum::<usize>();
        balanced &= decimated + exceptional == dimension;
        out.push(LevelCheck {
            level: m + 1,
            dimension,
            clusters,
            decimated,
            exceptional,
            unexplained,
            exceptional_values,
            balanced,
            classified_fraction: (dimension - unexplained) as f64 / dimension as f64,
        });
    }
    Ok(DecimationReport { base: base.family.clone(), levels: out })
}

/// `max |sum of eigenprojections - I|` on the finest level of a mesh over a closed 4-regular base.
///
/// Decimated eigenvalues contribute `M_n Psi P0 Psi* mu`; the remaining ones
/// contribute their dense eigenprojections. With `use_product = false` the
/// factor `M_n` is replaced by 1.
pub fn resolution_defect(mesh: &FractafoldMesh, use_product: bool) -> Result<f64> {
    let base = mesh.base();
    if (0..base.len()).any(|v| base.degree(v) != 4) {
        return Err(Error::InvalidArgument("base must be 4-regular".into()));
    }
    let (n, nb, level) = (mesh.finest().len(), base.len(), mesh.level());
    let w0 = vertex_weights(base, 0)[0];
    let s0 = brute_spectrum(base, LaplacianKind::Graph)?;
    let mu = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(mesh.weights()));
    let mut total = DMatrix::<f64>::zeros(n, n);
    let mut decimated = Vec::new();
    let words = crate::decimation::canonical_words(level);
    let mut start = 0;
    for (value, k) in cluster_values(&s0.values, CLUSTER_TOL) {
        let v = s0.vectors.columns(start, k);
        start += k;
        let p0 = (v * v.transpose()) / w0;
        let mut seen: Vec<f64> = Vec::new();
        for w in &words {
            let a = EigenvalueAddress::new(0, value, w.clone());
            let Ok(levels) = admissible_levels(&a, level) else { continue };
            if seen.iter().any(|&s| (s - levels[level]).abs() < 1e-12) {
                continue;
            }
            seen.push(levels[level]);
            let cols = (0..nb).map(|u| psi_v_lambda(mesh, u, &a)).collect::<Result<Vec<_>>>()?;
            let psi = DMatrix::from_fn(n, nb, |x, u| cols[u][x]);
            let m = if use_product { m_partial(&a, level)? } else { 1.0 };
            total += m * &psi * &p0 * psi.transpose() * &mu;
        }
        decimated.extend(seen);
    }
    let s = brute_spectrum(mesh.finest(), LaplacianKind::Graph)?;
    for (i, &lam) in s.values.iter().enumerate() {
        if !decimated.iter().any(|&d| (d - lam).abs() < 1e-8) {
            let c = s.vectors.column(i);
            total += c * c.transpose();
        }
    }
    Ok((total - DMatrix::identity(n, n)).abs().max())
}
