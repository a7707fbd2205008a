//! Periodic examples: the ladder, the honeycomb (Bloch analysis and the
//! hexagon description of `E6`), and the triangular-lattice fractal field.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::decimation::{enumerate_addresses, preimage_band, Band, DecimationPolynomial};
use crate::error::{Error, Result};
use crate::graph::{brute_spectrum, build_graph, CellGraph, Family, LaplacianKind};
use crate::quad::gauss_legendre;

const TAU: f64 = 2.0 * PI;

/// Distance kept from the Dirac point and the band edges by the projector.
pub const DEGENERACY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trig {
    Cos,
    Sin,
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderEigen {
    pub lambda: f64,
    pub gamma: Vec<f64>,
    pub gamma0: Vec<f64>,
}

/// Ladder eigenfunction on `g` (a ladder) and its transfer to `g0 = edge_graph(g)`.
///
/// For the circular ladder `theta` must be a multiple of `2 pi / n`.
pub fn ladder_eigenfunction(g: &CellGraph, g0: &CellGraph, theta: f64, parity: Parity, trig: Trig) -> Result<LadderEigen> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, pi]")));
    }
    let pairs = g0.edge_pairs.as_deref().ok_or(Error::MismatchedPair)?;
    let n = g.params.first().copied().unwrap_or(g.len() / 2) as i64;
    let rail_sign = |v: usize| if g.labels[v][1] == 0 { 1.0 } else { -1.0 };
    let gamma = (0..g.len())
        .map(|v| {
            let c = trig.eval(g.labels[v][0] as f64 * theta);
            match parity {
                Parity::Even => c,
                Parity::Odd => rail_sign(v) * c,
            }
        })
        .collect();
    let half = (theta / 2.0).cos();
    let gamma0 = pairs
        .iter()
        .map(|&(p, q)| {
            let (lp, lq) = (g.labels[p], g.labels[q]);
            if lp[1] != lq[1] {
                // rung w_k
                return match parity {
                    Parity::Even => trig.eval(lp[0] as f64 * theta),
                    Parity::Odd => 0.0,
                };
            }
            let k = if (lp[0] - lq[0]).abs() == 1 { lp[0].min(lq[0]) } else { n - 1 };
            let v = trig.eval((k as f64 + 0.5) * theta);
            match parity {
                Parity::Even => v * half,
                Parity::Odd => rail_sign(p) * v,
            }
        })
        .collect();
    let lambda = match parity {
        Parity::Even => 2.0 - 2.0 * theta.cos(),
        Parity::Odd => 4.0 - 2.0 * theta.cos(),
    };
    Ok(LadderEigen { lambda, gamma, gamma0 })
}

/// Closed-form spectrum of the circular ladder on `n` rungs, ascending.
pub fn circular_ladder_spectrum(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .flat_map(|k| {
            let c = 2.0 * (TAU * k as f64 / n as f64).cos();
            [2.0 - c, 4.0 - c]
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalue counts of `edge_graph(circular_ladder(n))` in `[0, 2)` and `[2, 4]`.
pub fn ladder_edge_counts(n: usize) -> Result<(usize, usize)> {
    let g0 = crate::graph::edge_graph(&build_graph(Family::CircularLadder { n })?)?;
    let s = brute_spectrum(&g0, LaplacianKind::Graph)?;
    let low = s.values.iter().filter(|&&x| x < 2.0 - 1e-9).count();
    let mid = s.values.iter().filter(|&&x| (2.0 - 1e-9..=4.0 + 1e-9).contains(&x)).count();
    Ok((low, mid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochParameter {
    pub u: f64,
    pub v: f64,
}

impl BlochParameter {
    /// `1 + e^{2 pi i u} + e^{2 pi i v}`.
    pub fn symbol(&self) -> Complex64 {
        1.0 + Complex64::from_polar(1.0, TAU * self.u) + Complex64::from_polar(1.0, TAU * self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolValue {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub theta: f64,
    pub r: f64,
}

pub fn honeycomb_symbol(u: f64, v: f64) -> SymbolValue {
    let q = 3.0 + 2.0 * (TAU * u).cos() + 2.0 * (TAU * v).cos() + 2.0 * (TAU * (u - v)).cos();
    let r = q.max(0.0).sqrt();
    let theta = BlochParameter { u, v }.symbol().arg();
    SymbolValue { lambda_plus: 3.0 - r, lambda_minus: 3.0 + r, theta, r }
}

/// Floquet block of `-Lap` on amplitudes `(a, b)`.
pub fn floquet_block(u: f64, v: f64) -> Matrix2<Complex64> {
    let s = BlochParameter { u, v }.symbol();
    let three = Complex64::new(3.0, 0.0);
    Matrix2::new(three, -s.conj(), -s, three)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlochWave {
    pub lambda: f64,
    pub values: Vec<Complex64>,
    /// Set at the Dirac point, where `theta` is undefined and `gamma = 1` is used.
    pub degenerate: bool,
}

/// Bloch wave on a honeycomb graph; `plus` selects `gamma = e^{i theta}`.
pub fn honeycomb_bloch(g: &CellGraph, u: f64, v: f64, plus: bool) -> BlochWave {
    let sym = honeycomb_symbol(u, v);
    let degenerate = sym.r < 1e-12;
    let sign = if plus { 1.0 } else { -1.0 };
    let gamma = if degenerate { Complex64::new(sign, 0.0) } else { sign * Complex64::from_polar(1.0, sym.theta) };
    let values = g
        .labels
        .iter()
        .map(|l| {
            let phase = Complex64::from_polar(1.0, TAU * (l[0] as f64 * u + l[1] as f64 * v));
            if l[2] == 0 {
                phase
            } else {
                gamma * phase
            }
        })
        .collect();
    BlochWave { lambda: if plus { sym.lambda_plus } else { sym.lambda_minus }, values, degenerate }
}

fn r_and_grad(u: f64, v: f64) -> (f64, [f64; 2]) {
    let sym = honeycomb_symbol(u, v);
    let r = sym.r;
    let du = -4.0 * PI * ((TAU * u).sin() + (TAU * (u - v)).sin());
    let dv = -4.0 * PI * ((TAU * v).sin() - (TAU * (u - v)).sin());
    (r, [du / (2.0 * r), dv / (2.0 * r)])
}

/// Points and co-area weights `length / |grad r|` on the level set `r(u, v) = level`.
pub fn level_set(level: f64, resolution: usize) -> Vec<(f64, f64, f64)> {
    let m = resolution;
    let h = 1.0 / m as f64;
    let grid: Vec<f64> = (0..m * m).map(|idx| honeycomb_symbol((idx / m) as f64 * h, (idx % m) as f64 * h).r).collect();
    let val = |i: usize, j: usize| grid[(i % m) * m + (j % m)] - level;
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Vec<f64> = c.iter().map(|&(a, b)| val(a, b)).collect();
            let mut cross = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (vals[a] >= 0.0) != (vals[b] >= 0.0) {
                    let t = vals[a] / (vals[a] - vals[b]);
                    let (pa, pb) = (c[a], c[b]);
                    let pu = (pa.0 as f64 + t * (pb.0 as f64 - pa.0 as f64)) * h;
                    let pv = (pa.1 as f64 + t * (pb.1 as f64 - pa.1 as f64)) * h;
                    cross.push((pu, pv));
                }
            }
            let segs: Vec<((f64, f64), (f64, f64))> = match cross.len() {
                2 => vec![(cross[0], cross[1])],
                4 => {
                    let center = vals.iter().sum::<f64>() / 4.0;
                    if (center >= 0.0) == (vals[0] >= 0.0) {
                        vec![(cross[0], cross[1]), (cross[2], cross[3])]
                    } else {
                        vec![(cross[3], cross[0]), (cross[1], cross[2])]
                    }
                }
                _ => vec![],
            };
            for (p, q) in segs {
                let len = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
                let (mut u, mut v) = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
                let mut grad = [0.0; 2];
                for _ in 0..4 {
                    let (r, gr) = r_and_grad(u, v);
                    let n2 = gr[0] * gr[0] + gr[1] * gr[1];
                    let step = (r - level) / n2;
                    u -= step * gr[0];
                    v -= step * gr[1];
                    grad = gr;
                }
                let gnorm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
                out.push((u, v, len / gnorm));
            }
        }
    }
    out
}

fn check_projector_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=6.0).contains(&lambda) {
        return Err(Error::OutOfBand(lambda));
    }
    if [0.0, 3.0, 6.0].iter().any(|e| (lambda - e).abs() < DEGENERACY_MARGIN) {
        return Err(Error::Degenerate(lambda));
    }
    Ok(())
}

/// `P_lambda f` on the vertices of a honeycomb graph for finitely supported `f`.
///
/// At `lambda = 2` and `lambda = 4` the level set runs through saddle points of
/// the symbol and the density of states diverges logarithmically; the output
/// there grows with `resolution`.
pub fn honeycomb_projector(g: &CellGraph, lambda: f64, f: &[(usize, f64)], resolution: usize) -> Result<Vec<Complex64>> {
    check_projector_lambda(lambda)?;
    let sign = if lambda < 3.0 { 1.0 } else { -1.0 };
    let pts = level_set((3.0 - lambda).abs(), resolution);
    if pts.is_empty() {
        return Err(Error::Degenerate(lambda));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for (u, v, w) in pts {
        let phase = |l: &[i64; 3]| Complex64::from_polar(1.0, TAU * (l[0] as f64 * u + l[1] as f64 * v));
        let (mut fa, mut fb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &(x, c) in f {
            let l = &g.labels[x];
            if l[2] == 0 {
                fa += c * phase(l).conj();
            } else {
                fb += c * phase(l).conj();
            }
        }
        let e = BlochParameter { u, v }.symbol();
        let e = e / e.norm();
        let coeff = 0.5 * (fa + sign * e.conj() * fb) * w;
        for (x, l) in g.labels.iter().enumerate() {
            let base = phase(l) * coeff;
            out[x] += if l[2] == 0 { base } else { sign * e * base };
        }
    }
    Ok(out)
}

/// Midpoint rule for `int_0^6 P_lambda f d lambda` with `levels` nodes.
pub fn honeycomb_reconstruct(g: &CellGraph, f: &[(usize, f64)], levels: usize, resolution: usize) -> Result<Vec<Complex64>> {
    let h = 6.0 / levels as f64;
    let parts: Vec<Vec<Complex64>> = (0..levels)
        .into_par_iter()
        .map(|i| honeycomb_projector(g, (i as f64 + 0.5) * h, f, resolution))
        .collect::<Result<_>>()?;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x * h;
        }
    }
    Ok(out)
}

/// Edge of the honeycomb as `(J, K, kind)`: kind 0 is `a(J,K)b(J,K)`,
/// kind 1 is `a(J,K)b(J-1,K)`, kind 2 is `a(J,K)b(J,K-1)`.
pub type EdgeKey = (i64, i64, u8);

/// Hexagon `[j, k]`: the honeycomb face with corners `a(j+1,k)`, `a(j,k+1)`, `a(j+1,k+1)`.
pub type Hexagon = (i64, i64);

/// The six vertices of a hexagon in counterclockwise order with the signs of `psi_H`.
pub fn hexagon_edges(h: Hexagon) -> [(EdgeKey, f64); 6] {
    let (j, k) = h;
    [
        ((j + 1, k, 0), 1.0),
        ((j + 1, k + 1, 2), -1.0),
        ((j + 1, k + 1, 1), 1.0),
        ((j, k + 1, 0), -1.0),
        ((j, k + 1, 2), 1.0),
        ((j + 1, k, 1), -1.0),
    ]
}

/// The two hexagons through an edge, `(positive, negative)`.
pub fn hexagons_of(e: EdgeKey) -> (Hexagon, Hexagon) {
    let (j, k, kind) = e;
    match kind {
        0 => ((j - 1, k), (j, k - 1)),
        1 => ((j - 1, k - 1), (j - 1, k)),
        _ => ((j, k - 1), (j - 1, k - 1)),
    }
}

/// A honeycomb patch together with its edge graph and hexagon bookkeeping.
#[derive(Debug, Clone)]
pub struct HexPatch {
    pub gamma: CellGraph,
    pub gamma0: CellGraph,
    keys: Vec<EdgeKey>,
    index: HashMap<EdgeKey, usize>,
}

impl HexPatch {
    pub fn new(radius: usize) -> Result<Self> {
        let gamma = build_graph(Family::HoneycombPatch { radius })?;
        let gamma0 = crate::graph::edge_graph(&gamma)?;
        let keys: Vec<EdgeKey> = gamma0
            .edge_pairs
            .as_ref()
            .expect("edge graph")
            .iter()
            .map(|&(p, q)| {
                let (a, b) = if gamma.labels[p][2] == 0 { (gamma.labels[p], gamma.labels[q]) } else { (gamma.labels[q], gamma.labels[p]) };
                let kind = match (a[0] - b[0], a[1] - b[1]) {
                    (0, 0) => 0,
                    (1, 0) => 1,
                    _ => 2,
                };
                (a[0], a[1], kind)
            })
            .collect();
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Ok(Self { gamma, gamma0, keys, index })
    }

    pub fn key(&self, x: usize) -> EdgeKey {
        self.keys[x]
    }

    pub fn vertex(&self, e: EdgeKey) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn contains_hexagon(&self, h: Hexagon) -> bool {
        hexagon_edges(h).iter().all(|(e, _)| self.index.contains_key(e))
    }

    /// Hexagons whose six vertices lie in the patch and are interior.
    pub fn hexagons(&self) -> Vec<Hexagon> {
        let mut out: Vec<Hexagon> = self.keys.iter().flat_map(|&e| {
            let (p, q) = hexagons_of(e);
            [p, q]
        }).collect();
        out.sort_unstable();
        out.dedup();
        out.retain(|&h| hexagon_edges(h).iter().all(|(e, _)| self.vertex(*e).is_some_and(|x| !self.gamma0.boundary[x])));
        out
    }

    pub fn psi_h(&self, h: Hexagon) -> Result<Vec<f64>> {
        self.compose(&BTreeMap::from([(h, 1.0)]))
    }

    /// `sum_H c_H psi_H` on the patch.
    pub fn compose(&self, coeffs: &BTreeMap<Hexagon, f64>) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.gamma0.len()];
        for (&h, &c) in coeffs {
            for (e, s) in hexagon_edges(h) {
                let x = self.vertex(e).ok_or_else(|| Error::InvalidArgument(format!("hexagon {h:?} leaves the patch")))?;
                out[x] += s * c;
            }
        }
        Ok(out)
    }

    /// Largest `|u(x1) + u(x2) + u(x3)|` over triangles, with its cell index.
    pub fn triangle_defect(&self, u: &[f64]) -> (f64, usize) {
        self.gamma0
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| ((u[c[0]] + u[c[1]] + u[c[2]]).abs(), i))
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Coefficients of a compactly supported `E6` element, in peeling order:
    /// rows from the top, each row from right to left.
    pub fn decompose(&self, u: &[f64]) -> Result<Vec<(Hexagon, f64)>> {
        let scale = u.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let (defect, cell) = self.triangle_defect(u);
        if defect > 1e-12 * scale {
            return Err(Error::NotInE6(defect, cell));
        }
        let touched: Vec<Hexagon> = (0..u.len())
            .filter(|&x| u[x] != 0.0)
            .flat_map(|x| {
                let (p, q) = hexagons_of(self.keys[x]);
                [p, q]
            })
            .collect();
        if touched.is_empty() {
            return Ok(vec![]);
        }
        let jmin = touched.iter().map(|h| h.0).min().unwrap();
        let jmax = touched.iter().map(|h| h.0).max().unwrap();
        let kmin = touched.iter().map(|h| h.1).min().unwrap();
        let kmax = touched.iter().map(|h| h.1).max().unwrap();
        let value = |e: EdgeKey| self.vertex(e).map_or(0.0, |x| u[x]);
        let mut f: HashMap<Hexagon, f64> = HashMap::new();
        let mut order = Vec::new();
        for k in (kmin..=kmax).rev() {
            for j in (jmin..=jmax).rev() {
                // the vertex shared with the hexagon above is (j+1, k+1, 1)
                let above = f.get(&(j, k + 1)).copied().unwrap_or(0.0);
                let c = value((j + 1, k + 1, 1)) + above;
                f.insert((j, k), c);
                if c != 0.0 {
                    order.push(((j, k), c));
                }
            }
        }
        let coeffs: BTreeMap<Hexagon, f64> = order.iter().copied().collect();
        let back = self.compose(&coeffs)?;
        let (worst, at) = back.iter().zip(u).enumerate().map(|(i, (a, b))| ((a - b).abs(), i)).fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
        if worst > 1e-12 * scale {
            return Err(Error::NotInE6(worst, at));
        }
        Ok(order)
    }
}

/// `2 (3 - cos 2 pi a - cos 2 pi b - cos 2 pi (a - b))`.
pub fn hex_weight(a: f64, b: f64) -> f64 {
    2.0 * (3.0 - (TAU * a).cos() - (TAU * b).cos() - (TAU * (a - b)).cos())
}

/// Positive Fourier profile of the orthonormal generator.
pub fn hex_fhat(a: f64, b: f64) -> f64 {
    1.0 / hex_weight(a, b).sqrt()
}

/// Coefficient `f([j, k]) = int int e^{2 pi i (a j + b k)} fhat(a, b) da db` by
/// polar panels around the singular point; returns the value and the change
/// from the half-resolution rule.
pub fn hex_basis_coeff(j: i64, k: i64, resolution: usize) -> Result<(f64, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let rule = |res: usize| -> Result<f64> {
        let nodes = gauss_legendre(16);
        let radial = res;
        let angular = res.div_ceil(2).max(2);
        let mut total = 0.0;
        for sector in 0..8 {
            let (p0, p1) = (sector as f64 * PI / 4.0, (sector + 1) as f64 * PI / 4.0);
            let dp = (p1 - p0) / angular as f64;
            for ia in 0..angular {
                for &(xa, wa) in &nodes {
                    let phi = p0 + dp * (ia as f64 + (xa + 1.0) / 2.0);
                    let (s, c) = phi.sin_cos();
                    let rmax = 0.5 / c.abs().max(s.abs());
                    let dr = rmax / radial as f64;
                    let mut inner = 0.0;
                    for ir in 0..radial {
                        for &(xr, wr) in &nodes {
                            let r = dr * (ir as f64 + (xr + 1.0) / 2.0);
                            let (a, b) = (r * c, r * s);
                            inner += wr * r * (TAU * (a * j as f64 + b * k as f64)).cos() * hex_fhat(a, b);
                        }
                    }
                    total += wa * inner * dr / 2.0 * dp / 2.0;
                }
            }
        }
        Ok(total)
    };
    let fine = rule(resolution)?;
    let coarse = rule(resolution / 2)?;
    let change = (fine - coarse).abs();
    if change > 1e-6 * fine.abs().max(1e-3) {
        return Err(Error::NonConvergence { iterations: resolution, last_step: change });
    }
    Ok((fine, change))
}

/// The three neighbor directions of the hexagon lattice.
pub const HEX_DIRECTIONS: [(i64, i64); 3] = [(1, 0), (0, 1), (1, -1)];

/// Difference sequences `f(h) - f(h + e)` of the orthonormal generator,
/// tabulated on a periodic `m x m` grid by FFT of the midpoint rule.
#[derive(Debug, Clone)]
pub struct HexTranslates {
    m: usize,
    diffs: [Vec<f64>; 3],
}

impl HexTranslates {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(m);
        let x: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let diffs = HEX_DIRECTIONS.map(|(e1, e2)| {
            let mut grid: Vec<Complex64> = (0..m * m)
                .map(|idx| {
                    let (a, b) = (x[idx / m], x[idx % m]);
                    (1.0 - Complex64::from_polar(1.0, TAU * (a * e1 as f64 + b * e2 as f64))) * hex_fhat(a, b)
                })
                .collect();
            for row in grid.chunks_mut(m) {
                fft.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for c in 0..m {
                for r in 0..m {
                    col[r] = grid[r * m + c];
                }
                fft.process(&mut col);
                for r in 0..m {
                    grid[r * m + c] = col[r];
                }
            }
            let norm = (m * m) as f64;
            (0..m * m)
                .map(|idx| {
                    let (h1, h2) = (signed(idx / m, m), signed(idx % m, m));
                    (grid[idx] * Complex64::from_polar(1.0, PI * (h1 + h2) as f64 / m as f64)).re / norm
                })
                .collect()
        });
        Self { m, diffs }
    }

    fn at(&self, e: usize, h1: i64, h2: i64) -> f64 {
        let m = self.m as i64;
        self.diffs[e][(h1.rem_euclid(m) * m + h2.rem_euclid(m)) as usize]
    }

    /// `<F, tau_{p,q} F>` summed over hexagon pairs with `|h|_inf <= radius`.
    pub fn inner(&self, p: i64, q: i64, radius: i64) -> f64 {
        let mut s = 0.0;
        for e in 0..3 {
            for h1 in -radius..=radius {
                for h2 in -radius..=radius {
                    s += self.at(e, h1, h2) * self.at(e, h1 + p, h2 + q);
                }
            }
        }
        s
    }
}

fn signed(i: usize, m: usize) -> i64 {
    if i < m.div_ceil(2) {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

/// `<F, G>` for `F = sum f psi_H`, `G = sum g psi_H` by neighbor differences.
pub fn hex_inner_lattice(f: &BTreeMap<Hexagon, f64>, g: &BTreeMap<Hexagon, f64>) -> f64 {
    let get = |m: &BTreeMap<Hexagon, f64>, h: Hexagon| m.get(&h).copied().unwrap_or(0.0);
    let mut hs: Vec<Hexagon> = f.keys().chain(g.keys()).flat_map(|&(j, k)| {
        std::iter::once((j, k)).chain(HEX_DIRECTIONS.iter().map(move |&(a, b)| (j - a, k - b)))
    }).collect();
    hs.sort_unstable();
    hs.dedup();
    let mut s = 0.0;
    for h in hs {
        for (a, b) in HEX_DIRECTIONS {
            let n = (h.0 + a, h.1 + b);
            s += (get(f, h) - get(f, n)) * (get(g, h) - get(g, n));
        }
    }
    s
}

/// `<F, G>` through the Fourier weight, by the rectangle rule on an `m x m` grid.
pub fn hex_inner_fourier(f: &BTreeMap<Hexagon, f64>, g: &BTreeMap<Hexagon, f64>, m: usize) -> f64 {
    let hat = |c: &BTreeMap<Hexagon, f64>, a: f64, b: f64| -> Complex64 {
        c.iter().map(|(&(j, k), &v)| v * Complex64::from_polar(1.0, -TAU * (a * j as f64 + b * k as f64))).sum()
    };
    let h = 1.0 / m as f64;
    let terms: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = ((idx / m) as f64 * h, (idx % m) as f64 * h);
            (hex_weight(a, b) * hat(f, a, b) * hat(g, a, b).conj()).re
        })
        .collect();
    terms.iter().sum::<f64>() * h * h
}

/// Probabilistic symbol of the triangular lattice, `1 - (cos 2 pi u + cos 2 pi v + cos 2 pi (u - v)) / 3`.
pub fn triangular_symbol(u: f64, v: f64) -> f64 {
    1.0 - ((TAU * u).cos() + (TAU * v).cos() + (TAU * (u - v)).cos()) / 3.0
}

/// Range of [`triangular_symbol`] by grid search followed by compass refinement.
pub fn triangular_symbol_band(grid: usize) -> (f64, f64) {
    let h = 1.0 / grid as f64;
    let pts: Vec<(f64, f64)> = (0..grid * grid).map(|i| ((i / grid) as f64 * h, (i % grid) as f64 * h)).collect();
    let refine = |sign: f64| {
        let start = pts.iter().copied().max_by(|a, b| (sign * triangular_symbol(a.0, a.1)).total_cmp(&(sign * triangular_symbol(b.0, b.1)))).unwrap();
        let (mut u, mut v) = start;
        let mut step = h;
        while step > 1e-12 {
            let best = [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)]
                .iter()
                .map(|&(du, dv)| (u + du, v + dv))
                .max_by(|a, b| (sign * triangular_symbol(a.0, a.1)).total_cmp(&(sign * triangular_symbol(b.0, b.1))))
                .unwrap();
            if sign * triangular_symbol(best.0, best.1) > sign * triangular_symbol(u, v) {
                (u, v) = best;
            } else {
                step /= 2.0;
            }
        }
        triangular_symbol(u, v)
    };
    (refine(-1.0), refine(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusBand {
    pub m: usize,
    pub n: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Extreme probabilistic eigenvalues of `tri_torus(m, n)`.
pub fn tri_torus_band(m: usize, n: usize) -> Result<TorusBand> {
    let g = build_graph(Family::TriTorus { m, n })?;
    let s = brute_spectrum(&g, LaplacianKind::Probabilistic)?;
    Ok(TorusBand { m, n, min_eigenvalue: s.values[0], max_eigenvalue: *s.values.last().unwrap() })
}

/// Spectral description of the triangular-lattice fractal field.
#[derive(Debug, Clone, Serialize)]
pub struct TriangularReport {
    /// Four times the probabilistic symbol range.
    pub sigma0_symbol: [f64; 2],
    /// Four times the extreme torus eigenvalues.
    pub sigma0_tori: Vec<TorusBand>,
    pub sigma0_stated: [f64; 2],
    /// `frak_r^{-1}` of `sigma0_symbol`.
    pub ac_bands: Vec<Band>,
    /// `5 frak_r^{-1}{3}`.
    pub isolated_series: Vec<f64>,
    /// `5 frak_r^{-1}{5}`.
    pub gap_edge_series: Vec<f64>,
}

pub fn triangular_field_bands(max_word_len: usize, torus_sizes: &[usize]) -> Result<TriangularReport> {
    let (lo, hi) = triangular_symbol_band(300);
    let sigma0 = [4.0 * lo, 4.0 * hi];
    let tori = torus_sizes
        .iter()
        .map(|&m| {
            tri_torus_band(m, m).map(|mut b| {
                b.min_eigenvalue *= 4.0;
                b.max_eigenvalue *= 4.0;
                b
            })
        })
        .collect::<Result<_>>()?;
    let poly = DecimationPolynomial::GASKET;
    let series = |seed: f64| -> Result<Vec<f64>> { Ok(enumerate_addresses(&poly, &[(1, seed)], max_word_len, 1e-14)?.into_iter().map(|a| a.approx).collect()) };
    Ok(TriangularReport {
        sigma0_symbol: sigma0,
        sigma0_tori: tori,
        sigma0_stated: [0.0, 16.0 / 3.0],
        ac_bands: preimage_band(&poly, sigma0[0].max(0.0), sigma0[1], max_word_len, 1e-14)?,
        isolated_series: series(3.0)?,
        gap_edge_series: series(5.0)?,
    })
}
