//! Closed forms on the 3-regular tree and its edge graph: the radial kernels,
//! the spectral measure, resolvents, the `E6` frame and the mean inner product.
//!
//! The spectral parameter is `t` in `[0, pi / ln 2]` with
//! `lambda = 3 - 2 sqrt(2) cos(t ln 2)`. With `a = t ln 2` the measure is
//! `dm(t) = (12 ln 2 / pi) sin^2 a / (1 + 8 sin^2 a) dt`, which integrates to 1
//! and makes `P_lambda(x, y) = phi(d(x, y))` a resolution of the identity.

use std::f64::consts::{LN_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, edge_graph, CellGraph, Family};
use crate::quad;

pub const BAND_LO: f64 = 3.0 - 2.0 * SQRT_2;
pub const BAND_HI: f64 = 3.0 + 2.0 * SQRT_2;
pub const T_MAX: f64 = PI / LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Gamma,
    Gamma0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeParameter {
    pub t: f64,
}

impl TreeParameter {
    pub fn from_t(t: f64) -> Result<Self> {
        if !(0.0..=T_MAX).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, pi/ln2]")));
        }
        Ok(Self { t })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(BAND_LO..=BAND_HI).contains(&lambda) {
            return Err(Error::OutOfBand(lambda));
        }
        let c = ((3.0 - lambda) / (2.0 * SQRT_2)).clamp(-1.0, 1.0);
        Ok(Self { t: c.acos() / LN_2 })
    }

    /// `t ln 2`.
    pub fn angle(&self) -> f64 {
        self.t * LN_2
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(0.5, self.t)
    }

    pub fn lambda(&self) -> f64 {
        3.0 - 2.0 * SQRT_2 * self.angle().cos()
    }

    fn interior(&self) -> Result<()> {
        let s = self.angle().sin();
        if s.abs() < 1e-12 {
            return Err(Error::OutOfBand(self.lambda()));
        }
        Ok(())
    }
}

fn pow2(z: Complex64) -> Complex64 {
    (z * LN_2).exp()
}

pub fn c_coeff(z: Complex64) -> Result<Complex64> {
    let den = pow2(-z) - pow2(z - 1.0);
    if den.norm() < 1e-14 {
        return Err(Error::Pole(z.re));
    }
    Ok((pow2(1.0 - z) - pow2(z - 1.0)) / den / 3.0)
}

/// `c(z) 2^{-nz} + c(1-z) 2^{-n(1-z)}`.
pub fn phi_complex(z: Complex64, n: i64) -> Result<Complex64> {
    let nf = n as f64;
    Ok(c_coeff(z)? * pow2(-z * nf) + c_coeff(1.0 - z)? * pow2(-(1.0 - z) * nf))
}

/// `sin(n a) / sin(a)` with the limit at `sin a = 0`.
fn sin_ratio(n: i64, a: f64) -> f64 {
    let s = a.sin();
    let na = n as f64 * a;
    if s.abs() > 1e-7 {
        na.sin() / s
    } else {
        n as f64 * na.cos() / a.cos()
    }
}

/// `2^{n/2} phi(n)`, the bounded oscillating part `(1/3)(3 cos(n a) + sin(n a)/tan a)`.
pub fn phi_scaled(p: &TreeParameter, n: i64) -> f64 {
    let a = p.angle();
    (3.0 * (n as f64 * a).cos() + a.cos() * sin_ratio(n, a)) / 3.0
}

pub fn phi(p: &TreeParameter, n: i64) -> f64 {
    phi_scaled(p, n) * 2f64.powf(-(n as f64) / 2.0)
}

pub fn psi(p: &TreeParameter, n: i64) -> f64 {
    2.0 * phi(p, n) + phi(p, n + 1) + phi(p, n - 1)
}

/// Frame profile `(1/sqrt 3)(-1/2)^n`.
pub fn f6(n: i64) -> f64 {
    (-0.5f64).powi(n as i32) / 3f64.sqrt()
}

/// `E6` projection kernel `(1/3)(-1/2)^n`.
pub fn p6_kernel(n: i64) -> f64 {
    (-0.5f64).powi(n as i32) / 3.0
}

/// Radial projection kernel at distance `d`.
pub fn kernel_radial(level: Level, p: &TreeParameter, d: usize) -> Result<f64> {
    let lam = p.lambda();
    if !(BAND_LO..=BAND_HI).contains(&lam) {
        return Err(Error::OutOfBand(lam));
    }
    Ok(match level {
        Level::Gamma => phi(p, d as i64),
        Level::Gamma0 => psi(p, d as i64) / (3.0 * (6.0 - lam)),
    })
}

/// `2^{d/2}` times [`kernel_radial`].
pub fn kernel_scaled(level: Level, p: &TreeParameter, d: usize) -> Result<f64> {
    let lam = p.lambda();
    if !(BAND_LO..=BAND_HI).contains(&lam) {
        return Err(Error::OutOfBand(lam));
    }
    let n = d as i64;
    Ok(match level {
        Level::Gamma => phi_scaled(p, n),
        Level::Gamma0 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            (2.0 * phi_scaled(p, n) + h * phi_scaled(p, n + 1) + SQRT_2 * phi_scaled(p, n - 1)) / (3.0 * (6.0 - lam))
        }
    })
}

pub fn kernel_eval(level: Level, lambda: f64, d: usize) -> Result<f64> {
    if !(lambda > BAND_LO && lambda < BAND_HI) {
        return Err(Error::OutOfBand(lambda));
    }
    kernel_radial(level, &TreeParameter::from_lambda(lambda)?, d)
}

/// Density of `dm` in `t`.
pub fn density_t(t: f64) -> f64 {
    let s2 = (t * LN_2).sin().powi(2);
    12.0 * LN_2 / PI * s2 / (1.0 + 8.0 * s2)
}

/// Density of `dm` in `lambda`: `3 sqrt(-l^2+6l-1) / (2 pi (6l - l^2))`.
pub fn density_lambda(lambda: f64) -> f64 {
    let q = -lambda * lambda + 6.0 * lambda - 1.0;
    if q <= 0.0 {
        return 0.0;
    }
    3.0 * q.sqrt() / (2.0 * PI * (6.0 * lambda - lambda * lambda))
}

/// `d lambda / d t`.
pub fn jacobian(t: f64) -> f64 {
    2.0 * SQRT_2 * LN_2 * (t * LN_2).sin()
}

pub fn b_lambda(p: &TreeParameter) -> Result<f64> {
    p.interior()?;
    Ok(8.0 + 1.0 / p.angle().sin().powi(2))
}

pub fn b_lambda_algebraic(lambda: f64) -> Result<f64> {
    let q = -lambda * lambda + 6.0 * lambda;
    if q - 1.0 <= 0.0 {
        return Err(Error::OutOfBand(lambda));
    }
    Ok(8.0 * q / (q - 1.0))
}

/// Integrates `g(t) dm(t)` over the band.
pub fn integrate_dm(g: impl Fn(&TreeParameter) -> f64, tol: f64) -> Result<quad::QuadResult> {
    let breaks: Vec<f64> = (0..=8).map(|i| T_MAX * i as f64 / 8.0).collect();
    quad::integrate(|t| g(&TreeParameter { t }) * density_t(t), &breaks, tol)
}

/// Total mass of `dm(lambda) d lambda`, with endpoint subdivision for the square-root edges.
pub fn measure_mass_lambda(tol: f64) -> Result<quad::QuadResult> {
    let mid = 3.0;
    let breaks = [BAND_LO, BAND_LO + 1e-6, BAND_LO + 1e-3, 1.0, mid, 5.0, BAND_HI - 1e-3, BAND_HI - 1e-6, BAND_HI];
    quad::integrate(density_lambda, &breaks, tol)
}

/// `int P_lambda(x, y) dm` as a function of `d(x, y)`, for `d = 0..=max_d`.
pub fn resolution_moments(level: Level, max_d: usize, tol: f64) -> Result<Vec<f64>> {
    (0..=max_d)
        .map(|d| {
            integrate_dm(
                |p| match level {
                    Level::Gamma => phi(p, d as i64),
                    Level::Gamma0 => psi(p, d as i64) / (6.0 - p.lambda()),
                },
                tol,
            )
            .map(|r| r.value)
        })
        .collect()
}

/// `int P_lambda f dm` on the vertices of `g` for finitely supported `f`.
pub fn resolve_identity(level: Level, g: &CellGraph, f: &[(usize, f64)], tol: f64) -> Result<Vec<f64>> {
    let dists: Vec<Vec<usize>> = f.iter().map(|&(y, _)| g.distances_from(y)).collect();
    let max_d = dists.iter().flatten().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let mom = resolution_moments(level, max_d, tol)?;
    Ok((0..g.len()).map(|x| f.iter().zip(&dists).map(|(&(_, a), d)| a * mom[d[x]]).sum()).collect())
}

/// `P_6 F` on the vertices of an edge-graph ball.
pub fn project_e6(g0: &CellGraph, f: &[(usize, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; g0.len()];
    for &(y, a) in f {
        for (x, d) in g0.distances_from(y).into_iter().enumerate() {
            out[x] += a * p6_kernel(d as i64);
        }
    }
    out
}

/// `lambda = 3 - 2^z - 2 * 2^{-z}`.
pub fn resolvent_lambda(z: Complex64) -> Complex64 {
    3.0 - pow2(z) - 2.0 * pow2(-z)
}

/// Normalizing scalar of the resolvent kernel `2^{-z d}`.
pub fn resolvent_scalar(level: Level, z: Complex64) -> Result<Complex64> {
    if z.re <= 0.5 {
        return Err(Error::InvalidArgument(format!("resolvent needs Re z > 1/2, got {}", z.re)));
    }
    let s = match level {
        Level::Gamma => pow2(-z) - pow2(z),
        Level::Gamma0 => 2.0 * pow2(-z) - pow2(z) - 1.0,
    };
    if s.norm() < 1e-14 {
        return Err(Error::Pole(z.re));
    }
    Ok(s)
}

/// `u` with `(lambda I + Lap) u = f`, evaluated on the vertices of `g`.
pub fn resolvent_apply(level: Level, g: &CellGraph, z: Complex64, f: &[(usize, f64)]) -> Result<Vec<Complex64>> {
    let s = resolvent_scalar(level, z)?;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for &(y, a) in f {
        for (x, d) in g.distances_from(y).into_iter().enumerate() {
            out[x] += a * pow2(-z * d as f64) / s;
        }
    }
    Ok(out)
}

/// One weighted point class of the infinite tree (or its edge graph)
/// relative to a finite set of reference points.
#[derive(Debug, Clone)]
struct Class {
    dists: Vec<usize>,
    /// Branches hanging off a spanning-subtree vertex; 0 marks a single point.
    branches: usize,
}

/// Counts points of the infinite 3-regular tree (or of its edge graph) by
/// their distances to a fixed finite set of reference points.
#[derive(Debug, Clone)]
pub struct TreeCounter {
    level: Level,
    classes: Vec<Class>,
    ref_dist: Vec<Vec<usize>>,
}

impl TreeCounter {
    /// `tree` is any finite subtree of the 3-regular tree containing the
    /// references: vertices (level `Gamma`, second entry ignored) or edges (level `Gamma0`).
    pub fn new(tree: &CellGraph, level: Level, refs: &[(usize, usize)]) -> Result<Self> {
        let adj: Vec<Vec<usize>> = (0..tree.len()).map(|v| tree.neighbors(v).to_vec()).collect();
        if level == Level::Gamma0 && refs.iter().any(|&(a, b)| !tree.has_edge(a, b)) {
            return Err(Error::InvalidArgument("reference is not an edge".into()));
        }
        Self::from_adjacency(&adj, level, refs)
    }

    /// Two references at distance `k` on a path.
    pub fn pair(level: Level, k: usize) -> Result<Self> {
        let n = k + 2;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| [i.checked_sub(1), (i + 1 < n).then_some(i + 1)].into_iter().flatten().collect()).collect();
        let refs = match level {
            Level::Gamma => [(0, 0), (k, k)],
            Level::Gamma0 => [(0, 1), (k, k + 1)],
        };
        Self::from_adjacency(&adj, level, &refs)
    }

    fn from_adjacency(adj: &[Vec<usize>], level: Level, refs: &[(usize, usize)]) -> Result<Self> {
        if refs.is_empty() {
            return Err(Error::InvalidArgument("need at least one reference point".into()));
        }
        if adj.iter().any(|nb| nb.len() > 3) {
            return Err(Error::InvalidArgument("degree above 3".into()));
        }
        let bfs = |src: usize| {
            let mut d = vec![usize::MAX; adj.len()];
            d[src] = 0;
            let mut q = std::collections::VecDeque::from([src]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v] {
                    if d[w] == usize::MAX {
                        d[w] = d[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        };
        let ends: Vec<usize> = match level {
            Level::Gamma => refs.iter().map(|r| r.0).collect(),
            Level::Gamma0 => refs.iter().flat_map(|r| [r.0, r.1]).collect(),
        };
        let vd: Vec<Vec<usize>> = ends.iter().map(|&e| bfs(e)).collect();
        // spanning subtree: union of geodesics to the first endpoint
        let root_d = &vd[0];
        let mut in_sub = vec![false; adj.len()];
        in_sub[ends[0]] = true;
        for &e in &ends {
            if root_d[e] == usize::MAX {
                return Err(Error::InvalidArgument("references are not connected".into()));
            }
            let mut v = e;
            while !in_sub[v] {
                in_sub[v] = true;
                v = *adj[v].iter().find(|&&w| root_d[w] + 1 == root_d[v]).expect("geodesic step");
            }
        }
        let line = |i: usize, a: usize, b: usize| -> usize {
            let (c, d) = refs[i];
            if (a.min(b), a.max(b)) == (c.min(d), c.max(d)) {
                0
            } else {
                1 + [vd[2 * i][a], vd[2 * i][b], vd[2 * i + 1][a], vd[2 * i + 1][b]].into_iter().min().unwrap()
            }
        };
        let mut classes = Vec::new();
        for v in (0..adj.len()).filter(|&v| in_sub[v]) {
            let deg_sub = adj[v].iter().filter(|&&w| in_sub[w]).count();
            let to_refs: Vec<usize> = match level {
                Level::Gamma => vd.iter().map(|d| d[v]).collect(),
                Level::Gamma0 => (0..refs.len()).map(|i| vd[2 * i][v].min(vd[2 * i + 1][v])).collect(),
            };
            match level {
                Level::Gamma => classes.push(Class { dists: to_refs.clone(), branches: 0 }),
                Level::Gamma0 => {
                    for &w in adj[v].iter().filter(|&&w| v < w && in_sub[w]) {
                        classes.push(Class { dists: (0..refs.len()).map(|i| line(i, v, w)).collect(), branches: 0 });
                    }
                }
            }
            if deg_sub < 3 {
                classes.push(Class { dists: to_refs, branches: 3 - deg_sub });
            }
        }
        let ref_dist = (0..refs.len())
            .map(|i| {
                (0..refs.len())
                    .map(|j| match level {
                        Level::Gamma => vd[i][refs[j].0],
                        Level::Gamma0 => line(i, refs[j].0, refs[j].1),
                    })
                    .collect()
            })
            .collect();
        Ok(Self { level, classes, ref_dist })
    }

    /// Distances between the reference points.
    pub fn ref_distances(&self) -> &[Vec<usize>] {
        &self.ref_dist
    }

    /// Calls `visit(dists, count)` for every point with distance at most
    /// `radius` from reference `base`, grouped by distance vector.
    pub fn for_each(&self, base: usize, radius: usize, mut visit: impl FnMut(&[usize], f64)) {
        let mut buf = Vec::new();
        // hanging points at depth s sit s (tree) or s + 1 (edge graph) beyond their root
        let (first, offset) = match self.level {
            Level::Gamma => (1usize, 0usize),
            Level::Gamma0 => (0, 1),
        };
        for c in &self.classes {
            if c.branches == 0 {
                if c.dists[base] <= radius {
                    visit(&c.dists, 1.0);
                }
                continue;
            }
            let mut s = first;
            while c.dists[base] + s + offset <= radius {
                let count = c.branches as f64 * 2f64.powi(s as i32 + offset as i32 - 1);
                buf.clear();
                buf.extend(c.dists.iter().map(|d| d + s + offset));
                visit(&buf, count);
                s += 1;
            }
        }
    }

    /// `sum_x 2^{-d(x, base)} w(dists(x))` over the ball of radius `radius`.
    /// Stays finite for radii where the plain counts overflow.
    pub fn sum_normalized(&self, base: usize, radius: usize, w: impl Fn(&[usize]) -> f64) -> f64 {
        let mut acc = 0.0;
        let mut buf = Vec::new();
        let (first, offset) = match self.level {
            Level::Gamma => (1usize, 0usize),
            Level::Gamma0 => (0, 1),
        };
        for c in &self.classes {
            let d0 = c.dists[base];
            if c.branches == 0 {
                if d0 <= radius {
                    acc += 2f64.powi(-(d0 as i32)) * w(&c.dists);
                }
                continue;
            }
            // branches * 2^{s + offset - 1} points, each weighted 2^{-(d0 + s + offset)}
            let weight = c.branches as f64 * 2f64.powi(-(d0 as i32) - 1);
            let mut s = first;
            while d0 + s + offset <= radius {
                buf.clear();
                buf.extend(c.dists.iter().map(|d| d + s + offset));
                acc += weight * w(&buf);
                s += 1;
            }
        }
        acc
    }

    /// `sum_x w(dists(x))` over the ball of radius `radius` around reference `base`.
    pub fn sum(&self, base: usize, radius: usize, w: impl Fn(&[usize]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.for_each(base, radius, |d, c| acc += c * w(d));
        acc
    }
}

/// `(1/N) sum_{d(x, x0) <= N} f(x) g(x)` with `x0` the reference `base`.
///
/// `f` and `g` receive the distance vector and return values multiplied by
/// `2^{d(x, x0)/2}`, which keeps the sum finite for large `N`.
pub fn mean_inner(counter: &TreeCounter, base: usize, n: usize, f: impl Fn(&[usize]) -> f64, g: impl Fn(&[usize]) -> f64) -> f64 {
    counter.sum_normalized(base, n, |d| f(d) * g(d)) / n as f64
}

/// Rescales a kernel profile centered at reference `j` to the normalization of [`mean_inner`] at `base`.
pub fn rebase(d: &[usize], base: usize, j: usize, scaled: f64) -> f64 {
    scaled * 2f64.powf((d[base] as f64 - d[j] as f64) / 2.0)
}

/// Gram value `sum_x F_y(x) F_z(x)` for edges with `d(y, z) = k`, truncated to
/// `d(x, y) <= radius`, with its tail bound.
pub fn gram_truncated(k: usize, radius: usize) -> Result<(f64, f64)> {
    let counter = TreeCounter::pair(Level::Gamma0, k)?;
    let v = counter.sum(0, radius, |d| f6(d[0] as i64) * f6(d[1] as i64));
    Ok((v, 2.0 / 3.0 * 2f64.powi(k as i32 - radius as i32)))
}

/// `P_6 P_6 F` at the references for `F = sum_j a_j delta_{y_j}`, truncated at `radius`
/// around each evaluation point; `refs[..m]` are evaluation points, `refs[m..]` the `y_j`.
pub fn project_e6_twice(counter: &TreeCounter, m: usize, a: &[f64], radius: usize) -> Vec<f64> {
    (0..m)
        .map(|x| {
            counter.sum(x, radius, |d| {
                let inner: f64 = a.iter().enumerate().map(|(j, aj)| aj * p6_kernel(d[m + j] as i64)).sum();
                p6_kernel(d[x] as i64) * inner
            })
        })
        .collect()
}

/// Frame sums for `F = sum_j a_j F_{z_j}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameSums {
    /// `sum_{d(z, z0) <= R} <F, F_z>^2`.
    pub coefficient_energy: f64,
    pub norm_sq: f64,
    /// Bound on the omitted part of `coefficient_energy`.
    pub tail_bound: f64,
}

/// `refs[0]` is the truncation center and `refs[1..]` the `z_j`, all edges of `tree`.
pub fn frame_sums(tree: &CellGraph, refs: &[(usize, usize)], a: &[f64], radius: usize, gram_radius: usize) -> Result<FrameSums> {
    if refs.len() != a.len() + 1 {
        return Err(Error::InvalidArgument("need one coefficient per frame vector".into()));
    }
    let counter = TreeCounter::new(tree, Level::Gamma0, refs)?;
    let depth = counter.ref_dist[0].iter().copied().max().unwrap_or(0);
    let max_d = radius + depth + 1;
    let gram: Vec<f64> = (0..=max_d).map(|k| gram_truncated(k, gram_radius).map(|g| g.0)).collect::<Result<_>>()?;
    let energy = counter.sum(0, radius, |d| {
        let c: f64 = a.iter().enumerate().map(|(j, aj)| aj * gram[d[j + 1]]).sum();
        c * c
    });
    let mut norm = 0.0;
    for j in 0..a.len() {
        for k in 0..a.len() {
            norm += a[j] * a[k] * gram[counter.ref_dist[j + 1][k + 1]];
        }
    }
    let amass: f64 = a.iter().map(|x| x.abs()).sum();
    Ok(FrameSums {
        coefficient_energy: energy,
        norm_sq: norm,
        tail_bound: amass * amass * 2f64.powi(2 * depth as i32 + 1 - radius as i32),
    })
}

/// `(1/N) sum_{n=1}^N 2^{n+j+k/2} phi(n+j+k) phi(n+j)`.
pub fn shifted_phi_mean(p: &TreeParameter, k: i64, j: i64, n: usize) -> f64 {
    let s: f64 = (1..=n as i64).map(|m| phi_scaled(p, m + j + k) * phi_scaled(p, m + j)).sum();
    s / n as f64
}

/// Limit of [`shifted_phi_mean`]: `b cos(k t ln 2) / 18`.
pub fn shifted_phi_limit(p: &TreeParameter, k: i64) -> Result<f64> {
    Ok(b_lambda(p)? * (k as f64 * p.angle()).cos() / 18.0)
}

/// Sphere sizes around a point of the tree or of its edge graph.
pub fn sphere_count(level: Level, n: usize) -> f64 {
    match (level, n) {
        (_, 0) => 1.0,
        (Level::Gamma, n) => 3.0 * 2f64.powi(n as i32 - 1),
        (Level::Gamma0, n) => 4.0 * 2f64.powi(n as i32 - 1),
    }
}

/// `<P delta, P delta>_M` at truncation `n`, base point at the delta.
pub fn self_mean(level: Level, p: &TreeParameter, n: usize) -> Result<f64> {
    let mut s = 0.0;
    for d in 0..=n {
        let k = kernel_scaled(level, p, d)?;
        s += sphere_count(level, d) * 2f64.powi(-(d as i32)) * k * k;
    }
    Ok(s / n as f64)
}

/// Limit of [`self_mean`]: `b/12` on the tree and `b/162` on its edge graph.
pub fn self_mean_limit(level: Level, p: &TreeParameter) -> Result<f64> {
    let b = b_lambda(p)?;
    Ok(match level {
        Level::Gamma => b / 12.0,
        Level::Gamma0 => b / 162.0,
    })
}

fn plancherel_constant(level: Level) -> f64 {
    match level {
        Level::Gamma => 12.0,
        Level::Gamma0 => 36.0,
    }
}

/// `|<P f, f> - (c/b) <P f, P f>_M|` for `f = delta` at truncation `n`.
pub fn plancherel_residual(level: Level, p: &TreeParameter, n: usize) -> Result<f64> {
    let b = b_lambda(p)?;
    let lhs = kernel_radial(level, p, 0)?;
    Ok((lhs - plancherel_constant(level) / b * self_mean(level, p, n)?).abs())
}

/// Plancherel residual for `f = sum_j a_j delta_{x_j}` where `x_j` are the
/// counter's references; the mean is centered at reference 0.
pub fn plancherel_residual_general(level: Level, counter: &TreeCounter, a: &[f64], p: &TreeParameter, n: usize) -> Result<f64> {
    let b = b_lambda(p)?;
    let pair_d = counter.ref_distances();
    let mut lhs = 0.0;
    for (i, row) in pair_d.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            lhs += a[i] * a[j] * kernel_radial(level, p, d)?;
        }
    }
    let max_d = n + pair_d.iter().flatten().max().copied().unwrap_or(0) + 2;
    let prof: Vec<f64> = (0..=max_d).map(|d| kernel_scaled(level, p, d)).collect::<Result<_>>()?;
    let pf = |d: &[usize]| a.iter().enumerate().map(|(j, aj)| aj * rebase(d, 0, j, prof[d[j]])).sum::<f64>();
    let mean = mean_inner(counter, 0, n, pf, pf);
    Ok((lhs - plancherel_constant(level) / b * mean).abs())
}

/// Outcome of the compact-support 5-eigenfunction search.
#[derive(Debug, Clone, Serialize)]
pub struct FiveSearch {
    pub patch_size: usize,
    pub constraint_rows: usize,
    pub basis: Vec<Vec<(usize, f64)>>,
    pub max_residual: f64,
}

/// Null space of `-Lap - 5` on functions supported in the ball of radius
/// `support_radius` around `center`, with the equation imposed on the support
/// and its neighbors.
pub fn five_series_search(g: &CellGraph, center: usize, support_radius: usize) -> Result<FiveSearch> {
    let d = g.distances_from(center);
    let patch: Vec<usize> = (0..g.len()).filter(|&v| d[v] <= support_radius).collect();
    if patch.iter().any(|&v| g.boundary[v] || g.neighbors(v).iter().any(|&w| g.boundary[w])) {
        return Err(Error::InvalidArgument("patch touches the truncation boundary".into()));
    }
    let rows: Vec<usize> = (0..g.len()).filter(|&v| d[v] <= support_radius + 1).collect();
    let col_of: std::collections::HashMap<usize, usize> = patch.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut a = nalgebra::DMatrix::<f64>::zeros(rows.len(), patch.len());
    for (r, &x) in rows.iter().enumerate() {
        if let Some(&c) = col_of.get(&x) {
            a[(r, c)] += g.degree(x) as f64 - 5.0;
        }
        for y in g.neighbors(x) {
            if let Some(&c) = col_of.get(y) {
                a[(r, c)] -= 1.0;
            }
        }
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let n = patch.len();
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.resize(n, 0.0);
    let mut basis = Vec::new();
    let mut max_residual: f64 = 0.0;
    for i in 0..vt.nrows().min(n) {
        if sv[i] < 1e-9 {
            let v: Vec<f64> = vt.row(i).iter().copied().collect();
            let mut full = vec![0.0; g.len()];
            for (c, &x) in patch.iter().enumerate() {
                full[x] = v[c];
            }
            let lf = crate::graph::neg_laplacian_apply(g, crate::graph::LaplacianKind::Graph, &full);
            for &x in &rows {
                max_residual = max_residual.max((lf[x] - 5.0 * full[x]).abs());
            }
            basis.push(patch.iter().zip(&v).map(|(&x, &y)| (x, y)).filter(|(_, y)| y.abs() > 1e-12).collect());
        }
    }
    Ok(FiveSearch { patch_size: n, constraint_rows: rows.len(), basis, max_residual })
}

/// `edge_graph(tree_ball(radius))` refined `times` times.
pub fn gamma_n(radius: usize, times: usize) -> Result<CellGraph> {
    let mut g = edge_graph(&build_graph(Family::TreeBall { radius })?)?;
    for _ in 0..times {
        g = crate::graph::refine(&g)?;
    }
    Ok(g)
}
