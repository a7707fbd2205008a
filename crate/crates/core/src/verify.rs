//! Named check suites. Each check reports a residual against a tolerance;
//! output order and values depend only on the options, so reports are reproducible.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decimation::{frak_r, m_of_lambda, Branch, DecimationPolynomial, EigenvalueAddress};
use crate::error::Result;
use crate::fractafold::{self as ff, FractafoldMesh};
use crate::graph::*;
use crate::lattice::*;
use crate::tree::{self, Level, TreeParameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported without a pass/fail decision.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub check: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suite {
    K4,
    Decimation,
    Interval,
    TreeKernel,
    TreeResolution,
    TreeFrame,
    TreePlancherel,
    Honeycomb,
    HexE6,
    Ladder,
    Triangular,
    MProduct,
    Fractafold,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::K4,
        Suite::Decimation,
        Suite::Interval,
        Suite::TreeKernel,
        Suite::TreeResolution,
        Suite::TreeFrame,
        Suite::TreePlancherel,
        Suite::Honeycomb,
        Suite::HexE6,
        Suite::Ladder,
        Suite::Triangular,
        Suite::MProduct,
        Suite::Fractafold,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::K4 => "k4",
            Suite::Decimation => "decimation",
            Suite::Interval => "interval",
            Suite::TreeKernel => "tree-kernel",
            Suite::TreeResolution => "tree-resolution",
            Suite::TreeFrame => "tree-frame",
            Suite::TreePlancherel => "tree-plancherel",
            Suite::Honeycomb => "honeycomb",
            Suite::HexE6 => "hex-e6",
            Suite::Ladder => "ladder",
            Suite::Triangular => "triangular",
            Suite::MProduct => "m-product",
            Suite::Fractafold => "fractafold",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Options {
    /// Truncations for the Plancherel trend; consecutive pairs are compared.
    pub plancherel_n: Vec<usize>,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { plancherel_n: vec![200, 400], seed: 2024 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        Self { checks, passed }
    }
}

struct Sink {
    suite: &'static str,
    out: Vec<Check>,
}

impl Sink {
    fn at_most(&mut self, check: impl Into<String>, residual: f64, tolerance: f64) {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        self.push(check, status, residual, tolerance);
    }

    fn at_least(&mut self, check: impl Into<String>, value: f64, bound: f64) {
        let status = if value >= bound { Status::Pass } else { Status::Fail };
        self.push(check, status, value, bound);
    }

    fn flag(&mut self, check: impl Into<String>, ok: bool) {
        self.push(check, if ok { Status::Pass } else { Status::Fail }, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn info(&mut self, check: impl Into<String>, value: f64) {
        self.push(check, Status::Info, value, 0.0);
    }

    fn push(&mut self, check: impl Into<String>, status: Status, residual: f64, tolerance: f64) {
        self.out.push(Check { suite: self.suite.into(), check: check.into(), status, residual, tolerance });
    }

    fn error(&mut self, check: &str, e: crate::Error) {
        self.push(format!("{check}: {e}"), Status::Fail, f64::NAN, 0.0);
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run(suites: &[Suite], opts: &Options) -> Report {
    let mut checks = Vec::new();
    for &s in suites {
        let mut sink = Sink { suite: s.name(), out: Vec::new() };
        if let Err(e) = run_one(s, opts, &mut sink) {
            sink.error("suite aborted", e);
        }
        checks.extend(sink.out);
    }
    Report::new(checks)
}

fn run_one(s: Suite, opts: &Options, sink: &mut Sink) -> Result<()> {
    match s {
        Suite::K4 => k4(sink),
        Suite::Decimation => decimation(sink),
        Suite::Interval => interval(sink),
        Suite::TreeKernel => tree_kernel(sink, opts),
        Suite::TreeResolution => tree_resolution(sink),
        Suite::TreeFrame => tree_frame(sink, opts),
        Suite::TreePlancherel => tree_plancherel(sink, opts),
        Suite::Honeycomb => honeycomb(sink, opts),
        Suite::HexE6 => hex_e6(sink, opts),
        Suite::Ladder => ladder(sink),
        Suite::Triangular => triangular(sink),
        Suite::MProduct => m_product(sink),
        Suite::Fractafold => fractafold(sink, opts),
    }
}

fn pair(f: Family) -> Result<(CellGraph, CellGraph)> {
    let g = build_graph(f)?;
    let g0 = edge_graph(&g)?;
    Ok((g, g0))
}

fn k4(sink: &mut Sink) -> Result<()> {
    let (g, g0) = pair(Family::K4)?;
    let s = brute_spectrum(&g, LaplacianKind::Graph)?.values;
    let s0 = brute_spectrum(&g0, LaplacianKind::Graph)?.values;
    sink.at_most("gamma spectrum {0, 4^3}", max_diff(&s, &[0.0, 4.0, 4.0, 4.0]), 1e-12);
    sink.at_most("gamma0 spectrum {0, 4^3, 6^2}", max_diff(&s0, &[0.0, 4.0, 4.0, 4.0, 6.0, 6.0]), 1e-12);
    for f in [Family::K4, Family::CircularLadder { n: 5 }, Family::HexTorus { m: 3, n: 4 }] {
        let (g, g0) = pair(f)?;
        let s1 = s1_matrix(&g, &g0)?;
        let s2 = s2_matrix(&g, &g0)?;
        let six = |n: usize| DMatrix::<i64>::identity(n, n) * 6;
        let bad21 = (&s2 * &s1 - (six(g.len()) - integer_laplacian(&g))).iter().filter(|&&x| x != 0).count();
        let bad12 = (&s1 * &s2 - (six(g0.len()) - integer_laplacian(&g0))).iter().filter(|&&x| x != 0).count();
        sink.at_most(format!("{}: S2 S1 = 6I + Lap (mismatched entries)", f.name()), bad21 as f64, 0.0);
        sink.at_most(format!("{}: S1 S2 = 6I + Lap0 (mismatched entries)", f.name()), bad12 as f64, 0.0);
        let mut want = brute_spectrum(&g, LaplacianKind::Graph)?.values;
        want.extend(std::iter::repeat_n(6.0, g0.len() - g.len()));
        want.sort_by(f64::total_cmp);
        let got = brute_spectrum(&g0, LaplacianKind::Graph)?.values;
        sink.at_most(format!("{}: spectrum multiset identity", f.name()), max_diff(&got, &want), 1e-9);
    }
    Ok(())
}

fn decimation(sink: &mut Sink) -> Result<()> {
    let base = edge_graph(&build_graph(Family::K4)?)?;
    let r = ff::decimation_spectrum_check(&base, 3, 1e-8)?;
    for l in &r.levels {
        sink.at_most(format!("level {} ({} vertices): unclassified fraction", l.level, l.dimension), 1.0 - l.classified_fraction, 0.0);
        sink.flag(format!("level {}: multiplicity bookkeeping", l.level), l.balanced);
        let off = l.exceptional_values.iter().map(|&x| ff::FORBIDDEN.iter().map(|f| (x - f).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
        sink.at_most(format!("level {}: exceptional values in the forbidden set", l.level), off, 1e-8);
    }
    Ok(())
}

fn interval(sink: &mut Sink) -> Result<()> {
    let p = DecimationPolynomial::INTERVAL;
    let mut err = 0.0f64;
    for i in 0..=400 {
        let z = 40.0 * i as f64 / 400.0;
        err = err.max((frak_r(&p, z, 1e-15)? - (2.0 - 2.0 * z.sqrt().cos())).abs());
    }
    sink.at_most("frak_r = 2 - 2 cos sqrt z on [0, 40]", err, 1e-9);
    let pi = std::f64::consts::PI;
    let mut err = 0.0f64;
    for level in 2..7 {
        let n = 1usize << level;
        for k in 1..n {
            let u: Vec<f64> = (0..=n).map(|i| (k as f64 * pi * i as f64 / n as f64).sin()).collect();
            let lam = p.branch(Branch::Lo, 2.0 - 2.0 * (k as f64 * pi / n as f64).cos())?;
            let w = ff::interval::extend(&u, lam)?;
            for (i, x) in w.iter().enumerate() {
                err = err.max((x - (k as f64 * pi * i as f64 / (2 * n) as f64).sin()).abs());
            }
        }
    }
    sink.at_most("sine extension through one subdivision", err, 1e-12);
    Ok(())
}

fn lambda_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| tree::BAND_LO + (tree::BAND_HI - tree::BAND_LO) * i as f64 / (n + 1) as f64).collect()
}

fn tree_kernel(sink: &mut Sink, opts: &Options) -> Result<()> {
    let g = build_graph(Family::TreeBall { radius: 12 })?;
    let rows = g.interior();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ys: Vec<usize> = (0..10).map(|_| rng.gen_range(0..94)).collect();
    let profiles: Vec<Vec<usize>> = ys.iter().map(|&y| g.distances_from(y)).collect();
    let mut worst = 0.0f64;
    for lam in lambda_grid(50) {
        let p = TreeParameter::from_lambda(lam)?;
        for d in &profiles {
            let f = d.iter().map(|&d| tree::kernel_radial(Level::Gamma, &p, d)).collect::<Result<Vec<f64>>>()?;
            worst = worst.max(eigen_residual(&g, &f, lam, &rows, f64::abs));
        }
    }
    sink.at_most("gamma kernel eigen-residual, 50 lambdas, radius-12 ball", worst, 1e-10);
    let g0 = edge_graph(&build_graph(Family::TreeBall { radius: 10 })?)?;
    let rows0 = g0.interior();
    let mut worst = 0.0f64;
    for lam in lambda_grid(20) {
        let p = TreeParameter::from_lambda(lam)?;
        for y in [0, 5, 17] {
            let f = g0.distances_from(y).iter().map(|&d| tree::kernel_radial(Level::Gamma0, &p, d)).collect::<Result<Vec<f64>>>()?;
            worst = worst.max(eigen_residual(&g0, &f, lam, &rows0, f64::abs));
        }
    }
    sink.at_most("gamma0 kernel eigen-residual", worst, 1e-10);
    Ok(())
}

fn tree_resolution(sink: &mut Sink) -> Result<()> {
    let m = tree::resolution_moments(Level::Gamma, 4, 1e-12)?;
    for (d, v) in m.iter().enumerate() {
        let want = if d == 0 { 1.0 } else { 0.0 };
        sink.at_most(format!("int P delta dm at distance {d}"), (v - want).abs(), 1e-6);
    }
    sink.at_most("mass of dm (angle form)", (tree::integrate_dm(|_| 1.0, 1e-12)?.value - 1.0).abs(), 1e-8);
    sink.at_most("mass of dm (lambda form)", (tree::measure_mass_lambda(1e-12)?.value - 1.0).abs(), 1e-8);
    Ok(())
}

fn tree_frame(sink: &mut Sink, opts: &Options) -> Result<()> {
    let t = build_graph(Family::TreeBall { radius: 6 })?;
    let edges = t.edges();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut worst, mut tail_ok) = (0.0f64, true);
    for _ in 0..20 {
        let n = rng.gen_range(1..=6);
        let mut refs = vec![(0, 1)];
        refs.extend((0..n).map(|_| edges[rng.gen_range(0..edges.len())]));
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = tree::frame_sums(&t, &refs, &a, 30, 80)?;
        let gap = (s.coefficient_energy - 3.0 * s.norm_sq).abs();
        worst = worst.max(gap / s.norm_sq);
        tail_ok &= gap <= 3.0 * s.tail_bound + 1e-12;
    }
    sink.at_most("relative frame gap, 20 random combinations, radius 30", worst, 1e-3);
    sink.flag("gap within certified tail bound", tail_ok);
    Ok(())
}

fn tree_plancherel(sink: &mut Sink, opts: &Options) -> Result<()> {
    for lam in [2.5, 3.0, 3.5] {
        let p = TreeParameter::from_lambda(lam)?;
        let r = opts.plancherel_n.iter().map(|&n| tree::plancherel_residual(Level::Gamma, &p, n)).collect::<Result<Vec<f64>>>()?;
        for (w, ns) in r.windows(2).zip(opts.plancherel_n.windows(2)) {
            let ratio = w[0] / w[1];
            let ok = (1.6..=2.4).contains(&ratio);
            sink.push(
                format!("lambda {lam}: residual ratio N={} -> N={}", ns[0], ns[1]),
                if ok { Status::Pass } else { Status::Fail },
                ratio,
                2.0,
            );
        }
        for level in [Level::Gamma, Level::Gamma0] {
            let rel = tree::self_mean(level, &p, 800)? / tree::self_mean_limit(level, &p)? - 1.0;
            sink.at_most(format!("lambda {lam}: {level:?} mean limit at N=800 (relative)"), rel.abs(), 0.05);
        }
    }
    Ok(())
}

fn honeycomb(sink: &mut Sink, opts: &Options) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (u, v) = (rng.gen::<f64>(), rng.gen::<f64>());
        let s = honeycomb_symbol(u, v);
        let m = floquet_block(u, v);
        let tr = (m[(0, 0)] + m[(1, 1)]).re;
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        worst = worst.max((s.lambda_plus - (tr / 2.0 - disc)).abs()).max((s.lambda_minus - (tr / 2.0 + disc)).abs());
    }
    sink.at_most("symbol vs 2x2 diagonalization, 1000 samples", worst, 1e-12);
    let mut worst = 0.0f64;
    for i in 0..200 {
        for j in 0..200 {
            if i + j > 0 {
                let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
                worst = worst.max((hex_weight(a, b) * hex_fhat(a, b).powi(2) - 1.0).abs());
            }
        }
    }
    sink.at_most("weight normalization on a 200^2 grid", worst, 1e-12);
    let t = HexTranslates::new(1024);
    for p in -2..=2i64 {
        for q in -2..=2i64 {
            let want = if (p, q) == (0, 0) { 1.0 } else { 0.0 };
            let e: Vec<f64> = [25, 50, 100].iter().map(|&r| (t.inner(p, q, r) - want).abs()).collect();
            let ok = e[1] < e[0] && e[2] < e[1];
            sink.push(format!("translate ({p},{q}): error decreasing over R = 25, 50, 100"), if ok { Status::Pass } else { Status::Fail }, e[2], e[1]);
        }
    }
    Ok(())
}

fn hex_e6(sink: &mut Sink, opts: &Options) -> Result<()> {
    let patch = HexPatch::new(4)?;
    let l = integer_laplacian(&patch.gamma0);
    let mut bad = 0usize;
    for h in patch.hexagons() {
        let psi = patch.psi_h(h)?;
        let v = DVector::from_iterator(psi.len(), psi.iter().map(|&x| x as i64));
        let lv = &l * &v;
        bad += patch.gamma0.interior().into_iter().filter(|&x| lv[x] != 6 * v[x]).count();
    }
    sink.at_most("psi_H is a 6-eigenfunction in integer arithmetic (mismatches)", bad as f64, 0.0);
    let patch = HexPatch::new(7)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = 0usize;
    for _ in 0..100 {
        let mut coeffs = BTreeMap::new();
        while coeffs.len() < 10 {
            coeffs.insert((rng.gen_range(-4..=3), rng.gen_range(-4..=3)), rng.gen_range(-5..=5) as f64);
        }
        coeffs.retain(|_, c| *c != 0.0);
        let u = patch.compose(&coeffs)?;
        let got: BTreeMap<_, _> = patch.decompose(&u)?.into_iter().collect();
        failures += usize::from(got != coeffs);
    }
    sink.at_most("exact round-trip decomposition, 100 random elements (failures)", failures as f64, 0.0);
    Ok(())
}

fn ladder(sink: &mut Sink) -> Result<()> {
    let s = brute_spectrum(&build_graph(Family::CircularLadder { n: 200 })?, LaplacianKind::Graph)?;
    sink.at_most("circular ladder n=200 vs closed form", max_diff(&s.values, &circular_ladder_spectrum(200)), 1e-9);
    for n in [50, 100, 200] {
        let (low, mid) = ladder_edge_counts(n)?;
        sink.at_most(format!("n={n}: count in [2,4] vs twice count in [0,2] (relative)"), (mid as f64 / (2.0 * low as f64) - 1.0).abs(), 0.1);
    }
    Ok(())
}

fn triangular(sink: &mut Sink) -> Result<()> {
    let (lo, hi) = triangular_symbol_band(60);
    let mut last = f64::NEG_INFINITY;
    for m in [6, 12, 24] {
        let b = tri_torus_band(m, m)?;
        let outside = (lo - b.min_eigenvalue).max(b.max_eigenvalue - hi).max(0.0);
        sink.at_most(format!("torus {m}x{m}: eigenvalues inside the symbol band"), outside, 1e-9);
        sink.flag(format!("torus {m}x{m}: maximal eigenvalue non-decreasing"), b.max_eigenvalue >= last - 1e-12);
        last = b.max_eigenvalue;
    }
    sink.at_most("largest torus maximum reaches the band edge", hi - last, 1e-9);
    let r = triangular_field_bands(3, &[6])?;
    sink.info("computed sigma0 upper edge", r.sigma0_symbol[1]);
    sink.info("stated sigma0 upper edge", r.sigma0_stated[1]);
    Ok(())
}

/// Least-squares slope of `ln |x_k|` against `k`.
fn log_slope(xs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().enumerate().filter(|(_, x)| **x > 0.0).map(|(k, x)| (k as f64, x.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn m_product(sink: &mut Sink) -> Result<()> {
    let g = DecimationPolynomial::GASKET;
    for (seed, word) in [(4.0, vec![]), (1.0, vec![Branch::Hi]), (3.5, vec![Branch::Lo, Branch::Hi])] {
        let a = EigenvalueAddress::resolved(&g, 0, seed, word, 1e-13)?;
        let m = m_of_lambda(&g, &a, 1e-15)?;
        let start = a.word.len() + 2;
        let inc: Vec<f64> = m.partials.windows(2).skip(start).map(|p| (p[1] - p[0]).abs()).take(10).collect();
        let rate = -log_slope(&inc);
        sink.at_least(format!("seed {seed}: increment decay rate (natural log)"), rate, 1.5);
        sink.info(format!("seed {seed}: increment decay exponent (base 5)"), rate / 5f64.ln());
        let c: Vec<f64> = inc.iter().enumerate().map(|(k, x)| x * 5f64.powi(k as i32)).collect();
        let spread = c.iter().cloned().fold(0.0, f64::max) / c.iter().cloned().fold(f64::INFINITY, f64::min);
        sink.at_most(format!("seed {seed}: spread of increments * 5^k"), spread, 2.0);
    }
    for k in [1, 2, 3] {
        let r = ff::interval::sine_norm_ratios(k, 2, 4)?;
        sink.at_most(format!("interval k={k}: level-6 norm ratio vs factor 1"), (r[3] - 1.0).abs(), 0.01);
    }
    let base = edge_graph(&build_graph(Family::K4)?)?;
    let mesh = FractafoldMesh::new(base.clone(), 4)?;
    let s0 = brute_spectrum(&base, LaplacianKind::Graph)?;
    let a = EigenvalueAddress::new(0, 4.0, vec![Branch::Hi]);
    let levels = ff::admissible_levels(&a, 4)?;
    let mut f: Vec<f64> = s0.vectors.column(1).iter().copied().collect();
    let mut worst = 0.0f64;
    for m in 0..4 {
        let w = ff::extend_eigenfunction(&mesh, m, &f, levels[m + 1])?;
        let norm = |v: &[f64], l: usize| v.iter().zip(ff::vertex_weights(mesh.graph(l), l)).map(|(x, w)| x * x * w).sum::<f64>();
        let ratio = norm(&w, m + 1) / norm(&f, m);
        worst = worst.max((ratio * crate::decimation::m_factor(levels[m + 1])? - 1.0).abs());
        f = w;
    }
    sink.at_most("gasket level-norm ratio = 1 / product factor, levels 1-4", worst, 1e-12);
    Ok(())
}

fn fractafold(sink: &mut Sink, opts: &Options) -> Result<()> {
    let mesh = FractafoldMesh::new(edge_graph(&build_graph(Family::K4)?)?, 3)?;
    let a = EigenvalueAddress::resolved(&DecimationPolynomial::GASKET, 0, 4.0, vec![Branch::Hi], 1e-13)?;
    let base = mesh.base();
    let s0 = brute_spectrum(base, LaplacianKind::Graph)?;
    let f0: Vec<f64> = s0.vectors.column(1).iter().copied().collect();
    let f = ff::psi_apply(&mesh, &f0, &a)?;
    let all: Vec<usize> = (0..mesh.finest().len()).collect();
    sink.at_most("pushed 4-eigenfunction, residual at level 3", ff::mesh_residual(mesh.finest(), &f, a.level_value(&DecimationPolynomial::GASKET, 3)?, &all), 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f0: Vec<f64> = (0..base.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..mesh.finest().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs: f64 = ff::psi_apply(&mesh, &f0, &a)?.iter().zip(&g).zip(mesh.weights()).map(|((p, q), w)| p * q * w).sum();
        let rhs: f64 = f0.iter().zip(ff::psi_adjoint(&mesh, &g, &a)?).map(|(p, q)| p * q).sum();
        worst = worst.max((lhs - rhs).abs());
    }
    sink.at_most("adjoint consistency", worst, 1e-12);
    let m2 = FractafoldMesh::new(base.clone(), 2)?;
    sink.at_most("resolution of identity at level 2", ff::resolution_defect(&m2, true)?, 1e-8);
    sink.at_least("resolution defect without the product", ff::resolution_defect(&m2, false)?, 1e-2);
    Ok(())
}
