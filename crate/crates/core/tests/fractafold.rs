use fractafold::decimation::{enumerate_addresses, m_factor, Branch, Cutoff, DecimationPolynomial, EigenvalueAddress};
use fractafold::fractafold::*;
use fractafold::graph::*;
use fractafold::tree::{kernel_eval, Level};
use fractafold::Error;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const G: DecimationPolynomial = DecimationPolynomial::GASKET;

fn octahedron() -> CellGraph {
    edge_graph(&build_graph(Family::K4).unwrap()).unwrap()
}

fn addr(seed: f64, word: &[Branch]) -> EigenvalueAddress {
    EigenvalueAddress::new(0, seed, word.to_vec())
}

fn off_base(mesh: &FractafoldMesh) -> Vec<usize> {
    (mesh.base().len()..mesh.finest().len()).collect()
}

#[test]
fn mesh_sizes_and_measure() {
    let mesh = FractafoldMesh::new(octahedron(), 3).unwrap();
    let sizes: Vec<usize> = (0..=3).map(|m| mesh.graph(m).len()).collect();
    assert_eq!(sizes, vec![6, 18, 54, 162]);
    for m in 0..3 {
        assert_eq!(mesh.graph(m + 1).len(), mesh.graph(m).len() + 3 * mesh.graph(m).cells.len());
    }
    let total: f64 = mesh.weights().iter().sum();
    assert!((total - 4.0).abs() < 1e-12);
    assert!(FractafoldMesh::new(build_graph(Family::K4).unwrap(), 1).is_err());
}

#[test]
fn local_system_matches_closed_form() {
    for i in 0..=60 {
        let lam = -3.0 + 0.15 * i as f64 + 0.01;
        let Ok(sys) = ExtensionSystem::new(lam) else { continue };
        let (a, b, c) = (0.3, -1.2, 2.5);
        let d = (5.0 - lam) * (2.0 - lam);
        let want = [
            ((4.0 - lam) * (a + b) + 2.0 * c) / d,
            ((4.0 - lam) * (b + c) + 2.0 * a) / d,
            ((4.0 - lam) * (c + a) + 2.0 * b) / d,
        ];
        let got = sys.solve(a, b, c);
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-12 * want[k].abs().max(1.0), "lambda {lam}");
        }
    }
}

#[test]
fn determinant_vanishes_only_near_forbidden_values() {
    for i in 0..=800 {
        let lam = -1.0 + 0.01 * i as f64 + 0.003;
        let det = ExtensionSystem::determinant(lam);
        assert!((det - (2.0 - lam) * (5.0 - lam).powi(2)).abs() < 1e-10);
        let full = det * ExtensionSystem::transfer_factor(lam);
        let dist = FORBIDDEN.iter().map(|f| (lam - f).abs()).fold(f64::INFINITY, f64::min);
        if dist > 0.05 {
            assert!(full.abs() > 1e-3, "lambda {lam}");
        }
    }
    for f in FORBIDDEN {
        assert!(matches!(ExtensionSystem::new(f), Err(Error::Forbidden(_))));
        for h in [1e-2, 1e-4, 1e-6] {
            let v = (ExtensionSystem::determinant(f + h) * ExtensionSystem::transfer_factor(f + h)).abs();
            assert!(v < 50.0 * h, "{f} {h} {v}");
        }
    }
}

#[test]
fn single_triangle_corner_delta() {
    let mesh = FractafoldMesh::new(build_graph(Family::SingleTriangle).unwrap(), 1).unwrap();
    let lam = 0.37;
    let w = extend_eigenfunction(&mesh, 0, &[1.0, 0.0, 0.0], lam).unwrap();
    assert!(mesh_residual(mesh.finest(), &w, lam, &[3, 4, 5]) <= 1e-12);
    let l = DMatrix::from_row_slice(3, 3, &[4.0 - lam, -1.0, -1.0, -1.0, 4.0 - lam, -1.0, -1.0, -1.0, 4.0 - lam]);
    let oracle = dense_solve(l, &[1.0, 0.0, 1.0]).unwrap();
    for k in 0..3 {
        assert!((w[3 + k] - oracle[k]).abs() < 1e-14);
    }
    assert!(matches!(extend_eigenfunction(&mesh, 0, &[1.0, 0.0, 0.0], 5.0), Err(Error::Forbidden(_))));
}

#[test]
fn k4_eigenpairs_extend_to_level_one() {
    let base = octahedron();
    let mesh = FractafoldMesh::new(base.clone(), 1).unwrap();
    let s0 = brute_spectrum(&base, LaplacianKind::Graph).unwrap();
    let s1 = brute_spectrum(mesh.finest(), LaplacianKind::Graph).unwrap();
    let all: Vec<usize> = (0..mesh.finest().len()).collect();
    let mut checked = 0;
    for (i, &mu) in s0.values.iter().enumerate() {
        if (mu - 6.0).abs() < 1e-9 {
            continue;
        }
        let u: Vec<f64> = s0.vectors.column(i).iter().copied().collect();
        let (lo, hi) = G.inverse_branches(mu.max(0.0)).unwrap();
        for lam in [lo, hi] {
            if is_forbidden(lam) {
                continue;
            }
            let w = extend_eigenfunction(&mesh, 0, &u, lam).unwrap();
            assert!(mesh_residual(mesh.finest(), &w, lam, &all) < 1e-12, "mu {mu} lambda {lam}");
            assert!(s1.values.iter().any(|&x| (x - lam).abs() < 1e-9));
            checked += 1;
        }
    }
    assert_eq!(checked, 7);
}

#[test]
fn interval_sines_extend_exactly() {
    let pi = std::f64::consts::PI;
    for level in 2..7 {
        let n = 1usize << level;
        for k in 1..n {
            let u: Vec<f64> = (0..=n).map(|i| (k as f64 * pi * i as f64 / n as f64).sin()).collect();
            let z = 2.0 - 2.0 * (k as f64 * pi / (2 * n) as f64).cos();
            let lam = DecimationPolynomial::INTERVAL.branch(Branch::Lo, 2.0 - 2.0 * (k as f64 * pi / n as f64).cos()).unwrap();
            assert!((z - lam).abs() < 1e-12);
            let w = interval::extend(&u, lam).unwrap();
            for (i, x) in w.iter().enumerate() {
                assert!((x - (k as f64 * pi * i as f64 / (2 * n) as f64).sin()).abs() < 1e-12);
            }
        }
    }
    assert!(interval::extend(&[0.0, 1.0], 2.0).is_err());
}

#[test]
fn interval_norm_ratio_at_level_six() {
    for k in [1, 2, 3] {
        let r = interval::sine_norm_ratios(k, 2, 4).unwrap();
        assert!((r[3] - 1.0).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn gasket_norm_ratio_matches_product_factors() {
    let base = octahedron();
    let mesh = FractafoldMesh::new(base.clone(), 4).unwrap();
    let s0 = brute_spectrum(&base, LaplacianKind::Graph).unwrap();
    let u: Vec<f64> = s0.vectors.column(1).iter().copied().collect();
    let a = addr(4.0, &[Branch::Hi]);
    let levels = admissible_levels(&a, 4).unwrap();
    let mut f = u;
    let mut deviation = Vec::new();
    for m in 0..4 {
        let w = extend_eigenfunction(&mesh, m, &f, levels[m + 1]).unwrap();
        let norm = |v: &[f64], lvl: usize| -> f64 {
            v.iter().zip(vertex_weights(mesh.graph(lvl), lvl)).map(|(x, w)| x * x * w).sum()
        };
        let ratio = norm(&w, m + 1) / norm(&f, m);
        assert!((ratio * m_factor(levels[m + 1]).unwrap() - 1.0).abs() < 1e-12, "level {m}");
        deviation.push((ratio - 1.0).abs());
        f = w;
    }
    assert!(deviation[3] < deviation[2] && deviation[2] < deviation[1], "{deviation:?}");
}

fn k4_mesh(level: usize) -> FractafoldMesh {
    FractafoldMesh::new(octahedron(), level).unwrap()
}

#[test]
fn psi_v_properties() {
    let mesh = k4_mesh(3);
    let a = addr(4.0, &[Branch::Hi, Branch::Hi]);
    let levels = admissible_levels(&a, 3).unwrap();
    for v in 0..mesh.base().len() {
        let psi = psi_v_lambda(&mesh, v, &a).unwrap();
        for u in 0..mesh.base().len() {
            assert_eq!(psi[u], if u == v { 1.0 } else { 0.0 });
        }
        assert!(mesh_residual(mesh.finest(), &psi, levels[3], &off_base(&mesh)) <= 1e-10);
        let home: Vec<usize> = mesh.base().cells.iter().enumerate().filter(|(_, c)| c.contains(&v)).map(|(i, _)| i).collect();
        assert_eq!(home.len(), 2);
        for x in 0..mesh.finest().len() {
            if mesh.base_cells_of(x).iter().all(|c| !home.contains(c)) {
                assert_eq!(psi[x], 0.0, "vertex {x}");
            }
        }
    }
}

#[test]
fn psi_at_zero_is_harmonic_extension() {
    let mesh = k4_mesh(2);
    let g = mesh.finest();
    let nb = mesh.base().len();
    let inner = off_base(&mesh);
    let l = dense_laplacian(g);
    for v in 0..nb {
        let psi = psi_v_lambda(&mesh, v, &addr(0.0, &[])).unwrap();
        let a = principal_submatrix(&l, &inner);
        let rhs: Vec<f64> = inner.iter().map(|&x| if g.has_edge(x, v) { 1.0 } else { 0.0 }).collect();
        let h = dense_solve(a, &rhs).unwrap();
        for (i, &x) in inner.iter().enumerate() {
            assert!((psi[x] - h[i]).abs() < 1e-13);
        }
    }
}

#[test]
fn psi_apply_pushes_base_eigenfunctions() {
    let mesh = k4_mesh(3);
    let base = mesh.base();
    let zero = psi_apply(&mesh, &vec![0.0; base.len()], &addr(4.0, &[])).unwrap();
    assert!(zero.iter().all(|&x| x == 0.0));
    let s0 = brute_spectrum(base, LaplacianKind::Graph).unwrap();
    let all: Vec<usize> = (0..mesh.finest().len()).collect();
    for word in [vec![], vec![Branch::Hi], vec![Branch::Lo, Branch::Hi], vec![Branch::Hi, Branch::Hi, Branch::Hi]] {
        let a = EigenvalueAddress::resolved(&G, 0, 4.0, word, 1e-13).unwrap();
        for col in 1..4 {
            let f0: Vec<f64> = s0.vectors.column(col).iter().copied().collect();
            let f = psi_apply(&mesh, &f0, &a).unwrap();
            let lam3 = a.level_value(&G, 3).unwrap();
            assert!(mesh_residual(mesh.finest(), &f, lam3, &all) <= 1e-9);
        }
    }
}

#[test]
fn adjoint_consistency() {
    let mesh = k4_mesh(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = addr(4.0, &[Branch::Hi, Branch::Lo, Branch::Hi]);
    for _ in 0..20 {
        let f0: Vec<f64> = (0..mesh.base().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..mesh.finest().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pf = psi_apply(&mesh, &f0, &a).unwrap();
        let lhs: f64 = pf.iter().zip(&g).zip(mesh.weights()).map(|((p, q), w)| p * q * w).sum();
        let rhs: f64 = f0.iter().zip(psi_adjoint(&mesh, &g, &a).unwrap()).map(|(p, q)| p * q).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
    for y in [0, 7, 100] {
        let vals = psi_values_at(&mesh, y, &a).unwrap();
        for v in 0..mesh.base().len() {
            assert!((vals[v] - psi_v_lambda(&mesh, v, &a).unwrap()[y]).abs() < 1e-13);
        }
    }
}

#[test]
fn forbidden_addresses_are_rejected() {
    let mesh = k4_mesh(2);
    assert!(matches!(psi_v_lambda(&mesh, 0, &addr(0.0, &[Branch::Hi])), Err(Error::Forbidden(_))));
    assert!(matches!(psi_v_lambda(&mesh, 0, &addr(6.0, &[])), Err(Error::Forbidden(_))));
    assert!(psi_v_lambda(&mesh, 0, &addr(6.0, &[Branch::Hi])).is_ok());
}

fn tree_kernel_matrix(base: &CellGraph, lambda0: f64) -> DMatrix<f64> {
    let n = base.len();
    let mut p = DMatrix::zeros(n, n);
    for u in 0..n {
        let d = base.distances_from(u);
        for v in 0..n {
            p[(u, v)] = kernel_eval(Level::Gamma0, lambda0, d[v]).unwrap();
        }
    }
    p
}

#[test]
fn tree_fractafold_kernel_solves_eigen_equation() {
    let base = edge_graph(&build_graph(Family::TreeBall { radius: 5 }).unwrap()).unwrap();
    let mesh = FractafoldMesh::new(base.clone(), 2).unwrap();
    let g = mesh.finest();
    let rows: Vec<usize> = (0..g.len()).filter(|&x| g.degree(x) == 4).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut samples = 0;
    for (seed, word) in [(2.5, vec![Branch::Hi]), (3.4, vec![Branch::Lo, Branch::Hi]), (1.1, vec![])] {
        let a = EigenvalueAddress::resolved(&G, 0, seed, word, 1e-13).unwrap();
        let p0 = tree_kernel_matrix(&base, seed);
        let lam = a.level_value(&G, 2).unwrap();
        for _ in 0..7 {
            let y = rng.gen_range(0..g.len());
            let col = fractafold_kernel_column(&mesh, &a, &p0, y).unwrap();
            let scale = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let l = mesh_laplacian_apply(g, &col);
            for _ in 0..10 {
                let x = rows[rng.gen_range(0..rows.len())];
                assert!((l[x] - lam * col[x]).abs() <= 1e-8 * scale.max(1.0));
                samples += 1;
            }
            let x = rng.gen_range(0..g.len());
            let pxy = fractafold_kernel(&mesh, &a, &p0, x, y).unwrap();
            let pyx = fractafold_kernel(&mesh, &a, &p0, y, x).unwrap();
            assert!((pxy - pyx).abs() <= 1e-12 * pxy.abs().max(1.0));
        }
    }
    assert!(samples >= 200);
}

#[test]
fn resolution_of_identity_needs_the_product() {
    let mesh = k4_mesh(2);
    let good = resolution_defect(&mesh, true).unwrap();
    let bad = resolution_defect(&mesh, false).unwrap();
    assert!(good < 1e-8, "{good}");
    assert!(bad > 1e-2, "{bad}");
}

#[test]
fn decimation_check_k4_three_levels() {
    let r = decimation_spectrum_check(&octahedron(), 3, 1e-8).unwrap();
    let dims: Vec<usize> = r.levels.iter().map(|l| l.dimension).collect();
    assert_eq!(dims, vec![18, 54, 162]);
    for l in &r.levels {
        assert_eq!(l.classified_fraction, 1.0);
        assert!(l.balanced);
        assert_eq!(l.decimated + l.exceptional, l.dimension);
        assert!(l.exceptional_values.iter().all(|&x| is_forbidden(x) || FORBIDDEN.iter().any(|f| (x - f).abs() < 1e-8)));
    }
}

#[test]
fn decimation_check_single_triangle_and_ladder() {
    let tri = decimation_spectrum_check(&build_graph(Family::SingleTriangle).unwrap(), 4, 1e-8).unwrap();
    let mut exc = Vec::new();
    for l in &tri.levels {
        assert!(l.balanced && l.unexplained == 0, "level {}", l.level);
        exc.push(l.exceptional);
    }
    assert!(exc.windows(2).all(|w| w[1] > w[0]), "{exc:?}");
    let ladder = edge_graph(&build_graph(Family::CircularLadder { n: 6 }).unwrap()).unwrap();
    let r = decimation_spectrum_check(&ladder, 2, 1e-8).unwrap();
    assert!(r.levels.iter().all(|l| l.balanced && l.unexplained == 0));
}

fn cutoff() -> Cutoff {
    Cutoff { max_m0: 3, max_word_len: 5 }
}

#[test]
fn preimage_of_six_splits_into_two_and_three() {
    let rep = fractafold_spectrum(&Sigma0 { bands: vec![], points: vec![6.0] }, cutoff(), 1e-13).unwrap();
    let six = fractafold::decimation::preimage_point(&G, 6.0, 5, 1e-13).unwrap();
    let split: Vec<f64> = enumerate_addresses(&G, &[(1, 2.0), (1, 3.0)], 4, 1e-13).unwrap().into_iter().map(|a| a.approx).collect();
    assert_eq!(six.len(), split.len(), "{six:?}\n{split:?}");
    for (x, y) in six.iter().zip(&split) {
        assert!((x - y).abs() < 1e-9 * x.max(1.0), "{x} vs {y}");
        assert!(rep.lower_contains(*y, 1e-9));
    }
}

#[test]
fn tree_fractafold_spectrum_sandwich() {
    let s = 2f64.sqrt();
    let sigma0 = Sigma0 { bands: vec![[3.0 - 2.0 * s, 3.0 + 2.0 * s]], points: vec![] };
    let rep = fractafold_spectrum(&sigma0, cutoff(), 1e-13).unwrap();
    assert!(!rep.bands.is_empty());
    assert!(rep.bands.windows(2).all(|w| w[0].lo <= w[1].lo));
    let first = &rep.bands[0];
    let lo = fractafold::decimation::s_r(&G, 3.0 - 2.0 * s, 1e-13).unwrap();
    assert!((first.lo - lo).abs() < 1e-9);
    let prime = fractafold::decimation::enumerate_series(&G, fractafold::decimation::SeriesKind::SigmaInfPrime, cutoff(), 1e-13).unwrap();
    for a in &prime.members {
        assert!(rep.lower_contains(a.approx, 1e-9));
    }
    let full = fractafold::decimation::enumerate_series(&G, fractafold::decimation::SeriesKind::SigmaInf, cutoff(), 1e-13).unwrap();
    for p in &rep.points {
        assert!(full.contains(p.value, 1e-9 * p.value.max(1.0)) || rep.bands.iter().any(|b| p.value >= b.lo && p.value <= b.hi));
        assert!(rep.upper_contains(p.value, 1e-9));
    }
    let bp = barlow_perkins_points(3, 3, 1e-13).unwrap();
    assert!(bp.iter().all(|p| p.series.contains("multiplicity_1")));
    assert!(!bp.is_empty() && bp.len() <= 8 * 8);
}

#[test]
fn cluster_values_groups_repeats() {
    let c = cluster_values(&[0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0, 2.0], 1e-9);
    assert_eq!(c.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 3]);
}
