use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fractafold::decimation::{Branch, Cutoff, DecimationPolynomial, EigenvalueAddress};
use fractafold::fractafold::{self as ff, FractafoldMesh, Sigma0};
use fractafold::graph::{brute_spectrum, build_graph, edge_graph, CellGraph, Family, GraphJson, LaplacianKind};
use fractafold::lattice::{honeycomb_symbol, triangular_field_bands, HexPatch};
use fractafold::tree::{self, Level, TreeParameter};
use fractafold::verify::{self, Suite};
use fractafold::{Error, Result};

#[derive(Parser)]
#[command(name = "fractafold", version, about = "Spectral computations on Sierpinski fractafolds and their graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory; defaults to $FRACTAFOLD_DATA_DIR or the current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-13, value_parser = positive)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Preimage bands and point series for a base spectrum.
    Spectrum {
        #[arg(long, value_enum)]
        model: Model,
        /// Maximal inverse-branch word length (and offset exponent).
        #[arg(long)]
        cutoff: usize,
        /// Grid size for Bloch sweeps.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Base graph JSON for the custom model.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Runs check suites and prints a JSON report; exits nonzero on any failure.
    Verify {
        /// Suites to run (repeatable); all when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Truncations for the Plancherel trend, comma separated.
        #[arg(long = "N", value_delimiter = ',', default_values_t = [200usize, 400])]
        n: Vec<usize>,
    },
    /// Kernel and measure-density dumps.
    Kernel {
        #[arg(long, value_enum, default_value_t = KernelModel::Tree)]
        model: KernelModel,
        /// Spectral values (tree) or base eigenvalues (fractafold).
        #[arg(long, value_delimiter = ',', default_values_t = [3.0])]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        radius: usize,
        /// Samples of the measure density.
        #[arg(long, default_value_t = 4000)]
        grid: usize,
        /// Inverse-branch word for the fractafold kernel, e.g. "HL".
        #[arg(long, default_value = "H")]
        word: String,
    },
    /// Resolution of the identity on a tree ball applied to a delta.
    Resolve {
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        #[arg(long)]
        edge_graph: bool,
    },
    /// Round-trip decomposition of a random 6-eigenfunction on a honeycomb edge graph.
    E6 {
        #[arg(long, default_value_t = 7)]
        radius: usize,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Backward orbit of the repelling fixed point and its preimages.
    Julia {
        #[arg(long, default_value_t = 6)]
        cutoff: usize,
        #[arg(long, default_value_t = 3)]
        words: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Tree,
    Ladder,
    Honeycomb,
    TriangularField,
    Custom,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KernelModel {
    Tree,
    Fractafold,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        let dir = dir.or_else(|| std::env::var_os("FRACTAFOLD_DATA_DIR").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.path(name)).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(&r).map_err(io)?;
        }
        w.flush()?;
        eprintln!("wrote {}", self.path(name).display());
        Ok(())
    }

    fn json(&self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        fs::write(self.path(name), serde_json::to_string_pretty(value)? + "\n")?;
        eprintln!("wrote {}", self.path(name).display());
        Ok(())
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn spectrum(out: &Out, model: Model, cutoff: usize, grid: usize, graph: Option<&Path>, tol: f64) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    let cut = Cutoff { max_m0: cutoff as u32, max_word_len: cutoff };
    let sigma0 = match model {
        Model::Tree => Sigma0 { bands: vec![[tree::BAND_LO, tree::BAND_HI]], points: vec![6.0] },
        Model::Ladder | Model::Honeycomb => Sigma0 { bands: vec![[0.0, 6.0]], points: vec![6.0] },
        Model::TriangularField => {
            let r = triangular_field_bands(cutoff, &[6, 12])?;
            out.json("triangular_field.json", &r)?;
            return Ok(());
        }
        Model::Custom => {
            let path = graph.ok_or(Error::InvalidArgument("--graph is required for the custom model".into()))?;
            let j: GraphJson = serde_json::from_str(&fs::read_to_string(path)?)?;
            let g = CellGraph::try_from(j)?;
            let values = brute_spectrum(&g, LaplacianKind::Graph)?.values;
            let points = ff::cluster_values(&values, 1e-9).into_iter().map(|c| c.0).collect();
            Sigma0 { bands: vec![], points }
        }
    };
    if let Model::Honeycomb = model {
        let rows = (0..grid).flat_map(|i| {
            (0..grid).map(move |j| {
                let (u, v) = (i as f64 / grid as f64, j as f64 / grid as f64);
                let s = honeycomb_symbol(u, v);
                vec![num(u), num(v), num(s.lambda_plus), num(s.lambda_minus)]
            })
        });
        out.csv("bloch.csv", &["u", "v", "lambda_plus", "lambda_minus"], rows)?;
    }
    let report = ff::fractafold_spectrum(&sigma0, cut, tol)?;
    out.json("spectrum.json", &report)?;
    out.csv("bands.csv", &["lo", "hi", "generation"], report.bands.iter().map(|b| vec![num(b.lo), num(b.hi), b.generation.to_string()]))?;
    out.csv(
        "points.csv",
        &["value", "series", "m0", "lower"],
        report.points.iter().map(|p| vec![num(p.value), p.series.clone(), p.m0.to_string(), p.lower.to_string()]),
    )
}

fn parse_word(s: &str) -> Result<Vec<Branch>> {
    s.chars()
        .map(|c| match c {
            'L' | 'l' => Ok(Branch::Lo),
            'H' | 'h' => Ok(Branch::Hi),
            _ => Err(Error::InvalidArgument(format!("word letter `{c}` is not L or H"))),
        })
        .collect()
}

fn kernel(out: &Out, model: KernelModel, lambdas: &[f64], radius: usize, grid: usize, word: &str, tol: f64) -> Result<bool> {
    if model == KernelModel::Fractafold {
        let mesh = FractafoldMesh::new(edge_graph(&build_graph(Family::K4)?)?, 2)?;
        let base = mesh.base();
        let s0 = brute_spectrum(base, LaplacianKind::Graph)?;
        let w0 = ff::vertex_weights(base, 0)[0];
        let word = parse_word(word)?;
        for &mu in lambdas {
            let cols: Vec<usize> = (0..s0.values.len()).filter(|&i| (s0.values[i] - mu).abs() < 1e-9).collect();
            if cols.is_empty() {
                return Err(Error::InvalidArgument(format!("{mu} is not an eigenvalue of the octahedral base")));
            }
            let v = s0.vectors.select_columns(&cols);
            let p0: DMatrix<f64> = (&v * v.transpose()) / w0;
            let a = EigenvalueAddress::resolved(&DecimationPolynomial::GASKET, 0, mu, word.clone(), tol)?;
            let n = mesh.finest().len();
            let mut rows = Vec::with_capacity(n * n);
            for y in 0..n {
                let col = ff::fractafold_kernel_column(&mesh, &a, &p0, y)?;
                rows.extend(col.into_iter().enumerate().map(|(x, val)| vec![x.to_string(), y.to_string(), num(val)]));
            }
            out.csv(&format!("fractafold_kernel_{mu}.csv"), &["x", "y", "value"], rows)?;
        }
        return Ok(true);
    }
    for &lam in lambdas {
        let p = TreeParameter::from_lambda(lam)?;
        let rows = (0..=radius)
            .map(|d| Ok(vec![d.to_string(), num(tree::kernel_radial(Level::Gamma, &p, d)?), num(tree::kernel_radial(Level::Gamma0, &p, d)?)]))
            .collect::<Result<Vec<_>>>()?;
        out.csv(&format!("tree_kernel_{lam}.csv"), &["distance", "gamma", "gamma0"], rows)?;
    }
    let h = tree::T_MAX / grid as f64;
    let samples: Vec<(f64, f64, f64)> = (0..=grid)
        .map(|i| {
            let t = i as f64 * h;
            let lam = TreeParameter { t }.lambda();
            (t, lam, tree::density_t(t))
        })
        .collect();
    let trapezoid: f64 = samples.windows(2).map(|w| (w[0].2 + w[1].2) * h / 2.0).sum();
    out.csv("measure_density.csv", &["t", "lambda", "density_t"], samples.iter().map(|s| vec![num(s.0), num(s.1), num(s.2)]))?;
    let ok = (trapezoid - 1.0).abs() <= 1e-6;
    println!("{}", serde_json::json!({ "trapezoid_mass": trapezoid, "within_1e-6": ok }));
    Ok(ok)
}

fn resolve(out: &Out, radius: usize, vertex: usize, on_edge_graph: bool, tol: f64) -> Result<()> {
    let mut g = build_graph(Family::TreeBall { radius })?;
    let level = if on_edge_graph {
        g = edge_graph(&g)?;
        Level::Gamma0
    } else {
        Level::Gamma
    };
    if vertex >= g.len() {
        return Err(Error::InvalidArgument(format!("vertex {vertex} outside the ball")));
    }
    let u = tree::resolve_identity(level, &g, &[(vertex, 1.0)], tol.max(1e-12))?;
    let d = g.distances_from(vertex);
    out.csv("resolve.csv", &["vertex", "distance", "value"], u.iter().enumerate().map(|(x, v)| vec![x.to_string(), d[x].to_string(), num(*v)]))
}

fn e6(out: &Out, radius: usize, terms: usize, seed: u64) -> Result<bool> {
    let patch = HexPatch::new(radius)?;
    let span = (radius as i64 - 3).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = BTreeMap::new();
    for _ in 0..terms {
        let c = rng.gen_range(-5..=5);
        if c != 0 {
            coeffs.insert((rng.gen_range(-span..span), rng.gen_range(-span..span)), c as f64);
        }
    }
    let u = patch.compose(&coeffs)?;
    let got = patch.decompose(&u)?;
    out.csv("e6_decomposition.csv", &["j", "k", "coefficient"], got.iter().map(|((j, k), c)| vec![j.to_string(), k.to_string(), num(*c)]))?;
    let exact = got.into_iter().collect::<BTreeMap<_, _>>() == coeffs;
    println!("{}", serde_json::json!({ "terms": coeffs.len(), "exact_round_trip": exact }));
    Ok(exact)
}

fn julia(out: &Out, depth: usize, words: usize, tol: f64) -> Result<()> {
    let orbit = fractafold::decimation::julia_backward_orbit(&DecimationPolynomial::GASKET, depth)?;
    out.csv("julia_orbit.csv", &["value"], orbit.iter().map(|&x| vec![num(x)]))?;
    let pts = ff::barlow_perkins_points(depth, words, tol)?;
    out.csv("julia_preimages.csv", &["value", "label"], pts.iter().map(|p| vec![num(p.value), p.series.clone()]))
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(w) = cli.common.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global().map_err(|e| Error::Io(e.to_string()))?;
    }
    let tol = cli.common.tol;
    match cli.command {
        Command::Verify { suites, n } => {
            let chosen = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
                    .iter()
                    .map(|s| Suite::from_name(s).ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`"))))
                    .collect::<Result<Vec<_>>>()?
            };
            if n.len() < 2 || n.contains(&0) {
                return Err(Error::InvalidArgument("--N needs at least two positive truncations".into()));
            }
            let report = verify::run(&chosen, &verify::Options { plancherel_n: n, seed: cli.common.seed });
            let text = serde_json::to_string_pretty(&report)? + "\n";
            if let Some(dir) = &cli.common.out {
                let out = Out::new(Some(dir.clone()))?;
                fs::write(out.path("verify.json"), &text)?;
            }
            print!("{text}");
            Ok(report.passed)
        }
        Command::Spectrum { model, cutoff, grid, graph } => {
            spectrum(&Out::new(cli.common.out)?, model, cutoff, grid.max(1), graph.as_deref(), tol).map(|_| true)
        }
        Command::Kernel { model, lambda, radius, grid, word } => kernel(&Out::new(cli.common.out)?, model, &lambda, radius, grid.max(2), &word, tol),
        Command::Resolve { radius, vertex, edge_graph } => resolve(&Out::new(cli.common.out)?, radius, vertex, edge_graph, tol).map(|_| true),
        Command::E6 { radius, terms } => e6(&Out::new(cli.common.out)?, radius, terms, cli.common.seed),
        Command::Julia { cutoff, words } => julia(&Out::new(cli.common.out)?, cutoff, words, tol).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
