//! Command-line front end: loads a TOML run configuration, applies flag
//! overrides and writes CSV/JSON artifacts into the output directory.
//!
//! Precedence, lowest to highest: built-in defaults, the `--config` file,
//! the `WAVECAUSTICS_OUT` environment variable (output directory only),
//! command-line flags.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use wavecaustics::caustics::{detect_caustics, reflection_window, wavefront_slice};
use wavecaustics::config::RunConfig;
use wavecaustics::gallery::{sobolev_sum, GalleryMode};
use wavecaustics::green::GreenEvaluator;
use wavecaustics::harness::{peak_scan, sup_sweep};
use wavecaustics::oscint::{evaluate, van_der_corput_check, PhaseSpec};
use wavecaustics::parametrix::{lagrangian_point, overlap_count, ParametrixEvaluator, WaveOptions};
use wavecaustics::specfun::airy_zeros;
use wavecaustics::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const OUT_ENV: &str = "WAVECAUSTICS_OUT";

#[derive(Parser)]
#[command(name = "wavecaustics", version, about = "Airy-mode propagation, reflected-wave parametrix and caustic diagnostics")]
struct Cli {
    /// TOML run configuration; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides WAVECAUSTICS_OUT and the config file).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Airy zero table (k, omega_k, residual).
    Zeros,
    /// Gallery mode constants, profiles and Sobolev sums.
    Modes,
    /// Exact spectral field on a (t, x, y) grid.
    Propagate,
    /// Reflected-wave sum on a rescaled (T, X, Y) grid, Lagrangian samples, overlap counts.
    Parametrix,
    /// Wavefront slices and swallowtail events of one reflection.
    Caustics,
    /// Sup-norm sweep, envelope constants and peak scan.
    Decay,
    /// Decay of the model oscillatory integrals.
    OscintBench,
}

impl Command {
    fn module(self) -> &'static str {
        match self {
            Command::Zeros => "zeros",
            Command::Modes => "modes",
            Command::Propagate => "propagate",
            Command::Parametrix => "parametrix",
            Command::Caustics => "caustics",
            Command::Decay => "decay",
            Command::OscintBench => "oscint-bench",
        }
    }
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn load_config(cli: &Cli) -> Outcome<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Ok(dir) = std::env::var(OUT_ENV) {
        if !dir.is_empty() {
            cfg.out = dir;
        }
    }
    if let Some(dir) = &cli.out {
        cfg.out = dir.to_string_lossy().into_owned();
    }
    cfg.h = cli.h.unwrap_or(cfg.h);
    cfg.a = cli.a.unwrap_or(cfg.a);
    cfg.d = cli.d.unwrap_or(cfg.d);
    cfg.threads = cli.threads.unwrap_or(cfg.threads);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

/// Writes artifacts, each stamped with the module, the config hash and the version.
struct Sink {
    dir: PathBuf,
    module: &'static str,
    hash: String,
}

impl Sink {
    fn new(cfg: &RunConfig, module: &'static str) -> Outcome<Self> {
        let dir = PathBuf::from(&cfg.out);
        fs::create_dir_all(&dir)?;
        let text = cfg.to_toml();
        let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        let sink = Self { dir, module, hash };
        let mut f = fs::File::create(sink.path("config.toml"))?;
        writeln!(f, "# {}", sink.header())?;
        f.write_all(text.as_bytes())?;
        Ok(sink)
    }

    fn header(&self) -> String {
        format!("module={} config_sha256={} version={VERSION}", self.module, self.hash)
    }

    fn path(&self, name: &str) -> PathBuf {
        let stem = self.module.replace('-', "_");
        self.dir.join(format!("{stem}_{name}"))
    }

    fn csv(&self, name: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<PathBuf> {
        let path = self.path(name);
        let mut file = fs::File::create(&path)?;
        writeln!(file, "# {}", self.header())?;
        let mut w = csv::Writer::from_writer(file);
        let err = |e: csv::Error| Failure::Numeric(format!("csv: {e}"));
        w.write_record(columns).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        w.flush()?;
        Ok(path)
    }

    fn json(&self, name: &str, cfg: &RunConfig, body: impl Serialize) -> Outcome<PathBuf> {
        let path = self.path(name);
        let doc = json!({
            "header": { "module": self.module, "config_sha256": self.hash, "version": VERSION },
            "config": cfg,
            "data": body,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Numeric(format!("json: {e}")))?;
        fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn zeros(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let table = airy_zeros(cfg.zeros.k_max)?;
    let rows = table
        .zeros
        .iter()
        .zip(&table.residuals)
        .enumerate()
        .map(|(i, (w, r))| vec![(i + 1).to_string(), num(*w), num(*r)]);
    Ok(vec![sink.csv("zeros.csv", &["k", "omega_k", "residual"], rows)?])
}

fn modes(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let m = &cfg.modes;
    let list: Vec<GalleryMode> = (1..=m.k_max).map(GalleryMode::new).collect::<Result<_, _>>()?;
    let consts = list.iter().map(|g| vec![g.k.to_string(), num(g.omega_k), num(g.f_k)]);
    let mut out = vec![sink.csv("constants.csv", &["k", "omega_k", "f_k"], consts)?];
    let xs = m.x.points();
    let profiles = list.iter().flat_map(|g| xs.iter().map(move |&x| vec![g.k.to_string(), num(x), num(g.eval(x, m.eta))]));
    out.push(sink.csv("profiles.csv", &["k", "x", "e_k"], profiles)?);
    let l = m.k_max;
    let hi = list.last().map_or(5.0, |g| g.omega_k + 5.0);
    let mut rows = Vec::new();
    for i in 0..=400 {
        let b = -5.0 + (hi + 5.0) * i as f64 / 400.0;
        rows.push(vec![num(b), l.to_string(), num(sobolev_sum(b, l)?)]);
    }
    out.push(sink.csv("sobolev.csv", &["b", "L", "J"], rows)?);
    Ok(out)
}

fn propagate(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let params = cfg.model();
    let p = &cfg.propagate;
    let ts = p.t.points();
    let xs = p.x.points();
    let ys = p.y.points();
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let y_reach = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    let ev = GreenEvaluator::new(params, t_max, t_max * (1.0 + params.a).sqrt() + y_reach + 0.1)?;
    let mut rows = Vec::new();
    for &t in &ts {
        for &x in &xs {
            for &dy in &ys {
                let y = params.front_y(t) + dy;
                let s = ev.propagate(t, x, y)?;
                rows.push(vec![num(t), num(x), num(y), num(s.value.re), num(s.value.im), num(s.value.norm()), num(s.quadrature_error)]);
            }
        }
    }
    let mut out = vec![sink.csv("field.csv", &["t", "x", "y", "re", "im", "abs", "err"], rows)?];
    out.push(sink.json("manifest.json", cfg, json!({ "params": params, "eta_nodes": ev.nodes(), "modes": ev.mode_count() }))?);
    Ok(out)
}

fn parametrix(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let p = &cfg.parametrix;
    let (a, h) = (cfg.a, cfg.h);
    let ts = p.t.points();
    let xs = p.x.points();
    let ys = p.y.points();
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let opts = WaveOptions { cutoffs: p.cutoffs, consts: p.consts, ..WaveOptions::new(t_max) };
    let ev = ParametrixEvaluator::new(a, h, opts)?;
    let points: Vec<(f64, f64)> = ts.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).collect();
    let batch = ev.profiles(&points, 0, ev.n_max, false)?;
    let mut rows = Vec::new();
    for (&(t, x), col) in points.iter().zip(&batch.values) {
        for &y in &ys {
            let v = ev.sample(col, y);
            rows.push(vec![num(t), num(x), num(y), num(v.re), num(v.im), num(v.norm())]);
        }
    }
    let mut out = vec![sink.csv("field.csv", &["T", "X", "Y", "re", "im", "abs"], rows)?];

    let mu_max = (0.999 * p.consts.eps0 / a).sqrt().min(3.0);
    let mut rows = Vec::new();
    for n in 0..=ev.n_max.min(4) {
        for i in 0..=40 {
            let mu = -mu_max + 2.0 * mu_max * i as f64 / 40.0;
            for j in 0..=40 {
                let sigma = -2.0 + 4.0 * j as f64 / 40.0;
                let q = lagrangian_point(a, n, h, 1.0, sigma, mu, p.consts.eps0)?;
                rows.push(vec![num(sigma), num(mu), n.to_string(), num(q.big_x), num(q.big_y), num(q.big_t)]);
            }
        }
    }
    out.push(sink.csv("lagrangian.csv", &["sigma", "mu", "N", "X", "Y", "T"], rows)?);

    let mut rows = Vec::new();
    for &t in &ts {
        for &x in &xs {
            for &y in &ys {
                let set = overlap_count(x, y, t, a, h, &p.consts)?;
                let members: Vec<String> = set.members.iter().map(|n| n.to_string()).collect();
                rows.push(vec![num(t), num(x), num(y), set.count().to_string(), members.join(" ")]);
            }
        }
    }
    out.push(sink.csv("overlap.csv", &["T", "X", "Y", "count", "members"], rows)?);

    // Seeded random probes over the whole rescaled box.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for _ in 0..200 {
        let t = rng.gen_range(0.0..t_max.max(1.0));
        let x = rng.gen_range(0.0..1.0);
        let y = rng.gen_range(-ev.y_extent..ev.y_extent);
        let set = overlap_count(x, y, t, a, h, &p.consts)?;
        rows.push(vec![num(t), num(x), num(y), set.count().to_string()]);
    }
    out.push(sink.csv("overlap_random.csv", &["T", "X", "Y", "count"], rows)?);
    Ok(out)
}

fn caustics(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let (a, h, n) = (cfg.a, cfg.h, cfg.caustics.n);
    let period = 4.0 * (a * (1.0 + a)).sqrt();
    let mut rows = Vec::new();
    for s in cfg.caustics.slices.points() {
        let t = s * period;
        let curve = match wavefront_slice(a, h, n, t) {
            Ok(c) => c,
            Err(Error::EmptySlice) => continue,
            Err(e) => return Err(e.into()),
        };
        for (&(x, y), &(sigma, mu)) in curve.points.iter().zip(&curve.params) {
            rows.push(vec![num(t), num(x), num(y), num(sigma), num(mu), n.to_string()]);
        }
    }
    let mut out = vec![sink.csv("wavefront.csv", &["t", "x", "y", "sigma", "mu", "N"], rows)?];
    let (lo, hi) = reflection_window(a, n);
    let events = detect_caustics(a, h, n, (lo.max(0.05 * period), hi))?;
    let log: Vec<_> = events
        .iter()
        .map(|e| json!({ "kind": e.kind, "t": e.t, "x": e.x, "y": e.y, "N": e.n, "mu": e.mu, "derivatives": e.derivatives }))
        .collect();
    out.push(sink.json("events.json", cfg, log)?);
    Ok(out)
}

fn decay(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let params = cfg.model();
    let mut report = sup_sweep(&params, &cfg.decay.t.points(), cfg.decay.evaluator)?;
    for n in 1..=cfg.decay.n_peaks {
        match peak_scan(&params, n..=n) {
            Ok(p) => report.peaks.extend(p),
            Err(Error::PeakNotFound { n, t_pred }) => eprintln!("decay: no local maximum near t_{n} = {t_pred:.4}"),
            Err(e) => return Err(e.into()),
        }
    }
    let rows = report
        .t_grid
        .iter()
        .zip(&report.sup_values)
        .zip(&report.argmax)
        .map(|((t, s), (x, y))| vec![num(*t), num(*s), num(*x), num(*y)]);
    let mut out = vec![sink.csv("sup.csv", &["t", "sup", "x_argmax", "y_argmax"], rows)?];
    let peaks = report.peaks.iter().map(|p| {
        vec![p.n.to_string(), num(p.t_peak), num(p.predicted), num(p.peak_value), num(p.lower_bound_value)]
    });
    out.push(sink.csv("peaks.csv", &["n", "t_peak", "t_pred", "value", "bound"], peaks)?);
    out.push(sink.json("report.json", cfg, &report)?);
    Ok(out)
}

fn oscint_bench(cfg: &RunConfig, sink: &Sink) -> Outcome<Vec<PathBuf>> {
    let lambdas = cfg.oscint.lambda.points();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for k in 2..=4usize {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0 / k as f64;
        let spec = PhaseSpec::polynomial_with_bump(coeffs, (-1.0, 1.0));
        for &l in &lambdas {
            let v = evaluate(&spec, l)?.value;
            rows.push(vec![k.to_string(), num(l), num(v.norm()), num(v.arg())]);
        }
        if lambdas.len() >= 4 {
            fits.push(van_der_corput_check(&spec, k, 0.5, &lambdas)?);
        }
    }
    let mut out = vec![sink.csv("decay.csv", &["k", "lambda", "modulus", "phase_arg"], rows)?];
    out.push(sink.json("fits.json", cfg, &fits)?);
    Ok(out)
}

fn run(cli: &Cli) -> Outcome<Vec<PathBuf>> {
    let cfg = load_config(cli)?;
    if cfg.threads > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let sink = Sink::new(&cfg, cli.command.module())?;
    match cli.command {
        Command::Zeros => zeros(&cfg, &sink),
        Command::Modes => modes(&cfg, &sink),
        Command::Propagate => propagate(&cfg, &sink),
        Command::Parametrix => parametrix(&cfg, &sink),
        Command::Caustics => caustics(&cfg, &sink),
        Command::Decay => decay(&cfg, &sink),
        Command::OscintBench => oscint_bench(&cfg, &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
