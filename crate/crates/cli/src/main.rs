mod config;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use traubdyn::basins::{
    raster_stats, render_dynamical_plane, render_dynamical_plane_with_workers, BasinRaster,
    IterSettings,
};
use traubdyn::colour::basin_colour;
use traubdyn::maps::{FixedPointClass, FixedPointKind, InfinityClass, MapError, TraubMap};
use traubdyn::paramplane::{param_settings, render_param_plane, render_param_plane_with_workers, ParamKind};
use traubdyn::verify::{check_figure, format_csv, format_table, run_all, FIGURES};
use traubdyn::Complexd;

use config::{ComplexList, ComplexValue, ConfigError, PolySource, RunConfig};
use output::{format_sig, stats_csv, write_ppm};

/// Dynamical and parameter planes of damped Traub root-finding iterations.
#[derive(Parser, Debug)]
#[command(name = "traubdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render the basins of the roots; writes OUT.ppm and OUT.csv.
    RenderDyn(DynArgs),
    /// Render a parameter plane in delta; writes OUT.ppm.
    RenderParam(ParamArgs),
    /// Run the numerical checks, or a single figure check.
    Verify(VerifyArgs),
    /// Print the roots with their multiplicities and multipliers.
    Roots(RootsArgs),
    /// Print the per-class stats CSV of a dynamical plane.
    Stats(DynArgs),
}

#[derive(Args, Debug)]
struct PolyFlags {
    /// JSON file with the same keys as the flags (underscores for dashes); flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coefficients in ascending degree, e.g. "-1,0;0,0;1,0".
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Roots, repeated for multiplicity, e.g. "1,0;-1,0".
    #[arg(long, allow_hyphen_values = true)]
    roots: Option<String>,
    /// Damping parameter as re,im [default: 1,0].
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
}

#[derive(Args, Debug)]
struct PlaneFlags {
    /// Viewport centre as re,im [default: 0,0].
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Viewport width [default: 4].
    #[arg(long, allow_hyphen_values = true)]
    width: Option<f64>,
    /// Pixels across [default: 400].
    #[arg(long)]
    px: Option<usize>,
    /// Pixels down [default: same as --px].
    #[arg(long)]
    px_h: Option<usize>,
    /// Render threads; output does not depend on it.
    #[arg(long, env = "TRAUBDYN_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct IterFlags {
    #[arg(long)]
    max_iter: Option<usize>,
    /// Chordal distance to a root that counts as converged.
    #[arg(long)]
    root_tol: Option<f64>,
    #[arg(long)]
    escape_radius: Option<f64>,
    #[arg(long)]
    cycle_window: Option<usize>,
    /// Retry non-convergent pixels next to root pixels with four times the budget.
    #[arg(long)]
    retry_stalled: bool,
}

#[derive(Args, Debug)]
struct DynArgs {
    #[command(flatten)]
    poly: PolyFlags,
    #[command(flatten)]
    plane: PlaneFlags,
    #[command(flatten)]
    iter: IterFlags,
    /// Output path prefix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    kind: ParamKind,
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    plane: PlaneFlags,
    #[command(flatten)]
    iter: IterFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of fig1, fig3b, fig4, fig5, fig6a, fig6f.
    #[arg(long)]
    figure: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit CSV instead of a table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct RootsArgs {
    #[command(flatten)]
    poly: PolyFlags,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] MapError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Numeric(MapError::DegreeTooLow) => 1,
            CliError::Numeric(_) | CliError::Write { .. } => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }
}

impl PolyFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.coeffs = self.coeffs.clone().map(ComplexList::Text);
        cfg.roots = self.roots.clone().map(ComplexList::Text);
        cfg.delta = self.delta.clone().map(ComplexValue::Text);
    }
}

impl PlaneFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.center = self.center.clone().map(ComplexValue::Text);
        cfg.width = self.width;
        cfg.px = self.px;
        cfg.px_h = self.px_h;
        cfg.workers = self.workers;
    }
}

impl IterFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.max_iter = self.max_iter;
        cfg.root_tol = self.root_tol;
        cfg.escape_radius = self.escape_radius;
        cfg.cycle_window = self.cycle_window;
        cfg.retry_stalled = self.retry_stalled.then_some(true);
    }
}

fn merged(flags: RunConfig, file: Option<&Path>) -> Result<RunConfig, CliError> {
    Ok(match file {
        Some(path) => flags.over(RunConfig::load(path)?),
        None => flags,
    })
}

fn build_map(cfg: &RunConfig) -> Result<TraubMap, CliError> {
    let delta = cfg.delta()?;
    Ok(match cfg.polynomial()? {
        PolySource::Coeffs(p) => TraubMap::new(p, delta)?,
        PolySource::Roots(r) => TraubMap::from_roots(&r, delta)?,
    })
}

fn out_path(cfg: &RunConfig, ext: &str) -> Result<PathBuf, CliError> {
    let prefix = cfg.out.as_ref().ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let mut s = prefix.clone().into_os_string();
    s.push(".");
    s.push(ext);
    Ok(PathBuf::from(s))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let wrap = |source| CliError::Write { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    f(&mut w).and_then(|_| w.flush()).map_err(wrap)
}

fn dyn_config(args: &DynArgs) -> Result<RunConfig, CliError> {
    let mut flags = RunConfig { out: args.out.clone(), ..Default::default() };
    args.poly.apply(&mut flags);
    args.plane.apply(&mut flags);
    args.iter.apply(&mut flags);
    merged(flags, args.poly.config.as_deref())
}

fn render_dyn(cfg: &RunConfig) -> Result<(TraubMap, BasinRaster, IterSettings), CliError> {
    let m = build_map(cfg)?;
    let spec = cfg.plane(Complexd::new(0.0, 0.0), 4.0)?;
    let s = cfg.iter_settings(IterSettings::default())?;
    let r = match cfg.workers()? {
        Some(n) => render_dynamical_plane_with_workers(&m, spec, &s, n),
        None => render_dynamical_plane(&m, spec, &s),
    };
    Ok((m, r, s))
}

fn cmd_render_dyn(args: &DynArgs) -> Result<(), CliError> {
    let cfg = dyn_config(args)?;
    let (ppm, csv) = (out_path(&cfg, "ppm")?, out_path(&cfg, "csv")?);
    let (m, r, s) = render_dyn(&cfg)?;
    let n_roots = m.roots().len();
    let rgb: Vec<u8> = r
        .classes
        .iter()
        .zip(&r.iters)
        .flat_map(|(&cls, &it)| basin_colour(cls, it, n_roots, s.max_iter))
        .collect();
    write_file(&ppm, |w| write_ppm(w, r.spec.px_w, r.spec.px_h, &rgb))?;
    write_file(&csv, |w| w.write_all(stats_csv(&raster_stats(&r)).as_bytes()))?;
    println!("{}\n{}", ppm.display(), csv.display());
    Ok(())
}

fn cmd_stats(args: &DynArgs) -> Result<(), CliError> {
    let cfg = dyn_config(args)?;
    let (_, r, _) = render_dyn(&cfg)?;
    let csv = stats_csv(&raster_stats(&r));
    match &cfg.out {
        Some(_) => {
            let path = out_path(&cfg, "csv")?;
            write_file(&path, |w| w.write_all(csv.as_bytes()))?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_render_param(args: &ParamArgs) -> Result<(), CliError> {
    let mut flags = RunConfig { out: args.out.clone(), ..Default::default() };
    args.plane.apply(&mut flags);
    args.iter.apply(&mut flags);
    let cfg = merged(flags, args.config.as_deref())?;
    let ppm = out_path(&cfg, "ppm")?;
    let spec = cfg.plane(Complexd::new(0.0, 0.0), 4.0)?;
    let s = cfg.iter_settings(param_settings())?;
    let r = match cfg.workers()? {
        Some(n) => render_param_plane_with_workers(args.kind, spec, &s, n),
        None => render_param_plane(args.kind, spec, &s),
    };
    write_file(&ppm, |w| write_ppm(w, spec.px_w, spec.px_h, &r.rgb()))?;
    println!("{}", ppm.display());
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let reports = match &args.figure {
        Some(id) => vec![check_figure(id).ok_or_else(|| {
            CliError::Usage(format!("unknown figure `{id}`; expected one of {}", FIGURES.join(", ")))
        })?],
        None => run_all(args.seed),
    };
    print!("{}", if args.csv { format_csv(&reports) } else { format_table(&reports) });
    match reports.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::VerifyFailed(n)),
    }
}

fn kind_label(c: &FixedPointClass) -> &'static str {
    match c.kind {
        FixedPointKind::Superattracting => "superattracting",
        FixedPointKind::Attracting => "attracting",
        FixedPointKind::Repelling => "repelling",
        FixedPointKind::Indifferent => "indifferent",
    }
}

fn cmd_roots(args: &RootsArgs) -> Result<(), CliError> {
    let mut flags = RunConfig::default();
    args.poly.apply(&mut flags);
    let cfg = merged(flags, args.poly.config.as_deref())?;
    let m = build_map(&cfg)?;
    let g = |x: f64| format_sig(x, 10);
    println!("point,re,im,multiplicity,multiplier_re,multiplier_im,kind");
    for (i, &(a, k)) in m.roots().iter().enumerate() {
        let c = m.root_multiplier(a, k);
        println!(
            "root{i},{},{},{k},{},{},{}",
            g(a.re),
            g(a.im),
            g(c.multiplier.re),
            g(c.multiplier.im),
            kind_label(&c)
        );
    }
    match m.infinity_class() {
        InfinityClass::Fixed(c) => println!(
            "infinity,,,1,{},{},{}",
            g(c.multiplier.re),
            g(c.multiplier.im),
            kind_label(&c)
        ),
        InfinityClass::NotFixed => println!("infinity,,,,,,not-fixed"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::RenderDyn(a) => cmd_render_dyn(a),
        Command::RenderParam(a) => cmd_render_param(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Roots(a) => cmd_roots(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
