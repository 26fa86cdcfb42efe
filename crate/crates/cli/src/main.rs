//! `clutterloss` command-line front end.

mod config;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use clutterloss::clutter::{class_stat, code_stat, ClutterCategory, HeightStat};
use clutterloss::coverage::{grid_for_bbox, predict_area, CoverageParams};
use clutterloss::eval::{load_measurements, run_evaluation, sweep_table, EvalOptions, EvalReport, Strategy};
use clutterloss::geodesy::GeoPoint;
use clutterloss::kernel::{predict, LinkSpec};
use clutterloss::profile::{extract_profile, ClutterSource};
use clutterloss::raster::{hag, resample, write_ascii_grid, Raster, RasterKind, ResampleMethod};
use clutterloss::{Error, Execution};

use config::{
    load_scheme, parse_method, parse_stat, read_raster, read_text, ClutterArgs, HeightSource, LoadedClutter, SweepAxes,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "clutterloss",
    version,
    about = "Terrain and clutter path-loss prediction and evaluation"
)]
struct Cli {
    /// Run every loop on one thread
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the terrain/clutter profile between two points
    Profile(ProfileCmd),
    /// Predict the median loss of one link
    Predict(PredictCmd),
    /// Predict loss from a transmitter to every cell of a bounding box
    Grid(GridCmd),
    /// Compare predictions with a measurement file
    Evaluate(EvaluateCmd),
    /// Turn a land-cover raster into a clutter height raster
    Cluttermap(ClutterMapCmd),
    /// Coarsen a raster by an integer factor
    Resample(ResampleCmd),
    /// Height-above-ground statistic over one clutter category or code
    Stats(StatsCmd),
    /// Height above ground from a surface and a terrain model
    Hag(HagCmd),
}

#[derive(Args)]
struct Output {
    /// Output file (standard output if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathArgs {
    /// Terrain elevation raster (ESRI ASCII grid)
    #[arg(long)]
    terrain: PathBuf,

    #[command(flatten)]
    clutter: ClutterArgs,

    /// Maximum profile sample spacing in meters
    #[arg(long, default_value_t = 30.0)]
    spacing: f64,
}

#[derive(Args)]
struct RadioArgs {
    /// Transmitter antenna height above ground, meters
    #[arg(long)]
    tx_height: f64,

    /// Receiver antenna height above ground, meters
    #[arg(long)]
    rx_height: f64,

    /// Frequency in MHz
    #[arg(long)]
    freq: f64,
}

#[derive(Args)]
struct ProfileCmd {
    #[command(flatten)]
    path: PathArgs,
    /// Transmitter as `lat,lon`
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    tx: GeoPoint,
    /// Receiver as `lat,lon`
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    rx: GeoPoint,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PredictCmd {
    #[command(flatten)]
    path: PathArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    tx: GeoPoint,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    rx: GeoPoint,
    #[command(flatten)]
    radio: RadioArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GridCmd {
    #[command(flatten)]
    path: PathArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    tx: GeoPoint,
    #[command(flatten)]
    radio: RadioArgs,
    /// `min_lat,min_lon,max_lat,max_lon`
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
    bbox: [f64; 4],
    /// Output cell size in meters
    #[arg(long)]
    cell_m: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EvaluateCmd {
    #[command(flatten)]
    path: PathArgs,
    /// Measurement CSV
    #[arg(long)]
    measurements: PathBuf,
    /// Also break errors down by frequency within each dataset
    #[arg(long)]
    per_frequency: bool,
    /// Error histogram bin width in dB
    #[arg(long, default_value_t = clutterloss::eval::DEFAULT_HISTOGRAM_WIDTH_DB)]
    histogram_width: f64,
    /// Evaluate every height source x spacing combination
    #[arg(long)]
    sweep: bool,
    /// Sweep axes (`stats=` and `spacings=` lines)
    #[arg(long, requires = "sweep")]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ClutterMapCmd {
    /// Land-cover class raster
    #[arg(long)]
    landcover: PathBuf,
    /// esa, nrcan, osm, or a scheme file
    #[arg(long)]
    scheme: String,
    /// Height table file
    #[arg(long)]
    heights: Option<PathBuf>,
    /// Height-above-ground raster, needed with --stat
    #[arg(long, requires = "stat")]
    hag: Option<PathBuf>,
    #[arg(long, value_parser = parse_stat, requires = "hag")]
    stat: Option<HeightStat>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Elevation,
    Height,
    Class,
}

impl From<KindArg> for RasterKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Elevation => RasterKind::ElevationM,
            KindArg::Height => RasterKind::HeightM,
            KindArg::Class => RasterKind::ClassCode,
        }
    }
}

#[derive(Args)]
struct ResampleCmd {
    #[arg(long)]
    input: PathBuf,
    /// What the cells hold; class rasters only allow `max`
    #[arg(long, value_enum, default_value = "height")]
    kind: KindArg,
    #[arg(long)]
    resample_factor: usize,
    #[arg(long, value_parser = parse_method)]
    resample_method: ResampleMethod,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct StatsCmd {
    #[arg(long)]
    hag: PathBuf,
    #[arg(long)]
    landcover: PathBuf,
    #[arg(long)]
    scheme: String,
    /// open, suburban, trees or dense
    #[arg(long, value_parser = parse_category, required_unless_present = "code")]
    category: Option<ClutterCategory>,
    /// A single land-cover code instead of a category
    #[arg(long, conflicts_with = "category")]
    code: Option<i64>,
    #[arg(long, value_parser = parse_stat)]
    stat: HeightStat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HagCmd {
    /// Surface model (tops of buildings and canopy)
    #[arg(long)]
    dsm: PathBuf,
    /// Bare-earth terrain model
    #[arg(long)]
    dtm: PathBuf,
    #[command(flatten)]
    output: Output,
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", p.trim()))
        })
        .collect()
}

fn parse_point(s: &str) -> Result<GeoPoint, String> {
    match parse_floats(s)?.as_slice() {
        &[lat, lon] => GeoPoint::new(lat, lon).map_err(|e| e.to_string()),
        _ => Err("expected `lat,lon`".into()),
    }
}

fn parse_bbox(s: &str) -> Result<[f64; 4], String> {
    parse_floats(s)?
        .try_into()
        .map_err(|_| "expected `min_lat,min_lon,max_lat,max_lon`".to_string())
}

fn parse_category(s: &str) -> Result<ClutterCategory, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, exec: Execution) -> Result<()> {
    match command {
        Command::Profile(c) => cmd_profile(c, exec),
        Command::Predict(c) => cmd_predict(c, exec),
        Command::Grid(c) => cmd_grid(c, exec),
        Command::Evaluate(c) => cmd_evaluate(c, exec),
        Command::Cluttermap(c) => cmd_cluttermap(c),
        Command::Resample(c) => cmd_resample(c, exec),
        Command::Stats(c) => cmd_stats(c),
        Command::Hag(c) => cmd_hag(c),
    }
}

fn emit(output: &Output, bytes: &[u8]) -> Result<()> {
    match &output.out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing `{}`", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .context("writing standard output")
        }
    }
}

fn emit_raster(output: &Output, r: &Raster) -> Result<()> {
    let mut buf = Vec::new();
    write_ascii_grid(r, &mut buf)?;
    emit(output, &buf)
}

/// Rounds valid cells to `decimals` places; nodata passes through.
fn round_cells(r: &Raster, decimals: i32) -> Result<Raster> {
    let scale = 10f64.powi(decimals);
    let values = r
        .values()
        .iter()
        .map(|&v| {
            if r.is_nodata(v) {
                v
            } else {
                (v * scale).round() / scale + 0.0
            }
        })
        .collect();
    Ok(Raster::new(*r.geometry(), r.nodata(), values, r.kind())?)
}

fn db(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Terrain plus the single clutter height map selected by the flags.
struct Inputs {
    terrain: Raster,
    clutter: Option<Raster>,
}

impl Inputs {
    fn load(args: &PathArgs, exec: Execution) -> Result<Self> {
        let terrain = read_raster(&args.terrain, RasterKind::ElevationM, "terrain")?;
        let loaded = args.clutter.load()?;
        let clutter = loaded.height_map(args.clutter.default_source(), resampling(&args.clutter), exec)?;
        Ok(Self { terrain, clutter })
    }

    fn source(&self) -> ClutterSource<'_> {
        self.clutter
            .as_ref()
            .map_or(ClutterSource::None, ClutterSource::Heights)
    }
}

fn resampling(c: &ClutterArgs) -> Option<(usize, ResampleMethod)> {
    c.resample_factor.zip(c.resample_method)
}

fn cmd_profile(c: ProfileCmd, exec: Execution) -> Result<()> {
    let inputs = Inputs::load(&c.path, exec)?;
    let profile = extract_profile(
        &inputs.terrain,
        inputs.source(),
        c.tx,
        c.rx,
        c.path.spacing,
        c.path.clutter.clutter_sampling,
    )?;
    let text = format!(
        "# clutterloss {VERSION} profile tx={} rx={} spacing_m={:.3}\n{}",
        c.tx,
        c.rx,
        profile.spacing_m(),
        profile.to_table()
    );
    emit(&c.output, text.as_bytes())
}

fn cmd_predict(c: PredictCmd, exec: Execution) -> Result<()> {
    let link = LinkSpec::new(c.tx, c.rx, c.radio.tx_height, c.radio.rx_height, c.radio.freq)?;
    let inputs = Inputs::load(&c.path, exec)?;
    let profile = extract_profile(
        &inputs.terrain,
        inputs.source(),
        c.tx,
        c.rx,
        c.path.spacing,
        c.path.clutter.clutter_sampling,
    )?;
    let r = predict(&profile, &link)?;
    let text = format!(
        "distance_m={:.3}\nfspl_db={}\ndiffraction_db={}\nloss_db={}\nregime={}\n",
        link.distance_m(),
        db(r.fspl_db),
        db(r.diffraction_db),
        db(r.loss_db),
        r.regime
    );
    emit(&c.output, text.as_bytes())
}

fn cmd_grid(c: GridCmd, exec: Execution) -> Result<()> {
    let [min_lat, min_lon, max_lat, max_lon] = c.bbox;
    let grid = grid_for_bbox(min_lat, min_lon, max_lat, max_lon, c.cell_m)?;
    let inputs = Inputs::load(&c.path, exec)?;
    let params = CoverageParams {
        tx: c.tx,
        tx_height_agl_m: c.radio.tx_height,
        rx_height_agl_m: c.radio.rx_height,
        freq_mhz: c.radio.freq,
        spacing_m: c.path.spacing,
        clutter_sampling: c.path.clutter.clutter_sampling,
    };
    let losses = predict_area(&inputs.terrain, inputs.source(), &params, grid, exec)?;
    emit_raster(&c.output, &round_cells(&losses, 2)?)
}

fn strategy_label(clutter: &ClutterArgs, source: HeightSource, spacing: f64) -> String {
    let what = if clutter.is_landcover() {
        format!("heights={source}")
    } else if clutter.clutter.is_some() {
        "clutter=surface".to_string()
    } else {
        "clutter=none".to_string()
    };
    let mut label = format!("{what} spacing={spacing}m");
    if let Some((f, m)) = resampling(clutter) {
        label.push_str(&format!(" resample={m:?}x{f}").to_lowercase());
    }
    label
}

fn cmd_evaluate(c: EvaluateCmd, exec: Execution) -> Result<()> {
    let terrain = read_raster(&c.path.terrain, RasterKind::ElevationM, "terrain")?;
    let file =
        File::open(&c.measurements).with_context(|| format!("opening measurements `{}`", c.measurements.display()))?;
    let records = load_measurements(BufReader::new(file))
        .with_context(|| format!("reading measurements `{}`", c.measurements.display()))?;
    let loaded = c.path.clutter.load()?;

    let (sources, spacings) = if c.sweep {
        if !matches!(loaded, LoadedClutter::LandCover { .. }) {
            bail!("--sweep needs land-cover clutter (--clutter with --scheme)");
        }
        let axes = match &c.manifest {
            Some(p) => SweepAxes::parse(&read_text(p, "sweep manifest")?)
                .with_context(|| format!("parsing sweep manifest `{}`", p.display()))?,
            None => SweepAxes::default(),
        };
        (axes.sources, axes.spacings)
    } else {
        (vec![c.path.clutter.default_source()], vec![c.path.spacing])
    };

    let options = EvalOptions {
        histogram_width_db: c.histogram_width,
        per_frequency: c.per_frequency,
        execution: exec,
    };
    let mut reports: Vec<EvalReport> = Vec::new();
    for &source in &sources {
        let map = loaded
            .height_map(source, resampling(&c.path.clutter), exec)
            .with_context(|| format!("building clutter heights for `{source}`"))?;
        let clutter = map.as_ref().map_or(ClutterSource::None, ClutterSource::Heights);
        for &spacing in &spacings {
            let strategy = Strategy {
                label: strategy_label(&c.path.clutter, source, spacing),
                spacing_m: spacing,
                clutter_sampling: c.path.clutter.clutter_sampling,
            };
            let report = run_evaluation(&records, &terrain, clutter, &strategy, &options).map_err(|e| match e {
                Error::Record { index, dataset, source } => anyhow::anyhow!(
                    "measurements `{}` data row {} (dataset {dataset}): {source}",
                    c.measurements.display(),
                    index + 1
                ),
                other => other.into(),
            })?;
            reports.push(report);
        }
    }

    let mut text = format!("# clutterloss {VERSION} evaluate reports={}\n", reports.len());
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        text.push_str(&r.to_key_values());
        for line in r.to_table().lines() {
            text.push_str(&format!("# {line}\n").replace("# \n", "#\n"));
        }
    }
    if reports.len() > 1 {
        text.push('\n');
        for line in sweep_table(&reports).lines() {
            text.push_str(&format!("# {line}\n"));
        }
    }
    emit(&c.output, text.as_bytes())
}

fn cmd_cluttermap(c: ClutterMapCmd) -> Result<()> {
    let args = ClutterArgs {
        clutter: Some(c.landcover),
        scheme: Some(c.scheme),
        heights: c.heights,
        hag: c.hag,
        stat: c.stat,
        clutter_sampling: Default::default(),
        resample_factor: None,
        resample_method: None,
    };
    let map = args
        .load()?
        .height_map(args.default_source(), None, Execution::Sequential)?
        .context("no land cover loaded")?;
    emit_raster(&c.output, &round_cells(&map, 3)?)
}

fn cmd_resample(c: ResampleCmd, exec: Execution) -> Result<()> {
    let r = read_raster(&c.input, c.kind.into(), "input raster")?;
    let out = resample(&r, c.resample_factor, c.resample_method, exec)?;
    emit_raster(&c.output, &round_cells(&out, 3)?)
}

fn cmd_stats(c: StatsCmd) -> Result<()> {
    let hag_r = read_raster(&c.hag, RasterKind::HeightM, "height above ground")?;
    let landcover = read_raster(&c.landcover, RasterKind::ClassCode, "land cover")?;
    let scheme = load_scheme(&c.scheme)?;
    let (what, value) = match (c.code, c.category) {
        (Some(code), _) => (
            format!("code={code}"),
            code_stat(&hag_r, &landcover, &scheme, code, c.stat)?,
        ),
        (None, Some(cat)) => (
            format!("category={cat}"),
            class_stat(&hag_r, &landcover, &scheme, cat, c.stat)?,
        ),
        (None, None) => bail!("either --category or --code is required"),
    };
    let text = format!("{what}\nstat={}\nheight_m={value:.3}\n", c.stat);
    emit(&c.output, text.as_bytes())
}

fn cmd_hag(c: HagCmd) -> Result<()> {
    let dsm = read_raster(&c.dsm, RasterKind::ElevationM, "surface model")?;
    let dtm = read_raster(&c.dtm, RasterKind::ElevationM, "terrain model")?;
    emit_raster(&c.output, &round_cells(&hag(&dsm, &dtm)?, 3)?)
}
