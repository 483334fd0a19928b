//! The `cobordia` command line.
//!
//! Exit codes: 0 on success, 1 when the input fails to parse or validate,
//! 2 when a computation fails, 3 when `oracle-check` finds a mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alpha::{alpha_complex, label_slices, AlphaComplex, PointCloud, PointFormat, SliceSpec};
use crate::cobordism::{CobordismPair, CobordismReport};
use crate::complex::{Block, FilteredComplex, LoadError};
use crate::dual::{dual_tunnels, dualize, slab_selection, DualOptions};
use crate::kernel::kernel_pairs;
use crate::oracle::{oracle_barcode_limited, OracleBar, DEFAULT_SIZE_LIMIT};
use crate::{fixtures, report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COBORDIA_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "cobordia",
    version,
    about = "Barcodes and representatives of tunnels between two subcomplexes",
    after_help = "Set COBORDIA_THREADS to cap the number of worker threads."
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a complex file and list every violation.
    Validate {
        /// Complex JSON file.
        input: PathBuf,
    },
    /// Build the labeled alpha complex of a point cloud and write it as complex JSON.
    Alpha {
        #[command(flatten)]
        input: InputArgs,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Kernel persistence of the inclusions of A, B and A∪B.
    Kernel {
        #[command(flatten)]
        input: InputArgs,
        /// Blocks to report.
        #[arg(long, value_delimiter = ',', default_values = ["A", "B", "AB"])]
        blocks: Vec<BlockArg>,
        #[command(flatten)]
        filter: DegreeArgs,
        /// CSV output file (stdout if omitted).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cobordism barcode between A and B.
    Cobordism {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: DegreeArgs,
        #[command(flatten)]
        outputs: OutputArgs,
        /// Sweep the slab width over start:stop:step (point input only); adds an epsilon column.
        #[arg(long, value_parser = parse_sweep, conflicts_with_all = ["representatives", "svg"])]
        epsilon_sweep: Option<Sweep>,
    },
    /// Tunnels through the void of a point cloud, via the Voronoi dual, in radius units.
    Dual {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        outputs: OutputArgs,
        /// Keep dual cells of hull simplices, which reach infinity.
        #[arg(long)]
        include_unbounded: bool,
    },
    /// Compare the barcode with the brute-force oracle.
    OracleCheck {
        /// Complex JSON files to check.
        inputs: Vec<PathBuf>,
        /// Also check this many seeded random complexes.
        #[arg(long, default_value_t = 0)]
        random: u64,
        /// First seed of the random complexes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest complex the oracle accepts.
        #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
        size_limit: usize,
    },
    /// Write the example complexes and point clouds into a directory.
    Fixtures {
        /// Output directory (created if missing).
        dir: PathBuf,
        /// Seed for the jittered point clouds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Complex JSON.
    ComplexJson,
    /// `x,y[,z]` per line.
    CsvPoints,
    /// XYZ chemistry format; the element column is ignored.
    Xyz,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BlockArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "AB")]
    Ab,
}

impl From<BlockArg> for Block {
    fn from(b: BlockArg) -> Block {
        match b {
            BlockArg::A => Block::A,
            BlockArg::B => Block::B,
            BlockArg::Ab => Block::AB,
        }
    }
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Input file.
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted (.json, .csv, .xyz).
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Coordinate axis along which the slabs A (top) and B (bottom) are cut.
    #[arg(long)]
    pub axis: Option<usize>,
    /// Slab width, in (0, 0.5).
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Remove slab cells of dimension d-1 and their cofaces before computing.
    #[arg(long)]
    pub strip_slabs: bool,
}

#[derive(Args, Debug)]
pub struct DegreeArgs {
    /// Only report these degrees (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub degrees: Vec<usize>,
}

impl DegreeArgs {
    fn keep(&self, degree: usize) -> bool {
        self.degrees.is_empty() || self.degrees.contains(&degree)
    }
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// CSV output file (stdout if omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write representative chains as JSON.
    #[arg(long)]
    pub representatives: Option<PathBuf>,
    /// Write a persistence diagram as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// Values `start + i*step` up to `stop`, allowing for rounding at the end.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        // rounded so that 0.1 + 0.05 prints as 0.15
        (0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err("expected start:stop:step".into());
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let sweep = Sweep {
        start: num(start)?,
        stop: num(stop)?,
        step: num(step)?,
    };
    let finite = [sweep.start, sweep.stop, sweep.step].iter().all(|x| x.is_finite());
    if !finite || sweep.step <= 0.0 || sweep.stop < sweep.start {
        return Err("need step > 0 and stop >= start".into());
    }
    Ok(sweep)
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }

    fn computation(message: impl ToString) -> Self {
        Failure {
            code: EXIT_COMPUTATION,
            message: message.to_string(),
        }
    }
}

impl From<crate::alpha::AlphaError> for Failure {
    fn from(e: crate::alpha::AlphaError) -> Self {
        use crate::alpha::AlphaError::*;
        match e {
            Io { .. } => Failure::computation(e),
            _ => Failure::invalid(e),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::computation(e),
            _ => Failure::invalid(e),
        }
    }
}

enum Loaded {
    Complex(FilteredComplex),
    Points(PointCloud),
}

fn detect_format(path: &Path, format: Option<InputFormat>) -> Result<InputFormat, Failure> {
    if let Some(f) = format {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("json") => Ok(InputFormat::ComplexJson),
        Some("csv") => Ok(InputFormat::CsvPoints),
        Some("xyz") => Ok(InputFormat::Xyz),
        _ => Err(Failure::invalid(format!(
            "cannot infer the format of {}; pass --format",
            path.display()
        ))),
    }
}

fn load(args: &InputArgs) -> Result<Loaded, Failure> {
    match detect_format(&args.input, args.format)? {
        InputFormat::ComplexJson => Ok(Loaded::Complex(FilteredComplex::load(&args.input)?)),
        InputFormat::CsvPoints => Ok(Loaded::Points(PointCloud::load(&args.input, PointFormat::Csv)?)),
        InputFormat::Xyz => Ok(Loaded::Points(PointCloud::load(&args.input, PointFormat::Xyz)?)),
    }
}

fn slice_spec(args: &InputArgs, cloud: &PointCloud, epsilon: f64) -> Result<SliceSpec, Failure> {
    let axis = args.axis.unwrap_or(cloud.dim() - 1);
    Ok(SliceSpec::new(axis, epsilon)?)
}

fn labeled_alpha(
    args: &InputArgs,
    cloud: &PointCloud,
    base: &AlphaComplex,
    epsilon: f64,
) -> Result<AlphaComplex, Failure> {
    let spec = slice_spec(args, cloud, epsilon)?;
    let labeled = label_slices(base, cloud, &spec)?;
    if args.strip_slabs {
        labeled
            .strip_slab_interiors(cloud.dim() - 1)
            .map_err(|r| Failure::invalid(format!("stripped complex is invalid:\n{r}")))
    } else {
        Ok(labeled)
    }
}

fn complex_from(args: &InputArgs) -> Result<FilteredComplex, Failure> {
    match load(args)? {
        Loaded::Complex(c) => {
            if args.strip_slabs {
                let k = c.max_dim().saturating_sub(1);
                crate::alpha::strip_slab_interiors(&c, k)
                    .map(|(c, _)| c)
                    .map_err(|r| Failure::invalid(format!("stripped complex is invalid:\n{r}")))
            } else {
                Ok(c)
            }
        }
        Loaded::Points(cloud) => {
            let base = alpha_complex(&cloud)?;
            Ok(labeled_alpha(args, &cloud, &base, args.epsilon)?.complex)
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::computation(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::computation(format!("cannot write output: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    emit(Some(path), text, &mut std::io::sink())
}

fn cobordism_report(complex: &FilteredComplex) -> Result<CobordismReport, Failure> {
    CobordismReport::compute(complex).map_err(Failure::computation)
}

fn filtered_report(report: &CobordismReport, filter: &DegreeArgs) -> CobordismReport {
    let mut r = report.clone();
    r.pairs.retain(|p| filter.keep(p.degree));
    r
}

fn with_epsilon_column(epsilon: f64, csv: &str, header: bool) -> String {
    let mut out = String::new();
    for (i, line) in csv.lines().enumerate() {
        if i == 0 {
            if header {
                out.push_str("epsilon,");
                out.push_str(line);
                out.push('\n');
            }
        } else {
            out.push_str(&format!("{epsilon},{line}\n"));
        }
    }
    out
}

fn run_cobordism(
    input: &InputArgs,
    filter: &DegreeArgs,
    outputs: &OutputArgs,
    sweep: Option<Sweep>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if let Some(sweep) = sweep {
        let Loaded::Points(cloud) = load(input)? else {
            return Err(Failure::invalid("--epsilon-sweep needs point input"));
        };
        let base = alpha_complex(&cloud)?;
        let mut text = String::new();
        for (i, eps) in sweep.values().into_iter().enumerate() {
            let complex = labeled_alpha(input, &cloud, &base, eps)?.complex;
            let report = cobordism_report(&complex)?;
            let pairs: Vec<&CobordismPair> = report.pairs.iter().filter(|p| filter.keep(p.degree)).collect();
            text.push_str(&with_epsilon_column(eps, &report::bars_csv(pairs), i == 0));
        }
        return emit(outputs.csv.as_deref(), &text, out);
    }
    let complex = complex_from(input)?;
    let report = filtered_report(&cobordism_report(&complex)?, filter);
    if let Some(path) = &outputs.representatives {
        write_file(path, &report::representatives_json(&report, &complex))?;
    }
    if let Some(path) = &outputs.svg {
        let points: Vec<report::DiagramPoint> = report.pairs.iter().map(Into::into).collect();
        write_file(path, &report::persistence_svg(&points, "cobordism barcode"))?;
    }
    emit(outputs.csv.as_deref(), &report::bars_csv(&report.pairs), out)
}

fn run_dual(
    input: &InputArgs,
    outputs: &OutputArgs,
    include_unbounded: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let Loaded::Points(cloud) = load(input)? else {
        return Err(Failure::invalid("dual needs point input (csv or xyz)"));
    };
    let base = alpha_complex(&cloud)?;
    let labeled = labeled_alpha(input, &cloud, &base, input.epsilon)?;
    let spec = slice_spec(input, &cloud, input.epsilon)?;
    let dual = dualize(&labeled.complex, cloud.dim()).map_err(Failure::computation)?;
    let (astar, bstar) = slab_selection(&dual, &labeled, &cloud, &spec);
    let tunnels = dual_tunnels(&dual, &astar, &bstar, DualOptions { include_unbounded })
        .map_err(|e| match e {
            crate::dual::DualError::Invalid(_) => Failure::invalid(e),
            _ => Failure::computation(e),
        })?;
    if let Some(path) = &outputs.representatives {
        write_file(path, &report::representatives_json(&tunnels.report, &tunnels.complex))?;
    }
    if let Some(path) = &outputs.svg {
        // radius units: a tunnel is born at its bottleneck and dies at its merge radius
        let points: Vec<report::DiagramPoint> = tunnels
            .tunnels
            .iter()
            .map(|t| report::DiagramPoint {
                degree: t.pair.degree,
                birth: t.bottleneck_radius,
                death: t.merge_radius,
            })
            .collect();
        write_file(path, &report::persistence_svg(&points, "void tunnels (radius)"))?;
    }
    emit(outputs.csv.as_deref(), &report::dual_csv(&tunnels, &dual.primal), out)
}

fn algorithm_bars(complex: &FilteredComplex) -> Result<Vec<OracleBar>, Failure> {
    let report = cobordism_report(complex)?;
    let mut bars: Vec<OracleBar> = report
        .pairs
        .iter()
        .map(|p| OracleBar {
            degree: p.degree,
            birth_position: p.birth_position,
            death_position: p.death_position,
        })
        .collect();
    bars.sort();
    Ok(bars)
}

fn check_one(
    name: &str,
    complex: &FilteredComplex,
    size_limit: usize,
    out: &mut dyn Write,
) -> Result<bool, Failure> {
    let expected = oracle_barcode_limited(complex, size_limit).map_err(Failure::computation)?;
    let got = algorithm_bars(complex)?;
    let ok = got == expected;
    let line = if ok {
        format!("{name}: ok ({} bars)\n", got.len())
    } else {
        format!("{name}: MISMATCH algorithm {got:?} oracle {expected:?}\n")
    };
    emit(None, &line, out)?;
    Ok(ok)
}

fn run_oracle_check(
    inputs: &[PathBuf],
    random: u64,
    seed: u64,
    size_limit: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if inputs.is_empty() && random == 0 {
        return Err(Failure::invalid("nothing to check: give input files or --random N"));
    }
    let mut all_ok = true;
    for path in inputs {
        let complex = FilteredComplex::load(path)?;
        all_ok &= check_one(&path.display().to_string(), &complex, size_limit, out)?;
    }
    for s in seed..seed + random {
        let complex = fixtures::random_complex(s);
        all_ok &= check_one(&format!("random seed {s}"), &complex, size_limit, out)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn run_fixtures(dir: &Path, seed: u64) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::computation(format!("cannot create {}: {e}", dir.display())))?;
    let complexes = [
        ("cylinder.json", fixtures::cylinder()),
        ("cylinder_top_triangle.json", fixtures::cylinder_with_top_triangle()),
        ("cylinder_middle_triangle.json", fixtures::cylinder_with_middle_triangle()),
        ("two_tunnels.json", fixtures::two_tunnels()),
    ];
    for (name, complex) in complexes {
        write_file(&dir.join(name), &complex.to_json())?;
    }
    write_file(
        &dir.join("cylinder_lattice.csv"),
        &fixtures::cylinder_lattice_cloud(seed).to_csv(),
    )?;
    write_file(&dir.join("channel_2d.csv"), &fixtures::channel_cloud_2d(seed).to_csv())?;
    Ok(())
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    match &config.command {
        Command::Validate { input } => {
            let complex = FilteredComplex::load(input)?;
            emit(
                None,
                &format!(
                    "valid: {} cells, top dimension {}, |A| = {}, |B| = {}\n",
                    complex.len(),
                    complex.max_dim(),
                    complex.count_in(Block::A),
                    complex.count_in(Block::B)
                ),
                out,
            )?;
        }
        Command::Alpha { input, output } => {
            let complex = complex_from(input)?;
            emit(output.as_deref(), &complex.to_json(), out)?;
        }
        Command::Kernel {
            input,
            blocks,
            filter,
            csv,
        } => {
            let complex = complex_from(input)?;
            let mut runs = Vec::new();
            for &b in blocks {
                let mut kp = kernel_pairs(&complex, b.into()).map_err(Failure::computation)?;
                kp.bars.retain(|bar| filter.keep(bar.degree()));
                runs.push(kp);
            }
            emit(csv.as_deref(), &report::kernel_csv(&runs), out)?;
        }
        Command::Cobordism {
            input,
            filter,
            outputs,
            epsilon_sweep,
        } => run_cobordism(input, filter, outputs, *epsilon_sweep, out)?,
        Command::Dual {
            input,
            outputs,
            include_unbounded,
        } => run_dual(input, outputs, *include_unbounded, out)?,
        Command::OracleCheck {
            inputs,
            random,
            seed,
            size_limit,
        } => return run_oracle_check(inputs, *random, *seed, *size_limit, out),
        Command::Fixtures { dir, seed } => run_fixtures(dir, *seed)?,
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(config, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Applies `COBORDIA_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Entry point of the binary: parses `std::env::args` and returns the exit code.
pub fn main() -> i32 {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return EXIT_INVALID;
    }
    run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
