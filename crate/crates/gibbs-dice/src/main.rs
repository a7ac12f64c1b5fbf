//! Command-line front end: fit, predict, goodness-of-fit, bootstrap,
//! simulate and plot, with table/csv/json output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gibbs_dice::datasets::{self, DieData, ExperimentRecord};
use gibbs_dice::plot::{render_xxy_scatter, PlotOptions, PlotSeries};
use gibbs_dice::report::{content_digest, Envelope, OutputFormat};
use gibbs_dice::{
    bootstrap_constant_beta, chi_square_full, chi_square_xxy_with, cuboid_energies, fit_beta,
    fit_beta_global_with, general_energies, gibbs_probabilities, simpson_probabilities,
    simulate_binomial, simulate_multinomial, substream, BootstrapConfig, CuboidSpec,
    EnergyNormalization, EnergyVector, FitOptions, FitResult, GeneralDieSpec, ProbabilityVector,
    TossCounts,
};

#[derive(Parser)]
#[command(
    name = "gibbs-dice",
    version,
    about = "Face-probability modeling for cuboidal and general dice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the inverse temperature beta to a dataset by maximum likelihood
    Fit(FitArgs),
    /// Evaluate face probabilities for a given geometry
    Predict(PredictArgs),
    /// Pearson chi-square goodness of fit and the chi2/m rule
    Gof(GofArgs),
    /// Parametric bootstrap p-value under side-length tolerances
    Bootstrap(BootstrapArgs),
    /// Simulate tosses from the model
    Simulate(SimulateArgs),
    /// Emit an SVG scatter plot of xxy data with fitted model curves
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    HalfDiagonal,
    GeometricMean,
}

impl NormArg {
    fn to_norm(self) -> EnergyNormalization {
        match self {
            NormArg::HalfDiagonal => EnergyNormalization::HalfDiagonal,
            NormArg::GeometricMean => EnergyNormalization::GeometricMean,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Gibbs,
    Simpson,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format (the environment variable sets the default)
    #[arg(long, value_enum, env = "GIBBS_DICE_FORMAT", default_value = "table")]
    format: FormatArg,
}

#[derive(Args)]
struct DatasetArgs {
    /// Bundled dataset: control-I, control-II, budden, heilbronner,
    /// ushape-I, ushape-II
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Experiment file (see the dataset format in the README)
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Energy normalization (defaults to the dataset's convention)
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Cuboid side lengths, e.g. 13x20x23
    #[arg(long, value_name = "S1xS2xS3")]
    cuboid: Option<String>,
    /// Per-state center-of-gravity heights, comma separated
    #[arg(long, value_delimiter = ',', value_name = "H1,..,HK")]
    heights: Option<Vec<f64>>,
    /// Normalization length for --heights
    #[arg(long, requires = "heights")]
    scale: Option<f64>,
    /// xxy-cuboid side lengths, e.g. 15x7.1
    #[arg(long, value_name = "SXxSY")]
    xxy: Option<String>,
    /// Inverse temperature (required for the gibbs model)
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value = "gibbs")]
    model: ModelArg,
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Evaluate the model at this beta
    #[arg(long, conflicts_with = "fit")]
    beta: Option<f64>,
    /// Fit beta by maximum likelihood first
    #[arg(long)]
    fit: bool,
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Relative side-length uncertainty (e.g. 0.05)
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = BootstrapConfig::DEFAULT_ITERATIONS)]
    iterations: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Beta under test (defaults to the maximum-likelihood fit)
    #[arg(long)]
    beta: Option<f64>,
    /// Refit each iteration with the perturbed lengths (sensitivity variant)
    #[arg(long)]
    refit_perturbed: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Cuboid side lengths, e.g. 13x20x23
    #[arg(long, value_name = "S1xS2xS3")]
    cuboid: Option<String>,
    /// Per-state center-of-gravity heights, comma separated
    #[arg(long, value_delimiter = ',', value_name = "H1,..,HK")]
    heights: Option<Vec<f64>>,
    /// Normalization length for --heights
    #[arg(long, requires = "heights")]
    scale: Option<f64>,
    /// xxy-cuboid side lengths, e.g. 15x7.1
    #[arg(long, value_name = "SXxSY")]
    xxy: Option<String>,
    #[arg(long)]
    beta: f64,
    /// Number of tosses
    #[arg(long)]
    tosses: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// Bundled dataset (repeatable)
    #[arg(long = "builtin", value_name = "NAME")]
    builtins: Vec<String>,
    /// Experiment file (repeatable)
    #[arg(long = "file", value_name = "PATH")]
    files: Vec<PathBuf>,
    /// Fit beta per dataset
    #[arg(long, conflicts_with = "beta")]
    fit: bool,
    /// Use this beta for every model curve
    #[arg(long)]
    beta: Option<f64>,
    /// Output SVG path
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Relative side-length uncertainty for the horizontal error bars
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Vertical bars as sqrt(f(1-f)/N) instead of sqrt(f/n_xx)
    #[arg(long)]
    binomial_errors: bool,
    /// Model curve sample count
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    format: OutputArgs,
}

enum AppError {
    Usage(String),
    Data(String),
}

impl From<gibbs_dice::Error> for AppError {
    fn from(e: gibbs_dice::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

type AppResult<T> = Result<T, AppError>;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Predict(args) => run_predict(args),
        Command::Gof(args) => run_gof(args),
        Command::Bootstrap(args) => run_bootstrap(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Plot(args) => run_plot(args),
    };
    match outcome {
        Ok(text) => print!("{text}"),
        Err(AppError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(1);
        }
        Err(AppError::Data(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

// ---------------------------------------------------------------- helpers

fn pct(p: f64) -> String {
    format!("{:.1}", 100.0 * p)
}

fn parse_lengths(raw: &str, expected: usize, flag: &str) -> AppResult<Vec<f64>> {
    let parts: Vec<&str> = raw.split(['x', 'X']).collect();
    if parts.len() != expected {
        return Err(AppError::Usage(format!(
            "{flag} expects {expected} lengths separated by `x`, got `{raw}`"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| AppError::Usage(format!("{flag}: `{}` is not a number", p.trim())))
        })
        .collect()
}

enum Geometry {
    Cuboid(CuboidSpec),
    General(GeneralDieSpec),
    Xxy { sx: f64, sy: f64 },
}

fn resolve_geometry(
    cuboid: &Option<String>,
    heights: &Option<Vec<f64>>,
    scale: &Option<f64>,
    xxy: &Option<String>,
) -> AppResult<Geometry> {
    let given = [cuboid.is_some(), heights.is_some(), xxy.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        return Err(AppError::Usage(
            "specify exactly one geometry: --cuboid, --heights (with --scale), or --xxy"
                .to_string(),
        ));
    }
    if let Some(raw) = cuboid {
        let s = parse_lengths(raw, 3, "--cuboid")?;
        return Ok(Geometry::Cuboid(CuboidSpec::new(s[0], s[1], s[2])?));
    }
    if let Some(h) = heights {
        let scale = scale
            .ok_or_else(|| AppError::Usage("--heights requires --scale <length>".to_string()))?;
        return Ok(Geometry::General(GeneralDieSpec::new(h.clone(), scale)?));
    }
    let raw = xxy.as_ref().expect("one geometry flag is present");
    let s = parse_lengths(raw, 2, "--xxy")?;
    Ok(Geometry::Xxy { sx: s[0], sy: s[1] })
}

/// Dataset plus the echo fields for the output envelope.
struct LoadedDataset {
    record: ExperimentRecord,
    reference: String,
    digest: String,
}

fn load_dataset(args: &DatasetArgs) -> AppResult<LoadedDataset> {
    match (&args.builtin, &args.file) {
        (Some(name), None) => {
            let record = datasets::load_builtin(name)?;
            let digest = content_digest(datasets::builtin_text(name)?.as_bytes());
            Ok(LoadedDataset {
                record,
                reference: format!("builtin:{name}"),
                digest,
            })
        }
        (None, Some(path)) => load_dataset_file(path),
        _ => Err(AppError::Usage(
            "a dataset is required: --builtin <name> or --file <path>".to_string(),
        )),
    }
}

fn load_dataset_file(path: &PathBuf) -> AppResult<LoadedDataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Data(format!("cannot read {}: {e}", path.display())))?;
    let record = datasets::parse_experiment(&text)?;
    Ok(LoadedDataset {
        record,
        reference: format!("file:{}", path.display()),
        digest: content_digest(text.as_bytes()),
    })
}

/// The normalization a dataset is evaluated with, honoring an override where
/// one is meaningful.
fn effective_norm(
    record: &ExperimentRecord,
    requested: Option<NormArg>,
) -> AppResult<EnergyNormalization> {
    match (&record.data, requested) {
        (_, None) => Ok(record.default_normalization()),
        (DieData::General { .. }, Some(_)) => Err(AppError::Usage(
            "general-die datasets carry an explicit normalization scale; --norm does not apply"
                .to_string(),
        )),
        (_, Some(n)) => Ok(n.to_norm()),
    }
}

fn face_energies(record: &ExperimentRecord, norm: EnergyNormalization) -> AppResult<EnergyVector> {
    match &record.data {
        DieData::Cuboid { spec, .. } => Ok(cuboid_energies(spec, norm)?),
        DieData::General { spec, .. } => Ok(general_energies(spec)),
        DieData::XxyFamily(_) => unreachable!("face energies are for face datasets"),
    }
}

fn face_heights(record: &ExperimentRecord) -> Vec<f64> {
    match &record.data {
        DieData::Cuboid { spec, .. } => spec.face_half_heights().to_vec(),
        DieData::General { spec, .. } => spec.heights().to_vec(),
        DieData::XxyFamily(_) => unreachable!(),
    }
}

fn record_counts(record: &ExperimentRecord) -> &TossCounts {
    match &record.data {
        DieData::Cuboid { counts, .. } | DieData::General { counts, .. } => counts,
        DieData::XxyFamily(_) => unreachable!(),
    }
}

fn fit_record(
    record: &ExperimentRecord,
    norm: EnergyNormalization,
) -> AppResult<(FitResult, Option<ProbabilityVector>)> {
    match &record.data {
        DieData::XxyFamily(rows) => {
            let fit = fit_beta_global_with(rows, &FitOptions::default(), norm)?;
            Ok((fit, None))
        }
        _ => {
            let energies = face_energies(record, norm)?;
            let fit = fit_beta(&energies, record_counts(record), &FitOptions::default())?;
            let probs = gibbs_probabilities(&energies, fit.beta_hat)?;
            Ok((fit, Some(probs)))
        }
    }
}

// ---------------------------------------------------------------- fit

fn run_fit(args: FitArgs) -> AppResult<String> {
    let loaded = load_dataset(&args.dataset)?;
    let norm = effective_norm(&loaded.record, args.norm)?;
    let (fit, face_probs) = fit_record(&loaded.record, norm)?;
    let input = json!({
        "dataset": loaded.reference,
        "digest": loaded.digest,
        "normalization": norm.label(),
    });

    match OutputFormat::from(args.out.format) {
        OutputFormat::Json => {
            let rows = fit_rows_json(&loaded.record, norm, &fit, &face_probs)?;
            let env = Envelope::new(
                "fit",
                input,
                json!({
                    "beta_hat": fit.beta_hat,
                    "neg_log_likelihood": fit.neg_log_likelihood,
                    "iterations": fit.iterations,
                    "bracket": [fit.bracket.0, fit.bracket.1],
                    "converged": fit.converged,
                    "at_upper_bound": fit.at_upper_bound,
                    "rows": rows,
                }),
            );
            Ok(format!("{}\n", env.to_json()))
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            writeln!(out, "# command,fit").unwrap();
            writeln!(out, "# dataset,{}", loaded.reference).unwrap();
            writeln!(out, "# digest,{}", loaded.digest).unwrap();
            writeln!(out, "# normalization,{}", norm.label()).unwrap();
            writeln!(out, "# beta_hat,{}", fit.beta_hat).unwrap();
            writeln!(out, "# neg_log_likelihood,{}", fit.neg_log_likelihood).unwrap();
            writeln!(out, "# converged,{}", fit.converged).unwrap();
            match &loaded.record.data {
                DieData::XxyFamily(rows) => {
                    writeln!(out, "sx,sy,N,nxx,f_xx,p_xx").unwrap();
                    for r in rows {
                        let p = gibbs_dice::xxy_pxx_with(r.sx, r.sy, fit.beta_hat, norm)?;
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            r.sx,
                            r.sy,
                            r.n,
                            r.n_xx,
                            r.f_xx(),
                            p
                        )
                        .unwrap();
                    }
                }
                _ => {
                    let probs = face_probs.as_ref().expect("face dataset has probabilities");
                    let energies = face_energies(&loaded.record, norm)?;
                    let heights = face_heights(&loaded.record);
                    let counts = record_counts(&loaded.record);
                    writeln!(out, "face,h,energy,f,p").unwrap();
                    for (i, f) in counts.frequencies().iter().enumerate() {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            i + 1,
                            heights[i],
                            energies[i],
                            f,
                            probs[i]
                        )
                        .unwrap();
                    }
                }
            }
            Ok(out)
        }
        OutputFormat::Table => {
            let mut out = String::new();
            writeln!(out, "dataset         {}", loaded.reference).unwrap();
            writeln!(out, "normalization   {}", norm.label()).unwrap();
            writeln!(out, "beta_hat        {:.4}", fit.beta_hat).unwrap();
            writeln!(out, "-ln L           {:.4}", fit.neg_log_likelihood).unwrap();
            writeln!(out, "converged       {}", fit.converged).unwrap();
            if fit.at_upper_bound {
                writeln!(out, "note            beta ran into the upper bracket edge").unwrap();
            }
            writeln!(out).unwrap();
            match &loaded.record.data {
                DieData::XxyFamily(rows) => {
                    writeln!(
                        out,
                        "{:>8} {:>8} {:>7} {:>7} {:>8} {:>8}",
                        "sx", "sy", "N", "n_xx", "f_xx[%]", "p_xx[%]"
                    )
                    .unwrap();
                    for r in rows {
                        let p = gibbs_dice::xxy_pxx_with(r.sx, r.sy, fit.beta_hat, norm)?;
                        writeln!(
                            out,
                            "{:>8} {:>8} {:>7} {:>7} {:>8} {:>8}",
                            r.sx,
                            r.sy,
                            r.n,
                            r.n_xx,
                            pct(r.f_xx()),
                            pct(p)
                        )
                        .unwrap();
                    }
                }
                _ => {
                    let probs = face_probs.as_ref().expect("face dataset has probabilities");
                    let energies = face_energies(&loaded.record, norm)?;
                    let heights = face_heights(&loaded.record);
                    let counts = record_counts(&loaded.record);
                    writeln!(
                        out,
                        "{:>4} {:>9} {:>9} {:>7} {:>7}",
                        "face", "h", "E", "f[%]", "p[%]"
                    )
                    .unwrap();
                    for (i, f) in counts.frequencies().iter().enumerate() {
                        writeln!(
                            out,
                            "{:>4} {:>9.3} {:>9.4} {:>7} {:>7}",
                            i + 1,
                            heights[i],
                            energies[i],
                            pct(*f),
                            pct(probs[i])
                        )
                        .unwrap();
                    }
                }
            }
            Ok(out)
        }
    }
}

fn fit_rows_json(
    record: &ExperimentRecord,
    norm: EnergyNormalization,
    fit: &FitResult,
    face_probs: &Option<ProbabilityVector>,
) -> AppResult<serde_json::Value> {
    match &record.data {
        DieData::XxyFamily(rows) => {
            let mut out = Vec::new();
            for r in rows {
                let p = gibbs_dice::xxy_pxx_with(r.sx, r.sy, fit.beta_hat, norm)?;
                out.push(json!({
                    "sx": r.sx, "sy": r.sy, "n": r.n, "n_xx": r.n_xx,
                    "f_xx": r.f_xx(), "p_xx": p,
                }));
            }
            Ok(json!(out))
        }
        _ => {
            let probs = face_probs.as_ref().expect("face dataset has probabilities");
            let energies = face_energies(record, norm)?;
            let heights = face_heights(record);
            let counts = record_counts(record);
            let rows: Vec<serde_json::Value> = counts
                .frequencies()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    json!({
                        "face": i + 1, "h": heights[i], "energy": energies[i],
                        "f": f, "p": probs[i],
                    })
                })
                .collect();
            Ok(json!(rows))
        }
    }
}

// ---------------------------------------------------------------- predict

fn run_predict(args: PredictArgs) -> AppResult<String> {
    let geometry = resolve_geometry(&args.cuboid, &args.heights, &args.scale, &args.xxy)?;
    if args.model == ModelArg::Simpson {
        let spec = match geometry {
            Geometry::Cuboid(spec) => spec,
            _ => {
                return Err(AppError::Usage(
                    "the simpson model applies to --cuboid geometries".to_string(),
                ))
            }
        };
        if args.beta.is_some() {
            return Err(AppError::Usage(
                "the simpson model takes no --beta".to_string(),
            ));
        }
        let probs = simpson_probabilities(&spec)?;
        let input = json!({
            "geometry": format!("cuboid {}x{}x{}", spec.s1, spec.s2, spec.s3),
            "model": "simpson",
        });
        return Ok(render_probabilities(
            &args.out,
            input,
            None,
            probs.as_slice(),
        ));
    }

    let beta = args
        .beta
        .ok_or_else(|| AppError::Usage("the gibbs model requires --beta".to_string()))?;
    match geometry {
        Geometry::Cuboid(spec) => {
            let norm = args
                .norm
                .map(NormArg::to_norm)
                .unwrap_or(EnergyNormalization::HalfDiagonal);
            let probs = gibbs_probabilities(&cuboid_energies(&spec, norm)?, beta)?;
            let input = json!({
                "geometry": format!("cuboid {}x{}x{}", spec.s1, spec.s2, spec.s3),
                "model": "gibbs",
                "beta": beta,
                "normalization": norm.label(),
            });
            Ok(render_probabilities(
                &args.out,
                input,
                Some(beta),
                probs.as_slice(),
            ))
        }
        Geometry::General(spec) => {
            if args.norm.is_some() {
                return Err(AppError::Usage(
                    "--heights dice use their explicit --scale; --norm does not apply".to_string(),
                ));
            }
            let probs = gibbs_probabilities(&general_energies(&spec), beta)?;
            let input = json!({
                "geometry": format!("general die, k={}, scale={}", spec.num_states(), spec.scale()),
                "model": "gibbs",
                "beta": beta,
            });
            Ok(render_probabilities(
                &args.out,
                input,
                Some(beta),
                probs.as_slice(),
            ))
        }
        Geometry::Xxy { sx, sy } => {
            let norm = args
                .norm
                .map(NormArg::to_norm)
                .unwrap_or(EnergyNormalization::GeometricMean);
            let p_xx = gibbs_dice::xxy_pxx_with(sx, sy, beta, norm)?;
            let input = json!({
                "geometry": format!("xxy {sx}x{sy}"),
                "model": "gibbs",
                "beta": beta,
                "normalization": norm.label(),
            });
            match OutputFormat::from(args.out.format) {
                OutputFormat::Json => {
                    let env =
                        Envelope::new("predict", input, json!({"p_xx": p_xx, "p_xy": 1.0 - p_xx}));
                    Ok(format!("{}\n", env.to_json()))
                }
                OutputFormat::Csv => Ok(format!("state,p\nxx,{}\nxy,{}\n", p_xx, 1.0 - p_xx)),
                OutputFormat::Table => Ok(format!(
                    "p_xx   {} %\np_xy   {} %\n",
                    pct(p_xx),
                    pct(1.0 - p_xx)
                )),
            }
        }
    }
}

fn render_probabilities(
    out: &OutputArgs,
    input: serde_json::Value,
    beta: Option<f64>,
    probs: &[f64],
) -> String {
    match OutputFormat::from(out.format) {
        OutputFormat::Json => {
            let env = Envelope::new("predict", input, json!({ "probabilities": probs }));
            format!("{}\n", env.to_json())
        }
        OutputFormat::Csv => {
            let mut s = String::from("face,p\n");
            for (i, p) in probs.iter().enumerate() {
                writeln!(s, "{},{}", i + 1, p).unwrap();
            }
            s
        }
        OutputFormat::Table => {
            let mut s = String::new();
            if let Some(b) = beta {
                writeln!(s, "beta   {b}").unwrap();
            }
            writeln!(s, "{:>4} {:>7}", "face", "p[%]").unwrap();
            for (i, p) in probs.iter().enumerate() {
                writeln!(s, "{:>4} {:>7}", i + 1, pct(*p)).unwrap();
            }
            s
        }
    }
}

// ---------------------------------------------------------------- gof

fn run_gof(args: GofArgs) -> AppResult<String> {
    let loaded = load_dataset(&args.dataset)?;
    let norm = effective_norm(&loaded.record, args.norm)?;
    let (beta, fitted) = match (args.beta, args.fit) {
        (Some(b), false) => (b, false),
        (None, true) => (fit_record(&loaded.record, norm)?.0.beta_hat, true),
        _ => {
            return Err(AppError::Usage(
                "exactly one of --beta <value> or --fit is required".to_string(),
            ))
        }
    };
    let gof = match &loaded.record.data {
        DieData::XxyFamily(rows) => chi_square_xxy_with(rows, beta, norm)?,
        _ => {
            let energies = face_energies(&loaded.record, norm)?;
            let probs = gibbs_probabilities(&energies, beta)?;
            chi_square_full(record_counts(&loaded.record), &probs)?
        }
    };
    let verdict = match gof.verdict {
        gibbs_dice::Verdict::Consistent => "consistent",
        gibbs_dice::Verdict::Rejected => "rejected",
    };
    match OutputFormat::from(args.out.format) {
        OutputFormat::Json => {
            let env = Envelope::new(
                "gof",
                json!({
                    "dataset": loaded.reference,
                    "digest": loaded.digest,
                    "normalization": norm.label(),
                    "beta": beta,
                    "beta_fitted": fitted,
                }),
                json!({
                    "chi2": gof.chi2,
                    "m": gof.m,
                    "chi2_per_m": gof.chi2_per_m,
                    "verdict": verdict,
                }),
            );
            Ok(format!("{}\n", env.to_json()))
        }
        OutputFormat::Csv => Ok(format!(
            "beta,chi2,m,chi2_per_m,verdict\n{},{},{},{},{}\n",
            beta, gof.chi2, gof.m, gof.chi2_per_m, verdict
        )),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "dataset      {}", loaded.reference).unwrap();
            writeln!(
                s,
                "beta         {beta:.4}{}",
                if fitted { " (fitted)" } else { "" }
            )
            .unwrap();
            writeln!(s, "chi2         {:.4}", gof.chi2).unwrap();
            writeln!(s, "m            {}", gof.m).unwrap();
            writeln!(s, "chi2/m       {:.4}", gof.chi2_per_m).unwrap();
            writeln!(s, "verdict      {verdict}").unwrap();
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- bootstrap

fn run_bootstrap(args: BootstrapArgs) -> AppResult<String> {
    let loaded = load_dataset(&args.dataset)?;
    let rows = loaded
        .record
        .xxy_rows()
        .ok_or_else(|| {
            AppError::Data("the bootstrap test applies to xxy family datasets".to_string())
        })?
        .to_vec();
    let (beta0, fitted) = match args.beta {
        Some(b) => (b, false),
        None => (
            fit_beta_global_with(
                &rows,
                &FitOptions::default(),
                EnergyNormalization::GeometricMean,
            )?
            .beta_hat,
            true,
        ),
    };
    let cfg = BootstrapConfig {
        iterations: args.iterations,
        epsilon: args.epsilon,
        master_seed: args.seed,
        beta0,
        refit_with_perturbed: args.refit_perturbed,
    };
    let result = bootstrap_constant_beta(&rows, &cfg)?;
    let mean_sim: f64 =
        result.chi2_simulated.iter().sum::<f64>() / result.chi2_simulated.len() as f64;
    match OutputFormat::from(args.out.format) {
        OutputFormat::Json => {
            let env = Envelope::new(
                "bootstrap",
                json!({
                    "dataset": loaded.reference,
                    "digest": loaded.digest,
                    "epsilon": cfg.epsilon,
                    "iterations": cfg.iterations,
                    "master_seed": cfg.master_seed,
                    "beta0": cfg.beta0,
                    "beta0_fitted": fitted,
                    "refit_with_perturbed": cfg.refit_with_perturbed,
                }),
                json!({
                    "p_value": result.p_value,
                    "chi2_observed": result.chi2_observed,
                    "chi2_simulated_mean": mean_sim,
                    "chi2_simulated": result.chi2_simulated,
                }),
            );
            Ok(format!("{}\n", env.to_json()))
        }
        OutputFormat::Csv => Ok(format!(
            "epsilon,iterations,master_seed,beta0,chi2_observed,p_value\n{},{},{},{},{},{}\n",
            cfg.epsilon,
            cfg.iterations,
            cfg.master_seed,
            cfg.beta0,
            result.chi2_observed,
            result.p_value
        )),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "dataset         {}", loaded.reference).unwrap();
            writeln!(s, "epsilon         {}", cfg.epsilon).unwrap();
            writeln!(s, "iterations      {}", cfg.iterations).unwrap();
            writeln!(s, "master_seed     {}", cfg.master_seed).unwrap();
            writeln!(
                s,
                "beta0           {:.4}{}",
                cfg.beta0,
                if fitted { " (fitted)" } else { "" }
            )
            .unwrap();
            writeln!(s, "chi2_observed   {:.4}", result.chi2_observed).unwrap();
            writeln!(s, "chi2_sim_mean   {mean_sim:.4}").unwrap();
            writeln!(s, "p_value         {:.4}", result.p_value).unwrap();
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- simulate

fn run_simulate(args: SimulateArgs) -> AppResult<String> {
    let geometry = resolve_geometry(&args.cuboid, &args.heights, &args.scale, &args.xxy)?;
    let mut rng = substream(args.seed, 0);
    let (counts, input): (Vec<u64>, serde_json::Value) = match geometry {
        Geometry::Cuboid(spec) => {
            let norm = args
                .norm
                .map(NormArg::to_norm)
                .unwrap_or(EnergyNormalization::HalfDiagonal);
            let probs = gibbs_probabilities(&cuboid_energies(&spec, norm)?, args.beta)?;
            let counts = simulate_multinomial(&probs, args.tosses, &mut rng);
            (
                counts,
                json!({
                    "geometry": format!("cuboid {}x{}x{}", spec.s1, spec.s2, spec.s3),
                    "beta": args.beta, "tosses": args.tosses, "seed": args.seed,
                    "normalization": norm.label(),
                }),
            )
        }
        Geometry::General(spec) => {
            if args.norm.is_some() {
                return Err(AppError::Usage(
                    "--heights dice use their explicit --scale; --norm does not apply".to_string(),
                ));
            }
            let probs = gibbs_probabilities(&general_energies(&spec), args.beta)?;
            let counts = simulate_multinomial(&probs, args.tosses, &mut rng);
            (
                counts,
                json!({
                    "geometry": format!("general die, k={}, scale={}", spec.num_states(), spec.scale()),
                    "beta": args.beta, "tosses": args.tosses, "seed": args.seed,
                }),
            )
        }
        Geometry::Xxy { sx, sy } => {
            let norm = args
                .norm
                .map(NormArg::to_norm)
                .unwrap_or(EnergyNormalization::GeometricMean);
            let p = gibbs_dice::xxy_pxx_with(sx, sy, args.beta, norm)?;
            let n_xx = simulate_binomial(p, args.tosses, &mut rng)?;
            (
                vec![n_xx, args.tosses - n_xx],
                json!({
                    "geometry": format!("xxy {sx}x{sy}"),
                    "beta": args.beta, "tosses": args.tosses, "seed": args.seed,
                    "normalization": norm.label(),
                }),
            )
        }
    };
    let is_xxy = args.xxy.is_some();
    match OutputFormat::from(args.out.format) {
        OutputFormat::Json => {
            let results = if is_xxy {
                json!({"n_xx": counts[0], "n_xy": counts[1]})
            } else {
                json!({ "counts": counts })
            };
            Ok(format!(
                "{}\n",
                Envelope::new("simulate", input, results).to_json()
            ))
        }
        OutputFormat::Csv => {
            let mut s = String::new();
            if is_xxy {
                writeln!(s, "state,count\nxx,{}\nxy,{}", counts[0], counts[1]).unwrap();
            } else {
                writeln!(s, "face,count").unwrap();
                for (i, c) in counts.iter().enumerate() {
                    writeln!(s, "{},{c}", i + 1).unwrap();
                }
            }
            Ok(s)
        }
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "beta    {}", args.beta).unwrap();
            writeln!(s, "tosses  {}", args.tosses).unwrap();
            writeln!(s, "seed    {}", args.seed).unwrap();
            if is_xxy {
                writeln!(s, "n_xx    {}", counts[0]).unwrap();
                writeln!(s, "n_xy    {}", counts[1]).unwrap();
            } else {
                writeln!(s, "{:>4} {:>9}", "face", "count").unwrap();
                for (i, c) in counts.iter().enumerate() {
                    writeln!(s, "{:>4} {:>9}", i + 1, c).unwrap();
                }
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- plot

fn run_plot(args: PlotArgs) -> AppResult<String> {
    if args.builtins.is_empty() && args.files.is_empty() {
        return Err(AppError::Usage(
            "at least one dataset is required: --builtin <name> or --file <path>".to_string(),
        ));
    }
    if !args.fit && args.beta.is_none() {
        return Err(AppError::Usage(
            "either --fit or --beta <value> is required".to_string(),
        ));
    }
    let mut loads = Vec::new();
    for name in &args.builtins {
        loads.push(load_dataset(&DatasetArgs {
            builtin: Some(name.clone()),
            file: None,
        })?);
    }
    for path in &args.files {
        loads.push(load_dataset_file(path)?);
    }
    let mut series = Vec::new();
    let mut inputs = Vec::new();
    for loaded in &loads {
        let rows = loaded.record.xxy_rows().ok_or_else(|| {
            AppError::Data(format!(
                "{} is not an xxy family dataset; the scatter plot needs xxy data",
                loaded.reference
            ))
        })?;
        let beta = match args.beta {
            Some(b) => b,
            None => {
                fit_beta_global_with(
                    rows,
                    &FitOptions::default(),
                    EnergyNormalization::GeometricMean,
                )?
                .beta_hat
            }
        };
        let label = if loaded.record.meta.name.is_empty() {
            loaded.reference.clone()
        } else {
            loaded.record.meta.name.clone()
        };
        inputs.push(json!({
            "dataset": loaded.reference,
            "digest": loaded.digest,
            "beta": beta,
        }));
        series.push(PlotSeries {
            label,
            rows: rows.to_vec(),
            beta,
        });
    }
    let opts = PlotOptions {
        epsilon: args.epsilon,
        binomial_errors: args.binomial_errors,
        curve_points: args.points,
    };
    let svg = render_xxy_scatter(&series, &opts)?;
    std::fs::write(&args.out, &svg)
        .map_err(|e| AppError::Data(format!("cannot write {}: {e}", args.out.display())))?;
    let markers = svg.matches("class=\"marker\"").count();
    let curves = svg.matches("class=\"model\"").count();
    match OutputFormat::from(args.format.format) {
        OutputFormat::Json => {
            let env = Envelope::new(
                "plot",
                json!({ "datasets": inputs, "epsilon": opts.epsilon }),
                json!({
                    "path": args.out.display().to_string(),
                    "data_markers": markers,
                    "model_curves": curves,
                }),
            );
            Ok(format!("{}\n", env.to_json()))
        }
        OutputFormat::Csv => Ok(format!(
            "path,data_markers,model_curves\n{},{markers},{curves}\n",
            args.out.display()
        )),
        OutputFormat::Table => Ok(format!(
            "wrote {} ({markers} data markers, {curves} model curves)\n",
            args.out.display()
        )),
    }
}
