use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ace_bf::calibration::{fit_uninformative, loo_group_fit, loo_informative_priors, ExaminerModel, GroupDataset};
use ace_bf::io::{aggregate, export_results, parse_records, write_records, Dataset, ExportFormat, RecordFormat};
use ace_bf::model::{expected_theta, posterior_update, BetaHyper, ResponseCategory, TruthLabel};
use ace_bf::numerics::{density_curve, posterior_mean_oracle};
use ace_bf::report::{curve_file, swarm_data, ConversionTable, CurveStage};
use ace_bf::sim::{synthesize, SimConfig};
use ace_bf::{fit_examiner, Error, Result};

#[derive(Parser)]
#[command(name = "ace-bf", version, about = "Convert ID/IN/EX examiner conclusions to Bayes factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit each examiner with uninformative priors
    Fit(FitArgs),
    /// Fit each examiner with leave-one-out informative priors from the group
    Loocv(FitArgs),
    /// Emit the conversion table and swarm-chart data
    Table(FitArgs),
    /// Write prior and posterior density curves for one examiner and category
    Curves(CurveArgs),
    /// Check closed-form posterior means against numerical integration
    OracleCheck(OracleArgs),
    /// Generate a synthetic records file from a simulation config
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Condition-set label; defaults to the input file stem
    #[arg(long)]
    condition: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory for output files; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    prior: Option<PriorArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tabular)]
    format: FormatArg,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    examiner: String,
    #[arg(long, default_value = "ID", value_parser = parse_category)]
    category: ResponseCategory,
    #[arg(long, value_enum, default_value_t = PriorArg::Uninformative)]
    prior: PriorArg,
    #[arg(long, default_value_t = 999)]
    grid: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation config
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PriorArg {
    Uninformative,
    Informative,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Structured,
    Tabular,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Structured => ExportFormat::Structured,
            FormatArg::Tabular => ExportFormat::Tabular,
        }
    }
}

fn parse_category(s: &str) -> std::result::Result<ResponseCategory, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => run_fit(args, PriorArg::Uninformative),
        Command::Loocv(args) => run_fit(args, PriorArg::Informative),
        Command::Table(args) => run_table(args),
        Command::Curves(args) => run_curves(args),
        Command::OracleCheck(args) => run_oracle(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(input: &InputArgs) -> Result<Dataset> {
    if !input.delimiter.is_ascii() {
        return Err(Error::InvalidConfig(format!("--delimiter must be a single ASCII character, got {:?}", input.delimiter)));
    }
    let label = input.condition.clone().unwrap_or_else(|| {
        input.input.file_stem().map_or_else(|| "default".to_owned(), |s| s.to_string_lossy().into_owned())
    });
    let file = fs::File::open(&input.input)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", input.input.display()))))?;
    parse_records(file, RecordFormat { delimiter: input.delimiter as u8 }, &label)
}

fn fit_all(ds: &Dataset, prior: PriorArg) -> Result<Vec<ExaminerModel>> {
    let tables = aggregate(ds);
    match prior {
        PriorArg::Uninformative => tables.iter().map(|(id, t)| fit_uninformative(id, t)).collect(),
        PriorArg::Informative => loo_group_fit(&GroupDataset::new(ds.condition_label(), tables)?),
    }
}

fn emit(output: Option<&Path>, name: &str, content: &str) -> Result<()> {
    match output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn run_fit(args: FitArgs, default_prior: PriorArg) -> Result<()> {
    let ds = load(&args.input)?;
    let models = fit_all(&ds, args.prior.unwrap_or(default_prior))?;
    let format = ExportFormat::from(args.format);
    let name = match format {
        ExportFormat::Structured => "results.json",
        ExportFormat::Tabular => "results.csv",
    };
    emit(args.output.as_deref(), name, &export_results(&models, format)?)
}

fn run_table(args: FitArgs) -> Result<()> {
    let ds = load(&args.input)?;
    let models = fit_all(&ds, args.prior.unwrap_or(PriorArg::Uninformative))?;
    let table = ConversionTable::from_models(ds.condition_label(), &models)?;
    match args.format {
        FormatArg::Tabular => emit(args.output.as_deref(), "conversion_table.csv", &table.to_csv()?)?,
        FormatArg::Structured => {
            let text = serde_json::to_string_pretty(&table)? + "\n";
            emit(args.output.as_deref(), "conversion_table.json", &text)?;
        }
    }
    if let Some(dir) = args.output.as_deref() {
        emit(Some(dir), "swarm.csv", &swarm_data(&models)?.to_csv()?)?;
    }
    Ok(())
}

fn run_curves(args: CurveArgs) -> Result<()> {
    let ds = load(&args.input)?;
    let tables = aggregate(&ds);
    let table = tables
        .iter()
        .find(|(id, _)| *id == args.examiner)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownExaminer(args.examiner.clone()))?;
    let model = match args.prior {
        PriorArg::Uninformative => fit_uninformative(&args.examiner, &table)?,
        PriorArg::Informative => {
            let group = GroupDataset::new(ds.condition_label(), tables.clone())?;
            fit_examiner(&args.examiner, &table, &loo_informative_priors(&group, &args.examiner)?)?
        }
    };
    for truth in TruthLabel::ALL {
        for (stage, hyper) in [
            (CurveStage::Prior, model.priors.get(args.category, truth)),
            (CurveStage::Posterior, model.posteriors.get(args.category, truth)),
        ] {
            let curve = density_curve(hyper, args.grid)?;
            let text = curve_file(&args.examiner, args.category, truth, stage, &curve);
            let name = format!("{}_{}_{}_{}.csv", args.examiner, args.category.code(), truth.code(), stage.name());
            emit(args.output.as_deref(), &name, &text)?;
        }
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = 0.0f64;
    for _ in 0..args.cases {
        let prior = BetaHyper::new(rng.gen_range(0.1..=20.0), rng.gen_range(0.1..=20.0))?;
        let total = rng.gen_range(0..=50u64);
        let count = rng.gen_range(0..=total);
        let quad = posterior_mean_oracle(prior, count, total, args.grid)?;
        let closed = expected_theta(posterior_update(prior, count, total)?);
        worst = worst.max((quad - closed).abs());
    }
    println!("cases={} grid={} seed={} max_abs_error={worst:e} tolerance={:e}", args.cases, args.grid, args.seed, args.tolerance);
    if worst <= args.tolerance {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Error::Domain { what: "oracle disagreement", value: worst })
    }
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let mut config = SimConfig::from_json(&fs::read_to_string(&args.config)?)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let ds = synthesize(&config)?;
    emit(args.output.as_deref(), "records.csv", &write_records(ds.records())?)
}
