use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use effort_svr::pipeline::{
    evaluate_model, load_effort_dataset, load_model, load_projects, parse_param_string,
    predict_effort, result_block, run_full_pipeline, run_pipeline, save_model, EffortInput,
    ParamString, PipelineConfig,
};
use effort_svr::selection::{grid_search, split_test, HyperGrid, SearchConfig};
use effort_svr::ucp::compute_ucp;
use effort_svr::{Error, KernelFamily, Result};

#[derive(Parser)]
#[command(name = "effort-svr", version, about = "Use Case Point sizing and SVR effort estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the UCP breakdown of every project in a descriptor CSV.
    Ucp {
        #[arg(long)]
        projects: PathBuf,
    },
    /// Select hyperparameters (or take --param), train on the training split and save the model.
    Train(RunArgs),
    /// Run the cross-validated grid search and print the validation tables.
    GridSearch(RunArgs),
    /// Score a saved model on a dataset's train and test splits.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 5)]
        stride: usize,
    },
    /// Predict effort from a raw UCP value or from project descriptors.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "projects", required_unless_present = "projects")]
        ucp: Option<f64>,
        #[arg(long)]
        projects: Option<PathBuf>,
    },
    /// Run the whole pipeline and write every artifact plus a manifest.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Effort dataset with a `ucp,effort` header.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = KernelChoice::All)]
    kernel: KernelChoice,
    /// Comma-separated gamma values; `2^k` is accepted.
    #[arg(long, value_parser = parse_number, value_delimiter = ',', default_value = "2^-7,2^-6,2^-5,2^-4,2^-3,2^-2,2^-1,2^0,2^1,2^2,2^3,2^4,2^5,2^6,2^7")]
    grid_gamma: Vec<f64>,
    /// Comma-separated epsilon values.
    #[arg(long, value_parser = parse_number, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
    grid_epsilon: Vec<f64>,
    /// libsvm-style parameter string; bypasses the grid search.
    #[arg(long, allow_hyphen_values = true)]
    param: Option<String>,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Test-set stride.
    #[arg(long, default_value_t = 5)]
    stride: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelChoice {
    Linear,
    Poly,
    Rbf,
    Sigmoid,
    All,
}

impl KernelChoice {
    fn families(self) -> Vec<KernelFamily> {
        match self {
            KernelChoice::Linear => vec![KernelFamily::Linear],
            KernelChoice::Poly => vec![KernelFamily::Polynomial],
            KernelChoice::Rbf => vec![KernelFamily::Rbf],
            KernelChoice::Sigmoid => vec![KernelFamily::Sigmoid],
            KernelChoice::All => KernelFamily::ALL.to_vec(),
        }
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((base, exp)) => {
            let base: f64 = base.trim().parse().map_err(|_| format!("bad base in `{s}`"))?;
            let exp: i32 = exp.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
            base.powi(exp)
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let fixed_params = self.param.as_deref().map(parse_param_string).transpose()?;
        Ok(PipelineConfig {
            kernels: self.kernel.families(),
            grid: HyperGrid {
                gamma_values: self.grid_gamma.clone(),
                epsilon_values: self.grid_epsilon.clone(),
            },
            search: SearchConfig {
                folds: self.folds,
                ..SearchConfig::default()
            },
            stride: self.stride,
            fixed_params,
        })
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_ucp(projects: &Path) -> Result<()> {
    for p in load_projects(projects)? {
        let b = compute_ucp(&p)?;
        println!("{}", p.name);
        println!("{b}");
    }
    Ok(())
}

fn cmd_train(args: &RunArgs) -> Result<()> {
    let data = load_effort_dataset(&args.data)?;
    let outcome = run_pipeline(&data, &args.config()?)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&out)?;
    for k in &outcome.kernels {
        let path = out.join(format!("model_{}.model", k.family.name()));
        save_model(&path, &k.finalized.model)?;
        print!("{}", result_block(k));
        println!("model: {}\n", path.display());
    }
    Ok(())
}

fn cmd_grid_search(args: &RunArgs) -> Result<()> {
    if args.param.is_some() {
        return Err(Error::InvalidInput("grid-search does not take --param".into()));
    }
    let config = args.config()?;
    let scaled = load_effort_dataset(&args.data)?.scaled()?;
    let (train, _) = split_test(&scaled, config.stride)?;
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
    }
    let mut reports = Vec::new();
    for family in &config.kernels {
        info!("searching {family}");
        reports.push(grid_search(&train, *family, &config.grid, &config.search)?);
    }
    for report in &reports {
        println!("{} kernel", report.kernel);
        println!("{}", report.to_table());
        println!("Param:  {}\n", ParamString::from_params(&report.best_params(&config.search)).render_display());
        if let Some(dir) = &args.out {
            write_file(&dir.join(format!("grid_{}.csv", report.kernel.name())), &report.to_csv())?;
        }
    }
    Ok(())
}

fn cmd_evaluate(model: &Path, data: &Path, stride: usize) -> Result<()> {
    let model = load_model(model)?;
    let data = load_effort_dataset(data)?;
    let (train, test) = evaluate_model(&model, &data, stride)?;
    println!("Param:  {}", ParamString::from_params(&model.params).render_display());
    println!("\nTraining set\n{}", train.to_table());
    println!("Test set\n{}", test.to_table());
    Ok(())
}

fn cmd_predict(model: &Path, ucp: Option<f64>, projects: Option<&Path>) -> Result<()> {
    let model = load_model(model)?;
    let inputs: Vec<(String, EffortInput)> = match (ucp, projects) {
        (Some(v), _) => vec![(format!("ucp={v}"), EffortInput::Ucp(v))],
        (None, Some(path)) => load_projects(path)?
            .into_iter()
            .map(|p| (p.name.clone(), EffortInput::Project(p)))
            .collect(),
        (None, None) => return Err(Error::InvalidInput("give --ucp or --projects".into())),
    };
    println!("input,ucp,effort,extrapolated");
    for (label, input) in inputs {
        let p = predict_effort(&model, &input)?;
        println!("{label},{},{},{}", p.ucp, p.effort, p.extrapolated);
    }
    Ok(())
}

fn cmd_report(args: &RunArgs) -> Result<()> {
    let out = args
        .out
        .clone()
        .ok_or_else(|| Error::InvalidInput("report needs --out DIR".into()))?;
    let manifest = run_full_pipeline(&args.data, &args.config()?, &out)?;
    for a in &manifest.artifacts {
        println!("{}  {}", a.sha256, out.join(&a.path).display());
    }
    if let Some(best) = &manifest.best_kernel {
        println!("best kernel by MMRE: {best}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Ucp { projects } => cmd_ucp(projects),
        Command::Train(args) => cmd_train(args),
        Command::GridSearch(args) => cmd_grid_search(args),
        Command::Evaluate { model, data, stride } => cmd_evaluate(model, data, *stride),
        Command::Predict { model, ucp, projects } => cmd_predict(model, *ucp, projects.as_deref()),
        Command::Report(args) => cmd_report(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
