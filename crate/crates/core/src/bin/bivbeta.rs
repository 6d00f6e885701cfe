use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use bivbeta::closure::closure_check;
use bivbeta::density::{density_grid, DEFAULT_GRID_SAMPLES, DEFAULT_M};
use bivbeta::inference::{
    default_pi_star, joint_posterior_with_samples, pi_posterior, posterior_summary,
    predictive_propensity, Coord, DiagnosticData, PriorSpec,
};
use bivbeta::output;
use bivbeta::sampling::{sample_pairs, DEFAULT_MOMENT_SAMPLES};
use bivbeta::survivability::{reproduce_table, MonteCarlo, Table};
use bivbeta::synth::{generate, naive_estimates, true_params, SynthConfig};
use bivbeta::{BetaParams, FamilySpec, RngState, Variant, Which};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "bivbeta",
    version,
    about = "Bivariate beta sampling, densities, screening-test posteriors and survivability tables"
)]
struct Cli {
    /// JSON object of flag values; its entries replace the same flags given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Draw pairs from a family.
    Sample(SampleArgs),
    /// Density values on an m×m grid of cell midpoints.
    Density(DensityArgs),
    /// Grid posterior of sensitivity and specificity.
    Posterior(PosteriorArgs),
    /// Reproduce a survivability table (4, 5 or 6).
    Tables(TablesArgs),
    /// Complement a family and check the result in law.
    ClosureCheck(ClosureArgs),
}

#[derive(Args, Debug, Serialize)]
struct FamilyArgs {
    /// ol-plus, ol-minus, ol-star, an5, an8 or indep
    #[arg(long)]
    family: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alphas: Vec<f64>,
    /// x marginal a,b for indep
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta1: Vec<f64>,
    /// y marginal a,b for indep
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta2: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    /// Draws for histogram-estimated families (an5, an8).
    #[arg(long, default_value_t = DEFAULT_GRID_SAMPLES)]
    mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct PosteriorArgs {
    /// Observed counts n,n1,k1,k2.
    #[arg(long, value_delimiter = ',', conflicts_with = "synth_n")]
    data: Vec<u64>,
    /// Synthesize data of this size instead of passing --data.
    #[arg(long)]
    synth_n: Option<u64>,
    #[arg(long, default_value_t = 0.35)]
    synth_pi: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    synth_mu0: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    synth_mu1: f64,
    #[arg(long, default_value_t = 3.25, allow_negative_numbers = true)]
    synth_t: f64,
    /// Seed for the synthetic data; defaults to --seed.
    #[arg(long)]
    synth_seed: Option<u64>,
    /// Joint prior on (eta, theta).
    #[command(flatten)]
    prior: FamilyArgs,
    /// Beta prior a,b on the prevalence.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pi_prior: Vec<f64>,
    /// Prevalence for the predictive propensities; posterior mean of pi when absent.
    #[arg(long)]
    pi_star: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    /// Draws for histogram-estimated priors (an5, an8).
    #[arg(long, default_value_t = DEFAULT_GRID_SAMPLES)]
    mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the summary JSON here (csv format only).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct TablesArgs {
    #[arg(long)]
    table: u32,
    #[arg(long, default_value_t = DEFAULT_MOMENT_SAMPLES)]
    mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct ClosureArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// x, y or both
    #[arg(long, default_value = "y")]
    which: String,
    #[arg(long, default_value_t = DEFAULT_MOMENT_SAMPLES)]
    mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn pair(v: &[f64], flag: &str) -> CliResult<BetaParams> {
    match v {
        [a, b] => Ok(BetaParams::new(*a, *b)?),
        _ => Err(format!("--{flag} needs two values a,b").into()),
    }
}

impl FamilyArgs {
    fn spec(&self) -> CliResult<FamilySpec> {
        let variant = Variant::parse(&self.family)?;
        if variant == Variant::IndependentBetas {
            if !self.alphas.is_empty() {
                return Err("indep takes --beta1 and --beta2, not --alphas".into());
            }
            return Ok(FamilySpec::independent(
                pair(&self.beta1, "beta1")?,
                pair(&self.beta2, "beta2")?,
            )?);
        }
        if !self.beta1.is_empty() || !self.beta2.is_empty() {
            return Err(format!("{} takes --alphas, not --beta1/--beta2", variant.name()).into());
        }
        Ok(FamilySpec::new(variant, &self.alphas)?)
    }
}

struct Emitter<'a> {
    command: &'static str,
    flags: &'a Cli,
    seed: u64,
}

impl Emitter<'_> {
    fn json(&self, data: Value) -> String {
        let doc = json!({
            "meta": {
                "command": self.command,
                "flags": self.flags,
                "seed": self.seed,
                "version": env!("CARGO_PKG_VERSION"),
            },
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_sample(a: &SampleArgs, em: &Emitter) -> CliResult<String> {
    let family = a.family.spec()?;
    let pairs = sample_pairs(&family, a.n, &RngState::from_seed(a.seed));
    Ok(match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => output::samples_csv(&pairs),
        Format::Json => em.json(json!({
            "family": output::family_json(&family),
            "x": pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
            "y": pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
        })),
    })
}

fn cmd_density(a: &DensityArgs, em: &Emitter) -> CliResult<String> {
    let family = a.family.spec()?;
    let grid = density_grid(&family, a.m, a.mc_samples, &RngState::from_seed(a.seed))?;
    Ok(match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => output::density_csv(&grid),
        Format::Json => em.json(output::density_json(&grid)),
    })
}

fn cmd_posterior(a: &PosteriorArgs, em: &Emitter) -> CliResult<String> {
    let mut truth = None;
    let data = match (a.synth_n, a.data.as_slice()) {
        (Some(n), _) => {
            let cfg = SynthConfig {
                pi: a.synth_pi,
                n,
                mu0: a.synth_mu0,
                mu1: a.synth_mu1,
                t: a.synth_t,
                seed: a.synth_seed.unwrap_or(a.seed),
                stream: 0,
            };
            let (eta, theta) = true_params(&cfg);
            truth = Some(json!({ "pi": cfg.pi, "eta": eta, "theta": theta, "config": cfg }));
            generate(&cfg)?
        }
        (None, [n, n1, k1, k2]) => DiagnosticData::new(*n, *n1, *k1, *k2)?,
        (None, []) => return Err("posterior needs --data n,n1,k1,k2 or --synth-n".into()),
        (None, _) => return Err("--data needs four counts n,n1,k1,k2".into()),
    };
    let prior = PriorSpec {
        eta_theta: a.prior.spec()?,
        pi: pair(&a.pi_prior, "pi-prior")?,
    };
    let gp = joint_posterior_with_samples(
        &data,
        &prior,
        a.m,
        a.mc_samples,
        &RngState::from_seed(a.seed),
    )?;
    let pi_star = a.pi_star.unwrap_or_else(|| default_pi_star(&gp));
    let (pr_d, pr_not_d) = predictive_propensity(&gp, pi_star)?;
    let summary = json!({
        "data": data,
        "truth": truth,
        "naive": naive_estimates(&data).ok(),
        "pi_posterior": pi_posterior(&data, prior.pi),
        "posterior": posterior_summary(&gp),
        "predictive": { "pi_star": pi_star, "disease_given_positive": pr_d, "healthy_given_negative": pr_not_d },
    });
    Ok(match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            if let Some(path) = &a.summary {
                fs::write(path, em.json(summary))?;
            }
            output::posterior_csv(&gp)
        }
        Format::Json => {
            let marg = |c| bivbeta::marginal_posterior(&gp, c);
            em.json(json!({
                "grid": output::posterior_json(&gp),
                "marginals": { "eta": marg(Coord::Eta), "theta": marg(Coord::Theta) },
                "summary": summary,
            }))
        }
    })
}

fn cmd_tables(a: &TablesArgs, em: &Emitter) -> CliResult<String> {
    let table = Table::from_number(a.table)?;
    let mc = MonteCarlo {
        n_samples: a.mc_samples,
        rng: RngState::from_seed(a.seed),
    };
    let rows = reproduce_table(table, Some(&mc))?;
    Ok(match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => output::table_csv(table, &rows),
        Format::Json => em.json(json!({ "table": a.table, "rows": output::table_json(&rows) })),
    })
}

fn cmd_closure(a: &ClosureArgs, em: &Emitter) -> CliResult<String> {
    let family = a.family.spec()?;
    let which = Which::parse(&a.which)?;
    let report = closure_check(&family, which, a.mc_samples, &RngState::from_seed(a.seed))?;
    Ok(match a.output.format.unwrap_or(Format::Json) {
        Format::Csv if report.closed() => output::closure_csv(&report),
        Format::Csv => format!(
            "status\nnot closed: {} under {} complement\n",
            family.variant().name(),
            which.name()
        ),
        Format::Json => em.json(output::closure_json(&report)),
    })
}

/// Splice the entries of a `--config` file into the argument list. Flags the
/// file sets are dropped from the command line first.
fn apply_config(mut args: Vec<String>) -> CliResult<Vec<String>> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let Value::Object(map) =
        serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?
    else {
        return Err(format!("config {path}: expected a JSON object").into());
    };
    let mut extra = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            continue;
        }
        let text = match value {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            other => {
                return Err(format!("config {path}: unsupported value for {key}: {other}").into())
            }
        };
        let mut i = 1;
        while i < args.len() {
            if args[i] == flag {
                args.drain(i..(i + 2).min(args.len()));
            } else if args[i].starts_with(&format!("{flag}=")) {
                args.remove(i);
            } else {
                i += 1;
            }
        }
        extra.push(flag);
        extra.push(text);
    }
    args.extend(extra);
    Ok(args)
}

fn run() -> CliResult<()> {
    let args = apply_config(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(());
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            return Err(line.trim_start_matches("error: ").to_string().into());
        }
    };
    let (command, seed, out) = match &cli.command {
        Command::Sample(a) => ("sample", a.seed, &a.output.out),
        Command::Density(a) => ("density", a.seed, &a.output.out),
        Command::Posterior(a) => ("posterior", a.seed, &a.output.out),
        Command::Tables(a) => ("tables", a.seed, &a.output.out),
        Command::ClosureCheck(a) => ("closure-check", a.seed, &a.output.out),
    };
    let em = Emitter {
        command,
        flags: &cli,
        seed,
    };
    let text = match &cli.command {
        Command::Sample(a) => cmd_sample(a, &em)?,
        Command::Density(a) => cmd_density(a, &em)?,
        Command::Posterior(a) => cmd_posterior(a, &em)?,
        Command::Tables(a) => cmd_tables(a, &em)?,
        Command::ClosureCheck(a) => cmd_closure(a, &em)?,
    };
    write_out(out.as_ref(), &text)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
