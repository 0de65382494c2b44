use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use qopt::bench::{
    cmd_corpus, cmd_run, cmd_sweep, corpus_text, error_json, exit_code, reports_csv, sweep_csv, Algorithm, RunMode,
    RunSpec, SweepGrid, CORPUS_ENV,
};
use qopt::Error;

#[derive(Parser)]
#[command(
    name = "qopt-bench",
    version,
    about = "Seeded optimisation benchmarks with query accounting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one corpus function.
    Run {
        /// JSON run specification; flags below override its fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        function: Option<String>,
        /// Parameter as key=value; value parsed as JSON, else taken as a string.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run every cell of a grid file; one CSV row per cell.
    Sweep {
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// List the function corpus.
    Corpus {
        /// Extra names to list (JSON string array). Defaults to $QOPT_CORPUS_MANIFEST.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Error::InvalidSpec(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).ok();
            Ok(())
        }
    }
}

fn build_spec(
    spec: Option<PathBuf>,
    algorithm: Option<String>,
    function: Option<String>,
    params: Vec<String>,
    seed: Option<u64>,
    mode: Option<String>,
) -> Result<RunSpec, Error> {
    let mut doc = match spec {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<Value>(&text).map_err(|e| Error::InvalidSpec(e.to_string()))?
        }
        None => serde_json::json!({}),
    };
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::InvalidSpec("spec file must hold a JSON object".into()))?;
    if let Some(a) = algorithm {
        a.parse::<Algorithm>()?;
        obj.insert("algorithm".into(), a.into());
    }
    if let Some(f) = function {
        obj.insert("function".into(), f.into());
    }
    if let Some(s) = seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(m) = mode {
        m.parse::<RunMode>()?;
        obj.insert("mode".into(), m.into());
    }
    let map = obj
        .entry("params")
        .or_insert_with(|| Value::Object(Default::default()))
        .as_object_mut()
        .ok_or_else(|| Error::InvalidSpec("params must be an object".into()))?;
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("parameter `{p}` is not key=value")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.to_string(), v);
    }
    RunSpec::from_value(doc)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            spec,
            algorithm,
            function,
            params,
            seed,
            mode,
            out,
            format,
        } => {
            let spec = build_spec(spec, algorithm, function, params, seed, mode)?;
            let report = cmd_run(&spec)?;
            let body = match format {
                Format::Csv => reports_csv(std::slice::from_ref(&report)),
                _ => serde_json::to_string_pretty(&report).expect("reports serialise") + "\n",
            };
            emit(out.as_ref(), &body)
        }
        Command::Sweep { grid, out, format } => {
            let text = std::fs::read_to_string(&grid)
                .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", grid.display())))?;
            let cells = cmd_sweep(&SweepGrid::from_json(&text)?);
            let body = match format {
                Format::Json => {
                    let docs: Vec<Value> = cells
                        .iter()
                        .map(|c| match &c.outcome {
                            Ok(r) => serde_json::to_value(r).expect("reports serialise"),
                            Err(e) => serde_json::json!({ "spec": c.spec, "error": e }),
                        })
                        .collect();
                    serde_json::to_string_pretty(&docs).expect("json") + "\n"
                }
                _ => sweep_csv(&cells),
            };
            emit(out.as_ref(), &body)
        }
        Command::Corpus { manifest, format } => {
            let path = manifest.or_else(|| std::env::var_os(CORPUS_ENV).map(PathBuf::from));
            let entries = cmd_corpus(path.as_deref())?;
            let body = match format {
                Format::Text => corpus_text(&entries),
                _ => serde_json::to_string_pretty(&entries).expect("json") + "\n",
            };
            emit(None, &body)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
