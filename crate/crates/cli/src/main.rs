use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use bvmpa::campaign::{run_campaign_with, CampaignConfig, CodewordSource, LoadedArtifacts};
use bvmpa::density::{build_iteration_tables, build_state_tables};
use bvmpa::message::{W2lTable, DEFAULT_L_MAX};
use bvmpa::schedule::{optimize, tables_for_schedule};
use bvmpa::{ChannelParams, DeEngine, DecoderMode, LdpcCode};

#[derive(Parser)]
#[command(
    name = "bvmpa",
    version,
    about = "Adaptive binary vector message passing for regular LDPC codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a regular LDPC code and write it as an alist file.
    MakeCode {
        #[command(flatten)]
        opts: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run density evolution at the design SNR and write W2L tables.
    BuildTables {
        #[command(flatten)]
        opts: Overrides,
        /// Directory receiving iteration_tables.json, state_tables.json and de_trace.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Optimize per-state message lengths and write the schedule with its tables.
    Optimize {
        #[command(flatten)]
        opts: Overrides,
        /// Directory receiving schedule.json and adaptive_tables.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Monte-Carlo BER and complexity campaign.
    Simulate {
        #[command(flatten)]
        opts: Overrides,
    },
    /// Check W2L table files for consistency.
    ValidateTables {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

/// Campaign file plus per-field flag overrides.
#[derive(Args, Default)]
struct Overrides {
    /// TOML campaign configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dv: Option<usize>,
    #[arg(long)]
    dc: Option<usize>,
    #[arg(long)]
    code_seed: Option<u64>,
    #[arg(long)]
    alist: Option<PathBuf>,
    /// Eb/N0 grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// iteration_tables, state_tables_fixed_q or state_tables_adaptive_q.
    #[arg(long, value_parser = parse_enum::<DecoderMode>)]
    mode: Option<DecoderMode>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    stall_window: Option<usize>,
    #[arg(long)]
    stall_stop: Option<bool>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    design_snr: Option<f64>,
    #[arg(long)]
    de_iterations: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    tables: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// all_zero or random_encoded.
    #[arg(long, value_parser = parse_enum::<CodewordSource>)]
    codeword: Option<CodewordSource>,
    /// Output path prefix; `.csv` and `.json` are appended.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

impl Overrides {
    fn resolve(&self) -> Result<CampaignConfig> {
        let mut c: CampaignConfig = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let mut c: CampaignConfig =
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                rebase_paths(&mut c, path.parent().unwrap_or(Path::new(".")));
                c
            }
            None => toml::from_str("")?,
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { c.$($field).+ = v.clone(); })*
            };
        }
        set!(
            n => code.n, dv => code.dv, dc => code.dc, code_seed => code.seed,
            snr => snr_db, mode => mode, q => q, bins => bins,
            max_iterations => max_iterations, stall_window => stall_window,
            max_frames => max_frames, min_frame_errors => min_frame_errors,
            seed => master_seed, de_iterations => de_iterations, max_depth => max_depth,
            codeword => codeword,
        );
        if self.alist.is_some() {
            c.code.alist = self.alist.clone();
        }
        if self.stall_stop.is_some() {
            c.stall_stop = self.stall_stop;
        }
        if self.design_snr.is_some() {
            c.design_snr_db = self.design_snr;
        }
        if self.tables.is_some() {
            c.tables = self.tables.clone();
        }
        if self.schedule.is_some() {
            c.schedule = self.schedule.clone();
        }
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        if let Some(t) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()?;
        }
        Ok(c)
    }
}

/// Paths in a config file are relative to the file.
fn rebase_paths(c: &mut CampaignConfig, base: &Path) {
    for p in [
        &mut c.code.alist,
        &mut c.tables,
        &mut c.schedule,
        &mut c.output,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
}

fn design_engine(c: &CampaignConfig, code: &LdpcCode) -> Result<DeEngine> {
    let Some(snr) = c.design_snr_db else {
        bail!("a design SNR is required (--design-snr or design_snr_db)");
    };
    Ok(DeEngine::new(
        ChannelParams::from_ebno_db(snr, code.design_rate())?,
        code.dv(),
        code.dc(),
    ))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn make_code(opts: &Overrides, out: &Path) -> Result<()> {
    let c = opts.resolve()?;
    let code = c.code.build()?;
    write(out, &code.to_alist())?;
    eprintln!(
        "wrote {}: n={} m={} ({},{}) rank={} four-cycles={}",
        out.display(),
        code.n(),
        code.m(),
        code.dv(),
        code.dc(),
        code.encoder().rank(),
        code.count_four_cycles()
    );
    Ok(())
}

fn build_tables(opts: &Overrides, out_dir: &Path) -> Result<()> {
    let c = opts.resolve()?;
    let code = c.code.build()?;
    let engine = design_engine(&c, &code)?;
    let trace = engine.run(&[c.q], c.de_iterations)?;
    fs::create_dir_all(out_dir)?;
    trace.save(out_dir.join("de_trace.json"))?;
    build_iteration_tables(&trace, DEFAULT_L_MAX)?.save(out_dir.join("iteration_tables.json"))?;
    build_state_tables(&trace, c.bins, DEFAULT_L_MAX)?.save(out_dir.join("state_tables.json"))?;
    eprintln!(
        "density evolution: {} iterations, final I_S = {:.9}, converged = {}",
        trace.states.len(),
        trace.i_s().last().copied().unwrap_or(0.0),
        trace.converged()
    );
    Ok(())
}

fn run_optimize(opts: &Overrides, out_dir: &Path) -> Result<()> {
    let c = opts.resolve()?;
    let code = c.code.build()?;
    let engine = design_engine(&c, &code)?;
    let opt = optimize(&engine, c.q, c.bins, c.max_depth)?;
    let s = &opt.schedule;
    fs::create_dir_all(out_dir)?;
    s.save(out_dir.join("schedule.json"))?;
    tables_for_schedule(s, &engine)?.save(out_dir.join("adaptive_tables.json"))?;
    if let Some(d) = &s.diagnostic {
        eprintln!("warning: {d}");
    }
    eprintln!(
        "total cost {} over {} iterations, f_q = {:?} ({} nodes expanded)",
        s.total_cost,
        s.q_star.len(),
        s.f_q,
        opt.stats.expanded
    );
    Ok(())
}

fn simulate(opts: &Overrides) -> Result<()> {
    let c = opts.resolve()?;
    let code = c.code.build()?;
    let loaded = LoadedArtifacts::load(&c)?;
    let result = run_campaign_with(&code, &c, &loaded, |p| {
        eprintln!(
            "{:>6.2} dB  BER {:.3e}  FER {:.3e}  sub-iterations {:.2}  frames {}",
            p.snr_db, p.ber, p.fer, p.mean_sub_iterations, p.frames
        );
    })?;
    match &c.output {
        Some(prefix) => {
            write(&prefix.with_extension("csv"), &result.to_csv())?;
            write(&prefix.with_extension("json"), &result.to_json()?)?;
        }
        None => print!("{}", result.to_csv()),
    }
    Ok(())
}

fn validate_tables(files: &[PathBuf]) -> Result<()> {
    let mut failed = 0;
    for f in files {
        let checked = W2lTable::load(f).map(|t| (t.num_rows(), t.row_semantics));
        match checked {
            Ok((rows, sem)) => println!("{}: ok ({rows} {sem:?} rows)", f.display()),
            Err(e) => {
                failed += 1;
                println!("{}: INVALID: {e}", f.display());
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} files invalid", files.len());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::MakeCode { opts, out } => make_code(&opts, &out),
        Command::BuildTables { opts, out_dir } => build_tables(&opts, &out_dir),
        Command::Optimize { opts, out_dir } => run_optimize(&opts, &out_dir),
        Command::Simulate { opts } => simulate(&opts),
        Command::ValidateTables { files } => validate_tables(&files),
    }
}
