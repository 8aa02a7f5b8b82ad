//! Monte-Carlo BER / complexity campaigns over an Eb/N0 grid.
//!
//! Each frame draws its noise (and decoder randomness) from its own ChaCha
//! stream keyed by `(master seed, SNR index, frame index)`, so results do not
//! depend on how frames are scheduled across worker threads.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_llr, transmit, ChannelParams};
use crate::code::{Encoder, LdpcCode};
use crate::decoder::{Decoder, DecoderConfig, DecoderMode};
use crate::density::{build_iteration_tables, build_state_tables, DeEngine};
use crate::error::{Error, Result};
use crate::message::{W2lTable, DEFAULT_L_MAX};
use crate::schedule::{optimize, tables_for_schedule, LengthSchedule};

/// Which codeword is transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodewordSource {
    #[default]
    AllZero,
    /// Random information bits through the systematic encoder.
    RandomEncoded,
}

/// Where the code comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    #[serde(default = "defaults::n")]
    pub n: usize,
    #[serde(default = "defaults::dv")]
    pub dv: usize,
    #[serde(default = "defaults::dc")]
    pub dc: usize,
    #[serde(default = "defaults::code_seed")]
    pub seed: u64,
    /// Load the parity-check matrix from an alist file instead of generating it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alist: Option<PathBuf>,
}

impl Default for CodeSpec {
    fn default() -> Self {
        CodeSpec {
            n: defaults::n(),
            dv: defaults::dv(),
            dc: defaults::dc(),
            seed: defaults::code_seed(),
            alist: None,
        }
    }
}

impl CodeSpec {
    pub fn build(&self) -> Result<LdpcCode> {
        match &self.alist {
            Some(path) => LdpcCode::from_alist(&std::fs::read_to_string(path)?),
            None => LdpcCode::generate_regular(self.n, self.dv, self.dc, self.seed),
        }
    }
}

mod defaults {
    use crate::decoder::DecoderMode;

    pub fn mode() -> DecoderMode {
        DecoderMode::StateTablesFixedQ
    }
    pub fn n() -> usize {
        1000
    }
    pub fn dv() -> usize {
        3
    }
    pub fn dc() -> usize {
        6
    }
    pub fn code_seed() -> u64 {
        1
    }
    pub fn q() -> usize {
        10
    }
    pub fn bins() -> usize {
        20
    }
    pub fn max_iterations() -> usize {
        100
    }
    pub fn stall_window() -> usize {
        10
    }
    pub fn max_frames() -> u64 {
        1_000_000
    }
    pub fn min_frame_errors() -> u64 {
        100
    }
    pub fn de_iterations() -> usize {
        100
    }
    pub fn max_depth() -> usize {
        300
    }
    pub fn batch() -> usize {
        256
    }
}

/// Declarative description of a simulation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub code: CodeSpec,
    /// Eb/N0 grid in dB.
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default = "defaults::mode")]
    pub mode: DecoderMode,
    /// Message length (fixed modes) or maximum message length (adaptive mode).
    #[serde(default = "defaults::q")]
    pub q: usize,
    #[serde(default = "defaults::bins")]
    pub bins: usize,
    #[serde(default = "defaults::max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "defaults::stall_window")]
    pub stall_window: usize,
    /// Override of the stall stopping rule (default: on for state modes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_stop: Option<bool>,
    #[serde(default = "defaults::max_frames")]
    pub max_frames: u64,
    #[serde(default = "defaults::min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Eb/N0 at which tables and schedules are designed; `None` designs one per grid point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_snr_db: Option<f64>,
    /// Iterations of the density-evolution run behind the tables.
    #[serde(default = "defaults::de_iterations")]
    pub de_iterations: usize,
    /// Depth limit of the length optimization.
    #[serde(default = "defaults::max_depth")]
    pub max_depth: usize,
    /// Pre-computed table file (overrides the density-evolution design).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<PathBuf>,
    /// Pre-computed schedule file for the adaptive mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<PathBuf>,
    #[serde(default)]
    pub codeword: CodewordSource,
    /// Frames simulated between stop-rule checks.
    #[serde(default = "defaults::batch")]
    pub batch: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(mode: DecoderMode, snr_db: Vec<f64>) -> Self {
        CampaignConfig {
            code: CodeSpec::default(),
            snr_db,
            mode,
            q: defaults::q(),
            bins: defaults::bins(),
            max_iterations: defaults::max_iterations(),
            stall_window: defaults::stall_window(),
            stall_stop: None,
            max_frames: defaults::max_frames(),
            min_frame_errors: defaults::min_frame_errors(),
            master_seed: 0,
            design_snr_db: None,
            de_iterations: defaults::de_iterations(),
            max_depth: defaults::max_depth(),
            tables: None,
            schedule: None,
            codeword: CodewordSource::AllZero,
            batch: defaults::batch(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if self.min_frame_errors == 0 {
            return Err(Error::Config("min_frame_errors must be at least 1".into()));
        }
        if self.max_frames == 0 || self.batch == 0 {
            return Err(Error::Config(
                "max_frames and batch must be positive".into(),
            ));
        }
        if self.mode == DecoderMode::StateTablesAdaptiveQ
            && self.tables.is_some() != self.schedule.is_some()
        {
            return Err(Error::Config(
                "adaptive mode needs both a table and a schedule file, or neither".into(),
            ));
        }
        Ok(())
    }

    /// Channel and degrees used to design tables for a grid point.
    fn design_engine(&self, code: &LdpcCode, snr_db: f64) -> Result<DeEngine> {
        let design = self.design_snr_db.unwrap_or(snr_db);
        let ch = ChannelParams::from_ebno_db(design, code.design_rate())?;
        Ok(DeEngine::new(ch, code.dv(), code.dc()))
    }

    /// Decoder configuration for one grid point: loaded artifacts when given,
    /// otherwise designed by density evolution.
    pub fn decoder_config(
        &self,
        code: &LdpcCode,
        snr_db: f64,
        loaded: &LoadedArtifacts,
    ) -> Result<DecoderConfig> {
        let mut cfg = match self.mode {
            DecoderMode::StateTablesAdaptiveQ => {
                let (tables, schedule) = match (&loaded.tables, &loaded.schedule) {
                    (Some(t), Some(s)) => (t.clone(), s.clone()),
                    _ => {
                        let engine = self.design_engine(code, snr_db)?;
                        let schedule =
                            optimize(&engine, self.q, self.bins, self.max_depth)?.schedule;
                        (tables_for_schedule(&schedule, &engine)?, schedule)
                    }
                };
                DecoderConfig::adaptive(tables, schedule)
            }
            mode => {
                let tables = match &loaded.tables {
                    Some(t) => t.clone(),
                    None => {
                        let engine = self.design_engine(code, snr_db)?;
                        let trace = engine.run(&[self.q], self.de_iterations)?;
                        if mode == DecoderMode::IterationTables {
                            build_iteration_tables(&trace, DEFAULT_L_MAX)?
                        } else {
                            build_state_tables(&trace, self.bins, DEFAULT_L_MAX)?
                        }
                    }
                };
                DecoderConfig::new(mode, tables, self.q)
            }
        };
        cfg.max_iterations = self.max_iterations;
        cfg.stall_window = self.stall_window;
        cfg.state_bins = self.bins;
        if let Some(s) = self.stall_stop {
            cfg.stall_stop = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Tables and schedules read from files.
#[derive(Debug, Clone, Default)]
pub struct LoadedArtifacts {
    pub tables: Option<W2lTable>,
    pub schedule: Option<LengthSchedule>,
}

impl LoadedArtifacts {
    pub fn load(config: &CampaignConfig) -> Result<Self> {
        Ok(LoadedArtifacts {
            tables: config.tables.as_ref().map(W2lTable::load).transpose()?,
            schedule: config
                .schedule
                .as_ref()
                .map(LengthSchedule::load)
                .transpose()?,
        })
    }
}

/// Counts for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_sub_iterations: f64,
    pub mean_iterations: f64,
    pub stall_stops: u64,
    pub successes: u64,
    /// Decoder converged to a codeword other than the transmitted one.
    pub undetected_errors: u64,
    pub sub_iterations_total: u64,
    pub iterations_total: u64,
    pub sub_iterations_sq_total: u64,
    pub bit_errors_sq_total: u64,
}

impl PointResult {
    /// Standard error of `mean_sub_iterations`.
    pub fn sub_iterations_std_error(&self) -> f64 {
        std_error(
            self.sub_iterations_total,
            self.sub_iterations_sq_total,
            self.frames,
        )
    }

    /// Standard error of `ber`, from the per-frame bit-error counts.
    pub fn ber_std_error(&self, n: usize) -> f64 {
        std_error(self.bit_errors, self.bit_errors_sq_total, self.frames) / n as f64
    }
}

fn std_error(sum: u64, sum_sq: u64, frames: u64) -> f64 {
    if frames < 2 {
        return f64::INFINITY;
    }
    let f = frames as f64;
    let mean = sum as f64 / f;
    let var = ((sum_sq as f64 - f * mean * mean) / (f - 1.0)).max(0.0);
    (var / f).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub n: usize,
    pub points: Vec<PointResult>,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    bit_errors: u64,
    sub_iterations: u64,
    iterations: u64,
    success: bool,
    stalled: bool,
}

/// Per-frame random stream keyed by `(master seed, SNR index, frame index)`.
pub fn frame_rng(master_seed: u64, snr_index: usize, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(snr_index as u64).to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    key[24..].copy_from_slice(b"bvmpa-fr");
    ChaCha8Rng::from_seed(key)
}

struct FrameRunner<'a> {
    code: &'a LdpcCode,
    encoder: Option<&'a Encoder>,
    channel: ChannelParams,
    decoder_config: &'a DecoderConfig,
    master_seed: u64,
    snr_index: usize,
}

impl FrameRunner<'_> {
    fn run(&self, decoder: &mut Decoder<'_>, frame: u64) -> Result<FrameOutcome> {
        let mut rng = frame_rng(self.master_seed, self.snr_index, frame);
        let codeword = match self.encoder {
            None => vec![0u8; self.code.n()],
            Some(enc) => {
                let info: Vec<u8> = (0..enc.dimension())
                    .map(|_| rng.random_range(0..2u8))
                    .collect();
                enc.encode(&info)?
            }
        };
        let l_ch = channel_llr(&transmit(&codeword, &self.channel, &mut rng), &self.channel);
        let r = decoder.decode(&l_ch, &mut rng)?;
        let bit_errors = r.bits.iter().zip(&codeword).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameOutcome {
            bit_errors,
            sub_iterations: r.sub_iterations as u64,
            iterations: r.iterations as u64,
            success: r.success,
            stalled: r.stalled,
        })
    }
}

/// Simulates one grid point until the frame budget or the frame-error target is reached.
#[allow(clippy::too_many_arguments)]
pub fn simulate_point(
    code: &LdpcCode,
    decoder_config: &DecoderConfig,
    snr_db: f64,
    snr_index: usize,
    config: &CampaignConfig,
    encoder: Option<&Encoder>,
) -> Result<PointResult> {
    let channel = ChannelParams::from_ebno_db(snr_db, code.design_rate())?;
    let runner = FrameRunner {
        code,
        encoder,
        channel,
        decoder_config,
        master_seed: config.master_seed,
        snr_index,
    };
    let mut acc = PointResult {
        snr_db,
        frames: 0,
        bit_errors: 0,
        frame_errors: 0,
        ber: 0.0,
        fer: 0.0,
        mean_sub_iterations: 0.0,
        mean_iterations: 0.0,
        stall_stops: 0,
        successes: 0,
        undetected_errors: 0,
        sub_iterations_total: 0,
        iterations_total: 0,
        sub_iterations_sq_total: 0,
        bit_errors_sq_total: 0,
    };
    'outer: while acc.frames < config.max_frames && acc.frame_errors < config.min_frame_errors {
        let start = acc.frames;
        let end = (start + config.batch as u64).min(config.max_frames);
        let outcomes: Vec<FrameOutcome> = (start..end)
            .into_par_iter()
            .map_init(
                || Decoder::new(code, runner.decoder_config).expect("validated config"),
                |decoder, frame| runner.run(decoder, frame),
            )
            .collect::<Result<_>>()?;
        // Frames are folded in order so the error target cuts at the same frame every run.
        for o in outcomes {
            acc.frames += 1;
            acc.bit_errors += o.bit_errors;
            acc.bit_errors_sq_total += o.bit_errors * o.bit_errors;
            acc.sub_iterations_total += o.sub_iterations;
            acc.sub_iterations_sq_total += o.sub_iterations * o.sub_iterations;
            acc.iterations_total += o.iterations;
            if o.bit_errors > 0 {
                acc.frame_errors += 1;
                if o.success {
                    acc.undetected_errors += 1;
                }
            }
            acc.successes += u64::from(o.success);
            acc.stall_stops += u64::from(o.stalled);
            if acc.frame_errors >= config.min_frame_errors {
                break 'outer;
            }
        }
    }
    let f = acc.frames as f64;
    acc.ber = acc.bit_errors as f64 / (f * code.n() as f64);
    acc.fer = acc.frame_errors as f64 / f;
    acc.mean_sub_iterations = acc.sub_iterations_total as f64 / f;
    acc.mean_iterations = acc.iterations_total as f64 / f;
    Ok(acc)
}

/// Runs every grid point of the campaign.
pub fn run_campaign(
    code: &LdpcCode,
    config: &CampaignConfig,
    loaded: &LoadedArtifacts,
) -> Result<CampaignResult> {
    run_campaign_with(code, config, loaded, |_| {})
}

/// Like [`run_campaign`], calling `on_point` after each grid point.
pub fn run_campaign_with(
    code: &LdpcCode,
    config: &CampaignConfig,
    loaded: &LoadedArtifacts,
    mut on_point: impl FnMut(&PointResult),
) -> Result<CampaignResult> {
    config.validate()?;
    let encoder = (config.codeword == CodewordSource::RandomEncoded).then(|| code.encoder());
    let mut points = Vec::with_capacity(config.snr_db.len());
    for (i, &snr) in config.snr_db.iter().enumerate() {
        let dcfg = config.decoder_config(code, snr, loaded)?;
        let p = simulate_point(code, &dcfg, snr, i, config, encoder.as_ref())?;
        on_point(&p);
        points.push(p);
    }
    Ok(CampaignResult {
        config: config.clone(),
        n: code.n(),
        points,
    })
}

impl CampaignResult {
    /// Plot-ready CSV: `snr_db,ber,fer,mean_sub_iterations,frames`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("snr_db,ber,fer,mean_sub_iterations,frames\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.snr_db, p.ber, p.fer, p.mean_sub_iterations, p.frames
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
