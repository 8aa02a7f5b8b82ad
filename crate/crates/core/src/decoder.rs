//! Iterative binary vector message passing decoder with iteration- or
//! state-dependent weight-to-L-value tables and optional adaptive message length.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::LdpcCode;
use crate::error::{Error, Result};
use crate::message::{
    l_to_prob, prob_to_weight, sample_bits, BinaryVectorMessage, RowSemantics, W2lTable, MAX_Q,
};
use crate::schedule::LengthSchedule;
use crate::state::{state_bin, syndrome_information_from_counts};

/// Largest supported variable degree.
pub const MAX_DV: usize = 32;

/// Resolution used when deciding whether the syndrome information increased.
const STALL_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderMode {
    /// One table row per iteration, fixed message length.
    IterationTables,
    /// Rows selected by the quantized syndrome information, fixed message length.
    StateTablesFixedQ,
    /// Rows and message lengths selected by the quantized syndrome information.
    StateTablesAdaptiveQ,
}

impl DecoderMode {
    pub fn uses_state(self) -> bool {
        !matches!(self, DecoderMode::IterationTables)
    }
}

#[derive(Debug, Clone)]
pub struct DecoderConfig {
    pub mode: DecoderMode,
    pub max_iterations: usize,
    pub stall_window: usize,
    /// Stop with failure once the syndrome information stops increasing.
    pub stall_stop: bool,
    /// Stop as soon as the hard decisions form a codeword.
    pub stop_on_codeword: bool,
    pub tables: W2lTable,
    pub schedule: Option<LengthSchedule>,
    /// Message length in the fixed-length modes.
    pub q_fixed: usize,
    pub state_bins: usize,
    /// Record a per-iteration trace in the result.
    pub trace: bool,
}

impl DecoderConfig {
    /// Defaults: 100 iterations, stall window 10, 20 state bins. The stall
    /// criterion is active only in the state-driven modes.
    pub fn new(mode: DecoderMode, tables: W2lTable, q_fixed: usize) -> Self {
        DecoderConfig {
            mode,
            max_iterations: 100,
            stall_window: 10,
            stall_stop: mode.uses_state(),
            stop_on_codeword: true,
            tables,
            schedule: None,
            q_fixed,
            state_bins: 20,
            trace: false,
        }
    }

    pub fn adaptive(tables: W2lTable, schedule: LengthSchedule) -> Self {
        let mut cfg = Self::new(DecoderMode::StateTablesAdaptiveQ, tables, schedule.q_max);
        cfg.state_bins = schedule.bins;
        cfg.schedule = Some(schedule);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::Config("stall_window must be at least 1".into()));
        }
        if self.state_bins == 0 {
            return Err(Error::Config("state_bins must be at least 1".into()));
        }
        self.tables.validate()?;
        let t = &self.tables;
        match self.mode {
            DecoderMode::IterationTables | DecoderMode::StateTablesFixedQ => {
                if self.q_fixed == 0 || self.q_fixed > MAX_Q {
                    return Err(Error::Config(format!(
                        "q_fixed = {} out of range",
                        self.q_fixed
                    )));
                }
                let want = if self.mode == DecoderMode::IterationTables {
                    RowSemantics::Iteration
                } else {
                    RowSemantics::State
                };
                if t.row_semantics != want {
                    return Err(Error::Config(format!(
                        "{:?} mode needs a {want:?} table, got {:?}",
                        self.mode, t.row_semantics
                    )));
                }
                if let Some(i) = (0..t.num_rows()).find(|&i| t.row_q(i) != self.q_fixed) {
                    return Err(Error::Config(format!(
                        "table row {i} serves Q = {}, decoder uses Q = {}",
                        t.row_q(i),
                        self.q_fixed
                    )));
                }
                if self.mode == DecoderMode::StateTablesFixedQ && t.num_rows() != self.state_bins {
                    return Err(Error::Config(format!(
                        "state table has {} rows for {} bins",
                        t.num_rows(),
                        self.state_bins
                    )));
                }
            }
            DecoderMode::StateTablesAdaptiveQ => {
                let s = self
                    .schedule
                    .as_ref()
                    .ok_or_else(|| Error::Config("adaptive mode needs a length schedule".into()))?;
                s.validate()?;
                if t.row_semantics != RowSemantics::State {
                    return Err(Error::Config("adaptive mode needs a state table".into()));
                }
                if s.bins != self.state_bins || t.num_rows() != s.bins {
                    return Err(Error::Config(format!(
                        "schedule has {} bins, table {} rows, decoder {} bins",
                        s.bins,
                        t.num_rows(),
                        self.state_bins
                    )));
                }
                if let Some(b) = (0..s.bins).find(|&b| t.row_q(b) != s.f_q[b]) {
                    return Err(Error::Config(format!(
                        "table row {b} serves Q = {} but the schedule uses Q = {} from that bin",
                        t.row_q(b),
                        s.f_q[b]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One executed iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub q: usize,
    pub i_s: f64,
    /// Mean weight of the per-check syndrome messages.
    pub syndrome_weight_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub success: bool,
    pub iterations: usize,
    pub sub_iterations: usize,
    /// Stopped because the syndrome information stalled.
    pub stalled: bool,
    /// Per-iteration records; empty unless tracing was requested.
    pub trace: Vec<IterationRecord>,
}

/// Trace as CSV with columns `iteration,q,i_s,syndrome_weight_mean`.
pub fn trace_csv(trace: &[IterationRecord]) -> String {
    let mut s = String::from("iteration,q,i_s,syndrome_weight_mean\n");
    for r in trace {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.iteration, r.q, r.i_s, r.syndrome_weight_mean
        );
    }
    s
}

/// Extrinsic L-value for each edge: `l_ch + sum of the other a-priori values`.
#[inline]
fn extrinsic(l_ch: f64, apriori: &[f64], k: usize) -> f64 {
    let mut l = l_ch;
    for (j, &a) in apriori.iter().enumerate() {
        if j != k {
            l += a;
        }
    }
    l
}

/// Variable node update from a-priori L-values (all zero in the first iteration).
///
/// Returns one outgoing message of length `q_out` per a-priori input and the
/// a-posteriori L-value.
pub fn vnd_update<R: Rng + ?Sized>(
    l_ch: f64,
    apriori: &[f64],
    q_out: usize,
    rng: &mut R,
) -> Result<(Vec<BinaryVectorMessage>, f64)> {
    if q_out == 0 || q_out > MAX_Q {
        return Err(Error::InvalidParameter(format!(
            "message length {q_out} out of range"
        )));
    }
    let out = (0..apriori.len())
        .map(|k| {
            let w = prob_to_weight(l_to_prob(extrinsic(l_ch, apriori, k)), q_out);
            BinaryVectorMessage::from_bits(sample_bits(w, q_out, rng), q_out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, l_ch + apriori.iter().sum::<f64>()))
}

/// Variable node update from incoming vector messages, converted by `table_row`.
pub fn vnd_update_messages<R: Rng + ?Sized>(
    l_ch: f64,
    incoming: &[BinaryVectorMessage],
    table_row: &[f64],
    q_out: usize,
    rng: &mut R,
) -> Result<(Vec<BinaryVectorMessage>, f64)> {
    let apriori = incoming
        .iter()
        .map(|m| {
            if m.len() + 1 != table_row.len() {
                Err(Error::LengthMismatch {
                    expected: table_row.len() - 1,
                    actual: m.len(),
                })
            } else {
                Ok(table_row[m.weight()])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    vnd_update(l_ch, &apriori, q_out, rng)
}

/// Check node update: every output is the XOR of all other inputs.
pub fn cnd_update(incoming: &[BinaryVectorMessage]) -> Result<Vec<BinaryVectorMessage>> {
    let Some(first) = incoming.first() else {
        return Ok(Vec::new());
    };
    let mut total = BinaryVectorMessage::zeros(first.len());
    for m in incoming {
        total = total.xor(m)?;
    }
    incoming.iter().map(|m| total.xor(m)).collect()
}

/// Reusable decoder for one code and configuration.
pub struct Decoder<'a> {
    code: &'a LdpcCode,
    config: &'a DecoderConfig,
    v2c: Vec<u64>,
    c2v: Vec<u64>,
    lav: Vec<f64>,
    hard: Vec<u8>,
    counts: Vec<usize>,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a LdpcCode, config: &'a DecoderConfig) -> Result<Self> {
        config.validate()?;
        if code.dv() > MAX_DV {
            return Err(Error::Config(format!(
                "variable degree {} exceeds {MAX_DV}",
                code.dv()
            )));
        }
        let ne = code.num_edges();
        Ok(Decoder {
            code,
            config,
            v2c: vec![0; ne],
            c2v: vec![0; ne],
            lav: vec![0.0; ne],
            hard: vec![0; code.n()],
            counts: vec![0; MAX_Q + 1],
        })
    }

    /// Message length used in the first iteration.
    fn initial_q(&self) -> usize {
        match &self.config.schedule {
            Some(s) if self.config.mode == DecoderMode::StateTablesAdaptiveQ => s.f_q[0],
            _ => self.config.q_fixed,
        }
    }

    /// One VND half-iteration producing `v2c` at length `q`.
    fn variable_pass<R: Rng + ?Sized>(&mut self, l_ch: &[f64], first: bool, q: usize, rng: &mut R) {
        let dv = self.code.dv();
        let mut apriori = [0.0f64; MAX_DV];
        for (v, &lc) in l_ch.iter().enumerate() {
            let edges = self.code.var_edges(v);
            if !first {
                for (a, &e) in apriori.iter_mut().zip(edges) {
                    *a = self.lav[e as usize];
                }
            }
            for (k, &e) in edges.iter().enumerate() {
                let w = prob_to_weight(l_to_prob(extrinsic(lc, &apriori[..dv], k)), q);
                self.v2c[e as usize] = sample_bits(w, q, rng);
            }
        }
    }

    /// CND half-iteration; returns the syndrome information of the inputs and
    /// the mean syndrome message weight.
    fn check_pass(&mut self, q: usize) -> (f64, f64) {
        let dc = self.code.dc();
        self.counts[..=q].fill(0);
        let mut weight_sum = 0usize;
        for (inp, out) in self.v2c.chunks_exact(dc).zip(self.c2v.chunks_exact_mut(dc)) {
            let total = inp.iter().fold(0u64, |acc, &b| acc ^ b);
            for (o, &i) in out.iter_mut().zip(inp) {
                *o = total ^ i;
            }
            let w = total.count_ones() as usize;
            self.counts[w] += 1;
            weight_sum += w;
        }
        let i_s = syndrome_information_from_counts(&self.counts[..=q]);
        (i_s, weight_sum as f64 / self.code.m() as f64)
    }

    /// Converts `c2v` with `row` and forms hard decisions from the a-posteriori values.
    fn apply_row(&mut self, l_ch: &[f64], row: &[f64]) {
        for (l, &m) in self.lav.iter_mut().zip(&self.c2v) {
            *l = row[m.count_ones() as usize];
        }
        for (v, &lc) in l_ch.iter().enumerate() {
            let app = self
                .code
                .var_edges(v)
                .iter()
                .fold(lc, |acc, &e| acc + self.lav[e as usize]);
            self.hard[v] = u8::from(app < 0.0);
        }
    }

    pub fn decode<R: Rng + ?Sized>(&mut self, l_ch: &[f64], rng: &mut R) -> Result<DecodeResult> {
        if l_ch.len() != self.code.n() {
            return Err(Error::LengthMismatch {
                expected: self.code.n(),
                actual: l_ch.len(),
            });
        }
        let cfg = self.config;
        let table = &cfg.tables;
        let mut q = self.initial_q();
        let mut launch_bin = 0usize;
        let mut sub_iterations = 0;
        let mut trace = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut best_at = 0;
        let mut success = false;
        let mut stalled = false;
        let mut iterations = 0;

        for it in 1..=cfg.max_iterations {
            iterations = it;
            self.variable_pass(l_ch, it == 1, q, rng);
            let (i_s, mean_weight) = self.check_pass(q);
            sub_iterations += q;
            if cfg.trace {
                trace.push(IterationRecord {
                    iteration: it,
                    q,
                    i_s,
                    syndrome_weight_mean: mean_weight,
                });
            }
            let bin = state_bin(i_s, cfg.state_bins);
            let (row_index, next_q) = match cfg.mode {
                DecoderMode::IterationTables => ((it - 1).min(table.num_rows() - 1), q),
                DecoderMode::StateTablesFixedQ => (bin, q),
                // The row for this iteration's messages belongs to the bin
                // that chose their length.
                DecoderMode::StateTablesAdaptiveQ => {
                    let f_q = &cfg.schedule.as_ref().expect("validated").f_q;
                    (launch_bin, f_q[bin])
                }
            };
            self.apply_row(l_ch, table.row(row_index));
            success = self.code.is_codeword(&self.hard);
            if success && cfg.stop_on_codeword {
                break;
            }
            let quantized = (i_s / STALL_RESOLUTION).round();
            if quantized > best {
                best = quantized;
                best_at = it;
            } else if cfg.stall_stop && it - best_at >= cfg.stall_window {
                stalled = true;
                break;
            }
            launch_bin = bin;
            q = next_q;
        }

        Ok(DecodeResult {
            bits: self.hard.clone(),
            success,
            iterations,
            sub_iterations,
            stalled,
            trace,
        })
    }

    /// Weights of the VND-to-CND messages of the last iteration, edge by edge.
    pub fn v2c_weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.v2c.iter().map(|b| b.count_ones() as usize)
    }
}

/// Convenience wrapper around [`Decoder`].
pub fn decode<R: Rng + ?Sized>(
    code: &LdpcCode,
    l_ch: &[f64],
    config: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeResult> {
    Decoder::new(code, config)?.decode(l_ch, rng)
}
