//! Exact density evolution of the message weight distributions under the
//! all-zero codeword, and the look-up tables derived from it.
//!
//! Check node steps fold weight distributions through the hypergeometric
//! overlap of uniformly placed ones. Variable node steps treat the a-priori
//! L-values as a discrete distribution (one atom per weight), convolve the
//! `dv - 1` incoming copies, and integrate the Gaussian channel L-value over
//! the interval of extrinsic values that round to each output weight.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::message::{check_pmf, enforce_monotone, w2l_from_distribution, W2lTable, MAX_Q};
use crate::state::{state_bin, syndrome_information};

/// Syndrome information at which density evolution counts as converged.
pub const CONVERGED_I_S: f64 = 1.0 - 1e-9;

/// Probability mass function of a message weight over `0..=q`, given X = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightDistribution {
    pmf: Vec<f64>,
}

impl WeightDistribution {
    /// Validates normalization to 1e-12 and non-negativity.
    pub fn new(pmf: Vec<f64>) -> Result<Self> {
        check_pmf(&pmf)?;
        if pmf.len() > MAX_Q + 1 {
            return Err(Error::InvalidParameter(format!(
                "length {} exceeds {MAX_Q}",
                pmf.len() - 1
            )));
        }
        Ok(WeightDistribution { pmf })
    }

    /// Renormalizes a non-negative vector.
    fn normalized(mut pmf: Vec<f64>) -> Self {
        let s: f64 = pmf.iter().sum();
        for p in &mut pmf {
            *p /= s;
        }
        WeightDistribution { pmf }
    }

    pub fn point_mass(q: usize, w: usize) -> Self {
        let mut pmf = vec![0.0; q + 1];
        pmf[w] = 1.0;
        WeightDistribution { pmf }
    }

    pub fn q(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let q = self.q();
        (0..=q).all(|w| (self.pmf[w] - self.pmf[q - w]).abs() <= tol)
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self
            .pmf
            .iter()
            .zip(&other.pmf)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

fn binomials() -> &'static Vec<Vec<f64>> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![vec![1.0]];
        for n in 1..=MAX_Q {
            let prev = &t[n - 1];
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            t.push(row);
        }
        t
    })
}

#[inline]
fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        binomials()[n][k]
    }
}

/// Weight distribution of `a XOR b` for independent messages with uniformly
/// random positions of their ones.
pub fn hypergeometric_xor_fold(
    p1: &WeightDistribution,
    p2: &WeightDistribution,
) -> Result<WeightDistribution> {
    if p1.q() != p2.q() {
        return Err(Error::LengthMismatch {
            expected: p1.q(),
            actual: p2.q(),
        });
    }
    let q = p1.q();
    let mut out = vec![0.0; q + 1];
    for (w1, &a) in p1.pmf.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (w2, &b) in p2.pmf.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let mass = a * b / choose(q, w2);
            // k ones of the second vector overlap ones of the first.
            let k_lo = (w1 + w2).saturating_sub(q);
            for k in k_lo..=w1.min(w2) {
                out[w1 + w2 - 2 * k] += mass * choose(w1, k) * choose(q - w1, w2 - k);
            }
        }
    }
    Ok(WeightDistribution::normalized(out))
}

fn fold_n(p: &WeightDistribution, copies: usize) -> WeightDistribution {
    let mut acc = WeightDistribution::point_mass(p.q(), 0);
    for _ in 0..copies {
        acc = hypergeometric_xor_fold(&acc, p).expect("equal lengths");
    }
    acc
}

/// Check-to-variable distribution: XOR of `dc - 1` variable-to-check messages.
pub fn cnd_de_step(v2c: &WeightDistribution, dc: usize) -> Result<WeightDistribution> {
    if dc < 2 {
        return Err(Error::InvalidParameter(format!("check degree {dc} < 2")));
    }
    Ok(fold_n(v2c, dc - 1))
}

/// Syndrome message distribution (XOR of all `dc` inputs) and its syndrome information.
pub fn syndrome_de(v2c: &WeightDistribution, dc: usize) -> Result<(WeightDistribution, f64)> {
    if dc < 1 {
        return Err(Error::InvalidParameter(
            "check degree must be positive".into(),
        ));
    }
    let s = fold_n(v2c, dc);
    let i_s = syndrome_information(&s.pmf);
    Ok((s, i_s))
}

/// Tuning of the variable node step.
#[derive(Debug, Clone, Copy)]
pub struct DeOptions {
    /// Clamping bound of the table L-values.
    pub l_max: f64,
    /// Maximum number of distinct L-value atoms after convolution.
    pub atom_cap: usize,
    /// Atoms closer than this are merged exactly.
    pub merge_tol: f64,
    /// Coarser merging applied when the cap is exceeded.
    pub cap_merge_tol: f64,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions {
            l_max: crate::message::DEFAULT_L_MAX,
            atom_cap: 1 << 20,
            merge_tol: 1e-12,
            cap_merge_tol: 1e-9,
        }
    }
}

fn merge_atoms(atoms: &mut Vec<(f64, f64)>, tol: f64) {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for &(v, m) in atoms.iter() {
        match out.last_mut() {
            Some(last) if v - last.0 <= tol => {
                // Mass-weighted position keeps the mean of the sum exact.
                let total = last.1 + m;
                if total > 0.0 {
                    last.0 = (last.0 * last.1 + v * m) / total;
                }
                last.1 = total;
            }
            _ => out.push((v, m)),
        }
    }
    *atoms = out;
}

/// Distribution of the sum of `copies` independent a-priori L-values.
fn apriori_sum_atoms(
    c2v: &WeightDistribution,
    row: &[f64],
    copies: usize,
    opts: &DeOptions,
) -> Result<Vec<(f64, f64)>> {
    let mut base: Vec<(f64, f64)> = row
        .iter()
        .zip(&c2v.pmf)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&l, &m)| (l, m))
        .collect();
    merge_atoms(&mut base, opts.merge_tol);
    let mut acc = vec![(0.0, 1.0)];
    for _ in 0..copies {
        let mut next = Vec::with_capacity(acc.len() * base.len());
        for &(s, m) in &acc {
            for &(l, p) in &base {
                next.push((s + l, m * p));
            }
        }
        merge_atoms(&mut next, opts.merge_tol);
        if next.len() > opts.atom_cap {
            merge_atoms(&mut next, opts.cap_merge_tol);
            if next.len() > opts.atom_cap {
                return Err(Error::AtomCap(next.len()));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Upper ends of the extrinsic L-value intervals: weight `w` is produced for
/// `l` in `(u[w+1], u[w]]`, with `u[0] = +inf` and `u[q+1] = -inf`.
pub fn weight_thresholds(q: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(q + 2);
    u.push(f64::INFINITY);
    for w in 1..=q {
        u.push((q as f64 / (w as f64 - 0.5) - 1.0).ln());
    }
    u.push(f64::NEG_INFINITY);
    u
}

#[inline]
fn std_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[inline]
fn std_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// `P(lo < Z <= hi)` for standard normal `Z`, accurate in both tails.
fn normal_interval(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        (std_sf(lo) - std_sf(hi)).max(0.0)
    } else {
        (std_cdf(hi) - std_cdf(lo)).max(0.0)
    }
}

/// Variable-to-check weight distribution at length `q_out`.
///
/// `apriori` holds the incoming check-to-variable distribution and the table
/// row converting it; `None` is the first iteration, where only the channel
/// L-value is available.
pub fn vnd_de_step(
    apriori: Option<(&WeightDistribution, &[f64])>,
    dv: usize,
    channel: &ChannelParams,
    q_out: usize,
    opts: &DeOptions,
) -> Result<WeightDistribution> {
    if q_out == 0 || q_out > MAX_Q {
        return Err(Error::InvalidParameter(format!(
            "message length {q_out} out of range"
        )));
    }
    if dv == 0 {
        return Err(Error::InvalidParameter(
            "variable degree must be positive".into(),
        ));
    }
    let atoms = match apriori {
        None => vec![(0.0, 1.0)],
        Some((c2v, row)) => {
            if row.len() != c2v.q() + 1 {
                return Err(Error::LengthMismatch {
                    expected: c2v.q() + 1,
                    actual: row.len(),
                });
            }
            apriori_sum_atoms(c2v, row, dv - 1, opts)?
        }
    };
    let u = weight_thresholds(q_out);
    let mean = channel.llr_mean();
    let std = channel.llr_std();
    let mut out = vec![0.0; q_out + 1];
    for &(s, m) in &atoms {
        for w in 0..=q_out {
            let lo = (u[w + 1] - s - mean) / std;
            let hi = (u[w] - s - mean) / std;
            out[w] += m * normal_interval(lo, hi);
        }
    }
    Ok(WeightDistribution::normalized(out))
}

/// Density-evolution snapshot after one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeState {
    pub iteration: usize,
    pub q: usize,
    pub i_s: f64,
    #[serde(rename = "v2c_pmf")]
    pub v2c: WeightDistribution,
    #[serde(rename = "c2v_pmf")]
    pub c2v: WeightDistribution,
    #[serde(rename = "syndrome_pmf")]
    pub syndrome: WeightDistribution,
}

impl DeState {
    pub fn converged(&self) -> bool {
        self.i_s >= CONVERGED_I_S
    }
}

/// Density evolution for fixed degrees and channel.
#[derive(Debug, Clone)]
pub struct DeEngine {
    pub channel: ChannelParams,
    pub dv: usize,
    pub dc: usize,
    pub opts: DeOptions,
}

impl DeEngine {
    pub fn new(channel: ChannelParams, dv: usize, dc: usize) -> Self {
        DeEngine {
            channel,
            dv,
            dc,
            opts: DeOptions::default(),
        }
    }

    /// Table row converting the check-to-variable messages of `state`.
    pub fn row_for(&self, state: &DeState) -> Vec<f64> {
        let mut row = w2l_from_distribution(state.c2v.pmf(), self.opts.l_max).expect("normalized");
        enforce_monotone(&mut row);
        row
    }

    /// One iteration at length `q`, continuing from `prev` (or from the channel alone).
    pub fn step(&self, prev: Option<&DeState>, q: usize) -> Result<DeState> {
        let row = prev.map(|p| self.row_for(p));
        let apriori = prev.zip(row.as_deref()).map(|(p, r)| (&p.c2v, r));
        let v2c = vnd_de_step(apriori, self.dv, &self.channel, q, &self.opts)?;
        let c2v = cnd_de_step(&v2c, self.dc)?;
        let (syndrome, i_s) = syndrome_de(&v2c, self.dc)?;
        Ok(DeState {
            iteration: prev.map_or(1, |p| p.iteration + 1),
            q,
            i_s,
            v2c,
            c2v,
            syndrome,
        })
    }

    /// Runs until `max_iterations` or convergence. `lengths[i]` is the message
    /// length of iteration `i + 1`; the last entry repeats.
    pub fn run(&self, lengths: &[usize], max_iterations: usize) -> Result<DeTrace> {
        if lengths.is_empty() {
            return Err(Error::InvalidParameter("no message lengths given".into()));
        }
        let mut states: Vec<DeState> = Vec::new();
        for i in 0..max_iterations {
            let q = lengths[i.min(lengths.len() - 1)];
            let next = self.step(states.last(), q)?;
            let done = next.converged();
            states.push(next);
            if done {
                break;
            }
        }
        Ok(DeTrace {
            channel: self.channel,
            dv: self.dv,
            dc: self.dc,
            states,
        })
    }
}

/// Density evolution at a fixed message length.
pub fn run_de(
    channel: &ChannelParams,
    dv: usize,
    dc: usize,
    q: usize,
    max_iterations: usize,
) -> Result<DeTrace> {
    DeEngine::new(*channel, dv, dc).run(&[q], max_iterations)
}

/// Sequence of density-evolution states for one channel and degree pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTrace {
    pub channel: ChannelParams,
    pub dv: usize,
    pub dc: usize,
    pub states: Vec<DeState>,
}

impl DeTrace {
    pub fn converged(&self) -> bool {
        self.states.last().is_some_and(DeState::converged)
    }

    pub fn i_s(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.i_s).collect()
    }

    /// JSON array of per-iteration records.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.states)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// One row per iteration: row `i` converts the check-to-variable messages of iteration `i + 1`.
pub fn build_iteration_tables(trace: &DeTrace, l_max: f64) -> Result<W2lTable> {
    if trace.states.is_empty() {
        return Err(Error::InvalidParameter(
            "empty density-evolution trace".into(),
        ));
    }
    let rows = trace
        .states
        .iter()
        .map(|s| w2l_from_distribution(s.c2v.pmf(), l_max))
        .collect::<Result<Vec<_>>>()?;
    let mut table = W2lTable::iteration(rows, l_max)?;
    table.design_snr_db = Some(trace.channel.ebno_db);
    table.de_converged = Some(trace.converged());
    Ok(table)
}

/// Index of the nearest populated bin, preferring the lower one on ties.
pub(crate) fn nearest_populated(populated: &[bool], b: usize) -> Option<usize> {
    (0..populated.len()).find_map(|d| {
        if b >= d && populated[b - d] {
            Some(b - d)
        } else if b + d < populated.len() && populated[b + d] {
            Some(b + d)
        } else {
            None
        }
    })
}

/// One row per syndrome-information bin, from the equal-weight average of the
/// check-to-variable distributions of the iterations landing in that bin.
pub fn build_state_tables(trace: &DeTrace, bins: usize, l_max: f64) -> Result<W2lTable> {
    if trace.states.is_empty() {
        return Err(Error::InvalidParameter(
            "empty density-evolution trace".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let q = trace.states[0].q;
    if trace.states.iter().any(|s| s.q != q) {
        return Err(Error::InvalidParameter(
            "state tables need a fixed-length trace".into(),
        ));
    }
    let mut sums = vec![vec![0.0; q + 1]; bins];
    let mut counts = vec![0usize; bins];
    for s in &trace.states {
        let b = state_bin(s.i_s, bins);
        counts[b] += 1;
        for (acc, p) in sums[b].iter_mut().zip(s.c2v.pmf()) {
            *acc += p;
        }
    }
    let populated: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    let own_rows: Vec<Option<Vec<f64>>> = sums
        .iter()
        .zip(&counts)
        .map(|(sum, &c)| {
            (c > 0)
                .then(|| WeightDistribution::normalized(sum.iter().map(|x| x / c as f64).collect()))
        })
        .map(|d| d.map(|d| w2l_from_distribution(d.pmf(), l_max)).transpose())
        .collect::<Result<_>>()?;
    let rows = (0..bins)
        .map(|b| {
            let src = nearest_populated(&populated, b).expect("at least one populated bin");
            own_rows[src].clone().expect("populated")
        })
        .collect();
    let mut table = W2lTable::state(rows, l_max)?;
    table.design_snr_db = Some(trace.channel.ebno_db);
    table.de_converged = Some(trace.converged());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::DEFAULT_L_MAX;

    fn dist(v: &[f64]) -> WeightDistribution {
        WeightDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn xor_with_zero_is_identity() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let out = hypergeometric_xor_fold(&p, &WeightDistribution::point_mass(3, 0)).unwrap();
        assert!(out.total_variation(&p) < 1e-15);
    }

    #[test]
    fn two_weight_one_vectors() {
        let p = WeightDistribution::point_mass(2, 1);
        let out = hypergeometric_xor_fold(&p, &p).unwrap();
        assert_eq!(out.pmf(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn complement_by_all_ones() {
        let out = hypergeometric_xor_fold(
            &WeightDistribution::point_mass(3, 1),
            &WeightDistribution::point_mass(3, 3),
        )
        .unwrap();
        assert_eq!(out.pmf(), &[0.0, 0.0, 1.0, 0.0]);
        assert!(hypergeometric_xor_fold(
            &WeightDistribution::point_mass(3, 1),
            &WeightDistribution::point_mass(2, 1)
        )
        .is_err());
    }

    #[test]
    fn cnd_steps() {
        let p = dist(&[0.6, 0.3, 0.1]);
        assert!(cnd_de_step(&p, 2).unwrap().total_variation(&p) < 1e-15);
        let out = cnd_de_step(&WeightDistribution::point_mass(2, 1), 3).unwrap();
        assert_eq!(out.pmf(), &[0.5, 0.0, 0.5]);
        let sym = dist(&[0.2, 0.15, 0.3, 0.15, 0.2]);
        assert!(cnd_de_step(&sym, 6).unwrap().is_symmetric(1e-15));
        assert!(cnd_de_step(&p, 1).is_err());
    }

    #[test]
    fn syndrome_steps() {
        let (_, i_s) = syndrome_de(&WeightDistribution::point_mass(10, 0), 6).unwrap();
        assert_eq!(i_s, 1.0);
        let (_, i_s) = syndrome_de(&dist(&[0.25, 0.5, 0.25]), 6).unwrap();
        assert!(i_s.abs() < 1e-12);
        let (s, i_s) = syndrome_de(&WeightDistribution::point_mass(2, 1), 2).unwrap();
        assert_eq!(s.pmf(), &[0.5, 0.0, 0.5]);
        assert_eq!(i_s, 0.0);
    }

    #[test]
    fn thresholds_match_rounding() {
        use crate::message::{l_to_prob, prob_to_weight};
        for q in 1..=16 {
            let u = weight_thresholds(q);
            for w in 0..=q {
                // Points strictly inside each interval.
                let (lo, hi) = (u[w + 1].max(-60.0), u[w].min(60.0));
                for t in [0.01, 0.5, 0.99] {
                    let l = lo + t * (hi - lo);
                    assert_eq!(prob_to_weight(l_to_prob(l), q), w, "q={q} w={w} l={l}");
                }
            }
        }
    }

    #[test]
    fn noiseless_vnd_is_point_mass() {
        let ch = ChannelParams::from_ebno_db(40.0, 0.5).unwrap();
        let out = vnd_de_step(None, 3, &ch, 10, &DeOptions::default()).unwrap();
        assert_eq!(out.pmf()[0], 1.0);
    }

    #[test]
    fn zero_row_and_degree_one_match_bootstrap() {
        let ch = ChannelParams::from_ebno_db(1.0, 0.5).unwrap();
        let opts = DeOptions::default();
        let boot = vnd_de_step(None, 3, &ch, 10, &opts).unwrap();
        let c2v = dist(&[0.05, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.05]);
        let zero = vnd_de_step(Some((&c2v, &[0.0; 11])), 3, &ch, 10, &opts).unwrap();
        assert!(zero.total_variation(&boot) < 1e-15);
        let row: Vec<f64> = (0..=10).map(|w| 5.0 - w as f64).collect();
        let dv1 = vnd_de_step(Some((&c2v, &row)), 1, &ch, 10, &opts).unwrap();
        assert!(dv1.total_variation(&boot) < 1e-15);
        assert!(vnd_de_step(Some((&c2v, &[0.0; 5])), 3, &ch, 10, &opts).is_err());
    }

    #[test]
    fn atom_cap_guard() {
        let ch = ChannelParams::from_ebno_db(1.0, 0.5).unwrap();
        let opts = DeOptions {
            atom_cap: 4,
            ..DeOptions::default()
        };
        let c2v = dist(&[0.2, 0.2, 0.2, 0.2, 0.2]);
        let row = [3.0, 1.3, 0.0, -1.3, -3.0];
        assert!(matches!(
            vnd_de_step(Some((&c2v, &row)), 3, &ch, 4, &opts),
            Err(Error::AtomCap(_))
        ));
    }

    #[test]
    fn above_threshold_converges() {
        let ch = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 10, 100).unwrap();
        assert!(trace.converged());
        let i_s = trace.i_s();
        assert!(i_s.windows(2).all(|w| w[1] > w[0]), "{i_s:?}");
        for (i, s) in trace.states.iter().enumerate() {
            assert_eq!(s.iteration, i + 1);
            assert!((syndrome_information(s.syndrome.pmf()) - s.i_s).abs() < 1e-12);
        }
    }

    #[test]
    fn below_threshold_plateaus() {
        let ch = ChannelParams::from_ebno_db(0.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 10, 100).unwrap();
        assert!(!trace.converged());
        assert_eq!(trace.states.len(), 100);
        let i_s = trace.i_s();
        assert!(i_s.last().unwrap() < &0.9);
        assert!((i_s[99] - i_s[98]).abs() < 1e-6);
    }

    #[test]
    fn bootstrap_state() {
        let ch = ChannelParams::from_ebno_db(2.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 10, 3).unwrap();
        let boot = vnd_de_step(None, 3, &ch, 10, &DeOptions::default()).unwrap();
        assert_eq!(trace.states[0].v2c, boot);
    }

    #[test]
    fn iteration_tables() {
        let ch = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 10, 100).unwrap();
        let table = build_iteration_tables(&trace, DEFAULT_L_MAX).unwrap();
        assert_eq!(table.num_rows(), trace.states.len());
        assert!(table.num_rows() <= 100);
        table.validate().unwrap();
        let mut first = w2l_from_distribution(trace.states[0].c2v.pmf(), DEFAULT_L_MAX).unwrap();
        enforce_monotone(&mut first);
        assert_eq!(table.row(0), &first[..]);
    }

    #[test]
    fn symmetric_c2v_row_is_zero() {
        let ch = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        let sym = dist(&[0.25, 0.5, 0.25]);
        let trace = DeTrace {
            channel: ch,
            dv: 3,
            dc: 6,
            states: vec![DeState {
                iteration: 1,
                q: 2,
                i_s: 0.0,
                v2c: sym.clone(),
                c2v: sym.clone(),
                syndrome: sym,
            }],
        };
        let table = build_iteration_tables(&trace, DEFAULT_L_MAX).unwrap();
        assert_eq!(table.row(0), &[0.0, 0.0, 0.0]);
        // A single iteration fills every bin.
        let st = build_state_tables(&trace, 20, DEFAULT_L_MAX).unwrap();
        assert_eq!(st.num_rows(), 20);
        assert!(st.rows.iter().all(|r| r == &[0.0, 0.0, 0.0]));
    }

    #[test]
    fn state_tables() {
        let ch = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 10, 100).unwrap();
        let table = build_state_tables(&trace, 20, DEFAULT_L_MAX).unwrap();
        assert_eq!(table.num_rows(), 20);
        table.validate().unwrap();
        let distinct: std::collections::HashSet<String> =
            table.rows.iter().map(|r| format!("{r:?}")).collect();
        assert!(distinct.len() <= 20);
        assert!(build_state_tables(&trace, 1, DEFAULT_L_MAX).is_err());
    }

    #[test]
    fn nearest_bin_prefers_lower() {
        let p = [false, true, false, true, false, false];
        assert_eq!(nearest_populated(&p, 0), Some(1));
        assert_eq!(nearest_populated(&p, 2), Some(1));
        assert_eq!(nearest_populated(&p, 5), Some(3));
        assert_eq!(nearest_populated(&[false; 3], 1), None);
    }

    #[test]
    fn trace_json_records() {
        let ch = ChannelParams::from_ebno_db(3.0, 0.5).unwrap();
        let trace = run_de(&ch, 3, 6, 4, 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&trace.to_json().unwrap()).unwrap();
        let rec = &v[0];
        for key in [
            "iteration",
            "q",
            "i_s",
            "v2c_pmf",
            "c2v_pmf",
            "syndrome_pmf",
        ] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
        assert_eq!(rec["v2c_pmf"].as_array().unwrap().len(), 5);
    }
}
