//! Binary vector messages and the weight / probability / L-value conversions
//! used by the variable node decoders.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported message length; vectors are packed into one `u64`.
pub const MAX_Q: usize = 64;

/// Default clamping bound for table L-values.
pub const DEFAULT_L_MAX: f64 = 25.0;

/// A length-`Q` binary vector. Only its Hamming weight carries information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryVectorMessage {
    bits: u64,
    len: u8,
}

impl BinaryVectorMessage {
    pub fn zeros(q: usize) -> Self {
        assert!(q <= MAX_Q, "message length {q} exceeds {MAX_Q}");
        BinaryVectorMessage {
            bits: 0,
            len: q as u8,
        }
    }

    /// Builds a message from its packed bits; bits above `q` must be clear.
    pub fn from_bits(bits: u64, q: usize) -> Result<Self> {
        if q > MAX_Q {
            return Err(Error::InvalidParameter(format!(
                "message length {q} exceeds {MAX_Q}"
            )));
        }
        if bits & !mask(q) != 0 {
            return Err(Error::InvalidParameter(format!(
                "bits set beyond length {q}"
            )));
        }
        Ok(BinaryVectorMessage { bits, len: q as u8 })
    }

    pub fn from_slice(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_Q {
            return Err(Error::InvalidParameter(format!(
                "message length {} exceeds {MAX_Q}",
                bits.len()
            )));
        }
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i));
        Ok(BinaryVectorMessage {
            bits: packed,
            len: bits.len() as u8,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len()).map(|i| u8::from(self.bit(i))).collect()
    }

    /// Bit-wise exclusive or.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BinaryVectorMessage {
            bits: self.bits ^ other.bits,
            len: self.len,
        })
    }
}

#[inline]
pub(crate) fn mask(q: usize) -> u64 {
    if q >= 64 {
        u64::MAX
    } else {
        (1u64 << q) - 1
    }
}

/// Probability that the code bit is one given L-value `l`: `1 / (1 + e^l)`.
#[inline]
pub fn l_to_prob(l: f64) -> f64 {
    1.0 / (1.0 + l.exp())
}

/// Target weight `rnd(p Q)` with halves rounded away from zero.
#[inline]
pub fn prob_to_weight(p: f64, q: usize) -> usize {
    let w = (p * q as f64).round();
    if w <= 0.0 {
        0
    } else if w >= q as f64 {
        q
    } else {
        w as usize
    }
}

/// Uniformly random packed vector of length `q` with exactly `weight` ones.
#[inline]
pub(crate) fn sample_bits<R: Rng + ?Sized>(weight: usize, q: usize, rng: &mut R) -> u64 {
    debug_assert!(weight <= q && q <= MAX_Q);
    if weight == 0 {
        return 0;
    }
    if weight == q {
        return mask(q);
    }
    // Partial Fisher-Yates over the positions, drawing the smaller side.
    let (draw, invert) = if 2 * weight > q {
        (q - weight, true)
    } else {
        (weight, false)
    };
    let mut pos = [0u8; MAX_Q];
    for (i, p) in pos.iter_mut().enumerate().take(q) {
        *p = i as u8;
    }
    let mut bits = 0u64;
    for i in 0..draw {
        let j = rng.random_range(i..q);
        pos.swap(i, j);
        bits |= 1 << pos[i];
    }
    if invert {
        bits ^ mask(q)
    } else {
        bits
    }
}

/// Random vector of length `q` and the given weight, uniform over all such vectors.
pub fn sample_vector<R: Rng + ?Sized>(
    weight: usize,
    q: usize,
    rng: &mut R,
) -> Result<BinaryVectorMessage> {
    if q > MAX_Q {
        return Err(Error::InvalidParameter(format!(
            "message length {q} exceeds {MAX_Q}"
        )));
    }
    if weight > q {
        return Err(Error::InvalidParameter(format!(
            "weight {weight} exceeds length {q}"
        )));
    }
    Ok(BinaryVectorMessage {
        bits: sample_bits(weight, q, rng),
        len: q as u8,
    })
}

pub(crate) fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidParameter("empty distribution".into()));
    }
    if let Some(p) = pmf.iter().find(|p| **p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid probability {p}")));
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(sum));
    }
    Ok(())
}

/// Weight-to-L-value row `l[w] = ln(p[w] / p[Q-w])`, clamped to `±l_max`.
///
/// Entries where both masses vanish map to 0; antisymmetry `l[w] = -l[Q-w]`
/// holds exactly.
pub fn w2l_from_distribution(pmf: &[f64], l_max: f64) -> Result<Vec<f64>> {
    check_pmf(pmf)?;
    if !(l_max > 0.0 && l_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "l_max {l_max} must be positive"
        )));
    }
    let q = pmf.len() - 1;
    let mut row = vec![0.0; q + 1];
    for w in 0..=q / 2 {
        let (a, b) = (pmf[w], pmf[q - w]);
        if w == q - w {
            row[w] = 0.0;
            continue;
        }
        let l = match (a > 0.0, b > 0.0) {
            (false, false) => 0.0,
            (true, false) => l_max,
            (false, true) => -l_max,
            (true, true) => (a.ln() - b.ln()).clamp(-l_max, l_max),
        };
        row[w] = l;
        row[q - w] = -l;
    }
    Ok(row)
}

/// Makes a row non-increasing (pool-adjacent-violators), then restores exact
/// antisymmetry by averaging `l[w]` with `-l[Q-w]`.
pub fn enforce_monotone(row: &mut [f64]) {
    if row.len() < 2 {
        if let Some(x) = row.first_mut() {
            *x = 0.0;
        }
        return;
    }
    // Blocks of (sum, count).
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(row.len());
    for &x in row.iter() {
        blocks.push((x, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 2];
            let (s2, c2) = blocks[blocks.len() - 1];
            if s1 / c1 as f64 >= s2 / c2 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
        }
    }
    let mut i = 0;
    for (s, c) in blocks {
        let mean = s / c as f64;
        for x in &mut row[i..i + c] {
            *x = mean;
        }
        i += c;
    }
    let q = row.len() - 1;
    for w in 0..=q / 2 {
        if w == q - w {
            row[w] = 0.0;
        } else {
            let v = 0.5 * (row[w] - row[q - w]);
            row[w] = v;
            row[q - w] = -v;
        }
    }
}

/// How a table's rows are selected by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSemantics {
    /// Row `i` converts the messages produced in iteration `i + 1`.
    Iteration,
    /// Row `b` is selected by the quantized syndrome information bin.
    State,
}

/// Weight-to-L-value look-up table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W2lTable {
    /// Nominal message length (the largest row length minus one).
    pub q: usize,
    pub row_semantics: RowSemantics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_edges: Option<Vec<f64>>,
    pub rows: Vec<Vec<f64>>,
    pub l_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_snr_db: Option<f64>,
    /// Whether the density-evolution run behind the table reached `I_S = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub de_converged: Option<bool>,
}

/// Uniform bin edges `0, 1/bins, ..., 1`.
pub fn uniform_bin_edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

impl W2lTable {
    /// Iteration-indexed table from raw rows; each row is made monotone.
    pub fn iteration(rows: Vec<Vec<f64>>, l_max: f64) -> Result<Self> {
        Self::build(RowSemantics::Iteration, None, rows, l_max)
    }

    /// State-indexed table with `rows.len()` uniform bins.
    pub fn state(rows: Vec<Vec<f64>>, l_max: f64) -> Result<Self> {
        let edges = uniform_bin_edges(rows.len());
        Self::build(RowSemantics::State, Some(edges), rows, l_max)
    }

    fn build(
        row_semantics: RowSemantics,
        bin_edges: Option<Vec<f64>>,
        mut rows: Vec<Vec<f64>>,
        l_max: f64,
    ) -> Result<Self> {
        for row in &mut rows {
            enforce_monotone(row);
        }
        let q = rows
            .iter()
            .map(|r| r.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        let table = W2lTable {
            q,
            row_semantics,
            bin_edges,
            rows,
            l_max,
            design_snr_db: None,
            de_converged: None,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Message length served by row `i`.
    pub fn row_q(&self, i: usize) -> usize {
        self.rows[i].len() - 1
    }

    /// Checks antisymmetry (bit-exact), finiteness, clamping and monotonicity of every row.
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidTable("table has no rows".into()));
        }
        if self.row_semantics == RowSemantics::State {
            let edges = self
                .bin_edges
                .as_ref()
                .ok_or_else(|| Error::InvalidTable("state table without bin edges".into()))?;
            if edges.len() != self.rows.len() + 1 {
                return Err(Error::InvalidTable(format!(
                    "{} bin edges for {} rows",
                    edges.len(),
                    self.rows.len()
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.is_empty() || row.len() > MAX_Q + 1 {
                return Err(Error::InvalidTable(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            let q = row.len() - 1;
            for w in 0..=q {
                let l = row[w];
                if !l.is_finite() || l.abs() > self.l_max {
                    return Err(Error::InvalidTable(format!(
                        "row {i}: entry {w} = {l} out of range"
                    )));
                }
                if l != -row[q - w] {
                    return Err(Error::InvalidTable(format!(
                        "row {i}: not antisymmetric at {w}"
                    )));
                }
                if w > 0 && l > row[w - 1] {
                    return Err(Error::InvalidTable(format!("row {i}: increases at {w}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: W2lTable = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binomial(q: usize, p: f64) -> Vec<f64> {
        let mut c = 1.0;
        let mut out = Vec::with_capacity(q + 1);
        for w in 0..=q {
            out.push(c * p.powi(w as i32) * (1.0 - p).powi((q - w) as i32));
            c = c * (q - w) as f64 / (w + 1) as f64;
        }
        out
    }

    #[test]
    fn uniform_gives_zero_row() {
        let row = w2l_from_distribution(&[1.0 / 11.0; 11], 25.0).unwrap();
        assert!(row.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn binomial_row_closed_form() {
        let row = w2l_from_distribution(&binomial(10, 0.2), 25.0).unwrap();
        for (w, &l) in row.iter().enumerate() {
            let expected = (10.0 - 2.0 * w as f64) * 4f64.ln();
            assert!((l - expected).abs() < 1e-12, "w={w}: {l} vs {expected}");
        }
        assert!((row[0] - 13.862943611198906).abs() < 1e-12);
        assert_eq!(row[5], 0.0);
    }

    #[test]
    fn single_bit_row() {
        let row = w2l_from_distribution(&[0.8, 0.2], 25.0).unwrap();
        assert!((row[0] - 4f64.ln()).abs() < 1e-15);
        assert_eq!(row[1], -row[0]);
    }

    #[test]
    fn zero_masses_and_clamp() {
        let row = w2l_from_distribution(&[0.5, 0.5, 0.0, 0.0], 25.0).unwrap();
        assert_eq!(row, vec![25.0, 25.0, -25.0, -25.0]);
        let row = w2l_from_distribution(&[0.5, 0.0, 0.0, 0.5], 25.0).unwrap();
        assert_eq!(row, vec![0.0, 0.0, 0.0, 0.0]);
        let row = w2l_from_distribution(&[1.0 - 1e-15, 0.0, 0.0, 1e-15], 25.0).unwrap();
        assert_eq!(row[0], 25.0);
        assert_eq!(row[3], -25.0);
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            w2l_from_distribution(&[0.5, 0.4], 25.0),
            Err(Error::NotNormalized(_))
        ));
        assert!(w2l_from_distribution(&[1.5, -0.5], 25.0).is_err());
    }

    #[test]
    fn l_to_prob_values() {
        assert_eq!(l_to_prob(0.0), 0.5);
        assert!((l_to_prob(3f64.ln()) - 0.25).abs() < 1e-15);
        assert!((l_to_prob(-(9f64.ln())) - 0.9).abs() < 1e-15);
        assert_eq!(l_to_prob(1000.0), 0.0);
        assert_eq!(l_to_prob(-1000.0), 1.0);
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(prob_to_weight(0.5, 10), 5);
        assert_eq!(prob_to_weight(0.26, 10), 3);
        assert_eq!(prob_to_weight(0.25, 10), 3);
        assert_eq!(prob_to_weight(0.0, 10), 0);
        assert_eq!(prob_to_weight(1.0, 10), 10);
        assert_eq!(prob_to_weight(0.5, 1), 1);
    }

    #[test]
    fn sample_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_vector(0, 10, &mut rng).unwrap().bits(), 0);
        assert_eq!(
            sample_vector(10, 10, &mut rng).unwrap().to_vec(),
            vec![1; 10]
        );
        assert_eq!(sample_vector(64, 64, &mut rng).unwrap().weight(), 64);
        assert!(sample_vector(11, 10, &mut rng).is_err());
        assert!(sample_vector(1, 65, &mut rng).is_err());
    }

    #[test]
    fn sample_position_uniformity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let v = sample_vector(1, 4, &mut rng).unwrap();
            counts[v.bits().trailing_zeros() as usize] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let e = draws as f64 / 4.0;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.25).abs() < 0.01);
        }
        // 3 degrees of freedom, 99.9% quantile.
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn sample_pattern_uniformity() {
        // All C(6,4) = 15 patterns, drawn through the complemented path.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..200_000 {
            *counts.entry(sample_bits(4, 6, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        for c in counts.values() {
            assert!((*c as f64 / 200_000.0 - 1.0 / 15.0).abs() < 0.004);
        }
    }

    #[test]
    fn xor_basics() {
        let a = BinaryVectorMessage::from_slice(&[1, 0, 1, 0]).unwrap();
        let b = BinaryVectorMessage::from_slice(&[0, 0, 1, 1]).unwrap();
        let c = a.xor(&b).unwrap();
        assert_eq!(c.to_vec(), vec![1, 0, 0, 1]);
        assert_eq!(c.weight(), 2);
        assert_eq!(a.xor(&a).unwrap(), BinaryVectorMessage::zeros(4));
        assert_eq!(a.xor(&BinaryVectorMessage::zeros(4)).unwrap(), a);
        assert!(a.xor(&BinaryVectorMessage::zeros(5)).is_err());
    }

    #[test]
    fn monotone_pass_repairs_inversions() {
        let mut row = vec![3.0, 1.0, 1.2, 0.0, -1.2, -1.0, -3.0];
        enforce_monotone(&mut row);
        assert!(row.windows(2).all(|w| w[0] >= w[1]));
        for w in 0..row.len() {
            assert_eq!(row[w], -row[row.len() - 1 - w]);
        }
        assert_eq!(row[1], 1.1);
    }

    #[test]
    fn table_json_round_trip() {
        let rows = vec![
            w2l_from_distribution(&binomial(10, 0.2), 25.0).unwrap(),
            w2l_from_distribution(&binomial(10, 0.1), 25.0).unwrap(),
        ];
        let table = W2lTable::state(rows, 25.0).unwrap();
        let back = W2lTable::from_json(&table.to_json().unwrap()).unwrap();
        assert_eq!(back, table);
        let mut broken = table.clone();
        broken.rows[0][0] += 1e-9;
        assert!(W2lTable::from_json(&broken.to_json().unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn sampled_weight_is_exact(q in 0usize..=64, seed in any::<u64>(), frac in 0.0f64..=1.0) {
            let w = ((q as f64) * frac).round() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = sample_vector(w, q, &mut rng).unwrap();
            prop_assert_eq!(v.weight(), w);
            prop_assert_eq!(v.bits() & !mask(q), 0);
        }

        #[test]
        fn weight_monotone_in_l(a in -40.0f64..40.0, b in -40.0f64..40.0, q in 1usize..=64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(prob_to_weight(l_to_prob(hi), q) <= prob_to_weight(l_to_prob(lo), q));
        }

        #[test]
        fn xor_weight_bounds(a in any::<u64>(), b in any::<u64>(), q in 1usize..=64) {
            let x = BinaryVectorMessage::from_bits(a & mask(q), q).unwrap();
            let y = BinaryVectorMessage::from_bits(b & mask(q), q).unwrap();
            let (wa, wb) = (x.weight(), y.weight());
            let w = x.xor(&y).unwrap().weight();
            prop_assert!(wa.abs_diff(wb) <= w);
            prop_assert!(w <= (wa + wb).min(2 * q - wa - wb));
            prop_assert_eq!((w + wa + wb) % 2, 0);
        }

        #[test]
        fn w2l_rows_antisymmetric(raw in proptest::collection::vec(0.0f64..1.0, 1..=17), l_max in 1.0f64..30.0) {
            let s: f64 = raw.iter().sum();
            prop_assume!(s > 0.0);
            let pmf: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let s2: f64 = pmf.iter().sum();
            prop_assume!((s2 - 1.0).abs() <= 1e-12);
            let mut row = w2l_from_distribution(&pmf, l_max).unwrap();
            let q = row.len() - 1;
            for w in 0..=q {
                prop_assert_eq!(row[w], -row[q - w]);
                prop_assert!(row[w].abs() <= l_max);
            }
            enforce_monotone(&mut row);
            for w in 0..=q {
                prop_assert_eq!(row[w], -row[q - w]);
                if w > 0 { prop_assert!(row[w] <= row[w - 1]); }
            }
        }
    }
}
