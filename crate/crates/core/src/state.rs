//! Syndrome information: the scalar decoder state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::message::BinaryVectorMessage;

/// Measured syndrome information and its quantization bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderState {
    pub i_s: f64,
    pub bin: usize,
}

impl DecoderState {
    pub fn new(i_s: f64, bins: usize) -> Self {
        DecoderState {
            i_s,
            bin: state_bin(i_s, bins),
        }
    }
}

/// `floor(i_s * bins)`, with `i_s = 1` folded into the top bin.
pub fn state_bin(i_s: f64, bins: usize) -> usize {
    debug_assert!(bins >= 1);
    let b = (i_s.clamp(0.0, 1.0) * bins as f64).floor() as usize;
    b.min(bins - 1)
}

fn entropy_bits(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// `H(½(p(w) + p(Q-w))) - H(p(w))` in bits for a weight pmf over `0..=Q`.
pub fn syndrome_information(pmf: &[f64]) -> f64 {
    let q = pmf.len() - 1;
    let h = entropy_bits(pmf.iter().copied());
    let h_sym = entropy_bits((0..=q).map(|w| 0.5 * (pmf[w] + pmf[q - w])));
    (h_sym - h).clamp(0.0, 1.0)
}

/// Syndrome information from a histogram of syndrome message weights.
pub fn syndrome_information_from_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    syndrome_information(&pmf)
}

/// Decoder state from the a-priori messages of every check node: each check's
/// syndrome message is the XOR of all its inputs.
pub fn measure_state(
    checks: &[Vec<BinaryVectorMessage>],
    q: usize,
    bins: usize,
) -> Result<DecoderState> {
    if checks.is_empty() {
        return Err(Error::InvalidParameter("no check nodes".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter(
            "state bins must be positive".into(),
        ));
    }
    let mut counts = vec![0usize; q + 1];
    for incoming in checks {
        let mut s = BinaryVectorMessage::zeros(q);
        for msg in incoming {
            s = s.xor(msg)?;
        }
        counts[s.weight()] += 1;
    }
    Ok(DecoderState::new(
        syndrome_information_from_counts(&counts),
        bins,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_at_zero_is_one() {
        assert_eq!(syndrome_information(&[1.0, 0.0, 0.0, 0.0]), 1.0);
        let msgs = vec![vec![BinaryVectorMessage::zeros(5); 6]; 10];
        let s = measure_state(&msgs, 5, 20).unwrap();
        assert_eq!(s.i_s, 1.0);
        assert_eq!(s.bin, 19);
    }

    #[test]
    fn symmetric_is_zero() {
        assert_eq!(syndrome_information(&[0.1, 0.2, 0.4, 0.2, 0.1]), 0.0);
        assert!(syndrome_information(&[0.3, 0.1, 0.2, 0.1, 0.3]).abs() < 1e-12);
    }

    #[test]
    fn worked_q2_case() {
        // Symmetrized (0.25, 0.5, 0.25) has 1.5 bits; the pmf itself 1 bit.
        assert!((syndrome_information(&[0.5, 0.5, 0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn measured_from_messages() {
        let one = BinaryVectorMessage::from_slice(&[1, 0]).unwrap();
        let zero = BinaryVectorMessage::zeros(2);
        // Two checks with syndrome weight 0, two with weight 1.
        let checks = vec![
            vec![zero, zero, zero],
            vec![one, one, zero],
            vec![one, zero, zero],
            vec![zero, one, zero],
        ];
        let s = measure_state(&checks, 2, 20).unwrap();
        assert!((s.i_s - 0.5).abs() < 1e-12);
        assert_eq!(s.bin, 10);
        assert!(measure_state(&[], 2, 20).is_err());
    }

    #[test]
    fn bins() {
        assert_eq!(state_bin(0.0, 20), 0);
        assert_eq!(state_bin(0.049, 20), 0);
        assert_eq!(state_bin(0.05, 20), 1);
        assert_eq!(state_bin(0.999, 20), 19);
        assert_eq!(state_bin(1.0, 20), 19);
    }
}
