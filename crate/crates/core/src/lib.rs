//! Adaptive binary vector message passing decoding of regular LDPC codes.
//!
//! Messages on the Tanner graph are length-`Q` bit vectors whose Hamming
//! weight encodes the reliability of a code bit. Variable nodes convert
//! incoming weights to L-values through look-up tables computed by density
//! evolution; check nodes XOR. The tables, and optionally the message length
//! itself, are selected at run time from the syndrome information, a scalar
//! measure of decoder progress computed from the messages entering the
//! check nodes.

pub mod campaign;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod density;
pub mod error;
pub mod message;
pub mod schedule;
pub mod state;

pub use channel::ChannelParams;
pub use code::{Encoder, LdpcCode};
pub use decoder::{DecodeResult, Decoder, DecoderConfig, DecoderMode};
pub use density::{DeEngine, DeTrace, WeightDistribution};
pub use error::{Error, Result};
pub use message::{BinaryVectorMessage, W2lTable};
pub use schedule::LengthSchedule;
pub use state::DecoderState;
