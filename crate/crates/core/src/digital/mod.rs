//! The separated digital baseline: source codec, LDPC and modulation.

pub mod bits;
pub mod codec;
pub mod ldpc;
pub mod modem;
pub mod pipeline;

pub use bits::BitBuffer;
pub use codec::{source_decode, source_encode};
pub use ldpc::{ldpc_decode, ldpc_encode, LdpcCode, LdpcDecodeResult};
pub use modem::{demodulate_llr, modulate, ModFormat};
pub use pipeline::{digital_budget, td_receive_image, td_transmit_image, TdFrame, TdReception};
