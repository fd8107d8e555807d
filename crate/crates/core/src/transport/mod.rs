//! Discrete-time analog transmission: the linear analog mapper, PAPR,
//! tributary serialization, pilots and the IM/DD intensity mapping.

mod bias;
mod mapper;
mod papr;
mod pilots;
mod serial;

pub use bias::{imdd_bias_map, imdd_bias_unmap, BiasMapped};
pub use mapper::{analog_decode, analog_encode, AnalogMapping, BandwidthRatio, SLOTS};
pub use papr::{papr, PaprReport};
pub use pilots::{insert_pilots, pilot_count, pilot_positions, strip_pilots};
pub use serial::{parallel_to_serial, serial_to_parallel, Tributaries};
