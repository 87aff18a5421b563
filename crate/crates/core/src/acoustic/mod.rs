//! Shoebox-room simulation: image-method impulse responses and multichannel
//! microphone signal synthesis with per-source bookkeeping.

mod rir;
mod room;
pub mod signals;
mod synth;
pub mod wav;

pub use rir::{
    critical_distance, estimate_t60, generate_rir, generate_rir_set, schroeder_curve_db, RirSet,
};
pub use room::{ArrayGeometry, Point3, RoomScenario, SourceSpec, DEFAULT_ARRAY_HEIGHT};
pub use synth::{synthesize, synthesize_with_rirs, MicSignals};
