//! Cycle-accurate functional simulator and analytical performance model
//! of a multi-mode CNN inference engine built on the generalized
//! fully-connected inspired dataflow (GFID).
//!
//! The engine runs both convolutional and fully-connected layers on the
//! same 192 processing elements (32 reconfigurable tiles of 6 PEs). A
//! filter-row pass is described by a sparse schedule matrix assigning a
//! weight index to each (clock cycle, output pixel) pair; the tile
//! regroups its PEs per filter mode and streams one shared input pixel
//! per cycle.
//!
//! Module map:
//! - [`model`]: layer/network descriptors, tensors, 16-bit fixed point.
//! - [`gfid`]: schedule matrices, PE counts, utilization formulas, modes.
//! - [`oracle`]: naive reference kernels (real and fixed point).
//! - [`tile`]: cycle-stepped model of one reconfigurable tile.
//! - [`engine`]: the full 32-tile engine with measured counters.
//! - [`perf`]: closed-form cycles/memory/efficiency model and reports.
//! - [`mod@reference`]: published baseline figures for comparison.
//! - [`cli`]: report/simulate/validate/schedule command implementations.

pub mod cli;
pub mod datagen;
pub mod engine;
pub mod error;
pub mod gfid;
pub mod model;
pub mod oracle;
pub mod perf;
pub mod reference;
pub mod tile;

pub use engine::{EngineConfig, SimResult};
pub use error::{Error, Result};
pub use gfid::{GfidSchedule, TileModeConfig};
pub use model::{ConvLayerConfig, FcLayerConfig, NetworkDescriptor};
