//! Raga recognition with sequential pitch distributions.
//!
//! A pitch track and its tonic become a tonic-relative sequence of 10-cent
//! bins ([`ingest`]). For every pair of chromatic pitch values and both
//! directions of travel, the bins crossed by each span between them are
//! pooled into a 120-bin histogram ([`spd`]), giving a `12 x 12 x 2 x 120`
//! tensor per recording. Its sub-views and the plain pitch distribution
//! form 25 features ([`features`]), each classified by its own
//! Bhattacharyya-distance KNN model and combined with learned weights
//! ([`classifier`]). [`evaluation`] runs leave-one-out cross-validation,
//! parameter sweeps and direction-asymmetry analysis; [`synth`] produces
//! labelled synthetic corpora.
//!
//! ```
//! use spd_raga::ingest::BinSequence;
//! use spd_raga::spd::{build_spd, CellKey, Direction, Relaxation};
//!
//! let seq = BinSequence::voiced([0, 0, 10, 10]);
//! let spd = build_spd(&seq, Relaxation::new(0)?);
//! let slice = spd.slice(CellKey::new(0, 10, Direction::Positive)?);
//! assert_eq!((slice[0], slice[10]), (0.5, 0.5));
//! # Ok::<(), spd_raga::Error>(())
//! ```

pub mod cache;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod features;
mod fsutil;
pub mod ingest;
pub mod pipeline;
pub mod spd;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
pub use fsutil::write_atomic;
