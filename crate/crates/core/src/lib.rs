//! Pragmatic space-time trellis codes over MIMO block-fading channels.
//!
//! The crate builds space-time encoders from ordinary convolutional
//! generators, evaluates their diversity and performance factor with an
//! exact matrix-exponent transfer function, searches generator spaces for
//! the best codes, and checks the analysis against Monte Carlo simulation.
//!
//! ```
//! use pstc_core::generators::parse_generators;
//! use pstc_core::gtf::{analyze, GtfMode, TruncationPolicy};
//! use pstc_core::trellis::EncoderConfig;
//!
//! let g = parse_generators(&["1", "2"], 1, 2).unwrap();
//! let cfg = EncoderConfig::new(2, 1, 1, 1, 2, 130);
//! let m = analyze(&g, &cfg, 1, &TruncationPolicy::with_delta_h(5), &GtfMode::time0()).unwrap();
//! assert_eq!(m.eta_min, 2);
//! assert!((m.f_min_per_frame() - 0.083).abs() < 0.005);
//! ```

pub mod catastrophic;
pub mod channel;
pub mod encoder;
pub mod error;
pub mod generators;
pub mod gtf;
pub mod modulation;
pub mod par;
pub mod pep;
pub mod search;
pub mod sim;
pub mod trellis;
pub mod viterbi;

pub use error::{Error, Result};
