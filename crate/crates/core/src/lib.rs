//! Hard-decision product code built from extended, shortened BCH(255, 239)
//! components with t = 2, giving the (195, 178)^2 code of 38,025 bits.
//!
//! * [`gf256`]: GF(2^8) tables and the `x^2 + x + c` root lookup.
//! * [`bch`]: systematic BCH encoder and the direct two-syndrome decoder.
//! * [`component`]: the shortened, parity-extended component code.
//! * [`product`]: product encoder, iterative decoder, post-processing.
//! * [`analysis`]: error-floor estimate, net coding gain, cycle model.
//! * [`channel`] and [`sim`]: BSC and 4-PAM/AWGN channels, Monte-Carlo runs.
//!
//! ```
//! use ebch_tpc::{DecoderConfig, ProductCode};
//!
//! let code = ProductCode::default();
//! let info = vec![1u8; code.info_len()];
//! let mut rx = code.encode(&info).unwrap();
//! rx.flip(3, 7);
//! rx.flip(100, 42);
//! let report = code.decode(&rx, &DecoderConfig::default()).unwrap();
//! assert!(report.success);
//! assert_eq!(code.extract_info(&report.matrix), info);
//! ```

pub mod analysis;
pub mod bch;
pub mod channel;
pub mod component;
pub mod error;
pub mod gf256;
pub mod product;
pub mod sim;

pub use channel::ChannelConfig;
pub use component::{ComponentCode, ComponentOutcome, ComponentStatus};
pub use error::{Error, Result};
pub use gf256::GfElement;
pub use product::{
    DecodeReport, DecoderConfig, FailureRegisters, Orientation, ProductCode, ProductMatrix,
    Schedule,
};
pub use sim::{SimConfig, SimStats};

/// Floating-point type used by the simulation and the CLI.
pub type Real = f64;

pub type FloorEstimate = analysis::FloorEstimate<Real>;
pub type FloorEstimateF32 = analysis::FloorEstimate<f32>;
