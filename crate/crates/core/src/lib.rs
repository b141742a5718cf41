//! Random orthogonal butterfly matrices as fast implicit operators, their
//! closed-form spectral statistics, and randomized coherence-reduction
//! experiments.
//!
//! The crate is organized around three layers:
//!
//! * samplers and fast applies — [`butterfly`] (simple and non-simple
//!   random butterfly matrices with multiplication-count certification),
//!   [`haar`] (Haar orthogonal matrices as Householder products), [`dct`]
//!   and [`transforms`] (the four randomization schemes);
//! * statistics — [`spectral`] (eigenvalue closed forms, trace moments,
//!   the CLT-failure statistic, spectrum clouds);
//! * experiments — [`coherence`] (thin QR, coherence, test matrices and
//!   the randomized coherence-reduction experiment).
//!
//! Everything is seedable through [`rng::RngState`]; identical seeds replay
//! identical experiments.

pub mod butterfly;
pub mod coherence;
pub mod dct;
pub mod error;
pub mod haar;
pub mod opcount;
pub mod rng;
pub mod spectral;
pub mod transforms;

pub use butterfly::{NonSimpleButterfly, SimpleButterfly};
pub use error::{Error, Result};
pub use haar::HaarOrthogonal;
pub use opcount::OpCounter;
pub use rng::{Angle, RngState};
pub use transforms::{Randomizer, Variant};
