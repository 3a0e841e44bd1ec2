//! Numerical verification of curvature identities and estimates in Kähler
//! geometry on coordinate charts.
//!
//! The crate is organised bottom-up:
//!
//! * [`jet`]: truncated Taylor arithmetic in `z` and `z̄`.
//! * [`geometry`]: chart points, metric fields and the model catalog.
//! * [`curvature`]: Chern curvature, Ricci form, scalar, HSC and HBC.
//! * [`sphere`]: unit-sphere moments and the averaging identities.
//! * [`royden`]: polarization sums and the HSC-to-bisectional bounds.
//! * [`schwarz`]: trace quantities between two metrics and the second-order
//!   estimates built on them.
//! * [`ma`]: a periodic Monge–Ampère solver for the twisted Kähler–Einstein
//!   family.
//! * [`hyperbolicity`]: genus/degree arithmetic, the Poincaré distance and the
//!   subharmonicity estimate for holomorphic discs.
//!
//! Every verifier returns a [`report::VerificationReport`].

pub mod claims;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod hyperbolicity;
pub mod jet;
pub mod linalg;
pub mod ma;
pub mod report;
pub mod royden;
pub mod schwarz;
pub mod sphere;

pub use error::{Error, Result};
pub use num_complex::Complex64;
