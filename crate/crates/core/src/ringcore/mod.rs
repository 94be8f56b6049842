//! Parameter sets, polynomial types, reference arithmetic, sampling and
//! single-element inversion.
//!
//! Everything here favours being obviously correct over being fast; the
//! multipliers in [`crate::mul3`] and [`crate::mulq`] are tested against it.

mod inverse;
mod params;
mod poly;
mod sample;

pub use inverse::{invert_r3, invert_rq};
pub use params::{paramset, ParamSet, ALL_PARAMS, DEFAULT_BATCH, SNTRUP653, SNTRUP761, SNTRUP857};
pub use poly::{mul_schoolbook_3, mul_schoolbook_q, Poly3, PolyQ, ShortPoly};
pub use sample::{sample_short, sample_small};

pub(crate) use poly::{add3, center, check_same, fold_trinomial, neg3, sub3};
