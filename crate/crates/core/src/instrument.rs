//! Per-thread operation counters.
//!
//! Counters are bumped at function granularity (one update per ring-level
//! call), so they stay enabled in release builds. They are thread-local: a
//! caller measuring an operation reads [`snapshot`] before and after on the
//! same thread and subtracts.
//!
//! ```
//! use sntrup_core::{instrument, keygen, SNTRUP761};
//! let mut rng = rand::thread_rng();
//! let before = instrument::snapshot();
//! keygen(&mut rng, SNTRUP761).unwrap();
//! let spent = instrument::snapshot() - before;
//! assert_eq!(spent.inv_rq, 1);
//! ```

use std::cell::Cell;
use std::ops::Sub;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Single-element inversions in `R/3` (successful or not).
    pub inv_r3: u64,
    /// Single-element inversions in `R/q`.
    pub inv_rq: u64,
    /// Ring multiplications in `R/3` through `mul3_ring`.
    pub mul3_ring: u64,
    /// Ring multiplications in `R/q` through `mulq_big`.
    pub mulq_big: u64,
    /// Recursive sub-products issued by the five-way multiplier.
    pub fiveway_submul: u64,
    /// Pointwise size-8 Karatsuba products inside `k_mul`.
    pub kmul_pointwise: u64,
    /// Scalar multiplications in `Z/q` performed by the NTT multiplier.
    pub zq_mul: u64,
    /// Invertibility checks via Barrett remainders.
    pub is_invertible: u64,
}

impl Sub for Counters {
    type Output = Counters;

    fn sub(self, rhs: Counters) -> Counters {
        Counters {
            inv_r3: self.inv_r3 - rhs.inv_r3,
            inv_rq: self.inv_rq - rhs.inv_rq,
            mul3_ring: self.mul3_ring - rhs.mul3_ring,
            mulq_big: self.mulq_big - rhs.mulq_big,
            fiveway_submul: self.fiveway_submul - rhs.fiveway_submul,
            kmul_pointwise: self.kmul_pointwise - rhs.kmul_pointwise,
            zq_mul: self.zq_mul - rhs.zq_mul,
            is_invertible: self.is_invertible - rhs.is_invertible,
        }
    }
}

thread_local! {
    static COUNTERS: Cell<Counters> = Cell::new(Counters::default());
}

/// Current counter values for the calling thread.
pub fn snapshot() -> Counters {
    COUNTERS.with(Cell::get)
}

pub fn reset() {
    COUNTERS.with(|c| c.set(Counters::default()));
}

pub(crate) fn bump(update: impl FnOnce(&mut Counters)) {
    COUNTERS.with(|c| {
        let mut v = c.get();
        update(&mut v);
        c.set(v);
    });
}
