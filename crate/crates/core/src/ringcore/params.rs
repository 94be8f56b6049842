use std::fmt;

use crate::{Error, Result};

/// One Streamlined NTRU Prime instance.
///
/// Only the three constants [`SNTRUP653`], [`SNTRUP761`] and [`SNTRUP857`]
/// exist; look them up with [`paramset`] or [`ParamSet::from_group_id`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamSet {
    p: usize,
    q: i32,
    w: usize,
    group_id: u8,
    default_batch: usize,
}

pub const DEFAULT_BATCH: usize = 32;

pub const SNTRUP653: ParamSet = ParamSet::raw(653, 4621, 288, 0x01);
pub const SNTRUP761: ParamSet = ParamSet::raw(761, 4591, 286, 0x02);
pub const SNTRUP857: ParamSet = ParamSet::raw(857, 5167, 322, 0x03);

pub const ALL_PARAMS: [ParamSet; 3] = [SNTRUP653, SNTRUP761, SNTRUP857];

impl ParamSet {
    const fn raw(p: usize, q: i32, w: usize, group_id: u8) -> Self {
        ParamSet {
            p,
            q,
            w,
            group_id,
            default_batch: DEFAULT_BATCH,
        }
    }

    /// Polynomial degree; the ring modulus is `x^p - x - 1`.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> i32 {
        self.q
    }

    /// Number of nonzero coefficients of a short polynomial.
    pub fn w(&self) -> usize {
        self.w
    }

    pub fn group_id(&self) -> u8 {
        self.group_id
    }

    pub fn default_batch(&self) -> usize {
        self.default_batch
    }

    /// `(q - 1) / 2`, the bound of the centered representation.
    pub fn half_q(&self) -> i32 {
        (self.q - 1) / 2
    }

    pub fn from_group_id(id: u8) -> Result<ParamSet> {
        ALL_PARAMS
            .into_iter()
            .find(|ps| ps.group_id == id)
            .ok_or(Error::UnknownGroup(id))
    }

    /// Checks the constraints every instance must satisfy.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Precondition(format!("sntrup{}: {what}", self.p)));
        if !is_prime(self.p as u64) {
            return fail("p is not prime");
        }
        if self.q < 3 || !is_prime(self.q as u64) {
            return fail("q is not prime");
        }
        if self.w == 0 || 2 * self.p < 3 * self.w {
            return fail("weight out of range");
        }
        if (self.q as usize) < 16 * self.w + 1 {
            return fail("q < 16w + 1");
        }
        if self.half_q() % 3 != 0 {
            return fail("(q - 1)/2 is not a multiple of 3");
        }
        if self.q >= 1 << 13 {
            return fail("q too large for 16-bit Montgomery arithmetic");
        }
        Ok(())
    }
}

impl fmt::Debug for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sntrup{}(q={}, w={})", self.p, self.q, self.w)
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sntrup{}", self.p)
    }
}

/// Looks up a parameter set by its degree `p` (653, 761 or 857).
pub fn paramset(id: u32) -> Result<ParamSet> {
    ALL_PARAMS
        .into_iter()
        .find(|ps| ps.p as u32 == id)
        .ok_or(Error::UnsupportedParameter(id))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}
