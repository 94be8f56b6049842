//! Streamlined NTRU Prime (`sntrup653`, `sntrup761`, `sntrup857`) with
//! amortized batch key generation.
//!
//! Key generation normally needs two ring inversions per key: `1/g` in
//! `R/3 = (Z/3)[x]/(x^p - x - 1)` and `1/(3f)` in `R/q`. [`kem::batch_keygen`]
//! replaces the `2n` inversions of `n` keys by two batch inversions
//! ([`batchinv::batch_inv`]), each costing one inversion plus `3n - 3` ring
//! multiplications. The multiplications are served by:
//!
//! - [`mul3`]: Karatsuba over a packed 16x16 base multiplier and a five-way
//!   split for 768-coefficient products in `(Z/3)[x]`,
//! - [`mulq`]: a radix-2 NTT over `K = (Z/q)[x]/(x^64 + 1)` where `x` is a
//!   root of unity, with Nussbaumer-style products inside `K`.
//!
//! Invertibility of `g` in `R/3` is decided up front with Barrett remainders
//! modulo the irreducible factors of `x^p - x - 1` over `Z/3`.
//!
//! [`keypool::KeyPool`] keeps a thread-safe stock of pre-generated key pairs
//! per parameter set and refills it one batch at a time.
//!
//! # Security
//!
//! Inversion uses a plain (variable-time) extended Euclidean algorithm and
//! nothing here is hardened against side channels. The wire encodings are
//! this crate's own and are not compatible with the NIST submission.

pub mod batchinv;
mod error;
pub mod instrument;
pub mod kem;
pub mod keypool;
pub mod mul3;
pub mod mulq;
pub mod ringcore;

pub use error::{DecodeError, Error, Result};
pub use kem::{
    batch_keygen, decap, encap, keygen, Ciphertext, KeyPair, PublicKey, SecretKey, SharedKey,
};
pub use keypool::KeyPool;
pub use ringcore::{paramset, ParamSet, Poly3, PolyQ, ShortPoly, SNTRUP653, SNTRUP761, SNTRUP857};
