//! A thread-safe stock of pre-generated key pairs.
//!
//! The pool is filled lazily by one [`batch_keygen`] call on the first
//! take. Each take copies the next key pair out of the slot buffer and wipes
//! the slot; the take that empties the pool refills it before returning, so
//! at most one take per batch pays for key generation. Fills run under the
//! pool lock and are never observed half done.

use std::sync::{Mutex, MutexGuard};

use rand::{CryptoRng, RngCore};
use zeroize::{Zeroize, Zeroizing};

use crate::kem::{batch_keygen, decode_sk, encode_sk, sk_len, KeyPair};
use crate::ringcore::{ParamSet, DEFAULT_BATCH};
use crate::{Error, Result};

/// Environment variable holding the default pool size.
pub const POOL_SIZE_ENV: &str = "NTRUP_POOL_SIZE";

/// Pool size from `NTRUP_POOL_SIZE`, or 32 when unset.
pub fn pool_size_from_env() -> Result<usize> {
    match std::env::var(POOL_SIZE_ENV) {
        Err(_) => Ok(DEFAULT_BATCH),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::InvalidPoolSize(v)),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolStats {
    /// Fresh key pairs left.
    pub entries: usize,
    pub capacity: usize,
    /// Batch fills performed so far.
    pub fill_count: u64,
}

struct Slots {
    /// `capacity` encoded secret keys (each embeds its public key).
    buf: Zeroizing<Vec<u8>>,
    entries: usize,
    fill_count: u64,
}

pub struct KeyPool {
    params: ParamSet,
    capacity: usize,
    slot_len: usize,
    slots: Mutex<Slots>,
}

impl KeyPool {
    /// A pool sized by `NTRUP_POOL_SIZE` (default 32).
    pub fn new(params: ParamSet) -> Result<KeyPool> {
        KeyPool::with_capacity(params, pool_size_from_env()?)
    }

    pub fn with_capacity(params: ParamSet, capacity: usize) -> Result<KeyPool> {
        if capacity == 0 {
            return Err(Error::InvalidPoolSize("0".into()));
        }
        let slot_len = sk_len(params);
        Ok(KeyPool {
            params,
            capacity,
            slot_len,
            slots: Mutex::new(Slots {
                buf: Zeroizing::new(vec![0; capacity * slot_len]),
                entries: 0,
                fill_count: 0,
            }),
        })
    }

    pub fn params(&self) -> ParamSet {
        self.params
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn lock(&self) -> MutexGuard<'_, Slots> {
        self.slots.lock().expect("key pool lock poisoned")
    }

    fn fill<R: RngCore + CryptoRng + ?Sized>(&self, slots: &mut Slots, rng: &mut R) -> Result<()> {
        let keys = batch_keygen(rng, self.params, self.capacity)?;
        for (slot, kp) in slots.buf.chunks_exact_mut(self.slot_len).zip(&keys) {
            slot.copy_from_slice(&encode_sk(&kp.secret));
        }
        slots.entries = self.capacity;
        slots.fill_count += 1;
        Ok(())
    }

    /// Hands out the next fresh key pair, filling the pool first if it is
    /// empty and refilling it when this take empties it.
    pub fn take<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<KeyPair> {
        let mut slots = self.lock();
        if slots.entries == 0 {
            self.fill(&mut slots, rng)?;
        }
        let index = self.capacity - slots.entries;
        let slot = &mut slots.buf[index * self.slot_len..(index + 1) * self.slot_len];
        let secret = decode_sk(slot);
        slot.zeroize();
        slots.entries -= 1;
        let secret = secret?;
        if slots.entries == 0 {
            self.fill(&mut slots, rng)?;
        }
        Ok(KeyPair {
            public: secret.public_key().clone(),
            secret,
        })
    }

    pub fn stats(&self) -> PoolStats {
        let slots = self.lock();
        PoolStats {
            entries: slots.entries,
            capacity: self.capacity,
            fill_count: slots.fill_count,
        }
    }

    /// Raw bytes of slot `index`, for erasure checks.
    #[doc(hidden)]
    pub fn slot_bytes(&self, index: usize) -> Vec<u8> {
        let slots = self.lock();
        slots.buf[index * self.slot_len..(index + 1) * self.slot_len].to_vec()
    }
}

impl std::fmt::Debug for KeyPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPool")
            .field("params", &self.params)
            .field("stats", &self.stats())
            .finish()
    }
}
