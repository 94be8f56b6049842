//! Key generation, core encryption and the KEM.
//!
//! A secret key is a short `f` together with `1/g` in `R/3` for a small
//! invertible `g`; the public key is `h = g/(3f)` in `R/q`. Encryption of a
//! short `r` rounds `h r` to the nearest multiples of 3. Decryption
//! multiplies by `3f`, which gives `g r + 3 f m` with small integer
//! coefficients, so reducing mod 3 and multiplying by `1/g` recovers `r`.
//!
//! The KEM hashes with SHA-256 and a one-byte domain separator: the session
//! key is `H(1 || r || ct)`. Decapsulation re-encrypts the recovered `r`
//! and on any mismatch returns `H(0 || rho || ct)` instead.

mod encoding;

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use zeroize::Zeroize;

use crate::batchinv::{batch_inv, factorize_modulus3, is_invertible, R3, Rq};
use crate::mul3::mul3_ring;
use crate::mulq::mulq_big;
use crate::ringcore::{
    invert_r3, invert_rq, sample_short, sample_small, ParamSet, Poly3, PolyQ, ShortPoly,
};
use crate::{Error, Result};

pub use encoding::{
    ct_len, decode_ct, decode_ct_for, decode_pk, decode_pk_for, decode_sk, encode_ct, encode_pk,
    encode_sk, pk_len, sk_len, CT_MAGIC, PK_MAGIC, SK_MAGIC,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    h: PolyQ,
}

impl PublicKey {
    pub fn h(&self) -> &PolyQ {
        &self.h
    }

    pub fn params(&self) -> ParamSet {
        self.h.params()
    }
}

impl std::fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PublicKey({}, h[..4]={:?})", self.params(), &self.h.coeffs()[..4])
    }
}

/// Secret polynomials are wiped when the key is dropped.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    f: ShortPoly,
    ginv: Poly3,
    rho: [u8; 32],
    pk: PublicKey,
}

impl SecretKey {
    pub fn f(&self) -> &ShortPoly {
        &self.f
    }

    /// `1/g` in `R/3`.
    pub fn ginv(&self) -> &Poly3 {
        &self.ginv
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.pk
    }

    pub fn params(&self) -> ParamSet {
        self.pk.params()
    }

    /// Recomputes `g = h * 3f` in `R/q` and checks that it is small and that
    /// `ginv * g = 1` in `R/3`.
    pub fn is_consistent(&self) -> bool {
        let params = self.params();
        let three_f = self.f.to_polyq().scale(3);
        let Ok(g) = mulq_big(&self.pk.h, &three_f) else {
            return false;
        };
        if g.coeffs().iter().any(|c| c.abs() > 1) {
            return false;
        }
        let g3 = Poly3::from_signed(&g.coeffs().iter().map(|&c| c as i8).collect::<Vec<_>>());
        mul3_ring(&g3, &self.ginv, params) == Poly3::one(params.p())
    }
}

impl Drop for SecretKey {
    fn drop(&mut self) {
        self.f.zeroize();
        self.ginv.zeroize();
        self.rho.zeroize();
    }
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey({}, ..)", self.params())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

/// Every coefficient is a multiple of 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    c: PolyQ,
}

impl Ciphertext {
    pub fn c(&self) -> &PolyQ {
        &self.c
    }

    pub fn params(&self) -> ParamSet {
        self.c.params()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SharedKey([u8; 32]);

impl SharedKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl Drop for SharedKey {
    fn drop(&mut self) {
        self.0.zeroize();
    }
}

impl std::fmt::Debug for SharedKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SharedKey(..)")
    }
}

fn draw_rho<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Result<[u8; 32]> {
    let mut rho = [0u8; 32];
    rng.try_fill_bytes(&mut rho)?;
    Ok(rho)
}

fn finish_key(f: ShortPoly, ginv: Poly3, rho: [u8; 32], h: PolyQ) -> KeyPair {
    let public = PublicKey { h };
    KeyPair {
        secret: SecretKey {
            f,
            ginv,
            rho,
            pk: public.clone(),
        },
        public,
    }
}

/// One key pair with two single inversions. Consumes randomness in the
/// order `g` (repeated until invertible), `f`, `rho`.
pub fn keygen<R: RngCore + CryptoRng + ?Sized>(rng: &mut R, params: ParamSet) -> Result<KeyPair> {
    let (g, ginv) = loop {
        let g = sample_small(rng, params)?;
        match invert_r3(&g, params) {
            Ok(ginv) => break (g, ginv),
            Err(Error::NotInvertible) => continue,
            Err(e) => return Err(e),
        }
    };
    let f = sample_short(rng, params)?;
    let rho = draw_rho(rng)?;
    let finv = invert_rq(&f.to_polyq().scale(3))?;
    let h = mulq_big(&PolyQ::from_poly3(params, &g), &finv)?;
    Ok(finish_key(f, ginv, rho, h))
}

/// `n` key pairs sharing one inversion in `R/3` and one in `R/q`.
///
/// Draws randomness exactly like `n` consecutive [`keygen`] calls, so the
/// same seed yields the same keys.
pub fn batch_keygen<R: RngCore + CryptoRng + ?Sized>(
    rng: &mut R,
    params: ParamSet,
    n: usize,
) -> Result<Vec<KeyPair>> {
    if n == 0 {
        return Err(Error::Precondition("batch size must be at least 1".into()));
    }
    let basis = factorize_modulus3(params);
    let mut gs = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    let mut rhos = Vec::with_capacity(n);
    for _ in 0..n {
        let g = loop {
            let g = sample_small(rng, params)?;
            if is_invertible(&g, basis) {
                break g;
            }
        };
        gs.push(g);
        fs.push(sample_short(rng, params)?);
        rhos.push(draw_rho(rng)?);
    }
    let ginvs = batch_inv(&R3(params), &gs)?;
    let three_f: Vec<PolyQ> = fs.iter().map(|f| f.to_polyq().scale(3)).collect();
    let finvs = batch_inv(&Rq(params), &three_f)?;
    let mut out = Vec::with_capacity(n);
    for ((((g, f), ginv), finv), rho) in gs.iter().zip(fs).zip(ginvs).zip(finvs).zip(rhos) {
        let h = mulq_big(&PolyQ::from_poly3(params, g), &finv)?;
        out.push(finish_key(f, ginv, rho, h));
    }
    gs.iter_mut().for_each(Zeroize::zeroize);
    Ok(out)
}

/// `c = Round(h r)`, each coefficient rounded to the nearest multiple of 3.
pub fn encrypt_core(pk: &PublicKey, r: &ShortPoly) -> Result<Ciphertext> {
    let hr = mulq_big(&pk.h, &r.to_polyq())?;
    let c: Vec<i64> = hr
        .coeffs()
        .iter()
        .map(|&x| {
            let x = x as i64;
            match x.rem_euclid(3) {
                0 => x,
                1 => x - 1,
                _ => x + 1,
            }
        })
        .collect();
    Ok(Ciphertext {
        c: PolyQ::from_i64(pk.params(), &c),
    })
}

/// Recovers `r` from `c`, or `None` when the result is not of weight `w`.
pub fn decrypt_core(sk: &SecretKey, ct: &Ciphertext) -> Option<ShortPoly> {
    let params = sk.params();
    if ct.params() != params {
        return None;
    }
    let e = mulq_big(&ct.c, &sk.f.to_polyq().scale(3)).ok()?;
    let e3 = Poly3::from_coeffs(e.coeffs().iter().map(|&c| (c as i32).rem_euclid(3) as u8).collect());
    let r = mul3_ring(&e3, &sk.ginv, params);
    ShortPoly::new(params, r).ok()
}

fn hash(domain: u8, parts: &[&[u8]]) -> SharedKey {
    let mut h = Sha256::new();
    h.update([domain]);
    for part in parts {
        h.update(part);
    }
    SharedKey(h.finalize().into())
}

fn session_key(r: &ShortPoly, ct_bytes: &[u8]) -> SharedKey {
    let mut trits = zeroize::Zeroizing::new(Vec::new());
    encoding::pack_trits(r.as_poly3(), &mut trits);
    hash(1, &[&trits, ct_bytes])
}

/// A fresh ciphertext and its session key.
pub fn encap<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicKey,
    rng: &mut R,
) -> Result<(Ciphertext, SharedKey)> {
    let mut r = sample_short(rng, pk.params())?;
    let ct = encrypt_core(pk, &r)?;
    let key = session_key(&r, &encode_ct(&ct));
    r.zeroize();
    Ok((ct, key))
}

/// Session key for `ct`. Never fails: an invalid ciphertext yields a
/// pseudorandom key derived from the secret seed.
pub fn decap(sk: &SecretKey, ct: &Ciphertext) -> SharedKey {
    let ct_bytes = encode_ct(ct);
    if let Some(mut r) = decrypt_core(sk, ct) {
        let ok = encrypt_core(&sk.pk, &r).is_ok_and(|c| c == *ct);
        let key = ok.then(|| session_key(&r, &ct_bytes));
        r.zeroize();
        if let Some(key) = key {
            return key;
        }
    }
    hash(0, &[&sk.rho, &ct_bytes])
}
