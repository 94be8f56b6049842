//! Byte formats. All integers little-endian; every object starts with an
//! 8-byte magic and the group id of its parameter set.
//!
//! | object | layout after the header |
//! |---|---|
//! | public key | `p` x u16: `h_i + (q-1)/2` |
//! | ciphertext | `p` x u16: `c_i/3 + (q-1)/6` |
//! | secret key | trits of `f`, trits of `1/g`, 32-byte `rho`, encoded public key |
//!
//! Trits are packed four per byte, two bits each starting from the low
//! bits: `0 -> 00`, `1 -> 01`, `-1 -> 10`.

use zeroize::Zeroizing;

use super::{Ciphertext, PublicKey, SecretKey};
use crate::ringcore::{ParamSet, Poly3, PolyQ, ShortPoly};
use crate::{DecodeError, Result};

pub const PK_MAGIC: &[u8; 8] = b"SNTRUPK1";
pub const CT_MAGIC: &[u8; 8] = b"SNTRUCT1";
pub const SK_MAGIC: &[u8; 8] = b"SNTRUSK1";
const HEADER: usize = 9;
const RHO_LEN: usize = 32;

pub fn pk_len(params: ParamSet) -> usize {
    HEADER + 2 * params.p()
}

pub fn ct_len(params: ParamSet) -> usize {
    HEADER + 2 * params.p()
}

pub fn sk_len(params: ParamSet) -> usize {
    HEADER + 2 * trits_len(params.p()) + RHO_LEN + pk_len(params)
}

fn trits_len(p: usize) -> usize {
    p.div_ceil(4)
}

fn magic_name(magic: &'static [u8; 8]) -> &'static str {
    std::str::from_utf8(magic).unwrap()
}

/// Checks magic and returns the parameter set named by the group byte.
fn header(bytes: &[u8], magic: &'static [u8; 8]) -> Result<ParamSet> {
    if bytes.len() < HEADER || &bytes[..8] != magic {
        return Err(DecodeError::BadMagic {
            expected: magic_name(magic),
        }
        .into());
    }
    ParamSet::from_group_id(bytes[8]).map_err(|_| DecodeError::UnknownGroup(bytes[8]).into())
}

fn check_len(bytes: &[u8], expected: usize) -> Result<()> {
    if bytes.len() != expected {
        return Err(DecodeError::WrongLength {
            expected,
            found: bytes.len(),
        }
        .into());
    }
    Ok(())
}

pub(crate) fn pack_trits(a: &Poly3, out: &mut Vec<u8>) {
    for chunk in a.coeffs().chunks(4) {
        let mut b = 0u8;
        for (i, &c) in chunk.iter().enumerate() {
            b |= c << (2 * i);
        }
        out.push(b);
    }
}

fn unpack_trits(bytes: &[u8], p: usize) -> Result<Poly3> {
    let mut c = Vec::with_capacity(p);
    for (k, &b) in bytes.iter().enumerate() {
        for i in 0..4 {
            let v = (b >> (2 * i)) & 3;
            let index = 4 * k + i;
            if v == 3 || (index >= p && v != 0) {
                return Err(DecodeError::CoefficientOutOfRange { index }.into());
            }
            if index < p {
                c.push(v);
            }
        }
    }
    Ok(Poly3::from_coeffs(c))
}

pub fn encode_pk(pk: &PublicKey) -> Vec<u8> {
    let params = pk.params();
    let mut out = Vec::with_capacity(pk_len(params));
    out.extend_from_slice(PK_MAGIC);
    out.push(params.group_id());
    for &c in pk.h.coeffs() {
        out.extend_from_slice(&((c as i32 + params.half_q()) as u16).to_le_bytes());
    }
    out
}

pub fn decode_pk(bytes: &[u8]) -> Result<PublicKey> {
    let params = header(bytes, PK_MAGIC)?;
    check_len(bytes, pk_len(params))?;
    let half = params.half_q();
    let mut h = Vec::with_capacity(params.p());
    for (index, pair) in bytes[HEADER..].chunks_exact(2).enumerate() {
        let v = u16::from_le_bytes([pair[0], pair[1]]) as i32;
        if v > 2 * half {
            return Err(DecodeError::CoefficientOutOfRange { index }.into());
        }
        h.push((v - half) as i64);
    }
    Ok(PublicKey {
        h: PolyQ::from_i64(params, &h),
    })
}

pub fn encode_ct(ct: &Ciphertext) -> Vec<u8> {
    let params = ct.params();
    let mut out = Vec::with_capacity(ct_len(params));
    out.extend_from_slice(CT_MAGIC);
    out.push(params.group_id());
    let off = params.half_q() / 3;
    for &c in ct.c.coeffs() {
        out.extend_from_slice(&((c as i32 / 3 + off) as u16).to_le_bytes());
    }
    out
}

pub fn decode_ct(bytes: &[u8]) -> Result<Ciphertext> {
    let params = header(bytes, CT_MAGIC)?;
    check_len(bytes, ct_len(params))?;
    let off = params.half_q() / 3;
    let mut c = Vec::with_capacity(params.p());
    for (index, pair) in bytes[HEADER..].chunks_exact(2).enumerate() {
        let v = u16::from_le_bytes([pair[0], pair[1]]) as i32;
        if v > 2 * off {
            return Err(DecodeError::CoefficientOutOfRange { index }.into());
        }
        c.push(3 * (v - off) as i64);
    }
    Ok(Ciphertext {
        c: PolyQ::from_i64(params, &c),
    })
}

pub fn encode_sk(sk: &SecretKey) -> Zeroizing<Vec<u8>> {
    let params = sk.params();
    let mut out = Zeroizing::new(Vec::with_capacity(sk_len(params)));
    out.extend_from_slice(SK_MAGIC);
    out.push(params.group_id());
    pack_trits(sk.f.as_poly3(), &mut out);
    pack_trits(&sk.ginv, &mut out);
    out.extend_from_slice(&sk.rho);
    out.extend_from_slice(&encode_pk(&sk.pk));
    out
}

pub fn decode_sk(bytes: &[u8]) -> Result<SecretKey> {
    let params = header(bytes, SK_MAGIC)?;
    check_len(bytes, sk_len(params))?;
    let (p, t) = (params.p(), trits_len(params.p()));
    let mut at = HEADER;
    let f = unpack_trits(&bytes[at..at + t], p)?;
    at += t;
    if f.weight() != params.w() {
        return Err(DecodeError::WeightMismatch {
            expected: params.w(),
            found: f.weight(),
        }
        .into());
    }
    let ginv = unpack_trits(&bytes[at..at + t], p)?;
    at += t;
    let mut rho = [0u8; RHO_LEN];
    rho.copy_from_slice(&bytes[at..at + RHO_LEN]);
    at += RHO_LEN;
    let pk = decode_pk(&bytes[at..])?;
    if pk.params() != params {
        return Err(DecodeError::WrongGroup {
            expected: params.group_id(),
            found: pk.params().group_id(),
        }
        .into());
    }
    Ok(SecretKey {
        f: ShortPoly::new(params, f).expect("length and weight checked"),
        ginv,
        rho,
        pk,
    })
}

/// Decodes and additionally requires the parameter set `params`.
pub fn decode_pk_for(params: ParamSet, bytes: &[u8]) -> Result<PublicKey> {
    expect_group(params, bytes)?;
    decode_pk(bytes)
}

pub fn decode_ct_for(params: ParamSet, bytes: &[u8]) -> Result<Ciphertext> {
    expect_group(params, bytes)?;
    decode_ct(bytes)
}

fn expect_group(params: ParamSet, bytes: &[u8]) -> Result<()> {
    match bytes.get(8) {
        Some(&g) if g != params.group_id() => Err(DecodeError::WrongGroup {
            expected: params.group_id(),
            found: g,
        }
        .into()),
        _ => Ok(()),
    }
}
