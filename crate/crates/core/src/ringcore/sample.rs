use rand::{CryptoRng, RngCore};

use super::{ParamSet, Poly3, ShortPoly};
use crate::Result;

/// Uniform element of `{-1, 0, 1}^p`.
pub fn sample_small<R: RngCore + CryptoRng + ?Sized>(rng: &mut R, params: ParamSet) -> Result<Poly3> {
    let p = params.p();
    let mut out = Vec::with_capacity(p);
    let mut buf = [0u8; 256];
    while out.len() < p {
        rng.try_fill_bytes(&mut buf)?;
        // 255 = 3 * 85; dropping it keeps b % 3 uniform
        out.extend(buf.iter().filter(|&&b| b < 255).map(|&b| b % 3).take(p - out.len()));
    }
    Ok(Poly3::from_canonical(out))
}

/// Uniform weight-`w` ternary polynomial: `w` random signs placed at the
/// front of a zero template, then a Fisher-Yates shuffle.
pub fn sample_short<R: RngCore + CryptoRng + ?Sized>(rng: &mut R, params: ParamSet) -> Result<ShortPoly> {
    let (p, w) = (params.p(), params.w());
    let mut c = vec![0u8; p];
    let mut signs = vec![0u8; w.div_ceil(8)];
    rng.try_fill_bytes(&mut signs)?;
    for (i, slot) in c.iter_mut().take(w).enumerate() {
        *slot = 1 + (signs[i / 8] >> (i % 8) & 1);
    }
    for i in (1..p).rev() {
        let j = uniform_below(rng, i as u32 + 1)? as usize;
        c.swap(i, j);
    }
    ShortPoly::new(params, Poly3::from_canonical(c))
}

fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, n: u32) -> Result<u32> {
    let zone = u32::MAX - u32::MAX % n;
    loop {
        let mut b = [0u8; 4];
        rng.try_fill_bytes(&mut b)?;
        let v = u32::from_le_bytes(b);
        if v < zone {
            return Ok(v % n);
        }
    }
}
