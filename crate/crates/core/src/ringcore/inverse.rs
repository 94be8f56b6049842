//! Single-element inversion in `R/3` and `R/q` with the textbook extended
//! Euclidean algorithm over `GF(m)[x]`. Variable time.

use super::{center, ParamSet, Poly3, PolyQ};
use crate::instrument;
use crate::{Error, Result};

fn pow_mod(b: u32, mut e: u32, m: u32) -> u32 {
    let m = m as u64;
    let (mut r, mut b) = (1u64, b as u64 % m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

fn inv_mod(a: u32, m: u32) -> u32 {
    debug_assert!(a % m != 0);
    pow_mod(a, m - 2, m)
}

fn deg(v: &[u32]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

/// Returns `u` with `u * a = 1 mod modulus` over `GF(m)`, or `None` when
/// `gcd(a, modulus)` has positive degree. `a` must be shorter than
/// `modulus`; the result has `deg(modulus)` coefficients.
pub(crate) fn xgcd_inverse(a: &[u32], modulus: &[u32], m: u32) -> Option<Vec<u32>> {
    let n = deg(modulus).expect("zero modulus");
    assert!(a.len() <= n, "input longer than the modulus degree");

    // r0 = s0 * a and r1 = s1 * a (mod modulus) throughout.
    let mut r0 = modulus.to_vec();
    let mut s0 = vec![0u32; n + 1];
    let mut r1 = a.to_vec();
    r1.resize(n + 1, 0);
    let mut s1 = vec![0u32; n + 1];
    s1[0] = 1;

    while let Some(d1) = deg(&r1) {
        let lead_inv = inv_mod(r1[d1], m);
        // r0 <- r0 mod r1; deg(s1) + shift <= n always holds here
        while let Some(d0) = deg(&r0).filter(|&d| d >= d1) {
            let neg = m - r0[d0] * lead_inv % m;
            let shift = d0 - d1;
            for i in 0..=d1 {
                r0[i + shift] = (r0[i + shift] + neg * r1[i]) % m;
            }
            for i in 0..=(n - shift) {
                if s1[i] != 0 {
                    s0[i + shift] = (s0[i + shift] + neg * s1[i]) % m;
                }
            }
        }
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut s0, &mut s1);
    }
    if deg(&r0) != Some(0) {
        return None;
    }
    let k = inv_mod(r0[0], m);
    let mut u: Vec<u32> = s0.iter().map(|&c| c * k % m).collect();
    debug_assert!(deg(&u).map_or(true, |d| d < n));
    u.truncate(n);
    Some(u)
}

fn modulus_coeffs(p: usize, m: u32) -> Vec<u32> {
    let mut v = vec![0u32; p + 1];
    v[0] = m - 1;
    v[1] = m - 1;
    v[p] = 1;
    v
}

/// `1/g` in `R/3`, or [`Error::NotInvertible`] when `g` shares a factor
/// with `x^p - x - 1`. Not being invertible is an ordinary outcome.
pub fn invert_r3(g: &Poly3, params: ParamSet) -> Result<Poly3> {
    let p = params.p();
    if g.len() != p {
        return Err(Error::Precondition(format!(
            "invert_r3 expects {p} coefficients, got {}",
            g.len()
        )));
    }
    instrument::bump(|c| c.inv_r3 += 1);
    let a: Vec<u32> = g.coeffs().iter().map(|&c| c as u32).collect();
    let u = xgcd_inverse(&a, &modulus_coeffs(p, 3), 3).ok_or(Error::NotInvertible)?;
    Ok(Poly3::from_canonical(u.into_iter().map(|c| c as u8).collect()))
}

/// `1/a` in the field `R/q`.
pub fn invert_rq(a: &PolyQ) -> Result<PolyQ> {
    let params = a.params();
    let p = params.p();
    if a.len() != p {
        return Err(Error::Precondition(format!(
            "invert_rq expects {p} coefficients, got {}",
            a.len()
        )));
    }
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    instrument::bump(|c| c.inv_rq += 1);
    let q = params.q() as u32;
    let v: Vec<u32> = a
        .coeffs()
        .iter()
        .map(|&c| (c as i32).rem_euclid(q as i32) as u32)
        .collect();
    let u = xgcd_inverse(&v, &modulus_coeffs(p, q), q)
        .expect("x^p - x - 1 is irreducible mod q, so every nonzero element is a unit");
    let c: Vec<i16> = u.into_iter().map(|c| center(c as i64, q as i32)).collect();
    Ok(PolyQ::from_centered(params, c))
}
