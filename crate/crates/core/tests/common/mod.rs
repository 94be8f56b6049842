//! Reference arithmetic written independently of the library, plus random
//! input helpers.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sntrup_core::{ParamSet, Poly3, PolyQ};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_poly3(rng: &mut impl Rng, len: usize) -> Poly3 {
    Poly3::from_coeffs((0..len).map(|_| rng.gen_range(0..3u8)).collect())
}

pub fn random_polyq(rng: &mut impl Rng, params: ParamSet, len: usize) -> PolyQ {
    let q = params.q() as i64;
    let c: Vec<i64> = (0..len).map(|_| rng.gen_range(0..q)).collect();
    PolyQ::from_i64(params, &c)
}

fn residue(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

fn centered(x: i64, m: i64) -> i64 {
    let r = residue(x, m);
    if r > (m - 1) / 2 {
        r - m
    } else {
        r
    }
}

/// `sum_{i+j=k} a_i b_j` over the integers.
pub fn convolve(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    (0..a.len() + b.len() - 1)
        .map(|k| {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            (lo..=hi).map(|i| a[i] * b[k - i]).sum()
        })
        .collect()
}

pub fn signed3(a: &Poly3) -> Vec<i64> {
    a.to_signed().into_iter().map(i64::from).collect()
}

pub fn wide(a: &PolyQ) -> Vec<i64> {
    a.coeffs().iter().map(|&c| c as i64).collect()
}

pub fn to_poly3(v: &[i64]) -> Poly3 {
    Poly3::from_coeffs(v.iter().map(|&c| residue(c, 3) as u8).collect())
}

pub fn conv3(a: &Poly3, b: &Poly3) -> Poly3 {
    to_poly3(&convolve(&signed3(a), &signed3(b)))
}

/// 64-bit accumulation, one reduction at the end.
pub fn convq(a: &PolyQ, b: &PolyQ) -> PolyQ {
    PolyQ::from_i64(a.params(), &convolve(&wide(a), &wide(b)))
}

/// Remainder of long division by `x^p - x - 1` over `Z/m`, centered.
pub fn long_div_rem(a: &[i64], p: usize, m: i64) -> Vec<i64> {
    let mut r: Vec<i64> = a.iter().map(|&c| residue(c, m)).collect();
    r.resize(r.len().max(p), 0);
    for i in (p..r.len()).rev() {
        let lead = r[i];
        if lead == 0 {
            continue;
        }
        // subtract lead * x^(i-p) * (x^p - x - 1)
        r[i] = 0;
        r[i - p + 1] = residue(r[i - p + 1] + lead, m);
        r[i - p] = residue(r[i - p] + lead, m);
    }
    r.truncate(p);
    r.into_iter().map(|c| centered(c, m)).collect()
}

pub fn ring_mul3(a: &Poly3, b: &Poly3, p: usize) -> Poly3 {
    to_poly3(&long_div_rem(&convolve(&signed3(a), &signed3(b)), p, 3))
}

pub fn ring_mulq(a: &PolyQ, b: &PolyQ) -> PolyQ {
    let params = a.params();
    let r = long_div_rem(&convolve(&wide(a), &wide(b)), params.p(), params.q() as i64);
    PolyQ::from_i64(params, &r)
}

/// Product in `(Z/q)[x]/(x^n + 1)`.
pub fn negacyclic(a: &[i16], b: &[i16], q: i64) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for i in 0..n {
        for j in 0..n {
            let t = a[i] as i64 * b[j] as i64;
            if i + j < n {
                out[i + j] += t;
            } else {
                out[i + j - n] -= t;
            }
        }
    }
    out.into_iter().map(|c| centered(c, q)).collect()
}

fn trim(v: &mut Vec<i64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Whether `gcd(g, x^p - x - 1)` over `Z/3` is a nonzero constant.
pub fn coprime_to_modulus3(g: &Poly3, p: usize) -> bool {
    let mut a = vec![0i64; p + 1];
    a[0] = 2;
    a[1] = 2;
    a[p] = 1;
    let mut b: Vec<i64> = g.coeffs().iter().map(|&c| c as i64).collect();
    trim(&mut b);
    while !b.is_empty() {
        // a mod b; leading coefficients are 1 or 2, each its own inverse
        let lb = *b.last().unwrap();
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let factor = a.last().unwrap() * lb % 3;
            for (k, &c) in b.iter().enumerate() {
                a[shift + k] = residue(a[shift + k] - factor * c, 3);
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}
