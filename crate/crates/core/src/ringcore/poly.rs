use std::fmt;

use zeroize::Zeroize;

use super::ParamSet;
use crate::{Error, Result};

/// Element of `(Z/3)[x]`, one coefficient per byte in `{0, 1, 2}`.
///
/// The length is part of the value: ring elements of `R/3` have length `p`,
/// products before reduction have length `2p - 1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly3 {
    coeffs: Vec<u8>,
}

#[inline]
pub(crate) fn add3(a: u8, b: u8) -> u8 {
    let s = a + b;
    if s >= 3 {
        s - 3
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub3(a: u8, b: u8) -> u8 {
    add3(a, 3 - b)
}

#[inline]
pub(crate) fn neg3(a: u8) -> u8 {
    if a == 0 {
        0
    } else {
        3 - a
    }
}

impl Poly3 {
    pub fn zero(len: usize) -> Self {
        Poly3 {
            coeffs: vec![0; len],
        }
    }

    pub fn one(len: usize) -> Self {
        Self::monomial(0, len)
    }

    /// `x^k` padded to `len` coefficients.
    pub fn monomial(k: usize, len: usize) -> Self {
        assert!(k < len, "monomial x^{k} does not fit in {len} coefficients");
        let mut p = Self::zero(len);
        p.coeffs[k] = 1;
        p
    }

    /// Takes arbitrary bytes and reduces each one mod 3.
    pub fn from_coeffs(mut coeffs: Vec<u8>) -> Self {
        for c in &mut coeffs {
            *c %= 3;
        }
        Poly3 { coeffs }
    }

    pub fn from_signed(coeffs: &[i8]) -> Self {
        Poly3 {
            coeffs: coeffs.iter().map(|&c| (c as i32).rem_euclid(3) as u8).collect(),
        }
    }

    pub(crate) fn from_canonical(coeffs: Vec<u8>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < 3));
        Poly3 { coeffs }
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub(crate) fn into_coeffs(self) -> Vec<u8> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `i` lifted to `{-1, 0, 1}`.
    pub fn signed(&self, i: usize) -> i8 {
        match self.coeffs[i] {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    pub fn to_signed(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.signed(i)).collect()
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Zero-pads or truncates to `len` coefficients.
    pub fn resized(&self, len: usize) -> Poly3 {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, 0);
        Poly3 { coeffs }
    }

    pub fn add(&self, other: &Poly3) -> Poly3 {
        let len = self.len().max(other.len());
        let mut out = self.resized(len);
        for (o, &b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o = add3(*o, b);
        }
        out
    }

    pub fn sub(&self, other: &Poly3) -> Poly3 {
        let len = self.len().max(other.len());
        let mut out = self.resized(len);
        for (o, &b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o = sub3(*o, b);
        }
        out
    }

    /// Reduces modulo `x^p - x - 1` to exactly `p` coefficients by folding
    /// each coefficient `i >= p` into positions `i - p` and `i - p + 1`.
    pub fn reduce_mod_modulus(&self, p: usize) -> Poly3 {
        let mut c = self.coeffs.clone();
        fold_trinomial(&mut c, p, add3);
        c.resize(p, 0);
        Poly3 { coeffs: c }
    }
}

/// In-place `x^p = x + 1` folding, top-down so that spill-over from very
/// long inputs is folded again.
pub(crate) fn fold_trinomial<T: Copy + Default>(c: &mut Vec<T>, p: usize, add: impl Fn(T, T) -> T) {
    for i in (p..c.len()).rev() {
        let v = std::mem::take(&mut c[i]);
        c[i - p] = add(c[i - p], v);
        c[i - p + 1] = add(c[i - p + 1], v);
    }
    c.truncate(p);
}

impl fmt::Debug for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly3(len={}, ", self.len())?;
        match self.degree() {
            None => write!(f, "0)"),
            Some(d) if d < 24 => write!(f, "{:?})", self.to_signed()[..=d].to_vec()),
            Some(d) => write!(f, "deg={d}, weight={})", self.weight()),
        }
    }
}

impl Zeroize for Poly3 {
    fn zeroize(&mut self) {
        self.coeffs.zeroize();
    }
}

/// Element of `(Z/q)[x]` for the `q` of an attached parameter set,
/// coefficients stored centered in `[-(q-1)/2, (q-1)/2]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyQ {
    coeffs: Vec<i16>,
    params: ParamSet,
}

/// Centered representative of `x mod q`.
#[inline]
pub(crate) fn center(x: i64, q: i32) -> i16 {
    let q = q as i64;
    let mut r = x.rem_euclid(q);
    if r > (q - 1) / 2 {
        r -= q;
    }
    r as i16
}

impl PolyQ {
    pub fn zero(params: ParamSet, len: usize) -> Self {
        PolyQ {
            coeffs: vec![0; len],
            params,
        }
    }

    pub fn one(params: ParamSet) -> Self {
        Self::monomial(params, 0, params.p())
    }

    pub fn monomial(params: ParamSet, k: usize, len: usize) -> Self {
        assert!(k < len, "monomial x^{k} does not fit in {len} coefficients");
        let mut p = Self::zero(params, len);
        p.coeffs[k] = 1;
        p
    }

    /// Reduces arbitrary integers into the centered range.
    pub fn from_i64(params: ParamSet, coeffs: &[i64]) -> Self {
        PolyQ {
            coeffs: coeffs.iter().map(|&c| center(c, params.q())).collect(),
            params,
        }
    }

    pub fn from_i16(params: ParamSet, coeffs: &[i16]) -> Self {
        PolyQ {
            coeffs: coeffs.iter().map(|&c| center(c as i64, params.q())).collect(),
            params,
        }
    }

    /// Lifts a `Z/3` polynomial with coefficients in `{-1, 0, 1}`.
    pub fn from_poly3(params: ParamSet, a: &Poly3) -> Self {
        PolyQ {
            coeffs: a.to_signed().into_iter().map(i16::from).collect(),
            params,
        }
    }

    pub(crate) fn from_centered(params: ParamSet, coeffs: Vec<i16>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| (c as i32).abs() <= params.half_q()));
        PolyQ { coeffs, params }
    }

    pub fn coeffs(&self) -> &[i16] {
        &self.coeffs
    }

    pub fn params(&self) -> ParamSet {
        self.params
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn resized(&self, len: usize) -> PolyQ {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, 0);
        PolyQ {
            coeffs,
            params: self.params,
        }
    }

    pub fn add(&self, other: &PolyQ) -> Result<PolyQ> {
        check_same(self.params, other.params)?;
        let len = self.len().max(other.len());
        let a = self.resized(len);
        let sum: Vec<i64> = (0..len)
            .map(|i| a.coeffs[i] as i64 + other.coeffs.get(i).copied().unwrap_or(0) as i64)
            .collect();
        Ok(PolyQ::from_i64(self.params, &sum))
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, k: i64) -> PolyQ {
        let v: Vec<i64> = self.coeffs.iter().map(|&c| c as i64 * k).collect();
        PolyQ::from_i64(self.params, &v)
    }

    /// Reduces modulo `x^p - x - 1` to exactly `p` coefficients.
    pub fn reduce_mod_modulus(&self) -> PolyQ {
        let p = self.params.p();
        let mut c: Vec<i32> = self.coeffs.iter().map(|&c| c as i32).collect();
        fold_trinomial(&mut c, p, |a, b| a + b);
        c.resize(p, 0);
        PolyQ {
            coeffs: c.into_iter().map(|v| center(v as i64, self.params.q())).collect(),
            params: self.params,
        }
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({}, len={}, ", self.params, self.len())?;
        match self.degree() {
            None => write!(f, "0)"),
            Some(d) if d < 16 => write!(f, "{:?})", &self.coeffs[..=d]),
            Some(d) => write!(f, "deg={d})"),
        }
    }
}

pub(crate) fn check_same(a: ParamSet, b: ParamSet) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ParamMismatch {
            left: a.p(),
            right: b.p(),
        })
    }
}

/// A length-`p` ternary polynomial of weight exactly `w`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ShortPoly {
    poly: Poly3,
    params: ParamSet,
}

impl ShortPoly {
    pub fn new(params: ParamSet, poly: Poly3) -> Result<Self> {
        if poly.len() != params.p() {
            return Err(Error::Precondition(format!(
                "short polynomial needs {} coefficients, got {}",
                params.p(),
                poly.len()
            )));
        }
        if poly.weight() != params.w() {
            return Err(Error::Precondition(format!(
                "short polynomial needs weight {}, got {}",
                params.w(),
                poly.weight()
            )));
        }
        Ok(ShortPoly { poly, params })
    }

    pub fn as_poly3(&self) -> &Poly3 {
        &self.poly
    }

    pub fn params(&self) -> ParamSet {
        self.params
    }

    pub fn to_polyq(&self) -> PolyQ {
        PolyQ::from_poly3(self.params, &self.poly)
    }
}

impl fmt::Debug for ShortPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShortPoly({}, weight={})", self.params, self.poly.weight())
    }
}

impl Zeroize for ShortPoly {
    fn zeroize(&mut self) {
        self.poly.zeroize();
    }
}

/// Exact product in `(Z/3)[x]`, length `len(a) + len(b) - 1`.
pub fn mul_schoolbook_3(a: &Poly3, b: &Poly3) -> Poly3 {
    if a.is_empty() || b.is_empty() {
        return Poly3::zero(0);
    }
    let mut acc = vec![0u16; a.len() + b.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (slot, &y) in acc[i..].iter_mut().zip(&b.coeffs) {
            *slot += (x * y) as u16;
        }
        // keeps every slot well below u16::MAX for any input length
        if i % 4096 == 4095 {
            acc.iter_mut().for_each(|s| *s %= 3);
        }
    }
    Poly3::from_canonical(acc.into_iter().map(|s| (s % 3) as u8).collect())
}

/// Exact product in `(Z/q)[x]`, length `len(a) + len(b) - 1`, re-centered.
pub fn mul_schoolbook_q(a: &PolyQ, b: &PolyQ) -> Result<PolyQ> {
    check_same(a.params, b.params)?;
    let params = a.params;
    if a.is_empty() || b.is_empty() {
        return Ok(PolyQ::zero(params, 0));
    }
    let q = params.q();
    let mut acc = vec![0i32; a.len() + b.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        for (slot, &y) in acc[i..].iter_mut().zip(&b.coeffs) {
            *slot += x as i32 * y as i32;
        }
        // |x*y| < 2^23, so 128 rows never overflow a slot already reduced mod q
        if i % 128 == 127 {
            acc.iter_mut().for_each(|s| *s %= q);
        }
    }
    Ok(PolyQ {
        coeffs: acc.into_iter().map(|s| center(s as i64, q)).collect(),
        params,
    })
}
