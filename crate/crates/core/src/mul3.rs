//! Multiplication in `(Z/3)[x]`.
//!
//! Coefficients are bytes in `{0, 1, 2}`. The base case multiplies two
//! 16-coefficient polynomials by packing four coefficients into each `u32`
//! and using ordinary integer products: one 4x4 block convolution adds at
//! most four terms of size at most 4 into each byte lane, and a full 16x16
//! convolution at most 64, so nothing carries across lanes. Longer products
//! use Karatsuba on power-of-two lengths. Operands of length up to `3n - 1`
//! can instead be split into three segments and multiplied with five
//! length-`n` products by evaluating at `0, 1, -1, x` and infinity.

use crate::instrument;
use crate::ringcore::{add3, neg3, sub3, ParamSet, Poly3};
use crate::{Error, Result};

const BASE: usize = 16;

fn is_pow2_len(n: usize) -> bool {
    n >= BASE && n.is_power_of_two()
}

#[inline]
fn pack4(c: &[u8]) -> u32 {
    u32::from_le_bytes([c[0], c[1], c[2], c[3]])
}

/// `a`, `b`: 16 coefficients each. Writes 32 coefficients (the last is 0).
fn base16(a: &[u8], b: &[u8], out: &mut [u8]) {
    let mut aw = [0u32; 4];
    let mut bw = [0u32; 4];
    for i in 0..4 {
        aw[i] = pack4(&a[4 * i..]);
        bw[i] = pack4(&b[4 * i..]);
    }
    let mut acc = [0u32; 8];
    for (i, &x) in aw.iter().enumerate() {
        for (j, &y) in bw.iter().enumerate() {
            let t = x as u64 * y as u64;
            acc[i + j] += t as u32;
            acc[i + j + 1] += (t >> 32) as u32;
        }
    }
    for (chunk, word) in out[..32].chunks_exact_mut(4).zip(acc) {
        for (s, c) in chunk.iter_mut().enumerate() {
            *c = (word >> (8 * s)) as u8 % 3;
        }
    }
}

/// Equal power-of-two lengths `n >= 16`; writes `2n` coefficients.
fn karatsuba(a: &[u8], b: &[u8], out: &mut [u8]) {
    let n = a.len();
    debug_assert!(is_pow2_len(n) && b.len() == n && out.len() == 2 * n);
    if n == BASE {
        return base16(a, b, out);
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    {
        let (lo, hi) = out.split_at_mut(n);
        karatsuba(a0, b0, lo);
        karatsuba(a1, b1, hi);
    }
    let sa: Vec<u8> = a0.iter().zip(a1).map(|(&x, &y)| add3(x, y)).collect();
    let sb: Vec<u8> = b0.iter().zip(b1).map(|(&x, &y)| add3(x, y)).collect();
    let mut mid = vec![0u8; n];
    karatsuba(&sa, &sb, &mut mid);
    for (i, m) in mid.iter_mut().enumerate() {
        *m = sub3(sub3(*m, out[i]), out[n + i]);
    }
    for (o, &m) in out[h..h + n].iter_mut().zip(&mid) {
        *o = add3(*o, m);
    }
}

fn padded(a: &Poly3, len: usize) -> Vec<u8> {
    let mut v = a.coeffs().to_vec();
    v.resize(len, 0);
    v
}

fn product_len(a: &Poly3, b: &Poly3) -> usize {
    if a.is_empty() || b.is_empty() {
        0
    } else {
        a.len() + b.len() - 1
    }
}

/// Product of two polynomials with at most 16 coefficients each.
pub fn mul3_base16(a: &Poly3, b: &Poly3) -> Poly3 {
    assert!(a.len() <= BASE && b.len() <= BASE, "mul3_base16 takes at most 16 coefficients");
    let mut out = vec![0u8; 2 * BASE];
    base16(&padded(a, BASE), &padded(b, BASE), &mut out);
    out.truncate(product_len(a, b));
    Poly3::from_canonical(out)
}

/// Karatsuba product of two polynomials of equal length `16 * 2^k`.
/// The result has `2n - 1` coefficients.
pub fn mul3_pow2(a: &Poly3, b: &Poly3) -> Result<Poly3> {
    let n = a.len();
    if !is_pow2_len(n) || b.len() != n {
        return Err(Error::Precondition(format!(
            "mul3_pow2 needs equal lengths 16 * 2^k, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut out = vec![0u8; 2 * n];
    karatsuba(a.coeffs(), b.coeffs(), &mut out);
    out.truncate(2 * n - 1);
    Ok(Poly3::from_canonical(out))
}

/// `a`, `b`: `3n` coefficients with the top one zero. Returns `6n`
/// coefficients of which the top three are zero.
fn fiveway(a: &[u8], b: &[u8], n: usize) -> Vec<u8> {
    let seg = |v: &[u8]| (v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n..3 * n].to_vec());
    let (f0, f1, f2) = seg(a);
    let (g0, g1, g2) = seg(b);
    debug_assert!(f2[n - 1] == 0 && g2[n - 1] == 0);

    let mul = |x: &[u8], y: &[u8]| {
        let mut out = vec![0u8; 2 * n];
        karatsuba(x, y, &mut out);
        out
    };
    let at_plus = |s0: &[u8], s1: &[u8], s2: &[u8]| -> Vec<u8> {
        (0..n).map(|i| add3(add3(s0[i], s1[i]), s2[i])).collect()
    };
    let at_minus = |s0: &[u8], s1: &[u8], s2: &[u8]| -> Vec<u8> {
        (0..n).map(|i| add3(sub3(s0[i], s1[i]), s2[i])).collect()
    };
    // s0 + s1 x + s2 x^2 has n + 1 coefficients
    let at_x = |s0: &[u8], s1: &[u8], s2: &[u8]| -> Vec<u8> {
        (0..=n)
            .map(|i| {
                let mut c = if i < n { s0[i] } else { 0 };
                if i >= 1 {
                    c = add3(c, s1[i - 1]);
                }
                if i >= 2 {
                    c = add3(c, s2[i - 2]);
                }
                c
            })
            .collect()
    };

    let h0 = mul(&f0, &g0);
    let h1 = mul(&at_plus(&f0, &f1, &f2), &at_plus(&g0, &g1, &g2));
    let hm1 = mul(&at_minus(&f0, &f1, &f2), &at_minus(&g0, &g1, &g2));
    let hinf = mul(&f2, &g2);
    let (px, qx) = (at_x(&f0, &f1, &f2), at_x(&g0, &g1, &g2));
    let mut hx = mul(&px[..n], &qx[..n]);
    hx.push(0);
    let (pn, qn) = (px[n], qx[n]);
    for i in 0..n {
        hx[n + i] = add3(hx[n + i], (pn * qx[i] + qn * px[i]) % 3);
    }
    hx[2 * n] = add3(hx[2 * n], pn * qn % 3);
    instrument::bump(|c| c.fiveway_submul += 5);

    let plus: Vec<u8> = (0..2 * n).map(|i| add3(h1[i], hm1[i])).collect();
    let minus: Vec<u8> = (0..2 * n).map(|i| sub3(h1[i], hm1[i])).collect();

    // N = (H(1) + H(-1)) x + (H(1) - H(-1)) + (H(x) - H(0))/x + H(0) x
    //   = (H3 + H4 x)(x^2 - 1)
    let mut num: Vec<u8> = (0..2 * n)
        .map(|i| {
            let mut c = add3(minus[i], sub3(hx[i + 1], h0.get(i + 1).copied().unwrap_or(0)));
            if i >= 1 {
                c = add3(c, add3(plus[i - 1], h0[i - 1]));
            }
            c
        })
        .collect();
    div_x2m1_in_place(&mut num);
    assert!(num[0] == 0 && num[1] == 0, "five-way interpolation left a remainder");
    let v2 = &num[2..];
    let u: Vec<u8> = (0..2 * n - 2)
        .map(|i| if i >= 1 { sub3(v2[i], hinf[i - 1]) } else { v2[i] })
        .collect();

    let mut out = vec![0u8; 6 * n];
    let mut acc = |offset: usize, v: &[u8]| {
        for (o, &c) in out[offset..].iter_mut().zip(v) {
            *o = add3(*o, c);
        }
    };
    acc(0, &h0);
    let t1: Vec<u8> = (0..2 * n)
        .map(|i| neg3(add3(u.get(i).copied().unwrap_or(0), minus[i])))
        .collect();
    acc(n, &t1);
    let t2: Vec<u8> = (0..2 * n)
        .map(|i| neg3(add3(add3(h0[i], plus[i]), hinf[i])))
        .collect();
    acc(2 * n, &t2);
    acc(3 * n, &u);
    acc(4 * n, &hinf);
    out
}

/// Product of `a` and `b` (degree at most `3n - 2`, top segments of degree
/// at most `n - 2`) with five length-`n` Karatsuba products. The result has
/// `6n - 3` coefficients.
pub fn mul3_5way(a: &Poly3, b: &Poly3, n: usize) -> Result<Poly3> {
    if !is_pow2_len(n) {
        return Err(Error::Precondition(format!(
            "five-way segment length must be 16 * 2^k, got {n}"
        )));
    }
    for v in [a, b] {
        if v.degree().is_some_and(|d| d > 3 * n - 2) {
            return Err(Error::Precondition(format!(
                "five-way with n = {n} needs degree at most {}, got {:?}",
                3 * n - 2,
                v.degree()
            )));
        }
    }
    let trim = |v: &Poly3| padded(&v.resized(v.len().min(3 * n)), 3 * n);
    let mut out = fiveway(&trim(a), &trim(b), n);
    out.truncate(6 * n - 3);
    Ok(Poly3::from_canonical(out))
}

/// Result of dividing by `x^2 - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivX2m1 {
    pub quotient: Poly3,
    pub remainder: Poly3,
    /// Coefficient additions performed.
    pub additions: u64,
}

/// Replaces the coefficient pairs `P_i` of `buf` by the suffix sums
/// `P_i + P_{i+1} + ...`. Afterwards `buf[..2]` is the remainder modulo
/// `x^2 - 1` and `buf[2..]` the quotient.
fn div_x2m1_in_place(buf: &mut [u8]) -> u64 {
    let n = buf.len();
    debug_assert!(n >= 4 && n.is_power_of_two());
    let mut additions = 0;
    let mut block = 4;
    while block <= n {
        let half = block / 2;
        for chunk in buf.chunks_exact_mut(block) {
            let (c0, c1) = (chunk[half], chunk[half + 1]);
            for pair in chunk[..half].chunks_exact_mut(2) {
                pair[0] = add3(pair[0], c0);
                pair[1] = add3(pair[1], c1);
            }
        }
        additions += n as u64 / 2;
        block *= 2;
    }
    additions
}

/// Division by `x^2 - 1` of a polynomial with `2^l >= 4` coefficients,
/// in `l - 1` passes of `n/2` additions each.
pub fn div_x2m1(f: &Poly3) -> Result<DivX2m1> {
    let n = f.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Precondition(format!(
            "div_x2m1 needs a power-of-two length of at least 4, got {n}"
        )));
    }
    let mut buf = f.coeffs().to_vec();
    let additions = div_x2m1_in_place(&mut buf);
    let quotient = Poly3::from_canonical(buf.split_off(2));
    Ok(DivX2m1 {
        quotient,
        remainder: Poly3::from_canonical(buf),
        additions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Base,
    Karatsuba,
    /// Five products of length `n`.
    FiveWay { n: usize },
}

/// How operands of up to `target_len` coefficients get multiplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mul3Plan {
    pub target_len: usize,
    pub strategy: Strategy,
}

impl Mul3Plan {
    /// Picks a strategy for operands with at most `len` coefficients. The
    /// five-way split is used when it needs segments a quarter of the
    /// Karatsuba length, where it costs 5 instead of 9 quarter-size products.
    pub fn for_len(len: usize) -> Mul3Plan {
        if len <= BASE {
            return Mul3Plan {
                target_len: BASE,
                strategy: Strategy::Base,
            };
        }
        let n2 = len.next_power_of_two();
        let n5 = n2 / 4;
        if n5 >= BASE && len < 3 * n5 {
            Mul3Plan {
                target_len: 3 * n5 - 1,
                strategy: Strategy::FiveWay { n: n5 },
            }
        } else {
            Mul3Plan {
                target_len: n2,
                strategy: Strategy::Karatsuba,
            }
        }
    }

    pub fn for_params(params: ParamSet) -> Mul3Plan {
        Mul3Plan::for_len(params.p())
    }

    /// Full product of two operands of at most `target_len` coefficients.
    pub fn multiply(&self, a: &Poly3, b: &Poly3) -> Poly3 {
        assert!(
            a.len() <= self.target_len && b.len() <= self.target_len,
            "operands longer than the plan's {} coefficients",
            self.target_len
        );
        let len = product_len(a, b);
        let mut out = match self.strategy {
            Strategy::Base => mul3_base16(a, b).into_coeffs(),
            Strategy::Karatsuba => {
                let n = self.target_len;
                let mut out = vec![0u8; 2 * n];
                karatsuba(&padded(a, n), &padded(b, n), &mut out);
                out
            }
            Strategy::FiveWay { n } => fiveway(&padded(a, 3 * n), &padded(b, 3 * n), n),
        };
        out.resize(len, 0);
        Poly3::from_canonical(out)
    }
}

/// Product in `R/3`.
///
/// Panics unless both operands have exactly `p` coefficients.
pub fn mul3_ring(a: &Poly3, b: &Poly3, params: ParamSet) -> Poly3 {
    let p = params.p();
    assert!(a.len() == p && b.len() == p, "mul3_ring operands must have {p} coefficients");
    instrument::bump(|c| c.mul3_ring += 1);
    Mul3Plan::for_params(params)
        .multiply(a, b)
        .reduce_mod_modulus(p)
}

/// Coefficients `lo..hi` of `a * b`, computed from Karatsuba products of
/// `block`-sized segments; segment pairs that cannot reach the window are
/// skipped, which makes this cheap for unbalanced operands and for narrow
/// windows.
pub fn mul3_window(a: &Poly3, b: &Poly3, block: usize, lo: usize, hi: usize) -> Result<Poly3> {
    if !is_pow2_len(block) || lo > hi {
        return Err(Error::Precondition(format!(
            "bad window product: block {block}, window {lo}..{hi}"
        )));
    }
    let blocks = |v: &Poly3| -> Vec<Option<Vec<u8>>> {
        v.coeffs()
            .chunks(block)
            .map(|c| {
                c.iter().any(|&x| x != 0).then(|| {
                    let mut c = c.to_vec();
                    c.resize(block, 0);
                    c
                })
            })
            .collect()
    };
    let (ab, bb) = (blocks(a), blocks(b));
    let mut out = vec![0u8; hi - lo];
    let mut prod = vec![0u8; 2 * block];
    for (i, x) in ab.iter().enumerate() {
        let Some(x) = x else { continue };
        for (j, y) in bb.iter().enumerate() {
            let Some(y) = y else { continue };
            let start = (i + j) * block;
            if start >= hi || start + 2 * block - 1 <= lo {
                continue;
            }
            karatsuba(x, y, &mut prod);
            for k in start.max(lo)..(start + 2 * block).min(hi) {
                out[k - lo] = add3(out[k - lo], prod[k - start]);
            }
        }
    }
    Ok(Poly3::from_canonical(out))
}

/// Full product of arbitrary-length operands.
pub(crate) fn mul3_full(a: &Poly3, b: &Poly3) -> Poly3 {
    Mul3Plan::for_len(a.len().max(b.len())).multiply(a, b)
}
