//! Multiplication in `(Z/q)[x]` for operands below degree 1024.
//!
//! An operand is cut into 32 blocks of 32 coefficients. Each block becomes
//! an element of `K = (Z/q)[x]/(x^64 + 1)` (high half zero) and the blocks
//! become the coefficients of a polynomial in `y = x^32` over `K`. The
//! product is computed in `K[y]/(y^64 - 1)` with a size-64 transform in
//! which `x`, a primitive 128th root of unity in `K`, supplies all twiddle
//! factors, so twiddles are rotations with sign changes and cost no `Z/q`
//! multiplications. Products inside `K` go through the same construction
//! one level down: `K = S[x]/(x^8 - y)` with `S = (Z/q)[y]/(y^8 + 1)`, a
//! size-16 transform with root `y`, and 8x8 Karatsuba products in `S`.

use crate::instrument;
use crate::ringcore::{check_same, ParamSet, PolyQ};
use crate::{Error, Result};

/// Montgomery and Barrett constants for one modulus, `R = 2^16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zq {
    q: i32,
    /// `q^-1 mod 2^16`
    qinv: i16,
    r_mod_q: i32,
    r2_mod_q: i32,
    /// `round(2^32 / q)`
    barrett: i64,
    /// `R^2 / 16 mod q`, scales the inner inverse transform
    inner_scale: i32,
    /// `R / 64 mod q`, scales the outer inverse transform
    outer_scale: i32,
}

fn pow_mod(b: i64, mut e: u32, m: i64) -> i64 {
    let (mut r, mut b) = (1i64, b.rem_euclid(m));
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl Zq {
    pub fn new(q: i32) -> Zq {
        assert!(q > 2 && q % 2 == 1 && q < 1 << 13, "unsupported modulus {q}");
        let mut inv = q as u32;
        for _ in 0..4 {
            inv = inv.wrapping_mul(2u32.wrapping_sub((q as u32).wrapping_mul(inv)));
        }
        let qi = q as i64;
        let r = (1i64 << 16) % qi;
        let r2 = r * r % qi;
        let inv16 = pow_mod(16, q as u32 - 2, qi);
        let inv64 = pow_mod(64, q as u32 - 2, qi);
        Zq {
            q,
            qinv: inv as u16 as i16,
            r_mod_q: r as i32,
            r2_mod_q: r2 as i32,
            barrett: ((1i64 << 32) + qi / 2) / qi,
            inner_scale: (r2 * inv16 % qi) as i32,
            outer_scale: (r * inv64 % qi) as i32,
        }
    }

    pub fn for_params(params: ParamSet) -> Zq {
        Zq::new(params.q())
    }

    pub fn q(&self) -> i32 {
        self.q
    }

    pub fn r_mod_q(&self) -> i32 {
        self.r_mod_q
    }

    pub fn r2_mod_q(&self) -> i32 {
        self.r2_mod_q
    }

    fn half(&self) -> i32 {
        (self.q - 1) / 2
    }

    /// `t * R^-1 mod q` in `(-q, q)`, for `|t| < 2^15 q`.
    #[inline]
    pub fn montgomery_reduce(&self, t: i32) -> i32 {
        let m = (t as i16).wrapping_mul(self.qinv);
        (t - m as i32 * self.q) >> 16
    }

    #[inline]
    fn center_small(&self, r: i32) -> i16 {
        let h = self.half();
        let r = if r > h {
            r - self.q
        } else if r < -h {
            r + self.q
        } else {
            r
        };
        r as i16
    }

    /// Centered `a * b * R^-1 mod q`.
    #[inline]
    pub fn montmul(&self, a: i16, b: i16) -> i16 {
        self.center_small(self.montgomery_reduce(a as i32 * b as i32))
    }

    /// Centered `x mod q` for any `i32`.
    #[inline]
    pub fn reduce_centered(&self, x: i32) -> i16 {
        let quot = (x as i64 * self.barrett + (1 << 31)) >> 32;
        self.center_small((x as i64 - quot * self.q as i64) as i32)
    }
}

/// Coefficients per element of `K`.
pub const K_LEN: usize = 64;
/// Points of the outer transform.
pub const NTT_LEN: usize = 64;
const BLOCK: usize = 32;
const S_LEN: usize = 8;
const INNER_LEN: usize = 16;
const KARATSUBA8_MULS: u64 = 27;

/// Element of `K = (Z/q)[x]/(x^64 + 1)`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct KElem {
    coeffs: [i16; K_LEN],
    params: ParamSet,
}

impl KElem {
    pub fn zero(params: ParamSet) -> KElem {
        KElem {
            coeffs: [0; K_LEN],
            params,
        }
    }

    pub fn one(params: ParamSet) -> KElem {
        let mut e = KElem::zero(params);
        e.coeffs[0] = 1;
        e
    }

    /// Reduces up to 64 integers into an element; missing coefficients are 0.
    pub fn from_i64(params: ParamSet, coeffs: &[i64]) -> KElem {
        assert!(coeffs.len() <= K_LEN, "K has 64 coefficients");
        let mut e = KElem::zero(params);
        for (o, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *o = crate::ringcore::center(c, params.q());
        }
        e
    }

    pub fn coeffs(&self) -> &[i16; K_LEN] {
        &self.coeffs
    }

    pub fn params(&self) -> ParamSet {
        self.params
    }

    /// `self * x^s` for any `s`; rotation with a sign change on wrap-around.
    pub fn mul_x_pow(&self, s: usize) -> KElem {
        let wide = rotate(&widen(&self.coeffs), s % (2 * K_LEN));
        KElem {
            coeffs: wide.map(|c| c as i16),
            params: self.params,
        }
    }

    fn wide(&self) -> [i32; K_LEN] {
        widen(&self.coeffs)
    }
}

impl std::fmt::Debug for KElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = self.coeffs.iter().rposition(|&c| c != 0);
        write!(f, "KElem({}, {:?})", self.params, &self.coeffs[..d.map_or(0, |d| d + 1)])
    }
}

fn widen<const N: usize>(v: &[i16; N]) -> [i32; N] {
    v.map(i32::from)
}

/// Multiplies by `x^s` in `(Z/q)[x]/(x^N + 1)`, `s < 2N`.
#[inline]
fn rotate<const N: usize>(v: &[i32; N], s: usize) -> [i32; N] {
    debug_assert!(s < 2 * N);
    let (neg, s) = if s >= N { (true, s - N) } else { (false, s) };
    let mut out = [0i32; N];
    let (lo, hi) = out.split_at_mut(s);
    hi.copy_from_slice(&v[..N - s]);
    for (o, &x) in lo.iter_mut().zip(&v[N - s..]) {
        *o = -x;
    }
    if neg {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    out
}

/// Exponents `e` of the CRT nodes `z^(2m) - x^e` for every level of a
/// size-`len` transform over `(Z/q)[x]/(x^N + 1)`, top level first. Node `e`
/// splits into `e/2` and `e/2 + N`, the latter standing for `-x^(e/2)`.
fn node_exponents(len: usize, n: usize) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![0usize]];
    while levels.last().unwrap().len() < len / 2 {
        let next = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|&e| {
                debug_assert!(e % 2 == 0);
                [e / 2, e / 2 + n]
            })
            .collect();
        levels.push(next);
    }
    levels
}

fn forward<const N: usize>(v: &mut [[i32; N]], levels: &[Vec<usize>]) {
    let len = v.len();
    for exps in levels {
        let m = len / exps.len() / 2;
        for (blk, &e) in v.chunks_exact_mut(2 * m).zip(exps) {
            let (lo, hi) = blk.split_at_mut(m);
            for (l, h) in lo.iter_mut().zip(hi.iter_mut()) {
                let r = rotate(h, e / 2);
                for k in 0..N {
                    let a = l[k];
                    l[k] = a + r[k];
                    h[k] = a - r[k];
                }
            }
        }
    }
}

/// Inverse of [`forward`] up to a factor `len`.
fn inverse<const N: usize>(v: &mut [[i32; N]], levels: &[Vec<usize>]) {
    let len = v.len();
    for exps in levels.iter().rev() {
        let m = len / exps.len() / 2;
        for (blk, &e) in v.chunks_exact_mut(2 * m).zip(exps) {
            let back = (2 * N - e / 2) % (2 * N);
            let (lo, hi) = blk.split_at_mut(m);
            for (l, h) in lo.iter_mut().zip(hi.iter_mut()) {
                let mut d = [0i32; N];
                for k in 0..N {
                    d[k] = l[k] - h[k];
                    l[k] += h[k];
                }
                *h = rotate(&d, back);
            }
        }
    }
}

/// Precomputed node exponents for both transform sizes.
struct Plans {
    outer: Vec<Vec<usize>>,
    inner: Vec<Vec<usize>>,
}

fn plans() -> &'static Plans {
    static PLANS: std::sync::OnceLock<Plans> = std::sync::OnceLock::new();
    PLANS.get_or_init(|| Plans {
        outer: node_exponents(NTT_LEN, K_LEN),
        inner: node_exponents(INNER_LEN, S_LEN),
    })
}

#[inline]
fn karatsuba2(a: [i64; 2], b: [i64; 2]) -> [i64; 3] {
    let l = a[0] * b[0];
    let h = a[1] * b[1];
    [l, (a[0] + a[1]) * (b[0] + b[1]) - l - h, h]
}

#[inline]
fn karatsuba4(a: [i64; 4], b: [i64; 4]) -> [i64; 7] {
    let l = karatsuba2([a[0], a[1]], [b[0], b[1]]);
    let h = karatsuba2([a[2], a[3]], [b[2], b[3]]);
    let m = karatsuba2([a[0] + a[2], a[1] + a[3]], [b[0] + b[2], b[1] + b[3]]);
    let mut out = [0i64; 7];
    for i in 0..3 {
        out[i] += l[i];
        out[i + 4] += h[i];
        out[i + 2] += m[i] - l[i] - h[i];
    }
    out
}

/// 8x8 Karatsuba product, 15 coefficients.
#[inline]
fn karatsuba8(a: &[i64; 8], b: &[i64; 8]) -> [i64; 15] {
    let half = |v: &[i64; 8], o: usize| [v[o], v[o + 1], v[o + 2], v[o + 3]];
    let sum = |v: &[i64; 8]| [v[0] + v[4], v[1] + v[5], v[2] + v[6], v[3] + v[7]];
    let l = karatsuba4(half(a, 0), half(b, 0));
    let h = karatsuba4(half(a, 4), half(b, 4));
    let m = karatsuba4(sum(a), sum(b));
    let mut out = [0i64; 15];
    for i in 0..7 {
        out[i] += l[i];
        out[i + 8] += h[i];
        out[i + 4] += m[i] - l[i] - h[i];
    }
    out
}

/// Lifts an element of `K` to 16 elements of `S` (the upper 8 zero).
fn lift_to_s(a: &[i32; K_LEN]) -> [[i32; S_LEN]; INNER_LEN] {
    let mut v = [[0i32; S_LEN]; INNER_LEN];
    for (j, row) in v.iter_mut().take(S_LEN).enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            *c = a[S_LEN * k + j];
        }
    }
    v
}

fn k_mul_wide(zq: &Zq, a: &[i32; K_LEN], b: &[i32; K_LEN]) -> [i16; K_LEN] {
    let inner = &plans().inner;
    let mut va = lift_to_s(a);
    let mut vb = lift_to_s(b);
    forward(&mut va, inner);
    forward(&mut vb, inner);

    let mut prod = [[0i32; S_LEN]; INNER_LEN];
    for ((pa, pb), out) in va.iter().zip(&vb).zip(&mut prod) {
        let ra = pa.map(|c| zq.reduce_centered(c) as i64);
        let rb = pb.map(|c| zq.reduce_centered(c) as i64);
        let full = karatsuba8(&ra, &rb);
        for k in 0..S_LEN {
            let t = full[k] - if k + S_LEN < 15 { full[k + S_LEN] } else { 0 };
            out[k] = zq.center_small(zq.montgomery_reduce(t as i32)) as i32;
        }
    }
    instrument::bump(|c| {
        c.kmul_pointwise += INNER_LEN as u64;
        c.zq_mul += INNER_LEN as u64 * KARATSUBA8_MULS + K_LEN as u64;
    });

    inverse(&mut prod, inner);
    // exponent j + 8k of x, where x^64 = -1
    let mut out = [0i32; K_LEN];
    for (j, row) in prod.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            let c = zq.montmul(zq.reduce_centered(c), zq.inner_scale as i16) as i32;
            let e = j + S_LEN * k;
            if e >= K_LEN {
                out[e - K_LEN] -= c;
            } else {
                out[e] += c;
            }
        }
    }
    out.map(|c| zq.reduce_centered(c))
}

/// Product in `K`.
pub fn k_mul(a: &KElem, b: &KElem) -> KElem {
    assert_eq!(a.params, b.params, "k_mul operands from different parameter sets");
    let zq = Zq::for_params(a.params);
    KElem {
        coeffs: k_mul_wide(&zq, &a.wide(), &b.wide()),
        params: a.params,
    }
}

/// Evaluation-domain form of an element of `K[y]/(y^64 - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVector {
    elems: Vec<KElem>,
}

impl KVector {
    pub fn elems(&self) -> &[KElem] {
        &self.elems
    }

    /// Pointwise product, i.e. the product in `K[y]/(y^64 - 1)`.
    pub fn pointwise(&self, other: &KVector) -> KVector {
        KVector {
            elems: self.elems.iter().zip(&other.elems).map(|(a, b)| k_mul(a, b)).collect(),
        }
    }
}

/// Cuts `a` (degree below 1024) into 32 blocks of 32 coefficients, each in
/// the low half of an element of `K`.
pub fn segment(a: &PolyQ) -> Result<Vec<KElem>> {
    if a.degree().is_some_and(|d| d >= BLOCK * BLOCK) {
        return Err(Error::Precondition(format!(
            "segment needs degree below 1024, got {:?}",
            a.degree()
        )));
    }
    let params = a.params();
    let mut blocks = vec![KElem::zero(params); BLOCK];
    for (i, &c) in a.coeffs().iter().enumerate().take(BLOCK * BLOCK) {
        blocks[i / BLOCK].coeffs[i % BLOCK] = c;
    }
    Ok(blocks)
}

fn check_vector(v: &[KElem]) -> Result<ParamSet> {
    if v.len() != NTT_LEN {
        return Err(Error::Precondition(format!(
            "transform takes {NTT_LEN} elements, got {}",
            v.len()
        )));
    }
    let params = v[0].params;
    for e in v {
        check_same(params, e.params)?;
    }
    Ok(params)
}

fn forward_wide(zq: &Zq, v: &mut [[i32; K_LEN]]) {
    forward(v, &plans().outer);
    for e in v.iter_mut() {
        *e = e.map(|c| zq.reduce_centered(c) as i32);
    }
}

fn inverse_wide(zq: &Zq, v: &mut [[i32; K_LEN]]) {
    inverse(v, &plans().outer);
    for e in v.iter_mut() {
        *e = e.map(|c| zq.montmul(zq.reduce_centered(c), zq.outer_scale as i16) as i32);
    }
    instrument::bump(|c| c.zq_mul += (NTT_LEN * K_LEN) as u64);
}

/// Evaluates the polynomial `sum v[i] y^i` at the 64 points of the transform.
pub fn ntt_forward(v: &[KElem]) -> Result<KVector> {
    let params = check_vector(v)?;
    let zq = Zq::for_params(params);
    let mut w: Vec<[i32; K_LEN]> = v.iter().map(KElem::wide).collect();
    forward_wide(&zq, &mut w);
    Ok(KVector {
        elems: w
            .into_iter()
            .map(|c| KElem {
                coeffs: c.map(|x| x as i16),
                params,
            })
            .collect(),
    })
}

/// Inverse of [`ntt_forward`], including the division by 64.
pub fn ntt_inverse(v: &KVector) -> Vec<KElem> {
    let params = check_vector(&v.elems).expect("KVector holds 64 elements of one parameter set");
    let zq = Zq::for_params(params);
    let mut w: Vec<[i32; K_LEN]> = v.elems.iter().map(KElem::wide).collect();
    inverse_wide(&zq, &mut w);
    w.into_iter()
        .map(|c| KElem {
            coeffs: c.map(|x| x as i16),
            params,
        })
        .collect()
}

fn to_blocks(a: &PolyQ) -> Vec<[i32; K_LEN]> {
    let mut v = vec![[0i32; K_LEN]; NTT_LEN];
    for (i, &c) in a.coeffs().iter().enumerate() {
        v[i / BLOCK][i % BLOCK] = c as i32;
    }
    v
}

/// Full product of two operands with at most 1024 coefficients each.
pub(crate) fn mulq_full(a: &PolyQ, b: &PolyQ) -> Result<PolyQ> {
    check_same(a.params(), b.params())?;
    let limit = BLOCK * BLOCK;
    if a.len() > limit || b.len() > limit {
        return Err(Error::Precondition(format!(
            "mulq operands need at most {limit} coefficients"
        )));
    }
    let params = a.params();
    let zq = Zq::for_params(params);
    let mut va = to_blocks(a);
    let mut vb = to_blocks(b);
    forward_wide(&zq, &mut va);
    forward_wide(&zq, &mut vb);
    let mut prod: Vec<[i32; K_LEN]> = va
        .iter()
        .zip(&vb)
        .map(|(x, y)| k_mul_wide(&zq, x, y).map(i32::from))
        .collect();
    inverse_wide(&zq, &mut prod);

    // overlap-add: block i sits at x^(32 i)
    let len = if a.is_empty() || b.is_empty() { 0 } else { a.len() + b.len() - 1 };
    let mut acc = vec![0i32; BLOCK * (NTT_LEN + 1)];
    for (i, blk) in prod.iter().enumerate() {
        for (j, &c) in blk.iter().enumerate() {
            acc[BLOCK * i + j] += c;
        }
    }
    debug_assert!(acc[len..].iter().all(|&c| zq.reduce_centered(c) == 0));
    let coeffs: Vec<i64> = acc[..len].iter().map(|&c| c as i64).collect();
    Ok(PolyQ::from_i64(params, &coeffs))
}

/// Product in `R/q` of two elements with `p` coefficients.
pub fn mulq_big(a: &PolyQ, b: &PolyQ) -> Result<PolyQ> {
    check_same(a.params(), b.params())?;
    let p = a.params().p();
    if a.len() != p || b.len() != p {
        return Err(Error::Precondition(format!(
            "mulq_big operands must have {p} coefficients"
        )));
    }
    instrument::bump(|c| c.mulq_big += 1);
    Ok(mulq_full(a, b)?.reduce_mod_modulus())
}
