//! Batch inversion and the invertibility test for `R/3`.
//!
//! [`batch_inv`] inverts `n` ring elements with one single inversion and
//! `3n - 3` multiplications (prefix products, then a backwards sweep).
//!
//! Over `Z/3` the modulus `x^p - x - 1` is a product of a few distinct
//! irreducible factors `f_i`, so `g` is invertible in `R/3` exactly when
//! no `g mod f_i` is zero. [`factorize_modulus3`] finds the factors once per
//! parameter set and [`is_invertible`] computes the remainders with
//! precomputed Barrett quotients `q_x = floor(x^D_g / f_i)`.

use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::instrument;
use crate::mul3::{mul3_full, mul3_ring, mul3_window};
use crate::mulq::mulq_big;
use crate::ringcore::{
    add3, fold_trinomial, invert_r3, invert_rq, sub3, ParamSet, Poly3, PolyQ, ALL_PARAMS,
};
use crate::{Error, Result};

/// A ring in which [`batch_inv`] can run.
pub trait InversionRing {
    type Elem: Clone;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Single-element inversion.
    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// Cheap unit test, used to locate the culprit after a failed batch.
    fn is_unit(&self, a: &Self::Elem) -> bool;
}

/// `R/3` for one parameter set.
#[derive(Clone, Copy, Debug)]
pub struct R3(pub ParamSet);

/// `R/q` for one parameter set.
#[derive(Clone, Copy, Debug)]
pub struct Rq(pub ParamSet);

impl InversionRing for R3 {
    type Elem = Poly3;

    fn mul(&self, a: &Poly3, b: &Poly3) -> Poly3 {
        mul3_ring(a, b, self.0)
    }

    fn invert(&self, a: &Poly3) -> Result<Poly3> {
        invert_r3(a, self.0)
    }

    fn is_unit(&self, a: &Poly3) -> bool {
        is_invertible(a, factorize_modulus3(self.0))
    }
}

impl InversionRing for Rq {
    type Elem = PolyQ;

    fn mul(&self, a: &PolyQ, b: &PolyQ) -> PolyQ {
        mulq_big(a, b).expect("operands of one R/q element set")
    }

    fn invert(&self, a: &PolyQ) -> Result<PolyQ> {
        invert_rq(a)
    }

    fn is_unit(&self, a: &PolyQ) -> bool {
        !a.is_zero()
    }
}

/// Inverts every element with one call to [`InversionRing::invert`] and
/// `3n - 3` calls to [`InversionRing::mul`].
///
/// Fails with [`Error::NotInvertibleAt`] naming the first element that is
/// not a unit.
pub fn batch_inv<R: InversionRing>(ring: &R, elems: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let n = elems.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut prefix = Vec::with_capacity(n);
    prefix.push(elems[0].clone());
    for a in &elems[1..] {
        let next = ring.mul(prefix.last().unwrap(), a);
        prefix.push(next);
    }
    let mut t = match ring.invert(&prefix[n - 1]) {
        Ok(t) => t,
        Err(Error::NotInvertible | Error::DivisionByZero) => {
            let i = elems.iter().position(|a| !ring.is_unit(a)).unwrap_or(0);
            return Err(Error::NotInvertibleAt(i));
        }
        Err(e) => return Err(e),
    };
    let mut out = vec![None; n];
    for i in (1..n).rev() {
        out[i] = Some(ring.mul(&t, &prefix[i - 1]));
        t = ring.mul(&t, &elems[i]);
    }
    out[0] = Some(t);
    Ok(out.into_iter().map(Option::unwrap).collect())
}

// Dense polynomials over Z/3 as coefficient vectors without trailing zeros.

fn trim(mut v: Vec<u8>) -> Vec<u8> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn deg(v: &[u8]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

/// In `Z/3` every nonzero element is its own inverse.
fn monic(v: Vec<u8>) -> Vec<u8> {
    let mut v = trim(v);
    if let Some(&lead) = v.last() {
        for c in &mut v {
            *c = *c * lead % 3;
        }
    }
    v
}

fn divrem(a: &[u8], b: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let db = deg(b).expect("division by zero polynomial");
    let inv = b[db];
    let mut r = a.to_vec();
    let mut q = vec![0u8; a.len().saturating_sub(db)];
    for i in (db..r.len()).rev() {
        if r[i] == 0 {
            continue;
        }
        let f = r[i] * inv % 3;
        q[i - db] = f;
        for (j, &bj) in b[..=db].iter().enumerate() {
            r[i - db + j] = sub3(r[i - db + j], f * bj % 3);
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn rem(a: &[u8], b: &[u8]) -> Vec<u8> {
    divrem(a, b).1
}

fn gcd(a: &[u8], b: &[u8]) -> Vec<u8> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn sub_poly(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = a.to_vec();
    out.resize(a.len().max(b.len()), 0);
    for (o, &c) in out.iter_mut().zip(b) {
        *o = sub3(*o, c);
    }
    trim(out)
}

fn mul_poly(a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let a = Poly3::from_canonical(a.to_vec());
    let b = Poly3::from_canonical(b.to_vec());
    trim(mul3_full(&a, &b).into_coeffs())
}

/// `h^3 = h(x^3)` reduced by the trinomial `x^p - x - 1`.
fn cube_mod_trinomial(h: &[u8], p: usize) -> Vec<u8> {
    let mut spread = vec![0u8; 3 * h.len()];
    for (i, &c) in h.iter().enumerate() {
        spread[3 * i] = c;
    }
    fold_trinomial(&mut spread, p, add3);
    spread
}

/// `h^3 mod m` for a general modulus.
fn cube_mod(h: &[u8], m: &[u8]) -> Vec<u8> {
    let mut spread = vec![0u8; 3 * h.len()];
    for (i, &c) in h.iter().enumerate() {
        spread[3 * i] = c;
    }
    rem(&spread, m)
}

fn modulus(p: usize) -> Vec<u8> {
    let mut m = vec![0u8; p + 1];
    m[0] = 2;
    m[1] = 2;
    m[p] = 1;
    m
}

const X: [u8; 2] = [0, 1];

/// Splits a product of distinct irreducible factors of degree `d`.
fn equal_degree_split(g: Vec<u8>, d: usize, rng: &mut StdRng, out: &mut Vec<Vec<u8>>) {
    let n = deg(&g).unwrap();
    if n == d {
        out.push(g);
        return;
    }
    loop {
        let a: Vec<u8> = trim((0..n).map(|_| rng.gen_range(0..3)).collect());
        if deg(&a).unwrap_or(0) == 0 {
            continue;
        }
        // a^((3^d - 1)/2) = prod_{i<d} a^(3^i)
        let mut power = a.clone();
        let mut b = vec![1u8];
        for _ in 0..d {
            b = rem(&mul_poly(&b, &power), &g);
            power = cube_mod(&power, &g);
        }
        let candidate = gcd(&sub_poly(&b, &[1]), &g);
        let dc = deg(&candidate).unwrap_or(0);
        if dc > 0 && dc < n {
            let (rest, _) = divrem(&g, &candidate);
            equal_degree_split(candidate, d, rng, out);
            equal_degree_split(monic(rest), d, rng, out);
            return;
        }
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a factor `f` of `x^p - x - 1`: `f` of degree `n` is
/// irreducible iff `f | x^(3^n) - x` and `gcd(x^(3^(n/r)) - x, f) = 1` for
/// every prime `r | n`.
fn is_irreducible_factor(f: &[u8], p: usize) -> bool {
    let n = match deg(f) {
        Some(n) if n > 0 => n,
        _ => return false,
    };
    let mut wanted: Vec<usize> = prime_divisors(n).into_iter().map(|r| n / r).collect();
    wanted.push(n);
    let mut frob = X.to_vec();
    let mut at = std::collections::HashMap::new();
    for k in 1..=n {
        frob = cube_mod_trinomial(&frob, p);
        if wanted.contains(&k) {
            at.insert(k, sub_poly(&rem(&frob, f), &X));
        }
    }
    rem(&at[&n], f).is_empty() && wanted[..wanted.len() - 1].iter().all(|k| deg(&gcd(&at[k], f)) == Some(0))
}

/// Precomputed Barrett data for one factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrettPrecomp {
    factor: Poly3,
    q_x: Poly3,
    d_g: usize,
    d_f: usize,
    block: usize,
}

impl BarrettPrecomp {
    /// Precomputation for remainders modulo `factor` of polynomials of
    /// degree below `d_g`. `D_f` is the smallest power of two above
    /// `deg(factor)`.
    pub fn new(factor: &Poly3, d_g: usize) -> Result<BarrettPrecomp> {
        let f = trim(factor.coeffs().to_vec());
        let df = match deg(&f) {
            Some(d) if d > 0 && d <= d_g => d,
            _ => {
                return Err(Error::Precondition(format!(
                    "Barrett factor needs degree in 1..={d_g}"
                )))
            }
        };
        let mut xd = vec![0u8; d_g + 1];
        xd[d_g] = 1;
        let (q_x, _) = divrem(&xd, &f);
        let d_f = (df + 1).next_power_of_two();
        Ok(BarrettPrecomp {
            factor: Poly3::from_canonical(f),
            q_x: Poly3::from_canonical(q_x),
            d_g,
            d_f,
            block: d_f.clamp(16, 128),
        })
    }

    pub fn factor(&self) -> &Poly3 {
        &self.factor
    }

    /// `floor(x^D_g / f)`.
    pub fn q_x(&self) -> &Poly3 {
        &self.q_x
    }

    pub fn d_g(&self) -> usize {
        self.d_g
    }

    pub fn d_f(&self) -> usize {
        self.d_f
    }

    fn factor_degree(&self) -> usize {
        self.factor.len() - 1
    }
}

/// `g mod f` as `g - floor(g q_x / x^D_g) f`, computing only the quotient
/// terms below `D_f` and only the product terms below `deg f`. The result
/// has `deg f` coefficients.
pub fn barrett_rem(g: &Poly3, pre: &BarrettPrecomp) -> Result<Poly3> {
    if g.degree().is_some_and(|d| d >= pre.d_g) {
        return Err(Error::Precondition(format!(
            "Barrett reduction needs degree below {}, got {:?}",
            pre.d_g,
            g.degree()
        )));
    }
    let n = pre.factor_degree();
    let h = mul3_window(g, &pre.q_x, pre.block, pre.d_g, pre.d_g + pre.d_f)?;
    let hf = mul3_window(&h, &pre.factor, pre.block, 0, n)?;
    let low = g.resized(n);
    Ok(low.sub(&hf))
}

/// Irreducible factors of `x^p - x - 1` over `Z/3` with their Barrett data.
#[derive(Clone, Debug)]
pub struct FactorBasis {
    params: ParamSet,
    d_g: usize,
    precomps: Vec<BarrettPrecomp>,
}

impl FactorBasis {
    fn compute(params: ParamSet) -> FactorBasis {
        let p = params.p();
        let m = modulus(p);
        let mut rng = StdRng::seed_from_u64(p as u64);

        // distinct-degree split; x^(3^d) is tracked modulo the trinomial
        let mut rest = m.clone();
        let mut frob = X.to_vec();
        let mut factors = Vec::new();
        let mut d = 0;
        while deg(&rest).is_some_and(|n| n >= 2 * (d + 1)) {
            d += 1;
            frob = cube_mod_trinomial(&frob, p);
            let g = gcd(&sub_poly(&rem(&frob, &rest), &X), &rest);
            if deg(&g).is_some_and(|n| n > 0) {
                rest = monic(divrem(&rest, &g).0);
                equal_degree_split(g, d, &mut rng, &mut factors);
            }
        }
        if deg(&rest).is_some_and(|n| n > 0) {
            factors.push(rest);
        }
        factors.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));

        let product = factors.iter().fold(vec![1u8], |acc, f| mul_poly(&acc, f));
        assert_eq!(product, m, "factors do not multiply back to the modulus");
        for f in &factors {
            assert!(is_irreducible_factor(f, p), "reducible factor of degree {:?}", deg(f));
        }

        let d_g = p.div_ceil(128) * 128;
        let precomps = factors
            .iter()
            .map(|f| BarrettPrecomp::new(&Poly3::from_canonical(f.clone()), d_g).unwrap())
            .collect();
        FactorBasis {
            params,
            d_g,
            precomps,
        }
    }

    pub fn params(&self) -> ParamSet {
        self.params
    }

    /// Monic factors sorted by degree.
    pub fn factors(&self) -> impl Iterator<Item = &Poly3> {
        self.precomps.iter().map(|p| &p.factor)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.precomps.iter().map(BarrettPrecomp::factor_degree).collect()
    }

    pub fn precomps(&self) -> &[BarrettPrecomp] {
        &self.precomps
    }

    /// `128 * ceil(p / 128)`.
    pub fn d_g(&self) -> usize {
        self.d_g
    }
}

/// The factorization for `params`, computed on first use and cached.
pub fn factorize_modulus3(params: ParamSet) -> &'static FactorBasis {
    static CACHE: [OnceLock<FactorBasis>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = ALL_PARAMS
        .iter()
        .position(|&ps| ps == params)
        .expect("parameter sets are the three constants");
    CACHE[i].get_or_init(|| FactorBasis::compute(params))
}

/// Whether `g` is a unit of `R/3`, i.e. `g mod f_i != 0` for every factor.
pub fn is_invertible(g: &Poly3, basis: &FactorBasis) -> bool {
    let p = basis.params.p();
    assert_eq!(g.len(), p, "is_invertible expects {p} coefficients");
    instrument::bump(|c| c.is_invertible += 1);
    basis
        .precomps
        .iter()
        .all(|pre| !barrett_rem(g, pre).expect("deg g < p <= D_g").is_zero())
}
