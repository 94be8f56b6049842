mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sntrup_core::instrument;
use sntrup_core::mul3::{
    div_x2m1, mul3_5way, mul3_base16, mul3_pow2, mul3_ring, mul3_window, Mul3Plan, Strategy,
};
use sntrup_core::ringcore::ALL_PARAMS;
use sntrup_core::Poly3;

fn all_polys(max_len: usize) -> Vec<Poly3> {
    let mut out = vec![Poly3::zero(0)];
    for len in 1..=max_len {
        for mut k in 0..3usize.pow(len as u32) {
            let c = (0..len)
                .map(|_| {
                    let d = (k % 3) as u8;
                    k /= 3;
                    d
                })
                .collect();
            out.push(Poly3::from_coeffs(c));
        }
    }
    out
}

#[test]
fn tiny_operands_exhaustive() {
    let polys = all_polys(4);
    assert_eq!(polys.len(), 121);
    for a in &polys {
        for b in &polys {
            let want = conv3(a, b);
            assert_eq!(mul3_base16(a, b), want);
            if want.is_empty() {
                continue;
            }
            let k = mul3_pow2(&a.resized(16), &b.resized(16)).unwrap();
            assert_eq!(k.resized(want.len()), want);
            assert!(k.coeffs()[want.len()..].iter().all(|&c| c == 0));
            let f = mul3_5way(&a.resized(47), &b.resized(47), 16).unwrap();
            assert_eq!(f.resized(want.len()), want);
        }
    }
}

#[test]
fn base16_random() {
    let mut rng = rng(20);
    for _ in 0..1000 {
        let la = rng.gen_range(0..=16);
        let lb = rng.gen_range(0..=16);
        let a = random_poly3(&mut rng, la);
        let b = random_poly3(&mut rng, lb);
        assert_eq!(mul3_base16(&a, &b), conv3(&a, &b));
    }
}

#[test]
fn karatsuba_random() {
    let mut rng = rng(21);
    for n in [16, 32, 64, 128, 256, 1024] {
        for _ in 0..(4096 / n).max(10) {
            let a = random_poly3(&mut rng, n);
            let b = random_poly3(&mut rng, n);
            let c = mul3_pow2(&a, &b).unwrap();
            assert_eq!(c.len(), 2 * n - 1);
            assert_eq!(c, conv3(&a, &b));
        }
    }
    assert!(mul3_pow2(&Poly3::zero(48), &Poly3::zero(48)).is_err());
    assert!(mul3_pow2(&Poly3::zero(32), &Poly3::zero(64)).is_err());
}

#[test]
fn fiveway_random() {
    let mut rng = rng(22);
    for n in [16, 64, 256] {
        for _ in 0..(8192 / n) {
            let a = random_poly3(&mut rng, 3 * n - 1);
            let b = random_poly3(&mut rng, 3 * n - 1);
            let c = mul3_5way(&a, &b, n).unwrap();
            assert_eq!(c.len(), 6 * n - 3);
            assert_eq!(c, conv3(&a, &b));
        }
    }
}

#[test]
fn ring_products_match_oracle() {
    let mut rng = rng(23);
    for params in ALL_PARAMS {
        let p = params.p();
        for _ in 0..300 {
            let a = random_poly3(&mut rng, p);
            let b = random_poly3(&mut rng, p);
            assert_eq!(mul3_ring(&a, &b, params), ring_mul3(&a, &b, p));
        }
    }
}

#[test]
fn plans_for_parameter_sets() {
    let strategies: Vec<_> = ALL_PARAMS
        .iter()
        .map(|&p| Mul3Plan::for_params(p).strategy)
        .collect();
    assert_eq!(
        strategies,
        [
            Strategy::FiveWay { n: 256 },
            Strategy::FiveWay { n: 256 },
            Strategy::Karatsuba
        ]
    );
    assert_eq!(Mul3Plan::for_len(857).target_len, 1024);

    let mut rng = rng(24);
    for len in [1, 15, 17, 40, 47, 48, 100, 191, 192, 500] {
        let plan = Mul3Plan::for_len(len);
        assert!(plan.target_len >= len);
        let a = random_poly3(&mut rng, len);
        let b = random_poly3(&mut rng, len);
        assert_eq!(plan.multiply(&a, &b), conv3(&a, &b), "len {len}");
    }
}

#[test]
fn ring_product_uses_five_sub_products() {
    let mut rng = rng(25);
    let params = ALL_PARAMS[1];
    let a = random_poly3(&mut rng, params.p());
    let before = instrument::snapshot();
    mul3_ring(&a, &a, params);
    let spent = instrument::snapshot() - before;
    assert_eq!(spent.mul3_ring, 1);
    assert_eq!(spent.fiveway_submul, 5);
}

#[test]
fn window_is_a_slice_of_the_product() {
    let mut rng = rng(26);
    let a = random_poly3(&mut rng, 200);
    let b = random_poly3(&mut rng, 100);
    let full = conv3(&a, &b);
    for (lo, hi) in [(0, 10), (50, 170), (250, 299), (0, 299)] {
        let w = mul3_window(&a, &b, 32, lo, hi).unwrap();
        assert_eq!(w.coeffs(), &full.coeffs()[lo..hi]);
    }
}

fn mul_x2m1(q: &Poly3) -> Poly3 {
    conv3(q, &Poly3::from_signed(&[-1, 0, 1]))
}

#[test]
fn division_by_x2_minus_1() {
    let mut rng = rng(27);
    for log in 2..=10u32 {
        let n = 1usize << log;
        for _ in 0..20 {
            let f = random_poly3(&mut rng, n);
            let d = div_x2m1(&f).unwrap();
            assert_eq!(d.remainder.len(), 2);
            assert_eq!(d.quotient.len(), n - 2);
            assert_eq!(mul_x2m1(&d.quotient).add(&d.remainder), f, "n = {n}");
            assert_eq!(d.additions, (n as u64) * (log as u64 - 1) / 2);
        }
    }
    assert!(div_x2m1(&Poly3::zero(2)).is_err());
    assert!(div_x2m1(&Poly3::zero(12)).is_err());
}

#[test]
fn division_of_exact_multiples() {
    let mut rng = rng(28);
    let q = random_poly3(&mut rng, 62);
    let d = div_x2m1(&mul_x2m1(&q).resized(64)).unwrap();
    assert!(d.remainder.is_zero());
    assert_eq!(d.quotient, q);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_product_commutes_and_distributes(s in any::<u64>(), pick in 0usize..3) {
        let params = ALL_PARAMS[pick];
        let mut rng = rng(s);
        let p = params.p();
        let a = random_poly3(&mut rng, p);
        let b = random_poly3(&mut rng, p);
        let c = random_poly3(&mut rng, p);
        prop_assert_eq!(mul3_ring(&a, &b, params), mul3_ring(&b, &a, params));
        prop_assert_eq!(
            mul3_ring(&a, &b.add(&c), params),
            mul3_ring(&a, &b, params).add(&mul3_ring(&a, &c, params))
        );
    }

    #[test]
    fn plan_matches_schoolbook(len in 1usize..300, s in any::<u64>()) {
        let mut rng = rng(s);
        let a = random_poly3(&mut rng, len);
        let b = random_poly3(&mut rng, len);
        prop_assert_eq!(Mul3Plan::for_len(len).multiply(&a, &b), conv3(&a, &b));
    }
}
