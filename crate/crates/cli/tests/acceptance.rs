//! Acceptance suite: one PASS/FAIL line per criterion, run sequentially
//! (the timing criteria need the machine to themselves). Exits nonzero if
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

use common::*;
use rand::Rng;
use sntrup_cli::bench::{bench_keygen, bench_mul};
use sntrup_core::batchinv::{batch_inv, factorize_modulus3, is_invertible, InversionRing, R3, Rq};
use sntrup_core::kem::encode_pk;
use sntrup_core::keypool::PoolStats;
use sntrup_core::mul3::{div_x2m1, mul3_5way, mul3_base16, mul3_pow2, mul3_ring, Mul3Plan, Strategy};
use sntrup_core::mulq::{k_mul, mulq_big, KElem, K_LEN};
use sntrup_core::ringcore::{invert_r3, invert_rq, mul_schoolbook_3, sample_small, ALL_PARAMS, DEFAULT_BATCH};
use sntrup_core::{
    batch_keygen, decap, encap, instrument, keygen, KeyPair, KeyPool, ParamSet, Poly3, PolyQ,
    SNTRUP761,
};
use sntrup_handshake::timer::{connect, CSV_HEADER};
use sntrup_handshake::{initiate, timer_run, KeySource, Server, TimerReport};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn all_polys(max_len: usize, values: &[i8]) -> Vec<Poly3> {
    let mut out = vec![Poly3::zero(0)];
    let base = values.len();
    for len in 1..=max_len {
        for mut k in 0..base.pow(len as u32) {
            let c: Vec<i8> = (0..len)
                .map(|_| {
                    let d = values[k % base];
                    k /= base;
                    d
                })
                .collect();
            out.push(Poly3::from_signed(&c));
        }
    }
    out
}

fn random_kelem(rng: &mut impl Rng, params: ParamSet) -> KElem {
    let q = params.q() as i64;
    let c: Vec<i64> = (0..K_LEN).map(|_| rng.gen_range(0..q)).collect();
    KElem::from_i64(params, &c)
}

fn kelem_i64(e: &KElem) -> Vec<i64> {
    e.coeffs().iter().map(|&c| c as i64).collect()
}

fn criterion_1() -> Outcome {
    const TRIALS: usize = 1000;
    let mut checked = 0usize;

    // exhaustive tiny operands
    let tiny = all_polys(4, &[0, 1, -1]);
    for a in &tiny {
        for b in &tiny {
            let want = conv3(a, b);
            ensure!(mul3_base16(a, b) == want, "base16 tiny {a:?} {b:?}");
            if want.is_empty() {
                continue;
            }
            let k = mul3_pow2(&a.resized(16), &b.resized(16)).unwrap();
            ensure!(k.resized(want.len()) == want, "pow2 tiny {a:?} {b:?}");
            let f = mul3_5way(&a.resized(47), &b.resized(47), 16).unwrap();
            ensure!(f.resized(want.len()) == want, "5way tiny {a:?} {b:?}");
            checked += 3;
        }
    }
    let small = all_polys(2, &[0, 1, -1]);
    for params in ALL_PARAMS {
        let p = params.p();
        let q = params.q() as i64;
        for a in &small {
            for b in &small {
                let (a, b) = (a.resized(p), b.resized(p));
                ensure!(mul3_ring(&a, &b, params) == ring_mul3(&a, &b, p), "ring tiny {params}");
                let (aq, bq) = (PolyQ::from_poly3(params, &a), PolyQ::from_poly3(params, &b));
                ensure!(mulq_big(&aq, &bq).unwrap() == ring_mulq(&aq, &bq), "mulq tiny {params}");
                checked += 2;
            }
        }
        // wrap-around monomials
        for i in [p - 2, p - 1] {
            for j in [1, p - 2, p - 1] {
                let (a, b) = (Poly3::monomial(i, p), Poly3::monomial(j, p));
                ensure!(mul3_ring(&a, &b, params) == ring_mul3(&a, &b, p), "ring x^{i} x^{j}");
                let (aq, bq) = (PolyQ::monomial(params, i, p), PolyQ::monomial(params, j, p));
                ensure!(mulq_big(&aq, &bq).unwrap() == ring_mulq(&aq, &bq), "mulq x^{i} x^{j}");
                checked += 2;
            }
        }
        let ks = all_polys(3, &[0, 1, -1]);
        for a in &ks {
            for b in &ks {
                let ea = KElem::from_i64(params, &signed3(a));
                let eb = KElem::from_i64(params, &signed3(b));
                let want = negacyclic(ea.coeffs(), eb.coeffs(), q);
                ensure!(kelem_i64(&k_mul(&ea, &eb)) == want, "k_mul tiny {params}");
                checked += 1;
            }
        }
    }

    // random operands, per parameter set
    let mut rng = rng(1001);
    for params in ALL_PARAMS {
        let p = params.p();
        let q = params.q() as i64;
        let (n2, n5) = match Mul3Plan::for_params(params).strategy {
            Strategy::FiveWay { n } => (n, n),
            _ => (Mul3Plan::for_params(params).target_len, 256),
        };
        for _ in 0..TRIALS {
            let (la, lb) = (rng.gen_range(0..=16), rng.gen_range(0..=16));
            let (a, b) = (random_poly3(&mut rng, la), random_poly3(&mut rng, lb));
            ensure!(mul3_base16(&a, &b) == conv3(&a, &b), "base16 random {params}");

            let (a, b) = (random_poly3(&mut rng, n2), random_poly3(&mut rng, n2));
            ensure!(mul3_pow2(&a, &b).unwrap() == conv3(&a, &b), "pow2 n={n2} {params}");

            let (a, b) = (random_poly3(&mut rng, 3 * n5 - 1), random_poly3(&mut rng, 3 * n5 - 1));
            ensure!(mul3_5way(&a, &b, n5).unwrap() == conv3(&a, &b), "5way n={n5} {params}");

            let (a, b) = (random_poly3(&mut rng, p), random_poly3(&mut rng, p));
            ensure!(mul3_ring(&a, &b, params) == ring_mul3(&a, &b, p), "mul3_ring {params}");

            let (a, b) = (random_kelem(&mut rng, params), random_kelem(&mut rng, params));
            let want = negacyclic(a.coeffs(), b.coeffs(), q);
            ensure!(kelem_i64(&k_mul(&a, &b)) == want, "k_mul {params}");

            let (a, b) = (random_polyq(&mut rng, params, p), random_polyq(&mut rng, params, p));
            ensure!(mulq_big(&a, &b).unwrap() == ring_mulq(&a, &b), "mulq_big {params}");
            checked += 6;
        }
    }
    Ok(format!("{checked} products equal their oracles"))
}

struct Counting<R> {
    ring: R,
    muls: Cell<usize>,
    inversions: Cell<usize>,
}

impl<R: InversionRing> InversionRing for Counting<R> {
    type Elem = R::Elem;

    fn mul(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.muls.set(self.muls.get() + 1);
        self.ring.mul(a, b)
    }

    fn invert(&self, a: &R::Elem) -> sntrup_core::Result<R::Elem> {
        self.inversions.set(self.inversions.get() + 1);
        self.ring.invert(a)
    }

    fn is_unit(&self, a: &R::Elem) -> bool {
        self.ring.is_unit(a)
    }
}

fn check_batch<R: InversionRing>(ring: R, elems: &[R::Elem], single: &[R::Elem], label: &str) -> Outcome
where
    R::Elem: PartialEq,
{
    let ring = Counting {
        ring,
        muls: Cell::new(0),
        inversions: Cell::new(0),
    };
    for n in [1, 2, 4, 8, 16, 32, 64, 128] {
        ring.muls.set(0);
        ring.inversions.set(0);
        let inv = batch_inv(&ring, &elems[..n]).map_err(|e| format!("{label} n={n}: {e}"))?;
        ensure!(inv == single[..n], "{label} n={n}: batch result differs");
        ensure!(ring.muls.get() == 3 * n - 3, "{label} n={n}: {} multiplications", ring.muls.get());
        ensure!(ring.inversions.get() == 1, "{label} n={n}: {} inversions", ring.inversions.get());
    }
    Ok(String::new())
}

fn criterion_2() -> Outcome {
    let mut rng = rng(1002);
    for params in ALL_PARAMS {
        let p = params.p();
        let gs: Vec<Poly3> = (0..128)
            .map(|_| loop {
                let g = random_poly3(&mut rng, p);
                if coprime_to_modulus3(&g, p) {
                    break g;
                }
            })
            .collect();
        let single: Vec<Poly3> = gs.iter().map(|g| invert_r3(g, params).unwrap()).collect();
        check_batch(R3(params), &gs, &single, &format!("R/3 {params}"))?;

        let fs: Vec<PolyQ> = (0..128).map(|_| random_polyq(&mut rng, params, p)).collect();
        let single: Vec<PolyQ> = fs.iter().map(|f| invert_rq(f).unwrap()).collect();
        check_batch(Rq(params), &fs, &single, &format!("R/q {params}"))?;
    }
    let before = instrument::snapshot();
    batch_keygen(&mut rng, SNTRUP761, 32).unwrap();
    let spent = instrument::snapshot() - before;
    ensure!(
        (spent.mul3_ring, spent.inv_r3, spent.inv_rq) == (93, 1, 1),
        "batch keygen n=32 counters {spent:?}"
    );
    Ok("3n-3 multiplications and 1 inversion for n=1..128 in R/3 and R/q, all sets; n=32 keygen: 93 + 1".into())
}

fn criterion_3() -> Outcome {
    let mut rng = rng(1003);
    let mut non_invertible = 0;
    for params in ALL_PARAMS {
        let p = params.p();
        let basis = factorize_modulus3(params);
        for _ in 0..10_000 {
            let g = sample_small(&mut rng, params).unwrap();
            let want = coprime_to_modulus3(&g, p);
            ensure!(is_invertible(&g, basis) == want, "{params}: random g disagrees");
            non_invertible += usize::from(!want);
        }
        let factors: Vec<&Poly3> = basis.factors().collect();
        let mut crafted = vec![Poly3::zero(p), Poly3::one(p), Poly3::monomial(p - 1, p)];
        while crafted.len() < 100 {
            let f = factors[crafted.len() % factors.len()];
            let m = random_poly3(&mut rng, p - f.len() + 1);
            let g = mul_schoolbook_3(f, &m).resized(p);
            if crafted.len() % 4 == 3 {
                crafted.push(g.add(&Poly3::monomial(rng.gen_range(0..p), p)));
            } else {
                crafted.push(g);
            }
        }
        for g in &crafted {
            ensure!(
                is_invertible(g, basis) == coprime_to_modulus3(g, p),
                "{params}: crafted g disagrees"
            );
        }
    }
    let degrees = factorize_modulus3(SNTRUP761).degrees();
    ensure!(degrees == [19, 60, 682], "761 factor degrees {degrees:?}");
    Ok(format!(
        "30000 random ({non_invertible} non-invertible) + 300 crafted agree with gcd; 761 factors {degrees:?}"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(1004);
    let mut trials = 0;
    for params in ALL_PARAMS {
        let keys = batch_keygen(&mut rng, params, 100).unwrap();
        for kp in &keys {
            for _ in 0..100 {
                let (ct, key) = encap(&kp.public, &mut rng).unwrap();
                ensure!(decap(&kp.secret, &ct).as_bytes() == key.as_bytes(), "{params}: keys differ");
                trials += 1;
            }
        }
        let batch = batch_keygen(&mut common::rng(44), params, 8).unwrap();
        let mut serial_rng = common::rng(44);
        let serial: Vec<KeyPair> = (0..8).map(|_| keygen(&mut serial_rng, params).unwrap()).collect();
        for (b, s) in batch.iter().zip(&serial) {
            ensure!(b.public == s.public && b.secret == s.secret, "{params}: batch != serial");
        }
    }
    Ok(format!("{trials} encap/decap trials agree; batch n=8 equals serial keygen for all sets"))
}

fn criterion_5() -> Outcome {
    let sizes = [1, 2, 4, 8, 16, 32];
    let mut summary = Vec::new();
    for params in ALL_PARAMS {
        let report = bench_keygen(params, &sizes, 11);
        let amortized: Vec<f64> = report.rows.iter().map(|r| r.amortized_ns).collect();
        let curve: Vec<String> = amortized.iter().map(|a| format!("{:.2}", a / 1e6)).collect();
        for (w, n) in amortized.windows(2).zip(&sizes[1..]) {
            ensure!(
                w[1] <= w[0] * 1.05,
                "{params}: amortized cost rises at n={n}: {curve:?} ms/key"
            );
        }
        let speedup = amortized[0] / amortized[5];
        ensure!(speedup >= 2.0, "{params}: speedup at n=32 is {speedup:.2}: {curve:?} ms/key");
        summary.push(format!("{params} [{}] ms/key, {speedup:.2}x", curve.join(", ")));
    }
    Ok(summary.join("; "))
}

fn criterion_6() -> Outcome {
    let mut summary = Vec::new();
    for params in ALL_PARAMS {
        let r = bench_mul(params, 21);
        let r3_batch = 3 * r.ns("mul3_ring") + r.ns("is_invertible");
        let r3_single = r.ns("invert_r3");
        let rq_batch = 3 * r.ns("mulq_big");
        let rq_single = r.ns("invert_rq");
        ensure!(r3_batch < r3_single, "{params} R/3: {r3_batch} ns >= {r3_single} ns");
        ensure!(rq_batch < rq_single, "{params} R/q: {rq_batch} ns >= {rq_single} ns");
        summary.push(format!(
            "{params} R/3 {:.0}/{:.0} us, R/q {:.0}/{:.0} us",
            r3_batch as f64 / 1e3,
            r3_single as f64 / 1e3,
            rq_batch as f64 / 1e3,
            rq_single as f64 / 1e3
        ));
    }
    Ok(summary.join("; "))
}

fn criterion_7() -> Outcome {
    let pool = Arc::new(KeyPool::with_capacity(SNTRUP761, DEFAULT_BATCH).unwrap());
    let handles: Vec<_> = (0..8u64)
        .map(|t| {
            let pool = Arc::clone(&pool);
            thread::spawn(move || {
                let mut rng = common::rng(2000 + t);
                (0..100)
                    .map(|_| encode_pk(&pool.take(&mut rng).unwrap().public))
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let keys: Vec<Vec<u8>> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
    let distinct: HashSet<_> = keys.iter().collect();
    ensure!(keys.len() == 800 && distinct.len() == 800, "{} keys, {} distinct", keys.len(), distinct.len());
    let s = pool.stats();
    ensure!(s.fill_count == 26 && s.entries == 32, "after 800 takes: {s:?}");

    let mut rng = rng(1007);
    let pool = KeyPool::with_capacity(SNTRUP761, 32).unwrap();
    let stats = |entries, fill_count| PoolStats {
        entries,
        capacity: 32,
        fill_count,
    };
    ensure!(pool.stats() == stats(0, 0), "fresh pool {:?}", pool.stats());
    for takes in 1..=64u64 {
        pool.take(&mut rng).unwrap();
        let s = pool.stats();
        ensure!(
            (s.fill_count - 1) * 32 <= takes && takes < s.fill_count * 32,
            "after {takes} takes: {s:?}"
        );
        if takes == 5 {
            ensure!(s == stats(27, 1), "after 5 takes: {s:?}");
            ensure!(
                (0..5).all(|i| pool.slot_bytes(i).iter().all(|&b| b == 0)),
                "taken slot not erased"
            );
            ensure!(pool.slot_bytes(5).iter().any(|&b| b != 0), "fresh slot empty");
        }
    }
    ensure!(pool.stats() == stats(32, 3), "after 64 takes: {:?}", pool.stats());
    Ok("800 distinct keys from 8 threads, 26 fills; fill arithmetic and slot erasure hold".into())
}

fn check_csv(report: &TimerReport) -> Result<(), String> {
    let mut out = Vec::new();
    report.write_csv(&mut out).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(&out[..]);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    ensure!(header.iter().eq(CSV_HEADER), "csv header {header:?}");
    let mut rows = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        ensure!(rec[0].parse::<usize>() == Ok(i), "csv sample index {}", &rec[0]);
        let seconds: f64 = rec[1].parse().map_err(|_| format!("csv seconds {}", &rec[1]))?;
        let rate: f64 = rec[2].parse().map_err(|_| format!("csv rate {}", &rec[2]))?;
        ensure!(
            seconds > 0.0 && (rate * seconds / report.count as f64 - 1.0).abs() < 1e-3,
            "csv row {i} inconsistent"
        );
        rows += 1;
    }
    ensure!(rows == report.samples.len(), "csv has {rows} rows");
    Ok(())
}

fn criterion_8() -> Outcome {
    const COUNT: usize = 1024;
    const SAMPLES: usize = 5;
    let keys = Arc::new(Mutex::new(Vec::new()));
    let sink = Arc::clone(&keys);
    let server = Server::bind("127.0.0.1:0", &ALL_PARAMS)
        .map_err(|e| e.to_string())?
        .on_key(move |k| {
            let mut keys = sink.lock().unwrap();
            if keys.len() < 64 {
                keys.push(*k.as_bytes());
            }
        })
        .spawn()
        .map_err(|e| e.to_string())?;
    let addr = server.local_addr();

    // direct key comparison on a few connections per set
    let mut client_keys = Vec::new();
    for params in ALL_PARAMS {
        for _ in 0..8 {
            let mut s = connect(addr, std::time::Duration::from_secs(10)).map_err(|e| e.to_string())?;
            let k = initiate(&mut s, params, &KeySource::Fresh, &mut rand::thread_rng())
                .map_err(|e| e.to_string())?;
            client_keys.push(*k.as_bytes());
        }
    }
    ensure!(*keys.lock().unwrap() == client_keys, "server and client keys differ");

    let mut summary = Vec::new();
    let mut expected = client_keys.len() as u64;
    for params in ALL_PARAMS {
        let fresh = timer_run(addr, params, COUNT, SAMPLES, &KeySource::Fresh)
            .map_err(|e| format!("{params} fresh: {e}"))?;
        let pool = KeySource::Pool(Arc::new(KeyPool::with_capacity(params, DEFAULT_BATCH).unwrap()));
        let pooled = timer_run(addr, params, COUNT, SAMPLES, &pool)
            .map_err(|e| format!("{params} pool: {e}"))?;
        expected += 2 * (COUNT * SAMPLES) as u64;
        for r in [&fresh, &pooled] {
            ensure!(r.samples.len() == SAMPLES, "{params}: {} samples", r.samples.len());
            check_csv(r)?;
        }
        ensure!(
            pooled.median() > fresh.median(),
            "{params}: pool median {:.1} conn/s <= fresh median {:.1}",
            pooled.median(),
            fresh.median()
        );
        summary.push(format!(
            "{params} fresh {:.0} / pool {:.0} conn/s",
            fresh.median(),
            pooled.median()
        ));
    }
    let stats = server.shutdown();
    ensure!(
        stats.succeeded == expected && stats.failed == 0,
        "server saw {stats:?}, expected {expected} successes"
    );
    Ok(format!("{expected} handshakes, 0 failures; {}", summary.join("; ")))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(1009);
    for log in 2..=10u32 {
        let n = 1usize << log;
        for _ in 0..50 {
            let f = random_poly3(&mut rng, n);
            let d = div_x2m1(&f).map_err(|e| e.to_string())?;
            let back = conv3(&d.quotient, &Poly3::from_signed(&[-1, 0, 1])).add(&d.remainder);
            ensure!(back == f, "n={n}: quotient * (x^2 - 1) + remainder != f");
            let want = n as u64 * (log as u64 - 1) / 2;
            ensure!(d.additions == want, "n={n}: {} additions, expected {want}", d.additions);
        }
    }
    Ok("reconstruction and n(log2 n - 1)/2 additions for n = 4..1024".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("multipliers match oracles", criterion_1),
        ("batch inversion results and counts", criterion_2),
        ("invertibility check and factor degrees", criterion_3),
        ("KEM round trip and batch determinization", criterion_4),
        ("batch-size scaling curve", criterion_5),
        ("ring operation cost inequalities", criterion_6),
        ("key pool semantics", criterion_7),
        ("handshake end to end", criterion_8),
        ("division by x^2 - 1", criterion_9),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
