//! Wall-clock benchmarks: batch key generation across batch sizes and the
//! ring operations it is built from.

use std::io;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use sntrup_core::batchinv::{batch_inv, factorize_modulus3, is_invertible, R3, Rq};
use sntrup_core::mul3::mul3_ring;
use sntrup_core::mulq::mulq_big;
use sntrup_core::ringcore::{invert_r3, invert_rq, sample_short, sample_small};
use sntrup_core::{batch_keygen, ParamSet, Poly3, PolyQ};

pub const DEFAULT_SIZES: [usize; 8] = [1, 2, 4, 8, 16, 32, 64, 128];
pub const KEYGEN_CSV_HEADER: [&str; 4] = ["param", "n", "latency_ns", "amortized_ns_per_key"];
pub const MUL_CSV_HEADER: [&str; 4] = ["param", "op", "runs", "median_ns"];
pub const MIN_RUNS: usize = 5;

/// Median of `runs` timings of `f`.
pub fn median_time(runs: usize, mut f: impl FnMut()) -> Duration {
    let mut t: Vec<Duration> = (0..runs.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .collect();
    t.sort();
    t[t.len() / 2]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeygenRow {
    pub n: usize,
    pub latency_ns: u128,
    pub amortized_ns: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub params: ParamSet,
    pub runs: usize,
    pub rows: Vec<KeygenRow>,
}

impl BenchReport {
    pub fn row(&self, n: usize) -> Option<&KeygenRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(KEYGEN_CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                self.params.p().to_string(),
                r.n.to_string(),
                r.latency_ns.to_string(),
                format!("{:.0}", r.amortized_ns),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Median latency of `batch_keygen` for each batch size over `runs`
/// rounds (at least five). Each round visits every size once, so slow drift
/// in machine speed hits all sizes alike.
pub fn bench_keygen(params: ParamSet, sizes: &[usize], runs: usize) -> BenchReport {
    let runs = runs.max(MIN_RUNS);
    let mut rng = StdRng::from_entropy();
    // factorization and twiddle tables are computed once, outside the timings
    batch_keygen(&mut rng, params, 1).expect("keygen");
    let mut times = vec![Vec::with_capacity(runs); sizes.len()];
    for _ in 0..runs {
        for (t, &n) in times.iter_mut().zip(sizes) {
            let start = Instant::now();
            batch_keygen(&mut rng, params, n).expect("keygen");
            t.push(start.elapsed());
        }
    }
    let rows = sizes
        .iter()
        .zip(times)
        .map(|(&n, mut t)| {
            t.sort();
            let latency_ns = t[t.len() / 2].as_nanos();
            KeygenRow {
                n,
                latency_ns,
                amortized_ns: latency_ns as f64 / n as f64,
            }
        })
        .collect();
    BenchReport { params, runs, rows }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MulRow {
    pub op: &'static str,
    pub median_ns: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MulReport {
    pub params: ParamSet,
    pub runs: usize,
    pub rows: Vec<MulRow>,
}

impl MulReport {
    pub fn ns(&self, op: &str) -> u128 {
        self.rows
            .iter()
            .find(|r| r.op == op)
            .unwrap_or_else(|| panic!("no row for {op}"))
            .median_ns
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(MUL_CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                self.params.p().to_string(),
                r.op.to_string(),
                self.runs.to_string(),
                r.median_ns.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub const MUL_OPS: [&str; 7] = [
    "mul3_ring",
    "mulq_big",
    "invert_r3",
    "invert_rq",
    "is_invertible",
    "batch_inv_r3_32",
    "batch_inv_rq_32",
];

fn invertible_small(rng: &mut StdRng, params: ParamSet) -> Poly3 {
    let basis = factorize_modulus3(params);
    loop {
        let g = sample_small(rng, params).expect("rng");
        if is_invertible(&g, basis) {
            return g;
        }
    }
}

/// Median timings of the ring operations behind key generation. Batch
/// inversions use 32 elements.
pub fn bench_mul(params: ParamSet, runs: usize) -> MulReport {
    let runs = runs.max(MIN_RUNS);
    let mut rng = StdRng::from_entropy();
    let basis = factorize_modulus3(params);
    let gs: Vec<Poly3> = (0..32).map(|_| invertible_small(&mut rng, params)).collect();
    let fs: Vec<PolyQ> = (0..32)
        .map(|_| sample_short(&mut rng, params).expect("rng").to_polyq().scale(3))
        .collect();
    let (g, h) = (&gs[0], &gs[1]);
    let (a, b) = (&fs[0], &fs[1]);

    let ns = |d: Duration| d.as_nanos();
    let rows = vec![
        MulRow {
            op: "mul3_ring",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(mul3_ring(g, h, params));
            })),
        },
        MulRow {
            op: "mulq_big",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(mulq_big(a, b).unwrap());
            })),
        },
        MulRow {
            op: "invert_r3",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(invert_r3(g, params).unwrap());
            })),
        },
        MulRow {
            op: "invert_rq",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(invert_rq(a).unwrap());
            })),
        },
        MulRow {
            op: "is_invertible",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(is_invertible(h, basis));
            })),
        },
        MulRow {
            op: "batch_inv_r3_32",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(batch_inv(&R3(params), &gs).unwrap());
            })),
        },
        MulRow {
            op: "batch_inv_rq_32",
            median_ns: ns(median_time(runs, || {
                std::hint::black_box(batch_inv(&Rq(params), &fs).unwrap());
            })),
        },
    ];
    MulReport { params, runs, rows }
}
