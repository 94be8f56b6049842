//! Sequential connection timer: `samples` rounds of `count` back-to-back
//! handshakes, each on a fresh TCP connection.

use std::fmt;
use std::io;
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use sntrup_core::ParamSet;

use crate::frame::io_error;
use crate::protocol::{initiate, KeySource};
use crate::server::DEFAULT_IO_TIMEOUT;
use crate::{HandshakeError, Result};

pub const CSV_HEADER: [&str; 3] = ["sample", "seconds", "conn_per_sec"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub seconds: f64,
    pub conn_per_sec: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimerReport {
    pub params: ParamSet,
    pub count: usize,
    pub pool: bool,
    pub samples: Vec<Sample>,
}

impl TimerReport {
    fn rates(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.samples.iter().map(|s| s.conn_per_sec).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    pub fn min(&self) -> f64 {
        self.rates().first().copied().unwrap_or(0.0)
    }

    pub fn median(&self) -> f64 {
        let r = self.rates();
        match r.len() {
            0 => 0.0,
            n if n % 2 == 1 => r[n / 2],
            n => (r[n / 2 - 1] + r[n / 2]) / 2.0,
        }
    }

    pub fn mean(&self) -> f64 {
        let r = self.rates();
        if r.is_empty() {
            0.0
        } else {
            r.iter().sum::<f64>() / r.len() as f64
        }
    }

    /// One row per sample under [`CSV_HEADER`].
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for s in &self.samples {
            out.write_record([
                s.index.to_string(),
                format!("{:.6}", s.seconds),
                format!("{:.3}", s.conn_per_sec),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

impl fmt::Display for TimerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} samples x {} connections, conn/s min {:.1} median {:.1} mean {:.1}",
            self.params,
            if self.pool { "pool" } else { "fresh" },
            self.samples.len(),
            self.count,
            self.min(),
            self.median(),
            self.mean()
        )
    }
}

/// Opens a connection with `TCP_NODELAY` and read/write timeouts.
pub fn connect(addr: SocketAddr, timeout: Duration) -> Result<TcpStream> {
    let stream = TcpStream::connect_timeout(&addr, timeout).map_err(io_error)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    Ok(stream)
}

fn resolve(addr: impl ToSocketAddrs) -> Result<SocketAddr> {
    addr.to_socket_addrs()?.next().ok_or_else(|| {
        HandshakeError::Io(io::Error::new(io::ErrorKind::InvalidInput, "address did not resolve"))
    })
}

/// One complete handshake on a new connection.
pub fn handshake_once(addr: SocketAddr, params: ParamSet, source: &KeySource) -> Result<()> {
    let mut stream = connect(addr, DEFAULT_IO_TIMEOUT)?;
    initiate(&mut stream, params, source, &mut rand::thread_rng())?;
    Ok(())
}

pub fn timer_run(
    addr: impl ToSocketAddrs,
    params: ParamSet,
    count: usize,
    samples: usize,
    source: &KeySource,
) -> Result<TimerReport> {
    let addr = resolve(addr)?;
    let mut report = TimerReport {
        params,
        count,
        pool: source.is_pool(),
        samples: Vec::with_capacity(samples),
    };
    for sample in 0..samples {
        let start = Instant::now();
        for connection in 0..count {
            handshake_once(addr, params, source).map_err(|e| HandshakeError::Sample {
                sample,
                connection,
                source: Box::new(e),
            })?;
        }
        let seconds = start.elapsed().as_secs_f64();
        let s = Sample {
            index: sample,
            seconds,
            conn_per_sec: count as f64 / seconds,
        };
        log::info!("sample {sample}: {:.1} conn/s", s.conn_per_sec);
        report.samples.push(s);
    }
    Ok(report)
}
