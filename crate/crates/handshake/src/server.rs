//! Thread-per-connection responder. One handshake per connection; the
//! server closes first.

use std::io;
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use sntrup_core::{ParamSet, SharedKey};

use crate::protocol::respond;

pub const DEFAULT_IO_TIMEOUT: Duration = Duration::from_secs(10);

type Observer = Arc<dyn Fn(&SharedKey) + Send + Sync>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ServerStats {
    pub succeeded: u64,
    pub failed: u64,
}

#[derive(Default)]
struct Shared {
    stop: AtomicBool,
    succeeded: AtomicU64,
    failed: AtomicU64,
}

impl Shared {
    fn stats(&self) -> ServerStats {
        ServerStats {
            succeeded: self.succeeded.load(Ordering::Relaxed),
            failed: self.failed.load(Ordering::Relaxed),
        }
    }
}

pub struct Server {
    listener: TcpListener,
    allowed: Arc<[ParamSet]>,
    io_timeout: Duration,
    observer: Option<Observer>,
    shared: Arc<Shared>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, allowed: &[ParamSet]) -> io::Result<Server> {
        if allowed.is_empty() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "server needs at least one parameter set",
            ));
        }
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            allowed: allowed.into(),
            io_timeout: DEFAULT_IO_TIMEOUT,
            observer: None,
            shared: Arc::default(),
        })
    }

    /// Read and write timeout for each connection.
    pub fn io_timeout(mut self, timeout: Duration) -> Server {
        self.io_timeout = timeout;
        self
    }

    /// Called with the session key of every successful handshake.
    pub fn on_key(mut self, f: impl Fn(&SharedKey) + Send + Sync + 'static) -> Server {
        self.observer = Some(Arc::new(f));
        self
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn stats(&self) -> ServerStats {
        self.shared.stats()
    }

    /// Accepts connections until [`ServerHandle::shutdown`] (or forever when
    /// called directly).
    pub fn run(&self) -> io::Result<()> {
        let mut workers: Vec<JoinHandle<()>> = Vec::new();
        for stream in self.listener.incoming() {
            if self.shared.stop.load(Ordering::Acquire) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            workers.retain(|w| !w.is_finished());
            let allowed = Arc::clone(&self.allowed);
            let shared = Arc::clone(&self.shared);
            let observer = self.observer.clone();
            let timeout = self.io_timeout;
            workers.push(thread::spawn(move || {
                handle(stream, &allowed, timeout, observer.as_deref(), &shared)
            }));
        }
        for w in workers {
            let _ = w.join();
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let shared = Arc::clone(&self.shared);
        let thread = thread::Builder::new()
            .name("sntrup-server".into())
            .spawn(move || {
                if let Err(e) = self.run() {
                    log::error!("server stopped: {e}");
                }
            })?;
        Ok(ServerHandle {
            addr,
            shared,
            thread: Some(thread),
        })
    }
}

fn handle(
    mut stream: TcpStream,
    allowed: &[ParamSet],
    timeout: Duration,
    observer: Option<&(dyn Fn(&SharedKey) + Send + Sync)>,
    shared: &Shared,
) {
    let peer = stream.peer_addr().ok();
    let setup = stream
        .set_nodelay(true)
        .and_then(|_| stream.set_read_timeout(Some(timeout)))
        .and_then(|_| stream.set_write_timeout(Some(timeout)));
    if let Err(e) = setup {
        log::warn!("{peer:?}: socket setup failed: {e}");
        shared.failed.fetch_add(1, Ordering::Relaxed);
        return;
    }
    match respond(&mut stream, allowed, &mut rand::thread_rng()) {
        Ok(key) => {
            if let Some(f) = observer {
                f(&key);
            }
            shared.succeeded.fetch_add(1, Ordering::Relaxed);
        }
        Err(e) => {
            log::warn!("{peer:?}: handshake failed: {e}");
            shared.failed.fetch_add(1, Ordering::Relaxed);
        }
    }
    let _ = stream.shutdown(Shutdown::Both);
}

/// A server running on a background thread.
pub struct ServerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn stats(&self) -> ServerStats {
        self.shared.stats()
    }

    /// Stops accepting, waits for in-flight handshakes and returns the
    /// final counts.
    pub fn shutdown(mut self) -> ServerStats {
        self.stop();
        self.shared.stats()
    }

    fn stop(&mut self) {
        if let Some(thread) = self.thread.take() {
            self.shared.stop.store(true, Ordering::Release);
            // wake the blocking accept
            let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
            let _ = thread.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}
