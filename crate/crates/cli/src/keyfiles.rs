use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sntrup_core::kem::{encode_pk, encode_sk};
use sntrup_core::{batch_keygen, ParamSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeyfileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] sntrup_core::Error),
}

#[derive(Clone, Debug)]
pub struct KeygenSummary {
    pub files: Vec<PathBuf>,
    pub elapsed: Duration,
    pub keys: usize,
}

impl KeygenSummary {
    pub fn amortized(&self) -> Duration {
        self.elapsed / self.keys as u32
    }
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf, KeyfileError> {
    fs::write(&path, bytes).map_err(|source| KeyfileError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Generates `batch` key pairs in one batch and writes `key_<i>.pk` and
/// `key_<i>.sk` into `dir`, creating it if needed.
pub fn write_keys(dir: &Path, params: ParamSet, batch: usize) -> Result<KeygenSummary, KeyfileError> {
    fs::create_dir_all(dir).map_err(|source| KeyfileError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let start = Instant::now();
    let keys = batch_keygen(&mut rand::thread_rng(), params, batch)?;
    let elapsed = start.elapsed();
    let mut files = Vec::with_capacity(2 * batch);
    for (i, kp) in keys.iter().enumerate() {
        files.push(write(dir.join(format!("key_{i}.pk")), &encode_pk(&kp.public))?);
        files.push(write(dir.join(format!("key_{i}.sk")), &encode_sk(&kp.secret))?);
    }
    Ok(KeygenSummary {
        files,
        elapsed,
        keys: batch,
    })
}
