//! Line-delimited JSON input and output, and order-preserving batched
//! parallel processing.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::failure::{Failure, Outcome};

pub fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

pub fn open_input(path: &Path) -> Outcome<Box<dyn BufRead>> {
    if is_stdio(path) {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path)
        .map_err(|e| Failure::data(format!("cannot open {}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(file)))
}

/// Parsed lines of a JSONL file; blank lines are skipped.
pub fn read<T: DeserializeOwned>(path: &Path) -> Outcome<impl Iterator<Item = Outcome<T>>> {
    let name = path.display().to_string();
    let reader = open_input(path)?;
    Ok(reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(Failure::data(format!("{name}:{}: {e}", i + 1)))),
            Ok(line) if line.trim().is_empty() => None,
            Ok(line) => Some(
                serde_json::from_str(&line)
                    .map_err(|e| Failure::data(format!("{name}:{}: {e}", i + 1))),
            ),
        }))
}

pub fn read_all<T: DeserializeOwned>(path: &Path) -> Outcome<Vec<T>> {
    read(path)?.collect()
}

pub struct Output {
    path: PathBuf,
    inner: BufWriter<Box<dyn Write>>,
}

impl Output {
    pub fn create(path: &Path) -> Outcome<Self> {
        let sink: Box<dyn Write> = if is_stdio(path) {
            Box::new(io::stdout())
        } else {
            Box::new(
                File::create(path)
                    .map_err(|e| Failure::data(format!("cannot create {}: {e}", path.display())))?,
            )
        };
        Ok(Output {
            path: path.to_path_buf(),
            inner: BufWriter::new(sink),
        })
    }

    pub fn write<T: Serialize>(&mut self, value: &T) -> Outcome<()> {
        serde_json::to_writer(&mut self.inner, value).map_err(|e| Failure::data(e.to_string()))?;
        self.inner.write_all(b"\n").map_err(|e| self.io_error(e))
    }

    pub fn write_line(&mut self, line: &str) -> Outcome<()> {
        writeln!(self.inner, "{line}").map_err(|e| self.io_error(e))
    }

    pub fn finish(mut self) -> Outcome<()> {
        self.inner.flush().map_err(|e| self.io_error(e))
    }

    fn io_error(&self, e: io::Error) -> Failure {
        Failure::data(format!("writing {}: {e}", self.path.display()))
    }
}

pub fn pool(jobs: usize) -> Outcome<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::usage(e.to_string()))
}

/// Map `work` over `items` in parallel, `batch` items at a time, and feed
/// the results to `sink` in input order.
pub fn map_batched<T, R, I, F, S>(
    items: I,
    batch: usize,
    pool: &ThreadPool,
    work: F,
    mut sink: S,
) -> Outcome<()>
where
    T: Send,
    R: Send,
    I: Iterator<Item = Outcome<T>>,
    F: Fn(T) -> R + Sync,
    S: FnMut(R) -> Outcome<()>,
{
    let batch = batch.max(1);
    let mut items = items.peekable();
    while items.peek().is_some() {
        let chunk = items.by_ref().take(batch).collect::<Outcome<Vec<T>>>()?;
        let results: Vec<R> = pool.install(|| chunk.into_par_iter().map(&work).collect());
        for r in results {
            sink(r)?;
        }
    }
    Ok(())
}
