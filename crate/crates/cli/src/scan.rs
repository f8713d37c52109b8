//! Ordered, resumable parameter-box scans.
//!
//! Triples are enumerated lexicographically and only valid ones get an index.
//! Each chunk is computed in parallel, collected in index order, appended to
//! the output and only then recorded in the checkpoint, so the checkpoint
//! never claims a record that is not on disk.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use mixsum::FormInstance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::record::{CsvRow, Record, CSV_HEADER, SCHEMA_VERSION};
use crate::CliError;

pub const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum OutputFormat {
    #[value(name = "json-lines")]
    JsonLines,
    #[value(name = "csv")]
    Csv,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::JsonLines => "json-lines",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanJob {
    pub a: RangeInclusive<i64>,
    pub b: RangeInclusive<i64>,
    pub c: RangeInclusive<i64>,
    pub p: i64,
    pub k: u32,
    pub bound: u64,
    pub threshold: u64,
    pub threads: usize,
    pub output: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub job_hash: String,
    pub last_index: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanSummary {
    pub records: u64,
    pub written_now: u64,
    pub almost_universal: u64,
    pub not_almost_universal: u64,
    pub locally_obstructed: u64,
    pub inconsistent: u64,
}

/// Parses `lo..hi` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("invalid range {s:?}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok(num(lo)?..=num(hi.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            Ok(v..=v)
        }
    }
}

impl ScanJob {
    /// Valid `(a, b, c)` in lexicographic order; position is the record index.
    pub fn triples(&self) -> Vec<(i64, i64, i64)> {
        let mut out = Vec::new();
        for a in self.a.clone() {
            for b in self.b.clone() {
                for c in self.c.clone() {
                    if FormInstance::new(a, b, c, self.p, self.k).is_ok() {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Hash of everything that determines the output bytes. Thread count and
    /// output path are excluded.
    pub fn job_hash(&self) -> String {
        let canon = format!(
            "schema={SCHEMA_VERSION};a={}..{};b={}..{};c={}..{};p={};k={};N={};threshold={};format={}",
            self.a.start(),
            self.a.end(),
            self.b.start(),
            self.b.end(),
            self.c.start(),
            self.c.end(),
            self.p,
            self.k,
            self.bound,
            self.threshold,
            self.format.as_str()
        );
        hex::encode(Sha256::digest(canon.as_bytes()))
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        let mut name = self.output.clone().into_os_string();
        name.push(".checkpoint.json");
        PathBuf::from(name)
    }

    pub fn run(&self, resume: bool) -> Result<ScanSummary, CliError> {
        self.run_limited(resume, None)
    }

    /// Like [`ScanJob::run`] but stops after writing `limit` more records,
    /// as if interrupted.
    pub fn run_limited(&self, resume: bool, limit: Option<u64>) -> Result<ScanSummary, CliError> {
        self.validate()?;
        let triples = self.triples();
        let hash = self.job_hash();
        let ckpt_path = self.checkpoint_path();

        let start = if resume { self.prepare_resume(&hash, &ckpt_path)? } else { self.prepare_fresh()? };
        let mut out = OpenOptions::new().append(true).open(&self.output).map_err(|e| self.io_err(e))?;

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;

        let mut summary = ScanSummary { records: start as u64, ..Default::default() };
        let end = match limit {
            Some(n) => triples.len().min(start + n as usize),
            None => triples.len(),
        };
        let mut index = start;
        while index < end {
            let chunk = &triples[index..(index + CHUNK).min(end)];
            let records: Vec<Record> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|&(a, b, c)| {
                        let form = FormInstance::new(a, b, c, self.p, self.k)?;
                        Record::build(&form, self.bound, self.threshold)
                    })
                    .collect::<mixsum::Result<_>>()
            })?;
            let mut bytes = if index == 0 { self.header_bytes() } else { Vec::new() };
            bytes.extend(self.encode(&records));
            out.write_all(&bytes).and_then(|_| out.sync_data()).map_err(|e| self.io_err(e))?;
            index += chunk.len();
            write_checkpoint(&ckpt_path, &Checkpoint { job_hash: hash.clone(), last_index: Some(index as u64 - 1) })
                .map_err(|e| self.io_err(e))?;
            for r in &records {
                match r.verdict.as_str() {
                    "AlmostUniversal" => summary.almost_universal += 1,
                    "NotAlmostUniversal" => summary.not_almost_universal += 1,
                    _ => summary.locally_obstructed += 1,
                }
                if r.consistent == Some(false) {
                    summary.inconsistent += 1;
                }
            }
            summary.written_now += records.len() as u64;
            summary.records = index as u64;
        }
        if start == 0 && triples.is_empty() {
            write_checkpoint(&ckpt_path, &Checkpoint { job_hash: hash, last_index: None })
                .map_err(|e| self.io_err(e))?;
        }
        Ok(summary)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == 0 {
            return Err(CliError::Config("threads must be at least 1".to_string()));
        }
        for (name, r) in [("a", &self.a), ("b", &self.b), ("c", &self.c)] {
            if !r.is_empty() && *r.start() < 1 {
                return Err(CliError::Invalid(format!("range for {name} must start at 1 or above")));
            }
        }
        let hyp = crate::hypothesis_violations(1, 1, 1, self.p, self.k);
        if !hyp.is_empty() {
            return Err(CliError::Invalid(hyp.join("; ")));
        }
        Ok(())
    }

    fn io_err(&self, e: std::io::Error) -> CliError {
        CliError::Output { path: self.output.clone(), source: e }
    }

    fn header_bytes(&self) -> Vec<u8> {
        match self.format {
            OutputFormat::JsonLines => Vec::new(),
            OutputFormat::Csv => {
                let mut w = csv_writer(Vec::new());
                w.write_record(CSV_HEADER).expect("in-memory write");
                w.into_inner().expect("in-memory flush")
            }
        }
    }

    fn encode(&self, records: &[Record]) -> Vec<u8> {
        match self.format {
            OutputFormat::JsonLines => {
                let mut buf = Vec::new();
                for r in records {
                    buf.extend_from_slice(r.to_json_line().as_bytes());
                    buf.push(b'\n');
                }
                buf
            }
            OutputFormat::Csv => {
                let mut w = csv_writer(Vec::new());
                for r in records {
                    w.serialize(CsvRow::from(r)).expect("in-memory write");
                }
                w.into_inner().expect("in-memory flush")
            }
        }
    }

    fn prepare_fresh(&self) -> Result<usize, CliError> {
        File::create(&self.output).map_err(|e| self.io_err(e))?;
        let ckpt = self.checkpoint_path();
        if ckpt.exists() {
            fs::remove_file(&ckpt).map_err(|e| self.io_err(e))?;
        }
        Ok(0)
    }

    // Validates the checkpoint and cuts the output back to the records it
    // covers. Returns the index to continue from.
    fn prepare_resume(&self, hash: &str, ckpt_path: &Path) -> Result<usize, CliError> {
        let text = match fs::read_to_string(ckpt_path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return self.prepare_fresh(),
            Err(e) => return Err(self.io_err(e)),
        };
        let ckpt: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| CliError::Checkpoint(format!("unreadable checkpoint {}: {e}", ckpt_path.display())))?;
        if ckpt.job_hash != hash {
            return Err(CliError::Checkpoint(format!(
                "checkpoint {} belongs to a different job ({} vs {hash})",
                ckpt_path.display(),
                ckpt.job_hash
            )));
        }
        let keep = ckpt.last_index.map_or(0, |i| i as usize + 1);
        // The CSV header goes out with the first record.
        let header_lines = usize::from(self.format == OutputFormat::Csv && keep > 0);
        let mut f = OpenOptions::new().read(true).write(true).open(&self.output).map_err(|e| self.io_err(e))?;
        let offset = offset_after_lines(&mut f, keep + header_lines).map_err(|e| self.io_err(e))?;
        let Some(offset) = offset else {
            return Err(CliError::Checkpoint(format!(
                "{} has fewer than the {keep} records the checkpoint claims",
                self.output.display()
            )));
        };
        f.set_len(offset).map_err(|e| self.io_err(e))?;
        f.sync_data().map_err(|e| self.io_err(e))?;
        Ok(keep)
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::CRLF).from_writer(w)
}

// Byte offset just past the `n`-th newline, `None` if there are fewer.
fn offset_after_lines(f: &mut File, n: usize) -> std::io::Result<Option<u64>> {
    f.seek(SeekFrom::Start(0))?;
    let mut reader = BufReader::new(&*f);
    let mut offset = 0u64;
    let mut line = Vec::new();
    for _ in 0..n {
        line.clear();
        let read = reader.read_until(b'\n', &mut line)?;
        if read == 0 || line.last() != Some(&b'\n') {
            return Ok(None);
        }
        offset += read as u64;
    }
    Ok(Some(offset))
}

/// Writes `ckpt` next to its final path and renames it into place.
pub fn write_checkpoint(path: &Path, ckpt: &Checkpoint) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = File::create(&tmp)?;
        f.write_all(serde_json::to_string(ckpt).expect("checkpoint serializes").as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
