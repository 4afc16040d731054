use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use super::{SaSchedule, SamplerError};

/// What happened to a read on its way back to the logical problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadTag {
    /// Plain read of the model that was sampled.
    Raw,
    /// Every vertex model was consistent; spins are logical.
    Logical,
    /// Vertex models of these logical variables disagreed; the read counts as failed.
    ChainBreak(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Read {
    pub spins: Vec<i8>,
    pub energy: f64,
    pub count: usize,
    pub tag: ReadTag,
    /// Index of the gauge the read was taken under, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadMeta {
    pub label: String,
    pub sampler: String,
    pub seed: u64,
    pub num_reads: usize,
    /// Seed of each gauge, in gauge order (`None` for identity gauges).
    #[serde(default)]
    pub gauge_seeds: Vec<Option<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<SaSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_ferro: Option<f64>,
}

/// A batch of reads with identical configurations merged (first-seen order).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReadSet {
    pub reads: Vec<Read>,
    pub meta: ReadMeta,
}

impl ReadSet {
    pub fn new(meta: ReadMeta) -> Self {
        ReadSet {
            reads: Vec::new(),
            meta,
        }
    }

    /// Builds a read set from individual reads, merging duplicates.
    pub fn from_reads(meta: ReadMeta, reads: impl IntoIterator<Item = Read>) -> Self {
        let mut out = ReadSet::new(meta);
        out.extend(reads);
        out
    }

    pub fn extend(&mut self, reads: impl IntoIterator<Item = Read>) {
        let mut index: HashMap<(Vec<i8>, Option<usize>, ReadTag), usize> = self
            .reads
            .iter()
            .enumerate()
            .map(|(i, r)| ((r.spins.clone(), r.gauge, r.tag.clone()), i))
            .collect();
        for r in reads {
            let key = (r.spins.clone(), r.gauge, r.tag.clone());
            match index.get(&key) {
                Some(&i) => self.reads[i].count += r.count,
                None => {
                    index.insert(key, self.reads.len());
                    self.reads.push(r);
                }
            }
        }
    }

    pub fn total_reads(&self) -> usize {
        self.reads.iter().map(|r| r.count).sum()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.reads.iter().map(|r| r.energy).min_by(f64::total_cmp)
    }

    /// Read with the lowest energy (first such in order).
    pub fn best(&self) -> Option<&Read> {
        self.reads
            .iter()
            .min_by(|a, b| a.energy.total_cmp(&b.energy))
    }

    pub fn chain_break_reads(&self) -> usize {
        self.reads
            .iter()
            .filter(|r| matches!(r.tag, ReadTag::ChainBreak(_)))
            .map(|r| r.count)
            .sum()
    }

    /// Reads taken under gauge `g`.
    pub fn for_gauge(&self, g: usize) -> impl Iterator<Item = &Read> {
        self.reads.iter().filter(move |r| r.gauge == Some(g))
    }

    /// Gzip-compressed JSON lines: the metadata first, then one read per line.
    pub fn write_jsonl_gz(&self, path: &Path) -> Result<(), SamplerError> {
        let file = std::fs::File::create(path)?;
        let mut enc = GzEncoder::new(std::io::BufWriter::new(file), Compression::default());
        serde_json::to_writer(&mut enc, &self.meta)?;
        enc.write_all(b"\n")?;
        for r in &self.reads {
            serde_json::to_writer(&mut enc, r)?;
            enc.write_all(b"\n")?;
        }
        enc.finish()?.flush()?;
        Ok(())
    }

    pub fn read_jsonl_gz(path: &Path) -> Result<Self, SamplerError> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(GzDecoder::new(file)).lines();
        let meta_line = lines
            .next()
            .ok_or_else(|| SamplerError::Format("empty file".into()))??;
        let meta: ReadMeta = serde_json::from_str(&meta_line)?;
        let mut reads = Vec::new();
        for line in lines {
            let line = line?;
            if !line.trim().is_empty() {
                reads.push(serde_json::from_str(&line)?);
            }
        }
        Ok(ReadSet { reads, meta })
    }
}
