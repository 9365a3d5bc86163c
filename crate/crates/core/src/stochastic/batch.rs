//! Sample generation, norm evaluation and streaming projections.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use super::model::{NormTag, RandomVectorModel, ScalarDist};
use super::rng::StreamKey;
use crate::error::{Error, Result};

/// Columns generated per parallel work item. Fixed, so that results never
/// depend on the size of the worker pool.
const COLUMN_CHUNK: usize = 256;
/// Scalars drawn per keyed block in [`sample_scalar`].
const SCALAR_BLOCK: usize = 1024;

/// A `dim x m` column-major matrix of samples with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub model_id: String,
    pub seed: u64,
    pub stream: u64,
    pub dim: usize,
    pub m: usize,
    pub data: Vec<f64>,
}

impl SampleBatch {
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// `count` iid draws of `dist`, a deterministic function of
/// `(dist, count, seed, stream)`.
pub fn sample_scalar(dist: &ScalarDist, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    if count == 0 {
        return Err(Error::Parameter("count must be at least 1".into()));
    }
    let key = StreamKey::new(seed, stream);
    let mut out = vec![0.0; count];
    out.par_chunks_mut(SCALAR_BLOCK).enumerate().for_each(|(b, chunk)| {
        let mut rng = key.column(b as u64);
        for v in chunk.iter_mut() {
            *v = dist.sample(&mut rng);
        }
    });
    Ok(out)
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(Error::Parameter("sample count must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Fills `buf` (row `r` = sample `first + r`) for a chunk of columns.
fn fill_chunk(model: &RandomVectorModel, key: &StreamKey, first: usize, buf: &mut [f64]) {
    for (r, col) in buf.chunks_exact_mut(model.dim).enumerate() {
        let mut rng = key.column((first + r) as u64);
        model.fill(&mut rng, col);
    }
}

pub fn sample_vector(model: &RandomVectorModel, count: usize, seed: u64, stream: u64) -> Result<SampleBatch> {
    model.validate()?;
    check_count(count)?;
    let key = StreamKey::new(seed, stream);
    let d = model.dim;
    let mut data = vec![0.0; d * count];
    data.par_chunks_mut(d * COLUMN_CHUNK).enumerate().for_each(|(c, chunk)| {
        fill_chunk(model, &key, c * COLUMN_CHUNK, chunk);
    });
    Ok(SampleBatch { model_id: model.id(), seed, stream, dim: d, m: count, data })
}

/// Per-column norms of `batch`.
pub fn norm_of(batch: &SampleBatch, norm: &NormTag) -> Result<Vec<f64>> {
    norm.check_dim(batch.dim)?;
    Ok(batch.columns().map(|c| norm.eval(c)).collect())
}

/// `‖V‖` for `count` samples of `model`, generated chunkwise without keeping
/// the batch. Identical to `norm_of(sample_vector(..), &model.norm)`.
pub fn sample_norms(model: &RandomVectorModel, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
    Ok(sample_projections(model, &[], count, seed, stream)?.norms)
}

/// Signed projections `<u_j, V>` for every direction `u_j`, plus the norms
/// `‖V‖`, for `count` samples of `model`.
#[derive(Clone, Debug)]
pub struct Projections {
    /// `values[j][i] = <u_j, V_i>`
    pub values: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

pub fn sample_projections(
    model: &RandomVectorModel,
    directions: &[Vec<f64>],
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<Projections> {
    model.validate()?;
    check_count(count)?;
    let d = model.dim;
    if let Some(bad) = directions.iter().find(|u| u.len() != d) {
        return Err(Error::Shape(format!("direction of length {} for dimension {d}", bad.len())));
    }
    let k = directions.len();
    let flat: Vec<f64> = directions.iter().flatten().copied().collect();
    let dirs = ArrayView2::from_shape((k, d), &flat).expect("shape checked");
    let key = StreamKey::new(seed, stream);
    let n_chunks = count.div_ceil(COLUMN_CHUNK);

    let chunks: Vec<(Array2<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * COLUMN_CHUNK;
            let rows = COLUMN_CHUNK.min(count - first);
            let mut buf = vec![0.0; rows * d];
            fill_chunk(model, &key, first, &mut buf);
            let norms: Vec<f64> = buf.chunks_exact(d).map(|v| model.norm.eval(v)).collect();
            let mut proj = Array2::<f64>::zeros((rows, k));
            if k > 0 {
                let samples = ArrayView2::from_shape((rows, d), &buf).expect("chunk shape");
                general_mat_mul(1.0, &samples, &dirs.t(), 0.0, &mut proj);
            }
            (proj, norms)
        })
        .collect();

    let mut values = vec![Vec::with_capacity(count); k];
    let mut norms = Vec::with_capacity(count);
    for (proj, n) in chunks {
        for row in proj.rows() {
            for (j, v) in row.iter().enumerate() {
                values[j].push(*v);
            }
        }
        norms.extend(n);
    }
    Ok(Projections { values, norms })
}

const MAGIC: &[u8; 8] = b"TDSBAT01";

/// Writes the batch as a flat little-endian file: an 8-byte magic, then
/// `dim`, `m`, `seed`, `stream` as `u64`, a 16-byte ASCII model id, then the
/// `dim * m` column-major `f64` samples. The header is 56 bytes, so the data
/// is 8-byte aligned in an mmap.
pub fn write_batch(batch: &SampleBatch, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    for v in [batch.dim as u64, batch.m as u64, batch.seed, batch.stream] {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut id = [b' '; 16];
    for (dst, src) in id.iter_mut().zip(batch.model_id.bytes()) {
        *dst = src;
    }
    w.write_all(&id)?;
    for v in &batch.data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_batch(path: &Path) -> Result<SampleBatch> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 56 || &bytes[..8] != MAGIC {
        return Err(Error::Shape("not a sample batch file".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().unwrap());
    let (dim, m, seed, stream) = (word(0) as usize, word(1) as usize, word(2), word(3));
    let model_id = String::from_utf8_lossy(&bytes[40..56]).trim_end().to_string();
    let body = &bytes[56..];
    if body.len() != dim * m * 8 {
        return Err(Error::Shape(format!("expected {} data bytes, found {}", dim * m * 8, body.len())));
    }
    let data = body.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    Ok(SampleBatch { model_id, seed, stream, dim, m, data })
}
