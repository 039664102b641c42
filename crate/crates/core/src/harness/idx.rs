//! Reader for the IDX format: a big-endian magic number `0x000008NN` (`0x08`
//! is the unsigned-byte type, `NN` the number of dimensions), one big-endian
//! `u32` per dimension, then the raw data.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};

use crate::error::{Error, Result};
use crate::geometry::{Metric, PointCloud};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` bytes, image-major, row-major within an image.
    pub pixels: Vec<u8>,
}

fn format_err(offset: u64, message: impl Into<String>) -> Error {
    Error::Format { offset, message: message.into() }
}

fn header(cur: &mut Cursor<&[u8]>, magic: u32, dims: usize) -> Result<Vec<usize>> {
    let got = cur.read_u32::<BigEndian>().map_err(|_| format_err(cur.position(), "truncated magic number"))?;
    if got != magic {
        return Err(format_err(0, format!("magic number {got:#010x}, expected {magic:#010x}")));
    }
    (0..dims)
        .map(|k| {
            let at = cur.position();
            cur.read_u32::<BigEndian>()
                .map(|v| v as usize)
                .map_err(|_| format_err(at, format!("truncated size of dimension {k}")))
        })
        .collect()
}

fn payload<'a>(cur: &Cursor<&'a [u8]>, len: usize) -> Result<&'a [u8]> {
    let start = cur.position() as usize;
    let data = *cur.get_ref();
    let have = data.len() - start;
    if have < len {
        return Err(format_err(data.len() as u64, format!("truncated data: {len} bytes expected, {have} present")));
    }
    Ok(&data[start..start + len])
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let mut cur = Cursor::new(bytes);
    let dims = header(&mut cur, IMAGES_MAGIC, 3)?;
    let (count, rows, cols) = (dims[0], dims[1], dims[2]);
    let len =
        count.checked_mul(rows).and_then(|v| v.checked_mul(cols)).ok_or_else(|| format_err(4, "size overflow"))?;
    let pixels = payload(&cur, len)?.to_vec();
    Ok(IdxImages { count, rows, cols, pixels })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut cur = Cursor::new(bytes);
    let count = header(&mut cur, LABELS_MAGIC, 1)?[0];
    Ok(payload(&cur, count)?.to_vec())
}

/// Reads an image/label file pair into a cloud of `rows * cols`-vectors
/// scaled to `[0, 1]` (Euclidean metric) and class labels, keeping at most
/// `limit` images.
pub fn ingest_idx(images: &Path, labels: &Path, limit: Option<usize>) -> Result<(PointCloud<f64>, Vec<usize>)> {
    let img_bytes = fs::read(images).map_err(|e| Error::io(images, e))?;
    let lab_bytes = fs::read(labels).map_err(|e| Error::io(labels, e))?;
    let img = parse_idx_images(&img_bytes)?;
    let lab = parse_idx_labels(&lab_bytes)?;
    if lab.len() != img.count {
        return Err(format_err(4, format!("{} labels for {} images", lab.len(), img.count)));
    }
    let keep = limit.map_or(img.count, |l| l.min(img.count));
    let dim = img.rows * img.cols;
    if dim == 0 {
        return Err(format_err(8, "images have zero pixels"));
    }
    let coords: Vec<f64> = img.pixels[..keep * dim].iter().map(|&p| p as f64 / 255.0).collect();
    let cloud = PointCloud::from_flat(coords, dim, Metric::Euclidean)?;
    Ok((cloud, lab[..keep].iter().map(|&c| c as usize).collect()))
}
