//! IDX image/label file loading (the MNIST family's container format).
//!
//! Both files are big-endian: images start with magic `0x00000803` followed
//! by count, rows, and cols; labels start with magic `0x00000801` followed by
//! count. Payloads are unsigned bytes. Pixels are scaled to `[0, 1]`;
//! validation failures report the byte offset of the problem so truncated or
//! mislabelled downloads are easy to spot.

use std::fs;
use std::path::Path;

use crate::data::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nn::Tensor;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn idx_error(path: &Path, offset: u64, reason: impl Into<String>) -> Error {
    Error::IdxFormat {
        path: path.to_path_buf(),
        offset,
        reason: reason.into(),
    }
}

fn read_u32_be(path: &Path, bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(idx_error(
            path,
            bytes.len() as u64,
            format!("file ends inside the 4-byte field at offset {offset}"),
        ));
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().expect("4 bytes")))
}

/// Loads an images + labels file pair into a dataset of shape
/// `(count, rows, cols)` with pixels in `[0, 1]`.
///
/// The two files must agree on the sample count. The class count is inferred
/// as `max label + 1` (at least 2).
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let image_bytes = fs::read(images_path)?;
    let label_bytes = fs::read(labels_path)?;

    let magic = read_u32_be(images_path, &image_bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(idx_error(
            images_path,
            0,
            format!("magic {magic:#010x}, expected {IMAGE_MAGIC:#010x} (u8 images, 3 dims)"),
        ));
    }
    let count = read_u32_be(images_path, &image_bytes, 4)? as usize;
    let rows = read_u32_be(images_path, &image_bytes, 8)? as usize;
    let cols = read_u32_be(images_path, &image_bytes, 12)? as usize;
    if count == 0 || rows == 0 || cols == 0 {
        return Err(idx_error(
            images_path,
            4,
            format!("degenerate dimensions {count}x{rows}x{cols}"),
        ));
    }
    let expected = 16 + count * rows * cols;
    if image_bytes.len() != expected {
        return Err(idx_error(
            images_path,
            image_bytes.len().min(expected) as u64,
            format!(
                "{} bytes for {count} images of {rows}x{cols}, expected {expected}",
                image_bytes.len()
            ),
        ));
    }

    let magic = read_u32_be(labels_path, &label_bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(idx_error(
            labels_path,
            0,
            format!("magic {magic:#010x}, expected {LABEL_MAGIC:#010x} (u8 labels, 1 dim)"),
        ));
    }
    let label_count = read_u32_be(labels_path, &label_bytes, 4)? as usize;
    if label_count != count {
        return Err(idx_error(
            labels_path,
            4,
            format!("{label_count} labels for {count} images"),
        ));
    }
    let expected = 8 + count;
    if label_bytes.len() != expected {
        return Err(idx_error(
            labels_path,
            label_bytes.len().min(expected) as u64,
            format!("{} bytes for {count} labels, expected {expected}", label_bytes.len()),
        ));
    }

    let pixels: Vec<f32> = image_bytes[16..].iter().map(|&b| f32::from(b) / 255.0).collect();
    let labels: Vec<usize> = label_bytes[8..].iter().map(|&b| b as usize).collect();
    let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let samples = Tensor::new(vec![count, rows, cols], pixels).expect("length checked");
    Dataset::new(samples, labels, num_classes.max(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    /// Writes a valid 2-image 2x3 fixture pair and returns the paths.
    fn fixture(dir: &Path) -> (PathBuf, PathBuf) {
        let images = dir.join("images.idx");
        let labels = dir.join("labels.idx");
        let mut img = Vec::new();
        img.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        img.extend_from_slice(&2u32.to_be_bytes());
        img.extend_from_slice(&2u32.to_be_bytes());
        img.extend_from_slice(&3u32.to_be_bytes());
        img.extend_from_slice(&[0, 128, 255, 64, 32, 16]);
        img.extend_from_slice(&[255, 1, 2, 3, 4, 5]);
        fs::write(&images, img).unwrap();
        let mut lab = Vec::new();
        lab.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        lab.extend_from_slice(&2u32.to_be_bytes());
        lab.extend_from_slice(&[7, 2]);
        fs::write(&labels, lab).unwrap();
        (images, labels)
    }

    #[test]
    fn loads_and_scales_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let (images, labels) = fixture(dir.path());
        let d = load_idx(&images, &labels).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.feature_shape(), &[2, 3]);
        assert_eq!(d.labels(), &[7, 2]);
        assert_eq!(d.num_classes(), 8);

        let expected0 = [0.0, 128.0 / 255.0, 1.0, 64.0 / 255.0, 32.0 / 255.0, 16.0 / 255.0];
        for (a, e) in d.samples().row(0).iter().zip(expected0) {
            assert!((a - e).abs() < 1e-7);
        }
        assert!((d.samples().row(1)[0] - 1.0).abs() < 1e-7);
        assert!((d.samples().row(1)[1] - 1.0 / 255.0).abs() < 1e-7);
    }

    #[test]
    fn bad_magic_reports_offset_zero() {
        let dir = tempfile::tempdir().unwrap();
        let (images, labels) = fixture(dir.path());
        let mut bytes = fs::read(&images).unwrap();
        bytes[3] = 0x07;
        fs::write(&images, bytes).unwrap();
        match load_idx(&images, &labels) {
            Err(Error::IdxFormat { offset: 0, .. }) => {}
            other => panic!("expected IdxFormat at offset 0, got {other:?}"),
        }
    }

    #[test]
    fn truncation_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        let (images, labels) = fixture(dir.path());
        let mut bytes = fs::read(&images).unwrap();
        bytes.truncate(20);
        fs::write(&images, bytes).unwrap();
        match load_idx(&images, &labels) {
            Err(Error::IdxFormat { offset, .. }) => assert_eq!(offset, 20),
            other => panic!("expected IdxFormat, got {other:?}"),
        }
    }

    #[test]
    fn label_count_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (images, labels) = fixture(dir.path());
        let mut lab = Vec::new();
        lab.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        lab.extend_from_slice(&3u32.to_be_bytes());
        lab.extend_from_slice(&[7, 2, 1]);
        fs::write(&labels, lab).unwrap();
        assert!(matches!(
            load_idx(&images, &labels),
            Err(Error::IdxFormat { offset: 4, .. })
        ));
    }

    #[test]
    fn swapped_files_are_caught_by_magic() {
        let dir = tempfile::tempdir().unwrap();
        let (images, labels) = fixture(dir.path());
        assert!(matches!(
            load_idx(&labels, &images),
            Err(Error::IdxFormat { offset: 0, .. })
        ));
    }
}
