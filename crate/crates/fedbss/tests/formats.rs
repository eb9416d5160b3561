//! Integration checks for the on-disk formats: IDX datasets, parameter
//! checkpoints, and an optional real Fashion-MNIST round-trip.

use std::path::{Path, PathBuf};

use fedbss::data::load_idx;
use fedbss::nn::{checkpoint, Architecture, Model};
use fedbss::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn idx_fixture_loads_with_known_pixels_and_labels() {
    let data = load_idx(&fixture("fixture_images.idx"), &fixture("fixture_labels.idx")).unwrap();
    assert_eq!(data.len(), 2);
    assert_eq!(data.feature_shape(), &[2, 3]);
    assert_eq!(data.labels(), &[7, 2]);
    assert_eq!(data.num_classes(), 8);

    let expected0 = [0.0, 128.0 / 255.0, 1.0, 64.0 / 255.0, 32.0 / 255.0, 16.0 / 255.0];
    let expected1 = [1.0, 1.0 / 255.0, 2.0 / 255.0, 3.0 / 255.0, 4.0 / 255.0, 5.0 / 255.0];
    for (got, want) in data.samples().row(0).iter().zip(expected0) {
        assert_eq!(*got, want as f32);
    }
    for (got, want) in data.samples().row(1).iter().zip(expected1) {
        assert_eq!(*got, want as f32);
    }
}

#[test]
fn idx_errors_name_the_offending_byte_offset() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("bad_images.idx");
    let labels = dir.path().join("labels.idx");
    std::fs::copy(fixture("fixture_labels.idx"), &labels).unwrap();

    // Wrong image magic: the failure is at offset 0 and renders a
    // human-readable message naming the byte.
    let mut bytes = std::fs::read(fixture("fixture_images.idx")).unwrap();
    bytes[3] = 0x99;
    std::fs::write(&images, &bytes).unwrap();
    match load_idx(&images, &labels) {
        Err(e @ Error::IdxFormat { offset: 0, .. }) => {
            assert!(e.to_string().contains("at byte 0"), "message was: {e}");
        }
        other => panic!("expected an IDX error at offset 0, got {other:?}"),
    }

    // Truncated payload: the failure points at where the data ran out.
    let good = std::fs::read(fixture("fixture_images.idx")).unwrap();
    std::fs::write(&images, &good[..good.len() - 2]).unwrap();
    match load_idx(&images, &labels) {
        Err(Error::IdxFormat { offset, .. }) => assert_eq!(offset, good.len() as u64 - 2),
        other => panic!("expected an IDX error, got {other:?}"),
    }
}

#[test]
fn checkpoints_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.pv");
    let arch = Architecture::mlp(&[6], 5, 3).unwrap();
    let params = Model::<f32>::init(arch.clone(), 99).into_params();
    checkpoint::write_params(&path, &params).unwrap();
    let back = checkpoint::read_params(&path, &arch).unwrap();
    assert!(back.bit_identical(&params));
}

/// Optional end-to-end check against real Fashion-MNIST IDX files.
///
/// Point `FEDBSS_FASHION_MNIST_DIR` at a directory holding the four
/// standard files (train-images-idx3-ubyte, train-labels-idx1-ubyte,
/// t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte) to enable it; without
/// the variable the test passes vacuously so offline CI stays green.
#[test]
fn fashion_mnist_loads_when_available() {
    let Ok(dir) = std::env::var("FEDBSS_FASHION_MNIST_DIR") else {
        eprintln!("FEDBSS_FASHION_MNIST_DIR not set; skipping the Fashion-MNIST check");
        return;
    };
    let dir = Path::new(&dir);
    let train = load_idx(
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
    )
    .unwrap();
    let test = load_idx(
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
    )
    .unwrap();
    assert_eq!(train.len(), 60_000);
    assert_eq!(test.len(), 10_000);
    assert_eq!(train.feature_shape(), &[28, 28]);
    assert_eq!(train.num_classes(), 10);
    assert!(train.samples().all_finite());
}
