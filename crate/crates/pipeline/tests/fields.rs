use proptest::prelude::*;
use vortex_pipeline::fields::{write_atomic, FieldError, FieldFile, HEADER_LEN, MAGIC};

#[test]
fn header_layout() {
    let f = FieldFile::new(3, 2, 4.5, 0.35, "abcdef0123456789abcdef0123456789", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let b = f.to_bytes();
    assert_eq!(b.len(), HEADER_LEN + 48);
    assert_eq!(&b[..8], MAGIC);
    assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 3);
    assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 2);
    assert_eq!(f64::from_le_bytes(b[24..32].try_into().unwrap()), 4.5);
    assert_eq!(f64::from_le_bytes(b[32..40].try_into().unwrap()), 0.35);
    assert_eq!(&b[40..64], b"abcdef0123456789abcdef01");
    assert_eq!(f64::from_le_bytes(b[64..72].try_into().unwrap()), 1.0);
}

proptest! {
    #[test]
    fn roundtrip_is_bit_exact(nx in 1usize..12, ny in 1usize..6, lx in 0.1f64..50.0, delta in 0.1f64..0.9, seed in any::<u64>()) {
        let data: Vec<f64> = (0..nx * ny).map(|k| f64::from_bits(seed.rotate_left(k as u32) & 0x7fef_ffff_ffff_ffff)).collect();
        let f = FieldFile::new(nx, ny, lx, delta, "0123abcd", data);
        let g = FieldFile::from_bytes("t", &f.to_bytes()).unwrap();
        prop_assert_eq!(g.hash.as_str(), "0123abcd");
        prop_assert_eq!((g.nx, g.ny), (nx, ny));
        prop_assert_eq!(g.lx.to_bits(), lx.to_bits());
        prop_assert_eq!(g.delta.to_bits(), delta.to_bits());
        prop_assert!(g.data.iter().zip(&f.data).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn corrupt_files_are_rejected() {
    let f = FieldFile::new(2, 2, 1.0, 0.3, "h", vec![0.0; 4]);
    let mut b = f.to_bytes();
    assert!(matches!(FieldFile::from_bytes("t", &b[..HEADER_LEN + 8]), Err(FieldError::Length { .. })));
    assert!(matches!(FieldFile::from_bytes("t", &b[..10]), Err(FieldError::Magic(_))));
    b[0] = b'X';
    assert!(matches!(FieldFile::from_bytes("t", &b), Err(FieldError::Magic(_))));
}

#[test]
fn file_roundtrip_is_atomic_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("f.bin");
    let f = FieldFile::new(4, 1, 2.0, 0.25, "cafe", vec![-1.0, 0.5, 1e-300, 7.0]);
    f.write(&path).unwrap();
    assert_eq!(FieldFile::read(&path).unwrap(), f);
    write_atomic(&path, b"overwritten").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"overwritten");
    let names: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("f.bin")]);
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        assert_eq!(std::fs::metadata(&path).unwrap().permissions().mode() & 0o777, 0o644);
    }
}
