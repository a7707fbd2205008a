use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fractafold_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        ff_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

struct Mesh(*mut FfMesh);

impl Mesh {
    fn new(base: u32, size: usize, level: usize) -> Result<Self, i32> {
        let mut h = ptr::null_mut();
        match unsafe { ff_mesh_new(base, size, level, &mut h) } {
            FF_OK => Ok(Mesh(h)),
            e => {
                assert!(h.is_null());
                Err(e)
            }
        }
    }

    fn spectrum(&self, level: usize) -> Vec<f64> {
        let mut len = 0;
        assert_eq!(unsafe { ff_mesh_spectrum(self.0, level, ptr::null_mut(), 0, &mut len) }, FF_ERR_BUFFER);
        let mut v = vec![0.0; len];
        assert_eq!(unsafe { ff_mesh_spectrum(self.0, level, v.as_mut_ptr(), v.len(), &mut len) }, FF_OK);
        v
    }
}

impl Drop for Mesh {
    fn drop(&mut self) {
        unsafe { ff_mesh_free(self.0) };
    }
}

#[test]
fn polynomial_round_trip() {
    let (mut lo, mut hi, mut back) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(ff_r_inverse(5.0, 4.0, &mut lo, &mut hi), FF_OK);
        assert!(lo < hi);
        assert_eq!(ff_r_apply(5.0, lo, &mut back), FF_OK);
        assert!((back - 4.0).abs() < 1e-12);
        assert_eq!(ff_r_apply(5.0, hi, &mut back), FF_OK);
        assert!((back - 4.0).abs() < 1e-12);
    }
    assert_eq!((lo, hi), (1.0, 4.0));
}

#[test]
fn interval_limit_is_a_cosine() {
    let mut r = 0.0;
    for z in [0.5, 3.0, 10.0] {
        assert_eq!(unsafe { ff_frak_r(4.0, z, 1e-13, &mut r) }, FF_OK);
        assert!((r - (2.0 - 2.0 * f64::sqrt(z).cos())).abs() < 1e-9);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut r = 0.0;
    assert_eq!(unsafe { ff_r_apply(0.5, 1.0, &mut r) }, FF_ERR_INVALID);
    assert!(last_error().contains("multiplier"));
    assert_eq!(unsafe { ff_r_apply(5.0, 1.0, ptr::null_mut()) }, FF_ERR_NULL);
    assert_eq!(unsafe { ff_tree_kernel(FF_LEVEL_GAMMA, 7.0, 0, &mut r) }, FF_ERR_OUT_OF_RANGE);
    assert_eq!(unsafe { ff_tree_kernel(9, 3.0, 0, &mut r) }, FF_ERR_INVALID);
    assert_eq!(Mesh::new(17, 0, 1).err(), Some(FF_ERR_INVALID));
    assert_eq!(unsafe { ff_last_error(ptr::null_mut(), 0) }, last_error().len());
}

#[test]
fn forbidden_values() {
    assert_eq!([2.0, 5.0, 6.0].map(|x| ff_is_forbidden(x)), [1, 1, 1]);
    assert_eq!([0.0, 3.0, 4.0].map(|x| ff_is_forbidden(x)), [0, 0, 0]);
}

#[test]
fn tree_kernel_at_the_origin_is_positive() {
    let mut k = 0.0;
    assert_eq!(unsafe { ff_tree_kernel(FF_LEVEL_GAMMA, 3.0, 0, &mut k) }, FF_OK);
    assert!(k.is_finite() && k > 0.0);
}

#[test]
fn octahedral_mesh_sizes_and_spectrum() {
    let m = Mesh::new(FF_BASE_OCTAHEDRON, 0, 2).unwrap();
    let mut n = 0;
    for (level, want) in [(0, 6), (1, 18), (2, 54)] {
        assert_eq!(unsafe { ff_mesh_vertex_count(m.0, level, &mut n) }, FF_OK);
        assert_eq!(n, want);
    }
    assert_eq!(unsafe { ff_mesh_vertex_count(m.0, 3, &mut n) }, FF_ERR_INVALID);
    let s = m.spectrum(0);
    let want = [0.0, 4.0, 4.0, 4.0, 6.0, 6.0];
    assert!(s.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-9), "{s:?}");
}

#[test]
fn extension_through_the_ffi_is_an_eigenfunction() {
    let m = Mesh::new(FF_BASE_OCTAHEDRON, 0, 1).unwrap();
    let u = [1.0; 6];
    let mut len = 0;
    assert_eq!(unsafe { ff_mesh_extend(m.0, 0, u.as_ptr(), u.len(), 0.0, ptr::null_mut(), 0, &mut len) }, FF_ERR_BUFFER);
    assert_eq!(len, 18);
    let mut v = vec![0.0; len];
    assert_eq!(unsafe { ff_mesh_extend(m.0, 0, u.as_ptr(), u.len(), 0.0, v.as_mut_ptr(), v.len(), &mut len) }, FF_OK);
    assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert_eq!(unsafe { ff_mesh_extend(m.0, 0, u.as_ptr(), u.len(), 5.0, v.as_mut_ptr(), v.len(), &mut len) }, FF_ERR_FORBIDDEN);
    assert_eq!(unsafe { ff_mesh_extend(m.0, 0, u.as_ptr(), 3, 0.0, v.as_mut_ptr(), v.len(), &mut len) }, FF_ERR_INVALID);
}

#[test]
fn triangle_and_ladder_bases() {
    let t = Mesh::new(FF_BASE_TRIANGLE, 0, 3).unwrap();
    let mut n = 0;
    assert_eq!(unsafe { ff_mesh_vertex_count(t.0, 3, &mut n) }, FF_OK);
    assert_eq!(n, 42);
    let l = Mesh::new(FF_BASE_CIRCULAR_LADDER_EDGES, 5, 1).unwrap();
    let mut lvl = 0;
    assert_eq!(unsafe { ff_mesh_level(l.0, &mut lvl) }, FF_OK);
    assert_eq!(lvl, 1);
    assert_eq!(Mesh::new(FF_BASE_CIRCULAR_LADDER_EDGES, 1, 1).err(), Some(FF_ERR_INVALID));
}

#[test]
fn null_handles_are_rejected_and_free_accepts_null() {
    let mut n = 0;
    assert_eq!(unsafe { ff_mesh_vertex_count(ptr::null(), 0, &mut n) }, FF_ERR_NULL);
    unsafe { ff_mesh_free(ptr::null_mut()) };
}

#[test]
fn verify_suite_by_name() {
    let mut passed = 0;
    let name = CString::new("k4").unwrap();
    assert_eq!(unsafe { ff_verify_suite(name.as_ptr(), &mut passed) }, FF_OK);
    assert_eq!(passed, 1);
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { ff_verify_suite(bad.as_ptr(), &mut passed) }, FF_ERR_INVALID);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ff_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
