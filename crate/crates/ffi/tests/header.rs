use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fractafold.h")).unwrap();
    for sym in ["typedef struct FfMesh FfMesh", "ff_mesh_new", "ff_mesh_free", "ff_mesh_spectrum", "ff_last_error", "FF_ERR_FORBIDDEN"] {
        assert!(h.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(cc.status.success());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let src = std::env::temp_dir().join(format!("fractafold-header-{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"fractafold.h\"\nint main(void) { FfMesh *m = 0; size_t n = 0; return ff_mesh_vertex_count(m, 0, &n) == FF_ERR_NULL ? 0 : 1; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .output()
        .unwrap();
    let _ = std::fs::remove_file(&src);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
