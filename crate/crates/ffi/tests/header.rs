use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn have(tool: &str) -> bool {
    Command::new(tool)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

fn syntax_check(compiler: &str, args: &[&str], file: &Path) {
    let out = Command::new(compiler)
        .args(args)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root().join("include"))
        .arg(file)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = root().join("include/samkit.h");
    assert!(header.exists());
    if !have("cc") {
        eprintln!("cc not found; header syntax not checked");
        return;
    }
    syntax_check("cc", &["-x", "c", "-std=c11"], &header);
    syntax_check("cc", &["-std=c11"], &root().join("examples/demo.c"));
    if have("c++") {
        syntax_check("c++", &["-x", "c++", "-std=c++17"], &header);
    }
}

#[test]
fn header_matches_sources() {
    if !have("cbindgen") {
        eprintln!("cbindgen not found; header freshness not checked");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("samkit.h");
    let st = Command::new("cbindgen")
        .current_dir(root())
        .args([
            "--config",
            "cbindgen.toml",
            "--crate",
            "samkit-ffi",
            "--output",
        ])
        .arg(&fresh)
        .arg(".")
        .status()
        .unwrap();
    assert!(st.success());
    let committed = std::fs::read_to_string(root().join("include/samkit.h")).unwrap();
    assert_eq!(
        std::fs::read_to_string(fresh).unwrap(),
        committed,
        "regenerate include/samkit.h with cbindgen"
    );
}
