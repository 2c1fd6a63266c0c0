//! Compiles a small C program against the generated header and, when the
//! static library is present next to the test binary, links and runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "grinblat.h"

int main(void) {
    GrinblatInstance *inst = NULL;
    GrinblatMatching *m = NULL;
    if (grinblat_gen_lower_bound(3, &inst) != GRINBLAT_STATUS_OK) return 10;
    if (grinblat_exact(inst, 1000000, &m) != GRINBLAT_STATUS_NO_MATCHING) return 11;
    grinblat_instance_free(inst);
    if (grinblat_gen_random(30, 0, 1, 0, &inst) != GRINBLAT_STATUS_OK) return 12;
    if (grinblat_solve(inst, 0, 0, 10000000, &m) != GRINBLAT_STATUS_OK) return 13;
    uint32_t pairs[60];
    if (grinblat_matching_pairs(m, pairs, 60) != GRINBLAT_STATUS_OK) return 14;
    if (grinblat_verify(inst, pairs, 30) != GRINBLAT_STATUS_OK) return 15;
    pairs[1] = pairs[2];
    if (grinblat_verify(inst, pairs, 30) != GRINBLAT_STATUS_INVALID_MATCHING) return 16;
    printf("%s\n", grinblat_last_error());
    grinblat_matching_free(m);
    grinblat_instance_free(inst);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    // target/<profile>/deps/<test binary>
    let profile = exe.parent()?.parent()?;
    Some(profile.join("libgrinblat_ffi.a")).filter(|p| p.exists())
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_smoke");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; link step skipped");
        return;
    };
    let exe = dir.join("smoke");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("relation"));
}
