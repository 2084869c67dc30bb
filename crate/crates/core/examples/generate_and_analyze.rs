//! End to end through the command layer: generate a payload with sidecar and
//! report, then re-verify it from disk.

use beamsplit::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("beamsplit-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let out = dir.join("epr.bin");
    let out = out.to_str().unwrap();
    let code = run([
        "beamsplit",
        "generate",
        "--protocol",
        "epr-xor",
        "--spin",
        "1/2",
        "--theta-b",
        "90",
        "--events",
        "200000",
        "--seed",
        "43",
        "--workers",
        "4",
        "--out",
        out,
    ]);
    println!("generate exited {code}");
    let code = run(["beamsplit", "analyze", out]);
    println!("analyze exited {code}; files in {}", dir.display());
}
