//! Run a scenario from TOML text and list the artifacts of the run
//! directory.
//!
//! ```bash
//! cargo run --release --example scenario_run -- /tmp/fsi-runs
//! ```

use std::path::PathBuf;

use fsi_strip::io::{run_text, RunOptions};

const SCENARIO: &str = r#"
kind = "sweep-gevrey"
seed = 3

[config]
L = 6.283185307179586
ns = 16
ny = 16
nu = 1.0
alpha1 = 1.0
alpha2 = 0.0

[eta10]
preset = "random-smooth"
amplitude = 0.1
decay = 2.0

[sweep]
samples = 16
band = { lo = 1.0, hi = 100.0 }
"#;

fn main() -> fsi_strip::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("fsi-runs"));
    let out = run_text(
        SCENARIO,
        &RunOptions {
            out: Some(root),
            ..Default::default()
        },
    )?;
    println!("run directory {}", out.dir.display());
    println!("exit code {}, verdict {:?}", out.exit_code, out.verdict);
    let mut names: Vec<String> = std::fs::read_dir(&out.dir)
        .map_err(|e| fsi_strip::FsiError::Numerical(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    names.sort();
    for n in names {
        println!("  {n}");
    }
    Ok(())
}
