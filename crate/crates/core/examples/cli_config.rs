//! Driving a run from a TOML config in memory, as the binary does.

use circlechar::cli::{execute, RunConfig, RunOptions};

const CONFIG: &str = r#"
command = "characterize"
seed = 1

[group]
generators = ["1/5"]

[characterize]
sigma = "3/10"
stages = 3

[probes]
list = ["1/5", "1/7"]
"#;

fn main() {
    let cfg = RunConfig::parse(CONFIG, ".").unwrap_or_else(|e| panic!("{e}"));
    match execute(&cfg, &RunOptions::default()) {
        Ok(out) => {
            println!("{}", out.json);
            for t in &out.tables {
                println!("{}.csv: {} rows", t.name, t.rows.len());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
