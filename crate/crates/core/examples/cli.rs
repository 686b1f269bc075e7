//! Drives the command-line harness in-process: a config file, a flag that
//! overrides it, JSON and CSV outputs.

use tvstair::cli;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let cfg = dir.path().join("staircase.cfg");
    std::fs::write(&cfg, "# lambda from the file, n from the flag\nlambda = 16\nn = 10\n")?;
    let out = dir.path().join("r.json");
    let csv = dir.path().join("u.csv");

    let code = cli::run([
        "tvstair",
        "--config",
        cfg.to_str().unwrap(),
        "rof-staircase",
        "--n",
        "40",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    println!("exit code {code}");
    println!("{}", std::fs::read_to_string(&out)?);
    println!("{} CSV rows", std::fs::read_to_string(&csv)?.lines().count() - 1);

    // numerical failure: the staircase result needs lambda > 4
    println!("lambda = 4 exits with {}", cli::run(["tvstair", "rof-staircase", "--lambda", "4"]));
    Ok(())
}
