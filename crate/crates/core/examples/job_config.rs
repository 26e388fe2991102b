//! Driving the pipelines from a key-value job description, as the
//! command-line tool does.

use overconvergent::cli::{run_classical, run_slopes, JobConfig};

fn main() -> overconvergent::Result<()> {
    let cfg = JobConfig::from_kv(
        "p = 3\n\
         level = iwahori\n\
         weight = 2,0\n\
         ops = U,T5\n\
         degree-cutoff = 40\n\
         t-degree = 10\n",
    )?;
    print!("{}", cfg.to_kv());
    let out = run_slopes(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&out.report["operators"][0]["slopes"]).unwrap());
    print!("{}", out.csv);
    let classical = run_classical(&cfg)?;
    println!("classical dims: {}", classical.report["operators"].as_array().unwrap().iter().map(|o| o["classical_dim"].to_string()).collect::<Vec<_>>().join(", "));
    Ok(())
}
