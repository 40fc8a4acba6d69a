//! Acceptance suite: one line per criterion. Tolerances live in `lirf::verify`.
//! `ACCEPTANCE_ONLY=2,5` restricts the run; `KACRICE_SEED` changes the seed.

use lirf::verify;

fn main() {
    let ids: Vec<usize> = match std::env::var("ACCEPTANCE_ONLY") {
        Ok(s) => s.split(',').map(|t| t.trim().parse().expect("criterion ids are integers")).collect(),
        Err(_) => (1..=9).collect(),
    };
    let seed = std::env::var("KACRICE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut failed = 0;
    for id in ids {
        let o = verify::run(id, seed);
        println!("{}", o.line());
        if !o.passed {
            failed += 1;
            for c in o.checks.iter().filter(|c| !c.passed) {
                println!("    {c:?}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
