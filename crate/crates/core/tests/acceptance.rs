//! Desk-scale acceptance run: one line per criterion, followed by its
//! verdicts.

use twophase::experiments::{run_suite, CriterionOutcome, Suite};

fn bound(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        "-".into()
    }
}

fn report(c: &CriterionOutcome) {
    let status = if c.pass { "PASS" } else { "FAIL" };
    println!("criterion {}: {status} {} ({:.1} s)", c.id, c.name, c.seconds);
    for v in &c.verdicts {
        let mark = if v.pass { "ok" } else { "FAIL" };
        println!("    {mark:4} {:<32} {:>12.5e}  in [{}, {}]", v.name, v.value, bound(v.lo), bound(v.hi));
    }
    for f in &c.flags {
        println!("    flag {f}");
    }
    if let Some(e) = &c.error {
        println!("    error {e}");
    }
}

fn main() {
    let r = run_suite(Suite::Desk, report);
    let failed: Vec<u32> = r.criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    println!("acceptance: {} of {} criteria pass", r.criteria.len() - failed.len(), r.criteria.len());
    assert_eq!(r.criteria.len(), 9);
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
