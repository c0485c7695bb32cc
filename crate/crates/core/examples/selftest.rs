//! Runs the built-in checks and prints one line per check.

fn main() {
    let checks = vqc::harness::selftest();
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
}
