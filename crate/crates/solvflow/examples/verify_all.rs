// Run the whole verification battery over every built-in preset and print
// one line per check, same gates as `solvflow verify --all`.

use solvflow::params::preset_names;
use solvflow::verify;

fn main() -> solvflow::Result<()> {
    let mut passed = 0usize;
    let mut failed = 0usize;

    for name in preset_names() {
        println!("== {} ==", name);
        for c in verify::run_all(name)? {
            println!("{}", verify::format_line(&c));
            if c.passed {
                passed += 1;
            } else {
                failed += 1;
            }
        }
        println!();
    }

    println!("{} passed, {} failed", passed, failed);
    assert_eq!(failed, 0);
    Ok(())
}
