//! One PASS/FAIL line per acceptance criterion; known-unattainable criteria
//! are reported but do not fail the target.

use std::process::ExitCode;

use stacky_core::acceptance;

fn main() -> ExitCode {
    let results = acceptance::run(&[], |r| {
        for line in r.lines() {
            println!("{line}");
        }
    });
    let unexpected = results.iter().filter(|r| r.is_unexpected_failure()).count();
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
