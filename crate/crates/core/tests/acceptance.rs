//! One pass/fail line per acceptance criterion, at full size.

use std::process::ExitCode;

use plegma_lab::acceptance;

fn main() -> ExitCode {
    let results = acceptance::run_all(false);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if results.len() != 12 || !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
