//! One line per criterion, then the sub-checks. Set `ACCEPTANCE_ONLY=4,6`
//! to run a subset, `ACCEPTANCE_FAST=1` to skip Monte Carlo criteria.

use std::process::ExitCode;

use pr_markov::verify::{verify, VerifyOptions};

fn main() -> ExitCode {
    let only = std::env::var("ACCEPTANCE_ONLY").ok().map(|s| {
        s.split(',')
            .filter_map(|t| t.trim().parse::<u8>().ok())
            .collect::<Vec<_>>()
    });
    let fast = std::env::var("ACCEPTANCE_FAST").is_ok_and(|v| v == "1");
    let reports = verify(&VerifyOptions { fast, only }, |r| {
        println!("{}", r.summary_line());
        for l in r.detail_lines() {
            println!("{l}");
        }
    });
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    println!(
        "\nacceptance: {}/{} criteria passed{}",
        reports.len() - failed.len(),
        reports.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
