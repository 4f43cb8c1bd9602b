//! Line-oriented claim reports: one `key value` pair per line, violations
//! as `violation <position> <detail> <frame document>`.

use std::fmt::Write as _;

use super::claims::ClaimReport;

pub fn write_report(r: &ClaimReport) -> String {
    let mut out = String::new();
    let b = &r.bounds;
    let _ = writeln!(out, "claim {}", r.claim.key());
    let _ = writeln!(out, "name {}", r.claim.slug());
    let _ = writeln!(out, "statement {}", r.claim.statement());
    let _ = writeln!(out, "bounds {b}");
    let _ = writeln!(out, "enumerated {}", r.enumerated);
    let _ = writeln!(out, "checked {}", r.checked);
    let _ = writeln!(out, "skipped {}", r.skipped);
    let _ = writeln!(out, "violations {}", r.violation_count);
    for v in &r.violations {
        let _ = writeln!(out, "violation {} {} {}", v.position, v.detail, v.frame);
    }
    for c in &r.converse {
        let _ = writeln!(
            out,
            "converse {} {} {}",
            c.fixture,
            if c.confirmed { "confirmed" } else { "unconfirmed" },
            c.statement
        );
    }
    let _ = writeln!(out, "result {}", if r.passed() { "pass" } else { "fail" });
    out
}

pub fn write_reports(reports: &[ClaimReport]) -> String {
    reports.iter().map(write_report).collect::<Vec<_>>().join("\n")
}
