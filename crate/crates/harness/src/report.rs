//! Text and TSV renderings of range reports. JSON comes from serde.

use std::fmt::Write;

use crate::verify::{ComponentReport, RangeReport};

fn facts(c: &ComponentReport) -> String {
    if c.facts.is_empty() {
        return "-".into();
    }
    let parts: Vec<String> = c.facts.iter().map(|f| format!("{} on {}", f.cycle_type, f.surface)).collect();
    parts.join("; ")
}

fn generators(c: &ComponentReport) -> String {
    let parts: Vec<String> = c.generators.iter().map(|g| format!("{}:{}", g.direction, g.permutation)).collect();
    parts.join(" ")
}

/// One line per component, then a summary line.
pub fn render_text(r: &RangeReport) -> String {
    let mut out = String::new();
    for d in &r.reports {
        if d.components.is_empty() {
            let _ = writeln!(out, "D={} {} {}: {}", d.d, d.locus, d.status, d.note.as_deref().unwrap_or(""));
            continue;
        }
        for c in &d.components {
            let _ = writeln!(
                out,
                "D={} {} [{}] {} witness {} L={} U={} facts={} concluded={} expected={} {}",
                d.d,
                d.locus,
                d.status,
                c.label,
                c.witness,
                c.lower,
                c.upper,
                facts(c),
                c.concluded,
                c.expected,
                if c.matched { "ok" } else { "MISMATCH" }
            );
        }
    }
    let s = &r.summary;
    let _ = writeln!(
        out,
        "{} {}..{}: {} matched, {} mismatched, {} informational, {} skipped, {} errors",
        r.locus, r.from, r.to, s.matched, s.mismatched, s.informational, s.skipped, s.errors
    );
    out
}

/// Tab-separated, one row per component; discriminants without components
/// get a single row.
pub fn render_tsv(r: &RangeReport) -> String {
    let mut out = String::from("D\tlocus\tstatus\tlabel\twitness\tgenerators\tL\tU\tfacts\tconcluded\texpected\tmatch\n");
    for d in &r.reports {
        if d.components.is_empty() {
            let _ = writeln!(out, "{}\t{}\t{}\t-\t-\t-\t-\t-\t-\t-\t-\t-", d.d, d.locus, d.status);
            continue;
        }
        for c in &d.components {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                d.d,
                d.locus,
                d.status,
                c.label,
                c.witness,
                generators(c),
                c.lower,
                c.upper,
                facts(c),
                c.concluded,
                c.expected,
                c.matched
            );
        }
    }
    out
}
