//! `group`: structure report for a permutation group.

use fluxgroup::{simple_perfect_quotient, FiniteGroup, GroupError};

use crate::setup::resolve_group;
use crate::{CliError, Report};

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn group_report(g: &FiniteGroup) -> Report {
    let mut r = Report::new();
    r.line(format!("degree: {}", g.degree()));
    r.line(format!("order: {}", g.order()));
    let gens: Vec<String> = g.generators().iter().map(|&x| g.elem(x).to_string()).collect();
    r.line(format!("generators: {}", gens.join(" ; ")));
    let classes = g.conjugacy_classes();
    let sizes: Vec<String> = classes.iter().map(|c| c.len().to_string()).collect();
    r.line(format!("classes: {} sizes {}", classes.len(), sizes.join(" ")));
    let series = g.derived_series();
    let orders: Vec<String> = series.iter().map(|s| s.order().to_string()).collect();
    r.line(format!("derived series: {}", orders.join(" > ")));
    r.line(format!("abelian: {}", yes(g.is_abelian())));
    r.line(format!("solvable: {}", yes(g.is_solvable())));
    r.line(format!("perfect: {}", yes(g.is_perfect())));
    r.line(format!("simple: {}", yes(g.is_simple())));
    match simple_perfect_quotient(g) {
        Ok(cc) => {
            let q = &cc.quotient;
            r.line(format!(
                "quotient: |P| = {} |N| = {} |P/N| = {} perfect {} simple {}",
                cc.p.order(),
                cc.n.order(),
                q.order(),
                yes(q.is_perfect()),
                yes(q.is_simple())
            ));
        }
        Err(GroupError::SolvableGroup) => r.line("quotient: SolvableGroup"),
        Err(e) => r.check(false, format!("quotient: {e}")),
    }
    r
}

/// `spec` is a group name or generators such as `(1 2 3 4 5);(1 2 3)`.
pub fn cmd_group(spec: &str) -> Result<Report, CliError> {
    let g = resolve_group(Some(spec))?;
    Ok(group_report(&g))
}
