//! Shared pieces of the structured reports.

use serde::Serializer;

use crate::symkernel::Expr;

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

pub fn ser_expr<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
