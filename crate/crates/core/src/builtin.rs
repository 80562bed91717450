//! Scenarios shipped with the crate.

pub const EX_61: &str = include_str!("../scenarios/ex61.json");
pub const EX_62: &str = include_str!("../scenarios/ex62.json");
pub const LADDER: &str = include_str!("../scenarios/ladder.json");

/// Looks up a shipped scenario by example number or name.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "6.1" | "ex61" => Some(EX_61),
        "6.2" | "ex62" => Some(EX_62),
        "ladder" => Some(LADDER),
        _ => None,
    }
}

pub const NAMES: &[&str] = &["6.1", "6.2", "ladder"];

/// Internal name of a shipped scenario.
pub fn canonical(name: &str) -> Option<&'static str> {
    match name {
        "6.1" | "ex61" => Some("ex61"),
        "6.2" | "ex62" => Some("ex62"),
        "ladder" => Some("ladder"),
        _ => None,
    }
}
