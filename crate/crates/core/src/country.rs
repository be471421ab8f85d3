//! Country normalization from free-text place names.
//!
//! Place strings like `"Boston, Massachusetts, United States"` are reduced to
//! a canonical country tag by matching the terminal comma-separated token
//! against an alias table, with US state names accepted as a suffix heuristic.
//! Unmatched locations stay untagged rather than guessing.

/// Canonical tag for the United States, the country the reference analyses
/// single out.
pub const UNITED_STATES: &str = "united-states";

/// (canonical tag, aliases) — aliases are matched case-insensitively after
/// stripping periods, so "U.S.A." hits "usa".
const COUNTRIES: &[(&str, &[&str])] = &[
    ("united-states", &["united states", "united states of america", "usa", "us", "america"]),
    ("england", &["england"]),
    ("scotland", &["scotland"]),
    ("wales", &["wales"]),
    ("northern-ireland", &["northern ireland"]),
    ("ireland", &["ireland", "eire"]),
    ("united-kingdom", &["united kingdom", "uk", "great britain", "britain"]),
    ("canada", &["canada"]),
    ("australia", &["australia"]),
    ("new-zealand", &["new zealand"]),
    ("germany", &["germany", "deutschland"]),
    ("france", &["france"]),
    ("netherlands", &["netherlands", "holland"]),
    ("belgium", &["belgium"]),
    ("switzerland", &["switzerland"]),
    ("austria", &["austria"]),
    ("italy", &["italy"]),
    ("spain", &["spain"]),
    ("portugal", &["portugal"]),
    ("norway", &["norway"]),
    ("sweden", &["sweden"]),
    ("denmark", &["denmark"]),
    ("finland", &["finland"]),
    ("iceland", &["iceland"]),
    ("poland", &["poland"]),
    ("russia", &["russia"]),
    ("ukraine", &["ukraine"]),
    ("hungary", &["hungary"]),
    ("czechia", &["czechia", "czech republic"]),
    ("mexico", &["mexico"]),
    ("brazil", &["brazil"]),
    ("argentina", &["argentina"]),
    ("india", &["india"]),
    ("china", &["china"]),
    ("japan", &["japan"]),
    ("south-africa", &["south africa"]),
];

const US_STATES: &[&str] = &[
    "alabama", "alaska", "arizona", "arkansas", "california", "colorado", "connecticut",
    "delaware", "florida", "georgia", "hawaii", "idaho", "illinois", "indiana", "iowa",
    "kansas", "kentucky", "louisiana", "maine", "maryland", "massachusetts", "michigan",
    "minnesota", "mississippi", "missouri", "montana", "nebraska", "nevada", "new hampshire",
    "new jersey", "new mexico", "new york", "north carolina", "north dakota", "ohio",
    "oklahoma", "oregon", "pennsylvania", "rhode island", "south carolina", "south dakota",
    "tennessee", "texas", "utah", "vermont", "virginia", "washington", "west virginia",
    "wisconsin", "wyoming",
];

/// Maps a free-text location to a canonical country tag, or `None` when the
/// terminal token is not recognized.
pub fn normalize_country(location: &str) -> Option<&'static str> {
    let terminal = location.rsplit(',').next()?.trim();
    if terminal.is_empty() {
        return None;
    }
    let mut key = terminal.to_ascii_lowercase().replace('.', "");
    // Collapse runs of whitespace so "new    york" still matches.
    key = key.split_whitespace().collect::<Vec<_>>().join(" ");
    for (tag, aliases) in COUNTRIES {
        if aliases.contains(&key.as_str()) {
            return Some(tag);
        }
    }
    if US_STATES.contains(&key.as_str()) {
        return Some(UNITED_STATES);
    }
    None
}

/// Normalizes a user-supplied country argument to the same tag space as
/// [`normalize_country`]: alias lookup first, else lowercase kebab-case of the
/// input so filters can target countries outside the alias table.
pub fn canonical_country_tag(input: &str) -> String {
    if let Some(tag) = normalize_country(input) {
        return tag.to_string();
    }
    input
        .trim()
        .to_ascii_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_token_lookup() {
        assert_eq!(normalize_country("Boston, Massachusetts, United States"), Some(UNITED_STATES));
        assert_eq!(normalize_country("London, England"), Some("england"));
        assert_eq!(normalize_country("U.S.A."), Some(UNITED_STATES));
    }

    #[test]
    fn state_suffix_heuristic() {
        assert_eq!(normalize_country("Boston, Massachusetts"), Some(UNITED_STATES));
        assert_eq!(normalize_country("Albany, New York"), Some(UNITED_STATES));
    }

    #[test]
    fn unmatched_tokens_stay_untagged() {
        assert_eq!(normalize_country("Springfield"), None);
        assert_eq!(normalize_country(""), None);
        assert_eq!(normalize_country("somewhere, atlantis"), None);
    }

    #[test]
    fn canonical_tags_for_cli_input() {
        assert_eq!(canonical_country_tag("United States"), "united-states");
        assert_eq!(canonical_country_tag("US"), "united-states");
        assert_eq!(canonical_country_tag("Outer   Mongolia"), "outer-mongolia");
    }
}
