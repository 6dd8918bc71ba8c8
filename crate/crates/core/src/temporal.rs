//! Temporal phrase resolution to ISO-8601 duration anchors and the
//! regex-based temporal-claim counter.
//!
//! Anchors mark disease-trajectory milestones ("Gowers' sign at P3Y-P5Y"),
//! not calendar dates. Four precision levels: exact age, bounded range,
//! fuzzy qualifier (table-driven) and developmental stage (table-driven).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Duration at year/month granularity, stored as total months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoDuration {
    months: u32,
}

impl IsoDuration {
    pub fn from_months(months: u32) -> Self {
        IsoDuration { months }
    }

    pub fn from_years(years: u32) -> Self {
        IsoDuration { months: years * 12 }
    }

    pub fn total_months(&self) -> u32 {
        self.months
    }
}

impl fmt::Display for IsoDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let years = self.months / 12;
        let months = self.months % 12;
        if months == 0 {
            write!(f, "P{years}Y")
        } else if years == 0 {
            write!(f, "P{months}M")
        } else {
            write!(f, "P{years}Y{months}M")
        }
    }
}

impl FromStr for IsoDuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        static RE: OnceLock<Regex> = OnceLock::new();
        let re = RE.get_or_init(|| Regex::new(r"^P(?:(\d+)Y)?(?:(\d+)M)?$").unwrap());
        let caps = re
            .captures(s.trim())
            .ok_or_else(|| Error::Parse(format!("invalid ISO-8601 duration `{s}`")))?;
        let years: u32 = caps.get(1).map_or(Ok(0), |m| m.as_str().parse()).unwrap_or(0);
        let months: u32 = caps.get(2).map_or(Ok(0), |m| m.as_str().parse()).unwrap_or(0);
        if caps.get(1).is_none() && caps.get(2).is_none() {
            return Err(Error::Parse(format!("empty duration `{s}`")));
        }
        Ok(IsoDuration::from_months(years * 12 + months))
    }
}

impl Serialize for IsoDuration {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IsoDuration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
pub enum Precision {
    Exact,
    Range,
    Fuzzy,
    Stage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    Resolved,
    Unresolved,
}

/// Temporal anchor with derived ordering indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Hash)]
pub struct TemporalAnchor {
    pub start: Option<IsoDuration>,
    pub end: Option<IsoDuration>,
    pub precision: Option<Precision>,
    pub parse_status: ParseStatus,
}

impl TemporalAnchor {
    pub fn unresolved() -> Self {
        TemporalAnchor {
            start: None,
            end: None,
            precision: None,
            parse_status: ParseStatus::Unresolved,
        }
    }

    pub fn resolved(start: IsoDuration, end: IsoDuration, precision: Precision) -> Self {
        debug_assert!(start <= end, "anchor start must not exceed end");
        debug_assert!(
            precision != Precision::Exact || start == end,
            "exact anchors collapse to a point"
        );
        TemporalAnchor {
            start: Some(start),
            end: Some(end),
            precision: Some(precision),
            parse_status: ParseStatus::Resolved,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.parse_status == ParseStatus::Resolved
    }

    /// Human display: "P13Y" for points, "P13Y-P16Y" for intervals.
    pub fn display(&self) -> String {
        match (self.start, self.end) {
            (Some(s), Some(e)) if s == e => s.to_string(),
            (Some(s), Some(e)) => format!("{s}-{e}"),
            _ => "unresolved".to_string(),
        }
    }
}

/// Ordering index in months: round-half-up midpoint of [start, end].
/// Exact anchors return their exact month count.
pub fn time_index(anchor: &TemporalAnchor) -> Result<u32> {
    match (anchor.start, anchor.end) {
        (Some(s), Some(e)) => Ok((s.total_months() + e.total_months()).div_ceil(2)),
        _ => Err(Error::InvalidInput(
            "no index for unresolved anchor".into(),
        )),
    }
}

/// Midpoint age in years, derived from the month index.
pub fn midpoint_years(anchor: &TemporalAnchor) -> Result<f64> {
    Ok(time_index(anchor)? as f64 / 12.0)
}

/// Fuzzy and developmental-stage lookup tables, longest key first so the
/// most specific phrase wins.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TemporalTables {
    pub fuzzy: Vec<(String, IsoDuration, IsoDuration)>,
    pub stage: Vec<(String, IsoDuration, IsoDuration)>,
}

impl TemporalTables {
    pub fn sorted(mut self) -> Self {
        let by_len = |a: &(String, IsoDuration, IsoDuration), b: &(String, IsoDuration, IsoDuration)| {
            b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0))
        };
        self.fuzzy.sort_by(by_len);
        self.stage.sort_by(by_len);
        self
    }
}

fn entry(phrase: &str, start: &str, end: &str) -> (String, IsoDuration, IsoDuration) {
    (
        phrase.to_string(),
        start.parse().unwrap(),
        end.parse().unwrap(),
    )
}

/// Built-in tables. Fuzzy qualifiers carry 24 mappings; stages cover the
/// developmental periods. Pair configs may extend or override both.
pub fn default_tables() -> TemporalTables {
    TemporalTables {
        fuzzy: vec![
            entry("late teens", "P17Y", "P19Y"),
            entry("early teens", "P13Y", "P15Y"),
            entry("mid teens", "P14Y", "P16Y"),
            entry("teenage years", "P13Y", "P19Y"),
            entry("early twenties", "P20Y", "P23Y"),
            entry("late twenties", "P27Y", "P29Y"),
            entry("twenties", "P20Y", "P29Y"),
            entry("thirties", "P30Y", "P39Y"),
            entry("forties", "P40Y", "P49Y"),
            entry("fifties", "P50Y", "P59Y"),
            entry("sixties", "P60Y", "P69Y"),
            entry("middle age", "P45Y", "P65Y"),
            entry("young adulthood", "P18Y", "P35Y"),
            entry("young adults", "P18Y", "P35Y"),
            entry("elderly", "P65Y", "P90Y"),
            entry("puberty", "P10Y", "P14Y"),
            entry("preschool age", "P3Y", "P5Y"),
            entry("school age", "P6Y", "P12Y"),
            entry("toddlerhood", "P1Y", "P3Y"),
            entry("first year of life", "P0Y", "P1Y"),
            entry("first decade", "P0Y", "P10Y"),
            entry("second decade", "P10Y", "P20Y"),
            entry("third decade", "P20Y", "P30Y"),
            entry("perinatal period", "P0M", "P1M"),
        ],
        stage: vec![
            // "early childhood" follows the construction-pipeline table
            // (P1Y-P5Y); do not silently harmonize with other variants.
            entry("early childhood", "P1Y", "P5Y"),
            entry("late childhood", "P8Y", "P12Y"),
            entry("childhood", "P1Y", "P12Y"),
            entry("infancy", "P0Y", "P2Y"),
            entry("neonatal period", "P0M", "P1M"),
            entry("adolescence", "P10Y", "P19Y"),
            entry("adulthood", "P18Y", "P65Y"),
            entry("late adulthood", "P65Y", "P85Y"),
        ],
    }
    .sorted()
}

struct ResolverPatterns {
    iso_range: Regex,
    iso_single: Regex,
    num_range: Regex,
    exact_age: Regex,
    exact_unit: Regex,
}

fn patterns() -> &'static ResolverPatterns {
    static P: OnceLock<ResolverPatterns> = OnceLock::new();
    P.get_or_init(|| ResolverPatterns {
        iso_range: Regex::new(r"(?i)\bP(\d+)(Y|M)\s*[-\u{2013}\u{2014}]\s*P(\d+)(Y|M)\b").unwrap(),
        iso_single: Regex::new(r"(?i)\bP(\d+)(Y|M)\b").unwrap(),
        // "13 to 16 years", "3-5 years", "ages 3-5", "between 9 and 13 years"
        num_range: Regex::new(
            r"(?i)\b(?:between\s+)?(\d+)\s*(?:[-\u{2013}\u{2014}]|to|and)\s*(\d+)\s*(years?|yrs?|months?|mos?)\b",
        )
        .unwrap(),
        // "age 13 years", "at age 13", "aged 13", "13 years of age", "13 years old"
        exact_age: Regex::new(r"(?i)\bage[ds]?\s+(?:of\s+)?(\d+)(?:\s*(years?|yrs?|months?|mos?))?\b")
            .unwrap(),
        exact_unit: Regex::new(r"(?i)\b(\d+)\s*(years?|yrs?|months?|mos?)\s+(?:of\s+age|old)\b")
            .unwrap(),
    })
}

fn unit_months(value: u32, unit: &str) -> u32 {
    if unit.to_ascii_lowercase().starts_with('y') {
        value * 12
    } else {
        value
    }
}

/// Resolve a temporal phrase against the priority order
/// Exact > Range > Fuzzy (table) > Stage (table). Total: phrases without
/// temporal content come back unresolved, never as an error.
///
/// Exact patterns are guarded against range connectors so "13 to 16 years"
/// takes the pair reading rather than anchoring on its second number.
pub fn resolve_temporal(phrase: &str, tables: &TemporalTables) -> TemporalAnchor {
    let p = patterns();
    let folded = phrase.to_lowercase();

    let has_range = p.iso_range.is_match(phrase) || p.num_range.is_match(phrase);

    if !has_range {
        if let Some(c) = p.exact_age.captures(phrase) {
            let value: u32 = c[1].parse().unwrap_or(0);
            let months = match c.get(2) {
                Some(u) => unit_months(value, u.as_str()),
                None => value * 12,
            };
            let d = IsoDuration::from_months(months);
            return TemporalAnchor::resolved(d, d, Precision::Exact);
        }
        if let Some(c) = p.exact_unit.captures(phrase) {
            let months = unit_months(c[1].parse().unwrap_or(0), &c[2]);
            let d = IsoDuration::from_months(months);
            return TemporalAnchor::resolved(d, d, Precision::Exact);
        }
        if let Some(c) = p.iso_single.captures(phrase) {
            let months = unit_months(c[1].parse().unwrap_or(0), &c[2]);
            let d = IsoDuration::from_months(months);
            return TemporalAnchor::resolved(d, d, Precision::Exact);
        }
    }

    if let Some(c) = p.iso_range.captures(phrase) {
        let start = IsoDuration::from_months(unit_months(c[1].parse().unwrap_or(0), &c[2]));
        let end = IsoDuration::from_months(unit_months(c[3].parse().unwrap_or(0), &c[4]));
        if start <= end {
            return TemporalAnchor::resolved(start, end, Precision::Range);
        }
    }
    if let Some(c) = p.num_range.captures(phrase) {
        let start = IsoDuration::from_months(unit_months(c[1].parse().unwrap_or(0), &c[3]));
        let end = IsoDuration::from_months(unit_months(c[2].parse().unwrap_or(0), &c[3]));
        if start <= end {
            return TemporalAnchor::resolved(start, end, Precision::Range);
        }
    }

    for (key, start, end) in &tables.fuzzy {
        if folded.contains(key.as_str()) {
            return TemporalAnchor::resolved(*start, *end, Precision::Fuzzy);
        }
    }
    for (key, start, end) in &tables.stage {
        if folded.contains(key.as_str()) {
            return TemporalAnchor::resolved(*start, *end, Precision::Stage);
        }
    }
    TemporalAnchor::unresolved()
}

/// One matched time-anchored span in an output text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalSpan {
    pub offset: usize,
    pub text: String,
}

fn claim_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // Alternation order matters: longer range forms first so a single scan
    // never double-counts the pieces of a range.
    RE.get_or_init(|| {
        Regex::new(
            r"(?ix)
            \bP\d+(?:Y|M)\s*[-\u{2013}\u{2014}]\s*P\d+(?:Y|M)\b            # ISO interval
          | \bP\d+(?:Y|M)(?:\d+M)?\b                                       # ISO duration
          | \b(?:age[ds]?\s+(?:of\s+)?)?\d+\s*(?:[-\u{2013}\u{2014}]|\bto\b)\s*\d+\s*(?:years?|yrs?|months?|weeks?|days?)\b
          | \b\d+\s*[-\u{2013}\u{2014}]\s*\d+[-\u{2013}\u{2014}](?:year|month|week|day)\b  # 7-14-day
          | \bage[ds]?\s+(?:of\s+)?\d+\b                                   # at age 11
          | \b\d+\s*(?:years?|months?|weeks?|days?)\s+(?:of\s+age|old)\b
            ",
        )
        .unwrap()
    })
}

/// Count time-anchored claims: ISO-8601 duration tokens and natural
/// age-range patterns. Identical spans at identical offsets collapse to one.
pub fn extract_temporal_claims(text: &str) -> (usize, Vec<TemporalSpan>) {
    let mut spans: Vec<TemporalSpan> = Vec::new();
    for m in claim_pattern().find_iter(text) {
        let span = TemporalSpan {
            offset: m.start(),
            text: m.as_str().to_string(),
        };
        if !spans.iter().any(|s| s == &span) {
            spans.push(span);
        }
    }
    (spans.len(), spans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tables() -> TemporalTables {
        default_tables()
    }

    #[test]
    fn resolver_exact_age() {
        let a = resolve_temporal("age 13 years", &tables());
        assert_eq!(a.display(), "P13Y");
        assert_eq!(a.precision, Some(Precision::Exact));
        assert_eq!(a.start, a.end);
    }

    #[test]
    fn resolver_range() {
        let a = resolve_temporal("13 to 16 years", &tables());
        assert_eq!(a.display(), "P13Y-P16Y");
        assert_eq!(a.precision, Some(Precision::Range));
        let b = resolve_temporal("ages 3-5 years", &tables());
        assert_eq!(b.display(), "P3Y-P5Y");
    }

    #[test]
    fn resolver_fuzzy_table() {
        let a = resolve_temporal("late teens", &tables());
        assert_eq!(a.display(), "P17Y-P19Y");
        assert_eq!(a.precision, Some(Precision::Fuzzy));
    }

    #[test]
    fn resolver_stage_table_default() {
        let a = resolve_temporal("onset in early childhood", &tables());
        assert_eq!(a.display(), "P1Y-P5Y");
        assert_eq!(a.precision, Some(Precision::Stage));
    }

    #[test]
    fn resolver_unresolved() {
        let a = resolve_temporal("the quick brown fox", &tables());
        assert!(!a.is_resolved());
        assert_eq!(a.parse_status, ParseStatus::Unresolved);
    }

    #[test]
    fn resolver_iso_tokens() {
        assert_eq!(resolve_temporal("P13Y", &tables()).display(), "P13Y");
        assert_eq!(
            resolve_temporal("window P9Y-P13Y", &tables()).display(),
            "P9Y-P13Y"
        );
        assert_eq!(resolve_temporal("P6M", &tables()).display(), "P6M");
    }

    #[test]
    fn resolver_case_insensitive() {
        assert_eq!(resolve_temporal("Late Teens", &tables()).display(), "P17Y-P19Y");
        assert_eq!(resolve_temporal("AGE 13 YEARS", &tables()).display(), "P13Y");
    }

    #[test]
    fn time_index_goldens() {
        let exact = TemporalAnchor::resolved(
            IsoDuration::from_years(13),
            IsoDuration::from_years(13),
            Precision::Exact,
        );
        assert_eq!(time_index(&exact).unwrap(), 156);
        // Midpoint 14.5y = 174 months; hand-checked.
        let r = TemporalAnchor::resolved(
            IsoDuration::from_years(13),
            IsoDuration::from_years(16),
            Precision::Range,
        );
        assert_eq!(time_index(&r).unwrap(), 174);
        // Midpoint 11y = 132 months; hand-checked.
        let r = TemporalAnchor::resolved(
            IsoDuration::from_years(9),
            IsoDuration::from_years(13),
            Precision::Range,
        );
        assert_eq!(time_index(&r).unwrap(), 132);
        assert_eq!(midpoint_years(&r).unwrap(), 11.0);
        assert!(time_index(&TemporalAnchor::unresolved()).is_err());
    }

    #[test]
    fn time_index_rounds_half_up() {
        let r = TemporalAnchor::resolved(
            IsoDuration::from_months(1),
            IsoDuration::from_months(2),
            Precision::Range,
        );
        assert_eq!(time_index(&r).unwrap(), 2);
    }

    #[test]
    fn claims_paper_example() {
        let (n, spans) =
            extract_temporal_claims("Gowers' sign at P3Y-P5Y; loss of ambulation around age 11");
        assert_eq!(n, 2, "spans: {spans:?}");
        assert_eq!(spans[0].text, "P3Y-P5Y");
        assert_eq!(spans[1].text, "age 11");
    }

    #[test]
    fn claims_no_temporal_content() {
        let (n, _) = extract_temporal_claims("onset of symptoms (delayed motor milestones)");
        assert_eq!(n, 0);
        assert_eq!(extract_temporal_claims("").0, 0);
    }

    #[test]
    fn claims_grammar_coverage() {
        assert_eq!(extract_temporal_claims("nadir within 2-4 weeks").0, 1);
        assert_eq!(extract_temporal_claims("a 7-14-day window").0, 1);
        assert_eq!(extract_temporal_claims("age 3\u{2013}5 years").0, 1);
        assert_eq!(extract_temporal_claims("loss of ambulation at age 11").0, 1);
        assert_eq!(extract_temporal_claims("cardiac review from 10 years of age").0, 1);
        // A bare count of years without age context is not a claim.
        assert_eq!(extract_temporal_claims("followed for 5 years in clinic").0, 0);
    }

    #[test]
    fn claims_range_not_double_counted() {
        let (n, spans) = extract_temporal_claims("milestones at age 3-5 years");
        assert_eq!(n, 1, "spans: {spans:?}");
        assert_eq!(spans[0].text, "age 3-5 years");
    }

    #[test]
    fn duration_parse_display_roundtrip() {
        for s in ["P13Y", "P6M", "P1Y6M", "P0Y"] {
            let d: IsoDuration = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("P".parse::<IsoDuration>().is_err());
        assert!("13Y".parse::<IsoDuration>().is_err());
    }

    proptest! {
        #[test]
        fn resolver_total_and_deterministic(phrase in ".{0,80}") {
            let t = tables();
            let a = resolve_temporal(&phrase, &t);
            let b = resolve_temporal(&phrase, &t);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn resolved_anchor_ordered(y1 in 0u32..40, y2 in 0u32..40) {
            let phrase = format!("{} to {} years", y1.min(y2), y1.max(y2));
            let a = resolve_temporal(&phrase, &tables());
            prop_assert!(a.is_resolved());
            prop_assert!(a.start.unwrap() <= a.end.unwrap());
        }

        #[test]
        fn index_monotone_over_disjoint_intervals(
            a1 in 0u32..200, alen in 0u32..60, gap in 1u32..40, blen in 0u32..60
        ) {
            let a2 = a1 + alen;
            let b1 = a2 + gap;
            let b2 = b1 + blen;
            let anchor_a = TemporalAnchor::resolved(
                IsoDuration::from_months(a1), IsoDuration::from_months(a2), Precision::Range);
            let anchor_b = TemporalAnchor::resolved(
                IsoDuration::from_months(b1), IsoDuration::from_months(b2), Precision::Range);
            prop_assert!(time_index(&anchor_a).unwrap() <= time_index(&anchor_b).unwrap());
            // Strict when the gap is wide enough that midpoints cannot tie.
            if b1 + b2 > a1 + a2 + 1 {
                prop_assert!(time_index(&anchor_a).unwrap() < time_index(&anchor_b).unwrap());
            }
        }

        #[test]
        fn claim_count_superadditive_on_concat(
            t1 in "[a-zA-Z0-9 .;-]{0,60}", t2 in "[a-zA-Z0-9 .;-]{0,60}"
        ) {
            let joined = format!("{t1} {t2}");
            let n_joined = extract_temporal_claims(&joined).0;
            let n1 = extract_temporal_claims(&t1).0;
            let n2 = extract_temporal_claims(&t2).0;
            prop_assert!(n_joined >= n1.max(n2), "{t1:?} + {t2:?}: {n_joined} < max({n1},{n2})");
        }
    }
}
