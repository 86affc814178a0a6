//! Course catalog: per-course metadata and term-code ordering.
//!
//! A [`CourseKey`] is the pair of subject heading and course code, e.g.
//! `MATH 115A`. The catalog maps keys to display names and flags (upper
//! division, core, required-for-major). Term codes such as `05F` order by
//! two-digit year, then by a configurable season sequence.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Identifies one course: subject heading plus course code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CourseKey {
    subject: String,
    code: String,
}

impl CourseKey {
    pub fn new(subject: impl Into<String>, code: impl Into<String>) -> Self {
        CourseKey {
            subject: subject.into(),
            code: code.into(),
        }
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    /// Filesystem-safe form, used in output file names.
    pub fn slug(&self) -> String {
        format!("{}-{}", self.subject, self.code)
    }
}

impl fmt::Display for CourseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.subject, self.code)
    }
}

impl FromStr for CourseKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(char::is_whitespace) {
            Some((subject, code)) if !subject.is_empty() && !code.trim().is_empty() => {
                Ok(CourseKey::new(subject, code.trim()))
            }
            _ => Err(Error::Config(format!(
                "course key {s:?} must have the form \"SUBJECT CODE\""
            ))),
        }
    }
}

impl Serialize for CourseKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CourseKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Per-course metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub display_name: String,
    pub upper_division: bool,
    pub core: bool,
    /// Major codes for which this course is required.
    pub required_for: BTreeSet<String>,
}

/// All configured courses plus the configured majors.
#[derive(Debug, Clone, Default)]
pub struct CourseCatalog {
    entries: BTreeMap<CourseKey, CatalogEntry>,
    /// Major code to display name.
    majors: BTreeMap<String, String>,
}

impl CourseCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_major(&mut self, code: impl Into<String>, name: impl Into<String>) {
        self.majors.insert(code.into(), name.into());
    }

    /// Inserts a course entry. Duplicate keys are a config error.
    pub fn add_course(&mut self, key: CourseKey, entry: CatalogEntry) -> Result<()> {
        if self.entries.contains_key(&key) {
            return Err(Error::Config(format!("duplicate course {key} in catalog")));
        }
        self.entries.insert(key, entry);
        Ok(())
    }

    pub fn get(&self, key: &CourseKey) -> Option<&CatalogEntry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &CourseKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn courses(&self) -> impl Iterator<Item = (&CourseKey, &CatalogEntry)> {
        self.entries.iter()
    }

    pub fn majors(&self) -> &BTreeMap<String, String> {
        &self.majors
    }

    /// True when the course is required for every configured major.
    pub fn required_for_all_majors(&self, key: &CourseKey) -> bool {
        self.get(key).is_some_and(|e| {
            self.majors.keys().all(|m| e.required_for.contains(m))
        })
    }

    /// Checks catalog invariants: a core course must be required for every
    /// configured major.
    pub fn validate(&self) -> Result<()> {
        for (key, entry) in &self.entries {
            if entry.core {
                if let Some(major) = self
                    .majors
                    .keys()
                    .find(|m| !entry.required_for.contains(*m))
                {
                    return Err(Error::Config(format!(
                        "core course {key} is not required for major {major}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Orders term codes: two-digit year, then season letter.
///
/// The default season order is W < S < F within a calendar year. Codes that
/// do not match the `<digits><season>` pattern fall back to plain string
/// order and sort before every well-formed code, so a malformed term never
/// wins a "most recent" comparison against a well-formed one.
#[derive(Debug, Clone)]
pub struct TermRule {
    season_order: Vec<String>,
}

impl Default for TermRule {
    fn default() -> Self {
        TermRule {
            season_order: vec!["W".into(), "S".into(), "F".into()],
        }
    }
}

impl TermRule {
    pub fn new(season_order: Vec<String>) -> Result<Self> {
        if season_order.is_empty() {
            return Err(Error::Config("season_order must not be empty".into()));
        }
        Ok(TermRule { season_order })
    }

    fn parse(&self, term: &str) -> Option<(u32, usize)> {
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return None;
        }
        let season = &term[digits.len()..];
        let year = digits.parse().ok()?;
        let idx = self.season_order.iter().position(|s| s == season)?;
        Some((year, idx))
    }

    pub fn compare(&self, a: &str, b: &str) -> Ordering {
        match (self.parse(a), self.parse(b)) {
            (Some(ka), Some(kb)) => ka.cmp(&kb),
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (None, None) => a.cmp(b),
        }
    }
}
