//! MCS reports: JSON, CSV and plain-text forms, parsing, and comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cex::PathJson;
use crate::fixpoint::SessionStats;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsReport {
    /// `symbolic` or `oracle`.
    pub source: String,
    /// `naive`, `systematic` or `brute-force`.
    pub strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Basic events of the model, in declaration order.
    pub universe: Vec<String>,
    /// Minimal cut sets in emission order.
    pub mcs: Vec<McsEntry>,
    #[serde(default)]
    pub rounds: Vec<RoundStat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<Counters>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub events: Vec<String>,
    /// 1-based round in which the set was emitted.
    pub iteration: usize,
    /// Cut set of the round's first counterexample, before shrinking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_cut_set: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PathJson>,
}

/// One row per round: sizes of the initial and the minimal cut set, and the
/// time the round took.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundStat {
    pub iteration: usize,
    pub ics_size: usize,
    pub mcs_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulative_seconds: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub fixpoint_runs: u64,
    pub gc_fixpoint_runs: u64,
    pub image_calls: u64,
    pub preimage_calls: u64,
}

impl From<&SessionStats> for Counters {
    fn from(s: &SessionStats) -> Self {
        Counters {
            fixpoint_runs: s.fixpoint_runs,
            gc_fixpoint_runs: s.gc_fixpoint_runs,
            image_calls: s.image_calls,
            preimage_calls: s.preimage_calls,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    /// Milliseconds per phase.
    pub phases: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Malformed(String),
}

/// A family of cut sets, each sorted by name, for order-insensitive
/// comparison.
pub type Family = BTreeSet<BTreeSet<String>>;

impl McsReport {
    /// Report of a brute-force oracle run.
    pub fn from_oracle(universe: Vec<String>, family: Vec<Vec<String>>) -> Self {
        McsReport {
            source: "oracle".into(),
            strategy: "brute-force".into(),
            mode: None,
            universe,
            mcs: family
                .into_iter()
                .enumerate()
                .map(|(i, events)| McsEntry {
                    events,
                    iteration: i + 1,
                    initial_cut_set: None,
                    witness: None,
                })
                .collect(),
            rounds: Vec::new(),
            counters: None,
            timings: None,
        }
    }

    /// Drops wall-clock data so that equal runs render byte-identically.
    pub fn without_timings(mut self) -> Self {
        self.timings = None;
        for r in &mut self.rounds {
            r.seconds = None;
            r.cumulative_seconds = None;
        }
        self
    }

    pub fn family(&self) -> Family {
        self.mcs
            .iter()
            .map(|e| e.events.iter().cloned().collect())
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.mcs.iter().map(|e| e.events.len()).collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serialisable");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    /// One row per MCS: `size,iteration,events` with events separated by
    /// `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,iteration,events\n");
        for e in &self.mcs {
            let _ = writeln!(
                out,
                "{},{},{}",
                e.events.len(),
                e.iteration,
                e.events.join(";")
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = self
            .mode
            .as_deref()
            .map(|m| format!(", {m}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{} minimal cut sets ({} {}{mode})",
            self.mcs.len(),
            self.source,
            self.strategy
        );
        for e in &self.mcs {
            let _ = writeln!(out, "{{{}}}", e.events.join(", "));
        }
        out
    }

    /// Per-round timings as CSV (`iteration,seconds,cumulative_seconds,
    /// ics_size,mcs_size`), for plotting.
    pub fn rounds_csv(&self) -> String {
        let mut out = String::from("iteration,seconds,cumulative_seconds,ics_size,mcs_size\n");
        let num = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        for r in &self.rounds {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.iteration,
                num(r.seconds),
                num(r.cumulative_seconds),
                r.ics_size,
                r.mcs_size
            );
        }
        out
    }
}

pub fn parse_json(text: &str) -> Result<McsReport, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))
}

/// Reads the family from any of the three report formats.
pub fn parse_family(text: &str) -> Result<Family, ReportError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return parse_json(text).map(|r| r.family());
    }
    let mut lines = trimmed.lines();
    let first = lines
        .next()
        .ok_or_else(|| ReportError::Malformed("empty report".into()))?;
    if first.trim() == "size,iteration,events" {
        let mut fam = Family::new();
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.splitn(3, ',').collect();
            if cols.len() != 3 {
                return Err(ReportError::Malformed(format!("csv row {}", i + 2)));
            }
            let size: usize = cols[0]
                .parse()
                .map_err(|_| ReportError::Malformed(format!("csv row {}: size", i + 2)))?;
            let set: BTreeSet<String> = cols[2]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            if set.len() != size {
                return Err(ReportError::Malformed(format!(
                    "csv row {}: size mismatch",
                    i + 2
                )));
            }
            fam.insert(set);
        }
        return Ok(fam);
    }
    if first.contains("minimal cut sets") {
        let mut fam = Family::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let inner = line
                .strip_prefix('{')
                .and_then(|l| l.strip_suffix('}'))
                .ok_or_else(|| ReportError::Malformed(format!("bad set `{line}`")))?;
            fam.insert(
                inner
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
            );
        }
        return Ok(fam);
    }
    Err(ReportError::Malformed("unrecognised report format".into()))
}

/// Sets present in only one of the two families.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyDiff {
    pub only_a: Vec<BTreeSet<String>>,
    pub only_b: Vec<BTreeSet<String>>,
}

impl FamilyDiff {
    pub fn is_empty(&self) -> bool {
        self.only_a.is_empty() && self.only_b.is_empty()
    }
}

pub fn diff_families(a: &Family, b: &Family) -> FamilyDiff {
    FamilyDiff {
        only_a: a.difference(b).cloned().collect(),
        only_b: b.difference(a).cloned().collect(),
    }
}

pub fn format_set(s: &BTreeSet<String>) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> McsReport {
        let mut r = McsReport::from_oracle(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec!["A".into()], vec!["B".into(), "C".into()]],
        );
        r.rounds.push(RoundStat {
            iteration: 1,
            ics_size: 2,
            mcs_size: 1,
            seconds: Some(0.5),
            cumulative_seconds: Some(0.5),
        });
        r.timings = Some(Timings::default());
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let text = r.render(Format::Json);
        assert_eq!(parse_json(&text).unwrap(), r);
        assert_eq!(parse_json(&text).unwrap().render(Format::Json), text);
    }

    #[test]
    fn every_format_yields_the_family() {
        let r = sample();
        for f in [Format::Json, Format::Csv, Format::Text] {
            assert_eq!(parse_family(&r.render(f)).unwrap(), r.family(), "{f:?}");
        }
    }

    #[test]
    fn empty_set_versus_no_sets() {
        let with_empty = McsReport::from_oracle(vec![], vec![vec![]]);
        let none = McsReport::from_oracle(vec![], vec![]);
        for f in [Format::Json, Format::Csv, Format::Text] {
            assert_eq!(
                parse_family(&with_empty.render(f)).unwrap(),
                with_empty.family()
            );
        }
        let d = diff_families(&with_empty.family(), &none.family());
        assert_eq!(d.only_a, vec![BTreeSet::new()]);
        assert!(d.only_b.is_empty());
        assert_eq!(format_set(&d.only_a[0]), "{}");
    }

    #[test]
    fn text_uses_set_notation() {
        assert_eq!(
            sample().to_text(),
            "2 minimal cut sets (oracle brute-force)\n{A}\n{B, C}\n"
        );
    }

    #[test]
    fn timings_can_be_dropped() {
        let r = sample().without_timings();
        assert!(r.timings.is_none());
        assert!(r.rounds[0].seconds.is_none());
        assert!(!r.render(Format::Json).contains("seconds"));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_family("").is_err());
        assert!(parse_family("{ \"source\": 3 ").is_err());
        assert!(parse_family("size,iteration,events\n2,1,A\n").is_err());
        assert!(parse_family("hello").is_err());
    }
}
