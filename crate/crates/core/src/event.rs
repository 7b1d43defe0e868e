//! The append-only event log and its line-delimited text form.
//!
//! One record per line, tab-separated, fields in fixed order:
//!
//! ```text
//! <seq>\t<time>\t<kind>\t<subjects>\t<details>\n
//! ```
//!
//! `time` has exactly nine decimals. `subjects` is a comma-separated list and
//! `details` a `;`-separated list of `key=value` pairs in key order; an empty
//! list is written as `-`. Reserved characters inside elements are
//! percent-escaped.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::str::FromStr;

use crate::iq::ArcCategory;
use crate::reflex::{ArcExecutionTrace, Outcome, Stage};
use crate::time::SimTime;

/// Detail keys written by the kernel.
pub mod keys {
    pub const MSG: &str = "msg";
    pub const CHANNEL: &str = "channel";
    pub const REASON: &str = "reason";
    pub const TRANSIT: &str = "transit";
    pub const PAYLOAD: &str = "payload";
    pub const BODY: &str = "body";
    pub const STAGE: &str = "stage";
    pub const OUTCOME: &str = "outcome";
    pub const CATEGORY: &str = "category";
    pub const REACTION: &str = "reaction";
    pub const PROCESSING: &str = "processing";
    pub const INTENSITY: &str = "intensity";
    pub const THRESHOLD: &str = "threshold";
    pub const DECISION: &str = "decision";
    pub const ACTION: &str = "action";
    pub const ARC: &str = "arc";
    pub const START: &str = "start";
    pub const END: &str = "end";
}

/// Channel name recorded for Big SNS posts.
pub const SNS_CHANNEL: &str = "sns";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    MessageSent,
    MessageDelivered,
    MessageDropped,
    StageTransition,
    FailureInjected,
    FailureCleared,
    ActuationDone,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::MessageSent,
        EventKind::MessageDelivered,
        EventKind::MessageDropped,
        EventKind::StageTransition,
        EventKind::FailureInjected,
        EventKind::FailureCleared,
        EventKind::ActuationDone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::MessageSent => "MessageSent",
            EventKind::MessageDelivered => "MessageDelivered",
            EventKind::MessageDropped => "MessageDropped",
            EventKind::StageTransition => "StageTransition",
            EventKind::FailureInjected => "FailureInjected",
            EventKind::FailureCleared => "FailureCleared",
            EventKind::ActuationDone => "ActuationDone",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        EventKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub seq: u64,
    pub time: SimTime,
    pub kind: EventKind,
    pub subjects: Vec<String>,
    pub details: BTreeMap<String, String>,
}

impl EventRecord {
    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details.get(key).map(String::as_str)
    }

    pub fn to_line(&self) -> String {
        let mut line = String::new();
        write!(line, "{}\t{}\t{}\t", self.seq, self.time, self.kind).unwrap();
        write_list(&mut line, self.subjects.iter().map(|s| (s.as_str(), None)), ',');
        line.push('\t');
        write_list(&mut line, self.details.iter().map(|(k, v)| (k.as_str(), Some(v.as_str()))), ';');
        line.push('\n');
        line
    }

    /// Parses one line without its trailing newline.
    pub fn parse_line(line: &str) -> Result<EventRecord, &'static str> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err("expected 5 tab-separated fields");
        }
        let seq = fields[0].parse::<u64>().map_err(|_| "bad seq")?;
        let time = fields[1].parse::<SimTime>().map_err(|_| "bad time")?;
        if fields[1].split_once('.').map(|(_, f)| f.len()) != Some(9) {
            return Err("time must carry nine decimals");
        }
        let kind = fields[2].parse::<EventKind>().map_err(|_| "unknown record kind")?;
        let subjects = split_list(fields[3], ',')?
            .into_iter()
            .map(|s| unescape(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut details = BTreeMap::new();
        for pair in split_list(fields[4], ';')? {
            let (k, v) = pair.split_once('=').ok_or("detail without '='")?;
            if details.insert(unescape(k)?, unescape(v)?).is_some() {
                return Err("duplicate detail key");
            }
        }
        Ok(EventRecord { seq, time, kind, subjects, details })
    }
}

fn write_list<'a>(out: &mut String, items: impl Iterator<Item = (&'a str, Option<&'a str>)>, sep: char) {
    let mut empty = true;
    for (i, (a, b)) in items.enumerate() {
        empty = false;
        if i > 0 {
            out.push(sep);
        }
        escape_into(out, a);
        if let Some(b) = b {
            out.push('=');
            escape_into(out, b);
        }
    }
    if empty {
        out.push('-');
    }
}

fn split_list(field: &str, sep: char) -> Result<Vec<&str>, &'static str> {
    if field == "-" {
        return Ok(Vec::new());
    }
    Ok(field.split(sep).collect())
}

fn escape_into(out: &mut String, s: &str) {
    if s == "-" {
        out.push_str("%2D");
        return;
    }
    for c in s.chars() {
        match c {
            '%' | '\t' | '\n' | '\r' | ',' | ';' | '=' => {
                write!(out, "%{:02X}", c as u32).unwrap();
            }
            _ => out.push(c),
        }
    }
}

fn unescape(s: &str) -> Result<String, &'static str> {
    let mut out = String::with_capacity(s.len());
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3).ok_or("truncated escape")?;
            let v = u8::from_str_radix(hex, 16).map_err(|_| "bad escape")?;
            out.push(v as char);
            i += 3;
        } else {
            let c = s[i..].chars().next().ok_or("bad utf-8")?;
            out.push(c);
            i += c.len_utf8();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("corrupt record at line {line}: {reason}")]
pub struct CorruptRecord {
    pub line: usize,
    pub reason: &'static str,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventLog {
    records: Vec<EventRecord>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record, assigning the next sequence number.
    pub fn append(
        &mut self,
        time: SimTime,
        kind: EventKind,
        subjects: Vec<String>,
        details: BTreeMap<String, String>,
    ) -> u64 {
        let seq = self.records.last().map_or(0, |r| r.seq + 1);
        debug_assert!(self.records.last().is_none_or(|r| r.time <= time));
        self.records.push(EventRecord { seq, time, kind, subjects, details });
        seq
    }

    /// Builds a log from records as-is. Used for reordered or filtered views;
    /// no ordering checks are applied.
    pub fn from_records(records: Vec<EventRecord>) -> Self {
        EventLog { records }
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<EventRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.records.iter().filter(|r| r.kind == kind).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line());
        }
        out
    }

    /// Parses the text form. Every record must end in a newline, so a
    /// truncated final line is reported as corrupt.
    pub fn parse_text(text: &str) -> Result<EventLog, CorruptRecord> {
        let mut records: Vec<EventRecord> = Vec::new();
        let mut rest = text;
        let mut line_no = 0;
        while !rest.is_empty() {
            line_no += 1;
            let Some((line, tail)) = rest.split_once('\n') else {
                return Err(CorruptRecord { line: line_no, reason: "missing line terminator" });
            };
            rest = tail;
            let rec = EventRecord::parse_line(line).map_err(|reason| CorruptRecord { line: line_no, reason })?;
            if let Some(prev) = records.last() {
                if rec.seq <= prev.seq {
                    return Err(CorruptRecord { line: line_no, reason: "seq not increasing" });
                }
                if rec.time < prev.time {
                    return Err(CorruptRecord { line: line_no, reason: "time decreases" });
                }
            }
            records.push(rec);
        }
        Ok(EventLog { records })
    }

    /// True when every sent message id has exactly one delivered-or-dropped
    /// record and nothing is resolved without having been sent.
    pub fn messages_balanced(&self) -> bool {
        let mut open: BTreeMap<&str, i64> = BTreeMap::new();
        for r in &self.records {
            let Some(msg) = r.detail(keys::MSG) else { continue };
            match r.kind {
                EventKind::MessageSent => *open.entry(msg).or_default() += 1,
                EventKind::MessageDelivered | EventKind::MessageDropped => *open.entry(msg).or_default() -= 1,
                _ => {}
            }
        }
        open.values().all(|&v| v == 0)
    }

    /// Stage-transition records of one firing, in log order. The terminal
    /// outcome record comes last.
    pub fn stage_records(&self, stimulus_id: &str) -> Vec<&EventRecord> {
        self.records
            .iter()
            .filter(|r| r.kind == EventKind::StageTransition && r.subjects.get(1).map(String::as_str) == Some(stimulus_id))
            .collect()
    }

    /// Reassembles one trace per firing from the stage-transition records.
    /// The result is sorted by stimulus id so it does not depend on record
    /// order.
    pub fn traces(&self) -> Vec<ArcExecutionTrace> {
        struct Partial {
            arc_id: String,
            category: String,
            stage_times: [Option<SimTime>; 5],
            outcome: Option<Outcome>,
        }
        let mut by_stimulus: BTreeMap<&str, Partial> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.kind == EventKind::StageTransition) {
            let (Some(arc), Some(stim)) = (r.subjects.first(), r.subjects.get(1)) else { continue };
            let p = by_stimulus.entry(stim.as_str()).or_insert_with(|| Partial {
                arc_id: arc.clone(),
                category: String::new(),
                stage_times: [None; 5],
                outcome: None,
            });
            if let Some(stage) = r.detail(keys::STAGE).and_then(|s| s.parse::<Stage>().ok()) {
                p.stage_times[stage.index()] = Some(r.time);
            }
            if let Some(outcome) = r.detail(keys::OUTCOME).and_then(|s| s.parse::<Outcome>().ok()) {
                p.outcome = Some(outcome);
                if let Some(cat) = r.detail(keys::CATEGORY) {
                    p.category = cat.to_string();
                }
            }
        }
        by_stimulus
            .into_iter()
            .filter_map(|(stim, p)| {
                Some(ArcExecutionTrace {
                    arc_id: p.arc_id,
                    stimulus_id: stim.to_string(),
                    category: ArcCategory::new(p.category),
                    stage_times: p.stage_times,
                    outcome: p.outcome?,
                })
            })
            .collect()
    }
}

impl fmt::Display for EventLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            f.write_str(&r.to_line())?;
        }
        Ok(())
    }
}

/// Small builder for detail maps.
#[derive(Default)]
pub(crate) struct Details(BTreeMap<String, String>);

impl Details {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn build(self) -> BTreeMap<String, String> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn rec(seq: u64, subjects: Vec<String>, details: BTreeMap<String, String>) -> EventRecord {
        EventRecord { seq, time: SimTime::from_ticks(1_500_000_000), kind: EventKind::MessageSent, subjects, details }
    }

    #[test]
    fn line_layout() {
        let r = rec(3, vec!["a".into(), "b".into()], Details::new().with("msg", "s1/afferent").with("channel", "net").build());
        assert_eq!(r.to_line(), "3\t1.500000000\tMessageSent\ta,b\tchannel=net;msg=s1/afferent\n");
        let empty = rec(0, vec![], BTreeMap::new());
        assert_eq!(empty.to_line(), "0\t1.500000000\tMessageSent\t-\t-\n");
    }

    #[test]
    fn truncated_last_line_is_corrupt() {
        let mut log = EventLog::new();
        log.append(SimTime::ZERO, EventKind::FailureInjected, vec!["center".into()], BTreeMap::new());
        log.append(SimTime::ZERO, EventKind::FailureCleared, vec!["center".into()], BTreeMap::new());
        let text = log.to_text();
        let cut = &text[..text.len() - 4];
        assert_eq!(EventLog::parse_text(cut).unwrap_err().line, 2);
        assert_eq!(EventLog::parse_text(&text).unwrap(), log);
    }

    #[test]
    fn out_of_order_seq_rejected() {
        let text = "1\t0.000000000\tMessageSent\t-\t-\n0\t0.000000000\tMessageSent\t-\t-\n";
        assert_eq!(EventLog::parse_text(text).unwrap_err().reason, "seq not increasing");
    }

    proptest! {
        #[test]
        fn line_round_trip(
            seq in any::<u64>(),
            ticks in any::<u64>(),
            subjects in proptest::collection::vec("[-a-z%,;=\\t é]{0,6}", 0..4),
            details in proptest::collection::btree_map("[a-z%=;,-]{0,5}", "[-a-z%=;,\\n ]{0,6}", 0..4),
        ) {
            let r = EventRecord { seq, time: SimTime::from_ticks(ticks), kind: EventKind::StageTransition, subjects, details };
            let line = r.to_line();
            let parsed = EventRecord::parse_line(line.strip_suffix('\n').unwrap()).unwrap();
            prop_assert_eq!(parsed, r);
        }
    }
}
