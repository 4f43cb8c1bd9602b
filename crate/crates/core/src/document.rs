//! JSON documents for frames, valuations and history maps.
//!
//! A frame document has the keys `events`, `trees`, `access` and optionally
//! `symmetric` and `expect`; any other key is an error. The canonical writer
//! sorts everything, lists converses explicitly and never sets `symmetric`,
//! so `write(parse(write(f))) == write(f)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{build_frame, Frame, FrameError, FrameSpec, HistoryId, TreeSpec};
use crate::logic::Valuation;
use crate::HistorySet;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Invalid(String),
}

impl DocumentError {
    fn from_json(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; the position is kept separately
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub root: String,
    pub histories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub events: Vec<String>,
    pub trees: Vec<TreeDocument>,
    pub access: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub symmetric: bool,
    /// Expected property verdicts, keyed as in `etl check --prop`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, bool>,
}

impl FrameDocument {
    pub fn spec(&self) -> FrameSpec {
        FrameSpec {
            events: self.events.clone(),
            trees: self
                .trees
                .iter()
                .map(|t| TreeSpec {
                    root: t.root.clone(),
                    histories: t.histories.clone(),
                })
                .collect(),
            access: self.access.clone(),
            symmetric: self.symmetric,
        }
    }

    pub fn frame(&self) -> Result<Frame, FrameError> {
        build_frame(&self.spec())
    }

    /// Canonical document of `frame`.
    pub fn of(frame: &Frame) -> Self {
        let spec = frame.to_spec();
        FrameDocument {
            events: spec.events,
            trees: spec
                .trees
                .into_iter()
                .map(|t| TreeDocument {
                    root: t.root,
                    histories: t.histories,
                })
                .collect(),
            access: spec.access,
            symmetric: false,
            expect: BTreeMap::new(),
        }
    }
}

pub fn parse_frame_document(text: &str) -> Result<FrameDocument, DocumentError> {
    let doc: FrameDocument = serde_json::from_str(text).map_err(DocumentError::from_json)?;
    Ok(doc)
}

pub fn parse_frame(text: &str) -> Result<Frame, DocumentError> {
    Ok(parse_frame_document(text)?.frame()?)
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn list(items: &[String]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| quote(s)).collect();
    format!("[{}]", quoted.join(", "))
}

/// Canonical multi-line text: one key per line, one access pair per line.
pub fn write_document(doc: &FrameDocument) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"events\": {},", list(&doc.events));
    out.push_str("  \"trees\": [\n");
    for (i, t) in doc.trees.iter().enumerate() {
        let sep = if i + 1 < doc.trees.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"root\": {}, \"histories\": {}}}{sep}",
            quote(&t.root),
            list(&t.histories)
        );
    }
    out.push_str("  ],\n");
    let tail = doc.symmetric || !doc.expect.is_empty();
    if doc.access.is_empty() {
        let _ = writeln!(out, "  \"access\": []{}", if tail { "," } else { "" });
    } else {
        out.push_str("  \"access\": [\n");
        for (i, (a, b)) in doc.access.iter().enumerate() {
            let sep = if i + 1 < doc.access.len() { "," } else { "" };
            let _ = writeln!(out, "    [{}, {}]{sep}", quote(a), quote(b));
        }
        let _ = writeln!(out, "  ]{}", if tail { "," } else { "" });
    }
    if doc.symmetric {
        let _ = writeln!(
            out,
            "  \"symmetric\": true{}",
            if doc.expect.is_empty() { "" } else { "," }
        );
    }
    if !doc.expect.is_empty() {
        let entries: Vec<String> = doc.expect.iter().map(|(k, v)| format!("{}: {v}", quote(k))).collect();
        let _ = writeln!(out, "  \"expect\": {{{}}}", entries.join(", "));
    }
    out.push_str("}\n");
    out
}

pub fn write_frame(frame: &Frame) -> String {
    write_document(&FrameDocument::of(frame))
}

/// Single-line canonical JSON, for embedding in line-oriented reports.
pub fn frame_json_line(frame: &Frame) -> String {
    serde_json::to_string(&FrameDocument::of(frame)).expect("documents serialize")
}

/// `{"atom": [historyRef, ...], ...}` resolved against `frame`.
pub fn parse_valuation(text: &str, frame: &Frame) -> Result<Valuation, DocumentError> {
    let raw: BTreeMap<String, Vec<String>> = serde_json::from_str(text).map_err(DocumentError::from_json)?;
    let mut v = Valuation::new();
    for (atom, refs) in raw {
        let ids = refs.iter().map(|r| frame.resolve(r)).collect::<Result<Vec<_>, _>>()?;
        v.set(atom, HistorySet::from_ids(frame.len(), ids));
    }
    Ok(v)
}

pub fn write_valuation(v: &Valuation, frame: &Frame) -> String {
    let raw: BTreeMap<&str, Vec<String>> = v
        .iter()
        .map(|(p, s)| (p, s.iter().map(|h| frame.history_ref(h)).collect()))
        .collect();
    serde_json::to_string(&raw).expect("valuations serialize")
}

/// A map between the histories of two frames, by document reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub map: Vec<(String, String)>,
}

impl MorphismDocument {
    /// Resolves every pair. Sources missing from the map are reported by the
    /// morphism checker, not here.
    pub fn resolve(&self, source: &Frame, target: &Frame) -> Result<Vec<(HistoryId, HistoryId)>, DocumentError> {
        let mut out = Vec::with_capacity(self.map.len());
        for (a, b) in &self.map {
            out.push((source.resolve(a)?, target.resolve(b)?));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (a, _) in &out {
            if !seen.insert(*a) {
                return Err(DocumentError::Invalid(format!(
                    "history {} is mapped twice",
                    source.history_ref(*a)
                )));
            }
        }
        Ok(out)
    }

    pub fn write(&self) -> String {
        let mut out = String::from("{\n");
        if let Some(s) = &self.source {
            let _ = writeln!(out, "  \"source\": {},", quote(s));
        }
        if let Some(t) = &self.target {
            let _ = writeln!(out, "  \"target\": {},", quote(t));
        }
        out.push_str("  \"map\": [\n");
        for (i, (a, b)) in self.map.iter().enumerate() {
            let sep = if i + 1 < self.map.len() { "," } else { "" };
            let _ = writeln!(out, "    [{}, {}]{sep}", quote(a), quote(b));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

pub fn parse_morphism_document(text: &str) -> Result<MorphismDocument, DocumentError> {
    serde_json::from_str(text).map_err(DocumentError::from_json)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_round_trip_on_fixtures() {
        for fx in fixtures::all() {
            let f = fx.frame();
            let text = write_frame(&f);
            let g = parse_frame(&text).unwrap();
            assert_eq!(f, g, "{}", fx.name);
            assert_eq!(write_frame(&g), text);
            let line = frame_json_line(&f);
            assert!(!line.contains('\n'));
            assert_eq!(parse_frame(&line).unwrap(), f);
        }
    }

    #[test]
    fn canonical_text_shape() {
        let f = fixtures::fig3b();
        assert_eq!(
            write_frame(&f),
            "{\n  \"events\": [\"e1\", \"e2\", \"e3\"],\n  \"trees\": [\n    {\"root\": \"r\", \"histories\": [\"\", \"e1\", \"e2\", \"e3\"]}\n  ],\n  \"access\": [\n    [\"\", \"\"],\n    [\"e1\", \"e2\"],\n    [\"e2\", \"e3\"],\n    [\"e3\", \"e3\"]\n  ]\n}\n"
        );
    }

    #[test]
    fn expect_and_symmetric_survive() {
        let mut doc = FrameDocument::of(&fixtures::fig1a());
        doc.expect.insert("wspr".into(), false);
        doc.symmetric = true;
        let text = write_document(&doc);
        assert_eq!(parse_frame_document(&text).unwrap(), doc);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"events": [], "trees": [{"root": "r", "histories": [""]}], "access": [], "acess": []}"#;
        let err = parse_frame_document(text).unwrap_err();
        match err {
            DocumentError::Syntax { line, column, message } => {
                assert_eq!(line, 1);
                // column of the closing quote of the key
                assert_eq!(column, 81);
                assert!(message.contains("unknown field `acess`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_position() {
        let text = "{\n  \"events\": [\"e1\",,]\n}";
        match parse_frame_document(text).unwrap_err() {
            DocumentError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 19)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn valuation_round_trip() {
        let f = fixtures::fig1a();
        let v = parse_valuation(r#"{"p": ["e1.e3"], "q": ["", "ε"]}"#, &f).unwrap();
        assert_eq!(v.get("p").unwrap().len(), 1);
        assert_eq!(v.get("q").unwrap().len(), 1);
        assert_eq!(parse_valuation(&write_valuation(&v, &f), &f).unwrap(), v);
        assert!(parse_valuation(r#"{"p": ["e3"]}"#, &f).is_err());
    }

    #[test]
    fn morphism_document() {
        let m = &fixtures::morphisms()[0];
        let doc = MorphismDocument {
            source: Some(m.source.into()),
            target: Some(m.target.into()),
            map: m.map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        let back = parse_morphism_document(&doc.write()).unwrap();
        assert_eq!(back, doc);
        let pairs = back.resolve(&fixtures::fig4b(), &fixtures::fig4a()).unwrap();
        assert_eq!(pairs.len(), 4);
    }
}
