//! Events, histories, protocols and ETL frames.
//!
//! A [`Frame`] is a forest of event-labelled trees (the protocol) together
//! with a directed accessibility relation over its histories. Histories are
//! numbered in canonical order: by tree (roots sorted by name), then
//! lexicographically by event sequence, so the root of each tree comes first
//! and every prefix precedes its extensions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bits::{self, HistorySet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("invalid name `{0}`: names must be non-empty and may not contain whitespace, `.` or `:`")]
    InvalidName(String),
    #[error("duplicate root `{0}`")]
    DuplicateRoot(String),
    #[error("a frame needs at least one tree")]
    EmptyProtocol,
    #[error("history `{history}` in tree `{root}` is listed but its prefix is not")]
    NotPrefixClosed { root: String, history: String },
    #[error("history `{history}` listed twice in tree `{root}`")]
    DuplicateHistory { root: String, history: String },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown history `{0}`")]
    UnknownHistory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EventId(u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        EventId(index as u32)
    }
}

/// Handle for a history of one frame. Ordering is the canonical history order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HistoryId(u32);

impl HistoryId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        HistoryId(index as u32)
    }
}

fn check_name(name: &str) -> Result<(), FrameError> {
    if name.is_empty() || name == "ε" || name.chars().any(|c| c.is_whitespace() || c == '.' || c == ':') {
        Err(FrameError::InvalidName(name.to_string()))
    } else {
        Ok(())
    }
}

/// The event alphabet `E`, in the order that defines [`EventId`]s.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, FrameError> {
        let mut out = Vec::new();
        for name in names {
            let name = name.as_ref();
            check_name(name)?;
            if out.iter().any(|n: &String| n == name) {
                return Err(FrameError::DuplicateEvent(name.to_string()));
            }
            out.push(name.to_string());
        }
        Ok(Alphabet { names: out })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, e: EventId) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<EventId> {
        self.names.iter().position(|n| n == name).map(EventId::from_index)
    }

    pub fn ids(&self) -> impl Iterator<Item = EventId> + Clone {
        (0..self.names.len()).map(EventId::from_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct HistoryNode {
    tree: usize,
    events: Vec<EventId>,
    parent: Option<HistoryId>,
    children: Vec<Option<HistoryId>>,
    /// Root first, ending with the history itself.
    prefixes: Vec<HistoryId>,
}

/// The temporal part of a frame: alphabet plus a forest of prefix-closed trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    alphabet: Alphabet,
    root_names: Vec<String>,
    nodes: Vec<HistoryNode>,
    roots: Vec<HistoryId>,
    words: usize,
    succ: Vec<u64>,
    desc: Vec<u64>,
    prefix_rows: Vec<u64>,
    root_row: Vec<u64>,
}

impl Protocol {
    /// Builds a protocol from trees given as `(root name, event sequences)`.
    /// The root's empty sequence is implicit. Trees are sorted by root name and
    /// the alphabet is sorted by event name, so equal inputs in any order give
    /// equal protocols.
    pub fn new(events: &[String], trees: Vec<(String, Vec<Vec<String>>)>) -> Result<Self, FrameError> {
        let mut sorted_events = events.to_vec();
        sorted_events.sort();
        let alphabet = Alphabet::new(&sorted_events)?;
        if trees.is_empty() {
            return Err(FrameError::EmptyProtocol);
        }
        let mut resolved = Vec::with_capacity(trees.len());
        for (root, seqs) in trees {
            check_name(&root)?;
            let mut ids = Vec::with_capacity(seqs.len());
            for seq in seqs {
                let seq = seq
                    .iter()
                    .map(|n| alphabet.lookup(n).ok_or_else(|| FrameError::UnknownEvent(n.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                ids.push(seq);
            }
            resolved.push((root, ids));
        }
        resolved.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in resolved.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(FrameError::DuplicateRoot(pair[0].0.clone()));
            }
        }
        Self::from_event_ids(alphabet, resolved)
    }

    /// Same as [`Protocol::new`] for already-resolved event sequences. Used by
    /// the enumerator, whose roots and events are generated in sorted order.
    pub(crate) fn from_event_ids(
        alphabet: Alphabet,
        trees: Vec<(String, Vec<Vec<EventId>>)>,
    ) -> Result<Self, FrameError> {
        let mut root_names = Vec::with_capacity(trees.len());
        let mut entries: Vec<(usize, Vec<EventId>)> = Vec::new();
        for (tree, (root, mut seqs)) in trees.into_iter().enumerate() {
            seqs.sort();
            if let Some(dup) = seqs.windows(2).find(|w| w[0] == w[1]) {
                return Err(FrameError::DuplicateHistory {
                    root,
                    history: join_path(&alphabet, &dup[0]),
                });
            }
            if seqs.first().is_none_or(|s| !s.is_empty()) {
                seqs.insert(0, Vec::new());
            }
            root_names.push(root);
            entries.extend(seqs.into_iter().map(|s| (tree, s)));
        }
        entries.sort();
        let index: HashMap<(usize, &[EventId]), HistoryId> = entries
            .iter()
            .enumerate()
            .map(|(i, (t, s))| ((*t, s.as_slice()), HistoryId::from_index(i)))
            .collect();

        let mut nodes = Vec::with_capacity(entries.len());
        let mut roots = Vec::with_capacity(root_names.len());
        for (i, (tree, seq)) in entries.iter().enumerate() {
            let parent = match seq.split_last() {
                None => {
                    roots.push(HistoryId::from_index(i));
                    None
                }
                Some((_, init)) => match index.get(&(*tree, init)) {
                    Some(&p) => Some(p),
                    None => {
                        return Err(FrameError::NotPrefixClosed {
                            root: root_names[*tree].clone(),
                            history: join_path(&alphabet, seq),
                        })
                    }
                },
            };
            nodes.push(HistoryNode {
                tree: *tree,
                events: seq.clone(),
                parent,
                children: vec![None; alphabet.len()],
                prefixes: Vec::new(),
            });
        }
        for i in 0..nodes.len() {
            if let Some(p) = nodes[i].parent {
                let e = *nodes[i].events.last().expect("non-root has an event");
                nodes[p.index()].children[e.index()] = Some(HistoryId::from_index(i));
            }
            let mut prefixes = match nodes[i].parent {
                Some(p) => nodes[p.index()].prefixes.clone(),
                None => Vec::new(),
            };
            prefixes.push(HistoryId::from_index(i));
            nodes[i].prefixes = prefixes;
        }

        let n = nodes.len();
        let words = bits::words_for(n);
        let mut succ = vec![0u64; n * words];
        let mut desc = vec![0u64; n * words];
        let mut prefix_rows = vec![0u64; n * words];
        let mut root_row = vec![0u64; words];
        for (i, node) in nodes.iter().enumerate() {
            for c in node.children.iter().flatten() {
                bits::insert(&mut succ[i * words..(i + 1) * words], c.index());
            }
            for p in &node.prefixes {
                bits::insert(&mut prefix_rows[i * words..(i + 1) * words], p.index());
                bits::insert(&mut desc[p.index() * words..(p.index() + 1) * words], i);
            }
        }
        for r in &roots {
            bits::insert(&mut root_row, r.index());
        }
        Ok(Protocol {
            alphabet,
            root_names,
            nodes,
            roots,
            words,
            succ,
            desc,
            prefix_rows,
            root_row,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_names(&self) -> &[String] {
        &self.root_names
    }

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn succ_row(&self, h: HistoryId) -> &[u64] {
        &self.succ[h.index() * self.words..(h.index() + 1) * self.words]
    }

    #[inline]
    pub(crate) fn desc_row(&self, h: HistoryId) -> &[u64] {
        &self.desc[h.index() * self.words..(h.index() + 1) * self.words]
    }

    #[inline]
    pub(crate) fn prefix_row(&self, h: HistoryId) -> &[u64] {
        &self.prefix_rows[h.index() * self.words..(h.index() + 1) * self.words]
    }

    #[inline]
    pub(crate) fn root_row(&self) -> &[u64] {
        &self.root_row
    }
}

fn join_path(alphabet: &Alphabet, seq: &[EventId]) -> String {
    seq.iter().map(|&e| alphabet.name(e)).collect::<Vec<_>>().join(".")
}

/// Relation selector for [`Frame::image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    /// The accessibility relation `∼`.
    Access,
    /// One-step extension `⇝`.
    Leadsto,
    /// Reflexive-transitive closure `⇝*` (the extensions of a history).
    LeadstoStar,
}

/// An ETL frame or forest: protocol plus accessibility relation.
///
/// Frames are immutable; derived frames share the protocol.
#[derive(Clone)]
pub struct Frame {
    protocol: Arc<Protocol>,
    access: Vec<u64>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.protocol, &other.protocol) || *self.protocol == *other.protocol)
            && self.access == other.access
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("events", &self.protocol.alphabet.names)
            .field(
                "histories",
                &self
                    .histories()
                    .map(|h| self.display(h).to_string())
                    .collect::<Vec<_>>(),
            )
            .field(
                "access",
                &self
                    .access_pairs()
                    .map(|(a, b)| (self.display(a).to_string(), self.display(b).to_string()))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Frame {
    /// A frame with the given protocol and an empty relation.
    pub fn empty_relation(protocol: Arc<Protocol>) -> Self {
        let n = protocol.len();
        let words = protocol.words();
        Frame {
            protocol,
            access: vec![0; n * words],
        }
    }

    pub fn with_pairs(protocol: Arc<Protocol>, pairs: impl IntoIterator<Item = (HistoryId, HistoryId)>) -> Self {
        let mut frame = Self::empty_relation(protocol);
        for (a, b) in pairs {
            let w = frame.protocol.words();
            bits::insert(&mut frame.access[a.index() * w..(a.index() + 1) * w], b.index());
        }
        frame
    }

    /// Same protocol, different relation.
    pub fn with_relation(&self, pairs: impl IntoIterator<Item = (HistoryId, HistoryId)>) -> Self {
        Self::with_pairs(self.protocol.clone(), pairs)
    }

    pub(crate) fn from_rows(protocol: Arc<Protocol>, access: Vec<u64>) -> Self {
        debug_assert_eq!(access.len(), protocol.len() * protocol.words());
        Frame { protocol, access }
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [u64] {
        &mut self.access
    }

    pub(crate) fn rows(&self) -> &[u64] {
        &self.access
    }

    pub fn protocol(&self) -> &Arc<Protocol> {
        &self.protocol
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.protocol.alphabet
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + Clone {
        self.protocol.alphabet.ids()
    }

    pub fn event_name(&self, e: EventId) -> &str {
        self.protocol.alphabet.name(e)
    }

    /// Number of histories `|H|`.
    pub fn len(&self) -> usize {
        self.protocol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.protocol.is_empty()
    }

    pub fn histories(&self) -> impl DoubleEndedIterator<Item = HistoryId> + ExactSizeIterator + Clone {
        (0..self.len()).map(HistoryId::from_index)
    }

    pub fn tree_count(&self) -> usize {
        self.protocol.roots.len()
    }

    pub fn is_tree(&self) -> bool {
        self.tree_count() == 1
    }

    pub fn root_name(&self, tree: usize) -> &str {
        &self.protocol.root_names[tree]
    }

    /// Index of the tree containing `h`.
    pub fn tree_of(&self, h: HistoryId) -> usize {
        self.node(h).tree
    }

    pub fn root_of(&self, h: HistoryId) -> HistoryId {
        self.protocol.roots[self.node(h).tree]
    }

    pub fn is_root(&self, h: HistoryId) -> bool {
        self.node(h).parent.is_none()
    }

    pub fn history_events(&self, h: HistoryId) -> &[EventId] {
        &self.node(h).events
    }

    /// Length of the event sequence; roots have length 0.
    pub fn depth(&self, h: HistoryId) -> usize {
        self.node(h).events.len()
    }

    pub fn parent(&self, h: HistoryId) -> Option<HistoryId> {
        self.node(h).parent
    }

    /// All prefixes of `h`, root first, ending with `h`.
    pub fn prefixes(&self, h: HistoryId) -> &[HistoryId] {
        &self.node(h).prefixes
    }

    /// `he`, if it belongs to the protocol.
    pub fn extend(&self, h: HistoryId, e: EventId) -> Option<HistoryId> {
        self.node(h).children.get(e.index()).copied().flatten()
    }

    /// `h ⪯ h2`: same tree and the events of `h` are an initial segment of those of `h2`.
    pub fn is_prefix(&self, h: HistoryId, h2: HistoryId) -> bool {
        bits::contains(self.protocol.desc_row(h), h2.index())
    }

    pub fn accessible(&self, h: HistoryId, h2: HistoryId) -> bool {
        bits::contains(self.row(h), h2.index())
    }

    pub fn image(&self, h: HistoryId, rel: Rel) -> HistorySet {
        HistorySet::from_words(self.len(), self.rel_row(h, rel))
    }

    pub fn image_set(&self, hs: &HistorySet, rel: Rel) -> HistorySet {
        let mut out = self.empty_set();
        for h in hs.iter() {
            bits::union_into(out.words_mut(), self.rel_row(h, rel));
        }
        out
    }

    pub fn roots(&self) -> HistorySet {
        HistorySet::from_words(self.len(), self.protocol.root_row())
    }

    pub fn root_ids(&self) -> &[HistoryId] {
        &self.protocol.roots
    }

    pub fn empty_set(&self) -> HistorySet {
        HistorySet::empty(self.len())
    }

    pub fn full_set(&self) -> HistorySet {
        HistorySet::full(self.len())
    }

    pub fn access_pairs(&self) -> impl Iterator<Item = (HistoryId, HistoryId)> + '_ {
        self.histories()
            .flat_map(move |h| bits::ones(self.row(h)).map(move |j| (h, HistoryId::from_index(j))))
    }

    pub fn access_count(&self) -> usize {
        self.access.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Canonical reference as used in frame documents: `e1.e3` in a single
    /// tree, `root:e1.e3` in a forest; the root of a single tree is `""`.
    pub fn history_ref(&self, h: HistoryId) -> String {
        let path = join_path(self.alphabet(), self.history_events(h));
        if self.is_tree() {
            path
        } else {
            format!("{}:{}", self.root_name(self.tree_of(h)), path)
        }
    }

    /// Human-readable form; empty paths are shown as `ε`.
    pub fn display(&self, h: HistoryId) -> HistoryDisplay<'_> {
        HistoryDisplay { frame: self, h }
    }

    /// Resolves a document history reference (see [`Frame::history_ref`]).
    /// `ε` is accepted for the empty path.
    pub fn resolve(&self, reference: &str) -> Result<HistoryId, FrameError> {
        let unknown = || FrameError::UnknownHistory(reference.to_string());
        let (tree, path) = match reference.split_once(':') {
            Some((root, path)) => {
                let tree = self
                    .protocol
                    .root_names
                    .iter()
                    .position(|r| r == root)
                    .ok_or_else(unknown)?;
                (tree, path)
            }
            None if self.is_tree() => (0, reference),
            None => return Err(unknown()),
        };
        let mut h = self.protocol.roots[tree];
        if path.is_empty() || path == "ε" {
            return Ok(h);
        }
        for name in path.split('.') {
            let e = self.alphabet().lookup(name).ok_or_else(unknown)?;
            h = self.extend(h, e).ok_or_else(unknown)?;
        }
        Ok(h)
    }

    #[inline]
    fn node(&self, h: HistoryId) -> &HistoryNode {
        &self.protocol.nodes[h.index()]
    }

    #[inline]
    pub(crate) fn words(&self) -> usize {
        self.protocol.words
    }

    /// Row of `[h]_∼`.
    #[inline]
    pub(crate) fn row(&self, h: HistoryId) -> &[u64] {
        let w = self.protocol.words;
        &self.access[h.index() * w..(h.index() + 1) * w]
    }

    #[inline]
    pub(crate) fn rel_row(&self, h: HistoryId, rel: Rel) -> &[u64] {
        match rel {
            Rel::Access => self.row(h),
            Rel::Leadsto => self.protocol.succ_row(h),
            Rel::LeadstoStar => self.protocol.desc_row(h),
        }
    }
}

pub struct HistoryDisplay<'a> {
    frame: &'a Frame,
    h: HistoryId,
}

impl fmt::Display for HistoryDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frame = self.frame;
        let events = frame.history_events(self.h);
        if !frame.is_tree() {
            write!(f, "{}:", frame.root_name(frame.tree_of(self.h)))?;
        }
        if events.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&join_path(frame.alphabet(), events))
        }
    }
}

/// One tree of a [`FrameSpec`]: root name and dot-joined histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSpec {
    pub root: String,
    pub histories: Vec<String>,
}

/// Textual description of a frame, as read from a frame document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameSpec {
    pub events: Vec<String>,
    pub trees: Vec<TreeSpec>,
    pub access: Vec<(String, String)>,
    /// Add the converse of every listed pair.
    pub symmetric: bool,
}

fn split_path(path: &str) -> Vec<String> {
    if path.is_empty() || path == "ε" {
        Vec::new()
    } else {
        path.split('.').map(str::to_string).collect()
    }
}

/// Validates a frame description and builds the frame.
pub fn build_frame(spec: &FrameSpec) -> Result<Frame, FrameError> {
    let trees = spec
        .trees
        .iter()
        .map(|t| (t.root.clone(), t.histories.iter().map(|p| split_path(p)).collect()))
        .collect();
    let protocol = Arc::new(Protocol::new(&spec.events, trees)?);
    let mut frame = Frame::empty_relation(protocol);
    let mut pairs = Vec::with_capacity(spec.access.len() * 2);
    for (a, b) in &spec.access {
        let a = frame.resolve(a)?;
        let b = frame.resolve(b)?;
        pairs.push((a, b));
        if spec.symmetric {
            pairs.push((b, a));
        }
    }
    let w = frame.words();
    for (a, b) in pairs {
        bits::insert(&mut frame.access[a.index() * w..(a.index() + 1) * w], b.index());
    }
    Ok(frame)
}

impl Frame {
    /// The description that [`build_frame`] turns back into this frame.
    pub fn to_spec(&self) -> FrameSpec {
        let trees = (0..self.tree_count())
            .map(|t| TreeSpec {
                root: self.root_name(t).to_string(),
                histories: self
                    .histories()
                    .filter(|&h| self.tree_of(h) == t)
                    .map(|h| join_path(self.alphabet(), self.history_events(h)))
                    .collect(),
            })
            .collect();
        FrameSpec {
            events: self.alphabet().names().to_vec(),
            trees,
            access: self
                .access_pairs()
                .map(|(a, b)| (self.history_ref(a), self.history_ref(b)))
                .collect(),
            symmetric: false,
        }
    }
}
