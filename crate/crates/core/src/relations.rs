//! Properties of the accessibility relation and its S5 closure.

use serde::Serialize;
use thiserror::Error;

use crate::bits;
use crate::frame::{Frame, HistoryId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

/// A counterexample to one relation property, in canonical history order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationWitness {
    /// `h ≁ h`.
    NotReflexive(HistoryId),
    /// `h ∼ h'` but `h' ≁ h`.
    NotSymmetric(HistoryId, HistoryId),
    /// `h ∼ h' ∼ h''` but `h ≁ h''`.
    NotTransitive(HistoryId, HistoryId, HistoryId),
    /// `h ∼ h'`, `h ∼ h''` but `h' ≁ h''`.
    NotEuclidean(HistoryId, HistoryId, HistoryId),
    /// `[h]_∼ = ∅`.
    NotSerial(HistoryId),
    /// `h ∼ h'` with different lengths.
    NotSynchronous(HistoryId, HistoryId),
}

impl RelationWitness {
    pub fn histories(&self) -> Vec<HistoryId> {
        match *self {
            RelationWitness::NotReflexive(a) | RelationWitness::NotSerial(a) => vec![a],
            RelationWitness::NotSymmetric(a, b) | RelationWitness::NotSynchronous(a, b) => vec![a, b],
            RelationWitness::NotTransitive(a, b, c) | RelationWitness::NotEuclidean(a, b, c) => vec![a, b, c],
        }
    }

    /// Checks the witness against the frame it was computed on.
    pub fn replays(&self, frame: &Frame) -> bool {
        let acc = |a, b| frame.accessible(a, b);
        match *self {
            RelationWitness::NotReflexive(a) => !acc(a, a),
            RelationWitness::NotSymmetric(a, b) => acc(a, b) && !acc(b, a),
            RelationWitness::NotTransitive(a, b, c) => acc(a, b) && acc(b, c) && !acc(a, c),
            RelationWitness::NotEuclidean(a, b, c) => acc(a, b) && acc(a, c) && !acc(b, c),
            RelationWitness::NotSerial(a) => frame.histories().all(|b| !acc(a, b)),
            RelationWitness::NotSynchronous(a, b) => acc(a, b) && frame.depth(a) != frame.depth(b),
        }
    }

    pub fn render(&self, frame: &Frame) -> String {
        let hs: Vec<String> = self.histories().iter().map(|&h| frame.display(h).to_string()).collect();
        format!("({})", hs.join(", "))
    }
}

/// Flags for the named relation properties; `None` witness iff the flag holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub reflexive: Option<RelationWitness>,
    pub symmetric: Option<RelationWitness>,
    pub transitive: Option<RelationWitness>,
    pub euclidean: Option<RelationWitness>,
    pub serial: Option<RelationWitness>,
    pub synchronous: Option<RelationWitness>,
}

impl RelationReport {
    pub fn is_reflexive(&self) -> bool {
        self.reflexive.is_none()
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric.is_none()
    }
    pub fn is_transitive(&self) -> bool {
        self.transitive.is_none()
    }
    pub fn is_euclidean(&self) -> bool {
        self.euclidean.is_none()
    }
    pub fn is_serial(&self) -> bool {
        self.serial.is_none()
    }
    pub fn is_synchronous(&self) -> bool {
        self.synchronous.is_none()
    }
}

pub fn relation_report(frame: &Frame) -> RelationReport {
    RelationReport {
        reflexive: reflexivity_witness(frame),
        symmetric: symmetry_witness(frame),
        transitive: transitivity_witness(frame),
        euclidean: euclideanness_witness(frame),
        serial: seriality_witness(frame),
        synchronous: synchronicity_witness(frame),
    }
}

pub fn reflexivity_witness(frame: &Frame) -> Option<RelationWitness> {
    frame
        .histories()
        .find(|&h| !frame.accessible(h, h))
        .map(RelationWitness::NotReflexive)
}

pub fn symmetry_witness(frame: &Frame) -> Option<RelationWitness> {
    frame
        .access_pairs()
        .find(|&(a, b)| !frame.accessible(b, a))
        .map(|(a, b)| RelationWitness::NotSymmetric(a, b))
}

pub fn transitivity_witness(frame: &Frame) -> Option<RelationWitness> {
    for h in frame.histories() {
        let row = frame.row(h);
        for mid in bits::ones(row) {
            let mid = HistoryId::from_index(mid);
            if let Some(far) = bits::first_difference(frame.row(mid), row) {
                return Some(RelationWitness::NotTransitive(h, mid, HistoryId::from_index(far)));
            }
        }
    }
    None
}

pub fn euclideanness_witness(frame: &Frame) -> Option<RelationWitness> {
    for h in frame.histories() {
        let row = frame.row(h);
        for a in bits::ones(row) {
            let a = HistoryId::from_index(a);
            if let Some(b) = bits::first_difference(row, frame.row(a)) {
                return Some(RelationWitness::NotEuclidean(h, a, HistoryId::from_index(b)));
            }
        }
    }
    None
}

pub fn seriality_witness(frame: &Frame) -> Option<RelationWitness> {
    frame
        .histories()
        .find(|&h| bits::is_empty(frame.row(h)))
        .map(RelationWitness::NotSerial)
}

pub fn synchronicity_witness(frame: &Frame) -> Option<RelationWitness> {
    frame
        .access_pairs()
        .find(|&(a, b)| frame.depth(a) != frame.depth(b))
        .map(|(a, b)| RelationWitness::NotSynchronous(a, b))
}

pub fn is_reflexive(frame: &Frame) -> bool {
    reflexivity_witness(frame).is_none()
}

pub fn is_symmetric(frame: &Frame) -> bool {
    symmetry_witness(frame).is_none()
}

pub fn is_transitive(frame: &Frame) -> bool {
    transitivity_witness(frame).is_none()
}

pub fn is_euclidean(frame: &Frame) -> bool {
    euclideanness_witness(frame).is_none()
}

pub fn is_serial(frame: &Frame) -> bool {
    seriality_witness(frame).is_none()
}

pub fn is_synchronous(frame: &Frame) -> bool {
    synchronicity_witness(frame).is_none()
}

/// Transitive and Euclidean (positive and negative introspection).
pub fn is_introspective(frame: &Frame) -> bool {
    is_transitive(frame) && is_euclidean(frame)
}

pub fn is_s5(frame: &Frame) -> bool {
    is_reflexive(frame) && is_symmetric(frame) && is_transitive(frame)
}

fn symmetric_reflexive_rows(frame: &Frame) -> Vec<u64> {
    let w = frame.words();
    let mut rows = frame.rows().to_vec();
    for (a, b) in frame.access_pairs() {
        bits::insert(&mut rows[b.index() * w..(b.index() + 1) * w], a.index());
    }
    for h in frame.histories() {
        bits::insert(&mut rows[h.index() * w..(h.index() + 1) * w], h.index());
    }
    rows
}

/// Relational composition `R ∘ R` joined with `R`; returns whether anything changed.
fn square_step(rows: &mut [u64], n: usize, w: usize) -> bool {
    let old = rows.to_vec();
    let mut changed = false;
    for i in 0..n {
        let mut acc: smallvec::SmallVec<[u64; 2]> = smallvec::SmallVec::from_slice(&old[i * w..(i + 1) * w]);
        for j in bits::ones(&old[i * w..(i + 1) * w]) {
            bits::union_into(&mut acc, &old[j * w..(j + 1) * w]);
        }
        if acc.as_slice() != &old[i * w..(i + 1) * w] {
            changed = true;
            rows[i * w..(i + 1) * w].copy_from_slice(&acc);
        }
    }
    changed
}

/// Least equivalence relation containing `∼`, on the same protocol.
pub fn s5_closure(frame: &Frame) -> Frame {
    let mut rows = symmetric_reflexive_rows(frame);
    while square_step(&mut rows, frame.len(), frame.words()) {}
    Frame::from_rows(frame.protocol().clone(), rows)
}

/// `[h]_∼ = ∅` and `h ⪯ h'` imply `[h']_∼ = ∅`.
pub fn persistent_insanity(frame: &Frame) -> bool {
    frame.histories().all(|h| {
        !bits::is_empty(frame.row(h))
            || bits::ones(frame.protocol().desc_row(h)).all(|d| bits::is_empty(frame.row(HistoryId::from_index(d))))
    })
}

/// For roots `ε, ε'` and `ε ⪯ h`: `ε' ∼ h` implies `ε' ∼ ε`.
pub fn initially_synchronous(frame: &Frame) -> bool {
    frame
        .root_ids()
        .iter()
        .all(|&r| bits::ones(frame.row(r)).all(|h| frame.accessible(r, frame.root_of(HistoryId::from_index(h)))))
}

/// Whether the symmetric-reflexive closure already is the S5 closure. Only
/// meaningful (and only claimed) for introspective frames.
pub fn closure_is_symmetric_reflexive_only(frame: &Frame) -> Result<bool, RelationError> {
    if !is_introspective(frame) {
        return Err(RelationError::PreconditionViolated("frame is not introspective"));
    }
    Ok(symmetric_reflexive_rows(frame) == s5_closure(frame).rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn h(i: usize) -> HistoryId {
        HistoryId::from_index(i)
    }

    #[test]
    fn fig1a_is_s5_not_synchronous() {
        let f = fixtures::fig1a();
        let r = relation_report(&f);
        assert!(r.is_reflexive() && r.is_symmetric() && r.is_transitive() && r.is_euclidean());
        assert!(!r.is_synchronous());
        assert!(is_s5(&f));
        let w = r.synchronous.unwrap();
        assert!(w.replays(&f));
    }

    #[test]
    fn fig3b_transitivity_witness() {
        let f = fixtures::fig3b();
        let r = relation_report(&f);
        let w = r.transitive.unwrap();
        assert_eq!(w.render(&f), "(e1, e2, e3)");
        assert!(w.replays(&f));
    }

    #[test]
    fn empty_relation_is_vacuously_closed() {
        let f = fixtures::fig1a().with_relation([]);
        let r = relation_report(&f);
        assert!(r.is_symmetric() && r.is_transitive() && r.is_euclidean());
        assert_eq!(r.reflexive, Some(RelationWitness::NotReflexive(h(0))));
        assert!(r.is_synchronous());
        assert!(persistent_insanity(&f));
    }

    #[test]
    fn s5_and_introspection_examples() {
        assert!(is_introspective(&fixtures::fig4a()));
        assert!(!is_introspective(&fixtures::fig3c()));
        assert!(!is_euclidean(&fixtures::fig3c()));
        assert!(!is_s5(&fixtures::fig3a()));
        let f = fixtures::fig3a();
        let identity = f.with_relation(f.histories().map(|x| (x, x)));
        assert!(is_introspective(&identity));
        let full = f.with_relation(f.histories().flat_map(|a| f.histories().map(move |b| (a, b))));
        assert!(is_s5(&full));
    }

    #[test]
    fn closure_examples() {
        let f = fixtures::fig3b();
        let empty = f.with_relation([]);
        assert_eq!(s5_closure(&empty), f.with_relation(f.histories().map(|x| (x, x))));

        // brute force: classes {ε} and {e1, e2, e3}
        let closed = s5_closure(&f);
        let class = [h(1), h(2), h(3)];
        let expected = f.with_relation(
            std::iter::once((h(0), h(0))).chain(class.iter().flat_map(|&a| class.iter().map(move |&b| (a, b)))),
        );
        assert_eq!(closed, expected);
        let s5 = fixtures::fig1a();
        assert_eq!(s5_closure(&s5), s5);
    }

    #[test]
    fn persistent_insanity_examples() {
        let f = fixtures::fig3a_pruned();
        assert!(!persistent_insanity(&f));
        assert!(persistent_insanity(&fixtures::fig1a()));
        let single = crate::frame::build_frame(&crate::frame::FrameSpec {
            events: vec!["e1".into()],
            trees: vec![crate::frame::TreeSpec {
                root: "r".into(),
                histories: vec![],
            }],
            ..Default::default()
        })
        .unwrap();
        assert!(persistent_insanity(&single));
    }

    #[test]
    fn initial_synchronicity_examples() {
        assert!(!initially_synchronous(&fixtures::fig4a()));
        assert!(initially_synchronous(&fixtures::fig4b()));
        assert!(initially_synchronous(&fixtures::fig1a()));
        let f = fixtures::fig3c();
        assert!(initially_synchronous(&f));
    }

    #[test]
    fn closure_shortcut_guard() {
        assert!(closure_is_symmetric_reflexive_only(&fixtures::fig3b()).is_err());
        let f = fixtures::fig3b();
        let identity = f.with_relation(f.histories().map(|x| (x, x)));
        assert_eq!(closure_is_symmetric_reflexive_only(&identity), Ok(true));
        assert_eq!(closure_is_symmetric_reflexive_only(&fixtures::fig4a()), Ok(true));
    }

    #[test]
    fn closure_shortcut_fails_through_a_shared_target() {
        // e1 and e1.e1 both see only ε; transitivity through ε joins them
        let f = crate::frame::build_frame(&crate::frame::FrameSpec {
            events: vec!["e1".into()],
            trees: vec![crate::frame::TreeSpec {
                root: "r".into(),
                histories: vec!["".into(), "e1".into(), "e1.e1".into()],
            }],
            access: vec![
                ("".into(), "".into()),
                ("e1".into(), "".into()),
                ("e1.e1".into(), "".into()),
            ],
            symmetric: false,
        })
        .unwrap();
        assert!(is_introspective(&f));
        assert!(crate::recall::has_pr_combined(&f).holds);
        assert_eq!(closure_is_symmetric_reflexive_only(&f), Ok(false));
        assert!(s5_closure(&f).accessible(h(1), h(2)));
    }
}
