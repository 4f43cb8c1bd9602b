//! Perfect-recall conditions.
//!
//! Every checker walks the non-root histories `he` in canonical order and,
//! for each, the members of `[he]_∼` in canonical order, so the reported
//! witness is the least violation under that ordering.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::bits::{self, HistorySet};
use crate::frame::{EventId, Frame, HistoryId};

/// Sequence of information sets along the prefixes of a history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicExperience {
    pub raw: Vec<HistorySet>,
    pub compressed: Vec<HistorySet>,
}

impl EpistemicExperience {
    pub fn from_raw(raw: Vec<HistorySet>) -> Self {
        let compressed = raw.iter().cloned().dedup().collect();
        EpistemicExperience { raw, compressed }
    }
}

pub fn epistemic_experience(frame: &Frame, h: HistoryId) -> EpistemicExperience {
    EpistemicExperience::from_raw(
        frame
            .prefixes(h)
            .iter()
            .map(|&p| frame.image(p, crate::Rel::Access))
            .collect(),
    )
}

/// Equivalence modulo stuttering.
pub fn stutter_equivalent(a: &EpistemicExperience, b: &EpistemicExperience) -> bool {
    a.compressed == b.compressed
}

/// `EE(h) ≈ EE(h2)` computed on the relation rows directly.
pub(crate) fn same_experience(frame: &Frame, h: HistoryId, h2: HistoryId) -> bool {
    let rows = |x: HistoryId| frame.prefixes(x).iter().map(move |&p| frame.row(p)).dedup();
    rows(h).eq(rows(h2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RecallProperty {
    PrEe,
    PrHc,
    PrHcl,
    Spr,
    Wspr,
    Pr,
}

impl RecallProperty {
    pub fn name(self) -> &'static str {
        match self {
            RecallProperty::PrEe => "pr_ee",
            RecallProperty::PrHc => "pr_hc",
            RecallProperty::PrHcl => "pr_hcl",
            RecallProperty::Spr => "spr",
            RecallProperty::Wspr => "wspr",
            RecallProperty::Pr => "pr",
        }
    }
}

impl fmt::Display for RecallProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which root set the wsPR inclusion allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WsprVariant {
    /// Trees use `{ε}`, forests the set of all roots.
    #[default]
    Auto,
    /// Only the root of the tree containing `h`.
    Tree,
    /// Any root of the forest.
    Forest,
}

/// A violation of one perfect-recall condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecallWitness {
    /// `h ∼ other` but `EE(h) ≉ EE(other)`.
    Experience { h: HistoryId, other: HistoryId },
    /// `he ∼ other`, where `other` is not admitted by the condition. For
    /// PR_hc^l none of the three disjuncts holds.
    Step {
        h: HistoryId,
        event: EventId,
        he: HistoryId,
        other: HistoryId,
    },
    /// Both halves of the combined notion, whichever failed.
    Combined {
        experience: Option<Box<RecallWitness>>,
        local: Option<Box<RecallWitness>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecallVerdict {
    pub property: RecallProperty,
    pub holds: bool,
    pub witness: Option<RecallWitness>,
}

impl RecallVerdict {
    fn from_witness(property: RecallProperty, witness: Option<RecallWitness>) -> Self {
        RecallVerdict {
            property,
            holds: witness.is_none(),
            witness,
        }
    }
}

impl RecallWitness {
    /// Human-readable rendering against the frame the witness came from.
    pub fn render(&self, frame: &Frame, property: RecallProperty) -> String {
        let d = |h: HistoryId| frame.display(h).to_string();
        match self {
            RecallWitness::Experience { h, other } => format!("({}, {})", d(*h), d(*other)),
            RecallWitness::Step { h, event, he, other } => match property {
                RecallProperty::Wspr => {
                    let parent = frame.parent(*other).map(d).unwrap_or_else(|| "-".into());
                    format!("({}, {}, {}, {})", d(*he), d(*other), d(*h), parent)
                }
                _ => format!("({}, {}, {})", d(*h), frame.event_name(*event), d(*other)),
            },
            RecallWitness::Combined { experience, local } => {
                let mut parts = Vec::new();
                if let Some(w) = experience {
                    parts.push(format!("pr_ee {}", w.render(frame, RecallProperty::PrEe)));
                }
                if let Some(w) = local {
                    parts.push(format!("pr_hcl {}", w.render(frame, RecallProperty::PrHcl)));
                }
                parts.join("; ")
            }
        }
    }

    /// Re-evaluates the violated condition at the witness.
    pub fn replays(&self, frame: &Frame, property: RecallProperty) -> bool {
        match (self, property) {
            (RecallWitness::Experience { h, other }, RecallProperty::PrEe) => {
                frame.accessible(*h, *other)
                    && !stutter_equivalent(&epistemic_experience(frame, *h), &epistemic_experience(frame, *other))
            }
            (RecallWitness::Step { h, event, he, other }, p) => {
                frame.extend(*h, *event) == Some(*he)
                    && frame.accessible(*he, *other)
                    && !step_admits(frame, p, *h, *he, *other, WsprVariant::Auto)
            }
            (RecallWitness::Combined { experience, local }, RecallProperty::Pr) => {
                (experience.is_some() || local.is_some())
                    && experience
                        .as_ref()
                        .is_none_or(|w| w.replays(frame, RecallProperty::PrEe))
                    && local.as_ref().is_none_or(|w| w.replays(frame, RecallProperty::PrHcl))
            }
            _ => false,
        }
    }
}

/// Whether `other ∈ [he]_∼` is admitted by the step condition of `property`.
#[inline]
fn step_admits(
    frame: &Frame,
    property: RecallProperty,
    h: HistoryId,
    he: HistoryId,
    other: HistoryId,
    variant: WsprVariant,
) -> bool {
    let before = frame.row(h);
    match property {
        RecallProperty::PrHc => bits::intersects(before, frame.protocol().prefix_row(other)),
        RecallProperty::PrHcl => {
            bits::contains(before, other.index())
                || frame
                    .parent(other)
                    .is_some_and(|p| bits::contains(before, p.index()) || bits::contains(frame.row(he), p.index()))
        }
        RecallProperty::Spr => frame.parent(other).is_some_and(|p| bits::contains(before, p.index())),
        RecallProperty::Wspr => {
            let forest = match variant {
                WsprVariant::Auto => !frame.is_tree(),
                WsprVariant::Tree => false,
                WsprVariant::Forest => true,
            };
            match frame.parent(other) {
                Some(p) => bits::contains(before, p.index()),
                None => forest || other == frame.root_of(h),
            }
        }
        RecallProperty::PrEe | RecallProperty::Pr => unreachable!("not a step condition"),
    }
}

fn first_step_violation(frame: &Frame, property: RecallProperty, variant: WsprVariant) -> Option<RecallWitness> {
    for he in frame.histories() {
        let Some(h) = frame.parent(he) else { continue };
        for other in bits::ones(frame.row(he)) {
            let other = HistoryId::from_index(other);
            if !step_admits(frame, property, h, he, other, variant) {
                let event = *frame.history_events(he).last().expect("non-root");
                return Some(RecallWitness::Step { h, event, he, other });
            }
        }
    }
    None
}

/// Accessible histories have stutter-equivalent epistemic experiences.
pub fn has_pr_ee(frame: &Frame) -> RecallVerdict {
    let witness = frame
        .access_pairs()
        .find(|&(h, other)| !same_experience(frame, h, other))
        .map(|(h, other)| RecallWitness::Experience { h, other });
    RecallVerdict::from_witness(RecallProperty::PrEe, witness)
}

/// `he ∼ h'` implies `h ∼ h'' ⪯ h'` for some `h''`.
pub fn has_pr_hc(frame: &Frame) -> RecallVerdict {
    RecallVerdict::from_witness(
        RecallProperty::PrHc,
        first_step_violation(frame, RecallProperty::PrHc, WsprVariant::Auto),
    )
}

/// Set form of PR_hc: `[he]_∼ ⊆ [[h]_∼]_{⇝*}` for all `h, e`.
pub fn pr_hc_by_inclusion(frame: &Frame) -> bool {
    frame.histories().all(|h| {
        let reach = frame.image_set(&frame.image(h, crate::Rel::Access), crate::Rel::LeadstoStar);
        frame
            .events()
            .filter_map(|e| frame.extend(h, e))
            .all(|he| frame.image(he, crate::Rel::Access).is_subset(&reach))
    })
}

/// `he ∼ h'` implies `h ∼ h'`, or `h ∼ h'' ⇝ h'`, or `he ∼ h'' ⇝ h'`.
pub fn has_pr_hcl(frame: &Frame) -> RecallVerdict {
    RecallVerdict::from_witness(
        RecallProperty::PrHcl,
        first_step_violation(frame, RecallProperty::PrHcl, WsprVariant::Auto),
    )
}

/// Set form of PR_hc^l: `[he]_∼ ⊆ [h]_∼ ∪ [[h]_∼]_⇝ ∪ [[he]_∼]_⇝`.
pub fn pr_hcl_by_inclusion(frame: &Frame) -> bool {
    use crate::Rel::{Access, Leadsto};
    frame.histories().all(|h| {
        let before = frame.image(h, Access);
        frame.events().filter_map(|e| frame.extend(h, e)).all(|he| {
            let after = frame.image(he, Access);
            let allowed = before
                .union(&frame.image_set(&before, Leadsto))
                .union(&frame.image_set(&after, Leadsto));
            after.is_subset(&allowed)
        })
    })
}

/// `[he]_∼ ⊆ [[h]_∼]_⇝`.
pub fn has_spr(frame: &Frame) -> RecallVerdict {
    RecallVerdict::from_witness(
        RecallProperty::Spr,
        first_step_violation(frame, RecallProperty::Spr, WsprVariant::Auto),
    )
}

/// `[he]_∼ ⊆ [[h]_∼]_⇝ ∪ roots`, with the root set chosen by frame shape.
pub fn has_wspr(frame: &Frame) -> RecallVerdict {
    has_wspr_variant(frame, WsprVariant::Auto)
}

pub fn has_wspr_variant(frame: &Frame, variant: WsprVariant) -> RecallVerdict {
    RecallVerdict::from_witness(
        RecallProperty::Wspr,
        first_step_violation(frame, RecallProperty::Wspr, variant),
    )
}

/// PR_ee together with PR_hc^l. Both witnesses are reported when both fail.
pub fn has_pr_combined(frame: &Frame) -> RecallVerdict {
    let ee = has_pr_ee(frame).witness.map(Box::new);
    let hcl = has_pr_hcl(frame).witness.map(Box::new);
    let witness = (ee.is_some() || hcl.is_some()).then_some(RecallWitness::Combined {
        experience: ee,
        local: hcl,
    });
    RecallVerdict::from_witness(RecallProperty::Pr, witness)
}

pub fn check(frame: &Frame, property: RecallProperty) -> RecallVerdict {
    match property {
        RecallProperty::PrEe => has_pr_ee(frame),
        RecallProperty::PrHc => has_pr_hc(frame),
        RecallProperty::PrHcl => has_pr_hcl(frame),
        RecallProperty::Spr => has_spr(frame),
        RecallProperty::Wspr => has_wspr(frame),
        RecallProperty::Pr => has_pr_combined(frame),
    }
}

// Boolean fast paths for sweeps.

pub(crate) fn pr_ee(frame: &Frame) -> bool {
    frame.access_pairs().all(|(h, other)| same_experience(frame, h, other))
}

pub(crate) fn pr_hc(frame: &Frame) -> bool {
    first_step_violation(frame, RecallProperty::PrHc, WsprVariant::Auto).is_none()
}

pub(crate) fn pr_hcl(frame: &Frame) -> bool {
    first_step_violation(frame, RecallProperty::PrHcl, WsprVariant::Auto).is_none()
}

pub(crate) fn spr(frame: &Frame) -> bool {
    first_step_violation(frame, RecallProperty::Spr, WsprVariant::Auto).is_none()
}

pub(crate) fn wspr(frame: &Frame) -> bool {
    first_step_violation(frame, RecallProperty::Wspr, WsprVariant::Auto).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(f: &Frame, refs: &[&str]) -> HistorySet {
        HistorySet::from_ids(f.len(), refs.iter().map(|r| f.resolve(r).unwrap()))
    }

    #[test]
    fn experience_in_fig1a() {
        let f = fixtures::fig1a();
        let ee = epistemic_experience(&f, f.resolve("e1").unwrap());
        assert_eq!(ee.raw, vec![set(&f, &["", "e1"]), set(&f, &["", "e1"])]);
        assert_eq!(ee.compressed, vec![set(&f, &["", "e1"])]);
    }

    #[test]
    fn experience_in_fig3b() {
        let f = fixtures::fig3b();
        let ee = epistemic_experience(&f, f.resolve("e2").unwrap());
        assert_eq!(ee.raw, vec![set(&f, &[""]), set(&f, &["e3"])]);
        assert_eq!(ee.compressed, ee.raw);
        let e1 = epistemic_experience(&f, f.resolve("e1").unwrap());
        assert!(!stutter_equivalent(&e1, &ee));
    }

    #[test]
    fn empty_relation_experience_compresses() {
        let f = fixtures::fig1a().with_relation([]);
        let ee = epistemic_experience(&f, f.resolve("e2.e3").unwrap());
        assert_eq!(ee.raw.len(), 3);
        assert_eq!(ee.compressed, vec![f.empty_set()]);
    }

    #[test]
    fn stuttering() {
        let f = fixtures::fig1a();
        let s = set(&f, &[""]);
        let t = set(&f, &["e1"]);
        let a = EpistemicExperience::from_raw(vec![s.clone(), s.clone(), t.clone()]);
        let b = EpistemicExperience::from_raw(vec![s.clone(), t.clone(), t.clone()]);
        assert!(stutter_equivalent(&a, &b));
        let c = EpistemicExperience::from_raw(vec![s.clone(), t.clone()]);
        let d = EpistemicExperience::from_raw(vec![t, s]);
        assert!(!stutter_equivalent(&c, &d));
    }

    #[test]
    fn pr_ee_examples() {
        assert!(has_pr_ee(&fixtures::fig3a()).holds);
        let f = fixtures::fig3d();
        let v = has_pr_ee(&f);
        assert!(!v.holds);
        assert_eq!(v.witness.as_ref().unwrap().render(&f, v.property), "(e1, e2.e3)");
        assert!(v.witness.unwrap().replays(&f, RecallProperty::PrEe));
        assert!(has_pr_ee(&f.with_relation([])).holds);
    }

    #[test]
    fn pr_hc_examples() {
        let f = fixtures::fig3a();
        let v = has_pr_hc(&f);
        assert!(!v.holds);
        assert_eq!(v.witness.as_ref().unwrap().render(&f, v.property), "(e1, e3, e2.e3)");
        assert!(has_pr_hc(&fixtures::fig3d()).holds);
        assert!(has_pr_hc(&fixtures::fig1a()).holds);
    }

    #[test]
    fn pr_hcl_examples() {
        let f = fixtures::fig3d();
        let v = has_pr_hcl(&f);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.render(&f, RecallProperty::PrHcl), "(ε, e1, e2.e3)");
        assert!(w.replays(&f, RecallProperty::PrHcl));
        assert!(has_pr_hcl(&fixtures::fig3c()).holds);
        assert!(has_pr_hcl(&fixtures::fig4a()).holds);
    }

    #[test]
    fn spr_examples() {
        let f = fixtures::fig1a();
        let v = has_spr(&f);
        assert!(!v.holds);
        assert!(v.witness.unwrap().replays(&f, RecallProperty::Spr));
        assert!(has_spr(&f.with_relation([])).holds);
    }

    #[test]
    fn spr_on_levelwise_total_tree() {
        let f = crate::frame::build_frame(&crate::frame::FrameSpec {
            events: vec!["a".into(), "b".into()],
            trees: vec![crate::frame::TreeSpec {
                root: "r".into(),
                histories: ["", "a", "b", "a.a", "a.b", "b.a", "b.b"].map(String::from).to_vec(),
            }],
            ..Default::default()
        })
        .unwrap();
        let levelwise = f.with_relation(
            f.histories()
                .flat_map(|x| f.histories().map(move |y| (x, y)))
                .filter(|&(x, y)| f.depth(x) == f.depth(y))
                .collect::<Vec<_>>(),
        );
        assert!(has_spr(&levelwise).holds);
    }

    #[test]
    fn wspr_examples() {
        let f = fixtures::fig1a();
        let v = has_wspr(&f);
        assert!(!v.holds);
        assert_eq!(
            v.witness.unwrap().render(&f, RecallProperty::Wspr),
            "(e1.e3, e2.e3, e1, e2)"
        );
        let g = fixtures::fig1b();
        assert!(has_wspr(&g).holds);
        assert!(!has_wspr_variant(&g, WsprVariant::Tree).holds);
        assert!(has_wspr(&f.with_relation([])).holds);
    }

    #[test]
    fn combined_examples() {
        assert!(has_pr_combined(&fixtures::fig4b()).holds);
        let f = fixtures::fig4a();
        let v = has_pr_combined(&f);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(matches!(
            &w,
            RecallWitness::Combined {
                experience: Some(_),
                local: None
            }
        ));
        assert!(w.replays(&f, RecallProperty::Pr));
        assert!(has_pr_combined(&f.with_relation([])).holds);
        // both halves fail on fig3d
        let g = fixtures::fig3d();
        let w = has_pr_combined(&g).witness.unwrap();
        assert!(matches!(
            w,
            RecallWitness::Combined {
                experience: Some(_),
                local: Some(_)
            }
        ));
    }

    #[test]
    fn set_forms_agree_on_fixtures() {
        for fx in fixtures::all() {
            let f = fx.frame();
            assert_eq!(has_pr_hc(&f).holds, pr_hc_by_inclusion(&f), "{}", fx.name);
            assert_eq!(has_pr_hcl(&f).holds, pr_hcl_by_inclusion(&f), "{}", fx.name);
        }
    }
}
