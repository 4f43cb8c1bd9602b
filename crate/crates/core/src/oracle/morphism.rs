use std::fmt;

use thiserror::Error;

use crate::fixtures;
use crate::frame::{EventId, Frame, HistoryId};
use crate::recall;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("map is not total: source history {0} has no image")]
    NonTotalMap(String),
    #[error("source history {0} is mapped twice")]
    DuplicateSource(String),
    #[error("history index out of range")]
    OutOfRange,
    #[error("source and target alphabets differ")]
    AlphabetMismatch,
    #[error("composed maps do not meet: first target is not second source")]
    NotComposable,
}

/// A total map between the histories of two frames over the same alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedMorphism {
    source: Frame,
    target: Frame,
    map: Vec<HistoryId>,
}

impl BoundedMorphism {
    pub fn new(source: Frame, target: Frame, pairs: &[(HistoryId, HistoryId)]) -> Result<Self, MorphismError> {
        if source.alphabet().names() != target.alphabet().names() {
            return Err(MorphismError::AlphabetMismatch);
        }
        let mut map: Vec<Option<HistoryId>> = vec![None; source.len()];
        for &(a, b) in pairs {
            if a.index() >= source.len() || b.index() >= target.len() {
                return Err(MorphismError::OutOfRange);
            }
            if map[a.index()].replace(b).is_some() {
                return Err(MorphismError::DuplicateSource(source.history_ref(a)));
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| MorphismError::NonTotalMap(source.history_ref(HistoryId::from_index(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BoundedMorphism { source, target, map })
    }

    pub fn identity(frame: &Frame) -> Self {
        BoundedMorphism {
            source: frame.clone(),
            target: frame.clone(),
            map: frame.histories().collect(),
        }
    }

    pub fn source(&self) -> &Frame {
        &self.source
    }

    pub fn target(&self) -> &Frame {
        &self.target
    }

    pub fn apply(&self, h: HistoryId) -> HistoryId {
        self.map[h.index()]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &BoundedMorphism) -> Result<BoundedMorphism, MorphismError> {
        if self.target != other.source {
            return Err(MorphismError::NotComposable);
        }
        Ok(BoundedMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&h| other.apply(h)).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismRelation {
    Access,
    Step(EventId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    /// `h R h2` in the source but `m(h) R m(h2)` fails in the target.
    Forth {
        relation: MorphismRelation,
        h: HistoryId,
        h2: HistoryId,
    },
    /// `m(h) R t` in the target, but no `h R h2` has `m(h2) = t`.
    Back {
        relation: MorphismRelation,
        h: HistoryId,
        t: HistoryId,
    },
}

impl MorphismViolation {
    pub fn render(&self, m: &BoundedMorphism) -> String {
        let rel = |r: &MorphismRelation| match r {
            MorphismRelation::Access => "~".to_string(),
            MorphismRelation::Step(e) => format!("leadsto[{}]", m.source.event_name(*e)),
        };
        let s = |h: HistoryId| m.source.history_ref(h);
        let t = |h: HistoryId| m.target.history_ref(h);
        match self {
            MorphismViolation::Forth { relation, h, h2 } => format!(
                "forth {} source ({:?}, {:?}) target ({:?}, {:?})",
                rel(relation),
                s(*h),
                s(*h2),
                t(m.apply(*h)),
                t(m.apply(*h2))
            ),
            MorphismViolation::Back { relation, h, t: target } => format!(
                "back {} source {:?} target ({:?}, {:?})",
                rel(relation),
                s(*h),
                t(m.apply(*h)),
                t(*target)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismCheck {
    pub valid: bool,
    pub violation: Option<MorphismViolation>,
}

/// Forth and back conditions for `∼` and for each `⇝_e`, checked in that
/// order; the first failure is reported.
pub fn check_bounded_morphism(m: &BoundedMorphism) -> MorphismCheck {
    let violation = first_violation(m);
    MorphismCheck {
        valid: violation.is_none(),
        violation,
    }
}

fn first_violation(m: &BoundedMorphism) -> Option<MorphismViolation> {
    let (src, tgt) = (&m.source, &m.target);
    let access = MorphismRelation::Access;
    for h in src.histories() {
        for h2 in src.histories().filter(|&h2| src.accessible(h, h2)) {
            if !tgt.accessible(m.apply(h), m.apply(h2)) {
                return Some(MorphismViolation::Forth {
                    relation: access,
                    h,
                    h2,
                });
            }
        }
        for t in tgt.histories().filter(|&t| tgt.accessible(m.apply(h), t)) {
            if !src.histories().any(|h2| src.accessible(h, h2) && m.apply(h2) == t) {
                return Some(MorphismViolation::Back { relation: access, h, t });
            }
        }
    }
    for e in src.events() {
        let relation = MorphismRelation::Step(e);
        for h in src.histories() {
            match (src.extend(h, e), tgt.extend(m.apply(h), e)) {
                (Some(he), Some(t)) if m.apply(he) == t => {}
                (Some(he), _) => return Some(MorphismViolation::Forth { relation, h, h2: he }),
                (None, Some(t)) => return Some(MorphismViolation::Back { relation, h, t }),
                (None, None) => {}
            }
        }
    }
    None
}

/// The three facts that together show PR is not closed under bounded
/// morphic images: the source has PR, the target lacks it, and the map is a
/// bounded morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondefinabilityReport {
    pub source: String,
    pub target: String,
    pub source_has_pr: bool,
    pub target_has_pr: bool,
    pub morphism_valid: bool,
    pub morphism_violation: Option<String>,
}

impl NondefinabilityReport {
    /// All three facts hold at once.
    pub fn is_witness(&self) -> bool {
        self.source_has_pr && !self.target_has_pr && self.morphism_valid
    }
}

impl fmt::Display for NondefinabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source {}", self.source)?;
        writeln!(f, "target {}", self.target)?;
        writeln!(f, "source_has_pr {}", self.source_has_pr)?;
        writeln!(f, "target_has_pr {}", self.target_has_pr)?;
        writeln!(f, "morphism_valid {}", self.morphism_valid)?;
        if let Some(v) = &self.morphism_violation {
            writeln!(f, "morphism_violation {v}")?;
        }
        writeln!(f, "witness {}", self.is_witness())
    }
}

pub fn nondefinability_report(source_name: &str, target_name: &str, m: &BoundedMorphism) -> NondefinabilityReport {
    let check = check_bounded_morphism(m);
    NondefinabilityReport {
        source: source_name.to_string(),
        target: target_name.to_string(),
        source_has_pr: recall::has_pr_combined(m.source()).holds,
        target_has_pr: recall::has_pr_combined(m.target()).holds,
        morphism_valid: check.valid,
        morphism_violation: check.violation.map(|v| v.render(m)),
    }
}

/// The shipped morphism fixture as a [`BoundedMorphism`].
pub fn fixture_morphism(name: &str) -> Option<BoundedMorphism> {
    let mf = fixtures::morphisms().into_iter().find(|m| m.name == name)?;
    let source = fixtures::find(mf.source)?.frame();
    let target = fixtures::find(mf.target)?.frame();
    let pairs: Vec<(HistoryId, HistoryId)> = mf
        .map
        .iter()
        .map(|(a, b)| {
            (
                source.resolve(a).expect("fixture ref"),
                target.resolve(b).expect("fixture ref"),
            )
        })
        .collect();
    Some(BoundedMorphism::new(source, target, &pairs).expect("fixture map is total"))
}

/// Report for the forest pair whose morphism carries PR onto a frame without it.
pub fn nondefinability_witness() -> NondefinabilityReport {
    let m = fixture_morphism("fig4-morphism").expect("shipped fixture");
    nondefinability_report("fig4b", "fig4a", &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(f: &Frame, r: &str) -> HistoryId {
        f.resolve(r).unwrap()
    }

    #[test]
    fn fixture_map_is_bounded() {
        let m = fixture_morphism("fig4-morphism").unwrap();
        assert_eq!(
            check_bounded_morphism(&m),
            MorphismCheck {
                valid: true,
                violation: None
            }
        );
        let r = nondefinability_witness();
        assert!(r.source_has_pr && !r.target_has_pr && r.morphism_valid && r.is_witness());
    }

    #[test]
    fn identity_is_bounded_and_no_witness() {
        for fx in fixtures::all() {
            let m = BoundedMorphism::identity(&fx.frame());
            assert!(check_bounded_morphism(&m).valid, "{}", fx.name);
        }
        let f = fixtures::fig4b();
        let r = nondefinability_report("fig4b", "fig4b", &BoundedMorphism::identity(&f));
        assert!(r.source_has_pr && r.target_has_pr && r.morphism_valid);
        assert!(!r.is_witness());
    }

    #[test]
    fn redirecting_to_a_root_breaks_forth() {
        let (s, t) = (fixtures::fig4b(), fixtures::fig4a());
        let pairs = [
            (h(&s, "r1':"), h(&t, "r1:")),
            (h(&s, "r1':e1"), h(&t, "r1:e1")),
            (h(&s, "r2':"), h(&t, "r2:")),
            (h(&s, "r3':"), h(&t, "r1:")),
        ];
        let m = BoundedMorphism::new(s.clone(), t.clone(), &pairs).unwrap();
        let check = check_bounded_morphism(&m);
        assert!(!check.valid);
        assert_eq!(
            check.violation,
            Some(MorphismViolation::Forth {
                relation: MorphismRelation::Access,
                h: h(&s, "r2':"),
                h2: h(&s, "r3':"),
            })
        );
    }

    #[test]
    fn step_relations_are_checked() {
        // collapse the e1 child onto its root: forth fails on leadsto[e1]
        let f = fixtures::fig1a().with_relation([]);
        let root = h(&f, "");
        let pairs: Vec<_> = f.histories().map(|x| (x, root)).collect();
        let m = BoundedMorphism::new(f.clone(), f.clone(), &pairs).unwrap();
        let v = check_bounded_morphism(&m).violation.unwrap();
        assert!(matches!(
            v,
            MorphismViolation::Forth {
                relation: MorphismRelation::Step(_),
                ..
            }
        ));
    }

    #[test]
    fn map_errors() {
        let (s, t) = (fixtures::fig4b(), fixtures::fig4a());
        let partial = [(h(&s, "r1':"), h(&t, "r1:"))];
        assert!(matches!(
            BoundedMorphism::new(s.clone(), t.clone(), &partial),
            Err(MorphismError::NonTotalMap(_))
        ));
        assert_eq!(
            BoundedMorphism::new(s, fixtures::fig1a(), &[]),
            Err(MorphismError::AlphabetMismatch)
        );
    }

    #[test]
    fn composition() {
        let m = fixture_morphism("fig4-morphism").unwrap();
        let id_s = BoundedMorphism::identity(m.source());
        let id_t = BoundedMorphism::identity(m.target());
        let c = id_s.then(&m).unwrap().then(&id_t).unwrap();
        assert!(check_bounded_morphism(&c).valid);
        assert_eq!(c, m);
        assert_eq!(m.then(&id_s), Err(MorphismError::NotComposable));
    }
}
