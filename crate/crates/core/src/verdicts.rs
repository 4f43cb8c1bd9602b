//! Named frame properties with rendered witnesses, as listed by `etl check`.

use crate::frame::{Frame, HistoryId};
use crate::recall::{self, RecallProperty};
use crate::relations::{self, RelationWitness};

/// Table order of `etl check`; the relation flags follow the recall notions.
pub const PROPERTY_NAMES: &[&str] = &[
    "pr_ee",
    "pr_hc",
    "pr_hcl",
    "spr",
    "wspr",
    "pr",
    "s5",
    "introspective",
    "synchronous",
    "persistent_insanity",
    "initially_synchronous",
    "reflexive",
    "symmetric",
    "transitive",
    "euclidean",
    "serial",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub name: &'static str,
    pub holds: bool,
    /// Rendered counterexample when the property fails.
    pub witness: Option<String>,
}

fn from_relation(name: &'static str, frame: &Frame, w: Option<RelationWitness>) -> PropertyVerdict {
    PropertyVerdict {
        name,
        holds: w.is_none(),
        witness: w.map(|w| w.render(frame)),
    }
}

fn from_recall(name: &'static str, frame: &Frame, p: RecallProperty) -> PropertyVerdict {
    let v = recall::check(frame, p);
    PropertyVerdict {
        name,
        holds: v.holds,
        witness: v.witness.map(|w| w.render(frame, p)),
    }
}

fn pair(frame: &Frame, a: HistoryId, b: HistoryId) -> String {
    format!("({}, {})", frame.display(a), frame.display(b))
}

/// `(h, h')` with `[h]_∼ = ∅`, `h ⪯ h'` and `[h']_∼ ≠ ∅`.
fn insanity_witness(frame: &Frame) -> Option<String> {
    let blank = |x: HistoryId| frame.histories().all(|y| !frame.accessible(x, y));
    frame.histories().filter(|&h| blank(h)).find_map(|h| {
        frame
            .histories()
            .find(|&x| frame.is_prefix(h, x) && !blank(x))
            .map(|x| pair(frame, h, x))
    })
}

/// `(ε', h)` with `ε' ∼ h` but `ε'` not accessing the root of `h`.
fn initial_sync_witness(frame: &Frame) -> Option<String> {
    frame.root_ids().iter().find_map(|&r| {
        frame
            .histories()
            .find(|&h| frame.accessible(r, h) && !frame.accessible(r, frame.root_of(h)))
            .map(|h| pair(frame, r, h))
    })
}

pub fn property_verdict(frame: &Frame, name: &str) -> Option<PropertyVerdict> {
    let name = *PROPERTY_NAMES.iter().find(|&&n| n == name)?;
    let v = match name {
        "pr_ee" => from_recall(name, frame, RecallProperty::PrEe),
        "pr_hc" => from_recall(name, frame, RecallProperty::PrHc),
        "pr_hcl" => from_recall(name, frame, RecallProperty::PrHcl),
        "spr" => from_recall(name, frame, RecallProperty::Spr),
        "wspr" => from_recall(name, frame, RecallProperty::Wspr),
        "pr" => from_recall(name, frame, RecallProperty::Pr),
        "s5" => {
            let w = relations::reflexivity_witness(frame)
                .or_else(|| relations::symmetry_witness(frame))
                .or_else(|| relations::transitivity_witness(frame));
            from_relation(name, frame, w)
        }
        "introspective" => {
            let w = relations::transitivity_witness(frame).or_else(|| relations::euclideanness_witness(frame));
            from_relation(name, frame, w)
        }
        "synchronous" => from_relation(name, frame, relations::synchronicity_witness(frame)),
        "reflexive" => from_relation(name, frame, relations::reflexivity_witness(frame)),
        "symmetric" => from_relation(name, frame, relations::symmetry_witness(frame)),
        "transitive" => from_relation(name, frame, relations::transitivity_witness(frame)),
        "euclidean" => from_relation(name, frame, relations::euclideanness_witness(frame)),
        "serial" => from_relation(name, frame, relations::seriality_witness(frame)),
        "persistent_insanity" => {
            let w = insanity_witness(frame);
            PropertyVerdict {
                name,
                holds: w.is_none(),
                witness: w,
            }
        }
        "initially_synchronous" => {
            let w = initial_sync_witness(frame);
            PropertyVerdict {
                name,
                holds: w.is_none(),
                witness: w,
            }
        }
        _ => unreachable!("every listed name is handled"),
    };
    Some(v)
}

pub fn verdict_table(frame: &Frame) -> Vec<PropertyVerdict> {
    PROPERTY_NAMES
        .iter()
        .map(|n| property_verdict(frame, n).expect("listed name"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn witnesses_agree_with_deciders() {
        for fx in fixtures::all() {
            let f = fx.frame();
            for v in verdict_table(&f) {
                assert_eq!(v.holds, v.witness.is_none(), "{} {}", fx.name, v.name);
            }
            let get = |n| property_verdict(&f, n).unwrap().holds;
            assert_eq!(get("persistent_insanity"), relations::persistent_insanity(&f));
            assert_eq!(get("initially_synchronous"), relations::initially_synchronous(&f));
            assert_eq!(get("s5"), relations::is_s5(&f));
            assert_eq!(get("introspective"), relations::is_introspective(&f));
        }
    }

    #[test]
    fn fixture_expectations_hold() {
        for fx in fixtures::all() {
            let f = fx.frame();
            for &(name, expected) in &fx.expect {
                assert_eq!(
                    property_verdict(&f, name).unwrap().holds,
                    expected,
                    "{} {}",
                    fx.name,
                    name
                );
            }
        }
    }

    #[test]
    fn witness_strings() {
        let f = fixtures::fig1a();
        assert_eq!(
            property_verdict(&f, "wspr").unwrap().witness.as_deref(),
            Some("(e1.e3, e2.e3, e1, e2)")
        );
        let g = fixtures::fig4a();
        assert_eq!(
            property_verdict(&g, "initially_synchronous")
                .unwrap()
                .witness
                .as_deref(),
            Some("(r2:ε, r1:e1)")
        );
        assert!(
            !property_verdict(&fixtures::fig3a_pruned(), "persistent_insanity")
                .unwrap()
                .holds
        );
        assert!(property_verdict(&f, "nonsense").is_none());
    }
}
