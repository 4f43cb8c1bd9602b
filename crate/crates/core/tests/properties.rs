use std::sync::{Arc, OnceLock};

use etl_core::document::{parse_frame, write_frame};
use etl_core::logic::{extension, parse_formula, satisfies, valid_on_frame, valid_on_model};
use etl_core::oracle::{check_bounded_morphism, enumerate_protocols, BoundedMorphism, EnumBounds};
use etl_core::recall::{self, epistemic_experience, RecallProperty};
use etl_core::relations::{is_s5, s5_closure};
use etl_core::{EventId, Formula, Frame, HistoryId, HistorySet, Protocol, Rel, Valuation};
use proptest::prelude::*;

fn protocols() -> &'static [Arc<Protocol>] {
    static P: OnceLock<Vec<Arc<Protocol>>> = OnceLock::new();
    P.get_or_init(|| {
        let b = EnumBounds {
            max_events: 2,
            max_depth: 2,
            max_histories: 5,
            max_trees: 2,
            ..Default::default()
        };
        enumerate_protocols(&b).unwrap()
    })
}

fn frame_strategy() -> impl Strategy<Value = Frame> {
    (0..protocols().len(), proptest::collection::vec(any::<bool>(), 25)).prop_map(|(i, bits)| {
        let p = protocols()[i].clone();
        let n = p.len();
        let pairs: Vec<_> = (0..n * n)
            .filter(|&k| bits[k])
            .map(|k| (HistoryId::from_index(k / n), HistoryId::from_index(k % n)))
            .collect();
        Frame::with_pairs(p, pairs)
    })
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
        any::<bool>().prop_map(Formula::Bool),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let ev = (0..2usize).prop_map(EventId::from_index);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::k),
            inner.clone().prop_map(Formula::l),
            (ev.clone(), inner.clone()).prop_map(|(e, f)| Formula::after(e, f)),
            (ev, inner.clone()).prop_map(|(e, f)| Formula::after_box(e, f)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn model_strategy() -> impl Strategy<Value = (Frame, Valuation)> {
    (frame_strategy(), any::<u8>(), any::<u8>()).prop_map(|(f, p, q)| {
        let set = |m: u8| HistorySet::from_ids(f.len(), f.histories().filter(|h| m >> h.index() & 1 == 1));
        let v = Valuation::new().with("p", set(p)).with("q", set(q));
        (f, v)
    })
}

// Quantifier-by-quantifier readings of the recall conditions, independent of
// the library's row-based checkers.

fn steps(f: &Frame) -> Vec<(HistoryId, HistoryId)> {
    f.histories()
        .flat_map(|h| f.events().filter_map(move |e| f.extend(h, e).map(|he| (h, he))))
        .collect()
}

fn one_step(f: &Frame, a: HistoryId, b: HistoryId) -> bool {
    f.parent(b) == Some(a)
}

fn naive_pr_hc(f: &Frame) -> bool {
    steps(f).into_iter().all(|(h, he)| {
        f.histories()
            .filter(|&x| f.accessible(he, x))
            .all(|x| f.histories().any(|y| f.is_prefix(y, x) && f.accessible(h, y)))
    })
}

fn naive_pr_hcl(f: &Frame) -> bool {
    steps(f).into_iter().all(|(h, he)| {
        f.histories().filter(|&x| f.accessible(he, x)).all(|x| {
            f.accessible(h, x)
                || f.histories()
                    .any(|y| one_step(f, y, x) && (f.accessible(h, y) || f.accessible(he, y)))
        })
    })
}

fn naive_spr(f: &Frame) -> bool {
    steps(f).into_iter().all(|(h, he)| {
        f.histories()
            .filter(|&x| f.accessible(he, x))
            .all(|x| f.histories().any(|y| one_step(f, y, x) && f.accessible(h, y)))
    })
}

fn naive_wspr(f: &Frame) -> bool {
    steps(f).into_iter().all(|(h, he)| {
        f.histories().filter(|&x| f.accessible(he, x)).all(|x| {
            f.is_root(x) && (f.tree_count() > 1 || x == f.root_of(h)) || f.parent(x).is_some_and(|y| f.accessible(h, y))
        })
    })
}

fn naive_experience(f: &Frame, h: HistoryId) -> Vec<Vec<bool>> {
    let mut seq: Vec<Vec<bool>> = Vec::new();
    for p in f.histories().filter(|&p| f.is_prefix(p, h)) {
        let set: Vec<bool> = f.histories().map(|x| f.accessible(p, x)).collect();
        if seq.last() != Some(&set) {
            seq.push(set);
        }
    }
    seq
}

fn naive_pr_ee(f: &Frame) -> bool {
    f.histories().all(|h| {
        f.histories()
            .filter(|&x| f.accessible(h, x))
            .all(|x| naive_experience(f, h) == naive_experience(f, x))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn recall_checkers_match_quantifier_readings(f in frame_strategy()) {
        prop_assert_eq!(recall::has_pr_hc(&f).holds, naive_pr_hc(&f));
        prop_assert_eq!(recall::has_pr_hcl(&f).holds, naive_pr_hcl(&f));
        prop_assert_eq!(recall::has_spr(&f).holds, naive_spr(&f));
        prop_assert_eq!(recall::has_wspr(&f).holds, naive_wspr(&f));
        prop_assert_eq!(recall::has_pr_ee(&f).holds, naive_pr_ee(&f));
        prop_assert_eq!(recall::pr_hc_by_inclusion(&f), naive_pr_hc(&f));
        prop_assert_eq!(recall::pr_hcl_by_inclusion(&f), naive_pr_hcl(&f));
    }

    #[test]
    fn failing_verdicts_carry_replayable_witnesses(f in frame_strategy()) {
        for p in [RecallProperty::PrEe, RecallProperty::PrHc, RecallProperty::PrHcl, RecallProperty::Spr, RecallProperty::Wspr, RecallProperty::Pr] {
            let v = recall::check(&f, p);
            prop_assert_eq!(v.holds, v.witness.is_none());
            if let Some(w) = &v.witness {
                prop_assert!(w.replays(&f, p), "{} witness {} does not replay", p.name(), w.render(&f, p));
            }
        }
    }

    #[test]
    fn experience_compression_drops_only_repeats(f in frame_strategy()) {
        for h in f.histories() {
            let ee = epistemic_experience(&f, h);
            prop_assert_eq!(ee.raw.len(), f.depth(h) + 1);
            prop_assert!(ee.compressed.windows(2).all(|w| w[0] != w[1]));
            prop_assert_eq!(ee.compressed.first(), ee.raw.first());
            prop_assert_eq!(ee.compressed.last(), ee.raw.last());
        }
    }

    #[test]
    fn closure_is_least_equivalence(f in frame_strategy()) {
        let c = s5_closure(&f);
        prop_assert!(is_s5(&c));
        prop_assert!(f.access_pairs().all(|(a, b)| c.accessible(a, b)));
        prop_assert!(s5_closure(&c) == c);
        if is_s5(&f) {
            prop_assert!(c == f);
        }
    }

    #[test]
    fn satisfies_agrees_with_extension((f, v) in model_strategy(), phi in formula_strategy()) {
        let ext = extension(&f, &v, &phi);
        for h in f.histories() {
            prop_assert_eq!(ext.contains(h), satisfies(&f, &v, h, &phi));
        }
        let m = valid_on_model(&f, &v, &phi);
        prop_assert_eq!(m.valid, ext.len() == f.len());
    }

    #[test]
    fn modal_dualities((f, v) in model_strategy(), phi in formula_strategy(), psi in formula_strategy()) {
        let ext = |x: &Formula| extension(&f, &v, x);
        prop_assert_eq!(ext(&Formula::not(Formula::not(phi.clone()))), ext(&phi));
        prop_assert_eq!(ext(&Formula::l(phi.clone())), ext(&Formula::not(Formula::k(Formula::not(phi.clone())))));
        prop_assert_eq!(
            ext(&Formula::k(Formula::and(phi.clone(), psi.clone()))),
            ext(&Formula::and(Formula::k(phi.clone()), Formula::k(psi.clone())))
        );
        for e in f.events() {
            prop_assert_eq!(
                ext(&Formula::after(e, Formula::or(phi.clone(), psi.clone()))),
                ext(&Formula::or(Formula::after(e, phi.clone()), Formula::after(e, psi.clone())))
            );
        }
        let by_hand = HistorySet::from_ids(
            f.len(),
            f.histories().filter(|&h| f.histories().all(|x| !f.accessible(h, x) || ext(&phi).contains(x))),
        );
        prop_assert_eq!(ext(&Formula::k(phi.clone())), by_hand);
    }

    #[test]
    fn printed_formulas_parse_back(phi in formula_strategy()) {
        let f = &protocols()[0];
        let text = phi.display(f.alphabet()).to_string();
        let back = parse_formula(&text, f.alphabet()).unwrap();
        prop_assert_eq!(back, phi, "printed as {}", text);
    }

    #[test]
    fn frame_validity_implies_model_validity((f, v) in model_strategy(), phi in formula_strategy()) {
        let only_p = Formula::and(phi.clone(), Formula::implies(Formula::atom("p"), Formula::atom("p")));
        let check = valid_on_frame(&f, &only_p).unwrap();
        if check.valid {
            prop_assert!(valid_on_model(&f, &v, &only_p).valid);
        } else {
            let (cv, h) = check.countermodel.unwrap();
            prop_assert!(!satisfies(&f, &cv, h, &only_p));
        }
    }

    #[test]
    fn documents_round_trip(f in frame_strategy()) {
        let text = write_frame(&f);
        let back = parse_frame(&text).unwrap();
        prop_assert!(back == f);
        prop_assert_eq!(write_frame(&back), text);
    }

    #[test]
    fn identity_and_its_compositions_are_bounded(f in frame_strategy()) {
        let id = BoundedMorphism::identity(&f);
        prop_assert!(check_bounded_morphism(&id).valid);
        let twice = id.then(&id).unwrap();
        prop_assert!(twice == id);
    }

    #[test]
    fn leadsto_star_is_prefix_order(f in frame_strategy()) {
        for h in f.histories() {
            let down = f.image(h, Rel::LeadstoStar);
            for x in f.histories() {
                prop_assert_eq!(down.contains(x), f.is_prefix(h, x));
            }
        }
    }
}
