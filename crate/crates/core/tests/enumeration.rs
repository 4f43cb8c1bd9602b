use etl_core::oracle::enumerate::CustomFilter;
use etl_core::oracle::{enumeration_size, EnumBounds, OracleError, Plan, RelationFilter};
use etl_core::relations::{is_introspective, is_s5};
use etl_core::Frame;

fn bounds(filter: RelationFilter, constructive: bool) -> EnumBounds {
    EnumBounds {
        max_events: 2,
        max_depth: 2,
        max_histories: 4,
        min_trees: 1,
        max_trees: 2,
        filter,
        constructive,
        ..Default::default()
    }
}

fn frames(b: &EnumBounds) -> Vec<(String, Frame)> {
    Plan::new(b)
        .unwrap()
        .frames()
        .map(|(p, f)| (p.to_string(), f))
        .collect()
}

/// Every frame of the unfiltered sweep that passes `keep`, in sweep order.
fn filtered(keep: fn(&Frame) -> bool) -> Vec<Frame> {
    frames(&bounds(RelationFilter::All, false))
        .into_iter()
        .map(|(_, f)| f)
        .filter(keep)
        .collect()
}

fn same_frames(a: &[Frame], b: &[(String, Frame)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, (_, y))| x == y)
}

#[test]
fn constructive_s5_matches_filtering() {
    let fast = frames(&bounds(RelationFilter::S5, true));
    let slow = frames(&bounds(RelationFilter::S5, false));
    let custom = frames(&bounds(
        RelationFilter::Custom(CustomFilter {
            name: "s5-by-hand",
            keep: is_s5,
        }),
        false,
    ));
    assert_eq!(fast.len(), slow.len());
    assert!(fast.iter().zip(&slow).all(|(a, b)| a == b));
    assert!(fast.iter().zip(&custom).all(|(a, b)| a.1 == b.1));
    assert!(same_frames(&filtered(is_s5), &fast));
}

#[test]
fn constructive_introspective_matches_filtering() {
    let fast = frames(&bounds(RelationFilter::Introspective, true));
    let slow = frames(&bounds(RelationFilter::Introspective, false));
    assert_eq!(fast.len(), slow.len());
    assert!(fast.iter().zip(&slow).all(|(a, b)| a == b));
    assert!(same_frames(&filtered(is_introspective), &fast));
}

#[test]
fn size_counts_candidates_and_ceiling_refuses() {
    let b = bounds(RelationFilter::All, true);
    let n = enumeration_size(&b).unwrap();
    assert_eq!(n, frames(&b).len() as u128);
    let tight = EnumBounds { ceiling: 1000, ..b };
    assert!(matches!(
        Plan::new(&tight),
        Err(OracleError::SearchSpaceTooLarge { .. })
    ));
}

#[test]
fn sweep_order_is_independent_of_workers() {
    let plan = Plan::new(&bounds(RelationFilter::All, true)).unwrap();
    let collect = |workers| {
        plan.sweep(workers, |f: &Frame, pos, acc: &mut Vec<String>| {
            if f.access_count() == 3 {
                acc.push(pos.to_string())
            }
        })
        .concat()
    };
    let one = collect(1);
    assert!(!one.is_empty());
    assert_eq!(one, collect(3));
}
