//! Exhaustive enumeration of small frames.
//!
//! Protocols are forests over the fixed alphabet `e1..ek`, with roots
//! `r1..rt`, enumerated by tree count, then as tuples of trees in tree
//! order (trees ordered by size, then by their sorted history lists).
//! Relations on `n` histories are identified with masks over the `n²` pair
//! matrix, bit `i·n + j` standing for `h_i ∼ h_j`, and are visited in
//! ascending mask order. The S5 and introspective classes are generated
//! constructively and then sorted into the same order, so each class yields
//! exactly the frames the brute-force filter would keep.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use super::OracleError;
use crate::frame::{Alphabet, EventId, Frame, Protocol};
use crate::relations;

/// Enumeration ceiling used when neither the caller nor `ETL_CEILING` sets one.
pub const DEFAULT_CEILING: u64 = 1 << 32;

/// Masks per work unit when the full relation space is walked.
const CHUNK: u64 = 1 << 16;

pub fn default_ceiling() -> u64 {
    std::env::var("ETL_CEILING")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CEILING)
}

#[derive(Clone, Copy)]
pub struct CustomFilter {
    pub name: &'static str,
    pub keep: fn(&Frame) -> bool,
}

impl fmt::Debug for CustomFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Custom({})", self.name)
    }
}

impl PartialEq for CustomFilter {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for CustomFilter {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationFilter {
    All,
    S5,
    Introspective,
    Serial,
    Custom(CustomFilter),
}

impl RelationFilter {
    pub fn name(&self) -> &'static str {
        match self {
            RelationFilter::All => "all",
            RelationFilter::S5 => "s5",
            RelationFilter::Introspective => "introspective",
            RelationFilter::Serial => "serial",
            RelationFilter::Custom(c) => c.name,
        }
    }

    fn keeps(&self, frame: &Frame) -> bool {
        match self {
            RelationFilter::All => true,
            RelationFilter::S5 => relations::is_s5(frame),
            RelationFilter::Introspective => relations::is_introspective(frame),
            RelationFilter::Serial => relations::is_serial(frame),
            RelationFilter::Custom(c) => (c.keep)(frame),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_events: usize,
    pub max_depth: usize,
    pub max_histories: usize,
    pub min_trees: usize,
    pub max_trees: usize,
    pub filter: RelationFilter,
    /// Refuse to enumerate more candidate frames than this.
    pub ceiling: u64,
    /// Generate S5 and introspective relations directly instead of filtering.
    pub constructive: bool,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds {
            max_events: 2,
            max_depth: 2,
            max_histories: 4,
            min_trees: 1,
            max_trees: 1,
            filter: RelationFilter::All,
            ceiling: default_ceiling(),
            constructive: true,
        }
    }
}

impl fmt::Display for EnumBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_events={} max_depth={} max_histories={} min_trees={} max_trees={} filter={}",
            self.max_events,
            self.max_depth,
            self.max_histories,
            self.min_trees,
            self.max_trees,
            self.filter.name()
        )
    }
}

/// Set partitions of `n` labelled points: Bell numbers, saturating.
fn bell(n: usize) -> u128 {
    (0..=n).map(|k| stirling2(n, k)).fold(0u128, u128::saturating_add)
}

fn stirling2(n: usize, k: usize) -> u128 {
    // S(i, j) = j·S(i-1, j) + S(i-1, j-1)
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Transitive Euclidean relations on `n` points: choose the reflexive points,
/// partition them into clusters, send each other point to a cluster or nowhere.
fn introspective_count(n: usize) -> u128 {
    let mut total = 0u128;
    for m in 0..=n {
        let mut inner = 0u128;
        for k in 0..=m {
            inner =
                inner.saturating_add(stirling2(m, k).saturating_mul(((k + 1) as u128).saturating_pow((n - m) as u32)));
        }
        total = total.saturating_add(binomial(n, m).saturating_mul(inner));
    }
    total
}

fn full_count(n: usize) -> u128 {
    let bits = n * n;
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// All prefix-closed trees of depth at most `depth` and at most `budget`
/// histories, as sorted lists of event sequences (the root included).
fn trees(events: usize, depth: usize, budget: usize) -> Vec<Vec<Vec<EventId>>> {
    fn subtrees(events: usize, depth: usize, budget: usize) -> Vec<Vec<Vec<EventId>>> {
        if budget == 0 {
            return Vec::new();
        }
        let mut out: Vec<Vec<Vec<EventId>>> = vec![vec![Vec::new()]];
        if depth == 0 {
            return out;
        }
        for e in 0..events {
            let mut next = Vec::new();
            for partial in &out {
                next.push(partial.clone());
                let room = budget - partial.len();
                for sub in subtrees(events, depth - 1, room) {
                    let mut t = partial.clone();
                    t.extend(sub.into_iter().map(|mut s| {
                        s.insert(0, EventId::from_index(e));
                        s
                    }));
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }
    let mut all: Vec<Vec<Vec<EventId>>> = subtrees(events, depth, budget)
        .into_iter()
        .map(|mut t| {
            t.sort();
            t
        })
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

fn root_name(i: usize, width: usize) -> String {
    format!("r{:0width$}", i + 1)
}

/// Every protocol within the bounds, in enumeration order.
pub fn enumerate_protocols(bounds: &EnumBounds) -> Result<Vec<Arc<Protocol>>, OracleError> {
    validate(bounds)?;
    let names: Vec<String> = (1..=bounds.max_events).map(|i| format!("e{i}")).collect();
    let alphabet = Alphabet::new(&names).map_err(|e| OracleError::InvalidBounds(e.to_string()))?;
    let forest_trees = trees(bounds.max_events, bounds.max_depth, bounds.max_histories);
    let width = bounds.max_trees.to_string().len();
    let mut out = Vec::new();
    for t in bounds.min_trees..=bounds.max_trees {
        let mut tuple: Vec<usize> = Vec::with_capacity(t);
        forests(&forest_trees, t, bounds.max_histories, &mut tuple, &mut |tuple| {
            let spec = tuple
                .iter()
                .enumerate()
                .map(|(i, &k)| (root_name(i, width), forest_trees[k].clone()))
                .collect();
            let p = Protocol::from_event_ids(alphabet.clone(), spec).expect("generated trees are prefix-closed");
            out.push(Arc::new(p));
        });
    }
    Ok(out)
}

fn forests(
    trees: &[Vec<Vec<EventId>>],
    count: usize,
    budget: usize,
    tuple: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if tuple.len() == count {
        emit(tuple);
        return;
    }
    // at least one history for each tree still to be placed
    let reserve = count - tuple.len() - 1;
    for (k, t) in trees.iter().enumerate() {
        if t.len() + reserve > budget {
            break;
        }
        tuple.push(k);
        forests(trees, count, budget - t.len(), tuple, emit);
        tuple.pop();
    }
}

fn validate(bounds: &EnumBounds) -> Result<(), OracleError> {
    let bad = |m: &str| Err(OracleError::InvalidBounds(m.to_string()));
    if bounds.max_events == 0 || bounds.max_depth == 0 || bounds.max_histories == 0 {
        return bad("bounds must be at least 1");
    }
    if bounds.min_trees == 0 || bounds.min_trees > bounds.max_trees {
        return bad("need 1 <= min_trees <= max_trees");
    }
    if bounds.max_histories > 64 {
        return bad("at most 64 histories");
    }
    Ok(())
}

fn relation_count(filter: &RelationFilter, constructive: bool, n: usize) -> u128 {
    match (filter, constructive) {
        (RelationFilter::S5, true) => bell(n),
        (RelationFilter::Introspective, true) => introspective_count(n),
        _ => full_count(n),
    }
}

/// Number of candidate frames a sweep would visit, before filtering.
pub fn enumeration_size(bounds: &EnumBounds) -> Result<u128, OracleError> {
    let protocols = enumerate_protocols(bounds)?;
    Ok(protocols
        .iter()
        .map(|p| relation_count(&bounds.filter, bounds.constructive, p.len()))
        .fold(0u128, u128::saturating_add))
}

/// Position of a frame in the enumeration order: protocol index and the
/// relation mask (bit `i·n + j` set iff `h_i ∼ h_j`), whichever generator
/// produced it. Above 8 histories the mask no longer fits and generated
/// relations are numbered by list index instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FramePos {
    pub protocol: usize,
    pub relation: u64,
}

impl fmt::Display for FramePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.protocol, self.relation)
    }
}

#[derive(Clone)]
enum Source {
    /// Masks over the pair matrix.
    Masks(Range<u64>),
    /// Pre-generated relations, `n` rows each.
    List(Arc<Vec<u64>>, Range<usize>),
}

#[derive(Clone)]
struct Unit {
    protocol: usize,
    source: Source,
}

/// Enumeration plan: the protocols and the work units covering them.
pub struct Plan {
    bounds: EnumBounds,
    protocols: Vec<Arc<Protocol>>,
    units: Vec<Unit>,
    size: u128,
}

fn set_partitions(n: usize) -> Vec<u64> {
    // restricted growth strings; each partition becomes n rows
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    fn rec(i: usize, max: usize, a: &mut Vec<usize>, out: &mut Vec<u64>) {
        let n = a.len();
        if i == n {
            for x in 0..n {
                let mut row = 0u64;
                for y in 0..n {
                    if a[y] == a[x] {
                        row |= 1 << y;
                    }
                }
                out.push(row);
            }
            return;
        }
        for b in 0..=max + 1 {
            a[i] = b;
            rec(i + 1, max.max(b), a, out);
        }
    }
    if n == 0 {
        return out;
    }
    a[0] = 0;
    rec(1, 0, &mut a, &mut out);
    out
}

fn introspective_relations(n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for members in 0u64..(1 << n) {
        let member_ids: Vec<usize> = (0..n).filter(|&i| members >> i & 1 == 1).collect();
        let others: Vec<usize> = (0..n).filter(|&i| members >> i & 1 == 0).collect();
        let parts = set_partitions(member_ids.len());
        let m = member_ids.len();
        let partition_count = parts.len().checked_div(m).unwrap_or(1);
        for p in 0..partition_count {
            // clusters as masks over all n points
            let mut clusters: Vec<u64> = Vec::new();
            let mut rows = vec![0u64; n];
            for (k, &x) in member_ids.iter().enumerate() {
                let local = parts[p * m + k];
                let mut global = 0u64;
                for (j, &y) in member_ids.iter().enumerate() {
                    if local >> j & 1 == 1 {
                        global |= 1 << y;
                    }
                }
                rows[x] = global;
                if !clusters.contains(&global) {
                    clusters.push(global);
                }
            }
            let choices = clusters.len() + 1;
            let total = (choices as u64).pow(others.len() as u32);
            for code in 0..total {
                let mut c = code;
                for &x in &others {
                    let pick = (c % choices as u64) as usize;
                    c /= choices as u64;
                    rows[x] = if pick == 0 { 0 } else { clusters[pick - 1] };
                }
                out.extend_from_slice(&rows);
            }
        }
    }
    sort_relations(out, n)
}

/// Sorts flat relation lists into ascending mask order.
fn sort_relations(flat: Vec<u64>, n: usize) -> Vec<u64> {
    if n == 0 {
        return flat;
    }
    let mut rels: Vec<&[u64]> = flat.chunks(n).collect();
    // the last row holds the most significant mask bits
    rels.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    rels.concat()
}

impl Plan {
    pub fn new(bounds: &EnumBounds) -> Result<Plan, OracleError> {
        let protocols = enumerate_protocols(bounds)?;
        let size = protocols
            .iter()
            .map(|p| relation_count(&bounds.filter, bounds.constructive, p.len()))
            .fold(0u128, u128::saturating_add);
        if size > bounds.ceiling as u128 {
            return Err(OracleError::SearchSpaceTooLarge {
                size,
                ceiling: bounds.ceiling,
            });
        }
        let mut units = Vec::new();
        let mut lists: Vec<Option<Arc<Vec<u64>>>> = vec![None; bounds.max_histories + 1];
        for (i, p) in protocols.iter().enumerate() {
            let n = p.len();
            let list = match (&bounds.filter, bounds.constructive) {
                (RelationFilter::S5, true) => Some(sort_relations(set_partitions(n), n)),
                (RelationFilter::Introspective, true) => Some(introspective_relations(n)),
                _ => None,
            };
            match list {
                Some(generated) => {
                    let shared = lists[n].get_or_insert_with(|| Arc::new(generated)).clone();
                    let count = shared.len() / n;
                    let step = CHUNK as usize;
                    for start in (0..count).step_by(step) {
                        units.push(Unit {
                            protocol: i,
                            source: Source::List(shared.clone(), start..(start + step).min(count)),
                        });
                    }
                }
                None => {
                    let total = 1u64 << (n * n);
                    for start in (0..total).step_by(CHUNK as usize) {
                        units.push(Unit {
                            protocol: i,
                            source: Source::Masks(start..(start + CHUNK).min(total)),
                        });
                    }
                }
            }
        }
        Ok(Plan {
            bounds: bounds.clone(),
            protocols,
            units,
            size,
        })
    }

    pub fn bounds(&self) -> &EnumBounds {
        &self.bounds
    }

    pub fn protocols(&self) -> &[Arc<Protocol>] {
        &self.protocols
    }

    /// Candidate frames before filtering.
    pub fn size(&self) -> u128 {
        self.size
    }

    fn run_unit<R>(&self, unit: &Unit, acc: &mut R, visit: &impl Fn(&Frame, FramePos, &mut R)) {
        let protocol = &self.protocols[unit.protocol];
        let n = protocol.len();
        let mut frame = Frame::empty_relation(protocol.clone());
        let post = match (&self.bounds.filter, self.bounds.constructive) {
            (RelationFilter::S5 | RelationFilter::Introspective, true) | (RelationFilter::All, _) => None,
            (f, _) => Some(*f),
        };
        let low = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        match &unit.source {
            Source::Masks(range) => {
                for mask in range.clone() {
                    let rows = frame.rows_mut();
                    for (i, row) in rows.iter_mut().enumerate() {
                        *row = (mask >> (i * n)) & low;
                    }
                    if post.is_some_and(|f| !f.keeps(&frame)) {
                        continue;
                    }
                    visit(
                        &frame,
                        FramePos {
                            protocol: unit.protocol,
                            relation: mask,
                        },
                        acc,
                    );
                }
            }
            Source::List(list, range) => {
                for k in range.clone() {
                    let rows = &list[k * n..(k + 1) * n];
                    frame.rows_mut().copy_from_slice(rows);
                    let mask = if n <= 8 {
                        rows.iter().enumerate().fold(0u64, |m, (i, r)| m | r << (i * n))
                    } else {
                        k as u64
                    };
                    visit(
                        &frame,
                        FramePos {
                            protocol: unit.protocol,
                            relation: mask,
                        },
                        acc,
                    );
                }
            }
        }
    }

    /// Visits every frame. Each work unit folds into its own `R`; the results
    /// come back in enumeration order whatever the number of workers.
    pub fn sweep<R, F>(&self, workers: usize, visit: F) -> Vec<R>
    where
        R: Default + Send,
        F: Fn(&Frame, FramePos, &mut R) + Sync,
    {
        let run = || -> Vec<R> {
            self.units
                .par_iter()
                .map(|u| {
                    let mut acc = R::default();
                    self.run_unit(u, &mut acc, &visit);
                    acc
                })
                .collect()
        };
        if workers == 1 {
            return self
                .units
                .iter()
                .map(|u| {
                    let mut acc = R::default();
                    self.run_unit(u, &mut acc, &visit);
                    acc
                })
                .collect();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }

    /// Every frame in enumeration order.
    pub fn frames(&self) -> impl Iterator<Item = (FramePos, Frame)> + '_ {
        self.units.iter().flat_map(move |u| {
            let mut out = Vec::new();
            self.run_unit(u, &mut out, &|f: &Frame, pos, out: &mut Vec<(FramePos, Frame)>| {
                out.push((pos, f.clone()))
            });
            out
        })
    }
}

/// All frames within the bounds, in enumeration order.
pub fn enumerate_frames(bounds: &EnumBounds) -> Result<impl Iterator<Item = Frame>, OracleError> {
    let plan = Plan::new(bounds)?;
    let frames: Vec<Frame> = plan.frames().map(|(_, f)| f).collect();
    Ok(frames.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(events: usize, depth: usize, hist: usize, trees: usize, filter: RelationFilter) -> EnumBounds {
        EnumBounds {
            max_events: events,
            max_depth: depth,
            max_histories: hist,
            min_trees: 1,
            max_trees: trees,
            filter,
            ceiling: DEFAULT_CEILING,
            constructive: true,
        }
    }

    #[test]
    fn smallest_bounds_give_eighteen_frames() {
        let b = bounds(1, 1, 2, 1, RelationFilter::All);
        assert_eq!(enumerate_protocols(&b).unwrap().len(), 2);
        assert_eq!(enumerate_frames(&b).unwrap().count(), 18);
        assert_eq!(enumeration_size(&b).unwrap(), 18);
    }

    #[test]
    fn s5_on_two_histories() {
        let b = bounds(1, 1, 2, 1, RelationFilter::S5);
        let frames: Vec<Frame> = enumerate_frames(&b).unwrap().filter(|f| f.len() == 2).collect();
        assert_eq!(frames.len(), 2);
    }

    #[test]
    fn ceiling_is_enforced() {
        let mut b = bounds(2, 2, 5, 1, RelationFilter::All);
        b.ceiling = 1000;
        assert!(matches!(Plan::new(&b), Err(OracleError::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn tree_counts() {
        // depth 2 over two events: 1 + 2 + 5 + 6 + 6 + 4 + 1 trees of sizes 1..=7
        let sizes: Vec<usize> = trees(2, 2, 7).iter().map(|t| t.len()).collect();
        let count = |k| sizes.iter().filter(|&&s| s == k).count();
        assert_eq!((1..=7).map(count).collect::<Vec<_>>(), vec![1, 2, 5, 6, 6, 4, 1]);
        assert_eq!(trees(2, 2, 3).len(), 8);
    }

    #[test]
    fn relation_counts_match_closed_forms() {
        assert_eq!((0..=6).map(bell).collect::<Vec<_>>(), vec![1, 1, 2, 5, 15, 52, 203]);
        for n in 1..=4 {
            assert_eq!(set_partitions(n).len() as u128 / n as u128, bell(n));
            assert_eq!(
                introspective_relations(n).len() as u128 / n as u128,
                introspective_count(n)
            );
        }
    }

    #[test]
    fn forest_protocols_name_roots_in_order() {
        let mut b = bounds(1, 1, 3, 2, RelationFilter::All);
        b.min_trees = 2;
        let ps = enumerate_protocols(&b).unwrap();
        // (1,1), (1,2), (2,1)
        assert_eq!(ps.len(), 3);
        assert!(ps.iter().all(|p| p.root_names() == ["r1", "r2"]));
    }
}
