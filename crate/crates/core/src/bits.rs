//! Word-level bitset over history indices.
//!
//! Relations and protocol closures are stored as flat matrices of `u64`
//! words, one row per history. The helpers here work on borrowed rows so the
//! hot checkers never allocate; [`HistorySet`] is the owned form handed out by
//! the public API.

use std::fmt;

use smallvec::SmallVec;

use crate::frame::HistoryId;

pub(crate) type Words = SmallVec<[u64; 2]>;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn contains(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
pub(crate) fn insert(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

#[inline]
pub(crate) fn remove(row: &mut [u64], i: usize) {
    row[i / 64] &= !(1 << (i % 64));
}

#[inline]
pub(crate) fn is_empty(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

#[inline]
pub(crate) fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x & !y == 0)
}

#[inline]
pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(&x, &y)| x & y != 0)
}

#[inline]
pub(crate) fn union_into(dst: &mut [u64], src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

/// First index set in `a` but not in `b`.
#[inline]
pub(crate) fn first_difference(a: &[u64], b: &[u64]) -> Option<usize> {
    a.iter().zip(b).enumerate().find_map(|(w, (&x, &y))| {
        let d = x & !y;
        (d != 0).then(|| w * 64 + d.trailing_zeros() as usize)
    })
}

/// Ascending iterator over the set bits of a row.
#[derive(Clone)]
pub(crate) struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            index: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

#[inline]
pub(crate) fn ones(row: &[u64]) -> Ones<'_> {
    Ones::new(row)
}

/// A set of histories of one frame.
///
/// The universe size is fixed at construction and equals the number of
/// histories in the frame the set was obtained from.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistorySet {
    universe: usize,
    words: Words,
}

impl HistorySet {
    pub fn empty(universe: usize) -> Self {
        HistorySet {
            universe,
            words: smallvec::smallvec![0; words_for(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            insert(&mut set.words, i);
        }
        set
    }

    pub(crate) fn from_words(universe: usize, words: &[u64]) -> Self {
        HistorySet {
            universe,
            words: Words::from_slice(words),
        }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = HistoryId>) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, h: HistoryId) -> bool {
        h.index() < self.universe && contains(&self.words, h.index())
    }

    pub fn insert(&mut self, h: HistoryId) {
        assert!(h.index() < self.universe, "history outside set universe");
        insert(&mut self.words, h.index());
    }

    pub fn remove(&mut self, h: HistoryId) {
        if h.index() < self.universe {
            remove(&mut self.words, h.index());
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        is_empty(&self.words)
    }

    pub fn is_subset(&self, other: &HistorySet) -> bool {
        is_subset(&self.words, &other.words)
    }

    pub fn union(&self, other: &HistorySet) -> HistorySet {
        let mut out = self.clone();
        union_into(&mut out.words, &other.words);
        out
    }

    pub fn intersection(&self, other: &HistorySet) -> HistorySet {
        let mut out = self.clone();
        for (d, &s) in out.words.iter_mut().zip(&other.words) {
            *d &= s;
        }
        out
    }

    pub fn complement(&self) -> HistorySet {
        let mut out = HistorySet::full(self.universe);
        for (d, &s) in out.words.iter_mut().zip(&self.words) {
            *d &= !s;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = HistoryId> + '_ {
        ones(&self.words).map(HistoryId::from_index)
    }
}

impl fmt::Debug for HistorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|h| h.index())).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_crosses_word_boundaries() {
        let mut row = vec![0u64; 3];
        for i in [0, 63, 64, 130] {
            insert(&mut row, i);
        }
        assert_eq!(ones(&row).collect::<Vec<_>>(), vec![0, 63, 64, 130]);
        assert_eq!(first_difference(&row, &[1, 0, 0]), Some(63));
    }

    #[test]
    fn complement_respects_universe() {
        let set = HistorySet::from_ids(5, [HistoryId::from_index(1)]);
        let c = set.complement();
        assert_eq!(c.len(), 4);
        assert!(!c.contains(HistoryId::from_index(1)));
        assert!(c.complement() == set);
    }
}
