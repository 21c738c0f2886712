//! Ranked enumeration of the bases that extend a root base.
//!
//! The bases above `root` within a basis are `root ∪ X` for `X` a subset of
//! the remaining universe rules (`free`) with `|X| ≤ depth`. They are indexed
//! by size first, then lexicographically by free position, which gives O(|X|)
//! ranking through the combinatorial number system. Every extension of a base
//! has a larger index, so a reverse sweep sees all supersets of a base before
//! the base itself.

use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::atomic::{binomial, AtomicRule, Base};

pub(crate) type Pos = u32;

#[derive(Debug)]
pub(crate) struct Lattice {
    universe: Arc<Vec<AtomicRule>>,
    root: Vec<Pos>,
    /// Universe indices not in the root.
    free: Vec<Pos>,
    depth: usize,
    /// `offsets[s]` is the index of the first base with `s` extra rules.
    offsets: Vec<usize>,
    /// `binom[n][k]` for `n ≤ free.len()`, `k ≤ depth + 1`.
    binom: Vec<Vec<u64>>,
}

/// Total number of bases a lattice over these parameters would hold.
pub(crate) fn lattice_size(free: usize, depth: usize) -> u128 {
    (0..=depth.min(free)).fold(0u128, |acc, k| acc.saturating_add(binomial(free as u128, k as u128)))
}

impl Lattice {
    /// `root` must be a subset of `universe` (universe indices).
    pub(crate) fn new(universe: Arc<Vec<AtomicRule>>, root: Vec<Pos>, max_rules: Option<usize>) -> Self {
        let free: Vec<Pos> = (0..universe.len() as Pos)
            .filter(|i| root.binary_search(i).is_err())
            .collect();
        let n = free.len();
        let depth = max_rules.map_or(n, |m| m.saturating_sub(root.len()).min(n));
        let binom: Vec<Vec<u64>> = (0..=n)
            .map(|i| {
                (0..=depth + 1)
                    .map(|k| binomial(i as u128, k as u128).min(u64::MAX as u128) as u64)
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(depth + 2);
        let mut acc = 0usize;
        for s in 0..=depth {
            offsets.push(acc);
            acc += binom[n][s] as usize;
        }
        offsets.push(acc);
        Lattice {
            universe,
            root,
            free,
            depth,
            offsets,
            binom,
        }
    }

    pub(crate) fn len(&self) -> usize {
        *self.offsets.last().expect("nonempty offsets")
    }

    pub(crate) fn depth(&self) -> usize {
        self.depth
    }

    pub(crate) fn free_len(&self) -> usize {
        self.free.len()
    }

    pub(crate) fn universe(&self) -> &[AtomicRule] {
        &self.universe
    }

    /// Universe index of a free position.
    pub(crate) fn universe_index(&self, p: Pos) -> Pos {
        self.free[p as usize]
    }

    /// Free position of a universe index, if it is not part of the root.
    pub(crate) fn free_position(&self, u: Pos) -> Option<Pos> {
        self.free.binary_search(&u).ok().map(|p| p as Pos)
    }

    pub(crate) fn level_range(&self, s: usize) -> Range<usize> {
        self.offsets[s]..self.offsets[s + 1]
    }

    pub(crate) fn rank(&self, x: &[Pos]) -> usize {
        let n = self.free.len();
        let s = x.len();
        let mut r = self.binom[n][s] - 1;
        for (i, &c) in x.iter().enumerate() {
            r -= self.binom[n - 1 - c as usize][s - i];
        }
        self.offsets[s] + r as usize
    }

    pub(crate) fn unrank(&self, idx: usize) -> Vec<Pos> {
        let s = self.offsets.partition_point(|&o| o <= idx) - 1;
        let n = self.free.len();
        let mut r = (idx - self.offsets[s]) as u64;
        let mut out = Vec::with_capacity(s);
        let mut c = 0usize;
        for i in 0..s {
            // skip all combinations starting with smaller elements
            loop {
                let block = self.binom[n - 1 - c][s - i - 1];
                if r < block {
                    break;
                }
                r -= block;
                c += 1;
            }
            out.push(c as Pos);
            c += 1;
        }
        out
    }

    pub(crate) fn base_at(&self, idx: usize) -> Base {
        let x = self.unrank(idx);
        self.root
            .iter()
            .copied()
            .chain(x.iter().map(|&p| self.free[p as usize]))
            .map(|u| self.universe[u as usize].clone())
            .collect()
    }

    /// Universe indices of the rules of base `x`.
    pub(crate) fn rule_indices<'a>(&'a self, x: &'a [Pos]) -> impl Iterator<Item = Pos> + 'a {
        self.root
            .iter()
            .copied()
            .chain(x.iter().map(|&p| self.free[p as usize]))
    }

    /// Index of the base `x ∪ extra`, or `None` if it exceeds the depth.
    pub(crate) fn augment(&self, x: &[Pos], extra: &[Pos]) -> Option<usize> {
        if extra.is_empty() {
            return Some(self.rank(x));
        }
        let mut merged: Vec<Pos> = x.iter().chain(extra).copied().collect();
        merged.sort_unstable();
        merged.dedup();
        (merged.len() <= self.depth).then(|| self.rank(&merged))
    }

    /// Calls `f` with the index of every one-rule extension of `x`.
    pub(crate) fn for_each_child(&self, x: &[Pos], mut f: impl FnMut(usize) -> bool) -> bool {
        if x.len() >= self.depth {
            return true;
        }
        let mut buf = Vec::with_capacity(x.len() + 1);
        let mut k = 0;
        for j in 0..self.free.len() as Pos {
            if k < x.len() && x[k] == j {
                k += 1;
                continue;
            }
            buf.clear();
            buf.extend_from_slice(&x[..k]);
            buf.push(j);
            buf.extend_from_slice(&x[k..]);
            if !f(self.rank(&buf)) {
                return false;
            }
        }
        true
    }

    /// Calls `f(index, rules)` on every base extending `x` (including `x`),
    /// stopping early when `f` returns false. Returns whether it ran to the end.
    pub(crate) fn for_each_extension(&self, x: &[Pos], mut f: impl FnMut(usize, &[Pos]) -> bool) -> bool {
        let complement: Vec<Pos> = (0..self.free.len() as Pos)
            .filter(|p| x.binary_search(p).is_err())
            .collect();
        let budget = self.depth.saturating_sub(x.len());
        let mut current = x.to_vec();
        self.extend_rec(&complement, 0, budget, &mut current, &mut f)
    }

    fn extend_rec(
        &self,
        complement: &[Pos],
        from: usize,
        budget: usize,
        current: &mut Vec<Pos>,
        f: &mut impl FnMut(usize, &[Pos]) -> bool,
    ) -> bool {
        if !f(self.rank(current), current) {
            return false;
        }
        if budget == 0 {
            return true;
        }
        for (i, &p) in complement.iter().enumerate().skip(from) {
            let at = current.partition_point(|&q| q < p);
            current.insert(at, p);
            let cont = self.extend_rec(complement, i + 1, budget - 1, current, f);
            current.remove(at);
            if !cont {
                return false;
            }
        }
        true
    }

    /// Evaluates `f` on every base of size `s`, in index order, in parallel.
    /// `f` receives the base index and its free positions.
    pub(crate) fn map_level<T: Send>(&self, s: usize, f: impl Fn(usize, &[Pos]) -> T + Sync) -> Vec<T> {
        const CHUNK: usize = 1024;
        let range = self.level_range(s);
        let starts: Vec<usize> = range.clone().step_by(CHUNK).collect();
        starts
            .into_par_iter()
            .flat_map_iter(|start| {
                let end = (start + CHUNK).min(range.end);
                let mut x = self.unrank(start);
                let mut out = Vec::with_capacity(end - start);
                for idx in start..end {
                    out.push(f(idx, &x));
                    if idx + 1 < end {
                        next_combination(&mut x, self.free.len());
                    }
                }
                out
            })
            .collect()
    }

    /// Evaluates `f` on every base of the lattice, in index order.
    pub(crate) fn map_all<T: Send>(&self, f: impl Fn(usize, &[Pos]) -> T + Sync) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        for s in 0..=self.depth {
            out.extend(self.map_level(s, &f));
        }
        out
    }

    /// `result[i]` holds iff `v[j]` holds for every base `j` extending `i`.
    pub(crate) fn all_extensions(&self, v: &Bits) -> Bits {
        let mut out = v.clone();
        for s in (0..self.depth).rev() {
            let cleared: Vec<usize> = {
                let out = &out;
                self.map_level(s, |idx, x| {
                    (out.get(idx) && !self.for_each_child(x, |j| out.get(j))).then_some(idx)
                })
                .into_iter()
                .flatten()
                .collect()
            };
            for idx in cleared {
                out.set(idx, false);
            }
        }
        out
    }
}

/// Advances `x` to the next `|x|`-combination of `0..n` in lex order.
fn next_combination(x: &mut [Pos], n: usize) {
    let s = x.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if (x[i] as usize) < n - s + i {
            x[i] += 1;
            for j in i + 1..s {
                x[j] = x[j - 1] + 1;
            }
            return;
        }
    }
}

/// A fixed-length bitset indexed by lattice position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub(crate) fn zeros(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub(crate) fn ones(len: usize) -> Self {
        let mut b = Bits {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        b.trim();
        b
    }

    pub(crate) fn from_fn(len: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut b = Bits::zeros(len);
        for i in 0..len {
            if f(i) {
                b.set(i, true);
            }
        }
        b
    }

    pub(crate) fn from_bools(values: &[bool]) -> Self {
        Bits::from_fn(values.len(), |i| values[i])
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, v: bool) {
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub(crate) fn all(&self) -> bool {
        self.count_ones() == self.len
    }

    pub(crate) fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn first_zero(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != u64::MAX)
            .map(|(i, w)| i * 64 + w.trailing_ones() as usize)
            .filter(|&i| i < self.len)
    }

    fn zip(&self, other: &Bits, op: impl Fn(u64, u64) -> u64) -> Bits {
        debug_assert_eq!(self.len, other.len);
        let mut b = Bits {
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
            len: self.len,
        };
        b.trim();
        b
    }

    pub(crate) fn and(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & b)
    }

    pub(crate) fn or(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a | b)
    }

    /// `!self | other`, pointwise.
    pub(crate) fn implies(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| !a | b)
    }
}
