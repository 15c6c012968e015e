//! Clopen subsets of an edge shift as finite unions of cylinders.
//!
//! A set is stored as a left coordinate `lo` and a sorted, prefix-free
//! list of allowed words; `[w @ lo]` is the cylinder of points whose
//! coordinates `lo, lo+1, ...` spell `w`. Sibling words that cover their
//! parent are merged, so at a fixed `lo` the stored list is unique.
//! Equality and containment are decided by point search, never by
//! expanding both sides to a common window.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partial::{find_in, Cond};
use crate::shift::{EdgeShift, PeriodicPoint, Symbol, Word};

/// A single cylinder `[word @ offset]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub word: Word,
    pub offset: i64,
}

/// Outcome of testing a partially known point against a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    /// The answer depends on this coordinate.
    Need(i64),
}

#[derive(Clone)]
pub struct ClopenSet {
    shift: Arc<EdgeShift>,
    lo: i64,
    words: Vec<Word>,
}

impl ClopenSet {
    pub fn empty(shift: &Arc<EdgeShift>) -> Self {
        ClopenSet {
            shift: shift.clone(),
            lo: 0,
            words: Vec::new(),
        }
    }

    pub fn full(shift: &Arc<EdgeShift>) -> Self {
        ClopenSet {
            shift: shift.clone(),
            lo: 0,
            words: vec![Vec::new()],
        }
    }

    /// `[word @ offset]`; rejects words that occur in no point.
    pub fn cylinder(shift: &Arc<EdgeShift>, word: &[Symbol], offset: i64) -> Result<Self> {
        if !shift.is_allowed(word) {
            return Err(Error::BadWord(format!(
                "{} does not occur in the shift",
                shift.format_word(word)
            )));
        }
        Ok(Self::from_words(shift, offset, vec![word.to_vec()]))
    }

    /// Union of `[w @ lo]` over the given words; words that do not occur
    /// in the shift contribute nothing.
    pub fn from_words(shift: &Arc<EdgeShift>, lo: i64, words: Vec<Word>) -> Self {
        let words: Vec<Word> = words.into_iter().filter(|w| shift.is_allowed(w)).collect();
        let mut s = ClopenSet {
            shift: shift.clone(),
            lo,
            words: collapse(shift, words),
        };
        s.raise();
        s
    }

    /// Union of arbitrary cylinders.
    pub fn from_cylinders(shift: &Arc<EdgeShift>, cylinders: &[Cylinder]) -> Self {
        let Some(lo) = cylinders.iter().map(|c| c.offset).min() else {
            return Self::empty(shift);
        };
        let mut words = Vec::new();
        for c in cylinders {
            if shift.is_allowed(&c.word) {
                words.extend(shift.left_extensions(&c.word, (c.offset - lo) as usize));
            }
        }
        Self::from_words(shift, lo, words)
    }

    pub fn shift(&self) -> &Arc<EdgeShift> {
        &self.shift
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last coordinate the set depends on; `lo - 1` for `X` and `∅`.
    pub fn hi(&self) -> i64 {
        self.lo + self.max_len() as i64 - 1
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn cylinders(&self) -> Vec<Cylinder> {
        self.words
            .iter()
            .map(|w| Cylinder {
                word: w.clone(),
                offset: self.lo,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    /// Words of the set re-expressed at a smaller left coordinate.
    fn words_at(&self, lo: i64) -> Vec<Word> {
        if self.is_full() || self.is_empty() || lo == self.lo {
            return self.words.clone();
        }
        debug_assert!(lo < self.lo);
        let steps = (self.lo - lo) as usize;
        let mut out: Vec<Word> = self
            .words
            .iter()
            .flat_map(|w| self.shift.left_extensions(w, steps))
            .collect();
        out.sort();
        out
    }

    fn align(&self, other: &Self) -> (i64, Vec<Word>, Vec<Word>) {
        self.check_same_shift(other);
        let lo = match (
            self.is_full() || self.is_empty(),
            other.is_full() || other.is_empty(),
        ) {
            (true, true) => 0,
            (true, false) => other.lo,
            (false, true) => self.lo,
            (false, false) => self.lo.min(other.lo),
        };
        (lo, self.words_at(lo), other.words_at(lo))
    }

    pub fn union(&self, other: &Self) -> Self {
        let (lo, mut a, b) = self.align(other);
        a.extend(b);
        Self::from_words(&self.shift, lo, a)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (lo, a, b) = self.align(other);
        Self::from_words(&self.shift, lo, intersect_words(&a, &b))
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        complement_rec(&self.shift, &self.words, &mut cur, &mut out);
        Self::from_words(&self.shift, self.lo, out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_same_shift(other);
        find_in(&self.shift, self, &[Cond::outside(other, 0)]).is_none()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.check_same_shift(other);
        find_in(&self.shift, self, &[Cond::inside(other, 0)]).is_some()
    }

    fn check_same_shift(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.shift, &other.shift) || *self.shift == *other.shift,
            "clopen sets over different shifts"
        );
    }

    /// Image under `σ^steps`.
    pub fn shift_image(&self, steps: i64) -> Self {
        if self.is_full() || self.is_empty() {
            return self.clone();
        }
        ClopenSet {
            shift: self.shift.clone(),
            lo: self.lo - steps,
            words: self.words.clone(),
        }
    }

    /// Membership of a point known through `get`.
    pub fn decide<F: Fn(i64) -> Option<Symbol>>(&self, get: F) -> Decision {
        let (mut a, mut b) = (0usize, self.words.len());
        if a == b {
            return Decision::No;
        }
        let mut i = 0usize;
        loop {
            if self.words[a].len() == i {
                return Decision::Yes;
            }
            let c = self.lo + i as i64;
            let Some(s) = get(c) else {
                return Decision::Need(c);
            };
            let range = &self.words[a..b];
            let na = a + range.partition_point(|w| w[i] < s);
            let nb = a + range.partition_point(|w| w[i] <= s);
            if na == nb {
                return Decision::No;
            }
            a = na;
            b = nb;
            i += 1;
        }
    }

    pub fn contains_point(&self, p: &PeriodicPoint) -> bool {
        self.decide(|i| Some(p.at(i))) == Decision::Yes
    }

    /// Membership of a point whose coordinates `lo ..` spell `window`;
    /// `None` if the window is too short.
    pub fn contains_window(&self, lo: i64, window: &[Symbol]) -> Option<bool> {
        let get = |i: i64| {
            let k = i - lo;
            (k >= 0 && (k as usize) < window.len()).then(|| window[k as usize])
        };
        match self.decide(get) {
            Decision::Yes => Some(true),
            Decision::No => Some(false),
            Decision::Need(_) => None,
        }
    }

    /// All allowed words `v` of length `len` with `[v @ lo] ⊆ self`.
    /// The window `[lo, lo + len)` must cover the coordinates the set
    /// depends on.
    pub fn expand(&self, lo: i64, len: usize) -> Result<Vec<Word>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.is_full() && (lo > self.lo || lo + len as i64 <= self.hi()) {
            return Err(Error::InvalidParams(format!(
                "window [{lo}, {}] does not cover [{}, {}]",
                lo + len as i64 - 1,
                self.lo,
                self.hi()
            )));
        }
        if self.is_full() {
            return Ok(self.shift.allowed_words(len));
        }
        let base = self.words_at(lo);
        let mut out = Vec::new();
        for w in base {
            out.extend(self.shift.right_extensions(&w, len - w.len()));
        }
        out.sort();
        Ok(out)
    }

    /// Words `v` of length `len` such that `[v @ lo]` meets the set.
    pub fn project(&self, lo: i64, len: usize) -> Vec<Word> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.is_full() {
            return self.shift.allowed_words(len);
        }
        let l = lo.min(self.lo);
        let h = (lo + len as i64 - 1).max(self.hi());
        let words = self
            .expand(l, (h - l + 1) as usize)
            .expect("window covers support");
        let start = (lo - l) as usize;
        let set: BTreeSet<Word> = words
            .iter()
            .map(|w| w[start..start + len].to_vec())
            .collect();
        set.into_iter().collect()
    }

    /// Central words of radius `r` whose cylinders meet the set; radius 0
    /// stands for the trivial partition with the empty word as its cell.
    pub fn cells_meeting(&self, r: usize) -> Vec<Word> {
        if r == 0 {
            return if self.is_empty() {
                Vec::new()
            } else {
                vec![Vec::new()]
            };
        }
        self.project(-(r as i64), 2 * r + 1)
    }

    pub fn parse(shift: &Arc<EdgeShift>, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "{}" {
            return Ok(Self::empty(shift));
        }
        let mut cyls = Vec::new();
        for tok in text.split('|') {
            let tok = tok.trim();
            if tok == "*" {
                return Ok(Self::full(shift));
            }
            let (w, off) = tok
                .rsplit_once('@')
                .ok_or_else(|| Error::BadSyntax(format!("missing '@' in {tok:?}")))?;
            let offset: i64 = off
                .trim()
                .parse()
                .map_err(|_| Error::BadSyntax(format!("bad offset in {tok:?}")))?;
            let word = shift.parse_word(w.trim())?;
            if !shift.is_allowed(&word) {
                return Err(Error::BadWord(format!(
                    "{} does not occur in the shift",
                    w.trim()
                )));
            }
            cyls.push(Cylinder { word, offset });
        }
        Ok(Self::from_cylinders(shift, &cyls))
    }

    /// Raises `lo` while the set does not depend on coordinate `lo` and
    /// the right end does not move outward.
    fn raise(&mut self) {
        let shift = self.shift.clone();
        loop {
            if self.is_empty() || self.is_full() {
                self.lo = 0;
                return;
            }
            let need = shift.memory() + 1;
            let mut proj = Vec::new();
            for w in &self.words {
                if w.len() >= need {
                    proj.push(w[1..].to_vec());
                } else {
                    for v in shift.right_extensions(w, need - w.len()) {
                        proj.push(v[1..].to_vec());
                    }
                }
            }
            let cand = collapse(&shift, proj);
            let cand_len = cand.iter().map(Vec::len).max().unwrap_or(0);
            if cand_len as i64 + self.lo > self.hi() {
                return;
            }
            let back: Vec<Word> = if cand.len() == 1 && cand[0].is_empty() {
                shift.allowed_words(1)
            } else {
                cand.iter()
                    .flat_map(|w| shift.left_extensions(w, 1))
                    .collect()
            };
            if collapse(&shift, back) != self.words {
                return;
            }
            self.lo += 1;
            self.words = cand;
        }
    }
}

/// Sorted, prefix-free, with complete sibling groups merged into parents.
fn collapse(shift: &EdgeShift, words: Vec<Word>) -> Vec<Word> {
    let mut set = prefix_free(words);
    let k = shift.alphabet_size() as Symbol;
    loop {
        let mut parents: BTreeMap<&[Symbol], Vec<Symbol>> = BTreeMap::new();
        for w in &set {
            if let Some((&last, p)) = w.split_last() {
                parents.entry(p).or_default().push(last);
            }
        }
        let mut merged: Vec<Word> = Vec::new();
        for (p, kids) in parents {
            let allowed: Vec<Symbol> = (0..k).filter(|&a| shift.extends_right(p, a)).collect();
            if kids == allowed {
                merged.push(p.to_vec());
            }
        }
        if merged.is_empty() {
            return set;
        }
        let drop: BTreeSet<&[Symbol]> = merged.iter().map(Vec::as_slice).collect();
        let mut next: Vec<Word> = set
            .iter()
            .filter(|w| w.split_last().is_none_or(|(_, p)| !drop.contains(p)))
            .cloned()
            .collect();
        next.extend(merged);
        next.sort();
        set = next;
    }
}

fn prefix_free(mut words: Vec<Word>) -> Vec<Word> {
    words.sort();
    words.dedup();
    let mut out: Vec<Word> = Vec::with_capacity(words.len());
    for w in words {
        if out.last().is_some_and(|p| w.starts_with(p)) {
            continue;
        }
        out.push(w);
    }
    out
}

fn intersect_words(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut out = Vec::new();
    for w in a {
        if (0..=w.len()).any(|l| b.binary_search_by(|v| v.as_slice().cmp(&w[..l])).is_ok()) {
            out.push(w.clone());
            continue;
        }
        let start = b.partition_point(|v| v < w);
        out.extend(b[start..].iter().take_while(|v| v.starts_with(w)).cloned());
    }
    out
}

fn complement_rec(shift: &EdgeShift, words: &[Word], cur: &mut Word, out: &mut Vec<Word>) {
    if words.is_empty() {
        out.push(cur.clone());
        return;
    }
    if words.iter().any(|w| w.len() == cur.len()) {
        return;
    }
    let i = cur.len();
    for a in 0..shift.alphabet_size() as Symbol {
        if !shift.extends_right(cur, a) {
            continue;
        }
        let s = words.partition_point(|w| w[i] < a);
        let e = words.partition_point(|w| w[i] <= a);
        cur.push(a);
        complement_rec(shift, &words[s..e], cur, out);
        cur.pop();
    }
}

impl PartialEq for ClopenSet {
    fn eq(&self, other: &Self) -> bool {
        if self.lo == other.lo && self.words == other.words {
            return true;
        }
        self.is_subset(other) && other.is_subset(self)
    }
}

impl Eq for ClopenSet {}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        if self.is_full() {
            return f.write_str("*");
        }
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{}@{}", self.shift.format_word(w), self.lo)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet({self})")
    }
}
