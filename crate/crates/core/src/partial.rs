//! Lazily explored points: only the coordinates a query asks for are fixed.
//!
//! Set relations (containment, disjointness, overlap of many sets) are
//! decided by depth-first search over partial points, branching on the
//! coordinate the first undecided membership test needs. A partial point is
//! kept only while some point of the shift agrees with it.

use crate::clopen::{ClopenSet, Decision};
use crate::shift::{EdgeShift, Symbol, Word};

/// A point with finitely many known coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialPoint {
    lo: i64,
    cells: Vec<Option<Symbol>>,
}

impl PartialPoint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Coordinates `lo ..` spell `word`.
    pub fn from_word(lo: i64, word: &[Symbol]) -> Self {
        PartialPoint {
            lo,
            cells: word.iter().map(|&a| Some(a)).collect(),
        }
    }

    pub fn get(&self, i: i64) -> Option<Symbol> {
        let k = i - self.lo;
        if k < 0 || k as usize >= self.cells.len() {
            return None;
        }
        self.cells[k as usize]
    }

    pub fn set(&mut self, i: i64, a: Symbol) {
        if self.cells.is_empty() {
            self.lo = i;
            self.cells.push(Some(a));
            return;
        }
        if i < self.lo {
            let pad = (self.lo - i) as usize;
            let mut v = vec![None; pad];
            v.extend_from_slice(&self.cells);
            self.cells = v;
            self.lo = i;
        }
        let k = (i - self.lo) as usize;
        if k >= self.cells.len() {
            self.cells.resize(k + 1, None);
        }
        self.cells[k] = Some(a);
    }

    pub fn with(&self, i: i64, a: Symbol) -> Self {
        let mut p = self.clone();
        p.set(i, a);
        p
    }

    /// Known coordinates as `(first, symbols)` with `None` for gaps.
    pub fn span(&self) -> (i64, &[Option<Symbol>]) {
        (self.lo, &self.cells)
    }

    /// Fills every gap with the least symbols that keep the point allowed,
    /// returning the contiguous word and its first coordinate.
    pub fn complete(&self, shift: &EdgeShift) -> Option<(i64, Word)> {
        let n = shift.states().len();
        // backward pass: which states can finish the remaining pattern
        let mut ok = vec![vec![false; n]; self.cells.len() + 1];
        ok[self.cells.len()] = vec![true; n];
        for t in (0..self.cells.len()).rev() {
            for s in 0..n {
                ok[t][s] = symbols(shift, self.cells[t])
                    .any(|a| shift.step(s, a).is_some_and(|s2| ok[t + 1][s2]));
            }
        }
        let mut s = (0..n).find(|&s| ok[0][s])?;
        let mut word = Vec::with_capacity(self.cells.len());
        for t in 0..self.cells.len() {
            let a = symbols(shift, self.cells[t])
                .find(|&a| shift.step(s, a).is_some_and(|s2| ok[t + 1][s2]))?;
            word.push(a);
            s = shift.step(s, a).unwrap();
        }
        Some((self.lo, word))
    }

    /// Whether some point of the shift agrees with every known coordinate.
    pub fn consistent(&self, shift: &EdgeShift) -> bool {
        let n = shift.states().len();
        let mut cur = vec![true; n];
        let mut next = vec![false; n];
        for c in &self.cells {
            next.iter_mut().for_each(|b| *b = false);
            let mut any = false;
            for s in (0..n).filter(|&s| cur[s]) {
                for a in symbols(shift, *c) {
                    if let Some(t) = shift.step(s, a) {
                        next[t] = true;
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        true
    }
}

fn symbols(shift: &EdgeShift, c: Option<Symbol>) -> impl Iterator<Item = Symbol> {
    let k = shift.alphabet_size() as Symbol;
    let (lo, hi) = match c {
        Some(a) => (a, a + 1),
        None => (0, k),
    };
    lo..hi
}

/// The requirement `(σ^time x ∈ set) == member`.
#[derive(Debug, Clone, Copy)]
pub struct Cond<'a> {
    pub set: &'a ClopenSet,
    pub time: i64,
    pub member: bool,
}

impl<'a> Cond<'a> {
    pub fn inside(set: &'a ClopenSet, time: i64) -> Self {
        Cond {
            set,
            time,
            member: true,
        }
    }

    pub fn outside(set: &'a ClopenSet, time: i64) -> Self {
        Cond {
            set,
            time,
            member: false,
        }
    }

    fn decide(&self, p: &PartialPoint) -> Decision {
        match self.set.decide(|c| p.get(c + self.time)) {
            Decision::Need(c) => Decision::Need(c + self.time),
            d => d,
        }
    }
}

/// A point meeting all conditions, if one exists.
pub fn find_point(shift: &EdgeShift, conds: &[Cond]) -> Option<PartialPoint> {
    find_from(shift, conds, PartialPoint::new())
}

/// As [`find_point`], among points extending `start`.
pub fn find_from(shift: &EdgeShift, conds: &[Cond], start: PartialPoint) -> Option<PartialPoint> {
    if !start.consistent(shift) {
        return None;
    }
    search(shift, conds, start)
}

fn search(shift: &EdgeShift, conds: &[Cond], p: PartialPoint) -> Option<PartialPoint> {
    for c in conds {
        match c.decide(&p) {
            Decision::Yes if c.member => {}
            Decision::No if !c.member => {}
            Decision::Yes | Decision::No => return None,
            Decision::Need(i) => {
                for a in 0..shift.alphabet_size() as Symbol {
                    let q = p.with(i, a);
                    if q.consistent(shift) {
                        if let Some(found) = search(shift, conds, q) {
                            return Some(found);
                        }
                    }
                }
                return None;
            }
        }
    }
    Some(p)
}

/// A point of `set` meeting all conditions; the search starts from each
/// word of `set` instead of rediscovering them coordinate by coordinate.
pub fn find_in(shift: &EdgeShift, set: &ClopenSet, conds: &[Cond]) -> Option<PartialPoint> {
    set.words()
        .iter()
        .find_map(|w| find_from(shift, conds, PartialPoint::from_word(set.lo(), w)))
}

/// A point lying in two of the given sets, with their indices.
pub fn find_overlap(
    shift: &EdgeShift,
    sets: &[&ClopenSet],
) -> Option<(usize, usize, PartialPoint)> {
    let all: Vec<usize> = (0..sets.len()).collect();
    overlap(shift, sets, &all, None, PartialPoint::new())
}

/// `open` lists the sets still undecided at `p`; `yes` is a set already
/// known to contain it. Sets that exclude `p` are dropped for the subtree.
fn overlap(
    shift: &EdgeShift,
    sets: &[&ClopenSet],
    open: &[usize],
    mut yes: Option<usize>,
    p: PartialPoint,
) -> Option<(usize, usize, PartialPoint)> {
    let mut still = Vec::with_capacity(open.len());
    let mut need: Option<i64> = None;
    for &i in open {
        match sets[i].decide(|c| p.get(c)) {
            Decision::Yes => match yes {
                Some(first) => return Some((first.min(i), first.max(i), p)),
                None => yes = Some(i),
            },
            Decision::No => {}
            Decision::Need(c) => {
                still.push(i);
                need.get_or_insert(c);
            }
        }
    }
    if still.len() + usize::from(yes.is_some()) < 2 {
        return None;
    }
    let c = need.expect("an undecided set remains");
    for a in 0..shift.alphabet_size() as Symbol {
        let q = p.with(c, a);
        if q.consistent(shift) {
            if let Some(found) = overlap(shift, sets, &still, yes, q) {
                return Some(found);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn sparse_consistency() {
        let g = EdgeShift::new(&["0", "1"], &["11"]).unwrap();
        let p = PartialPoint::new().with(0, 1).with(1, 1);
        assert!(!p.consistent(&g));
        let q = PartialPoint::new().with(0, 1).with(2, 1);
        assert!(q.consistent(&g));
        assert_eq!(q.complete(&g), Some((0, vec![1, 0, 1])));
        let t = EdgeShift::new(&["0", "1"], &["01", "10"]).unwrap();
        assert!(!PartialPoint::new().with(0, 0).with(40, 1).consistent(&t));
    }

    #[test]
    fn far_apart_conditions() {
        let f = Arc::new(EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap());
        let a = ClopenSet::parse(&f, "0@0").unwrap();
        let b = ClopenSet::parse(&f, "1@0").unwrap();
        let p = find_point(&f, &[Cond::inside(&a, 0), Cond::inside(&b, 30)]).unwrap();
        assert_eq!(p.get(0), Some(0));
        assert_eq!(p.get(30), Some(1));
        assert!(find_point(&f, &[Cond::inside(&a, 0), Cond::inside(&b, 0)]).is_none());
    }

    #[test]
    fn overlaps() {
        let f = Arc::new(EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap());
        let sets: Vec<ClopenSet> = ["00@0", "01@0", "1@0"]
            .iter()
            .map(|t| ClopenSet::parse(&f, t).unwrap())
            .collect();
        let refs: Vec<&ClopenSet> = sets.iter().collect();
        assert!(find_overlap(&f, &refs).is_none());
        let more = ClopenSet::parse(&f, "1@1").unwrap();
        let mut refs2 = refs.clone();
        refs2.push(&more);
        let (i, j, _) = find_overlap(&f, &refs2).unwrap();
        assert_eq!((i, j), (1, 3));
    }
}
