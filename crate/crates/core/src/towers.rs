//! Kakutani–Rohlin refinements built by first return to nested sections.
//!
//! Level `n` refines level `n-1`: a point of the section `C_n` is followed
//! until it comes back to `C_n`, recording at each time the radius-`n`
//! central cell it sits in and the level-`n-1` floor it passes through.
//! Points with the same record form the base of one tower.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::clopen::{ClopenSet, Cylinder, Decision};
use crate::error::{Error, Result};
use crate::partial::{find_in, find_overlap, Cond};
use crate::section::is_complete_section;
use crate::shift::{EdgeShift, Symbol, Word};

/// One time step of an itinerary: the central cell of radius `n` and the
/// enclosing floor of the previous level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub cell: Word,
    pub prev_tower: usize,
    pub prev_floor: usize,
}

#[derive(Debug, Clone)]
pub struct Tower {
    pub base: ClopenSet,
    pub height: usize,
    /// One entry per floor.
    pub itinerary: Vec<Step>,
    /// Central cell of `σ^height(x)` for `x` in the base.
    pub landing: Word,
}

impl Tower {
    /// `σ^j(base)`.
    pub fn floor(&self, j: usize) -> ClopenSet {
        self.base.shift_image(j as i64)
    }

    /// Level-`n-1` towers traversed in order, one entry per traversal.
    pub fn visits(&self) -> Vec<usize> {
        self.itinerary
            .iter()
            .filter(|s| s.prev_floor == 0)
            .map(|s| s.prev_tower)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct KRLevel {
    pub index: usize,
    /// Radius of the central-cell partition used at this level.
    pub radius: usize,
    pub section: ClopenSet,
    pub towers: Vec<Tower>,
}

impl KRLevel {
    /// The single tower with base `X` and height 1.
    pub fn trivial(shift: &Arc<EdgeShift>) -> Self {
        let x = ClopenSet::full(shift);
        KRLevel {
            index: 0,
            radius: 0,
            section: x.clone(),
            towers: vec![Tower {
                base: x,
                height: 1,
                itinerary: vec![Step {
                    cell: Vec::new(),
                    prev_tower: 0,
                    prev_floor: 0,
                }],
                landing: Vec::new(),
            }],
        }
    }

    pub fn base_union(&self) -> ClopenSet {
        let shift = self.section.shift();
        let cyls: Vec<Cylinder> = self
            .towers
            .iter()
            .flat_map(|t| t.base.cylinders())
            .collect();
        ClopenSet::from_cylinders(shift, &cyls)
    }

    pub fn floor_count(&self) -> usize {
        self.towers.iter().map(|t| t.height).sum()
    }

    /// `(tower, floor) -> (tower, floor)` of the previous level.
    pub fn nesting(&self) -> Vec<Vec<(usize, usize)>> {
        self.towers
            .iter()
            .map(|t| {
                t.itinerary
                    .iter()
                    .map(|s| (s.prev_tower, s.prev_floor))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct KRRefinement {
    shift: Arc<EdgeShift>,
    levels: Vec<KRLevel>,
}

impl KRRefinement {
    /// Refinement consisting of the trivial level only.
    pub fn new(shift: &Arc<EdgeShift>) -> Self {
        KRRefinement {
            shift: shift.clone(),
            levels: vec![KRLevel::trivial(shift)],
        }
    }

    /// Wraps given levels without checking them; see [`verify_kr`].
    pub fn from_levels(shift: &Arc<EdgeShift>, levels: Vec<KRLevel>) -> Self {
        KRRefinement {
            shift: shift.clone(),
            levels,
        }
    }

    pub fn shift(&self) -> &Arc<EdgeShift> {
        &self.shift
    }

    pub fn levels(&self) -> &[KRLevel] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &KRLevel {
        &self.levels[n]
    }

    /// Index of the deepest level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn push_level(&mut self, level: KRLevel) {
        self.levels.push(level);
    }

    /// Refinement whose every level uses the section `X`.
    pub fn trivial(shift: &Arc<EdgeShift>, depth: usize) -> Result<Self> {
        let qs = QuasiSectionApprox::new(
            vec![ClopenSet::full(shift); depth],
            Provenance::UserSupplied,
        )?;
        build_kr_refinement(&qs, depth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    UserSupplied,
    BasicSet,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::UserSupplied => "user-supplied",
            Provenance::BasicSet => "basic-set",
        })
    }
}

/// Nested complete sections `A_1 ⊇ A_2 ⊇ ...`.
#[derive(Debug, Clone)]
pub struct QuasiSectionApprox {
    levels: Vec<ClopenSet>,
    provenance: Provenance,
}

impl QuasiSectionApprox {
    pub fn new(levels: Vec<ClopenSet>, provenance: Provenance) -> Result<Self> {
        for (i, a) in levels.iter().enumerate() {
            let rep = is_complete_section(a);
            if !rep.complete {
                return Err(not_complete(a, &rep));
            }
            if i > 0 && !a.is_subset(&levels[i - 1]) {
                return Err(Error::SectionNotNested(i + 1));
            }
        }
        Ok(QuasiSectionApprox { levels, provenance })
    }

    /// `A_1, A_2, ...` (index 0 holds `A_1`).
    pub fn levels(&self) -> &[ClopenSet] {
        &self.levels
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

fn not_complete(u: &ClopenSet, rep: &crate::section::CompletenessReport) -> Error {
    let shift = u.shift();
    let w = rep
        .witness_cycle
        .as_ref()
        .map(|o| format!("({})^inf avoids {u}", shift.format_word(o.word())))
        .unwrap_or_default();
    Error::NotCompleteSection(w)
}

/// `C_n`: the union of the pieces `P ∩ F` (`P` a radius-`radius` cell,
/// `F` a floor of `prev`) that meet `a`.
pub fn refinement_section(prev: &KRLevel, radius: usize, a: &ClopenSet) -> ClopenSet {
    let shift = a.shift();
    let mut out = ClopenSet::empty(shift);
    for t in &prev.towers {
        for j in 0..t.height {
            let f = t.floor(j);
            if !f.intersects(a) {
                continue;
            }
            let cells = f.intersection(a).cells_meeting(radius);
            let q = ClopenSet::from_words(shift, -(radius as i64), cells);
            out = out.union(&q.intersection(&f));
        }
    }
    out
}

/// Level `prev.index + 1` from a section contained in `prev`'s section.
pub fn build_kr_level(prev: &KRLevel, radius: usize, section: &ClopenSet) -> Result<KRLevel> {
    let rep = is_complete_section(section);
    if !rep.complete {
        return Err(not_complete(section, &rep));
    }
    if !section.is_subset(&prev.section) {
        return Err(Error::SectionNotNested(prev.index + 1));
    }
    construct(prev, radius, section, true, rep.forward_bound.unwrap_or(1))
}

/// First-return towers over an arbitrary complete section. Floors still
/// nest in `prev`; bases need not.
pub fn first_return_towers(prev: &KRLevel, radius: usize, section: &ClopenSet) -> Result<KRLevel> {
    let rep = is_complete_section(section);
    if !rep.complete {
        return Err(not_complete(section, &rep));
    }
    construct(prev, radius, section, false, rep.forward_bound.unwrap_or(1))
}

/// Levels `1..=depth` from the sections `A_1..A_depth`.
pub fn build_kr_refinement(qs: &QuasiSectionApprox, depth: usize) -> Result<KRRefinement> {
    let Some(first) = qs.levels().first() else {
        if depth == 0 {
            return Err(Error::InvalidParams(
                "empty quasi-section approximation".into(),
            ));
        }
        return Err(Error::InvalidParams(
            "depth exceeds available levels".into(),
        ));
    };
    if depth > qs.levels().len() {
        return Err(Error::InvalidParams(format!(
            "depth {depth} exceeds the {} available levels",
            qs.levels().len()
        )));
    }
    let mut r = KRRefinement::new(first.shift());
    for n in 1..=depth {
        let c = refinement_section(r.level(n - 1), n, &qs.levels()[n - 1]);
        let level = build_kr_level(r.level(n - 1), n, &c)?;
        r.push_level(level);
    }
    Ok(r)
}

/// `B_Ξ(n)`.
pub fn kr_base_sets(r: &KRRefinement, n: usize) -> ClopenSet {
    r.level(n).base_union()
}

/// Keeps the listed levels; nesting maps are composed across dropped ones.
pub fn telescope_kr(r: &KRRefinement, indices: &[usize]) -> Result<KRRefinement> {
    if indices.first() != Some(&0) {
        return Err(Error::BadIndices("indices must start at 0".into()));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndices(
            "indices must be strictly increasing".into(),
        ));
    }
    if *indices.last().unwrap() > r.depth() {
        return Err(Error::BadIndices(format!(
            "index {} exceeds depth {}",
            indices.last().unwrap(),
            r.depth()
        )));
    }
    let mut levels = vec![r.level(0).clone()];
    for w in indices.windows(2) {
        let (from, to) = (w[0], w[1]);
        let mut level = r.level(to).clone();
        level.index = levels.len();
        for t in &mut level.towers {
            for s in &mut t.itinerary {
                let (mut i, mut j) = (s.prev_tower, s.prev_floor);
                for k in (from + 1..to).rev() {
                    let st = &r.level(k).towers[i].itinerary[j];
                    (i, j) = (st.prev_tower, st.prev_floor);
                }
                s.prev_tower = i;
                s.prev_floor = j;
            }
        }
        levels.push(level);
    }
    Ok(KRRefinement::from_levels(&r.shift, levels))
}

// ---------------------------------------------------------------------------
// first-return construction

struct Ctx<'a> {
    shift: &'a EdgeShift,
    prev: &'a KRLevel,
    radius: i64,
    section: &'a ClopenSet,
    nested: bool,
    start_candidates: Vec<(usize, usize, ClopenSet)>,
    base_candidates: Vec<(usize, usize, ClopenSet)>,
    max_time: i64,
}

#[derive(Debug, Clone, Copy)]
enum Stage {
    Locate { all: bool },
    Member,
    Cell,
    Advance,
    Landing,
}

#[derive(Debug, Clone)]
struct Sim {
    t: i64,
    cur: (usize, usize),
    scan: usize,
    stage: Stage,
    steps: Vec<Step>,
    landing: Word,
}

enum Outcome {
    Need(i64),
    Done,
    Stuck(String),
}

struct Window {
    lo: i64,
    word: Word,
}

impl Window {
    fn get(&self, i: i64) -> Option<Symbol> {
        let k = i - self.lo;
        (k >= 0 && (k as usize) < self.word.len()).then(|| self.word[k as usize])
    }

    /// Radius-`r` cell of `σ^t x`; radius 0 is the trivial partition.
    fn central(&self, t: i64, r: i64) -> std::result::Result<Word, i64> {
        if r == 0 {
            return Ok(Vec::new());
        }
        (t - r..=t + r).map(|c| self.get(c).ok_or(c)).collect()
    }
}

impl Ctx<'_> {
    fn run(&self, sim: &mut Sim, win: &Window) -> Outcome {
        loop {
            match sim.stage {
                Stage::Locate { all } => {
                    let cands = if all {
                        &self.start_candidates
                    } else {
                        &self.base_candidates
                    };
                    let t = sim.t;
                    while sim.scan < cands.len() {
                        let (i, j, set) = &cands[sim.scan];
                        match set.decide(|c| win.get(c + t)) {
                            Decision::Yes => {
                                sim.cur = (*i, *j);
                                break;
                            }
                            Decision::No => sim.scan += 1,
                            Decision::Need(c) => return Outcome::Need(c + t),
                        }
                    }
                    if sim.scan == cands.len() {
                        return Outcome::Stuck(format!(
                            "point at time {} lies in no floor of level {}",
                            sim.t, self.prev.index
                        ));
                    }
                    sim.scan = 0;
                    sim.stage = if sim.t == 0 {
                        Stage::Cell
                    } else {
                        Stage::Member
                    };
                }
                Stage::Member => {
                    if self.nested && sim.cur.1 != 0 {
                        sim.stage = Stage::Cell;
                        continue;
                    }
                    let t = sim.t;
                    match self.section.decide(|c| win.get(c + t)) {
                        Decision::Yes => sim.stage = Stage::Landing,
                        Decision::No => sim.stage = Stage::Cell,
                        Decision::Need(c) => return Outcome::Need(c + t),
                    }
                }
                Stage::Cell => {
                    if sim.t > self.max_time {
                        return Outcome::Stuck("return time exceeds the section bound".into());
                    }
                    let cell = match win.central(sim.t, self.radius) {
                        Ok(w) => w,
                        Err(c) => return Outcome::Need(c),
                    };
                    sim.steps.push(Step {
                        cell,
                        prev_tower: sim.cur.0,
                        prev_floor: sim.cur.1,
                    });
                    sim.t += 1;
                    sim.stage = Stage::Advance;
                }
                Stage::Advance => {
                    let (i, j) = sim.cur;
                    if j + 1 < self.prev.towers[i].height {
                        sim.cur = (i, j + 1);
                        sim.stage = Stage::Member;
                    } else {
                        sim.stage = Stage::Locate { all: false };
                    }
                }
                Stage::Landing => {
                    match win.central(sim.t, self.radius) {
                        Ok(w) => sim.landing = w,
                        Err(c) => return Outcome::Need(c),
                    }
                    return Outcome::Done;
                }
            }
        }
    }

    /// Depth-first exploration of the cylinder `[word @ lo]`.
    fn explore(&self, lo: i64, word: Word) -> Result<Vec<(Cylinder, Vec<Step>, Word)>> {
        let start = Sim {
            t: 0,
            cur: (0, 0),
            scan: 0,
            stage: Stage::Locate { all: !self.nested },
            steps: Vec::new(),
            landing: Vec::new(),
        };
        let mut out = Vec::new();
        let mut stack = vec![(Window { lo, word }, start)];
        let k = self.shift.alphabet_size() as Symbol;
        while let Some((win, mut sim)) = stack.pop() {
            match self.run(&mut sim, &win) {
                Outcome::Done => {
                    out.push((
                        Cylinder {
                            word: win.word,
                            offset: win.lo,
                        },
                        sim.steps,
                        sim.landing,
                    ));
                }
                Outcome::Stuck(msg) => return Err(Error::InvalidRefinement(msg)),
                Outcome::Need(c) => {
                    // push in reverse so that smaller symbols are explored first
                    for a in (0..k).rev() {
                        let next = if win.word.is_empty() {
                            self.shift.is_allowed(&[a]).then(|| Window {
                                lo: c,
                                word: vec![a],
                            })
                        } else if c < win.lo {
                            self.shift.extends_left(a, &win.word).then(|| {
                                let mut w = Vec::with_capacity(win.word.len() + 1);
                                w.push(a);
                                w.extend_from_slice(&win.word);
                                Window {
                                    lo: win.lo - 1,
                                    word: w,
                                }
                            })
                        } else {
                            self.shift.extends_right(&win.word, a).then(|| {
                                let mut w = win.word.clone();
                                w.push(a);
                                Window {
                                    lo: win.lo,
                                    word: w,
                                }
                            })
                        };
                        if let Some(nw) = next {
                            stack.push((nw, sim.clone()));
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn construct(
    prev: &KRLevel,
    radius: usize,
    section: &ClopenSet,
    nested: bool,
    bound: usize,
) -> Result<KRLevel> {
    let shift = section.shift();
    let base_candidates: Vec<_> = prev
        .towers
        .iter()
        .enumerate()
        .map(|(i, t)| (i, 0, t.base.clone()))
        .collect();
    let start_candidates: Vec<_> = if nested {
        Vec::new()
    } else {
        prev.towers
            .iter()
            .enumerate()
            .flat_map(|(i, t)| (0..t.height).map(move |j| (i, j, t.floor(j))))
            .collect()
    };
    let ctx = Ctx {
        shift,
        prev,
        radius: radius as i64,
        section,
        nested,
        start_candidates,
        base_candidates,
        max_time: bound as i64,
    };
    let starts: Vec<(i64, Word)> = section
        .words()
        .iter()
        .map(|w| (section.lo(), w.clone()))
        .collect();
    let leaves: Vec<Vec<_>> = starts
        .into_par_iter()
        .map(|(lo, w)| ctx.explore(lo, w))
        .collect::<Result<_>>()?;

    let mut classes: BTreeMap<(Vec<Step>, Word), Vec<Cylinder>> = BTreeMap::new();
    for (cyl, steps, landing) in leaves.into_iter().flatten() {
        classes.entry((steps, landing)).or_default().push(cyl);
    }
    let towers = classes
        .into_par_iter()
        .map(|((itinerary, landing), cyls)| Tower {
            base: ClopenSet::from_cylinders(shift, &cyls),
            height: itinerary.len(),
            itinerary,
            landing,
        })
        .collect();
    Ok(KRLevel {
        index: prev.index + 1,
        radius,
        section: section.clone(),
        towers,
    })
}

// ---------------------------------------------------------------------------
// verification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Malformed,
    TrivialLevel,
    FloorsNotDisjoint,
    FloorsDoNotCover,
    FloorNesting,
    BaseNesting,
    TopImage,
    Mesh,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Malformed => "malformed level",
            ViolationKind::TrivialLevel => "level 0 is not the trivial tower",
            ViolationKind::FloorsNotDisjoint => "floors not disjoint",
            ViolationKind::FloorsDoNotCover => "floors do not cover X",
            ViolationKind::FloorNesting => "floor nesting",
            ViolationKind::BaseNesting => "base nesting",
            ViolationKind::TopImage => "top images differ from bases",
            ViolationKind::Mesh => "mesh",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrViolation {
    pub level: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for KrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {}: {} ({})", self.level, self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrReport {
    pub levels_checked: usize,
    pub violation: Option<KrViolation>,
}

impl KrReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks the refinement axioms level by level and reports the first
/// violation: partition, floor nesting, base nesting, the top-image
/// identity, then the mesh condition (including `σ^height` of each base).
pub fn verify_kr(r: &KRRefinement) -> KrReport {
    for (n, level) in r.levels().iter().enumerate() {
        if let Err(v) = verify_level(r, n, level) {
            return KrReport {
                levels_checked: n,
                violation: Some(v),
            };
        }
    }
    KrReport {
        levels_checked: r.levels().len(),
        violation: None,
    }
}

fn verify_level(
    r: &KRRefinement,
    n: usize,
    level: &KRLevel,
) -> std::result::Result<(), KrViolation> {
    let shift = r.shift();
    let fail = |kind, detail: String| {
        Err(KrViolation {
            level: n,
            kind,
            detail,
        })
    };

    if level.towers.is_empty() {
        return fail(ViolationKind::Malformed, "no towers".into());
    }
    for (i, t) in level.towers.iter().enumerate() {
        if t.height == 0 || t.itinerary.len() != t.height {
            return fail(
                ViolationKind::Malformed,
                format!("tower {i}: itinerary length"),
            );
        }
        if t.base.is_empty() {
            return fail(ViolationKind::Malformed, format!("tower {i}: empty base"));
        }
        if n > 0 {
            let prev = &r.level(n - 1).towers;
            for s in &t.itinerary {
                if s.prev_tower >= prev.len() || s.prev_floor >= prev[s.prev_tower].height {
                    return fail(
                        ViolationKind::Malformed,
                        format!("tower {i}: bad nesting entry"),
                    );
                }
            }
        }
    }
    if n == 0 {
        let t = &level.towers[0];
        if level.towers.len() != 1 || !t.base.is_full() || t.height != 1 {
            return fail(
                ViolationKind::TrivialLevel,
                "expected one tower with base X".into(),
            );
        }
    }

    // partition
    let bases: Vec<&ClopenSet> = level.towers.iter().map(|t| &t.base).collect();
    if let Some((a, b, _)) = find_overlap(shift, &bases) {
        return fail(
            ViolationKind::FloorsNotDisjoint,
            format!("bases of towers {a} and {b} meet"),
        );
    }
    let c = level.base_union();
    let hit = level
        .towers
        .par_iter()
        .enumerate()
        .find_map_first(|(i, t)| {
            (1..t.height)
                .find(|&j| find_in(shift, &t.base, &[Cond::inside(&c, j as i64)]).is_some())
                .map(|j| (i, j))
        });
    if let Some((i, j)) = hit {
        return fail(
            ViolationKind::FloorsNotDisjoint,
            format!("floor {j} of tower {i} meets a base"),
        );
    }
    if !is_complete_section(&c).complete {
        return fail(
            ViolationKind::FloorsDoNotCover,
            "bases are not a complete section".into(),
        );
    }

    if n > 0 {
        let prev = r.level(n - 1);
        let hit = level
            .towers
            .par_iter()
            .enumerate()
            .find_map_first(|(i, t)| {
                t.itinerary.iter().enumerate().find_map(|(j, s)| {
                    let outer = &prev.towers[s.prev_tower].base;
                    let lag = j as i64 - s.prev_floor as i64;
                    find_in(shift, &t.base, &[Cond::outside(outer, lag)])
                        .map(|_| (i, j, s.prev_floor, s.prev_tower))
                })
            });
        if let Some((i, j, pf, pt)) = hit {
            return fail(
                ViolationKind::FloorNesting,
                format!("floor {j} of tower {i} is not inside floor {pf} of tower {pt}"),
            );
        }
        for (i, t) in level.towers.iter().enumerate() {
            let s = &t.itinerary[0];
            let inside = |k: usize| t.base.is_subset(&prev.towers[k].base);
            let ok = if s.prev_floor == 0 {
                inside(s.prev_tower)
            } else {
                (0..prev.towers.len()).any(inside)
            };
            if !ok {
                return fail(
                    ViolationKind::BaseNesting,
                    format!("base of tower {i} is inside no base of level {}", n - 1),
                );
            }
        }
    }

    // with disjoint floors and a complete C this makes the floors a
    // partition whose top images are exactly C
    let hit = level
        .towers
        .par_iter()
        .enumerate()
        .find_map_first(|(i, t)| {
            let h = t.height as i64;
            find_in(shift, &t.base, &[Cond::outside(&c, h)]).map(|_| i)
        });
    if let Some(i) = hit {
        return fail(
            ViolationKind::TopImage,
            format!("the top image of tower {i} leaves the bases"),
        );
    }

    let rad = level.radius as i64;
    let width = if level.radius == 0 {
        0
    } else {
        2 * level.radius + 1
    };
    let hit = level
        .towers
        .par_iter()
        .enumerate()
        .find_map_first(|(i, t)| {
            let cells = t
                .itinerary
                .iter()
                .map(|s| &s.cell)
                .chain(std::iter::once(&t.landing));
            for (j, cell) in cells.enumerate() {
                if cell.len() != width {
                    return Some((ViolationKind::Malformed, format!("tower {i}: cell width")));
                }
                let set = if cell.is_empty() {
                    ClopenSet::full(shift)
                } else {
                    match ClopenSet::cylinder(shift, cell, -rad) {
                        Ok(s) => s,
                        Err(_) => {
                            return Some((
                                ViolationKind::Mesh,
                                format!("tower {i}: cell does not occur"),
                            ))
                        }
                    }
                };
                if find_in(shift, &t.base, &[Cond::outside(&set, j as i64)]).is_some() {
                    return Some((
                        ViolationKind::Mesh,
                        format!("image {j} of tower {i} leaves its radius-{rad} cell"),
                    ));
                }
            }
            None
        });
    if let Some((kind, detail)) = hit {
        return fail(kind, detail);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<EdgeShift> {
        Arc::new(EdgeShift::new(&["0", "1"], &["11"]).unwrap())
    }

    fn full2() -> Arc<EdgeShift> {
        Arc::new(EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap())
    }

    #[test]
    fn golden_level_one() {
        let g = golden();
        let l0 = KRLevel::trivial(&g);
        let c = ClopenSet::parse(&g, "0@0").unwrap();
        let l1 = build_kr_level(&l0, 1, &c).unwrap();
        let mut heights: Vec<usize> = l1.towers.iter().map(|t| t.height).collect();
        heights.sort();
        heights.dedup();
        assert_eq!(heights, vec![1, 2]);
        assert_eq!(l1.base_union(), c);
        let r = KRRefinement::from_levels(&g, vec![l0, l1]);
        assert!(verify_kr(&r).is_ok(), "{:?}", verify_kr(&r));
    }

    #[test]
    fn whole_space_section() {
        let f = full2();
        let l0 = KRLevel::trivial(&f);
        let x = ClopenSet::full(&f);
        let l1 = build_kr_level(&l0, 0, &x).unwrap();
        assert_eq!(l1.towers.len(), 1);
        assert_eq!(l1.towers[0].height, 1);
        assert!(l1.towers[0].base.is_full());
    }

    #[test]
    fn incomplete_and_unnested() {
        let f = full2();
        let l0 = KRLevel::trivial(&f);
        let u = ClopenSet::parse(&f, "1@0").unwrap();
        assert!(matches!(
            build_kr_level(&l0, 1, &u),
            Err(Error::NotCompleteSection(_))
        ));
        let g = golden();
        let l0 = KRLevel::trivial(&g);
        let l1 = build_kr_level(&l0, 1, &ClopenSet::parse(&g, "0@0").unwrap()).unwrap();
        let shifted = ClopenSet::parse(&g, "0@1").unwrap();
        assert_eq!(
            build_kr_level(&l1, 2, &shifted).unwrap_err(),
            Error::SectionNotNested(2)
        );
    }

    #[test]
    fn negative_controls() {
        let g = golden();
        let l0 = KRLevel::trivial(&g);
        let l1 = build_kr_level(&l0, 1, &ClopenSet::parse(&g, "0@0").unwrap()).unwrap();
        let l2 = first_return_towers(&l1, 2, &ClopenSet::parse(&g, "0@1").unwrap()).unwrap();
        let r = KRRefinement::from_levels(&g, vec![l0.clone(), l1.clone(), l2]);
        let v = verify_kr(&r).violation.unwrap();
        assert_eq!(v.kind, ViolationKind::BaseNesting, "{v}");

        let mut bad = l1.clone();
        let extra = bad.towers[0].clone();
        bad.towers.push(extra);
        let r = KRRefinement::from_levels(&g, vec![l0, bad]);
        assert_eq!(
            verify_kr(&r).violation.unwrap().kind,
            ViolationKind::FloorsNotDisjoint
        );
    }

    #[test]
    fn two_levels_and_telescope() {
        let g = golden();
        let a = ClopenSet::parse(&g, "0@0").unwrap();
        let qs = QuasiSectionApprox::new(vec![a.clone(); 3], Provenance::UserSupplied).unwrap();
        let r = build_kr_refinement(&qs, 3).unwrap();
        assert!(verify_kr(&r).is_ok(), "{:?}", verify_kr(&r));
        for n in 1..=3 {
            assert_eq!(kr_base_sets(&r, n), a);
        }
        let t = telescope_kr(&r, &[0, 3]).unwrap();
        assert!(verify_kr(&t).is_ok(), "{:?}", verify_kr(&t));
        assert_eq!(t.depth(), 1);
        assert!(telescope_kr(&r, &[1, 2]).is_err());
        assert!(telescope_kr(&r, &[0, 2, 2]).is_err());
        assert!(telescope_kr(&r, &[0, 4]).is_err());
    }
}
