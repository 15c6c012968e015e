//! Decision procedures for the closing property, periodicity regulation,
//! decisiveness and dense aperiodicity.
//!
//! Every verdict records the depth it was reached at. `Holds` and `Fails`
//! come with data that can be checked again from the inputs; `Unknown` is
//! returned when the available levels do not settle the question.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bratteli::{min_max_subdiagrams, OrderedBratteliDiagram, StationaryPath};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::shift::{is_primitive, EdgeShift, PeriodicPoint, Symbol, Word};
use crate::towers::{KRRefinement, QuasiSectionApprox, Tower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An infinite path of a stationary diagram, by its vertex cycle.
    Path {
        cycle: Vec<String>,
        note: String,
    },
    Tower {
        level: usize,
        tower: usize,
        note: String,
    },
    Orbit {
        word: String,
        note: String,
    },
    Cylinder {
        set: String,
        note: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: String,
    pub verdict: Verdict,
    pub depth: usize,
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    fn new(property: &str, verdict: Verdict, depth: usize, witness: Option<Witness>) -> Self {
        PropertyVerdict {
            property: property.to_string(),
            verdict,
            depth,
            witness,
        }
    }
}

/// How `ψ` behaves near the max paths of a stationary diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub max_paths: Vec<StationaryPath>,
    pub min_paths: Vec<StationaryPath>,
    /// Per max path, the min paths that are limits of `ψ(q)` as non-max
    /// paths `q` approach it. Empty for isolated max paths.
    pub limits: Vec<BTreeSet<usize>>,
}

impl Extension {
    /// The only bijection `E_max -> E_min` continuous with `ψ`, if there
    /// is exactly one. `Err` names the offending max path.
    pub fn forced_map(&self) -> std::result::Result<Vec<usize>, (Option<usize>, String)> {
        let mut map = vec![None; self.max_paths.len()];
        let mut used = BTreeSet::new();
        for (i, l) in self.limits.iter().enumerate() {
            if l.len() > 1 {
                return Err((Some(i), "successors accumulate on several min paths".into()));
            }
            if let Some(&j) = l.first() {
                if !used.insert(j) {
                    return Err((Some(i), "two max paths share their limit".into()));
                }
                map[i] = Some(j);
            }
        }
        let free_max: Vec<usize> = (0..map.len()).filter(|&i| map[i].is_none()).collect();
        let free_min: Vec<usize> = (0..self.min_paths.len())
            .filter(|j| !used.contains(j))
            .collect();
        if free_max.len() != free_min.len() {
            return Err((
                free_max.first().copied(),
                format!(
                    "{} unmatched max paths against {} min paths",
                    free_max.len(),
                    free_min.len()
                ),
            ));
        }
        if free_max.len() > 1 {
            return Err((
                Some(free_max[0]),
                "isolated max paths can be permuted".into(),
            ));
        }
        if let (Some(&i), Some(&j)) = (free_max.first(), free_min.first()) {
            map[i] = Some(j);
        }
        Ok(map.into_iter().map(Option::unwrap).collect())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Computes [`Extension`] exactly; `None` unless the diagram is stationary.
///
/// A non-max path `q` agreeing with the max path `X` up to level `M`
/// climbs by max edges from `X`'s vertex at `M` and then takes a non-max
/// edge `f`. `ψ(q)` agrees below `f` with the min path into the source of
/// the edge after `f`, whose vertex at level 1 is an iterate of the min
/// source map. The climb is tracked modulo the period of that map.
pub fn stationary_extension(d: &OrderedBratteliDiagram) -> Option<Extension> {
    if !d.is_stationary() {
        return None;
    }
    let info = min_max_subdiagrams(d);
    let max_paths = info.max_paths?;
    let min_paths = info.min_paths?;
    let es = d.edges(2);
    let nv = d.vertices(2).len();
    let mn: Vec<usize> = info.min_edges[2].iter().map(|&e| es[e].source).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, e) in es.iter().enumerate() {
        out[e.source].push(i);
    }
    let next_edge = |e: usize| -> Option<usize> {
        let inc = d.incoming(2, es[e].range);
        let pos = inc.iter().position(|&x| x == e)?;
        inc.get(pos + 1).copied()
    };
    let period = min_paths
        .iter()
        .map(|p| p.cycle.len())
        .fold(1, |a, b| a / gcd(a, b) * b);
    let iterate = |mut v: usize, t: usize| {
        for _ in 0..t {
            v = mn[v];
        }
        v
    };
    let level = nv + 1;
    let limits = max_paths
        .iter()
        .map(|x| {
            let start = x.cycle[(level - 1) % x.cycle.len()];
            let mut seen = BTreeSet::new();
            let mut stack = vec![(start, 0usize)];
            let mut lim = BTreeSet::new();
            while let Some((z, j)) = stack.pop() {
                if !seen.insert((z, j)) {
                    continue;
                }
                for &e in &out[z] {
                    match next_edge(e) {
                        None => stack.push((es[e].range, (j + 1) % period)),
                        Some(s) => {
                            let y = iterate(es[s].source, level - 1 + j);
                            let k = min_paths.iter().position(|p| p.cycle[0] == y);
                            lim.insert(k.expect("iterates past the transient are cyclic"));
                        }
                    }
                }
            }
            lim
        })
        .collect();
    Some(Extension {
        max_paths,
        min_paths,
        limits,
    })
}

fn path_witness(d: &OrderedBratteliDiagram, p: &StationaryPath, note: String) -> Witness {
    Witness::Path {
        cycle: p.cycle.iter().map(|&v| d.vertices(1)[v].clone()).collect(),
        note,
    }
}

/// Decisiveness of a stationary diagram: `ψ` extends to exactly one
/// homeomorphism. With `continuous`, isolated max paths are also ruled
/// out. Non-stationary diagrams give `Unknown`.
pub fn check_decisive(d: &OrderedBratteliDiagram, continuous: bool) -> PropertyVerdict {
    let name = if continuous {
        "continuously_decisive"
    } else {
        "decisive"
    };
    let depth = d.depth();
    let Some(ext) = stationary_extension(d) else {
        return PropertyVerdict::new(name, Verdict::Unknown, depth, None);
    };
    if let Err((i, note)) = ext.forced_map() {
        let w = i.map(|i| path_witness(d, &ext.max_paths[i], note));
        return PropertyVerdict::new(name, Verdict::Fails, depth, w);
    }
    if continuous {
        if let Some(i) = ext.limits.iter().position(BTreeSet::is_empty) {
            let w = path_witness(d, &ext.max_paths[i], "isolated max path".into());
            return PropertyVerdict::new(name, Verdict::Fails, depth, Some(w));
        }
    }
    PropertyVerdict::new(name, Verdict::Holds, depth, None)
}

/// Symbols at coordinates `0..height` of every point of the base.
fn base_word(t: &Tower) -> Option<Word> {
    t.itinerary
        .iter()
        .map(|s| (!s.cell.is_empty()).then(|| s.cell[s.cell.len() / 2]))
        .collect()
}

/// True when `w^∞` is a point of least period `|w|` lying in the base.
fn carries_cycle(shift: &EdgeShift, t: &Tower) -> Option<bool> {
    let w = base_word(t)?;
    Some(
        is_primitive(&w)
            && shift.cycle_allowed(&w)
            && t.base.contains_point(&PeriodicPoint::from_word(&w)),
    )
}

/// Refinement data used to test constant tails through their towers.
#[derive(Debug, Clone, Copy)]
pub struct Coding<'a> {
    pub refinement: &'a KRRefinement,
    /// Largest period searched for points contradicting a tail.
    pub period_bound: usize,
}

/// The closing property up to `depth`.
///
/// With a coding, every constant tail reaching level `depth` is tested on
/// its top tower of height `h`: it is resolved when the tower carries
/// `w^∞` for its base word `w`, and it fails when its base contains a
/// periodic point of some period in `(h, period_bound]`. Tails with
/// neither kind of point are still shrinking and are not counted against
/// the property.
///
/// Without a coding, stationary diagrams are decided exactly through the
/// unique continuous extension of `ψ`; otherwise the verdict is `Unknown`.
pub fn check_closing(
    d: &OrderedBratteliDiagram,
    coding: Option<Coding<'_>>,
    depth: usize,
) -> PropertyVerdict {
    const NAME: &str = "closing";
    let depth = depth.min(d.depth());
    match coding {
        Some(c) => closing_by_towers(d, c, depth),
        None => match stationary_extension(d) {
            Some(ext) => closing_stationary(d, &ext),
            None => PropertyVerdict::new(NAME, Verdict::Unknown, depth, None),
        },
    }
}

fn closing_by_towers(d: &OrderedBratteliDiagram, c: Coding<'_>, depth: usize) -> PropertyVerdict {
    const NAME: &str = "closing";
    let r = c.refinement;
    if depth == 0 || depth > r.depth() || r.level(depth).towers.len() != d.vertices(depth).len() {
        return PropertyVerdict::new(NAME, Verdict::Unknown, depth, None);
    }
    let shift = r.shift();
    let orbits = shift.periodic_orbits(c.period_bound);
    for (v, t) in r.level(depth).towers.iter().enumerate() {
        if d.incoming(depth, v).len() != 1 {
            continue;
        }
        if carries_cycle(shift, t) == Some(true) {
            continue;
        }
        for o in orbits.iter().filter(|o| o.period() > t.height) {
            if o.points().iter().any(|p| t.base.contains_point(p)) {
                let note = format!(
                    "constant tail of height {} holds a point of period {}",
                    t.height,
                    o.period()
                );
                let w = Witness::Tower {
                    level: depth,
                    tower: v,
                    note: format!("{note}: ({})^inf", shift.format_word(o.word())),
                };
                return PropertyVerdict::new(NAME, Verdict::Fails, depth, Some(w));
            }
        }
    }
    PropertyVerdict::new(NAME, Verdict::Holds, depth, None)
}

/// Constant paths of a stationary diagram run around cycles of the
/// single-edge source map; each forces `ψ` to send the max path along the
/// cycle to the min path along the same cycle.
fn closing_stationary(d: &OrderedBratteliDiagram, ext: &Extension) -> PropertyVerdict {
    const NAME: &str = "closing";
    let depth = d.depth();
    let single: Vec<Option<usize>> = (0..d.vertices(2).len())
        .map(|v| match d.incoming(2, v) {
            [e] => Some(d.edges(2)[*e].source),
            _ => None,
        })
        .collect();
    let on_cycle = |v: usize| {
        let mut x = v;
        for _ in 0..single.len() {
            match single[x] {
                Some(y) if y == v => return true,
                Some(y) => x = y,
                None => return false,
            }
        }
        false
    };
    let forced = ext.forced_map().ok();
    let mut unknown = None;
    for v in (0..single.len()).filter(|&v| on_cycle(v)) {
        let xi = ext.max_paths.iter().position(|p| p.cycle[0] == v);
        let ni = ext.min_paths.iter().position(|p| p.cycle[0] == v);
        let (Some(xi), Some(ni)) = (xi, ni) else {
            continue;
        };
        let image = match (&forced, ext.limits[xi].len()) {
            (_, 1) => ext.limits[xi].first().copied(),
            (Some(m), _) => Some(m[xi]),
            (None, _) => None,
        };
        match image {
            Some(j) if j == ni => {}
            Some(_) => {
                let w = path_witness(
                    d,
                    &ext.max_paths[xi],
                    "the constant path does not close up".into(),
                );
                return PropertyVerdict::new(NAME, Verdict::Fails, depth, Some(w));
            }
            None => {
                unknown.get_or_insert(xi);
            }
        }
    }
    match unknown {
        Some(xi) => {
            let w = path_witness(
                d,
                &ext.max_paths[xi],
                "image of the max path is not determined".into(),
            );
            PropertyVerdict::new(NAME, Verdict::Unknown, depth, Some(w))
        }
        None => PropertyVerdict::new(NAME, Verdict::Holds, depth, None),
    }
}

/// For every level `n <= l.len()` and tower of height `h <= l[n-1]`, the
/// tower must hold a periodic orbit of least period `h`. Only `w^∞`, `w`
/// the base word, can be such an orbit.
pub fn check_periodicity_regulated(r: &KRRefinement, l: &[usize]) -> Result<PropertyVerdict> {
    const NAME: &str = "periodicity_regulated";
    if l.first() == Some(&0) || l.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidParams(
            "the period sequence must be positive and strictly increasing".into(),
        ));
    }
    let top = l.len().min(r.depth());
    for n in 1..=top {
        for (i, t) in r.level(n).towers.iter().enumerate() {
            if t.height <= l[n - 1] && carries_cycle(r.shift(), t) != Some(true) {
                let w = Witness::Tower {
                    level: n,
                    tower: i,
                    note: format!("no periodic orbit of least period {}", t.height),
                };
                return Ok(PropertyVerdict::new(NAME, Verdict::Fails, n, Some(w)));
            }
        }
    }
    Ok(PropertyVerdict::new(NAME, Verdict::Holds, top, None))
}

/// Words of length `max(memory, 1)` joined by overlaps.
struct WordGraph {
    words: Vec<Word>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl WordGraph {
    fn new(shift: &EdgeShift) -> Self {
        let len = shift.memory().max(1);
        let words = shift.allowed_words(len);
        let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut out = vec![Vec::new(); words.len()];
        let mut inc = vec![Vec::new(); words.len()];
        for (i, w) in words.iter().enumerate() {
            for a in 0..shift.alphabet_size() as Symbol {
                if !shift.extends_right(w, a) {
                    continue;
                }
                let mut v = w[1..].to_vec();
                v.push(a);
                if let Some(&j) = index.get(&v) {
                    out[i].push(j);
                    inc[j].push(i);
                }
            }
        }
        WordGraph { words, out, inc }
    }

    /// Every node reachable through `adj` has exactly one successor.
    fn unbranched(adj: &[Vec<usize>], s: usize) -> bool {
        let mut seen = BTreeSet::new();
        let mut x = s;
        while seen.insert(x) {
            match adj[x].as_slice() {
                [y] => x = *y,
                _ => return false,
            }
        }
        true
    }

    /// The symbols read along the cycle through `s`, when `[s]` holds
    /// nothing but the orbit of that cycle.
    fn isolated_cycle(&self, s: usize) -> Option<Word> {
        if !Self::unbranched(&self.out, s) || !Self::unbranched(&self.inc, s) {
            return None;
        }
        let mut cycle = Vec::new();
        let mut x = s;
        loop {
            cycle.push(*self.words[x].last().unwrap());
            x = self.out[x][0];
            if x == s {
                break;
            }
            if cycle.len() > self.words.len() {
                return None;
            }
        }
        Some(cycle)
    }
}

/// Aperiodic points are dense unless some cylinder holds a single
/// periodic orbit, which happens exactly when a word node admits one
/// forward and one backward continuation, both running around a cycle
/// through it.
pub fn check_densely_aperiodic(shift: &Arc<EdgeShift>) -> PropertyVerdict {
    const NAME: &str = "densely_aperiodic";
    let g = WordGraph::new(shift);
    let len = shift.memory().max(1);
    for s in 0..g.words.len() {
        if let Some(cycle) = g.isolated_cycle(s) {
            let set = ClopenSet::from_words(shift, 0, vec![g.words[s].clone()]);
            let w = Witness::Cylinder {
                set: set.to_string(),
                note: format!("only the orbit of ({})^inf", shift.format_word(&cycle)),
            };
            return PropertyVerdict::new(NAME, Verdict::Fails, len, Some(w));
        }
    }
    PropertyVerdict::new(NAME, Verdict::Holds, len, None)
}

/// Removes an isolated periodic orbit, given by one period, by forbidding
/// the words of its cycle.
pub fn remove_isolated_orbit(shift: &EdgeShift, period: &[Symbol]) -> Result<EdgeShift> {
    let g = WordGraph::new(shift);
    let len = shift.memory().max(1);
    if period.is_empty() || !shift.cycle_allowed(period) {
        return Err(Error::InvalidParams(
            "not a periodic orbit of the shift".into(),
        ));
    }
    let rep: Word = period
        .iter()
        .copied()
        .cycle()
        .take(period.len() + len)
        .collect();
    let mut forbidden = shift.forbidden_strings();
    for i in 0..period.len() {
        let w = &rep[i..i + len];
        let s = g.words.iter().position(|x| x == w);
        if s.and_then(|s| g.isolated_cycle(s)).is_none() {
            return Err(Error::InvalidParams(format!(
                "orbit of ({})^inf is not isolated",
                shift.format_word(period)
            )));
        }
        forbidden.push(shift.format_word(w));
    }
    EdgeShift::new(shift.alphabet(), &forbidden)
}

/// Empty interior of the limit set, as far as `depth` levels show it:
/// every cylinder of `A_d`, `d < depth`, must be cut by `A_depth`. Never
/// `Fails`, since any finite part of the sequence is compatible with an
/// empty interior.
pub fn check_quasi_section_empty_interior(
    qs: &QuasiSectionApprox,
    depth: usize,
) -> PropertyVerdict {
    const NAME: &str = "quasi_section_empty_interior";
    let levels = qs.levels();
    let depth = depth.min(levels.len());
    if depth < 2 {
        return PropertyVerdict::new(NAME, Verdict::Unknown, depth, None);
    }
    let last = &levels[depth - 1];
    for a in &levels[..depth - 1] {
        for c in a.cylinders() {
            let cyl = ClopenSet::from_words(a.shift(), c.offset, vec![c.word]);
            if cyl.is_subset(last) {
                let w = Witness::Cylinder {
                    set: cyl.to_string(),
                    note: "not cut by the last level".into(),
                };
                return PropertyVerdict::new(NAME, Verdict::Unknown, depth, Some(w));
            }
        }
    }
    PropertyVerdict::new(NAME, Verdict::Holds, depth, None)
}

/// Every periodic orbit of period `<= period_bound` meets `A_depth` at
/// most once, as it must when the limit set is the basic set.
pub fn check_at_most_once(
    qs: &QuasiSectionApprox,
    depth: usize,
    period_bound: usize,
) -> PropertyVerdict {
    const NAME: &str = "orbit_meets_section_once";
    let depth = depth.min(qs.levels().len());
    if depth == 0 {
        return PropertyVerdict::new(NAME, Verdict::Unknown, 0, None);
    }
    let a = &qs.levels()[depth - 1];
    for o in a.shift().periodic_orbits(period_bound) {
        let hits = o.points().iter().filter(|p| a.contains_point(p)).count();
        if hits > 1 {
            let w = Witness::Orbit {
                word: a.shift().format_word(o.word()),
                note: format!("{hits} points in the section"),
            };
            return PropertyVerdict::new(NAME, Verdict::Fails, depth, Some(w));
        }
    }
    PropertyVerdict::new(NAME, Verdict::Holds, depth, None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub closing: PropertyVerdict,
    pub basic: PropertyVerdict,
    /// False when one test holds and the other fails.
    pub consistent: bool,
}

/// Closing of the refinement against the periodic test of its sections.
/// The two must agree wherever both are decided.
pub fn cross_validate_closing_basic(
    d: &OrderedBratteliDiagram,
    r: &KRRefinement,
    qs: &QuasiSectionApprox,
    depth: usize,
    period_bound: usize,
) -> CrossReport {
    let closing = check_closing(
        d,
        Some(Coding {
            refinement: r,
            period_bound,
        }),
        depth,
    );
    let basic = check_at_most_once(qs, depth, period_bound);
    let decided = |v: &PropertyVerdict| v.verdict != Verdict::Unknown;
    let consistent = !(decided(&closing) && decided(&basic) && closing.verdict != basic.verdict);
    CrossReport {
        closing,
        basic,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bratteli::{builtin_diagram, diagram_from_kr};
    use crate::towers::{build_kr_refinement, Provenance};

    fn golden() -> Arc<EdgeShift> {
        Arc::new(EdgeShift::new(&["0", "1"], &["11"]).unwrap())
    }

    #[test]
    fn builtin_decisiveness() {
        let v = |name: &str, c: bool| check_decisive(&builtin_diagram(name, 5).unwrap(), c).verdict;
        assert_eq!(v("odometer", true), Verdict::Holds);
        // two max paths against one min path
        assert_eq!(v("fibonacci", false), Verdict::Fails);
        assert_eq!(v("two-cycle-min", false), Verdict::Fails);
        assert_eq!(v("max-two-min-one", false), Verdict::Fails);
        assert_eq!(v("isolated-max", true), Verdict::Fails);
    }

    #[test]
    fn two_cycle_successors_alternate() {
        // climbing a loop flips the parity of the min path reached
        let d = builtin_diagram("two-cycle-min", 4).unwrap();
        let ext = stationary_extension(&d).unwrap();
        assert_eq!(ext.max_paths.len(), 2);
        assert!(ext.limits.iter().all(|l| l.len() == 2));
    }

    #[test]
    fn stationary_closing() {
        let v = |name: &str| check_closing(&builtin_diagram(name, 5).unwrap(), None, 5);
        assert_eq!(v("odometer").verdict, Verdict::Holds);
        assert_eq!(v("fibonacci").verdict, Verdict::Holds);
        let c = v("constant-chain");
        assert_eq!(c.verdict, Verdict::Fails);
        assert!(matches!(c.witness, Some(Witness::Path { ref cycle, .. }) if cycle == &["a"]));
    }

    #[test]
    fn dense_aperiodicity() {
        assert_eq!(check_densely_aperiodic(&golden()).verdict, Verdict::Holds);
        let two = Arc::new(EdgeShift::new(&["0", "1"], &["01", "10"]).unwrap());
        let v = check_densely_aperiodic(&two);
        assert_eq!(v.verdict, Verdict::Fails);
        assert!(matches!(v.witness, Some(Witness::Cylinder { ref set, .. }) if set == "0@0"));
        let one = remove_isolated_orbit(&two, &[0]).unwrap();
        assert_eq!(one.periodic_orbits(3).len(), 1);
        assert!(remove_isolated_orbit(&golden(), &[0]).is_err());
    }

    #[test]
    fn zero_cylinder_sections_fail_closing() {
        let g = golden();
        let a = ClopenSet::parse(&g, "0@0").unwrap();
        let qs = QuasiSectionApprox::new(vec![a; 4], Provenance::UserSupplied).unwrap();
        let r = build_kr_refinement(&qs, 4).unwrap();
        let (d, _) = diagram_from_kr(&r).unwrap();
        let x = cross_validate_closing_basic(&d, &r, &qs, 4, 4);
        assert_eq!(x.closing.verdict, Verdict::Fails);
        assert_eq!(x.basic.verdict, Verdict::Fails);
        assert!(x.consistent);
    }

    #[test]
    fn regulation_and_interior() {
        let g = golden();
        let a = ClopenSet::parse(&g, "0@0").unwrap();
        let qs = QuasiSectionApprox::new(vec![a; 3], Provenance::UserSupplied).unwrap();
        let r = build_kr_refinement(&qs, 3).unwrap();
        // height-1 towers next to 0^inf hold no fixed point
        let v = check_periodicity_regulated(&r, &[1]).unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        assert!(check_periodicity_regulated(&r, &[2, 2]).is_err());
        let alt = Arc::new(EdgeShift::new(&["0", "1"], &["00", "11"]).unwrap());
        let a = ClopenSet::parse(&alt, "0@0").unwrap();
        let qs2 = QuasiSectionApprox::new(vec![a; 2], Provenance::UserSupplied).unwrap();
        let r2 = build_kr_refinement(&qs2, 2).unwrap();
        let v = check_periodicity_regulated(&r2, &[2, 3]).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        assert_eq!(
            check_quasi_section_empty_interior(&qs, 3).verdict,
            Verdict::Unknown
        );
        let shrink = vec![
            ClopenSet::parse(&g, "0@0").unwrap(),
            ClopenSet::parse(&g, "00@-1|101@-1").unwrap(),
        ];
        let qs = QuasiSectionApprox::new(shrink, Provenance::UserSupplied).unwrap();
        assert_eq!(
            check_quasi_section_empty_interior(&qs, 2).verdict,
            Verdict::Holds
        );
    }
}
