//! Ordered Bratteli diagrams, their path spaces and the Vershik map, and
//! the passage between nested tower systems and diagrams.
//!
//! Paths into a vertex are ordered by their last differing edge, so the
//! first edge is the least significant digit.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::shift::Symbol;
use crate::towers::KRRefinement;

/// An edge between consecutive levels; `order` is 1-based among the
/// edges with the same range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub range: usize,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBratteliDiagram {
    vertices: Vec<Vec<String>>,
    /// `edges[n - 1]` joins level `n - 1` to level `n`.
    edges: Vec<Vec<Edge>>,
    /// `incoming[n][v]`: indices into `edges[n - 1]`, by order.
    incoming: Vec<Vec<Vec<usize>>>,
}

impl OrderedBratteliDiagram {
    /// Validates and indexes a diagram.
    pub fn new(vertices: Vec<Vec<String>>, edges: Vec<Vec<Edge>>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDiagram(m));
        if vertices.first().map(Vec::len) != Some(1) {
            return bad("level 0 must have exactly one vertex".into());
        }
        if edges.len() + 1 != vertices.len() {
            return bad("one edge list per level above 0 is required".into());
        }
        for (n, vs) in vertices.iter().enumerate() {
            if vs.is_empty() {
                return bad(format!("level {n} has no vertices"));
            }
            let ids: BTreeSet<&String> = vs.iter().collect();
            if ids.len() != vs.len() {
                return bad(format!("duplicate vertex id at level {n}"));
            }
        }
        let mut incoming = vec![Vec::new()];
        for (k, es) in edges.iter().enumerate() {
            let n = k + 1;
            let mut inc: Vec<Vec<usize>> = vec![Vec::new(); vertices[n].len()];
            let mut out = vec![false; vertices[k].len()];
            for (i, e) in es.iter().enumerate() {
                if e.source >= vertices[k].len() || e.range >= vertices[n].len() {
                    return bad(format!("edge {i} of level {n} has an unknown endpoint"));
                }
                inc[e.range].push(i);
                out[e.source] = true;
            }
            for (v, list) in inc.iter_mut().enumerate() {
                if list.is_empty() {
                    return bad(format!(
                        "vertex {} of level {n} has no incoming edge",
                        vertices[n][v]
                    ));
                }
                list.sort_by_key(|&i| es[i].order);
                if list.iter().enumerate().any(|(j, &i)| es[i].order != j + 1) {
                    return bad(format!(
                        "orders into vertex {} of level {n} are not 1..{}",
                        vertices[n][v],
                        list.len()
                    ));
                }
            }
            if let Some(v) = out.iter().position(|&o| !o) {
                return bad(format!(
                    "vertex {} of level {k} has no outgoing edge",
                    vertices[k][v]
                ));
            }
            incoming.push(inc);
        }
        Ok(OrderedBratteliDiagram {
            vertices,
            edges,
            incoming,
        })
    }

    /// Number of levels above 0.
    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self, n: usize) -> &[String] {
        &self.vertices[n]
    }

    pub fn edges(&self, n: usize) -> &[Edge] {
        &self.edges[n - 1]
    }

    /// Indices into [`Self::edges`]`(n)` of the edges with range `v`, by order.
    pub fn incoming(&self, n: usize, v: usize) -> &[usize] {
        &self.incoming[n][v]
    }

    pub fn vertex_index(&self, n: usize, id: &str) -> Option<usize> {
        self.vertices[n].iter().position(|x| x == id)
    }

    /// Truncation to levels `0..=n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.vertices[..=n].to_vec(), self.edges[..n].to_vec())
            .expect("prefix of a valid diagram")
    }

    /// `l(v)` for every vertex: the number of paths from the root.
    pub fn path_counts(&self) -> Vec<Vec<u128>> {
        let mut out = vec![vec![1u128]];
        for n in 1..=self.depth() {
            let prev = &out[n - 1];
            let row = (0..self.vertices[n].len())
                .map(|v| {
                    self.incoming(n, v)
                        .iter()
                        .map(|&i| prev[self.edges(n)[i].source])
                        .fold(0u128, u128::saturating_add)
                })
                .collect();
            out.push(row);
        }
        out
    }

    /// Whether every level from 2 on repeats level 2 (needs depth >= 2).
    pub fn is_stationary(&self) -> bool {
        if self.depth() < 2 {
            return false;
        }
        let key = |n: usize| {
            let mut es = self.edges(n).to_vec();
            es.sort();
            (self.vertices[n].len(), es)
        };
        let k2 = key(2);
        self.vertices[1].len() == k2.0 && (3..=self.depth()).all(|n| key(n) == k2)
    }

    /// The all-minimal path into `v` at level `n`.
    pub fn min_path(&self, n: usize, v: usize) -> FinitePath {
        self.extreme_path(n, v, true)
    }

    /// The all-maximal path into `v` at level `n`.
    pub fn max_path(&self, n: usize, v: usize) -> FinitePath {
        self.extreme_path(n, v, false)
    }

    fn extreme_path(&self, n: usize, v: usize, min: bool) -> FinitePath {
        let mut edges = vec![0; n];
        let mut cur = v;
        for k in (1..=n).rev() {
            let inc = self.incoming(k, cur);
            let e = if min { inc[0] } else { *inc.last().unwrap() };
            edges[k - 1] = e;
            cur = self.edges(k)[e].source;
        }
        FinitePath { edges }
    }

    fn check_path(&self, p: &FinitePath) -> Result<()> {
        if p.depth() > self.depth() {
            return Err(Error::BadPrefix("path is deeper than the diagram".into()));
        }
        let mut cur = 0;
        for (k, &e) in p.edges.iter().enumerate() {
            let edge = self.edges.get(k).and_then(|es| es.get(e));
            match edge {
                Some(edge) if edge.source == cur => cur = edge.range,
                _ => return Err(Error::BadPrefix(format!("path breaks at level {}", k + 1))),
            }
        }
        Ok(())
    }

    /// Range vertex of a nonempty path; the root for the empty path.
    pub fn range_of(&self, p: &FinitePath) -> usize {
        match p.edges.last() {
            Some(&e) => self.edges(p.depth())[e].range,
            None => 0,
        }
    }

    /// Position of `p` in `P(r(p))`: the sum, over levels, of the path
    /// counts of the sources of smaller edges.
    pub fn rank(&self, p: &FinitePath, counts: &[Vec<u128>]) -> u128 {
        let mut j = 0u128;
        for (k, &e) in p.edges.iter().enumerate() {
            let n = k + 1;
            let edge = self.edges(n)[e];
            for &f in &self.incoming(n, edge.range)[..edge.order - 1] {
                j += counts[n - 1][self.edges(n)[f].source];
            }
        }
        j
    }

    /// The `j`-th path into `v` at level `n`.
    pub fn unrank(
        &self,
        n: usize,
        v: usize,
        mut j: u128,
        counts: &[Vec<u128>],
    ) -> Option<FinitePath> {
        let mut edges = vec![0; n];
        let mut cur = v;
        for k in (1..=n).rev() {
            let mut chosen = None;
            for &e in self.incoming(k, cur) {
                let c = counts[k - 1][self.edges(k)[e].source];
                if j < c {
                    chosen = Some(e);
                    break;
                }
                j -= c;
            }
            let e = chosen?;
            edges[k - 1] = e;
            cur = self.edges(k)[e].source;
        }
        (j == 0).then_some(FinitePath { edges })
    }
}

/// Edge indices, one per level `1..=depth`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinitePath {
    pub edges: Vec<usize>,
}

impl FinitePath {
    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    pub fn prefix(&self, n: usize) -> FinitePath {
        FinitePath {
            edges: self.edges[..n].to_vec(),
        }
    }
}

/// All depth-`n` paths, grouped by range vertex and sorted within groups.
pub fn finite_paths(d: &OrderedBratteliDiagram, n: usize) -> Vec<FinitePath> {
    paths_by_range(d, n).into_iter().flatten().collect()
}

/// `P(v)` for every vertex `v` of level `n`.
pub fn paths_by_range(d: &OrderedBratteliDiagram, n: usize) -> Vec<Vec<FinitePath>> {
    let mut cur = vec![vec![FinitePath { edges: Vec::new() }]];
    for k in 1..=n {
        cur = (0..d.vertices(k).len())
            .map(|v| {
                let mut out = Vec::new();
                for &e in d.incoming(k, v) {
                    for p in &cur[d.edges(k)[e].source] {
                        let mut q = p.clone();
                        q.edges.push(e);
                        out.push(q);
                    }
                }
                out
            })
            .collect();
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Successor {
    Next(FinitePath),
    /// The path is maximal into its range; deeper levels decide.
    MaximalAtDepth,
}

/// The next path into the same vertex: the first non-maximal edge is
/// advanced and everything below it becomes minimal.
pub fn vershik_successor(d: &OrderedBratteliDiagram, p: &FinitePath) -> Result<Successor> {
    d.check_path(p)?;
    for k in 1..=p.depth() {
        let edge = d.edges(k)[p.edges[k - 1]];
        let inc = d.incoming(k, edge.range);
        if edge.order < inc.len() {
            let next = inc[edge.order];
            let below = d.min_path(k - 1, d.edges(k)[next].source);
            let mut edges = below.edges;
            edges.push(next);
            edges.extend_from_slice(&p.edges[k..]);
            return Ok(Successor::Next(FinitePath { edges }));
        }
    }
    Ok(Successor::MaximalAtDepth)
}

/// Keeps the levels in `cuts`; an edge of the result is a path between
/// consecutive kept levels, numbered in path order.
pub fn telescope_diagram(
    d: &OrderedBratteliDiagram,
    cuts: &[usize],
) -> Result<OrderedBratteliDiagram> {
    if cuts.first() != Some(&0) {
        return Err(Error::BadCuts("cuts must start at level 0".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCuts("cuts must be strictly increasing".into()));
    }
    if *cuts.last().unwrap() > d.depth() {
        return Err(Error::BadCuts(format!(
            "cut {} exceeds depth {}",
            cuts.last().unwrap(),
            d.depth()
        )));
    }
    let vertices: Vec<Vec<String>> = cuts.iter().map(|&n| d.vertices(n).to_vec()).collect();
    let mut edges = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut out = Vec::new();
        for v in 0..d.vertices(b).len() {
            let segs = segments(d, a, b, v);
            for (k, (src, _)) in segs.iter().enumerate() {
                out.push(Edge {
                    source: *src,
                    range: v,
                    order: k + 1,
                });
            }
        }
        edges.push(out);
    }
    OrderedBratteliDiagram::new(vertices, edges)
}

/// Paths from level `a` to vertex `v` of level `b`, in path order, as
/// `(source, edges)`.
fn segments(d: &OrderedBratteliDiagram, a: usize, b: usize, v: usize) -> Vec<(usize, Vec<usize>)> {
    if a == b {
        return vec![(v, Vec::new())];
    }
    let mut out = Vec::new();
    for &e in d.incoming(b, v) {
        for (s, mut seg) in segments(d, a, b - 1, d.edges(b)[e].source) {
            seg.push(e);
            out.push((s, seg));
        }
    }
    out
}

/// An infinite path of a stationary diagram: the vertex at level `n >= 1`
/// is `cycle[(n - 1) % cycle.len()]`, each reached by its min (or max)
/// edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationaryPath {
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinMaxInfo {
    /// Index of `e(v, min)` per level and vertex.
    pub min_edges: Vec<Vec<usize>>,
    pub max_edges: Vec<Vec<usize>>,
    /// Distinct depth-`n` prefixes of the all-min paths into the deepest
    /// level, for `n = 0..=depth`.
    pub min_counts: Vec<usize>,
    pub max_counts: Vec<usize>,
    /// Exact infinite min and max paths, for stationary diagrams.
    pub min_paths: Option<Vec<StationaryPath>>,
    pub max_paths: Option<Vec<StationaryPath>>,
}

pub fn min_max_subdiagrams(d: &OrderedBratteliDiagram) -> MinMaxInfo {
    let pick = |min: bool| -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for n in 1..=d.depth() {
            out.push(
                (0..d.vertices(n).len())
                    .map(|v| {
                        let inc = d.incoming(n, v);
                        if min {
                            inc[0]
                        } else {
                            *inc.last().unwrap()
                        }
                    })
                    .collect(),
            );
        }
        out
    };
    let min_edges = pick(true);
    let max_edges = pick(false);
    let counts = |ext: &[Vec<usize>]| -> Vec<usize> {
        let top = d.depth();
        // alive[v]: v lies on some all-extreme path into the top level
        let mut out = vec![0; top + 1];
        let mut alive: BTreeSet<usize> = (0..d.vertices(top).len()).collect();
        for n in (0..=top).rev() {
            out[n] = alive.len();
            if n > 0 {
                alive = alive
                    .iter()
                    .map(|&v| d.edges(n)[ext[n][v]].source)
                    .collect();
            }
        }
        out
    };
    let stationary = d.is_stationary();
    let infinite = |ext: &[Vec<usize>]| -> Vec<StationaryPath> {
        // the extreme source map on a stationary level
        let f: Vec<usize> = ext[2].iter().map(|&e| d.edges(2)[e].source).collect();
        let cyclic: Vec<usize> = (0..f.len())
            .filter(|&v| {
                let mut x = f[v];
                for _ in 0..f.len() {
                    if x == v {
                        return true;
                    }
                    x = f[x];
                }
                false
            })
            .collect();
        cyclic
            .iter()
            .map(|&v| {
                // going up, the next vertex is the cyclic preimage
                let mut cycle = vec![v];
                let mut cur = v;
                loop {
                    let up = cyclic.iter().copied().find(|&w| f[w] == cur).unwrap();
                    if up == v {
                        break;
                    }
                    cycle.push(up);
                    cur = up;
                }
                StationaryPath { cycle }
            })
            .collect()
    };
    MinMaxInfo {
        min_counts: counts(&min_edges),
        max_counts: counts(&max_edges),
        min_paths: stationary.then(|| infinite(&min_edges)),
        max_paths: stationary.then(|| infinite(&max_edges)),
        min_edges,
        max_edges,
    }
}

/// Nested towers with discrete data only: heights and, for every floor,
/// the enclosing floor one level down.
pub trait TowerSystem {
    /// Number of levels above 0.
    fn depth(&self) -> usize;
    fn tower_ids(&self, n: usize) -> Vec<String>;
    fn heights(&self, n: usize) -> Vec<usize>;
    /// Per tower and floor, `(tower, floor)` of level `n - 1`.
    fn nesting(&self, n: usize) -> Vec<Vec<(usize, usize)>>;
}

impl TowerSystem for KRRefinement {
    fn depth(&self) -> usize {
        KRRefinement::depth(self)
    }

    fn tower_ids(&self, n: usize) -> Vec<String> {
        (0..self.level(n).towers.len())
            .map(|i| format!("{n}.{i}"))
            .collect()
    }

    fn heights(&self, n: usize) -> Vec<usize> {
        self.level(n).towers.iter().map(|t| t.height).collect()
    }

    fn nesting(&self, n: usize) -> Vec<Vec<(usize, usize)>> {
        self.level(n).nesting()
    }
}

/// Towers over the path space of a diagram: tower `v` has the floors
/// `U(v, j)`, the cylinders of the paths `p(v, j)` in path order.
#[derive(Debug, Clone)]
pub struct PathTowers {
    diagram: OrderedBratteliDiagram,
    counts: Vec<Vec<u128>>,
}

impl PathTowers {
    pub fn diagram(&self) -> &OrderedBratteliDiagram {
        &self.diagram
    }

    /// The prefix whose cylinder is floor `j` of tower `v` at level `n`.
    pub fn floor(&self, n: usize, v: usize, j: usize) -> Option<FinitePath> {
        self.diagram.unrank(n, v, j as u128, &self.counts)
    }

    /// Checks the tower axioms on the path space: floors of a level are
    /// exactly the depth-`n` prefixes, each floor sits inside the floor
    /// named by the nesting table, and bases sit inside bases.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRefinement(m));
        for n in 0..=self.depth() {
            let mut seen = BTreeSet::new();
            for (v, &h) in self.heights(n).iter().enumerate() {
                for j in 0..h {
                    let p = self.floor(n, v, j).ok_or_else(|| {
                        Error::InvalidRefinement(format!("floor {j} of tower {v} has no path"))
                    })?;
                    if self.diagram.range_of(&p) != v {
                        return bad(format!("floor {j} of tower {v} ends elsewhere"));
                    }
                    seen.insert(p);
                }
            }
            if seen.len() != finite_paths(&self.diagram, n).len() {
                return bad(format!("level {n} floors do not cover the prefixes"));
            }
            if n == 0 {
                continue;
            }
            let nest = self.nesting(n);
            for (v, row) in nest.iter().enumerate() {
                for (j, &(t, f)) in row.iter().enumerate() {
                    let p = self.floor(n, v, j).unwrap();
                    if Some(p.prefix(n - 1)) != self.floor(n - 1, t, f) {
                        return bad(format!(
                            "floor {j} of tower {v} leaves floor {f} of tower {t}"
                        ));
                    }
                }
                if row[0].1 != 0 {
                    return bad(format!("base of tower {v} is not in a base"));
                }
            }
        }
        Ok(())
    }
}

impl TowerSystem for PathTowers {
    fn depth(&self) -> usize {
        self.diagram.depth()
    }

    fn tower_ids(&self, n: usize) -> Vec<String> {
        self.diagram.vertices(n).to_vec()
    }

    fn heights(&self, n: usize) -> Vec<usize> {
        self.counts[n].iter().map(|&c| c as usize).collect()
    }

    fn nesting(&self, n: usize) -> Vec<Vec<(usize, usize)>> {
        (0..self.diagram.vertices(n).len())
            .map(|v| {
                let mut row = Vec::new();
                for &e in self.diagram.incoming(n, v) {
                    let s = self.diagram.edges(n)[e].source;
                    row.extend((0..self.counts[n - 1][s] as usize).map(|f| (s, f)));
                }
                row
            })
            .collect()
    }
}

/// The towers of the first `depth` levels of `d`.
pub fn kr_from_diagram(d: &OrderedBratteliDiagram, depth: usize) -> Result<PathTowers> {
    if depth > d.depth() {
        return Err(Error::InvalidParams(format!(
            "depth {depth} exceeds {} levels",
            d.depth()
        )));
    }
    let diagram = d.truncate(depth);
    let counts = diagram.path_counts();
    if counts.iter().flatten().any(|&c| c > usize::MAX as u128 / 2) {
        return Err(Error::InvalidParams("path counts overflow".into()));
    }
    Ok(PathTowers { diagram, counts })
}

/// Correspondence between towers and vertices; vertex `i` of level `n`
/// is tower `i`, and floor `j` of a tower is the `j`-th path into it.
#[derive(Debug, Clone)]
pub struct ConjugacyCoding {
    pub ids: Vec<Vec<String>>,
    counts: Vec<Vec<u128>>,
}

impl ConjugacyCoding {
    pub fn path_counts(&self) -> &[Vec<u128>] {
        &self.counts
    }
}

/// One edge per traversal of a lower tower, in traversal order.
pub fn diagram_from_towers<T: TowerSystem + ?Sized>(sys: &T) -> Result<OrderedBratteliDiagram> {
    let bad = |m: String| Err(Error::InvalidRefinement(m));
    let vertices: Vec<Vec<String>> = (0..=sys.depth()).map(|n| sys.tower_ids(n)).collect();
    let mut edges = Vec::new();
    for n in 1..=sys.depth() {
        let below = sys.heights(n - 1);
        let mut out = Vec::new();
        for (v, row) in sys.nesting(n).iter().enumerate() {
            let mut order = 0;
            let mut expect: Option<(usize, usize)> = None;
            for (j, &(t, f)) in row.iter().enumerate() {
                match expect {
                    Some((et, ef)) if ef < below[et] => {
                        if (t, f) != (et, ef) {
                            return bad(format!(
                                "level {n} tower {v} floor {j}: traversal of tower {et} broken"
                            ));
                        }
                    }
                    _ => {
                        if f != 0 {
                            return bad(format!(
                                "level {n} tower {v} floor {j}: traversal starts above the base"
                            ));
                        }
                        order += 1;
                        out.push(Edge {
                            source: t,
                            range: v,
                            order,
                        });
                    }
                }
                expect = Some((t, f + 1));
            }
            if let Some((et, ef)) = expect {
                if ef != below[et] {
                    return bad(format!(
                        "level {n} tower {v}: last traversal of tower {et} is cut short"
                    ));
                }
            }
        }
        edges.push(out);
    }
    let d = OrderedBratteliDiagram::new(vertices, edges)
        .map_err(|e| Error::InvalidRefinement(e.to_string()))?;
    let counts = d.path_counts();
    for (n, row) in counts.iter().enumerate() {
        for (v, &h) in sys.heights(n).iter().enumerate() {
            if row[v] != h as u128 {
                return bad(format!(
                    "level {n} tower {v}: {} paths for height {h}",
                    row[v]
                ));
            }
        }
    }
    Ok(d)
}

/// The diagram of a refinement and its coding.
pub fn diagram_from_kr(r: &KRRefinement) -> Result<(OrderedBratteliDiagram, ConjugacyCoding)> {
    let d = diagram_from_towers(r)?;
    let coding = ConjugacyCoding {
        ids: (0..=d.depth()).map(|n| d.vertices(n).to_vec()).collect(),
        counts: d.path_counts(),
    };
    Ok((d, coding))
}

/// Same vertex ids on every level and the same edges between them.
pub fn isomorphic_by_ids(a: &OrderedBratteliDiagram, b: &OrderedBratteliDiagram) -> bool {
    if a.depth() != b.depth() {
        return false;
    }
    let edge_set = |d: &OrderedBratteliDiagram, n: usize| -> BTreeSet<(String, String, usize)> {
        d.edges(n)
            .iter()
            .map(|e| {
                (
                    d.vertices(n - 1)[e.source].clone(),
                    d.vertices(n)[e.range].clone(),
                    e.order,
                )
            })
            .collect()
    };
    (0..=a.depth()).all(|n| {
        let va: BTreeSet<&String> = a.vertices(n).iter().collect();
        let vb: BTreeSet<&String> = b.vertices(n).iter().collect();
        va == vb && (n == 0 || edge_set(a, n) == edge_set(b, n))
    })
}

/// The depth-`depth` prefix of the path of a point known on the window
/// `lo ..`.
pub fn encode_point(
    lo: i64,
    window: &[Symbol],
    r: &KRRefinement,
    coding: &ConjugacyCoding,
    depth: usize,
) -> Result<FinitePath> {
    if depth > r.depth() || depth >= coding.ids.len() {
        return Err(Error::InvalidParams(format!(
            "depth {depth} exceeds {}",
            r.depth()
        )));
    }
    let (mut t, mut j) = locate(lo, window, r, depth)?;
    let mut edges = vec![0; depth];
    for n in (1..=depth).rev() {
        let tower = &r.level(n).towers[t];
        let traversal = tower.itinerary[..=j]
            .iter()
            .filter(|s| s.prev_floor == 0)
            .count();
        let s = &tower.itinerary[j];
        let d_edges = coding_edges(r, n, t);
        edges[n - 1] = d_edges[traversal - 1];
        (t, j) = (s.prev_tower, s.prev_floor);
    }
    Ok(FinitePath { edges })
}

/// Global edge indices into tower `t` of level `n`, by order, as laid out
/// by [`diagram_from_towers`].
fn coding_edges(r: &KRRefinement, n: usize, t: usize) -> Vec<usize> {
    let mut start = 0;
    for tower in &r.level(n).towers[..t] {
        start += tower.itinerary.iter().filter(|s| s.prev_floor == 0).count();
    }
    let k = r.level(n).towers[t]
        .itinerary
        .iter()
        .filter(|s| s.prev_floor == 0)
        .count();
    (start..start + k).collect()
}

/// Tower and floor of level `n` containing the point.
fn locate(lo: i64, window: &[Symbol], r: &KRRefinement, n: usize) -> Result<(usize, usize)> {
    let get = |i: i64| {
        let k = i - lo;
        (k >= 0 && (k as usize) < window.len()).then(|| window[k as usize])
    };
    for (t, tower) in r.level(n).towers.iter().enumerate() {
        for j in 0..tower.height {
            let jj = j as i64;
            match tower.base.decide(|c| get(c - jj)) {
                crate::clopen::Decision::Yes => return Ok((t, j)),
                crate::clopen::Decision::No => {}
                crate::clopen::Decision::Need(c) => {
                    return Err(Error::WindowTooShort(format!(
                        "coordinate {} is needed to place the point at level {n}",
                        c - jj
                    )))
                }
            }
        }
    }
    Err(Error::InvalidRefinement(format!(
        "the point lies in no floor of level {n}"
    )))
}

/// The floor `U(v, j)` named by a prefix, as a clopen set.
pub fn decode_prefix(
    p: &FinitePath,
    r: &KRRefinement,
    coding: &ConjugacyCoding,
    d: &OrderedBratteliDiagram,
) -> Result<ClopenSet> {
    d.check_path(p)?;
    let n = p.depth();
    let v = d.range_of(p);
    let j = d.rank(p, coding.path_counts()) as usize;
    let tower = r
        .level(n)
        .towers
        .get(v)
        .ok_or_else(|| Error::InvalidRefinement(format!("no tower {v} at level {n}")))?;
    Ok(tower.floor(j))
}

/// Graphviz rendering; one rank per level, min edges bold.
pub fn to_dot(d: &OrderedBratteliDiagram) -> String {
    let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
    let name = |n: usize, v: usize| format!("\"{}:{}\"", n, d.vertices(n)[v]);
    for n in 0..=d.depth() {
        let _ = write!(s, "  {{ rank=same;");
        for v in 0..d.vertices(n).len() {
            let _ = write!(s, " {}", name(n, v));
        }
        s.push_str(" }\n");
    }
    for n in 1..=d.depth() {
        for v in 0..d.vertices(n).len() {
            for (k, &e) in d.incoming(n, v).iter().enumerate() {
                let edge = d.edges(n)[e];
                let style = if k == 0 {
                    ", style=bold, color=blue"
                } else {
                    ""
                };
                let _ = writeln!(
                    s,
                    "  {} -> {} [label=\"{}\"{style}];",
                    name(n - 1, edge.source),
                    name(n, v),
                    edge.order
                );
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Serialized form: vertex ids per level and edges by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub levels: Vec<LevelJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub level: usize,
    pub source: String,
    pub range: String,
    pub order: usize,
}

impl From<&OrderedBratteliDiagram> for DiagramJson {
    fn from(d: &OrderedBratteliDiagram) -> Self {
        let mut edges = Vec::new();
        for n in 1..=d.depth() {
            for v in 0..d.vertices(n).len() {
                for &e in d.incoming(n, v) {
                    let edge = d.edges(n)[e];
                    edges.push(EdgeJson {
                        level: n,
                        source: d.vertices(n - 1)[edge.source].clone(),
                        range: d.vertices(n)[v].clone(),
                        order: edge.order,
                    });
                }
            }
        }
        DiagramJson {
            levels: (0..=d.depth())
                .map(|n| LevelJson {
                    vertices: d.vertices(n).to_vec(),
                })
                .collect(),
            edges,
        }
    }
}

impl TryFrom<&DiagramJson> for OrderedBratteliDiagram {
    type Error = Error;

    fn try_from(j: &DiagramJson) -> Result<Self> {
        let vertices: Vec<Vec<String>> = j.levels.iter().map(|l| l.vertices.clone()).collect();
        let depth = vertices.len().saturating_sub(1);
        let mut edges = vec![Vec::new(); depth];
        for e in &j.edges {
            if e.level == 0 || e.level > depth {
                return Err(Error::InvalidDiagram(format!("edge at level {}", e.level)));
            }
            let find = |n: usize, id: &str| {
                vertices[n].iter().position(|x| x == id).ok_or_else(|| {
                    Error::InvalidDiagram(format!("unknown vertex {id} at level {n}"))
                })
            };
            edges[e.level - 1].push(Edge {
                source: find(e.level - 1, &e.source)?,
                range: find(e.level, &e.range)?,
                order: e.order,
            });
        }
        OrderedBratteliDiagram::new(vertices, edges)
    }
}

/// A diagram whose levels from 2 on repeat: `first[v]` lists the
/// multiplicity of root edges into `v`, `incoming[v]` the sources of the
/// edges into `v` in order.
pub fn stationary(
    names: &[&str],
    first: &[usize],
    incoming: &[&[usize]],
    depth: usize,
) -> OrderedBratteliDiagram {
    let ids: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let mut vertices = vec![vec!["root".to_string()]];
    let mut edges = Vec::new();
    for n in 1..=depth {
        vertices.push(ids.clone());
        let mut es = Vec::new();
        for v in 0..ids.len() {
            if n == 1 {
                es.extend((1..=first[v]).map(|k| Edge {
                    source: 0,
                    range: v,
                    order: k,
                }));
            } else {
                es.extend(incoming[v].iter().enumerate().map(|(k, &s)| Edge {
                    source: s,
                    range: v,
                    order: k + 1,
                }));
            }
        }
        edges.push(es);
    }
    OrderedBratteliDiagram::new(vertices, edges).expect("builtin diagram is valid")
}

/// Bundled diagrams by name.
pub fn builtin_diagram(name: &str, depth: usize) -> Result<OrderedBratteliDiagram> {
    Ok(match name {
        "odometer" => stationary(&["v"], &[2], &[&[0, 0]], depth),
        "fibonacci" => stationary(&["a", "b"], &[1, 1], &[&[0, 1], &[0]], depth),
        "two-cycle-min" => stationary(&["a", "b"], &[1, 1], &[&[1, 0], &[0, 1]], depth),
        "constant-chain" => stationary(&["a", "c"], &[2, 1], &[&[0], &[1, 0, 1]], depth),
        "max-two-min-one" => stationary(&["a", "b"], &[1, 1], &[&[0, 1, 0], &[0, 1]], depth),
        "isolated-max" => stationary(&["a", "b"], &[1, 1], &[&[1, 0], &[1]], depth),
        _ => return Err(Error::InvalidParams(format!("unknown diagram {name}"))),
    })
}

pub const BUILTIN_DIAGRAMS: &[&str] = &[
    "odometer",
    "fibonacci",
    "two-cycle-min",
    "constant-chain",
    "max-two-min-one",
    "isolated-max",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_paths_count_binary() {
        let d = builtin_diagram("odometer", 4).unwrap();
        let counts = d.path_counts();
        assert_eq!(counts[3], vec![8]);
        let ps = finite_paths(&d, 3);
        assert_eq!(ps.len(), 8);
        for (i, p) in ps.iter().enumerate() {
            // digit k is the order of edge k minus one, least significant first
            let value: usize = p
                .edges
                .iter()
                .enumerate()
                .map(|(k, &e)| (d.edges(k + 1)[e].order - 1) << k)
                .sum();
            assert_eq!(value, i);
            assert_eq!(d.rank(p, &counts), i as u128);
            assert_eq!(d.unrank(3, 0, i as u128, &counts).as_ref(), Some(p));
        }
    }

    #[test]
    fn successor_carries() {
        let d = builtin_diagram("odometer", 3).unwrap();
        // edge index 0 is order 1, index 1 is order 2
        let p = FinitePath {
            edges: vec![1, 1, 0],
        };
        assert_eq!(
            vershik_successor(&d, &p).unwrap(),
            Successor::Next(FinitePath {
                edges: vec![0, 0, 1]
            })
        );
        assert_eq!(
            vershik_successor(&d, &d.max_path(3, 0)).unwrap(),
            Successor::MaximalAtDepth
        );
    }

    #[test]
    fn validation() {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let bad = OrderedBratteliDiagram::new(
            vec![v(&["r"]), v(&["a"])],
            vec![vec![Edge {
                source: 0,
                range: 0,
                order: 2,
            }]],
        );
        assert!(matches!(bad, Err(Error::InvalidDiagram(_))));
        let orphan = OrderedBratteliDiagram::new(
            vec![v(&["r"]), v(&["a", "b"])],
            vec![vec![Edge {
                source: 0,
                range: 0,
                order: 1,
            }]],
        );
        assert!(orphan.is_err());
    }

    #[test]
    fn telescoping_odometer() {
        let d = builtin_diagram("odometer", 4).unwrap();
        let t = telescope_diagram(&d, &[0, 2, 4]).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.edges(2).len(), 4);
        assert_eq!(telescope_diagram(&d, &[0, 1, 2, 3, 4]).unwrap(), d);
        assert!(matches!(
            telescope_diagram(&d, &[1, 2]),
            Err(Error::BadCuts(_))
        ));
        assert!(matches!(
            telescope_diagram(&d, &[0, 2, 2]),
            Err(Error::BadCuts(_))
        ));
    }

    #[test]
    fn extremes() {
        let d = builtin_diagram("two-cycle-min", 4).unwrap();
        let mm = min_max_subdiagrams(&d);
        let mins = mm.min_paths.unwrap();
        assert_eq!(mins.len(), 2);
        assert!(mins.iter().all(|p| p.cycle.len() == 2));
        assert_eq!(mm.max_paths.unwrap().len(), 2);
        let o = min_max_subdiagrams(&builtin_diagram("odometer", 5).unwrap());
        assert_eq!(o.min_counts, vec![1; 6]);
        assert_eq!(o.min_paths.unwrap().len(), 1);
    }

    #[test]
    fn path_towers_round_trip() {
        let d = builtin_diagram("fibonacci", 5).unwrap();
        let t = kr_from_diagram(&d, 5).unwrap();
        t.check().unwrap();
        let back = diagram_from_towers(&t).unwrap();
        assert!(isomorphic_by_ids(&back, &d));
    }

    #[test]
    fn json_and_dot() {
        let d = builtin_diagram("fibonacci", 2).unwrap();
        let j = DiagramJson::from(&d);
        assert_eq!(OrderedBratteliDiagram::try_from(&j).unwrap(), d);
        let dot = to_dot(&d);
        assert!(dot.contains("\"0:root\" -> \"1:a\" [label=\"1\", style=bold, color=blue];"));
        assert_eq!(dot, to_dot(&d));
    }
}
