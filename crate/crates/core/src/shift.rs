//! Two-sided edge shifts presented by forbidden words.
//!
//! Symbols are indices into the declared alphabet; the alphabet order
//! induces the lexicographic word order used by every other module.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

/// Upper bound on the size of the window lookup table (`|A|^(memory+1)`).
const MAX_TABLE: u64 = 1 << 24;

/// On-disk system description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
}

/// Explicit edge-labelled graph; every label is a distinct symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Clone)]
pub struct EdgeShift {
    alphabet: Vec<String>,
    forbidden: Vec<Word>,
    memory: usize,
    /// Pruned de Bruijn states (allowed words of length `memory`), sorted.
    states: Vec<Word>,
    /// `edge_ok[code(w)]` for words of length `memory + 1`.
    edge_ok: Vec<bool>,
    /// Allowed words of length `<= memory`.
    short_ok: HashSet<Word>,
    modulus: u64,
    /// `next[s][a]`: state reached from state `s` by reading `a`.
    next: Vec<Vec<Option<usize>>>,
}

impl fmt::Debug for EdgeShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeShift")
            .field("alphabet", &self.alphabet)
            .field("forbidden", &self.forbidden_strings())
            .field("memory", &self.memory)
            .finish()
    }
}

impl PartialEq for EdgeShift {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.forbidden == other.forbidden
    }
}

impl Eq for EdgeShift {}

impl EdgeShift {
    /// Builds and prunes the shift. Symbols must be single characters.
    pub fn new<S: AsRef<str>>(alphabet: &[S], forbidden: &[S]) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        if alphabet.is_empty() {
            return Err(Error::BadWord("alphabet is empty".into()));
        }
        if alphabet.len() > u8::MAX as usize {
            return Err(Error::BadWord("alphabet too large".into()));
        }
        let mut seen = HashSet::new();
        for s in &alphabet {
            if s.chars().count() != 1 {
                return Err(Error::BadWord(format!(
                    "symbol {s:?} is not a single character"
                )));
            }
            if matches!(s.as_str(), "@" | "|" | "*" | "-") || s.chars().all(char::is_whitespace) {
                return Err(Error::BadWord(format!("symbol {s:?} is reserved")));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::BadWord(format!("duplicate symbol {s:?}")));
            }
        }
        let mut words = BTreeSet::new();
        for f in forbidden {
            let w = parse_with(&alphabet, f.as_ref())?;
            if w.is_empty() {
                return Err(Error::BadWord("empty forbidden word".into()));
            }
            words.insert(w);
        }
        Self::build(alphabet, words.into_iter().collect())
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        match (&spec.forbidden, &spec.graph) {
            (Some(_), Some(_)) => Err(Error::BadWord(
                "system gives both a forbidden list and a graph".into(),
            )),
            (_, Some(g)) => Self::from_graph(&spec.alphabet, g),
            (f, None) => {
                let f = f.clone().unwrap_or_default();
                Self::new(&spec.alphabet, &f)
            }
        }
    }

    /// Edge shift of a labelled graph: consecutive labels must be
    /// consecutive edges, so every non-composable pair is forbidden.
    pub fn from_graph(alphabet: &[String], graph: &GraphSpec) -> Result<Self> {
        let mut ends = vec![None; alphabet.len()];
        for e in &graph.edges {
            if e.from >= graph.vertices || e.to >= graph.vertices {
                return Err(Error::BadWord(format!(
                    "edge {} has an unknown vertex",
                    e.label
                )));
            }
            let idx = alphabet
                .iter()
                .position(|a| *a == e.label)
                .ok_or_else(|| Error::BadWord(format!("label {:?} not in alphabet", e.label)))?;
            if ends[idx].is_some() {
                return Err(Error::BadWord(format!("label {:?} used twice", e.label)));
            }
            ends[idx] = Some((e.from, e.to));
        }
        let mut forbidden = Vec::new();
        for (a, ea) in ends.iter().enumerate() {
            let Some((_, ta)) = ea else {
                forbidden.push(alphabet[a].clone());
                continue;
            };
            for (b, eb) in ends.iter().enumerate() {
                if let Some((sb, _)) = eb {
                    if sb != ta {
                        forbidden.push(format!("{}{}", alphabet[a], alphabet[b]));
                    }
                }
            }
        }
        Self::new(alphabet, &forbidden)
    }

    fn build(alphabet: Vec<String>, forbidden: Vec<Word>) -> Result<Self> {
        let k = alphabet.len() as u64;
        let memory = forbidden
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        let modulus = k
            .checked_pow(memory as u32 + 1)
            .filter(|m| *m <= MAX_TABLE)
            .ok_or_else(|| Error::BadWord("forbidden words too long for this alphabet".into()))?;
        let fset: HashSet<&[Symbol]> = forbidden.iter().map(Vec::as_slice).collect();
        let locally_ok = |w: &[Symbol]| {
            for i in 0..w.len() {
                for j in i + 1..=w.len() {
                    if fset.contains(&w[i..j]) {
                        return false;
                    }
                }
            }
            true
        };

        // locally admissible states and edges
        let mut states: BTreeSet<Word> = all_words(k as usize, memory)
            .into_iter()
            .filter(|w| locally_ok(w))
            .collect();
        let edges: Vec<Word> = all_words(k as usize, memory + 1)
            .into_iter()
            .filter(|w| locally_ok(w))
            .collect();
        loop {
            let mut has_out = HashSet::new();
            let mut has_in = HashSet::new();
            for e in &edges {
                let (src, dst) = (&e[..memory], &e[1..]);
                if states.contains(src) && states.contains(dst) {
                    has_out.insert(src.to_vec());
                    has_in.insert(dst.to_vec());
                }
            }
            let before = states.len();
            states.retain(|s| has_out.contains(s) && has_in.contains(s));
            if states.len() == before {
                break;
            }
        }
        if states.is_empty() {
            return Err(Error::EmptySubshift);
        }
        let mut edge_ok = vec![false; modulus as usize];
        for e in &edges {
            if states.contains(&e[..memory]) && states.contains(&e[1..]) {
                edge_ok[encode(k, e) as usize] = true;
            }
        }
        let mut short_ok = HashSet::new();
        for s in &states {
            for l in 0..=s.len() {
                short_ok.insert(s[..l].to_vec());
            }
        }
        let states: Vec<Word> = states.into_iter().collect();
        let next = states
            .iter()
            .map(|s| {
                (0..k as Symbol)
                    .map(|a| {
                        let mut e = s.clone();
                        e.push(a);
                        if !edge_ok[encode(k, &e) as usize] {
                            return None;
                        }
                        states.binary_search_by(|t| t.as_slice().cmp(&e[1..])).ok()
                    })
                    .collect()
            })
            .collect();
        Ok(EdgeShift {
            alphabet,
            forbidden,
            memory,
            states,
            edge_ok,
            short_ok,
            modulus,
            next,
        })
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            alphabet: self.alphabet.clone(),
            forbidden: Some(self.forbidden_strings()),
            graph: None,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    pub fn forbidden_strings(&self) -> Vec<String> {
        self.forbidden.iter().map(|w| self.format_word(w)).collect()
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// States of the pruned de Bruijn graph.
    pub fn states(&self) -> &[Word] {
        &self.states
    }

    /// Edges of the pruned de Bruijn graph as `(source, target, symbol)`.
    pub fn graph_edges(&self) -> Vec<(usize, usize, Symbol)> {
        let mut out = Vec::new();
        for (i, row) in self.next.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(j) = t {
                    out.push((i, *j, a as Symbol));
                }
            }
        }
        out
    }

    /// State reached from state `s` by reading `a`, if that edge exists.
    pub fn step(&self, s: usize, a: Symbol) -> Option<usize> {
        self.next[s][a as usize]
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        parse_with(&self.alphabet, s)
    }

    pub fn format_word(&self, w: &[Symbol]) -> String {
        w.iter()
            .map(|&a| self.alphabet[a as usize].as_str())
            .collect()
    }

    fn window_ok(&self, w: &[Symbol]) -> bool {
        debug_assert_eq!(w.len(), self.memory + 1);
        self.edge_ok[encode(self.alphabet.len() as u64, w) as usize]
    }

    /// True when the word occurs in some point of the shift.
    pub fn is_allowed(&self, w: &[Symbol]) -> bool {
        if w.iter().any(|&a| a as usize >= self.alphabet.len()) {
            return false;
        }
        let m = self.memory;
        if w.len() <= m {
            return self.short_ok.contains(w);
        }
        let k = self.alphabet.len() as u64;
        let mut code = encode(k, &w[..m]);
        for &a in &w[m..] {
            code = (code * k + a as u64) % self.modulus;
            if !self.edge_ok[code as usize] {
                return false;
            }
        }
        true
    }

    /// Whether `w · a` is allowed, given that `w` is.
    pub fn extends_right(&self, w: &[Symbol], a: Symbol) -> bool {
        let m = self.memory;
        if w.len() < m {
            let mut v = w.to_vec();
            v.push(a);
            return self.short_ok.contains(&v);
        }
        let mut v = w[w.len() - m..].to_vec();
        v.push(a);
        self.window_ok(&v)
    }

    /// Whether `a · w` is allowed, given that `w` is.
    pub fn extends_left(&self, a: Symbol, w: &[Symbol]) -> bool {
        let m = self.memory;
        let mut v = Vec::with_capacity(m + 1);
        v.push(a);
        if w.len() < m {
            v.extend_from_slice(w);
            return self.short_ok.contains(&v);
        }
        v.extend_from_slice(&w[..m]);
        self.window_ok(&v)
    }

    /// All allowed words of a length, in lexicographic order.
    pub fn allowed_words(&self, len: usize) -> Vec<Word> {
        self.right_extensions(&[], len)
    }

    /// Allowed words `w · u` with `|u| = extra`, in lexicographic order.
    pub fn right_extensions(&self, w: &[Symbol], extra: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut cur = w.to_vec();
        self.extend_rec(&mut cur, w.len() + extra, &mut out);
        out
    }

    fn extend_rec(&self, cur: &mut Word, target: usize, out: &mut Vec<Word>) {
        if cur.len() == target {
            out.push(cur.clone());
            return;
        }
        for a in 0..self.alphabet_size() as Symbol {
            if self.extends_right(cur, a) {
                cur.push(a);
                self.extend_rec(cur, target, out);
                cur.pop();
            }
        }
    }

    /// Allowed words `u · w` with `|u| = extra`, in lexicographic order.
    pub fn left_extensions(&self, w: &[Symbol], extra: usize) -> Vec<Word> {
        let mut level = vec![w.to_vec()];
        for _ in 0..extra {
            let mut next = Vec::new();
            for v in &level {
                for a in 0..self.alphabet_size() as Symbol {
                    if self.extends_left(a, v) {
                        let mut u = Vec::with_capacity(v.len() + 1);
                        u.push(a);
                        u.extend_from_slice(v);
                        next.push(u);
                    }
                }
            }
            level = next;
        }
        level.sort();
        level
    }

    /// Whether the periodic point `w^∞` belongs to the shift.
    pub fn cycle_allowed(&self, w: &[Symbol]) -> bool {
        if w.is_empty() {
            return false;
        }
        let reps = 2 + self.memory / w.len();
        let rep: Word = w.iter().copied().cycle().take(reps * w.len()).collect();
        self.is_allowed(&rep)
    }

    /// All periodic orbits of least period `<= max_period`, ordered by
    /// period and then by their minimal rotation.
    pub fn periodic_orbits(&self, max_period: usize) -> Vec<PeriodicOrbit> {
        let mut out: Vec<PeriodicOrbit> = lyndon_words(self.alphabet_size(), max_period)
            .into_iter()
            .filter(|w| self.cycle_allowed(w))
            .map(|word| PeriodicOrbit { word })
            .collect();
        out.sort_by(|a, b| {
            a.word
                .len()
                .cmp(&b.word.len())
                .then_with(|| a.word.cmp(&b.word))
        });
        out
    }
}

fn parse_with(alphabet: &[String], s: &str) -> Result<Word> {
    s.chars()
        .map(|c| {
            alphabet
                .iter()
                .position(|a| a.starts_with(c))
                .map(|i| i as Symbol)
                .ok_or_else(|| {
                    Error::BadWord(format!("symbol {c:?} in {s:?} is not in the alphabet"))
                })
        })
        .collect()
}

fn encode(k: u64, w: &[Symbol]) -> u64 {
    w.iter().fold(0, |acc, &a| acc * k + a as u64)
}

fn all_words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as Symbol).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Lyndon words of length `1..=n` over `k` letters (Fredricksen–Kessler–Maiorana).
pub fn lyndon_words(k: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if k == 0 || n == 0 {
        return out;
    }
    let mut w: Vec<isize> = vec![-1];
    while !w.is_empty() {
        let last = w.len() - 1;
        w[last] += 1;
        out.push(w.iter().map(|&a| a as Symbol).collect());
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&l) = w.last() {
            if l == k as isize - 1 {
                w.pop();
            } else {
                break;
            }
        }
    }
    out
}

/// True when the word is not a proper power of a shorter word.
pub fn is_primitive(w: &[Symbol]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n)
        .filter(|d| n.is_multiple_of(*d))
        .all(|d| (0..n).any(|i| w[i] != w[i % d]))
}

/// Least period of the bi-infinite repetition of `w`.
pub fn least_period(w: &[Symbol]) -> usize {
    let n = w.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (0..n).all(|i| w[i] == w[i % d]))
        .unwrap_or(n)
}

/// A periodic orbit, named by its lexicographically least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    word: Word,
}

impl PeriodicOrbit {
    /// Orbit of `w^∞`; `w` is reduced to its primitive root and rotated
    /// to the minimal rotation.
    pub fn from_word(w: &[Symbol]) -> Self {
        assert!(!w.is_empty(), "periodic word must be nonempty");
        let p = least_period(w);
        let root = &w[..p];
        let word = (0..p).map(|r| rotate(root, r)).min().expect("nonempty");
        PeriodicOrbit { word }
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// The `p` phase-distinct points; phase `r` has `x_0 = word[r]`.
    pub fn points(&self) -> Vec<PeriodicPoint> {
        (0..self.period())
            .map(|phase| PeriodicPoint {
                word: self.word.clone(),
                phase,
            })
            .collect()
    }
}

/// A periodic point: `x_i = word[(phase + i) mod p]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicPoint {
    pub word: Word,
    pub phase: usize,
}

impl PeriodicPoint {
    /// The point with `x_0 .. x_{p-1} = w`.
    pub fn from_word(w: &[Symbol]) -> Self {
        PeriodicPoint {
            word: w.to_vec(),
            phase: 0,
        }
    }

    pub fn at(&self, i: i64) -> Symbol {
        let p = self.word.len() as i64;
        self.word[(self.phase as i64 + i).rem_euclid(p) as usize]
    }

    pub fn period(&self) -> usize {
        least_period(&self.word)
    }

    /// `x_0 .. x_{p-1}`.
    pub fn block(&self) -> Word {
        rotate(&self.word, self.phase)
    }

    /// Coordinates `lo ..= hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Word {
        (lo..=hi).map(|i| self.at(i)).collect()
    }

    /// Image under `σ^steps`.
    pub fn shifted(&self, steps: i64) -> Self {
        let p = self.word.len() as i64;
        PeriodicPoint {
            word: self.word.clone(),
            phase: (self.phase as i64 + steps).rem_euclid(p) as usize,
        }
    }

    pub fn orbit(&self) -> PeriodicOrbit {
        PeriodicOrbit::from_word(&self.word)
    }

    /// Same point, with `word` the primitive block starting at coordinate 0.
    pub fn normalized(&self) -> Self {
        let b = self.block();
        let p = least_period(&b);
        PeriodicPoint {
            word: b[..p].to_vec(),
            phase: 0,
        }
    }
}

fn rotate(w: &[Symbol], r: usize) -> Word {
    let mut v = w[r..].to_vec();
    v.extend_from_slice(&w[..r]);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> EdgeShift {
        EdgeShift::new(&["0", "1"], &["11"]).unwrap()
    }

    #[test]
    fn golden_mean_graph() {
        let g = golden();
        assert_eq!(g.memory(), 1);
        assert_eq!(g.states(), &[vec![0], vec![1]]);
        let mut edges: Vec<_> = g
            .graph_edges()
            .into_iter()
            .map(|(a, b, _)| (a, b))
            .collect();
        edges.sort();
        assert_eq!(edges, vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn full_shift_single_state() {
        let f = EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap();
        assert_eq!(f.memory(), 0);
        assert_eq!(f.states().len(), 1);
        assert_eq!(f.graph_edges().len(), 2);
    }

    #[test]
    fn empty_and_bad() {
        assert_eq!(
            EdgeShift::new(&["0"], &["00"]).unwrap_err(),
            Error::EmptySubshift
        );
        assert!(matches!(
            EdgeShift::new(&["0", "1"], &["12"]),
            Err(Error::BadWord(_))
        ));
        assert!(matches!(
            EdgeShift::new(&["0", "0"], &["01"]),
            Err(Error::BadWord(_))
        ));
    }

    #[test]
    fn pruning_removes_dead_ends() {
        // "2" can only be followed by "2"... but 22 is forbidden
        let s = EdgeShift::new(&["0", "1", "2"], &["20", "21", "22"]).unwrap();
        assert!(!s.is_allowed(&[2]));
        assert!(s.is_allowed(&[0, 1, 1, 0]));
    }

    #[test]
    fn allowed_word_lists() {
        let g = golden();
        assert_eq!(g.allowed_words(2), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let f = EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap();
        assert_eq!(f.allowed_words(1), vec![vec![0], vec![1]]);
        assert_eq!(f.allowed_words(3).len(), 8);
    }

    #[test]
    fn orbits_small() {
        let f = EdgeShift::new::<&str>(&["0", "1"], &[]).unwrap();
        let o: Vec<Word> = f
            .periodic_orbits(2)
            .iter()
            .map(|o| o.word().to_vec())
            .collect();
        assert_eq!(o, vec![vec![0], vec![1], vec![0, 1]]);
        let g = golden();
        let o: Vec<Word> = g
            .periodic_orbits(2)
            .iter()
            .map(|o| o.word().to_vec())
            .collect();
        assert_eq!(o, vec![vec![0], vec![0, 1]]);
        let counts: Vec<usize> = (1..=6)
            .map(|p| {
                f.periodic_orbits(6)
                    .iter()
                    .filter(|o| o.period() == p)
                    .count()
            })
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn graph_presentation() {
        // two vertices, a: 0->0, b: 0->1, c: 1->0  (golden mean as an edge shift)
        let spec = GraphSpec {
            vertices: 2,
            edges: vec![
                GraphEdge {
                    from: 0,
                    to: 0,
                    label: "a".into(),
                },
                GraphEdge {
                    from: 0,
                    to: 1,
                    label: "b".into(),
                },
                GraphEdge {
                    from: 1,
                    to: 0,
                    label: "c".into(),
                },
            ],
        };
        let alpha: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let s = EdgeShift::from_graph(&alpha, &spec).unwrap();
        assert!(s.is_allowed(&s.parse_word("abcab").unwrap()));
        assert!(!s.is_allowed(&s.parse_word("bb").unwrap()));
    }

    #[test]
    fn periodic_point_helpers() {
        let p = PeriodicPoint {
            word: vec![0, 1, 1],
            phase: 1,
        };
        assert_eq!(p.block(), vec![1, 1, 0]);
        assert_eq!(p.at(-1), 0);
        assert_eq!(p.shifted(2).block(), vec![0, 1, 1]);
        assert_eq!(p.orbit().word(), &[0, 1, 1]);
        assert!(is_primitive(&[0, 1]));
        assert!(!is_primitive(&[0, 1, 0, 1]));
    }
}
