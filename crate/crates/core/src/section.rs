//! Central-cylinder partitions and the complete-section test.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::clopen::ClopenSet;
use crate::shift::{EdgeShift, PeriodicOrbit, Symbol, Word};

/// Words naming the cells of `P_k`: allowed words of length `2k+1`,
/// read at offset `-k`. `P_0` has the single empty word (the cell `X`).
pub fn cell_words(shift: &EdgeShift, k: usize) -> Vec<Word> {
    if k == 0 {
        return vec![Vec::new()];
    }
    shift.allowed_words(2 * k + 1)
}

/// The partition `P_k` as clopen sets, in word order.
pub fn cylinder_partition(shift: &Arc<EdgeShift>, k: usize) -> Vec<ClopenSet> {
    if k == 0 {
        return vec![ClopenSet::full(shift)];
    }
    cell_words(shift, k)
        .into_iter()
        .map(|w| ClopenSet::from_words(shift, -(k as i64), vec![w]))
        .collect()
}

/// The `P_k` cell of a point given its coordinates `-k ..= k`.
pub fn cell_of(window: &[Symbol], k: usize) -> &[Symbol] {
    &window[..2 * k + 1]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub complete: bool,
    /// `N` with `X = ∪_{0 <= i < N} σ^i(U)`.
    pub forward_bound: Option<usize>,
    /// `N` with `X = ∪_{0 <= i < N} σ^{-i}(U)`.
    pub backward_bound: Option<usize>,
    /// A periodic orbit that never enters `U`.
    pub witness_cycle: Option<PeriodicOrbit>,
}

/// Aho–Corasick automaton over the reversed words of `U`, so that reading a
/// point right to left reports exactly the coordinates where `U` starts.
struct Matcher {
    goto: Vec<Vec<usize>>,
    hit: Vec<bool>,
}

impl Matcher {
    fn new(k: usize, patterns: &[Word]) -> Self {
        let mut next: Vec<Vec<usize>> = vec![vec![usize::MAX; k]];
        let mut hit = vec![false];
        for p in patterns {
            let mut q = 0;
            for &a in p.iter().rev() {
                if next[q][a as usize] == usize::MAX {
                    next[q][a as usize] = next.len();
                    next.push(vec![usize::MAX; k]);
                    hit.push(false);
                }
                q = next[q][a as usize];
            }
            hit[q] = true;
        }
        let mut fail = vec![0; next.len()];
        let mut goto = next.clone();
        let mut queue = VecDeque::new();
        for a in 0..k {
            match next[0][a] {
                usize::MAX => goto[0][a] = 0,
                c => {
                    fail[c] = 0;
                    queue.push_back(c);
                }
            }
        }
        while let Some(q) = queue.pop_front() {
            hit[q] = hit[q] || hit[fail[q]];
            for a in 0..k {
                match next[q][a] {
                    usize::MAX => goto[q][a] = goto[fail[q]][a],
                    c => {
                        fail[c] = goto[fail[q]][a];
                        queue.push_back(c);
                    }
                }
            }
        }
        Matcher { goto, hit }
    }
}

/// Decides whether `U` is a complete section.
///
/// Reading points right to left, a coordinate is a hit when some word of
/// `U` starts there. `U` is complete iff every point has hits at bounded
/// gaps; the bound is the longest hit-free run plus one. An unbounded run
/// shows up as a cycle, which yields a periodic point avoiding `U`.
pub fn is_complete_section(u: &ClopenSet) -> CompletenessReport {
    let shift = u.shift();
    let k = shift.alphabet_size();
    let m = shift.memory();
    let ac = Matcher::new(k, u.words());
    let states = shift.states();
    let index: HashMap<&[Symbol], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let max_len = u.words().iter().map(Vec::len).max().unwrap_or(0);

    // product node = (automaton state, index of the m symbols to the right)
    let step = |(q, h): (usize, usize), a: Symbol| -> Option<(usize, usize)> {
        let hist = &states[h];
        if !shift.extends_left(a, hist) {
            return None;
        }
        let mut nh = Vec::with_capacity(m);
        if m > 0 {
            nh.push(a);
            nh.extend_from_slice(&hist[..m - 1]);
        }
        Some((ac.goto[q][a as usize], index[nh.as_slice()]))
    };

    let mut layer: Vec<(usize, usize)> = states
        .iter()
        .enumerate()
        .map(|(h, s)| (s.iter().rev().fold(0, |q, &a| ac.goto[q][a as usize]), h))
        .collect();
    for _ in 0..max_len.saturating_sub(1).saturating_sub(m) {
        let mut next: Vec<(usize, usize)> = layer
            .iter()
            .flat_map(|&v| (0..k as Symbol).filter_map(move |a| step(v, a)))
            .collect();
        next.sort_unstable();
        next.dedup();
        layer = next;
    }

    // closure of the settled layer
    let mut id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    for v in layer {
        id.insert(v, nodes.len());
        nodes.push(v);
        queue.push_back(v);
    }
    // hit-free edges only
    let mut adj: Vec<Vec<(usize, Symbol)>> = Vec::new();
    while let Some(v) = queue.pop_front() {
        let i = id[&v];
        adj.resize(nodes.len(), Vec::new());
        for a in 0..k as Symbol {
            if let Some(w) = step(v, a) {
                let j = *id.entry(w).or_insert_with(|| {
                    nodes.push(w);
                    queue.push_back(w);
                    nodes.len() - 1
                });
                if !ac.hit[w.0] {
                    adj.resize(nodes.len(), Vec::new());
                    adj[i].push((j, a));
                }
            }
        }
    }
    adj.resize(nodes.len(), Vec::new());

    // Kahn's algorithm; leftovers contain a cycle
    let n = nodes.len();
    let mut indeg = vec![0usize; n];
    for es in &adj {
        for &(j, _) in es {
            indeg[j] += 1;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    while let Some(i) = stack.pop() {
        order.push(i);
        for &(j, _) in &adj[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    if order.len() < n {
        return CompletenessReport {
            complete: false,
            forward_bound: None,
            backward_bound: None,
            witness_cycle: Some(find_cycle(&adj, &indeg)),
        };
    }
    let mut longest = vec![0usize; n];
    for &i in order.iter().rev() {
        longest[i] = adj[i]
            .iter()
            .map(|&(j, _)| 1 + longest[j])
            .max()
            .unwrap_or(0);
    }
    let run = longest.into_iter().max().unwrap_or(0);
    CompletenessReport {
        complete: true,
        forward_bound: Some(run + 1),
        backward_bound: Some(run + 1),
        witness_cycle: None,
    }
}

/// A cycle among nodes that survived Kahn's algorithm, as the orbit of the
/// symbols it reads.
fn find_cycle(adj: &[Vec<(usize, Symbol)>], indeg: &[usize]) -> PeriodicOrbit {
    let alive = |i: usize| indeg[i] > 0;
    let mut pred: Vec<Option<(usize, Symbol)>> = vec![None; adj.len()];
    for (i, es) in adj.iter().enumerate() {
        if !alive(i) {
            continue;
        }
        for &(j, a) in es {
            if alive(j) && pred[j].is_none() {
                pred[j] = Some((i, a));
            }
        }
    }
    // every live node has a live predecessor; walk back until a repeat
    let start = (0..adj.len()).find(|&i| alive(i)).expect("cycle exists");
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut symbols: Word = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&pos) = seen.get(&cur) {
            // walking backwards against right-to-left reading gives forward order
            return PeriodicOrbit::from_word(&symbols[pos..]);
        }
        seen.insert(cur, symbols.len());
        let (p, a) = pred[cur].expect("live node has a live predecessor");
        symbols.push(a);
        cur = p;
    }
}
