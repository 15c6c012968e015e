//! The array order on points and the basic set of orbit infima.
//!
//! Entry `(k, j)` of the array of `x` is the central word `x[j-k ..= j+k]`.
//! Entries are read shell by shell in the snake order and compared
//! lexicographically, words being compared in the alphabet order. The set
//! `B = {x : x is the least point of its orbit}` is approximated from
//! outside by discarding points some nearby shift of which is smaller.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clopen::{ClopenSet, Cylinder};
use crate::error::{Error, Result};
use crate::partial::PartialPoint;
use crate::shift::{EdgeShift, PeriodicOrbit, PeriodicPoint, Symbol};
use crate::towers::{Provenance, QuasiSectionApprox};

/// Array positions `(k, j)` of the shells `0..=n` in counting order.
pub fn snake_positions(n: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0, 0)];
    for i in 1..=n {
        let ii = i as i64;
        out.extend((0..=i).map(|k| (k, -ii)));
        out.extend((-ii + 1..=ii).map(|j| (i, j)));
        out.extend((0..i).rev().map(|k| (k, ii)));
    }
    out
}

/// Shell containing array position `(k, j)`.
pub fn shell_of(k: usize, j: i64) -> usize {
    k.max(j.unsigned_abs() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderResult {
    Lt,
    Gt,
    EqSoFar,
    Unresolved,
}

/// Which of the two compared points lacks a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderVerdict {
    pub result: OrderResult,
    /// Deciding array position for strict results; blocking position
    /// for unresolved ones.
    pub position: Option<(usize, i64)>,
    pub shell: Option<usize>,
    /// 1-based index of `position` in the counting order.
    pub index: Option<usize>,
    /// Missing coordinate, for unresolved results.
    pub need: Option<(Side, i64)>,
}

/// Compares the shells `0..=n` of two points given through coordinate
/// accessors, using a precomputed [`snake_positions`] list.
pub fn compare_with<F, G>(x: F, y: G, positions: &[(usize, i64)]) -> OrderVerdict
where
    F: Fn(i64) -> Option<Symbol>,
    G: Fn(i64) -> Option<Symbol>,
{
    for (idx, &(k, j)) in positions.iter().enumerate() {
        let kk = k as i64;
        for c in j - kk..=j + kk {
            let verdict = |result, need| OrderVerdict {
                result,
                position: Some((k, j)),
                shell: Some(shell_of(k, j)),
                index: Some(idx + 1),
                need,
            };
            match (x(c), y(c)) {
                (Some(a), Some(b)) => match a.cmp(&b) {
                    Ordering::Less => return verdict(OrderResult::Lt, None),
                    Ordering::Greater => return verdict(OrderResult::Gt, None),
                    Ordering::Equal => {}
                },
                (None, _) => return verdict(OrderResult::Unresolved, Some((Side::Left, c))),
                (Some(_), None) => return verdict(OrderResult::Unresolved, Some((Side::Right, c))),
            }
        }
    }
    OrderVerdict {
        result: OrderResult::EqSoFar,
        position: None,
        shell: None,
        index: None,
        need: None,
    }
}

/// Compares the truncations `x[n]` and `y[n]` of two points known on
/// windows `(first coordinate, word)`.
pub fn compare_truncated(x: (i64, &[Symbol]), y: (i64, &[Symbol]), n: usize) -> OrderVerdict {
    let get = |(lo, w): (i64, &[Symbol]), i: i64| {
        let k = i - lo;
        (k >= 0 && (k as usize) < w.len()).then(|| w[k as usize])
    };
    compare_with(|i| get(x, i), |i| get(y, i), &snake_positions(n))
}

/// Exact comparison of periodic points.
///
/// Two distinct points of periods `p` and `q` differ inside every window
/// of `p + q - 1` consecutive coordinates, so scanning the shells up to
/// `max(p, q)` reaches a difference in row 0 at the latest.
pub fn compare_periodic(x: &PeriodicPoint, y: &PeriodicPoint) -> Ordering {
    let n = x.period().max(y.period());
    let v = compare_with(|i| Some(x.at(i)), |i| Some(y.at(i)), &snake_positions(n));
    match v.result {
        OrderResult::Lt => Ordering::Less,
        OrderResult::Gt => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// The least point of a periodic orbit in the array order.
pub fn inf_orbit_periodic(o: &PeriodicOrbit) -> PeriodicPoint {
    o.points()
        .into_iter()
        .min_by(compare_periodic)
        .expect("orbit is nonempty")
}

/// The unique point of the orbit lying in the basic set. Every given
/// approximation is checked to contain it.
pub fn basic_membership_periodic(
    o: &PeriodicOrbit,
    approx: &[BasicApprox],
) -> Result<PeriodicPoint> {
    let p = inf_orbit_periodic(o);
    for a in approx {
        if !a.surviving.contains_point(&p) {
            return Err(Error::InvalidParams(format!(
                "orbit infimum escapes the depth-{} approximation",
                a.depth
            )));
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicParams {
    pub shift_bound: usize,
    pub window: usize,
}

impl BasicParams {
    /// `M = n`, `W = 6n`.
    pub fn default_for(n: usize) -> Self {
        BasicParams {
            shift_bound: n,
            window: 6 * n,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.window < 4 * n + 2 * self.shift_bound {
            return Err(Error::InvalidParams(format!(
                "window {} is below 4n + 2M = {}",
                self.window,
                4 * n + 2 * self.shift_bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BasicApprox {
    pub depth: usize,
    pub params: BasicParams,
    pub surviving: ClopenSet,
}

/// Shifts `1, -1, 2, -2, ..., M, -M`.
fn shifts(m: usize) -> Vec<i64> {
    (1..=m as i64).flat_map(|s| [s, -s]).collect()
}

/// The shift `m` with `σ^m x < x` at shell `n`, if some `|m| <= M`
/// qualifies; `Err` carries a coordinate that must be known first.
fn excluding_shift<F>(
    get: F,
    positions: &[(usize, i64)],
    ms: &[i64],
) -> std::result::Result<Option<i64>, i64>
where
    F: Fn(i64) -> Option<Symbol>,
{
    let mut pending = None;
    for &m in ms {
        let v = compare_with(|c| get(c + m), &get, positions);
        match v.result {
            OrderResult::Lt => return Ok(Some(m)),
            OrderResult::Unresolved if pending.is_none() => {
                pending = v
                    .need
                    .map(|(side, c)| if side == Side::Left { c + m } else { c });
            }
            _ => {}
        }
    }
    match pending {
        Some(c) => Err(c),
        None => Ok(None),
    }
}

/// The shift excluding a fully known point at shell `n`, if any.
pub fn excluding_shift_of(p: &PeriodicPoint, n: usize, shift_bound: usize) -> Option<i64> {
    excluding_shift(|i| Some(p.at(i)), &snake_positions(n), &shifts(shift_bound))
        .expect("periodic points are fully known")
}

/// The outer approximation `B̂_n`: all points `x` such that no `σ^m x`
/// with `1 <= |m| <= M` is smaller than `x` at shell `n`.
///
/// Every such comparison reads only coordinates in `[-(2n+M), 2n+M]`,
/// which the window covers by precondition, so membership is decided
/// exactly for each window word. Words are explored lazily, fixing only
/// the coordinates some comparison asks for.
pub fn basic_set_outer_approx(
    shift: &Arc<EdgeShift>,
    n: usize,
    params: BasicParams,
) -> Result<BasicApprox> {
    params.check(n)?;
    let positions = snake_positions(n);
    let ms = shifts(params.shift_bound);
    let starts: Vec<PartialPoint> = shift
        .allowed_words(1)
        .into_iter()
        .map(|w| PartialPoint::from_word(0, &w))
        .collect();
    let survivors: Vec<Vec<PartialPoint>> = starts
        .into_par_iter()
        .map(|p| {
            let mut out = Vec::new();
            explore(shift, &positions, &ms, p, &mut out);
            out
        })
        .collect();
    let mut cyls = Vec::new();
    for p in survivors.into_iter().flatten() {
        for (lo, w) in completions(shift, &p) {
            cyls.push(Cylinder {
                word: w,
                offset: lo,
            });
        }
    }
    Ok(BasicApprox {
        depth: n,
        params,
        surviving: ClopenSet::from_cylinders(shift, &cyls),
    })
}

fn explore(
    shift: &EdgeShift,
    positions: &[(usize, i64)],
    ms: &[i64],
    p: PartialPoint,
    out: &mut Vec<PartialPoint>,
) {
    match excluding_shift(|i| p.get(i), positions, ms) {
        Ok(Some(_)) => {}
        Ok(None) => out.push(p),
        Err(c) => {
            for a in 0..shift.alphabet_size() as Symbol {
                let q = p.with(c, a);
                if q.consistent(shift) {
                    explore(shift, positions, ms, q, out);
                }
            }
        }
    }
}

/// All contiguous allowed words agreeing with the known coordinates.
fn completions(shift: &EdgeShift, p: &PartialPoint) -> Vec<(i64, Vec<Symbol>)> {
    let (lo, cells) = p.span();
    let mut words: Vec<Vec<Symbol>> = vec![Vec::new()];
    for c in cells {
        let mut next = Vec::new();
        for w in &words {
            let range: Vec<Symbol> = match c {
                Some(a) => vec![*a],
                None => (0..shift.alphabet_size() as Symbol).collect(),
            };
            for a in range {
                if shift.extends_right(w, a) {
                    let mut v = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
        }
        words = next;
    }
    words.into_iter().map(|w| (lo, w)).collect()
}

/// `B̂_1 ⊇ ... ⊇ B̂_max_depth`, each checked to be a complete section.
pub fn quasi_section_from_basic(
    shift: &Arc<EdgeShift>,
    max_depth: usize,
    params: &dyn Fn(usize) -> BasicParams,
) -> Result<(QuasiSectionApprox, Vec<BasicApprox>)> {
    let approx: Vec<BasicApprox> = (1..=max_depth)
        .map(|n| basic_set_outer_approx(shift, n, params(n)))
        .collect::<Result<_>>()?;
    let levels = approx.iter().map(|a| a.surviving.clone()).collect();
    let qs = QuasiSectionApprox::new(levels, Provenance::BasicSet)?;
    Ok((qs, approx))
}
