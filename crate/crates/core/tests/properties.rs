use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bvkr::basic::{
    basic_set_outer_approx, compare_periodic, excluding_shift_of, inf_orbit_periodic, BasicParams,
};
use bvkr::bratteli::{
    decode_prefix, diagram_from_kr, encode_point, finite_paths, stationary, vershik_successor,
    DiagramJson, FinitePath, OrderedBratteliDiagram, Successor,
};
use bvkr::io::{load_system, BasicApproxJson, KrJson, SectionsJson};
use bvkr::towers::{build_kr_refinement, verify_kr, Provenance, QuasiSectionApprox};
use bvkr::{is_complete_section, ClopenSet, EdgeShift, PeriodicPoint, Symbol};

const SPAN: i64 = 4;

fn system(i: usize) -> Arc<EdgeShift> {
    load_system(["full-2", "golden-mean", "full-3"][i]).unwrap()
}

/// A set as raw data: first coordinate and a word mask over `allowed_words(len)`.
#[derive(Debug, Clone)]
struct Raw {
    lo: i64,
    words: Vec<Vec<Symbol>>,
}

fn raw(shift: &EdgeShift, lo: i64, len: usize, mask: u64) -> Raw {
    let words = shift
        .allowed_words(len)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
        .map(|(_, w)| w)
        .collect();
    Raw { lo, words }
}

fn member(r: &Raw, window: &[Symbol]) -> bool {
    let start = (r.lo + SPAN) as usize;
    r.words
        .iter()
        .any(|w| window[start..start + w.len()] == w[..])
}

fn windows(shift: &EdgeShift) -> Vec<Vec<Symbol>> {
    shift.allowed_words((2 * SPAN + 1) as usize)
}

fn raw_strategy() -> impl Strategy<Value = (usize, (i64, usize, u64), (i64, usize, u64))> {
    let one = (-2i64..=1, 1usize..=3, any::<u64>());
    (0usize..2, one.clone(), one)
}

/// Paths into each vertex sorted by edge orders read from the top level down.
fn sorted_paths(d: &OrderedBratteliDiagram, n: usize) -> BTreeMap<usize, Vec<FinitePath>> {
    let mut by_range: BTreeMap<usize, Vec<(Vec<usize>, FinitePath)>> = BTreeMap::new();
    for p in finite_paths(d, n) {
        let key = (1..=n)
            .rev()
            .map(|k| d.edges(k)[p.edges[k - 1]].order)
            .collect();
        by_range.entry(d.range_of(&p)).or_default().push((key, p));
    }
    by_range
        .into_iter()
        .map(|(v, mut ps)| {
            ps.sort();
            (v, ps.into_iter().map(|(_, p)| p).collect())
        })
        .collect()
}

fn diagram_strategy() -> impl Strategy<Value = OrderedBratteliDiagram> {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec(1usize..=2, k),
                proptest::collection::vec(proptest::collection::vec(0..k, 1..=3), k),
                2usize..=5,
            )
        })
        .prop_filter("every vertex needs an outgoing edge", |(_, inc, _)| {
            (0..inc.len()).all(|s| inc.iter().any(|l| l.contains(&s)))
        })
        .prop_map(|(first, inc, depth)| {
            let names: Vec<String> = (0..first.len()).map(|i| format!("v{i}")).collect();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let inc: Vec<&[usize]> = inc.iter().map(Vec::as_slice).collect();
            stationary(&names, &first, &inc, depth)
        })
}

/// Random nested complete sections over the golden mean shift.
fn golden_sections(seed: u64, depth: usize) -> QuasiSectionApprox {
    let g = load_system("golden-mean").unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        let mut levels: Vec<ClopenSet> = Vec::new();
        for n in 1..=depth {
            let keep: Vec<_> = g
                .allowed_words(2 * n + 1)
                .into_iter()
                .filter(|_| rng.gen_bool(0.6))
                .collect();
            let mut a = ClopenSet::from_words(&g, -(n as i64), keep);
            if let Some(prev) = levels.last() {
                a = a.intersection(prev);
            }
            levels.push(a);
        }
        if let Ok(qs) = QuasiSectionApprox::new(levels, Provenance::UserSupplied) {
            return qs;
        }
    }
}

fn snake_entries(p: &PeriodicPoint, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    for i in 0..=n as i64 {
        let mut shell: Vec<(i64, i64)> = (0..=i)
            .flat_map(|k| (-i..=i).map(move |j| (k, j)))
            .filter(|&(k, j)| k.max(j.abs()) == i)
            .collect();
        shell.sort_by_key(|&(k, j)| match (j == -i, k == i) {
            (true, _) => (0, k),
            (false, true) => (1, j),
            _ => (2, -k),
        });
        out.extend(shell.into_iter().map(|(k, j)| p.window(j - k, j + k)));
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clopen_algebra_matches_windows((sys, (lo1, l1, m1), (lo2, l2, m2)) in raw_strategy()) {
        let shift = system(sys);
        let (ra, rb) = (raw(&shift, lo1, l1, m1), raw(&shift, lo2, l2, m2));
        let a = ClopenSet::from_words(&shift, ra.lo, ra.words.clone());
        let b = ClopenSet::from_words(&shift, rb.lo, rb.words.clone());
        let ops = [a.union(&b), a.intersection(&b), a.complement(), a.difference(&b)];
        let (mut sub, mut meet) = (true, false);
        for w in windows(&shift) {
            let (x, y) = (member(&ra, &w), member(&rb, &w));
            let want = [x || y, x && y, !x, x && !y];
            for (set, want) in ops.iter().zip(want) {
                prop_assert_eq!(set.contains_window(-SPAN, &w), Some(want));
            }
            sub &= !x || y;
            meet |= x && y;
            for s in -1i64..=1 {
                prop_assert_eq!(
                    a.shift_image(s).contains_window(-SPAN - s, &w),
                    a.contains_window(-SPAN, &w)
                );
            }
        }
        prop_assert_eq!(a.is_subset(&b), sub);
        prop_assert_eq!(a.intersects(&b), meet);
        prop_assert_eq!(a.complement().complement(), a.clone());
        let text = a.to_string();
        prop_assert_eq!(ClopenSet::parse(&shift, &text).unwrap(), a);
    }

    #[test]
    fn completeness_matches_shift_images((sys, (lo, len, mask), _) in raw_strategy()) {
        let shift = system(sys);
        let r = raw(&shift, lo, len, mask);
        let u = ClopenSet::from_words(&shift, r.lo, r.words);
        let rep = is_complete_section(&u);
        let cover = |n: usize, back: bool| {
            (0..n as i64)
                .map(|i| u.shift_image(if back { -i } else { i }))
                .fold(ClopenSet::empty(&shift), |acc, s| acc.union(&s))
                .is_full()
        };
        if rep.complete {
            for (bound, back) in [(rep.forward_bound, false), (rep.backward_bound, true)] {
                let n = bound.unwrap();
                prop_assert!(cover(n, back));
                prop_assert!(n == 1 || !cover(n - 1, back));
            }
        } else {
            let o = rep.witness_cycle.unwrap();
            prop_assert!(shift.cycle_allowed(o.word()));
            for p in o.points() {
                prop_assert!(!u.contains_point(&p));
            }
        }
    }

    #[test]
    fn vershik_follows_sorted_paths(d in diagram_strategy()) {
        let counts = d.path_counts();
        for n in 1..=d.depth() {
            for ps in sorted_paths(&d, n).values() {
                for (i, p) in ps.iter().enumerate() {
                    prop_assert_eq!(d.rank(p, &counts), i as u128);
                    let got = vershik_successor(&d, p).unwrap();
                    match ps.get(i + 1) {
                        Some(q) => prop_assert_eq!(got, Successor::Next(q.clone())),
                        None => prop_assert_eq!(got, Successor::MaximalAtDepth),
                    }
                }
            }
        }
        let j = DiagramJson::from(&d);
        let text = serde_json::to_string(&j).unwrap();
        let back: DiagramJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(OrderedBratteliDiagram::try_from(&back).unwrap(), d);
    }

    #[test]
    fn array_order_matches_snake_oracle(
        x in proptest::collection::vec(0u8..2, 1..=6),
        y in proptest::collection::vec(0u8..2, 1..=6),
    ) {
        let (x, y) = (PeriodicPoint::from_word(&x), PeriodicPoint::from_word(&y));
        let n = x.period() * y.period() / gcd(x.period(), y.period()) + 1;
        let want = snake_entries(&x, n).cmp(&snake_entries(&y, n));
        prop_assert_eq!(compare_periodic(&x, &y), want);
        prop_assert_eq!(want == Ordering::Equal, x.normalized() == y.normalized());
    }

    #[test]
    fn random_refinements_verify(seed in any::<u64>(), depth in 1usize..=3) {
        let qs = golden_sections(seed, depth);
        let r = build_kr_refinement(&qs, depth).unwrap();
        let rep = verify_kr(&r);
        prop_assert!(rep.is_ok(), "{:?}", rep.violation);
        let j = KrJson::from(&r);
        let back: KrJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        prop_assert_eq!(KrJson::from(&back.parse().unwrap()), j);
        let s = SectionsJson::from(&qs);
        let again = s.parse(qs.levels()[0].shift()).unwrap();
        prop_assert_eq!(again.levels(), qs.levels());
    }

    #[test]
    fn encoding_agrees_with_floors_and_shift(seed in any::<u64>(), depth in 1usize..=3) {
        let qs = golden_sections(seed, depth);
        let r = build_kr_refinement(&qs, depth).unwrap();
        let (d, coding) = diagram_from_kr(&r).unwrap();
        let g = qs.levels()[0].shift().clone();
        let half = 64;
        for o in g.periodic_orbits(5) {
            for x in o.points() {
                let code = |p: &PeriodicPoint| {
                    encode_point(-half, &p.window(-half, half), &r, &coding, depth).unwrap()
                };
                let path = code(&x);
                prop_assert!(decode_prefix(&path, &r, &coding, &d).unwrap().contains_point(&x));
                if let Successor::Next(q) = vershik_successor(&d, &path).unwrap() {
                    prop_assert_eq!(q, code(&x.shifted(1)));
                }
            }
        }
    }
}

#[test]
fn outer_approximation_is_exact_on_periodic_points() {
    for name in ["full-2", "golden-mean"] {
        let shift = load_system(name).unwrap();
        for n in 1..=3 {
            let params = BasicParams::default_for(n);
            let a = basic_set_outer_approx(&shift, n, params).unwrap();
            for o in shift.periodic_orbits(6) {
                for x in o.points() {
                    let excluded = excluding_shift_of(&x, n, params.shift_bound).is_some();
                    assert_eq!(a.surviving.contains_point(&x), !excluded, "{name} n={n}");
                }
                assert!(a.surviving.contains_point(&inf_orbit_periodic(&o)));
            }
            let j = BasicApproxJson::from(&a);
            let back: BasicApproxJson =
                serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
            assert_eq!(back.parse(&shift).unwrap().surviving, a.surviving);
        }
    }
}

#[test]
fn orbit_points_are_distinct_phases() {
    let shift = load_system("full-3").unwrap();
    for o in shift.periodic_orbits(4) {
        let pts = o.points();
        assert_eq!(pts.len(), o.period());
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.orbit(), o);
            assert_eq!(p.shifted(o.period() as i64), *p);
            assert!(pts[..i].iter().all(|q| q != p));
        }
    }
}
