//! Acceptance gate: ten criteria, one line each, non-zero exit on failure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bvkr::basic::{
    basic_membership_periodic, basic_set_outer_approx, compare_periodic, compare_truncated,
    excluding_shift_of, inf_orbit_periodic, quasi_section_from_basic, BasicParams, OrderResult,
};
use bvkr::bratteli::{
    builtin_diagram, decode_prefix, diagram_from_kr, diagram_from_towers, encode_point,
    finite_paths, isomorphic_by_ids, kr_from_diagram, vershik_successor, ConjugacyCoding,
    FinitePath, OrderedBratteliDiagram, Successor, TowerSystem, BUILTIN_DIAGRAMS,
};
use bvkr::decisive::{
    check_closing, check_periodicity_regulated, cross_validate_closing_basic, Coding, Verdict,
};
use bvkr::io::load_system;
use bvkr::pipeline::{run_pipeline, PipelineConfig};
use bvkr::towers::{
    build_kr_refinement, kr_base_sets, verify_kr, KRRefinement, Provenance, QuasiSectionApprox,
};
use bvkr::{is_complete_section, ClopenSet, EdgeShift, PeriodicOrbit, PeriodicPoint, Symbol};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    ensure(
        t.elapsed() < limit,
        format!("{what} took {:?}, limit {limit:?}", t.elapsed()),
    )
}

/// A basic-set refinement with everything derived from it.
struct Built {
    name: &'static str,
    shift: Arc<EdgeShift>,
    qs: QuasiSectionApprox,
    r: KRRefinement,
    d: OrderedBratteliDiagram,
    coding: ConjugacyCoding,
    /// Periods up to which the deepest section separates orbit phases.
    period_bound: usize,
}

fn build(name: &'static str, system: &str, depth: usize, shift_bound: Option<usize>) -> Built {
    let shift = load_system(system).unwrap();
    let cfg = PipelineConfig {
        depth,
        shift_bound,
        window: None,
    };
    let (qs, _) = quasi_section_from_basic(&shift, depth, &|n| cfg.params(n)).unwrap();
    let r = build_kr_refinement(&qs, depth).unwrap();
    let (d, coding) = diagram_from_kr(&r).unwrap();
    Built {
        name,
        shift,
        qs,
        r,
        d,
        coding,
        period_bound: cfg.period_bound(),
    }
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let g = load_system("golden-mean").unwrap();
    let u = ClopenSet::parse(&g, "0@0").unwrap();
    let rep = is_complete_section(&u);
    ensure(
        rep.complete && rep.forward_bound == Some(2),
        format!("golden: {rep:?}"),
    )?;
    ensure(u.union(&u.shift_image(1)).is_full(), "U ∪ σ(U) is not X")?;
    let f = load_system("full-2").unwrap();
    let rep = is_complete_section(&ClopenSet::parse(&f, "1@0").unwrap());
    let w = rep.witness_cycle.as_ref().map(|o| o.word().to_vec());
    ensure(
        !rep.complete && w == Some(vec![0]),
        format!("full-2: {rep:?}"),
    )?;
    within(t, Duration::from_secs(1), "AC1")?;
    Ok("golden [0@0] complete with bound 2; full-2 [1@0] misses 0^inf".into())
}

fn ac2(built: &[&Built]) -> Outcome {
    let t = Instant::now();
    let mut msg = Vec::new();
    for b in built {
        let rep = verify_kr(&b.r);
        ensure(
            rep.is_ok() && b.r.depth() == 4,
            format!("{}: {:?}", b.name, rep.violation),
        )?;
        let towers: Vec<usize> = b.r.levels().iter().map(|l| l.towers.len()).collect();
        msg.push(format!("{} {towers:?}", b.name));
    }
    within(t, Duration::from_secs(30), "AC2 verification")?;
    Ok(format!("zero violations: {}", msg.join(", ")))
}

fn ac3() -> Outcome {
    let d = builtin_diagram("odometer", 5).unwrap();
    let towers = kr_from_diagram(&d, 5).unwrap();
    towers.check().map_err(|e| e.to_string())?;
    let back = diagram_from_towers(&towers).unwrap();
    ensure(
        isomorphic_by_ids(&d, &back),
        "diagram differs after the roundtrip",
    )?;
    let counts = d.path_counts();
    for (n, row) in counts.iter().enumerate() {
        let h: Vec<u128> = towers.heights(n).iter().map(|&h| h as u128).collect();
        ensure(h == *row, format!("level {n}: heights {h:?} vs {row:?}"))?;
    }
    Ok("odometer, 5 levels, isomorphic; heights equal path counts".into())
}

/// Paths into each vertex, sorted by the deepest differing edge order.
fn sorted_paths(d: &OrderedBratteliDiagram, n: usize) -> BTreeMap<usize, Vec<FinitePath>> {
    let mut by_range: BTreeMap<usize, Vec<(Vec<usize>, FinitePath)>> = BTreeMap::new();
    for p in finite_paths(d, n) {
        let key: Vec<usize> = p
            .edges
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &e)| d.edges(k + 1)[e].order)
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

fn ac4() -> Outcome {
    let mut checked = 0usize;
    for name in BUILTIN_DIAGRAMS {
        let d = builtin_diagram(name, 6).unwrap();
        for n in 1..=6 {
            for ps in sorted_paths(&d, n).values() {
                for (i, p) in ps.iter().enumerate() {
                    let got = vershik_successor(&d, p).unwrap();
                    let want = ps.get(i + 1);
                    let ok = match (&got, want) {
                        (Successor::Next(q), Some(w)) => q == w,
                        (Successor::MaximalAtDepth, None) => true,
                        _ => false,
                    };
                    ensure(ok, format!("{name} depth {n}: {p:?} -> {got:?}"))?;
                    checked += usize::from(want.is_some());
                }
            }
        }
    }
    let d = builtin_diagram("odometer", 6).unwrap();
    let bits = |p: &FinitePath| -> u32 {
        p.edges
            .iter()
            .enumerate()
            .map(|(k, &e)| ((d.edges(k + 1)[e].order - 1) as u32) << k)
            .sum()
    };
    for p in finite_paths(&d, 6) {
        match vershik_successor(&d, &p).unwrap() {
            Successor::Next(q) => ensure(bits(&q) == bits(&p) + 1, "odometer increment")?,
            Successor::MaximalAtDepth => ensure(bits(&p) == 63, "odometer carry-out")?,
        }
    }
    Ok(format!(
        "{checked} non-maximal paths; binary increment on 64 prefixes"
    ))
}

fn all_min(d: &OrderedBratteliDiagram, p: &FinitePath) -> bool {
    p.edges
        .iter()
        .enumerate()
        .all(|(k, &e)| d.edges(k + 1)[e].order == 1)
}

fn ac5(built: &[&Built]) -> Outcome {
    let mut points = 0;
    for b in built {
        for n in 1..=4.min(b.r.depth()) {
            let mins: Vec<ClopenSet> = (0..b.d.vertices(n).len())
                .map(|v| decode_prefix(&b.d.min_path(n, v), &b.r, &b.coding, &b.d).unwrap())
                .collect();
            let union = mins
                .iter()
                .fold(ClopenSet::empty(&b.shift), |acc, s| acc.union(s));
            let bases = kr_base_sets(&b.r, n);
            ensure(
                union == bases,
                format!("{} level {n}: min cylinders differ", b.name),
            )?;
            for o in b.shift.periodic_orbits(6) {
                for p in o.points() {
                    let path = encode_window(&p, &b.r, &b.coding, n)?;
                    ensure(
                        all_min(&b.d, &path) == bases.contains_point(&p),
                        format!("{} level {n}: point {:?}", b.name, p.block()),
                    )?;
                    points += 1;
                }
            }
        }
    }
    Ok(format!("levels 1..=4 equal; {points} encoded points agree"))
}

fn encode_window(
    p: &PeriodicPoint,
    r: &KRRefinement,
    coding: &ConjugacyCoding,
    n: usize,
) -> Result<FinitePath, String> {
    let mut half = 32;
    loop {
        match encode_point(-half, &p.window(-half, half), r, coding, n) {
            Err(bvkr::Error::WindowTooShort(_)) if half < 4096 => half *= 2,
            other => return other.map_err(|e| e.to_string()),
        }
    }
}

/// Snake positions built shell by shell from an explicit sort.
fn oracle_positions(n: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for i in 0..=n as i64 {
        let mut shell: Vec<(usize, i64)> = Vec::new();
        for k in 0..=i {
            for j in -i..=i {
                if k.max(j.abs()) == i {
                    shell.push((k as usize, j));
                }
            }
        }
        // left column upward, top row rightward, right column downward
        shell.sort_by_key(|&(k, j)| {
            let k = k as i64;
            if j == -i {
                (0, k)
            } else if k == i {
                (1, j)
            } else {
                (2, -k)
            }
        });
        out.extend(shell);
    }
    out
}

fn oracle_entries(p: &PeriodicPoint, n: usize) -> Vec<Vec<Symbol>> {
    oracle_positions(n)
        .into_iter()
        .map(|(k, j)| p.window(j - k as i64, j + k as i64))
        .collect()
}

fn ac6() -> Outcome {
    let t = Instant::now();
    let f = load_system("full-2").unwrap();
    let orbits = f.periodic_orbits(6);
    ensure(orbits.len() == 23, format!("{} orbits", orbits.len()))?;
    let small: BTreeMap<usize, ClopenSet> = (1..=3)
        .map(|p| {
            let a = basic_set_outer_approx(&f, p, BasicParams::default_for(p)).unwrap();
            (p, a.surviving)
        })
        .collect();
    for o in &orbits {
        let p = o.period();
        let got = basic_membership_periodic(o, &[]).map_err(|e| e.to_string())?;
        let want = o
            .points()
            .into_iter()
            .min_by_key(|x| oracle_entries(x, 2 * p))
            .unwrap();
        ensure(got == want, format!("orbit {:?}", o.word()))?;
        for x in o.points() {
            let excluded = excluding_shift_of(&x, p, p).is_some();
            ensure(excluded == (x != want), format!("phase {:?}", x.block()))?;
            if let Some(set) = small.get(&p) {
                ensure(
                    set.contains_point(&x) == (x == want),
                    format!("B̂_{p} on {:?}", x.block()),
                )?;
            }
        }
    }
    within(t, Duration::from_secs(10), "AC6")?;
    Ok("23 orbits, one surviving phase each, matching the oracle".into())
}

fn ac7(built: &[&Built]) -> Outcome {
    let mut msg = Vec::new();
    for b in built {
        let x = cross_validate_closing_basic(&b.d, &b.r, &b.qs, b.r.depth(), b.period_bound);
        ensure(
            x.closing.verdict == Verdict::Holds && x.basic.verdict == Verdict::Holds,
            format!("{}: {:?} / {:?}", b.name, x.closing, x.basic),
        )?;
        msg.push(b.name);
    }
    let odo = builtin_diagram("odometer", 5).unwrap();
    ensure(
        check_closing(&odo, None, 5).verdict == Verdict::Holds,
        "odometer closing",
    )?;
    // a second phase of (01)^inf joins every section
    let g = load_system("golden-mean").unwrap();
    let (qs, _) = quasi_section_from_basic(&g, 3, &BasicParams::default_for).unwrap();
    let extra = ClopenSet::parse(&g, "0101010@-3").unwrap();
    let alt = PeriodicPoint::from_word(&[0, 1]);
    ensure(
        qs.levels()[2].contains_point(&alt) && extra.contains_point(&alt.shifted(1)),
        "control does not hold both phases",
    )?;
    let levels: Vec<ClopenSet> = qs.levels().iter().map(|a| a.union(&extra)).collect();
    let complete = levels.iter().all(|a| is_complete_section(a).complete);
    let neg =
        QuasiSectionApprox::new(levels, Provenance::UserSupplied).map_err(|e| e.to_string())?;
    let r = build_kr_refinement(&neg, 3).unwrap();
    let (d, _) = diagram_from_kr(&r).unwrap();
    let x = cross_validate_closing_basic(&d, &r, &neg, 3, 3);
    ensure(
        complete && x.basic.verdict == Verdict::Fails && x.closing.verdict == Verdict::Fails,
        format!("control: {:?} / {:?}", x.closing, x.basic),
    )?;
    Ok(format!(
        "{} hold both tests; control stays complete, fails both",
        msg.join(", ")
    ))
}

/// Random nested complete sections over the golden mean shift.
fn random_sections(g: &Arc<EdgeShift>, rng: &mut StdRng, depth: usize) -> QuasiSectionApprox {
    loop {
        let mut levels: Vec<ClopenSet> = Vec::new();
        for n in 1..=depth {
            let cells = g.allowed_words(2 * n + 1);
            let keep: Vec<_> = cells.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
            let mut a = ClopenSet::from_words(g, -(n as i64), keep);
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

fn ac8(built: &[&Built]) -> Outcome {
    let g = load_system("golden-mean").unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut cases: Vec<(String, KRRefinement)> = built
        .iter()
        .map(|b| (b.name.to_string(), b.r.clone()))
        .collect();
    let alt = Arc::new(EdgeShift::new(&["0", "1"], &["00", "11"]).unwrap());
    let a = ClopenSet::parse(&alt, "0@0").unwrap();
    let qs = QuasiSectionApprox::new(vec![a; 3], Provenance::UserSupplied).unwrap();
    cases.push(("alternating".into(), build_kr_refinement(&qs, 3).unwrap()));
    for i in 0..20 {
        let depth = 1 + i % 3;
        let qs = random_sections(&g, &mut rng, depth);
        cases.push((
            format!("random {i}"),
            build_kr_refinement(&qs, depth).unwrap(),
        ));
    }
    let sequences: [&[usize]; 4] = [&[1, 2, 3, 4], &[2, 3, 4, 5], &[1, 3, 5, 7], &[3, 6, 9, 12]];
    let (mut holds, mut total) = (0, 0);
    for (name, r) in &cases {
        let (d, _) = diagram_from_kr(r).unwrap();
        let depth = r.depth();
        let closing = check_closing(
            &d,
            Some(Coding {
                refinement: r,
                period_bound: depth.max(4),
            }),
            depth,
        );
        for l in sequences {
            total += 1;
            let reg = check_periodicity_regulated(r, &l[..depth]).unwrap();
            if reg.verdict == Verdict::Holds {
                holds += 1;
                ensure(
                    closing.verdict != Verdict::Fails,
                    format!("{name}, l = {l:?}: closing fails"),
                )?;
            }
        }
    }
    ensure(holds > 0, "no regulated case to test")?;
    Ok(format!(
        "{} refinements, {holds} of {total} regulated cases, none failing",
        cases.len()
    ))
}

fn ac9() -> Outcome {
    let f = load_system("full-2").unwrap();
    let pts: Vec<PeriodicPoint> = f
        .periodic_orbits(4)
        .iter()
        .flat_map(PeriodicOrbit::points)
        .collect();
    for x in &pts {
        for y in &pts {
            let c = compare_periodic(x, y);
            ensure(c == compare_periodic(y, x).reverse(), "antisymmetry")?;
            ensure((c == Ordering::Equal) == (x == y), "equality")?;
            for z in &pts {
                if c == Ordering::Less && compare_periodic(y, z) == Ordering::Less {
                    ensure(compare_periodic(x, z) == Ordering::Less, "transitivity")?;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(9);
    let mut lt = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..4usize);
        let half = 2 * (n + 2) as i64;
        let len = (2 * half + 1) as usize;
        let mut x: Vec<Symbol> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let y: Vec<Symbol> = x
            .iter()
            .map(|&a| if rng.gen_bool(0.15) { 1 - a } else { a })
            .collect();
        if rng.gen_bool(0.5) {
            x = y
                .iter()
                .map(|&a| if rng.gen_bool(0.05) { 1 - a } else { a })
                .collect();
        }
        if compare_truncated((-half, &x), (-half, &y), n).result == OrderResult::Lt {
            lt += 1;
            for m in [n + 1, n + 2] {
                let r = compare_truncated((-half, &x), (-half, &y), m).result;
                ensure(
                    r == OrderResult::Lt,
                    format!("LT at shell {n} but {r:?} at {m}"),
                )?;
            }
        }
    }
    for o in f.periodic_orbits(6) {
        let inf = inf_orbit_periodic(&o);
        ensure(
            inf_orbit_periodic(&inf.orbit()) == inf,
            "inf is not idempotent",
        )?;
    }
    Ok(format!(
        "{} points; {lt} of 1000 pairs LT and stable; inf idempotent",
        pts.len()
    ))
}

fn ac10() -> Outcome {
    let g = load_system("golden-mean").unwrap();
    let cfg = PipelineConfig::new(3);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run_pipeline(&g, &cfg).unwrap().write(d.path()).unwrap();
    }
    for name in bvkr::pipeline::ARTIFACTS {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        ensure(a == b, format!("{name} differs"))?;
    }
    Ok("five artifacts byte-identical".into())
}

fn main() {
    let golden = build("golden-mean", "golden-mean", 4, None);
    let full = build("full-2", "full-2", 4, Some(1));
    let built = [&golden, &full];
    let results: [(&str, Outcome); 10] = [
        ("complete-section lemma", ac1()),
        ("refinement axioms", ac2(&built)),
        ("diagram roundtrip", ac3()),
        ("successor map", ac4()),
        ("min paths and bases", ac5(&built)),
        ("basic set on periodic orbits", ac6()),
        ("closing against basic", ac7(&built)),
        ("regulation implies closing", ac8(&built)),
        ("order laws", ac9()),
        ("determinism", ac10()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(m) => println!("AC{:<2} pass  {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {m}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
