//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{all_partitions, brute_finer, brute_skyline, ids, union_find_sum};
use skylattice::fixtures::{logements, two_tuple_counterexample};
use skylattice::partition::format_blocks;
use skylattice::*;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(r: &Relation, s: &str) -> CriterionSet {
    r.parse_set(s).unwrap()
}

fn part(s: &str) -> Partition {
    Partition::parse(s, false).unwrap()
}

fn is_subset(a: &[RowId], b: &[RowId]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Criterion 1: Every cuboid of the Logements Skycube against the reference table,
/// built in under a second.
fn golden_skycube() -> Outcome {
    let r = logements();
    let reference: [(&str, &[u32]); 15] = [
        ("P", &[2, 5]),
        ("E", &[3, 4, 5]),
        ("C", &[2, 4]),
        ("V", &[2, 3, 5]),
        ("PE", &[5]),
        ("PC", &[2]),
        ("PV", &[5]),
        ("EC", &[4]),
        ("EV", &[3, 5]),
        ("CV", &[2]),
        ("PEC", &[2, 4, 5]),
        ("PEV", &[5]),
        ("PCV", &[2]),
        ("ECV", &[2, 3, 4, 5]),
        ("PECV", &[2, 4, 5]),
    ];
    let start = Instant::now();
    let cube = build_skycube(&r).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(cube.len() == 15, || format!("{} cuboids", cube.len()))?;
    let mut diffs = Vec::new();
    for (s, rows) in reference {
        let got = &cube.get(set(&r, s)).unwrap().rows;
        if *got != ids(rows) {
            diffs.push(format!("{s}: reference {rows:?} computed {:?}", got.iter().map(|i| i.0).collect::<Vec<_>>()));
        }
    }
    ensure(diffs.is_empty(), || {
        format!(
            "{}/15 cuboids match; {} (t2 and t5 both read (100, 1) on PV, so neither strictly dominates the other)",
            15 - diffs.len(),
            diffs.join("; ")
        )
    })?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("15/15 cuboids in {elapsed:?}"))
}

/// Criterion 2: Agree lattice: eight concepts with exact extensions and the drawn
/// cover edges.
fn golden_agree_lattice() -> Outcome {
    let r = logements();
    let l = build_agree_lattice(&r);
    let want = [
        ("", "12345"),
        ("P", "13|25|4"),
        ("E", "12|345"),
        ("C", "1|24|35"),
        ("V", "1|235|4"),
        ("PV", "1|25|3|4"),
        ("ECV", "1|2|35|4"),
        ("PECV", "1|2|3|4|5"),
    ];
    let got: BTreeSet<(String, String)> = l
        .concepts()
        .iter()
        .map(|c| (r.format_set(c.intension), c.extension.to_string()))
        .collect();
    let want_set: BTreeSet<(String, String)> =
        want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure(got == want_set, || format!("concepts {got:?}"))?;

    let drawn: BTreeSet<(&str, &str)> = [
        ("", "P"),
        ("", "E"),
        ("", "C"),
        ("", "V"),
        ("P", "PV"),
        ("V", "PV"),
        ("V", "ECV"),
        ("E", "ECV"),
        ("C", "ECV"),
        ("PV", "PECV"),
        ("ECV", "PECV"),
    ]
    .into_iter()
    .collect();
    let edges: BTreeSet<(String, String)> = l
        .edges()
        .iter()
        .map(|&(a, b)| {
            (
                r.format_set(l.concepts()[a].intension),
                r.format_set(l.concepts()[b].intension),
            )
        })
        .collect();
    let drawn_owned: BTreeSet<(String, String)> =
        drawn.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure(edges == drawn_owned, || format!("edges {edges:?}"))?;
    Ok(format!("{} concepts, {} cover edges as drawn", l.len(), l.edges().len()))
}

/// Criterion 3: Skyline lattice extensions.
fn golden_skyline_lattice() -> Outcome {
    let r = logements();
    let l = build_skyline_lattice(&r);
    let want = [
        ("", "12345"),
        ("P", "25"),
        ("E", "345"),
        ("C", "24"),
        ("V", "235"),
        ("PV", "25"),
        ("ECV", "2|35|4"),
        ("PECV", "2|4|5"),
    ];
    ensure(l.len() == want.len(), || format!("{} concepts", l.len()))?;
    for (int, ext) in want {
        let c = l
            .get(set(&r, int))
            .ok_or_else(|| format!("no concept for `{int}`"))?;
        let got = format_blocks(&c.sky_blocks, false);
        ensure(got == ext, || format!("({int}, {got}) expected ({int}, {ext})"))?;
    }
    ensure(l.edges() == build_agree_lattice(&r).edges(), || "edges differ from agree lattice".into())?;
    Ok("8 skyline concepts match".into())
}

/// Criterion 4: Worked examples, verbatim.
fn worked_examples() -> Outcome {
    let r = logements();
    let t = |i: u32| r.tuple(RowId(i)).unwrap();
    let e = |x: Error| x.to_string();
    ensure(acc_pair(t(2), t(5)).map_err(e)? == set(&r, "PV"), || "Acc(t2,t5)".into())?;
    ensure(acc_set(&[t(3), t(4), t(5)]).map_err(e)? == set(&r, "E"), || "Acc({t3,t4,t5})".into())?;
    let accords: BTreeSet<CriterionSet> = ["", "E", "P", "V", "C", "PV", "ECV"].iter().map(|s| set(&r, s)).collect();
    ensure(agree_sets(&r).sets == accords, || "Accords".into())?;
    ensure(g_map(set(&r, "E"), &r) == part("12|345"), || "g(E)".into())?;
    ensure(h_closure(set(&r, "EC"), &r) == set(&r, "ECV"), || "h(EC)".into())?;
    ensure(h_prime(&part("1|2|345"), &r).map_err(e)? == part("12|345"), || "h'({1,2,345})".into())?;
    let ca = AgreeConcept {
        intension: set(&r, "ECV"),
        extension: part("1|2|35|4"),
    };
    let cb = AgreeConcept {
        intension: set(&r, "PV"),
        extension: part("1|25|3|4"),
    };
    let meet = concept_meet(&[&ca, &cb], &r).map_err(e)?;
    ensure(meet.intension == set(&r, "V") && meet.extension == part("1|235|4"), || format!("meet {meet:?}"))?;
    let join = concept_join(&[&ca, &cb], &r).map_err(e)?;
    ensure(
        join.intension == r.all_criteria() && join.extension == part("1|2|3|4|5"),
        || format!("join {join:?}"),
    )?;
    Ok("9 worked examples hold".into())
}

/// Criterion 5: Reconstruction equals the brute-force skyline on every subset of every
/// corpus relation, in under a minute.
fn reconstruction_equivalence(corpus: &[Relation]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for r in corpus {
        let p = materialize_partial(r);
        for c in r.subsets().into_iter().skip(1) {
            checked += 1;
            let got = p.reconstruct_cuboid(c).map_err(|e| e.to_string())?.rows;
            if got != brute_skyline(r, c) {
                mismatches.push(format!("{} on {}", r.name(), r.format_set(c)));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
    })?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} relations, {checked} cuboids, 0 mismatches in {elapsed:?}", corpus.len()))
}

/// Criterion 6: Every skyline sits inside the skyline of its closure; membership is
/// witnessed to be non-monotone.
fn fundamental_theorem(corpus: &[Relation]) -> Outcome {
    let mut checked = 0usize;
    let mut witnesses = 0usize;
    for r in corpus {
        let subsets = r.subsets();
        let skies: Vec<(CriterionSet, Vec<RowId>)> =
            subsets.iter().map(|&c| (c, skyline(r, c).rows)).collect();
        let lookup = |c: CriterionSet| &skies.iter().find(|(x, _)| *x == c).unwrap().1;
        for (c, sky) in &skies {
            checked += 1;
            let closed = lookup(h_closure(*c, r));
            ensure(is_subset(sky, closed), || {
                format!("{}: SKY_{} not inside its closure's skyline", r.name(), r.format_set(*c))
            })?;
        }
        for (c1, s1) in &skies {
            if c1.is_empty() {
                continue;
            }
            for (c2, s2) in &skies {
                if c1.is_proper_subset(*c2) && !is_subset(s1, s2) {
                    witnesses += 1;
                }
            }
        }
    }
    ensure(witnesses > 0, || "no non-monotone pair in the corpus".into())?;

    let r = logements();
    let e = skyline(&r, set(&r, "E")).rows;
    let ec = skyline(&r, set(&r, "EC")).rows;
    ensure(!is_subset(&e, &ec), || "SKY_E should not be inside SKY_EC".into())?;
    ensure(h_closure(set(&r, "E"), &r) == set(&r, "E"), || "h(E) = E".into())?;
    Ok(format!("{checked} inclusions hold, {witnesses} non-monotone pairs witnessed"))
}

/// Criterion 7: Closure laws for h and h', g∘f∘g = g and π_C = π_h(C).
fn closure_laws(corpus: &[Relation]) -> Outcome {
    let mut rng = common::rng(7);
    let mut checks = 0usize;
    for r in corpus {
        let subsets = r.subsets();
        let h: Vec<CriterionSet> = subsets.iter().map(|&c| h_closure(c, r)).collect();
        for (i, &c) in subsets.iter().enumerate() {
            ensure(c.is_subset(h[i]), || format!("{}: h not extensive", r.name()))?;
            ensure(h_closure(h[i], r) == h[i], || format!("{}: h not idempotent", r.name()))?;
            let g = g_map(c, r);
            ensure(g_map(h[i], r) == g, || format!("{}: π_C ≠ π_h(C)", r.name()))?;
            let gfg = g_map(f_map(&g, r).map_err(|e| e.to_string())?, r);
            ensure(gfg == g, || format!("{}: g∘f∘g ≠ g", r.name()))?;
            for (j, &c2) in subsets.iter().enumerate() {
                if c.is_subset(c2) {
                    checks += 1;
                    ensure(h[i].is_subset(h[j]), || format!("{}: h not isotone", r.name()))?;
                }
            }
        }

        let mut partitions: Vec<Partition> = subsets.iter().map(|&c| g_map(c, r)).collect();
        for _ in 0..4 {
            let rp = common::random_partition(&mut rng, r);
            partitions.push(rp.product(&partitions[rng_index(&mut rng, subsets.len())]).unwrap());
            partitions.push(rp);
        }
        let hp: Vec<Partition> = partitions.iter().map(|p| h_prime(p, r).unwrap()).collect();
        for (i, p) in partitions.iter().enumerate() {
            ensure(p.finer_than(&hp[i]).unwrap(), || format!("{}: h' not extensive", r.name()))?;
            ensure(h_prime(&hp[i], r).unwrap() == hp[i], || format!("{}: h' not idempotent", r.name()))?;
            for (j, q) in partitions.iter().enumerate() {
                if p.finer_than(q).unwrap() {
                    checks += 1;
                    ensure(hp[i].finer_than(&hp[j]).unwrap(), || format!("{}: h' not isotone", r.name()))?;
                }
            }
        }
    }
    Ok(format!("{checks} isotone pairs plus extensivity and idempotence on every subset"))
}

fn rng_index(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> usize {
    use rand::Rng;
    rng.gen_range(0..n)
}

/// Criterion 8: Partition lattice on a four-element set, exhaustively.
fn partition_lattice() -> Outcome {
    let all = all_partitions(4);
    ensure(all.len() == 15, || format!("{} partitions", all.len()))?;
    let mut pairs = 0;
    for p in &all {
        for q in &all {
            pairs += 1;
            let prod = p.product(q).unwrap();
            let sum = p.sum(q).unwrap();
            ensure(sum == union_find_sum(p, q), || format!("sum {p} + {q}"))?;
            ensure(brute_finer(&prod, p) && brute_finer(&prod, q), || format!("{p} • {q} not a lower bound"))?;
            ensure(brute_finer(p, &sum) && brute_finer(q, &sum), || format!("{p} + {q} not an upper bound"))?;
            for z in &all {
                if brute_finer(z, p) && brute_finer(z, q) {
                    ensure(brute_finer(z, &prod), || format!("{p} • {q} not greatest"))?;
                }
                if brute_finer(p, z) && brute_finer(q, z) {
                    ensure(brute_finer(&sum, z), || format!("{p} + {q} not least"))?;
                }
            }
            ensure(p.sum(&prod).unwrap() == *p, || format!("absorption {p} + ({p} • {q})"))?;
            ensure(p.product(&p.sum(q).unwrap()).unwrap() == *p, || format!("absorption {p} • ({p} + {q})"))?;
        }
    }
    Ok(format!("{pairs} pairs: infimum, supremum, S-series = union-find, absorption"))
}

/// Criterion 9: Skyline inclusion under non-agreement, and the converse failing.
fn lemma_under_cna(corpus: &[Relation]) -> Outcome {
    let mut applied = 0usize;
    for r in corpus {
        let d = r.dimensionality();
        for c in r.subsets().into_iter().skip(1) {
            if !is_cna(r.tuples(), c).unwrap() {
                continue;
            }
            let sky = skyline(r, c).rows;
            for c0 in c.complement(d).iter() {
                applied += 1;
                let wider = skyline(r, c.with(c0)).rows;
                ensure(is_subset(&sky, &wider), || {
                    format!("{}: SKY_{} not inside wider skyline", r.name(), r.format_set(c))
                })?;
            }
        }
    }
    ensure(applied > 0, || "non-agreement never held in the corpus".into())?;

    let ce = two_tuple_counterexample();
    let a = set(&ce, "A");
    ensure(is_cna(ce.tuples(), a).unwrap(), || "CNA_A should hold".into())?;
    let t1 = ce.tuple(RowId(1)).unwrap();
    let t2 = ce.tuple(RowId(2)).unwrap();
    ensure(dominates_under_cna(t1, t2, a), || "t1 should dominate t2 on A".into())?;
    ensure(skyline(&ce, a).rows == ids(&[1]), || "t2 should leave SKY_A".into())?;
    ensure(skyline(&ce, set(&ce, "AB")).rows == ids(&[1, 2]), || "t2 should be in SKY_AB".into())?;
    Ok(format!("{applied} extensions checked; converse fails on the two-tuple relation"))
}

/// Criterion 10: Stored concepts versus cuboids, from the built structures.
fn compression_stat() -> Outcome {
    let r = logements();
    let p = materialize_partial(&r);
    let full = build_skycube(&r).map_err(|e| e.to_string())?;
    let s = stats(&p, &full).map_err(|e| e.to_string())?;
    ensure(s.concepts == closed_sets(&r).len(), || "concept count disagrees with closed sets".into())?;
    ensure(s.cuboids == full.len(), || "cuboid count disagrees with the Skycube".into())?;
    ensure((s.concepts, s.cuboids) == (8, 15), || format!("concepts={} cuboids={}", s.concepts, s.cuboids))?;
    Ok(s.to_string().lines().next().unwrap_or_default().to_string())
}

fn main() {
    let start = Instant::now();
    let corpus = common::corpus();
    let criteria: Vec<Check> = vec![
        ("golden skycube", Box::new(golden_skycube)),
        ("golden agree lattice", Box::new(golden_agree_lattice)),
        ("golden skyline lattice", Box::new(golden_skyline_lattice)),
        ("worked examples", Box::new(worked_examples)),
        ("reconstruction equivalence", Box::new(|| reconstruction_equivalence(&corpus))),
        ("closure inclusion theorem", Box::new(|| fundamental_theorem(&corpus))),
        ("closure laws", Box::new(|| closure_laws(&corpus))),
        ("partition lattice", Box::new(partition_lattice)),
        ("non-agreement lemma", Box::new(|| lemma_under_cna(&corpus))),
        ("compression stat", Box::new(compression_stat)),
    ];
    let mut failed = 0;
    println!("running {} acceptance criteria", criteria.len());
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] AC{:<2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] AC{:<2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
