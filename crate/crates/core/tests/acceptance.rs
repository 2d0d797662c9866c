//! Acceptance criteria, one line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use idealc::classifier::example_verdicts;
use idealc::egorovlab::{self, hit_set, violation_check, IntervalSet};
use idealc::ground::space::mazur_offset;
use idealc::ground::{decode_binseq, member, pair, FiniteSet, Point, SetDescription as D, Space};
use idealc::ideals::{Budget, IdealOracle, Verdict};
use idealc::pathology::{pathology_scan, Family, HullProblem, HullReport, ScanSummary};
use idealc::rational::{int, rat, ExtRational, Rational};
use idealc::reductions::ibedfin::DEFAULT_SLACK;
use idealc::reductions::solecki::{cell_word, components, solecki_to_ib_word};
use idealc::reductions::{
    ib_to_edfin_family, mazur_partition, run_construction, solecki_counterexample,
    summable_diagonalize,
};
use idealc::submeasures::{check_axioms, mazur_phi, maximal_count, Submeasure, WeightRule};

type Outcome = Result<String, String>;

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn c1_axioms() -> Outcome {
    let mut pairs = 0;
    for (k, id) in Submeasure::catalogue_ids().into_iter().enumerate() {
        let phi = Submeasure::catalogue(id).map_err(|e| e.to_string())?;
        let r = check_axioms(&phi, 64, 1000, 0xA110 + k as u64);
        ensure(r.passed && r.violation_count == 0, || format!("{id}: {} violations", r.violation_count))?;
        ensure(r.random_pairs == 1000, || format!("{id}: {} random pairs", r.random_pairs))?;
        pairs += r.exhaustive_pairs + r.random_pairs;
    }
    Ok(format!("{} submeasures, {pairs} pairs, 0 violations", Submeasure::catalogue_ids().len()))
}

fn c2_mazur_identity() -> Outcome {
    let mut checked = 0;
    for n in 1..=4u64 {
        let parts = mazur_partition(n).map_err(|e| e.to_string())?;
        for mask in 0u64..1 << (n + 1) {
            let mut union = FiniteSet::empty(Space::MazurSum);
            for (i, p) in parts.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    union = union.union(p).map_err(|e| e.to_string())?;
                }
            }
            let v = mazur_phi(n, &union).map_err(|e| e.to_string())?;
            let want = ExtRational::from_int(mask.count_ones() as i64);
            ensure(v == want, || format!("n={n}, F={mask:b}: φ = {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs (n, F) exact"))
}

/// Largest antichain among `codes` by enumerating every subset.
fn brute_antichain(codes: &[u64]) -> u32 {
    let words: Vec<Vec<u8>> = codes.iter().map(|&c| decode_binseq(c)).collect();
    let k = words.len();
    let comparable: Vec<u32> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| {
                    j != i && {
                        let (a, b) = (&words[i], &words[j]);
                        let (s, t) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                        t[..s.len()] == s[..]
                    }
                })
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect();
    let mut best = 0;
    for mask in 0u32..1 << k {
        let size = mask.count_ones();
        if size <= best {
            continue;
        }
        if (0..k).all(|i| mask >> i & 1 == 0 || comparable[i] & mask == 0) {
            best = size;
        }
    }
    best
}

fn c3_antichain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC3);
    let phi = Submeasure::antichain();
    for trial in 0..1000 {
        let size = rng.gen_range(0..=15usize);
        let mut codes: Vec<u64> = rand::seq::index::sample(&mut rng, 127, size)
            .into_iter()
            .map(|c| c as u64)
            .collect();
        codes.sort_unstable();
        let brute = brute_antichain(&codes);
        let formula = maximal_count(&codes);
        ensure(formula as u32 == brute, || format!("trial {trial} {codes:?}: {formula} vs {brute}"))?;
        ensure(phi.eval_codes(&codes) == ExtRational::from_int(brute as i64), || {
            format!("trial {trial}: submeasure disagrees")
        })?;
    }
    Ok("1000 random subsets of depth ≤ 6 exact".into())
}

fn zero_gaps(reports: &[HullReport], what: &str) -> Result<(), String> {
    for r in reports {
        ensure(r.gap.is_zero(), || format!("{what}: gap {} on {:?}", r.gap, r.objective))?;
        ensure(r.feasible && r.exhaustive_check != Some(false), || {
            format!("{what}: infeasible witness on {:?}", r.objective)
        })?;
    }
    Ok(())
}

fn scan(phi: &Submeasure, ground: &FiniteSet, family: Family, seed: u64, what: &str) -> Result<usize, String> {
    let problem = HullProblem::new(phi, ground, family).map_err(|e| e.to_string())?;
    let full = problem.solve(ground).map_err(|e| e.to_string())?;
    let r = pathology_scan(phi, ground, 24, seed, family).map_err(|e| e.to_string())?;
    ensure(r.summary == ScanSummary::AllZeroGaps, || format!("{what}: {:?}", r.summary))?;
    zero_gaps(&r.reports, what)?;
    zero_gaps(std::slice::from_ref(&full), what)?;
    Ok(r.reports.len() + 1)
}

fn c4_hull() -> Outcome {
    let mut solved = 0;
    let omega12 = FiniteSet::prefix(Space::Omega, 12).map_err(|e| e.to_string())?;
    solved += scan(&Submeasure::counting(Space::Omega), &omega12, Family::Exhaustive, 41, "counting")?;
    solved += scan(&Submeasure::summable(WeightRule::Harmonic), &omega12, Family::Exhaustive, 42, "summable")?;

    let ib = Submeasure::antichain();
    let depth4 = FiniteSet::prefix(Space::BinarySeq, 31).map_err(|e| e.to_string())?;
    solved += scan(&ib, &depth4, Family::Reduced, 43, "ib depth 4")?;
    let depth3 = FiniteSet::prefix(Space::BinarySeq, 15).map_err(|e| e.to_string())?;
    let reduced = HullProblem::new(&ib, &depth3, Family::Reduced).map_err(|e| e.to_string())?;
    let exhaustive = HullProblem::new(&ib, &depth3, Family::Exhaustive).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..24 {
        let a = depth3.subset_by_mask(rng.gen_range(1..1u64 << 15));
        let (x, y) = (
            reduced.solve(&a).map_err(|e| e.to_string())?,
            exhaustive.solve(&a).map_err(|e| e.to_string())?,
        );
        ensure(x.hull_value == y.hull_value, || format!("ib depth 3 families differ on {:?}", a.codes()))?;
        zero_gaps(&[x, y], "ib depth 3")?;
        solved += 2;
    }

    let delta = FiniteSet::prefix(Space::Delta, 15).map_err(|e| e.to_string())?;
    solved += scan(&Submeasure::edfin(), &delta, Family::Exhaustive, 45, "edfin")?;
    Ok(format!("{solved} hulls with gap 0, witnesses feasible"))
}

fn c5_reduced_family() -> Outcome {
    let phi = Submeasure::mazur();
    let parts = mazur_partition(2).map_err(|e| e.to_string())?;
    let ground = parts
        .iter()
        .try_fold(FiniteSet::empty(Space::MazurSum), |acc, p| acc.union(p))
        .map_err(|e| e.to_string())?;
    ensure(ground.len() == 16, || format!("ground has {} points", ground.len()))?;
    let reduced = HullProblem::new(&phi, &ground, Family::Reduced).map_err(|e| e.to_string())?;
    let exhaustive = HullProblem::new(&phi, &ground, Family::Exhaustive).map_err(|e| e.to_string())?;
    ensure(exhaustive.constraint_count() == (1 << 16) - 1, || {
        format!("{} exhaustive constraints", exhaustive.constraint_count())
    })?;
    let mut objectives = vec![ground.clone()];
    objectives.extend(parts.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5);
    for _ in 0..40 {
        objectives.push(ground.subset_by_mask(rng.gen_range(1..1u64 << 16)));
    }
    for a in &objectives {
        let x = reduced.solve(a).map_err(|e| e.to_string())?;
        let y = exhaustive.solve(a).map_err(|e| e.to_string())?;
        ensure(x.hull_value == y.hull_value, || {
            format!("{:?}: reduced {} vs exhaustive {}", a.codes(), x.hull_value, y.hull_value)
        })?;
        ensure(x.feasible && y.feasible, || "infeasible witness".into())?;
    }
    Ok(format!(
        "{} objectives equal; {} reduced vs {} exhaustive constraints",
        objectives.len(),
        reduced.constraint_count(),
        exhaustive.constraint_count()
    ))
}

fn c6_egorov_machine() -> Outcome {
    let depth = 4;
    let (w, tree, doc) = egorovlab::construct("ib", depth).map_err(|e| e.to_string())?;
    let audit = tree.audit(&w);
    ensure(audit.level_sums, || "level sums differ from 1".into())?;
    ensure(audit.length_formula, || "length formula fails".into())?;
    ensure(doc.witness_audit.passed(), || "witness audit fails".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE6);
    let alphas = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut checks = 0;
    for trial in 0..1000 {
        let alpha = &alphas[trial % 3];
        let count = (alpha * Rational::from_integer(64.into())).to_integer();
        let count: u64 = count.try_into().map_err(|_| "cell count".to_string())?;
        let m = IntervalSet::random(&mut rng, 64, count).map_err(|e| e.to_string())?;
        ensure(m.measure() == *alpha, || format!("measure of {m}"))?;
        for k in 0..=depth {
            let best = tree
                .level(k)
                .map(|(_, (a, b))| m.overlap(a, b) / (b - a))
                .max()
                .expect("nonempty level");
            ensure(best >= *alpha, || format!("{m}: level {k} ratio {best}"))?;
            let hits = hit_set(&tree, &w, &m, k).map_err(|e| e.to_string())?;
            let phi = w.submeasure.eval(&hits).map_err(|e| e.to_string())?;
            let reach = alpha * int(k as i64 + 1);
            let mut mm = 0i64;
            while int(mm) < reach {
                ensure(phi > ExtRational::from_int(mm), || format!("{m}: φ(hits ≤ {k}) = {phi} ≤ {mm}"))?;
                mm += 1;
            }
            if k < depth {
                let r = violation_check(&tree, &w, &m, k).map_err(|e| e.to_string())?;
                ensure(r.passed(), || format!("{m}: violation check at level {k}: {r:?}"))?;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} (M, level) checks, 0 failures"))
}

fn c7_rk() -> Outcome {
    let space = Space::ClopenHalf(3);
    let size = space.size().ok_or("ClopenHalf(3) is finite")?;
    ensure(size == 70, || format!("{size} members"))?;
    let mut exceptions = Vec::new();
    for code in 0..size {
        let word = solecki_to_ib_word(3, code).map_err(|e| format!("code {code}: {e}"))?;
        let Point::Clopen(mask) = space.decode(code).map_err(|e| e.to_string())? else {
            return Err("unexpected point".into());
        };
        let cells: Vec<u64> = (0..8).filter(|c| mask >> c & 1 == 1).collect();
        let comps = components(3, &cells);
        let mut full = vec![0u8];
        full.extend(&word);
        let starts_with_zero = comps.contains(&full);
        if !starts_with_zero {
            exceptions.push(cells);
        }
    }
    ensure(exceptions == vec![vec![4, 5, 6, 7]], || format!("exceptions {exceptions:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x7A);
    for trial in 0..100 {
        let r = rng.gen_range(1..=2usize);
        let antichain: Vec<Vec<u8>> = (0..1u64 << r).map(|c| cell_word(r as u32, c)).collect();
        let k = rng.gen_range(0..(1usize << r).min(4));
        let points: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..=1u8)).collect())
            .collect();
        let cx = solecki_counterexample(&antichain, &points).map_err(|e| format!("trial {trial}: {e}"))?;
        let l = cx.resolution;
        ensure(cx.cells.len() as u64 == 1 << (l - 1), || format!("trial {trial}: measure ≠ 1/2"))?;
        for p in &points {
            let bits: Vec<u8> = (0..l as usize).map(|i| p.get(i).copied().unwrap_or(0)).collect();
            let cell = bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64);
            ensure(!cx.cells.contains(&cell), || format!("trial {trial}: point {p:?} inside"))?;
        }
        let image = solecki_to_ib_word(l, cx.code).map_err(|e| e.to_string())?;
        ensure(image == antichain[cx.chosen], || format!("trial {trial}: image {image:?}"))?;
    }

    for n in 1..=4u64 {
        let parts = mazur_partition(n).map_err(|e| e.to_string())?;
        let lo = mazur_offset(n).ok_or("offset")?;
        let hi = mazur_offset(n + 1).ok_or("offset")?;
        let total: usize = parts.iter().map(FiniteSet::len).sum();
        let union = parts
            .iter()
            .try_fold(FiniteSet::empty(Space::MazurSum), |acc, p| acc.union(p))
            .map_err(|e| e.to_string())?;
        ensure(total as u64 == hi - lo && union.len() == total, || format!("n={n}: not a partition"))?;
        ensure(union.codes().iter().all(|&c| (lo..hi).contains(&c)), || format!("n={n}: stray code"))?;
    }

    let fam = ib_to_edfin_family(16, 64, DEFAULT_SLACK).map_err(|e| e.to_string())?;
    ensure(fam.slack == 2, || "slack".into())?;
    ensure(fam.audit.passed() && fam.audit.columns_single, || format!("{:?}", fam.audit))?;

    let mut runs = Vec::new();
    for name in ["solecki-ib", "mazur-edfin", "ib-edfin", "first-projection", "second-projection"] {
        let level = idealc::reductions::suites::default_level(name);
        let r = run_construction(name, level).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.report.consistent, || format!("{name}: {:?}", r.report.failures))?;
        runs.push(format!("{name}@{level}"));
    }
    Ok(format!("70 halves, 100 counterexamples, partitions n ≤ 4, audits ok, consistent: {}", runs.join(" ")))
}

fn c8_summable() -> Outcome {
    let d = summable_diagonalize(&WeightRule::Harmonic, &|i| i, 1 << 10, 10).map_err(|e| e.to_string())?;
    let words: Vec<&Vec<u8>> = d.selections.iter().map(|s| &s.word).collect();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            ensure(i == j || !b.starts_with(a), || format!("{a:?} ⊑ {b:?}"))?;
        }
    }
    ensure(d.c_prefix.len() == words.len(), || "duplicate words".into())?;
    ensure(d.preimage_weight < int(2), || format!("preimage weight {}", d.preimage_weight))?;
    Ok(format!("{} words, antichain, preimage weight {}", words.len(), d.preimage_weight))
}

fn c9_golden() -> Outcome {
    let rows = example_verdicts();
    ensure(rows.len() == 15, || format!("{} rows", rows.len()))?;
    for r in &rows {
        ensure(r.passed(), || format!("{}: expected {} derived {}", r.name, r.expected, r.derived))?;
        idealc::classifier::replay(&r.derivation).map_err(|e| format!("{}: {e}", r.name))?;
    }
    Ok("15/15 verdicts, all derivations replay".into())
}

fn omega_leaves() -> Vec<D> {
    vec![
        D::Empty,
        D::Full,
        D::finite([1, 4]),
        D::Threshold(3),
        D::Residues(2, vec![0]),
        D::Residues(3, vec![1]),
    ]
}

fn plane_leaves() -> Vec<D> {
    vec![
        D::Empty,
        D::Full,
        D::Column(0),
        D::Column(3),
        D::Row(1),
        D::Row(4),
        D::finite([pair(0, 0), pair(2, 1)]),
    ]
}

/// Descriptions with exactly `size` constructor nodes.
fn descriptions(size: usize, plane: bool) -> Vec<D> {
    let mut out = Vec::new();
    if size == 1 {
        return if plane { plane_leaves() } else { omega_leaves() };
    }
    for c in descriptions(size - 1, plane) {
        out.push(D::complement(c));
    }
    for left in 1..size - 1 {
        let right = size - 1 - left;
        for a in descriptions(left, plane) {
            for b in descriptions(right, plane) {
                out.push(D::union(a.clone(), b.clone()));
                out.push(D::intersection(a.clone(), b.clone()));
            }
        }
        if plane {
            for a in descriptions(left, false) {
                for b in descriptions(right, false) {
                    out.push(D::rectangle(a.clone(), b.clone()));
                }
            }
        }
    }
    out
}

/// Definition of `Fin ⊗ Fin` read off the 12×12 grid. Constants stay below 6 and periods divide
/// 6, so rows and columns from 6 to 11 repeat forever.
fn brute_fubini(space: &Space, d: &D) -> Result<bool, String> {
    let inside = |i: u64, j: u64| member(space, d, pair(i, j)).map_err(|e| e.to_string());
    let infinite_section = |i: u64| -> Result<bool, String> {
        for j in 6..12 {
            if inside(i, j)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    for i in 6..12 {
        if infinite_section(i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn c10_fubini() -> Outcome {
    let space = Space::omega_squared();
    let oracle = IdealOracle::fubini(IdealOracle::fin(), IdealOracle::fin());
    let mut count = 0;
    let (mut ins, mut outs) = (0, 0);
    for size in 1..=4 {
        for d in descriptions(size, true) {
            let expected = brute_fubini(&space, &d)?;
            let v = oracle.decide(&d, Budget::default()).map_err(|e| format!("{d}: {e}"))?;
            let got = match v {
                Verdict::ProvedIn { .. } => true,
                Verdict::ProvedOut { .. } => false,
                other => return Err(format!("{d}: not structural: {other}")),
            };
            ensure(got == expected, || format!("{d}: oracle {got}, definition {expected}"))?;
            if got {
                ins += 1;
            } else {
                outs += 1;
            }
            count += 1;
        }
    }
    Ok(format!("{count} descriptions agree ({ins} in, {outs} out)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("submeasure axioms", c1_axioms, 10),
        ("mazur partition identity", c2_mazur_identity, 60),
        ("antichain submeasure", c3_antichain, 30),
        ("pathology hull", c4_hull, 120),
        ("reduced-family soundness", c5_reduced_family, 180),
        ("egorov interval machine", c6_egorov_machine, 120),
        ("rk constructions", c7_rk, 180),
        ("summable diagonalization", c8_summable, 10),
        ("classifier golden table", c9_golden, 5),
        ("fubini oracle equivalence", c10_fubini, 60),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let label = format!("{} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let line = match (&result, over) {
            (Ok(detail), false) => format!("PASS criterion {label}: {detail} [{:.2}s < {limit}s]", elapsed.as_secs_f64()),
            (Ok(detail), true) => format!("FAIL criterion {label}: {detail} [{:.2}s exceeds {limit}s]", elapsed.as_secs_f64()),
            (Err(why), _) => format!("FAIL criterion {label}: {why} [{:.2}s]", elapsed.as_secs_f64()),
        };
        if result.is_err() || over {
            failed += 1;
        }
        println!("{line}");
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
