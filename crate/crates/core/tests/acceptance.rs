//! Acceptance criteria, run as a plain binary that prints one line per
//! criterion and exits non-zero if any fails.

use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrc_core::code::{
    check_singleton, is_additively_closed, is_mds, mds_projection_check, min_distance, Codebook, Symbol,
    SystematicCode,
};
use lrc_core::construct::{
    build_nonreversible_example, build_pyramid, build_rs_mds, twist_systematic, PyramidSpec, TwistSpec,
};
use lrc_core::locality::{information_locality, locality_profile, reversibility_check};
use lrc_core::repair::{local_repair, recover_erasures, ErasurePattern, Recovery};
use lrc_core::structure::{
    heavy_dependency_check, light_group_subcode, light_parities, verify_structure, verify_theorem4,
    verify_theorem5,
};
use lrc_core::subcode::{
    check_locality_bound, run_subcode, verify_trace_tightness, ForcedStep, OptimalityClaim, Strategy,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pyramid(q: usize, k: usize, r: usize, d: usize) -> SystematicCode {
    build_pyramid(&PyramidSpec::new(q, k, r, d)).expect("valid pyramid spec")
}

const TWIST_SEEDS: [u64; 3] = [1, 2, 3];

fn twists(code: &SystematicCode) -> Vec<SystematicCode> {
    TWIST_SEEDS
        .iter()
        .map(|&seed| twist_systematic(code, &TwistSpec::Seed { seed }).expect("twist"))
        .collect()
}

fn divisors_below(k: usize) -> impl Iterator<Item = usize> {
    (1..k).filter(move |r| k.is_multiple_of(*r))
}

fn bound_reproduction() -> Outcome {
    let mut checked = 0;
    for q in [5usize, 7, 11] {
        for k in [2usize, 4, 6] {
            for r in divisors_below(k) {
                for d in [2usize, 3, 4] {
                    if q < k + d - 1 || q.checked_pow(k as u32).is_none_or(|size| size > 65536) {
                        continue;
                    }
                    let tag = format!("(q={q},k={k},r={r},d={d})");
                    let code = build_pyramid(&PyramidSpec::new(q, k, r, d)).map_err(|e| format!("{tag}: {e}"))?;
                    let dist = min_distance(code.code()).map_err(|e| e.to_string())?;
                    ensure(dist == d, || format!("{tag}: min distance {dist}"))?;
                    let loc = information_locality(&code, r).map_err(|e| e.to_string())?;
                    ensure(loc == Some(r), || format!("{tag}: information locality {loc:?}"))?;
                    let bound = check_locality_bound(code.n(), k, d, r).map_err(|e| e.to_string())?;
                    ensure(bound.optimal, || format!("{tag}: n = {} vs bound {}", code.n(), bound.rhs))?;
                    checked += 1;
                }
            }
        }
    }
    ensure(checked == 23, || format!("expected 23 grid points, visited {checked}"))?;
    Ok(format!("{checked} grid points optimal with exact d and locality"))
}

fn random_codebook(rng: &mut ChaCha8Rng) -> Codebook {
    let q = rng.gen_range(2..=5usize);
    let n = rng.gen_range(2..=6usize);
    let space = q.pow(n as u32);
    let count = rng.gen_range(2..=space.min(60));
    let picks = rand::seq::index::sample(rng, space, count);
    let words = picks
        .iter()
        .map(|idx| {
            let mut idx = idx;
            (0..n)
                .map(|_| {
                    let s = (idx % q) as Symbol;
                    idx /= q;
                    s
                })
                .collect()
        })
        .collect();
    Codebook::new(q, n, words).expect("distinct random words")
}

fn singleton_bound() -> Outcome {
    let mut fixtures: Vec<Codebook> = vec![
        Codebook::new(2, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap(),
        Codebook::new(2, 3, vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap(),
        build_nonreversible_example(),
        Codebook::full_space(3, 3).unwrap(),
        build_rs_mds(7, 3, 4).unwrap().into_code(),
        pyramid(7, 4, 2, 3).into_code(),
        pyramid(5, 2, 1, 3).into_code(),
    ];
    fixtures.extend(twists(&pyramid(7, 4, 2, 3)).into_iter().map(SystematicCode::into_code));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let parent = random_codebook(&mut rng);
        let keep = rng.gen_range(2..=parent.len());
        let chosen = rand::seq::index::sample(&mut rng, parent.len(), keep).into_vec();
        let words = chosen.iter().map(|&i| parent.word(i).to_vec()).collect();
        fixtures.push(Codebook::new(parent.q(), parent.n(), words).unwrap());
    }

    for (idx, code) in fixtures.iter().enumerate() {
        let report = check_singleton(code).map_err(|e| e.to_string())?;
        ensure(report.holds, || format!("fixture {idx}: {report:?}"))?;
    }
    Ok(format!("{} codebooks satisfy the Singleton bound", fixtures.len()))
}

fn mds_projections() -> Outcome {
    let rs = build_rs_mds(7, 3, 4).map_err(|e| e.to_string())?;
    let mut count = 0;
    for subset in (0..6).combinations(3) {
        let report = mds_projection_check(rs.code(), &subset).map_err(|e| e.to_string())?;
        ensure(report.bijective, || format!("{subset:?}: {:?}", report.counterexample))?;
        count += 1;
    }
    ensure(count == 20, || format!("{count} subsets"))?;
    Ok("all 20 size-3 projections of RS(7,3,4) are bijections".into())
}

fn algorithm_tightness() -> Outcome {
    let code = pyramid(7, 4, 2, 3);
    let claim = OptimalityClaim { n: 7, k: 4, d: 3, r: 2, q: 7 };
    let check = |strategy: &Strategy, label: &str| -> Result<(), String> {
        let trace = run_subcode(&code, 2, strategy).map_err(|e| format!("{label}: {e}"))?;
        let ts: Vec<usize> = trace.steps.iter().map(|s| s.t()).collect();
        let sizes: Vec<usize> = trace.steps.iter().map(|s| s.size_after).collect();
        ensure(trace.initial_size == 2401 && trace.ell == 1, || format!("{label}: ell {}", trace.ell))?;
        ensure(ts == [2, 2], || format!("{label}: t = {ts:?}"))?;
        ensure(sizes == [49, 1], || format!("{label}: sizes {sizes:?}"))?;
        let report = verify_trace_tightness(&trace, &claim);
        ensure(report.pass, || format!("{label}: {report:?}"))
    };
    check(&Strategy::auto(), "auto")?;
    let firsts = [
        ForcedStep { i: 0, set: vec![1, 4] },
        ForcedStep { i: 1, set: vec![0, 4] },
        ForcedStep { i: 2, set: vec![3, 5] },
        ForcedStep { i: 3, set: vec![2, 5] },
        ForcedStep { i: 4, set: vec![0, 1] },
    ];
    for first in firsts {
        let label = format!("forced ({}, {:?})", first.i + 1, first.set.iter().map(|c| c + 1).collect_vec());
        check(&Strategy::forced(vec![first]), &label)?;
    }
    Ok("auto run and 5 forced first steps: ell = 1, t = (2,2), sizes 2401 -> 49 -> 1, tight".into())
}

fn reversibility() -> Outcome {
    let mut codes = vec![(pyramid(7, 4, 2, 3), 2), (pyramid(5, 2, 1, 3), 1)];
    let twisted: Vec<_> = codes.iter().flat_map(|(c, r)| twists(c).into_iter().map(move |t| (t, *r))).collect();
    codes.extend(twisted);
    let mut groups_checked = 0;
    for (idx, (code, r)) in codes.iter().enumerate() {
        let report = verify_theorem4(code, *r).map_err(|e| format!("code {idx}: {e}"))?;
        for group in &report.groups {
            let verdicts = reversibility_check(code.code(), group).map_err(|e| e.to_string())?;
            ensure(verdicts.values().all(|&v| v), || format!("code {idx}, group {group:?}: {verdicts:?}"))?;
            groups_checked += 1;
        }
    }
    let and = reversibility_check(&build_nonreversible_example(), &[0, 1, 2]).map_err(|e| e.to_string())?;
    let pattern: Vec<bool> = vec![and[&2], and[&0], and[&1]];
    ensure(pattern == [true, false, false], || format!("AND code: {and:?}"))?;
    Ok(format!("{groups_checked} repair groups over 8 codes reversible; AND code gives (3,1,2) = (T,F,F)"))
}

fn structure() -> Outcome {
    let base = pyramid(7, 4, 2, 3);
    let mut codes = vec![base.clone()];
    codes.extend(twists(&base));
    for (idx, code) in codes.iter().enumerate() {
        let t4 = verify_theorem4(code, 2).map_err(|e| e.to_string())?;
        ensure(t4.all_pass(), || format!("code {idx}: {:?}", t4.items))?;
        let t5 = verify_theorem5(code, 2).map_err(|e| e.to_string())?;
        ensure(t5.all_pass(), || format!("code {idx}: {:?}", t5.items))?;
        ensure(t5.heavy_bound == Some(4), || format!("heavy bound {:?}", t5.heavy_bound))?;
        ensure(t5.partition.light == [4, 5] && t5.partition.heavy == [6], || format!("{:?}", t5.partition))?;

        let profile = locality_profile(code.code(), 6).map_err(|e| e.to_string())?;
        let heavy = profile.get(6).and_then(|e| e.locality);
        ensure(heavy == Some(4), || format!("code {idx}: heavy locality {heavy:?}"))?;

        let blocks = vec![vec![0, 1], vec![2, 3]];
        let heavy_dep = heavy_dependency_check(code, 6, &blocks).map_err(|e| e.to_string())?;
        ensure(heavy_dep, || format!("code {idx}: heavy parity misses a dependency"))?;
        for light in [4, 5] {
            let dep = heavy_dependency_check(code, light, &blocks).map_err(|e| e.to_string())?;
            ensure(!dep, || format!("code {idx}: light parity {} depends on everything", light + 1))?;
        }
    }
    Ok("group and parity items pass on pyramid(7,4,2,3) and 3 twists; heavy locality 4 = bound".into())
}

fn mds_subcodes() -> Outcome {
    let code = pyramid(7, 4, 2, 3);
    let lights = light_parities(&code, 2).map_err(|e| e.to_string())?;
    ensure(lights.len() == 2, || format!("{lights:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for keep in 0..lights.len() {
        for _ in 0..3 {
            let sigma: Vec<Vec<Symbol>> = lights
                .iter()
                .map(|l| l.info.iter().map(|_| rng.gen_range(0..7)).collect())
                .collect();
            let sub = light_group_subcode(&code, &lights, keep, &sigma).map_err(|e| e.to_string())?;
            ensure(sub.len() == 49 && sub.n() == 4, || format!("sub-code {} x {}", sub.len(), sub.n()))?;
            let mds = is_mds(&sub).map_err(|e| e.to_string())?;
            ensure(mds, || format!("group {keep}, sigma {sigma:?} not MDS"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} restricted 49-word sub-codes on 4 coordinates are MDS"))
}

fn twist_invariance() -> Outcome {
    let mut nonlinear = 0;
    for (q, k, r, d) in [(7, 4, 2, 3), (5, 2, 1, 3)] {
        let base = pyramid(q, k, r, d);
        let dist = min_distance(base.code()).map_err(|e| e.to_string())?;
        let profile = locality_profile(base.code(), base.n() - 1).map_err(|e| e.to_string())?;
        let report = verify_structure(&base, r).map_err(|e| e.to_string())?;
        ensure(is_additively_closed(base.code()), || "untwisted pyramid not linear".into())?;
        for (seed, twisted) in TWIST_SEEDS.iter().zip(twists(&base)) {
            let tag = format!("pyramid({q},{k},{r},{d}) seed {seed}");
            let tdist = min_distance(twisted.code()).map_err(|e| e.to_string())?;
            ensure(tdist == dist, || format!("{tag}: distance {tdist} vs {dist}"))?;
            let tprofile = locality_profile(twisted.code(), twisted.n() - 1).map_err(|e| e.to_string())?;
            ensure(tprofile == profile, || format!("{tag}: locality profile differs"))?;
            let treport = verify_structure(&twisted, r).map_err(|e| e.to_string())?;
            ensure(treport == report, || format!("{tag}: structure report differs"))?;
            if !is_additively_closed(twisted.code()) {
                nonlinear += 1;
            }
        }
    }
    ensure(nonlinear >= 1, || "no twisted codebook broke additive closure".into())?;
    Ok(format!("6 twists match their base reports; {nonlinear} of them are not additively closed"))
}

fn recovery() -> Outcome {
    let code = pyramid(5, 2, 1, 3);
    let mut patterns = 0;
    for word in code.code().words() {
        for size in 0..=2 {
            for erased in (0..code.n()).combinations(size) {
                let pattern = ErasurePattern::from_word(word, &erased);
                let result = recover_erasures(code.code(), &pattern).map_err(|e| e.to_string())?;
                ensure(result == Recovery::Unique { codeword: word.to_vec() }, || {
                    format!("{word:?} erased {erased:?}: {result:?}")
                })?;
                patterns += 1;
            }
        }
    }
    ensure(patterns == 25 * 16, || format!("{patterns} patterns"))?;

    let profile = locality_profile(code.code(), code.n() - 1).map_err(|e| e.to_string())?;
    for word in code.code().words() {
        for i in 0..code.k() {
            let pattern = ErasurePattern::from_word(word, &[i]);
            let repaired = local_repair(code.code(), &pattern, &profile).map_err(|e| e.to_string())?;
            let fix = &repaired[&i];
            ensure(fix.value == word[i] && fix.accessed.len() <= 1, || format!("{word:?} coord {i}: {fix:?}"))?;
        }
    }
    Ok(format!("{patterns} erasure patterns recover uniquely; local repair reads 1 coordinate"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 bound reproduction", bound_reproduction),
        ("2 singleton bound", singleton_bound),
        ("3 mds projections", mds_projections),
        ("4 sub-code tightness", algorithm_tightness),
        ("5 reversibility", reversibility),
        ("6 structure", structure),
        ("7 mds sub-codes", mds_subcodes),
        ("8 twist invariance", twist_invariance),
        ("9 recovery", recovery),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({secs:.2}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {msg}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
