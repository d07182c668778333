//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p obsdual-core --test acceptance -- --nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use obsdual_core::dataset::{
    candidate_lines, constant_names, generate_records, generate_records_parallel, sample_premises,
    serialize_to_string, verify_corpus, with_constants, DatasetRecord, GenConfig,
};
use obsdual_core::dsl::{builtin_theory, euclidean_theory, parse_theory, print_theory, tsym_theory, tsym_trans_theory, SourceFile};
use obsdual_core::dual::{
    check_sieve_proof, compile_proof, dualize_proof, dualize_statement, kernel_search, sieve_search, SearchSpace,
};
use obsdual_core::engine::{Engine, Limits, Strategy};
use obsdual_core::kernel::check_proof;
use obsdual_core::logic::{Formula, Sequent, Sort, Term, Theory};
use obsdual_core::semantics::{enumerate_models, sample_chased_models, satisfies, CapPolicy, EnumOptions, FiniteModel, SizeBound};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let got = [candidate_lines(5), candidate_lines(12), candidate_lines(37)];
    let elapsed = start.elapsed();
    let oracle: Vec<u64> = [5u64, 12, 37].iter().map(|&n| (0..n).sum()).collect();
    ensure(got.to_vec() == oracle && got == [10, 66, 666], || format!("got {got:?}"))?;
    ensure(elapsed.as_micros() < 1000, || format!("took {elapsed:?}"))?;
    Ok(format!("{got:?} in {elapsed:?}"))
}

/// Every kernel proof the engine can elaborate from seeded premise samples.
fn kernel_sequents(t: &Theory, constants: usize, premises: usize, want: usize) -> Result<Vec<Sequent>, String> {
    let cfg = GenConfig {
        constant_count: constants,
        premise_count: premises,
        ..GenConfig::new(t.id.clone(), 0)
    };
    let ext = with_constants(t, constants).map_err(|e| e.to_string())?;
    let engine = Engine::new(&ext);
    let names = constant_names(t, constants);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for seed in 0..4000u64 {
        let ps = sample_premises(t, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        let fb = engine.saturate(&ps, Limits::default()).map_err(|e| e.to_string())?;
        for fact in fb.derived() {
            let g = engine.traceback(&fb, fact).map_err(|e| e.to_string())?;
            let proof = engine.elaborate(&g).map_err(|e| e.to_string())?;
            let s = check_proof(&ext, &proof).map_err(|e| format!("kernel rejected {fact}: {e}"))?;
            let general = common::generalize(&s, &names);
            if seen.insert(general.clone()) {
                out.push(general);
            }
            if out.len() == want {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn models_of(t: &Theory, chased: bool) -> Result<Vec<FiniteModel>, String> {
    let opts = EnumOptions {
        cap: 1_000_000,
        policy: CapPolicy::Truncate,
    };
    let mut models: Vec<FiniteModel> = enumerate_models(t, &SizeBound::at_most(3), opts)
        .map_err(|e| e.to_string())?
        .collect();
    if chased {
        for n in 1..=3 {
            let sizes: BTreeMap<Sort, usize> = t.signature.sorts().iter().map(|s| (s.clone(), n)).collect();
            for (k, density) in [0.05, 0.15, 0.3].into_iter().enumerate() {
                models.extend(sample_chased_models(t, &sizes, 60, density, (10 * n + k) as u64));
            }
        }
    }
    Ok(models)
}

/// Carriers 0..=3: symmetric relations number 2^(n(n+1)/2) per size, partial
/// equivalence relations Bell(n+1).
fn criterion_2() -> Verdict {
    let symmetric: usize = (0..=3u32).map(|n| 1usize << (n * (n + 1) / 2)).sum();
    let bell = [1usize, 1, 2, 5, 15];
    let per: usize = (0..=3).map(|n| bell[n + 1]).sum();
    let plan = [
        (tsym_theory(), 6, 4, 300, false, Some(symmetric)),
        (tsym_trans_theory(), 5, 3, 600, false, Some(per)),
        (euclidean_theory(), 3, 4, 600, true, None),
    ];
    let mut proofs = 0;
    let mut checks = 0u64;
    let mut detail = Vec::new();
    for (t, c, p, want, chased, expected_models) in plan {
        let sequents = kernel_sequents(&t, c, p, want)?;
        let models = models_of(&t, chased)?;
        ensure(!models.is_empty(), || format!("{}: no models", t.id))?;
        if let Some(n) = expected_models {
            ensure(models.len() == n, || format!("{}: {} models, expected {n}", t.id, models.len()))?;
        }
        for s in &sequents {
            for m in &models {
                checks += 1;
                ensure(satisfies(m, s), || format!("{}: {s} fails in a model", t.id))?;
            }
        }
        proofs += sequents.len();
        detail.push(format!("{} {} proofs/{} models", t.id, sequents.len(), models.len()));
    }
    ensure(proofs >= 1000, || format!("only {proofs} proofs ({})", detail.join(", ")))?;
    Ok(format!("{proofs} proofs, {checks} model checks, 0 violations ({})", detail.join(", ")))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let total = 200;
    let mut lower = 0;
    for i in 0..total {
        let h = common::random_horn(&mut rng);
        let engine = Engine::new(&h.theory);
        let semi = engine
            .saturate_with(&h.premises, Limits::default(), Strategy::SemiNaive)
            .map_err(|e| e.to_string())?;
        let naive = engine
            .saturate_with(&h.premises, Limits::default(), Strategy::Naive)
            .map_err(|e| e.to_string())?;
        let oracle = common::naive_closure(&h.theory, &h.constants, &h.premises);
        let got: BTreeSet<Formula> = semi.facts().iter().cloned().collect();
        ensure(got == oracle, || format!("instance {i}: closure differs from oracle"))?;
        ensure(got == naive.facts().iter().cloned().collect(), || format!("instance {i}: strategies differ"))?;
        if semi.stats().instances < naive.stats().instances {
            lower += 1;
        }
    }
    ensure(lower * 10 >= total * 9, || format!("semi-naive lower on only {lower}/{total}"))?;
    Ok(format!("{total} instances exact; semi-naive evaluates fewer rule instances on {lower}/{total}"))
}

fn shared_corpus() -> Result<Vec<DatasetRecord>, String> {
    let plan = [
        (tsym_theory(), 5, 3, 250u64, 200),
        (tsym_trans_theory(), 4, 3, 400, 450),
        (euclidean_theory(), 3, 4, 350, 350),
    ];
    let mut out = Vec::new();
    for (t, c, p, seed, n) in plan {
        let cfg = GenConfig {
            constant_count: c,
            premise_count: p,
            max_records: n,
            ..GenConfig::new(t.id.clone(), seed)
        };
        let g = generate_records_parallel(&t, &cfg, 4).map_err(|e| e.to_string())?;
        ensure(g.records.len() == n, || format!("{}: {} of {n} records", t.id, g.records.len()))?;
        out.extend(g.records);
    }
    Ok(out)
}

fn extended(r: &DatasetRecord, cache: &mut BTreeMap<(String, usize), Theory>) -> Theory {
    cache
        .entry((r.theory_id.clone(), r.meta.constant_count))
        .or_insert_with(|| with_constants(&builtin_theory(&r.theory_id).unwrap(), r.meta.constant_count).unwrap())
        .clone()
}

fn criterion_4(corpus: &[DatasetRecord]) -> Verdict {
    let mut cache = BTreeMap::new();
    let mut removals = 0;
    for (i, r) in corpus.iter().enumerate() {
        let t = extended(r, &mut cache);
        let engine = Engine::new(&t);
        let leaves: Vec<Formula> = r.sequent.premise.conjuncts().into_iter().filter(|f| **f != Formula::Top).cloned().collect();
        let target = &r.sequent.conclusion;
        ensure(engine.derives(&leaves, target).map_err(|e| e.to_string())?, || format!("record {i}: not derivable"))?;
        for k in 0..leaves.len() {
            let mut rest = leaves.clone();
            rest.remove(k);
            removals += 1;
            let still = engine.derives(&rest, target).map_err(|e| e.to_string())?;
            ensure(!still, || format!("record {i}: leaf {} is redundant", leaves[k]))?;
        }
    }
    ensure(corpus.len() >= 1000, || format!("corpus has {} records", corpus.len()))?;
    Ok(format!("{} records, {removals} single-leaf removals all break derivability", corpus.len()))
}

fn criterion_5(corpus: &[DatasetRecord]) -> Verdict {
    let mut cache = BTreeMap::new();
    for (i, r) in corpus.iter().enumerate() {
        let t = extended(r, &mut cache);
        let q = dualize_proof(&t, &r.proof).map_err(|e| format!("record {i}: {e}"))?;
        let p2 = compile_proof(&t, &q).map_err(|e| format!("record {i}: {e}"))?;
        let s2 = check_proof(&t, &p2).map_err(|e| format!("record {i}: {e}"))?;
        ensure(s2 == r.sequent, || format!("record {i}: compiled conclusion differs"))?;

        let claim = check_sieve_proof(&t, &r.dual_proof).map_err(|e| format!("record {i}: {e}"))?;
        let p3 = compile_proof(&t, &r.dual_proof).map_err(|e| format!("record {i}: {e}"))?;
        let q3 = dualize_proof(&t, &p3).map_err(|e| format!("record {i}: {e}"))?;
        let claim3 = check_sieve_proof(&t, &q3).map_err(|e| format!("record {i}: {e}"))?;
        ensure(claim3 == claim, || format!("record {i}: re-dualized claim differs"))?;
        ensure(claim == dualize_statement(&t, &r.sequent).unwrap(), || format!("record {i}: claim is not the dual"))?;
    }
    Ok(format!("{} records round-trip in both directions", corpus.len()))
}

/// Closure of the premise atoms under symmetry and transitivity, with the
/// context variables read as constants.
fn sym_trans_oracle(s: &Sequent) -> bool {
    let atoms = |f: &Formula| -> Vec<(Term, Term)> {
        f.conjuncts()
            .into_iter()
            .filter_map(|a| match a {
                Formula::Rel(_, args) => Some((args[0].clone(), args[1].clone())),
                _ => None,
            })
            .collect()
    };
    let mut closure: BTreeSet<(Term, Term)> = atoms(&s.premise).into_iter().collect();
    loop {
        let mut next = closure.clone();
        for (a, b) in &closure {
            next.insert((b.clone(), a.clone()));
            for (c, d) in &closure {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next == closure {
            break;
        }
        closure = next;
    }
    atoms(&s.conclusion).iter().all(|p| closure.contains(p))
}

fn criterion_6() -> Verdict {
    let t = tsym_trans_theory();
    let space = SearchSpace::conjunctive(&t, 2, 2);
    let candidates = space.candidates();
    let shallow = (kernel_search(&space, 4), sieve_search(&space, 4));
    let count = |f: &dyn Fn(&Sequent) -> bool| candidates.iter().filter(|s| f(s)).count();
    let depth4 = (
        count(&|s| shallow.0.proves(s).is_some()),
        count(&|s| shallow.1.proves(s).is_some()),
    );
    let kernel = kernel_search(&space, 8);
    let sieve = sieve_search(&space, 8);
    ensure(kernel.saturated_at.is_some() && sieve.saturated_at.is_some(), || "a search did not saturate".into())?;
    let mut provable = 0;
    for s in &candidates {
        let k = kernel.proves(s);
        let q = sieve.proves(s);
        ensure(k.is_some() == q.is_some(), || format!("calculi disagree on {s}"))?;
        ensure(k.is_some() == sym_trans_oracle(s), || format!("oracle disagrees on {s}"))?;
        if let (Some(p), Some(q)) = (k, q) {
            provable += 1;
            ensure(check_proof(&t, p).ok().as_ref() == Some(s), || format!("bad kernel witness for {s}"))?;
            let claim = dualize_statement(&t, s).map_err(|e| e.to_string())?;
            ensure(check_sieve_proof(&t, &q).ok() == Some(claim), || format!("bad sieve witness for {s}"))?;
        }
    }
    Ok(format!(
        "{} candidates, {provable} provable in both (saturated at {:?}/{:?}); depth-4 counts kernel {} sieve {}",
        candidates.len(),
        kernel.saturated_at.unwrap(),
        sieve.saturated_at.unwrap(),
        depth4.0,
        depth4.1
    ))
}

fn criterion_7() -> Verdict {
    let t = tsym_trans_theory();
    let cfg = GenConfig {
        max_records: 200,
        ..GenConfig::new("T_sym_trans", 42)
    };
    let a = serialize_to_string(&generate_records(&t, &cfg).map_err(|e| e.to_string())?.records);
    let b = serialize_to_string(&generate_records(&t, &cfg).map_err(|e| e.to_string())?.records);
    let c = serialize_to_string(&generate_records_parallel(&t, &cfg, 4).map_err(|e| e.to_string())?.records);
    ensure(a == b && a == c, || "corpora differ".into())?;
    let report = verify_corpus(&a, &builtin_theory).map_err(|e| e.to_string())?;
    ensure(report.ok() && report.records == 200, || format!("verify: {:?}", report.invalid))?;

    let offsets: Vec<usize> = std::iter::once(0).chain(a.match_indices('\n').map(|(i, _)| i + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut trials = 0;
    for _ in 0..50 {
        use rand::Rng;
        let line = rng.gen_range(2..=201usize);
        let start = offsets[line - 1];
        let end = offsets[line] - 1;
        let pos = rng.gen_range(start..end);
        let mut bytes = a.clone().into_bytes();
        bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
        let corrupted = String::from_utf8(bytes).unwrap();
        let report = verify_corpus(&corrupted, &builtin_theory).map_err(|e| e.to_string())?;
        let lines: Vec<usize> = report.invalid.iter().map(|x| x.0).collect();
        ensure(lines == [line], || format!("byte {pos} on line {line} reported as {lines:?}"))?;
        trials += 1;
    }
    Ok(format!("{} bytes identical across runs and worker counts; 200/200 verified; {trials}/{trials} corruptions located", a.len()))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1000 {
        let t = common::random_theory(&mut rng, &format!("R{i}"));
        let text = print_theory(&t);
        let back = parse_theory(&SourceFile::from_str(&text)).map_err(|d| format!("theory {i}: {d:?}\n{text}"))?;
        ensure(common::theory_alpha_eq(&t, &back), || format!("theory {i} changed:\n{text}"))?;
        ensure(print_theory(&back) == text, || format!("theory {i}: printing is not stable"))?;
    }
    let golden = include_str!("../theories/euclid.obs");
    let t = euclidean_theory();
    ensure(print_theory(&t) == golden, || "euclid golden file differs".into())?;
    let back = parse_theory(&SourceFile::from_str(golden)).map_err(|d| format!("{d:?}"))?;
    ensure(common::theory_alpha_eq(&t, &back), || "euclid golden file does not parse back".into())?;
    Ok("1000 random theories and the Euclidean golden file round-trip".into())
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, run: &dyn Fn() -> Verdict| {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        match v {
            Ok(detail) => println!("PASS criterion {n}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {why} [{secs:.1}s]");
            }
        }
    };
    report(1, &criterion_1);
    report(2, &criterion_2);
    report(3, &criterion_3);
    let corpus = shared_corpus();
    report(4, &|| criterion_4(corpus.as_deref()?));
    report(5, &|| criterion_5(corpus.as_deref()?));
    report(6, &criterion_6);
    report(7, &criterion_7);
    report(8, &criterion_8);
    if failed > 0 {
        std::process::exit(1);
    }
}
