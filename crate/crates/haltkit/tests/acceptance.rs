//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use haltkit_core::analyzers::make_halts;
use haltkit_core::decider::check_proof;
use haltkit_core::experiment::{
    corpus_oracle, generated_oracle, ORACLE_INPUTS, ORACLE_PROGRAMS, ORACLE_SEED,
};
use haltkit_core::lang::{strip_underscores, tokenize, LexError, RenameMode};
use haltkit_core::refgraph::ref_closure;
use haltkit_core::{
    analyze, analyze_unlimited, corpus, make_diag, parse_decl, render, run, AnalysisStack,
    Analyzer, Budgets, Dialect, Dictionary, DivergenceProof, RunOutcome, Verdict,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TABLE_LIMIT: Duration = Duration::from_secs(1);
const NEMESIS_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_LIMIT: Duration = Duration::from_secs(30);
const PROPERTY_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_CASES: u32 = 1000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verdict(a: &str, dict: &Dictionary, p: &str, i: &str) -> Result<Verdict, String> {
    let analyzer = Analyzer::lookup(dict, a).ok_or_else(|| format!("no analyzer {a}"))?;
    analyze(
        &analyzer,
        dict,
        p,
        i,
        &Budgets::default(),
        &mut AnalysisStack::default(),
    )
    .map(|r| r.verdict)
    .map_err(|e| e.to_string())
}

fn paper_table() -> Check {
    let want = [
        ("halts1", "diag1", "diag1", "maybe"),
        ("halts2", "diag1", "diag1", "yes"),
        ("halts2", "diag2", "diag2", "maybe"),
        ("halts1", "diag2", "diag2", "yes"),
        ("halts1", "both", "both", "maybe"),
        ("halts2", "both", "both", "maybe"),
    ];
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_haltkit"))
        .args(["experiment", "paper-table", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}", out.status.code())
    })?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    for (a, p, i, expected) in want {
        let hits: Vec<_> = rows
            .iter()
            .filter(|r| r["analyzer"] == a && r["program"] == p && r["input"] == i)
            .collect();
        ensure(hits.len() == 1, || {
            format!("{a} ('{p}', '{i}') appears {} times", hits.len())
        })?;
        ensure(
            hits[0]["actual"] == expected && hits[0]["expected"] == expected,
            || format!("{a} ('{p}', '{i}') = {}", hits[0]["actual"]),
        )?;
    }
    ensure(elapsed < TABLE_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!("6/6 equalities exact via the CLI in {elapsed:.2?}"))
}

fn nemesis() -> Check {
    let started = Instant::now();
    let mut dict = corpus::paper_dictionary();
    let limited: Vec<String> = dict
        .intrinsics()
        .filter_map(|i| Analyzer::lookup(&dict, &i.name))
        .filter(|a| a.mode() == haltkit_core::Mode::Limited)
        .map(|a| a.self_name().to_string())
        .collect();
    ensure(limited.len() >= 2, || {
        format!("limited analyzers {limited:?}")
    })?;
    for a in &limited {
        let d = format!("nemesis{}", a.trim_start_matches("halts"));
        dict.add_source(&make_diag(a, &d).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let v = verdict(a, &dict, &d, &d)?;
        ensure(v == Verdict::Maybe, || format!("{a} ('{d}', '{d}') = {v}"))?;
        let r = run(&dict, &d, &d, &Budgets::default()).map_err(|e| e.to_string())?;
        ensure(matches!(r.outcome, RunOutcome::Halted(_)), || {
            format!("run {d} = {:?}", r.outcome)
        })?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < NEMESIS_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{} analyzers: 'maybe' and halted, {elapsed:.2?}",
        limited.len()
    ))
}

fn renaming() -> Check {
    // the corpus sources with both analyzers made by the same factory
    let mut dict =
        corpus::build(corpus::PAPER_FILES.iter().copied(), None).map_err(|e| e.to_string())?;
    make_halts(&mut dict, "halts1").map_err(|e| e.to_string())?;
    make_halts(&mut dict, "halts2").map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for d in ["diag1", "diag2"] {
        let (v1, v2) = (
            verdict("halts1", &dict, d, d)?,
            verdict("halts2", &dict, d, d)?,
        );
        ensure(v1 != v2, || format!("both say {v1} on {d}"))?;
        shown.push(format!("{d}: {v1}/{v2}"));
    }
    Ok(shown.join(", "))
}

fn oracle() -> Check {
    let budgets = Budgets::default();
    ensure(budgets.max_steps == 100_000, || {
        "step budget is not 10^5".into()
    })?;
    let started = Instant::now();
    let corpus_report = corpus_oracle(&corpus::paper_dictionary(), ORACLE_INPUTS, &budgets);
    let generated = generated_oracle(
        &mut ChaCha8Rng::seed_from_u64(ORACLE_SEED),
        ORACLE_PROGRAMS,
        &budgets,
    );
    let elapsed = started.elapsed();
    ensure(generated.rows.len() >= 500, || {
        format!("{} programs", generated.rows.len())
    })?;
    for r in [&corpus_report, &generated] {
        if let Some(row) = r.disagreements().next() {
            return Err(format!("{} disagreements, first: {row:?}", r.disagreed));
        }
    }
    ensure(elapsed < ORACLE_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "corpus {} agree / {} excluded; {} generated (seed {ORACLE_SEED:#x}) {} agree / {} excluded as unknown (budget); {elapsed:.2?}",
        corpus_report.agreed, corpus_report.excluded, generated.rows.len(), generated.agreed, generated.excluded
    ))
}

fn tower() -> Check {
    let dict = corpus::paper_dictionary();
    let budgets = Budgets::default();
    let a = analyze_unlimited(
        &dict,
        "dtower",
        "dtower",
        &budgets,
        &mut AnalysisStack::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(a.verdict == Verdict::No, || {
        format!("verdict {}", a.verdict)
    })?;
    let d = a.decision.ok_or("no decision")?;
    let proof = d.proof.ok_or("no proof")?;
    ensure(
        matches!(proof, DivergenceProof::AnalysisRegress { .. }),
        || format!("{proof:?}"),
    )?;
    ensure(check_proof(&proof, &d.trace), || {
        "proof does not check".into()
    })?;
    let r = run(&dict, "dtower", "dtower", &budgets).map_err(|e| e.to_string())?;
    match r.outcome {
        RunOutcome::BudgetExceeded(kind, _) => Ok(format!(
            "'no' with checked regress proof; run exhausts {kind}"
        )),
        other => Err(format!("run = {other:?}")),
    }
}

fn stratification() -> Check {
    let texts = prop::collection::vec(select_frag(), 0..6)
        .prop_flat_map(|before| {
            (
                Just(before),
                prop::collection::vec(select_frag(), 0..6),
                "[a-z0-9_]{0,3}",
            )
        })
        .prop_map(|(b, a, glued)| format!("{} halts_{glued} {}", b.join(" "), a.join(" ")));
    let fixed = "function ihalts (p, i: string): string; begin halts_ (p, i) end".to_string();
    let check = |text: String| -> Result<(), TestCaseError> {
        prop_assert!(tokenize(&text, Dialect::Underscored).is_ok(), "{}", text);
        let plain = tokenize(&text, Dialect::Plain);
        prop_assert!(
            matches!(plain, Err(LexError::UnderscoreInPlain { .. })),
            "{:?}",
            plain
        );
        Ok(())
    };
    check(fixed).map_err(|e| e.to_string())?;
    runner().run(&texts, check).map_err(|e| e.to_string())?;
    Ok(format!("{PROPERTY_CASES} random texts plus a fixed one"))
}

fn select_frag() -> impl Strategy<Value = &'static str> {
    prop::sample::select(
        &[
            "begin", "end", "x", "'q'", "'q_'", "{c}", "{c_}", "(", ")", ";", ",", "a_b", "print",
        ][..],
    )
}

fn transcript(dict: &Dictionary, name: &str) -> Result<Vec<String>, String> {
    let r = run(dict, name, "x", &Budgets::default()).map_err(|e| e.to_string())?;
    match r.outcome {
        RunOutcome::Halted(t) => Ok(t),
        other => Err(format!("{name}: {other:?}")),
    }
}

fn plain_dict(text: &str) -> Result<(Dictionary, String), String> {
    let decl = parse_decl(text, Dialect::Plain).map_err(|e| e.to_string())?;
    let name = decl.name.clone();
    let mut dict = Dictionary::new(Dialect::Plain);
    dict.insert(decl).map_err(|e| e.to_string())?;
    Ok((dict, name))
}

fn dilemma() -> Check {
    let (_, source) = corpus::A_UNDERSCORE;
    let original = transcript(&corpus::underscored_dictionary(), "A_")?;
    ensure(original == ["A_"], || format!("A_ prints {original:?}"))?;

    let literal =
        strip_underscores(source, RenameMode::IdentifiersOnly).map_err(|e| e.to_string())?;
    let (dict, name) = plain_dict(&literal)?;
    let t = transcript(&dict, &name)?;
    ensure(t == original, || {
        format!("identifiers-only transcript {t:?}")
    })?;
    ensure(t[0] != name, || {
        "identifiers-only output names the procedure".into()
    })?;

    let thorough = strip_underscores(source, RenameMode::Thorough).map_err(|e| e.to_string())?;
    let (dict, name) = plain_dict(&thorough)?;
    let t = transcript(&dict, &name)?;
    ensure(t == [name.clone()], || {
        format!("thorough transcript {t:?} for {name}")
    })?;
    ensure(t != original, || "thorough transcript unchanged".into())?;
    Ok(format!(
        "identifiers-only prints {original:?} from {name:?}; thorough prints {t:?}"
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn properties() -> Check {
    let started = Instant::now();
    let mut done = Vec::new();
    let mut go = |name: &str, r: Result<(), String>| -> Result<(), String> {
        r.map_err(|e| format!("{name}: {e}"))?;
        done.push(name.to_string());
        Ok(())
    };

    go(
        "parser round-trip",
        runner()
            .run(&support::decl(), |d| {
                let once = parse_decl(&render(&d), Dialect::Plain).unwrap();
                let rendered = render(&once);
                let twice = parse_decl(&rendered, Dialect::Plain).unwrap();
                prop_assert_eq!(&twice, &once);
                prop_assert_eq!(render(&twice), rendered);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    go(
        "closure equals path search",
        runner()
            .run(&support::ref_case(), |case| {
                prop_assert!(case.dict.entries().count() <= 8);
                for name in case.dict.names() {
                    prop_assert_eq!(
                        ref_closure(&case.dict, name).unwrap(),
                        support::reachable(&case.expected, name)
                    );
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    go(
        "run determinism",
        runner()
            .run(&(support::program(), support::small_budgets()), |(p, b)| {
                let dict = p.dictionary();
                prop_assert_eq!(
                    run(&dict, &p.entry, &p.input, &b).unwrap(),
                    run(&dict, &p.entry, &p.input, &b).unwrap()
                );
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    let monotone = (support::program(), support::small_budgets())
        .prop_flat_map(|(p, b)| (Just(p), Just(b), support::larger(b)));
    go(
        "budget monotonicity",
        runner()
            .run(&monotone, |(p, b, bigger)| {
                let dict = p.dictionary();
                let small = run(&dict, &p.entry, &p.input, &b).unwrap();
                if small.outcome.terminated() {
                    let big = run(&dict, &p.entry, &p.input, &bigger).unwrap();
                    prop_assert_eq!(big.outcome, small.outcome);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    let elapsed = started.elapsed();
    ensure(elapsed < PROPERTY_LIMIT, || format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "{} x {PROPERTY_CASES} cases in {elapsed:.2?}",
        done.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("limited verdict table", paper_table),
        ("nemesis termination", nemesis),
        ("renaming sensitivity", renaming),
        ("unlimited analyzer oracle agreement", oracle),
        ("interpreter tower", tower),
        ("dialect stratification", stratification),
        ("translation dilemma", dilemma),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {} {title}: PASS ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {title}: FAIL ({why})", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
