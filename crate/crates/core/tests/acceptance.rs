//! End-to-end checks, one line per criterion. Runs without the test harness so
//! the lines show up in `cargo test` output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jep_core::cographs::{cotree_of, decide_jep_cographs, Cograph};
use jep_core::dfa::{forb_string, words_up_to, Dfa};
use jep_core::error::JepError;
use jep_core::oracle::{
    cross_validate, isomorphic, joint_string_ref, letters, random_dfa, trial_rng, Report, Suite, TrialConfig,
};
use jep_core::string_jep::{badpair_automaton_string, decide_jep_string, default_semibad_bound, StringPipeline};
use jep_core::tree_automata::forb_tree;
use jep_core::tree_jep::{decide_jep_tree, numeric_labels};
use jep_core::trees::BinaryTree;
use jep_core::verdict::{Limits, PairMode, Verdict};

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(s: Suite, cfg: TrialConfig, min_trials: usize, budget: Duration) -> Outcome {
    let start = Instant::now();
    let r: Report = cross_validate(s, &cfg);
    let took = start.elapsed();
    let ran = r.trials - r.skipped.len();
    let mut detail = format!(
        "{s}: {ran} trials, {} checks, {} discrepancies, {:.1?}",
        r.checks,
        r.discrepancies.len(),
        took
    );
    if let Some(d) = r.discrepancies.first() {
        detail += &format!("; first: trial {} {}", d.trial, d.detail);
    }
    Outcome {
        pass: r.is_clean() && ran >= min_trials && took <= budget,
        detail,
    }
}

fn known_instances() -> Outcome {
    let lim = Limits::default();
    let ab = letters(2);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, good: bool, shown: String| {
        ok &= good;
        notes.push(format!("{name} -> {shown}"));
    };

    let v = forb_string(&[vec![0, 1]], &ab).and_then(|m| decide_jep_string(&m, PairMode::Bad, &lim));
    check("Forb(ab)", matches!(v, Ok(Verdict::Jep)), short(&v));

    let v = forb_string(&[vec![0, 1], vec![1, 0]], &ab).and_then(|m| decide_jep_string(&m, PairMode::Bad, &lim));
    let good = matches!(&v, Ok(Verdict::BadPair { x, y, .. }) if *x == [0] && *y == [1]);
    check("Forb(ab, ba)", good, short(&v));

    let l2 = numeric_labels(2);
    let leaf = |s: &str| BinaryTree::parse(s, &l2).unwrap();
    let v = forb_tree(&[leaf("(1)")], &l2)
        .and_then(|a| a.union(&forb_tree(&[leaf("(0)")], &l2)?))
        .and_then(|m| decide_jep_tree(&m, PairMode::Bad, &lim));
    let good = matches!(&v, Ok(Verdict::BadPair { x, y, .. }) if *x == leaf("(0)") && *y == leaf("(1)"));
    check("all-0 or all-1", good, short(&v));

    let v = decide_jep_cographs(&[Cograph::path(4)], &lim);
    check("{P4}", matches!(v, Ok(Verdict::Jep)), short(&v));

    let k2uk1 = Cograph::complete(2).disjoint_union(&Cograph::edgeless(1));
    let v = decide_jep_cographs(&[Cograph::path(4), Cograph::path(3), k2uk1], &lim);
    let good = matches!(&v, Ok(Verdict::BadPair { x, y, .. })
        if isomorphic(x, &Cograph::complete(2)) && isomorphic(y, &Cograph::edgeless(2)));
    check("{P4, P3, K2+K1}", good, short(&v));

    Outcome {
        pass: ok,
        detail: notes.join("; "),
    }
}

fn short<T: std::fmt::Debug>(v: &Result<Verdict<T>, JepError>) -> String {
    match v {
        Ok(Verdict::Jep) => "JEP".into(),
        Ok(Verdict::BadPair { x, y, .. }) => format!("BadPair({x:?}, {y:?})"),
        Err(e) => format!("error: {e}"),
    }
}

fn badpair_automata() -> Outcome {
    let lim = Limits::default();
    let cfg = TrialConfig {
        max_states: 3,
        ..TrialConfig::default()
    };
    let words = words_up_to(2, 4);
    let (mut automata, mut pairs, mut wrong) = (0, 0, Vec::new());
    for i in 0..50 {
        let m: Dfa = random_dfa(&cfg, &mut trial_rng(5, i));
        let built = StringPipeline::new(&m, lim.max_states).and_then(|p| {
            let bound = default_semibad_bound(&p, &lim);
            badpair_automaton_string(&m, bound, PairMode::Semibad, &lim)
        });
        let b = match built {
            Ok(b) => b,
            Err(e) => {
                wrong.push(format!("automaton {i}: {e}"));
                continue;
            }
        };
        automata += 1;
        let hash = m.alphabet().size();
        for x in &words {
            for y in &words {
                let mut s = x.clone();
                s.push(hash);
                s.extend(y);
                pairs += 1;
                if b.accepts(&s).unwrap() == joint_string_ref(&m, x, y).unwrap() {
                    wrong.push(format!("automaton {i}: pair {x:?} {y:?}"));
                }
            }
        }
    }
    Outcome {
        pass: wrong.is_empty(),
        detail: format!(
            "{automata} automata, {pairs} pairs, {} disagreements{}",
            wrong.len(),
            wrong.first().map(|w| format!("; first: {w}")).unwrap_or_default()
        ),
    }
}

fn cographs() -> Outcome {
    let mut o = suite(Suite::Cotree, TrialConfig::for_suite(Suite::Cotree), 1000, Duration::MAX);
    let p4 = cotree_of(&Cograph::path(4));
    let rejected = matches!(p4, Err(JepError::NotCograph));
    o.pass &= rejected;
    o.detail += &format!("; P4 -> {}", if rejected { "NotCograph" } else { "accepted" });
    o
}

fn walk_count() -> Outcome {
    let m = forb_string(&[vec![0, 1]], &letters(2)).unwrap();
    match StringPipeline::new(&m, Limits::default().max_states) {
        Ok(p) => Outcome {
            pass: p.walks().len() == 14,
            detail: format!("Forb(ab): |W| = {}", p.walks().len()),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn main() -> ExitCode {
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "string walk sets vs product emptiness",
            Box::new(move || suite(Suite::StringClaim1, TrialConfig::for_suite(Suite::StringClaim1), 200, minutes(5))),
        ),
        (
            "tree walk sets vs product emptiness",
            Box::new(move || suite(Suite::TreeClaim1, TrialConfig::for_suite(Suite::TreeClaim1), 50, minutes(10))),
        ),
        (
            "verdicts certified and scanned",
            Box::new(|| suite(Suite::JepVerdicts, TrialConfig::for_suite(Suite::JepVerdicts), 1, Duration::MAX)),
        ),
        ("known instances", Box::new(known_instances)),
        ("bad-pair automaton vs semibadness", Box::new(badpair_automata)),
        (
            "walk of a tree, two routes",
            Box::new(|| suite(Suite::WalkDef, TrialConfig::for_suite(Suite::WalkDef), 20, Duration::MAX)),
        ),
        ("cotrees", Box::new(cographs)),
        (
            "encoded containment",
            Box::new(|| suite(Suite::EncodedSup, TrialConfig::for_suite(Suite::EncodedSup), 1000, Duration::MAX)),
        ),
        ("walk count of Forb(ab)", Box::new(walk_count)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "criterion {}: {} ({name}) {}",
            n + 1,
            if o.pass { "pass" } else { "FAIL" },
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
