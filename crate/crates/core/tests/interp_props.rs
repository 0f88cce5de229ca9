mod support;

use haltkit_core::corpus;
use haltkit_core::interp::{run, run_observed, Config, StepEvent};
use haltkit_core::{render, Budgets, Dictionary};
use proptest::prelude::*;
use support::{larger, program, small_budgets};

fn snapshot(dict: &Dictionary) -> Vec<String> {
    let mut v: Vec<String> = dict.entries().map(|e| render(&e.decl)).collect();
    v.extend(dict.intrinsics().map(|i| format!("{i:?}")));
    v
}

/// `(depth, proc, arg, event)` for every step of the bottom run.
type Observed = Vec<(usize, String, String, StepEvent)>;

fn observe(dict: &Dictionary, proc: &str, input: &str, budgets: &Budgets) -> Observed {
    let mut seen = Vec::new();
    run_observed(dict, proc, input, budgets, |c: &Config, ev: &StepEvent| {
        let top = c.stack.last().unwrap();
        seen.push((c.stack.len(), top.proc.clone(), top.arg.clone(), ev.clone()));
    })
    .unwrap();
    seen
}

/// After a frame `(p, a)` is pushed while an identical frame is pending, the
/// steps that follow mirror the steps that followed the earlier push, one
/// level deeper.
fn check_repeat(events: &Observed) -> Result<bool, TestCaseError> {
    let entries: Vec<(usize, usize, &str, &str)> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.3 == StepEvent::Entered)
        .map(|(i, e)| (i, e.0, e.1.as_str(), e.2.as_str()))
        .collect();
    for (j, &(i2, d2, p, a)) in entries.iter().enumerate() {
        // the latest earlier push of the same pair that is still pending
        let earlier = entries[..j].iter().rev().find(|&&(i1, d1, p1, a1)| {
            p1 == p && a1 == a && d1 < d2 && events[i1..i2].iter().all(|e| e.0 >= d1)
        });
        if let Some(&(i1, d1, ..)) = earlier {
            let shift = d2 - d1;
            for k in 0..(i2 - i1) {
                let Some(later) = events.get(i2 + k) else {
                    break;
                };
                let first = &events[i1 + k];
                prop_assert_eq!(later.0, first.0 + shift);
                prop_assert_eq!(
                    (&later.1, &later.2, &later.3),
                    (&first.1, &first.2, &first.3)
                );
            }
            return Ok(true);
        }
    }
    Ok(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn runs_are_deterministic(p in program(), b in small_budgets()) {
        let dict = p.dictionary();
        let first = run(&dict, &p.entry, &p.input, &b).unwrap();
        let second = run(&dict, &p.entry, &p.input, &b).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn termination_survives_larger_budgets((p, b, bigger) in (program(), small_budgets())
        .prop_flat_map(|(p, b)| (Just(p), Just(b), larger(b))))
    {
        prop_assert!(b.le(&bigger));
        let dict = p.dictionary();
        let small = run(&dict, &p.entry, &p.input, &b).unwrap();
        if small.outcome.terminated() {
            let big = run(&dict, &p.entry, &p.input, &bigger).unwrap();
            prop_assert_eq!(big.outcome, small.outcome);
            prop_assert_eq!(big.steps, small.steps);
        }
    }

    #[test]
    fn running_leaves_the_dictionary_alone(p in program()) {
        let dict = p.dictionary();
        let before = snapshot(&dict);
        run(&dict, &p.entry, &p.input, &Budgets::default()).unwrap();
        prop_assert_eq!(snapshot(&dict), before);
    }

    #[test]
    fn step_counts_respect_the_budget(p in program(), b in small_budgets()) {
        let r = run(&p.dictionary(), &p.entry, &p.input, &b).unwrap();
        prop_assert!(r.steps <= b.max_steps);
    }

    #[test]
    fn repeated_frames_repeat_their_computation(p in program()) {
        let budgets = Budgets { max_steps: 2_000, ..Budgets::default() };
        let events = observe(&p.dictionary(), &p.entry, &p.input, &budgets);
        check_repeat(&events)?;
    }
}

#[test]
fn crafted_repeats() {
    let dict = corpus::paper_dictionary()
        .add_decl("procedure ping (s: string); begin print (s); pong (s + 'a') end")
        .unwrap()
        .add_decl(
            "procedure pong (s: string); begin print ('<' + s); if s = 'za' then ping ('z') end",
        )
        .unwrap();
    let budgets = Budgets {
        max_steps: 200,
        ..Budgets::default()
    };
    for (proc, input) in [("loop", "x"), ("ping", "z")] {
        let events = observe(&dict, proc, input, &budgets);
        assert!(check_repeat(&events).unwrap(), "{proc}");
    }
}
