//! The driver behind runs, decisions and analyses.
//!
//! Every simulation in progress is an activation on one heap stack: the
//! bottom one is the run or decision the caller asked for, and each one
//! above it is an analysis requested by an intrinsic call in the activation
//! below. A regress unwinds to the activation that owns the re-requested
//! host entry.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::analyzers::{prepare, Analyzer, Prepared};
use crate::decider::{
    AnalysisEntry, AnalysisStack, Decision, DivergenceProof, Halting, Origin, RegressSignal, Trace,
    TraceEvent, Verdict,
};
use crate::dict::Dictionary;
use crate::interp::{
    step, BudgetKind, Budgets, Config, Env, Fault, Interrupt, IntrinsicCall, Meter, Step, StepEvent,
};

/// The caller's dictionary, or a snapshot extended with an analysis subject.
#[derive(Debug, Clone)]
pub(crate) enum DictRef<'a> {
    Borrowed(&'a Dictionary),
    Shared(Arc<Dictionary>),
}

impl Deref for DictRef<'_> {
    type Target = Dictionary;

    fn deref(&self) -> &Dictionary {
        match self {
            DictRef::Borrowed(d) => d,
            DictRef::Shared(d) => d,
        }
    }
}

struct Simulation {
    /// The host entry a regress resolves against.
    root: Option<AnalysisEntry>,
    pending: BTreeMap<(String, String), usize>,
    trace: Trace,
    record: bool,
    start_steps: u64,
}

enum Task {
    Run,
    Decide(Box<Simulation>),
}

struct Activation<'a> {
    dict: DictRef<'a>,
    config: Config,
    task: Task,
}

enum Next {
    Go,
    Finish(Halting, Option<DivergenceProof>),
    Done(Finished),
    Consult(IntrinsicCall),
}

pub(crate) enum Finished {
    Halted,
    Fault(Fault),
    Decided(Decision),
}

pub(crate) struct Machine<'a, 's> {
    budgets: &'a Budgets,
    analyses: &'s mut AnalysisStack,
    pub meter: Meter,
    /// Output of a bottom-level run.
    pub transcript: Vec<String>,
    acts: Vec<Activation<'a>>,
    base: usize,
}

impl<'a, 's> Machine<'a, 's> {
    pub fn new(budgets: &'a Budgets, analyses: &'s mut AnalysisStack) -> Self {
        let base = analyses.len();
        Machine {
            budgets,
            analyses,
            meter: Meter::default(),
            transcript: Vec::new(),
            acts: Vec::new(),
            base,
        }
    }

    pub fn run(
        &mut self,
        dict: DictRef<'a>,
        proc: &str,
        input: &str,
        observe: &mut dyn FnMut(&Config, &StepEvent),
    ) -> Result<Finished, Interrupt> {
        self.check_len(input)?;
        self.acts.push(Activation {
            dict,
            config: Config::start(proc, input),
            task: Task::Run,
        });
        self.drive(observe)
    }

    /// Decides `proc` on `input`. A regress against the host entry on top of
    /// the analysis stack is resolved here.
    pub fn decide(
        &mut self,
        dict: DictRef<'a>,
        proc: &str,
        input: &str,
        record: bool,
    ) -> Result<Decision, Interrupt> {
        let top = self.analyses.top().cloned();
        let root = top
            .clone()
            .filter(|(_, o)| *o == Origin::Host)
            .map(|(e, _)| e);
        let sim = self.simulation(proc, input, root, top.map(|(e, _)| e), record);
        self.check_len(input)?;
        self.acts.push(Activation {
            dict,
            config: Config::start(proc, input),
            task: Task::Decide(Box::new(sim)),
        });
        match self.drive(&mut |_, _| {})? {
            Finished::Decided(d) => Ok(d),
            // a decision activation never finishes as a run
            Finished::Halted | Finished::Fault(_) => Err(Interrupt::Budget(BudgetKind::Steps)),
        }
    }

    fn check_len(&self, s: &str) -> Result<(), Interrupt> {
        if s.len() > self.budgets.max_string_len {
            return Err(Interrupt::Budget(BudgetKind::StringLen));
        }
        Ok(())
    }

    fn simulation(
        &self,
        proc: &str,
        input: &str,
        root: Option<AnalysisEntry>,
        trace_root: Option<AnalysisEntry>,
        record: bool,
    ) -> Simulation {
        let mut pending = BTreeMap::new();
        pending.insert((String::from(proc), String::from(input)), 1);
        let mut trace = Trace {
            root: trace_root,
            events: Vec::new(),
        };
        if record {
            trace.events.push(TraceEvent::Enter {
                depth: 1,
                proc: String::from(proc),
                arg: String::from(input),
            });
        }
        Simulation {
            root,
            pending,
            trace,
            record,
            start_steps: self.meter.steps,
        }
    }

    fn drive(
        &mut self,
        observe: &mut dyn FnMut(&Config, &StepEvent),
    ) -> Result<Finished, Interrupt> {
        let r = self.drive_inner(observe);
        self.acts.clear();
        self.analyses.truncate(self.base);
        r
    }

    fn drive_inner(
        &mut self,
        observe: &mut dyn FnMut(&Config, &StepEvent),
    ) -> Result<Finished, Interrupt> {
        loop {
            let bottom = self.acts.len() == 1;
            let Some(act) = self.acts.last_mut() else {
                return Ok(Finished::Halted);
            };
            let mut env = Env {
                dict: &act.dict,
                budgets: self.budgets,
                meter: &mut self.meter,
            };
            let stepped = step(&mut env, &mut act.config)?;
            let next = match (stepped, &mut act.task) {
                (Step::Continue(ev), task) => {
                    if bottom {
                        observe(&act.config, &ev);
                    }
                    match task {
                        Task::Run => {
                            if let StepEvent::Printed(s) = ev {
                                self.transcript.push(s);
                            }
                            Next::Go
                        }
                        Task::Decide(sim) => match track(sim, &act.config, ev) {
                            Some(proof) => Next::Finish(Halting::No, Some(proof)),
                            None => Next::Go,
                        },
                    }
                }
                (Step::Halted, Task::Run) => Next::Done(Finished::Halted),
                (Step::Fault(f), Task::Run) => Next::Done(Finished::Fault(f)),
                (Step::Halted | Step::Fault(_), Task::Decide(_)) => {
                    Next::Finish(Halting::Yes, None)
                }
                (Step::Consult(call), _) => Next::Consult(call),
            };
            let done = match next {
                Next::Go => None,
                Next::Done(f) => Some(f),
                Next::Finish(halting, proof) => self.finish(halting, proof)?,
                Next::Consult(call) => self.consult(call)?,
            };
            if let Some(f) = done {
                return Ok(f);
            }
        }
    }

    /// Answers an intrinsic call from the top activation, either at once or
    /// by starting a nested simulation.
    fn consult(&mut self, call: IntrinsicCall) -> Result<Option<Finished>, Interrupt> {
        let Some(act) = self.acts.last() else {
            return Ok(None);
        };
        let Some(analyzer) = Analyzer::lookup(&act.dict, &call.name) else {
            return Ok(Some(Finished::Fault(Fault::UnresolvedName(call.name))));
        };
        match prepare(&act.dict, &analyzer, &call.program, &call.input) {
            Prepared::Immediate { verdict, .. } => {
                self.deliver(verdict)?;
                Ok(None)
            }
            Prepared::Simulate { dict, name, entry } => {
                match self.analyses.request(entry, Origin::Object, self.budgets) {
                    Ok(()) => {
                        let sim = self.simulation(&name, &call.input, None, None, false);
                        self.acts.push(Activation {
                            dict,
                            config: Config::start(&name, &call.input),
                            task: Task::Decide(Box::new(sim)),
                        });
                        Ok(None)
                    }
                    Err(Interrupt::Regress(sig)) => self.regress(sig),
                    Err(e) => Err(e),
                }
            }
        }
    }

    fn regress(&mut self, sig: RegressSignal) -> Result<Option<Finished>, Interrupt> {
        let owner = self.acts.iter().rposition(
            |a| matches!(&a.task, Task::Decide(s) if s.root.as_ref() == Some(&sig.entry)),
        );
        let Some(k) = owner else {
            return Err(Interrupt::Regress(sig));
        };
        while self.acts.len() > k + 1 {
            self.acts.pop();
            self.analyses.pop();
        }
        if let Some(Activation {
            task: Task::Decide(sim),
            ..
        }) = self.acts.last_mut()
        {
            if sim.record {
                sim.trace.events.push(TraceEvent::Regress {
                    requested: sig.entry.clone(),
                    via: sig.via,
                });
            }
        }
        let proof = DivergenceProof::AnalysisRegress {
            analyzer: sig.entry.analyzer,
            fingerprint: sig.entry.fingerprint,
            input: sig.entry.input,
        };
        self.finish(Halting::No, Some(proof))
    }

    /// Concludes the top activation, which must be a decision.
    fn finish(
        &mut self,
        halting: Halting,
        proof: Option<DivergenceProof>,
    ) -> Result<Option<Finished>, Interrupt> {
        let Some(Activation {
            task: Task::Decide(sim),
            ..
        }) = self.acts.pop()
        else {
            return Ok(Some(Finished::Halted));
        };
        let decision = Decision {
            halting,
            proof,
            trace: sim.trace,
            steps: self.meter.steps - sim.start_steps,
        };
        if self.acts.is_empty() {
            return Ok(Some(Finished::Decided(decision)));
        }
        self.analyses.pop();
        self.deliver(halting.into())?;
        Ok(None)
    }

    fn deliver(&mut self, verdict: Verdict) -> Result<(), Interrupt> {
        self.check_len(verdict.as_str())?;
        if let Some(act) = self.acts.last_mut() {
            act.config.resume(String::from(verdict.as_str()));
        }
        Ok(())
    }
}

/// Applies the pending-call rule to one step of a simulation.
fn track(sim: &mut Simulation, config: &Config, ev: StepEvent) -> Option<DivergenceProof> {
    match ev {
        StepEvent::Entered => {
            let depth = config.stack.len();
            let top = config.stack.last()?;
            let key = (top.proc.clone(), top.arg.clone());
            if sim.record {
                sim.trace.events.push(TraceEvent::Enter {
                    depth,
                    proc: key.0.clone(),
                    arg: key.1.clone(),
                });
            }
            if let Some(&matched) = sim.pending.get(&key) {
                return Some(DivergenceProof::PendingCallRepeat {
                    proc: key.0,
                    arg: key.1,
                    depth: matched,
                });
            }
            sim.pending.insert(key, depth);
            None
        }
        StepEvent::Returned(frame) => {
            if sim.record {
                sim.trace.events.push(TraceEvent::Exit {
                    depth: config.stack.len() + 1,
                    proc: frame.proc.clone(),
                    arg: frame.arg.clone(),
                });
            }
            sim.pending.remove(&(frame.proc, frame.arg));
            None
        }
        StepEvent::Advanced | StepEvent::Printed(_) => None,
    }
}
