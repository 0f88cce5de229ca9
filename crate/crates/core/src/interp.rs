//! Small-step interpreter.
//!
//! Procedure bodies are compiled to a flat instruction list so that a frame's
//! control point is a single program counter. A configuration is the frame
//! stack alone; printed output is collected outside it.
//!
//! A step never runs an analysis itself. When an expression calls an
//! intrinsic the step stops with [`Step::Consult`], leaving the partly
//! evaluated instruction in the frame, and the caller resumes the frame
//! with the answer. Nested analyses therefore live on the heap.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::decider::{AnalysisStack, RegressSignal};
use crate::dict::Dictionary;
use crate::lang::{Expr, Stmt};
use crate::machine::{DictRef, Finished, Machine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budgets {
    pub max_steps: u64,
    pub max_stack_depth: usize,
    pub max_string_len: usize,
    pub max_analysis_depth: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_steps: 100_000,
            max_stack_depth: 1_000,
            max_string_len: 10_000,
            max_analysis_depth: 64,
        }
    }
}

impl Budgets {
    pub fn is_valid(&self) -> bool {
        self.max_steps > 0
            && self.max_stack_depth > 0
            && self.max_string_len > 0
            && self.max_analysis_depth > 0
    }

    /// Every budget multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Budgets {
        Budgets {
            max_steps: self.max_steps.saturating_mul(factor as u64),
            max_stack_depth: self.max_stack_depth.saturating_mul(factor),
            max_string_len: self.max_string_len.saturating_mul(factor),
            max_analysis_depth: self.max_analysis_depth.saturating_mul(factor),
        }
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Budgets) -> bool {
        self.max_steps <= other.max_steps
            && self.max_stack_depth <= other.max_stack_depth
            && self.max_string_len <= other.max_string_len
            && self.max_analysis_depth <= other.max_analysis_depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BudgetKind {
    Steps,
    StackDepth,
    StringLen,
    AnalysisDepth,
}

impl BudgetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BudgetKind::Steps => "max_steps",
            BudgetKind::StackDepth => "max_stack_depth",
            BudgetKind::StringLen => "max_string_len",
            BudgetKind::AnalysisDepth => "max_analysis_depth",
        }
    }
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One expression operation on a frame's value stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Lit(String),
    Arg,
    /// Pops the right operand, then the left.
    Concat,
    /// Pops the input, then the program, and calls the named function.
    Apply(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    /// Prints the single value.
    Print,
    /// Calls the procedure with the single value.
    Call(String),
    /// Jumps to the target unless the two values are equal.
    BranchIfNe(usize),
    Jump(usize),
    Return,
}

/// Expression code followed by the action that consumes its values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instr {
    pub ops: Vec<Op>,
    pub action: Action,
}

static RETURN: Instr = Instr {
    ops: Vec::new(),
    action: Action::Return,
};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Code(pub Vec<Instr>);

impl Code {
    pub fn compile(body: &Stmt) -> Code {
        let mut code = Vec::new();
        compile_stmt(body, &mut code);
        code.push(RETURN.clone());
        Code(code)
    }
}

fn compile_expr(e: &Expr, ops: &mut Vec<Op>) {
    match e {
        Expr::Lit(s) => ops.push(Op::Lit(s.clone())),
        Expr::Var(_) => ops.push(Op::Arg),
        Expr::Concat(l, r) => {
            compile_expr(l, ops);
            compile_expr(r, ops);
            ops.push(Op::Concat);
        }
        Expr::FnCall { callee, args } => {
            compile_expr(&args.0, ops);
            compile_expr(&args.1, ops);
            ops.push(Op::Apply(callee.clone()));
        }
    }
}

fn instr(exprs: &[&Expr], action: Action) -> Instr {
    let mut ops = Vec::new();
    exprs.iter().for_each(|e| compile_expr(e, &mut ops));
    Instr { ops, action }
}

fn compile_stmt(s: &Stmt, code: &mut Vec<Instr>) {
    match s {
        Stmt::Seq(items) => items.iter().for_each(|i| compile_stmt(i, code)),
        Stmt::Skip => {}
        Stmt::Print(e) => code.push(instr(&[e], Action::Print)),
        Stmt::Call { callee, arg } => code.push(instr(&[arg], Action::Call(callee.clone()))),
        Stmt::If {
            lhs,
            rhs,
            then,
            otherwise,
        } => {
            let branch = code.len();
            code.push(instr(&[lhs, rhs], Action::BranchIfNe(usize::MAX)));
            compile_stmt(then, code);
            let target = match otherwise {
                Some(e) => {
                    let skip = code.len();
                    code.push(instr(&[], Action::Jump(usize::MAX)));
                    let start = code.len();
                    compile_stmt(e, code);
                    code[skip].action = Action::Jump(code.len());
                    start
                }
                None => code.len(),
            };
            code[branch].action = Action::BranchIfNe(target);
        }
    }
}

/// A procedure activation. `cursor` and `values` hold a partly evaluated
/// instruction while an intrinsic call is outstanding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Frame {
    pub proc: String,
    pub arg: String,
    pub pc: usize,
    pub cursor: usize,
    pub values: Vec<String>,
}

impl Frame {
    pub fn new(proc: &str, arg: &str) -> Frame {
        Frame {
            proc: String::from(proc),
            arg: String::from(arg),
            pc: 0,
            cursor: 0,
            values: Vec::new(),
        }
    }
}

/// Interpreter state, bottom frame first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Config {
    pub stack: Vec<Frame>,
}

impl Config {
    pub fn start(proc: &str, arg: &str) -> Config {
        Config {
            stack: alloc::vec![Frame::new(proc, arg)],
        }
    }

    /// Supplies the result of the intrinsic call the top frame is waiting on.
    pub fn resume(&mut self, value: String) {
        if let Some(top) = self.stack.last_mut() {
            top.values.push(value);
            top.cursor += 1;
        }
    }
}

/// Abnormal termination. Counts as halting.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Fault {
    UnresolvedName(String),
    /// A call statement named an intrinsic.
    NotAProcedure(String),
    /// A function-call expression named a procedure.
    NotAFunction(String),
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::UnresolvedName(n) => write!(f, "unresolved name {n:?}"),
            Fault::NotAProcedure(n) => write!(f, "{n:?} is a function, not a procedure"),
            Fault::NotAFunction(n) => write!(f, "{n:?} is a procedure, not a function"),
        }
    }
}

/// Why execution could not continue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interrupt {
    Budget(BudgetKind),
    /// A nested analysis re-requested a live host-level analysis.
    Regress(RegressSignal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepEvent {
    Advanced,
    Printed(String),
    /// A frame was pushed; the new depth is the stack length.
    Entered,
    Returned(Frame),
}

/// An intrinsic call the top frame is suspended on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntrinsicCall {
    pub name: String,
    pub program: String,
    pub input: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Continue(StepEvent),
    Halted,
    Fault(Fault),
    /// Resume with [`Config::resume`] once the call is answered.
    Consult(IntrinsicCall),
}

/// Steps spent so far, shared by a run and every analysis nested in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Meter {
    pub steps: u64,
}

impl Meter {
    fn tick(&mut self, budgets: &Budgets) -> Result<(), Interrupt> {
        if self.steps >= budgets.max_steps {
            return Err(Interrupt::Budget(BudgetKind::Steps));
        }
        self.steps += 1;
        Ok(())
    }
}

/// Everything a step needs besides the configuration.
pub struct Env<'a> {
    pub dict: &'a Dictionary,
    pub budgets: &'a Budgets,
    pub meter: &'a mut Meter,
}

fn checked(v: String, budgets: &Budgets) -> Result<String, Interrupt> {
    if v.len() > budgets.max_string_len {
        return Err(Interrupt::Budget(BudgetKind::StringLen));
    }
    Ok(v)
}

/// Executes one instruction of the top frame, or the rest of it after a
/// [`Step::Consult`]. Only a fresh instruction costs a step.
pub fn step(env: &mut Env<'_>, config: &mut Config) -> Result<Step, Interrupt> {
    let dict = env.dict;
    let budgets = env.budgets;
    let depth = config.stack.len();
    let Some(top) = config.stack.last_mut() else {
        return Ok(Step::Halted);
    };
    if top.cursor == 0 {
        env.meter.tick(budgets)?;
    }
    let Some(entry) = dict.entry(&top.proc) else {
        return Ok(Step::Fault(Fault::UnresolvedName(top.proc.clone())));
    };
    let instr = entry.code().0.get(top.pc).unwrap_or(&RETURN);
    while let Some(op) = instr.ops.get(top.cursor) {
        let v = match op {
            Op::Lit(s) => checked(s.clone(), budgets)?,
            Op::Arg => top.arg.clone(),
            Op::Concat => {
                let r = top.values.pop().unwrap_or_default();
                let mut l = top.values.pop().unwrap_or_default();
                l.push_str(&r);
                checked(l, budgets)?
            }
            Op::Apply(callee) => {
                let input = top.values.pop().unwrap_or_default();
                let program = top.values.pop().unwrap_or_default();
                if dict.intrinsic(callee).is_some() {
                    return Ok(Step::Consult(IntrinsicCall {
                        name: callee.clone(),
                        program,
                        input,
                    }));
                }
                let fault = if dict.entry(callee).is_some() {
                    Fault::NotAFunction(callee.clone())
                } else {
                    Fault::UnresolvedName(callee.clone())
                };
                return Ok(Step::Fault(fault));
            }
        };
        top.values.push(v);
        top.cursor += 1;
    }
    top.cursor = 0;
    let mut values = core::mem::take(&mut top.values);
    let pc = top.pc;
    let event = match &instr.action {
        Action::Return => {
            let Some(frame) = config.stack.pop() else {
                return Ok(Step::Halted);
            };
            if config.stack.is_empty() {
                return Ok(Step::Halted);
            }
            StepEvent::Returned(frame)
        }
        Action::Jump(t) => {
            top.pc = *t;
            StepEvent::Advanced
        }
        Action::BranchIfNe(target) => {
            let r = values.pop();
            let l = values.pop();
            top.pc = if l == r { pc + 1 } else { *target };
            StepEvent::Advanced
        }
        Action::Print => {
            top.pc = pc + 1;
            StepEvent::Printed(values.pop().unwrap_or_default())
        }
        Action::Call(callee) => {
            if dict.entry(callee).is_none() {
                let fault = if dict.intrinsic(callee).is_some() {
                    Fault::NotAProcedure(callee.clone())
                } else {
                    Fault::UnresolvedName(callee.clone())
                };
                return Ok(Step::Fault(fault));
            }
            if depth >= budgets.max_stack_depth {
                return Err(Interrupt::Budget(BudgetKind::StackDepth));
            }
            top.pc = pc + 1;
            let arg = values.pop().unwrap_or_default();
            config.stack.push(Frame {
                proc: callee.clone(),
                arg,
                pc: 0,
                cursor: 0,
                values: Vec::new(),
            });
            StepEvent::Entered
        }
    };
    Ok(Step::Continue(event))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RunOutcome {
    Halted(Vec<String>),
    Fault(Fault, Vec<String>),
    BudgetExceeded(BudgetKind, Vec<String>),
}

impl RunOutcome {
    pub fn transcript(&self) -> &[String] {
        match self {
            RunOutcome::Halted(t) | RunOutcome::Fault(_, t) | RunOutcome::BudgetExceeded(_, t) => t,
        }
    }

    /// Halted or faulted.
    pub fn terminated(&self) -> bool {
        !matches!(self, RunOutcome::BudgetExceeded(..))
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunOutcome::Halted(_) => "halted",
            RunOutcome::Fault(..) => "fault",
            RunOutcome::BudgetExceeded(..) => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("unknown procedure {0:?}")]
    UnknownProcedure(String),
}

pub fn run(
    dict: &Dictionary,
    proc: &str,
    input: &str,
    budgets: &Budgets,
) -> Result<RunReport, RunError> {
    run_observed(dict, proc, input, budgets, |_, _| {})
}

/// Like [`run`], calling `observe` after every step that continues.
pub fn run_observed(
    dict: &Dictionary,
    proc: &str,
    input: &str,
    budgets: &Budgets,
    mut observe: impl FnMut(&Config, &StepEvent),
) -> Result<RunReport, RunError> {
    if dict.entry(proc).is_none() {
        return Err(RunError::UnknownProcedure(String::from(proc)));
    }
    let mut analyses = AnalysisStack::default();
    let mut machine = Machine::new(budgets, &mut analyses);
    let finished = machine.run(DictRef::Borrowed(dict), proc, input, &mut observe);
    let transcript = core::mem::take(&mut machine.transcript);
    let outcome = match finished {
        Ok(Finished::Fault(f)) => RunOutcome::Fault(f, transcript),
        Ok(_) => RunOutcome::Halted(transcript),
        Err(Interrupt::Budget(kind)) => RunOutcome::BudgetExceeded(kind, transcript),
        // only host-level analyses are regress targets and a run starts none
        Err(Interrupt::Regress(_)) => {
            RunOutcome::BudgetExceeded(BudgetKind::AnalysisDepth, transcript)
        }
    };
    Ok(RunReport {
        outcome,
        steps: machine.meter.steps,
    })
}
