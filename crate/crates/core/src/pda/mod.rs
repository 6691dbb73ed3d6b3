//! Deterministic bounded pushdown transducers: execution, validation and
//! information-lossless checks.
//!
//! A machine reads one input symbol at a time. Each symbol fires exactly one
//! symbol transition (which emits output) followed by as many λ-rules as are
//! defined, up to the budget `c`. λ-rules pop the stack top and emit nothing.

mod table;
mod text;
mod verify;

use std::borrow::Cow;
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::alphabet::Sym;

pub use table::{SpecBuilder, TransducerSpec, Violation};
pub use text::{parse_spec, print_spec, TextError};
pub use verify::{
    check_il, check_visibly, run_inverse_pair, state_trailer, trailer_width, IlVerdict,
    InverseVerdict, SymbolClass, VisiblyViolation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdaError {
    #[error("undefined transition after {position} symbols: state {state}, input {input}, top {top}")]
    UndefinedTransition { position: usize, state: String, input: String, top: Sym },
    #[error("more than {budget} λ-rules in one gap after {position} symbols (state {state})")]
    BudgetExceeded { position: usize, budget: usize, state: String },
    #[error("input symbol {symbol} is outside the alphabet")]
    BadSymbol { symbol: Sym },
    #[error("machine declares no endmarker")]
    NoEndmarker,
    #[error("machine has no enumerable state set")]
    Untabulated,
}

/// A deterministic pushdown transducer, given either as tables or as pure
/// functions of (state, input, top).
///
/// Input symbols are `0..input_size()`; when an endmarker is declared it is the
/// symbol `input_size()`. Push strings are written top first and replace the
/// current top.
pub trait Pushdown {
    type State: Clone + Eq + Hash + Debug;

    fn input_size(&self) -> usize;
    fn has_endmarker(&self) -> bool;
    fn bottom(&self) -> Sym;
    fn initial(&self) -> Self::State;
    fn budget(&self) -> usize;
    fn delta(&self, q: &Self::State, input: Option<Sym>, top: Sym) -> Option<(Self::State, Cow<'_, [Sym]>)>;
    fn nu(&self, q: &Self::State, input: Sym, top: Sym) -> Cow<'_, [Sym]>;

    fn state_name(&self, q: &Self::State) -> String {
        format!("{q:?}")
    }

    /// Dense index of `q`, for machines with an enumerable state set.
    fn state_index(&self, _q: &Self::State) -> Option<usize> {
        None
    }

    fn state_count(&self) -> Option<usize> {
        None
    }

    fn endmarker(&self) -> Option<Sym> {
        self.has_endmarker().then_some(self.input_size() as Sym)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineConfig<S> {
    pub state: S,
    /// Bottom at index 0, top at the end.
    pub stack: Vec<Sym>,
    pub lambda_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Symbol(Sym),
    Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent<S> {
    pub before: MachineConfig<S>,
    pub rule: Rule,
    pub emitted: Vec<Sym>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult<S> {
    pub output: Vec<Sym>,
    /// State after the last input symbol and its λ-rules, endmarker excluded.
    pub final_state: S,
    /// State after the endmarker, for endmarked runs.
    pub end_state: Option<S>,
    pub consumed: usize,
    pub trace: Option<Vec<TraceEvent<S>>>,
}

fn apply_push(stack: &mut Vec<Sym>, push: &[Sym]) {
    stack.pop();
    stack.extend(push.iter().rev());
}

/// Incremental execution of one machine on one input.
pub struct Runner<'m, P: Pushdown + ?Sized> {
    machine: &'m P,
    config: MachineConfig<P::State>,
    position: usize,
    trace: Option<Vec<TraceEvent<P::State>>>,
}

impl<P: Pushdown + ?Sized> Clone for Runner<'_, P> {
    fn clone(&self) -> Self {
        Runner { machine: self.machine, config: self.config.clone(), position: self.position, trace: self.trace.clone() }
    }
}

impl<'m, P: Pushdown + ?Sized> Runner<'m, P> {
    /// Starts in `(q0, [z0])` and applies the λ-rules of the leading gap.
    pub fn new(machine: &'m P, traced: bool) -> Result<Self, PdaError> {
        let config = MachineConfig { state: machine.initial(), stack: vec![machine.bottom()], lambda_used: 0 };
        let mut r = Runner { machine, config, position: 0, trace: traced.then(Vec::new) };
        r.close()?;
        Ok(r)
    }

    pub fn config(&self) -> &MachineConfig<P::State> {
        &self.config
    }

    pub fn position(&self) -> usize {
        self.position
    }

    fn close(&mut self) -> Result<(), PdaError> {
        let m = self.machine;
        self.config.lambda_used = 0;
        loop {
            let top = *self.config.stack.last().expect("stack holds z0");
            let Some((next, push)) = m.delta(&self.config.state, None, top) else {
                return Ok(());
            };
            if self.config.lambda_used == m.budget() {
                return Err(PdaError::BudgetExceeded {
                    position: self.position,
                    budget: m.budget(),
                    state: m.state_name(&self.config.state),
                });
            }
            if let Some(t) = self.trace.as_mut() {
                t.push(TraceEvent { before: self.config.clone(), rule: Rule::Lambda, emitted: Vec::new() });
            }
            apply_push(&mut self.config.stack, &push);
            self.config.state = next;
            self.config.lambda_used += 1;
        }
    }

    /// Consumes one symbol (possibly the endmarker), appending its emission to `out`.
    pub fn feed(&mut self, sym: Sym, out: &mut Vec<Sym>) -> Result<(), PdaError> {
        let m = self.machine;
        let limit = m.input_size() + m.has_endmarker() as usize;
        if sym as usize >= limit {
            return Err(PdaError::BadSymbol { symbol: sym });
        }
        let top = *self.config.stack.last().expect("stack holds z0");
        let Some((next, push)) = m.delta(&self.config.state, Some(sym), top) else {
            return Err(PdaError::UndefinedTransition {
                position: self.position,
                state: m.state_name(&self.config.state),
                input: sym.to_string(),
                top,
            });
        };
        let emitted = m.nu(&self.config.state, sym, top);
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent { before: self.config.clone(), rule: Rule::Symbol(sym), emitted: emitted.to_vec() });
        }
        out.extend_from_slice(&emitted);
        apply_push(&mut self.config.stack, &push);
        self.config.state = next;
        self.position += 1;
        self.close()
    }

    pub fn into_trace(self) -> Option<Vec<TraceEvent<P::State>>> {
        self.trace
    }
}

/// One symbol transition plus the λ-rules that follow it.
pub fn step_symbol<P: Pushdown + ?Sized>(
    machine: &P,
    config: &MachineConfig<P::State>,
    sym: Sym,
) -> Result<(MachineConfig<P::State>, Vec<Sym>), PdaError> {
    let mut r = Runner { machine, config: config.clone(), position: 0, trace: None };
    let mut out = Vec::new();
    r.feed(sym, &mut out)?;
    Ok((r.config, out))
}

pub fn run<P: Pushdown + ?Sized>(machine: &P, input: &[Sym], endmarked: bool) -> Result<RunResult<P::State>, PdaError> {
    run_with(machine, input, endmarked, false)
}

pub fn run_traced<P: Pushdown + ?Sized>(
    machine: &P,
    input: &[Sym],
    endmarked: bool,
) -> Result<RunResult<P::State>, PdaError> {
    run_with(machine, input, endmarked, true)
}

fn run_with<P: Pushdown + ?Sized>(
    machine: &P,
    input: &[Sym],
    endmarked: bool,
    traced: bool,
) -> Result<RunResult<P::State>, PdaError> {
    let end = if endmarked { Some(machine.endmarker().ok_or(PdaError::NoEndmarker)?) } else { None };
    let mut r = Runner::new(machine, traced)?;
    let mut output = Vec::new();
    for &s in input {
        if end == Some(s) {
            return Err(PdaError::BadSymbol { symbol: s });
        }
        r.feed(s, &mut output)?;
    }
    let final_state = r.config.state.clone();
    let end_state = match end {
        Some(e) => {
            r.feed(e, &mut output)?;
            Some(r.config.state.clone())
        }
        None => None,
    };
    let consumed = input.len();
    Ok(RunResult { output, final_state, end_state, consumed, trace: r.into_trace() })
}
