use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::Pushdown;
use crate::alphabet::Sym;

/// A tabulated bounded pushdown compressor. Missing δ entries are ⊥ and
/// missing ν entries emit the empty string.
#[derive(Clone, PartialEq, Eq)]
pub struct TransducerSpec {
    input: Vec<char>,
    endmarker: Option<char>,
    stack: Vec<char>,
    bottom: Sym,
    states: Vec<String>,
    initial: u32,
    budget: usize,
    delta: BTreeMap<(u32, Option<Sym>, Sym), (u32, Vec<Sym>)>,
    nu: BTreeMap<(u32, Sym, Sym), Vec<Sym>>,
    dense_delta: Vec<Option<(u32, Vec<Sym>)>>,
    dense_nu: Vec<Vec<Sym>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("unknown input symbol {0:?}")]
    UnknownInput(char),
    #[error("unknown stack symbol {0:?}")]
    UnknownStack(char),
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(char),
    #[error("bottom symbol {0:?} is not in the stack alphabet")]
    BadBottom(char),
    #[error("duplicate entry for {0}")]
    DuplicateEntry(String),
    #[error("spec has no states")]
    NoStates,
}

/// A failed side condition of the machine definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// δ(q, b, z0) does not keep z0 at the bottom.
    BottomRemoved { state: String, input: Option<char> },
    /// Both δ(q, λ, a) and some δ(q, b, a) are defined.
    Nondeterministic { state: String, top: char },
    /// δ(q, λ, a) pushes instead of popping.
    LambdaPushes { state: String, top: char },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BottomRemoved { state, input } => {
                let b = input.map(String::from).unwrap_or_else(|| "~".into());
                write!(f, "bottom removed at ({state}, {b}, z0)")
            }
            Violation::Nondeterministic { state, top } => write!(f, "determinism violation at ({state}, {top})"),
            Violation::LambdaPushes { state, top } => write!(f, "λ-rule does not pop at ({state}, {top})"),
        }
    }
}

impl TransducerSpec {
    pub fn input_symbols(&self) -> &[char] {
        &self.input
    }

    pub fn endmarker_char(&self) -> Option<char> {
        self.endmarker
    }

    pub fn stack_symbols(&self) -> &[char] {
        &self.stack
    }

    pub fn bottom_sym(&self) -> Sym {
        self.bottom
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial_state(&self) -> u32 {
        self.initial
    }

    pub fn lambda_budget(&self) -> usize {
        self.budget
    }

    pub fn delta_entries(&self) -> impl Iterator<Item = (&(u32, Option<Sym>, Sym), &(u32, Vec<Sym>))> {
        self.delta.iter()
    }

    pub fn nu_entries(&self) -> impl Iterator<Item = (&(u32, Sym, Sym), &Vec<Sym>)> {
        self.nu.iter()
    }

    pub fn lambda_rule_count(&self) -> usize {
        self.delta.keys().filter(|k| k.1.is_none()).count()
    }

    fn n_inputs(&self) -> usize {
        self.input.len() + self.endmarker.is_some() as usize
    }

    fn delta_index(&self, q: u32, input: Option<Sym>, top: Sym) -> usize {
        let slot = input.map_or(0, |b| b as usize + 1);
        (q as usize * (self.n_inputs() + 1) + slot) * self.stack.len() + top as usize
    }

    fn nu_index(&self, q: u32, input: Sym, top: Sym) -> usize {
        (q as usize * self.n_inputs() + input as usize) * self.stack.len() + top as usize
    }

    fn input_char(&self, b: Sym) -> char {
        if (b as usize) < self.input.len() {
            self.input[b as usize]
        } else {
            self.endmarker.expect("endmarker slot")
        }
    }

    /// Checks bottom preservation, determinism and pop-only λ-rules on every entry.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&(q, b, top), (_, push)) in &self.delta {
            let state = self.states[q as usize].clone();
            if top == self.bottom && push.last() != Some(&self.bottom) {
                out.push(Violation::BottomRemoved { state: state.clone(), input: b.map(|b| self.input_char(b)) });
            }
            if b.is_none() && !push.is_empty() {
                out.push(Violation::LambdaPushes { state, top: self.stack[top as usize] });
            }
        }
        for (&(q, b, top), _) in &self.delta {
            if b.is_some() {
                continue;
            }
            let clash = (0..self.n_inputs() as Sym).any(|s| self.delta.contains_key(&(q, Some(s), top)));
            if clash {
                out.push(Violation::Nondeterministic {
                    state: self.states[q as usize].clone(),
                    top: self.stack[top as usize],
                });
            }
        }
        out
    }

    pub fn state_id(&self, name: &str) -> Option<u32> {
        self.states.iter().position(|s| s == name).map(|i| i as u32)
    }
}

impl fmt::Debug for TransducerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransducerSpec")
            .field("states", &self.states.len())
            .field("delta", &self.delta.len())
            .field("nu", &self.nu.len())
            .field("budget", &self.budget)
            .finish()
    }
}

impl Pushdown for TransducerSpec {
    type State = u32;

    fn input_size(&self) -> usize {
        self.input.len()
    }

    fn has_endmarker(&self) -> bool {
        self.endmarker.is_some()
    }

    fn bottom(&self) -> Sym {
        self.bottom
    }

    fn initial(&self) -> u32 {
        self.initial
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn delta(&self, q: &u32, input: Option<Sym>, top: Sym) -> Option<(u32, Cow<'_, [Sym]>)> {
        self.dense_delta[self.delta_index(*q, input, top)]
            .as_ref()
            .map(|(n, p)| (*n, Cow::Borrowed(p.as_slice())))
    }

    fn nu(&self, q: &u32, input: Sym, top: Sym) -> Cow<'_, [Sym]> {
        Cow::Borrowed(self.dense_nu[self.nu_index(*q, input, top)].as_slice())
    }

    fn state_name(&self, q: &u32) -> String {
        self.states[*q as usize].clone()
    }

    fn state_index(&self, q: &u32) -> Option<usize> {
        Some(*q as usize)
    }

    fn state_count(&self) -> Option<usize> {
        Some(self.states.len())
    }
}

/// Incremental construction of a [`TransducerSpec`]. The first state added is
/// the initial state unless [`SpecBuilder::initial`] says otherwise.
#[derive(Clone, Debug)]
pub struct SpecBuilder {
    input: Vec<char>,
    endmarker: Option<char>,
    stack: Vec<char>,
    bottom: char,
    budget: usize,
    states: Vec<String>,
    state_ids: std::collections::HashMap<String, u32>,
    initial: Option<String>,
    delta: BTreeMap<(u32, Option<Sym>, Sym), (u32, Vec<Sym>)>,
    nu: BTreeMap<(u32, Sym, Sym), Vec<Sym>>,
    errors: Vec<SpecError>,
}

impl SpecBuilder {
    pub fn new(input: &str, endmarker: Option<char>, stack: &str, bottom: char, budget: usize) -> Self {
        SpecBuilder {
            input: input.chars().collect(),
            endmarker,
            stack: stack.chars().collect(),
            bottom,
            budget,
            states: Vec::new(),
            state_ids: Default::default(),
            initial: None,
            delta: BTreeMap::new(),
            nu: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.state_ids.get(name) {
            return id;
        }
        let id = self.states.len() as u32;
        self.states.push(name.to_string());
        self.state_ids.insert(name.to_string(), id);
        id
    }

    pub fn initial(&mut self, name: &str) {
        self.state(name);
        self.initial = Some(name.to_string());
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
    }

    fn input_sym(&mut self, c: char) -> Sym {
        if let Some(i) = self.input.iter().position(|&x| x == c) {
            return i as Sym;
        }
        if self.endmarker == Some(c) {
            return self.input.len() as Sym;
        }
        self.errors.push(SpecError::UnknownInput(c));
        0
    }

    fn stack_sym(&mut self, c: char) -> Sym {
        match self.stack.iter().position(|&x| x == c) {
            Some(i) => i as Sym,
            None => {
                self.errors.push(SpecError::UnknownStack(c));
                0
            }
        }
    }

    /// Adds δ(q, input, top) = (next, push) by name; `input = None` is a λ-rule.
    pub fn delta(&mut self, q: &str, input: Option<char>, top: char, next: &str, push: &str) {
        let q = self.state(q);
        let n = self.state(next);
        let b = input.map(|c| self.input_sym(c));
        let t = self.stack_sym(top);
        let p: Vec<Sym> = push.chars().map(|c| self.stack_sym(c)).collect();
        self.delta_id(q, b, t, n, p);
    }

    /// Adds ν(q, input, top) = out by name.
    pub fn nu(&mut self, q: &str, input: char, top: char, out: &str) {
        let q = self.state(q);
        let b = self.input_sym(input);
        let t = self.stack_sym(top);
        let o: Vec<Sym> = out.chars().map(|c| self.input_sym(c)).collect();
        self.nu_id(q, b, t, o);
    }

    pub fn delta_id(&mut self, q: u32, input: Option<Sym>, top: Sym, next: u32, push: Vec<Sym>) {
        if self.delta.insert((q, input, top), (next, push)).is_some() {
            self.errors.push(SpecError::DuplicateEntry(format!("delta {} {:?} {}", self.states[q as usize], input, top)));
        }
    }

    pub fn nu_id(&mut self, q: u32, input: Sym, top: Sym, out: Vec<Sym>) {
        if out.is_empty() {
            return;
        }
        if self.nu.insert((q, input, top), out).is_some() {
            self.errors.push(SpecError::DuplicateEntry(format!("nu {} {} {}", self.states[q as usize], input, top)));
        }
    }

    pub fn build(self) -> Result<TransducerSpec, SpecError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        if self.states.is_empty() {
            return Err(SpecError::NoStates);
        }
        for (i, c) in self.input.iter().enumerate() {
            if self.input[..i].contains(c) || self.endmarker == Some(*c) {
                return Err(SpecError::DuplicateSymbol(*c));
            }
        }
        for (i, c) in self.stack.iter().enumerate() {
            if self.stack[..i].contains(c) {
                return Err(SpecError::DuplicateSymbol(*c));
            }
        }
        let bottom = self.stack.iter().position(|&c| c == self.bottom).ok_or(SpecError::BadBottom(self.bottom))? as Sym;
        let initial = match &self.initial {
            Some(name) => self.state_ids[name],
            None => 0,
        };
        let mut spec = TransducerSpec {
            input: self.input,
            endmarker: self.endmarker,
            stack: self.stack,
            bottom,
            states: self.states,
            initial,
            budget: self.budget,
            delta: self.delta,
            nu: self.nu,
            dense_delta: Vec::new(),
            dense_nu: Vec::new(),
        };
        let q = spec.states.len();
        let ni = spec.n_inputs();
        let ns = spec.stack.len();
        spec.dense_delta = vec![None; q * (ni + 1) * ns];
        spec.dense_nu = vec![Vec::new(); q * ni * ns];
        for (&(s, b, t), v) in &spec.delta {
            let i = spec.delta_index(s, b, t);
            spec.dense_delta[i] = Some(v.clone());
        }
        for (&(s, b, t), v) in &spec.nu {
            let i = spec.nu_index(s, b, t);
            spec.dense_nu[i] = v.clone();
        }
        Ok(spec)
    }
}
