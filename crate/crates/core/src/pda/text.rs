//! Canonical line format for tabulated machines.
//!
//! ```text
//! bpdc
//! input 01
//! endmarker $
//! stack 01#
//! bottom #
//! initial q0
//! budget 2
//! states q0 q1
//! delta q0 0 # -> q1 0#
//! delta q1 ~ 0 -> q1 ~
//! nu q0 0 # -> 0
//! ```
//!
//! `~` stands for λ in the input column and for the empty string elsewhere.

use std::fmt::Write as _;

use thiserror::Error;

use super::table::{SpecBuilder, SpecError, TransducerSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header field {0}")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

fn word(s: &[char]) -> String {
    if s.is_empty() {
        "~".into()
    } else {
        s.iter().collect()
    }
}

pub fn print_spec(spec: &TransducerSpec) -> String {
    let input = spec.input_symbols();
    let stack = spec.stack_symbols();
    let inch = |b: u16| {
        if (b as usize) < input.len() {
            input[b as usize]
        } else {
            spec.endmarker_char().expect("endmarker slot")
        }
    };
    let mut s = String::new();
    s.push_str("bpdc\n");
    writeln!(s, "input {}", input.iter().collect::<String>()).unwrap();
    if let Some(e) = spec.endmarker_char() {
        writeln!(s, "endmarker {e}").unwrap();
    }
    writeln!(s, "stack {}", stack.iter().collect::<String>()).unwrap();
    writeln!(s, "bottom {}", stack[spec.bottom_sym() as usize]).unwrap();
    writeln!(s, "initial {}", spec.states()[spec.initial_state() as usize]).unwrap();
    writeln!(s, "budget {}", spec.lambda_budget()).unwrap();
    writeln!(s, "states {}", spec.states().join(" ")).unwrap();
    for (&(q, b, t), (n, push)) in spec.delta_entries() {
        let b = b.map_or('~', inch);
        let push: Vec<char> = push.iter().map(|&p| stack[p as usize]).collect();
        writeln!(
            s,
            "delta {} {} {} -> {} {}",
            spec.states()[q as usize],
            b,
            stack[t as usize],
            spec.states()[*n as usize],
            word(&push)
        )
        .unwrap();
    }
    for (&(q, b, t), out) in spec.nu_entries() {
        let out: Vec<char> = out.iter().map(|&o| input[o as usize]).collect();
        writeln!(s, "nu {} {} {} -> {}", spec.states()[q as usize], inch(b), stack[t as usize], word(&out)).unwrap();
    }
    s
}

fn single_char(tok: &str, line: usize) -> Result<char, TextError> {
    let mut it = tok.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(TextError::Syntax { line, msg: format!("expected one symbol, got {tok:?}") }),
    }
}

fn unword(tok: &str) -> &str {
    if tok == "~" {
        ""
    } else {
        tok
    }
}

pub fn parse_spec(text: &str) -> Result<TransducerSpec, TextError> {
    let mut input = None;
    let mut endmarker = None;
    let mut stack = None;
    let mut bottom = None;
    let mut initial = None;
    let mut budget = None;
    let mut builder: Option<SpecBuilder> = None;
    let mut seen_magic = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with("//") {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let err = |msg: &str| TextError::Syntax { line, msg: msg.to_string() };
        if !seen_magic {
            if toks != ["bpdc"] {
                return Err(err("expected `bpdc`"));
            }
            seen_magic = true;
            continue;
        }
        match toks[0] {
            "input" if toks.len() == 2 => input = Some(toks[1].to_string()),
            "endmarker" if toks.len() == 2 => endmarker = Some(single_char(toks[1], line)?),
            "stack" if toks.len() == 2 => stack = Some(toks[1].to_string()),
            "bottom" if toks.len() == 2 => bottom = Some(single_char(toks[1], line)?),
            "initial" if toks.len() == 2 => initial = Some(toks[1].to_string()),
            "budget" if toks.len() == 2 => {
                budget = Some(toks[1].parse::<usize>().map_err(|_| err("bad budget"))?);
            }
            "states" => {
                let mut b = SpecBuilder::new(
                    input.as_deref().ok_or(TextError::MissingHeader("input"))?,
                    endmarker,
                    stack.as_deref().ok_or(TextError::MissingHeader("stack"))?,
                    bottom.ok_or(TextError::MissingHeader("bottom"))?,
                    budget.ok_or(TextError::MissingHeader("budget"))?,
                );
                for s in &toks[1..] {
                    b.state(s);
                }
                b.initial(initial.as_deref().ok_or(TextError::MissingHeader("initial"))?);
                builder = Some(b);
            }
            "delta" if toks.len() == 7 && toks[4] == "->" => {
                let b = builder.as_mut().ok_or(TextError::MissingHeader("states"))?;
                let input = match toks[2] {
                    "~" => None,
                    t => Some(single_char(t, line)?),
                };
                b.delta(toks[1], input, single_char(toks[3], line)?, toks[5], unword(toks[6]));
            }
            "nu" if toks.len() == 6 && toks[4] == "->" => {
                let b = builder.as_mut().ok_or(TextError::MissingHeader("states"))?;
                b.nu(toks[1], single_char(toks[2], line)?, single_char(toks[3], line)?, unword(toks[5]));
            }
            _ => return Err(err("unrecognised line")),
        }
    }
    let b = builder.ok_or(TextError::MissingHeader("states"))?;
    Ok(b.build()?)
}
