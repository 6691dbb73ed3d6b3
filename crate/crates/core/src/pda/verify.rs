use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use super::{run, PdaError, Pushdown, Runner, TransducerSpec};
use crate::alphabet::Sym;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlVerdict {
    Ok { words: u64 },
    Collision { first: Vec<Sym>, second: Vec<Sym> },
}

impl IlVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, IlVerdict::Ok { .. })
    }
}

fn word_id(w: &[Sym], sigma: usize) -> u64 {
    w.iter().fold(0u64, |acc, &s| acc * sigma as u64 + s as u64) * 64 + w.len() as u64
}

fn word_of(id: u64, sigma: usize) -> Vec<Sym> {
    let len = (id % 64) as usize;
    let mut rank = id / 64;
    let mut w = vec![0; len];
    for i in (0..len).rev() {
        w[i] = (rank % sigma as u64) as Sym;
        rank /= sigma as u64;
    }
    w
}

fn il_key<P: Pushdown + ?Sized>(m: &P, w: &[Sym], endmarked: bool) -> Result<(Vec<Sym>, P::State), PdaError> {
    let r = run(m, w, endmarked)?;
    Ok((r.output, r.final_state))
}

/// Exhaustive injectivity of `w ↦ (C(w), δ_Q(w))` over all `|w| <= max_len`
/// (or `C(w$)` when `endmarked`). Errors carry the word that triggered them.
pub fn check_il<P: Pushdown + Sync + ?Sized>(
    machine: &P,
    max_len: usize,
    endmarked: bool,
) -> Result<IlVerdict, (Vec<Sym>, PdaError)> {
    let sigma = machine.input_size();
    assert!(max_len < 64 && (sigma as f64).powi(max_len as i32) < 1e17, "word space too large");
    let end = if endmarked { Some(machine.endmarker().ok_or((Vec::new(), PdaError::NoEndmarker))?) } else { None };
    let mut seen: HashMap<u64, Vec<u64>> = HashMap::new();
    let mut words = 0u64;
    let root = Runner::new(machine, false).map_err(|e| (Vec::new(), e))?;
    // Depth-first over the word tree, reusing the parent's configuration.
    let mut stack: Vec<(Runner<'_, P>, Vec<Sym>, Vec<Sym>)> = vec![(root, Vec::new(), Vec::new())];
    while let Some((runner, word, out)) = stack.pop() {
        let mut full = out.clone();
        if let Some(e) = end {
            let mut r2 = runner.clone();
            r2.feed(e, &mut full).map_err(|err| (word.clone(), err))?;
        }
        let key = (full, runner.config.state.clone());
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let slot = seen.entry(h.finish()).or_default();
        for &other in slot.iter() {
            let ow = word_of(other, sigma);
            let ok = il_key(machine, &ow, endmarked).map_err(|e| (ow.clone(), e))?;
            if ok == key {
                return Ok(IlVerdict::Collision { first: ow, second: word });
            }
        }
        slot.push(word_id(&word, sigma));
        words += 1;
        if word.len() < max_len {
            for s in (0..sigma as Sym).rev() {
                let mut r = runner.clone();
                let mut o = out.clone();
                let mut w = word.clone();
                w.push(s);
                r.feed(s, &mut o).map_err(|e| (w.clone(), e))?;
                stack.push((r, w, o));
            }
        }
    }
    Ok(IlVerdict::Ok { words })
}

/// Smallest `W` with `sigma^W >= states`.
pub fn trailer_width(states: usize, sigma: usize) -> usize {
    let mut w = 0;
    let mut cap = 1usize;
    while cap < states {
        cap = cap.saturating_mul(sigma);
        w += 1;
    }
    w
}

/// `index` written big-endian in base `sigma` over `trailer_width(states, sigma)` digits.
pub fn state_trailer(index: usize, states: usize, sigma: usize) -> Vec<Sym> {
    let w = trailer_width(states, sigma);
    let mut out = vec![0; w];
    let mut x = index;
    for i in (0..w).rev() {
        out[i] = (x % sigma) as Sym;
        x /= sigma;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InverseVerdict {
    Ok,
    Mismatch { expected: Vec<Sym>, got: Vec<Sym> },
}

/// Runs `c` on `input`, then `d` on `C(input)` followed by the trailer of C's
/// final state. Each machine gets an endmarker iff it declares one.
pub fn run_inverse_pair<C, D>(c: &C, d: &D, input: &[Sym]) -> Result<InverseVerdict, PdaError>
where
    C: Pushdown + ?Sized,
    D: Pushdown + ?Sized,
{
    let rc = run(c, input, c.has_endmarker())?;
    let count = c.state_count().ok_or(PdaError::Untabulated)?;
    let idx = c.state_index(&rc.final_state).ok_or(PdaError::Untabulated)?;
    let mut coded = rc.output;
    coded.extend(state_trailer(idx, count, c.input_size()));
    let rd = run(d, &coded, d.has_endmarker())?;
    if rd.output == input {
        Ok(InverseVerdict::Ok)
    } else {
        Ok(InverseVerdict::Mismatch { expected: input.to_vec(), got: rd.output })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    Call,
    Return,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VisiblyViolation {
    LambdaRule { state: String, top: Sym },
    StackEffect { state: String, input: Sym, top: Sym, class: SymbolClass },
    PartitionSize { expected: usize, got: usize },
}

/// Calls push exactly one symbol above the current top, returns pop the top
/// (leaving z0 in place on an empty stack), internals leave the stack alone.
/// The endmarker, when declared, is treated as an internal symbol.
pub fn check_visibly(spec: &TransducerSpec, partition: &[SymbolClass]) -> Vec<VisiblyViolation> {
    let mut out = Vec::new();
    let n = spec.input_symbols().len();
    if partition.len() != n {
        out.push(VisiblyViolation::PartitionSize { expected: n, got: partition.len() });
        return out;
    }
    let z0 = spec.bottom_sym();
    for (&(q, b, top), (_, push)) in spec.delta_entries() {
        let state = spec.states()[q as usize].clone();
        let Some(b) = b else {
            out.push(VisiblyViolation::LambdaRule { state, top });
            continue;
        };
        let class = partition.get(b as usize).copied().unwrap_or(SymbolClass::Internal);
        let ok = match class {
            SymbolClass::Call => push.len() == 2 && push[1] == top,
            SymbolClass::Internal => push.as_slice() == [top],
            SymbolClass::Return if top == z0 => push.as_slice() == [z0],
            SymbolClass::Return => push.is_empty(),
        };
        if !ok {
            out.push(VisiblyViolation::StackEffect { state, input: b, top, class });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pda::SpecBuilder;

    fn copy() -> TransducerSpec {
        let mut b = SpecBuilder::new("01", None, "#", '#', 0);
        for x in ['0', '1'] {
            b.delta("q0", Some(x), '#', "q0", "#");
            b.nu("q0", x, '#', &x.to_string());
        }
        b.build().unwrap()
    }

    #[test]
    fn identity_is_il() {
        assert_eq!(check_il(&copy(), 8, false).unwrap(), IlVerdict::Ok { words: 511 });
    }

    #[test]
    fn constant_output_collides() {
        let mut b = SpecBuilder::new("01", None, "#", '#', 0);
        b.delta("q0", Some('0'), '#', "q0", "#");
        b.delta("q0", Some('1'), '#', "q0", "#");
        let m = b.build().unwrap();
        assert_eq!(
            check_il(&m, 2, false).unwrap(),
            IlVerdict::Collision { first: vec![], second: vec![0] }
        );
    }

    #[test]
    fn identity_pair_inverts() {
        let m = copy();
        assert_eq!(trailer_width(1, 2), 0);
        assert_eq!(run_inverse_pair(&m, &m, &[0, 1, 0, 1]).unwrap(), InverseVerdict::Ok);
    }

    #[test]
    fn trailer_digits() {
        assert_eq!(trailer_width(5, 2), 3);
        assert_eq!(state_trailer(5, 8, 2), vec![1, 0, 1]);
        assert_eq!(state_trailer(7, 10, 3), vec![0, 2, 1]);
    }

    #[test]
    fn visibly_scan() {
        let m = copy();
        assert!(check_visibly(&m, &[SymbolClass::Internal; 2]).is_empty());
        let v = check_visibly(&m, &[SymbolClass::Call, SymbolClass::Internal]);
        assert_eq!(v.len(), 1);
        let mut b = SpecBuilder::new("01", None, "x#", '#', 1);
        b.delta("q0", Some('0'), '#', "q0", "x#");
        b.delta("q0", None, 'x', "q0", "");
        let v = check_visibly(&b.build().unwrap(), &[SymbolClass::Call, SymbolClass::Return]);
        assert!(matches!(v[0], VisiblyViolation::LambdaRule { .. }));
    }
}
