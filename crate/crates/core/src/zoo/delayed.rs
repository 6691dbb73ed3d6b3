use std::borrow::Cow;
use std::fmt::Debug;
use std::hash::Hash;

use crate::alphabet::Sym;
use crate::pda::{trailer_width, Pushdown};

/// The decoding part of an inverse machine, fed one compressor output
/// symbol at a time. The stack alphabet is `Σ ∪ {z0}` with `z0 = |Σ|`.
pub trait DecoderCore {
    type S: Clone + Eq + Hash + Debug;

    fn initial(&self) -> Self::S;
    fn budget(&self) -> usize;
    /// `(next, push, emitted)` on reading `x` with `top` on the stack.
    fn step(&self, q: &Self::S, x: Sym, top: Sym) -> Option<(Self::S, Vec<Sym>, Vec<Sym>)>;
    /// A λ-rule pops the top; `Some(next)` when one applies.
    fn lambda(&self, q: &Self::S, top: Sym) -> Option<Self::S>;
    /// Output still owed once the compressor's final state is known.
    fn finish(&self, q: &Self::S, c_state: usize) -> Vec<Sym>;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DelayedState<S> {
    pub core: S,
    /// The last `W` symbols read, not yet handed to the core.
    pub buf: Vec<Sym>,
    pub done: bool,
}

/// Wraps a core so it lags `W` symbols behind the input. At the endmarker
/// the lag buffer holds exactly the final-state trailer.
#[derive(Clone, Debug)]
pub struct Delayed<K> {
    pub core: K,
    sigma: usize,
    c_states: usize,
    width: usize,
}

impl<K: DecoderCore> Delayed<K> {
    pub fn new(core: K, sigma: usize, c_states: usize) -> Self {
        Delayed { core, sigma, c_states, width: trailer_width(c_states, sigma) }
    }

    pub fn trailer_width(&self) -> usize {
        self.width
    }

    fn decode_trailer(&self, buf: &[Sym]) -> Option<usize> {
        let idx = buf.iter().fold(0usize, |a, &d| a * self.sigma + d as usize);
        (buf.len() == self.width && idx < self.c_states).then_some(idx)
    }

    #[allow(clippy::type_complexity)]
    fn transition(&self, q: &DelayedState<K::S>, x: Sym, top: Sym) -> Option<(DelayedState<K::S>, Vec<Sym>, Vec<Sym>)> {
        if q.done {
            return None;
        }
        if x as usize == self.sigma {
            let idx = self.decode_trailer(&q.buf)?;
            let out = self.core.finish(&q.core, idx);
            return Some((DelayedState { core: q.core.clone(), buf: Vec::new(), done: true }, vec![top], out));
        }
        if q.buf.len() < self.width {
            let mut buf = q.buf.clone();
            buf.push(x);
            return Some((DelayedState { core: q.core.clone(), buf, done: false }, vec![top], Vec::new()));
        }
        let (first, rest) = match q.buf.split_first() {
            Some((&f, rest)) => (f, rest),
            None => (x, &[][..]),
        };
        let (core, push, out) = self.core.step(&q.core, first, top)?;
        let mut buf = rest.to_vec();
        if self.width > 0 {
            buf.push(x);
        }
        Some((DelayedState { core, buf, done: false }, push, out))
    }
}

impl<K: DecoderCore> Pushdown for Delayed<K> {
    type State = DelayedState<K::S>;

    fn input_size(&self) -> usize {
        self.sigma
    }

    fn has_endmarker(&self) -> bool {
        true
    }

    fn bottom(&self) -> Sym {
        self.sigma as Sym
    }

    fn initial(&self) -> Self::State {
        DelayedState { core: self.core.initial(), buf: Vec::new(), done: false }
    }

    fn budget(&self) -> usize {
        self.core.budget()
    }

    fn delta(&self, q: &Self::State, input: Option<Sym>, top: Sym) -> Option<(Self::State, Cow<'_, [Sym]>)> {
        match input {
            None => {
                if q.done || top as usize == self.sigma {
                    return None;
                }
                let core = self.core.lambda(&q.core, top)?;
                Some((DelayedState { core, buf: q.buf.clone(), done: false }, Cow::Borrowed(&[][..])))
            }
            Some(x) => self.transition(q, x, top).map(|(n, p, _)| (n, Cow::Owned(p))),
        }
    }

    fn nu(&self, q: &Self::State, input: Sym, top: Sym) -> Cow<'_, [Sym]> {
        Cow::Owned(self.transition(q, input, top).map(|(_, _, o)| o).unwrap_or_default())
    }
}
