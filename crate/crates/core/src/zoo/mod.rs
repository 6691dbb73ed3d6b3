//! The explicitly constructed compressors, compiled to engine machines.
//!
//! Compressors are tabulated [`TransducerSpec`]s. Their inverses carry
//! buffered strings in the state and are procedural; [`tabulate`] turns any
//! procedural machine with a small reachable state set into a table.

mod delayed;
pub mod t4;
pub mod t5;
pub mod t6;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, Sym};
use crate::pda::{Pushdown, SpecBuilder, TransducerSpec};

pub use delayed::{DecoderCore, Delayed, DelayedState};
pub use t4::{build_theorem4_pair, T4Decoder, T4State};
pub use t5::{build_theorem5_visibly, theorem5_partition};
pub use t6::{build_theorem6_pair, t6_default_warmup, T6Decoder, T6State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZooError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

/// Construction parameters. Unused fields are ignored by each builder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZooParams {
    pub sigma: usize,
    /// Flag length.
    pub k: usize,
    /// Compression period `A`; it must divide a power of `k`.
    pub period: usize,
    /// Number of X/Y groups per zone.
    pub v: usize,
    /// Y-zone (and visibly return-zone) output period `v′`.
    pub v_prime: usize,
    /// Half alphabet size for the visibly machine.
    pub t: usize,
    pub skip_counting_prefix: bool,
    /// Length of the initial echo-only stretch; `None` picks the family default.
    pub counting_prefix: Option<u64>,
}

impl Default for ZooParams {
    fn default() -> Self {
        ZooParams {
            sigma: 2,
            k: 8,
            period: 32,
            v: 8,
            v_prime: 8,
            t: 2,
            skip_counting_prefix: false,
            counting_prefix: None,
        }
    }
}

fn out_of_range(msg: impl Into<String>) -> ZooError {
    ZooError::ParamOutOfRange(msg.into())
}

pub(crate) fn check_sigma(sigma: usize) -> Result<Alphabet, ZooError> {
    if !(2..=62).contains(&sigma) {
        return Err(out_of_range("alphabet size must be in 2..=62"));
    }
    Alphabet::with_size(sigma).map_err(|e| out_of_range(e.to_string()))
}

/// Input characters of `alphabet` and the stack alphabet `Σ ∪ {#}`, with `#` as z0.
pub(crate) fn builder_for(alphabet: &Alphabet, endmarker: Option<char>, budget: usize) -> SpecBuilder {
    let input: String = alphabet.symbols().iter().collect();
    let stack = format!("{input}#");
    SpecBuilder::new(&input, endmarker, &stack, '#', budget)
}

pub(crate) fn ones(n: usize) -> Vec<Sym> {
    vec![1; n]
}

/// Explores the reachable states of `m` breadth first and writes every
/// defined transition into a table. Input symbols map to `alphabet`, stack
/// symbols to `Σ ∪ {#}`. Returns `None` past `max_states`.
pub fn tabulate<P: Pushdown>(m: &P, alphabet: &Alphabet, endmarker: Option<char>, max_states: usize) -> Option<TransducerSpec> {
    let sigma = alphabet.len();
    assert_eq!(m.input_size(), sigma);
    assert_eq!(m.bottom() as usize, sigma);
    let mut b = builder_for(alphabet, endmarker.filter(|_| m.has_endmarker()), m.budget());
    let mut ids: HashMap<P::State, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    fn id_of<S: Clone + Eq + std::hash::Hash>(
        q: &S,
        ids: &mut HashMap<S, u32>,
        b: &mut SpecBuilder,
        queue: &mut VecDeque<S>,
        max_states: usize,
    ) -> Option<u32> {
        if let Some(&i) = ids.get(q) {
            return Some(i);
        }
        if ids.len() == max_states {
            return None;
        }
        let i = b.state(&format!("s{}", ids.len()));
        ids.insert(q.clone(), i);
        queue.push_back(q.clone());
        Some(i)
    }
    id_of(&m.initial(), &mut ids, &mut b, &mut queue, max_states)?;
    let inputs = sigma + m.has_endmarker() as usize;
    while let Some(q) = queue.pop_front() {
        let qi = ids[&q];
        for top in 0..=sigma as Sym {
            if let Some((next, push)) = m.delta(&q, None, top) {
                let n = id_of(&next, &mut ids, &mut b, &mut queue, max_states)?;
                b.delta_id(qi, None, top, n, push.into_owned());
                continue;
            }
            for x in 0..inputs as Sym {
                if let Some((next, push)) = m.delta(&q, Some(x), top) {
                    let n = id_of(&next, &mut ids, &mut b, &mut queue, max_states)?;
                    b.delta_id(qi, Some(x), top, n, push.into_owned());
                    b.nu_id(qi, x, top, m.nu(&q, x, top).into_owned());
                }
            }
        }
    }
    Some(b.build().expect("tabulated machine is well formed"))
}
