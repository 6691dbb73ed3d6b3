//! Visibly pushdown compressor for call zones followed by mirrored return zones.
//!
//! Symbols `0..t` are calls and are echoed and pushed. Symbols `t..2t` are
//! returns: each pops and is checked against `top + t`, and every `v′`
//! matches produce one `g = t`. A mismatch, or a return on the empty stack,
//! writes `e g^c e` (with `e = t + 1` and `c` the matches since the last `g`),
//! then the offending symbol, and the machine echoes from then on. A call that
//! interrupts a return zone mid-period writes the same `e g^c e` before itself.

use super::{builder_for, check_sigma, out_of_range, ZooError, ZooParams};
use crate::alphabet::Sym;
use crate::pda::{SymbolClass, TransducerSpec};

fn flag(t: usize, c: usize) -> Vec<Sym> {
    let (g, e) = (t as Sym, t as Sym + 1);
    let mut out = vec![e];
    out.extend(std::iter::repeat(g).take(c));
    out.push(e);
    out
}

pub fn build_theorem5_visibly(p: &ZooParams) -> Result<TransducerSpec, ZooError> {
    let t = p.t;
    if t < 2 {
        return Err(out_of_range("the visibly machine needs t >= 2"));
    }
    if p.v_prime == 0 {
        return Err(out_of_range("v' must be at least 1"));
    }
    let alphabet = check_sigma(2 * t)?;
    let vp = p.v_prime;
    let z0 = (2 * t) as Sym;
    let mut m = builder_for(&alphabet, None, 0);
    let r: Vec<u32> = (0..vp).map(|c| m.state(&format!("r{c}"))).collect();
    let e = m.state("e");
    for y in 0..=z0 {
        let pop = if y == z0 { vec![z0] } else { Vec::new() };
        for x in 0..(2 * t) as Sym {
            let call = (x as usize) < t;
            if call {
                for c in 0..vp {
                    let mut out = if c > 0 { flag(t, c) } else { Vec::new() };
                    out.push(x);
                    m.delta_id(r[c], Some(x), y, r[0], vec![x, y]);
                    m.nu_id(r[c], x, y, out);
                }
                m.delta_id(e, Some(x), y, e, vec![x, y]);
            } else {
                for c in 0..vp {
                    if y != z0 && x - t as Sym == y {
                        let (next, out) = if c + 1 == vp { (r[0], vec![t as Sym]) } else { (r[c + 1], Vec::new()) };
                        m.delta_id(r[c], Some(x), y, next, Vec::new());
                        m.nu_id(r[c], x, y, out);
                    } else {
                        let mut out = flag(t, c);
                        out.push(x);
                        m.delta_id(r[c], Some(x), y, e, pop.clone());
                        m.nu_id(r[c], x, y, out);
                    }
                }
                m.delta_id(e, Some(x), y, e, pop.clone());
            }
            m.nu_id(e, x, y, vec![x]);
        }
    }
    Ok(m.build().expect("visibly compressor is well formed"))
}

/// First `t` symbols are calls, the last `t` returns.
pub fn theorem5_partition(t: usize) -> Vec<SymbolClass> {
    (0..2 * t).map(|i| if i < t { SymbolClass::Call } else { SymbolClass::Return }).collect()
}
