//! Compressor for the run-free sequence and its inverse.
//!
//! After an echo-only warm-up, `C` cruises through the palindrome zone until
//! a run of `L = 2k-1` ones, which no concatenation of run-free words can
//! contain. It then pushes `X_j` up to the next long run, pops the run's
//! prefix, and in `Y_j` pops one stack symbol per input symbol, writing a
//! `0` every `v′` matches. The first symbol of each nonempty `Y_j` also
//! writes a `0` so the inverse can tell where the flag ends. A mismatch after
//! `c` matches in the current period writes `1^{c+1} 0 x` and echoes from
//! then on.

use super::{builder_for, check_sigma, ones, out_of_range, DecoderCore, Delayed, ZooError, ZooParams};
use crate::alphabet::Sym;
use crate::pda::TransducerSpec;
use crate::witness::t6_early_prefix;

/// Echo-only prefix length matching the witness warm-up: the short classes,
/// the extra flags and every zone before the first well-formed one.
pub fn t6_default_warmup(sigma: usize, k: usize, v: usize) -> Result<u64, ZooError> {
    let mut n_max = k + 12;
    while n_max > k && (sigma as f64).powi(n_max as i32) > (1u64 << 20) as f64 {
        n_max -= 1;
    }
    t6_early_prefix(sigma, k, v, n_max).map(|(len, _)| len).map_err(|e| out_of_range(e.to_string()))
}

pub fn build_theorem6_pair(p: &ZooParams) -> Result<(TransducerSpec, Delayed<T6Decoder>), ZooError> {
    let alphabet = check_sigma(p.sigma)?;
    let (k, v, vp) = (p.k, p.v, p.v_prime);
    if k < 3 || v == 0 || vp == 0 {
        return Err(out_of_range("need k >= 3, v >= 1 and v' >= 1"));
    }
    let w = if p.skip_counting_prefix {
        0
    } else {
        match p.counting_prefix {
            Some(w) => w,
            None => t6_default_warmup(p.sigma, k, v)?,
        }
    };
    if w > 1 << 20 {
        return Err(out_of_range("warm-up prefix too long to tabulate"));
    }
    let w = w as usize;
    let sigma = p.sigma;
    let z0 = sigma as Sym;
    let l = 2 * k - 1;
    let mut m = builder_for(&alphabet, None, l - 1);
    let early: Vec<u32> = (0..w).map(|i| m.state(&format!("w{i}"))).collect();
    let a: Vec<u32> = (0..l).map(|r| m.state(&format!("a{r}"))).collect();
    let fa = m.state("fa");
    let xs: Vec<Vec<u32>> = (1..=v).map(|j| (0..l).map(|r| m.state(&format!("x{j}_{r}"))).collect()).collect();
    let pops: Vec<Vec<u32>> = (1..=v).map(|j| (1..l).map(|i| m.state(&format!("p{j}_{i}"))).collect()).collect();
    let fy: Vec<u32> = (1..=v).map(|j| m.state(&format!("fy{j}"))).collect();
    let ys: Vec<Vec<u32>> = (1..=v).map(|j| (0..vp).map(|c| m.state(&format!("y{j}_{c}"))).collect()).collect();
    let e = m.state("e");
    // Leaving Y_j on the empty stack: X_{j+1} starts, or the next zone's palindromes.
    let next_zone = |j: usize, x: Sym| -> (u32, Vec<Sym>) {
        let r = (x == 1) as usize;
        if j < v {
            (xs[j][r], vec![x, z0])
        } else {
            (a[r], vec![z0])
        }
    };
    // Y_j reading x on `y` after `c` matches.
    let y_step = |j: usize, c: usize, x: Sym, y: Sym| -> (u32, Vec<Sym>, Vec<Sym>) {
        if x == y {
            if c + 1 == vp {
                (ys[j - 1][0], Vec::new(), vec![0])
            } else {
                (ys[j - 1][c + 1], Vec::new(), Vec::new())
            }
        } else {
            let mut out = ones(c + 1);
            out.push(0);
            out.push(x);
            (e, vec![y], out)
        }
    };
    for y in 0..=z0 {
        for x in 0..sigma as Sym {
            let one = x == 1;
            for i in 0..w {
                let next = if i + 1 == w { a[0] } else { early[i + 1] };
                m.delta_id(early[i], Some(x), y, next, vec![y]);
                m.nu_id(early[i], x, y, vec![x]);
            }
            for r in 0..l {
                let next = match (one, r + 1 == l) {
                    (true, true) => fa,
                    (true, false) => a[r + 1],
                    (false, _) => a[0],
                };
                m.delta_id(a[r], Some(x), y, next, vec![y]);
                m.nu_id(a[r], x, y, vec![x]);
            }
            if one {
                m.delta_id(fa, Some(x), y, fa, vec![y]);
            } else {
                m.delta_id(fa, Some(x), y, xs[0][0], vec![x, y]);
            }
            m.nu_id(fa, x, y, vec![x]);
            for j in 1..=v {
                for r in 0..l {
                    let (next, push) = match (one, r + 1 == l) {
                        (true, true) => (pops[j - 1][0], vec![y]),
                        (true, false) => (xs[j - 1][r + 1], vec![x, y]),
                        (false, _) => (xs[j - 1][0], vec![x, y]),
                    };
                    m.delta_id(xs[j - 1][r], Some(x), y, next, push);
                    m.nu_id(xs[j - 1][r], x, y, vec![x]);
                }
                let (next, push, out) = if one {
                    (fy[j - 1], vec![y], vec![x])
                } else if y == z0 {
                    let (n, p) = next_zone(j, x);
                    (n, p, vec![x])
                } else {
                    let (n, p, o) = y_step(j, 0, x, y);
                    let mut out = vec![0];
                    out.extend(o);
                    (n, p, out)
                };
                m.delta_id(fy[j - 1], Some(x), y, next, push);
                m.nu_id(fy[j - 1], x, y, out);
                for c in 0..vp {
                    let (next, push, out) = if y == z0 {
                        let (n, p) = next_zone(j, x);
                        let mut out = if c > 0 { vec![0] } else { Vec::new() };
                        out.push(x);
                        (n, p, out)
                    } else {
                        y_step(j, c, x, y)
                    };
                    m.delta_id(ys[j - 1][c], Some(x), y, next, push);
                    m.nu_id(ys[j - 1][c], x, y, out);
                }
            }
            m.delta_id(e, Some(x), y, e, vec![y]);
            m.nu_id(e, x, y, vec![x]);
        }
        if y != z0 {
            for j in 1..=v {
                for i in 1..l {
                    let next = if i + 1 < l { pops[j - 1][i] } else { fy[j - 1] };
                    m.delta_id(pops[j - 1][i - 1], None, y, next, Vec::new());
                }
            }
        }
    }
    let spec = m.build().expect("t6 compressor is well formed");
    let mut pending = vec![0; spec.states().len()];
    for row in &ys {
        for (c, &q) in row.iter().enumerate() {
            pending[q as usize] = c;
        }
    }
    let core = T6Decoder { sigma, v, v_prime: vp, run: l, warmup: w, pending };
    let d = Delayed::new(core, sigma, spec.states().len());
    Ok((spec, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum T6State {
    Early(usize),
    A(usize),
    FlagA,
    X { j: usize, r: usize },
    Pop { j: usize, i: usize },
    FlagY(usize),
    /// Popped stretch of `X_j`, in `Y_j` order.
    Decomp { j: usize, u: Vec<Sym> },
    ErrFlag { u: Vec<Sym>, m: usize },
    Echo,
}

/// Decoder core for [`build_theorem6_pair`].
#[derive(Clone, Debug)]
pub struct T6Decoder {
    sigma: usize,
    v: usize,
    v_prime: usize,
    run: usize,
    warmup: usize,
    pending: Vec<usize>,
}

impl T6Decoder {
    fn next_zone(&self, j: usize, x: Sym, top: Sym) -> (T6State, Vec<Sym>, Vec<Sym>) {
        let r = (x == 1) as usize;
        if j < self.v {
            (T6State::X { j: j + 1, r }, vec![x, top], vec![x])
        } else {
            (T6State::A(r), vec![top], vec![x])
        }
    }
}

impl DecoderCore for T6Decoder {
    type S = T6State;

    fn initial(&self) -> T6State {
        if self.warmup > 0 {
            T6State::Early(0)
        } else {
            T6State::A(0)
        }
    }

    fn budget(&self) -> usize {
        (self.run - 1).max(self.v_prime)
    }

    fn step(&self, q: &T6State, x: Sym, top: Sym) -> Option<(T6State, Vec<Sym>, Vec<Sym>)> {
        use T6State::*;
        let z0 = self.sigma as Sym;
        let one = x == 1;
        Some(match q {
            Early(i) => {
                let next = if i + 1 == self.warmup { A(0) } else { Early(i + 1) };
                (next, vec![top], vec![x])
            }
            &A(r) => {
                let next = match (one, r + 1 == self.run) {
                    (true, true) => FlagA,
                    (true, false) => A(r + 1),
                    (false, _) => A(0),
                };
                (next, vec![top], vec![x])
            }
            FlagA if one => (FlagA, vec![top], vec![x]),
            FlagA => (X { j: 1, r: 0 }, vec![x, top], vec![x]),
            &X { j, r } => match (one, r + 1 == self.run) {
                (true, true) => (Pop { j, i: 1 }, vec![top], vec![x]),
                (true, false) => (X { j, r: r + 1 }, vec![x, top], vec![x]),
                (false, _) => (X { j, r: 0 }, vec![x, top], vec![x]),
            },
            Pop { .. } => return None,
            &FlagY(j) if one => (FlagY(j), vec![top], vec![x]),
            &FlagY(j) if top == z0 => self.next_zone(j, x, top),
            &FlagY(j) if x == 0 => (Decomp { j, u: Vec::new() }, vec![top], Vec::new()),
            FlagY(_) => return None,
            Decomp { j, u } if u.is_empty() => self.next_zone(*j, x, top),
            Decomp { j, u } => match x {
                0 => (Decomp { j: *j, u: Vec::new() }, vec![top], u.clone()),
                1 => (ErrFlag { u: u.clone(), m: 0 }, vec![top], Vec::new()),
                _ => return None,
            },
            ErrFlag { u, m } => match x {
                1 => (ErrFlag { u: u.clone(), m: m + 1 }, vec![top], vec![*u.get(*m)?]),
                0 => (Echo, vec![top], Vec::new()),
                _ => return None,
            },
            Echo => (Echo, vec![top], vec![x]),
        })
    }

    fn lambda(&self, q: &T6State, top: Sym) -> Option<T6State> {
        match q {
            &T6State::Pop { j, i } if i + 1 < self.run => Some(T6State::Pop { j, i: i + 1 }),
            &T6State::Pop { j, .. } => Some(T6State::FlagY(j)),
            T6State::Decomp { j, u } if u.len() < self.v_prime => {
                let mut u = u.clone();
                u.push(top);
                Some(T6State::Decomp { j: *j, u })
            }
            _ => None,
        }
    }

    fn finish(&self, q: &T6State, c_state: usize) -> Vec<Sym> {
        match q {
            T6State::Decomp { u, .. } => u[..self.pending[c_state].min(u.len())].to_vec(),
            _ => Vec::new(),
        }
    }
}
