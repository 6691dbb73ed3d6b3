//! Structure checkers that re-derive each layout from the symbols alone.
//!
//! Each returns the number of complete zones verified, or a description of
//! the first deviation.

use std::collections::HashSet;

use crate::alphabet::Sym;

type Verdict = Result<usize, String>;

fn ones(s: &[Sym]) -> bool {
    s.iter().all(|&x| x == 1)
}

/// Zone `n` is `n·l` symbols cut into blocks of length `n`, with at most `n²`
/// distinct blocks, where `n·l = Σ_j j·min(|Σ|^j, ⌊n^{2j/n+1}⌋)` rounded down to a multiple of `n`.
pub fn check_t1(s: &[Sym], sigma: usize) -> Verdict {
    let mut pos = 0;
    let mut n = 1usize;
    loop {
        let mut sum: f64 = 0.0;
        for j in 1..=n {
            let cap = (n as f64).powf(2.0 * j as f64 / n as f64 + 1.0).floor();
            sum += j as f64 * (sigma as f64).powi(j as i32).min(cap);
        }
        let len = ((sum / n as f64).floor() as usize) * n;
        if pos + len > s.len() {
            return Ok(n - 1);
        }
        let zone = &s[pos..pos + len];
        let distinct: HashSet<&[Sym]> = zone.chunks(n).collect();
        if distinct.len() > n * n {
            return Err(format!("t1 zone {n} uses {} distinct blocks", distinct.len()));
        }
        pos += len;
        n += 1;
    }
}

/// Whether `n^{5-eps} <= |S_n| <= n^5` for the computed zone length.
pub fn t1_window_holds(n: u64, zone_len: u64, eps: f64) -> bool {
    let nf = n as f64;
    let l = zone_len as f64;
    nf.powf(5.0 - eps) <= l && l <= nf.powi(5)
}

pub fn check_t2(s: &[Sym], c: u32) -> Verdict {
    let mut pos = 0;
    let mut n = 1usize;
    loop {
        let len = n * n.pow(c);
        if pos + len > s.len() {
            return Ok(n - 1);
        }
        let zone = &s[pos..pos + len];
        let block = &zone[..n];
        if zone.chunks(n).any(|b| b != block) {
            return Err(format!("t2 zone {n} is not a power of one block"));
        }
        pos += len;
        n += 1;
    }
}

pub fn check_t4(s: &[Sym], k: usize) -> Verdict {
    let mut pos = 0;
    let mut n = 1usize;
    loop {
        let mut t = 1;
        while t < n {
            t *= k;
        }
        let y = k * t;
        if pos + 2 * y + k > s.len() {
            return Ok(n - 1);
        }
        let zone = &s[pos..pos + 2 * y + k];
        let (block, rest) = zone.split_at(y);
        let (flag, back) = rest.split_at(k);
        if block.chunks(k).any(ones) {
            return Err(format!("t4 zone {n}: aligned block equals the flag"));
        }
        if !ones(flag) {
            return Err(format!("t4 zone {n}: flag is not 1^{k}"));
        }
        if !back.iter().eq(block.iter().rev()) {
            return Err(format!("t4 zone {n}: second half is not the reversal"));
        }
        pos += 2 * y + k;
        n += 1;
    }
}

pub fn check_t5(s: &[Sym], t: usize, base: usize) -> Verdict {
    let mut pos = 0;
    let mut n = 1usize;
    loop {
        let y = base * n;
        if pos + 2 * y > s.len() {
            return Ok(n - 1);
        }
        let (calls, rets) = s[pos..pos + 2 * y].split_at(y);
        if calls.iter().any(|&a| a as usize >= t) {
            return Err(format!("t5 zone {n}: call half uses a return symbol"));
        }
        if !rets.iter().eq(calls.iter().rev().map(|&a| a + t as Sym).collect::<Vec<_>>().iter()) {
            return Err(format!("t5 zone {n}: return half does not mirror the call half"));
        }
        pos += 2 * y;
        n += 1;
    }
}

fn run_free(w: &[Sym], k: usize) -> bool {
    let mut run = 0;
    for &x in w {
        run = if x == 1 { run + 1 } else { 0 };
        if run >= k {
            return false;
        }
    }
    true
}

/// Checks the warm-up prefix and then the zone layout: palindromes, flag of
/// `f(n)`, then `v` groups `X_i 1^{f(n)+i} Y_i` with `Y_i` the word-wise
/// reversal of `X_i`, together covering every run-free word exactly once.
pub fn check_t6(s: &[Sym], sigma: usize, k: usize, v: usize) -> Verdict {
    let mut pos = 0;
    for n in 1..k {
        let count = sigma.pow(n as u32);
        if pos + n * count > s.len() {
            return Ok(0);
        }
        let mut prev: Option<&[Sym]> = None;
        for w in s[pos..pos + n * count].chunks(n) {
            if prev.is_some_and(|p| p >= w) {
                return Err(format!("t6 warm-up class {n} is not in lexicographic order"));
            }
            prev = Some(w);
        }
        pos += n * count;
    }
    for len in k..2 * k {
        if pos + len > s.len() {
            return Ok(0);
        }
        if !ones(&s[pos..pos + len]) {
            return Err("t6 warm-up flags malformed".into());
        }
        pos += len;
    }
    let mut zones = 0;
    let mut f = 2 * k;
    for n in k.. {
        let mut universe: Vec<Vec<Sym>> = Vec::new();
        let mut w = vec![0 as Sym; n];
        loop {
            if run_free(&w, k) {
                universe.push(w.clone());
            }
            if !crate::alphabet::increment(&mut w, sigma) {
                break;
            }
        }
        let pal = universe.iter().filter(|w| w.iter().eq(w.iter().rev())).count();
        let zone_len = n * universe.len() + (0..=v).map(|i| f + i).sum::<usize>();
        if pos + zone_len > s.len() {
            return Ok(zones);
        }
        let zone = &s[pos..pos + zone_len];
        let mut at = 0;
        let mut seen: Vec<Vec<Sym>> = Vec::new();
        for _ in 0..pal {
            let w = &zone[at..at + n];
            if !w.iter().eq(w.iter().rev()) {
                return Err(format!("t6 zone {n}: A part holds a non-palindrome"));
            }
            seen.push(w.to_vec());
            at += n;
        }
        if !ones(&zone[at..at + f]) {
            return Err(format!("t6 zone {n}: first flag malformed"));
        }
        at += f;
        let rest = (universe.len() - pal) / 2;
        let mut xs_total = 0;
        for i in 1..=v {
            let flag = f + i;
            // The X group ends where the next flag of the right length begins.
            let mut xs: Vec<&[Sym]> = Vec::new();
            while !(at + flag <= zone.len() && ones(&zone[at..at + flag])) {
                if at + n > zone.len() {
                    return Err(format!("t6 zone {n}: group {i} runs past the zone"));
                }
                xs.push(&zone[at..at + n]);
                at += n;
            }
            at += flag;
            for x in xs.iter().rev() {
                let y = &zone[at..at + n];
                if !y.iter().eq(x.iter().rev()) {
                    return Err(format!("t6 zone {n}: Y_{i} is not the reversal of X_{i}"));
                }
                seen.push(x.to_vec());
                seen.push(y.to_vec());
                at += n;
            }
            xs_total += xs.len();
        }
        if xs_total != rest || at != zone_len {
            return Err(format!("t6 zone {n}: groups do not partition the class"));
        }
        seen.sort();
        if seen != universe {
            return Err(format!("t6 zone {n}: words do not match the run-free class"));
        }
        pos += zone_len;
        f += v + 1;
        zones += 1;
    }
    unreachable!()
}

pub fn check_t7(s: &[Sym], first_zone: usize) -> Verdict {
    let mut pos = 0;
    let mut n = first_zone;
    loop {
        let mut w = 0;
        while (1usize << w) < n {
            w += 1;
        }
        let w = 2 * w;
        let len = n * n * n + (1 << n) * (w + n);
        if pos + len > s.len() {
            return Ok(n - first_zone);
        }
        let zone = &s[pos..pos + len];
        let (fresh, pairs) = zone.split_at(n * n * n);
        for p in pairs.chunks(w + n) {
            let idx = p[..w].iter().fold(0usize, |a, &b| a * 2 + b as usize);
            if idx >= n * n {
                return Err(format!("t7 zone {n}: index {idx} out of range"));
            }
            if p[w..] != fresh[idx * n..(idx + 1) * n] {
                return Err(format!("t7 zone {n}: repeated block differs from block {idx}"));
            }
        }
        pos += len;
        n += 1;
    }
}
