use super::WitnessError;
use crate::alphabet::{increment, Sym};

/// One length class for the run-free family: `T_n` in lexicographic order,
/// its palindromes, and the reversal-paired groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T6Class {
    pub n: usize,
    pub t: Vec<Vec<Sym>>,
    pub a: Vec<Vec<Sym>>,
    /// `x_{i,1} .. x_{i,t}` per group.
    pub x: Vec<Vec<Vec<Sym>>>,
    /// `y_{i,t} .. y_{i,1}` per group, i.e. in stream order.
    pub y: Vec<Vec<Vec<Sym>>>,
}

impl T6Class {
    /// Every group is nonempty, opens with a word starting with 0 and closes
    /// with a word ending in 0.
    pub fn well_formed(&self) -> bool {
        self.x.iter().all(|g| {
            !g.is_empty() && g[0][0] == 0 && *g.last().unwrap().last().unwrap() == 0
        })
    }
}

pub fn has_long_run(w: &[Sym], k: usize) -> bool {
    let mut run = 0;
    for &s in w {
        run = if s == 1 { run + 1 } else { 0 };
        if run >= k {
            return true;
        }
    }
    false
}

pub fn is_palindrome(w: &[Sym]) -> bool {
    w.iter().eq(w.iter().rev())
}

/// Enumerates `T_n` for runs of ones shorter than `k` and splits it into
/// `v` groups of reversal pairs.
pub fn t6_enumerate(n: usize, k: usize, v: usize, sigma: usize) -> Result<T6Class, WitnessError> {
    if k < 3 || v == 0 || sigma < 2 || n == 0 {
        return Err(WitnessError::ParamOutOfRange("t6 needs n >= 1, k >= 3, v >= 1, |alphabet| >= 2".into()));
    }
    if (sigma as f64).powi(n as i32) > 5e7 {
        return Err(WitnessError::ParamOutOfRange(format!("t6 class n={n} is too large to enumerate")));
    }
    let mut t = Vec::new();
    let mut w = vec![0; n];
    loop {
        if !has_long_run(&w, k) {
            t.push(w.clone());
        }
        if !increment(&mut w, sigma) {
            break;
        }
    }
    let a: Vec<Vec<Sym>> = t.iter().filter(|w| is_palindrome(w)).cloned().collect();
    let pairs: Vec<(Vec<Sym>, Vec<Sym>)> = t
        .iter()
        .filter(|w| !is_palindrome(w))
        .filter_map(|w| {
            let r: Vec<Sym> = w.iter().rev().copied().collect();
            (*w < r).then(|| (w.clone(), r))
        })
        .collect();
    let per = pairs.len() / v;
    let mut groups: Vec<Vec<(Vec<Sym>, Vec<Sym>)>> = vec![Vec::new(); v];
    for (i, p) in pairs.iter().take(per * v).enumerate() {
        groups[i % v].push(p.clone());
    }
    groups[v - 1].extend(pairs[per * v..].iter().cloned());
    for g in &mut groups {
        if let Some(i) = g.iter().position(|(x, _)| x[0] == 0) {
            let p = g.remove(i);
            g.insert(0, p);
        }
        if g.len() > 1 {
            if let Some(i) = (1..g.len()).rev().find(|&i| *g[i].0.last().unwrap() == 0) {
                let p = g.remove(i);
                g.push(p);
            }
        }
    }
    let x = groups.iter().map(|g| g.iter().map(|(x, _)| x.clone()).collect()).collect();
    let y = groups.iter().map(|g| g.iter().rev().map(|(_, y)| y.clone()).collect()).collect();
    Ok(T6Class { n, t, a, x, y })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_one_class() {
        let c = t6_enumerate(1, 3, 2, 2).unwrap();
        assert_eq!(c.t, vec![vec![0], vec![1]]);
        assert_eq!(c.a, c.t);
        assert!(c.x.iter().all(|g| g.is_empty()));
    }

    #[test]
    fn palindromes_of_length_four() {
        let c = t6_enumerate(4, 3, 2, 2).unwrap();
        let want: Vec<Vec<Sym>> =
            ["0000", "0110", "1001"].iter().map(|s| s.bytes().map(|b| (b - b'0') as Sym).collect()).collect();
        assert_eq!(c.a, want);
    }

    #[test]
    fn rejects_small_k() {
        assert!(t6_enumerate(4, 2, 2, 2).is_err());
    }
}
