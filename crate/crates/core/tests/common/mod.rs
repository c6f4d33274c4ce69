//! Test helpers shared by the integration suites. Nothing here calls the
//! library's own enumeration code, so the suites can use it as an oracle.

#![allow(dead_code)]

use finpop::rng::DrawSource;

/// A draw source that replays a script of choices. Driven by
/// [`for_each_path`], it walks every branch a sampler can take.
#[derive(Debug, Default)]
pub struct Script {
    digits: Vec<u64>,
    bounds: Vec<u64>,
    pos: usize,
}

impl DrawSource for Script {
    fn below(&mut self, bound: u64) -> u64 {
        assert!(bound >= 1);
        let d = if self.pos < self.digits.len() {
            assert_eq!(
                self.bounds[self.pos], bound,
                "sampler is not a function of its past draws"
            );
            self.digits[self.pos]
        } else {
            self.digits.push(0);
            self.bounds.push(bound);
            0
        };
        self.pos += 1;
        d
    }
}

/// Runs `f` once for every distinct sequence of choices it can request and
/// returns each result with its exact probability.
pub fn for_each_path<T>(mut f: impl FnMut(&mut Script) -> T) -> Vec<(T, f64)> {
    let mut script = Script::default();
    let mut out = Vec::new();
    loop {
        script.pos = 0;
        let value = f(&mut script);
        script.digits.truncate(script.pos);
        script.bounds.truncate(script.pos);
        let p = script.bounds.iter().fold(1.0, |acc, &b| acc / b as f64);
        out.push((value, p));
        let Some(i) = (0..script.digits.len())
            .rev()
            .find(|&i| script.digits[i] + 1 < script.bounds[i])
        else {
            break;
        };
        script.digits[i] += 1;
        script.digits.truncate(i + 1);
        script.bounds.truncate(i + 1);
    }
    out
}

/// All ordered sequences of `n` distinct elements of `0..units`.
pub fn permutations(units: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(units: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for u in 0..units {
            if !cur.contains(&u) {
                cur.push(u);
                go(units, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(units, n, &mut Vec::new(), &mut out);
    out
}

/// All sequences of length `n` over `0..units`, repetition allowed.
pub fn tuples(units: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..units).map(move |u| {
                    let mut t = t.clone();
                    t.push(u);
                    t
                })
            })
            .collect();
    }
    out
}

/// All `k`-subsets of `0..units`, increasing.
pub fn subsets(units: usize, k: usize) -> Vec<Vec<usize>> {
    permutations(units, k)
        .into_iter()
        .filter(|s| s.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

/// All vectors of `classes` non-negative integers summing to `n`.
pub fn compositions(n: u64, classes: usize) -> Vec<Vec<u64>> {
    if classes == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, classes - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Ordered splits of `n` into at least two positive parts.
pub fn group_splits(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for s in 1..=rest {
            cur.push(s);
            go(rest - s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// Mean and variance (divisor = number of outcomes) of equally likely values.
pub fn uniform_moments(values: &[f64]) -> (f64, f64) {
    weighted_moments(values.iter().map(|&v| (v, 1.0 / values.len() as f64)))
}

/// Mean and variance of a finite distribution given as `(value, probability)`.
pub fn weighted_moments(items: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let items: Vec<(f64, f64)> = items.into_iter().collect();
    let mean: f64 = items.iter().map(|(v, p)| v * p).sum();
    let var: f64 = items.iter().map(|(v, p)| p * (v - mean) * (v - mean)).sum();
    (mean, var)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Variance with divisor `N`.
pub fn sigma2(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Variance with divisor `N - 1`.
pub fn s2(v: &[f64]) -> f64 {
    sigma2(v) * v.len() as f64 / (v.len() as f64 - 1.0)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol.max(1e-9 * b.abs())
}

pub fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
