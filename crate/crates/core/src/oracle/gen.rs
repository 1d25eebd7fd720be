use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bang;
use crate::syntax::{Calculus, Term};

const FREE: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
const BOUND: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    Exhaustive,
    Random(u64),
}

/// Term enumeration. Binders are named by depth, so each α-class of terms
/// appears exactly once.
#[derive(Clone, Debug)]
pub struct TermGen {
    pub calculus: Calculus,
    pub max_size: usize,
    /// Number of free variable names available (`x`, `y`, ...).
    pub free_vars: usize,
    pub closed: bool,
    pub mode: GenMode,
}

impl TermGen {
    pub fn exhaustive(calculus: Calculus, max_size: usize, free_vars: usize) -> TermGen {
        assert!(free_vars <= FREE.len(), "at most {} free names", FREE.len());
        assert!(max_size <= BOUND.len(), "at most size {}", BOUND.len());
        TermGen {
            calculus,
            max_size,
            free_vars,
            closed: false,
            mode: GenMode::Exhaustive,
        }
    }

    pub fn random(calculus: Calculus, max_size: usize, free_vars: usize, seed: u64) -> TermGen {
        TermGen {
            mode: GenMode::Random(seed),
            ..TermGen::exhaustive(calculus, max_size, free_vars)
        }
    }

    pub fn closed(self) -> TermGen {
        TermGen {
            closed: true,
            free_vars: 0,
            ..self
        }
    }

    fn vars(&self, depth: usize) -> impl Iterator<Item = &'static str> + '_ {
        let free = if self.closed { 0 } else { self.free_vars };
        FREE[..free].iter().chain(&BOUND[..depth]).copied()
    }

    fn var_count(&self, depth: usize) -> usize {
        (if self.closed { 0 } else { self.free_vars }) + depth
    }

    fn bang(&self) -> bool {
        self.calculus == Calculus::Bang
    }

    /// Every term up to `max_size` in the calculus (affine ones only for
    /// bang), ordered by size and then by construction.
    pub fn terms(&self) -> Vec<Term> {
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for s in 1..=self.max_size {
            let level = self.level(s, 0, &mut memo);
            out.extend(
                level
                    .iter()
                    .filter(|t| !self.bang() || bang::is_affine(t))
                    .cloned(),
            );
        }
        out
    }

    fn level(
        &self,
        size: usize,
        depth: usize,
        memo: &mut HashMap<(usize, usize), Vec<Term>>,
    ) -> Vec<Term> {
        if let Some(v) = memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend(self.vars(depth).map(Term::var));
        } else {
            for body in self.level(size - 1, depth + 1, memo) {
                out.push(Term::lam(BOUND[depth], body));
            }
            if self.bang() {
                for body in self.level(size - 1, depth + 1, memo) {
                    out.push(Term::bang_lam(BOUND[depth], body));
                }
                for body in self.level(size - 1, depth, memo) {
                    out.push(Term::bang(body));
                }
            }
            for k in 1..size - 1 {
                let ls = self.level(k, depth, memo);
                let rs = self.level(size - 1 - k, depth, memo);
                for l in &ls {
                    for r in &rs {
                        out.push(Term::app(l.clone(), r.clone()));
                    }
                }
            }
            for k in 1..size - 1 {
                let ls = self.level(k, depth, memo);
                let rs = self.level(size - 1 - k, depth, memo);
                for l in &ls {
                    for r in &rs {
                        out.push(Term::choice(l.clone(), r.clone()));
                    }
                }
            }
        }
        memo.insert((size, depth), out.clone());
        out
    }

    /// Number of raw terms of exactly `size` (before any affine filter).
    pub fn count(&self, size: usize) -> u128 {
        self.count_at(size, 0, &mut HashMap::new())
    }

    fn count_at(
        &self,
        size: usize,
        depth: usize,
        memo: &mut HashMap<(usize, usize), u128>,
    ) -> u128 {
        if size == 0 {
            return 0;
        }
        if let Some(&c) = memo.get(&(size, depth)) {
            return c;
        }
        let c = if size == 1 {
            self.var_count(depth) as u128
        } else {
            let lam = self.count_at(size - 1, depth + 1, memo);
            let mut c = lam;
            if self.bang() {
                c += lam + self.count_at(size - 1, depth, memo);
            }
            let mut pairs = 0;
            for k in 1..size - 1 {
                pairs += self.count_at(k, depth, memo) * self.count_at(size - 1 - k, depth, memo);
            }
            c + 2 * pairs
        };
        memo.insert((size, depth), c);
        c
    }

    /// `n` terms drawn uniformly from all raw terms of size at most
    /// `max_size`; bang draws are rejected until affine. Deterministic in
    /// the seed.
    pub fn sample(&self, n: usize) -> Vec<Term> {
        let seed = match self.mode {
            GenMode::Random(s) => s,
            GenMode::Exhaustive => 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut memo = HashMap::new();
        let weights: Vec<u128> = (1..=self.max_size)
            .map(|s| self.count_at(s, 0, &mut memo))
            .collect();
        let total: u128 = weights.iter().sum();
        assert!(total > 0, "no terms to sample");
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let mut i = rng.gen_range(0..total);
            let mut size = 1;
            for (k, w) in weights.iter().enumerate() {
                if i < *w {
                    size = k + 1;
                    break;
                }
                i -= w;
            }
            let t = self.unrank(size, 0, i, &mut memo);
            if !self.bang() || bang::is_affine(&t) {
                out.push(t);
            }
        }
        out
    }

    fn unrank(
        &self,
        size: usize,
        depth: usize,
        mut i: u128,
        memo: &mut HashMap<(usize, usize), u128>,
    ) -> Term {
        if size == 1 {
            return Term::var(self.vars(depth).nth(i as usize).expect("index in range"));
        }
        let lam = self.count_at(size - 1, depth + 1, memo);
        if i < lam {
            return Term::lam(BOUND[depth], self.unrank(size - 1, depth + 1, i, memo));
        }
        i -= lam;
        if self.bang() {
            if i < lam {
                return Term::bang_lam(BOUND[depth], self.unrank(size - 1, depth + 1, i, memo));
            }
            i -= lam;
            let b = self.count_at(size - 1, depth, memo);
            if i < b {
                return Term::bang(self.unrank(size - 1, depth, i, memo));
            }
            i -= b;
        }
        for choice in [false, true] {
            for k in 1..size - 1 {
                let cl = self.count_at(k, depth, memo);
                let cr = self.count_at(size - 1 - k, depth, memo);
                if i < cl * cr {
                    let l = self.unrank(k, depth, i / cr, memo);
                    let r = self.unrank(size - 1 - k, depth, i % cr, memo);
                    return if choice {
                        Term::choice(l, r)
                    } else {
                        Term::app(l, r)
                    };
                }
                i -= cl * cr;
            }
        }
        unreachable!("rank out of range")
    }

    /// Exhaustive or random terms according to the mode; random mode draws
    /// `n` terms.
    pub fn generate(&self, n: usize) -> Vec<Term> {
        match self.mode {
            GenMode::Exhaustive => self.terms(),
            GenMode::Random(_) => self.sample(n),
        }
    }
}
