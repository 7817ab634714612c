//! Brute-force oracles over raw generator lists. Nothing here calls the
//! library's ideal arithmetic; ideals are plain `Vec<Vec<u32>>`.
#![allow(dead_code)]

use std::collections::BTreeSet;

use powerfilt::{Monomial, MonomialIdeal, RingContext};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Gens = Vec<Vec<u32>>;

pub fn member(gens: &Gens, u: &[u32]) -> bool {
    gens.iter().any(|g| g.iter().zip(u).all(|(a, b)| a <= b))
}

pub fn max_exp(gens: &Gens, d: usize) -> u32 {
    gens.iter().flat_map(|g| g.iter().copied()).max().unwrap_or(0).max(if d == 0 { 0 } else { 1 })
}

pub fn each_in_cube(d: usize, bound: u32, mut f: impl FnMut(&[u32])) {
    let mut u = vec![0u32; d];
    loop {
        f(&u);
        let mut i = 0;
        while i < d {
            if u[i] < bound {
                u[i] += 1;
                break;
            }
            u[i] = 0;
            i += 1;
        }
        if i == d {
            return;
        }
    }
}

pub fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[u32], k: u32) -> Vec<u32> {
    a.iter().map(|x| x * k).collect()
}

/// Generators of `A^k` by summing every multiset of `k` generators.
pub fn power_gens(gens: &Gens, d: usize, k: u32) -> Gens {
    let mut out: Gens = vec![vec![0; d]];
    for _ in 0..k {
        out =
            out.iter().flat_map(|p| gens.iter().map(move |g| add(p, g))).collect::<BTreeSet<_>>().into_iter().collect();
    }
    out
}

pub fn to_ideal(d: usize, gens: &Gens) -> MonomialIdeal {
    MonomialIdeal::new(d, gens.iter().map(|g| Monomial::from_slice(g)))
}

/// Checks `ideal` against `pred` on every point of `[0, bound]^d`. The bound
/// must dominate the ideal's generators for this to decide equality.
pub fn agrees(ideal: &MonomialIdeal, d: usize, bound: u32, pred: impl Fn(&[u32]) -> bool) -> bool {
    let inside = ideal.generators().iter().all(|g| g.exponents().iter().all(|&e| e <= bound));
    let mut ok = inside;
    each_in_cube(d, bound, |u| {
        if ok && ideal.contains(&Monomial::from_slice(u)) != pred(u) {
            ok = false;
        }
    });
    ok
}

/// `(J : u)` if it is a monomial prime, read off by probing the box.
pub fn prime_colon(gens: &Gens, d: usize, u: &[u32], bound: u32) -> Option<BTreeSet<usize>> {
    if member(gens, u) {
        return None;
    }
    let support: BTreeSet<usize> = (0..d)
        .filter(|&i| {
            let mut v = u.to_vec();
            v[i] += 1;
            member(gens, &v)
        })
        .collect();
    let mut ok = true;
    each_in_cube(d, bound, |v| {
        let inside = member(gens, &add(u, v));
        let predicted = support.iter().any(|&i| v[i] > 0);
        if inside != predicted {
            ok = false;
        }
    });
    ok.then_some(support)
}

/// `Ass(R/J)` by scanning witnesses in the exponent box.
pub fn ass_oracle(gens: &Gens, d: usize) -> BTreeSet<BTreeSet<usize>> {
    let bound = max_exp(gens, d);
    let mut out = BTreeSet::new();
    each_in_cube(d, bound, |u| {
        if let Some(p) = prime_colon(gens, d, u, bound) {
            out.insert(p);
        }
    });
    out
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub d: usize,
    pub a: Gens,
    pub b: Gens,
}

/// Seeded corpus: `d <= 3`, at most five generators, exponents at most four.
pub fn corpus(seed: u64, count: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen_list = |rng: &mut ChaCha8Rng, d: usize| -> Gens {
        let k = rng.random_range(1..=5);
        (0..k).map(|_| (0..d).map(|_| rng.random_range(0..=4)).collect()).collect()
    };
    (0..count)
        .map(|_| {
            let d = rng.random_range(1..=3);
            let a = gen_list(&mut rng, d);
            let b = gen_list(&mut rng, d);
            Sample { d, a, b }
        })
        .collect()
}

pub fn ring(d: usize) -> RingContext {
    RingContext::new(["x", "y", "z"].iter().take(d).copied()).unwrap()
}

pub struct SuiteIdeal {
    pub name: &'static str,
    pub vars: &'static str,
    pub gens: &'static str,
}

impl SuiteIdeal {
    pub fn parse(&self) -> (RingContext, MonomialIdeal) {
        powerfilt::parse_document(&format!("vars: {} ; ideal: {}", self.vars, self.gens)).unwrap()
    }
}

/// The curated suite, fixed before running the acceptance checks.
pub const SUITE: &[SuiteIdeal] = &[
    SuiteIdeal { name: "(x)", vars: "x,y", gens: "x" },
    SuiteIdeal { name: "(x,y)", vars: "x,y", gens: "x, y" },
    SuiteIdeal { name: "(x^2,xy)", vars: "x,y", gens: "x^2, x*y" },
    SuiteIdeal { name: "(xz,yz)", vars: "x,y,z", gens: "x*z, y*z" },
    SuiteIdeal { name: "(x^3,y^3)", vars: "x,y", gens: "x^3, y^3" },
    SuiteIdeal { name: "(x^4,xy,y^4)", vars: "x,y", gens: "x^4, x*y, y^4" },
    SuiteIdeal { name: "(x^2,y^3)", vars: "x,y", gens: "x^2, y^3" },
    SuiteIdeal { name: "(xy)", vars: "x,y", gens: "x*y" },
    SuiteIdeal { name: "(x^2,y^2)", vars: "x,y", gens: "x^2, y^2" },
    SuiteIdeal { name: "(x^3,x^2y^2,y^3)", vars: "x,y", gens: "x^3, x^2*y^2, y^3" },
    SuiteIdeal { name: "(x^2,y^2,z^2)", vars: "x,y,z", gens: "x^2, y^2, z^2" },
    SuiteIdeal { name: "(xyz)", vars: "x,y,z", gens: "x*y*z" },
    SuiteIdeal { name: "(xy,xz)", vars: "x,y,z", gens: "x*y, x*z" },
    SuiteIdeal { name: "(x^2,xy,yz)", vars: "x,y,z", gens: "x^2, x*y, y*z" },
    SuiteIdeal { name: "(xy,yz,xz)", vars: "x,y,z", gens: "x*y, y*z, x*z" },
];
