//! Irreducible decomposition, associated and minimal primes, dimension and
//! prime avoidance for monomial ideals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ring::{for_each_in_box, grlex_cmp, Monomial, MonomialIdeal, RingContext};

/// The prime generated by a subset of the variables. The empty subset is the
/// zero ideal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct MonomialPrime {
    support: u64,
}

impl MonomialPrime {
    pub fn from_mask(support: u64) -> Self {
        Self { support }
    }

    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self { support: indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)) }
    }

    pub fn zero() -> Self {
        Self { support: 0 }
    }

    pub fn maximal(nvars: usize) -> Self {
        Self::new(0..nvars)
    }

    pub fn mask(&self) -> u64 {
        self.support
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..64).filter(|i| self.support >> i & 1 == 1).collect()
    }

    /// Height of the prime, i.e. the number of generating variables.
    pub fn height(&self) -> usize {
        self.support.count_ones() as usize
    }

    /// Krull dimension of `R/P`.
    pub fn quotient_dim(&self, nvars: usize) -> usize {
        nvars - self.height()
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        m.support_mask() & self.support != 0
    }

    pub fn contains_prime(&self, other: &MonomialPrime) -> bool {
        other.support & !self.support == 0
    }

    pub fn to_ideal(&self, nvars: usize) -> MonomialIdeal {
        MonomialIdeal::new(nvars, self.indices().into_iter().map(|i| Monomial::var_power(nvars, i, 1)))
    }

    pub fn names(&self, ctx: &RingContext) -> Vec<String> {
        self.indices().into_iter().map(|i| ctx.names()[i].clone()).collect()
    }

    pub fn format(&self, ctx: &RingContext) -> String {
        format!("({})", self.names(ctx).join(","))
    }
}

impl Ord for MonomialPrime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for MonomialPrime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `(U : w)` when it is a monomial prime; `None` if it is not prime or if
/// `w ∈ U`.
pub fn prime_colon(u: &MonomialIdeal, w: &Monomial) -> Option<MonomialPrime> {
    prime_colon_exps(u, w.exponents())
}

pub(crate) fn prime_colon_exps(u: &MonomialIdeal, w: &[u32]) -> Option<MonomialPrime> {
    // colon generators are g_i' = max(g_i - w_i, 0); the ideal they generate
    // is prime iff the linear ones cover every other one
    let mut linear = 0u64;
    for g in u.generators() {
        let mut deg = 0u64;
        let mut var = 0usize;
        for (i, (&a, &b)) in g.exponents().iter().zip(w).enumerate() {
            let e = a.saturating_sub(b);
            if e > 0 {
                deg += e as u64;
                var = i;
            }
        }
        match deg {
            0 => return None,
            1 => linear |= 1 << var,
            _ => {}
        }
    }
    for g in u.generators() {
        let covered = g.exponents().iter().zip(w).enumerate().any(|(i, (&a, &b))| a > b && linear >> i & 1 == 1);
        if !covered {
            return None;
        }
    }
    Some(MonomialPrime::from_mask(linear))
}

/// An irreducible monomial ideal `(x_i^{a_i} : i ∈ domain)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IrreducibleComponent {
    bounds: Vec<(usize, u32)>,
}

impl IrreducibleComponent {
    pub fn bounds(&self) -> &[(usize, u32)] {
        &self.bounds
    }

    pub fn radical(&self) -> MonomialPrime {
        MonomialPrime::new(self.bounds.iter().map(|&(i, _)| i))
    }

    pub fn to_ideal(&self, nvars: usize) -> MonomialIdeal {
        MonomialIdeal::new(nvars, self.bounds.iter().map(|&(i, a)| Monomial::var_power(nvars, i, a)))
    }

    fn from_ideal(ideal: &MonomialIdeal) -> Self {
        let mut bounds: Vec<(usize, u32)> = ideal
            .generators()
            .iter()
            .map(|g| {
                let i = g.pure_power_var().expect("irreducible ideals have pure-power generators");
                (i, g.exponents()[i])
            })
            .collect();
        bounds.sort_unstable();
        Self { bounds }
    }
}

/// Irredundant irreducible decomposition of a proper nonzero ideal.
pub fn irreducible_decomposition(j: &MonomialIdeal) -> Result<Vec<IrreducibleComponent>> {
    if j.is_zero() {
        return Err(Error::DegenerateIdeal("the zero ideal has no irreducible decomposition here"));
    }
    if j.is_unit() {
        return Err(Error::DegenerateIdeal("the unit ideal has no irreducible decomposition"));
    }
    let nvars = j.num_vars();
    let mut leaves: BTreeSet<MonomialIdeal> = BTreeSet::new();
    let mut seen: HashSet<MonomialIdeal> = HashSet::new();
    let mut stack = vec![j.clone()];
    while let Some(cur) = stack.pop() {
        if !seen.insert(cur.clone()) {
            continue;
        }
        // graded-lex-least generator that is not a pure power
        let Some(g) = cur.generators().iter().find(|g| g.pure_power_var().is_none()) else {
            leaves.insert(cur);
            continue;
        };
        // split g = x_i^a * h on its least variable
        let i = g.exponents().iter().position(|&e| e > 0).expect("non-unit generator");
        let a = g.exponents()[i];
        let h = Monomial::new(
            g.exponents().iter().enumerate().map(|(k, &e)| if k == i { 0 } else { e }).collect::<Vec<_>>(),
        );
        stack.push(cur.add_generator(&h));
        stack.push(cur.add_generator(&Monomial::var_power(nvars, i, a)));
    }
    let leaves: Vec<MonomialIdeal> = leaves.into_iter().collect();
    let mut out: Vec<IrreducibleComponent> = leaves
        .iter()
        .filter(|c| !leaves.iter().any(|d| d != *c && d.is_subset(c)))
        .map(IrreducibleComponent::from_ideal)
        .collect();
    out.sort_by(|a, b| a.radical().cmp(&b.radical()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// An associated prime `P` of `R/J` with a certificate `w ∉ J`, `(J : w) = P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociatedPrime {
    pub prime: MonomialPrime,
    pub witness: Monomial,
}

/// `Ass(R/J)` with graded-lex-least witnesses from the exponent box.
pub fn associated_primes(j: &MonomialIdeal) -> Result<Vec<AssociatedPrime>> {
    if j.is_unit() {
        return Err(Error::DegenerateIdeal("R/J is zero for the unit ideal"));
    }
    let nvars = j.num_vars();
    if j.is_zero() {
        return Ok(vec![AssociatedPrime { prime: MonomialPrime::zero(), witness: Monomial::one(nvars) }]);
    }
    let primes: BTreeSet<MonomialPrime> =
        irreducible_decomposition(j)?.iter().map(IrreducibleComponent::radical).collect();
    let mut witnesses: BTreeMap<MonomialPrime, Vec<u32>> = BTreeMap::new();
    for_each_in_box(&j.exponent_box(), |e| {
        if let Some(p) = prime_colon_exps(j, e) {
            if primes.contains(&p) {
                witnesses
                    .entry(p)
                    .and_modify(|w| {
                        if grlex_cmp(e, w) == Ordering::Less {
                            *w = e.to_vec();
                        }
                    })
                    .or_insert_with(|| e.to_vec());
            }
        }
    });
    primes
        .into_iter()
        .map(|p| {
            let w = witnesses
                .get(&p)
                .ok_or_else(|| Error::Precondition("associated prime without a witness in the exponent box".into()))?;
            Ok(AssociatedPrime { prime: p, witness: Monomial::from_slice(w) })
        })
        .collect()
}

pub fn associated_prime_set(j: &MonomialIdeal) -> Result<BTreeSet<MonomialPrime>> {
    Ok(associated_primes(j)?.into_iter().map(|a| a.prime).collect())
}

/// Minimal elements under inclusion.
pub fn minimal_elements(primes: impl IntoIterator<Item = MonomialPrime>) -> BTreeSet<MonomialPrime> {
    let all: BTreeSet<MonomialPrime> = primes.into_iter().collect();
    all.iter().filter(|p| !all.iter().any(|q| q != *p && p.contains_prime(q))).copied().collect()
}

pub fn minimal_primes(j: &MonomialIdeal) -> Result<BTreeSet<MonomialPrime>> {
    if j.is_unit() {
        return Err(Error::DegenerateIdeal("the unit ideal has no minimal primes"));
    }
    if j.is_zero() {
        return Ok(BTreeSet::from([MonomialPrime::zero()]));
    }
    let rad = j.radical();
    Ok(minimal_elements(irreducible_decomposition(&rad)?.iter().map(IrreducibleComponent::radical)))
}

/// Krull dimension of `R/J`.
pub fn dimension(j: &MonomialIdeal) -> Result<usize> {
    let min = minimal_primes(j)?;
    let h = min.iter().map(MonomialPrime::height).min().expect("proper ideals have minimal primes");
    Ok(j.num_vars() - h)
}

/// Minimal primes `P` with `dim R/P = dim R/J`.
pub fn minh(j: &MonomialIdeal) -> Result<BTreeSet<MonomialPrime>> {
    let min = minimal_primes(j)?;
    let h = min.iter().map(MonomialPrime::height).min().expect("proper ideals have minimal primes");
    Ok(min.into_iter().filter(|p| p.height() == h).collect())
}

/// Squarefree monomial lying in every prime of `contain` and in no prime of
/// `avoid`, of least degree and graded-lex least among those. May be `1`.
pub fn prime_avoidance_element(
    nvars: usize,
    contain: &BTreeSet<MonomialPrime>,
    avoid: &BTreeSet<MonomialPrime>,
) -> Result<Monomial> {
    avoidance_search(nvars, contain, avoid, 0)
}

/// As [`prime_avoidance_element`] but of positive degree, i.e. a homogeneous
/// element of the irrelevant ideal.
pub fn homogeneous_avoidance_element(
    nvars: usize,
    contain: &BTreeSet<MonomialPrime>,
    avoid: &BTreeSet<MonomialPrime>,
) -> Result<Monomial> {
    avoidance_search(nvars, contain, avoid, 1)
}

fn avoidance_search(
    nvars: usize,
    contain: &BTreeSet<MonomialPrime>,
    avoid: &BTreeSet<MonomialPrime>,
    min_size: usize,
) -> Result<Monomial> {
    let forbidden = avoid.iter().fold(0u64, |acc, p| acc | p.mask());
    let allowed: Vec<usize> = (0..nvars).filter(|i| forbidden >> i & 1 == 0).collect();
    let allowed_mask = allowed.iter().fold(0u64, |acc, i| acc | 1 << i);
    if contain.iter().any(|p| p.mask() & allowed_mask == 0) {
        return Err(Error::Infeasible);
    }
    // a hitting set never needs more than one variable per prime
    let max_size = contain.len().max(min_size).min(allowed.len());
    for k in min_size..=max_size {
        // index-lexicographic combinations enumerate squarefree monomials of
        // one degree in graded-lex order
        for combo in allowed.iter().copied().combinations(k) {
            let mask = combo.iter().fold(0u64, |acc, i| acc | 1 << i);
            if contain.iter().all(|p| p.mask() & mask != 0) {
                return Ok(Monomial::squarefree(nvars, combo));
            }
        }
    }
    Err(Error::Infeasible)
}
