//! Prime filtrations of cyclic modules `R/J`.
//!
//! A filtration is stored at the ideal level: starting from `U_0 = J`, each
//! step adds a witness monomial, `U_{k+1} = U_k + (w_k)`, and the quotient
//! `U_{k+1}/U_k` is isomorphic to `R/(U_k : w_k)`, which must be the recorded
//! monomial prime. The chain ends at the unit ideal.

mod cm;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::decomposition::{prime_colon_exps, MonomialPrime};
use crate::error::{Error, Result};
use crate::ring::{for_each_in_box, grlex_cmp, Monomial, MonomialIdeal};

pub use cm::{cm_certificate, CmCertificate, CmVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiltrationStep {
    pub witness: Monomial,
    pub prime: MonomialPrime,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFiltration {
    base: MonomialIdeal,
    steps: Vec<FiltrationStep>,
}

/// Multiplicity of each prime among the factors of a filtration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiplicityLedger(BTreeMap<MonomialPrime, u64>);

impl MultiplicityLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, prime: MonomialPrime, count: u64) {
        if count > 0 {
            *self.0.entry(prime).or_insert(0) += count;
        }
    }

    pub fn merge(&mut self, other: &MultiplicityLedger) {
        for (&p, &c) in &other.0 {
            self.add(p, c);
        }
    }

    pub fn get(&self, prime: &MonomialPrime) -> u64 {
        self.0.get(prime).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn primes(&self) -> BTreeSet<MonomialPrime> {
        self.0.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MonomialPrime, &u64)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Factors surviving after inverting `f`: `R_f/P_f` vanishes iff `f ∈ P`.
    pub fn localize(&self, f: &Monomial) -> MultiplicityLedger {
        Self(self.0.iter().filter(|(p, _)| !p.contains_monomial(f)).map(|(&p, &c)| (p, c)).collect())
    }
}

impl FromIterator<(MonomialPrime, u64)> for MultiplicityLedger {
    fn from_iter<T: IntoIterator<Item = (MonomialPrime, u64)>>(iter: T) -> Self {
        let mut l = Self::new();
        for (p, c) in iter {
            l.add(p, c);
        }
        l
    }
}

/// Why a step list fails to be a prime filtration of `R/base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationReason {
    RingMismatch,
    WitnessInIdeal,
    ColonMismatch { claimed: MonomialPrime, actual: MonomialIdeal },
    FinalIdealNotUnit { last: MonomialIdeal },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationViolation {
    /// Index of the offending step; `steps.len()` for the final check.
    pub step: usize,
    pub reason: ViolationReason,
}

impl fmt::Display for FiltrationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            ViolationReason::RingMismatch => write!(f, "step {}: monomial from a different ring", self.step),
            ViolationReason::WitnessInIdeal => write!(f, "step {}: witness already lies in the ideal", self.step),
            ViolationReason::ColonMismatch { claimed, actual } => {
                write!(f, "step {}: colon is {actual:?}, not the claimed prime {:?}", self.step, claimed.indices())
            }
            ViolationReason::FinalIdealNotUnit { last } => {
                write!(f, "chain ends at {last:?} instead of the unit ideal")
            }
        }
    }
}

impl PrimeFiltration {
    /// Wraps a step list without checking it; see [`PrimeFiltration::validate`].
    pub fn from_parts(base: MonomialIdeal, steps: Vec<FiltrationStep>) -> Self {
        Self { base, steps }
    }

    pub fn empty(base: MonomialIdeal) -> Self {
        Self { base, steps: Vec::new() }
    }

    pub fn base(&self) -> &MonomialIdeal {
        &self.base
    }

    pub fn steps(&self) -> &[FiltrationStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn primes(&self) -> BTreeSet<MonomialPrime> {
        self.steps.iter().map(|s| s.prime).collect()
    }

    pub fn ledger(&self) -> MultiplicityLedger {
        let mut l = MultiplicityLedger::new();
        for s in &self.steps {
            l.add(s.prime, 1);
        }
        l
    }

    /// Checks every step exactly, reporting the first failure.
    pub fn validate(&self) -> std::result::Result<(), FiltrationViolation> {
        let nvars = self.base.num_vars();
        let mut u = self.base.clone();
        for (k, step) in self.steps.iter().enumerate() {
            let fail = |reason| Err(FiltrationViolation { step: k, reason });
            if step.witness.num_vars() != nvars || step.prime.mask() >> nvars != 0 {
                return fail(ViolationReason::RingMismatch);
            }
            if u.contains(&step.witness) {
                return fail(ViolationReason::WitnessInIdeal);
            }
            let colon = u.colon_monomial(&step.witness);
            if colon != step.prime.to_ideal(nvars) {
                return fail(ViolationReason::ColonMismatch { claimed: step.prime, actual: colon });
            }
            u = u.add_generator(&step.witness);
        }
        if !u.is_unit() {
            return Err(FiltrationViolation {
                step: self.steps.len(),
                reason: ViolationReason::FinalIdealNotUnit { last: u },
            });
        }
        Ok(())
    }

    /// Short stable fingerprint of base and steps.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for g in self.base.generators() {
            h.update(format!("{:?};", g.exponents()).as_bytes());
        }
        h.update(b"|");
        for s in &self.steps {
            h.update(format!("{:?}:{};", s.witness.exponents(), s.prime.mask()).as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Builds a prime filtration of `R/J` greedily: each step takes a witness
/// whose colon prime is maximal among the available ones, graded-lex least
/// among those.
pub fn naive_prime_filtration(j: &MonomialIdeal) -> PrimeFiltration {
    PrimeFiltration { base: j.clone(), steps: naive_steps_from(j) }
}

pub(crate) fn naive_steps_from(start: &MonomialIdeal) -> Vec<FiltrationStep> {
    let mut steps = Vec::new();
    let mut u = start.clone();
    while !u.is_unit() {
        let step = greedy_step(&u);
        u = u.add_generator(&step.witness);
        steps.push(step);
    }
    steps
}

fn greedy_step(u: &MonomialIdeal) -> FiltrationStep {
    let mut least: BTreeMap<MonomialPrime, Vec<u32>> = BTreeMap::new();
    for_each_in_box(&u.exponent_box(), |e| {
        if let Some(p) = prime_colon_exps(u, e) {
            match least.get_mut(&p) {
                Some(w) if grlex_cmp(e, w).is_lt() => *w = e.to_vec(),
                Some(_) => {}
                None => {
                    least.insert(p, e.to_vec());
                }
            }
        }
    });
    let (prime, witness) = least
        .iter()
        .filter(|(p, _)| !least.keys().any(|q| q != *p && q.contains_prime(p)))
        .min_by(|a, b| grlex_cmp(a.1, b.1))
        .expect("a proper monomial ideal has an associated prime");
    FiltrationStep { witness: Monomial::from_slice(witness), prime: *prime }
}

/// Glues filtrations along `0 -> R/A --(·w)--> R/B -> R/(B + (w)) -> 0`.
///
/// `left` filters `R/A` with `A = (B : w)`, `right` filters `R/(B + (w))`.
/// The result filters `R/B`: the left steps multiplied by `w`, then the
/// right steps.
pub fn glue(
    base: &MonomialIdeal,
    multiplier: &Monomial,
    left: &PrimeFiltration,
    right: &PrimeFiltration,
) -> Result<PrimeFiltration> {
    if base.colon_monomial(multiplier) != left.base {
        return Err(Error::Precondition(
            "multiplication by the glue element is not injective on the left module".into(),
        ));
    }
    if right.base != base.add_generator(multiplier) {
        return Err(Error::Precondition("right filtration does not start at B + (w)".into()));
    }
    let mut steps = Vec::with_capacity(left.len() + right.len());
    steps.extend(left.steps.iter().map(|s| FiltrationStep { witness: s.witness.mul(multiplier), prime: s.prime }));
    steps.extend(right.steps.iter().cloned());
    Ok(PrimeFiltration { base: base.clone(), steps })
}

/// Multiplicities of the factors that survive inverting `f`.
pub fn localize_factors(filtration: &PrimeFiltration, f: &Monomial) -> MultiplicityLedger {
    filtration.ledger().localize(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_slice(e)
    }

    fn ideal(gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::new(gens[0].len(), gens.iter().map(|g| m(g)))
    }

    fn step(w: &[u32], p: &[usize]) -> FiltrationStep {
        FiltrationStep { witness: m(w), prime: MonomialPrime::new(p.iter().copied()) }
    }

    #[test]
    fn naive_examples() {
        let f = naive_prime_filtration(&MonomialIdeal::maximal(2));
        assert_eq!(f.steps(), &[step(&[0, 0], &[0, 1])]);
        assert_eq!(f.ledger().get(&MonomialPrime::maximal(2)), 1);

        let f = naive_prime_filtration(&ideal(&[&[2, 0]]));
        assert_eq!(f.steps(), &[step(&[1, 0], &[0]), step(&[0, 0], &[0])]);
        assert_eq!(f.ledger().get(&MonomialPrime::new([0])), 2);

        let f = naive_prime_filtration(&ideal(&[&[2, 0], &[1, 1]]));
        assert_eq!(f.steps(), &[step(&[1, 0], &[0, 1]), step(&[0, 0], &[0])]);
        assert!(f.validate().is_ok());

        assert!(naive_prime_filtration(&MonomialIdeal::unit(2)).is_empty());
        let f = naive_prime_filtration(&MonomialIdeal::zero(2));
        assert_eq!(f.steps(), &[step(&[0, 0], &[])]);
        assert!(f.validate().is_ok());
    }

    #[test]
    fn validation_reports_first_failure() {
        let base = ideal(&[&[2, 0], &[1, 1]]);
        let bad = PrimeFiltration::from_parts(base.clone(), vec![step(&[0, 1], &[0, 1])]);
        let v = bad.validate().unwrap_err();
        assert_eq!(v.step, 0);
        assert!(matches!(v.reason, ViolationReason::ColonMismatch { .. }));

        let bad = PrimeFiltration::from_parts(base.clone(), vec![step(&[2, 0], &[0])]);
        assert_eq!(bad.validate().unwrap_err().reason, ViolationReason::WitnessInIdeal);

        let short = PrimeFiltration::empty(ideal(&[&[1, 0]]));
        let v = short.validate().unwrap_err();
        assert_eq!(v.step, 0);
        assert!(matches!(v.reason, ViolationReason::FinalIdealNotUnit { .. }));
    }

    #[test]
    fn glue_matches_naive_and_adds_ledgers() {
        let x = ideal(&[&[1, 0]]);
        let x2 = ideal(&[&[2, 0]]);
        let left = naive_prime_filtration(&x);
        let right = naive_prime_filtration(&x);
        let glued = glue(&x2, &m(&[1, 0]), &left, &right).unwrap();
        assert!(glued.validate().is_ok());
        assert_eq!(glued, naive_prime_filtration(&x2));
        let mut sum = left.ledger();
        sum.merge(&right.ledger());
        assert_eq!(glued.ledger(), sum);
        assert_eq!(glued.ledger().get(&MonomialPrime::new([0])), 2);
    }

    #[test]
    fn glue_with_empty_left_is_right() {
        let b = ideal(&[&[2, 0], &[1, 1]]);
        let w = m(&[2, 0]);
        let left = PrimeFiltration::empty(MonomialIdeal::unit(2));
        let right = naive_prime_filtration(&b);
        let glued = glue(&b, &w, &left, &right).unwrap();
        assert_eq!(glued.steps(), right.steps());
    }

    #[test]
    fn glue_rejects_wrong_left_base() {
        let x2 = ideal(&[&[2, 0]]);
        let left = naive_prime_filtration(&ideal(&[&[2, 0]]));
        let right = naive_prime_filtration(&ideal(&[&[1, 0]]));
        assert!(matches!(glue(&x2, &m(&[1, 0]), &left, &right), Err(Error::Precondition(_))));
    }

    #[test]
    fn localization_drops_primes_containing_f() {
        let l: MultiplicityLedger =
            [(MonomialPrime::new([0]), 1), (MonomialPrime::maximal(2), 1)].into_iter().collect();
        let y = m(&[0, 1]);
        assert_eq!(l.localize(&y), [(MonomialPrime::new([0]), 1)].into_iter().collect());
        assert_eq!(l.localize(&Monomial::one(2)), l);
    }

    #[test]
    fn digest_is_stable() {
        let f = naive_prime_filtration(&ideal(&[&[2, 0], &[1, 1]]));
        assert_eq!(f.digest(), f.clone().digest());
        assert_eq!(f.digest().len(), 16);
        assert_ne!(f.digest(), naive_prime_filtration(&ideal(&[&[2, 0]])).digest());
    }
}
