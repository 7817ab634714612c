//! Cyclic filtered modules `M = R/J`, `M_n = (T_n + J)/J`, and the search for
//! monomial superficial elements.
//!
//! `T_n` is either `I^n` or the integral closure of `I^n`. An element
//! `x ∈ I^m` is superficial of order `m` when for some `c` and all `n >= c`
//!
//! ```text
//! ((T_{n+m} + J) : x) ∩ (T_c + J) = T_n + J
//! ```
//!
//! and the colon identity `(T_n + J) : x = (J : x) + T_{n-m}` is what the
//! recursive filtration builder consumes. Both are verified exactly over a
//! bounded range of `n`.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closure::NewtonPolyhedron;
use crate::error::{Error, Result};
use crate::ring::{Monomial, MonomialIdeal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Powers,
    IntegralClosure,
}

/// The term function `n ↦ T_n` of a filtration, with cached terms.
#[derive(Debug)]
pub struct FilteredTerms {
    ideal: MonomialIdeal,
    kind: TermKind,
    polyhedron: Option<NewtonPolyhedron>,
    powers: RwLock<Vec<Arc<MonomialIdeal>>>,
    closures: RwLock<BTreeMap<u32, Arc<MonomialIdeal>>>,
}

impl FilteredTerms {
    pub fn powers(ideal: MonomialIdeal) -> Self {
        Self::build(ideal, TermKind::Powers, None)
    }

    pub fn integral_closure(ideal: MonomialIdeal) -> Result<Self> {
        let np = NewtonPolyhedron::new(&ideal)?;
        Ok(Self::build(ideal, TermKind::IntegralClosure, Some(np)))
    }

    pub fn new(ideal: MonomialIdeal, kind: TermKind) -> Result<Self> {
        match kind {
            TermKind::Powers => Ok(Self::powers(ideal)),
            TermKind::IntegralClosure => Self::integral_closure(ideal),
        }
    }

    fn build(ideal: MonomialIdeal, kind: TermKind, polyhedron: Option<NewtonPolyhedron>) -> Self {
        let unit = Arc::new(MonomialIdeal::unit(ideal.num_vars()));
        Self { ideal, kind, polyhedron, powers: RwLock::new(vec![unit]), closures: RwLock::new(BTreeMap::new()) }
    }

    pub fn ideal(&self) -> &MonomialIdeal {
        &self.ideal
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn num_vars(&self) -> usize {
        self.ideal.num_vars()
    }

    /// `I^k`, cached.
    pub fn power(&self, k: u32) -> Arc<MonomialIdeal> {
        let k = k as usize;
        if let Some(p) = self.powers.read().expect("power cache poisoned").get(k) {
            return Arc::clone(p);
        }
        let mut cache = self.powers.write().expect("power cache poisoned");
        while cache.len() <= k {
            let next = cache.last().expect("cache holds I^0").product(&self.ideal);
            cache.push(Arc::new(next));
        }
        Arc::clone(&cache[k])
    }

    /// `T_n`; the unit ideal for `n <= 0`.
    pub fn term(&self, n: i64) -> Arc<MonomialIdeal> {
        if n <= 0 {
            return self.power(0);
        }
        let n = u32::try_from(n).expect("filtration index out of range");
        match &self.polyhedron {
            None => self.power(n),
            Some(np) => {
                if let Some(t) = self.closures.read().expect("closure cache poisoned").get(&n) {
                    return Arc::clone(t);
                }
                let t = Arc::new(np.closure_power(n));
                self.closures.write().expect("closure cache poisoned").entry(n).or_insert(t).clone()
            }
        }
    }
}

/// `M = R/J` filtered by `M_n = (T_n + J)/J`.
#[derive(Clone, Debug)]
pub struct CyclicFilteredModule {
    annihilator: MonomialIdeal,
    terms: Arc<FilteredTerms>,
}

impl CyclicFilteredModule {
    pub fn new(annihilator: MonomialIdeal, terms: Arc<FilteredTerms>) -> Self {
        assert_eq!(annihilator.num_vars(), terms.num_vars(), "module and filtration live in different rings");
        Self { annihilator, terms }
    }

    /// `R` filtered by powers of `ideal`.
    pub fn powers_of(ideal: MonomialIdeal) -> Self {
        let nvars = ideal.num_vars();
        Self::new(MonomialIdeal::zero(nvars), Arc::new(FilteredTerms::powers(ideal)))
    }

    pub fn annihilator(&self) -> &MonomialIdeal {
        &self.annihilator
    }

    pub fn terms(&self) -> &Arc<FilteredTerms> {
        &self.terms
    }

    pub fn ideal(&self) -> &MonomialIdeal {
        self.terms.ideal()
    }

    /// `T_n + J`, the ideal with `M/M_n = R/(T_n + J)`.
    pub fn quotient_ideal(&self, n: i64) -> MonomialIdeal {
        self.terms.term(n).sum(&self.annihilator)
    }

    /// `I ⊆ √J`: the quotients `M/M_n` are eventually all `R/J`.
    pub fn is_stationary(&self) -> bool {
        let rad = self.annihilator.radical();
        self.ideal().generators().iter().all(|g| rad.contains(g))
    }

    pub fn with_annihilator(&self, annihilator: MonomialIdeal) -> Self {
        Self { annihilator, terms: Arc::clone(&self.terms) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub order_max: u32,
    pub c_max: u32,
    /// Last index at which the identities are verified.
    pub n_max: u32,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self { order_max: 3, c_max: 6, n_max: 24 }
    }
}

impl SearchBounds {
    /// Defaults with verification to twice the requested sweep.
    pub fn for_sweep(n_max: u32) -> Self {
        Self { n_max: 2 * n_max, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperficialCertificate {
    pub element: Monomial,
    pub order: u32,
    pub c: u32,
    pub verified_to: u32,
    pub colon_threshold: u32,
}

fn colon_identity_holds(module: &CyclicFilteredModule, x: &Monomial, m: u32, n: u32) -> bool {
    let lhs = module.quotient_ideal(n as i64).colon_monomial(x);
    let rhs = module.annihilator.colon_monomial(x).sum(&module.terms.term(n as i64 - m as i64));
    lhs == rhs
}

/// Whether `(T_n + J) : x = (J : x) + T_{n-m}` holds at this one index.
pub fn colon_identity_at(module: &CyclicFilteredModule, x: &Monomial, m: u32, n: u32) -> bool {
    colon_identity_holds(module, x, m, n)
}

/// Least `N >= 1` such that the colon identity holds for all
/// `N <= n <= n_max`; `None` when it fails at `n_max`.
pub fn colon_threshold(module: &CyclicFilteredModule, x: &Monomial, m: u32, n_max: u32) -> Result<Option<u32>> {
    if !module.terms.power(m).contains(x) {
        return Err(Error::Precondition(format!("candidate is not in I^{m}")));
    }
    let mut threshold = None;
    for n in (1..=n_max).rev() {
        if !colon_identity_holds(module, x, m, n) {
            break;
        }
        threshold = Some(n);
    }
    Ok(threshold)
}

/// `((T_{n+m} + J) : x) ∩ (T_c + J) = T_n + J` for `c <= n <= n_max`.
pub fn superficial_condition_holds(module: &CyclicFilteredModule, x: &Monomial, m: u32, c: u32, n_max: u32) -> bool {
    let lower = module.quotient_ideal(c as i64);
    (c..=n_max).all(|n| {
        let colon = module.quotient_ideal((n + m) as i64).colon_monomial(x);
        colon.intersect(&lower) == module.quotient_ideal(n as i64)
    })
}

fn certify_candidate(
    module: &CyclicFilteredModule,
    x: &Monomial,
    m: u32,
    bounds: &SearchBounds,
) -> Option<SuperficialCertificate> {
    let threshold = colon_threshold(module, x, m, bounds.n_max).ok()??;
    let colons: Vec<MonomialIdeal> =
        (0..=bounds.n_max).map(|n| module.quotient_ideal((n + m) as i64).colon_monomial(x)).collect();
    let targets: Vec<MonomialIdeal> = (0..=bounds.n_max).map(|n| module.quotient_ideal(n as i64)).collect();
    (0..=bounds.c_max.min(bounds.n_max))
        .find(|&c| {
            let lower = &targets[c as usize];
            (c..=bounds.n_max).all(|n| colons[n as usize].intersect(lower) == targets[n as usize])
        })
        .map(|c| SuperficialCertificate {
            element: x.clone(),
            order: m,
            c,
            verified_to: bounds.n_max,
            colon_threshold: threshold,
        })
}

/// First certificate in the order (order `m`, graded-lex generator of
/// `I^m` outside `J`, least `c`).
pub fn find_superficial(module: &CyclicFilteredModule, bounds: &SearchBounds) -> Result<SuperficialCertificate> {
    find_superficial_where(module, bounds, |_| true)
}

/// Like [`find_superficial`], skipping certificates rejected by `accept`.
/// Candidates are certified in parallel; `accept` sees them in search order.
pub fn find_superficial_where(
    module: &CyclicFilteredModule,
    bounds: &SearchBounds,
    mut accept: impl FnMut(&SuperficialCertificate) -> bool,
) -> Result<SuperficialCertificate> {
    if module.ideal().is_subset(&module.annihilator) {
        return Err(Error::Precondition("the filtration ideal is zero on the module".into()));
    }
    for m in 1..=bounds.order_max {
        if let Some(cert) = certificates_of_order(module, m, bounds).into_iter().find(|c| accept(c)) {
            return Ok(cert);
        }
    }
    Err(Error::SuperficialNotFound { order_max: bounds.order_max, c_max: bounds.c_max, n_max: bounds.n_max })
}

/// Every certified generator of `I^m` outside `J`, in graded-lex order.
pub fn certificates_of_order(
    module: &CyclicFilteredModule,
    m: u32,
    bounds: &SearchBounds,
) -> Vec<SuperficialCertificate> {
    let power = module.terms.power(m);
    let candidates: Vec<&Monomial> = power.generators().iter().filter(|g| !module.annihilator.contains(g)).collect();
    candidates.par_iter().filter_map(|x| certify_candidate(module, x, m, bounds)).collect()
}

/// Re-verifies both identities of a certificate from scratch.
pub fn verify_certificate(module: &CyclicFilteredModule, cert: &SuperficialCertificate) -> bool {
    module.terms.power(cert.order).contains(&cert.element)
        && superficial_condition_holds(module, &cert.element, cert.order, cert.c, cert.verified_to)
        && (cert.colon_threshold..=cert.verified_to).all(|n| colon_identity_holds(module, &cert.element, cert.order, n))
}

/// For `n = 1..=n_max`, the largest `k` with `M_n ⊆ I^k M`; `None` when
/// `M_n = 0`, where every `k` works.
pub fn cofinality_check(module: &CyclicFilteredModule, n_max: u32) -> Result<Vec<Option<u32>>> {
    if module.ideal().is_zero() {
        return Err(Error::Precondition("cofinality is undefined for the zero filtration ideal".into()));
    }
    let j = &module.annihilator;
    (1..=n_max)
        .map(|n| {
            let mn = module.quotient_ideal(n as i64);
            if mn == *j {
                return Ok(None);
            }
            // M_n ≠ 0 forces failure at some k since ∩_k (I^k + J) = J
            let mut k = 0u32;
            while mn.is_subset(&module.terms.power(k + 1).sum(j)) {
                k += 1;
            }
            Ok(Some(k))
        })
        .collect()
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

    fn bounds(n_max: u32) -> SearchBounds {
        SearchBounds { n_max, ..SearchBounds::default() }
    }

    #[test]
    fn maximal_ideal_has_x_as_superficial_element() {
        let module = CyclicFilteredModule::powers_of(MonomialIdeal::maximal(2));
        let cert = find_superficial(&module, &bounds(20)).unwrap();
        assert_eq!(cert.element, m(&[1, 0]));
        assert_eq!((cert.order, cert.c, cert.colon_threshold), (1, 0, 1));
        assert!(verify_certificate(&module, &cert));
    }

    #[test]
    fn principal_ideal() {
        let module = CyclicFilteredModule::powers_of(ideal(&[&[1, 0]]));
        let cert = find_superficial(&module, &bounds(20)).unwrap();
        assert_eq!((cert.element.clone(), cert.order), (m(&[1, 0]), 1));
    }

    #[test]
    fn zerodivisor_direction_is_skipped() {
        let terms = Arc::new(FilteredTerms::powers(MonomialIdeal::maximal(2)));
        let module = CyclicFilteredModule::new(ideal(&[&[1, 0]]), terms);
        let cert = find_superficial(&module, &bounds(20)).unwrap();
        assert_eq!(cert.element, m(&[0, 1]));
        assert_eq!(cert.order, 1);
        for n in 1..=20u32 {
            let lhs = module.quotient_ideal(n as i64 + 1).colon_monomial(&m(&[0, 1]));
            assert_eq!(lhs, ideal(&[&[1, 0], &[0, n]]));
        }
    }

    #[test]
    fn colon_threshold_rejects_non_superficial_candidate() {
        let module = CyclicFilteredModule::powers_of(ideal(&[&[2, 0], &[1, 1]]));
        assert_eq!(colon_threshold(&module, &m(&[2, 0]), 1, 12).unwrap(), None);
        assert_eq!(colon_threshold(&module, &m(&[1, 1]), 1, 12).unwrap(), Some(1));
        assert!(colon_threshold(&module, &m(&[1, 0]), 1, 12).is_err());
    }

    #[test]
    fn certification_is_monotone_in_c() {
        let module = CyclicFilteredModule::powers_of(ideal(&[&[2, 0], &[1, 1]]));
        let cert = find_superficial(&module, &bounds(12)).unwrap();
        for c in cert.c..=6 {
            assert!(superficial_condition_holds(&module, &cert.element, cert.order, c, 12));
        }
    }

    #[test]
    fn regular_case_reads_as_plain_colon() {
        let i = MonomialIdeal::maximal(2);
        let module = CyclicFilteredModule::powers_of(i.clone());
        let x = m(&[1, 0]);
        for n in 1..=10 {
            assert_eq!(i.power(n).colon_monomial(&x), i.power(n - 1));
            assert!(colon_identity_at(&module, &x, 1, n));
        }
    }

    #[test]
    fn no_candidate_when_ideal_vanishes_on_module() {
        let terms = Arc::new(FilteredTerms::powers(MonomialIdeal::maximal(2)));
        let module = CyclicFilteredModule::new(MonomialIdeal::maximal(2), terms);
        assert!(matches!(find_superficial(&module, &bounds(6)), Err(Error::Precondition(_))));
        assert!(module.is_stationary());
    }

    #[test]
    fn cofinality_of_plain_powers() {
        let module = CyclicFilteredModule::powers_of(ideal(&[&[2, 0], &[1, 1]]));
        let table = cofinality_check(&module, 8).unwrap();
        assert_eq!(table, (1..=8).map(Some).collect::<Vec<_>>());

        let zero = CyclicFilteredModule::powers_of(MonomialIdeal::zero(2));
        assert!(cofinality_check(&zero, 3).is_err());
    }

    #[test]
    fn cofinality_of_closures() {
        let i = ideal(&[&[3, 0], &[0, 3]]);
        let terms = Arc::new(FilteredTerms::integral_closure(i).unwrap());
        let module = CyclicFilteredModule::new(MonomialIdeal::zero(2), terms);
        let table = cofinality_check(&module, 12).unwrap();
        for (n, k) in (1..=12u32).zip(table) {
            assert!(k.unwrap() + 1 >= n, "k_{n} = {k:?}");
        }
    }
}
