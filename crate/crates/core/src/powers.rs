//! Prime filtrations of `R/T_n` across a range of `n`, built either greedily
//! or by the superficial-element recursion, and the analyses run on them.
//!
//! The recursive builder works on modules `R/J` filtered by `T_n + J`. With a
//! certified superficial element `x` of order `m`, the sequence
//!
//! ```text
//! 0 -> R/((J : x) + T_{n-m}) --(·x)--> R/(T_n + J) -> R/(T_n + J + (x)) -> 0
//! ```
//!
//! is exact once the colon identity holds at `n`, and the filtration of the
//! middle term is glued from filtrations of the outer ones.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{associated_prime_set, MonomialPrime};
use crate::error::{Error, Result};
use crate::filtration::{glue, naive_prime_filtration, FiltrationStep, MultiplicityLedger, PrimeFiltration};
use crate::ring::{Monomial, MonomialIdeal};
use crate::superficial::{
    colon_identity_at, find_superficial, find_superficial_where, CyclicFilteredModule, FilteredTerms, SearchBounds,
    SuperficialCertificate, TermKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Naive,
    Theorem,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::Theorem => "theorem",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowersOptions {
    /// Superficial search bounds; `bounds.n_max` is raised to twice the
    /// sweep when smaller.
    pub bounds: SearchBounds,
    pub window: usize,
}

impl Default for PowersOptions {
    fn default() -> Self {
        Self { bounds: SearchBounds::default(), window: 4 }
    }
}

impl PowersOptions {
    fn bounds_for(&self, n_max: u32) -> SearchBounds {
        SearchBounds { n_max: self.bounds.n_max.max(2 * n_max), ..self.bounds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey {
    pub annihilator: MonomialIdeal,
    pub n: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FallbackReason {
    NoCertificate,
    BelowThreshold { threshold: u32 },
    ColonRecheckFailed,
    GlueRejected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// `T_n + J` is the unit ideal.
    Empty,
    /// `I ⊆ √J`: the filtration is eventually constant and is built directly.
    Stationary,
    Fallback(FallbackReason),
    Glued {
        element: Monomial,
        order: u32,
        left: NodeKey,
        right: NodeKey,
    },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub key: NodeKey,
    pub kind: NodeKind,
    pub filtration: PrimeFiltration,
    /// Whether a fallback fired anywhere below and including this node.
    pub subtree_fallback: bool,
}

#[derive(Clone, Debug)]
struct Choice {
    certificate: Option<SuperficialCertificate>,
    /// Whether the whole recursion below stays certified.
    viable: bool,
}

/// Memoized recursive builder for one term function.
pub struct TheoremBuilder {
    terms: Arc<FilteredTerms>,
    bounds: SearchBounds,
    certificates: Mutex<HashMap<MonomialIdeal, Choice>>,
    memo: Mutex<HashMap<NodeKey, Arc<Node>>>,
}

impl TheoremBuilder {
    pub fn new(terms: Arc<FilteredTerms>, bounds: SearchBounds) -> Self {
        Self { terms, bounds, certificates: Mutex::default(), memo: Mutex::default() }
    }

    pub fn terms(&self) -> &Arc<FilteredTerms> {
        &self.terms
    }

    fn module(&self, j: &MonomialIdeal) -> CyclicFilteredModule {
        CyclicFilteredModule::new(j.clone(), Arc::clone(&self.terms))
    }

    /// Certificate for `R/J`, searched once per annihilator.
    ///
    /// Prefers the first certified element whose two child modules `R/(J : x)`
    /// and `R/(J + (x))` are again stationary or certifiable, so the recursion
    /// does not walk into a module without a monomial superficial element when
    /// another choice avoids it.
    pub fn certificate(&self, j: &MonomialIdeal) -> Option<SuperficialCertificate> {
        self.choice(j).certificate
    }

    fn viable(&self, j: &MonomialIdeal) -> bool {
        self.module(j).is_stationary() || self.choice(j).viable
    }

    fn choice(&self, j: &MonomialIdeal) -> Choice {
        if let Some(c) = self.certificates.lock().expect("certificate cache poisoned").get(j) {
            return c.clone();
        }
        let module = self.module(j);
        let viable = find_superficial_where(&module, &self.bounds, |c| {
            let left = j.colon_monomial(&c.element);
            (left == *j || self.viable(&left)) && self.viable(&j.add_generator(&c.element))
        });
        let choice = match viable {
            Ok(cert) => Choice { certificate: Some(cert), viable: true },
            Err(_) => Choice { certificate: find_superficial(&module, &self.bounds).ok(), viable: false },
        };
        self.certificates.lock().expect("certificate cache poisoned").entry(j.clone()).or_insert(choice).clone()
    }

    /// Filtration of `R/(T_n + J)`.
    pub fn build(&self, j: &MonomialIdeal, n: i64) -> Arc<Node> {
        let key = NodeKey { annihilator: j.clone(), n };
        if let Some(node) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Arc::clone(node);
        }
        let node = Arc::new(self.compute(key.clone()));
        Arc::clone(self.memo.lock().expect("memo poisoned").entry(key).or_insert(node))
    }

    fn compute(&self, key: NodeKey) -> Node {
        let module = self.module(&key.annihilator);
        let base = module.quotient_ideal(key.n);
        let leaf = |kind: NodeKind, filtration| {
            let subtree_fallback = matches!(kind, NodeKind::Fallback(_));
            Node { key: key.clone(), kind, filtration, subtree_fallback }
        };
        if base.is_unit() {
            return leaf(NodeKind::Empty, PrimeFiltration::empty(base));
        }
        if module.is_stationary() {
            return leaf(NodeKind::Stationary, naive_prime_filtration(&base));
        }
        let fallback = |reason| leaf(NodeKind::Fallback(reason), naive_prime_filtration(&base));
        let Some(cert) = self.certificate(&key.annihilator) else {
            return fallback(FallbackReason::NoCertificate);
        };
        if key.n < cert.colon_threshold as i64 {
            return fallback(FallbackReason::BelowThreshold { threshold: cert.colon_threshold });
        }
        let (x, m) = (&cert.element, cert.order);
        // n > 0 here, so the index fits
        if !colon_identity_at(&module, x, m, key.n as u32) {
            return fallback(FallbackReason::ColonRecheckFailed);
        }
        let left = self.build(&key.annihilator.colon_monomial(x), key.n - m as i64);
        let right = self.build(&key.annihilator.add_generator(x), key.n);
        match glue(&base, x, &left.filtration, &right.filtration) {
            Ok(filtration) => Node {
                kind: NodeKind::Glued {
                    element: x.clone(),
                    order: m,
                    left: left.key.clone(),
                    right: right.key.clone(),
                },
                filtration,
                subtree_fallback: left.subtree_fallback || right.subtree_fallback,
                key,
            },
            Err(_) => fallback(FallbackReason::GlueRejected),
        }
    }

    pub fn nodes(&self) -> Vec<Arc<Node>> {
        let memo = self.memo.lock().expect("memo poisoned");
        let mut nodes: Vec<Arc<Node>> = memo.values().cloned().collect();
        nodes.sort_by(|a, b| a.key.cmp(&b.key));
        nodes
    }

    /// Checks `ledger(node) = ledger(left) + ledger(right)` at every glued
    /// node built so far.
    pub fn recurrence_check(&self) -> RecurrenceCheck {
        let memo = self.memo.lock().expect("memo poisoned");
        let mut check = RecurrenceCheck::default();
        let mut keys: Vec<&NodeKey> = memo.keys().collect();
        keys.sort();
        for key in keys {
            let node = &memo[key];
            let NodeKind::Glued { left, right, .. } = &node.kind else { continue };
            let (Some(l), Some(r)) = (memo.get(left), memo.get(right)) else {
                check.violations.push(key.clone());
                continue;
            };
            let mut sum = l.filtration.ledger();
            sum.merge(&r.filtration.ledger());
            check.checked += 1;
            if sum != node.filtration.ledger() {
                check.violations.push(key.clone());
            }
        }
        check
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecurrenceCheck {
    pub checked: usize,
    pub violations: Vec<NodeKey>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerN {
    pub n: u32,
    pub filtration: PrimeFiltration,
    pub digest: String,
    pub primes: BTreeSet<MonomialPrime>,
    pub ledger: MultiplicityLedger,
    pub ass: BTreeSet<MonomialPrime>,
    pub fallback: bool,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability {
    /// The prime set is constant from `onset` through the end of the range.
    Stable {
        primes: BTreeSet<MonomialPrime>,
        onset: u32,
        window: usize,
    },
    /// `set(n) = set(n + period)` from `onset` on.
    Periodic {
        period: u32,
        onset: u32,
        window: usize,
    },
    NotDetected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GrowthFit {
    Exponent(f64),
    InsufficientData { points: usize },
}

impl GrowthFit {
    pub fn exponent(self) -> Option<f64> {
        match self {
            GrowthFit::Exponent(e) => Some(e),
            GrowthFit::InsufficientData { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PowersReport {
    pub ideal: MonomialIdeal,
    pub kind: TermKind,
    pub mode: Mode,
    pub n_max: u32,
    pub window: usize,
    pub per_n: Vec<PerN>,
    pub lambda: BTreeSet<MonomialPrime>,
    pub stability: Stability,
    pub growth: BTreeMap<MonomialPrime, GrowthFit>,
    pub superficial: Option<SuperficialCertificate>,
    /// Theorem mode only.
    pub recurrence: Option<RecurrenceCheck>,
}

impl PowersReport {
    pub fn all_valid(&self) -> bool {
        self.per_n.iter().all(|r| r.valid)
    }

    pub fn fallbacks(&self) -> usize {
        self.per_n.iter().filter(|r| r.fallback).count()
    }

    pub fn multiplicities(&self, prime: &MonomialPrime) -> Vec<u64> {
        self.per_n.iter().map(|r| r.ledger.get(prime)).collect()
    }
}

fn check_ideal(ideal: &MonomialIdeal) -> Result<()> {
    if ideal.is_zero() {
        return Err(Error::DegenerateIdeal("the ideal must be nonzero"));
    }
    if !ideal.is_proper() {
        return Err(Error::DegenerateIdeal("the ideal must be proper"));
    }
    Ok(())
}

pub fn powers_report(ideal: &MonomialIdeal, n_max: u32, mode: Mode, opts: &PowersOptions) -> Result<PowersReport> {
    check_ideal(ideal)?;
    filtered_report(Arc::new(FilteredTerms::powers(ideal.clone())), n_max, mode, opts)
}

/// Runs the analyses for an arbitrary term function.
pub fn filtered_report(
    terms: Arc<FilteredTerms>,
    n_max: u32,
    mode: Mode,
    opts: &PowersOptions,
) -> Result<PowersReport> {
    check_ideal(terms.ideal())?;
    let nvars = terms.num_vars();
    let zero = MonomialIdeal::zero(nvars);
    let builder = TheoremBuilder::new(Arc::clone(&terms), opts.bounds_for(n_max));
    let superficial = builder.certificate(&zero);

    let per_n: Vec<PerN> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (filtration, fallback) = match mode {
                Mode::Naive => (naive_prime_filtration(&terms.term(n as i64)), false),
                Mode::Theorem => {
                    let node = builder.build(&zero, n as i64);
                    (node.filtration.clone(), node.subtree_fallback)
                }
            };
            let ass = associated_prime_set(&terms.term(n as i64))?;
            Ok(PerN {
                n,
                digest: filtration.digest(),
                primes: filtration.primes(),
                ledger: filtration.ledger(),
                valid: filtration.validate().is_ok(),
                ass,
                fallback,
                filtration,
            })
        })
        .collect::<Result<_>>()?;

    let lambda = per_n.iter().flat_map(|r| r.primes.iter().copied()).collect();
    let sets: Vec<BTreeSet<MonomialPrime>> = per_n.iter().map(|r| r.primes.clone()).collect();
    let max_period = superficial.as_ref().map_or(1, |c| c.order);
    let stability = detect_stability(&sets, opts.window, max_period);
    let growth = growth_exponents(&per_n, &lambda, n_max);
    let recurrence = (mode == Mode::Theorem).then(|| builder.recurrence_check());
    Ok(PowersReport {
        ideal: terms.ideal().clone(),
        kind: terms.kind(),
        mode,
        n_max,
        window: opts.window,
        per_n,
        lambda,
        stability,
        growth,
        superficial,
        recurrence,
    })
}

/// Stability of `sets[0..]`, indexed from `n = 1`.
pub fn detect_stability(sets: &[BTreeSet<MonomialPrime>], window: usize, max_period: u32) -> Stability {
    let len = sets.len();
    if window == 0 || len < window {
        return Stability::NotDetected;
    }
    let tail = &sets[len - window..];
    if tail.iter().all(|s| *s == tail[0]) {
        let mut start = len - window;
        while start > 0 && sets[start - 1] == tail[0] {
            start -= 1;
        }
        return Stability::Stable { primes: tail[0].clone(), onset: start as u32 + 1, window };
    }
    for p in 2..=max_period as usize {
        if len < window + p {
            break;
        }
        if (len - window..len).all(|i| sets[i] == sets[i - p]) {
            let mut start = len - window - p;
            while start > 0 && sets[start - 1] == sets[start - 1 + p] {
                start -= 1;
            }
            return Stability::Periodic { period: p as u32, onset: start as u32 + 1, window };
        }
    }
    Stability::NotDetected
}

fn growth_exponents(
    per_n: &[PerN],
    lambda: &BTreeSet<MonomialPrime>,
    n_max: u32,
) -> BTreeMap<MonomialPrime, GrowthFit> {
    lambda
        .iter()
        .map(|p| {
            let points: Vec<(f64, f64)> = per_n
                .iter()
                .filter(|r| 2 * r.n > n_max)
                .filter_map(|r| {
                    let mu = r.ledger.get(p);
                    (mu > 0).then(|| ((r.n as f64).ln(), (mu as f64).ln()))
                })
                .collect();
            (*p, fit_slope(&points))
        })
        .collect()
}

/// Least-squares slope; needs at least four points.
pub fn fit_slope(points: &[(f64, f64)]) -> GrowthFit {
    if points.len() < 4 {
        return GrowthFit::InsufficientData { points: points.len() };
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    GrowthFit::Exponent(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssStability {
    pub per_n: Vec<(u32, BTreeSet<MonomialPrime>)>,
    pub union: BTreeSet<MonomialPrime>,
    /// First index of the trailing constant run, when the last `window`
    /// sets agree.
    pub onset: Option<u32>,
}

pub fn ass_stability(ideal: &MonomialIdeal, n_max: u32, window: usize) -> Result<AssStability> {
    check_ideal(ideal)?;
    let terms = FilteredTerms::powers(ideal.clone());
    let per_n: Vec<(u32, BTreeSet<MonomialPrime>)> =
        (1..=n_max).into_par_iter().map(|n| Ok((n, associated_prime_set(&terms.power(n))?))).collect::<Result<_>>()?;
    let union = per_n.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    let sets: Vec<BTreeSet<MonomialPrime>> = per_n.iter().map(|(_, s)| s.clone()).collect();
    let onset = match detect_stability(&sets, window, 1) {
        Stability::Stable { onset, .. } => Some(onset),
        _ => None,
    };
    Ok(AssStability { per_n, union, onset })
}

/// A filtration of `R/(x^n)` that first splits off `R/(x)` through the
/// witness `x^{n-1}·f`, leaving `R/x^{n-1}(x, f)`, and finishes greedily.
/// The first variable plays the role of `x`.
pub fn bad_filtration_fixture(n: u32, f: &Monomial) -> Result<PrimeFiltration> {
    let nvars = f.num_vars();
    if n == 0 {
        return Err(Error::Precondition("the fixture needs n >= 1".into()));
    }
    if f.exponents()[0] != 0 {
        return Err(Error::Precondition("f must not lie in (x)".into()));
    }
    let base = MonomialIdeal::principal(Monomial::var_power(nvars, 0, n));
    let first = Monomial::var_power(nvars, 0, n - 1).mul(f);
    let rest = naive_prime_filtration(&base.add_generator(&first));
    let mut steps = vec![FiltrationStep { witness: first, prime: MonomialPrime::new([0]) }];
    steps.extend(rest.steps().iter().cloned());
    Ok(PrimeFiltration::from_parts(base, steps))
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

    fn p(idx: &[usize]) -> MonomialPrime {
        MonomialPrime::new(idx.iter().copied())
    }

    #[test]
    fn principal_ideal_in_theorem_mode() {
        let r = powers_report(&ideal(&[&[1, 0]]), 6, Mode::Theorem, &PowersOptions::default()).unwrap();
        assert_eq!(r.lambda, BTreeSet::from([p(&[0])]));
        assert_eq!(r.multiplicities(&p(&[0])), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(r.fallbacks(), 0);
        assert!(r.all_valid());
    }

    #[test]
    fn zeroth_term_is_empty() {
        let b =
            TheoremBuilder::new(Arc::new(FilteredTerms::powers(MonomialIdeal::maximal(2))), SearchBounds::default());
        let node = b.build(&MonomialIdeal::zero(2), 0);
        assert_eq!(node.kind, NodeKind::Empty);
        assert!(node.filtration.is_empty());
    }

    #[test]
    fn mixed_ideal_both_modes() {
        let i = ideal(&[&[2, 0], &[1, 1]]);
        for mode in [Mode::Naive, Mode::Theorem] {
            let r = powers_report(&i, 8, mode, &PowersOptions::default()).unwrap();
            assert!(r.all_valid());
            assert_eq!(r.lambda, BTreeSet::from([p(&[0]), p(&[0, 1])]), "{mode:?}");
            for row in &r.per_n {
                assert!(row.ass.is_subset(&row.primes));
            }
        }
        let r = powers_report(&i, 8, Mode::Theorem, &PowersOptions::default()).unwrap();
        assert_eq!(r.fallbacks(), 0);
        let rec = r.recurrence.unwrap();
        assert!(rec.checked > 0 && rec.violations.is_empty());
        assert!(matches!(r.stability, Stability::Stable { onset: 1, .. }));
    }

    #[test]
    fn maximal_ideal_counts() {
        let r = powers_report(&MonomialIdeal::maximal(2), 10, Mode::Theorem, &PowersOptions::default()).unwrap();
        let mu = r.multiplicities(&p(&[0, 1]));
        assert_eq!(mu, (1..=10u64).map(|n| n * (n + 1) / 2).collect::<Vec<_>>());
        let e = r.growth[&p(&[0, 1])].exponent().unwrap();
        assert!(e <= 2.2 && e > 1.5);
    }

    #[test]
    fn stability_detection() {
        let a: BTreeSet<MonomialPrime> = [p(&[0])].into();
        let b: BTreeSet<MonomialPrime> = [p(&[1])].into();
        let seq = vec![b.clone(), a.clone(), a.clone(), a.clone(), a.clone()];
        assert_eq!(detect_stability(&seq, 4, 1), Stability::Stable { primes: a.clone(), onset: 2, window: 4 });
        let alt: Vec<_> = (0..8).map(|i| if i % 2 == 0 { a.clone() } else { b.clone() }).collect();
        assert_eq!(detect_stability(&alt, 4, 1), Stability::NotDetected);
        assert_eq!(detect_stability(&alt, 4, 2), Stability::Periodic { period: 2, onset: 1, window: 4 });
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (5..10).map(|n| ((n as f64).ln(), 2.0 * (n as f64).ln())).collect();
        assert!((fit_slope(&pts).exponent().unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(fit_slope(&pts[..3]), GrowthFit::InsufficientData { points: 3 });
    }

    #[test]
    fn ass_of_powers() {
        let s = ass_stability(&ideal(&[&[2, 0], &[1, 1]]), 10, 4).unwrap();
        for (_, set) in &s.per_n {
            assert_eq!(*set, BTreeSet::from([p(&[0]), p(&[0, 1])]));
        }
        assert_eq!(s.onset, Some(1));
        let s = ass_stability(&MonomialIdeal::maximal(2), 5, 4).unwrap();
        assert_eq!(s.union, BTreeSet::from([p(&[0, 1])]));
    }

    #[test]
    fn fixture_adds_an_embedded_prime() {
        let f = bad_filtration_fixture(2, &m(&[0, 1])).unwrap();
        assert!(f.validate().is_ok());
        assert_eq!(f.primes(), BTreeSet::from([p(&[0]), p(&[0, 1])]));
        let good = bad_filtration_fixture(3, &m(&[0, 0])).unwrap();
        assert!(good.validate().is_ok());
        assert_eq!(good.primes(), BTreeSet::from([p(&[0])]));
        assert!(bad_filtration_fixture(2, &m(&[1, 0])).is_err());
    }

    #[test]
    fn rejects_degenerate_ideals() {
        let opts = PowersOptions::default();
        assert!(powers_report(&MonomialIdeal::zero(2), 3, Mode::Naive, &opts).is_err());
        assert!(powers_report(&MonomialIdeal::unit(2), 3, Mode::Naive, &opts).is_err());
    }
}
