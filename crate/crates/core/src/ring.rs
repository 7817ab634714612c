//! Monomials and monomial ideals in a polynomial ring `k[x_1, ..., x_d]`.
//!
//! The coefficient field never appears: every operation here is
//! combinatorial on exponent vectors. Generator lists are always kept as a
//! divisibility antichain sorted in graded-lex order, so two ideals are
//! equal exactly when their generator lists are equal.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Upper bound on the number of variables; primes are stored as bit masks.
pub const MAX_VARS: usize = 64;

/// Ordered, named variables of the ambient polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingContext {
    names: Vec<String>,
}

impl RingContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidRing("at least one variable is required".into()));
        }
        if names.len() > MAX_VARS {
            return Err(Error::InvalidRing(format!("{} variables given, at most {MAX_VARS} supported", names.len())));
        }
        for (i, name) in names.iter().enumerate() {
            let mut chars = name.chars();
            let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidRing(format!("invalid variable name '{name}'")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidRing(format!("duplicate variable name '{name}'")));
            }
        }
        Ok(Self { names })
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (name, &e) in self.names.iter().zip(m.exponents()) {
            match e {
                0 => {}
                1 => parts.push(name.clone()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }

    pub fn format_ideal(&self, ideal: &MonomialIdeal) -> String {
        let gens: Vec<String> = ideal.generators().iter().map(|g| self.format_monomial(g)).collect();
        format!("({})", gens.join(", "))
    }
}

/// An exponent vector. Ordered graded-lex with `x_1 < x_2 < ...` among
/// monomials of equal degree, so a degree-`k` slice reads `x^2, x*y, y^2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u32; 4]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self { exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn new(exps: impl Into<Vec<u32>>) -> Self {
        Self { exps: SmallVec::from_vec(exps.into()) }
    }

    pub fn from_slice(exps: &[u32]) -> Self {
        Self { exps: SmallVec::from_slice(exps) }
    }

    /// `x_index ^ exponent`.
    pub fn var_power(nvars: usize, index: usize, exponent: u32) -> Self {
        let mut m = Self::one(nvars);
        m.exps[index] = exponent;
        m
    }

    /// Product of the variables in `indices`.
    pub fn squarefree(nvars: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::one(nvars);
        for i in indices {
            m.exps[i] = 1;
        }
        m
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Bit mask of the variables with a positive exponent.
    pub fn support_mask(&self) -> u64 {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }

    /// `Some(i)` when the monomial is `x_i^a` with `a >= 1`.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        divides_exps(&self.exps, &other.exps)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.num_vars(), other.num_vars());
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            exps.push(a.checked_add(*b)?);
        }
        Some(Monomial { exps })
    }

    /// Product; exponent overflow is a hard error.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("monomial exponent overflow")
    }

    pub fn checked_pow(&self, k: u32) -> Option<Monomial> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for e in self.exps.iter() {
            exps.push(e.checked_mul(k)?);
        }
        Some(Monomial { exps })
    }

    pub fn pow(&self, k: u32) -> Monomial {
        self.checked_pow(k).expect("monomial exponent overflow")
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| *a.max(b)).collect() }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| *a.min(b)).collect() }
    }

    /// `self / gcd(self, other)`: exponents `max(a_i - b_i, 0)`.
    pub fn colon(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a.saturating_sub(*b)).collect() }
    }

    /// Exact quotient, `None` unless `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { exps })
    }

    pub fn squarefree_part(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|&e| e.min(1)).collect() }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

#[inline]
pub(crate) fn divides_exps(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Sort key matching [`Monomial`]'s order, for raw exponent slices.
pub(crate) fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// Calls `f` on every exponent vector `e` with `0 <= e_i <= bounds[i]`,
/// last coordinate varying fastest.
pub fn for_each_in_box(bounds: &[u32], mut f: impl FnMut(&[u32])) {
    let mut cur = vec![0u32; bounds.len()];
    loop {
        f(&cur);
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < bounds[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// A monomial ideal given by its minimal generators.
///
/// The zero ideal has no generators; the unit ideal is generated by `1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    nvars: usize,
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    /// Ideal generated by `gens`, minimalized.
    pub fn new(nvars: usize, gens: impl IntoIterator<Item = Monomial>) -> Self {
        let gens: Vec<Monomial> = gens.into_iter().collect();
        debug_assert!(gens.iter().all(|g| g.num_vars() == nvars));
        Self { nvars, gens: minimalize(gens) }
    }

    pub fn zero(nvars: usize) -> Self {
        Self { nvars, gens: Vec::new() }
    }

    pub fn unit(nvars: usize) -> Self {
        Self { nvars, gens: vec![Monomial::one(nvars)] }
    }

    pub fn principal(m: Monomial) -> Self {
        Self { nvars: m.num_vars(), gens: vec![m] }
    }

    /// The homogeneous maximal ideal `(x_1, ..., x_d)`.
    pub fn maximal(nvars: usize) -> Self {
        Self::new(nvars, (0..nvars).map(|i| Monomial::var_power(nvars, i, 1)))
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.first().is_some_and(Monomial::is_one)
    }

    pub fn is_proper(&self) -> bool {
        !self.is_unit()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.contains_exps(m.exponents())
    }

    pub(crate) fn contains_exps(&self, e: &[u32]) -> bool {
        self.gens.iter().any(|g| divides_exps(g.exponents(), e))
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &MonomialIdeal) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        self.check_ring(other);
        MonomialIdeal::new(self.nvars, self.gens.iter().chain(other.gens.iter()).cloned())
    }

    pub fn add_generator(&self, m: &Monomial) -> MonomialIdeal {
        if self.contains(m) {
            return self.clone();
        }
        MonomialIdeal::new(self.nvars, self.gens.iter().cloned().chain(std::iter::once(m.clone())))
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        self.check_ring(other);
        let mut out = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                out.push(a.mul(b));
            }
        }
        MonomialIdeal::new(self.nvars, out)
    }

    pub fn multiply_monomial(&self, m: &Monomial) -> MonomialIdeal {
        MonomialIdeal { nvars: self.nvars, gens: minimalize(self.gens.iter().map(|g| g.mul(m)).collect()) }
    }

    /// `self^n`, with `self^0` the unit ideal.
    pub fn power(&self, n: u32) -> MonomialIdeal {
        let mut acc = MonomialIdeal::unit(self.nvars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.product(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.product(&base);
            }
        }
        acc
    }

    pub fn intersect(&self, other: &MonomialIdeal) -> MonomialIdeal {
        self.check_ring(other);
        let mut out = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                out.push(a.lcm(b));
            }
        }
        MonomialIdeal::new(self.nvars, out)
    }

    /// `(self : w)`.
    pub fn colon_monomial(&self, w: &Monomial) -> MonomialIdeal {
        MonomialIdeal::new(self.nvars, self.gens.iter().map(|g| g.colon(w)))
    }

    /// `(self : other)`, the intersection of the colons by each generator.
    pub fn colon(&self, other: &MonomialIdeal) -> MonomialIdeal {
        self.check_ring(other);
        other
            .gens
            .iter()
            .map(|b| self.colon_monomial(b))
            .reduce(|acc, c| acc.intersect(&c))
            .unwrap_or_else(|| MonomialIdeal::unit(self.nvars))
    }

    /// `(self : other^∞)`. Requires `other` nonzero.
    pub fn saturation(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        if other.is_zero() {
            return Err(Error::Precondition("saturation by the zero ideal".into()));
        }
        let mut cur = self.clone();
        loop {
            let next = cur.colon(other);
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    pub fn radical(&self) -> MonomialIdeal {
        MonomialIdeal::new(self.nvars, self.gens.iter().map(Monomial::squarefree_part))
    }

    /// Componentwise maximum of the generator exponents. Membership of a
    /// monomial and every colon `(self : w)` depend only on exponents
    /// truncated at this box.
    pub fn exponent_box(&self) -> Vec<u32> {
        let mut b = vec![0u32; self.nvars];
        for g in &self.gens {
            for (bi, &e) in b.iter_mut().zip(g.exponents()) {
                *bi = (*bi).max(e);
            }
        }
        b
    }

    /// Number of standard monomials; finite only when every variable has a
    /// pure-power generator.
    pub fn colength(&self) -> Result<u64> {
        if self.is_unit() {
            return Ok(0);
        }
        let mut bounds = vec![u32::MAX; self.nvars];
        for g in &self.gens {
            if let Some(i) = g.pure_power_var() {
                bounds[i] = bounds[i].min(g.exponents()[i]);
            }
        }
        if bounds.contains(&u32::MAX) {
            return Err(Error::InfiniteLength);
        }
        let inner: Vec<u32> = bounds.iter().map(|b| b - 1).collect();
        let mut count = 0u64;
        for_each_in_box(&inner, |e| {
            if !self.contains_exps(e) {
                count += 1;
            }
        });
        Ok(count)
    }

    fn check_ring(&self, other: &MonomialIdeal) {
        assert_eq!(self.nvars, other.nvars, "ideals live in different rings");
    }
}

// generator lists are canonical, so this is a total order on ideals
impl Ord for MonomialIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nvars.cmp(&other.nvars).then_with(|| self.gens.cmp(&other.gens))
    }
}

impl PartialOrd for MonomialIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.gens.iter()).finish()
    }
}

/// Divisibility antichain generating the same ideal, sorted graded-lex.
pub fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_unstable();
    gens.dedup();
    let mut kept: Vec<Monomial> = Vec::with_capacity(gens.len());
    for g in gens {
        // a proper divisor has strictly smaller degree, hence sorts earlier
        if !kept.iter().any(|k| k.divides(&g)) {
            kept.push(g);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_slice(e)
    }

    fn ideal(gens: &[&[u32]]) -> MonomialIdeal {
        let n = gens.first().map_or(2, |g| g.len());
        MonomialIdeal::new(n, gens.iter().map(|g| m(g)))
    }

    #[test]
    fn grlex_reads_in_natural_order() {
        let mut v = vec![m(&[0, 2]), m(&[1, 1]), m(&[2, 0]), m(&[0, 1]), m(&[1, 0]), m(&[0, 0])];
        v.sort();
        assert_eq!(v, vec![m(&[0, 0]), m(&[1, 0]), m(&[0, 1]), m(&[2, 0]), m(&[1, 1]), m(&[0, 2])]);
    }

    #[test]
    fn minimalize_cases() {
        assert_eq!(ideal(&[&[2, 0], &[3, 0], &[0, 1]]).generators(), &[m(&[0, 1]), m(&[2, 0])]);
        assert!(MonomialIdeal::new(2, vec![]).is_zero());
        assert!(ideal(&[&[0, 0], &[1, 0]]).is_unit());
    }

    #[test]
    fn sums_products_powers() {
        let mx = MonomialIdeal::maximal(2);
        assert_eq!(mx.power(2), ideal(&[&[2, 0], &[1, 1], &[0, 2]]));
        let a = ideal(&[&[2, 0], &[1, 1]]);
        assert_eq!(a.power(2), ideal(&[&[4, 0], &[3, 1], &[2, 2]]));
        let b = ideal(&[&[2, 0], &[0, 1]]);
        assert_eq!(b.product(&b.power(0)), b);
        assert!(a.power(0).is_unit());
        assert!(MonomialIdeal::zero(2).power(0).is_unit());
        assert!(MonomialIdeal::zero(2).power(3).is_zero());
    }

    #[test]
    fn intersections() {
        let x = ideal(&[&[1, 0]]);
        let y = ideal(&[&[0, 1]]);
        assert_eq!(x.intersect(&y), ideal(&[&[1, 1]]));
        let a = ideal(&[&[2, 0], &[0, 1]]);
        assert_eq!(a.intersect(&x), ideal(&[&[2, 0], &[1, 1]]));
        assert_eq!(a.intersect(&MonomialIdeal::unit(2)), a);
    }

    #[test]
    fn colons_and_saturation() {
        let a = ideal(&[&[2, 0], &[1, 1]]);
        assert_eq!(a.colon_monomial(&m(&[1, 0])), MonomialIdeal::maximal(2));
        assert_eq!(a.colon(&MonomialIdeal::maximal(2)), ideal(&[&[1, 0]]));
        assert_eq!(a.colon_monomial(&Monomial::one(2)), a);
        let mx = MonomialIdeal::maximal(2);
        assert_eq!(a.saturation(&mx).unwrap(), ideal(&[&[1, 0]]));
        assert_eq!(ideal(&[&[1, 0]]).saturation(&mx).unwrap(), ideal(&[&[1, 0]]));
        assert_eq!(ideal(&[&[2, 3]]).saturation(&ideal(&[&[0, 1]])).unwrap(), ideal(&[&[2, 0]]));
        assert!(a.saturation(&MonomialIdeal::zero(2)).is_err());
    }

    #[test]
    fn radicals() {
        assert_eq!(ideal(&[&[2, 0], &[0, 3]]).radical(), MonomialIdeal::maximal(2));
        assert_eq!(ideal(&[&[2, 1]]).radical(), ideal(&[&[1, 1]]));
        assert!(MonomialIdeal::zero(2).radical().is_zero());
    }

    #[test]
    fn membership_and_equality() {
        let a = ideal(&[&[2, 0], &[1, 1]]);
        assert!(a.contains(&m(&[3, 1])));
        assert!(!a.contains(&m(&[1, 0])));
        assert_eq!(MonomialIdeal::maximal(2).power(2), ideal(&[&[2, 0], &[1, 1], &[0, 2]]));
    }

    #[test]
    fn colength_cases() {
        assert_eq!(MonomialIdeal::maximal(2).power(2).colength().unwrap(), 3);
        assert_eq!(ideal(&[&[2, 0], &[0, 3]]).colength().unwrap(), 6);
        assert!(matches!(ideal(&[&[1, 0]]).colength(), Err(Error::InfiniteLength)));
        assert_eq!(MonomialIdeal::unit(2).colength().unwrap(), 0);
    }

    #[test]
    fn box_iteration_covers_everything() {
        let mut seen = Vec::new();
        for_each_in_box(&[1, 2], |e| seen.push(e.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[5], vec![1, 2]);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn exponent_overflow_is_fatal() {
        m(&[u32::MAX, 0]).mul(&m(&[1, 0]));
    }

    #[test]
    fn ring_context_validation() {
        assert!(RingContext::new(["x", "y"]).is_ok());
        assert!(RingContext::new(Vec::<String>::new()).is_err());
        assert!(RingContext::new(["x", "x"]).is_err());
        assert!(RingContext::new(["1x"]).is_err());
        let ctx = RingContext::new(["x", "y"]).unwrap();
        assert_eq!(ctx.format_monomial(&m(&[2, 1])), "x^2*y");
        assert_eq!(ctx.format_ideal(&ideal(&[&[2, 0], &[1, 1]])), "(x^2, x*y)");
    }
}
