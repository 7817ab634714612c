//! A single localization `R_f` in which every `R_f/I^n R_f` is filtered by
//! factors `R/P` with `P ∈ Minh(I)`, hence Cohen–Macaulay.

use std::collections::BTreeSet;

use super::{localize_factors, MultiplicityLedger};
use crate::decomposition::{dimension, minh, prime_avoidance_element, MonomialPrime};
use crate::error::{Error, Result};
use crate::powers::{powers_report, Mode, PowersOptions};
use crate::ring::{Monomial, MonomialIdeal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmVerdict {
    pub n: u32,
    pub localized: MultiplicityLedger,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmCertificate {
    pub f: Monomial,
    pub dim: usize,
    pub minh: BTreeSet<MonomialPrime>,
    /// Filtration primes outside `Minh(I)`; `f` lies in each of them.
    pub contain: BTreeSet<MonomialPrime>,
    pub verdicts: Vec<CmVerdict>,
}

impl CmCertificate {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Chooses `f` from the theorem-mode filtrations of `R/I^n`, `n <= n_max`,
/// and checks every localized factor.
pub fn cm_certificate(ideal: &MonomialIdeal, n_max: u32, opts: &PowersOptions) -> Result<CmCertificate> {
    if ideal.is_zero() || !ideal.is_proper() {
        return Err(Error::DegenerateIdeal("the ideal must be proper and nonzero"));
    }
    let nvars = ideal.num_vars();
    let report = powers_report(ideal, n_max, Mode::Theorem, opts)?;
    let minh = minh(ideal)?;
    let dim = dimension(ideal)?;
    let contain: BTreeSet<MonomialPrime> = report.lambda.difference(&minh).copied().collect();
    let f = prime_avoidance_element(nvars, &contain, &minh)?;
    let verdicts = report
        .per_n
        .iter()
        .map(|r| {
            let localized = localize_factors(&r.filtration, &f);
            let pass = r.valid
                && !localized.is_empty()
                && localized.iter().all(|(p, _)| minh.contains(p) && p.quotient_dim(nvars) == dim);
            CmVerdict { n: r.n, localized, pass }
        })
        .collect();
    Ok(CmCertificate { f, dim, minh, contain, verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::new(gens[0].len(), gens.iter().map(|g| Monomial::from_slice(g)))
    }

    #[test]
    fn two_component_ideal() {
        let cert = cm_certificate(&ideal(&[&[1, 0, 1], &[0, 1, 1]]), 5, &PowersOptions::default()).unwrap();
        assert_eq!(cert.minh, BTreeSet::from([MonomialPrime::new([2])]));
        assert!(!cert.f.is_one());
        assert!(!MonomialPrime::new([2]).contains_monomial(&cert.f));
        assert!(cert.passed());
        for v in &cert.verdicts {
            assert_eq!(v.localized.primes(), cert.minh);
        }
    }

    #[test]
    fn maximal_ideal_needs_no_localization() {
        let cert = cm_certificate(&MonomialIdeal::maximal(2), 4, &PowersOptions::default()).unwrap();
        assert!(cert.f.is_one());
        assert_eq!(cert.dim, 0);
        assert!(cert.passed());
    }
}
