//! Lengths of the `m`-torsion `H^0_m(R/I^n) = sat(I^n)/I^n` and the
//! ε-multiplicity estimate `limsup d!·ℓ_n / n^d`.

use rayon::prelude::*;

use crate::decomposition::MonomialPrime;
use crate::error::{Error, Result};
use crate::powers::PowersReport;
use crate::ring::{for_each_in_box, MonomialIdeal};

/// Number of monomials in `sat(J, m) \ J`.
///
/// Any monomial outside `J` whose `x_i`-exponent reaches the largest
/// `x_i`-exponent of a generator stays outside `J` after multiplying by any
/// power of `x_i`, so the count runs over `u_i < box_i`.
pub fn h0_length(j: &MonomialIdeal) -> Result<u64> {
    if !j.is_proper() {
        return Err(Error::DegenerateIdeal("H^0 of the zero module"));
    }
    if j.is_zero() {
        return Ok(0);
    }
    let nvars = j.num_vars();
    let sat = j.saturation(&MonomialIdeal::maximal(nvars))?;
    let bounds = j.exponent_box();
    if bounds.contains(&0) {
        return Ok(0);
    }
    let inner: Vec<u32> = bounds.iter().map(|b| b - 1).collect();
    let mut count = 0;
    for_each_in_box(&inner, |e| {
        if sat.contains_exps(e) && !j.contains_exps(e) {
            count += 1;
        }
    });
    Ok(count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonEstimate {
    pub dim: usize,
    pub n_max: u32,
    /// `(n, ℓ_n)`.
    pub lengths: Vec<(u32, u64)>,
    /// `d!·ℓ_n / n^d`.
    pub normalized: Vec<f64>,
    pub window: usize,
    /// Maximum of the normalized values over the trailing window.
    pub estimate: f64,
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

pub fn epsilon_estimate(ideal: &MonomialIdeal, n_max: u32) -> Result<EpsilonEstimate> {
    if ideal.is_zero() || !ideal.is_proper() {
        return Err(Error::DegenerateIdeal("the ideal must be proper and nonzero"));
    }
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    let d = ideal.num_vars();
    let lengths: Vec<(u32, u64)> =
        (1..=n_max).into_par_iter().map(|n| Ok((n, h0_length(&ideal.power(n))?))).collect::<Result<_>>()?;
    let normalized: Vec<f64> =
        lengths.iter().map(|&(n, l)| factorial(d) * l as f64 / (n as f64).powi(d as i32)).collect();
    let window = (n_max as usize).div_ceil(4);
    let estimate = normalized[normalized.len() - window..].iter().copied().fold(0.0, f64::max);
    Ok(EpsilonEstimate { dim: d, n_max, lengths, normalized, window, estimate })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundVerdict {
    pub n: u32,
    pub length: u64,
    /// Multiplicity of the maximal ideal among the filtration factors.
    pub bound: u64,
    pub pass: bool,
}

/// `ℓ_n <= μ_m(n)`: among monomial primes only `R/m` has nonzero `H^0_m`,
/// and it has length one.
pub fn filtration_bound_check(ideal: &MonomialIdeal, n_max: u32, report: &PowersReport) -> Result<Vec<BoundVerdict>> {
    if report.ideal != *ideal || report.n_max < n_max {
        return Err(Error::Precondition("report does not cover this ideal and range".into()));
    }
    let m = MonomialPrime::maximal(ideal.num_vars());
    report
        .per_n
        .iter()
        .filter(|r| r.n <= n_max)
        .map(|r| {
            let length = h0_length(&ideal.power(r.n))?;
            let bound = r.ledger.get(&m);
            Ok(BoundVerdict { n: r.n, length, bound, pass: length <= bound })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powers::{powers_report, Mode, PowersOptions};
    use crate::ring::Monomial;

    fn ideal(gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::new(gens[0].len(), gens.iter().map(|g| Monomial::from_slice(g)))
    }

    #[test]
    fn torsion_lengths() {
        assert_eq!(h0_length(&ideal(&[&[2, 0], &[1, 1]])).unwrap(), 1);
        assert_eq!(h0_length(&MonomialIdeal::maximal(2).power(2)).unwrap(), 3);
        assert_eq!(h0_length(&ideal(&[&[1, 0]])).unwrap(), 0);
        assert!(h0_length(&MonomialIdeal::unit(2)).is_err());
    }

    #[test]
    fn estimate_for_mixed_ideal() {
        let e = epsilon_estimate(&ideal(&[&[2, 0], &[1, 1]]), 30).unwrap();
        for &(n, l) in &e.lengths {
            assert_eq!(l, (n as u64) * (n as u64 + 1) / 2);
        }
        assert!((e.estimate - 1.0).abs() < 0.05, "{}", e.estimate);
    }

    #[test]
    fn principal_ideal_has_no_torsion() {
        let e = epsilon_estimate(&ideal(&[&[1, 0]]), 10).unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn bound_check_on_maximal_ideal_is_tight() {
        let i = MonomialIdeal::maximal(2);
        let r = powers_report(&i, 8, Mode::Theorem, &PowersOptions::default()).unwrap();
        for v in filtration_bound_check(&i, 8, &r).unwrap() {
            assert!(v.pass);
            assert_eq!(v.length, v.bound);
        }
    }
}
