//! Newton polyhedra and integral closures of powers of monomial ideals.
//!
//! The closure of `I^n` is spanned by the monomials whose exponent lies in
//! `n·NP(I)`, where `NP(I) = conv(exponents of I) + R^d_{≥0}`. The polyhedron is
//! stored as integer half-spaces `a·e ≥ b` with `a ≥ 0`, so membership in any
//! dilation is an exact integer test.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{for_each_in_box, Monomial, MonomialIdeal};

pub const MAX_POLYHEDRON_VARS: usize = 6;

/// The half-space `normal · e ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub rhs: i64,
}

impl Facet {
    fn eval(&self, e: &[u32]) -> i128 {
        self.normal.iter().zip(e).map(|(&a, &x)| a as i128 * x as i128).sum()
    }

    /// `e ∈ n·H`.
    pub fn contains_dilated(&self, e: &[u32], n: u32) -> bool {
        self.eval(e) >= self.rhs as i128 * n as i128
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolyhedron {
    nvars: usize,
    vertices: Vec<Vec<u32>>,
    facets: Vec<Facet>,
}

impl NewtonPolyhedron {
    pub fn new(ideal: &MonomialIdeal) -> Result<Self> {
        newton_polyhedron(ideal)
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn vertices(&self) -> &[Vec<u32>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains_dilated(&self, e: &[u32], n: u32) -> bool {
        self.facets.iter().all(|f| f.contains_dilated(e, n))
    }

    /// Vertices of `n·NP`.
    pub fn dilated_vertices(&self, n: u32) -> Vec<Vec<u32>> {
        self.vertices.iter().map(|v| v.iter().map(|&x| x * n).collect()).collect()
    }

    /// Closure of `I^n`: the minimal lattice points of `n·NP`.
    pub fn closure_power(&self, n: u32) -> MonomialIdeal {
        if n == 0 {
            return MonomialIdeal::unit(self.nvars);
        }
        let bounds: Vec<u32> =
            (0..self.nvars).map(|i| n * self.vertices.iter().map(|v| v[i]).max().unwrap_or(0)).collect();
        let mut gens = Vec::new();
        let mut below = vec![0u32; self.nvars];
        for_each_in_box(&bounds, |e| {
            if !self.contains_dilated(e, n) {
                return;
            }
            // minimal iff no unit step down stays inside
            let minimal = (0..self.nvars).all(|i| {
                if e[i] == 0 {
                    return true;
                }
                below.copy_from_slice(e);
                below[i] -= 1;
                !self.contains_dilated(&below, n)
            });
            if minimal {
                gens.push(Monomial::from_slice(e));
            }
        });
        MonomialIdeal::new(self.nvars, gens)
    }
}

fn det(mut m: Vec<Vec<i128>>) -> i128 {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Integer normal to the hyperplane spanned by `d - 1` vectors in `Z^d`.
fn cross(vectors: &[Vec<i128>], d: usize) -> Vec<i128> {
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<i128>> = vectors
                .iter()
                .map(|v| v.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * det(minor)
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = *x * a - y * b;
                }
                let g = m[i].iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

/// Facets by direct enumeration: every facet of `conv(V) + orthant` is
/// spanned by a vertex and `d - 1` directions among edge vectors and unit
/// rays.
pub fn newton_polyhedron(ideal: &MonomialIdeal) -> Result<NewtonPolyhedron> {
    let d = ideal.num_vars();
    if d > MAX_POLYHEDRON_VARS {
        return Err(Error::TooManyVariables(d, MAX_POLYHEDRON_VARS));
    }
    if ideal.is_zero() {
        return Err(Error::DegenerateIdeal("the Newton polyhedron of the zero ideal is empty"));
    }
    let points: Vec<Vec<i128>> =
        ideal.generators().iter().map(|g| g.exponents().iter().map(|&x| x as i128).collect()).collect();
    let units: Vec<Vec<i128>> = (0..d).map(|j| (0..d).map(|i| (i == j) as i128).collect()).collect();

    let mut facets = BTreeSet::new();
    for v0 in &points {
        let mut dirs: Vec<Vec<i128>> =
            points.iter().filter(|p| *p != v0).map(|p| p.iter().zip(v0).map(|(a, b)| a - b).collect()).collect();
        dirs.extend(units.iter().cloned());
        for combo in dirs.iter().combinations(d - 1) {
            let rows: Vec<Vec<i128>> = combo.into_iter().cloned().collect();
            let mut a = if d == 1 { vec![1] } else { cross(&rows, d) };
            let g = a.iter().fold(0, |g, &x| gcd(g, x));
            if g == 0 {
                continue;
            }
            a.iter_mut().for_each(|x| *x /= g);
            if a.iter().any(|&x| x < 0) {
                a.iter_mut().for_each(|x| *x = -*x);
            }
            if a.iter().any(|&x| x < 0) {
                continue;
            }
            let b: i128 = a.iter().zip(v0).map(|(x, y)| x * y).sum();
            let supporting = points.iter().all(|p| a.iter().zip(p).map(|(x, y)| x * y).sum::<i128>() >= b);
            if supporting {
                let normal = a.iter().map(|&x| i64::try_from(x).expect("facet coefficient overflow")).collect();
                facets.insert(Facet { normal, rhs: i64::try_from(b).expect("facet offset overflow") });
            }
        }
    }
    // keep only genuine facets: a facet's tight points plus rays span a hyperplane
    let facets: Vec<Facet> = facets
        .into_iter()
        .filter(|f| {
            let tight: Vec<&Vec<i128>> = points
                .iter()
                .filter(|p| f.normal.iter().zip(p.iter()).map(|(&a, &x)| a as i128 * x).sum::<i128>() == f.rhs as i128)
                .collect();
            let mut rows: Vec<Vec<i128>> =
                tight.iter().skip(1).map(|p| p.iter().zip(tight[0]).map(|(a, b)| a - b).collect()).collect();
            rows.extend(units.iter().enumerate().filter(|(j, _)| f.normal[*j] == 0).map(|(_, u)| u.clone()));
            !tight.is_empty() && rank(&rows) == d - 1
        })
        .collect();

    let normals: Vec<(Vec<i128>, i128)> =
        facets.iter().map(|f| (f.normal.iter().map(|&x| x as i128).collect(), f.rhs as i128)).collect();
    let vertices = points
        .iter()
        .filter(|p| {
            let tight: Vec<Vec<i128>> = normals
                .iter()
                .filter(|(a, b)| a.iter().zip(p.iter()).map(|(x, y)| x * y).sum::<i128>() == *b)
                .map(|(a, _)| a.clone())
                .collect();
            rank(&tight) == d
        })
        .map(|p| p.iter().map(|&x| x as u32).collect())
        .collect();
    Ok(NewtonPolyhedron { nvars: d, vertices, facets })
}

/// Closure of `I^n`.
pub fn integral_closure_power(ideal: &MonomialIdeal, n: u32) -> Result<MonomialIdeal> {
    Ok(newton_polyhedron(ideal)?.closure_power(n))
}

/// A dilation `K` such that every point of `NP` with rational coordinates
/// lies in `(1/K)`-lattice combinations: the lcm of the nonzero maximal
/// minors of the homogenized vertex and ray matrix.
pub fn denominator_bound(np: &NewtonPolyhedron) -> u64 {
    let d = np.nvars;
    let mut cols: Vec<Vec<i128>> =
        np.vertices.iter().map(|v| v.iter().map(|&x| x as i128).chain([1]).collect()).collect();
    cols.extend((0..d).map(|j| (0..=d).map(|i| (i == j) as i128).collect()));
    let mut k: i128 = 1;
    for combo in cols.iter().combinations(d + 1) {
        let m: Vec<Vec<i128>> = combo.into_iter().cloned().collect();
        let v = det(m).abs();
        if v != 0 {
            k = k / gcd(k, v) * v;
        }
    }
    u64::try_from(k).expect("denominator bound overflow")
}

/// Least `l <= l_max` with `closure(I^l)^n = closure(I^{ln})` for all
/// `n <= n_max`.
pub fn noetherian_exponent(ideal: &MonomialIdeal, l_max: u32, n_max: u32) -> Result<u32> {
    let np = newton_polyhedron(ideal)?;
    let mut best = (0, 0);
    for l in 1..=l_max {
        let base = np.closure_power(l);
        let mut power = MonomialIdeal::unit(ideal.num_vars());
        let mut verified = 0;
        for n in 1..=n_max {
            power = power.product(&base);
            if power != np.closure_power(l * n) {
                break;
            }
            verified = n;
        }
        if verified == n_max {
            return Ok(l);
        }
        if verified > best.1 {
            best = (l, verified);
        }
    }
    Err(Error::ExponentNotFound { l_max, best_l: best.0, verified_through: best.1 })
}

/// Least `k` with `closure(I^m) ⊆ I^{m-k}` for every `m <= m_max`.
pub fn rees_cofinality_constant(ideal: &MonomialIdeal, m_max: u32) -> Result<u32> {
    if !ideal.is_proper() || ideal.is_zero() {
        return Err(Error::DegenerateIdeal("cofinality needs a proper nonzero ideal"));
    }
    let np = newton_polyhedron(ideal)?;
    let powers: Vec<MonomialIdeal> = (0..=m_max).map(|j| ideal.power(j)).collect();
    let mut k = 0;
    for m in 1..=m_max {
        let cl = np.closure_power(m);
        let deepest = (0..=m).rev().find(|&j| cl.is_subset(&powers[j as usize])).expect("I^0 is the unit ideal");
        k = k.max(m - deepest);
    }
    Ok(k)
}

/// Whether `u^k ∈ I^{nk}` for some `1 <= k <= k_max`.
pub fn valuation_member(ideal: &MonomialIdeal, u: &Monomial, n: u32, k_max: u32) -> bool {
    (1..=k_max).any(|k| ideal.power(n * k).contains(&u.pow(k)))
}
