//! Multivariate polynomials over ℚ and a solver for small polynomial systems.
//!
//! The solver linearizes: each non-constant monomial becomes an unknown and the
//! system becomes linear. Every real solution of the original system maps into
//! the affine solution set of the linearization, so
//!
//! * an infeasible linearization proves the system has no real solution, and
//! * a linear combination of monomials that is constant on the affine set is
//!   implied by the system.
//!
//! [`PolySystem::solve_finite`] iterates this (a forced `x² = 0` gives `x = 0`)
//! and finally enumerates sign choices, checking every candidate exactly.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Field, Q};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Poly {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars, "variable {i} out of range");
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(m, Q::one());
        p
    }

    pub fn monomial(exponents: Monomial, c: Q) -> Poly {
        let mut p = Poly::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Q::int(-1))
    }

    pub fn scale(&self, s: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.mul(cb));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().fold(Q::zero(), |acc, (m, c)| {
            let v = m.iter().zip(point).fold(c.clone(), |t, (&e, x)| t.mul(&x.pow(e)));
            acc.add(&v)
        })
    }

    /// Replaces variable `i` by the constant `value`.
    pub fn substitute(&self, i: usize, value: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = std::mem::replace(&mut m2[i], 0);
            out.add_term(m2, c.mul(&value.pow(e)));
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                    .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Affine solution set of the linearized system.
#[derive(Debug, Clone)]
pub struct Relaxation {
    monomials: Vec<Monomial>,
    particular: Vec<Q>,
    directions: Vec<Vec<Q>>,
}

impl Relaxation {
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Dimension of the affine solution set.
    pub fn freedom(&self) -> usize {
        self.directions.len()
    }

    /// If `functional` (a polynomial whose monomials all occur in the system)
    /// takes one value on the whole solution set, returns it.
    pub fn implied_value(&self, functional: &Poly) -> Option<Q> {
        let nvars = functional.nvars();
        let zero = vec![0; nvars];
        let mut coeffs = vec![Q::zero(); self.monomials.len()];
        let mut value = Q::zero();
        for (m, c) in functional.terms() {
            if *m == zero {
                value = value.add(c);
                continue;
            }
            let idx = self.monomials.iter().position(|x| x == m)?;
            coeffs[idx] = c.clone();
        }
        for d in &self.directions {
            if !crate::linalg::dot(&coeffs, d).is_zero() {
                return None;
            }
        }
        Some(value.add(&crate::linalg::dot(&coeffs, &self.particular)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSet {
    Empty,
    Points(Vec<Vec<Q>>),
}

#[derive(Debug, Clone)]
pub struct PolySystem {
    nvars: usize,
    equations: Vec<Poly>,
}

impl PolySystem {
    pub fn new(nvars: usize, equations: Vec<Poly>) -> Result<PolySystem> {
        if equations.iter().any(|e| e.nvars() != nvars) {
            return Err(Error::Dimension("equation over a different variable set".into()));
        }
        Ok(PolySystem {
            nvars,
            equations: equations.into_iter().filter(|e| !e.is_zero()).collect(),
        })
    }

    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn is_satisfied_by(&self, point: &[Q]) -> bool {
        self.equations.iter().all(|e| e.eval(point).is_zero())
    }

    fn substitute(&self, i: usize, value: &Q) -> PolySystem {
        PolySystem {
            nvars: self.nvars,
            equations: self
                .equations
                .iter()
                .map(|e| e.substitute(i, value))
                .filter(|e| !e.is_zero())
                .collect(),
        }
    }

    /// Linearization; `Ok(None)` when even the linear system is infeasible.
    pub fn relax(&self) -> Result<Option<Relaxation>> {
        let zero = vec![0; self.nvars];
        let mut monomials: Vec<Monomial> = self
            .equations
            .iter()
            .flat_map(|e| e.terms().map(|(m, _)| m.clone()))
            .filter(|m| *m != zero)
            .collect();
        monomials.sort();
        monomials.dedup();
        if self.equations.is_empty() || monomials.is_empty() {
            // Only constants: feasible iff every equation is identically zero.
            return Ok(self.equations.is_empty().then(|| Relaxation {
                particular: vec![Q::zero(); monomials.len()],
                directions: identity_rows(monomials.len()),
                monomials,
            }));
        }
        let rows: Vec<Vec<Q>> = self
            .equations
            .iter()
            .map(|e| {
                monomials
                    .iter()
                    .map(|m| {
                        e.terms()
                            .find(|(x, _)| *x == m)
                            .map_or_else(Q::zero, |(_, c)| c.clone())
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<Q> = self.equations.iter().map(|e| e.constant_term().neg()).collect();
        let a = Matrix::from_rows(rows)?;
        let Some(particular) = a.solve(&rhs)? else {
            return Ok(None);
        };
        Ok(Some(Relaxation {
            directions: a.nullspace(),
            particular,
            monomials,
        }))
    }

    /// All real solutions, provided the linearization pins each variable up to sign.
    pub fn solve_finite(&self) -> Result<SolutionSet> {
        let mut fixed: Vec<Option<Q>> = vec![None; self.nvars];
        let mut system = self.clone();
        loop {
            let Some(relax) = system.relax()? else {
                return Ok(SolutionSet::Empty);
            };
            let mut changed = false;
            for v in 0..self.nvars {
                if fixed[v].is_some() {
                    continue;
                }
                let pinned = relax
                    .implied_value(&Poly::var(self.nvars, v))
                    .or_else(|| relax.implied_value(&square_of(self.nvars, v)).filter(Q::is_zero));
                if let Some(value) = pinned {
                    system = system.substitute(v, &value);
                    fixed[v] = Some(value);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let Some(relax) = system.relax()? else {
            return Ok(SolutionSet::Empty);
        };
        let mut candidates: Vec<Vec<Q>> = Vec::with_capacity(self.nvars);
        for (v, f) in fixed.iter().enumerate() {
            if let Some(x) = f {
                candidates.push(vec![x.clone()]);
                continue;
            }
            if let Some(x) = relax.implied_value(&Poly::var(self.nvars, v)) {
                candidates.push(vec![x]);
                continue;
            }
            let sq = relax
                .implied_value(&square_of(self.nvars, v))
                .ok_or_else(|| Error::Underdetermined(format!("x{v} is not pinned")))?;
            let root = sq
                .sqrt()
                .ok_or_else(|| Error::Underdetermined(format!("x{v}^2 = {sq} has no rational root")))?;
            candidates.push(if root.is_zero() {
                vec![root]
            } else {
                vec![root.neg(), root]
            });
        }
        let mut points: Vec<Vec<Q>> = cartesian(&candidates)
            .into_iter()
            .filter(|p| self.is_satisfied_by(p))
            .collect();
        points.sort();
        Ok(if points.is_empty() {
            SolutionSet::Empty
        } else {
            SolutionSet::Points(points)
        })
    }
}

fn square_of(nvars: usize, v: usize) -> Poly {
    let mut m = vec![0; nvars];
    m[v] = 2;
    Poly::monomial(m, Q::one())
}

fn identity_rows(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

fn cartesian(choices: &[Vec<Q>]) -> Vec<Vec<Q>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(2, Q::int(v))
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = x(0).mul(&x(0)).add(&x(1).scale(&Q::int(3))).sub(&c(2));
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&[Q::int(2), Q::int(1)]), Q::int(5));
        assert_eq!(p.substitute(0, &Q::int(1)).eval(&[Q::int(99), Q::int(1)]), Q::int(2));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn circle_meets_line() {
        // x² + y² = 1, x = 0
        let sys = PolySystem::new(2, vec![x(0).mul(&x(0)).add(&x(1).mul(&x(1))).sub(&c(1)), x(0)]).unwrap();
        assert_eq!(
            sys.solve_finite().unwrap(),
            SolutionSet::Points(vec![vec![Q::int(0), Q::int(-1)], vec![Q::int(0), Q::int(1)]])
        );
    }

    #[test]
    fn infeasible_relaxation_is_empty() {
        // x² = 1, x² = 2
        let sq = x(0).mul(&x(0));
        let sys = PolySystem::new(2, vec![sq.sub(&c(1)), sq.sub(&c(2))]).unwrap();
        assert!(sys.relax().unwrap().is_none());
        assert_eq!(sys.solve_finite().unwrap(), SolutionSet::Empty);
    }

    #[test]
    fn sign_coupling_filters_candidates() {
        // x² = 1, y² = 1, xy = 1  → (1,1), (−1,−1)
        let sys = PolySystem::new(
            2,
            vec![
                x(0).mul(&x(0)).sub(&c(1)),
                x(1).mul(&x(1)).sub(&c(1)),
                x(0).mul(&x(1)).sub(&c(1)),
            ],
        )
        .unwrap();
        assert_eq!(
            sys.solve_finite().unwrap(),
            SolutionSet::Points(vec![vec![Q::int(-1), Q::int(-1)], vec![Q::int(1), Q::int(1)]])
        );
    }

    #[test]
    fn circle_alone_is_underdetermined_but_implies_its_equation() {
        let circle = x(0).mul(&x(0)).add(&x(1).mul(&x(1))).sub(&c(1));
        let sys = PolySystem::new(2, vec![circle.clone()]).unwrap();
        assert!(matches!(sys.solve_finite(), Err(Error::Underdetermined(_))));
        let r = sys.relax().unwrap().unwrap();
        assert_eq!(r.implied_value(&circle.add(&c(1))), Some(Q::int(1)));
        assert_eq!(r.implied_value(&x(0).mul(&x(0))), None);
    }

    #[test]
    fn irrational_roots_are_reported() {
        let sys = PolySystem::new(2, vec![x(0).mul(&x(0)).sub(&c(2)), x(1)]).unwrap();
        assert!(matches!(sys.solve_finite(), Err(Error::Underdetermined(_))));
    }
}
