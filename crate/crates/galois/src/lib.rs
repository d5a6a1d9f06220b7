//! Desk-scale checks of the order-24 group action on F9[u^{+-1}, b2]:
//! generator formulas, the invariant ring, and the right-unit identities
//! of the associated Hopf algebroid.

use gf3::{Mat, RowSolver, F3, ONE, TWO, ZERO};
use std::collections::BTreeMap;

/// The field with nine elements: a + b*w where w^2 + w + 2 = 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct F9 {
    pub a: F3,
    pub b: F3,
}

pub const F9_ZERO: F9 = F9 { a: ZERO, b: ZERO };
pub const F9_ONE: F9 = F9 { a: ONE, b: ZERO };
/// the chosen primitive eighth root of unity
pub const OMEGA: F9 = F9 { a: ZERO, b: ONE };

impl F9 {
    pub fn new(a: i64, b: i64) -> F9 {
        F9 {
            a: F3::new(a),
            b: F3::new(b),
        }
    }

    pub fn is_zero(self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Frobenius x -> x^3
    pub fn frobenius(self) -> F9 {
        // (a + b w)^3 = a + b w^3, and w^3 = 2w + 2
        F9 {
            a: self.a + TWO * self.b,
            b: TWO * self.b,
        }
    }

    pub fn pow(self, mut e: i64) -> F9 {
        // the multiplicative group has order 8
        e = e.rem_euclid(8);
        let mut r = F9_ONE;
        for _ in 0..e {
            r = r * self;
        }
        r
    }

    fn scale_f3(self, c: F3) -> F9 {
        F9 {
            a: self.a * c,
            b: self.b * c,
        }
    }
}

impl std::ops::Add for F9 {
    type Output = F9;
    fn add(self, o: F9) -> F9 {
        F9 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl std::ops::Neg for F9 {
    type Output = F9;
    fn neg(self) -> F9 {
        F9 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl std::ops::Sub for F9 {
    type Output = F9;
    fn sub(self, o: F9) -> F9 {
        self + (-o)
    }
}

impl std::ops::Mul for F9 {
    type Output = F9;
    fn mul(self, o: F9) -> F9 {
        // w^2 = 2w + 1 (from w^2 + w + 2 = 0 over F3)
        let (a1, b1, a2, b2) = (self.a, self.b, o.a, o.b);
        F9 {
            a: a1 * a2 + b1 * b2,
            b: a1 * b2 + b1 * a2 + TWO * (b1 * b2),
        }
    }
}

impl std::fmt::Debug for F9 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}+{}w)", self.a, self.b)
    }
}

/// element of F9[u^{+-1}, b2, r]; keys are (u exponent, b2 exponent, r
/// exponent). The plain two-variable algebra uses r-exponent 0.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Poly {
    pub terms: BTreeMap<(i32, u32, u32), F9>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn term(i: i32, j: u32, k: u32, c: F9) -> Poly {
        let mut p = Poly::zero();
        p.add_term((i, j, k), c);
        p
    }

    pub fn monomial(i: i32, j: u32, c: F9) -> Poly {
        Poly::term(i, j, 0, c)
    }

    pub fn add_term(&mut self, key: (i32, u32, u32), c: F9) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert(F9_ZERO);
        *e = *e + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (&k, &c) in &o.terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn neg(&self) -> Poly {
        let mut p = Poly::zero();
        for (&k, &c) in &self.terms {
            p.add_term(k, -c);
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (&(i1, j1, k1), &c1) in &self.terms {
            for (&(i2, j2, k2), &c2) in &o.terms {
                p.add_term((i1 + i2, j1 + j2, k1 + k2), c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut p = Poly::term(0, 0, 0, F9_ONE);
        for _ in 0..e {
            p = p.mul(self);
        }
        p
    }

    pub fn scale(&self, c: F9) -> Poly {
        let mut p = Poly::zero();
        for (&k, &v) in &self.terms {
            p.add_term(k, v * c);
        }
        p
    }
}

/// u as a polynomial
pub fn u() -> Poly {
    Poly::monomial(1, 0, F9_ONE)
}

/// b2 as a polynomial
pub fn b2() -> Poly {
    Poly::monomial(0, 1, F9_ONE)
}

/// a4 = w^2 u^{-4}
pub fn a4() -> Poly {
    Poly::monomial(-4, 0, OMEGA.pow(2))
}

/// a4^{-1} = w^{-2} u^4
pub fn a4_inv() -> Poly {
    Poly::monomial(4, 0, OMEGA.pow(6))
}

/// a6 = b2^3 - w^2 b2 u^{-4}
pub fn a6() -> Poly {
    b2().pow(3).sub(&Poly::monomial(-4, 1, OMEGA.pow(2)))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Generator {
    S,
    T,
    Psi,
}

/// Apply a group generator: a ring endomorphism determined by its values on
/// u and b2; psi is semilinear over the Frobenius.
pub fn act(g: Generator, x: &Poly) -> Poly {
    let (b2_img, semilinear) = match g {
        Generator::S => (b2().add(&Poly::monomial(-2, 0, OMEGA)), false),
        Generator::T => (b2(), false),
        Generator::Psi => (b2(), true),
    };
    // u maps to (unit scalar) * u, so negative powers are immediate
    let u_unit = match g {
        Generator::S => F9_ONE,
        Generator::T => OMEGA.pow(2),
        Generator::Psi => OMEGA,
    };
    let mut out = Poly::zero();
    for (&(i, j, k), &c) in &x.terms {
        assert_eq!(k, 0, "group action is defined on F9[u^(+-1), b2]");
        let coeff = if semilinear { c.frobenius() } else { c };
        let term = b2_img
            .pow(j)
            .mul(&Poly::monomial(i, 0, u_unit.pow(i as i64)))
            .scale(coeff);
        out = out.add(&term);
    }
    out
}

/// Orders: s^3 = t^4 = 1 and psi^2 = t^2 on the whole algebra (checked on
/// the generators u, b2, and scalars, which determine the action).
pub fn check_generator_orders() -> Result<(), String> {
    let probes = [u(), b2(), Poly::monomial(0, 0, OMEGA)];
    for p in &probes {
        let mut s3 = p.clone();
        for _ in 0..3 {
            s3 = act(Generator::S, &s3);
        }
        if &s3 != p {
            return Err("s^3 is not the identity".into());
        }
        let mut t4 = p.clone();
        for _ in 0..4 {
            t4 = act(Generator::T, &t4);
        }
        if &t4 != p {
            return Err("t^4 is not the identity".into());
        }
        let psi2 = act(Generator::Psi, &act(Generator::Psi, p));
        let t2 = act(Generator::T, &act(Generator::T, p));
        if psi2 != t2 {
            return Err("psi^2 differs from t^2".into());
        }
    }
    Ok(())
}

/// Monomials of internal degree d (|u| = -2, |b2| = 4) with b2-exponent at
/// most m. The degree pins the u-exponent per b2-exponent, and the group
/// action preserves this finite window (it never raises the b2-exponent),
/// so kernels computed here are exact.
fn degree_basis(d: i64, m: u32) -> Vec<(i32, u32)> {
    let mut out = Vec::new();
    for j in 0..=m {
        let num = 4 * j as i64 - d;
        if num % 2 != 0 {
            continue;
        }
        out.push(((num / 2) as i32, j));
    }
    out
}

fn poly_to_f3(p: &Poly, basis: &[(i32, u32)]) -> Option<Vec<F3>> {
    let mut v = vec![ZERO; 2 * basis.len()];
    for (&(i, j, k), &c) in &p.terms {
        if k != 0 {
            return None;
        }
        let pos = basis.iter().position(|&(bi, bj)| bi == i && bj == j)?;
        v[2 * pos] = c.a;
        v[2 * pos + 1] = c.b;
    }
    Some(v)
}

/// All invariants of degree d within the working truncation, as F3-basis
/// polynomials: the simultaneous kernel of (s - 1, t - 1, psi - 1).
pub fn invariant_basis(d: i64) -> Vec<Poly> {
    let m = 9;
    let dom = degree_basis(d, m);
    let cod = dom.clone();
    if dom.is_empty() {
        return Vec::new();
    }
    let mut mat = Mat::zero(2 * dom.len(), 3 * 2 * cod.len());
    for (pos, &(i, j)) in dom.iter().enumerate() {
        for (which, coef) in [(0usize, F9_ONE), (1, OMEGA)] {
            let x = Poly::monomial(i, j, coef);
            let row = 2 * pos + which;
            for (gi, g) in [Generator::S, Generator::T, Generator::Psi]
                .into_iter()
                .enumerate()
            {
                let img = act(g, &x).sub(&x);
                let v = poly_to_f3(&img, &cod).expect("codomain truncation too small");
                for (c, val) in v.into_iter().enumerate() {
                    if !val.is_zero() {
                        mat.set(row, gi * 2 * cod.len() + c, val);
                    }
                }
            }
        }
    }
    let solver = RowSolver::new(&mat);
    solver
        .kernel_rows()
        .iter()
        .map(|krow| {
            let mut p = Poly::zero();
            for (idx, c) in krow.iter_nonzero() {
                let (pos, which) = (idx / 2, idx % 2);
                let (i, j) = dom[pos];
                let coef = if which == 0 { F9_ONE } else { OMEGA };
                p.add_term((i, j, 0), coef.scale_f3(c));
            }
            p
        })
        .collect()
}

pub fn invariant_dimension(d: i64) -> usize {
    invariant_basis(d).len()
}

/// Number of monomials a4^m a6^n (m any integer, n >= 0) of degree d whose
/// b2-support fits the same window used by `invariant_basis`.
pub fn invariant_monomial_count(d: i64) -> usize {
    let m = 9i64;
    (0..=m / 3)
        .filter(|n| (d - 12 * n).rem_euclid(8) == 0)
        .count()
}

/// The right unit: b2 -> b2 + r, u -> u, scalars fixed.
pub fn right_unit(x: &Poly) -> Poly {
    let b2r = b2().add(&Poly::term(0, 0, 1, F9_ONE));
    let mut out = Poly::zero();
    for (&(i, j, k), &c) in &x.terms {
        assert_eq!(k, 0);
        let term = Poly::term(i, 0, 0, c).mul(&b2r.pow(j));
        out = out.add(&term);
    }
    out
}

#[derive(Debug)]
pub struct RightUnitReport {
    pub a4_fixed: bool,
    pub a6_formula: bool,
    pub multiplicative: bool,
}

impl RightUnitReport {
    pub fn pass(&self) -> bool {
        self.a4_fixed && self.a6_formula && self.multiplicative
    }
}

/// Verify the right-unit identities: a4 -> a4 and a6 -> a6 - a4 r + r^3,
/// plus multiplicativity on the product a4 a6.
pub fn right_unit_check() -> RightUnitReport {
    let r = Poly::term(0, 0, 1, F9_ONE);
    let a4_fixed = right_unit(&a4()) == a4();
    let expected_a6 = a6().sub(&a4().mul(&r)).add(&r.pow(3));
    let a6_formula = right_unit(&a6()) == expected_a6;
    let prod = a4().mul(&a6());
    let multiplicative = right_unit(&prod) == right_unit(&a4()).mul(&right_unit(&a6()));
    RightUnitReport {
        a4_fixed,
        a6_formula,
        multiplicative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_satisfies_defining_relation_and_order() {
        let w = OMEGA;
        assert!((w * w + w + F9::new(2, 0)).is_zero());
        let mut p = F9_ONE;
        for k in 1..=8 {
            p = p * w;
            if k < 8 {
                assert_ne!(p, F9_ONE, "order divides {k}");
            }
        }
        assert_eq!(p, F9_ONE);
    }

    #[test]
    fn frobenius_is_cube() {
        for a in 0..3 {
            for b in 0..3 {
                let x = F9::new(a, b);
                assert_eq!(x.frobenius(), x * x * x);
            }
        }
    }

    #[test]
    fn generator_formulas() {
        let sb2 = act(Generator::S, &b2());
        assert_eq!(sb2, b2().add(&Poly::monomial(-2, 0, OMEGA)));
        assert_eq!(act(Generator::T, &b2()), b2());
        assert_eq!(
            act(Generator::T, &u()),
            Poly::monomial(1, 0, OMEGA.pow(2))
        );
        let c = Poly::monomial(0, 0, OMEGA);
        assert_eq!(
            act(Generator::Psi, &c),
            Poly::monomial(0, 0, OMEGA.frobenius())
        );
    }

    #[test]
    fn orders() {
        check_generator_orders().unwrap();
    }

    #[test]
    fn a4_a6_invariant() {
        for g in [Generator::S, Generator::T, Generator::Psi] {
            assert_eq!(act(g, &a4()), a4(), "a4 under {:?}", g);
            assert_eq!(act(g, &a6()), a6(), "a6 under {:?}", g);
            assert_eq!(act(g, &a4_inv()), a4_inv(), "a4 inverse under {:?}", g);
        }
        assert_eq!(a4().mul(&a4_inv()), Poly::term(0, 0, 0, F9_ONE));
    }

    #[test]
    fn invariant_dims_match_monomials() {
        for d in -16..=24 {
            assert_eq!(
                invariant_dimension(d),
                invariant_monomial_count(d),
                "degree {d}"
            );
        }
    }

    #[test]
    fn invariants_multiply() {
        let b8 = invariant_basis(8);
        let b12 = invariant_basis(12);
        assert!(!b8.is_empty() && !b12.is_empty());
        for x in &b8 {
            for y in &b12 {
                let p = x.mul(y);
                for g in [Generator::S, Generator::T, Generator::Psi] {
                    assert_eq!(act(g, &p), p);
                }
            }
        }
    }

    #[test]
    fn right_unit_identities() {
        let rep = right_unit_check();
        assert!(rep.a4_fixed, "a4 should be fixed by the right unit");
        assert!(rep.a6_formula, "a6 -> a6 - a4 r + r^3");
        assert!(rep.multiplicative);
    }
}
