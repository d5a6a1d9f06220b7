//! The mod-3 Milnor basis and its product.
//!
//! A basis element Q_E P^R is dual to the monomial tau_E xi^R in the dual
//! Steenrod algebra. The exterior support E is a bitmask, the polynomial
//! part R a trimmed exponent sequence (R[k] is the exponent of xi_{k+1}).
//! The product is Milnor's formula: exterior generators commute past the
//! polynomial part by absorbing p-th power contributions, and polynomial
//! parts multiply through the matrix rule with multinomial coefficients.
//! Signs come only from sorting the odd-degree Q's.

use gf3::{F3, ONE, ZERO};
use std::collections::BTreeMap;

pub const P: u32 = 3;

/// degree of tau_i
pub fn tau_degree(i: u32) -> u32 {
    2 * P.pow(i) - 1
}

/// degree of xi_k (k >= 1)
pub fn xi_degree(k: u32) -> u32 {
    2 * (P.pow(k) - 1)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MilnorMonomial {
    /// bitmask of the exterior support
    q: u64,
    /// exponents of xi_1, xi_2, ...; trailing zeros trimmed
    p: Vec<u32>,
}

impl MilnorMonomial {
    pub fn unit() -> MilnorMonomial {
        MilnorMonomial::default()
    }

    pub fn new(q_indices: &[u32], p_part: &[u32]) -> MilnorMonomial {
        let mut q = 0u64;
        for &i in q_indices {
            assert!(i < 32, "Q index out of supported range");
            assert!(q & (1 << i) == 0, "repeated Q index");
            q |= 1 << i;
        }
        let mut p = p_part.to_vec();
        while p.last() == Some(&0) {
            p.pop();
        }
        MilnorMonomial { q, p }
    }

    /// Q_i alone.
    pub fn q_gen(i: u32) -> MilnorMonomial {
        MilnorMonomial::new(&[i], &[])
    }

    /// P(r,0,0,...): the power operation P^r.
    pub fn p_power(r: u32) -> MilnorMonomial {
        MilnorMonomial::new(&[], &[r])
    }

    pub fn q_mask(&self) -> u64 {
        self.q
    }

    pub fn q_indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..32).filter(|i| self.q & (1u64 << i) != 0)
    }

    pub fn p_part(&self) -> &[u32] {
        &self.p
    }

    pub fn is_unit(&self) -> bool {
        self.q == 0 && self.p.is_empty()
    }

    pub fn degree(&self) -> u32 {
        let qd: u32 = self.q_indices().map(tau_degree).sum();
        let pd: u32 = self
            .p
            .iter()
            .enumerate()
            .map(|(k, &r)| r * xi_degree(k as u32 + 1))
            .sum();
        qd + pd
    }
}

impl std::fmt::Debug for MilnorMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for i in self.q_indices() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "Q{}", i)?;
            first = false;
        }
        if !self.p.is_empty() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "P(")?;
            for (k, r) in self.p.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", r)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// An F3-linear combination of Milnor basis monomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SteenrodElement {
    terms: BTreeMap<MilnorMonomial, F3>,
}

impl SteenrodElement {
    pub fn zero() -> SteenrodElement {
        SteenrodElement::default()
    }

    pub fn unit() -> SteenrodElement {
        SteenrodElement::from_monomial(MilnorMonomial::unit(), ONE)
    }

    pub fn from_monomial(m: MilnorMonomial, c: F3) -> SteenrodElement {
        let mut e = SteenrodElement::zero();
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: MilnorMonomial, c: F3) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&mut self, other: &SteenrodElement, c: F3) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), *v * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorMonomial, F3)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &MilnorMonomial) -> F3 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }
}

impl std::fmt::Debug for SteenrodElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            if *c != ONE {
                write!(f, "{}*", c)?;
            }
            write!(f, "{:?}", m)?;
            first = false;
        }
        Ok(())
    }
}

/// binomial coefficient mod 3 by Lucas' theorem
pub fn binom3(n: i64, k: i64) -> F3 {
    if k < 0 || n < 0 || k > n {
        return ZERO;
    }
    let (mut n, mut k) = (n, k);
    let mut r: u8 = 1;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % 3, k % 3);
        if kd > nd {
            return ZERO;
        }
        if nd == 2 && kd == 1 {
            r = (r * 2) % 3;
        }
        n /= 3;
        k /= 3;
    }
    F3::new(r as i64)
}

/// multinomial coefficient (sum of parts)! / (product of parts!) mod 3
pub fn multinomial3(parts: &[u32]) -> F3 {
    let mut total: i64 = 0;
    let mut r = ONE;
    for &p in parts {
        total += p as i64;
        r = r * binom3(total, p as i64);
        if r.is_zero() {
            return ZERO;
        }
    }
    r
}

struct PpartCtx<'a> {
    rows: usize,
    cols: usize,
    t: &'a [u32],
    x: Vec<Vec<u32>>,
    col_budget: Vec<u32>,
    results: Vec<(Vec<u32>, F3)>,
}

impl PpartCtx<'_> {
    fn finish(&mut self) {
        for jj in 1..=self.cols {
            self.x[0][jj] = self.col_budget[jj];
        }
        let mut out = vec![0u32; self.rows + self.cols];
        let mut coeff = ONE;
        for n in 1..=self.rows + self.cols {
            let mut diag = Vec::new();
            for ii in 0..=n.min(self.rows) {
                let jj = n - ii;
                if jj <= self.cols {
                    diag.push(self.x[ii][jj]);
                }
            }
            out[n - 1] = diag.iter().sum();
            coeff = coeff * multinomial3(&diag);
            if coeff.is_zero() {
                return;
            }
        }
        self.results.push((out, coeff));
    }

    fn rec(&mut self, i: usize, j: usize, row_left: u32) {
        if i > self.rows {
            self.finish();
            return;
        }
        if j > self.cols {
            self.x[i][0] = row_left;
            let next_left = *self.t.get(i).unwrap_or(&0);
            self.rec(i + 1, 1, next_left);
            self.x[i][0] = 0;
            return;
        }
        let weight = 3u32.pow(j as u32);
        let max = (row_left / weight).min(self.col_budget[j]);
        for v in 0..=max {
            self.x[i][j] = v;
            self.col_budget[j] -= v;
            self.rec(i, j + 1, row_left - v * weight);
            self.col_budget[j] += v;
            self.x[i][j] = 0;
        }
    }
}

/// Milnor matrix product of two polynomial parts: P(T) * P(S) as a sum of
/// (P-part, coefficient) pairs.
pub fn ppart_product(t: &[u32], s: &[u32]) -> Vec<(Vec<u32>, F3)> {
    let mut ctx = PpartCtx {
        rows: t.len(),
        cols: s.len(),
        t,
        x: vec![vec![0u32; s.len() + 1]; t.len() + 1],
        col_budget: std::iter::once(0).chain(s.iter().copied()).collect(),
        results: Vec::new(),
    };
    let first = *t.first().unwrap_or(&0);
    ctx.rec(1, 1, first);
    let mut merged: BTreeMap<Vec<u32>, F3> = BTreeMap::new();
    for (mut r, c) in ctx.results {
        while r.last() == Some(&0) {
            r.pop();
        }
        let e = merged.entry(r).or_insert(ZERO);
        *e = *e + c;
    }
    merged.retain(|_, c| !c.is_zero());
    merged.into_iter().collect()
}

/// Full Milnor product of two basis monomials over the whole algebra.
pub fn monomial_product(a: &MilnorMonomial, b: &MilnorMonomial) -> SteenrodElement {
    // Move the Q's of b leftwards past a's polynomial part; each step either
    // keeps the index (k = 0) or raises Q_f to Q_{f+k} while consuming 3^f
    // from position k of the polynomial part.
    let mut states: Vec<(F3, u64, Vec<u32>)> = vec![(ONE, a.q, a.p.clone())];
    for f in b.q_indices() {
        let power = 3u64.pow(f);
        let mut next: Vec<(F3, u64, Vec<u32>)> = Vec::new();
        for (sign, qset, ppart) in &states {
            for k in 0..=ppart.len() {
                let idx = f + k as u32;
                if idx >= 32 || qset & (1u64 << idx) != 0 {
                    continue;
                }
                let mut pp = ppart.clone();
                if k > 0 {
                    if (pp[k - 1] as u64) < power {
                        continue;
                    }
                    pp[k - 1] -= power as u32;
                    while pp.last() == Some(&0) {
                        pp.pop();
                    }
                }
                // sign: move the new Q past the larger members already present
                let larger = (qset >> (idx + 1)).count_ones();
                let s = if larger % 2 == 0 { *sign } else { -*sign };
                next.push((s, qset | (1u64 << idx), pp));
            }
        }
        states = next;
    }
    let mut out = SteenrodElement::zero();
    for (sign, qset, ppart) in states {
        for (pres, c) in ppart_product(&ppart, &b.p) {
            out.add_term(MilnorMonomial { q: qset, p: pres }, sign * c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gf3::TWO;

    #[test]
    fn degrees() {
        assert_eq!(MilnorMonomial::q_gen(0).degree(), 1);
        assert_eq!(MilnorMonomial::q_gen(1).degree(), 5);
        assert_eq!(MilnorMonomial::q_gen(2).degree(), 17);
        assert_eq!(MilnorMonomial::p_power(1).degree(), 4);
        assert_eq!(MilnorMonomial::new(&[], &[0, 1]).degree(), 16);
        assert_eq!(MilnorMonomial::new(&[], &[0, 0, 1]).degree(), 52);
    }

    #[test]
    fn q0_squares_to_zero() {
        let q0 = MilnorMonomial::q_gen(0);
        assert!(monomial_product(&q0, &q0).is_zero());
    }

    #[test]
    fn p1_squared_is_2p2() {
        let p1 = MilnorMonomial::p_power(1);
        let prod = monomial_product(&p1, &p1);
        let expected = SteenrodElement::from_monomial(MilnorMonomial::p_power(2), TWO);
        assert_eq!(prod, expected);
    }

    #[test]
    fn p2_p1_is_zero() {
        // the Adem relation behind the secondary operation of interest
        let p1 = MilnorMonomial::p_power(1);
        let p2 = MilnorMonomial::p_power(2);
        assert!(monomial_product(&p2, &p1).is_zero());
        assert!(monomial_product(&p1, &p2).is_zero());
    }

    #[test]
    fn q_commutation() {
        // P(1) Q0 = Q0 P(1) + Q1, so Q0 P(1) - P(1) Q0 = -Q1
        let q0 = MilnorMonomial::q_gen(0);
        let p1 = MilnorMonomial::p_power(1);
        let mut lhs = monomial_product(&q0, &p1);
        lhs.add(&monomial_product(&p1, &q0), TWO);
        let expected = SteenrodElement::from_monomial(MilnorMonomial::q_gen(1), TWO);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom3(2, 1), TWO);
        assert_eq!(binom3(3, 1), ZERO);
        assert_eq!(binom3(4, 2), ZERO);
        assert_eq!(binom3(4, 1), ONE);
        assert_eq!(multinomial3(&[1, 1]), TWO);
        assert_eq!(multinomial3(&[1, 2]), ZERO);
    }
}
