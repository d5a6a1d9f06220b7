//! Slow product oracle by dualizing the coproduct of the dual Steenrod
//! algebra. This is the calibration path for the Milnor product: the two
//! routes must agree wherever both are computed. It is exercised by the test
//! suite and by `verify`, never by production code paths.

use crate::milnor::{binom3, MilnorMonomial, SteenrodElement, P};
use gf3::{F3, ONE, ZERO};
use std::collections::BTreeMap;

/// Monomial of the dual algebra A_* = P[xi_1,...] (tensor) E[tau_0,...],
/// reusing the Milnor index data: mask = tau support, p = xi exponents.
type DualMono = MilnorMonomial;

/// parity of the topological degree
fn is_odd(m: &DualMono) -> bool {
    m.degree() % 2 == 1
}

/// product of dual monomials; zero when tau supports collide
fn dual_mul(a: &DualMono, b: &DualMono) -> Option<(DualMono, F3)> {
    if a.q_mask() & b.q_mask() != 0 {
        return None;
    }
    // sign: interleave-sort the tau's; count pairs (e in a, f in b) with e > f
    let mut inversions = 0u32;
    for f in b.q_indices() {
        inversions += (a.q_mask() >> (f + 1)).count_ones();
    }
    let mut p: Vec<u32> = a.p_part().to_vec();
    if p.len() < b.p_part().len() {
        p.resize(b.p_part().len(), 0);
    }
    for (k, &e) in b.p_part().iter().enumerate() {
        p[k] += e;
    }
    let q: Vec<u32> = (0..32)
        .filter(|i| (a.q_mask() | b.q_mask()) & (1u64 << i) != 0)
        .collect();
    let sign = if inversions % 2 == 0 { ONE } else { -ONE };
    Some((MilnorMonomial::new(&q, &p), sign))
}

/// element of A_* (tensor) A_*
#[derive(Clone, Default)]
struct Tensor {
    terms: BTreeMap<(DualMono, DualMono), F3>,
}

impl Tensor {
    fn unit() -> Tensor {
        let mut t = Tensor::default();
        t.terms
            .insert((MilnorMonomial::unit(), MilnorMonomial::unit()), ONE);
        t
    }

    fn add_term(&mut self, key: (DualMono, DualMono), c: F3) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert(ZERO);
        *e = *e + c;
        if e.is_zero() {
            let dead: Vec<_> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    /// Koszul-signed product: (u1 (x) v1) * (u2 (x) v2)
    ///   = (-1)^{|v1||u2|} (u1 u2) (x) (v1 v2)
    fn mul(&self, other: &Tensor) -> Tensor {
        let mut out = Tensor::default();
        for ((u1, v1), c1) in &self.terms {
            for ((u2, v2), c2) in &other.terms {
                let Some((u, su)) = dual_mul(u1, u2) else {
                    continue;
                };
                let Some((v, sv)) = dual_mul(v1, v2) else {
                    continue;
                };
                let koszul = if is_odd(v1) && is_odd(u2) { -ONE } else { ONE };
                out.add_term((u, v), *c1 * *c2 * su * sv * koszul);
            }
        }
        out
    }

    fn pow(&self, e: u32) -> Tensor {
        let mut out = Tensor::unit();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

/// coproduct of xi_k
fn psi_xi(k: u32) -> Tensor {
    let mut t = Tensor::default();
    for i in 0..=k {
        let left = if k == i {
            MilnorMonomial::unit()
        } else {
            let mut p = vec![0u32; (k - i) as usize];
            p[(k - i - 1) as usize] = P.pow(i);
            MilnorMonomial::new(&[], &p)
        };
        let right = if i == 0 {
            MilnorMonomial::unit()
        } else {
            let mut p = vec![0u32; i as usize];
            p[(i - 1) as usize] = 1;
            MilnorMonomial::new(&[], &p)
        };
        t.add_term((left, right), ONE);
    }
    t
}

/// coproduct of tau_k
fn psi_tau(k: u32) -> Tensor {
    let mut t = Tensor::default();
    t.add_term((MilnorMonomial::q_gen(k), MilnorMonomial::unit()), ONE);
    for i in 0..=k {
        let left = if k == i {
            MilnorMonomial::unit()
        } else {
            let mut p = vec![0u32; (k - i) as usize];
            p[(k - i - 1) as usize] = P.pow(i);
            MilnorMonomial::new(&[], &p)
        };
        t.add_term((left, MilnorMonomial::q_gen(i)), ONE);
    }
    t
}

/// full coproduct of a dual monomial
fn psi(m: &DualMono) -> Tensor {
    let mut t = Tensor::unit();
    for e in m.q_indices() {
        t = t.mul(&psi_tau(e));
    }
    for (k, &r) in m.p_part().iter().enumerate() {
        if r > 0 {
            t = t.mul(&psi_xi(k as u32 + 1).pow(r));
        }
    }
    t
}

/// Product of monomials by dualizing the coproduct:
///   <a b, w> = sum over terms u (x) v of psi(w) of <a,u><b,v>.
///
/// Frozen convention: the evaluation pairing carries no Koszul interchange
/// sign, which reproduces Milnor's classical structure constants (so
/// Q0 Q1 = +Q_{0,1} and Q1 = P^1 Q0 - Q0 P^1). Koszul signs appear only
/// inside the dual algebra's own multiplication.
pub fn oracle_product(a: &MilnorMonomial, b: &MilnorMonomial) -> SteenrodElement {
    let target = a.degree() + b.degree();
    let mut out = SteenrodElement::zero();
    // enumerate dual monomials of the target degree (same index data as the
    // full algebra's basis)
    let full = crate::algebra::Algebra::new(crate::algebra::QuotientAlgebra::Full);
    for w in full.basis(target).iter() {
        let cop = psi(w);
        let c = cop.terms.get(&(a.clone(), b.clone())).copied().unwrap_or(ZERO);
        out.add_term(w.clone(), c);
    }
    out
}

/// Verhoeff-style independent check of binom3 against Pascal recursion.
pub fn binom3_pascal(n: usize, k: usize) -> F3 {
    let mut row = vec![ONE];
    for _ in 0..n {
        let mut next = vec![ONE];
        for i in 1..row.len() {
            next.push(row[i - 1] + row[i]);
        }
        next.push(ONE);
        row = next;
    }
    row.get(k).copied().unwrap_or(ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milnor::monomial_product;

    #[test]
    fn binom_lucas_matches_pascal() {
        for n in 0..30 {
            for k in 0..=n {
                assert_eq!(
                    binom3(n as i64, k as i64),
                    binom3_pascal(n, k),
                    "binom({n},{k})"
                );
            }
        }
    }

    #[test]
    fn oracle_matches_milnor_product_low_degrees() {
        // every pair of basis monomials with total degree <= 14 (kept small
        // here; the full run to degree 20 lives in the integration suite)
        let full = crate::algebra::Algebra::new(crate::algebra::QuotientAlgebra::Full);
        for da in 0..=14u32 {
            for db in 0..=(14 - da) {
                for a in full.basis(da).iter() {
                    for b in full.basis(db).iter() {
                        let fast = monomial_product(a, b);
                        let slow = oracle_product(a, b);
                        assert_eq!(
                            fast, slow,
                            "product mismatch: {:?} * {:?}",
                            a, b
                        );
                    }
                }
            }
        }
    }
}
