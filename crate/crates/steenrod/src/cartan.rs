//! Evaluation of the Cartan formula for the secondary operation attached to
//! the relation P^2 P^1 = 0 on classes of a tensor square.
//!
//! On product classes the value is
//!   phi(x (x) y) = phi(x) y + x phi(y)
//!               + (P^1 b x)(b P^1 b y) + (b P^1 b x)(P^1 b y)
//! with b the Bockstein. Classes that are Bockstein images rather than lying
//! in ker P^1 are evaluated through the Bockstein compatibility
//!   phi(b z) = b phi(z) - P^2 z.

use crate::milnor::MilnorMonomial;
use crate::module::ModulePresentation;
use gf3::{F3, ONE, TWO, ZERO};
use std::collections::BTreeMap;

pub type TensorClass = Vec<((usize, usize), F3)>;

pub struct CartanInput<'a> {
    pub left: &'a ModulePresentation,
    pub right: &'a ModulePresentation,
    /// declared phi on factor basis elements (defaults to zero); each value
    /// must raise degree by exactly `phi_degree`
    pub phi_left: BTreeMap<usize, Vec<(usize, F3)>>,
    pub phi_right: BTreeMap<usize, Vec<(usize, F3)>>,
}

/// internal degree raised by phi: |P^2 P^1| - 1
pub const PHI_DEGREE: u32 = 11;

fn add_into(acc: &mut BTreeMap<(usize, usize), F3>, key: (usize, usize), c: F3) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(key).or_insert(ZERO);
    *e = *e + c;
    if e.is_zero() {
        acc.remove(&key);
    }
}

fn chain(
    module: &ModulePresentation,
    ops: &[MilnorMonomial],
    idx: usize,
) -> Vec<(usize, F3)> {
    let mut cur = vec![(idx, ONE)];
    for op in ops {
        let table = module.action_of(op);
        let mut next: BTreeMap<usize, F3> = BTreeMap::new();
        for &(i, c) in &cur {
            for &(t, ct) in &table[i] {
                let e = next.entry(t).or_insert(ZERO);
                *e = *e + c * ct;
            }
        }
        cur = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    cur
}

impl CartanInput<'_> {
    fn validate(&self) -> Result<(), String> {
        for (side, module, phi) in [
            ("left", self.left, &self.phi_left),
            ("right", self.right, &self.phi_right),
        ] {
            for (&src, combo) in phi {
                for &(tgt, c) in combo {
                    if c.is_zero() {
                        continue;
                    }
                    if module.degree(tgt) != module.degree(src) + PHI_DEGREE {
                        return Err(format!(
                            "declared phi value on the {side} factor violates \
                             degrees: {} -> {}",
                            module.id(src),
                            module.id(tgt)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Thomas' Cartan formula, termwise on the class.
    pub fn thomas_formula(&self, class: &TensorClass) -> Result<TensorClass, String> {
        self.validate()?;
        let q0 = MilnorMonomial::q_gen(0);
        let p1 = MilnorMonomial::p_power(1);
        let b = [q0.clone()];
        let p1b = [q0.clone(), p1.clone()];
        let bp1b = [q0.clone(), p1.clone(), q0.clone()];
        let mut acc: BTreeMap<(usize, usize), F3> = BTreeMap::new();
        let empty: Vec<(usize, F3)> = Vec::new();
        for &((x, y), c) in class {
            // phi(x) y
            for &(t, cp) in self.phi_left.get(&x).unwrap_or(&empty) {
                add_into(&mut acc, (t, y), c * cp);
            }
            // x phi(y)
            for &(t, cp) in self.phi_right.get(&y).unwrap_or(&empty) {
                add_into(&mut acc, (x, t), c * cp);
            }
            let _ = &b;
            // (P^1 b x)(b P^1 b y)
            for &(tx, cx) in &chain(self.left, &p1b, x) {
                for &(ty, cy) in &chain(self.right, &bp1b, y) {
                    add_into(&mut acc, (tx, ty), c * cx * cy);
                }
            }
            // (b P^1 b x)(P^1 b y)
            for &(tx, cx) in &chain(self.left, &bp1b, x) {
                for &(ty, cy) in &chain(self.right, &p1b, y) {
                    add_into(&mut acc, (tx, ty), c * cx * cy);
                }
            }
        }
        Ok(acc.into_iter().collect())
    }

    /// graded Bockstein on the tensor square
    fn tensor_bockstein(&self, class: &TensorClass) -> TensorClass {
        let q0 = MilnorMonomial::q_gen(0);
        let bl = self.left.action_of(&q0);
        let br = self.right.action_of(&q0);
        let mut acc: BTreeMap<(usize, usize), F3> = BTreeMap::new();
        for &((x, y), c) in class {
            for &(t, ct) in &bl[x] {
                add_into(&mut acc, (t, y), c * ct);
            }
            let sign = if self.left.degree(x) % 2 == 1 { TWO } else { ONE };
            for &(t, ct) in &br[y] {
                add_into(&mut acc, (x, t), c * ct * sign);
            }
        }
        acc.into_iter().collect()
    }

    /// Cartan-formula P^2 on the tensor square
    fn tensor_p2(&self, class: &TensorClass) -> TensorClass {
        let mut acc: BTreeMap<(usize, usize), F3> = BTreeMap::new();
        for i in 0..=2u32 {
            let pl = self.left.action_of(&MilnorMonomial::p_power(i));
            let pr = self.right.action_of(&MilnorMonomial::p_power(2 - i));
            for &((x, y), c) in class {
                for &(tx, cx) in &pl[x] {
                    for &(ty, cy) in &pr[y] {
                        add_into(&mut acc, (tx, ty), c * cx * cy);
                    }
                }
            }
        }
        acc.into_iter().collect()
    }

    fn tensor_p1(&self, class: &TensorClass) -> TensorClass {
        let p1 = MilnorMonomial::p_power(1);
        let pl = self.left.action_of(&p1);
        let pr = self.right.action_of(&p1);
        let mut acc: BTreeMap<(usize, usize), F3> = BTreeMap::new();
        for &((x, y), c) in class {
            for &(t, ct) in &pl[x] {
                add_into(&mut acc, (t, y), c * ct);
            }
            for &(t, ct) in &pr[y] {
                add_into(&mut acc, (x, t), c * ct);
            }
        }
        acc.into_iter().collect()
    }

    /// Evaluate phi on a tensor class: directly by the Thomas formula when
    /// the class lies in ker P^1, and through the Bockstein compatibility
    /// when it is a Bockstein image instead.
    pub fn evaluate(&self, class: &TensorClass) -> Result<TensorClass, String> {
        self.validate()?;
        if self.tensor_p1(class).is_empty() {
            return self.thomas_formula(class);
        }
        // try class = b(z)
        let dim_l = self.left.dim();
        let dim_r = self.right.dim();
        let pairs = dim_l * dim_r;
        let flat = |(x, y): (usize, usize)| x * dim_r + y;
        let mut bmat = gf3::Mat::zero(pairs, pairs);
        for x in 0..dim_l {
            for y in 0..dim_r {
                let img = self.tensor_bockstein(&vec![((x, y), ONE)]);
                for ((tx, ty), c) in img {
                    bmat.set(flat((x, y)), flat((tx, ty)), c);
                }
            }
        }
        let solver = gf3::RowSolver::new(&bmat);
        let mut target = gf3::PackedVec::zero(pairs);
        for &(k, c) in class {
            target.set(flat(k), c);
        }
        let Some(z) = solver.preimage(&target) else {
            return Err(
                "class lies neither in ker P^1 nor in the image of the Bockstein"
                    .to_string(),
            );
        };
        let zclass: TensorClass = z
            .iter_nonzero()
            .map(|(i, c)| ((i / dim_r, i % dim_r), c))
            .collect();
        let phi_z = self.thomas_formula(&zclass)?;
        let mut out: BTreeMap<(usize, usize), F3> = BTreeMap::new();
        for (k, c) in self.tensor_bockstein(&phi_z) {
            add_into(&mut out, k, c);
        }
        for (k, c) in self.tensor_p2(&zclass) {
            add_into(&mut out, k, -c);
        }
        Ok(out.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, QuotientAlgebra};
    use crate::module::module_from_presentation;

    fn v1_pair() -> (ModulePresentation, ModulePresentation) {
        let a = Algebra::new(QuotientAlgebra::Full);
        (
            module_from_presentation("V1", std::sync::Arc::clone(&a)).unwrap(),
            module_from_presentation("V1", a).unwrap(),
        )
    }

    #[test]
    fn phi_on_e0_e0() {
        let (l, r) = v1_pair();
        let input = CartanInput {
            left: &l,
            right: &r,
            phi_left: BTreeMap::new(),
            phi_right: BTreeMap::new(),
        };
        // e0 (x) e0 -> e5 (x) e6 + e6 (x) e5
        let v = input.evaluate(&vec![((0, 0), ONE)]).unwrap();
        assert_eq!(v, vec![((2, 3), ONE), ((3, 2), ONE)]);
    }

    #[test]
    fn phi_on_bockstein_image() {
        let (l, r) = v1_pair();
        let input = CartanInput {
            left: &l,
            right: &r,
            phi_left: BTreeMap::new(),
            phi_right: BTreeMap::new(),
        };
        // e1 (x) e0 + e0 (x) e1 = b(e0 (x) e0) -> -e6 (x) e6
        let v = input
            .evaluate(&vec![((1, 0), ONE), ((0, 1), ONE)])
            .unwrap();
        assert_eq!(v, vec![((3, 3), TWO)]);
    }

    #[test]
    fn correction_vanishes_without_beta_chains() {
        // on the sphere factor everything with a Bockstein dies, so the
        // correction terms vanish and only phi(x) y + x phi(y) remains
        let a = Algebra::new(QuotientAlgebra::Full);
        let s =
            module_from_presentation("S", std::sync::Arc::clone(&a)).unwrap();
        let s2 = module_from_presentation("S", a).unwrap();
        let input = CartanInput {
            left: &s,
            right: &s2,
            phi_left: BTreeMap::new(),
            phi_right: BTreeMap::new(),
        };
        let v = input.evaluate(&vec![((0, 0), ONE)]).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn degree_mismatch_rejected() {
        let (l, r) = v1_pair();
        let mut phi_left = BTreeMap::new();
        phi_left.insert(0usize, vec![(1usize, ONE)]); // e0 -> e1 is not degree +11
        let input = CartanInput {
            left: &l,
            right: &r,
            phi_left,
            phi_right: BTreeMap::new(),
        };
        assert!(input.evaluate(&vec![((0, 0), ONE)]).is_err());
    }
}
