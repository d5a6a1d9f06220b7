//! Quotient Hopf algebras of the mod-3 Steenrod algebra and degreewise bases.
//!
//! Supported quotients: the full algebra A, the family A//E[tau_0..tau_n]
//! (Milnor monomials with exterior support in {n+1, ...}), and the polynomial
//! quotient P (empty exterior support). Bases, products and the
//! generator-decomposition tables are memoized behind locks so algebra values
//! can be shared across threads.

use crate::milnor::{monomial_product, tau_degree, xi_degree, MilnorMonomial, SteenrodElement};
use gf3::{Mat, RowSolver, F3, ONE};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum QuotientAlgebra {
    /// the whole Steenrod algebra
    Full,
    /// A//E[tau_0..tau_n]: exterior support restricted to indices > n
    ModE(u32),
    /// all exterior generators killed
    Polynomial,
}

impl QuotientAlgebra {
    pub fn contains(&self, m: &MilnorMonomial) -> bool {
        match self {
            QuotientAlgebra::Full => true,
            QuotientAlgebra::ModE(n) => m.q_mask() & ((1u64 << (n + 1)) - 1) == 0,
            QuotientAlgebra::Polynomial => m.q_mask() == 0,
        }
    }

    /// smallest allowed exterior index, if any
    pub fn min_q(&self) -> Option<u32> {
        match self {
            QuotientAlgebra::Full => Some(0),
            QuotientAlgebra::ModE(n) => Some(n + 1),
            QuotientAlgebra::Polynomial => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            QuotientAlgebra::Full => "A".to_string(),
            QuotientAlgebra::ModE(n) => {
                let taus: Vec<String> = (0..=*n).map(|i| format!("t{}", i)).collect();
                format!("A/E[{}]", taus.join(","))
            }
            QuotientAlgebra::Polynomial => "P".to_string(),
        }
    }

    pub fn parse(s: &str) -> Option<QuotientAlgebra> {
        match s {
            "A" => Some(QuotientAlgebra::Full),
            "P" => Some(QuotientAlgebra::Polynomial),
            _ => {
                if let Some(rest) = s.strip_prefix("A/E") {
                    // digits listing the killed tau indices, e.g. A/E01, A/E012
                    let digits: Option<Vec<u32>> =
                        rest.chars().map(|c| c.to_digit(10)).collect();
                    let digits = digits?;
                    if digits.is_empty() {
                        return None;
                    }
                    let n = *digits.last()?;
                    if digits != (0..=n).collect::<Vec<_>>() {
                        return None;
                    }
                    Some(QuotientAlgebra::ModE(n))
                } else {
                    None
                }
            }
        }
    }
}

/// A quotient algebra together with its memoized computational tables.
pub struct Algebra {
    pub kind: QuotientAlgebra,
    basis: RwLock<Vec<Option<Arc<Vec<MilnorMonomial>>>>>,
    index: RwLock<HashMap<MilnorMonomial, usize>>,
    /// (a_deg, b_deg, b_idx) -> matrix of right multiplication by basis
    /// element b, mapping degree-a coordinates to degree-(a+b) coordinates
    rmul: Mutex<HashMap<(u32, u32, usize), Arc<Mat>>>,
    /// (a_deg, a_idx, b_deg) -> matrix of left multiplication by basis
    /// element a, mapping degree-b coordinates to degree-(a+b) coordinates
    lmul: Mutex<HashMap<(u32, usize, u32), Arc<Mat>>>,
    /// per-degree decomposition of basis elements into generator * lower
    decomp: Mutex<HashMap<u32, Arc<Vec<Vec<(MilnorMonomial, MilnorMonomial, F3)>>>>>,
}

impl Algebra {
    pub fn new(kind: QuotientAlgebra) -> Arc<Algebra> {
        Arc::new(Algebra {
            kind,
            basis: RwLock::new(Vec::new()),
            index: RwLock::new(HashMap::new()),
            rmul: Mutex::new(HashMap::new()),
            lmul: Mutex::new(HashMap::new()),
            decomp: Mutex::new(HashMap::new()),
        })
    }

    /// Monomial basis in internal degree t, sorted by the frozen total order
    /// (exterior mask, then polynomial part lexicographically).
    pub fn basis(&self, t: u32) -> Arc<Vec<MilnorMonomial>> {
        {
            let cache = self.basis.read().unwrap();
            if let Some(Some(b)) = cache.get(t as usize) {
                return Arc::clone(b);
            }
        }
        let computed = Arc::new(self.compute_basis(t));
        let mut cache = self.basis.write().unwrap();
        if cache.len() <= t as usize {
            cache.resize(t as usize + 1, None);
        }
        if cache[t as usize].is_none() {
            cache[t as usize] = Some(Arc::clone(&computed));
            let mut index = self.index.write().unwrap();
            for (i, m) in computed.iter().enumerate() {
                index.insert(m.clone(), i);
            }
        }
        cache[t as usize].as_ref().map(Arc::clone).unwrap()
    }

    fn compute_basis(&self, t: u32) -> Vec<MilnorMonomial> {
        let mut out = Vec::new();
        // enumerate exterior masks with total degree <= t over allowed indices
        let mut masks: Vec<(u64, u32)> = vec![(0, 0)];
        if let Some(min_q) = self.kind.min_q() {
            let mut idx = min_q;
            while tau_degree(idx) <= t {
                let extra: Vec<(u64, u32)> = masks
                    .iter()
                    .filter(|(_, d)| d + tau_degree(idx) <= t)
                    .map(|(m, d)| (m | (1u64 << idx), d + tau_degree(idx)))
                    .collect();
                masks.extend(extra);
                idx += 1;
                if idx >= 32 {
                    break;
                }
            }
        }
        for (mask, qd) in masks {
            let rem = t - qd;
            let mut stack: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), rem)];
            // positions k = 1, 2, ... with weight xi_degree(k)
            let mut parts: Vec<Vec<u32>> = Vec::new();
            while let Some((prefix, left)) = stack.pop() {
                let k = prefix.len() as u32 + 1;
                if left == 0 {
                    // pad nothing; trailing zeros trimmed by constructor
                    parts.push(prefix);
                    continue;
                }
                if xi_degree(k) > left {
                    continue;
                }
                for e in 0..=(left / xi_degree(k)) {
                    let mut p = prefix.clone();
                    p.push(e);
                    stack.push((p, left - e * xi_degree(k)));
                }
            }
            for p in parts {
                out.push(MilnorMonomial::new(
                    &mask_to_indices(mask),
                    &p,
                ));
            }
        }
        out.sort();
        out
    }

    pub fn dim(&self, t: u32) -> usize {
        self.basis(t).len()
    }

    /// Position of a monomial within its degree's basis.
    pub fn index_of(&self, m: &MilnorMonomial) -> Option<usize> {
        let _ = self.basis(m.degree());
        self.index.read().unwrap().get(m).copied()
    }

    /// Product of two monomials, asserting closure in this quotient.
    pub fn multiply_monomials(
        &self,
        a: &MilnorMonomial,
        b: &MilnorMonomial,
    ) -> SteenrodElement {
        assert!(self.kind.contains(a), "left factor outside algebra");
        assert!(self.kind.contains(b), "right factor outside algebra");
        let prod = monomial_product(a, b);
        for (m, _) in prod.terms() {
            assert!(
                self.kind.contains(m),
                "product escaped the quotient algebra: {:?} * {:?} has term {:?}",
                a,
                b,
                m
            );
        }
        prod
    }

    pub fn multiply(&self, x: &SteenrodElement, y: &SteenrodElement) -> SteenrodElement {
        let mut out = SteenrodElement::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                out.add(&self.multiply_monomials(a, b), ca * cb);
            }
        }
        out
    }

    /// Matrix of right multiplication by basis element (b_deg, b_idx), as a
    /// map from degree-a coordinates to degree-(a+b) coordinates.
    pub fn rmul_matrix(&self, a_deg: u32, b_deg: u32, b_idx: usize) -> Arc<Mat> {
        let key = (a_deg, b_deg, b_idx);
        {
            let cache = self.rmul.lock().unwrap();
            if let Some(m) = cache.get(&key) {
                return Arc::clone(m);
            }
        }
        let src = self.basis(a_deg);
        let dst = self.basis(a_deg + b_deg);
        let b = self.basis(b_deg)[b_idx].clone();
        let mut mat = Mat::zero(src.len(), dst.len());
        for (i, a) in src.iter().enumerate() {
            let prod = self.multiply_monomials(a, &b);
            for (m, c) in prod.terms() {
                let j = dst.binary_search(m).expect("product term not in basis");
                mat.set(i, j, c);
            }
        }
        let mat = Arc::new(mat);
        self.rmul
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&mat));
        mat
    }

    /// Matrix of left multiplication by basis element (a_deg, a_idx), as a
    /// map from degree-b coordinates to degree-(a+b) coordinates.
    pub fn lmul_matrix(&self, a_deg: u32, a_idx: usize, b_deg: u32) -> Arc<Mat> {
        let key = (a_deg, a_idx, b_deg);
        {
            let cache = self.lmul.lock().unwrap();
            if let Some(m) = cache.get(&key) {
                return Arc::clone(m);
            }
        }
        let src = self.basis(b_deg);
        let dst = self.basis(a_deg + b_deg);
        let a = self.basis(a_deg)[a_idx].clone();
        let mut mat = Mat::zero(src.len(), dst.len());
        for (i, b) in src.iter().enumerate() {
            let prod = self.multiply_monomials(&a, b);
            for (m, c) in prod.terms() {
                let j = dst.binary_search(m).expect("product term not in basis");
                mat.set(i, j, c);
            }
        }
        let mat = Arc::new(mat);
        self.lmul
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&mat));
        mat
    }

    /// Algebra generators: the minimal allowed exterior generator plus the
    /// power operations P^(3^k), listed up to degree `max_deg`.
    pub fn generators(&self, max_deg: u32) -> Vec<MilnorMonomial> {
        let mut gens = Vec::new();
        if let Some(q) = self.kind.min_q() {
            if tau_degree(q) <= max_deg {
                gens.push(MilnorMonomial::q_gen(q));
            }
        }
        let mut k = 0;
        loop {
            let r = 3u32.pow(k);
            let deg = r * xi_degree(1);
            if deg > max_deg {
                break;
            }
            gens.push(MilnorMonomial::p_power(r));
            k += 1;
        }
        gens.sort();
        gens
    }

    /// For every basis element m of degree t > 0, a decomposition
    /// m = sum of c * g * x with g a generator and x a lower basis element.
    /// Fails only if the generator set does not generate, which is asserted.
    pub fn decompose(&self, t: u32) -> Arc<Vec<Vec<(MilnorMonomial, MilnorMonomial, F3)>>> {
        {
            let cache = self.decomp.lock().unwrap();
            if let Some(d) = cache.get(&t) {
                return Arc::clone(d);
            }
        }
        let basis = self.basis(t);
        let gens = self.generators(t);
        // columns: pairs (generator g, lower basis x) with |g| + |x| = t
        let mut pairs: Vec<(MilnorMonomial, MilnorMonomial)> = Vec::new();
        for g in &gens {
            let gd = g.degree();
            if gd == 0 || gd > t {
                continue;
            }
            for x in self.basis(t - gd).iter() {
                pairs.push((g.clone(), x.clone()));
            }
        }
        // matrix: pair -> expansion over basis(t)
        let mut mat = Mat::zero(pairs.len(), basis.len());
        for (r, (g, x)) in pairs.iter().enumerate() {
            let prod = self.multiply_monomials(g, x);
            for (m, c) in prod.terms() {
                let j = basis.binary_search(m).unwrap();
                mat.set(r, j, c);
            }
        }
        let solver = RowSolver::new(&mat);
        let mut out = Vec::with_capacity(basis.len());
        for j in 0..basis.len() {
            let mut target = gf3::PackedVec::zero(basis.len());
            target.set(j, ONE);
            let sol = solver.preimage(&target).unwrap_or_else(|| {
                panic!(
                    "generators fail to span degree {} of {}",
                    t,
                    self.kind.name()
                )
            });
            let mut terms = Vec::new();
            for (r, c) in sol.iter_nonzero() {
                let (g, x) = &pairs[r];
                terms.push((g.clone(), x.clone(), c));
            }
            out.push(terms);
        }
        let out = Arc::new(out);
        self.decomp.lock().unwrap().insert(t, Arc::clone(&out));
        out
    }
}

fn mask_to_indices(mask: u64) -> Vec<u32> {
    (0..32).filter(|i| mask & (1u64 << i) != 0).collect()
}

/// List the canonical-form monomials of degree exactly t in the given
/// quotient, in the frozen total order.
pub fn algebra_basis(alg: &Algebra, t: u32) -> Vec<MilnorMonomial> {
    alg.basis(t).as_ref().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_bases() {
        let a = Algebra::new(QuotientAlgebra::Full);
        assert_eq!(a.dim(0), 1);
        assert!(a.basis(0)[0].is_unit());
        // degree 1: only Q0
        let b1 = a.basis(1);
        assert_eq!(b1.len(), 1);
        assert_eq!(b1[0], MilnorMonomial::q_gen(0));
        // A//E[tau0,tau1]: nothing in degree 1, P^1 in degree 4
        let b = Algebra::new(QuotientAlgebra::ModE(1));
        assert_eq!(b.dim(1), 0);
        let b4 = b.basis(4);
        assert_eq!(b4.len(), 1);
        assert_eq!(b4[0], MilnorMonomial::p_power(1));
    }

    #[test]
    fn quotient_closure_low_degrees() {
        // products of basis monomials stay inside the quotient
        for kind in [
            QuotientAlgebra::ModE(0),
            QuotientAlgebra::ModE(1),
            QuotientAlgebra::Polynomial,
        ] {
            let alg = Algebra::new(kind);
            for da in 0..=20u32 {
                for db in 0..=(20 - da) {
                    for a in alg.basis(da).iter() {
                        for b in alg.basis(db).iter() {
                            // multiply_monomials asserts closure internally
                            let _ = alg.multiply_monomials(a, b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decompose_low_degrees() {
        for kind in [
            QuotientAlgebra::Full,
            QuotientAlgebra::ModE(1),
            QuotientAlgebra::Polynomial,
        ] {
            let alg = Algebra::new(kind);
            for t in 1..=24u32 {
                let basis = alg.basis(t);
                let dec = alg.decompose(t);
                for (j, terms) in dec.iter().enumerate() {
                    let mut sum = SteenrodElement::zero();
                    for (g, x, c) in terms {
                        sum.add(&alg.multiply_monomials(g, x), *c);
                    }
                    let expected =
                        SteenrodElement::from_monomial(basis[j].clone(), ONE);
                    assert_eq!(sum, expected, "decomposition failed at degree {t}");
                }
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(QuotientAlgebra::parse("A"), Some(QuotientAlgebra::Full));
        assert_eq!(QuotientAlgebra::parse("P"), Some(QuotientAlgebra::Polynomial));
        assert_eq!(QuotientAlgebra::parse("A/E0"), Some(QuotientAlgebra::ModE(0)));
        assert_eq!(QuotientAlgebra::parse("A/E01"), Some(QuotientAlgebra::ModE(1)));
        assert_eq!(QuotientAlgebra::parse("A/E012"), Some(QuotientAlgebra::ModE(2)));
        assert_eq!(QuotientAlgebra::parse("A/E02"), None);
    }
}
