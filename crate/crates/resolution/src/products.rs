//! Chart contexts: a resolution together with its named classes and the
//! chain-map lifts realizing multiplication by the small named generators.
//! Monomial names from the tables (like b0^14 h0 or eta1 v2 b0^7) evaluate
//! to chart vectors through iterated Yoneda products.

use crate::chainmap::{lift_classes, ChainMap};
use crate::registry::NameRegistry;
use crate::resolve::{ExtClass, Resolution};
use gf3::{F3, ONE};
use std::collections::BTreeMap;
use std::sync::Arc;
use steenrod::{module_from_presentation, Algebra, QuotientAlgebra};

pub struct ChartContext {
    pub res: Resolution,
    pub registry: NameRegistry,
    /// sign convention per name: the registry class is sign * generator
    pub signs: BTreeMap<String, F3>,
    /// lifts realizing multiplication by these names
    lifts: BTreeMap<String, ChainMap>,
}

/// Names that act multiplicatively on every chart built here.
const MULTIPLICATIVE: &[&str] = &["h0", "h1", "h2", "b0", "g0", "k0", "b1", "eta1", "g1", "k1", "v2"];

impl ChartContext {
    /// The polynomial-part sphere chart (Tangora's tables).
    pub fn sphere_p(max_s: u32, max_t: u32) -> ChartContext {
        let alg = Algebra::new(QuotientAlgebra::Polynomial);
        let m = Arc::new(module_from_presentation("S", Arc::clone(&alg)).unwrap());
        let mut res = Resolution::new(alg, m);
        res.extend(max_s, max_t);
        let seeds = NameRegistry::sphere_p_seeds();
        ChartContext::build(res, &seeds)
    }

    /// The V(1) chart: the sphere over A//E[tau0, tau1].
    pub fn v1_chart(max_s: u32, max_t: u32) -> ChartContext {
        let alg = Algebra::new(QuotientAlgebra::ModE(1));
        let m = Arc::new(module_from_presentation("S", Arc::clone(&alg)).unwrap());
        let mut res = Resolution::new(alg, m);
        res.extend(max_s, max_t);
        let mut seeds = NameRegistry::sphere_p_seeds();
        seeds.extend(NameRegistry::v1_seeds());
        ChartContext::build(res, &seeds)
    }

    /// The V(0) chart: the sphere over A//E[tau0].
    pub fn v0_chart(max_s: u32, max_t: u32) -> ChartContext {
        let alg = Algebra::new(QuotientAlgebra::ModE(0));
        let m = Arc::new(module_from_presentation("S", Arc::clone(&alg)).unwrap());
        let mut res = Resolution::new(alg, m);
        res.extend(max_s, max_t);
        let seeds = vec![("h0", 1, 4), ("h1", 1, 12), ("h2", 1, 36), ("h3", 1, 108)];
        ChartContext::build(res, &seeds)
    }

    fn build(res: Resolution, seeds: &[(&str, u32, u32)]) -> ChartContext {
        let mut registry = NameRegistry::default();
        let mut signs: BTreeMap<String, F3> = BTreeMap::new();
        for &(name, s, t) in seeds {
            if s > res.max_s || t > res.max_t {
                continue;
            }
            let dim = res.dim(s, t);
            assert_eq!(
                dim, 1,
                "registry seed {name} at ({s},{t}) needs a one-dimensional group, found {dim}"
            );
            registry.insert(name, ExtClass { s, t, index: 0 });
            signs.insert(name.to_string(), ONE);
        }
        let mut ctx = ChartContext {
            res,
            registry,
            signs,
            lifts: BTreeMap::new(),
        };
        ctx.build_lifts();
        ctx.calibrate_relation_signs();
        ctx
    }

    fn build_lifts(&mut self) {
        let mut names = Vec::new();
        let mut classes = Vec::new();
        for &name in MULTIPLICATIVE {
            if let Some(c) = self.registry.get(name) {
                names.push(name.to_string());
                classes.push(c);
            }
        }
        let maps = lift_classes(&self.res, &self.res, &classes, self.res.max_s, self.res.max_t);
        for (name, map) in names.into_iter().zip(maps) {
            self.lifts.insert(name, map);
        }
    }

    /// Fix the signs of g0, k0, b1 so the relations
    /// h1 b0 = h0 g0, h1 g0 = h0 k0, h1 k0 = h0 b1 hold on the nose,
    /// matching the paper's normalization of the May names.
    fn calibrate_relation_signs(&mut self) {
        for (lhs_gen, rhs_gen, fixed) in [
            ("b0", "g0", "h1"),
            ("g0", "k0", "h1"),
            ("k0", "b1", "h1"),
        ] {
            let (Some(_), Some(_)) = (self.registry.get(lhs_gen), self.registry.get(rhs_gen))
            else {
                continue;
            };
            let lhs = self.product_by_name(fixed, &self.named_vector(lhs_gen));
            let rhs = self.product_by_name("h0", &self.named_vector(rhs_gen));
            if lhs.is_empty() || rhs.is_empty() {
                continue;
            }
            if lhs != rhs {
                // flip the sign of the right generator
                let flipped: Vec<(ExtClass, F3)> =
                    rhs.iter().map(|&(c, v)| (c, -v)).collect();
                if lhs == flipped {
                    let s = self.signs.get_mut(rhs_gen).unwrap();
                    *s = -*s;
                }
            }
        }
    }

    pub fn named_vector(&self, name: &str) -> Vec<(ExtClass, F3)> {
        match self.registry.get(name) {
            Some(c) => vec![(c, *self.signs.get(name).unwrap_or(&ONE))],
            None => Vec::new(),
        }
    }

    pub fn lift(&self, name: &str) -> Option<&ChainMap> {
        self.lifts.get(name)
    }

    /// Multiply a chart vector by a named multiplicative generator.
    pub fn product_by_name(&self, name: &str, v: &[(ExtClass, F3)]) -> Vec<(ExtClass, F3)> {
        let map = self
            .lifts
            .get(name)
            .unwrap_or_else(|| panic!("no lift for generator {name}"));
        let sign = *self.signs.get(name).unwrap_or(&ONE);
        let mut acc: BTreeMap<ExtClass, F3> = BTreeMap::new();
        for &(u, c) in v {
            for (w, cw) in map.product_with(&self.res, &self.res, u) {
                let e = acc.entry(w).or_insert(gf3::ZERO);
                *e = *e + c * cw * sign;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Evaluate a monomial given as (name, exponent) pairs. Exactly one
    /// factor may be a non-multiplicative atom (it seeds the product).
    pub fn eval_monomial(&self, factors: &[(&str, u32)]) -> Result<Vec<(ExtClass, F3)>, String> {
        let mut atom: Option<&str> = None;
        let mut gens: Vec<(&str, u32)> = Vec::new();
        for &(name, e) in factors {
            if e == 0 {
                continue;
            }
            if self.lifts.contains_key(name) {
                gens.push((name, e));
            } else if self.registry.get(name).is_some() {
                if e != 1 || atom.is_some() {
                    return Err(format!(
                        "cannot multiply two non-multiplicative atoms in {:?}",
                        factors
                    ));
                }
                atom = Some(name);
            } else {
                return Err(format!("unknown class name {name}"));
            }
        }
        let mut v = match atom {
            Some(a) => self.named_vector(a),
            None => vec![(ExtClass { s: 0, t: 0, index: 0 }, ONE)],
        };
        for (name, e) in gens {
            for _ in 0..e {
                v = self.product_by_name(name, &v);
                if v.is_empty() {
                    return Ok(v);
                }
            }
        }
        Ok(v)
    }

    /// Parse and evaluate a monomial like `h0*b0^14` or `eta1 v2 b0^7`.
    pub fn eval_expr(&self, expr: &str) -> Result<Vec<(ExtClass, F3)>, String> {
        let cleaned = expr.replace('*', " ");
        let mut factors: Vec<(String, u32)> = Vec::new();
        for tok in cleaned.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n.to_string(),
                    e.parse::<u32>().map_err(|e| format!("bad exponent: {e}"))?,
                ),
                None => (tok.to_string(), 1),
            };
            factors.push((name, exp));
        }
        let refs: Vec<(&str, u32)> = factors.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        self.eval_monomial(&refs)
    }
}
