//! The corrected Leibniz rule for the non-ring complex: for classes x1, x2
//! with reduction data (their images under the two cell projections),
//!   d(x1 x2) = (d x1) x2 + (-1)^{|x1|} x1 (d x2) - G,  G = b0 * F,
//!   F(x1, x2) = br(x1) brr(x2) + (-1)^{|x1|} brr(x1) br(x2).
//! Terms are graded by filtration jump; the emitted differential is the
//! lowest nonvanishing component, later components feed higher pages.
//!
//! Frozen conventions (calibrated so the page-two table on the v2 powers
//! comes out exactly as printed):
//!   brr(v2^k) = C(k,2) v2^{k-2} k0 + k v2^{k-1} b0
//!   br(v2^k)  = k h1 v2^{k-1}
//!   br(g0 v2^i) = -(v2^i b0 h0 - i v2^{i-1} k0 h0)   (global sign flip)
//!   brr(g0 v2^i) = C(i,2) v2^{i-2} k0 g0 + i v2^{i-1} b0 g0
//! The g0-family flip absorbs the differing normalization of b0 and k0
//! noted in the source derivation.

use gf3::{F3, ONE, TWO, ZERO};
use resolution::ChartContext;
use std::collections::BTreeMap;

use crate::ledger::ClassVec;

pub type Mono = BTreeMap<String, u32>;

/// formal F3-combination of monomials in named chart classes
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Formal(pub Vec<(F3, Mono)>);

pub fn mono_key(m: &Mono) -> String {
    m.iter()
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_mono(text: &str) -> Mono {
    let mut m = Mono::new();
    for tok in text.replace('*', " ").split_whitespace() {
        let (name, e) = match tok.split_once('^') {
            Some((n, e)) => (n.to_string(), e.parse::<u32>().unwrap_or(0)),
            None => (tok.to_string(), 1),
        };
        if e > 0 {
            *m.entry(name).or_insert(0) += e;
        }
    }
    m
}

impl Formal {
    pub fn zero() -> Formal {
        Formal(Vec::new())
    }

    pub fn term(c: F3, m: Mono) -> Formal {
        if c.is_zero() {
            Formal::zero()
        } else {
            Formal(vec![(c, m)])
        }
    }

    /// parse `- g1`, `2 v2^2 k0 + b0 v2^3`, `0`
    pub fn parse(text: &str) -> Formal {
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Formal::zero();
        }
        let normalized = text.replace('+', " + ").replace('-', " - ");
        let mut out = Vec::new();
        let mut sign = ONE;
        let mut coeff: Option<F3> = None;
        let mut mono = Mono::new();
        let flush =
            |out: &mut Vec<(F3, Mono)>, sign: F3, coeff: Option<F3>, mono: &mut Mono| {
                if !mono.is_empty() {
                    out.push((sign * coeff.unwrap_or(ONE), std::mem::take(mono)));
                }
            };
        for tok in normalized.split_whitespace() {
            match tok {
                "+" => {
                    flush(&mut out, sign, coeff, &mut mono);
                    sign = ONE;
                    coeff = None;
                }
                "-" => {
                    flush(&mut out, sign, coeff, &mut mono);
                    sign = TWO;
                    coeff = None;
                }
                t => {
                    if let Ok(v) = t.parse::<i64>() {
                        coeff = Some(F3::new(v));
                    } else {
                        let (name, e) = match t.split_once('^') {
                            Some((n, e)) => (n.to_string(), e.parse().unwrap_or(1)),
                            None => (t.to_string(), 1),
                        };
                        *mono.entry(name).or_insert(0) += e;
                    }
                }
            }
        }
        flush(&mut out, sign, coeff, &mut mono);
        Formal(out).normalized()
    }

    fn normalized(self) -> Formal {
        let mut acc: BTreeMap<Mono, F3> = BTreeMap::new();
        for (c, m) in self.0 {
            let m: Mono = m.into_iter().filter(|(_, e)| *e > 0).collect();
            let e = acc.entry(m).or_insert(ZERO);
            *e = *e + c;
        }
        Formal(
            acc.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (c, m))
                .collect(),
        )
    }

    pub fn scale(&self, c: F3) -> Formal {
        Formal(self.0.iter().map(|(v, m)| (*v * c, m.clone())).collect()).normalized()
    }

    pub fn add(&self, o: &Formal) -> Formal {
        let mut v = self.0.clone();
        v.extend(o.0.clone());
        Formal(v).normalized()
    }

    pub fn mul(&self, o: &Formal) -> Formal {
        let mut out = Vec::new();
        for (c1, m1) in &self.0 {
            for (c2, m2) in &o.0 {
                let mut m = m1.clone();
                for (n, e) in m2 {
                    *m.entry(n.clone()).or_insert(0) += e;
                }
                out.push((*c1 * *c2, m));
            }
        }
        Formal(out).normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// filtration and internal degree of a monomial from the registry seeds
pub fn mono_bidegree(ctx: &ChartContext, m: &Mono) -> Result<(u32, u32), String> {
    let (mut s, mut t) = (0u32, 0u32);
    for (name, e) in m {
        let c = ctx
            .registry
            .get(name)
            .ok_or_else(|| format!("unknown class name {name}"))?;
        s += c.s * e;
        t += c.t * e;
    }
    Ok((s, t))
}

pub fn eval_formal(ctx: &ChartContext, f: &Formal) -> Result<ClassVec, String> {
    let mut acc: BTreeMap<resolution::ExtClass, F3> = BTreeMap::new();
    for (c, m) in &f.0 {
        let factors: Vec<(&str, u32)> = m.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        for (cls, v) in ctx.eval_monomial(&factors)? {
            let e = acc.entry(cls).or_insert(ZERO);
            *e = *e + v * *c;
        }
    }
    Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

fn binom_c2(k: u32) -> F3 {
    steenrod::binom3(k as i64, 2)
}

pub struct DerivationEngine<'a> {
    pub ctx: &'a ChartContext,
    /// reduction data per monomial key
    pub reductions: BTreeMap<String, (Formal, Formal)>,
    /// known differentials per monomial key: (page, formal value)
    pub known: BTreeMap<String, (u32, Formal)>,
}

impl<'a> DerivationEngine<'a> {
    pub fn new(ctx: &'a ChartContext) -> DerivationEngine<'a> {
        let mut e = DerivationEngine {
            ctx,
            reductions: BTreeMap::new(),
            known: BTreeMap::new(),
        };
        // the closed-form families
        for k in 1..=9u32 {
            let br = Formal::term(F3::new(k as i64), parse_mono(&format!("h1 v2^{}", k - 1)));
            let mut brr = Formal::zero();
            if k >= 2 {
                brr = brr.add(&Formal::term(
                    binom_c2(k),
                    parse_mono(&format!("v2^{} k0", k - 2)),
                ));
            }
            brr = brr.add(&Formal::term(
                F3::new(k as i64),
                parse_mono(&format!("v2^{} b0", k - 1)),
            ));
            e.reductions
                .insert(mono_key(&parse_mono(&format!("v2^{k}"))), (br, brr));
        }
        for i in 0..=6u32 {
            // br(g0 v2^i) = -(v2^i b0 h0 - i v2^{i-1} k0 h0)
            let mut br = Formal::term(TWO, parse_mono(&format!("v2^{i} b0 h0")));
            if i >= 1 {
                br = br.add(&Formal::term(
                    F3::new(i as i64),
                    parse_mono(&format!("v2^{} k0 h0", i - 1)),
                ));
            }
            let mut brr = Formal::zero();
            if i >= 2 {
                brr = brr.add(&Formal::term(
                    binom_c2(i),
                    parse_mono(&format!("v2^{} k0 g0", i - 2)),
                ));
            }
            if i >= 1 {
                brr = brr.add(&Formal::term(
                    F3::new(i as i64),
                    parse_mono(&format!("v2^{} b0 g0", i - 1)),
                ));
            }
            e.reductions
                .insert(mono_key(&parse_mono(&format!("g0 v2^{i}"))), (br, brr));
        }
        // d(v2) = 0 (dimensional)
        e.known
            .insert("v2".to_string(), (u32::MAX, Formal::zero()));
        e
    }

    pub fn add_reduction(&mut self, class: &str, br: &str, brr: &str) {
        self.reductions.insert(
            mono_key(&parse_mono(class)),
            (Formal::parse(br), Formal::parse(brr)),
        );
    }

    pub fn add_known(&mut self, class: &str, page: u32, value: Formal) {
        self.known
            .insert(mono_key(&parse_mono(class)), (page, value));
    }

    fn reduction_of(&self, m: &Mono) -> Option<&(Formal, Formal)> {
        self.reductions.get(&mono_key(m))
    }

    /// The rule applied to the pair (x1, x2): returns components of the
    /// formal derivative grouped by filtration jump, ascending, with the
    /// chart value of each component.
    pub fn derive(
        &self,
        x1: &Mono,
        x2: &Mono,
    ) -> Result<Vec<(u32, Formal, ClassVec)>, String> {
        let (s1, t1) = mono_bidegree(self.ctx, x1)?;
        let (s2, t2) = mono_bidegree(self.ctx, x2)?;
        let stem1 = (t1 - s1) as i64;
        let sign1 = if stem1 % 2 == 0 { ONE } else { TWO };
        let (br1, brr1) = self
            .reduction_of(x1)
            .ok_or_else(|| format!("missing reduction data for {}", mono_key(x1)))?
            .clone();
        let (br2, brr2) = self
            .reduction_of(x2)
            .ok_or_else(|| format!("missing reduction data for {}", mono_key(x2)))?
            .clone();
        let f = br1.mul(&brr2).add(&brr1.mul(&br2).scale(sign1));
        let g = f.mul(&Formal::term(ONE, parse_mono("b0")));
        let d1 = self
            .known
            .get(&mono_key(x1))
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        let d2v = self
            .known
            .get(&mono_key(x2))
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        let x1f = Formal::term(ONE, x1.clone());
        let x2f = Formal::term(ONE, x2.clone());
        let total = d1
            .mul(&x2f)
            .add(&x1f.mul(&d2v).scale(sign1))
            .add(&g.scale(TWO));
        // group by filtration jump
        let base_s = s1 + s2;
        let mut grouped: BTreeMap<u32, Formal> = BTreeMap::new();
        for (c, m) in &total.0 {
            let (sm, _) = mono_bidegree(self.ctx, m)?;
            let delta = sm - base_s;
            let e = grouped.entry(delta).or_insert_with(Formal::zero);
            *e = e.add(&Formal::term(*c, m.clone()));
        }
        let mut out = Vec::new();
        for (delta, f) in grouped {
            let v = eval_formal(self.ctx, &f)?;
            out.push((delta, f, v));
        }
        Ok(out)
    }

    /// page through which the pair hypothesis holds: both factors must
    /// persist, so the instance is valid through the minimum of the pages
    /// on which the factors' own differentials live
    fn valid_page(&self, x1: &Mono, x2: &Mono) -> u32 {
        let page_of = |m: &Mono| {
            self.known
                .get(&mono_key(m))
                .map(|(p, _)| *p)
                .unwrap_or(u32::MAX)
        };
        page_of(x1).min(page_of(x2))
    }

    /// The emitted differential: the lowest component with nonzero chart
    /// value, capped by the pages the factors persist to. Returns
    /// (page, chart value, formal value); a zero value with the validity
    /// page means "no differential through that page".
    pub fn derive_differential(
        &self,
        x1: &Mono,
        x2: &Mono,
    ) -> Result<(u32, ClassVec, Formal), String> {
        let valid = self.valid_page(x1, x2);
        for (delta, f, v) in self.derive(x1, x2)? {
            if delta > valid {
                break;
            }
            if !v.is_empty() {
                return Ok((delta, v, f));
            }
        }
        Ok((valid, Vec::new(), Formal::zero()))
    }

    /// The weakened-hypothesis variant: certifies that every component
    /// below the requested page vanishes in the chart (the machine-checkable
    /// half of the hypothesis) and emits the page-r component. The caller
    /// cites the homotopy-level assumption that licenses it.
    pub fn derive_weakened(
        &self,
        x1: &Mono,
        x2: &Mono,
        r: u32,
    ) -> Result<(ClassVec, Formal), String> {
        let mut value = None;
        for (delta, f, v) in self.derive(x1, x2)? {
            if delta < r && !v.is_empty() {
                return Err(format!(
                    "weakened rule at page {r} blocked: nonzero component at jump {delta}"
                ));
            }
            if delta == r {
                value = Some((v, f));
            }
        }
        Ok(value.unwrap_or((Vec::new(), Formal::zero())))
    }

    /// Record d(x1 x2) from the derivation (with the product's key).
    pub fn derive_and_store(&mut self, x1: &str, x2: &str) -> Result<(u32, Formal), String> {
        let m1 = parse_mono(x1);
        let m2 = parse_mono(x2);
        let (page, _, f) = self.derive_differential(&m1, &m2)?;
        let mut prod = m1.clone();
        for (n, e) in &m2 {
            *prod.entry(n.clone()).or_insert(0) += e;
        }
        self.known.insert(mono_key(&prod), (page, f.clone()));
        Ok((page, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(s: &str) -> Formal {
        Formal::parse(s)
    }

    #[test]
    fn formal_arithmetic() {
        let a = fm("2 v2^2 k0 + b0");
        let b = fm("- 2 v2^2 k0 + b0");
        assert_eq!(a.add(&b), fm("2 b0"));
        assert_eq!(fm("h1").mul(&fm("b0")), fm("h1 b0"));
        assert_eq!(fm("0"), Formal::zero());
    }
}
