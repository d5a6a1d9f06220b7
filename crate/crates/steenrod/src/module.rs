//! Finite graded module presentations over a quotient Steenrod algebra.
//!
//! A presentation stores basis elements with degrees and the actions of the
//! algebra generators (the minimal allowed Q and the power operations
//! P^(3^k)); every other action is derived on demand through the generator
//! decomposition of the algebra and memoized. `check_module_axioms` verifies
//! associativity (a b) x = a (b x) through a degree bound and reports the
//! first failing triple.

use crate::algebra::{Algebra, QuotientAlgebra};
use crate::milnor::{MilnorMonomial, SteenrodElement};
use gf3::{F3, ONE, TWO, ZERO};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

type SparseAction = Vec<Vec<(usize, F3)>>;

pub struct ModulePresentation {
    pub name: String,
    pub algebra: Arc<Algebra>,
    basis: Vec<(String, u32)>,
    gen_actions: BTreeMap<MilnorMonomial, SparseAction>,
    action_cache: Mutex<HashMap<MilnorMonomial, Arc<SparseAction>>>,
}

impl ModulePresentation {
    pub fn new(
        name: &str,
        algebra: Arc<Algebra>,
        basis: Vec<(String, u32)>,
        actions: Vec<(MilnorMonomial, usize, Vec<(usize, F3)>)>,
    ) -> Result<ModulePresentation, String> {
        let mut ids: Vec<&String> = basis.iter().map(|(id, _)| id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != basis.len() {
            return Err(format!("module {name}: duplicate basis id"));
        }
        let mut gen_actions: BTreeMap<MilnorMonomial, SparseAction> = BTreeMap::new();
        for (op, src, combo) in actions {
            if !algebra.kind.contains(&op) {
                return Err(format!(
                    "module {name}: operation {op:?} does not lie in {}",
                    algebra.kind.name()
                ));
            }
            let od = op.degree();
            let sd = basis[src].1;
            for &(tgt, c) in &combo {
                if c.is_zero() {
                    continue;
                }
                if basis[tgt].1 != sd + od {
                    return Err(format!(
                        "module {name}: action {op:?} {} = ... {} violates degrees \
                         ({} + {} != {})",
                        basis[src].0, basis[tgt].0, sd, od, basis[tgt].1
                    ));
                }
            }
            let table = gen_actions
                .entry(op)
                .or_insert_with(|| vec![Vec::new(); basis.len()]);
            if !table[src].is_empty() {
                return Err(format!(
                    "module {name}: duplicate action line for {}",
                    basis[src].0
                ));
            }
            table[src] = combo;
        }
        Ok(ModulePresentation {
            name: name.to_string(),
            algebra,
            basis,
            gen_actions,
            action_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(String, u32)] {
        &self.basis
    }

    pub fn degree(&self, idx: usize) -> u32 {
        self.basis[idx].1
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.basis[idx].0
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.basis.iter().position(|(i, _)| i == id)
    }

    pub fn top_degree(&self) -> u32 {
        self.basis.iter().map(|(_, d)| *d).max().unwrap_or(0)
    }

    pub fn basis_in_degree(&self, d: u32) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].1 == d)
            .collect()
    }

    /// A fingerprint of the presentation for cache keys.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.name.as_bytes());
        eat(self.algebra.kind.name().as_bytes());
        for (id, d) in &self.basis {
            eat(id.as_bytes());
            eat(&d.to_le_bytes());
        }
        for (op, table) in &self.gen_actions {
            eat(format!("{:?}", op).as_bytes());
            for (src, combo) in table.iter().enumerate() {
                for &(tgt, c) in combo {
                    eat(&(src as u32).to_le_bytes());
                    eat(&(tgt as u32).to_le_bytes());
                    eat(&[c.value()]);
                }
            }
        }
        h
    }

    /// Action table of an arbitrary monomial of the algebra.
    pub fn action_of(&self, m: &MilnorMonomial) -> Arc<SparseAction> {
        if let Some(a) = self.action_cache.lock().unwrap().get(m) {
            return Arc::clone(a);
        }
        let result = self.compute_action(m);
        let result = Arc::new(result);
        self.action_cache
            .lock()
            .unwrap()
            .insert(m.clone(), Arc::clone(&result));
        result
    }

    fn compute_action(&self, m: &MilnorMonomial) -> SparseAction {
        if m.is_unit() {
            return (0..self.dim()).map(|i| vec![(i, ONE)]).collect();
        }
        if let Some(table) = self.gen_actions.get(m) {
            return table.clone();
        }
        let deg = m.degree();
        let gens = self.algebra.generators(deg);
        if gens.contains(m) {
            // generator with no declared action: acts by zero
            return vec![Vec::new(); self.dim()];
        }
        if deg > 2 * self.top_degree() + 64 {
            // far above the module: zero (avoids deep decompositions)
            return vec![Vec::new(); self.dim()];
        }
        let basis = self.algebra.basis(deg);
        let idx = basis.binary_search(m).expect("monomial not in algebra");
        let decomp = self.algebra.decompose(deg);
        let mut out: SparseAction = vec![Vec::new(); self.dim()];
        for (g, x, c) in &decomp[idx] {
            let ax = self.action_of(x);
            let ag = self.action_of(g);
            for src in 0..self.dim() {
                let mut acc: BTreeMap<usize, F3> = BTreeMap::new();
                for &(mid, c1) in &ax[src] {
                    for &(tgt, c2) in &ag[mid] {
                        let e = acc.entry(tgt).or_insert(ZERO);
                        *e = *e + c1 * c2 * *c;
                    }
                }
                for (tgt, v) in acc {
                    if !v.is_zero() {
                        out[src].push((tgt, v));
                    }
                }
            }
        }
        // merge duplicate targets per source
        for combo in &mut out {
            let mut acc: BTreeMap<usize, F3> = BTreeMap::new();
            for &(t, c) in combo.iter() {
                let e = acc.entry(t).or_insert(ZERO);
                *e = *e + c;
            }
            *combo = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        }
        out
    }

    /// Apply an element of the algebra to a module vector given as sparse
    /// (basis index, coefficient) pairs.
    pub fn apply(&self, a: &SteenrodElement, v: &[(usize, F3)]) -> Vec<(usize, F3)> {
        let mut acc: BTreeMap<usize, F3> = BTreeMap::new();
        for (m, c) in a.terms() {
            let table = self.action_of(m);
            for &(src, cv) in v {
                for &(tgt, ct) in &table[src] {
                    let e = acc.entry(tgt).or_insert(ZERO);
                    *e = *e + c * cv * ct;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

#[derive(Debug)]
pub struct AxiomReport {
    pub pass: bool,
    pub checked_pairs: usize,
    /// (a, b, basis id) with (a b) x != a (b x)
    pub counterexample: Option<(MilnorMonomial, MilnorMonomial, String)>,
}

/// Verify (a b) x = a (b x) for all basis monomial pairs with
/// deg a + deg b + deg x <= bound.
pub fn check_module_axioms(m: &ModulePresentation, bound: u32) -> AxiomReport {
    let mut checked = 0usize;
    let top = m.top_degree();
    for da in 1..=bound {
        for db in 1..=(bound.saturating_sub(da)) {
            // skip pairs that can never land inside the module
            if da + db > top {
                continue;
            }
            let basis_a = m.algebra.basis(da);
            let basis_b = m.algebra.basis(db);
            for a in basis_a.iter() {
                for b in basis_b.iter() {
                    let ab = m.algebra.multiply_monomials(a, b);
                    let tb = m.action_of(b);
                    let ta = m.action_of(a);
                    for x in 0..m.dim() {
                        if m.degree(x) + da + db > top.min(bound) {
                            continue;
                        }
                        checked += 1;
                        // a (b x)
                        let mut lhs: BTreeMap<usize, F3> = BTreeMap::new();
                        for &(mid, c1) in &tb[x] {
                            for &(tgt, c2) in &ta[mid] {
                                let e = lhs.entry(tgt).or_insert(ZERO);
                                *e = *e + c1 * c2;
                            }
                        }
                        lhs.retain(|_, c| !c.is_zero());
                        // (a b) x
                        let mut rhs: BTreeMap<usize, F3> = BTreeMap::new();
                        for (mono, c) in ab.terms() {
                            for &(tgt, c2) in &m.action_of(mono)[x] {
                                let e = rhs.entry(tgt).or_insert(ZERO);
                                *e = *e + c * c2;
                            }
                        }
                        rhs.retain(|_, c| !c.is_zero());
                        if lhs != rhs {
                            return AxiomReport {
                                pass: false,
                                checked_pairs: checked,
                                counterexample: Some((
                                    a.clone(),
                                    b.clone(),
                                    m.id(x).to_string(),
                                )),
                            };
                        }
                    }
                }
            }
        }
    }
    AxiomReport {
        pass: true,
        checked_pairs: checked,
        counterexample: None,
    }
}

/// Coproduct of a Milnor basis monomial of the algebra (dual to the product
/// of the dual algebra): all splittings of the exterior support and the
/// polynomial exponents, with the sign of re-sorting the exterior parts.
pub fn coproduct(m: &MilnorMonomial) -> Vec<(MilnorMonomial, MilnorMonomial, F3)> {
    let qs: Vec<u32> = m.q_indices().collect();
    let mut out = Vec::new();
    // splittings of the exterior set
    for subset in 0..(1u32 << qs.len()) {
        let mut left_q = Vec::new();
        let mut right_q = Vec::new();
        for (pos, &q) in qs.iter().enumerate() {
            if subset & (1 << pos) != 0 {
                left_q.push(q);
            } else {
                right_q.push(q);
            }
        }
        // sign: unshuffle tau_{E} into tau_{E1} tau_{E2}; count pairs
        // (e1 in left, e2 in right) with e2 < e1
        let mut inv = 0u32;
        for &e1 in &left_q {
            for &e2 in &right_q {
                if e2 < e1 {
                    inv += 1;
                }
            }
        }
        let sign = if inv % 2 == 0 { ONE } else { TWO };
        // splittings of the polynomial part
        let p = m.p_part();
        let mut splits: Vec<(Vec<u32>, Vec<u32>)> = vec![(Vec::new(), Vec::new())];
        for &e in p {
            let mut next = Vec::new();
            for (l, r) in &splits {
                for i in 0..=e {
                    let mut l2 = l.clone();
                    let mut r2 = r.clone();
                    l2.push(i);
                    r2.push(e - i);
                    next.push((l2, r2));
                }
            }
            splits = next;
        }
        for (l, r) in splits {
            out.push((
                MilnorMonomial::new(&left_q, &l),
                MilnorMonomial::new(&right_q, &r),
                sign,
            ));
        }
    }
    out
}

/// Tensor product of two presentations over the same algebra, with the
/// graded Cartan action.
pub fn tensor_module(
    name: &str,
    m: &ModulePresentation,
    n: &ModulePresentation,
) -> Result<ModulePresentation, String> {
    assert_eq!(m.algebra.kind, n.algebra.kind);
    let mut basis = Vec::new();
    for (mi, (mid, md)) in m.basis().iter().enumerate() {
        for (ni, (nid, nd)) in n.basis().iter().enumerate() {
            let _ = (mi, ni);
            basis.push((format!("{}*{}", mid, nid), md + nd));
        }
    }
    let dim_n = n.dim();
    let pair_index = |mi: usize, ni: usize| mi * dim_n + ni;
    let top = basis.iter().map(|(_, d)| *d).max().unwrap_or(0);
    let mut actions = Vec::new();
    for g in m.algebra.generators(top) {
        let cop = coproduct(&g);
        for mi in 0..m.dim() {
            for ni in 0..n.dim() {
                let mut acc: BTreeMap<usize, F3> = BTreeMap::new();
                for (g1, g2, sign) in &cop {
                    let koszul = if g2.degree() % 2 == 1 && m.degree(mi) % 2 == 1 {
                        TWO
                    } else {
                        ONE
                    };
                    for &(mt, c1) in &m.action_of(g1)[mi] {
                        for &(nt, c2) in &n.action_of(g2)[ni] {
                            let e = acc.entry(pair_index(mt, nt)).or_insert(ZERO);
                            *e = *e + *sign * koszul * c1 * c2;
                        }
                    }
                }
                let combo: Vec<(usize, F3)> =
                    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                if !combo.is_empty() {
                    actions.push((g.clone(), pair_index(mi, ni), combo));
                }
            }
        }
    }
    ModulePresentation::new(name, Arc::clone(&m.algebra), basis, actions)
}

/// Split a tensor square into the +1/-1 eigenmodules of the graded twist.
/// Returns (plus, minus).
pub fn twist_eigenmodules(
    t: &ModulePresentation,
    factor_dim: usize,
    factor_degrees: &[u32],
    names: (&str, &str),
) -> Result<(ModulePresentation, ModulePresentation), String> {
    let pair = |i: usize, j: usize| i * factor_dim + j;
    // eigenbasis vectors, expressed over the tensor basis
    let mut plus: Vec<(String, u32, Vec<(usize, F3)>)> = Vec::new();
    let mut minus: Vec<(String, u32, Vec<(usize, F3)>)> = Vec::new();
    for i in 0..factor_dim {
        for j in i..factor_dim {
            let deg = factor_degrees[i] + factor_degrees[j];
            if i == j {
                let v = vec![(pair(i, i), ONE)];
                let odd = factor_degrees[i] % 2 == 1;
                let entry = (format!("d{}", factor_degrees[i]), deg, v);
                if odd {
                    minus.push(entry);
                } else {
                    plus.push(entry);
                }
            } else {
                let sign = if factor_degrees[i] % 2 == 1 && factor_degrees[j] % 2 == 1 {
                    TWO
                } else {
                    ONE
                };
                plus.push((
                    format!("s{}_{}", i, j),
                    deg,
                    vec![(pair(i, j), ONE), (pair(j, i), sign)],
                ));
                minus.push((
                    format!("a{}_{}", i, j),
                    deg,
                    vec![(pair(i, j), ONE), (pair(j, i), -sign)],
                ));
            }
        }
    }
    let build = |name: &str,
                 vectors: &[(String, u32, Vec<(usize, F3)>)]|
     -> Result<ModulePresentation, String> {
        // change of basis matrix: eigen -> tensor coordinates
        let dim = vectors.len();
        let tdim = t.dim();
        let mut fwd = gf3::Mat::zero(dim, tdim);
        for (r, (_, _, v)) in vectors.iter().enumerate() {
            for &(c, x) in v {
                fwd.set(r, c, x);
            }
        }
        let solver = gf3::RowSolver::new(&fwd);
        let basis: Vec<(String, u32)> = vectors
            .iter()
            .map(|(id, d, _)| (id.clone(), *d))
            .collect();
        let top = basis.iter().map(|(_, d)| *d).max().unwrap_or(0);
        let mut actions = Vec::new();
        for g in t.algebra.generators(top) {
            let tg = t.action_of(&g);
            for (r, (_, _, v)) in vectors.iter().enumerate() {
                // image in tensor coordinates
                let mut img = gf3::PackedVec::zero(tdim);
                for &(c, x) in v {
                    for &(tc, tx) in &tg[c] {
                        let cur = img.get(tc);
                        img.set(tc, cur + x * tx);
                    }
                }
                if img.is_zero() {
                    continue;
                }
                let expr = solver.preimage(&img).ok_or_else(|| {
                    format!("{name}: twist eigenspace not closed under {:?}", g)
                })?;
                let combo: Vec<(usize, F3)> = expr.iter_nonzero().collect();
                if !combo.is_empty() {
                    actions.push((g.clone(), r, combo));
                }
            }
        }
        ModulePresentation::new(name, Arc::clone(&t.algebra), basis, actions)
    };
    Ok((build(names.0, &plus)?, build(names.1, &minus)?))
}

/// Shift every basis degree upward by k (the suspension).
pub fn suspend(m: &ModulePresentation, k: u32) -> ModulePresentation {
    let basis = m
        .basis
        .iter()
        .map(|(id, d)| (id.clone(), d + k))
        .collect();
    let mut actions = Vec::new();
    for (op, table) in &m.gen_actions {
        for (src, combo) in table.iter().enumerate() {
            if !combo.is_empty() {
                actions.push((op.clone(), src, combo.clone()));
            }
        }
    }
    ModulePresentation::new(
        &format!("S{}{}", k, m.name),
        Arc::clone(&m.algebra),
        basis,
        actions,
    )
    .expect("suspension preserves validity")
}

/// Built-in module presentations.
pub fn module_from_presentation(
    name: &str,
    algebra: Arc<Algebra>,
) -> Result<ModulePresentation, String> {
    let q = MilnorMonomial::q_gen;
    let p1 = MilnorMonomial::p_power(1);
    match name {
        "S" => ModulePresentation::new("S", algebra, vec![("e0".into(), 0)], vec![]),
        "V0" => {
            expect_algebra(name, &algebra, QuotientAlgebra::Full)?;
            ModulePresentation::new(
                "V0",
                algebra,
                vec![("e0".into(), 0), ("e1".into(), 1)],
                vec![(q(0), 0, vec![(1, ONE)])],
            )
        }
        "V1" => {
            expect_algebra(name, &algebra, QuotientAlgebra::Full)?;
            ModulePresentation::new(
                "V1",
                algebra,
                vec![
                    ("e0".into(), 0),
                    ("e1".into(), 1),
                    ("e5".into(), 5),
                    ("e6".into(), 6),
                ],
                vec![
                    (q(0), 0, vec![(1, ONE)]),
                    (q(0), 2, vec![(3, ONE)]),
                    (p1.clone(), 1, vec![(2, ONE)]),
                ],
            )
        }
        "Y2_thom" => {
            expect_algebra(name, &algebra, QuotientAlgebra::Full)?;
            ModulePresentation::new(
                "Y2_thom",
                algebra,
                vec![("y0".into(), 0), ("y4".into(), 4), ("y8".into(), 8)],
                vec![
                    (p1.clone(), 0, vec![(1, ONE)]),
                    (p1.clone(), 1, vec![(2, TWO)]),
                ],
            )
        }
        "X_cofiber" => {
            // cofiber of beta_1: the attaching map has Adams filtration 2, so
            // no primary operation links the two wedge pieces
            expect_algebra(name, &algebra, QuotientAlgebra::Full)?;
            ModulePresentation::new(
                "X_cofiber",
                algebra,
                vec![
                    ("e0".into(), 0),
                    ("e1".into(), 1),
                    ("e5".into(), 5),
                    ("e6".into(), 6),
                    ("e11".into(), 11),
                    ("e12".into(), 12),
                ],
                vec![
                    (q(0), 0, vec![(1, ONE)]),
                    (q(0), 2, vec![(3, ONE)]),
                    (q(0), 4, vec![(5, ONE)]),
                    (p1.clone(), 1, vec![(2, ONE)]),
                ],
            )
        }
        "Y1_split" | "Y2_split" => {
            expect_algebra(name, &algebra, QuotientAlgebra::Full)?;
            let v1 = module_from_presentation("V1", Arc::clone(&algebra))?;
            let t = tensor_module("V1xV1", &v1, &v1)?;
            let degrees: Vec<u32> = v1.basis().iter().map(|(_, d)| *d).collect();
            let (plus, minus) =
                twist_eigenmodules(&t, v1.dim(), &degrees, ("Y1_split", "Y2_split"))?;
            Ok(if name == "Y1_split" { plus } else { minus })
        }
        "EQ2" => {
            expect_algebra(name, &algebra, QuotientAlgebra::ModE(1))?;
            ModulePresentation::new(
                "EQ2",
                algebra,
                vec![("m0".into(), 0), ("m17".into(), 17)],
                vec![(q(2), 0, vec![(1, ONE)])],
            )
        }
        "EQ1" => {
            expect_algebra(name, &algebra, QuotientAlgebra::ModE(0))?;
            ModulePresentation::new(
                "EQ1",
                algebra,
                vec![("m0".into(), 0), ("m5".into(), 5)],
                vec![(q(1), 0, vec![(1, ONE)])],
            )
        }
        other => Err(format!("unknown builtin module {other}")),
    }
}

fn expect_algebra(
    name: &str,
    algebra: &Arc<Algebra>,
    expected: QuotientAlgebra,
) -> Result<(), String> {
    if algebra.kind == expected {
        Ok(())
    } else {
        Err(format!(
            "module {name} is defined over {}, not {}",
            expected.name(),
            algebra.kind.name()
        ))
    }
}

/// Parse the line-oriented module presentation format:
///   basis <id> <degree>
///   act Q<n> <src> = <lin.comb>
///   act P^<k> <src> = <lin.comb>
/// Unspecified actions default to zero. `#` starts a comment.
pub fn parse_module_file(
    name: &str,
    text: &str,
    algebra: Arc<Algebra>,
) -> Result<ModulePresentation, String> {
    let mut basis: Vec<(String, u32)> = Vec::new();
    let mut raw_actions: Vec<(MilnorMonomial, String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("basis") => {
                let id = words
                    .next()
                    .ok_or(format!("line {}: missing basis id", lineno + 1))?;
                let deg: u32 = words
                    .next()
                    .ok_or(format!("line {}: missing degree", lineno + 1))?
                    .parse()
                    .map_err(|e| format!("line {}: bad degree: {e}", lineno + 1))?;
                basis.push((id.to_string(), deg));
            }
            Some("act") => {
                let op = words
                    .next()
                    .ok_or(format!("line {}: missing operation", lineno + 1))?;
                let mono = parse_operation(op)
                    .ok_or(format!("line {}: unknown operation {op}", lineno + 1))?;
                let src = words
                    .next()
                    .ok_or(format!("line {}: missing source", lineno + 1))?;
                let rest: Vec<&str> = words.collect();
                if rest.first() != Some(&"=") {
                    return Err(format!("line {}: expected '='", lineno + 1));
                }
                raw_actions.push((mono, src.to_string(), rest[1..].join(" ")));
            }
            Some(other) => {
                return Err(format!("line {}: unknown directive {other}", lineno + 1))
            }
            None => {}
        }
    }
    let index: HashMap<&str, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();
    let mut actions = Vec::new();
    for (op, src, combo) in raw_actions {
        let src_idx = *index
            .get(src.as_str())
            .ok_or(format!("unknown basis id {src}"))?;
        let parsed = parse_linear_combination(&combo, &index)?;
        actions.push((op, src_idx, parsed));
    }
    ModulePresentation::new(name, algebra, basis, actions)
}

fn parse_operation(op: &str) -> Option<MilnorMonomial> {
    if let Some(n) = op.strip_prefix('Q') {
        return n.parse::<u32>().ok().map(MilnorMonomial::q_gen);
    }
    if let Some(k) = op.strip_prefix("P^") {
        return k.parse::<u32>().ok().map(MilnorMonomial::p_power);
    }
    None
}

/// `2 e5 + e6`, `0`, `e1`, `2 e5 - e6`
pub fn parse_linear_combination(
    text: &str,
    index: &HashMap<&str, usize>,
) -> Result<Vec<(usize, F3)>, String> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut out: BTreeMap<usize, F3> = BTreeMap::new();
    let normalized = text.replace('+', " + ").replace('-', " - ");
    let mut sign = ONE;
    let mut coeff: Option<F3> = None;
    for token in normalized.split_whitespace() {
        match token {
            "+" => {
                sign = ONE;
                coeff = None;
            }
            "-" => {
                sign = TWO;
                coeff = None;
            }
            t => {
                if let Ok(v) = t.parse::<i64>() {
                    coeff = Some(F3::new(v));
                } else {
                    let idx = *index.get(t).ok_or(format!("unknown basis id {t}"))?;
                    let c = sign * coeff.unwrap_or(ONE);
                    let e = out.entry(idx).or_insert(ZERO);
                    *e = *e + c;
                    sign = ONE;
                    coeff = None;
                }
            }
        }
    }
    Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full() -> Arc<Algebra> {
        Algebra::new(QuotientAlgebra::Full)
    }

    #[test]
    fn v1_shape() {
        let v1 = module_from_presentation("V1", full()).unwrap();
        assert_eq!(v1.dim(), 4);
        let degs: Vec<u32> = v1.basis().iter().map(|(_, d)| *d).collect();
        assert_eq!(degs, vec![0, 1, 5, 6]);
    }

    #[test]
    fn v1_q1_consistency() {
        // Q1 e0 = P^1(Q0 e0) - Q0(P^1 e0) = e5
        let v1 = module_from_presentation("V1", full()).unwrap();
        let q1 = v1.action_of(&MilnorMonomial::q_gen(1));
        assert_eq!(q1[0], vec![(2, ONE)]);
    }

    #[test]
    fn y2_thom_p2_forced() {
        // P^2 y0 = y8 follows from P^1 P^1 = 2 P^2
        let y2 = module_from_presentation("Y2_thom", full()).unwrap();
        let p2 = y2.action_of(&MilnorMonomial::p_power(2));
        assert_eq!(p2[0], vec![(2, ONE)]);
    }

    #[test]
    fn s_passes_axioms() {
        let s = module_from_presentation("S", full()).unwrap();
        assert!(check_module_axioms(&s, 30).pass);
    }

    #[test]
    fn v1_passes_axioms_to_20() {
        let v1 = module_from_presentation("V1", full()).unwrap();
        let rep = check_module_axioms(&v1, 20);
        assert!(rep.pass, "counterexample: {:?}", rep.counterexample);
    }

    #[test]
    fn degree_corrupted_v1_rejected() {
        // P^1 e1 = e6 violates degrees (1 + 4 != 6)
        let err = ModulePresentation::new(
            "V1bad",
            full(),
            vec![
                ("e0".into(), 0),
                ("e1".into(), 1),
                ("e5".into(), 5),
                ("e6".into(), 6),
            ],
            vec![
                (MilnorMonomial::q_gen(0), 0, vec![(1, ONE)]),
                (MilnorMonomial::q_gen(0), 2, vec![(3, ONE)]),
                (MilnorMonomial::p_power(1), 1, vec![(3, ONE)]),
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn axiom_violation_detected_with_witness() {
        // a Q0-chain of length two violates Q0 Q0 = 0
        let bad = ModulePresentation::new(
            "bad",
            full(),
            vec![("m0".into(), 0), ("m1".into(), 1), ("m2".into(), 2)],
            vec![
                (MilnorMonomial::q_gen(0), 0, vec![(1, ONE)]),
                (MilnorMonomial::q_gen(0), 1, vec![(2, ONE)]),
            ],
        )
        .unwrap();
        let rep = check_module_axioms(&bad, 10);
        assert!(!rep.pass);
        let (a, b, x) = rep.counterexample.unwrap();
        assert_eq!(a, MilnorMonomial::q_gen(0));
        assert_eq!(b, MilnorMonomial::q_gen(0));
        assert_eq!(x, "m0");
    }

    #[test]
    fn parse_module_roundtrip() {
        let text = "
# mod 3 Moore spectrum
basis e0 0
basis e1 1
act Q0 e0 = e1
";
        let m = parse_module_file("V0", text, full()).unwrap();
        assert_eq!(m.dim(), 2);
        let q0 = m.action_of(&MilnorMonomial::q_gen(0));
        assert_eq!(q0[0], vec![(1, ONE)]);
        assert!(check_module_axioms(&m, 12).pass);
    }

    #[test]
    fn splitting_modules_are_valid() {
        let y1 = module_from_presentation("Y1_split", full()).unwrap();
        let y2 = module_from_presentation("Y2_split", full()).unwrap();
        assert_eq!(y1.dim(), 8);
        assert_eq!(y2.dim(), 8);
        let mut d1: Vec<u32> = y1.basis().iter().map(|(_, d)| *d).collect();
        d1.sort();
        assert_eq!(d1, vec![0, 1, 5, 6, 6, 7, 11, 12]);
        let mut d2: Vec<u32> = y2.basis().iter().map(|(_, d)| *d).collect();
        d2.sort();
        assert_eq!(d2, vec![1, 2, 5, 6, 6, 7, 10, 11]);
        assert!(check_module_axioms(&y1, 16).pass);
        assert!(check_module_axioms(&y2, 16).pass);
    }

    #[test]
    fn tensor_square_passes_axioms() {
        let v1 = module_from_presentation("V1", full()).unwrap();
        let t = tensor_module("V1xV1", &v1, &v1).unwrap();
        let rep = check_module_axioms(&t, 18);
        assert!(rep.pass, "counterexample: {:?}", rep.counterexample);
    }
}
