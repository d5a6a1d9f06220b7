//! Cell-structure spectral sequence bookkeeping for the mod-3 Moore spectrum
//! (cells 0, 1) and the four-cell complex (cells 0, 1, 5, 6), fed by a
//! shipped stable-stems table.
//!
//! The differentials are pinned by the attaching maps:
//!   d1(g[k]) = (3 g)[k-1]        for k = 1, 6
//!   d4(g[5]) = (alpha1 g)[1]
//!   d5(g[6]) = <g, 3, alpha1>[1]
//!   d5(g[5]) = <g, alpha1, 3>[0]
//! Each generator of order 3^k contributes k F3-layers (g, 3g, ...), and
//! page computation is plain linear algebra over F3 on those layers.

use gf3::{Mat, PackedVec, RowSolver, F3, ONE};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Complex {
    V0,
    V1,
}

impl Complex {
    pub fn cells(&self) -> &'static [u32] {
        match self {
            Complex::V0 => &[0, 1],
            Complex::V1 => &[0, 1, 5, 6],
        }
    }
}

/// a layer is (generator index, power of 3)
pub type Layer = (usize, u32);

#[derive(Clone, Debug, PartialEq)]
pub enum BracketValue {
    Zero,
    Value(Layer),
    /// undetermined: either zero or the given value (a dotted differential)
    Branch(Layer),
}

pub struct GenInfo {
    pub name: String,
    pub stem: i64,
    pub order_exp: u32,
    pub alpha1: Option<Layer>,
    /// brackets per layer of this generator
    pub b35: BTreeMap<u32, BracketValue>,
    pub b53: BTreeMap<u32, BracketValue>,
}

pub struct StemTable {
    pub gens: Vec<GenInfo>,
    /// stem ranges declared fully transcribed
    pub complete: Vec<(i64, i64)>,
}

impl StemTable {
    pub fn generators_in_stem(&self, n: i64) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&i| self.gens[i].stem == n)
            .collect()
    }

    pub fn is_complete(&self, n: i64) -> bool {
        if n < 0 || n == 0 {
            return true;
        }
        self.complete.iter().any(|&(lo, hi)| lo <= n && n <= hi)
    }

    pub fn parse(text: &str) -> Result<StemTable, String> {
        let mut gens: Vec<GenInfo> = Vec::new();
        let mut complete = Vec::new();
        let mut pending: Vec<Vec<String>> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "stem" => {
                    if words.len() != 6 || words[2] != "gen" || words[4] != "order" {
                        return Err(format!("line {}: bad stem line", no + 1));
                    }
                    let stem: i64 = words[1].parse().map_err(|e| format!("{e}"))?;
                    let order: u64 = words[5].parse().map_err(|e| format!("{e}"))?;
                    let mut order_exp = 0u32;
                    let mut o = order;
                    while o > 1 {
                        if o % 3 != 0 {
                            return Err(format!(
                                "line {}: order must be a power of 3",
                                no + 1
                            ));
                        }
                        o /= 3;
                        order_exp += 1;
                    }
                    if order_exp == 0 {
                        return Err(format!("line {}: trivial generator", no + 1));
                    }
                    gens.push(GenInfo {
                        name: words[3].to_string(),
                        stem,
                        order_exp,
                        alpha1: None,
                        b35: BTreeMap::new(),
                        b53: BTreeMap::new(),
                    });
                }
                "complete" => {
                    let lo: i64 = words[1].parse().map_err(|e| format!("{e}"))?;
                    let hi: i64 = words[2].parse().map_err(|e| format!("{e}"))?;
                    complete.push((lo, hi));
                }
                "alpha1" | "bracket" => {
                    pending.push(words.iter().map(|s| s.to_string()).collect());
                }
                other => {
                    return Err(format!("line {}: unknown directive {other}", no + 1))
                }
            }
        }
        let find = |gens: &[GenInfo], name: &str| -> Result<usize, String> {
            gens.iter()
                .position(|g| g.name == name)
                .ok_or(format!("unknown generator {name}"))
        };
        // layer expression: `name`, `3 name`, `9 name`
        let parse_layer = |gens: &[GenInfo], toks: &[String]| -> Result<Layer, String> {
            match toks.len() {
                1 => Ok((find(gens, &toks[0])?, 0)),
                2 => {
                    let mult: u64 = toks[0].parse().map_err(|e| format!("{e}"))?;
                    let power = match mult {
                        3 => 1,
                        9 => 2,
                        _ => return Err(format!("bad layer multiplier {mult}")),
                    };
                    Ok((find(gens, &toks[1])?, power))
                }
                _ => Err(format!("bad layer expression {:?}", toks)),
            }
        };
        for words in pending {
            let eq = words
                .iter()
                .position(|a| a == "=")
                .ok_or("missing = in table line")?;
            match words[0].as_str() {
                "alpha1" => {
                    let src = find(&gens, &words[1])?;
                    let val = parse_layer(&gens, &words[eq + 1..])?;
                    gens[src].alpha1 = Some(val);
                }
                "bracket" => {
                    let which = words[1].clone();
                    let (src_gen, src_layer) = parse_layer(&gens, &words[2..eq])?;
                    let rhs = &words[eq + 1..];
                    let value = if rhs.first().map(|s| s.as_str()) == Some("branch") {
                        BracketValue::Branch(parse_layer(&gens, &rhs[1..])?)
                    } else if rhs.first().map(|s| s.as_str()) == Some("0") {
                        BracketValue::Zero
                    } else {
                        BracketValue::Value(parse_layer(&gens, rhs)?)
                    };
                    match which.as_str() {
                        "b35" => gens[src_gen].b35.insert(src_layer, value),
                        "b53" => gens[src_gen].b53.insert(src_layer, value),
                        other => return Err(format!("unknown bracket kind {other}")),
                    };
                }
                _ => unreachable!(),
            }
        }
        Ok(StemTable { gens, complete })
    }
}

/// one chart dot: a generator layer on a cell
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct AhssClass {
    pub gen: usize,
    pub layer: u32,
    pub cell: u32,
}

pub struct E1Window {
    pub complex: Complex,
    pub lo: i64,
    pub hi: i64,
    pub classes: Vec<AhssClass>,
}

impl E1Window {
    pub fn stem_of(&self, table: &StemTable, c: AhssClass) -> i64 {
        table.gens[c.gen].stem + c.cell as i64
    }
}

/// E1 over a stem window: one dot per (generator layer, cell).
pub fn build_e1(complex: Complex, table: &StemTable, lo: i64, hi: i64) -> E1Window {
    let mut classes = Vec::new();
    for (gi, g) in table.gens.iter().enumerate() {
        for &cell in complex.cells() {
            let stem = g.stem + cell as i64;
            if stem < lo || stem > hi {
                continue;
            }
            for layer in 0..g.order_exp {
                classes.push(AhssClass { gen: gi, layer, cell });
            }
        }
    }
    classes.sort();
    E1Window {
        complex,
        lo,
        hi,
        classes,
    }
}

pub struct AhssRun {
    pub window: E1Window,
    /// surviving classes per stem, as combinations of E1 dots
    pub survivors: Vec<(i64, Vec<Vec<(AhssClass, F3)>>)>,
}

impl AhssRun {
    pub fn rank(&self, stem: i64) -> usize {
        self.survivors
            .iter()
            .find(|(n, _)| *n == stem)
            .map(|(_, v)| v.len())
            .unwrap_or(0)
    }

    /// names of the surviving leading dots at a stem
    pub fn generators(&self, table: &StemTable, stem: i64) -> Vec<String> {
        self.survivors
            .iter()
            .find(|(n, _)| *n == stem)
            .map(|(_, v)| {
                v.iter()
                    .map(|combo| {
                        let (c, _) = combo[0];
                        let mult = match c.layer {
                            0 => "",
                            1 => "3*",
                            _ => "9*",
                        };
                        format!("{}{}[{}]", mult, table.gens[c.gen].name, c.cell)
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// value of the page-r differential on a dot (None when zero or when the
/// target leaves the complex)
fn differential(
    table: &StemTable,
    complex: Complex,
    c: AhssClass,
    r: u32,
    branch_on: bool,
) -> Option<AhssClass> {
    let g = &table.gens[c.gen];
    let resolve = |v: Option<&BracketValue>| -> Option<Layer> {
        match v {
            None | Some(BracketValue::Zero) => None,
            Some(BracketValue::Value(l)) => Some(*l),
            Some(BracketValue::Branch(l)) => branch_on.then_some(*l),
        }
    };
    let (target, tcell): (Layer, u32) = match (r, c.cell) {
        (1, 1) | (1, 6) => {
            if c.layer + 1 < g.order_exp {
                ((c.gen, c.layer + 1), c.cell - 1)
            } else {
                return None;
            }
        }
        (4, 5) => {
            if c.layer > 0 {
                return None;
            }
            (g.alpha1?, 1)
        }
        (5, 6) => (resolve(g.b35.get(&c.layer))?, 1),
        (5, 5) => (resolve(g.b53.get(&c.layer))?, 0),
        _ => return None,
    };
    if !complex.cells().contains(&tcell) {
        return None;
    }
    let (tg, tl) = target;
    if tl >= table.gens[tg].order_exp {
        return None;
    }
    Some(AhssClass {
        gen: tg,
        layer: tl,
        cell: tcell,
    })
}

/// Run the spectral sequence over a window.
pub fn run_ahss(table: &StemTable, window: E1Window, branch_on: bool) -> AhssRun {
    let n = window.classes.len();
    let index: BTreeMap<AhssClass, usize> = window
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, i))
        .collect();
    let mut alive: Vec<PackedVec> = (0..n)
        .map(|i| {
            let mut v = PackedVec::zero(n);
            v.set(i, ONE);
            v
        })
        .collect();
    for r in [1u32, 4, 5] {
        let mut d = Mat::zero(alive.len(), n);
        for (row, v) in alive.iter().enumerate() {
            for (i, c) in v.iter_nonzero() {
                if let Some(t) =
                    differential(table, window.complex, window.classes[i], r, branch_on)
                {
                    if let Some(&j) = index.get(&t) {
                        let cur = d.get(row, j);
                        d.set(row, j, cur + c);
                    }
                }
            }
        }
        let solver = RowSolver::new(&d);
        let kernel: Vec<PackedVec> = solver
            .kernel_rows()
            .iter()
            .map(|krow| {
                let mut v = PackedVec::zero(n);
                for (i, c) in krow.iter_nonzero() {
                    v.axpy(c, &alive[i]);
                }
                v
            })
            .collect();
        let images: Vec<PackedVec> = (0..alive.len())
            .map(|row| {
                let mut img = PackedVec::zero(n);
                for (j, c) in d.row(row).iter_nonzero() {
                    img.set(j, c);
                }
                img
            })
            .filter(|v| !v.is_zero())
            .collect();
        // new alive = kernel modulo images
        let mut ech: Vec<(usize, PackedVec)> = Vec::new();
        let mut reduce_insert = |v: &PackedVec, ech: &mut Vec<(usize, PackedVec)>| {
            let mut res = v.clone();
            for (p, row) in ech.iter() {
                let c = res.get(*p);
                if !c.is_zero() {
                    res.axpy(-c, row);
                }
            }
            if let Some(lead) = res.leading_index() {
                let inv = res.get(lead).inverse().unwrap();
                res.scale(inv);
                ech.push((lead, res.clone()));
                ech.sort_by_key(|(p, _)| *p);
                Some(res)
            } else {
                None
            }
        };
        let mut new_alive = Vec::new();
        for img in &images {
            reduce_insert(img, &mut ech);
        }
        for k in &kernel {
            if let Some(res) = reduce_insert(k, &mut ech) {
                new_alive.push(res);
            }
        }
        alive = new_alive;
    }
    let mut by_stem: BTreeMap<i64, Vec<Vec<(AhssClass, F3)>>> = BTreeMap::new();
    for v in alive {
        let combo: Vec<(AhssClass, F3)> = v
            .iter_nonzero()
            .map(|(i, c)| (window.classes[i], c))
            .collect();
        let stem = window.stem_of(table, combo[0].0);
        by_stem.entry(stem).or_default().push(combo);
    }
    for m in window.lo..=window.hi {
        by_stem.entry(m).or_default();
    }
    AhssRun {
        window,
        survivors: by_stem.into_iter().collect(),
    }
}

/// Certified rank of pi_n: runs a window around the stem after checking the
/// contributing sphere stems are declared complete in the table.
pub fn homotopy_rank(
    table: &StemTable,
    complex: Complex,
    stem: i64,
    branch_on: bool,
) -> Result<usize, String> {
    for m in [stem - 1, stem, stem + 1] {
        for &cell in complex.cells() {
            let sphere = m - cell as i64;
            if sphere >= 0 && !table.is_complete(sphere) {
                return Err(format!(
                    "sphere stem {sphere} is not declared complete in the table"
                ));
            }
        }
    }
    let window = build_e1(complex, table, stem - 1, stem + 1);
    let run = run_ahss(table, window, branch_on);
    Ok(run.rank(stem))
}

pub fn builtin_table() -> StemTable {
    StemTable::parse(include_str!("../../../data/stems.txt")).expect("shipped table parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parses() {
        let t = builtin_table();
        assert!(t.gens.len() > 30);
        assert!(t.is_complete(55));
        assert!(!t.is_complete(40));
    }

    #[test]
    fn v0_stem_56_rank_2() {
        let t = builtin_table();
        assert_eq!(homotopy_rank(&t, Complex::V0, 56, true).unwrap(), 2);
    }

    #[test]
    fn v1_acceptance_ranks() {
        let t = builtin_table();
        assert_eq!(homotopy_rank(&t, Complex::V1, 72, true).unwrap(), 0);
        assert_eq!(homotopy_rank(&t, Complex::V1, 69, true).unwrap(), 1);
        assert_eq!(homotopy_rank(&t, Complex::V1, 79, true).unwrap(), 0);
        assert_eq!(homotopy_rank(&t, Complex::V1, 98, true).unwrap(), 3);
        assert_eq!(homotopy_rank(&t, Complex::V1, 99, true).unwrap(), 4);
    }

    #[test]
    fn ledger_support_ranks() {
        let t = builtin_table();
        assert_eq!(homotopy_rank(&t, Complex::V1, 57, true).unwrap(), 0);
        assert_eq!(homotopy_rank(&t, Complex::V1, 58, true).unwrap(), 1);
        assert_eq!(homotopy_rank(&t, Complex::V1, 67, true).unwrap(), 0);
        assert_eq!(homotopy_rank(&t, Complex::V1, 68, true).unwrap(), 2);
        assert_eq!(homotopy_rank(&t, Complex::V1, 70, true).unwrap(), 1);
        assert_eq!(homotopy_rank(&t, Complex::V1, 78, true).unwrap(), 1);
        assert_eq!(homotopy_rank(&t, Complex::V1, 89, true).unwrap(), 2);
    }

    #[test]
    fn branch_replays_undetermined_state() {
        let t = builtin_table();
        // without the dotted differential: pi78 rank 2, pi79 rank 1
        assert_eq!(homotopy_rank(&t, Complex::V1, 78, false).unwrap(), 2);
        assert_eq!(homotopy_rank(&t, Complex::V1, 79, false).unwrap(), 1);
    }

    #[test]
    fn stem_69_generator() {
        let t = builtin_table();
        let w = build_e1(Complex::V1, &t, 68, 70);
        let run = run_ahss(&t, w, true);
        let names = run.generators(&t, 69);
        assert_eq!(names, vec!["x68[1]".to_string()]);
    }

    #[test]
    fn stem_0_bottom_cell() {
        let t = builtin_table();
        let w = build_e1(Complex::V1, &t, -1, 1);
        let run = run_ahss(&t, w, true);
        assert_eq!(run.rank(0), 1);
    }

    #[test]
    fn d1_determined_by_mul3_only() {
        // no differentials below d4 other than d1 exist for these cells
        let t = builtin_table();
        let w = build_e1(Complex::V1, &t, 60, 75);
        for c in &w.classes {
            for r in [2u32, 3] {
                assert!(differential(&t, Complex::V1, *c, r, true).is_none());
            }
        }
    }
}
