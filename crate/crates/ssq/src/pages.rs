//! Windowed page computation: the ledger's accepted differentials drive an
//! E2 -> E_r reduction over a stem window of the chart, with subquotient
//! bookkeeping per bidegree. Disjunctions are handled by the caller running
//! one computation per branch assignment.

use gf3::{PackedVec, RowSolver, F3, ONE};
use resolution::ChartContext;
use std::collections::BTreeMap;

use crate::ledger::ClassVec;

pub type Cell = (u32, u32);

/// a differential resolved to chart vectors
#[derive(Clone, Debug)]
pub struct ResolvedDifferential {
    pub page: u32,
    pub source_cell: Cell,
    pub source: PackedVec,
    pub target_cell: Cell,
    pub target: PackedVec,
    pub provenance: String,
}

pub fn to_local(ctx: &ChartContext, v: &ClassVec) -> Option<(Cell, PackedVec)> {
    let (s, t) = (v.first()?.0.s, v.first()?.0.t);
    let dim = ctx.res.dim(s, t);
    let mut out = PackedVec::zero(dim);
    for (c, x) in v {
        if (c.s, c.t) != (s, t) {
            return None;
        }
        out.set(c.index, *x);
    }
    Some(((s, t), out))
}

struct Echelon {
    rows: Vec<(usize, PackedVec)>,
}

impl Echelon {
    fn new() -> Echelon {
        Echelon { rows: Vec::new() }
    }

    fn reduce(&self, v: &PackedVec) -> PackedVec {
        let mut res = v.clone();
        for (p, row) in &self.rows {
            let c = res.get(*p);
            if !c.is_zero() {
                res.axpy(-c, row);
            }
        }
        res
    }

    fn insert(&mut self, v: &PackedVec) -> Option<PackedVec> {
        let mut res = self.reduce(v);
        let lead = res.leading_index()?;
        let inv = res.get(lead).inverse().unwrap();
        res.scale(inv);
        self.rows.push((lead, res.clone()));
        self.rows.sort_by_key(|(p, _)| *p);
        Some(res)
    }
}

pub struct CellPage {
    /// representatives of an E_r-basis (reduced mod boundaries)
    pub alive: Vec<PackedVec>,
    /// echelon of the boundaries accumulated so far
    bound: Vec<(usize, PackedVec)>,
}

impl CellPage {
    /// the E_r class of an E2 vector: None if the vector is not a surviving
    /// cycle (it died supporting a differential), Some(residual) otherwise
    /// (zero residual = killed).
    pub fn class_of(&self, v: &PackedVec) -> Option<PackedVec> {
        let ech = Echelon {
            rows: self.bound.clone(),
        };
        let res = ech.reduce(v);
        if res.is_zero() {
            return Some(res);
        }
        // expressible in the alive span?
        if self.alive.is_empty() {
            return None;
        }
        let mut m = gf3::Mat::zero(self.alive.len(), res.len());
        for (i, a) in self.alive.iter().enumerate() {
            for (c, x) in a.iter_nonzero() {
                m.set(i, c, x);
            }
        }
        RowSolver::new(&m).in_image(&res).then_some(res)
    }
}

pub struct PageRun {
    pub max_page: u32,
    /// snapshots[r] = state of every cell at page r (before d_r fires)
    pub snapshots: BTreeMap<u32, BTreeMap<Cell, CellPage>>,
}

/// Run pages 2..=max_page over the given cells.
pub fn run_pages(
    ctx: &ChartContext,
    cells: &[Cell],
    diffs: &[ResolvedDifferential],
    max_page: u32,
) -> PageRun {
    let mut alive: BTreeMap<Cell, Vec<PackedVec>> = BTreeMap::new();
    let mut bound: BTreeMap<Cell, Echelon> = BTreeMap::new();
    for &(s, t) in cells {
        let dim = ctx.res.dim(s, t);
        let basis = (0..dim)
            .map(|i| {
                let mut v = PackedVec::zero(dim);
                v.set(i, ONE);
                v
            })
            .collect();
        alive.insert((s, t), basis);
        bound.insert((s, t), Echelon::new());
    }
    let mut snapshots = BTreeMap::new();
    let snap = |alive: &BTreeMap<Cell, Vec<PackedVec>>,
                bound: &BTreeMap<Cell, Echelon>|
     -> BTreeMap<Cell, CellPage> {
        alive
            .iter()
            .map(|(c, a)| {
                (
                    *c,
                    CellPage {
                        alive: a.clone(),
                        bound: bound[c].rows.clone(),
                    },
                )
            })
            .collect()
    };
    for r in 2..=max_page {
        snapshots.insert(r, snap(&alive, &bound));
        // build the page-r map per source cell
        let mut images: Vec<(Cell, PackedVec)> = Vec::new();
        let mut new_alive: BTreeMap<Cell, Vec<PackedVec>> = BTreeMap::new();
        for (&cell, basis) in &alive {
            let entries: Vec<&ResolvedDifferential> = diffs
                .iter()
                .filter(|d| d.page == r && d.source_cell == cell)
                .collect();
            if entries.is_empty() {
                new_alive.insert(cell, basis.clone());
                continue;
            }
            // echelon of the (reduced) sources with their targets; an
            // entry whose source is no longer a nonzero class of this page
            // contributes nothing
            let becheck = &bound[&cell];
            let state = CellPage {
                alive: basis.clone(),
                bound: becheck.rows.clone(),
            };
            let mut src_ech: Vec<(usize, PackedVec, PackedVec)> = Vec::new();
            for e in &entries {
                match state.class_of(&e.source) {
                    Some(res) if !res.is_zero() => {}
                    _ => continue,
                }
                let mut res = becheck.reduce(&e.source);
                let mut tgt = e.target.clone();
                for (p, row, trow) in &src_ech {
                    let c = res.get(*p);
                    if !c.is_zero() {
                        res.axpy(-c, row);
                        tgt.axpy(-c, trow);
                    }
                }
                if let Some(lead) = res.leading_index() {
                    let inv = res.get(lead).inverse().unwrap();
                    res.scale(inv);
                    tgt.scale(inv);
                    src_ech.push((lead, res, tgt));
                    src_ech.sort_by_key(|(p, _, _)| *p);
                }
            }
            // apply to the alive basis: coefficients against src_ech rows
            let mut kernel: Vec<PackedVec> = Vec::new();
            for x in basis {
                let mut res = x.clone();
                let mut img = PackedVec::zero(entries[0].target.len());
                for (p, row, trow) in &src_ech {
                    let c = res.get(*p);
                    if !c.is_zero() {
                        res.axpy(-c, row);
                        img.axpy(c, trow);
                    }
                }
                if img.is_zero() {
                    kernel.push(x.clone());
                } else {
                    images.push((entries[0].target_cell, img));
                    // the source class dies; a complement combination may
                    // survive and is captured when reducing other basis
                    // vectors (handled by the echelon ordering)
                }
            }
            // proper kernel: vectors of span(basis) with zero image
            // (the loop above misses combinations; redo linearly)
            let dimv = basis.first().map(|b| b.len()).unwrap_or(0);
            let mut dmat = gf3::Mat::zero(basis.len(), entries[0].target.len());
            for (i, x) in basis.iter().enumerate() {
                let mut res = x.clone();
                for (p, row, trow) in &src_ech {
                    let c = res.get(*p);
                    if !c.is_zero() {
                        res.axpy(-c, row);
                        for (j, tv) in trow.iter_nonzero() {
                            let cur = dmat.get(i, j);
                            dmat.set(i, j, cur + c * tv);
                        }
                    }
                }
            }
            let mut proper_kernel: Vec<PackedVec> = Vec::new();
            for krow in RowSolver::new(&dmat).kernel_rows() {
                let mut v = PackedVec::zero(dimv);
                for (i, c) in krow.iter_nonzero() {
                    v.axpy(c, &basis[i]);
                }
                proper_kernel.push(v);
            }
            let _ = kernel;
            new_alive.insert(cell, proper_kernel);
        }
        // add images as boundaries and reduce the new alive bases
        for (cell, img) in images {
            if let Some(ech) = bound.get_mut(&cell) {
                ech.insert(&img);
            }
        }
        for (cell, basis) in new_alive.iter_mut() {
            let ech = &bound[cell];
            let mut reduced = Vec::new();
            let mut local = Echelon::new();
            for v in basis.iter() {
                let r1 = ech.reduce(v);
                if let Some(r2) = local.insert(&r1) {
                    reduced.push(r2);
                }
            }
            *basis = reduced;
        }
        alive = new_alive;
    }
    snapshots.insert(max_page + 1, snap(&alive, &bound));
    PageRun {
        max_page,
        snapshots,
    }
}

impl PageRun {
    pub fn cell_at(&self, r: u32, cell: Cell) -> Option<&CellPage> {
        self.snapshots.get(&r).and_then(|m| m.get(&cell))
    }

    /// E_r dimension of a cell
    pub fn dim_at(&self, r: u32, cell: Cell) -> usize {
        self.cell_at(r, cell).map(|c| c.alive.len()).unwrap_or(0)
    }

    /// the final page's state
    pub fn final_page(&self) -> u32 {
        self.max_page + 1
    }
}

/// convenience: a chart vector as (cell, local coordinates), failing on
/// mixed bidegrees
pub fn vec_of(ctx: &ChartContext, expr: &str) -> Result<(Cell, PackedVec), String> {
    let v = ctx.eval_expr(expr)?;
    if v.is_empty() {
        return Err(format!("{expr} is zero in the chart"));
    }
    to_local(ctx, &v).ok_or_else(|| format!("{expr} spans several bidegrees"))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Fate {
    /// zero in E_r for the given r (killed by an earlier page)
    KilledBy(u32),
    /// supported a differential on the given page (not a cycle afterwards)
    Supports(u32),
    /// still a nonzero class on the final computed page
    Survives,
}

impl PageRun {
    /// fate of an E2 vector of a cell across the run
    pub fn fate(&self, cell: Cell, v: &PackedVec, _f3: F3) -> Fate {
        for (&r, cells) in &self.snapshots {
            let Some(state) = cells.get(&cell) else { continue };
            match state.class_of(v) {
                Some(res) if res.is_zero() => return Fate::KilledBy(r - 1),
                Some(_) => {}
                None => return Fate::Supports(r - 1),
            }
        }
        Fate::Survives
    }
}
