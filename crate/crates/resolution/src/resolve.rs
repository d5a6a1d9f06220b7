//! Minimal free resolutions over a quotient Steenrod algebra.
//!
//! The resolution is grown cell by cell: for fixed internal degree t the
//! homological degrees are processed upward, adding new generators exactly
//! where the kernel of the previous differential is not yet covered. The
//! pivot rule of the underlying row reduction makes every generator choice
//! deterministic, so charts and caches are reproducible bit for bit.

use gf3::{Mat, PackedVec, RowSolver, F3, ONE};
use steenrod::{Algebra, MilnorMonomial, ModulePresentation, SteenrodElement};
use std::collections::HashMap;
use std::sync::Arc;

/// Identifies a basis element of the Ext chart: homological degree s,
/// internal degree t, position among the (s, t) generators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ExtClass {
    pub s: u32,
    pub t: u32,
    pub index: usize,
}

impl ExtClass {
    pub fn stem(&self) -> i64 {
        self.t as i64 - self.s as i64
    }
}

#[derive(Clone)]
pub struct Generator {
    pub t: u32,
    /// image under the differential: coordinates in F_{s-1} at degree t
    /// (for s = 0: coordinates in the module at degree t)
    pub image: Vec<(usize, SteenrodElement)>,
}

pub struct Level {
    pub gens: Vec<Generator>,
    /// positions of the generators with each internal degree
    pub by_degree: HashMap<u32, Vec<usize>>,
}

impl Level {
    fn new() -> Level {
        Level {
            gens: Vec::new(),
            by_degree: HashMap::new(),
        }
    }

    pub fn gens_in_degree(&self, t: u32) -> &[usize] {
        self.by_degree.get(&t).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

pub struct Resolution {
    pub algebra: Arc<Algebra>,
    pub module: Arc<ModulePresentation>,
    pub levels: Vec<Level>,
    /// resolution complete for s <= max_s and t <= max_t (once initialized)
    pub max_s: u32,
    pub max_t: u32,
    initialized: bool,
}

impl Resolution {
    pub fn new(algebra: Arc<Algebra>, module: Arc<ModulePresentation>) -> Resolution {
        Resolution {
            algebra,
            module,
            levels: Vec::new(),
            max_s: 0,
            max_t: 0,
            initialized: false,
        }
    }

    /// Number of chart classes at (s, t).
    pub fn dim(&self, s: u32, t: u32) -> usize {
        self.levels
            .get(s as usize)
            .map(|l| l.gens_in_degree(t).len())
            .unwrap_or(0)
    }

    pub fn classes_in(&self, s: u32, t: u32) -> Vec<ExtClass> {
        (0..self.dim(s, t))
            .map(|index| ExtClass { s, t, index })
            .collect()
    }

    /// Generator position in its level for a chart class.
    pub fn gen_position(&self, c: ExtClass) -> usize {
        self.levels[c.s as usize].gens_in_degree(c.t)[c.index]
    }

    /// Free-module coordinates of level s at internal degree t: one block of
    /// algebra basis coordinates per generator of degree <= t, in generator
    /// order. Returns (total dimension, per-generator offsets).
    pub fn coords(&self, s: u32, t: u32) -> (usize, Vec<(usize, u32, usize)>) {
        // (gen position, gen degree, offset)
        let mut offsets = Vec::new();
        let mut total = 0usize;
        if let Some(level) = self.levels.get(s as usize) {
            for (pos, g) in level.gens.iter().enumerate() {
                if g.t <= t {
                    let d = self.algebra.dim(t - g.t);
                    if d > 0 {
                        offsets.push((pos, g.t, total));
                        total += d;
                    }
                }
            }
        }
        (total, offsets)
    }

    /// Module coordinates at degree t (for the augmentation target).
    pub fn module_coords(&self, t: u32) -> Vec<usize> {
        self.module.basis_in_degree(t)
    }

    /// Expand the differential of level-s coordinates (s >= 1) at degree t
    /// into level-(s-1) coordinates, as a matrix with one row per source
    /// coordinate. Level 0 maps to the module through `augment_matrix`.
    pub fn differential_matrix(&self, s: u32, t: u32) -> Mat {
        assert!(s >= 1, "level 0 maps to the module; use augment_matrix");
        let (src_dim, src_offsets) = self.coords(s, t);
        let (dst_dim, dst_offsets) = self.coords(s - 1, t);
        let mut mat = Mat::zero(src_dim, dst_dim);
        if src_dim == 0 || dst_dim == 0 {
            return mat;
        }
        let dst_offset_of: HashMap<usize, usize> =
            dst_offsets.iter().map(|&(pos, _, off)| (pos, off)).collect();
        let level = &self.levels[s as usize];
        for &(pos, gt, src_off) in &src_offsets {
            let g = &level.gens[pos];
            let adeg = t - gt;
            for (tgt_pos, el) in &g.image {
                let Some(&dst_off) = dst_offset_of.get(tgt_pos) else {
                    continue;
                };
                for (mono, c) in el.terms() {
                    let bdeg = mono.degree();
                    let bidx = self
                        .algebra
                        .basis(bdeg)
                        .binary_search(mono)
                        .expect("differential entry not in algebra basis");
                    let rm = self.algebra.rmul_matrix(adeg, bdeg, bidx);
                    for ai in 0..rm.rows() {
                        mat.row_mut(src_off + ai)
                            .add_shifted(c, rm.row(ai), dst_off);
                    }
                }
            }
        }
        mat
    }

    /// The augmentation F_0 -> M expanded at degree t.
    pub fn augment_matrix(&self, t: u32) -> Mat {
        let (src_dim, src_offsets) = self.coords(0, t);
        let mc = self.module_coords(t);
        let mindex: HashMap<usize, usize> =
            mc.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let mut mat = Mat::zero(src_dim, mc.len());
        let level = match self.levels.first() {
            Some(l) => l,
            None => return mat,
        };
        for &(pos, gt, src_off) in &src_offsets {
            let g = &level.gens[pos];
            let adeg = t - gt;
            let abasis = self.algebra.basis(adeg);
            for (ai, alpha) in abasis.iter().enumerate() {
                let table = self.module.action_of(alpha);
                for (mbasis_idx, el) in &g.image {
                    // image entries at level 0: (module basis index, scalar)
                    let scalar = el.coefficient(&MilnorMonomial::unit());
                    for &(tgt, c) in &table[*mbasis_idx] {
                        if let Some(&col) = mindex.get(&tgt) {
                            let cur = mat.get(src_off + ai, col);
                            mat.set(src_off + ai, col, cur + scalar * c);
                        }
                    }
                }
            }
        }
        mat
    }

    /// Extend so the resolution is minimal and exact through
    /// (s <= s_max, t <= t_max). Idempotent on already-covered ranges.
    pub fn extend(&mut self, s_max: u32, t_max: u32) {
        let new_s = s_max.max(self.max_s);
        let new_t = t_max.max(self.max_t);
        while self.levels.len() <= new_s as usize {
            self.levels.push(Level::new());
        }
        // process cells column by column; finished columns are never touched
        for t in 0..=new_t {
            for s in 0..=new_s {
                let done = self.initialized && t <= self.max_t && s <= self.max_s;
                if !done {
                    self.fill_cell(s, t);
                }
            }
        }
        self.max_s = new_s;
        self.max_t = new_t;
        self.initialized = true;
    }

    fn fill_cell(&mut self, s: u32, t: u32) {
        // kernel of the previous differential at degree t, as rows
        let kernel_rows: Vec<PackedVec> = if s == 0 {
            let mc = self.module_coords(t);
            (0..mc.len())
                .map(|i| {
                    let mut v = PackedVec::zero(mc.len());
                    v.set(i, ONE);
                    v
                })
                .collect()
        } else if s == 1 {
            let aug = self.augment_matrix(t);
            RowSolver::new(&aug).kernel_rows().to_vec()
        } else {
            let d = self.differential_matrix(s - 1, t);
            RowSolver::new(&d).kernel_rows().to_vec()
        };
        if kernel_rows.is_empty() {
            return;
        }
        // image of the existing generators of level s at degree t
        let existing = if s == 0 {
            self.augment_matrix(t)
        } else {
            self.differential_matrix(s, t)
        };
        let mut reducer = IncrementalReducer::new(existing);
        let mut new_images: Vec<PackedVec> = Vec::new();
        for row in kernel_rows {
            if let Some(residual) = reducer.add_if_independent(&row) {
                new_images.push(residual);
            }
        }
        for img in new_images {
            let image = self.vector_to_image(s, t, &img);
            let level = &mut self.levels[s as usize];
            let pos = level.gens.len();
            level.gens.push(Generator { t, image });
            level.by_degree.entry(t).or_default().push(pos);
        }
    }

    /// Convert destination coordinates at (s-1, t) (or module coordinates
    /// for s = 0) into the symbolic image form.
    fn vector_to_image(&self, s: u32, t: u32, v: &PackedVec) -> Vec<(usize, SteenrodElement)> {
        if s == 0 {
            let mc = self.module_coords(t);
            return v
                .iter_nonzero()
                .map(|(i, c)| (mc[i], SteenrodElement::from_monomial(MilnorMonomial::unit(), c)))
                .collect();
        }
        let (_, offsets) = self.coords(s - 1, t);
        let mut out: HashMap<usize, SteenrodElement> = HashMap::new();
        for &(pos, gt, off) in &offsets {
            let basis = self.algebra.basis(t - gt);
            for (k, m) in basis.iter().enumerate() {
                let c = v.get(off + k);
                if !c.is_zero() {
                    out.entry(pos)
                        .or_insert_with(SteenrodElement::zero)
                        .add_term(m.clone(), c);
                }
            }
        }
        let mut out: Vec<(usize, SteenrodElement)> = out.into_iter().collect();
        out.sort_by_key(|(pos, _)| *pos);
        out
    }

    /// d o d = 0 on every stored generator within the watermark.
    pub fn check_d_squared(&self) -> Result<(), String> {
        for s in 2..=self.max_s {
            for t in 0..=self.max_t {
                let d_s = self.differential_matrix(s, t);
                let d_prev = self.differential_matrix(s - 1, t);
                if d_s.rows() == 0 || d_prev.cols() == 0 {
                    continue;
                }
                if !d_s.mul(&d_prev).is_zero() {
                    return Err(format!("d o d != 0 at (s, t) = ({s}, {t})"));
                }
            }
        }
        // d_1 composed with the augmentation
        for t in 0..=self.max_t {
            let d1 = self.differential_matrix(1, t);
            let aug = self.augment_matrix(t);
            if d1.rows() > 0 && aug.cols() > 0 && !d1.mul(&aug).is_zero() {
                return Err(format!("d_1 then augmentation != 0 at t = {t}"));
            }
        }
        Ok(())
    }

    /// Minimality: every differential entry lies in the augmentation ideal.
    pub fn check_minimal(&self) -> Result<(), String> {
        for (s, level) in self.levels.iter().enumerate().skip(1) {
            for (pos, g) in level.gens.iter().enumerate() {
                for (_, el) in &g.image {
                    for (m, _) in el.terms() {
                        if m.is_unit() {
                            return Err(format!(
                                "unit coefficient in differential of generator {pos} at s = {s}"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Exactness at (s, t) for s >= 1: rank d_s + rank d_{s+1} spans ker.
    pub fn check_exact(&self, s: u32, t: u32) -> bool {
        let lower = if s == 0 {
            self.augment_matrix(t)
        } else {
            self.differential_matrix(s, t)
        };
        let upper = self.differential_matrix(s + 1, t);
        let kernel_dim = lower.rows() - lower.rank();
        upper.rank() == kernel_dim
    }

    /// Total chart dimensions over a stem range, for backend comparisons:
    /// map from (s, t) to dimension, restricted to t - s <= max_stem.
    pub fn chart_dims(&self, max_stem: i64) -> Vec<((u32, u32), usize)> {
        let mut out = Vec::new();
        for s in 0..=self.max_s {
            for t in 0..=self.max_t {
                let d = self.dim(s, t);
                if d > 0 && (t as i64 - s as i64) <= max_stem {
                    out.push(((s, t), d));
                }
            }
        }
        out
    }
}

/// Row space accumulator used when choosing new generators: keeps an echelon
/// basis and returns the reduced residual of vectors that enlarge the space.
pub struct IncrementalReducer {
    ech: Vec<(usize, PackedVec)>,
}

impl IncrementalReducer {
    pub fn new(existing: Mat) -> IncrementalReducer {
        let mut r = IncrementalReducer { ech: Vec::new() };
        let rows = existing.take_rows();
        for row in rows {
            r.add_if_independent(&row);
        }
        r
    }

    pub fn add_if_independent(&mut self, v: &PackedVec) -> Option<PackedVec> {
        let mut res = v.clone();
        for (p, row) in &self.ech {
            let c = res.get(*p);
            if !c.is_zero() {
                res.axpy(-c, row);
            }
        }
        let lead = res.leading_index()?;
        let inv = res.get(lead).inverse().unwrap();
        res.scale(inv);
        self.ech.push((lead, res.clone()));
        self.ech.sort_by_key(|(p, _)| *p);
        Some(res)
    }
}
