//! Chain-map lifts between minimal resolutions: Yoneda products, induced
//! maps of module maps, and connecting homomorphisms of short exact
//! sequences. Module maps are degree-preserving; suspensions are baked into
//! the module presentations. Batches of lifts advance together so each
//! differential solver is built once per cell.

use crate::resolve::{ExtClass, Resolution};
use gf3::{Mat, PackedVec, RowSolver, F3, ONE, ZERO};
use steenrod::{MilnorMonomial, SteenrodElement};
use steenrod::ModulePresentation;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// A chain map F^src_{s + s_shift} -> F^tgt_s lowering internal degree by
/// t_shift, stored as one target-coordinate vector per source generator.
pub struct ChainMap {
    pub s_shift: u32,
    pub t_shift: u32,
    /// blocks[src_level s'] -> generator position -> image in target coords
    /// (s' - s_shift, t_gen - t_shift)
    pub blocks: Vec<HashMap<usize, PackedVec>>,
}

impl ChainMap {
    /// Apply to a coordinate vector of the source at (s_src, t); the result
    /// lives in target coords (s_src - s_shift, t - t_shift).
    pub fn apply(
        &self,
        src: &Resolution,
        tgt: &Resolution,
        s_src: u32,
        t: u32,
        v: &PackedVec,
    ) -> PackedVec {
        let s_tgt = s_src - self.s_shift;
        let t_tgt = t - self.t_shift;
        let (tdim, _) = tgt.coords(s_tgt, t_tgt);
        let mut out = PackedVec::zero(tdim);
        let (_, offsets) = src.coords(s_src, t);
        let empty = HashMap::new();
        let blocks = self.blocks.get(s_src as usize).unwrap_or(&empty);
        for &(pos, gt, off) in &offsets {
            let Some(img) = blocks.get(&pos) else { continue };
            let adeg = t - gt;
            for ai in 0..src.algebra.dim(adeg) {
                let c = v.get(off + ai);
                if c.is_zero() {
                    continue;
                }
                let lm = lmul_apply(tgt, s_tgt, gt - self.t_shift, adeg, ai, img);
                out.axpy(c, &lm);
            }
        }
        out
    }

    /// Evaluate the cocycle dual to target class `u` after this lift:
    /// the Yoneda product u * (class of this lift), as source-chart
    /// coordinates at (u.s + s_shift, u.t + t_shift).
    pub fn product_with(
        &self,
        src: &Resolution,
        tgt: &Resolution,
        u: ExtClass,
    ) -> Vec<(ExtClass, F3)> {
        let s = u.s + self.s_shift;
        let t = u.t + self.t_shift;
        let u_pos = tgt.gen_position(u);
        let (_, toffsets) = tgt.coords(u.s, u.t);
        let Some(&(_, _, uoff)) = toffsets.iter().find(|&&(pos, _, _)| pos == u_pos)
        else {
            return Vec::new();
        };
        let empty = HashMap::new();
        let blocks = self.blocks.get(s as usize).unwrap_or(&empty);
        let mut out = Vec::new();
        for class in src.classes_in(s, t) {
            let pos = src.gen_position(class);
            let c = blocks.get(&pos).map(|img| img.get(uoff)).unwrap_or(ZERO);
            if !c.is_zero() {
                out.push((class, c));
            }
        }
        out
    }

    /// self after other (both lifts over the same target resolution):
    /// a lift of (self's class) * (other's class).
    pub fn compose(&self, tgt: &Resolution, src: &Resolution, other: &ChainMap) -> ChainMap {
        let s_shift = self.s_shift + other.s_shift;
        let t_shift = self.t_shift + other.t_shift;
        let mut blocks: Vec<HashMap<usize, PackedVec>> = Vec::new();
        for (s_src, level_blocks) in other.blocks.iter().enumerate() {
            let s_src = s_src as u32;
            if s_src < s_shift {
                blocks.push(HashMap::new());
                continue;
            }
            let mut out_level = HashMap::new();
            for (&pos, img) in level_blocks {
                let gt = src.levels[s_src as usize].gens[pos].t;
                let s_mid = s_src - other.s_shift;
                if s_mid < self.s_shift || gt < t_shift {
                    continue;
                }
                let v = self.apply(tgt, tgt, s_mid, gt - other.t_shift, img);
                out_level.insert(pos, v);
            }
            blocks.push(out_level);
        }
        ChainMap {
            s_shift,
            t_shift,
            blocks,
        }
    }
}

/// alpha * v where alpha is the ai-th basis element of degree adeg and v a
/// coordinate vector of `res` at (s, t); result at (s, t + adeg).
fn lmul_apply(
    res: &Resolution,
    s: u32,
    t: u32,
    adeg: u32,
    ai: usize,
    v: &PackedVec,
) -> PackedVec {
    let (dim_out, off_out) = res.coords(s, t + adeg);
    let mut out = PackedVec::zero(dim_out);
    let (_, off_in) = res.coords(s, t);
    let out_offset: HashMap<usize, usize> =
        off_out.iter().map(|&(p, _, o)| (p, o)).collect();
    for &(pos, gt, off) in &off_in {
        let bdeg = t - gt;
        let Some(&oo) = out_offset.get(&pos) else { continue };
        if adeg == 0 {
            for k in 0..res.algebra.dim(bdeg) {
                let c = v.get(off + k);
                if !c.is_zero() {
                    let cur = out.get(oo + k);
                    out.set(oo + k, cur + c);
                }
            }
            continue;
        }
        let lm = res.algebra.lmul_matrix(adeg, ai, bdeg);
        for bi in 0..lm.rows() {
            let c = v.get(off + bi);
            if !c.is_zero() {
                out.add_shifted(c, lm.row(bi), oo);
            }
        }
    }
    out
}

/// Shared per-cell solvers for a resolution's differentials.
struct CellSolvers<'a> {
    res: &'a Resolution,
    cache: HashMap<(u32, u32), Arc<RowSolver>>,
}

impl<'a> CellSolvers<'a> {
    fn new(res: &'a Resolution) -> CellSolvers<'a> {
        CellSolvers {
            res,
            cache: HashMap::new(),
        }
    }

    fn differential(&mut self, s: u32, t: u32) -> Arc<RowSolver> {
        if let Some(sv) = self.cache.get(&(s, t)) {
            return Arc::clone(sv);
        }
        let m = if s == 0 {
            self.res.augment_matrix(t)
        } else {
            self.res.differential_matrix(s, t)
        };
        let sv = Arc::new(RowSolver::new(&m));
        self.cache.insert((s, t), Arc::clone(&sv));
        sv
    }

    fn trim_below(&mut self, keep_from_t: u32) {
        self.cache.retain(|&(_, t), _| t >= keep_from_t);
    }
}

/// Lift a batch of chart classes of `tgt` into chain maps out of `src`
/// realizing the Yoneda action (src == tgt gives the ring structure).
/// `tgt` must resolve a module with a single bottom generator in degree 0.
pub fn lift_classes(
    src: &Resolution,
    tgt: &Resolution,
    classes: &[ExtClass],
    max_src_s: u32,
    max_src_t: u32,
) -> Vec<ChainMap> {
    assert!(
        tgt.dim(0, 0) == 1 && tgt.levels[0].gens.len() == 1,
        "yoneda lifts need a target resolution with one bottom generator"
    );
    let mut maps: Vec<ChainMap> = classes
        .iter()
        .map(|c| ChainMap {
            s_shift: c.s,
            t_shift: c.t,
            blocks: vec![HashMap::new(); max_src_s as usize + 1],
        })
        .collect();
    // base layer: the cocycle dual to the class generator
    for (ci, c) in classes.iter().enumerate() {
        if c.s > max_src_s {
            continue;
        }
        let level = &src.levels[c.s as usize];
        let gen_pos = src.gen_position(*c);
        for (pos, g) in level.gens.iter().enumerate() {
            if g.t > max_src_t || g.t < c.t {
                continue;
            }
            let (dim, _) = tgt.coords(0, g.t - c.t);
            let mut v = PackedVec::zero(dim);
            if pos == gen_pos {
                v.set(0, ONE);
            }
            maps[ci].blocks[c.s as usize].insert(pos, v);
        }
    }
    let max_ct = classes.iter().map(|c| c.t).max().unwrap_or(0);
    let mut solvers = CellSolvers::new(tgt);
    for t in 0..=max_src_t {
        for s in 1..=max_src_s {
            for (ci, c) in classes.iter().enumerate() {
                if s <= c.s || t < c.t {
                    continue;
                }
                let (k, u) = (s - c.s, t - c.t);
                let src_level = &src.levels[s as usize];
                let gen_positions: Vec<usize> = src_level.gens_in_degree(t).to_vec();
                if gen_positions.is_empty() {
                    continue;
                }
                let solver = solvers.differential(k, u);
                for pos in gen_positions {
                    let g = &src_level.gens[pos];
                    let (dim_rhs, _) = tgt.coords(k - 1, u);
                    let mut rhs = PackedVec::zero(dim_rhs);
                    for (tgt_pos, el) in &g.image {
                        let prev = &maps[ci].blocks[s as usize - 1];
                        let Some(img) = prev.get(tgt_pos) else { continue };
                        let tdeg = src.levels[s as usize - 1].gens[*tgt_pos].t;
                        for (mono, cc) in el.terms() {
                            let adeg = mono.degree();
                            let aidx =
                                tgt.algebra.basis(adeg).binary_search(mono).unwrap();
                            let term =
                                lmul_apply(tgt, k - 1, tdeg - c.t, adeg, aidx, img);
                            rhs.axpy(cc, &term);
                        }
                    }
                    let v = if rhs.is_zero() {
                        PackedVec::zero(tgt.coords(k, u).0)
                    } else {
                        solver.preimage(&rhs).unwrap_or_else(|| {
                            panic!(
                                "chain map lift failed at (s,t)=({s},{t}) for class \
                                 ({},{},{}): insufficient watermark",
                                c.s, c.t, c.index
                            )
                        })
                    };
                    maps[ci].blocks[s as usize].insert(pos, v);
                }
            }
        }
        solvers.trim_below(t.saturating_sub(max_ct));
    }
    maps
}

/// A degree-preserving map of module presentations over one algebra.
pub struct ModuleMap {
    pub from: Arc<ModulePresentation>,
    pub to: Arc<ModulePresentation>,
    /// entries[src basis idx] = target combination
    pub entries: Vec<Vec<(usize, F3)>>,
}

impl ModuleMap {
    pub fn new(
        from: Arc<ModulePresentation>,
        to: Arc<ModulePresentation>,
        entries: Vec<Vec<(usize, F3)>>,
    ) -> ModuleMap {
        ModuleMap { from, to, entries }
    }

    pub fn apply_vec(&self, v: &[(usize, F3)]) -> Vec<(usize, F3)> {
        let mut acc: BTreeMap<usize, F3> = BTreeMap::new();
        for &(i, c) in v {
            for &(j, cj) in &self.entries[i] {
                let e = acc.entry(j).or_insert(ZERO);
                *e = *e + c * cj;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Degree and equivariance checks; returns the first failing witness.
    pub fn check_equivariant(&self) -> Result<(), String> {
        for (i, combo) in self.entries.iter().enumerate() {
            for &(j, c) in combo {
                if !c.is_zero() && self.to.degree(j) != self.from.degree(i) {
                    return Err(format!(
                        "module map violates degrees at {} -> {}",
                        self.from.id(i),
                        self.to.id(j)
                    ));
                }
            }
        }
        let top = self.from.top_degree().max(self.to.top_degree());
        for g in self.from.algebra.generators(top) {
            let af = self.from.action_of(&g);
            let at = self.to.action_of(&g);
            for i in 0..self.from.dim() {
                let lhs = self.apply_vec(&af[i]);
                let mut rhs: BTreeMap<usize, F3> = BTreeMap::new();
                for &(j, c) in &self.entries[i] {
                    for &(k, ck) in &at[j] {
                        let e = rhs.entry(k).or_insert(ZERO);
                        *e = *e + c * ck;
                    }
                }
                let rhs: Vec<(usize, F3)> =
                    rhs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                if lhs != rhs {
                    return Err(format!(
                        "module map not equivariant: {:?} on {}",
                        g,
                        self.from.id(i)
                    ));
                }
            }
        }
        Ok(())
    }

    /// matrix of the map in a fixed degree, rows = from-basis, cols = to-basis
    fn degree_matrix(&self, d: u32) -> (Vec<usize>, Vec<usize>, Mat) {
        let fd = self.from.basis_in_degree(d);
        let td = self.to.basis_in_degree(d);
        let mut m = Mat::zero(fd.len(), td.len());
        for (r, &i) in fd.iter().enumerate() {
            for &(j, c) in &self.entries[i] {
                if let Some(col) = td.iter().position(|&x| x == j) {
                    m.set(r, col, c);
                }
            }
        }
        (fd, td, m)
    }
}

/// Lift a module map f: M -> N to a chain map F^M_s -> F^N_s. Precomposing
/// cocycles of N with the lift computes the induced map Ext(N) -> Ext(M).
pub fn lift_module_map(
    res_m: &Resolution,
    res_n: &Resolution,
    f: &ModuleMap,
    max_s: u32,
    max_t: u32,
) -> Result<ChainMap, String> {
    f.check_equivariant()?;
    let mut blocks: Vec<HashMap<usize, PackedVec>> =
        vec![HashMap::new(); max_s as usize + 1];
    let mut solvers = CellSolvers::new(res_n);
    for t in 0..=max_t {
        for s in 0..=max_s {
            let level = &res_m.levels[s as usize];
            let gen_positions: Vec<usize> = level.gens_in_degree(t).to_vec();
            if gen_positions.is_empty() {
                continue;
            }
            let solver = solvers.differential(s, t);
            for pos in gen_positions {
                let g = &level.gens[pos];
                let rhs = if s == 0 {
                    let img: Vec<(usize, F3)> = g
                        .image
                        .iter()
                        .map(|(b, el)| (*b, el.coefficient(&MilnorMonomial::unit())))
                        .collect();
                    let fv = f.apply_vec(&img);
                    let mc = res_n.module_coords(t);
                    let mut rhs = PackedVec::zero(mc.len());
                    for (b, c) in fv {
                        let col = mc
                            .iter()
                            .position(|&x| x == b)
                            .ok_or("module map image outside expected degree")?;
                        rhs.set(col, c);
                    }
                    rhs
                } else {
                    let (dim_rhs, _) = res_n.coords(s - 1, t);
                    let mut rhs = PackedVec::zero(dim_rhs);
                    for (tgt_pos, el) in &g.image {
                        let Some(img) = blocks[s as usize - 1].get(tgt_pos) else {
                            continue;
                        };
                        let tdeg = res_m.levels[s as usize - 1].gens[*tgt_pos].t;
                        for (mono, cc) in el.terms() {
                            let adeg = mono.degree();
                            let aidx =
                                res_n.algebra.basis(adeg).binary_search(mono).unwrap();
                            let term = lmul_apply(res_n, s - 1, tdeg, adeg, aidx, img);
                            rhs.axpy(cc, &term);
                        }
                    }
                    rhs
                };
                let v = if rhs.is_zero() {
                    PackedVec::zero(res_n.coords(s, t).0)
                } else {
                    solver
                        .preimage(&rhs)
                        .ok_or_else(|| format!("module map lift failed at ({s},{t})"))?
                };
                blocks[s as usize].insert(pos, v);
            }
        }
        solvers.trim_below(t.saturating_sub(1));
    }
    Ok(ChainMap {
        s_shift: 0,
        t_shift: 0,
        blocks,
    })
}

/// Evaluate the induced map on a chart class y of N: precompose the cocycle
/// of y with the lift, expressed over the chart classes of M.
pub fn induced_on_class(
    map: &ChainMap,
    res_m: &Resolution,
    res_n: &Resolution,
    y: ExtClass,
) -> Vec<(ExtClass, F3)> {
    let s = y.s + map.s_shift;
    let t = y.t + map.t_shift;
    let y_pos = res_n.gen_position(y);
    let (_, noff) = res_n.coords(y.s, y.t);
    let Some(&(_, _, yoff)) = noff.iter().find(|&&(p, _, _)| p == y_pos) else {
        return Vec::new();
    };
    let empty = HashMap::new();
    let blocks = map.blocks.get(s as usize).unwrap_or(&empty);
    let mut out = Vec::new();
    for class in res_m.classes_in(s, t) {
        let pos = res_m.gen_position(class);
        let c = blocks.get(&pos).map(|v| v.get(yoff)).unwrap_or(ZERO);
        if !c.is_zero() {
            out.push((class, c));
        }
    }
    out
}

/// 0 -> A -> M -> C -> 0 of presentations over one algebra, degreewise.
pub struct ShortExactSequence {
    pub sub: ModuleMap,
    pub quo: ModuleMap,
}

impl ShortExactSequence {
    /// degreewise exactness; reports the failing degree
    pub fn check_exact(&self) -> Result<(), String> {
        self.sub.check_equivariant()?;
        self.quo.check_equivariant()?;
        let top = self.sub.to.top_degree();
        for d in 0..=top {
            let (ad, _, inj) = self.sub.degree_matrix(d);
            let (md, cd, surj) = self.quo.degree_matrix(d);
            if inj.rank() != ad.len() {
                return Err(format!("sub map not injective in degree {d}"));
            }
            if surj.rank() != cd.len() {
                return Err(format!("quotient map not surjective in degree {d}"));
            }
            if inj.cols() > 0 && surj.cols() > 0 && !inj.mul(&surj).is_zero() {
                return Err(format!("composite sub;quo nonzero in degree {d}"));
            }
            if ad.len() + cd.len() != md.len() {
                return Err(format!("sequence not exact in degree {d}"));
            }
        }
        Ok(())
    }

    /// Chain-level connecting map Psi_k: F^C_{k+1} -> F^A_k. Precomposing a
    /// cocycle of A with Psi gives the connecting homomorphism
    /// Ext^{s,t}(A) -> Ext^{s+1,t}(C).
    pub fn connecting_chain_map(
        &self,
        res_c: &Resolution,
        res_a: &Resolution,
        max_s: u32,
        max_t: u32,
    ) -> Result<ChainMap, String> {
        self.check_exact()?;
        let m_mod = &self.sub.to;
        // sigma_0: per level-0 generator of res_c, a module vector of M
        // lifting its augmentation image through quo
        let mut sigma: HashMap<usize, Vec<(usize, F3)>> = HashMap::new();
        for (pos, g) in res_c.levels[0].gens.iter().enumerate() {
            let d = g.t;
            let (md, cd, surj) = self.quo.degree_matrix(d);
            let solver = RowSolver::new(&surj);
            let mut target = PackedVec::zero(cd.len());
            for (b, el) in &g.image {
                let c = el.coefficient(&MilnorMonomial::unit());
                let col = cd.iter().position(|&x| x == *b).unwrap();
                target.set(col, c);
            }
            let x = solver
                .preimage(&target)
                .ok_or("augmentation not liftable through the surjection")?;
            sigma.insert(pos, x.iter_nonzero().map(|(i, c)| (md[i], c)).collect());
        }
        let mut blocks: Vec<HashMap<usize, PackedVec>> =
            vec![HashMap::new(); max_s as usize + 1];
        let mut solvers = CellSolvers::new(res_a);
        for t in 0..=max_t {
            for s in 1..=max_s {
                let level = &res_c.levels[s as usize];
                let gen_positions: Vec<usize> = level.gens_in_degree(t).to_vec();
                if gen_positions.is_empty() {
                    continue;
                }
                for pos in gen_positions {
                    let g = &level.gens[pos];
                    let v = if s == 1 {
                        // sigma_0(d g) lies in the submodule; pull back and
                        // cover by F^A_0
                        let mut mv: BTreeMap<usize, F3> = BTreeMap::new();
                        for (tpos, el) in &g.image {
                            let Some(sv) = sigma.get(tpos) else { continue };
                            for (mono, c) in el.terms() {
                                let moved = m_mod.apply(
                                    &SteenrodElement::from_monomial(mono.clone(), c),
                                    sv,
                                );
                                for (i, cc) in moved {
                                    let e = mv.entry(i).or_insert(ZERO);
                                    *e = *e + cc;
                                }
                            }
                        }
                        let (ad, md, inj) = self.sub.degree_matrix(t);
                        let mut target = PackedVec::zero(md.len());
                        for (i, c) in mv {
                            if c.is_zero() {
                                continue;
                            }
                            let col = md.iter().position(|&x| x == i).unwrap();
                            target.set(col, c);
                        }
                        let avec = RowSolver::new(&inj)
                            .preimage(&target)
                            .ok_or("connecting value not in the submodule")?;
                        let solver = solvers.differential(0, t);
                        let mc = res_a.module_coords(t);
                        let mut rhs = PackedVec::zero(mc.len());
                        for (i, c) in avec.iter_nonzero() {
                            let col = mc.iter().position(|&x| x == ad[i]).unwrap();
                            rhs.set(col, c);
                        }
                        if rhs.is_zero() {
                            PackedVec::zero(res_a.coords(0, t).0)
                        } else {
                            solver.preimage(&rhs).ok_or("cover by F^A_0 failed")?
                        }
                    } else {
                        let solver = solvers.differential(s - 1, t);
                        let (dim_rhs, _) = res_a.coords(s - 2, t);
                        let mut rhs = PackedVec::zero(dim_rhs);
                        for (tgt_pos, el) in &g.image {
                            let Some(img) = blocks[s as usize - 1].get(tgt_pos) else {
                                continue;
                            };
                            let tdeg = res_c.levels[s as usize - 1].gens[*tgt_pos].t;
                            for (mono, cc) in el.terms() {
                                let adeg = mono.degree();
                                let aidx = res_a
                                    .algebra
                                    .basis(adeg)
                                    .binary_search(mono)
                                    .unwrap();
                                let term =
                                    lmul_apply(res_a, s - 2, tdeg, adeg, aidx, img);
                                rhs.axpy(cc, &term);
                            }
                        }
                        if rhs.is_zero() {
                            PackedVec::zero(res_a.coords(s - 1, t).0)
                        } else {
                            solver.preimage(&rhs).ok_or_else(|| {
                                format!("connecting lift failed at ({s},{t})")
                            })?
                        }
                    };
                    blocks[s as usize].insert(pos, v);
                }
            }
            solvers.trim_below(t.saturating_sub(1));
        }
        Ok(ChainMap {
            s_shift: 1,
            t_shift: 0,
            blocks,
        })
    }
}
