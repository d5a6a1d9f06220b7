use crate::{PackedVec, F3, ONE};

/// Dense matrix over F3 with bit-plane packed rows.
///
/// Throughout the workspace vectors are *row* vectors and a linear map
/// `V -> W` is a `dim V x dim W` matrix acting by `x * M`, so composition of
/// maps is plain matrix multiplication in diagram order.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<PackedVec>,
}

/// Output of row reduction: `transform * input = rref`, with `transform`
/// invertible and `pivots[k]` the column of the k-th pivot.
pub struct RrefResult {
    pub rref: Mat,
    pub transform: Mat,
    pub pivots: Vec<usize>,
}

impl RrefResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: (0..rows).map(|_| PackedVec::zero(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.data[i].set(i, ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<PackedVec>, cols: usize) -> Mat {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Mat {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F3) -> Mat {
        let mut m = Mat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = f(i, j);
                if !c.is_zero() {
                    m.data[i].set(j, c);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F3 {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, c: F3) {
        self.data[i].set(j, c);
    }

    pub fn row(&self, i: usize) -> &PackedVec {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut PackedVec {
        &mut self.data[i]
    }

    pub fn push_row(&mut self, r: PackedVec) {
        debug_assert_eq!(r.len(), self.cols);
        self.data.push(r);
        self.rows += 1;
    }

    pub fn take_rows(self) -> Vec<PackedVec> {
        self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, c) in self.data[i].iter_nonzero() {
                t.data[j].set(i, c);
            }
        }
        t
    }

    /// `self * other` (composition of row-vector maps in diagram order).
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i];
            for (k, c) in self.data[i].iter_nonzero() {
                dst.axpy(c, &other.data[k]);
            }
        }
        out
    }

    /// `x * self` for a row vector `x`.
    pub fn apply(&self, x: &PackedVec) -> PackedVec {
        assert_eq!(x.len(), self.rows, "dimension mismatch in apply");
        let mut out = PackedVec::zero(self.cols);
        for (k, c) in x.iter_nonzero() {
            out.axpy(c, &self.data[k]);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    /// Row reduction with the frozen pivot rule: scan columns left to right,
    /// and within a column take the lowest-index unused row. The result is in
    /// reduced row-echelon form and the accompanying transform is invertible.
    pub fn rref(&self) -> RrefResult {
        let mut e = self.clone();
        let mut t = Mat::identity(self.rows);
        let mut pivots = Vec::new();
        let mut pivot_rows: Vec<usize> = Vec::new();
        let mut used = vec![false; self.rows];
        for col in 0..self.cols {
            let Some(pr) = (0..self.rows).find(|&r| !used[r] && !e.data[r].get(col).is_zero())
            else {
                continue;
            };
            used[pr] = true;
            let inv = e.data[pr].get(col).inverse().unwrap();
            e.data[pr].scale(inv);
            t.data[pr].scale(inv);
            let prow = e.data[pr].clone();
            let ptrow = t.data[pr].clone();
            for r in 0..self.rows {
                if r != pr {
                    let c = e.data[r].get(col);
                    if !c.is_zero() {
                        e.data[r].axpy(-c, &prow);
                        t.data[r].axpy(-c, &ptrow);
                    }
                }
            }
            pivots.push(col);
            pivot_rows.push(pr);
        }
        // Reorder rows so pivot rows come first in pivot-column order, the
        // remaining (zero) rows after, keeping the transform aligned.
        let mut order: Vec<usize> = pivot_rows.clone();
        for r in 0..self.rows {
            if !order.contains(&r) {
                order.push(r);
            }
        }
        let e_rows: Vec<PackedVec> = {
            let mut tmp: Vec<Option<PackedVec>> = e.data.into_iter().map(Some).collect();
            order.iter().map(|&r| tmp[r].take().unwrap()).collect()
        };
        let t_rows: Vec<PackedVec> = {
            let mut tmp: Vec<Option<PackedVec>> = t.data.into_iter().map(Some).collect();
            order.iter().map(|&r| tmp[r].take().unwrap()).collect()
        };
        RrefResult {
            rref: Mat::from_rows(e_rows, self.cols),
            transform: Mat::from_rows(t_rows, self.rows),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {:?}", r)?;
        }
        Ok(())
    }
}

/// Precomputed row reduction of a map `M: V -> W` (row-vector convention),
/// answering image/kernel/preimage queries.
pub struct RowSolver {
    /// nonzero echelon rows, with their pivot columns
    ech: Vec<(usize, PackedVec)>,
    /// transform rows matching `ech` (x with x*M = ech row)
    wit: Vec<PackedVec>,
    /// rows of the domain-side kernel (x with x*M = 0)
    kernel: Vec<PackedVec>,
    domain: usize,
    codomain: usize,
}

impl RowSolver {
    pub fn new(m: &Mat) -> RowSolver {
        let r = m.rref();
        let rank = r.pivots.len();
        let mut ech = Vec::with_capacity(rank);
        let mut wit = Vec::with_capacity(rank);
        let mut kernel = Vec::new();
        let ech_rows = r.rref.take_rows();
        let t_rows = r.transform.take_rows();
        for (i, (e, t)) in ech_rows.into_iter().zip(t_rows).enumerate() {
            if i < rank {
                ech.push((r.pivots[i], e));
                wit.push(t);
            } else {
                kernel.push(t);
            }
        }
        RowSolver {
            ech,
            wit,
            kernel,
            domain: m.rows(),
            codomain: m.cols(),
        }
    }

    pub fn rank(&self) -> usize {
        self.ech.len()
    }

    pub fn kernel_rows(&self) -> &[PackedVec] {
        &self.kernel
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    /// Reduce `b` against the image; returns the residual and the
    /// combination of echelon rows used.
    pub fn reduce(&self, b: &PackedVec) -> (PackedVec, Vec<F3>) {
        let mut res = b.clone();
        let mut coeffs = vec![crate::ZERO; self.ech.len()];
        for (k, (p, row)) in self.ech.iter().enumerate() {
            let c = res.get(*p);
            if !c.is_zero() {
                res.axpy(-c, row);
                coeffs[k] = c;
            }
        }
        (res, coeffs)
    }

    pub fn in_image(&self, b: &PackedVec) -> bool {
        self.reduce(b).0.is_zero()
    }

    /// Some x with x*M = b, if it exists.
    pub fn preimage(&self, b: &PackedVec) -> Option<PackedVec> {
        let (res, coeffs) = self.reduce(b);
        if !res.is_zero() {
            return None;
        }
        let mut x = PackedVec::zero(self.domain);
        for (k, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                x.axpy(c, &self.wit[k]);
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TWO;

    fn mat(rows: &[&[i64]]) -> Mat {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| F3::new(rows[i][j]))
    }

    #[test]
    fn rref_identity() {
        let m = Mat::identity(2);
        let r = m.rref();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rref, Mat::identity(2));
    }

    #[test]
    fn rref_scalar_multiple_rows() {
        // row 2 = 2 * row 1 over F3
        let m = mat(&[&[1, 2], &[2, 1]]);
        let r = m.rref();
        assert_eq!(r.rank(), 1);
        assert!(r.transform.mul(&m) == r.rref);
    }

    #[test]
    fn transform_is_invertible_and_correct() {
        let m = mat(&[&[1, 2, 0, 1], &[2, 1, 1, 0], &[0, 0, 2, 2]]);
        let r = m.rref();
        assert_eq!(r.transform.mul(&m), r.rref);
        assert_eq!(r.transform.rank(), 3);
    }

    #[test]
    fn solver_kernel_and_preimage() {
        let m = mat(&[&[1, 2, 0], &[2, 1, 1], &[0, 0, 1], &[1, 2, 1]]);
        let s = RowSolver::new(&m);
        for k in s.kernel_rows() {
            assert!(m.apply(k).is_zero());
        }
        assert_eq!(s.kernel_rows().len() + s.rank(), m.rows());
        let b = m.apply(&PackedVec::from_slice(&[F3::new(1), TWO, F3::new(0), TWO]));
        let x = s.preimage(&b).unwrap();
        assert_eq!(m.apply(&x), b);
    }
}
