use crate::{Mat, PackedVec, RowSolver, F3};

/// Coordinate-list matrix over F3: sorted `(row, col, value)` triples with no
/// duplicates and no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparseMatrixF3 {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, F3)>,
}

impl SparseMatrixF3 {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, F3)>) -> SparseMatrixF3 {
        entries.retain(|e| !e.2.is_zero());
        entries.sort_by_key(|e| (e.0, e.1));
        for w in entries.windows(2) {
            assert!(
                (w[0].0, w[0].1) != (w[1].0, w[1].1),
                "duplicate entry at ({}, {})",
                w[0].0,
                w[0].1
            );
        }
        for &(r, c, _) in &entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) out of bounds");
        }
        SparseMatrixF3 {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> SparseMatrixF3 {
        SparseMatrixF3::new(rows, cols, Vec::new())
    }

    pub fn identity(n: usize) -> SparseMatrixF3 {
        SparseMatrixF3::new(n, n, (0..n).map(|i| (i, i, crate::ONE)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, F3)] {
        &self.entries
    }

    pub fn to_mat(&self) -> Mat {
        let mut m = Mat::zero(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m.set(r, c, v);
        }
        m
    }

    pub fn from_mat(m: &Mat) -> SparseMatrixF3 {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for (c, v) in m.row(r).iter_nonzero() {
                entries.push((r, c, v));
            }
        }
        SparseMatrixF3::new(m.rows(), m.cols(), entries)
    }

    pub fn transpose(&self) -> SparseMatrixF3 {
        SparseMatrixF3::new(
            self.cols,
            self.rows,
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        )
    }

    /// Debug dump: header `rows cols`, then one `row col value` triple per line.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            s.push_str(&format!("{} {} {}\n", r, c, v.value()));
        }
        s
    }

    pub fn parse(text: &str) -> Result<SparseMatrixF3, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty matrix dump")?;
        let mut it = header.split_whitespace();
        let rows: usize = it
            .next()
            .ok_or("missing rows")?
            .parse()
            .map_err(|e| format!("bad rows: {e}"))?;
        let cols: usize = it
            .next()
            .ok_or("missing cols")?
            .parse()
            .map_err(|e| format!("bad cols: {e}"))?;
        let mut entries = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(format!("bad entry line: {line}"));
            }
            let r: usize = parts[0].parse().map_err(|e| format!("bad row: {e}"))?;
            let c: usize = parts[1].parse().map_err(|e| format!("bad col: {e}"))?;
            let v: i64 = parts[2].parse().map_err(|e| format!("bad value: {e}"))?;
            entries.push((r, c, F3::new(v)));
        }
        Ok(SparseMatrixF3::new(rows, cols, entries))
    }
}

/// Reduced row-echelon form of `m`; returns `(rank, pivot columns,
/// basis_change)` where `basis_change * m` is the echelon form and
/// `basis_change` is invertible.
pub fn rref(m: &SparseMatrixF3) -> (usize, Vec<usize>, SparseMatrixF3) {
    let r = m.to_mat().rref();
    (
        r.pivots.len(),
        r.pivots.clone(),
        SparseMatrixF3::from_mat(&r.transform),
    )
}

/// The echelon form itself (for callers that want the reduced matrix).
pub fn rref_matrix(m: &SparseMatrixF3) -> SparseMatrixF3 {
    SparseMatrixF3::from_mat(&m.to_mat().rref().rref)
}

/// Basis of the right kernel: independent column vectors `v` with `m * v = 0`,
/// `cols - rank` of them.
pub fn kernel_basis(m: &SparseMatrixF3) -> Vec<Vec<F3>> {
    let solver = RowSolver::new(&m.to_mat().transpose());
    solver
        .kernel_rows()
        .iter()
        .map(|r| r.to_vec())
        .collect()
}

/// Some `x` with `m * x = b`, if one exists. `b.len()` must equal `m.rows()`.
pub fn solve_preimage(m: &SparseMatrixF3, b: &[F3]) -> Result<Option<Vec<F3>>, String> {
    if b.len() != m.rows() {
        return Err(format!(
            "dimension mismatch: matrix has {} rows, vector has {}",
            m.rows(),
            b.len()
        ));
    }
    let solver = RowSolver::new(&m.to_mat().transpose());
    Ok(solver
        .preimage(&PackedVec::from_slice(b))
        .map(|x| x.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ONE, TWO, ZERO};

    #[test]
    fn identity_rref() {
        let m = SparseMatrixF3::identity(2);
        let (rank, pivots, _) = rref(&m);
        assert_eq!(rank, 2);
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn dependent_rows() {
        let m = SparseMatrixF3::new(2, 2, vec![(0, 0, ONE), (0, 1, TWO), (1, 0, TWO), (1, 1, ONE)]);
        let (rank, _, t) = rref(&m);
        assert_eq!(rank, 1);
        // basis_change * m = echelon form
        let e = t.to_mat().mul(&m.to_mat());
        assert_eq!(SparseMatrixF3::from_mat(&e), rref_matrix(&m));
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(kernel_basis(&SparseMatrixF3::identity(3)).is_empty());
        let z = SparseMatrixF3::zero(3, 3);
        let k = kernel_basis(&z);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn kernel_exhaustive_check() {
        // m = [[1,2,0]]: kernel is 2-dimensional; verify against brute force
        // over all 27 vectors.
        let m = SparseMatrixF3::new(1, 3, vec![(0, 0, ONE), (0, 1, TWO)]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        let mm = m.to_mat();
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let v = [F3::new(a), F3::new(b), F3::new(c)];
                    let img = mm.transpose().apply(&PackedVec::from_slice(&v));
                    if img.is_zero() {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 9, "kernel should contain 3^2 vectors");
        for v in &k {
            let img = mm.transpose().apply(&PackedVec::from_slice(v));
            assert!(img.is_zero());
        }
    }

    #[test]
    fn solve_identity_and_zero() {
        let id = SparseMatrixF3::identity(3);
        let b = vec![ONE, TWO, ZERO];
        assert_eq!(solve_preimage(&id, &b).unwrap(), Some(b.clone()));
        let z = SparseMatrixF3::zero(2, 2);
        assert_eq!(solve_preimage(&z, &[ONE, ZERO]).unwrap(), None);
    }

    #[test]
    fn solve_enumerated() {
        // m = [[1,1]], b = [2]: solution must satisfy x0 + x1 = 2; check the
        // returned one by substitution and against full enumeration.
        let m = SparseMatrixF3::new(1, 2, vec![(0, 0, ONE), (0, 1, ONE)]);
        let x = solve_preimage(&m, &[TWO]).unwrap().unwrap();
        assert_eq!(x[0] + x[1], TWO);
        let mut solutions = 0;
        for a in 0..3 {
            for b in 0..3 {
                if F3::new(a) + F3::new(b) == TWO {
                    solutions += 1;
                }
            }
        }
        assert_eq!(solutions, 3);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let m = SparseMatrixF3::identity(2);
        assert!(solve_preimage(&m, &[ONE]).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let m = SparseMatrixF3::new(2, 3, vec![(0, 1, TWO), (1, 2, ONE)]);
        let d = m.dump();
        assert!(d.starts_with("2 3\n"));
        assert_eq!(SparseMatrixF3::parse(&d).unwrap(), m);
    }
}
