use gf3::{kernel_basis, rref, rref_matrix, solve_preimage, F3, SparseMatrixF3};
use proptest::prelude::*;

fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = SparseMatrixF3> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(0u8..3, r * c).prop_map(move |vals| {
            let entries = vals
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| (i / c, i % c, F3::new(v as i64)))
                .collect();
            SparseMatrixF3::new(r, c, entries)
        })
    })
}

/// Independent elimination oracle: forward elimination visiting columns in
/// reversed order, counting pivots. Shares no code with `rref`.
fn rank_oracle(m: &SparseMatrixF3) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = vec![vec![0i64; cols]; rows];
    for &(r, c, v) in m.entries() {
        a[r][c] = v.value() as i64;
    }
    let mut rank = 0;
    for col in (0..cols).rev() {
        let Some(pr) = (rank..rows).find(|&r| a[r][col] % 3 != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = a[rank][col] % 3; // 1 and 2 are self-inverse mod 3
        for r in 0..rows {
            if r != rank && a[r][col] % 3 != 0 {
                let f = (a[r][col] * inv) % 3;
                for j in 0..cols {
                    a[r][j] = ((a[r][j] - f * a[rank][j]) % 3 + 3) % 3;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

proptest! {
    #[test]
    fn rank_matches_reversed_column_oracle(m in arb_matrix(8, 10)) {
        let (rank, _, _) = rref(&m);
        prop_assert_eq!(rank, rank_oracle(&m));
    }

    #[test]
    fn rank_equals_transpose_rank(m in arb_matrix(8, 10)) {
        let (rank, _, _) = rref(&m);
        let (trank, _, _) = rref(&m.transpose());
        prop_assert_eq!(rank, trank);
    }

    #[test]
    fn kernel_dim_plus_rank_is_cols(m in arb_matrix(8, 10)) {
        let (rank, _, _) = rref(&m);
        let k = kernel_basis(&m);
        prop_assert_eq!(k.len() + rank, m.cols());
        let mm = m.to_mat().transpose();
        for v in &k {
            let img = mm.apply(&gf3::PackedVec::from_slice(v));
            prop_assert!(img.is_zero());
        }
    }

    #[test]
    fn rref_is_idempotent(m in arb_matrix(8, 10)) {
        let e = rref_matrix(&m);
        prop_assert_eq!(rref_matrix(&e), e.clone());
    }

    #[test]
    fn preimage_solutions_verify(m in arb_matrix(8, 10), seed in proptest::collection::vec(0u8..3, 10)) {
        // build b in the image, check the solver's answer by substitution
        let x: Vec<F3> = seed.iter().take(m.cols()).map(|&v| F3::new(v as i64)).collect();
        let mm = m.to_mat();
        let b = mm.transpose().apply(&gf3::PackedVec::from_slice(&x)).to_vec();
        let sol = solve_preimage(&m, &b).unwrap().expect("b is in the image");
        let check = mm.transpose().apply(&gf3::PackedVec::from_slice(&sol)).to_vec();
        prop_assert_eq!(check, b);
    }

    #[test]
    fn random_6x9_rank(m in arb_matrix(6, 9)) {
        prop_assert_eq!(rref(&m).0, rank_oracle(&m));
    }
}
