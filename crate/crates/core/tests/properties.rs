use lpdecode::codes::{enumerate_codewords, is_codeword, ml_decode_exhaustive};
use lpdecode::gabp::{build_pairwise_graph, gabp_solve, GabpVerdict};
use lpdecode::ipm::solve_lp;
use lpdecode::linalg::{
    apply_inner, cg_solve, cholesky_solve_dense, dot, jacobi_precond, norm_inf, InnerSystem,
    SparseRealMatrix,
};
use lpdecode::polytope::{
    build_polytope, check_inequalities, decompose_checks, enumerate_vertices, lp_oracle_dense,
    to_standard_form,
};
use lpdecode::{
    Algorithm, DecodeStatus, Decoder, InnerSolverKind, LlrVector, SolverConfig, SparseBinaryMatrix,
};
use proptest::prelude::*;

/// Small codes whose checks all have degree 2..=4.
fn small_code() -> impl Strategy<Value = SparseBinaryMatrix> {
    (4usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(0..n, 2..=4), 1..=3).prop_map(
            move |rows| {
                SparseBinaryMatrix::new(
                    n,
                    rows.into_iter().map(|r| r.into_iter().collect()).collect(),
                )
                .unwrap()
            },
        )
    })
}

fn gamma_for(n: usize) -> impl Strategy<Value = LlrVector> {
    proptest::collection::vec(-1.0f64..1.0, n).prop_map(|v| LlrVector::new(v).unwrap())
}

fn code_and_gamma() -> impl Strategy<Value = (SparseBinaryMatrix, LlrVector)> {
    small_code().prop_flat_map(|h| {
        let n = h.n();
        (Just(h), gamma_for(n))
    })
}

fn exact_config(alg: Algorithm) -> SolverConfig {
    let mut cfg = SolverConfig::new(alg, InnerSolverKind::Dense);
    cfg.rounding_cadence = 0;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn codewords_satisfy_every_facet(h in small_code()) {
        let p = build_polytope(&h).unwrap();
        for c in enumerate_codewords(&h).unwrap() {
            let x: Vec<f64> = c.bits().iter().map(|&b| f64::from(b)).collect();
            prop_assert!(p.contains(&x, 0.0));
        }
    }

    #[test]
    fn odd_subset_count(support in proptest::collection::btree_set(0usize..40, 1..=10)) {
        let s: Vec<usize> = support.into_iter().collect();
        let ineqs = check_inequalities(&s).unwrap();
        prop_assert_eq!(ineqs.len(), 1usize << (s.len() - 1));
    }

    #[test]
    fn reflection_through_codewords(h in small_code(), weights in proptest::collection::vec(0.0f64..1.0, 64)) {
        let p = build_polytope(&h).unwrap();
        let verts = enumerate_vertices(&p).unwrap();
        let total: f64 = verts.iter().zip(weights.iter().cycle()).map(|(_, w)| w).sum::<f64>() + 1e-12;
        let x: Vec<f64> = (0..h.n())
            .map(|i| verts.iter().zip(weights.iter().cycle()).map(|(v, w)| v[i] * w).sum::<f64>() / total)
            .collect();
        prop_assert!(p.contains(&x, 1e-9));
        for c in enumerate_codewords(&h).unwrap() {
            let y: Vec<f64> = x.iter().zip(c.bits()).map(|(v, &b)| (v - f64::from(b)).abs()).collect();
            prop_assert!(p.contains(&y, 1e-9));
        }
    }

    #[test]
    fn embedding_matches_vertex_minimum((h, g) in code_and_gamma()) {
        let p = build_polytope(&h).unwrap();
        let best = enumerate_vertices(&p)
            .unwrap()
            .iter()
            .map(|v| v.iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let (_, cost) = lp_oracle_dense(&to_standard_form(&p, &g).unwrap()).unwrap();
        prop_assert!((cost - best).abs() <= 1e-9, "{cost} vs {best}");
    }

    #[test]
    fn decomposition_keeps_optimum(g in gamma_for(7)) {
        let h = SparseBinaryMatrix::hamming_7_4();
        let (dh, map) = decompose_checks(&h, 3).unwrap();
        let plain = lp_oracle_dense(&to_standard_form(&build_polytope(&h).unwrap(), &g).unwrap()).unwrap();
        let mut padded = g.values().to_vec();
        padded.resize(map.decomposed_n(), 0.0);
        let padded = LlrVector::new(padded).unwrap();
        let split = lp_oracle_dense(&to_standard_form(&build_polytope(&dh).unwrap(), &padded).unwrap()).unwrap();
        prop_assert!((plain.1 - split.1).abs() <= 1e-9);
        for (a, b) in plain.0[..7].iter().zip(&split.0[..7]) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn normal_operator_is_positive_definite(
        k in 1usize..8,
        seed in proptest::collection::vec(-1.0f64..1.0, 200),
        d in proptest::collection::vec(0.1f64..3.0, 20),
    ) {
        let cols = k + 4;
        let mut trip = Vec::new();
        for r in 0..k {
            trip.push((r, r, 1.0 + seed[r].abs()));
            for c in k..cols {
                let v = seed[(r * cols + c) % seed.len()];
                if v.abs() > 0.5 {
                    trip.push((r, c, v));
                }
            }
        }
        let a = SparseRealMatrix::from_triplets(k, cols, &trip).unwrap();
        let d2 = &d[..cols];
        let w: Vec<f64> = seed[100..100 + k].to_vec();
        let sys = InnerSystem::new(&a, d2, &w).unwrap();
        let nw = apply_inner(&sys, &w).unwrap();
        if w.iter().any(|&v| v != 0.0) {
            prop_assert!(dot(&w, &nw) > 0.0);
        }
        let dense = cholesky_solve_dense(&sys).unwrap();
        let (cg, _) = cg_solve(&sys, &jacobi_precond(&sys).unwrap(), 1e-12, 10 * k).unwrap();
        let scale = norm_inf(&dense).max(1e-300);
        for (x, y) in cg.iter().zip(&dense) {
            prop_assert!((x - y).abs() <= 1e-8 * scale);
        }
        let graph = build_pairwise_graph(&sys).unwrap();
        let out = gabp_solve(&graph, 1e-9, 300, 0.3, None).unwrap();
        if out.verdict == GabpVerdict::Converged {
            let r: Vec<f64> = apply_inner(&sys, &out.means).unwrap().iter().zip(&w).map(|(a, b)| a - b).collect();
            prop_assert!(norm_inf(&r) <= 100.0 * 1e-9 * norm_inf(&w));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iterates_stay_interior((h, g) in code_and_gamma(), alg_index in 0usize..4) {
        let alg = Algorithm::ALL[alg_index];
        let cfg = exact_config(alg);
        let dec = Decoder::new(&h, &cfg).unwrap();
        let mut ok = true;
        let mut monitor = |_: usize, x: &[f64], _: f64| {
            ok &= x.iter().all(|&v| v > 0.0 && v.is_finite());
            false
        };
        solve_lp(&dec.lp_for(&g).unwrap(), &cfg, Some(&mut monitor)).unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn affine_cost_never_increases((h, g) in code_and_gamma(), long in any::<bool>()) {
        let cfg = exact_config(if long { Algorithm::AffineLong } else { Algorithm::AffineShort });
        let dec = Decoder::new(&h, &cfg).unwrap();
        let sol = solve_lp(&dec.lp_for(&g).unwrap(), &cfg, None).unwrap();
        for w in sol.history.windows(2) {
            prop_assert!(w[1].cost <= w[0].cost, "{} -> {}", w[0].cost, w[1].cost);
        }
    }

    #[test]
    fn affine_and_pdip_agree((h, g) in code_and_gamma()) {
        let affine = Decoder::new(&h, &exact_config(Algorithm::AffineLong)).unwrap().decode(&g).unwrap();
        let pdip = Decoder::new(&h, &exact_config(Algorithm::PdipFeasible)).unwrap().decode(&g).unwrap();
        prop_assert!((affine.cost - pdip.cost).abs() <= 1e-5);
    }

    #[test]
    fn status_invariants((h, g) in code_and_gamma(), cadence in 0usize..3) {
        let mut cfg = SolverConfig::default();
        cfg.rounding_cadence = cadence;
        let res = Decoder::new(&h, &cfg).unwrap().decode(&g).unwrap();
        if matches!(res.status, DecodeStatus::Integral | DecodeStatus::EarlyRounded) {
            let word = res.word().unwrap();
            prop_assert!(is_codeword(&h, &word).unwrap());
        }
        if res.ml_certificate {
            prop_assert_eq!(res.status, DecodeStatus::Integral);
            let (_, ml_cost) = ml_decode_exhaustive(&h, &g).unwrap();
            let cost = g.cost(&res.word().unwrap());
            prop_assert!((cost - ml_cost).abs() <= 1e-9);
        }
    }
}
