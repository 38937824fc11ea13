use proptest::prelude::*;
use reid_core::hdff::{build_view_tensor, split_fused, view_vectors};
use reid_core::matching::{cmc, cosine, score_and_rank};
use reid_core::{fuse, gen_eig, hdff_pipeline, sym_eig, DenseMatrix, DenseTensor3, FeatureBlock, FusionConfig, Normalization};

fn tensor(max: usize) -> impl Strategy<Value = DenseTensor3> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(-10.0..10.0f64, a * b * c).prop_map(move |d| DenseTensor3::new([a, b, c], d).unwrap())
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-3.0..3.0f64, rows * cols).prop_map(move |d| DenseMatrix::new(rows, cols, d).unwrap())
}

fn symmetric(max: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max).prop_flat_map(|n| matrix(n, n).prop_map(|m| m.symmetrized()))
}

fn spd(n: usize) -> impl Strategy<Value = DenseMatrix> {
    matrix(n, n).prop_map(move |g| {
        let mut a = g.matmul(&g.transpose()).unwrap();
        a.add_diagonal(0.5);
        a
    })
}

fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().frobenius() / b.frobenius().max(1e-300)
}

fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |r, c| {
        a[(r / b.rows(), c / b.cols())] * b[(r % b.rows(), c % b.cols())]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_inverts_unfold(t in tensor(6)) {
        for k in 1..=3 {
            let back = DenseTensor3::fold(&t.unfold(k).unwrap(), k, t.dims()).unwrap();
            prop_assert_eq!(&back, &t);
        }
    }

    #[test]
    fn mode_product_acts_on_the_unfolding(t in tensor(5), seed in any::<u64>()) {
        for k in 1..=3 {
            let ik = t.dims()[k - 1];
            let u = DenseMatrix::from_fn(3, ik, |r, c| (((r * 31 + c * 17) as u64 ^ seed) % 13) as f64 - 6.0);
            let lhs = t.mode_product(&u, k).unwrap().unfold(k).unwrap();
            let rhs = u.matmul(&t.unfold(k).unwrap()).unwrap();
            prop_assert!(rel(&lhs, &rhs) <= 1e-12);
        }
    }

    #[test]
    fn distinct_mode_products_commute(t in tensor(5), a in matrix(2, 5), b in matrix(3, 5)) {
        let [s, n, _] = t.dims();
        let a = DenseMatrix::from_fn(2, s, |r, c| a[(r, c)]);
        let b = DenseMatrix::from_fn(3, n, |r, c| b[(r, c)]);
        let x = t.mode_product(&a, 1).unwrap().mode_product(&b, 2).unwrap();
        let y = t.mode_product(&b, 2).unwrap().mode_product(&a, 1).unwrap();
        let scale = x.frobenius().max(1e-300);
        let diff: f64 = x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(diff / scale <= 1e-12);
    }

    #[test]
    fn projection_matches_slice_and_kronecker_oracles(t in tensor(5), raw1 in matrix(5, 3), raw2 in matrix(5, 2)) {
        let [s, n, m] = t.dims();
        let u1 = DenseMatrix::from_fn(s, 3, |r, c| raw1[(r, c)]);
        let u2 = DenseMatrix::from_fn(n, 2, |r, c| raw2[(r, c)]);
        let p = t.project(&u1, &u2).unwrap();
        prop_assert_eq!(p.dims(), [3, 2, m]);
        let k = kron(&u2.transpose(), &u1.transpose());
        for l in 0..m {
            let slice = u1.tr_matmul(&t.slice(l)).unwrap().matmul(&u2).unwrap();
            prop_assert!(rel(&p.slice(l), &slice) <= 1e-10 || slice.frobenius() < 1e-12);
            let v = DenseMatrix::new(s * n, 1, t.slice_data(l).to_vec()).unwrap();
            let kv = k.matmul(&v).unwrap();
            let got = DenseMatrix::new(6, 1, p.slice_data(l).to_vec()).unwrap();
            prop_assert!(rel(&got, &kv) <= 1e-10 || kv.frobenius() < 1e-12);
        }
    }

    #[test]
    fn inner_product_and_norm_agree(t in tensor(5)) {
        let f = t.frobenius();
        prop_assert!((t.inner(&t).unwrap() - f * f).abs() <= 1e-10 * (1.0 + f * f));
    }

    #[test]
    fn sym_eig_reconstructs(a in symmetric(12)) {
        let e = sym_eig(&a).unwrap();
        let n = a.rows();
        let lam = DenseMatrix::from_diagonal(&e.values);
        let back = e.vectors.matmul(&lam).unwrap().matmul(&e.vectors.transpose()).unwrap();
        prop_assert!(a.sub(&back).unwrap().frobenius() <= 1e-9 * a.frobenius().max(1.0));
        let gram = e.vectors.tr_matmul(&e.vectors).unwrap();
        prop_assert!(gram.sub(&DenseMatrix::identity(n)).unwrap().frobenius() <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn gen_eig_is_congruence_invariant((e, i, c) in (1usize..7).prop_flat_map(|n| (matrix(n, n), spd(n), spd(n)))) {
        // (CᵀEC, CᵀIC) has the same generalized spectrum as (E, I) for invertible C.
        let e = e.symmetrized();
        let a = gen_eig(&e, &i).unwrap();
        let ce = c.tr_matmul(&e.matmul(&c).unwrap()).unwrap().symmetrized();
        let ci = c.tr_matmul(&i.matmul(&c).unwrap()).unwrap().symmetrized();
        let b = gen_eig(&ce, &ci).unwrap();
        let scale = a.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn hdff_is_lossless(j in 1usize..5, v in 1usize..5, n in 1usize..5, m in 1usize..6, seed in any::<u64>()) {
        let (jd, vd) = (j * n, v * n);
        let gen = |d: usize, salt: u64| -> Vec<Vec<f64>> {
            (0..m).map(|s| (0..d).map(|i| ((seed ^ salt).wrapping_mul(2654435761).wrapping_add((s * 97 + i) as u64) % 1000) as f64 / 7.0).collect()).collect()
        };
        let a = FeatureBlock::new("a", gen(jd, 1)).unwrap();
        let b = FeatureBlock::new("b", gen(vd, 2)).unwrap();
        let cfg = FusionConfig { n_parts: n, normalize: Normalization::None };
        let fused = hdff_pipeline(&[a.clone(), b.clone()], &cfg).unwrap();
        prop_assert_eq!(fused.dims(), [j + v, n, m]);
        let parts = split_fused(&fused, &[j, v]).unwrap();
        prop_assert_eq!(view_vectors(&parts[0]), a.vectors().to_vec());
        prop_assert_eq!(view_vectors(&parts[1]), b.vectors().to_vec());
    }

    #[test]
    fn fusion_commutes_with_sample_permutation(t in tensor(4), rot in 0usize..10) {
        let m = t.n_slices();
        let perm: Vec<usize> = (0..m).map(|i| (i + rot) % m).collect();
        let fused = fuse(&t, &t).unwrap().select_slices(&perm).unwrap();
        let p = t.select_slices(&perm).unwrap();
        prop_assert_eq!(fused, fuse(&p, &p).unwrap());
    }

    #[test]
    fn cosine_is_scale_invariant(x in prop::collection::vec(-5.0..5.0f64, 1..20), a in 0.01..100.0f64) {
        let y: Vec<f64> = x.iter().rev().cloned().collect();
        let base = cosine(&x, &y).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * a).collect();
        let c = cosine(&scaled, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c.value));
        prop_assert!((c.value - base.value).abs() <= 1e-12);
    }

    #[test]
    fn closed_set_cmc_is_monotone_and_ends_at_one(g in 2usize..8, p in 1usize..8, seed in any::<u64>()) {
        let mut state = seed | 1;
        let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; (state % 1000) as f64 / 100.0 };
        let gallery = DenseTensor3::from_fn([3, 1, g], |_, _, _| next());
        let probes = DenseTensor3::from_fn([3, 1, p], |_, _, _| next());
        let gids: Vec<String> = (0..g).map(|i| format!("id{i}")).collect();
        let pids: Vec<String> = (0..p).map(|i| format!("id{}", i % g)).collect();
        let r = score_and_rank(&gallery, &gids, &probes, &pids).unwrap();
        for pr in &r.probes {
            prop_assert!(pr.scores.windows(2).all(|w| w[0] >= w[1]));
            let mut seen = pr.order.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..g).collect::<Vec<_>>());
        }
        let c = cmc(&r, g).unwrap();
        prop_assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(*c.values.last().unwrap(), 1.0);
    }
}

#[test]
fn view_tensor_keeps_vector_memory_order() {
    let b = FeatureBlock::new("x", vec![(0..8).map(f64::from).collect()]).unwrap();
    let t = build_view_tensor(&b, 4).unwrap();
    assert_eq!(t.dims(), [2, 4, 1]);
    assert_eq!(t.as_slice(), b.vectors()[0].as_slice());
}

#[test]
fn mode1_only_signal_dominates_the_spectra() {
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    use reid_core::{fit, CrossViewSet, TxqdaConfig};

    let mut dominated = 0;
    for seed in 0..20u64 {
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
        let (s, n, persons) = (10, 4, 12);
        let mut slices = Vec::new();
        let (mut pids, mut cams) = (Vec::new(), Vec::new());
        for p in 0..persons {
            // class mean varies along mode 1 only, with unequal strength per feature;
            // every column carries the same copy
            let mu: Vec<f64> = (0..s).map(|r| 3.0 / (1.0 + r as f64) * rng.sample::<f64, _>(StandardNormal)).collect();
            for cam in ["1", "2"] {
                for _ in 0..2 {
                    slices.push(DenseMatrix::from_fn(s, n, |r, _| {
                        mu[r] / (n as f64).sqrt() + 0.5 * rng.sample::<f64, _>(StandardNormal)
                    }));
                    pids.push(format!("p{p}"));
                    cams.push(cam.to_string());
                }
            }
        }
        let set = CrossViewSet::new(DenseTensor3::from_slices(&slices).unwrap(), pids, cams).unwrap();
        let model = fit(&set, &TxqdaConfig::default()).unwrap();
        let top1 = model.spectra[0][0];
        if model.spectra[1].iter().all(|&v| top1 > v) {
            dominated += 1;
        }
    }
    assert!(dominated >= 18, "mode-1 dominated on {dominated} of 20 seeds");
}
