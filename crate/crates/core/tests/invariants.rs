use proptest::prelude::*;
use shellhom::cell::{solve_cell, CellOptions};
use shellhom::config::parse_number;
use shellhom::mesh::{generate_unit_cell_mesh, PhaseGeometry};
use shellhom::metric::LameModel;
use shellhom::oracle::LaminateOracle;
use shellhom::strength::{critical_load_direct, von_mises};
use shellhom::tensor::{isotropic_tensor, voigt_reuss, ElasticTensor, MaterialTable, Sym3};
use shellhom::twoscale::map_to_cell;

fn sym() -> impl Strategy<Value = Sym3> {
    prop::array::uniform6(-100.0f64..100.0)
}

fn rotate(s: &Sym3, angle: f64) -> Sym3 {
    let (c, n) = (angle.cos(), angle.sin());
    let q = [[c, -n, 0.0], [n, c, 0.0], [0.0, 0.0, 1.0]];
    let full = [[s[0], s[3], s[5]], [s[3], s[1], s[4]], [s[5], s[4], s[2]]];
    let r = |i: usize, j: usize| -> f64 {
        let mut v = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                v += q[i][k] * full[k][l] * q[j][l];
            }
        }
        v
    };
    [r(0, 0), r(1, 1), r(2, 2), r(0, 1), r(1, 2), r(0, 2)]
}

proptest! {
    #[test]
    fn von_mises_ignores_pressure_and_rotation(s in sym(), p in -50.0f64..50.0, angle in 0.0f64..6.3) {
        let v = von_mises(&s);
        let shifted = [s[0] + p, s[1] + p, s[2] + p, s[3], s[4], s[5]];
        prop_assert!((von_mises(&shifted) - v).abs() <= 1e-9 * (1.0 + v));
        prop_assert!((von_mises(&rotate(&s, angle)) - v).abs() <= 1e-9 * (1.0 + v));
    }

    #[test]
    fn von_mises_is_absolutely_homogeneous(s in sym(), k in -1e3f64..1e3) {
        let scaled = s.map(|x| x * k);
        prop_assert!((von_mises(&scaled) - k.abs() * von_mises(&s)).abs() <= 1e-10 * (1.0 + k.abs() * von_mises(&s)));
    }

    #[test]
    fn direct_multiplier_inverse_to_stress_scale(
        stresses in prop::collection::vec(sym(), 1..20),
        k in 0.01f64..100.0,
    ) {
        prop_assume!(stresses.iter().any(|s| von_mises(s) > 1e-6));
        let mats = MaterialTable::new().with(1, isotropic_tensor(1.0, 0.2).unwrap(), Some(7.0));
        let phase = vec![1; stresses.len()];
        let a = critical_load_direct(&stresses, &phase, &mats).unwrap();
        let scaled: Vec<Sym3> = stresses.iter().map(|s| s.map(|x| x * k)).collect();
        let b = critical_load_direct(&scaled, &phase, &mats).unwrap();
        prop_assert!((a.critical_load_multiplier - k * b.critical_load_multiplier).abs() <= 1e-10 * a.critical_load_multiplier);
        prop_assert_eq!(a.critical_element, b.critical_element);
    }

    #[test]
    fn cell_map_lands_in_unit_cell(alpha in prop::array::uniform3(-1e3f64..1e3), eps in 1e-3f64..10.0) {
        let b = map_to_cell(alpha, eps);
        prop_assert!(b.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn fractions_parse_like_division(num in 1u32..1000, den in 1u32..1000) {
        let v = parse_number(&format!("{num}/{den}")).unwrap();
        prop_assert!((v - num as f64 / den as f64).abs() <= 1e-15 * v);
    }

    #[test]
    fn reuss_below_voigt(e1 in 0.1f64..100.0, e2 in 0.1f64..100.0, nu1 in 0.0f64..0.45, nu2 in 0.0f64..0.45, f in 0.05f64..0.95) {
        let parts = [(f, isotropic_tensor(e1, nu1).unwrap()), (1.0 - f, isotropic_tensor(e2, nu2).unwrap())];
        let (v, r) = voigt_reuss(&parts).unwrap();
        let gap = ElasticTensor::from_nalgebra(&(v.nalgebra() - r.nalgebra()));
        prop_assert!(gap.eigenvalues().iter().all(|l| *l >= -1e-9 * v.max_abs()));
    }

    #[test]
    fn laminate_oracle_between_bounds(e1 in 0.5f64..50.0, e2 in 0.5f64..50.0, f in 0.1f64..0.9, axis in 0usize..3) {
        let (c1, c2) = (isotropic_tensor(e1, 0.3).unwrap(), isotropic_tensor(e2, 0.2).unwrap());
        let c = LaminateOracle::new(&[(f, c1), (1.0 - f, c2)], axis, 1.0).unwrap().c_hat();
        let (v, r) = voigt_reuss(&[(f, c1), (1.0 - f, c2)]).unwrap();
        let upper = ElasticTensor::from_nalgebra(&(v.nalgebra() - c.nalgebra()));
        let lower = ElasticTensor::from_nalgebra(&(c.nalgebra() - r.nalgebra()));
        let tol = -1e-9 * v.max_abs();
        prop_assert!(upper.eigenvalues().iter().all(|l| *l >= tol));
        prop_assert!(lower.eigenvalues().iter().all(|l| *l >= tol));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn homogenized_tensor_symmetric_and_bounded(
        e2 in 0.2f64..5.0,
        r in 0.1f64..0.45,
        cx in 0.0f64..1.0,
    ) {
        let phase = PhaseGeometry::SphereInclusion { center: [cx, 0.5, 0.5], radius: r, phase: 2, matrix: 1 };
        let mesh = generate_unit_cell_mesh(4, &phase).unwrap();
        let mats = MaterialTable::new()
            .with(1, isotropic_tensor(1.0, 0.3).unwrap(), None)
            .with(2, isotropic_tensor(e2, 0.25).unwrap(), None);
        let opts = CellOptions { second_order: false, ..CellOptions::default() };
        let set = solve_cell(&mesh, &mats, &LameModel::Plate, [0.0; 3], &opts).unwrap();
        prop_assert!(set.asymmetry < 1e-8);
        let parts: Vec<(f64, ElasticTensor)> =
            mesh.phase_fractions().into_iter().map(|(p, f)| (f, *mats.tensor(p).unwrap())).collect();
        let (v, re) = voigt_reuss(&parts).unwrap();
        let (lv, lc, lr) = (v.eigenvalues(), set.c_hat.eigenvalues(), re.eigenvalues());
        let slack = 1e-9 * lv[5].abs().max(lv[0].abs());
        for k in 0..6 {
            prop_assert!(lc[k] >= lr[k] - slack && lc[k] <= lv[k] + slack);
        }
    }
}
