//! Property tests for the structural invariants: conjugacy, pseudo-norm
//! axioms, Young-function bounds, transport optimality, and the Hopf-Lax
//! comparison principles.

use kte_core::measure::VectorSample;
use kte_core::{cost, hopflax, orlicz, transport};
use kte_core::{CostSpec, DiscreteMeasure, GridField, GridGeometry};
use proptest::prelude::*;

fn any_cost() -> impl Strategy<Value = CostSpec> {
    prop_oneof![
        (1.25f64..4.0).prop_map(|p| CostSpec::power(p, 1).unwrap()),
        Just(CostSpec::radial("s^2 + s^4", 1).unwrap()),
        Just(CostSpec::radial("max(s^2, 3*s^6)", 1).unwrap()),
    ]
}

fn scalar_measure(weights: Vec<f64>) -> DiscreteMeasure {
    let total: f64 = weights.iter().sum();
    DiscreteMeasure::new(
        (0..weights.len()).map(|k| vec![k as f64]).collect(),
        weights.iter().map(|w| w / total).collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn fenchel_young_holds(
        spec in any_cost(),
        x in -5.0f64..5.0,
        y in -5.0f64..5.0,
    ) {
        let conj = spec.legendre().unwrap();
        let bound = spec.eval(&[x]).unwrap() + conj.eval(&[y]).unwrap() + 1e-9;
        prop_assert!(x * y <= bound);
    }

    #[test]
    fn luxemburg_is_a_pseudo_norm(
        spec in any_cost(),
        raw in prop::collection::vec(0.05f64..1.0, 2..6),
        u in prop::collection::vec(-3.0f64..3.0, 6),
        v in prop::collection::vec(-3.0f64..3.0, 6),
        alpha in 0.05f64..8.0,
    ) {
        let n = raw.len();
        let lam = scalar_measure(raw);
        let us = VectorSample::scalar(u[..n].to_vec());
        let vs = VectorSample::scalar(v[..n].to_vec());
        let nu = orlicz::luxemburg_norm(&us, &spec, &lam).unwrap();
        let nv = orlicz::luxemburg_norm(&vs, &spec, &lam).unwrap();
        // positive homogeneity
        let nau = orlicz::luxemburg_norm(&us.scale(alpha), &spec, &lam).unwrap();
        prop_assert!((nau - alpha * nu).abs() <= 1e-9 * (1.0 + alpha * nu));
        // subadditivity
        let sum = VectorSample::scalar(
            us.values.iter().zip(&vs.values).map(|(a, b)| a[0] + b[0]).collect(),
        );
        let ns = orlicz::luxemburg_norm(&sum, &spec, &lam).unwrap();
        prop_assert!(ns <= nu + nv + 1e-9);
    }

    #[test]
    fn gamma_sits_in_unit_interval(p0 in 1.0f64..4.0, gap in 0.0f64..4.0) {
        let g = cost::gamma(p0 + gap, p0).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0);
        if gap == 0.0 {
            prop_assert!(g == 1.0);
        }
    }

    #[test]
    fn young_function_growth_bounds(spec in any_cost(), r in 0.01f64..100.0) {
        let prof = spec.young_profile().unwrap();
        let phi = prof.phi(r);
        if r <= 1.0 {
            prop_assert!(phi <= r.powf(prof.p_minus) * (1.0 + 1e-8));
        } else {
            prop_assert!(phi <= r.powf(prof.p_plus) * (1.0 + 1e-8));
        }
        // Ψ <= Φ
        prop_assert!(prof.psi(r) <= phi * (1.0 + 1e-12));
    }

    #[test]
    fn simplex_matches_monotone_coupling(
        wmu in prop::collection::vec(0.05f64..1.0, 2..8),
        wnu in prop::collection::vec(0.05f64..1.0, 2..8),
        p in 1.25f64..3.5,
    ) {
        let mu = scalar_measure(wmu);
        let nu = {
            let total: f64 = wnu.iter().sum();
            DiscreteMeasure::new(
                (0..wnu.len()).map(|k| vec![0.37 + 1.3 * k as f64]).collect(),
                wnu.iter().map(|w| w / total).collect(),
            )
            .unwrap()
        };
        let spec = CostSpec::power(p, 1).unwrap();
        let plan = transport::solve_ot(&mu, &nu, &spec).unwrap();
        let (oracle, _) = transport::ot_1d_monotone(&mu, &nu, &spec).unwrap();
        prop_assert!((plan.cost - oracle).abs() <= 1e-10 * (1.0 + oracle));
        prop_assert!(transport::support_optimality_check(&plan, &spec).unwrap());
    }

    #[test]
    fn hopf_lax_comparison_principles(
        vals in prop::collection::vec(-2.0f64..2.0, 17),
        t in 0.1f64..2.0,
    ) {
        let g = GridGeometry::line_span(-1.0, 1.0, 17).unwrap();
        let f = GridField::new(g, vals).unwrap();
        let spec = CostSpec::power(2.0, 1).unwrap();
        let q = hopflax::inf_convolve(&f, &spec, t).unwrap();
        for i in 0..f.values().len() {
            prop_assert!(q.field.values()[i] <= f.values()[i] + 1e-12);
            prop_assert!(q.field.values()[i].abs() <= f.max_abs() + 1e-12);
        }
        prop_assert!(q.field.lip_estimate() <= f.lip_estimate() * (1.0 + 1e-9) + 1e-12);
    }
}
