//! Property tests for the geometric primitives and the 1D limit problem.

use proptest::prelude::*;

use rodspec::geometry::{CrossSection, Profile, RodDomain};
use rodspec::limit1d::{shooting_oracle, solve_limit, Weight1D};

fn arb_domain() -> impl Strategy<Value = RodDomain> {
    let eps = 0.05f64..1.0;
    let ell1 = 0.5f64..3.0;
    prop_oneof![
        (ell1.clone(), eps.clone()).prop_map(|(l, e)| RodDomain::prism(l, e).unwrap()),
        (ell1.clone(), eps.clone()).prop_map(|(l, e)| RodDomain::two_prism(l, e).unwrap()),
        (ell1.clone(), eps.clone(), 0.5f64..2.0, 0.0f64..0.4).prop_map(|(l, e, off, amp)| {
            RodDomain::profiled_height(
                l,
                e,
                Profile::SinBump {
                    offset: off + amp, // keep the profile positive
                    amplitude: amp,
                },
            )
            .unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stretch_and_unstretch_are_mutually_inverse(
        domain in arb_domain(),
        t1 in 0.0f64..1.0,
        t2 in 0.0f64..1.0,
        t3 in 0.0f64..1.0,
    ) {
        let x1 = domain.ell0() + t1 * (domain.ell1() - domain.ell0());
        let (b2, b3) = domain.section_box(x1).unwrap();
        let y = [
            x1,
            b2[0] + t2 * (b2[1] - b2[0]),
            b3[0] + t3 * (b3[1] - b3[0]),
        ];
        let x = domain.unstretch(y).unwrap();
        let back = domain.stretch(x).unwrap();
        for (a, b) in back.iter().zip(&y) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn area_bounds_bracket_the_profile(domain in arb_domain(), t in 0.0f64..1.0) {
        let (c0, c1) = domain.area_bounds();
        let x1 = domain.ell0() + t * (domain.ell1() - domain.ell0());
        let a = domain.area_profile(x1).unwrap();
        prop_assert!(c0 > 0.0);
        prop_assert!(a >= c0 - 1e-12 && a <= c1 + 1e-12);
    }

    #[test]
    fn weight_scaling_leaves_the_limit_spectrum_unchanged(
        kappa in 0.1f64..10.0,
        split in 0.2f64..0.8,
        left in 0.5f64..4.0,
        right in 0.5f64..4.0,
    ) {
        let base = Weight1D::piecewise_constant(vec![(0.0, split, left), (split, 1.0, right)]).unwrap();
        let scaled = Weight1D::piecewise_constant(vec![
            (0.0, split, kappa * left),
            (split, 1.0, kappa * right),
        ]).unwrap();
        let a = solve_limit(&base, 0.0, 1.0, 2, 64).unwrap();
        let b = solve_limit(&scaled, 0.0, 1.0, 2, 64).unwrap();
        for (pa, pb) in a.pairs.iter().zip(&b.pairs) {
            prop_assert!((pa.lambda0 - pb.lambda0).abs() <= 1e-8 * pa.lambda0);
        }
    }

    #[test]
    fn p1_limit_bounds_the_shooting_roots_from_above(
        split in 0.25f64..0.75,
        left in 0.5f64..4.0,
        right in 0.5f64..4.0,
    ) {
        let w = Weight1D::piecewise_constant(vec![(0.0, split, left), (split, 1.0, right)]).unwrap();
        let roots = shooting_oracle(&w, 0.0, 1.0, 2).unwrap();
        let sol = solve_limit(&w, 0.0, 1.0, 2, 128).unwrap();
        for (p, r) in sol.pairs.iter().zip(&roots) {
            prop_assert!(p.lambda0 >= r - 1e-8);
            // and the P1 value is close at this resolution
            prop_assert!((p.lambda0 - r).abs() <= 5e-3 * r);
        }
    }
}

#[test]
fn mirrored_profiles_have_equal_area_bounds() {
    let up = RodDomain::new(
        0.0,
        1.0,
        0.1,
        CrossSection::BoxProfile {
            left: Profile::Constant { value: 0.5 },
            right: Profile::Constant { value: 0.5 },
            down: Profile::Constant { value: 0.2 },
            up: Profile::SinBump {
                offset: 1.0,
                amplitude: 0.5,
            },
        },
    )
    .unwrap();
    let down = RodDomain::new(
        0.0,
        1.0,
        0.1,
        CrossSection::BoxProfile {
            left: Profile::Constant { value: 0.5 },
            right: Profile::Constant { value: 0.5 },
            down: Profile::SinBump {
                offset: 1.0,
                amplitude: 0.5,
            },
            up: Profile::Constant { value: 0.2 },
        },
    )
    .unwrap();
    assert_eq!(up.area_bounds(), down.area_bounds());
}
