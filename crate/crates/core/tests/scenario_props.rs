use dbu::scenario::{m_interval, membership_condition, validate, Geometry, Scenario};
use proptest::prelude::*;

fn point(dim: usize) -> Geometry {
    Geometry::Point { center: vec![0.0; dim] }
}

#[test]
fn point_interval_nonempty_on_grid() {
    for dim in 2..=6 {
        for &p in &[1.1, 1.5, 2.0, 3.0] {
            assert!(!m_interval(dim, p, &point(dim)).unwrap().is_empty(), "d={dim} p={p}");
        }
    }
}

proptest! {
    #[test]
    fn line_interval_empty_iff_p_at_least_4(dim in 2usize..8, p in 1.001f64..12.0) {
        let empty = m_interval(dim, p, &Geometry::Line).unwrap().is_empty();
        prop_assert_eq!(empty, p >= 4.0);
    }

    #[test]
    fn sphere_interval_empty_iff_p_at_least_2(p in 1.001f64..8.0) {
        let empty = m_interval(3, p, &Geometry::Sphere).unwrap().is_empty();
        prop_assert_eq!(empty, p >= 2.0);
    }

    #[test]
    fn interval_bounds_are_ordered_iff_nonempty(dim in 2usize..8, p in 1.001f64..12.0) {
        for g in [point(dim), Geometry::Line] {
            let i = m_interval(dim, p, &g).unwrap();
            prop_assert_eq!(i.is_empty(), !(i.lower < i.upper));
        }
    }

    #[test]
    fn raising_m_keeps_feasibility(dim in 2usize..5, p in 1.05f64..3.9, s in 0.0f64..2.5, t in 0.0f64..1.0, u in 0.0f64..1.0) {
        for g in [point(dim), Geometry::Line] {
            let i = m_interval(dim, p, &g).unwrap();
            if i.is_empty() {
                continue;
            }
            let m1 = i.lower + (i.upper - i.lower) * t.max(1e-9);
            let m2 = m1 + (i.upper - m1) * u;
            let a = Scenario::new(dim, p, s, m1, 0.1, 1.0, g.clone(), 1).unwrap();
            let b = Scenario::new(dim, p, s, m2, 0.1, 1.0, g.clone(), 1).unwrap();
            if validate(&a).is_feasible() && membership_condition(dim, s, m2, &g) {
                prop_assert!(validate(&b).is_feasible());
            }
        }
    }

    #[test]
    fn feasible_means_every_check_passes(dim in 2usize..5, p in 1.05f64..5.0, s in 0.0f64..2.5, m in 0.1f64..2.5) {
        let sc = Scenario::new(dim, p, s, m, 0.1, 1.0, point(dim), 1).unwrap();
        let v = validate(&sc);
        prop_assert_eq!(v.is_feasible(), v.reasons.is_empty());
        prop_assert_eq!(v.is_feasible(), v.assumption_a_ok && v.theorem_range_ok && v.membership_ok && v.m_interval.contains(m));
    }
}
