use mixsum::forms::{polygonal, represented_set, represented_set_with_cap, represents, shifted_target, FormInstance};
use mixsum::Error;
use proptest::prelude::*;

fn valid_form() -> impl Strategy<Value = FormInstance> {
    (1i64..40, 1i64..40, 1i64..40, prop::sample::select(vec![3i64, 5, 7, 11, 13]), 1u32..3)
        .prop_filter_map("invalid parameters", |(a, b, c, p, k)| FormInstance::new(a, b, c, p, k).ok())
}

// Direct triple loop with y outermost; bounds from the definite quadratic part.
fn slow_hits(f: &FormInstance, bound: u64) -> Vec<bool> {
    let mut hit = vec![false; bound as usize + 1];
    let m = f.order();
    let zmax = (((2 * bound) as f64 / (m - 2) as f64).sqrt() as i64) + 2;
    let ymax = ((bound as f64 / f.b() as f64).sqrt() as i64) + 1;
    let xmax = ((bound as f64 / f.a() as f64).sqrt() as i64) + 1;
    for y in -ymax..=ymax {
        for z in -zmax..=zmax {
            let base = f.b() * y * y + f.c() * polygonal(m, z).unwrap();
            for x in -xmax..=xmax {
                let v = base + f.a() * x * x;
                if (0..=bound as i64).contains(&v) {
                    hit[v as usize] = true;
                }
            }
        }
    }
    hit
}

#[test]
fn sieve_matches_slow_loop_on_fixtures() {
    let fixtures = [
        (2, 2, 1, 5, 1),
        (4, 2, 1, 3, 1),
        (4, 1, 1, 3, 1),
        (8, 1, 1, 3, 1),
        (1, 15, 1, 3, 1),
        (1, 11, 1, 3, 1),
        (7, 1, 2, 3, 1),
        (4, 3, 1, 3, 1),
        (1, 5, 1, 3, 1),
        (10, 1, 1, 3, 1),
    ];
    for (a, b, c, p, k) in fixtures {
        let f = FormInstance::new(a, b, c, p, k).unwrap();
        let set = represented_set(&f, 10_000).unwrap();
        let slow = slow_hits(&f, 10_000);
        for n in 0..=10_000u64 {
            assert_eq!(set.contains(n), slow[n as usize], "{f} at {n}");
        }
    }
}

#[test]
fn budget_is_enforced() {
    let f = FormInstance::new(1, 1, 1, 3, 1).unwrap();
    assert!(matches!(represented_set_with_cap(&f, 1 << 20, 1000), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn normalization_swaps_by_two_adic_valuation() {
    let f = FormInstance::new(1, 4, 1, 3, 1).unwrap();
    assert!(f.swapped());
    assert_eq!((f.a(), f.b()), (4, 1));
    assert_eq!(f.original_ab(), (1, 4));
    assert_eq!(f.to_string(), "1x^2 + 4y^2 + 1P_5(z)");
}

proptest! {
    #[test]
    fn represents_agrees_with_bitmap(f in valid_form()) {
        let set = represented_set(&f, 200).unwrap();
        for t in 0..=200u64 {
            let sol = represents(&f, t as i64).unwrap();
            prop_assert_eq!(sol.is_some(), set.contains(t), "{} at {}", f, t);
            if let Some(s) = sol {
                prop_assert_eq!(s.value(&f), Some(t as i64));
            }
        }
    }

    #[test]
    fn reduction_identity(f in valid_form(), x in -10_000i64..10_000, y in -10_000i64..10_000, z in -10_000i64..10_000) {
        let n = f.eval(x, y, z).unwrap();
        let pk = f.pk() as i128;
        let lhs = shifted_target(&f, n).unwrap() as i128;
        let w = 2 * pk * z as i128 - (pk - 2);
        let rhs = 8 * pk * f.a() as i128 * (x as i128).pow(2)
            + 8 * pk * f.b() as i128 * (y as i128).pow(2)
            + f.c() as i128 * w * w;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn swapping_a_and_b_changes_nothing(a in 1i64..60, b in 1i64..60, c in 1i64..60) {
        let (Ok(f), Ok(g)) = (FormInstance::new(a, b, c, 3, 1), FormInstance::new(b, a, c, 3, 1)) else {
            return Ok(());
        };
        prop_assert_eq!(represented_set(&f, 500).unwrap(), represented_set(&g, 500).unwrap());
        let (vf, vg) = (mixsum::classify(&f).unwrap(), mixsum::classify(&g).unwrap());
        prop_assert_eq!(vf.kind, vg.kind);
        prop_assert_eq!(vf.theorem, vg.theorem);
        prop_assert_eq!(vf.candidate, vg.candidate);
    }
}
