use mixsum::forms::{represented_set, FormInstance};
use mixsum::local::{genus_check, isometric_to_split, jordan_decompose_odd, missing_class, DiagonalLattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Number of v in (Z/q^3)^3 with Q(v) ≡ t, for every t.
fn counts_mod_q3(entries: [i128; 3], q: i128) -> Vec<u64> {
    let m = (q * q * q) as usize;
    let mut acc = vec![0u64; m];
    acc[0] = 1;
    for e in entries {
        let mut single = vec![0u64; m];
        for x in 0..m as i128 {
            single[(e * x * x).rem_euclid(m as i128) as usize] += 1;
        }
        let mut next = vec![0u64; m];
        for (i, &a) in acc.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in single.iter().enumerate().filter(|(_, &b)| b != 0) {
                next[(i + j) % m] += a * b;
            }
        }
        acc = next;
    }
    acc
}

#[test]
fn isometry_matches_counting_mod_q_cubed() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let primes = [3i64, 5, 7, 11, 13];
    let (mut iso, mut non) = (0, 0);
    for _ in 0..200 {
        let q = primes[rng.gen_range(0..primes.len())];
        // Total q-valuation at most 2.
        let mut budget = 2u32;
        let entries: [i128; 3] = std::array::from_fn(|_| {
            let v = rng.gen_range(0..=budget);
            budget -= v;
            let mut u = rng.gen_range(1i128..200);
            while u % q as i128 == 0 {
                u += 1;
            }
            u * (q as i128).pow(v)
        });
        let d: i128 = entries.iter().product();
        let same = counts_mod_q3(entries, q as i128) == counts_mod_q3([1, -1, -d], q as i128);
        let claimed = isometric_to_split(entries, q).unwrap();
        assert_eq!(claimed, same, "{entries:?} at q = {q}");
        if claimed {
            iso += 1;
        } else {
            non += 1;
        }
    }
    assert!(iso > 20 && non > 20, "{iso} isometric, {non} not");
}

#[test]
fn jordan_components_are_sorted_and_cover_rank() {
    let comps = jordan_decompose_odd([75, 3, 2], 5).unwrap();
    assert_eq!(comps.iter().map(|c| c.rank as u32).sum::<u32>(), 3);
    assert!(comps.windows(2).all(|w| w[0].scale < w[1].scale));
    assert!(jordan_decompose_odd([1, 1, 1], 9).is_err());
}

#[test]
fn obstructed_forms_miss_a_class_and_others_do_not() {
    for a in 1..=12 {
        for b in 1..=12 {
            for c in 1..=12 {
                let Ok(f) = FormInstance::new(a, b, c, 3, 1) else { continue };
                let local = genus_check(&f);
                let set = represented_set(&f, 20_000).unwrap();
                match local.failing_prime() {
                    Some(q) => {
                        let class = missing_class(&f, q, 10_000).expect("obstruction has a class");
                        assert!((class.residue..=20_000).step_by(class.modulus as usize).all(|n| !set.contains(n)));
                    }
                    None => {
                        for q in [2i64, 5, 7, 11] {
                            assert!(missing_class(&f, q, 2_000).is_none(), "{f} misses a class mod {q}^e");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lattice_representation_search() {
    let l = DiagonalLattice::new([72, 312, 2]).unwrap();
    assert_eq!(l.represent(26).unwrap(), None);
    let v = l.represent(74).unwrap().unwrap();
    assert_eq!(72 * v[0] * v[0] + 312 * v[1] * v[1] + 2 * v[2] * v[2], 74);
    assert!(DiagonalLattice::new([1, -1, 3]).unwrap().represent(5).is_err());
    assert_eq!(l.represent(0).unwrap(), Some([0, 0, 0]));
}
