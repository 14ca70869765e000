mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spreadlab::sim::{decode, encode, midpoint_worst_error, FailureModel, SimConfig};
use spreadlab::spread::max_spread_over;
use spreadlab::*;

fn system(a: Arrangement) -> ChannelSystem {
    ChannelSystem::new(a).unwrap()
}

fn received(cell: &[usize], t: FailurePattern) -> Vec<Option<usize>> {
    cell.iter()
        .enumerate()
        .map(|(d, &c)| (!t.is_failed(d)).then_some(c))
        .collect()
}

#[test]
fn every_decode_contains_the_source() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shapes = [vec![3, 3], vec![2, 3, 4], vec![3, 3, 3]];
    for sizes in shapes {
        let shape = Shape::new(sizes).unwrap();
        let arrangements = [
            herringbone_recursive(&HerringboneSpec::minima(shape.clone())).unwrap(),
            common::random_full(&shape, &mut rng),
            common::random_partial(&shape, shape.cell_count() / 2, &mut rng),
        ];
        for a in arrangements {
            let sys = system(a.clone());
            let d = distortion_profile(&sys);
            for x in 0..a.m() as u64 {
                let cell = encode(x, &sys).unwrap();
                for t in FailurePattern::all(shape.k()).unwrap() {
                    let dec = decode(&received(&cell, t), t, &sys).unwrap();
                    assert!(dec.contains(x));
                    assert!(dec.width() <= d.get(t));
                    assert!(x.abs_diff(dec.estimate) <= midpoint_worst_error(d.get(t)));
                }
            }
        }
    }
}

#[test]
fn distortions_are_slice_spreads() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let shape = Shape::new(vec![3, 2, 4]).unwrap();
    for a in [
        common::random_full(&shape, &mut rng),
        common::random_partial(&shape, 9, &mut rng),
    ] {
        let d = distortion_profile(&system(a.clone()));
        assert_eq!(d.d.len(), 7);
        assert_eq!(d.d[0], 0);
        for t in FailurePattern::all(3).unwrap().into_iter().skip(1) {
            let free = t.failed_dims();
            assert_eq!(d.get(t), common::max_spread_free(&a, &free));
            assert_eq!(
                d.get(t),
                max_spread_over(&a, &free, Exec::Sequential)
                    .unwrap()
                    .max_spread
            );
        }
    }
}

#[test]
fn more_failures_never_help() {
    let a = herringbone_merge(3, 3).unwrap();
    let d = distortion_profile(&system(a));
    for s in 0..7u32 {
        for t in 0..7u32 {
            if s & t == s {
                assert!(d.d[s as usize] <= d.d[t as usize], "{s:#b} ⊆ {t:#b}");
            }
        }
    }
}

#[test]
fn planar_distortion_depends_on_the_failure_count_only() {
    // The 2x2 merge is the exception: [[0, 1], [2, 3]] up to symmetry.
    assert_eq!(
        distortion_profile(&system(herringbone_merge(2, 2).unwrap())).d,
        vec![0, 1, 2]
    );
    for n in 3..=9 {
        let d = distortion_profile(&system(herringbone_merge(n, 2).unwrap()));
        assert_eq!(d.d[1], d.d[2], "n = {n}");
        assert_eq!(d.d[1], merge_upper_bound(n, 2).unwrap());
    }
}

#[test]
fn three_channel_distortion_by_pattern() {
    // Losing the middle channel alone costs one less than losing an outer
    // one; losing both outer channels costs one more than any other pair.
    let d = distortion_profile(&system(herringbone_merge(3, 3).unwrap()));
    assert_eq!(d.d, vec![0, 17, 16, 21, 17, 22, 21]);
    let worst_single = [1, 2, 4].map(|m| d.d[m]).into_iter().max().unwrap();
    assert_eq!(worst_single, merge_upper_bound(3, 3).unwrap());
}

#[test]
fn merge_beats_row_major() {
    let shape = Shape::cube(3, 2).unwrap();
    let rm = distortion_profile(&system(Arrangement::row_major(shape)));
    let hb = distortion_profile(&system(herringbone_merge(3, 2).unwrap()));
    assert_eq!(rm.d[1].max(rm.d[2]), 6);
    assert_eq!(hb.d[1].max(hb.d[2]), 5);
    assert_eq!(hb.rates, vec![3f64.log2(); 2]);
}

#[test]
fn simulation_is_sound_and_reproducible() {
    let sys = system(herringbone_merge(3, 3).unwrap());
    for model in [
        FailureModel::ForcedSingle,
        FailureModel::Bernoulli { p: 0.3 },
        FailureModel::Forced { mask: 5 },
    ] {
        let seq = simulate(
            &sys,
            &SimConfig::new(model, 20_000, 9).exec(Exec::Sequential),
        )
        .unwrap();
        let par = simulate(&sys, &SimConfig::new(model, 20_000, 9).exec(Exec::Parallel)).unwrap();
        assert_eq!(seq, par);
        let e = &seq.empirical;
        assert!(e.sound);
        assert_eq!(
            e.per_pattern.iter().map(|p| p.trials).sum::<u64>() + e.all_failed,
            e.trials
        );
        for p in &e.per_pattern {
            assert!(p.max_width <= seq.d[p.pattern as usize]);
            assert!(p.max <= midpoint_worst_error(seq.d[p.pattern as usize]));
        }
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let sys = system(herringbone_merge(3, 2).unwrap());
    assert!(matches!(
        simulate(
            &sys,
            &SimConfig::new(FailureModel::Bernoulli { p: 1.5 }, 10, 0)
        ),
        Err(Error::InvalidProbability(_))
    ));
    assert!(simulate(
        &sys,
        &SimConfig::new(FailureModel::Forced { mask: 3 }, 10, 0)
    )
    .is_err());
    assert!(simulate(&sys, &SimConfig::new(FailureModel::ForcedSingle, 0, 0)).is_err());
    assert!(encode(9, &sys).is_err());
    let t = FailurePattern::single(0, 2).unwrap();
    assert!(decode(&[Some(1), Some(1)], t, &sys).is_err());
    assert!(decode(&[None, Some(3)], t, &sys).is_err());
    assert!(decode(&[None], t, &sys).is_err());
}

#[test]
fn decoding_an_empty_slice_fails() {
    let shape = Shape::cube(3, 2).unwrap();
    let a = Arrangement::from_cells(
        shape,
        &[Some(0), Some(1), None, None, None, None, None, None, None],
    )
    .unwrap();
    let sys = system(a);
    let t = FailurePattern::single(1, 2).unwrap();
    assert!(matches!(
        decode(&[Some(2), None], t, &sys),
        Err(Error::DecodeFailure(_))
    ));
}
