mod common;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spreadlab::diagonal::{
    blocked_diagonal_with, diagonal_in_cube_with, diagonal_shift, diagonal_thickness,
    interior_lines, measured_diagonal_spread, BlockedLayout,
};
use spreadlab::herringbone::central_line_minimum;
use spreadlab::*;

fn hb_min(n: usize, k: usize) -> Arrangement {
    herringbone_recursive(&HerringboneSpec::minima(Shape::cube(n, k).unwrap())).unwrap()
}

#[test]
fn square_herringbone_matches_hand_formula() {
    for n in 1..=9 {
        let a = hb_min(n, 2);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(
                    a.value(&[i, j]).unwrap(),
                    Some(common::hb2(i, j)),
                    "n = {n}"
                );
            }
        }
    }
}

#[test]
fn herringbone_values_below_t_pow_k_fill_the_subcube() {
    for k in 1..=3 {
        for n in 1..=5 {
            let a = hb_min(n, k);
            for t in 1..=n {
                let bound = (t as u64).pow(k as u32);
                for c in a.shape().cells() {
                    let inside = c.iter().all(|&x| x < t);
                    assert_eq!(a.value(&c).unwrap().unwrap() < bound, inside);
                }
            }
        }
    }
}

#[test]
fn every_herringbone_is_monotonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for sizes in [
        vec![3, 3],
        vec![2, 5],
        vec![4, 1, 3],
        vec![2, 3, 4],
        vec![3, 3, 3],
        vec![2, 2, 2, 2],
    ] {
        let shape = Shape::new(sizes).unwrap();
        for _ in 0..4 {
            let mut order: Vec<usize> = (0..shape.k()).collect();
            order.shuffle(&mut rng);
            for spec in [
                HerringboneSpec::minima(shape.clone()),
                HerringboneSpec::maxima(shape.clone()),
            ] {
                let a = herringbone_recursive(&spec.with_order(order.clone())).unwrap();
                assert!(common::is_monotonic(&a), "{} {order:?}", shape);
            }
        }
    }
}

#[test]
fn maxima_is_the_reflected_complement_for_any_order() {
    let shape = Shape::new(vec![3, 4, 2]).unwrap();
    let n = shape.cell_count() as u64;
    for order in [vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]] {
        let mx = herringbone_recursive(
            &HerringboneSpec::maxima(shape.clone()).with_order(order.clone()),
        )
        .unwrap();
        let mn = herringbone_recursive(&HerringboneSpec::minima(shape.clone()).with_order(order))
            .unwrap();
        for i in 0..shape.cell_count() {
            assert_eq!(
                mx.value_at(i).unwrap(),
                n - 1 - mn.value_at(shape.reflect(i)).unwrap()
            );
        }
    }
    let cube = hb_max_arrangement(&HerringboneSpec::maxima(Shape::cube(4, 3).unwrap())).unwrap();
    assert_eq!(cube.value(&[3, 3, 3]).unwrap(), Some(63));
}

#[test]
fn three_by_three_sequences() {
    let mn = hb_min(3, 2);
    let mx = hb_max_arrangement(&HerringboneSpec::maxima(Shape::cube(3, 2).unwrap())).unwrap();
    assert_eq!(smalls_sequence(&mn, 1).unwrap(), vec![0, 0, 1, 2, 4, 6]);
    assert_eq!(bigs_sequence(&mn, 1).unwrap(), vec![4, 5, 6, 7, 8, 8]);
    assert_eq!(bigs_sequence(&mx, 1).unwrap(), vec![2, 4, 6, 7, 8, 8]);
    let row = SliceSpec::line(1, &[0, 0]);
    assert_eq!(slice_spread(&mn, &row).unwrap(), Some(6));
    assert_eq!(max_spread(&mn, 1).unwrap().max_spread, 6);
}

#[test]
fn central_line_minimum_decreases_along_dimensions() {
    for n in [3, 5, 7] {
        for k in 1..=4 {
            let a = hb_min(n, k);
            let mut prev = None;
            for p in 1..=k {
                let formula = hb_min_central_line(n, k, p).unwrap();
                assert_eq!(
                    central_line_minimum(&a, p).unwrap(),
                    Some(formula),
                    "n={n} k={k} p={p}"
                );
                if let Some(prev) = prev {
                    assert!(formula < prev);
                }
                prev = Some(formula);
            }
        }
    }
}

#[test]
fn eleven_to_the_fifth_central_line() {
    let a = hb_min(11, 5);
    assert_eq!(central_line_minimum(&a, 5).unwrap(), Some(6475));
    assert_eq!(hb_min_central_line(11, 5, 5).unwrap(), 6475);
}

#[test]
fn merge_is_a_bijection() {
    for n in 1..=6 {
        for k in 1..=3 {
            let a = herringbone_merge(n, k).unwrap();
            assert!(a.is_full());
            let mut vals: Vec<u64> = a.cells().into_iter().flatten().collect();
            vals.sort_unstable();
            assert!(vals.iter().enumerate().all(|(i, &v)| v == i as u64));
            assert_eq!(
                a.value(&vec![n - 1; k]).unwrap(),
                Some((n.pow(k as u32) - 1) as u64)
            );
        }
    }
}

#[test]
fn odd_merge_attains_the_parity_formula() {
    for n in [1, 3, 5, 7] {
        for k in 1..=3 {
            let c = merge_spread_check(n, k).unwrap();
            assert!(c.equal, "n = {n}, k = {k}: {c:?}");
            assert_eq!(
                c.measured,
                common::max_spread(&herringbone_merge(n, k).unwrap(), 1)
            );
        }
    }
}

#[test]
fn even_merge_spreads() {
    // Measured line spreads of the construction against the even-n formula.
    let table = [
        (2, 2, 2, 2),
        (4, 2, 9, 9),
        (6, 2, 20, 20),
        (8, 2, 35, 35),
        (2, 3, 4, 4),
        (4, 3, 42, 40),
        (6, 3, 148, 142),
        (2, 4, 9, 10),
    ];
    for (n, k, measured, formula) in table {
        let c = merge_spread_check(n, k).unwrap();
        assert_eq!(
            (c.measured, c.formula),
            (measured, formula),
            "n = {n}, k = {k}"
        );
    }
}

#[test]
fn a_central_line_attains_the_merge_spread() {
    for n in 2..=7 {
        for k in 2..=3 {
            let a = herringbone_merge(n, k).unwrap();
            let r = max_spread_with(&a, 1, Exec::Parallel, true).unwrap();
            let central_max = r
                .per_slice
                .unwrap()
                .into_iter()
                .filter(|s| s.slice.is_central(a.shape()))
                .map(|s| s.spread)
                .max();
            assert_eq!(central_max, Some(r.max_spread), "n = {n}, k = {k}");
        }
    }
}

#[test]
fn merged_slice_spreads() {
    // Largest l-slice spread of the merge, by (n, k, l).
    let table = [
        (3, 3, 1, 17),
        (3, 3, 2, 22),
        (5, 3, 1, 84),
        (5, 3, 2, 100),
        (3, 4, 1, 59),
        (3, 4, 2, 68),
        (3, 4, 3, 74),
    ];
    for (n, k, l, want) in table {
        let a = herringbone_merge(n, k).unwrap();
        assert_eq!(
            max_spread(&a, l).unwrap().max_spread,
            want,
            "n={n} k={k} l={l}"
        );
    }
}

#[test]
fn diagonal_lines_shift_by_a_constant() {
    for l in 1..=7 {
        let spec = DiagonalSpec::new(2, l, DiagonalSpec::min_window(l) + 3).unwrap();
        let a = infinite_diagonal_window(&spec).unwrap();
        let lines = interior_lines(&a, l);
        assert!(lines.len() >= 2 * (2 * l + 1));
        let shift = diagonal_shift(2, l).unwrap();
        for line in &lines {
            // Odd bands lean one way, so the spread is only constant per direction.
            let first = lines.iter().find(|o| o.dim == line.dim).unwrap();
            assert_eq!(line.cells, l);
            assert_eq!(line.spread(), first.spread(), "l = {l}");
            let next: Vec<usize> = line
                .through
                .iter()
                .enumerate()
                .map(|(d, &x)| if d == line.dim { 0 } else { x + 1 })
                .collect();
            if let Some(n) = lines
                .iter()
                .find(|o| o.dim == line.dim && o.through == next)
            {
                assert_eq!(n.min - line.min, shift);
                assert_eq!(n.max - line.max, shift);
            }
        }
    }
}

#[test]
fn diagonal_closed_form_against_measurement() {
    for l in 1..=9 {
        let spec = DiagonalSpec::new(2, l, DiagonalSpec::min_window(l) + 2).unwrap();
        let measured = measured_diagonal_spread(&spec).unwrap();
        let formula = spreadlab::diagonal::diagonal_max_spread(2, l).unwrap();
        let offset = if l % 2 == 1 { 1 } else { 0 };
        assert_eq!(measured + offset, formula, "l = {l}");
    }
}

#[test]
fn diagonal_in_cube_matches_the_window_inside() {
    for m in [10, 16, 20] {
        let l = diagonal_thickness(8, 2, m).unwrap();
        let a = diagonal_in_cube(8, 2, m).unwrap();
        let r = max_spread_with(&a, 1, Exec::Sequential, true).unwrap();
        let (mut edge, mut middle) = (0, 0);
        for s in r.per_slice.unwrap() {
            let c = *s.slice.fixed.values().next().unwrap();
            if c < l || c + l >= 8 {
                edge = edge.max(s.spread);
            } else {
                middle = middle.max(s.spread);
            }
        }
        let window = measured_diagonal_spread(
            &DiagonalSpec::new(2, l, DiagonalSpec::min_window(l)).unwrap(),
        )
        .unwrap();
        assert!(middle >= edge, "m = {m}");
        assert_eq!(middle, window, "m = {m}");
    }
    assert_eq!(diagonal_thickness(8, 2, 30).unwrap(), 5);
    let a = diagonal_in_cube(8, 2, 30).unwrap();
    assert_eq!(max_spread(&a, 1).unwrap().max_spread, 12);
}

#[test]
fn thick_diagonal_sits_between_merge_and_herringbone() {
    for n in 5..=8 {
        let merged = max_spread(&herringbone_merge(n, 2).unwrap(), 1)
            .unwrap()
            .max_spread;
        let plain = max_spread(&hb_min(n, 2), 1).unwrap().max_spread;
        assert_eq!(diagonal_in_cube(n, 2, n * n).unwrap(), hb_min(n, 2));
        for m in 1..=n * n {
            if diagonal_thickness(n, 2, m).unwrap() <= n {
                continue;
            }
            let d = max_spread(&diagonal_in_cube(n, 2, m).unwrap(), 1)
                .unwrap()
                .max_spread;
            assert!(
                merged <= d && d <= plain,
                "n = {n}, m = {m}: {merged} ≤ {d} ≤ {plain}"
            );
        }
    }
}

#[test]
fn blocked_never_loses_to_the_diagonal() {
    for (n, k) in [(6usize, 2usize), (8, 2), (10, 2), (4, 3)] {
        let cells = n.pow(k as u32);
        for m in [1, n, n + 1, 2 * n, cells / 4, cells / 3, cells / 2, cells] {
            let d = max_spread(&diagonal_in_cube(n, k, m).unwrap(), 1)
                .unwrap()
                .max_spread;
            let (layout, b) = blocked_diagonal_with(n, k, m, Exec::Parallel).unwrap();
            assert_eq!(b.m(), m);
            let bs = max_spread(&b, 1).unwrap().max_spread;
            assert!(
                bs <= d,
                "n={n} k={k} m={m}: blocked {bs} ({layout:?}) vs diagonal {d}"
            );
        }
    }
}

#[test]
fn blocked_wins_with_82_values_in_16_by_16() {
    let (layout, a) = blocked_diagonal_with(16, 2, 82, Exec::Sequential).unwrap();
    assert_eq!(
        layout,
        BlockedLayout::Blocks {
            b: 4,
            w: 2,
            blocks: 4
        }
    );
    assert_eq!(max_spread(&a, 1).unwrap().max_spread, 14);
    let (_, par) = blocked_diagonal_with(16, 2, 82, Exec::Parallel).unwrap();
    assert_eq!(par, a);
}

#[test]
fn diagonal_in_cube_places_exactly_m_values() {
    for (n, k) in [(6usize, 2usize), (4, 3), (5, 3), (3, 4)] {
        for m in 1..=n.pow(k as u32) {
            let a = diagonal_in_cube(n, k, m).unwrap();
            assert_eq!(a.m(), m);
            let l = diagonal_thickness(n, k, m).unwrap();
            if l > 1 {
                let thinner = diagonal_in_cube_with(n, k, l - 1, m);
                assert!(
                    thinner.is_err(),
                    "n={n} k={k} m={m} fits in thickness {}",
                    l - 1
                );
            }
        }
    }
}
