use charflow::cauchy::Invariant;
use charflow::corpus::{get_example, ExampleId, ExampleParams};
use charflow::geometry::{coverage_mask, degeneration_locus, envelope_discriminant, family_field, find_gaps, CellClass};
use charflow::numerics::{Bracket, Tolerance};
use charflow::plane::Point;

#[test]
fn envelope_points_touch_their_curves() {
    let ex = get_example(ExampleId::Example1, ExampleParams::default()).unwrap();
    let fam = ex.families.0.clone().build().unwrap();
    let tol = Tolerance::new(1e-13, 1e-13, 200).unwrap();
    let c_grid = Bracket::new(-1.0, 1.0).unwrap().subdivide(16);
    let env = envelope_discriminant(&fam, &c_grid, &tol).unwrap();
    assert_eq!(env.family, Some(Invariant::First));
    assert!(env.points.len() >= 10, "{} points", env.points.len());
    for p in &env.points {
        let c = p.c.unwrap();
        let x = fam.eval(&[p.point.y], c).unwrap();
        assert!((x - p.point.x).abs() <= 1e-8);
        let (_, dc) = fam.eval_dual(&[p.point.y], c, fam.c_slot()).unwrap();
        assert!(dc.abs() <= 1e-8, "dphi/dc = {dc}");
        let closed = ex.eval_oracle("envelope", &[("x", p.point.x), ("y", p.point.y)]).unwrap();
        assert!(closed.abs() <= 1e-7, "closed form residual {closed}");
    }
}

#[test]
fn polar_families_have_no_discriminant_envelope() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let fam = ex.families.0.clone().build().unwrap();
    assert!(envelope_discriminant(&fam, &[0.0], &Tolerance::default()).is_err());
}

#[test]
fn locus_is_symmetric_in_the_fields() {
    let ex = get_example(ExampleId::Example2, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let l12 = degeneration_locus(family_field(&f1), family_field(&f2), ex.bbox, 40, 40, 1e-6);
    let l21 = degeneration_locus(family_field(&f2), family_field(&f1), ex.bbox, 40, 40, 1e-6);
    assert_eq!(l12.cells, l21.cells);
    assert_eq!(l12.points.len(), l21.points.len());
    for (p, q) in l12.points.iter().zip(&l21.points) {
        assert_eq!(p.point, q.point);
        assert_eq!(p.cross, -q.cross);
    }
    let a_minus_b = ex.params.a - ex.params.b;
    assert!(l12.points.iter().any(|p| (p.point.y - a_minus_b).abs() < 1e-8));
}

#[test]
fn gap_cells_survive_refinement() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let grids: Vec<_> = [50, 100, 200]
        .iter()
        .map(|&n| coverage_mask(&f1, &f2, &ex.support, ex.bbox, n, n))
        .collect();
    for pair in grids.windows(2) {
        let (coarse, fine) = (&pair[0], &pair[1]);
        assert_eq!(find_gaps(coarse).len(), 1);
        assert_eq!(find_gaps(fine).len(), 1);
        for j in 0..coarse.ny {
            for i in 0..coarse.nx {
                if coarse.class(i, j) != CellClass::Gap {
                    continue;
                }
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let class = fine.class(2 * i + di, 2 * j + dj);
                    assert_ne!(class, CellClass::ExteriorUncovered, "coarse ({i}, {j})");
                }
            }
        }
        assert!(fine.count(CellClass::Gap) as f64 >= 3.0 * coarse.count(CellClass::Gap) as f64);
    }
}

#[test]
fn gap_matches_closed_form_disk() {
    let ex = get_example(ExampleId::Example3, ExampleParams::default()).unwrap();
    let f1 = ex.families.0.clone().build().unwrap();
    let f2 = ex.families.1.clone().build().unwrap();
    let grid = coverage_mask(&f1, &f2, &ex.support, ex.bbox, 100, 100);
    let gap = &find_gaps(&grid)[0];
    let inside = gap
        .cells
        .iter()
        .filter(|&&(i, j)| {
            let Point { x, y } = grid.cell_center(i, j);
            ex.eval_oracle("gap", &[("x", x), ("y", y)]).unwrap() < 0.0
        })
        .count();
    assert!(inside as f64 >= 0.9 * gap.cells.len() as f64);
}
