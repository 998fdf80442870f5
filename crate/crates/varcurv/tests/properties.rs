//! Property-based invariants over randomized geometry.

use proptest::prelude::*;
use varcurv::{
    boundary, hausdorff_sets, perimeter, BinarySet, Grid, Neighborhood, PerimeterScheme,
};

fn arb_blob(n: usize) -> impl Strategy<Value = BinarySet> {
    // union of 1..4 disks and a rectangle, clipped away from the border
    let disk = (0.1f64..0.8, -0.5f64..0.5, -0.5f64..0.5);
    (proptest::collection::vec(disk, 1..4), -0.7f64..0.0, 0.0f64..0.7).prop_map(
        move |(disks, lo, hi)| {
            let g = Grid::centered(n, 2.0);
            let mut m = BinarySet::rect(g, lo, lo * 0.5, hi, hi * 0.8);
            for (r, cx, cy) in disks {
                m = m.union(&BinarySet::disk(g, (cx, cy), r * 0.5));
            }
            m
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perimeter_submodular_per_family(e in arb_blob(48), f in arb_blob(48)) {
        for nb in [Neighborhood::N4, Neighborhood::N8, Neighborhood::N16] {
            let scheme = PerimeterScheme::new(nb);
            let ci = scheme.transition_counts(&e.intersect(&f));
            let cu = scheme.transition_counts(&e.union(&f));
            let ce = scheme.transition_counts(&e);
            let cf = scheme.transition_counts(&f);
            for k in 0..ce.len() {
                prop_assert!(ci[k] + cu[k] <= ce[k] + cf[k]);
            }
        }
    }

    #[test]
    fn boundary_complement_symmetry(e in arb_blob(48)) {
        let a = boundary(&e);
        let b = boundary(&e.complement());
        let key = |p: &(f64, f64)| ((p.0 * 1e9).round() as i64, (p.1 * 1e9).round() as i64);
        let mut ka: Vec<_> = a.points.iter().map(key).collect();
        let mut kb: Vec<_> = b.points.iter().map(key).collect();
        ka.sort();
        kb.sort();
        prop_assert_eq!(ka, kb);
    }

    #[test]
    fn hausdorff_metric_axioms(a in arb_blob(40), b in arb_blob(40), c in arb_blob(40)) {
        prop_assume!(!a.is_empty() && !b.is_empty() && !c.is_empty());
        let dab = hausdorff_sets(&a, &b).unwrap();
        let dba = hausdorff_sets(&b, &a).unwrap();
        prop_assert_eq!(dab.to_bits(), dba.to_bits());
        prop_assert!(dab >= 0.0);
        if a.sym_diff_count(&b) == 0 {
            prop_assert_eq!(dab, 0.0);
        } else {
            prop_assert!(dab > 0.0);
        }
        let dac = hausdorff_sets(&a, &c).unwrap();
        let dcb = hausdorff_sets(&c, &b).unwrap();
        prop_assert!(dab <= dac + dcb + 1e-12);
    }

    #[test]
    fn boundary_hausdorff_inequality(a in arb_blob(40), b in arb_blob(40)) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        prop_assume!(!a.is_full() && !b.is_full());
        let rep = varcurv::boundary_hausdorff_bound_check(&a, &b).unwrap();
        prop_assert!(rep.inequality_holds,
            "dh(∂) = {} vs max({}, {})", rep.boundary, rep.sets, rep.complements);
    }

    #[test]
    fn isoperimetric_inequality_16(e in arb_blob(64)) {
        prop_assume!(!e.is_empty());
        prop_assume!(!e.touches_border());
        // keep one connected component
        let (labels, ncomp) = e.components();
        prop_assume!(ncomp >= 1);
        let mut counts = vec![0usize; ncomp + 1];
        for &l in &labels {
            counts[l as usize] += 1;
        }
        let biggest = (1..=ncomp).max_by_key(|&l| counts[l]).unwrap() as u32;
        let comp = BinarySet {
            grid: e.grid,
            mask: labels.iter().map(|&l| l == biggest).collect(),
        };
        let per = perimeter(&comp, &PerimeterScheme::new(Neighborhood::N16));
        let bound = 2.0 * std::f64::consts::PI.sqrt() * comp.area().sqrt() * 0.97;
        prop_assert!(per >= bound, "Per = {per} vs isoperimetric bound {bound}");
    }

    #[test]
    fn pgm_mask_roundtrip(e in arb_blob(32)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        varcurv::io::save_mask(&p, &e).unwrap();
        let back = varcurv::io::load_mask(&p).unwrap();
        prop_assert_eq!(back, e);
    }
}
