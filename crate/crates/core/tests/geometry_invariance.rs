use opshape_core::geometry::{
    directions_from_homogeneous, frame_scalars, lift, oriented_frame_homography, HomogeneousPoint,
};
use opshape_core::linalg::Matrix;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-2.0..2.0f64, -2.0..2.0f64]
}

fn well_conditioned_frame(pts: &[[f64; 2]]) -> bool {
    // every triple comfortably non-collinear
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                let u = [pts[b][0] - pts[a][0], pts[b][1] - pts[a][1]];
                let v = [pts[c][0] - pts[a][0], pts[c][1] - pts[a][1]];
                if (u[0] * v[1] - u[1] * v[0]).abs() < 0.05 {
                    return false;
                }
            }
        }
    }
    true
}

fn positive_matrix() -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-1.0..1.0f64, 9)
        .prop_map(|v| {
            let mut m = Matrix::from_rows(&[v[0..3].to_vec(), v[3..6].to_vec(), v[6..9].to_vec()]);
            if m.determinant() < 0.0 {
                for j in 0..3 {
                    m[(0, j)] = -m[(0, j)];
                }
            }
            m
        })
        .prop_filter("well conditioned", |m| m.determinant() > 0.1)
}

fn lifted(pts: &[[f64; 2]]) -> Vec<HomogeneousPoint> {
    pts.iter().map(|p| lift(p).unwrap()).collect()
}

const FRAME_ORDER: [usize; 4] = [0, 1, 3, 2];

fn split(reps: &[HomogeneousPoint]) -> (Vec<HomogeneousPoint>, Vec<HomogeneousPoint>) {
    (FRAME_ORDER.iter().map(|&i| reps[i].clone()).collect(), reps[4..].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn opgl_invariance(pts in proptest::collection::vec(point(), 6), p in positive_matrix()) {
        prop_assume!(well_conditioned_frame(&pts));
        let reps = lifted(&pts);
        let moved: Vec<_> = reps.iter().map(|r| r.transformed(&p).unwrap()).collect();
        let (f0, r0) = split(&reps);
        let (f1, r1) = split(&moved);
        let a = directions_from_homogeneous(&f0, &r0).unwrap();
        let b = directions_from_homogeneous(&f1, &r1).unwrap();
        for (u, v) in a.directions.iter().zip(&b.directions) {
            for (x, y) in u.iter().zip(v) {
                prop_assert!((x - y).abs() < 1e-9, "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn positive_rescaling_changes_nothing(pts in proptest::collection::vec(point(), 5), which in 0usize..5, s in 0.01..100.0f64) {
        prop_assume!(well_conditioned_frame(&pts));
        let reps = lifted(&pts);
        let mut scaled = reps.clone();
        scaled[which] = reps[which].scaled(s).unwrap();
        let (f0, r0) = split(&reps);
        let (f1, r1) = split(&scaled);
        let a = directions_from_homogeneous(&f0, &r0).unwrap();
        let b = directions_from_homogeneous(&f1, &r1).unwrap();
        for (x, y) in a.directions[0].iter().zip(&b.directions[0]) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_postconditions(pts in proptest::collection::vec(point(), 4)) {
        prop_assume!(well_conditioned_frame(&pts));
        let (frame, _) = split(&{ let mut r = lifted(&pts); r.push(r[0].clone()); r });
        let chart = oriented_frame_homography(&frame).unwrap();
        let fs = frame_scalars(&frame).unwrap();
        prop_assert!(chart.homography.determinant() > 0.0);
        prop_assert!(chart.frame_scalars.iter().all(|l| *l > 0.0));
        let sign = if chart.det_sign_flipped { -1.0 } else { 1.0 };
        for j in 0..3 {
            let col = fs.adjusted.column(j);
            let img = chart.homography.mul_vec(&col);
            let scale = img.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(sign * img[j] > 0.0);
            for i in (0..3).filter(|&i| i != j) {
                prop_assert!(img[i].abs() <= 1e-12 * scale);
            }
        }
        if !chart.det_sign_flipped {
            let u = chart.oriented_coordinate(&frame[3]).unwrap();
            let s = 1.0 / 3f64.sqrt();
            prop_assert!(u.iter().all(|x| (x - s).abs() < 1e-12));
        } else {
            let u = chart.oriented_coordinate(&frame[3]).unwrap();
            let s = -1.0 / 3f64.sqrt();
            prop_assert!(u.iter().all(|x| (x - s).abs() < 1e-12));
        }
    }

    #[test]
    fn axial_is_plus_or_minus_oriented(pts in proptest::collection::vec(point(), 5)) {
        prop_assume!(well_conditioned_frame(&pts));
        let reps = lifted(&pts);
        let (frame, rest) = split(&reps);
        let chart = oriented_frame_homography(&frame).unwrap();
        let o = chart.oriented_coordinate(&rest[0]).unwrap();
        let a = chart.axial_coordinate(&rest[0]).unwrap();
        let same = o.iter().zip(&a).all(|(x, y)| x == y);
        let opposite = o.iter().zip(&a).all(|(x, y)| *x == -*y);
        prop_assert!(same || opposite);
    }
}
