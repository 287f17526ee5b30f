use crucispec::geometry::{CrossSectionProfile, Sector};
use crucispec::waveguide3d::{analyze, WaveguideOptions};

#[test]
fn odd_z_eigenvalues_belong_to_the_full_spectrum() {
    let p = CrossSectionProfile::rhombus(1.0).unwrap();
    let opts = WaveguideOptions { coarse_check: false, ..WaveguideOptions::new(2.0, 1.0 / 6.0, 1.0 / 6.0) };
    let all = analyze(&p, &opts, None).unwrap();
    let full: Vec<f64> = all.sectors.iter().flat_map(|s| s.solution.slice.eigenvalues.clone()).collect();
    let odd: Vec<(Sector, usize)> = Sector::partition_3d()
        .into_iter()
        .filter(|(s, _)| s.to_string().ends_with("odd_z"))
        .collect();
    assert!(!odd.is_empty());
    let part = analyze(&p, &opts, Some(odd)).unwrap();
    for s in &part.sectors {
        for v in &s.solution.slice.eigenvalues {
            assert!(full.iter().any(|w| (v - w).abs() <= 1e-9 * w), "{v} missing");
        }
    }
}

#[test]
fn longer_arms_do_not_lose_bound_states() {
    let p = CrossSectionProfile::ellipse(1.0).unwrap();
    let mut last = 0;
    for l in [2.0, 3.0, 4.0] {
        let r = analyze(&p, &WaveguideOptions::new(l, 1.0 / 8.0, 1.0 / 8.0), None).unwrap();
        assert!(r.total_count >= last, "L={l}: {} < {last}", r.total_count);
        assert!(r.merged_eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        last = r.total_count;
    }
    assert!(last >= 1);
}
