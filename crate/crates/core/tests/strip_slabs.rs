use cobordia::alpha::strip_slab_interiors;
use cobordia::fixtures;
use cobordia::oracle::cok_phi_dims;
use proptest::prelude::*;

fn final_cok(c: &cobordia::complex::FilteredComplex, degree: usize) -> usize {
    cok_phi_dims(c, c.len() - 1).get(degree).copied().unwrap_or(0)
}

#[test]
fn stripping_the_cap_restores_the_capped_cylinder_tunnel() {
    let capped = fixtures::cylinder_with_top_triangle();
    assert_eq!(final_cok(&capped, 1), 0);
    let (stripped, kept) = strip_slab_interiors(&capped, 2).unwrap();
    assert_eq!(kept.len(), capped.len() - 1);
    assert_eq!(final_cok(&stripped, 1), 1);
}

#[test]
fn stripping_an_unlabeled_complex_changes_nothing() {
    let c = fixtures::cylinder_with_middle_triangle();
    let (stripped, _) = strip_slab_interiors(&c, 2).unwrap();
    assert_eq!(stripped.len(), c.len());
    assert_eq!(final_cok(&stripped, 1), final_cok(&c, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Removing slab k-cells only shrinks Ker ι^A + Ker ι^B at least as fast as Ker ι^{A∪B}.
    #[test]
    fn stripping_top_slab_cells_never_lowers_the_cokernel(seed in any::<u64>()) {
        let c = fixtures::random_complex(seed);
        let k = c.max_dim();
        prop_assume!(k >= 1);
        let (stripped, _) = strip_slab_interiors(&c, k).unwrap();
        for degree in 0..k {
            prop_assert!(final_cok(&stripped, degree) >= final_cok(&c, degree), "seed {seed} degree {degree}");
        }
    }
}
