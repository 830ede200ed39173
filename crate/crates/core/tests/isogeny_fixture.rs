use std::collections::BTreeSet;
use std::sync::Arc;

use drinfeld::base_ring::parse_apoly;
use drinfeld::charpoly::CharPoly;
use drinfeld::context::ClassContext;
use drinfeld::invariants::{
    enumerate_basic_j_indices, fine_invariant, group_classes, iso_test, iso_test_bruteforce,
    stabilizer_size,
};
use drinfeld::skew::{
    char_equation_residual, solve_isogeny_class, solve_unchecked, DrinfeldModule, SkewError,
};
use drinfeld::{FFElem, FieldSpec};

/// The eight L-isomorphism classes of M = x^3 + 3x^2 + (1+T)x + T^2 over F_25,
/// written as (g_1, g_2, g_3) with "a" for α, α^2 + 4α + 2 = 0.
const CLASSES: [[&str; 6]; 8] = [
    [
        "a+3,2,4a+4",
        "2,2,4a+2",
        "4a+4,2,3",
        "4a+2,2,a+1",
        "3,2,a+3",
        "a+1,2,2",
    ],
    [
        "a+3,2,3",
        "2,2,a+1",
        "4a+4,2,a+3",
        "4a+2,2,2",
        "3,2,4a+4",
        "a+1,2,4a+2",
    ],
    [
        "a+3,2a+1,a+3",
        "2,2a+1,2",
        "4a+4,2a+1,4a+4",
        "4a+2,2a+1,4a+2",
        "3,2a+1,3",
        "a+1,2a+1,a+1",
    ],
    [
        "a+3,4a,2",
        "2,4a,4a+4",
        "4a+4,4a,4a+2",
        "4a+2,4a,3",
        "3,4a,a+1",
        "a+1,4a,a+3",
    ],
    [
        "a+3,4a,a+1",
        "2,4a,a+3",
        "4a+4,4a,2",
        "4a+2,4a,4a+4",
        "3,4a,4a+2",
        "a+1,4a,3",
    ],
    [
        "a+3,3a+3,a+3",
        "2,3a+3,2",
        "4a+4,3a+3,4a+4",
        "4a+2,3a+3,4a+2",
        "3,3a+3,3",
        "a+1,3a+3,a+1",
    ],
    [
        "a+3,a+4,2",
        "2,a+4,4a+4",
        "4a+4,a+4,4a+2",
        "4a+2,a+4,3",
        "3,a+4,a+1",
        "a+1,a+4,a+3",
    ],
    [
        "a+3,a+4,a+1",
        "2,a+4,a+3",
        "4a+4,a+4,2",
        "4a+2,a+4,4a+4",
        "3,a+4,4a+2",
        "a+1,a+4,3",
    ],
];

fn fixture() -> (ClassContext, CharPoly) {
    let f = FieldSpec::prime(5).unwrap();
    let l = f.extend(&[f.from_int(2), f.from_int(4), f.one()]).unwrap();
    let t = parse_apoly(&f, "T", 'T').unwrap();
    let ctx = ClassContext::new(f.clone(), t, 2, l, FFElem::ZERO, 3).unwrap();
    let m = CharPoly::new(
        ["T^2", "1+T", "3", "1"]
            .iter()
            .map(|s| parse_apoly(&f, s, 'T').unwrap())
            .collect(),
    )
    .unwrap();
    (ctx, m)
}

/// "b a + c" or "c" with b, c in F_5.
fn elem(l: &Arc<FieldSpec>, s: &str) -> FFElem {
    let alpha = l.generator_of_top_level();
    let (b, c) = match s.split_once('a') {
        Some((b, rest)) => {
            let b = if b.is_empty() { 1 } else { b.parse().unwrap() };
            let c = rest.strip_prefix('+').map_or(0, |c| c.parse().unwrap());
            (b, c)
        }
        None => (0, s.parse().unwrap()),
    };
    l.add(l.mul(l.from_int(b), alpha), l.from_int(c))
}

fn module(ctx: &ClassContext, row: &str) -> DrinfeldModule {
    let g = row.split(',').map(|s| elem(&ctx.l, s)).collect();
    DrinfeldModule::new(ctx.fq.clone(), ctx.l.clone(), ctx.gamma_t, g).unwrap()
}

fn table(ctx: &ClassContext) -> Vec<Vec<DrinfeldModule>> {
    CLASSES
        .iter()
        .map(|c| c.iter().map(|row| module(ctx, row)).collect())
        .collect()
}

#[test]
fn every_tabulated_module_satisfies_m() {
    let (ctx, m) = fixture();
    for phi in table(&ctx).iter().flatten() {
        assert!(
            char_equation_residual(phi, &m, &ctx).is_zero(),
            "{:?}",
            phi.coefficients()
        );
    }
}

#[test]
fn solver_finds_exactly_the_table() {
    let (ctx, m) = fixture();
    let found = solve_isogeny_class(&m, &ctx).unwrap();
    assert_eq!(found.len(), 48);
    let got: BTreeSet<Vec<FFElem>> = found.iter().map(|p| p.coefficients().to_vec()).collect();
    let want: BTreeSet<Vec<FFElem>> = table(&ctx)
        .iter()
        .flatten()
        .map(|p| p.coefficients().to_vec())
        .collect();
    assert_eq!(got, want);
    let mut sorted = found.clone();
    sorted.sort_by(|a, b| a.coefficients().cmp(b.coefficients()));
    assert_eq!(sorted, found);
}

#[test]
fn tabulated_classes_are_twist_orbits() {
    let (ctx, _) = fixture();
    for class in table(&ctx) {
        let orbit: BTreeSet<Vec<FFElem>> = ctx
            .l
            .elements()
            .filter(|x| !x.is_zero())
            .map(|x| class[0].twist(x).coefficients().to_vec())
            .collect();
        let members: BTreeSet<Vec<FFElem>> =
            class.iter().map(|p| p.coefficients().to_vec()).collect();
        assert_eq!(orbit, members);
    }
}

#[test]
fn non_weil_input_is_rejected() {
    let (ctx, _) = fixture();
    let f = &ctx.fq;
    let m = CharPoly::new(
        ["T", "0", "0", "1"]
            .iter()
            .map(|s| parse_apoly(f, s, 'T').unwrap())
            .collect(),
    )
    .unwrap();
    assert_eq!(
        solve_isogeny_class(&m, &ctx),
        Err(SkewError::NotAWeilPolynomial)
    );
    assert!(solve_unchecked(&m, &ctx).is_empty());
}

fn coeff_set(class: &[DrinfeldModule]) -> BTreeSet<Vec<FFElem>> {
    class.iter().map(|p| p.coefficients().to_vec()).collect()
}

#[test]
fn classification_matches_the_table() {
    let (ctx, m) = fixture();
    let found = solve_isogeny_class(&m, &ctx).unwrap();
    let classes = group_classes(&found).unwrap();
    assert_eq!(classes.len(), 8);
    let got: BTreeSet<BTreeSet<Vec<FFElem>>> = classes.iter().map(|c| coeff_set(c)).collect();
    let want: BTreeSet<BTreeSet<Vec<FFElem>>> = table(&ctx).iter().map(|c| coeff_set(c)).collect();
    assert_eq!(got, want);
    for w in classes.windows(2) {
        assert!(w[0][0].coefficients() < w[1][0].coefficients());
    }
}

#[test]
fn orbit_times_stabilizer_is_l_star() {
    let (ctx, _) = fixture();
    for class in table(&ctx) {
        let fi = fine_invariant(&class[0]).unwrap();
        assert_eq!(stabilizer_size(&fi, 25), 4);
        assert_eq!(class.len() as u64 * stabilizer_size(&fi, 25), 24);
    }
}

#[test]
fn iso_test_agrees_with_bruteforce_on_all_pairs() {
    let (ctx, _) = fixture();
    let all: Vec<DrinfeldModule> = table(&ctx).into_iter().flatten().collect();
    let mut iso = 0;
    for a in &all {
        for b in &all {
            let fast = iso_test(a, b).unwrap();
            assert_eq!(fast, iso_test_bruteforce(a, b).unwrap());
            iso += fast as usize;
        }
    }
    assert_eq!(iso, 8 * 36);
}

#[test]
fn distinct_tabulated_classes_are_not_isomorphic() {
    let (ctx, _) = fixture();
    let a = module(&ctx, "a+3,2,4a+4");
    let b = module(&ctx, "a+3,2,3");
    assert!(!iso_test(&a, &b).unwrap());
}

#[test]
fn fixture_fine_invariant_is_g1_mod_fourth_powers() {
    let (ctx, _) = fixture();
    let l = &ctx.l;
    for phi in table(&ctx).iter().flatten() {
        let fi = fine_invariant(phi).unwrap();
        assert_eq!((fi.d, fi.lambda.clone()), (4, vec![1, 0, 0]));
        assert_eq!(fi.value, phi.g(1));
        assert_eq!(fi.class, l.coset_class(phi.g(1), 4).unwrap());
    }
    assert_eq!(enumerate_basic_j_indices(3, 5).len(), 20);
}
