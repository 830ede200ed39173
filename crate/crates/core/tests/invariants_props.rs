use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;

use drinfeld::invariants::{
    bezout_coefficients, enumerate_basic_j_indices, fi_product, fine_invariant, iso_test,
    iso_test_bruteforce, j_invariant, shift_bezout, JIndex,
};
use drinfeld::skew::DrinfeldModule;
use drinfeld::{FFElem, FieldSpec};

fn f9() -> (Arc<FieldSpec>, Arc<FieldSpec>) {
    let f = FieldSpec::prime(3).unwrap();
    let l = f.extend(&[f.one(), f.zero(), f.one()]).unwrap();
    (f, l)
}

fn f25() -> (Arc<FieldSpec>, Arc<FieldSpec>) {
    let f = FieldSpec::prime(5).unwrap();
    let l = f.extend(&[f.from_int(2), f.from_int(4), f.one()]).unwrap();
    (f, l)
}

fn fields(which: bool) -> (Arc<FieldSpec>, Arc<FieldSpec>) {
    if which {
        f25()
    } else {
        f9()
    }
}

/// Coefficients g_1..g_r from raw indices; roughly a third of the lower ones vanish.
fn build(fq: &Arc<FieldSpec>, l: &Arc<FieldSpec>, gamma: u64, raw: &[u64]) -> DrinfeldModule {
    let n = l.order();
    let r = raw.len();
    let g: Vec<FFElem> = raw
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if i + 1 == r {
                l.from_index(1 + x % (n - 1))
            } else if x % 3 == 0 {
                FFElem::ZERO
            } else {
                l.from_index(x % n)
            }
        })
        .collect();
    DrinfeldModule::new(fq.clone(), l.clone(), l.from_index(gamma % n), g).unwrap()
}

fn nonzero(l: &Arc<FieldSpec>, x: u64) -> FFElem {
    l.from_index(1 + x % (l.order() - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn iso_test_matches_bruteforce(
        big in any::<bool>(),
        r in 2usize..=4,
        raw in prop::collection::vec(any::<u64>(), 4),
        gamma in any::<u64>(),
        x in any::<u64>(),
        mode in 0u8..3,
        pos in 0usize..4,
        y in any::<u64>(),
    ) {
        let (fq, l) = fields(big);
        let phi = build(&fq, &l, gamma, &raw[..r]);
        let twisted = phi.twist(nonzero(&l, x));
        let psi = match mode {
            0 => twisted,
            1 => {
                let mut g = twisted.coefficients().to_vec();
                let i = pos % r;
                g[i] = if i + 1 == r { nonzero(&l, y) } else { l.from_index(y % l.order()) };
                DrinfeldModule::new(fq.clone(), l.clone(), phi.gamma_t(), g).unwrap()
            }
            _ => build(&fq, &l, gamma, &[y, y / 7, y / 49, y / 343][..r]),
        };
        prop_assert_eq!(iso_test(&phi, &psi).unwrap(), iso_test_bruteforce(&phi, &psi).unwrap());
        if mode == 0 {
            prop_assert!(iso_test(&phi, &psi).unwrap());
        }
    }

    #[test]
    fn j_invariants_are_twist_invariant(
        big in any::<bool>(),
        r in 2usize..=3,
        raw in prop::collection::vec(any::<u64>(), 3),
        x in any::<u64>(),
    ) {
        let (fq, l) = fields(big);
        let phi = build(&fq, &l, 0, &raw[..r]);
        let psi = phi.twist(nonzero(&l, x));
        for idx in enumerate_basic_j_indices(r, fq.order()) {
            prop_assert_eq!(j_invariant(&phi, &idx), j_invariant(&psi, &idx));
        }
        prop_assert_eq!(fine_invariant(&phi).unwrap().class, fine_invariant(&psi).unwrap().class);
    }
}

/// Twenty elements of B for the module's support, including the Euclid choice.
fn lambda_family(phi: &DrinfeldModule) -> (Vec<usize>, u128, Vec<Vec<i128>>) {
    let support: Vec<usize> = (1..=phi.rank()).filter(|&k| !phi.g(k).is_zero()).collect();
    let b = bezout_coefficients(&support, phi.q()).unwrap();
    let mut out = vec![b.lambda.clone()];
    if support.len() > 1 {
        let mut t = 1i128;
        while out.len() < 20 {
            for a in 0..support.len() {
                for c in a + 1..support.len() {
                    if out.len() < 20 {
                        out.push(shift_bezout(
                            &b,
                            phi.q(),
                            a,
                            c,
                            if t % 2 == 0 { t / 2 } else { -(t + 1) / 2 },
                        ));
                    }
                }
            }
            t += 1;
        }
    }
    for l in &out {
        let s: i128 = support
            .iter()
            .zip(l)
            .map(|(&k, &e)| e * ((phi.q() as i128).pow(k as u32) - 1))
            .sum();
        assert_eq!(s as u128, b.d);
    }
    (support, b.d, out)
}

/// Among modules with the same J-invariants and support, whether two are
/// identified by FI_λ does not depend on λ, and matches the twist search.
#[test]
fn classification_is_independent_of_lambda() {
    for (big, r) in [(false, 2), (false, 3), (true, 2)] {
        let (fq, l) = fields(big);
        let idx = enumerate_basic_j_indices(r, fq.order());
        let n = l.order();
        let mut groups: BTreeMap<(Vec<FFElem>, Vec<bool>), Vec<DrinfeldModule>> = BTreeMap::new();
        let count = n.pow(r as u32 - 1) * (n - 1);
        let stride = if count > 3000 { count / 3000 } else { 1 };
        for code in (0..count).step_by(stride as usize) {
            let mut c = code;
            let mut g = Vec::new();
            for _ in 0..r - 1 {
                g.push(l.from_index(c % n));
                c /= n;
            }
            g.push(l.from_index(1 + c));
            let phi = DrinfeldModule::new(fq.clone(), l.clone(), FFElem::ZERO, g).unwrap();
            let key = (
                idx.iter().map(|i| j_invariant(&phi, i)).collect(),
                phi.coefficients().iter().map(|x| x.is_zero()).collect(),
            );
            groups.entry(key).or_default().push(phi);
        }
        let mut compared = 0;
        for members in groups.values() {
            let base = &members[0];
            let (support, d, family) = lambda_family(base);
            let e = gcd_u128(d, (n - 1) as u128) as u64;
            for other in members {
                let truth = iso_test_bruteforce(base, other).unwrap();
                for lam in &family {
                    let a = fi_product(base, &support, lam).unwrap();
                    let b = fi_product(other, &support, lam).unwrap();
                    assert_eq!(
                        l.same_coset(a, b, e).unwrap(),
                        truth,
                        "{:?} {:?} {lam:?}",
                        base,
                        other
                    );
                }
                compared += 1;
            }
        }
        assert!(compared >= 72);
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// For a single module, FI_λ values for different λ are related by J-invariants
/// and need not share a coset.
#[test]
fn fi_value_of_one_module_depends_on_lambda() {
    let (fq, l) = f9();
    let q = fq.order() as i128;
    let j = JIndex {
        k: vec![1],
        delta: vec![fq.order() + 1],
        delta_r: 1,
    };
    let mut differs = 0;
    for a in l.elements().filter(|x| !x.is_zero()) {
        for b in l.elements().filter(|x| !x.is_zero()) {
            let phi = DrinfeldModule::new(fq.clone(), l.clone(), FFElem::ZERO, vec![a, b]).unwrap();
            let fi = fine_invariant(&phi).unwrap();
            assert_eq!((fi.d, fi.lambda.clone()), (2, vec![1, 0]));
            let textbook = fi_product(&phi, &[1, 2], &[-q, 1]).unwrap();
            let via_j = l.div(fi.value, j_invariant(&phi, &j)).unwrap();
            assert!(l.same_coset(textbook, via_j, 2).unwrap());
            differs += !l.same_coset(textbook, fi.value, 2).unwrap() as usize;
        }
    }
    assert!(differs > 0);
}

#[test]
fn rank_two_without_g1_uses_g2() {
    for big in [false, true] {
        let (fq, l) = fields(big);
        let q2 = fq.order() * fq.order() - 1;
        for b in l.elements().filter(|x| !x.is_zero()) {
            let phi =
                DrinfeldModule::new(fq.clone(), l.clone(), FFElem::ZERO, vec![FFElem::ZERO, b])
                    .unwrap();
            let fi = fine_invariant(&phi).unwrap();
            assert_eq!(fi.d, q2 as u128);
            assert_eq!(fi.value, b);
        }
    }
}

#[test]
fn rank_three_case_analysis() {
    let (fq, l) = f25();
    for (a, b) in l
        .elements()
        .zip(l.elements().skip(3))
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .take(10)
    {
        let phi = DrinfeldModule::new(
            fq.clone(),
            l.clone(),
            FFElem::ZERO,
            vec![FFElem::ZERO, a, b],
        )
        .unwrap();
        let fi = fine_invariant(&phi).unwrap();
        assert_eq!(fi.d, 4);
        assert_eq!(fi.value, l.div(b, l.pow(a, 5)).unwrap());
        let phi = DrinfeldModule::new(
            fq.clone(),
            l.clone(),
            FFElem::ZERO,
            vec![FFElem::ZERO, FFElem::ZERO, b],
        )
        .unwrap();
        let fi = fine_invariant(&phi).unwrap();
        assert_eq!((fi.d, fi.value), (124, b));
    }
}

/// The published rank-3, q = 5 list plus the one index it omits.
#[test]
fn rank_three_q5_indices() {
    let listed: [(u64, u64); 19] = [
        (31, 0),
        (1, 5),
        (7, 4),
        (8, 9),
        (9, 14),
        (10, 19),
        (11, 24),
        (12, 29),
        (13, 3),
        (15, 13),
        (17, 23),
        (19, 2),
        (20, 7),
        (22, 17),
        (23, 22),
        (25, 1),
        (27, 11),
        (29, 21),
        (31, 31),
    ];
    let got: BTreeSet<(u64, u64)> = enumerate_basic_j_indices(3, 5)
        .iter()
        .map(|i| (i.delta[0], i.delta[1]))
        .collect();
    let listed: BTreeSet<(u64, u64)> = listed.into_iter().collect();
    assert!(listed.is_subset(&got));
    let extra: Vec<_> = got.difference(&listed).collect();
    assert_eq!(extra, vec![&(0, 31)]);
    let idx = enumerate_basic_j_indices(3, 5)
        .into_iter()
        .find(|i| i.delta == [0, 31])
        .unwrap();
    assert_eq!(idx.delta_r, 6);
}
