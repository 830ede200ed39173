use std::sync::Arc;

use drinfeld::base_ring::{Place, ResidueField};
use drinfeld::charpoly::{disc_monic, CharPoly};
use drinfeld::local::{factor_local, pairwise_unit_resultants, LocalError};
use drinfeld::{FFElem, FieldSpec, Poly};
use proptest::prelude::*;

fn apoly(f: &Arc<FieldSpec>, c: &[i64]) -> Poly {
    Poly::new(f.clone(), c.iter().map(|&x| f.from_int(x)).collect())
}

fn monic(f: &Arc<FieldSpec>, lower: &[Vec<i64>]) -> CharPoly {
    let mut c: Vec<Poly> = lower.iter().map(|x| apoly(f, x)).collect();
    c.push(Poly::one(f));
    CharPoly::new(c).unwrap()
}

/// M evaluated at a t-adic integer given by digits, reduced mod t^n (place T).
fn eval_mod(f: &FieldSpec, m: &CharPoly, x: &[FFElem], n: usize) -> Vec<FFElem> {
    let mul = |a: &[FFElem], b: &[FFElem]| {
        let mut out = vec![FFElem::ZERO; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
            }
        }
        out
    };
    let mut acc = vec![FFElem::ZERO; n];
    for c in m.coeffs().iter().rev() {
        acc = mul(&acc, x);
        for (i, &d) in c.coeffs().iter().enumerate().take(n) {
            acc[i] = f.add(acc[i], d);
        }
    }
    acc
}

/// Number of roots of M in F_q[[T]], by a digit tree search that keeps a class
/// mod T^k only while M vanishes on it mod T^k, then clusters survivors.
fn count_integral_roots(f: &Arc<FieldSpec>, m: &CharPoly, depth: usize) -> usize {
    let mut level: Vec<Vec<FFElem>> = vec![vec![]];
    for k in 1..=depth {
        let mut next = Vec::new();
        for pre in &level {
            for c in f.elements() {
                let mut x = pre.clone();
                x.push(c);
                let mut full = x.clone();
                full.resize(depth, FFElem::ZERO);
                if eval_mod(f, m, &full, k).iter().all(|d| d.is_zero()) {
                    next.push(x);
                }
            }
        }
        level = next;
    }
    let cut = depth.div_ceil(3);
    let mut heads: Vec<Vec<FFElem>> = level.iter().map(|x| x[..cut].to_vec()).collect();
    heads.sort();
    heads.dedup();
    heads.len()
}

fn valuation_at_t(p: &Poly) -> usize {
    p.coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .unwrap_or(usize::MAX)
}

fn series_mul(f: &FieldSpec, a: &[FFElem], b: &[FFElem]) -> Vec<FFElem> {
    let n = a.len();
    let mut out = vec![FFElem::ZERO; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
        }
    }
    out
}

fn horner(big: &FieldSpec, fq: &FieldSpec, p: &Poly, x: &[FFElem]) -> Vec<FFElem> {
    let mut acc = vec![FFElem::ZERO; x.len()];
    for &c in p.coeffs().iter().rev() {
        acc = series_mul(big, &acc, x);
        acc[0] = big.add(acc[0], big.embed(fq, c));
    }
    acc
}

/// Digits of each coefficient of M in the local parameter t. At a finite place of
/// degree > 1, T = X(t) with p_v(X) = t, found one digit at a time by search.
fn expected_digits(
    fq: &Arc<FieldSpec>,
    m: &CharPoly,
    place: &Place,
    big: &Arc<FieldSpec>,
    n: usize,
) -> Vec<Vec<FFElem>> {
    let plain = |c: &Poly| {
        let mut d: Vec<FFElem> = c.coeffs().iter().map(|&x| big.embed(fq, x)).collect();
        d.resize(n.max(d.len()), FFElem::ZERO);
        d.truncate(n);
        d
    };
    let pv = match place {
        Place::Finite(pv) if pv.deg() > 1 => pv,
        Place::Finite(pv) => {
            let mut x = vec![FFElem::ZERO; n];
            x[0] = fq.neg(pv.coeff(0));
            if n > 1 {
                x[1] = fq.one();
            }
            return m.coeffs().iter().map(|c| horner(big, fq, c, &x)).collect();
        }
        Place::Infinity => return m.coeffs().iter().map(plain).collect(),
    };
    let mut target = vec![FFElem::ZERO; n];
    if n > 1 {
        target[1] = big.one();
    }
    let mut x = vec![FFElem::ZERO; n];
    x[0] = ResidueField::new(pv).t_image();
    for k in 1..n {
        let d = big
            .elements()
            .find(|&d| {
                let mut y = x.clone();
                y[k] = d;
                horner(big, fq, pv, &y)[..=k] == target[..=k]
            })
            .unwrap();
        x[k] = d;
    }
    m.coeffs().iter().map(|c| horner(big, fq, c, &x)).collect()
}

fn quadratic_place(f: &Arc<FieldSpec>) -> Place {
    (1..f.order() as i64)
        .find_map(|c| {
            Place::finite(apoly(f, &[c, 1, 1]))
                .ok()
                .or_else(|| Place::finite(apoly(f, &[c, 0, 1])).ok())
        })
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factors_reassemble_to_m(
        q in prop::sample::select(vec![2u64, 3, 5, 7]),
        raw in prop::collection::vec(prop::collection::vec(-3i64..4, 0..4), 2..5),
        which in 0usize..3,
    ) {
        let f = FieldSpec::prime(q).unwrap();
        let m = monic(&f, &raw);
        prop_assume!(!disc_monic(&m).is_zero());
        let place = match which {
            0 => Place::finite(apoly(&f, &[0, 1])).unwrap(),
            1 => Place::Infinity,
            _ => quadratic_place(&f),
        };
        let prec = 5;
        match factor_local(&m, &place, prec) {
            Err(LocalError::WildRamification(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
            Ok(fac) => {
                prop_assert_eq!(fac.degree_sum(), m.degree());
                let want = expected_digits(&f, &m, &place, &fac.field, prec);
                prop_assert_eq!(fac.reassemble(), want);
                for x in &fac.factors {
                    let k = x.degree() / x.residual.deg();
                    prop_assert_eq!(x.residue(&fac.field), x.residual.pow(k as u64));
                    prop_assert_eq!(x.f % x.residual.deg(), 0);
                }
            }
        }
    }

    #[test]
    fn cubic_root_count_matches_oracle(
        raw in prop::collection::vec(prop::collection::vec(-2i64..3, 0..3), 3..4),
    ) {
        let f = FieldSpec::prime(5).unwrap();
        let m = monic(&f, &raw);
        let d = disc_monic(&m);
        prop_assume!(!d.is_zero());
        let v = valuation_at_t(&d);
        prop_assume!(v <= 3);
        let fac = factor_local(&m, &Place::finite(apoly(&f, &[0, 1])).unwrap(), 4).unwrap();
        let linear = fac.factors.iter().filter(|x| x.degree() == 1).count();
        prop_assert_eq!(linear, count_integral_roots(&f, &m, 3 * v + 1));
        let rs: Vec<Poly> = fac.factors.iter().map(|x| x.residual.clone()).collect();
        let distinct = (0..rs.len()).all(|i| (i + 1..rs.len()).all(|j| rs[i] != rs[j]));
        prop_assert_eq!(pairwise_unit_resultants(&fac), distinct);
    }
}

#[test]
fn degree_two_place_reassembles() {
    let f = FieldSpec::prime(3).unwrap();
    let place = Place::finite(apoly(&f, &[1, 0, 1])).unwrap();
    let m = monic(&f, &[vec![1, 0, 1, 1], vec![0, 1], vec![2]]);
    let fac = factor_local(&m, &place, 4).unwrap();
    assert_eq!(fac.degree_sum(), 3);
    assert_eq!(fac.field.order(), 9);
}
