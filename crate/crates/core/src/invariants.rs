//! J-invariants, fine isomorphy invariants, and L-isomorphism classes.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{gcd, FFElem, FieldError};
use crate::skew::DrinfeldModule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("the support of a fine invariant must be nonempty")]
    EmptySupport,
    #[error("all coefficients g_1..g_r vanish")]
    ZeroModule,
    #[error("modules have ranks {0} and {1}")]
    RankMismatch(usize, usize),
    #[error("modules live over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// J_{k}^{δ} = ∏ g_{k_i}^{δ_i} / g_r^{δ_r}. `k` is always (1, ..., r-1); a zero δ_i drops g_{k_i}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JIndex {
    pub k: Vec<usize>,
    pub delta: Vec<u64>,
    pub delta_r: u64,
}

impl fmt::Display for JIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "J_{{{}}}^{{{}}}",
            join(self.k.iter().map(|k| k.to_string()).collect()),
            join(self.delta.iter().map(|d| d.to_string()).collect())
        )
    }
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i128, 0i128, 0i128, 1i128);
    while r1 != 0 {
        let qt = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    (r0, s0, t0)
}

/// Upper bound on δ_i for the position holding k: (q^r - 1)/(q^gcd(k,r) - 1).
pub fn delta_bound(q: u64, r: usize, k: usize) -> u64 {
    let qr = (q as u128).pow(r as u32) - 1;
    let g = gcd(k as u64, r as u64) as u32;
    (qr / ((q as u128).pow(g) - 1)) as u64
}

struct JSearch {
    qr: i128,
    w: Vec<i128>,
    bounds: Vec<u64>,
}

impl JSearch {
    /// The last δ solves a linear congruence mod q^r - 1 given the others.
    fn run(&self, i: usize, acc: i128, delta: &mut Vec<u64>, out: &mut Vec<JIndex>) {
        let last = self.w.len() - 1;
        if i < last {
            for d in 0..=self.bounds[i] {
                delta[i] = d;
                self.run(i + 1, acc + d as i128 * self.w[i], delta, out);
            }
            return;
        }
        let (g, s, _) = xgcd(self.w[last], self.qr);
        let need = (-acc).rem_euclid(self.qr);
        if need % g != 0 {
            return;
        }
        let step = self.qr / g;
        let mut d = ((need / g) * s).rem_euclid(step);
        while d <= self.bounds[last] as i128 {
            delta[last] = d as u64;
            let delta_r = ((acc + d * self.w[last]) / self.qr) as u64;
            if delta.iter().fold(delta_r, |a, &b| gcd(a, b)) == 1 {
                out.push(JIndex {
                    k: (1..=delta.len()).collect(),
                    delta: delta.clone(),
                    delta_r,
                });
            }
            d += step;
        }
    }
}

/// All basic J-indices for rank r over F_q, ordered lexicographically by δ.
pub fn enumerate_basic_j_indices(r: usize, q: u64) -> Vec<JIndex> {
    assert!(r >= 2, "J-invariants need rank at least 2");
    let search = JSearch {
        qr: (q as i128).pow(r as u32) - 1,
        w: (1..r).map(|k| (q as i128).pow(k as u32) - 1).collect(),
        bounds: (1..r).map(|k| delta_bound(q, r, k)).collect(),
    };
    let mut out = Vec::new();
    search.run(0, 0, &mut vec![0u64; r - 1], &mut out);
    out.sort();
    out.dedup();
    out
}

/// The J-invariant of φ at `idx`, with 0^0 = 1.
pub fn j_invariant(phi: &DrinfeldModule, idx: &JIndex) -> FFElem {
    let l = phi.field();
    let r = phi.rank();
    let num = idx.k.iter().zip(&idx.delta).fold(l.one(), |acc, (&k, &d)| {
        l.mul(acc, l.pow(phi.g(k), d as u128))
    });
    let den = l.pow(phi.g(r), idx.delta_r as u128);
    l.div(num, den).expect("g_r is nonzero")
}

/// δ = gcd(I), d = q^δ - 1 and λ with Σ λ_k (q^k - 1) = d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bezout {
    pub support: Vec<usize>,
    pub delta: usize,
    pub d: u128,
    pub lambda: Vec<i128>,
}

/// Iterated extended Euclid over I in ascending order.
pub fn bezout_coefficients(support: &[usize], q: u64) -> Result<Bezout, InvariantError> {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    let (&first, rest) = support.split_first().ok_or(InvariantError::EmptySupport)?;
    let w = |k: usize| (q as i128).pow(k as u32) - 1;
    let mut g = w(first);
    let mut lambda = vec![1i128];
    for &k in rest {
        let (g2, s, t) = xgcd(g, w(k));
        for l in lambda.iter_mut() {
            *l *= s;
        }
        lambda.push(t);
        g = g2;
    }
    let delta = support.iter().fold(0u64, |a, &k| gcd(a, k as u64)) as usize;
    let d = (q as u128).pow(delta as u32) - 1;
    debug_assert_eq!(g as u128, d);
    Ok(Bezout {
        support,
        delta,
        d,
        lambda,
    })
}

/// Other elements of B: λ plus `t` times the relation (q^j - 1)/d·e_i - (q^i - 1)/d·e_j
/// for the pair at positions (a, c) of the support.
pub fn shift_bezout(b: &Bezout, q: u64, a: usize, c: usize, t: i128) -> Vec<i128> {
    let w = |k: usize| ((q as i128).pow(k as u32) - 1) / b.d as i128;
    let mut lambda = b.lambda.clone();
    lambda[a] += t * w(b.support[c]);
    lambda[c] -= t * w(b.support[a]);
    lambda
}

/// ∏ g_k^{λ_k} over the support.
pub fn fi_product(
    phi: &DrinfeldModule,
    support: &[usize],
    lambda: &[i128],
) -> Result<FFElem, InvariantError> {
    let l = phi.field();
    let mut acc = l.one();
    for (&k, &e) in support.iter().zip(lambda) {
        acc = l.mul(acc, l.pow_signed(phi.g(k), e)?);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FineInvariant {
    pub support: Vec<usize>,
    pub delta: usize,
    pub d: u128,
    pub lambda: Vec<i128>,
    pub value: FFElem,
    /// dlog(value) mod gcd(d, |L| - 1)
    pub class: u64,
}

pub fn fine_invariant(phi: &DrinfeldModule) -> Result<FineInvariant, InvariantError> {
    let support: Vec<usize> = (1..=phi.rank()).filter(|&k| !phi.g(k).is_zero()).collect();
    if support.is_empty() {
        return Err(InvariantError::ZeroModule);
    }
    let b = bezout_coefficients(&support, phi.q())?;
    let value = fi_product(phi, &b.support, &b.lambda)?;
    let l = phi.field();
    let class = l.coset_class(value, reduce_exponent(b.d, l.order()))?;
    Ok(FineInvariant {
        support: b.support,
        delta: b.delta,
        d: b.d,
        lambda: b.lambda,
        value,
        class,
    })
}

/// L*^d = L*^gcd(d, |L| - 1).
fn reduce_exponent(d: u128, order: u64) -> u64 {
    let n = (order - 1) as u128;
    let mut a = d % n;
    let mut b = n;
    while a != 0 {
        (a, b) = (b % a, a);
    }
    b as u64
}

/// Whether two fine invariants with the same support and d agree, by the
/// d-th power test on the ratio of values.
pub fn same_fine_class(
    phi: &DrinfeldModule,
    a: &FineInvariant,
    b: &FineInvariant,
) -> Result<bool, InvariantError> {
    if a.support != b.support || a.d != b.d {
        return Ok(false);
    }
    let l = phi.field();
    Ok(l.same_coset(a.value, b.value, reduce_exponent(a.d, l.order()))?)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantProfile {
    pub gamma_t: FFElem,
    pub j: Vec<(JIndex, FFElem)>,
    pub fi: FineInvariant,
}

impl InvariantProfile {
    /// Equality key: J values, support, d and coset class.
    pub fn key(&self) -> (FFElem, Vec<FFElem>, Vec<usize>, u128, u64) {
        (
            self.gamma_t,
            self.j.iter().map(|(_, v)| *v).collect(),
            self.fi.support.clone(),
            self.fi.d,
            self.fi.class,
        )
    }
}

pub fn profile(
    phi: &DrinfeldModule,
    indices: &[JIndex],
) -> Result<InvariantProfile, InvariantError> {
    Ok(InvariantProfile {
        gamma_t: phi.gamma_t(),
        j: indices
            .iter()
            .map(|i| (i.clone(), j_invariant(phi, i)))
            .collect(),
        fi: fine_invariant(phi)?,
    })
}

fn compatible(phi: &DrinfeldModule, psi: &DrinfeldModule) -> Result<(), InvariantError> {
    if phi.rank() != psi.rank() {
        return Err(InvariantError::RankMismatch(phi.rank(), psi.rank()));
    }
    if phi.field() != psi.field() || phi.q() != psi.q() {
        return Err(InvariantError::FieldMismatch);
    }
    Ok(())
}

/// L-isomorphism via J-invariants and the fine invariant.
pub fn iso_test(phi: &DrinfeldModule, psi: &DrinfeldModule) -> Result<bool, InvariantError> {
    compatible(phi, psi)?;
    if phi.gamma_t() != psi.gamma_t() {
        return Ok(false);
    }
    if phi.rank() >= 2 {
        for idx in enumerate_basic_j_indices(phi.rank(), phi.q()) {
            if j_invariant(phi, &idx) != j_invariant(psi, &idx) {
                return Ok(false);
            }
        }
    }
    let a = fine_invariant(phi)?;
    let b = fine_invariant(psi)?;
    same_fine_class(phi, &a, &b)
}

/// An x ∈ L* with ψ = x^{-1} φ x, by search over L*.
pub fn twist_witness(
    phi: &DrinfeldModule,
    psi: &DrinfeldModule,
) -> Result<Option<FFElem>, InvariantError> {
    compatible(phi, psi)?;
    if phi.gamma_t() != psi.gamma_t() {
        return Ok(None);
    }
    Ok(phi
        .field()
        .elements()
        .filter(|x| !x.is_zero())
        .find(|&x| phi.twist(x).coefficients() == psi.coefficients()))
}

pub fn iso_test_bruteforce(
    phi: &DrinfeldModule,
    psi: &DrinfeldModule,
) -> Result<bool, InvariantError> {
    Ok(twist_witness(phi, psi)?.is_some())
}

/// Partition by invariant profile. Classes are sorted internally by (g_1..g_r) and
/// ordered by their first member.
pub fn group_classes(
    modules: &[DrinfeldModule],
) -> Result<Vec<Vec<DrinfeldModule>>, InvariantError> {
    let Some(first) = modules.first() else {
        return Ok(Vec::new());
    };
    for m in modules {
        compatible(first, m)?;
    }
    let indices = if first.rank() >= 2 {
        enumerate_basic_j_indices(first.rank(), first.q())
    } else {
        Vec::new()
    };
    let keys = modules
        .par_iter()
        .map(|m| profile(m, &indices).map(|p| p.key()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut groups: BTreeMap<_, Vec<DrinfeldModule>> = BTreeMap::new();
    for (k, m) in keys.into_iter().zip(modules) {
        groups.entry(k).or_default().push(m.clone());
    }
    let mut classes: Vec<Vec<DrinfeldModule>> = groups
        .into_values()
        .map(|mut c| {
            c.sort_by(|a, b| a.coefficients().cmp(b.coefficients()));
            c.dedup();
            c
        })
        .collect();
    classes.sort_by(|a, b| a[0].coefficients().cmp(b[0].coefficients()));
    Ok(classes)
}

/// |{x ∈ L* : x^(q^k - 1) = 1 for k in I}| = gcd(d, |L| - 1).
pub fn stabilizer_size(fi: &FineInvariant, field_order: u64) -> u64 {
    reduce_exponent(fi.d, field_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bezout_examples() {
        assert_eq!(
            bezout_coefficients(&[1, 2, 3], 5).unwrap().lambda,
            vec![1, 0, 0]
        );
        let b = bezout_coefficients(&[2, 3], 5).unwrap();
        assert_eq!((b.d, b.lambda.clone()), (4, vec![-5, 1]));
        let b = bezout_coefficients(&[3], 5).unwrap();
        assert_eq!((b.d, b.lambda), (124, vec![1]));
        assert_eq!(
            bezout_coefficients(&[], 5),
            Err(InvariantError::EmptySupport)
        );
    }

    #[test]
    fn rank_two_has_one_index() {
        for q in [2, 3, 4, 5] {
            let idx = enumerate_basic_j_indices(2, q);
            assert_eq!(
                idx,
                vec![JIndex {
                    k: vec![1],
                    delta: vec![q + 1],
                    delta_r: 1
                }]
            );
        }
    }

    #[test]
    fn rank_three_indices_satisfy_conditions() {
        for idx in enumerate_basic_j_indices(3, 5) {
            let lhs = idx.delta[0] * 4 + idx.delta[1] * 24;
            assert_eq!(lhs, idx.delta_r * 124);
            assert!(idx.delta[0] <= 31 && idx.delta[1] <= 31);
        }
        let one_five = JIndex {
            k: vec![1, 2],
            delta: vec![1, 5],
            delta_r: 1,
        };
        assert!(enumerate_basic_j_indices(3, 5).contains(&one_five));
    }

    #[test]
    fn shifted_lambda_stays_in_b() {
        let b = bezout_coefficients(&[1, 2, 3], 5).unwrap();
        for t in -3..=3 {
            let l = shift_bezout(&b, 5, 0, 2, t);
            assert_eq!(l[0] * 4 + l[1] * 24 + l[2] * 124, 4);
        }
    }
}
