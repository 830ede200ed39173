//! Dense univariate polynomials over a finite field, with factorization.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{prime_factors, FFElem, FieldSpec};

/// Fixed seed for the random probes of equal-degree splitting.
const SPLIT_SEED: u64 = 0x5eed_f00d;

#[derive(Clone)]
pub struct Poly {
    field: Arc<FieldSpec>,
    coeffs: Vec<FFElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Ordering by degree, then coefficients from the constant term up.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

impl Poly {
    pub fn new(field: Arc<FieldSpec>, mut coeffs: Vec<FFElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Poly {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &Arc<FieldSpec>, c: FFElem) -> Poly {
        Self::new(field.clone(), vec![c])
    }

    /// The monomial c·x^k.
    pub fn monomial(field: &Arc<FieldSpec>, c: FFElem, k: usize) -> Poly {
        let mut v = vec![FFElem::ZERO; k + 1];
        v[k] = c;
        Self::new(field.clone(), v)
    }

    pub fn x(field: &Arc<FieldSpec>) -> Poly {
        Self::monomial(field, field.one(), 1)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FFElem> {
        self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FFElem {
        self.coeffs.get(i).copied().unwrap_or(FFElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with deg 0 = 0; callers that care about the zero polynomial use [`degree`](Self::degree).
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> FFElem {
        self.coeffs.last().copied().unwrap_or(FFElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == self.field.one()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lc()).unwrap();
        self.scale(inv)
    }

    pub fn scale(&self, c: FFElem) -> Poly {
        let f = &self.field;
        Poly::new(
            f.clone(),
            self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        )
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![FFElem::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(self.field.clone(), v)
    }

    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(
            self.field.clone(),
            self.coeffs.iter().take(n).copied().collect(),
        )
    }

    pub fn eval(&self, x: FFElem) -> FFElem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FFElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
            .collect();
        Poly::new(f.clone(), v)
    }

    /// f(x^k).
    pub fn inflate(&self, k: usize) -> Poly {
        let mut v = vec![FFElem::ZERO; self.deg() * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * k] = c;
        }
        Poly::new(self.field.clone(), v)
    }

    /// Applies a map to every coefficient, possibly landing in another field.
    pub fn map_coeffs(&self, target: &Arc<FieldSpec>, g: impl Fn(FFElem) -> FFElem) -> Poly {
        Poly::new(target.clone(), self.coeffs.iter().map(|&c| g(c)).collect())
    }

    /// Same polynomial over a field containing this one as a tower prefix.
    pub fn embed(&self, target: &Arc<FieldSpec>) -> Poly {
        let src = self.field.clone();
        self.map_coeffs(target, |c| target.embed(&src, c))
    }

    fn add_impl(&self, other: &Poly, negate: bool) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let b = other.coeff(i);
                f.add(self.coeff(i), if negate { f.neg(b) } else { b })
            })
            .collect();
        Poly::new(f.clone(), v)
    }

    fn mul_impl(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![FFElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f.clone(), v)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder. Panics on a zero divisor; see [`checked_div_rem`](Self::checked_div_rem).
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        self.checked_div_rem(d)
            .expect("polynomial division by zero")
    }

    pub fn checked_div_rem(&self, d: &Poly) -> Option<(Poly, Poly)> {
        let dd = d.degree()?;
        let f = &self.field;
        if self.coeffs.len() <= dd {
            return Some((Poly::zero(f), self.clone()));
        }
        let inv = f.inv(d.lc()).unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![FFElem::ZERO; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(r[i + dd], inv);
            q[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, b));
            }
        }
        r.truncate(dd);
        Some((Poly::new(f.clone(), q), Poly::new(f.clone(), r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, t) with s·self + t·other = g, g monic (or zero).
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.lc()).unwrap();
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).xgcd(m);
        g.is_one().then(|| s.rem(m))
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            e >>= 1;
        }
        acc
    }

    /// self^(Q^k) mod m for Q = |F|.
    fn frobenius_mod(&self, k: usize, m: &Poly) -> Poly {
        let q = self.field.order() as u128;
        (0..k).fold(self.rem(m), |acc, _| acc.pow_mod(q, m))
    }

    /// Resultant over the field via the Euclidean algorithm.
    pub fn resultant(&self, other: &Poly) -> FFElem {
        let f = &self.field;
        let (Some(mut da), Some(mut db)) = (self.degree(), other.degree()) else {
            return FFElem::ZERO;
        };
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut acc = f.one();
        loop {
            if db == 0 {
                return f.mul(acc, f.pow(b.lc(), da as u128));
            }
            let r = a.rem(&b);
            let Some(dr) = r.degree() else {
                return FFElem::ZERO;
            };
            if da % 2 == 1 && db % 2 == 1 {
                acc = f.neg(acc);
            }
            acc = f.mul(acc, f.pow(b.lc(), (da - dr) as u128));
            a = b;
            b = r;
            da = db;
            db = dr;
        }
    }

    /// Rabin's test.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let m = self.monic();
        let x = Poly::x(&self.field);
        if m.coeff(0).is_zero() {
            return false;
        }
        if x.frobenius_mod(d, &m) != x.rem(&m) {
            return false;
        }
        prime_factors(d as u64).into_iter().all(|r| {
            let h = &x.frobenius_mod(d / r as usize, &m) - &x;
            h.gcd(&m).is_one()
        })
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let e = (f.order() / f.characteristic()) as u128;
        let v = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&c| f.pow(c, e))
            .collect();
        Poly::new(f.clone(), v)
    }

    /// Squarefree decomposition of a nonzero polynomial: (lc, [(b_i, i)]) with
    /// self = lc·∏ b_i^i, b_i monic squarefree pairwise coprime and nonconstant.
    pub fn squarefree_decomposition(&self) -> (FFElem, Vec<(Poly, usize)>) {
        assert!(!self.is_zero(), "squarefree decomposition of zero");
        let lc = self.lc();
        let mut out = Vec::new();
        sqf_rec(&self.monic(), 1, &mut out);
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut merged: Vec<(Poly, usize)> = Vec::new();
        for (g, i) in out {
            match merged.last_mut() {
                Some((h, j)) if *j == i => *h = &*h * &g,
                _ => merged.push((g, i)),
            }
        }
        (lc, merged)
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(&self) -> Vec<(Poly, usize)> {
        let x = Poly::x(&self.field);
        let mut out = Vec::new();
        let mut f = self.clone();
        let mut h = x.clone();
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            h = h.frobenius_mod(1, &f);
            let g = (&h - &x).gcd(&f);
            if !g.is_one() {
                f = f.exact_div(&g);
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        if f.deg() > 0 {
            let d = f.deg();
            out.push((f, d));
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a monic squarefree product of degree-`d` irreducibles.
    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = self.deg();
        if n == d {
            out.push(self.clone());
            return;
        }
        let fld = &self.field;
        let q = fld.order() as u128;
        loop {
            let a = Poly::new(
                fld.clone(),
                (0..n)
                    .map(|_| fld.from_index(rng.gen_range(0..fld.order())))
                    .collect(),
            );
            if a.deg() == 0 {
                continue;
            }
            let b = if fld.characteristic() == 2 {
                // trace map a + a^2 + ... + a^(2^(kd-1))
                let k = fld.dim() * d;
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..k {
                    t = t.mul_mod(&t, self);
                    acc = &acc + &t;
                }
                acc
            } else {
                let e = (q.pow(d as u32) - 1) / 2;
                &a.pow_mod(e, self) - &Poly::one(fld)
            };
            let g = b.gcd(self);
            if g.deg() > 0 && g.deg() < n {
                g.equal_degree(d, rng, out);
                self.exact_div(&g).equal_degree(d, rng, out);
                return;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities, sorted.
    /// The leading coefficient is dropped.
    pub fn factor(&self) -> Vec<(Poly, usize)> {
        assert!(!self.is_zero(), "factorization of zero");
        let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
        let mut out = Vec::new();
        for (b, i) in self.squarefree_decomposition().1 {
            for (g, d) in b.distinct_degree() {
                let mut parts = Vec::new();
                g.equal_degree(d, &mut rng, &mut parts);
                out.extend(parts.into_iter().map(|h| (h, i)));
            }
        }
        out.sort();
        out
    }

    pub fn roots(&self) -> Vec<FFElem> {
        let f = &self.field;
        self.factor()
            .into_iter()
            .filter(|(g, _)| g.deg() == 1)
            .map(|(g, _)| f.neg(g.coeff(0)))
            .collect()
    }

    /// Text form with coefficients shown as integers (prime fields) or coordinate vectors.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = if f.dim() == 1 {
                f.coords(c)[0].to_string()
            } else {
                format!("{:?}", f.coords(c))
            };
            let t = match (i, cs.as_str()) {
                (0, _) => cs,
                (1, "1") => var.to_string(),
                (1, _) => format!("{cs}*{var}"),
                (_, "1") => format!("{var}^{i}"),
                _ => format!("{cs}*{var}^{i}"),
            };
            terms.push(t);
        }
        terms.join("+")
    }
}

fn sqf_rec(f: &Poly, mult: usize, out: &mut Vec<(Poly, usize)>) {
    if f.deg() == 0 {
        return;
    }
    let df = f.derivative();
    if df.is_zero() {
        let p = f.field().characteristic() as usize;
        sqf_rec(&f.pth_root(), mult * p, out);
        return;
    }
    // Yun-style peeling of the separable part; the remainder is a p-th power
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.exact_div(&y);
        if z.deg() > 0 {
            out.push((z, i * mult));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    if c.deg() > 0 {
        let p = f.field().characteristic() as usize;
        sqf_rec(&c.pth_root(), mult * p, out);
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.add_impl(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.add_impl(rhs, true)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_impl(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::new(f.clone(), self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Arc<FieldSpec> {
        FieldSpec::prime(5).unwrap()
    }

    fn p(f: &Arc<FieldSpec>, c: &[i64]) -> Poly {
        Poly::new(f.clone(), c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn gcd_and_divmod() {
        let f = f5();
        assert_eq!(p(&f, &[-1, 0, 1]).gcd(&p(&f, &[-1, 1])), p(&f, &[4, 1]));
        let (q, r) = p(&f, &[1, 4, 1]).div_rem(&p(&f, &[0, 1]));
        assert_eq!((q, r), (p(&f, &[4, 1]), p(&f, &[1])));
    }

    #[test]
    fn factor_small() {
        let f = f5();
        let fac = p(&f, &[-1, 0, 1]).factor();
        assert_eq!(fac, vec![(p(&f, &[1, 1]), 1), (p(&f, &[4, 1]), 1)]);
        assert_eq!(p(&f, &[2, 0, 1]).factor(), vec![(p(&f, &[2, 0, 1]), 1)]);
        assert_eq!(p(&f, &[0, 0, 0, 1]).factor(), vec![(p(&f, &[0, 1]), 3)]);
    }

    #[test]
    fn inseparable_squarefree() {
        let f = FieldSpec::prime(2).unwrap();
        // (x^2+x+1)^2 (x+1)^3
        let a = p(&f, &[1, 1, 1]);
        let b = p(&f, &[1, 1]);
        let g = &a.pow(2) * &b.pow(3);
        let (_, parts) = g.squarefree_decomposition();
        assert_eq!(parts, vec![(a.clone(), 2), (b.clone(), 3)]);
        assert_eq!(g.factor(), vec![(b, 3), (a, 2)]);
    }

    #[test]
    fn resultant_matches_roots() {
        let f = f5();
        // Res(x-a, x-b) = a-b for monic linear polynomials
        let r = p(&f, &[-2, 1]).resultant(&p(&f, &[-4, 1]));
        assert_eq!(r, f.from_int(2 - 4));
    }
}
