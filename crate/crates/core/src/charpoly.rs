//! Monic polynomials in x over A: resultants, discriminants and the Weil shape.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::base_ring::{split_power, valuation, APoly, Place, ResidueField};
use crate::context::ClassContext;
use crate::field::{FFElem, FieldSpec};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharPolyError {
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("discriminant needs degree at least 2")]
    DegreeTooSmall,
    #[error("polynomial is not monic of degree >= 1")]
    NotMonic,
    #[error("coefficient a_{0} is not integral at infinity")]
    NotIntegralAtInfinity(usize),
    #[error("f(x^(p^n)) split left an inseparable f")]
    InvariantViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("constant term is not a unit times p_v^(m/r2)")]
    BadConstantTerm,
    #[error("degree {r1} is incompatible with rank and m")]
    RankMismatch { r1: usize },
    #[error("deg a_{i} exceeds its bound")]
    DegreeBoundViolated { i: usize },
}

/// M(x) = x^r1 + a_1 x^(r1-1) + ... + a_r1, coefficients stored ascending in x.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    coeffs: Vec<APoly>,
}

impl fmt::Debug for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let xs = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let cs = c.display("T");
            let t = if i == 0 {
                cs
            } else if c.is_one() {
                xs
            } else if c.coeffs().len() == 1 {
                format!("{cs}*{xs}")
            } else {
                format!("({cs})*{xs}")
            };
            terms.push(t);
        }
        write!(f, "{}", terms.join("+"))
    }
}

impl CharPoly {
    pub fn new(coeffs: Vec<APoly>) -> Result<CharPoly, CharPolyError> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 || !coeffs.last().unwrap().is_one() {
            return Err(CharPolyError::NotMonic);
        }
        Ok(CharPoly { coeffs })
    }

    /// Builds x^r1 + a_1 x^(r1-1) + ... + a_r1 from (a_1, ..., a_r1).
    pub fn from_template(fq: &Arc<FieldSpec>, a: &[APoly]) -> CharPoly {
        let mut coeffs: Vec<APoly> = a.iter().rev().cloned().collect();
        coeffs.push(Poly::one(fq));
        CharPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[APoly] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn fq(&self) -> &Arc<FieldSpec> {
        self.coeffs[0].field()
    }

    /// a_i, the coefficient of x^(r1-i).
    pub fn a(&self, i: usize) -> &APoly {
        &self.coeffs[self.degree() - i]
    }

    pub fn constant(&self) -> &APoly {
        &self.coeffs[0]
    }

    pub fn derivative(&self) -> Vec<APoly> {
        let fq = self.fq();
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(fq.from_int(i as i64)))
            .collect()
    }

    /// M(x^k).
    pub fn inflate(&self, k: usize) -> CharPoly {
        let zero = Poly::zero(self.fq());
        let mut v = vec![zero; self.degree() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        CharPoly { coeffs: v }
    }

    /// Reduction of all coefficients through a ring map A -> F.
    pub fn map_to(&self, target: &Arc<FieldSpec>, g: impl Fn(&APoly) -> FFElem) -> Poly {
        Poly::new(target.clone(), self.coeffs.iter().map(g).collect())
    }

    pub fn reduce(&self, res: &ResidueField) -> Poly {
        self.map_to(res.field(), |c| res.reduce(c))
    }
}

/// Product of polynomials over A given as ascending coefficient slices.
pub fn mul_over_a(f: &[APoly], g: &[APoly]) -> Vec<APoly> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let fq = f[0].field();
    let mut out = vec![Poly::zero(fq); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] = &out[i + j] + &(a * b);
        }
    }
    out
}

fn trimmed(f: &[APoly]) -> &[APoly] {
    let n = f.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    &f[..n]
}

/// Res_x(f, g) as the Sylvester determinant, computed by Bareiss elimination.
pub fn resultant(f: &[APoly], g: &[APoly]) -> Result<APoly, CharPolyError> {
    let (f, g) = (trimmed(f), trimmed(g));
    if f.is_empty() || g.is_empty() {
        return Err(CharPolyError::ZeroArgument);
    }
    let fq = f[0].field().clone();
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    if size == 0 {
        return Ok(Poly::one(&fq));
    }
    let zero = Poly::zero(&fq);
    let mut a = vec![vec![zero.clone(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            a[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            a[n + i][i + j] = c.clone();
        }
    }
    Ok(bareiss_det(a))
}

/// Fraction-free determinant over A.
pub fn bareiss_det(mut a: Vec<Vec<APoly>>) -> APoly {
    let size = a.len();
    let fq = a[0][0].field().clone();
    let mut negate = false;
    let mut prev = Poly::one(&fq);
    for k in 0..size {
        if a[k][k].is_zero() {
            let Some(piv) = (k + 1..size).find(|&i| !a[i][k].is_zero()) else {
                return Poly::zero(&fq);
            };
            a.swap(k, piv);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

pub fn discriminant(m: &CharPoly) -> Result<APoly, CharPolyError> {
    if m.degree() < 2 {
        return Err(CharPolyError::DegreeTooSmall);
    }
    Ok(disc_monic(m))
}

/// Discriminant with the convention disc = 1 in degree 1.
pub fn disc_monic(m: &CharPoly) -> APoly {
    let n = m.degree();
    if n == 1 {
        return Poly::one(m.fq());
    }
    let d = m.derivative();
    if trimmed(&d).is_empty() {
        return Poly::zero(m.fq());
    }
    let r = resultant(m.coeffs(), &d).expect("nonzero operands");
    if (n * (n - 1) / 2) % 2 == 1 {
        -&r
    } else {
        r
    }
}

/// Data of the Weil template matched by M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilShape {
    pub r1: usize,
    pub r2: usize,
    pub mu: FFElem,
    pub m: usize,
    /// ceil(m·deg p_v / r)
    pub s: usize,
    /// Precision at v, once the discriminant is known.
    pub n: Option<i64>,
    /// Precision at infinity, once the discriminant is known.
    pub h: Option<i64>,
    /// For M = f(x^(p^e)) with e > 0: (deg f, e).
    pub inseparable: Option<(usize, u32)>,
}

/// Checks the template of a separable candidate.
pub fn shape_check(m: &CharPoly, ctx: &ClassContext) -> Result<WeilShape, ShapeError> {
    template_check(m, ctx, 0)
}

/// Template check for f where M = f(x^(p^e)).
pub fn template_check(f: &CharPoly, ctx: &ClassContext, e: u32) -> Result<WeilShape, ShapeError> {
    let pe = (ctx.p() as usize).pow(e);
    let r0 = f.degree();
    let deg_pv = ctx.deg_pv();
    if ctx.r % (r0 * pe) != 0 {
        return Err(ShapeError::RankMismatch { r1: r0 });
    }
    let r2 = ctx.r / (r0 * pe);
    if ctx.m % r2 != 0 {
        return Err(ShapeError::RankMismatch { r1: r0 });
    }
    // deg a_i ≤ i·m·deg p_v / r
    for i in 1..r0 {
        let a = f.a(i);
        if !a.is_zero() && a.deg() * ctx.r > i * ctx.m * deg_pv {
            return Err(ShapeError::DegreeBoundViolated { i });
        }
    }
    let c = f.constant();
    if c.is_zero() {
        return Err(ShapeError::BadConstantTerm);
    }
    let (unit, ev) = split_power(c, &ctx.pv);
    if unit.deg() != 0 || ev != ctx.m / r2 {
        return Err(ShapeError::BadConstantTerm);
    }
    Ok(WeilShape {
        r1: r0,
        r2,
        mu: unit.coeff(0),
        m: ctx.m,
        s: ctx.s_inf(),
        n: None,
        h: None,
        inseparable: (e > 0).then_some((r0, e)),
    })
}

/// n = v(D)+1 and h = v_∞(D) + s·r1(r1-1) + 1.
pub fn precisions(disc: &APoly, pv: &APoly, s: usize, r1: usize) -> (i64, i64) {
    let v = valuation(disc, &Place::Finite(pv.clone()))
        .finite()
        .expect("nonzero discriminant");
    let vi = valuation(disc, &Place::Infinity)
        .finite()
        .expect("nonzero discriminant");
    (v + 1, vi + (s * r1 * (r1 - 1)) as i64 + 1)
}

/// M(x) = f(x^(p^n)) with n maximal; f must come out separable.
pub fn separability_split(m: &CharPoly, p: u64) -> Result<(CharPoly, u32), CharPolyError> {
    let p = p as usize;
    let mut f = m.clone();
    let mut n = 0u32;
    loop {
        let ok = f
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || i % p == 0);
        if !ok || f.degree() % p != 0 {
            break;
        }
        f = CharPoly {
            coeffs: f.coeffs.iter().step_by(p).cloned().collect(),
        };
        n += 1;
    }
    if disc_monic(&f).is_zero() {
        return Err(CharPolyError::InvariantViolation);
    }
    Ok((f, n))
}

/// Coefficient i divided by T^(scale·i), rewritten in u = 1/T.
pub fn infinity_normalize(m: &CharPoly, scale: usize) -> Result<Vec<Poly>, CharPolyError> {
    let r1 = m.degree();
    let fq = m.fq();
    let mut out = Vec::with_capacity(r1 + 1);
    for k in 0..=r1 {
        let i = r1 - k;
        let a = &m.coeffs[k];
        if a.is_zero() {
            out.push(Poly::zero(fq));
            continue;
        }
        let top = scale * i;
        if a.deg() > top {
            return Err(CharPolyError::NotIntegralAtInfinity(i));
        }
        let mut v = vec![FFElem::ZERO; top + 1];
        for (j, &c) in a.coeffs().iter().enumerate() {
            v[top - j] = c;
        }
        out.push(Poly::new(fq.clone(), v));
    }
    Ok(out)
}

/// p_v-adic digits of every coefficient mod p_v^n, as residue-field elements.
pub fn reduce_mod_power(
    m: &CharPoly,
    res: &ResidueField,
    pv: &APoly,
    n: usize,
) -> Vec<Vec<FFElem>> {
    m.coeffs
        .iter()
        .map(|c| {
            let mut digits = Vec::with_capacity(n);
            let mut h = c.clone();
            for _ in 0..n {
                let (q, r) = h.div_rem(pv);
                digits.push(res.reduce(&r));
                h = q;
            }
            digits
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_ring::parse_apoly;

    fn fixture() -> CharPoly {
        let f = FieldSpec::prime(5).unwrap();
        let a = |s| parse_apoly(&f, s, 'T').unwrap();
        CharPoly::new(vec![a("T^2"), a("1+T"), a("3"), a("1")]).unwrap()
    }

    #[test]
    fn fixture_discriminant() {
        let m = fixture();
        let d = discriminant(&m).unwrap();
        assert_eq!(d.display("T"), "3*T^4+3*T^2+T");
    }

    #[test]
    fn resultant_linear_fixture() {
        let f = FieldSpec::prime(5).unwrap();
        let a = |s| parse_apoly(&f, s, 'T').unwrap();
        let r = resultant(&[a("0"), a("1")], &[a("1+T"), a("3"), a("1")]).unwrap();
        assert_eq!(r, a("1+T"));
    }

    #[test]
    fn infinity_normal_form() {
        let m = fixture();
        let m0 = infinity_normalize(&m, 1).unwrap();
        let shown: Vec<String> = m0.iter().map(|c| c.display("u")).collect();
        assert_eq!(shown, vec!["u", "u^2+u", "3*u", "1"]);
    }
}
