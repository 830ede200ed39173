//! The ring A = F_q[T], places of F_q(T) and their residue fields.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FFElem, FieldSpec};
use crate::poly::Poly;

/// An element of A = F_q[T].
pub type APoly = Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseRingError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("place generator {0} is not monic irreducible")]
    BadPlace(String),
}

/// Valuation value with v(0) = +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => a.cmp(b),
            (Val::Fin(_), Val::Inf) => Ordering::Less,
            (Val::Inf, Val::Fin(_)) => Ordering::Greater,
            (Val::Inf, Val::Inf) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{v}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Finite(APoly),
    Infinity,
}

impl Place {
    pub fn finite(generator: APoly) -> Result<Place, BaseRingError> {
        if !generator.is_monic() || !generator.is_irreducible() {
            return Err(BaseRingError::BadPlace(generator.display("T")));
        }
        Ok(Place::Finite(generator))
    }

    /// Degree of the place (1 at infinity).
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(g) => g.deg(),
            Place::Infinity => 1,
        }
    }

    pub fn generator(&self) -> Option<&APoly> {
        match self {
            Place::Finite(g) => Some(g),
            Place::Infinity => None,
        }
    }
}

pub fn valuation(f: &APoly, place: &Place) -> Val {
    if f.is_zero() {
        return Val::Inf;
    }
    match place {
        Place::Infinity => Val::Fin(-(f.deg() as i64)),
        Place::Finite(g) => {
            let mut v = 0;
            let mut h = f.clone();
            loop {
                let (q, r) = h.div_rem(g);
                if !r.is_zero() {
                    return Val::Fin(v);
                }
                h = q;
                v += 1;
            }
        }
    }
}

/// Splits f = u·p^e with p ∤ u; f must be nonzero.
pub fn split_power(f: &APoly, p: &APoly) -> (APoly, usize) {
    let mut e = 0;
    let mut h = f.clone();
    loop {
        let (q, r) = h.div_rem(p);
        if !r.is_zero() {
            return (h, e);
        }
        h = q;
        e += 1;
    }
}

pub fn checked_div_rem(f: &APoly, g: &APoly) -> Result<(APoly, APoly), BaseRingError> {
    f.checked_div_rem(g).ok_or(BaseRingError::DivisionByZero)
}

pub fn squarefree_decomposition(b: &APoly) -> Result<(FFElem, Vec<(APoly, usize)>), BaseRingError> {
    if b.is_zero() {
        return Err(BaseRingError::ZeroArgument);
    }
    Ok(b.squarefree_decomposition())
}

pub fn factor_over_fq(f: &APoly) -> Result<Vec<(APoly, usize)>, BaseRingError> {
    if f.is_zero() {
        return Err(BaseRingError::ZeroArgument);
    }
    Ok(f.factor())
}

/// A/p_v as a field together with the reduction map.
#[derive(Clone, Debug)]
pub struct ResidueField {
    fq: Arc<FieldSpec>,
    field: Arc<FieldSpec>,
    generator: APoly,
    /// Image of T.
    t_image: FFElem,
}

impl ResidueField {
    pub fn new(place_gen: &APoly) -> ResidueField {
        let fq = place_gen.field().clone();
        if place_gen.deg() == 1 {
            let root = fq.neg(place_gen.coeff(0));
            return ResidueField {
                fq: fq.clone(),
                field: fq,
                generator: place_gen.clone(),
                t_image: root,
            };
        }
        let field = fq
            .extend(place_gen.coeffs())
            .expect("place generator is irreducible");
        let t_image = field.generator_of_top_level();
        ResidueField {
            fq,
            field,
            generator: place_gen.clone(),
            t_image,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn base(&self) -> &Arc<FieldSpec> {
        &self.fq
    }

    /// Image of T in the residue field.
    pub fn t_image(&self) -> FFElem {
        self.t_image
    }

    pub fn reduce(&self, f: &APoly) -> FFElem {
        let fld = &self.field;
        let base = &self.fq;
        f.rem(&self.generator)
            .coeffs()
            .iter()
            .rev()
            .fold(FFElem::ZERO, |acc, &c| {
                fld.add(fld.mul(acc, self.t_image), fld.embed(base, c))
            })
    }

    /// Canonical lift of a residue to a polynomial of degree < deg p_v.
    pub fn lift(&self, a: FFElem) -> APoly {
        let d = self.generator.deg();
        if d == 1 {
            return Poly::constant(&self.fq, a);
        }
        let w = self.fq.dim();
        let coords = self.field.coords(a);
        let coeffs = (0..d)
            .map(|j| self.fq.from_coords(&coords[j * w..(j + 1) * w]).unwrap())
            .collect();
        Poly::new(self.fq.clone(), coeffs)
    }
}

pub fn residue_field(place: &Place) -> Option<ResidueField> {
    place.generator().map(ResidueField::new)
}

/// Parses the text form "T^2+4*T+2" over a prime field.
pub fn parse_apoly(fq: &Arc<FieldSpec>, s: &str, var: char) -> Option<APoly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "0" {
        return Some(Poly::zero(fq));
    }
    let mut coeffs: Vec<FFElem> = Vec::new();
    let mut term = String::new();
    let mut terms = Vec::new();
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(std::mem::take(&mut term));
        }
        term.push(ch);
    }
    terms.push(term);
    for t in terms {
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b.to_string()),
            None => (false, t.trim_start_matches('+').to_string()),
        };
        let (c, e) = match body.find(var) {
            None => (body.parse::<i64>().ok()?, 0usize),
            Some(pos) => {
                let c = if pos == 0 {
                    1
                } else {
                    body[..pos].strip_suffix('*')?.parse::<i64>().ok()?
                };
                let rest = &body[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')?.parse().ok()?
                };
                (c, e)
            }
        };
        if coeffs.len() <= e {
            coeffs.resize(e + 1, FFElem::ZERO);
        }
        let c = fq.from_int(if neg { -c } else { c });
        coeffs[e] = fq.add(coeffs[e], c);
    }
    Some(Poly::new(fq.clone(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Arc<FieldSpec> {
        FieldSpec::prime(5).unwrap()
    }

    #[test]
    fn valuations_of_fixture_discriminant() {
        let f = f5();
        let d = parse_apoly(&f, "3*T^4+3*T^2+T", 'T').unwrap();
        let t = Place::finite(parse_apoly(&f, "T", 'T').unwrap()).unwrap();
        assert_eq!(valuation(&d, &t), Val::Fin(1));
        assert_eq!(valuation(&d, &Place::Infinity), Val::Fin(-4));
        assert_eq!(valuation(&Poly::zero(&f), &t), Val::Inf);
    }

    #[test]
    fn text_round_trip() {
        let f = f5();
        let a = parse_apoly(&f, "T^2+4*T+2", 'T').unwrap();
        assert_eq!(a.display("T"), "T^2+4*T+2");
        assert_eq!(parse_apoly(&f, "T-1", 'T').unwrap().display("T"), "T+4");
    }

    #[test]
    fn residue_field_degree_two() {
        let f = f5();
        let g = parse_apoly(&f, "T^2+2", 'T').unwrap();
        let rf = ResidueField::new(&g);
        assert_eq!(rf.field().order(), 25);
        assert!(rf.reduce(&g).is_zero());
        let h = parse_apoly(&f, "3*T+4", 'T').unwrap();
        assert_eq!(rf.lift(rf.reduce(&h)), h);
    }
}
