//! Factorization over the completions of F_q(T).
//!
//! A completion is modelled as F((t)) with F the residue field: t = p_v at a
//! finite place (through the Teichmüller-free embedding T ↦ X(t) with
//! p_v(X(t)) = t) and t = 1/T at infinity. Factors are found by Hensel lifting
//! coprime residue blocks and refining the remaining blocks with Newton
//! polygons, their residual polynomials, unramified extensions of F and tame
//! ramified extensions F((ϖ)) with ϖ^b = c·t.

use std::sync::Arc;

use thiserror::Error;

use crate::base_ring::{Place, ResidueField};
use crate::charpoly::{disc_monic, CharPoly};
use crate::field::{gcd, FFElem, FieldSpec};
use crate::poly::Poly;
use crate::series::{
    lp_degree, lp_from_adic, lp_mul, lp_prec, lp_residue, lp_scale_roots, lp_taylor_shift,
    lp_to_adic, lp_truncate, lp_unscale_roots, LPoly, Series, EXACT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("precision insufficient to certify the factorization")]
    PrecisionInsufficient,
    #[error("input is inseparable")]
    InseparableInput,
    #[error("residue blocks are not pairwise coprime")]
    BlocksNotCoprime,
    #[error("wild ramification of index {0} needs a refinement that is not implemented")]
    WildRamification(usize),
}

type Res<T> = Result<T, LocalError>;

/// A factor found by the recursion, before truncation.
#[derive(Clone, Debug)]
struct Piece {
    poly: LPoly,
    e: usize,
    f: usize,
}

/// Exact segment data: slope = num/den in lowest terms (root valuation = -slope).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope_num: i64,
    pub slope_den: i64,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
}

/// One factor over the completion, with t-adic digits of each x-coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub coeffs: Vec<Vec<FFElem>>,
    /// The irreducible ψ over the residue field with factor ≡ ψ^k mod t.
    pub residual: Poly,
    pub e: usize,
    pub f: usize,
}

impl LocalFactor {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The factor modulo t.
    pub fn residue(&self, field: &Arc<FieldSpec>) -> Poly {
        Poly::new(field.clone(), self.coeffs.iter().map(|d| d[0]).collect())
    }
}

#[derive(Clone, Debug)]
pub struct LocalFactorization {
    pub place: Place,
    pub precision: usize,
    /// Residue field F of the completion F((t)).
    pub field: Arc<FieldSpec>,
    pub factors: Vec<LocalFactor>,
    pub exact: bool,
}

impl LocalFactorization {
    /// Product of all factors, as digit vectors mod t^precision.
    pub fn reassemble(&self) -> Vec<Vec<FFElem>> {
        let f = &self.field;
        let p = self.precision as i64;
        let mut acc: LPoly = vec![Series::exact_constant(f.one())];
        for fac in &self.factors {
            let lp: LPoly = fac
                .coeffs
                .iter()
                .map(|d| Series::new(0, d.clone(), p))
                .collect();
            acc = lp_mul(f, &acc, &lp);
        }
        acc.iter()
            .map(|s| s.digits_from_zero(self.precision))
            .collect()
    }

    pub fn degree_sum(&self) -> usize {
        self.factors.iter().map(|x| x.e * x.f).sum()
    }
}

/// Newton polygon of M at a place, from exact coefficient valuations.
pub fn newton_polygon(m: &CharPoly, place: &Place) -> NewtonPolygon {
    let pts: Vec<(i64, i64)> = m
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            crate::base_ring::valuation(c, place)
                .finite()
                .map(|v| (i as i64, v))
        })
        .collect();
    let hull = lower_hull(&pts);
    NewtonPolygon {
        segments: hull.windows(2).map(|w| segment(w[0], w[1])).collect(),
    }
}

fn segment(a: (i64, i64), b: (i64, i64)) -> Segment {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let g = gcd(dy.unsigned_abs(), dx as u64).max(1) as i64;
    Segment {
        slope_num: dy / g,
        slope_den: dx / g,
        length: dx as usize,
    }
}

fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut h: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 {
            let (o, a) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (a.0 - o.0) as i128 * (p.1 - o.1) as i128
                - (a.1 - o.1) as i128 * (p.0 - o.0) as i128;
            if cross <= 0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

/// Hull vertices of a polynomial with approximate coefficients, checking that
/// coefficients known only to be small cannot change it.
fn approx_hull(g: &LPoly) -> Res<Vec<(i64, i64)>> {
    let n = g.len();
    if g[0].val().is_none() {
        return Err(LocalError::PrecisionInsufficient);
    }
    let known: Vec<(i64, i64)> = g
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.val().map(|v| (i as i64, v)))
        .collect();
    let hull = lower_hull(&known);
    for (i, s) in g.iter().enumerate().take(n - 1) {
        if s.val().is_some() {
            continue;
        }
        let i = i as i64;
        let w = hull
            .windows(2)
            .find(|w| w[0].0 <= i && i <= w[1].0)
            .expect("hull spans all indices");
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        // need prec > line value at i
        let lhs = s.prec() as i128 * (x2 - x1) as i128;
        let rhs = y1 as i128 * (x2 - i) as i128 + y2 as i128 * (i - x1) as i128;
        if lhs <= rhs {
            return Err(LocalError::PrecisionInsufficient);
        }
    }
    Ok(hull)
}

/// Lifts a residue factorization of the monic `g` into pairwise coprime monic blocks.
pub fn hensel_split(fld: &Arc<FieldSpec>, g: &LPoly, blocks: &[Poly]) -> Res<Vec<LPoly>> {
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if !blocks[i].gcd(&blocks[j]).is_one() {
                return Err(LocalError::BlocksNotCoprime);
            }
        }
    }
    let prec = lp_prec(g);
    if prec < 1 || lp_residue(fld, g).is_none() {
        return Err(LocalError::PrecisionInsufficient);
    }
    let prec = prec.min(EXACT) as usize;
    let mut rest = lp_to_adic(fld, g, prec);
    let prod = blocks.iter().fold(Poly::one(fld), |acc, b| &acc * b);
    assert_eq!(prod, rest[0], "blocks do not multiply to the residue");
    let mut out = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        if i + 1 == blocks.len() {
            out.push(lp_from_adic(&rest, b.deg(), true, fld));
            break;
        }
        let tail = blocks[i + 1..]
            .iter()
            .fold(Poly::one(fld), |acc, x| &acc * x);
        let (gd, hd) = hensel_two(&rest, b, &tail);
        out.push(lp_from_adic(&gd, b.deg(), true, fld));
        rest = hd;
    }
    Ok(out)
}

/// Lifts `g` (in t-adic digit form) to the requested precision and splits it.
pub fn hensel_lift(
    fld: &Arc<FieldSpec>,
    g: &LPoly,
    blocks: &[Poly],
    target_precision: usize,
) -> Res<Vec<LPoly>> {
    hensel_split(fld, &lp_truncate(g, target_precision as i64), blocks)
}

/// Digit-by-digit lift of F = g·h with g ≡ gbar, h ≡ hbar; the higher digits of
/// g and h have degree below deg gbar and deg hbar.
fn hensel_two(fdig: &[Poly], gbar: &Poly, hbar: &Poly) -> (Vec<Poly>, Vec<Poly>) {
    let (_, _, t) = gbar.xgcd(hbar);
    let mut g = vec![gbar.clone()];
    let mut h = vec![hbar.clone()];
    for k in 1..fdig.len() {
        let mut e = fdig[k].clone();
        for i in 1..k {
            e = &e - &(&g[i] * &h[k - i]);
        }
        let gk = (&t * &e).rem(gbar);
        let hk = (&e - &(&gk * hbar)).exact_div(gbar);
        g.push(gk);
        h.push(hk);
    }
    (g, h)
}

fn lp_embed(g: &LPoly, from: &FieldSpec, to: &FieldSpec) -> LPoly {
    g.iter()
        .map(|s| s.map_digits(|c| to.embed(from, c)))
        .collect()
}

fn lp_project(g: &LPoly, from: &FieldSpec, to: &FieldSpec) -> LPoly {
    g.iter()
        .map(|s| {
            s.try_map_digits(|c| from.project(to, c))
                .expect("norm lies in the base field")
        })
        .collect()
}

fn lp_ramify(fld: &FieldSpec, g: &LPoly, b: i64, c: FFElem) -> LPoly {
    g.iter().map(|s| s.ramify(fld, b, c)).collect()
}

fn lp_descend(fld: &FieldSpec, g: &LPoly, b: i64, c: FFElem) -> Res<LPoly> {
    g.iter()
        .map(|s| {
            s.descend(fld, b, c)
                .ok_or(LocalError::PrecisionInsufficient)
        })
        .collect()
}

fn extend_field(fld: &Arc<FieldSpec>, psi: &Poly) -> (Arc<FieldSpec>, FFElem) {
    let ext = fld
        .extend(psi.coeffs())
        .expect("residual factor is irreducible");
    let z = ext.generator_of_top_level();
    (ext, z)
}

/// Product of the Galois conjugates of a polynomial over F'((t)) under Frobenius of F'/F.
fn norm_unramified(ext: &Arc<FieldSpec>, fld: &Arc<FieldSpec>, p: &LPoly, degree: usize) -> LPoly {
    let q = fld.order();
    let mut acc: LPoly = vec![Series::exact_constant(ext.one())];
    for j in 0..degree {
        let conj: LPoly = p
            .iter()
            .map(|s| s.map_digits(|c| ext.frobenius_power(c, q, j as u32)))
            .collect();
        acc = lp_mul(ext, &acc, &conj);
    }
    lp_project(&acc, ext, fld)
}

/// Smallest extension of F holding a primitive b-th root of unity, and that root.
fn root_of_unity_field(fld: &Arc<FieldSpec>, b: u64) -> (Arc<FieldSpec>, FFElem) {
    let q = fld.order() % b;
    let mut d = 1u32;
    let mut acc = q % b;
    while acc != 1 % b {
        acc = acc * q % b;
        d += 1;
    }
    let ext = if d == 1 {
        fld.clone()
    } else {
        fld.extend(first_irreducible(fld, d as usize).coeffs())
            .unwrap()
    };
    let zeta = ext.pow(ext.canonical_generator(), ((ext.order() - 1) / b) as u128);
    (ext, zeta)
}

/// Lexicographically first monic irreducible polynomial of degree d.
fn first_irreducible(fld: &Arc<FieldSpec>, d: usize) -> Poly {
    let q = fld.order();
    let mut i = 0u64;
    loop {
        let mut c = Vec::with_capacity(d + 1);
        let mut x = i;
        for _ in 0..d {
            c.push(fld.from_index(x % q));
            x /= q;
        }
        c.push(fld.one());
        let p = Poly::new(fld.clone(), c);
        if p.is_irreducible() {
            return p;
        }
        i += 1;
    }
}

/// Norm from F((ϖ)) to F((ϖ^b)) via ϖ ↦ ζ^j ϖ.
fn norm_ramified(fld: &Arc<FieldSpec>, p: &LPoly, b: usize) -> LPoly {
    let (ext, zeta) = root_of_unity_field(fld, b as u64);
    let pe = lp_embed(p, fld, &ext);
    let mut acc: LPoly = vec![Series::exact_constant(ext.one())];
    for j in 0..b {
        let zj = ext.pow(zeta, j as u128);
        let conj: LPoly = pe.iter().map(|s| twist(&ext, s, zj)).collect();
        acc = lp_mul(&ext, &acc, &conj);
    }
    lp_project(&acc, &ext, fld)
}

/// Digit at ϖ^e multiplied by c^e.
fn twist(f: &FieldSpec, s: &Series, c: FFElem) -> Series {
    if s.is_known_zero() {
        return s.clone();
    }
    let start = s.val().unwrap();
    let len = (s.prec().min(start + 4 * 1024) - start).max(0);
    let digits = (0..len)
        .map(|i| {
            let e = start + i;
            f.mul(s.coeff(e), f.pow_signed(c, e as i128).unwrap())
        })
        .collect();
    Series::new(start, digits, s.prec())
}

fn xgcd_i64(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return (a, 1, 0);
    }
    let (g, x, y) = xgcd_i64(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

fn analyze(fld: &Arc<FieldSpec>, g: &LPoly) -> Res<Vec<Piece>> {
    let n = lp_degree(g);
    if n == 1 {
        return Ok(vec![Piece {
            poly: g.clone(),
            e: 1,
            f: 1,
        }]);
    }
    let res = lp_residue(fld, g).ok_or(LocalError::PrecisionInsufficient)?;
    let fac = res.factor();
    if fac.len() > 1 {
        let blocks: Vec<Poly> = fac.iter().map(|(p, k)| p.pow(*k as u64)).collect();
        let mut out = Vec::new();
        for part in hensel_split(fld, g, &blocks)? {
            out.extend(analyze(fld, &part)?);
        }
        return Ok(out);
    }
    let (psi, k) = &fac[0];
    if *k == 1 {
        return Ok(vec![Piece {
            poly: g.clone(),
            e: 1,
            f: psi.deg(),
        }]);
    }
    if psi.deg() > 1 {
        let (ext, z) = extend_field(fld, psi);
        let ge = lp_embed(g, fld, &ext);
        let block = Poly::new(ext.clone(), vec![ext.neg(z), ext.one()]).pow(*k as u64);
        let rest = psi.embed(&ext).pow(*k as u64).exact_div(&block);
        let parts = hensel_split(&ext, &ge, &[block, rest])?;
        return analyze(&ext, &parts[0])?
            .into_iter()
            .map(|p| {
                Ok(Piece {
                    poly: norm_unramified(&ext, fld, &p.poly, psi.deg()),
                    e: p.e,
                    f: p.f * psi.deg(),
                })
            })
            .collect();
    }
    let c = fld.neg(psi.coeff(0));
    let shifted = lp_taylor_shift(fld, g, c);
    Ok(analyze_nilpotent(fld, &shifted)?
        .into_iter()
        .map(|p| Piece {
            poly: lp_taylor_shift(fld, &p.poly, fld.neg(c)),
            ..p
        })
        .collect())
}

/// Residual polynomial of the single segment from (0, v0) to (n, 0) with root valuation a/b.
fn residual(fld: &Arc<FieldSpec>, g: &LPoly, a: i64, b: i64) -> Poly {
    let n = lp_degree(g) as i64;
    let v0 = g[0].val().unwrap();
    let coeffs = (0..=n / b)
        .map(|j| g[(j * b) as usize].coeff(v0 - j * a))
        .collect();
    Poly::new(fld.clone(), coeffs)
}

/// Factors a monic polynomial whose residue is x^n.
fn analyze_nilpotent(fld: &Arc<FieldSpec>, g: &LPoly) -> Res<Vec<Piece>> {
    let n = lp_degree(g);
    if n == 1 {
        return Ok(vec![Piece {
            poly: g.clone(),
            e: 1,
            f: 1,
        }]);
    }
    let hull = approx_hull(g)?;
    if hull.len() > 2 {
        let mut out = Vec::new();
        for part in split_by_slopes(fld, g, &hull)? {
            out.extend(analyze_nilpotent(fld, &part)?);
        }
        return Ok(out);
    }
    let v0 = hull[0].1;
    let d = gcd(v0 as u64, n as u64) as i64;
    let (a, b) = (v0 / d, n as i64 / d);
    if b as usize == n {
        return Ok(vec![Piece {
            poly: g.clone(),
            e: n,
            f: 1,
        }]);
    }
    let r = residual(fld, g, a, b);
    let fac = r.factor();
    if fac.len() > 1 {
        let blocks: Vec<Poly> = fac.iter().map(|(p, k)| p.pow(*k as u64)).collect();
        let mut out = Vec::new();
        for part in split_by_residual(fld, g, a, b, &blocks)? {
            out.extend(analyze_nilpotent(fld, &part)?);
        }
        return Ok(out);
    }
    let (rho, k) = &fac[0];
    if *k == 1 {
        return Ok(vec![Piece {
            poly: g.clone(),
            e: b as usize,
            f: rho.deg(),
        }]);
    }
    if rho.deg() > 1 {
        let (ext, z) = extend_field(fld, rho);
        let ge = lp_embed(g, fld, &ext);
        let block = Poly::new(ext.clone(), vec![ext.neg(z), ext.one()]).pow(*k as u64);
        let rest = rho.embed(&ext).pow(*k as u64).exact_div(&block);
        let parts = split_by_residual(&ext, &ge, a, b, &[block, rest])?;
        return analyze_nilpotent(&ext, &parts[0])?
            .into_iter()
            .map(|p| {
                Ok(Piece {
                    poly: norm_unramified(&ext, fld, &p.poly, rho.deg()),
                    e: p.e,
                    f: p.f * rho.deg(),
                })
            })
            .collect();
    }
    let z = fld.neg(rho.coeff(0));
    if b == 1 {
        // roots t^a·(z + small): recentre and recurse
        let h = lp_taylor_shift(fld, &lp_scale_roots(g, a), z);
        return Ok(analyze(fld, &h)?
            .into_iter()
            .map(|p| Piece {
                poly: lp_unscale_roots(&lp_taylor_shift(fld, &p.poly, fld.neg(z)), a),
                ..p
            })
            .collect());
    }
    if b as u64 % fld.characteristic() == 0 {
        return Err(LocalError::WildRamification(b as usize));
    }
    // t = z^(-u)·ϖ^b with u·a + w·b = 1, so that (θ/ϖ^a)^b has residue z^(w·b)
    let (_, u, w) = xgcd_i64(a, b);
    let c = fld.pow_signed(z, -(u as i128)).unwrap();
    let zw = fld.pow_signed(z, w as i128).unwrap();
    let geta = lp_ramify(fld, g, b, c);
    let h = lp_taylor_shift(fld, &lp_scale_roots(&geta, a), zw);
    let hres = lp_residue(fld, &h).ok_or(LocalError::PrecisionInsufficient)?;
    let kk = hres
        .coeffs()
        .iter()
        .position(|x| !x.is_zero())
        .unwrap_or(hres.deg());
    let h1 = if kk < hres.deg() {
        let ypow = Poly::monomial(fld, fld.one(), kk);
        let q = hres.exact_div(&ypow);
        hensel_split(fld, &h, &[ypow, q])?.swap_remove(0)
    } else {
        h
    };
    let mut out = Vec::new();
    for p in analyze(fld, &h1)? {
        let px = lp_unscale_roots(&lp_taylor_shift(fld, &p.poly, fld.neg(zw)), a);
        let normed = norm_ramified(fld, &px, b as usize);
        out.push(Piece {
            poly: lp_descend(fld, &normed, b, c)?,
            e: p.e * b as usize,
            f: p.f,
        });
    }
    Ok(out)
}

/// Splits a polynomial with residue x^n into one factor per Newton polygon segment.
fn split_by_slopes(fld: &Arc<FieldSpec>, g: &LPoly, hull: &[(i64, i64)]) -> Res<Vec<LPoly>> {
    // root valuations (dy/dx), rightmost segment first = smallest valuation
    let segs: Vec<(i64, i64, usize)> = hull
        .windows(2)
        .rev()
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[0].1 - w[1].1);
            let d = gcd(dy as u64, dx as u64) as i64;
            (dy / d, dx / d, dx as usize)
        })
        .collect();
    let nn = segs.iter().fold(1i64, |acc, s| {
        acc / gcd(acc as u64, s.1 as u64) as i64 * s.1
    });
    let one = fld.one();
    let mut current = if nn > 1 {
        lp_ramify(fld, g, nn, one)
    } else {
        g.clone()
    };
    let mut parts = Vec::new();
    for (a, b, len) in &segs[..segs.len() - 1] {
        let c = a * nn / b;
        let h = lp_scale_roots(&current, c);
        let hres = lp_residue(fld, &h).ok_or(LocalError::PrecisionInsufficient)?;
        let rest = lp_degree(&current) - len;
        let ypow = Poly::monomial(fld, one, rest);
        let unit_part = hres.exact_div(&ypow);
        let mut split = hensel_split(fld, &h, &[unit_part, ypow])?;
        current = lp_unscale_roots(&split.pop().unwrap(), c);
        parts.push(lp_unscale_roots(&split.pop().unwrap(), c));
    }
    parts.push(current);
    parts
        .iter()
        .map(|p| {
            if nn > 1 {
                lp_descend(fld, p, nn, one)
            } else {
                Ok(p.clone())
            }
        })
        .collect()
}

/// Splits a single-slope polynomial (root valuation a/b) by coprime factors of its residual.
fn split_by_residual(
    fld: &Arc<FieldSpec>,
    g: &LPoly,
    a: i64,
    b: i64,
    blocks: &[Poly],
) -> Res<Vec<LPoly>> {
    let one = fld.one();
    let gw = if b > 1 {
        lp_ramify(fld, g, b, one)
    } else {
        g.clone()
    };
    let h = lp_scale_roots(&gw, a);
    let yblocks: Vec<Poly> = blocks.iter().map(|x| x.inflate(b as usize)).collect();
    hensel_split(fld, &h, &yblocks)?
        .iter()
        .map(|p| {
            let back = lp_unscale_roots(p, a);
            if b > 1 {
                lp_descend(fld, &back, b, one)
            } else {
                Ok(back)
            }
        })
        .collect()
}

/// Power series X(t) with p_v(X) = t and X ≡ T mod t, to absolute precision `prec`.
fn cohen_parameter(res: &ResidueField, pv: &Poly, prec: i64) -> Series {
    let f = res.field();
    let fq = res.base();
    let pvf = pv.map_coeffs(f, |c| f.embed(fq, c));
    let dpv = pvf.derivative();
    let t = Series::new(1, vec![f.one()], EXACT);
    let mut x = Series::constant(res.t_image(), 1);
    let mut cur = 1i64;
    while cur < prec {
        cur = (2 * cur).min(prec);
        let xx = x.with_prec(cur);
        let num = eval_series(f, &pvf, &xx).sub(f, &t);
        let den = eval_series(f, &dpv, &xx);
        let step = num.mul(f, &den.inv(f, cur).expect("p_v is separable"));
        x = xx.sub(f, &step).truncate(cur);
    }
    x.truncate(prec)
}

fn eval_series(f: &FieldSpec, p: &Poly, x: &Series) -> Series {
    p.coeffs()
        .iter()
        .rev()
        .fold(Series::zero(EXACT), |acc, &c| {
            acc.mul(f, x).add(f, &Series::exact_constant(c))
        })
}

/// Coefficients of M as series in the local parameter, truncated to `prec`.
fn local_coefficients(m: &CharPoly, place: &Place, field: &Arc<FieldSpec>, prec: i64) -> LPoly {
    let fq = m.fq();
    let emb = |p: &Poly| p.map_coeffs(field, |c| field.embed(fq, c));
    let mut out: LPoly = match place {
        Place::Infinity => m
            .coeffs()
            .iter()
            .map(|c| Series::from_poly(&emb(c)))
            .collect(),
        Place::Finite(pv) => {
            let res = ResidueField::new(pv);
            let x = if pv.deg() == 1 {
                Series::new(0, vec![res.t_image(), field.one()], EXACT)
            } else {
                cohen_parameter(&res, pv, prec)
            };
            m.coeffs()
                .iter()
                .map(|c| eval_series(field, &emb(c), &x))
                .collect()
        }
    };
    let n = out.len();
    out[n - 1] = Series::exact_constant(field.one());
    lp_truncate(&out, prec)
}

/// gcd of the polynomials M_j(x) ∈ F_q[x] with M = Σ M_j(x)·T^j: the part of M with constant roots.
fn constant_part(m: &CharPoly) -> Poly {
    let fq = m.fq();
    let top = m.coeffs().iter().map(|c| c.deg()).max().unwrap_or(0);
    (0..=top).fold(Poly::zero(fq), |acc, j| {
        let mj = Poly::new(fq.clone(), m.coeffs().iter().map(|c| c.coeff(j)).collect());
        acc.gcd(&mj)
    })
}

/// Divides M by a monic polynomial with constant coefficients.
fn divide_by_constant_poly(m: &CharPoly, g: &Poly) -> Option<CharPoly> {
    let fq = m.fq();
    let n = m.degree();
    let d = g.deg();
    let mut r: Vec<Poly> = m.coeffs().to_vec();
    let mut q = vec![Poly::zero(fq); n - d + 1];
    for i in (0..=n - d).rev() {
        let c = r[i + d].clone();
        q[i] = c.clone();
        for (j, &gj) in g.coeffs().iter().enumerate() {
            r[i + j] = &r[i + j] - &c.scale(gj);
        }
    }
    (q.len() > 1).then(|| CharPoly::new(q).expect("monic quotient"))
}

/// Residue field of the completion at a place.
pub fn completion_residue_field(fq: &Arc<FieldSpec>, place: &Place) -> Arc<FieldSpec> {
    match place {
        Place::Infinity => fq.clone(),
        Place::Finite(pv) => ResidueField::new(pv).field().clone(),
    }
}

/// Factorization of a monic separable M into irreducible factors over the completion
/// at `place`, each known modulo t^precision. At infinity the coefficients of M are
/// read as polynomials in u = 1/T.
pub fn factor_local(m: &CharPoly, place: &Place, precision: usize) -> Res<LocalFactorization> {
    if disc_monic(m).is_zero() {
        return Err(LocalError::InseparableInput);
    }
    let fq = m.fq().clone();
    let field = completion_residue_field(&fq, place);
    let prec = precision.max(1) as i64;
    let mut factors = Vec::new();
    let cpart = constant_part(m);
    let rest = if cpart.deg() > 0 {
        for (psi, _) in cpart.factor() {
            for (phi, _) in psi.embed(&field).factor() {
                let coeffs = phi
                    .coeffs()
                    .iter()
                    .map(|&c| pad(vec![c], precision))
                    .collect();
                let f = phi.deg();
                factors.push(LocalFactor {
                    coeffs,
                    residual: phi,
                    e: 1,
                    f,
                });
            }
        }
        divide_by_constant_poly(m, &cpart.monic())
    } else {
        Some(m.clone())
    };
    if let Some(rest) = rest {
        let mut work = 2 * prec + 8;
        let limit = 64 * (prec + 8);
        let pieces = loop {
            let g = local_coefficients(&rest, place, &field, work);
            match analyze(&field, &g) {
                Ok(pieces) if pieces.iter().all(|p| lp_prec(&p.poly) >= prec) => break pieces,
                Ok(_) | Err(LocalError::PrecisionInsufficient) => {}
                Err(e) => return Err(e),
            }
            work *= 2;
            if work > limit {
                return Err(LocalError::PrecisionInsufficient);
            }
        };
        for p in pieces {
            let coeffs: Vec<Vec<FFElem>> = p
                .poly
                .iter()
                .map(|s| s.digits_from_zero(precision))
                .collect();
            let res = Poly::new(field.clone(), coeffs.iter().map(|d| d[0]).collect());
            let residual = res.factor().swap_remove(0).0;
            factors.push(LocalFactor {
                coeffs,
                residual,
                e: p.e,
                f: p.f,
            });
        }
    }
    factors.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs.cmp(&b.coeffs))
    });
    Ok(LocalFactorization {
        place: place.clone(),
        precision,
        field,
        factors,
        exact: true,
    })
}

fn pad(mut v: Vec<FFElem>, n: usize) -> Vec<FFElem> {
    v.resize(n.max(1), FFElem::ZERO);
    v
}

/// Res(f̄_i, M̄/f̄_i) over the residue field, for every factor.
pub fn unit_resultants(fac: &LocalFactorization) -> Vec<FFElem> {
    let residues: Vec<Poly> = fac.factors.iter().map(|x| x.residue(&fac.field)).collect();
    (0..residues.len())
        .map(|i| {
            let cof = residues
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Poly::one(&fac.field), |acc, (_, r)| &acc * r);
            residues[i].resultant(&cof)
        })
        .collect()
}

/// True iff every Res(f_i, M/f_i) is a unit at the place.
pub fn pairwise_unit_resultants(fac: &LocalFactorization) -> bool {
    unit_resultants(fac).iter().all(|r| !r.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_ring::parse_apoly;

    fn cp(f: &Arc<FieldSpec>, c: &[&str]) -> CharPoly {
        CharPoly::new(c.iter().map(|s| parse_apoly(f, s, 'T').unwrap()).collect()).unwrap()
    }

    fn place_t(f: &Arc<FieldSpec>) -> Place {
        Place::finite(parse_apoly(f, "T", 'T').unwrap()).unwrap()
    }

    #[test]
    fn fixture_at_t() {
        let f = FieldSpec::prime(5).unwrap();
        let m = cp(&f, &["T^2", "1+T", "3", "1"]);
        let fac = factor_local(&m, &place_t(&f), 2).unwrap();
        assert_eq!(fac.factors.len(), 2);
        let tags: Vec<(usize, usize)> = fac.factors.iter().map(|x| (x.e, x.f)).collect();
        assert_eq!(tags, vec![(1, 1), (2, 1)]);
        assert!(pairwise_unit_resultants(&fac));
        assert_eq!(
            fac.reassemble(),
            m.coeffs()
                .iter()
                .map(|c| pad(c.coeffs().to_vec(), 2))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn fixture_at_infinity() {
        let f = FieldSpec::prime(5).unwrap();
        // M_0 written in u
        let m0 = cp(&f, &["T", "T^2+T", "3*T", "1"]);
        let fac = factor_local(&m0, &Place::Infinity, 3).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!((fac.factors[0].e, fac.factors[0].f), (3, 1));
    }

    #[test]
    fn totally_ramified_quadratic() {
        let f = FieldSpec::prime(5).unwrap();
        let m = cp(&f, &["-T", "0", "1"]);
        let fac = factor_local(&m, &place_t(&f), 3).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!((fac.factors[0].e, fac.factors[0].f), (2, 1));
        let np = newton_polygon(&m, &place_t(&f));
        assert_eq!(
            np.segments,
            vec![Segment {
                slope_num: -1,
                slope_den: 2,
                length: 2
            }]
        );
    }

    #[test]
    fn split_quartic_needs_ramified_refinement() {
        // (x^2 - T)(x^2 - 4T) = x^4 - 5T x^2 + 4T^2 = x^4 + 4T^2 over F_5
        let f = FieldSpec::prime(5).unwrap();
        let m = cp(&f, &["4*T^2+T^3", "0", "0", "0", "1"]);
        let fac = factor_local(&m, &place_t(&f), 6).unwrap();
        assert_eq!(fac.degree_sum(), 4);
        let expect = m
            .coeffs()
            .iter()
            .map(|c| pad(c.coeffs().to_vec(), 6))
            .collect::<Vec<_>>();
        assert_eq!(fac.reassemble(), expect);
    }

    #[test]
    fn degree_two_place() {
        let f = FieldSpec::prime(5).unwrap();
        let pv = Place::finite(parse_apoly(&f, "T^2+2", 'T').unwrap()).unwrap();
        // x^2 - (T^2+2) is Eisenstein at p_v
        let m = cp(&f, &["-T^2-2", "0", "1"]);
        let fac = factor_local(&m, &pv, 4).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!((fac.factors[0].e, fac.factors[0].f), (2, 1));
        // x^2 - T splits into two conjugate... or stays inert depending on T being a square mod p_v
        let m2 = cp(&f, &["-T", "0", "1"]);
        let fac2 = factor_local(&m2, &pv, 4).unwrap();
        assert_eq!(fac2.degree_sum(), 2);
    }
}
