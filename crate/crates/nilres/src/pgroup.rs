//! Finite p-group utilities on top of pc presentations with power
//! relations: recognition, basic statistics, and the order-p central
//! subgroups ("lines") used to walk down chief series.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcp::{Element, PcPresentation};
use crate::section::AbelianSection;
use crate::structure::{self, center_mod};
use crate::subgroup::{Closure, SubgroupBasis};
use crate::zlin;

/// If the presentation defines a finite p-group, return (p, n) with
/// order p^n.
pub fn p_group_order(p: &PcPresentation) -> Option<(BigInt, u32)> {
    let order = p.order()?;
    if order.is_one() {
        return None;
    }
    let mut prime = None;
    let mut n = 0u32;
    let mut rem = order;
    // factor out the smallest prime of the first nontrivial relation
    for i in 0..p.rank() {
        if let Some(pr) = p.power_relation(i) {
            if pr.exponent.is_one() {
                continue;
            }
            let e = pr.exponent.magnitude().clone();
            let mut q = BigUint::from(2u32);
            while &q * &q <= e {
                if (&e % &q).is_zero() {
                    break;
                }
                q += BigUint::one();
            }
            let q = if (&e % &q).is_zero() { q } else { e };
            prime = Some(q);
            break;
        }
    }
    let prime = prime?;
    while (&rem % &prime).is_zero() {
        rem /= &prime;
        n += 1;
    }
    if rem.is_one() {
        Some((BigInt::from(prime), n))
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupStats {
    pub order: String,
    pub nilpotency_class: usize,
    pub is_abelian: bool,
    /// None when the order exceeds the enumeration cap; then only the
    /// lcm of the generator orders is reported below.
    pub exponent: Option<String>,
    pub exponent_lower_bound: String,
    pub center_invariant_factors: Vec<String>,
}

/// Order of g in a finite p-group by repeated p-th powering.
pub fn element_order_p(p: &PcPresentation, prime: &BigInt, g: &Element) -> BigUint {
    let mut ord = BigUint::one();
    let mut g = g.clone();
    while !g.is_identity() {
        g = p.power(&g, prime);
        ord *= prime.magnitude();
    }
    ord
}

/// Enumerate all elements of a finite presentation (order must be <= cap).
pub fn enumerate_elements(p: &PcPresentation, cap: usize) -> Result<Vec<Element>> {
    let order = p
        .order()
        .ok_or_else(|| Error::input("enumeration requires a finite group"))?;
    let n = order
        .to_usize()
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::resource(format!("group order {} exceeds cap {}", order, cap)))?;
    let radii: Vec<BigInt> = (0..p.rank())
        .map(|i| p.power_relation(i).unwrap().exponent.clone())
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut coords = vec![BigInt::zero(); p.rank()];
    loop {
        out.push(Element { coords: coords.clone() });
        let mut i = 0;
        loop {
            if i == p.rank() {
                return Ok(out);
            }
            coords[i] += 1;
            if coords[i] < radii[i] {
                break;
            }
            coords[i] = BigInt::zero();
            i += 1;
        }
    }
}

pub fn group_stats(p: &PcPresentation, cap: usize) -> Result<GroupStats> {
    let (prime, _) = p_group_order(p)
        .ok_or_else(|| Error::input("not a finite p-group presentation"))?;
    let order = p.order().expect("finite");
    let class = structure::nilpotency_class(p);
    // generator orders always give a lower bound; it can be strict
    let mut lb = BigUint::one();
    for i in 0..p.rank() {
        let o = element_order_p(p, &prime, &p.generator(i));
        lb = lb.lcm(&o);
    }
    let exponent = match enumerate_elements(p, cap) {
        Ok(all) => {
            let mut e = BigUint::one();
            for g in &all {
                e = e.lcm(&element_order_p(p, &prime, g));
            }
            Some(e.to_string())
        }
        Err(_) => None,
    };
    let z = center_mod(p, &SubgroupBasis::trivial(p))?;
    let zsec = AbelianSection::new(p, &z, &SubgroupBasis::trivial(p))?;
    let center_invariant_factors = zsec
        .invariant_factors()
        .iter()
        .map(|f| f.to_string())
        .collect();
    Ok(GroupStats {
        order: order.to_string(),
        nilpotency_class: class,
        is_abelian: class <= 1,
        exponent,
        exponent_lower_bound: lb.to_string(),
        center_invariant_factors,
    })
}

/// One representative per order-p central subgroup of G/K, returned as
/// ambient elements. K must be normal with G/K a finite p-group.
pub fn central_lines_mod(
    p: &PcPresentation,
    k: &SubgroupBasis,
    prime: &BigInt,
) -> Result<Vec<Element>> {
    let lcs = structure::lower_central_series(p);
    central_lines_mod_with(p, &lcs, k, prime)
}

/// central_lines_mod with a precomputed lower central series.
pub fn central_lines_mod_with(
    p: &PcPresentation,
    lcs: &[SubgroupBasis],
    k: &SubgroupBasis,
    prime: &BigInt,
) -> Result<Vec<Element>> {
    let zc = structure::center_mod_with(p, lcs, k)?;
    let sec = AbelianSection::new(p, &zc, k)?;
    let t = sec.rank();
    // socle: images v with p*v in the relation lattice
    let socle = zlin::preimage_scale(prime, &sec.rel, t);
    // greedy F_p basis of socle / rel
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    let mut span: Vec<Vec<BigInt>> = sec.rel.clone();
    for v in &socle {
        if !zlin::lattice_member(&span, v) {
            basis.push(v.clone());
            span.push(v.clone());
        }
    }
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let pu = prime
        .to_usize()
        .ok_or_else(|| Error::resource("prime too large for line enumeration"))?;
    // projective reps: first nonzero coefficient equal to 1
    let mut lines = Vec::new();
    let mut coeffs = vec![0usize; d];
    loop {
        // advance mixed-radix
        let mut i = 0;
        loop {
            if i == d {
                return Ok(lines);
            }
            coeffs[i] += 1;
            if coeffs[i] < pu {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
        let lead = coeffs.iter().rposition(|&c| c != 0).unwrap();
        if coeffs[lead] != 1 {
            continue;
        }
        let mut v = vec![BigInt::zero(); t];
        for (ci, b) in coeffs.iter().zip(basis.iter()) {
            if *ci != 0 {
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x += y * BigInt::from(*ci);
                }
            }
        }
        let g = sec.element_from(p, &v);
        if !k.member(p, &g) {
            lines.push(g);
        }
    }
}

/// Expected number of lines: (p^d - 1)/(p - 1) for a socle of rank d.
pub fn line_count(prime: &BigInt, d: u32) -> BigUint {
    let pm = prime.magnitude();
    (pm.pow(d) - BigUint::one()) / (pm - BigUint::one())
}

/// Central lines of a finite p-group presentation itself.
pub fn central_lines(p: &PcPresentation) -> Result<Vec<Element>> {
    let (prime, _) = p_group_order(p)
        .ok_or_else(|| Error::input("not a finite p-group presentation"))?;
    central_lines_mod(p, &SubgroupBasis::trivial(p), &prime)
}

/// Quotient of a finite p-group by the central line spanned by z.
pub fn quotient_by_central_line(
    p: &PcPresentation,
    z: &Element,
) -> Result<PcPresentation> {
    let k = SubgroupBasis::from_generators(p, &[z.clone()], Closure::Normal);
    let zc = center_mod(p, &SubgroupBasis::trivial(p))?;
    if !zc.member(p, z) {
        return Err(Error::input("element is not central"));
    }
    let (q, _) = structure::quotient_presentation(p, &k)?;
    Ok(q)
}

#[cfg(test)]
mod pgroup_tests {
    use super::*;
    use crate::structure::power_subgroup_closure;
    use crate::word::Word;

    fn heisenberg() -> PcPresentation {
        PcPresentation::new(
            vec!["x1".into(), "x2".into(), "x3".into()],
            vec![1, 1, 2],
            vec![(0, 1, Word::gen(2, 1))],
            vec![None, None, None],
        )
        .unwrap()
    }

    fn heis_mod(q: u32) -> PcPresentation {
        let p = heisenberg();
        let k = power_subgroup_closure(&p, &BigInt::from(q), None);
        structure::quotient_presentation(&p, &k).unwrap().0
    }

    #[test]
    fn recognize_p_group() {
        let q = heis_mod(5);
        assert_eq!(p_group_order(&q), Some((BigInt::from(5), 3)));
    }

    #[test]
    fn stats_heis_mod_3() {
        let q = heis_mod(3);
        let s = group_stats(&q, 10_000).unwrap();
        assert_eq!(s.order, "27");
        assert_eq!(s.nilpotency_class, 2);
        assert!(!s.is_abelian);
        // extraspecial 3^{1+2} of exponent 3
        assert_eq!(s.exponent.as_deref(), Some("3"));
        assert_eq!(s.center_invariant_factors, vec!["3".to_string()]);
    }

    #[test]
    fn stats_heis_mod_2_exponent_4() {
        // dihedral of order 8: generators have order 2 in the pc sequence
        // sense but the exponent is 4
        let q = heis_mod(2);
        let s = group_stats(&q, 10_000).unwrap();
        assert_eq!(s.order, "8");
        assert_eq!(s.exponent.as_deref(), Some("4"));
    }

    #[test]
    fn lines_of_heis_mod_p() {
        // Z(Heis mod p) = <x3> of order p: exactly one line
        for q in [3u32, 5, 7] {
            let g = heis_mod(q);
            let lines = central_lines(&g).unwrap();
            assert_eq!(lines.len(), 1);
        }
        // elementary abelian (Z/3)^2: (9-1)/(3-1) = 4 lines
        let p = PcPresentation::new(
            vec!["a".into(), "b".into()],
            vec![1, 1],
            vec![],
            vec![
                Some(crate::pcp::PowerRelation { exponent: BigInt::from(3), tail: Word::empty() }),
                Some(crate::pcp::PowerRelation { exponent: BigInt::from(3), tail: Word::empty() }),
            ],
        )
        .unwrap();
        let lines = central_lines(&p).unwrap();
        assert_eq!(lines.len(), 4);
        assert_eq!(line_count(&BigInt::from(3), 2), BigUint::from(4u32));
    }

    #[test]
    fn central_line_quotient() {
        let g = heis_mod(5);
        let lines = central_lines(&g).unwrap();
        let q = quotient_by_central_line(&g, &lines[0]).unwrap();
        assert_eq!(q.order(), Some(BigUint::from(25u32)));
        assert!(q.consistency_check().is_empty());
    }
}
