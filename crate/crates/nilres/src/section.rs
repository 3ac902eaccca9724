//! Abelian sections A/B of a pc-presented group, presented as a finitely
//! generated abelian group Z^t / R where t is the number of rows of A and
//! R is the relation lattice.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pcp::{Element, PcPresentation};
use crate::subgroup::SubgroupBasis;
use crate::zlin::{self, Mat};

#[derive(Debug, Clone)]
pub struct AbelianSection {
    pub basis: Vec<Element>,
    a: SubgroupBasis,
    pub rel: Mat,
}

impl AbelianSection {
    /// Requires B <= A with [A, A] <= B (so A/B is abelian); validated.
    pub fn new(p: &PcPresentation, a: &SubgroupBasis, b: &SubgroupBasis) -> Result<Self> {
        if !a.contains(p, b) {
            return Err(Error::input("section: B is not contained in A"));
        }
        let basis: Vec<Element> = a.rows().into_iter().cloned().collect();
        let t = basis.len();
        let coords_in_a = |g: &Element| -> Result<Vec<BigInt>> {
            a.decompose(p, g)
                .ok_or_else(|| Error::inconsistent("section coordinate outside A"))
        };
        let mut rel: Mat = Vec::new();
        // commutators of basis pairs must die in A/B
        for i in 0..t {
            for j in (i + 1)..t {
                let c = p.commutator(&basis[i], &basis[j]);
                if !b.member(p, &c) {
                    return Err(Error::input("section: A/B is not abelian"));
                }
                let v = coords_in_a(&c)?;
                if v.iter().any(|x| !x.is_zero()) {
                    rel.push(v);
                }
            }
        }
        // torsion of the rows themselves (finite ambient coordinates)
        if let Some(orders) = a.relative_orders(p) {
            for (i, o) in orders.iter().enumerate() {
                let pw = p.power(&basis[i], o);
                let d = coords_in_a(&pw)?;
                let mut v: Vec<BigInt> = d.iter().map(|x| -x).collect();
                v[i] += o;
                rel.push(v);
            }
        }
        // B's rows
        for r in b.rows() {
            let v = coords_in_a(r)?;
            rel.push(v);
        }
        if rel.is_empty() {
            rel.push(vec![BigInt::zero(); t]);
        }
        Ok(AbelianSection { basis, a: a.clone(), rel, })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of g in Z^t (defined modulo rel); error if g is not in A.
    pub fn coords(&self, p: &PcPresentation, g: &Element) -> Result<Vec<BigInt>> {
        self.a
            .decompose(p, g)
            .ok_or_else(|| Error::input("element not in the section's numerator"))
    }

    pub fn element_from(&self, p: &PcPresentation, e: &[BigInt]) -> Element {
        let mut acc = p.identity();
        for (b, x) in self.basis.iter().zip(e.iter()) {
            if !x.is_zero() {
                acc = p.multiply(&acc, &p.power(b, x));
            }
        }
        acc
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        zlin::invariant_factors(&self.rel, self.rank())
    }

    /// |A/B|; None if infinite.
    pub fn order(&self) -> Option<BigUint> {
        let mut o = BigUint::one();
        for f in self.invariant_factors() {
            if f.is_zero() {
                return None;
            }
            o *= f.magnitude();
        }
        Some(o)
    }

    /// Order of the image of g in A/B; None if infinite.
    pub fn element_order(&self, p: &PcPresentation, g: &Element) -> Result<Option<BigInt>> {
        let v = self.coords(p, g)?;
        Ok(zlin::vector_order_mod(&self.rel, &v))
    }

    /// True when the image of g in A/B is trivial.
    pub fn is_trivial_image(&self, p: &PcPresentation, g: &Element) -> Result<bool> {
        let v = self.coords(p, g)?;
        Ok(zlin::lattice_member(&self.rel, &v))
    }
}

/// Nonnegative p-adic valuation of a nonzero integer.
pub fn p_valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod section_tests {
    use super::*;
    use crate::subgroup::Closure;
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

    fn elem(coords: &[i64]) -> Element {
        Element { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
    }

    #[test]
    fn abelianization_of_heisenberg() {
        let p = heisenberg();
        let a = SubgroupBasis::full(&p);
        let b = SubgroupBasis::from_generators(&p, &[elem(&[0, 0, 1])], Closure::Normal);
        let s = AbelianSection::new(&p, &a, &b).unwrap();
        assert_eq!(s.rank(), 3);
        assert_eq!(s.order(), None); // Z^2
        let fac = s.invariant_factors();
        // smith form of the relation lattice: one factor 1, two factors 0
        assert_eq!(fac.iter().filter(|f| f.is_zero()).count(), 2);
        assert!(s.is_trivial_image(&p, &elem(&[0, 0, 7])).unwrap());
        assert!(!s.is_trivial_image(&p, &elem(&[1, 0, 0])).unwrap());
        assert_eq!(
            s.element_order(&p, &elem(&[1, 2, 0])).unwrap(),
            None // infinite order in Z^2
        );
    }

    #[test]
    fn mod_p_section_orders() {
        let p = heisenberg();
        let a = SubgroupBasis::full(&p);
        // kernel of the map onto (Z/3)^2
        let b = SubgroupBasis::from_generators(
            &p,
            &[elem(&[3, 0, 0]), elem(&[0, 3, 0]), elem(&[0, 0, 1])],
            Closure::Normal,
        );
        let s = AbelianSection::new(&p, &a, &b).unwrap();
        assert_eq!(s.order(), Some(BigUint::from(9u32)));
        assert_eq!(
            s.element_order(&p, &elem(&[1, 0, 0])).unwrap(),
            Some(BigInt::from(3))
        );
        assert_eq!(
            s.element_order(&p, &elem(&[1, 2, 5])).unwrap(),
            Some(BigInt::from(3))
        );
    }

    #[test]
    fn central_section_gamma2() {
        let p = heisenberg();
        let a = SubgroupBasis::from_generators(&p, &[elem(&[0, 0, 1])], Closure::Normal);
        let b = SubgroupBasis::trivial(&p);
        let s = AbelianSection::new(&p, &a, &b).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.order(), None);
        assert_eq!(s.coords(&p, &elem(&[0, 0, 5])).unwrap(), vec![BigInt::from(5)]);
    }

    #[test]
    fn rejects_nonabelian_section() {
        let p = heisenberg();
        let a = SubgroupBasis::full(&p);
        let b = SubgroupBasis::trivial(&p);
        assert!(AbelianSection::new(&p, &a, &b).is_err());
    }
}
