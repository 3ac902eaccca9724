//! Echelonized generating sequences for subgroups of a pc-presented group.
//!
//! A subgroup is stored as at most one row per lead position (the index of
//! the first nonzero coordinate). After closure the rows form an induced
//! sequence: the subgroup is exactly the set of ordered products of row
//! powers, so membership and canonical coset representatives come from a
//! sequential division. Works uniformly for torsion-free presentations and
//! presentations with power relations (finite groups); in the latter case
//! lead coefficients are normalized to divisors of the relative orders.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pcp::{Element, PcPresentation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupBasis {
    rows: Vec<Option<Element>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// close under conjugation among the rows (subgroup generation)
    Subgroup,
    /// additionally close under conjugation by all group generators
    Normal,
}

fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let eg = a.extended_gcd(m);
    if !eg.gcd.is_one() {
        return None;
    }
    Some(eg.x.mod_floor(m))
}

impl SubgroupBasis {
    pub fn trivial(p: &PcPresentation) -> Self {
        SubgroupBasis { rows: vec![None; p.rank()] }
    }

    pub fn full(p: &PcPresentation) -> Self {
        let rows = (0..p.rank())
            .map(|i| {
                let g = p.generator(i);
                if g.is_identity() {
                    None
                } else {
                    Some(g)
                }
            })
            .collect();
        SubgroupBasis { rows }
    }

    pub fn from_generators(
        p: &PcPresentation,
        gens: &[Element],
        kind: Closure,
    ) -> Self {
        let mut s = SubgroupBasis::trivial(p);
        for g in gens {
            s.insert(p, g.clone());
        }
        s.close(p, kind);
        s.canonicalize(p);
        s
    }

    pub fn rows(&self) -> Vec<&Element> {
        self.rows.iter().flatten().collect()
    }

    pub fn row_at(&self, l: usize) -> Option<&Element> {
        self.rows[l].as_ref()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_rows() == 0
    }

    /// Echelon insertion; returns true if the basis changed. The generated
    /// subgroup afterwards contains the old one and g; closure properties
    /// must be re-established by the caller when rows changed.
    pub fn insert(&mut self, p: &PcPresentation, g: Element) -> bool {
        let mut changed = false;
        let mut queue = vec![g];
        while let Some(mut g) = queue.pop() {
            loop {
                if g.is_identity() {
                    break;
                }
                let l = g.lead().expect("nonidentity");
                let ml = p.power_relation(l).map(|pr| pr.exponent.clone());
                if self.rows[l].is_none() {
                    match &ml {
                        None => {
                            if g.coords[l].is_negative() {
                                g = p.invert(&g);
                            }
                            self.rows[l] = Some(g);
                        }
                        Some(m) => {
                            let d0 = g.coords[l].clone();
                            let d = d0.gcd(m);
                            let r_new = if d != d0 {
                                let a = modinv(&(&d0 / &d), &(m / &d))
                                    .expect("invertible by construction");
                                let r = p.power(&g, &a);
                                debug_assert_eq!(r.coords[l], d);
                                // g itself still needs to be representable
                                queue.push(g);
                                r
                            } else {
                                g
                            };
                            // wraparound: r^{m/d} lies deeper
                            let wrap = p.power(&r_new, &(m / &d));
                            self.rows[l] = Some(r_new);
                            if !wrap.is_identity() {
                                queue.push(wrap);
                            }
                        }
                    }
                    changed = true;
                    break;
                }
                let r = self.rows[l].clone().expect("checked");
                let rl = r.coords[l].clone();
                let gl = g.coords[l].clone();
                if (&gl % &rl).is_zero() {
                    let q = &gl / &rl;
                    let rq = p.power(&r, &-q);
                    g = p.multiply(&rq, &g);
                    debug_assert!(g.coords[l].is_zero());
                    continue;
                }
                match &ml {
                    None => {
                        // Euclidean step: shrink the lead coefficient and swap
                        let q = gl.div_floor(&rl);
                        let rq = p.power(&r, &-q);
                        let g2 = p.multiply(&rq, &g);
                        self.rows[l] = None;
                        queue.push(r);
                        g = g2;
                        changed = true;
                        continue;
                    }
                    Some(_) => {
                        // combine to an element with lead gcd(gl, rl)
                        let eg = gl.extended_gcd(&rl);
                        let ga = p.power(&g, &eg.x);
                        let rb = p.power(&r, &eg.y);
                        let comb = p.multiply(&ga, &rb);
                        self.rows[l] = None;
                        queue.push(r);
                        queue.push(g);
                        g = comb;
                        changed = true;
                        continue;
                    }
                }
            }
        }
        changed
    }

    pub fn close(&mut self, p: &PcPresentation, kind: Closure) {
        loop {
            let mut changed = false;
            let rows: Vec<Element> = self.rows().into_iter().cloned().collect();
            for a in &rows {
                for b in &rows {
                    if a == b {
                        continue;
                    }
                    let c1 = p.conjugate(b, a);
                    if !self.member(p, &c1) {
                        changed |= self.insert(p, c1);
                    }
                    let ia = p.invert(a);
                    let c2 = p.conjugate(b, &ia);
                    if !self.member(p, &c2) {
                        changed |= self.insert(p, c2);
                    }
                }
            }
            if kind == Closure::Normal {
                let rows: Vec<Element> = self.rows().into_iter().cloned().collect();
                for r in &rows {
                    for i in 0..p.rank() {
                        for e in [1i32, -1] {
                            let x = p.gen_pow(i, &BigInt::from(e));
                            if x.is_identity() {
                                continue;
                            }
                            let c = p.conjugate(r, &x);
                            if !self.member(p, &c) {
                                changed |= self.insert(p, c);
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Canonical coset representative: divide g by the rows left to right.
    pub fn reduce(&self, p: &PcPresentation, g: &Element) -> Element {
        let mut g = g.clone();
        for l in 0..p.rank() {
            if g.coords[l].is_zero() {
                continue;
            }
            if let Some(r) = &self.rows[l] {
                let q = g.coords[l].div_floor(&r.coords[l]);
                if !q.is_zero() {
                    let rq = p.power(r, &-q);
                    g = p.multiply(&rq, &g);
                }
            }
        }
        g
    }

    pub fn member(&self, p: &PcPresentation, g: &Element) -> bool {
        self.reduce(p, g).is_identity()
    }

    /// Exponents of g over the rows (ascending lead order); None if g is not
    /// a member.
    pub fn decompose(&self, p: &PcPresentation, g: &Element) -> Option<Vec<BigInt>> {
        let mut g = g.clone();
        let mut out = Vec::new();
        for l in 0..p.rank() {
            if let Some(r) = &self.rows[l] {
                let q = if g.coords[l].is_zero() {
                    BigInt::zero()
                } else {
                    g.coords[l].div_floor(&r.coords[l])
                };
                if !q.is_zero() {
                    let rq = p.power(r, &-q.clone());
                    g = p.multiply(&rq, &g);
                }
                if !g.coords[l].is_zero() {
                    return None;
                }
                out.push(q);
            } else if !g.coords[l].is_zero() {
                return None;
            }
        }
        if g.is_identity() {
            Some(out)
        } else {
            None
        }
    }

    /// Reduce each row's coordinates at later lead positions; rows become
    /// the unique canonical representatives and the basis a canonical key
    /// for the subgroup.
    pub fn canonicalize(&mut self, p: &PcPresentation) {
        let leads: Vec<usize> = (0..p.rank()).filter(|&l| self.rows[l].is_some()).collect();
        for &l in &leads {
            let mut row = self.rows[l].clone().expect("present");
            for &l2 in &leads {
                if l2 <= l {
                    continue;
                }
                let r2 = self.rows[l2].clone().expect("present");
                let q = row.coords[l2].div_floor(&r2.coords[l2]);
                if !q.is_zero() {
                    let rq = p.power(&r2, &-q);
                    row = p.multiply(&row, &rq);
                }
            }
            self.rows[l] = Some(row);
        }
    }

    /// Canonical key for memoization / equality.
    pub fn key(&self, p: &PcPresentation) -> Vec<(usize, Vec<BigInt>)> {
        let mut c = self.clone();
        c.canonicalize(p);
        (0..p.rank())
            .filter_map(|l| c.rows[l].as_ref().map(|r| (l, r.coords.clone())))
            .collect()
    }

    pub fn eq_subgroup(&self, p: &PcPresentation, other: &SubgroupBasis) -> bool {
        self.key(p) == other.key(p)
    }

    pub fn contains(&self, p: &PcPresentation, other: &SubgroupBasis) -> bool {
        other.rows().iter().all(|r| self.member(p, r))
    }

    pub fn join(
        &self,
        p: &PcPresentation,
        extra: &[Element],
        kind: Closure,
    ) -> SubgroupBasis {
        let mut s = self.clone();
        for g in extra {
            s.insert(p, g.clone());
        }
        s.close(p, kind);
        s.canonicalize(p);
        s
    }

    pub fn is_normal(&self, p: &PcPresentation) -> bool {
        for r in self.rows() {
            for i in 0..p.rank() {
                for e in [1i32, -1] {
                    let x = p.gen_pow(i, &BigInt::from(e));
                    if x.is_identity() {
                        continue;
                    }
                    if !self.member(p, &p.conjugate(r, &x)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Index in the ambient group; None when infinite.
    pub fn index(&self, p: &PcPresentation) -> Option<BigUint> {
        let mut idx = BigUint::one();
        for l in 0..p.rank() {
            match (&self.rows[l], p.power_relation(l)) {
                (Some(r), _) => idx *= r.coords[l].magnitude(),
                (None, Some(pr)) => idx *= pr.exponent.magnitude(),
                (None, None) => return None,
            }
        }
        Some(idx)
    }

    /// Order of the subgroup itself; None when infinite.
    pub fn order(&self, p: &PcPresentation) -> Option<BigUint> {
        let mut o = BigUint::one();
        for l in 0..p.rank() {
            if let Some(r) = &self.rows[l] {
                match p.power_relation(l) {
                    Some(pr) => {
                        let m = pr.exponent.magnitude();
                        let d = r.coords[l].magnitude();
                        o *= m / d;
                    }
                    None => return None,
                }
            }
        }
        Some(o)
    }

    /// Relative order of each row in the finite case: m_l / lead.
    pub fn relative_orders(&self, p: &PcPresentation) -> Option<Vec<BigInt>> {
        let mut out = Vec::new();
        for l in 0..p.rank() {
            if let Some(r) = &self.rows[l] {
                match p.power_relation(l) {
                    Some(pr) => out.push(&pr.exponent / &r.coords[l]),
                    None => return None,
                }
            }
        }
        Some(out)
    }

    pub fn error_if_not_normal(&self, p: &PcPresentation) -> Result<()> {
        if self.is_normal(p) {
            Ok(())
        } else {
            Err(Error::input("subgroup is not normal"))
        }
    }
}

#[cfg(test)]
mod subgroup_tests {
    use super::*;
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

    fn elem(_p: &PcPresentation, coords: &[i64]) -> Element {
        Element { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
    }

    #[test]
    fn heisenberg_power_closure_shape() {
        let p = heisenberg();
        // normal closure of the cubes <x1^3, x2^3, x3^3>: picks up
        // [x1^3, x2] = x3^3, so the echelon is (3,0,0),(0,3,0),(0,0,3)
        let gens = vec![elem(&p, &[3, 0, 0]), elem(&p, &[0, 3, 0]), elem(&p, &[0, 0, 3])];
        let s = SubgroupBasis::from_generators(&p, &gens, Closure::Normal);
        assert_eq!(s.index(&p), Some(BigUint::from(27u32)));
        assert!(s.member(&p, &elem(&p, &[3, 3, 0])));
        assert!(!s.member(&p, &elem(&p, &[1, 0, 0])));
        assert!(!s.member(&p, &elem(&p, &[0, 0, 1])));
        assert!(s.is_normal(&p));
    }

    #[test]
    fn commutator_subgroup_of_heisenberg() {
        let p = heisenberg();
        let mut comms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let c = p.commutator(&p.generator(i), &p.generator(j));
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        let s = SubgroupBasis::from_generators(&p, &comms, Closure::Normal);
        assert_eq!(s.num_rows(), 1);
        assert!(s.member(&p, &elem(&p, &[0, 0, 1])));
    }

    #[test]
    fn euclid_on_leads() {
        let p = heisenberg();
        // <x3^4, x3^6> = <x3^2>
        let s = SubgroupBasis::from_generators(
            &p,
            &[elem(&p, &[0, 0, 4]), elem(&p, &[0, 0, 6])],
            Closure::Subgroup,
        );
        let rows = s.rows();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].coords[2], BigInt::from(2));
    }

    #[test]
    fn decompose_roundtrip() {
        let p = heisenberg();
        let gens = vec![elem(&p, &[2, 0, 0]), elem(&p, &[0, 2, 0])];
        let s = SubgroupBasis::from_generators(&p, &gens, Closure::Normal);
        let g = elem(&p, &[4, 2, 6]);
        if let Some(exps) = s.decompose(&p, &g) {
            // rebuild the ordered product of row powers
            let mut acc = p.identity();
            for (r, e) in s.rows().iter().zip(exps.iter()) {
                let rp = p.power(r, e);
                acc = p.multiply(&acc, &rp);
            }
            assert_eq!(acc, g);
        }
    }

    #[test]
    fn finite_ambient_insert_normalizes_leads() {
        // Z/5 with generator g: the subgroup <g^2> is everything
        use crate::pcp::PowerRelation;
        let p = PcPresentation::new(
            vec!["g".into()],
            vec![1],
            vec![],
            vec![Some(PowerRelation { exponent: BigInt::from(5), tail: Word::empty() })],
        )
        .unwrap();
        let two = p.gen_pow(0, &BigInt::from(2));
        let s = SubgroupBasis::from_generators(&p, &[two], Closure::Subgroup);
        assert_eq!(s.order(&p), Some(BigUint::from(5u32)));
        assert!(s.member(&p, &p.generator(0)));
    }

    #[test]
    fn finite_ambient_proper_subgroup() {
        use crate::pcp::PowerRelation;
        // Z/8: <g^2> has order 4, index 2
        let p = PcPresentation::new(
            vec!["g".into()],
            vec![1],
            vec![],
            vec![Some(PowerRelation { exponent: BigInt::from(8), tail: Word::empty() })],
        )
        .unwrap();
        let two = p.gen_pow(0, &BigInt::from(2));
        let s = SubgroupBasis::from_generators(&p, &[two], Closure::Subgroup);
        assert_eq!(s.order(&p), Some(BigUint::from(4u32)));
        assert_eq!(s.index(&p), Some(BigUint::from(2u32)));
        assert!(!s.member(&p, &p.generator(0)));
    }
}
