use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::word::Word;

/// Power relation x_i^m = tail, with tail a word over generators of larger
/// index. m >= 1; m = 1 means the generator is trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerRelation {
    pub exponent: BigInt,
    pub tail: Word,
}

/// Element in normal form: the exponent vector of x_1^{a_1} ... x_h^{a_h}.
/// When power relations are present, each coordinate lies in [0, m_i).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub coords: Vec<BigInt>,
}

impl Element {
    pub fn identity(rank: usize) -> Self {
        Element { coords: vec![BigInt::zero(); rank] }
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coordinate.
    pub fn lead(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }
}

/// A weighted polycyclic (Mal'tsev-style) presentation. Conjugation
/// relations are stored as the commutators [x_i, x_j] for i < j, each a word
/// over generators of index > j. Optional power relations make individual
/// generators torsion; all-torsion presentations describe finite groups.
#[derive(Debug, Clone)]
pub struct PcPresentation {
    names: Vec<String>,
    weights: Vec<u32>,
    comm: Vec<Vec<Word>>, // comm[i][j - i - 1] = [x_i, x_j] for i < j
    pow: Vec<Option<PowerRelation>>,
    // precomputed conjugation data
    sigma: Vec<Vec<Element>>,     // sigma[j][k] = x_j^{-1} x_k x_j
    sigma_inv: Vec<Vec<Element>>, // sigma_inv[j][k] = x_j x_k x_j^{-1}
    sigma_trivial: Vec<bool>,
    pow_tail: Vec<Option<Element>>,
    comm_elem: Vec<Vec<Element>>, // normal form of comm[i][j]
}

impl PcPresentation {
    /// Build a presentation and precompute conjugation tables. Shape
    /// requirements are enforced here; use `consistency_check` to confirm the
    /// relations define a group of the expected size.
    pub fn new(
        names: Vec<String>,
        weights: Vec<u32>,
        comm_entries: Vec<(usize, usize, Word)>,
        pow: Vec<Option<PowerRelation>>,
    ) -> Result<Self> {
        let h = names.len();
        if weights.len() != h || pow.len() != h {
            return Err(Error::input("mismatched generator data lengths"));
        }
        if h == 0 {
            return Err(Error::input("presentation needs at least one generator"));
        }
        for w in weights.windows(2) {
            if w[1] < w[0] {
                return Err(Error::input("generator weights must be nondecreasing"));
            }
        }
        if weights[0] != 1 {
            return Err(Error::input("first generator must have weight 1"));
        }
        let mut comm: Vec<Vec<Word>> = (0..h)
            .map(|i| vec![Word::empty(); h - i - 1])
            .collect();
        for (i, j, w) in comm_entries {
            if i >= j || j >= h {
                return Err(Error::input(format!(
                    "commutator relation indices out of range: ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            for (g, _) in w.letters() {
                if *g <= j || *g >= h {
                    return Err(Error::input(format!(
                        "[{}({})] commutator word must use generators of index > {}",
                        names[i],
                        names[j],
                        j + 1
                    )));
                }
                if weights[*g] < weights[i] + weights[j] {
                    return Err(Error::input(format!(
                        "ill-weighted relation: [{}, {}] mentions {} of weight {} < {}",
                        names[i],
                        names[j],
                        names[*g],
                        weights[*g],
                        weights[i] + weights[j]
                    )));
                }
            }
            comm[i][j - i - 1] = w;
        }
        for (i, pr) in pow.iter().enumerate() {
            if let Some(pr) = pr {
                if pr.exponent < BigInt::one() {
                    return Err(Error::input("power relation exponent must be >= 1"));
                }
                for (g, _) in pr.tail.letters() {
                    if *g <= i || *g >= h {
                        return Err(Error::input(
                            "power relation tail must use generators of larger index",
                        ));
                    }
                }
            }
        }
        let mut p = PcPresentation {
            names,
            weights,
            comm,
            pow,
            sigma: vec![Vec::new(); h],
            sigma_inv: vec![Vec::new(); h],
            sigma_trivial: vec![true; h],
            pow_tail: vec![None; h],
            comm_elem: (0..h).map(|i| vec![Element::identity(h); h - i - 1]).collect(),
        };
        p.precompute()?;
        Ok(p)
    }

    fn precompute(&mut self) -> Result<()> {
        let h = self.rank();
        // Identity maps as a safe default; filled from the bottom level up so
        // every multiplication only touches levels that are already complete.
        for j in 0..h {
            self.sigma[j] = (0..h).map(|k| self.generator(k)).collect();
            self.sigma_inv[j] = (0..h).map(|k| self.generator(k)).collect();
            self.sigma_trivial[j] = self.comm[j].iter().all(|w| w.is_empty());
        }
        for level in (0..h).rev() {
            if let Some(pr) = self.pow[level].clone() {
                let t = self.normal_form(&pr.tail)?;
                self.pow_tail[level] = Some(t);
            }
            for k in ((level + 1)..h).rev() {
                let w = self.comm[level][k - level - 1].clone();
                let w_val = self.normal_form(&w)?;
                self.comm_elem[level][k - level - 1] = w_val.clone();
                // sigma_j(x_k) = x_j^{-1} x_k x_j = x_k [x_k, x_j] = x_k w^{-1}
                let w_inv = self.invert(&w_val);
                self.sigma[level][k] = self.multiply(&self.generator(k), &w_inv);
                // sigma_j^{-1}(x_k) = x_k sigma_j^{-1}(w); images for indices
                // > k are already final at this point.
                let conj_w = self.apply_map_level(&self.sigma_inv[level].clone(), &w_val);
                self.sigma_inv[level][k] = self.multiply(&self.generator(k), &conj_w);
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn commutator_word(&self, i: usize, j: usize) -> &Word {
        &self.comm[i][j - i - 1]
    }

    pub fn commutator_value(&self, i: usize, j: usize) -> &Element {
        &self.comm_elem[i][j - i - 1]
    }

    pub fn power_relation(&self, i: usize) -> Option<&PowerRelation> {
        self.pow[i].as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.pow.iter().all(|p| p.is_some())
    }

    /// Group order: product of the power-relation exponents, None if any
    /// generator is torsion-free.
    pub fn order(&self) -> Option<BigUint> {
        let mut o = BigUint::one();
        for p in &self.pow {
            match p {
                Some(pr) => o *= pr.exponent.magnitude(),
                None => return None,
            }
        }
        Some(o)
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.rank())
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.identity();
        e.coords[i] = BigInt::one();
        if let Some(pr) = &self.pow[i] {
            if pr.exponent.is_one() {
                // trivial generator
                return self.identity();
            }
        }
        e
    }

    /// Normal form of x_g^e as an element.
    pub fn gen_pow(&self, g: usize, e: &BigInt) -> Element {
        let mut out = self.identity();
        if e.is_zero() {
            return out;
        }
        match &self.pow[g] {
            None => {
                out.coords[g] = e.clone();
                out
            }
            Some(pr) => {
                let (q, r) = e.div_mod_floor(&pr.exponent);
                out.coords[g] = r;
                if q.is_zero() {
                    return out;
                }
                let t = self.pow_tail[g]
                    .as_ref()
                    .expect("power tail precomputed")
                    .clone();
                let tq = self.power(&t, &q);
                // x_g^m commutes with x_g, so x_g^e = x_g^r (x_g^m)^q.
                self.mul_from(g, &out, &tq)
            }
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.mul_from(0, a, b)
    }

    /// Multiply a, b in the subgroup generated by x_{level+1}, ..., x_h
    /// (0-based: coordinates < level are assumed zero in both factors).
    fn mul_from(&self, level: usize, a: &Element, b: &Element) -> Element {
        let h = self.rank();
        if level >= h {
            return self.identity();
        }
        // find the first level where anything happens
        let mut lvl = level;
        while lvl < h && a.coords[lvl].is_zero() && b.coords[lvl].is_zero() {
            lvl += 1;
        }
        if lvl >= h {
            return self.identity();
        }
        let mut a_tail = a.clone();
        a_tail.coords[lvl] = BigInt::zero();
        let mut b_tail = b.clone();
        b_tail.coords[lvl] = BigInt::zero();
        let e = &a.coords[lvl] + &b.coords[lvl];
        // a b = x^{a_l} a' x^{b_l} b' = x^{a_l + b_l} (a'^{x^{b_l}}) b'
        let conj_a = self.conj_by_gen_pow(&a_tail, lvl, &b.coords[lvl]);
        let mut tail = self.mul_from(lvl + 1, &conj_a, &b_tail);
        let mut out = self.identity();
        match &self.pow[lvl] {
            None => {
                out.coords[lvl] = e;
            }
            Some(pr) => {
                let (q, r) = e.div_mod_floor(&pr.exponent);
                out.coords[lvl] = r;
                if !q.is_zero() {
                    let t = self.pow_tail[lvl].as_ref().expect("power tail").clone();
                    let tq = self.power(&t, &q);
                    tail = self.mul_from(lvl + 1, &tq, &tail);
                }
            }
        }
        for k in (lvl + 1)..h {
            out.coords[k] = tail.coords[k].clone();
        }
        out
    }

    /// g^{x_j^e} = x_j^{-e} g x_j^e for g in the subgroup on generators of
    /// index > j. Computed by binary powering of the conjugation
    /// automorphism, which is determined by its generator images.
    fn conj_by_gen_pow(&self, g: &Element, j: usize, e: &BigInt) -> Element {
        if e.is_zero() || g.is_identity() || self.sigma_trivial[j] {
            return g.clone();
        }
        let base = if e.is_positive() {
            &self.sigma[j]
        } else {
            &self.sigma_inv[j]
        };
        let mut n = e.magnitude().clone();
        let mut acc: Option<Vec<Element>> = None;
        let mut sq = base.clone();
        let one: BigUint = BigUint::one();
        loop {
            if (&n & &one) == one {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(f) => self.compose_map(&f, &sq),
                });
            }
            n >>= 1;
            if n.is_zero() {
                break;
            }
            sq = self.compose_map(&sq, &sq);
        }
        self.apply_map_level(&acc.expect("nonzero exponent"), g)
    }

    /// (f . g)(x_k) = f(g(x_k))
    fn compose_map(&self, f: &[Element], g: &[Element]) -> Vec<Element> {
        g.iter().map(|img| self.apply_map_level(f, img)).collect()
    }

    /// Apply a generator-image map to an element in normal form.
    fn apply_map_level(&self, map: &[Element], g: &Element) -> Element {
        let mut out = self.identity();
        for (k, c) in g.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = &map[k];
            // common case: generator fixed by the map
            if img.coords[k].is_one()
                && img.coords.iter().enumerate().all(|(t, v)| t == k || v.is_zero())
            {
                let gp = self.gen_pow(k, c);
                out = self.multiply(&out, &gp);
            } else {
                let p = self.power(img, c);
                out = self.multiply(&out, &p);
            }
        }
        out
    }

    pub fn power(&self, a: &Element, n: &BigInt) -> Element {
        if n.is_zero() || a.is_identity() {
            return self.identity();
        }
        if n.is_negative() {
            let inv = self.invert(a);
            return self.power(&inv, &-n);
        }
        let mut n = n.magnitude().clone();
        let mut acc: Option<Element> = None;
        let mut sq = a.clone();
        let one: BigUint = BigUint::one();
        loop {
            if (&n & &one) == one {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(r) => self.multiply(&r, &sq),
                });
            }
            n >>= 1;
            if n.is_zero() {
                break;
            }
            sq = self.multiply(&sq, &sq);
        }
        acc.expect("nonzero exponent")
    }

    pub fn invert(&self, a: &Element) -> Element {
        let mut out = self.identity();
        for j in (0..self.rank()).rev() {
            if a.coords[j].is_zero() {
                continue;
            }
            let gp = self.gen_pow(j, &-&a.coords[j]);
            out = self.multiply(&out, &gp);
        }
        out
    }

    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        let ia = self.invert(a);
        let ib = self.invert(b);
        let left = self.multiply(&ia, &ib);
        let right = self.multiply(a, b);
        self.multiply(&left, &right)
    }

    /// h^{-1} g h
    pub fn conjugate(&self, g: &Element, h: &Element) -> Element {
        let ih = self.invert(h);
        let t = self.multiply(&ih, g);
        self.multiply(&t, h)
    }

    pub fn normal_form(&self, w: &Word) -> Result<Element> {
        let mut out = self.identity();
        for (g, e) in w.letters() {
            if *g >= self.rank() {
                return Err(Error::input(format!("generator index {} out of range", g + 1)));
            }
            let gp = self.gen_pow(*g, e);
            out = self.multiply(&out, &gp);
        }
        Ok(out)
    }

    /// Normal form of an arbitrary exponent vector (coordinates may be out of
    /// range when power relations are present).
    pub fn element_from_coords(&self, coords: &[BigInt]) -> Element {
        let mut out = self.identity();
        for (g, e) in coords.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let gp = self.gen_pow(g, e);
            out = self.multiply(&out, &gp);
        }
        out
    }

    /// Associativity check over a fixed test set: all generators, plus
    /// x_i^{m_i - 1} for torsion generators. Returns the failing triples.
    pub fn consistency_check(&self) -> Vec<(Element, Element, Element)> {
        let mut test: Vec<Element> = (0..self.rank()).map(|i| self.generator(i)).collect();
        for i in 0..self.rank() {
            if let Some(pr) = &self.pow[i] {
                let e = &pr.exponent - BigInt::one();
                if e > BigInt::one() {
                    test.push(self.gen_pow(i, &e));
                }
            }
        }
        test.retain(|e| !e.is_identity());
        test.dedup();
        let mut failures = Vec::new();
        for a in &test {
            for b in &test {
                let ab = self.multiply(a, b);
                for c in &test {
                    let bc = self.multiply(b, c);
                    let l = self.multiply(&ab, c);
                    let r = self.multiply(a, &bc);
                    if l != r {
                        failures.push((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        failures
    }

    /// Word-metric ball of radius n with respect to the generators and their
    /// inverses. Returns (element, word length) pairs, sorted.
    pub fn ball(&self, n: u32, cap: usize) -> Result<Vec<(Element, u32)>> {
        let mut dist: HashMap<Element, u32> = HashMap::new();
        let id = self.identity();
        dist.insert(id.clone(), 0);
        let mut frontier = vec![id];
        let steps: Vec<Element> = (0..self.rank())
            .flat_map(|i| {
                vec![
                    self.gen_pow(i, &BigInt::one()),
                    self.gen_pow(i, &-BigInt::one()),
                ]
            })
            .filter(|e| !e.is_identity())
            .collect();
        for d in 1..=n {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &steps {
                    let t = self.multiply(g, s);
                    if !dist.contains_key(&t) {
                        if dist.len() >= cap {
                            return Err(Error::resource(format!(
                                "ball enumeration exceeded cap of {} elements",
                                cap
                            )));
                        }
                        dist.insert(t.clone(), d);
                        next.push(t);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut out: Vec<(Element, u32)> = dist.into_iter().collect();
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        Ok(out)
    }

    /// Pretty-print an element as a word in the generator names.
    pub fn element_string(&self, e: &Element) -> String {
        let mut parts = Vec::new();
        for (i, c) in e.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(self.names[i].clone());
            } else {
                parts.push(format!("{}^{}", self.names[i], c));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

#[cfg(test)]
mod collection_tests {
    use super::*;

    fn heisenberg() -> PcPresentation {
        PcPresentation::new(
            vec!["x1".into(), "x2".into(), "x3".into()],
            vec![1, 1, 2],
            vec![(0, 1, Word::gen(2, 1))],
            vec![None, None, None],
        )
        .unwrap()
    }

    fn elem(p: &PcPresentation, coords: &[i64]) -> Element {
        Element { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
    }

    /// Independent oracle: naive letter-by-letter rewriting using
    /// x_j x_i -> x_i x_j [x_i, x_j]^{-1} for i < j, no power relations.
    fn naive_collect(p: &PcPresentation, letters: &[(usize, i64)]) -> Vec<BigInt> {
        let mut word: Vec<(usize, i64)> = Vec::new();
        for &(g, e) in letters {
            let s = if e >= 0 { 1 } else { -1 };
            for _ in 0..e.abs() {
                word.push((g, s));
            }
        }
        loop {
            // cancel adjacent inverses and find the leftmost inversion
            let mut changed = false;
            let mut i = 0;
            while i + 1 < word.len() {
                let (g1, e1) = word[i];
                let (g2, e2) = word[i + 1];
                if g1 == g2 && e1 + e2 == 0 {
                    word.drain(i..i + 2);
                    changed = true;
                    break;
                }
                if g1 > g2 {
                    // x_{g1}^{e1} x_{g2}^{e2}: move the smaller generator left.
                    // First rewrite so both letters are positive or handle signs
                    // via conjugation: x^a y^b = y^b (y^{-b} x^a y^b).
                    // We use: for single letters u = x_{g1}^{e1}, v = x_{g2}^{e2}:
                    // u v = v (v^{-1} u v), and v^{-1} u v expands through the
                    // stored commutator when e1 = e2 = +-1.
                    let mut repl: Vec<(usize, i64)> = vec![(g2, e2)];
                    // compute x_{g2}^{-e2} x_{g1}^{e1} x_{g2}^{e2}
                    // = (x_{g2}^{-e2} x_{g1} x_{g2}^{e2})^{e1}
                    // and x_{g2}^{-1} x_{g1} x_{g2} = x_{g1} [x_{g1}, x_{g2}]
                    // with [x_{g1}, x_{g2}] = [x_{g2}, x_{g1}]^{-1} from the table.
                    let base: Vec<(usize, i64)> = {
                        let w = p.commutator_word(g2, g1); // [x_{g2}, x_{g1}], g2 < g1
                        let mut conj: Vec<(usize, i64)> = vec![(g1, 1)];
                        if e2 > 0 {
                            // x_{g2}^{-1} x_{g1} x_{g2} = x_{g1} [x_{g1}, x_{g2}]
                            for (g, ex) in w.inverse().letters() {
                                conj.push((*g, i64::try_from(ex.clone()).unwrap()));
                            }
                        } else {
                            // x_{g2} x_{g1} x_{g2}^{-1} = x_{g1} (x_{g2} [x_{g1},x_{g2}]^{-1} x_{g2}^{-1})
                            // handled by recursion below instead
                            conj = Vec::new();
                        }
                        conj
                    };
                    if e2 > 0 && !base.is_empty() {
                        let reps = base;
                        if e1 > 0 {
                            for _ in 0..e1 {
                                repl.extend(reps.iter().cloned());
                            }
                        } else {
                            let mut inv: Vec<(usize, i64)> =
                                reps.iter().rev().map(|&(g, e)| (g, -e)).collect();
                            for _ in 0..(-e1) {
                                repl.append(&mut inv.clone());
                            }
                        }
                        word.splice(i..i + 2, repl);
                        changed = true;
                        break;
                    } else {
                        // negative conjugator: rewrite u v = v v^{-1} u v with
                        // v^{-1} u v left as an explicit 3-letter block and retry;
                        // to guarantee progress expand via the positive case on
                        // (v^{-1}) u: u v = (u v u^{-1}) u ... simpler: swap using
                        // the identity x^{-1} acting like x with inverted word:
                        // x_{g2}^{-1} pulled left: x_{g1}^{e1} x_{g2}^{-1}
                        //   = x_{g2}^{-1} (x_{g2} x_{g1}^{e1} x_{g2}^{-1})
                        //   = x_{g2}^{-1} (x_{g1} [x_{g1}, x_{g2}]^{-1}-conjugated)
                        // For nilpotency class <= 2 test groups the commutator is
                        // central, so x_{g2} x_{g1} x_{g2}^{-1} = x_{g1} [x_{g1},x_{g2}]^{-1}
                        // = x_{g1} w where w is the stored [x_{g2},x_{g1}] word.
                        let w = p.commutator_word(g2, g1);
                        let mut block: Vec<(usize, i64)> = vec![(g2, e2)];
                        let reps: Vec<(usize, i64)> = {
                            let mut r: Vec<(usize, i64)> = vec![(g1, 1)];
                            for (g, ex) in w.letters() {
                                r.push((*g, i64::try_from(ex.clone()).unwrap()));
                            }
                            r
                        };
                        if e1 > 0 {
                            for _ in 0..e1 {
                                block.extend(reps.iter().cloned());
                            }
                        } else {
                            let inv: Vec<(usize, i64)> =
                                reps.iter().rev().map(|&(g, e)| (g, -e)).collect();
                            for _ in 0..(-e1) {
                                block.extend(inv.iter().cloned());
                            }
                        }
                        word.splice(i..i + 2, block);
                        changed = true;
                        break;
                    }
                }
                i += 1;
            }
            if !changed {
                break;
            }
        }
        // now the word is sorted; accumulate exponents
        let mut coords = vec![BigInt::zero(); p.rank()];
        for (g, e) in word {
            coords[g] += e;
        }
        coords
    }

    #[test]
    fn heisenberg_frozen_values() {
        let p = heisenberg();
        // x2 x1 = x1 x2 x3^{-1}
        let w = Word::new(vec![(1, BigInt::one()), (0, BigInt::one())]);
        assert_eq!(p.normal_form(&w).unwrap(), elem(&p, &[1, 1, -1]));
        // inverse of (1,1,0) is (-1,-1,-1)
        assert_eq!(p.invert(&elem(&p, &[1, 1, 0])), elem(&p, &[-1, -1, -1]));
        // [x1, x2] = x3
        assert_eq!(
            p.commutator(&elem(&p, &[1, 0, 0]), &elem(&p, &[0, 1, 0])),
            elem(&p, &[0, 0, 1])
        );
    }

    #[test]
    fn heisenberg_matches_naive_collection() {
        let p = heisenberg();
        let cases: Vec<Vec<(usize, i64)>> = vec![
            vec![(1, 1), (0, 1)],
            vec![(1, 3), (0, 2)],
            vec![(0, -2), (1, 4), (0, 3), (2, -1)],
            vec![(1, -3), (0, -1), (1, 2), (0, 5)],
            vec![(2, 2), (1, 1), (0, 1), (1, -1), (0, -1)],
        ];
        for letters in cases {
            let expect = naive_collect(&p, &letters);
            let w = Word::new(
                letters.iter().map(|&(g, e)| (g, BigInt::from(e))).collect(),
            );
            let got = p.normal_form(&w).unwrap();
            assert_eq!(got.coords, expect, "case {:?}", letters);
        }
    }

    #[test]
    fn heisenberg_ball_radius_1_has_7_elements() {
        let p = heisenberg();
        let b = p.ball(1, 1000).unwrap();
        assert_eq!(b.len(), 7);
    }

    #[test]
    fn z2_ball_radius_2_has_13_elements() {
        let p = PcPresentation::new(
            vec!["x1".into(), "x2".into()],
            vec![1, 1],
            vec![],
            vec![None, None],
        )
        .unwrap();
        assert_eq!(p.ball(2, 1000).unwrap().len(), 13);
    }

    #[test]
    fn heisenberg_x3_word_length() {
        // With S the full basis, x3 is itself a generator.
        let p = heisenberg();
        let z = elem(&p, &[0, 0, 1]);
        let b1 = p.ball(1, 10_000).unwrap();
        let d = b1.iter().find(|(e, _)| *e == z).map(|(_, d)| *d);
        assert_eq!(d, Some(1));
        // x1^2 x2^2 x3^2 needs 6 letters
        let g = elem(&p, &[2, 2, 2]);
        let b6 = p.ball(6, 100_000).unwrap();
        let d6 = b6.iter().find(|(e, _)| *e == g).map(|(_, d)| *d);
        assert!(d6.is_some());
    }

    #[test]
    fn power_relations_cyclic_group() {
        // Z/4: one generator, x^4 = 1
        let p = PcPresentation::new(
            vec!["g".into()],
            vec![1],
            vec![],
            vec![Some(PowerRelation { exponent: BigInt::from(4), tail: Word::empty() })],
        )
        .unwrap();
        let g = p.generator(0);
        let g2 = p.multiply(&g, &g);
        let g4 = p.multiply(&g2, &g2);
        assert!(g4.is_identity());
        assert!(!g2.is_identity());
    }

    #[test]
    fn consistency_check_passes_for_heisenberg() {
        let p = heisenberg();
        assert!(p.consistency_check().is_empty());
    }

    #[test]
    fn big_exponent_collection() {
        let p = heisenberg();
        // [x1^a, x2^b] = x3^{ab} for large a, b
        let a = BigInt::from(1_u64 << 40);
        let b = BigInt::from(3_u64);
        let xa = p.gen_pow(0, &a);
        let xb = p.gen_pow(1, &b);
        let c = p.commutator(&xa, &xb);
        assert_eq!(c.coords[2], &a * &b);
    }
}
