//! Minimal separating finite quotients. For a nontrivial element g and a
//! prime p, the p-depth is the least order of a finite p-group quotient
//! in which g survives; the depth is the minimum over all primes. The
//! search enumerates the kernels of finite p-group quotients breadth-first
//! by index, so the first kernel missing the element gives the exact depth
//! and every completed level certifies a lower bound; arithmetic lower
//! bounds prune primes that cannot win.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pcp::{Element, PcPresentation};
use crate::pgroup;
use crate::section::{p_valuation, AbelianSection};
use crate::zlin;
use crate::structure::{
    self, lower_central_series, power_subgroup_closure, quotient_presentation,
    weight_subgroups,
};
use crate::subgroup::{Closure, SubgroupBasis};

/// Cached structural data for one torsion-free presentation.
pub struct GroupContext {
    pub pres: PcPresentation,
    pub lcs: Vec<SubgroupBasis>,
    pub msub: Vec<SubgroupBasis>,
    pub class: usize,
}

impl GroupContext {
    pub fn new(pres: PcPresentation) -> Result<Self> {
        if pres.is_finite() {
            return Err(Error::input(
                "depth computations expect a torsion-free presentation",
            ));
        }
        structure::validate_weights(&pres)?;
        let lcs = lower_central_series(&pres);
        let msub = weight_subgroups(&pres);
        let class = lcs.len();
        Ok(GroupContext { pres, lcs, msub, class })
    }
}

/// A re-checkable witness: the kernel of a finite quotient, the quotient
/// presentation it induces, and the (nontrivial) image of the element.
#[derive(Clone)]
pub struct WitnessCertificate {
    pub prime: BigInt,
    pub order: BigUint,
    pub kernel: SubgroupBasis,
    pub quotient: PcPresentation,
    pub image: Element,
    /// true when the order was proven minimal, false for upper bounds
    pub exact: bool,
}

pub fn certificate(
    p: &PcPresentation,
    g: &Element,
    prime: &BigInt,
    kernel: &SubgroupBasis,
) -> Result<WitnessCertificate> {
    let order = kernel
        .index(p)
        .ok_or_else(|| Error::input("witness kernel must have finite index"))?;
    let (quotient, map) = quotient_presentation(p, kernel)?;
    let image = map.project(p, g);
    if image.is_identity() {
        return Err(Error::input("element dies in the proposed quotient"));
    }
    Ok(WitnessCertificate {
        prime: prime.clone(),
        order,
        kernel: kernel.clone(),
        quotient,
        image,
        exact: false,
    })
}

/// Independent re-check of a certificate against the ambient group.
pub fn verify_certificate(
    p: &PcPresentation,
    g: &Element,
    cert: &WitnessCertificate,
) -> Result<()> {
    if !cert.kernel.is_normal(p) {
        return Err(Error::inconsistent("certificate kernel is not normal"));
    }
    if cert.kernel.member(p, g) {
        return Err(Error::inconsistent("certificate kernel contains the element"));
    }
    let idx = cert
        .kernel
        .index(p)
        .ok_or_else(|| Error::inconsistent("certificate kernel has infinite index"))?;
    if idx != cert.order {
        return Err(Error::inconsistent("certificate order mismatch"));
    }
    match pgroup::p_group_order(&cert.quotient) {
        Some((q, _)) if q == cert.prime => {}
        _ => return Err(Error::inconsistent("certificate quotient is not a p-group")),
    }
    let (_, map) = quotient_presentation(p, &cert.kernel)?;
    if map.project(p, g) != cert.image || cert.image.is_identity() {
        return Err(Error::inconsistent("certificate image mismatch"));
    }
    if !cert.quotient.consistency_check().is_empty() {
        return Err(Error::inconsistent("certificate quotient is inconsistent"));
    }
    Ok(())
}

/// Verbal kernel K_{p,k}: normal closure of the p^k-th powers of the
/// generators. Every p-group quotient of exponent dividing p^k factors
/// through it.
pub fn power_kernel(p: &PcPresentation, prime: &BigInt, k: u32) -> SubgroupBasis {
    power_subgroup_closure(p, &prime.pow(k), None)
}

/// Arithmetic lower bound on the p-depth of g.
pub fn lower_bound(ctx: &GroupContext, g: &Element, prime: &BigInt) -> Result<BigUint> {
    let p = &ctx.pres;
    if g.is_identity() {
        return Err(Error::input("lower bound of the identity is undefined"));
    }
    let pm = prime.magnitude().clone();
    let mut lb = pm.clone();
    let c = ctx.class;
    // weight filtration: g in M_t with p not dividing the torsion order of
    // g over gamma_t forces class >= t in any surviving quotient
    for t in 2..=c {
        if ctx.msub[t - 1].member(p, g) {
            let kt = structure::order_mod(p, &ctx.lcs[t - 1], g)?;
            if !(&kt % &pm).is_zero() {
                lb = lb.max(pm.pow(t as u32 + 1));
            }
        }
    }
    // divisibility in the abelianization: when every weight-1 coordinate of
    // g is divisible by p^v (and some is nonzero), a separating quotient
    // either keeps g visible in its abelianization, which then contains an
    // element of order p^{v+1}, or pushes g into the derived subgroup, which
    // forces class >= 2 and order >= p^3
    let w1 = structure::weight_cut(p, 2);
    if g.coords[..w1].iter().any(|a| !a.is_zero()) {
        let mut v = u32::MAX;
        for a in &g.coords[..w1] {
            if !a.is_zero() {
                v = v.min(p_valuation(a, prime));
            }
        }
        if v > 0 {
            lb = lb.max(pm.pow(v + 1).min(pm.pow(3)));
        }
    }
    // bottom of the filtration: primitive decomposition in the weight-c span
    if ctx.msub[c - 1].member(p, g) {
        if let Some((z, m)) = structure::primitive_decompose(p, g) {
            let v = p_valuation(&m, prime);
            lb = lb.max(pm.pow(v + 1));
            if c >= 2 {
                let kz = structure::order_mod(p, &ctx.lcs[c - 1], &z)?;
                if !(&kz % &pm).is_zero() {
                    lb = lb.max(pm.pow(c as u32 + v + 1));
                }
            }
        }
    }
    Ok(lb)
}

/// Outcome of the exact lattice computation for central elements of
/// class-2 groups.
enum CentralDepth {
    /// certified minimum together with a kernel realizing it
    Exact(BigUint, SubgroupBasis),
    /// no separating p-quotient of order below the caller's cutoff exists
    AtLeast(BigUint),
}

/// cap on the number of candidate derived-part sublattices examined before
/// the exact central computation gives up and the generic search takes over
const CENTRAL_ENUM_CAP: usize = 1_000_000;

/// True when `central_class2_p_depth` applies: torsion-free class-2 group
/// and an element of the central weight >= 2 span.
fn central_class2_applicable(ctx: &GroupContext, g: &Element) -> bool {
    if ctx.class != 2 {
        return false;
    }
    let p = &ctx.pres;
    if (0..p.rank()).any(|i| p.power_relation(i).is_some()) {
        return false;
    }
    let r1 = structure::weight_cut(p, 2);
    r1 < p.rank() && g.coords[..r1].iter().all(|a| a.is_zero())
}

/// Exact p-depth of a central element of a torsion-free class-2 group, by
/// lattice arithmetic instead of kernel search.
///
/// Write C for the span of the weight >= 2 generators (a central isolated
/// subgroup containing the derived subgroup, of rank r2) and B = G/C,
/// free abelian of rank r1. A normal subgroup K of p-power index is
/// determined by the pair K1 = image of K in B, K2 = K ∩ C: normality is
/// exactly [K1, B] ⊆ K2 in C, the quotient order is [B:K1]·[C:K2], and a
/// central g lies in K precisely when its C-coordinates lie in K2.
/// Conversely every such lattice pair arises from a kernel (lift a basis
/// of K1 and adjoin K2; the commutator corrections land in [K1, K1] ⊆ K2).
/// For fixed K2 the largest admissible K1 is the preimage
/// {b in B : [b, B] ⊆ K2}, so the minimum over all kernels is found by
/// enumerating the finite-index sublattices K2 ⊆ C in Hermite normal form,
/// ordered by index. Returns None when the enumeration cap is hit.
fn central_class2_p_depth(
    ctx: &GroupContext,
    g: &Element,
    prime: &BigInt,
    cutoff: Option<&BigUint>,
) -> Result<Option<CentralDepth>> {
    let p = &ctx.pres;
    let r1 = structure::weight_cut(p, 2);
    let r2 = p.rank() - r1;
    let pm = prime.magnitude().clone();
    let pv: BigInt = prime.clone();
    let gc: Vec<BigInt> = g.coords[r1..].to_vec();

    // beta[i][j] = C-coordinates of [x_i, x_j] over the weight-1 basis
    let mut beta = vec![vec![vec![BigInt::zero(); r2]; r1]; r1];
    for i in 0..r1 {
        for j in (i + 1)..r1 {
            let c = p.commutator_value(i, j);
            for t in 0..r2 {
                beta[i][j][t] = c.coords[r1 + t].clone();
                beta[j][i][t] = -&c.coords[r1 + t];
            }
        }
    }
    // row i = image of the basis direction b_i under the commutation map
    // b -> ([b, x_0], ..., [b, x_{r1-1}]) into C^{r1}, flattened
    let rdim = r1 * r2;
    let amat: zlin::Mat = (0..r1)
        .map(|i| {
            let mut row = vec![BigInt::zero(); rdim];
            for j in 0..r1 {
                row[j * r2..(j + 1) * r2].clone_from_slice(&beta[i][j]);
            }
            row
        })
        .collect();

    // quotient order p^j * [B : K1] for the K2 with HNF rows h, index p^j:
    // [B : K1] = [Z^rdim : K2^{⊕r1}] / [Z^rdim : K2^{⊕r1} + im(amat)]
    let total_for = |h: &zlin::Mat, pj: &BigUint| -> Result<BigUint> {
        let mut gens: zlin::Mat = Vec::with_capacity(rdim + r1);
        for k in 0..r1 {
            for hr in h {
                let mut row = vec![BigInt::zero(); rdim];
                row[k * r2..(k + 1) * r2].clone_from_slice(hr);
                gens.push(row);
            }
        }
        gens.extend(amat.iter().cloned());
        let hnf = zlin::row_hnf(&gens);
        if hnf.len() != rdim {
            return Err(Error::inconsistent("central kernel lattice lost rank"));
        }
        let mut idx = BigUint::one();
        for (i, row) in hnf.iter().enumerate() {
            idx *= row[i].magnitude();
        }
        let b_index = pj.pow(r1 as u32) / &idx;
        Ok(pj * b_index)
    };

    // a priori candidate: K2 = p^{v+1} C misses g, since some coordinate
    // of g has p-valuation exactly v
    let v = gc
        .iter()
        .filter(|a| !a.is_zero())
        .map(|a| p_valuation(a, &pv))
        .min()
        .expect("central element is nontrivial");
    let seed: zlin::Mat = (0..r2)
        .map(|i| {
            let mut row = vec![BigInt::zero(); r2];
            row[i] = pv.pow(v + 1);
            row
        })
        .collect();
    let mut best = (total_for(&seed, &pm.pow((v + 1) * r2 as u32))?, seed);

    let mut examined = 0usize;
    let mut j = 0u32;
    loop {
        let pj = pm.pow(j);
        let stop = match cutoff {
            Some(c) => best.0.clone().min(c.clone()),
            None => best.0.clone(),
        };
        if pj >= stop {
            break;
        }
        // Hermite normal forms of index p^j: upper triangular rows with
        // diagonal p^{a_0}, ..., p^{a_{r2-1}}, sum a_i = j, and the
        // entries of rows 0..c in column c ranging over [0, p^{a_c})
        let mut comp = vec![0u32; r2];
        comp[r2 - 1] = j;
        'comps: loop {
            let diag: Vec<BigInt> = comp.iter().map(|&a| pv.pow(a)).collect();
            // free positions (row, col) with row < col, odometer over them
            let free: Vec<(usize, usize)> = (0..r2)
                .flat_map(|c| (0..c).map(move |r| (r, c)))
                .collect();
            let mut vals: Vec<BigInt> = vec![BigInt::zero(); free.len()];
            'odometer: loop {
                examined += 1;
                if examined > CENTRAL_ENUM_CAP {
                    return Ok(None);
                }
                let mut h = zlin::zeros(r2, r2);
                for i in 0..r2 {
                    h[i][i] = diag[i].clone();
                }
                for (k, &(r, c)) in free.iter().enumerate() {
                    h[r][c] = vals[k].clone();
                }
                if !zlin::lattice_member(&h, &gc) {
                    let total = total_for(&h, &pj)?;
                    if total < best.0 {
                        best = (total, h);
                    }
                }
                // advance the odometer
                for (k, &(_, c)) in free.iter().enumerate() {
                    vals[k] += 1;
                    if vals[k] < diag[c] {
                        continue 'odometer;
                    }
                    vals[k] = BigInt::zero();
                }
                break;
            }
            // next composition of j into r2 parts
            for t in (1..r2).rev() {
                if comp[t] > 0 {
                    comp[t] -= 1;
                    comp[t - 1] += 1;
                    let moved = comp[t..].iter().sum::<u32>();
                    for s in t..r2 {
                        comp[s] = 0;
                    }
                    comp[r2 - 1] = moved;
                    continue 'comps;
                }
            }
            break;
        }
        j += 1;
    }

    if let Some(c) = cutoff {
        if &best.0 >= c {
            return Ok(Some(CentralDepth::AtLeast(c.clone())));
        }
    }

    // rebuild the kernel for the winning K2: a basis of the preimage
    // K1 = {b : [b, B] ⊆ K2} is the b-part of the nullspace of
    // [amat^T | -(K2^{⊕r1} basis)^T]
    let (total, h) = best;
    let mut wcols: zlin::Mat = amat.clone();
    for k in 0..r1 {
        for hr in &h {
            let mut row = vec![BigInt::zero(); rdim];
            for (t, x) in hr.iter().enumerate() {
                row[k * r2 + t] = -x;
            }
            wcols.push(row);
        }
    }
    // rows of wcols are the columns of the constraint matrix
    let null = zlin::right_kernel(&zlin::transpose(&wcols));
    let mut gens: Vec<Element> = Vec::new();
    for row in &null {
        let mut coords = vec![BigInt::zero(); p.rank()];
        coords[..r1].clone_from_slice(&row[..r1]);
        if coords.iter().any(|a| !a.is_zero()) {
            gens.push(Element { coords });
        }
    }
    for hr in &h {
        let mut coords = vec![BigInt::zero(); p.rank()];
        coords[r1..].clone_from_slice(hr);
        gens.push(Element { coords });
    }
    let kernel = SubgroupBasis::from_generators(p, &gens, Closure::Subgroup);
    if kernel.member(p, g) || kernel.index(p).as_ref() != Some(&total) {
        return Err(Error::inconsistent(
            "central kernel reconstruction disagrees with the lattice count",
        ));
    }
    Ok(Some(CentralDepth::Exact(total, kernel)))
}

#[derive(Clone)]
pub enum PDepth {
    /// the minimum was certified
    Exact { order: BigUint, cert: WitnessCertificate },
    /// node budget exhausted: the true value is in [lower, upper]
    Bounded { lower: BigUint, upper: BigUint, cert: WitnessCertificate },
    /// the lower bound already meets the caller's cutoff; no search done
    AtLeast { lower: BigUint },
}

impl PDepth {
    pub fn upper_cert(&self) -> Option<(&BigUint, &WitnessCertificate)> {
        match self {
            PDepth::Exact { order, cert } => Some((order, cert)),
            PDepth::Bounded { upper, cert, .. } => Some((upper, cert)),
            PDepth::AtLeast { .. } => None,
        }
    }
}

#[derive(Clone)]
pub struct SearchOptions {
    pub node_cap: usize,
    pub cutoff: Option<BigUint>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_cap: 4000, cutoff: None }
    }
}

/// Lazily enumerated lattice of kernels of finite p-group quotients,
/// level m holding exactly the normal subgroups of index p^m whose
/// quotient is a p-group. Levels are produced breadth-first: the children
/// of a kernel K are the preimages of the hyperplanes of the elementary
/// abelian section K/(K^p [K,G]), and every kernel of index p^{m+1} is a
/// child of some kernel of index p^m (quotient by a central subgroup of
/// order p). Scanning a complete level certifies a depth lower bound.
pub struct KernelLattice {
    prime: BigInt,
    /// fully enumerated levels; levels[0] = [G]
    levels: Vec<Vec<SubgroupBasis>>,
    /// expansion cursor into the deepest complete level
    cursor: usize,
    /// partially built next level, deduplicated
    pending: Vec<SubgroupBasis>,
    seen: HashSet<Vec<(usize, Vec<BigInt>)>>,
    /// total children constructed so far
    nodes: usize,
    /// absolute ceiling on `nodes`, independent of per-call budgets
    hard_cap: usize,
}

impl KernelLattice {
    pub fn new(ctx: &GroupContext, prime: &BigInt, hard_cap: usize) -> KernelLattice {
        let p = &ctx.pres;
        let gens: Vec<Element> =
            (0..p.rank()).map(|i| p.gen_pow(i, &BigInt::one())).collect();
        let full = SubgroupBasis::from_generators(p, &gens, Closure::Subgroup);
        KernelLattice {
            prime: prime.clone(),
            levels: vec![vec![full]],
            cursor: 0,
            pending: Vec::new(),
            seen: HashSet::new(),
            nodes: 0,
            hard_cap,
        }
    }

    pub fn complete_levels(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, m: u32) -> &[SubgroupBasis] {
        &self.levels[m as usize]
    }

    fn raise_cap(&mut self, cap: usize) {
        self.hard_cap = self.hard_cap.max(cap);
    }

    /// Kernels of index p * |G : kernel| contained in `kernel`.
    fn children(
        &self,
        ctx: &GroupContext,
        kernel: &SubgroupBasis,
    ) -> Result<Vec<SubgroupBasis>> {
        let p = &ctx.pres;
        let rows: Vec<Element> = kernel.rows().into_iter().cloned().collect();
        // S = K^p [K, G]
        let mut gens: Vec<Element> = Vec::new();
        for r in &rows {
            gens.push(p.power(r, &self.prime));
            for i in 0..p.rank() {
                gens.push(p.commutator(r, &p.gen_pow(i, &BigInt::one())));
            }
        }
        let s = SubgroupBasis::from_generators(p, &gens, Closure::Normal);
        let sec = AbelianSection::new(p, kernel, &s)?;
        let t = sec.rank();
        // F_p basis of the elementary abelian section K/S
        let mut basis: Vec<Vec<BigInt>> = Vec::new();
        let mut span = sec.rel.clone();
        for i in 0..t {
            let mut e = vec![BigInt::zero(); t];
            e[i] = BigInt::one();
            if !zlin::lattice_member(&span, &e) {
                span.push(e.clone());
                basis.push(e);
            }
        }
        let d = basis.len();
        if d == 0 {
            return Ok(Vec::new());
        }
        let pu = self.prime.to_usize().ok_or_else(|| {
            Error::resource("prime too large for hyperplane enumeration")
        })?;
        // hyperplane normal vectors, one per hyperplane: last nonzero
        // coefficient equal to 1
        let mut out = Vec::new();
        let mut coeffs = vec![0usize; d];
        'outer: loop {
            let mut i = 0;
            loop {
                if i == d {
                    break 'outer;
                }
                coeffs[i] += 1;
                if coeffs[i] < pu {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            let pivot = coeffs.iter().rposition(|&c| c != 0).expect("nonzero");
            if coeffs[pivot] != 1 {
                continue;
            }
            // the hyperplane of the functional is spanned by
            // b_j - coeffs_j * b_pivot over j != pivot
            let mut lifts = Vec::new();
            for (j, b) in basis.iter().enumerate() {
                if j == pivot {
                    continue;
                }
                let mut w = b.clone();
                if coeffs[j] != 0 {
                    let c = BigInt::from(coeffs[j]);
                    for (x, y) in w.iter_mut().zip(basis[pivot].iter()) {
                        *x -= y * &c;
                    }
                }
                lifts.push(sec.element_from(p, &w));
            }
            // the section is central in G/S, so subgroup closure suffices
            // and the result is normal in G
            out.push(s.join(p, &lifts, Closure::Subgroup));
        }
        Ok(out)
    }

    /// Continue the enumeration, spending at most `budget` child
    /// constructions; true when one more level was completed.
    pub fn grow(&mut self, ctx: &GroupContext, budget: &mut usize) -> Result<bool> {
        let p = &ctx.pres;
        let last = self.levels.len() - 1;
        while self.cursor < self.levels[last].len() {
            if *budget == 0 || self.nodes >= self.hard_cap {
                return Ok(false);
            }
            let kernel = self.levels[last][self.cursor].clone();
            self.cursor += 1;
            let kids = self.children(ctx, &kernel)?;
            let spent = kids.len().max(1);
            self.nodes += spent;
            *budget = budget.saturating_sub(spent);
            for k in kids {
                if self.seen.insert(k.key(p)) {
                    self.pending.push(k);
                }
            }
        }
        let next = std::mem::take(&mut self.pending);
        if next.is_empty() {
            return Err(Error::inconsistent(
                "kernel lattice level came out empty in an infinite group",
            ));
        }
        self.seen.clear();
        self.cursor = 0;
        self.levels.push(next);
        Ok(true)
    }

    fn pending(&self) -> &[SubgroupBasis] {
        &self.pending
    }
}

/// Node budget for the greedy descent that produces certified upper
/// bounds; the descent stops early once it matches the arithmetic lower
/// bound, so the budget only matters on stubborn elements.
const DESCENT_CAP: usize = 300;

struct Descent<'a> {
    ctx: &'a GroupContext,
    prime: BigInt,
    target: &'a Element,
    lb: BigUint,
    best: BigUint,
    best_kernel: SubgroupBasis,
    visited: HashSet<Vec<(usize, Vec<BigInt>)>>,
    nodes: usize,
    done: bool,
}

impl<'a> Descent<'a> {
    fn go(&mut self, kernel: SubgroupBasis) -> Result<()> {
        if self.done || self.nodes >= DESCENT_CAP {
            return Ok(());
        }
        let p = &self.ctx.pres;
        if !self.visited.insert(kernel.key(p)) {
            return Ok(());
        }
        self.nodes += 1;
        let ord = kernel
            .index(p)
            .ok_or_else(|| Error::inconsistent("descent kernel has infinite index"))?;
        if ord < self.best {
            self.best = ord;
            self.best_kernel = kernel.clone();
        }
        if self.best <= self.lb {
            self.done = true;
            return Ok(());
        }
        let lines =
            pgroup::central_lines_mod_with(p, &self.ctx.lcs, &kernel, &self.prime)?;
        for z in lines {
            if self.done || self.nodes >= DESCENT_CAP {
                return Ok(());
            }
            // the line is central modulo the kernel, so the plain join is
            // already normal
            let bigger = kernel.join(p, &[z], Closure::Subgroup);
            if bigger.member(p, self.target) {
                continue;
            }
            self.go(bigger)?;
        }
        Ok(())
    }
}

/// Certified upper bound: descend from the first verbal kernel G^{p^k}
/// missing g, absorbing central lines that keep g outside, with limited
/// backtracking. Stops as soon as the arithmetic lower bound is met.
fn descend_cert(
    ctx: &GroupContext,
    g: &Element,
    prime: &BigInt,
    lb: &BigUint,
) -> Result<WitnessCertificate> {
    let p = &ctx.pres;
    let mut k0 = 1u32;
    let mut kernel = power_kernel(p, prime, k0);
    while kernel.member(p, g) {
        k0 += 1;
        if k0 > 64 {
            return Err(Error::resource("element survives no small verbal quotient"));
        }
        kernel = power_kernel(p, prime, k0);
    }
    let mut d = Descent {
        ctx,
        prime: prime.clone(),
        target: g,
        lb: lb.clone(),
        best: kernel.index(p).expect("verbal kernel has finite index"),
        best_kernel: kernel.clone(),
        visited: HashSet::new(),
        nodes: 0,
        done: false,
    };
    d.go(kernel)?;
    certificate(p, g, prime, &d.best_kernel)
}

/// Minimal order of a finite p-group quotient in which g survives.
pub fn p_depth(
    ctx: &GroupContext,
    g: &Element,
    prime: &BigInt,
    opts: &SearchOptions,
) -> Result<PDepth> {
    let mut lat = KernelLattice::new(ctx, prime, opts.node_cap.saturating_mul(16));
    p_depth_with(ctx, g, prime, opts, &mut lat)
}

/// `p_depth` against a shared kernel lattice, so that repeated queries on
/// the same group and prime reuse the enumeration already paid for.
pub fn p_depth_with(
    ctx: &GroupContext,
    g: &Element,
    prime: &BigInt,
    opts: &SearchOptions,
    lat: &mut KernelLattice,
) -> Result<PDepth> {
    let p = &ctx.pres;
    if g.is_identity() {
        return Err(Error::input("the identity has no separating quotient"));
    }
    debug_assert_eq!(&lat.prime, prime);
    let pm = prime.magnitude().clone();
    let lb = lower_bound(ctx, g, prime)?;
    if let Some(cut) = &opts.cutoff {
        if &lb >= cut {
            return Ok(PDepth::AtLeast { lower: lb });
        }
    }
    // central elements of class-2 groups have an exact lattice answer
    if central_class2_applicable(ctx, g) {
        match central_class2_p_depth(ctx, g, prime, opts.cutoff.as_ref())? {
            Some(CentralDepth::Exact(order, kernel)) => {
                let mut cert = certificate(p, g, prime, &kernel)?;
                cert.exact = true;
                return Ok(PDepth::Exact { order, cert });
            }
            Some(CentralDepth::AtLeast(lower)) => {
                return Ok(PDepth::AtLeast { lower: lower.max(lb) });
            }
            None => {} // enumeration cap hit: fall through to the search
        }
    }
    // certified upper bound first: when it meets the arithmetic lower
    // bound the search is over before any enumeration
    let mut upper = descend_cert(ctx, g, prime, &lb)?;
    if upper.order <= lb {
        upper.exact = true;
        let order = upper.order.clone();
        return Ok(PDepth::Exact { order, cert: upper });
    }
    // breadth-first certification: level m complete and separating-free
    // means the depth exceeds p^m
    let mut budget = opts.node_cap;
    lat.raise_cap(opts.node_cap.saturating_mul(16));
    let mut m = 1u32;
    loop {
        // invariant: every kernel of index < p^m contains g
        let bound = pm.pow(m);
        if bound >= upper.order {
            upper.exact = true;
            let order = upper.order.clone();
            return Ok(PDepth::Exact { order, cert: upper });
        }
        if let Some(cut) = &opts.cutoff {
            if &bound >= cut {
                let order = upper.order.clone();
                return Ok(PDepth::Bounded {
                    lower: bound.max(lb),
                    upper: order,
                    cert: upper,
                });
            }
        }
        while lat.complete_levels() < m {
            if !lat.grow(ctx, &mut budget)? {
                // budget exhausted inside level m; the levels below are
                // complete, so a separating kernel in the partial level is
                // already minimal
                if bound >= lb {
                    for k in lat.pending() {
                        if !k.member(p, g) {
                            let mut cert = certificate(p, g, prime, k)?;
                            cert.exact = true;
                            return Ok(PDepth::Exact { order: bound, cert });
                        }
                    }
                }
                let order = upper.order.clone();
                return Ok(PDepth::Bounded {
                    lower: bound.max(lb),
                    upper: order,
                    cert: upper,
                });
            }
        }
        if bound >= lb {
            for k in lat.level(m) {
                if !k.member(p, g) {
                    let mut cert = certificate(p, g, prime, k)?;
                    cert.exact = true;
                    return Ok(PDepth::Exact { order: bound, cert });
                }
            }
        }
        m += 1;
    }
}

/// Shared kernel lattices for repeated depth computations on one group.
#[derive(Default)]
pub struct DepthMemo {
    lattices: HashMap<BigInt, KernelLattice>,
}

impl DepthMemo {
    pub fn new() -> DepthMemo {
        DepthMemo::default()
    }

    fn lattice(
        &mut self,
        ctx: &GroupContext,
        prime: &BigInt,
        opts: &SearchOptions,
    ) -> &mut KernelLattice {
        self.lattices.entry(prime.clone()).or_insert_with(|| {
            KernelLattice::new(ctx, prime, opts.node_cap.saturating_mul(16))
        })
    }
}

#[derive(Clone)]
pub struct DepthResult {
    pub order: BigUint,
    pub prime: BigInt,
    pub cert: WitnessCertificate,
    pub exact: bool,
    /// primes for which the search was inconclusive below the final value
    pub unresolved: Vec<BigInt>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start..).filter(|&n| is_prime(n))
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&m| is_prime(m)).collect()
}

/// Depth of g: minimum of the p-depths over all primes, with a
/// certificate for the winning prime.
pub fn depth(ctx: &GroupContext, g: &Element, opts: &SearchOptions) -> Result<DepthResult> {
    let mut memo = DepthMemo::new();
    depth_with(ctx, g, opts, &mut memo)
}

/// `depth` against shared kernel lattices (see [`DepthMemo`]); batch
/// callers computing many depths on one group should reuse the memo.
pub fn depth_with(
    ctx: &GroupContext,
    g: &Element,
    opts: &SearchOptions,
    memo: &mut DepthMemo,
) -> Result<DepthResult> {
    if g.is_identity() {
        return Err(Error::input("the identity has no separating quotient"));
    }
    let mut best: Option<(BigUint, BigInt, WitnessCertificate)> = None;
    let mut open: Vec<(BigInt, BigUint)> = Vec::new();
    for q in primes_from(2) {
        if let Some((b, _, _)) = &best {
            if &BigUint::from(q) >= b {
                break;
            }
        }
        let prime = BigInt::from(q);
        let lb = lower_bound(ctx, g, &prime)?;
        if let Some((b, _, _)) = &best {
            if &lb >= b {
                continue;
            }
        }
        let sub_opts = SearchOptions {
            node_cap: opts.node_cap,
            cutoff: best.as_ref().map(|(b, _, _)| b.clone()),
        };
        let lat = memo.lattice(ctx, &prime, &sub_opts);
        match p_depth_with(ctx, g, &prime, &sub_opts, lat)? {
            PDepth::Exact { order, cert } => {
                if best.as_ref().map_or(true, |(b, _, _)| &order < b) {
                    best = Some((order, prime, cert));
                }
            }
            PDepth::Bounded { lower, upper, cert } => {
                if best.as_ref().map_or(true, |(b, _, _)| &upper < b) {
                    best = Some((upper, prime.clone(), cert));
                }
                open.push((prime, lower));
            }
            PDepth::AtLeast { lower } => {
                open.push((prime, lower));
            }
        }
    }
    let (order, prime, cert) =
        best.ok_or_else(|| Error::inconsistent("no prime produced a quotient"))?;
    // a prime is only genuinely unresolved if its certified lower bound
    // still leaves room below the final minimum
    let unresolved: Vec<BigInt> = open
        .into_iter()
        .filter(|(_, lower)| lower < &order)
        .map(|(q, _)| q)
        .collect();
    let exact = unresolved.is_empty();
    Ok(DepthResult { order, prime, cert, exact, unresolved })
}

/// Best upper bound from a family of candidate kernels: the minimal order
/// among the quotients by the closures N^p·K in which g survives. Empty
/// family means just the verbal subgroup N^p. Certificates are flagged
/// non-exact.
pub fn witness_upper_bound(
    ctx: &GroupContext,
    g: &Element,
    prime: &BigInt,
    kernels: &[SubgroupBasis],
) -> Result<WitnessCertificate> {
    let p = &ctx.pres;
    let mut candidates: Vec<SubgroupBasis> = Vec::new();
    if kernels.is_empty() {
        candidates.push(power_subgroup_closure(p, prime, None));
    } else {
        for k in kernels {
            candidates.push(power_subgroup_closure(p, prime, Some(k)));
        }
    }
    let mut best: Option<WitnessCertificate> = None;
    for k in &candidates {
        if k.member(p, g) {
            continue;
        }
        let cert = certificate(p, g, prime, k)?;
        if best.as_ref().map_or(true, |b| cert.order < b.order) {
            best = Some(cert);
        }
    }
    best.ok_or_else(|| Error::input("no upper bound from family: element dies in all candidates"))
}

pub struct SandwichReport {
    pub basis_orders: Vec<(Element, BigUint)>,
    pub target_order: BigUint,
    pub holds: bool,
}

/// The two-sided inequality: the p-depth of a primitive element of the
/// isolated bottom of the filtration is sandwiched between the min and
/// max of the basis element p-depths.
pub fn sandwich_check(
    ctx: &GroupContext,
    basis: &[Element],
    g: &Element,
    prime: &BigInt,
    opts: &SearchOptions,
) -> Result<SandwichReport> {
    let run = |x: &Element| -> Result<BigUint> {
        match p_depth(ctx, x, prime, opts)? {
            PDepth::Exact { order, .. } => Ok(order),
            _ => Err(Error::resource("sandwich check needs exact p-depths")),
        }
    };
    let mut basis_orders = Vec::new();
    for b in basis {
        basis_orders.push((b.clone(), run(b)?));
    }
    let target_order = run(g)?;
    let min = basis_orders.iter().map(|(_, o)| o).min().cloned();
    let max = basis_orders.iter().map(|(_, o)| o).max().cloned();
    let holds = match (min, max) {
        (Some(lo), Some(hi)) => lo <= target_order && target_order <= hi,
        _ => false,
    };
    Ok(SandwichReport { basis_orders, target_order, holds })
}

#[cfg(test)]
mod witness_tests {
    use super::*;
    use crate::word::Word;

    fn heisenberg_ctx() -> GroupContext {
        let p = PcPresentation::new(
            vec!["x1".into(), "x2".into(), "x3".into()],
            vec![1, 1, 2],
            vec![(0, 1, Word::gen(2, 1))],
            vec![None, None, None],
        )
        .unwrap();
        GroupContext::new(p).unwrap()
    }

    fn elem(coords: &[i64]) -> Element {
        Element { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
    }

    #[test]
    fn heisenberg_x3_p_depth_is_p_cubed() {
        let ctx = heisenberg_ctx();
        let g = elem(&[0, 0, 1]);
        for q in [2u32, 3, 5, 7] {
            match p_depth(&ctx, &g, &BigInt::from(q), &SearchOptions::default()).unwrap() {
                PDepth::Exact { order, cert } => {
                    assert_eq!(order, BigUint::from(q).pow(3));
                    verify_certificate(&ctx.pres, &g, &cert).unwrap();
                }
                _ => panic!("expected exact result"),
            }
        }
    }

    #[test]
    fn heisenberg_x1_p_depth_is_p() {
        let ctx = heisenberg_ctx();
        let g = elem(&[1, 0, 0]);
        match p_depth(&ctx, &g, &BigInt::from(3), &SearchOptions::default()).unwrap() {
            PDepth::Exact { order, .. } => assert_eq!(order, BigUint::from(3u32)),
            _ => panic!("expected exact result"),
        }
    }

    #[test]
    fn depth_of_scaled_central_element() {
        let ctx = heisenberg_ctx();
        // x3^6 survives in the Heisenberg group over Z/4 (order 64), and
        // no smaller quotient works: the commutator must keep order 4,
        // which forces both generators to have order >= 4
        let g = elem(&[0, 0, 6]);
        let r = depth(&ctx, &g, &SearchOptions::default()).unwrap();
        assert!(r.exact);
        assert_eq!(r.prime, BigInt::from(2));
        assert_eq!(r.order, BigUint::from(64u32));
        verify_certificate(&ctx.pres, &g, &r.cert).unwrap();
        // x3 itself: prime 2, order 8
        let r2 = depth(&ctx, &elem(&[0, 0, 1]), &SearchOptions::default()).unwrap();
        assert!(r2.exact);
        assert_eq!(r2.order, BigUint::from(8u32));
    }

    #[test]
    fn depth_in_free_abelian() {
        let p = PcPresentation::new(
            vec!["a".into(), "b".into()],
            vec![1, 1],
            vec![],
            vec![None, None],
        )
        .unwrap();
        let ctx = GroupContext::new(p).unwrap();
        // (12, 0): v_2 = 2 so 2-depth 8, v_3 = 1 so 3-depth 9; 5-depth 5 wins
        let r = depth(&ctx, &elem(&[12, 0]), &SearchOptions::default()).unwrap();
        assert!(r.exact);
        assert_eq!(r.order, BigUint::from(5u32));
        // primitive element: depth 2
        let r2 = depth(&ctx, &elem(&[3, 2]), &SearchOptions::default()).unwrap();
        assert_eq!(r2.order, BigUint::from(2u32));
    }

    #[test]
    fn lower_bounds_match_known_cases() {
        let ctx = heisenberg_ctx();
        let lb = lower_bound(&ctx, &elem(&[0, 0, 1]), &BigInt::from(5)).unwrap();
        assert_eq!(lb, BigUint::from(125u32));
        // v_2(12^4) = 8: bound 2^(2+8+1)
        let g = elem(&[0, 0, 20736]);
        let lb2 = lower_bound(&ctx, &g, &BigInt::from(2)).unwrap();
        assert_eq!(lb2, BigUint::from(2u32).pow(11));
    }

    #[test]
    fn sandwich_and_upper_bound() {
        let ctx = heisenberg_ctx();
        let g = elem(&[0, 0, 1]);
        let cert = witness_upper_bound(&ctx, &g, &BigInt::from(3), &[]).unwrap();
        assert_eq!(cert.order, BigUint::from(27u32));
        assert!(!cert.exact);
        verify_certificate(&ctx.pres, &g, &cert).unwrap();
        let rep = sandwich_check(
            &ctx,
            &[elem(&[0, 0, 1])],
            &g,
            &BigInt::from(3),
            &SearchOptions::default(),
        )
        .unwrap();
        assert!(rep.holds);
        assert_eq!(rep.target_order, BigUint::from(27u32));
    }
}
