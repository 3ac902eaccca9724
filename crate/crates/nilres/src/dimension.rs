//! Residual-prime buckets, density-based dimension estimators, the
//! constructive upper bound for the real residual dimension, and the
//! lower-bound element sequence.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcp::Element;
use crate::section::AbelianSection;
use crate::structure::{
    self, isolator, order_mod, primitive_decompose, weight_cut,
};
use crate::subgroup::{Closure, SubgroupBasis};
use crate::witness::{
    depth, p_depth, primes_upto, GroupContext, PDepth, SearchOptions,
};
use crate::zlin;

/// Bucket stabilization tolerance between the two half-windows.
pub const DENSITY_TOLERANCE: f64 = 0.1;
/// Minimum stabilized density to count a bucket as positive.
pub const DENSITY_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct RpBuckets {
    pub element: String,
    pub p_max: u64,
    /// exponent i -> sorted primes p with p-depth exactly p^i
    pub buckets: BTreeMap<u32, Vec<u64>>,
    pub densities: BTreeMap<u32, f64>,
    /// per-bucket density over the lower and upper half-windows
    pub window_densities: BTreeMap<u32, (f64, f64)>,
    pub unresolved: Vec<u64>,
    pub tame_candidate: bool,
    pub low_dimensional_vanishing_candidate: bool,
}

fn exponent_of(order: &BigUint, prime: u64) -> Result<u32> {
    let p = BigUint::from(prime);
    let mut o = order.clone();
    let mut e = 0u32;
    while (&o % &p).is_zero() {
        o /= &p;
        e += 1;
    }
    if o.is_one() && e >= 1 {
        Ok(e)
    } else {
        Err(Error::inconsistent("witness order is not a prime power"))
    }
}

/// Exponent i when the p-depth of x at q resolves to q^i, None when the
/// search hits its resource cap.
fn depth_exponent(
    ctx: &GroupContext,
    x: &Element,
    q: u64,
    node_cap: usize,
) -> Result<Option<u32>> {
    let sub = SearchOptions { node_cap, cutoff: None };
    match p_depth(ctx, x, &BigInt::from(q), &sub) {
        Ok(PDepth::Exact { order, .. }) => Ok(Some(exponent_of(&order, q)?)),
        Ok(_) => Ok(None),
        Err(Error::Resource(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Buckets all primes <= p_max by the exponent of the p-depth of x.
pub fn rp_sets(
    ctx: &GroupContext,
    x: &Element,
    p_max: u64,
    opts: &SearchOptions,
) -> Result<RpBuckets> {
    rp_sets_threaded(ctx, x, p_max, opts, 1)
}

/// Same buckets, with the per-prime depth searches spread over worker
/// threads; the assembly is deterministic regardless of thread count.
pub fn rp_sets_threaded(
    ctx: &GroupContext,
    x: &Element,
    p_max: u64,
    opts: &SearchOptions,
    threads: usize,
) -> Result<RpBuckets> {
    if p_max < 7 {
        return Err(Error::input("p_max must be at least 7"));
    }
    let primes = primes_upto(p_max);
    let results: Vec<Result<Option<u32>>> = if threads <= 1 {
        primes
            .iter()
            .map(|&q| depth_exponent(ctx, x, q, opts.node_cap))
            .collect()
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<Result<Option<u32>>>>> =
            primes.iter().map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|s| {
            for _ in 0..threads.min(primes.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= primes.len() {
                        break;
                    }
                    let r = depth_exponent(ctx, x, primes[i], opts.node_cap);
                    *slots[i].lock().unwrap() = Some(r);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().unwrap().expect("worker filled slot"))
            .collect()
    };
    let mut buckets: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    let mut unresolved = Vec::new();
    for (&q, r) in primes.iter().zip(results) {
        match r? {
            Some(i) => buckets.entry(i).or_default().push(q),
            None => unresolved.push(q),
        }
    }
    let resolved = (primes.len() - unresolved.len()) as f64;
    let half = p_max / 2;
    let lower_count = primes.iter().filter(|&&q| q <= half).count() as f64;
    let upper_count = primes.iter().filter(|&&q| q > half).count() as f64;
    let mut densities = BTreeMap::new();
    let mut window_densities = BTreeMap::new();
    let mut tame = true;
    for (&i, b) in &buckets {
        densities.insert(i, b.len() as f64 / resolved.max(1.0));
        let lo = b.iter().filter(|&&q| q <= half).count() as f64 / lower_count.max(1.0);
        let hi = b.iter().filter(|&&q| q > half).count() as f64 / upper_count.max(1.0);
        window_densities.insert(i, (lo, hi));
        if (lo - hi).abs() > DENSITY_TOLERANCE {
            tame = false;
        }
    }
    // top bucket = the largest exponent whose stabilized density clears
    // the floor; vanishing candidate if everything below it is absent
    // from the upper half-window
    let top = window_densities
        .iter()
        .filter(|(_, (lo, hi))| (lo - hi).abs() <= DENSITY_TOLERANCE && *hi >= DENSITY_FLOOR)
        .map(|(&i, _)| i)
        .max();
    let ldv = match top {
        Some(t) => buckets
            .iter()
            .filter(|(&i, _)| i < t)
            .all(|(_, b)| b.iter().all(|&q| q <= half)),
        None => false,
    };
    Ok(RpBuckets {
        element: ctx.pres.element_string(x),
        p_max,
        buckets,
        densities,
        window_densities,
        unresolved,
        tame_candidate: tame,
        low_dimensional_vanishing_candidate: ldv,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub p_max: u64,
    pub dim_rfl: u32,
    pub dim_rfu: u32,
    pub dim_arf: Option<u32>,
    pub psi_rd_upper: u32,
    pub density_tolerance: f64,
    pub density_floor: f64,
    pub approximate_j_flag: bool,
    pub elements: Vec<String>,
}

/// Basis of the isolated bottom of the filtration plus primitive small
/// combinations, capped.
fn primitive_candidates(ctx: &GroupContext, cap: usize) -> Result<Vec<Element>> {
    let p = &ctx.pres;
    let bottom = isolator(p, &ctx.lcs[ctx.class - 1])?;
    let rows: Vec<Element> = bottom.rows().into_iter().cloned().collect();
    fn push(out: &mut Vec<Element>, g: Element) {
        if !g.is_identity() && !out.contains(&g) {
            out.push(g);
        }
    }
    let mut out: Vec<Element> = Vec::new();
    for r in &rows {
        push(&mut out, r.clone());
    }
    // 0/±1 combinations of pairs of basis rows, primitivized
    'outer: for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            for (si, sj) in [(1i64, 1i64), (1, -1)] {
                let a = p.power(&rows[i], &BigInt::from(si));
                let b = p.power(&rows[j], &BigInt::from(sj));
                let g = p.multiply(&a, &b);
                let g = match primitive_decompose(p, &g) {
                    Some((z, _)) => z,
                    None => g,
                };
                push(&mut out, g);
                if out.len() >= cap {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

/// Per-element estimates from the buckets: the lower estimate is the
/// least exponent whose bucket reaches into the top half-window; the
/// upper estimate is the least exponent with stabilized positive density.
fn bucket_estimates(b: &RpBuckets) -> (Option<u32>, Option<u32>) {
    let half = b.p_max / 2;
    let rfl = b
        .buckets
        .iter()
        .filter(|(_, primes)| primes.iter().any(|&q| q > half))
        .map(|(&i, _)| i)
        .min();
    let rfu = b
        .window_densities
        .iter()
        .filter(|(_, (lo, hi))| (lo - hi).abs() <= DENSITY_TOLERANCE && *hi >= DENSITY_FLOOR)
        .map(|(&i, _)| i)
        .min();
    (rfl, rfu)
}

pub fn dimension_report(
    ctx: &GroupContext,
    p_max: u64,
    opts: &SearchOptions,
) -> Result<DimensionReport> {
    let candidates = primitive_candidates(ctx, 12)?;
    if candidates.is_empty() {
        return Err(Error::input("no primitive candidates in the bottom section"));
    }
    let mut dim_rfl = 0u32;
    let mut dim_rfu = 0u32;
    let mut names = Vec::new();
    for z in &candidates {
        let b = rp_sets(ctx, z, p_max, opts)?;
        let (rfl, rfu) = bucket_estimates(&b);
        let rfl = rfl.ok_or_else(|| {
            Error::resource("no bucket reaches the top half-window; raise p_max")
        })?;
        let rfu = rfu.unwrap_or(rfl);
        dim_rfl = dim_rfl.max(rfl);
        dim_rfu = dim_rfu.max(rfu);
        names.push(ctx.pres.element_string(z));
    }
    let (psi, _) = psi_rd_upper(ctx)?;
    let c = ctx.class as u32;
    if c > 1 && dim_rfl < c + 1 {
        return Err(Error::inconsistent(format!(
            "dim_RFL estimate {} below the step bound {}",
            dim_rfl,
            c + 1
        )));
    }
    if dim_rfl > dim_rfu {
        return Err(Error::inconsistent(
            "dim_RFL estimate exceeds dim_RFU estimate",
        ));
    }
    if dim_rfu > psi {
        return Err(Error::inconsistent(
            "dim_RFU estimate exceeds the psi_RD upper bound",
        ));
    }
    let dim_arf = if dim_rfl == dim_rfu { Some(dim_rfl) } else { None };
    Ok(DimensionReport {
        p_max,
        dim_rfl,
        dim_rfu,
        dim_arf,
        psi_rd_upper: psi,
        density_tolerance: DENSITY_TOLERANCE,
        density_floor: DENSITY_FLOOR,
        approximate_j_flag: true,
        elements: names,
    })
}

/// Constructive upper bound for the real residual dimension, with the
/// chain of kernels realizing it for the extremal candidate.
pub fn psi_rd_upper(ctx: &GroupContext) -> Result<(u32, Vec<SubgroupBasis>)> {
    let p = &ctx.pres;
    if ctx.class <= 1 {
        return Ok((1, Vec::new()));
    }
    // candidates: primitive elements of the saturation of [gamma_{c-1}, N]
    let mut comms = Vec::new();
    for a in ctx.lcs[ctx.class - 2].rows() {
        for j in 0..p.rank() {
            let w = p.commutator(a, &p.generator(j));
            if !w.is_identity() {
                comms.push(w);
            }
        }
    }
    let span = SubgroupBasis::from_generators(p, &comms, Closure::Normal);
    let jset = isolator(p, &span)?;
    let rows: Vec<Element> = jset.rows().into_iter().cloned().collect();
    let mut candidates: Vec<Element> = rows.clone();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            for s in [1i64, -1] {
                let g = p.multiply(&rows[i], &p.power(&rows[j], &BigInt::from(s)));
                if let Some((z, _)) = primitive_decompose(p, &g) {
                    if !candidates.contains(&z) {
                        candidates.push(z);
                    }
                }
            }
        }
        if candidates.len() >= 10 {
            break;
        }
    }
    let mut best_val = 1u32;
    let mut best_chain = Vec::new();
    for z in &candidates {
        let mut chain = vec![SubgroupBasis::trivial(p)];
        let v = psi_recurse(ctx, SubgroupBasis::trivial(p), z, 0, &mut chain)?;
        if v > best_val {
            best_val = v;
            best_chain = chain;
        }
    }
    Ok((best_val, best_chain))
}

const PSI_BRANCH_CAP: usize = 6;

fn psi_recurse(
    ctx: &GroupContext,
    k: SubgroupBasis,
    z: &Element,
    depth_guard: usize,
    chain: &mut Vec<SubgroupBasis>,
) -> Result<u32> {
    let p = &ctx.pres;
    if depth_guard > p.rank() {
        return Err(Error::inconsistent("psi recursion failed to terminate"));
    }
    let zc = structure::center_mod_with(p, &ctx.lcs, &k)?;
    let sec = AbelianSection::new(p, &zc, &k)?;
    let t = sec.rank();
    let rprime = t - k.num_rows();
    if rprime <= 1 {
        // one-dimensional center: Hirsch length of N/K is the value
        return Ok((p.rank() - k.num_rows()) as u32);
    }
    // coordinates of z in the free quotient Z^{r'} of the section
    let v = sec.coords(p, z)?;
    let (_, d, _, vinv) = zlin::snf_transforms(&sec.rel);
    let s = (0..sec.rel.len().min(t))
        .filter(|&i| !d[i][i].is_zero())
        .count();
    // transformed coords: w = v * V; we need only the free part, which is
    // v * V restricted to columns s..t; compute via solving with Vinv
    let vmat = {
        // V = inverse of vinv; w = v * V  <=>  w * Vinv = v
        // solve for w by expressing v over the rows of Vinv
        zlin::solve_left(&vinv, &v)
            .ok_or_else(|| Error::inconsistent("section coordinates outside the lattice"))?
    };
    let wfree: Vec<BigInt> = vmat[s..].to_vec();
    if wfree.iter().all(|x| x.is_zero()) {
        return Err(Error::input("psi candidate dies in the section"));
    }
    // primitivize
    let mut content = BigInt::zero();
    for x in &wfree {
        content = content.gcd(x);
    }
    let zfree: Vec<BigInt> = wfree.iter().map(|x| x / &content).collect();
    let r = zfree.len();
    let base = zlin::unimodular_complement(&[zfree.clone()].to_vec(), r)
        .ok_or_else(|| Error::inconsistent("complement of a primitive vector failed"))?;
    // complement variants: shear each base row by small multiples of z
    let mut variants: Vec<Vec<Vec<BigInt>>> = vec![base.clone()];
    for shift in [1i64, -1] {
        let mut alt = base.clone();
        for row in alt.iter_mut() {
            for (x, zc) in row.iter_mut().zip(zfree.iter()) {
                *x += zc * BigInt::from(shift);
            }
        }
        variants.push(alt);
        if variants.len() >= PSI_BRANCH_CAP {
            break;
        }
    }
    let mut best: Option<u32> = None;
    let mut best_sub_chain: Vec<SubgroupBasis> = Vec::new();
    for comp in variants {
        // lift complement rows back to ambient elements
        let mut gens: Vec<Element> = k.rows().into_iter().cloned().collect();
        for crow in &comp {
            let mut w = vec![BigInt::zero(); t];
            w[s..].clone_from_slice(crow);
            let full = zlin::mat_mul(&vec![w], &vinv);
            gens.push(sec.element_from(p, &full[0]));
        }
        let knew = SubgroupBasis::from_generators(p, &gens, Closure::Normal);
        let knew = isolator(p, &knew)?;
        if knew.member(p, z) {
            continue;
        }
        let mut sub_chain = vec![knew.clone()];
        let val = psi_recurse(ctx, knew, z, depth_guard + 1, &mut sub_chain)?;
        if best.map_or(true, |b| val < b) {
            best = Some(val);
            best_sub_chain = sub_chain;
        }
    }
    let best = best.ok_or_else(|| {
        Error::inconsistent("no complement avoids the psi candidate")
    })?;
    chain.extend(best_sub_chain);
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerSeqRow {
    pub prime: u64,
    pub m: String,
    pub element: String,
    pub expected_depth: String,
    pub computed_depth: Option<String>,
    pub verified: bool,
    pub falsification: bool,
    pub error: Option<String>,
}

/// The lower-bound element sequence: m_j = lcm(1..p_j-1)^(d+1) with d the
/// lower-dimension estimate, elements x^{k m_j}, each depth-verified.
pub fn lower_bound_sequence(
    ctx: &GroupContext,
    x: &Element,
    count: usize,
    opts: &SearchOptions,
) -> Result<Vec<LowerSeqRow>> {
    let p = &ctx.pres;
    let c = ctx.class;
    if c <= 1 {
        return Err(Error::input("lower-bound sequence requires step length > 1"));
    }
    let count = count.min(4).max(1);
    let bottom = isolator(p, &ctx.lcs[c - 1])?;
    if !bottom.member(p, x) {
        return Err(Error::input("element must lie in the isolated bottom section"));
    }
    let k = order_mod(p, &ctx.lcs[c - 1], x)?;
    let dim = c as u32 + 1;
    // primes exceeding both k and the small primes of the construction
    let start = k
        .to_u64()
        .ok_or_else(|| Error::resource("saturation index too large"))?
        .max(4)
        + 1;
    let primes: Vec<u64> = crate::witness::primes_from(start).take(count).collect();
    let mut rows = Vec::new();
    for pj in primes {
        let mut m = BigUint::one();
        for n in 1..pj {
            m = m.lcm(&BigUint::from(n));
        }
        let m = m.pow(dim + 1);
        let exp = BigInt::from(m.clone()) * BigInt::from(k.clone());
        let g = p.power(x, &exp);
        let expected = BigUint::from(pj).pow(dim);
        let row = match depth(ctx, &g, opts) {
            Ok(r) => {
                let ok = r.order == expected && r.exact;
                LowerSeqRow {
                    prime: pj,
                    m: m.to_string(),
                    element: p.element_string(&g),
                    expected_depth: expected.to_string(),
                    computed_depth: Some(r.order.to_string()),
                    verified: ok,
                    falsification: r.exact && r.order != expected,
                    error: None,
                }
            }
            Err(Error::Resource(msg)) => LowerSeqRow {
                prime: pj,
                m: m.to_string(),
                element: p.element_string(&g),
                expected_depth: expected.to_string(),
                computed_depth: None,
                verified: false,
                falsification: false,
                error: Some(msg),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// M_c and the weight cut, exposed for report plumbing.
pub fn bottom_span(ctx: &GroupContext) -> (usize, usize) {
    let c = *ctx.pres.weights().iter().max().unwrap_or(&1);
    let cut = weight_cut(&ctx.pres, c);
    (cut, ctx.pres.rank() - cut)
}

#[cfg(test)]
mod dimension_tests {
    use super::*;
    use crate::catalog;

    fn ctx_of(name: &str) -> GroupContext {
        GroupContext::new(catalog::by_name(name).unwrap()).unwrap()
    }

    fn elem(coords: &[i64]) -> Element {
        Element { coords: coords.iter().map(|&c| BigInt::from(c)).collect() }
    }

    #[test]
    fn psi_values_match_expectations() {
        assert_eq!(psi_rd_upper(&ctx_of("abelian(2)")).unwrap().0, 1);
        assert_eq!(psi_rd_upper(&ctx_of("heisenberg")).unwrap().0, 3);
        assert_eq!(psi_rd_upper(&ctx_of("filiform(4)")).unwrap().0, 4);
        assert_eq!(psi_rd_upper(&ctx_of("counterexample_g")).unwrap().0, 5);
    }

    #[test]
    fn heisenberg_buckets_all_three() {
        let ctx = ctx_of("heisenberg");
        let b = rp_sets(&ctx, &elem(&[0, 0, 1]), 60, &SearchOptions::default()).unwrap();
        assert!(b.unresolved.is_empty());
        assert_eq!(b.buckets.len(), 1);
        let (i, primes) = b.buckets.iter().next().unwrap();
        assert_eq!(*i, 3);
        assert_eq!(primes.len(), primes_upto(60).len());
        assert!(b.tame_candidate);
    }

    #[test]
    fn abelian_bucket_one() {
        let ctx = ctx_of("abelian(2)");
        let b = rp_sets(&ctx, &elem(&[1, 0]), 50, &SearchOptions::default()).unwrap();
        assert_eq!(b.buckets.len(), 1);
        assert!(b.buckets.contains_key(&1));
        assert_eq!(b.buckets[&1].len(), primes_upto(50).len());
    }

    #[test]
    fn heisenberg_dimension_report() {
        let ctx = ctx_of("heisenberg");
        let r = dimension_report(&ctx, 60, &SearchOptions::default()).unwrap();
        assert_eq!(r.dim_rfl, 3);
        assert_eq!(r.dim_rfu, 3);
        assert_eq!(r.dim_arf, Some(3));
        assert_eq!(r.psi_rd_upper, 3);
    }

    #[test]
    fn lower_sequence_heisenberg() {
        let ctx = ctx_of("heisenberg");
        let rows =
            lower_bound_sequence(&ctx, &elem(&[0, 0, 1]), 1, &SearchOptions::default())
                .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].prime, 5);
        assert_eq!(rows[0].m, "20736"); // 12^4
        assert_eq!(rows[0].expected_depth, "125");
        assert!(rows[0].verified, "{:?}", rows[0]);
    }
}
