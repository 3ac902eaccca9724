//! Builtin groups: free abelian, Heisenberg, the filiform family, the
//! rank-6 counterexample group, and direct products. Every entry is
//! consistency-checked and weight-validated at build time.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::pcp::{PcPresentation, PowerRelation};
use crate::structure;
use crate::word::Word;

pub fn abelian(d: usize) -> Result<PcPresentation> {
    if d == 0 {
        return Err(Error::input("abelian rank must be at least 1"));
    }
    let names = (1..=d).map(|i| format!("x{}", i)).collect();
    PcPresentation::new(names, vec![1; d], vec![], vec![None; d])
}

pub fn heisenberg() -> Result<PcPresentation> {
    PcPresentation::new(
        vec!["x1".into(), "x2".into(), "x3".into()],
        vec![1, 1, 2],
        vec![(0, 1, Word::gen(2, 1))],
        vec![None, None, None],
    )
}

/// F_h: [x1, xi] = x_{i+1} for 2 <= i <= h-1; step length h-1.
pub fn filiform(h: usize) -> Result<PcPresentation> {
    if h < 3 {
        return Err(Error::input("filiform rank must be at least 3"));
    }
    let names = (1..=h).map(|i| format!("x{}", i)).collect();
    let mut weights = vec![1u32, 1];
    weights.extend(2..h as u32);
    let comms = (1..h - 1).map(|i| (0, i, Word::gen(i + 1, 1))).collect();
    PcPresentation::new(names, weights, comms, vec![None; h])
}

/// The rank-6 step-2 group with [x,w] = [y,z] = u, [x,z] = v,
/// [y,w] = v^{-1}, u and v central; h = 6 and Z of rank 2.
pub fn counterexample_g() -> Result<PcPresentation> {
    let names = vec![
        "x".to_string(),
        "y".to_string(),
        "w".to_string(),
        "z".to_string(),
        "u".to_string(),
        "v".to_string(),
    ];
    let comms = vec![
        (0, 2, Word::gen(4, 1)),  // [x,w] = u
        (0, 3, Word::gen(5, 1)),  // [x,z] = v
        (1, 2, Word::gen(5, -1)), // [y,w] = v^{-1}
        (1, 3, Word::gen(4, 1)),  // [y,z] = u
    ];
    PcPresentation::new(names, vec![1, 1, 1, 1, 2, 2], comms, vec![None; 6])
}

/// Direct product with generators re-sorted by weight so the result is
/// again a weighted pc presentation.
pub fn direct_product(a: &PcPresentation, b: &PcPresentation) -> Result<PcPresentation> {
    // stable sort by weight, keeping (factor, original index)
    let mut gens: Vec<(usize, usize, u32)> = Vec::new();
    for i in 0..a.rank() {
        gens.push((0, i, a.weights()[i]));
    }
    for i in 0..b.rank() {
        gens.push((1, i, b.weights()[i]));
    }
    gens.sort_by_key(|&(_, _, w)| w);
    let mut map_a = vec![0usize; a.rank()];
    let mut map_b = vec![0usize; b.rank()];
    let mut names = Vec::new();
    let mut weights = Vec::new();
    for (new_idx, &(f, i, w)) in gens.iter().enumerate() {
        if f == 0 {
            map_a[i] = new_idx;
            names.push(format!("a_{}", a.names()[i]));
        } else {
            map_b[i] = new_idx;
            names.push(format!("b_{}", b.names()[i]));
        }
        weights.push(w);
    }
    let remap = |w: &Word, map: &[usize]| -> Word {
        Word::new(
            w.letters()
                .iter()
                .map(|(g, e)| (map[*g], e.clone()))
                .collect(),
        )
    };
    let mut comms = Vec::new();
    for (p, map) in [(a, &map_a), (b, &map_b)] {
        for i in 0..p.rank() {
            for j in (i + 1)..p.rank() {
                let w = p.commutator_word(i, j);
                if w.is_empty() {
                    continue;
                }
                let (ni, nj) = (map[i], map[j]);
                let (lo, hi) = (ni.min(nj), ni.max(nj));
                let word = if ni < nj {
                    remap(w, map)
                } else {
                    // order swapped by the sort: [x_hi, x_lo] = w^{-1}
                    remap(&w.inverse(), map)
                };
                comms.push((lo, hi, word));
            }
        }
    }
    let mut pows: Vec<Option<PowerRelation>> = vec![None; gens.len()];
    for (p, map) in [(a, &map_a), (b, &map_b)] {
        for i in 0..p.rank() {
            if let Some(pr) = p.power_relation(i) {
                pows[map[i]] = Some(PowerRelation {
                    exponent: pr.exponent.clone(),
                    tail: remap(&pr.tail, map),
                });
            }
        }
    }
    PcPresentation::new(names, weights, comms, pows)
}

/// Builds a catalog entry by name, e.g. "heisenberg", "abelian(2)",
/// "filiform(5)", "counterexample_g", "direct_product(heisenberg,abelian(1))".
pub fn by_name(spec: &str) -> Result<PcPresentation> {
    let p = parse_spec(spec.trim())?;
    let failures = p.consistency_check();
    if !failures.is_empty() {
        return Err(Error::inconsistent(format!(
            "catalog entry {} failed consistency ({} triples)",
            spec,
            failures.len()
        )));
    }
    if !p.is_finite() {
        structure::validate_weights(&p)?;
    }
    Ok(p)
}

fn parse_spec(s: &str) -> Result<PcPresentation> {
    if let Some(rest) = s.strip_prefix("direct_product(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::input("unbalanced parentheses in catalog name"))?;
        // split at the top-level comma
        let mut depth = 0usize;
        let mut split = None;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let i = split.ok_or_else(|| Error::input("direct_product needs two arguments"))?;
        let a = parse_spec(inner[..i].trim())?;
        let b = parse_spec(inner[i + 1..].trim())?;
        return direct_product(&a, &b);
    }
    if let Some(arg) = param_of(s, "abelian") {
        return abelian(arg?);
    }
    if let Some(arg) = param_of(s, "filiform") {
        return filiform(arg?);
    }
    match s {
        "heisenberg" => heisenberg(),
        "counterexample_g" => counterexample_g(),
        _ => Err(Error::input(format!("unknown catalog entry: {}", s))),
    }
}

fn param_of(s: &str, name: &str) -> Option<Result<usize>> {
    let rest = s.strip_prefix(name)?.strip_prefix('(')?;
    let num = rest.strip_suffix(')')?;
    Some(
        num.trim()
            .parse::<usize>()
            .map_err(|_| Error::input(format!("bad parameter for {}: {}", name, num))),
    )
}

/// Scale all generators by m: convenience for tests (x_i^m words).
pub fn power_word(i: usize, m: i64) -> Word {
    Word::gen(i, BigInt::from(m))
}

#[cfg(test)]
mod catalog_tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn entries_build_and_validate() {
        for name in [
            "abelian(2)",
            "heisenberg",
            "filiform(3)",
            "filiform(5)",
            "counterexample_g",
            "direct_product(heisenberg,abelian(1))",
        ] {
            let p = by_name(name).unwrap();
            assert!(p.rank() >= 1, "{}", name);
        }
    }

    #[test]
    fn filiform_3_matches_heisenberg() {
        let f = filiform(3).unwrap();
        let h = heisenberg().unwrap();
        assert_eq!(f.weights(), h.weights());
        assert_eq!(
            structure::nilpotency_class(&f),
            structure::nilpotency_class(&h)
        );
    }

    #[test]
    fn counterexample_structure() {
        let g = counterexample_g().unwrap();
        assert_eq!(g.rank(), 6);
        assert_eq!(structure::nilpotency_class(&g), 2);
        let z = structure::center(&g).unwrap();
        assert_eq!(z.num_rows(), 2); // Z(G) = <u, v>
        let lcs = structure::lower_central_series(&g);
        assert!(z.eq_subgroup(&g, &lcs[1])); // gamma_2 = Z(G)
    }

    #[test]
    fn product_of_heisenbergs() {
        let h = heisenberg().unwrap();
        let p = direct_product(&h, &h).unwrap();
        assert_eq!(p.rank(), 6);
        assert_eq!(p.weights(), &[1, 1, 1, 1, 2, 2]);
        assert!(p.consistency_check().is_empty());
        let k = structure::power_subgroup_closure(&p, &BigInt::from(3), None);
        assert_eq!(k.index(&p), Some(BigUint::from(3u32).pow(6)));
    }
}
