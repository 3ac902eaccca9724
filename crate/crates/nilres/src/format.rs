//! The presentation file format: `group`, `gen`, `rel`, `pow` lines with
//! `#` comments; parse with line-numbered errors, serialize to the
//! canonical form, round-trip stable.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::pcp::{Element, PcPresentation, PowerRelation};
use crate::structure::validate_weights;
use crate::word::Word;

fn line_err(no: usize, msg: impl std::fmt::Display) -> Error {
    Error::input(format!("line {no}: {msg}"))
}

/// A word token stream: whitespace-separated `name^int` (or bare `name`),
/// with the single token `1` for the empty word.
pub fn parse_word(p: &PcPresentation, s: &str, line: usize) -> Result<Word> {
    parse_word_names(p.names(), s, line)
}

fn parse_word_names(names: &[String], s: &str, line: usize) -> Result<Word> {
    let s = s.trim();
    if s == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let e: BigInt = e
                    .parse()
                    .map_err(|_| line_err(line, format!("bad exponent in `{tok}`")))?;
                (n, e)
            }
            None => (tok, BigInt::one()),
        };
        let g = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| line_err(line, format!("unknown generator `{name}`")))?;
        letters.push((g, exp));
    }
    Ok(Word::new(letters))
}

/// Parses a word in generator names directly to a normal form.
pub fn parse_element(p: &PcPresentation, s: &str) -> Result<Element> {
    let w = parse_word(p, s, 0)?;
    p.normal_form(&w)
}

fn split_commutator(lhs: &str, line: usize) -> Result<(String, String)> {
    let inner = lhs
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| line_err(line, "rel expects `[gi,gj] = word`"))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| line_err(line, "rel expects two comma-separated generators"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

/// Infers generator weights as the least fixpoint of the lower-central
/// constraints: every generator in the word of `rel [gi,gj]` must weigh
/// at least w_i + w_j. For a valid polycyclic presentation this is the
/// depth of the generator in the lower central series.
fn infer_weights(
    rank: usize,
    rels: &[(usize, usize, usize, Vec<usize>)],
) -> Result<Vec<u32>> {
    let mut weights = vec![1u32; rank];
    for round in 0.. {
        if round > rank {
            return Err(Error::input(
                "ill-weighted relations: weight inference does not terminate",
            ));
        }
        let mut changed = false;
        for (no, i, j, mentioned) in rels {
            let need = weights[*i] + weights[*j];
            for &k in mentioned {
                if k <= *j {
                    return Err(line_err(
                        *no,
                        "commutator word may only mention later generators",
                    ));
                }
                if weights[k] < need {
                    weights[k] = need;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(weights)
}

/// Parses a presentation file, returning the declared group name and the
/// presentation with weights inferred from the lower central series.
pub fn parse(text: &str) -> Result<(String, PcPresentation)> {
    let mut name: Option<String> = None;
    let mut gens: Vec<String> = Vec::new();
    // (line, i, j, rhs) captured first, resolved once the rank is known
    let mut rels: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut pows: Vec<(usize, usize, BigInt, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match kw {
            "group" => {
                if name.is_some() {
                    return Err(line_err(no, "duplicate group line"));
                }
                if rest.is_empty() {
                    return Err(line_err(no, "group line needs a name"));
                }
                name = Some(rest.to_string());
            }
            "gen" => {
                for n in rest.split_whitespace() {
                    if gens.iter().any(|g| g == n) {
                        return Err(line_err(no, format!("duplicate generator `{n}`")));
                    }
                    gens.push(n.to_string());
                }
            }
            "rel" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| line_err(no, "rel expects `[gi,gj] = word`"))?;
                let (a, b) = split_commutator(lhs.trim(), no)?;
                let i = gens
                    .iter()
                    .position(|g| *g == a)
                    .ok_or_else(|| line_err(no, format!("unknown generator `{a}`")))?;
                let j = gens
                    .iter()
                    .position(|g| *g == b)
                    .ok_or_else(|| line_err(no, format!("unknown generator `{b}`")))?;
                if i >= j {
                    return Err(line_err(
                        no,
                        "rel requires the earlier generator first: [gi,gj] with i < j",
                    ));
                }
                rels.push((no, i, j, rhs.trim().to_string()));
            }
            "pow" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| line_err(no, "pow expects `gi^m = word`"))?;
                let (gn, m) = lhs
                    .trim()
                    .split_once('^')
                    .ok_or_else(|| line_err(no, "pow expects `gi^m = word`"))?;
                let i = gens
                    .iter()
                    .position(|g| *g == gn.trim())
                    .ok_or_else(|| line_err(no, format!("unknown generator `{gn}`")))?;
                let m: BigInt = m
                    .trim()
                    .parse()
                    .map_err(|_| line_err(no, "bad power exponent"))?;
                if m <= BigInt::one() {
                    return Err(line_err(no, "power exponent must exceed 1"));
                }
                pows.push((no, i, m, rhs.trim().to_string()));
            }
            _ => return Err(line_err(no, format!("unknown keyword `{kw}`"))),
        }
    }
    let name = name.ok_or_else(|| Error::input("missing group line"))?;
    if gens.is_empty() {
        return Err(Error::input("missing gen line"));
    }
    let mut comm = Vec::new();
    let mut rel_mentions = Vec::new();
    for (no, i, j, rhs) in &rels {
        let w = parse_word_names(&gens, rhs, *no)?;
        rel_mentions.push((
            *no,
            *i,
            *j,
            w.letters().iter().map(|(g, _)| *g).collect::<Vec<_>>(),
        ));
        comm.push((*i, *j, w));
    }
    let mut powv: Vec<Option<PowerRelation>> = vec![None; gens.len()];
    for (no, i, m, rhs) in &pows {
        if powv[*i].is_some() {
            return Err(line_err(*no, "duplicate pow line"));
        }
        powv[*i] = Some(PowerRelation {
            exponent: m.clone(),
            tail: parse_word_names(&gens, rhs, *no)?,
        });
    }
    let weights = infer_weights(gens.len(), &rel_mentions)?;
    let pres = PcPresentation::new(gens, weights, comm, powv)?;
    let failing = pres.consistency_check();
    if !failing.is_empty() {
        return Err(Error::input(format!(
            "inconsistent presentation: collection fails on triple {:?}",
            failing[0]
        )));
    }
    validate_weights(&pres)?;
    Ok((name, pres))
}

fn word_string(p: &PcPresentation, w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.letters()
        .iter()
        .map(|(g, e)| {
            if e.is_one() {
                p.name(*g).to_string()
            } else {
                format!("{}^{}", p.name(*g), e)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical file form: one gen line, nontrivial rel lines in (i,j)
/// order, pow lines in generator order.
pub fn serialize(name: &str, p: &PcPresentation) -> String {
    let mut out = format!("group {name}\ngen {}\n", p.names().join(" "));
    for i in 0..p.rank() {
        for j in (i + 1)..p.rank() {
            let w = p.commutator_word(i, j);
            if !w.is_empty() {
                out.push_str(&format!(
                    "rel [{},{}] = {}\n",
                    p.name(i),
                    p.name(j),
                    word_string(p, w)
                ));
            }
        }
    }
    for i in 0..p.rank() {
        if let Some(pr) = p.power_relation(i) {
            out.push_str(&format!(
                "pow {}^{} = {}\n",
                p.name(i),
                pr.exponent,
                word_string(p, &pr.tail)
            ));
        }
    }
    out
}
