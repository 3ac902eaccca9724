//! Integer matrix utilities: Hermite/Smith forms with transforms, kernels,
//! lattice saturation and related solvers. All lattices are given by basis
//! (or generating) rows in Z^n. Matrices here are tiny, so the plain
//! cubic algorithms with exact BigInt arithmetic are fine.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigInt>>;

pub fn zeros(m: usize, n: usize) -> Mat {
    vec![vec![BigInt::zero(); n]; m]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    (0..n)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let k = a[0].len();
    let n = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zeros(m, n);
    for i in 0..m {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..n {
                let prod = &a[i][t] * &b[t][j];
                out[i][j] += prod;
            }
        }
    }
    out
}

/// Row Hermite normal form with transform: returns (H, U) with U*A = H,
/// U unimodular. H has positive pivots moving strictly right, entries above
/// each pivot reduced into [0, pivot), zero rows at the bottom.
pub fn row_hnf_transform(a: &Mat) -> (Mat, Mat) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h = a.clone();
    let mut u = identity(m);
    let mut r = 0; // current pivot row
    for c in 0..n {
        if r >= m {
            break;
        }
        loop {
            // pick the row >= r with smallest nonzero |entry| in column c
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[i][c].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if h[i][c].abs() < h[b][c].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap(r, b);
            u.swap(r, b);
            // reduce all other rows below by the pivot
            let mut again = false;
            for i in (r + 1)..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                if !q.is_zero() {
                    for j in 0..n {
                        let s = &q * &h[r][j];
                        h[i][j] -= s;
                    }
                    for j in 0..m {
                        let s = &q * &u[r][j];
                        u[i][j] -= s;
                    }
                }
                if !h[i][c].is_zero() {
                    again = true;
                }
            }
            if !again {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for j in 0..n {
                h[r][j] = -h[r][j].clone();
            }
            for j in 0..m {
                u[r][j] = -u[r][j].clone();
            }
        }
        // reduce entries above the pivot
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                for j in 0..n {
                    let s = &q * &h[r][j];
                    h[i][j] -= s;
                }
                for j in 0..m {
                    let s = &q * &u[r][j];
                    u[i][j] -= s;
                }
            }
        }
        r += 1;
    }
    (h, u)
}

/// HNF basis rows of the lattice generated by the given rows (zero rows
/// dropped).
pub fn row_hnf(a: &Mat) -> Mat {
    let (h, _) = row_hnf_transform(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

pub fn rank(a: &Mat) -> usize {
    row_hnf(a).len()
}

/// Basis of {x in Z^m : x * A = 0}.
pub fn left_kernel(a: &Mat) -> Mat {
    let (h, u) = row_hnf_transform(a);
    let mut out = Vec::new();
    for (i, row) in h.iter().enumerate() {
        if row.iter().all(|x| x.is_zero()) {
            out.push(u[i].clone());
        }
    }
    out
}

/// Basis of {v in Z^n : A * v = 0}, returned as rows of length n.
pub fn right_kernel(a: &Mat) -> Mat {
    left_kernel(&transpose(a))
}

/// Saturation of the lattice spanned by the rows: (Q-span) ∩ Z^n.
pub fn saturation(rows: &Mat, n: usize) -> Mat {
    if rows.is_empty() {
        return Vec::new();
    }
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let y = right_kernel(rows); // rows y with rows ⟂ y
    if y.is_empty() {
        // full rank: saturation is all of Z^n
        return identity(n);
    }
    right_kernel(&y)
}

/// Solve x * L = target over Z, rows L a generating set. Returns one
/// solution if it exists.
pub fn solve_left(l: &Mat, target: &[BigInt]) -> Option<Vec<BigInt>> {
    let (h, u) = row_hnf_transform(l);
    let n = target.len();
    let mut t = target.to_vec();
    let mut coeff = vec![BigInt::zero(); l.len()];
    for (i, row) in h.iter().enumerate() {
        let Some(p) = row.iter().position(|x| !x.is_zero()) else { continue };
        if t[p].is_zero() {
            continue;
        }
        let (q, r) = t[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for j in 0..n {
            let s = &q * &row[j];
            t[j] -= s;
        }
        for j in 0..l.len() {
            let s = &q * &u[i][j];
            coeff[j] += s;
        }
    }
    if t.iter().all(|x| x.is_zero()) {
        Some(coeff)
    } else {
        None
    }
}

pub fn lattice_member(l: &Mat, v: &[BigInt]) -> bool {
    solve_left(l, v).is_some()
}

/// Minimal k >= 1 with k*v in span(rows), or None if no such k exists.
pub fn vector_order_mod(rows: &Mat, v: &[BigInt]) -> Option<BigInt> {
    if v.iter().all(|x| x.is_zero()) {
        return Some(BigInt::one());
    }
    let h0 = row_hnf(rows);
    let mut stacked = h0.clone();
    stacked.push(v.to_vec());
    let h1 = row_hnf(&stacked);
    if h1.len() != h0.len() {
        return None; // v adds rank: no multiple lands in the lattice
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for row in &h0 {
        let p = row.iter().position(|x| !x.is_zero()).unwrap();
        num *= &row[p];
    }
    for row in &h1 {
        let p = row.iter().position(|x| !x.is_zero()).unwrap();
        den *= &row[p];
    }
    // index [span(rows, v) : span(rows)] = num/den, and v has that order
    Some(num / den)
}

/// {s in Z^n : scale * s ∈ span(R)} as basis rows.
pub fn preimage_scale(scale: &BigInt, r: &Mat, n: usize) -> Mat {
    // pairs (s, x) with scale*s = x*R; kernel of [scale*I | -R^T-ish]
    // assembled as left kernel of the stacked matrix [scale*I ; R] with the
    // first n rows tagged to s.
    let mut stacked = zeros(n + r.len(), n);
    for i in 0..n {
        stacked[i][i] = scale.clone();
    }
    for (i, row) in r.iter().enumerate() {
        stacked[n + i] = row.clone();
    }
    let ker = left_kernel(&stacked);
    // each kernel row (a | b): sum a_i*scale*e_i + sum b_j R_j = 0, so
    // s = a gives scale*s = -b*R ∈ span(R). Collect the s-parts.
    let s_parts: Mat = ker.into_iter().map(|row| row[..n].to_vec()).collect();
    row_hnf(&s_parts)
}

/// {e : e * phi_t ∈ span(R) for all t}, each phi_t an s×u matrix mapping
/// e-space into the section, R the relation lattice rows in Z^u.
pub fn solve_mod_lattice(phis: &[Mat], r: &Mat, s: usize, u: usize) -> Mat {
    if phis.is_empty() {
        return identity(s);
    }
    let t = phis.len();
    let rrows = r.len();
    // unknowns: e (s) and y_1..y_t (rrows each); equations: for each t,
    // e*phi_t - y_t*R = 0 (u columns per t)
    let mut big = zeros(s + t * rrows, t * u);
    for (ti, phi) in phis.iter().enumerate() {
        debug_assert_eq!(phi.len(), s);
        for i in 0..s {
            for j in 0..u {
                big[i][ti * u + j] = phi[i][j].clone();
            }
        }
        for (k, rrow) in r.iter().enumerate() {
            for j in 0..u {
                big[s + ti * rrows + k][ti * u + j] = -rrow[j].clone();
            }
        }
    }
    let ker = left_kernel(&big);
    let e_parts: Mat = ker.into_iter().map(|row| row[..s].to_vec()).collect();
    row_hnf(&e_parts)
}

/// Smith normal form with transforms: returns (U, D, V, Vinv) with
/// U*A*V = D diagonal, d_i | d_{i+1}, U and V unimodular.
pub fn snf_transforms(a: &Mat) -> (Mat, Mat, Mat, Mat) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut vinv = identity(n);

    let col_op = |d: &mut Mat, v: &mut Mat, vinv: &mut Mat, src: usize, dst: usize, q: &BigInt| {
        // col_dst -= q * col_src ; V tracks column ops, Vinv the inverses
        for row in d.iter_mut() {
            let s = q * &row[src];
            row[dst] -= s;
        }
        for row in v.iter_mut() {
            let s = q * &row[src];
            row[dst] -= s;
        }
        for j in 0..vinv[0].len() {
            let s = q * &vinv[dst][j];
            vinv[src][j] += s;
        }
    };
    let col_swap = |d: &mut Mat, v: &mut Mat, vinv: &mut Mat, i: usize, j: usize| {
        for row in d.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vinv.swap(i, j);
    };
    let col_neg = |d: &mut Mat, v: &mut Mat, vinv: &mut Mat, i: usize| {
        for row in d.iter_mut() {
            row[i] = -row[i].clone();
        }
        for row in v.iter_mut() {
            row[i] = -row[i].clone();
        }
        for x in vinv[i].iter_mut() {
            *x = -x.clone();
        }
    };

    let mut t = 0;
    while t < m.min(n) {
        // find a nonzero pivot in the submatrix
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[i][j].is_zero())
            .min_by_key(|&(i, j)| d[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut d, &mut v, &mut vinv, t, pj);
        // clear row & column t
        loop {
            let mut clean = true;
            for i in (t + 1)..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                if !q.is_zero() {
                    for j in 0..n {
                        let s = &q * &d[t][j];
                        d[i][j] -= s;
                    }
                    for j in 0..m {
                        let s = &q * &u[t][j];
                        u[i][j] -= s;
                    }
                }
                if !d[i][t].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    d.swap(t, i);
                    u.swap(t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                if !q.is_zero() {
                    col_op(&mut d, &mut v, &mut vinv, t, j, &q);
                }
                if !d[t][j].is_zero() {
                    col_swap(&mut d, &mut v, &mut vinv, t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if d[t][t].is_negative() {
            col_neg(&mut d, &mut v, &mut vinv, t);
        }
        t += 1;
    }
    // enforce the divisibility chain
    let r = (0..m.min(n)).take_while(|&i| !d[i][i].is_zero()).count();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..r.saturating_sub(1) {
            let (a_, b_) = (d[i][i].clone(), d[i + 1][i + 1].clone());
            if (&b_ % &a_).is_zero() {
                continue;
            }
            changed = true;
            // standard 2x2 fix: add col i+1 to col i, then re-reduce the block
            let minus_one = -BigInt::one();
            col_op(&mut d, &mut v, &mut vinv, i + 1, i, &minus_one); // col_i += col_{i+1}
            // now d[i+1][i] = b_, d[i][i] = a_: clear with row/col ops
            loop {
                if d[i + 1][i].is_zero() && d[i][i + 1].is_zero() {
                    break;
                }
                if !d[i + 1][i].is_zero() {
                    if d[i][i].is_zero() || (!d[i + 1][i].is_zero() && d[i + 1][i].abs() < d[i][i].abs()) {
                        d.swap(i, i + 1);
                        u.swap(i, i + 1);
                    }
                    if !d[i + 1][i].is_zero() && !d[i][i].is_zero() {
                        let q = d[i + 1][i].div_floor(&d[i][i]);
                        for j in 0..n {
                            let s = &q * &d[i][j];
                            d[i + 1][j] -= s;
                        }
                        for j in 0..m {
                            let s = &q * &u[i][j];
                            u[i + 1][j] -= s;
                        }
                    }
                } else if !d[i][i + 1].is_zero() {
                    let q = d[i][i + 1].div_floor(&d[i][i]);
                    if !q.is_zero() {
                        col_op(&mut d, &mut v, &mut vinv, i, i + 1, &q);
                    }
                    if !d[i][i + 1].is_zero() {
                        col_swap(&mut d, &mut v, &mut vinv, i, i + 1);
                    }
                }
            }
            if d[i][i].is_negative() {
                col_neg(&mut d, &mut v, &mut vinv, i);
            }
            if d[i + 1][i + 1].is_negative() {
                col_neg(&mut d, &mut v, &mut vinv, i + 1);
            }
            let _ = (a_, b_);
        }
    }
    (u, d, v, vinv)
}

/// Invariant factors (d_i > 1 kept, 1s dropped, 0 for free ranks excluded)
/// of Z^n / span(rows).
/// Invariant factors of Z^n / <rows>: the nontrivial finite factors in
/// divisibility order, followed by one zero per free factor.
pub fn invariant_factors(rows: &Mat, n: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut rk = 0usize;
    if !rows.is_empty() {
        let (_, d, _, _) = snf_transforms(rows);
        for i in 0..rows.len().min(n) {
            if !d[i][i].is_zero() {
                rk += 1;
                if !d[i][i].is_one() {
                    out.push(d[i][i].clone());
                }
            }
        }
    }
    out.extend(std::iter::repeat(BigInt::zero()).take(n - rk));
    out
}

/// Given s primitive independent rows spanning a saturated lattice in Z^r,
/// return r-s rows completing them to a Z-basis of Z^r.
pub fn unimodular_complement(rows: &Mat, r: usize) -> Option<Mat> {
    let s = rows.len();
    if s == 0 {
        return Some(identity(r));
    }
    let (u, d, _v, vinv) = snf_transforms(rows);
    for i in 0..s {
        if !d[i][i].is_one() {
            return None; // not saturated / not independent
        }
    }
    let _ = u;
    // U*A*V = [I_s | 0]  =>  A = U^{-1} [I 0] V^{-1}: first s rows of V^{-1}
    // span the same lattice as A; the remaining rows complete a basis.
    Some(vinv[s..r].to_vec())
}

#[cfg(test)]
mod zlin_tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_basic() {
        let h = row_hnf(&m(&[&[4, 6], &[6, 9]]));
        assert_eq!(h, m(&[&[2, 3]]));
        let h = row_hnf(&m(&[&[2, 0], &[1, 3]]));
        assert_eq!(h, m(&[&[1, 3], &[0, 6]]));
    }

    #[test]
    fn kernels() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(mat_mul(&k, &a).iter().flatten().all(|x| x.is_zero()));
        let rk = right_kernel(&a);
        assert_eq!(rk.len(), 2);
    }

    #[test]
    fn saturation_divides_content() {
        let s = saturation(&m(&[&[2, 4]]), 2);
        assert_eq!(row_hnf(&s), m(&[&[1, 2]]));
        let s = saturation(&m(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(row_hnf(&s), identity(2));
    }

    #[test]
    fn solve_and_order() {
        let l = m(&[&[2, 0], &[0, 2]]);
        assert!(lattice_member(&l, &[BigInt::from(4), BigInt::from(-2)]));
        assert!(!lattice_member(&l, &[BigInt::from(1), BigInt::from(0)]));
        assert_eq!(
            vector_order_mod(&l, &[BigInt::one(), BigInt::one()]),
            Some(BigInt::from(2))
        );
        assert_eq!(
            vector_order_mod(&m(&[&[1, 0]]), &[BigInt::zero(), BigInt::one()]),
            None
        );
        assert_eq!(
            vector_order_mod(&m(&[&[3, 3]]), &[BigInt::one(), BigInt::one()]),
            Some(BigInt::from(3))
        );
    }

    #[test]
    fn snf_diag() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let (u, d, v, vinv) = snf_transforms(&a);
        assert_eq!(d[0][0], BigInt::from(2));
        assert_eq!(d[1][1], BigInt::from(4));
        let ua = mat_mul(&u, &a);
        let uav = mat_mul(&ua, &v);
        assert_eq!(uav, d);
        let vv = mat_mul(&v, &vinv);
        assert_eq!(vv, identity(2));
    }

    #[test]
    fn complement_of_primitive_vector() {
        let rows = m(&[&[2, 1]]);
        let c = unimodular_complement(&rows, 2).unwrap();
        assert_eq!(c.len(), 1);
        // full matrix [rows; c] must be unimodular
        let full = vec![rows[0].clone(), c[0].clone()];
        let (_, d, _, _) = snf_transforms(&full);
        assert!(d[0][0].is_one() && d[1][1].is_one());
        // non-primitive input is rejected
        assert!(unimodular_complement(&m(&[&[2, 4]]), 2).is_none());
    }

    #[test]
    fn preimage_by_scale() {
        // {s : 2s ∈ <(4,0),(0,2)>} = <(2,0),(0,1)>
        let r = m(&[&[4, 0], &[0, 2]]);
        let pre = preimage_scale(&BigInt::from(2), &r, 2);
        assert_eq!(row_hnf(&pre), m(&[&[2, 0], &[0, 1]]));
    }

    #[test]
    fn invariant_factor_chain() {
        let rows = m(&[&[2, 0, 0], &[0, 4, 0], &[0, 0, 8]]);
        assert_eq!(
            invariant_factors(&rows, 3),
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(8)]
        );
    }
}
