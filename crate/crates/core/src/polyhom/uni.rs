//! Univariate helpers on ascending coefficient vectors (`u[j]` multiplies `z^j`).

use super::Scalar;

pub fn trim<S: Scalar>(mut u: Vec<S>) -> Vec<S> {
    while u.len() > 1 && u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
    if u.is_empty() {
        u.push(S::zero());
    }
    u
}

pub fn is_zero<S: Scalar>(u: &[S]) -> bool {
    u.iter().all(|c| c.is_zero())
}

pub fn degree<S: Scalar>(u: &[S]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

pub fn eval<S: Scalar>(u: &[S], x: &S) -> S {
    let mut acc = S::zero();
    for c in u.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

pub fn mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn derivative<S: Scalar>(u: &[S]) -> Vec<S> {
    if u.len() <= 1 {
        return vec![S::zero()];
    }
    u.iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c.clone() * S::from_i64(j as i64))
        .collect()
}

/// Long division; `b` must have a nonzero leading coefficient.
pub fn divrem<S: Scalar>(a: &[S], b: &[S]) -> (Vec<S>, Vec<S>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: Vec<S> = a.to_vec();
    let Some(da) = degree(a) else {
        return (vec![S::zero()], vec![S::zero()]);
    };
    if da < db {
        return (vec![S::zero()], trim(r));
    }
    let lead = b[db].clone();
    let mut q = vec![S::zero(); da - db + 1];
    for k in (0..=da - db).rev() {
        let c = r[k + db].clone() / lead.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            r[k + j] = r[k + j].clone() - c.clone() * b[j].clone();
        }
        r[k + db] = S::zero();
        q[k] = c;
    }
    r.truncate(db.max(1));
    (trim(q), trim(r))
}

pub fn monic<S: Scalar>(u: &[S]) -> Vec<S> {
    match degree(u) {
        None => vec![S::zero()],
        Some(d) => {
            let l = u[d].clone();
            u[..=d].iter().map(|c| c.clone() / l.clone()).collect()
        }
    }
}

/// Euclidean gcd, monic. Intended for the exact backend.
pub fn gcd<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    if is_zero(&x) {
        return monic(&y);
    }
    while !is_zero(&y) {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = monic(&r);
        if is_zero(&y) {
            break;
        }
    }
    monic(&x)
}

/// Taylor coefficients of `u` at `x0`: `u(z) = Σ t_j (z - x0)^j`.
pub fn taylor<S: Scalar>(u: &[S], x0: &S) -> Vec<S> {
    let mut cur = u.to_vec();
    let mut out = Vec::with_capacity(u.len());
    while !cur.is_empty() {
        // Synthetic division by (z - x0).
        let n = cur.len();
        let mut q = vec![S::zero(); n.saturating_sub(1)];
        let mut acc = S::zero();
        for k in (0..n).rev() {
            acc = acc * x0.clone() + cur[k].clone();
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        out.push(acc);
        cur = q;
    }
    out
}

/// Yun's square-free decomposition: returns `(factor, multiplicity)` pairs
/// with monic, pairwise coprime, square-free factors of positive degree.
pub fn squarefree<S: Scalar>(u: &[S]) -> Vec<(Vec<S>, usize)> {
    let u = monic(u);
    if degree(&u).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let du = derivative(&u);
    let a0 = gcd(&u, &du);
    let (mut b, _) = divrem(&u, &a0);
    let (c0, _) = divrem(&du, &a0);
    let mut d = sub(&c0, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&b).unwrap_or(0) > 0 {
        let a = gcd(&b, &d);
        if degree(&a).unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        let (nb, _) = divrem(&b, &a);
        let (c, _) = divrem(&d, &a);
        d = sub(&c, &derivative(&nb));
        b = nb;
        i += 1;
    }
    out
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = a.get(k).cloned().unwrap_or_else(S::zero);
        let y = b.get(k).cloned().unwrap_or_else(S::zero);
        out.push(x - y);
    }
    trim(out)
}
