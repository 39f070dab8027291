//! Dense polynomials over a prime field, little-endian coefficient vectors.
//!
//! Only what field construction needs: products and remainders modulo a
//! monic polynomial, gcd, and the Rabin irreducibility test.

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Remainder of `a` modulo `m` (any nonzero `m`, not necessarily monic).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let m = trim(m.to_vec());
    assert!(!m.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(*m.last().unwrap(), p);
    let dm = m.len() - 1;
    while r.len() > dm && !r.is_empty() {
        let shift = r.len() - 1 - dm;
        let c = r.last().unwrap() * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `h^p mod m`.
fn frobenius(h: &[u64], m: &[u64], p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut base = h.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, m, p);
        }
        base = mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: a monic `f` of degree `r` is irreducible over F_p iff
/// `x^(p^r) = x (mod f)` and `gcd(x^(p^(r/s)) - x, f) = 1` for every prime `s | r`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let r = f.len().saturating_sub(1);
    if r == 0 {
        return false;
    }
    if r == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    // powers[k] = x^(p^k) mod f
    let mut powers = vec![rem(&x, &f, p)];
    for k in 1..=r {
        let next = frobenius(&powers[k - 1], &f, p);
        powers.push(next);
    }
    if sub(&powers[r], &x, p) != Vec::<u64>::new() {
        return false;
    }
    prime_factors(r as u64).into_iter().all(|s| {
        let h = sub(&powers[r / s as usize], &x, p);
        let g = gcd(&h, &f, p);
        g.len() == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial division by every monic polynomial of degree 1..=deg/2.
    fn irreducible_by_trial(f: &[u64], p: u64) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for code in 0..count {
                let mut g: Poly = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for &(p, r) in &[(2u64, 2usize), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let count = p.pow(r as u32);
            for code in 0..count {
                let mut f: Poly = (0..r).map(|i| (code / p.pow(i as u32)) % p).collect();
                f.push(1);
                assert_eq!(
                    is_irreducible(&f, p),
                    irreducible_by_trial(&f, p),
                    "p={p} f={f:?}"
                );
            }
        }
    }

    #[test]
    fn gcd_of_coprime_linears_is_constant() {
        let g = gcd(&[1, 1], &[2, 1], 3);
        assert_eq!(g.len(), 1);
    }
}
