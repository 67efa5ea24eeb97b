//! Dense integer polynomials (little-endian coefficient vectors) and the
//! subresultant resultant over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Strip trailing zero coefficients so the last entry is the leading one.
pub fn trim(mut f: Vec<BigInt>) -> Vec<BigInt> {
    while f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    f
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub fn degree(f: &[BigInt]) -> Option<usize> {
    f.iter().rposition(|c| !c.is_zero())
}

/// Non-negative gcd of all coefficients.
pub fn content(f: &[BigInt]) -> BigInt {
    f.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Pseudo-remainder: `lc(b)^(deg a − deg b + 1) · a mod b`.
pub fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = degree(b).expect("pseudo-division by zero polynomial");
    let mut r = trim(a.to_vec());
    let Some(da) = degree(&r) else {
        return r;
    };
    if da < db {
        return r;
    }
    let lb = &b[db];
    let mut steps = da - db + 1;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b[..=db].iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        r = trim(r);
        steps -= 1;
    }
    if steps > 0 {
        let scale = num_traits::pow(lb.clone(), steps);
        for c in r.iter_mut() {
            *c *= &scale;
        }
    }
    r
}

/// Resultant of two integer polynomials by the subresultant PRS.
///
/// Returns zero when either input is the zero polynomial. For `a` monic,
/// `res(a, b) = ∏ b(α)` over the roots α of `a`.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    let (Some(mut da), Some(mut db)) = (degree(&a), degree(&b)) else {
        return BigInt::zero();
    };
    if da == 0 && db == 0 {
        return BigInt::one();
    }
    let ca = content(&a);
    let cb = content(&b);
    for c in a.iter_mut() {
        *c = &*c / &ca;
    }
    for c in b.iter_mut() {
        *c = &*c / &cb;
    }
    let t = num_traits::pow(ca, db) * num_traits::pow(cb, da);

    let mut sign_negative = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            sign_negative = true;
        }
    }

    let mut g = BigInt::one();
    let mut h = BigInt::one();
    while db > 0 {
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign_negative = !sign_negative;
        }
        let r = pseudo_rem(&a, &b);
        let Some(dr) = degree(&r) else {
            return BigInt::zero();
        };
        let divisor = &g * num_traits::pow(h.clone(), delta);
        a = b;
        da = db;
        b = r.into_iter().map(|c| c / &divisor).collect();
        db = dr;
        g = a[da].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1),
        };
    }
    // b is a nonzero constant here
    let h = if da == 0 {
        h
    } else {
        num_traits::pow(b[0].clone(), da) / num_traits::pow(h, da - 1)
    };
    let res = t * h;
    if sign_negative {
        -res
    } else {
        res
    }
}

/// Value of `f` at an integer point.
pub fn eval_int(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Largest absolute coefficient bit length.
pub fn max_bits(f: &[BigInt]) -> u64 {
    f.iter().map(|c| c.abs().bits()).max().unwrap_or(0)
}
