//! Resultants of polynomials in a chosen variable, via fraction-free Gaussian
//! elimination of the Sylvester matrix. Used for truncation-curve
//! intersections.

use super::poly::{MultiPoly, Var};

/// Resultant of `f` and `g` with respect to `v`; the result is a polynomial
/// in the remaining variables. Returns zero when either input is zero.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, v: Var) -> MultiPoly {
    if f.is_zero() || g.is_zero() {
        return MultiPoly::zero();
    }
    let fc = f.coeffs_in(v);
    let gc = g.coeffs_in(v);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    if m == 0 {
        return fc[0].pow(n as u32);
    }
    if n == 0 {
        return gc[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![MultiPoly::zero(); size]; size];
    for row in 0..n {
        for (j, cf) in fc.iter().enumerate() {
            mat[row][row + (m - j)] = cf.clone();
        }
    }
    for row in 0..m {
        for (j, cg) in gc.iter().enumerate() {
            mat[n + row][row + (n - j)] = cg.clone();
        }
    }
    bareiss_det(mat)
}

/// Fraction-free Bareiss determinant over the polynomial ring.
fn bareiss_det(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut sign = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return MultiPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t
                    .try_divide(&prev)
                    .expect("Bareiss pivot divides exactly");
            }
            m[i][k] = MultiPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratfunc::parse_poly;

    #[test]
    fn resultant_detects_common_root() {
        // f = (x - psi)(x - 1), g = (x - psi)(x + 2): resultant over x vanishes
        let f = parse_poly("(x - psi)*(x - 1)").unwrap();
        let g = parse_poly("(x - psi)*(x + 2)").unwrap();
        let r = resultant(&f, &g, Var::new("x"));
        assert!(r.is_zero());
    }

    #[test]
    fn resultant_of_coprime_is_nonzero() {
        let f = parse_poly("x^2 + 1").unwrap();
        let g = parse_poly("x - 3").unwrap();
        let r = resultant(&f, &g, Var::new("x"));
        // res(x^2+1, x-3) = 3^2 + 1 = 10
        assert_eq!(r, parse_poly("10").unwrap());
    }

    #[test]
    fn resultant_with_parameters() {
        // res_x(x - psi, x - t) = t - psi up to sign
        let f = parse_poly("x - psi").unwrap();
        let g = parse_poly("x - t").unwrap();
        let r = resultant(&f, &g, Var::new("x"));
        let expect = parse_poly("t - psi").unwrap();
        assert!(r == expect || r == expect.neg());
    }
}
