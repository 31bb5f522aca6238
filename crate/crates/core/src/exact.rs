//! Exact rational scalars, vectors and matrices.
//!
//! Scalars are [`num_rational::BigRational`], which is always kept in lowest
//! terms with a positive denominator. Linear algebra uses fraction-free
//! (Bareiss) elimination on integer-scaled rows, so intermediate entries are
//! minors of the input rather than ever-growing fractions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{dim_err, Error, Result};

pub type Rational = BigRational;
pub type RatVector = Vec<Rational>;
pub type IntVector = Vec<BigInt>;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_bigint(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn int_vector(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rat_vector(v: &[i64]) -> RatVector {
    v.iter().map(|&x| int(x)).collect()
}

pub fn to_rational_vector(v: &[BigInt]) -> RatVector {
    v.iter().map(from_bigint).collect()
}

/// Parses the `p/q` (or `p`) grammar used by every file format.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `p/q` form, `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Rational], b: &[BigInt]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `base^exp` for non-negative exponents.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return dim_err("matrix must have at least one row and column");
        }
        if entries.len() != rows * cols {
            return dim_err(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            ));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<RatVector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return dim_err("ragged rows");
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<RatVector> {
        if x.len() != self.cols {
            return dim_err(format!("vector of length {} for {} columns", x.len(), self.cols));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Scales a rational row to integers; returns the row and the scale factor.
fn integer_row(row: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let scale = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints = row
        .iter()
        .map(|q| q.numer() * (&scale / q.denom()))
        .collect();
    (ints, scale)
}

/// Fraction-free forward elimination on an integer matrix with `n` pivot
/// columns (extra columns are carried along). Returns the row-swap sign, or
/// `None` when a pivot column is all zero.
fn bareiss_forward(m: &mut [Vec<BigInt>], n: usize) -> Option<i32> {
    let cols = m.first().map_or(0, Vec::len);
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        if pivot != k {
            m.swap(pivot, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..cols {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(sign)
}

/// Exact determinant by Bareiss elimination.
pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return dim_err(format!("determinant of a {}x{} matrix", m.rows, m.cols));
    }
    let n = m.rows;
    let mut scale = BigInt::one();
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let (r, s) = integer_row(m.row(i));
            scale *= s;
            r
        })
        .collect();
    match bareiss_forward(&mut rows, n) {
        None => Ok(Rational::zero()),
        Some(sign) => {
            let det = &rows[n - 1][n - 1] * BigInt::from(sign);
            Ok(Rational::new(det, scale))
        }
    }
}

/// Exact integer determinant of a square integer matrix given as rows.
pub fn int_determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = rows.to_vec();
    match bareiss_forward(&mut m, n) {
        None => BigInt::zero(),
        Some(sign) => &m[n - 1][n - 1] * BigInt::from(sign),
    }
}

/// Solves `m x = rhs` exactly. Returns `None` when `m` is singular.
pub fn solve(m: &RatMatrix, rhs: &[Rational]) -> Result<Option<RatVector>> {
    Ok(solve_many(m, &[rhs.to_vec()])?.map(|mut xs| xs.remove(0)))
}

/// Solves `m X = [rhs_0 .. rhs_k]` with a single elimination pass.
pub fn solve_many(m: &RatMatrix, rhs: &[RatVector]) -> Result<Option<Vec<RatVector>>> {
    if !m.is_square() {
        return dim_err(format!("solve with a {}x{} matrix", m.rows, m.cols));
    }
    let n = m.rows;
    if let Some(bad) = rhs.iter().find(|r| r.len() != n) {
        return dim_err(format!("right-hand side of length {} for {n} rows", bad.len()));
    }
    let k = rhs.len();
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut full = m.row(i).to_vec();
            full.extend(rhs.iter().map(|r| r[i].clone()));
            integer_row(&full).0
        })
        .collect();
    if bareiss_forward(&mut rows, n).is_none() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let mut x = vec![Rational::zero(); n];
        for i in (0..n).rev() {
            let mut acc = from_bigint(&rows[i][n + c]);
            for j in i + 1..n {
                acc -= from_bigint(&rows[i][j]) * &x[j];
            }
            x[i] = acc / from_bigint(&rows[i][i]);
        }
        out.push(x);
    }
    Ok(Some(out))
}

/// Reduced row echelon form; returns pivot columns.
fn rref(rows: &mut [RatVector], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a list of equal-length rational vectors.
pub fn rank(vectors: &[RatVector]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let cols = first.len();
    let mut rows = vectors.to_vec();
    rref(&mut rows, cols).len()
}

/// Any exact solution of a possibly rectangular or rank-deficient system,
/// with free variables set to zero. `None` when the system is inconsistent.
pub fn solve_consistent(a: &[RatVector], rhs: &[Rational]) -> Result<Option<RatVector>> {
    if a.len() != rhs.len() {
        return dim_err("row count differs from right-hand side length");
    }
    let Some(first) = a.first() else {
        return Ok(Some(Vec::new()));
    };
    let cols = first.len();
    if a.iter().any(|r| r.len() != cols) {
        return dim_err("ragged system");
    }
    let mut rows: Vec<RatVector> = a
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows, cols);
    if rows[pivots.len()..].iter().any(|r| !r[cols].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][cols].clone();
    }
    Ok(Some(x))
}

/// Divides an integer vector by the gcd of its entries, keeping signs.
pub fn primitive(v: &[BigInt]) -> Result<IntVector> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(Error::Domain("primitive of the zero vector".into()));
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    g.is_one()
}

/// Generalized cross product of `n-1` vectors in dimension `n`: the vector of
/// signed maximal minors, orthogonal to every input row.
pub fn kernel_direction(rows: &[RatVector], n: usize) -> Result<RatVector> {
    if rows.len() + 1 != n || rows.iter().any(|r| r.len() != n) {
        return dim_err("kernel_direction expects n-1 rows of length n");
    }
    if n == 1 {
        return Ok(vec![Rational::one()]);
    }
    (0..n)
        .map(|drop| {
            let minor: Vec<RatVector> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != drop)
                        .map(|(_, q)| q.clone())
                        .collect()
                })
                .collect();
            let d = determinant(&RatMatrix::from_rows(minor)?)?;
            Ok(if drop % 2 == 0 { d } else { -d })
        })
        .collect()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    /// Accepts `"p/q"` strings and plain JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RatRepr {
        Int(i64),
        Text(String),
    }

    impl RatRepr {
        pub(crate) fn into_rational(self) -> Result<Rational, crate::Error> {
            match self {
                RatRepr::Int(i) => Ok(super::int(i)),
                RatRepr::Text(s) => parse_rational(&s),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RatRepr::deserialize(d)?.into_rational().map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let v = Vec::<RatRepr>::deserialize(d)?;
            v.into_iter()
                .map(|r| r.into_rational().map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod option_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => super::vec::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Rational>>, D::Error> {
            let v = Option::<Vec<RatRepr>>::deserialize(d)?;
            v.map(|v| {
                v.into_iter()
                    .map(|r| r.into_rational().map_err(D::Error::custom))
                    .collect()
            })
            .transpose()
        }
    }
}

/// Serde adapters writing big integers as JSON numbers when they fit in
/// `i64` and as strings otherwise.
pub mod serde_int_vec {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum IntRepr {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<IntRepr> = v
            .iter()
            .map(|x| match x.to_i64() {
                Some(i) => IntRepr::Small(i),
                None => IntRepr::Big(x.to_string()),
            })
            .collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let reprs = Vec::<IntRepr>::deserialize(d)?;
        reprs
            .into_iter()
            .map(|r| match r {
                IntRepr::Small(i) => Ok(BigInt::from(i)),
                IntRepr::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| rat_vector(r)).collect()).unwrap()
    }

    // Laplace expansion along the first row; independent of the elimination path.
    fn cofactor_det(a: &[RatVector]) -> Rational {
        let n = a.len();
        if n == 1 {
            return a[0][0].clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            let minor: Vec<RatVector> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, q)| q.clone()).collect())
                .collect();
            let term = &a[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
    }

    fn square(n: usize) -> impl Strategy<Value = Vec<RatVector>> {
        proptest::collection::vec(proptest::collection::vec(small_rational(), n), n)
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(determinant(&RatMatrix::identity(2)).unwrap(), int(1));
        assert_eq!(determinant(&m(&[&[2, 3], &[1, 2]])).unwrap(), int(1));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])).unwrap(), int(0));
        assert!(matches!(
            determinant(&m(&[&[1, 2, 3], &[4, 5, 6]])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn determinant_fixed_4x4_matches_cofactor() {
        let rows = vec![
            vec![rat(1, 2), rat(-3, 1), rat(2, 3), rat(5, 1)],
            vec![rat(7, 4), rat(0, 1), rat(-1, 5), rat(2, 1)],
            vec![rat(-2, 1), rat(4, 3), rat(1, 1), rat(-1, 2)],
            vec![rat(3, 1), rat(1, 7), rat(-4, 1), rat(6, 5)],
        ];
        let expected = cofactor_det(&rows);
        assert_eq!(determinant(&RatMatrix::from_rows(rows).unwrap()).unwrap(), expected);
    }

    #[test]
    fn solve_small_cases() {
        let x = solve(&RatMatrix::identity(2), &rat_vector(&[1, 2])).unwrap().unwrap();
        assert_eq!(x, rat_vector(&[1, 2]));
        let x = solve(&m(&[&[1, 1], &[1, -1]]), &rat_vector(&[2, 0])).unwrap().unwrap();
        assert_eq!(x, rat_vector(&[1, 1]));
        assert_eq!(solve(&m(&[&[1, 2], &[2, 4]]), &rat_vector(&[1, 1])).unwrap(), None);
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &rat_vector(&[1])).is_err());
    }

    #[test]
    fn primitive_cases() {
        assert_eq!(primitive(&int_vector(&[2, 4])).unwrap(), int_vector(&[1, 2]));
        assert_eq!(primitive(&int_vector(&[1, 0, 0])).unwrap(), int_vector(&[1, 0, 0]));
        assert_eq!(primitive(&int_vector(&[-3, 6, 9])).unwrap(), int_vector(&[-1, 2, 3]));
        assert!(matches!(primitive(&int_vector(&[0, 0])), Err(Error::Domain(_))));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3/4", "7", "12/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("3/-4").unwrap(), rat(-3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn solve_consistent_handles_rank_deficiency() {
        let a = vec![rat_vector(&[1, 1]), rat_vector(&[2, 2])];
        let x = solve_consistent(&a, &rat_vector(&[3, 6])).unwrap().unwrap();
        assert_eq!(dot(&a[0], &x), int(3));
        assert_eq!(solve_consistent(&a, &rat_vector(&[3, 7])).unwrap(), None);
    }

    #[test]
    fn kernel_direction_is_orthogonal() {
        let rows = vec![rat_vector(&[1, 2, 3]), rat_vector(&[0, 1, 4])];
        let d = kernel_direction(&rows, 3).unwrap();
        assert!(d.iter().any(|q| !q.is_zero()));
        for r in &rows {
            assert!(dot(r, &d).is_zero());
        }
    }

    proptest! {
        #[test]
        fn determinant_matches_cofactor(rows in square(4)) {
            let expected = cofactor_det(&rows);
            prop_assert_eq!(determinant(&RatMatrix::from_rows(rows).unwrap()).unwrap(), expected);
        }

        #[test]
        fn row_swap_flips_sign(rows in square(3), a in 0usize..3, b in 0usize..3) {
            prop_assume!(a != b);
            let mut mat = RatMatrix::from_rows(rows).unwrap();
            let d = determinant(&mat).unwrap();
            mat.swap_rows(a, b);
            prop_assert_eq!(determinant(&mat).unwrap(), -d);
        }

        #[test]
        fn determinant_is_linear_in_a_row(rows in square(3), extra in proptest::collection::vec(small_rational(), 3), s in small_rational()) {
            let base = determinant(&RatMatrix::from_rows(rows.clone()).unwrap()).unwrap();
            let mut replaced = rows.clone();
            replaced[0] = extra.clone();
            let other = determinant(&RatMatrix::from_rows(replaced).unwrap()).unwrap();
            let mut combo = rows;
            combo[0] = combo[0].iter().zip(&extra).map(|(x, y)| x * &s + y).collect();
            let d = determinant(&RatMatrix::from_rows(combo).unwrap()).unwrap();
            prop_assert_eq!(d, base * s + other);
        }

        #[test]
        fn solve_recovers_x(rows in square(4), x in proptest::collection::vec(small_rational(), 4)) {
            let mat = RatMatrix::from_rows(rows).unwrap();
            prop_assume!(!determinant(&mat).unwrap().is_zero());
            let rhs = mat.mul_vec(&x).unwrap();
            prop_assert_eq!(solve(&mat, &rhs).unwrap(), Some(x));
        }

        #[test]
        fn primitive_is_idempotent(v in proptest::collection::vec(-40i64..40, 1..5)) {
            prop_assume!(v.iter().any(|&x| x != 0));
            let p = primitive(&int_vector(&v)).unwrap();
            prop_assert!(is_primitive(&p));
            prop_assert_eq!(primitive(&p).unwrap(), p);
        }

        #[test]
        fn rational_format_parse_identity(p in -1000i64..1000, q in 1i64..1000) {
            let r = rat(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
