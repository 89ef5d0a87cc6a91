//! Exact rational linear algebra and the certificate-producing decision for
//! "is there a strictly positive combination of the columns summing to zero".
//!
//! Every certificate that leaves this module verifies its own defining
//! equalities and inequalities in exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational; always kept reduced with positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Rational `n/d` from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from a machine integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = RatMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_int_columns(cols: &[Vec<i64>]) -> Self {
        let cols: Vec<Vec<Rational>> = cols.iter().map(|c| rat_vec(c)).collect();
        Self::from_columns(&cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// `M v` for a length-`cols` vector.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self[(i, j)] * &v[j])
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    }

    /// `wᵀ M` for a length-`rows` vector.
    pub fn vec_mul(&self, w: &[Rational]) -> Vec<Rational> {
        assert_eq!(w.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| &w[i] * &self[(i, j)])
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    }

    /// Reduced row echelon form plus the pivot column indices.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip();
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m[(row, j)] = v;
            }
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for j in col..m.cols {
                        let v = &m[(r, j)] - &factor * &m[(row, j)];
                        m[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Exact rank via rational Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace `{v : Mv = 0}`, each vector scaled to
    /// integer entries with content 1 and first nonzero entry positive.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut map = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                map[col] = Some(row);
            }
            map
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (col, &prow) in pivot_set.iter().enumerate() {
                if let Some(prow) = prow {
                    v[col] = -r[(prow, free)].clone();
                }
            }
            basis.push(normalize_first_positive(&v));
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, v| acc + v)
}

/// Scales a rational vector to integer entries with gcd 1, keeping direction.
pub fn integer_normalize(v: &[Rational]) -> Vec<Rational> {
    if v.iter().all(|x| x.is_zero()) {
        return v.to_vec();
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    ints.iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Integer-normalized with the first nonzero entry positive.
pub fn normalize_first_positive(v: &[Rational]) -> Vec<Rational> {
    let mut out = integer_normalize(v);
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -x.clone();
            }
        }
    }
    out
}

/// Outcome of the positive-dependence decision: exactly one variant holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StiemkeResult {
    /// `M·lambda = 0` with every entry at least 1.
    PositiveDependence { lambda: Vec<Rational> },
    /// `wᵀM <= 0` componentwise with at least one strict inequality.
    Separator { w: Vec<Rational> },
}

impl StiemkeResult {
    /// Re-checks the certificate against `m` in exact arithmetic.
    pub fn verify(&self, m: &RatMatrix) -> bool {
        match self {
            StiemkeResult::PositiveDependence { lambda } => {
                lambda.len() == m.cols()
                    && lambda.iter().all(|l| *l >= Rational::one())
                    && m.mul_vec(lambda).iter().all(|x| x.is_zero())
            }
            StiemkeResult::Separator { w } => {
                if w.len() != m.rows() {
                    return false;
                }
                let dots = m.vec_mul(w);
                dots.iter().all(|d| !d.is_positive()) && dots.iter().any(|d| d.is_negative())
            }
        }
    }
}

/// Decides between a strictly positive dependence among the columns of `m`
/// and a separating vector, returning a verified certificate either way.
///
/// Runs an exact phase-1 simplex with Bland's rule on `{Mλ = 0, λ >= 1}`;
/// infeasibility yields the separator from the optimal simplex multipliers.
#[allow(clippy::needless_range_loop)] // tableau updates read clearest indexed
pub fn positive_nullvector_or_certificate(m: &RatMatrix) -> StiemkeResult {
    assert!(m.cols() >= 1, "matrix must have at least one column");
    let n = m.rows();
    let k = m.cols();

    // Substitute λ = 1 + μ, μ >= 0: solve M μ = -M·1, μ >= 0 by phase 1.
    let ones = vec![Rational::one(); k];
    let b: Vec<Rational> = m.mul_vec(&ones).iter().map(|x| -x).collect();

    if n == 0 {
        let result = StiemkeResult::PositiveDependence { lambda: ones };
        debug_assert!(result.verify(m));
        return result;
    }

    // Row signs chosen so the all-artificial start is feasible.
    let signs: Vec<i32> = b.iter().map(|bi| if bi.is_negative() { -1 } else { 1 }).collect();

    // Tableau: columns 0..k are μ, k..k+n artificials, last column rhs.
    let width = k + n + 1;
    let mut tab = vec![vec![Rational::zero(); width]; n];
    for i in 0..n {
        let s = rat_int(signs[i] as i64);
        for j in 0..k {
            tab[i][j] = &s * &m[(i, j)];
        }
        tab[i][k + i] = Rational::one();
        tab[i][k + n] = &s * &b[i];
    }
    let mut basis: Vec<usize> = (k..k + n).collect();

    // Reduced costs for phase-1 cost (1 on artificials, 0 on μ).
    let mut obj = vec![Rational::zero(); width];
    for j in 0..width {
        let col_sum = tab
            .iter()
            .map(|row| row[j].clone())
            .fold(Rational::zero(), |a, v| a + v);
        let c_j = if (k..k + n).contains(&j) {
            Rational::one()
        } else {
            Rational::zero()
        };
        obj[j] = c_j - col_sum;
    }

    // Bland: the entering variable is the smallest index with negative
    // reduced cost; no candidate means optimality.
    while let Some(enter) = (0..k + n).find(|&j| obj[j].is_negative()) {
        // Ratio test; ties broken by smallest basis variable index.
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[k + n] / &row[enter];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < *best_ratio
                            || (ratio == *best_ratio && basis[i] < basis[*best])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let (r, _) = leave.expect("phase-1 objective is bounded below");

        // Pivot on (r, enter).
        let piv = tab[r][enter].clone();
        for v in &mut tab[r] {
            *v = &*v / &piv;
        }
        for i in 0..n {
            if i != r && !tab[i][enter].is_zero() {
                let f = tab[i][enter].clone();
                for j in 0..width {
                    let v = &tab[i][j] - &f * &tab[r][j];
                    tab[i][j] = v;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for j in 0..width {
                let v = &obj[j] - &f * &tab[r][j];
                obj[j] = v;
            }
        }
        basis[r] = enter;
    }

    let cost = basis
        .iter()
        .enumerate()
        .filter(|&(_, &var)| var >= k)
        .map(|(i, _)| tab[i][k + n].clone())
        .fold(Rational::zero(), |a, v| a + v);

    let result = if cost.is_zero() {
        let mut lambda = vec![Rational::one(); k];
        for (i, &var) in basis.iter().enumerate() {
            if var < k {
                lambda[var] += tab[i][k + n].clone();
            }
        }
        StiemkeResult::PositiveDependence {
            lambda: integer_normalize(&lambda),
        }
    } else {
        // Simplex multipliers: y_i = (1 - reduced_cost(a_i)) * sign_i.
        let w: Vec<Rational> = (0..n)
            .map(|i| (Rational::one() - &obj[k + i]) * rat_int(signs[i] as i64))
            .collect();
        StiemkeResult::Separator {
            w: integer_normalize(&w),
        }
    };
    assert!(result.verify(m), "certificate failed self-verification");
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("no vector in the span is orthogonal to the set with a negative product against the orientation vector")]
    NoSeparator,
    #[error("dimension mismatch between span, orthogonality set, and orientation vector")]
    DimensionMismatch,
}

/// Finds `w` in `span(span_basis)` with `w·u = 0` for every `u` in
/// `perp_set` and `w·orient < 0`, scaled to integer entries with content 1.
pub fn vector_in_span_orthogonal_to(
    span_basis: &[Vec<Rational>],
    perp_set: &[Vec<Rational>],
    orient: &[Rational],
) -> Result<Vec<Rational>, SpanError> {
    let dim = orient.len();
    if span_basis.iter().chain(perp_set).any(|v| v.len() != dim) {
        return Err(SpanError::DimensionMismatch);
    }
    if span_basis.is_empty() {
        return Err(SpanError::NoSeparator);
    }

    // Coefficients α with w = Σ α_j span_basis_j; orthogonality constraints
    // become a linear system in α.
    let constraint_rows: Vec<Vec<Rational>> = perp_set
        .iter()
        .map(|u| span_basis.iter().map(|bv| dot(u, bv)).collect())
        .collect();
    let alphas = if constraint_rows.is_empty() {
        // No constraints: the α-space is all of R^m.
        (0..span_basis.len())
            .map(|j| {
                let mut e = vec![Rational::zero(); span_basis.len()];
                e[j] = Rational::one();
                e
            })
            .collect()
    } else {
        RatMatrix::from_rows(&constraint_rows).nullspace()
    };

    for alpha in &alphas {
        let mut w = vec![Rational::zero(); dim];
        for (coef, bv) in alpha.iter().zip(span_basis) {
            for (wi, bvi) in w.iter_mut().zip(bv) {
                *wi += coef * bvi;
            }
        }
        let d = dot(&w, orient);
        if !d.is_zero() {
            if d.is_positive() {
                for x in &mut w {
                    *x = -x.clone();
                }
            }
            return Ok(integer_normalize(&w));
        }
    }
    Err(SpanError::NoSeparator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(cols: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_int_columns(&cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        let m = RatMatrix::from_rows(&[rat_vec(&[1, -1, 0]), rat_vec(&[1, 0, -1])]);
        assert_eq!(m.rank(), 2);
        assert_eq!(RatMatrix::zeros(3, 3).rank(), 0);
        let ivanova = cols(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1], &[1, 0, -1]]);
        assert_eq!(ivanova.rank(), 2);
    }

    #[test]
    fn rank_of_transpose_matches() {
        let m = cols(&[&[1, -1, 0], &[1, -1, 0], &[1, 0, -1]]);
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn nullspace_examples() {
        let m = RatMatrix::from_rows(&[rat_vec(&[1, 1, 1])]);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], rat_vec(&[1, -1, 0]));
        assert_eq!(basis[1], rat_vec(&[1, 0, -1]));

        // Left nullspace of the three-reaction autocatalytic network.
        let stoich = cols(&[&[1, -1, 0], &[1, -1, 0], &[1, 0, -1]]);
        let left = stoich.transpose().nullspace();
        assert_eq!(left, vec![rat_vec(&[1, 1, 1])]);

        let inv = RatMatrix::from_rows(&[rat_vec(&[2, 1]), rat_vec(&[1, 1])]);
        assert!(inv.nullspace().is_empty());
    }

    #[test]
    fn nullspace_dimension_is_cols_minus_rank() {
        let m = cols(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1], &[1, 0, -1]]);
        assert_eq!(m.nullspace().len(), m.cols() - m.rank());
    }

    #[test]
    fn stiemke_reversible_pair_gives_unit_dependence() {
        let m = cols(&[&[-1, 1], &[1, -1]]);
        let res = positive_nullvector_or_certificate(&m);
        assert_eq!(
            res,
            StiemkeResult::PositiveDependence {
                lambda: rat_vec(&[1, 1])
            }
        );
    }

    #[test]
    fn stiemke_single_column_gives_separator() {
        let m = cols(&[&[-1, 1]]);
        let res = positive_nullvector_or_certificate(&m);
        match &res {
            StiemkeResult::Separator { w } => {
                assert!(res.verify(&m));
                // wᵀM must be strictly negative here.
                assert!(dot(w, &m.column(0)).is_negative());
            }
            other => panic!("expected separator, got {other:?}"),
        }
    }

    #[test]
    fn stiemke_figure2_columns_give_verified_separator() {
        let m = cols(&[&[1, -1, 0], &[1, -1, 0], &[1, 0, -1]]);
        let res = positive_nullvector_or_certificate(&m);
        assert!(matches!(res, StiemkeResult::Separator { .. }));
        assert!(res.verify(&m));
        // The hand-checked separator also verifies.
        let hand = StiemkeResult::Separator {
            w: rat_vec(&[-2, 1, 1]),
        };
        assert!(hand.verify(&m));
    }

    #[test]
    fn stiemke_triangle_gives_unit_lambda() {
        let m = cols(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1]]);
        match positive_nullvector_or_certificate(&m) {
            StiemkeResult::PositiveDependence { lambda } => {
                assert_eq!(lambda, rat_vec(&[1, 1, 1]));
            }
            other => panic!("expected dependence, got {other:?}"),
        }
    }

    #[test]
    fn stiemke_scaling_columns_preserves_variant() {
        let m = cols(&[&[1, -1, 0], &[1, -1, 0], &[1, 0, -1]]);
        let scaled = RatMatrix::from_columns(&[
            m.column(0).iter().map(|x| x * rat(3, 2)).collect(),
            m.column(1).iter().map(|x| x * rat(1, 5)).collect(),
            m.column(2).iter().map(|x| x * rat(7, 3)).collect(),
        ]);
        let a = positive_nullvector_or_certificate(&m);
        let b = positive_nullvector_or_certificate(&scaled);
        assert_eq!(
            matches!(a, StiemkeResult::Separator { .. }),
            matches!(b, StiemkeResult::Separator { .. })
        );
    }

    #[test]
    fn span_orthogonal_one_dimensional() {
        let w = vector_in_span_orthogonal_to(
            &[rat_vec(&[-1, 1])],
            &[],
            &rat_vec(&[-1, 1]),
        )
        .unwrap();
        assert_eq!(w, rat_vec(&[1, -1]));
    }

    #[test]
    fn span_orthogonal_funnel_example() {
        let w = vector_in_span_orthogonal_to(
            &[rat_vec(&[-1, 1, 0]), rat_vec(&[0, -1, 1])],
            &[rat_vec(&[0, -1, 1])],
            &rat_vec(&[-1, 1, 0]),
        )
        .unwrap();
        assert_eq!(w, rat_vec(&[2, -1, -1]));
        assert!(dot(&w, &rat_vec(&[0, -1, 1])).is_zero());
        assert_eq!(dot(&w, &rat_vec(&[-1, 1, 0])), rat_int(-3));
    }

    #[test]
    fn span_orthogonal_rejects_orient_inside_perp_span() {
        let res = vector_in_span_orthogonal_to(
            &[rat_vec(&[1, 0])],
            &[rat_vec(&[1, 0])],
            &rat_vec(&[1, 0]),
        );
        assert_eq!(res, Err(SpanError::NoSeparator));
    }

    #[test]
    fn span_membership_is_exact() {
        let basis = [rat_vec(&[-1, 1, 0]), rat_vec(&[0, -1, 1])];
        let w = vector_in_span_orthogonal_to(&basis, &[], &rat_vec(&[-1, 1, 0])).unwrap();
        // Membership check: rank does not grow when w is appended.
        let mut rows: Vec<Vec<Rational>> = basis.to_vec();
        let base_rank = RatMatrix::from_rows(&rows).rank();
        rows.push(w);
        assert_eq!(RatMatrix::from_rows(&rows).rank(), base_rank);
    }

    #[test]
    fn integer_normalize_keeps_lambda_at_least_one() {
        let v = vec![rat(1, 2), rat(3, 2), rat_int(1)];
        let out = integer_normalize(&v);
        assert_eq!(out, rat_vec(&[1, 3, 2]));
        assert!(out.iter().all(|x| *x >= Rational::one()));
    }
}
