//! Matrices over a Kleene algebra: product, star, and the ω-powers used
//! for Büchi values.

use thiserror::Error;

use crate::kleene::{KleeneAlgebra, OmegaAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("cannot multiply a {0}x{1} by a {2}x{3} matrix")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("accepting count {k} out of range for dimension {n}")]
    AcceptingCount { k: usize, n: usize },
}

/// A dense row-major matrix; vectors are `1×n` or `n×1` matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zeros<A: KleeneAlgebra<Elem = T>>(alg: &A, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, alg.zero())
    }

    pub fn identity<A: KleeneAlgebra<Elem = T>>(alg: &A, n: usize) -> Self {
        let mut m = Self::zeros(alg, n, n);
        for i in 0..n {
            m.set(i, i, alg.one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// The sub-matrix with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut data = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for i in r0..r1 {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c1]);
        }
        Matrix {
            rows: r1 - r0,
            cols: c1 - c0,
            data,
        }
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for (left, right) in [(a, b), (c, d)] {
            for i in 0..left.rows {
                data.extend_from_slice(&left.data[i * left.cols..(i + 1) * left.cols]);
                data.extend_from_slice(&right.data[i * right.cols..(i + 1) * right.cols]);
            }
        }
        Matrix { rows, cols, data }
    }
}

pub fn mat_plus<A: KleeneAlgebra>(alg: &A, x: &Matrix<A::Elem>, y: &Matrix<A::Elem>) -> Matrix<A::Elem> {
    assert_eq!((x.rows, x.cols), (y.rows, y.cols), "shape mismatch");
    Matrix {
        rows: x.rows,
        cols: x.cols,
        data: x.data.iter().zip(&y.data).map(|(a, b)| alg.plus(a, b)).collect(),
    }
}

/// Sum-of-products matrix product.
pub fn mat_product<A: KleeneAlgebra>(
    alg: &A,
    x: &Matrix<A::Elem>,
    y: &Matrix<A::Elem>,
) -> Result<Matrix<A::Elem>, MatrixError> {
    if x.cols != y.rows {
        return Err(MatrixError::DimensionMismatch(x.rows, x.cols, y.rows, y.cols));
    }
    Ok(mul(alg, x, y))
}

fn mul<A: KleeneAlgebra>(alg: &A, x: &Matrix<A::Elem>, y: &Matrix<A::Elem>) -> Matrix<A::Elem> {
    debug_assert_eq!(x.cols, y.rows);
    let mut out = Matrix::zeros(alg, x.rows, y.cols);
    for i in 0..x.rows {
        for l in 0..x.cols {
            let xil = x.get(i, l);
            if alg.is_zero(xil) {
                continue;
            }
            for j in 0..y.cols {
                let term = alg.times(xil, y.get(l, j));
                let acc = alg.plus(out.get(i, j), &term);
                out.set(i, j, acc);
            }
        }
    }
    out
}

/// `M*`, splitting off the first state at each level (`O(n³)` products).
pub fn mat_star<A: KleeneAlgebra>(alg: &A, m: &Matrix<A::Elem>) -> Matrix<A::Elem> {
    mat_star_split(alg, m, &|_| 1)
}

/// `M*` with the top-left block size at dimension `n` chosen by `split(n)`.
///
/// With `e = a ⊕ b d* c` the blocks are `e*`, `e* b d*`, `d* c e*` and
/// `d* ⊕ d* c e* b d*`, so each level needs only the stars of `d` and `e`.
pub fn mat_star_split<A: KleeneAlgebra>(
    alg: &A,
    m: &Matrix<A::Elem>,
    split: &dyn Fn(usize) -> usize,
) -> Matrix<A::Elem> {
    assert_eq!(m.rows, m.cols, "star of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return m.clone();
    }
    if n == 1 {
        return m.map(|x| alg.star(x));
    }
    let k = split(n).clamp(1, n - 1);
    let a = m.block(0, k, 0, k);
    let b = m.block(0, k, k, n);
    let c = m.block(k, n, 0, k);
    let d = m.block(k, n, k, n);
    let ds = mat_star_split(alg, &d, split);
    let b_ds = mul(alg, &b, &ds);
    let ds_c = mul(alg, &ds, &c);
    let e = mat_plus(alg, &a, &mul(alg, &b_ds, &c));
    let es = mat_star_split(alg, &e, split);
    let top_right = mul(alg, &es, &b_ds);
    let bottom_left = mul(alg, &ds_c, &es);
    let bottom_right = mat_plus(alg, &ds, &mul(alg, &bottom_left, &b_ds));
    Matrix::from_blocks(&es, &top_right, &bottom_left, &bottom_right)
}

/// `M*` by the symmetric block formula
/// `[[(a⊕bd*c)*, (a⊕bd*c)* b d*], [(d⊕ca*b)* c a*, (d⊕ca*b)*]]`,
/// recursing on all four stars. Exponential in `n`; a reference route.
pub fn star_block_formula<A: KleeneAlgebra>(alg: &A, m: &Matrix<A::Elem>) -> Matrix<A::Elem> {
    let n = m.rows;
    if n <= 1 {
        return m.map(|x| alg.star(x));
    }
    let (a, b, c, d) = (
        m.block(0, 1, 0, 1),
        m.block(0, 1, 1, n),
        m.block(1, n, 0, 1),
        m.block(1, n, 1, n),
    );
    let as_ = star_block_formula(alg, &a);
    let ds = star_block_formula(alg, &d);
    let top = star_block_formula(alg, &mat_plus(alg, &a, &mul(alg, &mul(alg, &b, &ds), &c)));
    let bottom = star_block_formula(alg, &mat_plus(alg, &d, &mul(alg, &mul(alg, &c, &as_), &b)));
    let top_right = mul(alg, &mul(alg, &top, &b), &ds);
    let bottom_left = mul(alg, &mul(alg, &bottom, &c), &as_);
    Matrix::from_blocks(&top, &top_right, &bottom_left, &bottom)
}

/// `⊕` over all index paths of length at most `maxlen`, by enumeration.
pub fn path_sum_oracle<A: KleeneAlgebra>(
    alg: &A,
    m: &Matrix<A::Elem>,
    maxlen: usize,
) -> Matrix<A::Elem> {
    fn extend<A: KleeneAlgebra>(
        alg: &A,
        m: &Matrix<A::Elem>,
        origin: usize,
        at: usize,
        weight: &A::Elem,
        remaining: usize,
        out: &mut Matrix<A::Elem>,
    ) {
        let acc = alg.plus(out.get(origin, at), weight);
        out.set(origin, at, acc);
        if remaining == 0 {
            return;
        }
        for next in 0..m.cols {
            let w = alg.times(weight, m.get(at, next));
            extend(alg, m, origin, next, &w, remaining - 1, out);
        }
    }
    let mut out = Matrix::zeros(alg, m.rows, m.cols);
    for i in 0..m.rows {
        extend(alg, m, i, i, &alg.one(), maxlen, &mut out);
    }
    out
}

/// Matrix-on-vector action `(X v)_i = ⊕_j X_ij · v_j`.
pub fn mat_act<A: OmegaAlgebra>(alg: &A, x: &Matrix<A::Elem>, v: &[A::Vector]) -> Vec<A::Vector> {
    assert_eq!(x.cols, v.len(), "shape mismatch");
    (0..x.rows)
        .map(|i| {
            (0..x.cols).fold(alg.vzero(), |acc, j| {
                if alg.is_zero(x.get(i, j)) {
                    acc
                } else {
                    alg.vplus(&acc, &alg.act(x.get(i, j), &v[j]))
                }
            })
        })
        .collect()
}

/// `M^ω`: entry `i` sums the weights of all infinite paths from `i`.
///
/// Splitting off the first state, `top = e^ω ⊕ e* b d^ω` with
/// `e = a ⊕ b d* c`; a path from a lower state either stays below forever
/// or enters the first state through `d* c`, so `bottom = d^ω ⊕ d* c top`.
pub fn mat_omega<A: OmegaAlgebra>(alg: &A, m: &Matrix<A::Elem>) -> Vec<A::Vector> {
    assert_eq!(m.rows, m.cols, "omega of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![alg.omega(m.get(0, 0))];
    }
    let a = m.get(0, 0);
    let b = m.block(0, 1, 1, n);
    let c = m.block(1, n, 0, 1);
    let d = m.block(1, n, 1, n);
    let ds = mat_star(alg, &d);
    let d_omega = mat_omega(alg, &d);
    let e = alg.plus(a, mul(alg, &mul(alg, &b, &ds), &c).get(0, 0));
    let es_b = b.map(|x| alg.times(&alg.star(&e), x));
    let top = alg.vplus(&alg.omega(&e), &mat_act(alg, &es_b, &d_omega)[0]);
    let ds_c = mul(alg, &ds, &c);
    let entered = mat_act(alg, &ds_c, std::slice::from_ref(&top));
    let mut out = Vec::with_capacity(n);
    out.push(top);
    out.extend(d_omega.iter().zip(&entered).map(|(u, v)| alg.vplus(u, v)));
    out
}

/// `M^ω` by the symmetric block formula, recursing on both diagonal
/// blocks. Exponential in `n`; a reference route.
pub fn omega_block_formula<A: OmegaAlgebra>(alg: &A, m: &Matrix<A::Elem>) -> Vec<A::Vector> {
    let n = m.rows;
    if n <= 1 {
        return m.entries().map(|x| alg.omega(x)).collect();
    }
    let (a, b, c, d) = (
        m.block(0, 1, 0, 1),
        m.block(0, 1, 1, n),
        m.block(1, n, 0, 1),
        m.block(1, n, 1, n),
    );
    let as_ = star_block_formula(alg, &a);
    let ds = star_block_formula(alg, &d);
    let top_m = mat_plus(alg, &a, &mul(alg, &mul(alg, &b, &ds), &c));
    let bottom_m = mat_plus(alg, &d, &mul(alg, &mul(alg, &c, &as_), &b));
    let top_tail = mat_act(
        alg,
        &mul(alg, &star_block_formula(alg, &top_m), &b),
        &omega_block_formula(alg, &d),
    );
    let bottom_tail = mat_act(
        alg,
        &mul(alg, &star_block_formula(alg, &bottom_m), &c),
        &omega_block_formula(alg, &a),
    );
    omega_block_formula(alg, &top_m)
        .iter()
        .zip(&top_tail)
        .chain(omega_block_formula(alg, &bottom_m).iter().zip(&bottom_tail))
        .map(|(u, v)| alg.vplus(u, v))
        .collect()
}

/// `M^{ω_k}`: infinite paths visiting the first `k` states infinitely often.
///
/// `k = n` gives `M^ω`; `k = 0` gives the zero vector.
pub fn mat_omega_k<A: OmegaAlgebra>(
    alg: &A,
    m: &Matrix<A::Elem>,
    k: usize,
) -> Result<Vec<A::Vector>, MatrixError> {
    let n = m.rows;
    if k > n {
        return Err(MatrixError::AcceptingCount { k, n });
    }
    if k == 0 {
        return Ok(vec![alg.vzero(); n]);
    }
    if k == n {
        return Ok(mat_omega(alg, m));
    }
    let a = m.block(0, k, 0, k);
    let b = m.block(0, k, k, n);
    let c = m.block(k, n, 0, k);
    let d = m.block(k, n, k, n);
    let ds = mat_star(alg, &d);
    let e = mat_plus(alg, &a, &mul(alg, &mul(alg, &b, &ds), &c));
    let top = mat_omega(alg, &e);
    let bottom = mat_act(alg, &mul(alg, &ds, &c), &top);
    Ok(top.into_iter().chain(bottom).collect())
}

/// Matrix representation `(α, M, k)` of an automaton whose states have been
/// reordered so that the first `k` are accepting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRep<T> {
    /// `order[i]` is the original index of the state at position `i`.
    pub order: Vec<usize>,
    pub alpha: Vec<T>,
    pub m: Matrix<T>,
    pub k: usize,
}

impl<T: Clone> MatrixRep<T> {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// `κ`: one on the first `k` rows, zero below.
    pub fn kappa<A: KleeneAlgebra<Elem = T>>(&self, alg: &A) -> Vec<T> {
        (0..self.n())
            .map(|i| if i < self.k { alg.one() } else { alg.zero() })
            .collect()
    }

    /// `α M* κ`.
    pub fn reach_value<A: KleeneAlgebra<Elem = T>>(&self, alg: &A) -> T {
        let ms = mat_star(alg, &self.m);
        let mut total = alg.zero();
        for i in (0..self.n()).filter(|&i| !alg.is_zero(&self.alpha[i])) {
            for j in 0..self.k {
                let term = alg.times(&self.alpha[i], ms.get(i, j));
                total = alg.plus(&total, &term);
            }
        }
        total
    }

    /// `α M^{ω_k}`.
    pub fn buchi_value<A: OmegaAlgebra<Elem = T>>(&self, alg: &A) -> A::Vector {
        let v = mat_omega_k(alg, &self.m, self.k).expect("k ≤ n by construction");
        (0..self.n())
            .filter(|&i| !alg.is_zero(&self.alpha[i]))
            .fold(alg.vzero(), |acc, i| alg.vplus(&acc, &alg.act(&self.alpha[i], &v[i])))
    }
}
