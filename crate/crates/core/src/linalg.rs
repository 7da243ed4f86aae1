//! Gaussian elimination over GF(p).
//!
//! Matrices arrive as sparse columns (the natural output of building
//! multiplication maps) and are scattered into a row store for elimination.
//! For p = 2 rows are bit-packed into `u64` words, otherwise every entry is
//! a reduced `u32`. Only forward elimination is performed; solutions and
//! kernel vectors come from back substitution on the echelon form.

use crate::gfp::PrimeModulus;

/// A matrix given by its columns, each a list of `(row, value)` pairs with
/// nonzero reduced values.
#[derive(Clone, Debug, Default)]
pub struct SparseColumns {
    pub nrows: usize,
    pub cols: Vec<Vec<(usize, u32)>>,
}

impl SparseColumns {
    pub fn new(nrows: usize) -> Self {
        SparseColumns {
            nrows,
            cols: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn from_dense(rows: &[Vec<u32>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i, rows[i][j]))
                    .collect()
            })
            .collect();
        SparseColumns { nrows, cols }
    }
}

/// Outcome of testing whether `b` lies in the column span of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// Coefficients `x` with `A x = b`.
    In(Vec<u32>),
    /// A row vector `y` with `y A = 0` and `y b != 0`.
    Out(Vec<u32>),
}

trait RowStore {
    fn nrows(&self) -> usize;
    fn get(&self, r: usize, c: usize) -> u32;
    fn swap_rows(&mut self, a: usize, b: usize);
    /// Scale row `r` so that its entry in column `col` becomes 1.
    fn normalize(&mut self, r: usize, col: usize);
    /// `row[target] -= row[target][col] * row[src]`; the source row is zero
    /// left of `col`, so only columns `>= col` are touched.
    fn eliminate(&mut self, target: usize, src: usize, col: usize);
}

struct DenseRows {
    p: PrimeModulus,
    nrows: usize,
    width: usize,
    data: Vec<u32>,
}

impl DenseRows {
    fn zeros(p: PrimeModulus, nrows: usize, width: usize) -> Self {
        DenseRows {
            p,
            nrows,
            width,
            data: vec![0; nrows * width],
        }
    }

    fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.width + c] = v;
    }
}

impl RowStore for DenseRows {
    fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.width + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.width;
        let (lo, hi) = (a.min(b), a.max(b));
        let (first, second) = self.data.split_at_mut(hi * w);
        first[lo * w..(lo + 1) * w].swap_with_slice(&mut second[..w]);
    }

    fn normalize(&mut self, r: usize, col: usize) {
        let p = self.p;
        let inv = p.inv(self.get(r, col)).expect("pivot is nonzero");
        if inv == 1 {
            return;
        }
        for v in &mut self.data[r * self.width..(r + 1) * self.width] {
            *v = p.mul(*v, inv);
        }
    }

    fn eliminate(&mut self, target: usize, src: usize, col: usize) {
        let factor = self.get(target, col);
        if factor == 0 {
            return;
        }
        let w = self.width;
        let p = self.p.get() as u64;
        let neg = p - factor as u64;
        let (t_row, s_row) = if target < src {
            let (a, b) = self.data.split_at_mut(src * w);
            (&mut a[target * w..(target + 1) * w], &b[..w])
        } else {
            let (a, b) = self.data.split_at_mut(target * w);
            (&mut b[..w], &a[src * w..(src + 1) * w])
        };
        for (t, &s) in t_row[col..].iter_mut().zip(&s_row[col..]) {
            if s != 0 {
                *t = ((*t as u64 + neg * s as u64) % p) as u32;
            }
        }
    }
}

struct BitRows {
    nrows: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn zeros(nrows: usize, width: usize) -> Self {
        let words = width.div_ceil(64);
        BitRows {
            nrows,
            words,
            data: vec![0; nrows * words],
        }
    }

    fn set(&mut self, r: usize, c: usize, v: u32) {
        let w = &mut self.data[r * self.words + c / 64];
        if v & 1 == 1 {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }
}

impl RowStore for BitRows {
    fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> u32 {
        ((self.data[r * self.words + c / 64] >> (c % 64)) & 1) as u32
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        let (lo, hi) = (a.min(b), a.max(b));
        let (first, second) = self.data.split_at_mut(hi * w);
        first[lo * w..(lo + 1) * w].swap_with_slice(&mut second[..w]);
    }

    fn normalize(&mut self, _r: usize, _col: usize) {}

    fn eliminate(&mut self, target: usize, src: usize, col: usize) {
        if self.get(target, col) == 0 {
            return;
        }
        let w = self.words;
        let (t_row, s_row) = if target < src {
            let (a, b) = self.data.split_at_mut(src * w);
            (&mut a[target * w..(target + 1) * w], &b[..w])
        } else {
            let (a, b) = self.data.split_at_mut(target * w);
            (&mut b[..w], &a[src * w..(src + 1) * w])
        };
        let start = col / 64;
        for (t, s) in t_row[start..].iter_mut().zip(&s_row[start..]) {
            *t ^= s;
        }
    }
}

/// Forward elimination over the first `pivot_cols` columns. Returns the pivot
/// column of each of the first `rank` rows; pivots are normalized to 1.
fn echelon<S: RowStore>(s: &mut S, pivot_cols: usize) -> Vec<usize> {
    let nrows = s.nrows();
    let mut pivots = Vec::new();
    for col in 0..pivot_cols {
        let rank = pivots.len();
        if rank == nrows {
            break;
        }
        let Some(r) = (rank..nrows).find(|&r| s.get(r, col) != 0) else {
            continue;
        };
        s.swap_rows(r, rank);
        s.normalize(rank, col);
        for below in rank + 1..nrows {
            s.eliminate(below, rank, col);
        }
        pivots.push(col);
    }
    pivots
}

fn back_substitute<S: RowStore>(
    s: &S,
    pivots: &[usize],
    ncols: usize,
    p: PrimeModulus,
    mut x: Vec<u32>,
    rhs: impl Fn(usize) -> u32,
) -> Vec<u32> {
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = rhs(k);
        for (j, &xj) in x.iter().enumerate().take(ncols).skip(pc + 1) {
            if xj != 0 {
                let e = s.get(k, j);
                if e != 0 {
                    acc = p.sub(acc, p.mul(e, xj));
                }
            }
        }
        x[pc] = acc;
    }
    x
}

enum Store {
    Dense(DenseRows),
    Bits(BitRows),
}

fn scatter(a: &SparseColumns, p: PrimeModulus, extra: usize) -> Store {
    let width = a.ncols() + extra;
    if p.get() == 2 {
        let mut s = BitRows::zeros(a.nrows, width);
        for (j, col) in a.cols.iter().enumerate() {
            for &(i, v) in col {
                s.set(i, j, v);
            }
        }
        Store::Bits(s)
    } else {
        let mut s = DenseRows::zeros(p, a.nrows, width);
        for (j, col) in a.cols.iter().enumerate() {
            for &(i, v) in col {
                s.set(i, j, v);
            }
        }
        Store::Dense(s)
    }
}

pub fn rank(a: &SparseColumns, p: PrimeModulus) -> usize {
    if a.nrows == 0 || a.ncols() == 0 {
        return 0;
    }
    // eliminate along the shorter dimension
    let t;
    let a = if a.ncols() > a.nrows {
        t = transpose(a);
        &t
    } else {
        a
    };
    let n = a.ncols();
    match scatter(a, p, 0) {
        Store::Dense(mut s) => echelon(&mut s, n).len(),
        Store::Bits(mut s) => echelon(&mut s, n).len(),
    }
}

pub fn transpose(a: &SparseColumns) -> SparseColumns {
    let mut cols = vec![Vec::new(); a.nrows];
    for (j, col) in a.cols.iter().enumerate() {
        for &(i, v) in col {
            cols[i].push((j, v));
        }
    }
    SparseColumns {
        nrows: a.ncols(),
        cols,
    }
}

/// Basis of the right kernel `{x : A x = 0}`.
pub fn kernel_basis(a: &SparseColumns, p: PrimeModulus) -> Vec<Vec<u32>> {
    let n = a.ncols();
    if a.nrows == 0 {
        return (0..n).map(|j| unit(n, j)).collect();
    }
    match scatter(a, p, 0) {
        Store::Dense(mut s) => kernel_from(&mut s, n, p),
        Store::Bits(mut s) => kernel_from(&mut s, n, p),
    }
}

fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[j] = 1;
    v
}

fn kernel_from<S: RowStore>(s: &mut S, n: usize, p: PrimeModulus) -> Vec<Vec<u32>> {
    let pivots = echelon(s, n);
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| back_substitute(&*s, &pivots, n, p, unit(n, f), |_| 0))
        .collect()
}

/// Decide whether `b` is in the column span of `a`.
pub fn solve(a: &SparseColumns, b: &[(usize, u32)], p: PrimeModulus) -> Solution {
    let n = a.ncols();
    let mut aug = a.clone();
    aug.cols.push(b.to_vec());
    let consistent = match scatter(&aug, p, 0) {
        Store::Dense(mut s) => try_solve(&mut s, n, p),
        Store::Bits(mut s) => try_solve(&mut s, n, p),
    };
    if let Some(x) = consistent {
        return Solution::In(x);
    }
    let nrows = a.nrows;
    let y = match scatter(&aug, p, nrows) {
        Store::Dense(mut s) => {
            for i in 0..nrows {
                s.set(i, n + 1 + i, 1);
            }
            separating_row(&mut s, n, nrows)
        }
        Store::Bits(mut s) => {
            for i in 0..nrows {
                s.set(i, n + 1 + i, 1);
            }
            separating_row(&mut s, n, nrows)
        }
    };
    Solution::Out(y)
}

fn try_solve<S: RowStore>(s: &mut S, n: usize, p: PrimeModulus) -> Option<Vec<u32>> {
    let pivots = echelon(s, n);
    let rank = pivots.len();
    if (rank..s.nrows()).any(|r| s.get(r, n) != 0) {
        return None;
    }
    Some(back_substitute(&*s, &pivots, n, p, vec![0; n], |k| s.get(k, n)))
}

fn separating_row<S: RowStore>(s: &mut S, n: usize, nrows: usize) -> Vec<u32> {
    let pivots = echelon(s, n);
    let k = (pivots.len()..s.nrows())
        .find(|&r| s.get(r, n) != 0)
        .expect("system was inconsistent");
    (0..nrows).map(|i| s.get(k, n + 1 + i)).collect()
}

/// Apply `A` to a dense vector.
pub fn apply(a: &SparseColumns, x: &[u32], p: PrimeModulus) -> Vec<u32> {
    let mut out = vec![0u32; a.nrows];
    for (col, &xj) in a.cols.iter().zip(x) {
        if xj == 0 {
            continue;
        }
        for &(i, v) in col {
            out[i] = p.add(out[i], p.mul(v, xj));
        }
    }
    out
}
