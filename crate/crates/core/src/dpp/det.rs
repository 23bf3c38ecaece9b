//! Determinants: fraction-free elimination for numeric matrices, memoized
//! cofactor expansion and cycle-cover enumeration for symbolic ones.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::SparsePolynomial;
use crate::rational::Rational;

/// Largest matrix accepted by the symbolic determinant routines.
pub const SYMBOLIC_LIMIT: usize = 12;
/// Largest matrix accepted by the cycle-cover enumerator.
pub const CYCLE_COVER_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DeterminantError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("{size}x{size} matrix exceeds the symbolic limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize, DeterminantError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(DeterminantError::NotSquare);
    }
    Ok(n)
}

/// Determinant by Bareiss elimination on the integer matrix obtained by
/// clearing each row's denominators.
pub fn exact_determinant(matrix: &[Vec<Rational>]) -> Result<Rational, DeterminantError> {
    let n = check_square(matrix)?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in matrix {
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        scale *= l;
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Rational::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(Rational::new(sign * &a[n - 1][n - 1], scale))
}

/// Symbolic determinant by Laplace expansion along rows, memoized on the
/// set of columns still available.
pub fn symbolic_determinant(matrix: &[Vec<SparsePolynomial>]) -> Result<SparsePolynomial, DeterminantError> {
    let n = check_square(matrix)?;
    if n > SYMBOLIC_LIMIT {
        return Err(DeterminantError::TooLarge { size: n, limit: SYMBOLIC_LIMIT });
    }
    let mut memo: BTreeMap<u32, SparsePolynomial> = BTreeMap::new();
    Ok(minor(matrix, 0, (1u32 << n) - 1, &mut memo))
}

fn minor(m: &[Vec<SparsePolynomial>], row: usize, cols: u32, memo: &mut BTreeMap<u32, SparsePolynomial>) -> SparsePolynomial {
    if row == m.len() {
        return SparsePolynomial::constant(Rational::one());
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let mut acc = SparsePolynomial::zero();
    let mut position = 0;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = &m[row][c];
        if !entry.is_zero() {
            let rest = minor(m, row + 1, cols & !(1 << c), memo);
            let term = entry.mul(&rest);
            acc = if position % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        position += 1;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// One cycle cover: the permutation as disjoint cycles, its sign
/// `(-1)^(n + #cycles)` and its signed weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCover {
    pub cycles: Vec<Vec<usize>>,
    pub sign: i8,
    pub weight: SparsePolynomial,
}

/// Every cycle cover with nonzero weight. The weights sum to the
/// determinant.
pub fn cycle_covers(matrix: &[Vec<SparsePolynomial>]) -> Result<Vec<CycleCover>, DeterminantError> {
    let n = check_square(matrix)?;
    if n > CYCLE_COVER_LIMIT {
        return Err(DeterminantError::TooLarge { size: n, limit: CYCLE_COVER_LIMIT });
    }
    let mut out = Vec::new();
    let mut perm = alloc::vec![usize::MAX; n];
    let mut used = alloc::vec![false; n];
    permutations(matrix, 0, &mut perm, &mut used, &mut out);
    Ok(out)
}

fn permutations(
    m: &[Vec<SparsePolynomial>],
    row: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<CycleCover>,
) {
    let n = m.len();
    if row == n {
        let mut seen = alloc::vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = perm[v];
            }
            cycles.push(cycle);
        }
        let sign: i8 = if (n + cycles.len()) % 2 == 0 { 1 } else { -1 };
        let mut weight = SparsePolynomial::constant(Rational::from_integer(sign.into()));
        for (i, &j) in perm.iter().enumerate() {
            weight = weight.mul(&m[i][j]);
        }
        out.push(CycleCover { cycles, sign, weight });
        return;
    }
    for c in 0..n {
        if used[c] || m[row][c].is_zero() {
            continue;
        }
        used[c] = true;
        perm[row] = c;
        permutations(m, row + 1, perm, used, out);
        used[c] = false;
    }
}

/// Sum of the signed weights of all cycle covers.
pub fn cycle_cover_sum(matrix: &[Vec<SparsePolynomial>]) -> Result<SparsePolynomial, DeterminantError> {
    Ok(cycle_covers(matrix)?.iter().fold(SparsePolynomial::zero(), |acc, c| acc.add(&c.weight)))
}

/// Whether every off-diagonal row sum of absolute values is strictly below
/// the diagonal entry.
pub fn strictly_diagonally_dominant(matrix: &[Vec<Rational>]) -> bool {
    matrix.iter().enumerate().all(|(i, row)| {
        let off = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(Rational::zero(), |acc, (_, x)| acc + x.abs());
        row[i] > off
    })
}
