//! Determinantal representations: polynomials written as
//! `det(L + diag(X))` with `L` constant and each `X_k` an affine form in
//! the source variables.

mod abp;
pub mod det;
mod formula;
mod gadget;

pub use abp::{abp_to_dpp, imm_variable, Abp, AbpEdge, AbpError};
pub use det::{cycle_cover_sum, cycle_covers, exact_determinant, symbolic_determinant, CycleCover, DeterminantError};
pub use formula::{Formula, FormulaParseError};
pub use gadget::{add_gadgets, base_gadget, formula_to_dpp, formula_to_gadget, mul_gadgets, verify_gadget, GadgetCondition, GadgetReport, StGadget};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::circuit::{Assignment, VarId};
use crate::poly::{Monomial, SparsePolynomial};
use crate::rational::{format_rational, Rational};

/// Weight of a self-loop: a constant or a single variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Const(Rational),
    Var(VarId),
}

impl Label {
    pub fn constant(value: i64) -> Self {
        Label::Const(Rational::from_integer(value.into()))
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        match self {
            Label::Const(c) => SparsePolynomial::constant(c.clone()),
            Label::Var(v) => SparsePolynomial::var(v.clone()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Const(c) => f.write_str(&format_rational(c)),
            Label::Var(v) => write!(f, "{v}"),
        }
    }
}

/// `constant + Σ coefficient·var`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AffineForm {
    pub constant: Rational,
    pub terms: BTreeMap<VarId, Rational>,
}

impl AffineForm {
    pub fn var(v: VarId) -> Self {
        AffineForm { constant: Rational::zero(), terms: [(v, Rational::one())].into_iter().collect() }
    }

    pub fn constant(c: Rational) -> Self {
        AffineForm { constant: c, terms: BTreeMap::new() }
    }

    pub fn evaluate(&self, point: &Assignment<Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += point.get(v)? * c;
        }
        Some(acc)
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        let mut p = SparsePolynomial::constant(self.constant.clone());
        for (v, c) in &self.terms {
            p.add_term(Monomial::var(v.clone()), c.clone());
        }
        p
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, c) in &self.terms {
            write!(f, "{}*{v} + ", format_rational(c))?;
        }
        f.write_str(&format_rational(&self.constant))
    }
}

/// Name of the matrix variable on diagonal position `k` (0-based).
pub fn diagonal_variable(k: usize) -> VarId {
    VarId::new(&alloc::format!("D{}", k + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DppError {
    #[error("variable on off-diagonal position ({row}, {col})")]
    OffDiagonalVariable { row: usize, col: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("projection refers to diagonal position {0} outside the matrix")]
    ProjectionOutOfRange(usize),
    #[error("shift too small: m must exceed {minimum}")]
    ShiftTooSmall { minimum: String },
    #[error("{0} projected positions are too many for principal-minor expansion")]
    TooManyVariables(usize),
    #[error("point does not assign every source variable")]
    Unassigned,
    #[error(transparent)]
    Determinant(#[from] DeterminantError),
}

/// One matrix cell as written in a file: a constant plus, on the diagonal
/// only, an optional matrix variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixEntry {
    pub var: Option<VarId>,
    pub constant: Rational,
}

/// `det(L + diag(X))` where `X_k = projection[k]` for projected positions
/// and `0` elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DppRepresentation {
    kernel: Vec<Vec<Rational>>,
    projection: BTreeMap<usize, AffineForm>,
}

/// Largest number of projected positions expanded by principal minors.
pub const PRINCIPAL_MINOR_LIMIT: usize = 16;

impl DppRepresentation {
    pub fn new(kernel: Vec<Vec<Rational>>, projection: BTreeMap<usize, AffineForm>) -> Result<Self, DppError> {
        let n = kernel.len();
        if kernel.iter().any(|r| r.len() != n) {
            return Err(DppError::NotSquare);
        }
        if let Some(&k) = projection.keys().find(|&&k| k >= n) {
            return Err(DppError::ProjectionOutOfRange(k));
        }
        Ok(DppRepresentation { kernel, projection })
    }

    /// Builds from file-level entries, rejecting variables off the
    /// diagonal. `sources` maps matrix variables to affine forms.
    pub fn from_entries(
        entries: &[Vec<MatrixEntry>],
        sources: &BTreeMap<VarId, AffineForm>,
    ) -> Result<Self, DppError> {
        check_diagonal_confinement(entries)?;
        let mut projection = BTreeMap::new();
        let kernel = entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if let Some(v) = &row[i].var {
                    let form = sources.get(v).cloned().unwrap_or_else(|| AffineForm::var(v.clone()));
                    projection.insert(i, form);
                }
                row.iter().map(|e| e.constant.clone()).collect()
            })
            .collect();
        DppRepresentation::new(kernel, projection)
    }

    pub fn size(&self) -> usize {
        self.kernel.len()
    }

    pub fn kernel(&self) -> &[Vec<Rational>] {
        &self.kernel
    }

    pub fn projection(&self) -> &BTreeMap<usize, AffineForm> {
        &self.projection
    }

    /// File-level view: diagonal positions with a projection carry the
    /// matrix variable [`diagonal_variable`].
    pub fn entries(&self) -> Vec<Vec<MatrixEntry>> {
        self.kernel
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| MatrixEntry {
                        var: (i == j && self.projection.contains_key(&i)).then(|| diagonal_variable(i)),
                        constant: c.clone(),
                    })
                    .collect()
            })
            .collect()
    }

    /// Projection keyed by matrix variable names.
    pub fn named_projection(&self) -> BTreeMap<VarId, AffineForm> {
        self.projection.iter().map(|(k, f)| (diagonal_variable(*k), f.clone())).collect()
    }

    /// The numeric matrix at a source point.
    pub fn matrix_at(&self, point: &Assignment<Rational>) -> Result<Vec<Vec<Rational>>, DppError> {
        let mut m = self.kernel.clone();
        for (k, f) in &self.projection {
            m[*k][*k] += f.evaluate(point).ok_or(DppError::Unassigned)?;
        }
        Ok(m)
    }

    pub fn evaluate(&self, point: &Assignment<Rational>) -> Result<Rational, DppError> {
        Ok(exact_determinant(&self.matrix_at(point)?)?)
    }

    /// Matrix with polynomial entries in the source variables.
    pub fn symbolic_matrix(&self) -> Vec<Vec<SparsePolynomial>> {
        let mut m: Vec<Vec<SparsePolynomial>> = self
            .kernel
            .iter()
            .map(|r| r.iter().map(|c| SparsePolynomial::constant(c.clone())).collect())
            .collect();
        for (k, f) in &self.projection {
            m[*k][*k] = m[*k][*k].add(&f.to_polynomial());
        }
        m
    }

    /// Projected determinant as a polynomial, via
    /// `det(L + diag X) = Σ_S Π_{k∈S} X_k · det(L minus rows/cols S)`
    /// over subsets `S` of the projected positions.
    pub fn polynomial(&self) -> Result<SparsePolynomial, DppError> {
        let positions: Vec<usize> = self.projection.keys().copied().collect();
        if positions.len() > PRINCIPAL_MINOR_LIMIT {
            return Err(DppError::TooManyVariables(positions.len()));
        }
        let n = self.size();
        let mut acc = SparsePolynomial::zero();
        for mask in 0u32..(1 << positions.len()) {
            let chosen: Vec<usize> =
                positions.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &k)| k).collect();
            let keep: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            let sub: Vec<Vec<Rational>> =
                keep.iter().map(|&i| keep.iter().map(|&j| self.kernel[i][j].clone()).collect()).collect();
            let minor = exact_determinant(&sub)?;
            if minor.is_zero() {
                continue;
            }
            let mut term = SparsePolynomial::constant(minor);
            for k in &chosen {
                term = term.mul(&self.projection[k].to_polynomial());
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Projected determinant by symbolic cofactor expansion (small
    /// matrices only).
    pub fn polynomial_by_cofactors(&self) -> Result<SparsePolynomial, DppError> {
        Ok(symbolic_determinant(&self.symbolic_matrix())?)
    }

    /// Constant matrix obtained by setting every matrix variable to zero.
    pub fn constant_matrix(&self) -> &[Vec<Rational>] {
        &self.kernel
    }
}

/// Fails on the first off-diagonal cell carrying a variable.
pub fn check_diagonal_confinement(entries: &[Vec<MatrixEntry>]) -> Result<(), DppError> {
    let n = entries.len();
    for (i, row) in entries.iter().enumerate() {
        if row.len() != n {
            return Err(DppError::NotSquare);
        }
        if let Some(j) = row.iter().enumerate().position(|(j, e)| j != i && e.var.is_some()) {
            return Err(DppError::OffDiagonalVariable { row: i, col: j });
        }
    }
    Ok(())
}

/// Smallest admissible shift is anything strictly above
/// `max_k (Σ_{j≠k} |L_kj| - L_kk)`.
pub fn minimal_shift(rep: &DppRepresentation) -> Rational {
    rep.kernel
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let off = row
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Rational::zero(), |acc, (_, x)| acc + x.abs());
            off - &row[i]
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Adds `m` to every diagonal entry of the kernel and subtracts it in the
/// projection, leaving the projected determinant unchanged. The shifted
/// kernel must be strictly diagonally dominant with positive diagonal.
pub fn psd_shift(rep: &DppRepresentation, m: &Rational) -> Result<DppRepresentation, DppError> {
    let minimum = minimal_shift(rep);
    if *m <= minimum {
        return Err(DppError::ShiftTooSmall { minimum: format_rational(&minimum) });
    }
    let mut kernel = rep.kernel.clone();
    let mut projection = rep.projection.clone();
    for (k, row) in kernel.iter_mut().enumerate() {
        row[k] += m;
        let form = projection.entry(k).or_default();
        form.constant -= m;
    }
    debug_assert!(det::strictly_diagonally_dominant(&kernel));
    debug_assert!(kernel.iter().enumerate().all(|(i, r)| r[i].is_positive()));
    Ok(DppRepresentation { kernel, projection })
}
