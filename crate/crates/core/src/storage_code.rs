//! The single-repair-group locally repairable storage code.
//!
//! A file is split into r vectors w^(1), ..., w^(r), each of length
//! n = r + 1 over GF(q), together with the parity vector s = sum_i
//! w^(i). Node j (0-based) stores one coordinate of every vector,
//! cyclically shifted, plus one coordinate of s:
//!
//! ```text
//!            node 0      node 1      ...  node r
//! row 0      w^(1)_0     w^(1)_1     ...  w^(1)_r
//! row 1      w^(2)_1     w^(2)_2     ...  w^(2)_0
//! ...
//! row r-1    w^(r)_{r-1} w^(r)_r     ...  w^(r)_{r-2}
//! row r      s_r         s_0         ...  s_{r-1}
//! ```
//!
//! Any one cell can be rebuilt by XORing the other r cells of its
//! coordinate, one from each surviving node. The general
//! reconstruction rule is the F_q-linear combination
//! `omega = sum_i alpha_i * omega_i` with nonzero coefficients; the
//! XOR layout is the all-ones special case.

use crate::gf::{FieldElement, FieldParams};
use crate::{Error, Result};

/// Everything needed to rebuild one subpacket from r helper estimates:
/// the field and the nonzero combination coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairScenario {
    field: FieldParams,
    alphas: Vec<FieldElement>,
}

impl RepairScenario {
    /// A scenario with explicit coefficients, all of which must be
    /// nonzero elements of `field`.
    pub fn new(field: FieldParams, alphas: Vec<FieldElement>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter {
                field: "alphas",
                message: "at least one repair coefficient is required".into(),
            });
        }
        for &a in &alphas {
            field.element(a.value())?;
            if a == FieldElement::ZERO {
                return Err(Error::InvalidParameter {
                    field: "alphas",
                    message: "repair coefficients must be nonzero".into(),
                });
            }
        }
        Ok(RepairScenario { field, alphas })
    }

    /// The XOR repair scenario of the storage layout: locality r with
    /// all coefficients equal to one.
    pub fn xor(field: FieldParams, r: usize) -> Result<Self> {
        RepairScenario::new(field, vec![field.one(); r])
    }

    /// Repair locality r.
    pub fn locality(&self) -> usize {
        self.alphas.len()
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    /// Reconstructs `sum_i alpha_i * estimates[i]` in GF(q).
    pub fn reconstruct(&self, estimates: &[FieldElement]) -> Result<FieldElement> {
        if estimates.len() != self.alphas.len() {
            return Err(Error::DimensionMismatch {
                what: "estimates",
                expected: self.alphas.len(),
                got: estimates.len(),
            });
        }
        let mut acc = self.field.zero();
        for (&alpha, &est) in self.alphas.iter().zip(estimates) {
            acc = self.field.add(acc, self.field.mul(alpha, est)?)?;
        }
        Ok(acc)
    }
}

/// One cell of the storage grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRef {
    pub node: usize,
    pub row: usize,
}

/// The helper cells and coefficients that rebuild one lost cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairEquation {
    pub helpers: Vec<CellRef>,
    pub alphas: Vec<FieldElement>,
}

/// The populated (r+1) x (r+1) storage grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrcLayout {
    field: FieldParams,
    r: usize,
    /// grid[row][node]
    grid: Vec<Vec<FieldElement>>,
}

impl LrcLayout {
    /// Lays out r file vectors of length r+1 across r+1 nodes with the
    /// cyclic shift shown in the module docs, and appends the XOR
    /// parity row.
    pub fn layout(field: FieldParams, file_vectors: &[Vec<FieldElement>]) -> Result<Self> {
        let r = file_vectors.len();
        if r == 0 {
            return Err(Error::InvalidParameter {
                field: "file_vectors",
                message: "at least one file vector is required".into(),
            });
        }
        let n = r + 1;
        for (i, v) in file_vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "file vector",
                    expected: n,
                    got: v.len(),
                });
            }
            for &e in v {
                field.element(e.value())?;
            }
            let _ = i;
        }

        let mut grid = Vec::with_capacity(n);
        for (i, v) in file_vectors.iter().enumerate() {
            grid.push((0..n).map(|j| v[(i + j) % n]).collect());
        }
        let mut parity = vec![field.zero(); n];
        for (c, p) in parity.iter_mut().enumerate() {
            for v in file_vectors {
                *p = field.add(*p, v[c])?;
            }
        }
        grid.push((0..n).map(|j| parity[(j + n - 1) % n]).collect());

        Ok(LrcLayout { field, r, grid })
    }

    /// Repair locality r.
    pub fn locality(&self) -> usize {
        self.r
    }

    /// Number of nodes, r + 1.
    pub fn nodes(&self) -> usize {
        self.r + 1
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    /// Contents of the cell stored at (`node`, `row`).
    pub fn cell(&self, node: usize, row: usize) -> Result<FieldElement> {
        self.check_indices(node, row)?;
        Ok(self.grid[row][node])
    }

    fn check_indices(&self, node: usize, row: usize) -> Result<()> {
        let n = self.nodes();
        if node >= n {
            return Err(Error::IndexOutOfRange {
                what: "node",
                index: node,
                len: n,
            });
        }
        if row >= n {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: row,
                len: n,
            });
        }
        Ok(())
    }

    /// The repair equation for the cell at (`node`, `row`): r helper
    /// cells, one in each surviving node, whose XOR equals the lost
    /// cell. All coefficients are one.
    ///
    /// A data cell w^(i)_c is the parity coordinate s_c minus the
    /// other data coordinates; a parity cell s_c is the sum of all
    /// data coordinates c. Either way the helpers are exactly the
    /// other r cells carrying coordinate c.
    pub fn repair_equation(&self, node: usize, row: usize) -> Result<RepairEquation> {
        self.check_indices(node, row)?;
        let n = self.nodes();
        let r = self.r;
        let mut helpers = Vec::with_capacity(r);
        if row < r {
            let c = (row + node) % n;
            for i in 0..r {
                if i != row {
                    helpers.push(CellRef {
                        node: (c + n - i) % n,
                        row: i,
                    });
                }
            }
            helpers.push(CellRef {
                node: (c + 1) % n,
                row: r,
            });
        } else {
            let c = (node + n - 1) % n;
            for i in 0..r {
                helpers.push(CellRef {
                    node: (c + n - i) % n,
                    row: i,
                });
            }
        }
        Ok(RepairEquation {
            helpers,
            alphas: vec![self.field.one(); r],
        })
    }
}
