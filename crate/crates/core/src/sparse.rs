//! Minimal CSR sparse matrices with deterministic assembly.
//!
//! Triplets are accumulated in a fixed element order and merged by a stable
//! sort, so two assemblies of the same inputs produce bit-identical value
//! arrays.

use std::io::Write;

use crate::error::{Error, Result};

/// Coordinate-format accumulator carrying one shared index pattern and up to
/// three value streams (axial stiffness, transverse stiffness, mass).
#[derive(Debug, Clone)]
pub struct CooTriple {
    n: usize,
    idx: Vec<(u32, u32)>,
    v_axial: Vec<f64>,
    v_trans: Vec<f64>,
    v_mass: Vec<f64>,
}

impl CooTriple {
    pub fn new(n: usize) -> Self {
        CooTriple {
            n,
            idx: Vec::new(),
            v_axial: Vec::new(),
            v_trans: Vec::new(),
            v_mass: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, axial: f64, trans: f64, mass: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.idx.push((i as u32, j as u32));
        self.v_axial.push(axial);
        self.v_trans.push(trans);
        self.v_mass.push(mass);
    }

    /// Merge duplicates into three CSR matrices sharing one pattern.
    /// Duplicate entries are summed in their push order (stable sort), which
    /// pins the floating-point accumulation order.
    pub fn into_csr(self) -> (Csr, Csr, Csr) {
        let n = self.n;
        let mut order: Vec<u32> = (0..self.idx.len() as u32).collect();
        order.sort_by_key(|&t| self.idx[t as usize]);
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<u32> = Vec::new();
        let mut a = Vec::new();
        let mut t = Vec::new();
        let mut m = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for &o in &order {
            let key = self.idx[o as usize];
            if last == Some(key) {
                let e = a.len() - 1;
                a[e] += self.v_axial[o as usize];
                t[e] += self.v_trans[o as usize];
                m[e] += self.v_mass[o as usize];
            } else {
                col_idx.push(key.1);
                a.push(self.v_axial[o as usize]);
                t.push(self.v_trans[o as usize]);
                m.push(self.v_mass[o as usize]);
                row_ptr[key.0 as usize + 1] += 1;
                last = Some(key);
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mk = |values: Vec<f64>| Csr {
            n,
            row_ptr: row_ptr.clone(),
            col_idx: col_idx.clone(),
            values,
        };
        (mk(a), mk(t), mk(m))
    }
}

/// Compressed sparse row, square.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = s;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Half-bandwidth: max |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut b = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k] as usize;
                b = b.max(i.abs_diff(j));
            }
        }
        b
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if *c as usize == i {
                    d[i] = *v;
                }
            }
        }
        d
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().sum::<f64>())
            .collect()
    }

    pub fn sum_entries(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest absolute asymmetry |A - A^T| over stored entries (tests).
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                let vt = self.get(j, i);
                worst = worst.max((v - vt).abs());
            }
        }
        worst
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Entry-wise `self + alpha * other`. The fast path reuses a shared
    /// pattern; mismatched patterns fall back to a row merge.
    pub fn add_scaled(&self, other: &Csr, alpha: f64) -> Result<Csr> {
        if self.n != other.n {
            return Err(Error::Logic("dimension mismatch in add_scaled".into()));
        }
        if self.row_ptr == other.row_ptr && self.col_idx == other.col_idx {
            let values = self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect();
            return Ok(Csr {
                n: self.n,
                row_ptr: self.row_ptr.clone(),
                col_idx: self.col_idx.clone(),
                values,
            });
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0usize, 0usize);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(u32::MAX);
                let jb = cb.get(q).copied().unwrap_or(u32::MAX);
                if ja < jb {
                    col_idx.push(ja);
                    values.push(va[p]);
                    p += 1;
                } else if jb < ja {
                    col_idx.push(jb);
                    values.push(alpha * vb[q]);
                    q += 1;
                } else {
                    col_idx.push(ja);
                    values.push(va[p] + alpha * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(Csr {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn scaled(&self, alpha: f64) -> Csr {
        Csr {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Matrix Market coordinate format, symmetric storage (lower triangle,
    /// 1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        let lower = (0..self.n)
            .map(|i| {
                let (cols, _) = self.row(i);
                cols.iter().filter(|&&c| (c as usize) <= i).count()
            })
            .sum::<usize>();
        writeln!(w, "{} {} {}", self.n, self.n, lower)?;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j <= i {
                    writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
                }
            }
        }
        Ok(())
    }
}

/// x^T (A y).
pub fn quadratic_form(a: &Csr, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.n {
        let (cols, vals) = a.row(i);
        let mut row = 0.0;
        for (c, v) in cols.iter().zip(vals) {
            row += v * y[*c as usize];
        }
        s += x[i] * row;
    }
    s
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
