//! Small dense matrices over an unramified context.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar};

#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<PadicScalar>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(ctx: &Ctx, rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Mat {
        let mut m = Mat::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<PadicScalar>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &PadicScalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: PadicScalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.data
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ctx = self.data[0].ctx().clone();
        let mut out = Mat::zeros(&ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = ctx.zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        self.try_mul(other).expect("matrix shapes must agree")
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Determinant by cofactor expansion along the first row; division free,
    /// so no precision is lost.
    pub fn det(&self) -> Result<PadicScalar> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.cols).collect();
        Ok(self.det_minor(0, &idx))
    }

    fn det_minor(&self, row: usize, cols: &[usize]) -> PadicScalar {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = self.get(row, cols[0]).ctx().zero();
        for (k, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry * &self.det_minor(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Solve `self * x = b` for a square matrix whose elimination pivots are
    /// units. Pivots are chosen by minimal valuation, ties by lowest row.
    pub fn solve(&self, b: &[PadicScalar]) -> Result<Vec<PadicScalar>> {
        let n = self.rows;
        if n != self.cols || b.len() != n {
            return Err(Error::Shape("solve needs a square system".into()));
        }
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a.get(r, col).is_zero())
                .min_by_key(|&r| a.get(r, col).valuation().bound())
                .ok_or(Error::NonUnit)?;
            if !a.get(pivot, col).is_unit() {
                return Err(Error::NonUnit);
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                }
                rhs.swap(pivot, col);
            }
            let inv = a.get(col, col).inv()?;
            for c in 0..n {
                let v = a.get(col, c) * &inv;
                a.set(col, c, v);
            }
            rhs[col] = &rhs[col] * &inv;
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c) - &(&factor * a.get(col, c));
                    a.set(r, c, v);
                }
                rhs[r] = &rhs[r] - &(&factor * &rhs[col]);
            }
        }
        Ok(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn det_of_product() {
        let ctx = make_context(5, 2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = Mat::from_rows((0..3).map(|_| (0..3).map(|_| ctx.random(&mut rng)).collect()).collect()).unwrap();
            let b = Mat::from_rows((0..3).map(|_| (0..3).map(|_| ctx.random(&mut rng)).collect()).collect()).unwrap();
            assert_eq!(a.mul(&b).det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        }
    }

    #[test]
    fn solve_roundtrip() {
        let ctx = make_context(3, 3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut done = 0;
        while done < 20 {
            let a = Mat::from_rows((0..3).map(|_| (0..3).map(|_| ctx.random(&mut rng)).collect()).collect()).unwrap();
            if !a.det().unwrap().is_unit() {
                continue;
            }
            let b: Vec<_> = (0..3).map(|_| ctx.random(&mut rng)).collect();
            let x = a.solve(&b).unwrap();
            let xm = Mat::from_rows(x.iter().map(|v| vec![v.clone()]).collect()).unwrap();
            let ax = a.mul(&xm);
            for i in 0..3 {
                assert_eq!(ax.get(i, 0), &b[i]);
            }
            done += 1;
        }
    }
}
