//! Triplet accumulation and compressed sparse row storage.

/// Unordered (row, col, value) contributions collected during assembly.
#[derive(Clone, Debug, Default)]
pub struct TripletList {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl TripletList {
    pub fn new(n: usize) -> Self {
        assert!(n < u32::MAX as usize);
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        if value != 0.0 {
            self.entries.push((row as u32, col as u32, value));
        }
    }

    /// Sum duplicates and compress.
    pub fn to_csr(mut self) -> CsrMatrix {
        self.entries
            .sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut it = self.entries.iter().peekable();
        while let Some(&(r, c, v)) = it.next() {
            let mut sum = v;
            while let Some(&&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    sum += v2;
                    it.next();
                } else {
                    break;
                }
            }
            row_ptr[r as usize + 1] += 1;
            cols.push(c as usize);
            vals.push(sum);
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// Square sparse matrix in compressed sparse row format.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, i)).abs());
            }
        }
        worst
    }

    /// Largest row population.
    pub fn max_row_nnz(&self) -> usize {
        (0..self.n)
            .map(|i| self.row_ptr[i + 1] - self.row_ptr[i])
            .max()
            .unwrap_or(0)
    }

    /// Dense copy, for the direct solver and desk-scale diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                dense[i][*c] = *v;
            }
        }
        dense
    }

    /// Coordinate-format dump: `row col value` per line, 0-based indices,
    /// 17 significant digits.
    pub fn write_coo(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:.16e}", i, c, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let mut t = TripletList::new(3);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(2, 1, -1.0);
        t.push(1, 2, 0.0); // dropped
        let m = t.to_csr();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(2, 1), -1.0);
        assert_eq!(m.get(1, 2), 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let mut t = TripletList::new(3);
        t.push(0, 0, 2.0);
        t.push(0, 2, 1.0);
        t.push(1, 1, -1.0);
        t.push(2, 0, 4.0);
        t.push(2, 2, 0.5);
        let m = t.to_csr();
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        m.mul_vec(&x, &mut y);
        assert_eq!(y, [5.0, -2.0, 5.5]);
        assert_eq!(m.max_row_nnz(), 2);
    }

    #[test]
    fn asymmetry_detects() {
        let mut t = TripletList::new(2);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0 + 1e-3);
        let m = t.to_csr();
        assert!((m.max_asymmetry() - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn coo_dump_format() {
        let mut t = TripletList::new(2);
        t.push(1, 0, 0.5);
        let m = t.to_csr();
        let mut buf = Vec::new();
        m.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.trim(), "1 0 5.0000000000000000e-1");
    }
}
