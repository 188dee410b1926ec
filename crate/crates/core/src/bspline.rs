//! Univariate and tensor-product B-spline bases on the unit interval/cube.
//!
//! Knot vectors are open: first and last knot repeated exactly `p + 1` times,
//! so the basis is interpolatory at both ends of `[0, 1]`. Evaluation uses the
//! local Cox–de Boor algorithm; the `0/0 := 0` convention of the recursion is
//! implicit because only nonempty spans are ever visited.

use crate::error::Error;
use crate::util::Vec3;
use crate::Result;

/// An open knot vector with its spline degree.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

/// One nonempty knot span `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    /// Index `i` into the knot list with `knots[i] = lo`.
    pub knot_index: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl KnotVector {
    /// Validates and wraps a knot list.
    ///
    /// Rules: knots nondecreasing in `[0, 1]` starting at 0 and ending at 1,
    /// end multiplicities exactly `p + 1`, interior multiplicities at most
    /// `max(p, 1)`, and at least `p + 1` basis functions.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(Error::InvalidKnots(format!(
                "need at least {} knots for degree {}, got {}",
                2 * (p + 1),
                p,
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots("knots must be nondecreasing".into()));
        }
        let m = knots.len() - 1;
        if knots[0] != 0.0 || knots[m] != 1.0 {
            return Err(Error::InvalidKnots(format!(
                "open knot vector must run from 0 to 1, got [{}, {}]",
                knots[0], knots[m]
            )));
        }
        if knots[p] != knots[0] || knots[p + 1] == knots[0] {
            return Err(Error::InvalidKnots(format!(
                "first knot must have multiplicity exactly {}",
                p + 1
            )));
        }
        if knots[m - p] != knots[m] || knots[m - p - 1] == knots[m] {
            return Err(Error::InvalidKnots(format!(
                "last knot must have multiplicity exactly {}",
                p + 1
            )));
        }
        // Interior multiplicities.
        let max_mult = p.max(1);
        let mut i = p + 1;
        while i < m - p {
            let mut mult = 1;
            while i + mult <= m - p && knots[i + mult] == knots[i] {
                mult += 1;
            }
            if mult > max_mult {
                return Err(Error::InvalidKnots(format!(
                    "interior knot {} has multiplicity {} > {}",
                    knots[i], mult, max_mult
                )));
            }
            i += mult;
        }
        let kv = Self { degree, knots };
        debug_assert!(kv.num_basis() > p);
        Ok(kv)
    }

    /// Open knot vector with `spans` uniform nonempty spans.
    pub fn open_uniform(degree: usize, spans: usize) -> Self {
        assert!(spans >= 1);
        let mut knots = vec![0.0; degree];
        for i in 0..=spans {
            knots.push(i as f64 / spans as f64);
        }
        knots.extend(std::iter::repeat_n(1.0, degree));
        Self::new(degree, knots).expect("uniform open knot vector is valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions `n = len(knots) - p - 1`.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Distinct knot values (breakpoints).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &k in &self.knots {
            if out.last().is_none_or(|&last| k > last) {
                out.push(k);
            }
        }
        out
    }

    /// All nonempty spans in order.
    pub fn spans(&self) -> Vec<Span> {
        let n = self.num_basis();
        (self.degree..n)
            .filter(|&i| self.knots[i + 1] > self.knots[i])
            .map(|i| Span {
                knot_index: i,
                lo: self.knots[i],
                hi: self.knots[i + 1],
            })
            .collect()
    }

    /// Largest span width (the parametric mesh size).
    pub fn max_span(&self) -> f64 {
        self.spans().iter().map(Span::width).fold(0.0, f64::max)
    }

    /// Knot span containing `x`: the unique `i` with `knots[i] <= x < knots[i+1]`,
    /// except `x = 1` which maps to the last nonempty span.
    pub fn find_span(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { value: x });
        }
        let n = self.num_basis();
        if x >= self.knots[n] {
            // x == 1 for an open vector; knots[n-1] < knots[n] always holds.
            return Ok(n - 1);
        }
        Ok(self.knots.partition_point(|&k| k <= x) - 1)
    }

    /// Greville abscissa of basis function `i`: mean of `knots[i+1 ..= i+p]`.
    pub fn greville(&self, i: usize) -> f64 {
        let p = self.degree;
        if p == 0 {
            return 0.5 * (self.knots[i] + self.knots[i + 1]);
        }
        self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64
    }

    /// The `p + 1` basis values that may be nonzero at `x`.
    ///
    /// Returns `(first, values)` where `values[j] = B_{first + j, p}(x)`.
    pub fn eval_basis(&self, x: f64) -> Result<(usize, Vec<f64>)> {
        let span = self.find_span(x)?;
        let p = self.degree;
        let mut values = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        values[0] = 1.0;
        for j in 1..=p {
            left[j] = x - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = values[r] / (right[r + 1] + left[j - r]);
                values[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            values[j] = saved;
        }
        Ok((span - p, values))
    }

    /// Basis values and derivatives up to `order` at `x`.
    ///
    /// Returns `(first, table)` with `table[r][j] = d^r/dx^r B_{first + j, p}(x)`;
    /// row 0 equals [`eval_basis`](Self::eval_basis).
    pub fn eval_basis_derivs(&self, x: f64, order: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        let p = self.degree;
        if order > p {
            return Err(Error::DerivativeOrder { order, degree: p });
        }
        let span = self.find_span(x)?;
        let k = order;

        // Triangular table of all lower-degree basis values plus knot differences.
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; k + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let mut s1 = 0;
            let mut s2 = 1;
            a[0][0] = 1.0;
            for kk in 1..=k {
                let mut d = 0.0;
                let rk = r as isize - kk as isize;
                let pk = (p - kk) as isize;
                if r >= kk {
                    a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk as usize];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk {
                    kk - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    a[s2][j] = (a[s1][j] - a[s1][j - 1])
                        / ndu[(pk + 1) as usize][(rk + j as isize) as usize];
                    d += a[s2][j] * ndu[(rk + j as isize) as usize][pk as usize];
                }
                if r as isize <= pk {
                    a[s2][kk] = -a[s1][kk - 1] / ndu[(pk + 1) as usize][r];
                    d += a[s2][kk] * ndu[r][pk as usize];
                }
                ders[kk][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        // Multiply by p! / (p-k)! factors.
        let mut factor = p as f64;
        for kk in 1..=k {
            for j in 0..=p {
                ders[kk][j] *= factor;
            }
            factor *= (p - kk) as f64;
        }
        Ok((span - p, ders))
    }

    /// Insert the midpoint of every nonempty span once: the mesh size halves,
    /// the degree stays, and the coarse space is contained in the fine one.
    pub fn refine_uniform(&self) -> KnotVector {
        let mut knots = self.knots.clone();
        for span in self.spans() {
            knots.push(0.5 * (span.lo + span.hi));
        }
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        KnotVector::new(self.degree, knots).expect("midpoint refinement preserves validity")
    }
}

/// Tensor product of up to three univariate spaces.
///
/// Flat indices are lexicographic with the first direction fastest:
/// `flat = j_1 + n_1 (j_2 + n_2 j_3)`.
#[derive(Clone, Debug)]
pub struct TensorSpace {
    kvs: Vec<KnotVector>,
}

/// The locally supported tensor-product basis at one parametric point.
#[derive(Clone, Debug)]
pub struct TensorBasis {
    /// First nonzero univariate index per direction.
    pub first: [usize; 3],
    /// Number of active functions per direction (`p_k + 1`; 1 for unused dims).
    pub counts: [usize; 3],
    pub dim: usize,
    /// Active basis values, local-lexicographic (first direction fastest).
    pub values: Vec<f64>,
    /// Parametric gradients of the active functions; empty when not requested.
    pub grads: Vec<Vec3>,
}

impl TensorBasis {
    /// Number of active basis functions `(p_1+1)···(p_d+1)`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat global index of local function `local`.
    pub fn global_index(&self, space: &TensorSpace, local: usize) -> usize {
        let mut rem = local;
        let mut multi = [0usize; 3];
        for k in 0..self.dim {
            multi[k] = self.first[k] + rem % self.counts[k];
            rem /= self.counts[k];
        }
        space.flat_index(&multi[..self.dim])
    }
}

impl TensorSpace {
    pub fn new(kvs: Vec<KnotVector>) -> Result<Self> {
        if kvs.is_empty() || kvs.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "tensor space dimension must be 1..=3, got {}",
                kvs.len()
            )));
        }
        Ok(Self { kvs })
    }

    pub fn dim(&self) -> usize {
        self.kvs.len()
    }

    pub fn knot_vector(&self, dir: usize) -> &KnotVector {
        &self.kvs[dir]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.kvs.iter().map(KnotVector::degree).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.kvs.iter().map(KnotVector::degree).max().unwrap()
    }

    pub fn num_basis_dir(&self, dir: usize) -> usize {
        self.kvs[dir].num_basis()
    }

    /// Total basis count `n = n_1 ··· n_d`.
    pub fn num_basis(&self) -> usize {
        self.kvs.iter().map(KnotVector::num_basis).product()
    }

    /// Flat index of a multi-index, first direction fastest.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dim());
        let mut flat = 0;
        for k in (0..self.dim()).rev() {
            debug_assert!(multi[k] < self.num_basis_dir(k));
            flat = flat * self.num_basis_dir(k) + multi[k];
        }
        flat
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        let mut multi = vec![0usize; self.dim()];
        for k in 0..self.dim() {
            multi[k] = rem % self.num_basis_dir(k);
            rem /= self.num_basis_dir(k);
        }
        debug_assert_eq!(rem, 0);
        multi
    }

    /// Greville abscissa of the basis function with the given multi-index.
    pub fn greville(&self, multi: &[usize]) -> Vec3 {
        let mut g = [0.0; 3];
        for k in 0..self.dim() {
            g[k] = self.kvs[k].greville(multi[k]);
        }
        g
    }

    /// All elements (nonempty span boxes) as per-direction span lists.
    pub fn element_spans(&self) -> Vec<Vec<Span>> {
        self.kvs.iter().map(KnotVector::spans).collect()
    }

    /// Evaluate the active basis at `point`; `order` 0 for values only,
    /// 1 to include parametric gradients.
    pub fn eval(&self, point: Vec3, order: usize) -> Result<TensorBasis> {
        if order > 1 {
            return Err(Error::InvalidArgument(
                "tensor evaluation supports order 0 or 1".into(),
            ));
        }
        let d = self.dim();
        let mut first = [0usize; 3];
        let mut counts = [1usize; 3];
        let mut uni: Vec<Vec<Vec<f64>>> = Vec::with_capacity(d);
        for k in 0..d {
            let (f, table) =
                self.kvs[k].eval_basis_derivs(point[k], order.min(self.kvs[k].degree()))?;
            first[k] = f;
            counts[k] = self.kvs[k].degree() + 1;
            uni.push(table);
        }
        let total: usize = counts[..d].iter().product();
        let mut values = vec![0.0; total];
        let mut grads = if order >= 1 {
            vec![[0.0; 3]; total]
        } else {
            Vec::new()
        };
        for local in 0..total {
            let mut rem = local;
            let mut idx = [0usize; 3];
            for k in 0..d {
                idx[k] = rem % counts[k];
                rem /= counts[k];
            }
            let mut v = 1.0;
            for k in 0..d {
                v *= uni[k][0][idx[k]];
            }
            values[local] = v;
            if order >= 1 {
                for g in 0..d {
                    let mut dv = 1.0;
                    for k in 0..d {
                        let row = if k == g { 1 } else { 0 };
                        // Degree-0 directions have no first derivative row.
                        if row >= uni[k].len() {
                            dv = 0.0;
                            break;
                        }
                        dv *= uni[k][row][idx[k]];
                    }
                    grads[local][g] = dv;
                }
            }
        }
        Ok(TensorBasis {
            first,
            counts,
            dim: d,
            values,
            grads,
        })
    }

    /// Uniform dyadic refinement of every direction.
    pub fn refine_uniform(&self) -> TensorSpace {
        TensorSpace {
            kvs: self.kvs.iter().map(KnotVector::refine_uniform).collect(),
        }
    }

    /// Largest parametric span width over all directions.
    pub fn max_span(&self) -> f64 {
        self.kvs
            .iter()
            .map(KnotVector::max_span)
            .fold(0.0, f64::max)
    }
}
