use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::kernels::{gram, KernelSpec};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Sample counts up to this size get a fully precomputed Gram matrix.
pub const DENSE_LIMIT: usize = 2048;

/// Budget for the row cache used above [`DENSE_LIMIT`].
const CACHE_BYTES: usize = 256 << 20;

/// Source of kernel rows `K(x_i, .)` for the solver.
pub(crate) enum KernelRows<'a, T: Scalar> {
    Dense(Vec<Rc<[T]>>),
    Cached(RowCache<'a, T>),
}

impl<'a, T: Scalar> KernelRows<'a, T> {
    pub fn new(kernel: &KernelSpec<T>, rows: &'a Matrix<T>) -> Self {
        if rows.n_rows() <= DENSE_LIMIT {
            let g = gram(kernel, rows);
            Self::Dense(g.rows().map(Rc::from).collect())
        } else {
            let per_row = rows.n_rows() * std::mem::size_of::<T>();
            let capacity = (CACHE_BYTES / per_row).max(2);
            Self::Cached(RowCache::new(*kernel, rows, capacity))
        }
    }

    pub fn row(&mut self, i: usize) -> Rc<[T]> {
        match self {
            Self::Dense(rows) => rows[i].clone(),
            Self::Cached(cache) => cache.row(i),
        }
    }

    pub fn diagonal(&mut self) -> Vec<T> {
        match self {
            Self::Dense(rows) => rows.iter().enumerate().map(|(i, r)| r[i]).collect(),
            Self::Cached(cache) => (0..cache.rows.n_rows())
                .map(|i| {
                    cache
                        .kernel
                        .eval_unchecked(cache.rows.row(i), cache.rows.row(i))
                })
                .collect(),
        }
    }
}

/// Least-recently-used cache of kernel rows.
pub(crate) struct RowCache<'a, T: Scalar> {
    kernel: KernelSpec<T>,
    rows: &'a Matrix<T>,
    capacity: usize,
    entries: HashMap<usize, Rc<[T]>>,
    order: VecDeque<usize>,
}

impl<'a, T: Scalar> RowCache<'a, T> {
    fn new(kernel: KernelSpec<T>, rows: &'a Matrix<T>, capacity: usize) -> Self {
        Self {
            kernel,
            rows,
            capacity,
            entries: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    fn row(&mut self, i: usize) -> Rc<[T]> {
        if let Some(r) = self.entries.get(&i) {
            let r = r.clone();
            if let Some(pos) = self.order.iter().position(|&k| k == i) {
                self.order.remove(pos);
            }
            self.order.push_back(i);
            return r;
        }
        if self.entries.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.entries.remove(&old);
            }
        }
        let xi = self.rows.row(i);
        let r: Rc<[T]> = self
            .rows
            .rows()
            .map(|xj| self.kernel.eval_unchecked(xi, xj))
            .collect();
        self.entries.insert(i, r.clone());
        self.order.push_back(i);
        r
    }
}
