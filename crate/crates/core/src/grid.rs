//! Rectangular sampling grids with validity masks and finite-difference
//! stencils.
//!
//! Node `(i, j)` sits at `(x0 + i·hx, y0 + j·hy)`; storage is row-major in `j`.
//! Stencils are second-order: central where both neighbours are valid,
//! one-sided (three or four points) next to masked nodes or the grid edge.

use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Values that finite differences can be taken of.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Axis-aligned parameter rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Geometry of a rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x0: f64, y0: f64, hx: f64, hy: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::ContractViolation(format!(
                "grid steps must be strictly positive (hx={hx}, hy={hy})"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::ContractViolation("grid must have at least one node".into()));
        }
        Ok(Self { x0, y0, hx, hy, nx, ny })
    }

    /// `nx × ny` nodes spanning `rect` including its edges.
    pub fn over(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::ContractViolation(format!(
                "a grid over a rectangle needs at least 2×2 nodes (got {nx}×{ny})"
            )));
        }
        let hx = (rect.x1 - rect.x0) / (nx - 1) as f64;
        let hy = (rect.y1 - rect.y0) / (ny - 1) as f64;
        Self::new(rect.x0, rect.y0, hx, hy, nx, ny)
    }

    /// Square window of `n × n` nodes with step `h` centred on `center`.
    pub fn window(center: (f64, f64), h: f64, n: usize) -> Result<Self> {
        let half = h * (n - 1) as f64 / 2.0;
        Self::new(center.0 - half, center.1 - half, h, h, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x(i), self.y(j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn step(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.hx,
            Axis::Y => self.hy,
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(self.x0, self.x(self.nx - 1), self.y0, self.y(self.ny - 1))
    }

    /// The node at `(x, y)`, if it coincides with one up to `1e-9` of a step.
    pub fn node_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = (x - self.x0) / self.hx;
        let fj = (y - self.y0) / self.hy;
        let (ri, rj) = (fi.round(), fj.round());
        if (fi - ri).abs() > 1e-9 || (fj - rj).abs() > 1e-9 {
            return None;
        }
        if ri < 0.0 || rj < 0.0 || ri as usize >= self.nx || rj as usize >= self.ny {
            return None;
        }
        Some((ri as usize, rj as usize))
    }

    /// The node closest to `(x, y)`, clamped into the grid.
    pub fn nearest_node(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |f: f64, n: usize| f.round().clamp(0.0, (n - 1) as f64) as usize;
        (
            clamp((x - self.x0) / self.hx, self.nx),
            clamp((y - self.y0) / self.hy, self.ny),
        )
    }
}

/// A sampled field: values plus a validity mask (`true` = valid node).
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub spec: GridSpec,
    pub values: Vec<T>,
    pub mask: Vec<bool>,
}

impl<T: Copy + Default + Send + Sync> Grid<T> {
    /// Evaluates `f` at every node in parallel; `None` masks the node.
    pub fn tabulate<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(usize, usize) -> Option<T> + Sync,
    {
        let samples: Vec<Option<T>> = (0..spec.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = spec.coords(idx);
                f(i, j)
            })
            .collect();
        let mask = samples.iter().map(Option::is_some).collect();
        let values = samples.into_iter().map(Option::unwrap_or_default).collect();
        Self { spec, values, mask }
    }

    pub fn map<U, F>(&self, f: F) -> Grid<U>
    where
        U: Copy + Default + Send + Sync,
        F: Fn(T) -> Option<U> + Sync,
    {
        Grid::tabulate(self.spec, |i, j| self.get(i, j).and_then(&f))
    }
}

impl<T: Copy> Grid<T> {
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let idx = self.spec.index(i, j);
        self.mask[idx].then(|| self.values[idx])
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[self.spec.index(i, j)]
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Valid nodes as `(i, j, value)`.
    pub fn iter_valid(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.spec.len()).filter(|&idx| self.mask[idx]).map(move |idx| {
            let (i, j) = self.spec.coords(idx);
            (i, j, self.values[idx])
        })
    }

    /// Whether every node within Chebyshev distance `r` of `(i, j)` exists and
    /// is valid.
    pub fn has_valid_window(&self, i: usize, j: usize, r: usize) -> bool {
        if i < r || j < r || i + r >= self.spec.nx || j + r >= self.spec.ny {
            return false;
        }
        (j - r..=j + r).all(|jj| (i - r..=i + r).all(|ii| self.is_valid(ii, jj)))
    }

    /// Whether `(i, j)` is off the outer edge of the grid.
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.spec.nx && j + 1 < self.spec.ny
    }

    fn offset(&self, i: usize, j: usize, axis: Axis, k: isize) -> Option<T> {
        let (ii, jj) = match axis {
            Axis::X => (i as isize + k, j as isize),
            Axis::Y => (i as isize, j as isize + k),
        };
        if ii < 0 || jj < 0 || ii as usize >= self.spec.nx || jj as usize >= self.spec.ny {
            return None;
        }
        self.get(ii as usize, jj as usize)
    }
}

impl<T: Linear> Grid<T> {
    /// First derivative at `(i, j)` along `axis`, second order.
    pub fn d1(&self, i: usize, j: usize, axis: Axis) -> Option<T> {
        let h = self.spec.step(axis);
        let f0 = self.get(i, j)?;
        let at = |k| self.offset(i, j, axis, k);
        if let (Some(fm), Some(fp)) = (at(-1), at(1)) {
            return Some((fp - fm) * (0.5 / h));
        }
        if let (Some(f1), Some(f2)) = (at(1), at(2)) {
            return Some((f1 * 4.0 - f0 * 3.0 - f2) * (0.5 / h));
        }
        if let (Some(f1), Some(f2)) = (at(-1), at(-2)) {
            return Some((f0 * 3.0 - f1 * 4.0 + f2) * (0.5 / h));
        }
        None
    }

    /// Second derivative at `(i, j)` along `axis`, second order.
    pub fn d2(&self, i: usize, j: usize, axis: Axis) -> Option<T> {
        let h = self.spec.step(axis);
        let f0 = self.get(i, j)?;
        let at = |k| self.offset(i, j, axis, k);
        let inv = 1.0 / (h * h);
        if let (Some(fm), Some(fp)) = (at(-1), at(1)) {
            return Some((fp + fm - f0 * 2.0) * inv);
        }
        for s in [1isize, -1] {
            if let (Some(f1), Some(f2), Some(f3)) = (at(s), at(2 * s), at(3 * s)) {
                return Some((f0 * 2.0 - f1 * 5.0 + f2 * 4.0 - f3) * inv);
            }
        }
        None
    }
}

impl<T: Linear + Default + Send + Sync> Grid<T> {
    pub fn derivative(&self, axis: Axis) -> Grid<T> {
        Grid::tabulate(self.spec, |i, j| self.d1(i, j, axis))
    }

    pub fn second_derivative(&self, axis: Axis) -> Grid<T> {
        Grid::tabulate(self.spec, |i, j| self.d2(i, j, axis))
    }
}
