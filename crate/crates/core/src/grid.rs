//! Energy discretization and the (E,E') <-> (lambda,nu) coordinate charts.
//!
//! The energy axis `[0, e_max]` carries a midpoint grid, so the degenerate
//! slice at `lambda = 0` (whose nu-interval collapses) never appears. Each
//! node `lambda_j` carries a uniform periodic nu-grid over
//! `[-2*lambda_j, 2*lambda_j)` with `m_nu` samples; the change of variables
//! has unit Jacobian, so the slice area weight is
//! `dlambda * (4*lambda_j / m_nu)` per sample.
//!
//! Sample coordinates are computed as exact rational multiples,
//! `nu_k = 2*lambda_j * (2k - m)/m`, which makes the reflection
//! `nu_{m-k} = -nu_k` and the midpoint `nu_{m/2} = 0` bit-exact.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// Midpoint discretization of the energy half-line truncated at `e_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    e_max: f64,
    n_lambda: usize,
    step: f64,
    nodes: Vec<f64>,
}

impl EnergyGrid {
    pub fn new(e_max: f64, n_lambda: usize) -> Result<Self> {
        if !e_max.is_finite() || e_max <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "e_max must be positive and finite, got {e_max}"
            )));
        }
        if n_lambda < 1 {
            return Err(Error::InvalidGrid("n_lambda must be at least 1".into()));
        }
        let step = e_max / n_lambda as f64;
        let nodes = (0..n_lambda).map(|j| (j as f64 + 0.5) * step).collect();
        Ok(Self {
            e_max,
            n_lambda,
            step,
            nodes,
        })
    }

    #[inline]
    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_lambda
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_lambda == 0
    }

    /// Node spacing; also the quadrature weight of every node.
    #[inline]
    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node nearest to `lambda`.
    pub fn nearest_node(&self, lambda: f64) -> usize {
        let raw = (lambda / self.step - 0.5).round();
        (raw.max(0.0) as usize).min(self.n_lambda - 1)
    }

    /// Midpoint quadrature of a function over `[0, e_max]`.
    pub fn quadrature(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&x| self.step * f(x)).sum()
    }
}

/// The (lambda, nu) chart: lambda-slices with per-slice periodic nu-grids.
#[derive(Debug, Clone)]
pub struct LambdaNuChart {
    grid: EnergyGrid,
    m_nu: usize,
    /// 2*m_nu-th roots table: `roots[a] = exp(i*pi*a/m_nu)`, shared by all
    /// slices (the mode phases `s_{j,n} * nu_k = pi*n*(2k-m)/m` do not
    /// depend on lambda).
    roots: Vec<C64>,
    pi_over_step: f64,
}

impl PartialEq for LambdaNuChart {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.m_nu == other.m_nu
    }
}

impl LambdaNuChart {
    pub fn new(e_max: f64, n_lambda: usize, m_nu: usize) -> Result<Self> {
        let grid = EnergyGrid::new(e_max, n_lambda)?;
        if m_nu < 4 {
            return Err(Error::InvalidGrid(format!(
                "m_nu must be at least 4, got {m_nu}"
            )));
        }
        if !m_nu.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("m_nu must be even, got {m_nu}")));
        }
        let roots = (0..2 * m_nu)
            .map(|a| C64::from_polar(1.0, PI * a as f64 / m_nu as f64))
            .collect();
        let pi_over_step = PI / grid.step();
        Ok(Self {
            grid,
            m_nu,
            roots,
            pi_over_step,
        })
    }

    #[inline]
    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    #[inline]
    pub fn e_max(&self) -> f64 {
        self.grid.e_max()
    }

    #[inline]
    pub fn n_lambda(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn m_nu(&self) -> usize {
        self.m_nu
    }

    #[inline]
    pub fn lambda(&self, j: usize) -> f64 {
        self.grid.node(j)
    }

    /// nu sample `k` of slice `j`, exactly antisymmetric under `k -> m-k`.
    #[inline]
    pub fn nu(&self, j: usize, k: usize) -> f64 {
        let m = self.m_nu as f64;
        2.0 * self.lambda(j) * ((2 * k as i64 - self.m_nu as i64) as f64 / m)
    }

    /// nu spacing of slice `j`: `4*lambda_j / m_nu`.
    #[inline]
    pub fn nu_step(&self, j: usize) -> f64 {
        4.0 * self.lambda(j) / self.m_nu as f64
    }

    /// Area weight of one sample of slice `j`.
    #[inline]
    pub fn sample_weight(&self, j: usize) -> f64 {
        self.grid.step() * self.nu_step(j)
    }

    /// Parseval weight of slice `j`: `dlambda * 4*lambda_j`.
    #[inline]
    pub fn slice_weight(&self, j: usize) -> f64 {
        self.grid.step() * 4.0 * self.lambda(j)
    }

    /// Signed Fourier mode for storage index `i` in `0..m_nu`;
    /// modes run over `[-m_nu/2, m_nu/2)`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - (self.m_nu / 2) as i64
    }

    /// Storage index of a signed mode.
    #[inline]
    pub fn mode_index(&self, n: i64) -> usize {
        (n + (self.m_nu / 2) as i64) as usize
    }

    /// Age of mode `n` on slice `j`: `s = n*pi/(2*lambda_j)`.
    ///
    /// Computed as `(n/(2j+1)) * (pi/dlambda)` so that ages that are equal
    /// as rationals (degenerate across slices) are bit-identical floats.
    #[inline]
    pub fn age(&self, j: usize, n: i64) -> f64 {
        (n as f64 / (2 * j + 1) as f64) * self.pi_over_step
    }

    /// Age spacing of slice `j`: `pi/(2*lambda_j)`.
    #[inline]
    pub fn age_step(&self, j: usize) -> f64 {
        self.age(j, 1)
    }

    /// Mode phase `exp(-i * s_{j,n} * nu_k)`, exact in the rational angle
    /// `pi*n*(2k-m)/m` (lambda cancels).
    #[inline]
    pub fn mode_phase(&self, n: i64, k: usize) -> C64 {
        let m = self.m_nu as i64;
        let a = (n * (2 * k as i64 - m)).rem_euclid(2 * m) as usize;
        self.roots[a].conj()
    }

    /// `(E, E')` image of sample `(j, k)`.
    #[inline]
    pub fn energy_pair(&self, j: usize, k: usize) -> (f64, f64) {
        let l = self.lambda(j);
        let half_nu = 0.5 * self.nu(j, k);
        (l + half_nu, l - half_nu)
    }

    /// Whether an `(E, E')` pair lies inside the energy square.
    #[inline]
    pub fn in_energy_square(&self, e: f64, ep: f64) -> bool {
        let e_max = self.e_max();
        (0.0..=e_max).contains(&e) && (0.0..=e_max).contains(&ep)
    }
}

/// Builds the chart for an energy cutoff `e_max` with `n_lambda` slices of
/// `m_nu` nu-samples each. Deterministic for fixed inputs.
pub fn build_chart(e_max: f64, n_lambda: usize, m_nu: usize) -> Result<LambdaNuChart> {
    LambdaNuChart::new(e_max, n_lambda, m_nu)
}

/// Complex samples `K(lambda_j, nu_k)` on a chart, stored row-major by slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationKernel {
    chart: LambdaNuChart,
    values: Vec<C64>,
}

impl CorrelationKernel {
    /// All-zero kernel.
    pub fn zero(chart: &LambdaNuChart) -> Self {
        let len = chart.n_lambda() * chart.m_nu();
        Self {
            chart: chart.clone(),
            values: vec![C64::ZERO; len],
        }
    }

    /// Samples a function of the chart coordinates directly.
    pub fn from_chart_fn(chart: &LambdaNuChart, f: impl Fn(f64, f64) -> C64) -> Self {
        let mut k = Self::zero(chart);
        for j in 0..chart.n_lambda() {
            let l = chart.lambda(j);
            for ki in 0..chart.m_nu() {
                k[(j, ki)] = f(l, chart.nu(j, ki));
            }
        }
        k
    }

    /// Samples `K(lambda, nu) = f(lambda + nu/2, lambda - nu/2)`; samples
    /// whose `(E, E')` image leaves the energy square are set to zero.
    pub fn from_energy_fn(chart: &LambdaNuChart, f: impl Fn(f64, f64) -> C64) -> Self {
        let mut k = Self::zero(chart);
        for j in 0..chart.n_lambda() {
            for ki in 0..chart.m_nu() {
                let (e, ep) = chart.energy_pair(j, ki);
                if chart.in_energy_square(e, ep) {
                    k[(j, ki)] = f(e, ep);
                }
            }
        }
        k
    }

    /// Construct from raw samples; rejects shape mismatch and non-finite
    /// entries.
    pub fn from_samples(chart: &LambdaNuChart, values: Vec<C64>) -> Result<Self> {
        if values.len() != chart.n_lambda() * chart.m_nu() {
            return Err(Error::InvalidGrid(format!(
                "kernel has {} samples, chart wants {} x {}",
                values.len(),
                chart.n_lambda(),
                chart.m_nu()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite(format!("kernel sample {i}")));
        }
        Ok(Self {
            chart: chart.clone(),
            values,
        })
    }

    #[inline]
    pub fn chart(&self) -> &LambdaNuChart {
        &self.chart
    }

    #[inline]
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Hilbert-Schmidt norm squared under the chart quadrature.
    pub fn hs_norm_sq(&self) -> f64 {
        let mut total = 0.0;
        for j in 0..self.chart.n_lambda() {
            let w = self.chart.sample_weight(j);
            let mut row = 0.0;
            for k in 0..self.chart.m_nu() {
                row += self[(j, k)].norm_sqr();
            }
            total += w * row;
        }
        total
    }

    /// Max-abs defect of Hermiticity under nu-reflection,
    /// `K(lambda,-nu) = conj(K(lambda,nu))`, over sample pairs. The seam
    /// sample `nu = -2*lambda` is skipped (its reflection `+2*lambda` is not
    /// a sample point); the midpoint `nu = 0` is self-paired and must be
    /// real.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.chart.m_nu();
        let mut worst = 0.0f64;
        for j in 0..self.chart.n_lambda() {
            for k in 1..m {
                let mirrored = self[(j, m - k)];
                let d = (mirrored - self[(j, k)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Elementwise map.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            chart: self.chart.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination with coordinates, `K'(j,k) = f(lambda, nu, K)`.
    pub fn map_with_coords(&self, f: impl Fn(f64, f64, C64) -> C64) -> Self {
        let mut out = self.clone();
        for j in 0..self.chart.n_lambda() {
            let l = self.chart.lambda(j);
            for k in 0..self.chart.m_nu() {
                out[(j, k)] = f(l, self.chart.nu(j, k), self[(j, k)]);
            }
        }
        out
    }

    pub fn scaled(&self, c: C64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`; the charts must match.
    pub fn add_scaled(&self, c: C64, other: &Self) -> Result<Self> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Ok(Self {
            chart: self.chart.clone(),
            values,
        })
    }

    /// Bilinear interpolation at energy points `(E, E')`; each point must
    /// lie inside the energy square. Points outside every slice's nu-range
    /// read as zero.
    pub fn ee_samples(&self, points: &[(f64, f64)]) -> Result<Vec<C64>> {
        points
            .iter()
            .map(|&(e, ep)| self.ee_sample(e, ep))
            .collect()
    }

    fn ee_sample(&self, e: f64, ep: f64) -> Result<C64> {
        if !self.chart.in_energy_square(e, ep) {
            return Err(Error::OutsideEnergySquare(e, ep));
        }
        let lambda = 0.5 * (e + ep);
        let nu = e - ep;
        let grid = self.chart.grid();
        let n = grid.len();
        // Clamp lambda into the node range; the half-cells at either end use
        // constant extrapolation from the outermost slice.
        let (j0, j1, t) = if n == 1 || lambda <= grid.node(0) {
            (0, 0, 0.0)
        } else if lambda >= grid.node(n - 1) {
            (n - 1, n - 1, 0.0)
        } else {
            let j = ((lambda - grid.node(0)) / grid.step()).floor() as usize;
            let j = j.min(n - 2);
            (j, j + 1, (lambda - grid.node(j)) / grid.step())
        };
        let a = self.slice_sample(j0, nu);
        let b = self.slice_sample(j1, nu);
        Ok(a * (1.0 - t) + b * t)
    }

    /// Periodic linear interpolation along nu within slice `j`; zero when
    /// `|nu|` exceeds the slice's reach.
    fn slice_sample(&self, j: usize, nu: f64) -> C64 {
        let l = self.chart.lambda(j);
        if nu.abs() > 2.0 * l {
            return C64::ZERO;
        }
        let m = self.chart.m_nu();
        let u = (nu + 2.0 * l) / self.chart.nu_step(j);
        let k0 = (u.floor() as usize).min(m - 1);
        let t = (u - k0 as f64).clamp(0.0, 1.0);
        let k1 = (k0 + 1) % m;
        self[(j, k0)] * (1.0 - t) + self[(j, k1)] * t
    }
}

impl std::ops::Index<(usize, usize)> for CorrelationKernel {
    type Output = C64;
    #[inline]
    fn index(&self, (j, k): (usize, usize)) -> &C64 {
        &self.values[j * self.chart.m_nu() + k]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CorrelationKernel {
    #[inline]
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut C64 {
        &mut self.values[j * self.chart.m_nu() + k]
    }
}

/// Chart quadrature of `weight(lambda, nu) * K(lambda, nu)`:
/// `sum_j sum_k dlambda * (4*lambda_j/m_nu) * weight * K`. Exactly linear in
/// the kernel argument.
pub fn integrate_kernel(kernel: &CorrelationKernel, weight: impl Fn(f64, f64) -> C64) -> C64 {
    let chart = kernel.chart();
    let mut total = C64::ZERO;
    for j in 0..chart.n_lambda() {
        let w = chart.sample_weight(j);
        let l = chart.lambda(j);
        let mut row = C64::ZERO;
        for k in 0..chart.m_nu() {
            row += weight(l, chart.nu(j, k)) * kernel[(j, k)];
        }
        total += w * row;
    }
    total
}
