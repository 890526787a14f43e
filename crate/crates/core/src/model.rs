//! Domain types: the polynomial Prony model, arithmetic-progression sampling
//! schemes, measurement sets, piecewise-smooth signals and error bounds.

use nalgebra::Complex;

use crate::error::{PronyError, Result};
use crate::scalar::{arg, cis, modulus, wrap_angle, Real};

/// Largest index (`t + (count-1)·p`) accepted by the forward map.
pub const MAX_SAMPLE_INDEX: usize = 10_000_000;
/// Largest multiplicity accepted by the forward map.
pub const MAX_MULTIPLICITY: usize = 12;

/// Node multiplicities `ℓ_1, …, ℓ_K` of a polynomial Prony model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    multiplicities: Vec<usize>,
}

impl Structure {
    pub fn new(multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.is_empty() {
            return Err(PronyError::InvalidModel("structure needs at least one node".into()));
        }
        if multiplicities.contains(&0) {
            return Err(PronyError::InvalidModel("multiplicities must be positive".into()));
        }
        Ok(Structure { multiplicities })
    }

    /// `K` nodes, all of multiplicity one.
    pub fn simple(k: usize) -> Result<Self> {
        Self::new(vec![1; k])
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of nodes `K`.
    pub fn node_count(&self) -> usize {
        self.multiplicities.len()
    }

    /// `L = Σ ℓ_j`, the degree of the annihilating polynomial.
    pub fn degree(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `R = Σ (ℓ_j + 1)`, the number of unknowns.
    pub fn unknowns(&self) -> usize {
        self.degree() + self.node_count()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicities.iter().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&l| l == 1)
    }
}

/// Unit-modulus nodes `z_j` with polynomial amplitudes
/// `Σ_ℓ c_{ℓ,j} k^ℓ`, i.e. the measurement model
/// `m_k = Σ_j z_j^k Σ_ℓ c_{ℓ,j} k^ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronyModel<T: Real = f64> {
    nodes: Vec<Complex<T>>,
    coefficients: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PronyModel<T> {
    /// Builds a model; `coefficients[j]` holds `c_{0,j}, …, c_{ℓ_j-1,j}`.
    pub fn new(nodes: Vec<Complex<T>>, coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(PronyError::InvalidModel("model needs at least one node".into()));
        }
        if nodes.len() != coefficients.len() {
            return Err(PronyError::InvalidModel(format!(
                "{} nodes but {} coefficient lists",
                nodes.len(),
                coefficients.len()
            )));
        }
        let tol = T::tol(1e-12);
        for (j, z) in nodes.iter().enumerate() {
            let r = modulus(*z);
            if !r.is_finite() || (r - T::one()).abs() > tol {
                return Err(PronyError::InvalidModel(format!("node {j} has modulus {}, expected 1", r)));
            }
        }
        for (j, c) in coefficients.iter().enumerate() {
            if c.is_empty() {
                return Err(PronyError::InvalidModel(format!("node {j} has multiplicity 0")));
            }
            if c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(PronyError::InvalidModel(format!("node {j} has non-finite coefficient")));
            }
        }
        Ok(PronyModel { nodes, coefficients })
    }

    /// Builds a model from node arguments, `z_j = e^{i·θ_j}`.
    pub fn from_args(args: &[T], coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        Self::new(args.iter().map(|&a| cis(a)).collect(), coefficients)
    }

    /// Projects each node onto the unit circle before building the model.
    pub fn projected(nodes: &[Complex<T>], coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let nodes = nodes.iter().map(|&z| cis(arg(z))).collect();
        Self::new(nodes, coefficients)
    }

    pub fn nodes(&self) -> &[Complex<T>] {
        &self.nodes
    }

    /// Node arguments in `(-π, π]`.
    pub fn node_args(&self) -> Vec<T> {
        self.nodes.iter().map(|&z| arg(z)).collect()
    }

    pub fn coefficients(&self) -> &[Vec<Complex<T>>] {
        &self.coefficients
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.coefficients.iter().map(Vec::len).collect()
    }

    pub fn structure(&self) -> Structure {
        Structure { multiplicities: self.multiplicities() }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `R = L + K`.
    pub fn unknowns(&self) -> usize {
        self.degree() + self.node_count()
    }

    /// `L = Σ ℓ_j`.
    pub fn degree(&self) -> usize {
        self.coefficients.iter().map(Vec::len).sum()
    }

    /// `c_{ℓ_j-1,j}`.
    pub fn leading_coefficient(&self, j: usize) -> Complex<T> {
        *self.coefficients[j].last().expect("non-empty coefficient list")
    }

    /// Same model with nodes sorted by ascending argument in `(-π, π]`.
    pub fn canonicalized(&self) -> Self {
        let args = self.node_args();
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| args[a].partial_cmp(&args[b]).unwrap_or(std::cmp::Ordering::Equal));
        PronyModel {
            nodes: order.iter().map(|&j| self.nodes[j]).collect(),
            coefficients: order.iter().map(|&j| self.coefficients[j].clone()).collect(),
        }
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: Complex<T>) -> Self {
        PronyModel {
            nodes: self.nodes.clone(),
            coefficients: self.coefficients.iter().map(|c| c.iter().map(|&v| v * factor).collect()).collect(),
        }
    }

    pub fn with_coefficients(&self, coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if coefficients.iter().map(Vec::len).ne(self.coefficients.iter().map(Vec::len)) {
            return Err(PronyError::StructureMismatch("coefficient shape differs".into()));
        }
        Self::new(self.nodes.clone(), coefficients)
    }
}

/// Arithmetic progression `I_{t,p} = {t, t+p, …, t+(count-1)p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SamplingScheme {
    offset: usize,
    stride: usize,
    count: usize,
}

impl SamplingScheme {
    pub fn new(offset: usize, stride: usize, count: usize) -> Result<Self> {
        if stride == 0 {
            return Err(PronyError::InvalidScheme("stride must be positive".into()));
        }
        if count == 0 {
            return Err(PronyError::InvalidScheme("count must be positive".into()));
        }
        offset
            .checked_add(stride.checked_mul(count - 1).unwrap_or(usize::MAX))
            .ok_or_else(|| PronyError::InvalidScheme("index overflow".into()))?;
        Ok(SamplingScheme { offset, stride, count })
    }

    /// `{0, 1, …, count-1}`.
    pub fn contiguous(count: usize) -> Result<Self> {
        Self::new(0, 1, count)
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn index(&self, s: usize) -> usize {
        self.offset + s * self.stride
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.count).map(move |s| self.index(s))
    }

    pub fn max_index(&self) -> usize {
        self.index(self.count - 1)
    }

    /// Position of index `k` in the progression, if present.
    pub fn position(&self, k: usize) -> Option<usize> {
        if k < self.offset || (k - self.offset) % self.stride != 0 {
            return None;
        }
        let s = (k - self.offset) / self.stride;
        (s < self.count).then_some(s)
    }
}

/// Complex measurements bound to a sampling scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T: Real = f64> {
    scheme: SamplingScheme,
    values: Vec<Complex<T>>,
    noise_level: T,
}

impl<T: Real> SampleSet<T> {
    pub fn new(scheme: SamplingScheme, values: Vec<Complex<T>>, noise_level: T) -> Result<Self> {
        if values.len() != scheme.count() {
            return Err(PronyError::InvalidArgument(format!(
                "{} values for a scheme of {} indices",
                values.len(),
                scheme.count()
            )));
        }
        if noise_level < T::zero() || !noise_level.is_finite() {
            return Err(PronyError::InvalidArgument("noise level must be finite and ≥ 0".into()));
        }
        Ok(SampleSet { scheme, values, noise_level })
    }

    pub fn exact(scheme: SamplingScheme, values: Vec<Complex<T>>) -> Result<Self> {
        Self::new(scheme, values, T::zero())
    }

    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn noise_level(&self) -> T {
        self.noise_level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest available index (the bandwidth `M` of the data).
    pub fn top_index(&self) -> usize {
        self.scheme.max_index()
    }

    /// The same values re-indexed along the progression, `q_s = m_{t+sp}`.
    pub fn reindexed(&self) -> Self {
        SampleSet {
            scheme: SamplingScheme::contiguous(self.values.len()).expect("non-empty"),
            values: self.values.clone(),
            noise_level: self.noise_level,
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        SampleSet {
            scheme: self.scheme,
            values: self.values.iter().map(|&v| v * factor).collect(),
            noise_level: self.noise_level * modulus(factor),
        }
    }

    /// Picks the indices of `scheme` out of this set; every requested index
    /// must be present.
    pub fn subsample(&self, scheme: SamplingScheme) -> Result<Self> {
        let values = scheme
            .indices()
            .map(|k| {
                self.scheme
                    .position(k)
                    .map(|s| self.values[s])
                    .ok_or_else(|| PronyError::InvalidScheme(format!("index {k} is not in the sample set")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scheme, values, self.noise_level)
    }

    pub(crate) fn with_values(&self, values: Vec<Complex<T>>, noise_level: T) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        SampleSet { scheme: self.scheme, values, noise_level }
    }
}

/// Finite trigonometric series `Σ_{|n|≤degree} ĉ_n e^{inx}` of a real
/// function; only `ĉ_0, …, ĉ_degree` are stored, negative frequencies follow
/// by conjugate symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries<T: Real = f64> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> TrigSeries<T> {
    pub fn new(mut coefficients: Vec<Complex<T>>) -> Self {
        if let Some(c0) = coefficients.first_mut() {
            c0.im = T::zero();
        }
        TrigSeries { coefficients }
    }

    pub fn zero() -> Self {
        TrigSeries { coefficients: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Nonnegative-frequency coefficients `ĉ_0, …, ĉ_degree`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// `ĉ_n` for any integer `n`.
    pub fn coefficient(&self, n: i64) -> Complex<T> {
        let idx = n.unsigned_abs() as usize;
        match self.coefficients.get(idx) {
            Some(&c) if n >= 0 => c,
            Some(&c) => c.conj(),
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    /// Pointwise value (real by construction).
    pub fn eval(&self, x: T) -> T {
        let mut acc = T::zero();
        if let Some(c0) = self.coefficients.first() {
            acc = c0.re;
        }
        let step = cis(x);
        let mut rot = step;
        for (n, c) in self.coefficients.iter().enumerate().skip(1) {
            if n % 64 == 0 {
                rot = cis(x * T::from_count(n));
            }
            acc += T::lit(2.0) * (c * rot).re;
            rot *= step;
        }
        acc
    }
}

/// A piecewise-smooth function in `PC(d, K)`: jumps `x_1 < … < x_K` in
/// `[-π, π)` with jump magnitudes `a_{ℓ,j}` of the derivatives of order
/// `ℓ ≤ d`, plus a smooth periodic remainder `Ψ`.
///
/// The singular part is the mean-zero piecewise polynomial
/// `Φ(x) = Σ_j Σ_ℓ a_{ℓ,j} V_ℓ(x - x_j)` built from periodized Bernoulli
/// polynomials (see [`crate::fourier`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSignal<T: Real = f64> {
    smoothness: usize,
    jumps: Vec<T>,
    magnitudes: Vec<Vec<T>>,
    psi: TrigSeries<T>,
    psi_decay_bound: T,
}

impl<T: Real> PiecewiseSignal<T> {
    /// `magnitudes[j][ℓ] = a_{ℓ,j}` for `ℓ = 0..=d`.
    ///
    /// `psi_decay_bound` is the constant `R_Ψ` with
    /// `|ĉ_k(Ψ)| ≤ R_Ψ·k^{-d-2}`; it is checked against the stored series.
    pub fn new(
        smoothness: usize,
        jumps: Vec<T>,
        magnitudes: Vec<Vec<T>>,
        psi: TrigSeries<T>,
        psi_decay_bound: T,
    ) -> Result<Self> {
        if jumps.is_empty() {
            return Err(PronyError::InvalidModel("a piecewise signal needs at least one jump".into()));
        }
        if magnitudes.len() != jumps.len() {
            return Err(PronyError::InvalidModel("one magnitude row per jump expected".into()));
        }
        if magnitudes.iter().any(|row| row.len() != smoothness + 1) {
            return Err(PronyError::InvalidModel(format!(
                "each magnitude row must hold d+1 = {} values",
                smoothness + 1
            )));
        }
        if magnitudes.iter().flatten().any(|a| !a.is_finite()) {
            return Err(PronyError::InvalidModel("non-finite jump magnitude".into()));
        }
        let pi = T::pi();
        if jumps.iter().any(|&x| !(x >= -pi && x < pi)) {
            return Err(PronyError::InvalidModel("jump positions must lie in [-π, π)".into()));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PronyError::InvalidModel("jump positions must be strictly increasing".into()));
        }
        if !(psi_decay_bound >= T::zero()) {
            return Err(PronyError::InvalidModel("Ψ decay bound must be ≥ 0".into()));
        }
        let slack = T::one() + T::tol(1e-12);
        for (n, c) in psi.coefficients().iter().enumerate().skip(1) {
            let bound = psi_decay_bound * int_pow_inv(T::from_count(n), smoothness + 2);
            if modulus(*c) > bound * slack {
                return Err(PronyError::InvalidModel(format!(
                    "Ψ coefficient {n} violates the decay bound R_Ψ·k^(-d-2)"
                )));
            }
        }
        Ok(PiecewiseSignal { smoothness, jumps, magnitudes, psi, psi_decay_bound })
    }

    /// Smoothness order `d`.
    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn jumps(&self) -> &[T] {
        &self.jumps
    }

    pub fn magnitudes(&self) -> &[Vec<T>] {
        &self.magnitudes
    }

    pub fn psi(&self) -> &TrigSeries<T> {
        &self.psi
    }

    /// `R_Ψ`.
    pub fn psi_decay_bound(&self) -> T {
        self.psi_decay_bound
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// `J`: the minimal circle distance between distinct jumps (`2π` for a
    /// single jump).
    pub fn min_separation(&self) -> T {
        let mut best = T::two_pi();
        for i in 0..self.jumps.len() {
            for j in (i + 1)..self.jumps.len() {
                best = best.min(crate::matching::circle_distance(self.jumps[i], self.jumps[j]));
            }
        }
        best
    }

    /// `B = min_j |a_{0,j}|`.
    pub fn min_leading_jump(&self) -> T {
        self.magnitudes.iter().map(|row| row[0].abs()).fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b))
    }

    /// `A = max |a_{ℓ,j}|`.
    pub fn max_jump(&self) -> T {
        self.magnitudes.iter().flatten().fold(T::zero(), |a, &b| a.max(b.abs()))
    }

    /// The same signal rotated by `τ`: `f(x - τ)`.
    pub fn shifted(&self, tau: T) -> Result<Self> {
        let mut pairs: Vec<(T, Vec<T>)> =
            self.jumps.iter().zip(&self.magnitudes).map(|(&x, a)| (wrap_jump(x + tau), a.clone())).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let psi = TrigSeries::new(
            self.psi.coefficients().iter().enumerate().map(|(n, &c)| c * cis(-tau * T::from_count(n))).collect(),
        );
        let (jumps, magnitudes) = pairs.into_iter().unzip();
        Self::new(self.smoothness, jumps, magnitudes, psi, self.psi_decay_bound)
    }
}

fn int_pow_inv<T: Real>(k: T, e: usize) -> T {
    T::one() / crate::scalar::int_pow(k, e)
}

/// Node for a jump at `x`: `z = e^{-ix}`.
pub fn node_from_jump<T: Real>(x: T) -> Complex<T> {
    cis(-x)
}

/// Jump position in `[-π, π)` for a node `z = e^{-ix}`.
pub fn jump_from_node<T: Real>(z: Complex<T>) -> T {
    wrap_jump(-arg(z))
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_jump<T: Real>(x: T) -> T {
    let w = wrap_angle(x);
    if w >= T::pi() {
        w - T::two_pi()
    } else {
        w
    }
}

/// First-order error bounds for a decimated solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBounds<T: Real = f64> {
    /// Bound on `|Δz_j|` per node.
    pub node_bounds: Vec<T>,
    /// Bound on `|Δc_{i,j}|`, indexed `[j][i]`.
    pub coefficient_bounds: Vec<Vec<T>>,
    /// `δ_p = min_{i≠j} |z_j^p - z_i^p|`.
    pub separation: T,
}
