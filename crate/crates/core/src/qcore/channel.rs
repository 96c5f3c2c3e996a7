//! Quantum channels in Kraus, Choi and Stinespring form.
//!
//! Choi matrices use the unnormalized convention
//! `J = Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|)` (input factor first), so that
//! `Tr_out J = I_in`.

use crate::error::{Error, Result};
use crate::qcore::eig::eig_hermitian;
use crate::qcore::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::qcore::state::DensityMatrix;

/// Tolerance for trace preservation and Choi positivity.
pub const CHANNEL_TOL: f64 = 1e-9;

/// Choi eigenvalues above this become Kraus operators.
pub const KRAUS_RANK_TOL: f64 = 1e-10;

/// A CPTP map given by Kraus operators `K_k : dim_in → dim_out`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Validates `Σ_k K_k†K_k = I` within [`CHANNEL_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::NotCPTP("no Kraus operators".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let ch = Self { dim_in, dim_out, kraus };
        let dev = ch.tp_deviation();
        if dev > CHANNEL_TOL {
            return Err(Error::NotCPTP(format!("Σ K†K deviates from identity by {dev:.3e}")));
        }
        Ok(ch)
    }

    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let (dim_out, dim_in) = (kraus[0].rows(), kraus[0].cols());
        Self { dim_in, dim_out, kraus }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn tp_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum += &k.adjoint().matmul(k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// Action on an arbitrary operator: `Σ_k K X K†`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.rows(), self.dim_in, "channel input dimension");
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.conjugate(x);
        }
        out
    }

    /// Heisenberg-picture adjoint: `Σ_k K† Y K`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &k.adjoint().matmul(y).matmul(k);
        }
        out
    }

    /// `(id_R ⊗ N)(X)` on an operator over `R ⊗ in`.
    pub fn apply_on_second(&self, x: &ComplexMatrix, dim_r: usize) -> ComplexMatrix {
        let id = ComplexMatrix::identity(dim_r);
        let mut out = ComplexMatrix::zeros(dim_r * self.dim_out, dim_r * self.dim_out);
        for k in &self.kraus {
            out += &id.kron(k).conjugate(x);
        }
        out
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.dim_in * self.dim_out;
        let mut j = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = vectorize(k);
            j += &ComplexMatrix::outer(&v, &v);
        }
        ChoiMatrix { dim_in: self.dim_in, dim_out: self.dim_out, mat: j.hermitian_part() }
    }

    /// `N ⊗ M`.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kron(b)))
            .collect();
        Self::from_kraus_unchecked(kraus)
    }

    pub fn tensor_power(&self, n: usize) -> Self {
        (1..n).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if other.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch("composed channels do not chain".into()));
        }
        let kraus = other
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b.matmul(a)))
            .collect();
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, w: f64, other: &Self) -> Result<Self> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch("mixing channels of different shape".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w}")));
        }
        let mut kraus: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.scale(w.sqrt())).collect();
        kraus.extend(other.kraus.iter().map(|k| k.scale((1.0 - w).sqrt())));
        Ok(Self::from_kraus_unchecked(kraus))
    }

    /// Complementary channel onto the Kraus-index environment.
    pub fn complementary(&self) -> Self {
        let env = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|o| ComplexMatrix::from_fn(env, self.dim_in, |k, i| self.kraus[k][(o, i)]))
            .collect();
        Self::from_kraus_unchecked(kraus)
    }
}

/// `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`, index `i * dim_out + o`.
fn vectorize(k: &ComplexMatrix) -> Vec<C64> {
    let (dout, din) = (k.rows(), k.cols());
    let mut v = vec![ZERO; din * dout];
    for i in 0..din {
        for o in 0..dout {
            v[i * dout + o] = k[(o, i)];
        }
    }
    v
}

/// Applies a channel to a state.
pub fn apply_channel(n: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} into a channel on dimension {}",
            rho.dim(),
            n.dim_in()
        )));
    }
    Ok(DensityMatrix::from_matrix_unchecked(n.apply(rho.matrix())))
}

/// Choi matrix of a CPTP map, `J = Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    /// Validates Hermiticity, positivity and `Tr_out J = I_in`.
    pub fn new(dim_in: usize, dim_out: usize, mat: ComplexMatrix) -> Result<Self> {
        let n = dim_in * dim_out;
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n} for channel {dim_in}->{dim_out}"
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > CHANNEL_TOL {
            return Err(Error::NotCPTP(format!("Choi matrix not Hermitian ({dev:.3e})")));
        }
        let mat = mat.hermitian_part();
        let min = eig_hermitian(&mat)?.values.last().copied().unwrap_or(0.0);
        if min < -CHANNEL_TOL {
            return Err(Error::NotCPTP(format!("Choi matrix has eigenvalue {min:.3e}")));
        }
        let tp = mat.trace_trailing(dim_out).max_abs_diff(&ComplexMatrix::identity(dim_in));
        if tp > CHANNEL_TOL {
            return Err(Error::NotCPTP(format!("Tr_out J deviates from identity by {tp:.3e}")));
        }
        Ok(Self { dim_in, dim_out, mat })
    }

    pub(crate) fn from_matrix_unchecked(dim_in: usize, dim_out: usize, mat: ComplexMatrix) -> Self {
        Self { dim_in, dim_out, mat: mat.hermitian_part() }
    }

    /// Choi matrix of the linear map `f`, evaluated on matrix units.
    pub fn from_linear_map(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let n = dim_in * dim_out;
        let mut j = ComplexMatrix::zeros(n, n);
        for a in 0..dim_in {
            for b in 0..dim_in {
                let out = f(&ComplexMatrix::unit(dim_in, a, b));
                for o in 0..dim_out {
                    for p in 0..dim_out {
                        j[(a * dim_out + o, b * dim_out + p)] = out[(o, p)];
                    }
                }
            }
        }
        Self::new(dim_in, dim_out, j)
    }

    /// Choi matrix of the completely depolarizing map, `I ⊗ I / d_out`.
    pub fn completely_depolarizing(dim_in: usize, dim_out: usize) -> Self {
        Self {
            dim_in,
            dim_out,
            mat: ComplexMatrix::identity(dim_in * dim_out).scale(1.0 / dim_out as f64),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// `N(X) = Tr_in[(Xᵀ ⊗ I) J]`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        assert_eq!(x.rows(), din);
        let mut out = ComplexMatrix::zeros(dout, dout);
        for a in 0..din {
            for b in 0..din {
                let xab = x[(a, b)];
                if xab == ZERO {
                    continue;
                }
                for o in 0..dout {
                    for p in 0..dout {
                        out[(o, p)] += xab * self.mat[(a * dout + o, b * dout + p)];
                    }
                }
            }
        }
        out
    }

    /// Kraus operators from the spectral decomposition of `J`.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let e = eig_hermitian(&self.mat)?;
        let mut kraus = Vec::new();
        for (k, &mu) in e.values.iter().enumerate() {
            if mu <= KRAUS_RANK_TOL {
                continue;
            }
            let s = mu.sqrt();
            kraus.push(ComplexMatrix::from_fn(self.dim_out, self.dim_in, |o, i| {
                e.vectors[(i * self.dim_out + o, k)] * s
            }));
        }
        if kraus.is_empty() {
            return Err(Error::NotCPTP("Choi matrix is zero".into()));
        }
        QuantumChannel::new(kraus)
    }

    /// Number of eigenvalues above [`KRAUS_RANK_TOL`].
    pub fn rank(&self) -> usize {
        eig_hermitian(&self.mat)
            .map(|e| e.values.iter().filter(|&&x| x > KRAUS_RANK_TOL).count())
            .unwrap_or(0)
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, w: f64, other: &Self) -> Result<Self> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch("mixing Choi matrices of different shape".into()));
        }
        let mut m = self.mat.scale(w);
        m.axpy(1.0 - w, &other.mat);
        Ok(Self { dim_in: self.dim_in, dim_out: self.dim_out, mat: m })
    }
}

/// Either representation of a channel.
#[derive(Clone, Debug)]
pub enum ChannelRepresentation {
    Kraus(QuantumChannel),
    Choi(ChoiMatrix),
}

/// Converts between Kraus and Choi form.
pub fn convert_representation(r: &ChannelRepresentation) -> Result<ChannelRepresentation> {
    match r {
        ChannelRepresentation::Kraus(n) => Ok(ChannelRepresentation::Choi(n.choi())),
        ChannelRepresentation::Choi(j) => Ok(ChannelRepresentation::Kraus(j.to_channel()?)),
    }
}

/// Isometric extension `V : in → out ⊗ env` with `env` the Kraus index.
#[derive(Clone, Debug)]
pub struct Stinespring {
    pub isometry: ComplexMatrix,
    pub dim_env: usize,
    pub complementary: QuantumChannel,
}

pub fn stinespring(n: &QuantumChannel) -> Stinespring {
    let env = n.kraus().len();
    let (din, dout) = (n.dim_in(), n.dim_out());
    let isometry = ComplexMatrix::from_fn(dout * env, din, |row, i| n.kraus()[row % env][(row / env, i)]);
    Stinespring { isometry, dim_env: env, complementary: n.complementary() }
}

/// Fixture channels.
#[derive(Clone, Debug)]
pub enum StandardChannel {
    Identity { d: usize },
    CompletelyDepolarizing { d: usize },
    /// Qubit `(1−p)ρ + p I/2`.
    Depolarizing { p: f64 },
    /// Qubit `(1−p)ρ + p ZρZ`.
    Dephasing { p: f64 },
    AmplitudeDamping { gamma: f64 },
    /// Input dimension `d`, output `d+1`; the flag is the last basis state.
    Erasure { d: usize, p: f64 },
    Constant { sigma: DensityMatrix, dim_in: usize },
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(())
}

pub fn standard_channel(kind: &StandardChannel) -> Result<QuantumChannel> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let kraus = match kind {
        StandardChannel::Identity { d } => {
            check_dim(*d)?;
            vec![ComplexMatrix::identity(*d)]
        }
        StandardChannel::CompletelyDepolarizing { d } => {
            check_dim(*d)?;
            let s = 1.0 / (*d as f64).sqrt();
            let mut ks = Vec::with_capacity(d * d);
            for i in 0..*d {
                for j in 0..*d {
                    ks.push(ComplexMatrix::unit(*d, i, j).scale(s));
                }
            }
            ks
        }
        StandardChannel::Depolarizing { p } => {
            check_probability("p", *p)?;
            let x = ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO])?;
            let y = ComplexMatrix::new(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])?;
            let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
            let w = (p / 4.0).sqrt();
            vec![ComplexMatrix::identity(2).scale((1.0 - 3.0 * p / 4.0).sqrt()), x.scale(w), y.scale(w), z.scale(w)]
        }
        StandardChannel::Dephasing { p } => {
            check_probability("p", *p)?;
            vec![
                ComplexMatrix::identity(2).scale((1.0 - p).sqrt()),
                ComplexMatrix::from_real_diag(&[1.0, -1.0]).scale(p.sqrt()),
            ]
        }
        StandardChannel::AmplitudeDamping { gamma } => {
            check_probability("gamma", *gamma)?;
            let k0 = ComplexMatrix::from_real_diag(&[1.0, (1.0 - gamma).sqrt()]);
            let mut k1 = ComplexMatrix::zeros(2, 2);
            k1[(0, 1)] = c(gamma.sqrt(), 0.0);
            vec![k0, k1]
        }
        StandardChannel::Erasure { d, p } => {
            check_dim(*d)?;
            check_probability("p", *p)?;
            let keep = ComplexMatrix::from_fn(d + 1, *d, |o, i| if o == i { c((1.0 - p).sqrt(), 0.0) } else { ZERO });
            let mut ks = vec![keep];
            for i in 0..*d {
                let mut k = ComplexMatrix::zeros(d + 1, *d);
                k[(*d, i)] = c(p.sqrt(), 0.0);
                ks.push(k);
            }
            ks
        }
        StandardChannel::Constant { sigma, dim_in } => {
            check_dim(*dim_in)?;
            let e = sigma.eigen();
            let dout = sigma.dim();
            let mut ks = Vec::new();
            for (j, &s) in e.values.iter().enumerate() {
                if s <= 0.0 {
                    continue;
                }
                let u = e.vector(j);
                for i in 0..*dim_in {
                    ks.push(ComplexMatrix::from_fn(dout, *dim_in, |o, col| {
                        if col == i {
                            u[o] * s.sqrt()
                        } else {
                            ZERO
                        }
                    }));
                }
            }
            ks
        }
    };
    QuantumChannel::new(kraus)
}
