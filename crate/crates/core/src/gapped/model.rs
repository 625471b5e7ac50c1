use faer::{c64, Mat};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{check_dim, embed_operator, hermitian_deviation, kron, op_norm, TensorShape, HERMITIAN_TOL};

/// One interaction `Φ(X)`: a Hermitian matrix on the sorted sites `X`.
#[derive(Clone, Debug)]
pub struct Term {
    pub sites: Vec<usize>,
    pub op: Mat<c64>,
}

/// An operator together with the (sorted) sites it acts on.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    pub sites: Vec<usize>,
    pub mat: Mat<c64>,
}

impl LocalOperator {
    /// Extend to the sorted superset `target` of `self.sites` by tensoring with identities.
    pub fn embed(&self, dims: &[usize], target: &[usize]) -> Result<Mat<c64>> {
        let shape = TensorShape::new(target.iter().map(|&s| dims[s]).collect())?;
        let pos = positions(&self.sites, target)?;
        embed_operator(self.mat.as_ref(), &shape, &pos)
    }
}

/// Index of each of `sites` inside `target`.
pub(crate) fn positions(sites: &[usize], target: &[usize]) -> Result<Vec<usize>> {
    sites
        .iter()
        .map(|s| {
            target
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::InvalidRegion(format!("site {s} outside the target support")))
        })
        .collect()
}

/// Finite chain `0..n` with nearest-neighbour interactions.
#[derive(Clone, Debug)]
pub struct SpinChainModel {
    name: String,
    local_dims: Vec<usize>,
    terms: Vec<Term>,
    j: f64,
}

impl SpinChainModel {
    /// Validates Hermiticity, support size and range of every term.
    pub fn new(name: impl Into<String>, local_dims: Vec<usize>, terms: Vec<Term>) -> Result<Self> {
        let n = local_dims.len();
        if n < 2 {
            return Err(Error::InvalidParameter("a chain needs at least two sites".into()));
        }
        let mut j = 0.0f64;
        for t in &terms {
            if t.sites.is_empty() || t.sites.windows(2).any(|w| w[0] >= w[1]) || t.sites[t.sites.len() - 1] >= n {
                return Err(Error::InvalidRegion(format!("term support {:?}", t.sites)));
            }
            if t.sites[t.sites.len() - 1] - t.sites[0] > 1 {
                return Err(Error::InvalidParameter(format!("term {:?} has diameter > 1", t.sites)));
            }
            let dim: usize = t.sites.iter().map(|&s| local_dims[s]).product();
            if t.op.nrows() != dim || t.op.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.op.nrows() });
            }
            let dev = hermitian_deviation(t.op.as_ref());
            if dev > HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation: dev });
            }
            j = j.max(op_norm(t.op.as_ref())?);
        }
        Ok(Self { name: name.into(), local_dims, terms, j })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `max_X ‖Φ(X)‖`.
    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn shape(&self) -> Result<TensorShape> {
        TensorShape::new(self.local_dims.clone())
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// `Σ_{X ⊂ sites} Φ(X)` on the subsystem `sites` (sorted).
    pub fn hamiltonian_on(&self, sites: &[usize]) -> Result<LocalOperator> {
        self.sum_terms(sites, |t| t.sites.iter().all(|s| sites.contains(s)))
    }

    /// Sum of the selected terms as an operator on `support`.
    pub(crate) fn sum_terms(&self, support: &[usize], pick: impl Fn(&Term) -> bool) -> Result<LocalOperator> {
        let dim: usize = support.iter().map(|&s| self.local_dims[s]).product();
        check_dim(dim)?;
        let mut mat = Mat::<c64>::zeros(dim, dim);
        for t in self.terms.iter().filter(|t| pick(t)) {
            let local = LocalOperator { sites: t.sites.clone(), mat: t.op.clone() };
            mat += local.embed(&self.local_dims, support)?;
        }
        Ok(LocalOperator { sites: support.to_vec(), mat })
    }

    /// Full `H_V`.
    pub fn hamiltonian(&self) -> Result<Mat<c64>> {
        let all: Vec<usize> = (0..self.n_sites()).collect();
        Ok(self.hamiltonian_on(&all)?.mat)
    }
}

/// The model zoo.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelKind {
    /// `-Σ Z_i Z_{i+1} - h Σ X_i`.
    Tfim { h: f64 },
    /// `coupling · Σ S_i·S_{i+1}` with spin-1/2 operators `S = σ/2`.
    Heisenberg { coupling: f64 },
    /// Spin-1 chain, sum of projectors onto total spin 2 of each bond.
    Aklt,
    /// `-h Σ X_i`: product ground state, every term commutes.
    Field { h: f64 },
    /// `-Σ Z_i Z_{i+1} - h Σ Z_i`: diagonal terms.
    Classical { h: f64 },
}

impl ModelKind {
    /// Parses `tfim(h=2)`, `heisenberg`, `heisenberg(coupling=1.5)`, `aklt`,
    /// `field(h=1)`, `classical(h=0.5)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(Error::UnknownName(s.into())),
            None => (s, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::UnknownName(s.into()))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::UnknownName(s.into()))?;
            kv.insert(k.trim().to_string(), v);
        }
        let mut take = |key: &str, default: Option<f64>| -> Result<f64> {
            kv.remove(key).or(default).ok_or_else(|| Error::UnknownName(format!("{s}: missing {key}")))
        };
        let kind = match head {
            "tfim" => ModelKind::Tfim { h: take("h", None)? },
            "heisenberg" => ModelKind::Heisenberg { coupling: take("coupling", Some(1.0))? },
            "aklt" => ModelKind::Aklt,
            "field" => ModelKind::Field { h: take("h", Some(1.0))? },
            "classical" => ModelKind::Classical { h: take("h", Some(0.5))? },
            _ => return Err(Error::UnknownName(s.into())),
        };
        if !kv.is_empty() {
            return Err(Error::UnknownName(s.into()));
        }
        Ok(kind)
    }

    pub fn local_dim(&self) -> usize {
        match self {
            ModelKind::Aklt => 3,
            _ => 2,
        }
    }
}

fn re(m: [[f64; 2]; 2]) -> Mat<c64> {
    Mat::from_fn(2, 2, |i, j| c64::new(m[i][j], 0.0))
}

pub(crate) fn pauli_x() -> Mat<c64> {
    re([[0.0, 1.0], [1.0, 0.0]])
}

pub(crate) fn pauli_z() -> Mat<c64> {
    re([[1.0, 0.0], [0.0, -1.0]])
}

fn pauli_y() -> Mat<c64> {
    Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => c64::new(0.0, -1.0),
        (1, 0) => c64::new(0.0, 1.0),
        _ => c64::new(0.0, 0.0),
    })
}

/// Spin-1 `(S_x, S_y, S_z)` in the basis `m = +1, 0, -1`.
fn spin_one() -> [Mat<c64>; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = c64::new(0.0, 0.0);
    let sx = Mat::from_fn(3, 3, |i, j| if i.abs_diff(j) == 1 { c64::new(r, 0.0) } else { z });
    let sy = Mat::from_fn(3, 3, |i, j| {
        if j == i + 1 {
            c64::new(0.0, -r)
        } else if i == j + 1 {
            c64::new(0.0, r)
        } else {
            z
        }
    });
    let sz = Mat::from_fn(3, 3, |i, j| if i == j { c64::new(1.0 - i as f64, 0.0) } else { z });
    [sx, sy, sz]
}

fn scaled(m: &Mat<c64>, s: f64) -> Mat<c64> {
    m * faer::Scale(c64::new(s, 0.0))
}

fn dot_product(ops: &[Mat<c64>; 3]) -> Mat<c64> {
    let mut out = kron(ops[0].as_ref(), ops[0].as_ref());
    for o in &ops[1..] {
        out += kron(o.as_ref(), o.as_ref());
    }
    out
}

/// Builds a zoo model on `n` sites.
pub fn build_model(kind: &ModelKind, n: usize) -> Result<SpinChainModel> {
    if n < 2 {
        return Err(Error::InvalidParameter("a chain needs at least two sites".into()));
    }
    let d = kind.local_dim();
    check_dim(d.checked_pow(n as u32).unwrap_or(usize::MAX))?;
    let mut terms = Vec::new();
    let bond = |op: Mat<c64>, i: usize| Term { sites: vec![i, i + 1], op };
    let site = |op: Mat<c64>, i: usize| Term { sites: vec![i], op };
    let (name, terms) = match *kind {
        ModelKind::Tfim { h } => {
            let zz = scaled(&kron(pauli_z().as_ref(), pauli_z().as_ref()), -1.0);
            for i in 0..n - 1 {
                terms.push(bond(zz.clone(), i));
            }
            for i in 0..n {
                terms.push(site(scaled(&pauli_x(), -h), i));
            }
            (format!("tfim(h={h})"), terms)
        }
        ModelKind::Heisenberg { coupling } => {
            let half = [scaled(&pauli_x(), 0.5), scaled(&pauli_y(), 0.5), scaled(&pauli_z(), 0.5)];
            let ss = scaled(&dot_product(&half), coupling);
            for i in 0..n - 1 {
                terms.push(bond(ss.clone(), i));
            }
            (format!("heisenberg(coupling={coupling})"), terms)
        }
        ModelKind::Aklt => {
            let ss = dot_product(&spin_one());
            // P_2 = S·S/2 + (S·S)²/6 + 1/3
            let mut p2 = scaled(&ss, 0.5) + scaled(&(&ss * &ss), 1.0 / 6.0);
            for i in 0..9 {
                p2[(i, i)] += c64::new(1.0 / 3.0, 0.0);
            }
            for i in 0..n - 1 {
                terms.push(bond(p2.clone(), i));
            }
            ("aklt".to_string(), terms)
        }
        ModelKind::Field { h } => {
            for i in 0..n {
                terms.push(site(scaled(&pauli_x(), -h), i));
            }
            (format!("field(h={h})"), terms)
        }
        ModelKind::Classical { h } => {
            let zz = scaled(&kron(pauli_z().as_ref(), pauli_z().as_ref()), -1.0);
            for i in 0..n - 1 {
                terms.push(bond(zz.clone(), i));
            }
            for i in 0..n {
                terms.push(site(scaled(&pauli_z(), -h), i));
            }
            (format!("classical(h={h})"), terms)
        }
    };
    SpinChainModel::new(name, vec![d; n], terms)
}
