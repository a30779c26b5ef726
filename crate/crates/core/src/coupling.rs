//! Spin-multiplet expansion and state interaction: SOC and SSC matrices
//! in a basis of spin-free roots expanded to all M_z components, their
//! joint diagonalization, and zero-field-splitting extraction.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::ci::{apply_lower, classify_spin, SpinFreeState};
use crate::determinant::{enumerate, Determinant, DeterminantSpace, Spin};
use crate::error::{Error, Result};
use crate::integrals::{CouplingData, EV_TO_GHZ};

type C = Complex64;

/// Pauli-halved spin matrices in the (up, down) basis: s^x, s^y, s^z.
fn spin_matrices() -> [[[C; 2]; 2]; 3] {
    let half = C::new(0.5, 0.0);
    let ih = C::new(0.0, 0.5);
    let zero = C::new(0.0, 0.0);
    [
        [[zero, half], [half, zero]],
        [[zero, -ih], [ih, zero]],
        [[half, zero], [zero, -half]],
    ]
}

const SPINS: [Spin; 2] = [Spin::Up, Spin::Down];

/// One M_z component of a spin multiplet: a real CI vector over its own
/// fixed-M_z determinant space.
#[derive(Debug, Clone)]
pub struct MultipletMember {
    /// Index of the spin-free root this component belongs to.
    pub root: usize,
    pub s: f64,
    pub mz: f64,
    pub sector: (usize, usize),
    pub vector: Vec<f64>,
    /// Spin-free energy (eV); shared by all components of the root.
    pub energy: f64,
}

/// State-interaction basis: all multiplet components of the selected
/// roots, plus the determinant spaces they live in.
#[derive(Debug, Clone)]
pub struct MultipletBasis {
    pub n_orb: usize,
    pub members: Vec<MultipletMember>,
    spaces: BTreeMap<(usize, usize), DeterminantSpace>,
}

impl MultipletBasis {
    pub fn new(n_orb: usize, members: Vec<MultipletMember>) -> Result<Self> {
        let mut spaces = BTreeMap::new();
        for m in &members {
            if !spaces.contains_key(&m.sector) {
                spaces.insert(m.sector, enumerate(n_orb, m.sector.0, m.sector.1)?);
            }
        }
        Ok(Self {
            n_orb,
            members,
            spaces,
        })
    }

    /// Expands each spin-free root into its full multiplet.
    pub fn from_states(n_orb: usize, states: &[SpinFreeState]) -> Result<Self> {
        let mut members = Vec::new();
        for (root, state) in states.iter().enumerate() {
            members.extend(ladder_expand(n_orb, root, state)?);
        }
        Self::new(n_orb, members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space(&self, sector: (usize, usize)) -> &DeterminantSpace {
        &self.spaces[&sector]
    }

    /// Lowest spin-free energy in the basis; the GHz energy zero.
    pub fn reference_energy(&self) -> f64 {
        self.members
            .iter()
            .map(|m| m.energy)
            .fold(f64::INFINITY, f64::min)
    }

    /// Spin-free energies in GHz relative to `reference_energy`.
    pub fn h0_ghz(&self) -> Vec<f64> {
        let e0 = self.reference_energy();
        self.members
            .iter()
            .map(|m| (m.energy - e0) * EV_TO_GHZ)
            .collect()
    }
}

/// Generates all 2s+1 components of a root given at mz = s by repeated
/// application of S- with exact ladder normalization.
pub fn ladder_expand(
    n_orb: usize,
    root: usize,
    state: &SpinFreeState,
) -> Result<Vec<MultipletMember>> {
    let space = enumerate(n_orb, state.sector.0, state.sector.1)?;
    let s = classify_spin(&space, &state.vector)?;
    if (state.mz - s).abs() > 1e-9 {
        return Err(Error::DimensionMismatch(format!(
            "multiplet expansion needs the highest component: mz = {}, s = {}",
            state.mz, s
        )));
    }
    let mut members = vec![MultipletMember {
        root,
        s,
        mz: s,
        sector: state.sector,
        vector: state.vector.clone(),
        energy: state.energy,
    }];
    let steps = (2.0 * s).round() as usize;
    let mut current = state.vector.clone();
    let mut from = space;
    let mut mz = s;
    for _ in 0..steps {
        let to = enumerate(n_orb, from.n_up - 1, from.n_down + 1)?;
        let mut lowered = apply_lower(&from, &to, &current);
        let factor = (s * (s + 1.0) - mz * (mz - 1.0)).sqrt();
        for x in lowered.iter_mut() {
            *x /= factor;
        }
        let s_check = classify_spin(&to, &lowered)?;
        if (s_check - s).abs() > 1e-9 {
            return Err(Error::SpinContamination {
                s_squared: s_check * (s_check + 1.0),
                nearest: s * (s + 1.0),
            });
        }
        mz -= 1.0;
        members.push(MultipletMember {
            root,
            s,
            mz,
            sector: (to.n_up, to.n_down),
            vector: lowered.clone(),
            energy: state.energy,
        });
        current = lowered;
        from = to;
    }
    Ok(members)
}

/// One-body coupling term: orbital pair (p, q) with a 2x2 complex spin
/// matrix, realizing sum_{st} M[s][t] a+_{p,s} a_{q,t}.
struct OneBodyTerm {
    p: usize,
    q: usize,
    m: [[C; 2]; 2],
}

/// Two-body coupling term: orbital quartet (p, q, r, s) with a rank-4
/// spin tensor T[s][t][u][v] realizing
/// sum T a+_{p,s} a+_{r,u} a_{s,v} a_{q,t}.
struct TwoBodyTerm {
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    t: [[[[C; 2]; 2]; 2]; 2],
}

fn soc_terms(coupling: &CouplingData) -> Vec<OneBodyTerm> {
    let sm = spin_matrices();
    let mut out = Vec::new();
    for p in 0..coupling.n_orb {
        for q in 0..coupling.n_orb {
            let mut m = [[C::new(0.0, 0.0); 2]; 2];
            let mut any = false;
            for axis in 0..3 {
                let lam = coupling.lambda[axis][(p, q)];
                if lam == 0.0 {
                    continue;
                }
                any = true;
                let coeff = C::new(0.0, coupling.xi * lam); // i * xi * Lambda
                for (si, row) in m.iter_mut().enumerate() {
                    for (ti, slot) in row.iter_mut().enumerate() {
                        *slot += coeff * sm[axis][si][ti];
                    }
                }
            }
            if any {
                out.push(OneBodyTerm { p, q, m });
            }
        }
    }
    out
}

fn lz_terms(coupling: &CouplingData) -> Vec<OneBodyTerm> {
    let mut out = Vec::new();
    for p in 0..coupling.n_orb {
        for q in 0..coupling.n_orb {
            let lam = coupling.lambda[2][(p, q)];
            if lam == 0.0 {
                continue;
            }
            let coeff = C::new(0.0, lam); // <p| l_z |q> = i * Lambda^z_pq
            let zero = C::new(0.0, 0.0);
            out.push(OneBodyTerm {
                p,
                q,
                m: [[coeff, zero], [zero, coeff]],
            });
        }
    }
    out
}

/// Expands stored SSC quartets into explicitly Hermitian two-body terms:
/// each entry contributes (term + h.c.)/2, the conjugate living on the
/// index-swapped quartet (q, p, s, r).
fn ssc_terms(coupling: &CouplingData) -> Vec<TwoBodyTerm> {
    let sm = spin_matrices();
    let mut acc: BTreeMap<(usize, usize, usize, usize), [[[[C; 2]; 2]; 2]; 2]> = BTreeMap::new();
    let zero_t = [[[[C::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for (&(p, q, r, s), d) in &coupling.ssc_tensor {
        for quartet in [(p, q, r, s), (q, p, s, r)] {
            let slot = acc.entry(quartet).or_insert(zero_t);
            for alpha in 0..3 {
                for beta in 0..3 {
                    let dv = d[alpha][beta];
                    if dv == 0.0 {
                        continue;
                    }
                    let half_d = C::new(0.5 * dv, 0.0);
                    for si in 0..2 {
                        for ti in 0..2 {
                            for ui in 0..2 {
                                for vi in 0..2 {
                                    // h.c. of a quartet lives on the
                                    // index-swapped quartet with the same
                                    // (Hermitian) spin factors.
                                    slot[si][ti][ui][vi] +=
                                        half_d * sm[alpha][si][ti] * sm[beta][ui][vi];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    acc.into_iter()
        .map(|((p, q, r, s), t)| TwoBodyTerm { p, q, r, s, t })
        .collect()
}

/// Applies a sum of one-body terms to a real CI vector; the result is a
/// sparse complex amplitude map over determinants (possibly spanning
/// several M_z sectors).
fn apply_one_body(
    terms: &[OneBodyTerm],
    space: &DeterminantSpace,
    v: &[f64],
) -> HashMap<Determinant, C> {
    let mut out: HashMap<Determinant, C> = HashMap::new();
    for (j, det) in space.dets.iter().enumerate() {
        let c = v[j];
        if c == 0.0 {
            continue;
        }
        for term in terms {
            for (ti, &tau) in SPINS.iter().enumerate() {
                let Some((d1, s1)) = det.annihilate(term.q, tau) else {
                    continue;
                };
                for (si, &sigma) in SPINS.iter().enumerate() {
                    let coeff = term.m[si][ti];
                    if coeff == C::new(0.0, 0.0) {
                        continue;
                    }
                    let Some((d2, s2)) = d1.create(term.p, sigma) else {
                        continue;
                    };
                    *out.entry(d2).or_insert(C::new(0.0, 0.0)) += coeff * (s1 * s2 * c);
                }
            }
        }
    }
    out
}

fn apply_two_body(
    terms: &[TwoBodyTerm],
    space: &DeterminantSpace,
    v: &[f64],
) -> HashMap<Determinant, C> {
    let zero = C::new(0.0, 0.0);
    let mut out: HashMap<Determinant, C> = HashMap::new();
    for (j, det) in space.dets.iter().enumerate() {
        let c = v[j];
        if c == 0.0 {
            continue;
        }
        for term in terms {
            for (ti, &tau) in SPINS.iter().enumerate() {
                let Some((d1, s1)) = det.annihilate(term.q, tau) else {
                    continue;
                };
                for (vi, &nu) in SPINS.iter().enumerate() {
                    let Some((d2, s2)) = d1.annihilate(term.s, nu) else {
                        continue;
                    };
                    for (ui, &mu) in SPINS.iter().enumerate() {
                        let Some((d3, s3)) = d2.create(term.r, mu) else {
                            continue;
                        };
                        for (si, &sigma) in SPINS.iter().enumerate() {
                            let coeff = term.t[si][ti][ui][vi];
                            if coeff == zero {
                                continue;
                            }
                            let Some((d4, s4)) = d3.create(term.p, sigma) else {
                                continue;
                            };
                            *out.entry(d4).or_insert(zero) += coeff * (s1 * s2 * s3 * s4 * c);
                        }
                    }
                }
            }
        }
    }
    out
}

fn contract(basis: &MultipletBasis, amp: &HashMap<Determinant, C>, bra: &MultipletMember) -> C {
    let space = basis.space(bra.sector);
    let mut acc = C::new(0.0, 0.0);
    for (det, &a) in amp {
        if det.n_up() as usize == bra.sector.0 && det.n_down() as usize == bra.sector.1 {
            if let Some(i) = space.index_of(det) {
                acc += a * bra.vector[i];
            }
        }
    }
    acc
}

fn assemble_hermitian(
    basis: &MultipletBasis,
    mut apply: impl FnMut(&DeterminantSpace, &[f64]) -> HashMap<Determinant, C>,
    tol: f64,
) -> Result<DMatrix<C>> {
    let n = basis.len();
    let mut h = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for (k, ket) in basis.members.iter().enumerate() {
        let amp = apply(basis.space(ket.sector), &ket.vector);
        for (b, bra) in basis.members.iter().enumerate() {
            h[(b, k)] = contract(basis, &amp, bra);
        }
    }
    let drift = (&h - h.adjoint()).camax();
    if drift > tol {
        return Err(Error::DimensionMismatch(format!(
            "coupling matrix is not Hermitian (drift {drift:e})"
        )));
    }
    let hd = h.adjoint();
    Ok((h + hd) * C::new(0.5, 0.0))
}

/// SOC matrix (GHz) over the multiplet basis: xi * sum_i l(i).s(i) with
/// orbital part i*Lambda. Complex Hermitian.
pub fn build_soc(basis: &MultipletBasis, coupling: &CouplingData) -> Result<DMatrix<C>> {
    if coupling.n_orb != basis.n_orb {
        return Err(Error::DimensionMismatch(format!(
            "coupling has {} orbitals, basis has {}",
            coupling.n_orb, basis.n_orb
        )));
    }
    let terms = soc_terms(coupling);
    assemble_hermitian(basis, |space, v| apply_one_body(&terms, space, v), 1e-12)
}

/// SSC matrix (GHz) over the multiplet basis: the two-electron spin
/// dipole contraction with the stored spatial tensor. Hermitian; real in
/// common axial cases but complex in general.
pub fn build_ssc(basis: &MultipletBasis, coupling: &CouplingData) -> Result<DMatrix<C>> {
    if coupling.n_orb != basis.n_orb {
        return Err(Error::DimensionMismatch(format!(
            "coupling has {} orbitals, basis has {}",
            coupling.n_orb, basis.n_orb
        )));
    }
    let terms = ssc_terms(coupling);
    assemble_hermitian(basis, |space, v| apply_two_body(&terms, space, v), 1e-10)
}

/// Orbital angular momentum L_z (dimensionless) over the multiplet basis.
pub fn build_lz(basis: &MultipletBasis, coupling: &CouplingData) -> Result<DMatrix<C>> {
    let terms = lz_terms(coupling);
    assemble_hermitian(basis, |space, v| apply_one_body(&terms, space, v), 1e-12)
}

/// How the SSC matrix enters the state-interaction diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SscMode {
    /// First-order degenerate perturbation theory on the SOC-included
    /// levels (levels within 1e-3 GHz treated as one degenerate block).
    Perturbative,
    /// Included in the diagonalized Hamiltonian.
    Variational,
}

/// Eigenstate of the state-interaction Hamiltonian. Energies are in GHz
/// relative to the lowest spin-free energy of the basis.
#[derive(Debug, Clone)]
pub struct CoupledState {
    pub energy: f64,
    pub vector: Vec<C>,
    /// (member index, |coefficient|^2), descending, entries >= 1e-4.
    pub composition: Vec<(usize, f64)>,
}

fn phase_fix(v: &mut [C]) {
    let mut best = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm_sqr() > v[best].norm_sqr() + 1e-15 {
            best = i;
        }
    }
    let c = v[best];
    if c.norm() > 0.0 {
        let rot = c.conj() / c.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

fn composition_of(v: &[C]) -> Vec<(usize, f64)> {
    let mut comp: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.norm_sqr()))
        .filter(|&(_, w)| w >= 1e-4)
        .collect();
    comp.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    comp
}

fn hermitian_eigen_sorted(h: &DMatrix<C>) -> (Vec<f64>, Vec<Vec<C>>) {
    let eig = SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Diagonalizes H0 + (optional SOC) + (optional SSC) over the multiplet
/// basis. SOC enters variationally; SSC per `ssc_mode`. Eigenvectors are
/// phase-fixed so the largest-magnitude coefficient is real positive.
pub fn state_interaction(
    basis: &MultipletBasis,
    soc: Option<&DMatrix<C>>,
    ssc: Option<&DMatrix<C>>,
    ssc_mode: SscMode,
) -> Result<Vec<CoupledState>> {
    let n = basis.len();
    for m in [soc, ssc].into_iter().flatten() {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(
                "coupling matrix dimension != basis size".into(),
            ));
        }
    }
    let mut h = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for (i, e) in basis.h0_ghz().into_iter().enumerate() {
        h[(i, i)] = C::new(e, 0.0);
    }
    if let Some(soc) = soc {
        h += soc;
    }
    if let (Some(ssc), SscMode::Variational) = (ssc, ssc_mode) {
        h += ssc;
    }
    let (mut values, mut vectors) = hermitian_eigen_sorted(&h);

    if let (Some(ssc), SscMode::Perturbative) = (ssc, ssc_mode) {
        // Degenerate first-order perturbation theory: diagonalize SSC
        // within each cluster of SOC-included levels.
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[end] - values[end - 1] < 1e-3 {
                end += 1;
            }
            let k = end - start;
            let mut block = DMatrix::from_element(k, k, C::new(0.0, 0.0));
            for a in 0..k {
                for b in 0..k {
                    let mut acc = C::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            acc +=
                                vectors[start + a][i].conj() * ssc[(i, j)] * vectors[start + b][j];
                        }
                    }
                    block[(a, b)] = acc;
                }
            }
            let (shifts, rots) = hermitian_eigen_sorted(&block);
            let old: Vec<Vec<C>> = vectors[start..end].to_vec();
            for a in 0..k {
                values[start + a] += shifts[a];
                let mut newv = vec![C::new(0.0, 0.0); n];
                for (b, oldv) in old.iter().enumerate() {
                    for i in 0..n {
                        newv[i] += rots[a][b] * oldv[i];
                    }
                }
                vectors[start + a] = newv;
            }
            start = end;
        }
        // Shifts can reorder levels inside what used to be one cluster.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        values = order.iter().map(|&k| values[k]).collect();
        vectors = order.iter().map(|&k| vectors[k].clone()).collect();
    }

    let mut out = Vec::with_capacity(n);
    for (energy, mut vector) in values.into_iter().zip(vectors) {
        phase_fix(&mut vector);
        let composition = composition_of(&vector);
        out.push(CoupledState {
            energy,
            vector,
            composition,
        });
    }
    Ok(out)
}

/// <S_z^2> of a coupled state (S_z is diagonal over the multiplet basis).
pub fn sz_squared(basis: &MultipletBasis, state: &CoupledState) -> f64 {
    basis
        .members
        .iter()
        .zip(&state.vector)
        .map(|(m, c)| m.mz * m.mz * c.norm_sqr())
        .sum()
}

/// <L_z> of a coupled state.
pub fn lz_expectation(
    basis: &MultipletBasis,
    coupling: &CouplingData,
    state: &CoupledState,
) -> Result<f64> {
    let lz = build_lz(basis, coupling)?;
    let n = basis.len();
    let mut acc = C::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += state.vector[i].conj() * lz[(i, j)] * state.vector[j];
        }
    }
    Ok(acc.re)
}

/// Signed <l_z> values for a set of coupled states spanning one
/// degenerate level: diagonalizes L_z within their span, removing the
/// arbitrary-rotation ambiguity of degenerate eigenvectors.
pub fn lz_eigenvalues(lz: &DMatrix<C>, states: &[&CoupledState]) -> Vec<f64> {
    let k = states.len();
    let n = lz.nrows();
    let mut applied: Vec<Vec<C>> = Vec::with_capacity(k);
    for st in states {
        let mut w = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                w[i] += lz[(i, j)] * st.vector[j];
            }
        }
        applied.push(w);
    }
    let mut block = DMatrix::<C>::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            block[(a, b)] = states[a]
                .vector
                .iter()
                .zip(&applied[b])
                .map(|(v, w)| v.conj() * w)
                .sum();
        }
    }
    hermitian_eigen_sorted(&block).0
}

/// Axial and rhombic zero-field-splitting parameters (GHz).
#[derive(Debug, Clone, Copy)]
pub struct ZfsParameters {
    pub d: f64,
    pub e: f64,
    /// Contamination measure: worst deviation of the three <S_z^2>
    /// values from the ideal (0, 1, 1).
    pub residual: f64,
}

/// Inverts the triplet effective Hamiltonian
/// D (S_z^2 - S(S+1)/3) + E (S_x^2 - S_y^2), whose levels are
/// (-2D/3, D/3 - E, D/3 + E), from three (energy GHz, <S_z^2>) pairs.
pub fn zfs_extract(levels: &[(f64, f64); 3]) -> Result<ZfsParameters> {
    let mean = (levels[0].0 + levels[1].0 + levels[2].0) / 3.0;
    let mut idx: Vec<usize> = vec![0, 1, 2];
    idx.sort_by(|&a, &b| levels[a].1.total_cmp(&levels[b].1));
    let (e0, sz0) = levels[idx[0]];
    let (ea, sza) = levels[idx[1]];
    let (eb, szb) = levels[idx[2]];
    let residual = sz0.abs().max((sza - 1.0).abs()).max((szb - 1.0).abs());
    if residual > 0.1 {
        return Err(Error::ZfsResidual(residual));
    }
    let d = -1.5 * (e0 - mean);
    let e = 0.5 * (eb - ea).abs();
    Ok(ZfsParameters { d, e, residual })
}
