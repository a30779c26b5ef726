//! Sparse CI Hamiltonian construction, iterative eigensolver, and state
//! characterization (spin, configuration weights, one-particle density).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::determinant::{enumerate, matrix_element, Determinant, DeterminantSpace, Spin};
use crate::error::{Error, Result};
use crate::integrals::ActiveSpaceIntegrals;
use crate::symmetry::{assign_irrep, orbital_rep, IrrepLabel};

/// A real CI eigenvector over a fixed-M_z determinant space, tagged with
/// energy (eV, including e_core), total spin, and (optionally) its irrep.
#[derive(Debug, Clone)]
pub struct SpinFreeState {
    /// (n_up, n_down) of the underlying determinant space.
    pub sector: (usize, usize),
    pub vector: Vec<f64>,
    pub energy: f64,
    pub s: f64,
    pub mz: f64,
    pub irrep: Option<IrrepLabel>,
}

/// Spectrum of spin-free states ordered by energy, with excitation
/// energies relative to the global ground state.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub states: Vec<SpinFreeState>,
    pub excitations: Vec<f64>,
}

/// Explicit sparse symmetric operator in CSR form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// y = H x without materializing anything further.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, slot) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            *slot = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] = self.vals[k];
            }
        }
        m
    }
}

/// Builds the sparse CI Hamiltonian over a determinant space.
pub fn build_hamiltonian(
    space: &DeterminantSpace,
    ints: &ActiveSpaceIntegrals,
) -> Result<SparseHamiltonian> {
    if ints.n_orb != space.n_orb {
        return Err(Error::DimensionMismatch(format!(
            "integrals have {} orbitals, space has {}",
            ints.n_orb, space.n_orb
        )));
    }
    let dim = space.len();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut col_idx = Vec::new();
    let mut vals = Vec::new();
    let mut diag = Vec::with_capacity(dim);
    row_ptr.push(0);
    for (i, a) in space.dets.iter().enumerate() {
        for (j, b) in space.dets.iter().enumerate() {
            let deg = ((a.up ^ b.up).count_ones() + (a.down ^ b.down).count_ones()) / 2;
            if deg > 2 {
                continue;
            }
            let v = matrix_element(a, b, ints)?;
            if i == j {
                diag.push(v);
            }
            if v != 0.0 || i == j {
                col_idx.push(j);
                vals.push(v);
            }
        }
        row_ptr.push(vals.len());
    }
    Ok(SparseHamiltonian {
        dim,
        row_ptr,
        col_idx,
        vals,
        diag,
    })
}

/// Eigenpairs returned by the solvers, values ascending, vectors
/// orthonormal.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

/// Dense reference diagonalization (used as the oracle path in tests and
/// as the exact fallback for tiny problems).
pub fn solve_dense(op: &SparseHamiltonian, n_roots: usize) -> Eigenpairs {
    let m = op.to_dense();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..op.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = n_roots.min(op.dim);
    let values: Vec<f64> = order[..n].iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors: Vec<Vec<f64>> = order[..n]
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    Eigenpairs {
        residuals: vec![0.0; n],
        values,
        vectors,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Davidson iteration with block expansion (subspace >= n_roots + 2 so
/// degenerate pairs converge together). Deterministic given the
/// lowest-diagonal initial guess rule.
pub fn solve_lowest(op: &SparseHamiltonian, n_roots: usize, tol: f64) -> Result<Eigenpairs> {
    let dim = op.dim();
    if n_roots > dim {
        return Err(Error::DimensionMismatch(format!(
            "requested {n_roots} roots from a {dim}-dimensional operator"
        )));
    }
    if tol <= 0.0 {
        return Err(Error::DimensionMismatch(
            "tolerance must be positive".into(),
        ));
    }
    let block = (n_roots + 2).min(dim);
    let max_subspace = (4 * block).max(40).min(dim);

    // Initial guess: unit vectors on the lowest-diagonal determinants,
    // ties broken by canonical order.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        op.diagonal()[a]
            .total_cmp(&op.diagonal()[b])
            .then(a.cmp(&b))
    });
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    for &i in order.iter().take(block) {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        let mut w = vec![0.0; dim];
        op.apply(&v, &mut w);
        basis.push(v);
        images.push(w);
    }
    // One dense deterministic vector with generic overlap on every
    // eigenvector, so degenerate partners hiding in symmetry sectors
    // orthogonal to the unit guesses still get picked up.
    if dim > block {
        let mut v: Vec<f64> = (0..dim).map(|i| (0.7391 * (i + 1) as f64).sin()).collect();
        for bv in &basis {
            let c = dot(&v, bv);
            for (x, b) in v.iter_mut().zip(bv) {
                *x -= c * b;
            }
        }
        let nrm = norm(&v);
        if nrm > 1e-8 {
            for x in v.iter_mut() {
                *x /= nrm;
            }
            let mut w = vec![0.0; dim];
            op.apply(&v, &mut w);
            basis.push(v);
            images.push(w);
        }
    }

    let max_iter = 500;
    let mut best_residual = f64::INFINITY;
    for _iter in 0..max_iter {
        let m = basis.len();
        let s = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &images[j]));
        // Symmetrize away round-off before the dense solve.
        let s = (&s + s.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let n_ritz = n_roots.min(m);
        let mut ritz_vals = Vec::with_capacity(n_ritz);
        let mut ritz_vecs = Vec::with_capacity(n_ritz);
        let mut residual_vecs = Vec::with_capacity(n_ritz);
        let mut residual_norms = Vec::with_capacity(n_ritz);
        for &k in idx.iter().take(n_ritz) {
            let lambda = eig.eigenvalues[k];
            let y = eig.eigenvectors.column(k);
            let mut x = vec![0.0; dim];
            let mut r = vec![0.0; dim];
            for (c, (bv, wv)) in y.iter().zip(basis.iter().zip(&images)) {
                for i in 0..dim {
                    x[i] += c * bv[i];
                    r[i] += c * wv[i];
                }
            }
            for i in 0..dim {
                r[i] -= lambda * x[i];
            }
            residual_norms.push(norm(&r));
            ritz_vals.push(lambda);
            ritz_vecs.push(x);
            residual_vecs.push(r);
        }

        let worst = residual_norms.iter().cloned().fold(0.0f64, f64::max);
        best_residual = best_residual.min(worst);
        if n_ritz == n_roots && worst <= tol {
            return Ok(Eigenpairs {
                values: ritz_vals,
                vectors: ritz_vecs,
                residuals: residual_norms,
            });
        }
        if m == dim {
            // Subspace is the whole space: the Ritz pairs are exact.
            return Ok(Eigenpairs {
                values: ritz_vals,
                vectors: ritz_vecs,
                residuals: residual_norms,
            });
        }

        // Restart by compressing onto the lowest Ritz vectors.
        if m + n_roots > max_subspace {
            let keep = (2 * block).min(m);
            let mut new_basis = Vec::with_capacity(keep);
            let mut new_images = Vec::with_capacity(keep);
            for &k in idx.iter().take(keep) {
                let y = eig.eigenvectors.column(k);
                let mut x = vec![0.0; dim];
                let mut w = vec![0.0; dim];
                for (c, (bv, wv)) in y.iter().zip(basis.iter().zip(&images)) {
                    for i in 0..dim {
                        x[i] += c * bv[i];
                        w[i] += c * wv[i];
                    }
                }
                new_basis.push(x);
                new_images.push(w);
            }
            basis = new_basis;
            images = new_images;
        }

        // Expand with preconditioned residuals of unconverged roots.
        let mut added = 0;
        for (k, r) in residual_vecs.iter().enumerate() {
            if residual_norms[k] <= tol {
                continue;
            }
            let lambda = ritz_vals[k];
            let mut t: Vec<f64> = r
                .iter()
                .zip(op.diagonal())
                .map(|(ri, di)| {
                    let denom = di - lambda;
                    let denom = if denom.abs() < 1e-8 {
                        1e-8f64.copysign(denom)
                    } else {
                        denom
                    };
                    ri / denom
                })
                .collect();
            for _ in 0..2 {
                for bv in &basis {
                    let c = dot(&t, bv);
                    for i in 0..dim {
                        t[i] -= c * bv[i];
                    }
                }
            }
            let nrm = norm(&t);
            if nrm > 1e-10 {
                for x in t.iter_mut() {
                    *x /= nrm;
                }
                let mut w = vec![0.0; dim];
                op.apply(&t, &mut w);
                basis.push(t);
                images.push(w);
                added += 1;
            }
            if basis.len() == dim {
                break;
            }
        }
        if added == 0 {
            // Stagnation: inject the next canonical unit vector outside
            // the current span.
            let mut injected = false;
            for &i in &order {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                for _ in 0..2 {
                    for bv in &basis {
                        let c = dot(&v, bv);
                        for x in 0..dim {
                            v[x] -= c * bv[x];
                        }
                    }
                }
                let nrm = norm(&v);
                if nrm > 1e-6 {
                    for x in v.iter_mut() {
                        *x /= nrm;
                    }
                    let mut w = vec![0.0; dim];
                    op.apply(&v, &mut w);
                    basis.push(v);
                    images.push(w);
                    injected = true;
                    break;
                }
            }
            if !injected {
                return Err(Error::NonConvergence {
                    iterations: max_iter,
                    residual: best_residual,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: best_residual,
    })
}

/// Applies S+ = sum_p a+_{p,up} a_{p,down}; output lives in the
/// (n_up + 1, n_down - 1) space.
fn apply_raise(from: &DeterminantSpace, to: &DeterminantSpace, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; to.len()];
    for (j, det) in from.dets.iter().enumerate() {
        let c = v[j];
        if c == 0.0 {
            continue;
        }
        for p in 0..from.n_orb {
            if let Some((d1, s1)) = det.annihilate(p, Spin::Down) {
                if let Some((d2, s2)) = d1.create(p, Spin::Up) {
                    let i = to.index_of(&d2).expect("target determinant in sector");
                    out[i] += s1 * s2 * c;
                }
            }
        }
    }
    out
}

/// Applies S- = sum_p a+_{p,down} a_{p,up}; output lives in the
/// (n_up - 1, n_down + 1) space.
pub fn apply_lower(from: &DeterminantSpace, to: &DeterminantSpace, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; to.len()];
    for (j, det) in from.dets.iter().enumerate() {
        let c = v[j];
        if c == 0.0 {
            continue;
        }
        for p in 0..from.n_orb {
            if let Some((d1, s1)) = det.annihilate(p, Spin::Up) {
                if let Some((d2, s2)) = d1.create(p, Spin::Down) {
                    let i = to.index_of(&d2).expect("target determinant in sector");
                    out[i] += s1 * s2 * c;
                }
            }
        }
    }
    out
}

/// Applies S^2 = S_z^2 + S_z + S- S+ in the determinant basis.
pub fn s_squared_apply(space: &DeterminantSpace, v: &[f64]) -> Vec<f64> {
    let mz = space.mz();
    let mut out: Vec<f64> = v.iter().map(|&c| (mz * mz + mz) * c).collect();
    if space.n_down > 0 && space.n_up < space.n_orb {
        let upper = enumerate(space.n_orb, space.n_up + 1, space.n_down - 1)
            .expect("valid neighbor sector");
        let raised = apply_raise(space, &upper, v);
        let lowered = apply_lower(&upper, space, &raised);
        for (o, l) in out.iter_mut().zip(&lowered) {
            *o += l;
        }
    }
    out
}

/// Total spin quantum number from <S^2>, rejecting spin-contaminated
/// vectors.
pub fn classify_spin(space: &DeterminantSpace, v: &[f64]) -> Result<f64> {
    let n2 = dot(v, v);
    let exp = dot(v, &s_squared_apply(space, v)) / n2;
    let s_exact = (-1.0 + (1.0 + 4.0 * exp).sqrt()) / 2.0;
    let s = (2.0 * s_exact).round() / 2.0;
    let nearest = s * (s + 1.0);
    if (exp - nearest).abs() > 1e-6 {
        return Err(Error::SpinContamination {
            s_squared: exp,
            nearest,
        });
    }
    Ok(s)
}

/// Squared-coefficient weights per determinant, sorted descending,
/// truncated at `threshold`.
pub fn config_weights(
    space: &DeterminantSpace,
    v: &[f64],
    threshold: f64,
) -> Vec<(Determinant, f64)> {
    let mut out: Vec<(Determinant, f64)> = space
        .dets
        .iter()
        .zip(v)
        .map(|(&d, &c)| (d, c * c))
        .filter(|&(_, w)| w >= threshold)
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Spin-summed one-particle density matrix; trace equals the electron
/// count, eigenvalues lie in [0, 2].
pub fn one_rdm(space: &DeterminantSpace, v: &[f64]) -> DMatrix<f64> {
    let n = space.n_orb;
    let mut rdm = DMatrix::zeros(n, n);
    for (j, det) in space.dets.iter().enumerate() {
        let c = v[j];
        if c == 0.0 {
            continue;
        }
        for p in det.occupied_up() {
            rdm[(p, p)] += c * c;
        }
        for p in det.occupied_down() {
            rdm[(p, p)] += c * c;
        }
        for spin in [Spin::Up, Spin::Down] {
            for q in 0..n {
                if !det.occupied(q, spin) {
                    continue;
                }
                for p in 0..n {
                    if p == q || det.occupied(p, spin) {
                        continue;
                    }
                    let (d1, s1) = det.annihilate(q, spin).unwrap();
                    let (d2, s2) = d1.create(p, spin).unwrap();
                    let i = space.index_of(&d2).unwrap();
                    rdm[(p, q)] += v[i] * s1 * s2 * c;
                }
            }
        }
    }
    rdm
}

/// Solves the lowest `n_roots` of a fixed-M_z sector and classifies spin.
pub fn solve_sector(
    ints: &ActiveSpaceIntegrals,
    n_up: usize,
    n_down: usize,
    n_roots: usize,
    tol: f64,
) -> Result<(DeterminantSpace, Vec<SpinFreeState>)> {
    let space = enumerate(ints.n_orb, n_up, n_down)?;
    let ham = build_hamiltonian(&space, ints)?;
    let n_roots = n_roots.min(space.len());
    let pairs = solve_lowest(&ham, n_roots, tol)?;
    let mut states = Vec::with_capacity(n_roots);
    for (value, vector) in pairs.values.into_iter().zip(pairs.vectors) {
        let s = classify_spin(&space, &vector)?;
        states.push(SpinFreeState {
            sector: (n_up, n_down),
            vector,
            energy: value,
            s,
            mz: space.mz(),
            irrep: None,
        });
    }
    Ok((space, states))
}

/// Groups consecutive same-spin states within `window` into degenerate
/// clusters and assigns each cluster a C3v irrep label.
pub fn assign_irreps(
    states: &mut [SpinFreeState],
    space: &DeterminantSpace,
    ints: &ActiveSpaceIntegrals,
    window: f64,
) -> Result<()> {
    let rep = orbital_rep(&ints.orbsym)?;
    let mut start = 0;
    while start < states.len() {
        let mut end = start + 1;
        while end < states.len()
            && (states[end].energy - states[end - 1].energy).abs() < window
            && states[end].s == states[start].s
        {
            end += 1;
        }
        let cluster: Vec<&[f64]> = states[start..end]
            .iter()
            .map(|s| s.vector.as_slice())
            .collect();
        let label = assign_irrep(&cluster, space, &rep)?;
        for state in &mut states[start..end] {
            state.irrep = Some(label);
        }
        start = end;
    }
    Ok(())
}

/// Removes the trailing degenerate cluster of a truncated root list: the
/// solver may have cut through an E pair, leaving an unassignable
/// half-cluster at the end.
fn drop_trailing_cluster(states: &mut Vec<SpinFreeState>, window: f64) {
    let Some(last) = states.len().checked_sub(1) else {
        return;
    };
    let mut cut = last;
    while cut > 0
        && (states[cut].energy - states[cut - 1].energy).abs() < window
        && states[cut].s == states[cut - 1].s
    {
        cut -= 1;
    }
    states.truncate(cut);
}

/// Solves the triplet (maximum-M_z) and singlet sectors, labels irreps,
/// and merges into an energy-ordered spectrum.
pub fn compute_spectrum(
    ints: &ActiveSpaceIntegrals,
    n_triplet: usize,
    n_singlet: usize,
    tol: f64,
) -> Result<SpectrumResult> {
    if ints.n_elec % 2 != 0 {
        return Err(Error::DimensionMismatch(
            "spectrum pipeline expects an even electron count".into(),
        ));
    }
    let half = ints.n_elec / 2;
    let mut states = Vec::new();

    // Triplets from the M_z = 1 sector.
    if n_triplet > 0 {
        let mut want = n_triplet + 2;
        loop {
            let (space, mut sector) = solve_sector(ints, half + 1, half - 1, want, tol)?;
            if want < space.len() {
                drop_trailing_cluster(&mut sector, 1e-7);
            }
            assign_irreps(&mut sector, &space, ints, 1e-7)?;
            let mut triplets: Vec<SpinFreeState> = sector
                .into_iter()
                .filter(|st| (st.s - 1.0).abs() < 0.25)
                .collect();
            if triplets.len() >= n_triplet || want >= space.len() {
                let split = triplets.len() > n_triplet
                    && (triplets[n_triplet].energy - triplets[n_triplet - 1].energy).abs() < 1e-7;
                triplets.truncate(n_triplet);
                if split {
                    // Keep levels whole: drop the partial trailing cluster.
                    drop_trailing_cluster(&mut triplets, 1e-7);
                }
                states.extend(triplets);
                break;
            }
            want = (want + 4).min(space.len());
        }
    }

    // Singlets from the M_z = 0 sector.
    if n_singlet > 0 {
        let mut want = n_singlet + n_triplet + 2;
        loop {
            let (space, mut sector) = solve_sector(ints, half, half, want, tol)?;
            if want < space.len() {
                drop_trailing_cluster(&mut sector, 1e-7);
            }
            assign_irreps(&mut sector, &space, ints, 1e-7)?;
            let mut singlets: Vec<SpinFreeState> =
                sector.into_iter().filter(|st| st.s.abs() < 0.25).collect();
            if singlets.len() >= n_singlet || want >= space.len() {
                let split = singlets.len() > n_singlet
                    && (singlets[n_singlet].energy - singlets[n_singlet - 1].energy).abs() < 1e-7;
                singlets.truncate(n_singlet);
                if split {
                    drop_trailing_cluster(&mut singlets, 1e-7);
                }
                states.extend(singlets);
                break;
            }
            want = (want + 4).min(space.len());
        }
    }

    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let e0 = states.first().map(|s| s.energy).unwrap_or(0.0);
    let excitations = states.iter().map(|s| s.energy - e0).collect();
    Ok(SpectrumResult {
        states,
        excitations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::OrbSym;

    fn ints_a1(n: usize, n_elec: usize) -> ActiveSpaceIntegrals {
        ActiveSpaceIntegrals::new(n, n_elec, vec![OrbSym::A1; n]).unwrap()
    }

    #[test]
    fn one_determinant_hamiltonian() {
        let mut ints = ints_a1(1, 2);
        ints.set_h(0, 0, -1.0);
        ints.set_g(0, 0, 0, 0, 0.5);
        ints.e_core = 0.1;
        let space = enumerate(1, 1, 1).unwrap();
        let ham = build_hamiltonian(&space, &ints).unwrap();
        assert_eq!(ham.dim(), 1);
        assert!((ham.diagonal()[0] - (-1.5 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn matvec_matches_columns() {
        let mut ints = ints_a1(3, 2);
        ints.set_h(0, 0, -1.0);
        ints.set_h(1, 1, -0.5);
        ints.set_h(0, 1, 0.2);
        ints.set_g(0, 0, 1, 1, 0.3);
        let space = enumerate(3, 1, 1).unwrap();
        let ham = build_hamiltonian(&space, &ints).unwrap();
        let dense = ham.to_dense();
        for j in 0..ham.dim() {
            let mut e = vec![0.0; ham.dim()];
            e[j] = 1.0;
            let mut y = vec![0.0; ham.dim()];
            ham.apply(&e, &mut y);
            for i in 0..ham.dim() {
                assert!((y[i] - dense[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn analytic_two_by_two() {
        // [[0,1],[1,0]] realized as a 2-determinant space with a hopping
        // integral; eigenvalues are -t, +t.
        let mut ints = ints_a1(2, 1);
        ints.set_h(0, 1, 1.0);
        let space = enumerate(2, 1, 0).unwrap();
        let ham = build_hamiltonian(&space, &ints).unwrap();
        let pairs = solve_lowest(&ham, 2, 1e-12).unwrap();
        assert!((pairs.values[0] + 1.0).abs() < 1e-10);
        assert!((pairs.values[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn s_squared_examples() {
        // Closed shell {0u, 0d}: S^2 -> 0.
        let space = enumerate(2, 1, 1).unwrap();
        let det = Determinant::from_occupied(&[0], &[0]);
        let mut v = vec![0.0; space.len()];
        v[space.index_of(&det).unwrap()] = 1.0;
        let sv = s_squared_apply(&space, &v);
        assert!(norm(&sv) < 1e-14);
        assert_eq!(classify_spin(&space, &v).unwrap(), 0.0);

        // High-spin {0u, 1u}: eigenvalue 2 (S = 1).
        let space = enumerate(2, 2, 0).unwrap();
        let v = vec![1.0];
        let sv = s_squared_apply(&space, &v);
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert_eq!(classify_spin(&space, &v).unwrap(), 1.0);

        // Open-shell singlet over orbitals 0 and 1. With canonical
        // operator ordering (up block first) the antisymmetric spin pair
        // becomes the *plus* combination of the two determinants, and the
        // minus combination is the M_z = 0 triplet.
        let space = enumerate(2, 1, 1).unwrap();
        let d1 = Determinant::from_occupied(&[0], &[1]);
        let d2 = Determinant::from_occupied(&[1], &[0]);
        let mut v = vec![0.0; space.len()];
        let inv = 1.0 / 2.0f64.sqrt();
        v[space.index_of(&d1).unwrap()] = inv;
        v[space.index_of(&d2).unwrap()] = inv;
        let sv = s_squared_apply(&space, &v);
        assert!(norm(&sv) < 1e-14);
        assert_eq!(classify_spin(&space, &v).unwrap(), 0.0);

        let mut t = vec![0.0; space.len()];
        t[space.index_of(&d1).unwrap()] = inv;
        t[space.index_of(&d2).unwrap()] = -inv;
        assert_eq!(classify_spin(&space, &t).unwrap(), 1.0);
    }

    #[test]
    fn config_weight_examples() {
        let space = enumerate(2, 1, 1).unwrap();
        let mut v = vec![0.0; space.len()];
        v[0] = 1.0;
        let w = config_weights(&space, &v, 0.05);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].1, 1.0);

        let mut v = vec![0.0; space.len()];
        let inv = 1.0 / 2.0f64.sqrt();
        v[0] = inv;
        v[1] = inv;
        let w = config_weights(&space, &v, 0.05);
        assert_eq!(w.len(), 2);
        assert!((w[0].1 - 0.5).abs() < 1e-15);
        assert!(config_weights(&space, &v, 0.9).is_empty());
    }

    #[test]
    fn one_rdm_basics() {
        let space = enumerate(3, 1, 1).unwrap();
        let det = Determinant::from_occupied(&[0], &[0]);
        let mut v = vec![0.0; space.len()];
        v[space.index_of(&det).unwrap()] = 1.0;
        let rdm = one_rdm(&space, &v);
        assert!((rdm[(0, 0)] - 2.0).abs() < 1e-14);
        assert!(rdm.trace() - 2.0 < 1e-12);

        // Trace equals electron count for an arbitrary normalized vector.
        let mut v: Vec<f64> = (0..space.len())
            .map(|i| ((i * 7 + 3) as f64).sin())
            .collect();
        let n = norm(&v);
        v.iter_mut().for_each(|x| *x /= n);
        let rdm = one_rdm(&space, &v);
        assert!((rdm.trace() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn davidson_matches_dense_small_random() {
        // Deterministic pseudo-random symmetric integrals.
        let mut ints = ints_a1(4, 4);
        let mut seed = 1u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for p in 0..4 {
            for q in 0..=p {
                ints.set_h(p, q, next());
                for r in 0..4 {
                    for s in 0..=r {
                        ints.set_g(p, q, r, s, 0.3 * next());
                    }
                }
            }
        }
        let space = enumerate(4, 2, 2).unwrap();
        let ham = build_hamiltonian(&space, &ints).unwrap();
        let dense = solve_dense(&ham, 5);
        let iter = solve_lowest(&ham, 5, 1e-11).unwrap();
        for (a, b) in dense.values.iter().zip(&iter.values) {
            assert!((a - b).abs() < 1e-9, "dense {a} vs davidson {b}");
        }
        // Orthonormality of the returned vectors.
        for i in 0..5 {
            for j in 0..5 {
                let d = dot(&iter.vectors[i], &iter.vectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn full_spectrum_matches_dense() {
        let mut ints = ints_a1(3, 2);
        for p in 0..3 {
            ints.set_h(p, p, -1.0 + 0.37 * p as f64);
            for q in 0..p {
                ints.set_h(p, q, 0.11 * (p + q) as f64);
            }
        }
        ints.set_g(0, 0, 1, 1, 0.4);
        ints.set_g(0, 1, 0, 1, 0.12);
        let space = enumerate(3, 1, 1).unwrap();
        let ham = build_hamiltonian(&space, &ints).unwrap();
        let dim = ham.dim();
        let dense = solve_dense(&ham, dim);
        let iter = solve_lowest(&ham, dim, 1e-11).unwrap();
        for (a, b) in dense.values.iter().zip(&iter.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
