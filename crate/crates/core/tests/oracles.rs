//! Independent oracles for the core machinery: brute-force second
//! quantization against the Slater-Condon fast path, and dense
//! diagonalization against the iterative solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use casdefect_core::ci::{build_hamiltonian, solve_dense, solve_lowest};
use casdefect_core::determinant::{enumerate, matrix_element, Determinant, Spin};
use casdefect_core::integrals::{ActiveSpaceIntegrals, OrbSym};

/// Random integrals with the full 8-fold permutational symmetry (all-A1
/// orbital labels; point-group structure is irrelevant here).
fn random_integrals(n_orb: usize, rng: &mut ChaCha8Rng) -> ActiveSpaceIntegrals {
    let orbsym = vec![OrbSym::A1; n_orb];
    let mut ints = ActiveSpaceIntegrals::new(n_orb, n_orb, orbsym).unwrap();
    ints.e_core = rng.gen_range(-1.0..1.0);
    for p in 0..n_orb {
        for q in 0..=p {
            ints.set_h(p, q, rng.gen_range(-2.0..2.0));
        }
    }
    for p in 0..n_orb {
        for q in 0..=p {
            for r in 0..n_orb {
                for s in 0..=r {
                    if (p, q) < (r, s) {
                        continue;
                    }
                    ints.set_g(p, q, r, s, rng.gen_range(-1.0..1.0));
                }
            }
        }
    }
    ints
}

/// Brute-force matrix element: expand H = sum h_pq a+a + 1/2 sum (pq|rs)
/// a+a+aa term by term with the elementary operators.
fn oracle_element(bra: &Determinant, ket: &Determinant, ints: &ActiveSpaceIntegrals) -> f64 {
    let n = ints.n_orb;
    let mut acc = if bra == ket { ints.e_core } else { 0.0 };
    for sigma in [Spin::Up, Spin::Down] {
        for p in 0..n {
            for q in 0..n {
                let h = ints.h(p, q);
                if h == 0.0 {
                    continue;
                }
                let Some((d1, s1)) = ket.annihilate(q, sigma) else {
                    continue;
                };
                let Some((d2, s2)) = d1.create(p, sigma) else {
                    continue;
                };
                if d2 == *bra {
                    acc += h * s1 * s2;
                }
            }
        }
    }
    for sigma in [Spin::Up, Spin::Down] {
        for tau in [Spin::Up, Spin::Down] {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let g = ints.g(p, q, r, s);
                            if g == 0.0 {
                                continue;
                            }
                            // 1/2 (pq|rs) a+_{p,sigma} a+_{r,tau} a_{s,tau} a_{q,sigma}
                            let Some((d1, s1)) = ket.annihilate(q, sigma) else {
                                continue;
                            };
                            let Some((d2, s2)) = d1.annihilate(s, tau) else {
                                continue;
                            };
                            let Some((d3, s3)) = d2.create(r, tau) else {
                                continue;
                            };
                            let Some((d4, s4)) = d3.create(p, sigma) else {
                                continue;
                            };
                            if d4 == *bra {
                                acc += 0.5 * g * s1 * s2 * s3 * s4;
                            }
                        }
                    }
                }
            }
        }
    }
    acc
}

#[test]
fn slater_condon_matches_brute_force() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_orb = 2 + (seed % 3) as usize; // 2, 3, 4
        let ints = random_integrals(n_orb, &mut rng);
        for n_up in 0..=n_orb {
            for n_down in 0..=n_orb {
                let space = enumerate(n_orb, n_up, n_down).unwrap();
                for a in &space.dets {
                    for b in &space.dets {
                        let fast = matrix_element(a, b, &ints).unwrap();
                        let slow = oracle_element(a, b, &ints);
                        assert!(
                            (fast - slow).abs() < 1e-12,
                            "seed {seed} n_orb {n_orb} bra {a:?} ket {b:?}: \
                             fast {fast} vs oracle {slow}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn davidson_full_spectrum_matches_dense_on_random_instance() {
    // 50-dimensional sector: 5 orbitals, (3 up, 1 down).
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ints = random_integrals(5, &mut rng);
    let space = enumerate(5, 3, 1).unwrap();
    assert_eq!(space.len(), 50);
    let ham = build_hamiltonian(&space, &ints).unwrap();
    let dense = solve_dense(&ham, 50);
    let iterative = solve_lowest(&ham, 50, 1e-10).unwrap();
    for (a, b) in dense.values.iter().zip(&iterative.values) {
        assert!((a - b).abs() < 1e-9, "dense {a} vs davidson {b}");
    }
}
