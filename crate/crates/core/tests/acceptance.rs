//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Oracles here are written against raw indices and definitions rather than
//! the library's helpers wherever the library result is what is being judged.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use eprkit::antilinear::{self, AntilinearMap};
use eprkit::channel::{canonical_decomposition, channel_from_density, channel_from_vectors, ChannelMap};
use eprkit::linalg::{self, c64, ComplexMatrix, ComplexVector, ONE, ZERO};
use eprkit::modular;
use eprkit::smap::{self, Direction};
use eprkit::states::{self, bell_state, Seed};
use eprkit::teleport::{self, MeasurementBasis};
use eprkit::PureState;

type Rng = rand_chacha::ChaCha20Rng;
type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

struct Max {
    value: f64,
}

impl Max {
    fn new() -> Self {
        Self { value: 0.0 }
    }

    fn push(&mut self, x: f64) {
        if x.is_nan() || x > self.value {
            self.value = if x.is_nan() { f64::INFINITY } else { x };
        }
    }
}

fn within(label: &str, max: f64, tol: f64) -> Verdict {
    if max < tol {
        Ok(format!("{label} {max:.2e} < {tol:.0e}"))
    } else {
        Err(format!("{label} {max:.3e} >= {tol:.0e}"))
    }
}

fn all(parts: Vec<Verdict>) -> Verdict {
    let failed: Vec<String> = parts.iter().filter_map(|p| p.as_ref().err().cloned()).collect();
    let text: Vec<String> = parts.into_iter().map(|p| p.unwrap_or_else(|e| e)).collect();
    if failed.is_empty() {
        Ok(text.join("; "))
    } else {
        Err(text.join("; "))
    }
}

fn rng(criterion: u64) -> Rng {
    Seed(0xACCE_0000 + criterion).rng()
}

fn state(dims: &[usize], rng: &mut Rng) -> PureState {
    states::random_pure(dims, rng).unwrap()
}

/// `ψ[a·dB + b]` as a `dA×dB` array, by index.
fn coeff(psi: &PureState, a: usize, b: usize) -> c64 {
    let db = psi.factor_dims()[1];
    psi.amplitudes()[a * db + b]
}

fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    ComplexMatrix::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

fn proj(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_vec(a: &ComplexVector, b: &ComplexVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Partial trace over the second (`keep = 0`) or first (`keep = 1`) factor, by index.
fn ptrace(m: &ComplexMatrix, da: usize, db: usize, keep: usize) -> ComplexMatrix {
    if keep == 0 {
        ComplexMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum())
    } else {
        ComplexMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum())
    }
}

/// Projector onto eigenvectors with eigenvalue above `1e-9`.
fn support(m: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = linalg::eigh(m);
    let n = m.nrows();
    let mut p = ComplexMatrix::zeros(n, n);
    for (k, &l) in values.iter().enumerate() {
        if l > 1e-9 {
            let v = vectors.column(k).into_owned();
            p += proj(&v);
        }
    }
    p
}

/// PSD square root from the spectrum, negatives and noise clamped.
fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = linalg::eigh(m);
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &l) in values.iter().enumerate() {
        if l > 1e-14 {
            let v = vectors.column(k).into_owned();
            out += proj(&v) * c64::new(l.sqrt(), 0.0);
        }
    }
    out
}

fn haar_basis(da: usize, db: usize, rng: &mut Rng) -> MeasurementBasis {
    let u = states::haar_unitary(da * db, rng);
    let vectors = (0..da * db)
        .map(|k| PureState::normalize(vec![da, db], u.column(k).into_owned()).unwrap())
        .collect();
    MeasurementBasis::new(vectors).unwrap()
}

/// Kraus-level channel output `Σ_i K_i conj(ω) K_i†`.
fn channel_output(ch: &ChannelMap, omega: &ComplexMatrix) -> ComplexMatrix {
    ch.kraus()
        .iter()
        .map(|k| k.kmatrix() * omega.conjugate() * k.kmatrix().adjoint())
        .fold(ComplexMatrix::zeros(ch.dst_dim(), ch.dst_dim()), |acc, x| acc + x)
}

fn unit(d: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(j, k)] = ONE;
    m
}

fn c1_measurement_smap() -> Verdict {
    let mut rng = rng(1);
    let mut max = Max::new();
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..100 {
            let psi = state(&[da, db], &mut rng);
            let phi = states::random_unit_vector(da, &mut rng);
            // (|φ⟩⟨φ| ⊗ 1)ψ by components
            let mut direct = ComplexVector::zeros(da * db);
            for a in 0..da {
                for b in 0..db {
                    let overlap: c64 = (0..da).map(|a2| phi[a2].conj() * coeff(&psi, a2, b)).sum();
                    direct[a * db + b] = phi[a] * overlap;
                }
            }
            let s = smap::smap(&psi, Direction::BA).unwrap();
            let via_smap = kron_vec(&phi, &s.apply(&phi).unwrap());
            max.push(max_diff_vec(&direct, &via_smap));
        }
    }
    within("max error", max.value, 1e-10)
}

fn c2_decomposition_independence() -> Verdict {
    let mut rng = rng(2);
    let mut smap_max = Max::new();
    let mut channel_max = Max::new();
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for trial in 0..100 {
            let psi = state(&[da, db], &mut rng);
            let raw = smap::smap(&psi, Direction::BA).unwrap();
            let terms = smap::schmidt(&psi).unwrap().terms();
            // s^{BA} = Σ_j √p_j |φ_j^B⟩⟨conj φ_j^A| in K form
            let mut k = ComplexMatrix::zeros(db, da);
            for (a, b) in &terms {
                k += b * a.transpose();
            }
            smap_max.push(max_diff(raw.kmatrix(), &k));

            let rank = 1 + trial % (da * db);
            let rho = states::random_density(&[da, db], rank, &mut rng).unwrap();
            let base = canonical_decomposition(&rho);
            let m = base.len() + 2;
            let u = states::haar_unitary(m, &mut rng);
            let remixed: Vec<ComplexVector> = (0..m)
                .map(|i| (0..base.len()).fold(ComplexVector::zeros(da * db), |acc, k| acc + &base[k] * u[(i, k)]))
                .collect();
            let a = channel_from_density(&rho, Direction::BA).unwrap();
            let b = channel_from_vectors((da, db), &remixed, Direction::BA).unwrap();
            for j in 0..da {
                for l in 0..da {
                    let e = unit(da, j, l);
                    channel_max.push(max_diff(&channel_output(&a, &e), &channel_output(&b, &e)));
                }
            }
        }
    }
    all(vec![within("s-map", smap_max.value, 1e-12), within("channel", channel_max.value, 1e-9)])
}

fn c3_trace_formulas() -> Verdict {
    let mut rng = rng(3);
    let mut max = Max::new();
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..100 {
            let psi = state(&[da, db], &mut rng);
            let phi = state(&[da, db], &mut rng);
            let expected: c64 = psi.amplitudes().iter().zip(phi.amplitudes().iter()).map(|(x, y)| x.conj() * y).sum();
            let got = smap::overlap_via_smaps(&phi, &psi).unwrap();
            max.push((got.trace_a - expected).norm());
            max.push((got.trace_b - expected).norm());
        }
    }
    within("max error", max.value, 1e-10)
}

fn c4_polar_structure() -> Verdict {
    let mut rng = rng(4);
    let mut traces = Max::new();
    let mut polar = Max::new();
    let mut supports = Max::new();
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for trial in 0..100 {
            let psi = if trial % 4 == 3 {
                // Schmidt rank one below full
                let r = da.min(db) - 1;
                let c = states::ginibre(da, r, &mut rng) * states::ginibre(r, db, &mut rng);
                PureState::normalize(vec![da, db], ComplexVector::from_iterator(da * db, c.transpose().iter().copied())).unwrap()
            } else {
                state(&[da, db], &mut rng)
            };
            let rho = proj(psi.amplitudes());
            let rho_a = ptrace(&rho, da, db, 0);
            let rho_b = ptrace(&rho, da, db, 1);
            let s_ba = smap::smap(&psi, Direction::BA).unwrap();
            let s_ab = smap::smap(&psi, Direction::AB).unwrap();
            traces.push(max_diff(&antilinear::compose_anti_anti(&s_ab, &s_ba).unwrap(), &rho_a));
            traces.push(max_diff(&antilinear::compose_anti_anti(&s_ba, &s_ab).unwrap(), &rho_b));

            let j = smap::polar_jmaps(&psi).unwrap();
            // s = j √ρ^A in K form: K_s = K_j conj(√ρ^A); s = √ρ^B j: K_s = √ρ^B K_j
            polar.push(max_diff(s_ba.kmatrix(), &(j.ba.kmatrix() * sqrt_psd(&rho_a).conjugate())));
            polar.push(max_diff(s_ba.kmatrix(), &(sqrt_psd(&rho_b) * j.ba.kmatrix())));
            let jab_jba = j.ab.kmatrix() * j.ba.kmatrix().conjugate();
            let jba_jab = j.ba.kmatrix() * j.ab.kmatrix().conjugate();
            supports.push(max_diff(&jab_jba, &support(&rho_a)));
            supports.push(max_diff(&jba_jab, &support(&rho_b)));
        }
    }
    all(vec![
        within("s∘s* vs partial trace", traces.value, 1e-10),
        within("polar", polar.value, 1e-9),
        within("support", supports.value, 1e-9),
    ])
}

fn c5_lueders() -> Verdict {
    let mut rng = rng(5);
    let mut max = Max::new();
    let mut deficient = 0;
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for trial in 0..100 {
            let rank = 1 + trial % (da * db);
            if rank < da * db {
                deficient += 1;
            }
            let rho = states::random_density(&[da, db], rank, &mut rng).unwrap();
            let phi = states::random_unit_vector(da, &mut rng);
            let pi = proj(&phi);
            let lift = kron(&pi, &ComplexMatrix::identity(db, db));
            let lhs = &lift * rho.matrix() * &lift;
            let ch = channel_from_density(&rho, Direction::BA).unwrap();
            let rhs = kron(&pi, &ch.apply(&pi).unwrap());
            max.push(max_diff(&lhs, &rhs));
        }
    }
    within(&format!("max error ({deficient} rank-deficient)"), max.value, 1e-10)
}

fn c6_duality() -> Verdict {
    let mut rng = rng(6);
    let mut max = Max::new();
    let dims = [(2, 2), (2, 3), (3, 2)];
    for trial in 0..200 {
        let (da, db) = dims[trial % dims.len()];
        let rank = 1 + trial % (da * db);
        let rho = states::random_density(&[da, db], rank, &mut rng).unwrap();
        let ch = channel_from_density(&rho, Direction::BA).unwrap();
        let y = states::random_hermitian(db, &mut rng);
        let pi = proj(&states::random_unit_vector(da, &mut rng));
        let x = ch.dual(&y).unwrap();
        let lhs = (&pi * x).trace();
        let rhs = (channel_output(&ch, &pi) * &y).trace();
        max.push((lhs - rhs).norm());
    }
    within("max error", max.value, 1e-10)
}

fn c7_tripartite() -> Verdict {
    let mut rng = rng(7);
    let mut max = Max::new();
    for (da, db, dc) in [(2, 2, 2), (2, 3, 3)] {
        for _ in 0..100 {
            let phi = states::random_unit_vector(da, &mut rng);
            let psi_bc = state(&[db, dc], &mut rng);
            let basis = haar_basis(da, db, &mut rng);
            let joint = kron_vec(&phi, psi_bc.amplitudes());
            for psi_i in basis.vectors() {
                // (|ψ_i⟩⟨ψ_i| ⊗ 1_C) acting on φ ⊗ ψ^{BC}, contracted by index
                let mut projected = ComplexVector::zeros(da * db * dc);
                for c in 0..dc {
                    let amp: c64 = (0..da * db).map(|ab| psi_i.amplitudes()[ab].conj() * joint[ab * dc + c]).sum();
                    for ab in 0..da * db {
                        projected[ab * dc + c] = psi_i.amplitudes()[ab] * amp;
                    }
                }
                let t = teleport::teleport_map(&psi_bc, psi_i).unwrap();
                let predicted = kron_vec(psi_i.amplitudes(), &(&t * &phi));
                max.push(max_diff_vec(&projected, &predicted));
            }
        }
    }
    within("max error", max.value, 1e-10)
}

fn c8_trace_norm_fidelity() -> Verdict {
    let mut rng = rng(8);
    let mut max = Max::new();
    let dims = [(2, 2), (2, 3), (3, 2), (3, 3)];
    for trial in 0..100 {
        let (db, dc) = dims[trial % dims.len()];
        let da = 1 + trial % 3;
        let psi_bc = state(&[db, dc], &mut rng);
        let psi_ab = state(&[da, db], &mut rng);
        let t = teleport::teleport_map(&psi_bc, &psi_ab).unwrap();
        let trace_norm: f64 = linalg::singular_values(&t).iter().sum();
        let rho_i_b = ptrace(&proj(psi_ab.amplitudes()), da, db, 1);
        let rho_b = ptrace(&proj(psi_bc.amplitudes()), db, dc, 0);
        // √F = Tr √(√ρ1 ρ2 √ρ1), from the eigenvalues of the sandwich
        let r = sqrt_psd(&rho_i_b);
        let (values, _) = linalg::eigh(&(&r * &rho_b * &r));
        // roundoff-sized eigenvalues would otherwise contribute their square roots
        let floor = 64.0 * f64::EPSILON * values.iter().copied().fold(0.0, f64::max);
        let sqrt_fidelity: f64 = values.iter().filter(|&&l| l > floor).map(|&l| l.sqrt()).sum();
        max.push((trace_norm - sqrt_fidelity).abs());
    }
    within("max |‖t‖₁ − √F|", max.value, 1e-8)
}

fn c9_bell_teleportation() -> Verdict {
    let mut rng = rng(9);
    let basis = states::bell_basis();
    let ancilla = bell_state(0).unwrap();
    let corrections = teleport::derive_corrections(&ancilla, &basis).unwrap();
    let mut unitary = Max::new();
    let mut fidelity = Max::new();
    let mut probability = Max::new();
    let maps: Vec<ComplexMatrix> = basis.vectors().iter().map(|v| teleport::teleport_map(&ancilla, v).unwrap()).collect();
    for t in &maps {
        let u = t * c64::new(2.0, 0.0);
        unitary.push(max_diff(&(u.adjoint() * &u), &ComplexMatrix::identity(2, 2)));
    }
    for _ in 0..100 {
        let phi = states::random_unit_vector(2, &mut rng);
        for (t, u) in maps.iter().zip(&corrections) {
            let out = t * &phi;
            probability.push((out.norm_squared() - 0.25).abs());
            let corrected = u * &out;
            let f = phi.dotc(&corrected).norm_sqr() / corrected.norm_squared();
            fidelity.push((f - 1.0).abs());
        }
    }
    all(vec![
        within("2t_i unitary", unitary.value, 1e-10),
        within("fidelity", fidelity.value, 1e-9),
        within("probability", probability.value, 1e-10),
    ])
}

fn c10_stabilizer() -> Verdict {
    let mut rng = rng(10);
    let mut max = Max::new();
    for k in 0..4 {
        let bell = bell_state(k).unwrap();
        let j = smap::polar_jmaps(&bell).unwrap();
        for _ in 0..50 {
            let ua = states::haar_unitary(2, &mut rng);
            // j^{BA} ∘ U ∘ j^{AB}: K = K_ba conj(U) conj(K_ab)
            let ub = j.ba.kmatrix() * ua.conjugate() * j.ab.kmatrix().conjugate();
            let image = kron(&ua, &ub) * bell.amplitudes();
            max.push(max_diff_vec(&image, bell.amplitudes()));
        }
    }
    within("max error", max.value, 1e-9)
}

/// K-matrix of `m_AB ⊗̃ m_BA` from its action on product basis vectors.
fn twisted_oracle(m_ab: &AntilinearMap, m_ba: &AntilinearMap) -> ComplexMatrix {
    let (da, db) = (m_ab.dst_dim(), m_ab.src_dim());
    let mut k = ComplexMatrix::zeros(da * db, da * db);
    for a in 0..da {
        for b in 0..db {
            let image = kron_vec(
                &m_ab.apply(&linalg::basis_vector(db, b)).unwrap(),
                &m_ba.apply(&linalg::basis_vector(da, a)).unwrap(),
            );
            k.set_column(a * db + b, &image);
        }
    }
    k
}

fn c11_modular() -> Verdict {
    let mut rng = rng(11);
    let mut involution = Max::new();
    let mut antiunitary = Max::new();
    let mut pattern = Max::new();
    let mut ds_first = Max::new();
    let mut ds_second = Max::new();
    let mut ds_second_swapped = Max::new();
    for (da, db) in [(2, 2), (3, 3), (2, 3)] {
        for _ in 0..20 {
            let full = state(&[da, db], &mut rng);
            let deficient = {
                let c = states::ginibre(da, 1, &mut rng) * states::ginibre(1, db, &mut rng);
                PureState::normalize(vec![da, db], ComplexVector::from_iterator(da * db, c.transpose().iter().copied())).unwrap()
            };
            for psi in [&full, &deficient] {
                let j = modular::modular_conjugation(psi).unwrap();
                let rho = proj(psi.amplitudes());
                let p = kron(&support(&ptrace(&rho, da, db, 0)), &support(&ptrace(&rho, da, db, 1)));
                involution.push(max_diff(&(j.kmatrix() * j.kmatrix().conjugate()), &p));
                for _ in 0..5 {
                    let x = &p * states::random_unit_vector(da * db, &mut rng);
                    let y = &p * states::random_unit_vector(da * db, &mut rng);
                    let lhs = j.apply(&x).unwrap().dotc(&j.apply(&y).unwrap());
                    antiunitary.push((lhs - y.dotc(&x)).norm());
                }
                // J(φ_j^A ⊗ φ_k^B) against φ_k^A ⊗ φ_j^B or 0, entry by entry
                let d = smap::schmidt(psi).unwrap();
                let live = |i: usize| d.coefficients.get(i).is_some_and(|&w| w > 1e-9);
                for jj in 0..da {
                    for kk in 0..db {
                        let image = j.apply(&kron_vec(&d.left_vector(jj), &d.right_vector(kk))).unwrap();
                        for k2 in 0..da {
                            for j2 in 0..db {
                                let entry = kron_vec(&d.left_vector(k2), &d.right_vector(j2)).dotc(&image);
                                let expected = if live(jj) && live(kk) && k2 == kk && j2 == jj { ONE } else { ZERO };
                                pattern.push((entry - expected).norm());
                            }
                        }
                    }
                }
            }
            if da == db {
                let psi = &full;
                let rho = proj(psi.amplitudes());
                let rho_a = ptrace(&rho, da, db, 0);
                let rho_b = ptrace(&rho, da, db, 1);
                let s_ba = smap::smap(psi, Direction::BA).unwrap();
                let s_ab = smap::smap(psi, Direction::AB).unwrap();
                let jm = smap::polar_jmaps(psi).unwrap();
                let j_tilde_s = twisted_oracle(&jm.ab, &s_ba);
                let s_tilde_j = twisted_oracle(&s_ab, &jm.ba);
                let j_tilde_j = twisted_oracle(&jm.ab, &jm.ba);
                let rho_b_inv = {
                    let (values, vectors) = linalg::eigh(&rho_b);
                    let mut inv = ComplexMatrix::zeros(db, db);
                    for (k, &l) in values.iter().enumerate() {
                        let v = vectors.column(k).into_owned();
                        inv += proj(&v) * c64::new(1.0 / l, 0.0);
                    }
                    inv
                };
                let root_delta = sqrt_psd(&kron(&rho_a, &rho_b_inv));
                // S = J √Δ, then S ∘ (1 ⊗ √ρ^B); antilinear-after-linear conjugates the linear factor
                let k_s = &j_tilde_j * root_delta.conjugate();
                let lift = kron(&ComplexMatrix::identity(da, da), &sqrt_psd(&rho_b));
                let second_lhs = &k_s * lift.conjugate();
                ds_first.push(max_diff(&(&root_delta * &j_tilde_s), &s_tilde_j));
                ds_second.push(max_diff(&second_lhs, &s_tilde_j));
                ds_second_swapped.push(max_diff(&second_lhs, &j_tilde_s));
                // the library's own report must agree with this oracle
                let report = modular::verify_ds_relations(psi).unwrap();
                assert!((report.second_literal.full - max_diff(&second_lhs, &s_tilde_j)).abs() < 1e-9);
            }
        }
    }
    let verdict = all(vec![
        within("J²=P", involution.value, 1e-9),
        within("antiunitary", antiunitary.value, 1e-9),
        within("Schmidt pattern", pattern.value, 1e-9),
        within("√Δ(j⊗̃s)=s⊗̃j", ds_first.value, 1e-9),
        within("S(1⊗√ρB)=s⊗̃j", ds_second.value, 1e-9),
    ]);
    let note = format!(" [diagnostic: S(1⊗√ρB)=j⊗̃s holds to {:.2e}]", ds_second_swapped.value);
    verdict.map(|s| s + &note).map_err(|s| s + &note)
}

fn c12_copositivity() -> Verdict {
    let mut rng = rng(12);
    let mut worst = f64::INFINITY;
    for (da, db) in [(2, 2), (2, 3)] {
        for trial in 0..50 {
            let rank = 1 + trial % (da * db);
            let rho = states::random_density(&[da, db], rank, &mut rng).unwrap();
            let ch = channel_from_density(&rho, Direction::BA).unwrap();
            // Choi of ω ↦ Φ(conj ω); conj of a real matrix unit is itself
            let mut choi = ComplexMatrix::zeros(da * db, da * db);
            for j in 0..da {
                for k in 0..da {
                    let e = unit(da, j, k);
                    choi += kron(&e, &channel_output(&ch, &e.conjugate()));
                }
            }
            let (values, _) = linalg::eigh(&choi);
            worst = worst.min(values.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    if worst > -1e-9 {
        Ok(format!("min eigenvalue {worst:.2e} > -1e-9"))
    } else {
        Err(format!("min eigenvalue {worst:.3e} <= -1e-9"))
    }
}

fn c13_cli() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_eprkit");
    let verify = Command::new(bin).args(["verify", "all", "--seed", "7"]).env_remove("EPRKIT_SEED").output().unwrap();
    let verify_code = verify.status.code();
    let sweep = Command::new(bin)
        .args(["teleport", "sweep", "--werner-p", "0,0.25,0.5,0.75,1"])
        .output()
        .unwrap();
    let text = String::from_utf8(sweep.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = header.iter().position(|&h| h == "corrected_fidelity");
    let p_col = header.iter().position(|&h| h == "p");
    let (Some(col), Some(p_col)) = (col, p_col) else {
        return Err(format!("missing columns in header {header:?}"));
    };
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let fid: Vec<f64> = rows.iter().map(|r| r[col]).collect();
    // rows at equal p agree up to rounding; allow that and nothing more
    let monotone = fid.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let endpoint = rows
        .iter()
        .filter(|r| r[p_col] == 1.0)
        .map(|r| (r[col] - 1.0).abs())
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    let mut parts = vec![if verify_code == Some(0) {
        Ok("verify all exit 0".to_string())
    } else {
        Err(format!("verify all exit {verify_code:?}"))
    }];
    parts.push(if sweep.status.code() == Some(0) && monotone {
        Ok(format!("sweep monotone over {} rows", fid.len()))
    } else {
        Err(format!("sweep exit {:?}, monotone {monotone}", sweep.status.code()))
    });
    parts.push(match endpoint {
        Some(e) => within("|F(p=1) − 1|", e, 1e-9),
        None => Err("no p=1 rows".into()),
    });
    all(parts)
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "measurement via s-map", c1_measurement_smap),
        (2, "decomposition independence", c2_decomposition_independence),
        (3, "trace formulas for the inner product", c3_trace_formulas),
        (4, "partial traces, polar factorizations, supports", c4_polar_structure),
        (5, "Lüders factorization", c5_lueders),
        (6, "channel duality", c6_duality),
        (7, "tripartite projection", c7_tripartite),
        (8, "trace norm equals root fidelity", c8_trace_norm_fidelity),
        (9, "Bell/Bell teleportation", c9_bell_teleportation),
        (10, "local stabilizer", c10_stabilizer),
        (11, "modular conjugation and S", c11_modular),
        (12, "complete *-copositivity", c12_copositivity),
        (13, "CLI end to end", c13_cli),
    ];
    let mut failures = 0;
    for (n, name, run) in criteria {
        let start = std::time::Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} ({elapsed:.1}s)"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail} ({elapsed:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 13 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
