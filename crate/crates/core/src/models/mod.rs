//! Impurity models and Hamiltonian assembly.
//!
//! Assembles system + thermofield-chain Hamiltonians in a single-particle
//! (quadratic) representation for the free-fermion backend and as
//! second-quantized operators over a Fock layout for the
//! exact-diagonalization backend. Chain sites of the two branches are
//! interleaved behind the system block.

pub mod fock;

use crate::environment::{BranchCoefficients, ChainBranch, ChainCoefficients, Statistics};
use crate::error::ModelError;
use crate::numerics::{CMat, C64};
use fock::{FockBasis, Layout, Op, OpKind, Operator, SiteKind};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const DEFAULT_FOCK_CAP: usize = 2_000_000;
pub const DEFAULT_BOSON_CUTOFF: usize = 3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub enum ModelVariant {
    /// Single fermionic mode at energy `epsilon`, coupled via `Q = f`.
    ResonantLevel { epsilon: f64 },
    /// Two fermionic modes with hopping `t_c` and density-density
    /// interaction `u`; only mode 1 couples to the environment.
    TwoMode { t_c: f64, u: f64 },
    /// Particle-hole symmetric Anderson impurity: two spin-orbitals, each
    /// with its own two-branch environment.
    Siam { u: f64 },
    /// Spin-1/2 with bias `omega_q` and tunneling `delta`, coupled to a
    /// bosonic chain via `Q = S_z`.
    SpinBoson { omega_q: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: ModelVariant,
}

/// Tags for the system operators the correlator pipeline may apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorTag {
    /// Annihilation on system mode `i`.
    Annihilate(usize),
    /// Creation on system mode `i`.
    Create(usize),
    /// `S_z` on the spin site.
    Sz,
}

impl OperatorTag {
    pub fn odd_fermionic(&self) -> bool {
        matches!(self, OperatorTag::Annihilate(_) | OperatorTag::Create(_))
    }
}

impl ModelSpec {
    pub fn statistics(&self) -> Statistics {
        match self.variant {
            ModelVariant::SpinBoson { .. } => Statistics::Boson,
            _ => Statistics::Fermion,
        }
    }

    /// Number of system sites in the Fock layout.
    pub fn system_sites(&self) -> usize {
        match self.variant {
            ModelVariant::ResonantLevel { .. } | ModelVariant::SpinBoson { .. } => 1,
            ModelVariant::TwoMode { .. } | ModelVariant::Siam { .. } => 2,
        }
    }

    /// Reduced system Hilbert-space dimension.
    pub fn system_dim(&self) -> usize {
        1 << self.system_sites()
    }

    /// Number of independent environments (each with two thermofield
    /// branches). The SIAM couples one environment per spin.
    pub fn n_environments(&self) -> usize {
        match self.variant {
            ModelVariant::Siam { .. } => 2,
            _ => 1,
        }
    }

    pub fn quadratic(&self) -> bool {
        matches!(self.variant, ModelVariant::ResonantLevel { .. })
    }

    pub fn registered_operators(&self) -> Vec<OperatorTag> {
        match self.variant {
            ModelVariant::ResonantLevel { .. } => {
                vec![OperatorTag::Annihilate(0), OperatorTag::Create(0)]
            }
            ModelVariant::TwoMode { .. } | ModelVariant::Siam { .. } => vec![
                OperatorTag::Annihilate(0),
                OperatorTag::Create(0),
                OperatorTag::Annihilate(1),
                OperatorTag::Create(1),
            ],
            ModelVariant::SpinBoson { .. } => vec![OperatorTag::Sz],
        }
    }

    pub fn validate_operator(&self, tag: OperatorTag) -> Result<(), ModelError> {
        if self.registered_operators().contains(&tag) {
            Ok(())
        } else {
            Err(ModelError::UnregisteredOperator(format!("{tag:?}")))
        }
    }
}

/// Interleaved environment ordering: branch-1 and branch-2 sites alternate,
/// `(1,0), (2,0), (1,1), (2,1), ...`; a lone active branch stays sequential.
pub fn env_site_order(chains: &ChainCoefficients) -> Vec<(usize, usize)> {
    let active = chains.active_branches();
    match active.len() {
        0 => Vec::new(),
        1 => {
            let (b, chain) = active[0];
            (0..chain.len()).map(|n| (b, n)).collect()
        }
        _ => {
            let len1 = active[0].1.len();
            let len2 = active[1].1.len();
            let mut order = Vec::with_capacity(len1 + len2);
            for n in 0..len1.max(len2) {
                if n < len1 {
                    order.push((active[0].0, n));
                }
                if n < len2 {
                    order.push((active[1].0, n));
                }
            }
            order
        }
    }
}

fn branch<'a>(chains: &'a ChainCoefficients, idx: usize) -> &'a ChainBranch {
    let b = if idx == 1 {
        &chains.branch1
    } else {
        &chains.branch2
    };
    match b {
        BranchCoefficients::Active(c) => c,
        BranchCoefficients::Empty => unreachable!("empty branch in site order"),
    }
}

/// Quadratic single-particle Hamiltonian for the resonant level model:
/// impurity at index 0, chain sites interleaved behind it.
pub fn assemble_single_particle(
    model: &ModelSpec,
    chains: &ChainCoefficients,
) -> Result<CMat, ModelError> {
    let ModelVariant::ResonantLevel { epsilon } = model.variant else {
        return Err(ModelError::RepresentationMismatch(format!(
            "quadratic representation requires the resonant level model, got {:?}",
            model.variant
        )));
    };
    let order = env_site_order(chains);
    let n = 1 + order.len();
    let mut h = CMat::zeros(n, n);
    h[(0, 0)] = C64::new(epsilon, 0.0);
    let pos = |target: (usize, usize)| -> usize {
        1 + order.iter().position(|&x| x == target).unwrap()
    };
    for (k, &(b, site)) in order.iter().enumerate() {
        let chain = branch(chains, b);
        let p = 1 + k;
        h[(p, p)] = C64::new(chain.onsite[site], 0.0);
        if site == 0 {
            h[(0, p)] = C64::new(chain.coupling, 0.0);
            h[(p, 0)] = C64::new(chain.coupling, 0.0);
        }
        if site + 1 < chain.len() {
            let q = pos((b, site + 1));
            let g = chain.hopping[site];
            h[(p, q)] = C64::new(g, 0.0);
            h[(q, p)] = C64::new(g, 0.0);
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FockAssemblyOptions {
    /// Maximum occupancy per bosonic site; local dimension is `cutoff + 1`.
    pub boson_cutoff: Option<usize>,
    /// Add one replica site per system site for Choi-state map extraction.
    pub with_replicas: bool,
    /// Add one ancilla site per system site for state purification.
    pub with_ancillas: bool,
    pub fock_cap: Option<usize>,
}

/// Assembled many-body model: layout, Hamiltonian terms, and block
/// boundaries. The Hamiltonian acts on system and environment sites only;
/// replica and ancilla sites are untouched apart from Jordan-Wigner strings.
#[derive(Debug)]
pub struct FockModel {
    pub spec: ModelSpec,
    pub layout: Arc<Layout>,
    pub hamiltonian: Operator,
    pub system_sites: usize,
    pub replica_sites: usize,
    pub env_sites: usize,
    pub ancilla_sites: usize,
    pub fock_cap: usize,
    /// Thermofield-vacuum occupation pattern of the environment block.
    pub env_vacuum_code: u64,
    /// Largest hopping scale, for the finite-size horizon.
    pub max_hopping: f64,
}

impl FockModel {
    pub fn system_dim(&self) -> usize {
        self.layout.prefix_dim(self.system_sites)
    }

    pub fn env_offset(&self) -> usize {
        self.system_sites + self.replica_sites
    }

    /// Fock code of a product state: system prefix rank `sys_idx`, replicas
    /// and ancillas empty, environment in the thermofield vacuum.
    pub fn product_code(&self, sys_idx: usize) -> u64 {
        self.layout.code_from_prefix(sys_idx, self.system_sites) | self.env_vacuum_code
    }

    /// System operator for a registered tag, matrix-local on the system
    /// block (Jordan-Wigner strings run inside the block only).
    pub fn system_operator(&self, tag: OperatorTag) -> Result<Operator, ModelError> {
        self.spec.validate_operator(tag)?;
        let mut op = Operator::new();
        match tag {
            OperatorTag::Annihilate(i) => {
                op.add_real(1.0, vec![Op { site: i, kind: OpKind::Annihilate }]);
            }
            OperatorTag::Create(i) => {
                op.add_real(1.0, vec![Op { site: i, kind: OpKind::Create }]);
            }
            OperatorTag::Sz => {
                op.add_real(1.0, vec![Op { site: 0, kind: OpKind::SzHalf }]);
            }
        }
        Ok(op)
    }

    /// Sites entering the system parity operator `(-1)^{N_S}`.
    pub fn system_parity_sites(&self) -> Vec<usize> {
        if self.spec.statistics() == Statistics::Fermion {
            (0..self.system_sites).collect()
        } else {
            Vec::new()
        }
    }

    /// Parity weights of the reduced-system basis, `(-1)^{N_S}`.
    pub fn system_parity_diagonal(&self) -> Vec<f64> {
        let d = self.system_dim();
        (0..d)
            .map(|idx| {
                let code = self.layout.code_from_prefix(idx, self.system_sites);
                let n: u64 = (0..self.system_sites)
                    .map(|s| self.layout.digit(code, s))
                    .sum();
                if n % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    }

    /// Total-occupation operator over system + environment (conserved for
    /// the fermionic variants).
    pub fn total_number_operator(&self) -> Operator {
        let mut op = Operator::new();
        for s in 0..self.system_sites {
            op.add_number(s, 1.0);
        }
        let off = self.env_offset();
        for s in off..off + self.env_sites {
            op.add_number(s, 1.0);
        }
        op
    }

    pub fn full_basis(&self) -> Result<FockBasis, ModelError> {
        FockBasis::full(self.layout.clone(), self.fock_cap)
    }
}

/// Assemble the many-body Hamiltonian over the occupation basis.
///
/// Layout order: system sites, replica sites (optional), environment chains
/// (one block per environment, branches interleaved), ancilla sites
/// (optional). Bosonic branch-2 onsite energies carry the thermofield sign
/// flip; the accompanying hopping sign is gauged away.
pub fn assemble_fock(
    model: &ModelSpec,
    chains: &[ChainCoefficients],
    options: FockAssemblyOptions,
) -> Result<FockModel, ModelError> {
    let cutoff = options.boson_cutoff.unwrap_or(DEFAULT_BOSON_CUTOFF);
    if model.statistics() == Statistics::Boson && cutoff < 1 {
        return Err(ModelError::BadCutoff(cutoff));
    }
    assert_eq!(
        chains.len(),
        model.n_environments(),
        "one chain set per environment"
    );

    let n_sys = model.system_sites();
    let sys_kind = match model.statistics() {
        Statistics::Fermion => SiteKind::Fermion,
        Statistics::Boson => SiteKind::Spin,
    };
    let env_kind = match model.statistics() {
        Statistics::Fermion => SiteKind::Fermion,
        Statistics::Boson => SiteKind::Boson { dim: cutoff + 1 },
    };

    let mut sites = vec![sys_kind; n_sys];
    let replica_sites = if options.with_replicas { n_sys } else { 0 };
    sites.extend(std::iter::repeat(sys_kind).take(replica_sites));

    let orders: Vec<Vec<(usize, usize)>> = chains.iter().map(env_site_order).collect();
    let env_sites: usize = orders.iter().map(|o| o.len()).sum();
    sites.extend(std::iter::repeat(env_kind).take(env_sites));

    let ancilla_sites = if options.with_ancillas { n_sys } else { 0 };
    sites.extend(std::iter::repeat(sys_kind).take(ancilla_sites));

    let layout = Arc::new(Layout::new(sites));
    let env_offset = n_sys + replica_sites;

    let mut h = Operator::new();
    match model.variant {
        ModelVariant::ResonantLevel { epsilon } => {
            h.add_number(0, epsilon);
        }
        ModelVariant::TwoMode { t_c, u } => {
            h.add_hopping(0, 1, t_c);
            h.add_real(
                u,
                vec![
                    Op { site: 0, kind: OpKind::Number },
                    Op { site: 1, kind: OpKind::Number },
                ],
            );
        }
        ModelVariant::Siam { u } => {
            h.add_real(
                u,
                vec![
                    Op { site: 0, kind: OpKind::Number },
                    Op { site: 1, kind: OpKind::Number },
                ],
            );
            h.add_number(0, -u / 2.0);
            h.add_number(1, -u / 2.0);
        }
        ModelVariant::SpinBoson { omega_q, delta } => {
            h.add_real(omega_q, vec![Op { site: 0, kind: OpKind::SzHalf }]);
            h.add_real(delta / 2.0, vec![Op { site: 0, kind: OpKind::Create }]);
            h.add_real(delta / 2.0, vec![Op { site: 0, kind: OpKind::Annihilate }]);
        }
    }

    let mut env_vacuum_code = 0u64;
    let mut max_hopping: f64 = 0.0;
    let mut block_start = env_offset;
    for (env_idx, (chain_set, order)) in chains.iter().zip(&orders).enumerate() {
        let pos = |target: (usize, usize)| -> usize {
            block_start + order.iter().position(|&x| x == target).unwrap()
        };
        for (k, &(b, site)) in order.iter().enumerate() {
            let chain = branch(chain_set, b);
            let p = block_start + k;
            let sign = if b == 2 && model.statistics() == Statistics::Boson {
                -1.0
            } else {
                1.0
            };
            if chain.onsite[site] != 0.0 {
                h.add_number(p, sign * chain.onsite[site]);
            }
            if site + 1 < chain.len() {
                h.add_hopping(pos((b, site + 1)), p, chain.hopping[site]);
            }
            if site == 0 {
                add_system_coupling(&mut h, model, env_idx, p, chain.coupling);
            }
            if b == 2 && model.statistics() == Statistics::Fermion {
                let mut code = 0u64;
                code = layout.with_digit(code, p, 1);
                env_vacuum_code |= code;
            }
        }
        max_hopping = max_hopping.max(chain_set.max_hopping());
        block_start += order.len();
    }

    Ok(FockModel {
        spec: *model,
        layout,
        hamiltonian: h,
        system_sites: n_sys,
        replica_sites,
        env_sites,
        ancilla_sites,
        fock_cap: options.fock_cap.unwrap_or(DEFAULT_FOCK_CAP),
        env_vacuum_code,
        max_hopping,
    })
}

fn add_system_coupling(h: &mut Operator, model: &ModelSpec, env_idx: usize, head: usize, g: f64) {
    match model.variant {
        ModelVariant::ResonantLevel { .. } | ModelVariant::TwoMode { .. } => {
            h.add_hopping(0, head, g);
        }
        ModelVariant::Siam { .. } => {
            h.add_hopping(env_idx, head, g);
        }
        ModelVariant::SpinBoson { .. } => {
            h.add_real(
                g,
                vec![
                    Op { site: 0, kind: OpKind::SzHalf },
                    Op { site: head, kind: OpKind::Create },
                ],
            );
            h.add_real(
                g,
                vec![
                    Op { site: 0, kind: OpKind::SzHalf },
                    Op { site: head, kind: OpKind::Annihilate },
                ],
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{BranchCoefficients, ChainBranch};
    use crate::numerics::{frobenius, hermitian_eigen, CVec};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rlm(epsilon: f64) -> ModelSpec {
        ModelSpec {
            variant: ModelVariant::ResonantLevel { epsilon },
        }
    }

    fn toy_chains(n_b: usize) -> ChainCoefficients {
        let mk = |coupling: f64, base: f64| ChainBranch {
            coupling,
            onsite: (0..n_b).map(|n| base + 0.01 * n as f64).collect(),
            hopping: (0..n_b.saturating_sub(1))
                .map(|n| 0.5 - 0.01 * n as f64)
                .collect(),
        };
        ChainCoefficients {
            branch1: BranchCoefficients::Active(mk(0.12, 0.3)),
            branch2: BranchCoefficients::Active(mk(0.09, -0.3)),
            statistics: Statistics::Fermion,
            n_b,
        }
    }

    #[test]
    fn isolated_impurity_is_one_by_one() {
        let chains = ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.1,
                onsite: vec![],
                hopping: vec![],
            }),
            branch2: BranchCoefficients::Empty,
            statistics: Statistics::Fermion,
            n_b: 0,
        };
        let h = assemble_single_particle(&rlm(0.1), &chains).unwrap();
        assert_eq!(h.nrows(), 1);
        assert_abs_diff_eq!(h[(0, 0)].re, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn one_site_per_branch_structure() {
        let chains = toy_chains(1);
        let h = assemble_single_particle(&rlm(0.1), &chains).unwrap();
        assert_eq!(h.nrows(), 3);
        assert!(frobenius(&(h.adjoint() - &h)) < 1e-15);
        assert_abs_diff_eq!(h[(0, 1)].re, 0.12, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 2)].re, 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 1)].re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(2, 2)].re, -0.3, epsilon = 1e-15);
    }

    #[test]
    fn non_rlm_rejects_quadratic_representation() {
        let chains = toy_chains(1);
        let spec = ModelSpec {
            variant: ModelVariant::TwoMode { t_c: 0.05, u: 0.2 },
        };
        assert!(matches!(
            assemble_single_particle(&spec, &chains),
            Err(ModelError::RepresentationMismatch(_))
        ));
    }

    #[test]
    fn spin_boson_isolated_two_level_spectrum() {
        let spec = ModelSpec {
            variant: ModelVariant::SpinBoson {
                omega_q: 0.5,
                delta: 1.0,
            },
        };
        let chains = ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.0,
                onsite: vec![],
                hopping: vec![],
            }),
            branch2: BranchCoefficients::Empty,
            statistics: Statistics::Boson,
            n_b: 0,
        };
        let model = assemble_fock(&spec, &[chains], FockAssemblyOptions::default()).unwrap();
        let basis = model.full_basis().unwrap();
        let h = model.hamiltonian.matrix(&basis);
        let (vals, _) = hermitian_eigen(&h).unwrap();
        let expect = 0.5 * (0.25f64 + 1.0).sqrt();
        let mut v: Vec<f64> = vals.iter().cloned().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(v[0], -expect, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], expect, epsilon = 1e-12);
    }

    #[test]
    fn two_mode_isolated_spectrum() {
        // Eigenvalues {0, +-t_c, U} on {empty, singly occupied, doubly
        // occupied} states.
        let t_c = 0.05;
        let u = 0.2;
        let spec = ModelSpec {
            variant: ModelVariant::TwoMode { t_c, u },
        };
        let chains = ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.0,
                onsite: vec![],
                hopping: vec![],
            }),
            branch2: BranchCoefficients::Empty,
            statistics: Statistics::Fermion,
            n_b: 0,
        };
        let model = assemble_fock(&spec, &[chains], FockAssemblyOptions::default()).unwrap();
        let basis = model.full_basis().unwrap();
        let h = model.hamiltonian.matrix(&basis);
        let (vals, _) = hermitian_eigen(&h).unwrap();
        let mut v: Vec<f64> = vals.iter().cloned().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(v[0], -t_c, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], t_c, epsilon = 1e-12);
        assert_abs_diff_eq!(v[3], u, epsilon = 1e-12);
    }

    #[test]
    fn rlm_many_body_spectrum_is_subset_sums() {
        // Free-fermion oracle: the Fock spectrum equals all subset sums of
        // the single-particle eigenvalues.
        let chains = toy_chains(3);
        let spec = rlm(0.1);
        let h1 = assemble_single_particle(&spec, &chains).unwrap();
        let (sp, _) = hermitian_eigen(&h1).unwrap();
        let model = assemble_fock(&spec, &[chains], FockAssemblyOptions::default()).unwrap();
        let basis = model.full_basis().unwrap();
        assert_eq!(basis.len(), 1 << 7);
        let hm = model.hamiltonian.matrix(&basis);
        let (vals, _) = hermitian_eigen(&hm).unwrap();

        let mut subset_sums = Vec::with_capacity(1 << sp.len());
        for mask in 0..(1u32 << sp.len()) {
            let mut s = 0.0;
            for (k, e) in sp.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    s += e;
                }
            }
            subset_sums.push(s);
        }
        subset_sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut got: Vec<f64> = vals.iter().cloned().collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in got.iter().zip(&subset_sums) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn hamiltonian_action_is_hermitian_and_number_conserving() {
        let chains = toy_chains(2);
        let spec = ModelSpec {
            variant: ModelVariant::TwoMode { t_c: 0.05, u: 0.2 },
        };
        let model = assemble_fock(&spec, &[chains], FockAssemblyOptions::default()).unwrap();
        let basis = model.full_basis().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rand_state = |rng: &mut ChaCha8Rng, n: usize| {
            let mut v = CVec::from_fn(n, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let nn = v.norm();
            v /= C64::new(nn, 0.0);
            v
        };
        let x = rand_state(&mut rng, basis.len());
        let y = rand_state(&mut rng, basis.len());
        let hx = model.hamiltonian.apply(&basis, &x);
        let hy = model.hamiltonian.apply(&basis, &y);
        // <x|H|y> = conj(<y|H|x>)
        let lhs = fock::dot(&x, &hy);
        let rhs = fock::dot(&y, &hx).conj();
        assert!((lhs - rhs).norm() < 1e-12);

        // [H, N] = 0 on random vectors
        let num = model.total_number_operator();
        let hn = model.hamiltonian.apply(&basis, &num.apply(&basis, &x));
        let nh = num.apply(&basis, &model.hamiltonian.apply(&basis, &x));
        assert!((hn - nh).norm() < 1e-12);
    }

    #[test]
    fn siam_particle_hole_symmetry() {
        // Spectrum invariant under f_sigma <-> f_sigma^dag at mu = 0: the
        // spectrum is symmetric about its midpoint on small chains.
        let n_b = 1;
        let mk = || ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.3,
                onsite: vec![0.2],
                hopping: vec![],
            }),
            branch2: BranchCoefficients::Active(ChainBranch {
                coupling: 0.3,
                onsite: vec![-0.2],
                hopping: vec![],
            }),
            statistics: Statistics::Fermion,
            n_b,
        };
        let spec = ModelSpec {
            variant: ModelVariant::Siam { u: 0.785 },
        };
        let model = assemble_fock(&spec, &[mk(), mk()], FockAssemblyOptions::default()).unwrap();
        let basis = model.full_basis().unwrap();
        let h = model.hamiltonian.matrix(&basis);
        let (vals, _) = hermitian_eigen(&h).unwrap();
        let mut v: Vec<f64> = vals.iter().cloned().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = (v[0] + v[v.len() - 1]) / 2.0;
        for k in 0..v.len() {
            let mirror = 2.0 * mid - v[v.len() - 1 - k];
            assert!(
                (v[k] - mirror).abs() < 1e-10,
                "asymmetry at {k}: {} vs {mirror}",
                v[k]
            );
        }
    }

    #[test]
    fn operator_registry_validation() {
        let spec = rlm(0.1);
        assert!(spec.validate_operator(OperatorTag::Annihilate(0)).is_ok());
        assert!(matches!(
            spec.validate_operator(OperatorTag::Sz),
            Err(ModelError::UnregisteredOperator(_))
        ));
    }

    #[test]
    fn env_vacuum_fills_branch_two() {
        let chains = toy_chains(2);
        let model = assemble_fock(&rlm(0.0), &[chains], FockAssemblyOptions::default()).unwrap();
        // layout: [sys][b1_0, b2_0, b1_1, b2_1]; branch-2 sites at layout
        // positions 2 and 4
        let code = model.env_vacuum_code;
        assert_eq!(model.layout.digit(code, 0), 0);
        assert_eq!(model.layout.digit(code, 1), 0);
        assert_eq!(model.layout.digit(code, 2), 1);
        assert_eq!(model.layout.digit(code, 3), 0);
        assert_eq!(model.layout.digit(code, 4), 1);
    }
}
