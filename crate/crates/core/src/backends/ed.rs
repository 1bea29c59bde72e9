//! Truncated-Fock exact diagonalization backend with Krylov (Lanczos)
//! short-time propagation.

use super::{ComponentSeries, EvolverCaps, PerturbedSeries, TimeGrid};
use crate::error::BackendError;
use crate::models::fock::{
    apply_site_parity, dot, reduced_prefix_matrix, FockBasis, Operator,
};
use crate::models::{FockModel, OperatorTag};
use crate::numerics::{CMat, CVec, C64};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const DEFAULT_KRYLOV_DIM: usize = 30;
pub const DEFAULT_KRYLOV_TOL: f64 = 1e-10;

/// Pure state over an enumerated Fock basis. `amps` need not be normalized
/// (perturbed objects carry their operator norm).
#[derive(Debug, Clone)]
pub struct FockStateVector {
    pub basis: Arc<FockBasis>,
    pub amps: CVec,
    pub time: f64,
}

impl FockStateVector {
    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }
}

pub struct EdBackend {
    model: Arc<FockModel>,
    dt: f64,
    krylov_dim: usize,
    krylov_tol: f64,
}

impl EdBackend {
    pub fn new(model: FockModel, dt: f64) -> Self {
        Self {
            model: Arc::new(model),
            dt,
            krylov_dim: DEFAULT_KRYLOV_DIM,
            krylov_tol: DEFAULT_KRYLOV_TOL,
        }
    }

    pub fn with_krylov(mut self, dim: usize, tol: f64) -> Self {
        self.krylov_dim = dim.max(2);
        self.krylov_tol = tol;
        self
    }

    pub fn model(&self) -> &FockModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn caps(&self) -> EvolverCaps {
        EvolverCaps {
            supports_choi_replicas: self.model.replica_sites > 0,
            supports_interactions: true,
            supports_bosons: true,
            dt: self.dt,
        }
    }

    pub fn system_dim(&self) -> usize {
        self.model.system_dim()
    }

    pub fn horizon(&self) -> f64 {
        let n_b = self.model.env_sites / (2 * self.model.spec.n_environments()).max(1);
        super::finite_size_horizon(n_b.max(1), self.model.max_hopping, super::HORIZON_SAFETY)
    }

    /// Product basis state: system prefix rank, environment in the
    /// thermofield vacuum, replicas/ancillas empty.
    pub fn basis_state(&self, sys_idx: usize) -> Result<FockStateVector, BackendError> {
        let seed = self.model.product_code(sys_idx);
        self.state_from_amplitudes([(seed, C64::new(1.0, 0.0))].into_iter().collect(), 0.0)
    }

    fn state_from_amplitudes(
        &self,
        amps: BTreeMap<u64, C64>,
        time: f64,
    ) -> Result<FockStateVector, BackendError> {
        let seeds: Vec<u64> = amps.keys().cloned().collect();
        let basis = Arc::new(FockBasis::closure(
            self.model.layout.clone(),
            &seeds,
            &self.model.hamiltonian,
            self.model.fock_cap,
        )?);
        let mut v = CVec::zeros(basis.len());
        for (code, amp) in amps {
            let idx = basis.index_of(code).expect("seed inside closure");
            v[idx] = amp;
        }
        Ok(FockStateVector {
            basis,
            amps: v,
            time,
        })
    }

    /// One Lanczos step `e^{-iH dt}` on a normalized vector; returns the
    /// propagated vector and the residual estimate.
    fn lanczos_step(
        &self,
        basis: &FockBasis,
        v0: &CVec,
        dt: f64,
    ) -> Result<(CVec, f64), BackendError> {
        let h = &self.model.hamiltonian;
        let mut vs: Vec<CVec> = vec![v0.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut last_residual = f64::INFINITY;
        for j in 0..self.krylov_dim {
            let mut w = h.apply(basis, &vs[j]);
            let alpha = dot(&vs[j], &w).re;
            alphas.push(alpha);
            w.axpy(C64::new(-alpha, 0.0), &vs[j], C64::new(1.0, 0.0));
            if j > 0 {
                let b = betas[j - 1];
                w.axpy(C64::new(-b, 0.0), &vs[j - 1], C64::new(1.0, 0.0));
            }
            // full reorthogonalization
            for vk in &vs {
                let c = dot(vk, &w);
                if c.norm() > 0.0 {
                    w.axpy(-c, vk, C64::new(1.0, 0.0));
                }
            }
            let beta = w.norm();
            let (coeffs, residual) = krylov_exponential(&alphas, &betas, beta, dt);
            last_residual = residual;
            if residual < self.krylov_tol || beta < 1e-14 {
                let mut out = CVec::zeros(v0.len());
                for (k, vk) in vs.iter().enumerate() {
                    out.axpy(coeffs[k], vk, C64::new(1.0, 0.0));
                }
                let n = out.norm();
                if n > 0.0 {
                    out /= C64::new(n, 0.0);
                }
                return Ok((out, residual));
            }
            betas.push(beta);
            vs.push(w / C64::new(beta, 0.0));
        }
        Err(BackendError::KrylovStall {
            residual: last_residual,
            dim: self.krylov_dim,
        })
    }

    /// Propagate to absolute time `t` in steps of the backend `dt`.
    pub fn evolve(
        &self,
        state: &FockStateVector,
        t: f64,
    ) -> Result<FockStateVector, BackendError> {
        let span = t - state.time;
        if span < -1e-12 {
            return Err(BackendError::GridNotAscending);
        }
        let scale = state.norm();
        if scale == 0.0 {
            return Ok(FockStateVector {
                basis: state.basis.clone(),
                amps: state.amps.clone(),
                time: t,
            });
        }
        let mut v = &state.amps / C64::new(scale, 0.0);
        let mut remaining = span;
        while remaining > 1e-12 {
            let step = remaining.min(self.dt);
            let (next, _) = self.lanczos_step(&state.basis, &v, step)?;
            v = next;
            remaining -= step;
        }
        Ok(FockStateVector {
            basis: state.basis.clone(),
            amps: v * C64::new(scale, 0.0),
            time: t,
        })
    }

    /// Step a set of states through a uniform grid (grid dt must be an
    /// integer multiple of the backend dt), invoking the callback at every
    /// grid point including `t = 0`.
    pub fn evolve_scan<F>(
        &self,
        states: &mut [FockStateVector],
        grid: &TimeGrid,
        mut visit: F,
    ) -> Result<(), BackendError>
    where
        F: FnMut(usize, &[FockStateVector]) -> Result<(), BackendError>,
    {
        let sub = (grid.dt / self.dt).round() as usize;
        if sub == 0 || (grid.dt - sub as f64 * self.dt).abs() > 1e-9 * self.dt {
            return Err(BackendError::DimensionMismatch(format!(
                "grid dt {} is not a multiple of backend dt {}",
                grid.dt, self.dt
            )));
        }
        visit(0, states)?;
        for k in 1..grid.len() {
            for st in states.iter_mut() {
                let target = st.time + grid.dt;
                *st = self.evolve(st, target)?;
            }
            visit(k, states)?;
        }
        Ok(())
    }

    /// Purify a system density operator against ancilla sites and attach
    /// the thermofield-vacuum environment.
    pub fn thermal_initial_state(&self, rho: &CMat) -> Result<FockStateVector, BackendError> {
        if self.model.ancilla_sites == 0 {
            return Err(BackendError::Unsupported(
                "model was assembled without purification ancillas".into(),
            ));
        }
        let d = self.system_dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(BackendError::DimensionMismatch(format!(
                "system state is {}x{}, expected {d}x{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let pur = purify_system_state(rho, &self.system_site_occupations())?;
        let layout = &self.model.layout;
        let n_sys = self.model.system_sites;
        let anc_first = n_sys + self.model.replica_sites + self.model.env_sites;
        let mut amps = BTreeMap::new();
        for (weight, vector, anc_rank) in &pur.terms {
            let anc_code = {
                let code = layout.code_from_prefix(*anc_rank, n_sys);
                // shift the system-prefix pattern onto the ancilla block
                let mut shifted = 0u64;
                for s in 0..n_sys {
                    shifted = layout.with_digit(shifted, anc_first + s, layout.digit(code, s));
                }
                shifted
            };
            for s in 0..d {
                if vector[s].norm() > 0.0 {
                    let code = self.model.product_code(s) | anc_code;
                    *amps.entry(code).or_insert(C64::new(0.0, 0.0)) +=
                        C64::new(weight.sqrt(), 0.0) * vector[s];
                }
            }
        }
        self.state_from_amplitudes(amps, 0.0)
    }

    fn system_site_occupations(&self) -> Vec<Vec<u64>> {
        let d = self.system_dim();
        let n_sys = self.model.system_sites;
        (0..d)
            .map(|idx| {
                let code = self.model.layout.code_from_prefix(idx, n_sys);
                (0..n_sys)
                    .map(|s| self.model.layout.digit(code, s))
                    .collect()
            })
            .collect()
    }

    /// Maximally entangled system-replica pairs against the thermofield
    /// vacuum: the Choi initial state.
    pub fn choi_initial_state(&self) -> Result<FockStateVector, BackendError> {
        if self.model.replica_sites == 0 {
            return Err(BackendError::Unsupported(
                "model was assembled without Choi replicas".into(),
            ));
        }
        let n_sys = self.model.system_sites;
        let layout = self.model.layout.clone();
        let mut amps: BTreeMap<u64, C64> =
            [(self.model.env_vacuum_code, C64::new(1.0, 0.0))].into();
        let norm = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        for j in 0..n_sys {
            let mut pair = Operator::new();
            pair.add_real(
                1.0,
                vec![
                    crate::models::fock::Op {
                        site: j,
                        kind: crate::models::fock::OpKind::Create,
                    },
                    crate::models::fock::Op {
                        site: n_sys + j,
                        kind: crate::models::fock::OpKind::Create,
                    },
                ],
            );
            let mut next = BTreeMap::new();
            for (&code, &amp) in &amps {
                *next.entry(code).or_insert(C64::new(0.0, 0.0)) += amp * norm;
                if let Some((dst, sign)) = apply_term_once(&layout, &pair, code) {
                    *next.entry(dst).or_insert(C64::new(0.0, 0.0)) +=
                        amp * norm * C64::new(sign, 0.0);
                }
            }
            amps = next;
        }
        self.state_from_amplitudes(amps, 0.0)
    }

    /// Apply a system operator, optionally preceded by the system parity
    /// weight, rebasing the state onto the closure of the new support.
    pub fn apply_system_operator(
        &self,
        state: &FockStateVector,
        op: &Operator,
        with_parity: bool,
    ) -> Result<FockStateVector, BackendError> {
        let mut source = state.amps.clone();
        if with_parity {
            apply_site_parity(&state.basis, &mut source, &self.model.system_parity_sites());
        }
        let shifted = FockStateVector {
            basis: state.basis.clone(),
            amps: source,
            time: state.time,
        };
        let scattered = op.apply_scatter(&shifted.basis, &shifted.amps);
        let nonzero: BTreeMap<u64, C64> = scattered
            .into_iter()
            .filter(|(_, a)| a.norm() > 1e-300)
            .collect();
        if nonzero.is_empty() {
            return Err(BackendError::UnphysicalState(
                "operator annihilates the state".into(),
            ));
        }
        // the outer parity factor is applied to the reduced object, not here
        self.state_from_amplitudes(nonzero, state.time)
    }

    pub fn reduced_density(&self, state: &FockStateVector) -> CMat {
        let n2 = state.amps.norm_squared();
        let rho = reduced_prefix_matrix(
            (&state.basis, &state.amps),
            (&state.basis, &state.amps),
            self.model.system_sites,
        );
        if n2 > 0.0 {
            rho / C64::new(n2, 0.0)
        } else {
            rho
        }
    }

    /// Raw reduced cross object `Tr_env(|ket><bra|)` over the system block.
    pub fn reduced_cross(&self, ket: &FockStateVector, bra: &FockStateVector) -> CMat {
        reduced_prefix_matrix(
            (&ket.basis, &ket.amps),
            (&bra.basis, &bra.amps),
            self.model.system_sites,
        )
    }

    /// Reduced object over system + replica sites (Choi extraction).
    pub fn reduced_system_replica(&self, state: &FockStateVector) -> CMat {
        let n2 = state.amps.norm_squared();
        let rho = reduced_prefix_matrix(
            (&state.basis, &state.amps),
            (&state.basis, &state.amps),
            self.model.system_sites + self.model.replica_sites,
        );
        if n2 > 0.0 {
            rho / C64::new(n2, 0.0)
        } else {
            rho
        }
    }

    /// Thermalize a purified system state to `tau`.
    pub fn thermalize(&self, rho0: &CMat, tau: f64) -> Result<FockStateVector, BackendError> {
        let init = self.thermal_initial_state(rho0)?;
        self.evolve(&init, tau)
    }

    pub fn density_series(
        &self,
        rho0: &CMat,
        grid: &TimeGrid,
    ) -> Result<Vec<CMat>, BackendError> {
        let init = self.thermal_initial_state(rho0)?;
        let mut out = Vec::with_capacity(grid.len());
        let mut states = [init];
        self.evolve_scan(&mut states, grid, |_, sts| {
            out.push(self.reduced_density(&sts[0]));
            Ok(())
        })?;
        Ok(out)
    }

    /// Perturb the thermalized state and evolve both branches of the
    /// two-state overlap, collecting parity-corrected reduced objects.
    pub fn perturbed_series(
        &self,
        thermal: &FockStateVector,
        tag: OperatorTag,
        grid: &TimeGrid,
    ) -> Result<PerturbedSeries, BackendError> {
        self.model.spec.validate_operator(tag)?;
        if tag.odd_fermionic() {
            let mode = match tag {
                OperatorTag::Annihilate(i) | OperatorTag::Create(i) => i,
                OperatorTag::Sz => unreachable!(),
            };
            let greater = self.single_component(
                thermal,
                OperatorTag::Create(mode),
                OperatorTag::Annihilate(mode),
                true,
                false,
                grid,
            )?;
            let lesser = self.single_component(
                thermal,
                OperatorTag::Annihilate(mode),
                OperatorTag::Create(mode),
                true,
                true,
                grid,
            )?;
            Ok(PerturbedSeries {
                grid: *grid,
                greater: Some(greater),
                lesser: Some(lesser),
                even: None,
            })
        } else {
            let even = self.single_component(thermal, tag, tag, false, false, grid)?;
            Ok(PerturbedSeries {
                grid: *grid,
                greater: None,
                lesser: None,
                even: Some(even),
            })
        }
    }

    fn single_component(
        &self,
        thermal: &FockStateVector,
        apply_tag: OperatorTag,
        measure_tag: OperatorTag,
        with_parity: bool,
        conjugated: bool,
        grid: &TimeGrid,
    ) -> Result<ComponentSeries, BackendError> {
        let apply_op = self.model.system_operator(apply_tag)?;
        let measure = self.system_operator_matrix(measure_tag)?;
        let parity = self.model.system_parity_diagonal();
        let perturbed = self.apply_system_operator(thermal, &apply_op, with_parity)?;
        let mut states = [perturbed, thermal.clone()];
        let mut values = Vec::with_capacity(grid.len());
        let mut rho_tilde = Vec::with_capacity(grid.len());
        self.evolve_scan(&mut states, grid, |_, sts| {
            let mut red = self.reduced_cross(&sts[0], &sts[1]);
            if with_parity {
                for r in 0..red.nrows() {
                    if parity[r] < 0.0 {
                        for c in 0..red.ncols() {
                            red[(r, c)] = -red[(r, c)];
                        }
                    }
                }
            }
            let val = (&measure * &red).trace();
            values.push(val);
            rho_tilde.push(red);
            Ok(())
        })?;
        Ok(ComponentSeries {
            values,
            rho_tilde,
            conjugated,
        })
    }

    /// Dense matrix of a registered system operator on the reduced basis.
    pub fn system_operator_matrix(&self, tag: OperatorTag) -> Result<CMat, BackendError> {
        let op = self.model.system_operator(tag)?;
        let sys_layout = Arc::new(crate::models::fock::Layout::new(
            self.model.layout.sites[..self.model.system_sites].to_vec(),
        ));
        let basis = FockBasis::full(sys_layout, 1 << 12)?;
        Ok(op.matrix(&basis))
    }

    /// Basis-route map series: evolve the d system basis states against the
    /// vacuum and assemble `Lambda(t_k)` columns from reduced cross
    /// objects, `Lambda[e_{s s'}] = Tr_E(|s(t)><s'(t)|)`.
    pub fn basis_map_series(&self, grid: &TimeGrid) -> Result<Vec<CMat>, BackendError> {
        let d = self.system_dim();
        let mut states: Vec<FockStateVector> =
            (0..d).map(|s| self.basis_state(s)).collect::<Result<_, _>>()?;
        let mut maps = Vec::with_capacity(grid.len());
        self.evolve_scan(&mut states, grid, |_, sts| {
            let mut lam = CMat::zeros(d * d, d * d);
            for s in 0..d {
                for sp in 0..d {
                    let red = self.reduced_cross(&sts[s], &sts[sp]);
                    // column for basis element |s><s'| at vec index s + d s'
                    for r in 0..d {
                        for c in 0..d {
                            lam[(r + d * c, s + d * sp)] = red[(r, c)];
                        }
                    }
                }
            }
            maps.push(lam);
            Ok(())
        })?;
        Ok(maps)
    }

    /// Choi-route map series from a single entangled-state evolution.
    pub fn choi_map_series(&self, grid: &TimeGrid) -> Result<Vec<CMat>, BackendError> {
        let d = self.system_dim();
        let mut states = [self.choi_initial_state()?];
        let mut maps = Vec::with_capacity(grid.len());
        self.evolve_scan(&mut states, grid, |_, sts| {
            let rho_choi = self.reduced_system_replica(&sts[0]);
            maps.push(map_from_choi_state(&rho_choi, d)?);
            Ok(())
        })?;
        Ok(maps)
    }
}

/// Contraction of a system+replica state into the map it encodes:
/// `Lambda[|a><a'|]_{s,s'} = d * <s,a|rho^Choi|s',a'>`, with the composite
/// index `s + d a` (system fastest).
pub fn map_from_choi_state(rho_choi: &CMat, d: usize) -> Result<CMat, BackendError> {
    if rho_choi.nrows() != d * d {
        return Err(BackendError::DimensionMismatch(format!(
            "Choi state dimension {} vs d^2 = {}",
            rho_choi.nrows(),
            d * d
        )));
    }
    let mut lam = CMat::zeros(d * d, d * d);
    let scale = C64::new(d as f64, 0.0);
    for s in 0..d {
        for sp in 0..d {
            for a in 0..d {
                for ap in 0..d {
                    lam[(s + d * sp, a + d * ap)] = scale * rho_choi[(s + d * a, sp + d * ap)];
                }
            }
        }
    }
    Ok(lam)
}

fn apply_term_once(
    layout: &crate::models::fock::Layout,
    op: &Operator,
    code: u64,
) -> Option<(u64, f64)> {
    let term = &op.terms[0];
    crate::models::fock::apply_ops(layout, &term.ops, code)
}

/// Schmidt purification of a density operator: eigenvalues clipped per the
/// negative-eigenvalue policy, each eigenvector paired with an ancilla
/// basis pattern; for number-conserving systems the pattern is drawn from
/// the complementary-occupation sector so system + ancilla carries uniform
/// total particle number.
pub struct Purification {
    /// `(lambda, system vector, ancilla prefix rank)` per Schmidt term.
    pub terms: Vec<(f64, CVec, usize)>,
}

pub fn purify_system_state(
    rho: &CMat,
    basis_occupations: &[Vec<u64>],
) -> Result<Purification, BackendError> {
    let d = rho.nrows();
    let herm_dev = crate::numerics::frobenius(&(rho - rho.adjoint()));
    if herm_dev > 1e-10 {
        return Err(BackendError::UnphysicalState(format!(
            "state not Hermitian (deviation {herm_dev:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(BackendError::UnphysicalState(format!(
            "state trace {} differs from 1",
            tr
        )));
    }
    let (vals, vecs) = crate::numerics::hermitian_eigen(rho)?;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());

    let mut lambdas = Vec::new();
    let mut vectors = Vec::new();
    for &k in &idx {
        let lam = vals[k];
        if lam < -1e-10 {
            return Err(BackendError::UnphysicalState(format!(
                "negative eigenvalue {lam:.3e} beyond tolerance"
            )));
        }
        // clip tiny negatives to zero and drop
        if lam <= 0.0 {
            continue;
        }
        lambdas.push(lam);
        vectors.push(vecs.column(k).into_owned());
    }
    let total: f64 = lambdas.iter().sum();
    for lam in &mut lambdas {
        *lam /= total;
    }

    // total occupation per system basis state
    let occ_of = |s: usize| -> u64 { basis_occupations[s].iter().sum() };
    let n_modes: u64 = basis_occupations
        .last()
        .map(|v| v.len() as u64)
        .unwrap_or(0);

    // ancilla pattern pools per complementary sector, in rank order
    let mut pools: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
    for s in 0..d {
        pools.entry(occ_of(s)).or_default().push(s);
    }
    let mut cursors: std::collections::BTreeMap<u64, usize> = Default::default();
    let mut fallback_cursor = 0usize;

    let mut terms = Vec::new();
    for (lam, vec) in lambdas.into_iter().zip(vectors) {
        // number sector of the eigenvector, when sharp
        let mut sector: Option<u64> = None;
        let mut sharp = true;
        for s in 0..d {
            if vec[s].norm() > 1e-9 {
                match sector {
                    None => sector = Some(occ_of(s)),
                    Some(n) if n == occ_of(s) => {}
                    _ => {
                        sharp = false;
                        break;
                    }
                }
            }
        }
        let anc = if sharp {
            let want = n_modes - sector.unwrap_or(0);
            let pool = pools.get(&want).cloned().unwrap_or_default();
            let cur = cursors.entry(want).or_insert(0);
            let choice = pool.get(*cur).cloned();
            *cur += 1;
            choice
        } else {
            None
        };
        let anc = match anc {
            Some(a) => a,
            None => {
                let a = fallback_cursor;
                fallback_cursor += 1;
                if a >= d {
                    return Err(BackendError::UnphysicalState(
                        "ancilla space exhausted during purification".into(),
                    ));
                }
                a
            }
        };
        terms.push((lam, vec, anc));
    }
    Ok(Purification { terms })
}

impl Purification {
    /// Reconstruct the reduced system state (partial-trace oracle).
    pub fn reduced(&self, d: usize) -> CMat {
        let mut rho = CMat::zeros(d, d);
        // distinct ancilla patterns: cross terms vanish unless ranks match
        for (la, va, aa) in &self.terms {
            for (lb, vb, ab) in &self.terms {
                if aa == ab {
                    let w = C64::new((la * lb).sqrt(), 0.0);
                    for r in 0..d {
                        for c in 0..d {
                            rho[(r, c)] += w * va[r] * vb[c].conj();
                        }
                    }
                }
            }
        }
        rho
    }

    pub fn schmidt_values(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.0).collect()
    }
}

fn krylov_exponential(alphas: &[f64], betas: &[f64], next_beta: f64, dt: f64) -> (Vec<C64>, f64) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = alphas[j];
        if j + 1 < m {
            t[(j, j + 1)] = betas[j];
            t[(j + 1, j)] = betas[j];
        }
    }
    let se = t.symmetric_eigen();
    // coeffs = U exp(-i dt L) U^T e_1
    let mut coeffs = vec![C64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = C64::new(0.0, -se.eigenvalues[k] * dt).exp();
        let w = se.eigenvectors[(0, k)];
        for j in 0..m {
            coeffs[j] += C64::new(w * se.eigenvectors[(j, k)], 0.0) * phase;
        }
    }
    let residual = next_beta * coeffs[m - 1].norm() * dt.abs();
    (coeffs, residual)
}
