//! Versioned binary checkpointing for long evolutions.
//!
//! Layout (little endian): magic `OQDCKPT\0`, format version u32, time f64,
//! 32-byte config hash, code count u64, codes, amplitude pairs (re, im).

use super::FockStateVector;
use crate::error::BackendError;
use crate::models::fock::FockBasis;
use crate::models::FockModel;
use crate::numerics::{CVec, C64};
use std::io::{Read, Write};
use std::sync::Arc;

const MAGIC: &[u8; 8] = b"OQDCKPT\0";
const VERSION: u32 = 1;

pub fn save<W: Write>(
    mut w: W,
    state: &FockStateVector,
    config_hash: &[u8; 32],
) -> Result<(), BackendError> {
    let io = |e: std::io::Error| BackendError::Checkpoint(e.to_string());
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&state.time.to_le_bytes()).map_err(io)?;
    w.write_all(config_hash).map_err(io)?;
    w.write_all(&(state.basis.codes.len() as u64).to_le_bytes())
        .map_err(io)?;
    for &c in &state.basis.codes {
        w.write_all(&c.to_le_bytes()).map_err(io)?;
    }
    for a in state.amps.iter() {
        w.write_all(&a.re.to_le_bytes()).map_err(io)?;
        w.write_all(&a.im.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

pub fn load<R: Read>(
    mut r: R,
    model: &FockModel,
) -> Result<(FockStateVector, [u8; 32]), BackendError> {
    let io = |e: std::io::Error| BackendError::Checkpoint(e.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(BackendError::Checkpoint("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4).map_err(io)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(BackendError::Checkpoint(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8).map_err(io)?;
    let time = f64::from_le_bytes(b8);
    let mut hash = [0u8; 32];
    r.read_exact(&mut hash).map_err(io)?;
    r.read_exact(&mut b8).map_err(io)?;
    let n = u64::from_le_bytes(b8) as usize;
    let mut codes = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8).map_err(io)?;
        codes.push(u64::from_le_bytes(b8));
    }
    let mut amps = CVec::zeros(n);
    for k in 0..n {
        r.read_exact(&mut b8).map_err(io)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io)?;
        let im = f64::from_le_bytes(b8);
        amps[k] = C64::new(re, im);
    }
    // rebuild the basis as the closure of the stored support so the lookup
    // table is consistent with the model
    let basis = FockBasis::closure(
        model.layout.clone(),
        &codes,
        &model.hamiltonian,
        model.fock_cap,
    )?;
    let mut v = CVec::zeros(basis.len());
    for (k, &c) in codes.iter().enumerate() {
        let idx = basis
            .index_of(c)
            .ok_or_else(|| BackendError::Checkpoint("stored code outside closure".into()))?;
        v[idx] = amps[k];
    }
    Ok((
        FockStateVector {
            basis: Arc::new(basis),
            amps: v,
            time,
        },
        hash,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{BranchCoefficients, ChainBranch, ChainCoefficients, Statistics};
    use crate::models::{assemble_fock, FockAssemblyOptions, ModelSpec, ModelVariant};

    #[test]
    fn round_trip() {
        let chains = ChainCoefficients {
            branch1: BranchCoefficients::Active(ChainBranch {
                coupling: 0.2,
                onsite: vec![0.1, 0.2],
                hopping: vec![0.5],
            }),
            branch2: BranchCoefficients::Active(ChainBranch {
                coupling: 0.15,
                onsite: vec![-0.1, -0.2],
                hopping: vec![0.5],
            }),
            statistics: Statistics::Fermion,
            n_b: 2,
        };
        let spec = ModelSpec {
            variant: ModelVariant::ResonantLevel { epsilon: 0.1 },
        };
        let model = assemble_fock(&spec, &[chains], FockAssemblyOptions::default()).unwrap();
        let backend = super::super::EdBackend::new(model, 0.1);
        let st = backend.basis_state(1).unwrap();
        let ev = backend.evolve(&st, 1.5).unwrap();

        let mut buf = Vec::new();
        let hash = [7u8; 32];
        save(&mut buf, &ev, &hash).unwrap();
        let (loaded, h2) = load(&buf[..], backend.model()).unwrap();
        assert_eq!(h2, hash);
        assert_eq!(loaded.time, ev.time);
        assert!((&loaded.amps - &ev.amps).norm() < 1e-15);
    }
}
