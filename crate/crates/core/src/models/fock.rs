//! Occupation-basis engine for the exact-diagonalization backend.
//!
//! Basis states are bit-packed codes over a site layout; fermionic
//! antisymmetry is handled by Jordan-Wigner strings in the layout order.
//! Bases are built as the closure of a seed support under the Hamiltonian
//! terms, so conserved charges never have to be enumerated explicitly.

use crate::error::ModelError;
use crate::numerics::{CMat, CVec, C64};
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    /// Spinless fermion mode, local dimension 2, Jordan-Wigner strings.
    Fermion,
    /// Two-level system without strings.
    Spin,
    /// Truncated boson mode; `dim = max occupancy + 1`.
    Boson { dim: usize },
}

impl SiteKind {
    pub fn dim(&self) -> usize {
        match self {
            SiteKind::Fermion | SiteKind::Spin => 2,
            SiteKind::Boson { dim } => *dim,
        }
    }

    fn bits(&self) -> u32 {
        let d = self.dim() as u64;
        64 - (d - 1).leading_zeros()
    }
}

/// Site layout: system sites first, then (for map extraction) replica
/// sites, then the environment chain sites; purification ancillas, when
/// present, come last so the Hamiltonian never crosses them.
#[derive(Debug, Clone)]
pub struct Layout {
    pub sites: Vec<SiteKind>,
    offsets: Vec<u32>,
    widths: Vec<u32>,
    /// Per-site Jordan-Wigner mask: occupation bits of all fermionic sites
    /// strictly below this site in the layout order.
    jw_masks: Vec<u64>,
    total_bits: u32,
}

impl Layout {
    pub fn new(sites: Vec<SiteKind>) -> Self {
        let mut offsets = Vec::with_capacity(sites.len());
        let mut widths = Vec::with_capacity(sites.len());
        let mut jw_masks = Vec::with_capacity(sites.len());
        let mut offset = 0u32;
        let mut fermion_mask = 0u64;
        for kind in &sites {
            let w = kind.bits();
            offsets.push(offset);
            widths.push(w);
            jw_masks.push(fermion_mask);
            if *kind == SiteKind::Fermion {
                fermion_mask |= 1u64 << offset;
            }
            offset += w;
        }
        assert!(offset <= 60, "layout exceeds 60 packed bits");
        Self {
            sites,
            offsets,
            widths,
            jw_masks,
            total_bits: offset,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    #[inline]
    pub fn digit(&self, code: u64, site: usize) -> u64 {
        (code >> self.offsets[site]) & ((1u64 << self.widths[site]) - 1)
    }

    #[inline]
    pub fn with_digit(&self, code: u64, site: usize, value: u64) -> u64 {
        let mask = ((1u64 << self.widths[site]) - 1) << self.offsets[site];
        (code & !mask) | (value << self.offsets[site])
    }

    #[inline]
    fn jw_sign(&self, code: u64, site: usize) -> f64 {
        if (code & self.jw_masks[site]).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Mixed-radix rank of the first `n_prefix` sites (site 0 fastest).
    pub fn prefix_index(&self, code: u64, n_prefix: usize) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for site in 0..n_prefix {
            idx += self.digit(code, site) as usize * stride;
            stride *= self.sites[site].dim();
        }
        idx
    }

    pub fn prefix_dim(&self, n_prefix: usize) -> usize {
        self.sites[..n_prefix].iter().map(|s| s.dim()).product()
    }

    /// Bits occupied by the first `n_prefix` sites.
    fn prefix_bits(&self, n_prefix: usize) -> u32 {
        if n_prefix == 0 {
            0
        } else {
            self.offsets[n_prefix - 1] + self.widths[n_prefix - 1]
        }
    }

    /// Code with the given prefix rank and everything else zero.
    pub fn code_from_prefix(&self, mut idx: usize, n_prefix: usize) -> u64 {
        let mut code = 0u64;
        for site in 0..n_prefix {
            let d = self.sites[site].dim();
            code = self.with_digit(code, site, (idx % d) as u64);
            idx /= d;
        }
        code
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    /// Fermion/boson creation; spin raising on spin sites.
    Create,
    /// Fermion/boson annihilation; spin lowering on spin sites.
    Annihilate,
    /// Occupation number (diagonal).
    Number,
    /// `n - 1/2` (diagonal); the z spin component on two-level sites.
    SzHalf,
}

#[derive(Debug, Clone, Copy)]
pub struct Op {
    pub site: usize,
    pub kind: OpKind,
}

impl Op {
    fn adjoint(self) -> Op {
        let kind = match self.kind {
            OpKind::Create => OpKind::Annihilate,
            OpKind::Annihilate => OpKind::Create,
            k => k,
        };
        Op {
            site: self.site,
            kind,
        }
    }
}

/// One product term `coeff * op_1 op_2 ...`, ops applied right to left.
#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: C64,
    pub ops: Vec<Op>,
}

/// Apply the op product to a basis code; returns the resulting code and the
/// real amplitude factor (JW sign times bosonic matrix elements), or `None`
/// when annihilated.
pub fn apply_ops(layout: &Layout, ops: &[Op], code: u64) -> Option<(u64, f64)> {
    let mut code = code;
    let mut amp = 1.0f64;
    for op in ops.iter().rev() {
        let d = layout.digit(code, op.site);
        let kind = layout.sites[op.site];
        match (op.kind, kind) {
            (OpKind::Number, _) => {
                if d == 0 {
                    return None;
                }
                amp *= d as f64;
            }
            (OpKind::SzHalf, _) => {
                amp *= d as f64 - 0.5;
            }
            (OpKind::Create, SiteKind::Fermion) => {
                if d == 1 {
                    return None;
                }
                amp *= layout.jw_sign(code, op.site);
                code = layout.with_digit(code, op.site, 1);
            }
            (OpKind::Annihilate, SiteKind::Fermion) => {
                if d == 0 {
                    return None;
                }
                amp *= layout.jw_sign(code, op.site);
                code = layout.with_digit(code, op.site, 0);
            }
            (OpKind::Create, SiteKind::Spin) => {
                if d == 1 {
                    return None;
                }
                code = layout.with_digit(code, op.site, 1);
            }
            (OpKind::Annihilate, SiteKind::Spin) => {
                if d == 0 {
                    return None;
                }
                code = layout.with_digit(code, op.site, 0);
            }
            (OpKind::Create, SiteKind::Boson { dim }) => {
                if d as usize + 1 >= dim {
                    return None;
                }
                amp *= ((d + 1) as f64).sqrt();
                code = layout.with_digit(code, op.site, d + 1);
            }
            (OpKind::Annihilate, SiteKind::Boson { .. }) => {
                if d == 0 {
                    return None;
                }
                amp *= (d as f64).sqrt();
                code = layout.with_digit(code, op.site, d - 1);
            }
        }
    }
    Some((code, amp))
}

/// Sum of product terms.
#[derive(Debug, Clone, Default)]
pub struct Operator {
    pub terms: Vec<Term>,
}

impl Operator {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn add(&mut self, coeff: C64, ops: Vec<Op>) {
        if coeff.norm() > 0.0 {
            self.terms.push(Term { coeff, ops });
        }
    }

    pub fn add_real(&mut self, coeff: f64, ops: Vec<Op>) {
        self.add(C64::new(coeff, 0.0), ops);
    }

    /// `coeff * (c_a^dag c_b + c_b^dag c_a)`.
    pub fn add_hopping(&mut self, a: usize, b: usize, coeff: f64) {
        self.add_real(
            coeff,
            vec![
                Op { site: a, kind: OpKind::Create },
                Op { site: b, kind: OpKind::Annihilate },
            ],
        );
        self.add_real(
            coeff,
            vec![
                Op { site: b, kind: OpKind::Create },
                Op { site: a, kind: OpKind::Annihilate },
            ],
        );
    }

    pub fn add_number(&mut self, site: usize, coeff: f64) {
        self.add_real(coeff, vec![Op { site, kind: OpKind::Number }]);
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    ops: t.ops.iter().rev().map(|op| op.adjoint()).collect(),
                })
                .collect(),
        }
    }

    /// Gather-form matvec `out[i] = sum_terms c <i|ops|j> v[j]`, parallel
    /// over output indices with deterministic per-index accumulation.
    pub fn apply(&self, basis: &FockBasis, v: &CVec) -> CVec {
        let adj: Vec<(C64, Vec<Op>)> = self
            .terms
            .iter()
            .map(|t| {
                (
                    t.coeff,
                    t.ops.iter().rev().map(|op| op.adjoint()).collect(),
                )
            })
            .collect();
        let layout = &basis.layout;
        let out: Vec<C64> = basis
            .codes
            .par_iter()
            .map(|&code| {
                let mut acc = C64::new(0.0, 0.0);
                for (coeff, adj_ops) in &adj {
                    if let Some((src, amp)) = apply_ops(layout, adj_ops, code) {
                        if let Some(j) = basis.index_of(src) {
                            acc += *coeff * C64::new(amp, 0.0) * v[j];
                        }
                    }
                }
                acc
            })
            .collect();
        CVec::from_vec(out)
    }

    /// Scatter application producing amplitudes over arbitrary target codes;
    /// used for perturbations that leave the source sector.
    pub fn apply_scatter(
        &self,
        basis: &FockBasis,
        v: &CVec,
    ) -> std::collections::BTreeMap<u64, C64> {
        let mut out = std::collections::BTreeMap::new();
        for (i, &code) in basis.codes.iter().enumerate() {
            if v[i].norm() == 0.0 {
                continue;
            }
            for term in &self.terms {
                if let Some((dst, amp)) = apply_ops(&basis.layout, &term.ops, code) {
                    *out.entry(dst).or_insert(C64::new(0.0, 0.0)) +=
                        term.coeff * C64::new(amp, 0.0) * v[i];
                }
            }
        }
        out
    }

    pub fn expectation(&self, basis: &FockBasis, v: &CVec) -> C64 {
        let av = self.apply(basis, v);
        dot(v, &av)
    }

    /// Dense matrix in the given basis; for small dimensions and tests.
    pub fn matrix(&self, basis: &FockBasis) -> CMat {
        let n = basis.len();
        let mut m = CMat::zeros(n, n);
        for (j, &code) in basis.codes.iter().enumerate() {
            for term in &self.terms {
                if let Some((dst, amp)) = apply_ops(&basis.layout, &term.ops, code) {
                    if let Some(i) = basis.index_of(dst) {
                        m[(i, j)] += term.coeff * C64::new(amp, 0.0);
                    }
                }
            }
        }
        m
    }
}

/// Deterministic deep inner product `<a|b>` with parallel chunking.
pub fn dot(a: &CVec, b: &CVec) -> C64 {
    const CHUNK: usize = 1 << 14;
    let n = a.len();
    if n <= CHUNK {
        return (0..n).map(|i| a[i].conj() * b[i]).sum();
    }
    let partials: Vec<C64> = a
        .as_slice()
        .par_chunks(CHUNK)
        .zip(b.as_slice().par_chunks(CHUNK))
        .map(|(xa, xb)| {
            xa.iter()
                .zip(xb)
                .map(|(x, y)| x.conj() * y)
                .sum::<C64>()
        })
        .collect();
    partials.into_iter().sum()
}

/// Enumerated basis over a site layout with O(1) code lookup.
#[derive(Debug)]
pub struct FockBasis {
    pub layout: Arc<Layout>,
    pub codes: Vec<u64>,
    lookup: Vec<u32>,
}

impl FockBasis {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    pub fn index_of(&self, code: u64) -> Option<usize> {
        let v = self.lookup[code as usize];
        if v == u32::MAX {
            None
        } else {
            Some(v as usize)
        }
    }

    fn from_codes(layout: Arc<Layout>, mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        let mut lookup = vec![u32::MAX; 1usize << layout.total_bits()];
        for (i, &c) in codes.iter().enumerate() {
            lookup[c as usize] = i as u32;
        }
        Self {
            layout,
            codes,
            lookup,
        }
    }

    /// Closure of the seed codes under the (adjoint-closed) operator terms.
    pub fn closure(
        layout: Arc<Layout>,
        seeds: &[u64],
        h: &Operator,
        cap: usize,
    ) -> Result<Self, ModelError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut frontier: Vec<u64> = seeds.to_vec();
        for &s in seeds {
            seen.insert(s);
        }
        while let Some(code) = frontier.pop() {
            for term in &h.terms {
                if let Some((dst, _)) = apply_ops(&layout, &term.ops, code) {
                    if seen.insert(dst) {
                        if seen.len() > cap {
                            return Err(ModelError::TooLarge {
                                dim: seen.len(),
                                cap,
                            });
                        }
                        frontier.push(dst);
                    }
                }
            }
        }
        Ok(Self::from_codes(layout, seen.into_iter().collect()))
    }

    /// Full product space.
    pub fn full(layout: Arc<Layout>, cap: usize) -> Result<Self, ModelError> {
        let dim: usize = layout.sites.iter().map(|s| s.dim()).product();
        if dim > cap {
            return Err(ModelError::TooLarge { dim, cap });
        }
        let mut codes = Vec::with_capacity(dim);
        let n = layout.n_sites();
        let mut digits = vec![0u64; n];
        loop {
            let mut code = 0u64;
            for (site, &d) in digits.iter().enumerate() {
                code = layout.with_digit(code, site, d);
            }
            codes.push(code);
            // odometer increment
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(Self::from_codes(layout, codes));
                }
                digits[k] += 1;
                if digits[k] < layout.sites[k].dim() as u64 {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }
}

/// Reduced object `Tr_suffix(|ket><bra|)` over the first `n_prefix` sites.
/// Both states may live in different bases over the same layout.
pub fn reduced_prefix_matrix(
    ket: (&FockBasis, &CVec),
    bra: (&FockBasis, &CVec),
    n_prefix: usize,
) -> CMat {
    let (kb, kv) = ket;
    let (bb, bv) = bra;
    let layout = &kb.layout;
    let d = layout.prefix_dim(n_prefix);
    let pbits = layout.prefix_bits(n_prefix);
    let pmask = (1u64 << pbits) - 1;
    let mut rho = CMat::zeros(d, d);
    for (i, &code) in kb.codes.iter().enumerate() {
        let amp_k = kv[i];
        if amp_k.norm_sqr() == 0.0 {
            continue;
        }
        let suffix = code & !pmask;
        let pk = layout.prefix_index(code, n_prefix);
        for pb in 0..d {
            let bcode = suffix | layout.code_from_prefix(pb, n_prefix);
            if let Some(j) = bb.index_of(bcode) {
                rho[(pk, pb)] += amp_k * bv[j].conj();
            }
        }
    }
    rho
}

/// Diagonal parity weight `(-1)^{sum of occupations over masked sites}`.
pub fn apply_site_parity(basis: &FockBasis, v: &mut CVec, sites: &[usize]) {
    for (i, &code) in basis.codes.iter().enumerate() {
        let total: u64 = sites.iter().map(|&s| basis.layout.digit(code, s)).sum();
        if total % 2 == 1 {
            v[i] = -v[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fermion_layout(n: usize) -> Arc<Layout> {
        Arc::new(Layout::new(vec![SiteKind::Fermion; n]))
    }

    #[test]
    fn jw_signs_anticommute() {
        // {c_0, c_1^dag} = 0 on a 2-site chain: check matrix elements.
        let layout = fermion_layout(2);
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        let mut c0 = Operator::new();
        c0.add_real(1.0, vec![Op { site: 0, kind: OpKind::Annihilate }]);
        let mut c1d = Operator::new();
        c1d.add_real(1.0, vec![Op { site: 1, kind: OpKind::Create }]);
        let a = c0.matrix(&basis);
        let b = c1d.matrix(&basis);
        let anti = &a * &b + &b * &a;
        assert!(crate::numerics::frobenius(&anti) < 1e-14);
    }

    #[test]
    fn hopping_term_is_hermitian() {
        let layout = fermion_layout(3);
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        let mut h = Operator::new();
        h.add_hopping(0, 1, 0.7);
        h.add_hopping(1, 2, -0.3);
        h.add_number(0, 0.2);
        let m = h.matrix(&basis);
        assert!(crate::numerics::frobenius(&(m.adjoint() - &m)) < 1e-14);
    }

    #[test]
    fn gather_matvec_matches_dense() {
        let layout = Arc::new(Layout::new(vec![
            SiteKind::Fermion,
            SiteKind::Boson { dim: 3 },
            SiteKind::Spin,
        ]));
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        let mut h = Operator::new();
        h.add_number(1, 0.9);
        h.add_real(
            0.4,
            vec![
                Op { site: 2, kind: OpKind::SzHalf },
                Op { site: 1, kind: OpKind::Create },
            ],
        );
        h.add_real(
            0.4,
            vec![
                Op { site: 2, kind: OpKind::SzHalf },
                Op { site: 1, kind: OpKind::Annihilate },
            ],
        );
        h.add_real(0.25, vec![Op { site: 0, kind: OpKind::Number }]);
        let m = h.matrix(&basis);
        let v = CVec::from_fn(basis.len(), |i, _| C64::new((i as f64).sin(), (i as f64 * 0.3).cos()));
        let via_matvec = h.apply(&basis, &v);
        let via_dense = &m * &v;
        assert!((via_matvec - via_dense).norm() < 1e-12);
    }

    #[test]
    fn boson_ladder_amplitudes() {
        let layout = Arc::new(Layout::new(vec![SiteKind::Boson { dim: 4 }]));
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        let mut create = Operator::new();
        create.add_real(1.0, vec![Op { site: 0, kind: OpKind::Create }]);
        let m = create.matrix(&basis);
        assert_abs_diff_eq!(m[(1, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 1)].re, 2.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 2)].re, 3.0f64.sqrt(), epsilon = 1e-15);
        // truncation: creating on the top level annihilates
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn closure_restricts_to_number_sector() {
        let layout = fermion_layout(4);
        let mut h = Operator::new();
        h.add_hopping(0, 1, 1.0);
        h.add_hopping(1, 2, 1.0);
        h.add_hopping(2, 3, 1.0);
        // seed with the half-filled state |1100>
        let seed = 0b0011u64;
        let basis = FockBasis::closure(layout.clone(), &[seed], &h, 1000).unwrap();
        assert_eq!(basis.len(), 6); // C(4, 2)
        for &code in &basis.codes {
            assert_eq!(code.count_ones(), 2);
        }
    }

    #[test]
    fn reduced_prefix_of_product_state_is_pure() {
        let layout = fermion_layout(3);
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        // |psi> = |1>_0 (x) (|00> + |11>)/sqrt(2) on sites 1, 2
        let mut v = CVec::zeros(basis.len());
        let a = basis.index_of(0b001).unwrap();
        let b = basis.index_of(0b111).unwrap();
        v[a] = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        v[b] = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let rho = reduced_prefix_matrix((&basis, &v), (&basis, &v), 1);
        assert_abs_diff_eq!(rho[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn reduced_prefix_of_entangled_state_is_mixed() {
        let layout = fermion_layout(2);
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        // (|01> + |10>)/sqrt(2): reduced over site 0 = I/2
        let mut v = CVec::zeros(basis.len());
        v[basis.index_of(0b01).unwrap()] = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        v[basis.index_of(0b10).unwrap()] = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
        let rho = reduced_prefix_matrix((&basis, &v), (&basis, &v), 1);
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(rho[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn parity_weights() {
        let layout = fermion_layout(2);
        let basis = FockBasis::full(layout.clone(), 100).unwrap();
        let mut v = CVec::from_element(basis.len(), C64::new(1.0, 0.0));
        apply_site_parity(&basis, &mut v, &[0]);
        assert_abs_diff_eq!(v[basis.index_of(0b00).unwrap()].re, 1.0);
        assert_abs_diff_eq!(v[basis.index_of(0b01).unwrap()].re, -1.0);
        assert_abs_diff_eq!(v[basis.index_of(0b10).unwrap()].re, 1.0);
        assert_abs_diff_eq!(v[basis.index_of(0b11).unwrap()].re, -1.0);
    }
}
