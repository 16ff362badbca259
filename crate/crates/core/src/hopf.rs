//! Tensor products of mapped irreps, the base coproduct of U_q(sl(2)) and the
//! coproduct induced on the hatted generators.
//!
//! The product basis is `|m1> ⊗ |m2>` at index `i1 * d2 + i2`. ΔC is block
//! diagonal by total weight `M = m1 + m2`; every function of the commuting pair
//! (ΔC, ΔJ0) is evaluated per block from Sylvester projectors onto the
//! analytically known eigenvalues `[J][J+1]`.

use std::sync::Arc;

use crate::arith::{classical_casimir_value, invert_casimir, q_bracket, real, AlgebraParams, HalfInt, Scalar};
use crate::error::{Error, Result};
use crate::irrep::{build_classical, build_mapped, dimension, Irrep};
use crate::linalg::{commutator_residual, diag, eigen_decompose, eigenvalues, is_finite, max_abs, scaled_residual, CMatrix, CVector};
use crate::verify::{oracle_eigensolve, Check, CheckReport, ParamsEcho};
use crate::weightfn::{PsiSeries, WeightFunction};

/// Product-basis indices sharing one total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightBlock {
    pub weight: HalfInt,
    pub indices: Vec<usize>,
}

/// Base (undeformed) coproduct images on `V_{j1} ⊗ V_{j2}`.
#[derive(Debug, Clone)]
pub struct TensorRep {
    pub left: Arc<Irrep>,
    pub right: Arc<Irrep>,
    /// `q^{2ΔJ0}`.
    pub k2: CMatrix,
    pub k2_inv: CMatrix,
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
    /// `ΔJ- ΔJ+ + [ΔJ0][ΔJ0+1]`.
    pub casimir: CMatrix,
    /// Total weight of each product basis vector.
    pub weights: Vec<HalfInt>,
    /// Ordered by decreasing weight.
    pub blocks: Vec<WeightBlock>,
}

/// `q^{x J0}` on an irrep, for half-integer `x`, through `q^{1/4}` so the
/// branch matches `q_pow` whenever `x m` is a half-integer.
pub fn weight_power(rep: &Irrep, x: HalfInt) -> CMatrix {
    let r = rep.q().sqrt().sqrt();
    diag(&rep.weights().iter().map(|&m| r.powi((x.twice() * m.twice()) as i32)).collect::<Vec<_>>())
}

/// Coupled spins `|j1 - j2| ..= j1 + j2`.
pub fn coupled_spins(j1: HalfInt, j2: HalfInt) -> Vec<HalfInt> {
    let lo = (j1 - j2).abs().twice();
    let hi = (j1 + j2).twice();
    (lo..=hi).step_by(2).map(HalfInt::from_twice).collect()
}

pub fn build_tensor(left: Arc<Irrep>, right: Arc<Irrep>) -> Result<TensorRep> {
    if left.q() != right.q() {
        return Err(Error::ParameterMismatch("q"));
    }
    if left.eta() != right.eta() {
        return Err(Error::ParameterMismatch("eta"));
    }
    if left.psi != right.psi && *left.psi != *right.psi {
        return Err(Error::ParameterMismatch("psi"));
    }
    let q = left.q();
    let kl_inv = weight_power(&left, -HalfInt::ONE);
    let kr = weight_power(&right, HalfInt::ONE);
    let (l, r) = (&left.base, &right.base);

    let k2 = l.k2.kronecker(&r.k2);
    let k2_inv = l.k2_inv.kronecker(&r.k2_inv);
    let j_plus = l.j_plus.kronecker(&kr) + kl_inv.kronecker(&r.j_plus);
    let j_minus = l.j_minus.kronecker(&kr) + kl_inv.kronecker(&r.j_minus);

    let (wl, wr) = (left.weights(), right.weights());
    let weights: Vec<HalfInt> = wl.iter().flat_map(|&a| wr.iter().map(move |&b| a + b)).collect();
    let mut top = Vec::with_capacity(weights.len());
    for &m in &weights {
        top.push(classical_casimir_value(m, q)?);
    }
    let casimir = &j_minus * &j_plus + diag(&top);

    let hi = left.j() + right.j();
    let blocks = (0..=hi.twice())
        .map(|i| HalfInt::from_twice(hi.twice() - 2 * i))
        .map(|weight| WeightBlock {
            weight,
            indices: (0..weights.len()).filter(|&i| weights[i] == weight).collect(),
        })
        .collect();

    Ok(TensorRep { left, right, k2, k2_inv, j_plus, j_minus, casimir, weights, blocks })
}

impl TensorRep {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn q(&self) -> Scalar {
        self.left.q()
    }

    pub fn spins(&self) -> Vec<HalfInt> {
        coupled_spins(self.left.j(), self.right.j())
    }

    fn block_matrix(&self, m: &CMatrix, block: &WeightBlock) -> CMatrix {
        m.select_rows(&block.indices).select_columns(&block.indices)
    }

    /// Identifies ΔC's eigenvalues per weight block and builds the projectors.
    pub fn spectrum(&self, spectral_tol: f64) -> Result<CoupledSpectrum> {
        let q = self.q();
        let (j1, j2) = (self.left.j(), self.right.j());
        let floor = (j1 - j2).abs();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let b = self.block_matrix(&self.casimir, block);
            let lo = if block.weight.abs().twice() > floor.twice() { block.weight.abs() } else { floor };
            let mut spins = Vec::new();
            let mut values = Vec::new();
            let mut j = lo;
            while j.twice() <= (j1 + j2).twice() {
                spins.push(j);
                values.push(classical_casimir_value(j, q)?);
                j = j + HalfInt::ONE;
            }
            let label = || format!("M={}", block.weight);
            if spins.len() != block.indices.len() {
                return Err(Error::Eigensolver(format!(
                    "weight block {} has size {} but {} coupled spins",
                    label(),
                    block.indices.len(),
                    spins.len()
                )));
            }
            let mut taken = vec![false; spins.len()];
            for lambda in eigenvalues(&b)? {
                let (best, dist) = values
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, (lambda - c).norm() / c.norm().max(1.0)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty block");
                if !(dist <= spectral_tol) || taken[best] {
                    return Err(Error::EigenvalueIdentification { block: label(), value: lambda });
                }
                taken[best] = true;
            }
            let n = spins.len();
            let id = CMatrix::identity(n, n);
            let parts = (0..n)
                .map(|a| {
                    let mut p = id.clone();
                    for b2 in (0..n).filter(|&b2| b2 != a) {
                        p = p * (&b - &id * values[b2]) / (values[a] - values[b2]);
                    }
                    SpectralPart { spin: spins[a], casimir: values[a], projector: p }
                })
                .collect();
            blocks.push(BlockSpectrum { weight: block.weight, indices: block.indices.clone(), parts });
        }
        Ok(CoupledSpectrum { dim: self.dim(), blocks })
    }
}

/// One coupled spin inside one weight block.
#[derive(Debug, Clone)]
pub struct SpectralPart {
    pub spin: HalfInt,
    /// `[J][J+1]`.
    pub casimir: Scalar,
    /// Block-local spectral projector.
    pub projector: CMatrix,
}

#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub weight: HalfInt,
    pub indices: Vec<usize>,
    pub parts: Vec<SpectralPart>,
}

/// A point of the joint spectrum of (ΔC, ΔJ0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub spin: HalfInt,
    pub casimir: Scalar,
    pub weight: HalfInt,
}

#[derive(Debug, Clone)]
pub struct CoupledSpectrum {
    dim: usize,
    blocks: Vec<BlockSpectrum>,
}

impl CoupledSpectrum {
    pub fn blocks(&self) -> &[BlockSpectrum] {
        &self.blocks
    }

    /// `Σ f(c_J, M) P_{J,M}`, assembled in product-basis coordinates.
    pub fn apply(&self, mut f: impl FnMut(SpectralPoint) -> Result<Scalar>) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for block in &self.blocks {
            for part in &block.parts {
                let v = f(SpectralPoint { spin: part.spin, casimir: part.casimir, weight: block.weight })?;
                for (a, &ia) in block.indices.iter().enumerate() {
                    for (b, &ib) in block.indices.iter().enumerate() {
                        out[(ia, ib)] += v * part.projector[(a, b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// The full projector onto the spin-`j` eigenspace of ΔC.
    pub fn projector(&self, j: HalfInt) -> CMatrix {
        self.apply(|pt| Ok(real(if pt.spin == j { 1.0 } else { 0.0 }))).expect("infallible")
    }
}

/// `f(ΔC, ΔJ0)` by spectral calculus.
pub fn coupled_spectral_function(
    t: &TensorRep,
    spectral_tol: f64,
    f: impl FnMut(SpectralPoint) -> Result<Scalar>,
) -> Result<CMatrix> {
    t.spectrum(spectral_tol)?.apply(f)
}

/// `(phi(c) - ψ(M)) / (c - [M][M+1])`, or `phi'([M][M+1])` where the two coincide.
pub fn divided_difference(psi: &PsiSeries, pt: SpectralPoint) -> Result<Scalar> {
    let q = psi.q();
    let y = classical_casimir_value(pt.weight, q)?;
    if pt.spin == pt.weight {
        return psi.phi_derivative(y);
    }
    let t = invert_casimir(pt.casimir, q)?;
    let num = psi.difference_at(t, q.powi(pt.weight.twice() as i32));
    Ok(num / (pt.casimir - y))
}

/// What multiplies ΔJ± in the induced coproduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioOperator {
    DividedDifference,
    /// `R = 1`; a negative control that should break the commutator.
    Identity,
}

/// Hatted coproduct images and the spectral functions they were built from.
#[derive(Debug, Clone)]
pub struct InducedCoproduct {
    pub jhat_plus: CMatrix,
    pub jhat_minus: CMatrix,
    /// `R^{(1+eta)/2}`.
    pub ratio_raise: CMatrix,
    /// `R^{(1-eta)/2}`.
    pub ratio_lower: CMatrix,
    /// `phi(ΔC)`.
    pub phi_casimir: CMatrix,
    /// `ψ(ΔJ0)`.
    pub psi_weight: CMatrix,
    pub spectrum: CoupledSpectrum,
}

pub fn build_induced_coproduct(t: &TensorRep, psi: &PsiSeries, spectral_tol: f64) -> Result<InducedCoproduct> {
    build_induced_coproduct_with(t, psi, spectral_tol, RatioOperator::DividedDifference)
}

pub fn build_induced_coproduct_with(
    t: &TensorRep,
    psi: &PsiSeries,
    spectral_tol: f64,
    ratio: RatioOperator,
) -> Result<InducedCoproduct> {
    if psi.q() != t.q() {
        return Err(Error::ParameterMismatch("q"));
    }
    let eta = t.left.eta();
    let spectrum = t.spectrum(spectral_tol)?;
    let (ratio_raise, ratio_lower) = match ratio {
        RatioOperator::DividedDifference => (
            spectrum.apply(|pt| Ok(eta.raising().apply(divided_difference(psi, pt)?)))?,
            spectrum.apply(|pt| Ok(eta.lowering().apply(divided_difference(psi, pt)?)))?,
        ),
        RatioOperator::Identity => {
            let id = CMatrix::identity(t.dim(), t.dim());
            (id.clone(), id)
        }
    };
    let phi_casimir = spectrum.apply(|pt| psi.eval_phi_of_casimir(pt.casimir))?;
    let psi_weight = diag(&t.weights.iter().map(|&m| psi.eval(m)).collect::<Vec<_>>());
    let jhat_plus = &t.j_plus * &ratio_raise;
    let jhat_minus = &ratio_lower * &t.j_minus;
    if !is_finite(&jhat_plus) || !is_finite(&jhat_minus) || !is_finite(&phi_casimir) {
        return Err(Error::NonFinite("induced coproduct"));
    }
    Ok(InducedCoproduct { jhat_plus, jhat_minus, ratio_raise, ratio_lower, phi_casimir, psi_weight, spectrum })
}

/// Coupled basis from numerical eigenvectors: for each spin `J` (descending) the
/// highest-weight eigenvector of the `M = J` block, lowered by ΔJ- and
/// normalized to the classical irrep's matrix elements. Columns are ordered
/// `J` descending, then `m = J..-J`.
pub fn coupled_basis(t: &TensorRep) -> Result<(CMatrix, Vec<HalfInt>)> {
    let q = t.q();
    let eta = t.left.eta();
    let spins = t.spins();
    let n = t.dim();
    let mut basis = CMatrix::zeros(n, n);
    let mut col = 0;
    for &j in spins.iter().rev() {
        let block = t.blocks.iter().find(|b| b.weight == j).expect("block at weight J exists");
        let c = classical_casimir_value(j, q)?;
        let sub = t.casimir.select_rows(&block.indices).select_columns(&block.indices);
        let pair = eigen_decompose(&sub)?
            .into_iter()
            .min_by(|a, b| (a.value - c).norm().total_cmp(&(b.value - c).norm()))
            .expect("non-empty block");
        let mut v = CVector::zeros(n);
        for (a, &ia) in block.indices.iter().enumerate() {
            v[ia] = pair.vector[a];
        }
        for m in j.weights_descending() {
            basis.set_column(col, &v);
            col += 1;
            if m != -j {
                let down = classical_casimir_value(m - HalfInt::ONE, q)?;
                v = (&t.j_minus * &v) / eta.lowering().apply(c - down);
            }
        }
    }
    Ok((basis, spins.into_iter().rev().collect()))
}

/// ΔĴ± from conjugating the direct sum of spin-`J` mapped irreps into the
/// product basis. Independent of the spectral calculus.
pub fn oracle_coproduct(t: &TensorRep) -> Result<(CMatrix, CMatrix)> {
    let (basis, spins) = coupled_basis(t)?;
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::Eigensolver("coupled basis is singular".into()))?;
    let n = t.dim();
    let (mut plus, mut minus) = (CMatrix::zeros(n, n), CMatrix::zeros(n, n));
    let mut offset = 0;
    for j in spins {
        let rep = build_mapped(build_classical(j, t.left.eta(), t.q())?, t.left.psi.clone())?;
        let d = dimension(j);
        plus.view_mut((offset, offset), (d, d)).copy_from(&rep.jhat_plus);
        minus.view_mut((offset, offset), (d, d)).copy_from(&rep.jhat_minus);
        offset += d;
    }
    Ok((&basis * plus * &inv, &basis * minus * &inv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoproductTolerances {
    pub match_tol: f64,
    /// For relations that pass through the spectral calculus.
    pub commutator_tol: f64,
    pub spectral_tol: f64,
}

impl CoproductTolerances {
    pub fn from_params(params: &AlgebraParams) -> Self {
        CoproductTolerances {
            match_tol: params.match_tol,
            commutator_tol: 10.0 * params.match_tol,
            spectral_tol: params.spectral_tol,
        }
    }
}

/// Max over coupled `J` of the disagreement between `tr(P_J W)` and `tr(W)` on
/// the spin-`J` irrep, over all words `W` of length 1..=4 in (Ĵ+, Ĵ-, q^{2J0}).
pub fn block_word_trace_residual(t: &TensorRep, ind: &InducedCoproduct) -> Result<f64> {
    let letters_t = [&ind.jhat_plus, &ind.jhat_minus, &t.k2];
    let mut worst = 0.0f64;
    for j in t.spins() {
        let rep = build_mapped(build_classical(j, t.left.eta(), t.q())?, t.left.psi.clone())?;
        let letters_i = [&rep.jhat_plus, &rep.jhat_minus, &rep.base.k2];
        let p = ind.spectrum.projector(j);
        let mut diffs = 0.0f64;
        let mut scale = 0.0f64;
        let mut stack: Vec<(CMatrix, CMatrix, usize)> = vec![(p, CMatrix::identity(rep.dim(), rep.dim()), 0)];
        while let Some((wt, wi, len)) = stack.pop() {
            if len > 0 {
                let (a, b) = (wt.trace(), wi.trace());
                diffs = diffs.max((a - b).norm());
                scale = scale.max(b.norm());
            }
            if len < 4 {
                for k in 0..3 {
                    stack.push((&wt * letters_t[k], &wi * letters_i[k], len + 1));
                }
            }
        }
        worst = worst.max(diffs / (1.0 + scale));
    }
    Ok(worst)
}

fn sorted_spectrum_residual(t: &TensorRep, spectral_tol: f64) -> Result<f64> {
    let got = oracle_eigensolve(&t.casimir, spectral_tol)?;
    let mut want = Vec::with_capacity(t.dim());
    for j in t.spins() {
        let c = classical_casimir_value(j, t.q())?;
        want.extend(std::iter::repeat_n(c, dimension(j)));
    }
    crate::linalg::sort_spectrum(&mut want);
    let diff = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = want.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(diff / (1.0 + scale))
}

/// Residual report for the induced coproduct on one tensor product.
pub fn check_coproduct(
    t: &TensorRep,
    ind: &InducedCoproduct,
    chi: &WeightFunction,
    echo: ParamsEcho,
    tol: CoproductTolerances,
) -> Result<CheckReport> {
    let q = t.q();
    let q2 = q * q;
    let mut report = CheckReport::new(echo);

    let (hp, hm) = (&ind.jhat_plus, &ind.jhat_minus);
    let graded = &t.k2 * hp * &t.k2_inv - hp * q2;
    report.push(Check::new("grading_raise", scaled_residual(&graded, &[&t.k2, hp]), tol.match_tol));
    let graded = &t.k2 * hm * &t.k2_inv - hm / q2;
    report.push(Check::new("grading_lower", scaled_residual(&graded, &[&t.k2, hm]), tol.match_tol));

    let chi_diag = diag(&t.weights.iter().map(|&m| chi.eval(m, q)).collect::<Vec<_>>());
    report.push(Check::new("commutator_chi", commutator_residual(hp, hm, Some(&chi_diag)), tol.commutator_tol));

    let mut bracket = Vec::with_capacity(t.dim());
    for &m in &t.weights {
        bracket.push(q_bracket(m + m, q)?);
    }
    let bracket = diag(&bracket);
    report.push(Check::new(
        "classical_commutator",
        commutator_residual(&t.j_plus, &t.j_minus, Some(&bracket)),
        tol.match_tol,
    ));
    report.push(Check::new("casimir_weight", commutator_residual(&t.casimir, &t.k2, None), tol.match_tol));
    report.push(Check::new("casimir_spectrum", sorted_spectrum_residual(t, tol.spectral_tol)?, tol.spectral_tol));

    let phi = &ind.phi_casimir;
    for (name, x) in [("phi_central_raise", hp), ("phi_central_lower", hm), ("phi_central_k2", &t.k2)] {
        report.push(Check::new(name, commutator_residual(phi, x, None), tol.commutator_tol));
    }
    let chat = hm * hp + &ind.psi_weight - phi;
    report.push(Check::new(
        "induced_casimir",
        scaled_residual(&chat, &[hp, hm, &ind.psi_weight, phi]),
        tol.commutator_tol,
    ));

    report.push(Check::new("block_word_traces", block_word_trace_residual(t, ind)?, tol.spectral_tol));

    let (op, om) = oracle_coproduct(t)?;
    let agree = scaled_residual(&(hp - &op), &[&op]).max(scaled_residual(&(hm - &om), &[&om]));
    report.push(Check::new("oracle_agreement", agree, tol.spectral_tol));

    let (basis, spins) = coupled_basis(t)?;
    let mut col = 0;
    let mut annihilated = 0.0f64;
    for j in spins {
        let v = basis.column(col).into_owned();
        annihilated = annihilated.max(max_abs(&CMatrix::from_column_slice(t.dim(), 1, (hp * &v).as_slice())));
        col += dimension(j);
    }
    let scale = max_abs(hp) * max_abs(&basis);
    report.push(Check::new("highest_weight_annihilated", annihilated / (1.0 + scale), tol.spectral_tol));
    Ok(report)
}

/// Generators whose counit and antipode are transported to an irrep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    JPlus,
    JMinus,
    /// `q^{J0}`.
    K,
    KInv,
    JHatPlus,
    JHatMinus,
}

/// Counit and base antipode evaluated on one irrep.
#[derive(Debug, Clone, Copy)]
pub struct InducedCounitAntipode<'a> {
    rep: &'a Irrep,
}

pub fn induced_counit_antipode(rep: &Irrep) -> InducedCounitAntipode<'_> {
    InducedCounitAntipode { rep }
}

impl InducedCounitAntipode<'_> {
    /// `ε` annihilates ladder operators and sends `q^{±J0}` to 1.
    pub fn counit(&self, g: Generator) -> Scalar {
        match g {
            Generator::K | Generator::KInv => real(1.0),
            _ => real(0.0),
        }
    }

    pub fn generator(&self, g: Generator) -> CMatrix {
        match g {
            Generator::JPlus => self.rep.base.j_plus.clone(),
            Generator::JMinus => self.rep.base.j_minus.clone(),
            Generator::K => weight_power(self.rep, HalfInt::ONE),
            Generator::KInv => weight_power(self.rep, -HalfInt::ONE),
            Generator::JHatPlus => self.rep.jhat_plus.clone(),
            Generator::JHatMinus => self.rep.jhat_minus.clone(),
        }
    }

    /// `S(J±) = -q^{±1} J±`, `S(q^{±J0}) = q^{∓J0}`. `None` for the hatted
    /// generators, whose induced antipode is not determined.
    pub fn antipode(&self, g: Generator) -> Option<CMatrix> {
        let q = self.rep.q();
        match g {
            Generator::JPlus => Some(self.generator(g) * (-q)),
            Generator::JMinus => Some(self.generator(g) * (-q.inv())),
            Generator::K => Some(self.generator(Generator::KInv)),
            Generator::KInv => Some(self.generator(Generator::K)),
            Generator::JHatPlus | Generator::JHatMinus => None,
        }
    }
}

/// `(ε ⊗ id)Δ` and `(id ⊗ ε)Δ` on the hatted generators: tensoring with the
/// trivial irrep on either side must reproduce `Ĵ±`. Returns the larger residual.
pub fn counit_residual(rep: &Arc<Irrep>, spectral_tol: f64) -> Result<f64> {
    let trivial = Arc::new(build_mapped(build_classical(HalfInt::ZERO, rep.eta(), rep.q())?, rep.psi.clone())?);
    let mut worst = 0.0f64;
    for (l, r) in [(trivial.clone(), rep.clone()), (rep.clone(), trivial)] {
        let t = build_tensor(l, r)?;
        let ind = build_induced_coproduct(&t, &rep.psi, spectral_tol)?;
        worst = worst
            .max(scaled_residual(&(&ind.jhat_plus - &rep.jhat_plus), &[&rep.jhat_plus]))
            .max(scaled_residual(&(&ind.jhat_minus - &rep.jhat_minus), &[&rep.jhat_minus]));
    }
    Ok(worst)
}
