//! The minimal L∞ structure on cohomology, read off the Chen field.
//!
//! ∂⃗Γ_[1] = Σₙ (−1)^{n(n+1)/2}/n! μₙ(Γ_[1]•…•Γ_[1]), so the Taylor
//! coefficients of ∂ are the μₙ up to that factor and the polarization count.

use std::fmt;

use thiserror::Error;

use crate::algebras::{validate_linf, AlgebraSpec, LInfinityMorphism, LInfinityStructure, Report, SparseTensor};
use crate::master::MasterSolution;
use crate::splitting::Splitting;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransferError {
    #[error("arity cap {cap} exceeds the truncation {truncation}")]
    CapAboveTruncation { cap: usize, truncation: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalLInfinity {
    pub structure: LInfinityStructure,
    pub arity_cap: usize,
}

impl MinimalLInfinity {
    pub fn op(&self, n: usize) -> &SparseTensor {
        &self.structure.ops[n - 1]
    }

    /// Lowest arity with a nonzero operation, if any.
    pub fn lowest_arity(&self) -> Option<usize> {
        (2..=self.arity_cap).find(|&n| !self.op(n).is_zero())
    }
}

pub fn extract_linf(sol: &MasterSolution, cap: usize) -> Result<MinimalLInfinity, TransferError> {
    if cap > sol.truncation {
        return Err(TransferError::CapAboveTruncation { cap, truncation: sol.truncation });
    }
    let host = sol.cohomology.graded_basis();
    let structure = LInfinityStructure::from_homological_field(host, &sol.chen, cap);
    Ok(MinimalLInfinity { structure, arity_cap: cap })
}

/// The L∞ relations, μ₁ = 0 and degree homogeneity.
pub fn verify_minimal(m: &MinimalLInfinity) -> Report {
    let mut rep = validate_linf(&m.structure, m.arity_cap);
    for (o, ins, c) in m.op(1).entries() {
        rep.push("mu_1 = 0", &[ins[0], o], format!("coefficient {c}"));
    }
    rep.extend(m.structure.degree_violations());
    rep
}

/// Induced bracket p[i(x)•i(y)] on the class basis, stored on sorted pairs.
pub fn induced_bracket(spec: &AlgebraSpec, s: &Splitting) -> SparseTensor {
    let h = s.dim_h();
    let mut t = SparseTensor::new(2);
    for a in 0..h {
        for b in a..h {
            let v = spec.bracket_vec(&s.i.column(a), &s.i.column(b));
            for (o, c) in s.p.apply(&v).into_iter().enumerate() {
                t.add(o, &[a, b], c);
            }
        }
    }
    t
}

/// Γ viewed as an L∞ quasi-isomorphism from (H, μ) to (g, d, [•]).
pub fn quasi_isomorphism(spec: &AlgebraSpec, sol: &MasterSolution, cap: usize) -> LInfinityMorphism {
    LInfinityMorphism::from_pullback(
        sol.cohomology.graded_basis(),
        spec.basis.clone(),
        sol.gamma.components(),
        cap.min(sol.truncation),
    )
}

/// Human-readable summary of the higher operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasseyReport {
    pub lowest_arity: Option<usize>,
    pub components: Vec<String>,
}

impl fmt::Display for MasseyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lowest_arity {
            None => writeln!(f, "formal: all higher operations vanish"),
            Some(n) => {
                writeln!(f, "lowest arity {n}")?;
                for c in &self.components {
                    writeln!(f, "  {c}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn massey_report(m: &MinimalLInfinity) -> MasseyReport {
    let names = &m.structure.host.names;
    let lowest = m.lowest_arity();
    let mut components = Vec::new();
    if let Some(n) = lowest {
        for (o, ins, c) in m.op(n).entries() {
            let args: Vec<&str> = ins.iter().map(|&i| names[i].as_str()).collect();
            components.push(format!("mu_{n}({}) = {c} {}", args.join(", "), names[o]));
        }
    }
    MasseyReport { lowest_arity: lowest, components }
}
