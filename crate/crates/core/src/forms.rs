//! Built-in 1-cochains used as decomposition inputs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{interior_restriction, Cochain};
use crate::dec::Dec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinForm {
    /// `dx` integrated exactly along every edge.
    Dx,
    /// `d` of a random 0-cochain supported on interior vertices.
    Exact,
    /// `δ` of `f·Vol` for a random `f` supported on interior faces.
    Coexact,
    /// `Exact + Coexact + Dx`, drawn from one seed.
    Mixed,
    /// A compactly supported mix: `d b + δ(b·Vol) + b·dx` with the radial
    /// bump `b = (1 − ρ²)³` on `ρ < 1`. The last term is neither exact nor
    /// co-exact with compactly supported potentials.
    Bump,
}

impl BuiltinForm {
    pub const ALL: [BuiltinForm; 5] =
        [BuiltinForm::Dx, BuiltinForm::Exact, BuiltinForm::Coexact, BuiltinForm::Mixed, BuiltinForm::Bump];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinForm::Dx => "dx",
            BuiltinForm::Exact => "exact",
            BuiltinForm::Coexact => "coexact",
            BuiltinForm::Mixed => "mixed",
            BuiltinForm::Bump => "bump",
        }
    }

    pub fn build(self, dec: &Dec, seed: u64) -> Result<Cochain> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            BuiltinForm::Dx => Ok(dec.sampled_dx()),
            BuiltinForm::Exact => random_exact(dec, &mut rng),
            BuiltinForm::Coexact => random_coexact(dec, &mut rng),
            BuiltinForm::Mixed => {
                let exact = random_exact(dec, &mut rng)?;
                let coexact = random_coexact(dec, &mut rng)?;
                Ok(&(&exact + &coexact) + &dec.sampled_dx())
            }
            BuiltinForm::Bump => bump(dec),
        }
    }
}

impl fmt::Display for BuiltinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let name = s.strip_prefix("builtin:").unwrap_or(s);
        Self::ALL.into_iter().find(|f| f.name() == name).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|f| f.name()).collect();
            Error::Invalid(format!("unknown builtin form `{name}`, expected one of {}", known.join(", ")))
        })
    }
}

fn random_exact(dec: &Dec, rng: &mut ChaCha8Rng) -> Result<Cochain> {
    let n = dec.complex.num_vertices();
    let beta = Cochain::new(0, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    dec.d(&interior_restriction(&beta, &dec.complex))
}

fn random_coexact(dec: &Dec, rng: &mut ChaCha8Rng) -> Result<Cochain> {
    let areas = dec.stars.face_areas();
    let omega = Cochain::new(2, areas.iter().map(|a| rng.gen_range(-1.0..1.0) * a).collect());
    dec.codifferential(&interior_restriction(&omega, &dec.complex))
}

fn bump_profile(rho: f64) -> f64 {
    if rho >= 1.0 {
        0.0
    } else {
        (1.0 - rho * rho).powi(3)
    }
}

fn bump(dec: &Dec) -> Result<Cochain> {
    let radii = dec.mesh.vertex_radii();
    let b: Vec<f64> = radii.iter().map(|&r| bump_profile(r)).collect();
    let exact = dec.d(&interior_restriction(&Cochain::new(0, b.clone()), &dec.complex))?;

    let areas = dec.stars.face_areas();
    let omega: Vec<f64> = dec
        .complex
        .faces()
        .iter()
        .zip(&areas)
        .map(|(t, area)| t.iter().map(|&v| b[v]).sum::<f64>() / 3.0 * area)
        .collect();
    let coexact = dec.codifferential(&interior_restriction(&Cochain::new(2, omega), &dec.complex))?;

    let dx = dec.sampled_dx();
    let carried: Vec<f64> = dec
        .complex
        .edges()
        .iter()
        .zip(dx.values())
        .map(|(&[p, q], g)| 0.5 * (b[p] + b[q]) * g)
        .collect();
    let carried = interior_restriction(&Cochain::new(1, carried), &dec.complex);
    Ok(&(&exact + &coexact) + &carried)
}
