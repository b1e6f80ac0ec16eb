use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

/// Run settings shared by `zeros` and `verify`. A JSON file supplies
/// defaults and command-line flags override it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub coef: Option<String>,
    /// `α,β` over the reference basis of the family.
    pub sol: Option<String>,
    /// `f(0),f'(0)`.
    pub ic: Option<String>,
    pub rmax: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub theorems: Option<Vec<String>>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub angles: Option<usize>,
    pub levels: Option<u32>,
    pub samples: Option<usize>,
    /// Boundary angle for the accumulation scan.
    pub zeta: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` win.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            coef: flags.coef.or(self.coef),
            sol: flags.sol.or(self.sol),
            ic: flags.ic.or(self.ic),
            rmax: flags.rmax.or(self.rmax),
            tol: flags.tol.or(self.tol),
            out: flags.out.or(self.out),
            theorems: flags.theorems.or(self.theorems),
            c: flags.c.or(self.c),
            k: flags.k.or(self.k),
            p: flags.p.or(self.p),
            angles: flags.angles.or(self.angles),
            levels: flags.levels.or(self.levels),
            samples: flags.samples.or(self.samples),
            zeta: flags.zeta.or(self.zeta),
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if let Some(r) = self.rmax {
            if !(r > 0.0 && r < 1.0) {
                return Err(Failure::Usage(format!("rmax must lie in (0, 1), got {r}")));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Failure::Usage(format!("tol must be positive, got {t}")));
            }
        }
        if self.sol.is_some() && self.ic.is_some() {
            return Err(Failure::Usage("give either --sol or --ic, not both".into()));
        }
        Ok(())
    }
}
