//! The built-in experiments and what each needs to run.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use plab_core::{Grid, PartitionOfUnity};
use serde::de::DeserializeOwned;

use crate::experiments;
use crate::report::ExperimentReport;
use crate::scenario::Scenario;

/// Everything an experiment may use: the scenario, its grid and a private
/// artifact directory under the scenario output directory.
pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub grid: Grid,
    pub pu: PartitionOfUnity,
    pub key: &'static str,
    root: PathBuf,
}

impl<'a> Context<'a> {
    pub fn new(scenario: &'a Scenario, key: &'static str) -> Result<Self> {
        Ok(Context {
            scenario,
            grid: scenario.grid()?,
            pu: PartitionOfUnity::classical(),
            key,
            root: scenario.output_dir.clone(),
        })
    }

    pub fn options<T: DeserializeOwned + Default>(&self) -> Result<T> {
        self.scenario.options_for(self.key)
    }

    /// Directory of this experiment's artifacts, created on demand.
    pub fn dir(&self) -> Result<PathBuf> {
        let d = self.root.join(self.key);
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }

    /// Writes `contents` to `name` inside the experiment directory and
    /// records its path relative to the output directory.
    pub fn write(&self, report: &mut ExperimentReport, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.dir()?.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        report.artifact(self.relative(&path));
        Ok(path)
    }

    pub fn relative(&self, path: &Path) -> PathBuf {
        path.strip_prefix(&self.root).map(Path::to_path_buf).unwrap_or_else(|_| path.to_path_buf())
    }

    pub fn seed(&self) -> u64 {
        self.scenario.seed
    }
}

pub type Runner = fn(&Context) -> Result<ExperimentReport>;

pub struct Experiment {
    pub key: &'static str,
    /// Numbered acceptance criteria the experiment's flags feed.
    pub criteria: &'static [u8],
    pub summary: &'static str,
    pub run: Runner,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment {
        key: "partition_audit",
        criteria: &[1, 2],
        summary: "partition identities on the lattice and block reconstruction of random fields",
        run: experiments::spectral::partition_audit,
    },
    Experiment {
        key: "bernstein_sweep",
        criteria: &[4],
        summary: "Bernstein constants across dyadic blocks",
        run: experiments::spectral::bernstein_sweep,
    },
    Experiment {
        key: "bony_audit",
        criteria: &[3],
        summary: "Bony identity, paraproduct localization, commutator and stretching estimates",
        run: experiments::bony::bony_audit,
    },
    Experiment {
        key: "lorentz_suite",
        criteria: &[5],
        summary: "Lorentz norms of indicators, the diagonal case, products and nesting",
        run: experiments::norms::lorentz_suite,
    },
    Experiment {
        key: "embedding_sweep",
        criteria: &[5],
        summary: "omega/r in L^{3,1} against the Besov norm of u over a flow corpus",
        run: experiments::norms::embedding_sweep,
    },
    Experiment {
        key: "geometry_audit",
        criteria: &[6],
        summary: "axisymmetric structure of fields, curls and blocks; Biot-Savart round trip",
        run: experiments::geometry::geometry_audit,
    },
    Experiment {
        key: "model_v_suite",
        criteria: &[8],
        summary: "divergence and angular structure under the linear vorticity model",
        run: experiments::geometry::model_v_suite,
    },
    Experiment {
        key: "conservation_run",
        criteria: &[7],
        summary: "drift of the alpha norms and the energy, with a refined comparison run",
        run: experiments::flow::conservation_run,
    },
    Experiment {
        key: "biot_savart_bound",
        criteria: &[10],
        summary: "||u_r/r||_inf against ||alpha||_{L^{3,1}} over a flow corpus",
        run: experiments::flow::biot_savart_bound,
    },
    Experiment {
        key: "vorticity_growth",
        criteria: &[10],
        summary: "u_r/r, omega and u sup norms along an Euler run",
        run: experiments::flow::vorticity_growth,
    },
    Experiment {
        key: "decomposition_suite",
        criteria: &[9],
        summary: "tilde family closure, block interaction envelope and growth fit",
        run: experiments::decomposition::decomposition_suite,
    },
    Experiment {
        key: "norm_growth",
        criteria: &[9],
        summary: "growth of the Besov norms of omega and u along an Euler run",
        run: experiments::flow::norm_growth,
    },
    Experiment {
        key: "dilation_audit",
        criteria: &[11],
        summary: "B^0_{inf,1} norm under anisotropic dilation",
        run: experiments::norms::dilation_audit,
    },
    Experiment {
        key: "transport_audit",
        criteria: &[12],
        summary: "Gronwall constants of the transport estimate",
        run: experiments::transport::transport_audit,
    },
];

pub fn find(key: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.key == key)
}

pub fn keys() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.key).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::CHECKS;

    #[test]
    fn fourteen_keys_each_with_checks() {
        assert_eq!(REGISTRY.len(), 14);
        for e in REGISTRY {
            assert!(!e.criteria.is_empty());
            for c in e.criteria {
                assert!(CHECKS.iter().any(|k| k.criterion == *c), "{} criterion {c}", e.key);
            }
        }
        let mut k = keys();
        k.sort();
        k.dedup();
        assert_eq!(k.len(), 14);
    }
}
