//! Command-line pipeline: deterministic, machine-readable output.
//! JSON is canonical; text, DOT and CSV are renderings of the same data.

use std::fs;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fem::{discretize, spectrum, QuantumGraphSpec};
use crate::frucht::{frucht_graph, verify_realization};
use crate::graph::SimpleGraph;
use crate::group::{parse_group_file, FiniteGroup};
use crate::report::{
    AutReport, BuildAnnotation, CounterexampleReport, RealizeReport, SpectrumReport, VerifyReport,
};
use crate::symmetry::paw_counterexample;
use crate::SearchCaps;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
    Dot,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            "dot" => Ok(Self::Dot),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Command {
    /// Group file -> Frucht graph file (+ JSON annotation).
    Build { group_file: PathBuf },
    /// Graph file -> symmetry group orders and Whitney status.
    Aut { graph_file: PathBuf },
    /// Graph file -> eigenvalues of the constrained Laplacian.
    Spectrum { graph_file: PathBuf },
    /// Graph file -> symmetry certificates.
    Verify { graph_file: PathBuf },
    /// Group file -> graph -> certificates (the full pipeline).
    Realize { group_file: PathBuf },
    /// Reproduce the paw counterexample end to end.
    Counterexample { which: String },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub mesh_n: usize,
    /// Modal count for `spectrum`; defaults to min(12, domain dimension).
    pub modes: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Extra JSON annotation path for `build`.
    pub annotation: Option<PathBuf>,
    pub caps: SearchCaps,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            mesh_n: 8,
            modes: None,
            tol: 1e-10,
            seed: 7,
            format: OutputFormat::Json,
            out: None,
            annotation: None,
            caps: SearchCaps::default().with_env_override(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mesh_n < 2 {
            return Err(Error::MeshTooCoarse(self.mesh_n));
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(Error::Parse("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Evolution-residual tolerance tied to the matrix tolerance.
    pub fn evolution_tol(&self) -> f64 {
        self.tol * 100.0
    }
}

/// Result of a run: the rendered primary output and whether a verification
/// subcommand detected a failure (exit code 4).
#[derive(Debug)]
pub struct RunOutcome {
    pub rendered: String,
    pub verification_failed: bool,
}

fn read_graph(path: &PathBuf) -> Result<SimpleGraph> {
    SimpleGraph::parse(&fs::read_to_string(path)?)
}

fn read_group(path: &PathBuf, caps: &SearchCaps) -> Result<FiniteGroup> {
    parse_group_file(&fs::read_to_string(path)?, caps.group_order)
}

fn to_json<S: serde::Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let caps = config.caps;
    let mut verification_failed = false;

    let rendered = match &config.command {
        Command::Build { group_file } => {
            let group = read_group(group_file, &caps)?;
            let real = frucht_graph(&group)?;
            let annotation = BuildAnnotation::new(&real);
            if let Some(path) = &config.annotation {
                fs::write(path, to_json(&annotation)?)?;
            }
            match config.format {
                OutputFormat::Dot => real.graph.to_dot(),
                OutputFormat::Json => to_json(&serde_json::json!({
                    "graph_file": real.graph.to_file_string(),
                    "annotation": annotation,
                }))?,
                _ => real.graph.to_file_string(),
            }
        }

        Command::Aut { graph_file } => {
            let graph = read_graph(graph_file)?;
            let (whitney, groups) = crate::automorphism::whitney_status(&graph, &caps)?;
            let report = AutReport::new(&graph, whitney, &groups)?;
            match config.format {
                OutputFormat::Text => report.render_text(),
                _ => to_json(&report)?,
            }
        }

        Command::Spectrum { graph_file } => {
            let graph = read_graph(graph_file)?;
            let d = discretize::<f64>(&QuantumGraphSpec {
                graph,
                mesh_n: config.mesh_n,
            })?;
            let k = config.modes.unwrap_or_else(|| d.domain_dim().min(12));
            let sp = spectrum(&d, k)?;
            let report = SpectrumReport::new(&d, &sp, 1e-6);
            match config.format {
                OutputFormat::Text => report.render_text(),
                OutputFormat::Csv => SpectrumReport::render_csv(&d, &sp),
                _ => to_json(&report)?,
            }
        }

        Command::Verify { graph_file } => {
            let graph = read_graph(graph_file)?;
            let spec = QuantumGraphSpec {
                graph: graph.clone(),
                mesh_n: config.mesh_n,
            };
            let report = crate::symmetry::symmetry_report_with_modes::<f64>(
                &spec,
                &caps,
                config.modes,
                config.seed,
                config.tol,
                config.evolution_tol(),
            )?;
            verification_failed = !report.all_induced_pass;
            let report = VerifyReport::new(
                &graph,
                config.mesh_n,
                config.tol,
                config.evolution_tol(),
                config.seed,
                &report,
            );
            match config.format {
                OutputFormat::Text => report.render_text(),
                _ => to_json(&report)?,
            }
        }

        Command::Realize { group_file } => {
            let group = read_group(group_file, &caps)?;
            // Decorated graphs outgrow the conservative automorphism cap;
            // QFG_CAP still overrides.
            let caps = SearchCaps {
                node_aut: caps.node_aut.max(SearchCaps::for_realization().node_aut),
                ..caps
            };
            let real = frucht_graph(&group)?;
            let witness = verify_realization(&group, &real.graph, &caps)?;
            let aut_order =
                crate::automorphism::node_automorphisms(&real.graph, &caps)?.len();
            let spec = QuantumGraphSpec {
                graph: real.graph.clone(),
                mesh_n: config.mesh_n,
            };
            let symmetry = if real.graph.edge_count() > 0 {
                Some(crate::symmetry::symmetry_report_with_modes::<f64>(
                    &spec,
                    &caps,
                    config.modes,
                    config.seed,
                    config.tol,
                    config.evolution_tol(),
                )?)
            } else {
                None // single-node realization of the trivial group
            };
            let isomorphic = witness.is_some();
            let all_pass = symmetry.as_ref().map(|s| s.all_induced_pass).unwrap_or(true);
            verification_failed = !isomorphic || !all_pass;
            let verify = match &symmetry {
                Some(s) => VerifyReport::new(
                    &real.graph,
                    config.mesh_n,
                    config.tol,
                    config.evolution_tol(),
                    config.seed,
                    s,
                ),
                None => VerifyReport {
                    nodes: real.graph.node_count(),
                    edges: 0,
                    mesh: config.mesh_n,
                    tol: config.tol,
                    evolution_tol: config.evolution_tol(),
                    seed: config.seed,
                    node_aut_order: 1,
                    edge_sym_order: 1,
                    induced_order: 1,
                    whitney_status: "all_isomorphic".into(),
                    induced: Vec::new(),
                    non_induced: Vec::new(),
                    phases: Vec::new(),
                    realized_order_at_least: 1,
                    all_induced_pass: true,
                },
            };
            let report = RealizeReport {
                group_order: group.order(),
                graph_nodes: real.graph.node_count(),
                graph_edges: real.graph.edge_count(),
                aut_order,
                isomorphic,
                witness,
                verify,
            };
            match config.format {
                OutputFormat::Text => report.render_text(),
                _ => to_json(&report)?,
            }
        }

        Command::Counterexample { which } => {
            if which != "paw" {
                return Err(Error::Parse(format!(
                    "unknown counterexample `{which}` (only `paw` is available)"
                )));
            }
            let cx = paw_counterexample::<f64>(config.mesh_n, config.seed)?;
            let report = CounterexampleReport::new(&cx);
            match config.format {
                OutputFormat::Text => report.render_text(),
                _ => to_json(&report)?,
            }
        }
    };

    if let Some(path) = &config.out {
        fs::write(path, &rendered)?;
    }
    Ok(RunOutcome {
        rendered,
        verification_failed,
    })
}

/// Exit code for an error, per the documented contract: 2 parse errors,
/// 3 cap exceeded, 4 failed verification, 1 anything else.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::InvalidGraph(_)
        | Error::InvalidTable(_)
        | Error::NotAPermutation(_) => 2,
        Error::CapExceeded { .. } => 3,
        Error::VerificationFailed(_) => 4,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let mut path = std::env::temp_dir();
        path.push(format!("qgsym-test-{}-{}", std::process::id(), name));
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn aut_on_harary_example() {
        let path = write_temp("harary.graph", "nodes 4\n0 1\n");
        let config = RunConfig {
            format: OutputFormat::Json,
            ..RunConfig::new(Command::Aut { graph_file: path })
        };
        let out = run(&config).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(v["node_aut_order"], 4);
        assert_eq!(v["induced_order"], 1);
        assert_eq!(v["whitney_status"], "harary_fails");
    }

    #[test]
    fn determinism_byte_identical_json() {
        let path = write_temp("paw.graph", &crate::graph::paw().to_file_string());
        let config = RunConfig::new(Command::Verify {
            graph_file: path.clone(),
        });
        let a = run(&config).unwrap().rendered;
        let b = run(&config).unwrap().rendered;
        assert_eq!(a, b);
        // Different seed changes the probe states but not the verdicts.
        let config2 = RunConfig {
            seed: 11,
            ..RunConfig::new(Command::Verify { graph_file: path })
        };
        let c = run(&config2).unwrap().rendered;
        let va: serde_json::Value = serde_json::from_str(&a).unwrap();
        let vc: serde_json::Value = serde_json::from_str(&c).unwrap();
        assert_eq!(va["all_induced_pass"], vc["all_induced_pass"]);
    }

    #[test]
    fn counterexample_paw_runs() {
        let config = RunConfig::new(Command::Counterexample {
            which: "paw".into(),
        });
        let out = run(&config).unwrap();
        assert!(!out.verification_failed);
        let v: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(v["edge_perm_labels"], "(e1 e4)");
        assert_eq!(v["center_node"], 2);
        assert_eq!(v["offending"]["domain_invariant"], false);
    }

    #[test]
    fn rejects_bad_config() {
        let config = RunConfig {
            mesh_n: 1,
            ..RunConfig::new(Command::Counterexample {
                which: "paw".into(),
            })
        };
        assert!(run(&config).is_err());
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code_for(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code_for(&Error::InvalidGraph("x".into())), 2);
        assert_eq!(
            exit_code_for(&Error::CapExceeded {
                what: "x",
                limit: 1,
                actual: 2
            }),
            3
        );
        assert_eq!(exit_code_for(&Error::VerificationFailed("x".into())), 4);
        assert_eq!(exit_code_for(&Error::Disconnected), 1);
    }
}
