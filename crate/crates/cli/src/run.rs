use std::time::Instant;

use lindbladlab::chain::{boundary_reset_model, reproduce_chain};
use lindbladlab::model::{assemble_liouvillian, cptp_check, lift_local, reset_dissipator_jumps};
use lindbladlab::steady::{gibbs_nogo, local_steady_state, product_factor_check, sepzero_diagnostics, SepzeroVerdict, SteadyStateAnalysis};
use lindbladlab::uniqueness::{
    ergodic_decomposition, frigerio_with_state, theorem23_verdict, yoshida_check, Theorem23Verdict, UniquenessVerdict,
    YoshidaVerdict,
};
use lindbladlab::{decompose_hamiltonian, ComplexMatrix, CompositeDims, Error, HamiltonianDecomposition, JumpSet, Liouvillian};
use rayon::prelude::*;

use crate::config::{ChainSpec, DissipatorSpec, ExplicitSpec, Scenario, ScenarioConfig, SystemSpec};
use crate::error::{CliError, Result};
use crate::matrix_io::{load_slot, Slot};
use crate::report::{
    AnalysisReport, ChainJson, CptpJson, DecompositionJson, MatrixJson, SepzeroJson, SweepPoint, SystemEcho, Verdict,
};

/// Time at which the CPTP check evaluates `exp(tL)`.
const CPTP_TIME: f64 = 1.0;

/// A system ready for analysis.
pub struct BuiltSystem {
    pub hdec: HamiltonianDecomposition,
    /// Jump set on the first factor when the dissipator is local.
    pub local: Option<JumpSet>,
    /// Stationary state of the local dissipator, when it is unique.
    pub rho_hat_a: Option<ComplexMatrix>,
    pub liou: Liouvillian,
    pub beta: Option<f64>,
}

fn chain_system(c: &ChainSpec) -> Result<BuiltSystem> {
    let model = boundary_reset_model(c.length, c.beta, c.epsilon)?;
    let hdec = model.decomposition()?;
    let liou = assemble_liouvillian(&hdec, &model.boundary_jumps)?;
    Ok(BuiltSystem {
        hdec,
        local: Some(model.local_jumps),
        rho_hat_a: Some(model.rho_hat_a),
        liou,
        beta: Some(c.beta),
    })
}

fn explicit_system(config: &ScenarioConfig, x: &ExplicitSpec) -> Result<BuiltSystem> {
    let dims = CompositeDims::new(x.dim_a, x.dim_b)?;
    let d = dims.total();
    let slot = |name, dim, hermitian| Slot { name, dim, hermitian };
    let h = load_slot(&config.resolve(&x.hamiltonian), slot("hamiltonian", d, true))?;
    let hdec = decompose_hamiltonian(&h, dims)?;
    let load_jumps = |lamb_shift: &Option<std::path::PathBuf>, jumps: &[std::path::PathBuf], dim: usize| -> Result<JumpSet> {
        let k = match lamb_shift {
            Some(p) => load_slot(&config.resolve(p), slot("lamb shift", dim, true))?,
            None => ComplexMatrix::zeros(dim, dim),
        };
        let ls = jumps
            .iter()
            .map(|p| load_slot(&config.resolve(p), slot("jump operator", dim, false)))
            .collect::<Result<Vec<_>>>()?;
        Ok(JumpSet::new(k, ls)?)
    };
    let (local, rho_hat_a, jumps) = match &x.dissipator {
        DissipatorSpec::Reset { target, rate } => {
            let path = config.resolve(target);
            let rho = load_slot(&path, slot("reset target", x.dim_a, true))?;
            let local = reset_dissipator_jumps(&rho, *rate).map_err(|e| CliError::Matrix {
                file: path,
                message: e.to_string(),
            })?;
            let lifted = lift_local(&local, dims)?;
            (Some(local), Some(rho), lifted)
        }
        DissipatorSpec::Local { lamb_shift, jumps } => {
            let local = load_jumps(lamb_shift, jumps, x.dim_a)?;
            let rho = match local_steady_state(&local, config.tolerances.null_space) {
                Ok(r) => Some(r),
                Err(Error::NotErgodic(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let lifted = lift_local(&local, dims)?;
            (Some(local), rho, lifted)
        }
        DissipatorSpec::Global { lamb_shift, jumps } => (None, None, load_jumps(lamb_shift, jumps, d)?),
    };
    let liou = assemble_liouvillian(&hdec, &jumps)?;
    Ok(BuiltSystem {
        hdec,
        local,
        rho_hat_a,
        liou,
        beta: x.beta,
    })
}

pub fn build_system(config: &ScenarioConfig) -> Result<BuiltSystem> {
    match &config.system {
        SystemSpec::Chain(c) => chain_system(c),
        SystemSpec::Explicit(x) => explicit_system(config, x),
    }
}

fn echo(system: &SystemSpec) -> SystemEcho {
    match system {
        SystemSpec::Chain(c) => SystemEcho::Chain {
            length: c.length,
            beta: c.beta,
            epsilon: c.epsilon,
            compare_epsilon: c.compare_epsilon(),
        },
        SystemSpec::Explicit(x) => SystemEcho::Explicit {
            dim_a: x.dim_a,
            dim_b: x.dim_b,
            dissipator: match x.dissipator {
                DissipatorSpec::Reset { .. } => "reset",
                DissipatorSpec::Local { .. } => "local",
                DissipatorSpec::Global { .. } => "global",
            }
            .into(),
            beta: x.beta,
        },
    }
}

/// Runs `f`, adding its wall time to stage `name`.
fn timed<T>(report: &mut AnalysisReport, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *report.timings.stages.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64();
    out
}

fn frigerio_verdict(v: UniquenessVerdict) -> Verdict {
    match v {
        UniquenessVerdict::Unique => Verdict::Unique,
        UniquenessVerdict::NotUnique => Verdict::NotUnique,
        UniquenessVerdict::Inapplicable => Verdict::Inapplicable,
    }
}

fn bulk_to_verdict(v: Theorem23Verdict) -> Verdict {
    match v {
        Theorem23Verdict::UniquePositiveDefinite => Verdict::Unique,
        Theorem23Verdict::NotUnique => Verdict::NotUnique,
        Theorem23Verdict::Inapplicable => Verdict::Inapplicable,
    }
}

/// Kernel dimension and maximal-support state, filled into the report.
fn steady_core(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<ComplexMatrix> {
    let tol = config.tolerances;
    let (dim, rho) = timed(report, "stationary", || -> Result<_> {
        let analysis = SteadyStateAnalysis::new(&sys.liou, tol.null_space)?;
        Ok((analysis.kernel_dimension(), analysis.maximal_support_state()?))
    })?;
    let residual = sys.liou.apply(&rho)?.frobenius_norm();
    if residual > tol.stationary {
        return Err(CliError::Numerical(format!(
            "maximal-support state has residual {residual:e} above the stationary tolerance {:e}",
            tol.stationary
        )));
    }
    let min_eig = rho.min_eigenvalue()?;
    report.stationary_dimension = Some(dim);
    report.stationary_residual = Some(residual);
    report.min_eigenvalue = Some(min_eig);
    report.faithful = Some(min_eig > tol.positivity);
    report.maximal_support_state = Some(MatrixJson::from(&rho));
    Ok(rho)
}

fn steady_state(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    let tol = config.tolerances;
    let rho = steady_core(sys, config, report)?;
    match &sys.rho_hat_a {
        Some(rho_hat_a) => {
            let check = product_factor_check(&rho, sys.hdec.dims, rho_hat_a, tol.product)?;
            report.product_residual = Some(check.factorization.residual);
            report.marginal_deviation = Some(check.marginal_deviation);
            report.verdicts.product = Some(if check.passed() { Verdict::Product } else { Verdict::NotProduct });
        }
        None => {
            report.verdicts.product = Some(Verdict::Inapplicable);
            report.notes.push("product: dissipator has no unique local stationary state".into());
        }
    }
    let sep = sepzero_diagnostics(&rho, &sys.hdec, tol.product)?;
    report.sepzero = Some(SepzeroJson {
        residual_a: sep.residual_a,
        residual_b: sep.residual_b,
        residual_ab: sep.residual_ab,
        min_eigenvalue: sep.min_eigenvalue,
        commutator_residual: sep.commutator_residual,
    });
    report.verdicts.sepzero = Some(match sep.verdict {
        SepzeroVerdict::Holds => Verdict::Holds,
        SepzeroVerdict::Violated => Verdict::Violated,
        SepzeroVerdict::PreconditionsUnmet => Verdict::PreconditionsUnmet,
    });
    let cptp = timed(report, "cptp", || cptp_check(&sys.liou, CPTP_TIME, tol.cptp))?;
    report.cptp = Some(CptpJson {
        t: cptp.t,
        trace_deviation: cptp.trace_deviation,
        min_choi_eigenvalue: cptp.min_choi_eigenvalue,
    });
    report.verdicts.cptp = Some(if cptp.passed { Verdict::Pass } else { Verdict::Fail });
    Ok(())
}

fn uniqueness(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    let rho = steady_core(sys, config, report)?;
    let frigerio = timed(report, "frigerio", || frigerio_with_state(&sys.liou, &rho))?;
    report.verdicts.frigerio = Some(frigerio_verdict(frigerio.verdict));
    report.commutant_dimension = frigerio.commutant_dimension;
    if frigerio.verdict == UniquenessVerdict::Inapplicable {
        report.notes.push("frigerio: no faithful stationary state".into());
    }
    match &sys.local {
        Some(local) => {
            let t23 = timed(report, "theorem23", || theorem23_verdict(&sys.hdec, local))?;
            report.verdicts.theorem23 = Some(bulk_to_verdict(t23.verdict));
            report.bulk_dimension = t23.bulk_dimension;
            if let Some(reason) = t23.reason {
                report.notes.push(format!("theorem23: {reason}"));
            }
        }
        None => {
            report.verdicts.theorem23 = Some(Verdict::Inapplicable);
            report.notes.push("theorem23: dissipator does not act on the first factor only".into());
        }
    }
    let yoshida = timed(report, "yoshida", || yoshida_check(&sys.liou))?;
    report.verdicts.yoshida = Some(match yoshida.verdict {
        YoshidaVerdict::UniqueSufficient => Verdict::Unique,
        YoshidaVerdict::Inconclusive => Verdict::Inconclusive,
    });
    report.yoshida_dimension = Some(yoshida.dimension);
    Ok(())
}

fn no_go(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    let beta = sys.beta.expect("validated: no-go has beta");
    let Some(local) = &sys.local else {
        report.verdicts.gibbs = Some(Verdict::Inapplicable);
        report.notes.push("gibbs: dissipator does not act on the first factor only".into());
        return Ok(());
    };
    let tol = config.tolerances.gibbs;
    match timed(report, "gibbs", || gibbs_nogo(&sys.hdec, local, beta, tol)) {
        Ok(g) => {
            report.gibbs_residual = Some(g.residual);
            report.interaction_norm = Some(g.interaction_norm);
            report.verdicts.gibbs = Some(if g.gibbs_stationary {
                Verdict::GibbsStationary
            } else {
                Verdict::NotStationary
            });
        }
        Err(Error::NotErgodic(k)) => {
            report.interaction_norm = Some(sys.hdec.interaction_norm());
            report.verdicts.gibbs = Some(Verdict::Inapplicable);
            report.notes.push(format!("gibbs: local dissipator has {k} stationary states"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn decompose(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    steady_core(sys, config, report)?;
    match timed(report, "decomposition", || ergodic_decomposition(&sys.liou, config.seed)) {
        Ok(dec) => {
            report.decomposition_blocks = Some(dec.blocks());
            report.decomposition = Some(DecompositionJson {
                nullspace_dim: dec.nullspace_dim,
                center_dimension: dec.center_dimension,
                support_dimension: dec.support_dimension,
                transient_discarded: dec.transient_discarded,
                closure_residual: dec.closure_residual,
                adjoint_residual: dec.adjoint_residual,
                block_ranks: dec.center_projections.iter().map(|p| p.trace().re.round() as usize).collect(),
            });
            report.verdicts.decomposition = Some(Verdict::Pass);
        }
        Err(Error::NotAnAlgebra(r)) => {
            report.verdicts.decomposition = Some(Verdict::Inapplicable);
            report.notes.push(format!("decomposition: kernel of the adjoint is not an algebra (residual {r:e})"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn chain_json(c: &lindbladlab::chain::ChainReproduction) -> ChainJson {
    ChainJson {
        analytic_residual: c.analytic_residual,
        max_support_deviation: c.max_support_deviation,
        epsilon_deviation: c.epsilon_deviation,
        compare_epsilon: c.compare_epsilon,
        gibbs_residual: c.gibbs_residual,
        clauses: c.clauses,
        passed: c.passed(),
    }
}

fn chain(sys: &BuiltSystem, config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    let SystemSpec::Chain(spec) = &config.system else {
        unreachable!("validated: chain scenario has a chain system")
    };
    uniqueness(sys, config, report)?;
    let rep = timed(report, "reproduction", || {
        reproduce_chain(spec.length, spec.beta, spec.epsilon, spec.compare_epsilon())
    })?;
    report.gibbs_residual = Some(rep.gibbs_residual);
    report.interaction_norm = Some(sys.hdec.interaction_norm());
    report.chain = Some(chain_json(&rep));
    Ok(())
}

fn sweep_point(p: &ChainSpec) -> Result<SweepPoint> {
    let rep = reproduce_chain(p.length, p.beta, p.epsilon, p.compare_epsilon())?;
    Ok(SweepPoint {
        length: p.length,
        beta: p.beta,
        epsilon: p.epsilon,
        stationary_dimension: rep.stationary_dimension,
        theorem23: bulk_to_verdict(rep.theorem23),
        chain: chain_json(&rep),
    })
}

fn sweep(config: &ScenarioConfig, report: &mut AnalysisReport) -> Result<()> {
    let points = config.sweep_points();
    let results: Vec<Result<SweepPoint>> =
        timed(report, "sweep", || points.par_iter().map(sweep_point).collect());
    // Ordered merge; the first failing point in grid order wins.
    let merged = results.into_iter().collect::<Result<Vec<_>>>()?;
    report.sweep = Some(merged);
    Ok(())
}

/// Runs the scenario of a validated config.
pub fn run_scenario(config: &ScenarioConfig) -> Result<AnalysisReport> {
    let start = Instant::now();
    let mut report = AnalysisReport::new(config.scenario, config.seed, echo(&config.system), config.tolerances);
    if config.scenario == Scenario::Sweep {
        sweep(config, &mut report)?;
    } else {
        let sys = timed(&mut report, "build", || build_system(config))?;
        match config.scenario {
            Scenario::SteadyState => steady_state(&sys, config, &mut report)?,
            Scenario::Uniqueness => uniqueness(&sys, config, &mut report)?,
            Scenario::NoGo => no_go(&sys, config, &mut report)?,
            Scenario::Decompose => decompose(&sys, config, &mut report)?,
            Scenario::Chain => chain(&sys, config, &mut report)?,
            Scenario::Sweep => unreachable!(),
        }
    }
    report.timings.total_seconds = start.elapsed().as_secs_f64();
    if let Some(x) = report.numbers().into_iter().find(|x| !x.is_finite()) {
        return Err(CliError::Numerical(format!("report contains the non-finite value {x}")));
    }
    Ok(report)
}
