use std::io::Read;
use std::path::Path;

use wdcalc::deligne::{cv_map, dsum, dual_class, tensor_ss, twist_class, DeligneClass, Twist};
use wdcalc::dsl::{dump_context, parse_class, parse_elem, parse_fusion_file, parse_matrix_dump, parse_rep};
use wdcalc::factors::{epsilon_factor, gamma_factor, l_factor, multiplicativity_report};
use wdcalc::gln::{c_map, central_char, det_of_c, v_map};
use wdcalc::matrixmodel::{decompose, oracle_tensor_ss, realize, validate};
use wdcalc::sweep::{contexts, line_classes, line_indecs, line_reps, preservation_sweep, RepGrid};
use wdcalc::weil::{FusionTable, IrredRep};
use wdcalc::{make_ctx, FieldCtx};

use crate::report::Report;
use crate::{Check, Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] wdcalc::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
        }
    }
}

pub struct Outcome {
    pub report: Report,
    /// A verification found a disagreement.
    pub mismatch: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            mismatch: false,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Env {
    ctx: FieldCtx,
    table: FusionTable,
}

impl Env {
    fn class(&self, src: &str) -> Result<DeligneClass> {
        Ok(parse_class(&self.ctx, src, &self.table)?)
    }

    fn render(&self, c: &DeligneClass) -> String {
        c.render(&self.ctx)
    }
}

fn read_source(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn flag_ctx(cli: &Cli) -> Result<Option<FieldCtx>> {
    match (cli.ell, cli.q) {
        (Some(ell), Some(q)) => Ok(Some(make_ctx(ell, q, cli.field_deg)?)),
        (None, None) => Ok(None),
        _ => Err(CliError::Usage("--ell and --q must be given together".into())),
    }
}

fn env_for(cli: &Cli, ctx: FieldCtx) -> Result<Env> {
    let table = match &cli.fusion_file {
        Some(path) => parse_fusion_file(&ctx, &read_source(path)?)?,
        None => FusionTable::new(),
    };
    Ok(Env { ctx, table })
}

fn require_env(cli: &Cli) -> Result<Env> {
    let ctx = flag_ctx(cli)?
        .ok_or_else(|| CliError::Usage("this command needs --ell and --q".into()))?;
    env_for(cli, ctx)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Decompose { dump } => {
            let src = read_source(dump)?;
            let ctx = match flag_ctx(cli)? {
                Some(ctx) => ctx,
                None => dump_context(&src)?,
            };
            let m = parse_matrix_dump(&ctx, &src)?;
            validate(&m)?;
            Ok(Report::Fields(vec![("CLASS", decompose(&m)?.render(&ctx))]).into())
        }
        Command::Verify { check } => verify(cli, check),
        other => {
            let env = require_env(cli)?;
            single(&env, other)
        }
    }
}

fn single(env: &Env, command: &Command) -> Result<Outcome> {
    let ctx = &env.ctx;
    let fields = match command {
        Command::Normalize { class } => vec![("CLASS", env.render(&env.class(class)?))],
        Command::Dsum { a, b } => vec![("CLASS", env.render(&dsum(&env.class(a)?, &env.class(b)?)))],
        Command::Dual { class } => vec![("CLASS", env.render(&dual_class(ctx, &env.class(class)?)))],
        Command::Twist { class, nu, char } => {
            let by = match (nu, char) {
                (Some(k), None) => Twist::Nu(*k),
                (None, Some(t)) => Twist::Char(parse_elem(ctx, t)?),
                _ => return Err(CliError::Usage("give exactly one of --nu or --char".into())),
            };
            vec![("CLASS", env.render(&twist_class(ctx, &env.class(class)?, by)?))]
        }
        Command::Tensor { a, b } => {
            let t = tensor_ss(ctx, &env.class(a)?, &env.class(b)?, &env.table)?;
            vec![("CLASS", env.render(&t))]
        }
        Command::Cv { class } => vec![("CLASS", env.render(&cv_map(&env.class(class)?)?))],
        Command::Factors { class } => {
            let c = env.class(class)?;
            vec![
                ("L", l_factor(ctx, &c).render(ctx)),
                ("GAMMA", gamma_factor(ctx, &c).render(ctx)),
                ("EPSILON", epsilon_factor(ctx, &c)?.render(ctx)),
            ]
        }
        Command::Realize { class } => {
            return Ok(Report::Dump(realize(ctx, &env.class(class)?)?.render()).into());
        }
        Command::Oracle { a, b } => {
            let (a, b) = (env.class(a)?, env.class(b)?);
            let formal = tensor_ss(ctx, &a, &b, &env.table)?;
            let oracle = oracle_tensor_ss(ctx, &a, &b)?;
            let agree = formal == oracle;
            return Ok(Outcome {
                report: Report::Fields(vec![
                    ("FORMAL", env.render(&formal)),
                    ("ORACLE", env.render(&oracle)),
                    ("VERDICT", if agree { "MATCH" } else { "MISMATCH" }.into()),
                ]),
                mismatch: !agree,
            });
        }
        Command::Correspond { rep } => {
            let pi = parse_rep(ctx, rep, &env.table)?;
            let mut fields = vec![
                ("REP", pi.render(ctx)),
                ("V", env.render(&v_map(ctx, &pi))),
                ("C", env.render(&c_map(ctx, &pi))),
            ];
            if pi.lines().iter().all(|l| !l.is_ramified()) {
                fields.push(("CENTRAL", central_char(ctx, &pi)?.render(ctx)));
            }
            fields.push(("DET_C", det_of_c(ctx, &pi).render(ctx)));
            fields
        }
        Command::Decompose { .. } | Command::Verify { .. } => unreachable!("handled by run"),
    };
    Ok(Report::Fields(fields).into())
}

fn sweep_contexts(cli: &Cli) -> Result<Vec<FieldCtx>> {
    Ok(match flag_ctx(cli)? {
        Some(ctx) => vec![ctx],
        None => contexts()?,
    })
}

fn verdict(failures: usize) -> String {
    if failures == 0 { "ok" } else { "FAIL" }.to_string()
}

fn verify(cli: &Cli, check: &Check) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut failures = 0;
    let columns = match check {
        Check::Preservation { grid } => {
            let grid = RepGrid::named(grid)
                .ok_or_else(|| CliError::Usage(format!("unknown grid `{grid}`; use small or full")))?;
            for ctx in sweep_contexts(cli)? {
                let reps = line_reps(&ctx, &IrredRep::unram(ctx.one()), grid);
                let s = preservation_sweep(&ctx, &reps)?;
                let bad = s.l_fail + s.gamma_fail + s.eps_fail;
                failures += bad;
                rows.push(vec![
                    ctx.header(),
                    reps.len().to_string(),
                    s.pairs.to_string(),
                    s.l_fail.to_string(),
                    s.gamma_fail.to_string(),
                    s.eps_fail.to_string(),
                    verdict(bad),
                ]);
            }
            vec!["CTX", "REPS", "PAIRS", "L_FAIL", "GAMMA_FAIL", "EPS_FAIL", "RESULT"]
        }
        Check::Multiplicativity { max_n } => {
            let ctxs = match flag_ctx(cli)? {
                Some(ctx) => vec![ctx],
                None => [(2, 3), (3, 2), (5, 2)]
                    .iter()
                    .map(|&(l, q)| make_ctx(l, q, 1))
                    .collect::<wdcalc::Result<_>>()?,
            };
            for ctx in ctxs {
                let chars = [IrredRep::unram(ctx.one()), IrredRep::unram(ctx.generator())];
                let (mut cases, mut bad) = (0, 0);
                for n in 1..=*max_n {
                    for m in 1..=n {
                        for psi in &chars {
                            for psi2 in &chars {
                                cases += 1;
                                bad += usize::from(!multiplicativity_report(&ctx, n, m, psi, psi2)?.holds());
                            }
                        }
                    }
                }
                failures += bad;
                rows.push(vec![ctx.header(), cases.to_string(), bad.to_string(), verdict(bad)]);
            }
            vec!["CTX", "CASES", "FAILED", "RESULT"]
        }
        Check::TensorOracle { max_r } => {
            for ctx in sweep_contexts(cli)? {
                let indecs = line_indecs(&ctx, &IrredRep::unram(ctx.one()), *max_r)?;
                let table = FusionTable::new();
                let (mut cases, mut bad) = (0, 0);
                for x in &indecs {
                    for y in &indecs {
                        let (a, b) = (DeligneClass::single(x.clone()), DeligneClass::single(y.clone()));
                        cases += 1;
                        bad += usize::from(tensor_ss(&ctx, &a, &b, &table)? != oracle_tensor_ss(&ctx, &a, &b)?);
                    }
                }
                failures += bad;
                rows.push(vec![ctx.header(), cases.to_string(), bad.to_string(), verdict(bad)]);
            }
            vec!["CTX", "PAIRS", "FAILED", "RESULT"]
        }
        Check::Roundtrip { max_dim } => {
            for ctx in sweep_contexts(cli)? {
                let classes = line_classes(&ctx, &IrredRep::unram(ctx.one()), *max_dim)?;
                let mut bad = 0;
                for c in &classes {
                    bad += usize::from(decompose(&realize(&ctx, c)?)? != *c);
                }
                failures += bad;
                rows.push(vec![ctx.header(), classes.len().to_string(), bad.to_string(), verdict(bad)]);
            }
            vec!["CTX", "CLASSES", "FAILED", "RESULT"]
        }
    };
    Ok(Outcome {
        report: Report::Table {
            columns,
            rows,
            passed: failures == 0,
        },
        mismatch: failures > 0,
    })
}
