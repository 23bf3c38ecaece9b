//! `pgc` subcommands.
//!
//! Exit codes: 0 success or accepted, 1 property violated or rejected (the
//! witness goes to stdout), 2 usage or input error, 3 resource budget
//! exceeded.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use pgc_core::circuit::{Circuit, EvalError, FieldElement, FieldKind, VarId, VarRole};
use pgc_core::compiler::{compile_checked, compile_pgc_to_smlpc, CompileError};
use pgc_core::compose::{self, ComposeError, ScopedDistributionCircuit};
use pgc_core::dpp::{
    abp_to_dpp, formula_to_dpp, minimal_shift, psd_shift, DeterminantError, DppError, DppRepresentation,
};
use pgc_core::hardness::{
    self, count_perfect_matchings, random_regular_bipartite, rmatch, rmatch_poly, GraphError, MatchingError,
    ReductionError, RegularityKind,
};
use pgc_core::marginal::{MarginalError, Marginalizer};
use pgc_core::partition::VariablePartition;
use pgc_core::pgc::{check_distribution, check_sml_distribution, pgc_var, DistributionCheck, Pgc, PgcError};
use pgc_core::poly::{expand, ExpandError};
use pgc_core::rational::{format_rational, parse_rational, to_decimal, Rational};
use pgc_core::rng::{small_rational, stream, stream_id};
use pgc_core::smltest::{confirm_witness, test_set_multilinear, SmlError, SmlOptions, SmlVerdict, SmlWitness};
use pgc_core::Assignment;

use crate::formats::{self, FormatError};

#[derive(Debug, Parser)]
#[command(name = "pgc", version, about = "Exact tools for probabilistic generating circuits")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Field used by `eval`.
    #[arg(long, global = true, value_enum, default_value_t = FieldArg::Rat)]
    pub field: FieldArg,
    /// Term budget for brute-force expansion.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    pub budget: usize,
    /// Output path for commands that produce files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also print an approximate decimal with this many digits.
    #[arg(long, global = true)]
    pub decimal: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Rat,
    Fp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionKind {
    Quaternary,
    Ternary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    /// Both sides of size n, all degrees 3.
    #[value(name = "3-regular")]
    ThreeRegular,
    /// 3n/2 left vertices of degree 2, n right vertices of degree 3.
    #[value(name = "2-3")]
    TwoThree,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural checks and summary of a circuit file.
    Validate { circuit: PathBuf },
    /// Evaluates a circuit at a point file (`var = p/q` lines).
    Eval { circuit: PathBuf, point: PathBuf },
    /// Expands a division-free circuit into its monomials.
    Expand { circuit: PathBuf },
    /// Compiles a binary generating circuit over z1..zn into a
    /// set-multilinear circuit (written to --out, parts to --out.parts).
    Compile {
        pgc: PathBuf,
        /// Number of variables; defaults to the largest index used.
        #[arg(long)]
        n: Option<usize>,
        /// Check the input is a distribution first (brute force).
        #[arg(long)]
        check: bool,
    },
    /// Marginal probability of a set-multilinear circuit.
    Marginalize {
        circuit: PathBuf,
        parts: PathBuf,
        query: PathBuf,
        /// Run the set-multilinearity test first and refuse on rejection.
        #[arg(long)]
        paranoid: bool,
    },
    /// Randomized set-multilinearity test.
    TestSml {
        circuit: PathBuf,
        parts: PathBuf,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        /// Confirm a rejection witness by full expansion.
        #[arg(long)]
        confirm: bool,
    },
    /// Brute-force distribution check; prints the table on success.
    CheckDist {
        circuit: PathBuf,
        /// Treat the circuit as set-multilinear over these parts.
        #[arg(long, conflicts_with_all = ["vars", "n"])]
        parts: Option<PathBuf>,
        /// `name arity` lines declaring the random variables.
        #[arg(long)]
        vars: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        arity: u32,
    },
    /// Mixture, product and hierarchical composition.
    #[command(subcommand)]
    Compose(ComposeCommand),
    /// Determinantal embedding of a formula.
    Formula2dpp {
        formula: PathBuf,
        /// Shift for a diagonally dominant kernel: `auto` or `p/q`.
        #[arg(long)]
        psd: Option<String>,
    },
    /// Determinantal embedding of a layered branching program.
    Abp2dpp {
        abp: PathBuf,
        #[arg(long)]
        psd: Option<String>,
    },
    /// Checks a matrix + projection pair against its source.
    VerifyDpp {
        matrix: PathBuf,
        projection: PathBuf,
        #[arg(long, conflicts_with = "abp")]
        formula: Option<PathBuf>,
        #[arg(long)]
        abp: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Generating circuit of a bipartite graph.
    Graph2pgc {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: ReductionKind,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Checks the marginal identity of a reduction on a small graph.
    VerifyReduction {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: ReductionKind,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Matching-count oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Seeded random regular bipartite graph.
    GenGraph {
        #[arg(long, value_enum)]
        kind: GraphKind,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ComposeCommand {
    /// `alpha f + (1 - alpha) g` after smoothing to the union scope.
    Mix {
        f: PathBuf,
        f_parts: PathBuf,
        g: PathBuf,
        g_parts: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// `f g` over disjoint scopes.
    Prod { f: PathBuf, f_parts: PathBuf, g: PathBuf, g_parts: PathBuf },
    /// Outer binary circuit with one block per outer variable, given as
    /// `circuit parts` pairs.
    Hier {
        outer: PathBuf,
        outer_parts: PathBuf,
        #[arg(num_args = 2.., required = true)]
        blocks: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Number of perfect matchings.
    PmCount { graph: PathBuf },
    /// Matching polynomial weighted by unmatched right vertices; evaluated
    /// when --lambda is given.
    Rmatch {
        graph: PathBuf,
        #[arg(long)]
        lambda: Option<String>,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Property violated; the explanation was already printed.
    Violated,
    Usage(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violated => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        usage(e)
    }
}

impl From<ExpandError> for Failure {
    fn from(e: ExpandError) -> Self {
        match e {
            ExpandError::TooLarge { .. } => Failure::Budget(e.to_string()),
            ExpandError::Division { .. } => usage(e),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        usage(e)
    }
}

impl From<SmlError> for Failure {
    fn from(e: SmlError) -> Self {
        match e {
            SmlError::DegreeTooLarge { .. } => Failure::Budget(e.to_string()),
            _ => usage(e),
        }
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Expand(e) => e.into(),
            _ => usage(e),
        }
    }
}

impl From<MarginalError> for Failure {
    fn from(e: MarginalError) -> Self {
        match e {
            MarginalError::Sml(e) => e.into(),
            MarginalError::Compile(e) => e.into(),
            _ => usage(e),
        }
    }
}

impl From<PgcError> for Failure {
    fn from(e: PgcError) -> Self {
        usage(e)
    }
}

impl From<ComposeError> for Failure {
    fn from(e: ComposeError) -> Self {
        usage(e)
    }
}

impl From<MatchingError> for Failure {
    fn from(e: MatchingError) -> Self {
        match e {
            MatchingError::TooLarge { .. } => Failure::Budget(e.to_string()),
            _ => usage(e),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        usage(e)
    }
}

impl From<DppError> for Failure {
    fn from(e: DppError) -> Self {
        match e {
            DppError::TooManyVariables(_) | DppError::Determinant(DeterminantError::TooLarge { .. }) => {
                Failure::Budget(e.to_string())
            }
            _ => usage(e),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Expand(e) => e.into(),
            ReductionError::Matching(e) => e.into(),
            _ => usage(e),
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl std::fmt::Display) -> Outcome {
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    fn note(&mut self, line: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{line}");
    }

    fn rational(&mut self, value: &Rational) -> Outcome {
        self.say(format_rational(value))?;
        if let Some(k) = self.cli.decimal {
            self.say(format!("~{} (approximate)", to_decimal(value, k)))?;
        }
        Ok(())
    }

    fn out_path(&self) -> Result<&Path, Failure> {
        self.cli.out.as_deref().ok_or_else(|| usage("this command needs --out <path>"))
    }

    /// Writes to `--out` if given, else to stdout.
    fn emit(&mut self, text: &str) -> Outcome {
        match &self.cli.out {
            Some(p) => std::fs::write(p, text)?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    formats::read_circuit(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_partition(path: &Path) -> Result<VariablePartition, Failure> {
    formats::read_partition(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_lambda(text: Option<&str>) -> Result<Rational, Failure> {
    parse_rational(text.unwrap_or("1")).map_err(usage)
}

fn write_circuit_with_parts(ctx: &mut Ctx<'_>, circuit: &Circuit, parts: &VariablePartition) -> Outcome {
    let path = ctx.out_path()?.to_path_buf();
    std::fs::write(&path, formats::write_circuit(circuit))?;
    std::fs::write(sidecar(&path, "parts"), formats::write_partition(parts))?;
    Ok(())
}

/// Largest `i` over variables named `z{i}`.
fn binary_width(c: &Circuit) -> Result<usize, Failure> {
    c.variables()
        .iter()
        .map(|v| {
            v.name()
                .strip_prefix('z')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| usage(format!("variable `{v}` is not of the form z<i>")))
        })
        .try_fold(0, |m, i| Ok(m.max(i?)))
}

/// Scoped view of a circuit file for composition: compiled literals
/// `x{i}`/`xb{i}` or slot variables `z{i}_{j}` matching the parts.
fn load_scoped(circuit: &Path, parts: &Path) -> Result<ScopedDistributionCircuit, Failure> {
    let c = load_circuit(circuit)?;
    let p = load_partition(parts)?;
    let literal = p.variables().all(|v| matches!(v.role(), Some(VarRole::Positive(_) | VarRole::Negated(_))));
    if literal {
        return Ok(ScopedDistributionCircuit::from_literals(&c, p.len())?);
    }
    let mut scope = Vec::with_capacity(p.len());
    let arity = p.parts().first().map_or(2, Vec::len);
    for part in p.parts() {
        let vars: BTreeSet<usize> = part
            .iter()
            .map(|v| match v.role() {
                Some(VarRole::Slot { var, .. }) => Ok(var),
                _ => Err(usage(format!("part member `{v}` is not a slot variable z<i>_<j>"))),
            })
            .collect::<Result<_, _>>()?;
        let [i] = vars.into_iter().collect::<Vec<_>>()[..] else {
            return Err(usage("each part must hold the slots of one variable"));
        };
        if part.len() != arity {
            return Err(usage("all parts must have the same size"));
        }
        scope.push(i);
    }
    Ok(ScopedDistributionCircuit::new(c, scope, arity as u32)?)
}

fn print_witness(ctx: &mut Ctx<'_>, w: &SmlWitness) -> Outcome {
    ctx.say("rejected")?;
    ctx.say(format!("witness: {w}"))?;
    let point = match w {
        SmlWitness::MissingPart { point, .. } | SmlWitness::Repeated { point, .. } => point,
    };
    let text = formats::write_point(point.iter().map(|(v, x)| (v, x.value().to_string())));
    write!(ctx.out, "{text}")?;
    Ok(())
}

fn print_dpp(ctx: &mut Ctx<'_>, rep: &DppRepresentation, psd: Option<&str>) -> Outcome {
    let rep = match psd {
        None => rep.clone(),
        Some("auto") => psd_shift(rep, &(minimal_shift(rep) + Rational::from_integer(1.into())))?,
        Some(m) => match psd_shift(rep, &parse_rational(m).map_err(usage)?) {
            Err(e @ DppError::ShiftTooSmall { .. }) => return Err(usage(e)),
            other => other?,
        },
    };
    let path = ctx.out_path()?.to_path_buf();
    std::fs::write(&path, formats::write_matrix(&rep))?;
    std::fs::write(sidecar(&path, "proj"), formats::write_projection(&rep))?;
    ctx.say(format!("size {}", rep.size()))
}

fn source_variables(rep: &DppRepresentation) -> BTreeSet<VarId> {
    rep.projection().values().flat_map(|f| f.terms.keys().cloned()).collect()
}

fn run_command(ctx: &mut Ctx<'_>) -> Outcome {
    let cli = ctx.cli;
    match &cli.command {
        Command::Validate { circuit } => {
            let c = match formats::read_circuit(&read(circuit)?) {
                Ok(c) => c,
                Err(FormatError::Structure(e)) => {
                    ctx.say(format!("invalid: {e}"))?;
                    return Err(Failure::Violated);
                }
                Err(e) => return Err(e.into()),
            };
            ctx.say(c.describe())?;
            ctx.say(format!("size {}", c.size()))?;
            ctx.say(format!("division-free {}", c.is_division_free()))?;
            ctx.say(format!("syntactic-degree {}", c.syntactic_degree()))
        }
        Command::Eval { circuit, point } => {
            let c = load_circuit(circuit)?;
            let p = formats::read_point(&read(point)?)?;
            let field = match cli.field {
                FieldArg::Rat => FieldKind::Rational,
                FieldArg::Fp => FieldKind::PrimeField,
            };
            match c.evaluate_in(&p, field)? {
                FieldElement::Rational(r) => ctx.rational(&r),
                FieldElement::Fp(x) => ctx.say(x.value()),
            }
        }
        Command::Expand { circuit } => {
            let poly = expand(&load_circuit(circuit)?, cli.budget)?;
            ctx.say(poly)
        }
        Command::Compile { pgc, n, check } => {
            let c = load_circuit(pgc)?;
            let n = match n {
                Some(n) => *n,
                None => binary_width(&c)?,
            };
            let pgc = Pgc::binary(c, n)?;
            let compiled = if *check {
                match compile_checked(&pgc, cli.budget) {
                    Err(CompileError::NotADistribution(w)) => {
                        ctx.say(format!("not a distribution: {w}"))?;
                        return Err(Failure::Violated);
                    }
                    other => other?,
                }
            } else {
                compile_pgc_to_smlpc(&pgc)?
            };
            write_circuit_with_parts(ctx, &compiled.circuit, &compiled.partition)?;
            ctx.say(format!("size {}", compiled.circuit.size()))
        }
        Command::Marginalize { circuit, parts, query, paranoid } => {
            let c = load_circuit(circuit)?;
            let p = load_partition(parts)?;
            let q = formats::read_query(&read(query)?, p.len())?;
            let mut m = Marginalizer::new(c, p)?;
            if *paranoid {
                m = match m.paranoid(&SmlOptions::new(cli.seed)) {
                    Err(MarginalError::NotSetMultilinear(w)) => {
                        print_witness(ctx, &w)?;
                        return Err(Failure::Violated);
                    }
                    other => other?,
                };
            }
            let value = m.query(&q)?;
            ctx.rational(&value)
        }
        Command::TestSml { circuit, parts, trials, repetitions, degree_cap, confirm } => {
            let c = load_circuit(circuit)?;
            let p = load_partition(parts)?;
            let options = SmlOptions { seed: cli.seed, trials: *trials, repetitions: *repetitions, degree_cap: *degree_cap };
            match test_set_multilinear(&c, &p, &options)? {
                SmlVerdict::Accepted { tests, failure_bound } => {
                    ctx.say("accepted")?;
                    ctx.say(format!("tests {tests}"))?;
                    ctx.say(format!("failure-bound {}", format_rational(&failure_bound)))?;
                    ctx.say(format!("failure-bound-approx {:.3e}", rational_f64(&failure_bound)))
                }
                SmlVerdict::Rejected(w) => {
                    print_witness(ctx, &w)?;
                    if *confirm {
                        let ok = confirm_witness(&c, &p, &w, cli.budget)?;
                        ctx.say(format!("confirmed {ok}"))?;
                    }
                    Err(Failure::Violated)
                }
            }
        }
        Command::CheckDist { circuit, parts, vars, n, arity } => {
            let c = load_circuit(circuit)?;
            let check = match (parts, vars) {
                (Some(parts), _) => check_sml_distribution(&c, &load_partition(parts)?, cli.budget)?,
                (None, Some(vars)) => {
                    let (vars, arities) = formats::read_arities(&read(vars)?)?;
                    check_distribution(&Pgc::new(c, vars, arities)?, cli.budget)?
                }
                (None, None) => {
                    let n = match n {
                        Some(n) => *n,
                        None => binary_width(&c)?,
                    };
                    let vars = (1..=n).map(pgc_var).collect();
                    check_distribution(&Pgc::new(c, vars, vec![*arity; n])?, cli.budget)?
                }
            };
            match check {
                DistributionCheck::Valid(t) => {
                    write!(ctx.out, "{}", formats::write_table(&t))?;
                    Ok(())
                }
                DistributionCheck::Invalid(w) => {
                    ctx.say(format!("not a distribution: {w}"))?;
                    Err(Failure::Violated)
                }
            }
        }
        Command::Compose(op) => {
            let composed = match op {
                ComposeCommand::Mix { f, f_parts, g, g_parts, alpha } => {
                    let alpha = parse_rational(alpha).map_err(usage)?;
                    compose::mixture(&load_scoped(f, f_parts)?, &load_scoped(g, g_parts)?, &alpha)?
                }
                ComposeCommand::Prod { f, f_parts, g, g_parts } => {
                    compose::product(&load_scoped(f, f_parts)?, &load_scoped(g, g_parts)?)?
                }
                ComposeCommand::Hier { outer, outer_parts, blocks } => {
                    if blocks.len() % 2 != 0 {
                        return Err(usage("blocks are given as `circuit parts` pairs"));
                    }
                    let blocks = blocks
                        .chunks(2)
                        .map(|pair| load_scoped(&pair[0], &pair[1]))
                        .collect::<Result<Vec<_>, _>>()?;
                    compose::hierarchical(&load_scoped(outer, outer_parts)?, &blocks)?
                }
            };
            write_circuit_with_parts(ctx, composed.circuit(), composed.partition())?;
            ctx.say(format!("size {}", composed.size()))
        }
        Command::Formula2dpp { formula, psd } => {
            let f = formats::read_formula(&read(formula)?)?;
            print_dpp(ctx, &formula_to_dpp(&f), psd.as_deref())
        }
        Command::Abp2dpp { abp, psd } => {
            let a = formats::read_abp(&read(abp)?)?;
            print_dpp(ctx, &abp_to_dpp(&a), psd.as_deref())
        }
        Command::VerifyDpp { matrix, projection, formula, abp, points } => {
            let rep = match formats::read_dpp(&read(matrix)?, &read(projection)?) {
                Ok(rep) => rep,
                Err(FormatError::Dpp(e @ DppError::OffDiagonalVariable { .. })) => {
                    ctx.say(format!("violated: {e}"))?;
                    return Err(Failure::Violated);
                }
                Err(e) => return Err(e.into()),
            };
            ctx.say("diagonal-only true")?;
            let formula = formula.as_deref().map(|p| read(p).and_then(|t| Ok(formats::read_formula(&t)?))).transpose()?;
            let abp = abp.as_deref().map(|p| read(p).and_then(|t| Ok(formats::read_abp(&t)?))).transpose()?;
            if formula.is_none() && abp.is_none() {
                return Ok(());
            }
            let mut vars = source_variables(&rep);
            if let Some(f) = &formula {
                vars.extend(f.variables());
            }
            if let Some(a) = &abp {
                vars.extend(a.polynomial().variables());
            }
            for k in 0..*points {
                let mut rng = stream(cli.seed, stream_id(0xd99, &[k as u64]));
                let point = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), small_rational(&mut rng, 20))));
                let got = rep.evaluate(&point)?;
                let want = match (&formula, &abp) {
                    (Some(f), _) => f.evaluate(&point),
                    (_, Some(a)) => a.evaluate(&point),
                    _ => unreachable!(),
                }
                .ok_or_else(|| usage("source has unassigned variables"))?;
                if got != want {
                    ctx.say(format!("mismatch at point {k}: determinant {} source {}", format_rational(&got), format_rational(&want)))?;
                    let text = formats::write_point(point.0.iter().map(|(v, x)| (v, format_rational(x))));
                    write!(ctx.out, "{text}")?;
                    return Err(Failure::Violated);
                }
            }
            ctx.say(format!("agrees at {points} points"))
        }
        Command::Graph2pgc { graph, kind, lambda } => {
            let g = formats::read_graph(&read(graph)?)?;
            let (pgc, norm) = match kind {
                ReductionKind::Quaternary => hardness::quaternary_pgc_from_graph(&g)?,
                ReductionKind::Ternary => hardness::ternary_pgc_from_graph(&g, &parse_lambda(lambda.as_deref())?)?,
            };
            let text = formats::write_circuit(pgc.circuit());
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, text)?;
                    std::fs::write(sidecar(path, "vars"), formats::write_arities(pgc.variables(), pgc.arities()))?;
                    ctx.say(format!("normalization {}", format_rational(&norm)))
                }
                None => {
                    ctx.note(format!("normalization {}", format_rational(&norm)));
                    ctx.emit(&text)
                }
            }
        }
        Command::VerifyReduction { graph, kind, lambda } => {
            let g = formats::read_graph(&read(graph)?)?;
            let report = match kind {
                ReductionKind::Quaternary => {
                    g.require(RegularityKind::ThreeRegular)?;
                    hardness::verify_quaternary_identity(&g)?
                }
                ReductionKind::Ternary => hardness::verify_ternary_identity(&g, &parse_lambda(lambda.as_deref())?)?,
            };
            ctx.say(format!("marginal {}", format_rational(&report.marginal)))?;
            ctx.say(format!("count {}", format_rational(&report.count)))?;
            ctx.say(format!("normalization {}", format_rational(&report.normalization)))?;
            if let Some(h) = report.h_monomials {
                ctx.say(format!("h-monomials {h}"))?;
            }
            if report.holds() {
                ctx.say("identity holds")
            } else {
                ctx.say("identity violated")?;
                Err(Failure::Violated)
            }
        }
        Command::Oracle(OracleCommand::PmCount { graph }) => {
            let g = formats::read_graph(&read(graph)?)?;
            ctx.say(count_perfect_matchings(&g)?)
        }
        Command::Oracle(OracleCommand::Rmatch { graph, lambda }) => {
            let g = formats::read_graph(&read(graph)?)?;
            match lambda {
                Some(l) => {
                    let value = rmatch(&g, &parse_rational(l).map_err(usage)?)?;
                    ctx.rational(&value)
                }
                None => ctx.say(rmatch_poly(&g)?),
            }
        }
        Command::GenGraph { kind, n } => {
            let kind = match kind {
                GraphKind::ThreeRegular => RegularityKind::ThreeRegular,
                GraphKind::TwoThree => RegularityKind::TwoThree,
            };
            let g = random_regular_bipartite(kind, *n, cli.seed)?;
            ctx.emit(&formats::write_graph(&g))
        }
    }
}

fn rational_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `args` and runs one command. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let mut ctx = Ctx { cli: &cli, out, err };
    match run_command(&mut ctx) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Violated => {}
                Failure::Usage(m) => ctx.note(format!("error: {m}")),
                Failure::Budget(m) => ctx.note(format!("budget exceeded: {m}")),
            }
            f.code()
        }
    }
}
