use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "stacky-count",
    version,
    about = "Torsor counts, raised-height invariants and desk-scale asymptotics over F_q(t)",
    args_override_self = true,
    after_help = "Exit codes: 0 ok, 1 verification failure, 2 config, 3 budget, 4 coverage, 5 precision, \
                  6 numerical, 7 I/O"
)]
pub struct Cli {
    /// JSON object of flags for the subcommand, e.g. {"subcommand": "global", "q": 2, ...}.
    /// Flags given on the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Local torsor counts by conductor exponent (CSV).
    Local(LocalArgs),
    /// Flag profiles of (Z/p)^r and their discriminant exponents (CSV), or
    /// the profile of one class vector (JSON).
    Disc(DiscArgs),
    /// a/b invariants of a height (JSON).
    Invariants(InvariantsArgs),
    /// Global counts N(B) of Artin–Schreier classes over F_q(t) (CSV `B,count`).
    Global(GlobalArgs),
    /// Points of P^1(F_q(t)) of bounded height (CSV `B,count`).
    P1(P1Args),
    /// Square classes of F_q(t) of bounded height (CSV `B,count`).
    Mu2(Mu2Args),
    /// Conductor and minimal discriminant of an elliptic curve in characteristic 3 (JSON).
    Elliptic(EllipticArgs),
    /// Phi_k integrals, or a growth fit of a `B,count` table (JSON).
    Asym(AsymArgs),
    /// Counts of the product height on two height multisets (CSV `B,count`).
    Product(ProductArgs),
    /// Run a verification suite and print one PASS/FAIL line per check.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LocalArgs {
    /// Abelian p-group, e.g. z2, z4z2, zp:3 (needs --q for p).
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = 20)]
    pub nmax: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct DiscArgs {
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Largest first jump enumerated.
    #[arg(long)]
    pub jmax: Option<u64>,
    /// Field order for --class.
    #[arg(long)]
    pub q: Option<u32>,
    /// Component of a class vector as a Laurent series; repeat for each component.
    #[arg(long = "class")]
    pub class: Vec<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightSel {
    Conductor,
    AsConductor,
    Discriminant,
    EllipticFf,
    EllipticFd,
    O1,
    Mu2,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, value_enum, default_value = "conductor")]
    pub height: HeightSel,
    /// Sectoroid family as JSON (overrides --group).
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Degree d of O(d) on P^1, for the P^1 x Bmu2 composite (with --c0).
    #[arg(long)]
    pub d: Option<i64>,
    /// Raising value c0 of the Bmu2 factor, as a rational.
    #[arg(long)]
    pub c0: Option<String>,
    /// Picard rank rho for a Fano variety height (with --gamma).
    #[arg(long)]
    pub rho: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub gamma: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Exact local-global census (fast, all place degrees).
    Census,
    /// Explicit enumeration of normal forms (coverage-certified).
    Enumerate,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Elementary abelian group zp:R (or z2, z3, z2z2, ...).
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_enum, default_value = "conductor")]
    pub height: HeightSel,
    #[arg(long = "Bmax", alias = "bmax")]
    pub bmax: u128,
    #[arg(long, value_enum, default_value = "census")]
    pub method: Method,
    /// Drop the nontrivial unramified classes at height 1.
    #[arg(long)]
    pub no_constant: bool,
    /// Support degree of the enumeration (default: the least that covers Bmax).
    #[arg(long)]
    pub support_deg: Option<usize>,
    /// Largest pole order enumerated (default: the least that covers Bmax).
    #[arg(long)]
    pub max_order: Option<u64>,
    /// Cap on enumerated classes (enumerate method).
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct P1Args {
    #[arg(long)]
    pub q: u32,
    #[arg(long = "Bmax", alias = "bmax")]
    pub bmax: u128,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct Mu2Args {
    #[arg(long)]
    pub q: u32,
    #[arg(long = "Bmax", alias = "bmax")]
    pub bmax: u128,
    #[arg(long, default_value = "1")]
    pub c0: String,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct EllipticArgs {
    #[arg(long, default_value_t = 3)]
    pub q: u32,
    /// Coefficients: Laurent series, or rational functions in t with --global.
    #[arg(long)]
    pub a2: String,
    #[arg(long)]
    pub a4: String,
    #[arg(long)]
    pub a6: String,
    #[arg(long, default_value_t = 40)]
    pub prec: i64,
    /// Treat coefficients as elements of F_3(t) and report global heights.
    #[arg(long)]
    pub global: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct AsymArgs {
    /// `B,count` table to fit; without it, evaluate Phi_k.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Rows of --table with B below this are ignored.
    #[arg(long = "Bmin", alias = "bmin", default_value_t = 0.0)]
    pub bmin: f64,
    /// Rate for the ratio band of --table, as alpha,beta.
    #[arg(long, value_delimiter = ',')]
    pub rate: Option<Vec<f64>>,
    /// Exponent k of Phi_k; -1 is the exact case.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long = "B", alias = "b")]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub beta1: u32,
    #[arg(long, default_value_t = 0)]
    pub beta2: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    /// Left multiset: range:N, p1:Q:KMAX[:D], mu2:Q:RMAX[:C0] or a CSV file `height,multiplicity`.
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    /// Heights B at which to count, comma separated.
    #[arg(long = "Bs", alias = "bs", value_delimiter = ',', required = true)]
    pub bs: Vec<f64>,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// The ten acceptance criteria.
    Acceptance,
    /// Closed formulas against Tate's algorithm on random elliptic models.
    Tate,
    /// Local torsor counts against the unit-group oracle.
    Local,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "acceptance")]
    pub suite: Suite,
    /// Restrict the acceptance suite to these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    /// Models per field for the tate suite.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write a JSON report as well as the PASS/FAIL lines.
    #[arg(long)]
    pub json: Option<PathBuf>,
}
