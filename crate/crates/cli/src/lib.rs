//! Command-line front end: description-file parsing, verb dispatch, fuzz
//! campaigns, and report rendering.
//!
//! Exit codes: 0 when the requested computation succeeds and any property
//! under test holds, 1 when a verification fails (the report carries a
//! witness), 2 when the input cannot be used at all.

pub mod files;
pub mod fuzz;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use muloc_core::{
    coin_site, enumerate_points_capped, exhaustion, fat_cantor, finite_part_roundtrip,
    glue_measures, inner_frame_capped, is_almost_disconnected, principal_sheaf,
    pushforward_measure, quotient_by_congruence, shear_bracket, standard_set_site, svc_stage,
    theorem_equivalence_check_capped, verify_no_complement, DownsetValuation, Dyadic, ElemSet,
    FiniteFrame, FiniteLattice, FrameMap, Grading, InnerError, Rat, ShearSpec, StandardSet,
};

use files::{parse_region_file, parse_site_file, ParseError, ParsedSite};
use fuzz::{run_campaign, CampaignSpec, FuzzKind};
use report::Report;

pub use report::Status;

#[derive(Parser, Debug)]
#[command(
    name = "muloc",
    version,
    about = "Exact measures and frames on finite lattice presentations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the machine-readable line-delimited report instead of text.
    #[arg(long, global = true)]
    pub json_lines: bool,
    /// Override the enumeration caps guarding frame and point listings.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a lattice description.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Coverage closures, frames, inner measures, and points of a site.
    Site {
        #[command(subcommand)]
        cmd: SiteCmd,
    },
    /// Implication structure and sublocales of a finite frame.
    Frame {
        #[command(subcommand)]
        cmd: FrameCmd,
    },
    /// Valuation laws and constructions.
    Valuation {
        #[command(subcommand)]
        cmd: ValuationCmd,
    },
    /// Inner-frame deciders and diagnostics.
    Inner {
        #[command(subcommand)]
        cmd: InnerCmd,
    },
    /// Coin-space stage constructions.
    Coin {
        #[command(subcommand)]
        cmd: CoinCmd,
    },
    /// Dyadic-cube regions and their exact measures.
    Lebesgue {
        #[command(subcommand)]
        cmd: LebesgueCmd,
    },
    /// Random-case campaigns over generated sites.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
pub struct FileArg {
    /// Description file to read.
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Parse and validate: bounded, antisymmetric, distributive.
    Check(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum SiteCmd {
    /// Coverage closure of each principal downset.
    Sheafify {
        #[command(flatten)]
        file: FileArg,
        /// Close only this element's downset.
        #[arg(long)]
        element: Option<String>,
    },
    /// The frame of coverage-closed ideals.
    Frame(FileArg),
    /// Inner-measure frame of a mu-inner site, with its measure table.
    Inner(FileArg),
    /// Completely prime filters.
    Points(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum FrameCmd {
    /// Full implication table.
    Heyting(FileArg),
    /// Booleanness and the complement table.
    Boolean(FileArg),
    /// All sublocales with their classification.
    Sublocales(FileArg),
    /// Negations, double negations, and the collapse law.
    Negation(FileArg),
    /// Boolean sublocale with the given element as bottom.
    Bsub {
        #[command(flatten)]
        file: FileArg,
        /// Label of the new bottom.
        #[arg(long)]
        element: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ValuationCmd {
    /// Check the three valuation laws, with witnesses on failure.
    Check(FileArg),
    /// Quotient by measure-equality and report the projection.
    Quotient(FileArg),
    /// Restrict to two downsets, glue back, and compare.
    Glue {
        #[command(flatten)]
        file: FileArg,
        /// Root of the first restriction.
        #[arg(long)]
        left: String,
        /// Root of the second restriction.
        #[arg(long)]
        right: String,
    },
    /// Push the inner measure forward to the two-element frame.
    Push(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum InnerCmd {
    /// Splitting verdict with witness on failure.
    Almost(FileArg),
    /// Cross-check the three Booleanness characterizations.
    Equivalence(FileArg),
    /// Greedy exhaustion chain of every ideal.
    Exhaust(FileArg),
    /// Rebuild the inner frame of a faithful measure and compare.
    Roundtrip(FileArg),
}

#[derive(Subcommand, Debug)]
pub enum CoinCmd {
    /// Thickened stages with exact stage measures.
    Fatcantor {
        /// Number of stages to build (at most 4).
        #[arg(long)]
        stages: u32,
        /// Also verify the absence of complements fiberwise.
        #[arg(long)]
        verify_complement: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum LebesgueCmd {
    /// Exact measure of a region.
    Measure(FileArg),
    /// Translate a region by a dyadic vector.
    Translate {
        #[command(flatten)]
        file: FileArg,
        /// Comma-separated dyadic coordinates, e.g. "1/2,-3/4".
        #[arg(long)]
        by: String,
    },
    /// Inner and outer cube bracket of a sheared region.
    Shear {
        #[command(flatten)]
        file: FileArg,
        /// Axis whose coordinate is changed.
        #[arg(long)]
        axis: usize,
        /// Axis whose coordinate drives the change.
        #[arg(long)]
        by_axis: usize,
        /// Dyadic shear amount.
        #[arg(long)]
        amount: String,
        /// Cube side is 2^-thinness.
        #[arg(long)]
        thinness: u32,
    },
    /// Smith-Volterra-Cantor stage measure.
    Svc {
        /// Stage number (0..=20).
        #[arg(long)]
        k: u32,
    },
    /// Cube-subset site of a region with the cube-share measure.
    Site {
        #[command(flatten)]
        file: FileArg,
        /// Grid thinness; defaults to the region's own.
        #[arg(long)]
        thinness: Option<u32>,
    },
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// Which cross-check to run per case.
    #[arg(value_enum)]
    pub kind: FuzzKind,
    /// Number of cases.
    #[arg(long, default_value_t = 100)]
    pub cases: u64,
    /// Largest lattice size the generator may emit.
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Campaign seed; case i draws from stream i of this seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First case number, for replaying a slice of a campaign.
    #[arg(long, default_value_t = 0)]
    pub offset: u64,
    /// Worker threads; the report does not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Input-class failures: the request could not be carried out at all.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Input(String),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Default enumeration bound when `--cap` is absent, matching the
/// library-side guard.
const DEFAULT_CAP: usize = 20;

struct Ctx {
    cap: usize,
}

impl Ctx {
    fn labels(lat: &FiniteLattice, set: ElemSet) -> Vec<String> {
        set.iter().map(|e| lat.display(e)).collect()
    }
}

/// Runs one request to completion and returns its report; `Err` means the
/// input was unusable (exit 2).
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let ctx = Ctx {
        cap: cli.cap.unwrap_or(DEFAULT_CAP),
    };
    match &cli.command {
        Command::Lattice { cmd } => lattice_cmd(&ctx, cmd),
        Command::Site { cmd } => site_cmd(&ctx, cmd),
        Command::Frame { cmd } => frame_cmd(&ctx, cmd),
        Command::Valuation { cmd } => valuation_cmd(&ctx, cmd),
        Command::Inner { cmd } => inner_cmd(&ctx, cmd),
        Command::Coin { cmd } => coin_cmd(cmd),
        Command::Lebesgue { cmd } => lebesgue_cmd(&ctx, cmd),
        Command::Fuzz(args) => Ok(fuzz_cmd(args)),
    }
}

fn lattice_cmd(_ctx: &Ctx, cmd: &LatticeCmd) -> Result<Report, CliError> {
    let LatticeCmd::Check(FileArg { file }) = cmd;
    let parsed = parse_site_file(file)?;
    let lat = &parsed.lattice;
    let mut report = Report::new("lattice check").with_input(parsed.path.clone());
    report.line(format!("elements: {}", lat.size()));
    report.line(format!("bottom: {}", lat.display(lat.bottom())));
    let top = lat.top().expect("validated lattices are bounded");
    report.line(format!("top: {}", lat.display(top)));
    report.line("laws: bounded, antisymmetric, distributive".to_string());
    report.record(json!({
        "elements": lat.size(),
        "bottom": lat.display(lat.bottom()),
        "top": lat.display(top),
        "distributive": true,
    }));
    Ok(report)
}

fn site_cmd(ctx: &Ctx, cmd: &SiteCmd) -> Result<Report, CliError> {
    match cmd {
        SiteCmd::Sheafify { file, element } => {
            let parsed = parse_site_file(&file.file)?;
            let site = parsed.site()?;
            let lat = site.lattice().clone();
            let targets: Vec<_> = match element {
                Some(label) => vec![parsed.element(label)?],
                None => lat.elements().collect(),
            };
            let mut report = Report::new("site sheafify").with_input(parsed.path.clone());
            for p in targets {
                let sheaf = principal_sheaf(&site, p);
                report.line(format!(
                    "sheaf({}) = {}",
                    lat.display(p),
                    lat.display_set(sheaf.members())
                ));
                report.record(json!({
                    "element": lat.display(p),
                    "members": Ctx::labels(&lat, sheaf.members()),
                }));
            }
            Ok(report)
        }
        SiteCmd::Frame(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let site = parsed.site()?;
            let frame = FiniteFrame::from_site_capped(&site, ctx.cap).map_err(input)?;
            let flat = frame.lattice().clone();
            let mut report = Report::new("site frame").with_input(parsed.path.clone());
            report.line(format!("ideals: {}", frame.size()));
            report.line(format!("boolean: {}", frame.is_boolean()));
            let atoms = frame.atoms();
            report.line(format!(
                "atoms: {}",
                atoms
                    .iter()
                    .map(|a| flat.display(*a))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            report.record(json!({
                "ideals": frame.size(),
                "boolean": frame.is_boolean(),
                "atoms": atoms.iter().map(|a| flat.display(*a)).collect::<Vec<_>>(),
                "elements": flat.elements().map(|e| flat.display(e)).collect::<Vec<_>>(),
            }));
            Ok(report)
        }
        SiteCmd::Inner(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let rep = inner_frame_capped(&v, ctx.cap).map_err(input)?;
            let flat = rep.frame.lattice().clone();
            let mut report = Report::new("site inner").with_input(parsed.path.clone());
            report.line(format!("ideals: {}", rep.frame.size()));
            report.line(format!("boolean: {}", rep.boolean));
            report.line(format!("atoms: {}", rep.frame.atoms().len()));
            report.line(format!("faithful: {}", rep.faithful));
            report.line(format!(
                "null ideal: {}",
                v.lattice().display_set(rep.null_ideal.members())
            ));
            report.record(json!({
                "ideals": rep.frame.size(),
                "boolean": rep.boolean,
                "atoms": rep.frame.atoms().len(),
                "faithful": rep.faithful,
            }));
            for e in flat.elements() {
                report.line(format!(
                    "measure {} = {}",
                    flat.display(e),
                    rep.inner_measure.value(e)
                ));
                report.record(json!({
                    "element": flat.display(e),
                    "measure": rep.inner_measure.value(e).to_string(),
                }));
            }
            Ok(report)
        }
        SiteCmd::Points(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let site = parsed.site()?;
            let lat = site.lattice().clone();
            let points = enumerate_points_capped(&site, ctx.cap).map_err(input)?;
            let mut report = Report::new("site points").with_input(parsed.path.clone());
            report.line(format!("points: {}", points.len()));
            for pt in &points {
                report.line(format!(
                    "point at {}: {}",
                    lat.display(pt.generator(&lat)),
                    lat.display_set(pt.members())
                ));
                report.record(json!({
                    "generator": lat.display(pt.generator(&lat)),
                    "members": Ctx::labels(&lat, pt.members()),
                }));
            }
            Ok(report)
        }
    }
}

/// A site file yields its ideal frame; a bare lattice file is already a
/// frame by distributivity.
fn frame_of(ctx: &Ctx, parsed: &ParsedSite) -> Result<FiniteFrame, CliError> {
    match &parsed.coverage {
        None => FiniteFrame::new(parsed.lattice.clone()).map_err(input),
        Some(_) => {
            let site = parsed.site()?;
            FiniteFrame::from_site_capped(&site, ctx.cap).map_err(input)
        }
    }
}

fn frame_cmd(ctx: &Ctx, cmd: &FrameCmd) -> Result<Report, CliError> {
    match cmd {
        FrameCmd::Heyting(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let frame = frame_of(ctx, &parsed)?;
            let lat = frame.lattice().clone();
            let mut report = Report::new("frame heyting").with_input(parsed.path.clone());
            let names: Vec<String> = lat.elements().map(|e| lat.display(e)).collect();
            report.line(format!("columns: {}", names.join(", ")));
            for u in lat.elements() {
                let row: Vec<String> = lat
                    .elements()
                    .map(|v| lat.display(frame.heyting(u, v)))
                    .collect();
                report.line(format!("{} -> .: {}", lat.display(u), row.join(", ")));
                report.record(json!({"antecedent": lat.display(u), "row": row}));
            }
            Ok(report)
        }
        FrameCmd::Boolean(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let frame = frame_of(ctx, &parsed)?;
            let lat = frame.lattice().clone();
            let mut report = Report::new("frame boolean").with_input(parsed.path.clone());
            report.line(format!("boolean: {}", frame.is_boolean()));
            report.line(format!("atoms: {}", frame.atoms().len()));
            for u in lat.elements() {
                let c = frame.complement_of(u);
                report.line(format!(
                    "complement({}) = {}",
                    lat.display(u),
                    c.map_or_else(|| "none".to_string(), |e| lat.display(e))
                ));
                report.record(json!({
                    "element": lat.display(u),
                    "complement": c.map(|e| lat.display(e)),
                }));
            }
            report.record(json!({
                "boolean": frame.is_boolean(),
                "atoms": frame.atoms().len(),
            }));
            Ok(report)
        }
        FrameCmd::Sublocales(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let frame = frame_of(ctx, &parsed)?;
            let lat = frame.lattice().clone();
            let subs = frame.enumerate_sublocales_capped(ctx.cap).map_err(input)?;
            let mut report = Report::new("frame sublocales").with_input(parsed.path.clone());
            report.line(format!("sublocales: {}", subs.len()));
            for class in &subs {
                let mut tags = Vec::new();
                if class.open {
                    tags.push("open");
                }
                if class.closed {
                    tags.push("closed");
                }
                if class.boolean {
                    tags.push("boolean");
                }
                if tags.is_empty() {
                    tags.push("other");
                }
                report.line(format!(
                    "{} [{}]",
                    lat.display_set(class.members.members()),
                    tags.join(", ")
                ));
                report.record(json!({
                    "members": Ctx::labels(&lat, class.members.members()),
                    "open": class.open,
                    "closed": class.closed,
                    "boolean": class.boolean,
                }));
            }
            report.record(json!({"sublocales": subs.len()}));
            Ok(report)
        }
        FrameCmd::Negation(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let frame = frame_of(ctx, &parsed)?;
            let lat = frame.lattice().clone();
            let mut report = Report::new("frame negation").with_input(parsed.path.clone());
            let mut collapse = true;
            for u in lat.elements() {
                let n1 = frame.negation(u);
                let n2 = frame.negation(n1);
                let n3 = frame.negation(n2);
                if n3 != n1 {
                    collapse = false;
                    report.fail(format!(
                        "triple negation of {} gives {}, expected {}",
                        lat.display(u),
                        lat.display(n3),
                        lat.display(n1)
                    ));
                }
                report.line(format!(
                    "not {} = {}, not not {} = {}",
                    lat.display(u),
                    lat.display(n1),
                    lat.display(u),
                    lat.display(n2)
                ));
                report.record(json!({
                    "element": lat.display(u),
                    "negation": lat.display(n1),
                    "double": lat.display(n2),
                }));
            }
            let dn = frame.nucleus_image_double_negation();
            report.line(format!("triple negation collapses: {collapse}"));
            report.line(format!(
                "double-negation sublocale size: {}",
                dn.frame.size()
            ));
            report.record(json!({
                "collapse": collapse,
                "double_negation_size": dn.frame.size(),
            }));
            Ok(report)
        }
        FrameCmd::Bsub { file, element } => {
            let parsed = parse_site_file(&file.file)?;
            let frame = frame_of(ctx, &parsed)?;
            let lat = frame.lattice().clone();
            let n = parsed.element(element)?;
            let sub = frame.boolean_sublocale(n);
            let mut report = Report::new("frame bsub").with_input(parsed.path.clone());
            report.line(format!("bottom: {}", lat.display(n)));
            report.line(format!("size: {}", sub.frame.size()));
            report.line(format!("boolean: {}", sub.frame.is_boolean()));
            let members: Vec<String> = sub.members.iter().map(|m| lat.display(*m)).collect();
            report.line(format!("members: {}", members.join(", ")));
            report.record(json!({
                "bottom": lat.display(n),
                "size": sub.frame.size(),
                "boolean": sub.frame.is_boolean(),
                "members": members,
            }));
            Ok(report)
        }
    }
}

fn valuation_cmd(ctx: &Ctx, cmd: &ValuationCmd) -> Result<Report, CliError> {
    match cmd {
        ValuationCmd::Check(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let mut report = Report::new("valuation check").with_input(parsed.path.clone());
            match parsed.valuation()? {
                Ok(v) => {
                    let lat = v.lattice().clone();
                    let top = lat.top().expect("validated lattices are bounded");
                    report.line("laws: zero bottom, monotone, modular".to_string());
                    report.line(format!("total mass: {}", v.value(top)));
                    report.line(format!("faithful: {}", v.is_faithful()));
                    let nulls: Vec<String> = lat
                        .elements()
                        .filter(|p| v.value(*p).is_zero())
                        .map(|p| lat.display(p))
                        .collect();
                    report.line(format!("null elements: {}", nulls.join(", ")));
                    report.record(json!({
                        "valid": true,
                        "total": v.value(top).to_string(),
                        "faithful": v.is_faithful(),
                        "null_elements": nulls,
                    }));
                }
                Err(e) => {
                    report.record(json!({"valid": false, "law": e.to_string()}));
                    report.fail(e.to_string());
                }
            }
            Ok(report)
        }
        ValuationCmd::Quotient(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let lat = v.lattice().clone();
            let q = quotient_by_congruence(&v);
            let qlat = q.valuation.lattice().clone();
            let mut report = Report::new("valuation quotient").with_input(parsed.path.clone());
            report.line(format!("classes: {} (from {})", qlat.size(), lat.size()));
            report.line(format!("faithful: {}", q.valuation.is_faithful()));
            for p in lat.elements() {
                let img = q.projection.apply(p);
                report.line(format!(
                    "{} -> {} (measure {})",
                    lat.display(p),
                    qlat.display(img),
                    q.valuation.value(img)
                ));
                report.record(json!({
                    "element": lat.display(p),
                    "class": qlat.display(img),
                    "measure": q.valuation.value(img).to_string(),
                }));
            }
            report.record(json!({
                "classes": qlat.size(),
                "faithful": q.valuation.is_faithful(),
            }));
            Ok(report)
        }
        ValuationCmd::Glue { file, left, right } => {
            let parsed = parse_site_file(&file.file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let lat = v.lattice().clone();
            let u = parsed.element(left)?;
            let w = parsed.element(right)?;
            let mu = DownsetValuation::restrict(&v, u);
            let mw = DownsetValuation::restrict(&v, w);
            let mut report = Report::new("valuation glue").with_input(parsed.path.clone());
            let glued = glue_measures(&mu, &mw).map_err(input)?;
            let root = glued.root();
            report.line(format!(
                "glued over {} and {}; root {}",
                lat.display(u),
                lat.display(w),
                lat.display(root)
            ));
            for p in lat.downset(root).iter() {
                let got = glued.value(p).expect("downset of the root is covered");
                report.line(format!("measure {} = {}", lat.display(p), got));
                report.record(json!({
                    "element": lat.display(p),
                    "measure": got.to_string(),
                }));
                if got != v.value(p) {
                    report.fail(format!(
                        "glued measure at {} is {}, source says {}",
                        lat.display(p),
                        got,
                        v.value(p)
                    ));
                }
            }
            report.record(json!({"root": lat.display(root)}));
            Ok(report)
        }
        ValuationCmd::Push(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let rep = inner_frame_capped(&v, ctx.cap).map_err(input)?;
            let two = FiniteFrame::new(FiniteLattice::chain(&["0", "1"]).map_err(input)?)
                .map_err(input)?;
            let table = vec![rep.frame.bottom(), rep.frame.top()];
            let f = FrameMap::new(two.clone(), rep.frame.clone(), table).map_err(input)?;
            let pushed = pushforward_measure(&f, &rep.inner_measure).map_err(input)?;
            let tlat = two.lattice().clone();
            let mut report = Report::new("valuation push").with_input(parsed.path.clone());
            report.line("collapse onto the two-element frame".to_string());
            for p in tlat.elements() {
                report.line(format!("measure {} = {}", tlat.display(p), pushed.value(p)));
                report.record(json!({
                    "element": tlat.display(p),
                    "measure": pushed.value(p).to_string(),
                }));
            }
            Ok(report)
        }
    }
}

fn inner_cmd(ctx: &Ctx, cmd: &InnerCmd) -> Result<Report, CliError> {
    match cmd {
        InnerCmd::Almost(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let lat = v.lattice().clone();
            let verdict = is_almost_disconnected(&v);
            let mut report = Report::new("inner almost").with_input(parsed.path.clone());
            report.line(format!("almost disconnected: {}", verdict.disconnected));
            report.line(format!("almost boolean: {}", verdict.boolean));
            report.record(json!({
                "disconnected": verdict.disconnected,
                "boolean": verdict.boolean,
            }));
            if let Some(w) = &verdict.witness {
                report.line(format!(
                    "no split of {} against {} reaches measure {}",
                    lat.display(w.c),
                    lat.display(w.c0),
                    w.target
                ));
                for cand in &w.scanned {
                    report.line(format!(
                        "  candidate {}: meet {}, join {}",
                        lat.display(cand.d),
                        cand.meet_value,
                        cand.join_value
                    ));
                }
                report.record(json!({
                    "witness": {
                        "c": lat.display(w.c),
                        "c0": lat.display(w.c0),
                        "target": w.target.to_string(),
                    },
                }));
            }
            Ok(report)
        }
        InnerCmd::Equivalence(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let rep = theorem_equivalence_check_capped(&v, ctx.cap).map_err(input)?;
            let mut report = Report::new("inner equivalence").with_input(parsed.path.clone());
            report.line(format!("almost boolean: {}", rep.almost.boolean));
            report.line(format!("inner frame boolean: {}", rep.inner_boolean));
            report.line(format!("boolean quotient match: {}", rep.bsub_match));
            report.line(format!(
                "sizes: inner {} over base {}",
                rep.inner_size, rep.base_size
            ));
            report.record(json!({
                "almost_boolean": rep.almost.boolean,
                "inner_boolean": rep.inner_boolean,
                "bsub_match": rep.bsub_match,
                "agree": rep.agree,
                "inner_size": rep.inner_size,
                "base_size": rep.base_size,
            }));
            if !rep.agree {
                report.fail(format!(
                    "characterizations disagree: split={} boolean={} bsub={}",
                    rep.almost.disconnected, rep.inner_boolean, rep.bsub_match
                ));
            }
            Ok(report)
        }
        InnerCmd::Exhaust(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let lat = v.lattice().clone();
            let rep = inner_frame_capped(&v, ctx.cap).map_err(input)?;
            let flat = rep.frame.lattice().clone();
            let mut report = Report::new("inner exhaust").with_input(parsed.path.clone());
            for e in flat.elements() {
                let ideal = rep.ideals()[e.index()];
                let chain = exhaustion(&v, ideal);
                let last = *chain.last().expect("chains are nonempty");
                let names: Vec<String> = chain.iter().map(|p| lat.display(*p)).collect();
                report.line(format!(
                    "{}: {} (measure {})",
                    flat.display(e),
                    names.join(" -> "),
                    v.value(last)
                ));
                report.record(json!({
                    "ideal": flat.display(e),
                    "chain": names,
                    "measure": v.value(last).to_string(),
                }));
                if v.value(last) != rep.inner_measure.value(e) {
                    report.fail(format!(
                        "chain for {} tops out at {}, inner measure says {}",
                        flat.display(e),
                        v.value(last),
                        rep.inner_measure.value(e)
                    ));
                }
            }
            Ok(report)
        }
        InnerCmd::Roundtrip(FileArg { file }) => {
            let parsed = parse_site_file(file)?;
            let v = parsed.valuation()?.map_err(input)?;
            let mut report = Report::new("inner roundtrip").with_input(parsed.path.clone());
            match finite_part_roundtrip(&v) {
                Ok(rt) => {
                    report.line(format!("rebuilt ideals: {}", rt.rebuilt.frame.size()));
                    report.line(format!("isomorphic: {}", rt.iso));
                    report.record(json!({
                        "faithful": true,
                        "iso": rt.iso,
                        "rebuilt": rt.rebuilt.frame.size(),
                    }));
                    if !rt.iso {
                        report.fail("rebuilt frame does not match the input".to_string());
                    }
                }
                Err(InnerError::NotFaithfulInput { p, q }) => {
                    report.line(format!(
                        "not faithful: measure cannot separate {p} from {q}"
                    ));
                    let fixed = quotient_by_congruence(&v);
                    let rt = finite_part_roundtrip(&fixed.valuation).map_err(input)?;
                    report.line(format!(
                        "after quotient: {} classes, isomorphic: {}",
                        fixed.valuation.lattice().size(),
                        rt.iso
                    ));
                    report.record(json!({
                        "faithful": false,
                        "witness": {"p": p, "q": q},
                        "quotient_classes": fixed.valuation.lattice().size(),
                        "quotient_iso": rt.iso,
                    }));
                    report.fail(format!(
                        "input not faithful at ({p}, {q}); quotient roundtrip iso: {}",
                        rt.iso
                    ));
                }
                Err(e) => return Err(input(e)),
            }
            Ok(report)
        }
    }
}

fn coin_cmd(cmd: &CoinCmd) -> Result<Report, CliError> {
    let CoinCmd::Fatcantor {
        stages,
        verify_complement,
    } = cmd;
    let built = fat_cantor(*stages).map_err(input)?;
    let mut report = Report::new("coin fatcantor");
    let mut measures = Vec::with_capacity(built.len());
    for (i, stage) in built.iter().enumerate() {
        let n = (i + 1) as u32;
        let site = coin_site(n, Grading::Thickened).map_err(input)?;
        let m = site.measure(stage);
        report.line(format!("stage {n}: measure {m} (~{:.6})", m.to_f64()));
        report.record(json!({"stage": n, "measure": m.to_string()}));
        measures.push(m);
    }
    for n in 2..=built.len() as u32 {
        let prev = &measures[n as usize - 2];
        let gain = Rat::one()
            .checked_sub(prev)
            .expect("stage measures stay below one");
        let expect = prev + &(&gain * &Rat::dyadic(1, 2 * n - 1));
        if measures[n as usize - 1] != expect {
            report.fail(format!(
                "stage {n} measure {} breaks the recurrence, expected {}",
                measures[n as usize - 1],
                expect
            ));
        }
    }
    let bound = Rat::new(2, 3).expect("constant");
    let sup = measures.iter().max().expect("at least one stage");
    report.line(format!(
        "sup of stage measures: {sup} <= 2/3: {}",
        sup <= &bound
    ));
    if sup > &bound {
        report.fail(format!("stage measures exceed 2/3 at {sup}"));
    }
    if *verify_complement {
        let last = built.len().saturating_sub(1).min(3);
        if last == 0 {
            report.line("complement check needs at least 2 stages".to_string());
        }
        for k in 1..=last {
            let ok = verify_no_complement(&built, k).map_err(input)?;
            report.line(format!("no complement within stage {k}: {ok}"));
            report.record(json!({"complement_stage": k, "verified": ok}));
            if !ok {
                report.fail(format!("a complement appeared at stage {k}"));
            }
        }
    }
    Ok(report)
}

fn parse_dyadic_flag(flag: &str, raw: &str) -> Result<Dyadic, CliError> {
    raw.trim()
        .parse::<Dyadic>()
        .map_err(|e| CliError::Input(format!("{flag}: {e}")))
}

fn region_lines(report: &mut Report, s: &StandardSet) {
    report.line(format!("dim: {}", s.dim()));
    report.line(format!("thinness: {}", s.thinness()));
    report.line(format!("cubes: {}", s.cube_count()));
    let m = s.measure();
    report.line(format!("measure: {m} (~{:.6})", m.to_f64()));
    report.record(json!({
        "dim": s.dim(),
        "thinness": s.thinness(),
        "cubes": s.cube_count(),
        "measure": m.to_string(),
    }));
}

fn lebesgue_cmd(ctx: &Ctx, cmd: &LebesgueCmd) -> Result<Report, CliError> {
    match cmd {
        LebesgueCmd::Measure(FileArg { file }) => {
            let s = parse_region_file(file)?;
            let mut report = Report::new("lebesgue measure").with_input(file.display().to_string());
            region_lines(&mut report, &s);
            Ok(report)
        }
        LebesgueCmd::Translate { file, by } => {
            let s = parse_region_file(&file.file)?;
            let vector = by
                .split(',')
                .map(|part| parse_dyadic_flag("--by", part))
                .collect::<Result<Vec<Dyadic>, CliError>>()?;
            if vector.len() != s.dim() {
                return Err(CliError::Input(format!(
                    "--by has {} coordinates, region has dimension {}",
                    vector.len(),
                    s.dim()
                )));
            }
            let t = s.translate(&vector).map_err(input)?;
            let mut report =
                Report::new("lebesgue translate").with_input(file.file.display().to_string());
            region_lines(&mut report, &t);
            if t.measure() != s.measure() {
                report.fail(format!(
                    "translation changed the measure from {} to {}",
                    s.measure(),
                    t.measure()
                ));
            } else {
                report.line("translation invariance: exact".to_string());
            }
            Ok(report)
        }
        LebesgueCmd::Shear {
            file,
            axis,
            by_axis,
            amount,
            thinness,
        } => {
            let s = parse_region_file(&file.file)?;
            let a = parse_dyadic_flag("--amount", amount)?;
            let spec = ShearSpec::new(*axis, *by_axis, a).map_err(input)?;
            let bracket = shear_bracket(&s, &spec, *thinness).map_err(input)?;
            let mut report =
                Report::new("lebesgue shear").with_input(file.file.display().to_string());
            let inner = bracket.inner_measure();
            let outer = bracket.outer_measure();
            let gap = bracket.gap();
            report.line(format!(
                "inner: {inner} (~{:.6}), {} cubes",
                inner.to_f64(),
                bracket.inner.cube_count()
            ));
            report.line(format!(
                "outer: {outer} (~{:.6}), {} cubes",
                outer.to_f64(),
                bracket.outer.cube_count()
            ));
            report.line(format!("gap: {gap} (~{:.6})", gap.to_f64()));
            report.record(json!({
                "inner": inner.to_string(),
                "outer": outer.to_string(),
                "gap": gap.to_string(),
                "inner_cubes": bracket.inner.cube_count(),
                "outer_cubes": bracket.outer.cube_count(),
            }));
            Ok(report)
        }
        LebesgueCmd::Svc { k } => {
            let stage = svc_stage(*k).map_err(input)?;
            let mut report = Report::new("lebesgue svc");
            report.line(format!("measure = {}", stage.measure()));
            report.line(format!(
                "stage {}: {} intervals over denominator 2^{}",
                stage.stage(),
                stage.pieces().len(),
                stage.denom_log()
            ));
            report.record(json!({
                "k": stage.stage(),
                "measure": stage.measure().to_string(),
                "pieces": stage.pieces().len(),
                "denom_log": stage.denom_log(),
            }));
            Ok(report)
        }
        LebesgueCmd::Site { file, thinness } => {
            let s = parse_region_file(&file.file)?;
            let t = thinness.unwrap_or_else(|| s.thinness());
            let (v, cubes) = standard_set_site(&s, t).map_err(input)?;
            let lat = v.lattice().clone();
            let mut report =
                Report::new("lebesgue site").with_input(file.file.display().to_string());
            for (i, corner) in cubes.iter().enumerate() {
                report.line(format!("cube c{i} at corner {corner:?} over 2^{t}"));
            }
            let rep = inner_frame_capped(&v, ctx.cap.max(64)).map_err(input)?;
            report.line(format!("ideals: {}", rep.frame.size()));
            report.line(format!("boolean: {}", rep.boolean));
            for p in lat.elements() {
                report.record(json!({
                    "element": lat.display(p),
                    "measure": v.value(p).to_string(),
                }));
            }
            report.record(json!({
                "cubes": cubes.len(),
                "ideals": rep.frame.size(),
                "boolean": rep.boolean,
            }));
            Ok(report)
        }
    }
}

fn fuzz_cmd(args: &FuzzArgs) -> Report {
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8)
    });
    let spec = CampaignSpec {
        kind: args.kind,
        cases: args.cases,
        max_size: args.max_size,
        seed: args.seed,
        offset: args.offset,
        workers,
    };
    let outcomes = run_campaign(&spec);
    let mut report = Report::new(format!("fuzz {}", args.kind.name()));
    report.seed = Some(args.seed);
    let passes = outcomes.iter().filter(|o| o.pass).count();
    let failures: Vec<_> = outcomes.iter().filter(|o| !o.pass).collect();
    let total_attempts: u64 = outcomes.iter().map(|o| o.attempts).sum();
    report.line(format!(
        "cases: {} (offset {}), max size {}",
        args.cases, args.offset, args.max_size
    ));
    report.line(format!("passed: {passes}/{}", outcomes.len()));
    let acceptance = if total_attempts == 0 {
        1.0
    } else {
        outcomes.len() as f64 / total_attempts as f64
    };
    report.line(format!(
        "generator attempts: {total_attempts}, acceptance rate {acceptance:.3}"
    ));
    for o in &outcomes {
        report.record(json!({
            "case": o.case,
            "pass": o.pass,
            "attempts": o.attempts,
            "detail": o.detail,
        }));
    }
    report.record(json!({
        "cases": outcomes.len(),
        "passed": passes,
        "failed": failures.len(),
        "attempts": total_attempts,
    }));
    for o in failures.iter().take(10) {
        report.line(format!("case {} failed: {}", o.case, o.detail));
    }
    if let Some(first) = failures.first() {
        report.fail(format!(
            "case {}: {}; replay: muloc fuzz {} --cases 1 --offset {} --max-size {} --seed {}",
            first.case,
            first.detail,
            args.kind.name(),
            first.case,
            args.max_size,
            args.seed
        ));
    }
    report
}
