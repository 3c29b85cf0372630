//! Command line front end. Every subcommand reads one JSON document from
//! stdin (or `--file`), computes, and prints one output document whose
//! top level records the precision and truncation in effect. Exit codes:
//! 0 for success or a positive verdict, 1 for a definite negative
//! (impure, nonzero obstruction, failed battery), 2 for input errors,
//! 3 when the answer is unknown at the requested depth.

mod dto;
mod render;

use clap::{Parser, Subcommand, ValueEnum};
use dto::{
    class_coords, input_err, jints, CertifyWInput, CliResult, CompletionInput, CompositeInput,
    GroupDoc, GroupInput, JInt, LawDoc, Lim1Input, MapDoc, PairInput, PextInput, PhantomEmInput,
    PhantomInput, RealizeInput, SesDoc, SixTermInput,
};
use phext::fgab::ShortExact;
use phext::homalg::{ext_group, hom_group, six_term};
use phext::padic::{
    completion_triple, w_certificate, wbi_check, Ambient, BtClass, CompletionDescription,
    DenominatorLaw, ValTail, WCertKind,
};
use phext::phantom::{
    composite_stagewise_check, nonsplit_certificate, phantom_em, phantom_group, PhantomEm,
};
use phext::purity::{is_pure, PurityMethod, PurityWitness};
use phext::suite::run_selftest;
use phext::towers::{lim_and_lim1, pext_ind, DirectTail, Lim1Report, Lim1Status, LimDescription};
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "phext",
    version,
    about = "Hom, Ext, purity, towers, completions, and phantom maps for finitely generated abelian groups, in exact arithmetic"
)]
struct Cli {
    /// Digits of p-adic precision carried by completions and witnesses
    #[arg(long, global = true, default_value_t = 40)]
    precision: u32,

    /// Stage cutoff for towers and stagewise certificates
    #[arg(long, global = true, default_value_t = 20)]
    truncate: u64,

    /// Seed for the randomized batteries
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Read the input document from this file instead of stdin
    #[arg(long, global = true)]
    file: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Put a group given by canonical data or a presentation into canonical form
    Group,
    /// Hom(A, B) in canonical form
    Hom,
    /// Ext(A, B) in canonical form
    Ext,
    /// The six term exact sequence of a short exact sequence against Z/n
    SixTerm,
    /// Build the extension named by a class in Ext(A, B)
    Realize,
    /// The class of a short exact sequence in Ext(A, B)
    ClassOf,
    /// Decide purity of a short exact sequence
    Pure {
        /// Which detection method decides the verdict
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Phantom Ext of a direct tower against a coefficient group
    Pext,
    /// lim and lim1 of an inverse tower
    Lim1,
    /// The three completions of a coefficient group at p, compared
    Complete,
    /// Check that the two completion comparison conditions agree
    Wbi,
    /// Certify a lower bound on the order of the completion kernel witness
    CertifyW,
    /// Phantom maps out of a tower of complexes into coefficients
    Phantom,
    /// Phantom maps into an Eilenberg-Mac Lane object, degree by degree
    PhantomEm,
    /// Verify stagewise vanishing of a composite of two phantom cocycles
    CompositeCheck,
    /// Certificate that divisibility to a depth forces a nonsplit extension
    Nonsplit {
        /// How many divisibility steps to verify
        #[arg(long, default_value_t = 30)]
        depth: u64,
    },
    /// Run the randomized self test batteries
    Selftest {
        /// Cases per battery
        #[arg(long, default_value_t = 200)]
        cases: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Torsion,
    Restriction,
    Ulm,
    Pushout,
    All,
}

fn method_name(m: PurityMethod) -> &'static str {
    match m {
        PurityMethod::TorsionSurjectivity => "torsion",
        PurityMethod::HomExtension => "restriction",
        PurityMethod::UlmMembership => "ulm",
        PurityMethod::FinitePushout => "pushout",
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok((value, exit)) => {
            let document = json!({
                "precision": cli.precision,
                "truncate": cli.truncate,
                "result": value,
            });
            let rendered = match cli.format {
                Format::Json => {
                    let mut s =
                        serde_json::to_string_pretty(&document).expect("documents serialize");
                    s.push('\n');
                    s
                }
                Format::Text => render::render_text(&document),
            };
            // tolerate a consumer that closes the pipe early
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(rendered.as_bytes());
            let _ = out.flush();
            exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: &Cli) -> CliResult<(Value, i32)> {
    match &cli.cmd {
        Cmd::Group => cmd_group(cli),
        Cmd::Hom => cmd_hom(cli),
        Cmd::Ext => cmd_ext(cli),
        Cmd::SixTerm => cmd_six_term(cli),
        Cmd::Realize => cmd_realize(cli),
        Cmd::ClassOf => cmd_class_of(cli),
        Cmd::Pure { method } => cmd_pure(cli, *method),
        Cmd::Pext => cmd_pext(cli),
        Cmd::Lim1 => cmd_lim1(cli),
        Cmd::Complete => cmd_complete(cli),
        Cmd::Wbi => cmd_wbi(cli),
        Cmd::CertifyW => cmd_certify_w(cli),
        Cmd::Phantom => cmd_phantom(cli),
        Cmd::PhantomEm => cmd_phantom_em(cli),
        Cmd::CompositeCheck => cmd_composite_check(cli),
        Cmd::Nonsplit { depth } => cmd_nonsplit(cli, *depth),
        Cmd::Selftest { cases } => cmd_selftest(cli, *cases),
    }
}

fn read_document(cli: &Cli) -> CliResult<Value> {
    let text = match &cli.file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| input_err(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    serde_json::from_str(&text).map_err(|e| input_err(format!("invalid JSON: {e}")))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| input_err(format!("invalid request: {e}")))
}

fn cmd_group(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: GroupInput = parse(read_document(cli)?)?;
    let g = input.into_group()?;
    Ok((json!(GroupDoc::of(&g)), 0))
}

fn cmd_hom(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: PairInput = parse(read_document(cli)?)?;
    let a = input.a.into_group()?;
    let b = input.b.into_group()?;
    Ok((json!(GroupDoc::of(hom_group(&a, &b).group())), 0))
}

fn cmd_ext(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: PairInput = parse(read_document(cli)?)?;
    let a = input.a.into_group()?;
    let b = input.b.into_group()?;
    Ok((json!(GroupDoc::of(ext_group(&a, &b).group())), 0))
}

fn cmd_six_term(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: SixTermInput = parse(read_document(cli)?)?;
    let ses = ShortExact::new(input.incl.to_map()?, input.proj.to_map()?)?;
    let six = six_term(&ses, &input.n.0)?;
    let exact = six.is_exact();
    let value = json!({
        "n": input.n,
        "groups": {
            "tor_b": GroupDoc::of(&six.tor_b.group),
            "tor_c": GroupDoc::of(&six.tor_c.group),
            "tor_a": GroupDoc::of(&six.tor_a.group),
            "mod_b": GroupDoc::of(&six.mod_b.group),
            "mod_c": GroupDoc::of(&six.mod_c.group),
            "mod_a": GroupDoc::of(&six.mod_a.group),
        },
        "maps": six.maps.iter().map(MapDoc::of).collect::<Vec<_>>(),
        "delta": MapDoc::of(six.delta()),
        "exact": exact,
    });
    Ok((value, if exact { 0 } else { 3 }))
}

fn cmd_realize(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: RealizeInput = parse(read_document(cli)?)?;
    let a = input.a.into_group()?;
    let b = input.b.into_group()?;
    let ext = ext_group(&a, &b);
    let dim = ext.group().dim();
    if input.class.len() != dim {
        return Err(input_err(format!(
            "class must have {dim} coordinates for Ext = {}, got {}",
            ext.group(),
            input.class.len()
        )));
    }
    let u = ext.group().element(class_coords(&input.class));
    let ses = ext.realize(&u);
    let value = json!({
        "ext": GroupDoc::of(ext.group()),
        "class": jints(u.coords()),
        "sub": GroupDoc::of(ses.sub()),
        "middle": GroupDoc::of(ses.middle()),
        "quotient": GroupDoc::of(ses.quotient()),
        "incl": MapDoc::of(ses.incl()),
        "proj": MapDoc::of(ses.proj()),
    });
    Ok((value, 0))
}

fn cmd_class_of(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: SesDoc = parse(read_document(cli)?)?;
    let ses = input.to_ses()?;
    let ext = ext_group(ses.quotient(), ses.sub());
    let u = ext.class_of(&ses);
    let zero = u == ext.zero_class();
    let value = json!({
        "ext": GroupDoc::of(ext.group()),
        "class": jints(u.coords()),
        "is_zero": zero,
    });
    Ok((value, 0))
}

fn purity_witness_doc(w: &PurityWitness) -> Value {
    match w {
        PurityWitness::TorsionDrop { n, a_elem } => json!({
            "kind": "torsion_drop",
            "n": JInt(n.clone()),
            "element": jints(a_elem),
        }),
        PurityWitness::NonExtendingHom { modulus, values } => json!({
            "kind": "non_extending_hom",
            "modulus": JInt(modulus.clone()),
            "values": jints(values),
        }),
        PurityWitness::NonzeroExtClass { coords } => json!({
            "kind": "nonzero_ext_class",
            "coords": jints(coords),
        }),
        PurityWitness::ObstructedPushout { modulus, values } => json!({
            "kind": "obstructed_pushout",
            "modulus": JInt(modulus.clone()),
            "values": jints(values),
        }),
    }
}

fn cmd_pure(cli: &Cli, method: MethodArg) -> CliResult<(Value, i32)> {
    let input: SesDoc = parse(read_document(cli)?)?;
    let ses = input.to_ses()?;
    let report = is_pure(&ses, cli.seed)?;
    let selected: Vec<_> = report
        .verdicts
        .iter()
        .filter(|v| match method {
            MethodArg::All => true,
            MethodArg::Torsion => v.method == PurityMethod::TorsionSurjectivity,
            MethodArg::Restriction => v.method == PurityMethod::HomExtension,
            MethodArg::Ulm => v.method == PurityMethod::UlmMembership,
            MethodArg::Pushout => v.method == PurityMethod::FinitePushout,
        })
        .collect();
    if selected.is_empty() {
        return Err(input_err("no verdict from the requested method"));
    }
    let pure = selected.iter().all(|v| v.pure);
    let value = json!({
        "pure": pure,
        "split": report.split,
        "seed": cli.seed,
        "levels": jints(&report.levels),
        "verdicts": selected.iter().map(|v| json!({
            "method": method_name(v.method),
            "pure": v.pure,
            "detail": v.detail,
        })).collect::<Vec<_>>(),
        "witness": report.witness.as_ref().map(purity_witness_doc),
    });
    Ok((value, if pure { 0 } else { 1 }))
}

fn law_doc(f: &phext::affine::Affine) -> Value {
    json!(LawDoc::of(f))
}

fn btclass_doc(c: &BtClass) -> Value {
    let ambient = match c.ambient {
        Ambient::Tilde => "tilde",
        Ambient::Hat => "hat",
        Ambient::Pinf => "pinf",
    };
    let tail = match c.rep.tail() {
        ValTail::Affine(f) => json!({"kind": "affine", "alpha": f.alpha, "beta": f.beta}),
        ValTail::Zero => json!({"kind": "zero"}),
    };
    json!({
        "ambient": ambient,
        "p": c.rep.prime(),
        "precision": c.rep.precision(),
        "prefix": c.rep.prefix().iter().map(|x| x.digits().to_vec()).collect::<Vec<_>>(),
        "tail": tail,
    })
}

fn lim1_doc(r: &Lim1Report, truncation: u64) -> CliResult<Value> {
    let status = match &r.status {
        Lim1Status::ZeroMittagLeffler { level } => json!({
            "kind": "zero",
            "reason": "mittag_leffler",
            "stable_from": level,
        }),
        Lim1Status::ZeroFiniteGroups => json!({
            "kind": "zero",
            "reason": "finite_stages",
        }),
        Lim1Status::NonzeroWitness { witness } => {
            let verified = witness.verify(truncation.max(4))?;
            let w = match witness {
                phext::towers::Lim1Witness::DivisiblePart { p, f, class, precision } => json!({
                    "kind": "divisible_part",
                    "p": p,
                    "law": law_doc(f),
                    "precision": precision,
                    "class": btclass_doc(class),
                }),
                phext::towers::Lim1Witness::EscapingThread { q } => json!({
                    "kind": "escaping_thread",
                    "q": JInt(q.clone()),
                }),
            };
            json!({
                "kind": "nonzero",
                "witness": w,
                "description": witness.description(),
                "verified": verified,
            })
        }
        Lim1Status::Unknown { truncation: t } => json!({
            "kind": "unknown",
            "checked_to": t,
        }),
    };
    let lim = match &r.lim {
        LimDescription::Group(g) => json!({"kind": "group", "group": GroupDoc::of(g)}),
        LimDescription::Symbolic(s) => json!({"kind": "symbolic", "text": s}),
    };
    Ok(json!({"status": status, "lim": lim}))
}

fn lim1_exit(r: &Lim1Report) -> i32 {
    match &r.status {
        Lim1Status::NonzeroWitness { .. } => 1,
        Lim1Status::Unknown { .. } => 3,
        _ => 0,
    }
}

fn cmd_pext(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: PextInput = parse(read_document(cli)?)?;
    let tower = input.tower.to_tower()?;
    let b = input.b.to_coef()?;
    let report = pext_ind(&tower, &b, cli.truncate, cli.precision)?;
    Ok((lim1_doc(&report, cli.truncate)?, lim1_exit(&report)))
}

fn cmd_lim1(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: Lim1Input = parse(read_document(cli)?)?;
    let tower = input.tower.to_tower()?;
    let report = lim_and_lim1(&tower, cli.truncate, cli.precision)?;
    Ok((lim1_doc(&report, cli.truncate)?, lim1_exit(&report)))
}

fn completion_doc(d: &CompletionDescription) -> Value {
    match d {
        CompletionDescription::FgComplete { zp_rank, torsion } => json!({
            "kind": "fg_complete",
            "zp_rank": zp_rank,
            "torsion": GroupDoc::of(torsion),
        }),
        CompletionDescription::QuotientOfVanishing { denominator } => json!({
            "kind": "quotient_of_vanishing",
            "denominator": match denominator {
                DenominatorLaw::AboveF => "above_f",
                DenominatorLaw::Deep => "deep",
            },
        }),
        CompletionDescription::ProdZpModVanishing => json!({"kind": "prod_zp_mod_vanishing"}),
        CompletionDescription::Zero => json!({"kind": "zero"}),
    }
}

fn cmd_complete(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: CompletionInput = parse(read_document(cli)?)?;
    let b = input.b.to_coef()?;
    let triple = completion_triple(&b, input.p, cli.precision)?;
    let value = json!({
        "p": triple.p,
        "adic": completion_doc(&triple.hat),
        "limit": completion_doc(&triple.tilde),
        "vanishing_quotient": completion_doc(&triple.pinf),
        "comparison_iso": triple.comparison_iso,
        "kernel_witness": triple.kernel_witness.as_ref().map(btclass_doc),
    });
    Ok((value, 0))
}

fn cmd_wbi(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: CompletionInput = parse(read_document(cli)?)?;
    let b = input.b.to_coef()?;
    let report = wbi_check(&b, input.p, cli.precision)?;
    let agree = report.divisible_part_zero == report.comparison_iso;
    let value = json!({
        "p": report.p,
        "divisible_part_zero": report.divisible_part_zero,
        "comparison_iso": report.comparison_iso,
        "equivalent": agree,
        "kernel_witness": report.kernel_witness.as_ref().map(btclass_doc),
    });
    Ok((value, if agree { 0 } else { 3 }))
}

fn cmd_certify_w(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: CertifyWInput = parse(read_document(cli)?)?;
    let b = input.b.to_coef()?;
    let cert = w_certificate(&b, input.p, input.k, cli.precision)?;
    let (kind, exit) = match &cert.kind {
        WCertKind::OrderLowerBound { k, all_k } => (
            json!({"kind": "order_lower_bound", "k": k, "all_k": all_k}),
            0,
        ),
        WCertKind::NotDivisibleByP => (json!({"kind": "not_divisible_by_p"}), 0),
        WCertKind::Trivial => (json!({"kind": "trivial"}), 1),
    };
    let value = json!({
        "p": cert.p,
        "k": input.k,
        "certificate": kind,
        "witness": cert.witness.as_ref().map(btclass_doc),
        "note": cert.note,
    });
    Ok((value, exit))
}

fn direct_tail_doc(t: &DirectTail) -> Value {
    match t {
        DirectTail::Constant(g) => json!({"kind": "constant", "group": GroupDoc::of(g)}),
        DirectTail::Prufer { p } => json!({"kind": "prufer", "p": p}),
        DirectTail::ParamCyclic { p, f } => {
            json!({"kind": "param_cyclic", "p": p, "law": law_doc(f)})
        }
        DirectTail::PartialSums { p, f } => {
            json!({"kind": "partial_sums", "p": p, "law": law_doc(f)})
        }
        DirectTail::Truncated { level } => json!({"kind": "truncated", "level": level}),
    }
}

fn cmd_phantom(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: PhantomInput = parse(read_document(cli)?)?;
    let x = input.x.to_ind()?;
    let b = input.b.to_coef()?;
    let report = phantom_group(&x, &b, cli.truncate, cli.precision)?;
    let value = json!({
        "homology_tower": {
            "prefix_len": report.tower.prefix_len(),
            "tail": direct_tail_doc(report.tower.tail()),
        },
        "coefficients": format!("{}", report.coefficients),
        "pext": lim1_doc(&report.pext, cli.truncate)?,
    });
    Ok((value, lim1_exit(&report.pext)))
}

fn cmd_phantom_em(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: PhantomEmInput = parse(read_document(cli)?)?;
    let tower = input.tower.to_tower()?;
    let b = input.b.to_coef()?;
    let result = phantom_em(input.degree, &tower, &b, cli.truncate, cli.precision)?;
    match result {
        PhantomEm::Zero => Ok((
            json!({
                "degree": input.degree,
                "group": "zero",
                "reason": "maps out of the tower land in a single degree, so only degree -1 can carry phantoms",
            }),
            0,
        )),
        PhantomEm::PExt(report) => {
            let value = json!({
                "degree": input.degree,
                "pext": lim1_doc(&report, cli.truncate)?,
            });
            Ok((value, lim1_exit(&report)))
        }
    }
}

fn cmd_composite_check(cli: &Cli) -> CliResult<(Value, i32)> {
    let input: CompositeInput = parse(read_document(cli)?)?;
    let f = input.f.to_rep()?;
    let g = input.g.to_rep()?;
    let cert = composite_stagewise_check(&f, &g, cli.truncate)?;
    let all = cert.all_hold();
    let value = json!({
        "prime": cert.prime,
        "truncation": cert.truncation,
        "stages_checked": cert.stages_checked,
        "relations_hold": cert.relations_hold,
        "composite_zero_at_truncation": cert.composite_zero_at_truncation,
        "splices": cert.splices.iter().map(|s| json!({
            "stage": s.stage,
            "relation_rank": s.relation_rank,
            "relation_module_free": s.relation_module_free,
            "exact": s.exact,
            "retraction_ok": s.retraction_ok,
            "section_ok": s.section_ok,
            "splits": s.all_hold(),
        })).collect::<Vec<_>>(),
        "note": cert.note,
        "all_hold": all,
    });
    Ok((value, if all { 0 } else { 1 }))
}

fn cmd_nonsplit(cli: &Cli, depth: u64) -> CliResult<(Value, i32)> {
    let cert = nonsplit_certificate(depth, cli.truncate)?;
    let holds = cert.holds();
    let value = json!({
        "depth": cert.j,
        "truncation": cert.truncation,
        "digits_carried": cert.precision,
        "divisibilities_checked": cert.divisibilities_checked,
        "tails_cancel": cert.tails_cancel,
        "obstruction_required": cert.obstruction_required,
        "obstruction_valuation": cert.obstruction_valuation,
        "holds": holds,
        "conclusion": cert.conclusion,
    });
    Ok((value, if holds { 0 } else { 1 }))
}

fn cmd_selftest(cli: &Cli, cases: u64) -> CliResult<(Value, i32)> {
    let report = run_selftest(cli.seed, cases);
    let ok = report.all_ok;
    let value = serde_json::to_value(&report).expect("selftest report serializes");
    Ok((value, if ok { 0 } else { 1 }))
}
