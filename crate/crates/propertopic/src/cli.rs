//! The `propertopic` command line: one verb per invocation, a JSON document
//! on standard output, and the exit status as the verdict.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::color::Element;
use crate::error::{Error, Result};
use crate::graph::{evaluate, validate_decoration, validate_mn_graph};
use crate::json::{color_from_json, color_to_json, element_from_json, element_to_json, graph_from_json, to_canonical_string};
use crate::presheaf::io::{ptset_from_json, ptset_to_json};
use crate::presheaf::{check_weak_n, psi_build, pullback, validate_presheaf, PtSet};
use crate::prop::laws::{check_prop_laws, LawMode};
use crate::prop::PropRef;
use crate::propertope::{
    chain_equal, decode_metagraph, encode_metagraph, relations_at, Chain, Metagraph, Propertope, Tower, Universe, UniverseSpec, Verdict,
};
use crate::slice::SliceProp;
use crate::spec::{parse_spec, AlgebraSpec, MapSpec, PropSpec};

#[derive(Parser, Debug)]
#[command(name = "propertopic", version, about = "Colored PROPs, propertopes and propertopic sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// The `n` of weak-n and of ψ.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Top dimension of shapes and cells.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=6))]
    pub bound: usize,
    /// Rewriting depth for chain equality.
    #[arg(long = "depth-cap", global = true, default_value_t = 6)]
    pub depth_cap: usize,
    /// Samples for law checks on infinite PROPs.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// A PROP spec file; defaults to the terminal PROP.
    #[arg(long, global = true)]
    pub prop: Option<PathBuf>,
    /// Also write the output document here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Checks a graph, element, metagraph, propertopic set or PROP spec,
    /// recognized by its fields.
    Validate { input: PathBuf },
    /// Evaluates a decorated graph in the PROP.
    Eval { graph: PathBuf },
    /// Vertical composition `x ∘ y` in the slice of the PROP.
    SliceVcomp { x: PathBuf, y: PathBuf },
    /// The faces of a propertope given as a metagraph, with the relations
    /// it induces certified up to `--depth-cap` rewrites.
    Faces { metagraph: PathBuf },
    /// Metagraph of a propertope `{dim, element}` or `{dim: 0, color}`.
    Encode { propertope: PathBuf },
    /// The propertope of a metagraph.
    Decode { metagraph: PathBuf },
    /// ψ of an algebra spec as `ptset.json`.
    Psi { algebra: PathBuf },
    /// Checks the weak-n conditions on a `ptset.json`.
    CheckWeak { ptset: PathBuf },
    /// Pulls a `ptset.json` back along a PROP map spec.
    Pullback { ptset: PathBuf, map: PathBuf },
}

/// Exit statuses.
pub const PASS: i32 = 0;
pub const FAIL: i32 = 1;
pub const PARSE: i32 = 2;

pub struct Outcome {
    pub code: i32,
    pub doc: Value,
}

impl Outcome {
    fn verdict(ok: bool, doc: Value) -> Self {
        Outcome {
            code: if ok { PASS } else { FAIL },
            doc,
        }
    }

    fn output(doc: Value) -> Self {
        Outcome { code: PASS, doc }
    }
}

/// Runs a command; errors become a JSON error document with status 2 for
/// malformed input and 1 otherwise.
pub fn run(cli: &Cli) -> Outcome {
    match dispatch(&cli.command, &cli.opts) {
        Ok(o) => o,
        Err(e) => {
            let (code, kind) = match &e {
                Error::Parse { .. } => (PARSE, "parse"),
                _ => (FAIL, "failure"),
            };
            let mut err = json!({"kind": kind, "message": e.to_string()});
            if let Error::Parse { at, detail } = &e {
                err["at"] = json!(at);
                err["detail"] = json!(detail);
            }
            Outcome {
                code,
                doc: json!({"ok": false, "error": err}),
            }
        }
    }
}

/// Parses arguments, runs, prints and returns the exit status.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { PARSE } else { PASS };
            let _ = e.print();
            return code;
        }
    };
    let o = run(&cli);
    let text = to_canonical_string(&o.doc);
    if let Some(p) = &cli.opts.out {
        if let Err(e) = fs::write(p, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", p.display());
            return FAIL;
        }
    }
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    o.code
}

fn read_json(p: &Path) -> Result<Value> {
    let at = p.display().to_string();
    let s = fs::read_to_string(p).map_err(|e| Error::parse(&at, e.to_string()))?;
    serde_json::from_str(&s).map_err(|e| Error::parse(&at, e.to_string()))
}

fn base_prop(opts: &Opts, fallback_id: Option<&str>) -> Result<PropRef> {
    let spec = match (&opts.prop, fallback_id) {
        (Some(p), _) => parse_spec::<PropSpec>(&read_json(p)?, "prop")?,
        (None, Some(id)) => PropSpec::from_id(id).ok_or_else(|| Error::parse("prop", format!("pass --prop for base `{id}`")))?,
        (None, None) => PropSpec::Terminal { colors: None },
    };
    spec.build()
}

fn tower(opts: &Opts, base: PropRef) -> Tower {
    Tower::new(base, opts.bound)
}

fn propertope_to_json(g: &Propertope) -> Value {
    match g.elem() {
        Some(x) => json!({"dim": g.dim, "element": element_to_json(x)}),
        None => json!({"dim": 0, "color": color_to_json(&g.color)}),
    }
}

fn propertope_from_json(v: &Value, tower: &Tower) -> Result<Propertope> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse("dim", "expected a non-negative integer"))? as usize;
    let g = if dim == 0 {
        let c = v.get("color").ok_or_else(|| Error::parse("color", "missing"))?;
        Propertope::point(color_from_json(c, "color")?)
    } else {
        let e = v.get("element").ok_or_else(|| Error::parse("element", "missing"))?;
        Propertope::of(dim, &element_from_json(e, "element")?)
    };
    if !tower.contains(&g) {
        return Err(Error::invalid(format!(
            "not a {dim}-dimensional propertope over `{}`",
            tower.base().id()
        )));
    }
    Ok(g)
}

fn read_ptset(p: &Path, opts: &Opts) -> Result<(PtSet, Tower)> {
    let v = read_json(p)?;
    let id = v.get("base").and_then(Value::as_str).unwrap_or_default().to_string();
    let t = tower(opts, base_prop(opts, Some(&id))?);
    Ok((ptset_from_json(&v, &t)?, t))
}

fn member(p: &PropRef, x: &Element) -> Result<()> {
    if p.contains(x) {
        Ok(())
    } else {
        Err(Error::NotMember {
            prop: p.id().to_string(),
            detail: format!("{x:?}"),
        })
    }
}

fn dispatch(cmd: &Command, opts: &Opts) -> Result<Outcome> {
    match cmd {
        Command::Validate { input } => validate(&read_json(input)?, opts),
        Command::Eval { graph } => {
            let p = base_prop(opts, None)?;
            let (g, out, inp) = graph_from_json(&read_json(graph)?, "graph")?;
            let r = validate_decoration(&g, Some((&out, &inp)));
            if !r.ok() {
                return Ok(Outcome::verdict(false, json!({"ok": false, "violations": r.violations})));
            }
            let x = evaluate(p.as_ref(), &g)?;
            Ok(Outcome::output(element_to_json(&x)))
        }
        Command::SliceVcomp { x, y } => {
            let s = SliceProp::new(base_prop(opts, None)?);
            let sp: PropRef = std::sync::Arc::new(s);
            let a = element_from_json(&read_json(x)?, "x")?;
            let b = element_from_json(&read_json(y)?, "y")?;
            member(&sp, &a)?;
            member(&sp, &b)?;
            Ok(Outcome::output(element_to_json(&sp.vcomp(&a, &b)?)))
        }
        Command::Faces { metagraph } => {
            let t = tower(opts, base_prop(opts, None)?);
            let g = decode_metagraph(&Metagraph::from_json(&read_json(metagraph)?)?, &t)?;
            let faces = g
                .faces()
                .into_iter()
                .map(|f| {
                    Ok(json!({
                        "face": format!("{:?}", f.face),
                        "target": encode_metagraph(&f.target)?.to_json(),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut relations = vec![];
            let mut ok = true;
            for r in relations_at(t.base().as_ref(), &g)? {
                let (a, b) = (Chain::new(g.clone(), r.lhs.clone())?, Chain::new(g.clone(), r.rhs.clone())?);
                let v = chain_equal(t.base().as_ref(), &a, &b, opts.depth_cap)?;
                ok &= v == Verdict::Equal;
                relations.push(json!({
                    "family": r.family,
                    "lhs": format!("{:?}", r.lhs),
                    "rhs": format!("{:?}", r.rhs),
                    "verdict": v,
                }));
            }
            Ok(Outcome::verdict(ok, json!({"dim": g.dim, "faces": faces, "relations": relations})))
        }
        Command::Encode { propertope } => {
            let t = tower(opts, base_prop(opts, None)?);
            let g = propertope_from_json(&read_json(propertope)?, &t)?;
            Ok(Outcome::output(encode_metagraph(&g)?.to_json()))
        }
        Command::Decode { metagraph } => {
            let t = tower(opts, base_prop(opts, None)?);
            let g = decode_metagraph(&Metagraph::from_json(&read_json(metagraph)?)?, &t)?;
            Ok(Outcome::output(propertope_to_json(&g)))
        }
        Command::Psi { algebra } => {
            let spec: AlgebraSpec = parse_spec(&read_json(algebra)?, "algebra")?;
            let a = spec.build(opts.seed)?;
            if let Some(n) = opts.n {
                if n != a.n {
                    return Err(Error::parse("--n", format!("the algebra lives over P^{{{}+}}", a.n)));
                }
            }
            let t = tower(opts, a.base.clone());
            let u = Universe::generate(
                &t,
                &UniverseSpec {
                    dim: opts.bound,
                    ..UniverseSpec::default()
                },
            )?;
            let x = psi_build(a.algebra.as_ref(), &t, &u, a.n, opts.bound)?;
            Ok(Outcome::output(ptset_to_json(&x)?))
        }
        Command::CheckWeak { ptset } => {
            let n = opts.n.ok_or_else(|| Error::parse("--n", "check-weak needs --n"))?;
            let (x, _) = read_ptset(ptset, opts)?;
            let r = check_weak_n(&x, n, opts.bound.min(x.bound))?;
            Ok(Outcome::verdict(r.passed(), json!({"ok": r.passed(), "report": r})))
        }
        Command::Pullback { ptset, map } => {
            let f = parse_spec::<MapSpec>(&read_json(map)?, "map")?.build()?;
            let (x, t) = read_ptset(ptset, opts)?;
            let source = tower(opts, f.source.clone());
            let u = Universe::generate(
                &source,
                &UniverseSpec {
                    dim: x.bound.min(opts.bound),
                    ..UniverseSpec::default()
                },
            )?;
            let y = pullback(&f, &t, &x, &u)?;
            Ok(Outcome::output(ptset_to_json(&y)?))
        }
    }
}

fn validate(v: &Value, opts: &Opts) -> Result<Outcome> {
    let has = |k: &str| v.get(k).is_some();
    if has("components") {
        let (g, out, inp) = graph_from_json(v, "graph")?;
        let mut r = validate_mn_graph(&g);
        r.violations.extend(validate_decoration(&g, Some((&out, &inp))).violations);
        if r.ok() && opts.prop.is_some() {
            let p = base_prop(opts, None)?;
            for (k, vx) in g.vertices.iter().enumerate() {
                if !p.contains(&vx.deco) {
                    r.push("membership", format!("vertex {}", k + 1));
                }
            }
        }
        return Ok(Outcome::verdict(
            r.ok(),
            json!({"ok": r.ok(), "what": "graph", "violations": r.violations}),
        ));
    }
    if has("levels") {
        let t = tower(opts, base_prop(opts, None)?);
        let g = decode_metagraph(&Metagraph::from_json(v)?, &t)?;
        return Ok(Outcome::verdict(true, json!({"ok": true, "what": "metagraph", "dim": g.dim})));
    }
    if has("shapes") {
        let id = v.get("base").and_then(Value::as_str).unwrap_or_default().to_string();
        let t = tower(opts, base_prop(opts, Some(&id))?);
        let x = ptset_from_json(v, &t)?;
        let r = validate_presheaf(&x)?;
        return Ok(Outcome::verdict(
            r.ok(),
            json!({"ok": r.ok(), "what": "ptset", "violations": r.violations}),
        ));
    }
    if has("owner") {
        let p = base_prop(opts, None)?;
        let x = element_from_json(v, "element")?;
        let ok = p.contains(&x);
        return Ok(Outcome::verdict(
            ok,
            json!({"ok": ok, "what": "element", "prop": p.id().to_string()}),
        ));
    }
    if has("kind") {
        let p = parse_spec::<PropSpec>(v, "prop")?.build()?;
        let r = check_prop_laws(
            p.as_ref(),
            &LawMode::Sampled {
                samples: opts.samples,
                seed: opts.seed,
            },
        )?;
        return Ok(Outcome::verdict(r.passed(), json!({"ok": r.passed(), "what": "prop", "report": r})));
    }
    Err(Error::parse("input", "expected a graph, element, metagraph, ptset or PROP spec"))
}
