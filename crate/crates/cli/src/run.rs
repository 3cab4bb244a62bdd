use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use icsheaf::axioms::{check_ax1, check_ax2, check_classic_ax2};
use icsheaf::deligne::{clc_coarsen, compare_stratifications};
use icsheaf::field::SUPPORTED_PRIMES;
use icsheaf::report::{
    named_table, sample_simplices, stratification_hash, BundleReport, NamedTable, RunManifest, RunOptions,
};
use icsheaf::sheaf::LocalSystemDoc;
use icsheaf::stratify::verify_lemmas;
use icsheaf::{
    build_ic, demos, BuildOptions, Error, Field, FieldChoice, Fp, ICBundle, LocalSystem, Rational, Result,
    SimplexSet, SimplicialComplex, Stratification,
};
use serde_json::{json, Value};

use crate::{Cli, Command, Switch};

/// Seed for costalk sampling; fixed so reruns agree.
const SAMPLE_SEED: u64 = 0;

/// One fully resolved run: what the manifest records.
struct Invocation {
    command: String,
    inputs: BTreeMap<String, String>,
    field: String,
    options: RunOptions,
    table: bool,
    out: Option<PathBuf>,
    replay_hash: Option<String>,
}

pub fn main(cli: Cli) -> Result<u8> {
    let inv = match &cli.manifest {
        Some(path) => from_manifest(&cli, path)?,
        None => from_flags(&cli)?,
    };
    if inv.command == "demo" {
        return demo(&inv);
    }
    match FieldChoice::parse(&inv.field)? {
        FieldChoice::Rational => execute::<Rational>(&inv),
        FieldChoice::Prime(p) => dispatch_prime(p, &inv),
    }
}

macro_rules! primes {
    ($p:expr, $inv:expr, [$($q:literal),*]) => {
        match $p {
            $($q => execute::<Fp<$q>>($inv),)*
            other => Err(Error::Input(format!("prime {other} not supported"))),
        }
    };
}

fn dispatch_prime(p: u64, inv: &Invocation) -> Result<u8> {
    debug_assert!(SUPPORTED_PRIMES.contains(&p));
    primes!(p, inv, [2, 3, 5, 7, 11, 13, 101, 32003, 65521, 2147483647])
}

fn from_flags(cli: &Cli) -> Result<Invocation> {
    let command = cli
        .command
        .clone()
        .ok_or_else(|| Error::Input("no command given (see --help)".into()))?;
    let mut inputs = BTreeMap::new();
    match &command {
        Command::Demo { name } => {
            inputs.insert("demo".to_string(), name.clone());
        }
        Command::Compare { space, other } => {
            inputs.insert("space".to_string(), space.clone());
            if let Some(o) = other {
                inputs.insert("other".to_string(), o.clone());
            }
        }
        Command::Validate { space }
        | Command::Filtration { space }
        | Command::Build { space }
        | Command::CheckAx1 { space }
        | Command::CheckAx2 { space }
        | Command::CheckClassicAx2 { space }
        | Command::Hyperco { space }
        | Command::Stalks { space }
        | Command::Costalks { space }
        | Command::Coarsen { space } => {
            inputs.insert("space".to_string(), space.clone());
        }
    }
    if let Some(s) = &cli.strat {
        inputs.insert("strat".to_string(), s.clone());
    }
    if let Some(l) = &cli.local {
        inputs.insert("local".to_string(), l.clone());
    }
    Ok(Invocation {
        command: command.name().to_string(),
        inputs,
        field: FieldChoice::parse(&cli.field)?.to_string(),
        options: RunOptions {
            cleanup: cli.cleanup == Switch::On,
            check_links: cli.check_links,
            naive: cli.naive,
            sample: cli.sample,
            refine: cli.refine.clone(),
            borel: cli.borel,
        },
        table: cli.table,
        out: cli.out.clone(),
        replay_hash: None,
    })
}

fn from_manifest(cli: &Cli, path: &Path) -> Result<Invocation> {
    let text = read(path.to_string_lossy().as_ref())?;
    let m = RunManifest::from_json(&text)?;
    Ok(Invocation {
        command: m.command,
        inputs: m.inputs,
        field: m.field,
        options: m.options,
        table: cli.table,
        out: cli.out.clone(),
        replay_hash: Some(m.stratification_hash),
    })
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
}

fn demo(inv: &Invocation) -> Result<u8> {
    let name = &inv.inputs["demo"];
    let (complex, strat) = demos::render(name)?;
    let dir = inv.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write(&dir, &format!("{name}.complex.json"), &complex)?;
    write(&dir, &format!("{name}.strat.json"), &strat)?;
    println!("{}", dir.join(format!("{name}.complex.json")).display());
    println!("{}", dir.join(format!("{name}.strat.json")).display());
    Ok(0)
}

/// `demo:<name>` or a complex file with `strat` alongside.
fn load_space(inputs: &BTreeMap<String, String>) -> Result<(Arc<SimplicialComplex>, Stratification)> {
    let space = inputs
        .get("space")
        .ok_or_else(|| Error::Input("no space given".into()))?;
    let (cx, strat) = match space.strip_prefix("demo:") {
        Some(name) => demos::load(name)?,
        None => {
            let cx = Arc::new(SimplicialComplex::load_json(&read(space)?)?);
            let sp = inputs
                .get("strat")
                .ok_or_else(|| Error::Input("a complex file needs --strat".into()))?;
            let st = Stratification::load_json(cx.clone(), &read(sp)?)?;
            (cx, st)
        }
    };
    // an explicit stratification file overrides the bundled one
    match (space.starts_with("demo:"), inputs.get("strat")) {
        (true, Some(sp)) => {
            let st = Stratification::load_json(cx.clone(), &read(sp)?)?;
            Ok((cx, st))
        }
        _ => Ok((cx, strat)),
    }
}

fn load_local<F: Field>(inputs: &BTreeMap<String, String>, strat: &Stratification) -> Result<LocalSystem<F>> {
    let os = strat.open_strata()?;
    match inputs.get("local") {
        None => Ok(LocalSystem::constant(strat.complex(), &os)),
        Some(path) => {
            let doc: LocalSystemDoc =
                serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            LocalSystem::from_doc(strat.complex(), &os, &doc)
        }
    }
}

fn build_options(o: &RunOptions) -> BuildOptions {
    BuildOptions {
        cleanup: o.cleanup,
        naive: o.naive,
        ..BuildOptions::default()
    }
}

fn execute<F: Field>(inv: &Invocation) -> Result<u8> {
    let (cx, base) = load_space(&inv.inputs)?;
    let strat = match (&inv.options.refine, inv.command.as_str()) {
        (Some(recipe), c) if c != "compare" => demos::refine(&base, recipe)?,
        _ => base,
    };
    if let Some(h) = &inv.replay_hash {
        if *h != stratification_hash(&strat) {
            return Err(Error::Input("inputs changed since the manifest was written".into()));
        }
    }
    let local = load_local::<F>(&inv.inputs, &strat)?;
    let opts = build_options(&inv.options);
    let sample = inv.options.sample.map(|n| sample_simplices(strat.space(), n, SAMPLE_SEED));
    let build = || build_ic(&strat, &local, opts);

    let mut text = None;
    let (mut report, code): (Value, u8) = match inv.command.as_str() {
        "validate" => {
            let filt = filtration_of(&strat, inv.options.naive)?;
            let lemmas = verify_lemmas(&strat, &filt);
            let strata: Vec<Value> = strat
                .strata()
                .iter()
                .map(|s| json!({"dim": s.dim, "open": s.is_open, "simplices": s.simplices.len()}))
                .collect();
            let code = if lemmas.all_hold() { 0 } else { 2 };
            let report = json!({
                "valid": true,
                "n": strat.n(),
                "f_vector": cx.f_vector(),
                "open_dims": strat.open_strata()?.dims(),
                "strata": strata,
                "local_ranks": local.ranks(),
                "lemmas": lemmas,
            });
            (report, code)
        }
        "filtration" => {
            let filt = filtration_of(&strat, inv.options.naive)?;
            let lemmas = verify_lemmas(&strat, &filt);
            let rows: Vec<Value> = (1..=filt.steps())
                .map(|k| json!({"k": k, "U": cx.names(filt.u(k)), "W": cx.names(filt.w(k))}))
                .collect();
            let mut open = BTreeMap::new();
            for (m, u) in &filt.strata.u {
                open.insert(m.to_string(), json!({"U": cx.names(u), "X": cx.names(&filt.strata.x[m])}));
            }
            if inv.table {
                text = Some(filtration_table(&rows, &lemmas));
            }
            let code = if lemmas.all_hold() { 0 } else { 2 };
            (json!({"n": filt.n, "canonical": filt.canonical, "open_strata": open, "rows": rows, "lemmas": lemmas}), code)
        }
        "build" => {
            let b = build()?;
            (to_value(&BundleReport::of(&b, inv.options.borel)?), 0)
        }
        "check-ax1" => axiom(check_ax1(build()?.ic(), &strat)?),
        "check-ax2" => axiom(check_ax2(build()?.ic(), &strat, None)?),
        "check-classic-ax2" => axiom(check_classic_ax2(build()?.ic(), &strat)?),
        "hyperco" => {
            let b = build()?;
            (json!({"hypercohomology": b.ic().hypercohomology(None)?}), 0)
        }
        "stalks" => {
            let t = named_table(&cx, &build()?.ic().stalk_table());
            if inv.table {
                text = Some(dim_table(&t));
            }
            (json!({"stalks": t}), 0)
        }
        "costalks" => {
            let t = named_table(&cx, &build()?.ic().costalk_table(sample.as_ref()));
            if inv.table {
                text = Some(dim_table(&t));
            }
            (json!({"costalks": t, "sampled": sample.as_ref().map(|s| s.len())}), 0)
        }
        "compare" => compare(inv, &strat, &local, opts, sample.as_ref())?,
        "coarsen" => {
            let b: ICBundle<F> = build()?;
            let state = clc_coarsen(&strat, b.ic())?;
            (to_value(&state), 0)
        }
        other => return Err(Error::Input(format!("unknown command {other}"))),
    };

    if inv.options.check_links {
        let issues = strat.check_links()?;
        if !issues.is_empty() {
            eprintln!("icx: advisory: {} simplices fail the link sphere test", issues.len());
        }
        report["link_issues"] = to_value(&issues);
    }
    let rendered = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(dir) = &inv.out {
        let manifest = RunManifest::new(&inv.command, inv.inputs.clone(), inv.field.clone(), inv.options.clone(), &strat);
        write(dir, "manifest.json", &manifest.to_json())?;
        write(dir, &format!("{}.json", inv.command), &rendered)?;
    }
    print!("{}", text.unwrap_or(rendered));
    Ok(code)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn axiom(r: icsheaf::axioms::AxiomReport) -> (Value, u8) {
    let code = r.exit_code() as u8;
    (to_value(&r), code)
}

fn filtration_of(strat: &Stratification, naive: bool) -> Result<icsheaf::OpenFiltration> {
    if naive {
        strat.naive_filtration()
    } else {
        strat.open_filtration()
    }
}

fn compare<F: Field>(
    inv: &Invocation,
    strat: &Stratification,
    local: &LocalSystem<F>,
    opts: BuildOptions,
    sample: Option<&SimplexSet>,
) -> Result<(Value, u8)> {
    let cx = strat.complex();
    let second = match (&inv.options.refine, inv.inputs.get("other")) {
        (Some(recipe), None) => demos::refine(strat, recipe)?,
        (None, Some(path)) => Stratification::load_json(cx.clone(), &read(path)?)?,
        _ => return Err(Error::Input("compare needs exactly one of --refine or a second stratification".into())),
    };
    let os2 = second.open_strata()?;
    let local2 = if inv.inputs.contains_key("local") {
        local.restrict_to(&os2)?
    } else {
        LocalSystem::constant(cx, &os2)
    };
    let r = compare_stratifications((strat, local), (&second, &local2), sample, opts)?;
    let name = |d: Option<(usize, i32)>| d.map(|(s, a)| json!({"simplex": cx.name(s), "degree": a}));
    let report = json!({
        "pass": r.pass,
        "refines": second.refines(strat)?.holds,
        "stalks_equal": r.stalks_equal,
        "first_stalk_difference": name(r.first_stalk_difference),
        "costalks_equal": r.costalks_equal,
        "first_costalk_difference": name(r.first_costalk_difference),
        "costalk_sample_size": r.sample_size,
        "hypercohomology": [r.hyperco.0, r.hyperco.1],
        "second_strata": second.strata().len(),
    });
    Ok((report, if r.pass { 0 } else { 2 }))
}

fn filtration_table(rows: &[Value], lemmas: &icsheaf::stratify::LemmaReport) -> String {
    let mut s = String::new();
    for r in rows {
        let list = |key: &str| -> String {
            let v: Vec<&str> = r[key].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
            match v.len() {
                0 => "∅".into(),
                1..=12 => v.join(" "),
                n => format!("{} … (+{})", v[..8].join(" "), n - 8),
            }
        };
        let _ = writeln!(s, "k={}  |U|={}  U: {}", r["k"], r["U"].as_array().unwrap().len(), list("U"));
        let _ = writeln!(s, "      |W|={}  W: {}", r["W"].as_array().unwrap().len(), list("W"));
    }
    let _ = writeln!(
        s,
        "openness={} density={} strata={} closed={} w-difference={}",
        lemmas.openness, lemmas.density, lemmas.strata_content, lemmas.closedness, lemmas.w_difference
    );
    s
}

fn dim_table(t: &NamedTable) -> String {
    let width = t.keys().map(|k| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (name, row) in t {
        let cells: Vec<String> = row.iter().map(|(a, d)| format!("H^{a}={d}")).collect();
        let _ = writeln!(s, "{name:<width$}  {}", cells.join(" "));
    }
    s
}
