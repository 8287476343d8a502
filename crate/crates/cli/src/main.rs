//! `ainfty`: batch front end. Reads one algebra document, prints one JSON
//! report. Exit code 0 when every assertion passes, 1 when a mathematical
//! check fails, 2 on malformed input.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use ainfty_core::ainfty::{bar_square_failure, check_algebra, check_cinfty, check_homotopy, check_morphism, AInfinity};
use ainfty_core::doc::{self, Convention, Loaded};
use ainfty_core::graded::{word_cap, Element, GradedSpace};
use ainfty_core::massey::{massey_product, Class, Offsets, SearchConfig};
use ainfty_core::par::Exec;
use ainfty_core::spectral::{self, build_filtered, check_lemma, check_next_page, compare_pages, einfty_check};
use ainfty_core::transfer::{transfer_canonical, TransferData};
use ainfty_core::twist::{is_twisting_element, twisted_cohomology};
use ainfty_core::Error;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use report::{matrix_json, terms, Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "ainfty", version, about = "Exact computations for finite-dimensional A-infinity algebras")]
struct Cli {
    /// Skip the structure check normally run on load.
    #[arg(long, global = true)]
    no_verify: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the structure identities and any morphism or homotopy in the file.
    Verify {
        file: PathBuf,
        /// Highest arity to check.
        #[arg(long)]
        n_max: Option<usize>,
        /// Also check that the operations vanish on shuffle products.
        #[arg(long)]
        cinfty: bool,
    },
    /// Ordinary cohomology, or twisted cohomology with `--twist`.
    Cohomology {
        file: PathBuf,
        /// Name of the twisting element (a named element or a basis vector).
        #[arg(long)]
        twist: Option<String>,
    },
    /// Transfer the structure to cohomology.
    Transfer {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Massey product of cohomology classes.
    Massey {
        file: PathBuf,
        /// Comma-separated class names (`[x1]`) or closed elements of the algebra.
        #[arg(long, value_delimiter = ',', required = true)]
        classes: Vec<String>,
        /// Largest number of defining systems to enumerate.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
        /// Enumerate every coefficient of the finite field at each free entry.
        #[arg(long)]
        field_enum: bool,
    },
    /// Pages of the spectral sequence of the twisted complex.
    Spectral {
        file: PathBuf,
        #[arg(long, required = true)]
        twist: String,
        /// `r`, `a..b` or `a..` (up to the page where the sequence is stable).
        #[arg(long)]
        pages: Option<String>,
        /// Compare `d_{2m+1}` with the Massey product of the bordered system.
        #[arg(long)]
        compare_massey: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, out) = run(&cli);
    let code = match &out {
        Ok(r) if r.pass() => 0,
        Ok(_) => 1,
        Err(Failure::Input(_)) => 2,
        Err(Failure::Check(_)) => 1,
    };
    let doc = match out {
        Ok(r) => r.into_json(command),
        Err(f) => f.into_json(command),
    };
    println!("{}", serde_json::to_string_pretty(&doc).expect("reports serialise"));
    ExitCode::from(code)
}

fn run(cli: &Cli) -> (Value, Result<Report, Failure>) {
    match &cli.cmd {
        Cmd::Verify { file, n_max, cinfty } => (
            json!({"name": "verify", "file": file, "n_max": n_max, "cinfty": cinfty}),
            cmd_verify(file, *n_max, *cinfty),
        ),
        Cmd::Cohomology { file, twist } => (
            json!({"name": "cohomology", "file": file, "twist": twist}),
            load(file, cli.no_verify).and_then(|l| cmd_cohomology(&l, twist.as_deref())),
        ),
        Cmd::Transfer { file, n_max } => (
            json!({"name": "transfer", "file": file, "n_max": n_max}),
            load(file, cli.no_verify).and_then(|l| cmd_transfer(&l, *n_max)),
        ),
        Cmd::Massey { file, classes, budget, field_enum } => (
            json!({"name": "massey", "file": file, "classes": classes, "budget": budget.to_string(), "field_enum": field_enum}),
            load(file, cli.no_verify).and_then(|l| cmd_massey(&l, classes, *budget, *field_enum)),
        ),
        Cmd::Spectral { file, twist, pages, compare_massey } => (
            json!({"name": "spectral", "file": file, "twist": twist, "pages": pages, "compare_massey": compare_massey}),
            load(file, cli.no_verify).and_then(|l| cmd_spectral(&l, twist, pages.as_deref(), *compare_massey)),
        ),
    }
}

fn read(file: &Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("cannot read {}: {e}", file.display())))?;
    Ok(doc::load(&doc::parse_str(&text)?)?)
}

/// Reads a document and, unless `no_verify`, checks the structure identities.
fn load(file: &Path, no_verify: bool) -> Result<Loaded, Failure> {
    let l = read(file)?;
    if !no_verify {
        let rep = check_algebra(&l.algebra, None);
        if let Some(bad) = rep.levels.iter().find(|x| !x.pass) {
            return Err(Failure::Check(format!("Stasheff identity fails at n = {}, witness {:?}", bad.n, bad.witness)));
        }
    }
    Ok(l)
}

fn cmd_verify(file: &Path, n_max: Option<usize>, cinfty: bool) -> Result<Report, Failure> {
    let l = read(file)?;
    let a = &l.algebra;
    let mut r = Report::default();
    let rep = check_algebra(a, n_max);
    let n = rep.n_max;
    r.assert("stasheff", rep.pass());
    r.result("stasheff", serde_json::to_value(&rep).expect("serialisable"));
    // b∘b = 0 on words up to the word cap, never past the checked arity
    let len = word_cap().min(n.max(1));
    let failure = bar_square_failure(a, len);
    r.assert("bar_square", failure.is_none());
    r.result(
        "bar_square",
        json!({"max_len": len, "witness": failure.map(|(w, v)| json!({"word": names(a.space(), &w), "terms": v.terms().len()}))}),
    );
    if let Some(f) = &l.morphism {
        let m = check_morphism(f, n);
        r.assert("morphism", m.pass());
        r.result("morphism", serde_json::to_value(&m).expect("serialisable"));
    }
    if let Some(h) = &l.homotopy {
        let fm = check_morphism(h.from_f(), n);
        let gm = check_morphism(h.to_g(), n);
        let hm = check_homotopy(h, n);
        r.assert("homotopy_source_morphism", fm.pass());
        r.assert("homotopy_target_morphism", gm.pass());
        r.assert("homotopy", hm.pass());
        r.result("homotopy", serde_json::to_value(&hm).expect("serialisable"));
    }
    if cinfty {
        let c = check_cinfty(a, word_cap().min(n.max(2)))?;
        r.assert("cinfty", c.pass);
        r.result("cinfty", serde_json::to_value(&c).expect("serialisable"));
    }
    if let Some((r1, r2)) = &l.signs {
        r.result("import_signs", json!({"b1": r1, "b2": r2}));
    }
    Ok(r)
}

fn element(l: &Loaded, name: &str) -> Result<Element, Failure> {
    l.element(name).ok_or_else(|| Failure::Input(format!("unknown element {name}")))
}

fn cmd_cohomology(l: &Loaded, twist: Option<&str>) -> Result<Report, Failure> {
    let a = &l.algebra;
    let sp = a.space();
    let mut r = Report::default();
    match twist {
        None => {
            let data = TransferData::canonical(a)?;
            data.verify(a)?;
            r.assert("contraction", true);
            let hs = &data.h_space;
            let mut dims = serde_json::Map::new();
            for d in hs.degrees_present() {
                dims.insert(d.to_string(), json!(hs.basis_in_degree(d).len()));
            }
            let classes: Vec<Value> = (0..hs.dim())
                .map(|i| {
                    let rep = data.q(&Element::basis(hs.field(), i));
                    json!({"name": hs.name(i), "degree": hs.degree(i), "representative": terms(sp, &rep)})
                })
                .collect();
            r.result("dims", Value::Object(dims));
            r.result("classes", Value::Array(classes));
        }
        Some(name) => {
            let h = element(l, name)?;
            let tw = is_twisting_element(a, &h, None)?;
            r.assert("twisting", true);
            let d = tw.matrix();
            r.assert("d_h_squared_zero", d.mul(&d).is_zero());
            let hc = twisted_cohomology(&tw)?;
            let [even, odd] = hc.dims();
            r.result("dims", json!({"even": even, "odd": odd}));
            let reps = |k: usize| -> Vec<Value> { hc.reps(k).iter().map(|e| terms(sp, e)).collect() };
            r.result("representatives", json!({"even": reps(0), "odd": reps(1)}));
        }
    }
    Ok(r)
}

fn cmd_transfer(l: &Loaded, n_max: usize) -> Result<Report, Failure> {
    let a = &l.algebra;
    let (data, t) = transfer_canonical(a, n_max, Exec::Parallel)?;
    let mut r = Report::default();
    let st = check_algebra(&t.algebra, Some(n_max));
    let mq = check_morphism(&t.q, n_max);
    r.assert("transferred_stasheff", st.pass());
    r.assert("q_morphism", mq.pass());
    let hs = &data.h_space;
    let classes: Vec<Value> = (0..hs.dim())
        .map(|i| {
            let rep = data.q(&Element::basis(hs.field(), i));
            json!({"name": hs.name(i), "degree": hs.degree(i), "representative": terms(a.space(), &rep)})
        })
        .collect();
    r.result("recursion", serde_json::to_value(t.recursion).expect("serialisable"));
    r.result("classes", Value::Array(classes));
    r.result("stasheff", serde_json::to_value(&st).expect("serialisable"));
    r.result("q", serde_json::to_value(&mq).expect("serialisable"));
    let out = Loaded {
        algebra: t.algebra.clone(),
        convention: Convention::Ainfty,
        signs: None,
        elements: Vec::new(),
        morphism: Some(t.q.clone()),
        homotopy: None,
    };
    r.result("document", serde_json::to_value(doc::emit(&out)).expect("serialisable"));
    Ok(r)
}

/// A class given by its name in cohomology or by a closed element of `A`.
fn class(a: &AInfinity, data: &TransferData, l: &Loaded, name: &str) -> Result<Class, Failure> {
    let hs = &data.h_space;
    if let Some(i) = hs.index_of(name) {
        return Ok(Class::basis(hs, i));
    }
    let x = element(l, name)?;
    if !a.d(&x).is_zero() {
        return Err(Failure::Input(format!("{name} is not closed")));
    }
    Ok(Class::new(hs, data.p(&x))?)
}

fn cmd_massey(l: &Loaded, names: &[String], budget: u128, field_enum: bool) -> Result<Report, Failure> {
    let a = &l.algebra;
    let data = TransferData::canonical(a)?;
    let classes = names.iter().map(|n| class(a, &data, l, n)).collect::<Result<Vec<_>, _>>()?;
    let field = a.space().field();
    let offsets = if field_enum {
        if field.elements().is_none() {
            return Err(Failure::Input("--field-enum needs a finite field".into()));
        }
        Offsets::Exhaustive
    } else {
        Offsets::Listed(vec![field.zero()])
    };
    let cfg = SearchConfig { budget, offsets, exec: Exec::Parallel };
    let res = massey_product(a, &data, &classes, &cfg)?;
    let hs = &data.h_space;
    let mut r = Report::default();
    r.assert("b1_mu_zero", res.systems.iter().all(|s| a.d(&s.mu).is_zero()));
    r.result("values", Value::Array(res.values.iter().map(|v| terms(hs, v)).collect()));
    r.result("indeterminacy", Value::Array(res.indeterminacy.iter().map(|v| terms(hs, &Element::from_vec(v.clone()))).collect()));
    r.result("enumerated", json!(res.enumerated.to_string()));
    r.result("exhaustive", json!(res.exhaustive));
    let systems: Vec<Value> = res
        .systems
        .iter()
        .map(|s| {
            let entries: Vec<Value> = s
                .matrix
                .entries()
                .iter()
                .map(|((i, j), e)| json!({"i": i, "j": j, "value": terms(a.space(), e)}))
                .collect();
            json!({"entries": entries, "mu": terms(a.space(), &s.mu)})
        })
        .collect();
    r.result("systems", Value::Array(systems));
    Ok(r)
}

fn page_range(spec: Option<&str>, stable: usize) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("--pages expects r, a..b or a.., got {spec:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match spec {
        None => Ok((0, stable)),
        Some(s) => match s.split_once("..") {
            None => {
                let r = num(s)?;
                Ok((r, r))
            }
            Some((lo, "")) => Ok((num(lo)?, stable.max(num(lo)?))),
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(bad());
                }
                Ok((lo, hi))
            }
        },
    }
}

fn cmd_spectral(l: &Loaded, twist: &str, pages: Option<&str>, compare_massey: Option<usize>) -> Result<Report, Failure> {
    let a = &l.algebra;
    let sp = a.space();
    let h = element(l, twist)?;
    let tw = is_twisting_element(a, &h, None)?;
    let fc = build_filtered(&tw)?;
    let (lo, hi) = page_range(pages, fc.stable_r())?;
    let all = spectral::pages(&fc, hi.max(3) + 1)?;
    let mut r = Report::default();
    let mut next_ok = true;
    let mut same = true;
    let mut out = Vec::new();
    for pg in &all[lo..=hi] {
        next_ok &= check_next_page(pg, &all[pg.r() + 1]).is_ok();
        same &= compare_pages(&fc, pg, &spectral::specialized_page(&tw, pg.r(), Exec::Parallel)?).is_ok();
        let entries: Vec<Value> = pg
            .entries()
            .iter()
            .filter(|(_, e)| e.dim() > 0)
            .map(|(&(p, q), e)| {
                let reps: Vec<Value> = e.reps().iter().map(|v| terms(sp, &Element::from_vec(v.clone()))).collect();
                json!({"p": p, "q": q, "dim": e.dim(), "representatives": reps})
            })
            .collect();
        let diffs: Vec<Value> = pg
            .entries()
            .keys()
            .filter_map(|&(p, q)| {
                let m = pg.differential_matrix(p, q)?;
                (!m.is_zero()).then(|| json!({"from": [p, q], "to": pg.target(p, q), "matrix": matrix_json(m)}))
            })
            .collect();
        out.push(json!({"r": pg.r(), "entries": entries, "differentials": diffs}));
    }
    r.assert("next_page_is_cohomology", next_ok);
    r.assert("specialized_matches_generic", same);
    let lemma = check_lemma(a, &fc, &all)?;
    r.assert("page_structure", lemma.pass());
    let inf = einfty_check(&fc)?;
    r.assert("einfty_matches_cohomology", inf.pass);
    r.result("pages", Value::Array(out));
    r.result("page_structure", serde_json::to_value(&lemma).expect("serialisable"));
    r.result("einfty", serde_json::to_value(&inf).expect("serialisable"));
    if let Some(m) = compare_massey {
        let v = compare(&tw, &fc, m, &mut r)?;
        r.result("massey_comparison", v);
    }
    Ok(r)
}

/// Runs the Massey comparison for every basis representative of
/// `E_{2m+1}^{p,0}`.
fn compare(
    tw: &ainfty_core::twist::TwistingElement,
    fc: &spectral::FilteredComplex,
    m: usize,
    r: &mut Report,
) -> Result<Value, Failure> {
    if m == 0 {
        return Err(Failure::Input("--compare-massey needs m ≥ 1".into()));
    }
    let a = tw.algebra();
    let sp = a.space();
    let data = TransferData::canonical(a)?;
    let pg = spectral::page(fc, 2 * m + 1)?;
    let mut out = Vec::new();
    let mut all = true;
    for (&(p, q), e) in pg.entries() {
        if q != 0 {
            continue;
        }
        for rep in e.reps() {
            let x = Element::from_vec(rep.clone());
            let w = spectral::witness_for(tw, m, &x)?;
            let c = spectral::massey_comparison(tw, &data, m, &w, None)?;
            all &= c.agree;
            out.push(json!({
                "p": p,
                "x": terms(sp, &x),
                "witness": w.iter().map(|e| terms(sp, e)).collect::<Vec<_>>(),
                "z": terms(sp, &c.z),
                "via_massey": sparse(&c.via_massey),
                "via_differential": sparse(&c.via_differential),
                "agree": c.agree,
            }));
        }
    }
    r.assert("massey_matches_differential", all);
    Ok(Value::Array(out))
}

fn sparse(v: &ainfty_core::exactla::SparseVec) -> Value {
    Value::Array(v.iter().map(|(i, c)| json!([i, c.to_coeff_string()])).collect())
}

fn names(sp: &Arc<GradedSpace>, w: &[usize]) -> Vec<String> {
    w.iter().map(|&i| sp.name(i).to_string()).collect()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input() {
            Failure::Input(e.to_string())
        } else {
            Failure::Check(e.to_string())
        }
    }
}
