use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use nilres::catalog;
use nilres::dimension;
use nilres::error::Error;
use nilres::farb;
use nilres::format;
use nilres::lab;
use nilres::oracle;
use nilres::pcp::{Element, PcPresentation};
use nilres::report::{self, Report};
use nilres::witness::{self, GroupContext, PDepth, SearchOptions};

#[derive(Parser)]
#[command(name = "nilres", version, about = "Residual finiteness computations for torsion-free nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// group source: a presentation file path or catalog:<name>
    #[arg(long, default_value = "catalog:heisenberg")]
    group: String,
    /// write the JSON report here (otherwise it goes to stdout)
    #[arg(long)]
    json: Option<PathBuf>,
    /// node cap for kernel searches
    #[arg(long, default_value_t = 4000)]
    node_cap: usize,
    /// size cap for brute-force oracle cross-checks
    #[arg(long, default_value_t = 2048)]
    oracle_cap: usize,
    /// worker threads for prime sweeps (1 = bit-deterministic mode)
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Collect a word to its normal form
    NormalForm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
    },
    /// Minimal separating finite-quotient order of an element
    Depth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
    },
    /// Minimal p-power witness certificate of an element
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
        #[arg(long)]
        prime: u64,
    },
    /// Bucket primes by the exponent of the p-depth of an element
    RpSets {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 100)]
        max_prime: u64,
    },
    /// Residual dimension estimates with the constructive upper bound
    Dims {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        max_prime: u64,
    },
    /// Farb table over word-metric balls with the exponent fit
    Farb {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        radius: u32,
    },
    /// Verify the order-p^4 quotient construction in the rank-6 group
    VerifyS3 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: u64,
    },
    /// Falsify the withdrawn p^h lower-bound claim (exit 0 on refutation)
    FalsifyP31 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        prime: u64,
    },
    /// Lower-bound element sequence x^{k m_j} with verified depths
    LowerSeq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// List builtin groups or print one in the file format
    Catalog {
        #[command(flatten)]
        common: Common,
        /// print this catalog entry as a presentation file
        #[arg(long)]
        name: Option<String>,
    },
}

fn load_group(spec: &str) -> Result<(String, PcPresentation), Error> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        Ok((name.to_string(), catalog::by_name(name)?))
    } else {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::input(format!("cannot read {spec}: {e}")))?;
        format::parse(&text)
    }
}

fn emit(report: &Report, path: &Option<PathBuf>) -> Result<(), Error> {
    let body = report.to_json();
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| Error::input(format!("cannot write report: {e}"))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn element_of(p: &PcPresentation, s: &str) -> Result<Element, Error> {
    format::parse_element(p, s)
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::NormalForm { common, element } => {
            let (name, p) = load_group(&common.group)?;
            let e = element_of(&p, &element)?;
            let r = Report::new(&name, "normal-form", json!({"element": element}))
                .results(json!({
                    "normal_form": p.element_string(&e),
                    "coordinates": e.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                }));
            emit(&r, &common.json)?;
            Ok(0)
        }
        Command::Depth { common, element } => {
            let (name, p) = load_group(&common.group)?;
            let g = element_of(&p, &element)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let d = witness::depth(&ctx, &g, &opts)?;
            let mut r = Report::new(
                &name,
                "depth",
                json!({"element": element, "node_cap": common.node_cap}),
            );
            if !d.exact {
                r.warn("depth is a lower bound: some primes hit the node cap");
            }
            let cert = report::certificate_json(&ctx.pres, &d.cert);
            let r = r.results(json!({
                "depth": d.order.to_string(),
                "prime": d.prime.to_string(),
                "exact": d.exact,
                "certificate": cert,
            }));
            emit(&r, &common.json)?;
            Ok(if d.exact { 0 } else { 2 })
        }
        Command::Witness { common, element, prime } => {
            let (name, p) = load_group(&common.group)?;
            let g = element_of(&p, &element)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let d = witness::p_depth(&ctx, &g, &BigInt::from(prime), &opts)?;
            let mut r = Report::new(
                &name,
                "witness",
                json!({"element": element, "prime": prime, "node_cap": common.node_cap}),
            );
            let code;
            let results = match d {
                PDepth::Exact { order, cert } => {
                    code = 0;
                    witness::verify_certificate(&ctx.pres, &g, &cert)?;
                    // independent brute-force confirmation when it fits
                    let oracle_checked = if order <= common.oracle_cap.into() {
                        let o = oracle::oracle_p_depth(
                            &ctx,
                            &g,
                            &BigInt::from(prime),
                            common.oracle_cap,
                            common.node_cap,
                        )?;
                        if o.complete && o.order != order {
                            return Err(Error::inconsistent(format!(
                                "oracle disagrees: {} vs {}",
                                o.order, order
                            )));
                        }
                        o.complete
                    } else {
                        false
                    };
                    json!({
                        "order": order.to_string(),
                        "exact": true,
                        "oracle_checked": oracle_checked,
                        "certificate": report::certificate_json(&ctx.pres, &cert),
                    })
                }
                PDepth::Bounded { lower, upper, cert } => {
                    code = 2;
                    r.warn("search hit the node cap; order is bracketed");
                    json!({
                        "lower": lower.to_string(),
                        "upper": upper.to_string(),
                        "exact": false,
                        "certificate": report::certificate_json(&ctx.pres, &cert),
                    })
                }
                PDepth::AtLeast { lower } => {
                    code = 2;
                    r.warn("search hit the node cap before any witness");
                    json!({"lower": lower.to_string(), "exact": false})
                }
            };
            let r = r.results(results);
            emit(&r, &common.json)?;
            Ok(code)
        }
        Command::RpSets { common, element, max_prime } => {
            let (name, p) = load_group(&common.group)?;
            let g = element_of(&p, &element)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let b = dimension::rp_sets_threaded(&ctx, &g, max_prime, &opts, common.threads)?;
            let mut r = Report::new(
                &name,
                "rp-sets",
                json!({"element": element, "max_prime": max_prime}),
            );
            if !b.unresolved.is_empty() {
                r.warn(format!("{} primes unresolved at the node cap", b.unresolved.len()));
            }
            let code = if b.unresolved.is_empty() { 0 } else { 2 };
            emit(&r.results(&b), &common.json)?;
            Ok(code)
        }
        Command::Dims { common, max_prime } => {
            let (name, p) = load_group(&common.group)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let d = dimension::dimension_report(&ctx, max_prime, &opts)?;
            let r = Report::new(&name, "dims", json!({"max_prime": max_prime})).results(&d);
            emit(&r, &common.json)?;
            Ok(0)
        }
        Command::Farb { common, radius } => {
            let (name, p) = load_group(&common.group)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let rows = farb::farb_table(&ctx, radius, 2_000_000, &opts)?;
            let fit = farb::exponent_fit(&rows).ok();
            let exact = rows.iter().all(|r| r.exact);
            let mut r = Report::new(&name, "farb", json!({"radius": radius}));
            if !exact {
                r.warn("some rows are lower bounds (resource caps)");
            }
            let r = r.results(json!({"rows": rows, "fit": fit}));
            emit(&r, &common.json)?;
            Ok(if exact { 0 } else { 2 })
        }
        Command::VerifyS3 { common, prime } => {
            let rep = lab::verify_section3(prime)?;
            let mut r = Report::new("counterexample_g", "verify-s3", json!({"prime": prime}));
            if !rep.published_center_cyclic_claim {
                r.warn(
                    "published cyclic-center sub-claim refuted: the quotient center \
                     is (Z/p)^2; see extra_central_element",
                );
            }
            let pass = rep.all_pass;
            emit(&r.results(&rep), &common.json)?;
            Ok(if pass { 0 } else { 3 })
        }
        Command::FalsifyP31 { common, prime } => {
            let rep = lab::falsify_incorrect_prop(prime)?;
            let falsified = rep.falsified;
            let r = Report::new("counterexample_g", "falsify-p31", json!({"prime": prime}))
                .results(&rep);
            emit(&r, &common.json)?;
            // refutation is the expected outcome
            Ok(if falsified { 0 } else { 3 })
        }
        Command::LowerSeq { common, element, count } => {
            let (name, p) = load_group(&common.group)?;
            let g = element_of(&p, &element)?;
            let ctx = GroupContext::new(p)?;
            let opts = SearchOptions { node_cap: common.node_cap, cutoff: None };
            let rows = dimension::lower_bound_sequence(&ctx, &g, count, &opts)?;
            let falsified = rows.iter().any(|r| r.falsification);
            let unverified = rows.iter().any(|r| !r.verified && !r.falsification);
            let mut r = Report::new(
                &name,
                "lower-seq",
                json!({"element": element, "count": count}),
            );
            if unverified {
                r.warn("some rows hit resource caps before verification");
            }
            emit(&r.results(&rows), &common.json)?;
            Ok(if falsified {
                3
            } else if unverified {
                2
            } else {
                0
            })
        }
        Command::Catalog { common, name } => {
            match name {
                Some(n) => {
                    let p = catalog::by_name(&n)?;
                    let r = Report::new(&n, "catalog", json!({"name": n}))
                        .results(json!({"file": format::serialize(&n, &p)}));
                    emit(&r, &common.json)?;
                }
                None => {
                    let names = [
                        "abelian(d)",
                        "heisenberg",
                        "filiform(h)",
                        "counterexample_g",
                        "direct_product(a,b)",
                    ];
                    let r = Report::new("", "catalog", json!({}))
                        .results(json!({"groups": names}));
                    emit(&r, &common.json)?;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(Error::Resource(m)) => {
            eprintln!("resource limit: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
