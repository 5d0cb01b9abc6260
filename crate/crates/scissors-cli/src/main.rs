//! Batch front end: parse element, polytope, and spec files, dispatch to the
//! engine, and emit canonical machine-readable results.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (with a
//! structured error object on standard output).

use clap::{Parser, Subcommand};
use scissors_core::assembler::{check_assembler_axioms, spec_from_name, AssemblerMode};
use scissors_core::complex::{
    build_destab_complex, check_connectivity_bound, complex_homology, DestabModel,
    DEFAULT_VERTEX_CAP,
};
use scissors_core::construct::{
    conjugator_from_disjoint, construct_congruence, construct_embedding_ea,
    construct_embedding_squeeze,
};
use scissors_core::invariant::{check_k1_relations, rec_invariant, saf};
use scissors_core::ktheory::{omega_infty_poincare, pt_group_1d, two_term_homology, IntMatrix};
use scissors_core::scalar::PRECISION_CAP_ENV;
use scissors_core::{
    AssemblerSpec, CoefficientGroup, RectPolytope, Scalar, ScissorsAuto, ScissorsEmbedding, Span,
};
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "scissors",
    version,
    about = "Exact cut-and-paste congruence engine for rectilinear polytopes",
    after_help = format!("Set {PRECISION_CAP_ENV} to override the sign-refinement precision cap (bits).")
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of an element or embedding file.
    Verify { element: PathBuf },
    /// Compose two automorphism files over the same base.
    Compose {
        a: PathBuf,
        b: PathBuf,
        /// `left`: apply a first, then b; `right`: apply b first.
        #[arg(long, default_value = "left")]
        order: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Invert an automorphism file.
    Invert {
        element: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply an automorphism to a point.
    Apply {
        element: PathBuf,
        /// Comma-separated coordinates, e.g. `1/4` or `1/2,sqrt2-1`.
        #[arg(long)]
        point: String,
    },
    /// Construct a verified scissors embedding (volume-driven for EA specs,
    /// strict squeeze for S specs).
    Embed {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Optional piece diagram.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Construct a verified scissors congruence between two polytopes of an
    /// S spec.
    Congruence {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// The target automorphism swapping two disjoint embeddings.
    Conjugator {
        e1: PathBuf,
        e2: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Wedge invariant of a one-dimensional element.
    Saf {
        #[arg(long)]
        element: PathBuf,
        /// Basis of the coefficient group, e.g. `1,sqrt2`.
        #[arg(long)]
        gamma: String,
        /// Accepted so pipelines can carry the spec along; the element file
        /// already embeds its spec.
        #[arg(long)]
        spec: Option<String>,
    },
    /// Per-axis invariant of a rectangle exchange.
    RecInvariant {
        #[arg(long)]
        element: PathBuf,
        /// Per-axis bases separated by `;`, or one basis for all axes.
        #[arg(long)]
        gamma: String,
    },
    /// Sample the K1 presentation relations under the wedge invariant.
    K1Relations {
        #[arg(long, default_value = "1,sqrt2")]
        gamma: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Homology of the one-dimensional K-theory spectrum for a lattice
    /// multiplier.
    #[command(name = "ktheory-1d")]
    Ktheory1d {
        /// Integer matrix as JSON, e.g. `[[5]]` or `[[0,1],[1,-1]]`.
        #[arg(long)]
        multiplier: String,
        /// Localize at the primes dividing the determinant.
        #[arg(long)]
        localize: bool,
        /// Also print the per-degree kernel/cokernel layers.
        #[arg(long)]
        layers: bool,
    },
    /// Künneth smash of two graded-group files.
    Kunneth { a: PathBuf, b: PathBuf },
    /// Dimensions of the free graded-commutative algebra on the given
    /// generators.
    Poincare {
        /// `degree:dim` pairs, e.g. `1:3,2:1`.
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 10)]
        degree: u32,
    },
    /// One-dimensional polytope group vs the wedge of circles.
    Pt1d {
        /// Comma-separated cut coordinates.
        #[arg(long)]
        cuts: String,
    },
    /// Destabilisation complex: face counts, connectivity, bound check.
    Complex {
        /// `finite-set` or `grid-interval`.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        ambient: usize,
        /// Compute full homology instead of probing up to the bound.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
        vertex_cap: usize,
    },
    /// Sampled assembler axiom checks for a spec.
    Axioms {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Run a single criterion (1-11).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

fn fail<E: std::fmt::Display>(kind: &'static str) -> impl FnOnce(E) -> Failure {
    move |e| Failure {
        kind,
        message: e.to_string(),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            let payload = json!({"error": {"kind": f.kind, "message": f.message}});
            println!("{payload}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Verify { element } => {
            let el = read_element(&element)?;
            match &el {
                Element::Auto(a) => a.verify().map_err(fail("verify"))?,
                Element::Embedding(e) => e.verify().map_err(fail("verify"))?,
                Element::Congruence(c) => c.verify().map_err(fail("verify"))?,
            }
            let (kind, pieces) = match &el {
                Element::Auto(a) => ("automorphism", a.pieces().len()),
                Element::Embedding(e) => ("embedding", e.pieces().len()),
                Element::Congruence(c) => ("congruence", c.pieces().len()),
            };
            emit(&json!({"ok": true, "kind": kind, "pieces": pieces}));
        }
        Command::Compose { a, b, order, output } => {
            let fa = read_auto(&a)?;
            let fb = read_auto(&b)?;
            let composed = match order.as_str() {
                "left" => fa.then(&fb),
                "right" => fa.compose(&fb),
                other => {
                    return Err(Failure {
                        kind: "usage",
                        message: format!("unknown order {other:?}, expected left or right"),
                    })
                }
            }
            .map_err(fail("compose"))?;
            write_or_print(&composed, output.as_deref())?;
        }
        Command::Invert { element, output } => {
            let f = read_auto(&element)?;
            write_or_print(&f.inverse(), output.as_deref())?;
        }
        Command::Apply { element, point } => {
            let f = read_auto(&element)?;
            let coords = parse_scalars(&point)?;
            match f.apply(&coords).map_err(fail("apply"))? {
                scissors_core::group::ApplyOutcome::Point(p) => {
                    emit(&json!({"outcome": "point", "point": p}));
                }
                scissors_core::group::ApplyOutcome::OnCut => {
                    emit(&json!({"outcome": "on-cut"}));
                }
            }
        }
        Command::Embed {
            spec,
            source,
            target,
            output,
            svg,
        } => {
            let spec = parse_spec(&spec)?;
            let p: RectPolytope = read_json(&source)?;
            let q: RectPolytope = read_json(&target)?;
            let e = match spec.mode() {
                AssemblerMode::Ea => construct_embedding_ea(&p, &q, &spec),
                AssemblerMode::S => construct_embedding_squeeze(&p, &q, &spec),
            }
            .map_err(fail("embed"))?;
            if let Some(path) = svg {
                render_embedding_svg(&e, &path)?;
            }
            print_certificate_embedding(&e);
            write_or_print(&e, output.as_deref())?;
        }
        Command::Congruence {
            spec,
            source,
            target,
            output,
            svg,
        } => {
            let spec = parse_spec(&spec)?;
            let p: RectPolytope = read_json(&source)?;
            let q: RectPolytope = read_json(&target)?;
            let c = construct_congruence(&p, &q, &spec).map_err(fail("congruence"))?;
            if let Some(path) = svg {
                render_span_svg(&c, &path)?;
            }
            print_certificate_span(&c);
            write_or_print(&c, output.as_deref())?;
        }
        Command::Conjugator { e1, e2, output } => {
            let a = read_embedding(&e1)?;
            let b = read_embedding(&e2)?;
            let h = conjugator_from_disjoint(&a, &b).map_err(fail("conjugator"))?;
            write_or_print(&h, output.as_deref())?;
        }
        Command::Saf {
            element,
            gamma,
            spec: _,
        } => {
            let f = read_auto(&element)?;
            let gamma = parse_gamma(&gamma)?;
            let w = saf(&f, &gamma).map_err(fail("saf"))?;
            emit(&w);
        }
        Command::RecInvariant { element, gamma } => {
            let f = read_auto(&element)?;
            let gammas = parse_gammas(&gamma, f.base.dim())?;
            let inv = rec_invariant(&f, &gammas).map_err(fail("rec-invariant"))?;
            emit(&inv);
        }
        Command::K1Relations { gamma, seed, count } => {
            let gamma = parse_gamma(&gamma)?;
            let report = check_k1_relations(&gamma, seed, count);
            emit(&report);
            if !report.passed() {
                return Err(Failure {
                    kind: "k1-relations",
                    message: format!("{} violations", report.violations.len()),
                });
            }
        }
        Command::Ktheory1d {
            multiplier,
            localize,
            layers,
        } => {
            let rows: Vec<Vec<i64>> =
                serde_json::from_str(&multiplier).map_err(fail("parse-multiplier"))?;
            let m = IntMatrix::new(
                rows.into_iter()
                    .map(|r| r.into_iter().map(Into::into).collect())
                    .collect(),
            );
            let report = two_term_homology(&m, localize).map_err(fail("ktheory-1d"))?;
            if layers {
                emit(&report);
            } else {
                emit(&report.homology);
            }
        }
        Command::Kunneth { a, b } => {
            let x: scissors_core::GradedAb = read_json(&a)?;
            let y: scissors_core::GradedAb = read_json(&b)?;
            emit(&x.kunneth_smash(&y));
        }
        Command::Poincare { dims, degree } => {
            let generators = parse_dims(&dims)?;
            let series = omega_infty_poincare(&generators, degree);
            emit(&json!({"dims": series}));
        }
        Command::Pt1d { cuts } => {
            let cuts = parse_scalars(&cuts)?;
            emit(&pt_group_1d(&cuts));
        }
        Command::Complex {
            model,
            copies,
            ambient,
            full,
            vertex_cap,
        } => {
            let model = match model.as_str() {
                "finite-set" => DestabModel::FiniteSet { copies, ambient },
                "grid-interval" => DestabModel::GridInterval {
                    cells: copies,
                    ambient,
                },
                other => {
                    return Err(Failure {
                        kind: "usage",
                        message: format!("unknown model {other:?}"),
                    })
                }
            };
            let bound_report =
                check_connectivity_bound(model, vertex_cap).map_err(fail("complex"))?;
            if full {
                let complex = build_destab_complex(model, vertex_cap).map_err(fail("complex"))?;
                let homology = complex_homology(&complex);
                emit(&json!({"bound": bound_report, "homology": homology}));
            } else {
                emit(&bound_report);
            }
        }
        Command::Axioms { spec, samples, seed } => {
            let spec = parse_spec(&spec)?;
            let report = check_assembler_axioms(&spec, samples, seed);
            emit(&report);
            if !report.all_passed() {
                return Err(Failure {
                    kind: "axioms",
                    message: report
                        .first_failure()
                        .map(|c| format!("{}: {}", c.axiom, c.detail))
                        .unwrap_or_default(),
                });
            }
        }
        Command::Selftest { criterion } => {
            let outcomes = match criterion {
                None => scissors_core::suite::all_criteria(),
                Some(n) => match scissors_core::suite::run_criterion(n) {
                    Some(outcome) => vec![outcome],
                    None => {
                        return Err(Failure {
                            kind: "usage",
                            message: format!("no criterion {n}"),
                        })
                    }
                },
            };
            let mut ok = true;
            for outcome in &outcomes {
                println!("{}", outcome.line());
                ok &= outcome.passed;
            }
            if !ok {
                return Err(Failure {
                    kind: "selftest",
                    message: "some criteria failed".into(),
                });
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// Input parsing

#[derive(Deserialize)]
#[serde(untagged)]
enum Element {
    Embedding(ScissorsEmbedding),
    Congruence(Span),
    Auto(ScissorsAuto),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(fail("read-file"))?;
    serde_json::from_str(&text).map_err(fail("parse-file"))
}

fn read_element(path: &Path) -> Result<Element, Failure> {
    let raw: Element = read_json(path)?;
    // re-normalize: hand-written files may not be canonical
    Ok(match raw {
        Element::Auto(a) => Element::Auto(ScissorsAuto::from_pieces(
            a.spec.clone(),
            a.base.clone(),
            a.pieces().to_vec(),
        )),
        Element::Embedding(e) => Element::Embedding(
            ScissorsEmbedding::from_pieces(
                e.spec.clone(),
                e.source.clone(),
                e.target.clone(),
                e.pieces().to_vec(),
            )
            .map_err(fail("parse-file"))?,
        ),
        Element::Congruence(c) => Element::Congruence(Span::from_pieces(
            c.spec.clone(),
            c.source.clone(),
            c.target.clone(),
            c.pieces().to_vec(),
        )),
    })
}

fn read_auto(path: &Path) -> Result<ScissorsAuto, Failure> {
    match read_element(path)? {
        Element::Auto(a) => Ok(a),
        _ => Err(Failure {
            kind: "parse-file",
            message: format!("{} does not hold an automorphism", path.display()),
        }),
    }
}

fn read_embedding(path: &Path) -> Result<ScissorsEmbedding, Failure> {
    match read_element(path)? {
        Element::Embedding(e) => Ok(e),
        _ => Err(Failure {
            kind: "parse-file",
            message: format!("{} does not hold an embedding", path.display()),
        }),
    }
}

fn parse_spec(text: &str) -> Result<AssemblerSpec, Failure> {
    if let Some(path) = text.strip_prefix('@') {
        return read_json(Path::new(path));
    }
    spec_from_name(text).map_err(fail("parse-spec"))
}

fn parse_scalars(text: &str) -> Result<Vec<Scalar>, Failure> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse::<Scalar>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail("parse-scalar"))
}

fn parse_gamma(text: &str) -> Result<CoefficientGroup, Failure> {
    let basis = parse_scalars(text)?;
    CoefficientGroup::new(basis, text.to_string()).map_err(fail("parse-gamma"))
}

fn parse_gammas(text: &str, axes: usize) -> Result<Vec<CoefficientGroup>, Failure> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() == 1 {
        let g = parse_gamma(parts[0])?;
        return Ok(vec![g; axes]);
    }
    if parts.len() != axes {
        return Err(Failure {
            kind: "usage",
            message: format!("expected {axes} axis bases, got {}", parts.len()),
        });
    }
    parts.into_iter().map(parse_gamma).collect()
}

fn parse_dims(text: &str) -> Result<Vec<(u32, u64)>, Failure> {
    let mut out = Vec::new();
    if text.trim().is_empty() {
        return Ok(out);
    }
    for part in text.split(',') {
        let (deg, dim) = part.split_once(':').ok_or(Failure {
            kind: "usage",
            message: format!("expected degree:dim, got {part:?}"),
        })?;
        let deg: u32 = deg.trim().parse().map_err(fail("usage"))?;
        let dim: u64 = dim.trim().parse().map_err(fail("usage"))?;
        out.push((deg, dim));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Output

fn emit<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn write_or_print<T: serde::Serialize>(value: &T, output: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string(value).expect("serializable");
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n")).map_err(fail("write-file"))?;
            emit(&json!({"ok": true, "written": path.display().to_string()}));
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn print_certificate_embedding(e: &ScissorsEmbedding) {
    eprintln!("# embedding certificate");
    eprintln!("#  source volume    : {}", e.source.volume());
    eprintln!("#  target volume    : {}", e.target.volume());
    eprintln!("#  complement volume: {}", e.complement().volume());
    eprintln!("#  pieces           : {}", e.pieces().len());
    for (i, p) in e.pieces().iter().enumerate() {
        eprintln!("#  piece {i}: {:?} -> {:?}", p.source, p.image());
    }
}

fn print_certificate_span(c: &Span) {
    eprintln!("# congruence certificate");
    eprintln!("#  source volume: {}", c.source.volume());
    eprintln!("#  target volume: {}", c.target.volume());
    eprintln!("#  pieces       : {}", c.pieces().len());
    for (i, p) in c.pieces().iter().enumerate() {
        eprintln!("#  piece {i}: {:?} -> {:?}", p.source, p.image());
    }
}

// ---------------------------------------------------------------------------
// Piece diagrams

fn render_embedding_svg(e: &ScissorsEmbedding, path: &Path) -> Result<(), Failure> {
    let pieces: Vec<(scissors_core::AxisBox, scissors_core::AxisBox)> = e
        .pieces()
        .iter()
        .map(|p| (p.source.clone(), p.image()))
        .collect();
    render_svg(&pieces, e.source.dim(), path)
}

fn render_span_svg(c: &Span, path: &Path) -> Result<(), Failure> {
    let pieces: Vec<(scissors_core::AxisBox, scissors_core::AxisBox)> = c
        .pieces()
        .iter()
        .map(|p| (p.source.clone(), p.image()))
        .collect();
    render_svg(&pieces, c.source.dim(), path)
}

fn render_svg(
    pieces: &[(scissors_core::AxisBox, scissors_core::AxisBox)],
    dim: usize,
    path: &Path,
) -> Result<(), Failure> {
    if dim > 2 {
        return Err(Failure {
            kind: "svg",
            message: "piece diagrams are drawn for dimensions 1 and 2 only".into(),
        });
    }
    let scale = 120.0;
    let bar = 40.0;
    let gap = 60.0;
    let rect = |b: &scissors_core::AxisBox, y_off: f64, color: &str| -> String {
        let x = b.lo(0).to_f64() * scale;
        let w = b.side(0).to_f64() * scale;
        let (y, h) = if dim == 1 {
            (y_off, bar)
        } else {
            (y_off + b.lo(1).to_f64() * scale, b.side(1).to_f64() * scale)
        };
        format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"{color}\" stroke=\"black\" stroke-width=\"0.5\"/>"
        )
    };
    let row_height = if dim == 1 { bar } else { 3.0 * scale };
    let mut body = String::new();
    for (i, (src, img)) in pieces.iter().enumerate() {
        let hue = (i * 360) / pieces.len().max(1);
        let color = format!("hsl({hue},70%,60%)");
        body.push_str(&rect(src, 0.0, &color));
        body.push_str(&rect(img, row_height + gap, &color));
    }
    let height = 2.0 * row_height + gap + 10.0;
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"{height:.0}\">\n{body}\n</svg>\n"
    );
    std::fs::write(path, svg).map_err(fail("write-file"))
}
