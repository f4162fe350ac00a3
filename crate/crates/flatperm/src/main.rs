use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cylinders::{direction_permutation, Direction};
use harness::{render_text, render_tsv, verify_range, Locus, SurfaceSpec, VerifyConfig};
use invariants::{hlk, torsion_types_h2, BasisChoice, Reduction};
use prototypes::{enumerate_h2, enumerate_prym, has_spin, prym_component, reduced_h2, reduced_h2_prototype, reduced_prym, reduced_prym_prototype, spin_class, Model};
use serde_json::json;
use surface::FlatSurface;

#[derive(Parser)]
#[command(name = "flatperm", version, about = "Permutation groups of Veech-group parabolics on Weierstrass and Prym fixed points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List splitting prototypes as TSV: a b c e D [spin|component].
    Prototypes {
        #[arg(long)]
        locus: String,
        #[arg(long = "D", allow_hyphen_values = true)]
        d: i64,
        /// Only the reduced prototypes (c = 1, a = 0).
        #[arg(long)]
        reduced: bool,
    },
    /// Build a model surface, or check a surface file.
    Surface {
        #[command(flatten)]
        make: MakeArgs,
        /// Write the surface file here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Validate a surface file and print its stratum data.
        #[arg(long, conflicts_with_all = ["make", "params", "out"])]
        check: Option<PathBuf>,
    },
    /// Cylinder decomposition and twist permutation in one direction.
    Decompose {
        #[arg(long, conflicts_with_all = ["make", "params"])]
        surface: Option<PathBuf>,
        #[command(flatten)]
        make: MakeArgs,
        /// Direction `u,v`; coordinates are rationals or `p+q*sqrt(D)`.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long, default_value_t = cylinders::DEFAULT_MAX_CROSSINGS)]
        max_crossings: usize,
        #[arg(long)]
        json: bool,
    },
    /// Two-torsion types of the Weierstrass points and the HLK invariant.
    Hlk {
        #[command(flatten)]
        make: MakeArgs,
        /// Basis parameter `d` with `D ≡ d² mod 8`; defaults to the square
        /// root, the canonical choice for even D, or the conductor.
        #[arg(long, allow_hyphen_values = true)]
        basis: Option<i64>,
    },
    /// Verify the group classification over a range of discriminants.
    Verify {
        #[arg(long)]
        locus: String,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        #[arg(long, conflicts_with = "tsv")]
        json: bool,
        #[arg(long)]
        tsv: bool,
        #[arg(long, default_value_t = cylinders::DEFAULT_MAX_CROSSINGS)]
        max_crossings: usize,
        /// Surface file for the discriminant-8 Prym locus.
        #[arg(long)]
        b8_file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MakeArgs {
    /// Model: P, L, A+, A- or Z.
    #[arg(long, requires = "params")]
    make: Option<String>,
    /// `a,b,c,e` for a prototype or `e,D` for a reduced one.
    #[arg(long, allow_hyphen_values = true, requires = "make")]
    params: Option<String>,
}

impl MakeArgs {
    fn spec(&self) -> Result<Option<SurfaceSpec>> {
        match (&self.make, &self.params) {
            (Some(k), Some(p)) => Ok(Some(SurfaceSpec::parse(k, p)?)),
            _ => Ok(None),
        }
    }

    fn require(&self) -> Result<SurfaceSpec> {
        self.spec()?.ok_or_else(|| anyhow!("--make and --params are required"))
    }
}

fn prototypes_cmd(out: &mut String, locus: Locus, d: i64, reduced: bool) -> Result<()> {
    writeln!(out, "a\tb\tc\te\tD\t{}", if locus == Locus::H2 { "spin" } else { "component" })?;
    match locus {
        Locus::H2 => {
            let list = if reduced {
                reduced_h2(d)?.into_iter().map(|e| reduced_h2_prototype(e, d)).collect::<Result<Vec<_>, _>>()?
            } else {
                enumerate_h2(d)?
            };
            for p in list {
                let label = if has_spin(d) { spin_class(&p).value.map_or("-".into(), |v| v.to_string()) } else { "-".into() };
                writeln!(out, "{}\t{}\t{}\t{}\t{}\t{label}", p.a, p.b, p.c, p.e, p.d)?;
            }
        }
        Locus::Prym => {
            let list = if reduced {
                reduced_prym(d)?.into_iter().map(|e| reduced_prym_prototype(e, d)).collect::<Result<Vec<_>, _>>()?
            } else {
                enumerate_prym(d)?
            };
            for p in list {
                let label = if reduced || d % 2 == 0 {
                    prym_component(Model::Plus, p.e, d).map_or("-".into(), |c| c.to_string())
                } else {
                    "-".into()
                };
                writeln!(out, "{}\t{}\t{}\t{}\t{}\t{label}", p.a, p.b, p.c, p.e, p.d)?;
            }
        }
    }
    Ok(())
}

fn surface_cmd(out: &mut String, make: &MakeArgs, file: Option<PathBuf>, check: Option<PathBuf>) -> Result<()> {
    if let Some(path) = check {
        let s = surface::load_surface(&path).with_context(|| format!("reading {}", path.display()))?;
        let report = surface::validate(&s)?;
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "D": s.d, "stratum": report }))?)?;
        return Ok(());
    }
    let s = make.require()?.build()?;
    match file {
        Some(path) => surface::save_surface(&s, &path).with_context(|| format!("writing {}", path.display()))?,
        None => writeln!(out, "{}", surface::to_json(&s))?,
    }
    Ok(())
}

fn load(path: Option<PathBuf>, make: &MakeArgs) -> Result<(String, FlatSurface)> {
    match (path, make.spec()?) {
        (Some(p), _) => Ok((p.display().to_string(), surface::load_surface(&p).with_context(|| format!("reading {}", p.display()))?)),
        (None, Some(spec)) => Ok((spec.to_string(), spec.build()?)),
        (None, None) => bail!("give --surface or --make with --params"),
    }
}

fn decompose_cmd(out: &mut String, name: &str, s: &FlatSurface, dir: &str, max_crossings: usize, as_json: bool) -> Result<()> {
    let dir = Direction::parse(dir, s.d).map_err(|e| anyhow!(e))?;
    let (dec, td, perm) = direction_permutation(s, &dir, max_crossings)?;
    if as_json {
        let cylinders: Vec<_> = dec
            .cylinders
            .iter()
            .zip(&td.k)
            .map(|(c, k)| {
                json!({
                    "w": c.w,
                    "h": c.h,
                    "m": c.modulus,
                    "core_points": c.core_points.iter().map(|(n, x)| json!({ "name": n, "position": x })).collect::<Vec<_>>(),
                    "boundary_points": c.boundary_points,
                    "off_core_points": c.off_core_points.iter().map(|(n, x)| json!({ "name": n, "position": x })).collect::<Vec<_>>(),
                    "k": k,
                })
            })
            .collect();
        let v = json!({ "surface": name, "direction": dir, "cylinders": cylinders, "t": td.t, "permutation": perm });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(());
    }
    writeln!(out, "{name} direction {dir}: {} cylinders, t = {}", dec.cylinders.len(), td.t)?;
    for (i, (c, k)) in dec.cylinders.iter().zip(&td.k).enumerate() {
        let core: Vec<String> = c.core_points.iter().map(|(n, x)| format!("{n}@{x}")).collect();
        let off: Vec<String> = c.off_core_points.iter().map(|(n, x)| format!("{n}@{x}")).collect();
        writeln!(out, 
            "  C{}: w = {}, h = {}, m = {}, k = {k}, core [{}], off core [{}], boundary [{}]",
            i + 1,
            c.w,
            c.h,
            c.modulus,
            core.join(", "),
            off.join(", "),
            c.boundary_points.join(", ")
        )?;
    }
    writeln!(out, "permutation {perm}")?;
    Ok(())
}

fn default_basis(d: i64) -> Result<i64> {
    if let Some(r) = qfield::exact_sqrt(d as u64) {
        return Ok(r as i64);
    }
    if d % 2 == 0 {
        return Ok(BasisChoice::canonical(d as u64, Reduction::H2)?.d);
    }
    Ok(qfield::conductor(d as u64).map_err(|_| anyhow!("no basis with D ≡ d² mod 8 for D = {d}; pass --basis"))? as i64)
}

fn hlk_cmd(out: &mut String, spec: &SurfaceSpec, basis: Option<i64>) -> Result<()> {
    if spec.kind.is_prym() {
        bail!("hlk applies to genus-two surfaces (P or L)");
    }
    let d = spec.discriminant();
    let basis = BasisChoice::new(d as u64, basis.map_or_else(|| default_basis(d), Ok)?, Reduction::H2)?;
    let s = spec.build()?;
    let types = torsion_types_h2(&s, &basis)?;
    let inv = hlk(&s, &basis)?;
    let v = json!({
        "surface": spec.to_string(),
        "D": d,
        "basis_d": basis.d,
        "types": types.iter().map(|(n, t)| json!({ "point": n, "type": t.to_string() })).collect::<Vec<_>>(),
        "hlk": inv,
        "tuple": inv.to_string(),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    Ok(())
}

fn run(cli: Cli, out: &mut String) -> Result<bool> {
    match cli.command {
        Command::Prototypes { locus, d, reduced } => prototypes_cmd(out, Locus::parse(&locus)?, d, reduced)?,
        Command::Surface { make, out: out_file, check } => surface_cmd(out, &make, out_file, check)?,
        Command::Decompose { surface, make, dir, max_crossings, json } => {
            let (name, s) = load(surface, &make)?;
            decompose_cmd(out, &name, &s, &dir, max_crossings, json)?;
        }
        Command::Hlk { make, basis } => hlk_cmd(out, &make.require()?, basis)?,
        Command::Verify { locus, from, to, json, tsv, max_crossings, b8_file } => {
            let cfg = VerifyConfig { max_crossings, b8_file };
            let r = verify_range(Locus::parse(&locus)?, from, to, &cfg);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
            } else if tsv {
                write!(out, "{}", render_tsv(&r))?;
            } else {
                write!(out, "{}", render_text(&r))?;
            }
            return Ok(r.ok());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let mut out = String::new();
    let result = run(Cli::parse(), &mut out);
    // A closed pipe downstream (`| head`) is not an error.
    if let Err(e) = std::io::stdout().lock().write_all(out.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
