//! Command-line front end: generate fields, measure seminorms, and run the
//! verification checks.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage
//! or I/O errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use pbmo_core::area::area_check;
use pbmo_core::classic::classic_check;
use pbmo_core::corpus::{all_pass, corpus_to_csv, default_manifest, parse_manifest, run_corpus};
use pbmo_core::generate::{generate, GeneratorKind};
use pbmo_core::grid::{GridSpec, ParabolicCylinder};
use pbmo_core::io::{read_field, write_field};
use pbmo_core::mad::{mad, mad_direct};
use pbmo_core::matproj::{band_violation, project_field};
use pbmo_core::seminorm::{
    seminorm, seminorm_brute, seminorm_with_modulus, MatrixNorm, ModulusPoint, SeminormOptions,
};
use pbmo_core::sigma::{multiplicity_report, sigma_bounds_check};
use pbmo_core::verify::verify_bounds;
use pbmo_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pbmo",
    version,
    about = "Parabolic BMO seminorms and reflection-extension checks on grid fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AccessArg {
    /// Cylinders contained in the base box.
    Base,
    /// Cylinders anywhere, read through the reflection extension.
    Extended,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    /// Entrywise L1 matrix norm (fast kernel).
    L1,
    /// Frobenius matrix norm (direct kernel).
    Frobenius,
}

impl From<NormArg> for MatrixNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => MatrixNorm::L1,
            NormArg::Frobenius => MatrixNorm::Frobenius,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a deterministic test field and write it to a .pbmo file.
    Gen {
        /// Spatial dimension (1..=3).
        #[arg(long)]
        d: usize,
        /// Spatial cells per axis; the grid has n^2 time slices.
        #[arg(long)]
        n: usize,
        /// Generator name (e.g. constant, linear-x, random-piecewise).
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ellipticity parameter stored with the field (used by random-spd).
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        output: PathBuf,
    },

    /// Compute the seminorm of a field; optionally dump the modulus as CSV.
    Seminorm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = AccessArg::Base)]
        access: AccessArg,
        /// Restrict to cylinders of side at most rho0 (defaults to the
        /// access mode's full range).
        #[arg(long)]
        rho0: Option<f64>,
        /// Side cap of the extended family.
        #[arg(long, default_value_t = 4.0)]
        rho_max: f64,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
        /// Write the modulus table (rho, omega) to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Evaluate the reflection extension at one index point.
    ExtendEval {
        #[arg(long)]
        input: PathBuf,
        /// Time-cell index (any integer).
        #[arg(short, long, allow_negative_numbers = true)]
        t: i64,
        /// Spatial cell indices, comma-separated (any integers).
        #[arg(short, long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<i64>,
    },

    /// Check both extension bounds on one field.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        rho_max: f64,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
    },

    /// Print the modulus of oscillation size by size.
    Modulus {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = AccessArg::Base)]
        access: AccessArg,
        #[arg(long)]
        rho0: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        rho_max: f64,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Project a matrix field onto the elliptic band cell by cell.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Override the band parameter stored in the field.
        #[arg(long)]
        delta: Option<f64>,
    },

    /// Random-trial check of the tent-map preimage-count bounds at one scale.
    SigmaCheck {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Check the change-of-variables identity on one extended cylinder.
    AreaCheck {
        #[arg(long)]
        input: PathBuf,
        /// Temporal start cell of the cylinder.
        #[arg(long, allow_negative_numbers = true)]
        t0: i64,
        /// Spatial start cells, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x0: Vec<i64>,
        /// Side in cells.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
    },

    /// For a time-independent field, compare the parabolic seminorm with the
    /// classic cubic BMO supremum.
    ClassicCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
    },

    /// Verify the extension bounds over a manifest of generated fields.
    Corpus {
        /// Manifest CSV (d,n,kind,seed,rho_max); omit for the built-in one.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Write results here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Time the fast kernels against the direct ones.
    Bench {
        /// Write the timing table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() {
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn options(access: AccessArg, rho0: Option<f64>, rho_max: f64, norm: NormArg) -> SeminormOptions {
    let mut opts = match access {
        AccessArg::Base => SeminormOptions::base(),
        AccessArg::Extended => SeminormOptions::extended(rho_max),
    };
    if let Some(r) = rho0 {
        opts = opts.with_rho0(r);
    }
    opts.with_norm(norm.into())
}

fn describe(cyl: &ParabolicCylinder, spec: &GridSpec) -> String {
    format!(
        "k={} (rho={}) t0={} x0={:?}",
        cyl.k,
        cyl.rho(spec),
        cyl.t0,
        &cyl.x0[..spec.d()]
    )
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn modulus_csv(points: &[ModulusPoint]) -> String {
    let mut out = String::from("rho,omega\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.rho, p.sup_at_k));
    }
    out
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Gen {
            d,
            n,
            kind,
            seed,
            delta,
            output,
        } => {
            let spec = GridSpec::new(d, n)?;
            let field = generate(&spec, kind, seed, delta)?;
            write_field(&output, &field)?;
            println!(
                "wrote {} ({kind}, d={d}, n={n}, seed={seed}, {} cells)",
                output.display(),
                spec.cells()
            );
            Ok(0)
        }

        Cmd::Seminorm {
            input,
            access,
            rho0,
            rho_max,
            norm,
            csv,
        } => {
            let field = read_field(&input)?;
            let opts = options(access, rho0, rho_max, norm);
            let (result, points) = seminorm_with_modulus(&field, &opts)?;
            println!("seminorm = {}", result.value);
            println!("argmax: {}", describe(&result.argmax, field.spec()));
            if let Some(path) = csv {
                write_text(&path, &modulus_csv(&points))?;
                println!("modulus table -> {}", path.display());
            }
            Ok(0)
        }

        Cmd::ExtendEval { input, t, x } => {
            let field = read_field(&input)?;
            if x.len() != field.spec().d() {
                return Err(Error::DimensionMismatch(field.spec().d(), x.len()));
            }
            let rec = field.value_ext(t, &x);
            let text: Vec<String> = rec.iter().map(f64::to_string).collect();
            println!("{}", text.join(" "));
            Ok(0)
        }

        Cmd::Verify {
            input,
            rho_max,
            norm,
        } => {
            let field = read_field(&input)?;
            let r = verify_bounds(&field, rho_max, norm.into())?;
            println!(
                "base seminorm     = {} (argmax {})",
                r.base,
                describe(&r.base_argmax, field.spec())
            );
            println!(
                "extended seminorm = {} (rho_max={rho_max}, argmax {})",
                r.ext,
                describe(&r.ext_argmax, field.spec())
            );
            if r.degenerate {
                println!("both sides zero; bounds hold trivially");
            } else {
                println!("global ratio      = {} (limit {})", r.ratio, r.constant);
                println!(
                    "small-scale ratio = {} (limit {})",
                    r.small_rho_ratio, r.small_rho_constant
                );
            }
            println!("result: {}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }

        Cmd::Modulus {
            input,
            access,
            rho0,
            rho_max,
            norm,
            csv,
        } => {
            let field = read_field(&input)?;
            let opts = options(access, rho0, rho_max, norm);
            let points = pbmo_core::seminorm::modulus(&field, &opts)?;
            println!(
                "{:>4} {:>12} {:>22} {:>22}",
                "k", "rho", "omega", "envelope"
            );
            for p in &points {
                println!(
                    "{:>4} {:>12} {:>22} {:>22}",
                    p.k, p.rho, p.sup_at_k, p.sup_cum
                );
            }
            if let Some(path) = csv {
                write_text(&path, &modulus_csv(&points))?;
                println!("modulus table -> {}", path.display());
            }
            Ok(0)
        }

        Cmd::Project {
            input,
            output,
            delta,
        } => {
            let field = read_field(&input)?;
            let delta = delta.unwrap_or_else(|| field.delta());
            let before = band_violation(&field, delta)?;
            let projected = project_field(&field, delta)?;
            let after = band_violation(&projected, delta)?;
            write_field(&output, &projected)?;
            println!("band violation before = {before}");
            println!("band violation after  = {after}");
            println!("wrote {}", output.display());
            Ok(0)
        }

        Cmd::SigmaCheck { rho, trials, seed } => {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::BadGeneratorParam(format!(
                    "scale must be positive and finite, got {rho}"
                )));
            }
            let r = sigma_bounds_check(rho, trials, seed);
            println!(
                "temporal counts: worst {} (bound {})",
                r.worst_temporal, r.temporal_bound
            );
            println!(
                "spatial counts:  worst {} (bound {})",
                r.worst_spatial, r.spatial_bound
            );
            println!("result: {}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }

        Cmd::AreaCheck {
            input,
            t0,
            x0,
            k,
            norm,
        } => {
            let field = read_field(&input)?;
            if x0.len() != field.spec().d() {
                return Err(Error::DimensionMismatch(field.spec().d(), x0.len()));
            }
            if k == 0 {
                return Err(Error::BadGeneratorParam("side k must be >= 1".into()));
            }
            let cyl = ParabolicCylinder::new(t0, &x0, k);
            let area = area_check(&field, &cyl, norm.into())?;
            let mults = multiplicity_report(field.spec(), &cyl);
            println!("direct sum          = {}", area.lhs);
            println!("weighted base sum   = {}", area.rhs);
            println!("residual            = {}", area.abs_diff);
            println!(
                "multiplicities: temporal {} (bound {}), spatial {:?} (bound {})",
                mults.temporal_max, mults.temporal_bound, mults.spatial_max, mults.spatial_bound
            );
            let pass = area.pass && mults.pass;
            println!("result: {}", if pass { "PASS" } else { "FAIL" });
            Ok(if pass { 0 } else { 1 })
        }

        Cmd::ClassicCheck { input, norm } => {
            let field = read_field(&input)?;
            let r = classic_check(&field, norm.into())?;
            println!("parabolic seminorm = {}", r.parabolic);
            println!("cubic BMO supremum = {}", r.cubic);
            println!("difference         = {}", r.abs_diff);
            println!("result: {}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }

        Cmd::Corpus { manifest, csv } => {
            let rows = match &manifest {
                Some(path) => parse_manifest(&read_text(path)?)?,
                None => default_manifest(),
            };
            let results = run_corpus(&rows, |done, total| {
                if done % 20 == 0 || done == total {
                    eprintln!("corpus: {done}/{total}");
                }
            })?;
            let table = corpus_to_csv(&results);
            match csv {
                Some(path) => {
                    write_text(&path, &table)?;
                    eprintln!("results -> {}", path.display());
                }
                None => print!("{table}"),
            }
            let ok = all_pass(&results);
            eprintln!(
                "corpus: {}/{} rows pass",
                results.iter().filter(|r| r.report.pass).count(),
                results.len()
            );
            Ok(if ok { 0 } else { 1 })
        }

        Cmd::Bench { csv } => bench(csv),
    }
}

/// Median-free single-shot timing: warm up once, then average over enough
/// repetitions to fill ~60 ms.
fn time_ns(mut f: impl FnMut()) -> f64 {
    f();
    let t0 = Instant::now();
    f();
    let single = t0.elapsed().as_nanos().max(1);
    let reps = (60_000_000 / single).clamp(1, 100_000) as usize;
    let t0 = Instant::now();
    for _ in 0..reps {
        f();
    }
    t0.elapsed().as_nanos() as f64 / reps as f64
}

fn bench(csv: Option<PathBuf>) -> Result<i32> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xbe9c);
    let mut table = String::from("kernel,case,ns_per_op\n");
    let mut push = |kernel: &str, case: &str, ns: f64| {
        table.push_str(&format!("{kernel},{case},{ns:.0}\n"));
        println!("{kernel:>16} {case:>8} {ns:>14.0} ns/op");
    };

    for m in [64usize, 256, 1024] {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let case = format!("m={m}");
        push(
            "slice-mad-gap",
            &case,
            time_ns(|| {
                std::hint::black_box(mad(std::hint::black_box(&v)));
            }),
        );
        push(
            "slice-mad-direct",
            &case,
            time_ns(|| {
                std::hint::black_box(mad_direct(std::hint::black_box(&v)));
            }),
        );
    }

    let mut fast_not_slower = true;
    for (d, n) in [(1usize, 8usize), (1, 16), (2, 8)] {
        let spec = GridSpec::new(d, n)?;
        let field = generate(&spec, GeneratorKind::RandomPiecewise, 0, 0.5)?;
        let opts = SeminormOptions::base();
        let case = format!("d={d},n={n}");
        let fast_ns = time_ns(|| {
            std::hint::black_box(seminorm(std::hint::black_box(&field), &opts).unwrap());
        });
        let brute_ns = time_ns(|| {
            std::hint::black_box(seminorm_brute(std::hint::black_box(&field), &opts).unwrap());
        });
        push("seminorm-fast", &case, fast_ns);
        push("seminorm-brute", &case, brute_ns);
        if n >= 8 && fast_ns > brute_ns {
            fast_not_slower = false;
            eprintln!("warning: fast kernel slower than the direct scan at {case}");
        }
    }
    if fast_not_slower {
        println!("sanity: fast kernel at n >= 8 is never slower than the direct scan");
    }

    if let Some(path) = csv {
        write_text(&path, &table)?;
        eprintln!("timings -> {}", path.display());
    }
    Ok(0)
}
