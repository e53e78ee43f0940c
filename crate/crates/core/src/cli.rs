//! Command-line front end: expansions, modularity reports, Sturm bounds,
//! broken-diamond partition numbers, and congruence certificates.
//!
//! Exit status encodes the outcome so scripts need not parse output:
//! 0 for a passing verdict or an informational command, 1 for a failing
//! verdict, 2 for usage or computation errors.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};

use crate::congruence::{
    sturm_bound, verify_general, verify_theorem_1_1, verify_theorem_1_2, CongruenceCertificate,
    CongruenceError,
};
use crate::eta::{EtaQuotient, ModularityReport};
use crate::partitions::BrokenDiamondFamily;
use crate::series::TruncatedSeries;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Prose and tables for people
    Text,
    /// Stable `key=value` lines for scripts
    Machine,
}

#[derive(Parser)]
#[command(
    name = "etaq",
    version,
    about = "Exact eta-quotient q-expansions, modularity reports, and partition-congruence certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Expand an eta-quotient as a q-series with exact integer coefficients
    Expand {
        /// Quotient in the form "N=<level>; <divisor>:<exponent> ..."
        spec: String,
        /// Highest q-power to compute
        #[arg(short = 'T', long, default_value_t = 20, value_parser = clap::value_parser!(i64).range(1..))]
        terms: i64,
    },
    /// Check the mod-24 modularity conditions and report weight, character, and cusp orders
    CheckModularity {
        /// Quotient in the form "N=<level>; <divisor>:<exponent> ..."
        spec: String,
    },
    /// Print the vanishing order at each cusp, indexed by the divisors of the level
    CuspOrders {
        /// Quotient in the form "N=<level>; <divisor>:<exponent> ..."
        spec: String,
    },
    /// Sturm bound for modular forms of a given weight on Gamma_0(N)
    Sturm {
        /// Weight
        #[arg(short = 'k', long)]
        weight: i64,
        /// Level
        #[arg(short = 'N', long)]
        level: u64,
    },
    /// Broken k-diamond partition numbers Delta_k(0..=T)
    Delta {
        /// Family index k
        #[arg(short = 'k', long, value_parser = clap::value_parser!(u64).range(1..))]
        family: u64,
        /// Highest argument to compute
        #[arg(short = 'T', long, default_value_t = 20, value_parser = clap::value_parser!(i64).range(1..))]
        terms: i64,
    },
    /// Certify prod (1-q^n)^4 (1-q^2n)^6 == 6 sum Delta_3(7n+5) q^n (mod 7)
    VerifyThm1 {
        /// Coefficients to check (raised to the Sturm bound 25 if smaller)
        #[arg(short = 'T', long, default_value_t = 200, value_parser = clap::value_parser!(i64).range(1..))]
        terms: i64,
    },
    /// Certify E4(q^2) prod (1-q^n)^8 (1-q^2n)^2 == 8 sum Delta_5(11n+6) q^n (mod 11)
    VerifyThm2 {
        /// Coefficients to check (raised to the Sturm bound 61 if smaller)
        #[arg(short = 'T', long, default_value_t = 488, value_parser = clap::value_parser!(i64).range(1..))]
        terms: i64,
    },
    /// Verify lhs|U_p == rhs (mod M) for arbitrary eta-expressions
    Verify {
        /// Left side: a spec or a combination like "(spec) + 256*(spec)"
        lhs: String,
        /// Right side, same grammar
        rhs: String,
        /// Apply U_p to the left side first
        #[arg(short = 'p', long)]
        prime: Option<u64>,
        /// Modulus of the congruence
        #[arg(short = 'M', long, value_parser = clap::value_parser!(u64).range(2..))]
        modulus: u64,
        /// Weight entering the Sturm bound
        #[arg(short = 'k', long)]
        weight: i64,
        /// Level entering the Sturm bound
        #[arg(short = 'N', long)]
        level: u64,
        /// Coefficients to check (defaults to the Sturm bound)
        #[arg(short = 'T', long, value_parser = clap::value_parser!(i64).range(1..))]
        terms: Option<i64>,
    },
}

/// Parses argv, dispatches, prints, and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli.command, cli.format) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: &Command, format: OutputFormat) -> Result<i32, CongruenceError> {
    match cmd {
        Command::Expand { spec, terms } => {
            let eq: EtaQuotient = spec.parse()?;
            let series = eq.expand(*terms)?;
            print!("{}", render_expansion(spec, &series, format));
            Ok(0)
        }
        Command::CheckModularity { spec } => {
            let eq: EtaQuotient = spec.parse()?;
            print!("{}", render_report(&eq, &eq.holomorphy_report(), format));
            Ok(0)
        }
        Command::CuspOrders { spec } => {
            let eq: EtaQuotient = spec.parse()?;
            print!("{}", render_cusp_orders(&eq, &eq.holomorphy_report(), format));
            Ok(0)
        }
        Command::Sturm { weight, level } => {
            let sd = sturm_bound(*weight, *level)?;
            match format {
                OutputFormat::Text => println!("{sd}"),
                OutputFormat::Machine => println!("{}", sd.machine_lines()),
            }
            Ok(0)
        }
        Command::Delta { family, terms } => {
            let fam = BrokenDiamondFamily::new(*family, *terms)?;
            print!("{}", render_delta(&fam, format));
            Ok(0)
        }
        Command::VerifyThm1 { terms } => emit_certificate(&verify_theorem_1_1(*terms)?, format),
        Command::VerifyThm2 { terms } => emit_certificate(&verify_theorem_1_2(*terms)?, format),
        Command::Verify { lhs, rhs, prime, modulus, weight, level, terms } => {
            let cert = verify_general(lhs, rhs, *prime, *modulus, *weight, *level, *terms)?;
            emit_certificate(&cert, format)
        }
    }
}

fn emit_certificate(cert: &CongruenceCertificate, format: OutputFormat) -> Result<i32, CongruenceError> {
    match format {
        OutputFormat::Text => println!("{cert}"),
        OutputFormat::Machine => println!("{}", cert.machine_lines()),
    }
    Ok(if cert.verdict { 0 } else { 1 })
}

fn render_expansion(spec: &str, series: &TruncatedSeries, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            let _ = writeln!(
                out,
                "q-expansion of {} up to q^{}:",
                spec.trim(),
                series.truncation()
            );
            for n in series.lead()..=series.truncation() {
                let _ = writeln!(out, "{n}: {}", series.coeff(n).expect("within truncation"));
            }
        }
        OutputFormat::Machine => {
            let _ = writeln!(out, "spec={}", spec.trim());
            let _ = writeln!(out, "lead={}", series.lead());
            let _ = writeln!(out, "trunc={}", series.truncation());
            for n in series.lead()..=series.truncation() {
                let _ = writeln!(out, "c{n}={}", series.coeff(n).expect("within truncation"));
            }
        }
    }
    out
}

fn weight_text(weight_twice: i64) -> String {
    if weight_twice % 2 == 0 {
        format!("{}", weight_twice / 2)
    } else {
        format!("{weight_twice}/2")
    }
}

fn cusp_orders_line(report: &ModularityReport) -> String {
    report
        .cusp_orders
        .iter()
        .map(|(d, ord)| format!("{d}:{ord}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_report(eq: &EtaQuotient, report: &ModularityReport, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            let _ = writeln!(out, "eta-quotient {eq}");
            let _ = writeln!(out, "  weight:                {}", weight_text(report.weight_twice));
            let _ = writeln!(
                out,
                "  sum delta*r:           {} (divisible by 24: {})",
                report.sum_delta_r,
                yn(report.condition_24_a)
            );
            let _ = writeln!(
                out,
                "  sum (N/delta)*r:       {} (divisible by 24: {})",
                report.sum_level_over_delta_r,
                yn(report.condition_24_b)
            );
            let _ = writeln!(out, "  weight integral:       {}", yn(report.weight_integral));
            let _ = writeln!(
                out,
                "  character s:           {}/{}",
                report.s_numerator, report.s_denominator
            );
            match &report.character_squarefree {
                Some(sf) => {
                    let _ = writeln!(out, "  character discriminant squarefree part: {sf}");
                }
                None => {
                    let _ = writeln!(
                        out,
                        "  character discriminant: undefined (half-integral weight)"
                    );
                }
            }
            let _ = writeln!(out, "  cusp orders (by divisor d of the level):");
            for (d, ord) in &report.cusp_orders {
                let _ = writeln!(out, "    d={d}: {ord}");
            }
            let _ = writeln!(
                out,
                "  holomorphic at all cusps: {}",
                yn(report.holomorphic_at_all_cusps)
            );
        }
        OutputFormat::Machine => {
            let _ = writeln!(out, "weight_twice={}", report.weight_twice);
            let _ = writeln!(out, "sum_delta_r={}", report.sum_delta_r);
            let _ = writeln!(out, "sum_Nover_delta_r={}", report.sum_level_over_delta_r);
            let _ = writeln!(out, "condition_24_a={}", report.condition_24_a);
            let _ = writeln!(out, "condition_24_b={}", report.condition_24_b);
            let _ = writeln!(out, "weight_integral={}", report.weight_integral);
            let _ = writeln!(out, "s_numerator={}", report.s_numerator);
            let _ = writeln!(out, "s_denominator={}", report.s_denominator);
            let sf = match &report.character_squarefree {
                Some(sf) => sf.to_string(),
                None => "none".to_string(),
            };
            let _ = writeln!(out, "character_squarefree={sf}");
            let _ = writeln!(out, "cusp_orders={}", cusp_orders_line(report));
            let _ = writeln!(out, "holomorphic_at_all_cusps={}", report.holomorphic_at_all_cusps);
        }
    }
    out
}

fn render_cusp_orders(eq: &EtaQuotient, report: &ModularityReport, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            let _ = writeln!(out, "cusp orders of {eq} (by divisor d of the level):");
            for (d, ord) in &report.cusp_orders {
                let _ = writeln!(out, "d={d}: {ord}");
            }
        }
        OutputFormat::Machine => {
            let _ = writeln!(out, "level={}", eq.level());
            let _ = writeln!(out, "cusp_orders={}", cusp_orders_line(report));
        }
    }
    out
}

fn render_delta(fam: &BrokenDiamondFamily, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            let _ = writeln!(
                out,
                "broken {}-diamond partition numbers Delta_{}(n), n = 0..={}:",
                fam.k(),
                fam.k(),
                fam.truncation()
            );
            for n in 0..=fam.truncation() {
                let _ = writeln!(out, "{n}: {}", fam.delta_coeff(n).expect("within truncation"));
            }
        }
        OutputFormat::Machine => {
            let _ = writeln!(out, "family={}", fam.k());
            let _ = writeln!(out, "trunc={}", fam.truncation());
            for n in 0..=fam.truncation() {
                let _ = writeln!(out, "c{n}={}", fam.delta_coeff(n).expect("within truncation"));
            }
        }
    }
    out
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
