use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relz::bench::{bench_text, write_csv};
use relz::coder::decompress;
use relz::corpus::{gen_lower_bound, gen_markov, gen_repetitive, read_input};
use relz::entropy::audit;
use relz::parsing::write_dump;
use relz::relz::BYTES_PER_SYMBOL;
use relz::{
    encode, lz_parse, relz_parse, relz_recursive, rlz_pref_parse, verify_parsing, Encoder, Error,
    Parsing, RelzConfig, Text,
};

const DEFAULT_MEM_LIMIT: u64 = 4 << 30;

#[derive(Parser)]
#[command(
    name = "relz",
    version,
    about = "LZ77-like compression with a bounded prefix reference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file.
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        prefix: PrefixArgs,
        /// Recursion levels allowed when the metastring exceeds the budget.
        #[arg(long, default_value_t = relz::relz::DEFAULT_MAX_RECURSION)]
        max_recursion: usize,
        #[arg(long, value_enum, default_value_t = EncoderArg::Gamma)]
        encoder: EncoderArg,
    },
    /// Restore a file written by `compress`.
    Decompress { input: PathBuf, output: PathBuf },
    /// Parse a file and report phrase statistics.
    Parse {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Relz)]
        algo: Algo,
        #[arg(long)]
        ell: Option<usize>,
        /// Write the phrase dump here (`-` for standard output).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Entropy and encoded-size report.
    Analyze {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a synthetic input file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Ratio and speed over every file in a directory, as CSV.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 0.5, 1.0])]
        ell_fractions: Vec<f64>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PrefixArgs {
    /// Reference prefix length in symbols.
    #[arg(long, conflicts_with = "mem_limit")]
    ell: Option<usize>,
    /// Memory budget in bytes from which the prefix length is derived.
    #[arg(long)]
    mem_limit: Option<u64>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Adversarial family over the symbols 0, 1, 2 (raw bytes).
    Lowerbound {
        #[arg(long)]
        b: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded Markov text, one byte per symbol (sigma <= 256).
    Markov {
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        sigma: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        skew: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mutated copies of a random byte block.
    Repetitive {
        #[arg(long)]
        block_len: usize,
        #[arg(long)]
        copies: usize,
        #[arg(long, default_value_t = 0.001)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EncoderArg {
    Gamma,
    Delta,
    Fixed,
}

impl From<EncoderArg> for Encoder {
    fn from(e: EncoderArg) -> Self {
        match e {
            EncoderArg::Gamma => Encoder::Gamma,
            EncoderArg::Delta => Encoder::Delta,
            EncoderArg::Fixed => Encoder::Fixed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Lz,
    Rlzpref,
    Relz,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Structural { .. } => 1,
        Error::Io(_) => 2,
        Error::Corrupt { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relz: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> relz::Result<()> {
    match command {
        Command::Compress {
            input,
            output,
            prefix,
            max_recursion,
            encoder,
        } => compress(&input, &output, &prefix, max_recursion, encoder.into()),
        Command::Decompress { input, output } => {
            let blob = fs::read(&input)?;
            let text = decompress(&blob)?;
            let bytes = text.to_bytes().map_err(|_| Error::Corrupt {
                bit_offset: 0,
                reason: "decoded symbols do not fit in bytes".into(),
            })?;
            write_atomic(&output, &bytes)
        }
        Command::Parse {
            input,
            algo,
            ell,
            dump,
        } => parse(&input, algo, ell, dump.as_deref()),
        Command::Analyze {
            input,
            max_k,
            ell,
            json,
        } => analyze(&input, max_k, ell, json),
        Command::Gen { kind } => generate(kind),
        Command::Bench {
            corpus,
            ell_fractions,
            out,
        } => bench(&corpus, &ell_fractions, out.as_deref()),
    }
}

fn config(text: &Text, prefix: &PrefixArgs, max_recursion: usize) -> relz::Result<RelzConfig> {
    if let Some(ell) = prefix.ell {
        return Ok(RelzConfig::with_ell(ell).max_recursion(max_recursion));
    }
    let limit = prefix.mem_limit.unwrap_or(DEFAULT_MEM_LIMIT);
    let floor = text.sigma() * BYTES_PER_SYMBOL;
    if limit < floor {
        return Err(Error::Usage(format!(
            "--mem-limit {limit} is below {floor} bytes, the minimum for an alphabet of {}",
            text.sigma()
        )));
    }
    Ok(RelzConfig::with_budget(limit).max_recursion(max_recursion))
}

fn compress(
    input: &Path,
    output: &Path,
    prefix: &PrefixArgs,
    max_recursion: usize,
    encoder: Encoder,
) -> relz::Result<()> {
    let t0 = Instant::now();
    let text = read_input(input)?;
    let cfg = config(&text, prefix, max_recursion)?;
    let result = if prefix.ell.is_some() {
        relz_parse(&text, &cfg)?
    } else {
        relz_recursive(&text, &cfg)?
    };
    let blob = encode(&result.parsing, text.sigma(), encoder)?;
    write_atomic(output, &blob.to_bytes())?;
    let bits = blob.payload.len() as u64 * 8;
    eprintln!("n\t{}", text.len());
    eprintln!("ell\t{}", result.stats.levels.first().map_or(0, |l| l.ell));
    eprintln!("levels\t{}", result.stats.levels.len());
    eprintln!("zhat\t{}", result.stats.zhat);
    eprintln!("bits\t{bits}");
    eprintln!(
        "bpc\t{:.6}",
        if text.is_empty() {
            0.0
        } else {
            bits as f64 / text.len() as f64
        }
    );
    eprintln!("seconds\t{:.3}", t0.elapsed().as_secs_f64());
    Ok(())
}

/// Writes through a temporary file in the destination directory so that a
/// failure never leaves a partial output.
fn write_atomic(path: &Path, bytes: &[u8]) -> relz::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn parse(input: &Path, algo: Algo, ell: Option<usize>, dump: Option<&Path>) -> relz::Result<()> {
    let text = read_input(input)?;
    let parsing: Parsing = match (algo, ell) {
        (Algo::Lz, _) => lz_parse(&text),
        (Algo::Rlzpref, Some(ell)) => rlz_pref_parse(&text, ell)?,
        (Algo::Rlzpref, None) => return Err(Error::Usage("--algo rlzpref needs --ell".into())),
        (Algo::Relz, Some(ell)) => relz_parse(&text, &RelzConfig::with_ell(ell))?.parsing,
        (Algo::Relz, None) => {
            relz_recursive(&text, &RelzConfig::with_budget(DEFAULT_MEM_LIMIT))?.parsing
        }
    };
    if let Err(v) = verify_parsing(&parsing, &text) {
        return Err(Error::Structural {
            index: v.phrase,
            reason: v.to_string(),
        });
    }
    match dump {
        Some(p) if p == Path::new("-") => {
            write_dump(&parsing, BufWriter::new(io::stdout().lock()))?
        }
        Some(p) => write_dump(&parsing, BufWriter::new(fs::File::create(p)?))?,
        None => {}
    }
    eprintln!("n\t{}", text.len());
    eprintln!("phrases\t{}", parsing.len());
    if !parsing.is_empty() {
        eprintln!(
            "avg_phrase_len\t{:.3}",
            text.len() as f64 / parsing.len() as f64
        );
    }
    Ok(())
}

fn analyze(input: &Path, max_k: usize, ell: Option<usize>, json: bool) -> relz::Result<()> {
    let text = read_input(input)?;
    let parsing = match ell {
        Some(ell) => relz_parse(&text, &RelzConfig::with_ell(ell))?.parsing,
        None => relz_recursive(&text, &RelzConfig::with_budget(DEFAULT_MEM_LIMIT))?.parsing,
    };
    let report = audit(&text, &parsing, &Encoder::ALL, max_k)?.with_lz(lz_parse(&text).len());
    let mut out = io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(())
}

fn generate(kind: GenKind) -> relz::Result<()> {
    let (text, out) = match kind {
        GenKind::Lowerbound { b, out } => {
            let (text, ell) = gen_lower_bound(b)?;
            eprintln!("ell\t{ell}");
            (text, out)
        }
        GenKind::Markov {
            order,
            sigma,
            n,
            seed,
            skew,
            out,
        } => {
            if sigma > 256 {
                return Err(Error::Usage(format!(
                    "--sigma {sigma} does not fit in bytes"
                )));
            }
            (gen_markov(order, sigma, n, seed, skew)?, out)
        }
        GenKind::Repetitive {
            block_len,
            copies,
            mutation_rate,
            seed,
            out,
        } => (gen_repetitive(block_len, copies, mutation_rate, seed)?, out),
    };
    eprintln!("n\t{}", text.len());
    write_atomic(&out, &text.to_bytes()?)
}

fn bench(corpus: &Path, fractions: &[f64], out: Option<&Path>) -> relz::Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.is_file());
    files.sort();
    let mut rows = Vec::new();
    for path in &files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        rows.extend(bench_text(&name, &read_input(path)?, fractions)?);
    }
    match out {
        Some(p) => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write_atomic(p, &buf)
        }
        None => Ok(write_csv(&rows, BufWriter::new(io::stdout().lock()))?),
    }
}
