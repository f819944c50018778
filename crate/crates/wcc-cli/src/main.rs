//! `wcc` — command-line surface over the weakly constrained code library.
//!
//! One command per process. Reports are line-oriented `key value` text with
//! units spelled out in the key; artifacts embed the graph hash; seeds
//! default to 0 and are echoed. Exit codes: 0 success, 1 domain error, 2
//! usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wcc::bounds::{bounds_report, ec_size_bound};
use wcc::concat::{
    concat_decode, concat_encode, scale_plan, substitution_channel, ConcatParams,
};
use wcc::counting::{pool_rate, pool_size_bound};
use wcc::expurgate::{
    build_bad_pair_graph, expurgate_greedy, expurgate_randomized, verify_min_distance,
    ExpurgationMode,
};
use wcc::formats::{
    format_rational, parse_chain_file, parse_manifest, parse_payload, parse_rational,
    read_codebook, read_ec_codebook, render_payload, write_chain_file, write_codebook,
    write_ec_codebook, write_manifest, CatManifest,
};
use wcc::graph::{parse_graph, validate_graph, LabeledGraph};
use wcc::ldp::{asymptotic_rates, build_product_chain};
use wcc::markov::{maxentropic_chain, quantize_n_integral, spectral_gaps, MarkovChain};
use wcc::pool::{
    enumerate_pool, is_admissible_prefix, sample_codeword, verify_weak_constraint, PoolSpec, Walk,
};
use wcc::{rational_to_f64, Rational};

const K_MAX: usize = 32;

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

#[derive(Parser)]
#[command(name = "wcc", version, about = "Weakly constrained code toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArg {
    /// Path to the graph file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct ChainArg {
    /// Path to a chain file, or `maxentropic`.
    #[arg(long, default_value = "maxentropic")]
    chain: String,
}

#[derive(Args)]
struct SpecArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    chain: ChainArg,
    /// Blocklength n.
    #[arg(long)]
    n: u64,
    /// Prefix fraction α as num/den.
    #[arg(long, value_parser = rational_arg)]
    alpha: Rational,
    /// Typicality tolerance ζ as num/den.
    #[arg(long, value_parser = rational_arg)]
    zeta: Rational,
    /// Root vertex name.
    #[arg(long)]
    root: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural report and capacity of a graph.
    Analyze { graph: PathBuf },
    /// Emit the maxentropic chain of a graph.
    Capacity {
        graph: PathBuf,
        /// Write the chain file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round a chain to an n-integral chain.
    Quantize {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pool codebook operations.
    Pool {
        #[command(subcommand)]
        cmd: PoolCmd,
    },
    /// Reliability, distance, and rate bounds.
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCmd,
    },
    /// Extract a minimum-distance subcode from a codebook.
    Expurgate {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        chain: ChainArg,
        /// Input `wccpool` codebook.
        #[arg(long)]
        codebook: PathBuf,
        /// Distance slack ε as num/den.
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        /// Use the deterministic greedy expurgation.
        #[arg(long)]
        greedy: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concatenated-codec operations.
    Concat {
        #[command(subcommand)]
        cmd: ConcatCmd,
    },
    /// Substitution-channel Monte Carlo over a concatenated code.
    Simulate {
        #[command(flatten)]
        graph: GraphArg,
        /// `wcccat` manifest path.
        #[arg(long)]
        manifest: PathBuf,
        /// Substitution probability as num/den.
        #[arg(long, value_parser = rational_arg)]
        p: Rational,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PoolCmd {
    /// Enumerate the pool and write a codebook.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
        /// Abort if the pool exceeds this many codewords.
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify every codeword of a codebook.
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        codebook: PathBuf,
    },
    /// Pool-size bound and rate report.
    Rate {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Draw one codeword by rejection sampling.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Finite-blocklength bounds (mass, distance failure, code size).
    Finite {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
    },
    /// Asymptotic achievable rates via the large-deviation program.
    Asymptotic {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
    },
}

#[derive(Subcommand)]
enum ConcatCmd {
    /// Build a manifest from an inner codebook; optionally report scaling.
    Plan {
        #[command(flatten)]
        graph: GraphArg,
        /// Inner `wccec` codebook.
        #[arg(long)]
        inner: PathBuf,
        /// Outer RS dimension K.
        #[arg(long)]
        k: usize,
        /// Blocklength constant in n ≈ c0 log2 N_con.
        #[arg(long, default_value_t = 2.0)]
        c0: f64,
        /// Target concatenated blocklength for the scale report.
        #[arg(long)]
        target: Option<u64>,
        #[command(flatten)]
        chain: ChainArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message through the concatenated code.
    Encode {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        manifest: PathBuf,
        /// Space-separated field symbols, K of them.
        #[arg(long)]
        message: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a received symbol stream.
    Decode {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        manifest: PathBuf,
        /// File holding the received symbol stream.
        #[arg(long)]
        payload: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // library code is single-threaded; the cap is accepted for compatibility
    let _threads = std::env::var("WCC_THREADS").ok();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_graph(&text)?)
}

fn load_chain(graph: &LabeledGraph, chain: &str) -> Result<MarkovChain> {
    if chain == "maxentropic" {
        Ok(maxentropic_chain(graph)?.0)
    } else {
        let text = fs::read_to_string(chain).with_context(|| format!("reading {chain}"))?;
        Ok(parse_chain_file(&text, graph)?)
    }
}

fn build_spec(args: &SpecArgs) -> Result<PoolSpec> {
    let graph = load_graph(&args.graph.graph)?;
    let chain = load_chain(&graph, &args.chain.chain)?;
    let root = graph
        .vertex_index(&args.root)
        .ok_or_else(|| anyhow!("unknown root vertex {}", args.root))?;
    let ic = quantize_n_integral(&chain, args.n)?;
    Ok(PoolSpec::new(
        ic,
        args.alpha.clone(),
        args.zeta.clone(),
        root,
    )?)
}

fn emit(out: &Option<PathBuf>, content: &str, what: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {what} to {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Exact pool generation mass: sum of prefix probabilities from the root.
fn pool_mass(spec: &PoolSpec, pool: &[wcc::Codeword]) -> Result<Rational> {
    let mut mass = Rational::new(0.into(), 1.into());
    for c in pool {
        let w = Walk::from_labels(spec.graph(), c.root(), c.prefix_labels())?;
        mass += w.probability(spec.chain());
    }
    Ok(mass)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Analyze { graph } => {
            let g = load_graph(&graph)?;
            let report = validate_graph(&g);
            println!("vertices {}", g.vertex_count());
            println!("edges {}", g.edge_count());
            println!("deterministic {}", report.deterministic);
            println!("irreducible {}", report.irreducible);
            println!("aperiodic {}", report.aperiodic);
            println!("primitive {}", report.primitive);
            println!("balanced {}", report.balanced);
            println!("eulerian_cycle_exists {}", report.eulerian_cycle_exists);
            println!("graphhash {}", g.content_hash());
            if report.irreducible {
                let (_, capacity) = maxentropic_chain(&g)?;
                println!("capacity_bits {capacity}");
            }
            println!(
                "ok analyze: {} vertices, {} edges, irreducible {}",
                g.vertex_count(),
                g.edge_count(),
                report.irreducible
            );
        }
        Cmd::Capacity { graph, out } => {
            let g = load_graph(&graph)?;
            let (chain, capacity) = maxentropic_chain(&g)?;
            emit(&out, &write_chain_file(&chain), "maxentropic chain")?;
            println!("capacity_bits {capacity}");
            println!("entropy_rate_bits {}", chain.entropy_rate());
            println!("ok capacity {capacity}");
        }
        Cmd::Quantize {
            graph,
            chain,
            n,
            out,
        } => {
            let g = load_graph(&graph.graph)?;
            let c = load_chain(&g, &chain.chain)?;
            let ic = quantize_n_integral(&c, n)?;
            emit(&out, &write_chain_file(ic.parent()), "quantized chain")?;
            println!("n {n}");
            println!("max_deviation {}", format_rational(&ic.max_deviation()));
            println!("ok quantize n={n}");
        }
        Cmd::Pool { cmd } => run_pool(cmd)?,
        Cmd::Bounds { cmd } => run_bounds(cmd)?,
        Cmd::Expurgate {
            graph,
            chain,
            codebook,
            eps,
            greedy,
            seed,
            out,
        } => {
            let g = load_graph(&graph.graph)?;
            let c = load_chain(&g, &chain.chain)?;
            let text = fs::read_to_string(&codebook)
                .with_context(|| format!("reading {}", codebook.display()))?;
            let (header, pool) = read_codebook(&text, &g)?;
            let root = g
                .vertex_index(&header.root)
                .ok_or_else(|| anyhow!("unknown root vertex {}", header.root))?;
            let ic = quantize_n_integral(&c, header.n)?;
            let spec = PoolSpec::new(ic, header.alpha.clone(), header.zeta.clone(), root)?;
            let bad = build_bad_pair_graph(&spec, &pool, &eps)?;
            let code = if greedy {
                expurgate_greedy(&bad, &pool)
            } else {
                let mass = rational_to_f64(&pool_mass(&spec, &pool)?);
                let pc = build_product_chain(spec.chain());
                let pgaps = pc.gaps(K_MAX);
                let pi_prod = rational_to_f64(&pc.root_mass(root));
                let p_fail = wcc::bounds::p_fail_bound(
                    &spec,
                    rational_to_f64(&eps),
                    &pgaps,
                    pi_prod,
                )?;
                let ec = ec_size_bound(&spec, (pool.len() as f64).log2(), p_fail.value, mass);
                expurgate_randomized(&bad, &pool, mass, ec.p_fail_eff, seed)
            };
            println!("seed {seed}");
            println!("eps {}", format_rational(&eps));
            println!("bad_pairs {}", bad.edges().len());
            println!("kept {}", code.len());
            println!("clamped {}", code.clamped);
            if let ExpurgationMode::Randomized { z, .. } = code.mode() {
                println!("z {z}");
            }
            let (prefix_min, full_min) = verify_min_distance(&code, &spec);
            if let Some(d) = prefix_min {
                println!("min_prefix_distance {}", format_rational(&d));
            }
            if let Some(d) = full_min {
                println!("min_full_distance {}", format_rational(&d));
            }
            emit(
                &out,
                &write_ec_codebook(&spec, &code, &eps),
                "expurgated codebook",
            )?;
            println!("ok expurgate kept {} of {}", code.len(), pool.len());
        }
        Cmd::Concat { cmd } => run_concat(cmd)?,
        Cmd::Simulate {
            graph,
            manifest,
            p,
            trials,
            seed,
        } => run_simulate(&graph.graph, &manifest, &p, trials, seed)?,
    }
    Ok(())
}

fn run_pool(cmd: PoolCmd) -> Result<()> {
    match cmd {
        PoolCmd::Build { spec, limit, out } => {
            let s = build_spec(&spec)?;
            let pool = enumerate_pool(&s, limit)?;
            emit(&out, &write_codebook(&s, &pool), "codebook")?;
            println!("codewords {}", pool.len());
            println!("ok pool build: {} codewords", pool.len());
        }
        PoolCmd::Verify {
            graph,
            chain,
            codebook,
        } => {
            let g = load_graph(&graph.graph)?;
            let c = load_chain(&g, &chain.chain)?;
            let text = fs::read_to_string(&codebook)
                .with_context(|| format!("reading {}", codebook.display()))?;
            let (header, pool) = read_codebook(&text, &g)?;
            let root = g
                .vertex_index(&header.root)
                .ok_or_else(|| anyhow!("unknown root vertex {}", header.root))?;
            let ic = quantize_n_integral(&c, header.n)?;
            let spec = PoolSpec::new(ic, header.alpha.clone(), header.zeta.clone(), root)?;
            for (i, cw) in pool.iter().enumerate() {
                if !verify_weak_constraint(cw, spec.ichain()) {
                    bail!("codeword {i} violates the weak constraint");
                }
                let w = Walk::from_labels(spec.graph(), cw.root(), cw.prefix_labels())?;
                let adm = is_admissible_prefix(&w, &spec)?;
                if !adm.admissible {
                    bail!("codeword {i} has an inadmissible prefix");
                }
            }
            println!("codewords {}", pool.len());
            println!("ok pool verify: {} codewords valid", pool.len());
        }
        PoolCmd::Rate { spec } => {
            let s = build_spec(&spec)?;
            let bound = pool_size_bound(&s)?;
            let rate = pool_rate(&s)?;
            println!("term_entropy_bits {}", bound.term_entropy);
            println!("term_stirling_bits {}", bound.term_stirling);
            println!("term_delta_bits {}", bound.term_delta);
            println!("term_terminal_bits {}", bound.term_terminal);
            println!("log2_pool_size_lower_bits {}", bound.log2_lower);
            println!("r_pool_lower_bits {}", rate.r_pool_lower);
            println!("alpha_entropy_bits {}", rate.alpha_entropy);
            println!("entropy_rate_bits {}", rate.entropy);
            println!("capacity_bits {}", rate.capacity);
            println!("ok pool rate: R_pool >= {}", rate.r_pool_lower);
        }
        PoolCmd::Sample { spec, seed } => {
            let s = build_spec(&spec)?;
            let (cw, rejections) = sample_codeword(&s, seed)?;
            println!("seed {seed}");
            println!("rejections {rejections}");
            println!("codeword {}", render_payload(cw.labels(), s.graph()));
            println!("ok pool sample after {rejections} rejections");
        }
    }
    Ok(())
}

fn run_bounds(cmd: BoundsCmd) -> Result<()> {
    match cmd {
        BoundsCmd::Finite { spec, eps } => {
            let s = build_spec(&spec)?;
            let gaps = spectral_gaps(s.chain(), K_MAX);
            let pc = build_product_chain(s.chain());
            let pgaps = pc.gaps(K_MAX);
            let pi_prod = rational_to_f64(&pc.root_mass(s.v_root()));
            let pool_log2 = pool_size_bound(&s)?.log2_lower;
            let report = bounds_report(
                &s,
                rational_to_f64(&eps),
                &gaps,
                &pgaps,
                pi_prod,
                pool_log2,
            )?;
            println!("seed 0");
            println!("collision_prob {}", report.s);
            println!("expected_rel_distance {}", report.expected_rel_distance);
            println!("eta_typ_nats {}", report.eta_typ);
            println!("pool_mass_lower_prob {}", report.pool_mass_lower.value);
            println!("pool_mass_clamped {}", report.pool_mass_lower.clamped);
            println!("p_fail_prob {}", report.p_fail.value);
            println!("p_max_upper_prob {}", report.p_max_upper.value);
            println!("p_fail_eff_prob {}", report.p_fail_eff);
            println!("ec_size_lower {:e}", report.ec_size_lower);
            println!("ok bounds finite: |C_ec| >= {:e}", report.ec_size_lower);
        }
        BoundsCmd::Asymptotic { spec, eps } => {
            let s = build_spec(&spec)?;
            let zeta = rational_to_f64(s.zeta());
            let rates = asymptotic_rates(&s, rational_to_f64(&eps), zeta)?;
            println!("rate_r1_bits {}", rates.r1);
            println!("rate_r2_bits {}", rates.r2);
            println!("rate_ec_bits {}", rates.r_ec);
            println!("delta_rel_distance {}", rates.delta);
            println!("delta_prime_rel_distance {}", rates.delta_prime);
            println!("sup_entropy_bits {}", rates.sup_h);
            println!("zeta_constant_bits {}", rates.zeta_constant);
            println!("ok bounds asymptotic: R_ec = {}", rates.r_ec);
        }
    }
    Ok(())
}

fn load_concat(
    graph_path: &Path,
    manifest_path: &Path,
) -> Result<(LabeledGraph, CatManifest, ConcatParams)> {
    let g = load_graph(graph_path)?;
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let m = parse_manifest(&text)?;
    if m.graphhash != g.content_hash() {
        bail!(
            "manifest graph hash {} does not match graph {}",
            m.graphhash,
            g.content_hash()
        );
    }
    let inner_path = manifest_path
        .parent()
        .unwrap_or(Path::new("."))
        .join(&m.inner);
    let inner_text = fs::read_to_string(&inner_path)
        .with_context(|| format!("reading inner codebook {}", inner_path.display()))?;
    let (_, _, _, codewords) = read_ec_codebook(&inner_text, &g)?;
    let params = ConcatParams::from_inner(&codewords, m.k, m.c0)?;
    if params.q() != m.q {
        bail!("manifest q {} disagrees with inner table ({})", m.q, params.q());
    }
    if params.primitive_element() != m.g {
        bail!(
            "manifest g {} disagrees with computed primitive element {}",
            m.g,
            params.primitive_element()
        );
    }
    Ok((g, m, params))
}

fn run_concat(cmd: ConcatCmd) -> Result<()> {
    match cmd {
        ConcatCmd::Plan {
            graph,
            inner,
            k,
            c0,
            target,
            chain,
            out,
        } => {
            let g = load_graph(&graph.graph)?;
            let inner_text = fs::read_to_string(&inner)
                .with_context(|| format!("reading {}", inner.display()))?;
            let (_, _, _, codewords) = read_ec_codebook(&inner_text, &g)?;
            let params = ConcatParams::from_inner(&codewords, k, c0)?;
            let manifest = CatManifest {
                q: params.q(),
                k,
                c0,
                inner: inner.display().to_string(),
                g: params.primitive_element(),
                graphhash: g.content_hash(),
            };
            println!("q {}", params.q());
            println!("k {}", params.k());
            println!("g {}", params.primitive_element());
            println!("n_inner {}", params.n_inner());
            println!("d_in {}", params.d_in());
            println!("n_out {}", params.n_out());
            println!("d_out {}", params.d_out());
            println!("n_con {}", params.n_con());
            println!("d_con {}", params.d_con());
            println!("r_in_bits {}", params.r_in());
            println!("r_in_prime_bits {}", params.r_in_prime());
            println!("r_out {}", format_rational(&params.r_out()));
            println!("r_con_bits {}", params.r_con());
            if let Some(target) = target {
                let c = load_chain(&g, &chain.chain)?;
                let plan = scale_plan(target, c0, &c, params.r_in())?;
                println!("scale_target {}", plan.target);
                println!("scale_n {}", plan.n);
                println!("scale_n_out {}", plan.n_out);
                println!("scale_q_bound_log2_bits {}", plan.q_bound_log2);
            }
            emit(&out, &write_manifest(&manifest), "manifest")?;
            println!("ok concat plan: q={} D_con={}", params.q(), params.d_con());
        }
        ConcatCmd::Encode {
            graph,
            manifest,
            message,
            out,
        } => {
            let (g, _, params) = load_concat(&graph.graph, &manifest)?;
            let msg: Vec<u64> = message
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| anyhow!("bad message symbol {t}")))
                .collect::<Result<_>>()?;
            let labels = concat_encode(&msg, &params)?;
            let payload = format!("{}\n", render_payload(&labels, &g));
            emit(&out, &payload, "payload")?;
            println!("ok concat encode: {} symbols", labels.len());
        }
        ConcatCmd::Decode {
            graph,
            manifest,
            payload,
        } => {
            let (g, _, params) = load_concat(&graph.graph, &manifest)?;
            let text = fs::read_to_string(&payload)
                .with_context(|| format!("reading {}", payload.display()))?;
            let labels = parse_payload(text.trim(), &g)?;
            let msg = concat_decode(&labels, &params)?;
            let rendered: Vec<String> = msg.iter().map(|s| s.to_string()).collect();
            println!("message {}", rendered.join(" "));
            println!("ok concat decode: {} symbols", msg.len());
        }
    }
    Ok(())
}

fn run_simulate(
    graph: &Path,
    manifest: &Path,
    p: &Rational,
    trials: u64,
    seed: u64,
) -> Result<()> {
    if trials == 0 {
        bail!("trials must be >= 1");
    }
    let (g, _, params) = load_concat(graph, manifest)?;
    let p = rational_to_f64(p);
    if !(0.0..=1.0).contains(&p) {
        bail!("p = {p} outside [0, 1]");
    }
    let alphabet = g.alphabet().len();
    let q = params.q();
    let t_out = (params.d_out() - 1) / 2;
    let half_d_in = params.d_in().div_ceil(2);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut message_errors = 0u64;
    let mut guaranteed = 0u64;
    let mut guaranteed_errors = 0u64;
    let mut histogram = vec![0u64; params.n_out() + 1];
    for _ in 0..trials {
        let msg: Vec<u64> = (0..params.k()).map(|_| rng.gen_range(0..q)).collect();
        let clean = concat_encode(&msg, &params)?;
        let mut word = clean.clone();
        substitution_channel(&mut word, p, alphabet, &mut rng);
        // blocks corrupted beyond the inner decoding radius
        let heavy_blocks = word
            .chunks(params.n_inner())
            .zip(clean.chunks(params.n_inner()))
            .filter(|(w, c)| {
                w.iter().zip(c.iter()).filter(|(a, b)| a != b).count() >= half_d_in
            })
            .count();
        histogram[heavy_blocks] += 1;
        let in_region = heavy_blocks <= t_out;
        if in_region {
            guaranteed += 1;
        }
        let failed = match concat_decode(&word, &params) {
            Ok(m) => m != msg,
            Err(_) => true,
        };
        if failed {
            message_errors += 1;
            if in_region {
                guaranteed_errors += 1;
            }
        }
    }
    println!("seed {seed}");
    println!("trials {trials}");
    println!("p_prob {p}");
    println!(
        "message_error_rate {}",
        message_errors as f64 / trials as f64
    );
    println!("guaranteed_region_trials {guaranteed}");
    println!("guaranteed_region_errors {guaranteed_errors}");
    for (k, &count) in histogram.iter().enumerate() {
        if count > 0 {
            println!("heavy_blocks_{k}_count {count}");
        }
    }
    if guaranteed_errors > 0 {
        bail!("decoder failed inside the guaranteed-correctable region");
    }
    println!(
        "ok simulate: {message_errors} errors in {trials} trials"
    );
    Ok(())
}
