//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ispa::acoustic::{
    encode_tokens, octave_center_hz, parse_tokens, synthesize, transcribe_a, AcousticConfig, Bandwidth, IspaAToken,
    LengthClass, Slope,
};
use ispa::audio::Waveform;
use ispa::dsp::FeatureSequence;
use ispa::eval::{evaluate, tokens_per_second, ClassifierConfig, Split, SplitDocuments, TokenDocument};
use ispa::feature::{mfcc_features, solve_assignment, train_codebook, transcribe_f, Codebook, KMeansConfig, Variant};
use ispa::segment::{brute_force_segment, total_cost, viterbi_segment, CostModel, SegmentationConfig};

const SR: u32 = 16_000;

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<f64>, Check); 10] = [
        (1, "raw token rate", Some(10.0), raw_token_rate),
        (2, "seg shorter than raw", None, seg_shorter_than_raw),
        (3, "700 Hz worked example", Some(1.0), worked_example),
        (4, "segmentation optimality", Some(5.0), dp_optimality),
        (5, "assignment optimality", Some(5.0), assignment_optimality),
        (6, "grammar round-trip", None, grammar_round_trip),
        (7, "synthesis round-trip", Some(60.0), synthesis_round_trip),
        (8, "k-means", None, kmeans_properties),
        (9, "classification smoke", Some(180.0), classification_smoke),
        (10, "acoustic invariances", None, invariances),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(detail), Some(limit)) if elapsed > Duration::from_secs_f64(limit) => {
                Err(format!("{detail}; over the {limit} s budget"))
            }
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {n:>2} [{name}] {status} ({:.2}s) {detail}",
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wave(samples: Vec<f64>) -> Waveform {
    Waveform::new(samples, SR).unwrap()
}

/// Exponential sweep from `f0` to `f1`.
fn chirp(f0: f64, f1: f64, seconds: f64, amp: f64) -> Waveform {
    let n = (seconds * SR as f64).round() as usize;
    let k = (f1 / f0).ln() / seconds;
    wave(
        (0..n)
            .map(|i| {
                let t = i as f64 / SR as f64;
                let phase = if k == 0.0 {
                    2.0 * PI * f0 * t
                } else {
                    2.0 * PI * f0 * ((k * t).exp() - 1.0) / k
                };
                amp * phase.sin()
            })
            .collect(),
    )
}

fn tone(freq: f64, seconds: f64, amp: f64) -> Waveform {
    chirp(freq, freq, seconds, amp)
}

fn noise(seconds: f64, amp: f64, rng: &mut ChaCha8Rng) -> Waveform {
    let n = (seconds * SR as f64).round() as usize;
    wave((0..n).map(|_| amp * rng.gen_range(-1.0..1.0)).collect())
}

// ---------------------------------------------------------------------------
// 1, 2: token rates

/// About 65 s of tones, sweeps, noise and gaps.
fn rate_corpus() -> Vec<Waveform> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..25)
        .map(|i| {
            let seconds = 2.6;
            match i % 4 {
                0 => tone(rng.gen_range(150.0..3000.0), seconds, 0.3),
                1 => {
                    let f0 = rng.gen_range(200.0..1500.0);
                    chirp(f0, f0 * rng.gen_range(0.5..2.0), seconds, 0.3)
                }
                2 => noise(seconds, 0.2, &mut rng),
                _ => tone(rng.gen_range(300.0..900.0), 1.3, 0.3)
                    .concat(&Waveform::silence(1.3, SR))
                    .unwrap(),
            }
        })
        .collect()
}

struct RateSetup {
    seconds: f64,
    features: Vec<FeatureSequence>,
    codebook: Codebook,
}

fn rate_setup() -> Result<RateSetup, String> {
    let corpus = rate_corpus();
    let seconds: f64 = corpus.iter().map(Waveform::duration_seconds).sum();
    let features = corpus
        .iter()
        .map(|w| mfcc_features(w, 0.02, 40))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let codebook = train_codebook(&features, &KMeansConfig::default(), "mfcc40")
        .map_err(|e| e.to_string())?
        .codebook;
    Ok(RateSetup {
        seconds,
        features,
        codebook,
    })
}

fn rate(setup: &RateSetup, variant: Variant, lambda: f64) -> Result<f64, String> {
    let mut docs = Vec::new();
    for (fs, w) in setup.features.iter().zip(rate_corpus()) {
        let tokens = transcribe_f(fs, &setup.codebook, variant, lambda).map_err(|e| e.to_string())?;
        docs.push(TokenDocument::new(tokens, w.duration_seconds(), None).unwrap());
    }
    tokens_per_second(&docs).map_err(|e| e.to_string())
}

fn raw_token_rate() -> Result<String, String> {
    let setup = rate_setup()?;
    ensure(setup.seconds >= 60.0, || format!("corpus only {:.1} s", setup.seconds))?;
    let r = rate(&setup, Variant::Raw, 0.0)?;
    ensure((r - 50.0).abs() <= 0.5, || format!("raw rate {r:.3} tok/s"))?;
    Ok(format!("{r:.3} tok/s over {:.1} s", setup.seconds))
}

fn seg_shorter_than_raw() -> Result<String, String> {
    let setup = rate_setup()?;
    let raw = rate(&setup, Variant::Raw, 0.0)?;
    let mut rates = Vec::new();
    for lambda in [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
        let seg = rate(&setup, Variant::Seg, lambda)?;
        ensure(seg < raw, || format!("lambda {lambda}: seg {seg:.3} >= raw {raw:.3}"))?;
        rates.push(format!("{lambda}:{seg:.2}"));
    }
    Ok(format!("raw {raw:.2}; seg {}", rates.join(" ")))
}

// ---------------------------------------------------------------------------
// 3

fn worked_example() -> Result<String, String> {
    let tokens = transcribe_a(&tone(700.0, 2.0, 0.5), &AcousticConfig::default()).map_err(|e| e.to_string())?;
    let text = encode_tokens(&tokens);
    ensure(text == "N5/2=", || format!("got {text:?}"))?;
    Ok(text)
}

// ---------------------------------------------------------------------------
// 4

/// Random distances per (start, len, label).
struct TableModel {
    n_labels: usize,
    max_len: usize,
    table: Vec<f64>,
}

impl TableModel {
    fn distance(&self, start: usize, len: usize, label: usize) -> f64 {
        self.table[(start * (self.max_len + 1) + len) * self.n_labels + label]
    }
}

impl CostModel for TableModel {
    type Label = usize;

    fn segment_cost(&self, start: usize, len: usize) -> (usize, f64) {
        let mut best = (0, self.distance(start, len, 0));
        for l in 1..self.n_labels {
            let d = self.distance(start, len, l);
            if d < best.1 {
                best = (l, d);
            }
        }
        best
    }
}

fn lp(len: usize) -> f64 {
    1.0 / (1.0 + (len as f64).ln())
}

/// Minimum total cost over every tiling of `n` frames; a trailing span that
/// cannot be tiled is charged as one segment, as the segmenter does.
fn oracle_cost(model: &TableModel, n: usize, lengths: &[usize], lambda: f64) -> f64 {
    fn go(model: &TableModel, n: usize, pos: usize, acc: f64, lengths: &[usize], lambda: f64, best: &mut f64) {
        if pos == n {
            *best = best.min(acc);
            return;
        }
        for &l in lengths.iter().filter(|&&l| pos + l <= n) {
            let d = model.segment_cost(pos, l).1;
            go(model, n, pos + l, acc + (d + lambda * lp(l)), lengths, lambda, best);
        }
    }
    let tileable = |m: usize| -> bool {
        let mut reach = vec![false; m + 1];
        reach[0] = true;
        for t in 1..=m {
            reach[t] = lengths.iter().any(|&l| l <= t && reach[t - l]);
        }
        reach[m]
    };
    let tiled = (0..=n).rev().find(|&m| tileable(m)).unwrap();
    let mut best = f64::INFINITY;
    go(model, tiled, 0, 0.0, lengths, lambda, &mut best);
    if tiled == 0 {
        best = 0.0;
    }
    if tiled < n {
        let len = n - tiled;
        best += model.segment_cost(tiled, len).1 + lambda * lp(len);
    }
    best
}

fn dp_optimality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut padded = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=12);
        let max_len = 6;
        let mut lengths: Vec<usize> = (1..=max_len).filter(|_| rng.gen_bool(0.5)).collect();
        if lengths.is_empty() {
            lengths.push(rng.gen_range(1..=max_len));
        }
        let lambda = rng.gen_range(0.0..6.0);
        let n_labels = rng.gen_range(1..=3);
        let model = TableModel {
            n_labels,
            max_len: n,
            table: (0..(n + 1) * (n + 1) * n_labels)
                .map(|_| rng.gen_range(0.0..10.0))
                .collect(),
        };
        let lengths: Vec<usize> = lengths.into_iter().filter(|&l| l <= n).collect();
        let lengths = if lengths.is_empty() { vec![1] } else { lengths };
        let config = SegmentationConfig::new(lambda, lengths.clone()).map_err(|e| e.to_string())?;

        let dp = viterbi_segment(n, &model, &config).map_err(|e| e.to_string())?;
        let bf = brute_force_segment(n, &model, &config).map_err(|e| e.to_string())?;
        let (dp_cost, bf_cost) = (total_cost(&dp), total_cost(&bf));
        let oracle = oracle_cost(&model, n, &lengths, lambda);
        ensure(dp_cost == bf_cost && dp_cost == oracle, || {
            format!("case {case}: viterbi {dp_cost} brute force {bf_cost} oracle {oracle}")
        })?;
        ensure(dp == bf, || {
            format!("case {case}: segmentations differ\n{dp:?}\n{bf:?}")
        })?;
        let covered: usize = dp.iter().map(|s| s.len()).sum();
        ensure(covered == n, || format!("case {case}: covers {covered} of {n} frames"))?;
        padded += dp.iter().any(|s| s.padded) as usize;
    }
    Ok(format!("200 instances, {padded} with a padded tail"))
}

// ---------------------------------------------------------------------------
// 5

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Best total over injective row-to-column maps, summed in row order.
fn brute_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let (rows, cols) = (cost.len(), cost[0].len());
    let mut perms = Vec::new();
    permutations(&mut (0..cols).collect(), 0, &mut perms);
    let mut best = (f64::INFINITY, Vec::new());
    for p in perms {
        let pick = &p[..rows];
        let total = (0..rows).fold(0.0, |acc, r| acc + cost[r][pick[r]]);
        if total < best.0 {
            best = (total, pick.to_vec());
        }
    }
    best
}

fn assignment_optimality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shapes = std::iter::repeat_n((6, 6), 100).chain(std::iter::repeat_n((2, 4), 50));
    let mut count = 0;
    for (rows, cols) in shapes {
        let cost: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-5.0..20.0)).collect())
            .collect();
        let got = solve_assignment(&cost).map_err(|e| e.to_string())?;
        let (total, cols_of) = brute_assignment(&cost);
        let got_cols: Vec<usize> = got.row_to_col.iter().map(|c| c.unwrap_or(usize::MAX)).collect();
        ensure(got.total == total && got_cols == cols_of, || {
            format!(
                "{rows}x{cols}: solver {} {:?}, brute force {total} {cols_of:?}",
                got.total, got_cols
            )
        })?;
        count += 1;
    }
    Ok(format!("{count} matrices"))
}

// ---------------------------------------------------------------------------
// 6

fn random_token(rng: &mut ChaCha8Rng) -> IspaAToken {
    let length = *LengthClass::ALL.choose(rng).unwrap();
    if rng.gen_bool(0.2) {
        IspaAToken::Rest { length }
    } else {
        IspaAToken::Pitched {
            bandwidth: *Bandwidth::ALL.choose(rng).unwrap(),
            octave: rng.gen_range(0..=9),
            length,
            slope: Slope::new(rng.gen_range(-3..=3)).unwrap(),
        }
    }
}

fn grammar_round_trip() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut texts = Vec::new();
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let tokens: Vec<IspaAToken> = (0..n).map(|_| random_token(&mut rng)).collect();
        let text = encode_tokens(&tokens);
        let parsed = parse_tokens(&text).map_err(|e| format!("{text:?}: {e}"))?;
        ensure(parsed == tokens, || format!("parse(encode) differs for {text:?}"))?;
        ensure(encode_tokens(&parsed) == text, || {
            format!("encode(parse) differs for {text:?}")
        })?;
        texts.push(text);
    }

    let alien = ['q', '#', '!', 'y', '%'];
    for text in &texts[..1_000] {
        let bad = *alien.choose(&mut rng).unwrap();
        let at = rng.gen_range(0..text.len());
        let mut mutated = text.clone();
        if rng.gen_bool(0.5) {
            mutated.replace_range(at..at + 1, &bad.to_string());
        } else {
            mutated.insert(at, bad);
        }
        let token_start = mutated[..at].rfind(' ').map_or(0, |p| p + 1);
        match parse_tokens(&mutated) {
            Ok(_) => return Err(format!("accepted {mutated:?}")),
            Err(e) => ensure(e.position >= token_start && e.position <= at, || {
                format!("{mutated:?}: error at {} outside {token_start}..={at}", e.position)
            })?,
        }
    }
    Ok("10000 valid strings, 1000 mutants rejected".into())
}

// ---------------------------------------------------------------------------
// 7

fn synthesis_round_trip() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lengths = &LengthClass::ALL[3..];
    let config = AcousticConfig::default();
    let (mut matched, mut total, mut exact) = (0usize, 0usize, 0usize);
    let mut first_miss = None;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let mut tokens: Vec<IspaAToken> = Vec::new();
        while tokens.len() < n {
            let octave = rng.gen_range(3..=7);
            let slope = Slope::new(rng.gen_range(-3..=3)).unwrap();
            if let Some(IspaAToken::Pitched {
                octave: o, slope: s, ..
            }) = tokens.last()
            {
                if (*o, *s) == (octave, slope) {
                    continue;
                }
            }
            tokens.push(IspaAToken::Pitched {
                bandwidth: Bandwidth::N,
                octave,
                length: *lengths.choose(&mut rng).unwrap(),
                slope,
            });
        }
        let w = synthesize(&tokens, SR).map_err(|e| e.to_string())?;
        let got = transcribe_a(&w, &config).map_err(|e| e.to_string())?;
        let hits = tokens.iter().zip(&got).filter(|(a, b)| a == b).count();
        matched += hits;
        total += tokens.len().max(got.len());
        if got == tokens {
            exact += 1;
        } else if first_miss.is_none() {
            first_miss = Some(format!("{} -> {}", encode_tokens(&tokens), encode_tokens(&got)));
        }
    }
    let ratio = matched as f64 / total as f64;
    let detail = format!(
        "{matched}/{total} tokens ({:.1}%), {exact}/100 sequences exact",
        100.0 * ratio
    );
    ensure(ratio >= 0.98, || {
        format!("{detail}; e.g. {}", first_miss.clone().unwrap_or_default())
    })?;
    Ok(match first_miss {
        Some(m) => format!("{detail}; first miss {m}"),
        None => detail,
    })
}

// ---------------------------------------------------------------------------
// 8

fn kmeans_properties() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frames: Vec<Vec<f64>> = (0..3000)
        .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0f64).powi(3) * 4.0).collect())
        .collect();
    let fs = FeatureSequence::from_frames(0.02, &frames).unwrap();
    let mut steps = 0;
    for seed in 0..5 {
        let config = KMeansConfig {
            k: 16,
            seed,
            ..KMeansConfig::default()
        };
        let a = train_codebook(std::slice::from_ref(&fs), &config, "t").map_err(|e| e.to_string())?;
        for w in a.inertia_trace.windows(2) {
            ensure(w[1] <= w[0], || {
                format!("seed {seed}: inertia rose {} -> {}", w[0], w[1])
            })?;
        }
        steps += a.inertia_trace.len();
        let b = train_codebook(std::slice::from_ref(&fs), &config, "t").map_err(|e| e.to_string())?;
        let bits = |t: &ispa::feature::TrainedCodebook| -> Vec<u64> {
            t.codebook.centroids().iter().flatten().map(|x| x.to_bits()).collect()
        };
        ensure(bits(&a) == bits(&b) && a.inertia_trace == b.inertia_trace, || {
            format!("seed {seed}: reruns differ")
        })?;
    }

    let mut points = Vec::new();
    let mut truth = Vec::new();
    for i in 0..400 {
        let c = i % 2;
        let center = if c == 0 { [-50.0, 10.0, 3.0] } else { [40.0, -20.0, 7.0] };
        points.push(
            center
                .iter()
                .map(|x| x + rng.gen_range(-1.0..1.0))
                .collect::<Vec<f64>>(),
        );
        truth.push(c);
    }
    let fs = FeatureSequence::from_frames(0.02, &points).unwrap();
    let config = KMeansConfig {
        k: 2,
        ..KMeansConfig::default()
    };
    let cb = train_codebook(std::slice::from_ref(&fs), &config, "t")
        .map_err(|e| e.to_string())?
        .codebook;
    let assigned = ispa::feature::assign_frames(&fs, &cb).map_err(|e| e.to_string())?;
    let flip = assigned[0] != truth[0];
    let agree = assigned.iter().zip(&truth).all(|(&a, &t)| (a != t) == flip);
    ensure(agree, || "two clusters not recovered".into())?;
    Ok(format!(
        "{steps} Lloyd steps monotone over 5 seeds, reruns bit-identical, clusters recovered"
    ))
}

// ---------------------------------------------------------------------------
// 9

fn suite() -> Vec<(Waveform, &'static str, Split)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut clips = Vec::new();
    for i in 0..60 {
        let split = match i % 5 {
            0..=2 => Split::Train,
            3 => Split::Valid,
            _ => Split::Test,
        };
        let seconds = 2.0;
        let amp = rng.gen_range(0.1..0.5);
        let f = 2f64.powf(rng.gen_range(7.5..11.5));
        clips.push((tone(f, seconds, amp), "tone", split));
        let octaves = rng.gen_range(0.6..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let f0 = 2f64.powf(rng.gen_range(8.0..11.0));
        clips.push((chirp(f0, f0 * 2f64.powf(octaves), seconds, amp), "chirp", split));
        clips.push((noise(seconds, amp, &mut rng), "noise", split));
    }
    clips
}

fn classification_smoke() -> Result<String, String> {
    let clips = suite();
    let cfg = ClassifierConfig::default();

    let mut docs_a = SplitDocuments::default();
    for (w, label, split) in &clips {
        let tokens = transcribe_a(w, &AcousticConfig::default()).map_err(|e| e.to_string())?;
        let tokens = tokens.iter().map(ToString::to_string).collect();
        docs_a.push(
            *split,
            TokenDocument::new(tokens, w.duration_seconds(), Some(label.to_string())).unwrap(),
        );
    }
    let acc_a = evaluate(&docs_a, 2, &[0], &cfg)
        .map_err(|e| e.to_string())?
        .accuracy
        .test;

    let features: Vec<(FeatureSequence, &str, Split)> = clips
        .iter()
        .map(|(w, label, split)| mfcc_features(w, 0.02, 40).map(|f| (f, *label, *split)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let train: Vec<FeatureSequence> = features
        .iter()
        .filter(|(_, _, s)| *s == Split::Train)
        .map(|(f, _, _)| f.clone())
        .collect();
    let cb = train_codebook(&train, &KMeansConfig::default(), "mfcc40")
        .map_err(|e| e.to_string())?
        .codebook;
    let mut docs_f = SplitDocuments::default();
    for (fs, label, split) in &features {
        let tokens = transcribe_f(fs, &cb, Variant::Seg, 4.0).map_err(|e| e.to_string())?;
        docs_f.push(
            *split,
            TokenDocument::new(tokens, fs.duration_seconds(), Some(label.to_string())).unwrap(),
        );
    }
    let acc_f = evaluate(&docs_f, 2, &[0], &cfg)
        .map_err(|e| e.to_string())?
        .accuracy
        .test;

    let detail = format!("ISPA-A test accuracy {acc_a:.3}, ISPA-F seg {acc_f:.3}");
    ensure(acc_a >= 0.90 && acc_f >= 0.80, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// 10

fn pitched(tokens: &[IspaAToken]) -> Vec<IspaAToken> {
    tokens.iter().copied().filter(|t| !t.is_rest()).collect()
}

fn invariances() -> Result<String, String> {
    let config = AcousticConfig::default();
    let run = |w: &Waveform| transcribe_a(w, &config).map_err(|e| e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checks = 0;

    // Amplitude.
    let mut signals = Vec::new();
    for _ in 0..6 {
        signals.push(tone(2f64.powf(rng.gen_range(7.0..12.0)), 2.0, 0.4));
        let f0 = 2f64.powf(rng.gen_range(8.0..11.0));
        signals.push(chirp(f0, f0 * 2f64.powf(rng.gen_range(-1.0..1.0)), 1.0, 0.4));
    }
    signals.push(synthesize(&parse_tokens("N4/4= N6/2-2 R/4 N5/4+3").unwrap(), SR).unwrap());
    for w in &signals {
        let (a, b) = (run(w)?, run(&w.scaled(0.5))?);
        ensure(pitched(&a) == pitched(&b), || {
            format!("amplitude: {} vs {}", encode_tokens(&a), encode_tokens(&b))
        })?;
        checks += 1;
    }

    // Octave transposition.
    for octave in 1..=7u8 {
        for _ in 0..2 {
            let f = octave_center_hz(octave) * 2f64.powf(rng.gen_range(-0.3..0.3));
            let (a, b) = (run(&tone(f, 2.0, 0.3))?, run(&tone(2.0 * f, 2.0, 0.3))?);
            let shifted: Vec<IspaAToken> = a
                .iter()
                .map(|t| match *t {
                    IspaAToken::Pitched {
                        bandwidth,
                        octave,
                        length,
                        slope,
                    } => IspaAToken::Pitched {
                        bandwidth,
                        octave: octave + 1,
                        length,
                        slope,
                    },
                    rest => rest,
                })
                .collect();
            let same_shape = |x: &[IspaAToken], y: &[IspaAToken]| {
                x.len() == y.len()
                    && x.iter().zip(y).all(|pair| match pair {
                        (
                            IspaAToken::Pitched {
                                octave: o1,
                                length: l1,
                                slope: s1,
                                ..
                            },
                            IspaAToken::Pitched {
                                octave: o2,
                                length: l2,
                                slope: s2,
                                ..
                            },
                        ) => (o1, l1, s1) == (o2, l2, s2),
                        (p, q) => p == q,
                    })
            };
            ensure(same_shape(&shifted, &b) && !a.is_empty(), || {
                format!(
                    "transposition at {f:.1} Hz: {} vs {}",
                    encode_tokens(&a),
                    encode_tokens(&b)
                )
            })?;
            checks += 1;
        }
    }

    // Slope symmetry around a shared geometric center.
    for x in [0.0, 0.05, 0.1, 0.25, 0.3, 0.4, 0.6, 0.7, 0.75, 0.9, 1.0] {
        let center = 2f64.powf(rng.gen_range(8.5..10.5));
        let up = run(&chirp(
            center * 2f64.powf(-x / 2.0),
            center * 2f64.powf(x / 2.0),
            1.0,
            0.3,
        ))?;
        let down = run(&chirp(
            center * 2f64.powf(x / 2.0),
            center * 2f64.powf(-x / 2.0),
            1.0,
            0.3,
        ))?;
        let slopes = |t: &[IspaAToken]| -> Vec<i8> {
            t.iter()
                .filter_map(|t| match t {
                    IspaAToken::Pitched { slope, .. } => Some(slope.class()),
                    _ => None,
                })
                .collect()
        };
        let (su, sd) = (slopes(&up), slopes(&down));
        ensure(
            !su.is_empty() && su.iter().map(|s| -s).collect::<Vec<_>>() == sd,
            || format!("slope ratio {x}: {} vs {}", encode_tokens(&up), encode_tokens(&down)),
        )?;
        checks += 1;
    }

    // Digital silence.
    for seconds in [0.05, 0.3, 1.0, 2.0, 3.7, 9.0] {
        for rate in [8_000, 16_000, 44_100] {
            let tokens = transcribe_a(&Waveform::silence(seconds, rate), &config).map_err(|e| e.to_string())?;
            ensure(!tokens.is_empty() && tokens.iter().all(IspaAToken::is_rest), || {
                format!("silence {seconds} s @ {rate}: {}", encode_tokens(&tokens))
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks"))
}
