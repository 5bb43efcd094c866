//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report reads top to bottom; exits non-zero on failure.

mod common;

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hexpack::fixtures;
use hexpack::geometry::{
    init_interior, optimize_embedding, pyramid_boundary_coords, quality_report, softmin_energy, untangle_energy,
    Embedding, OptimizeParams, AVERAGING_TOLERANCE,
};
use hexpack::hexmodel::{check_conformity, classify_vertices, extract_boundary};
use hexpack::moves::distinct_successors;
use hexpack::search::{
    find_grow_order, replay_witness, search_ledger, verify_template, LedgerSettings, SearchLedger, SearchOptions,
};
use hexpack::surface::{isomorphic, pyramid16_pattern};
use hexpack::{canonical_code, CanonicalCode, HexComplex, MoveRules, SurfacePattern, VertexId};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if let false = $cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ledger_to(n: usize) -> SearchLedger {
    let mut l = SearchLedger::new(LedgerSettings::default());
    while l.layer < n {
        l.expand_layer(|_| true);
    }
    l
}

fn pyramid_packing() -> Outcome {
    let doc = fixtures::pyramid36();
    let c = &doc.complex;
    let report = check_conformity(c);
    ensure!(report.is_conforming(), "violations: {:?}", report.violations);
    ensure!(c.len() == 36 && c.vertex_count() == 51, "{} hexes, {} vertices", c.len(), c.vertex_count());
    let boundary = extract_boundary(c).map_err(|e| e.to_string())?;
    ensure!(boundary.quad_count() == 16, "{} boundary quads", boundary.quad_count());
    ensure!(isomorphic(&boundary, &pyramid16_pattern(), true).is_some(), "boundary is not the refined pyramid");
    let (b, i) = classify_vertices(c);
    ensure!(b.len() == 18 && i.len() == 33, "{} boundary / {} interior vertices", b.len(), i.len());
    Ok("36 hexes, 51 vertices, 16-quad pyramid boundary, 18/33 vertices".into())
}

fn parity_template() -> Outcome {
    let (t3, t4) = (fixtures::template17().complex, fixtures::template18().complex);
    let r = verify_template(&t3, &t4, true);
    ensure!(r.conformity.iter().all(|c| c.is_conforming()), "not conforming: {:?}", r.conformity);
    ensure!(r.hex_counts == [17, 18], "hex counts {:?}", r.hex_counts);
    ensure!(r.codes_equal(), "boundary codes differ");
    let quads = r.codes[0].as_ref().map(CanonicalCode::quad_count);
    ensure!(quads == Some(34), "boundary has {quads:?} quads");
    ensure!(r.parity_changing(), "parity_changing is false");
    Ok("17 and 18 hexes, equal 34-quad codes, parity_changing = true".into())
}

fn early_layers() -> Outcome {
    let l = ledger_to(3);
    let sizes: Vec<usize> = (1..=3).map(|n| l.layer_codes(n).len()).collect();
    ensure!(sizes == [1, 1, 3], "layer sizes {sizes:?}");
    let mut quads: Vec<usize> = l.layer_codes(3).iter().map(|c| c.quad_count()).collect();
    quads.sort_unstable();
    ensure!(quads == [12, 14, 14], "quad counts {quads:?}");
    let rules = MoveRules::default();
    let mut successor_counts = Vec::new();
    for code in l.layer_codes(3) {
        if code.quad_count() == 14 {
            let w = l.get(code).and_then(|r| r.odd.as_ref()).ok_or("missing witness")?;
            let p = replay_witness(w, &rules).map_err(|e| e.to_string())?;
            successor_counts.push(distinct_successors(&p, &rules, true).len());
        }
    }
    ensure!(successor_counts.contains(&5), "14-quad successor counts {successor_counts:?}");
    Ok(format!("layers 1/1/3, quads {quads:?}, 14-quad successor counts {successor_counts:?}"))
}

fn brute_force_agreement() -> Outcome {
    let oracle = common::oracle::oracle_layers(4, true);
    let l = ledger_to(4);
    for (i, expected) in oracle.layers.iter().enumerate() {
        let got: HashSet<&CanonicalCode> = l.layer_codes(i + 1).into_iter().collect();
        let want: HashSet<&CanonicalCode> = expected.iter().collect();
        ensure!(got == want, "layer {}: search {} codes, brute force {}", i + 1, got.len(), want.len());
    }
    let sizes: Vec<usize> = oracle.layers.iter().map(Vec::len).collect();
    Ok(format!("layers 1..=4 agree, sizes {sizes:?}, from {:?} non-isomorphic packings", oracle.complexes))
}

fn grow_orders() -> Outcome {
    let rules = MoveRules::default();
    let mut lens = Vec::new();
    for (name, doc) in [("pyramid36", fixtures::pyramid36()), ("template17", fixtures::template17()), ("template18", fixtures::template18())] {
        let g = find_grow_order(&doc.complex, &rules).map_err(|e| format!("{name}: {e}"))?;
        let replayed = replay_witness(&g.witness, &rules).map_err(|e| format!("{name}: {e}"))?;
        let want = canonical_code(&extract_boundary(&doc.complex).map_err(|e| e.to_string())?, true);
        ensure!(replayed.code(true) == want, "{name}: replayed boundary differs");
        ensure!(replayed.hex_count() == doc.complex.len(), "{name}: replay has {} hexes", replayed.hex_count());
        lens.push(g.witness.0.len());
    }
    Ok(format!("orders found and replayed, witness lengths {lens:?}"))
}

fn embedding_quality() -> Outcome {
    let doc = fixtures::pyramid36();
    let given = doc.embedding.as_ref().ok_or("pyramid36 fixture has no coordinates")?;
    let q = quality_report(&doc.complex, given).map_err(|e| e.to_string())?;
    ensure!(q.global_min > 0.0, "given coordinates: min SJ {}", q.global_min);

    let fixed = pyramid_boundary_coords();
    let start = init_interior(&doc.complex, &fixed, AVERAGING_TOLERANCE, 100_000);
    let params = OptimizeParams { max_iterations: 10_000, ..OptimizeParams::default() };
    let r = optimize_embedding(&doc.complex, &start, &fixed, &params).map_err(|e| e.to_string())?;
    ensure!(r.iterations <= 10_000, "{} iterations", r.iterations);
    ensure!(r.min_scaled_jacobian > 0.0, "optimized min SJ {}", r.min_scaled_jacobian);
    Ok(format!(
        "given min SJ {:.4}, optimized min SJ {:.4} after {} iterations",
        q.global_min, r.min_scaled_jacobian, r.iterations
    ))
}

fn face_and_euler_bookkeeping() -> Outcome {
    let rules = MoveRules::default();
    let l = ledger_to(4);
    let mut moves = 0;
    for n in 1..=4 {
        for code in l.layer_codes(n) {
            let w = l.get(code).and_then(|r| r.witness(hexpack::Parity::of(n))).ok_or("missing witness")?;
            let p = replay_witness(w, &rules).map_err(|e| e.to_string())?;
            for (pl, next) in p.successors(&rules) {
                let k = pl.mask.count_ones() as i64;
                let df = next.surface().len() as i64 - p.surface().len() as i64;
                ensure!(df == 6 - 2 * k, "move {pl} changed F by {df} with k = {k}");
                let chi = next.pattern().euler_characteristic();
                ensure!(chi == 2, "move {pl} gave Euler characteristic {chi}");
                moves += 1;
            }
        }
    }
    Ok(format!("{moves} moves"))
}

fn random_relabel(p: &SurfacePattern, rng: &mut ChaCha8Rng) -> SurfacePattern {
    let max = *p.vertices().last().expect("nonempty pattern") as usize + 1;
    let mut perm: Vec<VertexId> = (0..(max + 20) as VertexId).collect();
    perm.shuffle(rng);
    let q = p.relabel(|v| perm[v as usize]);
    if rng.gen_bool(0.5) {
        // Reorder the quad list and rotate each cycle as well.
        let mut quads: Vec<[VertexId; 4]> = q.quads().to_vec();
        quads.shuffle(rng);
        for quad in &mut quads {
            quad.rotate_left(rng.gen_range(0..4));
        }
        hexpack::surface::build_pattern(quads).expect("reordered pattern")
    } else {
        q
    }
}

fn relabel_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let patterns = [
        pyramid16_pattern(),
        extract_boundary(&fixtures::template17().complex).map_err(|e| e.to_string())?,
        extract_boundary(&fixtures::pyramid36().complex).map_err(|e| e.to_string())?,
    ];
    let trials = 1000;
    for p in &patterns {
        let code = canonical_code(p, true);
        let oriented = canonical_code(p, false);
        for t in 0..trials {
            let q = random_relabel(p, &mut rng);
            ensure!(canonical_code(&q, true) == code, "trial {t}: code changed under relabelling");
            ensure!(canonical_code(&q, false) == oriented, "trial {t}: oriented code changed");
        }
        ensure!(canonical_code(&p.mirrored(), true) == code, "mirror image has a different code");
    }
    Ok(format!("{} random relabellings", trials * patterns.len()))
}

fn checkpoint_resume() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let opts = |max_hexes, dir: Option<&std::path::Path>| SearchOptions {
        max_hexes,
        threads: Some(2),
        checkpoint_dir: dir.map(Into::into),
        ..SearchOptions::default()
    };
    let run = |o: &SearchOptions| search_ledger(None, None, o, |_, _| {}).map(|(l, _)| l).map_err(|e| e.to_string());
    let straight = run(&opts(5, None))?;
    run(&opts(3, Some(dir.path())))?;
    let resumed = run(&opts(5, Some(dir.path())))?;
    ensure!(resumed == straight, "resumed ledger differs from an uninterrupted run");
    let reloaded = hexpack::search::load_checkpoint(dir.path()).map_err(|e| e.to_string())?;
    ensure!(reloaded == straight, "final checkpoint differs from the ledger");
    Ok(format!("resume at layer 3 reproduces {} patterns through layer 5", straight.len()))
}

fn perturbed_pyramid36(rng: &mut ChaCha8Rng) -> (HexComplex, Embedding) {
    let doc = fixtures::pyramid36();
    let mut pts = doc.embedding.expect("pyramid36 coordinates").points().to_vec();
    for p in &mut pts {
        for x in p.iter_mut() {
            *x += rng.gen_range(-0.02..0.02);
        }
    }
    (doc.complex, Embedding::new(pts))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (c, e) = perturbed_pyramid36(&mut rng);
    let h = 1e-6;
    let tol = 1e-5;
    type Energy<'a> = Box<dyn Fn(&Embedding) -> (f64, Vec<[f64; 3]>) + 'a>;
    let energies: [(&str, Energy); 2] = [
        ("softmin", Box::new(|e: &Embedding| softmin_energy(&c, e, 40.0).expect("nondegenerate"))),
        ("untangle", Box::new(|e: &Embedding| untangle_energy(&c, e, 0.01))),
    ];
    let mut worst = 0.0f64;
    for (name, f) in &energies {
        let (_, g) = f(&e);
        for v in 0..e.len() {
            for a in 0..3 {
                let mut p = e.points().to_vec();
                p[v][a] += h;
                let ep = f(&Embedding::new(p.clone())).0;
                p[v][a] -= 2.0 * h;
                let em = f(&Embedding::new(p)).0;
                let fd = (ep - em) / (2.0 * h);
                let err = (fd - g[v][a]).abs() / fd.abs().max(1.0);
                worst = worst.max(err);
                ensure!(err < tol, "{name}: vertex {v} axis {a}: analytic {} vs {fd}", g[v][a]);
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn invariant_suites() -> Outcome {
    let parts = [
        ("face/Euler", face_and_euler_bookkeeping()),
        ("relabel", relabel_invariance()),
        ("resume", checkpoint_resume()),
        ("gradient", gradient_check()),
    ];
    let mut notes = Vec::new();
    for (name, r) in parts {
        notes.push(format!("{name}: {}", r.map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 7] = [
        ("refined pyramid packing", pyramid_packing),
        ("parity-changing template", parity_template),
        ("first three layers", early_layers),
        ("brute-force agreement", brute_force_agreement),
        ("grow orders", grow_orders),
        ("embedding quality", embedding_quality),
        ("invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
