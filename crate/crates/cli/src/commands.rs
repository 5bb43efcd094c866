use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use hexpack::geometry::{
    init_interior, optimize_embedding, pyramid_boundary_coords, quality_report, subdivide_embedding, OptimizeParams,
    PartialEmbedding, AVERAGING_TOLERANCE,
};
use hexpack::hexmodel::{check_conformity, classify_vertices, extract_boundary, subdivide_hex, HexComplex};
use hexpack::io::{
    export_obj_surface, export_vtk, parse_coords, parse_mesh, parse_mesh_raw, parse_pattern, write_mesh, MeshDocument,
};
use hexpack::moves::MoveRules;
use hexpack::search::{
    find_grow_order, find_templates, search_min_packing, LedgerSettings, SearchOptions, SearchOutcome,
};
use hexpack::surface::{cube_pattern, pyramid16_pattern, SurfacePattern};
use hexpack::{canonical_code, Hexahedron};

use crate::{Command, ExportFormat, SearchFlags, Status};

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Verify { mesh, target, coords, no_reflection } => verify(&mesh, target.as_deref(), coords, !no_reflection),
        Command::Search { target, max_hexes, prune, output, search } => {
            let target = load_target(&target)?;
            let options = SearchOptions { max_hexes, prune, ..search_options(&search)? };
            let code = canonical_code(&target, options.settings.reflection_invariant);
            match search_min_packing(&code, &options)? {
                SearchOutcome::Found { hex_count, witness } => {
                    println!("found {hex_count} hexes");
                    println!("witness {witness}");
                    if let Some(out) = output {
                        write(&out, &format!("{witness}\n"))?;
                    }
                    Ok(Status::Ok)
                }
                SearchOutcome::Exhausted { max_hexes, patterns } => {
                    println!("exhausted: not reached with at most {max_hexes} hexes ({patterns} patterns recorded)");
                    Ok(Status::Exhausted)
                }
            }
        }
        Command::Templates { max_hexes, search } => {
            if max_hexes < 2 {
                bail!("--max-hexes must be at least 2");
            }
            let options = SearchOptions { max_hexes, ..search_options(&search)? };
            let found = find_templates(&options)?;
            println!("templates {}", found.len());
            for t in found {
                println!(
                    "{} quads {} odd {} even {}",
                    t.code,
                    t.code.quad_count(),
                    t.odd.hex_count(),
                    t.even.hex_count()
                );
                println!("  odd  {}", t.odd);
                println!("  even {}", t.even);
            }
            Ok(Status::Ok)
        }
        Command::GrowOrder { mesh, output, no_sphere_mode, configs } => {
            let doc = load_mesh(&mesh)?;
            let rules = rules(no_sphere_mode, configs.as_deref())?;
            match find_grow_order(&doc.complex, &rules) {
                Ok(g) => {
                    let order: Vec<String> = g.order.iter().map(|h| h.to_string()).collect();
                    println!("order {}", order.join(" "));
                    println!("witness {}", g.witness);
                    if let Some(out) = output {
                        write(&out, &format!("{}\n", g.witness))?;
                    }
                    Ok(Status::Ok)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(Status::Violations)
                }
            }
        }
        Command::Embed { mesh, boundary, output, max_iterations, beta } => {
            embed(&mesh, &boundary, &output, OptimizeParams { max_iterations, beta, ..Default::default() })
        }
        Command::Subdivide { mesh, output } => {
            let doc = load_mesh(&mesh)?;
            let fine = subdivide_hex(&doc.complex);
            let embedding = doc.embedding.as_ref().map(|e| subdivide_embedding(&doc.complex, &fine, e)).transpose()?;
            write(&output, &write_mesh(&fine, embedding.as_ref()))?;
            println!("{} hexes, {} vertices", fine.len(), fine.vertex_count());
            Ok(Status::Ok)
        }
        Command::Export { mesh, format, output } => {
            let doc = load_mesh(&mesh)?;
            let e = doc.embedding.context("the mesh has no coordinates block")?;
            let text = match format {
                ExportFormat::Vtk => export_vtk(&doc.complex, &e)?,
                ExportFormat::Obj => export_obj_surface(&extract_boundary(&doc.complex)?, &e)?,
            };
            write(&output, &text)?;
            Ok(Status::Ok)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_mesh(path: &Path) -> Result<MeshDocument> {
    parse_mesh(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_target(spec: &str) -> Result<SurfacePattern> {
    match spec {
        "builtin:pyramid16" => Ok(pyramid16_pattern()),
        "builtin:cube" => Ok(cube_pattern()),
        s if s.starts_with("builtin:") => bail!("unknown builtin target {s:?}"),
        path => parse_pattern(&read(Path::new(path))?).with_context(|| format!("in {path}")),
    }
}

fn rules(no_sphere_mode: bool, configs: Option<&[u8]>) -> Result<MoveRules> {
    let mut rules = MoveRules { sphere_mode: !no_sphere_mode, ..MoveRules::default() };
    if let Some(ids) = configs {
        if let Some(bad) = ids.iter().find(|id| !(1..=8).contains(*id)) {
            bail!("glue configuration ids are 1 to 8, got {bad}");
        }
        rules = rules.with_configs(ids);
    }
    Ok(rules)
}

fn search_options(flags: &SearchFlags) -> Result<SearchOptions> {
    Ok(SearchOptions {
        settings: LedgerSettings {
            rules: rules(flags.no_sphere_mode, flags.configs.as_deref())?,
            reflection_invariant: !flags.no_reflection,
        },
        threads: flags.threads,
        checkpoint_dir: flags.checkpoint.clone(),
        ..SearchOptions::default()
    })
}

fn verify(path: &Path, target: Option<&str>, coords: bool, reflection: bool) -> Result<Status> {
    let raw = parse_mesh_raw(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let target = target.map(load_target).transpose()?;
    let complex = HexComplex::from_raw(raw.vertex_count, raw.hexes.iter().map(|&h| Hexahedron(h)).collect());
    let report = check_conformity(&complex);
    let mut ok = report.is_conforming();
    println!("hexes {}", report.hex_count);
    println!("vertices {}", report.vertex_count);
    let histogram: Vec<String> = report.face_histogram.iter().map(|(k, n)| format!("{n}x{k}")).collect();
    println!("faces {}", histogram.join(" "));
    println!("parity {}", complex.parity());
    println!("conforming {}", report.is_conforming());
    for v in &report.violations {
        println!("violation {v}");
    }
    if !report.is_conforming() {
        return Ok(Status::Violations);
    }

    let boundary = extract_boundary(&complex)?;
    let (b, i) = classify_vertices(&complex);
    let code = canonical_code(&boundary, reflection);
    println!("boundary quads {}", boundary.quad_count());
    println!("boundary vertices {}", b.len());
    println!("interior vertices {}", i.len());
    println!("code {code}");
    if let Some(t) = target {
        let matches = canonical_code(&t, reflection) == code;
        println!("target match {matches}");
        ok &= matches;
    }
    if coords {
        let e = raw.embedding.context("--coords given but the mesh has no coordinates block")?;
        let q = quality_report(&complex, &e)?;
        println!("min scaled jacobian {:.6}", q.global_min);
        println!("non-positive corners {}", q.non_positive);
        ok &= q.non_positive == 0;
    }
    Ok(if ok { Status::Ok } else { Status::Violations })
}

fn embed(path: &Path, boundary: &str, output: &Path, params: OptimizeParams) -> Result<Status> {
    let doc = load_mesh(path)?;
    let fixed: PartialEmbedding = match boundary {
        "builtin:pyramid" => pyramid_boundary_coords(),
        s if s.starts_with("builtin:") => bail!("unknown builtin boundary {s:?}"),
        file => parse_coords(&read(Path::new(file))?).with_context(|| format!("in {file}"))?,
    };
    let (on_boundary, _) = classify_vertices(&doc.complex);
    if let Some(v) = on_boundary.iter().find(|v| !fixed.contains_key(v)) {
        bail!("no position given for boundary vertex {v}");
    }
    if let Some(v) = fixed.keys().find(|&&v| v as usize >= doc.complex.vertex_count()) {
        bail!("position given for vertex {v}, which the mesh does not have");
    }
    let start = init_interior(&doc.complex, &fixed, AVERAGING_TOLERANCE, 100_000);
    let r = optimize_embedding(&doc.complex, &start, &fixed, &params)?;
    println!("iterations {}", r.iterations);
    println!("status {:?}", r.status);
    println!("min scaled jacobian {:.6}", r.min_scaled_jacobian);
    let text = if output.extension().is_some_and(|e| e == "vtk") {
        export_vtk(&doc.complex, &r.embedding)?
    } else {
        write_mesh(&doc.complex, Some(&r.embedding))
    };
    write(output, &text)?;
    Ok(if r.min_scaled_jacobian > 0.0 { Status::Ok } else { Status::Violations })
}
