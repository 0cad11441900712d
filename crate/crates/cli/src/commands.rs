use std::io::Write;

use anyhow::Context;
use cheegernet_core::bundled;
use cheegernet_core::graphtools::{
    all_pairs_hops, boundary_proxy, cheeger, eccentricity, hyperbolicity_delta, hyperbolicity_sampled,
    pole_radius, uniform_perfectness, CheegerMode, EdgeList, Graph, DEFAULT_EPS0_GRID, DEFAULT_S_GRID,
};
use cheegernet_core::hypmath;
use cheegernet_core::isoperimetry::{
    h_g_exact, h_g_parametric, lii_verdict, regularity_constant, IsoperimetricReport, ParametricBudget,
};
use cheegernet_core::netgraph::{build_net, build_quotient_mesh, net_vs_mesh_qi, NetGraph};
use cheegernet_core::surface::{domain_from_pieces, thick_thin, Surface, SurfaceSpec};
use serde::Serialize;
use serde_json::json;

use crate::input::{self, GraphInput};
use crate::{Cli, CliError, Command, Format, RunConfig};

type Out<'a> = &'a mut dyn Write;

pub fn run(cli: &Cli, out: Out<'_>) -> Result<(), CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Validate { input } => validate(cfg, input, out),
        Command::Thickthin { input } => thickthin(cfg, input, out),
        Command::Isoperimetry { input } => isoperimetry(cfg, input, out),
        Command::Net { input } => net(cfg, input, out),
        Command::Cheeger { input, interior } => cheeger_cmd(cfg, input, interior.as_deref(), out),
        Command::Hyperbolicity { input, samples } => hyperbolicity(cfg, input, *samples, out),
        Command::Boundary { input, base, radius, a } => boundary(cfg, input, *base, *radius, *a, out),
        Command::Qi { input, refinement } => qi(cfg, input, *refinement, out),
        Command::Sweep { input, n } => sweep(cfg, input, n.as_deref(), out),
        Command::Bundled { name } => bundled_cmd(name.as_deref(), out),
    }
}

fn write_json(out: Out<'_>, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).context("serializing report")?;
    writeln!(out, "{text}").context("writing output")?;
    Ok(())
}

fn unsupported(cmd: &str, f: Format) -> CliError {
    CliError::Parameter(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

/// Parses and validates a spec; unreadable JSON counts as a validation failure.
fn surface_from(path: &str) -> Result<Surface, CliError> {
    let text = input::read_text(path)?;
    let spec: SurfaceSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
    Ok(Surface::new(spec)?)
}

fn validate(cfg: &RunConfig, path: &str, out: Out<'_>) -> Result<(), CliError> {
    let s = surface_from(path)?;
    let all: Vec<usize> = (0..s.piece_count()).collect();
    let whole = domain_from_pieces(&s, &all)?;
    let report = json!({
        "valid": true,
        "pieces": s.piece_count(),
        "gluings": s.gluings().len(),
        "cusps": s.cusps().len(),
        "genus": whole.genus,
        "area": whole.area,
        "window": s.window(),
    });
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &report),
        f => Err(unsupported("validate", f)),
    }
}

#[derive(Serialize)]
struct CollarRow {
    kind: &'static str,
    id: usize,
    length: Option<f64>,
    h_j: Option<f64>,
    boundary_length_1: f64,
    boundary_length_2: Option<f64>,
    area: f64,
    separating: Option<bool>,
}

fn thickthin(cfg: &RunConfig, path: &str, out: Out<'_>) -> Result<(), CliError> {
    let s = surface_from(path)?;
    let eps = cfg.eps()?;
    let tt = thick_thin(&s, eps)?;
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &tt),
        Format::Csv => {
            let cusp_area = hypmath::cusp_collar(eps).area;
            let rows = tt
                .thin_collars
                .iter()
                .map(|c| CollarRow {
                    kind: "thin",
                    id: c.geodesic,
                    length: Some(c.core_length),
                    h_j: Some(c.half_width),
                    boundary_length_1: c.boundary_lengths[0],
                    boundary_length_2: Some(c.boundary_lengths[1]),
                    area: c.area,
                    separating: Some(c.is_separating),
                })
                .chain(tt.cusp_collars.iter().map(|c| CollarRow {
                    kind: "cusp",
                    id: c.cusp,
                    length: None,
                    h_j: None,
                    boundary_length_1: c.boundary_length,
                    boundary_length_2: None,
                    area: cusp_area,
                    separating: None,
                }));
            write_csv(out, rows)
        }
        f => Err(unsupported("thickthin", f)),
    }
}

fn write_csv<T: Serialize>(out: Out<'_>, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).context("writing csv")?;
    }
    w.flush().context("writing csv")?;
    Ok(())
}

fn h_g(cfg: &RunConfig, s: &Surface, cap: usize) -> Result<IsoperimetricReport, CliError> {
    match cfg.mode.as_deref().unwrap_or("exhaustive") {
        "exhaustive" => Ok(h_g_exact(s, cap)?),
        "parametric" => Ok(h_g_parametric(
            s,
            ParametricBudget {
                seed: cfg.seed,
                ..ParametricBudget::default()
            },
        )?),
        m => Err(CliError::Parameter(format!("unknown mode `{m}`; expected exhaustive or parametric"))),
    }
}

fn isoperimetry(cfg: &RunConfig, path: &str, out: Out<'_>) -> Result<(), CliError> {
    let s = surface_from(path)?;
    let params = cfg.net_params()?;
    let cap = cfg.max_pieces.unwrap_or(s.window().len());
    let iso = h_g(cfg, &s, cap)?;
    let reg = regularity_constant(&s, params.delta, cap)?;
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &json!({ "isoperimetry": iso, "regularity": reg })),
        Format::Csv => write_csv(
            out,
            [SweepRow {
                param: None,
                h_g: iso.best_ratio,
                best_domain_size: iso.best_domain.piece_set.len(),
                worst_c: fmt_c(reg.worst_c),
                verdict: None,
            }],
        ),
        f => Err(unsupported("isoperimetry", f)),
    }
}

fn net_for(cfg: &RunConfig, path: &str) -> Result<NetGraph, CliError> {
    let s = surface_from(path)?;
    Ok(build_net(&s, cfg.net_params()?)?)
}

fn net(cfg: &RunConfig, path: &str, out: Out<'_>) -> Result<(), CliError> {
    let net = net_for(cfg, path)?;
    let text = match cfg.format {
        None => net.to_edge_list(),
        Some(Format::Dot) => net.to_dot(),
        Some(Format::Json) => {
            let summary = json!({
                "vertices": net.vertex_count(),
                "edges": net.graph().edge_count(),
                "max_degree": net.max_degree(),
                "degree_bound": net.params().degree_bound(),
                "delta": net.params().delta,
                "eps": net.params().eps,
                "cusp_vertices": net.surface().cusps().len(),
                "thin_vertices": net.thin_vertices().len(),
                "rings": net.rings(),
                "tags": net.tags().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "edge_list": net.graph().edges().collect::<Vec<_>>(),
            });
            return write_json(out, &summary);
        }
        Some(f) => return Err(unsupported("net", f)),
    };
    write!(out, "{text}").context("writing output")?;
    Ok(())
}

/// Graph plus the default interior (the window's vertex set) for specs.
fn graph_for(cfg: &RunConfig, path: &str) -> Result<(Graph, Option<NetGraph>), CliError> {
    match input::load_graph_input(path)? {
        GraphInput::Spec(spec) => {
            let net = build_net(&Surface::new(spec)?, cfg.net_params()?)?;
            Ok((net.graph().clone(), Some(net)))
        }
        GraphInput::Edges(list) => Ok((edge_graph(&list)?, None)),
    }
}

fn edge_graph(list: &EdgeList) -> Result<Graph, CliError> {
    Ok(list.to_graph()?)
}

fn cheeger_cmd(cfg: &RunConfig, path: &str, interior: Option<&str>, out: Out<'_>) -> Result<(), CliError> {
    let (graph, net) = graph_for(cfg, path)?;
    let default_mode = if net.is_some() || interior.is_some() { "ambient" } else { "finite_half" };
    let mode = match cfg.mode.as_deref().unwrap_or(default_mode) {
        "ambient" => {
            let interior = match (interior, &net) {
                (Some(text), _) => input::parse_vertex_list(text).map_err(CliError::Parameter)?,
                (None, Some(net)) => net.window_interior()?,
                (None, None) => {
                    return Err(CliError::Parameter("ambient mode on an edge list needs --interior".into()))
                }
            };
            CheegerMode::Ambient { interior }
        }
        "finite_half" => CheegerMode::FiniteHalf,
        m => return Err(CliError::Parameter(format!("unknown mode `{m}`; expected ambient or finite_half"))),
    };
    let cap = cfg.max_pieces.unwrap_or(graph.vertex_count());
    let report = cheeger(&graph, &mode, cap)?;
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &report),
        f => Err(unsupported("cheeger", f)),
    }
}

fn hyperbolicity(cfg: &RunConfig, path: &str, samples: u64, out: Out<'_>) -> Result<(), CliError> {
    let (graph, _) = graph_for(cfg, path)?;
    let report = match cfg.mode.as_deref().unwrap_or("exact") {
        "exact" => hyperbolicity_delta(&graph)?,
        "sampled" => hyperbolicity_sampled(&all_pairs_hops(&graph), samples, cfg.seed)?,
        m => return Err(CliError::Parameter(format!("unknown mode `{m}`; expected exact or sampled"))),
    };
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &report),
        f => Err(unsupported("hyperbolicity", f)),
    }
}

fn boundary(
    cfg: &RunConfig,
    path: &str,
    base: Option<usize>,
    radius: Option<usize>,
    a: f64,
    out: Out<'_>,
) -> Result<(), CliError> {
    let (graph, net) = graph_for(cfg, path)?;
    let base = base.unwrap_or_else(|| net.as_ref().map_or(0, |n| n.hub(0)));
    let radius = match radius {
        Some(r) => r,
        None => eccentricity(&graph, base)
            .ok_or_else(|| CliError::Parameter(format!("base {base} is out of range or the graph is disconnected")))?,
    };
    let dist = all_pairs_hops(&graph);
    let proxy = boundary_proxy(&graph, &dist, base, radius, a)?;
    let perfectness = uniform_perfectness(&proxy, &DEFAULT_S_GRID, &DEFAULT_EPS0_GRID);
    let pole = pole_radius(&graph, base)?;
    let report = json!({
        "base": base,
        "radius": radius,
        "visual_param": a,
        "proxy_points": proxy.proxy_points,
        "uniform_perfectness": perfectness,
        "pole_radius": pole,
        "approximation": "sphere of radius R stands in for the Gromov boundary",
    });
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &report),
        f => Err(unsupported("boundary", f)),
    }
}

fn qi(cfg: &RunConfig, path: &str, refinement: usize, out: Out<'_>) -> Result<(), CliError> {
    let s = surface_from(path)?;
    let (net, mesh) = build_quotient_mesh(&s, cfg.net_params()?, refinement)?;
    let est = net_vs_mesh_qi(&net, &mesh)?;
    let report = json!({
        "alpha": est.alpha,
        "beta": est.beta,
        "fullness": est.fullness,
        "raw_beta": est.raw_beta,
        "raw_fullness": est.raw_fullness,
        "net_vertices": net.vertex_count(),
        "mesh_vertices": mesh.graph.vertex_count(),
        "marked_vertices": est.marked_vertices,
        "refinement": refinement,
        "empirical": true,
    });
    match cfg.format_or(Format::Json) {
        Format::Json => write_json(out, &report),
        f => Err(unsupported("qi", f)),
    }
}

#[derive(Serialize)]
struct SweepRow {
    param: Option<i64>,
    h_g: f64,
    best_domain_size: usize,
    worst_c: String,
    verdict: Option<String>,
}

fn fmt_c(c: f64) -> String {
    if c.is_infinite() {
        "inf".into()
    } else {
        c.to_string()
    }
}

fn sweep(cfg: &RunConfig, path: &str, range: Option<&str>, out: Out<'_>) -> Result<(), CliError> {
    let family = input::load_family(path).map_err(|e| CliError::Validation(format!("{e:#}")))?;
    let range = range.map(input::parse_range).transpose().map_err(CliError::Parameter)?;
    let params = cfg.net_params()?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for inst in family.instances(range)? {
        let s = Surface::new(inst.spec)?;
        let cap = cfg.max_pieces.or(inst.max_pieces).unwrap_or(s.window().len());
        let iso = h_g(cfg, &s, cap)?;
        let reg = regularity_constant(&s, params.delta, cap)?;
        points.push((inst.param as f64, iso.best_ratio));
        rows.push(SweepRow {
            param: Some(inst.param),
            h_g: iso.best_ratio,
            best_domain_size: iso.best_domain.piece_set.len(),
            worst_c: fmt_c(reg.worst_c),
            verdict: None,
        });
    }
    let lii = lii_verdict(&points);
    for r in &mut rows {
        r.verdict = Some(lii.verdict.to_string());
    }
    match cfg.format_or(Format::Csv) {
        Format::Csv => write_csv(out, rows),
        Format::Json => write_json(out, &json!({ "rows": rows, "lii": lii })),
        f => Err(unsupported("sweep", f)),
    }
}

fn bundled_cmd(name: Option<&str>, out: Out<'_>) -> Result<(), CliError> {
    match name {
        None => {
            for (file, _) in bundled::SPECS.iter().chain(bundled::FAMILIES) {
                writeln!(out, "{file}").context("writing output")?;
            }
        }
        Some(name) => {
            let text = input::read_text(&format!("bundled:{name}"))?;
            write!(out, "{text}").context("writing output")?;
        }
    }
    Ok(())
}
