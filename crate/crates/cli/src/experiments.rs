use koba_core::domain::{BoundaryPoint, ConvexDomain};
use koba_core::geodesics::{
    almost_geodesic_report, boundary_limit_probe, certified_eps, default_horizon, gromov_boundary_experiment,
    time_grid, GromovSettings, Isometry, NormalRay, SequenceSpec,
};
use koba_core::kobayashi::{metric_bracket, DistanceEngine, DistanceOptions};
use koba_core::model_domain::{select_parameters, verify_embedding, ModelDomain, ParameterCertificate};
use koba_core::modulus::{dini_integral, DiniOutcome, Modulus};
use num_complex::Complex;
use serde_json::json;

use crate::config::*;
use crate::report::{cells, columns, num, Report};
use crate::Failure;

const DEFAULT_MODULUS: &str = "linear:1";
const EMBED_GRID: (usize, usize) = (32, 65);

fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| Failure::Config(format!("missing required key `{key}`")))
}

fn domain(lit: &Option<String>) -> Result<ConvexDomain<f64>, Failure> {
    Ok(ConvexDomain::parse(&need(lit, "domain")?)?)
}

fn modulus(lit: &Option<String>) -> Result<Modulus<f64>, Failure> {
    Ok(Modulus::parse(lit.as_deref().unwrap_or(DEFAULT_MODULUS))?)
}

/// Checks the dimension and, unless `boundary`, membership.
fn point(d: &ConvexDomain<f64>, p: &Option<Point>, key: &str, boundary: bool) -> Result<Vec<f64>, Failure> {
    let p = need(p, key)?.0;
    if p.len() != d.real_dim() {
        return Err(Failure::Config(format!("`{key}` has {} coordinates, {} needs {}", p.len(), d.tag(), d.real_dim())));
    }
    if !boundary && !d.contains(&p) {
        return Err(Failure::Config(format!("`{key}` = {p:?} is not inside {}", d.tag())));
    }
    Ok(p)
}

/// Marked point of capped shapes, else `e₁` scaled to the boundary.
fn default_xi(d: &ConvexDomain<f64>) -> Vec<f64> {
    d.marked_point().unwrap_or_else(|| {
        let c = d.center();
        let mut e = vec![0.0; d.real_dim()];
        e[0] = 1.0;
        let hit = d.ray_exit(&c, &e);
        let mut xi = c;
        xi[0] += hit.mid();
        xi
    })
}

fn boundary(d: &ConvexDomain<f64>, xi: &Option<Point>) -> Result<Vec<f64>, Failure> {
    match xi {
        Some(_) => point(d, xi, "xi", true),
        None => Ok(default_xi(d)),
    }
}

fn engine<C: BracketTuning>(d: ConvexDomain<f64>, c: &C) -> Result<DistanceEngine<f64>, Failure> {
    let (tol, hyperplanes, max_intervals) = c.tuning();
    let mut o = DistanceOptions::default();
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::Config(format!("`tol` = {t} must lie in (0, 1)")));
        }
        o.tol = t;
    }
    o.hyperplanes = hyperplanes.unwrap_or(o.hyperplanes);
    o.max_intervals = max_intervals.unwrap_or(o.max_intervals);
    Ok(DistanceEngine::new(d, o))
}

fn certificate(
    d: &ConvexDomain<f64>,
    omega: &Modulus<f64>,
    seed: &Option<u64>,
    samples: &Option<usize>,
) -> Result<ParameterCertificate<f64>, Failure> {
    let seed = seed.ok_or_else(|| Failure::Config("missing required key `seed` (the certificate samples point pairs)".into()))?;
    Ok(select_parameters(d, omega, d.neighborhood(), samples.unwrap_or(32), seed)?)
}

fn certificate_json(r: &mut Report, cert: &ParameterCertificate<f64>) {
    r.set("m", cert.m);
    r.set("delta0", cert.delta0);
    r.set("alpha", cert.alpha);
    r.set("tau", cert.tau);
    r.set("r", cert.r);
    r.set("oscillation", cert.oscillation);
    r.set("boundary_samples", cert.boundary_samples);
    r.set("pairs_per_radius", cert.pairs_per_radius);
}

pub fn dini(c: &DiniConfig) -> Result<Report, Failure> {
    let lit = need(&c.modulus, "modulus")?;
    let omega = Modulus::parse(&lit)?;
    let sigma = need(&c.sigma, "sigma")?;
    let out = dini_integral(&omega, sigma, c.tol.unwrap_or(1e-10))?;
    let mut r = Report::new(["modulus", "sigma", "value", "status", "blocks"]);
    let (value, status, blocks) = match out {
        DiniOutcome::Finite { value, blocks } => (Some(value), "finite", blocks),
        DiniOutcome::Diverged { blocks, .. } => (None, "diverged", blocks),
    };
    r.row(vec![lit, num(sigma), value.map(num).unwrap_or_default(), status.into(), blocks.to_string()]);
    r.set("value", value);
    r.set("classification", status);
    if let DiniOutcome::Diverged { partial, .. } = out {
        r.set("partial", partial);
    }
    Ok(r)
}

pub fn model_check(c: &ModelConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let omega = modulus(&c.modulus)?;
    let xi = boundary(&d, &c.xi)?;
    let cert = certificate(&d, &omega, &c.seed, &c.samples)?;
    cert.check(&omega)?;
    let model = ModelDomain::from_certificate(omega, &cert)?;
    let angle = model.tangent_angle_check(c.angle_points.unwrap_or(1000))?;
    let bp = d.boundary_point(&xi)?;
    let emb = verify_embedding(&d, &bp, &model, &cert, EMBED_GRID)?;
    let mut r = Report::new(["m", "delta0", "alpha", "tau", "r", "angle_ratio", "worst_margin", "bound"]);
    r.row(cells(&[cert.m, cert.delta0, cert.alpha, cert.tau, cert.r, angle.max_ratio, emb.worst_margin, emb.bound()]));
    certificate_json(&mut r, &cert);
    r.set("worst_margin", emb.worst_margin);
    r.set("grid_sizes", json!([emb.grid_sizes.0, emb.grid_sizes.1]));
    r.set("angle_max_ratio", angle.max_ratio);
    r.set("angle_worst_s", angle.worst_s);
    r.set("angle_points", angle.points);
    r.failed = !angle.passed() || !emb.satisfies_contract();
    Ok(r)
}

pub fn embed_check(c: &EmbedConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let omega = modulus(&c.modulus)?;
    let points: Vec<BoundaryPoint<f64>> = match &c.xi {
        Some(_) => vec![d.boundary_point(&point(&d, &c.xi, "xi", true)?)?],
        None => d.boundary_samples(c.boundary_points.unwrap_or(4))?,
    };
    let grid = (c.grid_s.unwrap_or(EMBED_GRID.0), c.grid_t.unwrap_or(EMBED_GRID.1));
    let cert = certificate(&d, &omega, &c.seed, &c.samples)?;
    let model = ModelDomain::from_certificate(omega, &cert)?;
    let n = d.real_dim();
    let mut header = columns("xi", n);
    header.extend(["worst_margin", "bound", "s", "t"].map(String::from));
    let mut r = Report::new(header);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for bp in &points {
        let e = verify_embedding(&d, bp, &model, &cert, grid)?;
        let mut row = cells(&bp.xi);
        row.extend(cells(&[e.worst_margin, e.bound(), e.worst_zeta.0, e.worst_zeta.1]));
        r.row(row);
        worst = worst.max(e.worst_margin);
        ok &= e.satisfies_contract();
    }
    certificate_json(&mut r, &cert);
    r.set("worst_margin", worst);
    r.set("grid_sizes", json!([grid.0, grid.1]));
    r.failed = !ok;
    Ok(r)
}

pub fn metric(c: &MetricConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let p = point(&d, &c.point, "point", false)?;
    let v = point(&d, &c.direction, "direction", true)?;
    let m = metric_bracket(&d, &p, &v, c.tol.unwrap_or(1e-6))?;
    let n = d.real_dim();
    let mut header = columns("p", n);
    header.extend(columns("v", n));
    header.extend(["lo", "hi", "r_lo", "r_hi", "method_lo", "method_hi"].map(String::from));
    let mut r = Report::new(header);
    let mut row = cells(&p);
    row.extend(cells(&v));
    row.extend(cells(&[m.lo, m.hi, m.radius.lo, m.radius.hi]));
    row.extend(["graham".to_string(), "graham".to_string()]);
    r.row(row);
    r.set("lo", m.lo);
    r.set("hi", m.hi);
    r.set("directions", m.radius.directions);
    Ok(r)
}

pub fn distance(c: &DistanceConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let p = point(&d, &c.p, "p", false)?;
    let q = point(&d, &c.q, "q", false)?;
    let n = d.real_dim();
    let e = engine(d, c)?;
    let k = e.distance_bracket(&p, &q)?;
    let mut header = columns("p", n);
    header.extend(columns("q", n));
    header.extend(["lo", "hi", "method_lo", "method_hi", "nodes", "converged"].map(String::from));
    let mut r = Report::new(header);
    let mut row = cells(&p);
    row.extend(cells(&q));
    row.extend(cells(&[k.lo, k.hi]));
    row.extend([k.lower.as_str().into(), k.upper.as_str().into(), k.nodes.to_string(), k.converged.to_string()]);
    r.row(row);
    r.set("lo", k.lo);
    r.set("hi", k.hi);
    r.set("hyperplanes", k.hyperplanes);
    r.set("nodes", k.nodes);
    r.set("converged", k.converged);
    // tolerance not met: the best bracket is still reported
    r.failed = !k.converged;
    Ok(r)
}

pub fn gromov(c: &GromovConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let x = point(&d, &c.x, "x", false)?;
    let y = point(&d, &c.y, "y", false)?;
    let o = match c.o {
        Some(_) => point(&d, &c.o, "o", false)?,
        None => d.center(),
    };
    let n = d.real_dim();
    let e = engine(d, c)?;
    let g = e.gromov_product(&x, &y, &o)?;
    let mut header = columns("x", n);
    header.extend(columns("y", n));
    header.extend(columns("o", n));
    header.extend(["lo", "hi", "method_lo", "method_hi"].map(String::from));
    let mut r = Report::new(header);
    let mut row = cells(&x);
    row.extend(cells(&y));
    row.extend(cells(&o));
    row.extend(cells(&[g.lo, g.hi]));
    row.extend(["triangle".to_string(), "triangle".to_string()]);
    r.row(row);
    r.set("lo", g.lo);
    r.set("hi", g.hi);
    Ok(r)
}

pub fn escape(c: &EscapeConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let z0 = match c.z0 {
        Some(_) => point(&d, &c.z0, "z0", false)?,
        None => d.center(),
    };
    let e = engine(d, c)?;
    let depths = koba_core::kobayashi::default_depths(c.depths.unwrap_or(11));
    let rep = e.escape_constant(&z0, c.samples.unwrap_or(16), &depths)?;
    let mut r = Report::new(["depth", "value"]);
    for (depth, v) in &rep.profile {
        r.row(cells(&[*depth, *v]));
    }
    r.set("constant", rep.constant);
    r.set("monotone", rep.monotone);
    r.set("samples", rep.samples);
    Ok(r)
}

pub fn almost_geodesic(c: &GeodesicConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let xi = boundary(&d, &c.xi)?;
    let eps = match c.eps {
        Some(eps) => eps,
        None => certified_eps(&certificate(&d, &modulus(&c.modulus)?, &c.seed, &c.samples)?),
    };
    let ray = NormalRay::new(&d, &xi, eps)?;
    let horizon = c.horizon.unwrap_or_else(|| default_horizon(&d, &ray));
    let times = time_grid(horizon, c.points.unwrap_or(33))?;
    let e = engine(d, c)?;
    let rep = almost_geodesic_report(&e, &ray, &times)?;
    let mut r = Report::new(["s", "t", "lo", "hi", "defect"]);
    for row in &rep.rows {
        r.row(cells(&[row.s, row.t, row.lo, row.hi, row.defect]));
    }
    let cap = c.k_cap.unwrap_or(10.0);
    r.set("classification", if rep.k <= cap { "almost-geodesic" } else { "unclassified" });
    r.set("K", rep.k);
    r.set("K_additive", rep.k_additive);
    r.set("K_lipschitz", rep.k_lipschitz);
    r.set("worst_pair", json!([rep.worst_pair.0, rep.worst_pair.1]));
    r.set("lower_shortfall", rep.lower_shortfall);
    r.set("tangent_error", rep.tangent_error);
    r.set("violations", rep.violations.iter().map(|v| json!([v.0, v.1])).collect::<Vec<_>>());
    r.set("eps", eps);
    r.set("T", horizon);
    Ok(r)
}

pub fn gromov_experiment(c: &ExperimentConfig) -> Result<Report, Failure> {
    let d = domain(&c.domain)?;
    let xi = boundary(&d, &c.xi)?;
    let xi2 = match c.xi2 {
        Some(_) => point(&d, &c.xi2, "xi2", true)?,
        None => xi.clone(),
    };
    let o = match c.o {
        Some(_) => point(&d, &c.o, "o", false)?,
        None => d.center(),
    };
    let spec = SequenceSpec::NormalRay { depth: c.depth.unwrap_or(12), scale: c.scale.unwrap_or(1.0) };
    let mut settings = GromovSettings::default();
    if let Some(l) = &c.ladder {
        settings.ladder = l.0.clone();
    }
    settings.cap_factor = c.cap_factor.unwrap_or(settings.cap_factor);
    settings.cap_floor = c.cap_floor.unwrap_or(settings.cap_floor);
    let e = engine(d, c)?;
    let x = gromov_boundary_experiment(&e, &xi, &xi2, &spec, &spec, &o, &settings)?;
    let mut r = Report::new(["nu", "mu", "lo", "hi"]);
    for (i, row) in x.matrix.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            r.row(vec![(i + 1).to_string(), (j + 1).to_string(), num(g.lo), num(g.hi)]);
        }
    }
    r.set("classification", x.classification.as_str());
    r.set("second_classification", x.second_classification.as_str());
    r.set("cap", x.cap);
    r.set("second_base", x.second_base.clone());
    r.set("base_consistent", x.base_consistent);
    r.failed = !x.base_consistent;
    Ok(r)
}

fn isometry(lit: &str) -> Result<Isometry<f64>, Failure> {
    let (kind, rest) = lit.split_once(':').unwrap_or((lit, ""));
    let nums = || -> Result<Vec<f64>, Failure> {
        rest.parse::<Point>().map(|p| p.0).map_err(|e| Failure::Config(format!("isometry `{lit}`: {e}")))
    };
    match kind {
        "identity" if rest.is_empty() => Ok(Isometry::Identity),
        "disc-automorphism" => match nums()?.as_slice() {
            &[re, im, theta] => Ok(Isometry::DiscAutomorphism { a: Complex::new(re, im), theta }),
            _ => Err(Failure::Config(format!("`{lit}` is not disc-automorphism:<re>,<im>,<theta>"))),
        },
        "ball-automorphism" => Ok(Isometry::BallAutomorphism { a: nums()? }),
        "disc-into-ball" => rest
            .parse()
            .map(|n| Isometry::DiscIntoBall { n })
            .map_err(|_| Failure::Config(format!("`{lit}` is not disc-into-ball:<n>"))),
        _ => Err(Failure::Config(format!("unknown isometry `{lit}`"))),
    }
}

pub fn extension_probe(c: &ProbeConfig) -> Result<Report, Failure> {
    let map = isometry(c.isometry.as_deref().unwrap_or("identity"))?;
    let base = ConvexDomain::parse(c.domain.as_deref().unwrap_or("disc"))?;
    let (source, target) = map.domains(&base)?;
    let xi = boundary(&source, &c.xi)?;
    let depth = c.depth.unwrap_or(12);
    let tol = c.diameter_tol.unwrap_or(1e-3);
    let n = target.real_dim();
    let (a, b) = (engine(source, c)?, engine(target, c)?);
    let rep = boundary_limit_probe(&a, &b, |z| map.apply(z), &xi, depth, c.scale.unwrap_or(1.0))?;
    let mut header = vec!["nu".to_string()];
    header.extend(columns("image", n));
    header.push("tail_diameter".into());
    let mut r = Report::new(header);
    for (k, (img, diam)) in rep.images.iter().zip(&rep.tail_diameters).enumerate() {
        let mut row = vec![(k + 1).to_string()];
        row.extend(cells(img));
        row.push(num(*diam));
        r.row(row);
    }
    let at_depth = rep.tail_diameters[depth.min(rep.tail_diameters.len() - 1)];
    r.set("classification", if at_depth < tol { "extends" } else { "unclassified" });
    r.set("tail_diameter_at_depth", at_depth);
    r.set("limit", rep.limit.clone());
    r.set("isometry_defect", rep.isometry_defect);
    r.set("bracket_width", rep.bracket_width);
    r.set("isometry_consistent", rep.isometry_consistent);
    r.failed = !rep.isometry_consistent;
    Ok(r)
}
