use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use coarsekit::approx::{simplicial_approximation, StraightLineHomotopy};
use coarsekit::coarse::{
    control_profile, excisive_divergence, excisive_profile, fit_linear_control, z_operator, Entourage, FiniteNet,
};
use coarsekit::cone::{edge_interval_1d, edge_statistics, ConeModel, ConePoint, ConeTriangulation};
use coarsekit::geom::{validate, GeoComplex, Simplex};
use coarsekit::radialize::{g_slice_ratio, ConeMap, ConeMapSample, RadializationBundle};
use coarsekit::scenario;
use coarsekit::subdivide::iterate_subdivision;

use crate::config::RunConfig;
use crate::report::{Provenance, Report};

pub fn read_complex(path: &Path) -> Result<GeoComplex> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GeoComplex::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn rng(cfg: &RunConfig) -> Result<ChaCha8Rng> {
    Ok(ChaCha8Rng::seed_from_u64(cfg.seed()?))
}

pub fn subdivided(input: &Path, iterations: usize) -> Result<GeoComplex> {
    Ok(iterate_subdivision(&read_complex(input)?, iterations)?)
}

fn base_or_default(cfg: &RunConfig) -> Result<GeoComplex> {
    match cfg.inputs.first() {
        Some(p) => read_complex(p),
        None => Ok(GeoComplex::triangle_boundary()),
    }
}

pub fn cone_build(cfg: &RunConfig, tip: bool) -> Result<(ConeTriangulation, Report)> {
    let base = base_or_default(cfg)?;
    let t = ConeTriangulation::build(&base, cfg.height, tip)?;
    let stats = edge_statistics(&t)?;
    let mut r = Report::new("cone-build", cfg.to_value());
    r.holds("valid", "geom::validate on the cone triangulation", Provenance::Derived, validate(&t.complex).is_valid());
    r.holds(
        "cross-sections",
        "cone::ConeTriangulation slabs agree on shared cross-sections",
        Provenance::Trivial,
        t.check_cross_sections(),
    );
    r.holds("positive-min-edge", "cone edge lengths lie in [a, b] with a > 0", Provenance::StatedBound, stats.min > 0.0);
    if base.dim() == Some(1) {
        let (lo_sq, hi) = edge_interval_1d(&base)?;
        r.holds(
            "edge-interval",
            "cone::edge_interval_1d contains every edge",
            Provenance::Derived,
            stats.min_sq >= lo_sq && stats.max <= hi * (1.0 + cfg.tol),
        );
    }
    let per_slab: Vec<Value> = stats
        .per_slab
        .iter()
        .map(|s| {
            json!({
                "lower": s.lower,
                "level": s.level,
                "min_edge": s.min_edge(),
                "max_edge": s.max_edge(),
                "classes": s.classes,
            })
        })
        .collect();
    r.data = json!({
        "vertices": t.complex.vertices().len(),
        "top_simplices": t.complex.maximal_simplices().len(),
        "min_edge": stats.min,
        "max_edge": stats.max,
        "classes": stats.classes,
        "top_classes": stats.top_classes,
        "cross_section_classes": stats.cross_section_classes,
        "per_slab": per_slab,
    });
    Ok((t, r))
}

fn random_entourage(net: &FiniteNet, rng: &mut ChaCha8Rng) -> Result<Entourage> {
    let n = net.len();
    let k = rng.random_range(1..=2 * n);
    Ok(Entourage::new(net, (0..k).map(|_| (rng.random_range(0..n), rng.random_range(0..n))))?)
}

/// `Z(Z(M)) = Z(M)` on random entourages of `ℝ₊` grids.
pub fn z_check(cfg: &RunConfig, points: usize, cases: usize) -> Result<Report> {
    let mut rng = rng(cfg)?;
    let mut r = Report::new("z-idempotence", cfg.to_value());
    let mut sizes = Vec::with_capacity(cases);
    for case in 0..cases {
        let n = rng.random_range(2..=points.max(2));
        let net = FiniteNet::real_grid(n - 1, 0.5);
        let m = random_entourage(&net, &mut rng)?;
        let z = z_operator(&m, &net)?;
        let zz = z_operator(&z, &net)?;
        r.holds(&format!("case-{case}"), "coarse::z_operator is idempotent", Provenance::StatedBound, zz == z);
        let upper = m.pairs().iter().filter(|(x, y)| x <= y).all(|&(x, y)| z.contains(x, y));
        r.holds(&format!("case-{case}-contains"), "coarse::z_operator contains the pairs x <= y of M", Provenance::Trivial, upper);
        sizes.push(json!({ "points": n, "pairs": m.len(), "z_pairs": z.len() }));
    }
    r.data = json!({ "cases": sizes });
    Ok(r)
}

fn spiral_on_ray(t: f64) -> Vec<f64> {
    let a = (1.0 + t).ln();
    vec![t * a.cos(), t * a.sin(), t]
}

/// Control profile of a map on a seeded net of the ray `[0, height]`.
pub fn coarse_profile(cfg: &RunConfig, map: &str, points: usize) -> Result<Report> {
    let mut rng = rng(cfg)?;
    if cfg.radii.is_empty() {
        bail!("--radii is required for a profile");
    }
    let xs: Vec<Vec<f64>> = (0..points).map(|_| vec![rng.random_range(0.0..=cfg.height as f64)]).collect();
    // Derivative norm of each map along the ray.
    let (images, lip): (Vec<Vec<f64>>, f64) = match map {
        "spiral" => (xs.iter().map(|x| spiral_on_ray(x[0])).collect(), 3f64.sqrt()),
        "identity" => (xs.clone(), 1.0),
        other => bail!("unknown map `{other}` (expected spiral or identity)"),
    };
    let net = FiniteNet::euclidean(xs);
    let m = control_profile(&net, &images, &cfg.radii)?;
    let mut r = Report::new("coarse-profile", cfg.to_value());
    r.holds("monotone", "coarse::ControlModulus is monotone", Provenance::Trivial, m.is_monotone());
    r.holds("finite", "controlled maps have finite profiles", Provenance::StatedBound, m.is_finite());
    for (radius, s) in m.radii.iter().zip(&m.values) {
        r.at_most(
            &format!("S({radius})"),
            "S(R) <= Lip(f)·R on a geodesic net",
            Provenance::Derived,
            *s,
            lip * radius * (1.0 + cfg.tol),
        );
    }
    let flags: Vec<bool> = m.radii.iter().zip(&m.values).map(|(radius, s)| *s <= lip * radius * (1.0 + cfg.tol)).collect();
    r.data = json!({ "map": map, "radii": m.radii, "S": m.values, "flags": flags, "linear_fit": fit_linear_control(&m) });
    Ok(r)
}

/// Half planes of a square grid against two parallel rays, each at two sizes.
pub fn coarse_excisive(cfg: &RunConfig, size: usize) -> Result<Report> {
    let radii = if cfg.radii.is_empty() { vec![1.0, 2.0, 3.0] } else { cfg.radii.clone() };
    let mut r = Report::new("coarse-excisive", cfg.to_value());
    let half = |n: usize| {
        let (net, a, b) = scenario::half_plane_grid(n as i64);
        excisive_profile(&net, &a, &b, &radii)
    };
    let rays = |n: usize| {
        let (net, a, b) = scenario::parallel_rays(n);
        excisive_profile(&net, &a, &b, &radii)
    };
    let (hs, hl) = (half(size)?, half(2 * size)?);
    let (rs, rl) = (rays(size)?, rays(2 * size)?);
    for p in [&hs, &hl] {
        for (radius, s) in p.radii.iter().zip(&p.values) {
            r.at_most(&format!("half-plane S({radius})"), "half planes: S(R) = R up to one grid step", Provenance::Derived, (s - radius).abs(), 1.0);
        }
    }
    let half_flags = excisive_divergence(&hs, &hl)?;
    let ray_flags = excisive_divergence(&rs, &rl)?;
    r.holds("half-plane-bounded", "coarse::excisive_divergence flags nothing for half planes", Provenance::Derived, half_flags.iter().all(|f| !f));
    r.holds("rays-divergent", "coarse::excisive_divergence flags the parallel rays", Provenance::StatedBound, ray_flags.iter().any(|&f| f));
    r.data = json!({
        "radii": radii,
        "half_plane": { "S": [hs.values, hl.values], "flags": half_flags },
        "parallel_rays": { "S": [rs.values, rl.values], "flags": ray_flags },
    });
    Ok(r)
}

fn cone_fixture(map: &str, seed: u64) -> Result<(ConeMap, GeoComplex)> {
    Ok(match map {
        "spiral" => (ConeMap::spiral(), scenario::point_base()),
        "twisted" => (scenario::seeded_twisted_map(seed), GeoComplex::triangle_boundary()),
        "spun" => (scenario::spun_loop_map(0.5), GeoComplex::triangle_boundary()),
        other => bail!("unknown map `{other}` (expected spiral, twisted or spun)"),
    })
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The three radialization stages on samples of `c(X)` between heights 1 and `K`.
pub fn radialize(cfg: &RunConfig, map: &str) -> Result<Report> {
    let seed = cfg.seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f, base) = cone_fixture(map, seed)?;
    let model = ConeModel::sample(base, 1.0, cfg.height as f64, cfg.samples, &mut rng)?;
    let b = RadializationBundle::new(&f, 1.0)?;
    let mut r = Report::new("radialize", cfg.to_value());

    let residual = b.endpoint_residual(&model.points)?;
    r.at_most(
        "endpoint-residual",
        "radialize endpoint chain F(0)=f, F(e)=g=G(e), G(0)=u=H(0), H(e)=v",
        Provenance::Derived,
        residual,
        cfg.residual_tol,
    );
    let mut symbolic = 0.0f64;
    let mut composite = 0.0f64;
    let c = b.composite();
    for p in &model.points {
        symbolic = symbolic
            .max(max_gap(&b.homotopy_f.at_end(p)?, &b.g.eval(p)?))
            .max(max_gap(&b.homotopy_g.at_end(p)?, &b.g.eval(p)?))
            .max(max_gap(&b.homotopy_h.at_end(p)?, &b.v.eval(p)?));
        composite = composite.max(max_gap(&c.at_start(p)?, &b.f.eval(p)?)).max(max_gap(&c.at_end(p)?, &b.v.eval(p)?));
    }
    r.at_most("symbolic-endpoints", "radialize homotopies return the stage maps at t = end", Provenance::Trivial, symbolic, 0.0);
    r.at_most("composite-ends", "radialize composite runs from f to the radial map v", Provenance::Derived, composite, cfg.residual_tol);

    let sample = ConeMapSample::measure(&f, model.clone(), cfg.samples, &mut rng)?;
    let l = sample.effective_lipschitz();
    let triples = 10 * cfg.samples;
    let ratio = g_slice_ratio(&b.homotopy_g, &model.points, triples, &mut rng)?;
    r.at_most("g-slice", "|G(t) - G(s)| <= 2L²|t - s|", Provenance::StatedBound, ratio, 2.0 * l * l * (1.0 + cfg.tol));
    r.holds("proper", "radialize::ConeMapSample properness profile is monotone", Provenance::Trivial, sample.proper.is_monotone());
    r.data = json!({
        "map": map,
        "stage_constants": {
            "lipschitz": sample.lip,
            "growth": sample.growth,
            "base_bound": sample.base_bound,
            "effective_lipschitz": l,
            "height_scale": b.height_scale,
        },
        "endpoint_residuals": { "formula": residual, "symbolic": symbolic, "composite": composite },
        "slice_ratios": { "g": ratio, "g_bound": 2.0 * l * l, "triples": triples },
    });
    Ok(r)
}

/// Simplicial approximation of the spun loop map between triangulated cones.
pub fn approx(cfg: &RunConfig, phi_name: &str, twist: f64) -> Result<Report> {
    let mut rng = rng(cfg)?;
    if phi_name != "spiral" {
        bail!("unknown map `{phi_name}` (expected spiral)");
    }
    let (domain, codomain) = match (cfg.inputs.first(), cfg.inputs.get(1)) {
        (Some(d), Some(c)) => (read_complex(d)?, read_complex(c)?),
        (None, None) => {
            let t = ConeTriangulation::build(&GeoComplex::triangle_boundary(), cfg.height, false)?;
            (iterate_subdivision(&t.complex, 2)?, t.complex)
        }
        _ => bail!("--domain and --codomain go together"),
    };
    let phi = scenario::spun_loop_map(twist).on_ambient();
    let f = simplicial_approximation(&phi, &domain, &codomain, cfg.density)?;
    let simplicial = domain.simplices().iter().all(|s| {
        let image: BTreeSet<usize> = s.vertex_ids().iter().map(|&v| f.assignment.images[v]).collect();
        codomain.contains(&Simplex::new(image.into_iter().collect()))
    });
    let h = StraightLineHomotopy::new(&phi, &f, f.sample_points())?;
    let m = h.measure(cfg.samples, &mut rng)?;
    let mut r = Report::new("approx", cfg.to_value());
    r.holds("simplicial", "approx: vertex images span codomain simplices", Provenance::Derived, simplicial);
    r.at_most("sup-distance", "sup |f - phi| <= max codomain simplex diameter", Provenance::StatedBound, f.report.sup_distance, f.report.codomain_diameter);
    r.at_most("straight-line", "straight-line homotopy is (K + D)-Lipschitz", Provenance::StatedBound, m.measured, m.bound * (1.0 + cfg.tol));
    r.data = json!({
        "domain": { "vertices": domain.vertices().len(), "top_simplices": domain.maximal_simplices().len() },
        "codomain": { "vertices": codomain.vertices().len(), "top_simplices": codomain.maximal_simplices().len() },
        "sup_distance": f.report.sup_distance,
        "codomain_diameter": f.report.codomain_diameter,
        "domain_star_diameter": f.report.domain_star_diameter,
        "f_lipschitz": f.report.lipschitz,
        "phi_lipschitz": m.phi_lipschitz,
        "k": m.k,
        "homotopy_lipschitz": m.measured,
        "homotopy_bound": m.bound,
        "grid_samples": f.assignment.samples,
    });
    Ok(r)
}

/// Radialization of the spiral, its control profile along the ray, and the
/// radial end map measured on the cone.
pub fn demo_spiral(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new("demo-spiral", cfg.to_value());
    r.data = json!({});
    r.merge("radialize", radialize(cfg, "spiral")?);
    let radii = if cfg.radii.is_empty() { vec![1.0, 2.0, 4.0, 8.0] } else { cfg.radii.clone() };
    let profile_cfg = RunConfig { radii, ..cfg.clone() };
    r.merge("profile", coarse_profile(&profile_cfg, "spiral", 400)?);
    let b = RadializationBundle::new(&ConeMap::spiral(), 1.0)?;
    let tip = ConePoint::new(vec![0.0], 1.0);
    let v1 = b.v.eval(&tip)?;
    let mut linear = 0.0f64;
    for k in 1..=cfg.height {
        let h = k as f64;
        linear = linear.max(max_gap(&b.v.eval(&ConePoint::new(vec![0.0], h))?, &v1.iter().map(|y| h * y).collect::<Vec<_>>()));
    }
    r.at_most("radial-end", "the radialized map is (hx,h) ↦ h·f(x,1)", Provenance::Trivial, linear, cfg.residual_tol * cfg.height as f64);
    if let Value::Object(m) = &mut r.data {
        m.insert("radial_direction".into(), json!(v1));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coarsekit::cone::BaseMap;

    #[test]
    fn ray_spiral_matches_the_cone_map() {
        let f = ConeMap::spiral();
        for t in [0.0, 0.5, 7.0] {
            assert_eq!(spiral_on_ray(t), f.eval(&ConePoint::new(vec![0.0], t)).unwrap());
        }
    }

    #[test]
    fn unknown_maps_are_rejected() {
        let cfg = RunConfig { seed: Some(1), radii: vec![1.0], ..Default::default() };
        assert!(coarse_profile(&cfg, "nope", 10).is_err());
        assert!(cone_fixture("nope", 1).is_err());
        assert!(BaseMap::target_dim(&ConeMap::spiral().on_ambient()) == 3);
    }
}
