use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{AspectPattern, Experiment, ExperimentConfig};
use super::output::{Cell, Check, RunOutcome, Table};
use crate::analysis::{
    interpolation_error_with, lp_norm, lp_norm_with, spearman, spread, stability_ratio_with, theorem_rhs, ElementSummary,
    NormSpec, PNorm, RateRow, RateTable, Theorem,
};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::fields::{catalog, field_divergence, random_bdm_member, AnalyticField, Factor, FieldSpec, SeparableFunction, Term, MAX_ORDER};
use crate::geometry::{make_family, piola_transform, AnisotropyLaw, ElementGeometry, ElementKind, FamilySpec};
use crate::interpolation::{bdm_space, commuting_defect_with, search_counterexample, BdmInterpolator};

pub(super) fn dispatch(config: &ExperimentConfig) -> Result<RunOutcome> {
    match config.experiment()? {
        Experiment::Unisolvence => unisolvence(config),
        Experiment::Reproduce => reproduce(config),
        Experiment::Lemma1 => lemma1(config),
        Experiment::Commuting => commuting(config),
        Experiment::Converge => converge(config),
        Experiment::Stability => stability(config),
        Experiment::GeometryCheck => geometry_check(config),
    }
}

fn family(config: &ExperimentConfig) -> Result<Vec<(usize, ElementGeometry)>> {
    let spec = config.family_spec()?;
    Ok(spec.levels().zip(make_family(&spec)?).collect())
}

fn h_cells(el: &ElementGeometry) -> Vec<Cell> {
    (0..3).map(|i| el.h.get(i).copied().map_or(Cell::Empty, Cell::Num)).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Brute-force count of the monomial vectors spanning the BDM space.
fn enumerated_dimension(kind: ElementKind, k: u32) -> usize {
    let k = k as usize;
    let mut count = 0;
    for a in 0..=k {
        for b in 0..=k {
            match kind {
                ElementKind::Triangle => count += (a + b <= k) as usize,
                ElementKind::Tet => count += (0..=k).filter(|c| a + b + c <= k).count(),
                ElementKind::Prism => count += if a + b <= k { k + 1 } else { 0 },
            }
        }
    }
    count * kind.dim()
}

fn closed_form_dimension(kind: ElementKind, k: u32) -> usize {
    let k = k as usize;
    match kind {
        ElementKind::Triangle => (k + 1) * (k + 2),
        ElementKind::Tet => 3 * (k + 1) * (k + 2) * (k + 3) / 6,
        ElementKind::Prism => 3 * (k + 1) * (k + 1) * (k + 2) / 2,
    }
}

fn unisolvence(config: &ExperimentConfig) -> Result<RunOutcome> {
    let (kind, k) = (config.kind, config.k);
    let space_dim = bdm_space(kind, k as i32).dimension();
    let closed = closed_form_dimension(kind, k);
    let enumerated = enumerated_dimension(kind, k);
    let levels = family(config)?;
    let built: Vec<(usize, ElementGeometry, BdmInterpolator)> = levels
        .into_par_iter()
        .map(|(j, el)| BdmInterpolator::new(&el, k).map(|i| (j, el, i)))
        .collect::<Result<_>>()?;
    let mut table = Table::new(["level", "h1", "h2", "h3", "dofs", "space_dim", "closed_form_dim", "enumerated_dim", "condition"]);
    let mut records = Vec::new();
    for (j, el, interp) in &built {
        let mut row = vec![(*j).into()];
        row.extend(h_cells(el));
        row.extend([
            interp.dofs().count().into(),
            space_dim.into(),
            closed.into(),
            enumerated.into(),
            interp.condition().into(),
        ]);
        table.push(row);
        records.push(json!({"level": j, "h": el.h, "dofs": interp.dofs().count(), "condition": interp.condition()}));
    }
    let dofs = built[0].2.dofs().count();
    let min_condition = built.iter().map(|b| b.2.condition()).fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::at_most("dofs_minus_space_dim", dofs.abs_diff(space_dim) as f64, 0.0),
        Check::at_most("space_dim_minus_enumerated", space_dim.abs_diff(enumerated) as f64, 0.0),
        Check::at_most("space_dim_minus_closed_form", space_dim.abs_diff(closed) as f64, 0.0),
        Check::at_least("min_condition", min_condition, config.thresholds.min_condition),
    ];
    Ok(RunOutcome {
        table,
        results: json!({
            "dofs": dofs,
            "space_dim": space_dim,
            "closed_form_dim": closed,
            "enumerated_dim": enumerated,
            "min_condition": min_condition,
            "levels": records,
        }),
        checks,
    })
}

fn reproduce(config: &ExperimentConfig) -> Result<RunOutcome> {
    let (kind, k) = (config.kind, config.k);
    let samples = config.samples.unwrap_or(50);
    let spec = NormSpec::new(PNorm::Finite(2.0));
    let members: Vec<_> = (0..samples)
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            random_bdm_member(kind, k as i32, seed).map(|p| (i, seed, p))
        })
        .collect::<Result<_>>()?;
    let levels = family(config)?;
    let d = kind.dim();
    let rows: Vec<Vec<(usize, usize, u64, &'static str, f64, f64)>> = levels
        .par_iter()
        .map(|(j, el)| {
            let interp = BdmInterpolator::new(el, k)?;
            // physical P_k^d (or P_{k,k}^3 under x3-preserving diagonal maps) is the element space itself
            let physical = kind.is_simplex() || el.map.is_diagonal();
            members
                .iter()
                .map(|(i, seed, p)| {
                    let piola = piola_transform(p, &el.map);
                    let v: &dyn VectorField = if physical { p } else { &piola };
                    let iv = interp.interpolate(v)?;
                    let norm = lp_norm(v, el, &spec)?;
                    let err = lp_norm_with(el, &spec, d, |xhat, x, out| {
                        let mut a = [0.0; 3];
                        iv.eval_reference(xhat, &mut a[..d]);
                        v.eval(x, out);
                        for (o, ai) in out.iter_mut().zip(&a) {
                            *o -= ai;
                        }
                    })?;
                    let mapping = if physical { "physical" } else { "piola" };
                    Ok((*j, *i, *seed, mapping, err, if norm > 0.0 { err / norm } else { err }))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(["level", "sample", "seed", "mapping", "error_p2", "relative_error_p2"]);
    let mut worst: f64 = 0.0;
    for r in rows.iter().flatten() {
        table.push(vec![r.0.into(), r.1.into(), Cell::Int(r.2 as i64), r.3.into(), r.4.into(), r.5.into()]);
        worst = worst.max(r.5);
    }
    Ok(RunOutcome {
        table,
        results: json!({"samples": samples, "max_relative_error": worst}),
        checks: vec![Check::at_most("max_relative_error", worst, config.thresholds.max_reproduction_error)],
    })
}

/// sin(a + b) + ½ e^a sin(2b + 0.1), a function of the two coordinates `axes`.
fn two_variable_function(dim: usize, axes: [usize; 2]) -> SeparableFunction {
    let product = |c: f64, fa: Factor, fb: Factor| {
        let mut factors = vec![Factor::Pow(0); dim];
        factors[axes[0]] = fa;
        factors[axes[1]] = fb;
        Term { coefficient: c, factors }
    };
    let sin = |phase| Factor::Sin { freq: 1.0, phase };
    SeparableFunction::new(
        dim,
        vec![
            product(1.0, sin(0.0), sin(FRAC_PI_2)),
            product(1.0, sin(FRAC_PI_2), sin(0.0)),
            product(0.5, Factor::Exp { rate: 1.0 }, Factor::Sin { freq: 2.0, phase: 0.1 }),
        ],
    )
}

/// Single-component field living in `component` and independent of that coordinate.
pub fn lemma1_field(component: usize) -> AnalyticField {
    let axes: Vec<usize> = (0..3).filter(|&a| a != component).collect();
    let mut comps = vec![SeparableFunction::zero(3); 3];
    comps[component] = two_variable_function(3, [axes[0], axes[1]]);
    AnalyticField::new(format!("lemma1-{}", ["u", "v", "w"][component]), 3, comps, MAX_ORDER)
}

fn random_prism_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    [a, b, rng.gen()]
}

fn lemma1(config: &ExperimentConfig) -> Result<RunOutcome> {
    let samples = config.samples.unwrap_or(200);
    let levels = family(config)?;
    if let Some((_, el)) = levels.iter().find(|(_, el)| !el.map.is_diagonal()) {
        return Err(Error::invalid(format!(
            "lemma1 needs diagonal element maps, got {:?}",
            el.map.matrix_rows()
        )));
    }
    let mut items = Vec::new();
    for (j, el) in &levels {
        for c in 0..3 {
            items.push((*j, el, c));
        }
    }
    let rows: Vec<(usize, usize, f64, f64, f64)> = items
        .par_iter()
        .map(|&(j, el, c)| {
            let f = lemma1_field(c);
            let iv = BdmInterpolator::new(el, config.k)?.interpolate(&f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(c as u64));
            let (mut off, mut variation, mut live): (f64, f64, f64) = (0.0, 0.0, 0.0);
            let mut a = [0.0; 3];
            let mut b = [0.0; 3];
            for _ in 0..samples {
                let x = random_prism_point(&mut rng);
                let mut y = x;
                y[c] = match c {
                    0 => rng.gen::<f64>() * (1.0 - x[1]),
                    1 => rng.gen::<f64>() * (1.0 - x[0]),
                    _ => rng.gen::<f64>(),
                };
                iv.eval_reference(&x, &mut a);
                iv.eval_reference(&y, &mut b);
                for i in (0..3).filter(|&i| i != c) {
                    off = off.max(a[i].abs());
                }
                variation = variation.max((a[c] - b[c]).abs());
                live = live.max(a[c].abs());
            }
            Ok((j, c, off, variation, live))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(["level", "h1", "h2", "h3", "pattern", "max_off_pattern", "max_variation", "max_live"]);
    let tol = config.thresholds.lemma1_tolerance;
    let mut checks = Vec::new();
    let mut records = Vec::new();
    for (r, (_, el, _)) in rows.iter().zip(&items) {
        let pattern = ["u", "v", "w"][r.1];
        let mut row = vec![r.0.into()];
        row.extend(h_cells(el));
        row.extend([pattern.into(), r.2.into(), r.3.into(), r.4.into()]);
        table.push(row);
        records.push(json!({"level": r.0, "pattern": pattern, "max_off_pattern": r.2, "max_variation": r.3, "max_live": r.4}));
    }
    for (c, pattern) in ["u", "v", "w"].iter().enumerate() {
        let mine: Vec<_> = rows.iter().filter(|r| r.1 == c).collect();
        checks.push(Check::at_most(format!("{pattern}_off_pattern"), max_of(mine.iter().map(|r| r.2)), tol));
        checks.push(Check::at_most(format!("{pattern}_variation"), max_of(mine.iter().map(|r| r.3)), tol));
        checks.push(Check::below(format!("{pattern}_live_is_nonzero"), -max_of(mine.iter().map(|r| r.4)), 0.0));
    }
    Ok(RunOutcome {
        table,
        results: json!({"samples": samples, "rows": records}),
        checks,
    })
}

/// Ten catalog fields for the commuting-diagram check.
pub fn default_commuting_fields(kind: ElementKind) -> Vec<FieldSpec> {
    let dim = kind.dim();
    let mut v = vec![
        FieldSpec::Sin3,
        FieldSpec::X1Only,
        FieldSpec::Layer { eps: 0.1 },
        FieldSpec::Layer { eps: 0.5 },
        FieldSpec::Layer { eps: 2.0 },
        FieldSpec::Const {
            values: [1.0, -2.0, 0.5][..dim].to_vec(),
        },
        FieldSpec::Poly { seed: 1, k: 3, kind },
        FieldSpec::Poly { seed: 2, k: 3, kind },
        FieldSpec::Poly { seed: 3, k: 2, kind },
    ];
    v.push(if dim == 3 {
        FieldSpec::X3Heavy
    } else {
        FieldSpec::Poly { seed: 4, k: 3, kind }
    });
    v
}

fn field_list(config: &ExperimentConfig, defaults: Vec<FieldSpec>) -> Vec<FieldSpec> {
    if config.fields.is_empty() {
        defaults
    } else {
        config.fields.iter().map(|f| f.0.clone()).collect()
    }
}

fn commuting(config: &ExperimentConfig) -> Result<RunOutcome> {
    let (kind, k) = (config.kind, config.k);
    let specs = field_list(config, default_commuting_fields(kind));
    let fields: Vec<(AnalyticField, AnalyticField)> = specs
        .iter()
        .map(|s| {
            let f = catalog(s, kind.dim())?;
            let div = field_divergence(&f)?;
            Ok((f, div))
        })
        .collect::<Result<_>>()?;
    let levels = family(config)?;
    let defects: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|(_, el)| {
            let interp = BdmInterpolator::new(el, k)?;
            fields.iter().map(|(f, div)| commuting_defect_with(&interp, f, div)).collect()
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(["level", "h1", "h2", "h3", "field", "defect"]);
    let mut records = Vec::new();
    for ((j, el), row_defects) in levels.iter().zip(&defects) {
        for (s, d) in specs.iter().zip(row_defects) {
            let mut row = vec![(*j).into()];
            row.extend(h_cells(el));
            row.extend([s.to_string().into(), (*d).into()]);
            table.push(row);
            records.push(json!({"level": j, "field": s.to_string(), "defect": d}));
        }
    }
    let max_defect = max_of(defects.iter().flatten().copied());
    let mut results = json!({"rows": records, "max_defect": max_defect});
    let mut checks = Vec::new();
    if kind.is_simplex() {
        checks.push(Check::at_most("max_defect", max_defect, config.thresholds.max_simplex_defect));
    } else {
        let threshold = config.thresholds.min_prism_defect;
        let witness = search_counterexample(kind, k, config.seed, config.trials, threshold)?;
        let defect = witness.as_ref().map_or(0.0, |w| w.defect);
        let mut row = vec![Cell::Empty; 4];
        row.extend([Cell::Text("counterexample".into()), defect.into()]);
        table.push(row);
        results["counterexample"] = serde_json::to_value(&witness)?;
        checks.push(Check::at_least("counterexample_defect", defect, threshold));
    }
    Ok(RunOutcome { table, results, checks })
}

fn norm_specs(config: &ExperimentConfig) -> Vec<NormSpec> {
    config.p.iter().map(|&p| NormSpec::new(p)).collect()
}

fn converge(config: &ExperimentConfig) -> Result<RunOutcome> {
    let (kind, k, m) = (config.kind, config.k, config.m());
    let theorem = config.theorem.unwrap_or(Theorem::for_kind(kind));
    let field = catalog(&config.field.0, kind.dim())?;
    let specs = norm_specs(config);
    let levels = family(config)?;
    let rows: Vec<(RateRow, f64)> = levels
        .par_iter()
        .map(|(j, el)| {
            let interp = BdmInterpolator::new(el, k)?;
            let mut errors = Vec::new();
            let mut rhs = Vec::new();
            for spec in &specs {
                errors.push(interpolation_error_with(&interp, &field, spec)?);
                rhs.push(theorem_rhs(theorem, &field, el, m, spec)?.total);
            }
            let row = RateRow {
                level: *j,
                h: el.h.clone(),
                h_scalar: el.h_min(),
                measure: el.measure(),
                errors,
                rhs,
            };
            Ok((row, el.diameter))
        })
        .collect::<Result<_>>()?;
    let diameters: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let n = rows.len();
    let rate = RateTable::new(config.p.clone(), rows.into_iter().map(|r| r.0).collect(), config.fit_levels.unwrap_or(n))?;

    let mut header: Vec<String> = ["level", "h1", "h2", "h3", "h_T"].map(String::from).to_vec();
    for p in &config.p {
        let l = p.label();
        header.extend([format!("error_{l}"), format!("{}_{l}", theorem.label()), format!("ratio_{l}")]);
    }
    let mut table = Table::new(header);
    let ratios: Vec<Vec<Option<f64>>> = (0..config.p.len()).map(|i| rate.ratios(i)).collect();
    for (r, row) in rate.rows.iter().enumerate() {
        let mut cells = vec![row.level.into()];
        cells.extend((0..3).map(|i| row.h.get(i).copied().map_or(Cell::Empty, Cell::Num)));
        cells.push(diameters[r].into());
        for i in 0..config.p.len() {
            cells.extend([row.errors[i].into(), row.rhs[i].into(), ratios[i][r].into()]);
        }
        table.push(cells);
    }

    let t = &config.thresholds;
    let expected = config.expected_slope();
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    for (i, p) in config.p.iter().enumerate() {
        let l = p.label();
        let slope = rate.fits[i].as_ref().map_or(f64::NAN, |f| f.slope);
        checks.push(Check::at_most(format!("slope_deviation_{l}"), (slope - expected).abs(), t.slope_tolerance));
        let defined: Vec<f64> = ratios[i].iter().flatten().copied().collect();
        let ratio_spread = if defined.len() == n { spread(&defined) } else { f64::INFINITY };
        if let Some(max_spread) = t.max_ratio_spread {
            checks.push(Check::at_most(format!("ratio_spread_{l}"), ratio_spread, max_spread));
        }
        fits.push(json!({"p": p, "fit": rate.fits[i], "expected_slope": expected, "ratio_spread": ratio_spread}));
    }
    Ok(RunOutcome {
        table,
        results: json!({"theorem": theorem, "m": m, "fit_scalar": "h_min", "levels": rate.rows, "fits": fits}),
        checks,
    })
}

fn stability(config: &ExperimentConfig) -> Result<RunOutcome> {
    let k = config.k;
    let specs = field_list(config, vec![FieldSpec::Sin3, FieldSpec::Layer { eps: 0.1 }]);
    let fields: Vec<AnalyticField> = specs.iter().map(|s| catalog(s, 3)).collect::<Result<_>>()?;
    let norms = norm_specs(config);
    let mut items = Vec::new();
    for (fi, _) in specs.iter().enumerate() {
        for &pattern in &config.patterns {
            for &a in &config.aspects {
                items.push((fi, pattern, a));
            }
        }
    }
    let element = |pattern: AspectPattern, a: f64| -> Result<ElementGeometry> {
        let spec = FamilySpec {
            kind: ElementKind::Prism,
            law: AnisotropyLaw::Explicit {
                h: vec![pattern.sizes(a).to_vec()],
            },
            first_level: 0,
            last_level: 0,
            base_map: config.base_map.clone(),
        };
        Ok(make_family(&spec)?.remove(0))
    };
    let results: Vec<(ElementGeometry, Vec<(f64, f64)>)> = items
        .par_iter()
        .map(|&(fi, pattern, a)| {
            let el = element(pattern, a)?;
            let interp = BdmInterpolator::new(&el, k)?;
            let vals = norms
                .iter()
                .map(|spec| stability_ratio_with(&interp, &fields[fi], spec).map(|(r, rhs)| (r, rhs.total)))
                .collect::<Result<_>>()?;
            Ok((el, vals))
        })
        .collect::<Result<_>>()?;

    let mut header: Vec<String> = ["field", "pattern", "aspect", "h1", "h2", "h3"].map(String::from).to_vec();
    for p in &config.p {
        header.extend([format!("ratio_{}", p.label()), format!("rhs_thm4_{}", p.label())]);
    }
    let mut table = Table::new(header);
    for (&(fi, pattern, a), (el, vals)) in items.iter().zip(&results) {
        let mut row: Vec<Cell> = vec![specs[fi].to_string().into(), pattern.name().into(), a.into()];
        row.extend(h_cells(el));
        for (r, rhs) in vals {
            row.extend([(*r).into(), (*rhs).into()]);
        }
        table.push(row);
    }

    let t = &config.thresholds;
    let mut checks = Vec::new();
    let mut groups = Vec::new();
    for (fi, spec) in specs.iter().enumerate() {
        for &pattern in &config.patterns {
            let idx: Vec<usize> = (0..items.len()).filter(|&i| items[i].0 == fi && items[i].1 == pattern).collect();
            let log_aspect: Vec<f64> = idx.iter().map(|&i| items[i].2.ln()).collect();
            for (pi, p) in config.p.iter().enumerate() {
                let ratios: Vec<f64> = idx.iter().map(|&i| results[i].1[pi].0).collect();
                let name = format!("{spec}_{}_{}", pattern.name(), p.label());
                let s = spread(&ratios);
                let rho = spearman(&log_aspect, &ratios);
                checks.push(Check::at_most(format!("spread_{name}"), s, t.max_stability_spread));
                checks.push(Check::below(format!("spearman_{name}"), rho, t.max_spearman));
                groups.push(json!({"field": spec.to_string(), "pattern": pattern, "p": p, "ratios": ratios, "spread": s, "spearman": rho}));
            }
        }
    }
    Ok(RunOutcome {
        table,
        results: json!({"aspects": config.aspects, "groups": groups}),
        checks,
    })
}

fn geometry_check(config: &ExperimentConfig) -> Result<RunOutcome> {
    let levels = family(config)?;
    let summaries: Vec<ElementSummary> = levels.iter().map(|(_, el)| ElementSummary::new(el)).collect::<Result<_>>()?;
    let mut table = Table::new([
        "level",
        "h1",
        "h2",
        "h3",
        "diameter",
        "size_parameter",
        "aspect_ratio",
        "measure",
        "max_angle",
        "regular_vertex",
        "regular_vertex_det",
    ]);
    for ((j, el), s) in levels.iter().zip(&summaries) {
        let mut row = vec![(*j).into()];
        row.extend(h_cells(el));
        row.extend([
            s.diameter.into(),
            s.size_parameter.into(),
            s.aspect_ratio.into(),
            s.measure.into(),
            s.max_angle.into(),
            s.regular_vertex.into(),
            s.regular_vertex_det.into(),
        ]);
        table.push(row);
    }
    let t = &config.thresholds;
    let max_angle = max_of(summaries.iter().map(|s| s.max_angle));
    let min_det = summaries.iter().map(|s| s.regular_vertex_det).fold(f64::INFINITY, f64::min);
    let checks = if config.kind.is_simplex() {
        // either property alone carries an estimate
        let holds = max_angle <= t.max_angle || min_det >= t.min_regular_vertex_det;
        vec![Check::at_least("max_angle_or_regular_vertex", holds as u8 as f64, 1.0)]
    } else {
        vec![Check::at_most("max_angle", max_angle, t.max_angle)]
    };
    Ok(RunOutcome {
        table,
        results: json!({"levels": summaries, "max_angle": max_angle, "min_regular_vertex_det": min_det}),
        checks,
    })
}
