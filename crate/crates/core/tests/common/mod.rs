#![allow(dead_code)]

use ghostmg_core::bench::{
    read_csv, run_experiment, write_csv, DomainSpec, ExperimentArgs, ExperimentRow,
};
use ghostmg_core::cycles::{build_hierarchy, mg_cycle, CycleConfig, CycleMode};
use ghostmg_core::discretization::{
    assemble_system, compute_defect, stencil_weights, DirectSolver, Discretization, GridFunction,
    ProblemData,
};
use ghostmg_core::geometry::{
    build_grid, classify_nodes, sample_level_set, BcKind, BoundarySplit, GridSpec, LevelSetField,
    NodeClass, StencilExtent, StencilSpec,
};
use ghostmg_core::smoothers::{
    kaczmarz_sweep, BoundaryBand, KaczmarzRows, LevelSmoother, SmootherConfig, SmootherKind,
    NEUMANN_CFL_PER_H,
};
use ghostmg_core::solver1d::Interval1D;
use ghostmg_core::transfer::{
    prolongate, restrict_defect, restrict_partial, ExtensionConfig, ExtensionPlan,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CX: f64 = 0.070_710_678_118_654_75;
const CY: f64 = 0.057_735_026_918_962_58;
const R: f64 = 0.563;

fn circle_phi(n: usize) -> LevelSetField {
    DomainSpec::Circle.level_set(n).unwrap()
}

fn circle_disc(n: usize, split: BoundarySplit) -> Discretization {
    Discretization::new(circle_phi(n), split).unwrap()
}

fn random_field(grid: GridSpec, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_values(
        grid,
        (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
}

fn random_problem(disc: &Discretization, seed: u64) -> ProblemData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prob = ProblemData::homogeneous(disc);
    for &idx in disc.active_order() {
        if disc.is_interior(idx) {
            prob.f[idx] = rng.gen_range(-1.0..1.0);
        }
    }
    for g in prob.g.iter_mut() {
        *g = rng.gen_range(-1.0..1.0);
    }
    prob
}

fn split_strategy() -> impl Strategy<Value = BoundarySplit> {
    prop_oneof![
        Just(BoundarySplit::DirichletLeft),
        Just(BoundarySplit::AllDirichlet),
        Just(BoundarySplit::AllNeumann),
    ]
}

/// Stencil anchored at `(i, j)` with the member layout of the ghost stencils.
fn stencil(origin: (usize, usize), signs: (isize, isize), extent: StencilExtent) -> StencilSpec {
    let offsets: Vec<(isize, isize)> = match extent {
        StencilExtent::Full3x3 => (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect(),
        StencilExtent::Reduced2x2 => (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).collect(),
        StencilExtent::Reduced3Point => vec![(0, 0), (1, 0), (0, 1)],
        StencilExtent::LineX => vec![(0, 0), (1, 0), (2, 0)],
        StencilExtent::LineY => vec![(0, 0), (0, 1), (0, 2)],
    };
    let members = offsets
        .into_iter()
        .map(|(k1, k2)| {
            (
                (origin.0 as isize + signs.1 * k2) as usize,
                (origin.1 as isize + signs.0 * k1) as usize,
            )
        })
        .collect();
    StencilSpec {
        origin,
        signs,
        extent,
        members,
    }
}

fn extent_strategy() -> impl Strategy<Value = StencilExtent> {
    prop_oneof![
        Just(StencilExtent::Full3x3),
        Just(StencilExtent::Reduced2x2),
        Just(StencilExtent::Reduced3Point),
        Just(StencilExtent::LineX),
        Just(StencilExtent::LineY),
    ]
}

fn sign() -> impl Strategy<Value = isize> {
    prop_oneof![Just(-1isize), Just(1isize)]
}

/// Polynomial `sum c[a][b] x^a y^b` and its gradient.
fn poly(c: &[[f64; 3]; 3], x: f64, y: f64) -> (f64, [f64; 2]) {
    let mut v = 0.0;
    let mut g = [0.0; 2];
    for a in 0..3 {
        for b in 0..3 {
            v += c[a][b] * x.powi(a as i32) * y.powi(b as i32);
            if a > 0 {
                g[0] += c[a][b] * a as f64 * x.powi(a as i32 - 1) * y.powi(b as i32);
            }
            if b > 0 {
                g[1] += c[a][b] * b as f64 * x.powi(a as i32) * y.powi(b as i32 - 1);
            }
        }
    }
    (v, g)
}

/// Monomials `x^a y^b` reproduced exactly by each interpolant.
fn exact_degrees(extent: StencilExtent) -> fn(usize, usize) -> bool {
    match extent {
        StencilExtent::Full3x3 => |_, _| true,
        StencilExtent::Reduced2x2 => |a, b| a <= 1 && b <= 1,
        StencilExtent::Reduced3Point => |a, b| a + b <= 1,
        StencilExtent::LineX => |_, b| b == 0,
        StencilExtent::LineY => |a, _| a == 0,
    }
}

/// Runs `test` on `cases` deterministic draws from `strategy`; panics on the
/// first counterexample after shrinking.
fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    if let Err(e) = runner.run(&strategy, test) {
        panic!("{e}");
    }
}

const CASES: u32 = 64;

/// Every property, by name.
pub const ALL: &[(&str, fn())] = &[
    (
        "interpolation_weights_sum_to_one_and_reproduce_polynomials",
        interpolation_weights_sum_to_one_and_reproduce_polynomials,
    ),
    (
        "kaczmarz_projection_zeroes_the_projected_row",
        kaczmarz_projection_zeroes_the_projected_row,
    ),
    ("defect_is_affine_in_u", defect_is_affine_in_u),
    (
        "matrix_free_defect_matches_assembled_residual",
        matrix_free_defect_matches_assembled_residual,
    ),
    (
        "smoothers_leave_the_discrete_solution_fixed",
        smoothers_leave_the_discrete_solution_fixed,
    ),
    (
        "cycles_leave_the_discrete_solution_fixed",
        cycles_leave_the_discrete_solution_fixed,
    ),
    (
        "cycle_is_affine_in_the_iterate",
        cycle_is_affine_in_the_iterate,
    ),
    (
        "relaxation_steps_outside_the_stability_limit_are_rejected",
        relaxation_steps_outside_the_stability_limit_are_rejected,
    ),
    (
        "band_holds_ghosts_and_near_interior_nodes",
        band_holds_ghosts_and_near_interior_nodes,
    ),
    (
        "classification_matches_brute_force",
        classification_matches_brute_force,
    ),
    ("injection_keeps_even_nodes", injection_keeps_even_nodes),
    (
        "prolongation_is_the_identity_at_coarse_nodes",
        prolongation_is_the_identity_at_coarse_nodes,
    ),
    (
        "restriction_commutes_with_constants",
        restriction_commutes_with_constants,
    ),
    (
        "full_weighting_of_y_invariant_fields_is_one_dimensional",
        full_weighting_of_y_invariant_fields_is_one_dimensional,
    ),
    (
        "line_stencils_reduce_to_the_one_dimensional_boundary_operators",
        line_stencils_reduce_to_the_one_dimensional_boundary_operators,
    ),
    (
        "extension_is_constant_along_normals_of_a_flat_face",
        extension_is_constant_along_normals_of_a_flat_face,
    ),
    ("extension_is_idempotent", extension_is_idempotent),
    (
        "ghost_projection_distance_equals_the_level_set",
        ghost_projection_distance_equals_the_level_set,
    ),
    (
        "reinitialization_preserves_signs",
        reinitialization_preserves_signs,
    ),
    (
        "manufactured_solution_converges_at_second_order",
        manufactured_solution_converges_at_second_order,
    ),
    (
        "experiment_rows_round_trip_through_csv",
        experiment_rows_round_trip_through_csv,
    ),
    (
        "measurements_are_deterministic",
        measurements_are_deterministic,
    ),
];

pub fn interpolation_weights_sum_to_one_and_reproduce_polynomials() {
    check(
        (
            extent_strategy(),
            sign(),
            sign(),
            -0.5f64..2.5,
            -0.5f64..2.5,
            prop::array::uniform3(prop::array::uniform3(-1.0f64..1.0)),
        ),
        |(extent, sx, sy, tx, ty, coeffs)| {
            let grid = build_grid(16).unwrap();
            let st = stencil((8, 8), (sx, sy), extent);
            let [x0, y0] = grid.coords(8, 8);
            let h = grid.h();
            let p = [x0 + sx as f64 * tx * h, y0 + sy as f64 * ty * h];
            let w = stencil_weights(&st, grid, p);
            let sum: f64 = w.value[..w.len].iter().sum();
            let sdx: f64 = w.dx[..w.len].iter().sum();
            let sdy: f64 = w.dy[..w.len].iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(sdx.abs() < 1e-9 && sdy.abs() < 1e-9);

            let keep = exact_degrees(extent);
            let mut c = coeffs;
            for (a, row) in c.iter_mut().enumerate() {
                for (b, v) in row.iter_mut().enumerate() {
                    if !keep(a, b) {
                        *v = 0.0;
                    }
                }
            }
            let u = GridFunction::from_fn(grid, |x, y| poly(&c, x, y).0);
            let (v, g) = poly(&c, p[0], p[1]);
            prop_assert!((w.eval(u.values()) - v).abs() < 1e-11);
            let wg = w.grad(u.values());
            prop_assert!((wg[0] - g[0]).abs() < 1e-9 && (wg[1] - g[1]).abs() < 1e-9);
            Ok(())
        },
    )
}

pub fn kaczmarz_projection_zeroes_the_projected_row() {
    check(
        (any::<u64>(), any::<prop::sample::Index>(), split_strategy()),
        |(seed, pick, split)| {
            let disc = circle_disc(16, split);
            let prob = random_problem(&disc, seed);
            let mut u = random_field(disc.grid(), seed ^ 1);
            let idx = disc.active_order()[pick.index(disc.active_order().len())];
            let rows = KaczmarzRows::new(&disc, &[idx]).unwrap();
            kaczmarz_sweep(&mut u, &prob, &disc, &rows);
            let r = disc.defect_at(u.values(), &prob, idx);
            prop_assert!(r.abs() < 1e-8 * (1.0 + prob.scale()), "row defect {r}");
            Ok(())
        },
    )
}

pub fn defect_is_affine_in_u() {
    check((any::<u64>(), split_strategy()), |(seed, split)| {
        let disc = circle_disc(16, split);
        let prob = random_problem(&disc, seed);
        let u = random_field(disc.grid(), seed ^ 2);
        let v = random_field(disc.grid(), seed ^ 3);
        let mut uv = u.clone();
        uv.axpy(1.0, &v);
        let lhs = compute_defect(&uv, &prob, &disc);
        let ru = compute_defect(&u, &prob, &disc);
        let rv = compute_defect(&v, &ProblemData::homogeneous(&disc), &disc);
        for &idx in disc.active_order() {
            let scale = 1.0 + ru[idx].abs() + rv[idx].abs();
            prop_assert!((lhs[idx] - ru[idx] - rv[idx]).abs() < 1e-10 * scale);
        }
        Ok(())
    })
}

pub fn matrix_free_defect_matches_assembled_residual() {
    check((any::<u64>(), split_strategy()), |(seed, split)| {
        let disc = circle_disc(32, split);
        let prob = random_problem(&disc, seed);
        let u = random_field(disc.grid(), seed ^ 4);
        let sys = assemble_system(&prob, &disc);
        let res = sys.residual(&u);
        let r = compute_defect(&u, &prob, &disc);
        let h2 = disc.grid().h().powi(2);
        for (k, &idx) in sys.unknowns.iter().enumerate() {
            // Interior rows carry 1/h^2; compare on the scale of the row.
            let scale = if disc.is_interior(idx) { 1.0 / h2 } else { 1.0 };
            prop_assert!((res[k] - r[idx]).abs() <= 1e-11 * scale);
        }
        Ok(())
    })
}

pub fn smoothers_leave_the_discrete_solution_fixed() {
    check(
        (
            any::<u64>(),
            prop_oneof![
                Just(SmootherKind::GsLex),
                Just(SmootherKind::Kaczmarz),
                Just(SmootherKind::Block)
            ],
            0usize..4,
        ),
        |(seed, kind, lambda)| {
            let disc = circle_disc(16, BoundarySplit::DirichletLeft);
            let prob = random_problem(&disc, seed);
            let u = DirectSolver::new(&disc)
                .unwrap()
                .solve(&prob, &disc)
                .unwrap();
            let sm = LevelSmoother::new(
                &disc,
                SmootherConfig::default()
                    .with_kind(kind)
                    .with_lambda(lambda),
            )
            .unwrap();
            let mut v = u.clone();
            sm.smooth(&mut v, &prob, &disc);
            let mut diff = v.clone();
            diff.axpy(-1.0, &u);
            prop_assert!(diff.max_abs() < 1e-9 * (1.0 + u.max_abs()));
            Ok(())
        },
    )
}

pub fn cycles_leave_the_discrete_solution_fixed() {
    check(
        (
            any::<u64>(),
            prop_oneof![Just(CycleMode::V), Just(CycleMode::W)],
        ),
        |(seed, mode)| {
            let phi = circle_phi(32);
            let hier = build_hierarchy(
                &phi,
                BoundarySplit::DirichletLeft,
                8,
                SmootherConfig::default(),
                ExtensionConfig::default(),
            )
            .unwrap();
            let disc = hier.finest();
            let prob = random_problem(disc, seed);
            let u = DirectSolver::new(disc).unwrap().solve(&prob, disc).unwrap();
            let mut v = u.clone();
            mg_cycle(
                &mut v,
                &prob,
                &hier,
                &CycleConfig::new(1, 1, mode).unwrap(),
                0,
            )
            .unwrap();
            let mut diff = v.clone();
            diff.axpy(-1.0, &u);
            prop_assert!(diff.max_abs() < 1e-8 * (1.0 + u.max_abs()));
            Ok(())
        },
    )
}

pub fn cycle_is_affine_in_the_iterate() {
    check(any::<u64>(), |seed| {
        let phi = circle_phi(32);
        let hier = build_hierarchy(
            &phi,
            BoundarySplit::DirichletLeft,
            16,
            SmootherConfig::default(),
            ExtensionConfig::default(),
        )
        .unwrap();
        let disc = hier.finest();
        let cfg = CycleConfig::new(1, 1, CycleMode::Tgcs).unwrap();
        let prob = random_problem(disc, seed);
        let zero = ProblemData::homogeneous(disc);
        let u = random_field(disc.grid(), seed ^ 5);
        let v = random_field(disc.grid(), seed ^ 6);
        let mut uv = u.clone();
        uv.axpy(1.0, &v);
        let (mut cu, mut cv) = (u.clone(), v.clone());
        mg_cycle(&mut uv, &prob, &hier, &cfg, 0).unwrap();
        mg_cycle(&mut cu, &prob, &hier, &cfg, 0).unwrap();
        mg_cycle(&mut cv, &zero, &hier, &cfg, 0).unwrap();
        for &idx in disc.active_order() {
            prop_assert!((uv[idx] - cu[idx] - cv[idx]).abs() < 1e-9 * (1.0 + uv[idx].abs()));
        }
        Ok(())
    })
}

pub fn relaxation_steps_outside_the_stability_limit_are_rejected() {
    check((1.0f64..10.0, 1.0f64..10.0), |(mu_d, mu_n_factor)| {
        let ok_n = 0.5 * NEUMANN_CFL_PER_H;
        prop_assert!(SmootherConfig::new(SmootherKind::GsLex, 5, 3.0, mu_d, ok_n).is_err());
        prop_assert!(SmootherConfig::new(SmootherKind::GsLex, 5, 3.0, -mu_d, ok_n).is_err());
        prop_assert!(SmootherConfig::new(
            SmootherKind::GsLex,
            5,
            3.0,
            0.5,
            mu_n_factor * NEUMANN_CFL_PER_H
        )
        .is_err());
        prop_assert!(SmootherConfig::new(SmootherKind::GsLex, 5, 3.0, 0.5, ok_n).is_ok());
        Ok(())
    })
}

pub fn band_holds_ghosts_and_near_interior_nodes() {
    check(
        (0.0f64..5.0, prop_oneof![Just(16usize), Just(32), Just(64)]),
        |(delta, n)| {
            let disc = circle_disc(n, BoundarySplit::DirichletLeft);
            let h = disc.grid().h();
            let band = BoundaryBand::new(&disc, delta * h);
            let phi = disc.phi().values();
            let inside: std::collections::HashSet<usize> = band.nodes().iter().copied().collect();
            for idx in 0..disc.grid().len() {
                let expect = disc.ghost_index(idx).is_some()
                    || (disc.is_interior(idx) && phi[idx].abs() <= delta * h);
                prop_assert_eq!(inside.contains(&idx), expect);
            }
            Ok(())
        },
    )
}

pub fn classification_matches_brute_force() {
    check(
        (
            0.2f64..0.8,
            -0.15f64..0.15,
            -0.15f64..0.15,
            prop_oneof![Just(8usize), Just(16), Just(32)],
        ),
        |(r, cx, cy, n)| {
            let grid = build_grid(n).unwrap();
            let phi = sample_level_set(grid, |x, y| (x - cx).hypot(y - cy) - r).unwrap();
            let mask = classify_nodes(&phi).unwrap();
            for i in 0..grid.side() {
                for j in 0..grid.side() {
                    let inside = |a: isize, b: isize| {
                        a >= 0
                            && b >= 0
                            && a <= n as isize
                            && b <= n as isize
                            && phi.at(a as usize, b as usize) < 0.0
                    };
                    let (a, b) = (i as isize, j as isize);
                    let expect = if inside(a, b) {
                        NodeClass::Interior
                    } else if inside(a - 1, b)
                        || inside(a + 1, b)
                        || inside(a, b - 1)
                        || inside(a, b + 1)
                    {
                        NodeClass::Ghost
                    } else {
                        NodeClass::Exterior
                    };
                    prop_assert_eq!(mask.class(i, j), expect);
                }
            }
            Ok(())
        },
    )
}

pub fn injection_keeps_even_nodes() {
    check(
        (any::<u64>(), prop_oneof![Just(16usize), Just(32), Just(64)]),
        |(seed, n)| {
            let grid = build_grid(n).unwrap();
            let f = random_field(grid, seed);
            let phi = LevelSetField::from_values(grid, f.values().to_vec()).unwrap();
            let c = phi.inject().unwrap();
            for i in 0..=n / 2 {
                for j in 0..=n / 2 {
                    prop_assert_eq!(c.at(i, j), phi.at(2 * i, 2 * j));
                }
            }
            Ok(())
        },
    )
}

pub fn prolongation_is_the_identity_at_coarse_nodes() {
    check(
        (any::<u64>(), prop_oneof![Just(8usize), Just(16), Just(32)]),
        |(seed, n)| {
            let e = random_field(build_grid(n).unwrap(), seed);
            let p = prolongate(&e);
            for i in 0..=n {
                for j in 0..=n {
                    prop_assert_eq!(p.at(2 * i, 2 * j), e.at(i, j));
                }
            }
            Ok(())
        },
    )
}

pub fn restriction_commutes_with_constants() {
    check((-10.0f64..10.0, split_strategy()), |(c, split)| {
        let phi = circle_phi(32);
        let fine = Discretization::new(phi.clone(), split).unwrap();
        let coarse = Discretization::new(phi.inject().unwrap(), split).unwrap();
        let plan = ExtensionPlan::new(&fine, ExtensionConfig::default()).unwrap();
        let r = GridFunction::from_fn(fine.grid(), |_, _| c);
        let out = restrict_defect(&r, &fine, &plan, &coarse).unwrap();
        for &idx in coarse.active_order() {
            prop_assert!((out[idx] - c).abs() < 1e-12 * (1.0 + c.abs()));
        }
        let partial = restrict_partial(
            &r,
            |i, j| fine.mask().class(i, j) == NodeClass::Interior,
            &GridFunction::zeros(coarse.grid()),
        );
        for idx in 0..coarse.grid().len() {
            let (ci, cj) = coarse.grid().ij(idx);
            if fine.mask().class(2 * ci, 2 * cj) == NodeClass::Interior {
                prop_assert!((partial[idx] - c).abs() < 1e-12 * (1.0 + c.abs()));
            }
        }
        Ok(())
    })
}

pub fn full_weighting_of_y_invariant_fields_is_one_dimensional() {
    check(any::<u64>(), |seed| {
        let grid = build_grid(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1: Vec<f64> = (0..grid.side()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w =
            GridFunction::from_values(grid, (0..grid.len()).map(|k| w1[grid.ij(k).1]).collect());
        let out = restrict_partial(
            &w,
            |_, _| true,
            &GridFunction::zeros(grid.coarse().unwrap()),
        );
        for ci in 1..16 {
            for cj in 1..16 {
                let expect = 0.25 * (w1[2 * cj - 1] + 2.0 * w1[2 * cj] + w1[2 * cj + 1]);
                prop_assert!((out.at(ci, cj) - expect).abs() < 1e-14);
            }
        }
        Ok(())
    })
}

pub fn line_stencils_reduce_to_the_one_dimensional_boundary_operators() {
    check((-0.9f64..-0.2, 0.2f64..0.9, 4usize..28), |(a, b, row)| {
        let n = 32;
        let iv = Interval1D::new(a, b, n).unwrap();
        let grid = build_grid(n).unwrap();
        let y = grid.y(row);
        let left = stencil((row, iv.l), (1, 1), StencilExtent::LineX);
        let wl = stencil_weights(&left, grid, [a, y]);
        for (k, e) in iv.dirichlet_weights().iter().enumerate() {
            prop_assert!((wl.value[k] - e).abs() < 1e-12);
        }
        let right = stencil((row, iv.r), (-1, 1), StencilExtent::LineX);
        let wr = stencil_weights(&right, grid, [b, y]);
        let nw = iv.neumann_weights();
        // The 2D members run r, r-1, r-2; the 1D weights run r-2, r-1, r.
        for k in 0..3 {
            prop_assert!((wr.dx[k] - nw[2 - k]).abs() < 1e-9 * (1.0 + nw[2 - k].abs()));
        }
        Ok(())
    })
}

pub fn extension_is_constant_along_normals_of_a_flat_face() {
    check((-0.3f64..0.3, any::<u64>()), |(c, seed)| {
        let grid = build_grid(64).unwrap();
        let phi = sample_level_set(grid, |x, y| (x - c).max(x.hypot(y) - 0.8))
            .unwrap()
            .assume_signed_distance();
        let disc = Discretization::new(phi, BoundarySplit::AllDirichlet).unwrap();
        let plan = ExtensionPlan::new(&disc, ExtensionConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = GridFunction::zeros(grid);
        for g in disc.ghosts() {
            r.set(g.node.0, g.node.1, rng.gen_range(-1.0..1.0));
        }
        plan.apply(&mut r);
        let h = grid.h();
        for g in disc.ghosts() {
            let (i, j) = g.node;
            if grid.y(i).abs() > 0.4 || grid.x(j) < c {
                continue;
            }
            for k in 1..=3 {
                let jj = j + k;
                if jj > grid.n() || grid.x(jj) - c > 3.0 * h {
                    break;
                }
                prop_assert!((r.at(i, jj) - r.at(i, j)).abs() < 1e-3);
            }
        }
        Ok(())
    })
}

pub fn extension_is_idempotent() {
    check((any::<u64>(), split_strategy()), |(seed, split)| {
        let disc = circle_disc(64, split);
        let plan = ExtensionPlan::new(&disc, ExtensionConfig::default()).unwrap();
        let mut r = random_field(disc.grid(), seed);
        plan.apply(&mut r);
        let once = r.clone();
        plan.apply(&mut r);
        r.axpy(-1.0, &once);
        prop_assert!(r.max_abs() < 1e-6);
        Ok(())
    })
}

pub fn ghost_projection_distance_equals_the_level_set() {
    check(
        prop_oneof![Just(16usize), Just(32), Just(64), Just(128)],
        |n| {
            let disc = circle_disc(n, BoundarySplit::DirichletLeft);
            let grid = disc.grid();
            for g in disc.ghosts() {
                let [x, y] = grid.coords(g.node.0, g.node.1);
                let d = (x - g.projection[0]).hypot(y - g.projection[1]);
                let phi = disc.phi().at(g.node.0, g.node.1);
                prop_assert!((d - phi.abs()).abs() < 1e-12);
                prop_assert!(
                    ((g.projection[0] - CX).hypot(g.projection[1] - CY) - R).abs()
                        < 1e-3 * grid.h()
                );
            }
            Ok(())
        },
    )
}

pub fn reinitialization_preserves_signs() {
    for dom in [DomainSpec::Ellipse, DomainSpec::Saddle, DomainSpec::Flower] {
        let formula = dom.formula().unwrap();
        for n in [16, 32, 64, 128] {
            let phi = dom.level_set(n).unwrap();
            let grid = phi.grid();
            for i in 0..grid.side() {
                for j in 0..grid.side() {
                    let [x, y] = grid.coords(i, j);
                    let f = formula(x, y);
                    let p = phi.at(i, j);
                    assert!(
                        f * p > 0.0 || (f == 0.0 && p == 0.0),
                        "{dom} N={n} ({i},{j}): {f} vs {p}"
                    );
                }
            }
        }
    }
}

fn manufactured_error(n: usize) -> f64 {
    let disc = circle_disc(n, BoundarySplit::DirichletLeft);
    let u = |x: f64, y: f64| x.sin() * y.cos();
    let mut prob =
        ProblemData::from_functions(&disc, |x, y| 2.0 * x.sin() * y.cos(), u, |_, _| 0.0);
    for (k, g) in disc.ghosts().iter().enumerate() {
        if g.bc == BcKind::Neumann {
            let [x, y] = g.projection;
            let (nx, ny) = ((x - CX) / R, (y - CY) / R);
            prob.g[k] = x.cos() * y.cos() * nx - x.sin() * y.sin() * ny;
        }
    }
    let sol = DirectSolver::new(&disc)
        .unwrap()
        .solve(&prob, &disc)
        .unwrap();
    let grid = disc.grid();
    (0..grid.len())
        .filter(|&k| disc.is_interior(k))
        .map(|k| {
            let [x, y] = grid.coords_of(k);
            (sol[k] - u(x, y)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn manufactured_solution_converges_at_second_order() {
    let e: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| manufactured_error(n))
        .collect();
    let order = (e[0] / e[2]).log2() / 2.0;
    assert!(
        (1.7..=2.3).contains(&order),
        "errors {e:?}, observed order {order}"
    );
}

pub fn experiment_rows_round_trip_through_csv() {
    let rows = vec![
        run_experiment(&ExperimentArgs::standard(DomainSpec::Circle, 16, 8, 2)),
        run_experiment(&ExperimentArgs {
            domain: DomainSpec::Interval,
            n: 64,
            ..ExperimentArgs::default()
        }),
    ];
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let back: Vec<ExperimentRow> = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, rows);
}

pub fn measurements_are_deterministic() {
    let args = ExperimentArgs::standard(DomainSpec::Ellipse, 32, 8, 3);
    let a = run_experiment(&args);
    let b = run_experiment(&args);
    assert_eq!(a.rho, b.rho);
    assert_eq!(a.iterations, b.iterations);
}
