//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Every tolerance is pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use stocomp_core::harmonic::{
    classify, solve_decorated_tree, solve_radial, solve_weighted_path, Attachment, LambdaParam,
    RadialSolution, SeriesBehavior, Status,
};
use stocomp_core::heat::{
    comparison_test, decorated_volume_ratio_series, dirichlet_kernel, dirichlet_mass,
    dirichlet_mass_operator, family_operator, mass_limit, volume_ratio_series, DoublingOptions,
    MassOptions, DEFAULT_KERNEL_CAP, DEFAULT_TIMES,
};
use stocomp_core::sim::{estimate_survival_curve, WalkModel};
use stocomp_core::{
    materialize_ball, Dd, FiniteBall, GraphFamily, IntraSphere, RadialProfile, SequenceSpec,
};

const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

const C1_RUNTIME: Duration = Duration::from_secs(1);

const C2_RADIUS: usize = 50;
const C2_REL_TOL: f64 = 1e-10;
/// Length of the truncated rays in the path-to-infinity oracle. The ray
/// profile decays like `q^j` with `q <= 1/2`, so the cut costs `q^{2L}`.
const C2_RAY_LENGTH: usize = 30;

const C3_RADIUS: usize = 200;
/// At `r = 0` the sandwich collapses to `d(0) = c(0)`; this is the
/// double-double rounding allowed there.
const C3_ORIGIN_REL_TOL: f64 = 1e-28;

const C4_RADIUS: usize = 200;
const C4_MASS_RADIUS: usize = 100;
const C4_BALL_RADIUS: u32 = 3;
const C4_MASS_TOL: f64 = 1e-8;

const C5_TOL: f64 = 1e-9;
const C5_TIMES: [f64; 2] = [0.5, 1.0];
const C5_RADII: [u32; 4] = [1, 2, 3, 4];
const C5_RUNTIME: Duration = Duration::from_secs(10);

const C6_STEP_TOL: f64 = 1e-6;
const C6_GAP: f64 = 0.99;
const C6_NO_GAP_TOL: f64 = 1e-6;
const C6_ORACLE_TOL: f64 = 1e-10;
const C6_RUNTIME: Duration = Duration::from_secs(60);

const C7_PATHS: u64 = 100_000;
const C7_RADIUS: usize = 200;
const C7_TIMES: [f64; 2] = [0.5, 1.0];
const C7_SIGMAS: f64 = 3.0;
const C7_SEED: u64 = 20_240_601;
const C7_RUNTIME: Duration = Duration::from_secs(120);

const C8_RADIUS: u64 = 1000;
const C8_REL_TOL: f64 = 1e-12;
const C8_RUNTIME: Duration = Duration::from_secs(1);

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lam(x: f64) -> LambdaParam {
    LambdaParam::new(x).unwrap()
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

fn dd_exact(x: Dd) -> BigRational {
    rat(x.hi()) + rat(x.lo())
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn upow(base: u64, p: u32) -> BigUint {
    BigUint::from(base).pow(p)
}

// ---------------------------------------------------------------------------
// Families, built directly from sequences.

fn tree(k: SequenceSpec) -> GraphFamily {
    GraphFamily::SymmetricTree { branching: k }
}

fn antitree(s: SequenceSpec) -> GraphFamily {
    GraphFamily::Antitree { sphere: s }
}

fn path(a: SequenceSpec) -> GraphFamily {
    GraphFamily::WeightedPath { weights: a }
}

fn decorated(k: SequenceSpec, kt: SequenceSpec) -> GraphFamily {
    GraphFamily::DecoratedTree {
        branching: k,
        decorations: kt,
    }
}

/// Closed-form description used by the oracles.
#[derive(Clone, Copy, Debug)]
enum Shape {
    /// `k(r) = (r+1)^p`, or `k ≡ c` when `constant` is set.
    Tree { p: u32, constant: Option<u64> },
    /// `S(r) = (r+1)^p`.
    Antitree { p: u32 },
    /// `k(r) = (r+1)^p`, `k̃(r) = r+1`, end vertices.
    Decorated { p: u32 },
    /// `a(r) = (r+1)^p`.
    Path { p: u32 },
}

impl Shape {
    fn k_plus(self, r: u64) -> BigUint {
        match self {
            Shape::Tree {
                constant: Some(c), ..
            } => BigUint::from(c),
            Shape::Tree { p, .. } | Shape::Decorated { p } => upow(r + 1, p),
            Shape::Antitree { p } => upow(r + 2, p),
            Shape::Path { .. } => unreachable!(),
        }
    }

    fn k_minus(self, r: u64) -> BigUint {
        match self {
            _ if r == 0 => BigUint::zero(),
            Shape::Tree { .. } | Shape::Decorated { .. } => BigUint::one(),
            Shape::Antitree { p } => upow(r, p),
            Shape::Path { .. } => unreachable!(),
        }
    }

    fn decorations(self, r: u64) -> u64 {
        match self {
            Shape::Decorated { .. } => r + 1,
            _ => 0,
        }
    }

    fn weight(self, r: u64) -> BigUint {
        match self {
            Shape::Path { p } => upow(r + 1, p),
            _ => unreachable!(),
        }
    }

    /// Core sphere sizes `S(0..=radius)`.
    fn spheres(self, radius: u64) -> Vec<BigUint> {
        match self {
            Shape::Antitree { p } => (0..=radius).map(|r| upow(r + 1, p)).collect(),
            _ => {
                let mut s = vec![BigUint::one()];
                for r in 0..radius {
                    let next = &s[r as usize] * self.k_plus(r);
                    s.push(next);
                }
                s
            }
        }
    }

    fn family(self) -> GraphFamily {
        match self {
            Shape::Tree {
                constant: Some(c), ..
            } => tree(SequenceSpec::constant(c as f64)),
            Shape::Tree { p, .. } => tree(SequenceSpec::poly(p as f64)),
            Shape::Antitree { p } => antitree(SequenceSpec::poly(p as f64)),
            Shape::Decorated { p } => {
                decorated(SequenceSpec::poly(p as f64), SequenceSpec::poly(1.0))
            }
            Shape::Path { p } => path(SequenceSpec::poly(p as f64)),
        }
    }
}

/// The catalog families in closed form.
fn catalog_shapes() -> Vec<(&'static str, Shape)> {
    vec![
        (
            "tree k=(r+1)^2",
            Shape::Tree {
                p: 2,
                constant: None,
            },
        ),
        (
            "tree k=2",
            Shape::Tree {
                p: 0,
                constant: Some(2),
            },
        ),
        (
            "tree k=r+1",
            Shape::Tree {
                p: 1,
                constant: None,
            },
        ),
        ("antitree S=(r+1)^2", Shape::Antitree { p: 2 }),
        ("antitree S=(r+1)^3", Shape::Antitree { p: 3 }),
        ("decorated k=(r+1)^2", Shape::Decorated { p: 2 }),
        ("decorated k=(r+1)^3", Shape::Decorated { p: 3 }),
        ("path a=(r+1)^3", Shape::Path { p: 3 }),
        ("path a=r+1", Shape::Path { p: 1 }),
    ]
}

fn solve_shape(shape: Shape, lambda: LambdaParam, radius: usize) -> RadialSolution {
    match shape.family() {
        GraphFamily::DecoratedTree {
            branching,
            decorations,
        } => solve_decorated_tree(
            &branching,
            &decorations,
            lambda,
            radius,
            Attachment::EndVertex,
        ),
        GraphFamily::WeightedPath { weights } => solve_weighted_path(&weights, lambda, radius),
        fam => solve_radial(&fam.lower_to_profile().unwrap(), lambda, radius),
    }
    .unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: catalog verdicts.

fn criterion_1() -> Check {
    let cases = [
        (
            "tree k=(r+1)^2",
            tree(SequenceSpec::poly(2.0)),
            Status::Incomplete,
        ),
        (
            "antitree S=(r+1)^3",
            antitree(SequenceSpec::poly(3.0)),
            Status::Incomplete,
        ),
        (
            "path a=(r+1)^3",
            path(SequenceSpec::poly(3.0)),
            Status::Incomplete,
        ),
        (
            "tree k=2",
            tree(SequenceSpec::constant(2.0)),
            Status::Complete,
        ),
        (
            "tree k=7",
            tree(SequenceSpec::constant(7.0)),
            Status::Complete,
        ),
        (
            "antitree S=(r+1)^2",
            antitree(SequenceSpec::poly(2.0)),
            Status::Complete,
        ),
        (
            "decorated k=(r+1)^2 k~=r+1",
            decorated(SequenceSpec::poly(2.0), SequenceSpec::poly(1.0)),
            Status::Complete,
        ),
        (
            "path a=r+1",
            path(SequenceSpec::poly(1.0)),
            Status::Complete,
        ),
        // Profiles whose Σ 1/K₊ diverges.
        (
            "tree k=r+1",
            tree(SequenceSpec::poly(1.0)),
            Status::Complete,
        ),
        (
            "tree k=r+1 with complete spheres",
            GraphFamily::IntraSphereTree {
                branching: SequenceSpec::poly(1.0),
                intra: IntraSphere::Complete,
            },
            Status::Complete,
        ),
        (
            "custom k+=r+2 k-=r S=r+1",
            GraphFamily::CustomRadial(
                RadialProfile::custom(
                    SequenceSpec::poly_shifted(1.0, 2.0),
                    SequenceSpec::poly_shifted(1.0, 0.0),
                    SequenceSpec::constant(0.0),
                    SequenceSpec::poly(1.0),
                )
                .unwrap(),
            ),
            Status::Complete,
        ),
        (
            "tree k=[3,1,4] then r+1",
            tree(SequenceSpec::table(
                vec![3.0, 1.0, 4.0],
                SequenceSpec::poly(1.0),
            )),
            Status::Complete,
        ),
    ];
    let start = Instant::now();
    for (name, family, want) in &cases {
        let v = classify(family).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            v.status == *want,
            "{name}: got {:?}, want {want:?}",
            v.status
        );
        ensure!(v.exact, "{name}: verdict not symbolic");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < C1_RUNTIME, "took {elapsed:?}");

    let report = stocomp::commands::catalog(&stocomp::catalog::builtin(), 2000)
        .map_err(|e| e.to_string())?;
    ensure!(report.code == 0, "built-in catalog has mismatches");
    Ok(format!(
        "{} families exact and correct in {elapsed:.2?}; built-in catalog clean",
        cases.len()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 2: recurrences against dense solves.

/// Gaussian elimination over the rationals.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .find(|&i| !a[i][col].is_zero())
            .expect("singular system");
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let f = &a[row][col] / &a[col][col];
            for j in col..n {
                if !a[col][j].is_zero() {
                    let d = &f * &a[col][j];
                    a[row][j] -= d;
                }
            }
            let d = &f * &b[col];
            b[row] -= d;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                s -= &a[i][j] * &x[j];
            }
        }
        x[i] = s / &a[i][i];
    }
    x
}

/// `(Δ + λ) w = 0` on spheres `0..R-1` with `w(0) = 1`, unknowns `w(0..=R)`
/// and, for decorated trees, the end-vertex values `u(0..R)`.
fn dense_oracle(shape: Shape, lambda: f64, radius: usize) -> Vec<f64> {
    let l = rat(lambda);
    let ends = matches!(shape, Shape::Decorated { .. });
    let n = radius + 1 + if ends { radius } else { 0 };
    let mut a = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![BigRational::zero(); n];
    a[0][0] = BigRational::one();
    b[0] = BigRational::one();
    for r in 0..radius {
        let row = r + 1;
        let (up, down) = match shape {
            Shape::Path { .. } => (
                big(&shape.weight(r as u64)),
                if r == 0 {
                    BigRational::zero()
                } else {
                    big(&shape.weight(r as u64 - 1))
                },
            ),
            _ => (big(&shape.k_plus(r as u64)), big(&shape.k_minus(r as u64))),
        };
        let kt = int(shape.decorations(r as u64));
        a[row][r] = &up + &down + &kt + &l;
        a[row][r + 1] = -up;
        if r > 0 {
            a[row][r - 1] = -down;
        }
        if ends {
            let u = radius + 1 + r;
            a[row][u] = -kt;
            // End vertex: (u - w) + λu = 0.
            a[u][u] = BigRational::one() + &l;
            a[u][r] = -BigRational::one();
        }
    }
    solve_rational(a, b)
        .iter()
        .take(radius + 1)
        .map(|x| x.to_f64().unwrap())
        .collect()
}

/// Decorated tree with rays: every ray is a path of `C2_RAY_LENGTH`
/// vertices held at zero beyond its end. Dense LU in `f64`.
fn ray_oracle(p: u32, lambda: f64, radius: usize) -> Vec<f64> {
    let len = C2_RAY_LENGTH;
    let n = radius + 1 + radius * len;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    a[(0, 0)] = 1.0;
    b[0] = 1.0;
    for r in 0..radius {
        let row = r + 1;
        let k = ((r + 1) as f64).powi(p as i32);
        let kt = (r + 1) as f64;
        let down = if r == 0 { 0.0 } else { 1.0 };
        let ray = radius + 1 + r * len;
        a[(row, r)] = k + down + kt + lambda;
        a[(row, r + 1)] = -k;
        if r > 0 {
            a[(row, r - 1)] = -down;
        }
        a[(row, ray)] = -kt;
        for j in 0..len {
            let v = ray + j;
            a[(v, v)] = 2.0 + lambda;
            a[(v, if j == 0 { r } else { v - 1 })] = -1.0;
            if j + 1 < len {
                a[(v, v + 1)] = -1.0;
            }
        }
    }
    let x = a.lu().solve(&b).expect("nonsingular");
    x.iter().take(radius + 1).copied().collect()
}

fn criterion_2() -> Check {
    let mut worst = 0.0f64;
    let mut systems = 0;
    let mut compare = |what: &str, got: &[f64], want: &[f64]| -> Result<(), String> {
        ensure!(
            got.len() == want.len(),
            "{what}: length {} vs {}",
            got.len(),
            want.len()
        );
        for (r, (g, w)) in got.iter().zip(want).enumerate() {
            let e = rel_err(*g, *w);
            ensure!(
                e <= C2_REL_TOL,
                "{what}: r={r} got {g} want {w} (rel {e:.1e})"
            );
            worst = worst.max(e);
        }
        systems += 1;
        Ok(())
    };
    let start = Instant::now();
    for lambda in LAMBDAS {
        for (name, shape) in catalog_shapes() {
            let sol = solve_shape(shape, lam(lambda), C2_RADIUS);
            compare(
                &format!("{name} λ={lambda}"),
                &sol.values(),
                &dense_oracle(shape, lambda, C2_RADIUS),
            )?;
        }
        for p in [2, 3] {
            let sol = solve_decorated_tree(
                &SequenceSpec::poly(p as f64),
                &SequenceSpec::poly(1.0),
                lam(lambda),
                C2_RADIUS,
                Attachment::PathToInfinity,
            )
            .map_err(|e| e.to_string())?;
            compare(
                &format!("decorated k=(r+1)^{p} rays λ={lambda}"),
                &sol.values(),
                &ray_oracle(p, lambda, C2_RADIUS),
            )?;
        }
    }
    // Unit weights, λ = 1: v = 1, 2, 5, 13, ...
    let unit = solve_weighted_path(&SequenceSpec::constant(1.0), lam(1.0), 3)
        .map_err(|e| e.to_string())?;
    ensure!(
        unit.values() == [1.0, 2.0, 5.0, 13.0],
        "unit path gave {:?}",
        unit.values()
    );
    Ok(format!(
        "{systems} systems at R={C2_RADIUS}, worst relative error {worst:.1e} (tol {C2_REL_TOL:.0e}) in {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// Criterion 3: sandwich and monotonicity, exactly.

/// `c(r)` with `c(r) w(0) <= d(r) <= c(r) w(r)`, from closed forms.
fn envelope_exact(shape: Shape, lambda: f64, radius: usize) -> Vec<BigRational> {
    let l = rat(lambda);
    if let Shape::Path { .. } = shape {
        return (0..radius as u64)
            .map(|r| &l * int(r + 1) / big(&shape.weight(r)))
            .collect();
    }
    let alpha = &l / (BigRational::one() + &l);
    let s = shape.spheres(radius as u64);
    let mut acc = BigRational::zero();
    (0..radius)
        .map(|r| {
            let coef = &l + &alpha * int(shape.decorations(r as u64));
            acc += coef * big(&s[r]);
            &acc / (big(&shape.k_plus(r as u64)) * big(&s[r]))
        })
        .collect()
}

fn criterion_3() -> Check {
    let mut checked = 0usize;
    for lambda in LAMBDAS {
        for (name, shape) in catalog_shapes() {
            let sol = solve_shape(shape, lam(lambda), C3_RADIUS);
            let c = envelope_exact(shape, lambda, C3_RADIUS);
            let w: Vec<BigRational> = sol.w().iter().map(|&x| dd_exact(x)).collect();
            let tag = format!("{name} λ={lambda}");
            for (r, &dr) in sol.increments().iter().enumerate() {
                let d = dd_exact(dr);
                ensure!(d.is_positive(), "{tag}: d({r}) = {d} not positive");
                ensure!(w[r + 1] > w[r], "{tag}: w not increasing at {r}");
                let lo = &c[r] * &w[0];
                let hi = &c[r] * &w[r];
                if r == 0 {
                    let gap = ((&d - &lo).abs() / &lo).to_f64().unwrap();
                    ensure!(
                        gap <= C3_ORIGIN_REL_TOL,
                        "{tag}: d(0) differs from c(0) by {gap:.1e}"
                    );
                } else {
                    ensure!(lo <= d, "{tag}: lower bound fails at r={r}");
                    ensure!(d <= hi, "{tag}: upper bound fails at r={r}");
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} increments positive and sandwiched exactly, R={C3_RADIUS}"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 4: same-sphere edges do not matter.

/// Dense `Σ_y p_t(x₀, y)` on a materialized ball, boundary held at zero.
fn dense_ball_mass(ball: &FiniteBall, t: f64) -> f64 {
    let n = ball.vertex_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        if ball.is_boundary(v) {
            continue;
        }
        l[(v, v)] = ball.degree(v) as f64;
        for &u in ball.neighbors(v) {
            if !ball.is_boundary(u) {
                l[(v, u)] = -1.0;
            }
        }
    }
    let mut e = DVector::zeros(n);
    e[0] = 1.0;
    let p = (-(l * t)).exp() * e;
    (0..n).filter(|&v| !ball.is_boundary(v)).map(|v| p[v]).sum()
}

fn criterion_4() -> Check {
    let opts = MassOptions::default();
    let mut worst = 0.0f64;
    for p in [2.0, 3.0] {
        let bare = RadialProfile::antitree(SequenceSpec::poly(p)).map_err(|e| e.to_string())?;
        let full = bare
            .with_intra(IntraSphere::Complete)
            .map_err(|e| e.to_string())?;
        for lambda in LAMBDAS {
            let a = solve_radial(&bare, lam(lambda), C4_RADIUS).map_err(|e| e.to_string())?;
            let b = solve_radial(&full, lam(lambda), C4_RADIUS).map_err(|e| e.to_string())?;
            let bits = |s: &RadialSolution| {
                s.w()
                    .iter()
                    .map(|x| (x.hi().to_bits(), x.lo().to_bits()))
                    .collect::<Vec<_>>()
            };
            ensure!(bits(&a) == bits(&b), "S=(r+1)^{p} λ={lambda}: w differs");
        }
        let ma = dirichlet_mass(&bare, C4_MASS_RADIUS, &DEFAULT_TIMES, &opts)
            .map_err(|e| e.to_string())?;
        let mb = dirichlet_mass(&full, C4_MASS_RADIUS, &DEFAULT_TIMES, &opts)
            .map_err(|e| e.to_string())?;
        for (x, y) in ma.rows[0].mass.iter().zip(&mb.rows[0].mass) {
            worst = worst.max((x - y).abs());
        }
        // The radial mass against the materialized graph with complete spheres.
        let ball = materialize_ball(&GraphFamily::CustomRadial(full.clone()), C4_BALL_RADIUS)
            .map_err(|e| e.to_string())?;
        let small = dirichlet_mass(&bare, C4_BALL_RADIUS as usize, &DEFAULT_TIMES, &opts)
            .map_err(|e| e.to_string())?;
        for (k, &t) in DEFAULT_TIMES.iter().enumerate() {
            let e = (small.rows[0].mass[k] - dense_ball_mass(&ball, t)).abs();
            ensure!(
                e <= C4_MASS_TOL,
                "S=(r+1)^{p} t={t}: radial mass off the ball by {e:.1e}"
            );
            worst = worst.max(e);
        }
    }
    ensure!(worst <= C4_MASS_TOL, "mass curves differ by {worst:.1e}");
    Ok(format!(
        "w bitwise identical; mass curves within {worst:.1e} (tol {C4_MASS_TOL:.0e})"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 5: heat kernels of T_k and G_k.

fn dense_kernel(ball: &FiniteBall, t: f64) -> DVector<f64> {
    let n = ball.vertex_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        if ball.is_boundary(v) {
            continue;
        }
        l[(v, v)] = ball.degree(v) as f64;
        for &u in ball.neighbors(v) {
            if !ball.is_boundary(u) {
                l[(v, u)] = -1.0;
            }
        }
    }
    let mut e = DVector::zeros(n);
    e[0] = 1.0;
    (-(l * t)).exp() * e
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (name, k) in [
        ("k=2", SequenceSpec::constant(2.0)),
        ("k=r+2", SequenceSpec::poly_shifted(1.0, 2.0)),
    ] {
        for radius in C5_RADII {
            let t_ball = materialize_ball(&tree(k.clone()), radius).map_err(|e| e.to_string())?;
            let g_ball = materialize_ball(
                &GraphFamily::IntraSphereTree {
                    branching: k.clone(),
                    intra: IntraSphere::Complete,
                },
                radius,
            )
            .map_err(|e| e.to_string())?;
            for t in C5_TIMES {
                let tag = format!("{name} R={radius} t={t}");
                let ot = dense_kernel(&t_ball, t);
                let og = dense_kernel(&g_ball, t);
                let pt = dirichlet_kernel(&t_ball, &[t], 1e-15)
                    .map_err(|e| e.to_string())?
                    .remove(0);
                let pg = dirichlet_kernel(&g_ball, &[t], 1e-15)
                    .map_err(|e| e.to_string())?
                    .remove(0);
                for v in 0..t_ball.vertex_count() {
                    let e = (pt[v] - ot[v])
                        .abs()
                        .max((pg[v] - og[v]).abs())
                        .max((og[v] - ot[v]).abs());
                    ensure!(e <= C5_TOL, "{tag}: vertex {v} off by {e:.1e}");
                    worst = worst.max(e);
                }
                for r in 0..=radius {
                    for p in [&ot, &og] {
                        let (lo, hi) = t_ball
                            .sphere(r)
                            .map(|v| p[v])
                            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                                (a.min(x), b.max(x))
                            });
                        ensure!(
                            hi - lo <= C5_TOL,
                            "{tag}: oracle spread {:.1e} on sphere {r}",
                            hi - lo
                        );
                    }
                }
                let c = comparison_test(&k, radius, t, DEFAULT_KERNEL_CAP)
                    .map_err(|e| e.to_string())?;
                ensure!(
                    c.max_sphere_spread <= C5_TOL,
                    "{tag}: spread {:.1e}",
                    c.max_sphere_spread
                );
                ensure!(
                    c.max_cross_difference <= C5_TOL,
                    "{tag}: cross {:.1e}",
                    c.max_cross_difference
                );
                worst = worst.max(c.max_sphere_spread).max(c.max_cross_difference);
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < C5_RUNTIME, "took {elapsed:?}");
    Ok(format!(
        "{cases} cases, worst deviation {worst:.1e} (tol {C5_TOL:.0e}) in {elapsed:.2?}"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 6: mass dichotomy.

/// Radial survival from the root by a dense exponential of the tree's
/// birth-death generator on spheres `0..R-1`.
fn dense_tree_mass(k: impl Fn(usize) -> f64, radius: usize, t: f64) -> f64 {
    let mut l = DMatrix::<f64>::zeros(radius, radius);
    for r in 0..radius {
        let down = if r == 0 { 0.0 } else { 1.0 };
        l[(r, r)] = k(r) + down;
        if r + 1 < radius {
            l[(r, r + 1)] = -k(r);
        }
        if r > 0 {
            l[(r, r - 1)] = -down;
        }
    }
    let ones = DVector::from_element(radius, 1.0);
    ((-(l * t)).exp() * ones)[0]
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let times = [1.0];
    let doubling = DoublingOptions::default();
    let opts = MassOptions::default();

    let quad = mass_limit(&tree(SequenceSpec::poly(2.0)), &times, &doubling, &opts)
        .map_err(|e| e.to_string())?;
    let bin = mass_limit(&tree(SequenceSpec::constant(2.0)), &times, &doubling, &opts)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    for (name, c, k) in [
        (
            "k=(r+1)^2",
            &quad,
            &(|r: usize| ((r + 1) * (r + 1)) as f64) as &dyn Fn(usize) -> f64,
        ),
        ("k=2", &bin, &|_| 2.0),
    ] {
        ensure!(c.converged, "{name}: doubling did not converge");
        ensure!(
            c.differences[0] <= C6_STEP_TOL,
            "{name}: last change {:.1e}",
            c.differences[0]
        );
        for w in c.rows.windows(2) {
            ensure!(
                w[1].mass[0] >= w[0].mass[0],
                "{name}: M_R not nondecreasing in R"
            );
        }
        let first = &c.rows[0];
        let oracle = dense_tree_mass(k, first.radius, 1.0);
        let e = (first.mass[0] - oracle).abs();
        ensure!(
            e <= C6_ORACLE_TOL,
            "{name}: M_{} off the dense oracle by {e:.1e}",
            first.radius
        );
    }
    ensure!(
        quad.limit[0] < C6_GAP,
        "k=(r+1)^2: limit {} not below {C6_GAP}",
        quad.limit[0]
    );
    ensure!(
        (bin.limit[0] - 1.0).abs() <= C6_NO_GAP_TOL,
        "k=2: limit {} not 1",
        bin.limit[0]
    );
    ensure!(elapsed < C6_RUNTIME, "took {elapsed:?}");
    Ok(format!(
        "k=(r+1)^2: M(1) -> {:.7} at R={} (change {:.1e}); k=2: M(1) -> {:.12} at R={} in {elapsed:.2?}",
        quad.limit[0],
        quad.rows.last().unwrap().radius,
        quad.differences[0],
        bin.limit[0],
        bin.rows.last().unwrap().radius,
    ))
}

// ---------------------------------------------------------------------------
// Criterion 7: Monte Carlo against the Dirichlet mass.

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut zs = Vec::new();
    for (name, fam) in [
        ("k=2", tree(SequenceSpec::constant(2.0))),
        ("k=(r+1)^2", tree(SequenceSpec::poly(2.0))),
        ("antitree S=(r+1)^3", antitree(SequenceSpec::poly(3.0))),
    ] {
        let model = WalkModel::from_family(&fam, C7_RADIUS).map_err(|e| e.to_string())?;
        let est = estimate_survival_curve(&model, &C7_TIMES, C7_PATHS, C7_SEED)
            .map_err(|e| e.to_string())?;
        let op = family_operator(&fam, C7_RADIUS).map_err(|e| e.to_string())?;
        let mass = dirichlet_mass_operator(&op, &C7_TIMES, &MassOptions::default())
            .map_err(|e| e.to_string())?;
        for (e, &m) in est.iter().zip(&mass.rows[0].mass) {
            let m = m.clamp(0.0, 1.0);
            let sigma = (m * (1.0 - m) / C7_PATHS as f64).sqrt();
            let diff = (e.estimate - m).abs();
            ensure!(
                diff <= C7_SIGMAS * sigma,
                "{name} t={}: estimate {} vs M={m} ({:.2} sigma)",
                e.horizon,
                e.estimate,
                diff / sigma
            );
            if sigma > 0.0 {
                worst = worst.max(diff / sigma);
                zs.push(format!(
                    "{name} t={}: {:+.2}",
                    e.horizon,
                    (e.estimate - m) / sigma
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < C7_RUNTIME, "took {elapsed:?}");
    Ok(format!(
        "N={C7_PATHS}, worst |z| {worst:.2} (limit {C7_SIGMAS}) [{}] in {elapsed:.2?}",
        zs.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// Criterion 8: volume growth does not decide.

fn criterion_8() -> Check {
    let start = Instant::now();
    let anti = volume_ratio_series(
        &RadialProfile::antitree(SequenceSpec::poly(3.0)).unwrap(),
        C8_RADIUS,
    )
    .map_err(|e| e.to_string())?;
    let deco = decorated_volume_ratio_series(
        &SequenceSpec::poly(2.0),
        &SequenceSpec::poly(1.0),
        C8_RADIUS,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(elapsed < C8_RUNTIME, "took {elapsed:?}");

    // Antitree S(r) = (r+1)^3: V(r) = ((r+1)(r+2)/2)^2.
    let mut sum = 0.0;
    for r in 0..=C8_RADIUS {
        let v = ((r + 1) * (r + 2) / 2) as f64;
        let term = v * v / ((r + 2) as f64).powi(3);
        ensure!(
            term >= r as f64 / 4.0 - 1.0,
            "antitree term {r} below (r-4)/4"
        );
        sum += term;
        let got = anti.volume_over_next_sphere[r as usize];
        ensure!(
            rel_err(got, sum) <= C8_REL_TOL,
            "antitree partial sum {r}: {got} vs {sum}"
        );
    }
    ensure!(
        anti.next_sphere_assessment.behavior == SeriesBehavior::Divergent,
        "antitree not flagged divergent"
    );
    let flux = anti
        .flux_assessment
        .as_ref()
        .ok_or("antitree without flux series")?;
    ensure!(
        flux.behavior == SeriesBehavior::Convergent,
        "antitree flux series not convergent"
    );
    ensure!(
        classify(&antitree(SequenceSpec::poly(3.0))).unwrap().status == Status::Incomplete,
        "antitree not incomplete"
    );

    // Decorated k = (r+1)^2, k̃ = r+1. End vertices hung on S(i-1) sit on
    // sphere i, so Ṽ(r) = V(r) + Σ_{1<=i<=r} i S(i-1) and
    // S̃(r+1) = S(r+1) + (r+1) S(r).
    let shape = Shape::Decorated { p: 2 };
    let s = shape.spheres(C8_RADIUS + 1);
    let mut v_tilde = BigUint::zero();
    let mut sum = 0.0;
    for r in 0..=C8_RADIUS as usize {
        v_tilde += &s[r];
        if r >= 1 {
            v_tilde += BigUint::from(r) * &s[r - 1];
        }
        let s_next = &s[r + 1] + BigUint::from(r + 1) * &s[r];
        let term = (big(&v_tilde) / big(&s_next)).to_f64().unwrap();
        if r >= 1 {
            ensure!(
                term <= 4.0 / ((r + 1) * (r + 1)) as f64,
                "decorated term {r} above 4/(r+1)^2"
            );
        }
        sum += term;
        let got = deco.volume_over_next_sphere[r];
        ensure!(
            rel_err(got, sum) <= C8_REL_TOL,
            "decorated partial sum {r}: {got} vs {sum}"
        );
    }
    ensure!(
        deco.next_sphere_assessment.behavior == SeriesBehavior::Convergent,
        "decorated not flagged convergent"
    );
    ensure!(
        classify(&shape.family()).unwrap().status == Status::Complete,
        "decorated tree not complete"
    );
    Ok(format!(
        "to R={C8_RADIUS}: incomplete antitree sum V/S(r+1) = {:.3e} (diverging), complete decorated tree = {:.6} (tail <= {:.0e}) in {elapsed:.2?}",
        anti.volume_over_next_sphere[C8_RADIUS as usize],
        deco.volume_over_next_sphere[C8_RADIUS as usize],
        4.0 / C8_RADIUS as f64,
    ))
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical reruns of the command-line tool.

struct Run {
    code: Option<i32>,
    stdout: Vec<u8>,
    files: Vec<Vec<u8>>,
}

fn run_cli(args: &[&str], threads: &str, files: &[&Path]) -> Run {
    for f in files {
        let _ = std::fs::remove_file(f);
    }
    let out = Command::new(env!("CARGO_BIN_EXE_stocomp"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("spawn stocomp");
    Run {
        code: out.status.code(),
        stdout: out.stdout,
        files: files
            .iter()
            .map(|f| std::fs::read(f).unwrap_or_default())
            .collect(),
    }
}

fn criterion_9() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("mass.csv");
    let trace = dir.path().join("trace.csv");
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"family": {"family": "antitree", "S": "poly:3"}, "times": [0.5, 1.0], "paths": 20000, "seed": 11, "with_mass": true}"#,
    )
    .map_err(|e| e.to_string())?;
    let (csv_s, trace_s, config_s) = (
        csv.to_str().unwrap().to_owned(),
        trace.to_str().unwrap().to_owned(),
        config.to_str().unwrap().to_owned(),
    );
    let runs: Vec<(Vec<&str>, Vec<&Path>)> = vec![
        (vec!["catalog"], vec![]),
        (
            vec!["classify", "--family", "antitree", "--S", "poly:3"],
            vec![],
        ),
        (
            vec![
                "solve",
                "--family",
                "decorated-tree",
                "--k",
                "poly:2",
                "--k-tilde",
                "poly:1",
                "--radius",
                "100",
            ],
            vec![],
        ),
        (
            vec![
                "mass",
                "--family",
                "tree",
                "--k",
                "poly:2",
                "--max-radius",
                "256",
                "--out",
                &csv_s,
            ],
            vec![csv.as_path()],
        ),
        (vec!["simulate", "--config", &config_s], vec![]),
        (
            vec![
                "simulate", "--family", "tree", "--k", "poly:2", "--paths", "50", "--seed", "3",
                "--trace", &trace_s,
            ],
            vec![trace.as_path()],
        ),
        (
            vec![
                "compare", "--family", "tree", "--k", "poly:1", "--radius", "4",
            ],
            vec![],
        ),
        (
            vec!["compare", "--config", &config_s, "--volume-series"],
            vec![],
        ),
    ];
    for (args, files) in &runs {
        let a = run_cli(args, "1", files);
        let b = run_cli(args, "4", files);
        let c = run_cli(args, "4", files);
        let cmd = args.join(" ");
        ensure!(a.code == Some(0), "`{cmd}` exited with {:?}", a.code);
        for other in [&b, &c] {
            ensure!(a.code == other.code, "`{cmd}`: exit codes differ");
            ensure!(a.stdout == other.stdout, "`{cmd}`: stdout differs");
            ensure!(a.files == other.files, "`{cmd}`: written files differ");
        }
        ensure!(!a.stdout.is_empty(), "`{cmd}` printed nothing");
    }
    Ok(format!(
        "{} commands rerun 3x (1 and 4 threads), outputs byte-identical",
        runs.len()
    ))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("catalog verdicts", criterion_1),
        ("recurrences match dense solves", criterion_2),
        ("sandwich and monotonicity", criterion_3),
        ("same-sphere edges irrelevant", criterion_4),
        ("heat kernels of T_k and G_k", criterion_5),
        ("mass dichotomy", criterion_6),
        ("Monte Carlo concordance", criterion_7),
        ("volume growth does not decide", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
