//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]` line
//! per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use hingekit_core::analysis::{
    cycle_mobility, cycle_mobility_exact, endpoint_singularity, frame_singularity, platform_flexibility,
    platform_flexibility_exact, Platform,
};
use hingekit_core::binomial;
use hingekit_core::chain::{
    endpoint, endpoint_jacobian, forward_kinematics, numerical_jacobian, trace_flex, Chain, Configuration,
};
use hingekit_core::exterior::{rank_of_span_exact, ExteriorVector};
use hingekit_core::geometry::{rotate_about, Axis, Frame, Isometry};
use hingekit_core::linalg::{determinant, numeric_rank};
use hingekit_core::linkage::{cycle_to_linkage, linkage_path, moduli_invariants, Linkage, Role, VertexLabel};
use hingekit_core::scalar::{int, ratio, Rational};
use hingekit_core::scenario::{classical_scenario, twisted_cubic_tangents, ScenarioParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vector(r: &mut ChaCha8Rng, d: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(d, |_, _| r.random_range(-scale..scale))
}

fn axis_at(r: &mut ChaCha8Rng, origin: DVector<f64>) -> Axis {
    let d = origin.len();
    Axis::new(origin, (0..d - 2).map(|_| vector(r, d, 1.0)).collect()).unwrap()
}

fn random_axes(r: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Axis> {
    (0..n)
        .map(|_| {
            let o = vector(r, d, 2.0);
            axis_at(r, o)
        })
        .collect()
}

fn angles(r: &mut ChaCha8Rng, len: usize) -> Configuration {
    Configuration::new((0..len).map(|_| r.random_range(-PI..PI)).collect())
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// One random open chain with an end point: `(chain, θ)`.
struct Instance {
    chain: Chain,
    theta: Configuration,
    constructed: bool,
}

/// The Jacobian corpus: 1000 chains, `d` cycling through 2..=5 and `n`
/// bodies in 2..=10.
fn corpus() -> Vec<Instance> {
    let mut r = rng(20_240_601);
    (0..1000)
        .map(|i| {
            let d = 2 + i % 4;
            let n = r.random_range(2..=10);
            let axes = random_axes(&mut r, d, n - 1);
            let e = vector(&mut r, d, 2.0);
            let chain = Chain::open(axes, Frame::point(e)).unwrap();
            let theta = angles(&mut r, n - 1);
            Instance { chain, theta, constructed: false }
        })
        .collect()
}

/// A chain whose axes, placed at a random `θ`, all meet one line through the
/// placed end point. Built by choosing the placed axes and pulling them back
/// through the body motions.
fn singular_fixture(r: &mut ChaCha8Rng, d: usize, n: usize) -> Instance {
    let e = vector(r, d, 2.0);
    let u = vector(r, d, 1.0).normalize();
    let theta = angles(r, n - 1);
    let mut g = Isometry::identity(d);
    let mut axes = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let t = r.random_range(-3.0..3.0);
        let placed = axis_at(r, &e + &u * t);
        let reference = g.inverse().apply(&placed).unwrap();
        g = g.compose(&rotate_about(&reference, theta.angles()[i]));
        axes.push(reference);
    }
    let e_ref = g.inverse().apply(&e).unwrap();
    let chain = Chain::open(axes, Frame::point(e_ref)).unwrap();
    Instance { chain, theta, constructed: true }
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let items = corpus();
    for inst in &items {
        let analytic = endpoint_jacobian(&inst.chain, &inst.theta).unwrap();
        let c = &inst.chain;
        let fd =
            numerical_jacobian(|t| endpoint(c, &Configuration::new(t.to_vec())).unwrap(), inst.theta.angles(), 1e-5);
        let err = max_abs(&(analytic - fd));
        worst = worst.max(err);
        if err > 1e-6 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} chains, d in 2..=5, max entrywise error {worst:.2e} (bound 1e-6)", items.len()))
}

/// For each placed axis, the vector `c` with `c·u` the normalized incidence
/// defect of the line through `e` with direction `u`: twice the signed area
/// (d = 2) or the triple product (d = 3) divided by the distance from `e` to
/// the axis. Axes through `e` meet every such line and contribute nothing.
fn incidence_normals(e: &DVector<f64>, placed: &[Axis]) -> Vec<[f64; 3]> {
    let d = e.len();
    placed
        .iter()
        .filter_map(|a| {
            let w = a.origin() - e;
            if d == 2 {
                let dist = w.norm();
                (dist > 1e-12).then(|| [-w[1] / dist, w[0] / dist, 0.0])
            } else {
                let v = &a.dirs()[0];
                let dist = (&w - v * w.dot(v)).norm();
                let c = [w[1] * v[2] - w[2] * v[1], w[2] * v[0] - w[0] * v[2], w[0] * v[1] - w[1] * v[0]];
                (dist > 1e-12).then(|| c.map(|x| x / dist))
            }
        })
        .collect()
}

/// Unit direction at polar angle `p[0]` and azimuth `p[1]` (degrees), with
/// its partial derivatives.
fn direction(p: [f64; 2]) -> ([f64; 3], [[f64; 3]; 2]) {
    let (phi, psi) = (p[0].to_radians(), p[1].to_radians());
    let r = PI / 180.0;
    let u = [phi.sin() * psi.cos(), phi.sin() * psi.sin(), phi.cos()];
    let du_phi = [r * phi.cos() * psi.cos(), r * phi.cos() * psi.sin(), -r * phi.sin()];
    let du_psi = [-r * phi.sin() * psi.sin(), r * phi.sin() * psi.cos(), 0.0];
    (u, [du_phi, du_psi])
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Smallest incidence defect over lines through `e`: a 1° grid over the
/// projective sphere of directions, then Levenberg-Marquardt refinement from
/// the best grid points.
fn grid_search(e: &DVector<f64>, placed: &[Axis]) -> f64 {
    let d = e.len();
    let normals = incidence_normals(e, placed);
    // in the plane the direction is (cos a, sin a), the sphere's equator
    let at = |p: [f64; 2]| if d == 2 { direction([90.0, p[0]]) } else { direction(p) };
    let residuals = |p: [f64; 2]| {
        let (u, du) = at(p);
        let r: Vec<f64> = normals.iter().map(|c| dot3(c, &u)).collect();
        let jac: Vec<[f64; 2]> = normals
            .iter()
            .map(|c| if d == 2 { [dot3(c, &du[1]), 0.0] } else { [dot3(c, &du[0]), dot3(c, &du[1])] })
            .collect();
        (r, jac)
    };
    let f = |p: [f64; 2]| residuals(p).0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut grid: Vec<(f64, [f64; 2])> = Vec::new();
    if d == 2 {
        grid.extend((0..180).map(|a| [a as f64, 0.0]).map(|p| (f(p), p)));
    } else {
        for a in 0..=180 {
            grid.extend((0..180).map(|b| [a as f64, b as f64]).map(|p| (f(p), p)));
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(v0, p0) in grid.iter().take(3) {
        let (mut v, mut p) = (v0, p0);
        let mut lambda = 1e-3;
        for _ in 0..200 {
            let (r, jac) = residuals(p);
            let (mut a, mut b, mut c, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (ri, ji) in r.iter().zip(&jac) {
                a += ji[0] * ji[0];
                b += ji[0] * ji[1];
                c += ji[1] * ji[1];
                g0 += ji[0] * ri;
                g1 += ji[1] * ri;
            }
            let (a, c) = (a * (1.0 + lambda) + 1e-300, c * (1.0 + lambda) + 1e-300);
            let det = a * c - b * b;
            let step = [-(c * g0 - b * g1) / det, -(a * g1 - b * g0) / det];
            let q = [p[0] + step[0], p[1] + step[1]];
            let fq = f(q);
            if fq < v {
                v = fq;
                p = q;
                lambda = (lambda / 10.0).max(1e-12);
            } else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
        best = best.min(v);
    }
    best
}

fn criterion_2() -> Outcome {
    let mut items: Vec<Instance> = corpus().into_iter().filter(|i| i.chain.dim() <= 3).collect();
    let mut r = rng(77);
    for j in 0..60 {
        let d = 2 + j % 2;
        let n = r.random_range(3..=10);
        items.push(singular_fixture(&mut r, d, n));
    }
    let (mut agree, mut singular, mut constructed_singular) = (0, 0, 0);
    let mut disagreements = Vec::new();
    let (mut worst_singular, mut best_regular) = (0.0f64, f64::INFINITY);
    for (idx, inst) in items.iter().enumerate() {
        let verdict = endpoint_singularity(&inst.chain, &inst.theta, TOL).unwrap();
        let p = forward_kinematics(&inst.chain, &inst.theta).unwrap();
        let e = p.frame_at.origin().clone();
        let defect = grid_search(&e, &p.axes_at);
        let oracle = defect <= 1e-8;
        if oracle {
            worst_singular = worst_singular.max(defect);
        } else {
            best_regular = best_regular.min(defect);
        }
        if verdict.singular == oracle {
            agree += 1;
        } else {
            disagreements.push(idx);
        }
        if verdict.singular {
            singular += 1;
            if inst.constructed {
                constructed_singular += 1;
            }
        }
    }
    let total = items.len();
    let pass = agree == total && constructed_singular >= 50;
    outcome(
        pass,
        format!(
            "{agree}/{total} verdicts agree with the 1° incident-line search ({singular} singular, {constructed_singular} constructed; defect <= {worst_singular:.1e} when incident, >= {best_regular:.1e} otherwise){}",
            if disagreements.is_empty() { String::new() } else { format!("; disagreements at {disagreements:?}") }
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut r = rng(303);
    let mut same = 0;
    let mut singular = 0;
    for i in 0..500 {
        let d = 2 + i % 4;
        let n = r.random_range(2..=9);
        let inst = if i % 3 == 0 && n > 2 {
            singular_fixture(&mut r, d, n)
        } else {
            let axes = random_axes(&mut r, d, n - 1);
            let e = vector(&mut r, d, 2.0);
            Instance {
                chain: Chain::open(axes, Frame::point(e)).unwrap(),
                theta: angles(&mut r, n - 1),
                constructed: false,
            }
        };
        let a = endpoint_singularity(&inst.chain, &inst.theta, TOL).unwrap().singular;
        let b = frame_singularity(&inst.chain, &inst.theta, TOL).unwrap().singular;
        same += usize::from(a == b);
        singular += usize::from(a);
    }
    let mut rank_ok = 0;
    let mut deficient = 0;
    let mut mismatches = Vec::new();
    for i in 0..200 {
        let d = 3 + i % 2;
        let ks: Vec<usize> = if d == 3 { vec![0, 1] } else { vec![0, 1, 2] };
        let k = ks[(i / 2) % ks.len()];
        let full = binomial(d + 1, 2) - binomial(d - k, 2);
        let joints = r.random_range(1..=full + 1);
        let axes = random_axes(&mut r, d, joints);
        let frame = Frame::new(vector(&mut r, d, 2.0), (0..k).map(|_| vector(&mut r, d, 1.0)).collect()).unwrap();
        let c = Chain::open(axes, frame).unwrap();
        let theta = angles(&mut r, joints);
        let v = frame_singularity(&c, &theta, TOL).unwrap();
        let fd = numerical_jacobian(
            |t| forward_kinematics(&c, &Configuration::new(t.to_vec())).unwrap().frame_at.to_vector(),
            theta.angles(),
            1e-5,
        );
        let fd_rank = numeric_rank(&fd, 1e-6).rank;
        if fd_rank == v.rank {
            rank_ok += 1;
        } else {
            mismatches.push((d, k, v.rank, fd_rank));
        }
        deficient += usize::from(v.rank < full);
    }
    outcome(
        same == 500 && rank_ok == 200,
        format!(
            "k=0 frame and end-point verdicts agree on {same}/500 ({singular} singular); frame rank equals finite-difference rank on {rank_ok}/200 ({deficient} deficient){}",
            if mismatches.is_empty() { String::new() } else { format!("; mismatches (d, k, rank, fd) {mismatches:?}") }
        ),
    )
}

fn criterion_4() -> Outcome {
    let six: Vec<Rational> = [0, 1, -1, 2, -2, 3].iter().map(|&t| int(t)).collect();
    let more = [int(4), int(-3), ratio(1, 2), ratio(5, 3)];
    let tangents = twisted_cubic_tangents(&six).unwrap();
    let cert = rank_of_span_exact(&tangents, 6).unwrap();
    let mut all = six.clone();
    all.extend(more.iter().cloned());
    let ten = twisted_cubic_tangents(&all).unwrap();
    let cert10 = rank_of_span_exact(&ten, 6).unwrap();

    // independent check: the 6x6 coordinate determinant vanishes, some 5x5
    // minor does not, and one linear complex contains all ten tangents
    let rows: Vec<Vec<Rational>> = tangents.iter().map(|t| t.coeffs().to_vec()).collect();
    let det_zero = determinant(&rows) == int(0);
    let minor_nonzero = (0..6).any(|drop| {
        let m: Vec<Vec<Rational>> = rows[..5]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, x)| x.clone()).collect())
            .collect();
        determinant(&m) != int(0)
    });
    let complex = cert.conull.clone().unwrap_or_default();
    let in_complex = !complex.is_empty()
        && ten.iter().all(|t| t.coeffs().iter().zip(&complex).fold(int(0), |acc, (a, b)| acc + a * b) == int(0));
    let pass = cert.rank == 5 && cert10.rank == 5 && det_zero && minor_nonzero && in_complex;
    outcome(
        pass,
        format!(
            "exact rank {} for t = (0, 1, -1, 2, -2, 3), {} with 4 more parameters; determinant zero {det_zero}, 5x5 minor nonzero {minor_nonzero}, common linear complex {in_complex}",
            cert.rank, cert10.rank
        ),
    )
}

fn half_turn() -> Vec<Vec<Rational>> {
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    if i != j {
                        int(0)
                    } else if i < 2 {
                        int(-1)
                    } else {
                        int(1)
                    }
                })
                .collect()
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let t = half_turn();
    let (mut bounded, mut generic, mut involution, mut exact_five) = (0, 0, 0, 0);
    for seed in 0..100u64 {
        let s = classical_scenario("bricard-symmetric-six", &ScenarioParams { seed, ..Default::default() }).unwrap();
        let v = cycle_mobility(&s.axes().unwrap(), TOL).unwrap();
        bounded += usize::from(v.rank <= 5);
        generic += usize::from(v.rank == 5 && v.mobility == Some(1));
        let exact_axes = s.exact_axes().unwrap();
        exact_five += usize::from(cycle_mobility_exact(&exact_axes).unwrap().rank == 5);
        let lines: Vec<ExteriorVector<Rational>> = exact_axes.iter().map(|a| a.plucker()).collect();
        let sums: Vec<_> = lines.iter().map(|l| l.try_add(&l.transform(&t).unwrap()).unwrap()).collect();
        involution += usize::from(rank_of_span_exact(&sums, 6).unwrap().rank <= 2);
    }
    outcome(
        bounded == 100 && generic >= 95 && involution == 100,
        format!(
            "rank <= 5 on {bounded}/100 seeds, rank 5 with mobility 1 on {generic}/100 (exact rank 5 on {exact_five}/100), involution sums of rank <= 2 on {involution}/100"
        ),
    )
}

fn criterion_6() -> Outcome {
    let (mut counts, mut increments, mut total) = (0, 0, 0);
    let mut bad = Vec::new();
    for n in 6..=10usize {
        for seed in 0..100u64 {
            total += 1;
            let mut r = rng(6_000 + 1_000 * n as u64 + seed);
            let mut axes = random_axes(&mut r, 3, n);
            let m = cycle_mobility(&axes, TOL).unwrap().mobility.unwrap();
            if m == n - 6 {
                counts += 1;
            } else {
                bad.push((n, seed, m));
            }
            let last = axes.last().unwrap().clone();
            let o = last.origin() + vector(&mut r, 3, 1e-3);
            let dir = &last.dirs()[0] + vector(&mut r, 3, 1e-3);
            axes.push(Axis::new(o, vec![dir]).unwrap());
            let m2 = cycle_mobility(&axes, TOL).unwrap().mobility.unwrap();
            increments += usize::from(m2 == m + 1);
        }
    }
    outcome(
        counts == total && increments == total,
        format!(
            "mobility n - 6 on {counts}/{total} cycles (n in 6..=10), +1 after a perturbed duplicate axis on {increments}/{total}{}",
            if bad.is_empty() { String::new() } else { format!("; off-count {bad:?}") }
        ),
    )
}

fn rational_point(r: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| ratio(r.random_range(-64..=64), 16)).collect()
}

fn to_f64(p: &[Rational]) -> DVector<f64> {
    use hingekit_core::scalar::Scalar;
    DVector::from_iterator(p.len(), p.iter().map(|x| x.to_f64()))
}

fn platform_verdicts(d: usize, legs: &[(Vec<Rational>, Vec<Rational>)]) -> (usize, usize) {
    let float_legs = legs.iter().map(|(p, q)| (to_f64(p), to_f64(q))).collect();
    let numeric = platform_flexibility(&Platform::new(d, float_legs).unwrap(), TOL).unwrap().rank;
    let exact = platform_flexibility_exact(d, legs).unwrap().rank;
    (numeric, exact)
}

fn criterion_7() -> Outcome {
    let legs_of = |values: Vec<Rational>| {
        classical_scenario("desargues", &ScenarioParams { values, ..Default::default() }).unwrap().exact_legs().unwrap()
    };
    let (des_n, des_x) = platform_verdicts(2, &legs_of(Vec::new()));
    let (off_n, off_x) = platform_verdicts(2, &legs_of(vec![ratio(1, 1000)]));

    let mut r = rng(707);
    let mut rigid = 0;
    for _ in 0..100 {
        let legs: Vec<_> = (0..6).map(|_| (rational_point(&mut r, 3), rational_point(&mut r, 3))).collect();
        let (n, x) = platform_verdicts(3, &legs);
        rigid += usize::from(n == 6 && x == 6);
    }
    let mut flexible = 0;
    for _ in 0..20 {
        let a = rational_point(&mut r, 3);
        let b = rational_point(&mut r, 3);
        let legs: Vec<_> = (0..6)
            .map(|_| {
                let t = ratio(r.random_range(-32..=32), 8);
                let x: Vec<Rational> = a.iter().zip(&b).map(|(ai, bi)| ai + &t * bi).collect();
                let p = rational_point(&mut r, 3);
                let lam = ratio(r.random_range(1..=16), 8);
                let q: Vec<Rational> = x.iter().zip(&p).map(|(xi, pi)| xi + &lam * (xi - pi)).collect();
                (p, q)
            })
            .collect();
        let (n, x) = platform_verdicts(3, &legs);
        flexible += usize::from(n <= 5 && x <= 5);
    }
    let pass = des_n == 2 && des_x == 2 && off_n == 3 && off_x == 3 && rigid == 100 && flexible == 20;
    outcome(
        pass,
        format!(
            "Desargues rank {des_n} (exact {des_x}); 1/1000 off-perspective rank {off_n} (exact {off_x}); {rigid}/100 random platforms rigid; {flexible}/20 common-line platforms flexible"
        ),
    )
}

fn label(axis: usize, role: Role) -> VertexLabel {
    VertexLabel { axis, role }
}

/// Largest violation of the right angles of an odd-dimensional linkage:
/// each foot on its axis, each common perpendicular orthogonal to both
/// lines.
fn right_angle_residual(lk: &Linkage, axes: &[Axis]) -> f64 {
    let n = lk.n;
    let coords = |l: VertexLabel| DVector::from_vec(lk.vertex(&l).unwrap().coords.clone());
    let mut worst: f64 = 0.0;
    for j in 1..=n {
        let next = j % n + 1;
        let (a, b) = (&axes[j - 1], &axes[next - 1]);
        let plus = coords(label(j, Role::FootPlus));
        let minus = coords(label(next, Role::FootMinus));
        worst = worst.max(a.distance_to(&plus)).max(b.distance_to(&minus));
        let seg = &minus - &plus;
        let scale = seg.norm().max(1.0);
        worst = worst.max(seg.dot(&a.dirs()[0]).abs() / scale).max(seg.dot(&b.dirs()[0]).abs() / scale);
    }
    worst
}

fn criterion_8() -> Outcome {
    let mut r = rng(808);
    let (mut ok3, mut worst) = (0, 0.0f64);
    for i in 0..50 {
        let n = 6 + i % 3;
        let axes = random_axes(&mut r, 3, n);
        let lk = cycle_to_linkage(&axes, 3).unwrap();
        let m = moduli_invariants(&lk).unwrap();
        let res = right_angle_residual(&lk, &axes);
        worst = worst.max(res);
        let counts = lk.vertices.len() == 2 * n && lk.edges.len() == 5 * n;
        let partition = m.independent.len() == 3 * n && m.dependent.len() == 2 * n;
        ok3 += usize::from(counts && partition && res <= 1e-10);
    }
    let mut ok5 = 0;
    for i in 0..10 {
        let n = 6 + i % 3;
        let axes = random_axes(&mut r, 5, n);
        let lk = cycle_to_linkage(&axes, 5).unwrap();
        let m = moduli_invariants(&lk).unwrap();
        ok5 += usize::from(
            lk.vertices.len() == 2 * n
                && lk.edges.len() == 9 * n
                && m.independent.len() == 7 * n
                && m.dependent.len() == 2 * n,
        );
    }
    outcome(
        ok3 == 50 && ok5 == 10,
        format!(
            "{ok3}/50 d=3 linkages with (2n, 5n) counts, (3n, 2n) moduli and right-angle residual <= 1e-10 (max {worst:.1e}); {ok5}/10 d=5 linkages with (2n, 9n) counts"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut r = rng(909);
    let (mut ok, mut drift, mut errors) = (0, 0.0f64, Vec::new());
    for i in 0..20 {
        let c = Chain::cycle(random_axes(&mut r, 3, 7)).unwrap();
        let result = trace_flex(&c, &Configuration::zeros(c.joints()), 10, 1e-2, TOL)
            .and_then(|path| linkage_path(&c, &path, TOL));
        let lks = match result {
            Ok(l) => l,
            Err(e) => {
                errors.push(format!("cycle {i}: {e}"));
                continue;
            }
        };
        let first = &lks[0];
        let signs = first.simplex_orientations();
        let mut good = lks.len() == 11;
        for lk in &lks[1..] {
            for (a, b) in first.edges.iter().zip(&lk.edges) {
                let dl = (a.length - b.length).abs();
                drift = drift.max(dl);
                good &= a.a == b.a && a.b == b.b && dl <= 1e-6;
            }
            good &= lk.simplex_orientations() == signs && !signs.contains(&0);
        }
        ok += usize::from(good);
    }
    outcome(
        ok == 20,
        format!(
            "{ok}/20 flexed 7-cycles keep edge lengths (max drift {drift:.1e}, bound 1e-6) and simplex orientations over 10 steps{}",
            if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join("; ")) }
        ),
    )
}

fn sweep_csv(scenario: &str, threads: &str, path: &std::path::Path) -> Vec<u8> {
    let args = [
        "hingekit",
        "sweep",
        "-",
        "--samples",
        "400",
        "--seed",
        "7",
        "--threads",
        threads,
        "--csv",
        path.to_str().unwrap(),
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hingekit::run(args, &mut scenario.as_bytes(), &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    std::fs::read(path).unwrap()
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut sizes = Vec::new();
    for (name, extra) in
        [("generic-chain", vec![]), ("generic-chain", vec!["--d", "4", "--n", "6"]), ("planar-arm", vec![])]
    {
        let mut args = vec!["hingekit", "example", name];
        args.extend(extra);
        let mut scenario = Vec::new();
        assert_eq!(hingekit::run(args, &mut std::io::empty(), &mut scenario, &mut Vec::new()), 0);
        let scenario = String::from_utf8(scenario).unwrap();
        let reference = sweep_csv(&scenario, "1", &dir.path().join("a.csv"));
        for (i, threads) in ["1", "2", "4", "8"].iter().enumerate() {
            let again = sweep_csv(&scenario, threads, &dir.path().join(format!("b{i}.csv")));
            pass &= again == reference;
        }
        // standard output mode writes the same bytes
        let mut out = Vec::new();
        let args = ["hingekit", "sweep", "-", "--samples", "400", "--seed", "7"];
        assert_eq!(hingekit::run(args, &mut scenario.as_bytes(), &mut out, &mut Vec::new()), 0);
        pass &= out == reference;
        sizes.push(reference.len());
    }
    outcome(pass, format!("400-sample sweeps byte-identical across reruns and 1, 2, 4, 8 threads ({sizes:?} bytes)"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("jacobian matches finite differences", criterion_1),
        ("rank verdict matches incident-line search", criterion_2),
        ("frame test consistency", criterion_3),
        ("twisted cubic tangents", criterion_4),
        ("symmetric Bricard six-cycle", criterion_5),
        ("generic cycle mobility", criterion_6),
        ("platform criterion", criterion_7),
        ("linkage conversion", criterion_8),
        ("linkage invariance along flexes", criterion_9),
        ("sweep determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!result.pass);
        println!("[{tag}] criterion {} ({name}): {} [{:.1} s]", i + 1, result.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
