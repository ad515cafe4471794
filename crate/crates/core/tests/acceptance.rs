//! Acceptance suite. Prints one PASS/FAIL line per criterion, each held to
//! its runtime budget, and exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{centre_system, cs_system, oracle, residual, to_map};
use ultramani_core::dynamics::{
    classify_fixed_point, stable_membership_batch, FixedPointReport, SubspaceDims, Verdict, Witness,
};
use ultramani_core::field::{AbsValue, FieldSpec, UltraScalar};
use ultramani_core::linalg::{adapted_norm, char_poly, newton_polygon, spectral_split, Matrix, Poly};
use ultramani_core::manifolds::{
    centre_chart, centre_stable_chart, irwin_stable_chart, irwin_unstable_chart, normalize, series_chart,
    shell_samples, verify_invariance, BlockSystem, GraphChart, Mode,
};
use ultramani_core::series::{MultiIndex, TruncatedMap};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn padic() -> FieldSpec {
    FieldSpec::padic(5, 40).unwrap()
}

fn laurent() -> FieldSpec {
    FieldSpec::laurent(5, 40).unwrap()
}

/// Working-precision tolerance `p^{-(N-4)}`.
fn tolerance(f: FieldSpec) -> AbsValue {
    AbsValue::from_int_exponent(f.precision - 4)
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn radius_of(v: Option<i64>) -> AbsValue {
    v.map_or(AbsValue::ZERO, AbsValue::from_int_exponent)
}

/// Expected `(radius, multiplicity)` list, ascending.
fn expected_radii(vals: &[Option<i64>]) -> Vec<(AbsValue, usize)> {
    let mut r: Vec<AbsValue> = vals.iter().map(|v| radius_of(*v)).collect();
    r.sort();
    let mut out: Vec<(AbsValue, usize)> = Vec::new();
    for x in r {
        match out.last_mut() {
            Some((y, k)) if *y == x => *k += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

fn root(f: FieldSpec, rng: &mut ChaCha8Rng, v: Option<i64>) -> UltraScalar {
    match v {
        Some(k) => f.random_unit(rng, k),
        None => f.zero(),
    }
}

/// Matrices of dimension at most 4 with prescribed root valuations
/// (`None` is a zero root): ten upper triangular, ten companions.
fn spectrum_cases(f: FieldSpec) -> Vec<(String, Matrix, Vec<Option<i64>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc1);
    let tri: [&[i64]; 10] = [
        &[1, 0],
        &[0, 0],
        &[-1, 1],
        &[2, 0, -1],
        &[0, 0, 0],
        &[1, 1, -2],
        &[3, 0, 0, -1],
        &[0, 1, 2, 3],
        &[-1, -1, 0, 1],
        &[1, 0, 0, 0],
    ];
    let comp: [&[Option<i64>]; 10] = [
        &[Some(0), Some(1)],
        &[Some(1), Some(-1)],
        &[None, Some(0)],
        &[Some(0), Some(0), Some(2)],
        &[None, None, Some(1)],
        &[Some(2), Some(1), Some(0), Some(-1)],
        &[Some(0), Some(0), Some(0), Some(0)],
        &[Some(1), Some(1), None, Some(0)],
        &[Some(-2), Some(0), Some(1)],
        &[None, Some(0), Some(0), Some(1)],
    ];
    let mut out = Vec::new();
    for vals in tri {
        let n = vals.len();
        let diag: Vec<UltraScalar> = vals.iter().map(|&k| f.random_unit(&mut rng, k)).collect();
        let upper: Vec<UltraScalar> = (0..n * n).map(|_| f.random_integral(&mut rng, 0)).collect();
        let m = Matrix::from_fn(f, n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => diag[i].clone(),
            std::cmp::Ordering::Less => upper[i * n + j].clone(),
            std::cmp::Ordering::Greater => f.zero(),
        });
        out.push((format!("triangular {vals:?}"), m, vals.iter().map(|&k| Some(k)).collect()));
    }
    for (i, vals) in comp.iter().enumerate() {
        let mut roots: Vec<UltraScalar> = vals.iter().map(|v| root(f, &mut rng, *v)).collect();
        // One case carries an exactly repeated root.
        if i == 6 {
            roots[1] = roots[0].clone();
        }
        let chi = Poly::from_roots(f, &roots);
        out.push((format!("companion {vals:?}"), Matrix::companion(f, chi.coeffs()), vals.to_vec()));
    }
    out
}

fn spectrum_oracle(f: FieldSpec) -> Check {
    let cases = spectrum_cases(f);
    ensure!(cases.len() >= 20, "only {} cases", cases.len());
    for (name, m, vals) in &cases {
        let want = expected_radii(vals);
        let got = ok(newton_polygon(&ok(char_poly(m), name)?), name)?.radii();
        ensure!(got == want, "{name}: Newton radii {got:?}, expected {want:?}");
        let split = ok(spectral_split(m), name)?;
        let dims: Vec<(AbsValue, usize)> = split.components.iter().map(|c| (c.radius, c.dim())).collect();
        ensure!(dims == want, "{name}: split {dims:?}, expected {want:?}");
    }
    Ok(())
}

fn adapted_norm_identity(f: FieldSpec) -> Check {
    let eps = f.abs_uniformizer();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc2);
    for (name, m, _) in spectrum_cases(f) {
        let split = ok(spectral_split(&m), &name)?;
        let norm = ok(adapted_norm(&m, &split, eps), &name)?;
        let basis = norm.basis().columns();
        for (c, range) in split.components.iter().zip(split.ranges()) {
            let cols = &basis[range];
            let mut vectors: Vec<Vec<UltraScalar>> = cols.to_vec();
            for _ in 0..100 {
                let mut x = vec![f.zero(); m.rows()];
                for col in cols {
                    let shift = rng.gen_range(0..3);
                    let k = f.random_integral(&mut rng, shift);
                    x = x.iter().zip(col).map(|(a, b)| a + &(&k * b)).collect();
                }
                vectors.push(x);
            }
            for x in vectors.iter().filter(|x| !x.iter().all(UltraScalar::is_zero_at_precision)) {
                let nx = ok(norm.norm_exact(x), &name)?;
                let nmx = norm.norm_exact(&m.mul_vec(x));
                if c.radius.is_zero() {
                    // An orthogonal basis attains the operator norm, so the
                    // basis columns bound it exactly.
                    let nmx = nmx.unwrap_or(AbsValue::ZERO).max(norm.norm(&m.mul_vec(x)));
                    ensure!(nmx < eps * nx, "{name}: nilpotent block stretches by {}", nmx / nx);
                } else {
                    let nmx = ok(nmx, &name)?;
                    ensure!(nmx == c.radius * nx, "{name}: N(Mx) = {nmx}, ρN(x) = {}", c.radius * nx);
                }
            }
        }
    }
    Ok(())
}

fn coeff_1d(phi: &TruncatedMap, out: usize, k: u32) -> UltraScalar {
    phi.component(k).coeff(out, &MultiIndex::new(vec![k]))
}

fn gauss_of_degree(phi: &TruncatedMap, k: u32) -> AbsValue {
    AbsValue::max_of(phi.component(k).terms().map(|(_, _, c)| c.abs_bound()))
}

fn cs_recursion(f: FieldSpec) -> Check {
    let p = f.uniformizer();
    let s = cs_system(f);
    let sys = ok(normalize(&to_map(&s, &[0, 1], f, AbsValue::ONE), AbsValue::ONE, Mode::CentreStable), "normalize")?;
    let chart = ok(centre_stable_chart(&sys, 8), "chart")?;
    let want = oracle(&s, 8, f);

    let one = f.one();
    let gamma = (&p * &p).div(&(&p.pow(3).unwrap() - &one)).unwrap();
    let c5 = (&(&f.int(2) * &p.pow(3).unwrap()) * &gamma.pow(3).unwrap())
        .div(&(&one - &p.pow(6).unwrap()))
        .unwrap();
    let closed = [(2, gamma), (3, f.zero()), (4, f.zero()), (5, c5)];
    for (k, v) in &closed {
        ensure!(want[0][*k].agrees_to(v, 30), "oracle c{k} = {} differs from closed form {v}", want[0][*k]);
    }
    let phi = ok(chart.unscaled(&sys), "unscaled")?;
    for k in 2..=8u32 {
        let got = coeff_1d(&phi, 0, k);
        ensure!(got.agrees_to(&want[0][k as usize], 30), "c{k} = {got}, oracle {}", want[0][k as usize]);
    }
    let coeffs: Vec<UltraScalar> = (0..=8u32).map(|k| if k < 2 { f.zero() } else { coeff_1d(&phi, 0, k) }).collect();
    for (n, r) in residual(&s, &[coeffs], 8, f)[0].iter().enumerate() {
        ensure!(r.is_zero_at_precision(), "invariance residual at degree {n} is {r}");
    }
    let cert = &chart.certification;
    ensure!(cert.pass && cert.invariance_residual_zero_through >= 8, "certification {cert:?}");
    for k in 2..=8u32 {
        let g = gauss_of_degree(&chart.phi, k);
        ensure!(g < sys.a().powi(1 - k as i64), "gauss(c{k}) = {g}");
    }
    Ok(())
}

fn graph_drift(sys: &BlockSystem, chart: &GraphChart, z: &[UltraScalar]) -> AbsValue {
    chart.graph_distance(sys, z)
}

fn centre_recursion() -> Check {
    let f = padic();
    let p = f.uniformizer();
    let one = f.one();
    let s = centre_system(f);
    let sys = ok(normalize(&to_map(&s, &[1, 0, 2], f, AbsValue::ONE), AbsValue::ONE, Mode::Centre), "normalize")?;
    let chart = ok(centre_chart(&sys, 8), "chart")?;
    let want = oracle(&s, 8, f);

    let d2 = p.div(&(&one - &p)).unwrap();
    let e2 = (&p * &p).div(&(&p - &one)).unwrap();
    ensure!(want[0][2].agrees_to(&d2, 30), "oracle d2 = {}", want[0][2]);
    ensure!(want[1][2].agrees_to(&e2, 30), "oracle e2 = {}", want[1][2]);
    let phi = ok(chart.unscaled(&sys), "unscaled")?;
    let mut coeffs = vec![vec![f.zero(); 9]; 2];
    for k in 2..=8u32 {
        for j in 0..2 {
            let got = coeff_1d(&phi, j, k);
            ensure!(got.agrees_to(&want[j][k as usize], 30), "output {j} degree {k}: {got}");
            coeffs[j][k as usize] = got;
        }
    }
    for (j, res) in residual(&s, &coeffs, 8, f).iter().enumerate() {
        for (n, r) in res.iter().enumerate() {
            ensure!(r.is_zero_at_precision(), "identity {j} fails at degree {n}: {r}");
        }
    }
    let cert = &chart.certification;
    ensure!(cert.pass && cert.invariance_residual_zero_through >= 8, "certification {cert:?}");
    for k in 2..=8u32 {
        ensure!(gauss_of_degree(&chart.phi, k) < AbsValue::ONE, "gauss at degree {k}");
    }

    // Graph points deep in the ball, where the degree-8 truncation error is
    // below working precision; forward under f and backward under f⁻¹.
    let tol = tolerance(f);
    let tw: Vec<AbsValue> = sys.tangent().iter().map(|&i| sys.weights()[i]).collect();
    let points: Vec<Vec<UltraScalar>> = shell_samples(f, &tw, sys.radius(), 20, 0xacc4)
        .into_iter()
        .map(|y| chart.graph_point(&y.iter().map(|c| c.mul_pi_pow(4)).collect::<Vec<_>>()))
        .collect();
    let inverse = ok(sys.map().with_radius(AbsValue::from_int_exponent(1)).local_inverse(14), "local inverse")?;
    for z in &points {
        let fwd = graph_drift(&sys, &chart, &sys.apply(z));
        ensure!(fwd <= tol, "f moves a graph point {fwd} off the graph");
        let back = ok(inverse.evaluate(z), "inverse evaluation")?;
        let bwd = graph_drift(&sys, &chart, &back);
        ensure!(bwd <= tol, "f⁻¹ moves a graph point {bwd} off the graph");
    }
    Ok(())
}

fn irwin_series() -> Check {
    let f = padic();
    let a = AbsValue::from_ratio(1, 2);
    let sys = ok(normalize(&to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE), a, Mode::Stable), "normalize")?;
    let chart = ok(series_chart(&sys, 20), "series chart")?;
    let tol = AbsValue::from_int_exponent(36);
    let xs = shell_samples(f, &sys.block_weights(0), sys.radius(), 50, 0xacc5);
    let mut values = Vec::new();
    for x in &xs {
        let sol = ok(irwin_stable_chart(&sys, x, None), "irwin")?;
        let diff = (&sol.value[0] - &chart.eval(x)[0]).abs_bound();
        ensure!(diff <= tol, "x = {}: |φ_irwin − φ_series| = {diff}", x[0]);
        ensure!(sol.lip_g < AbsValue::ONE, "Lip(g) = {}", sol.lip_g);
        for w in sol.residuals.windows(2) {
            if let (Some(prev), Some(next)) = (w[0], w[1]) {
                ensure!(next <= prev * sol.lip_g, "residual {prev} -> {next} beats Lip(g) = {}", sol.lip_g);
            }
        }
        values.push(sol.value[0].clone());
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let dx = &xs[i][0] - &xs[j][0];
            if dx.is_zero_at_precision() {
                continue;
            }
            let dphi = (&values[i] - &values[j]).abs_bound();
            let dx = ok(dx.valuation(), "sample gap")?;
            ensure!(dphi <= dx, "Lip(φ) > 1 on samples {i}, {j}: {dphi} > {dx}");
        }
    }
    Ok(())
}

fn place(sys: &BlockSystem, block: usize, v: &[UltraScalar], rest: &[UltraScalar]) -> Vec<UltraScalar> {
    let mut z = vec![sys.field().zero(); sys.dim()];
    for (q, i) in sys.block_indices(block).into_iter().enumerate() {
        z[i] = v[q].clone();
    }
    for (q, i) in sys.block_indices(1 - block).into_iter().enumerate() {
        z[i] = rest[q].clone();
    }
    z
}

fn unstable_solver() -> Check {
    let f = padic();
    let p = f.uniformizer();
    let tol = tolerance(f);

    // A = 0: the tangent block of the complement is not invertible.
    let mut m = TruncatedMap::zero(f, 2, 2, 2, AbsValue::ONE);
    m.add_term(0, MultiIndex::new(vec![2, 0]), f.one());
    m.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
    m.add_term(1, MultiIndex::new(vec![2, 0]), f.one());
    let sys = ok(normalize(&m, AbsValue::ONE, Mode::Unstable), "normalize nilpotent")?;
    ensure!(sys.block(0).is_zero_at_precision(), "A is not zero");
    let a = sys.a();
    let b_inv = ok(sys.block_inverse_norm(1), "B⁻¹")?;
    for y in shell_samples(f, &sys.block_weights(1), sys.radius(), 10, 0xacc6) {
        let sol = ok(irwin_unstable_chart(&sys, &y, Some(12)), "unstable solver")?;
        let z = &sol.orbit.entries;
        let yn = sys.sub_norm(&sys.block_indices(1), &y);
        for n in 0..z.len() - 1 {
            let step: Vec<UltraScalar> = sys.apply(&z[n + 1]).iter().zip(&z[n]).map(|(u, v)| u - v).collect();
            ensure!(sys.norm(&step) <= tol, "f(z_{}) ≠ z_{n}", n + 1);
        }
        for (n, zn) in z.iter().enumerate() {
            let scaled = sys.norm(zn) * a.powi(n as i64);
            let bound = ((a * b_inv).powi(n as i64) * yn).max(tol);
            ensure!(scaled <= bound, "aⁿ‖z_{n}‖ = {scaled} exceeds {bound}");
        }
        ensure!(sol.orbit.tail_bound <= (a * b_inv).powi(z.len() as i64) * yn, "tail bound too loose");
    }

    // Invertible case: W^u(f) against W^s(f⁻¹), compared in original
    // coordinates.
    let worked = to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE);
    let sys_f = ok(normalize(&worked, AbsValue::ONE, Mode::Unstable), "normalize f")?;
    let inv = ok(worked.with_radius(AbsValue::from_int_exponent(1)).local_inverse(24), "local inverse")?;
    let sys_g = ok(normalize(&inv, AbsValue::ONE, Mode::Stable), "normalize f⁻¹")?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    for _ in 0..20 {
        let shift = rng.gen_range(5..9);
        let y0 = f.random_unit(&mut rng, shift);
        let orig = vec![f.zero(), y0];
        let t = ok(sys_f.from_original(&orig), "coordinates of f")?;
        let t: Vec<UltraScalar> = sys_f.block_indices(1).iter().map(|&i| t[i].clone()).collect();
        let uf = ok(irwin_unstable_chart(&sys_f, &t, None), "unstable chart")?;
        let zf = sys_f.to_original(&place(&sys_f, 1, &t, &uf.value));
        let s = ok(sys_g.from_original(&orig), "coordinates of f⁻¹")?;
        let s: Vec<UltraScalar> = sys_g.block_indices(0).iter().map(|&i| s[i].clone()).collect();
        let sg = ok(irwin_stable_chart(&sys_g, &s, None), "stable chart of f⁻¹")?;
        let zg = sys_g.to_original(&place(&sys_g, 0, &s, &sg.value));
        for (u, v) in zf.iter().zip(&zg) {
            let d = (u - v).abs_bound();
            ensure!(d <= tol, "charts differ by {d} at y = {}", orig[1]);
        }
    }
    Ok(())
}

fn gap_independence() -> Check {
    let f = padic();
    let map = to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE);
    let lo = ok(normalize(&map, AbsValue::from_ratio(1, 2), Mode::Stable), "normalize at p^-1/2")?;
    let hi = ok(normalize(&map, AbsValue::ONE, Mode::Stable), "normalize at 1")?;
    ensure!(lo.basis().eq_at_precision(hi.basis()), "adapted bases differ");
    let c_lo = ok(ok(series_chart(&lo, 8), "chart at p^-1/2")?.unscaled(&lo), "unscaled")?;
    let c_hi = ok(ok(series_chart(&hi, 8), "chart at 1")?.unscaled(&hi), "unscaled")?;
    for k in 2..=8u32 {
        ensure!(c_lo.component(k).eq_at_precision(c_hi.component(k)), "charts differ at degree {k}");
    }

    // All radii above a: the stable block is trivial and every nonzero
    // point is rejected.
    let p = f.uniformizer();
    let mut h = TruncatedMap::zero(f, 2, 2, 2, AbsValue::ONE);
    h.add_term(0, MultiIndex::new(vec![1, 0]), f.one());
    h.add_term(0, MultiIndex::new(vec![0, 2]), p.clone());
    h.add_term(1, MultiIndex::new(vec![0, 1]), p.inv().unwrap());
    h.add_term(1, MultiIndex::new(vec![2, 0]), p.clone());
    let a = AbsValue::from_ratio(1, 2);
    let report = ok(classify_fixed_point(&h.linear_part(), Some(a)), "classify")?;
    ensure!(report.radii.iter().all(|(r, _)| *r > a), "some radius is at most a");
    ensure!(report.dims.map(|d| d.stable) == Some(0), "stable dimension {:?}", report.dims);
    let sys = ok(normalize(&h, a, Mode::Stable), "normalize")?;
    ensure!(sys.block_indices(0).is_empty(), "stable block has dimension {}", sys.block_indices(0).len());
    let chart = ok(series_chart(&sys, 8), "trivial chart")?;
    let zs = shell_samples(f, sys.weights(), sys.radius(), 30, 0xacc8);
    let certs = ok(stable_membership_batch(&sys, &chart, &zs, None, 50), "membership")?;
    for (z, c) in zs.iter().zip(&certs) {
        ensure!(c.verdict == Verdict::NonMember, "{z:?} not rejected: {c:?}");
    }
    Ok(())
}

fn classification() -> Check {
    let f = padic();
    let (p, one, pinv) = (f.int(5), f.one(), f.rational(1, 5).unwrap());
    let m = |rows: Vec<Vec<UltraScalar>>| Matrix::from_rows(f, rows).unwrap();
    let z = f.zero();
    // (name, matrix, all ≤ 1, all = 1, all < 1, 1-hyperbolic, invertible, dims at a = 1)
    let grid: Vec<(&str, Matrix, [bool; 5], (usize, usize, usize))> = vec![
        ("diag(p,p)", Matrix::diag(f, &[p.clone(), p.clone()]), [true, false, true, true, true], (2, 0, 0)),
        ("p-Jordan", m(vec![vec![p.clone(), one.clone()], vec![z.clone(), f.int(25)]]), [true, false, true, true, true], (2, 0, 0)),
        ("unipotent", m(vec![vec![one.clone(), one.clone()], vec![z.clone(), one.clone()]]), [true, true, false, false, true], (0, 2, 0)),
        ("units", Matrix::diag(f, &[one.clone(), f.int(2), f.int(3)]), [true, true, false, false, true], (0, 3, 0)),
        ("diag(1,p)", Matrix::diag(f, &[one.clone(), p.clone()]), [true, false, false, false, true], (1, 1, 0)),
        (
            "companion(1,p²)",
            Matrix::companion(f, Poly::from_roots(f, &[one.clone(), f.int(25)]).coeffs()),
            [true, false, false, false, true],
            (1, 1, 0),
        ),
        ("diag(p,p⁻¹)", Matrix::diag(f, &[p.clone(), pinv.clone()]), [false, false, false, true, true], (1, 0, 1)),
        ("diag(p,1,p⁻¹)", Matrix::diag(f, &[p.clone(), one.clone(), pinv.clone()]), [false, false, false, false, true], (1, 1, 1)),
        ("nilpotent", m(vec![vec![z.clone(), one.clone()], vec![z.clone(), z.clone()]]), [true, false, true, true, false], (2, 0, 0)),
    ];
    for (name, mat, flags, (s, c, u)) in grid {
        let r: FixedPointReport = ok(classify_fixed_point(&mat, Some(AbsValue::ONE)), name)?;
        let got = [r.all_at_most_one, r.all_equal_one, r.all_below_one, r.hyperbolic == Some(true), r.invertible];
        ensure!(got == flags, "{name}: flags {got:?}, expected {flags:?}");
        let dims = SubspaceDims { stable: s, centre: c, unstable: u };
        ensure!(r.dims == Some(dims), "{name}: dims {:?}", r.dims);
    }
    Ok(())
}

/// Exact `max_i |z_i| w_i`, or `None` when a coordinate has no known digit.
fn exact_norm(z: &[UltraScalar], w: &[AbsValue]) -> Option<AbsValue> {
    let mut best = AbsValue::ZERO;
    for (c, wi) in z.iter().zip(w) {
        if c.is_exact_zero() {
            continue;
        }
        best = best.max(c.valuation().ok()? * *wi);
    }
    Some(best)
}

fn membership_soundness() -> Check {
    let f = padic();
    let sys = ok(
        normalize(&to_map(&cs_system(f), &[0, 1], f, AbsValue::ONE), AbsValue::ONE, Mode::CentreStable),
        "normalize",
    )?;
    let chart = ok(centre_stable_chart(&sys, 8), "chart")?;
    let mut zs = shell_samples(f, sys.weights(), sys.radius(), 40, 0xacc9);
    let tw = sys.block_weights(0);
    zs.extend(shell_samples(f, &tw, sys.radius(), 10, 0xacca).iter().map(|x| chart.graph_point(x)));
    let certs = ok(stable_membership_batch(&sys, &chart, &zs, None, 50), "membership")?;
    let map = sys.map();
    let (mut members, mut rejected) = (0, 0);
    for (z, c) in zs.iter().zip(&certs) {
        match (&c.verdict, &c.witness) {
            (Verdict::NonMember, Witness::BoundViolated { step, norm, bound }) => {
                rejected += 1;
                let mut w = z.clone();
                for _ in 0..*step {
                    w = map.eval_unchecked(&w);
                }
                let n = exact_norm(&w, sys.weights()).ok_or("witness norm is not determinable")?;
                let z0 = exact_norm(z, sys.weights()).ok_or("start norm is not determinable")?;
                let b_n = c.b.powi(*step as i64) * z0;
                ensure!(n == *norm, "witness norm {norm} re-evaluates to {n}");
                ensure!(n > b_n && b_n <= *bound, "‖f^{step}(z)‖ = {n} does not exceed bⁿ‖z‖ = {b_n}");
            }
            (Verdict::Member, Witness::OnGraph { step, tolerance, .. }) => {
                members += 1;
                let mut w = z.clone();
                for _ in 0..*step {
                    w = map.eval_unchecked(&w);
                }
                ensure!(chart.graph_distance(&sys, &w) <= *tolerance, "member witness is off the graph");
            }
            (Verdict::Inconclusive, _) => {}
            (v, w) => return Err(format!("verdict {v:?} with witness {w:?}")),
        }
    }
    ensure!(members > 0 && rejected > 0, "{members} members and {rejected} rejections");

    // A last-digit perturbation of one coefficient is caught at its degree.
    let last = f.uniformizer().pow(f.precision - 1).unwrap();
    for k in 2..=8u32 {
        let mut bad = chart.clone();
        bad.phi.add_term(0, MultiIndex::new(vec![k]), last.clone());
        let cert = verify_invariance(&sys, &bad, 8, 10);
        ensure!(!cert.pass && cert.first_failing_degree == Some(k), "perturbation at degree {k}: {cert:?}");
    }
    Ok(())
}

fn laurent_smoke() -> Check {
    let f = laurent();
    spectrum_oracle(f).map_err(|e| format!("spectrum: {e}"))?;
    adapted_norm_identity(f).map_err(|e| format!("adapted norm: {e}"))?;
    cs_recursion(f).map_err(|e| format!("centre-stable recursion: {e}"))
}

type Criterion = (u32, &'static str, u64, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "spectrum oracle", 1_000, || spectrum_oracle(padic())),
        (2, "adapted norm identity", 1_000, || adapted_norm_identity(padic())),
        (3, "centre-stable recursion", 5_000, || cs_recursion(padic())),
        (4, "centre recursion", 5_000, centre_recursion),
        (5, "Irwin and series charts agree", 10_000, irwin_series),
        (6, "unstable solver", 10_000, unstable_solver),
        (7, "spectral-gap independence", 5_000, gap_independence),
        (8, "fixed-point classification", 1_000, classification),
        (9, "membership soundness", 5_000, membership_soundness),
        (10, "F_5((t)) smoke test", 10_000, laurent_smoke),
    ];
    let mut failed = 0;
    for (n, name, budget_ms, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            if elapsed > Duration::from_millis(budget_ms) {
                Err(format!("took {elapsed:.2?}, budget {budget_ms} ms"))
            } else {
                Ok(())
            }
        });
        match result {
            Ok(()) => println!("criterion {n:>2}: PASS  {name} ({:.0} ms)", elapsed.as_secs_f64() * 1e3),
            Err(e) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {name}: {e}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
