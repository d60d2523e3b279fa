//! End-to-end acceptance checks, one per criterion. Runs without the libtest
//! harness so every criterion reports a PASS/FAIL line even when an earlier
//! one fails.

use std::process::ExitCode;
use std::time::Instant;

use matdec::als::{als, als_masked, nmf, AlsConfig, FactorPair, MaskedMatrix, NmfInit};
use matdec::approx::{hat_matrix, pca, PcaMode};
use matdec::cholesky::{
    cholesky, is_pd_sylvester, rank_one_downdate, rank_one_update, rank_two_indefinite_update,
    semidefinite_rank_revealing,
};
use matdec::eigen::{block_diagonalize_skew, evd, matrix_power, schur, spectral};
use matdec::flops::{bidiag_cost_table, flops, FlopOp};
use matdec::interp::{cr, cur, id_column, id_row, id_two_sided, rank_decomposition, CurMode, IdMode};
use matdec::lu::{block_lu, ldu, lu, Pivoting};
use matdec::matrix::outer;
use matdec::permutation::{permute, Side};
use matdec::qr::{
    cpqr, householder_qr, lq, qr, qr_append_column, qr_append_row, qr_delete_column, qr_delete_row,
    qr_rank_one_change, qr_unique, two_sided_orthogonal, CpqrMode, Method, QrResult,
};
use matdec::random::{
    random_low_rank, random_matrix, random_orthogonal, random_spd, random_symmetric,
    random_uniform, random_vector, rng, with_condition, TestRng,
};
use matdec::reduce::{bidiagonalize, hessenberg, tridiagonalize, BidiagStrategy};
use matdec::svd::{four_subspaces, polar, singular_values, svd, truncated_svd, PolarSide};
use matdec::utv::{four_subspace_bases, utv, UtvKind};
use matdec::wedderburn::{
    form1, form2_reconstruct, form3, recover, wedderburn_run, LargestEntrySupplier, RecoverTarget, Recovered,
};
use matdec::{Matrix, Permutation, Shape};
use rand::Rng;

/// Collects failure messages for one criterion.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    checks: usize,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn ok<T, E: std::fmt::Debug>(&mut self, r: Result<T, E>, what: &str) -> Option<T> {
        match r {
            Ok(x) => Some(x),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{what}: {e:?}"));
                None
            }
        }
    }
}

fn dims(r: &mut TestRng, instance: usize, max: usize) -> usize {
    if instance == 0 {
        max
    } else {
        r.gen_range(2..=max.min(40))
    }
}

/// Square matrix with real, well separated eigenvalues.
fn real_spectrum(r: &mut TestRng, n: usize) -> Matrix {
    let q = random_orthogonal(r, n);
    let s: Vec<f64> = (0..n).map(|_| 1.0 + r.gen::<f64>()).collect();
    let x = &(&q * &Matrix::from_diag(&s)) * &random_orthogonal(r, n);
    let lambda: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    &(&x * &Matrix::from_diag(&lambda)) * &matdec::lu::inverse(&x).unwrap()
}

fn projector(basis: &Matrix) -> Matrix {
    basis.mul_t(basis)
}

// ---------------------------------------------------------------------------

fn reconstruction() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1001);
    let tol = 1e-9;
    let fam = |rep: &mut Report, name: &str, a: &Matrix, rec: Option<Matrix>| {
        if let Some(rec) = rec {
            let e = rec.rel_diff(a);
            rep.check(e <= tol, || format!("{name} {}x{} error {e:e}", a.rows(), a.cols()));
        }
    };
    for inst in 0..20 {
        let n = dims(&mut r, inst, 100);
        let m = n + dims(&mut r, inst, 100) / 2;
        let sq = random_matrix(&mut r, n, n);
        let tall = random_matrix(&mut r, m, n);
        let spd = random_spd(&mut r, n);
        let sym = random_symmetric(&mut r, n);
        let k = (n / 3).max(1);
        let low = random_low_rank(&mut r, m, n, k);
        let psd = random_low_rank(&mut r, n, n, k);
        let psd = psd.mul_t(&psd);

        for (name, s) in [
            ("lu/none", Pivoting::None),
            ("lu/partial", Pivoting::Partial),
            ("lu/complete", Pivoting::Complete),
            ("lu/rook", Pivoting::Rook),
        ] {
            let f = if s == Pivoting::None { lu(&spd, s) } else { lu(&sq, s) };
            let a = if s == Pivoting::None { &spd } else { &sq };
            let rec = rep.ok(f, name).map(|f| f.reconstruct());
            fam(&mut rep, name, a, rec);
        }
        let rec = rep.ok(ldu(&spd), "ldu").map(|f| f.reconstruct());
        fam(&mut rep, "ldu", &spd, rec);
        let half = n / 2;
        let blocks: Vec<usize> = if half == 0 { vec![n] } else { vec![half, n - half] };
        let rec = rep.ok(block_lu(&spd, &blocks), "block_lu").map(|(l, u)| &l * &u);
        fam(&mut rep, "block_lu", &spd, rec);
        let rec = rep.ok(cholesky(&spd), "cholesky").map(|f| f.reconstruct());
        fam(&mut rep, "cholesky", &spd, rec);
        let rec = rep.ok(semidefinite_rank_revealing(&psd), "semidefinite").map(|f| f.reconstruct());
        fam(&mut rep, "semidefinite", &psd, rec);

        for method in [Method::Cgs, Method::Mgs, Method::Householder, Method::Givens] {
            for shape in [Shape::Reduced, Shape::Full] {
                let name = format!("qr/{method:?}/{shape:?}");
                let rec = rep.ok(qr(&tall, method, shape), &name).map(|f| f.reconstruct());
                fam(&mut rep, &name, &tall, rec);
            }
        }
        let rec = rep.ok(cpqr(&low, CpqrMode::Practical, Shape::Reduced), "cpqr").map(|(f, _)| f.reconstruct());
        fam(&mut rep, "cpqr", &low, rec);
        let wide = tall.transpose();
        let rec = rep.ok(lq(&wide, Shape::Reduced, false), "lq").map(|f| f.reconstruct());
        fam(&mut rep, "lq", &wide, rec);
        let rec = rep.ok(lq(&low, Shape::Reduced, true), "rplq").map(|f| f.reconstruct());
        fam(&mut rep, "rplq", &low, rec);
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            let name = format!("utv/{kind:?}");
            let rec = rep.ok(utv(&low, kind), &name).map(|f| f.reconstruct());
            fam(&mut rep, &name, &low, rec);
        }
        let rec = rep.ok(cr(&low), "cr").map(|f| &f.c * &f.r);
        fam(&mut rep, "cr", &low, rec);
        let rec = rep.ok(rank_decomposition(&low), "rank").map(|f| &f.d * &f.f);
        fam(&mut rep, "rank", &low, rec);
        let rec = rep.ok(cur(&low, CurMode::Deterministic).and_then(|f| f.reconstruct()), "cur");
        fam(&mut rep, "cur", &low, rec);
        let rec = rep.ok(id_column(&low, IdMode::Cpqr), "id/column").map(|f| f.reconstruct());
        fam(&mut rep, "id/column", &low, rec);
        let rec = rep.ok(id_row(&low, IdMode::Cpqr), "id/row").map(|f| f.reconstruct());
        fam(&mut rep, "id/row", &low, rec);
        let rec = rep.ok(id_two_sided(&low, IdMode::Cpqr), "id/two-sided").map(|f| f.reconstruct());
        fam(&mut rep, "id/two-sided", &low, rec);
        let rec = rep.ok(hessenberg(&sq), "hessenberg").map(|f| f.reconstruct());
        fam(&mut rep, "hessenberg", &sq, rec);
        let rec = rep.ok(tridiagonalize(&sym), "tridiagonal").map(|f| f.reconstruct());
        fam(&mut rep, "tridiagonal", &sym, rec);
        for s in [BidiagStrategy::GolubKahan, BidiagStrategy::Lhc, BidiagStrategy::ThreeStep] {
            let name = format!("bidiagonal/{s:?}");
            let rec = rep.ok(bidiagonalize(&tall, s), &name).map(|f| f.reconstruct());
            fam(&mut rep, &name, &tall, rec);
        }
        let ns = n.min(40);
        let real = real_spectrum(&mut r, ns);
        let rec = rep.ok(schur(&real), "schur").map(|f| f.reconstruct());
        fam(&mut rep, "schur", &real, rec);
        let rec = rep.ok(evd(&real).and_then(|f| f.reconstruct()), "evd");
        fam(&mut rep, "evd", &real, rec);
        let rec = rep.ok(spectral(&sym), "spectral").map(|f| f.reconstruct());
        fam(&mut rep, "spectral", &sym, rec);
        for shape in [Shape::Reduced, Shape::Full] {
            let name = format!("svd/{shape:?}");
            let rec = rep.ok(svd(&tall, shape), &name).map(|f| f.reconstruct());
            fam(&mut rep, &name, &tall, rec);
        }
        for side in [PolarSide::Left, PolarSide::Right] {
            let name = format!("polar/{side:?}");
            let rec = rep.ok(polar(&sq, side), &name).map(|f| f.reconstruct());
            fam(&mut rep, &name, &sq, rec);
        }
        // the two-sided form reconstructs A·P·A
        if let Some(t) = rep.ok(two_sided_orthogonal(&sq), "two-sided") {
            let apa = &(&sq * &t.p.to_matrix()) * &sq;
            fam(&mut rep, "two-sided", &apa, Some(t.reconstruct()));
        }
        let w = random_matrix(&mut r, ns, ns + 3);
        if let Some(seq) = rep.ok(wedderburn_run(&w, &mut LargestEntrySupplier), "wedderburn") {
            fam(&mut rep, "wedderburn/form1", &w, Some(form1(&seq).reconstruct()));
            fam(&mut rep, "wedderburn/form2", &w, Some(form2_reconstruct(&seq)));
            let ws: Vec<f64> = seq.steps.iter().map(|s| s.w).collect();
            fam(&mut rep, "wedderburn/form3", &Matrix::from_diag(&ws), Some(form3(&seq)));
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn worked_examples() -> Report {
    let mut rep = Report::default();

    let fib = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]);
    let f100 = 3.542_248_481_792_631e20;
    if let Some(p) = rep.ok(matrix_power(&fib, 100), "fibonacci") {
        let e = (p[(0, 1)] - f100).abs() / f100;
        rep.check(e <= 1e-10, || format!("F100 relative error {e:e}"));
    }

    let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]);
    let pm = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
    if let Some(p) = rep.ok(Permutation::from_matrix(&pm), "permutation") {
        let pa = permute(&a, &p, Side::Rows).unwrap();
        let ap = permute(&a, &p, Side::Cols).unwrap();
        rep.check(pa == Matrix::from_rows(&[[4.0, 5.0, 6.0], [7.0, 8.0, 9.0], [1.0, 2.0, 3.0]]), || {
            format!("PA = {pa:?}")
        });
        rep.check(ap == Matrix::from_rows(&[[3.0, 1.0, 2.0], [6.0, 4.0, 5.0], [9.0, 7.0, 8.0]]), || {
            format!("AP = {ap:?}")
        });
    }

    let b = Matrix::from_rows(&[
        [0.0, 1.0, 1.0, 1.0],
        [-1.0, 2.0, -1.0, 2.0],
        [2.0, 1.0, 4.0, 2.0],
        [1.0, 2.0, 3.0, 3.0],
    ]);
    if let Some((l, u)) = rep.ok(block_lu(&b, &[2, 2]), "block lu") {
        let l_exp = Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [5.0, -2.0, 1.0, 0.0],
            [4.0, -1.0, 0.0, 1.0],
        ]);
        let u_exp = Matrix::from_rows(&[
            [0.0, 1.0, 1.0, 1.0],
            [-1.0, 2.0, -1.0, 2.0],
            [0.0, 0.0, -3.0, 1.0],
            [0.0, 0.0, -2.0, 1.0],
        ]);
        rep.check((&l - &l_exp).max_abs() < 1e-14, || format!("block L = {l:?}"));
        rep.check((&u - &u_exp).max_abs() < 1e-14, || format!("block U = {u:?}"));
    }

    let c = Matrix::from_rows(&[
        [1.0, 2.0, 3.0, 4.0],
        [2.0, 3.0, 7.0, 3.0],
        [5.0, 2.0, 1.0, 2.0],
        [2.0, 1.0, 2.0, 1.0],
    ]);
    if let Some(f) = rep.ok(lu(&c, Pivoting::Rook), "rook") {
        let (_, i, j) = f.pivot_log[0];
        rep.check([5.0, 4.0, 7.0].contains(&c[(i, j)]), || format!("rook first pivot {}", c[(i, j)]));
    }
    if let Some(f) = rep.ok(lu(&c, Pivoting::Complete), "complete") {
        let (_, i, j) = f.pivot_log[0];
        rep.check(c[(i, j)] == 7.0, || format!("complete first pivot {}", c[(i, j)]));
    }

    // closed forms evaluated independently of the flop module
    for &(m, n) in &[(10usize, 10usize), (100, 10), (100, 50), (75, 45), (200, 120)] {
        let (mf, nf) = (m as f64, n as f64);
        let expect = [
            (FlopOp::LuFactor, 2.0 * nf.powi(3) / 3.0),
            (FlopOp::Inverse, 2.0 * nf.powi(3)),
            (FlopOp::GolubKahan, 4.0 * mf * nf * nf - 4.0 * nf.powi(3) / 3.0),
            (FlopOp::Lhc, 2.0 * mf * nf * nf + 2.0 * nf.powi(3)),
            (FlopOp::ThreeStep, 2.0 * mf * nf * nf + 2.0 * mf * mf * nf - 2.0 * (mf.powi(3) + nf.powi(3)) / 3.0),
        ];
        for (op, want) in expect {
            let got = flops(op, m, n);
            rep.check((got - want).abs() <= 1e-12 * want.abs(), || format!("{op:?}({m},{n}) = {got}, want {want}"));
        }
    }
    for n in [3usize, 30, 60, 90] {
        let ms: Vec<usize> = (n..=3 * n).collect();
        let flagged: Vec<usize> = bidiag_cost_table(n, &ms).iter().filter(|row| row.crossover).map(|row| row.m).collect();
        let first = ms.iter().copied().find(|&m| 3 * m >= 5 * n).unwrap();
        rep.check(flagged == vec![first], || format!("n={n} crossover flagged at {flagged:?}, want [{first}]"));
        for row in bidiag_cost_table(n, &ms) {
            rep.check(row.lhc_cheaper == (3 * row.m > 5 * n), || format!("n={n} m={} lhc_cheaper wrong", row.m));
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn stability() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1003);
    let n = 40;
    let mut mgs_wins = 0;
    let total = 100;
    for i in 0..total {
        let cond = 10f64.powf(2.0 + 8.0 * i as f64 / (total - 1) as f64);
        let a = with_condition(&mut r, n, cond);
        let (Some(c), Some(m)) = (
            rep.ok(qr(&a, Method::Cgs, Shape::Reduced), "cgs"),
            rep.ok(qr(&a, Method::Mgs, Shape::Reduced), "mgs"),
        ) else {
            continue;
        };
        if m.q.orthogonality_defect() <= c.q.orthogonality_defect() {
            mgs_wins += 1;
        }
        let h = householder_qr(&a).q.orthogonality_defect();
        rep.check(h <= 1e-12 * n as f64, || format!("householder defect {h:e} at cond {cond:e}"));
    }
    rep.check(mgs_wins >= 95, || format!("MGS no worse than CGS in only {mgs_wins}/{total}"));
    rep
}

// ---------------------------------------------------------------------------

fn same_factor(rep: &mut Report, what: &str, got: &Matrix, want: &Matrix) {
    let e = got.rel_diff(want);
    rep.check(e <= 1e-9, || format!("{what}: relative difference {e:e}"));
}

fn check_qr(rep: &mut Report, what: &str, f: &QrResult, target: &Matrix) {
    same_factor(rep, what, &f.reconstruct(), target);
    let d = f.q.orthogonality_defect();
    rep.check(d <= 1e-12, || format!("{what}: orthogonality defect {d:e}"));
    rep.check(f.r.is_upper_triangular(), || format!("{what}: R not upper triangular"));
    // R is unique up to row signs, so compare against a fresh factorization
    let fresh = qr_unique(target, Shape::Full);
    let got = f.clone().normalize_signs();
    same_factor(rep, &format!("{what} R"), &got.r, &fresh.r);
}

fn updates() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1004);
    let n = 20;
    for _ in 0..20 {
        let a = random_spd(&mut r, n);
        let v = random_vector(&mut r, n);
        let Some(f) = rep.ok(cholesky(&a), "cholesky") else { continue };
        let plus = &a + &outer(&v, &v);
        if let Some(g) = rep.ok(rank_one_update(&f, &v), "update") {
            same_factor(&mut rep, "cholesky update", &g.reconstruct(), &plus);
            same_factor(&mut rep, "cholesky update R", &g.r, &cholesky(&plus).unwrap().r);
            if let Some(back) = rep.ok(rank_one_downdate(&g, &v), "downdate") {
                same_factor(&mut rep, "cholesky update/downdate round trip", &back.r, &f.r);
            }
        }
        let small: Vec<f64> = v.iter().map(|x| 0.1 * x).collect();
        let minus = &a - &outer(&small, &small);
        if let (Some(g), Ok(fresh)) = (rep.ok(rank_one_downdate(&f, &small), "downdate"), cholesky(&minus)) {
            same_factor(&mut rep, "cholesky downdate", &g.reconstruct(), &minus);
            same_factor(&mut rep, "cholesky downdate R", &g.r, &fresh.r);
        }
        let u: Vec<f64> = random_vector(&mut r, n).iter().map(|x| 0.1 * x).collect();
        let e = &Matrix::identity(n) + &outer(&u, &small);
        let target = &(&e.transpose() * &a) * &e;
        if let Some(g) = rep.ok(rank_two_indefinite_update(&f, &u, &small), "rank-two") {
            same_factor(&mut rep, "rank-two update", &g.reconstruct(), &target);
            same_factor(&mut rep, "rank-two update R", &g.r, &cholesky(&target.symmetrize()).unwrap().r);
        }

        let b = random_matrix(&mut r, n, n);
        let q = householder_qr(&b);
        let (x, y) = (random_vector(&mut r, n), random_vector(&mut r, n));
        let changed = &b + &outer(&x, &y);
        if let Some(g) = rep.ok(qr_rank_one_change(&q, &x, &y), "qr rank-one") {
            check_qr(&mut rep, "qr rank-one change", &g, &changed);
            let neg: Vec<f64> = x.iter().map(|t| -t).collect();
            if let Some(back) = rep.ok(qr_rank_one_change(&g, &neg, &y), "qr rank-one back") {
                same_factor(&mut rep, "qr rank-one round trip", &back.reconstruct(), &b);
            }
        }
        let k = r.gen_range(0..n);
        let keep: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        if let Some(g) = rep.ok(qr_delete_column(&q, k), "qr delete column") {
            check_qr(&mut rep, "qr delete column", &g, &b.select_cols(&keep));
            if let Some(back) = rep.ok(qr_append_column(&g, &b.col(k), k), "qr append column") {
                check_qr(&mut rep, "qr column round trip", &back, &b);
            }
        }
        let w = random_vector(&mut r, n);
        let mut rows: Vec<Vec<f64>> = (0..n).map(|i| b.row(i).to_vec()).collect();
        rows.insert(k, w.clone());
        let grown = Matrix::from_rows(&rows);
        if let Some(g) = rep.ok(qr_append_row(&q, &w, k), "qr append row") {
            check_qr(&mut rep, "qr append row", &g, &grown);
            if let Some(back) = rep.ok(qr_delete_row(&g, k), "qr delete row") {
                check_qr(&mut rep, "qr row round trip", &back, &b);
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).unwrap().first().copied().unwrap_or(0.0)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// Volume `sqrt(det(CᵀC))` of the selected columns.
fn volume(a: &Matrix, cols: &[usize]) -> f64 {
    let c = a.select_cols(cols);
    singular_values(&c).unwrap().iter().product()
}

fn optimality() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1005);
    for _ in 0..10 {
        let (m, n) = (r.gen_range(5..=30), r.gen_range(5..=30));
        let a = random_matrix(&mut r, m, n);
        let k = r.gen_range(1..m.min(n));
        let Some(best) = rep.ok(truncated_svd(&a, k), "truncated svd") else { continue };
        let res = &a - &best.approx;
        let (s2, f2) = (spectral_norm(&res), res.frobenius());
        let top = svd(&a, Shape::Reduced).unwrap();
        for c in 0..200 {
            let comp = if c % 2 == 0 {
                // project onto a random k-dimensional column space
                let q = householder_qr(&random_matrix(&mut r, m, k)).q.submatrix(0, m, 0, k);
                &q * &q.t_mul(&a)
            } else {
                // perturb the optimal factors
                let eps = 10f64.powf(-(c % 7) as f64);
                let u = &top.u.submatrix(0, m, 0, k) + &random_matrix(&mut r, m, k).scale(eps);
                let v = &top.v.submatrix(0, n, 0, k) + &random_matrix(&mut r, n, k).scale(eps);
                let s = Matrix::from_diag(&top.sigma[..k]);
                &(&u * &s) * &v.transpose()
            };
            let d = &a - &comp;
            let (cs, cf) = (spectral_norm(&d), d.frobenius());
            rep.check(s2 <= cs * (1.0 + 1e-12), || format!("spectral {s2} beaten by {cs}"));
            rep.check(f2 <= cf * (1.0 + 1e-12), || format!("frobenius {f2} beaten by {cf}"));
        }
        let oracle = top.sigma[k];
        rep.check((best.spectral_error - oracle).abs() <= 1e-12 * oracle, || "reported spectral error".into());
    }

    for _ in 0..20 {
        let m = r.gen_range(3..=8);
        let n = r.gen_range(3..=10);
        let rank = r.gen_range(1..=4.min(m).min(n));
        let a = random_low_rank(&mut r, m, n, rank);
        let Some(f) = rep.ok(id_column(&a, IdMode::Optimal), "optimal id") else { continue };
        let w_max = f.w.max_abs();
        rep.check(w_max <= 1.0 + 1e-12, || format!("{m}x{n} rank {rank}: max|w| {w_max}"));
        rep.check(f.j_s.len() == rank, || format!("selected {} columns for rank {rank}", f.j_s.len()));
        same_factor(&mut rep, "optimal id", &f.reconstruct(), &a);
        let mut cols = f.j_s.clone();
        cols.sort_unstable();
        let chosen = volume(&a, &cols);
        let best = subsets(n, rank).iter().map(|s| volume(&a, s)).fold(0.0, f64::max);
        rep.check(chosen >= best * (1.0 - 1e-9), || format!("volume {chosen} below exhaustive max {best}"));
    }
    rep
}

// ---------------------------------------------------------------------------

fn equivalences() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1006);
    for _ in 0..20 {
        let n = r.gen_range(3..=10);
        let g = random_matrix(&mut r, n, n);

        if let (Some(Recovered::Ldu(f)), Ok(native)) = (rep.ok(recover(&g, RecoverTarget::Ldu), "ldu"), ldu(&g)) {
            rep.check((&f.l - &native.l).max_abs() <= 1e-9, || "wedderburn L".into());
            rep.check((&f.u - &native.u).max_abs() <= 1e-9, || "wedderburn U".into());
            let d_ok = f.d.iter().zip(&native.d).all(|(x, y)| (x - y).abs() <= 1e-9 * y.abs().max(1.0));
            rep.check(d_ok, || "wedderburn D".into());
        }
        let spd = random_spd(&mut r, n);
        if let Some(Recovered::Cholesky(f)) = rep.ok(recover(&spd, RecoverTarget::Cholesky), "cholesky") {
            let e = (&f.r - &cholesky(&spd).unwrap().r).max_abs();
            rep.check(e <= 1e-9, || format!("wedderburn cholesky {e:e}"));
        }
        if let Some(Recovered::Qr { q, r: rr }) = rep.ok(recover(&g, RecoverTarget::Qr), "qr") {
            let native = qr_unique(&g, Shape::Full);
            rep.check((&q - &native.q).max_abs() <= 1e-8, || "wedderburn Q".into());
            rep.check((&rr - &native.r).max_abs() <= 1e-8 * g.max_abs(), || "wedderburn R".into());
        }
        let (m, k) = (n + r.gen_range(0..4), r.gen_range(1..=n));
        let s = random_low_rank(&mut r, m, n, k);
        if let Some(Recovered::Svd { u, sigma, v }) = rep.ok(recover(&s, RecoverTarget::Svd), "svd") {
            let native = svd(&s, Shape::Reduced).unwrap();
            let rank = native.rank;
            let top = native.sigma[0];
            rep.check(sigma.len() == rank, || format!("wedderburn svd rank {} vs {rank}", sigma.len()));
            let ok = sigma.iter().zip(&native.sigma).all(|(x, y)| (x - y).abs() <= 1e-8 * top);
            rep.check(ok, || "wedderburn sigma".into());
            rep.check((&u - &native.u.submatrix(0, m, 0, rank)).max_abs() <= 1e-8, || "wedderburn U".into());
            rep.check((&v - &native.v.submatrix(0, n, 0, rank)).max_abs() <= 1e-8, || "wedderburn V".into());
        }

        // four fundamental subspaces through UTV and through the SVD
        let sub = four_subspaces(&s).unwrap();
        for kind in [UtvKind::Ulv, UtvKind::Urv, UtvKind::Complete] {
            let Some(f) = rep.ok(utv(&s, kind), "utv") else { continue };
            let b = four_subspace_bases(&f);
            for (name, x, y) in [
                ("column", &b.col, &sub.column),
                ("left null", &b.left_null, &sub.left_null),
                ("row", &b.row, &sub.row),
                ("null", &b.null, &sub.null),
            ] {
                let e = (&projector(x) - &projector(y)).max_abs();
                rep.check(e <= 1e-9, || format!("{kind:?} {name} projector {e:e}"));
            }
        }

        // principal components three ways
        let (rows, p) = (r.gen_range(4..=30), r.gen_range(2..=12));
        let x = random_matrix(&mut r, rows, p);
        let mm = p.min(rows - 1);
        let routes: Vec<_> = [PcaMode::Covariance, PcaMode::Svd, PcaMode::HighDim]
            .into_iter()
            .filter_map(|mode| rep.ok(pca(&x, mm, mode), &format!("pca {mode:?}")))
            .collect();
        for w in routes.windows(2) {
            let e = (&w[0].axes - &w[1].axes).max_abs();
            rep.check(e <= 1e-8, || format!("pca axes differ by {e:e}"));
            let e = w[0].explained.iter().zip(&w[1].explained).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rep.check(e <= 1e-8 * w[0].total_variance, || format!("pca variances differ by {e:e}"));
        }

        let a = random_matrix(&mut r, m, n);
        let sigma = singular_values(&a).unwrap();
        let lambda = spectral(&a.t_mul(&a)).unwrap().lambda;
        let scale = sigma[0] * sigma[0];
        let e = sigma.iter().zip(&lambda).map(|(s, l)| (s * s - l).abs()).fold(0.0, f64::max);
        rep.check(e <= 1e-8 * scale, || format!("sigma^2 vs eigenvalues {e:e}"));
    }
    rep
}

// ---------------------------------------------------------------------------

fn monotone(h: &[f64]) -> bool {
    h.windows(2).all(|p| p[1] <= p[0] + 1e-12 * p[0].abs())
}

fn nonnegative(f: &FactorPair) -> bool {
    f.w.as_slice().iter().chain(f.z.as_slice()).all(|&x| x >= 0.0)
}

fn losses() -> Report {
    let mut rep = Report::default();
    let base = AlsConfig { tol: 0.0, ..AlsConfig::default() };
    let inits = [NmfInit::Random, NmfInit::Clustering, NmfInit::Subset, NmfInit::SvdBased];
    for seed in 0..50u64 {
        let mut r = rng(2000 + seed);
        let (m, n) = (r.gen_range(4..=15), r.gen_range(4..=15));
        let k = r.gen_range(1..=3);
        let a = random_matrix(&mut r, m, n);
        let lambda = [0.0, 0.01, 0.1, 1.0][seed as usize % 4];
        let cfg = AlsConfig { lambda_w: lambda, lambda_z: lambda, max_iter: 60, seed, ..base.clone() };
        if let Some(f) = rep.ok(als(&a, k, &cfg), "als") {
            rep.check(monotone(&f.loss_history), || format!("als seed {seed} loss increased"));
        }
        let pos = random_uniform(&mut r, m, n);
        let cfg = AlsConfig { max_iter: 200, seed, ..base.clone() };
        let init = inits[seed as usize % 4];
        if let Some(f) = rep.ok(nmf(&pos, k, &cfg, init), "nmf") {
            rep.check(monotone(&f.loss_history), || format!("nmf seed {seed} {init:?} loss increased"));
            rep.check(nonnegative(&f), || format!("nmf seed {seed} negative factor"));
        }
    }

    // planted low-rank data with 30% of entries hidden
    for seed in 0..5u64 {
        let mut r = rng(3000 + seed);
        let a = &random_matrix(&mut r, 20, 2) * &random_matrix(&mut r, 2, 15);
        let mask = loop {
            let mask = Matrix::from_fn(20, 15, |_, _| if r.gen::<f64>() < 0.3 { 0.0 } else { 1.0 });
            let rows_ok = (0..20).all(|i| mask.row(i).contains(&1.0));
            let cols_ok = (0..15).all(|j| mask.col(j).contains(&1.0));
            if rows_ok && cols_ok {
                break mask;
            }
        };
        let data = MaskedMatrix::new(a, mask).unwrap();
        let cfg = AlsConfig { lambda_w: 1e-10, lambda_z: 1e-10, max_iter: 2000, tol: 1e-14, seed, ..base.clone() };
        if let Some(f) = rep.ok(als_masked(&data, 2, &cfg), "masked als") {
            let p = f.product();
            let (seen, hidden) = (data.rmse(&p, true), data.rmse(&p, false));
            rep.check(seen <= 1e-3, || format!("masked seed {seed}: observed rmse {seen:e}"));
            rep.check(hidden <= 5.0 * seen.max(1e-12), || format!("masked seed {seed}: hidden rmse {hidden:e}"));
            rep.check(monotone(&f.loss_history), || format!("masked seed {seed} loss increased"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn is_permutation(idx: &[usize]) -> bool {
    Permutation::new(idx.to_vec()).is_ok()
}

fn structure() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1008);
    for _ in 0..20 {
        let n = r.gen_range(2..=25);
        let m = n + r.gen_range(0..10);
        let a = random_matrix(&mut r, n, n);
        let tall = random_matrix(&mut r, m, n);
        let sym = random_symmetric(&mut r, n);

        for s in [Pivoting::Partial, Pivoting::Complete, Pivoting::Rook] {
            if let Some(f) = rep.ok(lu(&a, s), "lu") {
                rep.check(f.l.is_lower_triangular() && f.u.is_upper_triangular(), || format!("{s:?} LU pattern"));
                rep.check(is_permutation(f.p.indices()) && is_permutation(f.q.indices()), || "lu perms".into());
            }
        }
        for method in [Method::Cgs, Method::Mgs, Method::Householder, Method::Givens] {
            if let Some(f) = rep.ok(qr(&tall, method, Shape::Full), "qr") {
                rep.check(f.r.is_upper_triangular(), || format!("{method:?} R pattern"));
            }
        }
        if let Some((f, _)) = rep.ok(cpqr(&tall, CpqrMode::Practical, Shape::Reduced), "cpqr") {
            rep.check(f.r.is_upper_triangular() && is_permutation(f.p.indices()), || "cpqr pattern".into());
        }
        let psd = random_low_rank(&mut r, n, n, (n / 2).max(1));
        if let Some(f) = rep.ok(semidefinite_rank_revealing(&psd.mul_t(&psd)), "semidefinite") {
            rep.check(f.r11.is_upper_triangular() && is_permutation(f.p.indices()), || "semidefinite".into());
        }
        if let Some(f) = rep.ok(hessenberg(&a), "hessenberg") {
            let ok = (0..n).all(|i| (0..n).all(|j| i <= j + 1 || f.h[(i, j)] == 0.0));
            rep.check(ok, || "hessenberg pattern".into());
        }
        if let Some(f) = rep.ok(tridiagonalize(&sym), "tridiagonal") {
            let ok = (0..n).all(|i| (0..n).all(|j| i.abs_diff(j) <= 1 || f.h[(i, j)] == 0.0));
            rep.check(ok, || "tridiagonal pattern".into());
        }
        for s in [BidiagStrategy::GolubKahan, BidiagStrategy::Lhc, BidiagStrategy::ThreeStep] {
            if let Some(f) = rep.ok(bidiagonalize(&tall, s), "bidiagonal") {
                let b = &f.b;
                let ok = (0..b.rows()).all(|i| (0..b.cols()).all(|j| j == i || j == i + 1 || b[(i, j)] == 0.0));
                rep.check(ok, || format!("{s:?} bidiagonal pattern"));
            }
        }
        if let Some(f) = rep.ok(schur(&real_spectrum(&mut r, n)), "schur") {
            rep.check(f.u.is_upper_triangular(), || "schur pattern".into());
        }

        // skew-symmetric of rank 2k built as a sum of k skew rank-two terms
        let k = r.gen_range(0..=n / 2);
        let mut skew = Matrix::zeros(n, n);
        for _ in 0..k {
            let (x, y) = (random_vector(&mut r, n), random_vector(&mut r, n));
            skew = &skew + &(&outer(&x, &y) - &outer(&y, &x));
        }
        if let Some(f) = rep.ok(block_diagonalize_skew(&skew), "skew") {
            rep.check(f.rank % 2 == 0 && f.rank == 2 * k, || format!("skew rank {} for {k} terms", f.rank));
            let ok = (0..n).all(|i| {
                (0..n).all(|j| {
                    let want = if i < f.rank && j < f.rank && i / 2 == j / 2 && i != j {
                        if i < j { 1.0 } else { -1.0 }
                    } else {
                        0.0
                    };
                    f.d[(i, j)] == want
                })
            });
            rep.check(ok, || "skew block pattern".into());
            same_factor(&mut rep, "skew reconstruction", &f.reconstruct(), &skew);
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn eigen_theory() -> Report {
    let mut rep = Report::default();
    let mut r = rng(1009);
    for _ in 0..20 {
        let m = r.gen_range(3..=30);
        let n = r.gen_range(1..=m);
        let a = random_matrix(&mut r, m, n);
        let Some(h) = rep.ok(hat_matrix(&a), "hat") else { continue };
        let lambda = spectral(&h.symmetrize()).unwrap().lambda;
        let ones = lambda.iter().filter(|&&l| (l - 1.0).abs() <= 1e-8).count();
        let zeros = lambda.iter().filter(|&&l| l.abs() <= 1e-8).count();
        rep.check(ones + zeros == m, || format!("hat eigenvalues {lambda:?}"));
        rep.check(ones == n, || format!("hat matrix has {ones} unit eigenvalues, want {n}"));
    }

    let mut disagree = 0;
    let mut pd_count = 0;
    for _ in 0..1000 {
        let n = r.gen_range(1..=8);
        let g = random_matrix(&mut r, n, n);
        let shift = r.gen_range(0.0..0.5);
        let s = &g.mul_t(&g).scale(1.0 / n as f64) - &Matrix::identity(n).scale(shift);
        let s = s.symmetrize();
        let chol = cholesky(&s).is_ok();
        pd_count += chol as usize;
        match is_pd_sylvester(&s) {
            Ok(syl) if syl == chol => {}
            _ => disagree += 1,
        }
    }
    rep.check(disagree == 0, || format!("Sylvester and Cholesky disagree on {disagree}/1000"));
    rep.check(pd_count > 100 && pd_count < 900, || format!("unbalanced sample: {pd_count} definite"));

    for _ in 0..20 {
        let n = r.gen_range(2..=15);
        let a = real_spectrum(&mut r, n);
        let x = &random_matrix(&mut r, n, n) + &Matrix::identity(n).scale(3.0);
        let b = &(&x * &a) * &matdec::lu::inverse(&x).unwrap();
        let (Some(ea), Some(eb)) = (rep.ok(evd(&a), "evd"), rep.ok(evd(&b), "evd similar")) else { continue };
        let (la, lb) = (sorted(ea.lambda), sorted(eb.lambda));
        let e = la.iter().zip(&lb).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        rep.check(e <= 1e-7, || format!("similar eigenvalues differ by {e:e}"));
        if let Some(s) = rep.ok(schur(&b), "schur similar") {
            let ls = sorted(s.eigenvalues());
            let e = la.iter().zip(&ls).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            rep.check(e <= 1e-7, || format!("schur eigenvalues differ by {e:e}"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let suites: [(&str, fn() -> Report); 9] = [
        ("reconstruction", reconstruction),
        ("worked examples", worked_examples),
        ("stability ordering", stability),
        ("update equals recompute", updates),
        ("optimality oracles", optimality),
        ("cross-module equivalences", equivalences),
        ("monotone losses", losses),
        ("structural exactness", structure),
        ("eigen-theory spot checks", eigen_theory),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in suites.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let rep = run();
        let secs = t.elapsed().as_secs_f64();
        let status = if rep.failures.is_empty() && secs < 60.0 { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {status} ({} checks, {secs:.1}s)", i + 1, rep.checks);
        if secs >= 60.0 {
            println!("    over the 60 s budget");
        }
        for f in rep.failures.iter().take(10) {
            println!("    {f}");
        }
        if rep.failures.len() > 10 {
            println!("    ... {} more", rep.failures.len() - 10);
        }
        failed += (status == "FAIL") as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
