"""Exit criteria. Each test records one PASS/FAIL line, printed at session end."""

import csv
import io
import json
import time
from collections import Counter

from jkinv.cli import main
from jkinv.coadjoint import (
    ad_invariance_residual,
    degree_sum_check,
    homogeneity_check,
    independence_rank,
    invariant_degree,
    selectors,
)
from jkinv.exactla import PrimeField, SeededRng, random_vector
from jkinv.liealg import build_abelian, build_semidirect, build_sl, index_of
from jkinv.pencil import (
    algebra_structure,
    jk_structure,
    lie_poisson_pencil,
    polynomial_kernel_oracle,
    random_canonical_spec,
    synth_pencil,
    toeplitz_solution_dims,
)
from jkinv.predict import decompose, index_formula

RESULTS: list[tuple[str, bool, str]] = []

THEOREM_CASES = [(n, k) for n in range(3, 9) for k in range(2, n) if n % k in (1, k - 1)]
CONJECTURE_CASES = [(7, 5), (8, 5), (9, 7), (11, 7), (11, 8)]


def _compute(capsys, n, k):
    start = time.perf_counter()
    code = main(["compute", "--n", str(n), "--k", str(k), "--trials", "3"])
    elapsed = time.perf_counter() - start
    return code, json.loads(capsys.readouterr().out), elapsed


def test_theorem_list_matches_brief():
    assert THEOREM_CASES == [(3, 2), (4, 3), (5, 2), (5, 3), (5, 4), (6, 5), (7, 2), (7, 3), (7, 4),
                             (7, 6), (8, 3), (8, 7)]


def test_c1_theorem_reproduction(capsys):
    def body():
        slowest = 0.0
        for n, k in THEOREM_CASES:
            code, rep, elapsed = _compute(capsys, n, k)
            par = decompose(n, k)
            size = (par.d + 1) * (n + par.r) - 1
            assert rep["p"] == 2**61 - 1
            assert code == 0, (n, k, rep)
            assert Counter(rep["kronecker_sizes"]) == Counter({size: k}), (n, k, rep["kronecker_sizes"])
            assert rep["jordan_dim"] == 0 and rep["index"] == k
            assert elapsed < 60, (n, k, elapsed)
            slowest = max(slowest, elapsed)
        return f"{len(THEOREM_CASES)} cases, slowest {slowest:.2f}s"

    _run("C1 theorem reproduction", body)


def test_c2_index_formula():
    def body():
        F = PrimeField()
        cases = [(n, k) for n in range(3, 9) for k in range(2, n)]
        for n, k in cases:
            got = index_of(build_semidirect(n, k), 3, SeededRng(1000 * n + k), F)
            assert got == index_formula(n, k), (n, k, got)
        return f"{len(cases)} cases"

    _run("C2 index formula", body)


def test_c3_proof_layer():
    def body():
        F = PrimeField()
        checked = 0
        for n, k in THEOREM_CASES:
            if n > 7:
                continue
            rng = SeededRng(77 * n + k)
            L = build_semidirect(n, k)
            par = decompose(n, k)
            D = invariant_degree(n, k)
            assert 2 * D == (par.d + 1) * (n + par.r)
            points = [random_vector(L.dim, rng, F) for _ in range(5)]
            for sel in selectors(n, k):
                assert homogeneity_check(L, sel, rng, F, degree=(par.d + 1) * (n + par.r) // 2)
                for x in points:
                    assert not ad_invariance_residual(L, x, sel, F).any(), (n, k, sel)
            assert independence_rank(L, points[0], F) == k
            assert degree_sum_check(n, k)
            checked += 1
        return f"{checked} cases"

    _run("C3 proof-layer checks", body)


def test_c4_cross_identity():
    def body():
        F = PrimeField()
        for n, k in THEOREM_CASES:
            ks = algebra_structure(build_semidirect(n, k), 3, SeededRng(5 * n + k), F)
            D = invariant_degree(n, k)
            assert ks.block_sizes and all(s == 2 * D - 1 for s in ks.block_sizes), (n, k, ks.block_sizes)
        return f"{len(THEOREM_CASES)} cases"

    _run("C4 block size = 2 deg f - 1", body)


def test_c5_oracle_equivalence():
    def body():
        F = PrimeField()
        rng = SeededRng(2024)
        recovered = 0
        for _ in range(100):
            spec = random_canonical_spec(30, rng, F)
            P = synth_pencil(spec, rng, F)
            ks = jk_structure(P, 3, rng)
            if ks.minimal_indices == spec.kronecker_eps and ks.jordan_dim == spec.jordan_dim:
                recovered += 1
            assert toeplitz_solution_dims(P, 6) == [polynomial_kernel_oracle(P, j) for j in range(7)]
        assert recovered == 100, recovered
        return "100/100 recovered; s_j agree for j <= 6"

    _run("C5 canonical round trip + oracle", body)


def test_c6_conjecture_experiment(tmp_path):
    def body():
        argv = ["scan", "--seed", "1"]
        for n, k in CONJECTURE_CASES:
            argv += ["--case", f"{n},{k}"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        start = time.perf_counter()
        assert main(argv + ["--out", str(first)]) == 0
        elapsed = time.perf_counter() - start
        assert main(argv + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        rows = list(csv.DictReader(io.StringIO(first.read_text())))
        assert [(int(r["n"]), int(r["k"])) for r in rows] == CONJECTURE_CASES
        findings = []
        for r in rows:
            assert r["source"] == "Conjecture"
            sizes = [int(s) for s in r["sizes_computed"].split(";")]
            dim, index, jordan = int(r["dim"]), int(r["index_computed"]), int(r["jordan_dim"])
            assert sum(sizes) + jordan == dim
            assert all(s % 2 == 1 for s in sizes) and jordan % 2 == 0
            assert len(sizes) == index and (dim - index) % 2 == 0
            assert r["match"] in ("true", "false")
            findings.append(f"({r['n']},{r['k']}) match={r['match']}")
        assert elapsed < 600
        return f"{elapsed:.1f}s; " + ", ".join(findings)

    _run("C6 conjecture experiment", body)


def test_c7_sanity_fixtures():
    def body():
        F = PrimeField()
        rng = SeededRng(8)
        P = lie_poisson_pencil(build_sl(2), rng, F)
        assert [polynomial_kernel_oracle(P, j) for j in (0, 1)] == [0, 1]
        ks = jk_structure(P, 3, rng)
        assert ks.block_sizes == (3,) and ks.jordan_dim == 0
        for m in (1, 4, 7):
            ks = algebra_structure(build_abelian(m), 3, rng, F)
            assert ks.block_sizes == (1,) * m and ks.jordan_dim == 0
        return "sl(2) -> [3]; abelian m -> m x [1]"

    _run("C7 sanity fixtures", body)


def _run(name, body):
    try:
        detail = body()
    except Exception as exc:
        RESULTS.append((name, False, f"{type(exc).__name__}: {exc}"))
        raise
    RESULTS.append((name, True, detail or ""))
