import cmath
import math
import random

import mpmath
import numpy as np
import pytest

from index7.eisenstein import (
    EXACT_C, ComplexHP, D_partial, X_sum, eisenstein_coefficient, g2_exact, g4_fit_and_predict,
    g4_series, make_kernel, stats_scan, totients, truncation_bound, u_branch, write_stats_csv,
    x_values,
)
from index7.kernels import PythonChiKernel
from index7.permgroup import CANONICAL_IDS, chi, get_group

from tables import TABLE8


def x_reference(n, c, gid="G1"):
    """X(n, c) from the word-evaluation chi, summed with mpmath."""
    g = get_group(gid)
    M = g.width * c
    with mpmath.workdps(40):
        return sum((mpmath.expjpi(mpmath.mpf(2 * n * D) / M) for D in range(1, M + 1)
                    if chi(c, D, g)), mpmath.mpc(0))


def test_precision_floor():
    with pytest.raises(ValueError):
        ComplexHP(1, 14)
    with pytest.raises(ValueError):
        X_sum(1, 5, "G1", P=10)


def test_complexhp_json():
    z = ComplexHP(mpmath.mpc(1, -2) / 3, 20)
    d = z.to_json()
    assert d["precision"] == 20
    assert d["re"].startswith("0.3333333333")
    assert complex(z) == pytest.approx(complex(1, -2) / 3)


@pytest.mark.parametrize("gid", CANONICAL_IDS)
def test_x_sum_against_reference(gid):
    for n, c in [(1, 1), (1, 7), (3, 12), (2, 30), (5, 41)]:
        ours = X_sum(n, c, gid, P=30).value
        assert abs(ours - x_reference(n, c, gid)) < 1e-25


def test_x_values_double_vs_mp():
    X = x_values("G1", [1, 2, 11], 1, 300)
    for i, n in enumerate([1, 2, 11]):
        for c in (1, 2, 17, 256, 299):
            assert abs(X[i, c - 1] - complex(X_sum(n, c, "G1").value)) < 1e-10 * c


def test_x_values_python_kernel_matches():
    a = x_values("G1", [1, 4], 200, 320)
    b = x_values("G1", [1, 4], 200, 320, kernel=make_kernel("G1", PythonChiKernel))
    assert np.max(np.abs(a - b)) < 1e-9


def test_phase_small_c():
    with mpmath.workdps(40):
        for c in range(1, 101):
            x = X_sum(1, c, "G1", P=30).value * mpmath.expjpi(-0.25)
            assert abs(mpmath.im(x)) < 1e-10


def test_conjugation_identity_random():
    rng = random.Random(3)
    for _ in range(100):
        n, c = rng.randint(1, 25), rng.randint(1, 400)
        x = X_sum(n, c, "G1", P=30).value
        with mpmath.workdps(40):
            assert abs(mpmath.conj(x) - (1, -1j, -1, 1j)[n % 4] * x) < 1e-25 * max(1, abs(x))


def test_zero_when_no_members():
    # every D with gcd(c, D) > 1 drops out; c = 2 with the G1 indicator
    k = make_kernel("G1")
    for c in range(1, 60):
        if not k.chi_row(c).any():
            assert abs(X_sum(1, c).value) == 0


def test_truncation_bound():
    assert truncation_bound(4, 100_000) == pytest.approx(2e-10, rel=1e-12)
    assert math.isinf(truncation_bound(4, 0))
    assert math.isinf(truncation_bound(2, 1000))
    for N in (10, 100, 1000):
        assert truncation_bound(4, 2 * N) <= truncation_bound(4, N)
        assert truncation_bound(6, 2 * N) <= truncation_bound(6, N)


def test_d_partial_zero_and_flags():
    p = D_partial(1, 4, 0)
    assert abs(p.value) == 0 and math.isinf(p.error_bound)
    assert p.to_json()["errorBound"] == "inf"
    assert D_partial(1, 2, 50).heuristic
    with pytest.raises(ValueError):
        eisenstein_coefficient(1, 3, 10)


def test_d_partial_matches_direct_sum():
    N = 400
    p = D_partial(3, 4, N, chunk_size=64)
    X = x_values("G1", [3], 1, N)[0]
    direct = sum(complex(X[c - 1]) / c**4 for c in range(1, N + 1))
    assert abs(complex(p.value) - direct) < 1e-12


def test_chunk_size_only_changes_rounding():
    a = D_partial(1, 4, 3000, chunk_size=100)
    b = D_partial(1, 4, 3000, chunk_size=4096)
    assert abs(a.value.value - b.value.value) < 1e-25


def test_determinism_threads():
    a = D_partial(2, 4, 5000, threads=1)
    b = D_partial(2, 4, 5000, threads=3)
    assert a.value.value == b.value.value
    assert a.to_json() == b.to_json()


def test_error_bound_validity():
    X = x_values("G1", [1, 2, 3, 4, 5], 1, 20_000)
    for i, n in enumerate(range(1, 6)):
        for N in (1000, 10_000):
            a = D_partial(n, 4, N, xvals=X[i])
            b = D_partial(n, 4, 2 * N, xvals=X[i])
            assert abs(a.value.value - b.value.value) <= a.error_bound + a.rounding_bound


def test_coefficient_phase():
    p = D_partial(1, 4, 3000)
    a = eisenstein_coefficient(1, 4, 3000, partial=p)
    rot = a.value.value * mpmath.expjpi(-0.25)
    assert abs(mpmath.im(rot)) <= a.error_bound
    assert a.to_json()["constantTerm"] == "1"


def test_u_branch():
    u = complex(u_branch("G1"))
    assert u ** 4 == pytest.approx(-1 / 7**7, rel=1e-12)
    # a1 of g2 is -168 u; the branch chosen from it makes a1/u real positive
    target = -168 * u
    v = complex(u_branch("G1", target=target))
    assert (target / v).real > 0 and abs((target / v).imag) < 1e-9
    assert abs(v + u) < 1e-12 or abs(v - u) > 1e-6
    # phase of u on the zeta8 ray: u^4 real negative
    assert abs(cmath.phase(u) - math.pi / 4) < 1e-12


def test_g2_examples():
    s = g2_exact("G1", 3)
    assert s.coeff(0) == 1 and s.coeff(1) == -168 and s.coeff(2) == -840
    assert g2_exact("H3", 1).coeff(1) == 952
    for gid in CANONICAL_IDS:
        assert g2_exact(gid, 2).coeff(0) == 1


def test_g2_v_is_conjugate():
    assert g2_exact("V1", 8) == g2_exact("U1", 8).conj()


def test_g2_table8_g1_h1():
    assert [g2_exact("G1", 10).coeff(n) for n in range(11)] == TABLE8["G1"]
    assert [g2_exact("H1", 10).coeff(n) for n in range(11)] == TABLE8["H1"]


def test_g2_phase_consistency():
    # the exact a1 = -168 u lies on the zeta8 ray, as the phase law requires
    u = complex(u_branch("G1"))
    a1 = -168 * u
    assert abs((a1 * cmath.exp(-1j * math.pi / 4)).imag) < 1e-12 * abs(a1)


def test_g4_ansatz_structure():
    alpha, beta = g4_series("G1", 5)
    assert alpha.coeff(0) == 1 and beta.coeff(0) == 0
    rep = g4_fit_and_predict("40.7303189636318364926", 1e-15, N_pred=4)
    assert rep["rows"][0]["predicted"].startswith("1")
    assert rep["fitResidual"] < 1e-25
    assert abs(float(rep["rows"][2]["predicted"]) - 303.7319312003984) < 1e-6


def test_totients():
    phi = totients(30)
    assert phi[12] == 4
    assert list(phi[1:11]) == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


def test_stats_scan_small(tmp_path):
    ds = stats_scan([1], 2000)
    summ = ds["summary"][1]
    assert all(b["count"] > 0 for b in summ["bands"].values())
    assert len(summ["bands"]) == 7
    assert summ["maxPhaseResidual"] < 1e-9
    rec = ds["records"][1]
    c = rec["c"]
    exc = np.abs(rec["re"] + 1j * rec["im"]) >= c ** (5 / 7)
    assert list(np.nonzero(exc)[0] + 1) == summ["exceptions"]
    path = tmp_path / "out.csv"
    write_stats_csv(ds, 1, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "c,c_mod_12,re,im,abs,norm27,norm12,is_exception"
    assert len(lines) == 2001
    with pytest.raises(ValueError):
        stats_scan([1], 11)


def test_exact_c_boundary():
    # the switch from P-digit terms to double terms is invisible at double accuracy
    N = EXACT_C + 50
    p = D_partial(1, 4, N)
    X = x_values("G1", [1], 1, N)[0]
    assert abs(complex(p.value) - sum(complex(X[c - 1]) / c**4 for c in range(1, N + 1))) < 1e-13
