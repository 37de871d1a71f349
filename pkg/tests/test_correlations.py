import math

import pytest

from isingcorr.correlations import (
    CorrelationResult,
    critical_nextdiag,
    cross_validate,
    diag_corr,
    dual_corr,
    exchange_corr,
    nextdiag_corr,
    nextdiag_elliptic,
    nextdiag_isotropic_limit,
)
from isingcorr.errors import DomainError, IsingCorrError, NearSingularError
from isingcorr.painleve import critical_diag
from isingcorr.specfun import ellip_E
from isingcorr.weight import dual_params, exchange_params, make_params_sk, moment_b


def test_diag_examples():
    assert diag_corr(1, 2.0).value == pytest.approx(2 / math.pi * ellip_E(0.5), rel=1e-14)
    assert diag_corr(2, 1.0).value == pytest.approx(16 / (3 * math.pi**2), rel=1e-14)
    assert diag_corr(5, 100.0).value == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("k", [0.3, 0.8, 1.0, 1.5, 4.0])
@pytest.mark.parametrize("N", [1, 4, 9])
def test_diag_methods_agree(k, N):
    rec = diag_corr(N, k, "recurrence")
    det = diag_corr(N, k, "determinant")
    assert rec.value == pytest.approx(det.value, rel=1e-10)
    assert 0 < rec.value <= 1
    assert rec.method == "recurrence" and det.method == "determinant"


def test_diag_low_temperature_trend():
    vals = [diag_corr(3, k).value for k in (1.5, 3.0, 10.0, 100.0)]
    assert vals == sorted(vals)


def test_diag_critical_closed_form():
    for N in (1, 3, 6):
        assert diag_corr(N, 1.0, "critical-closed-form").value == pytest.approx(critical_diag(N), rel=1e-14)
    with pytest.raises(DomainError):
        diag_corr(2, 2.0, "critical-closed-form")


def test_result_rejects_nonfinite():
    with pytest.raises(IsingCorrError):
        CorrelationResult(float("nan"), 1, None, "recurrence")


def test_nextdiag_examples():
    p = make_params_sk(2.0, 1.0)
    v = nextdiag_corr(1, p).value
    assert v == pytest.approx(moment_b(0, p), rel=1e-12)
    assert v == pytest.approx(nextdiag_elliptic(1, p), rel=1e-12)
    assert nextdiag_corr(1, make_params_sk(1.0, 1.0)).value == pytest.approx(math.sqrt(2) / 2, abs=1e-8)
    q = make_params_sk(1.0, 0.5)
    vals = [nextdiag_corr(2, q, m).value for m in ("epsilon-recurrence", "determinant", "elliptic")]
    assert max(vals) - min(vals) < 1e-8 * max(abs(v) for v in vals)


@pytest.mark.parametrize("S, Sb", [(2.0, 1.0), (1.0, 2.0), (0.5, 1.0), (3.0, 0.5)])
def test_elliptic_phase_vs_landen(S, Sb):
    p = make_params_sk(S, Sb)
    for N in (1, 2):
        assert nextdiag_elliptic(N, p, "phase") == pytest.approx(nextdiag_elliptic(N, p, "landen"), rel=1e-11)


def test_elliptic_only_low_orders():
    with pytest.raises(DomainError):
        nextdiag_elliptic(3, make_params_sk(2.0, 1.0))


def test_isotropic_limit_examples():
    res = nextdiag_isotropic_limit(1, make_params_sk(1.0, 1.0))
    assert res.value == pytest.approx(math.sqrt(2) / 2, abs=1e-8)
    assert res.diagnostics.est_error < 1e-6
    p = make_params_sk(math.sqrt(2), math.sqrt(2))
    res = nextdiag_isotropic_limit(1, p)
    assert res.value == pytest.approx(nextdiag_elliptic(1, p, "landen"), abs=1e-7)


def test_isotropic_limit_delta_halving():
    p = make_params_sk(1.2, 1.2)
    vals = [nextdiag_isotropic_limit(2, p, delta=d).value for d in (0.04, 0.02, 0.01)]
    assert abs(vals[2] - vals[1]) <= abs(vals[1] - vals[0]) + 1e-12


def test_isotropic_dispatch():
    p = make_params_sk(0.8, 0.8)
    assert nextdiag_corr(2, p, "determinant").value == pytest.approx(nextdiag_corr(2, p).value, abs=1e-8)
    with pytest.raises(NearSingularError):
        nextdiag_corr(2, p, "determinant", isotropic="error")


def test_critical_nextdiag_examples():
    assert critical_nextdiag(1, 1.0) == pytest.approx(math.sqrt(2) / 2, rel=1e-14)
    for N in (1, 3):
        assert critical_nextdiag(N, 1e-6) == pytest.approx(critical_diag(N), rel=1e-10)


@pytest.mark.parametrize("S", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("N", [1, 2, 4])
def test_critical_nextdiag_vs_routes(S, N):
    closed = critical_nextdiag(N, S)
    p = make_params_sk(S, 1 / S)
    assert nextdiag_corr(N, p).value == pytest.approx(closed, rel=1e-9)
    if S != 1.0:
        assert nextdiag_corr(N, p, "determinant").value == pytest.approx(closed, rel=1e-9)
    # off-critical epsilon route on both sides; the mean cancels the
    # leading (k-1) log|k-1| correction
    if S != 1.0:
        sides = [nextdiag_corr(N, make_params_sk(S, k / S), critical_band=0.0).value for k in (1 - 1e-6, 1 + 1e-6)]
        assert sides[0] < closed < sides[1]
        assert 0.5 * (sides[0] + sides[1]) == pytest.approx(closed, rel=1e-9)


def test_dual_diagonal():
    p = make_params_sk(2.0, 1.0)
    d = dual_corr("diagonal", 3, p)
    assert d.value == pytest.approx(diag_corr(3, 0.5).value, rel=1e-14)
    assert dual_corr("diagonal", 3, dual_params(p)).value == diag_corr(3, p.k).value


@pytest.mark.parametrize("S, Sb", [(2.0, 1.0), (0.5, 1.0)])
def test_dual_nextdiag_routes(S, Sb):
    p = make_params_sk(S, Sb)
    for N in range(1, 5):
        mapped = dual_corr("next-diagonal", N, p, route="mapped").value
        det = dual_corr("next-diagonal", N, p, route="determinant").value
        assert mapped == pytest.approx(det, rel=1e-8)


def test_exchange():
    iso = make_params_sk(1.3, 1.3)
    assert exchange_corr(2, iso).value == nextdiag_corr(2, iso).value
    p = make_params_sk(2.0, 1.0)
    a = nextdiag_corr(2, p).value
    b = exchange_corr(2, p).value
    assert math.isfinite(b) and abs(a - b) > 1e-6
    assert exchange_corr(2, exchange_params(p)).value == a


def test_cross_validate_clean():
    rep = cross_validate(8, make_params_sk(1.0, 0.5), tol=1e-8)
    assert rep.passed and rep.horizon == 8
    assert max(rep.deviations.values()) < 1e-8


def test_cross_validate_perturbed():
    rep = cross_validate(3, make_params_sk(1.0, 0.5), perturb=1e-3)
    assert not rep.passed and rep.failures


def test_cross_validate_near_critical():
    rep = cross_validate(4, make_params_sk(1.0, 0.98), tol=1e-8)
    used = [r.diagnostics.M_used for row in rep.rows for r in row["results"].values() if r.diagnostics.M_used]
    assert used and max(used) >= 1024


def test_cross_validate_isotropic_rows():
    rep = cross_validate(2, make_params_sk(0.9, 0.9), tol=1e-6)
    assert rep.passed
    notes = [r.diagnostics.note for row in rep.rows for k, r in row["results"].items() if k == "next-diagonal/determinant"]
    assert notes and all("isotropic limit" in n for n in notes)
