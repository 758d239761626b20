import math

import numpy as np
import pytest

from kacdisc import limits
from kacdisc.limits import (EULER_GAMMA, ConstantTable, S_of_t, T_n, c_star,
                            covariance_suite, d_star, gaussian_log_moment,
                            integral_phi, kac_rice_exact_mean,
                            kac_rice_quadrature, normalization_identity_check,
                            phi, psi_limit, s_n_suite)

# High-precision reference values computed offline at 50 digits.
PHI_AT_1 = -0.586683122369085896202176737069
PHI_AT_HALF = -0.509772109757266363129502644526
PHI_AT_50 = -0.00497168647873775339410939379408
PSI_AT_1 = -0.235010357586276032626190141345
INTEGRAL_PHI = -3.877234408309957674241313
D_STAR = 7.197507978873747499998907
C_STAR = -3.454450073211490534847825


# ------------------------------------------------------------------ phi

def test_phi_limit_at_zero():
    assert abs(phi(1e-8) - (-math.log(3) / 3)) < 1e-6
    assert phi(0.0) == -math.log(3) / 3


def test_phi_golden_values():
    assert abs(phi(1.0) - PHI_AT_1) < 1e-14
    assert abs(phi(0.5) - PHI_AT_HALF) < 1e-14
    assert abs(phi(50.0) - PHI_AT_50) < 1e-15


def test_phi_domain():
    with pytest.raises(ValueError):
        phi(-0.1)


def test_route_continuity_at_switch_points():
    # series vs exponential form at t = 0.01; exponential vs asymptotic at 30
    t = limits.SMALL_T
    series = limits._polyval(limits._PREFACTOR_SERIES, t) * \
        limits._polyval(limits._LOG_S_SERIES, t)
    q = math.exp(-2 * t)
    direct = (1 / t ** 2 - 4 * q / (1 - q) ** 2) * math.log(
        ((1 - q) ** 2 - 4 * t * t * q) / (2 * t ** 3 * (1 - q)))
    assert abs(series - direct) <= 1e-10
    t = limits.LARGE_T
    q = math.exp(-2 * t)
    direct = (1 / t ** 2 - 4 * q / (1 - q) ** 2) * math.log(
        ((1 - q) ** 2 - 4 * t * t * q) / (2 * t ** 3 * (1 - q)))
    asym = (1 / t ** 2 - 4 * q / (1 - q) ** 2) * (
        -math.log(2 * t ** 3) - (4 * t * t + 1) * q)
    assert abs(asym - direct) <= 1e-10
    # same continuity for the other two maps
    for fn in (S_of_t, psi_limit):
        lo, hi = fn(limits.SMALL_T * (1 - 1e-9)), fn(limits.SMALL_T * (1 + 1e-9))
        assert abs(lo - hi) <= 1e-10


# ------------------------------------------------------------------ S, psi

def test_S_small_t_limit():
    assert S_of_t(0.0) == pytest.approx(1 / 3, abs=0)
    assert abs(S_of_t(1e-9) - 1 / 3) < 1e-9


def test_S_large_t_normalization():
    assert abs(S_of_t(30.0) * 2 * 30.0 ** 3 - 1.0) <= 1e-6


def test_psi_phi_affine_identity():
    for t in (0.1, 1.0, 10.0):
        p = limits._prefactor(t)
        assert abs(2 * psi_limit(t) - (1 - EULER_GAMMA) * p - phi(t)) <= 1e-12


def test_psi_golden():
    assert abs(psi_limit(1.0) - PSI_AT_1) < 1e-14


# -------------------------------------------------------------- constants

def test_integral_phi_golden():
    assert abs(integral_phi(1e-10) - INTEGRAL_PHI) < 1e-9


def test_constant_identities():
    ip = integral_phi()
    assert c_star() == pytest.approx(1 - EULER_GAMMA + ip, abs=1e-15)
    assert d_star() == pytest.approx(
        EULER_GAMMA / 2 - 2 * (1 - EULER_GAMMA) - 2 * ip, abs=1e-15)
    # the two displays agree: -gamma/2 + 2 c* = -d*
    assert abs(-EULER_GAMMA / 2 + 2 * c_star() - (-d_star())) <= 1e-12
    assert d_star() > 0


def test_constant_table():
    tbl = ConstantTable.compute(1e-10)
    assert abs(tbl.d_star - D_STAR) < 1e-9
    assert abs(tbl.c_star - C_STAR) < 1e-9
    assert tbl.gamma == EULER_GAMMA
    assert tbl.method["series_below"] == 0.01


def test_integral_phi_tol_guard():
    with pytest.raises(ValueError):
        integral_phi(1e-13)


# ------------------------------------------------------ prefactor integral

def test_normalization_identity():
    assert abs(normalization_identity_check(1e-8) - 1.0) <= 1e-8


def test_partial_prefactor_integral():
    from scipy.integrate import quad
    for T in (0.5, 2.0, 5.0):
        got, _ = quad(limits._prefactor, 0.0, T, epsabs=1e-12)
        expect = 1.0 / math.tanh(T) - 1.0 / T
        assert abs(got - expect) <= 1e-9


def test_prefactor_monotone_bound():
    p = limits._prefactor(0.5)
    assert 0 < p < (1 / 3) * 1.01


# --------------------------------------------------------------- s_n suite

def test_s_n_at_zero():
    pt = s_n_suite(10, 0.0)
    assert pt.s0 == pytest.approx(11 / 10, abs=1e-15)
    assert pt.s_tilde >= 0


def test_s_n_limit_cross_check():
    # closed-form limit (1-e^{-2t})/(2t) at t=2
    pt = s_n_suite(10 ** 6, 2.0)
    assert abs(pt.s0 - (1 - math.exp(-4)) / 4) <= 1e-5


def test_s_n_domain_guards():
    with pytest.raises(ValueError):
        s_n_suite(1, 0.5)
    with pytest.raises(ValueError):
        s_n_suite(100, math.log(100) ** 4 + 1)
    with pytest.raises(ValueError):
        s_n_suite(100, -0.5)


def test_s_tilde_nonnegative_and_psi_finite():
    for n in (10, 100, 1000):
        for t in np.linspace(0.0, math.log(n) ** 2, 25):
            pt = s_n_suite(n, float(t))
            assert pt.s_tilde >= 0
            assert math.isfinite(pt.psi_n)


def test_psi_n_converges_to_psi():
    ts = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
    err4 = max(abs(s_n_suite(10 ** 4, t).psi_n - psi_limit(t)) for t in ts)
    assert err4 < 0.01


# ------------------------------------------------------------ log moments

def test_gaussian_log_moment_values():
    assert abs(gaussian_log_moment(1.0) - (1 - EULER_GAMMA) / 2) < 1e-15
    s0 = math.exp(EULER_GAMMA - 1.0)
    assert abs(gaussian_log_moment(s0)) < 1e-16
    with pytest.raises(ValueError):
        gaussian_log_moment(0.0)


def test_gaussian_log_moment_monte_carlo():
    rng = np.random.default_rng(6)
    s = 2.0
    z = (rng.standard_normal(10 ** 6) + 1j * rng.standard_normal(10 ** 6)) \
        * math.sqrt(s / 2)
    samples = np.abs(z) ** 2 * np.log(np.abs(z))
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    assert abs(samples.mean() - gaussian_log_moment(s)) <= 4 * se


# ------------------------------------------------------------- covariance

def test_covariance_limits():
    s0, s1, s2, det = covariance_suite(0.0)
    assert (s0, s1, s2) == (1.0, 0.5, 1 / 3)
    assert det == pytest.approx(1 / 12, abs=1e-15)


def test_covariance_identity_and_positivity():
    for b in np.concatenate([np.linspace(0.5, 30, 40),
                             [0.0, 1e-4, 0.02, math.log(10 ** 6) ** 3]]):
        s0, s1, s2, det = covariance_suite(float(b))
        assert det > 0
        assert abs(det - (s0 * s2 - s1 * s1)) <= 1e-12
        if b >= 0.5:
            q = math.exp(-b)
            displayed = (1 + math.exp(-2 * b) - 2 * q - b * b * q) / b ** 4
            assert abs(det - displayed) <= 1e-12


def test_covariance_route_continuity():
    lo = covariance_suite(0.01 * (1 - 1e-9))
    hi = covariance_suite(0.01 * (1 + 1e-9))
    assert max(abs(a - b) for a, b in zip(lo, hi)) < 1e-10


# ------------------------------------------------------------------- T_n

def test_T_n():
    with pytest.raises(ValueError):
        T_n(10)
    n = 10 ** 6
    assert abs(T_n(n) / math.log(n) ** 3 - 1.0) < 0.01
    for n in (6000, 10 ** 4, 10 ** 6):
        assert T_n(n) > math.log(n) ** 3


# ------------------------------------------------------- Kac-Rice integrals

def test_psi_integral_identity():
    # 2 int_0^inf Psi = (1 - gamma) + int_0^inf Phi, since the prefactor
    # integrates to exactly 1
    from scipy.integrate import quad
    head, _ = quad(psi_limit, 0.0, 0.01, epsabs=1e-13)
    main, _ = quad(psi_limit, 0.01, 100.0, epsabs=1e-11, limit=300)
    # tail: Psi ~ (1/t^2)(log S + 1-gamma)/2 with log S ~ -log(2t^3)
    g = EULER_GAMMA
    T = 100.0
    tail = ((1 - g - math.log(2)) / T - 3 * (math.log(T) + 1) / T) / 2
    total = 2 * (head + main + tail)
    assert abs(total - c_star()) <= 1e-6


def test_psi_n_integral_converges_monotonically():
    # int_0^{T_n} psi_n dt approaches int_0^inf Psi with decreasing error
    from scipy.integrate import quad
    target = c_star() / 2.0
    errs = []
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        val, _ = quad(lambda t: s_n_suite(n, t).psi_n, 0.0, T_n(n), limit=300)
        errs.append(abs(val - target))
    assert errs[0] > errs[1] > errs[2]


def test_kac_rice_quadratures_run():
    q = kac_rice_quadrature(256)
    e = kac_rice_exact_mean(256)
    assert math.isfinite(q) and math.isfinite(e)
    # the two targets differ structurally (conditional variance off by 4)
    assert q < e < 0


def test_kac_rice_exact_mean_matches_monte_carlo():
    # independent check of the conditional-moment route at small n
    from kacdisc.discriminant import log_abs_discriminant  # noqa: F401
    from kacdisc.polynomials import (GAUSSIAN_COMPLEX, CoefficientDistribution,
                                     sample_kac)
    from kacdisc.polynomials import log_abs_deriv
    from kacdisc.rootfind import canonical_annulus, find_roots
    n, trials = 128, 300
    dist = CoefficientDistribution(GAUSSIAN_COMPLEX)
    lo, hi = canonical_annulus(n)
    vals = []
    for t in range(trials):
        p = sample_kac(dist, n, 4242, t)
        rs = find_roots(p)
        mod = np.abs(rs.roots)
        sel = (mod >= lo) & (mod <= hi)
        vals.append(float(np.sum(log_abs_deriv(p, rs.roots[sel])
                                 - 1.5 * math.log(n))) / n)
    vals = np.array(vals)
    se = vals.std(ddof=1) / math.sqrt(trials)
    assert abs(vals.mean() - kac_rice_exact_mean(n)) <= 4 * se
