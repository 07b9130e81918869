"""Consistency suites shared by ``locfac selfcheck`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`; nothing here raises on a failed
identity.  Grids are deterministic (fixed seeds) and scale with the profile.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    QuasiCharacter,
    beta_of_theta,
    compose_norm,
    delta_E,
    random_minimal,
)
from .cyclo import CycloNumber, legendre
from .epsilon import (
    EpsilonValue,
    GLParam,
    g0,
    g_beta,
    gauss_sum,
    gl_epsilon,
    lambda_tame,
    tate_epsilon,
)
from .langlands import (
    MonomialParam,
    PairInput,
    base_change,
    identity_32,
    mackey_restrict,
    pair_epsilon,
    phi_forward,
    remark_36,
    same_param,
)
from .localfield import InstanceTooLarge, extend_eisenstein, extend_unramified, make_base, norm, relative_degrees

BRANCHES = ("level-one", "even", "odd-tame", "odd-wild", "odd-twist")


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    cases: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def check(self, ok: bool, label) -> None:
        self.cases += 1
        if not ok:
            self.passed = False
            self.failures.append(label)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures, {self.seconds:.1f}s"

    def to_json(self) -> dict:
        return {
            "name": self.name, "passed": self.passed, "cases": self.cases,
            "failures": [str(f) for f in self.failures], "details": self.details,
            "seconds": round(self.seconds, 1),
        }


@dataclass
class Profile:
    name: str
    primes: tuple
    conductors: tuple
    guard: int  # largest brute-force Tate sum


PROFILES = {
    "acceptance": Profile("acceptance", (5, 7), (2, 3, 5), 20000),
    "small": Profile("small", (5, 7), (2, 3, 4), 20000),
    "full": Profile("full", (5, 7, 11, 13), (2, 3, 4, 5, 6), 200000),
}


class Coverage:
    """Counts the branches of the GL epsilon formula that were exercised."""

    def __init__(self):
        self.counts = {b: 0 for b in BRANCHES}
        self.calls: list = []

    def record(self, trace: list, param: GLParam, eps: EpsilonValue) -> None:
        for rec in trace:
            self.counts[rec["branch"]] = self.counts.get(rec["branch"], 0) + 1
        self.calls.append((param, eps))


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _tate_size(E, a: int) -> int:
    return (E.q - 1) * E.q ** max(a - 1, 0)


def _tower(F):
    p = F.p
    return {
        "unr2": extend_unramified(F, 2, "U2"),
        "unr3": extend_unramified(F, 3, "U3"),
        "ram2": extend_eisenstein(F, f"x^2-{p}", "R2"),
        "ram3": extend_eisenstein(F, f"x^3-{p}", "R3"),
    }


# ---------------------------------------------------------------------------
# 1. closed forms of lambda

def expected_lambda(q: int, l: int, ramified: bool):
    """Closed forms; for a ramified quadratic step only lambda^2 is prescribed."""
    if not ramified:
        return (-1) ** (l - 1)
    if l != 2:
        return legendre(q, l)
    return (-1) ** ((q - 1) // 2)


@_timed
def suite_lambda(profile: Profile | None = None, expected=expected_lambda) -> SuiteResult:
    res = SuiteResult("lambda closed forms")
    for p in (3, 5, 7, 11, 13):
        for f in (1, 2):
            F = make_base(p, f, 6)
            for l in (2, 3, 5):
                if l == p:
                    continue
                E = extend_unramified(F, l)
                res.check(lambda_tame(E, F) == expected(F.q, l, False), (p, f, l, "unr"))
                E = extend_eisenstein(F, f"x^{l}-{p}")
                lam = lambda_tame(E, F)
                if l == 2:
                    res.check(lam * lam == expected(F.q, l, True), (p, f, l, "ram"))
                    res.check(lam * lam.conj() == 1, (p, f, l, "ram-unimodular"))
                else:
                    res.check(lam == expected(F.q, l, True), (p, f, l, "ram"))
    return res


# ---------------------------------------------------------------------------
# 2. Gauss sum magnitudes

def _small_fields():
    out = []
    for p in (3, 5, 7):
        F = make_base(p, 1, 10)
        out.append(F)
        if p != 3:
            out.append(extend_eisenstein(F, f"x^2-{p}"))
    F3 = make_base(3, 1, 10)
    out.append(extend_unramified(F3, 2))
    out.append(extend_eisenstein(F3, "x^2-3"))
    return out


@_timed
def suite_gauss(profile: Profile | None = None) -> SuiteResult:
    res = SuiteResult("gauss sum magnitudes")
    rng = random.Random(2)
    for E in _small_fields():
        for a in (1, 3, 5):
            for _ in range(2):
                theta = QuasiCharacter.random(E, a, rng)
                G = gauss_sum(theta)
                res.check(G * G.conj() == 1, (E.name, a))
    F3 = make_base(3, 1, 16)
    W = extend_eisenstein(F3, "x^3-3")
    for k in (2, 4, 8):
        beta = W.pi_power(-k)
        G = g_beta(beta, F3)
        res.check(G * G.conj() == 1, ("g_beta", k))
    for p in (3, 5, 7, 11, 13):
        G = g0(p)
        res.check(G * G.conj() == 1, ("g0", p))
        res.check(G * G == (-1) ** ((p - 1) // 2), ("g0^2", p))
    return res


# ---------------------------------------------------------------------------
# 3. Tate epsilon calibration

@_timed
def suite_calibration(profile: Profile | None = None) -> SuiteResult:
    res = SuiteResult("tate epsilon calibration")
    rng = random.Random(3)
    for E in _small_fields():
        for a in (2, 4):
            for _ in range(2):
                theta = QuasiCharacter.random(E, a, rng)
                brute = tate_epsilon(theta)
                beta = beta_of_theta(theta)
                psi_ang = E.psi_angle(beta)
                ang, half = theta.angle_half(beta)
                closed = CycloNumber.root_of_unity(psi_ang - ang)  # unitary: half == 0
                expected = EpsilonValue(closed, Fraction(-beta.valuation()), E.q)
                res.check(brute == expected, (E.name, a))
    return res


# ---------------------------------------------------------------------------
# 4. epsilon preservation of the correspondence

def _twisted_conductor(param: GLParam) -> int:
    """f(chi * pi) from the brute-force conductor of chi_E theta."""
    if param.is_wild:
        n = param.n_chi()
    else:
        n = (compose_norm(param.chi, param.E) * param.theta).conductor
    if param.level1 and n <= 1:
        return param.degree * n
    return param.f * (n - 1) + param.degree


def _level_one_instances(F, rng):
    E = extend_unramified(F, 2, "U2")
    out = []
    for _ in range(2):
        while True:
            theta = QuasiCharacter.random(E, 1, rng)
            # regular: not fixed by Frobenius
            if theta.images[0] * F.q % 1 != theta.images[0]:
                break
        out.append((E, theta))
    return out


@_timed
def suite_phi_epsilon(profile: Profile | None = None, coverage: Coverage | None = None,
                      variant: str = "corrected") -> SuiteResult:
    profile = profile or PROFILES["acceptance"]
    res = SuiteResult("epsilon preservation of the correspondence")
    rng = random.Random(4)
    paper_failures = []
    for p in profile.primes:
        F = make_base(p, 1, 16)
        for name, E in _tower(F).items():
            l = relative_degrees(E, F)[0] * relative_degrees(E, F)[1]
            lam = lambda_tame(E, F)
            for a in profile.conductors:
                if a % l == 1:
                    continue
                for ca in (0, 1, 2, 3):
                    e = relative_degrees(E, F)[0]
                    a_xi = max(a, e * (ca - 1) + 1) if ca else a
                    if _tate_size(E, a_xi) > profile.guard:
                        continue
                    xi = random_minimal(E, F, a, rng)
                    chi = QuasiCharacter.random(F, ca, rng) if ca else QuasiCharacter.trivial(F)
                    g = phi_forward(MonomialParam(E, F, xi, chi))
                    trace: list = []
                    gl = gl_epsilon(g, trace=trace, variant=variant)
                    gal = tate_epsilon(compose_norm(chi, E) * xi) * lam
                    res.check(gl == gal, (p, name, a, ca))
                    if coverage is not None:
                        coverage.record(trace, g, gl)
                    if variant == "corrected":
                        try:
                            if gl_epsilon(g, variant="paper") != gal:
                                paper_failures.append(f"{p} {name} a={a} a(chi)={ca}")
                        except ValueError as exc:
                            paper_failures.append(f"{p} {name} a={a} a(chi)={ca}: {exc}")
        for E, theta in _level_one_instances(F, rng):
            g = GLParam(E, F, theta, None, None, level1=True)
            trace = []
            gl = gl_epsilon(g, trace=trace, variant=variant)
            xi = theta * delta_E(E, F)
            gal = tate_epsilon(xi) * lambda_tame(E, F)
            res.check(gl == gal, (p, "level-one"))
            if coverage is not None:
                coverage.record(trace, g, gl)
    res.details["literal_formula_failures"] = paper_failures
    return res


# ---------------------------------------------------------------------------
# 5. two routes for the epsilon factor of pairs

def _pair_instances(p: int, rng, profile: Profile):
    F = make_base(p, 1, 16)
    T = _tower(F)
    out = []
    for n1 in ("unr2", "ram2"):
        for n2 in ("unr3", "ram3"):
            E1, E2 = T[n1], T[n2]
            for a2 in (2, 3):
                if E2.q ** (a2 - 1) * E1.q > profile.guard * 20:
                    continue
                chi1 = QuasiCharacter.random(F, rng.choice((0, 1, 2)), rng)
                chi2 = QuasiCharacter.random(F, rng.choice((0, 1)), rng)
                m1 = MonomialParam(E1, F, random_minimal(E1, F, 2, rng), chi1)
                m2 = MonomialParam(E2, F, random_minimal(E2, F, a2, rng), chi2)
                out.append((f"{p} {n1}x{n2} a2={a2}", m1, m2))
    return out


@_timed
def suite_pairs(profile: Profile | None = None, coverage: Coverage | None = None) -> SuiteResult:
    profile = profile or PROFILES["acceptance"]
    res = SuiteResult("two-route epsilon of pairs")
    rng = random.Random(5)
    w_one_ok = []
    skipped = []
    for p in profile.primes[:2]:
        for label, m1, m2 in _pair_instances(p, rng, profile):
            calls2: list = []
            calls1: list = []
            try:
                via_e2 = pair_epsilon(PairInput(phi_forward(m1), m2), calls=calls2)
                via_e1 = pair_epsilon(PairInput(phi_forward(m2), m1), calls=calls1)
            except InstanceTooLarge:
                skipped.append(label)
                continue
            res.check(via_e2 == via_e1, label)
            alt2 = pair_epsilon(PairInput(phi_forward(m1), m2), w=1)
            alt1 = pair_epsilon(PairInput(phi_forward(m2), m1), w=1)
            w_one_ok.append(alt2 == alt1)
            if coverage is not None:
                for param, eps, trace in calls2 + calls1:
                    coverage.record(trace, param, eps)
    res.details["skipped (guard limit)"] = skipped
    res.details["w=l agrees"] = res.passed
    res.details["w=1 agrees in"] = f"{sum(w_one_ok)} of {len(w_one_ok)}"
    res.details["w=1 agrees everywhere"] = all(w_one_ok)
    return res


# ---------------------------------------------------------------------------
# 6. conductor and s-exponent

@_timed
def suite_conductors(coverage: Coverage) -> SuiteResult:
    res = SuiteResult("conductor and s-exponent coherence")
    signs = set()
    for param, eps in coverage.calls:
        f_pi = _twisted_conductor(param)
        k = eps.s_exponent
        res.check(abs(k) == f_pi - param.degree, (param.E.name, param.n, f_pi, str(k)))
        if k:
            signs.add(k > 0)
    res.check(len(signs) <= 1, "sign")
    res.details["sign"] = "nonnegative" if signs <= {True} else "mixed"
    return res


# ---------------------------------------------------------------------------
# 7 and 8. character identities

@_timed
def suite_identity_32(profile: Profile | None = None) -> SuiteResult:
    res = SuiteResult("character identity for lifted rectifiers")
    rng = random.Random(7)
    for p in (5, 7):
        F = make_base(p, 1, 12)
        T = _tower(F)
        for en in ("unr2", "ram2", "unr3", "ram3"):
            E = T[en]
            for kn, K in T.items():
                if math.gcd(K.n, E.n) != 1:
                    continue
                beta = beta_of_theta(random_minimal(E, F, 2, rng))
                for n in (1, 2, 3):
                    rows = identity_32(E, K, F, beta, n)
                    res.check(all(r["ok"] for r in rows), (p, en, kn, n))
    return res


@_timed
def suite_remark_36(profile: Profile | None = None) -> SuiteResult:
    res = SuiteResult("Delta_K o N = delta_K")
    for p in (7, 11):
        F = make_base(p, 1, 8)
        for d in (3, 5):
            for K in (extend_unramified(F, d), extend_eisenstein(F, f"x^{d}-{p}")):
                res.check(remark_36(K, F), (p, d, K.e))
    return res


# ---------------------------------------------------------------------------
# 9. wild base change

@_timed
def suite_wild(profile: Profile | None = None, coverage: Coverage | None = None) -> SuiteResult:
    from .characters import Delta_K

    res = SuiteResult("wild base change epsilon relation")
    F = make_base(3, 1, 20)
    E = extend_eisenstein(F, "x^3-3", "W")
    K = extend_unramified(F, 2, "K2")
    beta = E.uniformizer.inverse()
    lamK = lambda_tame(K, F)
    for tame in (0, Fraction(1, 2)):
        for pa in (0, Fraction(1, 4), Fraction(1, 3), Fraction(5, 6)):
            theta = QuasiCharacter(E, 1, [tame], pa)
            g = GLParam(E, F, theta, beta)
            lift = base_change(g, K)
            tr: list = []
            e1 = gl_epsilon(g, trace=tr)
            e2 = gl_epsilon(lift, trace=tr)
            lhs = e2 * lamK**3
            rhs = e1**2 * Delta_K(K, F)(norm(beta, F))
            res.check(lhs == rhs, (str(tame), str(pa)))
            if coverage is not None:
                coverage.record(tr[:1], g, e1)
    # odd level: the G(beta) branch, unimodular constant
    beta3 = E.pi_power(-2)
    g = GLParam(E, F, QuasiCharacter(E, 1, [Fraction(1, 2)], 0), beta3)
    tr = []
    e3 = gl_epsilon(g, trace=tr)
    res.check(e3.constant * e3.constant.conj() == 1, "odd-wild unimodular")
    if coverage is not None:
        coverage.record(tr, g, e3)
    return res


# ---------------------------------------------------------------------------
# 10. compatibility square

@_timed
def suite_square(profile: Profile | None = None) -> SuiteResult:
    res = SuiteResult("restriction/lift compatibility square")
    rng = random.Random(10)
    for p in (5, 7):
        F = make_base(p, 1, 12)
        T = _tower(F)
        for en, E in T.items():
            for kn, K in T.items():
                if math.gcd(K.n, E.n) != 1:
                    continue
                xi = random_minimal(E, F, 2, rng)
                chi = QuasiCharacter.random(F, 1, rng)
                m = MonomialParam(E, F, xi, chi)
                left = phi_forward(mackey_restrict(m, K))
                right = base_change(phi_forward(m), K)
                res.check(same_param(left, right), (p, en, kn))
    return res


# ---------------------------------------------------------------------------

def corrupted_lambda(q: int, l: int, ramified: bool):
    """A deliberately wrong lambda table, for fault injection."""
    return -expected_lambda(q, l, ramified)


FAULTS = {"lambda": corrupted_lambda}


def run_all(profile_name: str = "small", faults: tuple = ()) -> tuple[list[SuiteResult], Coverage]:
    unknown = set(faults) - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown faults {sorted(unknown)}")
    profile = PROFILES[profile_name]
    cov = Coverage()
    results = [
        suite_lambda(profile, FAULTS["lambda"] if "lambda" in faults else expected_lambda),
        suite_gauss(profile),
        suite_calibration(profile),
        suite_phi_epsilon(profile, cov),
        suite_pairs(profile, cov),
    ]
    results.append(suite_conductors(cov))
    results += [
        suite_identity_32(profile),
        suite_remark_36(profile),
        suite_wild(profile, cov),
        suite_square(profile),
    ]
    return results, cov
