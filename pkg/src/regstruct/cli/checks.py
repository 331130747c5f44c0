"""Invariant suites behind the `check` subcommand.

Each suite is a list of (name, callable) pairs; a check returns a detail
string and raises AssertionError on failure so the command can keep going
and report every failure at once.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..algebra import (
    Combo,
    Hopf,
    Scaling,
    generate_structure,
    gpam_renorm_map,
    gpam_spec,
    group_compose,
    phi4_renorm_map,
    phi4_spec,
)
from ..algebra.terms import p_j, p_mul
from ..gaussian import (
    GpamChaosSampler,
    Mollifier,
    c_eps_pam,
    chaos_variance_mc,
)
from ..kernels import decompose_homogeneous, pam_green_kernel

__all__ = ["CheckOutcome", "run_suite", "SUITES"]


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    detail: str


def _gpam():
    spec = gpam_spec()
    return generate_structure(spec), Hopf(spec)


def _check_counit():
    structure, hopf = _gpam()
    for tau in structure.basis:
        out = Combo()
        for (a, s), c in hopf.delta(tau).items():
            if s.is_unit:
                out.add(a, c)
        assert out == Combo.of(tau), tau
    return f"{len(structure.basis)} symbols, exact"


def _check_coassociativity():
    structure, hopf = _gpam()
    rng = random.Random(0)
    sample = rng.sample(list(structure.basis), 60)
    for tau in sample:
        lhs = Combo()
        rhs = Combo()
        for (a, s), c in hopf.delta(tau).items():
            for (s1, s2), c2 in hopf.delta_plus(s).items():
                lhs.add((a, s1, s2), c * c2)
            for (a1, s1), c2 in hopf.delta(a).items():
                rhs.add((a1, s1, s), c * c2)
        assert lhs == rhs, tau
    return "60 sampled symbols, exact"


def _check_antipode():
    structure, hopf = _gpam()
    d = structure.spec.dim
    rng = random.Random(1)
    sample = rng.sample(list(structure.plus_generators), 25)
    for k, tau in sample:
        sigma = p_j(k, tau, d)
        out = Combo()
        for (s1, s2), c in hopf.delta_plus(sigma).items():
            for a, c1 in hopf.antipode(s1).items():
                out.add(p_mul(a, s2), c * c1)
        assert not out, sigma  # counit of a non-unit generator vanishes
    return "25 sampled generators, exact"


def _check_group_law():
    structure, hopf = _gpam()
    m1 = gpam_renorm_map(Fraction(1, 3), [[1, 0], [0, 2]], structure, hopf)
    m2 = gpam_renorm_map(Fraction(2), [[0, 1], [1, 0]], structure, hopf)
    m12 = group_compose(m1, m2)
    msum = gpam_renorm_map(Fraction(7, 3), [[1, 1], [1, 2]], structure, hopf)
    for tau in m12.f0:
        assert m12.apply(tau) == msum.apply(tau), tau
    p_structure = generate_structure(phi4_spec())
    p_hopf = Hopf(p_structure.spec)
    p1 = phi4_renorm_map(Fraction(1), Fraction(-1), p_structure, p_hopf)
    p2 = phi4_renorm_map(Fraction(1, 2), Fraction(2), p_structure, p_hopf)
    p12 = group_compose(p1, p2)
    psum = phi4_renorm_map(Fraction(3, 2), Fraction(1), p_structure, p_hopf)
    for tau in p12.f0:
        assert p12.apply(tau) == psum.apply(tau), tau
    return "additive closed forms, exact"


def _check_kernel_moments():
    dec = decompose_homogeneous(pam_green_kernel(), r=2)
    worst = dec.moment_check()
    assert worst <= 1e-8, worst
    return f"max scaled moment {worst:.2e}"


def _check_reassembly():
    dec = decompose_homogeneous(pam_green_kernel(), r=2)
    K = pam_green_kernel()
    rng = np.random.default_rng(3)
    angles = rng.uniform(0, 2 * math.pi, 400)
    radii = 2.0 ** rng.uniform(-10, 0, 400)
    pts = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)
    exact = K(pts)
    err = np.abs(dec.reassemble(pts) - exact).max() / np.abs(exact).max()
    assert err <= 1e-6, err
    return f"rel err {err:.2e} on dyadic annuli"


def _check_constant_increments():
    rho = Mollifier(Scaling((1, 1)))
    cs = [c_eps_pam(rho, 2.0**-j) for j in range(6, 10)]
    target = math.log(2) / math.pi
    worst = max(abs((b - a) / target - 1) for a, b in zip(cs, cs[1:]))
    assert worst <= 0.02, worst
    return f"increment rel dev {worst:.2e} from (1/pi)log2"


def _make_stochastic_check(n_samples):
    def check():
        sampler = GpamChaosSampler(level=7, eps=2.0**-5)
        sampler.renorm_constant = sampler.discrete_constant
        lams = 2.0 ** -np.arange(3, 7)
        slope, err, _ = chaos_variance_mc(
            "xi_i_xi", sampler, lams, n_samples, seed=42
        )
        assert slope + 2.0 * err >= -0.2, (slope, err)
        return f"slope {slope:+.3f} +- {err:.3f} (N={n_samples})"

    return check


def _check_study_contraction():
    from ..classical import convergence_study

    rho = Mollifier(Scaling((1, 1)))
    ratios = []
    for seed in range(3):
        res = convergence_study(
            "pam", rho, [2.0**-2, 2.0**-3, 2.0**-4, 2.0**-5], seed=seed
        )
        ratios.extend(res.ratios)
    worst = max(ratios)
    assert worst <= 0.9, worst
    return f"worst contraction ratio {worst:.3f}"


def suites(n_samples: int = 50):
    return {
        "algebra": [
            ("counit", _check_counit),
            ("coassociativity", _check_coassociativity),
            ("antipode", _check_antipode),
            ("group-law", _check_group_law),
        ],
        "analysis": [
            ("kernel-moments", _check_kernel_moments),
            ("kernel-reassembly", _check_reassembly),
            ("constant-increments", _check_constant_increments),
        ],
        "stochastic": [
            ("variance-slope", _make_stochastic_check(n_samples)),
            ("cauchy-contraction", _check_study_contraction),
        ],
    }


SUITES = ("algebra", "analysis", "stochastic")


def run_suite(name: str, n_samples: int = 50) -> list[CheckOutcome]:
    out = []
    for check_name, fn in suites(n_samples)[name]:
        try:
            detail = fn()
            out.append(CheckOutcome(check_name, True, detail))
        except AssertionError as exc:
            out.append(CheckOutcome(check_name, False, f"witness: {exc.args}"))
    return out
