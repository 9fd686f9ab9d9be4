"""Explicit lower bound on the spectral gap of the convolution-kernel generator.

The bound combines potential norms with the contraction of the kernel symbol
away from the zero mode: with c1 the L1 norm of the potential, gamma0 =
(2/9) c1 / ||V||_2, and c2 = 1 - max_{k != 0} |a_k|, the maximum eigenvalue
satisfies lambda <= -kappa where kappa = min(c2 gamma0^2, c1 / 2).  It
applies only to convolution kernels of unit mass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .discretize import fourier_symbol
from .errors import DegenerateSymbol, IneligiblePotential, NotNormalized
from .kernels import Potential, WoundKernel, check_potential
from .spectral import SpectrumReport

MASS_TOL = 1e-8


@dataclass(frozen=True)
class GapBound:
    """Constants of the explicit spectral-gap bound."""

    c1: float
    norm_v2: float
    gamma0: float
    c2: float
    kappa: float

    def as_dict(self) -> dict:
        return {
            "c1": self.c1,
            "norm_v2": self.norm_v2,
            "gamma0": self.gamma0,
            "c2": self.c2,
            "kappa": self.kappa,
        }


def gap_constants(potential: Potential, wound: WoundKernel) -> GapBound:
    """Evaluate the bound constants by grid quadrature and the kernel symbol.

    Requires a unit-mass kernel and a potential that is strictly negative
    somewhere (otherwise c1 vanishes and the bound is void).
    """
    mass = wound.quadrature_mass()
    if abs(mass - 1.0) > MASS_TOL:
        raise NotNormalized(f"kernel quadrature mass is {mass!r}, expected 1")
    diag = check_potential(potential)
    if not diag.eligible:
        raise IneligiblePotential("gap bound needs a potential negative on some node")

    symbol = fourier_symbol(wound)
    c2 = 1.0 - symbol.max_offzero_modulus()
    if c2 <= 0:
        raise DegenerateSymbol(
            "kernel symbol has a nonzero mode of modulus >= 1 (mass concentrated)"
        )
    c1 = diag.norm_l1
    gamma0 = (2.0 / 9.0) * c1 / diag.norm_l2
    kappa = min(c2 * gamma0**2, 0.5 * c1)
    return GapBound(c1=c1, norm_v2=diag.norm_l2, gamma0=gamma0, c2=c2, kappa=kappa)


@dataclass(frozen=True)
class GapVerdict:
    """Outcome of checking the computed maximum eigenvalue against the bound."""

    passed: bool
    margin: float
    lam: float
    kappa: float
    slack: float

    def as_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "margin": self.margin,
            "lambda": self.lam,
            "kappa": self.kappa,
            "slack": self.slack,
        }


def verify_gap(report: SpectrumReport, bound: GapBound, slack: float = 1e-9) -> GapVerdict:
    """Check lambda <= -kappa up to solver slack; the margin is lambda + kappa."""
    lam = report.max_eigenvalue
    return GapVerdict(
        passed=bool(lam <= -bound.kappa + slack),
        margin=float(lam + bound.kappa),
        lam=float(lam),
        kappa=float(bound.kappa),
        slack=float(slack),
    )
