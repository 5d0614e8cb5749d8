"""Envelope models for wave packets of the two model equations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dispersion import DispersionRelation, fourth_order, klein_gordon, phase_matching_scan
from ..errors import PreconditionError

PHASE_MATCH_TOL = 1e-8


@dataclass(frozen=True)
class Harmonic:
    """Correction ``eps**power * coeff(A) * exp(i n theta)`` in the field reconstruction.

    With ``self_conjugate`` the term is real already and is added once.
    """

    n: int
    coeff: Callable
    power: int = 1
    self_conjugate: bool = False
    rate: Callable | None = None  # (A, A_t) -> d coeff / dt


@dataclass(frozen=True)
class EnvelopePDEModel:
    """``A_t = -v_g A_x + i c2 A_xx + i c0 |A|**2 A`` for a carrier at ``(k, omega)``.

    ``c0`` already contains its power of eps.  A phase-matched model carries a
    second envelope ``B`` at ``3k`` and then ``coupling`` replaces the pure
    Kerr rotation.
    """

    name: str
    dispersion: DispersionRelation
    k: float
    eps: float
    omega: float
    v_g: float
    c2: float
    c0: float
    field_equation: str  # "klein_gordon" or "fourth_order"
    harmonics: tuple = ()
    second_k: float | None = None
    second_omega: float | None = None
    second_v_g: float | None = None
    coupling: Callable | None = None  # (A, B) -> (dA/dt, dB/dt) nonlinear part

    @property
    def coupled(self) -> bool:
        return self.second_k is not None

    def linear_symbol(self, q):
        """Fourier multiplier of the linear envelope operator (A_hat' = symbol * A_hat)."""
        return -1j * self.v_g * q - 1j * self.c2 * q**2

    def meta(self) -> dict:
        out = {
            "model": self.name,
            "k": self.k,
            "omega": self.omega,
            "v_g": self.v_g,
            "c2": self.c2,
            "c0": self.c0,
            "eps": self.eps,
        }
        if self.coupled:
            out.update(k3=self.second_k, omega3=self.second_omega, v_g3=self.second_v_g)
        return out


def klein_gordon_model(k: float, eps: float) -> EnvelopePDEModel:
    """``u_tt - u_xx + u = eps u**2`` with the envelope correct to eps**2."""
    d = klein_gordon()
    w = float(d.omega(k))
    return EnvelopePDEModel(
        name="klein_gordon",
        dispersion=d,
        k=k,
        eps=eps,
        omega=w,
        v_g=k / w,
        c2=1.0 / (2 * w**3),
        c0=eps**2 * 5.0 / (3 * w),
        field_equation="klein_gordon",
        harmonics=(
            Harmonic(0, lambda a: 2 * np.abs(a) ** 2, 1, True, lambda a, da: 4 * (np.conj(a) * da).real),
            Harmonic(2, lambda a: -a**2 / 3, 1, False, lambda a, da: -2 * a * da / 3),
        ),
    )


def fourth_order_model(k: float, eps: float) -> EnvelopePDEModel:
    """``u_tt + u_xx + u_xxxx + u = eps u**3``, first order in eps, no dispersion term."""
    d = fourth_order()
    w = float(d.omega(k))
    return EnvelopePDEModel(
        name="fourth_order",
        dispersion=d,
        k=k,
        eps=eps,
        omega=w,
        v_g=float(d.domega(k)),
        c2=0.0,
        c0=eps * 3.0 / (2 * w),
        field_equation="fourth_order",
    )


def coupled_fourth_order_model(k: float, eps: float) -> EnvelopePDEModel:
    """Phase-matched fourth-order model: envelopes at ``k`` and ``3k``."""
    d = fourth_order()
    roots = phase_matching_scan(d, 3, (0.05, 2.0))
    if not any(abs(k - r) <= PHASE_MATCH_TOL for r in roots):
        raise PreconditionError(f"k={k} is not phase matched (roots: {roots})")
    w1 = float(d.omega(k))
    w3 = float(d.omega(3 * k))
    ca = 1j * eps / (2 * w1)
    cb = 1j * eps / (2 * w3)

    def coupling(a, b):
        aa = np.abs(a) ** 2
        bb = np.abs(b) ** 2
        da = ca * (3 * aa * a + 6 * bb * a + 3 * np.conj(a) ** 2 * b)
        db = cb * (3 * bb * b + 6 * aa * b + a**3)
        return da, db

    return EnvelopePDEModel(
        name="fourth_order_coupled",
        dispersion=d,
        k=k,
        eps=eps,
        omega=w1,
        v_g=float(d.domega(k)),
        c2=0.0,
        c0=eps * 3.0 / (2 * w1),
        field_equation="fourth_order",
        second_k=3 * k,
        second_omega=w3,
        second_v_g=float(d.domega(3 * k)),
        coupling=coupling,
    )


def second_linear_symbol(model: EnvelopePDEModel, q):
    return -1j * model.second_v_g * q
