"""Field reconstruction from envelopes, error norms and snapshot export."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .fields import EnvelopeField, WaveField
from .models import EnvelopePDEModel, second_linear_symbol


def envelope_rate(model: EnvelopePDEModel, a: np.ndarray, grid, b: np.ndarray | None = None):
    """Right-hand side of the envelope equation(s) at the given state."""
    q = grid.wavenumbers()
    da = np.fft.ifft(model.linear_symbol(q) * np.fft.fft(a))
    if b is None:
        return da + 1j * model.c0 * np.abs(a) ** 2 * a
    db = np.fft.ifft(second_linear_symbol(model, q) * np.fft.fft(b))
    na, nb = model.coupling(a, b)
    return da + na, db + nb


def reconstruct_complex(model: EnvelopePDEModel, A, eps: float, t: float, B=None, include_corrections: bool = True):
    """Complex sums for ``u`` and ``u_t`` before real parts are taken."""
    a = A.values if isinstance(A, EnvelopeField) else np.asarray(A, dtype=complex)
    grid = A.grid if isinstance(A, EnvelopeField) else None
    if grid is None:
        raise ValueError("A must be an EnvelopeField")
    x = grid.x
    w = model.omega
    phase = np.exp(1j * (model.k * x - w * t))
    b = None
    if B is not None:
        b = B.values if isinstance(B, EnvelopeField) else np.asarray(B, dtype=complex)

    if b is None:
        da = envelope_rate(model, a, grid)
    else:
        da, db = envelope_rate(model, a, grid, b)

    z = a * phase
    u = z + np.conj(z)
    zt = (da - 1j * w * a) * phase
    v = zt + np.conj(zt)
    if b is not None:
        p3 = np.exp(1j * (model.second_k * x - model.second_omega * t))
        zb = b * p3
        u = u + zb + np.conj(zb)
        zbt = (db - 1j * model.second_omega * b) * p3
        v = v + zbt + np.conj(zbt)
    if include_corrections:
        for hmn in model.harmonics:
            c = eps**hmn.power * hmn.coeff(a)
            ph = np.exp(1j * hmn.n * (model.k * x - w * t))
            term = c * ph
            dterm = -1j * hmn.n * w * term
            if hmn.rate is not None:
                dterm = dterm + eps**hmn.power * hmn.rate(a, da) * ph
            if hmn.self_conjugate:
                u = u + term
                v = v + dterm
            else:
                u = u + term + np.conj(term)
                v = v + dterm + np.conj(dterm)
    return u, v


def reconstruct_field(model: EnvelopePDEModel, A, eps: float, t: float, B=None, include_corrections: bool = True) -> WaveField:
    """``u = A e^{i theta} + c.c.`` plus the model's order-eps harmonics, and ``u_t``.

    ``u_t`` uses the envelope equation for ``A_t``, also inside the
    correction terms when the harmonic supplies its own rate.
    """
    u, v = reconstruct_complex(model, A, eps, t, B, include_corrections)
    return WaveField(A.grid, u.real, v.real, t)


def envelope_error(u_ref: WaveField, u_ms: WaveField) -> tuple[float, float]:
    """(relative L2, absolute Linf) difference of two fields on one grid."""
    if u_ref.grid != u_ms.grid:
        raise ValueError("fields live on different grids")
    diff = u_ms.u - u_ref.u
    nref = np.linalg.norm(u_ref.u)
    ndiff = np.linalg.norm(diff)
    if nref == 0:
        rel = 0.0 if ndiff == 0 else np.inf
    else:
        rel = float(ndiff / nref)
    return rel, float(np.max(np.abs(diff)))


def write_snapshot_csv(path, A: EnvelopeField, u_ref: WaveField, u_ms: WaveField) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re_A", "im_A", "u_ref", "u_ms"])
        for row in zip(A.grid.x, A.values.real, A.values.imag, u_ref.u, u_ms.u):
            w.writerow([f"{v:.17g}" for v in row])
    return path


def write_metadata_json(path, meta: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)
