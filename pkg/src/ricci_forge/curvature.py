"""Levi-Civita curvature from metric jets.

Conventions::

    Gamma^r_{mn} = 1/2 g^{rs} (d_m g_{sn} + d_n g_{sm} - d_s g_{mn})
    R^r_{smn}    = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
                   + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
    R_{abmn}     = g_{ar} R^r_{bmn},   R_{bn} = R^m_{bmn}

The lowered tensor is evaluated with the algebraically equivalent form

    R_{abmn} = 1/2 (d_b d_m g_{an} + d_a d_n g_{bm} - d_a d_m g_{bn} - d_b d_n g_{am})
               + g_{rs} (Gamma^r_{bm} Gamma^s_{an} - Gamma^r_{bn} Gamma^s_{am})

which needs only the metric's second derivatives, never derivatives of the
inverse.  With this convention R_0202 of the examples comes out positive,
so no global sign flip is applied.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .models import DET_FLOOR, MetricJets, inverse_metric

# A component is resolved when it exceeds this fraction of the sum of the
# absolute values of the terms that produced it.  Anything smaller is
# rounding residue of a cancellation (roughly 4500 ulp of the term sum).
NOISE_GATE = 1e-12


@dataclass
class CurvatureBundle:
    christoffel: np.ndarray       # [r, m, n]
    riemann_lowered: np.ndarray   # [a, b, m, n]
    ricci: np.ndarray
    scalar: float
    einstein: np.ndarray
    kretschmann: float
    kretschmann_raw: float
    g: np.ndarray
    g_inv: np.ndarray
    scale: float
    # per-component sum of absolute term magnitudes; separates real
    # curvature from cancellation noise
    term_magnitude: np.ndarray

    @property
    def max_riemann(self) -> float:
        return float(np.max(np.abs(self.riemann_lowered)))

    @property
    def max_ricci(self) -> float:
        return float(np.max(np.abs(self.ricci)))


def christoffel(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # dg[s, n, m] = d_m g_sn
    lowered = 0.5 * (np.einsum("snm->smn", dg) + dg - np.einsum("mns->smn", dg))
    return np.einsum("rs,smn->rmn", g_inv, lowered)


def _riemann_lowered(g, ddg, gamma):
    # ddg[a, b, c, d] = d_c d_d g_ab
    second = 0.5 * (np.einsum("anbm->abmn", ddg) + np.einsum("bman->abmn", ddg)
                    - np.einsum("bnam->abmn", ddg) - np.einsum("ambn->abmn", ddg))
    quad1 = np.einsum("rs,rbm,san->abmn", g, gamma, gamma)
    quad2 = np.einsum("rs,rbn,sam->abmn", g, gamma, gamma)
    riem = second + (quad1 - quad2)
    mag = 0.5 * (np.abs(np.einsum("anbm->abmn", ddg)) + np.abs(np.einsum("bman->abmn", ddg))
                 + np.abs(np.einsum("bnam->abmn", ddg)) + np.abs(np.einsum("ambn->abmn", ddg)))
    ag, agam = np.abs(g), np.abs(gamma)
    mag = mag + np.einsum("rs,rbm,san->abmn", ag, agam, agam) + np.einsum("rs,rbn,sam->abmn", ag, agam, agam)
    return riem, mag


def raise_all(riem: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    return np.einsum("ap,bq,mr,ns,pqrs->abmn", g_inv, g_inv, g_inv, g_inv, riem, optimize=True)


def resolved_riemann(b: CurvatureBundle, gate: float = NOISE_GATE) -> np.ndarray:
    """Lowered Riemann with unresolved (pure cancellation residue) entries set to 0."""
    R = b.riemann_lowered
    return np.where(np.abs(R) > gate * b.term_magnitude, R, 0.0)


def kretschmann(b: CurvatureBundle, g_inv: np.ndarray | None = None,
                gate: float | None = NOISE_GATE) -> float:
    """R^{abmn} R_{abmn}.

    Raising four indices multiplies the rounding residue of structurally zero
    components by |g^-1|^4, which near degenerate events swamps the invariant.
    Unresolved components are therefore dropped first; ``gate=None`` gives the
    raw contraction.
    """
    gi = b.g_inv if g_inv is None else g_inv
    R = b.riemann_lowered if gate is None else resolved_riemann(b, gate)
    return float(np.sum(raise_all(R, gi) * R))


def compute_bundle(m: MetricJets, det_floor: float = DET_FLOOR) -> CurvatureBundle:
    g_inv = inverse_metric(m, det_floor)
    gamma = christoffel(g_inv, m.dg)
    riem, mag = _riemann_lowered(m.g, m.ddg, gamma)
    # R_{bn} = g^{am} R_{abmn}
    ricci = np.einsum("am,abmn->bn", g_inv, riem)
    scalar = float(np.einsum("bn,bn->", g_inv, ricci))
    einstein = ricci - 0.5 * m.g * scalar
    bundle = CurvatureBundle(gamma, riem, ricci, scalar, einstein, 0.0, 0.0, m.g, g_inv, m.scale, mag)
    bundle.kretschmann = kretschmann(bundle)
    bundle.kretschmann_raw = kretschmann(bundle, gate=None)
    return bundle


# -- index classes ---------------------------------------------------------

def _canonical(a, b, m, n):
    """Representative of {abmn} under antisymmetry in each pair and pair exchange."""
    p1, p2 = (min(a, b), max(a, b)), (min(m, n), max(m, n))
    return min(p1, p2) + max(p1, p2)


INDEX_CLASSES = sorted({_canonical(*idx) for idx in itertools.product(range(4), repeat=4)
                        if idx[0] != idx[1] and idx[2] != idx[3]})


def class_label(idx) -> str:
    return "".join(str(i) for i in idx)


def riemann_nonzero_pattern(b: CurvatureBundle, tol: float, noise: float = 0.0) -> set[str]:
    """Index classes with |R| > tol * scale.

    ``noise`` optionally also requires |R| > noise * (term magnitude), which
    drops components that are pure cancellation residue.
    """
    out = set()
    for idx in INDEX_CLASSES:
        v = abs(b.riemann_lowered[idx])
        if v > tol * b.scale and v > noise * b.term_magnitude[idx]:
            out.add(class_label(idx))
    return out


def max_off_pattern(b: CurvatureBundle, allowed=("0202", "0303")) -> float:
    """Largest |R| over index classes outside ``allowed``."""
    vals = [abs(b.riemann_lowered[idx]) for idx in INDEX_CLASSES if class_label(idx) not in allowed]
    return float(max(vals))


def symmetry_defects(b: CurvatureBundle) -> dict[str, float]:
    """Largest violation of each algebraic Riemann identity."""
    R = b.riemann_lowered
    return {
        "antisym_first": float(np.max(np.abs(R + np.einsum("abmn->bamn", R)))),
        "antisym_second": float(np.max(np.abs(R + np.einsum("abmn->abnm", R)))),
        "pair_exchange": float(np.max(np.abs(R - np.einsum("abmn->mnab", R)))),
        "bianchi_first": float(np.max(np.abs(R + np.einsum("abmn->amnb", R) + np.einsum("abmn->anbm", R)))),
    }
