"""Metric models: the generating-function family, the three worked examples,
a flat-curvature family instance, and Minkowski/Schwarzschild fixtures.

Every model evaluates its components on floats (cheap, used by curve
integration) or on coordinate jets (used for curvature).  Components are
given as a sparse upper triangle ``{(i, j): g_ij}``; absent entries are zero.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import jets
from .errors import DegenerateEventError, DomainError, UsageError
from .generators import ClosedFormV, GeneratorSet, QuadratureV
from .jets import Jet2, Scalar, cos, exp, sin, value_of
from .pipeline import V_and_Vy
from .quadrature import QuadratureSpec

DET_FLOOR = 1e-12

ComponentFn = Callable[[Scalar, Scalar, Scalar, Scalar], Mapping[tuple[int, int], Scalar]]


@dataclass(frozen=True)
class Margins:
    """Exclusion margins around the exact singular hypersurfaces."""

    sin_t_floor: float = 0.05
    cos_t_floor: float = 0.05
    x_floor: float = 0.2

    def __post_init__(self):
        for name in ("sin_t_floor", "cos_t_floor", "x_floor"):
            if not getattr(self, name) > 0:
                raise UsageError(f"margin {name} must be positive")


@dataclass(frozen=True)
class Box:
    """Coordinate ranges used for random event sampling."""

    t: tuple[float, float] = (0.0, math.pi)
    x: tuple[float, float] = (-3.0, 3.0)
    y: tuple[float, float] = (-3.0, 3.0)
    z: tuple[float, float] = (-3.0, 3.0)

    def ranges(self):
        return (self.t, self.x, self.y, self.z)


# -- small dense linear algebra ---------------------------------------------

_PERMS4 = []
for _p in itertools.permutations(range(4)):
    _inv = sum(1 for i in range(4) for j in range(i + 1, 4) if _p[i] > _p[j])
    _PERMS4.append((_p, -1.0 if _inv % 2 else 1.0))


def det4(a: np.ndarray) -> float:
    """Leibniz expansion; structural zeros drop out exactly, so no cancellation."""
    total = 0.0
    for p, sgn in _PERMS4:
        term = a[0, p[0]] * a[1, p[1]] * a[2, p[2]] * a[3, p[3]]
        if term != 0.0:
            total += sgn * term
    return total


def _det3(m: np.ndarray) -> float:
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def inv4(a: np.ndarray, det: float | None = None) -> np.ndarray:
    """Adjugate inverse; exact zeros in the metric stay exact zeros in the inverse."""
    d = det4(a) if det is None else det
    cof = np.empty((4, 4))
    idx = range(4)
    for i in idx:
        rows = [r for r in idx if r != i]
        for j in idx:
            cols = [c for c in idx if c != j]
            cof[i, j] = (-1.0) ** (i + j) * _det3(a[np.ix_(rows, cols)])
    return cof.T / d


# -- evaluated metric ----------------------------------------------------------

class MetricJets:
    """All ten metric components at one event, with first and second partials.

    ``g[a, b]``, ``dg[a, b, c] = d_c g_ab``, ``ddg[a, b, c, d] = d_c d_d g_ab``.
    """

    def __init__(self, components: Sequence[Sequence[Jet2]], point: Sequence[float]):
        self.components = components
        self.point = tuple(float(c) for c in point)
        self.g = np.empty((4, 4))
        self.dg = np.empty((4, 4, 4))
        self.ddg = np.empty((4, 4, 4, 4))
        for a in range(4):
            for b in range(4):
                jet = components[a][b]
                self.g[a, b] = jet.value
                self.dg[a, b] = jet.grad
                self.ddg[a, b] = jet.hess

    @property
    def scale(self) -> float:
        """Max |second derivative of g|; tolerances are relative to this.

        A metric with vanishing second derivatives (constant coefficients)
        gets scale 1 so absolute comparisons remain meaningful.
        """
        s = float(np.max(np.abs(self.ddg)))
        return s if s > 0.0 else 1.0


def _fill(entries: Mapping[tuple[int, int], Scalar], as_jets: bool):
    zero = Jet2(0.0) if as_jets else 0.0
    mat = [[zero] * 4 for _ in range(4)]
    for (i, j), v in entries.items():
        if as_jets:
            v = jets.as_jet(v)
        else:
            v = value_of(v)
        mat[i][j] = v
        mat[j][i] = v
    return mat


SingularFn = Callable[[Sequence[float], Margins], bool]


@dataclass(frozen=True)
class MetricModel:
    name: str
    components: ComponentFn
    singular: SingularFn
    box: Box = Box()
    default_grid: str = "t=0.25:2.65:5,x=-3:3:5,y=-3:3:5,z=-3:3:3"
    margins: Margins = Margins()
    generators: GeneratorSet | None = None
    closed_forms: Mapping[str, Callable] = field(default_factory=dict)
    claims: frozenset = frozenset({"vacuum"})
    description: str = ""

    def is_singular(self, point: Sequence[float], margins: Margins | None = None) -> bool:
        """True when ``point`` lies on (or within the margin of) a known singular set."""
        return self.singular(point, margins or self.margins)

    def values(self, point: Sequence[float]) -> np.ndarray:
        t, x, y, z = (float(c) for c in point)
        try:
            mat = _fill(self.components(t, x, y, z), as_jets=False)
        except DomainError as exc:
            raise _with_point(exc, point) from exc
        except ZeroDivisionError as exc:
            raise DomainError(f"division by zero evaluating {self.name}", point) from exc
        return np.array(mat, dtype=float)

    def jets(self, point: Sequence[float]) -> MetricJets:
        try:
            mat = _fill(self.components(*jets.seed_all(point)), as_jets=True)
        except DomainError as exc:
            raise _with_point(exc, point) from exc
        return MetricJets(mat, point)

    def closed_form(self, key: str, point: Sequence[float]) -> float | None:
        fn = self.closed_forms.get(key)
        return None if fn is None else float(fn(*point))


def _with_point(exc: DomainError, point) -> DomainError:
    if exc.point is not None and not any(math.isnan(c) for c in exc.point):
        return exc
    return DomainError(str(exc.args[0]), point, exc.assumption)


def determinant(m: MetricJets | np.ndarray) -> float:
    g = m.g if isinstance(m, MetricJets) else np.asarray(m, dtype=float)
    return det4(g)


def hadamard_ratio(g: np.ndarray, det: float | None = None) -> float:
    """|det| divided by the product of row norms; 0 for singular, 1 for orthogonal rows."""
    d = det4(g) if det is None else det
    norms = np.prod(np.linalg.norm(g, axis=1))
    return abs(d) / norms if norms > 0 else 0.0


def inverse_metric(m: MetricJets | np.ndarray, det_floor: float = DET_FLOOR) -> np.ndarray:
    """Inverse of the component matrix.

    The floor applies to the Hadamard ratio |det| / prod(row norms), so it
    does not depend on the overall size of the components (which grow like
    e^{2x} in the examples).  Raises :class:`DegenerateEventError` below it.
    """
    g = m.g if isinstance(m, MetricJets) else np.asarray(m, dtype=float)
    point = m.point if isinstance(m, MetricJets) else None
    d = det4(g)
    if not hadamard_ratio(g, d) > det_floor:
        raise DegenerateEventError(d, point)
    return inv4(g, d)


def leading_minors(g: np.ndarray) -> tuple[float, float, float, float]:
    """D1..D4, the leading principal minors."""
    d1 = g[0, 0]
    d2 = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    d3 = _det3(g[:3, :3])
    return float(d1), float(d2), float(d3), det4(g)


# -- the family ----------------------------------------------------------------

def family_components(gen: GeneratorSet, v_transform=None, V_transform=None) -> ComponentFn:
    """Component function of the family; the transforms exist for negative controls."""
    def components(t, x, y, z):
        K, K_t, K_x = gen.K(t, x), gen.K_t(t, x), gen.K_x(t, x)
        N = gen.N(y)
        if value_of(N) == 0.0:
            raise DomainError("N(y) = 0, so (fh)_x = 0", assumption="(9)")
        if value_of(K) == 0.0 or value_of(K_x) == 0.0:
            raise DomainError("K or K_x vanishes", assumption="(12)")
        V, V_y = V_and_Vy(gen, t, y)
        if V_transform is not None:
            V = V_transform(V)
        if value_of(V) == 0.0:
            raise DomainError("V vanishes", assumption="(12)")
        if value_of(N) > 0.0:
            # det = V^2 K_x^2 K^4 N, so g < 0 requires N < 0
            raise DomainError("N > 0 makes det(g) > 0", assumption="(H)")
        v = K_x * V
        if v_transform is not None:
            v = v_transform(v)
        return {
            (0, 0): 2.0 * K_t * V,
            (0, 1): v,
            (0, 2): K * V_y,
            (2, 2): -(K * K),
            (3, 3): N * K * K,
        }
    return components


CORRUPTIONS = {
    "v": dict(v_transform=lambda v: 2.0 * v + 1.0),
    "V": dict(V_transform=lambda V: V + 0.1),
}


def corrupted(model: MetricModel, kind: str) -> MetricModel:
    """Family model with v -> 2v + 1 (``"v"``) or V -> V + 0.1 (``"V"``)."""
    if kind not in CORRUPTIONS:
        raise UsageError(f"unknown corruption {kind!r}; use v or V")
    if model.generators is None:
        raise UsageError(f"{model.name} is not a family model; nothing to corrupt")
    return dataclasses.replace(model, name=f"{model.name}[corrupt={kind}]",
                               components=family_components(model.generators, **CORRUPTIONS[kind]))


def assemble_family(gen: GeneratorSet, point: Sequence[float]) -> MetricJets:
    """Metric components of the family at ``point`` as jets."""
    try:
        mat = _fill(family_components(gen)(*jets.seed_all(point)), as_jets=True)
    except DomainError as exc:
        raise _with_point(exc, point) from exc
    return MetricJets(mat, point)


def family_det(gen: GeneratorSet, point: Sequence[float]) -> float:
    """-v^2 f h with v = V K_x, f = -K^2, h = N K^2."""
    t, x, y, _ = point
    K, K_x, N = gen.K(t, x), gen.K_x(t, x), gen.N(y)
    V, _ = V_and_Vy(gen, t, y)
    v = V * K_x
    return -(v * v) * (-(K * K)) * (N * K * K)


# -- singular-set predicates ---------------------------------------------------

def _t_loci(point, m: Margins) -> bool:
    t = point[0]
    return abs(math.sin(t)) < m.sin_t_floor or abs(math.cos(t)) < m.cos_t_floor


def _t_loci_and_x0(point, m: Margins) -> bool:
    return _t_loci(point, m) or abs(point[1]) < m.x_floor


def _never(point, m: Margins) -> bool:
    return False


# -- worked examples -------------------------------------------------------------

def _ex1_generators() -> GeneratorSet:
    return GeneratorSet(
        w=cos,
        q=lambda t: 0.0,
        K=lambda t, x: exp(x) * sin(t),
        K_t=lambda t, x: exp(x) * cos(t),
        K_x=lambda t, x: exp(x) * sin(t),
        N=lambda y: -((2.0 + sin(y)) * (2.0 + sin(y))),
        N_y=lambda y: -2.0 * (2.0 + sin(y)) * cos(y),
        V_mode=ClosedFormV(V=lambda t, y: cos(t) * (2.0 + sin(y)),
                           V_y=lambda t, y: cos(t) * cos(y)),
        name="example1",
    )


def _ex2_V(t, y):
    return cos(t) * exp((2.0 * y - cos(y)) * sin(t)) / (2.0 + sin(y))


def _ex2_generators() -> GeneratorSet:
    return GeneratorSet(
        w=cos,
        q=sin,
        K=lambda t, x: exp(x) * sin(t),
        K_t=lambda t, x: exp(x) * cos(t),
        K_x=lambda t, x: exp(x) * sin(t),
        N=lambda y: -1.0 / ((2.0 + sin(y)) * (2.0 + sin(y))),
        N_y=lambda y: 2.0 * cos(y) / ((2.0 + sin(y)) ** 3),
        V_mode=ClosedFormV(
            V=_ex2_V,
            V_y=lambda t, y: _ex2_V(t, y) * ((2.0 + sin(y)) * sin(t) - cos(y) / (2.0 + sin(y))),
        ),
        name="example2",
    )


def _ex3_V(t, y):
    return cos(t) * exp((2.0 * y + sin(y)) * sin(t)) / (2.0 + cos(y))


def _ex3_generators() -> GeneratorSet:
    return GeneratorSet(
        w=cos,
        q=sin,
        K=lambda t, x: sin(t) / (x * x),
        K_t=lambda t, x: cos(t) / (x * x),
        K_x=lambda t, x: -2.0 * sin(t) / (x * x * x),
        N=lambda y: -1.0 / ((2.0 + cos(y)) * (2.0 + cos(y))),
        N_y=lambda y: -2.0 * sin(y) / ((2.0 + cos(y)) ** 3),
        V_mode=ClosedFormV(
            V=_ex3_V,
            V_y=lambda t, y: _ex3_V(t, y) * ((2.0 + cos(y)) * sin(t) + sin(y) / (2.0 + cos(y))),
        ),
        name="example3",
    )


def _ex1_printed(t, x, y, z):
    ex, sy = exp(x), 2.0 + sin(y)
    return {
        (0, 0): 2.0 * ex * sy * cos(t) ** 2,
        (0, 1): 0.5 * ex * sy * sin(2.0 * t),
        (0, 2): 0.5 * ex * cos(y) * sin(2.0 * t),
        (2, 2): -(ex * sin(t)) ** 2,
        (3, 3): -(ex * sy * sin(t)) ** 2,
    }


def _ex2_printed(t, x, y, z):
    ex, sy = exp(x), 2.0 + sin(y)
    E = exp((2.0 * y - cos(y)) * sin(t))
    return {
        (0, 0): 2.0 * ex * cos(t) ** 2 * E / sy,
        (0, 1): ex * sin(2.0 * t) * E / (2.0 * sy),
        (0, 2): ex * (sin(t) * cos(t) - cos(t) * cos(y) / sy ** 2) * sin(t) * E,
        (2, 2): -exp(2.0 * x) * sin(t) ** 2,
        (3, 3): -exp(2.0 * x) * sin(t) ** 2 / sy ** 2,
    }


def _ex3_printed(t, x, y, z):
    cy = 2.0 + cos(y)
    E = exp((sin(y) + 2.0 * y) * sin(t))
    return {
        (0, 0): 2.0 * cos(t) ** 2 * E / (cy * x ** 2),
        (0, 1): -sin(2.0 * t) * E / (cy * x ** 3),
        (0, 2): sin(t) / x ** 2 * (cos(t) * sin(y) / cy ** 2 + sin(2.0 * t) / 2.0) * E,
        (2, 2): -sin(t) ** 2 / x ** 4,
        (3, 3): -sin(t) ** 2 / (cy ** 2 * x ** 4),
    }


def _ex1_det(t, x, y, z):
    return -0.25 * math.exp(6 * x) * (2 + math.sin(y)) ** 4 * math.sin(t) ** 4 * math.sin(2 * t) ** 2


def _ex2_det(t, x, y, z):
    return (-math.exp(6 * x + 2 * (2 * y - math.cos(y)) * math.sin(t)) * math.sin(2 * t) ** 2
            * math.sin(t) ** 4 / (4 * (2 + math.sin(y)) ** 4))


def _ex3_det(t, x, y, z):
    return (-math.exp(2 * (2 * y + math.sin(y)) * math.sin(t)) * math.sin(2 * t) ** 2
            * math.sin(t) ** 4 / (x ** 14 * (2 + math.cos(y)) ** 4))


def _ex2_R0202(t, x, y, z):
    return (math.exp(x) * (2 + math.sin(y)) * math.cos(t) ** 2 * math.sin(t) ** 2
            * math.exp((2 * y - math.cos(y)) * math.sin(t)))


def _ex2_R0303(t, x, y, z):
    return (math.exp(x) * math.cos(t) ** 2 * math.sin(t) ** 2
            * math.exp((2 * y - math.cos(y)) * math.sin(t)) / (2 + math.sin(y)))


def _ex3_R0202(t, x, y, z):
    return ((2 + math.cos(y)) * math.sin(2 * t) ** 2
            * math.exp((math.sin(y) + 2 * y) * math.sin(t)) / (4 * x ** 2))


def _ex3_R0303(t, x, y, z):
    return (math.sin(2 * t) ** 2 * math.exp((math.sin(y) + 2 * y) * math.sin(t))
            / (4 * x ** 2 * (2 + math.cos(y))))


def _delta2(t, x, y, z):
    return 6 * x + 2 * (2 * y - math.cos(y)) * math.sin(t)


_EX3_GRID = "t=0.25:2.65:5,x=0.2:3:5,y=-3:3:5,z=-3:3:3"
_FLAT_CLAIMS = frozenset({"vacuum", "flat"})
_PATTERN_CLAIMS = frozenset({"vacuum", "riemann_pattern", "kretschmann_zero", "signature_chain"})


def _example(n: int, variant: str) -> MetricModel:
    gens = {1: _ex1_generators, 2: _ex2_generators, 3: _ex3_generators}[n]()
    if variant == "quadrature":
        gens = gens.with_V_mode(QuadratureV(QuadratureSpec()))
    printed = {1: _ex1_printed, 2: _ex2_printed, 3: _ex3_printed}[n]
    comps = printed if variant == "direct" else family_components(gens)
    closed: dict[str, Callable] = {"det": {1: _ex1_det, 2: _ex2_det, 3: _ex3_det}[n]}
    closed["printed_components"] = printed
    if n == 2:
        closed.update(R0202=_ex2_R0202, R0303=_ex2_R0303, delta=_delta2)
    elif n == 3:
        closed.update(R0202=_ex3_R0202, R0303=_ex3_R0303)
    if variant == "quadrature" and n != 1:
        # V differs from the printed branch by the factor exp(q(t) * const),
        # so printed closed forms do not apply pointwise
        closed = {}
    name = f"example{n}" if variant == "family" else f"example{n}_{variant}"
    return MetricModel(
        name=name,
        components=comps,
        singular=_t_loci_and_x0 if n == 3 else _t_loci,
        default_grid=_EX3_GRID if n == 3 else MetricModel.default_grid,
        generators=gens,
        closed_forms=closed,
        claims=_FLAT_CLAIMS | {"signature_chain"} if n == 1 else _PATTERN_CLAIMS,
        description={1: "flat time-periodic solution",
                     2: "regular solution with non-vanishing curvature",
                     3: "solution with the x = 0 curvature singularity"}[n]
                    + {"family": " (assembled from generators)",
                       "direct": " (printed closed-form components)",
                       "quadrature": " (generators, V by quadrature)"}[variant],
    )


def theorem1_instance(c1: float = 1.0, c2: float = 0.0, y0: float = 0.0) -> MetricModel:
    """Constant-q member V = rho(t) kappa(y) with rho = cos t, K = e^x sin t,
    N = -(2 + cos y)^2 and kappa = c1 |N|^(1/2) exp(c2 int |N|^(-1/2) dy)."""
    gens = GeneratorSet(
        w=lambda t: c1 * cos(t),
        q=lambda t: c2,
        K=lambda t, x: exp(x) * sin(t),
        K_t=lambda t, x: exp(x) * cos(t),
        K_x=lambda t, x: exp(x) * sin(t),
        N=lambda y: -((2.0 + cos(y)) * (2.0 + cos(y))),
        N_y=lambda y: 2.0 * (2.0 + cos(y)) * sin(y),
        V_mode=QuadratureV(QuadratureSpec(y0=y0)),
        name="theorem1_instance",
    )
    if c1 == 0:
        raise UsageError("theorem1_instance needs c1 != 0 (otherwise V = 0)")
    return MetricModel(
        name="theorem1_instance",
        components=family_components(gens),
        singular=_t_loci,
        generators=gens,
        claims=_FLAT_CLAIMS,
        description=f"constant-q family member, c1={c1}, c2={c2}",
    )


def minkowski() -> MetricModel:
    return MetricModel(
        name="minkowski",
        components=lambda t, x, y, z: {(0, 0): 1.0, (1, 1): -1.0, (2, 2): -1.0, (3, 3): -1.0},
        singular=_never,
        box=Box((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)),
        default_grid="t=-1:1:5,x=-1:1:5,y=-1:1:5,z=-1:1:3",
        closed_forms={"det": lambda t, x, y, z: -1.0},
        claims=_FLAT_CLAIMS,
        description="flat space, diag(1,-1,-1,-1)",
    )


def schwarzschild(mass: float = 1.0) -> MetricModel:
    """Standard diagonal form in (t, r, theta, phi) mapped onto (t, x, y, z)."""
    if not mass > 0:
        raise UsageError(f"schwarzschild needs M > 0, got {mass}")
    M = float(mass)

    def components(t, r, th, ph):
        if value_of(r) <= 2.0 * M:
            raise DomainError(f"schwarzschild evaluated at r <= 2M (M={M})")
        lapse = 1.0 - 2.0 * M / r
        return {(0, 0): lapse, (1, 1): -1.0 / lapse, (2, 2): -(r * r),
                (3, 3): -(r * r) * sin(th) ** 2}

    def singular(point, m: Margins) -> bool:
        return point[1] - 2.0 * M <= m.x_floor or abs(math.sin(point[2])) < m.sin_t_floor

    def det(t, r, th, ph):
        return -(r ** 4) * math.sin(th) ** 2

    return MetricModel(
        name="schwarzschild",
        components=components,
        singular=singular,
        box=Box((-1.0, 1.0), (2.0 * M + 1.0, 10.0 * M), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)),
        default_grid=f"t=0:1:5,x={3 * M}:{10 * M}:5,y=0.5:2.6:5,z=0:3:3",
        closed_forms={"det": det, "kretschmann": lambda t, r, th, ph: 48.0 * M * M / r ** 6},
        claims=frozenset({"vacuum", "kretschmann_closed_form"}),
        description=f"Schwarzschild, M={M}, coordinates (t, r, theta, phi)",
    )


_BUILTINS = {
    "example1": lambda: _example(1, "family"),
    "example2": lambda: _example(2, "family"),
    "example3": lambda: _example(3, "family"),
    "example1_direct": lambda: _example(1, "direct"),
    "example2_direct": lambda: _example(2, "direct"),
    "example3_direct": lambda: _example(3, "direct"),
    "example1_quadrature": lambda: _example(1, "quadrature"),
    "example2_quadrature": lambda: _example(2, "quadrature"),
    "example3_quadrature": lambda: _example(3, "quadrature"),
    "theorem1_instance": theorem1_instance,
    "minkowski": minkowski,
    "schwarzschild": schwarzschild,
}

MODEL_PARAMS = {"theorem1_instance": ("c1", "c2", "y0"), "schwarzschild": ("mass",)}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str, **params: float) -> MetricModel:
    """Look up a compiled-in model; ``params`` feed parameterized models
    (``c1``, ``c2``, ``y0`` for theorem1_instance, ``mass`` for schwarzschild)."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UsageError(f"unknown model {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    allowed = MODEL_PARAMS.get(name, ())
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise UsageError(f"model {name} does not take parameters {unknown}; "
                         f"accepted: {list(allowed) or 'none'}")
    return factory(**{k: float(v) for k, v in params.items()})


def random_events(model: MetricModel, n: int, rng: np.random.Generator,
                  margins: Margins | None = None) -> list[tuple[float, float, float, float]]:
    """Uniform samples from the model's box, rejecting singular-margin events."""
    out = []
    ranges = model.box.ranges()
    while len(out) < n:
        p = tuple(float(rng.uniform(lo, hi)) for lo, hi in ranges)
        if not model.is_singular(p, margins):
            out.append(p)
    return out
