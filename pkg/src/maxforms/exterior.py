"""Differential forms on N-dimensional boxes with scalar coefficient fields.

A form of degree q carries one complex scalar coefficient per ordered
multi-index.  Coefficients come in two interchangeable representations:

* callable fields (`ScalarField`): point evaluation plus partial derivatives,
  exact when a derivative rule is attached, central differences otherwise;
* grid fields (`GridScalar`): samples on a uniform tensor grid, partial
  derivatives by forward differences with periodic wrap so that discrete
  partials commute as operators (the wrapped slices are excluded from any
  accuracy claim; see `interior`).

Operations: wedge, hodge, exterior derivative, codifferential (two routes),
pullback along a smooth map, and the pair of material transformations built
from pullback and hodge.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .multiindex import (
    MultiIndex,
    complement,
    concat_sign,
    enumerate_ordered,
    insert_sign,
    sign_constants,
)

_FD_STEP = 1e-6


class ScalarField:
    """Complex scalar field with point evaluation and partial derivatives.

    `partial_rule(axis)` must return the derivative `ScalarField`; rules are
    composed exactly through sums and products, so analytic derivative chains
    of any depth are available when the leaves provide them.  Leaves without a
    rule fall back to central differences.
    """

    __slots__ = ("fn", "partial_rule", "_cache")

    def __init__(self, fn, partial_rule=None):
        self.fn = fn
        self.partial_rule = partial_rule
        self._cache = {}

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def partial(self, axis: int) -> "ScalarField":
        if axis in self._cache:
            return self._cache[axis]
        if self.partial_rule is not None:
            out = self.partial_rule(axis)
        else:
            out = _central_difference(self, axis)
        self._cache[axis] = out
        return out

    def zero_like(self) -> "ScalarField":
        return ScalarField.constant(0.0)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        return ScalarField(
            lambda x: self(x) + other(x),
            lambda axis: self.partial(axis) + other.partial(axis),
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return ScalarField(
                lambda x: self(x) * other(x),
                lambda axis: self.partial(axis) * other
                + self * other.partial(axis),
            )
        c = complex(other)
        return ScalarField(lambda x: c * self(x), lambda axis: c * self.partial(axis))

    __rmul__ = __mul__

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(c):
        c = complex(c)
        f = ScalarField(lambda x: c)
        f.partial_rule = lambda axis: ScalarField.constant(0.0)
        return f

    @staticmethod
    def coordinate(axis: int):
        """The field x_axis (1-based)."""
        f = ScalarField(lambda x: complex(x[axis - 1]))
        f.partial_rule = lambda j: ScalarField.constant(1.0 if j == axis else 0.0)
        return f

    @staticmethod
    def harmonic(freqs, phase=0.0, amp=1.0):
        """amp * cos(freqs . x + phase); derivatives close under phase shifts."""
        k = np.asarray(freqs, dtype=float)
        a = complex(amp)
        f = ScalarField(lambda x: a * np.cos(float(np.dot(k, x)) + phase))
        f.partial_rule = lambda axis: ScalarField.harmonic(
            k, phase + np.pi / 2.0, a * k[axis - 1]
        )
        return f

    @staticmethod
    def radial_power(exponent: float):
        """|x|^exponent away from the origin."""
        a = float(exponent)
        f = ScalarField(lambda x: complex(np.linalg.norm(x) ** a))
        f.partial_rule = lambda axis: (
            a * (ScalarField.coordinate(axis) * ScalarField.radial_power(a - 2.0))
        )
        return f


def _central_difference(f: ScalarField, axis: int) -> ScalarField:
    def fd(x):
        h = _FD_STEP * (1.0 + abs(float(x[axis - 1])))
        xp = np.array(x, dtype=float)
        xm = np.array(x, dtype=float)
        xp[axis - 1] += h
        xm[axis - 1] -= h
        return (f(xp) - f(xm)) / (2.0 * h)

    return ScalarField(fd)


@dataclass(frozen=True)
class GridSpec:
    shape: tuple
    spacing: tuple
    origin: tuple

    @property
    def ndim(self):
        return len(self.shape)


class GridScalar:
    """Samples of a scalar field on a uniform tensor grid.

    Forward difference with periodic wrap: shapes are preserved and discrete
    partials commute exactly as operators.  Entries whose forward neighbor
    wrapped around are meaningless for accuracy statements; callers mask them
    with `interior`.
    """

    __slots__ = ("values", "grid")

    def __init__(self, values, spacing, origin=None):
        values = np.asarray(values)
        if not np.iscomplexobj(values):
            values = values.astype(np.complex128)
        self.values = values
        spacing = tuple(float(s) for s in spacing)
        if len(spacing) != values.ndim:
            raise ValueError("one spacing per grid axis required")
        if origin is None:
            origin = (0.0,) * values.ndim
        self.grid = GridSpec(tuple(values.shape), spacing, tuple(origin))

    def partial(self, axis: int) -> "GridScalar":
        a = axis - 1
        h = self.grid.spacing[a]
        diff = (np.roll(self.values, -1, axis=a) - self.values) / h
        return GridScalar(diff, self.grid.spacing, self.grid.origin)

    def zero_like(self) -> "GridScalar":
        return GridScalar(
            np.zeros_like(self.values), self.grid.spacing, self.grid.origin
        )

    def _check_compatible(self, other):
        if self.grid != other.grid:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        if not isinstance(other, GridScalar):
            return NotImplemented
        self._check_compatible(other)
        return GridScalar(self.values + other.values, self.grid.spacing, self.grid.origin)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, GridScalar):
            self._check_compatible(other)
            return GridScalar(
                self.values * other.values, self.grid.spacing, self.grid.origin
            )
        return GridScalar(
            complex(other) * self.values, self.grid.spacing, self.grid.origin
        )

    __rmul__ = __mul__


def interior(values: np.ndarray, margin: int) -> np.ndarray:
    """Strip the last `margin` slices along every axis (wrap-affected region)."""
    if margin == 0:
        return values
    sl = tuple(slice(0, n - margin) for n in values.shape)
    return values[sl]


class FieldForm:
    """A degree-q form on an N-box.

    Component keys are exactly `enumerate_ordered(q, N)`; degrees outside
    0..N give the zero form with no components.
    """

    __slots__ = ("N", "q", "components")

    def __init__(self, N: int, q: int, components: dict):
        self.N = int(N)
        self.q = int(q)
        keys = enumerate_ordered(q, N)
        comp = {}
        for key in keys:
            if key in components:
                comp[key] = components[key]
        extra = set(map(tuple, components)) - set(map(tuple, keys))
        if extra:
            raise ValueError(f"components outside degree-{q} index set: {sorted(extra)}")
        if len(comp) != len(keys):
            raise ValueError("missing components; use from_callable/from_grid to zero-fill")
        self.components = comp

    @property
    def is_zero_degree_range(self) -> bool:
        return not (0 <= self.q <= self.N)

    @property
    def kind(self) -> str:
        for v in self.components.values():
            return "grid" if isinstance(v, GridScalar) else "callable"
        return "empty"

    @classmethod
    def from_callable(cls, N, q, components=None):
        components = dict(components or {})
        full = {}
        for key in enumerate_ordered(q, N):
            c = components.get(key, components.get(tuple(key)))
            if c is None:
                c = ScalarField.constant(0.0)
            elif not isinstance(c, ScalarField):
                c = ScalarField(c)
            full[key] = c
        return cls(N, q, full)

    @classmethod
    def from_grid(cls, N, q, components, spacing, origin=None):
        components = {tuple(k): v for k, v in components.items()}
        shape = None
        for v in components.values():
            shape = np.shape(v)
            break
        if shape is None:
            raise ValueError("at least one component array required")
        full = {}
        for key in enumerate_ordered(q, N):
            v = components.get(tuple(key))
            if v is None:
                v = np.zeros(shape)
            full[key] = v if isinstance(v, GridScalar) else GridScalar(v, spacing, origin)
        return cls(N, q, full)

    @classmethod
    def zero(cls, N, q):
        return cls.from_callable(N, q)

    def map_components(self, fn) -> "FieldForm":
        return FieldForm(self.N, self.q, {k: fn(v) for k, v in self.components.items()})

    def __add__(self, other):
        if self.N != other.N or self.q != other.q:
            raise ValueError("degree/dimension mismatch")
        return FieldForm(
            self.N, self.q, {k: self.components[k] + other.components[k] for k in self.components}
        )

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return self.map_components(lambda v: c * v)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def evaluate(form: FieldForm, x) -> dict:
    """Component values of a callable form at a point, keyed by multi-index."""
    if form.kind == "grid":
        raise ValueError("evaluate is for callable forms; read grid components directly")
    return {k: complex(v(x)) for k, v in form.components.items()}


def _zero_like_component(form: FieldForm):
    for v in form.components.values():
        return v.zero_like()
    return ScalarField.constant(0.0)


def _zero_form(N: int, q: int, *templates: FieldForm) -> FieldForm:
    """Zero form of the requested degree, matching the templates' representation."""
    if not 0 <= q <= N:
        return FieldForm(N, q, {})
    proto = None
    for t in templates:
        for v in t.components.values():
            proto = v
            break
        if proto is not None:
            break
    if proto is None:
        return FieldForm.zero(N, q)
    return FieldForm(N, q, {k: proto.zero_like() for k in enumerate_ordered(q, N)})


def wedge(a: FieldForm, b: FieldForm) -> FieldForm:
    """Exterior product; antisymmetrized coefficient products with split signs."""
    if a.N != b.N:
        raise ValueError("dimension mismatch")
    N, q = a.N, a.q + b.q
    if a.is_zero_degree_range or b.is_zero_degree_range or q > N:
        return _zero_form(N, min(q, N + 1), a, b)
    kinds = {a.kind, b.kind} - {"empty"}
    if len(kinds) > 1:
        raise ValueError("cannot wedge callable with grid representation")
    out = {}
    for K in enumerate_ordered(q, N):
        acc = None
        for I in itertools.combinations(K, a.q):
            J = tuple(i for i in K if i not in I)
            sign = concat_sign(I, J)
            term = sign * (a.components[MultiIndex(I)] * b.components[MultiIndex(J)])
            acc = term if acc is None else acc + term
        out[K] = acc if acc is not None else _zero_like_component(a)
    return FieldForm(N, q, out)


def hodge(a: FieldForm) -> FieldForm:
    """Hodge star: coefficient I goes to the complementary index with a split sign."""
    N = a.N
    if a.is_zero_degree_range:
        return _zero_form(N, N - a.q, a)
    out = {}
    for I in enumerate_ordered(a.q, N):
        Ic = complement(I, N)
        out[Ic] = concat_sign(I, Ic) * a.components[I]
    return FieldForm(N, N - a.q, out)


def ext_d(a: FieldForm) -> FieldForm:
    """Exterior derivative."""
    N, q = a.N, a.q
    if a.is_zero_degree_range or q + 1 > N:
        return _zero_form(N, q + 1, a)
    out = {}
    for I in enumerate_ordered(q + 1, N):
        acc = None
        for j in I:
            term = insert_sign(j, I.remove(j)) * a.components[I.remove(j)].partial(j)
            acc = term if acc is None else acc + term
        out[I] = acc
    return FieldForm(N, q + 1, out)


def codiff(a: FieldForm) -> FieldForm:
    """Codifferential via its star-derivative-star definition."""
    if a.is_zero_degree_range or a.q - 1 < 0:
        return _zero_form(a.N, a.q - 1, a)
    sign = sign_constants(a.q, a.N).codiff_sign
    return sign * hodge(ext_d(hodge(a)))


def codiff_expansion(a: FieldForm) -> FieldForm:
    """Codifferential by direct expansion over removed labels.

    Kept as an independent route; tests require it to agree with `codiff`.
    """
    N, q = a.N, a.q
    if a.is_zero_degree_range or q - 1 < 0:
        return _zero_form(N, q - 1, a)
    out = {}
    for I in enumerate_ordered(q - 1, N):
        acc = None
        for j in complement(I, N):
            term = insert_sign(j, I) * a.components[I.insert(j)].partial(j)
            acc = term if acc is None else acc + term
        out[I] = acc if acc is not None else _zero_like_component(a)
    return FieldForm(N, q - 1, out)


@dataclass
class SmoothMap:
    """A smooth map with a user-supplied Jacobian.

    `jacobian(x)[i, j]` is the partial of component j+1 along source axis i+1,
    so rows index source axes.  `inverse` is optional and only required by the
    material transformations.
    """

    fn: Callable
    jacobian: Callable
    source_dim: int
    target_dim: int
    inverse: Optional["SmoothMap"] = None

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def jac(self, x):
        J = np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)
        if J.shape != (self.source_dim, self.target_dim):
            raise ValueError(
                f"jacobian shape {J.shape}, expected {(self.source_dim, self.target_dim)}"
            )
        return J

    @classmethod
    def affine(cls, A, b=None):
        A = np.asarray(A, dtype=float)
        t, s = A.shape
        b = np.zeros(t) if b is None else np.asarray(b, dtype=float)
        fwd = cls(
            fn=lambda x, A=A, b=b: A @ x + b,
            jacobian=lambda x, A=A: A.T.copy(),
            source_dim=s,
            target_dim=t,
        )
        if t == s and abs(np.linalg.det(A)) > 0:
            Ai = np.linalg.inv(A)
            bi = -Ai @ b
            back = cls(
                fn=lambda y, Ai=Ai, bi=bi: Ai @ y + bi,
                jacobian=lambda y, Ai=Ai: Ai.T.copy(),
                source_dim=t,
                target_dim=s,
            )
            fwd.inverse = back
            back.inverse = fwd
        return fwd


def pullback(tau: SmoothMap, a: FieldForm) -> FieldForm:
    """Pullback along tau; coefficients contract Jacobian minors against the form.

    The result is a callable form on the source box.  Its coefficients carry no
    analytic derivative rule (that would need second derivatives of the map),
    so downstream derivatives use the central-difference fallback.
    """
    if a.kind == "grid":
        raise ValueError("pullback needs the callable representation")
    if a.N != tau.target_dim:
        raise ValueError("form dimension does not match map target")
    N_src, q = tau.source_dim, a.q
    if a.is_zero_degree_range or q > N_src:
        return FieldForm.zero(N_src, min(q, N_src + 1)) if 0 <= q <= N_src else FieldForm(N_src, min(q, N_src + 1), {})
    targets = enumerate_ordered(q, a.N)
    out = {}
    for I in enumerate_ordered(q, N_src):
        rows = [i - 1 for i in I]

        def coeff(v, rows=tuple(rows), a=a, targets=targets, tau=tau):
            J = tau.jac(v)
            y = tau(v)
            total = 0.0 + 0.0j
            for K in targets:
                cols = [k - 1 for k in K]
                minor = np.linalg.det(J[np.ix_(rows, cols)]) if rows else 1.0
                if minor != 0.0:
                    total += minor * a.components[K](y)
            return total

        out[I] = ScalarField(coeff)
    return FieldForm(N_src, q, out)


_PROBE_OFFSETS = (0.0, 0.37, -0.29)


def _require_orientation(tau: SmoothMap):
    if tau.source_dim != tau.target_dim:
        raise ValueError("material transformations need a square map")
    if tau.inverse is None:
        raise ValueError("material transformations need an invertible map")
    for t in _PROBE_OFFSETS:
        x = np.full(tau.source_dim, t)
        if np.linalg.det(tau.jac(x)) <= 0:
            raise ValueError("orientation-reversing maps are not supported")


def transform_eps(tau: SmoothMap, a: FieldForm) -> FieldForm:
    """Material transformation acting through the inverse pullback first."""
    _require_orientation(tau)
    kappa = sign_constants(a.q, a.N).double_hodge
    return kappa * hodge(pullback(tau, hodge(pullback(tau.inverse, a))))


def transform_mu(tau: SmoothMap, a: FieldForm) -> FieldForm:
    """Material transformation acting through the hodge star first."""
    _require_orientation(tau)
    kappa = sign_constants(a.q, a.N).double_hodge
    return kappa * pullback(tau, hodge(pullback(tau.inverse, hodge(a))))


# -- serialization -----------------------------------------------------------


def _key_str(index) -> str:
    return ",".join(str(i) for i in index)


def _key_parse(s: str):
    return MultiIndex(int(p) for p in s.split(",") if p)


def grid_form_to_json(form: FieldForm) -> str:
    """Serialize a grid form: dimensions, grid layout, nested re/im arrays."""
    if form.kind != "grid":
        raise ValueError("only grid forms serialize")
    some = next(iter(form.components.values()))
    doc = {
        "N": form.N,
        "q": form.q,
        "grid": {
            "shape": list(some.grid.shape),
            "spacing": list(some.grid.spacing),
            "origin": list(some.grid.origin),
        },
        "components": {
            _key_str(k): {
                "re": v.values.real.tolist(),
                "im": v.values.imag.tolist(),
            }
            for k, v in form.components.items()
        },
    }
    return json.dumps(doc, sort_keys=True)


def grid_form_from_json(text: str) -> FieldForm:
    doc = json.loads(text)
    spacing = tuple(doc["grid"]["spacing"])
    origin = tuple(doc["grid"]["origin"])
    components = {}
    for key, payload in doc["components"].items():
        arr = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(
            payload["im"], dtype=float
        )
        components[_key_parse(key)] = GridScalar(arr, spacing, origin)
    return FieldForm.from_grid(doc["N"], doc["q"], components, spacing, origin)
