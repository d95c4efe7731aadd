"""Isometric Lie algebra actions on Euclidean space.

A :class:`Representation` is a list of skew-symmetric generator matrices
``E_a`` acting on ``R^N`` with the standard inner product, so every orbit of
the corresponding group lies on a round sphere centred at the origin.
Builders always return generators in coordinates where the invariant inner
product is the dot product.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SKEW_TOL = 1e-12
CLOSURE_TOL = 1e-9
INDEPENDENCE_TOL = 1e-9


class DomainError(ValueError):
    """Input outside the domain of an operation."""


@dataclass(frozen=True)
class Representation:
    name: str
    generators: np.ndarray  # shape (g_dim, N, N)

    def __post_init__(self):
        gens = np.array(self.generators, dtype=float)
        if gens.ndim != 3 or gens.shape[1] != gens.shape[2] or gens.shape[0] == 0:
            raise DomainError(
                f"generators must have shape (g_dim, N, N), got {gens.shape}"
            )
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def ambient_dim(self) -> int:
        return self.generators.shape[1]

    @property
    def g_dim(self) -> int:
        return self.generators.shape[0]

    def scaled(self, c: float) -> "Representation":
        """Same action with every generator multiplied by ``c``."""
        return Representation(f"{self.name}*{c:g}", c * self.generators)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "generators": [g.tolist() for g in self.generators],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Representation":
        try:
            name = str(data["name"])
            n = int(data["ambient_dim"])
            gens = np.array(data["generators"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed representation document: {exc}") from exc
        if gens.ndim != 3 or gens.shape[1:] != (n, n):
            raise DomainError(
                f"generators must be {n}x{n} matrices, got array of shape {gens.shape}"
            )
        return cls(name, gens)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def load_representation(path: str | Path) -> Representation:
    with open(path) as fh:
        return Representation.from_dict(json.load(fh))


def save_representation(rep: Representation, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(rep.to_dict(), fh, indent=1)


@dataclass
class ValidationReport:
    passed: bool
    skew_residual: float
    closure_residual: float
    min_singular_value: float
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "skew_residual": self.skew_residual,
            "closure_residual": self.closure_residual,
            "min_singular_value": self.min_singular_value,
            "failures": list(self.failures),
        }


def validate_representation(rep: Representation) -> ValidationReport:
    """Check skewness, bracket closure and linear independence.

    Never raises on a bad action; the offending checks are listed in
    ``failures`` instead.
    """
    gens = rep.generators
    skew = float(np.max(np.abs(gens + gens.transpose(0, 2, 1))))

    flat = gens.reshape(rep.g_dim, -1).T  # columns are vectorized generators
    sv = np.linalg.svd(flat, compute_uv=False)
    min_sv = float(sv[-1])

    # least-squares residual of every bracket against the generator span
    closure = 0.0
    if rep.g_dim > 1:
        pairs = itertools.combinations(gens, 2)
        brackets = np.array([a @ b - b @ a for a, b in pairs])
        brackets = brackets.reshape(len(brackets), -1).T
        coef, *_ = np.linalg.lstsq(flat, brackets, rcond=None)
        closure = float(np.max(np.linalg.norm(brackets - flat @ coef, axis=0)))

    failures = []
    if not skew <= SKEW_TOL:
        failures.append("skewness")
    if not min_sv > INDEPENDENCE_TOL:
        failures.append("linear-independence")
    if not closure <= CLOSURE_TOL:
        failures.append("bracket-closure")
    return ValidationReport(not failures, skew, closure, min_sv, failures)


def _rotation(n: int, j: int, k: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[j, k] = 1.0
    e[k, j] = -1.0
    return e


def so_basis(n: int) -> list[np.ndarray]:
    """Elementary rotations ``E_jk - E_kj`` (j < k), lexicographic order."""
    return [_rotation(n, j, k) for j, k in itertools.combinations(range(n), 2)]


def build_so_block_rep(dims) -> Representation:
    """SO(n_1+1) x ... x SO(n_p+1) acting blockwise on R^{n+p}."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise DomainError(f"dims must be a nonempty list of positive integers, got {dims}")
    size = sum(d + 1 for d in dims)
    gens = []
    offset = 0
    for d in dims:
        for j, k in itertools.combinations(range(d + 1), 2):
            gens.append(_rotation(size, offset + j, offset + k))
        offset += d + 1
    return Representation("so-block-" + ",".join(map(str, dims)), np.array(gens))


def traceless_symmetric_basis() -> list[np.ndarray]:
    """Orthonormal basis of trace-free symmetric 3x3 matrices under Tr(AB)."""
    s2, s6 = np.sqrt(2.0), np.sqrt(6.0)
    b = [np.zeros((3, 3)) for _ in range(5)]
    b[0][1, 2] = b[0][2, 1] = 1 / s2
    b[1][0, 2] = b[1][2, 0] = 1 / s2
    b[2][0, 1] = b[2][1, 0] = 1 / s2
    b[3][0, 0], b[3][1, 1] = 1 / s2, -1 / s2
    b[4][0, 0] = b[4][1, 1] = 1 / s6
    b[4][2, 2] = -2 / s6
    return b


def sym_to_coords(a: np.ndarray) -> np.ndarray:
    """Coordinates of a trace-free symmetric matrix in :func:`traceless_symmetric_basis`."""
    return np.array([np.trace(b @ a) for b in traceless_symmetric_basis()])


def coords_to_sym(x) -> np.ndarray:
    return sum(c * b for c, b in zip(x, traceless_symmetric_basis()))


def _matrix_of(op, basis, inner) -> np.ndarray:
    return np.array([[inner(bc, op(bb)) for bb in basis] for bc in basis])


def build_so3_conjugation_rep() -> Representation:
    """SO(3) acting on trace-free symmetric 3x3 matrices by conjugation."""
    basis = traceless_symmetric_basis()

    def inner(a, b):
        return np.trace(a @ b)

    gens = [
        _matrix_of(lambda a, xi=xi: xi @ a - a @ xi, basis, inner)
        for xi in so_basis(3)
    ]
    return Representation("so3-conjugation", np.array(gens))


def so5_basis() -> list[np.ndarray]:
    """Orthonormal basis of so(5) under <A,B> = -Tr(AB)/2."""
    return so_basis(5)


def so5_to_coords(a: np.ndarray) -> np.ndarray:
    return np.array([-0.5 * np.trace(b @ a) for b in so5_basis()])


def build_so5_adjoint_rep() -> Representation:
    """Adjoint action of SO(5) on so(5) with <A,B> = -Tr(AB)/2."""
    basis = so5_basis()

    def inner(a, b):
        return -0.5 * np.trace(a @ b)

    gens = [
        _matrix_of(lambda a, xi=xi: xi @ a - a @ xi, basis, inner)
        for xi in basis
    ]
    return Representation("so5-adjoint", np.array(gens))


BUILTIN = {
    "so3-conjugation": build_so3_conjugation_rep,
    "so5-adjoint": build_so5_adjoint_rep,
}
