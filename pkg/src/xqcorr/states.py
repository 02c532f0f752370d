"""State representations and conversions for two-qubit X states.

BASIS CONVENTION
----------------
All 4x4 matrices are written in the product basis

    B = {|11>, |10>, |01>, |00>}

with the *excited* single-qubit state |1> first, i.e. index 0 is |11> and
index 3 is |00>.  Most quantum libraries order |00> first; matrices taken
from elsewhere usually need their axes reversed before being used here.
sigma_3 = diag(1, -1) so that sigma_3 |1> = +|1>.

Three encodings are supported and interconvertible:

* ``DensityMatrix4`` - dense complex matrix, the universal form;
* ``XStateParams``   - the eight real parameters of an X-shaped matrix
  (four diagonal entries, two coherence magnitudes, two phases);
* ``BlochForm``      - local Bloch vectors x, y and the 3x3 correlation
  tensor T of the Pauli expansion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, NotAnXStateError
from .tolerances import DEFAULT_TOLERANCES, Tolerances

TWO_PI = 2.0 * math.pi

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)
PAULI = (SIGMA1, SIGMA2, SIGMA3)
for _m in (*PAULI, ID2):
    _m.setflags(write=False)

# Index pairs (0-based) that must vanish for the X pattern.
_NON_X_ENTRIES = (
    (0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2),
)


def _frozen_array(values, shape):
    arr = np.array(values, dtype=np.float64).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError("non-finite entries in %r" % (values,))
    arr.setflags(write=False)
    return arr


def hs_norm_sq(delta):
    """Squared Hilbert-Schmidt norm Tr(delta^2) of a Hermitian matrix."""
    delta = np.asarray(delta)
    return float(np.sum(delta.real**2 + delta.imag**2))


@dataclass(frozen=True)
class DensityMatrix4:
    """Dense 4x4 density matrix in the basis {|11>,|10>,|01>,|00>}.

    Construction only checks shape/finiteness; call :meth:`validate` (or
    build through :meth:`from_matrix`) to enforce Hermiticity, unit trace
    and positivity.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise InvalidStateError("expected a 4x4 matrix, got %r" % (m.shape,))
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise InvalidStateError("non-finite matrix entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, tols: Tolerances = DEFAULT_TOLERANCES,
                    require_psd: bool = True) -> "DensityMatrix4":
        rho = cls(matrix)
        rho.validate(tols, require_psd=require_psd)
        return rho

    def validate(self, tols: Tolerances = DEFAULT_TOLERANCES,
                 require_psd: bool = True) -> "DensityMatrix4":
        m = self.matrix
        problems = []
        herm = np.max(np.abs(m - m.conj().T))
        if herm > tols.hermitian:
            problems.append("not Hermitian (max deviation %.3e)" % herm)
        tr = abs(m.trace() - 1.0)
        if tr > tols.trace:
            problems.append("trace differs from 1 by %.3e" % tr)
        if require_psd and not problems:
            lo = float(np.linalg.eigvalsh(m).min())
            if lo < -tols.psd_floor:
                problems.append("negative eigenvalue %.3e" % lo)
        if problems:
            raise InvalidStateError(
                "invalid density matrix: " + "; ".join(problems), problems
            )
        return self

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return hs_norm_sq(self.matrix)


@dataclass(frozen=True)
class XStateParams:
    """The eight real parameters of an X-shaped density matrix.

    ``rho14``/``rho23`` are the *magnitudes* of the two coherences (always
    nonnegative); ``gamma14``/``gamma23`` their phases, normalized into
    [0, 2*pi) on construction.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: float
    rho23: float
    gamma14: float = 0.0
    gamma23: float = 0.0

    def __post_init__(self):
        vals = [self.rho11, self.rho22, self.rho33, self.rho44,
                self.rho14, self.rho23, self.gamma14, self.gamma23]
        if not all(math.isfinite(v) for v in vals):
            raise InvalidStateError("non-finite X-state parameter")
        for name in ("gamma14", "gamma23"):
            g = math.fmod(getattr(self, name), TWO_PI)
            if g < 0.0:
                g += TWO_PI
            object.__setattr__(self, name, g)
        self._check(DEFAULT_TOLERANCES)

    def _check(self, tols: Tolerances):
        problems = []
        diag = (self.rho11, self.rho22, self.rho33, self.rho44)
        if any(d < -tols.prob_floor for d in diag):
            problems.append("negative diagonal entry")
        s = abs(sum(diag) - 1.0)
        if s > tols.trace:
            problems.append("diagonal sums to 1 off by %.3e" % s)
        if self.rho14 < 0.0 or self.rho23 < 0.0:
            problems.append("coherence magnitudes must be nonnegative")
        if self.rho14**2 > self.rho11 * self.rho44 + tols.block_positivity:
            problems.append("outer block not positive: rho14^2 > rho11*rho44")
        if self.rho23**2 > self.rho22 * self.rho33 + tols.block_positivity:
            problems.append("inner block not positive: rho23^2 > rho22*rho33")
        if problems:
            raise InvalidStateError(
                "invalid X-state parameters: " + "; ".join(problems), problems
            )

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.rho11, self.rho22, self.rho33, self.rho44,
             self.rho14, self.rho23, self.gamma14, self.gamma23]
        )

    def to_matrix(self) -> DensityMatrix4:
        m = np.zeros((4, 4), dtype=np.complex128)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = (
            self.rho11, self.rho22, self.rho33, self.rho44,
        )
        c14 = self.rho14 * np.exp(1j * self.gamma14)
        c23 = self.rho23 * np.exp(1j * self.gamma23)
        m[0, 3] = c14
        m[3, 0] = c14.conjugate()
        m[1, 2] = c23
        m[2, 1] = c23.conjugate()
        return DensityMatrix4(m)


@dataclass(frozen=True)
class BlochForm:
    """Bloch decomposition: local vectors x, y and correlation tensor T."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x, (3,)))
        object.__setattr__(self, "y", _frozen_array(self.y, (3,)))
        object.__setattr__(self, "T", _frozen_array(self.T, (3, 3)))
        tol = DEFAULT_TOLERANCES.bloch_bound
        if (np.linalg.norm(self.x) > 1.0 + tol
                or np.linalg.norm(self.y) > 1.0 + tol):
            raise InvalidStateError("Bloch vector norm exceeds 1")
        if np.max(np.abs(self.T)) > 1.0 + tol:
            raise InvalidStateError("correlation tensor entry exceeds 1")


def bloch_decompose(rho, tols: Tolerances = DEFAULT_TOLERANCES) -> BlochForm:
    """Extract x_i, y_i, T_ij as Pauli traces of a valid density matrix."""
    if not isinstance(rho, DensityMatrix4):
        rho = DensityMatrix4(rho)
    rho.validate(tols)
    m = rho.matrix
    x = np.empty(3)
    y = np.empty(3)
    T = np.empty((3, 3))
    for i, si in enumerate(PAULI):
        x[i] = np.trace(m @ np.kron(si, ID2)).real
        y[i] = np.trace(m @ np.kron(ID2, si)).real
        for j, sj in enumerate(PAULI):
            T[i, j] = np.trace(m @ np.kron(si, sj)).real
    return BlochForm(x, y, T)


def bloch_compose(b: BlochForm) -> DensityMatrix4:
    """Assemble the Pauli expansion.

    The result is Hermitian with unit trace by construction; positivity is
    *not* guaranteed and is checked separately via ``validate``.
    """
    m = np.kron(ID2, ID2).astype(np.complex128)
    for i, si in enumerate(PAULI):
        m += b.x[i] * np.kron(si, ID2)
        m += b.y[i] * np.kron(ID2, si)
        for j, sj in enumerate(PAULI):
            m += b.T[i, j] * np.kron(si, sj)
    return DensityMatrix4(m / 4.0)


def x_params_to_bloch(p: XStateParams) -> BlochForm:
    """Seven nonzero Bloch components of an X state."""
    c14, s14 = math.cos(p.gamma14), math.sin(p.gamma14)
    c23, s23 = math.cos(p.gamma23), math.sin(p.gamma23)
    x3 = p.rho11 + p.rho22 - p.rho33 - p.rho44
    y3 = p.rho11 - p.rho22 + p.rho33 - p.rho44
    T = np.zeros((3, 3))
    T[0, 0] = 2.0 * c14 * p.rho14 + 2.0 * c23 * p.rho23
    T[0, 1] = -2.0 * s14 * p.rho14 + 2.0 * s23 * p.rho23
    T[1, 0] = -2.0 * s14 * p.rho14 - 2.0 * s23 * p.rho23
    T[1, 1] = -2.0 * c14 * p.rho14 + 2.0 * c23 * p.rho23
    T[2, 2] = p.rho11 - p.rho22 - p.rho33 + p.rho44
    return BlochForm((0.0, 0.0, x3), (0.0, 0.0, y3), T)


def matrix_to_x_params(rho, tols: Tolerances = DEFAULT_TOLERANCES) -> XStateParams:
    """Recognize the X pattern of a dense matrix and extract its parameters.

    Raises :class:`NotAnXStateError` listing the offending entries when any
    of the eight non-X entries exceeds ``tols.x_pattern`` in magnitude.
    The phase of a vanishing coherence is defined as 0.
    """
    if not isinstance(rho, DensityMatrix4):
        rho = DensityMatrix4(rho)
    rho.validate(tols)
    m = rho.matrix
    bad = [(i, j) for i, j in _NON_X_ENTRIES if abs(m[i, j]) > tols.x_pattern]
    if bad:
        raise NotAnXStateError(
            "matrix has support outside the X pattern at entries %s" % (bad,),
            bad,
        )

    def mag_phase(z):
        mag = abs(z)
        if mag <= tols.x_pattern:
            return mag, 0.0
        return mag, math.atan2(z.imag, z.real) % TWO_PI

    r14, g14 = mag_phase(m[0, 3])
    r23, g23 = mag_phase(m[1, 2])
    return XStateParams(
        m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
        r14, r23, g14, g23,
    )


# ---------------------------------------------------------------------------
# JSON state files
# ---------------------------------------------------------------------------

_X_KEYS_REQUIRED = ("rho11", "rho22", "rho33", "rho44", "rho14", "rho23")
_X_KEYS_OPTIONAL = ("gamma14", "gamma23")


def _reject_constants(token):
    raise ValueError("non-finite number %r not allowed in state files" % token)


def parse_state_json(text: str):
    """Parse a JSON state file into XStateParams or DensityMatrix4.

    Two forms are accepted::

        {"kind": "x", "rho11": ..., ..., "gamma14": ..., "gamma23": ...}
        {"kind": "dense", "re": [[...4x4...]], "im": [[...4x4...]]}

    NaN/Infinity tokens are rejected.  Raises ValueError on malformed input
    and InvalidStateError on unphysical states.
    """
    doc = json.loads(text, parse_constant=_reject_constants)
    if not isinstance(doc, dict):
        raise ValueError("state file must contain a JSON object")
    kind = doc.get("kind")
    if kind == "x":
        known = set(_X_KEYS_REQUIRED) | set(_X_KEYS_OPTIONAL) | {"kind"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError("unknown keys in x-state file: %s" % unknown)
        missing = [k for k in _X_KEYS_REQUIRED if k not in doc]
        if missing:
            raise ValueError("missing keys in x-state file: %s" % missing)
        vals = {k: doc[k] for k in _X_KEYS_REQUIRED}
        vals.update({k: doc.get(k, 0.0) for k in _X_KEYS_OPTIONAL})
        for k, v in vals.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValueError("field %r must be a number" % k)
            if not math.isfinite(v):
                raise ValueError("field %r is not finite" % k)
        return XStateParams(**vals)
    if kind == "dense":
        unknown = sorted(set(doc) - {"kind", "re", "im"})
        if unknown:
            raise ValueError("unknown keys in dense-state file: %s" % unknown)
        try:
            re = np.array(doc["re"], dtype=np.float64)
            im = np.array(doc["im"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError("dense state needs numeric 're' and 'im' 4x4 "
                             "arrays: %s" % exc) from exc
        if re.shape != (4, 4) or im.shape != (4, 4):
            raise ValueError("'re' and 'im' must both be 4x4 arrays")
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise ValueError("dense state entries must be finite")
        return DensityMatrix4(re + 1j * im)
    raise ValueError("state file 'kind' must be 'x' or 'dense', got %r" % kind)


def load_state_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_state_json(fh.read())


def state_to_json_dict(state) -> dict:
    if isinstance(state, XStateParams):
        return {
            "kind": "x",
            "rho11": state.rho11, "rho22": state.rho22,
            "rho33": state.rho33, "rho44": state.rho44,
            "rho14": state.rho14, "rho23": state.rho23,
            "gamma14": state.gamma14, "gamma23": state.gamma23,
        }
    if isinstance(state, DensityMatrix4):
        return {
            "kind": "dense",
            "re": state.matrix.real.tolist(),
            "im": state.matrix.imag.tolist(),
        }
    raise TypeError("cannot serialize %r" % type(state))
