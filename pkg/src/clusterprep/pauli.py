"""Exact symbolic algebra for sums of Pauli strings on n qubits.

A Pauli string is stored as a pair of integer bitmasks ``(x, z)`` with
qubit q living on bit q, plus a global phase exponent k meaning i**k.
The letter on qubit q is

    (x_q, z_q) = (0,0) -> I    (1,0) -> X    (0,1) -> Z    (1,1) -> Y

and a phase-free string realizes the plain tensor product of those
Hermitian matrices (the i in Y = i X Z belongs to the letter, not to
the stored phase).  Products of two strings are computed exactly: the
result masks are XORs and the phase exponent is integer arithmetic, so
cancellations in commutators are exact rather than approximate.

Basis-state indexing is little-endian: basis state ``|b>`` has qubit q
in ``|1>`` iff bit q of ``b`` is set, and ``|0>`` is the +1 eigenstate
of Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "PauliString",
    "OperatorSum",
    "multiply",
    "commutator_terms",
    "commutator_is_zero",
    "to_dense",
    "string_matrix",
    "operator_matvec",
    "COEFF_CUTOFF",
    "DENSE_QUBIT_LIMIT",
]

# Coefficients with |c| below this are dropped after merging terms; the
# tolerance only absorbs float noise from merging, never model content.
COEFF_CUTOFF = 1e-14

# Dense realizations refuse above this qubit count unless overridden.
DENSE_QUBIT_LIMIT = 12

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliString:
    """A single Pauli string with an overall power-of-i phase."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bitmask exceeds qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        """Build from a letter string, qubit 0 leftmost (e.g. ``"XIZY"``)."""
        x = z = 0
        for q, letter in enumerate(label):
            try:
                bx, bz = _BITS[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(label), x, z, phase)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str], phase: int = 0) -> "PauliString":
        """Build from a ``{qubit: letter}`` mapping, identities elsewhere."""
        x = z = 0
        for q, letter in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit index {q} outside 0..{n_qubits - 1}")
            bx, bz = _BITS[letter]
            if bx == 0 and bz == 0:
                continue
            if (x >> q) & 1 or (z >> q) & 1:
                raise ValueError(f"qubit {q} assigned twice")
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z, phase)

    @property
    def letters(self) -> str:
        return "".join(
            _LETTERS[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n_qubits)
        )

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x >> q) & 1, (self.z >> q) & 1)]

    def phase_value(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    def without_phase(self) -> "PauliString":
        return self if self.phase == 0 else PauliString(self.n_qubits, self.x, self.z)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r}, phase={self.phase})"


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product a*b with the accumulated power-of-i phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    cx = a.x ^ b.x
    cz = a.z ^ b.z
    # i-exponent bookkeeping for (i^xz X^x Z^z) factors: each operand
    # contributes its own Y count, commuting Z^za past X^xb gives a sign,
    # and the product's own Y count is removed again.
    k = (
        a.phase
        + b.phase
        + (a.x & a.z).bit_count()
        + (b.x & b.z).bit_count()
        + 2 * (a.z & b.x).bit_count()
        - (cx & cz).bit_count()
    )
    return PauliString(a.n_qubits, cx, cz, k % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the strings commute (symplectic form is even)."""
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


class OperatorSum:
    """A real-coefficient sum of phase-free Pauli strings, kept canonical.

    Canonical form: term strings carry phase 0, terms are merged, sorted
    lexicographically by (z-mask, x-mask), and coefficients with
    ``|c| < COEFF_CUTOFF`` are dropped.  Real coefficients on phase-free
    strings guarantee a Hermitian dense realization.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: Iterable[tuple[float, PauliString]] = ()):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        acc: dict[tuple[int, int], float] = {}
        for coeff, string in terms:
            if string.n_qubits != n_qubits:
                raise ValueError("qubit count mismatch in term")
            c = complex(coeff) * string.phase_value()
            if abs(c.imag) > COEFF_CUTOFF * max(1.0, abs(c.real)):
                raise ValueError("term folds to a non-real coefficient")
            key = (string.z, string.x)
            acc[key] = acc.get(key, 0.0) + c.real
        canon = []
        for (z, x) in sorted(acc):
            c = acc[(z, x)]
            if abs(c) >= COEFF_CUTOFF:
                canon.append((c, PauliString(n_qubits, x, z)))
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "terms", tuple(canon))

    def __setattr__(self, name, value):
        raise AttributeError("OperatorSum is immutable")

    @classmethod
    def zero(cls, n_qubits: int) -> "OperatorSum":
        return cls(n_qubits)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def coefficient(self, string: PauliString) -> float:
        for c, s in self.terms:
            if s.x == string.x and s.z == string.z:
                return c
        return 0.0

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        return OperatorSum(self.n_qubits, list(self.terms) + list(other.terms))

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "OperatorSum":
        return OperatorSum(self.n_qubits, [(scalar * c, s) for c, s in self.terms])

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and all(
            ca == cb and sa.x == sb.x and sa.z == sb.z
            for (ca, sa), (cb, sb) in zip(self.terms, other.terms)
        ) and len(self.terms) == len(other.terms)

    def __hash__(self):
        return hash((self.n_qubits, tuple((c, s.x, s.z) for c, s in self.terms)))

    def __repr__(self) -> str:
        body = " ".join(f"{c:+g}*{s.letters}" for c, s in self.terms[:4])
        more = "" if self.n_terms <= 4 else f" ... ({self.n_terms} terms)"
        return f"OperatorSum({self.n_qubits} qubits: {body}{more})"


def commutator_terms(a: OperatorSum, b: OperatorSum) -> tuple[tuple[complex, PauliString], ...]:
    """Symbolic commutator [a, b] as merged (complex coeff, string) terms.

    Coefficients that must cancel do so exactly (identical float products
    subtracted), so a vanishing commutator comes out with no terms at all.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    acc: dict[tuple[int, int], complex] = {}
    for ca, sa in a.terms:
        for cb, sb in b.terms:
            ab = multiply(sa, sb)
            ba = multiply(sb, sa)
            # same masks either way; phases differ by 2 iff they anticommute
            coeff = ca * cb * (ab.phase_value() - ba.phase_value())
            if coeff == 0:
                continue
            key = (ab.z, ab.x)
            acc[key] = acc.get(key, 0.0) + coeff
    out = []
    for (z, x) in sorted(acc):
        c = acc[(z, x)]
        if abs(c) >= COEFF_CUTOFF:
            out.append((c, PauliString(a.n_qubits, x, z)))
    return tuple(out)


def commutator_is_zero(a: OperatorSum, b: OperatorSum) -> tuple[bool, float]:
    """Whether [a, b] vanishes exactly, plus the residual 1-norm.

    Returns ``(flag, residual)`` where residual is the sum of absolute
    values of the surviving commutator coefficients (0.0 for an exact
    symbolic zero).
    """
    terms = commutator_terms(a, b)
    residual = float(sum(abs(c) for c, _ in terms))
    return residual == 0.0, residual


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit-parity (popcount mod 2) of each entry of an integer array."""
    return np.bitwise_count(values).astype(np.int64) & 1


def string_matrix(p: PauliString) -> np.ndarray:
    """Dense complex matrix of a single Pauli string, phase included."""
    dim = 1 << p.n_qubits
    cols = np.arange(dim, dtype=np.int64)
    rows = cols ^ p.x
    vals = p.phase_value() * (1j) ** ((p.x & p.z).bit_count())
    signs = 1.0 - 2.0 * _parity(cols & p.z)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[rows, cols] = vals * signs
    return mat


def to_dense(op: OperatorSum, max_qubits: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Dense Hermitian matrix of an operator sum.

    Refuses when ``op.n_qubits > max_qubits``; the result is real float64
    when every term realizes a real matrix (even number of Y letters),
    complex128 otherwise.
    """
    if op.n_qubits > max_qubits:
        raise ValueError(
            f"dense realization of {op.n_qubits} qubits exceeds limit {max_qubits}"
        )
    dim = 1 << op.n_qubits
    cols = np.arange(dim, dtype=np.int64)
    real = all((s.x & s.z).bit_count() % 2 == 0 for _, s in op.terms)
    mat = np.zeros((dim, dim), dtype=np.float64 if real else complex)
    for coeff, s in op.terms:
        rows = cols ^ s.x
        y_count = (s.x & s.z).bit_count()
        factor = coeff * (1j) ** y_count
        if real:
            factor = factor.real
        signs = 1.0 - 2.0 * _parity(cols & s.z)
        mat[rows, cols] += factor * signs
    return mat


def operator_matvec(op: OperatorSum) -> Callable[[np.ndarray], np.ndarray]:
    """Matrix-free application of an operator sum to state vectors.

    The returned callable accepts a vector of length 2**n (or a matrix of
    column vectors) and applies the operator without densifying it.
    """
    dim = 1 << op.n_qubits
    cols = np.arange(dim, dtype=np.int64)
    prepared = []
    real = True
    for coeff, s in op.terms:
        rows = cols ^ s.x
        factor = coeff * (1j) ** ((s.x & s.z).bit_count())
        if factor.imag != 0.0:
            real = False
        vals = factor * (1.0 - 2.0 * _parity(cols & s.z))
        prepared.append((rows, vals))
    if real:
        prepared = [(rows, vals.real) for rows, vals in prepared]

    def matvec(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape[0] != dim:
            raise ValueError("vector length does not match qubit count")
        out = np.zeros(v.shape, dtype=np.result_type(v.dtype, prepared[0][1].dtype if prepared else float))
        for rows, vals in prepared:
            if v.ndim == 1:
                out[rows] += vals * v
            else:
                out[rows] += vals[:, None] * v
        return out

    return matvec
