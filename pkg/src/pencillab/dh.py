"""Equivalence to dissipative Hamiltonian pencils and explicit realizations.

A square pencil admits a dH form lambda*E - (J - R)Q exactly when its
Kronecker data satisfies four conditions on the spectrum, the index and
the minimal indices.  Two variants exist: a general Hermitian PSD product
Q*E, and the restricted variant with Q = I.  `check_dh_equivalence`
decides the conditions on a computed structure; `realize_dh` assembles a
concrete (E, J, R, Q) block by block from the same data.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import DhPencil
from .errors import PreconditionError
from .kcf import KroneckerStructure

GENERAL_Q = "general_q"
Q_IDENTITY = "q_identity"

_VARIANTS = (GENERAL_Q, Q_IDENTITY)

DEFAULT_AXIS_TOLERANCE = 1e-8


@dataclass(frozen=True)
class DhVerdict:
    """Outcome of the admissibility conditions for one variant."""

    variant: str
    holds: bool
    violated_conditions: tuple
    witness: object = None

    def __post_init__(self):
        object.__setattr__(
            self, "violated_conditions", tuple(self.violated_conditions)
        )
        if self.holds != (not self.violated_conditions):
            raise PreconditionError(
                "holds flag inconsistent with the violation list"
            )


def _classify(lam: complex, tol: float) -> str:
    # zero and imaginary are both inside the closed left half plane
    if abs(lam) <= tol:
        return "zero"
    if abs(lam.real) <= tol * (1.0 + abs(lam)):
        return "imaginary"
    return "lhp" if lam.real < 0.0 else "rhp"


def _require_square(ks: KroneckerStructure):
    if ks.rows != ks.cols:
        raise PreconditionError(
            f"dH equivalence is defined for square pencils, got {ks.rows}x{ks.cols}"
        )


def check_dh_equivalence(
    ks: KroneckerStructure,
    variant: str = GENERAL_Q,
    axis_tolerance: float = DEFAULT_AXIS_TOLERANCE,
) -> DhVerdict:
    """Test the four admissibility conditions on a Kronecker structure.

    general_q requires: spectrum in the closed left half plane, nonzero
    imaginary eigenvalues semisimple, partial multiplicities at zero of
    size at most two, index at most two, left minimal indices all zero
    and right minimal indices at most one.  q_identity tightens this to
    semisimple eigenvalues everywhere on the axis (zero included) and
    all minimal indices zero.
    """
    if variant not in _VARIANTS:
        raise PreconditionError(f"unknown variant {variant!r}")
    _require_square(ks)
    violations = []
    witness = None

    def mark(tag, datum):
        nonlocal witness
        if tag not in violations:
            violations.append(tag)
        if witness is None:
            witness = datum

    for lam, mults in ks.finite_eigenstructure:
        kind = _classify(lam, axis_tolerance)
        if kind == "rhp":
            mark("spectrum_lhp", lam)
        elif kind == "imaginary":
            if any(m != 1 for m in mults):
                mark("imaginary_semisimple", lam)
        elif kind == "zero":
            if variant == Q_IDENTITY:
                if any(m != 1 for m in mults):
                    mark("imaginary_semisimple", lam)
            elif any(m > 2 for m in mults):
                mark("zero_multiplicity", lam)
    if ks.index > 2:
        mark("index_bound", ks.index)
    right_cap = 1 if variant == GENERAL_Q else 0
    if any(e != 0 for e in ks.left_minimal_indices):
        mark("minimal_indices", ("left", max(ks.left_minimal_indices)))
    if any(e > right_cap for e in ks.right_minimal_indices):
        mark("minimal_indices", ("right", max(ks.right_minimal_indices)))
    return DhVerdict(
        variant=variant,
        holds=not violations,
        violated_conditions=tuple(violations),
        witness=witness,
    )


def _shift(n: int) -> np.ndarray:
    return np.eye(n, k=1)


def _block_lhp_complex(lam: complex, size: int):
    # Jordan block at lam with superdiagonal alpha = Re(lam) < 0; splitting
    # M into skew and Hermitian parts keeps R positive definite.
    alpha = lam.real
    n_mat = _shift(size)
    m = lam * np.eye(size) + alpha * n_mat
    j = (m - m.conj().T) / 2.0
    r = -(m + m.conj().T) / 2.0
    return np.eye(size), j, r, np.eye(size)


def _block_lhp_real_pair(alpha: float, beta: float, size: int):
    # real form of a conjugate pair: 2x2 rotation blocks on the diagonal,
    # alpha*I2 couplings above
    lam2 = np.array([[alpha, beta], [-beta, alpha]])
    m = np.kron(np.eye(size), lam2) + np.kron(_shift(size), alpha * np.eye(2))
    j = (m - m.T) / 2.0
    r = -(m + m.T) / 2.0
    dim = 2 * size
    return np.eye(dim), j, r, np.eye(dim)


def _block_imag_complex(beta: float):
    one = np.eye(1)
    return one, 1j * beta * one, 0.0 * one, one


def _block_imag_real_pair(beta: float):
    j = np.array([[0.0, beta], [-beta, 0.0]])
    return np.eye(2), j, np.zeros((2, 2)), np.eye(2)


def _block_zero_simple():
    one = np.eye(1)
    zero = np.zeros((1, 1))
    return one, zero, zero, one


def _block_zero_double():
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    q = np.diag([0.0, 1.0])
    return np.eye(2), j, np.zeros((2, 2)), q


def _block_inf_simple():
    one = np.eye(1)
    zero = np.zeros((1, 1))
    return zero, zero, one, one


def _block_inf_double():
    e = np.diag([0.0, 1.0])
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return e, j, np.zeros((2, 2)), np.eye(2)


def _block_pair_00():
    zero = np.zeros((1, 1))
    return zero, zero, zero, np.eye(1)


def _block_pair_01():
    e = np.diag([1.0, 0.0])
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    q = np.diag([0.0, 1.0])
    return e, j, np.zeros((2, 2)), q


def _is_self_conjugate(finite, tol: float) -> bool:
    entries = list(finite)
    used = [False] * len(entries)
    for i, (lam, mults) in enumerate(entries):
        if used[i]:
            continue
        if abs(lam.imag) <= tol * (1.0 + abs(lam)):
            used[i] = True
            continue
        target = lam.conjugate()
        found = False
        for k in range(len(entries)):
            if used[k] or k == i:
                continue
            mu, other = entries[k]
            if other == mults and abs(mu - target) <= tol * (1.0 + abs(lam)):
                used[i] = used[k] = True
                found = True
                break
        if not found:
            return False
    return True


def realize_dh(
    ks: KroneckerStructure,
    variant: str = GENERAL_Q,
    axis_tolerance: float = DEFAULT_AXIS_TOLERANCE,
) -> DhPencil:
    """Assemble a dH pencil whose Kronecker structure equals `ks`.

    Blocks follow the constructive proof case by case and are stacked in
    a fixed order: strict left-half-plane eigenvalues, imaginary ones
    (zero included), infinite blocks, then singular pairs.  When the
    eigenvalue data is closed under conjugation the output is real.
    """
    verdict = check_dh_equivalence(ks, variant, axis_tolerance)
    if not verdict.holds:
        raise PreconditionError(
            "structure does not satisfy the dH conditions for "
            f"{variant}: {', '.join(verdict.violated_conditions)}"
        )
    tol = axis_tolerance
    real_mode = _is_self_conjugate(ks.finite_eigenstructure, tol)

    lhp_entries = []
    imag_entries = []
    for lam, mults in ks.finite_eigenstructure:
        kind = _classify(lam, tol)
        if kind == "lhp":
            lhp_entries.append((lam, mults))
        else:
            imag_entries.append((lam, mults, kind))

    blocks = []

    if real_mode:
        lhp_entries.sort(key=lambda t: (t[0].real, abs(t[0].imag), t[0].imag))
        consumed = set()
        for i, (lam, mults) in enumerate(lhp_entries):
            if i in consumed:
                continue
            if abs(lam.imag) <= tol * (1.0 + abs(lam)):
                for size in mults:
                    blocks.append(_block_lhp_complex(complex(lam.real), size))
                consumed.add(i)
                continue
            partner = None
            for k in range(i + 1, len(lhp_entries)):
                if k in consumed:
                    continue
                mu, other = lhp_entries[k]
                if other == mults and abs(mu - lam.conjugate()) <= tol * (1.0 + abs(lam)):
                    partner = k
                    break
            if partner is None:
                raise PreconditionError(
                    f"eigenvalue {lam} lacks a conjugate partner for a real realization"
                )
            consumed.add(i)
            consumed.add(partner)
            for size in mults:
                blocks.append(
                    _block_lhp_real_pair(lam.real, abs(lam.imag), size)
                )
        imag_entries.sort(key=lambda t: (abs(t[0].imag), t[0].imag))
        consumed = set()
        for i, (lam, mults, kind) in enumerate(imag_entries):
            if i in consumed:
                continue
            if kind == "zero":
                consumed.add(i)
                for size in mults:
                    blocks.append(
                        _block_zero_simple() if size == 1 else _block_zero_double()
                    )
                continue
            partner = None
            for k in range(i + 1, len(imag_entries)):
                if k in consumed:
                    continue
                mu, other, _ = imag_entries[k]
                if other == mults and abs(mu - lam.conjugate()) <= tol * (1.0 + abs(lam)):
                    partner = k
                    break
            if partner is None:
                raise PreconditionError(
                    f"eigenvalue {lam} lacks a conjugate partner for a real realization"
                )
            consumed.add(i)
            consumed.add(partner)
            for _ in mults:
                blocks.append(_block_imag_real_pair(abs(lam.imag)))
    else:
        lhp_entries.sort(key=lambda t: (t[0].real, t[0].imag))
        for lam, mults in lhp_entries:
            for size in mults:
                blocks.append(_block_lhp_complex(lam, size))
        imag_entries.sort(key=lambda t: (t[0].imag, t[0].real))
        for lam, mults, kind in imag_entries:
            if kind == "zero":
                for size in mults:
                    blocks.append(
                        _block_zero_simple() if size == 1 else _block_zero_double()
                    )
            else:
                for _ in mults:
                    blocks.append(_block_imag_complex(lam.imag))

    for size in sorted(ks.infinite_block_sizes):
        blocks.append(_block_inf_simple() if size == 1 else _block_inf_double())

    for eps in sorted(ks.right_minimal_indices):
        blocks.append(_block_pair_00() if eps == 0 else _block_pair_01())

    if not blocks:
        empty = np.zeros((0, 0))
        blocks.append((empty, empty, empty, empty))

    e = scipy.linalg.block_diag(*(b[0] for b in blocks))
    j = scipy.linalg.block_diag(*(b[1] for b in blocks))
    r = scipy.linalg.block_diag(*(b[2] for b in blocks))
    q = scipy.linalg.block_diag(*(b[3] for b in blocks))
    return DhPencil(e=e, j=j, r=r, q=q)
