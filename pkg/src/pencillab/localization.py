"""Left-half-plane certificates and spectral localization.

The key inequality for a pencil lambda*(J1+R1)+(J2+R2) is

    -(x*R1x)(x*R2x) + (x*J1x)(x*J2x) <= 0   for all x,

abbreviated here as the quadratic-form condition.  Three provers give
sufficient criteria of increasing sharpness (norms, Kronecker product,
spectral structure of lambda*J1+J2); a randomized falsifier searches for
violating vectors.  When the condition is established, one of three
hypothesis routes upgrades it to a localization of the numerical range or
of the eigenvalues in the closed left half plane.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (
    EPS,
    PLUS,
    Pencil,
    PoshPencil,
    probe_regular,
    smallest_hermitian_eigenvalue,
    spectral_norm,
)
from .errors import PreconditionError, RankAmbiguityError
from .kcf import kronecker_structure
from .numrange import common_kernel, find_definite_combination, sample_numerical_range

QUADFORM_TOL = 1e-10
KRONECKER_SIZE_CAP = 64
AXIS_TOL = 1e-8


def eejjx_value(pp: PoshPencil, x) -> float:
    """Value of the quadratic-form condition at x; positive means violated."""
    vec = np.asarray(x, dtype=np.complex128).reshape(-1)
    q1 = complex(vec.conj() @ pp.r1 @ vec)
    q2 = complex(vec.conj() @ pp.r2 @ vec)
    w1 = complex(vec.conj() @ pp.j1 @ vec)
    w2 = complex(vec.conj() @ pp.j2 @ vec)
    return float((-q1 * q2 + w1 * w2).real)


def eejjx_by_norms(pp: PoshPencil) -> bool:
    """lambda_min(R1)*lambda_min(R2) >= ||J1||*||J2|| forces the condition."""
    lhs = smallest_hermitian_eigenvalue(pp.r1) * smallest_hermitian_eigenvalue(pp.r2)
    return lhs >= spectral_norm(pp.j1) * spectral_norm(pp.j2)


def eejjx_by_kronecker(pp: PoshPencil) -> bool:
    """Largest eigenvalue test on J1 (x) J2 - R1 (x) R2.

    The quadratic form equals (x (x) x)* K (x (x) x) with this Hermitian K,
    so K negative semidefinite is sufficient.
    """
    if pp.n > KRONECKER_SIZE_CAP:
        raise PreconditionError(
            f"Kronecker prover capped at size {KRONECKER_SIZE_CAP}; "
            "use eejjx_by_norms or eejjx_falsify"
        )
    if pp.n == 0:
        return True
    k = np.kron(pp.j1, pp.j2) - np.kron(pp.r1, pp.r2)
    k = (k + k.conj().T) / 2.0
    w = np.linalg.eigvalsh(k)
    scale = max(abs(float(w[0])), abs(float(w[-1])))
    return float(w[-1]) <= 64.0 * EPS * scale


def eejjx_by_spectral(pp: PoshPencil, relative_tolerance: float = 1e-12) -> bool:
    """Pointwise sign test on the Hermitian forms behind J1 and J2.

    True when x*J1x * x*J2x <= 0 for every x, which makes the quadratic-form
    condition hold since the R terms only help.  Writing J_k = i*K_k with
    K_k Hermitian, the product condition says the real forms x*K1x and
    x*K2x never take opposite signs.  That holds exactly when both K's are
    positive semidefinite, both are negative semidefinite, or one is a
    nonnegative multiple of the other; eigenvalue conditions on
    lambda*J1 + J2 alone do not decide it, because an indefinite K1 paired
    with a non-proportional K2 admits sign-splitting vectors even when all
    pencil eigenvalues are real, nonpositive and semisimple.
    """
    if pp.n == 0:
        return True
    k1 = (-1j) * pp.j1
    k2 = (-1j) * pp.j2
    n1 = spectral_norm(k1)
    n2 = spectral_norm(k2)
    # a negligible J product cannot push the form past the falsifier scale
    if n1 * n2 <= relative_tolerance * spectral_norm(pp.r1) * spectral_norm(pp.r2):
        return True
    if n1 == 0.0 or n2 == 0.0:
        return True
    w1 = np.linalg.eigvalsh((k1 + k1.conj().T) / 2.0)
    w2 = np.linalg.eigvalsh((k2 + k2.conj().T) / 2.0)
    lo1, hi1 = float(w1[0]), float(w1[-1])
    lo2, hi2 = float(w2[0]), float(w2[-1])
    if lo1 >= -relative_tolerance * n1 and lo2 >= -relative_tolerance * n2:
        return True
    if hi1 <= relative_tolerance * n1 and hi2 <= relative_tolerance * n2:
        return True
    # proportionality k2 = c*k1 (or the reverse) with c >= 0
    for a, b, na, nb in ((k1, k2, n1, n2), (k2, k1, n2, n1)):
        denom = float(np.real(np.vdot(a, a)))
        if denom == 0.0:
            continue
        c = float(np.real(np.vdot(a, b))) / denom
        if c >= 0.0 and spectral_norm(b - c * a) <= relative_tolerance * nb:
            return True
    return False


def _eejjx_threshold(pp: PoshPencil) -> float:
    return QUADFORM_TOL * max(
        spectral_norm(pp.r1) * spectral_norm(pp.r2),
        spectral_norm(pp.j1) * spectral_norm(pp.j2),
    )


def _eejjx_gradient(pp: PoshPencil, vec: np.ndarray) -> np.ndarray:
    q1 = float(np.real(vec.conj() @ pp.r1 @ vec))
    q2 = float(np.real(vec.conj() @ pp.r2 @ vec))
    k1 = -1j * pp.j1
    k2 = -1j * pp.j2
    w1 = float(np.real(vec.conj() @ k1 @ vec))
    w2 = float(np.real(vec.conj() @ k2 @ vec))
    return -2.0 * (
        q2 * (pp.r1 @ vec)
        + q1 * (pp.r2 @ vec)
        + w2 * (k1 @ vec)
        + w1 * (k2 @ vec)
    )


def eejjx_falsify(pp: PoshPencil, budget: int = 2000, seed: int = 0):
    """Search for a unit vector violating the quadratic-form condition.

    80 percent of the budget goes to random unit vectors, the rest to
    gradient ascent from the best candidate.  Returns the witness vector
    or None; None is inconclusive, not a proof.
    """
    n = pp.n
    if n == 0 or budget <= 0:
        return None
    threshold = _eejjx_threshold(pp)
    if threshold == 0.0:
        # one factor of each product vanishes identically
        return None
    rng = np.random.default_rng(seed)
    rand_budget = max(1, int(0.8 * budget))
    best_val = -math.inf
    best = None
    chunk = 256
    used = 0
    while used < rand_budget:
        take = min(chunk, rand_budget - used)
        X = rng.standard_normal((take, n)) + 1j * rng.standard_normal((take, n))
        X /= np.linalg.norm(X, axis=1)[:, None]
        q1 = np.real(np.einsum("ni,ij,nj->n", X.conj(), pp.r1, X))
        q2 = np.real(np.einsum("ni,ij,nj->n", X.conj(), pp.r2, X))
        w1 = np.einsum("ni,ij,nj->n", X.conj(), pp.j1, X)
        w2 = np.einsum("ni,ij,nj->n", X.conj(), pp.j2, X)
        vals = -q1 * q2 + np.real(w1 * w2)
        over = np.nonzero(vals > threshold)[0]
        if over.size:
            return X[over[0]].copy()
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best = X[k].copy()
        used += take
    vec = best
    step = 0.1
    for _ in range(budget - rand_budget):
        grad = _eejjx_gradient(pp, vec)
        cand = vec + step * grad
        nrm = np.linalg.norm(cand)
        if nrm == 0.0:
            step /= 2.0
            continue
        cand /= nrm
        val = eejjx_value(pp, cand)
        if val > threshold:
            return cand
        if val > best_val:
            best_val = val
            vec = cand
            step = min(step * 1.5, 1.0)
        else:
            step /= 2.0
            if step < 1e-14:
                break
    return None


def eejjx_real_form(pp: PoshPencil, budget: int = 2000, seed: int = 0):
    """Falsifier for real data, searching over real pairs (xi, eta).

    A violation means -4*(xi'J1 eta)*(xi'J2 eta) exceeds
    (xi'R1 xi + eta'R1 eta)*(xi'R2 xi + eta'R2 eta); any witness pair maps
    to x = xi + i*eta violating the complex condition, which is re-checked
    before returning.
    """
    for name in ("j1", "r1", "j2", "r2"):
        if not np.all(getattr(pp, name).imag == 0.0):
            raise PreconditionError("real-form falsifier needs real matrices")
    n = pp.n
    if n == 0 or budget <= 0:
        return None
    threshold = _eejjx_threshold(pp)
    if threshold == 0.0:
        return None
    j1 = pp.j1.real
    j2 = pp.j2.real
    r1 = pp.r1.real
    r2 = pp.r2.real

    def value(xi, eta):
        jj = -4.0 * float(xi @ j1 @ eta) * float(xi @ j2 @ eta)
        rr = float(xi @ r1 @ xi + eta @ r1 @ eta) * float(
            xi @ r2 @ xi + eta @ r2 @ eta
        )
        return jj - rr

    rng = np.random.default_rng(seed)
    rand_budget = max(1, int(0.8 * budget))
    best_val = -math.inf
    best = None
    for _ in range(rand_budget):
        z = rng.standard_normal(2 * n)
        nrm = np.linalg.norm(z)
        if nrm == 0.0:
            continue
        z /= nrm
        xi, eta = z[:n], z[n:]
        val = value(xi, eta)
        if val > best_val:
            best_val = val
            best = (xi.copy(), eta.copy())
        if val > threshold and eejjx_value(pp, xi + 1j * eta) > threshold:
            return (xi.copy(), eta.copy())
    xi, eta = best
    step = 0.1
    h = 1e-6
    for _ in range(budget - rand_budget):
        # finite-difference ascent on the stacked real vector
        z = np.concatenate([xi, eta])
        grad = np.zeros_like(z)
        base = value(xi, eta)
        for i in range(z.size):
            zp = z.copy()
            zp[i] += h
            grad[i] = (value(zp[:n], zp[n:]) - base) / h
        cand = z + step * grad
        nrm = np.linalg.norm(cand)
        if nrm == 0.0:
            step /= 2.0
            continue
        cand /= nrm
        val = value(cand[:n], cand[n:])
        if val > threshold and eejjx_value(
            pp, cand[:n] + 1j * cand[n:]
        ) > threshold:
            return (cand[:n].copy(), cand[n:].copy())
        if val > base:
            xi, eta = cand[:n], cand[n:]
            step = min(step * 1.5, 1.0)
        else:
            step /= 2.0
            if step < 1e-14:
                break
    return None


@dataclass(frozen=True)
class LhpCertificate:
    """Outcome of the left-half-plane certification pipeline.

    eejjx_status: proved_by_norms | proved_by_kronecker | proved_by_spectral
        | falsified | unknown.
    hypothesis_route: no_isotropic | skew_numrange_lhp | skew_structure | none.
    conclusion: numrange_in_lhp | eigenvalues_in_lhp | none, with its
    evidence class (exact or sampled).
    """

    eejjx_status: str
    hypothesis_route: str
    conclusion: str
    evidence: str
    witness: object = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "notes", tuple(self.notes))
        proved = self.eejjx_status.startswith("proved_by_")
        if self.conclusion == "numrange_in_lhp":
            if not (proved and self.hypothesis_route in ("no_isotropic", "skew_numrange_lhp")):
                raise PreconditionError("numrange conclusion without a valid route")
        elif self.conclusion == "eigenvalues_in_lhp":
            if not (proved and self.hypothesis_route == "skew_structure"):
                raise PreconditionError("eigenvalue conclusion without a valid route")


def _no_isotropic_evidence(pp: PoshPencil):
    """Exact certificate that the coefficients share no isotropic vector."""
    if common_kernel([pp.r1, pp.r2]).shape[1] == 0:
        return "trivial intersection of ker R1 and ker R2"
    if pp.n < 2:
        return None
    herms = {
        "R1": pp.r1,
        "iJ1": 1j * pp.j1,
        "R2": pp.r2,
        "iJ2": 1j * pp.j2,
    }
    names = list(herms)
    for skip in range(4):
        triple = [names[i] for i in range(4) if i != skip]
        combo = find_definite_combination(*(herms[t] for t in triple))
        if combo is not None:
            return (
                "definite combination of {%s}, lambda_min %.3g"
                % (", ".join(triple), combo[3])
            )
    return None


def lhp_certificate(
    pp: PoshPencil,
    sample_budget: int = 2000,
    falsify_budget: int = 2000,
    seed: int = 0,
) -> LhpCertificate:
    """Run the provers and hypothesis routes on one pencil.

    Provers run in cost order; a proved condition is combined with the
    first hypothesis route that can be established: no common isotropic
    vector (numerical range localized), the structure route through
    lambda*J1+J2 (eigenvalues localized), or the sampled skew numerical
    range (localization with sampled evidence only).
    """
    notes = []
    status = None
    if eejjx_by_norms(pp):
        status = "proved_by_norms"
    elif pp.n <= KRONECKER_SIZE_CAP and eejjx_by_kronecker(pp):
        status = "proved_by_kronecker"
    elif eejjx_by_spectral(pp):
        status = "proved_by_spectral"
    if status is None:
        witness = eejjx_falsify(pp, falsify_budget, seed)
        if witness is not None:
            notes.append(
                f"violating value {eejjx_value(pp, witness):.3g} at a unit vector"
            )
            return LhpCertificate(
                "falsified", "none", "none", "exact", witness, tuple(notes)
            )
        notes.append("provers inconclusive and no violating vector found")
        return LhpCertificate("unknown", "none", "none", "none", None, tuple(notes))

    evidence_a = _no_isotropic_evidence(pp)
    if evidence_a is not None:
        notes.append(evidence_a)
        if pp.n < 3:
            notes.append("size below 3: combination certificates remain sufficient")
        return LhpCertificate(
            status, "no_isotropic", "numrange_in_lhp", "exact", None, tuple(notes)
        )

    p = pp.pencil()
    p_regular = probe_regular(p)
    if p_regular:
        notes.append("regularity of the pencil established by randomized probe")
        try:
            ks = kronecker_structure(Pencil(pp.j1, pp.j2, PLUS))
        except RankAmbiguityError as exc:
            ks = None
            notes.append(f"skew pencil structure ambiguous: {exc}")
        if ks is not None:
            minimal_zero = not any(ks.right_minimal_indices) and not any(
                ks.left_minimal_indices
            )
            finite_lhp = all(
                lam.real <= AXIS_TOL * (1.0 + abs(lam))
                for lam, _ in ks.finite_eigenstructure
            )
            if minimal_zero and finite_lhp:
                return LhpCertificate(
                    status,
                    "skew_structure",
                    "eigenvalues_in_lhp",
                    "exact",
                    None,
                    tuple(notes),
                )
        skew_sample = sample_numerical_range(
            Pencil(pp.j1, pp.j2, PLUS), sample_budget, seed
        )
        if all(
            z.real <= AXIS_TOL * (1.0 + abs(z)) for z in skew_sample.points
        ):
            notes.append(
                "skew numerical range sampled at "
                f"{len(skew_sample.points)} points, none in the open right half plane"
            )
            return LhpCertificate(
                status,
                "skew_numrange_lhp",
                "numrange_in_lhp",
                "sampled",
                None,
                tuple(notes),
            )
    notes.append("no hypothesis route established")
    return LhpCertificate(status, "none", "none", "none", None, tuple(notes))


def sector_membership(points, d: int, tol: float = 1e-6, zero_radius: float = 1e-8):
    """Points that fall inside the forbidden sector |arg z| < pi/d.

    Points within zero_radius of the origin never violate; the angle test
    carries a tolerance of tol radians.
    """
    d = int(d)
    if d < 1:
        raise PreconditionError("degree must be at least 1")
    bound = math.pi / d - tol
    violations = []
    for z in points:
        z = complex(z)
        if abs(z) <= zero_radius:
            continue
        if abs(cmath.phase(z)) < bound:
            violations.append(z)
    return violations


@dataclass(frozen=True)
class CorollaryItem:
    """One implication: does its hypothesis hold, and was the conclusion seen."""

    label: str
    hypothesis: bool
    verified: bool | None
    detail: str


@dataclass(frozen=True)
class RegularityConditionsReport:
    p_regular: bool
    rr_regular: bool
    jj_regular: bool
    r1j2_regular: bool
    r2j1_regular: bool
    items: tuple


def _pencil_regular(lead, const) -> bool:
    p = Pencil(lead, const, PLUS)
    try:
        return kronecker_structure(p).regular
    except RankAmbiguityError:
        return probe_regular(p)


def _positive_real_eigenpairs(pp: PoshPencil, tol: float = AXIS_TOL):
    """Finite eigenpairs of the pencil with eigenvalue on the positive axis."""
    lead = pp.j1 + pp.r1
    const = pp.j2 + pp.r2
    n = pp.n
    if n == 0:
        return []
    vals, vecs = scipy.linalg.eig(-const, lead)
    pairs = []
    for k in range(n):
        lam = complex(vals[k])
        if not np.isfinite(lam.real) or not np.isfinite(lam.imag):
            continue
        if lam.real > tol * (1.0 + abs(lam)) and abs(lam.imag) <= tol * (
            1.0 + abs(lam)
        ):
            pairs.append((lam.real, vecs[:, k]))
    return pairs


def regularity_conditions_report(pp: PoshPencil) -> RegularityConditionsReport:
    """Evaluate the five regularity implications on one pencil.

    Hypotheses are regularity statements about the four half pencils;
    conclusions are re-verified on the instance where computable
    (verified None means the hypothesis does not apply or the check was
    not computable).
    """
    p = pp.pencil()
    try:
        p_regular = kronecker_structure(p).regular
    except RankAmbiguityError:
        p_regular = probe_regular(p)
    rr = _pencil_regular(pp.r1, pp.r2)
    jj = _pencil_regular(pp.j1, pp.j2)
    r1j2 = _pencil_regular(pp.r1, pp.j2)
    r2j1 = _pencil_regular(pp.r2, pp.j1)
    scale = max(
        spectral_norm(pp.j1) + spectral_norm(pp.j2),
        spectral_norm(pp.r1) + spectral_norm(pp.r2),
        1.0,
    )
    items = []

    if not p_regular:
        k1 = common_kernel([pp.j1, pp.r1, pp.r2]).shape[1]
        k2 = common_kernel([pp.j2, pp.r1, pp.r2]).shape[1]
        items.append(
            CorollaryItem(
                "i",
                True,
                k1 > 0 and k2 > 0,
                f"common kernel dimensions {k1} and {k2} for the two triples",
            )
        )
    else:
        items.append(CorollaryItem("i", False, None, "pencil is regular"))

    pos_pairs = _positive_real_eigenpairs(pp) if p_regular else []

    if rr:
        ok = p_regular and not pos_pairs
        detail = (
            "regular with no positive real eigenvalues"
            if ok
            else "conclusion failed: "
            + ("pencil singular" if not p_regular else f"{len(pos_pairs)} positive real eigenvalues")
        )
        items.append(CorollaryItem("ii", True, ok, detail))
    else:
        items.append(CorollaryItem("ii", False, None, "lambda*R1+R2 singular"))

    if jj:
        if not p_regular:
            items.append(CorollaryItem("iii", True, False, "pencil singular"))
        else:
            ok = True
            worst = 0.0
            for alpha, _ in pos_pairs:
                m = alpha * pp.j1 + pp.j2
                sv = np.linalg.svd(m, compute_uv=False)
                resid = float(sv[-1]) / (scale * (1.0 + alpha))
                worst = max(worst, resid)
                if resid > AXIS_TOL:
                    ok = False
            items.append(
                CorollaryItem(
                    "iii",
                    True,
                    ok,
                    f"{len(pos_pairs)} positive real eigenvalues, "
                    f"worst relative sigma_min {worst:.3g}",
                )
            )
    else:
        items.append(CorollaryItem("iii", False, None, "lambda*J1+J2 singular"))

    for label, hyp, hyp_name in (("iv", r1j2, "lambda*R1+J2"), ("v", r2j1, "lambda*R2+J1")):
        if not hyp:
            items.append(CorollaryItem(label, False, None, f"{hyp_name} singular"))
            continue
        if not p_regular:
            items.append(CorollaryItem(label, True, False, "pencil singular"))
            continue
        ok = True
        worst = 0.0
        for alpha, x in pos_pairs:
            resid = float(
                np.linalg.norm((alpha * pp.j1 + pp.j2) @ x)
            ) / (scale * (1.0 + alpha) * float(np.linalg.norm(x)))
            worst = max(worst, resid)
            if resid > AXIS_TOL:
                ok = False
        items.append(
            CorollaryItem(
                label,
                True,
                ok,
                f"{len(pos_pairs)} positive real eigenpairs, worst residual {worst:.3g}",
            )
        )

    return RegularityConditionsReport(
        p_regular=p_regular,
        rr_regular=rr,
        jj_regular=jj,
        r1j2_regular=r1j2,
        r2j1_regular=r2j1,
        items=tuple(items),
    )
