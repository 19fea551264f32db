"""Kronecker structure extraction via rank-revealing staircase deflation.

The pencil is processed in the minus convention. Three deflation phases:

1. A staircase run on (lead, constant) peels the right singular blocks and
   the structure at infinity, leaving a core whose lead has full column rank.
2. The same staircase applied to the conjugate-transposed core peels the
   left singular blocks, leaving a square regular core with invertible lead.
3. QZ on the core gives the finite eigenvalues; these are clustered, and the
   partial multiplicities of each cluster are read off as the infinite
   structure of the shifted-and-reversed pencil, reusing the one staircase.

An independent transposed staircase run on the full pencil cross-checks the
left minimal indices and the infinite structure; disagreement between the
two derivations surfaces as a rank-ambiguity diagnostic rather than a wrong
answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import EPS, Pencil, spectral_norm
from .errors import PreconditionError, RankAmbiguityError


@dataclass(frozen=True)
class RankPolicy:
    """Knobs for every numerical rank decision made during extraction.

    kappa_safety scales the usual max(rows,cols)*sigma_max*eps cutoff;
    ambiguity_gap is the minimum ratio between the smallest kept and the
    largest dropped singular value before a decision is declared ambiguous;
    cluster_radius is the relative eigenvalue clustering radius, escalated
    tenfold per round for at most cluster_rounds rounds.
    """

    kappa_safety: float = 16.0
    ambiguity_gap: float = 1e3
    cluster_radius: float = 1e-6
    cluster_rounds: int = 5
    size_cap: int = 512
    absolute_floor: float = 0.0


DEFAULT_POLICY = RankPolicy()


@dataclass(frozen=True)
class RankDecision:
    """Record of one SVD rank call, kept for diagnostics."""

    singular_values: tuple
    rank: int
    gap_ratio: float
    tolerance_used: float


@dataclass(frozen=True, eq=False)
class KroneckerStructure:
    """Complete block data of a pencil, all lists sorted ascending.

    finite_eigenstructure pairs a cluster representative with the sorted
    partial multiplicities of that eigenvalue.
    """

    right_minimal_indices: tuple
    left_minimal_indices: tuple
    finite_eigenstructure: tuple
    infinite_block_sizes: tuple
    index: int
    regular: bool
    rows: int
    cols: int

    def __post_init__(self):
        right = tuple(int(e) for e in self.right_minimal_indices)
        left = tuple(int(e) for e in self.left_minimal_indices)
        inf_sizes = tuple(int(s) for s in self.infinite_block_sizes)
        finite = tuple(
            (complex(lam), tuple(int(r) for r in mults))
            for lam, mults in self.finite_eigenstructure
        )
        object.__setattr__(self, "right_minimal_indices", right)
        object.__setattr__(self, "left_minimal_indices", left)
        object.__setattr__(self, "infinite_block_sizes", inf_sizes)
        object.__setattr__(self, "finite_eigenstructure", finite)
        total_finite = sum(sum(m) for _, m in finite)
        row_total = (
            sum(right)
            + sum(e + 1 for e in left)
            + total_finite
            + sum(inf_sizes)
        )
        col_total = (
            sum(e + 1 for e in right)
            + sum(left)
            + total_finite
            + sum(inf_sizes)
        )
        if row_total != self.rows or col_total != self.cols:
            raise RankAmbiguityError(
                "block sizes do not account for the pencil dimensions: "
                f"rows {row_total} vs {self.rows}, cols {col_total} vs {self.cols}"
            )
        expect_regular = self.rows == self.cols and not right and not left
        if self.regular != expect_regular:
            raise RankAmbiguityError("regularity flag inconsistent with block data")
        expect_index = max(inf_sizes) if inf_sizes else 0
        if self.index != expect_index:
            raise RankAmbiguityError("index inconsistent with infinite block sizes")

    @property
    def eigenvalues(self) -> list:
        """Cluster representatives with algebraic multiplicity repetition."""
        out = []
        for lam, mults in self.finite_eigenstructure:
            out.extend([lam] * sum(mults))
        return out


def _decide_rank(
    sv: np.ndarray,
    dim: int,
    scale: float,
    policy: RankPolicy,
    extra_floor: float,
    context: str,
) -> int:
    tol = dim * scale * EPS * policy.kappa_safety + policy.absolute_floor + extra_floor
    rank = int(np.sum(sv > tol))
    if rank > 0 and float(sv[rank - 1]) < 8.0 * tol:
        # a kept value this close to the cutoff is indistinguishable from
        # accumulated roundoff; escalating kappa either absorbs it or not
        raise RankAmbiguityError(
            f"ambiguous rank decision in {context}: smallest kept value "
            f"{sv[rank - 1]:.3e} sits at the tolerance boundary {tol:.3e}; "
            "retry with an explicit RankPolicy",
            RankDecision(
                singular_values=tuple(float(s) for s in sv),
                rank=rank,
                gap_ratio=float(sv[rank - 1]) / tol,
                tolerance_used=tol,
            ),
        )
    gap = float("inf")
    if 0 < rank < len(sv):
        dropped = float(sv[rank])
        gap = float(sv[rank - 1]) / dropped if dropped > 0.0 else float("inf")
        if gap < policy.ambiguity_gap:
            decision = RankDecision(
                singular_values=tuple(float(s) for s in sv),
                rank=rank,
                gap_ratio=gap,
                tolerance_used=tol,
            )
            raise RankAmbiguityError(
                f"ambiguous rank decision in {context}: kept {sv[rank - 1]:.3e}, "
                f"dropped {dropped:.3e} (gap {gap:.1f} < {policy.ambiguity_gap:.0f}, "
                f"tolerance {tol:.3e}); retry with an explicit RankPolicy",
                decision,
            )
    return rank


def _staircase_inf(E, A, policy: RankPolicy, extra_floor: float = 0.0):
    """Deflate the structure at infinity and the right singular part.

    Works on the pencil lambda*E - A. Returns the step counts (s_k, t_k)
    where s_k = dim ker E and t_k = rank(A restricted to that kernel) at
    step k, together with the deflated core whose lead has trivial kernel.
    """
    E = np.array(E, dtype=np.complex128)
    A = np.array(A, dtype=np.complex128)
    scale = max(spectral_norm(E), spectral_norm(A))
    # roundoff contaminates deflated submatrices at the scale of the whole
    # problem, so rank cutoffs keep the entry dimension even as steps shrink
    dim0 = max(max(E.shape), 1)
    s_list: list[int] = []
    t_list: list[int] = []
    while True:
        rows, cols = E.shape
        if cols == 0:
            break
        if rows == 0:
            rank_e = 0
        else:
            u_e, sv_e, vh_e = np.linalg.svd(E, full_matrices=True)
            rank_e = _decide_rank(
                sv_e, dim0, scale, policy, extra_floor, "lead kernel"
            )
        s = cols - rank_e
        if s == 0:
            break
        if rows == 0:
            kernel = np.eye(cols, dtype=np.complex128)
            keep_cols = np.zeros((cols, 0), dtype=np.complex128)
        else:
            v = vh_e.conj().T
            kernel = v[:, rank_e:]
            keep_cols = v[:, :rank_e]
        b = A @ kernel
        if b.shape[0] == 0:
            t = 0
            u_b = np.zeros((0, 0), dtype=np.complex128)
        else:
            u_b, sv_b, _ = np.linalg.svd(b, full_matrices=True)
            t = _decide_rank(
                sv_b, dim0, scale, policy, extra_floor, "kernel image"
            )
        keep_rows = u_b[:, t:]
        E = keep_rows.conj().T @ (E @ keep_cols)
        A = keep_rows.conj().T @ (A @ keep_cols)
        s_list.append(s)
        t_list.append(t)
    return s_list, t_list, E, A


def _counts_from_staircase(s_list, t_list):
    """Minimal indices and infinite block sizes from staircase step counts.

    The number of right minimal indices equal to k-1 is s_k - t_k; the
    number of infinite blocks of size >= k is t_k minus the minimal indices
    still to appear at later steps.
    """
    steps = len(s_list)
    minimal: list[int] = []
    weyr: list[int] = []
    for k in range(steps):
        extra = s_list[k] - t_list[k]
        if extra < 0:
            raise RankAmbiguityError(
                "staircase inconsistency: kernel image rank exceeds kernel size"
            )
        minimal.extend([k] * extra)
    for k in range(steps):
        tail = sum(s_list[j] - t_list[j] for j in range(k + 1, steps))
        c = t_list[k] - tail
        if c < 0:
            raise RankAmbiguityError(
                "staircase inconsistency: negative block count at infinity"
            )
        weyr.append(c)
    for k in range(1, steps):
        if weyr[k] > weyr[k - 1]:
            raise RankAmbiguityError(
                "staircase inconsistency: block counts at infinity not monotone"
            )
    sizes: list[int] = []
    if weyr:
        for b in range(1, weyr[0] + 1):
            sizes.append(sum(1 for c in weyr if c >= b))
    return sorted(minimal), sorted(sizes)


def _union_find_clusters(values, factor):
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            radius = factor * (1.0 + max(abs(values[i]), abs(values[j])))
            if abs(values[i] - values[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(values[i])
    out = list(groups.values())
    out.sort(key=lambda g: (np.mean(g).real, np.mean(g).imag))
    return out


def _cluster_multiplicities(E, A, rep, count, radius_abs, policy, carried_floor=0.0):
    """Partial multiplicities of one eigenvalue cluster, or None on failure.

    Reads the sizes as the infinite structure of lambda*(A - rep*E) - E.
    The rank floor starts at the cluster radius scale and is escalated until
    the sizes account for every cluster member; the caller escalates the
    clustering radius itself when no floor works.
    """
    if abs(rep) > 1.0 and radius_abs < abs(rep) / 2.0:
        # large eigenvalues are badly scaled under a direct shift; the
        # reversed pencil sees the same Jordan sizes at 1/rep, and the
        # cluster ball maps into one of quadratically smaller radius
        return _cluster_multiplicities(
            A,
            E,
            1.0 / rep,
            count,
            2.0 * radius_abs / abs(rep) ** 2,
            policy,
            carried_floor,
        )
    b = A - rep * E
    # moving a cluster member to rep perturbs b by at most radius_abs * ||E||;
    # scaling by ||b|| instead would double-count |rep| for large eigenvalues
    base = 2.0 * radius_abs * spectral_norm(E)
    for factor in (1.0, 4.0, 16.0, 64.0):
        try:
            s_list, t_list, _, _ = _staircase_inf(
                b, E, policy, extra_floor=factor * base + carried_floor
            )
            minimal, sizes = _counts_from_staircase(s_list, t_list)
        except RankAmbiguityError:
            continue
        if minimal:
            continue
        if sum(sizes) == count:
            return sizes
    return None


def _finite_structure(E, A, policy: RankPolicy, carried_floor: float = 0.0):
    """Clustered eigenvalues with partial multiplicities for a regular core."""
    q = E.shape[0]
    if q == 0:
        return ()
    w = scipy.linalg.eig(A, E, right=False, homogeneous_eigvals=True)
    alpha, beta = np.asarray(w[0]), np.asarray(w[1])
    values = []
    for a, b in zip(alpha, beta):
        if abs(b) <= 1e-10 * (abs(a) + abs(b)):
            raise RankAmbiguityError(
                "deflated core unexpectedly has an eigenvalue at infinity; "
                "rank tolerances likely misjudged the staircase"
            )
        values.append(complex(a / b))
    for round_idx in range(policy.cluster_rounds):
        factor = policy.cluster_radius * (10.0 ** round_idx)
        clusters = _union_find_clusters(values, factor)
        result = []
        ok = True
        for members in clusters:
            rep = complex(np.mean(members))
            radius_abs = factor * (1.0 + abs(rep))
            mults = _cluster_multiplicities(
                E, A, rep, len(members), radius_abs, policy, carried_floor
            )
            if mults is None:
                ok = False
                break
            result.append((rep, tuple(sorted(mults))))
        if ok:
            result.sort(key=lambda item: (item[0].real, item[0].imag))
            return tuple(result)
    raise RankAmbiguityError(
        "eigenvalue cluster multiplicities never balanced the cluster sizes, "
        "even after radius escalation"
    )


def kronecker_structure(p: Pencil, policy: RankPolicy | None = None) -> KroneckerStructure:
    """Full Kronecker block data of a (possibly rectangular) pencil."""
    policy = policy or DEFAULT_POLICY
    m = p.to_minus()
    E = np.array(m.lead)
    A = np.array(m.constant)
    rows, cols = E.shape
    if max(rows, cols, 1) > policy.size_cap:
        raise PreconditionError(
            f"pencil size {rows}x{cols} exceeds the configured cap {policy.size_cap}"
        )

    # roundoff accumulated over successive compressions can cross a tight
    # rank tolerance; retry with escalated safety factors and accept only
    # when the independent derivations agree
    last_error: RankAmbiguityError | None = None
    for mult in (1.0, 4.0, 16.0, 64.0):
        attempt = (
            policy
            if mult == 1.0
            else RankPolicy(
                kappa_safety=policy.kappa_safety * mult,
                ambiguity_gap=policy.ambiguity_gap,
                cluster_radius=policy.cluster_radius,
                cluster_rounds=policy.cluster_rounds,
                size_cap=policy.size_cap,
                absolute_floor=policy.absolute_floor,
            )
        )
        try:
            return _extract_structure(E, A, rows, cols, attempt)
        except RankAmbiguityError as err:
            last_error = err
    raise last_error


def _extract_structure(E, A, rows, cols, policy: RankPolicy) -> KroneckerStructure:
    # truncation garbage left in deflated cores is proportional to the scale
    # of the ORIGINAL pencil, so later phases must not trust core-local scale
    global_floor = (
        policy.kappa_safety
        * EPS
        * max(rows, cols, 1)
        * max(spectral_norm(E), spectral_norm(A))
    )

    s1, t1, e_core, a_core = _staircase_inf(E, A, policy)
    right, inf_sizes = _counts_from_staircase(s1, t1)

    s2, t2, _, _ = _staircase_inf(E.conj().T, A.conj().T, policy)
    left_indep, inf_indep = _counts_from_staircase(s2, t2)
    if inf_indep != inf_sizes:
        raise RankAmbiguityError(
            "primal and transposed staircase runs disagree on the structure "
            f"at infinity: {inf_sizes} vs {inf_indep}"
        )

    s3, t3, e2h, a2h = _staircase_inf(
        e_core.conj().T, a_core.conj().T, policy, extra_floor=global_floor
    )
    left, inf_leftover = _counts_from_staircase(s3, t3)
    if inf_leftover:
        raise RankAmbiguityError(
            "left-deflation staircase found structure at infinity in a core "
            "that should have none"
        )
    if left != left_indep:
        raise RankAmbiguityError(
            "left minimal indices disagree between the deflation phases: "
            f"{left} vs {left_indep}"
        )

    e_reg = e2h.conj().T
    a_reg = a2h.conj().T
    if e_reg.shape[0] != e_reg.shape[1]:
        raise RankAmbiguityError(
            f"regular core is not square ({e_reg.shape[0]}x{e_reg.shape[1]}); "
            "rank tolerances misjudged the singular structure"
        )

    finite = _finite_structure(e_reg, a_reg, policy, global_floor)
    inf_tuple = tuple(inf_sizes)
    return KroneckerStructure(
        right_minimal_indices=tuple(right),
        left_minimal_indices=tuple(left),
        finite_eigenstructure=finite,
        infinite_block_sizes=inf_tuple,
        index=max(inf_tuple) if inf_tuple else 0,
        regular=(rows == cols and not right and not left),
        rows=rows,
        cols=cols,
    )


def structural_index(p: Pencil, policy: RankPolicy | None = None) -> int:
    return kronecker_structure(p, policy).index


def minimal_index_lists(p: Pencil, policy: RankPolicy | None = None):
    ks = kronecker_structure(p, policy)
    return list(ks.right_minimal_indices), list(ks.left_minimal_indices)


def structures_match(
    a: KroneckerStructure,
    b: KroneckerStructure,
    eigenvalue_tolerance: float = 1e-6,
) -> bool:
    """Integer-exact comparison with eigenvalue matching up to a tolerance."""
    if (
        a.right_minimal_indices != b.right_minimal_indices
        or a.left_minimal_indices != b.left_minimal_indices
        or a.infinite_block_sizes != b.infinite_block_sizes
        or (a.rows, a.cols) != (b.rows, b.cols)
    ):
        return False
    fa, fb = list(a.finite_eigenstructure), list(b.finite_eigenstructure)
    if len(fa) != len(fb):
        return False
    remaining = list(fb)
    for lam, mults in fa:
        best = None
        best_dist = None
        for idx, (mu, other) in enumerate(remaining):
            if other != mults:
                continue
            dist = abs(lam - mu)
            if best_dist is None or dist < best_dist:
                best, best_dist = idx, dist
        if best is None:
            return False
        mu = remaining[best][0]
        if abs(lam - mu) > eigenvalue_tolerance * (1.0 + abs(mu)):
            return False
        remaining.pop(best)
    return True
