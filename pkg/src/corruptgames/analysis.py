"""Scenario analysis: payoff sweeps, critical rates, and equilibrium search.

Scenario I keeps the players committed to their ideal-source strategies and
sweeps the corruption rate, locating the critical rates where the classical
baseline overtakes them.  Scenario II assumes the rate is known and searches
the two-parameter strategy box for Nash equilibria: coarse grid filtering,
batched coordinate-ascent refinement, best-response certification on a fine
grid, and clustering of the certified profiles into families (isolated
points, phi_a + phi_b = const manifolds, axis-aligned boxes, or the whole
strategy space).

Certification is numerical: a profile is an epsilon-NE when the best
unilateral deviation found by fine-grid search plus local refinement gains
at most epsilon.  Family descriptors are detected from the certified
members and are only reported after 32 probe points on the claimed
manifold certify as well; otherwise the family is downgraded to "custom".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import protocol
from .games import BimatrixGame, PayoffPair, classical_equilibria
from .protocol import (
    ISIGMA_Y_MOVE,
    ISIGMA_Z_MOVE,
    Strategy,
    validate_rate,
    validate_strategy,
)

GOLDEN = (math.sqrt(5) - 1) / 2

THETA_RANGE = (0.0, math.pi)
PHI_RANGE = (0.0, math.pi / 2)
COORD_NAMES = ("theta_a", "phi_a", "theta_b", "phi_b")
_COORD_RANGES = (THETA_RANGE, PHI_RANGE, THETA_RANGE, PHI_RANGE)

GAUGE_TOL = 1e-5     # theta this close to pi makes phi a gauge freedom
FIX_TOL = 1e-2       # coordinate spread below this counts as fixed
COUPLING_TOL = 1e-4  # spread of phi_a + phi_b below this counts as a linear tie
SEAM = 0.3           # |pi - theta| below this: phi statistics are unreliable
PAYOFF_EQ_TOL = 1e-6
IMPROVE_TOL = 1e-13
PROBE_COUNT = 32
PROBE_SEED = 20240811


# ---------------------------------------------------------------------------
# Scenario I: sweeps and crossings

@dataclass(frozen=True)
class SweepCurve:
    """Payoff-vs-corruption series for a fixed pair of strategy profiles."""

    r_grid: np.ndarray
    quantum_a: np.ndarray
    quantum_b: np.ndarray
    classical_a: np.ndarray
    classical_b: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        if r.ndim != 1 or len(r) == 0 or (len(r) > 1 and (np.diff(r) <= 0).any()):
            raise ValueError("r_grid must be non-empty and strictly increasing")
        for name in ("quantum_a", "quantum_b", "classical_a", "classical_b"):
            if len(getattr(self, name)) != len(r):
                raise ValueError(f"series {name} does not match r_grid length")

    def series(self) -> dict[str, np.ndarray]:
        return {
            "quantum_a": self.quantum_a,
            "quantum_b": self.quantum_b,
            "classical_a": self.classical_a,
            "classical_b": self.classical_b,
        }


SCENARIO1_QUANTUM = {
    "pd": (ISIGMA_Z_MOVE, ISIGMA_Z_MOVE),
    "sd": (ISIGMA_Z_MOVE, ISIGMA_Z_MOVE),
    "bos": (ISIGMA_Y_MOVE, ISIGMA_Y_MOVE),
}


def default_quantum_profile(game: BimatrixGame) -> tuple[Strategy, Strategy]:
    """The dilemma-resolving profile the players commit to for an ideal source."""
    try:
        return SCENARIO1_QUANTUM[game.name]
    except KeyError:
        raise ValueError(
            f"no default quantum profile for game {game.name!r}; pass one explicitly"
        ) from None


def classical_reference_profile(game: BimatrixGame) -> tuple[float, float]:
    """The classical NE mix used as the comparison baseline.

    The mixed NE when the game has one, otherwise the unique pure NE.
    """
    equilibria = classical_equilibria(game)
    mixed = [e for e in equilibria if e.kind == "mixed"]
    if mixed:
        eq = mixed[0]
    else:
        pure = [e for e in equilibria if e.kind == "pure"]
        if len(pure) != 1:
            raise ValueError(f"game {game.name!r} has no canonical classical profile")
        eq = pure[0]
    return eq.alice_p0, eq.bob_p0


def scenario1_sweep(game: BimatrixGame, quantum_profile=None, classical_profile=None,
                    r_grid=None, base=(0, 0)) -> SweepCurve:
    """Evaluate quantum and classical payoffs on a grid of corruption rates."""
    if quantum_profile is None:
        quantum_profile = default_quantum_profile(game)
    if classical_profile is None:
        classical_profile = classical_reference_profile(game)
    if r_grid is None:
        r_grid = np.linspace(0.0, 1.0, 101)
    r_grid = np.asarray(r_grid, dtype=float)
    sa, sb = quantum_profile
    ma, mb = classical_profile
    qa = np.empty(len(r_grid))
    qb = np.empty(len(r_grid))
    ca = np.empty(len(r_grid))
    cb = np.empty(len(r_grid))
    for i, r in enumerate(r_grid):
        qa[i], qb[i] = protocol.quantum_payoffs(game, r, sa, sb, base)
        ca[i], cb[i] = protocol.classical_payoffs(game, r, ma, mb, base)
    return SweepCurve(r_grid, qa, qb, ca, cb)


@dataclass(frozen=True)
class Crossing:
    """A point where two payoff series meet; tangent=True marks a grazing touch."""

    r_star: float
    value_a: float
    value_b: float
    tangent: bool = False


def _bisect_sign_change(diff, lo, hi, tol):
    flo = diff(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = diff(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0) != (fmid < 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _golden_min(fun, lo, hi, tol=1e-12):
    a, b = lo, hi
    while b - a > tol:
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        if fun(c) <= fun(d):
            b = d
        else:
            a = c
    return 0.5 * (a + b)


def find_crossings(f, g, lo: float = 0.0, hi: float = 1.0, scan_points: int = 1001,
                   refine_tol: float = 1e-10, tangent_tol: float = 1e-9) -> list[Crossing]:
    """Locate points in [lo, hi] where the series f and g meet.

    Sign changes of f - g on the scan grid are refined by bisection to an
    interval below refine_tol.  Grazing contacts (local minima of |f - g|
    under tangent_tol without a sign change) are reported with the tangent
    flag.  If the two series are indistinguishable on the whole grid the
    list is empty.
    """
    if scan_points < 3:
        raise ValueError("scan_points must be at least 3")
    xs = np.linspace(lo, hi, scan_points)
    diff = lambda x: f(x) - g(x)
    d = np.array([diff(x) for x in xs])
    if np.abs(d).max() < tangent_tol:
        return []

    results: list[Crossing] = []
    seen: list[float] = []

    def emit(x, tangent):
        if any(abs(x - s) <= 2 * (xs[1] - xs[0]) for s in seen):
            return
        seen.append(x)
        results.append(Crossing(float(x), float(f(x)), float(g(x)), tangent))

    for k in range(scan_points):
        if d[k] == 0.0:
            emit(xs[k], tangent=False)
    for k in range(scan_points - 1):
        if d[k] * d[k + 1] < 0.0:
            emit(_bisect_sign_change(diff, xs[k], xs[k + 1], refine_tol), tangent=False)
    for k in range(1, scan_points - 1):
        is_min = abs(d[k]) <= abs(d[k - 1]) and abs(d[k]) <= abs(d[k + 1])
        no_flip = d[k - 1] * d[k] > 0.0 and d[k] * d[k + 1] > 0.0
        if is_min and no_flip and abs(d[k]) < tangent_tol:
            x = _golden_min(lambda t: abs(diff(t)), xs[k - 1], xs[k + 1])
            if abs(diff(x)) < tangent_tol:
                emit(x, tangent=True)

    results.sort(key=lambda c: c.r_star)
    return results


def minimize_series(f, lo: float = 0.0, hi: float = 1.0, scan_points: int = 1001,
                    tol: float = 1e-10) -> tuple[float, float]:
    """Grid argmin of a scalar series refined by golden-section search."""
    xs = np.linspace(lo, hi, scan_points)
    vals = np.array([f(x) for x in xs])
    k = int(vals.argmin())
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, scan_points - 1)]
    x = _golden_min(f, a, b, tol)
    candidates = [(f(x), x), (vals[k], xs[k])]
    v, x = min(candidates)
    return float(x), float(v)


def samaritan_case(payoff_a: float, payoff_b: float) -> int:
    """Solution-quality case for the Samaritan's Dilemma payoff pair.

    Case 1: alice <= 0 (insufficient).  Case 2: 0 < alice <= bob (weak).
    Case 3: bob < alice (strong).
    """
    if payoff_a <= 0:
        return 1
    if payoff_a <= payoff_b:
        return 2
    return 3


# ---------------------------------------------------------------------------
# Batched payoff machinery shared by refinement and certification

def _own_values(game, r, profiles, player, base):
    va, vb = protocol.quantum_payoffs_batch(game, r, profiles[:, :2], profiles[:, 2:], base)
    return va if player == 0 else vb


def payoff_grid(game: BimatrixGame, r, alice_strategies, bob_strategies,
                base=(0, 0), single_precision: bool = False):
    """Payoff matrices over the cross product of two strategy lists.

    Returns (EA, EB) with EA[i, j] the Alice payoff of alice_strategies[i]
    against bob_strategies[j].  The amplitude <n| J^dag (U_A x U_B) J |fg>
    factorizes into a per-player contraction, so the full cross product
    costs 16 thin matrix products instead of len(a) * len(b) circuit runs.
    single_precision switches the heavy products to complex64; only the
    coarse filtering stage of ne_search uses that.
    """
    ua = protocol.strategy_unitaries(alice_strategies)
    ub = protocol.strategy_unitaries(bob_strategies)
    ent = protocol.entangler()
    basis_images = ent.T.reshape(4, 2, 2)  # basis_images[k] = J|k> as a 2x2 table
    real_dtype = np.float64
    if single_precision:
        ua = ua.astype(np.complex64)
        ub = ub.astype(np.complex64)
        basis_images = basis_images.astype(np.complex64)
        real_dtype = np.float32
    w = protocol.corruption_weights(r, base)
    vec_a, vec_b = game.payoff_vectors()
    n_a, n_b = len(ua), len(ub)
    # g[n, f, s, a, c] = sum_{b, d} conj(J|n>)[a, b] * UB[s, b, d] * (J|f>)[c, d]
    g = np.einsum("nab,sbd,fcd->nfsac", basis_images.conj(), ub, basis_images,
                  optimize=True)
    ua_flat = ua.reshape(n_a, 4)
    ea = np.zeros((n_a, n_b), dtype=real_dtype)
    eb = np.zeros((n_a, n_b), dtype=real_dtype)
    prob = np.empty((n_a, n_b), dtype=real_dtype)
    scratch = np.empty((n_a, n_b), dtype=real_dtype)
    for n in range(4):
        for fgl in range(4):
            if w[fgl] == 0.0:
                continue
            amp = ua_flat @ g[n, fgl].reshape(n_b, 4).T
            np.multiply(amp.real, amp.real, out=prob)
            np.multiply(amp.imag, amp.imag, out=scratch)
            prob += scratch
            ea += (w[fgl] * vec_a[n]) * prob
            eb += (w[fgl] * vec_b[n]) * prob
    return ea.astype(float), eb.astype(float)


def _line_max(fun, lo, hi, n, bracket_points=17, tol=1e-10, max_iter=60):
    """Maximize fun row-wise on [lo, hi]: fun maps an [n] coordinate vector to
    the [n] objective values.  Coarse bracket then golden-section."""
    xs = np.linspace(lo, hi, bracket_points)
    vals = np.empty((bracket_points, n))
    for i, x in enumerate(xs):
        vals[i] = fun(np.full(n, x))
    k = vals.argmax(axis=0)
    grid_best = vals[k, np.arange(n)]
    a = xs[np.maximum(k - 1, 0)]
    b = xs[np.minimum(k + 1, bracket_points - 1)]
    for _ in range(max_iter):
        if (b - a).max() <= tol:
            break
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        fc = fun(c)
        fd = fun(d)
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    x = 0.5 * (a + b)
    v = fun(x)
    worse = v < grid_best
    x[worse] = xs[k[worse]]
    v[worse] = grid_best[worse]
    return x, v


_COORD_STEPS = tuple(
    (col, player, _COORD_RANGES[col]) for col, player in ((0, 0), (1, 0), (2, 1), (3, 1))
)


def _refine_profiles(game, r, profiles, base, tol=1e-10, max_sweeps=6):
    """Alternating per-player golden-section ascent on each coordinate.

    A coordinate only moves on strict improvement of the owning player's own
    payoff, so profiles already sitting on a flat equilibrium manifold stay
    put instead of drifting along it.
    """
    prof = np.array(profiles, dtype=float)
    active = np.arange(len(prof))
    for _ in range(max_sweeps):
        if len(active) == 0:
            break
        sub = prof[active]
        moved = np.zeros(len(sub), dtype=bool)
        for col, player, (lo, hi) in _COORD_STEPS:
            current = _own_values(game, r, sub, player, base)

            def fun(x, sub=sub, col=col, player=player):
                trial = sub.copy()
                trial[:, col] = x
                return _own_values(game, r, trial, player, base)

            x, v = _line_max(fun, lo, hi, len(sub))
            accept = v > current + IMPROVE_TOL
            delta = np.abs(x - sub[:, col])
            sub[accept, col] = x[accept]
            moved |= accept & (delta > tol)
        prof[active] = sub
        active = active[moved]
    return prof


# ---------------------------------------------------------------------------
# Certification

@dataclass(frozen=True)
class EquilibriumCandidate:
    """A certified strategy profile with its best unilateral deviation gain."""

    alice: Strategy
    bob: Strategy
    payoffs: PayoffPair
    max_gain: float

    def coords(self) -> tuple[float, float, float, float]:
        return (*self.alice, *self.bob)

    def is_equilibrium(self, epsilon: float) -> bool:
        return self.max_gain <= epsilon


_DEVIATION_GRIDS: dict[tuple[int, int], np.ndarray] = {}


def _deviation_grid(fine_grid):
    key = (int(fine_grid[0]), int(fine_grid[1]))
    cached = _DEVIATION_GRIDS.get(key)
    if cached is None:
        thetas = np.linspace(*THETA_RANGE, key[0])
        phis = np.linspace(*PHI_RANGE, key[1])
        tt, pp = np.meshgrid(thetas, phis, indexing="ij")
        cached = np.column_stack([tt.ravel(), pp.ravel()])
        cached.setflags(write=False)
        _DEVIATION_GRIDS[key] = cached
    return cached


def _grid_best_responses(game, r, profiles, player, fine_grid, base):
    """Per profile: the fine-grid deviation argmax and its payoff."""
    dev = _deviation_grid(fine_grid)
    if player == 0:
        table = payoff_grid(game, r, dev, profiles[:, 2:4], base)[0]
        k = table.argmax(axis=0)
        vals = table[k, np.arange(len(profiles))]
    else:
        table = payoff_grid(game, r, profiles[:, 0:2], dev, base)[1]
        k = table.argmax(axis=1)
        vals = table[np.arange(len(profiles)), k]
    return dev[k], vals


def _polish_batch(game, r, starts, profiles, player, base, tol=1e-10, max_sweeps=4):
    """Golden-section ascent of one player's two coordinates vs fixed opponents."""
    prof = np.array(profiles, dtype=float)
    own = 0 if player == 0 else 2
    prof[:, own:own + 2] = starts
    n = len(prof)
    values = _own_values(game, r, prof, player, base)
    for _ in range(max_sweeps):
        changed = False
        for local, (lo, hi) in enumerate((THETA_RANGE, PHI_RANGE)):
            col = own + local

            def fun(x, col=col):
                trial = prof.copy()
                trial[:, col] = x
                return _own_values(game, r, trial, player, base)

            x, v = _line_max(fun, lo, hi, n, tol=tol)
            accept = v > values + IMPROVE_TOL
            if accept.any():
                if (accept & (np.abs(x - prof[:, col]) > tol)).any():
                    changed = True
                prof[accept, col] = x[accept]
                values[accept] = v[accept]
        if not changed:
            break
    return prof[:, own:own + 2], values


def _certify_chunk(game, r, profiles, fine_grid, base):
    pa, pb = protocol.quantum_payoffs_batch(game, r, profiles[:, :2], profiles[:, 2:], base)
    current = (pa, pb)
    gains = []
    for player in (0, 1):
        starts, grid_vals = _grid_best_responses(game, r, profiles, player, fine_grid, base)
        _, polished = _polish_batch(game, r, starts, profiles, player, base)
        best = np.maximum(np.maximum(grid_vals, polished), current[player])
        gains.append(best - current[player])
    max_gain = np.maximum(gains[0], gains[1])
    return [
        EquilibriumCandidate((float(p[0]), float(p[1])), (float(p[2]), float(p[3])),
                             (float(pa[i]), float(pb[i])), float(max_gain[i]))
        for i, p in enumerate(profiles)
    ]


def _certify_batch(game, r, profiles, fine_grid, base, chunk=128):
    """Certify many profiles; chunked so the deviation tables stay small."""
    profiles = np.asarray(profiles, dtype=float)
    if len(profiles) == 0:
        return []
    out = []
    for block in np.array_split(profiles, max(1, math.ceil(len(profiles) / chunk))):
        if len(block):
            out.extend(_certify_chunk(game, r, block, fine_grid, base))
    return out


def best_response(game: BimatrixGame, r, opponent: Strategy, player: int,
                  fine_grid=(257, 129), base=(0, 0)) -> tuple[Strategy, float]:
    """Best reply of one player against a fixed opponent strategy.

    Fine-grid argmax over the strategy box followed by local golden-section
    refinement of the winning cell.
    """
    opponent = validate_strategy(opponent)
    if player not in (0, 1):
        raise ValueError("player must be 0 (Alice) or 1 (Bob)")
    r = validate_rate(r)
    profile = np.zeros((1, 4))
    opp_cols = slice(2, 4) if player == 0 else slice(0, 2)
    profile[0, opp_cols] = opponent
    starts, grid_vals = _grid_best_responses(game, r, profile, player, fine_grid, base)
    own, polished = _polish_batch(game, r, starts, profile, player, base)
    if polished[0] >= grid_vals[0]:
        return (float(own[0, 0]), float(own[0, 1])), float(polished[0])
    return (float(starts[0, 0]), float(starts[0, 1])), float(grid_vals[0])


def certify_ne(game: BimatrixGame, r, alice: Strategy, bob: Strategy,
               epsilon: float = 1e-6, fine_grid=(257, 129), base=(0, 0)) -> EquilibriumCandidate:
    """Certify a profile by bounding each player's best unilateral deviation.

    max_gain is the larger of the two players' (best found deviation payoff
    minus current payoff); staying put is always among the candidate
    deviations, so max_gain is never negative.  The candidate is an
    epsilon-NE when max_gain <= epsilon.
    """
    alice = validate_strategy(alice)
    bob = validate_strategy(bob)
    r = validate_rate(r)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return _certify_batch(game, r, [(*alice, *bob)], fine_grid, base)[0]


# ---------------------------------------------------------------------------
# Families

@dataclass(frozen=True)
class FamilyDescriptor:
    """Constraint description of an equilibrium family.

    kind is one of "point", "all_strategies", "phi_sum", "box", "custom".
    fixed holds pinned coordinates, ranges the observed span of the free
    ones.  phi_sum, when set, means phi_a + phi_b equals that constant along
    the family; theta_locked means theta_a = theta_b.  For "custom" the
    constraints are observed metadata only, not a certified manifold claim.
    """

    kind: str
    fixed: tuple[tuple[str, float], ...] = ()
    ranges: tuple[tuple[str, tuple[float, float]], ...] = ()
    phi_sum: float | None = None
    theta_locked: bool = False
    payoff_parametric: bool = False

    def fixed_dict(self) -> dict[str, float]:
        return dict(self.fixed)

    def ranges_dict(self) -> dict[str, tuple[float, float]]:
        return dict(self.ranges)


@dataclass(frozen=True)
class EquilibriumFamily:
    """A cluster of certified equilibria with a common structure."""

    representative: EquilibriumCandidate
    members: tuple[EquilibriumCandidate, ...]
    descriptor: FamilyDescriptor

    @property
    def payoffs(self) -> PayoffPair:
        return self.representative.payoffs


@dataclass(eq=False)
class _Draft:
    coords: np.ndarray
    candidates: list[EquilibriumCandidate]
    fixed: dict[int, float] = field(default_factory=dict)
    ranges: dict[int, tuple[float, float]] = field(default_factory=dict)
    phi_sum: float | None = None
    theta_locked: bool = False
    is_gauge_point: bool = False
    kind: str = "custom"


def _subsample(arr: np.ndarray, cap: int) -> np.ndarray:
    if len(arr) <= cap:
        return arr
    idx = np.unique(np.linspace(0, len(arr) - 1, cap).round().astype(int))
    return arr[idx]


def _canonicalize(profiles: np.ndarray) -> np.ndarray:
    """Fix the theta = pi gauge: there phi has no physical effect, so pin it to 0."""
    out = profiles.copy()
    for t_col, p_col in ((0, 1), (2, 3)):
        gauge = out[:, t_col] >= math.pi - GAUGE_TOL
        out[gauge, t_col] = math.pi
        out[gauge, p_col] = 0.0
    return out


def _lex_sorted(coords: np.ndarray) -> np.ndarray:
    order = np.lexsort((coords[:, 3], coords[:, 2], coords[:, 1], coords[:, 0]))
    return coords[order]


def _cluster(coords: np.ndarray, radius: float) -> list[np.ndarray]:
    """Connected components under Chebyshev distance <= radius."""
    n = len(coords)
    adj = np.abs(coords[:, None, :] - coords[None, :, :]).max(axis=2) <= radius
    unassigned = np.ones(n, dtype=bool)
    components = []
    for start in range(n):
        if not unassigned[start]:
            continue
        frontier = [start]
        unassigned[start] = False
        group = [start]
        while frontier:
            node = frontier.pop()
            neighbours = np.nonzero(adj[node] & unassigned)[0]
            unassigned[neighbours] = False
            frontier.extend(neighbours.tolist())
            group.extend(neighbours.tolist())
        components.append(coords[np.sort(np.array(group))])
    return components


def _analyze_draft(draft: _Draft) -> None:
    """Fill in fixed coordinates, ranges, and detected couplings."""
    coords = draft.coords
    m = len(coords)
    thetas_near_pi = np.maximum(coords[:, 0], coords[:, 2]) > math.pi - SEAM
    core = coords[~thetas_near_pi]
    phi_source = core if len(core) >= max(2, m // 4) else coords

    for col in range(4):
        source = coords if col in (0, 2) else phi_source
        lo, hi = float(source[:, col].min()), float(source[:, col].max())
        if hi - lo < FIX_TOL:
            draft.fixed[col] = float(np.median(source[:, col]))
        else:
            draft.ranges[col] = (lo, hi)

    draft.theta_locked = bool(np.abs(coords[:, 0] - coords[:, 2]).max() < FIX_TOL)
    if 1 in draft.ranges and 3 in draft.ranges:
        sums = phi_source[:, 1] + phi_source[:, 3]
        if np.ptp(sums) < COUPLING_TOL:
            draft.phi_sum = float(np.median(sums))

    if m == 1:
        draft.kind = "point"
        theta_a, _, theta_b, _ = coords[0]
        draft.is_gauge_point = (theta_a >= math.pi - GAUGE_TOL
                                and theta_b >= math.pi - GAUGE_TOL)
    elif draft.phi_sum is not None and (draft.theta_locked or (0 in draft.fixed and 2 in draft.fixed)):
        draft.kind = "phi_sum"
    elif not draft.ranges:
        draft.kind = "point"
    else:
        draft.kind = "box"


def _free_axes(draft: _Draft) -> list[str]:
    """Independent axes parameterizing the claimed manifold.

    For phi_sum families, "theta_pair" drives theta_a = theta_b jointly and
    "phi_a" drives both phis through the coupling; box families use their
    varying coordinates directly.
    """
    if draft.kind == "phi_sum":
        axes = ["theta_pair"] if 0 in draft.ranges else []
        axes.append("phi_a")
        return axes
    if draft.kind == "box":
        return [COORD_NAMES[col] for col in sorted(draft.ranges)]
    return []


def _axis_range(draft: _Draft, axis: str) -> tuple[float, float]:
    if axis == "theta_pair":
        return draft.ranges[0]
    if axis == "phi_a" and draft.kind == "phi_sum":
        lo, hi = draft.ranges[1]
        return max(lo, draft.phi_sum - PHI_RANGE[1]), min(hi, draft.phi_sum)
    return draft.ranges[COORD_NAMES.index(axis)]


def _axis_box(draft: _Draft, axis: str) -> tuple[float, float]:
    if axis == "theta_pair":
        return THETA_RANGE
    if axis == "phi_a" and draft.kind == "phi_sum":
        return (max(PHI_RANGE[0], draft.phi_sum - PHI_RANGE[1]),
                min(PHI_RANGE[1], draft.phi_sum))
    return _COORD_RANGES[COORD_NAMES.index(axis)]


def _set_axis_range(draft: _Draft, axis: str, rng: tuple[float, float]) -> None:
    if axis == "theta_pair":
        draft.ranges[0] = rng
        if 2 in draft.ranges:
            draft.ranges[2] = rng
    elif axis == "phi_a" and draft.kind == "phi_sum":
        draft.ranges[1] = rng
        draft.ranges[3] = (max(PHI_RANGE[0], draft.phi_sum - rng[1]),
                           min(PHI_RANGE[1], draft.phi_sum - rng[0]))
    else:
        draft.ranges[COORD_NAMES.index(axis)] = rng


def _manifold_profiles(draft: _Draft, points: np.ndarray, axes: list[str]) -> np.ndarray:
    """Assemble full profiles from free-axis values on the claimed manifold."""
    template = np.zeros(4)
    for col, value in draft.fixed.items():
        template[col] = value
    profiles = np.tile(template, (len(points), 1))
    for k, axis in enumerate(axes):
        if axis == "theta_pair":
            profiles[:, 0] = points[:, k]
            profiles[:, 2] = points[:, k]
        else:
            profiles[:, COORD_NAMES.index(axis)] = points[:, k]
    if draft.kind == "phi_sum":
        if draft.theta_locked and "theta_pair" not in axes:
            profiles[:, 2] = profiles[:, 0]
        profiles[:, 3] = np.clip(draft.phi_sum - profiles[:, 1], *PHI_RANGE)
    return profiles


def _probe_profiles(draft: _Draft) -> np.ndarray | None:
    """Deterministic lattice of probe profiles on the claimed manifold."""
    axes = _free_axes(draft)
    if not axes:
        return None
    spans = [_axis_range(draft, axis) for axis in axes]
    if any(hi < lo for lo, hi in spans):
        return None
    counts = {1: (PROBE_COUNT,), 2: (8, 4), 3: (4, 4, 2), 4: (4, 2, 2, 2)}[len(axes)]
    grids = [np.linspace(lo, hi, cnt) for (lo, hi), cnt in zip(spans, counts)]
    mesh = np.meshgrid(*grids, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    return _manifold_profiles(draft, points, axes)


def _probe_ok(game, r, draft: _Draft, epsilon, fine_grid, base):
    """Validate the claimed manifold; returns certified probe candidates or None."""
    if draft.kind == "point":
        return []
    if draft.kind not in ("phi_sum", "box"):
        return None
    probes = _probe_profiles(draft)
    if probes is None:
        return None
    candidates = _certify_batch(game, r, probes, fine_grid, base)
    if all(c.is_equilibrium(epsilon) for c in candidates):
        return candidates
    return None


def _tighten_ranges(game, r, draft: _Draft, epsilon, fine_grid, base, tol=4e-3):
    """Push each free-axis endpoint outward to its certified limit.

    Observed member ranges are quantized by the coarse grid and thinned by
    subsampling; here each endpoint is extended toward its box limit as far
    as cross-section probes keep certifying, locating the true family
    boundary by bisection.
    """
    axes = _free_axes(draft)

    def cross_points(skip_axis):
        others = [a for a in axes if a != skip_axis]
        grids = [np.linspace(*_axis_range(draft, a), 3) for a in others]
        mesh = np.meshgrid(*grids, indexing="ij")
        return list(zip(*[m.ravel() for m in mesh])), others

    for axis in axes:
        cross, others = (cross_points(axis) if len(axes) > 1 else ([()], []))
        ordered = [axis, *others]

        def value_ok(v):
            points = np.array([[v, *cp] for cp in cross])
            profiles = _manifold_profiles(draft, points, ordered)
            return all(c.is_equilibrium(epsilon)
                       for c in _certify_batch(game, r, profiles, fine_grid, base))

        lo, hi = _axis_range(draft, axis)
        box_lo, box_hi = _axis_box(draft, axis)
        for limit, current, is_lo in ((box_lo, lo, True), (box_hi, hi, False)):
            if abs(current - limit) <= tol:
                continue
            if value_ok(limit):
                end = limit
            else:
                good, bad = current, limit
                while abs(good - bad) > tol:
                    mid = 0.5 * (good + bad)
                    if value_ok(mid):
                        good = mid
                    else:
                        bad = mid
                end = good
            if is_lo:
                lo = end
            else:
                hi = end
        _set_axis_range(draft, axis, (lo, hi))


def _candidate_key(cand: EquilibriumCandidate):
    """Lexicographic ordering that ignores sub-1e-6 coordinate noise."""
    coords = cand.coords()
    return (tuple(np.round(coords, 6)), coords)


def _same_structure(a: _Draft, b: _Draft, tol: float = 6e-3) -> bool:
    if a.kind != b.kind or set(a.fixed) != set(b.fixed) or set(a.ranges) != set(b.ranges):
        return False
    if any(abs(a.fixed[c] - b.fixed[c]) > tol for c in a.fixed):
        return False
    if any(abs(a.ranges[c][0] - b.ranges[c][0]) > tol
           or abs(a.ranges[c][1] - b.ranges[c][1]) > tol for c in a.ranges):
        return False
    if (a.phi_sum is None) != (b.phi_sum is None):
        return False
    return a.phi_sum is None or abs(a.phi_sum - b.phi_sum) <= 1e-3


def _make_subdraft(parent: _Draft, mask: np.ndarray) -> _Draft:
    draft = _Draft(coords=parent.coords[mask],
                   candidates=[c for c, keep in zip(parent.candidates, mask) if keep])
    _analyze_draft(draft)
    return draft


def _mode_split(draft: _Draft, col: int):
    """Split a component at the most common value of one coordinate.

    Connected equilibrium sets can be unions of differently-structured
    branches (e.g. a phi_a + phi_b line crossed by a free-theta branch);
    the branches share the modal coordinate value at the junction.
    """
    values = np.round(draft.coords[:, col], 3)
    uniq, counts = np.unique(values, return_counts=True)
    mode = uniq[counts.argmax()]
    count = int(counts.max())
    if count < 2 or count >= len(values):
        return None
    mask = values == mode
    return _make_subdraft(draft, mask), _make_subdraft(draft, ~mask)


def _all_strategies_family(game, r, epsilon, fine_grid, base) -> EquilibriumFamily | None:
    """Detect the degenerate case where every profile is an epsilon-NE."""
    rng = np.random.default_rng(PROBE_SEED)
    lows = [THETA_RANGE[0], PHI_RANGE[0], THETA_RANGE[0], PHI_RANGE[0]]
    highs = [THETA_RANGE[1], PHI_RANGE[1], THETA_RANGE[1], PHI_RANGE[1]]
    probes = rng.uniform(lows, highs, size=(PROBE_COUNT, 4))
    first = _certify_batch(game, r, probes[:1], fine_grid, base)[0]
    if not first.is_equilibrium(epsilon):  # cheap bail-out for the common case
        return None
    members = [first] + _certify_batch(game, r, probes[1:], fine_grid, base)
    if not all(c.is_equilibrium(epsilon) for c in members):
        return None
    rep = _certify_batch(game, r, [(0.0, 0.0, 0.0, 0.0)], fine_grid, base)[0]
    if not rep.is_equilibrium(epsilon):
        return None
    descriptor = FamilyDescriptor(
        kind="all_strategies",
        ranges=tuple((name, rng_) for name, rng_ in zip(COORD_NAMES, _COORD_RANGES)),
    )
    members.sort(key=_candidate_key)
    return EquilibriumFamily(rep, (rep, *members), descriptor)


def _grid_margin(game: BimatrixGame, n_theta: int, n_phi: int) -> float:
    # Payoff curvature is bounded by a small multiple of the payoff scale, so
    # a true equilibrium between grid nodes shows a best-response gain of at
    # most O(scale * h^2) on the grid; 1.5x that keeps every candidate.
    scale = float(np.abs(np.concatenate(game.payoff_vectors())).max())
    h_theta = (THETA_RANGE[1] - THETA_RANGE[0]) / (n_theta - 1)
    h_phi = (PHI_RANGE[1] - PHI_RANGE[0]) / (n_phi - 1)
    return 1.5 * max(scale, 1.0) * (h_theta ** 2 + h_phi ** 2)


def _descriptor_from_draft(draft: _Draft, payoff_parametric: bool) -> FamilyDescriptor:
    fixed = tuple((COORD_NAMES[col], draft.fixed[col]) for col in sorted(draft.fixed))
    ranges = tuple((COORD_NAMES[col], draft.ranges[col]) for col in sorted(draft.ranges))
    return FamilyDescriptor(
        kind=draft.kind,
        fixed=fixed,
        ranges=ranges,
        phi_sum=draft.phi_sum if draft.kind == "phi_sum" else None,
        theta_locked=draft.theta_locked,
        payoff_parametric=payoff_parametric,
    )


def ne_search(game: BimatrixGame, r, coarse_grid=(65, 33), epsilon: float = 1e-6,
              fine_grid=(257, 129), base=(0, 0), max_refined: int = 1024,
              max_members: int = 32) -> list[EquilibriumFamily]:
    """Search the strategy box for epsilon-Nash equilibria, grouped by family.

    Pipeline: (1) payoff bimatrix on the coarse product grid; (2) keep
    profiles whose grid best-response gain stays under a curvature-scaled
    margin for both players; (3) refine survivors by alternating per-player
    golden-section ascent; (4) certify each refined profile against a fine
    deviation grid; (5) cluster the certified profiles, detect the family
    structure, and validate every claimed manifold with 32 probe
    certifications.  Families whose probes fail are reported as "custom"
    (members only, no manifold claim).  Output order is deterministic:
    members and families sort lexicographically by (theta_a, phi_a,
    theta_b, phi_b).

    Completeness is grid-resolution-confident only: an equilibrium family
    thinner than the coarse grid could be missed.
    """
    r = validate_rate(r)
    n_theta, n_phi = coarse_grid
    if n_theta < 8 or n_phi < 8:
        raise ValueError("coarse_grid needs at least 8 steps per axis")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    uniform = _all_strategies_family(game, r, epsilon, fine_grid, base)
    if uniform is not None:
        return [uniform]

    thetas = np.linspace(*THETA_RANGE, n_theta)
    phis = np.linspace(*PHI_RANGE, n_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    grid = np.column_stack([tt.ravel(), pp.ravel()])
    ea, eb = payoff_grid(game, r, grid, grid, base, single_precision=True)

    margin = _grid_margin(game, n_theta, n_phi)
    gain_a = ea.max(axis=0, keepdims=True) - ea
    gain_b = eb.max(axis=1, keepdims=True) - eb
    rows, cols = np.nonzero((gain_a <= margin) & (gain_b <= margin))
    if len(rows) == 0:
        return []
    survivors = np.hstack([grid[rows], grid[cols]])
    survivors = _subsample(survivors, max_refined)

    refined = _canonicalize(_refine_profiles(game, r, survivors, base))
    rounded = np.round(refined, 7)
    _, first = np.unique(rounded, axis=0, return_index=True)
    members = _lex_sorted(refined[np.sort(first)])

    h = max(thetas[1] - thetas[0], phis[1] - phis[0])
    drafts: list[_Draft] = []
    for component in _cluster(members, radius=4 * h):
        sample = _subsample(component, max_members)
        candidates = [c for c in _certify_batch(game, r, sample, fine_grid, base)
                      if c.is_equilibrium(epsilon)]
        if not candidates:
            continue
        coords = np.array([c.coords() for c in candidates])
        draft = _Draft(coords=coords, candidates=candidates)
        _analyze_draft(draft)
        drafts.append(draft)

    # theta = pi gauge closure: a theta-locked family reaching the top of the
    # theta range swallows the (pi, 0)^2 gauge point, which is its slice there.
    gauge_points = [d for d in drafts if d.is_gauge_point]
    absorbed: list[_Draft] = []
    for draft in drafts:
        if draft.kind == "phi_sum" and draft.theta_locked and 0 in draft.ranges and gauge_points:
            lo, hi = draft.ranges[0]
            if hi >= math.pi - 4 * h:
                _set_axis_range(draft, "theta_pair", (lo, math.pi))
                for gp in gauge_points:
                    absorbed.append(gp)
                    draft.candidates.extend(gp.candidates)
                gauge_points = []
    drafts = [d for d in drafts if d not in absorbed]

    def settle(draft: _Draft) -> bool:
        """Validate, widen to the certified boundaries, and absorb the probes."""
        extra = _probe_ok(game, r, draft, epsilon, fine_grid, base)
        if extra is None:
            return False
        if draft.ranges:
            backup = dict(draft.ranges)
            _tighten_ranges(game, r, draft, epsilon, fine_grid, base)
            widened = _probe_ok(game, r, draft, epsilon, fine_grid, base)
            if widened is None:
                draft.ranges.clear()
                draft.ranges.update(backup)
            else:
                extra = widened
        draft.candidates.extend(extra)
        return True

    # Validate each draft's structure; a failing component is split at a
    # modal coordinate into branches (each re-validated) before falling back
    # to an unstructured "custom" report.
    final: list[_Draft] = []
    for draft in drafts:
        if settle(draft):
            final.append(draft)
            continue
        for col in (2, 0, 3, 1):
            split = _mode_split(draft, col)
            if split is None:
                continue
            part_a, part_b = split
            if settle(part_a) and settle(part_b):
                final.extend([part_a, part_b])
                break
        else:
            draft.kind = "custom"
            final.append(draft)

    # Clustering can fragment one manifold into components that tighten to
    # the same certified structure; fold such duplicates together.
    merged: list[_Draft] = []
    for draft in final:
        twin = next((d for d in merged if _same_structure(d, draft)), None)
        if twin is None:
            merged.append(draft)
        else:
            twin.candidates.extend(draft.candidates)
            for col in twin.ranges:
                lo_a, hi_a = twin.ranges[col]
                lo_b, hi_b = draft.ranges[col]
                twin.ranges[col] = (min(lo_a, lo_b), max(hi_a, hi_b))

    families: list[EquilibriumFamily] = []
    for draft in merged:
        seen: dict[tuple, EquilibriumCandidate] = {}
        for cand in draft.candidates:
            seen.setdefault(tuple(np.round(cand.coords(), 9)), cand)
        members = sorted(seen.values(), key=_candidate_key)[: 2 * max_members]
        payoff_matrix = np.array([c.payoffs for c in members])
        parametric = bool(np.ptp(payoff_matrix, axis=0).max() > PAYOFF_EQ_TOL)
        families.append(EquilibriumFamily(
            representative=members[0],
            members=tuple(members),
            descriptor=_descriptor_from_draft(draft, parametric),
        ))

    # Drop gauge points that are slices of a theta-locked family reaching pi:
    # at theta = pi the phi parameters have no physical effect, so the
    # (pi, 0)^2 profile is already covered by that family.
    def gauge_covered(fam: EquilibriumFamily) -> bool:
        coords = fam.representative.coords()
        if fam.descriptor.kind != "point" or coords[0] < math.pi - GAUGE_TOL \
                or coords[2] < math.pi - GAUGE_TOL:
            return False
        for other in families:
            if other is fam or not other.descriptor.theta_locked:
                continue
            theta_span = other.descriptor.ranges_dict().get("theta_a")
            if theta_span is not None and theta_span[1] >= math.pi - GAUGE_TOL:
                return True
        return False

    families = [fam for fam in families if not gauge_covered(fam)]
    families.sort(key=lambda fam: _candidate_key(fam.representative))
    return families


@dataclass(frozen=True)
class ScenarioTableRow:
    r: float
    families: tuple[EquilibriumFamily, ...]


def scenario2_table(game: BimatrixGame, r_values=(0.0, 0.25, 0.5, 0.75, 1.0),
                    **search_options) -> list[ScenarioTableRow]:
    """Run ne_search at each corruption rate and collect the family reports."""
    return [
        ScenarioTableRow(validate_rate(r), tuple(ne_search(game, r, **search_options)))
        for r in r_values
    ]
