"""Continuation engine: extend a root branch across the parameter domain.

The loop alternates certified localization (select_radius at the current
(x, w)) with Rouche-validated parameter steps.  Each accepted step
refactors F at the new parameter, re-roots the local monic factor, matches
the nearest root to the incoming value, and Newton-polishes it.  Step size
halves on rejection or ambiguity and grows after a run of clean accepts.

Termination is classified, never silent: Completed, AsymptoticBlowup,
DegenerateBarrier, NonConvergent, or SeedInvalid.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from .contour import count_zeros, local_monic_factor, poly_roots
from .domain import DomainPoint, ParamDomain, PathSegment, SweepSegment
from .errors import (
    CofactorVanishesError,
    DegenerateAtPointError,
    NoConvergenceError,
    NonFiniteError,
    NonIntegerWindingError,
    NoRadiusFoundError,
    NoZerosInDiskError,
    OutOfDomainError,
    SolverError,
    ZeroOnContourError,
)
from .expressions import EntireFunction, degeneracy_probe, polish_root
from .localize import select_radius, validate_step

_STEP_ERRORS = (
    ZeroOnContourError,
    NonIntegerWindingError,
    NoZerosInDiskError,
    CofactorVanishesError,
    NoConvergenceError,
    NonFiniteError,
)


class Status(str, enum.Enum):
    COMPLETED = "Completed"
    ASYMPTOTIC_BLOWUP = "AsymptoticBlowup"
    DEGENERATE_BARRIER = "DegenerateBarrier"
    NON_CONVERGENT = "NonConvergent"
    SEED_INVALID = "SeedInvalid"


@dataclass(frozen=True)
class TerminationStatus:
    kind: Status
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BranchSample:
    """One point of the tracked branch: w(point) with its residual |F|."""

    segment: int
    arc: float
    point: DomainPoint
    w: complex
    residual: float


@dataclass(frozen=True)
class RootBranch:
    """Continuation result: samples, classified termination, and location."""

    samples: tuple[BranchSample, ...]
    status: TerminationStatus
    status_location: Optional[DomainPoint]
    sweeps: tuple[SweepSegment, ...]
    domain: ParamDomain

    @property
    def completed(self) -> bool:
        return self.status.kind is Status.COMPLETED

    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)


@dataclass(frozen=True)
class RootMatch:
    value: Optional[complex]
    ambiguous: bool


@dataclass(frozen=True)
class EngineConfig:
    """Tuning knobs of the continuation. Defaults suit well-scaled problems.

    Distances along the domain are in arc units; h0/h_max are fractions of
    the active segment length.  max_steps bounds ACCEPTED steps per
    segment; rejected proposals are separately bounded by h halving down
    to h_min.
    """

    contour_samples: int = 128
    h0_frac: float = 1.0 / 64.0
    h_min: float = 1e-12
    h_max_frac: float = 0.125
    grow_after: int = 3
    grow_factor: float = 1.5
    safety: float = 0.5
    seed_tol: float = 1e-9
    residual_tol: float = 1e-8
    blowup_threshold: float = 1e8
    blowup_soft: float = 500.0
    osc_tol: float = 1e-6
    ambiguity_ratio: float = 0.5
    cluster_tol: float = 1e-4
    tie_break_after: int = 12
    window: int = 16
    snap_eps: float = 1e-9
    r_max_base: float = 1.0
    r_max_rel: float = 0.5
    radius_halvings: int = 40
    center_frac: float = 0.1
    m_floor_rel: float = 1e-13
    contour_guard: float = 0.5
    contour_floor_rel: float = 1e-12
    select_clear_margin: float = 2.0
    probe_radii: tuple[float, ...] = (1.0, 10.0)
    probe_samples: int = 64
    probe_tol: float = 1e-10
    max_steps: int = 8000
    soft_check_every: int = 256
    stall_retries: int = 2
    polish_iters: int = 8
    certify_steps: bool = False

    @classmethod
    def from_mapping(cls, overrides: dict) -> "EngineConfig":
        known = {f.name: f.type for f in fields(cls)}
        bad = set(overrides) - set(known)
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        coerced = {}
        for k, v in overrides.items():
            if k == "probe_radii":
                coerced[k] = tuple(float(r) for r in v)
            elif k == "certify_steps":
                coerced[k] = bool(v)
            elif isinstance(getattr(cls, k), int) and not isinstance(
                getattr(cls, k), bool
            ):
                coerced[k] = int(v)
            else:
                coerced[k] = float(v)
        return replace(cls(), **coerced)

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


def match_root(
    candidates: Sequence[complex],
    w_prev: complex,
    ambiguity_ratio: float = 0.5,
    cluster_tol: float = 1e-4,
) -> RootMatch:
    """Pick the continuation of w_prev among the factor's roots.

    Singleton lists match trivially.  If all candidates coincide within
    cluster_tol * (1 + max |c|) they are one numerically-split zero: the
    centroid matches.  Otherwise the nearest candidate must beat the
    runner-up by ambiguity_ratio, else the step is Ambiguous and the
    caller halves.
    """
    cs = np.asarray(list(candidates), dtype=np.complex128)
    if cs.size == 0:
        raise ValueError("no candidates to match")
    if cs.size == 1:
        return RootMatch(complex(cs[0]), False)
    scale = 1.0 + float(np.abs(cs).max())
    spread = float(np.abs(cs[:, None] - cs[None, :]).max())
    if spread <= cluster_tol * scale:
        return RootMatch(complex(cs.mean()), False)
    d = np.abs(cs - w_prev)
    i0 = int(np.argmin(d))
    d0 = float(d[i0])
    d1 = float(np.min(np.delete(d, i0)))
    if d0 <= ambiguity_ratio * d1:
        return RootMatch(complex(cs[i0]), False)
    return RootMatch(None, True)


def classify_termination(
    f: EntireFunction,
    window: Sequence[BranchSample],
    x_limit: float,
    cfg: EngineConfig,
) -> Optional[TerminationStatus]:
    """Classify a stalled continuation from its recent sample window.

    Order: blowup by threshold, then degeneracy of z -> F(x_limit, z), then
    oscillation (window diameter above osc_tol).  None means the window is
    converged and nondegenerate: the caller may retry with fresh steps.
    """
    ws = [s.w for s in window]
    if ws:
        peak = max(abs(w) for w in ws)
        if peak > cfg.blowup_threshold and window[-1].residual <= cfg.residual_tol:
            return TerminationStatus(
                Status.ASYMPTOTIC_BLOWUP,
                {"max_abs_w": peak, "last_residual": window[-1].residual},
            )
    try:
        probe = degeneracy_probe(
            f, x_limit, cfg.probe_radii, cfg.probe_samples, cfg.probe_tol
        )
    except (OutOfDomainError, NonFiniteError):
        probe = None
    if probe is not None and probe.degenerate:
        return TerminationStatus(
            Status.DEGENERATE_BARRIER,
            {
                "constant": probe.constant,
                "x_limit": x_limit,
                "window_diameter": _window_diameter(ws),
            },
        )
    diam = _window_diameter(ws)
    if diam > cfg.osc_tol:
        return TerminationStatus(
            Status.NON_CONVERGENT,
            {"window_diameter": diam, "x_limit": x_limit},
        )
    return None


def _window_diameter(ws: Sequence[complex]) -> float:
    if len(ws) < 2:
        return 0.0
    arr = np.asarray(list(ws), dtype=np.complex128)
    return float(np.abs(arr[:, None] - arr[None, :]).max())


def _blowup_evidence(
    window: Sequence[BranchSample],
    length: float,
    cfg: EngineConfig,
    h: Optional[float] = None,
    steps_left: Optional[int] = None,
) -> bool:
    """Soft asymptote test: |w| large, monotone growth, and 1/|w| heading
    linearly to zero at (or just past) the segment end.

    When h and steps_left are given (periodic mid-run checks) the test also
    requires the remaining arc to be unreachable within the step budget, so
    healthy branches are never cut short.
    """
    if len(window) < 8:
        return False
    mags = np.array([abs(s.w) for s in window])
    arcs = np.array([s.arc for s in window])
    if mags[-1] < cfg.blowup_soft:
        return False
    if np.any(np.diff(mags) < -1e-12 * mags[-1]):
        return False
    if mags[-1] <= mags[0] * (1.0 + 1e-9):
        return False
    rem = length - float(arcs[-1])
    if h is not None and steps_left is not None:
        if h <= 0 or rem / h <= steps_left:
            return False
    y = 1.0 / mags
    sb = arcs - arcs.mean()
    denom = float(np.dot(sb, sb))
    if denom == 0.0:
        return False
    beta = float(np.dot(sb, y - y.mean())) / denom
    if beta >= 0.0:
        return False
    alpha = float(y.mean()) - beta * float(arcs.mean())
    s_star = -alpha / beta
    lo = float(arcs[-1]) - 0.25 * rem
    hi = length + 0.75 * rem + 1e-12 * max(length, 1.0)
    return lo <= s_star <= hi


@dataclass
class SegmentRun:
    """extend_segment outcome: samples plus the termination if not completed."""

    samples: list[BranchSample]
    status: TerminationStatus
    location: Optional[DomainPoint]

    @property
    def completed(self) -> bool:
        return self.status.kind is Status.COMPLETED


_RELOCALIZE = "relocalize"


def extend_segment(
    f: EntireFunction,
    sweep: SweepSegment | PathSegment,
    w_start: complex,
    cfg: Optional[EngineConfig] = None,
    seg_index: int = 0,
    stops: Sequence[float] = (),
    junction: Optional[dict] = None,
) -> SegmentRun:
    """Continue the branch along one path segment from its resume point.

    stops are arc positions that steps must land on exactly (junctions of
    later sweep segments); the branch value there is recorded into
    ``junction`` keyed by the domain point, write-once.
    """
    cfg = cfg or EngineConfig()
    if isinstance(sweep, SweepSegment):
        seg, s = sweep.segment, sweep.resume_arc
    else:
        seg, s = sweep, 0.0
    dom = seg.domain
    length = seg.length

    pt = seg.point_at(s)
    cx = dom.coordinate(pt)
    w, res = polish_root(f, cx, complex(w_start), cfg.polish_iters)
    samples: list[BranchSample] = [BranchSample(seg_index, s, pt, w, res)]
    window: deque[BranchSample] = deque(samples, maxlen=cfg.window)

    def record_junction(point: DomainPoint, value: complex) -> None:
        if junction is not None and point not in junction:
            junction[point] = value

    def finish(kind: Status, diag: dict, where: Optional[DomainPoint]) -> SegmentRun:
        if kind in (Status.NON_CONVERGENT, Status.DEGENERATE_BARRIER):
            diag = {**diag, **_endpoint_diagnostics(f, seg, cfg)}
        if accepted:
            diag = _with_certify(diag, cfg, accepted, certify_failures)
        return SegmentRun(samples, TerminationStatus(kind, diag), where)

    if s >= length:
        record_junction(pt, w)
        return SegmentRun(samples, TerminationStatus(Status.COMPLETED, {}), None)

    stop_arcs = sorted(a for a in set(stops) if s < a < length)
    stop_set = set(stop_arcs)
    h = min(cfg.h0_frac * length, length - s)
    h_max = cfg.h_max_frac * length
    grow_run = 0
    ambiguous_streak = 0
    accepted = 0
    retries_left = cfg.stall_retries
    certify_failures = 0

    def stall(reason: str, allow_retry: bool = True) -> Optional[SegmentRun]:
        """Classify a stalled segment; None means retry with fresh steps."""
        nonlocal retries_left, h
        rem = length - s
        if rem <= cfg.snap_eps:
            run = _try_snap(f, seg, seg_index, s, w, cfg, samples, record_junction)
            if run is not None:
                if accepted:
                    run.status = TerminationStatus(
                        run.status.kind,
                        _with_certify(run.status.diagnostics, cfg, accepted, certify_failures),
                    )
                return run
        if _blowup_evidence(window, length, cfg):
            return finish(
                Status.ASYMPTOTIC_BLOWUP,
                {"max_abs_w": abs(w), "reason": reason, "soft": True},
                pt,
            )
        ts = classify_termination(f, window, cx, cfg)
        if ts is None:
            if allow_retry and retries_left > 0:
                retries_left -= 1
                h = max(1000.0 * cfg.h_min, min(cfg.h0_frac * rem, h_max))
                return None
            ts = TerminationStatus(
                Status.NON_CONVERGENT,
                {
                    "window_diameter": _window_diameter([sm.w for sm in window]),
                    "converged_window": True,
                },
            )
        return finish(ts.kind, {**ts.diagnostics, "reason": reason}, pt)

    def reject():
        """Halve the step. Returns None (keep proposing), a SegmentRun
        (terminate), or _RELOCALIZE (stall retry wants a fresh certificate)."""
        nonlocal h, grow_run
        h *= 0.5
        grow_run = 0
        if h < cfg.h_min:
            run = stall("step size underflow")
            return run if run is not None else _RELOCALIZE
        return None

    while True:
        # fresh certificate at the current frontier
        r_max = max(cfg.r_max_base, cfg.r_max_rel * abs(w))
        try:
            loc = select_radius(
                f,
                cx,
                w,
                r_max,
                samples=cfg.contour_samples,
                halvings=cfg.radius_halvings,
                center_frac=cfg.center_frac,
                m_floor_rel=cfg.m_floor_rel,
                guard=cfg.contour_guard,
                floor_rel=cfg.contour_floor_rel,
                probe_on_failure=True,
                probe_radii=cfg.probe_radii,
                probe_samples=cfg.probe_samples,
                probe_tol=cfg.probe_tol,
                clear_margin=cfg.select_clear_margin,
            )
        except DegenerateAtPointError as e:
            return finish(
                Status.DEGENERATE_BARRIER,
                {"constant": getattr(e, "constant", None), "at_frontier": True},
                pt,
            )
        except (NoRadiusFoundError, NonFiniteError, OutOfDomainError):
            run = stall("no admissible radius at frontier")
            if run is not None:
                return run
            continue

        outcome = None  # set to a SegmentRun to return, _RELOCALIZE to loop
        while outcome is None:
            t_next = length
            for a in stop_arcs:
                if a > s:
                    t_next = a
                    break
            target = min(s + h, t_next)
            pt1 = seg.point_at(target)
            cx1 = dom.coordinate(pt1)

            check = validate_step(f, loc, cx1, cfg.safety)
            if not check.accepted:
                outcome = reject()
                continue

            try:
                poly1 = local_monic_factor(
                    f,
                    cx1,
                    loc.circle,
                    about=loc.z0,
                    guard=cfg.contour_guard,
                    floor_rel=cfg.contour_floor_rel,
                    m_floor_rel=cfg.m_floor_rel,
                    check_cofactor=True,
                )
                if poly1.degree != loc.n:
                    raise NonIntegerWindingError(
                        f"count changed {loc.n} -> {poly1.degree} despite certificate"
                    )
                roots = poly_roots(poly1, tol=cfg.residual_tol)
            except _STEP_ERRORS:
                outcome = reject()
                continue

            m = match_root(roots, w, cfg.ambiguity_ratio, cfg.cluster_tol)
            if m.ambiguous:
                ambiguous_streak += 1
                if ambiguous_streak < cfg.tie_break_after:
                    outcome = reject()
                    continue
                # persistent symmetric tie (e.g. stepping off a multiple
                # root): deterministic lexicographic escape
                d = np.abs(roots - w)
                near = roots[d <= d.min() * (1.0 + 1e-12)]
                w1 = complex(near[0])
            else:
                w1 = m.value
            ambiguous_streak = 0

            w1, res1 = polish_root(f, cx1, w1, cfg.polish_iters)
            # if the incumbent is still a bit-exact root (F flushed to zero,
            # e.g. exp(u)-1 with u below cancellation scale) the matched
            # candidate only adds quadrature noise; keep the incumbent
            try:
                if abs(f.eval(cx1, w)) == 0.0:
                    w1, res1 = w, 0.0
            except NonFiniteError:
                pass
            if res1 > cfg.residual_tol or abs(w1 - w) > 2.0 * loc.r:
                outcome = reject()
                continue

            # accepted
            s, pt, cx, w = target, pt1, cx1, w1
            smp = BranchSample(seg_index, s, pt, w, res1)
            samples.append(smp)
            window.append(smp)
            accepted += 1
            if cfg.certify_steps:
                try:
                    n_after = count_zeros(
                        f, cx, loc.circle, cfg.contour_guard, cfg.contour_floor_rel
                    )
                except _STEP_ERRORS:
                    n_after = -1
                if n_after != loc.n:
                    certify_failures += 1
            if s in stop_set:
                record_junction(pt, w)
            if abs(w) > cfg.blowup_threshold:
                return finish(
                    Status.ASYMPTOTIC_BLOWUP,
                    {"max_abs_w": abs(w), "last_residual": res1},
                    pt,
                )
            if s >= length:
                record_junction(pt, w)
                return finish(Status.COMPLETED, {}, None)
            if accepted % cfg.soft_check_every == 0 and _blowup_evidence(
                window, length, cfg, h=h, steps_left=cfg.max_steps - accepted
            ):
                return finish(
                    Status.ASYMPTOTIC_BLOWUP, {"max_abs_w": abs(w), "soft": True}, pt
                )
            if accepted >= cfg.max_steps:
                run = stall("step budget exhausted", allow_retry=False)
                if run is None:
                    raise SolverError("internal: budget stall must classify")
                return run
            grow_run += 1
            if grow_run >= cfg.grow_after:
                h = min(h * cfg.grow_factor, h_max)
                grow_run = 0
            outcome = _RELOCALIZE
        if outcome is not _RELOCALIZE:
            return outcome


def _with_certify(diag: dict, cfg: EngineConfig, accepted: int, failures: int) -> dict:
    diag = dict(diag)
    diag["accepted_steps"] = accepted
    if cfg.certify_steps:
        diag["certify_checked"] = accepted
        diag["certify_failures"] = failures
    return diag


def _try_snap(f, seg, seg_index, s, w, cfg, samples, record_junction):
    """Stalled within snap_eps of the segment end: accept the endpoint if
    the branch value still solves there."""
    end = seg.point_at(seg.length)
    cx_end = seg.domain.coordinate(end)
    try:
        wb, resb = polish_root(f, cx_end, w, cfg.polish_iters)
    except OutOfDomainError:
        return None
    if resb <= cfg.residual_tol and abs(wb - w) <= max(1.0, abs(w)):
        smp = BranchSample(seg_index, seg.length, end, wb, resb)
        samples.append(smp)
        record_junction(end, wb)
        return SegmentRun(
            samples,
            TerminationStatus(Status.COMPLETED, {"snapped": True, "snap_gap": seg.length - s}),
            None,
        )
    return None


def _endpoint_diagnostics(f: EntireFunction, seg: PathSegment, cfg: EngineConfig) -> dict:
    """Probe the unreached segment end for degeneracy (diagnostic only)."""
    end = seg.point_at(seg.length)
    cx = seg.domain.coordinate(end)
    try:
        pr = degeneracy_probe(f, cx, cfg.probe_radii, cfg.probe_samples, cfg.probe_tol)
    except (OutOfDomainError, NonFiniteError):
        return {}
    out = {"endpoint_degenerate": pr.degenerate, "endpoint_coordinate": cx}
    if pr.degenerate:
        out["endpoint_constant"] = pr.constant
    return out


def continue_branch(
    f: EntireFunction,
    domain: ParamDomain,
    x0: DomainPoint,
    z0: complex,
    cfg: Optional[EngineConfig] = None,
) -> RootBranch:
    """Track the root branch through (x0, z0) over the whole domain.

    The seed is Newton-polished and must satisfy |F(x0, w0)| within
    seed_tol of zero (relative to the local function scale), else
    SeedInvalid.  A degenerate seed point (z -> F(x0, z) constant) is a
    DegenerateBarrier at x0.  The domain is covered by leaf-directed sweep
    segments from x0 with shared prefixes deduplicated; junction values are
    recorded once and reused, so the branch is single-valued at junctions
    by construction.
    """
    cfg = cfg or EngineConfig()
    cx0 = domain.coordinate(x0)
    w0, res0 = polish_root(f, cx0, complex(z0), cfg.polish_iters)
    tol0 = cfg.seed_tol * (1.0 + _seed_scale(f, cx0, w0))
    if not np.isfinite(res0) or res0 > tol0:
        return RootBranch(
            (),
            TerminationStatus(
                Status.SEED_INVALID,
                {"seed_residual": res0, "seed_tolerance": tol0},
            ),
            x0,
            (),
            domain,
        )
    probe = degeneracy_probe(f, cx0, cfg.probe_radii, cfg.probe_samples, cfg.probe_tol)
    if probe.degenerate:
        return RootBranch(
            (BranchSample(0, 0.0, x0, w0, res0),),
            TerminationStatus(
                Status.DEGENERATE_BARRIER,
                {"constant": probe.constant, "at_seed": True},
            ),
            x0,
            (),
            domain,
        )

    sweeps = tuple(domain.sweep_targets(x0))
    if not sweeps:
        return RootBranch(
            (BranchSample(0, 0.0, x0, w0, res0),),
            TerminationStatus(Status.COMPLETED, {"trivial_domain": True}),
            None,
            (),
            domain,
        )

    junction: dict[DomainPoint, complex] = {x0: w0}
    resume_pts = [sw.segment.point_at(sw.resume_arc) for sw in sweeps]
    all_samples: list[BranchSample] = []
    runs: list[SegmentRun] = []
    status = TerminationStatus(Status.COMPLETED, {})
    where: Optional[DomainPoint] = None
    for i, sw in enumerate(sweeps):
        stops = []
        for j in range(i + 1, len(sweeps)):
            try:
                a = sw.segment.arc_of(resume_pts[j])
            except OutOfDomainError:
                continue
            if a > sw.resume_arc:
                stops.append(a)
        if resume_pts[i] not in junction:
            raise SolverError(
                f"internal: no junction value at resume point of sweep {i}"
            )
        run = extend_segment(
            f,
            sw,
            junction[resume_pts[i]],
            cfg,
            seg_index=i,
            stops=stops,
            junction=junction,
        )
        runs.append(run)
        all_samples.extend(run.samples)
        if not run.completed:
            status, where = run.status, run.location
            break

    if cfg.certify_steps:
        # roll segment-level recount tallies up to the branch status
        checked = sum(r.status.diagnostics.get("certify_checked", 0) for r in runs)
        failed = sum(r.status.diagnostics.get("certify_failures", 0) for r in runs)
        status = TerminationStatus(
            status.kind,
            {**status.diagnostics, "certify_checked": checked, "certify_failures": failed},
        )
    return RootBranch(tuple(all_samples), status, where, sweeps, domain)


def _seed_scale(f: EntireFunction, cx: float, w: complex) -> float:
    """Typical |F| magnitude near the seed, for a relative seed tolerance."""
    r = 0.5 * (1.0 + abs(w))
    for _ in range(3):
        zs = w + r * np.exp(2j * np.pi * np.arange(8) / 8)
        try:
            return float(np.abs(f.eval_many(cx, zs)).max())
        except NonFiniteError:
            r *= 0.25
    return 0.0


def resample_branch(
    f: EntireFunction,
    branch: RootBranch,
    total: int,
    cfg: Optional[EngineConfig] = None,
    arcs_by_segment: Optional[dict[int, Sequence[float]]] = None,
) -> list[BranchSample]:
    """Evenly spaced output samples along the covered part of the branch.

    Raw adaptive samples are linearly interpolated at the target arcs and
    Newton-polished; residuals are reported honestly (no filtering).  When
    arcs_by_segment is given those arcs are used verbatim (oracle tests);
    otherwise ``total`` samples are distributed across segments
    proportionally to covered length, at least two per segment.
    """
    cfg = cfg or EngineConfig()
    by_seg: dict[int, list[BranchSample]] = {}
    for smp in branch.samples:
        by_seg.setdefault(smp.segment, []).append(smp)
    spans = {
        i: (raws[0].arc, raws[-1].arc, raws[-1].arc - raws[0].arc)
        for i, raws in by_seg.items()
    }
    total_len = sum(sp[2] for sp in spans.values())
    # largest-remainder apportionment: exactly `total` rows unless the
    # two-per-segment minimum forces more
    live = [i for i in sorted(by_seg) if spans[i][2] > 0.0]
    quota: dict[int, int] = {}
    if total_len > 0.0 and live:
        raw = {i: total * spans[i][2] / total_len for i in live}
        quota = {i: max(2, int(raw[i])) for i in live}
        short = total - sum(quota.values())
        if short > 0:
            order = sorted(live, key=lambda i: raw[i] - int(raw[i]), reverse=True)
            for j in range(short):
                quota[order[j % len(order)]] += 1
    out: list[BranchSample] = []
    for i in sorted(by_seg):
        raws = by_seg[i]
        lo, hi, span = spans[i]
        seg = branch.sweeps[i].segment if i < len(branch.sweeps) else None
        if arcs_by_segment is not None:
            targets = list(arcs_by_segment.get(i, ()))
        elif span == 0.0 or total_len == 0.0:
            targets = [lo]
        else:
            targets = list(np.linspace(lo, hi, quota[i]))
        arcs = [r.arc for r in raws]
        for arc in targets:
            arc = min(max(arc, lo), hi)
            j = int(np.searchsorted(arcs, arc, side="right")) - 1
            j = min(max(j, 0), len(raws) - 1)
            if j + 1 < len(raws) and raws[j + 1].arc > raws[j].arc and arc > raws[j].arc:
                t = (arc - raws[j].arc) / (raws[j + 1].arc - raws[j].arc)
                w_guess = raws[j].w * (1.0 - t) + raws[j + 1].w * t
            else:
                w_guess = raws[j].w
            if seg is not None:
                point = seg.point_at(arc)
                cx = branch.domain.coordinate(point)
            else:
                point = raws[j].point
                cx = branch.domain.coordinate(point)
            w, res = polish_root(f, cx, w_guess, cfg.polish_iters)
            out.append(BranchSample(i, float(arc), point, w, res))
    return out
