"""Semi-implicit time integration of the surface and radial FHN systems.

The linear part (Lap - alpha) is treated implicitly, the cubic remainder
h(u1) = f(u1) + alpha*u1 explicitly; the recovery variable is updated
implicitly in u2 using the fresh u1.  The theta diffusion scales like
1/rho^2 and is arbitrarily stiff on thin cylinders, so the implicit solve
is mandatory there.

Two interchangeable solvers for (I - tau (Lap - alpha)) x = b:

  * "cg": matrix-free conjugate gradients in the sqrt(g)-weighted inner
    product (the operator is SPD there);
  * "theta_modes": an azimuthal FFT decomposition into per-mode cyclic
    tridiagonal systems, valid because the coefficients are
    theta-independent.  Factorizations are cached per stepper.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import diagnostics
from .errors import LinearSolveDiverged, NonFiniteState, ShapeMismatch
from .geometry import RadiusProfile
from .operators import (
    State,
    apply_laplacian,
    fhn_h,
    project_radial,
    scalar_inner,
)

SCHEMES = ("imex_euler", "imex_cn")
SOLVERS = ("cg", "theta_modes")


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: str = "imex_euler"
    solver: str = "cg"
    tol: float = 1e-10
    max_iter: int = 2000

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.tol < 1e-4:
            raise ValueError("linear-solve tolerance must lie in (0, 1e-4)")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")


def default_dt(u: State) -> float:
    """min(0.1, 0.25 / (alpha + max |h'|)) with h' from the current field."""
    a = u.params.alpha
    v = u.u1
    hprime = np.abs(-3.0 * v * v + 2.0 * (a + 1.0) * v)
    return min(0.1, 0.25 / (a + float(hprime.max(initial=0.0))))


@dataclass
class ProbeSet:
    """What to sample along a trajectory."""

    stride: int = 1
    level: float | None = None     # follow one down-crossing of u1 over time
    lyapunov: bool = True          # X0, X1, W, perp/avg H^{1,0} (surface only)
    record_mean: bool = False      # store the radial average state per sample
    snapshot_stride: int | None = None


@dataclass
class Trajectory:
    times: np.ndarray
    columns: dict
    mean_states: list | None = None
    snapshots: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def track_front(f: np.ndarray, x: np.ndarray, dx: float, level: float,
                prev: float | None = None, max_jump: float | None = None) -> float:
    """Downward crossing of `level`, sub-grid by linear interpolation.

    With `prev` unset, returns the rightmost crossing (unique for the step
    initial data).  With `prev` set, returns the crossing nearest `prev` in
    the periodic metric, rejecting jumps beyond `max_jump`; this keeps the
    tracker locked onto one front when secondary level sets appear elsewhere
    on the domain.  Returns NaN when no acceptable crossing exists.
    """
    nxt = np.roll(f, -1)
    down = (f >= level) & (nxt < level)
    if not down.any():
        return float("nan")
    idx = np.nonzero(down)[0]
    pos = x[idx] + dx * (f[idx] - level) / (f[idx] - nxt[idx])
    if prev is None or not np.isfinite(prev):
        return float(pos.max())
    length = x[-1] + dx
    gap = np.abs((pos - prev + 0.5 * length) % length - 0.5 * length)
    best = int(gap.argmin())
    if max_jump is not None and gap[best] > max_jump:
        return float("nan")
    return float(pos[best])


class _CgSolver:
    """Matrix-free CG for (I - tau (Lap - alpha)) in the weighted inner product."""

    def __init__(self, profile, tau, alpha, tol, max_iter):
        self.profile = profile
        self.tau = tau
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter

    def _apply(self, v):
        return v - self.tau * (apply_laplacian(v, self.profile) - self.alpha * v)

    def solve(self, b, x0):
        prof = self.profile
        b_norm = scalar_inner(b, b, prof)
        if b_norm == 0.0:
            return np.zeros_like(b)
        x = x0.copy()
        r = b - self._apply(x)
        p = r.copy()
        rs = scalar_inner(r, r, prof)
        target = self.tol**2 * b_norm
        if rs <= target:
            return x
        for _ in range(self.max_iter):
            ap = self._apply(p)
            alpha = rs / scalar_inner(p, ap, prof)
            x = x + alpha * p
            r = r - alpha * ap
            rs_new = scalar_inner(r, r, prof)
            if rs_new <= target:
                return x
            p = r + (rs_new / rs) * p
            rs = rs_new
        raise LinearSolveDiverged(
            f"CG did not reach tol {self.tol} in {self.max_iter} iterations"
        )


class _ThetaModeSolver:
    """Direct solve via azimuthal FFT and per-mode cyclic tridiagonal LU.

    Valid because all profiles here are theta-independent; each azimuthal
    mode m sees the 1D operator with an extra diagonal term b/sqrt(g) *
    lambda_m from the discrete theta eigenvalue.
    """

    def __init__(self, profile, tau, alpha, kind):
        self.profile = profile
        self.kind = kind
        grid = profile.grid
        n_x = grid.n_x
        dx2 = grid.dx**2
        a = profile.a_face
        a_prev = np.roll(a, 1)
        inv_sg = 1.0 / profile.sqrt_g
        lower = -tau * a_prev * inv_sg / dx2  # coupling to node i-1
        upper = -tau * a * inv_sg / dx2       # coupling to node i+1
        diag_x = 1.0 - tau * (-(a + a_prev) * inv_sg / dx2 - alpha)
        theta_coef = profile.b * inv_sg       # equals 1/rho^2

        if kind == "radial":
            modes = [0.0]
        else:
            dth = grid.dtheta
            m = np.arange(grid.n_theta // 2 + 1)
            modes = -(2.0 - 2.0 * np.cos(m * dth)) / dth**2

        self._lu = []
        for lam in np.atleast_1d(modes):
            diag = diag_x - tau * theta_coef * lam
            mat = sp.diags(
                [diag, upper[:-1], lower[1:]], [0, 1, -1], format="lil"
            )
            mat[0, n_x - 1] = lower[0]
            mat[n_x - 1, 0] = upper[n_x - 1]
            self._lu.append(splu(sp.csc_matrix(mat)))

    def solve(self, b, x0):
        if self.kind == "radial":
            return self._lu[0].solve(b)
        bhat = np.fft.rfft(b, axis=1)
        out = np.empty_like(bhat)
        for m, lu in enumerate(self._lu):
            out[:, m] = lu.solve(bhat[:, m].real) + 1j * lu.solve(bhat[:, m].imag)
        return np.fft.irfft(out, n=b.shape[1], axis=1)


def _make_solver(profile, tau, params, cfg, kind):
    if cfg.solver == "theta_modes":
        return _ThetaModeSolver(profile, tau, params.alpha, kind)
    return _CgSolver(profile, tau, params.alpha, cfg.tol, cfg.max_iter)


class Stepper:
    """One-step integrator bound to a profile and config (solver reuse)."""

    def __init__(self, profile: RadiusProfile, params, cfg: StepperConfig,
                 kind: str):
        self.profile = profile
        self.params = params
        self.cfg = cfg
        self.kind = kind
        self._full = _make_solver(profile, cfg.dt, params, cfg, kind)
        self._half = (
            _make_solver(profile, 0.5 * cfg.dt, params, cfg, kind)
            if cfg.scheme == "imex_cn"
            else None
        )

    def _check_shape(self, u: State):
        expected = (
            (self.profile.grid.n_x,)
            if self.kind == "radial"
            else (self.profile.grid.n_x, self.profile.grid.n_theta)
        )
        if u.u1.shape != expected:
            raise ShapeMismatch(f"state {u.u1.shape}, stepper {expected}")

    def step(self, u: State) -> State:
        self._check_shape(u)
        p = self.params
        dt = self.cfg.dt

        # predictor / Euler step
        rhs = u.u1 + dt * (fhn_h(u.u1, p.alpha) - u.u2)
        u1_e = self._full.solve(rhs, u.u1)
        u2_e = (u.u2 + dt * p.eps * u1_e) / (1.0 + dt * p.eps * p.gamma)

        if self.cfg.scheme == "imex_euler":
            u1n, u2n = u1_e, u2_e
        else:
            # trapezoidal corrector: Crank-Nicolson on (Lap - alpha), Heun
            # on the explicit part, trapezoid on the recovery relaxation
            lin0 = apply_laplacian(u.u1, self.profile) - p.alpha * u.u1
            n0 = fhn_h(u.u1, p.alpha) - u.u2
            n1 = fhn_h(u1_e, p.alpha) - u2_e
            rhs_c = u.u1 + 0.5 * dt * (lin0 + n0 + n1)
            u1n = self._half.solve(rhs_c, u1_e)
            u2n = (
                u.u2 * (1.0 - 0.5 * dt * p.eps * p.gamma)
                + 0.5 * dt * p.eps * (u.u1 + u1n)
            ) / (1.0 + 0.5 * dt * p.eps * p.gamma)

        if not (np.isfinite(u1n).all() and np.isfinite(u2n).all()):
            raise NonFiniteState("overflow during step; reduce dt")
        return State(u1n, u2n, p)


def step(u: State, profile: RadiusProfile, cfg: StepperConfig) -> State:
    """Single time step (standalone convenience; simulate reuses solvers)."""
    return Stepper(profile, u.params, cfg, u.kind).step(u)


class _FrontTracker:
    """Stateful wrapper around track_front: follows one front between samples.

    The first sample seeds the tracker with the rightmost crossing.  Later
    samples take the crossing nearest the previous position; once the front
    is lost (no crossing within the jump budget) every further sample is NaN
    so that collisions and annihilations do not contaminate speed fits.
    """

    def __init__(self, profile: RadiusProfile, level: float):
        self.x = profile.grid.x
        self.dx = profile.dx
        self.level = level
        # jump budget between samples; generous for coarse probe strides
        self.max_jump = max(0.05 * profile.length, 20.0 * profile.dx)
        self.prev: float | None = None
        self.lost = False

    def __call__(self, f: np.ndarray) -> float:
        if self.lost:
            return float("nan")
        pos = track_front(f, self.x, self.dx, self.level,
                          prev=self.prev, max_jump=self.max_jump)
        if np.isnan(pos):
            self.lost = True
        else:
            self.prev = pos
        return pos


def _sample(u: State, profile: RadiusProfile, probes: ProbeSet, columns: dict,
            tracker: _FrontTracker | None = None):
    if probes.lyapunov and u.kind == "surface":
        columns.setdefault("X0", []).append(diagnostics.lyapunov_X0(u, profile))
        columns.setdefault("X1", []).append(diagnostics.lyapunov_X1(u, profile))
        columns.setdefault("W", []).append(diagnostics.remainder_W(u, profile))
        columns.setdefault("perp_h10", []).append(diagnostics.perp_h10(u, profile))
        ubar = State(project_radial(u.u1), project_radial(u.u2), u.params)
        columns.setdefault("avg_h10", []).append(
            diagnostics.h10_norm(ubar, profile)
        )
    if tracker is not None:
        f = u.u1 if u.kind == "radial" else project_radial(u.u1)
        columns.setdefault("pulse_x", []).append(tracker(f))


def _simulate(u0: State, profile: RadiusProfile, cfg: StepperConfig, t_final,
              probes: ProbeSet) -> Trajectory:
    if t_final <= 0:
        raise ValueError("final time must be positive")
    stepper = Stepper(profile, u0.params, cfg, u0.kind)
    n_steps = int(np.ceil(t_final / cfg.dt - 1e-12))

    times, columns = [], {}
    mean_states = [] if probes.record_mean else None
    snapshots = []
    tracker = _FrontTracker(profile, probes.level) if probes.level is not None else None

    def record(k, u):
        t = k * cfg.dt
        times.append(t)
        _sample(u, profile, probes, columns, tracker)
        if mean_states is not None:
            mean_states.append(
                State(project_radial(u.u1), project_radial(u.u2), u.params)
            )
        if probes.snapshot_stride is not None and k % probes.snapshot_stride == 0:
            snapshots.append((t, u.copy()))

    u = u0.copy()
    record(0, u)
    for k in range(1, n_steps + 1):
        try:
            u = stepper.step(u)
        except (LinearSolveDiverged, NonFiniteState) as err:
            err.args = (f"{err.args[0]} (at t={k * cfg.dt:g})",)
            raise
        if k % probes.stride == 0 or k == n_steps:
            record(k, u)

    return Trajectory(
        times=np.asarray(times),
        columns={k: np.asarray(v) for k, v in columns.items()},
        mean_states=mean_states,
        snapshots=snapshots,
        meta={"length": profile.length, "level": probes.level, "dt": cfg.dt},
    )


def simulate(u0: State, profile: RadiusProfile, cfg: StepperConfig, t_final,
             probes: ProbeSet | None = None) -> Trajectory:
    """Integrate the surface system to t_final, sampling diagnostics."""
    if u0.kind != "surface":
        raise ShapeMismatch("simulate expects a surface state")
    return _simulate(u0, profile, cfg, t_final, probes or ProbeSet())


def simulate_radial(w0: State, profile: RadiusProfile, cfg: StepperConfig,
                    t_final, probes: ProbeSet | None = None) -> Trajectory:
    """Integrate the effective radial system to t_final."""
    if w0.kind != "radial":
        raise ShapeMismatch("simulate_radial expects a radial state")
    return _simulate(w0, profile, cfg, t_final, probes or ProbeSet())
