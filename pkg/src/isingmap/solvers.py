"""Solver engines: exhaustive search, tabu descent, simulated annealing.

The hot loops live in a compiled extension (isingmap._kernels) with a
pure-Python twin (isingmap._pykernels) selected at import time.  Set
ISINGMAP_PURE_PYTHON=1 to force the fallback.  All randomness is drawn
outside the kernels from per-restart PCG64 streams, so results for a
given seed are reproducible across runs, platforms, and kernel backends.
"""

from __future__ import annotations

import os
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, ProblemTooLargeError
from .graphs import fmt_num
from .qubo import QuboProblem, energy

_PURE_ENV = "ISINGMAP_PURE_PYTHON"
_EXACT_MAX_VARS = 26


def _select_impl():
    if os.environ.get(_PURE_ENV, "") not in ("", "0"):
        from . import _pykernels
        return _pykernels
    try:
        from . import _kernels
        return _kernels
    except ImportError:
        from . import _pykernels
        return _pykernels


_impl = _select_impl()
HAVE_COMPILED_KERNELS = bool(getattr(_impl, "COMPILED", False))


def kernel_backend() -> str:
    """Which kernel implementation this process selected at import."""
    return "compiled" if HAVE_COMPILED_KERNELS else "pure-python"


@dataclass(frozen=True, eq=False)
class Solution:
    """One solver outcome: a bitvector and its (recomputable) energy."""

    bits: np.ndarray
    energy: float
    engine: str
    seed: int | None = None
    elapsed: float = 0.0
    samples_evaluated: int = 0
    note: str = ""

    @classmethod
    def from_bits(cls, problem: QuboProblem, bits, engine="imported",
                  **kw) -> "Solution":
        b = np.asarray(bits, dtype=np.uint8)
        return cls(bits=b, energy=energy(problem, b), engine=engine, **kw)

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_json(self) -> dict:
        out = {
            "bits": self.bitstring(),
            "energy": self.energy,
            "engine": self.engine,
            "samples_evaluated": self.samples_evaluated,
            "elapsed_s": self.elapsed,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class SolverParams:
    """Knobs shared by the stochastic engines.

    Unset iteration/tenure/temperature values are filled from the problem
    size at solve time.  time_budget (seconds) is checked between
    restarts: a restart in progress always finishes.
    """

    time_budget: float | None = None
    max_iterations: int | None = None
    tabu_tenure: int | None = None
    restarts: int = 5
    sa_initial_temp: float | None = None
    sa_final_temp: float = 1e-3
    sa_sweeps: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.sa_sweeps < 1:
            raise ConfigError("sa_sweeps must be >= 1")
        if self.sa_final_temp <= 0:
            raise ConfigError("sa_final_temp must be > 0")
        if self.time_budget is not None and self.time_budget < 0:
            raise ConfigError("time_budget must be >= 0")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.tabu_tenure is not None and self.tabu_tenure < 1:
            raise ConfigError("tabu_tenure must be >= 1")
        if self.sa_initial_temp is not None and self.sa_initial_temp <= 0:
            raise ConfigError("sa_initial_temp must be > 0")


def _kernel_arrays(problem: QuboProblem):
    h, _, _, _ = problem._upper_arrays
    indptr, indices, values = problem._sym_csr
    return np.ascontiguousarray(h, dtype=np.float64), indptr, indices, values


def _empty_solution(engine, seed=None):
    return Solution(bits=np.zeros(0, dtype=np.uint8), energy=0.0,
                    engine=engine, seed=seed, elapsed=0.0,
                    samples_evaluated=1)


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([seed, restart])))


def solve_exact(problem: QuboProblem, params: SolverParams | None = None,
                impl=None) -> Solution:
    """Exhaustive minimization; ties go to the lexicographically smallest
    bitvector.  Refuses problems beyond 2**26 states."""
    impl = impl or _impl
    n = problem.n_vars
    if n == 0:
        return _empty_solution("exact")
    if n > _EXACT_MAX_VARS:
        raise ProblemTooLargeError(
            f"{n} variables exceed the exhaustive-search limit of "
            f"{_EXACT_MAX_VARS}; use the tabu or anneal engine")
    h, indptr, indices, values = _kernel_arrays(problem)
    bits = np.zeros(n, dtype=np.uint8)
    best_bits = np.zeros(n, dtype=np.uint8)
    start = time.perf_counter()
    e = impl.exact_search(h, indptr, indices, values, bits, best_bits)
    elapsed = time.perf_counter() - start
    return Solution(bits=best_bits, energy=float(e), engine="exact",
                    elapsed=elapsed, samples_evaluated=1 << n)


def _multistart(problem, params, engine, run_one, impl):
    """Shared restart loop: strict energy improvement keeps the earliest
    restart on ties; the time budget is checked between restarts."""
    n = problem.n_vars
    if n == 0:
        return _empty_solution(engine, seed=params.seed)
    h, indptr, indices, values = _kernel_arrays(problem)
    start = time.perf_counter()
    best = None
    samples = 0
    note = ""
    done = 0
    for r in range(params.restarts):
        rng = _restart_rng(params.seed, r)
        bits0 = rng.integers(0, 2, n, dtype=np.uint8)
        e0 = energy(problem, bits0)
        if params.time_budget is not None and \
                time.perf_counter() - start >= params.time_budget:
            if best is None:
                best = (float(e0), bits0)
                samples += 1
                note = "time budget exhausted before the first restart"
            else:
                note = (f"time budget stopped the search after {done} of "
                        f"{params.restarts} restarts")
            break
        e, used = run_one(rng, h, indptr, indices, values, bits0, e0, impl)
        samples += used
        done += 1
        if best is None or e[0] < best[0]:
            best = e
    elapsed = time.perf_counter() - start
    return Solution(bits=best[1], energy=best[0], engine=engine,
                    seed=params.seed, elapsed=elapsed,
                    samples_evaluated=samples, note=note)


def solve_tabu(problem: QuboProblem, params: SolverParams | None = None,
               impl=None) -> Solution:
    """Multi-start tabu descent (deterministic given the seed)."""
    params = params or SolverParams()
    impl = impl or _impl
    n = problem.n_vars
    max_iter = params.max_iterations or max(1000, 10 * n)
    tenure = params.tabu_tenure or min(20, n // 4) + 1

    def run_one(rng, h, indptr, indices, values, bits0, e0, impl):
        bits = bits0.copy()
        best_bits = np.zeros(n, dtype=np.uint8)
        delta = np.zeros(n)
        tabu_until = np.zeros(n, dtype=np.int64)
        best_e, flips = impl.tabu_run(h, indptr, indices, values, bits,
                                      best_bits, delta, tabu_until,
                                      float(e0), max_iter, tenure)
        return (float(best_e), best_bits), int(flips) + 1

    return _multistart(problem, params, "tabu", run_one, impl)


def solve_anneal(problem: QuboProblem, params: SolverParams | None = None,
                 impl=None) -> Solution:
    """Multi-start simulated annealing with a geometric cooling ladder.

    The starting temperature defaults to the largest one-flip energy
    magnitude at the restart's initial state, so acceptance begins near
    free and tightens toward sa_final_temp.
    """
    params = params or SolverParams()
    impl = impl or _impl
    n = problem.n_vars
    sweeps = params.sa_sweeps

    def run_one(rng, h, indptr, indices, values, bits0, e0, impl):
        uniforms = rng.random(sweeps * n)
        if params.sa_initial_temp is not None:
            t0 = params.sa_initial_temp
        else:
            acc = h + problem._scipy_csr @ bits0.astype(np.float64)
            deltas = np.where(bits0 == 1, -acc, acc)
            t0 = float(np.abs(deltas).max()) if n else 0.0
            if t0 <= 0.0:
                t0 = 1.0
        t0 = max(t0, params.sa_final_temp)
        if sweeps == 1:
            temps = np.array([t0])
        else:
            ratio = params.sa_final_temp / t0
            temps = t0 * ratio ** (np.arange(sweeps) / (sweeps - 1))
        bits = bits0.copy()
        best_bits = np.zeros(n, dtype=np.uint8)
        delta = np.zeros(n)
        best_e, accepts = impl.anneal_run(h, indptr, indices, values, bits,
                                          best_bits, delta, float(e0),
                                          uniforms, temps)
        return (float(best_e), best_bits), sweeps * n + 1

    return _multistart(problem, params, "anneal", run_one, impl)


ENGINES = {
    "exact": solve_exact,
    "tabu": solve_tabu,
    "anneal": solve_anneal,
}


def solve(problem: QuboProblem, engine: str = "tabu",
          params: SolverParams | None = None, impl=None) -> Solution:
    try:
        fn = ENGINES[engine]
    except KeyError:
        raise ConfigError(
            f"unknown engine {engine!r}; pick one of {sorted(ENGINES)}")
    return fn(problem, params, impl=impl)


def format_solution(solution: Solution, include_energy: bool = True) -> str:
    """Two-line text form: the bitstring, then the energy."""
    out = solution.bitstring() + "\n"
    if include_energy:
        out += fmt_num(solution.energy) + "\n"
    return out


def import_solution(problem: QuboProblem, text: str,
                    engine: str = "imported") -> Solution:
    """Parse a bitstring (plus optional energy line) against a problem.

    The energy is always recomputed; a stated energy that disagrees past
    1e-9 * (1 + |E|) triggers a warning but the bits win.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise DimensionError("no bitstring found in solution text")
    bitline = lines[0]
    if any(c not in "01" for c in bitline):
        raise DimensionError(
            f"solution line contains characters other than 0/1: {bitline!r}")
    if len(bitline) != problem.n_vars:
        raise DimensionError(
            f"solution has {len(bitline)} bits but the problem has "
            f"{problem.n_vars} variables")
    bits = np.frombuffer(bitline.encode(), dtype=np.uint8) - ord("0")
    bits = bits.astype(np.uint8)
    e = energy(problem, bits)
    if len(lines) > 1:
        stated = float(lines[1])
        if abs(stated - e) > 1e-9 * (1.0 + abs(e)):
            warnings.warn(
                f"stated energy {stated!r} disagrees with recomputed "
                f"{e!r}; using the recomputed value")
    return Solution(bits=bits, energy=e, engine=engine, samples_evaluated=1)
