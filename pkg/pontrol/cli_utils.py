"""CLI utilities and business logic.

Exit codes and worker counts used by the command-line front end.
"""

# Standard library imports
import os
from typing import Final, Mapping, Optional

# Exit codes
EXIT_OK: Final[int] = 0
EXIT_CONFIG_ERROR: Final[int] = 2
EXIT_NOT_CONVERGED: Final[int] = 3
# A failed forward pass shares the non-convergence code
EXIT_INTEGRATION_FAILURE: Final[int] = EXIT_NOT_CONVERGED
EXIT_PROBE_FAILURE: Final[int] = 4

THREADS_ENV_VAR: Final[str] = "PONTROL_THREADS"


def read_thread_cap(environ: Optional[Mapping[str, str]] = None) -> Optional[int]:
    """Read the worker cap from ``PONTROL_THREADS``.

    Args:
        environ: Environment mapping (``os.environ`` by default)

    Returns:
        The cap (at least 1), or None if the variable is unset. Values that
        are not positive integers count as 1.
    """
    env = os.environ if environ is None else environ
    raw = env.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return None
    try:
        return max(int(raw), 1)
    except ValueError:
        return 1


def resolve_worker_count(
    task_count: int, environ: Optional[Mapping[str, str]] = None
) -> int:
    """Number of sweep workers.

    Args:
        task_count: Number of independent tasks
        environ: Environment mapping (``os.environ`` by default)

    Returns:
        ``min(cpu count, task_count, PONTROL_THREADS)``, at least 1
    """
    workers = min(os.cpu_count() or 1, max(task_count, 1))
    cap = read_thread_cap(environ)
    if cap is not None:
        workers = min(workers, cap)
    return max(workers, 1)


def solve_exit_code(converged: bool) -> int:
    """Exit code after a solve."""
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def verify_exit_code(passed: bool) -> int:
    """Exit code after a probe suite."""
    return EXIT_OK if passed else EXIT_PROBE_FAILURE
