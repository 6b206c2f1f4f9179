#!/usr/bin/env python3
"""
Pontrol Library Usage Examples.

This script demonstrates how to use the Pontrol library for:
- Normalizing raw population counts and reproduction numbers
- Simulating the uncontrolled epidemic
- Solving the optimal quarantine problem for both models
- Running the verification probes

Run this script to see example usage, or copy parts of it to build your own tools.
"""

# Standard library imports
from pathlib import Path

# First-party imports
from pontrol.dynamics import normalize
from pontrol.integrators import TimeGrid
from pontrol.models import ModelKind, RawPopulation
from pontrol.ocp import OcpProblem
from pontrol.output import trajectory_frame, write_csv
from pontrol.reproduction import (
    critical_control,
    r0_basic,
    r0_controlled,
    reference_params,
)
from pontrol.solvers import SolveReport, cross_validate, solve_fbsm
from pontrol.verification import probe_convexity, probe_gradient, probe_r0_threshold


def example_normalization() -> None:
    """Demonstrate normalization of raw counts."""
    print("=== Normalization Example ===")

    # A city of ten million with a handful of early cases
    raw = RawPopulation(
        S=9_998_500,
        E=500,
        I=800,
        J=200,
        R=0,
        N=10_000_000,
        beta1_tilde=2.58176e-8,
        beta2_tilde=2.58176e-9,
    )
    state, params = normalize(raw, reference_params())

    print(f"Initial fractions: s={state.s}, e={state.e}, i={state.i}, j={state.j}")
    print(f"Normalized betas: beta1={params.beta1:.6f}, beta2={params.beta2:.6f}")
    print(f"Basic reproduction number: {r0_basic(params):.3f}")


def example_reproduction_numbers() -> None:
    """Demonstrate reproduction numbers under constant quarantine."""
    print("\n=== Reproduction Number Example ===")

    for r0 in (3.0, 6.0):
        params = reference_params(r0)
        print(f"\nR0 = {r0}:")
        for kind in ModelKind:
            controlled = r0_controlled(kind, params, 0.9)
            needed = critical_control(kind, params)
            print(
                f"  {kind.label}: R(u=0.9) = {controlled:.4f}, "
                f"growth stops from u = {needed:.4f}"
            )


def example_simulation() -> None:
    """Demonstrate an uncontrolled simulation."""
    print("\n=== Simulation Example ===")

    problem = OcpProblem(
        ModelKind.MODEL1, params=reference_params(3.0), grid=TimeGrid(180.0, 1800)
    )
    states = problem.simulate(None)
    day, value = states.peak()
    print(f"Peak of infected fraction: {value:.4f} on day {day:.1f}")

    output_path = Path("example_trajectory.csv")
    write_csv(trajectory_frame(states), output_path)
    print(f"Trajectory saved to: {output_path}")


def example_optimal_control() -> SolveReport:
    """Demonstrate solving the optimal quarantine problem."""
    print("\n=== Optimal Control Example ===")

    # A shorter horizon and coarser grid keep the example fast
    problem = OcpProblem(
        ModelKind.MODEL2, params=reference_params(3.0), grid=TimeGrid(30.0, 600)
    )
    report = solve_fbsm(problem)

    print(f"Converged: {report.converged} after {report.iterations} iterations")
    print(f"Optimal cost Q* = {report.q_star:.9e}")
    print(f"Infected at the horizon: {report.infected_terminal:.6e}")
    print(f"Quarantine at t=0: {report.u_star.values[0]:.4f}")
    print(f"Quarantine at t=T: {report.u_star.values[-1]:.4f}")

    for name, probe in report.lemma_probes.items():
        status = "pass" if probe.passed else "FAIL"
        note = " (vacuous)" if probe.vacuous else ""
        print(f"  {name}: {status}{note}")

    # Compare against projected gradient descent
    comparison = cross_validate(problem)
    delta_q = comparison.delta_q_relative
    print(f"Relative cost difference between solvers: {delta_q:.2e}")
    print(f"Largest control difference: {comparison.delta_u_sup:.2e}")

    return report


def example_verification() -> None:
    """Demonstrate the verification probes."""
    print("\n=== Verification Example ===")

    reports = [
        probe_r0_threshold(),
        probe_convexity(trials=2000, seed=0),
        probe_gradient(
            OcpProblem(ModelKind.MODEL1, grid=TimeGrid(15.0, 1500)), directions=4
        ),
    ]
    for report in reports:
        status = "pass" if report.passed else "FAIL"
        print(
            f"  {report.name}: {status} "
            f"({report.trials} trials, worst {report.worst_residual:.2e})"
        )


def main() -> None:
    """Run all examples."""
    print("Pontrol Library Examples")
    print("=" * 50)

    # Run examples in order
    example_normalization()
    example_reproduction_numbers()
    example_simulation()
    example_optimal_control()
    example_verification()

    print("\n" + "=" * 50)
    print("Examples complete!")
    print("\nFiles created:")
    print("  - example_trajectory.csv (uncontrolled Model-1 trajectory)")
    print("\nNext steps:")
    print("  1. Run 'pontrol print-defaults > scenario.toml' and edit the scenario")
    print("  2. Solve it with 'pontrol solve --config scenario.toml'")
    print("  3. Copy parts of this script to build your own tools")
    print("  4. See the README for library API documentation")


if __name__ == "__main__":
    main()
