"""The boundary representation: unitarity, decay, and averaged operators.

Composing with the group action and multiplying by the square root of the
conformal derivative gives a unitary operator pi(g) on L^2(mu).  As |g|
grows, <pi(g) phi, psi> approaches a product of boundary limits at the
rate (1+|g|)^(-1/D), and annulus averages S_R of pi against a step kernel
stay uniformly bounded while their pairings converge to the kernel pairing.

Run: python3 demos/04_koopman_and_decay.py
"""
import random

from boundarylab.boundary import from_strings
from boundarylab.density import build_density
from boundarylab.koopman import (
    KernelStep,
    StepFunction,
    build_SR,
    decay_report,
    distance_step_function,
    koopman_apply,
    norm2,
    sr_convergence_report,
)
from boundarylab.words import GroupModel

SR = dict(alpha=1.5, C=1.5, tau_prime=2.0, sigma0=1.5)


def main() -> None:
    model = GroupModel(2, (1.0, 1.0))
    density = build_density(model)
    rng = random.Random(21)

    print("== pi(g) is unitary on step functions ==")
    phi = StepFunction.indicator(model, model.parse("ab"))
    for _ in range(3):
        g = model.random_word(rng, 4)
        moved = koopman_apply(density, g, phi)
        print(f"  g = {model.format(g):4s}: ||pi(g) phi|| = {norm2(density, moved):.10f}"
              f"  (||phi|| = {norm2(density, phi):.10f})")

    print("\n== matrix coefficients approach their boundary limits ==")
    psi = distance_step_function(density, from_strings(model, "", "b"), 3)
    rep = decay_report(density, StepFunction.indicator(model, (0,)), psi,
                       (2, 3, 4, 5, 6, 7, 8))
    print(f"  log-error slope against ln(1+n): {rep.summary['fit_slope']:.4f}"
          f"  (reference -1/D = {rep.summary['reference_slope']:.4f})")

    print("\n== annulus averages: bounded norms, convergent pairings ==")
    one = StepFunction.constant(model, 1.0)
    K = KernelStep.constant(model, 1.0)
    for r in (3.0, 4.0, 5.0):
        op = build_SR(density, K, r, **SR)
        print(f"  R = {r}: {len(op.terms())} terms,"
              f" ||S_R 1||_sup = {op.sup_norm_on_one():.4f}")
    rep = sr_convergence_report(density, K, one, one, (3.0, 4.0, 5.0), **SR)
    print(f"  pairing <S_R 1, 1> -> {rep.summary['target']:.6f}:"
          f" last error {rep.summary['final_error']:.2e}")


if __name__ == "__main__":
    main()
