"""The geodesic flow seen from the boundary: invariance and time averages.

Pairs of distinct boundary points parametrize geodesic lines; the measure
e^{2h(xi,eta)} dmu dmu is invariant under the group.  Integrals against it
are recovered by Hopf's argument: walk the group elements whose inverses
sit in a band along one geodesic, average a kernel there, and watch the
average settle near the space integral as the band grows.

Run: python3 demos/05_flow_and_hopf_averages.py
"""
from boundarylab.boundary import from_strings
from boundarylab.density import build_density
from boundarylab.flow import (
    BmsMeasure,
    ProductCylinder,
    bms_invariance_report,
    ergodic_experiment,
    flow_volume,
    kernel_integral,
    transform_rectangle,
    tube_enumerate,
)
from boundarylab.koopman import KernelStep, StepFunction
from boundarylab.words import GroupModel


def main() -> None:
    model = GroupModel(2, (1.0, 1.0))
    density = build_density(model)
    bms = BmsMeasure(density)

    print("== the pair measure and its invariance ==")
    pc = ProductCylinder(model.parse("ab"), model.parse("aB"))
    print(f"  m([ab] x [aB]) = {bms.mass(pc):.6f}  (= 9 * (1/12)^2 = 1/16)")
    g = model.invert(model.parse("a"))
    pieces = transform_rectangle(model, g, pc)
    moved = sum(bms.mass(q) for q in pieces)
    print(f"  after translating by a^-1: {len(pieces)} piece(s), total {moved:.6f}")
    rep = bms_invariance_report(density, trials=200, seed=31)
    print(f"  200 random rectangles: max invariance residual {rep.summary['max_residual']:.2e}")

    print("\n== tubes: the band of group elements along a geodesic ==")
    xi = from_strings(model, "", "B")
    eta = from_strings(model, "", "a")
    band = tube_enumerate(model, xi, eta, 0.0, 5.0, M=0.0)
    print(f"  band [0, 5] along (B^inf, a^inf): {[model.format(w) or 'e' for w in band]}")
    print(f"  flow box volume: {flow_volume(density):.4f}  (= 3/4 on unit weights)")

    print("\n== Hopf averages converge to the space integral ==")
    K = KernelStep.from_product(
        StepFunction.indicator(model, (0,)), StepFunction.indicator(model, (2,))
    )
    print(f"  target integral of the kernel: {kernel_integral(density, K):.6f}")
    rep = ergodic_experiment(density, K, n_pairs=20, T_grid=(25.0, 50.0, 100.0), seed=31)
    for T in (25.0, 50.0, 100.0):
        print(f"  T = {T:5.0f}: median relative error {rep.summary[f'median_rel_T{T:g}']:.3f}")
    print(f"  median J at T = 100: {rep.summary['median_J_at_max_T']:.6f}")


if __name__ == "__main__":
    main()
