"""When do two weightings of the same free group look alike at infinity?

Normalize each word metric by its growth exponent.  If h1 |g|_1 - h2 |g|_2
stays bounded, the metrics are roughly similar, their boundary measures are
comparable, and the identity on the boundary is bi-Holder of the expected
exponent.  If it grows linearly, the measures drift apart cylinder by
cylinder.  Both sides of the dichotomy are measured here.

Run: python3 demos/06_classifying_weightings.py
"""
from boundarylab.classify import (
    density_ratio_report,
    holder_fit_report,
    metric_pair,
    similarity_deviation_report,
)
from boundarylab.words import GroupModel


def show(label: str, w1: tuple, w2: tuple) -> None:
    mp = metric_pair(GroupModel(2, w1), GroupModel(2, w2))
    sim = similarity_deviation_report(mp, r_max=8.0)
    dens = density_ratio_report(mp, depth=10)
    print(f"  {label}: weights {w1} vs {w2}")
    print(f"    normalized-length deviation slope {sim.summary['slope']:7.4f}"
          f" -> {sim.summary['verdict']}")
    print(f"    cylinder-ratio log-spread slope   {dens.summary['log_slope']:7.4f}"
          f" -> {dens.summary['verdict']}")


def main() -> None:
    print("== the dichotomy on three generator weightings ==")
    show("homothetic ", (1.0, 2.0), (2.0, 4.0))
    show("rebalanced ", (1.0, 1.0), (1.0, 2.0))
    show("swapped    ", (1.0, 2.0), (2.0, 1.0))

    print("\n== the boundary identity map is bi-Holder ==")
    mp = metric_pair(GroupModel(2, (1.0, 1.0)), GroupModel(2, (2.0, 2.0)))
    rep = holder_fit_report(mp, samples=300, seed=51)
    print(f"  homothetic pair: ln d2 vs ln d1 slope {rep.summary['slope']:.4f},"
          f" D1/D2 = {rep.summary['dimension_ratio']:.4f},"
          f" max residual {rep.summary['residual_max']:.2e}")
    print(f"  cross-ratio slope {rep.summary['cross_ratio_slope']:.4f}"
          " (Moebius-type comparison of six-point configurations)")


if __name__ == "__main__":
    main()
