"""One pass/fail line per verified claim; run with -v to see the list."""
import pytest

from boundarylab import acceptance

EXPECTED_CHECKS = (
    "exponent-unit-value",
    "exponent-weighted-root",
    "exponent-homogeneity",
    "density-cylinder-additivity",
    "density-exact-masses",
    "density-truncated-series",
    "conformality-derivative",
    "conformality-chain-rule",
    "shadow-unit-exact-ratios",
    "shadow-weighted-spread",
    "ahlfors-regularity",
    "growth-slope",
    "koopman-unitarity",
    "koopman-projection-norm",
    "koopman-constant-pairing",
    "matrix-coefficient-decay",
    "sr-partition",
    "sr-norm-bounds",
    "sr-pairing-convergence",
    "projection-error-ladder",
    "cocycle-tau-identity",
    "cocycle-rho-sigma",
    "bms-invariance",
    "bms-exact-masses",
    "ergodic-hopf-median",
    "classify-similar-pair",
    "classify-deviation-slope",
    "classify-verdict-agreement",
    "classify-holder-slope",
)


@pytest.fixture(scope="module")
def ctx():
    return acceptance.build_context()


def test_registry_is_frozen():
    assert tuple(name for name, _ in acceptance.CHECKS) == EXPECTED_CHECKS


@pytest.mark.parametrize(
    "name,fn", acceptance.CHECKS, ids=[name for name, _ in acceptance.CHECKS]
)
def test_acceptance(name, fn, ctx):
    res = acceptance.run_check(name, fn, ctx)
    assert res.passed, f"{name}: {res.detail}"
