"""Smoke test for the complement_opt_py extension module.

Build and install first, e.g. ``maturin develop -m crates/python/Cargo.toml``.
"""

import math

import complement_opt_py as co


def close(x, y, tol=1e-9):
    return abs(x - y) <= tol


def main():
    strong = co.CouplingConfig.strong()
    weak = co.CouplingConfig.weak()
    assert close(strong.a, math.cos(0.4 * math.pi), 1e-14)
    assert close(weak.a, math.cos(math.pi / 40), 1e-14)
    assert close(abs(strong.b) ** 2 + strong.a ** 2, 1.0, 1e-14)

    amps = co.evolve(strong, 10)
    oracle = co.evolve(strong, 10, oracle=True)
    assert len(amps) == 12
    assert all(abs(x - y) < 1e-12 for x, y in zip(amps, oracle))
    assert close(sum(abs(x) ** 2 for x in amps), 1.0, 1e-12)

    g1, g2, g3, norm, prob = co.gamma_coefficients(strong, [(0.0, 0.0)] * 3)
    assert g1 == 0 and close(g3.real, 1 / math.sqrt(2), 1e-15)
    assert close(prob, norm ** 2, 1e-15)

    v, p, c, residual = co.complementarity(0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0)
    assert (round(v, 12), round(p, 12), round(c, 12)) == (0.0, 0.0, 1.0)
    v, p, c, residual = co.complementarity_after(weak, [(0.7, 1.3), (2.1, 4.0)])
    assert abs(residual) < 1e-10

    r = co.maximize(strong, 4, "visibility")
    a8 = strong.a ** 8
    assert close(r.visibility, 1 / math.sqrt(1 + a8), 1e-8)
    assert len(r.angles) == 4 and r.converged
    c00, c01, c10 = r.state
    assert close(abs(c00) ** 2 + abs(c01) ** 2 + abs(c10) ** 2, 1.0, 1e-12)

    r = co.maximize(weak, 10, "concurrence", restarts=4, seed=3)
    assert r.concurrence >= 0.98

    profile = co.distinguishability_profile(strong)
    assert len(profile) == 20 and close(profile[0][1], math.sin(0.4 * math.pi) ** 2, 1e-14)

    assert co.reservoir_limit_concurrence(3.0, 0.0) == 1.0
    assert co.continuous_limit_gap(0.0, 1.0, 64) == 0.0

    for bad in (lambda: co.CouplingConfig(100.0, 1.0, 1), lambda: co.maximize(strong, 21, "visibility"),
                lambda: co.maximize(strong, 2, "entropy"), lambda: co.evolve(strong, 30)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test passed:", r)


if __name__ == "__main__":
    main()
