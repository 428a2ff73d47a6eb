"""Smoke test for the adiabatic_dicke extension module.

Build and run from the repository root:

    cargo build --release -p adiabatic-dicke-python --features extension-module
    cp target/release/libadiabatic_dicke_py.so python/adiabatic_dicke.so
    python3 python/smoke_test.py

or `maturin develop -m crates/python/Cargo.toml` and run the script directly.
"""

import sys

import adiabatic_dicke as ad


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    c = ad.quartic_constants(1e-8)
    assert close(c.beta0, 1.06036, 1e-4), c
    assert close(c.beta1, 0.36203, 1e-4), c
    assert close(c.k_const, 0.46, 5e-3), c

    points = ad.sweep([1.0, 0.5], [64, 4])
    assert [(p.n_qubits, p.alpha) for p in points] == [(4, 0.5), (4, 1.0), (64, 0.5), (64, 1.0)]
    assert all(p.converged for p in points)
    for p in points:
        assert close(p.sy2_per_n2, 1.0 / p.n_qubits, 1e-15)
        assert close(p.sx2_per_n2 + p.sz2_per_n2, 1.0 + 1.0 / p.n_qubits, 1e-14)

    big = ad.solve(2.0, 1 << 14)
    limit = ad.thermo_limit(2.0)
    assert close(big.sx_per_n, limit["sx_per_n"], 0.005), big
    assert close(big.e0_reduced / big.n_qubits, limit["e0_per_n"], 0.125), big

    d, l, alpha, nd = ad.reduce(1.0, 5.0, 0.5, 100)
    assert close(d, 10.0, 1e-14) and close(alpha, 0.1, 1e-14) and close(nd, 1000.0, 1e-11)

    zeta, _, _ = ad.symanzik_map(0.9, 100.0)
    assert close(zeta, (200 / 0.81) ** (2 / 3) * 0.1, 1e-12)

    ns = [2**k for k in range(6, 13)]
    exponent, prefactor, r2 = ad.fit_exponent(ns, [3.0 * n ** -0.5 for n in ns])
    assert close(exponent, -0.5, 1e-12) and close(prefactor, 3.0, 1e-12) and r2 > 0.999999

    try:
        ad.solve(1.0, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("N = 0 accepted")

    checks = ad.run_invariants()
    failed = [name for name, passed, *_ in checks if not passed]
    assert not failed, failed

    print(f"ok: {len(checks)} invariant checks, beta0 = {c.beta0:.6f}, "
          f"sx(alpha=2, N=2^14) = {big.sx_per_n:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
