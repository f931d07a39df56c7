"""Compare finite-difference curvature with the closed form to pin the sign convention.

Prints, for a few random specs, the relative distance of the numerical
Riemann tensor to ±(closed form); only the frozen sign should be small.
"""
import numpy as np

from pwlab import planewave as pw


def main() -> None:
    rng = np.random.default_rng(0)
    print(f"CURVATURE_SIGN = {pw.CURVATURE_SIGN:+.0f}")
    print(f"{'kind':>4} {'n':>2} {'rel(+closed)':>13} {'rel(-closed)':>13}")
    for kind in "ab":
        for n in (1, 2, 3):
            spec = pw.random_spec(rng, n, kind)
            pt = pw.random_point(spec, rng)
            Rf = pw.curvature_fd(spec, pt)
            Rc = pw.curvature_closed(spec, pt.u).tensor
            nrm = max(np.linalg.norm(Rc), 1e-300)
            print(f"{kind:>4} {n:>2} {np.linalg.norm(Rf - Rc) / nrm:13.2e} {np.linalg.norm(Rf + Rc) / nrm:13.2e}")


if __name__ == "__main__":
    main()
