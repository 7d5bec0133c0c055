import argparse
import os
import sys
import time

# Ensure src/ and the repository root are in sys.path so imports work
ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, os.path.join(ROOT, "src"))
sys.path.insert(0, ROOT)

from cli.generators import double_cover, gen_cylinder_truncated, generate
from cli.report import witness_doc
from core.exact_geometry import SphPoint
from core.global_verdict import (
    BoundaryPresentNoGlobalClaim, ConvexConeBoundary, ConvexEmbedding, NotLocallyConvex, a_convexity_probe,
    build_witness, check_surface, directrix_of_cone,
)
from core.local_convexity import local_report, recursive_link_check, star_hull_check
from tests.shapes import brute_force_hull
from utils.prng import SplitMix64


def oracle_agreement(s):
    """Vertices where the witness-hull and recursive-link checks disagree."""
    if s.ambient_dim < 4:
        return []
    return [v for v in s.used_vertices if bool(star_hull_check(s, (v,))) != recursive_link_check(s, v)]


class Sweep:
    def __init__(self, name):
        self.name = name
        self.passed = 0
        self.failures = []
        self.slowest = 0.0

    def record(self, label, ok, detail=""):
        if ok:
            self.passed += 1
        else:
            self.failures.append(f"{label}: {detail}")
            print(f"  [FAILED] {label}: {detail}")

    def summary(self):
        total = self.passed + len(self.failures)
        status = "OK" if not self.failures else "FAILED"
        print(f"[{status}] {self.name}: {self.passed}/{total} passed (slowest {self.slowest:.2f}s)")
        return not self.failures


def timed(sweep, fn):
    start = time.time()
    result = fn()
    sweep.slowest = max(sweep.slowest, time.time() - start)
    return result


def hull_soundness(count):
    sweep = Sweep("hull soundness")
    for n in (3, 4, 5):
        for seed in range(1, count + 1):
            generated = generate("hull", {"n": str(n), "m": str(2 * n + 6), "bound": "100"}, seed)
            verdict = timed(sweep, lambda: check_surface(generated.surface))
            label = f"n={n} seed={seed}"
            if not isinstance(verdict, ConvexEmbedding):
                sweep.record(label, False, f"verdict {verdict.tag}")
                continue
            expected = brute_force_hull(generated.surface.vertices)
            sweep.record(label, set(verdict.witness.halfspaces) == expected, "witness differs from oracle")
            disagree = oracle_agreement(generated.surface)
            sweep.record(f"{label} local oracles", not disagree, f"vertices {disagree}")
    return sweep.summary()


def rejection_soundness(count):
    sweep = Sweep("rejection soundness")
    for n in (3, 4):
        for seed in range(1, count + 1):
            generated = generate("perturbed-hull", {"n": str(n), "m": str(2 * n + 6), "bound": "100"}, seed)
            moved = generated.meta["perturbed_vertex"]
            verdict = timed(sweep, lambda: check_surface(generated.surface))
            label = f"n={n} seed={seed}"
            if not isinstance(verdict, NotLocallyConvex):
                sweep.record(label, False, f"false accept: {verdict.tag}")
                continue
            cert = verdict.certificate
            touches = moved in cert.face or any(moved in generated.surface.facets[g] for g in cert.facets)
            sweep.record(label, touches, f"certificate {list(cert.face)} misses vertex {moved}")
    return sweep.summary()


def cone_reconstruction(count):
    sweep = Sweep("cone reconstruction and multiplicity")
    expected_tags = {3: "GreatSubsphere"}
    for lineality in (0, 1, 2, 3):
        for seed in range(1, count + 1):
            generated = generate("sph-cone", {"n": "3", "lineality": str(lineality)}, seed)
            verdict = timed(sweep, lambda: check_surface(generated.surface))
            label = f"lineality={lineality} seed={seed}"
            if not isinstance(verdict, ConvexConeBoundary):
                sweep.record(label, False, f"verdict {verdict.tag}")
                continue
            recovered = directrix_of_cone(verdict.witness).dim
            sweep.record(label, recovered == lineality, f"recovered lineality {recovered}")
            if lineality in expected_tags:
                sweep.record(f"{label} tag", verdict.tag == expected_tags[lineality], verdict.tag)

            doubled = check_surface(double_cover(generated.surface))
            same_witness = (
                isinstance(doubled, ConvexConeBoundary)
                and witness_doc(doubled.witness).model_dump_json() == witness_doc(verdict.witness).model_dump_json()
            )
            sweep.record(f"{label} double cover", same_witness and doubled.jn.multiplicity == 2,
                         f"multiplicity {getattr(getattr(doubled, 'jn', None), 'multiplicity', None)}")
    return sweep.summary()


def arc_probes(count):
    sweep = Sweep("arc probes")
    for n in (2, 3):
        for seed in range(1, count + 1):
            s = generate("sph-cone", {"n": str(n), "lineality": "0"}, seed).surface
            local = local_report(s, jobs=1)
            witness = build_witness(s, local.normals)
            normals = witness.linear_normals()
            rng = SplitMix64(seed)
            points = []
            while len(points) < 2:
                ray = tuple(rng.randint(-9, 9) for _ in range(n + 1))
                if any(ray) and any(sum(a * y for a, y in zip(normal, ray)) >= 0 for normal in normals):
                    points.append(SphPoint(ray))
            label = f"S^{n} seed={seed}"
            try:
                cert = timed(sweep, lambda: a_convexity_probe(witness, points[0], points[1]))
                sweep.record(label, cert.verified, "unverified certificate")
            except Exception as e:
                sweep.record(label, False, str(e))
    return sweep.summary()


def truncated_cylinder():
    sweep = Sweep("truncated star cylinder")
    for p, q in ((5, 2), (7, 2), (7, 3), (9, 4)):
        generated = gen_cylinder_truncated({"p": str(p), "q": str(q)}, 1)
        verdict = check_surface(generated.surface)
        ok = isinstance(verdict, BoundaryPresentNoGlobalClaim) and verdict.exit_code == 0
        sweep.record(f"{{{p}/{q}}}", ok, verdict.tag)
    return sweep.summary()


def run_acceptance():
    """
    Runs the seeded acceptance sweeps. Takes minutes; not part of the unit suite.
    """
    parser = argparse.ArgumentParser(description="Seeded acceptance sweeps for plconvex")
    parser.add_argument("--count", type=int, default=100, help="instances per dimension")
    args = parser.parse_args()

    print("=" * 60)
    print("plconvex acceptance sweep")
    print(f"{args.count} instances per dimension; exact arithmetic only")
    print("=" * 60)

    results = [
        hull_soundness(args.count),
        rejection_soundness(args.count),
        cone_reconstruction(max(1, args.count // 2)),
        arc_probes(args.count),
        truncated_cylinder(),
    ]

    print("\n" + "=" * 60)
    print("All sweeps passed." if all(results) else "Some sweeps FAILED.")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(run_acceptance())
