"""Structural identities on scenes outside the catalog.

Two layers, reflecting what actually depends on the Jacobi identity:

- For an arbitrary antisymmetric bivector (not necessarily Poisson), the
  metric contravariant connection is still torsion-free and
  metric-compatible, and its curvature is antisymmetric in both index
  pairs: these are algebraic identities of the construction.
- Route equivalence of the two curvature computations and the
  pair-interchange/Bianchi symmetries hold only on genuine Poisson
  structures (the gap scales with the Jacobi defect).

The 3D Poisson family used here is ``pi^{ij} = eps^{ijk} d_k f`` for a
random smooth potential f, which satisfies the Jacobi identity for every
f.  A Lorentzian chart checks that nothing assumes positive definiteness.
"""

import dataclasses

import numpy as np
import pytest

from conftest import make_scene, maxabs, random_smooth_expr
from obstruct import contravariant, exprlang, poisson
from obstruct.contravariant import Frame
from obstruct.geometry import Scene


def _small(rng, coords):
    return f"0.2 * ({exprlang.pretty(random_smooth_expr(rng, coords, depth=2))})"


def random_metric_rows(rng, coords):
    n = len(coords)
    rows = [["0"] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = f"3 + {_small(rng, coords)}"
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = _small(rng, coords)
    return rows


def random_bivector_rows(rng, coords):
    """Generic antisymmetric entries: Poisson automatically only in 2D."""
    n = len(coords)
    rows = [["0"] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            entry = f"1 + {_small(rng, coords)}" if (i + j) % 2 else _small(rng, coords)
            rows[i][j] = entry
            rows[j][i] = f"-({entry})"
    return rows


def gradient_bivector_rows(rng, coords):
    """pi^{ij} = eps^{ijk} d_k f: a genuine Poisson structure in 3D."""
    f = random_smooth_expr(rng, coords, depth=2)
    partial = [exprlang.pretty(exprlang.differentiate(exprlang.parse(
        f"1 + ({exprlang.pretty(f)})", coords), k)) for k in range(3)]
    rows = [["0"] * 3 for _ in range(3)]
    pairs = {(0, 1): partial[2], (2, 0): partial[1], (1, 2): partial[0]}
    for (i, j), text in pairs.items():
        rows[i][j] = text
        rows[j][i] = f"-({text})"
    return rows


def random_scene(rng, n, poisson_rows=None) -> Scene:
    coords = [f"x{i+1}" for i in range(n)]
    return make_scene(coords, random_metric_rows(rng, coords),
                      poisson_rows or random_bivector_rows(rng, coords),
                      [(-1.0, 1.0)] * n, name=f"random-{n}d")


def lorentzian_scene() -> Scene:
    return make_scene(
        ["t", "x"],
        [["-(1 + x*x)", "0.3 * t * x"], ["0.3 * t * x", "1 + t*t"]],
        [["0", "1 + (t*t + x*x) / 2"], ["-(1 + (t*t + x*x) / 2)", "0"]],
        [(-0.8, 0.8), (-0.8, 0.8)],
        name="lorentzian")


def algebraic_checks(scene: Scene, points):
    """Identities that hold for any antisymmetric bivector."""
    for point in points:
        f = Frame.at(scene, point)
        scale = max(1.0, maxabs(f.pi) ** 2 * max(1.0, maxabs(f.riemann)))
        assert maxabs(contravariant.torsion_defect(scene, point, frame=f)) \
            <= 1e-11 * scale
        assert maxabs(contravariant.metric_compat_defect(scene, point, frame=f)) \
            <= 1e-11 * scale
        ke = contravariant.curvature_explicit(scene, point, frame=f).components
        k4 = np.einsum("ijkl,lm->ijkm", ke, f.ginv)
        assert maxabs(k4 + k4.transpose(1, 0, 2, 3)) <= 1e-9 * scale
        assert maxabs(k4 + k4.transpose(0, 1, 3, 2)) <= 1e-9 * scale


def poisson_checks(scene: Scene, points):
    """Identities that additionally need the Jacobi identity."""
    for point in points:
        f = Frame.at(scene, point)
        assert maxabs(poisson.jacobi_from(f.pi, f.dpi)) <= 1e-10
        scale = max(1.0, maxabs(f.pi) ** 2 * max(1.0, maxabs(f.riemann)))
        ke = contravariant.curvature_explicit(scene, point, frame=f).components
        kd = contravariant.curvature_definitional(scene, point, frame=f).components
        assert maxabs(ke - kd) <= 1e-9 * scale
        k4 = np.einsum("ijkl,lm->ijkm", ke, f.ginv)
        assert maxabs(k4 - k4.transpose(2, 3, 0, 1)) <= 1e-9 * scale
        bianchi = k4 + np.einsum("ikmj->ijkm", k4) + np.einsum("imjk->ijkm", k4)
        assert maxabs(bianchi) <= 1e-9 * scale


@pytest.mark.parametrize("n", [2, 3])
def test_connection_identities_for_arbitrary_bivectors(n):
    rng = np.random.default_rng(600 + n)
    for _ in range(3):
        scene = random_scene(rng, n)
        scene.validate()
        algebraic_checks(scene, scene.sample_points(rng, 4))


def test_poisson_identities_in_two_dimensions():
    # every antisymmetric bivector on a surface is Poisson
    rng = np.random.default_rng(605)
    for _ in range(3):
        scene = random_scene(rng, 2)
        poisson_checks(scene, scene.sample_points(rng, 4))


def test_poisson_identities_for_gradient_family():
    rng = np.random.default_rng(606)
    coords = ["x1", "x2", "x3"]
    for _ in range(3):
        scene = random_scene(rng, 3,
                             poisson_rows=gradient_bivector_rows(rng, coords))
        scene.validate()
        poisson_checks(scene, scene.sample_points(rng, 3))


def test_route_gap_scales_with_jacobi_defect():
    # off-shell sanity: for a non-Poisson bivector the two curvature
    # routes genuinely differ, so their agreement elsewhere is not vacuous
    rng = np.random.default_rng(607)
    scene = random_scene(rng, 3)
    gaps, jacs = [], []
    for point in scene.sample_points(rng, 5):
        f = Frame.at(scene, point)
        jacs.append(maxabs(poisson.jacobi_from(f.pi, f.dpi)))
        ke = contravariant.curvature_explicit(scene, point, frame=f).components
        kd = contravariant.curvature_definitional(scene, point, frame=f).components
        gaps.append(maxabs(ke - kd))
    assert max(jacs) > 1e-3
    assert max(gaps) > 1e-8


def test_random_scene_divergence_oracle():
    rng = np.random.default_rng(610)
    scene = random_scene(rng, 2)
    for point in scene.sample_points(rng, 4):
        assert maxabs(poisson.divergence_defect(scene, point)
                      - poisson.divergence_oracle(scene, point)) <= 1e-6


def test_lorentzian_scene_identities():
    rng = np.random.default_rng(620)
    scene = lorentzian_scene()
    scene.validate()
    points = scene.sample_points(rng, 6)
    algebraic_checks(scene, points)
    poisson_checks(scene, points)


def test_lorentzian_divergence_oracle():
    # |det g| and the orientation bookkeeping must hold for either signature
    rng = np.random.default_rng(621)
    scene = lorentzian_scene()
    for point in scene.sample_points(rng, 5):
        assert maxabs(poisson.divergence_defect(scene, point)
                      - poisson.divergence_oracle(scene, point)) <= 1e-6


def test_lorentzian_gprime_keeps_signature():
    scene = lorentzian_scene()
    gp = contravariant.gprime(scene, [0.2, -0.3])
    assert sorted(np.sign(np.linalg.eigvalsh(gp)).tolist()) == [-1.0, 1.0]


def test_reversed_orientation_flips_nothing_observable():
    scene = lorentzian_scene()
    flipped = dataclasses.replace(scene, orientation=-1)
    point = [0.1, 0.4]
    assert maxabs(poisson.divergence_defect(scene, point)
                  - poisson.divergence_defect(flipped, point)) == 0.0
    assert maxabs(poisson.divergence_oracle(scene, point)
                  - poisson.divergence_oracle(flipped, point)) <= 1e-9
