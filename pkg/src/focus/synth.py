"""Synthetic scenario generators.

Two scenarios are produced.  ``gen_analytic`` draws M Gaussian sets in
three dimensions whose distractor, descriptive, and constant directions
are axis-aligned by construction, so every solver output has a closed
form to check against.  ``gen_images`` builds an image corpus in which
shape identity is the between-set signal and a planar illumination
gradient is the within-set nuisance: M training sets of one centered
silhouette class each, a random subset of images lit by a gradient with
normal amplitude and uniform angle, and a test split whose planted
anomalies come from held-out silhouette classes.

All randomness flows through one documented primitive pair: PCG64
uniforms (numpy default_rng) plus an explicit Box-Muller transform for
normal deviates.  Both have published reference behavior, so the exact
streams can be reproduced in other languages; fixed vectors for seed
1234 are pinned in the test suite.

Silhouettes are centered and symmetric under 180-degree rotation, which
makes them exactly orthogonal to both centered gradient ramps.  That
keeps the between-set mean spread out of the illumination plane up to
sampling noise, so removed directions stay interpretable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .scatter import SetCollection

TWO_PI = 2.0 * math.pi


def portable_rng(seed: int) -> np.random.Generator:
    """PCG64 stream seeded through SeedSequence; uniforms via random()."""
    return np.random.default_rng(seed)


def portable_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Standard normals by Box-Muller over 53-bit uniforms.

    Pairs are interleaved (cos term at even indices, sin at odd), and
    each pair consumes exactly two uniforms, so the draw count is a
    fixed function of ``count``.
    """
    if count < 0:
        raise ConfigError(f"count must be nonnegative, got {count}")
    pairs = (count + 1) // 2
    if pairs == 0:
        return np.empty(0)
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = TWO_PI * u[:, 1]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count]


@dataclass(frozen=True)
class AnalyticSpec:
    """Axis-aligned Gaussian scenario: set m has mean (scale*m, 1, -1).

    The default per-set count is sized so the finite-sample between-set
    leakage (of order 1/n along the shared-noise axis) stays below the
    default removal cutoff's tolerance and the demo spectrum matches the
    population one.
    """

    m_sets: int = 10
    n_per_set: int = 10000
    seed: int = 0
    scale: float = 3.0

    def __post_init__(self):
        if self.m_sets < 2:
            raise ConfigError(f"need at least 2 sets, got {self.m_sets}")
        if self.n_per_set < 2:
            raise ConfigError(f"need at least 2 points per set, got {self.n_per_set}")


def gen_analytic(spec: AnalyticSpec) -> SetCollection:
    """Sample the three-coordinate scenario.

    Coordinate 0 varies between sets (variance 2 within), coordinate 1
    is shared noise (variance 1), coordinate 2 is the constant -1.
    """
    rng = portable_rng(spec.seed)
    sets = []
    for m in range(1, spec.m_sets + 1):
        z = portable_normals(rng, 2 * spec.n_per_set).reshape(spec.n_per_set, 2)
        x = np.empty((spec.n_per_set, 3))
        x[:, 0] = spec.scale * m + math.sqrt(2.0) * z[:, 0]
        x[:, 1] = 1.0 + z[:, 1]
        x[:, 2] = -1.0
        sets.append(x)
    return SetCollection.from_arrays(sets)


def illumination_plane_basis(side: int) -> np.ndarray:
    """Orthonormal d x 2 basis of the centered gradient ramps.

    Column 0 grows along image columns, column 1 along rows.  Both are
    zero-mean, unit-norm, and mutually orthogonal on the square grid.
    """
    if side < 2:
        raise ConfigError(f"side must be at least 2, got {side}")
    ramp = np.arange(side, dtype=float) - (side - 1) / 2.0
    cols = np.tile(ramp, (side, 1))
    rows = cols.T
    basis = np.stack([cols.ravel(), rows.ravel()], axis=1)
    return basis / np.linalg.norm(basis, axis=0, keepdims=True)


def gradient_image(side: int, amplitude: float, angle: float) -> np.ndarray:
    """Planar gradient a*(cos(t)*c + sin(t)*r)/side, centered to zero mean."""
    ramp = np.arange(side, dtype=float)
    plane = amplitude * (
        math.cos(angle) * ramp[np.newaxis, :] + math.sin(angle) * ramp[:, np.newaxis]
    ) / side
    return (plane - plane.mean()).ravel()


def _blank(side: int) -> np.ndarray:
    return np.zeros((side, side), dtype=bool)


def _centered_coords(side: int):
    c = np.arange(side, dtype=float) - (side - 1) / 2.0
    return c[:, np.newaxis], c[np.newaxis, :]


def _rect(side, half_h, half_w):
    r, c = _centered_coords(side)
    return (np.abs(r) <= half_h) & (np.abs(c) <= half_w)


def _disc(side, radius):
    r, c = _centered_coords(side)
    return r * r + c * c <= radius * radius


def _ring(side, outer, inner):
    return _disc(side, outer) & ~_disc(side, inner)


def _diamond(side, radius):
    r, c = _centered_coords(side)
    return np.abs(r) + np.abs(c) <= radius


def _cross(side, arm_h, arm_v, thick):
    r, c = _centered_coords(side)
    horiz = (np.abs(r) <= thick) & (np.abs(c) <= arm_h)
    vert = (np.abs(c) <= thick) & (np.abs(r) <= arm_v)
    return horiz | vert


_FAMILIES = ("rect", "disc", "ring", "diamond", "cross")


def silhouette_catalog(side: int, families=("all",)) -> list:
    """Deterministic list of (name, mask) silhouette classes.

    Every mask is centered and 180-degree rotation symmetric.  The
    quarter-turn variant of each anisotropic mask is included; exact
    duplicates are dropped, keeping first occurrence.
    """
    if side < 6:
        raise ConfigError(f"silhouettes need side of at least 6, got {side}")
    wanted = set(_FAMILIES) if "all" in families else set(families)
    unknown = wanted - set(_FAMILIES)
    if unknown:
        raise ConfigError(f"unknown silhouette families {sorted(unknown)}")

    unit = side / 14.0
    shapes: list = []
    if "rect" in wanted:
        halves = [1.5 * unit, 2.5 * unit, 3.5 * unit, 4.5 * unit, 5.5 * unit]
        for hh in halves:
            for hw in halves:
                shapes.append((f"rect_{hh:g}x{hw:g}", _rect(side, hh, hw)))
    if "disc" in wanted:
        for radius in (2.0, 3.0, 4.0, 5.0, 6.0):
            shapes.append((f"disc_{radius * unit:g}", _disc(side, radius * unit)))
    if "ring" in wanted:
        for outer, inner in ((4.0, 2.0), (5.0, 2.5), (6.0, 3.0), (6.0, 4.5), (5.0, 3.5)):
            shapes.append(
                (f"ring_{outer * unit:g}_{inner * unit:g}",
                 _ring(side, outer * unit, inner * unit))
            )
    if "diamond" in wanted:
        for radius in (2.5, 3.5, 4.5, 5.5, 6.5):
            shapes.append((f"diamond_{radius * unit:g}", _diamond(side, radius * unit)))
    if "cross" in wanted:
        arms = ((4.5, 4.5, 0.5), (5.5, 5.5, 0.5), (6.5, 6.5, 0.5), (4.5, 4.5, 1.5),
                (5.5, 5.5, 1.5), (6.5, 6.5, 1.5), (6.5, 6.5, 2.5), (5.5, 5.5, 2.5),
                (6.5, 3.5, 0.5), (6.5, 3.5, 1.5), (5.5, 2.5, 0.5), (6.5, 4.5, 2.5))
        for arm_h, arm_v, thick in arms:
            shapes.append(
                (f"cross_{arm_h * unit:g}_{arm_v * unit:g}_{thick * unit:g}",
                 _cross(side, arm_h * unit, arm_v * unit, thick * unit))
            )

    catalog: list = []
    seen = set()
    for name, mask in shapes:
        for variant, rotated in (("", mask), ("_turn", np.rot90(mask))):
            key = rotated.tobytes()
            if key in seen or not rotated.any() or rotated.all():
                continue
            seen.add(key)
            catalog.append((name + variant, rotated))
    return catalog


@dataclass(frozen=True)
class IlluminationSpec:
    """Image-corpus scenario parameters.

    ``amp_sigma`` is the std of the normal gradient amplitude and
    ``fraction_lit`` the Bernoulli rate at which images receive one.
    Foreground/background gray levels sit inside (0, 1) so moderate
    gradients survive clipping.
    """

    side: int = 28
    amp_sigma: float = 0.5
    fraction_lit: float = 0.5
    seed: int = 0
    angle_range: tuple = (0.0, TWO_PI)
    m_sets: int = 40
    n_per_set: int = 300
    n_test_normal: int = 190
    n_test_anomalies: int = 10
    foreground: float = 0.65
    background: float = 0.35

    def __post_init__(self):
        if self.side < 2:
            raise ConfigError(f"side must be at least 2, got {self.side}")
        if not 0.0 <= self.fraction_lit <= 1.0:
            raise ConfigError(f"fraction_lit must be in [0, 1], got {self.fraction_lit}")
        if self.amp_sigma < 0:
            raise ConfigError(f"amp_sigma must be nonnegative, got {self.amp_sigma}")
        if self.m_sets < 2:
            raise ConfigError(f"need at least 2 training sets, got {self.m_sets}")
        if self.n_per_set < 2 or self.n_test_normal < 1 or self.n_test_anomalies < 1:
            raise ConfigError("corpus sizes must be positive")
        lo, hi = self.angle_range
        if not lo < hi:
            raise ConfigError(f"empty angle range {self.angle_range}")
        if not 0.0 <= self.background < self.foreground <= 1.0:
            raise ConfigError("gray levels must satisfy 0 <= background < foreground <= 1")


@dataclass(frozen=True)
class ImageCorpus:
    """Generated image data: training sets plus a labeled test split."""

    train: SetCollection
    train_classes: tuple
    test: np.ndarray
    test_labels: np.ndarray
    test_classes: tuple
    side: int
    plane_basis: np.ndarray = field(repr=False, default=None)


def _render_batch(spec: IlluminationSpec, mask: np.ndarray, count: int,
                  rng: np.random.Generator, lit_allowed: bool) -> np.ndarray:
    """Render ``count`` images of one silhouette with random lighting.

    Per batch the draw order is fixed: one uniform per lit flag, normals
    for all amplitudes in one block, then one uniform per angle.  Draws
    are consumed even for unlit images, keeping streams aligned.

    Lit images are paired antithetically: the second image of each lit
    pair reuses the first one's angle with the amplitude negated.  Each
    image keeps the stated marginal distribution, but the batch's mean
    gradient cancels exactly (up to clipping), the population property a
    finite set would otherwise only approximate.
    """
    side = spec.side
    base = np.where(mask.ravel(), spec.foreground, spec.background)
    images = np.tile(base, (count, 1))
    lit = rng.random(count) < spec.fraction_lit
    amps = spec.amp_sigma * portable_normals(rng, count)
    lo, hi = spec.angle_range
    angles = lo + (hi - lo) * rng.random(count)
    if lit_allowed and lit.any():
        lit_ids = np.flatnonzero(lit)
        for j in range(1, lit_ids.size, 2):
            amps[lit_ids[j]] = -amps[lit_ids[j - 1]]
            angles[lit_ids[j]] = angles[lit_ids[j - 1]]
        ramp = (np.arange(side, dtype=float) - 0.0) / side
        cols = np.tile(ramp, side)
        rows = np.repeat(ramp, side)
        a = amps[lit_ids]
        th = angles[lit_ids]
        planes = (a * np.cos(th))[:, np.newaxis] * cols + (a * np.sin(th))[:, np.newaxis] * rows
        planes -= planes.mean(axis=1, keepdims=True)
        images[lit_ids] += planes
        np.clip(images, 0.0, 1.0, out=images)
    return images


def gen_images(spec: IlluminationSpec, base_shapes=("all",)) -> ImageCorpus:
    """Build the full corpus: M one-class training sets and a test split.

    Test normals reuse the training classes (balanced counts, fresh
    lighting); anomalies are one unlit image from each held-out class.
    """
    if isinstance(base_shapes, str):
        base_shapes = (base_shapes,)
    catalog = silhouette_catalog(spec.side, base_shapes)
    needed = spec.m_sets + spec.n_test_anomalies
    if len(catalog) < needed:
        raise ConfigError(
            f"catalog offers {len(catalog)} classes, scenario needs {needed}"
        )

    rng = portable_rng(spec.seed)
    perm = rng.permutation(len(catalog))
    train_ids = perm[: spec.m_sets]
    holdout_ids = perm[spec.m_sets : needed]

    train_sets = []
    train_names = []
    for cid in train_ids:
        name, mask = catalog[cid]
        train_sets.append(_render_batch(spec, mask, spec.n_per_set, rng, True))
        train_names.append(name)

    # balanced normal split: earlier training classes absorb the remainder
    per_class = spec.n_test_normal // spec.m_sets
    extra = spec.n_test_normal % spec.m_sets
    test_rows = []
    test_names = []
    for j, cid in enumerate(train_ids):
        name, mask = catalog[cid]
        count = per_class + (1 if j < extra else 0)
        if count == 0:
            continue
        test_rows.append(_render_batch(spec, mask, count, rng, True))
        test_names.extend([name] * count)
    n_normal = sum(r.shape[0] for r in test_rows)

    for cid in holdout_ids:
        name, mask = catalog[cid]
        test_rows.append(_render_batch(spec, mask, 1, rng, False))
        test_names.append(name)

    test = np.vstack(test_rows)
    labels = np.zeros(test.shape[0], dtype=int)
    labels[n_normal:] = 1
    return ImageCorpus(
        train=SetCollection.from_arrays(train_sets),
        train_classes=tuple(train_names),
        test=test,
        test_labels=labels,
        test_classes=tuple(test_names),
        side=spec.side,
        plane_basis=illumination_plane_basis(spec.side),
    )
