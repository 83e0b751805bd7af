"""NACA 4-digit sections, sinusoidal leading-edge protuberances, and wing lofting.

Coordinate conventions: section loops run trailing edge -> upper surface ->
leading edge -> lower surface -> trailing edge (counterclockwise).  Dimensionless
profiles use x/c in [0, 1]; lofted wings use meters with the baseline leading
edge at x = 0 and the (straight) trailing edge at x = mean chord.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "AirfoilProfile",
    "ProtuberanceSpec",
    "SpanSection",
    "WingGeometry",
    "CaseSpec",
    "STUDY_PARS",
    "PAR_AMPLITUDE_DISPLAY",
    "naca4_coordinates",
    "par_to_amplitude",
    "build_tubercled_wing",
    "extract_section",
    "export_surface",
    "make_case_spec",
    "write_case_spec",
    "read_case_spec",
]

# Standard protuberance configuration set: pitch/amplitude ratios studied at
# fixed pitch 0.25c, with the display-rounded (truncated) amplitudes used in
# reports.  PAR 0 denotes the unmodified baseline.
STUDY_PARS = (1, 3, 6, 9, 12, 18, 21, 27)
PAR_AMPLITUDE_DISPLAY = {
    1: "0.25",
    3: "0.083",
    6: "0.041",
    9: "0.027",
    12: "0.020",
    18: "0.013",
    21: "0.011",
    27: "0.0092",
}

DEFAULT_PITCH = 0.25  # leading-edge sinusoid pitch, fraction of mean chord


@dataclass(frozen=True)
class AirfoilProfile:
    """Closed 2D coordinate loop of a blade section.

    ``points`` is an (n, 2) array ordered TE -> upper -> LE -> lower -> TE.
    For ``closed_te`` profiles the first and last points coincide.
    """

    name: str
    points: np.ndarray
    closed_te: bool = True

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("profile needs an (n, 2) array with n >= 3")
        object.__setattr__(self, "points", pts)
        if self.closed_te and not np.allclose(pts[0], pts[-1], atol=1e-12):
            raise ValueError("closed_te profile must end on its first point")

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def scaled(self, factor, name=None):
        """Uniformly scaled copy (constant thickness-to-chord ratio)."""
        return replace(self, name=name or self.name, points=self.points * factor)

    def is_simple(self) -> bool:
        """True if the loop is a non-self-intersecting polygon."""
        pts = self.points[:-1] if self.closed_te else self.points
        n = len(pts)
        a = pts
        b = np.roll(pts, -1, axis=0)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # shared endpoints are not crossings
                if _segments_cross(a[i], b[i], a[j], b[j]):
                    return False
        return True


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _segments_cross(p1, p2, p3, p4):
    d1 = _cross2(p4 - p3, p1 - p3)
    d2 = _cross2(p4 - p3, p2 - p3)
    d3 = _cross2(p2 - p1, p3 - p1)
    d4 = _cross2(p2 - p1, p4 - p1)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def naca4_coordinates(code: str, n_points: int = 201, closed_te: bool = False) -> AirfoilProfile:
    """Generate a NACA 4-digit section as a closed coordinate loop.

    Cosine spacing over the full loop clusters points at the leading edge.
    Odd ``n_points`` places a node exactly at the leading edge, giving exactly
    mirrored upper/lower stations for symmetric codes.

    Args:
        code: four digits, e.g. "0009" (camber, camber position, thickness %).
        n_points: total loop point count, >= 20.
        closed_te: use the zero-gap trailing-edge thickness coefficient.
    """
    if not (isinstance(code, str) and len(code) == 4 and code.isdigit()):
        raise ValueError(f"not a 4-digit NACA code: {code!r}")
    if n_points < 20:
        raise ValueError("n_points must be >= 20")
    m = int(code[0]) / 100.0
    p = int(code[1]) / 10.0
    t = int(code[2:4]) / 100.0
    if t <= 0.0:
        raise ValueError("zero-thickness section")

    # full-loop cosine parameter: x runs 1 -> 0 -> 1 (upper first)
    theta = np.linspace(0.0, 2.0 * np.pi, n_points)
    xc = 0.5 * (1.0 + np.cos(theta))
    upper = theta <= np.pi
    yt = _naca4_thickness(xc, t, closed_te)

    if m == 0.0 or p == 0.0:
        ys = np.where(upper, yt, -yt)
        pts = np.column_stack([xc, ys])
    else:
        yc, dyc = _naca4_camber(xc, m, p)
        phi = np.arctan(dyc)
        sgn = np.where(upper, 1.0, -1.0)
        xs = xc - sgn * yt * np.sin(phi)
        ys = yc + sgn * yt * np.cos(phi)
        pts = np.column_stack([xs, ys])

    if closed_te:
        pts[-1] = pts[0]
    return AirfoilProfile(name=f"NACA {code}", points=pts, closed_te=closed_te)


def _naca4_thickness(x, t, closed_te):
    k4 = 0.1036 if closed_te else 0.1015
    x = np.clip(x, 0.0, 1.0)
    return 5.0 * t * (
        0.2969 * np.sqrt(x) - 0.1260 * x - 0.3516 * x**2 + 0.2843 * x**3 - k4 * x**4
    )


def _naca4_camber(x, m, p):
    fwd = x < p
    yc = np.where(
        fwd,
        m / p**2 * (2.0 * p * x - x**2),
        m / (1.0 - p) ** 2 * ((1.0 - 2.0 * p) + 2.0 * p * x - x**2),
    )
    dyc = np.where(
        fwd,
        2.0 * m / p**2 * (p - x),
        2.0 * m / (1.0 - p) ** 2 * (p - x),
    )
    return yc, dyc


@dataclass(frozen=True)
class ProtuberanceSpec:
    """Sinusoidal leading-edge modulation: pitch and amplitude as chord fractions.

    The amplitude is peak-to-trough of the leading-edge sinusoid, so the local
    chord varies between c - A/2 and c + A/2.
    """

    pitch: float = DEFAULT_PITCH
    amplitude: float = 0.25
    par: float | None = None  # pitch / amplitude; derived when omitted

    def __post_init__(self):
        if self.pitch <= 0.0 or self.amplitude <= 0.0:
            raise ValueError("pitch and amplitude must be positive")
        par = self.pitch / self.amplitude
        if self.par is None:
            object.__setattr__(self, "par", par)
        elif abs(self.par - par) > 1e-9 * max(1.0, abs(par)):
            raise ValueError(f"par={self.par} inconsistent with pitch/amplitude={par}")

    @classmethod
    def from_par(cls, par: float, pitch: float = DEFAULT_PITCH) -> "ProtuberanceSpec":
        return cls(pitch=pitch, amplitude=par_to_amplitude(par, pitch), par=float(par))


def par_to_amplitude(par: float, pitch: float = DEFAULT_PITCH) -> float:
    """Amplitude (chord fraction) from a pitch-to-amplitude ratio, exact."""
    if par <= 0.0 or pitch <= 0.0:
        raise ValueError("par and pitch must be positive")
    return pitch / par


@dataclass(frozen=True)
class SpanSection:
    """One spanwise station: location, classification, chord and scaled profile."""

    z: float
    kind: str  # peak | mean | trough | generic
    local_chord: float
    profile: AirfoilProfile


@dataclass(frozen=True)
class WingGeometry:
    """Constant-profile blade with optional sinusoidal leading-edge modulation."""

    base_profile: AirfoilProfile
    spec: ProtuberanceSpec | None
    mean_chord: float
    span: float
    n_stations: int
    stations: tuple

    @property
    def pitch_m(self):
        """Protuberance pitch in meters (None for the baseline)."""
        return None if self.spec is None else self.spec.pitch * self.mean_chord

    @property
    def amplitude_m(self):
        return None if self.spec is None else self.spec.amplitude * self.mean_chord

    def local_chord(self, z):
        """Chord c(z) = c + (A/2) cos(2 pi z / pitch); constant for the baseline."""
        z = np.asarray(z, dtype=float)
        if self.spec is None:
            return np.broadcast_to(self.mean_chord, z.shape).copy() if z.ndim else float(self.mean_chord)
        c = self.mean_chord + 0.5 * self.amplitude_m * np.cos(2.0 * np.pi * z / self.pitch_m)
        return c if z.ndim else float(c)

    def le_offset(self, z):
        """Leading-edge x relative to the baseline LE (negative = forward)."""
        z = np.asarray(z, dtype=float)
        if self.spec is None:
            return np.zeros(z.shape) if z.ndim else 0.0
        x = -0.5 * self.amplitude_m * np.cos(2.0 * np.pi * z / self.pitch_m)
        return x if z.ndim else float(x)


_KIND_TOL = 1e-6


def _classify_kind(spec: ProtuberanceSpec | None, z_over_pitch) -> str:
    if spec is None:
        return "generic"
    c = np.cos(2.0 * np.pi * z_over_pitch)
    if abs(c - 1.0) < _KIND_TOL:
        return "peak"
    if abs(c + 1.0) < _KIND_TOL:
        return "trough"
    if abs(c) < _KIND_TOL:
        return "mean"
    return "generic"


def _station_profile(base: AirfoilProfile, mean_chord, local_chord, name):
    # scale to local chord, pin the TE to x = mean_chord (straight spanwise TE)
    pts = base.points * local_chord
    pts = pts + np.array([mean_chord - local_chord, 0.0])
    return AirfoilProfile(name=name, points=pts, closed_te=base.closed_te)


def build_tubercled_wing(
    base: AirfoilProfile,
    spec: ProtuberanceSpec | None,
    mean_chord: float,
    span: float,
    n_stations: int,
) -> WingGeometry:
    """Loft a wing from a base section, optionally with leading-edge protuberances.

    Stations are evenly spaced over [0, span].  The leading edge follows
    x_LE(z) = -(A/2) cos(2 pi z / pitch); the trailing edge stays straight and
    each station is the base profile scaled uniformly to the local chord.
    """
    if span <= 0.0 or mean_chord <= 0.0:
        raise ValueError("span and mean_chord must be positive")
    if n_stations < 2:
        raise ValueError("need at least 2 stations")
    if spec is not None:
        pitch_m = spec.pitch * mean_chord
        waves = span / pitch_m
        if (n_stations - 1) / waves < 4.0:  # < 5 stations per wavelength
            raise ValueError(
                f"{n_stations} stations cannot resolve {waves:.3g} wavelengths "
                "(need >= 5 per wavelength)"
            )

    zs = np.linspace(0.0, span, n_stations)
    stations = []
    for z in zs:
        if spec is None:
            c_z, kind = mean_chord, "generic"
        else:
            c_z = mean_chord + 0.5 * spec.amplitude * mean_chord * np.cos(2.0 * np.pi * z / pitch_m)
            kind = _classify_kind(spec, z / pitch_m)
        prof = _station_profile(base, mean_chord, c_z, f"{base.name} @z={z:.6g}")
        stations.append(SpanSection(z=float(z), kind=kind, local_chord=float(c_z), profile=prof))

    return WingGeometry(
        base_profile=base,
        spec=spec,
        mean_chord=float(mean_chord),
        span=float(span),
        n_stations=int(n_stations),
        stations=tuple(stations),
    )


def extract_section(wing: WingGeometry, z: float) -> SpanSection:
    """Section at spanwise position z, classified as peak/mean/trough/generic."""
    if not (0.0 <= z <= wing.span):
        raise ValueError(f"z={z} outside span [0, {wing.span}]")
    c_z = wing.local_chord(z)
    if wing.spec is None:
        kind = "generic"
    else:
        kind = _classify_kind(wing.spec, z / wing.pitch_m)
    prof = _station_profile(wing.base_profile, wing.mean_chord, c_z, f"{wing.base_profile.name} @z={z:.6g}")
    return SpanSection(z=float(z), kind=kind, local_chord=float(c_z), profile=prof)


# ---------------------------------------------------------------------------
# surface export


def _loop_points(profile: AirfoilProfile):
    """Unique loop vertices (closing duplicate dropped); the polygon wraps."""
    pts = profile.points
    if np.allclose(pts[0], pts[-1], atol=1e-12):
        return pts[:-1]
    return pts


def export_surface(wing: WingGeometry, fmt: str, path) -> None:
    """Write the lofted surface as STL (ascii/binary) or per-station CSV.

    STL output is a watertight triangulation: quads between adjacent stations
    split into two triangles each, plus centroid-fan caps at both span ends.
    """
    if wing.n_stations < 2:
        raise ValueError("cannot export a wing with fewer than 2 stations")
    if fmt == "csv_sections":
        _write_sections_csv(wing, path)
        return
    if fmt not in ("stl_ascii", "stl_binary"):
        raise ValueError(f"unknown export format: {fmt!r}")

    loops = [_loop_points(s.profile) for s in wing.stations]
    m = len(loops[0])
    if any(len(lp) != m for lp in loops):
        raise ValueError("stations must share the same point count")
    zs = [s.z for s in wing.stations]

    tris = []
    for i in range(len(loops) - 1):
        a = np.column_stack([loops[i], np.full(m, zs[i])])
        b = np.column_stack([loops[i + 1], np.full(m, zs[i + 1])])
        for j in range(m):
            k = (j + 1) % m
            # wind so normals face outward (loop is counterclockwise in x-y)
            tris.append((a[j], b[k], b[j]))
            tris.append((a[j], a[k], b[k]))
    # end caps
    for idx, sign in ((0, -1.0), (len(loops) - 1, 1.0)):
        lp = loops[idx]
        cen = np.append(lp.mean(axis=0), zs[idx])
        ring = np.column_stack([lp, np.full(m, zs[idx])])
        for j in range(m):
            k = (j + 1) % m
            if sign > 0:
                tris.append((cen, ring[j], ring[k]))
            else:
                tris.append((cen, ring[k], ring[j]))

    tris_arr, normals = _facet_normals(tris)
    if fmt == "stl_ascii":
        _write_stl_ascii(tris_arr, normals, path, name=wing.base_profile.name.replace(" ", "_"))
    else:
        _write_stl_binary(tris_arr, normals, path)


def _facet_normals(tris):
    arr = np.asarray(tris, dtype=float)  # (n, 3, 3)
    e1 = arr[:, 1] - arr[:, 0]
    e2 = arr[:, 2] - arr[:, 0]
    n = np.cross(e1, e2)
    area2 = np.linalg.norm(n, axis=1)
    keep = area2 > 1e-14  # reject degenerate (zero-area) facets
    arr, n, area2 = arr[keep], n[keep], area2[keep]
    if len(arr) == 0:
        raise ValueError("surface collapsed to zero area")
    return arr, n / area2[:, None]


def _write_stl_ascii(tris, normals, path, name="wing"):
    with open(path, "w") as f:
        f.write(f"solid {name}\n")
        for tri, n in zip(tris, normals):
            f.write(f"  facet normal {n[0]:.9e} {n[1]:.9e} {n[2]:.9e}\n")
            f.write("    outer loop\n")
            for v in tri:
                f.write(f"      vertex {v[0]:.9e} {v[1]:.9e} {v[2]:.9e}\n")
            f.write("    endloop\n")
            f.write("  endfacet\n")
        f.write(f"endsolid {name}\n")


def _write_stl_binary(tris, normals, path):
    with open(path, "wb") as f:
        f.write(b"\x00" * 80)
        f.write(struct.pack("<I", len(tris)))
        for tri, n in zip(tris, normals):
            rec = struct.pack("<3f", *n)
            for v in tri:
                rec += struct.pack("<3f", *v)
            rec += struct.pack("<H", 0)
            f.write(rec)


def _write_sections_csv(wing: WingGeometry, path):
    with open(path, "w") as f:
        f.write("station_index,z_m,kind,x_m,y_m\n")
        for i, s in enumerate(wing.stations):
            for x, y in s.profile.points:
                f.write(f"{i},{s.z:.9g},{s.kind},{x:.9g},{y:.9g}\n")


# ---------------------------------------------------------------------------
# flow case specification


class ReynoldsConsistencyWarning(UserWarning):
    """Stated Reynolds number disagrees with rho*U*c/mu beyond tolerance."""


@dataclass(frozen=True)
class CaseSpec:
    """Freestream, fluid and domain-extent definition for one flow case."""

    u_inf: float = 0.81
    rho: float = 1.1649
    mu: float = 1.858e-5
    reynolds: float = 50_000.0
    chord: float = 1.0
    upstream_c: float = 10.0
    downstream_c: float = 15.0
    lateral_c: float = 10.0

    def __post_init__(self):
        for name in ("u_inf", "rho", "mu", "chord"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def nu(self):
        return self.mu / self.rho

    @property
    def reynolds_actual(self):
        """rho * U * c / mu from the physical fields."""
        return self.rho * self.u_inf * self.chord / self.mu

    @classmethod
    def from_reynolds(cls, reynolds, chord=1.0, rho=1.1649, mu=1.858e-5, **kw):
        """Case with the freestream speed solved so Re holds exactly."""
        u = reynolds * mu / (rho * chord)
        return cls(u_inf=u, rho=rho, mu=mu, reynolds=reynolds, chord=chord, **kw)


def make_case_spec(wing: WingGeometry | None = None, re_tolerance: float = 0.02, **overrides) -> CaseSpec:
    """Flow case with standard defaults; chord taken from the wing when given.

    Emits a ReynoldsConsistencyWarning when the stated Reynolds number differs
    from rho*U*c/mu by more than ``re_tolerance`` (relative).
    """
    if wing is not None and "chord" not in overrides:
        overrides["chord"] = wing.mean_chord
    case = CaseSpec(**overrides)
    mismatch = abs(case.reynolds_actual - case.reynolds) / case.reynolds
    if mismatch > re_tolerance:
        warnings.warn(
            f"stated Re={case.reynolds:.6g} vs rho*U*c/mu={case.reynolds_actual:.6g} "
            f"({100 * mismatch:.2f}% off)",
            ReynoldsConsistencyWarning,
            stacklevel=2,
        )
    return case


_CASE_KEYS = ("u_inf", "rho", "mu", "re", "chord", "upstream_c", "downstream_c", "lateral_c")


def write_case_spec(case: CaseSpec, path) -> None:
    """Plain-text key=value case file."""
    vals = {
        "u_inf": case.u_inf,
        "rho": case.rho,
        "mu": case.mu,
        "re": case.reynolds,
        "chord": case.chord,
        "upstream_c": case.upstream_c,
        "downstream_c": case.downstream_c,
        "lateral_c": case.lateral_c,
    }
    with open(path, "w") as f:
        for k in _CASE_KEYS:
            f.write(f"{k}={vals[k]:.9g}\n")


def read_case_spec(path) -> CaseSpec:
    vals = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            vals[k.strip()] = float(v)
    return CaseSpec(
        u_inf=vals["u_inf"],
        rho=vals["rho"],
        mu=vals["mu"],
        reynolds=vals["re"],
        chord=vals["chord"],
        upstream_c=vals["upstream_c"],
        downstream_c=vals["downstream_c"],
        lateral_c=vals["lateral_c"],
    )
