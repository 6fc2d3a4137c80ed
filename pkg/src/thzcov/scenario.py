"""Scenario parameters, derived constants, and the flat ``key = value`` config format.

All quantities are stored in SI units (meters, watts, hertz, radians, linear
ratios). Conversion from the config units (deg, dBm, dBi, dB, THz) happens
only at load/dump time.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .antenna import AntennaPattern
from .propagation import LinkBudget, max_association_radius


class ConfigError(ValueError):
    """Malformed or invalid scenario configuration."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# unit helpers
# ---------------------------------------------------------------------------

def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkParams:
    ap_height: float = 3.0
    ue_height: float = 1.3
    ap_density: float = 0.1
    room_length: float = 60.0
    room_width: float = 50.0

    def validate(self):
        if not self.ap_height > self.ue_height:
            raise ConfigError("invariant violated: h_A > h_U")
        if not self.ue_height > 0.0:
            raise ConfigError("invariant violated: h_U > 0")
        if not self.ap_density >= 0.0:
            raise ConfigError("invariant violated: lambda_A >= 0")
        if not (self.room_length > 0.0 and self.room_width > 0.0):
            raise ConfigError("invariant violated: room dimensions > 0")


@dataclass(frozen=True)
class BlockageParams:
    self_block_angle: float = math.radians(60.0)
    blocker_height: float = 1.7
    blocker_w1: float = 0.6
    blocker_w2: float = 0.3
    blocker_density: float = 0.1
    blocker_speed: float = 1.0
    wall_mean_length: float = 3.0
    wall_density: float = 0.04
    wall_length_law: str = "fixed"

    def validate(self, net: NetworkParams):
        if not 0.0 <= self.self_block_angle < 2.0 * math.pi:
            raise ConfigError("invariant violated: 0 <= omega < 2 pi")
        if not net.ue_height < self.blocker_height < net.ap_height:
            raise ConfigError("invariant violated: h_U < h_B < h_A")
        if not (self.blocker_w1 > 0.0 and self.blocker_w2 > 0.0):
            raise ConfigError("invariant violated: w1, w2 > 0")
        if not (self.blocker_density >= 0.0 and self.wall_density >= 0.0):
            raise ConfigError("invariant violated: blocker and wall densities >= 0")
        if not self.wall_mean_length > 0.0:
            raise ConfigError("invariant violated: E[L_W] > 0")
        if not self.blocker_speed >= 0.0:
            raise ConfigError("invariant violated: v_B >= 0")
        if self.wall_length_law not in ("fixed", "exponential"):
            raise ConfigError("wall_len_law must be 'fixed' or 'exponential'")


@dataclass(frozen=True)
class AntennaSpec:
    """One side of the link. Gains are linear; ``None`` means computed from beamwidths."""

    phi_h: float
    phi_v: float
    k: float = 0.1
    g_main: float | None = None
    g_side: float | None = None

    def validate(self, side: str):
        for name, phi in (("phi_h", self.phi_h), ("phi_v", self.phi_v)):
            if not 0.0 < phi < math.pi:
                raise ConfigError(f"invariant violated: 0 < {side}.{name} < pi")
        if not 0.0 < self.k < 1.0:
            raise ConfigError(f"invariant violated: {side}.k in (0, 1)")
        for name, g in (("g_main", self.g_main), ("g_side", self.g_side)):
            if g is not None and not g > 0.0:
                raise ConfigError(f"invariant violated: {side}.{name} > 0")

    def pattern(self) -> AntennaPattern:
        return AntennaPattern.from_beamwidths(self.phi_h, self.phi_v, self.k, self.g_main, self.g_side)


@dataclass(frozen=True)
class AntennaParams:
    ap: AntennaSpec = AntennaSpec(math.radians(10.0), math.radians(10.0), 0.1)
    ue: AntennaSpec = AntennaSpec(math.radians(33.0), math.radians(33.0), 0.1)


@dataclass(frozen=True)
class KTable:
    """Absorption coefficient vs frequency, linearly interpolated."""

    frequencies: tuple[float, ...]
    values: tuple[float, ...]
    source: str = ""

    def __post_init__(self):
        if len(self.frequencies) < 2 or len(self.frequencies) != len(self.values):
            raise ConfigError("K table needs at least two (frequency, K) rows")
        if any(b <= a for a, b in zip(self.frequencies, self.frequencies[1:])):
            raise ConfigError("K table frequencies must be strictly increasing")
        if any(not v >= 0.0 for v in self.values):
            raise ConfigError("K table values must be >= 0")

    def __call__(self, f: float) -> float:
        if not self.frequencies[0] <= f <= self.frequencies[-1]:
            raise ConfigError(
                f"frequency {f:.6g} Hz outside K table range "
                f"[{self.frequencies[0]:.6g}, {self.frequencies[-1]:.6g}]"
            )
        return float(np.interp(f, self.frequencies, self.values))

    @classmethod
    def load(cls, path: str | os.PathLike) -> "KTable":
        freqs, vals = [], []
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                for lineno, row in enumerate(csv.reader(fh), start=1):
                    if not row or row[0].strip().startswith("#"):
                        continue
                    try:
                        f, k = float(row[0]), float(row[1])
                    except (ValueError, IndexError):
                        if lineno == 1:
                            continue  # header
                        raise ConfigError(f"K table {path}: bad row {row!r}", lineno)
                    freqs.append(f)
                    vals.append(k)
        except OSError as exc:
            raise ConfigError(f"cannot read K table {path}: {exc}") from exc
        return cls(tuple(freqs), tuple(vals), str(path))


@dataclass(frozen=True)
class PropagationParams:
    tx_power: float = dbm_to_watts(5.0)
    noise_power: float = dbm_to_watts(-77.0)
    frequency: float = 1.05e12
    absorption: float = 0.07512
    sinr_threshold: float = db_to_linear(3.0)
    k_table: KTable | None = None

    def validate(self):
        for name in ("tx_power", "noise_power", "frequency", "sinr_threshold"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"invariant violated: {name} > 0")
        if not self.absorption >= 0.0:
            raise ConfigError("invariant violated: K >= 0")

    @property
    def K(self) -> float:
        return self.k_table(self.frequency) if self.k_table is not None else self.absorption


@dataclass(frozen=True)
class Scenario:
    network: NetworkParams = field(default_factory=NetworkParams)
    blockage: BlockageParams = field(default_factory=BlockageParams)
    antenna: AntennaParams = field(default_factory=AntennaParams)
    propagation: PropagationParams = field(default_factory=PropagationParams)
    r_b: float = 0.3
    r_t_override: float | None = None

    def __post_init__(self):
        self.network.validate()
        self.blockage.validate(self.network)
        self.antenna.ap.validate("ap")
        self.antenna.ue.validate("ue")
        self.propagation.validate()
        if self.blockage.self_block_angle + self.antenna.ue.phi_h > 2.0 * math.pi:
            raise ConfigError("invariant violated: omega + phi_UH <= 2 pi "
                              "(self-blockage sector overlaps the user's main lobe)")
        if not self.r_b >= 0.0:
            raise ConfigError("invariant violated: r_B >= 0")
        if self.r_t_override is not None and not self.r_t_override > 0.0:
            raise ConfigError("invariant violated: R_T > 0")

    @property
    def hbar(self) -> float:
        return self.network.ap_height - self.network.ue_height

    @property
    def wall_height(self) -> float:
        return self.network.ap_height

    def replace(self, **changes) -> "Scenario":
        """Copy with dotted-path overrides, e.g. ``replace(**{"network.ap_density": 0.2})``."""
        groups: dict[str, dict] = {}
        top: dict = {}
        for key, val in changes.items():
            if "." in key:
                grp, name = key.split(".", 1)
                groups.setdefault(grp, {})[name] = val
            else:
                top[key] = val
        for grp, vals in groups.items():
            if grp in ("ap", "ue"):
                ant = self.antenna
                top["antenna"] = dataclasses.replace(
                    top.get("antenna", ant),
                    **{grp: dataclasses.replace(getattr(top.get("antenna", ant), grp), **vals)},
                )
            else:
                top[grp] = dataclasses.replace(top.get(grp, getattr(self, grp)), **vals)
        return dataclasses.replace(self, **top)

    def without_walls(self) -> "Scenario":
        return self.replace(**{"blockage.wall_density": 0.0})

    def with_exact_db_gains(self) -> "Scenario":
        """Gains pinned to the rounded catalogue values 25/-10 dBi (AP) and 15/-10 dBi (UE)."""
        return self.replace(**{
            "ap.g_main": db_to_linear(25.0), "ap.g_side": db_to_linear(-10.0),
            "ue.g_main": db_to_linear(15.0), "ue.g_side": db_to_linear(-10.0),
        })


# ---------------------------------------------------------------------------
# derived constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivedParams:
    hbar: float
    zeta: float
    eta_b: float
    eta_w: float
    eta: float
    link: LinkBudget
    r_t: float
    rho: float
    psi_bar: float
    x_mu: float
    x_nu: float
    ap_pattern: AntennaPattern
    ue_pattern: AntennaPattern

    @property
    def K(self) -> float:
        return self.link.K

    def g(self, kappa: str, iota: str) -> float:
        return self.link.g(kappa, iota)


def association_normalizer(eta_w: float, r_t: float) -> float:
    """Normalizer of the density ``c x exp(-eta_w x)`` on ``[0, r_t]``."""
    z = eta_w * r_t
    if z < 1e-4:
        # 1 - e^-z (1 + z) = z^2/2 - z^3/3 + z^4/8 - ...
        return 2.0 / (r_t * r_t * (1.0 - 2.0 * z / 3.0 + z * z / 4.0 - z ** 3 / 15.0))
    return eta_w * eta_w / (-math.expm1(-z) - z * math.exp(-z))


def vertical_window_edges(hbar: float, r_t: float, phi_av: float) -> tuple[float, float, float]:
    """``(psi_bar, x_mu, x_nu)``; ``x_nu`` is ``inf`` when the window reaches the horizon."""
    psi_bar = math.atan2(hbar, r_t)
    upper = min(math.pi / 2.0, psi_bar + phi_av / 2.0)
    x_mu = 0.0 if upper >= math.pi / 2.0 else hbar / math.tan(upper)
    lower = max(0.0, psi_bar - phi_av / 2.0)
    x_nu = math.inf if lower <= 0.0 else hbar / math.tan(lower)
    return psi_bar, x_mu, x_nu


def derive_constants(s: Scenario) -> DerivedParams:
    net, blk, prop = s.network, s.blockage, s.propagation
    hbar = s.hbar
    zeta = math.exp(-2.0 * blk.blocker_w1 * blk.blocker_w2 * blk.blocker_density)
    eta_b = (2.0 * (blk.blocker_w1 + blk.blocker_w2) * blk.blocker_density
             * (blk.blocker_height - net.ue_height) / (math.pi * hbar))
    eta_w = blk.wall_density * (2.0 / math.pi) * blk.wall_mean_length
    ap = s.antenna.ap.pattern()
    ue = s.antenna.ue.pattern()
    link = LinkBudget.from_gains(prop.tx_power, prop.frequency, ap.g_main, ap.g_side,
                                 ue.g_main, ue.g_side, prop.K, prop.noise_power,
                                 prop.sinr_threshold)
    r_t = s.r_t_override if s.r_t_override is not None else max_association_radius(link, hbar)
    psi_bar, x_mu, x_nu = vertical_window_edges(hbar, r_t, s.antenna.ap.phi_v)
    return DerivedParams(
        hbar=hbar, zeta=zeta, eta_b=eta_b, eta_w=eta_w, eta=eta_b + eta_w, link=link,
        r_t=r_t, rho=association_normalizer(eta_w, r_t), psi_bar=psi_bar,
        x_mu=x_mu, x_nu=x_nu, ap_pattern=ap, ue_pattern=ue,
    )


# ---------------------------------------------------------------------------
# config format
# ---------------------------------------------------------------------------

def _deg(x):
    return math.radians(x)


def _undeg(x):
    return math.degrees(x)


def _ident(x):
    return x


def _thz(x):
    return x * 1e12


def _unthz(x):
    return x / 1e12


# key -> (field path, to SI, from SI, SI-unit alias key)
_KEYS: dict[str, tuple[str, object, object, str]] = {
    "h_a_m": ("network.ap_height", _ident, _ident, ""),
    "h_u_m": ("network.ue_height", _ident, _ident, ""),
    "lambda_a_per_m2": ("network.ap_density", _ident, _ident, ""),
    "room_l1_m": ("network.room_length", _ident, _ident, ""),
    "room_l2_m": ("network.room_width", _ident, _ident, ""),
    "omega_deg": ("blockage.self_block_angle", _deg, _undeg, "omega_rad"),
    "h_b_m": ("blockage.blocker_height", _ident, _ident, ""),
    "w1_m": ("blockage.blocker_w1", _ident, _ident, ""),
    "w2_m": ("blockage.blocker_w2", _ident, _ident, ""),
    "lambda_b_per_m2": ("blockage.blocker_density", _ident, _ident, ""),
    "v_b_mps": ("blockage.blocker_speed", _ident, _ident, ""),
    "wall_mean_len_m": ("blockage.wall_mean_length", _ident, _ident, ""),
    "lambda_w_per_m2": ("blockage.wall_density", _ident, _ident, ""),
    "phi_ah_deg": ("ap.phi_h", _deg, _undeg, "phi_ah_rad"),
    "phi_av_deg": ("ap.phi_v", _deg, _undeg, "phi_av_rad"),
    "phi_uh_deg": ("ue.phi_h", _deg, _undeg, "phi_uh_rad"),
    "phi_uv_deg": ("ue.phi_v", _deg, _undeg, "phi_uv_rad"),
    "k_a": ("ap.k", _ident, _ident, ""),
    "k_u": ("ue.k", _ident, _ident, ""),
    "g_am_dbi": ("ap.g_main", db_to_linear, linear_to_db, "g_am_lin"),
    "g_as_dbi": ("ap.g_side", db_to_linear, linear_to_db, "g_as_lin"),
    "g_um_dbi": ("ue.g_main", db_to_linear, linear_to_db, "g_um_lin"),
    "g_us_dbi": ("ue.g_side", db_to_linear, linear_to_db, "g_us_lin"),
    "p_t_dbm": ("propagation.tx_power", dbm_to_watts, watts_to_dbm, "p_t_w"),
    "sigma2_dbm": ("propagation.noise_power", dbm_to_watts, watts_to_dbm, "sigma2_w"),
    "f_thz": ("propagation.frequency", _thz, _unthz, "f_hz"),
    "k_abs_per_m": ("propagation.absorption", _ident, _ident, ""),
    "tau_db": ("propagation.sinr_threshold", db_to_linear, linear_to_db, "tau_lin"),
    "r_b_m": ("r_b", _ident, _ident, ""),
    "r_t_m": ("r_t_override", _ident, _ident, ""),
}
_ALIASES = {alias: key for key, (_, _, _, alias) in _KEYS.items() if alias}
_STRING_KEYS = {"wall_len_law": "blockage.wall_length_law", "k_abs_table": "propagation.k_table"}

CONFIG_KEYS = tuple(_KEYS) + tuple(_STRING_KEYS)


def parse_config(text: str, base_dir: str | os.PathLike | None = None) -> Scenario:
    """Parse ``key = value`` text; absent keys keep their defaults."""
    changes: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno)
        if key in _STRING_KEYS:
            path = _STRING_KEYS[key]
            if key == "k_abs_table":
                p = Path(value)
                if base_dir is not None and not p.is_absolute():
                    p = Path(base_dir) / p
                try:
                    changes[path] = KTable.load(p)
                except ConfigError as exc:
                    raise ConfigError(str(exc), lineno) from exc
            else:
                changes[path] = value.lower()
            continue
        si = key in _ALIASES
        canonical = _ALIASES.get(key, key)
        if canonical not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        path, to_si, _, _ = _KEYS[canonical]
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"value for {key!r} is not a number: {value!r}", lineno) from None
        if not math.isfinite(number):
            raise ConfigError(f"value for {key!r} must be finite", lineno)
        changes[path] = number if si else to_si(number)
    try:
        return Scenario().replace(**changes)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(source: str | os.PathLike) -> Scenario:
    """Load from a path, or from config text when ``source`` is not an existing file."""
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source
                                            and "=" not in source and source.strip()):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return parse_config(text, base_dir=path.parent)
    return parse_config(str(source))


def _get(s: Scenario, path: str):
    if "." not in path:
        return getattr(s, path)
    grp, name = path.split(".", 1)
    obj = getattr(s.antenna, grp) if grp in ("ap", "ue") else getattr(s, grp)
    return getattr(obj, name)


def _exact_inverse(value: float, to_si, from_si) -> float | None:
    """A config-unit number that maps back to ``value`` exactly, if a nearby one exists."""
    guess = from_si(value)
    for digits in (12, 15, 17):
        short = float(f"{guess:.{digits}g}")
        if to_si(short) == value:
            return short
    up = down = guess
    for _ in range(64):
        up = math.nextafter(up, math.inf)
        down = math.nextafter(down, -math.inf)
        if to_si(up) == value:
            return up
        if to_si(down) == value:
            return down
    return None


def dump_scenario(s: Scenario) -> str:
    """Serialize to config text; ``parse_config(dump_scenario(s)) == s``."""
    lines = []
    for key, (path, to_si, from_si, alias) in _KEYS.items():
        value = _get(s, path)
        if value is None:
            continue
        v = _exact_inverse(value, to_si, from_si)
        if v is None:
            lines.append(f"{alias} = {value!r}")
        else:
            lines.append(f"{key} = {v!r}")
    lines.append(f"wall_len_law = {s.blockage.wall_length_law}")
    if s.propagation.k_table is not None:
        lines.append(f"k_abs_table = {s.propagation.k_table.source}")
    return "\n".join(lines) + "\n"
