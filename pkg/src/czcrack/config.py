"""Run configuration: physical-to-normalised conversion and the INI config file.

A config file has a ``[normalized]`` block (b, beta, delta_c, m, theta, mode)
or a ``[physical]`` block that is converted with :func:`normalize_physical`;
when both are present the normalised block is used.  ``[mesh]``,
``[solver]``, ``[output]`` and ``[probes]`` are optional.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
import io
import logging

from .solver import MaterialParams, SolverSettings
from .viscoelastic import CreepParams

log = logging.getLogger(__name__)

SECONDS_PER = {"s": 1.0, "min": 60.0, "hr": 3600.0, "day": 86400.0}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (message names section and key)."""


class UnitError(ConfigError):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional material and loading data.

    ``sigma0`` is in MPa * (time_unit)**(1/b), so the durability time comes
    out in ``time_unit``.  ``eta`` is a tensile (Young-type) viscosity unless
    ``viscosity_kind`` is ``"shear"``.
    """

    nu: float
    E0: float  # MPa
    eta: float  # MPa * eta_time_unit
    theta_hat: float
    b: float
    beta: float
    sigma0: float
    q_hat: float  # MPa
    a0_hat: float  # mm
    delta_c_hat: float  # mm
    stress_state: str = "plane-stress"
    time_unit: str = "hr"
    theta_unit: str = "s"
    eta_time_unit: str = "s"
    viscosity_kind: str = "tensile"

    def __post_init__(self):
        for name in ("E0", "eta", "theta_hat", "b", "beta", "sigma0", "q_hat", "a0_hat",
                     "delta_c_hat"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"physical.{name} must be positive")
        if not 0.0 < self.nu < 0.5:
            raise ConfigError("physical.nu must lie in (0, 0.5)")
        if self.stress_state not in ("plane-stress", "plane-strain"):
            raise ConfigError("physical.stress_state must be plane-stress or plane-strain")
        if self.viscosity_kind not in ("tensile", "shear"):
            raise ConfigError("physical.viscosity_kind must be tensile or shear")
        for name in ("time_unit", "theta_unit", "eta_time_unit"):
            if getattr(self, name) not in SECONDS_PER:
                raise UnitError(f"physical.{name}: unknown unit {getattr(self, name)!r}; "
                                f"choose from {sorted(SECONDS_PER)}")


@dataclass(frozen=True)
class Normalisation:
    """Derived scales reported alongside the normalised parameters."""

    t_inf_hat: float  # in PhysicalParams.time_unit
    mu0: float
    kappa: float
    material: MaterialParams


def shear_modulus(E0: float, nu: float) -> float:
    return E0 / (2.0 * (1.0 + nu))


def kolosov(nu: float, stress_state: str) -> float:
    """Kolosov constant: 3 - 4 nu (plane strain), (3 - nu)/(1 + nu) (plane stress)."""
    return 3.0 - 4.0 * nu if stress_state == "plane-strain" else (3.0 - nu) / (1.0 + nu)


def normalize_physical(p: PhysicalParams, mode: str = "viscoelastic") -> Normalisation:
    """Map dimensional data to (b, beta, delta_c, m, theta).

    t_inf = (q/sigma0)**-b, m = mu0 t_inf / eta_shear, theta = theta_hat / t_inf and
    delta_c = 2 mu0 delta_c_hat / ((1 + kappa) a0 q).  With a tensile viscosity
    the shear viscosity is eta / (2 (1 + nu)), the same factor relating mu0 to E0.
    """
    t_inf = (p.q_hat / p.sigma0) ** (-p.b)
    t_inf_s = t_inf * SECONDS_PER[p.time_unit]
    mu0 = shear_modulus(p.E0, p.nu)
    kappa = kolosov(p.nu, p.stress_state)
    eta_shear = p.eta if p.viscosity_kind == "shear" else p.eta / (2.0 * (1.0 + p.nu))
    eta_s = eta_shear * SECONDS_PER[p.eta_time_unit]  # MPa s
    m = mu0 * t_inf_s / eta_s
    theta = p.theta_hat * SECONDS_PER[p.theta_unit] / t_inf_s
    delta_c = 2.0 * mu0 * p.delta_c_hat / ((1.0 + kappa) * p.a0_hat * p.q_hat)
    mat = MaterialParams(b=p.b, beta=p.beta, delta_c=delta_c,
                         creep=CreepParams(m=m, theta=theta), mode=mode)
    return Normalisation(t_inf_hat=t_inf, mu0=mu0, kappa=kappa, material=mat)


PMMA = PhysicalParams(nu=0.35, E0=3100.0, eta=2e7, theta_hat=3.23e4, b=18.5, beta=0.5,
                      sigma0=58.1, q_hat=51.6, a0_hat=0.1, delta_c_hat=0.0016)


@dataclass
class RunConfig:
    material: MaterialParams = field(default_factory=lambda: MaterialParams(b=4.0, beta=2.0))
    settings: SolverSettings = field(default_factory=SolverSettings)
    physical: PhysicalParams | None = None
    out_dir: str = "out"
    probe_t: tuple = ()

    # ------------------------------------------------------------ parsing
    @classmethod
    def from_string(cls, text: str, source: str = "<string>") -> "RunConfig":
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        known = {"normalized", "physical", "mesh", "solver", "output", "probes"}
        extra = set(cp.sections()) - known
        if extra:
            raise ConfigError(f"{source}: unknown section(s) {sorted(extra)}")
        if not (cp.has_section("normalized") or cp.has_section("physical")):
            raise ConfigError(f"{source}: need a [normalized] or [physical] section")

        physical = None
        if cp.has_section("physical"):
            missing = [k for k in ("time_unit", "theta_unit", "eta_time_unit")
                       if k not in cp["physical"]]
            if missing:
                # sigma0, theta_hat and eta each carry a time unit; guessing is unsafe
                raise UnitError(f"{source}: [physical] must state {', '.join(missing)} "
                                f"(one of {sorted(SECONDS_PER)})")
            physical = _build(PhysicalParams, cp["physical"], source, "physical")
        if cp.has_section("normalized"):
            sec = dict(cp["normalized"])
            creep = CreepParams(m=_num(sec.pop("m", "0"), source, "normalized.m"),
                                theta=_num(sec.pop("theta", "1"), source, "normalized.theta"))
            if physical is not None:
                log.warning("%s: both [normalized] and [physical] given; using [normalized]",
                            source)
            mat = _build(MaterialParams, sec, source, "normalized", creep=creep)
        else:
            mode = cp["physical"].get("mode", "viscoelastic")
            mat = normalize_physical(physical, mode=mode).material

        kw = {}
        for sec_name in ("mesh", "solver"):
            if cp.has_section(sec_name):
                sec = dict(cp[sec_name])
                n = sec.pop("n", None)
                if n is not None:
                    if "h" in sec:
                        raise ConfigError(f"{source}: give {sec_name}.n or {sec_name}.h, not both")
                    n_val = _num(n, source, f"{sec_name}.n")
                    if not n_val > 0:
                        raise ConfigError(f"{source}: {sec_name}.n must be positive")
                    sec["h"] = repr(1.0 / n_val)
                kw.update(_typed(SolverSettings, sec, source, sec_name))
        try:
            settings = SolverSettings(**kw)
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        out_dir = cp.get("output", "dir", fallback="out")
        probes = ()
        if cp.has_section("probes"):
            raw = cp.get("probes", "t", fallback="").strip()
            probes = tuple(_num(v, source, "probes.t") for v in raw.split(",") if v.strip())
        return cls(material=mat, settings=settings, physical=physical, out_dir=out_dir,
                   probe_t=probes)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_string(fh.read(), source=str(path))

    # ------------------------------------------------------- serialisation
    def to_string(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        m = self.material
        cp["normalized"] = {"b": repr(m.b), "beta": repr(m.beta), "delta_c": repr(m.delta_c),
                            "m": repr(m.creep.m), "theta": repr(m.creep.theta), "mode": m.mode}
        if self.physical is not None:
            cp["physical"] = {f.name: _fmt(getattr(self.physical, f.name))
                              for f in fields(self.physical)}
        cp["solver"] = {f.name: _fmt(getattr(self.settings, f.name))
                        for f in fields(self.settings)}
        cp["output"] = {"dir": self.out_dir}
        if self.probe_t:
            cp["probes"] = {"t": ", ".join(repr(float(v)) for v in self.probe_t)}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with material fields (b, beta, mode, delta_c) or settings fields replaced."""
        mat_kw = {k: v for k, v in kw.items() if k in {"b", "beta", "mode", "delta_c"} and v is not None}
        set_kw = {k: v for k, v in kw.items()
                  if k in {f.name for f in fields(SolverSettings)} and v is not None}
        return replace(self, material=replace(self.material, **mat_kw),
                       settings=replace(self.settings, **set_kw))


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _num(raw: str, source: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{source}: {where} = {raw!r} is not a number") from None


def _typed(cls, section, source, sec_name):
    """Convert section entries to the field types of dataclass ``cls``."""
    types = {f.name: f.type for f in fields(cls)}
    out = {}
    for key, raw in section.items():
        if key not in types:
            raise ConfigError(f"{source}: unknown key {sec_name}.{key}")
        typ = str(types[key])
        where = f"{sec_name}.{key}"
        if "bool" in typ:
            low = raw.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ConfigError(f"{source}: {where} = {raw!r} is not a boolean")
            out[key] = low in ("true", "yes", "1", "on")
        elif "int" in typ:
            try:
                out[key] = int(raw)
            except ValueError:
                raise ConfigError(f"{source}: {where} = {raw!r} is not an integer") from None
        elif "float" in typ:
            out[key] = _num(raw, source, where)
        else:
            out[key] = raw.strip()
    return out


def _build(cls, section, source, sec_name, **extra):
    kw = _typed(cls, {k: v for k, v in dict(section).items() if k != "mode" or cls is MaterialParams},
                source, sec_name)
    try:
        return cls(**kw, **extra)
    except TypeError as exc:
        raise ConfigError(f"{source}: [{sec_name}] {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{source}: [{sec_name}] {exc}") from exc


def pmma_normalisation(mode: str = "viscoelastic") -> Normalisation:
    return normalize_physical(PMMA, mode=mode)


__all__ = [
    "ConfigError", "UnitError", "PhysicalParams", "Normalisation", "normalize_physical",
    "RunConfig", "PMMA", "pmma_normalisation", "shear_modulus", "kolosov",
]
