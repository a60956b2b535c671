"""End-to-end evaluation of a scenario, figure datasets, sweeps and CSV output."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .diffraction import equivalent_fresnel
from .errors import InvalidArgumentError, NoLinkError, UnstableResonatorError
from .link_budget import LinkBudget, capacity, received_power
from .ofdm_sim import BerReport, run_link
from .power_chain import (
    PowerReport,
    fundamental_beam_area,
    fundamental_beam_power,
    shg_power,
    shg_validity,
)
from .resonator_modes import (
    Stability,
    allowed_modes,
    beam_propagation_factor,
    classify_stability,
    equivalent_parameters,
    fundamental_waist_at_m1,
    mode_radius_profile,
    receiver_beam_diameter,
)
from .scenario import Scenario, provenance_lines

__all__ = [
    "LinkResult",
    "Table",
    "evaluate",
    "run_sweep",
    "run_figure",
    "run_ofdm",
    "check_report",
    "FIGURES",
]


@dataclass(frozen=True)
class LinkResult:
    """Every intermediate of the analytical chain for one operating point.

    Quantities that need a confined eigenmode are NaN when ``status`` is not
    :attr:`Stability.STABLE`.
    """

    status: Stability
    g_star: float
    L_star: float
    w00_m1: float
    m_squared: float
    mode_count: int
    receiver_diameter: float
    N_prime: float
    g_prime: float
    power: PowerReport
    a_nu: float
    p_2nu: float
    rayleigh_range: float
    shg_plane_wave_valid: bool
    budget: LinkBudget

    @property
    def p_r(self) -> float:
        return self.budget.p_r

    @property
    def spectral_efficiency(self) -> float:
        return self.budget.spectral_efficiency

    @property
    def link_up(self) -> bool:
        return self.budget.p_r > 0.0


def evaluate(sc: Scenario) -> LinkResult:
    geom = sc.geometry
    eq = equivalent_parameters(geom)
    status = classify_stability(geom)
    power = fundamental_beam_power(sc.gain, sc.efficiencies, sc.losses, geom, sc.p_in)
    nan = math.nan
    if status is not Stability.STABLE:
        budget = capacity(sc.detector, 0.0)
        return LinkResult(status, eq.g1_star, eq.L_star, nan, nan, 0, nan, nan, nan, power,
                          nan, 0.0, nan, False, budget)
    w0 = fundamental_waist_at_m1(geom)
    m_sq = beam_propagation_factor(geom) ** 2
    fres = equivalent_fresnel(geom)
    a_nu = fundamental_beam_area(geom, sc.shg.l_s)
    p_2nu = shg_power(sc.shg, power.p_nu, a_nu, geom.wavelength)
    validity = shg_validity(sc.shg, geom)
    p_r = received_power(p_2nu, sc.eta_dev, geom.d, sc.losses.alpha_air, sc.papr)
    return LinkResult(
        status=status, g_star=eq.g1_star, L_star=eq.L_star, w00_m1=w0, m_squared=m_sq,
        mode_count=len(allowed_modes(m_sq)), receiver_diameter=receiver_beam_diameter(geom),
        N_prime=fres.N_prime, g_prime=fres.g1_prime, power=power, a_nu=a_nu, p_2nu=p_2nu,
        rayleigh_range=validity.rayleigh_range, shg_plane_wave_valid=validity.plane_wave_valid,
        budget=capacity(sc.detector, p_r))


# --- tables -------------------------------------------------------------------

@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def where(self, **eq) -> "Table":
        idx = {self.columns.index(k): v for k, v in eq.items()}
        rows = [r for r in self.rows if all(r[i] == v for i, v in idx.items())]
        return Table(self.name, self.columns, rows, self.notes)

    def write_csv(self, out: TextIO) -> None:
        for line in self.notes:
            out.write(f"# {line}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, Stability):
        return v.value
    return v


SWEEP_COLUMNS = [
    "status", "g* []", "M^2 []", "Gamma_diff []", "delta []", "P_th [W]", "eta_nu []",
    "P_nu [W]", "A_nu [m^2]", "P_2nu [W]", "P_r [W]", "SNR [dB]", "C [bit/s/Hz]", "C [bit/s]",
]


def _sweep_row(res: LinkResult) -> tuple:
    b = res.budget
    return (res.status, res.g_star, res.m_squared, res.power.gamma_diff, res.power.delta,
            res.power.p_th, res.power.eta_nu, res.power.p_nu, res.a_nu, res.p_2nu, b.p_r,
            b.snr_db, b.spectral_efficiency, b.capacity)


_UNITS = {"d": "m", "f_RR": "m", "f": "m", "R4": "", "P_in": "W"}


def run_sweep(sc: Scenario, workers: int = 1) -> Table:
    """One row of pipeline outputs per grid point of ``sc.sweep``, in grid order."""
    if sc.sweep is None:
        raise InvalidArgumentError("scenario has no sweep section")
    var = sc.sweep.variable
    values = [float(v) for v in sc.sweep.values()]
    points = [sc.with_value(var, v) for v in values]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(evaluate, points))
    table = Table("sweep", [f"{var} [{_UNITS[var]}]"] + SWEEP_COLUMNS, notes=provenance_lines(sc))
    table.rows = [(v,) + _sweep_row(r) for v, r in zip(values, results)]
    return table


# --- figures ------------------------------------------------------------------

FIG6_F = (0.02, 0.03, 0.04)
FIG6_F_RR = (1.0, 2.0, 3.0)
FIG6_D = 0.5
FIG7_F = 0.03
FIG7_D = (1.0, 5.0, 10.0)
FIG7_F_RR = (3.0, 4.0, 6.0)
FIG9_P_IN = (100.0, 200.0, 300.0, 400.0)
FIG9_R4 = np.round(np.arange(1, 1501) * 0.0002, 10)
FIG8_D = np.round(np.linspace(0.5, 12.0, 231), 10)
FIG10_D = (2.0, 8.0, 10.0)
FIG10_P_IN = np.arange(0.0, 401.0)
CAPTION = dict(f=0.03, f_RR=3.0)

PROFILE_COLUMNS = ["f [m]", "f_RR [m]", "d [m]", "z [m]", "z/z_M2 []", "w00 [m]", "w [m]"]


def _caption_scenario(sc: Scenario, **values) -> Scenario:
    for name in ("f", "f_RR", "d", "R4", "P_in"):
        if name in values:
            sc = sc.with_value(name, values[name])
    return sc


def _profile_rows(sc: Scenario, samples: int) -> list[tuple]:
    g = sc.geometry
    ms = mode_radius_profile(g, samples)
    return [(g.f, g.f_rr, g.d, z, z / g.z_m2, w00, w)
            for z, w00, w in zip(ms.z.tolist(), ms.w00.tolist(), ms.w.tolist())]


def _fig6(sc: Scenario, samples: int) -> Table:
    t = Table("fig6", PROFILE_COLUMNS)
    for f in FIG6_F:
        for f_rr in FIG6_F_RR:
            t.rows += _profile_rows(_caption_scenario(sc, f=f, f_RR=f_rr, d=FIG6_D), samples)
    return t


def _fig7(sc: Scenario, samples: int) -> Table:
    t = Table("fig7", PROFILE_COLUMNS)
    for d in FIG7_D:
        for f_rr in FIG7_F_RR:
            t.rows += _profile_rows(_caption_scenario(sc, f=FIG7_F, f_RR=f_rr, d=d), samples)
    return t


def _fig9(sc: Scenario, samples: int) -> Table:
    t = Table("fig9", ["P_in [W]", "R4 []", "status", "P_th [W]", "eta_nu []", "P_nu [W]"])
    base = _caption_scenario(sc, d=5.0, **CAPTION)
    for p_in in FIG9_P_IN:
        for r4 in FIG9_R4.tolist():
            s = _caption_scenario(base, P_in=p_in, R4=r4)
            p = fundamental_beam_power(s.gain, s.efficiencies, s.losses, s.geometry, s.p_in)
            t.rows.append((p_in, r4, p.status, p.p_th, p.eta_nu, p.p_nu))
    return t


def _fig8(sc: Scenario, samples: int) -> Table:
    t = Table("fig8", ["d [m]", "status", "M^2 []", "Gamma_diff []", "P_nu [W]", "P_r [W]",
                       "SNR [dB]", "C [bit/s/Hz]"])
    base = _caption_scenario(sc, R4=0.02, **CAPTION)
    for d in FIG8_D.tolist():
        r = evaluate(base.with_value("d", d))
        t.rows.append((d, r.status, r.m_squared, r.power.gamma_diff, r.power.p_nu, r.p_r,
                       r.budget.snr_db, r.spectral_efficiency))
    return t


def _fig10(sc: Scenario, samples: int) -> Table:
    t = Table("fig10", ["d [m]", "P_in [W]", "status", "P_th [W]", "P_nu [W]", "P_2nu [W]",
                        "P_r [W]", "SNR [dB]", "C [bit/s/Hz]"])
    base = _caption_scenario(sc, R4=0.02, **CAPTION)
    for d in FIG10_D:
        for p_in in FIG10_P_IN.tolist():
            r = evaluate(_caption_scenario(base, d=d, P_in=p_in))
            t.rows.append((d, p_in, r.status, r.power.p_th, r.power.p_nu, r.p_2nu, r.p_r,
                           r.budget.snr_db, r.spectral_efficiency))
    return t


FIGURES = {"fig6": _fig6, "fig7": _fig7, "fig8": _fig8, "fig9": _fig9, "fig10": _fig10}


def run_figure(name: str, sc: Scenario, samples: int = 2048) -> Table:
    """Dataset behind one of the reference figures.

    fig6   TEM00 radius along z, d = 0.5 m, f x f_RR grid
    fig7   TEM00 radius along z, f = 30 mm, d x f_RR grid
    fig8   capacity, M^2 and Gamma_diff versus d (R4 = 2 %)
    fig9   fundamental power versus R4 at d = 5 m for four pump powers
    fig10  capacity versus pump power for d = 2, 8, 10 m
    """
    if name not in FIGURES:
        raise InvalidArgumentError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    table = FIGURES[name](sc, samples)
    table.notes = [f"figure {name}"] + provenance_lines(sc)
    return table


# --- OFDM ---------------------------------------------------------------------

def run_ofdm(sc: Scenario, n_frames: int | None = None, seed: int = 1, workers: int = 1,
             **kwargs) -> BerReport:
    """Monte-Carlo BER at the scenario's analytical SNR."""
    res = evaluate(sc)
    if res.status is not Stability.STABLE:
        raise UnstableResonatorError(f"resonator is {res.status.value}; no link to simulate")
    if not res.link_up:
        raise NoLinkError(f"P_in = {sc.p_in} W is below the threshold {res.power.p_th:.3f} W")
    return run_link(sc.ofdm_config(), res.budget, n_frames=n_frames, seed=seed, workers=workers,
                    **kwargs)


def check_report(sc: Scenario) -> str:
    """Human-readable stability, loss-budget and link report."""
    r = evaluate(sc)
    g = sc.geometry
    p = r.power
    lines = [f"# {ln}" for ln in provenance_lines(sc)]
    lines += [
        "[resonator]",
        f"status              {r.status.value}",
        f"f_RR                {g.f_rr:.6g} m",
        f"g1* = g2*           {r.g_star:.6g}",
        f"L*                  {r.L_star:.6g} m",
    ]
    if r.status is Stability.STABLE:
        lines += [
            f"w00(M1)             {r.w00_m1:.6g} m",
            f"M^2                 {r.m_squared:.6g}",
            f"transverse modes    {r.mode_count}",
            f"beam diameter RR2   {r.receiver_diameter:.6g} m",
            "[loss budget]",
            f"N'                  {r.N_prime:.6g}",
            f"g'                  {r.g_prime:.6g}",
            f"Gamma_diff          {p.gamma_diff:.9g}",
            f"Gamma_M4            {sc.losses.gamma_M4:.6g}",
            f"Gamma_air           {sc.losses.gamma_air(g.d):.9g}",
            f"R1_eq / R2_eq       {p.R1:.9g} / {p.R2:.9g}",
            f"delta               {p.delta:.6g}",
            "[power chain]",
            f"P_in                {sc.p_in:.6g} W",
            f"g0                  {p.g0:.6g} 1/m",
            f"P_th                {p.p_th:.6g} W",
            f"eta_nu              {p.eta_nu:.6g}",
            f"P_nu                {p.p_nu:.6g} W",
            f"A_nu                {r.a_nu:.6g} m^2",
            f"P_2nu               {r.p_2nu:.6g} W",
            f"SHG plane-wave      {'valid' if r.shg_plane_wave_valid else 'outside validity'}"
            f" (l_s = {sc.shg.l_s:.3g} m, z_R = {r.rayleigh_range:.3g} m)",
        ]
    b = r.budget
    lines += [
        "[link]",
        f"P_r                 {b.p_r:.6g} W",
        f"sigma_shot^2        {b.sigma_shot2:.6g} A^2",
        f"sigma_thermal^2     {b.sigma_thermal2:.6g} A^2",
        f"SNR                 {b.snr_db:.6g} dB",
        f"spectral efficiency {b.spectral_efficiency:.6g} bit/s/Hz",
        f"capacity            {b.capacity:.6g} bit/s",
    ]
    return "\n".join(lines) + "\n"
