"""Run orchestration: build a configured problem and march it to t_end."""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .basis import FEMN, FPN, SN, make_basis
from .dg import FieldState, slope_limit
from .fieldio import write_field
from .integrator import check_cfl, step_rk2
from .matrices import DEFAULT_DISSIPATION, assemble_matrices
from .positivity import (
    ClipDiagnostics,
    FilterSpec,
    clip_field,
    lanczos_factors,
    limiter_indicator,
)
from .problems import PROBLEMS, l1_error
from .transport import apply_sources
from . import dg


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated, fully deterministic run description."""

    problem: str
    scheme: str = "femn"
    k: int = None
    l_max: int = None
    scale: float = 1.0
    dt: float = None
    t_end: float = None
    limiter: str = None  # minmod | sminmod2 | modminmod2 | none
    positivity: str = None  # clip | filter | none
    sigma_eff: float = None
    filter_strength: float = None
    dissipation: float = DEFAULT_DISSIPATION
    output_dir: str = None
    cadence: int = 0  # snapshots every `cadence` steps; 0 = final only
    save_coefficients: bool = False
    problem_options: dict = field(default_factory=dict)

    def validate(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.scheme not in (FEMN, SN, FPN):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.scheme == FPN:
            if self.l_max is None:
                raise ConfigError("fpn runs need --lmax")
            if self.positivity == "clip":
                raise ConfigError("clipping limiter is only valid for femn/sn")
        else:
            if self.k is None:
                raise ConfigError(f"{self.scheme} runs need --k")
            if self.positivity == "filter":
                raise ConfigError("the spectral filter is only valid for fpn")
        if self.positivity is None:
            self.positivity = "filter" if self.scheme == FPN else "clip"
        if self.positivity not in ("clip", "filter", "none"):
            raise ConfigError(f"unknown positivity mode {self.positivity!r}")
        if self.limiter is not None and self.limiter not in (
            "minmod",
            "sminmod2",
            "modminmod2",
            "none",
        ):
            raise ConfigError(f"unknown limiter {self.limiter!r}")
        if self.scale <= 0.0:
            raise ConfigError("--scale must be positive")
        return self


class Simulation:
    """Everything needed to advance one configured run."""

    def __init__(self, config: RunConfig):
        config.validate()
        self.config = config
        self.spec = PROBLEMS[config.problem](**config.problem_options)
        self.grid = self.spec.make_grid(config.scale)
        self.basis = make_basis(config.scheme, k=config.k, l_max=config.l_max)
        self.matrices = assemble_matrices(self.basis, config.dissipation)
        self.medium = self.spec.make_medium(self.grid)
        self.bc = self.spec.make_bc(self.grid, self.basis, self.matrices)
        self.dt = config.dt if config.dt is not None else self.spec.dt / config.scale
        self.t_end = config.t_end if config.t_end is not None else self.spec.t_end
        self.limiter = config.limiter if config.limiter is not None else self.spec.limiter
        sigma_eff = config.sigma_eff if config.sigma_eff is not None else self.spec.sigma_eff
        if config.scheme == FPN:
            self.filter_spec = FilterSpec(sigma_eff, config.l_max, config.filter_strength)
        else:
            self.filter_spec = None
        check_cfl(self.dt, self.grid)

        energy = self.spec.initial_energy(self.grid)
        self.state = FieldState(self.grid, self.isotropic_coefficients(energy), 0.0)
        self.clip_diag = ClipDiagnostics()
        self.last_indicator = 0.0
        self._mass_row = self.matrices.mass.sum(axis=0)

    def isotropic_coefficients(self, energy):
        v = self.basis.basis_integrals
        u = v / self.matrices.lumped_mass
        return energy[:, :, None] * (u / (v @ u))[None, None, :]

    def energy(self, f=None):
        f = self.state.f if f is None else f
        return f @ self.basis.basis_integrals

    def rhs(self, state):
        m = self.matrices

        def source(f, out):
            apply_sources(f, self.medium, m, out)

        return dg.compute_rhs(
            state, self.bc, m.advection[0], m.advection[1], m.dissipation[0],
            m.dissipation[1], source,
        )

    def hooks(self):
        hooks = []
        if self.limiter != "none":
            hooks.append(lambda s: slope_limit(s, self.bc, self.limiter))
        if self.config.positivity == "clip":

            def clip(s):
                self.last_indicator = limiter_indicator(s.f)
                return FieldState(
                    s.grid, clip_field(s.f, self.matrices, self.clip_diag), s.time
                )

            hooks.append(clip)
        elif self.config.positivity == "filter":
            factors = lanczos_factors(
                self.filter_spec, self.dt, self.basis.n
            )

            def filt(s):
                return FieldState(s.grid, s.f * factors, s.time)

            hooks.append(filt)
        return hooks

    def run(self, observer=None):
        """March to t_end; observer(step, sim) is called after every step."""
        self.n_steps = max(1, int(round(self.t_end / self.dt)))
        self.dt = self.t_end / self.n_steps
        hooks = self.hooks()
        for step in range(1, self.n_steps + 1):
            self.state = step_rk2(self.state, self.rhs, self.dt, hooks)
            if observer is not None:
                observer(step, self)
        return self.state


def run_to_files(config: RunConfig, log=print):
    """Full artifact-producing run: snapshots, diagnostics CSV, summary."""
    sim = Simulation(config)
    outdir = config.output_dir or f"out_{config.problem}_{config.scheme}"
    os.makedirs(outdir, exist_ok=True)
    tag = f"{config.problem}_{config.scheme}_{sim.basis.resolution_label.replace('=', '')}"

    diag_path = os.path.join(outdir, f"{tag}_diagnostics.csv")
    diag_file = open(diag_path, "w", newline="")
    writer = csv.writer(diag_file)
    writer.writerow(["step", "time", "indicator_fraction", "clipped_energy"])

    def snapshot(step):
        path = os.path.join(outdir, f"{tag}_step{step:06d}.field")
        if config.save_coefficients:
            write_field(path, sim.state, config.scheme, sim.basis.resolution_label, "F")
        else:
            write_field(
                path, sim.state, config.scheme, sim.basis.resolution_label,
                "E", energy=sim.energy(),
            )
        return path

    def observer(step, sim_):
        writer.writerow(
            [step, f"{sim_.state.time:.10g}", f"{sim_.last_indicator:.6e}",
             f"{sim_.clip_diag.clipped_energy:.6e}"]
        )
        if config.cadence and step % config.cadence == 0:
            snapshot(step)

    sim.run(observer)
    final_path = snapshot(sim.n_steps)
    diag_file.close()

    summary = [f"run {tag}", f"final_time {sim.state.time:.10g}", f"final_field {final_path}"]
    if sim.spec.oracle is not None:
        exact = sim.spec.oracle(sim.grid, sim.state.time)
        e = sim.energy()
        summary.append(f"l1_error {l1_error(e, exact):.8e}")
        summary.append(f"linf_error {np.max(np.abs(e - exact)):.8e}")
    with open(os.path.join(outdir, f"{tag}_summary.txt"), "w") as fh:
        fh.write("\n".join(summary) + "\n")
    for line in summary:
        log(line)
    return sim
