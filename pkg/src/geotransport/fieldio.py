"""Self-describing field files: text header block + little-endian float64 payload."""

import numpy as np

from .dg import FieldState, SpatialGrid2D

MAGIC = "geotfield1"


class FieldFormatError(ValueError):
    pass


def _header_lines(state: FieldState, scheme, resolution, payload):
    g = state.grid
    n = state.f.shape[-1] if payload == "F" else 0
    lines = [
        MAGIC,
        f"scheme {scheme}",
        f"resolution {resolution}",
        f"N {n}",
        f"nx {g.nx}",
        f"ny {g.ny}",
        f"dx {g.dx!r}",
        f"dy {g.dy!r}",
        f"ox {g.origin[0]!r}",
        f"oy {g.origin[1]!r}",
        f"time {state.time!r}",
        f"payload {payload}",
    ]
    return "\n".join(lines) + "\n\n"


def write_field(path, state: FieldState, scheme="none", resolution="", payload="F", energy=None):
    """Write coefficients (payload=F) or an energy map (payload=E)."""
    if payload == "F":
        data = np.ascontiguousarray(state.f, dtype="<f8")
    elif payload == "E":
        data = np.ascontiguousarray(energy, dtype="<f8")
        if data.shape != (state.grid.nx, state.grid.ny):
            raise FieldFormatError("energy payload shape mismatch")
    else:
        raise FieldFormatError(f"unknown payload kind {payload!r}")
    with open(path, "wb") as fh:
        fh.write(_header_lines(state, scheme, resolution, payload).encode("ascii"))
        fh.write(data.tobytes())


def write_energy_field(path, grid, energy, time=0.0, scheme="oracle", resolution=""):
    state = FieldState(grid, np.zeros((grid.nx, grid.ny, 0)), time)
    write_field(path, state, scheme=scheme, resolution=resolution, payload="E", energy=energy)


def read_field(path):
    """Read a field file; returns (meta dict, array).

    The array has shape (nx, ny, N) for payload F and (nx, ny) for E.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    sep = blob.find(b"\n\n")
    if sep < 0 or not blob.startswith(MAGIC.encode("ascii")):
        raise FieldFormatError(f"{path}: not a {MAGIC} file")
    header = blob[:sep].decode("ascii").splitlines()
    meta = {}
    for line in header[1:]:
        key, _, value = line.partition(" ")
        meta[key] = value
    try:
        nx, ny, n = int(meta["nx"]), int(meta["ny"]), int(meta["N"])
        for key in ("dx", "dy", "ox", "oy", "time"):
            meta[key] = float(meta[key])
        payload = meta["payload"]
    except (KeyError, ValueError) as exc:
        raise FieldFormatError(f"{path}: malformed header ({exc})") from exc
    meta["nx"], meta["ny"], meta["N"] = nx, ny, n
    shape = (nx, ny, n) if payload == "F" else (nx, ny)
    data = np.frombuffer(blob[sep + 2 :], dtype="<f8")
    if data.size != np.prod(shape):
        raise FieldFormatError(
            f"{path}: payload has {data.size} values, expected {np.prod(shape)}"
        )
    return meta, data.reshape(shape).copy()


def state_from_file(path):
    meta, data = read_field(path)
    if meta["payload"] != "F":
        raise FieldFormatError(f"{path}: payload E cannot rebuild a FieldState")
    grid = SpatialGrid2D(
        meta["nx"], meta["ny"], meta["dx"], meta["dy"], (meta["ox"], meta["oy"])
    )
    return FieldState(grid, data, meta["time"]), meta


def export_matrices(outdir, matrices, scheme, resolution):
    """Dense row-major float64 dumps plus a text sidecar."""
    import os

    os.makedirs(outdir, exist_ok=True)
    names = {
        "mass": matrices.mass,
        "lumped_mass": np.diag(matrices.lumped_mass),
    }
    for i, axis in enumerate("xyz"):
        names[f"stiffness_{axis}"] = matrices.stiffness[i]
        names[f"advection_{axis}"] = matrices.advection[i]
        names[f"dissipation_{axis}"] = matrices.dissipation[i]
    for name, mat in names.items():
        np.ascontiguousarray(mat, dtype="<f8").tofile(
            os.path.join(outdir, f"{name}.bin")
        )
    with open(os.path.join(outdir, "meta.txt"), "w") as fh:
        fh.write(f"kind {scheme}\n")
        fh.write(f"N {matrices.basis.n}\n")
        fh.write(f"resolution {resolution}\n")
        fh.write(f"v {matrices.v_dissipation!r}\n")
        fh.write("layout dense row-major float64 little-endian\n")
