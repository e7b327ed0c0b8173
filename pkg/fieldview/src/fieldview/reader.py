"""Parser for the geotfield1 format (text header + float64 payload).

Implemented against the documented format only; this package never imports
the solver.
"""

import numpy as np

MAGIC = "geotfield1"


class FieldReadError(ValueError):
    pass


def read_field(path):
    """Return (meta dict, array): (nx, ny) for payload E, (nx, ny, N) for F."""
    with open(path, "rb") as fh:
        blob = fh.read()
    sep = blob.find(b"\n\n")
    if sep < 0 or not blob.startswith(MAGIC.encode("ascii")):
        raise FieldReadError(f"{path}: not a {MAGIC} file")
    meta = {}
    for line in blob[:sep].decode("ascii").splitlines()[1:]:
        key, _, value = line.partition(" ")
        meta[key] = value
    try:
        nx, ny, n = int(meta["nx"]), int(meta["ny"]), int(meta["N"])
        for key in ("dx", "dy", "ox", "oy", "time"):
            meta[key] = float(meta[key])
        payload = meta["payload"]
    except (KeyError, ValueError) as exc:
        raise FieldReadError(f"{path}: malformed header ({exc})") from exc
    meta["nx"], meta["ny"], meta["N"] = nx, ny, n
    shape = (nx, ny, n) if payload == "F" else (nx, ny)
    data = np.frombuffer(blob[sep + 2 :], dtype="<f8")
    if data.size != np.prod(shape):
        raise FieldReadError(
            f"{path}: payload has {data.size} values, expected {np.prod(shape)}"
        )
    return meta, data.reshape(shape).copy()


def energy_map(meta, data):
    """The (nx, ny) energy array of a field file; rejects F payloads."""
    if meta["payload"] != "E":
        raise FieldReadError("expected an energy (payload E) field")
    return data


def axes_1d(meta):
    """Cell-center coordinate arrays (x, y)."""
    x = meta["ox"] + (np.arange(meta["nx"]) + 0.5) * meta["dx"]
    y = meta["oy"] + (np.arange(meta["ny"]) + 0.5) * meta["dy"]
    return x, y


def extent(meta):
    """imshow extent (x0, x1, y0, y1) of the cell-centered grid."""
    return (
        meta["ox"],
        meta["ox"] + meta["nx"] * meta["dx"],
        meta["oy"],
        meta["oy"] + meta["ny"] * meta["dy"],
    )
