"""File emission (CSV, JSON, PGM) and config value parsing."""
import ast
import json
import math
import operator
from fractions import Fraction
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_real(value):
    """Parse a config number.

    Integers and integer ratios such as "1/3" stay exact Fractions; anything
    involving a float literal, ``sqrt``, ``pi`` or ``e`` becomes a float.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if not isinstance(value, str):
        raise ConfigError(f"not a number: {value!r}")
    try:
        tree = ast.parse(value.strip(), mode="eval")
        return _eval(tree.body)
    except (SyntaxError, ZeroDivisionError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse number {value!r}: {exc}") from None


def _eval(node):
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return Fraction(node.value) if isinstance(node.value, int) else node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Pow) and not (isinstance(right, Fraction) and right.denominator == 1):
            return float(left) ** float(right)
        if isinstance(left, float) or isinstance(right, float):
            return _BINOPS[type(node.op)](float(left), float(right))
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
            and len(node.args) == 1 and not node.keywords):
        return math.sqrt(float(_eval(node.args[0])))
    raise ValueError("unsupported expression")


def fmt17(v):
    return f"{float(v):.17g}"


def write_json(path, payload):
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    Path(path).write_text(text)
    return text


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_zak_csv(path, Z):
    """One row per node: t_1..t_n, omega_1..omega_n, re, im (17 significant digits)."""
    n = Z.spec.n
    nodes = Z.spec.nodes()
    vals = Z.values.ravel()
    header = ",".join([f"t_{j + 1}" for j in range(n)] + [f"omega_{j + 1}" for j in range(n)] + ["re", "im"])
    lines = [header]
    for row, v in zip(nodes, vals):
        lines.append(",".join([fmt17(c) for c in row] + [fmt17(v.real), fmt17(v.imag)]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_zak_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, :-2], data[:, -2] + 1j * data[:, -1]


def modulus_image(Z):
    """16-bit image of |F|: rows index omega, columns index t (t fastest)."""
    A = Z.modulus
    side = Z.spec.M ** Z.spec.n
    img = A.reshape(side, side).T
    peak = float(img.max())
    scaled = np.zeros_like(img) if peak == 0.0 else img / peak * 65535.0
    return np.rint(scaled).astype(">u2")


def write_pgm(path, image):
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image, dtype=">u2").tobytes())


def read_pgm(path):
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(h, w)


def write_orbit_csv(path, points):
    d = points.shape[1]
    lines = ["m," + ",".join(f"z_{j + 1}" for j in range(d))]
    for m, row in enumerate(points):
        lines.append(f"{m}," + ",".join(fmt17(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_series_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(v) if isinstance(v, int) else fmt17(v) for v in r) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")
