"""Expected values for the calc kernel, computed with Python arithmetic.

Run from this directory to regenerate calc_vectors.json:

    python3 calc_oracle.py > calc_vectors.json

Each program is written in the calc syntax. The oracle translates it to
Python (``^`` becomes ``**``) and formats the last value the way calc
prints numbers: integral values below 1e15 without a decimal point,
everything else with 15 significant digits.
"""

import json
import math


def fmt_number(x):
    if x == 0:
        return "0"
    if float(x).is_integer() and abs(x) < 1e15:
        return "%d" % x
    return "%.15g" % x


def fmt_value(v):
    if isinstance(v, list):
        return "[" + ", ".join(fmt_value(i) for i in v) + "]"
    if isinstance(v, str):
        return v
    return fmt_number(float(v))


PROGRAMS = [
    "2 + 3",
    "2 * 21",
    "x = 2\nx + 3",
    "n = 50\nn",
    "10 / 4",
    "1 / 3",
    "2 ^ 10",
    "2 ^ 0.5",
    "-3 ^ 2",
    "(1 + 2) * (3 + 4)",
    "7 % 3",
    "17.5 % 4",
    "1e20",
    "123456789012345",
    "1234567890123456",
    "0.1 + 0.2",
    "a = 3; b = 4; sqrt(a ^ 2 + b ^ 2)",
    "mean([1, 2, 3, 4])",
    "sum([1.5, 2.5, 3])",
    "max([3, 9, 2])",
    "min([3, 9, 2])",
    "length([1, 2, 3, 4, 5])",
    "abs(-7.25)",
    "floor(2.7)",
    "ceiling(2.1)",
    "round(3.14159, 2)",
    "exp(1)",
    "log(10)",
    "seq(1, 5)",
    "x = [1, 2, 3]\nsum(x) / length(x)",
    "-0.0 * 5",
    "100000 * 100000 * 100000",
]

PY_FUNCS = {
    "sqrt": math.sqrt,
    "mean": lambda xs: sum(xs) / len(xs),
    "sum": sum,
    "max": max,
    "min": min,
    "length": len,
    "abs": abs,
    "floor": math.floor,
    "ceiling": math.ceil,
    "round": lambda x, d=0: math.floor(x * 10 ** d + 0.5) / 10 ** d,
    "exp": math.exp,
    "log": math.log,
    "seq": lambda a, b: list(range(int(a), int(b) + 1)),
}


def run(program):
    env = dict(PY_FUNCS)
    value = None
    for stmt in program.replace(";", "\n").split("\n"):
        stmt = stmt.strip().replace("^", "**")
        if not stmt:
            continue
        if "=" in stmt and not stmt.startswith("=") and "==" not in stmt:
            name, expr = stmt.split("=", 1)
            env[name.strip()] = eval(expr, {}, env)
            value = None
        else:
            value = eval(stmt, {}, env)
    return fmt_value(value)


def plot_points(ys, width_in, height_in):
    w, h = round(width_in * 96), round(height_in * 96)
    xs = list(range(1, len(ys) + 1))
    mx, my = w * 0.1, h * 0.1

    def scale(v, lo, hi, a, b):
        return (a + b) / 2 if hi == lo else a + (v - lo) / (hi - lo) * (b - a)

    pts = [
        "%.2f,%.2f" % (scale(x, min(xs), max(xs), mx, w - mx), scale(y, min(ys), max(ys), h - my, my))
        for x, y in zip(xs, ys)
    ]
    return {"ys": ys, "width": width_in, "height": height_in, "px_width": w, "px_height": h, "points": " ".join(pts)}


if __name__ == "__main__":
    out = {
        "programs": [{"code": p, "value": run(p)} for p in PROGRAMS],
        "plots": [
            plot_points([1, 4, 9, 16], 4, 3),
            plot_points([3, 1, 2], 7, 5),
            plot_points([5, 5], 2.5, 2),
        ],
    }
    print(json.dumps(out, indent=2))
