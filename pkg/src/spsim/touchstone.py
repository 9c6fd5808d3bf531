"""Touchstone v1.x reader and writer.

Frequencies are stored in Hz. Values are always converted to complex
real/imaginary form, whatever numeric format the file used.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

FREQ_UNITS = {"HZ": "Hz", "KHZ": "kHz", "MHZ": "MHz", "GHZ": "GHz"}
FREQ_SCALE = {"Hz": 0, "kHz": 3, "MHz": 6, "GHz": 9}  # power of ten
PARAMETERS = ("S", "Y", "Z", "G", "H")
FORMATS = ("RI", "MA", "DB")

_EXT_RE = re.compile(r"[._]s(\d+)p$", re.IGNORECASE)
_DB_FLOOR = -6000.0
# round-off slack before |s| > 1 counts as non-passive
PASSIVITY_EPS = 1e-9


class TouchstoneError(ValueError):
    """Raised for input that is not a valid Touchstone v1.x file."""


class TouchstoneWarning(UserWarning):
    pass


class PassivityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class OptionsLine:
    freq_unit: str = "GHz"
    parameter: str = "S"
    format: str = "MA"
    reference_impedance: float = 50.0

    def __post_init__(self):
        if self.freq_unit not in FREQ_SCALE:
            raise TouchstoneError(f"unknown frequency unit {self.freq_unit!r}")
        if self.parameter not in PARAMETERS:
            raise TouchstoneError(f"unknown parameter type {self.parameter!r}")
        if self.format not in FORMATS:
            raise TouchstoneError(f"unknown data format {self.format!r}")
        if not self.reference_impedance > 0:
            raise TouchstoneError(
                f"reference impedance must be positive, got {self.reference_impedance}"
            )

    @classmethod
    def parse(cls, line: str) -> "OptionsLine":
        """Parse a ``#`` options line. Keywords are case-insensitive and may
        appear in any order; omitted ones take the Touchstone defaults."""
        text = line.split("!", 1)[0].strip()
        if not text.startswith("#"):
            raise TouchstoneError(f"not an options line: {line!r}")
        tokens = text[1:].upper().split()
        kwargs = {}
        it = iter(tokens)
        for tok in it:
            if tok in FREQ_UNITS:
                kwargs["freq_unit"] = FREQ_UNITS[tok]
            elif tok in PARAMETERS:
                kwargs["parameter"] = tok
            elif tok in FORMATS:
                kwargs["format"] = tok
            elif tok == "R":
                value = next(it, None)
                if value is None:
                    raise TouchstoneError(f"malformed options line {line!r}: R without a value")
                try:
                    kwargs["reference_impedance"] = float(value)
                except ValueError:
                    raise TouchstoneError(
                        f"malformed options line {line!r}: bad reference impedance {value!r}"
                    ) from None
            else:
                raise TouchstoneError(f"malformed options line {line!r}: unknown token {tok!r}")
        return cls(**kwargs)

    def render(self) -> str:
        return f"# {self.freq_unit} {self.parameter} {self.format} R {_fmt(self.reference_impedance)}"


@dataclass(frozen=True, eq=False)
class NetworkData:
    """Network parameters of an N-port over K frequency points.

    ``frequencies`` has shape (K,) in Hz, ``matrices`` has shape (K, N, N).
    Both arrays are made read-only on construction.
    """

    n_ports: int
    frequencies: np.ndarray
    matrices: np.ndarray
    source_label: str = ""
    reference_impedance: float = 50.0
    parameter: str = "S"

    def __post_init__(self):
        freqs = np.array(self.frequencies, dtype=np.float64)
        mats = np.array(self.matrices, dtype=np.complex128)
        n = self.n_ports
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_ports must be a positive integer, got {n!r}")
        if freqs.ndim != 1 or freqs.size == 0:
            raise ValueError("frequencies must be a non-empty 1-D sequence")
        if mats.shape != (freqs.size, n, n):
            raise ValueError(
                f"matrices must have shape ({freqs.size}, {n}, {n}), got {mats.shape}"
            )
        if not np.all(np.isfinite(freqs)) or np.any(freqs <= 0):
            raise ValueError("frequencies must be finite and positive")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if not self.reference_impedance > 0:
            raise ValueError("reference impedance must be positive")
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown parameter type {self.parameter!r}")
        freqs.flags.writeable = False
        mats.flags.writeable = False
        object.__setattr__(self, "n_ports", int(n))
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "matrices", mats)
        if self.parameter == "S":
            peak = float(np.max(np.abs(mats)))
            if peak > 1.0 + PASSIVITY_EPS:
                warnings.warn(
                    f"{self.source_label or 'network'}: max |s_ij| = {peak:.6g} exceeds 1 "
                    "(non-passive data)",
                    PassivityWarning,
                    stacklevel=3,
                )

    @property
    def n_freqs(self) -> int:
        return self.frequencies.size

    def element(self, i: int, j: int) -> np.ndarray:
        """Sweep of element s_ij with 1-based port indices."""
        if not (1 <= i <= self.n_ports and 1 <= j <= self.n_ports):
            raise IndexError(f"element ({i}, {j}) out of range for {self.n_ports}-port data")
        return self.matrices[:, i - 1, j - 1]


def _fmt(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _format_freq(f_hz: float, unit: str) -> str:
    # Shifting the shortest repr in decimal is exact, so parsing it back
    # with a decimal multiply recovers the same double.
    d = Decimal(repr(float(f_hz))).scaleb(-FREQ_SCALE[unit]).normalize()
    return format(d, "f")


def _parse_freq(token: str, unit: str, lineno: int) -> float:
    try:
        d = Decimal(token)
    except InvalidOperation:
        raise TouchstoneError(f"line {lineno}: bad frequency value {token!r}") from None
    if not d.is_finite():
        raise TouchstoneError(f"line {lineno}: non-finite frequency {token!r}")
    return float(d.scaleb(FREQ_SCALE[unit]))


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.deg2rad(b))


def _from_complex(s: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return s.real, s.imag
    ang = np.rad2deg(np.angle(s))
    mag = np.abs(s)
    if fmt == "MA":
        return mag, ang
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    return np.maximum(db, _DB_FLOOR), ang


def _data_lines(text: str):
    """Yield (lineno, kind, payload) for every meaningful line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            yield lineno, "options", raw
        elif line.startswith("["):
            yield lineno, "keyword", line
        else:
            yield lineno, "data", line.split()


def _infer_ports(rows: list[tuple[int, list[str]]]) -> int:
    # A frequency block is a line with an odd token count followed by
    # continuation lines with even counts; its size is 1 + 2*N^2.
    first_lineno, first = rows[0]
    total = len(first)
    for _, tokens in rows[1:]:
        if len(tokens) % 2 == 1:
            break
        total += len(tokens)
    n = math.isqrt(max(total - 1, 0) // 2)
    if n < 1 or 1 + 2 * n * n != total:
        raise TouchstoneError(
            f"line {first_lineno}: cannot infer port count from a block of {total} values"
        )
    return n


def parse_touchstone(
    text: str | bytes,
    port_count_hint: int | None = None,
    *,
    source_label: str = "",
) -> NetworkData:
    """Parse Touchstone v1.x text into a :class:`NetworkData`.

    Parameters
    ----------
    text : str or bytes
        File contents. Bytes are decoded as UTF-8.
    port_count_hint : int, optional
        Port count N. When omitted it is inferred from the size of the first
        frequency block.
    source_label : str
        Stored on the result for reporting.

    Raises
    ------
    TouchstoneError
        On a malformed options line, a Touchstone v2 file, non-monotonic
        frequencies, a wrong number of values in a frequency block, or a
        file without data.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8-sig")
    if port_count_hint is not None and port_count_hint < 1:
        raise ValueError(f"port_count_hint must be positive, got {port_count_hint}")

    options = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, kind, payload in _data_lines(text):
        if kind == "options":
            if options is None:
                if rows:
                    raise TouchstoneError(f"line {lineno}: options line after data")
                options = OptionsLine.parse(payload)
            else:
                warnings.warn(
                    f"line {lineno}: extra options line ignored", TouchstoneWarning, stacklevel=2
                )
        elif kind == "keyword":
            m = re.match(r"\[version\]\s*(\S+)", payload, re.IGNORECASE)
            version = m.group(1) if m else "2.0"
            raise TouchstoneError(
                f"Touchstone version {version} is not supported (only v1.x); "
                f"found keyword line {payload!r} at line {lineno}"
            )
        else:
            rows.append((lineno, payload))
    if options is None:
        options = OptionsLine()
    if not rows:
        raise TouchstoneError("no data rows")

    n = port_count_hint if port_count_hint is not None else _infer_ports(rows)
    need = 1 + 2 * n * n
    unit = options.freq_unit

    freqs: list[float] = []
    values: list[list[str]] = []
    current: list[str] = []
    start_line = 0
    for lineno, tokens in rows:
        if not current:
            f = _parse_freq(tokens[0], unit, lineno)
            if freqs and f <= freqs[-1]:
                if n == 2 and len(tokens) == 5:
                    warnings.warn(
                        f"line {lineno}: noise parameter section ignored",
                        TouchstoneWarning,
                        stacklevel=2,
                    )
                    break
                raise TouchstoneError(
                    f"line {lineno}: frequency {tokens[0]} is not greater than the previous one"
                )
            freqs.append(f)
            start_line = lineno
            current = list(tokens[1:])
        else:
            current.extend(tokens)
        if len(current) > need - 1:
            raise TouchstoneError(
                f"line {lineno}: expected {need - 1} values for the {n}-port block "
                f"starting at line {start_line}, got {len(current)}"
            )
        if len(current) == need - 1:
            values.append(current)
            current = []
    if current:
        raise TouchstoneError(
            f"line {start_line}: expected {need - 1} values for the {n}-port block, "
            f"got {len(current)}"
        )

    try:
        raw = np.array(values, dtype=np.float64).reshape(len(values), n * n, 2)
    except ValueError as exc:
        raise TouchstoneError(f"bad numeric value: {exc}") from None
    flat = _to_complex(raw[..., 0], raw[..., 1], options.format)
    mats = flat.reshape(len(values), n, n)
    if n == 2:
        # 2-port lines are ordered S11 S21 S12 S22
        mats = mats.transpose(0, 2, 1)
    return NetworkData(
        n_ports=n,
        frequencies=np.array(freqs),
        matrices=mats,
        source_label=source_label,
        reference_impedance=options.reference_impedance,
        parameter=options.parameter,
    )


def write_touchstone(
    net: NetworkData,
    format: str = "RI",
    freq_unit: str = "GHz",
    *,
    comments: tuple[str, ...] = (),
) -> str:
    """Render ``net`` as Touchstone v1.1 text.

    Values carry 12 significant digits; frequencies are written so that they
    parse back to exactly the same value in Hz. N >= 3 rows are wrapped at
    four matrix entries per line.
    """
    fmt = format.upper()
    unit = FREQ_UNITS.get(freq_unit.upper(), freq_unit)
    options = OptionsLine(unit, net.parameter, fmt, net.reference_impedance)
    n = net.n_ports
    a, b = _from_complex(net.matrices, fmt)
    if n == 2:
        a = a.transpose(0, 2, 1)
        b = b.transpose(0, 2, 1)

    lines = [f"! {c}" for c in comments]
    lines.append(options.render())
    for k, f in enumerate(net.frequencies):
        pairs = [f"{_fmt(x)} {_fmt(y)}" for x, y in zip(a[k].ravel(), b[k].ravel())]
        head = _format_freq(f, unit)
        if n <= 2:
            lines.append(" ".join([head, *pairs]))
            continue
        for r in range(n):
            row = pairs[r * n:(r + 1) * n]
            for c in range(0, n, 4):
                chunk = " ".join(row[c:c + 4])
                lines.append(f"{head} {chunk}" if r == 0 and c == 0 else chunk)
    return "\n".join(lines) + "\n"


def ports_from_filename(path: str | Path) -> int | None:
    m = _EXT_RE.search(Path(path).name)
    return int(m.group(1)) if m else None


def read_touchstone(path: str | Path, port_count_hint: int | None = None) -> NetworkData:
    """Read a Touchstone file. The ``.sNp`` extension, when present, takes
    precedence over ``port_count_hint``."""
    path = Path(path)
    n = ports_from_filename(path) or port_count_hint
    return parse_touchstone(path.read_bytes(), n, source_label=path.stem)


def save_touchstone(
    net: NetworkData, path: str | Path, format: str = "RI", freq_unit: str = "GHz"
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    comments = (net.source_label,) if net.source_label else ()
    path.write_text(write_touchstone(net, format, freq_unit, comments=comments))
    return path
