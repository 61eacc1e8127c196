"""Plain-text file formats (networks, schedules, trajectories) and report
rendering.

Values are written with 17 significant digits so that write -> parse is an
exact round trip for doubles. Lines starting with '#' and blank lines are
ignored everywhere. Indices are 0-based in code and 1-based in rendered
reports.
"""

import os
from dataclasses import dataclass

import numpy as np

from .core import FJModel, InfluenceMatrix, SusceptibilityProfile
from .dynamics import OpinionTrajectory, TVSchedule
from .errors import FJNetError, ParseError, WriteError
from .graphs import INFINITE
from .stability import StabilityReport, TVCertificate, Verdict


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_vec(values) -> str:
    return " ".join(_fmt(v) for v in values)


@dataclass(frozen=True)
class NetworkFile:
    """Parsed network file: a stationary model plus optional agent labels."""

    model: FJModel
    labels: tuple | None = None


@dataclass(frozen=True)
class ScheduleFile:
    """Parsed schedule file: a time-varying schedule plus the prejudice vector."""

    schedule: TVSchedule
    prejudice: np.ndarray


class _Reader:
    def __init__(self, text: str, origin: str):
        self.origin = origin
        self.lines = text.splitlines()
        self.pos = 0

    def fail(self, message: str, line: int | None = None):
        raise ParseError(message, self.origin, line)

    def next(self):
        """Next meaningful (lineno, stripped text) or None at end of input."""
        while self.pos < len(self.lines):
            self.pos += 1
            text = self.lines[self.pos - 1].strip()
            if text and not text.startswith("#"):
                return self.pos, text
        return None

    def peek(self):
        saved = self.pos
        item = self.next()
        self.pos = saved
        return item

    def expect(self, what: str):
        item = self.next()
        if item is None:
            self.fail(f"unexpected end of input, expected {what}")
        return item

    def keyword(self, word: str):
        lineno, text = self.expect(f"'{word}'")
        if text.split()[0] != word:
            self.fail(f"expected '{word}', got {text.split()[0]!r}", lineno)
        return lineno, text

    def floats(self, count: int, what: str):
        lineno, text = self.expect(f"{count} values for {what}")
        tokens = text.split()
        if len(tokens) != count:
            self.fail(f"{what}: expected {count} values, got {len(tokens)}", lineno)
        try:
            return lineno, [float(t) for t in tokens]
        except ValueError:
            self.fail(f"{what}: not a number in {text!r}", lineno)


def _read_n(reader: _Reader) -> int:
    lineno, text = reader.keyword("n")
    tokens = text.split()
    if len(tokens) != 2:
        reader.fail("expected 'n <count>'", lineno)
    try:
        n = int(tokens[1])
    except ValueError:
        reader.fail(f"agent count is not an integer: {tokens[1]!r}", lineno)
    if n < 1:
        reader.fail(f"agent count must be positive, got {n}", lineno)
    return n


def _read_matrix(reader: _Reader, n: int) -> list:
    lineno, _ = reader.keyword("W")
    rows = []
    for i in range(n):
        _, row = reader.floats(n, f"W row {i + 1}")
        rows.append(row)
    return rows


def _read_vector(reader: _Reader, keyword: str, n: int) -> list:
    reader.keyword(keyword)
    _, values = reader.floats(n, keyword)
    return values


def _read_block(reader: _Reader, n: int, row_tol: float, base_dir: str):
    """One schedule block: either 'file <path>' or inline 'lambda' + 'W'."""
    item = reader.peek()
    if item is None:
        reader.fail("unexpected end of input inside a schedule block")
    lineno, text = item
    head = text.split()[0]
    if head == "file":
        reader.next()
        path = text[len("file") :].strip()
        if not path:
            reader.fail("'file' needs a path", lineno)
        resolved = os.path.join(base_dir, path)
        try:
            network = parse_network(resolved, row_tol=row_tol)
        except OSError as exc:
            reader.fail(f"cannot read referenced network {path!r}: {exc}", lineno)
        if network.model.n != n:
            reader.fail(
                f"referenced network {path!r} has n={network.model.n}, expected {n}", lineno
            )
        return network.model.profile, network.model.influence
    values = _read_vector(reader, "lambda", n)
    rows = _read_matrix(reader, n)
    try:
        return SusceptibilityProfile(values), InfluenceMatrix(rows, tol=row_tol)
    except FJNetError as exc:
        reader.fail(f"invalid schedule block: {exc}", lineno)


def parse_network_text(text: str, origin: str = "<string>", row_tol: float = 1e-9) -> NetworkFile:
    """Parse a network file: sections n, W, lambda, u, optional labels."""
    reader = _Reader(text, origin)
    n = _read_n(reader)
    rows = _read_matrix(reader, n)
    lam = _read_vector(reader, "lambda", n)
    u = _read_vector(reader, "u", n)
    labels = None
    item = reader.peek()
    if item is not None and item[1].split()[0] == "labels":
        reader.keyword("labels")
        lineno, text_line = reader.expect("label names")
        tokens = text_line.split()
        if len(tokens) != n:
            reader.fail(f"labels: expected {n} names, got {len(tokens)}", lineno)
        labels = tuple(tokens)
    extra = reader.peek()
    if extra is not None:
        reader.fail(f"unexpected content {extra[1]!r}", extra[0])
    try:
        model = FJModel(InfluenceMatrix(rows, tol=row_tol), SusceptibilityProfile(lam), u)
    except FJNetError as exc:
        reader.fail(f"invalid network: {exc}")
    return NetworkFile(model=model, labels=labels)


def parse_network(path, row_tol: float = 1e-9) -> NetworkFile:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return parse_network_text(text, origin=str(path), row_tol=row_tol)


def format_network(network) -> str:
    """Render a NetworkFile (or bare FJModel) in the network file format."""
    if isinstance(network, FJModel):
        network = NetworkFile(model=network)
    model = network.model
    lines = [f"n {model.n}", "W"]
    lines.extend(_fmt_vec(row) for row in model.influence.entries)
    lines.append("lambda")
    lines.append(_fmt_vec(model.profile.values))
    lines.append("u")
    lines.append(_fmt_vec(model.prejudice))
    if network.labels:
        lines.append("labels")
        lines.append(" ".join(network.labels))
    return "\n".join(lines) + "\n"


def parse_schedule_text(
    text: str, origin: str = "<string>", row_tol: float = 1e-9, base_dir: str = "."
) -> ScheduleFile:
    """Parse a schedule file: n, u, then counted prefix and period blocks.

    Blocks are inline (lambda + W sections) or 'file <path>' references to
    network files, resolved relative to the schedule file; a referenced
    file contributes its lambda and W, while its own u is ignored.
    """
    reader = _Reader(text, origin)
    n = _read_n(reader)
    u = _read_vector(reader, "u", n)

    def read_section(name):
        lineno, text_line = reader.keyword(name)
        tokens = text_line.split()
        if len(tokens) != 2:
            reader.fail(f"expected '{name} <count>'", lineno)
        try:
            count = int(tokens[1])
        except ValueError:
            reader.fail(f"{name} count is not an integer: {tokens[1]!r}", lineno)
        if count < 0:
            reader.fail(f"{name} count must be nonnegative, got {count}", lineno)
        return [_read_block(reader, n, row_tol, base_dir) for _ in range(count)]

    prefix = read_section("prefix")
    period = read_section("period")
    extra = reader.peek()
    if extra is not None:
        reader.fail(f"unexpected content {extra[1]!r}", extra[0])
    try:
        schedule = TVSchedule(prefix=prefix, period=period)
    except FJNetError as exc:
        reader.fail(f"invalid schedule: {exc}")
    return ScheduleFile(schedule=schedule, prejudice=np.asarray(u, dtype=float))


def parse_schedule(path, row_tol: float = 1e-9) -> ScheduleFile:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    base_dir = os.path.dirname(os.path.abspath(path))
    return parse_schedule_text(text, origin=str(path), row_tol=row_tol, base_dir=base_dir)


def format_schedule(schedule_file: ScheduleFile) -> str:
    """Render a ScheduleFile with all blocks inline."""
    schedule = schedule_file.schedule
    lines = [f"n {schedule.n}", "u", _fmt_vec(schedule_file.prejudice)]

    def emit(name, pairs):
        lines.append(f"{name} {len(pairs)}")
        for profile, influence in pairs:
            lines.append("lambda")
            lines.append(_fmt_vec(profile.values))
            lines.append("W")
            lines.extend(_fmt_vec(row) for row in influence.entries)

    emit("prefix", schedule.prefix)
    emit("period", schedule.period)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TrajectoryFile:
    """Parsed trajectory file."""

    n: int
    steps_run: int
    converged: bool
    limit: np.ndarray | None
    detected_period: int | None
    steps: np.ndarray
    states: np.ndarray


def format_trajectory(trajectory: OpinionTrajectory, n: int) -> str:
    """Columnar trajectory text: header comments, then 'k x_1 ... x_n' rows."""
    lines = [
        f"# n {n}",
        f"# steps {trajectory.steps_run}",
        f"# recorded {trajectory.states.shape[0]}",
        f"# converged {'true' if trajectory.converged else 'false'}",
    ]
    if trajectory.limit is not None:
        lines.append(f"# limit {_fmt_vec(trajectory.limit)}")
    if trajectory.detected_period is not None:
        lines.append(f"# detected-period {trajectory.detected_period}")
    lines.append("# columns k " + " ".join(f"x_{i + 1}" for i in range(n)))
    for k, state in zip(trajectory.steps, trajectory.states):
        lines.append(f"{int(k)} " + _fmt_vec(state))
    return "\n".join(lines) + "\n"


def parse_trajectory_text(text: str, origin: str = "<string>") -> TrajectoryFile:
    header = {}
    steps = []
    states = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if tokens and tokens[0] in {"n", "steps", "converged", "limit", "detected-period"}:
                header[tokens[0]] = tokens[1:]
            continue
        tokens = line.split()
        try:
            steps.append(int(tokens[0]))
            states.append([float(t) for t in tokens[1:]])
        except ValueError:
            raise ParseError(f"bad trajectory row {line!r}", origin, lineno) from None
    if "n" not in header:
        raise ParseError("missing '# n' header", origin)
    n = int(header["n"][0])
    if any(len(row) != n for row in states):
        raise ParseError("trajectory row width disagrees with header n", origin)
    limit = None
    if "limit" in header:
        limit = np.array([float(t) for t in header["limit"]])
    period = int(header["detected-period"][0]) if "detected-period" in header else None
    return TrajectoryFile(
        n=n,
        steps_run=int(header.get("steps", [len(steps) - 1])[0]),
        converged=header.get("converged", ["false"])[0] == "true",
        limit=limit,
        detected_period=period,
        steps=np.array(steps, dtype=int),
        states=np.array(states),
    )


def write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def _fmt_distance(d: float) -> str:
    return "INF" if d == INFINITE else str(int(d))


def render_stability_report(report: StabilityReport, labels=None) -> str:
    """Key-value rendering of a StabilityReport; agent indices are 1-based."""
    stable = report.schur_stable
    lines = [
        f"verdict: {'Schur stable' if stable else 'not Schur stable'}",
        f"schur_stable: {'true' if stable else 'false'}",
        f"rho: {_fmt(report.rho)}",
    ]
    if report.bound_params is not None:
        p = report.bound_params
        lines.append(f"class_delta: {_fmt(p.delta)}")
        lines.append(f"class_eps: {_fmt(p.eps)}")
        lines.append(f"class_s: {p.s}")
        lines.append(f"rho_star: {_fmt(report.rho_star)}")
    witness = " ".join(_fmt_distance(d) for d in report.criterion_witness)
    lines.append(f"witness_distances: {witness}")
    if labels:
        lines.append("labels: " + " ".join(labels))
    return "\n".join(lines) + "\n"


def _fmt_index_set(indices, n) -> str:
    inside = ",".join(str(i + 1) for i in sorted(indices))
    return "{" + inside + "}"


def render_certificate(certificate: TVCertificate, n: int | None = None) -> str:
    """Key-value rendering of a TVCertificate; agent indices are 1-based."""
    lines = [
        f"kind: {certificate.kind.value}",
        f"verdict: {certificate.verdict.value}",
    ]
    for key, value in certificate.params.items():
        lines.append(f"{key}: {_fmt(value) if isinstance(value, float) else value}")
    details = certificate.details
    if "window_start" in details:
        lines.append(f"window_start: {details['window_start']}")
    if "windows_checked" in details:
        lines.append(f"windows_checked: {details['windows_checked']}")
    if "first_failing_window" in details:
        lines.append(f"first_failing_window: {details['first_failing_window']}")
    if "j_sets" in details:
        rendered = " -> ".join(_fmt_index_set(js, n) for js in details["j_sets"])
        lines.append(f"j_sets: {rendered}")
    if "reason" in details:
        lines.append(f"reason: {details['reason']}")
        if "step" in details:
            lines.append(f"step: {details['step']}")
        if "entry" in details:
            i, j = details["entry"]
            lines.append(f"entry: ({i + 1}, {j + 1})")
            lines.append(f"value: {_fmt(details['value'])}")
        if "disconnected" in details:
            nodes = " ".join(str(i + 1) for i in details["disconnected"])
            lines.append(f"disconnected_nodes: {nodes}")
    if certificate.verdict is Verdict.UNKNOWN:
        lines.append("note: condition is sufficient only; UNKNOWN is not a finding of instability")
    return "\n".join(lines) + "\n"
