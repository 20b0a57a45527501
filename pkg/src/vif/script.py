"""Parser, linter, and canonical serializer for .vif story markup.

A story is a line-oriented script: ``#ACTIVATE: <id>`` names the entry
section, ``*`` lines declare speakers (when they carry an ``@`` position
spec) or open sections, and the remaining non-blank lines are body text
with inline markup: ``/emphasis/``, ``bind:`` choice and biofeedback
tokens, and ``timer:`` / ``bind:<ms>`` / ``ex:`` transition directives.

Everything here is pure: parsing and serialization never mutate their
inputs, and all functions are safe to call concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

POSITION_TOKENS = ("north", "east", "south", "west", "front", "behind", "left", "right")
SIZE_TOKENS = ("small", "medium", "large")

#: Signals that always exist on the sensor side, whether or not a script
#: declares a detector for them.
BUILTIN_SIGNALS = frozenset({"breath", "heart", "breathVar", "stress"})

#: Predicate assumed by the short conditional form ``bind:<ms> goto:<id>``.
DEFAULT_PREDICATE = "stressed"

#: Name of the implicit speaker that owns sections appearing before any
#: declaration.
BUILTIN_NARRATOR = "narrator"

ACTIVATE_PREFIX = "#ACTIVATE:"

_ID_RE = re.compile(r"[a-z0-9_]+")
_INT_RE = re.compile(r"\d+")
_PREDICATE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


class ScriptError(ValueError):
    """Input violates the story grammar."""


class EmptyIdError(ScriptError):
    """A section id normalizes to the empty string."""


class MalformedDirectiveError(ScriptError):
    """A directive token has an unknown head or the wrong arity."""


class BadIntegerError(MalformedDirectiveError):
    """A timer/conditional delay is not a non-negative integer."""


class BadDetectorError(MalformedDirectiveError):
    """An ``ex:`` detector spec is missing its count, or the count is < 1."""


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    line: int  # 1-based line in the source
    message: str

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "line": self.line,
            "message": self.message,
        }


# Diagnostic catalogue. E0xx/W0xx come from lint_story, E01x/W01x from parsing.
E_DANGLING_TARGET = "E001"
W_UNREACHABLE = "W001"
W_EMPTY_LABEL = "W002"
W_UNKNOWN_SIGNAL = "W003"
W_SPEAKER_UNUSED = "W004"
E_NO_ENTRY = "E010"
E_BODY_OUTSIDE_SECTION = "E011"
E_DUPLICATE_SECTION = "E012"
E_DUPLICATE_SPEAKER = "E013"
E_MALFORMED_DIRECTIVE = "E014"
E_BAD_INTEGER = "E015"
E_BAD_DETECTOR = "E016"
E_EMPTY_ID = "E017"
E_BAD_SPEAKER = "E018"
W_UNTERMINATED_EMPHASIS = "W010"


@dataclass
class Speaker:
    name: str
    position: str  # one of POSITION_TOKENS
    style: str
    size: str  # one of SIZE_TOKENS
    builtin: bool = False
    line: int = field(default=0, compare=False)


@dataclass
class Span:
    """One contiguous run of rendered text with a single role."""

    kind: str  # "plain" | "emphasis" | "choice" | "biofeedback"
    text: str
    target: str = ""  # choice only: normalized section id
    signal: str = ""  # biofeedback only
    style: str = ""  # biofeedback only
    active: bool = False  # biofeedback only
    detector_var: str = ""  # active biofeedback only
    span_id: str = ""  # "s<ordinal>" in document order, assigned by parse_script
    line: int = field(default=0, compare=False)


@dataclass
class Paragraph:
    spans: list[Span]


@dataclass
class TimerGoto:
    delay_ms: int
    target: str
    line: int = field(default=0, compare=False)


@dataclass
class ConditionalGoto:
    delay_ms: int
    target: str
    predicate: str = DEFAULT_PREDICATE
    line: int = field(default=0, compare=False)


@dataclass
class SectionChoice:
    target: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DetectorSpec:
    signal: str
    count: int

    def __str__(self) -> str:
        return f"{self.signal}_{self.count}"


@dataclass
class Expect:
    detector: DetectorSpec
    source: str
    target: str
    line: int = field(default=0, compare=False)


Directive = TimerGoto | ConditionalGoto | SectionChoice | Expect
SectionItem = Directive | Paragraph


@dataclass
class Section:
    id: str  # normalized, matches [a-z0-9_]+
    display_name: str  # raw heading text
    speaker: str
    items: list[SectionItem] = field(default_factory=list)
    line: int = field(default=0, compare=False)

    def directives(self) -> list[Directive]:
        return [it for it in self.items if not isinstance(it, Paragraph)]

    def spans(self) -> list[Span]:
        out: list[Span] = []
        for it in self.items:
            if isinstance(it, Paragraph):
                out.extend(it.spans)
        return out


@dataclass
class Story:
    entry: str
    speakers: list[Speaker]
    sections: list[Section]
    source_name: str = field(default="<string>", compare=False)
    entry_line: int = field(default=0, compare=False)

    def section(self, section_id: str) -> Section:
        for sec in self.sections:
            if sec.id == section_id:
                return sec
        raise KeyError(section_id)

    def section_ids(self) -> list[str]:
        return [sec.id for sec in self.sections]

    def speaker(self, name: str) -> Speaker:
        for sp in self.speakers:
            if sp.name == name:
                return sp
        raise KeyError(name)

    def spans(self) -> list[Span]:
        out: list[Span] = []
        for sec in self.sections:
            out.extend(sec.spans())
        return out

    def find_span(self, span_id: str) -> tuple[Section, Span] | None:
        for sec in self.sections:
            for span in sec.spans():
                if span.span_id == span_id:
                    return sec, span
        return None

    def detector_bindings(self) -> dict[str, str]:
        """Map active-biofeedback variable names to the signal they watch."""
        bindings: dict[str, str] = {}
        for span in self.spans():
            if span.kind == "biofeedback" and span.active and span.detector_var:
                bindings[span.detector_var] = span.signal
        return bindings


def builtin_narrator() -> Speaker:
    return Speaker(
        name=BUILTIN_NARRATOR, position="front", style="default", size="medium", builtin=True
    )


def normalize_section_id(raw: str) -> str:
    """Lowercase, collapse whitespace runs to ``_``, drop anything else."""
    if not raw.strip():
        raise EmptyIdError("section id is empty")
    out = re.sub(r"\s+", "_", raw.strip().lower())
    out = re.sub(r"[^a-z0-9_]", "", out)
    if not out:
        raise EmptyIdError(f"section id {raw!r} normalizes to nothing")
    return out


def _parse_delay(text: str) -> int:
    if not _INT_RE.fullmatch(text):
        raise BadIntegerError(f"bad delay {text!r}: expected a non-negative integer")
    return int(text)


def _parse_detector(text: str) -> DetectorSpec:
    head, sep, count_text = text.rpartition("_")
    if not sep or not head:
        raise BadDetectorError(f"detector {text!r} has no _<count> suffix")
    if not _INT_RE.fullmatch(count_text):
        raise BadDetectorError(f"detector {text!r} has a non-numeric count")
    count = int(count_text)
    if count < 1:
        raise BadDetectorError(f"detector {text!r} has count < 1")
    return DetectorSpec(signal=head, count=count)


def parse_directive(raw: str) -> Directive | Span:
    """Parse one directive string into its Directive or inline Span form.

    Dispatch is by shape: ``timer:<ms> goto:<id>``, ``bind:<ms>[:<pred>]
    goto:<id>``, ``bind:goto:<id>`` (section choice), ``bind:goto:<id>:<label>``
    (choice span, label runs through the first ``.``), ``bind:<sig>:<style>:
    [ac:<var>:]<display>`` (biofeedback span), and ``ex:<sig>_<n>:<src>:<id>``.
    """
    text = raw.strip()
    if text.startswith("timer:"):
        tokens = text.split()
        if len(tokens) != 2 or not tokens[1].startswith("goto:"):
            raise MalformedDirectiveError(f"timer directive needs 'goto:': {raw!r}")
        delay = _parse_delay(tokens[0][len("timer:") :])
        target = normalize_section_id(tokens[1][len("goto:") :])
        return TimerGoto(delay_ms=delay, target=target)

    if text.startswith("ex:"):
        fields = text.split(":")
        if len(fields) != 4 or any(not f for f in fields):
            raise MalformedDirectiveError(f"expect directive needs 3 fields: {raw!r}")
        detector = _parse_detector(fields[1])
        return Expect(detector=detector, source=fields[2], target=normalize_section_id(fields[3]))

    if text.startswith("bind:goto:"):
        rest = text[len("bind:goto:") :]
        target_raw, sep, label = rest.partition(":")
        if not target_raw:
            raise MalformedDirectiveError(f"choice directive has no target: {raw!r}")
        target = normalize_section_id(target_raw)
        if not sep:
            if len(text.split()) != 1:
                raise MalformedDirectiveError(f"section choice takes no label: {raw!r}")
            return SectionChoice(target=target)
        dot = label.find(".")
        if dot >= 0 and label[dot + 1 :].strip():
            raise MalformedDirectiveError(f"text after choice label: {raw!r}")
        if dot >= 0:
            label = label[: dot + 1]
        return Span(kind="choice", text=label, target=target)

    if text.startswith("bind:"):
        rest = text[len("bind:") :]
        head = rest.split(":", 1)[0].split()[0] if rest.strip() else ""
        if _INT_RE.fullmatch(head) or not head:
            # conditional form: bind:<ms>[:<predicate>] goto:<id>
            tokens = text.split()
            if len(tokens) != 2 or not tokens[1].startswith("goto:"):
                raise MalformedDirectiveError(f"conditional directive needs 'goto:': {raw!r}")
            fields = tokens[0][len("bind:") :].split(":")
            if len(fields) == 1:
                predicate = DEFAULT_PREDICATE
            elif len(fields) == 2 and _PREDICATE_RE.fullmatch(fields[1] or ""):
                predicate = fields[1]
            else:
                raise MalformedDirectiveError(f"bad conditional predicate: {raw!r}")
            delay = _parse_delay(fields[0])
            target = normalize_section_id(tokens[1][len("goto:") :])
            return ConditionalGoto(delay_ms=delay, target=target, predicate=predicate)
        # biofeedback form, a single token
        if len(text.split()) != 1:
            raise MalformedDirectiveError(f"biofeedback directive contains whitespace: {raw!r}")
        fields = rest.split(":")
        if len(fields) == 3 and fields[0] and fields[1]:
            return Span(kind="biofeedback", text=fields[2], signal=fields[0], style=fields[1])
        if len(fields) == 5 and fields[2] == "ac" and fields[0] and fields[1] and fields[3]:
            return Span(
                kind="biofeedback",
                text=fields[4],
                signal=fields[0],
                style=fields[1],
                active=True,
                detector_var=fields[3],
            )
        raise MalformedDirectiveError(f"bad biofeedback directive: {raw!r}")

    raise MalformedDirectiveError(f"unknown directive head: {raw!r}")


# --- inline span extraction ---------------------------------------------

# A directive candidate starts a whitespace-separated token.
_DIRECTIVE_START_RE = re.compile(r"(?:(?<=\s)|^)(?:bind:|timer:|ex:)")
# Extents of single-token directive forms. Choice targets and expect targets
# stop at id characters so trailing sentence punctuation stays plain text.
_SECTION_CHOICE_RE = re.compile(r"bind:goto:[A-Za-z0-9_]+")
_CHOICE_HEAD_RE = re.compile(r"bind:goto:[A-Za-z0-9_]+:")
_EXPECT_RE = re.compile(r"ex:[^\s:]+:[^\s:]+:[A-Za-z0-9_]+")
_BIOFEEDBACK_RE = re.compile(r"bind:[^\s:]+:[^\s:]+:(?:ac:[^\s:]+:)?[^\s.,;:!?]*")
_TWO_TOKEN_RE = re.compile(r"(?:timer|bind):[^\s:]+(?::[^\s:]+)?\s+goto:[A-Za-z0-9_]+")


class _EmitDiagnostics:
    """Collects parse diagnostics; severity mapping for directive errors."""

    def __init__(self, sink: list[Diagnostic] | None):
        self.sink = sink if sink is not None else []

    def error(self, code: str, line: int, message: str) -> None:
        self.sink.append(Diagnostic("error", code, line, message))

    def warning(self, code: str, line: int, message: str) -> None:
        self.sink.append(Diagnostic("warning", code, line, message))

    def directive_error(self, err: MalformedDirectiveError, line: int) -> None:
        if isinstance(err, BadIntegerError):
            self.error(E_BAD_INTEGER, line, str(err))
        elif isinstance(err, BadDetectorError):
            self.error(E_BAD_DETECTOR, line, str(err))
        else:
            self.error(E_MALFORMED_DIRECTIVE, line, str(err))


def _directive_extent(line: str, start: int) -> int | None:
    """End index of the directive starting at ``start``, or None if malformed."""
    for pattern in (_TWO_TOKEN_RE, _CHOICE_HEAD_RE, _SECTION_CHOICE_RE, _EXPECT_RE):
        m = pattern.match(line, start)
        if m is None:
            continue
        if pattern is _CHOICE_HEAD_RE:
            # label runs through the first '.', or to end of line
            dot = line.find(".", m.end())
            return dot + 1 if dot >= 0 else len(line)
        return m.end()
    m = _BIOFEEDBACK_RE.match(line, start)
    if m is not None and not line.startswith("bind:goto:", start):
        return m.end()
    return None


def _split_emphasis(text: str, emit: _EmitDiagnostics, lineno: int) -> list[Span]:
    """Split a plain segment into plain/emphasis spans on ``/…/`` pairs."""
    spans: list[Span] = []
    pos = 0
    while True:
        open_idx = text.find("/", pos)
        if open_idx < 0:
            break
        close_idx = text.find("/", open_idx + 1)
        if close_idx < 0:
            emit.warning(
                W_UNTERMINATED_EMPHASIS, lineno, "unterminated /emphasis/; slash kept as text"
            )
            break
        if text[pos:open_idx]:
            spans.append(Span(kind="plain", text=text[pos:open_idx], line=lineno))
        spans.append(Span(kind="emphasis", text=text[open_idx + 1 : close_idx], line=lineno))
        pos = close_idx + 1
    if text[pos:]:
        spans.append(Span(kind="plain", text=text[pos:], line=lineno))
    return spans


def extract_spans(
    body_line: str,
    diagnostics: list[Diagnostic] | None = None,
    lineno: int = 0,
) -> tuple[list[Span], list[Directive]]:
    """Split one body line into spans plus any inline transition directives.

    Plain text is preserved verbatim (emphasis slashes removed). Directives
    that do not render as spans (timers, conditionals, section choices,
    expects) are returned separately so the caller can hoist them to
    section items.
    """
    emit = _EmitDiagnostics(diagnostics)
    line = body_line.strip()
    spans: list[Span] = []
    hoisted: list[Directive] = []
    plain_buf = ""
    pos = 0

    def flush_plain() -> None:
        nonlocal plain_buf
        if plain_buf:
            spans.extend(_split_emphasis(plain_buf, emit, lineno))
            plain_buf = ""

    while pos < len(line):
        m = _DIRECTIVE_START_RE.search(line, pos)
        if m is None:
            plain_buf += line[pos:]
            break
        plain_buf += line[pos : m.start()]
        end = _directive_extent(line, m.start())
        if end is None:
            end = len(line)
        try:
            parsed = parse_directive(line[m.start() : end])
        except MalformedDirectiveError as err:
            emit.directive_error(err, lineno)
            # keep the offending token as plain text and move on
            token_end = m.start()
            while token_end < len(line) and not line[token_end].isspace():
                token_end += 1
            plain_buf += line[m.start() : token_end]
            pos = token_end
            continue
        if isinstance(parsed, Span):
            flush_plain()
            parsed.line = lineno
            spans.append(parsed)
        else:
            parsed.line = lineno
            hoisted.append(parsed)
        pos = end
    flush_plain()
    return spans, hoisted


# --- whole-script parsing -------------------------------------------------

_FRAGMENT_RES = (
    re.compile(r"timer:\S+"),
    re.compile(r"bind:\d+(?::[A-Za-z_][A-Za-z0-9_.]*)?"),
    re.compile(r"goto:[A-Za-z0-9_]+"),
    re.compile(r"bind:goto:[A-Za-z0-9_]+"),
    re.compile(r"ex:[^\s:]+:[^\s:]+:[^\s:]+"),
)


def _is_directive_line(line: str) -> bool:
    tokens = line.split()
    return bool(tokens) and all(
        any(p.fullmatch(tok) for p in _FRAGMENT_RES) for tok in tokens
    )


def _parse_directive_line(
    line: str, lineno: int, emit: _EmitDiagnostics
) -> list[Directive]:
    """Parse a standalone directive line into one or more directives."""
    tokens = line.split()
    out: list[Directive] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith(("timer:", "bind:")) and not tok.startswith("bind:goto:"):
            group = tok if i + 1 >= len(tokens) else f"{tok} {tokens[i + 1]}"
            consumed = 2
        else:
            group = tok
            consumed = 1
        try:
            parsed = parse_directive(group)
        except MalformedDirectiveError as err:
            emit.directive_error(err, lineno)
            return []
        if isinstance(parsed, Span):
            # cannot happen for fragment-only lines; treat as malformed
            emit.error(E_MALFORMED_DIRECTIVE, lineno, f"unexpected span in directive line: {line!r}")
            return []
        parsed.line = lineno
        out.append(parsed)
        i += consumed
    return out


def _parse_speaker_line(head: str, lineno: int, emit: _EmitDiagnostics) -> Speaker | None:
    name, _, spec = head.partition("@")
    name = name.strip()
    fields = [f.strip() for f in spec.strip().split(":")]
    fields = [f for f in fields if f]  # canonical form carries a trailing ':'
    if not name or len(fields) != 3:
        emit.error(E_BAD_SPEAKER, lineno, f"bad speaker declaration: {head!r}")
        return None
    position, style, size = fields
    style = style.lstrip("#")
    size = size.lstrip("#")
    if position not in POSITION_TOKENS:
        emit.error(E_BAD_SPEAKER, lineno, f"unknown position {position!r}")
        return None
    if size not in SIZE_TOKENS:
        emit.error(E_BAD_SPEAKER, lineno, f"unknown size {size!r}")
        return None
    if not style:
        emit.error(E_BAD_SPEAKER, lineno, f"empty style in {head!r}")
        return None
    return Speaker(name=name, position=position, style=style, size=size, line=lineno)


def parse_script(source: str, source_name: str = "<string>") -> tuple[Story, list[Diagnostic]]:
    """Parse .vif markup into a Story plus non-fatal diagnostics.

    Parsing never raises on malformed input; problems are reported as
    error/warning diagnostics and the offending line is skipped.
    """
    diagnostics: list[Diagnostic] = []
    emit = _EmitDiagnostics(diagnostics)
    speakers: list[Speaker] = [builtin_narrator()]
    sections: list[Section] = []
    entry: str | None = None
    entry_line = 0
    current_speaker = speakers[0].name
    current_section: Section | None = None
    discard_section = False

    for lineno, raw_line in enumerate(source.splitlines(), 1):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(ACTIVATE_PREFIX):
                try:
                    entry = normalize_section_id(line[len(ACTIVATE_PREFIX) :])
                    entry_line = lineno
                except EmptyIdError:
                    emit.error(E_EMPTY_ID, lineno, "entry id is empty")
            continue
        if line.startswith("*"):
            head = line[1:].strip()
            if "@" in head:
                speaker = _parse_speaker_line(head, lineno, emit)
                if speaker is not None:
                    if any(sp.name == speaker.name for sp in speakers):
                        emit.error(E_DUPLICATE_SPEAKER, lineno, f"duplicate speaker {speaker.name!r}")
                    else:
                        speakers.append(speaker)
                        current_speaker = speaker.name
            else:
                try:
                    section_id = normalize_section_id(head)
                except EmptyIdError:
                    emit.error(E_EMPTY_ID, lineno, f"section heading {head!r} has no usable id")
                    current_section = None
                    continue
                section = Section(
                    id=section_id, display_name=head, speaker=current_speaker, line=lineno
                )
                if any(sec.id == section_id for sec in sections):
                    emit.error(E_DUPLICATE_SECTION, lineno, f"duplicate section {section_id!r}")
                    discard_section = True
                else:
                    sections.append(section)
                    discard_section = False
                current_section = section
            continue
        # body line
        if current_section is None:
            emit.error(E_BODY_OUTSIDE_SECTION, lineno, "body text before any section")
            continue
        if discard_section:
            continue
        if _is_directive_line(line):
            current_section.items.extend(_parse_directive_line(line, lineno, emit))
        else:
            spans, hoisted = extract_spans(line, diagnostics, lineno)
            if spans:
                current_section.items.append(Paragraph(spans))
            current_section.items.extend(hoisted)

    if entry is None:
        emit.error(E_NO_ENTRY, 1, f"missing '{ACTIVATE_PREFIX} <id>' line")
        entry = ""

    story = Story(
        entry=entry,
        speakers=speakers,
        sections=sections,
        source_name=source_name,
        entry_line=entry_line,
    )
    _assign_span_ids(story)
    return story, diagnostics


def _assign_span_ids(story: Story) -> None:
    ordinal = 0
    for span in story.spans():
        ordinal += 1
        span.span_id = f"s{ordinal}"


# --- lint ------------------------------------------------------------------


def _transition_targets(section: Section) -> list[tuple[str, int, str]]:
    """(target, line, what) for every outgoing edge of a section."""
    out: list[tuple[str, int, str]] = []
    for item in section.items:
        if isinstance(item, Paragraph):
            for span in item.spans:
                if span.kind == "choice":
                    out.append((span.target, span.line, "choice"))
        elif isinstance(item, (TimerGoto, ConditionalGoto, SectionChoice)):
            out.append((item.target, item.line, "goto"))
        elif isinstance(item, Expect):
            out.append((item.target, item.line, "expect"))
    return out


def lint_story(story: Story) -> list[Diagnostic]:
    """Static checks over a parsed story.

    E001 dangling target, W001 unreachable section, W002 empty choice
    label, W003 biofeedback signal nothing ever produces, W004 speaker
    without sections.
    """
    diagnostics: list[Diagnostic] = []
    emit = _EmitDiagnostics(diagnostics)
    ids = set(story.section_ids())

    if story.entry and story.entry not in ids:
        emit.error(E_DANGLING_TARGET, story.entry_line or 1, f"entry {story.entry!r} does not exist")

    edges: dict[str, set[str]] = {sec.id: set() for sec in story.sections}
    for sec in story.sections:
        for target, line, what in _transition_targets(sec):
            if target not in ids:
                emit.error(E_DANGLING_TARGET, line, f"{what} target {target!r} does not exist")
            else:
                edges[sec.id].add(target)

    # reachability over the directed target graph
    reachable: set[str] = set()
    frontier = [story.entry] if story.entry in ids else []
    while frontier:
        node = frontier.pop()
        if node in reachable:
            continue
        reachable.add(node)
        frontier.extend(edges[node] - reachable)
    for sec in story.sections:
        if sec.id not in reachable:
            emit.warning(W_UNREACHABLE, sec.line, f"section {sec.id!r} unreachable from entry")

    declared_signals = set(BUILTIN_SIGNALS)
    for sec in story.sections:
        for item in sec.items:
            if isinstance(item, Expect):
                declared_signals.add(item.detector.signal)
    for span in story.spans():
        if span.kind == "choice" and not span.text.strip():
            emit.warning(W_EMPTY_LABEL, span.line, f"choice span {span.span_id} has no label")
        if span.kind == "biofeedback" and span.signal not in declared_signals:
            emit.warning(
                W_UNKNOWN_SIGNAL, span.line, f"signal {span.signal!r} is never produced"
            )

    owners = {sec.speaker for sec in story.sections}
    for sp in story.speakers:
        if not sp.builtin and sp.name not in owners:
            emit.warning(W_SPEAKER_UNUSED, sp.line, f"speaker {sp.name!r} owns no sections")

    return diagnostics


def errors(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity == "error"]


# --- canonical serialization ----------------------------------------------


def _serialize_span(span: Span) -> str:
    if span.kind == "plain":
        return span.text
    if span.kind == "emphasis":
        return f"/{span.text}/"
    if span.kind == "choice":
        # the label keeps its terminal "." from parsing; emit it verbatim so
        # dot-less end-of-line labels survive the round trip
        return f"bind:goto:{span.target}:{span.text}"
    if span.kind == "biofeedback":
        if span.active:
            return f"bind:{span.signal}:{span.style}:ac:{span.detector_var}:{span.text}"
        return f"bind:{span.signal}:{span.style}:{span.text}"
    raise ScriptError(f"unknown span kind {span.kind!r}")


def _serialize_directive(item: Directive) -> str:
    if isinstance(item, TimerGoto):
        return f"timer:{item.delay_ms} goto:{item.target}"
    if isinstance(item, ConditionalGoto):
        if item.predicate == DEFAULT_PREDICATE:
            return f"bind:{item.delay_ms} goto:{item.target}"
        return f"bind:{item.delay_ms}:{item.predicate} goto:{item.target}"
    if isinstance(item, SectionChoice):
        return f"bind:goto:{item.target}"
    if isinstance(item, Expect):
        return f"ex:{item.detector}:{item.source}:{item.target}"
    raise ScriptError(f"unknown directive {item!r}")


def serialize_story(story: Story) -> str:
    """Emit canonical markup; ``parse_script(serialize_story(s))`` == ``s``."""
    lines = [f"{ACTIVATE_PREFIX} {story.entry}"]
    emitted_sections: set[str] = set()

    def emit_section(sec: Section) -> None:
        lines.append(f"* {sec.display_name}")
        for item in sec.items:
            if isinstance(item, Paragraph):
                lines.append("".join(_serialize_span(s) for s in item.spans))
            else:
                lines.append(_serialize_directive(item))
        emitted_sections.add(sec.id)

    # sections owned by the builtin narrator come before any declaration
    for sec in story.sections:
        if sec.speaker == BUILTIN_NARRATOR:
            emit_section(sec)
        else:
            break
    for sp in story.speakers:
        if sp.builtin:
            continue
        lines.append(f"* {sp.name} @{sp.position}:#{sp.style}:#{sp.size}:")
        for sec in story.sections:
            if sec.speaker == sp.name and sec.id not in emitted_sections:
                emit_section(sec)
    missing = [sec.id for sec in story.sections if sec.id not in emitted_sections]
    if missing:
        raise ScriptError(f"sections owned by undeclared speakers: {missing}")
    return "\n".join(lines) + "\n"
