"""Walk through parsing and linting a .vif story.

Run: python3 demos/parse_and_lint.py
"""

from pathlib import Path

from vif import lint_story, parse_script, serialize_story

CORPUS = Path(__file__).parent.parent / "corpus"

source = (CORPUS / "figure7.vif").read_text(encoding="utf-8")
story, diagnostics = parse_script(source, "figure7.vif")

print(f"entry section: {story.entry}")
print(f"speakers ({len(story.speakers)}):")
for sp in story.speakers:
    origin = "builtin" if sp.builtin else f"@{sp.position}"
    print(f"  {sp.name:<10} {origin:<8} style=#{sp.style} size=#{sp.size}")

print(f"\nsections ({len(story.sections)}):")
for sec in story.sections:
    kinds = [type(item).__name__ for item in sec.items]
    print(f"  {sec.id:<12} owner={sec.speaker:<9} items={kinds}")

print("\nspans of 'stress':")
for span in story.section("stress").spans():
    extra = f" -> {span.target}" if span.kind == "choice" else ""
    print(f"  {span.span_id:<4} {span.kind:<12} {span.text!r}{extra}")

print(f"\nlint: {lint_story(story) or 'clean'}")

# break a target on purpose: the linter pins the dangling goto to its line
broken, _ = parse_script(source.replace("goto:bob_awaits", "goto:bob_waits"))
for diag in lint_story(broken):
    print(f"broken copy -> {diag.severity} {diag.code} line {diag.line}: {diag.message}")

# canonical form round-trips
canonical = serialize_story(story)
reparsed, _ = parse_script(canonical)
print(f"\nround trip equal: {reparsed == story}")
print("canonical head:")
print("\n".join(canonical.splitlines()[:6]))
