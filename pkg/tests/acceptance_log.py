"""Collects per-item acceptance outcomes so the session can print one line per criterion."""

from collections import defaultdict

TITLES = {
    1: "catalogued probabilities by Monte Carlo",
    2: "separability functions pointwise",
    3: "quadrature identities",
    4: "conjectured HS probabilities",
    5: "ansatz fits",
    6: "minor-relaxation bounds",
    7: "property suite",
}

ITEMS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)
INFO: list[str] = []


def record(criterion: int, label: str, ok: bool, detail: str = "") -> None:
    ITEMS[criterion].append((label, bool(ok), detail))


def summary_lines() -> list[str]:
    lines = []
    for k in sorted(ITEMS):
        items = ITEMS[k]
        good = sum(ok for _, ok, _ in items)
        verdict = "PASS" if good == len(items) else "FAIL"
        line = f"criterion {k} ({TITLES[k]}): {verdict}  {good}/{len(items)}"
        bad = [label for label, ok, _ in items if not ok]
        if bad:
            line += "  failing: " + "; ".join(bad)
        lines.append(line)
    return lines
