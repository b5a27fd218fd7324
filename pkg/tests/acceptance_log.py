"""Pass/fail lines of the acceptance criteria, echoed in the terminal summary."""

LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    LINES.append(line)
    print(line)
    return line
