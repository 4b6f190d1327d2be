"""Records of which checks passed, at which level, with failing witnesses."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TorsorExtError

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True)
class CertificateEntry:
    name: str
    level: str
    status: str
    witness: str | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def raise_for_status(self, exc: type[TorsorExtError]):
        if self.status == FAIL:
            raise exc(f"{self.name} failed: {self.detail} (witness: {self.witness})")
        return self

    def line(self) -> str:
        s = f"{self.name} [{self.level}] {self.status}"
        if self.witness:
            s += f" witness: {self.witness}"
        if self.detail:
            s += f" ({self.detail})"
        return s


@dataclass(frozen=True)
class Certificate:
    entries: tuple = ()
    label: str = ""

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, name) -> CertificateEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def passed(self, names=None) -> bool:
        chosen = [e for e in self.entries if names is None or e.name in names]
        return bool(chosen) and all(e.status in (PASS, SKIPPED) if names is None else e.passed
                                    for e in chosen)

    def failures(self) -> list[CertificateEntry]:
        return [e for e in self.entries if e.status == FAIL]

    def with_label(self, label: str) -> "Certificate":
        return Certificate(self.entries, label)

    def lines(self) -> list[str]:
        return [e.line() for e in self.entries]


def entry(name, level, failures, detail_ok="") -> CertificateEntry:
    """Build an entry from a list of (witness, detail) failures."""
    if failures:
        witness, detail = failures[0]
        return CertificateEntry(name, level, FAIL, witness, detail)
    return CertificateEntry(name, level, PASS, None, detail_ok)
