"""Phone inventories and cross-language phone mappings.

Inventory files are UTF-8 tab-separated, one phone per line:

    label<TAB>kind[<TAB>voicing]

kind is one of vowel, consonant, silence; voicing is voiced or unvoiced
and defaults to voiced for vowels and unvoiced otherwise. Every
inventory must contain exactly one silence phone and it must be named
"sil". Mapping files have one `language<TAB>phone<TAB>shared` line per
entry.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import InventoryError

SILENCE_LABEL = "sil"

_KINDS = ("vowel", "consonant", "silence")
_VOICINGS = ("voiced", "unvoiced")


@dataclass(frozen=True)
class Phone:
    """One phone symbol. Equality and hashing use the label only; the
    class flags are inventory metadata, not identity."""

    label: str
    is_vowel: bool = field(default=False, compare=False)
    is_silence: bool = field(default=False, compare=False)
    is_voiced: bool = field(default=False, compare=False)


def _make_phone(label: str, kind: str, voicing: str | None) -> Phone:
    if voicing is None:
        voicing = "voiced" if kind == "vowel" else "unvoiced"
    return Phone(
        label,
        is_vowel=(kind == "vowel"),
        is_silence=(kind == "silence"),
        is_voiced=(voicing == "voiced"),
    )


class PhoneInventory:
    """The phone set of one language, keyed by label."""

    def __init__(self, phones):
        self._phones: dict[str, Phone] = {}
        for p in phones:
            if p.label in self._phones:
                raise InventoryError("duplicate phone %r in inventory" % p.label)
            self._phones[p.label] = p
        silences = [p for p in self._phones.values() if p.is_silence]
        if len(silences) != 1 or silences[0].label != SILENCE_LABEL:
            raise InventoryError(
                "inventory must contain exactly one silence phone named %r"
                % SILENCE_LABEL
            )

    def __contains__(self, label: str) -> bool:
        return label in self._phones

    def __iter__(self):
        return iter(self._phones.values())

    def __len__(self) -> int:
        return len(self._phones)

    def get(self, label: str) -> Phone:
        try:
            return self._phones[label]
        except KeyError:
            raise InventoryError("phone %r is not in the inventory" % label) from None

    @property
    def silence(self) -> Phone:
        return self._phones[SILENCE_LABEL]

    def labels(self) -> list[str]:
        return list(self._phones)


def load_inventory(path: str | os.PathLike) -> PhoneInventory:
    """Read a tab-separated inventory file."""
    path = os.fspath(path)
    phones = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) not in (2, 3):
                    raise InventoryError(
                        "%s:%d: expected label<TAB>kind[<TAB>voicing]" % (path, lineno)
                    )
                label, kind = parts[0].strip(), parts[1].strip()
                voicing = parts[2].strip() if len(parts) == 3 else None
                if kind not in _KINDS:
                    raise InventoryError(
                        "%s:%d: unknown kind %r" % (path, lineno, kind)
                    )
                if voicing is not None and voicing not in _VOICINGS:
                    raise InventoryError(
                        "%s:%d: unknown voicing %r" % (path, lineno, voicing)
                    )
                phones.append(_make_phone(label, kind, voicing))
    except OSError as e:
        raise InventoryError("%s: unreadable (%s)" % (path, e)) from None
    return PhoneInventory(phones)


def save_inventory(inventory: PhoneInventory, path: str | os.PathLike) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        for p in inventory:
            kind = "vowel" if p.is_vowel else ("silence" if p.is_silence else "consonant")
            voicing = "voiced" if p.is_voiced else "unvoiced"
            fh.write("%s\t%s\t%s\n" % (p.label, kind, voicing))


@dataclass
class PhoneMapping:
    """Map (language, phone label) pairs onto a shared label space."""

    table: dict[tuple[str, str], str]

    def languages(self) -> list[str]:
        return sorted({lang for lang, _ in self.table})

    def lookup(self, language: str, label: str) -> str:
        try:
            return self.table[(language, label)]
        except KeyError:
            raise InventoryError(
                "no mapping for phone %r in language %r" % (label, language)
            ) from None

    def to_dict(self) -> dict:
        out: dict[str, dict[str, str]] = {}
        for (lang, label), shared in sorted(self.table.items()):
            out.setdefault(lang, {})[label] = shared
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PhoneMapping":
        table = {}
        for lang, entries in d.items():
            for label, shared in entries.items():
                table[(lang, label)] = shared
        return cls(table)


def load_mapping(path: str | os.PathLike) -> PhoneMapping:
    """Read a tab-separated language/phone/shared mapping file."""
    path = os.fspath(path)
    table: dict[tuple[str, str], str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = [p.strip() for p in line.split("\t")]
                if len(parts) != 3:
                    raise InventoryError(
                        "%s:%d: expected language<TAB>phone<TAB>shared" % (path, lineno)
                    )
                key = (parts[0], parts[1])
                if key in table:
                    raise InventoryError(
                        "%s:%d: duplicate mapping for %s/%s" % (path, lineno, *key)
                    )
                table[key] = parts[2]
    except OSError as e:
        raise InventoryError("%s: unreadable (%s)" % (path, e)) from None
    return PhoneMapping(table)


def save_mapping(mapping: PhoneMapping, path: str | os.PathLike) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        for (lang, label), shared in sorted(mapping.table.items()):
            fh.write("%s\t%s\t%s\n" % (lang, label, shared))


def map_phones(mapping: PhoneMapping, language: str, labels) -> list[str]:
    """Map a phone label sequence into the shared label space.

    Unmapped phones raise an error naming the phone and language.
    """
    return [mapping.lookup(language, label) for label in labels]
