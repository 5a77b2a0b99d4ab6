"""JSON-Lines store for computed spectra.

One record per sentence, append-only.  A new spectrum is checked against
every stored unique record: it is a duplicate when the two prefixes agree
on their common length (at least five terms), and product-redundant when
it factors termwise into two stored unique spectra.  Terms are serialized
as decimal strings since they routinely exceed every fixed-width integer.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

MIN_OVERLAP = 5


@dataclass
class Record:
    id: int
    sentence: str
    spectrum: tuple[int, ...]
    truncated: bool
    status: str
    duplicate_of: int | None = None
    product_of: tuple[int, int] | None = None
    layer: int | None = None
    profile: str | None = None
    oeis: str | None = None

    def to_json(self) -> str:
        doc = {
            "id": self.id,
            "sentence": self.sentence,
            "spectrum": [str(t) for t in self.spectrum],
            "truncated": self.truncated,
            "status": self.status,
        }
        if self.duplicate_of is not None:
            doc["duplicate_of"] = self.duplicate_of
        if self.product_of is not None:
            doc["product_of"] = list(self.product_of)
        if self.layer is not None:
            doc["layer"] = self.layer
        if self.profile is not None:
            doc["profile"] = self.profile
        if self.oeis is not None:
            doc["oeis"] = self.oeis
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "Record":
        doc = json.loads(line)
        product = doc.get("product_of")
        return cls(
            id=doc["id"],
            sentence=doc["sentence"],
            spectrum=tuple(int(t) for t in doc["spectrum"]),
            truncated=doc.get("truncated", False),
            status=doc["status"],
            duplicate_of=doc.get("duplicate_of"),
            product_of=tuple(product) if product else None,
            layer=doc.get("layer"),
            profile=doc.get("profile"),
            oeis=doc.get("oeis"),
        )


def _common_prefix_match(a: Sequence[int], b: Sequence[int]) -> bool:
    k = min(len(a), len(b))
    return k >= MIN_OVERLAP and tuple(a[:k]) == tuple(b[:k])


class SpectrumDB:
    """Append-only spectrum database backed by one JSONL file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[Record] = []
        self._by_sentence: dict[str, Record] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = Record.from_json(line)
                    self._records.append(rec)
                    self._by_sentence[rec.sentence] = rec

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> list[Record]:
        return list(self._records)

    def unique_records(self) -> list[Record]:
        return [r for r in self._records if r.status == "unique"]

    def get(self, sentence: str) -> Record | None:
        return self._by_sentence.get(sentence)

    def _find_duplicate(self, spectrum: Sequence[int]) -> Record | None:
        for rec in self._records:
            if rec.status == "unique" and _common_prefix_match(
                spectrum, rec.spectrum
            ):
                return rec
        return None

    def _find_product(
        self,
        spectrum: Sequence[int],
        pool: list[Record] | None = None,
        exclude_id: int | None = None,
    ) -> tuple[int, int] | None:
        """A pair of stored spectra whose termwise product matches.

        Dividing the query by a candidate factor determines the cofactor
        head except at positions where both are zero, so mates are found by
        hash lookup on the masked head and verified over the whole overlap.
        Lookups are capped so an insert never degenerates to a quadratic
        pass.  The all-ones factor is skipped (it would pair every spectrum
        with itself times nothing).
        """
        if len(spectrum) < MIN_OVERLAP:
            return None
        carriers = pool if pool is not None else self.unique_records()
        if exclude_id is not None:
            carriers = [rec for rec in carriers if rec.id != exclude_id]

        def verified(factor: Record, mate: Record) -> bool:
            triples = list(zip(factor.spectrum, mate.spectrum, spectrum))
            if len(triples) < MIN_OVERLAP:
                return False
            if all(f == 1 for f, _, _ in triples):
                return False
            if all(c == 1 for _, c, _ in triples):
                return False
            return all(f * c == s for f, c, s in triples)

        indexes: dict[frozenset[int], dict[tuple, list[Record]]] = {}

        def index_for(mask: frozenset[int]) -> dict[tuple, list[Record]]:
            got = indexes.get(mask)
            if got is None:
                got = {}
                for mate in carriers:
                    if len(mate.spectrum) < MIN_OVERLAP:
                        continue
                    key = tuple(
                        None if i in mask else mate.spectrum[i]
                        for i in range(MIN_OVERLAP)
                    )
                    got.setdefault(key, []).append(mate)
                indexes[mask] = got
            return got

        budget = 20000
        for rec in carriers:
            over = min(len(rec.spectrum), len(spectrum))
            if over < MIN_OVERLAP:
                continue
            factor = rec.spectrum[:over]
            if any(s % f if f else s for f, s in zip(factor, spectrum)):
                continue
            mask = frozenset(
                i for i in range(MIN_OVERLAP) if factor[i] == 0
            )
            key = tuple(
                None if i in mask else spectrum[i] // factor[i]
                for i in range(MIN_OVERLAP)
            )
            for mate in index_for(mask).get(key, ()):
                budget -= 1
                if budget < 0:
                    return None
                if verified(rec, mate):
                    return (rec.id, mate.id)
        return None

    def insert(
        self,
        sentence: str,
        spectrum: Sequence[int],
        truncated: bool = False,
        layer: int | None = None,
        profile: str | None = None,
        oeis: str | None = None,
    ) -> Record:
        """Classify and append; re-inserting a sentence returns its record."""
        with self._lock:
            existing = self._by_sentence.get(sentence)
            if existing is not None:
                return existing
            spectrum = tuple(int(t) for t in spectrum)
            status, dup_of, prod_of = "unique", None, None
            dup = self._find_duplicate(spectrum)
            if dup is not None:
                status, dup_of = "duplicate", dup.id
            else:
                prod = self._find_product(spectrum)
                if prod is not None:
                    status, prod_of = "product_redundant", prod
            rec = Record(
                id=len(self._records),
                sentence=sentence,
                spectrum=spectrum,
                truncated=truncated,
                status=status,
                duplicate_of=dup_of,
                product_of=prod_of,
                layer=layer,
                profile=profile,
                oeis=oeis,
            )
            self._records.append(rec)
            self._by_sentence[sentence] = rec
            with self.path.open("a") as fh:
                fh.write(rec.to_json() + "\n")
            return rec

    def reclassify_products(self) -> int:
        """Re-run product detection over the whole store, order-independently.

        Insert-time detection only sees factors stored before the query, so
        a product whose factors arrive later stays unique until this pass.
        Factors are drawn from all non-duplicate records, since a redundant
        sequence still witnesses the factorization of another.  Returns the
        number of records demoted.
        """
        with self._lock:
            carriers = [r for r in self._records if r.status != "duplicate"]
            demoted = 0
            for rec in carriers:
                if rec.status != "unique":
                    continue
                prod = self._find_product(
                    rec.spectrum, pool=carriers, exclude_id=rec.id
                )
                if prod is not None:
                    rec.status = "product_redundant"
                    rec.product_of = prod
                    demoted += 1
            if demoted:
                self._rewrite()
            return demoted

    def set_oeis(self, rec_id: int, oeis: str | None) -> None:
        """Update one record's OEIS id and rewrite the file."""
        with self._lock:
            self._records[rec_id].oeis = oeis
            self._rewrite()

    def _rewrite(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        with tmp.open("w") as fh:
            for rec in self._records:
                fh.write(rec.to_json() + "\n")
        tmp.replace(self.path)

    def stats(self) -> dict[str, int]:
        out = {"total": len(self._records)}
        for rec in self._records:
            out[rec.status] = out.get(rec.status, 0) + 1
        out["matched"] = sum(1 for r in self._records if r.oeis)
        return out
