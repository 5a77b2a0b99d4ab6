"""Append-only spectrum store: duplicates, products, persistence."""

from combspec.seqdb import MIN_OVERLAP, SpectrumDB


def make_db(tmp_path, name="seq.jsonl"):
    return SpectrumDB(tmp_path / name)


def test_insert_and_lookup(tmp_path):
    db = make_db(tmp_path)
    rec = db.insert("(V x E y B(x,y))", [1, 9, 343, 50625, 28629151], layer=1)
    assert rec.status == "unique"
    assert rec.id == 0
    assert rec.layer == 1


def test_reinsert_same_sentence_is_idempotent(tmp_path):
    db = make_db(tmp_path)
    a = db.insert("(E x U(x))", [1, 3, 7, 15, 31])
    b = db.insert("(E x U(x))", [1, 3, 7, 15, 31])
    assert a.id == b.id
    assert db.stats()["total"] == 1


def test_duplicate_needs_five_terms(tmp_path):
    db = make_db(tmp_path)
    db.insert("s1", [1, 3, 7, 15, 31, 63])
    # four-term overlap is not enough evidence
    short = db.insert("s2", [1, 3, 7, 15])
    assert short.status == "unique"
    dup = db.insert("s3", [1, 3, 7, 15, 31])
    assert dup.status == "duplicate"
    assert dup.duplicate_of == 0


def test_differing_later_term_is_not_duplicate(tmp_path):
    db = make_db(tmp_path)
    db.insert("s1", [1, 3, 7, 15, 31, 63, 127, 255, 511, 1023])
    other = db.insert("s2", [1, 3, 7, 15, 31, 64, 127, 255, 511, 1023])
    assert other.status == "unique"


def test_truncated_record_matches_on_common_prefix(tmp_path):
    db = make_db(tmp_path)
    db.insert("long", [2, 6, 26, 162, 1442, 18306, 330626])
    cut = db.insert("cut", [2, 6, 26, 162, 1442], truncated=True)
    assert cut.status == "duplicate"


def test_square_is_product_redundant(tmp_path):
    db = make_db(tmp_path)
    base = db.insert("base", [1, 3, 7, 15, 31, 63])
    sq = db.insert("square", [1, 9, 49, 225, 961, 3969])
    assert sq.status == "product_redundant"
    assert sq.product_of == (base.id, base.id)


def test_product_of_two_factors(tmp_path):
    db = make_db(tmp_path)
    a = db.insert("a", [1, 2, 6, 24, 120, 720])
    b = db.insert("b", [1, 3, 7, 15, 31, 63])
    p = db.insert("p", [1, 6, 42, 360, 3720, 45360])
    assert p.status == "product_redundant"
    assert set(p.product_of) == {a.id, b.id}


def test_product_with_zero_factor_positions(tmp_path):
    # where the factor is zero the quotient is unconstrained, so the match
    # must verify those positions against the product directly
    db = make_db(tmp_path)
    a = db.insert("a", [0, 1, 2, 3, 4, 5])
    b = db.insert("b", [1, 1, 2, 2, 1, 3])
    p = db.insert("p", [0, 1, 4, 6, 4, 15])
    assert p.status == "product_redundant"
    assert set(p.product_of) == {a.id, b.id}


def test_zero_position_mismatch_rejected(tmp_path):
    db = make_db(tmp_path)
    db.insert("a", [0, 1, 2, 3, 4, 5])
    db.insert("b", [1, 1, 2, 2, 1, 3])
    # disagrees at the masked position: 7 != 0 * anything
    q = db.insert("q", [7, 1, 4, 6, 4, 15])
    assert q.status == "unique"


def test_all_ones_factor_is_ignored(tmp_path):
    db = make_db(tmp_path)
    db.insert("ones", [1, 1, 1, 1, 1, 1])
    db.insert("base", [1, 3, 7, 15, 31, 63])
    same = db.insert("copycat", [1, 3, 7, 15, 31, 62])
    # base * ones would "explain" any sequence equal to base; forbid it
    assert same.status == "unique"


def test_short_spectra_never_product_matched(tmp_path):
    db = make_db(tmp_path)
    db.insert("a", [2, 3, 5, 7])
    db.insert("b", [3, 4, 6, 8])
    p = db.insert("p", [6, 12, 30, 56])
    assert p.status == "unique"
    assert len(p.spectrum) < MIN_OVERLAP


def test_reclassify_products_settles_insert_order(tmp_path):
    db = make_db(tmp_path)
    # the product arrives before its factors, so insert-time detection misses it
    p = db.insert("p", [1, 6, 42, 360, 3720, 45360])
    db.insert("a", [1, 2, 6, 24, 120, 720])
    db.insert("b", [1, 3, 7, 15, 31, 63])
    assert db.records()[p.id].status == "unique"
    demoted = db.reclassify_products()
    assert demoted == 1
    assert db.records()[p.id].status == "product_redundant"
    assert set(db.records()[p.id].product_of) == {1, 2}


def test_reclassify_is_idempotent(tmp_path):
    db = make_db(tmp_path)
    db.insert("p", [1, 9, 49, 225, 961, 3969])
    db.insert("a", [1, 3, 7, 15, 31, 63])
    assert db.reclassify_products() == 1
    assert db.reclassify_products() == 0


def test_persistence_round_trip(tmp_path):
    path = tmp_path / "seq.jsonl"
    db = SpectrumDB(path)
    db.insert("(E x U(x))", [1, 3, 7, 15, 31], layer=1, profile="fo2-paper")
    db.insert("(V x E y B(x,y))", [1, 9, 343, 50625, 28629151], layer=1)
    db.insert("dup", [1, 3, 7, 15, 31])
    reloaded = SpectrumDB(path)
    assert [r.to_json() for r in reloaded.records()] == [
        r.to_json() for r in db.records()
    ]
    assert reloaded.stats() == db.stats()
    # idempotency map survives the reload
    again = reloaded.insert("(E x U(x))", [1, 3, 7, 15, 31])
    assert again.id == 0
    assert reloaded.stats()["total"] == 3


def test_big_integers_survive_round_trip(tmp_path):
    path = tmp_path / "seq.jsonl"
    db = SpectrumDB(path)
    huge = [1, 18, 1699, 592260, 754179301, 3562635108438, 63770601591579079]
    db.insert("big", huge)
    assert SpectrumDB(path).records()[0].spectrum == tuple(huge)


def test_set_oeis_and_stats(tmp_path):
    path = tmp_path / "seq.jsonl"
    db = SpectrumDB(path)
    rec = db.insert("(E x U(x))", [1, 3, 7, 15, 31])
    db.insert("other", [1, 9, 343, 50625, 28629151])
    db.set_oeis(rec.id, "A000225")
    stats = db.stats()
    assert stats["total"] == 2
    assert stats["unique"] == 2
    assert stats["matched"] == 1
    assert SpectrumDB(path).records()[rec.id].oeis == "A000225"


def test_stats_counts_statuses(tmp_path):
    db = make_db(tmp_path)
    db.insert("a", [1, 3, 7, 15, 31, 63])
    db.insert("b", [1, 3, 7, 15, 31])
    db.insert("c", [1, 9, 49, 225, 961, 3969])
    s = db.stats()
    assert s == {
        "total": 3,
        "unique": 1,
        "duplicate": 1,
        "product_redundant": 1,
        "matched": 0,
    }
