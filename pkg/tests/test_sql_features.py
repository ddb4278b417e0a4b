from sql_corpus import positive_corpus

from sqlscope.sql import extract_features, fingerprint, parse_sql


def feats(sql):
    return extract_features(parse_sql(sql))


class TestExtraction:
    def test_predicates_and_leading_wildcard(self):
        f = feats("SELECT a FROM t WHERE b > 5 AND c LIKE '%x'")
        assert f.predicate_signatures == {"t.b >", "t.c like"}
        assert f.has_like_leading_wildcard
        assert f.num_predicates == 2

    def test_no_where_no_predicates(self):
        f = feats("SELECT a FROM t")
        assert f.num_predicates == 0 and f.predicate_signatures == set()

    def test_subquery_features_merge(self):
        f = feats("SELECT a FROM t WHERE x IN (SELECT y FROM u)")
        assert {"t", "u"} <= f.tables
        assert f.num_subqueries == 1
        assert "t.x in" in f.predicate_signatures

    def test_counts_consistent_with_sets(self):
        f = feats("SELECT * FROM a JOIN b ON a.x = b.x JOIN c ON b.y = c.y")
        assert f.num_tables == len(f.tables) == 3
        assert f.num_joins == 2
        assert f.join_pairs == {"a~b", "b~c"}

    def test_alias_resolution(self):
        f = feats("SELECT o.id FROM orders o WHERE o.status = 'x'")
        assert f.predicate_signatures == {"orders.status ="}
        assert f.fields == {"orders.id", "orders.status"}

    def test_single_table_bare_columns_resolve(self):
        f = feats("SELECT a FROM t WHERE b > 5")
        assert f.fields == {"t.a", "t.b"}

    def test_ambiguous_bare_column_unresolved(self):
        f = feats("SELECT a FROM t, u WHERE b = 1")
        assert "?.a" in f.fields and "?.b ="in f.predicate_signatures

    def test_unknown_qualifier_unresolved(self):
        f = feats("SELECT z.a FROM t WHERE z.b = 1")
        assert "?.a" in f.fields and "?.b =" in f.predicate_signatures

    def test_mirrored_comparison(self):
        f = feats("SELECT a FROM t WHERE 5 < x")
        assert f.predicate_signatures == {"t.x >"}

    def test_column_to_column_signs_both_sides(self):
        f = feats("SELECT a FROM t WHERE t.x = t.y")
        assert f.predicate_signatures == {"t.x =", "t.y ="}

    def test_is_null_signature_covers_both_polarities(self):
        assert feats("SELECT a FROM t WHERE x IS NULL").predicate_signatures == {"t.x is_null"}
        assert feats("SELECT a FROM t WHERE x IS NOT NULL").predicate_signatures == {"t.x is_null"}

    def test_having_counts_but_does_not_sign(self):
        f = feats("SELECT region, count(*) FROM t GROUP BY region HAVING count(*) > 10")
        assert f.num_predicates == 1
        assert f.predicate_signatures == set()
        assert f.has_group_by and "count" in f.functions

    def test_join_condition_not_signed(self):
        f = feats("SELECT * FROM a JOIN b ON a.x = b.x")
        assert f.predicate_signatures == set()
        assert f.num_predicates == 1  # the ON atom is counted, not signed

    def test_boolean_flags(self):
        f = feats("SELECT DISTINCT a FROM t WHERE x = 1 OR y = 2 ORDER BY a")
        assert f.has_distinct and f.has_or and f.has_order_by
        assert not f.has_group_by and not f.has_select_star

    def test_limit_value(self):
        assert feats("SELECT a FROM t LIMIT 10").limit_value == 10
        assert feats("SELECT a FROM t").limit_value is None
        assert feats("SELECT a FROM t LIMIT ?").limit_value is None

    def test_statement_kinds(self):
        assert feats("SELECT a FROM t").statement_kind == "select"
        assert feats("INSERT INTO t VALUES (1)").statement_kind == "insert"
        assert feats("UPDATE t SET a = 1").statement_kind == "update"
        assert feats("DELETE FROM t").statement_kind == "delete"

    def test_update_and_insert_fields(self):
        f = feats("UPDATE t SET a = 1 WHERE b = 2")
        assert f.fields == {"t.a", "t.b"}
        assert f.predicate_signatures == {"t.b ="}
        f = feats("INSERT INTO t (a, b) VALUES (1, 2)")
        assert f.fields == {"t.a", "t.b"} and f.tables == {"t"}

    def test_functions_collected(self):
        f = feats("SELECT upper(lower(name)), count(*) FROM t")
        assert f.functions == {"upper", "lower", "count"}


class TestFingerprint:
    def test_literals_abstracted(self):
        fp = fingerprint(parse_sql("SELECT * FROM t WHERE id = 42"))
        assert fp == "select * from t where id = ?"

    def test_in_list_collapsed(self):
        fp = fingerprint(parse_sql("SELECT * FROM t WHERE id IN (1,2,3)"))
        assert fp == "select * from t where id in (?)"

    def test_queries_differing_only_in_literals_share_fingerprint(self):
        a = fingerprint(parse_sql("SELECT a FROM t WHERE x = 1 AND s = 'u'"))
        b = fingerprint(parse_sql("SELECT a FROM t WHERE x = 99 AND s = 'zzz'"))
        assert a == b

    def test_whitespace_and_case_normalized(self):
        a = fingerprint(parse_sql("select   A from T\nwhere  X = 5"))
        b = fingerprint(parse_sql("SELECT a FROM t WHERE x = 3"))
        assert a == b

    def test_idempotent_under_reparse_corpus_wide(self):
        for sql in positive_corpus():
            fp = fingerprint(parse_sql(sql))
            assert fingerprint(parse_sql(fp)) == fp

    def test_count_consistency_corpus_wide(self):
        for sql in positive_corpus():
            f = extract_features(parse_sql(sql))
            assert f.num_tables == len(f.tables)
