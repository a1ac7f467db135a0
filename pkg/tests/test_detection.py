import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnaids.automaton import Automaton
from dnaids.dataset import LabelClass, parse_records, feature_stats
from dnaids.detection import (
    DetectionConfig,
    EmptyDatabaseWarning,
    WeightTable,
    build_engine,
    classify,
    detect_stream,
    load_weights,
    weight_distance,
    weight_profile,
)
from dnaids.encoding import fit_encoder
from dnaids.errors import FingerprintMismatch, LengthMismatch, MalformedLine
from dnaids.signatures import Signature, SignatureDatabase, build_database

from conftest import make_line
from oracles import WEIGHTS, naive_exact, naive_find_all, naive_weighted

FP = "0123456789abcdef"
DOS, PROBE, R2L, U2R = LabelClass.DOS, LabelClass.PROBE, LabelClass.R2L, LabelClass.U2R
W = WeightTable()


def db_of(*entries):
    """entries: (class, sequence) in id order."""
    return SignatureDatabase(FP, tuple(Signature(i, c, s) for i, (c, s) in enumerate(entries)))


class TestAutomaton:
    def test_classic(self):
        pats = ["he", "she", "his", "hers"]
        ac = Automaton(pats)
        found = ac.find_all("ushers")
        assert found == naive_find_all(pats, "ushers")
        assert {pats[p] for _, p in found} == {"she", "he", "hers"}
        assert found == {(1, 1), (2, 0), (2, 3)}

    def test_duplicates_and_nesting(self):
        pats = ["A", "AA", "AAA", "AA"]
        assert Automaton(pats).find_all("AAAA") == naive_find_all(pats, "AAAA")

    def test_empty_text(self):
        assert Automaton(["AC"]).find_all("") == set()

    def test_rejects_empty_pattern(self):
        with pytest.raises(ValueError):
            Automaton([""])

    @settings(max_examples=200)
    @given(st.lists(st.text("ACGT", min_size=1, max_size=6), min_size=1, max_size=12),
           st.text("ACGT", max_size=80))
    def test_matches_naive(self, pats, text):
        ac = Automaton(pats)
        found = ac.find_all(text)
        assert found == naive_find_all(pats, text)
        assert ac.matched_ids(text) == {p for _, p in found}


class TestWeights:
    def test_defaults(self):
        assert W.as_tuple() == (0.08167, 0.02782, 0.02015, 0.09056)
        assert W.min_gap == pytest.approx(0.00767, abs=1e-12)

    def test_profile(self):
        assert weight_profile("", W) == []
        assert weight_profile("A", W) == [0.08167]
        assert weight_profile("AT", W) == [0.08167, 0.09056]

    def test_distance_examples(self):
        assert weight_distance("ACGT", "ACGT", W) == 0
        assert weight_distance("A", "T", W) == pytest.approx(0.00889, abs=1e-12)
        assert weight_distance("AC", "CA", W) == pytest.approx(0.10770, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            weight_distance("A", "AC", W)

    @pytest.mark.parametrize("vals", [(0.1, 0.1, 0.2, 0.3), (0.1, -0.2, 0.3, 0.4), (0.1, 0.0, 0.2, 0.3)])
    def test_invalid(self, vals):
        with pytest.raises(ValueError):
            WeightTable(*vals)

    def test_file(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("A=0.4\nC=0.3\nG=0.2\nT=0.1\n")
        assert load_weights(p) == WeightTable(0.4, 0.3, 0.2, 0.1)
        p.write_text("A=0.4\nC=0.4\nG=0.2\nT=0.1\n")
        with pytest.raises(ValueError):
            load_weights(p)
        p.write_text("A=0.4\nC=0.3\nG=0.2\n")
        with pytest.raises(MalformedLine):
            load_weights(p)

    seqs = st.text("ACGT", min_size=5, max_size=5)

    @given(seqs, seqs, seqs)
    def test_metric(self, a, b, c):
        assert weight_distance(a, b, W) == pytest.approx(weight_distance(b, a, W), abs=1e-12)
        assert weight_distance(a, c, W) <= weight_distance(a, b, W) + weight_distance(b, c, W) + 1e-12
        assert (weight_distance(a, b, W) == 0) == (a == b)


class TestClassify:
    def test_empty_db(self):
        with pytest.warns(EmptyDatabaseWarning):
            engine = build_engine(SignatureDatabase(FP), DetectionConfig("exact"))
        v = classify("ACGT", engine)
        assert v.outcome is LabelClass.NORMAL and v.matched_signature_id is None

    def test_exact(self):
        engine = build_engine(db_of((DOS, "ACGT")), DetectionConfig("exact"))
        assert len(engine.exact_index) == 1
        v = classify("ACGT", engine)
        assert (v.outcome, v.matched_signature_id, v.score) == (DOS, 0, 0.0)
        assert classify("ACGA", engine).outcome is LabelClass.NORMAL
        with pytest.raises(LengthMismatch):
            classify("ACG", engine)

    def test_automaton_inside(self):
        engine = build_engine(db_of((DOS, "ACGT")), DetectionConfig("substring"))
        assert engine.automaton.find_all("AACGTT") == {(1, 0)}

    def test_weighted_threshold(self):
        db = db_of((DOS, "ACGT"))
        low = build_engine(db, DetectionConfig("weighted", tau=0.005))
        v = classify("ACGA", low)
        assert v.outcome is LabelClass.NORMAL
        assert v.score == pytest.approx(0.00889, abs=1e-12)
        high = build_engine(db, DetectionConfig("weighted", tau=0.01))
        v = classify("ACGA", high)
        assert (v.outcome, v.matched_signature_id) == (DOS, 0)
        assert v.score == pytest.approx(0.00889, abs=1e-12)

    def test_substring_group_signature(self):
        engine = build_engine(db_of((PROBE, "CG")), DetectionConfig("substring"))
        v = classify("ACGT", engine)
        assert (v.outcome, v.matched_signature_id) == (PROBE, 0)
        assert classify("AAAA", engine).outcome is LabelClass.NORMAL

    def test_priority_tie_break(self):
        db = db_of((U2R, "ACGT"), (PROBE, "ACGT"), (PROBE, "CGTA"))
        assert classify("ACGT", build_engine(db, DetectionConfig("exact"))).outcome is PROBE
        # substring: DoS pattern "CG" occurs inside "ACGT" and wins on priority
        v = classify("ACGT", build_engine(db_of((U2R, "ACGT"), (PROBE, "ACGT"), (DOS, "CG")),
                                          DetectionConfig("substring")))
        assert (v.outcome, v.matched_signature_id) == (DOS, 2)
        custom = DetectionConfig("exact", class_priority=(U2R, R2L, PROBE, DOS))
        assert classify("ACGT", build_engine(db, custom)).outcome is U2R

    def test_weighted_tie_break(self):
        # "ACGA" is 0.00889 from both; lower id wins within the same class
        db = db_of((PROBE, "ACGT"), (PROBE, "TCGA"), (R2L, "ACTA"))
        v = classify("ACGA", build_engine(db, DetectionConfig("weighted", tau=0.01)))
        assert (v.outcome, v.matched_signature_id) == (PROBE, 0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DetectionConfig("fuzzy")
        with pytest.raises(ValueError):
            DetectionConfig(tau=-1)
        with pytest.raises(ValueError):
            DetectionConfig(class_priority=(DOS, DOS, R2L, U2R))

    def test_mixed_lengths_need_substring(self):
        db = db_of((DOS, "ACGT"), (PROBE, "CG"))
        with pytest.raises(LengthMismatch):
            build_engine(db, DetectionConfig("exact"))
        build_engine(db, DetectionConfig("substring"))


def _random_instance(rng, n_sigs, length):
    sigs = []
    seen = set()
    for i in range(n_sigs):
        cls = rng.choice(["dos", "probe", "r2l", "u2r"])
        seq = "".join(rng.choices("ACGT", k=length))
        if (cls, seq) in seen:
            continue
        seen.add((cls, seq))
        sigs.append((len(sigs), cls, seq))
    return sigs


def _db(sigs):
    return SignatureDatabase(FP, tuple(Signature(i, LabelClass(c), s) for i, c, s in sigs))


class TestOracles:
    def test_exact_matches_linear_scan(self):
        rng = random.Random(3)
        for _ in range(30):
            length = rng.randint(1, 6)
            sigs = _random_instance(rng, rng.randint(1, 60), length)
            engine = build_engine(_db(sigs), DetectionConfig("exact"))
            for _ in range(100):
                probe = "".join(rng.choices("ACGT", k=length))
                v = engine.classify(probe)
                got = (v.outcome.value, v.matched_signature_id) if v.is_attack else None
                assert got == naive_exact(sigs, probe)

    def test_weighted_matches_brute_force(self):
        rng = random.Random(4)
        for _ in range(30):
            length = rng.randint(1, 5)
            sigs = _random_instance(rng, rng.randint(1, 40), length)
            tau = rng.choice([0.0, 0.005, 0.01, 0.05, 0.2])
            engine = build_engine(_db(sigs), DetectionConfig("weighted", tau=tau))
            for _ in range(50):
                probe = "".join(rng.choices("ACGT", k=length))
                v = engine.classify(probe)
                want = naive_weighted(sigs, probe, tau)
                if want is None:
                    assert not v.is_attack
                else:
                    assert (v.outcome.value, v.matched_signature_id) == want[:2]
                    assert v.score == pytest.approx(want[2], abs=1e-12)
                    assert v.score <= tau + 1e-12

    def test_scaling_invariance(self):
        rng = random.Random(5)
        for _ in range(20):
            sigs = _random_instance(rng, 30, 6)
            base = build_engine(_db(sigs), DetectionConfig("weighted", tau=1.0))
            c = rng.uniform(0.5, 10)
            scaled = build_engine(_db(sigs), DetectionConfig("weighted", tau=1.0 * c, weights=W.scaled(c)))
            exact0 = build_engine(_db(sigs), DetectionConfig("weighted", tau=0.0, weights=W.scaled(c)))
            exact = build_engine(_db(sigs), DetectionConfig("exact"))
            for _ in range(30):
                p = "".join(rng.choices("ACGT", k=6))
                a, b = base.classify(p), scaled.classify(p)
                assert a.matched_signature_id == b.matched_signature_id
                assert b.score == pytest.approx(a.score * c, abs=1e-9)
                assert exact0.classify(p).matched_signature_id == exact.classify(p).matched_signature_id

    def test_tau_monotone(self):
        rng = random.Random(6)
        sigs = _random_instance(rng, 50, 5)
        probes = ["".join(rng.choices("ACGT", k=5)) for _ in range(300)]
        prev = set()
        for tau in [0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.3]:
            engine = build_engine(_db(sigs), DetectionConfig("weighted", tau=tau))
            hits = {p for p in probes if engine.classify(p).is_attack}
            assert prev <= hits
            prev = hits


@pytest.fixture(scope="module")
def pipeline(schema, taxonomy):
    lines = [make_line("neptune", flag="S0", count=200), make_line("normal"),
             make_line("smurf", protocol_type="icmp", service="ecr_i", src_bytes=1032),
             make_line("normal", duration=30)]
    recs = list(parse_records(lines, schema, taxonomy))
    model = fit_encoder(feature_stats(recs, schema), schema)
    db = build_database([(model.encode(r.values)[0], r.label_class) for r in recs], model.fingerprint)
    return recs, model, db


class TestDetectStream:
    def test_empty(self, pipeline):
        _, model, db = pipeline
        assert list(detect_stream([], model, build_engine(db))) == []

    def test_one_dos(self, pipeline):
        recs, model, db = pipeline
        (v,) = detect_stream(recs[:1], model, build_engine(db))
        assert v.outcome is DOS and v.source_index == 0

    def test_pointwise(self, pipeline):
        recs, model, db = pipeline
        engine = build_engine(db)
        got = list(detect_stream(recs, model, engine))
        assert got == [engine.classify(*model.encode(r.values)[:1], r.source_index, 0) for r in recs]
        assert [v.outcome for v in got] == [DOS, LabelClass.NORMAL, DOS, LabelClass.NORMAL]

    def test_fingerprint_checked_eagerly(self, pipeline):
        recs, model, _ = pipeline
        other = build_engine(build_database([("A" * model.total_length, DOS)], "f" * 16))

        def never():
            raise AssertionError("stream consumed")
            yield

        with pytest.raises(FingerprintMismatch):
            detect_stream(never(), model, other)

    def test_parallel_order(self, pipeline):
        recs, model, db = pipeline
        engine = build_engine(db)
        many = [r for _ in range(50) for r in recs]
        serial = list(detect_stream(many, model, engine))
        assert list(detect_stream(many, model, engine, workers=3, chunk_size=7)) == serial

    def test_deterministic_build(self, pipeline):
        recs, model, db = pipeline
        rng = random.Random(0)
        probes = ["".join(rng.choices("ACGT", k=model.total_length)) for _ in range(200)]
        probes += [s.sequence for s in db.signatures]
        for mode in ("exact", "substring", "weighted"):
            e1, e2 = build_engine(db, DetectionConfig(mode)), build_engine(db, DetectionConfig(mode))
            assert [e1.classify(p) for p in probes] == [e2.classify(p) for p in probes]
