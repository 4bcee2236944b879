import hashlib
import json

import numpy as np
import pytest

from eigencycle.errors import DimensionError, FixtureError, InsufficientData
from eigencycle.fixtures import (
    CHECKSUMS,
    TREATMENT_NAMES,
    fixture_path,
    l_table,
    matching_pennies_game,
    oneill_game,
    parse_l_table,
    read_fixture,
    table2,
    verify_digest,
)
from eigencycle.io import (
    atomic_write,
    dump_game,
    dump_json,
    dump_play_series,
    dump_trajectory,
    load_game,
    load_pair_column,
    load_play_series,
    load_trajectory,
    pair_columns_to_csv,
    parse_play_series,
    parse_trajectory,
    play_series_to_csv,
)
from eigencycle.spectral import pair_code, subspace_pairs
from eigencycle.tsmetrics import PlaySeries, Session, Trajectory


def test_checksums_pinned():
    for name, digest in CHECKSUMS.items():
        raw = fixture_path(name).read_bytes()
        assert hashlib.sha256(raw).hexdigest() == digest
        assert read_fixture(name) == raw


def test_tampered_fixture_rejected():
    raw = read_fixture("table4_angular_momentum.csv")
    with pytest.raises(FixtureError):
        verify_digest("table4_angular_momentum.csv", raw.replace(b"-0.038", b"-0.039", 1))
    with pytest.raises(FixtureError):
        read_fixture("table9.csv")


def test_games():
    g = oneill_game()
    assert g.a.tolist() == [[1, -1, -1, -1], [-1, -1, 1, 1], [-1, 1, -1, 1], [-1, 1, 1, -1]]
    np.testing.assert_array_equal(g.b, -g.a.T)
    assert matching_pennies_game().dim == 4


def test_table2_fixture():
    t = table2()
    assert t.tags == (".8i", "-.8i", ".2", "-.2", ".4i_1", "-.4i_1", ".4i_2", "-.4i_2")
    assert t.column(".8i")["15"] == -0.1964 and t.column("-.8i")["15"] == 0.1964
    assert t.column(".4i_1")["26"] == 0.0873 and t.column("-.4i_1")["26"] == -0.0873
    for tag in (".8i", ".4i_1", ".4i_2"):
        np.testing.assert_array_equal(t.column("-" + tag).values, -t.column(tag).values)
    for tag in (".2", "-.2"):
        assert np.all(t.column(tag).values == 0)
    # conjugate pairs in the published eigenvectors
    np.testing.assert_allclose(t.eigenpair("-.8i").xi, np.conj(t.eigenpair(".8i").xi))
    assert t.eigenpair(".8i").xi[4] == 0.25 and t.eigenpair(".8i").xi[5] == pytest.approx(-1 / 12, abs=1e-12)


def test_l_table_fixture():
    lt = l_table()
    assert lt.codes == tuple(pair_code(m, n) for m, n in subspace_pairs(8))
    assert lt.columns == tuple(f"L_{n}" for n in TREATMENT_NAMES)
    np.testing.assert_array_equal(lt.rows(["15"])[0], [-0.038, -0.015, -0.053, -0.033, -0.039, -0.049])
    assert lt.column("O")[3] == lt.column("L_O")[3] == -0.038


def test_parse_l_table_errors():
    with pytest.raises(FixtureError):
        parse_l_table("code,L_O\n12,1\n")
    with pytest.raises(FixtureError):
        parse_l_table("pair,L_O,L_B\n12,1\n")


def test_pair_column_round_trip(tmp_path):
    lt = l_table()
    p = atomic_write(tmp_path / "l.csv", pair_columns_to_csv({"L_O": lt.column("O"), "L_B": lt.column("B")}))
    np.testing.assert_array_equal(load_pair_column(p), lt.column("O"))
    np.testing.assert_array_equal(load_pair_column(p, "L_B"), lt.column("B"))
    with pytest.raises(KeyError):
        load_pair_column(p, "L_Q")
    with pytest.raises(DimensionError):
        pair_columns_to_csv({"x": [1.0, 2.0]})


def test_game_round_trip(tmp_path):
    p = dump_game(oneill_game(), tmp_path / "g.json")
    assert load_game(p) == oneill_game()


def test_play_series_round_trip(tmp_path, rng):
    s1 = Session("a", rng.integers(1, 5, 30), rng.integers(1, 5, 30))
    s2 = Session("b", rng.integers(1, 5, 12), rng.integers(1, 5, 12))
    ser = PlaySeries((s1, s2), 4, 4)
    p = dump_play_series(ser, tmp_path / "plays.csv")
    assert p.read_text().splitlines()[0] == "session,round,a_choice,b_choice"
    assert load_play_series(p) == ser


def test_play_series_parse_errors():
    with pytest.raises(ValueError):
        parse_play_series("session,round,a_choice,b_choice\n1,2,1,1\n1,2,2,2\n")
    with pytest.raises(ValueError):
        parse_play_series("session,round,a,b\n1,1,1,1\n")
    with pytest.raises(ValueError):
        parse_play_series("session,round,a_choice,b_choice\n1,1,5,1\n")
    with pytest.raises(InsufficientData):
        parse_play_series("session,round,a_choice,b_choice\n")


def test_play_series_interleaved_sessions():
    text = "session,round,a_choice,b_choice\n1,1,1,1\n2,1,2,2\n1,2,3,3\n"
    ser = parse_play_series(text)
    assert [s.session_id for s in ser.sessions] == ["1", "2"]
    assert ser.sessions[0].a.tolist() == [1, 3]
    assert parse_play_series(play_series_to_csv(ser)) == ser


def test_trajectory_round_trip(tmp_path, rng):
    tr = Trajectory(np.linspace(0, 1, 9) / 3, rng.random((9, 8)))
    back = load_trajectory(dump_trajectory(tr, tmp_path / "t.csv"))
    np.testing.assert_array_equal(back.times, tr.times)
    np.testing.assert_array_equal(back.states, tr.states)
    with pytest.raises(ValueError):
        parse_trajectory("time,x1\n0,1\n")
    with pytest.raises(InsufficientData):
        parse_trajectory("t,x1\n")


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    atomic_write(target, "one")
    atomic_write(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in target.parent.iterdir()] == ["out.txt"]


def test_dump_json_handles_numpy(tmp_path):
    p = dump_json({"z": 1 + 2j, "a": np.arange(3), "f": np.float64(0.5)}, tmp_path / "x.json")
    assert json.loads(p.read_text()) == {"z": [1.0, 2.0], "a": [0, 1, 2], "f": 0.5}
