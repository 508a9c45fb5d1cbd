import sqlite3

from funcquant.db import CodebookStore


def test_put_get_round_trip(tmp_path):
    store = CodebookStore.in_dir(tmp_path / "cache")
    assert store.get(3) is None
    store.put(3, [-1.224, 0.0, 1.224], 0.1902, 1e-13)
    codepoints, distortion, residual = store.get(3)
    assert codepoints == [-1.224, 0.0, 1.224]
    assert distortion == 0.1902
    assert residual == 1e-13
    store.close()


def test_last_writer_wins(tmp_path):
    store = CodebookStore(tmp_path / "codebooks.db")
    store.put(2, [-0.8, 0.8], 0.4, 1e-3)
    store.put(2, [-0.79788, 0.79788], 0.3634, 1e-14)
    store.put(5, [0.0] * 5, 0.1, 0.0)
    assert store.count() == 2
    assert store.max_levels() == 5
    assert store.get(2)[1] == 0.3634
    store.close()


def test_wal_journal(tmp_path):
    store = CodebookStore(tmp_path / "codebooks.db")
    store.put(1, [0.0], 1.0, 0.0)
    store.close()
    conn = sqlite3.connect(tmp_path / "codebooks.db")
    assert conn.execute("PRAGMA journal_mode").fetchone()[0] == "wal"
    conn.close()


def test_put_retries_when_locked(tmp_path, mocker):
    store = CodebookStore(tmp_path / "codebooks.db")
    real_conn = store.conn
    calls = {"n": 0}

    class FlakyConnection:
        def execute(self, *args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 1:
                raise sqlite3.OperationalError("database is locked")
            return real_conn.execute(*args, **kwargs)

        def commit(self):
            real_conn.commit()

    store.conn = FlakyConnection()
    mocker.patch("time.sleep")
    store.put(4, [-1.5, -0.45, 0.45, 1.5], 0.1175, 0.0)
    store.conn = real_conn
    assert store.get(4)[1] == 0.1175
    assert calls["n"] == 2
    store.close()
