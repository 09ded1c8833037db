import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckfit import datagen
from ckfit.errors import ParseError, UsageError
from ckfit.ppmodel import SampleSet


def test_preset_a_endpoints():
    spec = datagen.preset("A")
    raw = datagen.sample(spec)
    assert raw.n == 50
    assert raw.xs[0] == 0.0 and raw.xs[-1] == np.pi / 2
    scaled = datagen.generate(spec)
    assert scaled.xs[0] == 0.0 and scaled.xs[-1] == 4.0
    np.testing.assert_array_equal(scaled.original_xs[[0, -1]], [0.0, np.pi / 2])


@pytest.mark.parametrize("name, n, m, b", [("A", 50, 2, np.pi / 2), ("B", 100, 2, 2 * np.pi), ("C", 100, 3, 1.0)])
def test_presets(name, n, m, b):
    spec = datagen.preset(name)
    assert (spec.n, spec.m, spec.interval) == (n, m, (0.0, b))
    data = datagen.generate(spec)
    assert data.xs[0] == 0.0 and data.xs[-1] == 2 * m
    raw = datagen.sample(spec)
    assert np.ptp(np.diff(raw.xs)) < 1e-12


def test_noise_free_bit_exact():
    raw = datagen.sample(datagen.preset("C"))
    np.testing.assert_array_equal(raw.ys, np.sin(raw.xs ** 2 * 4 * np.pi))


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_noise_statistics(seed):
    spec = datagen.preset("B", 0.5, seed)
    raw = datagen.sample(spec)
    resid = raw.ys - np.sin(raw.xs)
    assert abs(resid.mean()) < 0.2
    assert 0.35 <= resid.std() <= 0.65


def test_deterministic_and_seed_sensitive():
    a = datagen.generate(datagen.preset("A", 0.5, 0))
    b = datagen.generate(datagen.preset("A", 0.5, 0))
    c = datagen.generate(datagen.preset("A", 0.5, 1))
    assert a.ys.tobytes() == b.ys.tobytes() != c.ys.tobytes()


def test_unknown_preset():
    with pytest.raises(UsageError, match="unknown dataset"):
        datagen.preset("D")


def test_spec_validation():
    with pytest.raises(UsageError):
        datagen.DatasetSpec("X", "sin(x)", (0, 1), 1, 1)
    with pytest.raises(UsageError):
        datagen.DatasetSpec("X", "cos(x)", (0, 1), 10, 1)
    with pytest.raises(UsageError):
        datagen.preset("A", -0.1)


def test_csv_round_trip(tmp_path):
    raw = datagen.sample(datagen.preset("C", 0.1))
    path = tmp_path / "c.csv"
    datagen.write_csv(raw, path)
    back = datagen.read_csv(path)
    assert back.xs.tobytes() == raw.xs.tobytes() and back.ys.tobytes() == raw.ys.tobytes()
    datagen.write_csv(back, tmp_path / "c2.csv")
    assert path.read_bytes() == (tmp_path / "c2.csv").read_bytes()


def test_write_original_units_from_scaled(tmp_path):
    scaled = datagen.generate(datagen.preset("B"))
    datagen.write_csv(scaled, tmp_path / "b.csv")
    back = datagen.read_csv(tmp_path / "b.csv")
    np.testing.assert_allclose(back.xs, datagen.sample(datagen.preset("B")).xs, rtol=0, atol=1e-14)


@given(xs=st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=30, unique=True),
       seed=st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_csv_round_trip_property(xs, seed, tmp_path_factory):
    xs = np.sort(np.array(xs))
    ys = np.random.default_rng(seed).normal(size=xs.size) * 1e3
    path = tmp_path_factory.mktemp("rt") / "p.csv"
    datagen.write_csv(SampleSet(xs, ys), path)
    back = datagen.read_csv(path)
    assert back.xs.tobytes() == xs.tobytes() and back.ys.tobytes() == ys.tobytes()


def test_read_minimal(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("x,y\n0,0\n1,1\n")
    assert datagen.read_csv(p).n == 2


def test_parse_error_line_number(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1,1\n0,abc\n")
    with pytest.raises(ParseError) as info:
        datagen.read_csv(p)
    assert info.value.line == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text", ["a,b\n0,0\n", "", "x,y\n", "x,y\n0,1,2\n"])
def test_malformed_files(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ParseError):
        datagen.read_csv(p)


@pytest.mark.parametrize("body", ["0,0\n2,1\n1,1\n", "0,0\n0,1\n"])
def test_non_monotone_rejected(tmp_path, body):
    p = tmp_path / "nm.csv"
    p.write_text("x,y\n" + body)
    with pytest.raises(UsageError, match="increasing"):
        datagen.read_csv(p)


def test_sidecar_and_transform():
    assert datagen.sidecar_path("out/a.csv").name == "a.json"
    raw = datagen.sample(datagen.preset("A"))
    t = datagen.transform_for(raw, 2)
    assert t.forward(np.pi / 2) == pytest.approx(4.0)


def test_csv_round_trip_negative_zero(tmp_path):
    path = tmp_path / "z.csv"
    datagen.write_csv(SampleSet([-0.0, 1.0], [-0.0, 2.0]), path)
    back = datagen.read_csv(path)
    assert np.signbit(back.xs[0]) and np.signbit(back.ys[0])
