import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tensorroot.io import (
    RunManifest,
    TensorFileError,
    atomic_write_text,
    dumps_tensor,
    loads_tensor,
    read_tensor,
    write_json,
    write_tensor,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
tensors = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4)).flatmap(
    lambda s: arrays(np.float64, s, elements=finite)
)


class TestTensorFiles:
    def test_layout_is_slice_then_row(self):
        a = np.arange(8.0).reshape(2, 2, 2)
        obj = json.loads(dumps_tensor(a))
        assert obj["dims"] == [2, 2, 2]
        assert obj["data"] == [0.0, 2.0, 4.0, 6.0, 1.0, 3.0, 5.0, 7.0]

    @given(tensors)
    def test_round_trip_exact(self, a):
        np.testing.assert_array_equal(loads_tensor(dumps_tensor(a)), a)

    def test_file_round_trip(self, tmp_path, rng):
        a = rng.standard_normal((3, 2, 4))
        write_tensor(tmp_path / "sub" / "a.json", a)
        np.testing.assert_array_equal(read_tensor(tmp_path / "sub" / "a.json"), a)
        assert not [p for p in (tmp_path / "sub").iterdir() if p.name.endswith(".tmp")]

    def test_matrix_promoted(self):
        assert loads_tensor(dumps_tensor(np.eye(2))).shape == (2, 2, 1)

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[1, 2]",
            '{"dims": [2, 2], "data": [1, 2, 3, 4]}',
            '{"dims": [1, 1, 2], "data": [1]}',
            '{"dims": [1, 1, 1], "data": ["x"]}',
            '{"dims": [1, 1, 1], "data": [NaN]}',
            '{"dims": [0, 1, 1], "data": []}',
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(TensorFileError):
            loads_tensor(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(TensorFileError):
            read_tensor(tmp_path / "nope.json")


class TestManifest:
    def test_round_trip(self, tmp_path):
        m = RunManifest(
            command="sqrt",
            inputs=[str(tmp_path / "a.json")],
            parameters={"tol": np.float64(1e-12), "shape": np.array([3, 3, 3])},
            outputs=["x.json"],
            versions="tensorroot 0.1",
        )
        m.write(tmp_path / "m.json")
        back = RunManifest.from_json((tmp_path / "m.json").read_text())
        assert back.command == "sqrt"
        assert back.parameters == {"shape": [3, 3, 3], "tol": 1e-12}

    def test_atomic_overwrite(self, tmp_path):
        p = tmp_path / "f.txt"
        atomic_write_text(p, "one")
        atomic_write_text(p, "two")
        assert p.read_text() == "two"

    def test_write_json_sorted(self, tmp_path):
        write_json(tmp_path / "o.json", {"b": 1, "a": np.int64(2)})
        assert list(json.loads((tmp_path / "o.json").read_text())) == ["a", "b"]
