import io

import numpy as np
import pytest

from daepencil.exceptions import MatrixMarketError
from daepencil.fileio import (
    parse_matrix_market,
    read_vector,
    write_matrix_market,
    write_trajectory_csv,
    write_vector,
)
from daepencil.solvers import Trajectory


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParseArray:
    def test_identity(self, tmp_path):
        path = write(
            tmp_path,
            "id.mtx",
            "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n",
        )
        np.testing.assert_array_equal(parse_matrix_market(path), np.eye(2))

    def test_column_major_order(self, tmp_path):
        path = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
        )
        np.testing.assert_array_equal(
            parse_matrix_market(path), np.array([[1.0, 3.0], [2.0, 4.0]])
        )

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        path = write(
            tmp_path,
            "c.mtx",
            "%%MatrixMarket matrix array real general\n% a comment\n\n1 1\n% more\n2.5\n",
        )
        np.testing.assert_array_equal(parse_matrix_market(path), [[2.5]])

    def test_missing_entries_flagged_with_line(self, tmp_path):
        path = write(
            tmp_path,
            "short.mtx",
            "%%MatrixMarket matrix array real general\n3 3\n1\n2\n",
        )
        with pytest.raises(MatrixMarketError, match="expected 9 entries, found 2"):
            parse_matrix_market(path)

    def test_extra_entries_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "long.mtx",
            "%%MatrixMarket matrix array real general\n1 1\n1\n2\n",
        )
        with pytest.raises(MatrixMarketError, match="more than 1 entries"):
            parse_matrix_market(path)

    def test_non_numeric_entry_line_number(self, tmp_path):
        path = write(
            tmp_path,
            "bad.mtx",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\nbogus\n4\n",
        )
        with pytest.raises(MatrixMarketError, match=":5: non-numeric entry 'bogus'"):
            parse_matrix_market(path)

    def test_bad_header(self, tmp_path):
        path = write(tmp_path, "h.mtx", "%%NotMatrixMarket nothing\n1 1\n1\n")
        with pytest.raises(MatrixMarketError, match="expected header"):
            parse_matrix_market(path)

    def test_complex_field_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "cx.mtx",
            "%%MatrixMarket matrix array complex general\n1 1\n1 0\n",
        )
        with pytest.raises(MatrixMarketError, match="unsupported field"):
            parse_matrix_market(path)

    def test_non_square_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "rect.mtx",
            "%%MatrixMarket matrix array real general\n2 1\n1\n2\n",
        )
        with pytest.raises(MatrixMarketError, match="expected square"):
            parse_matrix_market(path)


class TestParseCoordinate:
    def test_single_entry(self, tmp_path):
        path = write(
            tmp_path,
            "coo.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n",
        )
        np.testing.assert_array_equal(
            parse_matrix_market(path), np.array([[0.0, 1.0], [0.0, 0.0]])
        )

    def test_count_mismatch(self, tmp_path):
        path = write(
            tmp_path,
            "cnt.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
        )
        with pytest.raises(MatrixMarketError, match="declared 2 entries, found 1"):
            parse_matrix_market(path)

    def test_out_of_bounds(self, tmp_path):
        path = write(
            tmp_path,
            "oob.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
        )
        with pytest.raises(MatrixMarketError, match="outside"):
            parse_matrix_market(path)

    def test_duplicate_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "dup.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n",
        )
        with pytest.raises(MatrixMarketError, match="duplicate"):
            parse_matrix_market(path)


class TestRoundTrip:
    def test_exact_doubles(self, tmp_path):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((5, 5)) * np.exp(rng.uniform(-30, 30, size=(5, 5)))
        M[0, 0] = 1 / 3
        M[1, 1] = -0.0
        path = tmp_path / "round.mtx"
        write_matrix_market(path, M)
        back = parse_matrix_market(path)
        assert np.array_equal(M, back)  # bit-exact, including signed zero sign

    def test_written_bytes_deterministic(self, tmp_path):
        M = np.array([[np.pi, 0.1], [1e-17, 3.0]])
        p1, p2 = tmp_path / "a.mtx", tmp_path / "b.mtx"
        write_matrix_market(p1, M)
        write_matrix_market(p2, M)
        assert p1.read_bytes() == p2.read_bytes()


class TestVectors:
    def test_round_trip(self, tmp_path):
        v = np.array([1.0, -2.5, 1e-300, 7.125])
        path = tmp_path / "v.txt"
        write_vector(path, v)
        assert np.array_equal(read_vector(path), v)

    def test_any_whitespace_layout(self, tmp_path):
        path = write(tmp_path, "w.txt", "1.0 2.0\n3.0\n% comment\n4.0 5.0 6.0\n")
        np.testing.assert_array_equal(read_vector(path), np.arange(1.0, 7.0))

    def test_empty_rejected(self, tmp_path):
        path = write(tmp_path, "e.txt", "% nothing\n")
        with pytest.raises(MatrixMarketError, match="no numeric entries"):
            read_vector(path)

    def test_bad_token_line(self, tmp_path):
        path = write(tmp_path, "b.txt", "1.0\nnope\n")
        with pytest.raises(MatrixMarketError, match=":2: non-numeric"):
            read_vector(path)


class TestTrajectoryCsv:
    def test_header_and_rows(self):
        traj = Trajectory(
            times=np.array([0.0, 0.5]),
            states=np.array([[1.0, 2.0], [3.0, 4.0]]),
            derivative_residuals=np.array([0.0, 1e-12]),
            method="exponential",
        )
        buf = io.StringIO()
        write_trajectory_csv(buf, traj)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "t,u_1,u_2,residual"
        assert lines[1] == "0,1,2,0"
        assert lines[2].startswith("0.5,3,4,")
        assert len(lines) == 3
