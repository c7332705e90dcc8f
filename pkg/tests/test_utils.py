import pytest

from hetnet_structure.utils import listify, natural_key, parse_grid


def test_listify():
    assert listify(1) == [1]
    assert listify((1, 2)) == [1, 2]
    assert listify([3]) == [3]


@pytest.mark.parametrize(
    "text,expected",
    [
        ("0:0.06:0.02", (0.0, 0.02, 0.04, 0.06)),
        ("0:0.16:0.02", tuple(round(0.02 * k, 12) for k in range(9))),
        ("0:0.03:0.005", (0.0, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03)),
        ("0.1:0.1:0.5", (0.1,)),
        ("0.005,0.01", (0.005, 0.01)),
        ([0, 0.5], (0.0, 0.5)),
    ],
)
def test_parse_grid(text, expected):
    assert parse_grid(text) == expected


@pytest.mark.parametrize("text", ["0:1", "0:1:0", "1:0:0.1", "", "0:1:-1"])
def test_parse_grid_bad(text):
    with pytest.raises(ValueError):
        parse_grid(text)


def test_natural_key():
    labels = ["w10", "w2", "e1", "w1", "conference11", "conference2"]
    assert sorted(labels, key=natural_key) == [
        "conference2",
        "conference11",
        "e1",
        "w1",
        "w2",
        "w10",
    ]
