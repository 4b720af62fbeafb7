import pytest

from medusa.errors import ConfigInvalid
from medusa.frames import write_frames
from medusa.synth import SplitMix64, SynthConfig, generate, same_color_fraction, split_colors


def test_splitmix_reference_values():
    # reference outputs for seed 1234567 from the published algorithm
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_uniform_is_in_unit_interval():
    rng = SplitMix64(3)
    xs = [rng.uniform() for _ in range(1000)]
    assert 0 <= min(xs) and max(xs) < 1


def test_static_dataset():
    ts = generate(SynthConfig(seed=1, grid_side=2, frames=3, dynamics="static"))
    assert len(ts.trajectories) == 4
    assert all(len(set(t.coords)) == 1 and len(t.coords) == 3 for t in ts.trajectories)


def test_same_seed_same_data():
    cfg = SynthConfig(seed=42, grid_side=3, frames=4, dynamics="random_walk")
    assert write_frames(generate(cfg)) == write_frames(generate(cfg))
    assert write_frames(generate(cfg)) != write_frames(generate(SynthConfig(seed=43, grid_side=3, frames=4,
                                                                            dynamics="random_walk")))


def test_segregation_increases_like_neighbours():
    ts = generate(SynthConfig(seed=7, dimension=2, grid_side=4, frames=10))
    before, after = same_color_fraction(ts, 0), same_color_fraction(ts, 9)
    # pinned from the generator: 36/64 of nearest neighbours share a color at the start, 49/64 at the end
    assert (before, after) == (0.5625, 0.765625)


def test_split_colors():
    base = generate(SynthConfig(seed=1, dimension=3, grid_side=6, frames=2, dynamics="static", colors="all_one"))
    split = split_colors(base, 2024)
    reds = sum(t.color == 1 for t in split.trajectories)
    assert (len(split.trajectories), reds) == (216, 109)
    assert [t.coords for t in split.trajectories] == [t.coords for t in base.trajectories]
    assert split_colors(base, 2024) == split


def test_positions_stay_distinct():
    ts = generate(SynthConfig(seed=5, grid_side=3, frames=6, noise=5.0, dynamics="segregation"))
    for i in range(ts.frames):
        coords = [p.coords for p in ts.frame_points(i)]
        assert len(coords) == len(set(coords))


@pytest.mark.parametrize("bad", [dict(grid_side=0), dict(frames=1), dict(dimension=4), dict(dynamics="swirl"),
                                 dict(adhesion={"1-1": float("inf")}), dict(noise=-1)])
def test_invalid_configs(bad):
    with pytest.raises(ConfigInvalid):
        SynthConfig(**bad)


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigInvalid):
        SynthConfig.from_dict({"seed": 1, "colour": "red"})
