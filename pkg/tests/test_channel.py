import numpy as np
import pytest

from beamsparse.channel import (
    LOS,
    NLOS,
    ChannelMatrix,
    ChannelProfile,
    generate_channel,
    load_channel,
    ls_channel_estimate,
    save_channel,
    steering_vector,
    to_antenna,
    to_beamspace,
    top_k_energy_fraction,
    unitary_pilots,
)
from beamsparse.exceptions import DomainError, PilotError, PlacementError

from conftest import crandn
from oracles import dft_direct


def test_single_broadside_path_is_one_beam():
    profile = ChannelProfile("LoS", paths_per_user=1, sector_deg=0.0)
    H = generate_channel(64, 1, profile, seed=3)
    col = H.data[:, 0]
    np.testing.assert_allclose(np.abs(col), np.ones(64), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(col), 8.0)
    beams = to_beamspace(H).data[:, 0]
    assert np.sum(np.abs(beams[1:]) ** 2) < 1e-20


def test_steering_vector_broadside():
    np.testing.assert_allclose(steering_vector(8, 0.0), np.ones(8))


def test_deterministic_given_seed():
    a = generate_channel(32, 4, LOS, seed=11)
    b = generate_channel(32, 4, LOS, seed=11)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, generate_channel(32, 4, LOS, seed=12).data)


def test_energy_normalization():
    power = np.concatenate(
        [np.sum(np.abs(generate_channel(64, 10, prof, seed=s).data) ** 2, axis=0)
         for s in range(100) for prof in (LOS,)]
    )
    assert power.size == 1000
    assert abs(power.mean() - 64) <= 0.05 * 64


def test_nlos_energy_normalization():
    power = np.concatenate(
        [np.sum(np.abs(generate_channel(64, 10, NLOS, seed=s).data) ** 2, axis=0) for s in range(100)]
    )
    assert abs(power.mean() - 64) <= 0.05 * 64


def test_los_beamspace_sparsity():
    # thresholds frozen from a measurement over these seeds: mean 0.981, min 0.943
    frac = np.concatenate(
        [top_k_energy_fraction(to_beamspace(generate_channel(128, 16, LOS, seed=s)).data, 16)
         for s in range(100)]
    )
    assert frac.mean() >= 0.97
    assert frac.min() >= 0.94


def test_los_sparser_than_nlos():
    for K in (4, 8, 16, 32):
        los = np.mean([top_k_energy_fraction(to_beamspace(generate_channel(128, 16, LOS, seed=s)).data, K)
                       for s in range(100)])
        nlos = np.mean([top_k_energy_fraction(to_beamspace(generate_channel(128, 16, NLOS, seed=s)).data, K)
                        for s in range(100)])
        assert los > nlos


def test_los_dominant_path_constraint():
    powers = LOS.path_powers()
    assert powers.sum() == pytest.approx(1.0)
    assert powers[0] >= powers[1:].sum()


def test_user_separation():
    H = generate_channel(128, 16, LOS, seed=5)
    angles = np.sort(np.rad2deg(H.user_angles))
    assert np.all(np.diff(angles) >= 1.0 - 1e-9)
    assert np.all(np.abs(angles) <= 60.0 + 1e-9)
    assert np.all((H.user_distances >= 10) & (H.user_distances <= 110))


def test_infeasible_placement():
    profile = ChannelProfile("LoS", sector_deg=10.0, min_separation_deg=2.0)
    with pytest.raises(PlacementError):
        generate_channel(64, 8, profile, seed=0)


class TestDomains:
    def test_dc_column(self):
        H = to_beamspace(ChannelMatrix(np.ones((4, 1)), "antenna"))
        assert H.domain == "beamspace"
        np.testing.assert_allclose(H.data[:, 0], [2, 0, 0, 0], atol=1e-15)

    def test_round_trip(self, rng):
        H_bar = ChannelMatrix(crandn(rng, 32, 4), "antenna")
        back = to_antenna(to_beamspace(H_bar))
        np.testing.assert_allclose(back.data, H_bar.data, atol=1e-12)

    def test_frobenius_norm_and_direct_dft(self, rng):
        H_bar = crandn(rng, 64, 6)
        H = to_beamspace(H_bar).data
        np.testing.assert_allclose(H, dft_direct(64) @ H_bar, atol=1e-12)
        assert abs(np.linalg.norm(H) - np.linalg.norm(H_bar)) <= 1e-12 * np.linalg.norm(H_bar)

    def test_wrong_domain(self, rng):
        with pytest.raises(DomainError):
            to_beamspace(ChannelMatrix(crandn(rng, 8, 2), "beamspace"))
        with pytest.raises(DomainError):
            to_antenna(ChannelMatrix(crandn(rng, 8, 2), "antenna"))

    def test_rejects_more_users_than_antennas(self, rng):
        with pytest.raises(ValueError):
            ChannelMatrix(crandn(rng, 2, 4))

    def test_immutable(self, rng):
        H = ChannelMatrix(crandn(rng, 4, 2))
        with pytest.raises(ValueError):
            H.data[0, 0] = 1.0


class TestLsEstimate:
    def test_noiseless_exact(self, rng):
        H = crandn(rng, 32, 4)
        P = unitary_pilots(4)
        np.testing.assert_allclose(ls_channel_estimate(H @ P, P).data, H, atol=1e-12)

    def test_identity_pilots(self, rng):
        Y = crandn(rng, 16, 3)
        np.testing.assert_allclose(ls_channel_estimate(Y, np.eye(3)).data, Y)

    def test_non_unitary_pilots(self, rng):
        with pytest.raises(PilotError):
            ls_channel_estimate(crandn(rng, 8, 2), 2 * np.eye(2))

    def test_noisy_error_variance(self, rng):
        # unitary pilots keep the noise white: E||H_hat - H||^2 = U B N0
        B, U, N0 = 16, 4, 0.1
        P = unitary_pilots(U)
        H = crandn(rng, B, U)
        err = [np.sum(np.abs(ls_channel_estimate(H @ P + np.sqrt(N0) * crandn(rng, B, U), P).data - H) ** 2)
               for _ in range(1000)]
        assert np.mean(err) == pytest.approx(U * B * N0, rel=0.10)


class TestChannelFile:
    def test_round_trip(self, tmp_path, rng):
        H = ChannelMatrix(crandn(rng, 8, 3), "beamspace")
        path = tmp_path / "h.txt"
        save_channel(path, H)
        lines = path.read_text().splitlines()
        assert lines[0] == "8 3 beamspace"
        assert len(lines) == 9
        loaded = load_channel(path)
        assert loaded.domain == "beamspace"
        np.testing.assert_array_equal(loaded.data, H.data)

    def test_hand_written_file(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("2 1 antenna\n1.000000000:0.000000000\n0.500000000:-2.250000000\n")
        H = load_channel(path)
        np.testing.assert_array_equal(H.data, [[1 + 0j], [0.5 - 2.25j]])

    @pytest.mark.parametrize(
        "text",
        [
            "2 1 antenna\n1:0\n",                # too few rows
            "2 2 antenna\n1:0 2:0\n3:0\n",       # short row
            "1 1 sideways\n1:0\n",               # bad domain
            "1 1 antenna\nnan:0\n",              # non-finite
            "1 1 antenna\n1.0\n",                # missing imaginary part
        ],
    )
    def test_rejects_malformed(self, tmp_path, text):
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(ValueError):
            load_channel(path)
