"""
Tests for the coupled-frame chain representation.
"""

import numpy as np
import pytest

from domain_relaxation.physics import DomainPair, ReservoirSpec
from domain_relaxation.solvers import observables, rhs
from domain_relaxation.solvers.sector_frame import (
    OBSERVABLE_SECTOR_OFFSET,
    SectorFrame,
    chain_element_count,
    sector_frame
)


class TestLayout:
    """Tests for chain bookkeeping."""

    def test_two_spins(self):
        """Test chains (0,0), (1,0) and (1,1) for two spin-1/2 domains."""
        frame = sector_frame(1, 1)
        assert set(frame.chains) == {(0, 0), (2, 0), (2, 2)}
        assert frame.size == 5 == chain_element_count(1, 1)
        assert frame.is_complete

    def test_element_counts(self):
        """Test element counts with and without an offset cutoff."""
        assert chain_element_count(10, 10) == 506
        assert chain_element_count(100, 100) == 348551
        assert chain_element_count(100, 100, OBSERVABLE_SECTOR_OFFSET) == 30002

    def test_truncated_frame(self):
        """Test that a cutoff below the sector spread drops chains."""
        frame = sector_frame(4, 4, 2)
        assert not frame.is_complete
        assert all(two_J - two_Jp <= 4 for two_J, two_Jp in frame.chains)
        assert sector_frame(4, 1, 2).is_complete


class TestConversions:
    """Tests for block to chain conversions."""

    def test_round_trip(self, random_blocked_state):
        """Test blocks -> chains -> blocks on a complete frame."""
        rho = random_blocked_state(DomainPair.of(3, 2))
        frame = sector_frame(3, 2)
        blocks = frame.to_blocks(frame.to_chains(rho.blocks))
        for two_M, block in rho.blocks.items():
            np.testing.assert_allclose(blocks[two_M], block, atol=1e-12)

    def test_truncated_frame_cannot_reconstruct(self, random_blocked_state):
        """Test that a truncated frame refuses to rebuild blocks."""
        rho = random_blocked_state(DomainPair.of(4, 4))
        frame = sector_frame(4, 4, 2)
        with pytest.raises(ValueError):
            frame.to_blocks(frame.to_chains(rho.blocks))


class TestGenerator:
    """Tests for the chain generator."""

    @pytest.mark.parametrize("n1,n2", [(1, 1), (2, 1), (3, 2), (4, 4)])
    @pytest.mark.parametrize("temperature_mk", [0.0, 400.0])
    def test_matches_block_generator(self, n1, n2, temperature_mk, random_blocked_state):
        """Test that the chain generator is the rotated block generator."""
        reservoir = ReservoirSpec.from_millikelvin(temperature_mk)
        rho = random_blocked_state(DomainPair.of(n1, n2))
        frame = sector_frame(n1, n2)
        expected = frame.to_chains(rhs(rho, reservoir).blocks) / reservoir.damping_rate
        actual = frame.generator(reservoir) @ frame.to_chains(rho.blocks)
        np.testing.assert_allclose(actual, expected, atol=1e-10)

    def test_trace_preserved(self, warm_reservoir):
        """Test that the generator conserves the trace."""
        frame = sector_frame(3, 3)
        trace = frame.observable_weights()["trace"]
        np.testing.assert_allclose(trace @ frame.generator(warm_reservoir).toarray(), 0.0, atol=1e-12)


class TestObservableWeights:
    """Tests for observable weight vectors."""

    @pytest.mark.parametrize("n1,n2", [(2, 1), (3, 3), (5, 2)])
    def test_match_block_observables(self, n1, n2, random_blocked_state):
        """Test w . y against expectation values computed on blocks."""
        rho = random_blocked_state(DomainPair.of(n1, n2), seed=11)
        frame = sector_frame(n1, n2)
        y = frame.to_chains(rho.blocks)
        expected = observables(rho).as_dict()
        for name, weights in frame.observable_weights().items():
            assert weights @ y == pytest.approx(expected[name], abs=1e-10)

    def test_truncated_frame_keeps_observables(self, random_blocked_state):
        """Test that dropped chains carry no observable weight."""
        rho = random_blocked_state(DomainPair.of(5, 5), seed=3)
        frame = SectorFrame(DomainPair.of(5, 5), OBSERVABLE_SECTOR_OFFSET)
        y = frame.to_chains(rho.blocks)
        expected = observables(rho).as_dict()
        for name, weights in frame.observable_weights().items():
            assert weights @ y == pytest.approx(expected[name], abs=1e-10)

    def test_coherence_of_product_state(self):
        """Test that a product state carries cross-sector coherence."""
        frame = sector_frame(1, 1)
        blocks = {2: np.zeros((1, 1)), 0: np.array([[1.0, 0.0], [0.0, 0.0]]), -2: np.zeros((1, 1))}
        assert frame.max_coherence(frame.to_chains(blocks)) == pytest.approx(0.5)
