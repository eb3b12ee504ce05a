# instanton/test/test_hyperweb.py
import numpy as np
import pytest

from instanton.core.exceptions import NonInjectiveTau, ParameterError, RankMismatch, ShapeMismatch, SingularG
from instanton.core.field import make_rng
from instanton.services.hyperweb import (
    Decomposition, Hyperweb, block_decompose, direct_sum, gl_act, rank_and_kernel, reassemble, restrict,
    standard_omega, symplectic_quotient
)


class TestHyperwebValues:
    """Construction and equality"""

    def test_standard_omega_is_invertible(self, field):
        """The standard charge-1 form is invertible with the expected signs"""
        omega = standard_omega(field)
        assert field.is_invertible(omega.matrix)
        assert omega.matrix[0, 2] == 1 and omega.matrix[2, 0] == field.p - 1

    def test_equality_by_coefficients(self, field, rng):
        """Hyperwebs compare by coefficient table"""
        A = Hyperweb.random(field, 3, rng)
        assert A == Hyperweb.from_matrix(field, A.matrix)
        assert A != Hyperweb.zero(field, 3)

    def test_direct_sum_rank_adds(self, field):
        """Ranks and kernels add under direct sum"""
        omega = standard_omega(field)
        total = direct_sum(omega, Hyperweb.zero(field, 1))
        assert total.N == 2
        rank, kernel = rank_and_kernel(total)
        assert rank == 4
        assert kernel.shape == (8, 4)


class TestSymplecticQuotient:
    """W_A and q_A"""

    def test_quotient_reproduces_hyperweb(self, field, vacuous_hyperwebs):
        """c^T q_A c = A with q_A invertible"""
        A = vacuous_hyperwebs[(3, 2)][0]
        quotient = symplectic_quotient(A, 2)
        assert quotient.W_dim == 12
        assert field.is_invertible(quotient.q)
        assert np.array_equal(field.congruence(quotient.q, quotient.c), A.matrix)
        assert quotient.kernel_basis.shape == (16, 4)

    def test_rank_mismatch(self, field, vacuous_hyperwebs):
        """A wrong r reports found and required ranks"""
        A = vacuous_hyperwebs[(2, 1)][0]
        with pytest.raises(RankMismatch) as exc_info:
            symplectic_quotient(A, 2)
        assert exc_info.value.found == 8
        assert exc_info.value.required == 10

    def test_negative_r_rejected(self, field):
        """r must be nonnegative"""
        with pytest.raises(ParameterError):
            symplectic_quotient(standard_omega(field), -1)


class TestRestrictionAndAction:
    """tau-restriction and the GL(H) action"""

    def test_restrict_to_coordinates(self, field, rng):
        """Restricting to coordinates picks the matching blocks"""
        A = Hyperweb.random(field, 3, rng)
        tau = field.identity(3)[:, [0, 2]]
        restricted = restrict(A, tau)
        assert restricted.N == 2
        assert np.array_equal(restricted.matrix, A.matrix[np.ix_([*range(4), *range(8, 12)], [*range(4), *range(8, 12)])])

    def test_restrict_composes(self, field, rng):
        """Restriction along tau then sigma is restriction along tau sigma"""
        A = Hyperweb.random(field, 4, rng)
        tau = field.random_injection(rng, 4, 3)
        sigma = field.random_injection(rng, 3, 2)
        assert restrict(restrict(A, tau), sigma) == restrict(A, field.matmul(tau, sigma))

    def test_non_injective_tau(self, field, rng):
        """tau must be injective"""
        A = Hyperweb.random(field, 3, rng)
        with pytest.raises(NonInjectiveTau):
            restrict(A, field.reduce([[1, 2], [1, 2], [1, 2]]))

    def test_tau_shape_mismatch(self, field, rng):
        """tau must have N rows"""
        with pytest.raises(ShapeMismatch):
            restrict(Hyperweb.random(field, 3, rng), field.identity(2))

    def test_gl_act_is_a_right_action(self, field, rng):
        """gl_act(gl_act(A, g), h) = gl_act(A, gh)"""
        A = Hyperweb.random(field, 3, rng)
        g = field.random_invertible(rng, 3)
        h = field.random_invertible(rng, 3)
        assert gl_act(gl_act(A, g), h) == gl_act(A, field.matmul(g, h))

    def test_gl_act_preserves_rank(self, field, vacuous_hyperwebs):
        """The action preserves the rank of A"""
        A = vacuous_hyperwebs[(4, 3)][0]
        g = field.random_invertible(make_rng(3), A.N)
        assert field.rank(gl_act(A, g).matrix) == field.rank(A.matrix)

    def test_singular_g(self, field, rng):
        """Singular group elements are rejected"""
        with pytest.raises(SingularG):
            gl_act(Hyperweb.random(field, 2, rng), field.reduce([[1, 1], [1, 1]]))


class TestBlockDecomposition:
    """Blocks (A_1, A_2, A_3) along H_N = i(H_n) + complement"""

    def test_identity_decomposition_reads_blocks(self, field, rng):
        """The identity decomposition reads the blocks of A in place"""
        A = Hyperweb.random(field, 3, rng)
        blocks = block_decompose(A, Decomposition.identity(field, 3, 2))
        assert np.array_equal(blocks.B.matrix, A.matrix[:8, :8])
        assert np.array_equal(blocks.C_matrix, A.matrix[:8, 8:])
        assert np.array_equal(blocks.A3.matrix, A.matrix[8:, 8:])

    def test_reassemble_inverts_decompose(self, field, rng):
        """reassemble inverts block_decompose"""
        A = Hyperweb.random(field, 4, rng)
        xi = Decomposition.random(field, 4, 2, rng)
        assert reassemble(block_decompose(A, xi), xi) == A

    def test_transport_matches_action(self, field, rng):
        """Transported decompositions see the same blocks"""
        A = Hyperweb.random(field, 3, rng)
        xi = Decomposition.random(field, 3, 1, rng)
        g = field.random_invertible(rng, 3)
        before = block_decompose(A, xi)
        after = block_decompose(gl_act(A, g), xi.transport(g))
        assert before.B == after.B
        assert before.A3 == after.A3
        assert np.array_equal(before.C, after.C)

    def test_decomposition_size_checked(self, field):
        """The leading block cannot exceed the charge"""
        with pytest.raises(ShapeMismatch):
            Decomposition(field, field.identity(3), 4)
