import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from qcond import entcalc, qstate
from qcond.entcalc import Partition
from qcond.errors import ArakiLiebViolation, PartitionError, SupportError

AB = Partition(("A",), ("B",))
BA = AB.swapped()



def regularized(rho, eps=entcalc.REGULARIZATION):
    return (1 - eps) * rho.mat + eps * np.eye(rho.dim) / rho.dim


class TestPartition:
    def test_parse(self):
        assert Partition.parse("A|B") == AB
        assert Partition.parse("A,B|C") == Partition(("A", "B"), ("C",))
        assert str(Partition.parse(" C | A , B ")) == "C|A,B"

    @pytest.mark.parametrize("text", ["A", "A|B|C", "|B", "A|A", "A,A|B"])
    def test_bad(self, text):
        with pytest.raises(PartitionError):
            Partition.parse(text)

    def test_unknown_label(self, singlet):
        with pytest.raises(PartitionError):
            entcalc.conditional_entropy(singlet, "A|C")


class TestShannon:
    @pytest.mark.parametrize("p,h", [((0.5, 0.5), 1.0), ((1, 0), 0.0), ((0.25,) * 4, 2.0)])
    def test_values(self, p, h):
        assert entcalc.shannon_entropy(p) == pytest.approx(h, abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
    def test_range(self, seed, n):
        p = np.random.default_rng(seed).dirichlet(np.ones(n))
        h = entcalc.shannon_entropy(p)
        assert -1e-12 <= h <= np.log2(n) + 1e-12


class TestVonNeumann:
    def test_half_identity(self):
        assert entcalc.von_neumann_entropy(qstate.maximally_mixed([("A", 2)])) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("index", range(4))
    def test_pure_is_zero(self, index):
        assert entcalc.von_neumann_entropy(qstate.bell_state(index)) == pytest.approx(0, abs=1e-12)

    def test_diagonal_is_shannon(self, case_one):
        assert entcalc.von_neumann_entropy(case_one) == pytest.approx(2, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_equals_shannon_of_spectrum(self, seed):
        rho = qstate.random_mixed(seed, [2, 3])
        w = np.clip(np.linalg.eigvalsh(rho.mat), 0, None)
        assert entcalc.von_neumann_entropy(rho) == pytest.approx(entcalc.shannon_entropy(w / w.sum()), abs=1e-10)


class TestConditionalMutual:
    def test_singlet(self, singlet):
        assert entcalc.conditional_entropy(singlet, AB) == pytest.approx(-1, abs=1e-12)
        assert entcalc.mutual_entropy(singlet, AB) == pytest.approx(2, abs=1e-12)

    def test_case_two(self, case_two):
        # S(AB) = 1 and S(B) = 1 from the diagonal spectra
        assert entcalc.conditional_entropy(case_two, AB) == pytest.approx(0, abs=1e-12)
        assert entcalc.mutual_entropy(case_two, AB) == pytest.approx(1, abs=1e-12)

    def test_case_one(self, case_one):
        assert entcalc.conditional_entropy(case_one, AB) == pytest.approx(1, abs=1e-12)
        assert entcalc.mutual_entropy(case_one, AB) == pytest.approx(0, abs=1e-12)

    def test_subset_partition_reduces_first(self, ghz):
        assert entcalc.conditional_entropy(ghz, "A|B") == pytest.approx(0, abs=1e-12)
        assert entcalc.conditional_entropy(ghz, "C|A,B") == pytest.approx(-1, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 6))
    def test_conservation_and_symmetry(self, seed, rank):
        rho = qstate.random_mixed(seed, [("A", 2), ("B", 3)], rank=rank)
        s_a = entcalc.subsystem_entropy(rho, ["A"])
        assert entcalc.conditional_entropy(rho, AB) + entcalc.mutual_entropy(rho, AB) == pytest.approx(s_a, abs=1e-8)
        assert entcalc.mutual_entropy(rho, AB) == pytest.approx(entcalc.mutual_entropy(rho, BA), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), da=st.integers(2, 3), db=st.integers(2, 3))
    def test_diagonal_reduces_to_classical(self, seed, da, db):
        rng = np.random.default_rng(seed)
        p = rng.dirichlet(np.ones(da * db)).reshape(da, db)
        p[rng.random(p.shape) < 0.3] = 0
        p /= p.sum()
        rho = qstate.DensityMatrix([("A", da), ("B", db)], np.diag(p.ravel()))
        assert entcalc.conditional_entropy(rho, AB) == pytest.approx(entcalc.classical_conditional_entropy(p), abs=1e-9)
        assert entcalc.mutual_entropy(rho, AB) == pytest.approx(entcalc.classical_mutual_entropy(p), abs=1e-9)


class TestConditionalAmplitude:
    def test_singlet_matrix(self, singlet):
        amp = entcalc.conditional_amplitude(singlet, AB)
        expected = np.array([[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]])
        assert amp.method == "commuting"
        assert amp.kind == "conditional"
        np.testing.assert_allclose(amp.mat, expected, atol=1e-12)
        np.testing.assert_allclose(amp.eigenvalues(), [0, 0, 0, 2], atol=1e-12)
        np.testing.assert_allclose(amp.unclassical_eigenvalues(), [2])

    def test_product_state(self):
        ra = qstate.random_mixed(3, [("A", 2)])
        rb = qstate.classical_mixture([0.7, 0.3, 0.0], ["0", "1", "2"], [("B", 3)])
        rho = qstate.product_state([ra, rb])
        amp = entcalc.conditional_amplitude(rho, AB)
        support_b = np.diag([1.0, 1.0, 0.0])
        np.testing.assert_allclose(amp.mat, np.kron(ra.mat, support_b), atol=1e-12)
        assert amp.eigenvalues().max() <= 1 + 1e-7

    def test_noncommuting_uses_exp_log(self):
        rho = qstate.random_mixed(11)
        amp = entcalc.conditional_amplitude(rho, AB)
        assert amp.method == "exp-log"
        # independent route: scipy logm/expm on the same regularized operands
        reg = regularized(rho)
        sigma = np.kron(np.eye(2), reg.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2))
        oracle = sla.expm(sla.logm(reg) - sla.logm(sigma))
        np.testing.assert_allclose(amp.mat, oracle, atol=1e-9)

    def test_swapped_partition_on_joint_order(self):
        rho = qstate.random_mixed(4, [("A", 2), ("B", 3)])
        amp = entcalc.conditional_amplitude(rho, BA)
        reg = regularized(rho)
        rho_a = reg.reshape(2, 3, 2, 3).trace(axis1=1, axis2=3)
        oracle = sla.expm(sla.logm(reg) - sla.logm(np.kron(rho_a, np.eye(3))))
        np.testing.assert_allclose(amp.mat, oracle, atol=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
    def test_positive_hermitian(self, seed, rank):
        rho = qstate.random_mixed(seed, rank=rank)
        for amp in (entcalc.conditional_amplitude(rho, AB), entcalc.mutual_amplitude(rho, AB)):
            np.testing.assert_allclose(amp.mat, amp.mat.conj().T, atol=1e-8 * 4)
            assert amp.eigenvalues().min() >= -1e-7

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_local_unitary_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        rho = qstate.random_mixed(rng)
        u = np.kron(qstate.random_unitary(2, rng), qstate.random_unitary(2, rng))
        w1 = entcalc.conditional_amplitude(rho, AB).eigenvalues()
        w2 = entcalc.conditional_amplitude(qstate.transform(rho, u), AB).eigenvalues()
        np.testing.assert_allclose(np.sort(w1), np.sort(w2), atol=1e-7)


class TestMutualAmplitude:
    def test_product_gives_support_projector(self):
        rho = qstate.product_state([qstate.random_mixed(1, [("A", 2)]), qstate.random_mixed(2, [("B", 2)])])
        amp = entcalc.mutual_amplitude(rho, AB)
        assert amp.method == "commuting"
        np.testing.assert_allclose(amp.mat, np.eye(4), atol=1e-12)

    def test_case_two_classical_reduction(self, case_two):
        # p_i p_j / p_ij = (1/2)(1/2)/(1/2) = 1/2 on |00>, |11>; zero off support
        amp = entcalc.mutual_amplitude(case_two, AB)
        np.testing.assert_allclose(amp.mat, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_singlet_entropy(self, singlet):
        amp = entcalc.mutual_amplitude(singlet, AB)
        assert entcalc.entropy_via_operator(singlet, amp) == pytest.approx(2, abs=1e-12)

    def test_singlet_against_regularized_brute_force(self, singlet):
        # high-precision logm/expm; double-precision Pade loses ~1e-6 here
        mp = pytest.importorskip("mpmath")
        with mp.workdps(40):
            reg = mp.matrix(regularized(singlet).real.tolist())
            marg = [[reg[0, 0] + reg[2, 2], reg[0, 1] + reg[2, 3]],
                    [reg[1, 0] + reg[3, 2], reg[1, 1] + reg[3, 3]]]
            prod = mp.matrix(np.kron(np.array(marg, dtype=object), np.array(marg, dtype=object)).tolist())
            brute = mp.expm(mp.logm(prod) - mp.logm(reg))
            rho = mp.matrix(singlet.mat.real.tolist())
            value = -sum((rho * mp.logm(brute))[i, i] for i in range(4)) / mp.log(2)
        assert float(mp.re(value)) == pytest.approx(2, abs=1e-6)


class TestEntropyViaOperator:
    def test_singlet(self, singlet):
        amp = entcalc.conditional_amplitude(singlet, AB)
        assert entcalc.entropy_via_operator(singlet, amp) == pytest.approx(-1, abs=1e-12)

    def test_product_full_rank(self):
        ra = qstate.random_mixed(5, [("A", 2)])
        rho = qstate.product_state([ra, qstate.random_mixed(6, [("B", 2)])])
        amp = entcalc.conditional_amplitude(rho, AB)
        assert entcalc.entropy_via_operator(rho, amp) == pytest.approx(entcalc.von_neumann_entropy(ra), abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_matches_identity_on_full_rank(self, seed):
        rho = qstate.random_mixed(seed, [("A", 2), ("B", 3)])
        for part in (AB, BA):
            cond = entcalc.entropy_via_operator(rho, entcalc.conditional_amplitude(rho, part))
            assert cond == pytest.approx(entcalc.conditional_entropy(rho, part), abs=1e-6)
        mut = entcalc.entropy_via_operator(rho, entcalc.mutual_amplitude(rho, AB))
        assert mut == pytest.approx(entcalc.mutual_entropy(rho, AB), abs=1e-6)

    def test_support_error(self, singlet, case_two):
        amp = entcalc.conditional_amplitude(singlet, AB)
        with pytest.raises(SupportError):
            entcalc.entropy_via_operator(case_two, amp)


class TestTrotter:
    def test_commuting_is_exact(self, case_two, singlet):
        for rho in (case_two, singlet, qstate.product_state([qstate.random_mixed(1, [("A", 2)]),
                                                              qstate.random_mixed(2, [("B", 2)])])):
            steps = entcalc.trotter_sequence(rho, AB, [1, 2, 4])
            assert steps[0].distance <= 1e-12

    def test_singlet_converges_to_regularized_closed_form(self, singlet):
        step = entcalc.trotter_sequence(singlet, AB, [256])[0]
        reg = regularized(singlet)
        closed = reg @ np.linalg.inv(np.kron(np.eye(2), reg.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)))
        np.testing.assert_allclose(step.matrix, closed, atol=1e-4)

    def test_finite_n_matches_fractional_powers(self):
        rho = qstate.random_mixed(8)
        reg = regularized(rho)
        sigma = np.kron(np.eye(2), reg.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2))
        for step in entcalc.trotter_sequence(rho, AB, [1, 3, 16]):
            n = step.n
            f = sla.fractional_matrix_power(reg, 1 / n) @ sla.fractional_matrix_power(sigma, -1 / n)
            np.testing.assert_allclose(step.matrix, np.linalg.matrix_power(f, n), atol=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    def test_converges(self, seed):
        rho = qstate.random_mixed(100 + seed)
        d = [s.distance for s in entcalc.trotter_sequence(rho, AB)]
        assert d[-1] < d[0]
        for a, b in zip(d[2:], d[3:]):
            assert b <= 1.1 * a

    def test_mutual_kind(self):
        rho = qstate.random_mixed(9)
        d = [s.distance for s in entcalc.trotter_sequence(rho, AB, [1, 256], kind="mutual")]
        assert d[1] < d[0]

    def test_bad_n(self, singlet):
        with pytest.raises(ValueError):
            entcalc.trotter_sequence(singlet, AB, [0])
        with pytest.raises(ValueError):
            entcalc.trotter_sequence(singlet, AB, [2**21])


class TestDiagrams:
    def test_three_cases(self, case_one, case_two, singlet):
        for rho, triple in ((case_one, (1, 0, 1)), (case_two, (0, 1, 0)), (singlet, (-1, 2, -1))):
            np.testing.assert_allclose(entcalc.bipartite_diagram(rho, AB).triple, triple, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
    def test_invariants(self, seed, rank):
        d = entcalc.bipartite_diagram(qstate.random_mixed(seed, rank=rank), AB)
        assert d.s_a == pytest.approx(d.s_a_given_b + d.s_mutual, abs=1e-8)
        assert d.s_b == pytest.approx(d.s_b_given_a + d.s_mutual, abs=1e-8)
        assert d.s_ab == pytest.approx(d.s_a_given_b + d.s_mutual + d.s_b_given_a, abs=1e-8)

    def test_ternary_ghz(self, ghz):
        t = entcalc.ternary_diagram(ghz)
        np.testing.assert_allclose(t.conditionals, (-1, -1, -1), atol=1e-12)
        np.testing.assert_allclose(t.conditional_mutuals, (1, 1, 1), atol=1e-12)
        assert t.center == pytest.approx(0, abs=1e-12)
        assert t.entropy("A", "B") + t.conditionals[2] == pytest.approx(0, abs=1e-12)
        assert entcalc.ternary_mutual_entropy(ghz) == pytest.approx(0, abs=1e-12)

    def test_ternary_independent(self):
        rho = qstate.maximally_mixed(qstate.SystemShape.qubits("ABC"))
        t = entcalc.ternary_diagram(rho)
        np.testing.assert_allclose(t.conditionals, (1, 1, 1), atol=1e-12)
        np.testing.assert_allclose(t.conditional_mutuals, (0, 0, 0), atol=1e-12)
        assert t.center == pytest.approx(0, abs=1e-12)

    def test_ternary_classical_correlation(self):
        rho = qstate.classical_mixture([0.5, 0.5], ["000", "111"], qstate.SystemShape.qubits("ABC"))
        assert entcalc.ternary_mutual_entropy(rho) == pytest.approx(1, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 8))
    def test_ternary_invariants(self, seed, rank):
        rho = qstate.random_mixed(seed, qstate.SystemShape.qubits("ABC"), rank=rank)
        t = entcalc.ternary_diagram(rho)
        c_a, c_b, c_c = t.conditionals
        m_ab, m_ac, m_bc = t.conditional_mutuals
        assert c_a + m_ab + m_ac + t.center == pytest.approx(t.entropy("A"), abs=1e-8)
        assert c_b + m_ab + m_bc + t.center == pytest.approx(t.entropy("B"), abs=1e-8)
        assert c_c + m_ac + m_bc + t.center == pytest.approx(t.entropy("C"), abs=1e-8)
        total = sum(t.conditionals) + sum(t.conditional_mutuals) + t.center
        assert total == pytest.approx(t.entropy("A", "B", "C"), abs=1e-8)

    def test_ternary_label_errors(self, singlet, ghz):
        with pytest.raises(PartitionError):
            entcalc.ternary_diagram(singlet)
        with pytest.raises(PartitionError):
            entcalc.ternary_mutual_entropy(ghz, ("A", "B", "D"))


class TestBoundsAndWitness:
    def test_singlet(self, singlet):
        rep = entcalc.check_bounds(singlet, AB)
        assert rep.classical_mutual_bound_violated
        assert rep.araki_lieb_satisfied and rep.araki_lieb_saturated
        assert rep.negative_conditional == (True, True)
        w = entcalc.entanglement_witness(singlet, AB)
        assert w.witnessed and w.verdict == "entangled"

    def test_case_two(self, case_two):
        rep = entcalc.check_bounds(case_two, AB)
        assert not rep.classical_mutual_bound_violated
        assert rep.negative_conditional == (False, False)
        assert entcalc.entanglement_witness(case_two, AB).verdict == "inconclusive"

    def test_product_inconclusive(self, case_one):
        assert not entcalc.entanglement_witness(case_one, AB).witnessed

    def test_araki_lieb_fault_is_raised(self, monkeypatch, case_two):
        fake = entcalc.EntropyDiagram(-2.0, 3.0, -2.0, 1.0, 1.0, -1.0)
        monkeypatch.setattr(entcalc, "bipartite_diagram", lambda rho, part: fake)
        with pytest.raises(ArakiLiebViolation):
            entcalc.check_bounds(case_two, AB)

    @pytest.mark.parametrize("seed", range(20))
    def test_separable_never_witnessed(self, seed):
        rho = qstate.random_separable(seed, terms=1 + seed % 5, shape=[("A", 2), ("B", 3)])
        rep = entcalc.check_bounds(rho, AB)
        assert rep.negative_conditional == (False, False)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0.01, 0.99))
    def test_concavity(self, seed, lam):
        rng = np.random.default_rng(seed)
        r1 = qstate.random_mixed(rng, rank=rng.integers(1, 5))
        r2 = qstate.random_mixed(rng, rank=rng.integers(1, 5))
        mix = qstate.DensityMatrix(r1.shape, lam * r1.mat + (1 - lam) * r2.mat)
        lhs = entcalc.conditional_entropy(mix, AB)
        rhs = lam * entcalc.conditional_entropy(r1, AB) + (1 - lam) * entcalc.conditional_entropy(r2, AB)
        assert lhs >= rhs - 1e-7
