from fractions import Fraction

import pytest

from nilcohom import (
    JacobiError,
    LiePresentation,
    abelian_presentation,
    betti,
    center,
    chevalley_eilenberg,
    dual_homotopy_lie,
    lower_central_series,
    nilpotency_class,
    rank_only,
    u_n_presentation,
    upper_tri_model,
    xr_model,
)


class TestUnPresentation:
    def test_basis_order_follows_off_diagonals(self):
        u4 = u_n_presentation(4)
        assert u4.basis == ("X_2_1", "X_3_2", "X_4_3", "X_3_1", "X_4_2", "X_4_1")

    def test_heisenberg_bracket(self):
        u3 = u_n_presentation(3)
        i = u3.basis.index("X_3_2")
        j = u3.basis.index("X_2_1")
        k = u3.basis.index("X_3_1")
        assert u3.bracket_basis(i, j) == {k: Fraction(-1)}
        assert u3.bracket_basis(j, i) == {k: Fraction(1)}

    def test_disjoint_indices_commute(self):
        u4 = u_n_presentation(4)
        i = u4.basis.index("X_2_1")
        j = u4.basis.index("X_4_3")
        assert u4.bracket_basis(i, j) == {}

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            u_n_presentation(1)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_jacobi_holds(self, n):
        u_n_presentation(n)  # construction validates exhaustively

    def test_jacobi_rejects_broken_bracket(self):
        # [e1,e2]=e3, [e1,e3]=e1 breaks Jacobi on (e1,e2,e3)
        with pytest.raises(JacobiError):
            LiePresentation(
                ["e1", "e2", "e3"],
                {(0, 1): {2: 1}, (0, 2): {0: 1}},
            )


class TestCenter:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_triangular_center_is_corner_entry(self, n):
        report = center(u_n_presentation(n))
        assert report.dimension == 1
        assert report.descriptions == (f"X_{n}_1",)

    def test_abelian_center_is_everything(self):
        report = center(abelian_presentation(4))
        assert report.dimension == 4

    @pytest.mark.parametrize("r", range(1, 10))
    def test_xr_dual_center_is_top_generator(self, r):
        L = dual_homotopy_lie(xr_model(r))
        report = center(L)
        assert report.dimension == 1
        assert report.descriptions == (f"X{r}",)

    def test_hidden_center_found_in_combinations(self):
        # basis rotated so the center is not a basis vector: u(3) with
        # Z1 = X_2_1 + X_3_1, Z2 = X_3_2, Z3 = X_3_1 - X_2_1.
        # [Z1, Z2] = X_3_1 = (Z1 + Z3)/2, center spans Z1 + Z3.
        L = LiePresentation(
            ["Z1", "Z2", "Z3"],
            {
                (0, 1): {0: Fraction(1, 2), 2: Fraction(1, 2)},
                (1, 2): {0: Fraction(1, 2), 2: Fraction(1, 2)},
            },
        )
        report = center(L)
        assert report.dimension == 1
        assert report.descriptions == ("Z1 + Z3",)


class TestLowerCentralSeries:
    def test_u3_series(self):
        assert lower_central_series(u_n_presentation(3)) == (3, 1, 0)
        assert nilpotency_class(u_n_presentation(3)) == 2

    def test_abelian_series(self):
        assert lower_central_series(abelian_presentation(5)) == (5, 0)
        assert nilpotency_class(abelian_presentation(5)) == 1

    @pytest.mark.parametrize("n", range(2, 7))
    def test_triangular_class_is_n_minus_one(self, n):
        assert nilpotency_class(u_n_presentation(n)) == n - 1

    def test_non_nilpotent_flagged(self):
        # sl2-style bracket is not nilpotent: [h,e]=2e, [h,f]=-2f, [e,f]=h
        L = LiePresentation(
            ["h", "e", "f"],
            {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}},
        )
        assert not L.is_nilpotent
        with pytest.raises(ValueError):
            chevalley_eilenberg(L)


class TestChevalleyEilenberg:
    def test_u3_differentials(self):
        model = chevalley_eilenberg(u_n_presentation(3))
        sig = model.signature
        assert model.d_of("x_2_1").is_zero()
        assert model.d_of("x_3_2").is_zero()
        from nilcohom import Element

        assert model.d_of("x_3_1") == Element(
            sig, {sig.monomial_of("x_2_1", "x_3_2"): -1}
        )

    def test_abelian_gives_torus(self):
        model = chevalley_eilenberg(abelian_presentation(3))
        assert all(model.d_of(g).is_zero() for g in model.signature.names)

    @pytest.mark.parametrize("n", range(2, 6))
    def test_matches_triangular_model_generator_for_generator(self, n):
        assert chevalley_eilenberg(u_n_presentation(n)) == upper_tri_model(n)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_abelianization_dimension(self, n):
        # b1 = dim L - dim [L,L]; for the triangular family that is n - 1
        model = chevalley_eilenberg(u_n_presentation(n))
        series = lower_central_series(u_n_presentation(n))
        b1 = (
            len(model.signature)
            - rank_only(model.differential_matrix(1))
            - rank_only(model.differential_matrix(0))
        )
        assert b1 == series[0] - series[1] == n - 1


class TestDualHomotopyLie:
    @pytest.mark.parametrize("n", range(2, 6))
    def test_round_trip_on_triangular(self, n):
        L = u_n_presentation(n)
        back = dual_homotopy_lie(chevalley_eilenberg(L))
        assert back.basis == L.basis
        assert back.brackets == L.brackets

    def test_round_trip_starting_from_cdga(self, x5):
        again = chevalley_eilenberg(dual_homotopy_lie(x5))
        assert again == x5

    def test_xr_bracket_table(self, x5):
        L = dual_homotopy_lie(x5)
        names = L.basis
        a, b = names.index("A"), names.index("B")
        x = [names.index(f"X{i}") for i in range(1, 6)]
        assert L.bracket_basis(a, b) == {x[0]: Fraction(-1)}
        for i in range(1, 5):
            assert L.bracket_basis(a, x[i - 1]) == {x[i]: Fraction(-1)}
        assert L.bracket_basis(x[0], x[1]) == {}

    def test_torus_dualizes_to_abelian(self):
        from nilcohom import torus_model

        L = dual_homotopy_lie(torus_model(4))
        assert L.brackets == {}

    def test_degree_metadata_kept(self):
        from nilcohom import degree_shift

        shifted = degree_shift(upper_tri_model(3), 1)
        L = dual_homotopy_lie(shifted)
        assert L.degrees == (3, 3, 5)
        assert center(L).dimension == 1

    def test_rejects_non_quadratic(self):
        from nilcohom import borel_twist

        twisted = borel_twist(xr_model(2), "x2")
        with pytest.raises(ValueError):
            dual_homotopy_lie(twisted)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_betti_of_cochains_counts_cohomology(self, n):
        import math

        assert betti(chevalley_eilenberg(u_n_presentation(n))).total == math.factorial(n)
