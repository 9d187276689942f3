#include "oracle.hpp"

#include "c2d4/identities.hpp"
#include "c2d4/model.hpp"
#include "c2d4/richelot.hpp"

#include <doctest.h>

using namespace c2d4;
using oracle::R;

namespace {

Curve family_f() { return curve_from_roots(-1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)}); }

// Random Mobius matrix avoiding the roots' poles.
Mat2 random_mobius(std::mt19937_64& g)
{
    std::uniform_int_distribution<int> d(-5, 5);
    for (;;) {
        Mat2 M{d(g), d(g), d(g), d(g)};
        if (M.det() != 0) return M;
    }
}

}  // namespace

TEST_SUITE("model")
{
    TEST_CASE("family F invariants")
    {
        InvariantSet I = invariants(family_f());
        CHECK(I.Delta == QuadExt(84));
        CHECK(I.l1 == QuadExt(-12));
        CHECK(I.l2l3 == 64);
        CHECK(I.delta1 == 25);
        CHECK(I.d2d3 == 4096);
        CHECK(I.d2_plus_d3 == 128);
        CHECK(I.eta1 == 8);
        CHECK(I.eta2eta3 == -1100);
        CHECK(I.xi == 10196);
        CHECK(I.dh1 == R(-1, 7));
        CHECK(I.d2e2_plus_d3e3 == 6400);
        auto O = oracle::root_invariants(-1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)});
        CHECK(I.dh2e3_plus_dh3e2 == O.dh2 * O.e3 + O.dh3 * O.e2);
        CHECK(I.dh2e3_plus_dh3e2 == -462000);
    }

    TEST_CASE("invariants agree with the root-level definitions")
    {
        std::mt19937_64 g(21);
        for (int i = 0; i < 200; ++i) {
            std::array<Rat, 6> x;
            Curve C = oracle::random_split_curve(g, x);
            InvariantSet I = invariants(C);
            auto O = oracle::root_invariants(C.c, x);
            CHECK(I.Delta == QuadExt(O.Delta));
            CHECK(I.l1 == QuadExt(O.l1));
            CHECK(I.l2 == QuadExt(O.l2));
            CHECK(I.l3 == QuadExt(O.l3));
            CHECK(I.delta1 == O.d1);
            CHECK(I.d2 == QuadExt(O.d2));
            CHECK(I.d3 == QuadExt(O.d3));
            CHECK(I.eta1 == O.e1);
            CHECK(I.eta2 == QuadExt(O.e2));
            CHECK(I.eta3 == QuadExt(O.e3));
            CHECK(I.xi == O.xi);
            CHECK(I.dh1 == O.dh1);
            CHECK(I.dh2 == QuadExt(O.dh2));
            CHECK(I.dh3 == QuadExt(O.dh3));
            CHECK(I.d2e2_plus_d3e3 == O.d2 * O.e2 + O.d3 * O.e3);
            CHECK(I.dh2e3_plus_dh3e2 == O.dh2 * O.e3 + O.dh3 * O.e2);
        }
    }

    TEST_CASE("invariants are shift invariant and rational on conjugate models")
    {
        std::mt19937_64 g(4);
        for (int i = 0; i < 100; ++i) {
            Curve C = oracle::random_curve(g);
            InvariantSet I = invariants(C), J = invariants(mobius_transform(C, Mat2{1, oracle::rand_rat(g, 9, 4), 0, 1}));
            CHECK(I.xi == J.xi);
            CHECK(I.Delta_sq == J.Delta_sq);
            CHECK(I.dh2e3_plus_dh3e2 == J.dh2e3_plus_dh3e2);
            CHECK(I.d2e2_plus_d3e3 == J.d2e2_plus_d3e3);
            CHECK((I.Delta * I.Delta).is_rational());
            CHECK((I.eta2 * I.eta3).to_rational() == I.eta2eta3);
        }
    }

    TEST_CASE("discriminant and invariant identities")
    {
        std::mt19937_64 g(99);
        for (int i = 0; i < 200; ++i) {
            std::array<Rat, 6> x;
            Curve C = oracle::random_split_curve(g, x);
            for (const auto& c : discriminant_identities(C)) CHECK_MESSAGE(c.holds, c.name);
            for (const auto& c : invariant_identities(C.c, x)) CHECK_MESSAGE(c.holds, c.name);
        }
        for (int i = 0; i < 100; ++i)
            for (const auto& c : discriminant_identities(oracle::random_curve(g))) CHECK_MESSAGE(c.holds, c.name);
    }

    TEST_CASE("dual of the dual is the curve up to scaling")
    {
        std::mt19937_64 g(8);
        for (int i = 0; i < 100; ++i) {
            Curve C = oracle::random_curve(g);
            Curve D = dual_curve(C).curve;
            D.validate();
            Curve E = dual_curve(D).curve;
            CHECK(E.r == C.r);
            CHECK(E.s == C.s);
            CHECK(E.t == C.t);
            // Twist class is preserved: c(C^^) / c(C) is 4 times a square.
            CHECK(is_square(E.c / C.c / 4));
        }
    }

    TEST_CASE("dhat1 square class is Mobius invariant")
    {
        std::mt19937_64 g(13);
        int done = 0;
        while (done < 100) {
            Curve C = oracle::random_curve(g);
            Mat2 M = random_mobius(g);
            Curve D;
            try {
                D = mobius_transform(C, M);
            } catch (const DomainError&) {
                continue;
            }
            InvariantSet J = invariants(D);
            if (J.degenerate()) continue;
            CHECK(is_square(invariants(C).dh1 / J.dh1));
            ++done;
        }
    }

    TEST_CASE("Delta / c under the shift family, inversion and scaling")
    {
        std::mt19937_64 g(17);
        int done = 0;
        while (done < 100) {
            std::array<Rat, 6> x;
            Curve C = center(oracle::random_split_curve(g, x));
            Rat z = (x[0] + x[1]) / 2;
            for (auto& r : x) r -= z;
            Rat q = invariants(C).Delta.to_rational() / C.c;
            Rat t = oracle::rand_rat(g, 6, 5);
            Rat lam = oracle::rand_rat(g, 6, 5);
            if (t == 0 || lam == 0) continue;
            try {
                Curve Ct = mobius_transform(C, shift_matrix(C, t));
                Rat f = (1 + x[0] * t) * (1 + x[0] * t) * (1 - x[0] * t) * (1 - x[0] * t) /
                        ((1 + x[2] * t) * (1 + x[3] * t) * (1 + x[4] * t) * (1 + x[5] * t));
                CHECK(invariants(Ct).Delta.to_rational() / Ct.c == f * q);
                Curve Cl = mobius_transform(C, Mat2{lam, 0, 0, 1});
                CHECK(invariants(Cl).Delta.to_rational() / Cl.c == lam * lam * lam * q);
                Curve Ci = mobius_transform(C, Mat2{0, 1, 1, 0});
                CHECK(invariants(Ci).Delta.to_rational() / Ci.c == q / (x[0] * x[0] * x[2] * x[3] * x[4] * x[5]));
            } catch (const DomainError&) {
                continue;
            }
            ++done;
        }
    }

    TEST_CASE("curve spec round trip")
    {
        std::mt19937_64 g(2);
        for (int i = 0; i < 50; ++i) {
            Curve C = oracle::random_curve(g);
            Curve D = parse_curve(format_curve(C));
            CHECK(D.c == C.c);
            CHECK(D.m == C.m);
            CHECK(D.r == C.r);
            CHECK(D.s == C.s);
            CHECK(D.t == C.t);
        }
        CHECK_THROWS_AS(parse_curve("c = 1\nm = 1\nr = [0, 1]\n"), DomainError);
        CHECK_THROWS_AS(parse_curve("c = 0\nm = 1\nr = [0, -1]\ns = [0, -4]\nt = [0, -9]\n"), DomainError);
        CHECK_THROWS_AS(parse_curve("c = 1\nm = 4\nr = [0, -1]\ns = [0, -4]\nt = [0, -9]\n"), DomainError);
    }

    TEST_CASE("degenerate Delta")
    {
        // Symmetric pairs give Delta = 0.
        Curve C = curve_from_roots(1, {R(1), R(-1), R(2), R(-2), R(3), R(-3)});
        CHECK(invariants(C).Delta_zero);
        CHECK_THROWS_AS(dual_curve(C), DegenerateError);
        CHECK_THROWS_AS(error_term_E(C, Place::prime(3)), DegenerateError);
    }
}
