#include "fixtures_io.hpp"
#include "oracle.hpp"

#include "c2d4/global.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace c2d4;
using oracle::R;

namespace {

Curve family_f() { return curve_from_roots(-1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)}); }

bool listed(const std::vector<Place>& vs, long p) { return std::find(vs.begin(), vs.end(), Place::prime(p)) != vs.end(); }

}  // namespace

TEST_SUITE("global")
{
    TEST_CASE("bad places")
    {
        auto vs = bad_places(family_f());
        REQUIRE(vs.size() >= 3);
        CHECK(vs[0] == Place::inf());
        CHECK(vs[1] == Place::prime(2));
        CHECK(std::is_sorted(vs.begin(), vs.end()));
        for (long p : {2, 3, 5, 7, 11, 17}) CHECK(listed(vs, p));

        Curve C = family_f();
        C.c = 15;
        auto ws = bad_places(C);
        CHECK(listed(ws, 3));
        CHECK(listed(ws, 5));

        CHECK_THROWS_AS(bad_places(curve_from_roots(1, {R(1), R(-1), R(2), R(-2), R(3), R(-3)})), DegenerateError);
    }

    TEST_CASE("family F report is pinned")
    {
        GlobalReport G = check_conjecture(family_f());
        CHECK(G.E_product == 1);
        CHECK(G.local_verdicts());
        CHECK(G.global_consistent());
        CHECK_FALSE(G.has_issues());
        // Not semistable at 3 and 7, so the report is partial there.
        CHECK_FALSE(G.complete);
        CHECK(G.gaps.size() == 2);
        CHECK_FALSE(G.parity.has_value());
        for (const LocalData& L : G.local)
            if (L.place == Place::prime(2) || L.place.real) CHECK(L.supported);
    }

    TEST_CASE("complete reports are pinned and stable under translation")
    {
        for (const auto& f : fixtures::load("global")) {
            CAPTURE(f.name);
            GlobalReport G = check_conjecture(f.curve);
            REQUIRE(G.complete);
            CHECK(*G.parity == f.expected["parity"].get<int>());
            CHECK(*G.root_number == f.expected["root_number"].get<int>());
            CHECK(G.E_product == 1);
            CHECK(G.global_consistent());
            CHECK(parity_prediction(f.curve) == G.parity);
            for (int b : {1, -2, 5}) {
                GlobalReport H = check_conjecture(mobius_transform(f.curve, Mat2{1, b, 0, 1}));
                if (H.complete) CHECK(*H.parity == *G.parity);
            }
        }
    }

    TEST_CASE("product of E over all places is 1")
    {
        std::mt19937_64 g(71);
        for (int i = 0; i < 100; ++i) {
            Curve C = oracle::random_curve(g);
            int prod = 1;
            for (const Place& v : bad_places(C)) prod *= error_term_E(C, v);
            CHECK(prod == 1);
        }
    }

    TEST_CASE("omitted primes contribute trivially")
    {
        std::mt19937_64 g(73);
        const long candidates[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103};
        for (int i = 0; i < 20; ++i) {
            Curve C = oracle::random_curve(g);
            auto vs = bad_places(C);
            int tested = 0;
            for (long p : candidates) {
                if (tested == 5) break;
                if (listed(vs, p)) continue;
                ++tested;
                LocalData L = local_odd(C, p);
                CAPTURE(p);
                CHECK(L.supported);
                CHECK(L.lambda == 1);
                CHECK(L.w == 1);
                CHECK(L.E == 1);
            }
            CHECK(tested == 5);
        }
    }

    TEST_CASE("local lambda and the parity prediction are model independent")
    {
        std::mt19937_64 g(79);
        int compared = 0, complete = 0;
        for (int i = 0; i < 60; ++i) {
            Curve C = i % 2 ? oracle::random_curve(g, 6) : oracle::good_ordinary_at_2(g);
            std::uniform_int_distribution<int> d(-3, 3);
            Mat2 M = i % 2 ? Mat2{oracle::rand_rat(g, 4, 3), oracle::rand_rat(g, 5, 3), d(g), 1} : Mat2{2 * d(g) + 1, d(g), 0, 1};
            Curve D;
            try {
                if (M.det() == 0) continue;
                D = mobius_transform(C, M);
                if (invariants(D).degenerate()) continue;
            } catch (const DomainError&) {
                continue;
            }
            GlobalReport A = check_conjecture(C), B = check_conjecture(D);
            std::set<Place> vs(A.places.begin(), A.places.end());
            vs.insert(B.places.begin(), B.places.end());
            for (const Place& v : vs) {
                LocalData x = local_data(C, v), y = local_data(D, v);
                if (!x.supported || !y.supported) continue;
                CAPTURE(v.name());
                CHECK(x.lambda == y.lambda);
                CHECK(x.w == y.w);
                ++compared;
            }
            if (A.complete && B.complete) {
                ++complete;
                CHECK(*A.parity == *B.parity);
            }
        }
        CHECK(compared > 100);
        MESSAGE("places compared: " << compared << ", complete pairs: " << complete);
    }

    TEST_CASE("swapping s and t keeps the local data")
    {
        std::mt19937_64 g(81);
        for (int i = 0; i < 30; ++i) {
            Curve C = oracle::random_curve(g, 6), D = C;
            std::swap(D.s, D.t);
            if (invariants(D).degenerate()) continue;
            for (const Place& v : bad_places(C)) {
                LocalData x = local_data(C, v), y = local_data(D, v);
                CHECK(x.E == y.E);
                if (x.supported && y.supported) CHECK(x.lambda == y.lambda);
            }
        }
    }

    TEST_CASE("verdicts hold at every supported place")
    {
        std::mt19937_64 g(83);
        for (int i = 0; i < 40; ++i) {
            GlobalReport G = check_conjecture(oracle::random_curve(g, 6));
            CHECK(G.E_product == 1);
            CHECK(G.local_verdicts());
            CHECK_FALSE(G.has_issues());
            CHECK(G.complete == G.gaps.empty());
        }
    }
}
