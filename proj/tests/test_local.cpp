#include "fixtures_io.hpp"
#include "oracle.hpp"
#include "table_oracle.hpp"

#include "c2d4/localdata.hpp"

#include <doctest.h>

#include <set>

using namespace c2d4;
using oracle::R;

TEST_SUITE("localdata")
{
    TEST_CASE("real table rows")
    {
        auto fx = fixtures::load("real");
        REQUIRE(fx.size() == 9);
        for (const auto& f : fx) {
            CAPTURE(f.name);
            int k = f.expected["row"].get<int>() - 1;
            const auto& o = oracle::kRealTable[k];
            LocalData L = local_real(f.curve);
            REQUIRE(L.supported);
            CHECK(*L.cJ == o.nJ);
            CHECK(*L.cJh == o.nJh);
            CHECK(*L.kernel == o.kernel);
            CHECK(L.mu == o.mu);
            CHECK(L.muh == o.muh);
            CHECK(L.lambda == o.lambda);
            CHECK(L.w == o.w);
            CHECK(L.E == o.E);
        }
    }

    TEST_CASE("real place on random curves")
    {
        std::mt19937_64 g(31);
        for (int i = 0; i < 300; ++i) {
            Curve C = oracle::random_curve(g);
            LocalData L = local_real(C);
            REQUIRE(L.supported);
            CHECK(L.w == 1);
            CHECK(L.verdict());
            long n = L.cJ->get_si(), k = L.kernel->get_si();
            CHECK((n == 1 || n == 2 || n == 4));
            CHECK((k == 1 || k == 2 || k == 4));
            // Component count of the sextic's real locus matches the sign pattern.
            RealArrangement A = real_arrangement(C);
            CHECK(A.order.size() % 2 == 0);
            CHECK(L.mu == (A.components == 0 ? -1 : 1));
        }
    }

    TEST_CASE("odd table fixtures agree with the transcribed table")
    {
        auto fx = fixtures::load("odd");
        REQUIRE(fx.size() > 100);
        std::set<std::string> rows;
        for (const auto& f : fx) {
            CAPTURE(f.name);
            Int p = f.expected["place"].get<long>();
            OddClassification cl = classify_at(f.curve, p);
            CHECK_FALSE(cl.via_dual);
            oracle::Row o = oracle::row(cl.type);
            LocalData L = local_odd(f.curve, p);
            REQUIRE(L.supported);
            CHECK(L.description == f.expected["label"].get<std::string>());
            CHECK(L.cJ->get_si() == o.cJ);
            CHECK(L.cJh->get_si() == o.cJh);
            CHECK(L.mu == o.mu);
            CHECK(L.muh == o.muh);
            CHECK(L.lambda == o.lambda);
            CHECK(L.w == o.w);
            CHECK(L.w == cl.w_eigen);
            if (L.e_asserted) CHECK(L.E == o.E);
            CHECK(L.lambda * L.w == L.E);
            CHECK(L.issues.empty());
            rows.insert(f.expected["row"].get<std::string>());
        }
        CHECK(rows.size() >= 40);
    }

    TEST_CASE("w = lambda E at odd primes on random curves")
    {
        std::mt19937_64 g(41);
        int supported = 0;
        for (int i = 0; i < 300; ++i) {
            Curve C = oracle::random_curve(g);
            for (long p : {3, 5, 7}) {
                LocalData L = local_odd(C, p);
                if (!L.supported) continue;
                ++supported;
                CAPTURE(format_curve(C));
                CAPTURE(p);
                CHECK(L.verdict());
                CHECK(L.issues.empty());
            }
        }
        CHECK(supported > 300);
    }

    TEST_CASE("family F at 2")
    {
        Curve C = curve_from_roots(-1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)});
        CHECK(in_family_F(C));
        LocalData L = local_2adic(C);
        REQUIRE(L.supported);
        CHECK(L.E == 1);
        CHECK(L.lambda == 1);
        CHECK(L.w == 1);
        CHECK(L.verdict());
        CHECK_FALSE(in_family_F(curve_from_roots(1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)})));
    }

    TEST_CASE("good ordinary curves at 2 are certified with E = 1")
    {
        std::mt19937_64 g(43);
        for (int i = 0; i < 200; ++i) {
            Curve C = oracle::good_ordinary_at_2(g);
            CAPTURE(format_curve(C));
            auto W = detect_good_ordinary_2adic(C);
            REQUIRE(W.has_value());
            LocalData L = local_2adic(C);
            REQUIRE(L.supported);
            CHECK(L.E == 1);
            CHECK(L.verdict());
            CHECK(L.issues.empty());
        }
        for (int i = 0; i < 200; ++i) {
            LocalData L = local_2adic(oracle::random_curve(g));
            if (L.supported) CHECK(L.E == 1);
        }
    }

    TEST_CASE("unsupported places are reported, not assumed")
    {
        Curve C = curve_from_roots(-1, {R(-5), R(5), R(-4), R(-12), R(2), R(-6)});
        LocalData L = local_odd(C, 3);
        CHECK_FALSE(L.supported);
        CHECK_FALSE(L.reason.empty());
    }
}
