#include "oracle.hpp"

#include "c2d4/arith.hpp"
#include "c2d4/identities.hpp"

#include <doctest.h>

using namespace c2d4;
using oracle::R;

namespace {

const long kPrimes[] = {2, 3, 5, 7, 11};

Rat rand_nonzero(std::mt19937_64& g)
{
    for (;;) {
        Rat x = oracle::rand_rat(g, 400, 60);
        if (x != 0) return x;
    }
}

}  // namespace

TEST_SUITE("arith")
{
    TEST_CASE("hilbert symbol matches solvability search")
    {
        std::mt19937_64 g(11);
        for (int i = 0; i < 300; ++i) {
            Rat a = rand_nonzero(g), b = rand_nonzero(g);
            CHECK(hilbert_symbol(a, b, Place::inf()) == oracle::real_hilbert(a, b));
            for (long p : kPrimes) CHECK(hilbert_symbol(a, b, Place::prime(p)) == oracle::brute_hilbert(a, b, p));
        }
    }

    TEST_CASE("solvability search is stable in the modulus")
    {
        for (long a : {1, -1, 3, -3, 2, -2, 6, -6})
            for (long b : {1, -1, 3, -3, 2, -2, 6, -6}) {
                CHECK(oracle::brute_hilbert(a, b, 2, 7) == oracle::brute_hilbert(a, b, 2, 9));
                CHECK(oracle::brute_hilbert(a, b, 3, 3) == oracle::brute_hilbert(a, b, 3, 5));
            }
    }

    TEST_CASE("hilbert axioms on random pairs")
    {
        std::mt19937_64 g(7);
        for (int i = 0; i < 1000; ++i) {
            Rat a = rand_nonzero(g), b = rand_nonzero(g), b2 = rand_nonzero(g);
            CHECK(hilbert_product_check(a, b) == 1);
            for (Place v : {Place::inf(), Place::prime(2), Place::prime(3), Place::prime(5), Place::prime(7)}) {
                CHECK(hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v));
                CHECK(hilbert_symbol(a, b * b2, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a, b2, v));
                CHECK(hilbert_symbol(a, -a, v) == 1);
                CHECK(hilbert_symbol(a, b * b, v) == 1);
            }
        }
    }

    TEST_CASE("sum identity for the symbol")
    {
        std::mt19937_64 g(5);
        for (int i = 0; i < 1000; ++i) {
            Rat A = rand_nonzero(g), B = rand_nonzero(g);
            if (A + B == 0) continue;
            for (long p : {3, 5, 7}) CHECK(hilbert_sum_identity(A, B, Place::prime(p)));
        }
    }

    TEST_CASE("known symbols")
    {
        CHECK(hilbert_symbol(-1, -1, Place::inf()) == -1);
        CHECK(hilbert_symbol(-1, -1, Place::prime(2)) == -1);
        CHECK(hilbert_symbol(-1, -1, Place::prime(3)) == 1);
        CHECK(hilbert_symbol(2, 3, Place::prime(3)) == -1);
        CHECK(hilbert_symbol(5, 3, Place::prime(3)) == -1);
        CHECK(hilbert_symbol(R(1, 9), 3, Place::prime(3)) == 1);
    }

    TEST_CASE("square classes")
    {
        CHECK(square_class(R(4, 9), Place::prime(3)) == SquareClass::Square);
        CHECK(square_class(17, Place::prime(2)) == SquareClass::Square);
        CHECK(square_class(3, Place::prime(2)) != SquareClass::Square);
        CHECK(square_class(2, Place::prime(7)) == SquareClass::Square);
        CHECK(square_class(3, Place::prime(7)) == SquareClass::UnramifiedNonSquare);
        CHECK(square_class(7, Place::prime(7)) == SquareClass::Uniformizer);
        CHECK(square_class(-1, Place::inf()) != SquareClass::Square);
        std::mt19937_64 g(3);
        for (int i = 0; i < 500; ++i) {
            Rat x = rand_nonzero(g);
            for (long p : kPrimes) {
                bool sq = square_class(x, Place::prime(p)) == SquareClass::Square;
                // x is a local square iff (x, y) = 1 for every y.
                bool all = true;
                for (long y : {-1, 2, -2, 3, 5, 6, 7, 10, 11, -3, 15, 14})
                    all = all && oracle::brute_hilbert(x, y, p) == 1;
                CHECK(sq == all);
            }
        }
    }

    TEST_CASE("quadratic extension arithmetic")
    {
        QuadExt x(R(1, 2), 3, 5), y(2, -1, 5);
        CHECK((x * y).norm() == x.norm() * y.norm());
        CHECK((x * x.conj()).is_rational());
        CHECK((x + y).trace() == x.trace() + y.trace());
        CHECK((x / y) * y == x);
        CHECK_THROWS_AS(x.to_rational(), InternalError);
    }

    TEST_CASE("parsing and primes")
    {
        CHECK(parse_rational("-6/4") == R(-3, 2));
        CHECK_THROWS(parse_rational("1/0"));
        CHECK_THROWS(parse_rational("abc"));
        CHECK(vp(R(-12, 5), Int(2)) == 2);
        CHECK(vp(R(-12, 5), Int(5)) == -1);
        CHECK(prime_factors(Int(-84)) == std::vector<Int>{2, 3, 7});
        CHECK(is_squarefree(Int(-30)));
        CHECK_FALSE(is_squarefree(Int(12)));
        CHECK(legendre(Int(2), Int(7)) == 1);
        Int s = sqrt_mod_prime(Int(2), Int(7));
        CHECK((s * s - 2) % 7 == 0);
    }
}
