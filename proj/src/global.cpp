#include "c2d4/global.hpp"

#include <set>

namespace c2d4 {

namespace {

void add_primes(std::set<Int>& out, const Rat& x)
{
    if (x == 0) return;
    for (const Int* n : {&x.get_num(), &x.get_den()})
        if (abs(*n) > 1)
            for (const Int& q : prime_factors(*n)) out.insert(q);
}

void add_primes(std::set<Int>& out, const QuadExt& x)
{
    add_primes(out, x.a);
    add_primes(out, x.b);
}

}  // namespace

std::vector<Place> bad_places(const Curve& C)
{
    InvariantSet I = invariants(C);
    if (I.Delta_zero) throw DegenerateError("Delta = 0");
    if (I.P_zero) throw DegenerateError("P = 0");
    std::set<Int> primes{2};
    add_primes(primes, C.c);
    add_primes(primes, Rat(C.m));
    for (const Quad* q : {&C.r, &C.s, &C.t}) {
        add_primes(primes, q->b);
        add_primes(primes, q->c);
    }
    add_primes(primes, C.r.disc().to_rational());
    add_primes(primes, (C.s.disc() * C.t.disc()).to_rational());
    add_primes(primes, (resultant(C.r, C.s) * resultant(C.r, C.t)).to_rational());
    add_primes(primes, resultant(C.s, C.t).to_rational());
    for (const Rat* x : {&I.delta1, &I.xi, &I.eta1, &I.l1sq, &I.l2l3, &I.eta2eta3, &I.d2d3, &I.d2_plus_d3, &I.d2e2_plus_d3e3,
                         &I.dh2e3_plus_dh3e2, &I.dh2dh3, &I.dh1, &I.Delta_sq, &I.l1_over_Delta, &I.Delta_sq_dh1})
        add_primes(primes, *x);
    for (const auto& [a, b] : error_term_arguments(I, C.c)) {
        add_primes(primes, a);
        add_primes(primes, b);
    }
    std::vector<Place> out{Place::inf()};
    for (const Int& q : primes) out.push_back(Place::prime(q));
    return out;
}

bool GlobalReport::local_verdicts() const
{
    for (const LocalData& L : local)
        if (L.supported && !L.verdict()) return false;
    return true;
}

bool GlobalReport::global_consistent() const
{
    if (E_product != 1) return false;
    if (complete && *root_number != *parity * E_product) return false;
    return true;
}

bool GlobalReport::has_issues() const
{
    for (const LocalData& L : local)
        if (!L.issues.empty()) return true;
    return false;
}

GlobalReport check_conjecture(const Curve& C)
{
    GlobalReport R;
    R.curve = C;
    R.places = bad_places(C);
    for (const Place& v : R.places) R.local.push_back(local_data(C, v));
    int lam = 1, w = 1;
    R.complete = true;
    for (const LocalData& L : R.local) {
        R.E_product *= L.E;
        if (!L.supported) {
            R.complete = false;
            R.gaps.push_back(L.place.name() + ": " + L.reason);
            continue;
        }
        lam *= L.lambda;
        w *= L.w;
    }
    R.lambda_supported = lam;
    R.w_supported = w;
    if (R.complete) {
        R.parity = lam;
        R.root_number = w;
    }
    return R;
}

std::optional<int> parity_prediction(const Curve& C) { return check_conjecture(C).parity; }

}  // namespace c2d4
