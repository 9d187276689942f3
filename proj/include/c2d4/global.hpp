#pragma once

#include "c2d4/localdata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace c2d4 {

// Real place, 2, and every odd prime where some defining quantity is not a unit.
std::vector<Place> bad_places(const Curve& C);

struct GlobalReport {
    Curve curve;
    std::vector<Place> places;
    std::vector<LocalData> local;  // parallel to places
    bool complete = false;
    std::optional<int> parity;       // product of lambda_v
    std::optional<int> root_number;  // product of w_v
    int E_product = 1;
    int lambda_supported = 1, w_supported = 1;  // products over supported places only
    std::vector<std::string> gaps;

    bool local_verdicts() const;  // w = lambda E at every supported place
    bool global_consistent() const;
    bool has_issues() const;
};

// Product of lambda_v; empty when some place is unsupported.
std::optional<int> parity_prediction(const Curve& C);
GlobalReport check_conjecture(const Curve& C);

}  // namespace c2d4
