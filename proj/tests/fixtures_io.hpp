#pragma once

#include "c2d4/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#ifndef C2D4_FIXTURE_DIR
#define C2D4_FIXTURE_DIR "tests/fixtures"
#endif

namespace fixtures {

namespace fs = std::filesystem;

struct Fixture {
    std::string name;
    c2d4::Curve curve;
    nlohmann::json expected;
};

inline std::vector<Fixture> load(const std::string& group)
{
    std::vector<fs::path> paths;
    for (auto& e : fs::recursive_directory_iterator(fs::path(C2D4_FIXTURE_DIR) / group))
        if (e.path().extension() == ".curve") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    std::vector<Fixture> out;
    for (auto& p : paths) {
        fs::path j = p;
        j.replace_extension(".json");
        std::ifstream in(j);
        out.push_back({fs::relative(p, fs::path(C2D4_FIXTURE_DIR)).string(), c2d4::read_curve_file(p.string()),
                       nlohmann::json::parse(in)});
    }
    return out;
}

}  // namespace fixtures
