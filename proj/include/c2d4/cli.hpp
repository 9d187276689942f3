#pragma once

#include "c2d4/global.hpp"
#include "c2d4/identities.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace c2d4 {

enum ExitCode { kOk = 0, kUsage = 1, kPartial = 2, kDegenerate = 3, kInconsistent = 4 };

// Parses argv and runs one subcommand; returns the exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

std::string render_invariants(const Curve& C, bool json);
std::string render_local(const LocalData& L, bool json);
std::string render_report(const GlobalReport& R, bool json);

struct FixtureResult {
    std::string group, name;
    bool pass = false;
    std::string detail;  // first mismatch
};

// Runs the committed fixtures under dir plus seeded random identity checks.
std::vector<FixtureResult> run_fixtures(const std::string& dir, unsigned seed, int identity_curves = 200);
std::string render_fixture_matrix(const std::vector<FixtureResult>& results);

}  // namespace c2d4
