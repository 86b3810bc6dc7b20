#pragma once

#include <string>
#include <vector>

namespace gek::checks {

struct CheckResult {
    std::string name;
    double measured = 0.0;  // the residual / error actually observed
    double tolerance = 0.0; // what it must stay below
    bool pass = false;
    double seconds = 0.0;
};

// Suites: identities | hermitian | strong | bulk | poisson | all.
// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckResult> run_suite(const std::string& suite);

bool all_pass(const std::vector<CheckResult>& results);

} // namespace gek::checks
