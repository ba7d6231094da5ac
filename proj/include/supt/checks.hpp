#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace supt {

struct CheckContext {
    std::uint64_t seed = 1;
    int instances = 32;  // random instances per property
};

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct CheckDef {
    std::string name;
    std::string description;
    CheckResult (*run)(const CheckContext&);
};

// Catalog of the named verification checks: stable names, one-line statements
// of what each verifies.
const std::vector<CheckDef>& check_catalog();

std::vector<CheckResult> run_all_checks(const CheckContext& ctx);
CheckResult run_check(const std::string& name, const CheckContext& ctx);

}  // namespace supt
