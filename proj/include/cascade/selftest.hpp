#pragma once

#include <string>
#include <vector>

namespace cascade {

struct SelftestResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Quick invariant checks (transform, norms, RNG, integrators, diagnostics, config).
std::vector<SelftestResult> run_selftest();

}  // namespace cascade
