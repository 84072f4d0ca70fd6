#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace seamsim {

// Seam measurement policies. MA measures every seam check every round,
// SS measures seam checks only on rounds t with t % tau == 0 (plus the
// init round t=0), AST picks tau once from the entanglement rate before
// the run starts.
enum class PolicyKind { MA, SS, AST };

struct Policy {
    PolicyKind kind = PolicyKind::MA;
    int tau = 1;          // SS only
    double r_c_hz = 0.0;  // AST only; crossover rate
    bool auto_rc = false; // AST with r_c to be calibrated before planning

    std::string to_string() const;
};

// Grammar: "ma" | "ss:<tau>" | "ast:<r_c>" | "ast:auto".
// Throws std::invalid_argument("invalid-policy: ...") on anything else.
Policy parse_policy(const std::string& text);

struct RoundPlan {
    // rounds[t] for t = 0..T; true when seam checks are measured in round t.
    std::vector<bool> measure_seam;
    int effective_tau = 1;

    int total_rounds() const { return static_cast<int>(measure_seam.size()) - 1; }
    bool operator==(const RoundPlan& other) const = default;
};

// tau chosen by the adaptive policy: (d-1)/2 below the crossover rate,
// 2 at or above it. d=3 yields 1 below crossover, i.e. measure-all.
int tau_star(int d, double egr_hz, double r_c_hz);

// Expand a policy into a per-round plan for rounds t = 0..T. Round 0
// always measures everything. egr_hz is only consulted by AST.
RoundPlan plan_rounds(const Policy& policy, int d, int T, double egr_hz);

// Locate the smallest rate in `sweep` at which the tau=2 logical error
// rate drops to or below the tau=(d-1)/2 one, interpolating between
// bracketing sweep points on log-log axes. Returns +infinity when tau=2
// never wins inside the sweep. `runner(egr_hz, tau)` must return an LER
// estimate in (0, 1].
double estimate_crossover_rate(int d, const std::vector<double>& sweep,
                               const std::function<double(double, int)>& runner);

} // namespace seamsim
