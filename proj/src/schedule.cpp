#include "seamsim/schedule.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seamsim {

std::string Policy::to_string() const {
    std::ostringstream os;
    switch (kind) {
    case PolicyKind::MA:
        os << "ma";
        break;
    case PolicyKind::SS:
        os << "ss:" << tau;
        break;
    case PolicyKind::AST:
        if (auto_rc)
            os << "ast:auto";
        else
            os << "ast:" << r_c_hz;
        break;
    }
    return os.str();
}

Policy parse_policy(const std::string& text) {
    auto fail = [&]() -> Policy {
        throw std::invalid_argument("invalid-policy: '" + text +
                                    "' (expected ma | ss:<tau> | ast:<r_c> | ast:auto)");
    };
    Policy p;
    if (text == "ma") {
        p.kind = PolicyKind::MA;
        p.tau = 1;
        return p;
    }
    if (text.rfind("ss:", 0) == 0) {
        p.kind = PolicyKind::SS;
        const std::string arg = text.substr(3);
        size_t used = 0;
        int tau = 0;
        try {
            tau = std::stoi(arg, &used);
        } catch (const std::exception&) {
            return fail();
        }
        if (used != arg.size() || tau < 1) return fail();
        p.tau = tau;
        return p;
    }
    if (text.rfind("ast:", 0) == 0) {
        p.kind = PolicyKind::AST;
        const std::string arg = text.substr(4);
        if (arg == "auto") {
            p.auto_rc = true;
            return p;
        }
        size_t used = 0;
        double rc = 0.0;
        try {
            rc = std::stod(arg, &used);
        } catch (const std::exception&) {
            return fail();
        }
        if (used != arg.size() || !(rc > 0.0) || !std::isfinite(rc)) return fail();
        p.r_c_hz = rc;
        return p;
    }
    return fail();
}

int tau_star(int d, double egr_hz, double r_c_hz) {
    if (d < 3 || d % 2 == 0)
        throw std::invalid_argument("invalid-distance: tau_star needs odd d >= 3");
    if (!(egr_hz > 0.0))
        throw std::invalid_argument("invalid-rate: egr must be positive");
    if (!(r_c_hz > 0.0))
        throw std::invalid_argument("invalid-rate: r_c must be positive");
    return egr_hz < r_c_hz ? (d - 1) / 2 : 2;
}

RoundPlan plan_rounds(const Policy& policy, int d, int T, double egr_hz) {
    if (T < 1) throw std::invalid_argument("invalid-rounds: T must be >= 1");
    int tau = 1;
    switch (policy.kind) {
    case PolicyKind::MA:
        tau = 1;
        break;
    case PolicyKind::SS:
        if (policy.tau < 1) throw std::invalid_argument("invalid-policy: ss tau must be >= 1");
        tau = policy.tau;
        break;
    case PolicyKind::AST:
        if (policy.auto_rc)
            throw std::invalid_argument(
                "unresolved-crossover-rate: calibrate r_c before planning rounds");
        tau = tau_star(d, egr_hz, policy.r_c_hz);
        break;
    }
    RoundPlan plan;
    plan.effective_tau = tau;
    plan.measure_seam.resize(static_cast<size_t>(T) + 1, false);
    plan.measure_seam[0] = true;
    for (int t = 1; t <= T; ++t) plan.measure_seam[static_cast<size_t>(t)] = (t % tau == 0);
    return plan;
}

double estimate_crossover_rate(int d, const std::vector<double>& sweep,
                               const std::function<double(double, int)>& runner) {
    if (d < 5 || d % 2 == 0)
        throw std::invalid_argument("invalid-distance: crossover estimate needs odd d >= 5");
    if (sweep.size() < 2)
        throw std::invalid_argument("invalid-sweep: need at least 2 rate points");
    for (size_t i = 0; i + 1 < sweep.size(); ++i)
        if (!(sweep[i] > 0.0) || !(sweep[i] < sweep[i + 1]))
            throw std::invalid_argument("invalid-sweep: rates must be positive and ascending");

    const int tau_big = (d - 1) / 2;
    // gap(R) = log LER(tau=2) - log LER(tau=(d-1)/2); crossover at gap <= 0.
    auto gap_at = [&](double r) {
        double l2 = runner(r, 2);
        double lb = runner(r, tau_big);
        const double floor_p = std::numeric_limits<double>::min();
        if (!(l2 > 0.0)) l2 = floor_p;
        if (!(lb > 0.0)) lb = floor_p;
        return std::log(l2) - std::log(lb);
    };

    double prev_gap = gap_at(sweep[0]);
    if (prev_gap <= 0.0) return sweep[0];
    for (size_t i = 1; i < sweep.size(); ++i) {
        const double gap = gap_at(sweep[i]);
        if (gap <= 0.0) {
            const double lx0 = std::log(sweep[i - 1]);
            const double lx1 = std::log(sweep[i]);
            const double t = prev_gap / (prev_gap - gap);
            return std::exp(lx0 + t * (lx1 - lx0));
        }
        prev_gap = gap;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace seamsim
