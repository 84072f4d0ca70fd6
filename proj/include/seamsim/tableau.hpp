#pragma once

#include "seamsim/circuit.hpp"

#include <string>

namespace seamsim {

// Simulates the noiseless circuit with a stabilizer tableau whose signs
// carry symbolic coins for random measurement outcomes. Returns true iff
// every detector XORs to a constant 0 (no coin dependence) and the
// observable is coin-free. On failure, *why (if given) names the first
// offending detector or the observable.
bool check_deterministic(const CircuitIR& c, std::string* why = nullptr);

} // namespace seamsim
