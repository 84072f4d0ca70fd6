#include "seamsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seamsim {

void NoiseParams::validate() const {
    if (!(p >= 0.0 && p <= 0.1)) {
        throw std::invalid_argument("invalid-noise: p must be in [0, 0.1], got " + std::to_string(p));
    }
    if (!(t1_s > 0.0) || !(t2_s > 0.0)) {
        throw std::invalid_argument("invalid-noise: T1 and T2 must be positive");
    }
    if (t2_s > 2.0 * t1_s) {
        throw std::invalid_argument("invalid-coherence: T2 must satisfy T2 <= 2*T1");
    }
    if (!(t_1q_s > 0.0) || !(t_2q_s > 0.0) || !(t_ro_s > 0.0)) {
        throw std::invalid_argument("invalid-noise: gate/readout times must be positive");
    }
    if (!(egr_hz > 0.0)) {
        throw std::invalid_argument("invalid-noise: egr_hz must be positive");
    }
    if (links < 1) {
        throw std::invalid_argument("invalid-noise: links must be >= 1");
    }
    if (fiber_length_m < 0.0 || fiber_loss_db_per_km < 0.0) {
        throw std::invalid_argument("invalid-noise: fiber parameters must be non-negative");
    }
}

PauliChannel1 idle_pauli_probs(double dt_s, double t1_s, double t2_s) {
    if (dt_s < 0.0 || !(t1_s > 0.0) || !(t2_s > 0.0)) {
        throw std::invalid_argument("invalid-noise: idle_pauli_probs needs dt >= 0, T1/T2 > 0");
    }
    if (t2_s > 2.0 * t1_s) {
        throw std::invalid_argument("invalid-coherence: T2 must satisfy T2 <= 2*T1");
    }
    PauliChannel1 ch;
    ch.px = -std::expm1(-dt_s / t2_s) / 4.0;
    ch.py = ch.px;
    ch.pz = -std::expm1(-dt_s / t1_s) / 2.0 - ch.px;
    // The twirl of a physical T1/T2 channel; pz can underflow to a tiny
    // negative for T2 == 2*T1, clamp it.
    ch.pz = std::max(0.0, ch.pz);
    return ch;
}

double attenuation(double length_m, double loss_db_per_km) {
    if (length_m < 0.0 || loss_db_per_km < 0.0) {
        throw std::invalid_argument("invalid-noise: attenuation needs non-negative length/loss");
    }
    return std::pow(10.0, -loss_db_per_km * (length_m / 1000.0));
}

double expected_wait_s(int n_pairs, int links, double p_att, double egr_hz) {
    if (n_pairs < 0 || links < 1 || !(egr_hz > 0.0)) {
        throw std::invalid_argument("invalid-noise: expected_wait needs n >= 0, links >= 1, egr > 0");
    }
    if (n_pairs == 0) return 0.0;
    if (!(p_att > 0.0)) {
        throw std::invalid_argument("infinite-wait: p_att == 0 with n_pairs > 0");
    }
    double n = (double)n_pairs;
    return n * n / ((double)links * p_att * egr_hz);
}

double round_idle_time_s(int n_remote, const NoiseParams& np) {
    double p_att = attenuation(np.fiber_length_m, np.fiber_loss_db_per_km);
    return std::max(np.t_ro_s, expected_wait_s(n_remote, np.links, p_att, np.egr_hz));
}

}  // namespace seamsim
