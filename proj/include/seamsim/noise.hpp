#pragma once

#include <stdexcept>

namespace seamsim {

// Hardware/noise parameters. Gate error rates all derive from the single
// knob p: 1q gates and local CX depolarize at p, QPU-spanning CX at 10p,
// ancilla readout flips at p.
struct NoiseParams {
    double p = 1e-3;
    double t1_s = 200e-6;
    double t2_s = 150e-6;
    double t_1q_s = 50e-9;
    double t_2q_s = 70e-9;
    double t_ro_s = 1500e-9;
    double egr_hz = 50e6;
    int links = 1;
    double fiber_length_m = 0.0;
    double fiber_loss_db_per_km = 0.2;

    double p_1q() const { return p; }
    double p_2q_bulk() const { return p; }
    double p_2q_seam() const { return 10.0 * p; }
    double p_m() const { return p; }

    void validate() const;  // throws std::invalid_argument
};

struct PauliChannel1 {
    double px = 0.0;
    double py = 0.0;
    double pz = 0.0;
};

// Pauli-twirled amplitude+phase damping over an idle window dt:
// px = py = (1 - e^{-dt/T2})/4, pz = (1 - e^{-dt/T1})/2 - px.
PauliChannel1 idle_pauli_probs(double dt_s, double t1_s, double t2_s);

// Success probability of a photonic attempt across `length_m` of fiber:
// 10^(-loss_db_per_km * length_km).
double attenuation(double length_m, double loss_db_per_km);

// Expected wall time to distribute n entangled pairs: n^2 / (links * p_att * egr).
// n == 0 waits nothing; p_att == 0 with n > 0 is an error.
double expected_wait_s(int n_pairs, int links, double p_att, double egr_hz);

// Data-qubit idle window for one extraction round: max(readout, EPR wait).
double round_idle_time_s(int n_remote, const NoiseParams& np);

}  // namespace seamsim
