#pragma once

#include "seamsim/circuit.hpp"
#include "seamsim/memory_circuit.hpp"
#include "seamsim/noise.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace seamsim {

// Sweep definition plus everything needed to reproduce a run. Loadable
// from a JSON file whose keys mirror the field names below.
struct ExperimentConfig {
    std::vector<int> distances{3};
    std::vector<std::string> policies{"ma"};
    std::vector<double> p_values{1e-3};
    std::vector<double> egr_values{2e6};
    int64_t shots = kAutoShots; // fixed count, or auto budgeting
    int64_t max_shots = 10000000;
    int64_t target_failures = 100;
    int rounds = 0; // 0: use T = d
    uint64_t seed = 1;

    double t1_s = 200e-6;
    double t2_s = 150e-6;
    double t_1q_s = 50e-9;
    double t_2q_s = 70e-9;
    double t_ro_s = 1500e-9;
    int links = 1;
    double fiber_length_m = 0.0;
    double fiber_loss_db_per_km = 0.2;

    std::string out;            // empty: stdout
    std::string format = "csv"; // csv | json

    static constexpr int64_t kAutoShots = -1;

    void validate() const; // throws std::invalid_argument("config-error: ...")
};

// Reads a JSON config file. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

// One cell of the sweep grid.
struct PointSpec {
    int d = 3;
    std::string policy = "ma"; // policy grammar, or "mono"
    double p = 1e-3;
    double egr_hz = 2e6;
};

struct SimResult {
    int d = 0;
    std::string policy;
    int tau_effective = 1;
    double p = 0.0;
    double egr_hz = 0.0;
    int64_t shots = 0;
    int64_t failures = 0;
    double ler = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    uint64_t seed = 0;
    double wall_s = 0.0; // only field exempt from reproducibility

    bool same_outcome(const SimResult& o) const;
};

// 95% (z=1.96) Wilson score interval. shots == 0 throws
// std::invalid_argument("undefined-interval: ...").
std::pair<double, double> wilson_ci(int64_t failures, int64_t shots, double z = 1.96);

// Deterministic per-point RNG seed derived from the config seed and the
// point coordinates, echoed into the output row.
uint64_t point_seed(uint64_t base_seed, const PointSpec& pt);

// Compiles the circuit for one grid point: lattice, partition (the
// "mono" policy and d < 5 force the single-QPU partition), round plan,
// memory circuit.
CircuitIR build_point_circuit(const ExperimentConfig& cfg, const PointSpec& pt,
                              RoundLayout* layout = nullptr, int* tau_effective = nullptr);

// Samples and decodes one point. Auto budgeting draws 10048-shot blocks
// until target_failures failures or max_shots shots.
SimResult run_point(const ExperimentConfig& cfg, const PointSpec& pt);

// Runs the cartesian sweep. Each finished result is handed to `sink`
// (may be null) as soon as it exists; per-point failures are recorded in
// *errors (when non-null) and the sweep continues. `skip` returns true
// for points that are already done (resume).
std::vector<SimResult> run_sweep(const ExperimentConfig& cfg,
                                 const std::function<void(const SimResult&)>& sink = nullptr,
                                 std::vector<std::string>* errors = nullptr,
                                 const std::function<bool(const PointSpec&)>& skip = nullptr);

// Output plumbing. Doubles are printed shortest-round-trip so rows
// parse back bit-exactly.
std::string csv_header();
std::string csv_row(const SimResult& r);
std::string json_row(const SimResult& r);
SimResult parse_csv_row(const std::string& line);
SimResult parse_json_row(const std::string& line);

// Reads an existing output file and returns the (d, policy, p, egr)
// keys already present, for --resume.
std::vector<PointSpec> completed_points(const std::string& path, const std::string& format);

// Writes <d>_<policy>.dat files (two columns: egr_hz ler) into dir.
void emit_plots(const std::vector<SimResult>& rows, const std::string& dir);

// Crossover-rate calibration driver: runs ss:2 and ss:(d-1)/2 at each
// sweep rate and interpolates the crossing.
double calibrate_rc(const ExperimentConfig& cfg, int d, double p,
                    const std::vector<double>& sweep);

} // namespace seamsim
