#include "seamsim/circuit.hpp"
#include "seamsim/experiment.hpp"
#include "seamsim/lattice.hpp"
#include "seamsim/partition.hpp"

#include <CLI11.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace {

using namespace seamsim;

std::tuple<int, std::string, uint64_t, uint64_t> resume_key(const PointSpec& pt) {
    return {pt.d, pt.policy, std::bit_cast<uint64_t>(pt.p), std::bit_cast<uint64_t>(pt.egr_hz)};
}

int cmd_run(const std::string& config_path, ExperimentConfig cfg, bool resume, bool emit_circuit,
            bool do_calibrate, const std::string& plot_dir) {
    if (!config_path.empty()) {
        // already loaded by caller; kept for the usage message
    }
    cfg.validate();

    if (emit_circuit) {
        PointSpec pt{cfg.distances.front(), cfg.policies.front(), cfg.p_values.front(),
                     cfg.egr_values.front()};
        CircuitIR circ = build_point_circuit(cfg, pt);
        if (cfg.out.empty()) {
            std::cout << serialize(circ);
        } else {
            std::ofstream out(cfg.out);
            if (!out) {
                std::cerr << "io-error: cannot write '" << cfg.out << "'\n";
                return 1;
            }
            out << serialize(circ);
        }
        return 0;
    }

    if (do_calibrate) {
        if (cfg.egr_values.size() < 2) {
            std::cerr << "config-error: --calibrate-rc needs at least 2 egr values\n";
            return 1;
        }
        for (int d : cfg.distances) {
            try {
                double rc = calibrate_rc(cfg, d, cfg.p_values.front(), cfg.egr_values);
                std::cout << "R_c d=" << d << " " << rc << "\n";
            } catch (const std::exception& e) {
                std::cerr << "calibration failed for d=" << d << ": " << e.what() << "\n";
                return 1;
            }
        }
        return 0;
    }

    std::set<std::tuple<int, std::string, uint64_t, uint64_t>> done;
    if (resume && !cfg.out.empty())
        for (const auto& pt : completed_points(cfg.out, cfg.format)) done.insert(resume_key(pt));

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    bool write_header = cfg.format == "csv";
    if (!cfg.out.empty()) {
        std::error_code ec;
        const auto prior_size = std::filesystem::file_size(cfg.out, ec);
        const bool existing = !ec && prior_size > 0;
        file_out.open(cfg.out, resume ? std::ios::app : std::ios::trunc);
        if (!file_out) {
            std::cerr << "io-error: cannot open '" << cfg.out << "'\n";
            return 1;
        }
        out = &file_out;
        if (resume && existing) write_header = false;
    }
    if (write_header) *out << csv_header() << "\n";

    auto sink = [&](const SimResult& r) {
        *out << (cfg.format == "json" ? json_row(r) : csv_row(r)) << "\n";
        out->flush();
    };
    std::function<bool(const PointSpec&)> skip;
    if (resume) skip = [&](const PointSpec& pt) { return done.count(resume_key(pt)) > 0; };

    std::vector<std::string> errors;
    std::vector<SimResult> results = run_sweep(cfg, sink, &errors, skip);

    if (!plot_dir.empty()) {
        std::vector<SimResult> rows = results;
        if (resume && !cfg.out.empty()) {
            rows.clear();
            std::ifstream in(cfg.out);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line == csv_header()) continue;
                rows.push_back(cfg.format == "json" ? parse_json_row(line) : parse_csv_row(line));
            }
        }
        emit_plots(rows, plot_dir);
    }

    for (const auto& e : errors) std::cerr << "point failed: " << e << "\n";
    return errors.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"seamsim: distributed color-code memory simulations"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a sweep (or a single point) and emit results");
    std::string config_path;
    std::vector<int> d_override;
    std::vector<std::string> policy_override;
    std::vector<double> p_override, egr_override;
    std::string shots_str;
    uint64_t seed = 0;
    int rounds = -1, links = 0;
    int64_t max_shots = 0, target_failures = 0;
    double t1 = 0, t2 = 0, tro = 0, fiber_len = -1, fiber_loss = -1;
    std::string out_path, format, plot_dir;
    bool resume = false, emit_circuit = false, do_calibrate = false;

    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--d", d_override, "distance(s)")->delimiter(',');
    run->add_option("--policy", policy_override, "policy string(s): ma, ss:<tau>, ast:<rate>, ast:auto, mono")
        ->delimiter(',');
    run->add_option("--p", p_override, "physical error rate(s)")->delimiter(',');
    run->add_option("--egr-hz", egr_override, "entanglement generation rate(s), Hz")->delimiter(',');
    run->add_option("--shots", shots_str, "shot count or 'auto'");
    run->add_option("--max-shots", max_shots, "cap for auto shot budgeting");
    run->add_option("--target-failures", target_failures, "failure target for auto budgeting");
    run->add_option("--rounds", rounds, "extraction rounds T (default: T = d)");
    run->add_option("--seed", seed, "base RNG seed");
    run->add_option("--t1", t1, "T1 relaxation time, s");
    run->add_option("--t2", t2, "T2 dephasing time, s");
    run->add_option("--tro", tro, "readout duration, s");
    run->add_option("--links", links, "photonic links per seam pair");
    run->add_option("--fiber-length-m", fiber_len, "fiber length, m");
    run->add_option("--fiber-loss", fiber_loss, "fiber loss, dB/km");
    run->add_option("--out", out_path, "output path (default stdout)");
    run->add_option("--format", format, "csv or json");
    run->add_flag("--resume", resume, "skip points already present in --out");
    run->add_flag("--emit-circuit", emit_circuit, "print the first grid point's circuit and exit");
    run->add_flag("--calibrate-rc", do_calibrate,
                  "estimate the crossover rate over the egr sweep and exit");
    run->add_option("--plot-dir", plot_dir, "directory for <d>_<policy>.dat curve files");

    auto* dump_lat = app.add_subcommand("dump-lattice", "print lattice geometry");
    int lat_d = 3;
    dump_lat->add_option("--d", lat_d, "distance")->required();

    auto* dump_part = app.add_subcommand("dump-partition", "print the four-QPU partition");
    int part_d = 5;
    uint64_t part_seed = 1;
    dump_part->add_option("--d", part_d, "distance")->required();
    dump_part->add_option("--seed", part_seed, "tie-break seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump_lat->parsed()) {
            std::cout << dump_lattice(build_lattice(lat_d));
            return 0;
        }
        if (dump_part->parsed()) {
            ColorCodeLattice lat = build_lattice(part_d);
            std::cout << dump_partition(lat, partition_lattice(lat, part_seed));
            return 0;
        }

        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = seamsim::load_config(config_path);
        if (run->count("--d")) cfg.distances = d_override;
        if (run->count("--policy")) cfg.policies = policy_override;
        if (run->count("--p")) cfg.p_values = p_override;
        if (run->count("--egr-hz")) cfg.egr_values = egr_override;
        if (run->count("--shots")) {
            if (shots_str == "auto")
                cfg.shots = ExperimentConfig::kAutoShots;
            else
                cfg.shots = std::stoll(shots_str);
        }
        if (run->count("--max-shots")) cfg.max_shots = max_shots;
        if (run->count("--target-failures")) cfg.target_failures = target_failures;
        if (run->count("--rounds")) cfg.rounds = rounds;
        if (run->count("--seed")) cfg.seed = seed;
        if (run->count("--t1")) cfg.t1_s = t1;
        if (run->count("--t2")) cfg.t2_s = t2;
        if (run->count("--tro")) cfg.t_ro_s = tro;
        if (run->count("--links")) cfg.links = links;
        if (run->count("--fiber-length-m")) cfg.fiber_length_m = fiber_len;
        if (run->count("--fiber-loss")) cfg.fiber_loss_db_per_km = fiber_loss;
        if (run->count("--out")) cfg.out = out_path;
        if (run->count("--format")) cfg.format = format;

        return cmd_run(config_path, std::move(cfg), resume, emit_circuit, do_calibrate, plot_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
