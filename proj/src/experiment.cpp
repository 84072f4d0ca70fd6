#include "seamsim/experiment.hpp"

#include "seamsim/decoder.hpp"
#include "seamsim/dem.hpp"
#include "seamsim/framesim.hpp"
#include "seamsim/lattice.hpp"
#include "seamsim/partition.hpp"
#include "seamsim/rng.hpp"
#include "seamsim/schedule.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace seamsim {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error(std::string("parse-error: bad ") + what + " '" + s + "'");
    return v;
}

template <typename T>
T parse_int_field(const std::string& s, const char* what) {
    T v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error(std::string("parse-error: bad ") + what + " '" + s + "'");
    return v;
}

std::string describe_point(const PointSpec& pt) {
    return "d=" + std::to_string(pt.d) + " policy=" + pt.policy + " p=" + fmt_double(pt.p) +
           " egr_hz=" + fmt_double(pt.egr_hz);
}

constexpr int64_t kBlockShots = 10048; // 157 batches of 64

} // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config-error: " + msg);
    };
    if (distances.empty()) fail("distances is empty");
    for (int d : distances)
        if (d < 3 || d % 2 == 0) fail("distances must be odd and >= 3");
    if (policies.empty()) fail("policies is empty");
    for (const auto& s : policies)
        if (s != "mono") parse_policy(s);
    if (p_values.empty()) fail("p_values is empty");
    for (double p : p_values)
        if (!(p >= 0.0) || p > 0.1) fail("p_values must lie in [0, 0.1]");
    if (egr_values.empty()) fail("egr_values is empty");
    for (double r : egr_values)
        if (!(r > 0.0)) fail("egr_values must be positive");
    if (shots != kAutoShots && shots <= 0) fail("shots must be positive or auto");
    if (max_shots <= 0) fail("max_shots must be positive");
    if (target_failures <= 0) fail("target_failures must be positive");
    if (rounds < 0) fail("rounds must be >= 0 (0 selects T = d)");
    if (format != "csv" && format != "json") fail("format must be csv or json");
    NoiseParams np;
    np.t1_s = t1_s;
    np.t2_s = t2_s;
    np.t_1q_s = t_1q_s;
    np.t_2q_s = t_2q_s;
    np.t_ro_s = t_ro_s;
    np.links = links;
    np.fiber_length_m = fiber_length_m;
    np.fiber_loss_db_per_km = fiber_loss_db_per_km;
    np.p = p_values.front();
    np.egr_hz = egr_values.front();
    np.validate();
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config-error: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config-error: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config-error: top level must be an object");

    static const std::set<std::string> known = {
        "distances",      "policies",       "p_values",       "egr_values",
        "shots",          "max_shots",      "target_failures", "rounds",
        "seed",           "t1_s",           "t2_s",           "t_1q_s",
        "t_2q_s",         "t_ro_s",         "links",          "fiber_length_m",
        "fiber_loss_db_per_km", "out",      "format"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw std::runtime_error("config-error: unknown key '" + k + "'");

    ExperimentConfig cfg;
    try {
        if (j.contains("distances")) cfg.distances = j.at("distances").get<std::vector<int>>();
        if (j.contains("policies"))
            cfg.policies = j.at("policies").get<std::vector<std::string>>();
        if (j.contains("p_values")) cfg.p_values = j.at("p_values").get<std::vector<double>>();
        if (j.contains("egr_values"))
            cfg.egr_values = j.at("egr_values").get<std::vector<double>>();
        if (j.contains("shots")) {
            const auto& v = j.at("shots");
            if (v.is_string()) {
                if (v.get<std::string>() != "auto")
                    throw std::runtime_error("config-error: shots must be a count or \"auto\"");
                cfg.shots = ExperimentConfig::kAutoShots;
            } else {
                cfg.shots = v.get<int64_t>();
            }
        }
        if (j.contains("max_shots")) cfg.max_shots = j.at("max_shots").get<int64_t>();
        if (j.contains("target_failures"))
            cfg.target_failures = j.at("target_failures").get<int64_t>();
        if (j.contains("rounds")) cfg.rounds = j.at("rounds").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
        if (j.contains("t1_s")) cfg.t1_s = j.at("t1_s").get<double>();
        if (j.contains("t2_s")) cfg.t2_s = j.at("t2_s").get<double>();
        if (j.contains("t_1q_s")) cfg.t_1q_s = j.at("t_1q_s").get<double>();
        if (j.contains("t_2q_s")) cfg.t_2q_s = j.at("t_2q_s").get<double>();
        if (j.contains("t_ro_s")) cfg.t_ro_s = j.at("t_ro_s").get<double>();
        if (j.contains("links")) cfg.links = j.at("links").get<int>();
        if (j.contains("fiber_length_m"))
            cfg.fiber_length_m = j.at("fiber_length_m").get<double>();
        if (j.contains("fiber_loss_db_per_km"))
            cfg.fiber_loss_db_per_km = j.at("fiber_loss_db_per_km").get<double>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("config-error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

bool SimResult::same_outcome(const SimResult& o) const {
    return d == o.d && policy == o.policy && tau_effective == o.tau_effective && p == o.p &&
           egr_hz == o.egr_hz && shots == o.shots && failures == o.failures && ler == o.ler &&
           ci_low == o.ci_low && ci_high == o.ci_high && seed == o.seed;
}

std::pair<double, double> wilson_ci(int64_t failures, int64_t shots, double z) {
    if (shots <= 0) throw std::invalid_argument("undefined-interval: shots must be > 0");
    if (failures < 0 || failures > shots)
        throw std::invalid_argument("undefined-interval: failures must lie in [0, shots]");
    const double n = static_cast<double>(shots);
    const double ph = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = ph + z2 / (2.0 * n);
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
    double low = (center - half) / denom;
    double high = (center + half) / denom;
    low = std::max(0.0, low);
    high = std::min(1.0, high);
    return {low, high};
}

uint64_t point_seed(uint64_t base_seed, const PointSpec& pt) {
    uint64_t s = mix64(base_seed ^ 0x9e3779b97f4a7c15ULL);
    s = mix64(s ^ static_cast<uint64_t>(pt.d));
    for (unsigned char c : pt.policy) s = mix64(s ^ c);
    s = mix64(s ^ std::bit_cast<uint64_t>(pt.p));
    s = mix64(s ^ std::bit_cast<uint64_t>(pt.egr_hz));
    return s;
}

CircuitIR build_point_circuit(const ExperimentConfig& cfg, const PointSpec& pt,
                              RoundLayout* layout, int* tau_effective) {
    if (pt.d < 3 || pt.d % 2 == 0)
        throw std::invalid_argument("config-error: distance must be odd and >= 3");
    const bool mono = (pt.policy == "mono") || pt.d < 5;
    const Policy pol = parse_policy(pt.policy == "mono" ? "ma" : pt.policy);

    NoiseParams np;
    np.p = pt.p;
    np.egr_hz = pt.egr_hz;
    np.t1_s = cfg.t1_s;
    np.t2_s = cfg.t2_s;
    np.t_1q_s = cfg.t_1q_s;
    np.t_2q_s = cfg.t_2q_s;
    np.t_ro_s = cfg.t_ro_s;
    np.links = cfg.links;
    np.fiber_length_m = cfg.fiber_length_m;
    np.fiber_loss_db_per_km = cfg.fiber_loss_db_per_km;
    np.validate();

    const int T = cfg.rounds > 0 ? cfg.rounds : pt.d;
    ColorCodeLattice lat = build_lattice(pt.d);
    Partition part = mono ? monolithic_partition(lat) : partition_lattice(lat, cfg.seed);
    RoundPlan plan = plan_rounds(pol, pt.d, T, pt.egr_hz);
    if (tau_effective) *tau_effective = plan.effective_tau;
    return build_memory_circuit(lat, part, plan, np, T, layout);
}

SimResult run_point(const ExperimentConfig& cfg, const PointSpec& pt) {
    const auto t0 = std::chrono::steady_clock::now();

    int tau_effective = 1;
    CircuitIR circ = build_point_circuit(cfg, pt, nullptr, &tau_effective);
    FrameSampler sampler(circ);
    DetectorErrorModel dem = extract_dem(circ);
    RestrictionDecoder dec(dem);

    const uint64_t seed = point_seed(cfg.seed, pt);
    const uint32_t D = sampler.num_detectors();
    std::vector<uint64_t> det_words(std::max<uint32_t>(D, 1));
    std::vector<std::vector<uint32_t>> fired(64);
    std::unordered_map<std::string, bool> cache;
    constexpr size_t kCacheCap = size_t{1} << 20;

    int64_t shots = 0, failures = 0;
    uint32_t batch = 0;

    auto run_block = [&](int64_t count) {
        while (count > 0) {
            uint64_t obs_word = 0;
            sampler.sample_batch(seed, batch, det_words.data(), &obs_word);
            const int take = static_cast<int>(std::min<int64_t>(64, count));
            for (int s = 0; s < take; ++s) fired[s].clear();
            const uint64_t keep = take == 64 ? ~uint64_t{0} : ((uint64_t{1} << take) - 1);
            for (uint32_t d = 0; d < D; ++d) {
                uint64_t w = det_words[d] & keep;
                while (w) {
                    const int s = std::countr_zero(w);
                    fired[s].push_back(d);
                    w &= w - 1;
                }
            }
            for (int s = 0; s < take; ++s) {
                const bool obs = (obs_word >> s) & 1;
                bool pred = false;
                if (!fired[s].empty()) {
                    std::string key(reinterpret_cast<const char*>(fired[s].data()),
                                    fired[s].size() * sizeof(uint32_t));
                    auto it = cache.find(key);
                    if (it != cache.end()) {
                        pred = it->second;
                    } else {
                        pred = dec.decode_sparse(fired[s]).predicted_flip;
                        if (cache.size() < kCacheCap) cache.emplace(std::move(key), pred);
                    }
                }
                failures += (pred != obs) ? 1 : 0;
            }
            shots += take;
            count -= take;
            ++batch;
        }
    };

    if (cfg.shots == ExperimentConfig::kAutoShots) {
        while (failures < cfg.target_failures && shots < cfg.max_shots)
            run_block(std::min<int64_t>(kBlockShots, cfg.max_shots - shots));
    } else {
        run_block(cfg.shots);
    }

    SimResult r;
    r.d = pt.d;
    r.policy = pt.policy;
    r.tau_effective = tau_effective;
    r.p = pt.p;
    r.egr_hz = pt.egr_hz;
    r.shots = shots;
    r.failures = failures;
    r.ler = static_cast<double>(failures) / static_cast<double>(shots);
    std::tie(r.ci_low, r.ci_high) = wilson_ci(failures, shots);
    r.seed = seed;
    r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<SimResult> run_sweep(const ExperimentConfig& cfg,
                                 const std::function<void(const SimResult&)>& sink,
                                 std::vector<std::string>* errors,
                                 const std::function<bool(const PointSpec&)>& skip) {
    cfg.validate();
    std::vector<SimResult> out;
    for (int d : cfg.distances) {
        for (const auto& policy : cfg.policies) {
            for (double p : cfg.p_values) {
                for (double egr : cfg.egr_values) {
                    PointSpec pt{d, policy, p, egr};
                    if (skip && skip(pt)) continue;
                    try {
                        SimResult r = run_point(cfg, pt);
                        out.push_back(r);
                        if (sink) sink(out.back());
                    } catch (const std::exception& e) {
                        if (!errors) throw;
                        errors->push_back(describe_point(pt) + ": " + e.what());
                    }
                }
            }
        }
    }
    return out;
}

std::string csv_header() {
    return "d,policy,tau_effective,p,egr_hz,shots,failures,ler,ci_low,ci_high,seed,wall_s";
}

std::string csv_row(const SimResult& r) {
    std::string s;
    s += std::to_string(r.d);
    s += ',';
    s += r.policy;
    s += ',';
    s += std::to_string(r.tau_effective);
    s += ',';
    s += fmt_double(r.p);
    s += ',';
    s += fmt_double(r.egr_hz);
    s += ',';
    s += std::to_string(r.shots);
    s += ',';
    s += std::to_string(r.failures);
    s += ',';
    s += fmt_double(r.ler);
    s += ',';
    s += fmt_double(r.ci_low);
    s += ',';
    s += fmt_double(r.ci_high);
    s += ',';
    s += std::to_string(r.seed);
    s += ',';
    s += fmt_double(r.wall_s);
    return s;
}

SimResult parse_csv_row(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    if (f.size() != 12) throw std::runtime_error("parse-error: expected 12 CSV fields");
    SimResult r;
    r.d = parse_int_field<int>(f[0], "d");
    r.policy = f[1];
    r.tau_effective = parse_int_field<int>(f[2], "tau_effective");
    r.p = parse_double_field(f[3], "p");
    r.egr_hz = parse_double_field(f[4], "egr_hz");
    r.shots = parse_int_field<int64_t>(f[5], "shots");
    r.failures = parse_int_field<int64_t>(f[6], "failures");
    r.ler = parse_double_field(f[7], "ler");
    r.ci_low = parse_double_field(f[8], "ci_low");
    r.ci_high = parse_double_field(f[9], "ci_high");
    r.seed = parse_int_field<uint64_t>(f[10], "seed");
    r.wall_s = parse_double_field(f[11], "wall_s");
    return r;
}

std::string json_row(const SimResult& r) {
    nlohmann::json j;
    j["d"] = r.d;
    j["policy"] = r.policy;
    j["tau_effective"] = r.tau_effective;
    j["p"] = r.p;
    j["egr_hz"] = r.egr_hz;
    j["shots"] = r.shots;
    j["failures"] = r.failures;
    j["ler"] = r.ler;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["seed"] = r.seed;
    j["wall_s"] = r.wall_s;
    return j.dump();
}

SimResult parse_json_row(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("parse-error: ") + e.what());
    }
    SimResult r;
    try {
        r.d = j.at("d").get<int>();
        r.policy = j.at("policy").get<std::string>();
        r.tau_effective = j.at("tau_effective").get<int>();
        r.p = j.at("p").get<double>();
        r.egr_hz = j.at("egr_hz").get<double>();
        r.shots = j.at("shots").get<int64_t>();
        r.failures = j.at("failures").get<int64_t>();
        r.ler = j.at("ler").get<double>();
        r.ci_low = j.at("ci_low").get<double>();
        r.ci_high = j.at("ci_high").get<double>();
        r.seed = j.at("seed").get<uint64_t>();
        r.wall_s = j.at("wall_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("parse-error: ") + e.what());
    }
    return r;
}

std::vector<PointSpec> completed_points(const std::string& path, const std::string& format) {
    std::vector<PointSpec> done;
    std::ifstream in(path);
    if (!in) return done;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == csv_header()) continue;
        SimResult r = format == "json" ? parse_json_row(line) : parse_csv_row(line);
        done.push_back({r.d, r.policy, r.p, r.egr_hz});
    }
    return done;
}

void emit_plots(const std::vector<SimResult>& rows, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::map<std::pair<int, std::string>, std::vector<std::pair<double, double>>> curves;
    for (const auto& r : rows) curves[{r.d, r.policy}].push_back({r.egr_hz, r.ler});
    for (auto& [key, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        const std::string path =
            dir + "/" + std::to_string(key.first) + "_" + key.second + ".dat";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("io-error: cannot write '" + path + "'");
        for (const auto& [egr, ler] : pts) out << fmt_double(egr) << ' ' << fmt_double(ler) << '\n';
    }
}

double calibrate_rc(const ExperimentConfig& cfg, int d, double p,
                    const std::vector<double>& sweep) {
    auto runner = [&](double egr_hz, int tau) {
        PointSpec pt{d, "ss:" + std::to_string(tau), p, egr_hz};
        SimResult r = run_point(cfg, pt);
        // Zero observed failures still needs a positive estimate; half an
        // event over the sample is the usual stand-in.
        return r.failures > 0 ? r.ler : 0.5 / static_cast<double>(r.shots);
    };
    return estimate_crossover_rate(d, sweep, runner);
}

} // namespace seamsim
