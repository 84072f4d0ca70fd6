#include "seamsim/circuit.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace seamsim {

uint32_t CircuitIR::num_measurements() const {
    uint32_t n = 0;
    for (const auto& ins : instructions)
        if (ins.gate == Gate::MZ) n += static_cast<uint32_t>(ins.targets.size());
    return n;
}

const char* gate_name(Gate g) {
    switch (g) {
    case Gate::R: return "R";
    case Gate::RX: return "RX";
    case Gate::H: return "H";
    case Gate::CX: return "CX";
    case Gate::MZ: return "MZ";
    case Gate::IDLE: return "IDLE";
    }
    return "?";
}

static void check_prob(double p, const char* what) {
    if (!(p >= 0.0) || !(p <= 1.0) || !std::isfinite(p))
        throw std::invalid_argument(std::string("invalid-circuit: ") + what +
                                    " probability out of [0,1]");
}

void validate_circuit(const CircuitIR& c) {
    for (const auto& ins : c.instructions) {
        if (ins.targets.empty())
            throw std::invalid_argument("invalid-circuit: instruction with no targets");
        for (uint32_t t : ins.targets)
            if (t >= c.num_qubits)
                throw std::invalid_argument("invalid-circuit: target out of range");
        if (ins.gate == Gate::CX && ins.targets.size() % 2 != 0)
            throw std::invalid_argument("invalid-circuit: CX needs (control, target) pairs");
        switch (ins.noise.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Dep1:
            if (ins.gate == Gate::CX)
                throw std::invalid_argument("invalid-circuit: DEP1 on a 2-qubit gate");
            check_prob(ins.noise.p, "DEP1");
            break;
        case NoiseKind::Dep2:
            if (ins.gate != Gate::CX)
                throw std::invalid_argument("invalid-circuit: DEP2 on a 1-qubit gate");
            check_prob(ins.noise.p, "DEP2");
            break;
        case NoiseKind::Flip:
            if (ins.gate != Gate::MZ)
                throw std::invalid_argument("invalid-circuit: FLIP on a non-measurement");
            check_prob(ins.noise.p, "FLIP");
            break;
        case NoiseKind::Pauli1:
            check_prob(ins.noise.px, "PAULI1 x");
            check_prob(ins.noise.py, "PAULI1 y");
            check_prob(ins.noise.pz, "PAULI1 z");
            if (ins.noise.px + ins.noise.py + ins.noise.pz > 1.0)
                throw std::invalid_argument("invalid-circuit: PAULI1 probabilities sum > 1");
            break;
        }
    }
    const uint32_t m = c.num_measurements();
    for (const auto& det : c.detectors)
        for (uint32_t idx : det)
            if (idx >= m)
                throw std::invalid_argument("invalid-circuit: detector references missing measurement");
    for (uint32_t idx : c.observable)
        if (idx >= m)
            throw std::invalid_argument("invalid-circuit: observable references missing measurement");
    if (c.detector_meta.size() != c.detectors.size())
        throw std::invalid_argument("invalid-circuit: detector_meta size mismatch");
}

static void append_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

std::string serialize(const CircuitIR& c) {
    std::string out = "SEAMSIM 1\nQUBITS ";
    out += std::to_string(c.num_qubits);
    out += '\n';
    for (const auto& ins : c.instructions) {
        out += gate_name(ins.gate);
        for (uint32_t t : ins.targets) {
            out += ' ';
            out += std::to_string(t);
        }
        switch (ins.noise.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Dep1:
            out += " !DEP1 ";
            append_double(out, ins.noise.p);
            break;
        case NoiseKind::Dep2:
            out += " !DEP2 ";
            append_double(out, ins.noise.p);
            break;
        case NoiseKind::Flip:
            out += " !FLIP ";
            append_double(out, ins.noise.p);
            break;
        case NoiseKind::Pauli1:
            out += " !PAULI1 ";
            append_double(out, ins.noise.px);
            out += ' ';
            append_double(out, ins.noise.py);
            out += ' ';
            append_double(out, ins.noise.pz);
            break;
        }
        out += '\n';
    }
    for (size_t d = 0; d < c.detectors.size(); ++d) {
        out += "DETECTOR";
        if (d < c.detector_meta.size() && c.detector_meta[d].tagged()) {
            const auto& meta = c.detector_meta[d];
            out += '(';
            out += std::to_string(meta.face);
            out += ',';
            out += std::to_string(meta.color);
            out += ',';
            out += std::to_string(meta.x_type);
            out += ',';
            out += std::to_string(meta.round);
            out += ')';
        }
        for (uint32_t m : c.detectors[d]) {
            out += ' ';
            out += std::to_string(m);
        }
        out += '\n';
    }
    if (!c.observable.empty()) {
        out += "OBSERVABLE";
        for (uint32_t m : c.observable) {
            out += ' ';
            out += std::to_string(m);
        }
        out += '\n';
    }
    return out;
}

namespace {

struct LineParser {
    const std::string& line;
    size_t pos = 0;
    int line_no;

    LineParser(const std::string& l, int n) : line(l), line_no(n) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("parse-error: line " + std::to_string(line_no) + ": " + what);
    }

    void skip_ws() {
        while (pos < line.size() && line[pos] == ' ') ++pos;
    }

    bool done() {
        skip_ws();
        return pos >= line.size();
    }

    std::string token() {
        skip_ws();
        size_t start = pos;
        while (pos < line.size() && line[pos] != ' ') ++pos;
        return line.substr(start, pos - start);
    }

    uint32_t parse_u32(const std::string& tok) {
        uint32_t v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            fail("expected unsigned integer, got '" + tok + "'");
        return v;
    }

    int32_t parse_i32(const std::string& tok) {
        int32_t v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            fail("expected integer, got '" + tok + "'");
        return v;
    }

    double parse_f64(const std::string& tok) {
        double v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            fail("expected number, got '" + tok + "'");
        return v;
    }
};

} // namespace

CircuitIR parse(const std::string& text) {
    CircuitIR c;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool saw_header = false, saw_qubits = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        LineParser lp(line, line_no);
        std::string head = lp.token();
        if (!saw_header) {
            if (head != "SEAMSIM" || lp.token() != "1" || !lp.done())
                lp.fail("expected header 'SEAMSIM 1'");
            saw_header = true;
            continue;
        }
        if (!saw_qubits) {
            if (head != "QUBITS") lp.fail("expected 'QUBITS <n>'");
            c.num_qubits = lp.parse_u32(lp.token());
            if (!lp.done()) lp.fail("trailing tokens after qubit count");
            saw_qubits = true;
            continue;
        }
        if (head == "OBSERVABLE") {
            if (!c.observable.empty()) lp.fail("duplicate OBSERVABLE line");
            while (!lp.done()) c.observable.push_back(lp.parse_u32(lp.token()));
            continue;
        }
        if (head.rfind("DETECTOR", 0) == 0) {
            DetectorMeta meta;
            std::string suffix = head.substr(8);
            if (!suffix.empty()) {
                if (suffix.front() != '(' || suffix.back() != ')')
                    lp.fail("malformed detector metadata '" + suffix + "'");
                std::string body = suffix.substr(1, suffix.size() - 2);
                int32_t vals[4];
                size_t start = 0;
                for (int i = 0; i < 4; ++i) {
                    size_t comma = body.find(',', start);
                    bool last = (i == 3);
                    if (last != (comma == std::string::npos))
                        lp.fail("detector metadata needs 4 fields");
                    std::string field =
                        body.substr(start, last ? std::string::npos : comma - start);
                    vals[i] = lp.parse_i32(field);
                    start = comma + 1;
                }
                meta = DetectorMeta{vals[0], vals[1], vals[2], vals[3]};
            }
            std::vector<uint32_t> dets;
            while (!lp.done()) dets.push_back(lp.parse_u32(lp.token()));
            c.detectors.push_back(std::move(dets));
            c.detector_meta.push_back(meta);
            continue;
        }
        Instruction ins;
        if (head == "R") ins.gate = Gate::R;
        else if (head == "RX") ins.gate = Gate::RX;
        else if (head == "H") ins.gate = Gate::H;
        else if (head == "CX") ins.gate = Gate::CX;
        else if (head == "MZ") ins.gate = Gate::MZ;
        else if (head == "IDLE") ins.gate = Gate::IDLE;
        else lp.fail("unknown gate '" + head + "'");
        while (!lp.done()) {
            std::string tok = lp.token();
            if (!tok.empty() && tok[0] == '!') {
                if (ins.noise.kind != NoiseKind::None) lp.fail("duplicate noise suffix");
                if (tok == "!DEP1") {
                    ins.noise.kind = NoiseKind::Dep1;
                    ins.noise.p = lp.parse_f64(lp.token());
                } else if (tok == "!DEP2") {
                    ins.noise.kind = NoiseKind::Dep2;
                    ins.noise.p = lp.parse_f64(lp.token());
                } else if (tok == "!FLIP") {
                    ins.noise.kind = NoiseKind::Flip;
                    ins.noise.p = lp.parse_f64(lp.token());
                } else if (tok == "!PAULI1") {
                    ins.noise.kind = NoiseKind::Pauli1;
                    ins.noise.px = lp.parse_f64(lp.token());
                    ins.noise.py = lp.parse_f64(lp.token());
                    ins.noise.pz = lp.parse_f64(lp.token());
                } else {
                    lp.fail("unknown noise suffix '" + tok + "'");
                }
                if (!lp.done()) lp.fail("trailing tokens after noise suffix");
                break;
            }
            ins.targets.push_back(lp.parse_u32(tok));
        }
        if (ins.targets.empty()) lp.fail("instruction with no targets");
        c.instructions.push_back(std::move(ins));
    }
    if (!saw_header) throw std::runtime_error("parse-error: line 1: missing header");
    if (!saw_qubits) throw std::runtime_error("parse-error: line 2: missing QUBITS line");
    validate_circuit(c);
    return c;
}

} // namespace seamsim
