#include "deadpatch/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace deadpatch {

size_t Circuit::num_outcomes() const {
    size_t n = 0;
    for (const auto &step : steps)
        for (const auto &op : step)
            if (op_is_measurement(op.kind)) ++n;
    return n;
}

size_t Circuit::num_operations() const {
    size_t n = 0;
    for (const auto &step : steps) n += step.size();
    return n;
}

void Circuit::renumber_outcomes(int64_t base) {
    int64_t next = base;
    for (auto &step : steps)
        for (auto &op : step)
            if (op_is_measurement(op.kind)) op.outcome = next++;
}

void Circuit::canonicalize() {
    for (auto &step : steps)
        std::stable_sort(step.begin(), step.end(),
                         [](const Operation &a, const Operation &b) { return a.q1 < b.q1; });
}

std::vector<std::string> validate(const Circuit &c) {
    std::vector<std::string> out;
    for (size_t s = 0; s < c.steps.size(); ++s) {
        std::vector<int> used(c.n_qubits, -1);
        for (size_t i = 0; i < c.steps[s].size(); ++i) {
            const Operation &op = c.steps[s][i];
            uint32_t targets[2] = {op.q1, op.q2};
            size_t nt = op.num_targets();
            if (op.kind == OpKind::MeasPP) {
                if (nt != 2 || op.q1 == op.q2)
                    out.push_back("step " + std::to_string(s) +
                                  ": MPP needs two distinct targets (q" +
                                  std::to_string(op.q1) + ")");
            } else if (nt != 1) {
                out.push_back("step " + std::to_string(s) + ": op on q" +
                              std::to_string(op.q1) + " takes one target");
            }
            for (size_t ti = 0; ti < nt; ++ti) {
                uint32_t q = targets[ti];
                if (q == kNoQubit) continue;
                if (q >= c.n_qubits) {
                    out.push_back("step " + std::to_string(s) + ": qubit " +
                                  std::to_string(q) + " out of range");
                    continue;
                }
                if (used[q] >= 0)
                    out.push_back("step " + std::to_string(s) + ": qubit " +
                                  std::to_string(q) + " used twice");
                used[q] = int(i);
            }
        }
    }
    return out;
}

Circuit concat(const Circuit &a, const Circuit &b) {
    if (a.n_qubits != b.n_qubits)
        throw std::invalid_argument("concat: qubit-count mismatch");
    Circuit out = a;
    out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
    out.renumber_outcomes();
    return out;
}

void CircuitTriple::renumber() {
    prior.renumber_outcomes(0);
    body.renumber_outcomes(int64_t(prior.num_outcomes()));
    posterior.renumber_outcomes(int64_t(prior.num_outcomes() + body.num_outcomes()));
}

Circuit CircuitTriple::concatenated() const {
    return concat(concat(prior, body), posterior);
}

namespace {

void emit_coord(std::ostringstream &os, int v2) {
    if (v2 % 2 == 0) {
        os << v2 / 2;
    } else {
        // Always of the form k.5; print without float formatting surprises.
        if (v2 < 0 && v2 / 2 == 0) os << "-0.5";
        else os << (v2 - (v2 > 0 ? 1 : -1)) / 2 << ".5";
    }
}

void emit_circuit(std::ostringstream &os, const Circuit &c) {
    bool first = true;
    for (const auto &step : c.steps) {
        if (!first) os << "tick\n";
        first = false;
        std::vector<Operation> ops = step;
        std::stable_sort(ops.begin(), ops.end(),
                         [](const Operation &a, const Operation &b) { return a.q1 < b.q1; });
        for (const auto &op : ops) {
            switch (op.kind) {
                case OpKind::InitX: os << "IX " << op.q1; break;
                case OpKind::InitZ: os << "IZ " << op.q1; break;
                case OpKind::MeasX: os << "MX " << op.q1; break;
                case OpKind::MeasZ: os << "MZ " << op.q1; break;
                case OpKind::Idle:  os << "IDLE " << op.q1; break;
                case OpKind::MeasPP:
                    os << "MPP " << pauli_char(op.p1) << ' ' << op.q1 << ' '
                       << pauli_char(op.p2) << ' ' << op.q2;
                    break;
            }
            os << '\n';
        }
    }
}

struct Parser {
    const std::string &text;
    size_t pos = 0;
    size_t line = 1;

    [[noreturn]] void fail(const std::string &reason) const {
        throw std::runtime_error("parse error at line " + std::to_string(line) +
                                 ": " + reason);
    }

    bool next_line(std::vector<std::string> &tokens) {
        tokens.clear();
        while (pos < text.size()) {
            size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string raw = text.substr(pos, end - pos);
            pos = end + (end < text.size() ? 1 : 0);
            size_t hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            std::istringstream iss(raw);
            std::string tok;
            while (iss >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
            ++line;
        }
        return false;
    }

    void consume_line() { ++line; }
};

int parse_coord_component(Parser &p, const std::string &tok) {
    // Accepts integers and k.5 halves.
    double v = 0;
    size_t consumed = 0;
    try {
        v = std::stod(tok, &consumed);
    } catch (...) {
        p.fail("bad coordinate '" + tok + "'");
    }
    if (consumed != tok.size()) p.fail("bad coordinate '" + tok + "'");
    double doubled = v * 2;
    int iv = int(doubled >= 0 ? doubled + 0.5 : doubled - 0.5);
    if (iv != doubled) p.fail("coordinate '" + tok + "' is not a half-integer");
    return iv;
}

uint32_t parse_qubit(Parser &p, const std::string &tok, uint32_t n_qubits) {
    uint32_t q = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), q);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        p.fail("bad qubit id '" + tok + "'");
    if (n_qubits && q >= n_qubits) p.fail("qubit id " + tok + " out of range");
    return q;
}

}  // namespace

std::string serialize(const CircuitTriple &t) {
    std::ostringstream os;
    os << "qubits " << t.n_qubits << '\n';
    for (uint32_t q = 0; q < t.coords.size(); ++q) {
        os << "coord " << q << ' ';
        emit_coord(os, t.coords[q].x2);
        os << ' ';
        emit_coord(os, t.coords[q].y2);
        os << '\n';
    }
    os << "section prior\n";
    emit_circuit(os, t.prior);
    os << "section body\n";
    emit_circuit(os, t.body);
    os << "section posterior\n";
    emit_circuit(os, t.posterior);
    return os.str();
}

CircuitTriple parse(const std::string &text) {
    Parser p{text};
    CircuitTriple t;
    std::vector<std::string> tok;
    Circuit *cur = nullptr;
    bool have_qubits = false;
    bool step_open = false;

    while (p.next_line(tok)) {
        const std::string &op = tok[0];
        if (op == "qubits") {
            if (tok.size() != 2) p.fail("qubits wants one count");
            t.n_qubits = parse_qubit(p, tok[1], 0);
            t.coords.resize(t.n_qubits);
            have_qubits = true;
        } else if (op == "coord") {
            if (!have_qubits) p.fail("coord before qubits");
            if (tok.size() != 4) p.fail("coord wants id x y");
            uint32_t q = parse_qubit(p, tok[1], t.n_qubits);
            t.coords[q] = Coord{parse_coord_component(p, tok[2]),
                                parse_coord_component(p, tok[3])};
        } else if (op == "section") {
            if (!have_qubits) p.fail("section before qubits");
            if (tok.size() != 2) p.fail("section wants a name");
            if (tok[1] == "prior") cur = &t.prior;
            else if (tok[1] == "body") cur = &t.body;
            else if (tok[1] == "posterior") cur = &t.posterior;
            else p.fail("unknown section '" + tok[1] + "'");
            cur->n_qubits = t.n_qubits;
            step_open = false;
        } else if (op == "tick") {
            if (!cur) p.fail("tick outside a section");
            if (!step_open) cur->steps.emplace_back();  // empty leading step
            cur->steps.emplace_back();
            step_open = true;
        } else {
            if (!cur) p.fail("operation outside a section");
            if (!step_open) {
                cur->steps.emplace_back();
                step_open = true;
            }
            Operation o;
            if (op == "IX" || op == "IZ" || op == "MX" || op == "MZ" || op == "IDLE") {
                if (tok.size() != 2) p.fail(op + " wants one qubit");
                o.kind = op == "IX" ? OpKind::InitX
                       : op == "IZ" ? OpKind::InitZ
                       : op == "MX" ? OpKind::MeasX
                       : op == "MZ" ? OpKind::MeasZ
                                    : OpKind::Idle;
                o.q1 = parse_qubit(p, tok[1], t.n_qubits);
            } else if (op == "MPP") {
                if (tok.size() != 5) p.fail("MPP wants P q1 P q2");
                o.kind = OpKind::MeasPP;
                if (tok[1].size() != 1 || tok[3].size() != 1)
                    p.fail("MPP Pauli must be a single letter");
                o.p1 = pauli_from_char(tok[1][0]);
                o.p2 = pauli_from_char(tok[3][0]);
                if (o.p1 == PauliKind::I || o.p2 == PauliKind::I)
                    p.fail("MPP Pauli must be X, Y, or Z");
                o.q1 = parse_qubit(p, tok[2], t.n_qubits);
                o.q2 = parse_qubit(p, tok[4], t.n_qubits);
            } else {
                p.fail("unknown opcode '" + op + "'");
            }
            cur->steps.back().push_back(o);
        }
        p.consume_line();
    }
    if (!have_qubits) throw std::runtime_error("parse error at line 1: missing qubits header");
    t.renumber();
    return t;
}

}  // namespace deadpatch
