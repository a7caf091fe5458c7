#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/deliberation/systolic_buffer.hpp"
#include "reflex/evolve/init_weights.hpp"
#include "reflex/net/sampling.hpp"
#include "reflex/net/unit.hpp"

namespace reflex::deliberation {

// Minimum steps between a proposal of unit A and its release: m = n + j'max.
constexpr long long delay(long long n, long long j_max_b) { return n + j_max_b; }

enum class Verdict { Output, Suppress };

struct GateMode {
    enum class Kind { SingleNeuron, MajorityGroup } kind = Kind::SingleNeuron;
    int group_size = 1;

    static GateMode single() { return {}; }
    static GateMode majority(int g) { return {Kind::MajorityGroup, g}; }
    int width() const { return kind == Kind::SingleNeuron ? 1 : group_size; }
    void validate() const {
        if (kind == Kind::MajorityGroup && (group_size < 1 || group_size % 2 == 0))
            throw ConfigError("majority gate needs an odd group size, got " + std::to_string(group_size));
    }
};

struct GateDecision {
    Verdict verdict = Verdict::Suppress;
    Vector decision_activations;
    long long step_of_decision = 0;
};

// Activation exactly 0.5 suppresses.
inline GateDecision gate(const Vector& activations, const GateMode& mode, long long step = 0) {
    mode.validate();
    if (activations.size() != mode.width())
        throw ConfigError("gate expects " + std::to_string(mode.width()) + " activations, got " +
                          std::to_string(activations.size()));
    GateDecision d{Verdict::Suppress, activations, step};
    if (mode.kind == GateMode::Kind::SingleNeuron) {
        d.verdict = activations[0] > 0.5 ? Verdict::Output : Verdict::Suppress;
    } else {
        int votes = 0;
        for (int i = 0; i < activations.size(); ++i) votes += activations[i] > 0.5 ? 1 : 0;
        d.verdict = 2 * votes > mode.group_size ? Verdict::Output : Verdict::Suppress;
    }
    return d;
}

// Supplementary layers on top of unit B: tanh hidden layer, then logistic
// decision neuron(s).
struct DecisionHead {
    Matrix W1;
    Vector b1;
    Matrix W2;
    Vector b2;

    static DecisionHead init(int input_width, int hidden, int outputs, std::uint64_t seed) {
        DecisionHead h;
        h.W1.resize(hidden, input_width);
        h.W2.resize(outputs, hidden);
        const double r1 = 1.0 / std::sqrt(static_cast<double>(input_width));
        const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (int i = 0; i < hidden; ++i)
            for (int j = 0; j < input_width; ++j)
                h.W1(i, j) = (2.0 * evolve::init_draw(seed, 1000, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) - 1.0) * r1;
        for (int i = 0; i < outputs; ++i)
            for (int j = 0; j < hidden; ++j)
                h.W2(i, j) = (2.0 * evolve::init_draw(seed, 1001, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) - 1.0) * r2;
        h.b1 = Vector::Zero(hidden);
        h.b2 = Vector::Zero(outputs);
        return h;
    }

    Vector hidden(const Vector& x) const { return (W1 * x + b1).array().tanh().matrix(); }
    Vector forward(const Vector& x) const { return net::logistic<double>(W2 * hidden(x) + b2); }

    // One gradient step on the logistic loss toward `target` (0 or 1 per output).
    double train_step(const Vector& x, double target, double lr) {
        const Vector h = hidden(x);
        const Vector y = net::logistic<double>(W2 * h + b2);
        const Vector dy = (y.array() - target).matrix();
        const Vector dh = ((W2.transpose() * dy).array() * (1.0 - h.array().square())).matrix();
        W2 -= lr * dy * h.transpose();
        b2 -= lr * dy;
        W1 -= lr * dh * x.transpose();
        b1 -= lr * dh;
        double loss = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double yi = std::clamp(y[i], 1e-12, 1.0 - 1e-12);
            loss -= target * std::log(yi) + (1.0 - target) * std::log(1.0 - yi);
        }
        return loss;
    }

    std::vector<Matrix> blocks() const { return {W1, b1, W2, b2}; }
    static DecisionHead from_blocks(const std::vector<Matrix>& b) {
        if (b.size() != 4) throw BadCheckpoint("decision head needs 4 blocks");
        DecisionHead h{b[0], b[1], b[2], b[3]};
        if (h.W1.rows() != h.b1.size() || h.W2.cols() != h.W1.rows() || h.W2.rows() != h.b2.size())
            throw BadCheckpoint("decision head blocks disagree in shape");
        return h;
    }
};

enum class OutputMode { ReleaseA, SubstituteB };
enum class Granularity { PerByte, Sentence };

struct DualConfig {
    int n_decision = 0;
    GateMode gate_mode = GateMode::single();
    OutputMode output_mode = OutputMode::ReleaseA;
    Granularity granularity = Granularity::PerByte;
    int buffer_cells = 4;
    int decision_hidden = 16;
    double proposal_temperature = 0.0;  // 0: greedy proposals
    double input_confidence = 1.0;
    std::optional<Verdict> pinned_verdict;  // test hook: forces every decision
};

struct TraceRecord {
    long long step = 0;
    std::uint8_t proposal = 0;
    std::uint64_t buffer_digest = 0;
    std::optional<Verdict> verdict;  // decision taken this step (per-byte mode: about one proposal)
    std::vector<std::uint8_t> emitted;
};

inline std::string format_trace(const TraceRecord& r) {
    std::string s = "step=" + std::to_string(r.step) + " proposal=" + std::to_string(r.proposal);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.buffer_digest));
    s += std::string(" buffer=") + buf;
    s += " verdict=";
    s += !r.verdict ? "none" : (*r.verdict == Verdict::Output ? "output" : "suppress");
    s += " emitted=";
    if (r.emitted.empty()) s += "null";
    for (std::size_t i = 0; i < r.emitted.size(); ++i) s += (i ? "," : "") + std::to_string(r.emitted[i]);
    return s;
}

// Unit A proposes, unit B watches the proposals through the systolic buffer
// and gates them. Both units advance in lock-step on one clock.
class DualSystem {
public:
    DualSystem(net::ReflexiveUnit a, net::ReflexiveUnit b, DecisionHead head, DualConfig cfg, std::uint64_t seed = 0)
        : a_(std::move(a)), b_(std::move(b)), head_(std::move(head)), cfg_(std::move(cfg)),
          buffer_(static_cast<std::size_t>(std::max(1, cfg_.buffer_cells))), rng_(seed) {
        cfg_.gate_mode.validate();
        if (cfg_.n_decision < 0) throw ConfigError("n_decision must be >= 0");
        if (head_.W1.cols() != b_.topo.top_width() || head_.W2.rows() != cfg_.gate_mode.width())
            throw ConfigError("decision head does not fit unit B / gate mode");
    }

    // B starts as a copy of A (b_identical) or from its own seed; the decision
    // head always gets fresh weights.
    static DualSystem create(const net::NetworkTopology& topo_a, const net::WeightStore& weights_a,
                             const net::NetworkTopology& topo_b, bool b_identical, std::uint64_t seed,
                             DualConfig cfg) {
        net::ReflexiveUnit a(topo_a, weights_a);
        net::WeightStore wb;
        if (b_identical) {
            if (!(topo_a == topo_b)) throw ConfigError("identical initialization needs equal topologies");
            wb = weights_a;
        } else {
            wb = evolve::init_weights(topo_b, seed ^ 0xB0B0B0B0ull);
        }
        net::ReflexiveUnit b(topo_b, std::move(wb));
        auto head = DecisionHead::init(topo_b.top_width(), cfg.decision_hidden, cfg.gate_mode.width(), seed ^ 0xDEC1DEull);
        return DualSystem(std::move(a), std::move(b), std::move(head), std::move(cfg), seed);
    }

    long long m() const { return delay(cfg_.n_decision, b_.topo.j_max); }
    long long step_count() const { return step_; }

    // One clock tick. Returns the trace record; emitted bytes are in record.emitted.
    TraceRecord deliberate_step(std::uint8_t external_byte, const Vector& emotions) {
        TraceRecord rec;
        rec.step = step_;

        a_.step(a_.input_for(external_byte, cfg_.input_confidence, emotions));
        const auto proposal = static_cast<std::uint8_t>(
            net::sample_char(a_.last.char_logits, cfg_.proposal_temperature, rng_));
        rec.proposal = proposal;
        buffer_.shift_in(proposal);
        pending_.push_back({proposal, step_, step_ + cfg_.n_decision, std::nullopt, 0, 0});

        b_.step(b_.input_for(buffer_.tail(), 1.0, emotions));
        last_decision_ = head_.forward(b_.state.top(b_.topo));
        rec.buffer_digest = buffer_.digest();

        decide(rec);
        release(rec);
        ++step_;
        return rec;
    }

    // Drains the pipeline by feeding A its own proposals for m steps.
    std::vector<TraceRecord> flush(const Vector& emotions) {
        std::vector<TraceRecord> out;
        for (long long i = 0; i < m(); ++i) {
            const auto next =
                a_.last.char_logits.size() > 0 ? static_cast<std::uint8_t>(net::argmax(a_.last.char_logits)) : std::uint8_t{0};
            out.push_back(deliberate_step(next, emotions));
        }
        return out;
    }

    const net::ReflexiveUnit& unit_a() const { return a_; }
    const net::ReflexiveUnit& unit_b() const { return b_; }
    net::ReflexiveUnit& unit_a() { return a_; }
    net::ReflexiveUnit& unit_b() { return b_; }
    DecisionHead& head() { return head_; }
    const DecisionHead& head() const { return head_; }
    const SystolicBuffer& buffer() const { return buffer_; }
    DualConfig& config() { return cfg_; }
    const Vector& last_decision_activations() const { return last_decision_; }

    // Emission log: (proposal step, emission step, byte).
    struct Emission {
        long long proposed_at, emitted_at;
        std::uint8_t byte;
    };
    const std::vector<Emission>& emissions() const { return emissions_; }

private:
    struct Pending {
        std::uint8_t byte;
        long long proposed_at;
        long long decide_at;
        std::optional<Verdict> verdict;
        std::uint8_t b_char;
        long long emit_at;
    };

    static bool is_flush_byte(std::uint8_t b) { return b == '\n' || b == '.'; }

    void decide(TraceRecord& rec) {
        const auto d = gate(last_decision_, cfg_.gate_mode, step_);
        const Verdict v = cfg_.pinned_verdict.value_or(d.verdict);
        const auto b_char = static_cast<std::uint8_t>(net::argmax(b_.last.char_logits));
        if (cfg_.granularity == Granularity::PerByte) {
            for (auto& p : pending_) {
                if (p.verdict || p.decide_at != step_) continue;
                p.verdict = v;
                p.b_char = b_char;
                p.emit_at = step_ + b_.topo.j_max;
                rec.verdict = v;
            }
            return;
        }
        // Sentence mode: a ready flush byte settles itself and everything before it.
        std::optional<std::size_t> last_ready;
        for (std::size_t i = 0; i < pending_.size(); ++i)
            if (!pending_[i].verdict && pending_[i].decide_at <= step_ && is_flush_byte(pending_[i].byte)) last_ready = i;
        if (!last_ready) return;
        for (std::size_t i = 0; i <= *last_ready; ++i) {
            auto& p = pending_[i];
            if (p.verdict) continue;
            p.verdict = v;
            p.b_char = b_char;
            p.emit_at = step_ + b_.topo.j_max;
        }
        rec.verdict = v;
    }

    void release(TraceRecord& rec) {
        while (!pending_.empty() && pending_.front().verdict && pending_.front().emit_at <= step_) {
            const auto p = pending_.front();
            pending_.pop_front();
            if (*p.verdict != Verdict::Output) continue;
            const auto byte = cfg_.output_mode == OutputMode::ReleaseA ? p.byte : p.b_char;
            rec.emitted.push_back(byte);
            emissions_.push_back({p.proposed_at, step_, byte});
        }
    }

    net::ReflexiveUnit a_;
    net::ReflexiveUnit b_;
    DecisionHead head_;
    DualConfig cfg_;
    SystolicBuffer buffer_;
    SplitMix rng_;
    std::deque<Pending> pending_;
    std::vector<Emission> emissions_;
    Vector last_decision_;
    long long step_ = 0;
};

}  // namespace reflex::deliberation
