#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "reflex/common.hpp"
#include "reflex/deliberation/dual_system.hpp"
#include "reflex/emotion/emotion.hpp"
#include "reflex/evolve/evolve.hpp"
#include "reflex/harness/trainer.hpp"

namespace reflex::harness {

enum class Mode { Train, Sample, Repl, Evaluate, Evolve };

struct SampleConfig {
    long long length = 200;
    double temperature = 1.0;
    std::string prime = "\n";
    bool gated = false;  // route through the A/B deliberation pipeline
};

struct DeliberationSettings {
    bool enabled = false;
    bool b_identical_init = true;
    deliberation::DualConfig dual;
    int ask_response_bytes = 64;
};

struct EvolveSettings {
    int mu = 2;
    int lambda = 4;
    int generations = 3;
    evolve::FitnessSpec fitness{1.0, 200};
    evolve::SafetyCap cap;
    evolve::SearchSpace space;
};

// Everything one CLI invocation needs.
struct RunConfig {
    evolve::MetaParams meta;
    TrainConfig train;
    SampleConfig sample;
    DeliberationSettings deliberation;
    EvolveSettings evolve;
    bool zero_recurrence = false;
    std::string corpus;
    std::string checkpoint = "reflex.ckpt";
    std::string log;
    std::string transcript;
    Mode mode = Mode::Train;

    // Keeps the derived fields consistent with the meta-parameters.
    void sync() {
        meta.topology.emotion_count = static_cast<int>(train.emotions.count());
        meta.emotion_count = meta.topology.emotion_count;
        train.learning_rate = meta.learning_rate;
        train.horizon = meta.horizon;
        train.emotions.inertia = meta.inertia;
        deliberation.dual.decision_hidden = meta.decision_hidden;
        meta.dual = deliberation.enabled;
    }

    void validate() const {
        meta.topology.validate();
        train.emotions.validate();
        if (train.steps < 0) throw ConfigError("steps must be >= 0");
        if (meta.horizon < 1) throw ConfigError("horizon must be >= 1");
        if (!(sample.temperature > 0.0)) throw ConfigError("temperature must be > 0");
        if (sample.length < 0) throw ConfigError("sample length must be >= 0");
        if (train.input_confidence < 0.0 || train.input_confidence > 1.0)
            throw ConfigError("input confidence must lie in [0, 1]");
        if (train.emotions.extraction == emotion::ExtractionMode::TopNeuron &&
            static_cast<int>(train.emotions.count()) > meta.topology.top_width())
            throw ConfigError("more emotions than top-layer neurons");
        deliberation.dual.gate_mode.validate();
    }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T v{};
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_scalar<T>(key, part));
    return out;
}

class Reader {
public:
    explicit Reader(const boost::property_tree::ptree& pt) : pt_(pt) {}

    std::optional<std::string> raw(const std::string& path) const {
        if (auto v = pt_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.')))
            return trim(*v);
        return std::nullopt;
    }
    template <typename T>
    void get(const std::string& path, T& out) const {
        if (auto v = raw(path)) {
            if constexpr (std::is_same_v<T, bool>)
                out = parse_bool(path, *v);
            else if constexpr (std::is_same_v<T, std::string>)
                out = *v;
            else
                out = parse_scalar<T>(path, *v);
        }
    }

private:
    const boost::property_tree::ptree& pt_;
};

}  // namespace config_detail

// Flat "key = value" text with [section] headers, e.g.
//
//   [network]
//   hidden = 128, 128
//   [emotion]
//   inertia = 0.8
inline RunConfig parse_config(const std::string& text) {
    using namespace config_detail;
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
    }

    static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
        {"run", {"seed", "mode"}},
        {"paths", {"corpus", "checkpoint", "log", "transcript"}},
        {"network", {"j_max", "hidden", "decoder_layers", "k_act", "n_cells", "p", "c", "zero_recurrence"}},
        {"training", {"learning_rate", "horizon", "steps", "clip_norm", "cross_entropy_weight", "prediction_weight",
                      "input_confidence", "hedonic_every", "log_every"}},
        {"emotion", {"labels", "extraction", "rescale", "inertia", "coupling", "hedonic_signs", "hedonic_rate",
                     "weight_bound", "surprise"}},
        {"areas", {}},
        {"memory", {"stack_registers", "stack_width"}},
        {"deliberation", {"enabled", "b_identical_init", "n_decision", "gate", "output_mode", "granularity",
                          "buffer_cells", "decision_hidden", "proposal_temperature", "ask_response_bytes"}},
        {"sample", {"length", "temperature", "prime", "gated"}},
        {"evolve", {"mu", "lambda", "generations", "target_loss", "max_iterations", "cap", "hidden_step",
                    "learning_rate_sigma", "learning_rate_grid", "mutate_hidden"}},
    };
    for (const auto& [section, child] : pt) {
        auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
        if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
        if (section == "areas") continue;
        for (const auto& [key, v] : child) {
            (void)v;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError("unknown config key " + section + "." + key);
        }
    }

    Reader r(pt);
    RunConfig c;
    auto& m = c.meta;
    auto& topo = m.topology;

    r.get("run.seed", m.seed);
    if (auto mode = r.raw("run.mode")) {
        if (*mode == "train") c.mode = Mode::Train;
        else if (*mode == "sample") c.mode = Mode::Sample;
        else if (*mode == "repl") c.mode = Mode::Repl;
        else if (*mode == "evaluate") c.mode = Mode::Evaluate;
        else if (*mode == "evolve") c.mode = Mode::Evolve;
        else throw ConfigError("unknown run.mode '" + *mode + "'");
    }

    r.get("paths.corpus", c.corpus);
    r.get("paths.checkpoint", c.checkpoint);
    r.get("paths.log", c.log);
    r.get("paths.transcript", c.transcript);

    r.get("network.j_max", topo.j_max);
    if (auto h = r.raw("network.hidden")) topo.hidden = parse_list<int>("network.hidden", *h);
    else topo.hidden.assign(static_cast<std::size_t>(std::max(topo.j_max, 1)), 128);
    r.get("network.decoder_layers", topo.decoder_layers);
    r.get("network.k_act", topo.k_act);
    r.get("network.n_cells", topo.n_cells);
    r.get("network.p", topo.p);
    r.get("network.c", topo.c);
    r.get("network.zero_recurrence", c.zero_recurrence);

    r.get("training.learning_rate", m.learning_rate);
    r.get("training.horizon", m.horizon);
    r.get("training.steps", c.train.steps);
    r.get("training.clip_norm", c.train.clip_norm);
    r.get("training.cross_entropy_weight", c.train.loss.cross_entropy);
    r.get("training.prediction_weight", c.train.loss.prediction);
    r.get("training.input_confidence", c.train.input_confidence);
    r.get("training.hedonic_every", c.train.hedonic_every);
    r.get("training.log_every", c.train.log_every);

    auto& e = c.train.emotions;
    if (auto labels = r.raw("emotion.labels")) {
        e.labels = split(*labels, ',');
        e.hedonic_sign.assign(e.labels.size(), 1);
        e.surprise_index.reset();
        for (std::size_t i = 0; i < e.labels.size(); ++i)
            if (e.labels[i] == "surprise") e.surprise_index = i;
    }
    if (auto x = r.raw("emotion.extraction")) {
        if (*x == "top_neuron") e.extraction = emotion::ExtractionMode::TopNeuron;
        else if (*x == "layer_sum") e.extraction = emotion::ExtractionMode::LayerSum;
        else throw ConfigError("emotion.extraction must be top_neuron or layer_sum");
    }
    if (auto x = r.raw("emotion.rescale")) {
        if (*x == "tanh") e.rescale = emotion::Rescale::Tanh;
        else if (*x == "identity") e.rescale = emotion::Rescale::Identity;
        else throw ConfigError("emotion.rescale must be tanh or identity");
    }
    r.get("emotion.inertia", m.inertia);
    if (auto x = r.raw("emotion.coupling")) {
        // Rows separated by ';', entries by ','.
        const auto rows = split(*x, ';');
        const auto n = static_cast<Eigen::Index>(e.labels.size());
        if (static_cast<Eigen::Index>(rows.size()) != n) throw ConfigError("emotion.coupling needs one row per emotion");
        e.coupling = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto vals = parse_list<double>("emotion.coupling", rows[static_cast<std::size_t>(i)]);
            if (static_cast<Eigen::Index>(vals.size()) != n) throw ConfigError("emotion.coupling row has wrong length");
            for (Eigen::Index j = 0; j < n; ++j) e.coupling(i, j) = vals[static_cast<std::size_t>(j)];
        }
    }
    if (auto x = r.raw("emotion.hedonic_signs")) e.hedonic_sign = parse_list<int>("emotion.hedonic_signs", *x);
    r.get("emotion.hedonic_rate", e.hedonic_rate);
    r.get("emotion.weight_bound", e.weight_bound);
    if (auto x = r.raw("emotion.surprise")) {
        if (*x == "none") e.surprise_index.reset();
        else if (auto idx = emotion::EmotionVector::zeros(e.labels).index_of(*x)) e.surprise_index = *idx;
        else throw ConfigError("emotion.surprise names an unknown label");
    }

    // [areas] name = layer:first-last | u0, u1, ...
    if (auto areas = pt.get_child_optional("areas")) {
        for (const auto& [name, v] : *areas) {
            const auto text = v.get_value<std::string>();
            const auto bar = text.find('|');
            if (bar == std::string::npos) throw ConfigError("area " + name + " needs 'layer:first-last | sensitivities'");
            const auto where = trim(text.substr(0, bar));
            const auto colon = where.find(':');
            const auto dash = where.find('-');
            if (colon == std::string::npos || dash == std::string::npos)
                throw ConfigError("area " + name + " needs layer:first-last");
            const int layer = parse_scalar<int>("areas." + name, where.substr(0, colon));
            const int first = parse_scalar<int>("areas." + name, where.substr(colon + 1, dash - colon - 1));
            const int last = parse_scalar<int>("areas." + name, where.substr(dash + 1));
            emotion::CognitiveArea a;
            a.name = name;
            for (int k = first; k <= last; ++k) a.members.emplace_back(layer, k);
            const auto u = parse_list<double>("areas." + name, text.substr(bar + 1));
            a.sensitivity = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size()));
            c.train.areas.push_back(std::move(a));
        }
    }

    r.get("memory.stack_registers", m.stack_registers);
    r.get("memory.stack_width", m.stack_width);

    auto& d = c.deliberation;
    r.get("deliberation.enabled", d.enabled);
    r.get("deliberation.b_identical_init", d.b_identical_init);
    r.get("deliberation.n_decision", d.dual.n_decision);
    if (auto g = r.raw("deliberation.gate")) {
        if (*g == "single") d.dual.gate_mode = deliberation::GateMode::single();
        else if (g->rfind("majority:", 0) == 0)
            d.dual.gate_mode = deliberation::GateMode::majority(parse_scalar<int>("deliberation.gate", g->substr(9)));
        else throw ConfigError("deliberation.gate must be single or majority:<odd n>");
    }
    if (auto o = r.raw("deliberation.output_mode")) {
        if (*o == "release") d.dual.output_mode = deliberation::OutputMode::ReleaseA;
        else if (*o == "substitute") d.dual.output_mode = deliberation::OutputMode::SubstituteB;
        else throw ConfigError("deliberation.output_mode must be release or substitute");
    }
    if (auto g = r.raw("deliberation.granularity")) {
        if (*g == "byte") d.dual.granularity = deliberation::Granularity::PerByte;
        else if (*g == "sentence") d.dual.granularity = deliberation::Granularity::Sentence;
        else throw ConfigError("deliberation.granularity must be byte or sentence");
    }
    r.get("deliberation.buffer_cells", d.dual.buffer_cells);
    r.get("deliberation.decision_hidden", m.decision_hidden);
    r.get("deliberation.proposal_temperature", d.dual.proposal_temperature);
    r.get("deliberation.ask_response_bytes", d.ask_response_bytes);

    r.get("sample.length", c.sample.length);
    r.get("sample.temperature", c.sample.temperature);
    if (auto p = r.raw("sample.prime")) {
        // \n escapes allowed in the prime text.
        std::string out;
        for (std::size_t i = 0; i < p->size(); ++i) {
            if ((*p)[i] == '\\' && i + 1 < p->size() && (*p)[i + 1] == 'n') {
                out += '\n';
                ++i;
            } else {
                out += (*p)[i];
            }
        }
        c.sample.prime = out;
    }
    r.get("sample.gated", c.sample.gated);

    auto& ev = c.evolve;
    r.get("evolve.mu", ev.mu);
    r.get("evolve.lambda", ev.lambda);
    r.get("evolve.generations", ev.generations);
    r.get("evolve.target_loss", ev.fitness.target_loss);
    r.get("evolve.max_iterations", ev.fitness.max_iterations);
    r.get("evolve.cap", ev.cap.max_total_neurons);
    r.get("evolve.hidden_step", ev.space.hidden_step);
    r.get("evolve.mutate_hidden", ev.space.mutate_hidden);
    r.get("evolve.learning_rate_sigma", ev.space.learning_rate_sigma);
    if (auto g = r.raw("evolve.learning_rate_grid"))
        ev.space.learning_rate_grid = parse_list<double>("evolve.learning_rate_grid", *g);

    c.sync();
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UnreadablePath("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace reflex::harness
