#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "reflex/evolve/init_weights.hpp"
#include "reflex/harness/agent.hpp"
#include "reflex/harness/config.hpp"
#include "reflex/harness/evaluate.hpp"
#include "reflex/harness/fitness.hpp"
#include "reflex/harness/session.hpp"
#include "reflex/harness/trainer.hpp"
#include "reflex/net/checkpoint.hpp"

namespace reflex::harness {

// Structured log sink: one key=value record per line.
class LogSink {
public:
    explicit LogSink(const std::string& path, std::ostream& fallback = std::cout) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::app);
            if (!file_) throw UnreadablePath("cannot open log " + path);
            out_ = &file_;
        }
    }
    void write(const std::string& record) { *out_ << record << '\n' << std::flush; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

struct TrainOutcome {
    net::Checkpoint checkpoint;
    TrainResult result;
};

// Full training run: cap check, seeded initialization, online loop. Does not
// touch the file system beyond reading the corpus.
inline TrainOutcome train_network(const RunConfig& cfg, std::shared_ptr<const memory::Corpus> corpus,
                                  const std::function<void(const LossPoint&)>& on_point = {}) {
    evolve::validate_cap(cfg.meta, cfg.evolve.cap);
    TrainOutcome o;
    auto w = evolve::init_weights(cfg.meta.topology, cfg.meta.seed);
    CorpusStream stream(std::move(corpus));
    o.result = Trainer(cfg.meta.topology, std::move(w), cfg.train).run(stream, on_point);
    o.checkpoint.topology = cfg.meta.topology;
    o.checkpoint.init_law = static_cast<std::uint32_t>(evolve::InitLaw::UniformFanIn);
    o.checkpoint.units.push_back(o.result.weights);
    return o;
}

inline std::shared_ptr<const memory::Corpus> load_corpus(const std::string& path) {
    if (path.empty()) throw ConfigError("no corpus path configured ([paths] corpus)");
    return std::make_shared<const memory::Corpus>(memory::ingest(path).first.corpus());
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
    auto [cursor, stats] = memory::ingest(cfg.corpus);
    LogSink log(cfg.log, out);
    log.write(format_kv({{"event", "corpus"},
                         {"documents", std::to_string(stats.documents)},
                         {"bytes", std::to_string(stats.bytes)},
                         {"depth", std::to_string(stats.depth)}}));
    auto corpus = std::make_shared<const memory::Corpus>(cursor.corpus());
    const auto o = train_network(cfg, corpus, [&](const LossPoint& p) {
        log.write(format_kv({{"event", "loss"},
                             {"update", std::to_string(p.update)},
                             {"step", std::to_string(p.step)},
                             {"cross_entropy", format_double(p.cross_entropy)}}));
    });
    net::save_checkpoint(o.checkpoint, cfg.checkpoint);
    log.write(format_kv({{"event", "done"},
                         {"steps", std::to_string(o.result.steps)},
                         {"updates", std::to_string(o.result.updates)},
                         {"checkpoint", percent_encode(cfg.checkpoint)}}));
    return 0;
}

inline int cmd_sample(const RunConfig& cfg, std::ostream& out) {
    const auto ck = net::load_checkpoint(cfg.checkpoint);
    if (ck.units.empty()) throw BadCheckpoint("checkpoint holds no unit");
    if (cfg.sample.gated) {
        out << sample_gated(make_dual(ck, cfg.deliberation, cfg.meta.seed), cfg.train, cfg.sample).text;
    } else {
        out << sample_text(ck.topology, ck.units[0], cfg.train, cfg.sample, cfg.meta.seed);
    }
    out << std::flush;
    return 0;
}

inline int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const auto ck = net::load_checkpoint(cfg.checkpoint);
    if (ck.units.empty()) throw BadCheckpoint("checkpoint holds no unit");
    EvaluationOptions opt;
    opt.zero_recurrence = cfg.zero_recurrence;
    out << evaluate(ck.topology, ck.units[0], cfg.train.emotions, opt).text << std::flush;
    return 0;
}

// Reads commands from `in` until EOF; each record is appended to the
// transcript file when one is configured.
inline int cmd_repl(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    const auto ck = net::load_checkpoint(cfg.checkpoint);
    Session s(cfg, ck, cfg.meta.seed);
    std::ofstream transcript;
    if (!cfg.transcript.empty()) {
        transcript.open(cfg.transcript, std::ios::trunc);
        if (!transcript) throw UnreadablePath("cannot write transcript " + cfg.transcript);
    }
    for (std::string line; std::getline(in, line);) {
        out << s.handle(line) << '\n' << std::flush;
        if (transcript) transcript << format_record(s.transcript().back()) << '\n' << std::flush;
    }
    return 0;
}

inline int cmd_replay(const RunConfig& cfg, const std::string& path, std::ostream& out) {
    const auto ck = net::load_checkpoint(cfg.checkpoint);
    const auto records = read_transcript(path);
    const auto diff = replay(cfg, ck, cfg.meta.seed, records);
    if (diff.empty()) {
        out << format_kv({{"replay", "identical"}, {"records", std::to_string(records.size())}}) << '\n';
        return 0;
    }
    std::string idx;
    for (std::size_t i = 0; i < diff.size(); ++i) idx += (i ? "," : "") + std::to_string(diff[i]);
    out << format_kv({{"replay", "differs"}, {"records", std::to_string(records.size())}, {"indices", idx}}) << '\n';
    return 1;
}

inline int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
    auto corpus = load_corpus(cfg.corpus);
    LogSink log(cfg.log, out);
    const auto& e = cfg.evolve;
    const auto r = evolve::evolve(cfg.meta, e.fitness, e.cap, e.mu, e.lambda, e.generations, cfg.meta.seed,
                                  corpus_fitness(corpus, cfg.train), e.space);
    for (const auto& rec : r.history) log.write(evolve::format_record(rec));
    log.write(format_kv({{"event", "best"},
                         {"fitness", std::to_string(r.best_fitness)},
                         {"params", percent_encode(r.best.canonical())}}));
    return 0;
}

}  // namespace reflex::harness
