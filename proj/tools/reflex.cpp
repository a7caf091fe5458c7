#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "reflex/harness/commands.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string checkpoint;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "configuration file (key = value with [sections])");
    app->add_option("--seed", c.seed, "random seed, overrides [run] seed");
    app->add_option("--checkpoint", c.checkpoint, "checkpoint path, overrides [paths] checkpoint");
}

reflex::harness::RunConfig resolve(const Common& c) {
    auto cfg = c.config.empty() ? reflex::harness::parse_config("") : reflex::harness::load_config(c.config);
    if (c.seed) cfg.meta.seed = *c.seed;
    if (!c.checkpoint.empty()) cfg.checkpoint = c.checkpoint;
    return cfg;
}

int fail(const std::string& code, const std::string& reason) {
    std::cerr << "error=" << code << " reason=" << reflex::harness::percent_encode(reason) << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace reflex::harness;
    CLI::App app{"reflexive recurrent network toolkit"};
    app.require_subcommand(1);

    Common train_c, sample_c, repl_c, eval_c, evolve_c;
    std::string corpus;
    std::optional<long long> steps, length;
    std::optional<double> temperature;
    std::string transcript, replay_path;
    bool zero_recurrence = false, gated = false;

    auto* train = app.add_subcommand("train", "train unit A on a corpus directory");
    add_common(train, train_c);
    train->add_option("--corpus", corpus, "corpus directory");
    train->add_option("--steps", steps, "network steps (characters)");

    auto* sample = app.add_subcommand("sample", "generate bytes from a checkpoint");
    add_common(sample, sample_c);
    sample->add_option("--length", length, "bytes to generate");
    sample->add_option("--temperature", temperature, "sampling temperature (> 0)");
    sample->add_flag("--gated", gated, "route generation through the deliberation gate");

    auto* repl = app.add_subcommand("repl", "interactive session on stdin");
    add_common(repl, repl_c);
    repl->add_option("--transcript", transcript, "write the session transcript here");
    repl->add_option("--replay", replay_path, "re-run a transcript and compare outputs");

    auto* evaluate = app.add_subcommand("evaluate", "capability profile and reflexivity index");
    add_common(evaluate, eval_c);
    evaluate->add_flag("--zero-recurrence", zero_recurrence, "evaluate with the recurrence matrix zeroed");

    auto* evolve = app.add_subcommand("evolve", "evolve meta-parameters under the safety cap");
    add_common(evolve, evolve_c);
    evolve->add_option("--corpus", corpus, "corpus directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what());
    }

    try {
        if (*train) {
            auto cfg = resolve(train_c);
            if (!corpus.empty()) cfg.corpus = corpus;
            if (steps) cfg.train.steps = *steps;
            cfg.validate();
            return cmd_train(cfg, std::cout);
        }
        if (*sample) {
            auto cfg = resolve(sample_c);
            if (length) cfg.sample.length = *length;
            if (temperature) cfg.sample.temperature = *temperature;
            if (gated) cfg.sample.gated = true;
            cfg.validate();
            return cmd_sample(cfg, std::cout);
        }
        if (*repl) {
            auto cfg = resolve(repl_c);
            if (!transcript.empty()) cfg.transcript = transcript;
            if (!replay_path.empty()) return cmd_replay(cfg, replay_path, std::cout);
            return cmd_repl(cfg, std::cin, std::cout);
        }
        if (*evaluate) {
            auto cfg = resolve(eval_c);
            if (zero_recurrence) cfg.zero_recurrence = true;
            return cmd_evaluate(cfg, std::cout);
        }
        if (*evolve) {
            auto cfg = resolve(evolve_c);
            if (!corpus.empty()) cfg.corpus = corpus;
            return cmd_evolve(cfg, std::cout);
        }
    } catch (const reflex::Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail("InternalError", e.what());
    }
    return fail("UsageError", "no command");
}
