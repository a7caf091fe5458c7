#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/evolve/init_weights.hpp"
#include "reflex/net/topology.hpp"

namespace reflex::evolve {

struct MetaParams {
    net::NetworkTopology topology;
    int stack_registers = 8;  // N
    int stack_width = 16;     // n
    int emotion_count = 9;
    double learning_rate = 0.03;
    int horizon = 32;
    double inertia = 0.8;
    bool dual = false;  // a unit B (plus decision head) is part of the system
    int decision_hidden = 16;
    std::uint64_t seed = 1;

    long long total_neurons() const {
        long long n = topology.total_neurons();
        if (dual) n += topology.total_neurons() + decision_hidden + 1;
        return n;
    }

    std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "j_max=" << topology.j_max << ";h=";
        for (int h : topology.hidden) os << h << ',';
        os << ";dec=" << topology.decoder_layers << ";p=" << topology.p << ";c=" << topology.c << ";k=" << topology.k_act
           << ";e=" << topology.emotion_count << ";n=" << topology.n_cells << ";N=" << stack_registers
           << ";w=" << stack_width << ";lr=" << learning_rate << ";hz=" << horizon << ";lambda=" << inertia
           << ";dual=" << dual << ";dh=" << decision_hidden << ";seed=" << seed;
        return os.str();
    }
    std::uint64_t digest() const { return fnv1a(canonical()); }
};

struct SafetyCap {
    long long max_total_neurons = 100000;
};

class SafetyCapExceeded : public Error {
public:
    SafetyCapExceeded(long long count, long long cap)
        : Error("SafetyCapExceeded", "neuron count " + std::to_string(count) + " is not below the cap of " +
                                         std::to_string(cap)),
          count_(count) {}
    long long count() const { return count_; }

private:
    long long count_;
};

// Passes iff the whole system stays strictly below the cap.
inline void validate_cap(const MetaParams& params, const SafetyCap& cap) {
    if (cap.max_total_neurons < 1) throw ConfigError("safety cap must be >= 1");
    const auto n = params.total_neurons();
    if (n >= cap.max_total_neurons) throw SafetyCapExceeded(n, cap.max_total_neurons);
}

// Every network built under evolution goes through guarded_init, which
// re-checks the cap and records the construction.
struct ConstructionLog {
    long long constructions = 0;
    long long max_neurons = 0;
    long long over_cap = 0;
};

inline ConstructionLog& construction_log() {
    static ConstructionLog log;
    return log;
}

inline net::WeightStore guarded_init(const MetaParams& params, const SafetyCap& cap) {
    validate_cap(params, cap);
    auto& log = construction_log();
    ++log.constructions;
    log.max_neurons = std::max(log.max_neurons, params.total_neurons());
    if (params.total_neurons() >= cap.max_total_neurons) ++log.over_cap;
    return init_weights(params.topology, params.seed);
}

struct FitnessSpec {
    double target_loss = 1.0;
    long long max_iterations = 1000;
};

// Iterations needed to reach the target loss (max_iterations when never reached).
using Trainer = std::function<long long(const MetaParams&, const FitnessSpec&, const SafetyCap&)>;

struct SearchSpace {
    bool mutate_hidden = true;
    int hidden_step = 16;
    bool mutate_horizon = false;
    int horizon_step = 8;
    double learning_rate_sigma = 0.3;  // log-normal; 0 disables
    std::vector<double> learning_rate_grid;  // when nonempty, lr moves on this grid instead
    double inertia_sigma = 0.0;

    bool empty() const {
        return !mutate_hidden && !mutate_horizon && learning_rate_sigma == 0.0 && learning_rate_grid.size() < 2 &&
               inertia_sigma == 0.0;
    }
};

struct EvolutionRecord {
    int generation = 0;
    std::uint64_t digest = 0;
    long long neurons = 0;
    long long fitness = 0;
    bool accepted = false;  // false: refused by the safety cap, never built
};

inline std::string format_record(const EvolutionRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "generation=%d candidate=%016llx neurons=%lld fitness=%lld status=%s", r.generation,
                  static_cast<unsigned long long>(r.digest), r.neurons, r.fitness, r.accepted ? "accepted" : "refused");
    return buf;
}

struct EvolveResult {
    MetaParams best;
    long long best_fitness = 0;
    std::vector<EvolutionRecord> history;
    std::vector<long long> best_per_generation;
    long long trained = 0;
};

inline MetaParams mutate(const MetaParams& parent, const SearchSpace& space, SplitMix& rng) {
    MetaParams child = parent;
    auto step = [&](int v, int bound) {
        const auto delta = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * bound + 1))) - bound;
        return std::max(1, v + delta);
    };
    if (space.mutate_hidden)
        for (auto& h : child.topology.hidden) h = step(h, space.hidden_step);
    if (space.mutate_horizon) child.horizon = step(child.horizon, space.horizon_step);
    if (space.learning_rate_grid.size() >= 2) {
        const auto& g = space.learning_rate_grid;
        child.learning_rate = g[static_cast<std::size_t>(rng.below(g.size()))];
    } else if (space.learning_rate_sigma > 0.0) {
        child.learning_rate *= std::exp(space.learning_rate_sigma * rng.normal());
    }
    if (space.inertia_sigma > 0.0)
        child.inertia = std::clamp(child.inertia + space.inertia_sigma * rng.normal(), 0.0, 1.0);
    child.seed = rng.next();
    return child;
}

// (mu + lambda) evolution with elitist survivor selection. Candidates that
// fail the safety cap are never built and score max_iterations.
inline EvolveResult evolve(const MetaParams& initial, const FitnessSpec& fitness, const SafetyCap& cap, int mu,
                           int lambda_off, int generations, std::uint64_t seed, const Trainer& trainer,
                           const SearchSpace& space = {}) {
    if (mu < 1 || generations < 1 || lambda_off < 0) throw ConfigError("evolve needs mu, G >= 1 and lambda >= 0");
    if (fitness.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (lambda_off > 0 && space.empty()) throw ConfigError("search space has nothing to mutate");

    SplitMix rng(seed);
    EvolveResult res;
    struct Scored {
        MetaParams params;
        long long fitness;
    };

    auto score = [&](const MetaParams& p, int gen) {
        EvolutionRecord rec{gen, p.digest(), p.total_neurons(), fitness.max_iterations, false};
        try {
            validate_cap(p, cap);
            rec.accepted = true;
            rec.fitness = std::clamp<long long>(trainer(p, fitness, cap), 0, fitness.max_iterations);
            ++res.trained;
        } catch (const SafetyCapExceeded&) {
            rec.accepted = false;
            rec.fitness = fitness.max_iterations;
        }
        res.history.push_back(rec);
        return rec.fitness;
    };

    std::vector<Scored> population{{initial, score(initial, 0)}};
    res.best_per_generation.push_back(population.front().fitness);

    for (int g = 1; g <= generations; ++g) {
        std::vector<Scored> pool = population;
        for (int i = 0; i < lambda_off; ++i) {
            const auto& parent = population[static_cast<std::size_t>(i) % population.size()].params;
            auto child = mutate(parent, space, rng);
            pool.push_back({child, score(child, g)});
        }
        std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) { return a.fitness < b.fitness; });
        if (pool.size() > static_cast<std::size_t>(mu)) pool.resize(static_cast<std::size_t>(mu));
        population = std::move(pool);
        res.best_per_generation.push_back(population.front().fitness);
    }
    res.best = population.front().params;
    res.best_fitness = population.front().fitness;
    return res;
}

}  // namespace reflex::evolve
