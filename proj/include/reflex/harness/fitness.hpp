#pragma once

#include <memory>

#include "reflex/evolve/evolve.hpp"
#include "reflex/harness/trainer.hpp"

namespace reflex::harness {

// Fitness = number of updates until one window's mean cross-entropy drops to
// the target, or max_iterations. The network is built through guarded_init,
// so an over-cap candidate never exists.
inline evolve::Trainer corpus_fitness(std::shared_ptr<const memory::Corpus> corpus, TrainConfig base) {
    return [corpus = std::move(corpus), base = std::move(base)](const evolve::MetaParams& m, const evolve::FitnessSpec& f,
                                                                 const evolve::SafetyCap& cap) -> long long {
        auto w = evolve::guarded_init(m, cap);
        TrainConfig tc = base;
        tc.learning_rate = m.learning_rate;
        tc.horizon = m.horizon;
        tc.emotions.inertia = m.inertia;
        tc.steps = f.max_iterations * static_cast<long long>(m.horizon);
        tc.log_every = 1;
        tc.hedonic_every = 0;
        long long reached = f.max_iterations;
        tc.stop = [&](const LossPoint& p) {
            if (p.cross_entropy <= f.target_loss) {
                reached = p.update;
                return true;
            }
            return false;
        };
        CorpusStream stream(corpus);
        try {
            Trainer(m.topology, std::move(w), tc).run(stream);
        } catch (const NonFiniteGradient&) {
            return f.max_iterations;
        }
        return reached;
    };
}

}  // namespace reflex::harness
