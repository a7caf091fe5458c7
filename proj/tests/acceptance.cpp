// Acceptance run: one line per criterion, exit status 0 iff all pass.
// Optional arguments select criteria by number, e.g. `reflex_acceptance 2 6`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reflex/deliberation/dual_system.hpp"
#include "reflex/eval/reflexivity.hpp"
#include "reflex/evolve/evolve.hpp"
#include "reflex/harness/commands.hpp"
#include "reflex/harness/tag_corpus.hpp"
#include "reflex/knowledge/author.hpp"
#include "reflex/knowledge/store.hpp"
#include "reflex/memory/register_stack.hpp"
#include "reflex/memory/time_interval.hpp"
#include "reflex/net/gradient_check.hpp"

using namespace reflex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

net::NetworkTopology small_topology(int j_max, int h, int decoder, int p, int c, int k, int e) {
    net::NetworkTopology t;
    t.j_max = j_max;
    t.hidden.assign(static_cast<std::size_t>(j_max), h);
    t.decoder_layers = decoder;
    t.p = p;
    t.c = c;
    t.k_act = k;
    t.emotion_count = e;
    return t;
}

std::vector<net::TrajectoryStep> random_trajectory(const net::NetworkTopology& t, int len, SplitMix& rng) {
    std::vector<net::TrajectoryStep> out;
    for (int s = 0; s < len; ++s) {
        net::TrajectoryStep st;
        st.input.perception = net::encode_char(static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(t.p))),
                                               rng.uniform(0.3, 1.0), t.p);
        st.input.emotions = Vector(t.emotion_count);
        for (Eigen::Index i = 0; i < st.input.emotions.size(); ++i) st.input.emotions[i] = rng.uniform();
        st.target = static_cast<int>(rng.below(static_cast<std::uint64_t>(t.c)));
        if (t.decoder_layers > 0)
            st.observed = net::encode_char(static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(t.p))), 1.0, t.p);
        out.push_back(std::move(st));
    }
    return out;
}

Outcome gradient_soundness() {
    const auto t0 = Clock::now();
    struct Case {
        int j_max, h, decoder;
    };
    const std::vector<Case> grid{{1, 3, 0}, {1, 5, 1}, {2, 3, 0}, {2, 4, 2}, {3, 3, 0}, {3, 3, 3}, {2, 6, 0}, {1, 8, 0}};
    double worst = 0.0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid[i];
        const auto t = small_topology(c.j_max, c.h, c.decoder, 4, 4, 2, 2);
        auto w = evolve::init_weights(t, 100 + i);
        SplitMix rng(200 + i);
        w.for_each_block([&](auto& m) {
            for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-0.8, 0.8);
        });
        largest = std::max(largest, w.parameter_count());
        const auto traj = random_trajectory(t, 6, rng);
        worst = std::max(worst, net::gradient_check(t, w, net::NetworkState::zeros(t), traj, 1e-5));
    }
    const double secs = seconds_since(t0);
    const bool ok = worst <= 1e-4 && largest <= 2000 && secs < 120.0;
    return {ok, std::to_string(grid.size()) + " topologies, max params " + std::to_string(largest) +
                    ", max rel err " + fmt("%.3e", worst) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome delay_law() {
    const std::vector<int> ns{0, 1, 2, 5, 10};
    const std::vector<int> js{1, 2, 3, 4, 5};
    const auto ta = small_topology(1, 8, 0, 256, 256, 1, 0);
    long long checked = 0;
    bool ok = true;
    std::uint64_t seed = 1;
    for (int n : ns) {
        for (int jb : js) {
            const auto tb = small_topology(jb, 8, 0, 256, 256, 1, 0);
            deliberation::DualConfig cfg;
            cfg.n_decision = n;
            cfg.pinned_verdict = deliberation::Verdict::Output;
            cfg.proposal_temperature = 1.0;
            auto sys = deliberation::DualSystem::create(ta, evolve::init_weights(ta, seed), tb, false, seed, cfg);
            SplitMix rng(seed++);
            std::vector<std::uint8_t> proposals;
            for (int i = 0; i < 1000; ++i)
                proposals.push_back(sys.deliberate_step(static_cast<std::uint8_t>(rng.below(256)), Vector()).proposal);
            sys.flush(Vector());
            const auto& em = sys.emissions();
            if (em.size() < proposals.size()) ok = false;
            for (std::size_t i = 0; i < std::min(em.size(), proposals.size()); ++i) {
                ++checked;
                if (em[i].emitted_at - em[i].proposed_at != n + jb || em[i].byte != proposals[i] ||
                    em[i].proposed_at != static_cast<long long>(i))
                    ok = false;
            }
        }
    }
    return {ok, "25 (n, j') pairs, " + std::to_string(checked) + " emissions at exactly n + j'"};
}

Outcome reflexivity_property() {
    const net::NetworkTopology t;  // default desk-scale topology
    int changed = 0, isolated = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto w = evolve::init_weights(t, seed);
        auto zero = w;
        zero.R.setZero();
        SplitMix rng(seed ^ 0xABCDEF);
        auto run = [&](const net::WeightStore& ws) {
            net::ReflexiveUnit u(t, ws);
            const int warm = 1 + static_cast<int>(rng.below(4));
            for (int s = 0; s < warm; ++s) u.step(u.input_for(static_cast<std::uint8_t>(rng.below(256)), 1.0, Vector()));
            auto perturbed = u.state;
            for (Eigen::Index i = 0; i < perturbed.top(t).size(); ++i) perturbed.top(t)[i] += rng.uniform(-0.5, 0.5);
            const auto in = u.input_for(static_cast<std::uint8_t>(rng.below(256)), 1.0, Vector());
            const auto a = net::forward_step(t, u.state, ws, in).first;
            const auto b = net::forward_step(t, perturbed, ws, in).first;
            return a.S[0] != b.S[0];
        };
        changed += run(w);
        isolated += !run(zero);
    }
    return {changed == 100 && isolated == 100,
            "perturbation reached layer 0 in " + std::to_string(changed) + "/100, zero recurrence isolated " +
                std::to_string(isolated) + "/100"};
}

Outcome xor_non_monotony() {
    const auto t = small_topology(1, 4, 0, 2, 2, 1, 0);
    auto w = evolve::init_weights(t, 1);
    const int in[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    auto sample = [&](int k) {
        net::TrajectoryStep s;
        s.input.perception = (Vector(2) << in[k][0], in[k][1]).finished();
        s.input.emotions = Vector();
        s.target = in[k][0] ^ in[k][1];
        return s;
    };
    auto correct = [&] {
        int n = 0;
        for (int k = 0; k < 4; ++k) {
            const auto s = sample(k);
            const auto out = net::forward_step(t, net::NetworkState::zeros(t), w, s.input).second;
            n += net::argmax(out.char_dist) == *s.target;
        }
        return n;
    };
    int updates = 0;
    while (updates < 10000 && correct() < 4) {
        const std::vector<net::TrajectoryStep> traj{sample(updates % 4)};
        w = net::bptt_update(t, w, net::NetworkState::zeros(t), traj, 1, 0.05).weights;
        ++updates;
    }
    const int acc = correct();
    return {acc == 4 && w.has_negative(), "accuracy " + std::to_string(acc) + "/4 after " + std::to_string(updates) +
                                              " updates, negative weight " + (w.has_negative() ? "present" : "absent")};
}

Outcome desk_scale_generation() {
    const auto t0 = Clock::now();
    const net::NetworkTopology topo;
    harness::TrainConfig tc;
    const long long updates = 50000;
    tc.steps = updates * tc.horizon;
    tc.log_every = 5000;
    auto corpus = std::make_shared<const memory::Corpus>(
        memory::Corpus::from_documents({{"tags.txt", harness::tag_corpus(7, 20000)}}));
    harness::CorpusStream stream(corpus);
    const auto res = harness::Trainer(topo, evolve::init_weights(topo, 1), tc).run(stream);

    harness::SampleConfig sc;
    sc.length = 200;
    sc.temperature = 0.1;
    sc.prime = harness::tag_corpus(99, 6);
    int pass = 0;
    std::set<std::string> distinct;
    for (int k = 0; k < 100; ++k) {
        const auto s = harness::sample_text(topo, res.weights, tc, sc, 1000 + static_cast<std::uint64_t>(k));
        pass += harness::tag_balance_ok(s);
        distinct.insert(s);
    }
    const double secs = seconds_since(t0);
    const double ce = res.curve.empty() ? NAN : res.curve.back().cross_entropy;
    return {pass >= 90 && res.updates == updates && secs < 900.0,
            std::to_string(pass) + "/100 balanced (" + std::to_string(distinct.size()) + " distinct) after " +
                std::to_string(res.updates) + " updates, final CE " + fmt("%.3f", ce) + ", T=0.1, " +
                fmt("%.0f", secs) + " s"};
}

Outcome index_arithmetic() {
    using eval::kDimensions;
    const auto ones = eval::reflexivity_index(eval::CapabilityProfile::uniform(1.0), eval::IndexWeights::defaults());
    const auto halves = eval::reflexivity_index(eval::CapabilityProfile::uniform(0.5), eval::IndexWeights::unit());
    bool ok = std::abs(ones.index - 1.0) <= 1e-12 && std::abs(halves.index - 1.52587890625e-5) <= 1e-15;

    const double values[3] = {0.0, 0.5, 1.0};
    std::size_t total = 1;
    for (std::size_t d = 0; d < kDimensions; ++d) total *= 3;
    std::vector<std::size_t> stride(kDimensions, 1);
    for (std::size_t d = 1; d < kDimensions; ++d) stride[d] = stride[d - 1] * 3;
    auto decode = [&](std::size_t code, std::array<int, kDimensions>& digits, eval::CapabilityProfile& p) {
        for (std::size_t d = 0; d < kDimensions; ++d) {
            digits[d] = static_cast<int>(code % 3);
            p.coefficient[d] = values[digits[d]];
            code /= 3;
        }
    };

    std::vector<double> idx(total);
    std::array<int, kDimensions> digits{};
    eval::CapabilityProfile p;
    const auto dw = eval::IndexWeights::defaults();
    for (std::size_t k = 0; k < total; ++k) {
        decode(k, digits, p);
        idx[k] = eval::reflexivity_index(p, dw).index;
    }
    long long mono_fail = 0;
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t code = k;
        for (std::size_t d = 0; d < kDimensions; ++d, code /= 3)
            if (code % 3 < 2 && idx[k + stride[d]] < idx[k]) ++mono_fail;
    }

    const auto uw = eval::IndexWeights::unit();
    for (std::size_t k = 0; k < total; ++k) {
        decode(k, digits, p);
        idx[k] = eval::reflexivity_index(p, uw).index;
    }
    long long perm_fail = 0;
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t code = k;
        int count[3] = {0, 0, 0};
        for (std::size_t d = 0; d < kDimensions; ++d, code /= 3) ++count[code % 3];
        // canonical arrangement: digits sorted ascending from dimension 0
        std::size_t canon = 0;
        std::size_t d = 0;
        for (int v = 0; v < 3; ++v)
            for (int r = 0; r < count[v]; ++r) canon += static_cast<std::size_t>(v) * stride[d++];
        if (std::abs(idx[k] - idx[canon]) > 1e-12 * std::max(idx[k], idx[canon])) ++perm_fail;
    }
    ok = ok && mono_fail == 0 && perm_fail == 0;
    return {ok, "ones " + fmt("%.17g", ones.index) + ", halves " + fmt("%.17g", halves.index) + ", " +
                    std::to_string(total) + " grid profiles, monotonicity failures " + std::to_string(mono_fail) +
                    ", permutation failures " + std::to_string(perm_fail)};
}

Outcome safety_cap() {
    evolve::construction_log() = {};
    evolve::MetaParams init;
    init.topology = small_topology(1, 99985, 0, 2, 2, 1, 0);  // 99,990 neurons
    evolve::SearchSpace space;
    space.hidden_step = 16;
    space.learning_rate_sigma = 0.0;
    auto trainer = [](const evolve::MetaParams& m, const evolve::FitnessSpec& f, const evolve::SafetyCap& cap) {
        evolve::guarded_init(m, cap);
        return std::min<long long>(f.max_iterations, std::llabs(m.topology.hidden[0] - 99990));
    };
    const auto r = evolve::evolve(init, {1.0, 1000}, {}, 2, 4, 5, 11, trainer, space);
    const auto& log = evolve::construction_log();
    long long refused = 0, over = 0;
    for (const auto& rec : r.history) {
        refused += !rec.accepted;
        over += rec.neurons >= 100000;
    }
    auto exact = init;
    exact.topology.hidden = {99995};
    bool exact_refused = false;
    try {
        evolve::validate_cap(exact, {});
    } catch (const evolve::SafetyCapExceeded&) {
        exact_refused = true;
    }
    const bool ok = log.over_cap == 0 && log.max_neurons < 100000 && log.constructions == r.trained && refused > 0 &&
                    refused == over && exact_refused && exact.total_neurons() == 100000;
    return {ok, std::to_string(r.history.size()) + " candidates, " + std::to_string(log.constructions) +
                    " constructed (max " + std::to_string(log.max_neurons) + " neurons), " + std::to_string(refused) +
                    " refused, exact 100000 " + (exact_refused ? "refused" : "accepted")};
}

Outcome open_world() {
    SplitMix rng(8080);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    long long absent = 0, false_for_absent = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        knowledge::KnowledgeStore s;
        const auto n = rng.below(8);
        for (std::uint64_t i = 0; i < n; ++i) {
            knowledge::SentenceTuple t;
            t.terms.resize(1 + rng.below(3));
            for (auto& w : t.terms) w = vocab[rng.below(vocab.size())];
            t.polarity = rng.below(2) ? knowledge::Polarity::Asserted : knowledge::Polarity::Negated;
            t.confidence = {rng.uniform(), rng.uniform(), rng.uniform()};
            s.assert_tuple(t);
        }
        knowledge::Pattern p(1 + rng.below(3));
        for (auto& term : p)
            if (rng.below(4)) term = vocab[rng.below(vocab.size())];
        bool any = false;
        for (const auto& t : *s.snapshot()) any = any || knowledge::matches(p, t);
        if (any) continue;
        ++absent;
        false_for_absent += s.query(p).verdict == knowledge::Verdict::False;
    }
    return {false_for_absent == 0 && absent > 0, "10000 cases, " + std::to_string(absent) + " absent patterns, " +
                                                     std::to_string(false_for_absent) + " answered False"};
}

Outcome oracle_equivalences() {
    // register stack against a deque
    long long stack_fail = 0;
    {
        SplitMix rng(1);
        memory::RegisterStack s(6, 4);
        std::deque<std::string> ref;
        for (int i = 0; i < 100000; ++i) {
            const auto kind = rng.below(4);
            try {
                if (kind == 0) {
                    std::string payload(rng.below(6), 'x');
                    for (auto& ch : payload) ch = static_cast<char>('a' + rng.below(26));
                    const bool fits = payload.size() <= 4 && ref.size() < 6;
                    bool threw = false;
                    try {
                        memory::stack_exec(s, memory::Push{payload});
                    } catch (const Error&) {
                        threw = true;
                    }
                    if (threw == fits) ++stack_fail;
                    if (fits) {
                        payload.resize(4, '\0');
                        ref.push_back(payload);
                    }
                } else if (kind == 1 || kind == 2) {
                    const memory::StackOp op = kind == 1 ? memory::StackOp{memory::Pop{}} : memory::StackOp{memory::Peek{}};
                    if (ref.empty()) {
                        bool threw = false;
                        try {
                            memory::stack_exec(s, op);
                        } catch (const Underflow&) {
                            threw = true;
                        }
                        if (!threw) ++stack_fail;
                    } else {
                        if (*memory::stack_exec(s, op) != ref.back()) ++stack_fail;
                        if (kind == 1) ref.pop_back();
                    }
                } else {
                    memory::stack_exec(s, memory::Noop{});
                }
            } catch (const Error&) {
                ++stack_fail;
            }
            if (s.size() != ref.size()) ++stack_fail;
        }
    }

    // interval relation against point-set comparison on an exact 1/24 s grid
    long long interval_fail = 0;
    {
        using memory::IntervalRelation;
        using memory::Rational;
        SplitMix rng(2);
        auto draw = [&] {
            memory::TimeInterval x;
            if (rng.below(3) == 0) {
                x.scale = "minute";
                x.start = Rational(static_cast<long>(rng.below(481)) - 240, 720);
                x.duration = Rational(static_cast<long>(rng.below(241)), 720);
            } else {
                x.scale = "second";
                x.start = Rational(static_cast<long>(rng.below(481)) - 240, 12);
                x.duration = Rational(static_cast<long>(rng.below(241)), 12);
            }
            return x;
        };
        auto to_grid = [](const Rational& v) {
            const Rational scaled = v * 24;
            return static_cast<long>(boost::multiprecision::numerator(scaled));  // denominators divide 12
        };
        for (int i = 0; i < 10000; ++i) {
            const auto x = draw();
            const auto y = draw();
            const auto bx = memory::to_base(x);
            const auto by = memory::to_base(y);
            const long xl = to_grid(bx.lo), xh = to_grid(bx.hi), yl = to_grid(by.lo), yh = to_grid(by.hi);
            std::set<long> sx, sy;
            for (long k = std::min(xl, yl); k <= std::max(xh, yh); ++k) {
                if (xl <= k && k <= xh) sx.insert(k);
                if (yl <= k && k <= yh) sy.insert(k);
            }
            IntervalRelation expect;
            if (sx == sy) expect = IntervalRelation::Equal;
            else if (*sx.rbegin() < *sy.begin()) expect = IntervalRelation::Precedes;
            else if (*sy.rbegin() < *sx.begin()) expect = IntervalRelation::Succeeds;
            else if (std::includes(sx.begin(), sx.end(), sy.begin(), sy.end())) expect = IntervalRelation::Includes;
            else if (std::includes(sy.begin(), sy.end(), sx.begin(), sx.end())) expect = IntervalRelation::IncludedIn;
            else expect = IntervalRelation::Overlaps;
            interval_fail += memory::interval_relation(x, y) != expect;
        }
    }

    // author mean against a running sum
    long long author_fail = 0;
    {
        SplitMix rng(3);
        knowledge::AuthorModel m{"oracle"};
        double sum = 0.0;
        for (int i = 1; i <= 10000; ++i) {
            const double v = rng.uniform();
            sum += v;
            m = knowledge::update_author(m, v);
            if (std::abs(m.mean_V - sum / i) > 1e-12 || m.obs_count != i) ++author_fail;
        }
    }
    return {stack_fail == 0 && interval_fail == 0 && author_fail == 0,
            "stack mismatches " + std::to_string(stack_fail) + "/100000, interval mismatches " +
                std::to_string(interval_fail) + "/10000, author mismatches " + std::to_string(author_fail) + "/10000"};
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const auto dir = fs::temp_directory_path() / ("reflex_accept_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir / "corpus");
    std::ofstream(dir / "corpus" / "tags.txt") << harness::tag_corpus(3, 400);

    auto cfg = harness::parse_config("[run]\nseed = 12345\n[training]\nsteps = 1000\n");
    cfg.corpus = (dir / "corpus").string();
    std::ostringstream sink;
    cfg.checkpoint = (dir / "one.ckpt").string();
    harness::cmd_train(cfg, sink);
    cfg.checkpoint = (dir / "two.ckpt").string();
    harness::cmd_train(cfg, sink);
    const auto a = read_file(dir / "one.ckpt");
    const auto b = read_file(dir / "two.ckpt");
    const bool same_ckpt = !a.empty() && a == b;

    cfg.transcript = (dir / "session.log").string();
    std::istringstream in(":author alice\nthe cat sat\n:conf 0.4\nnot the cat sat\n:emotion fear 0.7\n"
                          ":ask what sat\n:query the cat ?\n:bogus\n:eval\n");
    std::ostringstream first;
    harness::cmd_repl(cfg, in, first);
    std::ostringstream replayed;
    const int rc = harness::cmd_replay(cfg, cfg.transcript, replayed);

    // byte identity of the outputs themselves
    harness::Session again(cfg, net::load_checkpoint(cfg.checkpoint), cfg.meta.seed);
    std::ostringstream second;
    for (const auto& r : harness::read_transcript(cfg.transcript)) second << again.handle(r.in) << '\n';
    const bool same_output = first.str() == second.str() && !first.str().empty();
    fs::remove_all(dir);
    return {same_ckpt && rc == 0 && same_output,
            std::string("checkpoints after 1000 steps ") + (same_ckpt ? "identical" : "differ") + " (" +
                std::to_string(a.size()) + " bytes), replay " + (rc == 0 ? "identical" : "differs") + ", REPL output " +
                (same_output ? "byte-identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, gradient_soundness}, {2, delay_law},       {3, reflexivity_property}, {4, xor_non_monotony},
        {5, desk_scale_generation}, {6, index_arithmetic}, {7, safety_cap},        {8, open_world},
        {9, oracle_equivalences}, {10, determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& [n, run] : criteria) {
        if (!selected.empty() && !selected.count(n)) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
