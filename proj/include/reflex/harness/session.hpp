#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "reflex/harness/agent.hpp"
#include "reflex/harness/config.hpp"
#include "reflex/harness/evaluate.hpp"
#include "reflex/knowledge/store.hpp"

namespace reflex::harness {

// Keeps records to one line: escapes '%', whitespace, '=' and bytes outside
// printable ASCII as %XX.
inline std::string percent_encode(const std::string& s) {
    std::string out;
    char buf[4];
    for (unsigned char c : s) {
        if (c <= 0x20 || c >= 0x7f || c == '%' || c == '=') {
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

inline std::string percent_decode(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size() || !std::isxdigit(static_cast<unsigned char>(s[i + 1])) ||
            !std::isxdigit(static_cast<unsigned char>(s[i + 2])))
            throw ConfigError("bad percent escape in transcript");
        out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
        i += 2;
    }
    return out;
}

// Newline-delimited key=value record; keys in insertion order.
inline std::string format_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) {
        if (!out.empty()) out += ' ';
        out += k + '=' + v;
    }
    return out;
}

inline std::map<std::string, std::string> parse_kv(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("record token without '=': " + tok);
        out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

struct TranscriptRecord {
    long long index = 0;
    std::string author;
    std::string in;
    std::string out;
    std::string verdicts;  // one 'O' (output) or 'S' (suppress) per gate decision
    std::vector<double> emotions;

    bool operator==(const TranscriptRecord&) const = default;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_record(const TranscriptRecord& r) {
    std::string em;
    for (std::size_t i = 0; i < r.emotions.size(); ++i) em += (i ? "," : "") + format_double(r.emotions[i]);
    return format_kv({{"index", std::to_string(r.index)},
                      {"author", percent_encode(r.author)},
                      {"in", percent_encode(r.in)},
                      {"out", percent_encode(r.out)},
                      {"verdicts", r.verdicts.empty() ? "-" : r.verdicts},
                      {"emotions", em.empty() ? "-" : em}});
}

inline TranscriptRecord parse_record(const std::string& line) {
    const auto kv = parse_kv(line);
    auto need = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("transcript record missing '" + k + "'");
        return it->second;
    };
    TranscriptRecord r;
    r.index = std::stoll(need("index"));
    r.author = percent_decode(need("author"));
    r.in = percent_decode(need("in"));
    r.out = percent_decode(need("out"));
    r.verdicts = need("verdicts") == "-" ? "" : need("verdicts");
    if (need("emotions") != "-")
        for (const auto& v : config_detail::split(need("emotions"), ',')) r.emotions.push_back(std::stod(v));
    return r;
}

inline std::vector<TranscriptRecord> read_transcript(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UnreadablePath("cannot read transcript " + path);
    std::vector<TranscriptRecord> out;
    for (std::string line; std::getline(f, line);)
        if (!config_detail::trim(line).empty()) out.push_back(parse_record(line));
    return out;
}

inline const char* kReplUsage =
    "commands: :author <id> | :conf <c> | :emotion <name> <v> | :clear <name> | :ask <text> | :query <terms, ? = any> | "
    ":eval | :help; any other line is stored as a sentence by the current author";

// Interactive session over a loaded checkpoint. Every handled line yields
// one transcript record; outputs depend only on the inputs so far.
class Session {
public:
    Session(RunConfig cfg, const net::Checkpoint& ck, std::uint64_t seed)
        : cfg_(std::move(cfg)), sys_(make_dual(ck, cfg_.deliberation, seed)), tracker_(cfg_.train.emotions) {}

    std::string handle(const std::string& raw_line) {
        std::string line = raw_line;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        TranscriptRecord rec;
        rec.index = static_cast<long long>(transcript_.size());
        rec.in = line;
        try {
            rec.out = dispatch(line, rec);
        } catch (const Error& e) {
            rec.out = "error=" + e.code() + " " + e.what();
        }
        rec.author = author_;
        const auto& v = tracker_.vector().values;
        rec.emotions.assign(v.data(), v.data() + v.size());
        transcript_.push_back(rec);
        return rec.out;
    }

    const std::vector<TranscriptRecord>& transcript() const { return transcript_; }
    const knowledge::KnowledgeStore& store() const { return store_; }
    const EmotionTracker& emotions() const { return tracker_; }
    const std::string& author() const { return author_; }
    double confidence() const { return confidence_; }
    const deliberation::DualSystem& system() const { return sys_; }

private:
    static std::vector<std::string> words(const std::string& s) {
        std::vector<std::string> out;
        std::istringstream is(s);
        for (std::string w; is >> w;) out.push_back(w);
        return out;
    }

    std::string dispatch(const std::string& line, TranscriptRecord& rec) {
        if (line.empty() || line[0] != ':') return statement(line);
        const auto sp = line.find(' ');
        const std::string cmd = line.substr(0, sp);
        const std::string arg = sp == std::string::npos ? "" : config_detail::trim(line.substr(sp + 1));
        const auto args = words(arg);
        if (cmd == ":author") {
            if (args.size() != 1) throw ConfigError(":author takes one id");
            author_ = args[0];
            return "author=" + percent_encode(author_);
        }
        if (cmd == ":conf") {
            if (args.size() != 1) throw ConfigError(":conf takes one value");
            const double c = config_detail::parse_scalar<double>(":conf", args[0]);
            if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("confidence must lie in [0, 1]");
            confidence_ = c;
            return "confidence=" + format_double(c);
        }
        if (cmd == ":emotion") {
            if (args.size() != 2) throw ConfigError(":emotion takes a name and a value");
            tracker_.inject(args[0], config_detail::parse_scalar<double>(":emotion", args[1]));
            return "emotions=" + snapshot();
        }
        if (cmd == ":clear") {
            if (args.size() != 1) throw ConfigError(":clear takes one emotion name");
            tracker_.clear(args[0]);
            return "emotions=" + snapshot();
        }
        if (cmd == ":ask") return ask(arg, rec);
        if (cmd == ":query") {
            if (args.empty()) throw ConfigError(":query needs at least one term");
            const auto r = store_.query(knowledge::make_pattern(args));
            return std::string("verdict=") + knowledge::to_string(r.verdict) + " matches=" + std::to_string(r.matches.size());
        }
        if (cmd == ":eval") {
            EvaluationOptions opt;
            opt.zero_recurrence = cfg_.zero_recurrence;
            return evaluate(sys_.unit_a().topo, sys_.unit_a().weights, cfg_.train.emotions, opt).text;
        }
        if (cmd == ":help") return kReplUsage;
        throw UnknownCommand("unknown command '" + cmd + "'; " + kReplUsage);
    }

    std::string snapshot() const {
        std::string s;
        const auto& e = tracker_.vector();
        for (std::size_t i = 0; i < e.labels.size(); ++i)
            s += (i ? "," : "") + e.labels[i] + ':' + format_double(e.values[static_cast<Eigen::Index>(i)]);
        return s;
    }

    // Plain text: A reads it (surprise measures how expected it was), then it
    // is stored as a tuple; agreement V = 1 - mean surprise.
    std::string statement(const std::string& line) {
        auto& a = sys_.unit_a();
        const std::string bytes = line + '\n';
        double total = 0.0;
        int scored = 0;
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            const auto& out = agent_step(a, tracker_, static_cast<std::uint8_t>(bytes[i]), confidence_, cfg_.train.areas);
            if (i + 1 < bytes.size()) {
                tracker_.observe(out, static_cast<std::uint8_t>(bytes[i + 1]), a.topo.p);
                total += tracker_.last_surprise();
                ++scored;
            }
        }
        const double mean_surprise = scored ? total / scored : 0.0;
        auto terms = words(line);
        if (terms.empty()) return "stored=0";
        knowledge::SentenceTuple t;
        if (terms.size() > 1 && terms[0] == "not") {
            t.polarity = knowledge::Polarity::Negated;
            terms.erase(terms.begin());
        }
        t.terms = std::move(terms);
        t.author = author_;
        t.origin = knowledge::Origin::Perceived;
        t.confidence = {confidence_, 1.0, std::clamp(1.0 - mean_surprise, 0.0, 1.0)};
        store_.assert_tuple(t);
        const auto* m = store_.authors().find(author_);
        return "stored=1 author=" + percent_encode(author_) + " surprise=" + format_double(mean_surprise) +
               " author_obs=" + std::to_string(m ? m->obs_count : 0);
    }

    // Streams the question through A, then lets A continue on its own
    // proposals; only bytes B releases form the answer.
    std::string ask(const std::string& text, TranscriptRecord& rec) {
        sys_.config().input_confidence = confidence_;
        const auto& topo = sys_.unit_a().topo;
        auto tick = [&](std::uint8_t byte) {
            const Vector e = tracker_.advance(topo, sys_.unit_a().state);
            auto r = sys_.deliberate_step(byte, e);
            tracker_.observe(sys_.unit_a().last, r.proposal, topo.p);
            if (r.verdict) rec.verdicts += *r.verdict == deliberation::Verdict::Output ? 'O' : 'S';
            return r.proposal;
        };
        const std::string question = text + '\n';
        std::uint8_t next = 0;
        for (char ch : question) next = tick(static_cast<std::uint8_t>(ch));
        const long long first = sys_.step_count() - 1;
        const auto limit = static_cast<std::size_t>(std::max(0, cfg_.deliberation.ask_response_bytes));
        auto answer = [&] {
            std::string s;
            for (const auto& em : sys_.emissions())
                if (em.proposed_at >= first && s.size() < limit) s += static_cast<char>(em.byte);
            return s;
        };
        const long long budget = static_cast<long long>(limit) * 4 + sys_.m();
        for (long long i = 0; i < budget; ++i) {
            const auto s = answer();
            if (s.size() >= limit || (!s.empty() && s.back() == '\n')) break;
            next = tick(next);
        }
        auto s = answer();
        if (!s.empty() && s.back() == '\n') s.pop_back();
        return "answer=" + percent_encode(s);
    }

    RunConfig cfg_;
    deliberation::DualSystem sys_;
    EmotionTracker tracker_;
    knowledge::KnowledgeStore store_;
    std::string author_ = "user";
    double confidence_ = 1.0;
    std::vector<TranscriptRecord> transcript_;
};

// Re-runs the recorded inputs on a fresh session; returns the indices whose
// output or emotion snapshot differ.
inline std::vector<long long> replay(const RunConfig& cfg, const net::Checkpoint& ck, std::uint64_t seed,
                                     const std::vector<TranscriptRecord>& records) {
    Session s(cfg, ck, seed);
    std::vector<long long> diff;
    for (const auto& r : records) {
        s.handle(r.in);
        const auto& got = s.transcript().back();
        if (!(got.out == r.out && got.verdicts == r.verdicts && got.emotions == r.emotions && got.author == r.author))
            diff.push_back(r.index);
    }
    return diff;
}

}  // namespace reflex::harness
