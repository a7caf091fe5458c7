#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace reflex::knowledge {

inline const std::string kSelfAuthor = "SELF";

struct AuthorModel {
    std::string id;
    double mean_V = 0.5;  // prior before any observation
    std::int64_t obs_count = 0;
    double C = 0.0;

    bool is_self() const { return id == kSelfAuthor; }
};

// Running mean of observed agreement; certainty obs/(obs+1).
inline AuthorModel update_author(AuthorModel m, double observed_V) {
    ++m.obs_count;
    const auto n = static_cast<double>(m.obs_count);
    m.mean_V = m.obs_count == 1 ? observed_V : m.mean_V + (observed_V - m.mean_V) / n;
    m.C = n / (n + 1.0);
    return m;
}

class AuthorRegistry {
public:
    AuthorRegistry() { models_[kSelfAuthor] = AuthorModel{kSelfAuthor}; }

    const AuthorModel& get(const std::string& id) {
        auto it = models_.find(id);
        if (it == models_.end()) it = models_.emplace(id, AuthorModel{id}).first;
        return it->second;
    }
    const AuthorModel* find(const std::string& id) const {
        auto it = models_.find(id);
        return it == models_.end() ? nullptr : &it->second;
    }
    void observe(const std::string& id, double V) { models_[id] = update_author(get(id), V); }
    const std::map<std::string, AuthorModel>& all() const { return models_; }

private:
    std::map<std::string, AuthorModel> models_;
};

}  // namespace reflex::knowledge
