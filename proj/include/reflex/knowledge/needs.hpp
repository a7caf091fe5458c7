#pragma once

#include <algorithm>
#include <array>
#include <vector>

namespace reflex::knowledge {

enum class Need { Existence = 0, Social = 1, Epistemic = 2 };

inline const char* to_string(Need n) {
    switch (n) {
        case Need::Existence: return "Existence";
        case Need::Social: return "Social";
        case Need::Epistemic: return "Epistemic";
    }
    return "?";
}

struct NeedsState {
    std::array<double, 3> satisfaction{1.0, 1.0, 1.0};
    double threshold = 0.5;
};

struct Goal {
    Need need;
    double priority;
    bool operator==(const Goal&) const = default;
};

// A need below threshold yields a goal of priority (threshold - satisfaction).
// Sorted by priority, descending; ties keep Existence, Social, Epistemic order.
inline std::vector<Goal> derive_goals(const NeedsState& s) {
    std::vector<Goal> goals;
    for (int i = 0; i < 3; ++i)
        if (s.satisfaction[static_cast<std::size_t>(i)] < s.threshold)
            goals.push_back({static_cast<Need>(i), s.threshold - s.satisfaction[static_cast<std::size_t>(i)]});
    std::stable_sort(goals.begin(), goals.end(), [](const Goal& a, const Goal& b) { return a.priority > b.priority; });
    return goals;
}

}  // namespace reflex::knowledge
