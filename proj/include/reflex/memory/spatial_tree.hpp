#pragma once

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "reflex/common.hpp"

namespace reflex::memory {

// Strict inclusion between named objects; a forest (one parent per node).
class SpatialTree {
public:
    void add_node(const std::string& id) { nodes_.insert(id); }

    // Records child ⊂ parent.
    void assert_inclusion(const std::string& child, const std::string& parent) {
        if (child == parent) throw CycleError("object cannot include itself: " + child);
        auto it = parent_.find(child);
        if (it != parent_.end()) {
            if (it->second == parent) return;
            throw MultiParentError(child + " is already included in " + it->second);
        }
        if (contains(child, parent)) throw CycleError(child + " already includes " + parent);
        nodes_.insert(child);
        nodes_.insert(parent);
        parent_[child] = parent;
        children_[parent].insert(child);
    }

    // True iff inner is (transitively) included in outer.
    bool contains(const std::string& outer, const std::string& inner) const {
        std::string cur = inner;
        for (auto it = parent_.find(cur); it != parent_.end(); it = parent_.find(cur)) {
            if (it->second == outer) return true;
            cur = it->second;
        }
        return false;
    }

    std::optional<std::string> parent(const std::string& id) const {
        auto it = parent_.find(id);
        if (it == parent_.end()) return std::nullopt;
        return it->second;
    }

    // Nodes within `depth` inclusion edges of `id`, excluding id itself.
    std::set<std::string> neighborhood(const std::string& id, int depth) const {
        std::set<std::string> seen{id};
        std::queue<std::pair<std::string, int>> q;
        q.push({id, 0});
        while (!q.empty()) {
            auto [cur, d] = q.front();
            q.pop();
            if (d == depth) continue;
            std::vector<std::string> adj;
            if (auto p = parent(cur)) adj.push_back(*p);
            if (auto c = children_.find(cur); c != children_.end()) adj.insert(adj.end(), c->second.begin(), c->second.end());
            for (auto& n : adj)
                if (seen.insert(n).second) q.push({n, d + 1});
        }
        seen.erase(id);
        return seen;
    }

    bool is_forest() const {
        for (const auto& n : nodes_) {
            std::set<std::string> path{n};
            std::string cur = n;
            for (auto it = parent_.find(cur); it != parent_.end(); it = parent_.find(cur)) {
                if (!path.insert(it->second).second) return false;
                cur = it->second;
            }
        }
        return true;
    }

    const std::set<std::string>& nodes() const { return nodes_; }

private:
    std::set<std::string> nodes_;
    std::map<std::string, std::string> parent_;
    std::map<std::string, std::set<std::string>> children_;
};

}  // namespace reflex::memory
