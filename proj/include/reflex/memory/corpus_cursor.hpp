#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reflex/common.hpp"

namespace reflex::memory {

// Directory nesting defines the document tree. Only directories that
// (transitively) hold a document are kept; entries are name-sorted.
struct Corpus {
    struct Directory {
        std::string name;
        std::optional<std::size_t> parent;
        std::vector<std::size_t> subdirs;
        std::vector<std::size_t> docs;  // direct documents
        int depth = 0;
    };
    struct Document {
        std::string path;  // relative to the corpus root
        std::string bytes;
        std::size_t dir = 0;
    };

    std::vector<Directory> dirs;  // dirs[0] is the root
    std::vector<Document> docs;   // depth-first order

    struct Stats {
        std::size_t documents = 0;
        std::size_t bytes = 0;
        int depth = 0;
        std::array<std::size_t, 256> histogram{};
    };

    Stats stats() const {
        Stats s;
        s.documents = docs.size();
        for (const auto& d : docs) {
            s.bytes += d.bytes.size();
            s.depth = std::max(s.depth, dirs[d.dir].depth);
            for (unsigned char ch : d.bytes) ++s.histogram[ch];
        }
        return s;
    }

    // First document in depth-first order under `dir`.
    std::size_t first_doc_under(std::size_t dir) const {
        const auto& d = dirs[dir];
        if (!d.docs.empty()) return d.docs.front();
        for (auto s : d.subdirs) return first_doc_under(s);
        throw EmptyCorpus("directory without documents");
    }

    // Builds from (relative path, contents) pairs; '/' separates directories.
    static Corpus from_documents(std::vector<std::pair<std::string, std::string>> files) {
        if (files.empty()) throw EmptyCorpus("corpus has no documents");
        std::sort(files.begin(), files.end());
        Corpus c;
        c.dirs.push_back({"", std::nullopt, {}, {}, 0});
        struct Pending {
            std::string path, bytes;
            std::size_t dir;
        };
        std::vector<Pending> pending;
        for (auto& [path, bytes] : files) {
            std::size_t dir = 0;
            std::size_t start = 0;
            for (std::size_t slash; (slash = path.find('/', start)) != std::string::npos; start = slash + 1) {
                const auto part = path.substr(start, slash - start);
                if (part.empty()) continue;
                std::optional<std::size_t> found;
                for (auto s : c.dirs[dir].subdirs)
                    if (c.dirs[s].name == part) found = s;
                if (!found) {
                    c.dirs.push_back({part, dir, {}, {}, c.dirs[dir].depth + 1});
                    found = c.dirs.size() - 1;
                    c.dirs[dir].subdirs.push_back(*found);
                }
                dir = *found;
            }
            pending.push_back({path, std::move(bytes), dir});
        }
        // Depth-first document order: a directory's own files, then subdirectories.
        std::vector<std::vector<std::size_t>> by_dir(c.dirs.size());
        for (std::size_t i = 0; i < pending.size(); ++i) by_dir[pending[i].dir].push_back(i);
        auto visit = [&](auto&& self, std::size_t dir) -> void {
            for (auto i : by_dir[dir]) {
                c.dirs[dir].docs.push_back(c.docs.size());
                c.docs.push_back({pending[i].path, std::move(pending[i].bytes), dir});
            }
            auto subs = c.dirs[dir].subdirs;
            std::sort(subs.begin(), subs.end(),
                      [&](std::size_t a, std::size_t b) { return c.dirs[a].name < c.dirs[b].name; });
            c.dirs[dir].subdirs = subs;
            for (auto s : subs) self(self, s);
        };
        visit(visit, 0);
        return c;
    }

    static Corpus from_directory(const std::filesystem::path& root) {
        namespace fs = std::filesystem;
        std::error_code ec;
        if (!fs::exists(root, ec) || !fs::is_directory(root, ec))
            throw UnreadablePath("corpus path is not a readable directory: " + root.string());
        std::vector<std::pair<std::string, std::string>> files;
        for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
            if (ec) throw UnreadablePath("cannot walk " + root.string() + ": " + ec.message());
            if (!it->is_regular_file()) continue;
            std::ifstream f(it->path(), std::ios::binary);
            if (!f) throw UnreadablePath("cannot read " + it->path().string());
            std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
            files.emplace_back(fs::relative(it->path(), root).generic_string(), std::move(bytes));
        }
        if (ec) throw UnreadablePath("cannot walk " + root.string() + ": " + ec.message());
        if (files.empty()) throw EmptyCorpus("no documents under " + root.string());
        return from_documents(std::move(files));
    }
};

enum class CursorAction { Left, Right, Read, NextDoc, PrevDoc, Up, Down };

// Position in the corpus. Offsets run 0..size, where size is the
// end-of-document sentinel. Moves never wrap: a blocked move leaves the
// position unchanged and raises boundary_flag.
class CorpusCursor {
public:
    explicit CorpusCursor(std::shared_ptr<const Corpus> corpus) : corpus_(std::move(corpus)) {
        if (!corpus_ || corpus_->docs.empty()) throw EmptyCorpus("cursor needs a nonempty corpus");
        focus_ = corpus_->docs[0].dir;
    }

    std::size_t document() const { return doc_; }
    std::size_t offset() const { return offset_; }
    std::size_t focus_directory() const { return focus_; }
    bool boundary_flag() const { return boundary_; }
    const Corpus& corpus() const { return *corpus_; }
    bool at_end_of_document() const { return offset_ >= corpus_->docs[doc_].bytes.size(); }

    std::optional<std::uint8_t> read() const {
        const auto& b = corpus_->docs[doc_].bytes;
        if (offset_ >= b.size()) return std::nullopt;
        return static_cast<std::uint8_t>(b[offset_]);
    }

    std::optional<std::uint8_t> exec(CursorAction a) {
        const auto& c = *corpus_;
        switch (a) {
            case CursorAction::Read: return read();
            case CursorAction::Left:
                moved(offset_ > 0);
                if (offset_ > 0) --offset_;
                break;
            case CursorAction::Right: {
                const bool ok = offset_ < c.docs[doc_].bytes.size();
                moved(ok);
                if (ok) ++offset_;
                break;
            }
            case CursorAction::NextDoc:
                if (doc_ + 1 < c.docs.size()) go_to(doc_ + 1); else moved(false);
                break;
            case CursorAction::PrevDoc:
                if (doc_ > 0) go_to(doc_ - 1); else moved(false);
                break;
            case CursorAction::Up:
                if (auto p = c.dirs[focus_].parent) {
                    focus_ = *p;
                    doc_ = c.first_doc_under(focus_);
                    offset_ = 0;
                    moved(true);
                } else {
                    moved(false);
                }
                break;
            case CursorAction::Down: {
                const auto& subs = c.dirs[focus_].subdirs;
                if (subs.empty()) {
                    moved(false);
                } else {
                    focus_ = subs.front();
                    doc_ = c.first_doc_under(focus_);
                    offset_ = 0;
                    moved(true);
                }
                break;
            }
        }
        return std::nullopt;
    }

private:
    void moved(bool ok) { boundary_ = !ok; }
    void go_to(std::size_t d) {
        doc_ = d;
        offset_ = 0;
        focus_ = corpus_->docs[d].dir;
        moved(true);
    }

    std::shared_ptr<const Corpus> corpus_;
    std::size_t doc_ = 0;
    std::size_t offset_ = 0;
    std::size_t focus_ = 0;
    bool boundary_ = false;
};

inline std::pair<CorpusCursor, Corpus::Stats> ingest(const std::filesystem::path& root) {
    auto corpus = std::make_shared<const Corpus>(Corpus::from_directory(root));
    auto stats = corpus->stats();
    return {CorpusCursor(std::move(corpus)), stats};
}

}  // namespace reflex::memory
