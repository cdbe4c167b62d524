/**
 * Copyright (c) 2026 the kgembed authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#include "kgembed/kg.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace kgembed {

namespace {

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line, const std::string& what) {
    throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

/// Iterates "\n"-separated lines of a preloaded buffer, tracking line numbers.
struct LineReader {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    bool next(std::string_view& out) {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string_view line(text.data() + pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            // skip blank lines (trailing newline etc.)
            if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
            out = line;
            return true;
        }
        return false;
    }
};

bool parse_i64(std::string_view tok, std::int64_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) toks.push_back(line.substr(start, i - start));
    }
    return toks;
}

/// name<TAB>id per line, optional leading count line; ids must be dense in
/// [0, count).
std::vector<std::string> load_name_table(const std::filesystem::path& file) {
    const std::string text = read_file(file);
    LineReader reader{text};

    std::string_view line;
    std::vector<std::string> names;
    std::vector<bool> seen;
    std::unordered_set<std::string> used_names;
    std::int64_t declared = -1;
    bool first = true;
    while (reader.next(line)) {
        if (first) {
            first = false;
            std::int64_t n;
            if (split_ws(line).size() == 1 && parse_i64(split_ws(line)[0], n)) {
                if (n < 0) fail(file, reader.line_no, "negative count");
                declared = n;
                names.resize(static_cast<std::size_t>(n));
                seen.assign(static_cast<std::size_t>(n), false);
                continue;
            }
        }
        // split at the last tab so names may contain tabs-free text with spaces
        std::size_t tab = line.find_last_of('\t');
        std::string_view name, id_tok;
        if (tab == std::string_view::npos) {
            // fall back to whitespace-separated "name id"
            auto toks = split_ws(line);
            if (toks.size() != 2) fail(file, reader.line_no, "expected \"name<TAB>id\"");
            name = toks[0];
            id_tok = toks[1];
        } else {
            name = line.substr(0, tab);
            id_tok = line.substr(tab + 1);
        }
        std::int64_t id;
        if (!parse_i64(id_tok, id)) fail(file, reader.line_no, "non-numeric id");
        if (id < 0) fail(file, reader.line_no, "negative id");
        if (declared >= 0 && id >= declared)
            fail(file, reader.line_no, "id " + std::to_string(id) + " out of declared range [0, " +
                                           std::to_string(declared) + ")");
        std::size_t idx = static_cast<std::size_t>(id);
        if (idx >= names.size()) {
            names.resize(idx + 1);
            seen.resize(idx + 1, false);
        }
        if (seen[idx]) fail(file, reader.line_no, "duplicate mapping for id " + std::to_string(id));
        if (!used_names.insert(std::string(name)).second)
            fail(file, reader.line_no, "duplicate mapping for name \"" + std::string(name) + "\"");
        seen[idx] = true;
        names[idx] = std::string(name);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw std::runtime_error(file.string() + ": ids not dense, missing id " + std::to_string(i));
    if (names.empty()) throw std::runtime_error(file.string() + ": empty vocabulary");
    return names;
}

/// Count line, then "h t r" per line (head tail relation); stored as (h,r,t).
std::vector<Triple> load_triples(const std::filesystem::path& file, std::int32_t entity_count,
                                 std::int32_t relation_count) {
    const std::string text = read_file(file);
    LineReader reader{text};

    std::string_view line;
    if (!reader.next(line)) throw std::runtime_error(file.string() + ": empty triple file");
    std::int64_t declared;
    {
        auto toks = split_ws(line);
        if (toks.size() != 1 || !parse_i64(toks[0], declared) || declared < 0)
            fail(file, reader.line_no, "expected triple count");
    }

    std::vector<Triple> triples;
    triples.reserve(static_cast<std::size_t>(declared));
    while (reader.next(line)) {
        auto toks = split_ws(line);
        if (toks.size() != 3)
            fail(file, reader.line_no, "expected 3 tokens, got " + std::to_string(toks.size()));
        std::int64_t h, t, r;
        if (!parse_i64(toks[0], h) || !parse_i64(toks[1], t) || !parse_i64(toks[2], r))
            fail(file, reader.line_no, "non-numeric id");
        if (h < 0 || h >= entity_count)
            fail(file, reader.line_no, "head id " + std::to_string(h) + " out of range [0, " +
                                           std::to_string(entity_count) + ")");
        if (t < 0 || t >= entity_count)
            fail(file, reader.line_no, "tail id " + std::to_string(t) + " out of range [0, " +
                                           std::to_string(entity_count) + ")");
        if (r < 0 || r >= relation_count)
            fail(file, reader.line_no, "relation id " + std::to_string(r) + " out of range [0, " +
                                           std::to_string(relation_count) + ")");
        triples.push_back({static_cast<std::int32_t>(h), static_cast<std::int32_t>(r),
                           static_cast<std::int32_t>(t)});
    }
    if (static_cast<std::int64_t>(triples.size()) != declared)
        throw std::runtime_error(file.string() + ": header declares " + std::to_string(declared) +
                                 " triples but file has " + std::to_string(triples.size()));
    return triples;
}

void write_triples(const std::filesystem::path& file, const std::vector<Triple>& triples) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << triples.size() << '\n';
    for (const Triple& t : triples) out << t.head << ' ' << t.tail << ' ' << t.relation << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("dataset directory not found: " + dir.string());

    KnowledgeGraph kg;
    kg.entity_names_ = load_name_table(dir / "entity2id.txt");
    kg.relation_names_ = load_name_table(dir / "relation2id.txt");
    kg.entity_count_ = static_cast<std::int32_t>(kg.entity_names_.size());
    kg.relation_count_ = static_cast<std::int32_t>(kg.relation_names_.size());

    const std::filesystem::path train_file = dir / "train2id.txt";
    if (!std::filesystem::exists(train_file))
        throw std::runtime_error("missing file: " + train_file.string());
    kg.train_ = load_triples(train_file, kg.entity_count_, kg.relation_count_);

    // valid/test are optional so toy directories with a single triple file load
    for (auto [name, split] : {std::pair{"valid2id.txt", &kg.valid_}, {"test2id.txt", &kg.test_}}) {
        const std::filesystem::path file = dir / name;
        if (std::filesystem::exists(file))
            *split = load_triples(file, kg.entity_count_, kg.relation_count_);
    }

    kg.index_golden();
    return kg;
}

KnowledgeGraph KnowledgeGraph::from_triples(std::int32_t entity_count, std::int32_t relation_count,
                                            std::vector<Triple> train, std::vector<Triple> valid,
                                            std::vector<Triple> test) {
    if (entity_count < 1 || relation_count < 1)
        throw std::invalid_argument("entity/relation counts must be >= 1");
    KnowledgeGraph kg;
    kg.entity_count_ = entity_count;
    kg.relation_count_ = relation_count;
    kg.train_ = std::move(train);
    kg.valid_ = std::move(valid);
    kg.test_ = std::move(test);
    kg.validate_bounds("train");
    kg.index_golden();
    return kg;
}

void KnowledgeGraph::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (auto [name, names, count] :
         {std::tuple{"entity2id.txt", &entity_names_, entity_count_},
          {"relation2id.txt", &relation_names_, relation_count_}}) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        out << count << '\n';
        for (std::int32_t i = 0; i < count; ++i) {
            if (static_cast<std::size_t>(i) < names->size() && !(*names)[i].empty())
                out << (*names)[i];
            else
                out << "id" << i;
            out << '\t' << i << '\n';
        }
    }
    write_triples(dir / "train2id.txt", train_);
    write_triples(dir / "valid2id.txt", valid_);
    write_triples(dir / "test2id.txt", test_);
}

const std::vector<Triple>& KnowledgeGraph::triples(Split s) const {
    switch (s) {
        case Split::Train: return train_;
        case Split::Valid: return valid_;
        case Split::Test: return test_;
    }
    throw std::logic_error("bad split");
}

void KnowledgeGraph::index_golden() {
    golden_.clear();
    golden_.reserve(train_.size() + valid_.size() + test_.size());
    for (const auto* split : {&train_, &valid_, &test_})
        for (const Triple& t : *split) golden_.insert(t);
}

void KnowledgeGraph::validate_bounds(const char*) const {
    for (const auto* split : {&train_, &valid_, &test_})
        for (const Triple& t : *split) {
            if (t.head < 0 || t.head >= entity_count_ || t.tail < 0 || t.tail >= entity_count_ ||
                t.relation < 0 || t.relation >= relation_count_)
                throw std::invalid_argument("triple index out of range");
        }
}

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "valid") return Split::Valid;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + s);
}

}  // namespace kgembed
