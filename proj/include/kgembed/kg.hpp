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

#ifndef KGEMBED_KG_HPP
#define KGEMBED_KG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace kgembed {

/// An integer-indexed (head, relation, tail) fact.
struct Triple {
    std::int32_t head = 0;
    std::int32_t relation = 0;
    std::int32_t tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        // 64-bit mix of the three ids; good enough for dense benchmark vocabularies.
        std::uint64_t x = static_cast<std::uint32_t>(t.head);
        x = x * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.relation);
        x = x * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.tail);
        x ^= x >> 32;
        x *= 0xd6e8feb86659fd93ULL;
        x ^= x >> 32;
        return static_cast<std::size_t>(x);
    }
};

enum class Split { Train, Valid, Test };

/// Entity/relation vocabularies, train/valid/test triple lists, and the
/// membership set of all observed ("golden") triples.
///
/// Immutable after construction; safe for unrestricted concurrent reads.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    /// Loads the id-mapped benchmark layout: entity2id.txt / relation2id.txt
    /// ("name<TAB>id" lines, optional leading count line) and train2id.txt /
    /// valid2id.txt / test2id.txt (count line, then "h t r" per line).
    /// valid/test files may be absent (empty splits). Malformed input is
    /// reported with file name and line number.
    static KnowledgeGraph load(const std::filesystem::path& dir);

    /// Builds a graph directly from triple lists (synthetic/test graphs).
    static KnowledgeGraph from_triples(std::int32_t entity_count,
                                       std::int32_t relation_count,
                                       std::vector<Triple> train,
                                       std::vector<Triple> valid = {},
                                       std::vector<Triple> test = {});

    /// Writes the on-disk layout accepted by load().
    void save(const std::filesystem::path& dir) const;

    std::int32_t entity_count() const { return entity_count_; }
    std::int32_t relation_count() const { return relation_count_; }

    const std::vector<Triple>& train() const { return train_; }
    const std::vector<Triple>& valid() const { return valid_; }
    const std::vector<Triple>& test() const { return test_; }
    const std::vector<Triple>& triples(Split s) const;

    /// True iff the triple appears in some split. O(1) expected.
    bool contains(const Triple& t) const { return golden_.count(t) != 0; }

    std::size_t golden_size() const { return golden_.size(); }

    const std::vector<std::string>& entity_names() const { return entity_names_; }
    const std::vector<std::string>& relation_names() const { return relation_names_; }

private:
    void index_golden();
    void validate_bounds(const char* split_name) const;

    std::int32_t entity_count_ = 0;
    std::int32_t relation_count_ = 0;
    std::vector<Triple> train_, valid_, test_;
    std::unordered_set<Triple, TripleHash> golden_;
    std::vector<std::string> entity_names_, relation_names_;
};

const char* to_string(Split s);
Split parse_split(const std::string& s);

}  // namespace kgembed

#endif
