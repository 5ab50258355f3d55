#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chorm/ast.hpp"
#include "chorm/result.hpp"
#include "chorm/typing.hpp" // SortEnv

namespace chorm {

// ------------------------------------------------------------ path events ----

struct PCom {
    RoleName from;
    RoleName to;
    Sort sort;
    friend auto operator<=>(const PCom&, const PCom&) = default;
};
struct PSel {
    RoleName from;
    RoleName to;
    Label label;
    friend auto operator<=>(const PSel&, const PSel&) = default;
};

using PathEvent = std::variant<PCom, PSel>;
using Word = std::vector<PathEvent>;

std::string path_event_text(const PathEvent& e);
std::string word_text(const Word& w);

// ---------------------------------------------------------- path automaton ----

// One state per distinct subterm of the type's regular tree (recursion
// resolved to its body); every state accepts, so the language is the
// prefix-closed set of paths.
struct PathAutomaton {
    int initial = 0;
    std::vector<std::vector<std::pair<PathEvent, int>>> edges;
    size_t state_count() const { return edges.size(); }
};

PathAutomaton paths_automaton(const TypePtr& g);

struct PathSet {
    std::set<Word> all;     // every accepted word of length <= D
    std::set<Word> maximal; // words ending in an edgeless state or of length exactly D
};

PathSet enumerate_paths(const PathAutomaton& a, int depth);

// --------------------------------------------------------- type extraction ----

struct ExtractError {
    std::string path;
    std::string message;
};

// Reads the global type back off a single-session choreography (one leading
// start permitted and skipped). Conditionals must either offer two sibling
// selections with distinct labels or extract to equal types.
Result<TypePtr, ExtractError> extract_type(const ChorPtr& c, const SortEnv& sorts);

// ------------------------------------------------------------ shuffle/mesh ----

struct ShuffleComponent {
    int original_index = -1;                 // -1 when decomposing against a flat word set
    std::map<RoleName, RoleName> renaming;   // injective role cast applied to this component
    std::vector<Word> words;                 // the base words, in play order, after renaming
};

struct ShuffleWitness {
    std::vector<int> coloring; // component index per position of the decomposed word
    std::vector<ShuffleComponent> components;
};

// Splits p into at most M interleaved components, each a back-to-back
// concatenation of base words.
std::optional<ShuffleWitness> shuffle_decompose(const Word& p, const std::set<Word>& base_words, int m_bound);

struct MeshReport {
    bool member = true;
    int checked_paths = 0;
    std::optional<Word> failing;
    std::optional<ShuffleWitness> witness; // decomposition of the longest checked path
    int depth_bound = 0;                   // D: candidate path length bound
    int base_bound = 0;                    // L: base word length bound
    int component_bound = 0;               // M: interleaved component bound
};

// Bounded membership of g in the mesh of the originals: every maximal path
// of g up to depth D must interleave from components, each following one
// original under one injective role renaming. member=true certifies only up
// to the bounds; member=false pins a concrete failing path.
MeshReport mesh_member(const TypePtr& g, const std::vector<TypePtr>& originals, int depth, int base_len,
                       int m_bound);

} // namespace chorm
