#pragma once

// Seeded generator of desk-scale scenarios for the randomized theorem
// suite: a prefix-closed knowledge base over a small vocabulary, the
// derived (sound and complete by construction) oracle, and a fully
// tabulated random scoring model.

#include "tad/core.hpp"
#include "tad/model.hpp"
#include "tad/oracle.hpp"

#include <cstdint>
#include <optional>

namespace tad {

struct RandomToy {
    Vocabulary vocab;
    KnowledgeBase kb;
    Oracle oracle;
    ScoringModel model;
    int max_len = 0;
};

// |V| in [2, 6], max_len in [2, 5]; at least one token is admissible at
// the empty prefix so decodes are non-trivial.
RandomToy make_random_toy(std::uint64_t seed);

// The oracle with one truthful pair forcibly rejected, plus the pair
// itself. Always constructible given the generator's empty-prefix
// guarantee.
struct BlindedOracle {
    Oracle oracle;
    Trace prefix;
    Token token;
};
BlindedOracle blind_one_truthful_pair(const RandomToy& toy);

} // namespace tad
