#pragma once

#include <random>

#include "catsim/state.hpp"

namespace test_util {

using catsim::cplx;
using catsim::state_vector;

inline std::mt19937_64 make_rng(uint64_t seed = 0x5eed5eedULL) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline cplx random_label(std::mt19937_64& g, double scale = 1.5) {
    return {uniform(g, -scale, scale), uniform(g, -scale, scale)};
}

inline state_vector random_state(std::mt19937_64& g, int modes, int terms, double scale = 1.5) {
    state_vector s(modes);
    for (int t = 0; t < terms; ++t) {
        std::vector<cplx> labels;
        for (int m = 0; m < modes; ++m) labels.push_back(random_label(g, scale));
        s.push_term({uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0)}, std::move(labels));
    }
    return s;
}

inline state_vector random_normalized(std::mt19937_64& g, int modes, int terms,
                                      double scale = 1.5) {
    while (true) {
        state_vector s = random_state(g, modes, terms, scale);
        if (catsim::norm(s) > 1e-6) return catsim::normalize(s);
    }
}

}  // namespace test_util
