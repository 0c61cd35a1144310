#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#ifndef PERCLAB_TEST_DATA
#define PERCLAB_TEST_DATA "tests/data"
#endif

namespace fixtures {

inline const std::string kCorpus = PERCLAB_TEST_DATA;

// 5 x 5 points strictly inside the convergence region of J: r at fractions of
// 1/sqrt(b), z log-spaced between b r and 1/r.
inline std::vector<std::pair<double, double>> j_interior_grid(int d) {
    const double b = d - 1;
    std::vector<std::pair<double, double>> out;
    for (double f : {0.1, 0.25, 0.4, 0.55, 0.7}) {
        const double r = f / std::sqrt(b);
        const double lo = std::log(b * r), hi = std::log(1 / r);
        for (double t : {0.25, 0.375, 0.5, 0.625, 0.75}) out.emplace_back(r, std::exp(lo + t * (hi - lo)));
    }
    return out;
}

}  // namespace fixtures
