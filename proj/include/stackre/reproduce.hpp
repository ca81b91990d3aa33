#pragma once

#include <string>
#include <vector>

#include "stackre/config.hpp"

namespace stackre {

// One published figure recomputed from the closed forms. Values are in
// `unit` ("%", "bp" or "" for plain numbers).
struct PaperCheck {
    std::string id;
    std::string quantity;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string unit;
    bool pass = false;
};

// Base-case published numbers and qualitative claims. Deterministic: no
// Monte Carlo is involved.
std::vector<PaperCheck> reproduce_paper(const RunConfig& cfg);

// Discount factor used by the published insurer-benefit figures.
inline constexpr double kPublishedAlpha = 0.8673;

}  // namespace stackre
