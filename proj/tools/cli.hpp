#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stackre/analysis.hpp"
#include "stackre/equilibrium.hpp"

namespace stackre::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kNumericalFailure = 2;
inline constexpr int kVerificationFailed = 3;

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0.01,0.02,3%" lists values; "from:to:count" gives count evenly spaced
// values including both ends.
std::vector<double> parse_grid(const std::string& text);

// Six significant digits, as written to CSV.
std::string format_sig(double value);

// Rounded half away from zero to `decimals` places.
std::string format_fixed(double value, int decimals);

// equilibrium | discount:<alpha> | none | merton | cm:<p1>,<p2> | actions:<theta>,<xi>
ActionCombination parse_combination(const std::string& text, const StackelbergEquilibrium& eq);

// cap:<weuc> | increase:<delta> | max:<probability>
DiscountCriterion parse_criterion(const std::string& text);

Party parse_party(const std::string& text);

}  // namespace stackre::cli
