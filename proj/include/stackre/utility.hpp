#pragma once

#include <string>
#include <variant>

namespace stackre {

// U(x) = x^b / b with b < 1, b != 0.
struct PowerUtility {
    double b = -9.0;
    void validate() const;
};

struct LogUtility {
    void validate() const {}
};

// U(x) = (x + a)^b / b, defined for x > -a.
struct HaraUtility {
    double a = 10.0;
    double b = -9.0;
    void validate() const;
};

using Utility = std::variant<PowerUtility, LogUtility, HaraUtility>;

void validate(const Utility& u);

// Curvature exponent b; 0 for log utility.
double utility_exponent(const Utility& u);

// Wealth shift a; 0 unless HARA.
double utility_shift(const Utility& u);

// 1 / (1 - b), the Merton scaling.
double merton_coefficient(const Utility& u);

// Throws std::domain_error outside the domain of U.
double evaluate(const Utility& u, double wealth);
double marginal(const Utility& u, double wealth);

// I(y) = (U')^{-1}(y) for y > 0.
double inverse_marginal(const Utility& u, double y);

std::string describe(const Utility& u);

inline Utility power(double b) { return PowerUtility{b}; }

// Relative risk aversion 1 - b maps to the power exponent b.
inline Utility power_from_rra(double rra) { return PowerUtility{1.0 - rra}; }

}  // namespace stackre
