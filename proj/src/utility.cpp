#include "stackre/utility.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stackre {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_exponent(double b, const char* who) {
    if (!(b < 1.0) || b == 0.0 || !std::isfinite(b))
        throw std::invalid_argument(std::string(who) + ": exponent b must lie in (-inf, 1) \\ {0}");
}

}  // namespace

void PowerUtility::validate() const { check_exponent(b, "power utility"); }

void HaraUtility::validate() const {
    check_exponent(b, "hara utility");
    if (!std::isfinite(a)) throw std::invalid_argument("hara utility: a must be finite");
}

void validate(const Utility& u) {
    std::visit([](const auto& v) { v.validate(); }, u);
}

double utility_exponent(const Utility& u) {
    return std::visit(overloaded{[](const PowerUtility& p) { return p.b; },
                                 [](const LogUtility&) { return 0.0; },
                                 [](const HaraUtility& h) { return h.b; }},
                      u);
}

double utility_shift(const Utility& u) {
    if (const auto* h = std::get_if<HaraUtility>(&u)) return h->a;
    return 0.0;
}

double merton_coefficient(const Utility& u) { return 1.0 / (1.0 - utility_exponent(u)); }

double evaluate(const Utility& u, double wealth) {
    const double x = wealth + utility_shift(u);
    if (!(x > 0.0)) throw std::domain_error("utility: wealth outside the domain");
    return std::visit(overloaded{[x](const PowerUtility& p) { return std::pow(x, p.b) / p.b; },
                                 [x](const LogUtility&) { return std::log(x); },
                                 [x](const HaraUtility& h) { return std::pow(x, h.b) / h.b; }},
                      u);
}

double marginal(const Utility& u, double wealth) {
    const double x = wealth + utility_shift(u);
    if (!(x > 0.0)) throw std::domain_error("utility: wealth outside the domain");
    const double b = utility_exponent(u);
    return std::pow(x, b - 1.0);
}

double inverse_marginal(const Utility& u, double y) {
    if (!(y > 0.0)) throw std::domain_error("inverse marginal: y must be positive");
    const double b = utility_exponent(u);
    return std::pow(y, 1.0 / (b - 1.0)) - utility_shift(u);
}

std::string describe(const Utility& u) {
    std::ostringstream os;
    std::visit(overloaded{[&](const PowerUtility& p) { os << "power(b=" << p.b << ")"; },
                          [&](const LogUtility&) { os << "log"; },
                          [&](const HaraUtility& h) {
                              os << "hara(a=" << h.a << ", b=" << h.b << ")";
                          }},
               u);
    return os.str();
}

}  // namespace stackre
