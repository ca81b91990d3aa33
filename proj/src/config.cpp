#include "stackre/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "stackre/analysis.hpp"

namespace stackre {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Drops an inline "; comment" or "# comment".
std::string strip_comment(const std::string& s) {
    const auto pos = s.find_first_of(";#");
    return trim(pos == std::string::npos ? s : s.substr(0, pos));
}

using Tree = boost::property_tree::ptree;

class Section {
public:
    Section(const Tree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    void number(const char* key, double& out) {
        if (auto v = raw(key)) out = number_at(key, *v);
    }

    void count(const char* key, std::size_t& out) {
        if (auto v = raw(key)) {
            const double x = number_at(key, *v);
            if (!(x >= 0.0) || x != std::floor(x))
                throw ConfigError(name_ + "." + key + ": expected a non-negative integer");
            out = static_cast<std::size_t>(x);
        }
    }

    std::optional<std::string> raw(const char* key) {
        seen_.insert(key);
        if (!tree_) return std::nullopt;
        auto child = tree_->get_optional<std::string>(Tree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return strip_comment(*child);
    }

    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& [key, _] : *tree_)
            if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }

private:
    double number_at(const char* key, const std::string& text) const {
        try {
            return parse_number(text);
        } catch (const ConfigError& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    const Tree* tree_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace

double parse_number(const std::string& text) {
    std::string s = trim(text);
    double scale = 1.0;
    if (!s.empty() && s.back() == '%') {
        scale = 0.01;
        s = trim(s.substr(0, s.size() - 1));
    } else if (s.size() > 2 && lower(s.substr(s.size() - 2)) == "bp") {
        scale = 1e-4;
        s = trim(s.substr(0, s.size() - 2));
    } else if (s.size() > 2 && lower(s.substr(s.size() - 2)) == "pp") {
        scale = 0.01;
        s = trim(s.substr(0, s.size() - 2));
    }
    if (s.empty()) throw ConfigError("empty number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + text + "'");
    return v * scale;
}

Utility parse_utility(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    kind = lower(kind);
    std::vector<double> args;
    std::string tok;
    while (in >> tok) args.push_back(parse_number(tok));

    Utility u;
    if (kind == "log" && args.empty()) {
        u = LogUtility{};
    } else if (kind == "power" && args.size() == 1) {
        u = PowerUtility{args[0]};
    } else if (kind == "rra" && args.size() == 1) {
        if (args[0] == 1.0) u = LogUtility{};
        else u = PowerUtility{1.0 - args[0]};
    } else if (kind == "hara" && args.size() == 2) {
        u = HaraUtility{args[0], args[1]};
    } else {
        throw ConfigError("utility must be 'power <b>', 'rra <value>', 'log' or 'hara <a> <b>', got '" +
                          text + "'");
    }
    try {
        validate(u);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return u;
}

RunConfig parse_config(std::istream& in) {
    Tree root;
    try {
        boost::property_tree::ini_parser::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const std::set<std::string> sections = {"market", "contract", "utilities", "simulation"};
    for (const auto& [name, child] : root) {
        if (!sections.count(name))
            throw ConfigError(child.empty() ? "key '" + name + "' outside a section"
                                            : "unknown section [" + name + "]");
    }
    auto section = [&](const char* name) {
        auto it = root.find(name);
        return Section(it == root.not_found() ? nullptr : &it->second, name);
    };

    RunConfig cfg;
    {
        Section s = section("market");
        s.number("r", cfg.market.r);
        s.number("mu1", cfg.market.mu1);
        s.number("mu2", cfg.market.mu2);
        s.number("sigma1", cfg.market.sigma1);
        s.number("sigma2", cfg.market.sigma2);
        s.number("rho", cfg.market.rho);
        s.reject_unknown();
    }
    {
        Section s = section("contract");
        auto& t = cfg.terms;
        s.number("guarantee", t.contract.guarantee);
        s.number("horizon", t.contract.maturity);
        if (auto v = s.raw("pi_cm")) {
            if (lower(*v) == "auto") {
                cfg.pi_cm_auto = true;
            } else {
                cfg.pi_cm_auto = false;
                try {
                    t.contract.pi_cm = parse_number(*v);
                } catch (const ConfigError& e) {
                    throw ConfigError(std::string("contract.pi_cm: ") + e.what());
                }
            }
        }
        s.number("theta_max", t.theta_max);
        s.number("xi_bar", t.xi_bar);
        s.number("insurer_wealth", t.insurer_wealth);
        s.number("reinsurer_wealth", t.reinsurer_wealth);
        s.number("s1", t.s1);
        s.number("s2", t.s2);
        s.reject_unknown();
    }
    {
        Section s = section("utilities");
        if (auto v = s.raw("insurer")) cfg.insurer = parse_utility(*v);
        if (auto v = s.raw("reinsurer")) cfg.reinsurer = parse_utility(*v);
        s.reject_unknown();
    }
    {
        Section s = section("simulation");
        s.count("paths", cfg.simulation.n_paths);
        s.count("steps", cfg.simulation.steps);
        if (auto v = s.raw("seed")) {
            const char* end = v->data() + v->size();
            const auto [ptr, ec] = std::from_chars(v->data(), end, cfg.simulation.seed);
            if (ec != std::errc{} || ptr != end)
                throw ConfigError("simulation.seed: expected an unsigned integer");
        }
        if (auto v = s.raw("antithetic")) {
            const std::string b = lower(*v);
            if (b == "true" || b == "1" || b == "yes") cfg.simulation.antithetic = true;
            else if (b == "false" || b == "0" || b == "no") cfg.simulation.antithetic = false;
            else throw ConfigError("simulation.antithetic: expected true or false");
        }
        s.reject_unknown();
    }
    cfg.finalize();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in);
}

void RunConfig::finalize() {
    try {
        market.validate();
        validate(insurer);
        validate(reinsurer);
        if (std::holds_alternative<HaraUtility>(reinsurer))
            throw std::invalid_argument("utilities.reinsurer: HARA utility is not supported");
        if (pi_cm_auto) terms.contract.pi_cm = insurer_merton_fraction(insurer, market);
        terms.contract.benchmark0 = terms.insurer_wealth;
        terms.validate(market);
        simulation.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace stackre
