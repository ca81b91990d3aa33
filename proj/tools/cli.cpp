#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "stackre/config.hpp"
#include "stackre/reproduce.hpp"
#include "stackre/simulation.hpp"
#include "stackre/strategies.hpp"

namespace stackre::cli {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

// A number cell remembers how many decimals the text view shows; -1 means
// six significant digits.
struct Number {
    double value = 0.0;
    int decimals = -1;
};

using Cell = std::variant<std::string, Number>;

struct Column {
    std::string name;
    std::string unit;
};

class Table {
public:
    explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (columns_[i].name == columns_[j].name)
                    throw std::logic_error("table: duplicate column '" + columns_[i].name + "'");
    }

    void add(std::vector<Cell> row) {
        if (row.size() != columns_.size()) throw std::logic_error("table: row width mismatch");
        rows_.push_back(std::move(row));
    }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "csv") write_csv(os);
        else if (format == "json") write_json(os);
        else write_text(os);
    }

private:
    static std::string header(const Column& c) {
        return c.unit.empty() ? c.name : c.name + "[" + c.unit + "]";
    }

    static std::string csv_quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    }

    void write_csv(std::ostream& os) const {
        for (std::size_t j = 0; j < columns_.size(); ++j)
            os << (j ? "," : "") << csv_quote(header(columns_[j]));
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                os << (j ? "," : "");
                if (const auto* n = std::get_if<Number>(&row[j])) os << format_sig(n->value);
                else os << csv_quote(std::get<std::string>(row[j]));
            }
            os << "\n";
        }
    }

    void write_json(std::ostream& os) const {
        nlohmann::ordered_json doc;
        doc["columns"] = nlohmann::ordered_json::array();
        for (const auto& c : columns_) doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : rows_) {
            nlohmann::ordered_json r = nlohmann::ordered_json::object();
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (const auto* n = std::get_if<Number>(&row[j])) {
                    if (std::isfinite(n->value)) r[columns_[j].name] = n->value;
                    else r[columns_[j].name] = nullptr;
                } else {
                    r[columns_[j].name] = std::get<std::string>(row[j]);
                }
            }
            doc["rows"].push_back(std::move(r));
        }
        os << doc.dump(2) << "\n";
    }

    void write_text(std::ostream& os) const {
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> width(columns_.size());
        std::vector<std::string> head;
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            head.push_back(header(columns_[j]));
            width[j] = head[j].size();
        }
        for (const auto& row : rows_) {
            std::vector<std::string> line;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (const auto* n = std::get_if<Number>(&row[j]))
                    line.push_back(n->decimals < 0 ? format_sig(n->value)
                                                   : format_fixed(n->value, n->decimals));
                else
                    line.push_back(std::get<std::string>(row[j]));
                width[j] = std::max(width[j], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        auto emit = [&](const std::vector<std::string>& line) {
            for (std::size_t j = 0; j < line.size(); ++j) {
                os << (j ? "  " : "");
                if (j + 1 < line.size()) os << std::left << std::setw(static_cast<int>(width[j]));
                os << line[j];
            }
            os << "\n";
        };
        emit(head);
        for (const auto& line : cells) emit(line);
    }

    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
};

Cell num(double v, int decimals = -1) { return Number{v, decimals}; }
Cell pct(double v, int decimals = 2) { return Number{100.0 * v, decimals}; }
Cell bp(double v, int decimals = 0) { return Number{1e4 * v, decimals}; }
Cell text(std::string s) { return s; }

const char* response_name(const BestResponse& r) {
    return std::holds_alternative<Indifferent>(r) ? "indifferent" : "unique";
}

struct Context {
    RunConfig cfg;
    std::string format = "text";
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

int cmd_equilibrium(Context& ctx) {
    const auto& c = ctx.cfg;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    if (eq.degenerate)
        *ctx.err << "warning: degenerate contract, the put is worthless (P(0) = 0); "
                    "theta_star is set to theta_max and the reinsurer holds its Merton portfolio\n";
    Table t({{"quantity", ""}, {"value", ""}, {"unit", ""}});
    t.add({text("theta_star"), pct(eq.theta_star), text("%")});
    t.add({text("xi_star"), num(eq.xi_star), text("")});
    t.add({text("pi_I_S1"), pct(eq.pi_I_0(0)), text("%")});
    t.add({text("pi_I_S2"), pct(eq.pi_I_0(1)), text("%")});
    t.add({text("pi_R_S1"), pct(eq.pi_R_0(0)), text("%")});
    t.add({text("pi_R_S2"), pct(eq.pi_R_0(1)), text("%")});
    t.add({text("critical_loading"), pct(eq.critical_loading), text("%")});
    t.add({text("put_price"), num(eq.p0, 4), text("currency")});
    t.add({text("put_price_aux"), num(eq.p0_aux, 4), text("currency")});
    t.add({text("pi_cm"), pct(c.terms.contract.pi_cm), text("%")});
    t.add({text("y_insurer"), num(eq.y_I_star), text("")});
    t.add({text("y_reinsurer"), num(eq.y_R_star), text("")});
    t.add({text("insurer_response"), text(response_name(eq.response)), text("")});
    t.add({text("degenerate"), text(eq.degenerate ? "true" : "false"), text("")});
    t.write(*ctx.out, ctx.format);
    return kOk;
}

Column parameter_column(SweepParameter p) {
    switch (p) {
        case SweepParameter::Rate: return {"r", "%"};
        case SweepParameter::Horizon: return {"T", "years"};
        case SweepParameter::Guarantee: return {"G_T", "currency"};
        case SweepParameter::RraInsurer: return {"rra_insurer", ""};
        case SweepParameter::RraReinsurer: return {"rra_reinsurer", ""};
    }
    return {"value", ""};
}

int cmd_sensitivity(Context& ctx, const std::string& param, const std::string& grid_text,
                    bool recompute) {
    const auto& c = ctx.cfg;
    const SweepParameter p = parse_sweep_parameter(param);
    const std::vector<double> grid = parse_grid(grid_text);
    const auto rows = sensitivity_sweep(p, grid, c.insurer, c.reinsurer, c.terms, c.market, recompute);
    Table t({parameter_column(p), {"pi_cm", "%"}, {"theta_star", "%"}, {"xi_star", ""},
             {"pi_I_S1", "%"}, {"pi_I_S2", "%"}, {"pi_R_S1", "%"}, {"pi_R_S2", "%"}});
    for (const auto& r : rows) {
        const Cell v = p == SweepParameter::Rate ? pct(r.value) : num(r.value);
        t.add({v, pct(r.pi_cm), pct(r.eq.theta_star), num(r.eq.xi_star), pct(r.eq.pi_I_0(0)),
               pct(r.eq.pi_I_0(1)), pct(r.eq.pi_R_0(0)), pct(r.eq.pi_R_0(1))});
    }
    t.write(*ctx.out, ctx.format);
    return kOk;
}

int cmd_weuc(Context& ctx, const std::string& ref_text, const std::string& alt_text,
             const std::string& party_text) {
    const auto& c = ctx.cfg;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    const ActionCombination ref = parse_combination(ref_text, eq);
    const ActionCombination alt = parse_combination(alt_text, eq);
    const Party party = parse_party(party_text);
    const Utility& u = party == Party::Insurer ? c.insurer : c.reinsurer;
    const WeucResult w = weuc(ref, alt, party, u, c.terms, c.market, c.simulation);
    if (!w.closed_form)
        *ctx.err << "warning: no closed form for this comparison, value obtained numerically\n";
    Table t({{"party", ""}, {"reference", ""}, {"alternative", ""}, {"weuc", "bp"},
             {"weuc_relative", ""}, {"method", ""}});
    t.add({text(to_string(party)), text(ref_text), text(alt_text), bp(w.value), num(w.value),
           text(w.closed_form ? "closed-form" : "numerical")});
    t.write(*ctx.out, ctx.format);
    return kOk;
}

double solve_loss_criterion(const std::string& criterion_text,
                            const StackelbergEquilibrium& eq, const RunConfig& c) {
    const DiscountCriterion crit = parse_criterion(criterion_text);
    if (std::holds_alternative<WeucCap>(crit))
        throw std::invalid_argument("lossprob --solve expects increase:<delta> or max:<probability>");
    return discount_select(crit, eq, c.reinsurer, c.terms, c.market);
}

int cmd_lossprob(Context& ctx, const std::string& alpha_text, const std::string& solve, bool mc) {
    const auto& c = ctx.cfg;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    std::vector<double> alphas;
    if (!solve.empty()) alphas.push_back(solve_loss_criterion(solve, eq, c));
    else alphas = parse_grid(alpha_text.empty() ? "1" : alpha_text);

    std::vector<Column> cols = {{"alpha", "%"}, {"theta", "%"}, {"loss_probability", "%"}};
    std::optional<PathEnsemble> ens;
    if (mc) {
        cols.insert(cols.end(), {{"loss_probability_mc", "%"}, {"std_error", "%"}, {"z", ""},
                                 {"status", ""}});
        const auto& k = c.terms.contract;
        ens = simulate(c.market, uniform_grid(k.maturity, 1), k.pi_cm,
                       InitialLevels{c.terms.s1, c.terms.s2, k.benchmark0},
                       c.simulation.ensemble_options());
    }
    Table t(cols);
    bool all_pass = true;
    for (double a : alphas) {
        const double q = loss_probability(a, eq, c.reinsurer, c.terms, c.market);
        std::vector<Cell> row = {pct(a), pct(a * eq.theta_star), pct(q, 4)};
        if (mc) {
            const EstimateWithError e =
                loss_probability_mc(a, eq, c.reinsurer, c.terms, c.market, *ens);
            const bool ok = e.within(q);
            all_pass = all_pass && ok;
            row.insert(row.end(), {pct(e.mean, 4), pct(e.std_error, 4), num(e.z_score(q), 2),
                                   text(ok ? "pass" : "fail")});
        }
        t.add(std::move(row));
    }
    t.write(*ctx.out, ctx.format);
    if (!all_pass) {
        *ctx.err << "verification failed: Monte Carlo loss probability outside 3 standard errors\n";
        return kVerificationFailed;
    }
    return kOk;
}

int cmd_discount(Context& ctx, const std::string& criterion_text) {
    const auto& c = ctx.cfg;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    const double alpha =
        discount_select(parse_criterion(criterion_text), eq, c.reinsurer, c.terms, c.market);
    Table t({{"criterion", ""}, {"alpha", "%"}, {"theta", "%"}, {"loss_probability", "%"}});
    t.add({text(criterion_text), pct(alpha), pct(alpha * eq.theta_star),
           pct(loss_probability(alpha, eq, c.reinsurer, c.terms, c.market), 4)});
    t.write(*ctx.out, ctx.format);
    return kOk;
}

PathEnsemble fine_ensemble(const RunConfig& c, const std::vector<std::size_t>& rebalances,
                           std::size_t paths) {
    std::size_t steps = 1;
    for (std::size_t m : rebalances) {
        if (m == 0) throw std::invalid_argument("rebalance counts must be positive");
        steps = std::lcm(steps, m);
    }
    if (steps > 1u << 16) throw std::invalid_argument("rebalance counts need too fine a grid");
    SimulationConfig sim = c.simulation;
    sim.n_paths = paths;
    sim.steps = steps;
    sim.validate();
    const auto& k = c.terms.contract;
    return simulate(c.market, uniform_grid(k.maturity, steps), k.pi_cm,
                    InitialLevels{c.terms.s1, c.terms.s2, k.benchmark0}, sim.ensemble_options());
}

std::vector<std::size_t> parse_counts(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : parse_grid(text)) {
        if (!(v >= 1.0) || v != std::floor(v))
            throw std::invalid_argument("rebalance counts must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

int cmd_simulate(Context& ctx, const std::string& what, std::optional<std::size_t> paths,
                 const std::string& rebalance_text) {
    const auto& c = ctx.cfg;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);

    if (what == "verify-all") {
        SimulationConfig sim = c.simulation;
        if (paths) sim.n_paths = *paths;
        const VerificationReport rep = verify_all(eq, c.insurer, c.reinsurer, c.terms, c.market, sim);
        Table t({{"quantity", ""}, {"closed_form", ""}, {"monte_carlo", ""}, {"std_error", ""},
                 {"z", ""}, {"status", ""}});
        for (const auto& i : rep.items)
            t.add({text(i.name), num(i.closed_form), num(i.mc.mean), num(i.mc.std_error),
                   num(i.mc.z_score(i.closed_form), 2), text(i.pass ? "pass" : "fail")});
        t.write(*ctx.out, ctx.format);
        if (rep.insurer_floor_binding > 0)
            *ctx.err << "note: insurer floor binding on " << rep.insurer_floor_binding << " paths\n";
        if (!rep.pass()) {
            const VerificationItem* w = rep.worst();
            *ctx.err << "verification failed: worst quantity " << w->name << " (closed form "
                     << format_sig(w->closed_form) << ", Monte Carlo " << format_sig(w->mc.mean)
                     << ", z = " << format_fixed(w->mc.z_score(w->closed_form), 2) << ")\n";
            return kVerificationFailed;
        }
        return kOk;
    }

    const std::size_t n = paths.value_or(10000);
    if (what == "hedge-error") {
        const auto counts = parse_counts(rebalance_text.empty() ? "64,256,1024" : rebalance_text);
        const PathEnsemble ens = fine_ensemble(c, counts, n);
        const auto pts = hedge_error(ens, c.terms.contract, c.market, counts);
        Table t({{"rebalances", ""}, {"rms_error", "currency"}, {"ratio", ""},
                 {"initial_cost", "currency"}, {"status", ""}});
        bool ok_all = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool ok = std::abs(pts[i].initial_cost - eq.p0) <= 1e-10;
            Cell ratio = text("");
            if (i > 0) {
                const double q = pts[i - 1].rms / pts[i].rms;
                ratio = num(q, 3);
                ok = ok && q >= 1.6 && q <= 2.6;
            }
            ok_all = ok_all && ok;
            t.add({num(static_cast<double>(pts[i].rebalances)), num(pts[i].rms), ratio,
                   num(pts[i].initial_cost), text(ok ? "pass" : "fail")});
        }
        t.write(*ctx.out, ctx.format);
        if (!ok_all) {
            *ctx.err << "verification failed: hedging error does not halve with 4x rebalancing\n";
            return kVerificationFailed;
        }
        return kOk;
    }
    if (what == "wealth") {
        const auto counts = parse_counts(rebalance_text.empty() ? "16,64,256" : rebalance_text);
        const PathEnsemble ens = fine_ensemble(c, counts, n);
        const auto pts =
            strategy_wealth_gap(ens, eq, c.insurer, c.reinsurer, c.terms, c.market, counts);
        Table t({{"rebalances", ""}, {"rms_gap_insurer", "currency"},
                 {"rms_gap_reinsurer", "currency"}, {"absorbed_insurer", "paths"},
                 {"absorbed_reinsurer", "paths"}});
        for (const auto& p : pts)
            t.add({num(static_cast<double>(p.rebalances)), num(p.rms_insurer), num(p.rms_reinsurer),
                   num(static_cast<double>(p.absorbed_insurer)),
                   num(static_cast<double>(p.absorbed_reinsurer))});
        t.write(*ctx.out, ctx.format);
        return kOk;
    }
    throw std::invalid_argument("simulate --what must be hedge-error, wealth or verify-all");
}

int cmd_reproduce(Context& ctx) {
    const auto checks = reproduce_paper(ctx.cfg);
    Table t({{"id", ""}, {"quantity", ""}, {"value", ""}, {"target", ""}, {"tolerance", ""},
             {"unit", ""}, {"status", ""}});
    std::vector<std::string> failed;
    for (const auto& ch : checks) {
        t.add({text(ch.id), text(ch.quantity), num(ch.value), num(ch.target), num(ch.tolerance),
               text(ch.unit), text(ch.pass ? "pass" : "fail")});
        if (!ch.pass) failed.push_back(ch.id);
    }
    t.write(*ctx.out, ctx.format);
    if (!failed.empty()) {
        *ctx.err << "verification failed: " << failed.size() << " of " << checks.size()
                 << " checks outside tolerance:";
        for (const auto& id : failed) *ctx.err << " " << id;
        *ctx.err << "\n";
        return kVerificationFailed;
    }
    return kOk;
}

int cmd_benefit(Context& ctx, const std::string& alpha_text, const std::string& rra_text,
                const std::string& horizon_text, const std::string& alt_text) {
    const auto& c = ctx.cfg;
    const double alpha = parse_number(alpha_text);
    InsurerStrategy alt = OptimalStrategy{};
    const std::string a = lower(alt_text);
    if (a.rfind("cm:", 0) == 0) {
        const auto p = parse_grid(alt_text.substr(3));
        if (p.size() != 2) throw std::invalid_argument("cm:<p1>,<p2> needs two weights");
        alt = ConstantMix{Eigen::Vector2d(p[0], p[1])};
    } else if (a != "merton" && a != "none") {
        throw std::invalid_argument("--alternative must be merton or cm:<p1>,<p2>");
    }
    const auto cells = insurer_benefit_surface(alpha, parse_grid(rra_text), parse_grid(horizon_text),
                                               alt, c.reinsurer, c.terms, c.market);
    Table t({{"rra_insurer", ""}, {"T", "years"}, {"theta_star", "%"}, {"weuc", "bp"}});
    for (const auto& cell : cells)
        t.add({num(cell.rra), num(cell.horizon), pct(cell.theta_star), bp(cell.weuc.value)});
    t.write(*ctx.out, ctx.format);
    return kOk;
}

}  // namespace

std::string format_sig(double value) {
    std::ostringstream os;
    os << std::setprecision(6) << value;
    return os.str();
}

std::string format_fixed(double value, int decimals) {
    if (!std::isfinite(value)) return format_sig(value);
    const double scale = std::pow(10.0, decimals);
    double r = std::round(value * scale) / scale;
    if (r == 0.0) r = 0.0;  // no "-0.00"
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << r;
    return os.str();
}

std::vector<double> parse_grid(const std::string& text) {
    const auto range = split(text, ':');
    if (range.size() == 3) {
        const double from = parse_number(range[0]);
        const double to = parse_number(range[1]);
        const double count = parse_number(range[2]);
        if (!(count >= 2.0) || count != std::floor(count))
            throw std::invalid_argument("grid: count must be an integer of at least 2");
        const auto n = static_cast<std::size_t>(count);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
        return g;
    }
    if (range.size() != 1) throw std::invalid_argument("grid: expected a list or from:to:count");
    std::vector<double> g;
    for (const auto& tok : split(text, ',')) g.push_back(parse_number(tok));
    if (g.empty()) throw std::invalid_argument("grid: no values");
    return g;
}

ActionCombination parse_combination(const std::string& text, const StackelbergEquilibrium& eq) {
    const std::string t = lower(text);
    const auto colon = t.find(':');
    const std::string kind = t.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "equilibrium" && arg.empty()) return ActionCombination::at_equilibrium(eq);
    if ((kind == "none" || kind == "merton") && arg.empty())
        return ActionCombination::without_reinsurance();
    if (kind == "discount" && !arg.empty()) return ActionCombination::discounted(eq, parse_number(arg));
    if (kind == "cm") {
        const auto p = parse_grid(arg);
        if (p.size() == 2)
            return ActionCombination::without_reinsurance(ConstantMix{Eigen::Vector2d(p[0], p[1])});
    }
    if (kind == "actions") {
        const auto p = parse_grid(arg);
        if (p.size() == 2) return ActionCombination{p[0], p[1], OptimalStrategy{}};
    }
    throw std::invalid_argument(
        "action combination must be equilibrium, discount:<alpha>, none, merton, cm:<p1>,<p2> or "
        "actions:<theta>,<xi>; got '" + text + "'");
}

DiscountCriterion parse_criterion(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("criterion must be cap:<weuc>, increase:<delta> or max:<probability>");
    const std::string kind = lower(text.substr(0, colon));
    const double v = parse_number(text.substr(colon + 1));
    if (kind == "cap") return WeucCap{v};
    if (kind == "increase") return LossProbIncrease{v};
    if (kind == "max") return MaxLossProb{v};
    throw std::invalid_argument("unknown criterion '" + kind + "'");
}

Party parse_party(const std::string& text) {
    const std::string p = lower(text);
    if (p == "insurer") return Party::Insurer;
    if (p == "reinsurer") return Party::Reinsurer;
    throw std::invalid_argument("--party must be insurer or reinsurer");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stackelberg reinsurance equilibrium with a put on a constant-mix benchmark"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, output_path, format = "text";
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--output", output_path, "write results to this file instead of stdout");
    app.add_option("--format", format, "text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));

    auto* eq_cmd = app.add_subcommand("equilibrium", "closed-form Stackelberg equilibrium");

    auto* sens = app.add_subcommand("sensitivity", "equilibrium over a parameter grid");
    std::string sweep_param, sweep_grid;
    bool recompute = false;
    sens->add_option("--param", sweep_param, "rra_i, rra_r, r, T or G_T")->required();
    sens->add_option("--grid", sweep_grid, "v1,v2,... or from:to:count")->required();
    sens->add_flag("--recompute-pi-cm", recompute, "benchmark weight follows the insurer's Merton fraction");

    auto* weuc_cmd = app.add_subcommand("weuc", "wealth-equivalent utility change");
    std::string ref, alt, party = "reinsurer";
    weuc_cmd->add_option("--reference", ref, "action combination")->required();
    weuc_cmd->add_option("--alternative", alt, "action combination")->required();
    weuc_cmd->add_option("--party", party, "insurer or reinsurer");

    auto* loss = app.add_subcommand("lossprob", "reinsurer loss probability");
    std::string alpha_text, solve;
    bool mc = false;
    auto* alpha_opt = loss->add_option("--alpha", alpha_text, "discount factor(s)");
    loss->add_option("--solve", solve, "increase:<delta> or max:<probability>")->excludes(alpha_opt);
    loss->add_flag("--mc", mc, "compare with Monte Carlo at the configured path count");

    auto* disc = app.add_subcommand("discount", "discount factor meeting a criterion");
    std::string criterion;
    disc->add_option("--criterion", criterion, "cap:<weuc>, increase:<delta> or max:<probability>")
        ->required();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo checks");
    std::string what, rebalances;
    std::optional<std::size_t> paths;
    sim->add_option("--what", what, "hedge-error, wealth or verify-all")
        ->required()
        ->check(CLI::IsMember({"hedge-error", "wealth", "verify-all"}));
    sim->add_option("--paths", paths, "number of paths");
    sim->add_option("--rebalances", rebalances, "rebalancing counts, e.g. 64,256,1024");

    auto* repro = app.add_subcommand("reproduce-paper", "recompute the published figures");

    auto* surface = app.add_subcommand("benefit-surface", "insurer benefit over (RRA, T)");
    std::string s_alpha = "86.73%", s_rra = "5,10,15", s_t = "10,20", s_alt = "merton";
    surface->add_option("--alpha", s_alpha, "discount factor on the equilibrium loading");
    surface->add_option("--rra", s_rra, "insurer relative risk aversion grid");
    surface->add_option("--horizon", s_t, "horizon grid in years");
    surface->add_option("--alternative", s_alt, "merton or cm:<p1>,<p2>");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    }

    Context ctx;
    ctx.format = format;
    ctx.err = &err;
    std::ofstream file;
    try {
        if (config_path.empty()) ctx.cfg.finalize();
        else ctx.cfg = load_config(config_path);
        if (!output_path.empty()) {
            file.open(output_path);
            if (!file) throw ConfigError("cannot write output file '" + output_path + "'");
            ctx.out = &file;
        } else {
            ctx.out = &out;
        }

        if (eq_cmd->parsed()) return cmd_equilibrium(ctx);
        if (sens->parsed()) return cmd_sensitivity(ctx, sweep_param, sweep_grid, recompute);
        if (weuc_cmd->parsed()) return cmd_weuc(ctx, ref, alt, party);
        if (loss->parsed()) return cmd_lossprob(ctx, alpha_text, solve, mc);
        if (disc->parsed()) return cmd_discount(ctx, criterion);
        if (sim->parsed()) return cmd_simulate(ctx, what, paths, rebalances);
        if (repro->parsed()) return cmd_reproduce(ctx);
        if (surface->parsed()) return cmd_benefit(ctx, s_alpha, s_rra, s_t, s_alt);
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace stackre::cli
