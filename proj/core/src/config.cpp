#include "hycurv/config.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hycurv {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& raw, const std::string& key) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "infinity" || s == "Inf")
        return std::numeric_limits<double>::infinity();
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw Error(Errc::config_error, "config: trailing characters in value of " + key);
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(Errc::config_error, "config: cannot parse number for " + key + ": '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& raw, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(raw);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, key));
    }
    return out;
}

struct FlatConfig {
    std::map<std::string, std::string> kv; // "section.key" -> value text
    bool has(const std::string& k) const { return kv.count(k) != 0; }
    std::string get(const std::string& k, const std::string& fallback = "") const {
        auto it = kv.find(k);
        return it == kv.end() ? fallback : it->second;
    }
};

FlatConfig flatten_text(const std::string& text) {
    FlatConfig fc;
    std::stringstream ss(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(Errc::config_error,
                            "config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::config_error,
                        "config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(Errc::config_error, "config line " + std::to_string(lineno) + ": empty key");
        fc.kv[section.empty() ? key : section + "." + key] = val;
    }
    return fc;
}

FlatConfig flatten_json(const std::string& text) {
    FlatConfig fc;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Errc::config_error, std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::config_error, "config: JSON root must be an object");
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object())
            throw Error(Errc::config_error, "config: JSON section '" + section + "' must be an object");
        for (const auto& [key, value] : body.items()) {
            std::string text_value;
            if (value.is_string()) {
                text_value = value.get<std::string>();
            } else if (value.is_array()) {
                std::string acc;
                for (const auto& item : value) {
                    if (!acc.empty()) acc += ", ";
                    acc += item.dump();
                }
                text_value = acc;
            } else {
                text_value = value.dump();
            }
            fc.kv[section + "." + key] = text_value;
        }
    }
    return fc;
}

RunConfig from_flat(const FlatConfig& fc) {
    RunConfig rc;

    auto require = [&](const std::string& key) {
        if (!fc.has(key)) throw Error(Errc::config_error, "config: missing key " + key);
        return fc.get(key);
    };

    rc.problem.n = static_cast<int>(parse_double(require("problem.n"), "problem.n"));
    rc.problem.k = static_cast<int>(parse_double(require("problem.k"), "problem.k"));
    if (rc.problem.n < 1 || rc.problem.n > 3)
        throw Error(Errc::config_error, "config: problem.n must be 1, 2 or 3");
    if (rc.problem.k < 1 || rc.problem.k > rc.problem.n)
        throw Error(Errc::config_error, "config: problem.k must lie in [1, n]");

    rc.psi_text = require("problem.psi");
    rc.ubar_text = require("problem.ubar");
    rc.problem.psi = expr::parse(rc.psi_text, rc.problem.n);   // parse errors -> exit 1
    rc.problem.ubar = expr::parse(rc.ubar_text, rc.problem.n);
    if (rc.problem.ubar.depends_on_u())
        throw Error(Errc::config_error, "config: problem.ubar must not reference u");

    const std::vector<double> bmin = parse_list(require("problem.box_min"), "problem.box_min");
    const std::vector<double> bmax = parse_list(require("problem.box_max"), "problem.box_max");
    if (static_cast<int>(bmin.size()) != rc.problem.n || static_cast<int>(bmax.size()) != rc.problem.n)
        throw Error(Errc::config_error, "config: box_min/box_max must have n entries");
    rc.problem.box_min = SmallVec(rc.problem.n);
    rc.problem.box_max = SmallVec(rc.problem.n);
    for (int a = 0; a < rc.problem.n; ++a) {
        rc.problem.box_min[a] = bmin[static_cast<size_t>(a)];
        rc.problem.box_max[a] = bmax[static_cast<size_t>(a)];
    }
    rc.problem.h = parse_double(require("problem.h"), "problem.h");
    if (!(rc.problem.h > 0.0)) throw Error(Errc::config_error, "config: problem.h must be positive");

    Tolerances& tol = rc.problem.tol;
    auto opt = [&](const char* key, double fallback) {
        return fc.has(key) ? parse_double(fc.get(key), key) : fallback;
    };
    tol.residual_tol = opt("solver.residual_tol", tol.residual_tol);
    tol.margin = opt("solver.margin", tol.margin);
    tol.max_newton = static_cast<int>(opt("solver.max_newton", tol.max_newton));
    tol.damping_floor = opt("solver.damping_floor", tol.damping_floor);
    tol.krylov_tol = opt("solver.krylov_tol", tol.krylov_tol);
    tol.krylov_max_iter_cap = static_cast<int>(opt("solver.krylov_max_iter_cap", tol.krylov_max_iter_cap));
    tol.t_step_init = opt("solver.t_step_init", tol.t_step_init);
    tol.t_step_min = opt("solver.t_step_min", tol.t_step_min);
    tol.subsolution_slack = opt("solver.subsolution_slack", tol.subsolution_slack);

    if (fc.has("schedule.eps"))
        rc.schedule.eps_list = parse_list(fc.get("schedule.eps"), "schedule.eps");
    if (rc.schedule.eps_list.empty())
        throw Error(Errc::config_error, "config: schedule.eps must list at least one level");
    for (double e : rc.schedule.eps_list)
        if (!(e > 0.0)) throw Error(Errc::config_error, "config: schedule entries must be positive");
    for (size_t i = 0; i + 1 < rc.schedule.eps_list.size(); ++i)
        if (!(rc.schedule.eps_list[i] > rc.schedule.eps_list[i + 1]))
            throw Error(Errc::config_error, "config: schedule.eps must be strictly decreasing");

    rc.schedule.eps0 = opt("schedule.eps0", rc.schedule.eps_list.front());
    rc.schedule.bracket_eps0 = opt("schedule.bracket_eps0",
                                   rc.schedule.eps_list.size() > 1 ? rc.schedule.eps_list[1]
                                                                   : rc.schedule.eps0);
    rc.schedule.verify_eps = opt("schedule.verify_eps", rc.schedule.eps_list.front());

    rc.compat.sigma = opt("compat.sigma", 0.0);
    if (fc.has("compat.sigma_list")) {
        rc.compat.sigma_list = parse_list(fc.get("compat.sigma_list"), "compat.sigma_list");
        if (rc.compat.sigma_list.size() != rc.schedule.eps_list.size())
            throw Error(Errc::config_error,
                        "config: compat.sigma_list must align with schedule.eps");
    }
    rc.compat.r0 = opt("compat.r0", std::numeric_limits<double>::infinity());
    rc.compat.c0 = opt("compat.c0", 0.0);

    if (fc.has("output.dir")) rc.output.dir = fc.get("output.dir");
    return rc;
}

} // namespace

double RunConfig::sigma_for(double eps) const {
    if (!compat.sigma_list.empty()) {
        for (size_t i = 0; i < schedule.eps_list.size(); ++i)
            if (std::fabs(schedule.eps_list[i] - eps) <= 1e-12)
                return compat.sigma_list[i];
    }
    return compat.sigma;
}

RunConfig parse_config_text(const std::string& text) { return from_flat(flatten_text(text)); }

RunConfig parse_config_json(const std::string& text) { return from_flat(flatten_json(text)); }

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::config_error, "config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_config_json(text);
        break;
    }
    return parse_config_text(text);
}

} // namespace hycurv
