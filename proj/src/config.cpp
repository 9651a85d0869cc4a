#include "phstring/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace phs {

const char* paper_fig1_preset_text() {
    return R"(# In-domain actuated vibrating string, observer-fed energy-Casimir loop.

[string]
T = 1.0
rho = 1.0
L = 1.0

[patch]
z_p1 = 0.4
z_p2 = 0.6

[equilibrium]
a = 0.2
b = 0.5

[controller]
c1 = 5.0
c2 = 30.0

[observer]
k = 30.0

[sim]
n = 100
dt = 0.005
t_final = 10.0
integrator = "rk4"
framework = "jb"
feedback = "observer"

[init]
plant = "rest"
observer = "linear"
observer_slope = 0.1
)";
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
    bool in_quote = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_quote = !in_quote;
        if (s[i] == '#' && !in_quote) return s.substr(0, i);
    }
    return s;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

struct KeyContext {
    std::string where;  // "source:line" or the override key
};

[[noreturn]] void bad_value(const KeyContext& ctx, const std::string& key,
                            const std::string& what) {
    throw ParseError(ctx.where + ": invalid value for " + key + " (" + what + ")");
}

double to_double(const KeyContext& ctx, const std::string& key, const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0' || tok.empty() || !std::isfinite(v)) {
        bad_value(ctx, key, "expected a number");
    }
    return v;
}

int to_int(const KeyContext& ctx, const std::string& key, const std::string& tok) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || tok.empty()) {
        bad_value(ctx, key, "expected an integer");
    }
    return static_cast<int>(v);
}

using Setter = std::function<void(SimConfig&, const KeyContext&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"string.T",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.params.T = to_double(x, "string.T", v);
         }},
        {"string.rho",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.params.rho = to_double(x, "string.rho", v);
         }},
        {"string.L",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.params.L = to_double(x, "string.L", v);
         }},
        {"patch.z_p1",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.z_p1 = to_double(x, "patch.z_p1", v);
         }},
        {"patch.z_p2",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.z_p2 = to_double(x, "patch.z_p2", v);
         }},
        {"equilibrium.a",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.eq_a = to_double(x, "equilibrium.a", v);
         }},
        {"equilibrium.b",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.eq_b = to_double(x, "equilibrium.b", v);
         }},
        {"controller.c1",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.c1 = to_double(x, "controller.c1", v);
         }},
        {"controller.c2",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.c2 = to_double(x, "controller.c2", v);
         }},
        {"observer.k",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.k = to_double(x, "observer.k", v);
         }},
        {"sim.n",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.n_cells = to_int(x, "sim.n", v);
         }},
        {"sim.dt",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.dt = to_double(x, "sim.dt", v);
         }},
        {"sim.t_final",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.t_final = to_double(x, "sim.t_final", v);
         }},
        {"sim.integrator",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             const std::string s = unquote(v);
             if (s == "rk4") {
                 c.integrator = Integrator::rk4;
             } else if (s == "midpoint") {
                 c.integrator = Integrator::implicit_midpoint;
             } else {
                 bad_value(x, "sim.integrator", "expected rk4 or midpoint");
             }
         }},
        {"sim.framework",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             const std::string s = unquote(v);
             if (s == "jb") {
                 c.framework = RunFramework::jb;
             } else if (s == "sd") {
                 c.framework = RunFramework::sd;
             } else if (s == "both") {
                 c.framework = RunFramework::both;
             } else {
                 bad_value(x, "sim.framework", "expected jb, sd or both");
             }
         }},
        {"sim.feedback",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             const std::string s = unquote(v);
             if (s == "plant") {
                 c.feedback = FeedbackSource::plant;
             } else if (s == "observer") {
                 c.feedback = FeedbackSource::observer;
             } else {
                 bad_value(x, "sim.feedback", "expected plant or observer");
             }
         }},
        {"init.plant",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             const std::string s = unquote(v);
             if (s == "rest") {
                 c.plant_init = PlantInit::rest;
             } else if (s == "eigenmode") {
                 c.plant_init = PlantInit::eigenmode;
             } else {
                 bad_value(x, "init.plant", "expected rest or eigenmode");
             }
         }},
        {"init.plant_amplitude",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.plant_amplitude = to_double(x, "init.plant_amplitude", v);
         }},
        {"init.observer",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             const std::string s = unquote(v);
             if (s == "linear") {
                 c.observer_init = ObserverInit::linear;
             } else if (s == "copy") {
                 c.observer_init = ObserverInit::copy_plant;
             } else if (s == "rest") {
                 c.observer_init = ObserverInit::rest;
             } else {
                 bad_value(x, "init.observer", "expected linear, copy or rest");
             }
         }},
        {"init.observer_slope",
         [](SimConfig& c, const KeyContext& x, const std::string& v) {
             c.observer_slope = to_double(x, "init.observer_slope", v);
         }},
    };
    return table;
}

void require(bool ok, const char* invariant) {
    if (!ok) throw ValidationError(std::string("invariant violated: ") + invariant);
}

}  // namespace

void validate_config(const SimConfig& c) {
    require(c.params.T > 0.0, "T > 0");
    require(c.params.rho > 0.0, "rho > 0");
    require(c.params.L > 0.0, "L > 0");
    require(0.0 < c.z_p1 && c.z_p1 < c.z_p2 && c.z_p2 < c.params.L,
            "0 < z_p1 < z_p2 < L");
    require(c.eq_a >= 0.0 && c.eq_b >= 0.0, "a >= 0, b >= 0");
    require(std::abs(c.eq_a - 2.0 * c.eq_b * (c.z_p2 - c.z_p1)) <= 1e-12,
            "a = 2 b (z_p2 - z_p1)");
    require(c.c1 > 0.0, "c1 > 0");
    require(c.c2 > 0.0, "c2 > 0");
    require(c.k >= 0.0, "k >= 0");
    require(c.n_cells >= 8, "n >= 8");
    require(c.dt > 0.0, "dt > 0");
    require(c.t_final >= c.dt, "t_final >= dt");
    if (c.integrator == Integrator::rk4) {
        const double dz = c.params.L / c.n_cells;
        const double dt_max = 0.5 * dz / std::sqrt(c.params.T / c.params.rho);
        if (c.dt > dt_max * (1.0 + 1e-12)) {
            throw CflViolation("dt <= 0.5 dz sqrt(rho/T) required for rk4");
        }
    }
}

SimConfig parse_config_text(const std::string& text, const std::string& source) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const KeyContext ctx{source + ":" + std::to_string(line_no)};

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(ctx.where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ParseError(ctx.where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(ctx.where + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(ctx.where + ": expected key = value");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) {
            throw ParseError(ctx.where + ": unknown key \"" + full + "\"");
        }
        it->second(cfg, ctx, value);
    }
    validate_config(cfg);
    return cfg;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("file not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
        throw ParseError("unknown config key \"" + key + "\"");
    }
    it->second(cfg, KeyContext{"override " + key}, value);
}

}  // namespace phs
