#include "pucci/io/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "pucci/error.hpp"

namespace pucci::io {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::ConfigParse, message); }

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& field, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) fail("field '" + field + "': expected a number, got '" + v + "'");
    return out;
}

template <typename Int>
Int to_int(const std::string& field, const std::string& v) {
    Int out = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) fail("field '" + field + "': expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("field '" + field + "': expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    auto num = [](double RunConfig::*m) -> Setter {
        return [m](RunConfig& c, const std::string& f, const std::string& v) { c.*m = to_double(f, v); };
    };
    static const std::map<std::string, Setter> table{
        {"problem.operator",
         [](RunConfig& c, const std::string& f, const std::string& v) {
             const auto op = parse_operator(v);
             if (!op) fail("field '" + f + "': expected plus or minus, got '" + v + "'");
             c.problem.op = *op;
         }},
        {"problem.lambda", [](RunConfig& c, const std::string& f, const std::string& v) { c.problem.lambda = to_double(f, v); }},
        {"problem.Lambda", [](RunConfig& c, const std::string& f, const std::string& v) { c.problem.Lambda = to_double(f, v); }},
        {"problem.N", [](RunConfig& c, const std::string& f, const std::string& v) { c.problem.N = to_int<int>(f, v); }},
        {"problem.p", [](RunConfig& c, const std::string& f, const std::string& v) { c.problem.p = to_double(f, v); }},
        {"problem.a", [](RunConfig& c, const std::string& f, const std::string& v) { c.problem.a = to_double(f, v); }},

        {"geometry.kind",
         [](RunConfig& c, const std::string& f, const std::string& v) {
             if (v == "annulus") c.geometry = GeometryKind::Annulus;
             else if (v == "exterior") c.geometry = GeometryKind::Exterior;
             else fail("field '" + f + "': expected annulus or exterior, got '" + v + "'");
         }},
        {"geometry.inner", num(&RunConfig::inner)},
        {"geometry.outer", num(&RunConfig::outer)},
        {"geometry.R", num(&RunConfig::exterior_R)},
        {"geometry.negative", [](RunConfig& c, const std::string& f, const std::string& v) { c.negative = to_bool(f, v); }},

        {"solver.rel_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.integrator.rel_tol = to_double(f, v); }},
        {"solver.abs_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.integrator.abs_tol = to_double(f, v); }},
        {"solver.max_steps", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.integrator.max_steps = to_int<long>(f, v); }},
        {"solver.phase_rel_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.phase.rel_tol = to_double(f, v); }},
        {"solver.phase_abs_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.phase.abs_tol = to_double(f, v); }},
        {"solver.x_escape", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.phase.x_escape = to_double(f, v); }},
        {"solver.converge_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.phase.converge_tol = to_double(f, v); }},
        {"solver.manifold_eps", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.phase.manifold_eps = to_double(f, v); }},
        {"solver.delta_min", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.delta_min = to_double(f, v); }},
        {"solver.delta_max", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.delta_max = to_double(f, v); }},
        {"solver.expansion", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.expansion = to_double(f, v); }},
        {"solver.delta_rel_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.delta_rel_tol = to_double(f, v); }},
        {"solver.max_bisections", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.max_bisections = to_int<int>(f, v); }},
        {"solver.t_budget", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.t_budget = to_double(f, v); }},
        {"solver.fast_tol", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.fast_tol = to_double(f, v); }},
        {"solver.threads", [](RunConfig& c, const std::string& f, const std::string& v) { c.solver.threads = to_int<unsigned>(f, v); }},
        {"solver.boundary_tol", num(&RunConfig::boundary_tol)},

        {"exterior.mode", [](RunConfig& c, const std::string&, const std::string& v) { c.mode = v; }},
        {"exterior.sweep_lo", num(&RunConfig::sweep_lo)},
        {"exterior.sweep_hi", num(&RunConfig::sweep_hi)},
        {"exterior.sweep_count", [](RunConfig& c, const std::string& f, const std::string& v) { c.sweep_count = to_int<int>(f, v); }},

        {"portrait.fan", [](RunConfig& c, const std::string& f, const std::string& v) { c.fan = to_int<int>(f, v); }},
        {"portrait.t_end", num(&RunConfig::portrait_t)},
        {"portrait.manifold_t", num(&RunConfig::manifold_t)},

        {"invariants.budget", [](RunConfig& c, const std::string& f, const std::string& v) { c.budget = to_int<std::size_t>(f, v); }},
        {"invariants.seed", [](RunConfig& c, const std::string& f, const std::string& v) { c.seed = to_int<std::uint64_t>(f, v); }},
        {"invariants.energy_tol", num(&RunConfig::energy_tol)},
        {"invariants.poincare_offset", num(&RunConfig::poincare_offset)},
        {"invariants.poincare_returns", [](RunConfig& c, const std::string& f, const std::string& v) { c.poincare_returns = to_int<int>(f, v); }},
        {"invariants.slow_delta", num(&RunConfig::slow_delta)},

        {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
    };
    return table;
}

}  // namespace

void set_field(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string field = section + "." + key;
    const auto& table = setters();
    const auto it = table.find(field);
    if (it == table.end()) fail("unknown field '" + field + "'");
    if (value.empty()) fail("field '" + field + "': empty value");
    it->second(config, field, value);
}

void parse_config(std::string_view text, const std::string& source, RunConfig& config) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto hash = line.find_first_of("#;");
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') fail(where + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) fail(where + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(where + "expected key = value");
        if (section.empty()) fail(where + "key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(where + "missing key");
        try {
            set_field(config, section, key, value);
        } catch (const Error& e) {
            fail(where + e.what());
        }
    }
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    parse_config(buf.str(), path.string(), config);
}

void check(const RunConfig& config) {
    validate(config.problem);
    if (config.geometry == GeometryKind::Annulus) {
        if (!(config.inner > 0.0)) fail("geometry.inner must be positive");
        if (!(config.inner < config.outer)) {
            fail("geometry.inner must be smaller than geometry.outer (inner < outer)");
        }
    } else if (!(config.exterior_R > 0.0)) {
        fail("geometry.R must be positive");
    }
    if (!(config.solver.integrator.rel_tol > 0.0) || !(config.solver.integrator.abs_tol > 0.0)) {
        fail("solver.rel_tol and solver.abs_tol must be positive");
    }
    if (config.mode != "fast" && config.mode != "sweep") {
        if (config.mode.rfind("delta=", 0) != 0) fail("exterior.mode must be fast, sweep or delta=<value>");
        const double d = to_double("exterior.mode", config.mode.substr(6));
        if (!(d > 0.0)) fail("exterior.mode: delta must be positive");
    }
    if (config.sweep_count < 2 || !(config.sweep_lo > 0.0) || !(config.sweep_hi > config.sweep_lo)) {
        fail("exterior sweep needs 0 < sweep_lo < sweep_hi and sweep_count >= 2");
    }
    if (config.fan < 0) fail("portrait.fan must be non-negative");
    if (config.budget == 0) fail("invariants.budget must be positive");
    if (config.poincare_returns < 1) fail("invariants.poincare_returns must be positive");
}

std::filesystem::path resolve_out_dir(const std::filesystem::path& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("PUCCI_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return RunConfig{}.out_dir;
}

}  // namespace pucci::io
